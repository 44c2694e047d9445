//! Fixed-width float formatting for deterministic file output.
//!
//! All CSV exports print floats with [`sig6`] (six significant digits,
//! `%.6g`-style: fixed notation in the mid range, scientific otherwise,
//! trailing zeros stripped) so repeated runs are byte-identical.

/// Formats with `digits` significant digits, `%g` style.
pub fn sig(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    // std's scientific formatter rounds the mantissa correctly for the
    // requested precision; reassemble into %g form from there.
    let sci = format!("{:.*e}", digits - 1, x);
    let (mant, exp) = sci.split_once('e').expect("scientific form has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let neg = mant.starts_with('-');
    let digits_only: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();

    let body = if exp < -4 || exp >= digits as i32 {
        let m = trim_zeros(&digits_only);
        let m = if m.len() == 1 {
            m.to_string()
        } else {
            format!("{}.{}", &m[..1], &m[1..])
        };
        format!("{m}e{exp}")
    } else if exp >= 0 {
        let split = (exp + 1) as usize;
        let int_part = &digits_only[..split];
        let frac = trim_zeros(&digits_only[split..]);
        if frac.is_empty() {
            int_part.to_string()
        } else {
            format!("{int_part}.{frac}")
        }
    } else {
        let frac = trim_zeros(&digits_only);
        format!("0.{}{}", "0".repeat((-exp - 1) as usize), frac)
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

fn trim_zeros(s: &str) -> &str {
    s.trim_end_matches('0')
}

/// Six significant digits, the file-output default.
pub fn sig6(x: f64) -> String {
    sig(x, 6)
}

/// Rounds to six significant decimal digits, for JSON number output.
pub fn round_sig6(x: f64) -> f64 {
    if !x.is_finite() {
        return x;
    }
    sig6(x).parse().expect("sig6 output is a valid float")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mid_range_is_fixed_notation() {
        assert_eq!(sig6(0.8038), "0.8038");
        assert_eq!(sig6(6.121), "6.121");
        assert_eq!(sig6(0.5), "0.5");
        assert_eq!(sig6(-1.42), "-1.42");
        assert_eq!(sig6(123456.0), "123456");
        assert_eq!(sig6(123456.7), "123457");
        assert_eq!(sig6(0.0001), "0.0001");
    }

    #[test]
    fn extremes_are_scientific() {
        assert_eq!(sig6(0.000012345678), "1.23457e-5");
        assert_eq!(sig6(1.0e6), "1e6");
        assert_eq!(sig6(-2.5e-9), "-2.5e-9");
    }

    #[test]
    fn zero_and_rounding_carry() {
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(999999.5), "1e6");
        assert_eq!(sig6(0.99999996), "1");
    }

    #[test]
    fn round_trip_to_f64() {
        assert_eq!(round_sig6(0.98943217), 0.989432);
        assert_eq!(round_sig6(0.5), 0.5);
    }
}
