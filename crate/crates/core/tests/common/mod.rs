//! Independent numeric oracles for integration tests.
//!
//! Deliberately written without touching the library's spectral evolution
//! path: the matrix exponential here is plain scaling-and-squaring with a
//! Taylor series, so agreement between the two routes is meaningful.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Dense matrix exponential via scaling-and-squaring + Taylor.
pub fn expm(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols());
    // 1-norm (max column abs sum) controls the series argument
    let norm = (0..n)
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0_f64, f64::max);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m / Complex64::new(2f64.powi(squarings as i32), 0.0);

    let mut result = DMatrix::<Complex64>::identity(n, n);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    for k in 1..=30u32 {
        term = (&term * &scaled) / Complex64::new(k as f64, 0.0);
        result += &term;
        let term_norm = term.iter().map(|z| z.norm()).fold(0.0_f64, f64::max);
        if term_norm < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// `exp(-i H tau)` for a real Hamiltonian matrix.
pub fn expm_hamiltonian(h: &DMatrix<f64>, tau: f64) -> DMatrix<Complex64> {
    expm(&h.map(|x| Complex64::new(0.0, -x * tau)))
}

#[allow(dead_code)]
pub fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0_f64, f64::max)
}
