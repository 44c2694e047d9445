//! Inclusive arithmetic grids for parameter scans.

/// Points `min + i * step` for `i = 0..=floor((max - min)/step)`, endpoint
/// included when the range is an exact multiple of the step (roundoff-safe).
/// Values within 1e-12 of zero are snapped to exactly 0.0 so that scans over
/// symmetric ranges hit the undisordered point bit-exactly.
pub fn linspace_inclusive(min: f64, max: f64, step: f64) -> Vec<f64> {
    debug_assert!(step > 0.0 && max >= min);
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    (0..count)
        .map(|i| {
            let v = min + i as f64 * step;
            if v.abs() < 1e-12 {
                0.0
            } else {
                v
            }
        })
        .collect()
}
