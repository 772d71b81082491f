//! Closed-form dimension bounds and the analytic sums behind them.

use crate::error::{Error, Result};

/// Relative slack when testing a float `δ` against a validity endpoint.
const ENDPOINT_SLACK: f64 = 1e-12;

fn check_s(s: f64, lo: f64, hi: f64) -> Result<()> {
    if !(s > lo && s < hi) {
        return Err(Error::InvalidInput(format!(
            "s must lie in ({lo}, {hi}), got {s}"
        )));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput(format!(
            "δ must lie in (0, 1), got {delta}"
        )));
    }
    Ok(())
}

/// `16δ / ((2s - 3)(2 - s))`, the bound on the two-coordinate cover sum.
pub fn analytic_bound2(delta: f64, s: f64) -> Result<f64> {
    check_delta(delta)?;
    check_s(s, 1.5, 2.0)?;
    Ok(16.0 * delta / ((2.0 * s - 3.0) * (2.0 - s)))
}

/// Upper bound on `Σ_{a > m} Σ_{b <= 2aδ²} 8 / (a^s b^(s-1))` where
/// `m = max(a_max, floor(1/(2δ²)))`, by comparison with integrals.
pub fn tail_bound2(delta: f64, s: f64, a_max: u64) -> Result<f64> {
    check_delta(delta)?;
    check_s(s, 1.5, 2.0)?;
    let floor_a = (1.0 / (2.0 * delta * delta)).floor() as u64;
    let m = a_max.max(floor_a).max(1) as f64;
    let inner = 8.0 * (2.0 * delta * delta).powf(2.0 - s) / (2.0 - s);
    let outer = m.powf(3.0 - 2.0 * s) / (2.0 * s - 3.0);
    Ok(inner * outer * (1.0 + 1e-12))
}

/// Smaller root of `2s² - 7s + 6 + 16δ = 0`: `7/4 - sqrt(1/16 - 8δ)`, for `δ <= 2^-7`.
pub fn upper_dim2(delta: f64) -> Result<f64> {
    let end = 2f64.powi(-7);
    if !(delta > 0.0 && delta <= end * (1.0 + ENDPOINT_SLACK)) {
        return Err(Error::InvalidInput(format!(
            "δ must lie in (0, 2^-7], got {delta}"
        )));
    }
    let disc = (1.0 / 16.0 - 8.0 * delta).max(0.0);
    Ok(1.75 - disc.sqrt())
}

/// `(2n - 3) 8^(n-1) sqrt(δ)`
pub fn dim_n_coefficient(n: u32, delta: f64) -> f64 {
    (2.0 * n as f64 - 3.0) * 8f64.powi(n as i32 - 1) * delta.sqrt()
}

/// Largest admissible `δ` for `n` coordinates: `2^(-6n) (2n - 3)^(-2)`.
pub fn dim_n_validity(n: u32) -> f64 {
    2f64.powi(-6 * n as i32) / (2.0 * n as f64 - 3.0).powi(2)
}

/// `n - 1/2 + ε` with `ε` the smaller root of `2ε² - ε + K = 0`, `K` from [`dim_n_coefficient`].
pub fn upper_dim_n(n: u32, delta: f64) -> Result<f64> {
    if n < 3 {
        return Err(Error::InvalidInput(format!("need n >= 3, got {n}")));
    }
    let end = dim_n_validity(n);
    if !(delta > 0.0 && delta <= end * (1.0 + ENDPOINT_SLACK)) {
        return Err(Error::InvalidInput(format!(
            "δ must lie in (0, {end:e}] for n = {n}, got {delta}"
        )));
    }
    let k = dim_n_coefficient(n, delta);
    let disc = (1.0 - 8.0 * k).max(0.0);
    let eps = (1.0 - disc.sqrt()) / 4.0;
    Ok(n as f64 - 0.5 + eps)
}

/// `(2n - 3) 8^(n-1) sqrt(δ) / ((2s - 2n + 1)(n - s))`, the bound on the `n`-coordinate cover sum.
pub fn analytic_bound_n(n: u32, delta: f64, s: f64) -> Result<f64> {
    check_delta(delta)?;
    let nf = n as f64;
    check_s(s, nf - 0.5, nf)?;
    Ok(dim_n_coefficient(n, delta) / ((2.0 * s - 2.0 * nf + 1.0) * (nf - s)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_coordinates() {
        assert_eq!(upper_dim2(2f64.powi(-7)).unwrap(), 1.75);
        assert!((upper_dim2(1e-12).unwrap() - 1.5).abs() < 1e-10);
        assert!(upper_dim2(0.01).is_err());
        let s = upper_dim2(1e-4).unwrap();
        assert!((2.0 * s * s - 7.0 * s + 6.0 + 16e-4).abs() < 1e-12);
        assert!((analytic_bound2(1e-4, 1.75).unwrap() - 0.0128).abs() < 1e-15);
        assert!((analytic_bound2(1.0 / 16.0, 1.6).unwrap() - 12.5).abs() < 1e-12);
        assert_eq!(analytic_bound2(1.0 / 8.0, 1.75).unwrap(), 16.0);
    }

    #[test]
    fn n_coordinates() {
        let end = dim_n_validity(3);
        assert!((upper_dim_n(3, end).unwrap() - 2.75).abs() < 1e-12);
        assert!((upper_dim_n(3, 1e-30).unwrap() - 2.5).abs() < 1e-12);
        let s = upper_dim_n(4, 1e-10).unwrap();
        let eps = s - 3.5;
        let k = dim_n_coefficient(4, 1e-10);
        assert!((k - 0.0256).abs() < 1e-15);
        // ε = K + 2K² + O(K³)
        assert!(eps > k && eps - k < 3.0 * k * k);
        assert!((2.0 * eps * eps - eps + k).abs() < 1e-12);
        assert!(upper_dim_n(3, end * 1.01).is_err());
        assert!(upper_dim_n(2, 1e-9).is_err());
    }
}
