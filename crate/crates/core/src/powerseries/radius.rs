//! Radius of convergence from finitely many coefficients.
//!
//! `R = liminf |b_n|^{-1/n}`. At finite `N` the primary estimate is the
//! smallest `|b_n|^{-1/(n−1)}` over the top window of indices; the exponent
//! `n − 1` makes the estimate exactly covariant under `h(Z) ↦ s⁻¹h(sZ)`,
//! which multiplies `b_n` by `s^{n−1}`. A least-squares slope of `log|b_n|`
//! over the same window gives a second estimate, and the relative gap
//! between the two is reported as the uncertainty.

use serde::Serialize;

use super::linearize::LinearizationResult;
use crate::{Error, Result};

/// Minimum number of valid coefficients for an estimate.
pub const MIN_COEFFICIENTS: usize = 64;

/// Default window: top half of the indices.
pub const DEFAULT_WINDOW: f64 = 0.5;

/// An estimate is declared infinite when the window estimate at `N` exceeds
/// the one at `N/2` by more than this factor (entire series such as `1/n!`
/// grow their estimate linearly in `N`).
pub const GROWTH_FACTOR_INFINITE: f64 = 1.5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadiusMethod {
    HadamardWindowMax,
    SlopeFit,
    Capacity,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadiusEstimate {
    /// Point estimate (`+∞` when `infinite`).
    pub value: f64,
    /// `log value`, finite even when `value` would overflow.
    pub log_value: f64,
    pub infinite: bool,
    /// Relative discrepancy between the two estimators.
    pub uncertainty: f64,
    pub method: RadiusMethod,
    /// Inclusive index range used.
    pub window: (usize, usize),
    /// `log` of the slope-fit estimate.
    pub log_slope_value: f64,
}

impl RadiusEstimate {
    fn infinite(window: (usize, usize)) -> Self {
        RadiusEstimate {
            value: f64::INFINITY,
            log_value: f64::INFINITY,
            infinite: true,
            uncertainty: 0.0,
            method: RadiusMethod::HadamardWindowMax,
            window,
            log_slope_value: f64::INFINITY,
        }
    }

    /// Uncertainty of `log value`.
    pub fn log_uncertainty(&self) -> f64 {
        (1.0 + self.uncertainty).ln()
    }
}

/// `min_{n∈[lo,hi]} −log|b_n|/(n−1)` over nonzero coefficients.
fn window_min(l: &LinearizationResult, lo: usize, hi: usize) -> Option<f64> {
    (lo..=hi)
        .filter(|&n| !l.b[n].is_zero())
        .map(|n| -l.b[n].ln_abs() / (n - 1) as f64)
        .min_by(f64::total_cmp)
}

fn window_bounds(valid: usize, window: f64) -> (usize, usize) {
    let lo = ((valid as f64) * (1.0 - window)).ceil() as usize;
    (lo.max(2), valid)
}

/// Radius estimate from the valid coefficients of `l`.
///
/// The series is declared entire when every window coefficient is zero, when
/// all window values `|b_n|^{1/(n−1)}` are below `2^{−bits/4}`, or when
/// the estimate more than [`GROWTH_FACTOR_INFINITE`]-folds between the
/// windows ending at `N/2` and at `N`.
pub fn hadamard_radius(l: &LinearizationResult, window: f64) -> Result<RadiusEstimate> {
    if l.valid < MIN_COEFFICIENTS {
        return Err(Error::TooFewCoefficients { have: l.valid, need: MIN_COEFFICIENTS });
    }
    if !(window > 0.0 && window <= 1.0) {
        return Err(Error::Precondition(format!("window fraction {window} outside (0, 1]")));
    }
    let (lo, hi) = window_bounds(l.valid, window);
    let Some(log_r) = window_min(l, lo, hi) else {
        return Ok(RadiusEstimate::infinite((lo, hi)));
    };
    let threshold = f64::from(l.bits) / 4.0 * std::f64::consts::LN_2;
    if log_r > threshold {
        return Ok(RadiusEstimate::infinite((lo, hi)));
    }
    let (hlo, hhi) = window_bounds(l.valid / 2, window);
    if hhi > hlo {
        if let Some(half) = window_min(l, hlo, hhi) {
            if log_r - half > GROWTH_FACTOR_INFINITE.ln() {
                return Ok(RadiusEstimate::infinite((lo, hi)));
            }
        }
    }
    let log_slope = slope_log_radius(l, lo, hi).unwrap_or(log_r);
    Ok(RadiusEstimate {
        value: log_r.exp(),
        log_value: log_r,
        infinite: false,
        uncertainty: (log_r - log_slope).exp_m1().abs(),
        method: RadiusMethod::HadamardWindowMax,
        window: (lo, hi),
        log_slope_value: log_slope,
    })
}

/// `−slope` of the least-squares line through `(n − 1, log|b_n|)`.
fn slope_log_radius(l: &LinearizationResult, lo: usize, hi: usize) -> Option<f64> {
    let pts: Vec<(f64, f64)> =
        (lo..=hi).filter(|&n| !l.b[n].is_zero()).map(|n| ((n - 1) as f64, l.b[n].ln_abs())).collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(-sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::powerseries::ExtComplex;

    fn synthetic(n: usize, f: impl FnMut(usize) -> ExtComplex) -> LinearizationResult {
        let mut b = vec![ExtComplex::ZERO];
        b.extend((1..=n).map(f));
        LinearizationResult { b, divisors: vec![0.0; n + 1], flags: vec![false; n + 1], valid: n, bits: 53 }
    }

    #[test]
    fn geometric_series() {
        let l = synthetic(256, |_| ExtComplex::ONE);
        let r = hadamard_radius(&l, 0.5).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.uncertainty, 0.0);
        let l = synthetic(256, |n| ExtComplex::ONE.scale_pow2(n as i64 - 1));
        let r = hadamard_radius(&l, 0.5).unwrap();
        assert!((r.value - 0.5).abs() < 1e-14);
        assert!(r.uncertainty < 1e-12);
    }

    #[test]
    fn entire_series_is_flagged() {
        let mut lf = 0.0;
        let l = synthetic(80, |n| {
            if n > 1 {
                lf += (n as f64).ln();
            }
            let e = (-lf / std::f64::consts::LN_2).floor();
            ExtComplex::new((-lf - e * std::f64::consts::LN_2).exp(), 0.0, e as i64)
        });
        assert!(hadamard_radius(&l, 0.5).unwrap().infinite);
        let zeros = synthetic(80, |n| if n == 1 { ExtComplex::ONE } else { ExtComplex::ZERO });
        assert!(hadamard_radius(&zeros, 0.5).unwrap().infinite);
    }

    #[test]
    fn too_few_coefficients() {
        let l = synthetic(40, |_| ExtComplex::ONE);
        assert_eq!(hadamard_radius(&l, 0.5).unwrap_err(), Error::TooFewCoefficients { have: 40, need: 64 });
    }
}
