//! A continuous function whose truncated transforms at 0 tend to `-∞`.

use std::f64::consts::{FRAC_1_PI, LN_2};

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::hilbert::PiecewiseLinearFunction;

/// Number of dyadic nodes kept left of 0.
pub const DEFAULT_PHI_TRUNCATION: u32 = 40;

/// `φ = 1 - x` on `[0, 1]`, `φ(-2^{-k}) = 1 - 1/(k+1)` for `k = 0..=K`,
/// linear in between and from `-2^{-K}` to `(0, 1)`.
pub fn lemma4_phi(truncation: u32) -> Result<PiecewiseLinearFunction> {
    if truncation < 2 {
        return Err(invalid(
            "truncation",
            format!("must be at least 2, got {truncation}"),
        ));
    }
    if truncation > 1000 {
        return Err(invalid("truncation", "exceeds the dyadic range of f64"));
    }
    let mut nodes = Vec::with_capacity(truncation as usize + 3);
    let mut values = Vec::with_capacity(truncation as usize + 3);
    for k in 0..=truncation {
        nodes.push(-0.5f64.powi(k as i32));
        values.push(1.0 - 1.0 / (k as f64 + 1.0));
    }
    nodes.extend([0.0, 1.0]);
    values.extend([1.0, 0.0]);
    PiecewiseLinearFunction::new(nodes, values)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma4Row {
    pub n: u32,
    pub epsilon: f64,
    /// `∫_{|t|>ε} φ(t)/(0 - t) dt`, i.e. `π H_ε φ(0)`.
    pub value: f64,
    /// `H_ε φ(0)` with the `1/π` factor.
    pub normalized_value: f64,
    /// `-ln 2 Σ_{k=1}^n 1/(k+1) + 1 - 2^{-n}`.
    pub bound: f64,
    pub holds: bool,
    /// Bound on the change caused by truncating the node sequence; zero while
    /// the window covers the truncated stretch `(-2^{-K}, 0)`.
    pub truncation_error: f64,
}

/// Truncated transforms of `φ` at 0 for `ε = 2^{-n}`, `n = 1..=n_max`.
pub fn lemma4_divergence_check(truncation: u32, n_max: u32) -> Result<Vec<Lemma4Row>> {
    if n_max == 0 || n_max >= truncation {
        return Err(invalid(
            "n_max",
            format!("must lie in 1..{truncation}, got {n_max}"),
        ));
    }
    let phi = lemma4_phi(truncation)?;
    let tail = 0.5f64.powi(truncation as i32);
    let mut harmonic = 0.0;
    (1..=n_max)
        .map(|n| {
            harmonic += 1.0 / (n as f64 + 1.0);
            let eps = 0.5f64.powi(n as i32);
            let value = phi.bare_hilbert(0.0, eps)?;
            let bound = -LN_2 * harmonic + 1.0 - eps;
            Ok(Lemma4Row {
                n,
                epsilon: eps,
                value,
                normalized_value: value * FRAC_1_PI,
                bound,
                holds: value <= bound,
                truncation_error: if eps >= tail { 0.0 } else { tail / eps },
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_shape() {
        let phi = lemma4_phi(DEFAULT_PHI_TRUNCATION).unwrap();
        assert_eq!(phi.eval(-1.0), 0.0);
        assert_eq!(phi.eval(0.0), 1.0);
        assert_eq!(phi.eval(1.0), 0.0);
        assert_eq!(phi.support(), (-1.0, 1.0));
        assert!(phi.is_continuous());
        assert_eq!(phi.eval(-0.5), 0.5);
        assert!((phi.eval(-0.75) - 0.25).abs() < 1e-15);
        // node values approach φ(0) = 1
        let v: Vec<f64> = phi.values()[..=40].to_vec();
        assert!(v.windows(2).all(|w| w[1] > w[0]));
        assert!(1.0 - v[40] < 0.025);
        assert!(lemma4_phi(1).is_err());
    }

    #[test]
    fn first_window_is_zero() {
        let rows = lemma4_divergence_check(40, 12).unwrap();
        assert!(rows[0].value.abs() < 1e-15);
        assert!((rows[0].bound - (0.5 - 0.5 * LN_2)).abs() < 1e-15);
        assert!((rows[0].bound - 0.1534).abs() < 1e-4);
    }

    #[test]
    fn bound_and_trend() {
        let rows = lemma4_divergence_check(40, 12).unwrap();
        assert!(rows.iter().all(|r| r.holds), "{rows:?}");
        assert!(rows.windows(2).skip(1).all(|w| w[1].value < w[0].value));
        assert!(rows[11].value < -0.5);
        assert!(rows.iter().all(|r| r.truncation_error == 0.0));
        let h11: f64 = (2..=11).map(|k| 1.0 / k as f64).sum();
        assert!((rows[9].bound - (-LN_2 * h11 + 1.0 - 2f64.powi(-10))).abs() < 1e-14);
    }

    #[test]
    fn truncated_phi_example() {
        let phi = lemma4_phi(20).unwrap();
        let v = phi.bare_hilbert(0.0, 2f64.powi(-10)).unwrap();
        let h: f64 = (1..=10).map(|k| 1.0 / (k as f64 + 1.0)).sum();
        assert!(v <= -LN_2 * h + 1.0);
    }

    #[test]
    fn transform_away_from_zero_is_finite() {
        let phi = lemma4_phi(40).unwrap();
        for x in [-0.3, 0.2, 1.5, -2.0] {
            assert!(phi.hilbert(x, 0.0).unwrap().is_finite());
        }
    }
}
