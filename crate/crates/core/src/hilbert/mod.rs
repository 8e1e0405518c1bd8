//! Closed-form Hilbert transforms.
//!
//! For `F = ∪ (a_k, b_k)` the transform of the indicator is
//! `H1_F(x) = (1/π) Σ ln|(x - a_k)/(x - b_k)|`, with `-∞` at each `a_k` and
//! `+∞` at each `b_k`. Truncated transforms remove the window `(x-ε, x+ε)` from
//! the set and reuse the same formula. Piecewise-linear inputs are handled by
//! an exact antiderivative per linear piece (see [`plf`]).

pub mod plf;
pub mod quadrature;

use std::f64::consts::{FRAC_1_PI, PI};

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::sets::FiniteOpenSet;

pub use plf::{hilbert_piecewise_linear, PiecewiseLinearFunction};

/// Oracle tolerance: absolute error of the adaptive quadrature.
pub const ORACLE_TOL: f64 = 1e-9;

/// `ln|(x - a)/(x - b)|` for `a < b`, evaluated without cancellation.
///
/// Outside `[a, b]` the ratio is written as `1 + u` with `u` the relative
/// length, so values near the zero set keep full relative accuracy.
#[inline]
pub fn log_ratio(x: f64, a: f64, b: f64) -> f64 {
    let len = b - a;
    if x < a {
        -(len / (a - x)).ln_1p()
    } else if x > b {
        (len / (x - b)).ln_1p()
    } else if x == a {
        f64::NEG_INFINITY
    } else if x == b {
        f64::INFINITY
    } else {
        let (u, v) = (x - a, b - x);
        ((u - v) / v).ln_1p()
    }
}

/// A point together with its membership in the exceptional endpoint set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EvaluationPoint {
    pub x: f64,
    /// `x` is an endpoint of the evaluated set; the transform is infinite there.
    pub excluded: bool,
}

impl EvaluationPoint {
    pub fn new(set: &FiniteOpenSet, x: f64) -> Self {
        Self {
            x,
            excluded: set.is_endpoint(x),
        }
    }
}

/// `H1_F(x)` as an extended real: `-∞` at left endpoints, `+∞` at right
/// endpoints, finite elsewhere (including inside `F`).
pub fn hilbert_indicator(set: &FiniteOpenSet, x: f64) -> f64 {
    bare_hilbert_indicator(set, x) * FRAC_1_PI
}

/// `Σ ln|(x - a_k)/(x - b_k)|`, i.e. `π · H1_F(x)`.
pub fn bare_hilbert_indicator(set: &FiniteOpenSet, x: f64) -> f64 {
    if x.is_infinite() {
        return 0.0;
    }
    set.iter().map(|iv| log_ratio(x, iv.a(), iv.b())).sum()
}

fn check_window(x: f64, eps: f64) -> Result<(f64, f64)> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(invalid("epsilon", format!("must be positive, got {eps}")));
    }
    let (lo, hi) = (x - eps, x + eps);
    if lo == x || hi == x {
        return Err(invalid(
            "epsilon",
            format!("{eps:e} is below the float resolution at x = {x}"),
        ));
    }
    Ok((lo, hi))
}

/// `H_ε 1_F(x) = (1/π) ∫_{F, |t-x|>ε} dt/(x-t)`; always finite.
pub fn truncated_hilbert_indicator(set: &FiniteOpenSet, x: f64, eps: f64) -> Result<f64> {
    let (lo, hi) = check_window(x, eps)?;
    Ok(hilbert_indicator(&set.remove_window(lo, hi), x))
}

/// `(1/π) ∫_{F, |t-x|>ε} dt/|x-t|`, the absolute tail integral.
pub fn truncated_abs_kernel_integral(set: &FiniteOpenSet, x: f64, eps: f64) -> Result<f64> {
    let (lo, hi) = check_window(x, eps)?;
    let rest = set.remove_window(lo, hi);
    Ok(rest
        .iter()
        .map(|iv| log_ratio(x, iv.a(), iv.b()).abs())
        .sum::<f64>()
        * FRAC_1_PI)
}

/// Candidate truncation radii used when none are supplied: distances from `x`
/// to every endpoint, dilated by `1 ∓ 1e-6`, plus a 64-point logarithmic grid
/// over `[1e-9·diam, diam]`, `diam` the distance to the farthest endpoint.
pub fn default_candidates(set: &FiniteOpenSet, x: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let mut diam = 0.0f64;
    for p in set.endpoints() {
        let d = (x - p).abs();
        diam = diam.max(d);
        if d > 0.0 {
            out.extend([d * (1.0 - 1e-6), d, d * (1.0 + 1e-6)]);
        }
    }
    if diam > 0.0 {
        let lo = (1e-9 * diam).ln();
        let hi = diam.ln();
        out.extend((0..64).map(|i| (lo + (hi - lo) * i as f64 / 63.0).exp()));
    }
    out.retain(|&e| check_window(x, e).is_ok());
    out
}

/// `max_ε |H_ε 1_F(x)|` over the candidate radii: a certified lower bound for
/// the maximal transform `H*1_F(x)`.
pub fn maximal_hilbert_indicator(set: &FiniteOpenSet, x: f64, candidates: &[f64]) -> Result<f64> {
    if candidates.is_empty() {
        return Err(invalid("candidates", "at least one radius is required"));
    }
    candidates.iter().try_fold(0.0f64, |best, &eps| {
        Ok(best.max(truncated_hilbert_indicator(set, x, eps)?.abs()))
    })
}

/// Quadrature value of `(1/π) ∫_{F, |t-x|>ε} dt/(x-t)` to [`ORACLE_TOL`].
pub fn quadrature_oracle_indicator(set: &FiniteOpenSet, x: f64, eps: f64) -> Result<f64> {
    let (lo, hi) = check_window(x, eps)?;
    let rest = set.remove_window(lo, hi);
    if rest.is_empty() {
        return Ok(0.0);
    }
    let tol = ORACLE_TOL * PI / rest.len() as f64;
    let mut total = 0.0;
    for iv in rest.iter() {
        total += quadrature::integrate(
            |t| 1.0 / (x - t),
            iv.a(),
            iv.b(),
            tol,
            quadrature::DEFAULT_BUDGET,
        )?;
    }
    Ok(total * FRAC_1_PI)
}

/// Quadrature value of `H_ε f(x)` for a piecewise-linear `f`, to [`ORACLE_TOL`].
pub fn quadrature_oracle_plf(f: &PiecewiseLinearFunction, x: f64, eps: f64) -> Result<f64> {
    let (lo, hi) = check_window(x, eps)?;
    let pieces: Vec<(f64, f64)> = f
        .pieces()
        .flat_map(|(p, q, _, _)| {
            let mut v = Vec::with_capacity(2);
            if p < lo {
                v.push((p, q.min(lo)));
            }
            if q > hi {
                v.push((p.max(hi), q));
            }
            v
        })
        .filter(|(p, q)| p < q)
        .collect();
    if pieces.is_empty() {
        return Ok(0.0);
    }
    let tol = ORACLE_TOL * PI / pieces.len() as f64;
    let mut total = 0.0;
    for (p, q) in pieces {
        total += quadrature::integrate(
            |t| f.eval(t) / (x - t),
            p,
            q,
            tol,
            quadrature::DEFAULT_BUDGET,
        )?;
    }
    Ok(total * FRAC_1_PI)
}

/// Maps a quadrature failure onto the oracle's error surface.
pub fn is_oracle_failure(e: &Error) -> bool {
    matches!(e, Error::QuadratureBudget { .. })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::LN_2;

    fn set(p: &[(f64, f64)]) -> FiniteOpenSet {
        FiniteOpenSet::from_pairs(p).unwrap()
    }

    #[test]
    fn midpoint_of_unit_interval_is_zero() {
        assert_eq!(hilbert_indicator(&set(&[(0.0, 1.0)]), 0.5), 0.0);
    }

    #[test]
    fn outside_value_matches_quadrature() {
        let f = set(&[(-1.0, 1.0)]);
        let closed = hilbert_indicator(&f, 3.0);
        assert!((closed - LN_2 / PI).abs() < 1e-15);
        // ∫_{-1}^{1} dt/(3-t) by adaptive quadrature
        let q = quadrature::integrate(|t| 1.0 / (3.0 - t), -1.0, 1.0, 1e-13, 100).unwrap() / PI;
        assert!((q - 0.220_635_600_152_652_1).abs() < 1e-12);
        assert!((closed - q).abs() < 1e-12);
    }

    #[test]
    fn limits_at_infinity_and_endpoints() {
        let f = set(&[(0.0, 1.0)]);
        assert_eq!(hilbert_indicator(&f, f64::INFINITY), 0.0);
        assert_eq!(hilbert_indicator(&f, f64::NEG_INFINITY), 0.0);
        assert!(hilbert_indicator(&f, 1e12).abs() < 1e-12);
        assert_eq!(hilbert_indicator(&f, 0.0), f64::NEG_INFINITY);
        assert_eq!(hilbert_indicator(&f, 1.0), f64::INFINITY);
        assert!(EvaluationPoint::new(&f, 1.0).excluded);
        assert!(!EvaluationPoint::new(&f, 0.5).excluded);
    }

    #[test]
    fn truncation_examples() {
        let f = set(&[(0.0, 1.0)]);
        assert_eq!(truncated_hilbert_indicator(&f, 0.5, 0.5).unwrap(), 0.0);
        let v = truncated_hilbert_indicator(&f, 0.0, 0.5).unwrap();
        assert!((v + LN_2 / PI).abs() < 1e-15);
        let q = quadrature_oracle_indicator(&f, 0.0, 0.5).unwrap();
        assert!((v - q).abs() < 1e-9);
        assert_eq!(
            truncated_hilbert_indicator(&f, 2.0, 0.5).unwrap(),
            hilbert_indicator(&f, 2.0)
        );
        assert!(truncated_hilbert_indicator(&f, 0.0, 0.0).is_err());
        assert!(truncated_hilbert_indicator(&f, 1e20, 1.0).is_err());
    }

    #[test]
    fn oracle_examples() {
        let f = set(&[(-1.0, 1.0)]);
        let closed = truncated_hilbert_indicator(&f, 3.0, 0.1).unwrap();
        let q = quadrature_oracle_indicator(&f, 3.0, 0.1).unwrap();
        assert!((closed - q).abs() < 1e-8);
        let q = quadrature_oracle_indicator(&set(&[(0.0, 1.0)]), 0.5, 0.5).unwrap();
        assert!(q.abs() <= 1e-9);
    }

    #[test]
    fn maximal_lower_bound() {
        let f = set(&[(0.0, 1.0)]);
        let cands = default_candidates(&f, 0.5);
        let m = maximal_hilbert_indicator(&f, 0.5, &cands).unwrap();
        let probe = truncated_hilbert_indicator(&f, 0.5, 0.49).unwrap().abs();
        // symmetric window about the midpoint: every truncation vanishes
        assert!(probe < 1e-15 && m >= probe);
        let cands = default_candidates(&f, 0.3);
        let m = maximal_hilbert_indicator(&f, 0.3, &cands).unwrap();
        let probe = truncated_hilbert_indicator(&f, 0.3, 0.29).unwrap().abs();
        assert!(probe > 0.0 && m >= probe);

        // window missing F: constant in ε
        for eps in [0.1, 0.5, 0.9] {
            let v = maximal_hilbert_indicator(&f, 2.0, &[eps]).unwrap();
            assert!((v - LN_2 / PI).abs() < 1e-15);
        }

        // more candidates never decrease the bound
        let few = maximal_hilbert_indicator(&f, 0.3, &cands[..5]).unwrap();
        let all = maximal_hilbert_indicator(&f, 0.3, &cands).unwrap();
        assert!(all >= few);

        assert!(maximal_hilbert_indicator(&f, 0.3, &[]).is_err());
        assert!(maximal_hilbert_indicator(&f, 0.3, &[-1.0]).is_err());
    }

    #[test]
    fn tail_integral_bounds_truncated_transform() {
        let f = set(&[(0.0, 1.0), (2.0, 2.5)]);
        for (x, e) in [(1.5, 0.1), (0.2, 0.05), (-3.0, 1.0)] {
            let t = truncated_abs_kernel_integral(&f, x, e).unwrap();
            let h = truncated_hilbert_indicator(&f, x, e).unwrap();
            assert!(t >= h.abs());
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn sets() -> impl Strategy<Value = FiniteOpenSet> {
            prop::collection::vec((-40.0f64..40.0, 0.05f64..3.0), 1..6).prop_map(|v| {
                FiniteOpenSet::from_pairs(
                    &v.into_iter().map(|(a, l)| (a, a + l)).collect::<Vec<_>>(),
                )
                .unwrap()
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(1000))]
            #[test]
            fn closed_form_matches_oracle(
                v in prop::collection::vec((-20.0f64..20.0, 0.01f64..4.0), 1..9),
                x in -30.0f64..30.0,
                eps in 1e-3f64..5.0,
            ) {
                let f = FiniteOpenSet::from_pairs(
                    &v.into_iter().map(|(a, l)| (a, a + l)).collect::<Vec<_>>(),
                ).unwrap();
                let closed = truncated_hilbert_indicator(&f, x, eps).unwrap();
                let q = quadrature_oracle_indicator(&f, x, eps).unwrap();
                prop_assert!((closed - q).abs() <= 1e-7, "{closed} vs {q}");
            }
        }

        proptest! {
            #[test]
            fn increasing_inside_decreasing_in_gaps(f in sets(), n in 3usize..12) {
                let ivs = f.intervals();
                for iv in ivs {
                    let xs: Vec<f64> = iv.interior_samples(n).collect();
                    for w in xs.windows(2) {
                        prop_assert!(hilbert_indicator(&f, w[0]) < hilbert_indicator(&f, w[1]));
                    }
                }
                for w in ivs.windows(2) {
                    let gap = crate::sets::Interval::new(w[0].b(), w[1].a()).unwrap();
                    let xs: Vec<f64> = gap.interior_samples(n).collect();
                    for p in xs.windows(2) {
                        prop_assert!(hilbert_indicator(&f, p[0]) > hilbert_indicator(&f, p[1]));
                    }
                }
            }

            #[test]
            fn dilation_translation_covariance(f in sets(), s in 0.1f64..10.0, c in -5.0f64..5.0, x in -50.0f64..50.0) {
                prop_assume!(!f.is_endpoint(x));
                let g = f.affine(s, c).unwrap();
                let lhs = hilbert_indicator(&g, s * x + c);
                let rhs = hilbert_indicator(&f, x);
                prop_assume!(rhs.abs() < 1e3);
                prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs.abs()) + 1e-10 * f.len() as f64 * (1.0 + (s * x + c).abs()) * 1e-2);
            }

            #[test]
            fn additivity(f in sets(), x in -50.0f64..50.0) {
                prop_assume!(f.len() >= 2 && !f.is_endpoint(x));
                let (head, tail) = f.intervals().split_at(1);
                let p = FiniteOpenSet::from_canonical(head.to_vec()).unwrap();
                let q = FiniteOpenSet::from_canonical(tail.to_vec()).unwrap();
                let sum = hilbert_indicator(&p, x) + hilbert_indicator(&q, x);
                prop_assert!((hilbert_indicator(&f, x) - sum).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn endpoint_limits_are_monotone() {
        let f = set(&[(0.0, 1.0), (2.0, 3.0)]);
        for &a in &[0.0, 2.0] {
            let mut prev_left = f64::INFINITY;
            let mut prev_right = f64::INFINITY;
            for j in 2..12 {
                let d = 10f64.powi(-j);
                let left = hilbert_indicator(&f, a - d);
                let right = hilbert_indicator(&f, a + d);
                assert!(left < prev_left && right < prev_right);
                prev_left = left;
                prev_right = right;
            }
            assert!(prev_left < -3.0);
        }
        for j in 1..8 {
            let far = 10f64.powi(j);
            assert!(hilbert_indicator(&f, far).abs() < 2.0 / (PI * (far - 3.0)));
        }
    }
}
