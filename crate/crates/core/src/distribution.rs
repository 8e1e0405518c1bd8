//! The distribution function of `H1_E` for finite-open `E`.
//!
//! `H1_E` is monotone on each component of `E`, on each gap and on the two
//! unbounded rays, so `{|H1_E| > λ}` is cut out by one or two roots per piece.
//! Its measure is compared with the Stein–Weiss value `2|E|/sinh(πλ)`.
//! Everything here uses the `1/π`-normalized transform.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::hilbert::bare_hilbert_indicator;
use crate::roots::{solve_decreasing, solve_increasing};
use crate::sets::{FiniteOpenSet, Interval};

/// Relative tolerance for the identity.
pub const STEIN_WEISS_TOL: f64 = 1e-6;

/// `4 e^{πλ}|E| / (e^{2πλ} - 1) = 2|E| / sinh(πλ)`.
pub fn stein_weiss_rhs(measure: f64, lambda: f64) -> Result<f64> {
    if !(measure > 0.0) || !measure.is_finite() {
        return Err(invalid(
            "measure",
            format!("must be positive, got {measure}"),
        ));
    }
    if !(lambda > 0.0) || lambda.is_nan() {
        return Err(invalid("lambda", format!("must be positive, got {lambda}")));
    }
    Ok(2.0 * measure / (PI * lambda).sinh())
}

fn check_level(e: &FiniteOpenSet, lambda: f64) -> Result<f64> {
    e.require_nonempty()?;
    if !(lambda > 0.0) || !lambda.is_finite() {
        return Err(invalid(
            "lambda",
            format!("must be positive and finite, got {lambda}"),
        ));
    }
    Ok(PI * lambda)
}

/// Point on the left ray with `|H1_E| < λ`, i.e. a bracket end for the ray.
fn ray_distance(e: &FiniteOpenSet, t: f64) -> f64 {
    // |π H1_E(x)| ≤ |E| / dist(x, E) on either ray
    2.0 * e.measure() / t + e.intervals()[0].len().min(1.0)
}

/// The pieces of `{|H1_E| > λ}` as `(start, end)`, one or two per piece of
/// monotonicity, in increasing order.
fn superlevel_pieces(e: &FiniteOpenSet, lambda: f64) -> Result<Vec<(f64, f64)>> {
    let t = check_level(e, lambda)?;
    let h = |x: f64| bare_hilbert_indicator(e, x);
    let ivs = e.intervals();
    let n = ivs.len();

    let mut d = ray_distance(e, t);
    let left = loop {
        let x = ivs[0].a() - d;
        if !x.is_finite() {
            return Err(Error::Bracket {
                lo: x,
                hi: ivs[0].a(),
            });
        }
        if h(x) > -t {
            break x;
        }
        d *= 2.0;
    };
    let mut d = ray_distance(e, t);
    let right = loop {
        let x = ivs[n - 1].b() + d;
        if !x.is_finite() {
            return Err(Error::Bracket {
                lo: ivs[n - 1].b(),
                hi: x,
            });
        }
        if h(x) < t {
            break x;
        }
        d *= 2.0;
    };

    let per_component: Vec<Vec<(f64, f64)>> = (0..n)
        .into_par_iter()
        .map(|k| -> Result<Vec<(f64, f64)>> {
            let (a, b) = (ivs[k].a(), ivs[k].b());
            let mut out = Vec::with_capacity(4);
            // gap (or ray) to the left of a: H < -λ near a
            let lo = if k == 0 { left } else { ivs[k - 1].b() };
            out.push((solve_decreasing(h, -t, lo, a)?, a));
            // inside the component: -∞ → +∞
            out.push((a, solve_increasing(h, -t, a, b)?));
            out.push((solve_increasing(h, t, a, b)?, b));
            // gap (or ray) to the right of b: H > λ near b
            let hi = if k + 1 == n { right } else { ivs[k + 1].a() };
            out.push((b, solve_decreasing(h, t, b, hi)?));
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(per_component.into_iter().flatten().collect())
}

/// `{x : |H1_E(x)| > λ}` as a finite-open set (endpoints of `E` removed).
pub fn superlevel_abs_set(e: &FiniteOpenSet, lambda: f64) -> Result<FiniteOpenSet> {
    let pieces = superlevel_pieces(e, lambda)?;
    Ok(FiniteOpenSet::normalize(
        pieces
            .into_iter()
            .filter_map(|(s, t)| Interval::new(s, t).ok()),
    ))
}

/// `|{x : |H1_E(x)| > λ}|`, each piece measured from the endpoint of `E` it
/// is attached to.
pub fn level_set_measure(e: &FiniteOpenSet, lambda: f64) -> Result<f64> {
    Ok(superlevel_pieces(e, lambda)?
        .into_iter()
        .map(|(s, t)| (t - s).max(0.0))
        .sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionReport {
    pub lambda_grid: Vec<f64>,
    pub exact_measures: Vec<f64>,
    pub stein_weiss_values: Vec<f64>,
    pub relative_errors: Vec<f64>,
    pub max_relative_error: f64,
    pub pass: bool,
}

pub fn verify_stein_weiss(e: &FiniteOpenSet, lambda_grid: &[f64]) -> Result<DistributionReport> {
    if lambda_grid.is_empty() {
        return Err(invalid("lambdas", "grid must be nonempty"));
    }
    let rows: Vec<(f64, f64)> = lambda_grid
        .par_iter()
        .map(|&l| Ok((level_set_measure(e, l)?, stein_weiss_rhs(e.measure(), l)?)))
        .collect::<Result<_>>()?;
    let relative_errors: Vec<f64> = rows.iter().map(|(m, r)| (m - r).abs() / r).collect();
    let max_relative_error = relative_errors.iter().copied().fold(0.0, f64::max);
    Ok(DistributionReport {
        lambda_grid: lambda_grid.to_vec(),
        exact_measures: rows.iter().map(|r| r.0).collect(),
        stein_weiss_values: rows.iter().map(|r| r.1).collect(),
        relative_errors,
        max_relative_error,
        pass: max_relative_error <= STEIN_WEISS_TOL,
    })
}
