//! Exact inversion of sublevel sets of `H1_F` for finite-open `F`.
//!
//! Given `λ > 0` and `μ = (1/π) ln(1 - e^{-λ})`, the set
//! `E = {x ∉ F : H1_F(x) < μ}` is `∪ (c_k, a_k)` with one root `c_k` of
//! `H1_F = μ` in each gap left of a component, and `F` is recovered as the
//! superlevel set `{H1_E > λ}`. The roots are found by bisection on the
//! monotone closed form, so there is no polynomial root-finding involved.

use std::f64::consts::{FRAC_1_PI, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hilbert::{bare_hilbert_indicator, hilbert_indicator};
use crate::roots::{solve_decreasing, ulp};
use crate::sets::{FiniteOpenSet, Interval};

/// Largest accepted level `L` in `ln(1 - e^{-L})`; beyond it `e^{-L}` leaves
/// the normal range and `μ` collapses to zero.
pub const SATURATION_LEVEL: f64 = 700.0;

/// Reading of `H1_E(b_k) = λ`: with (`Pi`) or without (`Bare`) the `1/π`
/// factor in front of the log sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    Pi,
    #[default]
    Bare,
}

impl Normalization {
    /// The bare (log-sum) level corresponding to `λ`.
    pub fn bare_level(self, lambda: f64) -> f64 {
        match self {
            Self::Pi => PI * lambda,
            Self::Bare => lambda,
        }
    }

    /// `H1_E(x)` in this normalization.
    pub fn transform(self, set: &FiniteOpenSet, x: f64) -> f64 {
        match self {
            Self::Pi => hilbert_indicator(set, x),
            Self::Bare => bare_hilbert_indicator(set, x),
        }
    }
}

/// A level `λ > 0` paired with `μ < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LevelBound {
    pub lambda: f64,
    pub mu: f64,
    pub normalization: Normalization,
    /// `L = λ` or `πλ`: the level of the log sum.
    pub level: f64,
    /// `e^{πμ} = 1 - e^{-L}`.
    pub q: f64,
    /// `1 - e^{πμ} = e^{-L}`, kept separately to avoid cancellation.
    pub one_minus_q: f64,
}

fn ln_one_minus_exp_neg(l: f64) -> f64 {
    if l < std::f64::consts::LN_2 {
        (-(-l).exp_m1()).ln()
    } else {
        (-(-l).exp()).ln_1p()
    }
}

impl LevelBound {
    pub fn new(lambda: f64, normalization: Normalization) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(invalid(
                "lambda",
                format!("must be positive and finite, got {lambda}"),
            ));
        }
        let level = normalization.bare_level(lambda);
        if level > SATURATION_LEVEL {
            return Err(invalid(
                "lambda",
                format!("level {level} exceeds the saturation threshold {SATURATION_LEVEL}"),
            ));
        }
        let pi_mu = ln_one_minus_exp_neg(level);
        let mu = pi_mu * FRAC_1_PI;
        if !(mu < 0.0) || !mu.is_finite() {
            return Err(invalid(
                "lambda",
                format!("μ = {mu} is not a finite negative number"),
            ));
        }
        Ok(Self {
            lambda,
            mu,
            normalization,
            level,
            q: -(-level).exp_m1(),
            one_minus_q: (-level).exp(),
        })
    }

    /// `λ = -ln(1 - e^{πμ})` (divided by `π` in the `Pi` reading).
    pub fn from_mu(mu: f64, normalization: Normalization) -> Result<Self> {
        if !(mu < 0.0) || !mu.is_finite() {
            return Err(invalid(
                "mu",
                format!("must be negative and finite, got {mu}"),
            ));
        }
        Self::new(lambda_from_mu(mu, normalization), normalization)
    }

    /// `πμ`, the level of the log sum defining `E`.
    pub fn pi_mu(&self) -> f64 {
        PI * self.mu
    }
}

/// `μ = (1/π) ln(1 - e^{-λ})`.
pub fn mu_from_lambda(lambda: f64) -> Result<LevelBound> {
    LevelBound::new(lambda, Normalization::Bare)
}

/// Inverse of [`mu_from_lambda`]: `-ln(1 - e^{πμ})`, divided by `π` for `Pi`.
pub fn lambda_from_mu(mu: f64, normalization: Normalization) -> f64 {
    let level = -(-(PI * mu).exp_m1()).ln();
    match normalization {
        Normalization::Pi => level * FRAC_1_PI,
        Normalization::Bare => level,
    }
}

/// `F`, the roots `c_k` and `E = ∪ (c_k, a_k)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelSetConfig {
    pub bound: LevelBound,
    pub f: FiniteOpenSet,
    pub roots: Vec<f64>,
    pub e: FiniteOpenSet,
}

/// Left end of a bracket for the root in the unbounded gap `(-∞, a_1)`.
///
/// Each term of the log sum is at least `-len_k/(a_1 - x)` there, and
/// `ln(1 - e^{-L}) ≤ -e^{-L}`, so any `x` with `a_1 - x > |F| e^{L}` lies
/// strictly above the target; the shift by `|F| e^{L}/q + 1` guarantees it.
fn left_bracket(f: &FiniteOpenSet, bound: &LevelBound) -> Result<f64> {
    let a1 = f.min().ok_or(Error::EmptySet)?;
    let target = bound.pi_mu();
    let mut d = f.measure() / (bound.q * bound.one_minus_q) + 1.0;
    for _ in 0..2100 {
        let x = a1 - d;
        if !x.is_finite() {
            break;
        }
        if bare_hilbert_indicator(f, x) > target {
            return Ok(x);
        }
        d *= 2.0;
    }
    Err(Error::Bracket {
        lo: f64::NEG_INFINITY,
        hi: a1,
    })
}

/// The roots of `H1_F = μ`, one per gap left of each component.
pub fn sublevel_roots(f: &FiniteOpenSet, bound: &LevelBound) -> Result<Vec<f64>> {
    f.require_nonempty()?;
    let target = bound.pi_mu();
    let x_low = left_bracket(f, bound)?;
    let ivs = f.intervals();
    (0..ivs.len())
        .into_par_iter()
        .map(|k| {
            let lo = if k == 0 { x_low } else { ivs[k - 1].b() };
            let c = solve_decreasing(|x| bare_hilbert_indicator(f, x), target, lo, ivs[k].a())?;
            if !(lo < c && c < ivs[k].a()) {
                return Err(Error::Bracket { lo, hi: ivs[k].a() });
            }
            Ok(c)
        })
        .collect()
}

/// `E = {x ∉ F : H1_F(x) < μ}` together with its defining roots.
pub fn sublevel_set(f: &FiniteOpenSet, bound: LevelBound) -> Result<LevelSetConfig> {
    let roots = sublevel_roots(f, &bound)?;
    let e = FiniteOpenSet::from_canonical(
        roots
            .iter()
            .zip(f.iter())
            .map(|(&c, iv)| Interval::new(c, iv.a()))
            .collect::<Result<Vec<_>>>()?,
    )?;
    Ok(LevelSetConfig {
        bound,
        f: f.clone(),
        roots,
        e,
    })
}

/// The mirror image: `{x ∉ F : H1_F(x) > -μ} = ∪ (b_k, d_k)`, obtained by
/// solving the sublevel problem for `-F` and reflecting back.
pub fn superlevel_set_right(f: &FiniteOpenSet, bound: LevelBound) -> Result<FiniteOpenSet> {
    Ok(sublevel_set(&f.reflect(), bound)?.e.reflect())
}

impl LevelSetConfig {
    /// `c_k < a_k < b_k < c_{k+1}`.
    pub fn is_interlaced(&self) -> bool {
        let ivs = self.f.intervals();
        self.roots.len() == ivs.len()
            && self.roots.iter().enumerate().all(|(k, &c)| {
                c < ivs[k].a()
                    && ivs
                        .get(k + 1)
                        .map_or(true, |next| ivs[k].b() < next.a() && c < next.a())
                    && (k == 0 || ivs[k - 1].b() < c)
            })
    }

    /// `(e^L - 1)|F|`, the predicted measure of `E`.
    pub fn predicted_measure(&self) -> f64 {
        self.bound.level.exp_m1() * self.f.measure()
    }

    /// Relative defect of `|E| = (e^L - 1)|F|`.
    pub fn measure_defect(&self) -> f64 {
        let p = self.predicted_measure();
        (self.e.measure() - p).abs() / p
    }

    /// `max_k |H1_F(c_k) - μ|`, in the `π·H` scale.
    pub fn root_defect(&self) -> f64 {
        let t = self.bound.pi_mu();
        self.roots
            .iter()
            .map(|&c| (bare_hilbert_indicator(&self.f, c) - t).abs())
            .fold(0.0, f64::max)
    }
}

fn poly_from_roots(roots: &[f64]) -> Vec<f64> {
    // coefficients, lowest degree first
    let mut p = vec![1.0];
    for &r in roots {
        let mut next = vec![0.0; p.len() + 1];
        for (i, &c) in p.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= r * c;
        }
        p = next;
    }
    p
}

fn prod(s: f64, roots: &[f64]) -> f64 {
    roots.iter().map(|r| s - r).product()
}

/// Largest residual of `q Π(x - b_k) - Π(x - a_k) - (q - 1) Π(x - c_k)` over
/// `4n + 1` Chebyshev points of `[c_1 - 1, b_n + 1]`.
///
/// The identity is evaluated in the variable `s ∈ [-1, 1]` of the affine map
/// onto that interval and divided by the largest coefficient magnitude of the
/// three products, so the residual is scale-free.
pub fn verify_bezout(config: &LevelSetConfig) -> f64 {
    let ivs = config.f.intervals();
    let n = ivs.len();
    let lo = config.roots[0] - 1.0;
    let hi = ivs[n - 1].b() + 1.0;
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let map = |x: f64| (x - mid) / half;
    let a: Vec<f64> = ivs.iter().map(|iv| map(iv.a())).collect();
    let b: Vec<f64> = ivs.iter().map(|iv| map(iv.b())).collect();
    let c: Vec<f64> = config.roots.iter().map(|&x| map(x)).collect();
    let (q, qm1) = (config.bound.q, -config.bound.one_minus_q);
    let scale = [
        (poly_from_roots(&b), q),
        (poly_from_roots(&a), 1.0),
        (poly_from_roots(&c), qm1.abs()),
    ]
    .iter()
    .flat_map(|(p, w)| p.iter().map(move |v| (v * w).abs()))
    .fold(0.0, f64::max);
    let m = 4 * n + 1;
    (0..m)
        .map(|j| {
            let s = (PI * (j as f64 + 0.5) / m as f64).cos();
            (q * prod(s, &b) - prod(s, &a) - qm1 * prod(s, &c)).abs() / scale
        })
        .fold(0.0, f64::max)
}

/// `(Σ c_k, Σ b_k - |F| e^{L})`; the second is the value forced by equating
/// the subleading coefficients of the factorization.
pub fn sum_of_roots(config: &LevelSetConfig) -> (f64, f64) {
    let computed = config.roots.iter().sum();
    let sb: f64 = config.f.iter().map(|iv| iv.b()).sum();
    let formula = sb - config.f.measure() * config.bound.level.exp();
    (computed, formula)
}

/// Outcome of checking `F = {x ∉ E : H1_E(x) > λ}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundtripReport {
    pub pass: bool,
    /// `max_k |H1_E(b_k) - λ|`.
    pub endpoint_defect: f64,
    /// Largest change of `H1_E(b_k)` caused by rounding the endpoints of `E`
    /// and `b_k` to the nearest float; added to the endpoint tolerance.
    pub endpoint_resolution: f64,
    /// `min (H1_E(x) - λ)` over samples of `F`; positive when `F ⊂ {H1_E > λ}`.
    pub inside_margin: f64,
    /// `min (λ - H1_E(x))` over samples outside `E ∪ F`; positive when the
    /// superlevel set does not leak.
    pub outside_margin: f64,
    pub samples: usize,
}

/// Tolerance on `H1_E(b_k) = λ`.
pub const ROUNDTRIP_TOL: f64 = 1e-9;

/// Samples per interval for the set identity.
pub const SAMPLES_PER_INTERVAL: usize = 16;

pub fn verify_roundtrip(config: &LevelSetConfig) -> RoundtripReport {
    let norm = config.bound.normalization;
    let lambda = config.bound.lambda;
    let e = &config.e;
    let level = |x: f64| norm.transform(e, x);
    let endpoint_defect = config
        .f
        .iter()
        .map(|iv| (level(iv.b()) - lambda).abs())
        .fold(0.0, f64::max);
    let unit = match norm {
        Normalization::Pi => std::f64::consts::FRAC_1_PI,
        Normalization::Bare => 1.0,
    };
    let endpoint_resolution = config
        .f
        .iter()
        .map(|iv| {
            let b = iv.b();
            unit * e
                .endpoints()
                .map(|c| (ulp(c) + ulp(b)) / (b - c).abs())
                .sum::<f64>()
        })
        .fold(0.0, f64::max);

    let mut samples = 0;
    let mut inside_margin = f64::INFINITY;
    for iv in config.f.iter() {
        for x in iv
            .interior_samples(SAMPLES_PER_INTERVAL)
            .chain([iv.midpoint()])
        {
            inside_margin = inside_margin.min(level(x) - lambda);
            samples += 1;
        }
    }

    let ivs = config.f.intervals();
    let mut outside: Vec<f64> = Vec::new();
    for k in 0..ivs.len() {
        if let Some(&next) = config.roots.get(k + 1) {
            if let Ok(gap) = Interval::new(ivs[k].b(), next) {
                outside.extend(gap.interior_samples(SAMPLES_PER_INTERVAL));
            }
        }
    }
    let width = config.roots[0]
        .abs()
        .max(ivs[ivs.len() - 1].b().abs())
        .max(1.0);
    for j in 0..SAMPLES_PER_INTERVAL as i32 {
        let d = width * 2f64.powi(j - 4);
        outside.push(config.roots[0] - d);
        outside.push(ivs[ivs.len() - 1].b() + d);
    }
    let mut outside_margin = f64::INFINITY;
    for x in outside {
        outside_margin = outside_margin.min(lambda - level(x));
        samples += 1;
    }

    RoundtripReport {
        pass: endpoint_defect <= ROUNDTRIP_TOL * lambda.max(1.0) + 4.0 * endpoint_resolution
            && inside_margin > 0.0
            && outside_margin > 0.0,
        endpoint_defect,
        endpoint_resolution,
        inside_margin,
        outside_margin,
        samples,
    }
}

/// Level-set configurations along a sequence `F_n` converging to `F`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproximationReport {
    pub configs: Vec<LevelSetConfig>,
    pub f_measures: Vec<f64>,
    pub e_measures: Vec<f64>,
    /// `|E_n △ E_{n+1}|`.
    pub successive_e_differences: Vec<f64>,
    /// `|E_n △ E_last|`.
    pub e_differences_to_last: Vec<f64>,
}

pub fn approx_sublevel_for_open(
    sequence: &[FiniteOpenSet],
    bound: LevelBound,
) -> Result<ApproximationReport> {
    if sequence.is_empty() {
        return Err(invalid("sequence", "at least one set is required"));
    }
    let configs = sequence
        .iter()
        .map(|f| sublevel_set(f, bound))
        .collect::<Result<Vec<_>>>()?;
    let last = &configs[configs.len() - 1].e;
    Ok(ApproximationReport {
        f_measures: configs.iter().map(|c| c.f.measure()).collect(),
        e_measures: configs.iter().map(|c| c.e.measure()).collect(),
        successive_e_differences: configs
            .windows(2)
            .map(|w| w[0].e.symm_diff_measure(&w[1].e))
            .collect(),
        e_differences_to_last: configs
            .iter()
            .map(|c| c.e.symm_diff_measure(last))
            .collect(),
        configs,
    })
}
