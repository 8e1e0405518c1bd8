//! The `verify-all` gate: every identity checked over a seeded corpus, one
//! summary line per identity.

use rayon::prelude::*;
use serde::Serialize;

use crate::constructions::{
    lemma4_divergence_check, thm1_construct, thm1_witness, thm2_construct, thm2_witness,
    thm2_witness_target, ExceptionalSeed, Thm1Config, Thm2Config,
};
use crate::corpus;
use crate::distribution::{level_set_measure, verify_stein_weiss};
use crate::hilbert::{quadrature_oracle_indicator, truncated_hilbert_indicator};
use crate::kk::{kk_construct, KkConfig};
use crate::level_set::{
    mu_from_lambda, sublevel_set, sum_of_roots, verify_bezout, verify_roundtrip, LevelSetConfig,
};
use crate::{FiniteOpenSet, Result, WhitneyPartition};

pub const SCHEMA: u32 = 1;

/// Which way the tolerance binds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `worst <= tolerance`.
    AtMost,
    /// `worst >= tolerance`.
    AtLeast,
    /// `worst > tolerance`.
    Above,
}

impl Comparison {
    fn holds(self, worst: f64, tolerance: f64) -> bool {
        match self {
            Self::AtMost => worst <= tolerance,
            Self::AtLeast => worst >= tolerance,
            Self::Above => worst > tolerance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentitySummary {
    pub name: String,
    pub cases: usize,
    /// Largest error or smallest margin seen, depending on `comparison`.
    pub worst: f64,
    pub tolerance: f64,
    pub comparison: Comparison,
    /// Cases that failed outright (errors, or boolean checks that did not hold).
    pub failures: usize,
    pub pass: bool,
}

impl IdentitySummary {
    fn new(name: &str, comparison: Comparison, tolerance: f64, results: &[Option<f64>]) -> Self {
        let failures = results.iter().filter(|r| r.is_none()).count();
        let values = results.iter().flatten().copied();
        let worst = match comparison {
            Comparison::AtMost => values.fold(0.0, f64::max),
            _ => values.fold(f64::INFINITY, f64::min),
        };
        Self {
            name: name.to_owned(),
            cases: results.len(),
            worst,
            tolerance,
            comparison,
            failures,
            pass: failures == 0 && comparison.holds(worst, tolerance),
        }
    }

    fn flag(name: &str, cases: usize, failures: usize) -> Self {
        Self {
            name: name.to_owned(),
            cases,
            worst: failures as f64,
            tolerance: 0.0,
            comparison: Comparison::AtMost,
            failures,
            pass: failures == 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyAllReport {
    pub schema: u32,
    pub seed: u64,
    pub identities: Vec<IdentitySummary>,
    pub pass: bool,
}

/// Corpus sizes and the budget for the trigonometric construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub oracle_cases: usize,
    pub level_cases: usize,
    pub stein_weiss_cases: usize,
    pub whitney_cases: usize,
    pub kk_m_budget: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            oracle_cases: 1000,
            level_cases: 500,
            stein_weiss_cases: 200,
            whitney_cases: 50,
            kk_m_budget: 1 << 14,
        }
    }
}

fn par_cases<T: Send>(n: usize, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    (0..n as u64).into_par_iter().map(f).collect()
}

/// Closed-form truncated transform against adaptive quadrature.
pub fn closed_form_vs_oracle(seed: u64, cases: usize) -> IdentitySummary {
    let results = par_cases(cases, |i| {
        let (f, x, eps) = corpus::oracle_case(seed, i);
        let closed = truncated_hilbert_indicator(&f, x, eps).ok()?;
        let q = quadrature_oracle_indicator(&f, x, eps).ok()?;
        Some((closed - q).abs())
    });
    IdentitySummary::new("closed_form_vs_oracle", Comparison::AtMost, 1e-7, &results)
}

/// The level-set corpus shared by the measure, factorization and round-trip
/// checks; `None` where the inversion itself failed.
pub fn level_corpus(seed: u64, cases: usize) -> Vec<Option<LevelSetConfig>> {
    par_cases(cases, |i| {
        let (f, lambda) = corpus::level_case(seed, i, 0.1, 5.0);
        sublevel_set(&f, mu_from_lambda(lambda).ok()?).ok()
    })
}

fn over<T: Sync>(items: &[Option<T>], f: impl Fn(&T) -> Option<f64> + Sync) -> Vec<Option<f64>> {
    items.par_iter().map(|c| c.as_ref().and_then(&f)).collect()
}

/// `|E| = (e^λ - 1)|F|`, plus the hand-solvable configurations.
pub fn measure_identity(corpus: &[Option<LevelSetConfig>]) -> [IdentitySummary; 2] {
    let measure = over(corpus, |c| Some(c.measure_defect()));
    let exact = |pairs: &[(f64, f64)], expect: &[f64]| -> Option<f64> {
        let f = FiniteOpenSet::from_pairs(pairs).ok()?;
        let c = sublevel_set(&f, mu_from_lambda(std::f64::consts::LN_2).ok()?).ok()?;
        (c.roots.len() == expect.len()).then(|| {
            c.roots
                .iter()
                .zip(expect)
                .map(|(r, e)| (r - e).abs())
                .fold(0.0, f64::max)
        })
    };
    let r3 = 3f64.sqrt();
    let anchors = [
        exact(&[(0.0, 1.0)], &[-1.0]),
        exact(&[(0.0, 1.0), (2.0, 3.0)], &[-r3, r3]),
    ];
    [
        IdentitySummary::new("measure_identity", Comparison::AtMost, 1e-8, &measure),
        IdentitySummary::new("exact_level_set_roots", Comparison::AtMost, 1e-12, &anchors),
    ]
}

/// Residual of the polynomial factorization and the sum-of-roots formula.
pub fn bezout_factorization(corpus: &[Option<LevelSetConfig>]) -> [IdentitySummary; 2] {
    let residual = over(corpus, |c| Some(verify_bezout(c)));
    let sums = over(corpus, |c| {
        let (s, formula) = sum_of_roots(c);
        Some((s - formula).abs() / (1.0 + s.abs()))
    });
    [
        IdentitySummary::new("bezout_residual", Comparison::AtMost, 1e-9, &residual),
        IdentitySummary::new("sum_of_roots", Comparison::AtMost, 1e-8, &sums),
    ]
}

/// `H1_E(b_k) = λ` at every right endpoint of `F`, and `H1_E > λ` inside `F`.
pub fn roundtrip(corpus: &[Option<LevelSetConfig>]) -> [IdentitySummary; 2] {
    let reports: Vec<_> = corpus
        .par_iter()
        .map(|c| c.as_ref().map(verify_roundtrip))
        .collect();
    let endpoint: Vec<_> = reports
        .iter()
        .map(|r| r.as_ref().map(|r| r.endpoint_defect))
        .collect();
    let inside: Vec<_> = reports
        .iter()
        .map(|r| r.as_ref().map(|r| r.inside_margin))
        .collect();
    [
        IdentitySummary::new("roundtrip_endpoints", Comparison::AtMost, 1e-9, &endpoint),
        IdentitySummary::new("roundtrip_inside_margin", Comparison::Above, 0.0, &inside),
    ]
}

/// Twenty levels evenly spaced over `[0.05, 3]`.
pub fn stein_weiss_grid() -> Vec<f64> {
    (0..20)
        .map(|i| 0.05 + (3.0 - 0.05) * i as f64 / 19.0)
        .collect()
}

/// Level-set measure of `|H1_E|` against `2|E|/sinh(πλ)`.
pub fn stein_weiss(seed: u64, cases: usize) -> [IdentitySummary; 2] {
    let grid = stein_weiss_grid();
    let results = par_cases(cases, |i| {
        let e = corpus::stein_weiss_case(seed, i);
        verify_stein_weiss(&e, &grid)
            .ok()
            .map(|r| r.max_relative_error)
    });
    let unit = FiniteOpenSet::single(0.0, 1.0).expect("unit interval");
    let single: Vec<_> = grid
        .iter()
        .map(|&l| {
            let s = (std::f64::consts::PI * l).exp();
            let closed = 4.0 * s / (s * s - 1.0);
            level_set_measure(&unit, l)
                .ok()
                .map(|m| (m - closed).abs() / closed)
        })
        .collect();
    [
        IdentitySummary::new("stein_weiss", Comparison::AtMost, 1e-6, &results),
        IdentitySummary::new(
            "stein_weiss_single_interval",
            Comparison::AtMost,
            1e-10,
            &single,
        ),
    ]
}

/// Disjointness, containment, distance-equals-length and separation of the
/// Whitney cells at every depth `1..=10`.
pub fn whitney(seed: u64, cases: usize) -> IdentitySummary {
    let results = par_cases(cases * 10, |i| {
        let g = corpus::whitney_case(seed, i / 10);
        let depth = (i % 10) as u32 + 1;
        WhitneyPartition::new(&g, depth)
            .map(|w| w.verify().pass)
            .unwrap_or(false)
    });
    IdentitySummary::flag(
        "whitney",
        results.len(),
        results.iter().filter(|p| !**p).count(),
    )
}

fn seed_at_zero() -> Result<ExceptionalSeed> {
    ExceptionalSeed::around(vec![0.0], 0.5)
}

/// Six stages around `{0}`: the truncated transform at 0 must reach 5.
pub fn theorem1(depth: usize) -> [IdentitySummary; 2] {
    let run = || -> Result<(f64, bool)> {
        let c = thm1_construct(
            &seed_at_zero()?,
            Thm1Config {
                depth,
                ..Default::default()
            },
        )?;
        let w = thm1_witness(&c, 0.0)?;
        let counts_ok = w.b_counts.iter().enumerate().all(|(n, b)| *b == n + 1);
        let ok = c.pass() && w.pass && counts_ok && w.a_bounds.iter().all(|a| *a < 1.0);
        Ok((w.max_value(), ok))
    };
    let (value, ok) = match run() {
        Ok((v, ok)) => (Some(v), ok),
        Err(_) => (None, false),
    };
    [
        IdentitySummary::new(
            "theorem1_divergence",
            Comparison::AtLeast,
            depth as f64 - 1.0,
            &[value],
        ),
        IdentitySummary::flag("theorem1_stage_bounds", 1, usize::from(!ok)),
    ]
}

/// Continuous version: the witness must reach `Σ_{n=2}^N (1 - 2^{-n}) - 1`.
pub fn theorem2(depth: usize) -> [IdentitySummary; 2] {
    let run = || -> Result<(f64, bool)> {
        let c = thm2_construct(
            &seed_at_zero()?,
            Thm2Config {
                depth,
                ..Default::default()
            },
        )?;
        let w = thm2_witness(&c, 0.0)?;
        Ok((w.max_value(), c.pass() && c.continuous && w.pass))
    };
    let (value, ok) = match run() {
        Ok((v, ok)) => (Some(v), ok),
        Err(_) => (None, false),
    };
    [
        IdentitySummary::new(
            "theorem2_divergence",
            Comparison::AtLeast,
            thm2_witness_target(depth),
            &[value],
        ),
        IdentitySummary::flag("theorem2_continuity_and_stages", 1, usize::from(!ok)),
    ]
}

/// `π H_{2^{-n}} φ(0)` below the harmonic bound for `n = 1..=n_max`, and
/// below `-0.5` at `n_max`.
pub fn lemma4(truncation: u32, n_max: u32) -> [IdentitySummary; 2] {
    let rows = lemma4_divergence_check(truncation, n_max).ok();
    let margins: Vec<Option<f64>> = match &rows {
        Some(rows) => rows.iter().map(|r| Some(r.bound - r.value)).collect(),
        None => vec![None],
    };
    let last = rows.as_ref().and_then(|r| r.last()).map(|r| -r.value);
    [
        IdentitySummary::new("lemma4_bound", Comparison::AtLeast, 0.0, &margins),
        IdentitySummary::new("lemma4_trend", Comparison::Above, 0.5, &[last]),
    ]
}

/// Partial sums of the constructed polynomial on `F = (0, 0.1)`.
pub fn kk(m_budget: u64) -> [IdentitySummary; 2] {
    let f = FiniteOpenSet::single(0.0, 0.1).expect("interval");
    let config = KkConfig {
        m_budget,
        ..Default::default()
    };
    match kk_construct(&f, config) {
        Ok(c) => [
            IdentitySummary::new(
                "kk_partial_sums",
                Comparison::AtLeast,
                c.bound,
                &[Some(c.min_max_partial_sum)],
            ),
            IdentitySummary::new(
                "kk_measure",
                Comparison::AtMost,
                1e-8,
                &[Some(c.e_measure_defect)],
            ),
        ],
        Err(_) => [
            IdentitySummary::new("kk_partial_sums", Comparison::AtLeast, f64::NAN, &[None]),
            IdentitySummary::new("kk_measure", Comparison::AtMost, 1e-8, &[None]),
        ],
    }
}

pub fn verify_all(config: VerifyConfig) -> VerifyAllReport {
    let seed = config.seed;
    let level = level_corpus(seed, config.level_cases);
    let mut identities = vec![closed_form_vs_oracle(seed, config.oracle_cases)];
    identities.extend(measure_identity(&level));
    identities.extend(bezout_factorization(&level));
    identities.extend(roundtrip(&level));
    identities.extend(stein_weiss(seed, config.stein_weiss_cases));
    identities.push(whitney(seed, config.whitney_cases));
    identities.extend(theorem1(6));
    identities.extend(theorem2(5));
    identities.extend(lemma4(40, 12));
    identities.extend(kk(config.kk_m_budget));
    let pass = identities.iter().all(|i| i.pass);
    VerifyAllReport {
        schema: SCHEMA,
        seed,
        identities,
        pass,
    }
}
