//! Nested sets `E = ∪ E_n` whose truncated transforms grow at every seed point.

use serde::{Deserialize, Serialize};

use super::lemma3::{lemma3_step, Lemma3Report};
use super::{witness_epsilons, DivergenceWitness, ExceptionalSeed, StageRecord};
use crate::error::{invalid, Result};
use crate::hilbert::{truncated_abs_kernel_integral, truncated_hilbert_indicator};
use crate::level_set::{LevelBound, Normalization};
use crate::sets::FiniteOpenSet;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thm1Config {
    pub depth: usize,
    pub lambda: f64,
    pub normalization: Normalization,
    /// Minimum Whitney depth; stage `n` uses at least `max(this, n + 4)`.
    pub whitney_depth: u32,
}

impl Default for Thm1Config {
    fn default() -> Self {
        Self {
            depth: 6,
            lambda: 1.0,
            normalization: Normalization::Pi,
            whitney_depth: 6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thm1Construction {
    pub seed: ExceptionalSeed,
    pub stages: Vec<StageRecord>,
    pub reports: Vec<Lemma3Report>,
    /// `∪ E_n`.
    pub e: FiniteOpenSet,
    /// `F_N ⊂ … ⊂ F_0` and the seed in every `F_n`, exact.
    pub nested: bool,
    /// `E_n ⊂ F_{n-1} \ F_n`, exact.
    pub e_between: bool,
    /// `E_n ∩ E_m = ∅`, exact.
    pub disjoint: bool,
}

impl Thm1Construction {
    pub fn previous(&self, n: usize) -> &FiniteOpenSet {
        if n == 1 {
            self.seed.ambient()
        } else {
            &self.stages[n - 2].f
        }
    }

    pub fn pass(&self) -> bool {
        self.nested && self.e_between && self.disjoint && self.reports.iter().all(|r| r.pass)
    }
}

pub(crate) fn structure(
    seed: &ExceptionalSeed,
    stages: &[StageRecord],
) -> (bool, bool, bool, FiniteOpenSet) {
    let mut nested = true;
    let mut e_between = true;
    let mut prev = seed.ambient();
    for s in stages {
        nested &= s.f.is_subset_of(prev) && seed.points().iter().all(|&p| s.f.contains(p));
        e_between &= s.e.is_subset_of(prev) && s.e.is_disjoint_from(&s.f);
        prev = &s.f;
    }
    let mut disjoint = true;
    for (i, a) in stages.iter().enumerate() {
        for b in &stages[i + 1..] {
            disjoint &= a.e.is_disjoint_from(&b.e);
        }
    }
    let union = stages
        .iter()
        .fold(FiniteOpenSet::empty(), |acc, s| acc.union(&s.e));
    (nested, e_between, disjoint, union)
}

/// Applies the step `depth` times with level `λ` and tail bound `2^{-n}`.
pub fn thm1_construct(seed: &ExceptionalSeed, config: Thm1Config) -> Result<Thm1Construction> {
    if config.depth == 0 {
        return Err(invalid("depth", "must be at least 1"));
    }
    let bound = LevelBound::new(config.lambda, config.normalization)?;
    let mut stages: Vec<StageRecord> = Vec::with_capacity(config.depth);
    let mut reports = Vec::with_capacity(config.depth);
    for n in 1..=config.depth {
        let g = stages.last().map_or(seed.ambient(), |s| &s.f);
        let delta = 0.5f64.powi(n as i32);
        let min_depth = config.whitney_depth.max(n as u32 + 4);
        let out = lemma3_step(g, seed.points(), bound, delta, min_depth)?;
        stages.push(StageRecord {
            index: n,
            f: out.f,
            e: out.e,
            bound,
            tail_bound: delta,
            whitney_depth: out.whitney_depth,
        });
        reports.push(out.report);
    }
    let (nested, e_between, disjoint, e) = structure(seed, &stages);
    Ok(Thm1Construction {
        seed: seed.clone(),
        stages,
        reports,
        e,
        nested,
        e_between,
        disjoint,
    })
}

/// Truncated transforms of `1_E` at `x` along `ε_n = ½ dist(x, F_{n-1}^c)`.
///
/// For each window the stages split into those whose `F_m` contains the
/// window (their full transform at `x` exceeds `λ` in the `Pi` reading) and
/// the rest, whose contribution is bounded by the absolute tail integral.
pub fn thm1_witness(c: &Thm1Construction, x: f64) -> Result<DivergenceWitness> {
    let n_stages = c.stages.len();
    let previous: Vec<&FiniteOpenSet> = (1..=n_stages).map(|n| c.previous(n)).collect();
    let eps = witness_epsilons(x, &previous);
    if let Some(e) = eps.iter().find(|e| !(**e > 0.0)) {
        return Err(invalid("x", format!("not inside every F_n (radius {e})")));
    }
    let per_unit = match c.stages.first().map(|s| s.bound.normalization) {
        Some(Normalization::Bare) => std::f64::consts::FRAC_1_PI,
        _ => 1.0,
    };
    let mut values = Vec::with_capacity(n_stages);
    let mut a_bounds = Vec::with_capacity(n_stages);
    let mut b_counts = Vec::with_capacity(n_stages);
    let mut certified_lower = Vec::with_capacity(n_stages);
    for &eps in &eps {
        let (lo, hi) = (x - eps, x + eps);
        let mut value = 0.0;
        let mut a = 0.0;
        let mut b = 0;
        let mut lower = 0.0;
        for (m, s) in c.stages.iter().enumerate() {
            let term = truncated_hilbert_indicator(&s.e, x, eps)?;
            value += term;
            let tail = truncated_abs_kernel_integral(&s.e, x, eps)?;
            if previous[m].contains_window(lo, hi) {
                b += 1;
            } else {
                a += tail;
            }
            if s.f.contains_window(lo, hi) {
                lower += s.bound.lambda * per_unit;
            } else {
                lower -= tail;
            }
        }
        values.push(value);
        a_bounds.push(a);
        b_counts.push(b);
        certified_lower.push(lower);
    }
    let pass = values
        .iter()
        .zip(&certified_lower)
        .zip(&a_bounds)
        .all(|((v, l), a)| v >= l && *a < 1.0);
    Ok(DivergenceWitness {
        x,
        epsilon_sequence: eps,
        values,
        a_bounds,
        b_counts,
        certified_lower,
        pass,
    })
}
