//! Finite-depth versions of the exceptional-set constructions.
//!
//! A finite point seed stands in for the null set. Each stage shrinks an open
//! neighbourhood `F_n` of the seed inside the previous one, pairs it with the
//! sublevel set `E_n = {H1_{F_n} < μ}`, and certifies the inequalities that
//! make truncated transforms at seed points grow without bound.

mod lemma2;
mod lemma3;
mod lemma4;
mod thm1;
mod thm2;

pub use lemma2::{cell_budget, lemma2_select, verify_lemma2, Lemma2Report};
pub use lemma3::{lemma3_step, tail_probes, Lemma3Outcome, Lemma3Report};
pub use lemma4::{lemma4_divergence_check, lemma4_phi, Lemma4Row, DEFAULT_PHI_TRUNCATION};
pub use thm1::{thm1_construct, thm1_witness, Thm1Config, Thm1Construction};
pub use thm2::{
    default_block_weights, thm2_closed_set_assembly, thm2_construct, thm2_witness,
    thm2_witness_target, AssemblyBlock, Thm2Config, Thm2Construction, Thm2StageReport,
};

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::level_set::LevelBound;
use crate::sets::{FiniteOpenSet, Interval, WhitneyPartition};

/// A finite stand-in for a null set, with an open neighbourhood around it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExceptionalSeed {
    points: Vec<f64>,
    ambient: FiniteOpenSet,
}

/// Radius of the default neighbourhood around each seed point.
pub const DEFAULT_AMBIENT_RADIUS: f64 = 0.5;

impl ExceptionalSeed {
    pub fn new(points: Vec<f64>, ambient: FiniteOpenSet) -> Result<Self> {
        if let Some(i) = points.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(invalid(
                "points",
                format!("must be strictly increasing (index {})", i + 1),
            ));
        }
        if let Some(p) = points.iter().find(|&&p| !ambient.contains(p)) {
            return Err(invalid(
                "points",
                format!("{p} is not inside the ambient set"),
            ));
        }
        Ok(Self { points, ambient })
    }

    /// Seed with ambient set `∪ (p - r, p + r)`.
    pub fn around(points: Vec<f64>, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(invalid("radius", format!("must be positive, got {radius}")));
        }
        let ambient = FiniteOpenSet::normalize(
            points
                .iter()
                .map(|&p| Interval::new(p - radius, p + radius))
                .collect::<Result<Vec<_>>>()?,
        );
        Self::new(points, ambient)
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn ambient(&self) -> &FiniteOpenSet {
        &self.ambient
    }
}

/// One step of a nested construction.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageRecord {
    pub index: usize,
    pub f: FiniteOpenSet,
    pub e: FiniteOpenSet,
    pub bound: LevelBound,
    /// Bound on the truncated tails of `E_n` for windows leaving `F_{n-1}`.
    pub tail_bound: f64,
    pub whitney_depth: u32,
}

/// Truncated transforms at a point along a shrinking window sequence.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceWitness {
    pub x: f64,
    pub epsilon_sequence: Vec<f64>,
    pub values: Vec<f64>,
    /// Tail bounds of the stages whose previous set does not contain the window.
    pub a_bounds: Vec<f64>,
    /// Number of stages whose previous set contains the window.
    pub b_counts: Vec<usize>,
    /// Rigorous lower bound per window: full-transform bounds of the stages
    /// untouched by the window minus the tails of all other stages.
    pub certified_lower: Vec<f64>,
    pub pass: bool,
}

impl DivergenceWitness {
    pub fn max_value(&self) -> f64 {
        self.values
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `½ dist(x, complement of prev)` for each stage's predecessor.
pub(crate) fn witness_epsilons(x: f64, previous: &[&FiniteOpenSet]) -> Vec<f64> {
    previous.iter().map(|g| 0.5 * g.depth(x)).collect()
}

/// Deepens the partition until every seed point sits well inside the covered
/// region, so that small intervals around the seeds stay in covered cells.
pub(crate) fn partition_covering(
    g: &FiniteOpenSet,
    points: &[f64],
    min_depth: u32,
) -> Result<WhitneyPartition> {
    let mut depth = min_depth.max(1);
    loop {
        let p = WhitneyPartition::new(g, depth)?;
        let cov = p.covered();
        if points.iter().all(|&s| cov.contains(s)) {
            return Ok(p);
        }
        depth += 1;
        if depth > 1000 {
            return Err(invalid(
                "seed",
                "points lie too close to the ambient boundary",
            ));
        }
    }
}
