//! One construction step: a neighbourhood `F` of the seed inside `G`, its
//! sublevel set `E`, and the certificates linking them.

use std::f64::consts::PI;

use serde::Serialize;

use super::lemma2::{lemma2_select, verify_lemma2, Lemma2Report};
use super::partition_covering;
use crate::error::{invalid, Error, Result};
use crate::hilbert::truncated_abs_kernel_integral;
use crate::level_set::{sublevel_set, verify_roundtrip, LevelBound, LevelSetConfig};
use crate::sets::{FiniteOpenSet, WhitneyPartition};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma3Report {
    pub pass: bool,
    pub lemma2: Lemma2Report,
    /// `E ⊂ G`, exact.
    pub e_inside_g: bool,
    /// `E` lies in the union of the partition cells, exact.
    pub e_inside_cells: bool,
    /// `min (H1_E - λ)` over samples of `F`.
    pub inside_margin: f64,
    /// `max |H1_E(b_k) - λ|`.
    pub endpoint_defect: f64,
    /// `min (H1_E(s) - λ)` over the seed points.
    pub seed_margin: f64,
    /// `min_k (δ_k - |E ∩ I_k|)`; nonnegative means every tail bound holds.
    pub worst_cell_margin: f64,
    /// Largest `(1/π) ∫_{|t-x|>ε} 1_E(t)/|x-t| dt` over windows leaving `G`.
    pub max_probe_tail: f64,
    pub probe_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma3Outcome {
    pub f: FiniteOpenSet,
    pub e: FiniteOpenSet,
    pub config: LevelSetConfig,
    pub whitney_depth: u32,
    pub report: Lemma3Report,
}

/// `δ_k = π δ |I_k| w_k / 2`, so that `(2/π)|E ∩ I_k|/|I_k| ≤ δ w_k`.
fn tail_deltas(partition: &WhitneyPartition, delta: f64) -> Vec<f64> {
    partition
        .cells()
        .iter()
        .map(|c| PI * delta * c.len() * c.weight / 2.0)
        .collect()
}

/// Windows `(x - ε, x + ε)` not contained in `G`, concentrated where the
/// tail integral of `E` is largest: near `E`, near the seed and near `∂G`.
pub fn tail_probes(g: &FiniteOpenSet, e: &FiniteOpenSet, points: &[f64]) -> Vec<(f64, f64)> {
    let mut xs: Vec<f64> = Vec::new();
    xs.extend(points);
    xs.extend(g.endpoints());
    for iv in e.iter() {
        xs.extend([iv.a(), iv.b(), iv.midpoint()]);
    }
    for iv in g.iter() {
        xs.extend(iv.interior_samples(8));
        let h = iv.len();
        xs.extend([iv.a() - 0.01 * h, iv.b() + 0.01 * h, iv.a() - h, iv.b() + h]);
    }
    let mut out = Vec::new();
    for x in xs {
        let d = g.depth(x);
        let radii: Vec<f64> = if d > 0.0 {
            [1e-9, 1e-3, 0.25, 1.0, 3.0]
                .iter()
                .map(|t| d * (1.0 + t))
                .collect()
        } else {
            let scale = e
                .iter()
                .map(|iv| (x - iv.a()).abs().max((x - iv.b()).abs()))
                .fold(0.0, f64::max);
            [1e-6, 1e-3, 0.1, 0.5, 1.0]
                .iter()
                .map(|t| scale * t)
                .collect()
        };
        for eps in radii {
            let (lo, hi) = (x - eps, x + eps);
            if eps > 0.0 && lo < x && x < hi && !g.contains_window(lo, hi) {
                out.push((x, eps));
            }
        }
    }
    out
}

/// One step with `γ = |μ|` and `δ_k = π δ |I_k| w_k / 2`.
pub fn lemma3_step(
    g: &FiniteOpenSet,
    points: &[f64],
    bound: LevelBound,
    delta: f64,
    min_depth: u32,
) -> Result<Lemma3Outcome> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(invalid("delta", format!("must be positive, got {delta}")));
    }
    if points.is_empty() {
        return Err(invalid("points", "at least one seed point is required"));
    }
    let partition = partition_covering(g, points, min_depth)?;
    let gamma = bound.mu.abs();
    let deltas = tail_deltas(&partition, delta);
    if deltas.iter().any(|d| !(*d > 0.0)) {
        return Err(Error::Resolution {
            context: format!(
                "Whitney cells of {g:?} underflow at depth {}",
                partition.depth()
            ),
        });
    }
    let f = lemma2_select(&partition, points, gamma, &deltas)?;
    let lemma2 = verify_lemma2(&partition, points, &f, gamma, &deltas)?;
    let config = sublevel_set(&f, bound)?;
    let e = config.e.clone();

    let e_inside_g = e.is_subset_of(g);
    let e_inside_cells = e.is_subset_of(&partition.covered());
    let roundtrip = verify_roundtrip(&config);
    let norm = bound.normalization;
    let seed_margin = points
        .iter()
        .map(|&s| norm.transform(&e, s) - bound.lambda)
        .fold(f64::INFINITY, f64::min);
    let worst_cell_margin = partition
        .cells()
        .iter()
        .zip(&deltas)
        .map(|(c, d)| d - e.intersect_interval(c.start, c.end).measure())
        .fold(f64::INFINITY, f64::min);
    let probes = tail_probes(g, &e, points);
    let mut max_probe_tail = 0.0f64;
    for &(x, eps) in &probes {
        max_probe_tail = max_probe_tail.max(truncated_abs_kernel_integral(&e, x, eps)?);
    }

    let report = Lemma3Report {
        pass: lemma2.pass
            && e_inside_g
            && e_inside_cells
            && roundtrip.pass
            && seed_margin > 0.0
            && worst_cell_margin >= 0.0
            && max_probe_tail < delta,
        lemma2,
        e_inside_g,
        e_inside_cells,
        inside_margin: roundtrip.inside_margin,
        endpoint_defect: roundtrip.endpoint_defect,
        seed_margin,
        worst_cell_margin,
        max_probe_tail,
        probe_count: probes.len(),
    };
    Ok(Lemma3Outcome {
        f,
        e,
        config,
        whitney_depth: partition.depth(),
        report,
    })
}
