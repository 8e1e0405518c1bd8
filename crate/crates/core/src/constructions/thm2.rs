//! A continuous `f = Σ f_n / 2^n` with growing truncated transforms at the
//! seed points, and the block assembly for unbounded closed sets.

use serde::{Deserialize, Serialize};

use super::lemma2::ulp;
use super::lemma3::{lemma3_step, tail_probes, Lemma3Report};
use super::lemma4::lemma4_phi;
use super::thm1::structure;
use super::{witness_epsilons, DivergenceWitness, ExceptionalSeed, StageRecord};
use crate::error::{invalid, Error, Result};
use crate::hilbert::{truncated_abs_kernel_integral, PiecewiseLinearFunction};
use crate::level_set::{LevelBound, Normalization};
use crate::sets::FiniteOpenSet;

/// Upper bound on ramp refinements per stage.
const MAX_REFINEMENTS: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thm2Config {
    pub depth: usize,
    /// Allowed gap between `H f_n` and `H 1_{E_n}` at the right endpoints of `F_n`.
    pub eta: f64,
    pub normalization: Normalization,
    pub whitney_depth: u32,
    /// Tail bound per stage.
    pub delta: f64,
}

impl Default for Thm2Config {
    fn default() -> Self {
        Self {
            depth: 5,
            eta: 0.5,
            normalization: Normalization::Pi,
            whitney_depth: 6,
            delta: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thm2StageReport {
    pub pass: bool,
    pub lemma3: Lemma3Report,
    /// `max_k |H f_n(b_k) - H 1_{E_n}(b_k)|`.
    pub endpoint_defect: f64,
    pub ramp_refinements: usize,
    /// `min (H f_n(x) - (λ - η))` over samples of `F_n`.
    pub inside_margin: f64,
    /// Largest `|H_ε f_n(x)|` over windows leaving `F_{n-1}`.
    pub max_probe_transform: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Thm2Construction {
    pub seed: ExceptionalSeed,
    pub config: Thm2Config,
    pub stages: Vec<StageRecord>,
    pub approximants: Vec<PiecewiseLinearFunction>,
    pub reports: Vec<Thm2StageReport>,
    /// `Σ f_n / 2^n`.
    pub f: PiecewiseLinearFunction,
    pub nested: bool,
    pub e_between: bool,
    pub disjoint: bool,
    /// Every approximant and the sum vanish at the ends of their supports.
    pub continuous: bool,
    /// `supp f ⊂ F_0`.
    pub supported_in_ambient: bool,
}

impl Thm2Construction {
    pub fn previous(&self, n: usize) -> &FiniteOpenSet {
        if n == 1 {
            self.seed.ambient()
        } else {
            &self.stages[n - 2].f
        }
    }

    pub fn pass(&self) -> bool {
        self.nested
            && self.e_between
            && self.disjoint
            && self.continuous
            && self.supported_in_ambient
            && self.reports.iter().all(|r| r.pass)
    }
}

fn transform(f: &PiecewiseLinearFunction, x: f64, eps: f64, norm: Normalization) -> Result<f64> {
    match norm {
        Normalization::Pi => f.hilbert(x, eps),
        Normalization::Bare => f.bare_hilbert(x, eps),
    }
}

/// Trapezoids of height 1 on the components of `E_n`, ramps shortened until
/// the transform at every right endpoint of `F_n` is within `η` of `H1_{E_n}`.
fn approximant(
    e: &FiniteOpenSet,
    f: &FiniteOpenSet,
    bound: &LevelBound,
    eta: f64,
) -> Result<(PiecewiseLinearFunction, f64, usize)> {
    let norm = bound.normalization;
    let comps: Vec<(f64, f64)> = e.iter().map(|iv| (iv.a(), iv.b())).collect();
    // each ramp is resolved by the floats next to its own endpoint
    let left_floor: Vec<f64> = comps.iter().map(|&(c, _)| 64.0 * ulp(c)).collect();
    let right_floor: Vec<f64> = comps.iter().map(|&(_, a)| 64.0 * ulp(a)).collect();
    let mut left: Vec<f64> = comps.iter().map(|&(c, a)| eta / 8.0 * (a - c)).collect();
    let mut right = left.clone();
    let targets: Vec<(f64, f64)> = f
        .iter()
        .map(|iv| (iv.b(), norm.transform(e, iv.b())))
        .collect();
    let mut best = f64::INFINITY;
    for round in 0..MAX_REFINEMENTS {
        let pieces = comps
            .iter()
            .zip(left.iter().zip(&right))
            .map(|(&(c, a), (&l, &r))| PiecewiseLinearFunction::trapezoid(c, a, l, r, 1.0))
            .collect::<Result<Vec<_>>>()?;
        let fn_ = PiecewiseLinearFunction::sum(&pieces)?;
        let mut defect = 0.0f64;
        for &(b, t) in &targets {
            defect = defect.max((transform(&fn_, b, 0.0, norm)? - t).abs());
        }
        best = best.min(defect);
        if defect < eta {
            return Ok((fn_, defect, round));
        }
        let mut moved = false;
        for k in 0..comps.len() {
            if right[k] * 0.5 >= right_floor[k] {
                right[k] *= 0.5;
                moved = true;
            } else if left[k] * 0.5 >= left_floor[k] {
                left[k] *= 0.5;
                moved = true;
            }
        }
        if !moved {
            return Err(Error::Resolution {
                context: format!("trapezoid ramps reached the float floor with defect {defect:e}"),
            });
        }
    }
    Err(Error::Budget {
        what: "ramp refinement",
        best_margin: eta - best,
    })
}

/// Stage `n` uses level `λ = 2^n` and tail bound `δ`.
pub fn thm2_construct(seed: &ExceptionalSeed, config: Thm2Config) -> Result<Thm2Construction> {
    if config.depth == 0 {
        return Err(invalid("depth", "must be at least 1"));
    }
    if !(config.eta > 0.0 && config.eta <= 1.0) {
        return Err(invalid(
            "eta",
            format!("must lie in (0, 1], got {}", config.eta),
        ));
    }
    let mut stages: Vec<StageRecord> = Vec::with_capacity(config.depth);
    let mut approximants = Vec::with_capacity(config.depth);
    let mut reports = Vec::with_capacity(config.depth);
    for n in 1..=config.depth {
        let g = stages.last().map_or(seed.ambient(), |s| &s.f).clone();
        let lambda = 2f64.powi(n as i32);
        let bound = LevelBound::new(lambda, config.normalization)?;
        let min_depth = config.whitney_depth.max(n as u32 + 4);
        let out = lemma3_step(&g, seed.points(), bound, config.delta, min_depth)?;
        let (fn_, endpoint_defect, ramp_refinements) =
            approximant(&out.e, &out.f, &bound, config.eta)?;

        let floor = lambda - config.eta;
        let mut inside_margin = f64::INFINITY;
        for iv in out.f.iter() {
            for x in iv.interior_samples(16).chain([iv.b()]) {
                let v = transform(&fn_, x, 0.0, config.normalization)?;
                inside_margin = inside_margin.min(v - floor);
            }
        }
        let mut max_probe_transform = 0.0f64;
        for (x, eps) in tail_probes(&g, &out.e, seed.points()) {
            max_probe_transform = max_probe_transform.max(fn_.hilbert(x, eps)?.abs());
        }
        reports.push(Thm2StageReport {
            pass: out.report.pass
                && endpoint_defect < config.eta
                && inside_margin > 0.0
                && max_probe_transform < config.delta,
            lemma3: out.report,
            endpoint_defect,
            ramp_refinements,
            inside_margin,
            max_probe_transform,
        });
        approximants.push(fn_);
        stages.push(StageRecord {
            index: n,
            f: out.f,
            e: out.e,
            bound,
            tail_bound: config.delta,
            whitney_depth: out.whitney_depth,
        });
    }
    let scaled: Vec<PiecewiseLinearFunction> = approximants
        .iter()
        .enumerate()
        .map(|(i, f)| f.scale(0.5f64.powi(i as i32 + 1)))
        .collect();
    let f = PiecewiseLinearFunction::sum(&scaled)?;
    let (nested, e_between, disjoint, _) = structure(seed, &stages);
    let continuous = f.is_continuous() && approximants.iter().all(|a| a.is_continuous());
    let supported_in_ambient = stages.iter().all(|s| s.e.is_subset_of(seed.ambient()));
    Ok(Thm2Construction {
        seed: seed.clone(),
        config,
        stages,
        approximants,
        reports,
        f,
        nested,
        e_between,
        disjoint,
        continuous,
        supported_in_ambient,
    })
}

/// `Σ_{n=2}^{N} (1 - 2^{-n}) - 1`.
pub fn thm2_witness_target(depth: usize) -> f64 {
    (2..=depth)
        .map(|n| 1.0 - 0.5f64.powi(n as i32))
        .sum::<f64>()
        - 1.0
}

/// Truncated transforms of `f` at `x` along `ε_n = ½ dist(x, F_{n-1}^c)`.
pub fn thm2_witness(c: &Thm2Construction, x: f64) -> Result<DivergenceWitness> {
    let n_stages = c.stages.len();
    let previous: Vec<&FiniteOpenSet> = (1..=n_stages).map(|n| c.previous(n)).collect();
    let eps = witness_epsilons(x, &previous);
    if let Some(e) = eps.iter().find(|e| !(**e > 0.0)) {
        return Err(invalid("x", format!("not inside every F_n (radius {e})")));
    }
    let per_unit = match c.config.normalization {
        Normalization::Bare => std::f64::consts::FRAC_1_PI,
        Normalization::Pi => 1.0,
    };
    let mut values = Vec::with_capacity(n_stages);
    let mut a_bounds = Vec::with_capacity(n_stages);
    let mut b_counts = Vec::with_capacity(n_stages);
    let mut certified_lower = Vec::with_capacity(n_stages);
    for &eps in &eps {
        let (lo, hi) = (x - eps, x + eps);
        let value = c.f.hilbert(x, eps)?;
        let (mut a, mut b, mut lower) = (0.0, 0, 0.0);
        for (m, s) in c.stages.iter().enumerate() {
            let w = 0.5f64.powi(m as i32 + 1);
            let tail = w * truncated_abs_kernel_integral(&s.e, x, eps)?;
            if previous[m].contains_window(lo, hi) {
                b += 1;
            } else {
                a += tail;
            }
            if s.f.contains_window(lo, hi) {
                lower += w * (s.bound.lambda - c.config.eta) * per_unit;
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

/// One block `[start, end]` of the closed-set assembly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssemblyBlock {
    pub start: f64,
    pub end: f64,
    pub f: PiecewiseLinearFunction,
    /// Add the `φ(· - start)` correction at the block anchor.
    pub correction: bool,
}

/// `1 / (2^k (x_{k+1} - x_k))` for blocks `k = 1, 2, …`.
pub fn default_block_weights(blocks: &[AssemblyBlock]) -> Vec<f64> {
    blocks
        .iter()
        .enumerate()
        .map(|(i, b)| 0.5f64.powi(i as i32 + 1) / (b.end - b.start))
        .collect()
}

/// `g = Σ w_k f_k + Σ_{flagged} 2^{-k} φ(· - x_k)`.
pub fn thm2_closed_set_assembly(
    blocks: &[AssemblyBlock],
    weights: &[f64],
    phi_truncation: u32,
) -> Result<PiecewiseLinearFunction> {
    if blocks.is_empty() {
        return Err(invalid("blocks", "at least one block is required"));
    }
    if weights.len() != blocks.len() {
        return Err(invalid(
            "weights",
            format!("{} weights for {} blocks", weights.len(), blocks.len()),
        ));
    }
    for (k, b) in blocks.iter().enumerate() {
        if !(b.end - b.start > 1.0) {
            return Err(invalid(
                "blocks",
                format!("block {k} has length {} (must exceed 1)", b.end - b.start),
            ));
        }
        let (lo, hi) = b.f.support();
        if lo < b.start || hi > b.end {
            return Err(invalid(
                "blocks",
                format!(
                    "block {k}: support [{lo}, {hi}] leaves [{}, {}]",
                    b.start, b.end
                ),
            ));
        }
    }
    for w in blocks.windows(2) {
        if w[1].start < w[0].end {
            return Err(Error::OverlappingBlocks {
                a0: w[0].start,
                a1: w[0].end,
                b0: w[1].start,
                b1: w[1].end,
            });
        }
    }
    let phi = lemma4_phi(phi_truncation)?;
    let mut parts: Vec<PiecewiseLinearFunction> = Vec::new();
    for (k, (b, &w)) in blocks.iter().zip(weights).enumerate() {
        parts.push(b.f.scale(w));
        if b.correction {
            parts.push(phi.shift(b.start)?.scale(0.5f64.powi(k as i32 + 1)));
        }
    }
    PiecewiseLinearFunction::sum(&parts)
}
