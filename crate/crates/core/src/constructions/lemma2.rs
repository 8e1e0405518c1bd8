//! Small neighbourhoods of a seed whose transform stays below `γ` off `G`
//! and has a thin superlevel set in every Whitney cell.

use std::f64::consts::PI;

use serde::Serialize;

use crate::distribution::superlevel_abs_set;
use crate::error::{invalid, Error, Result};
use crate::hilbert::hilbert_indicator;
pub(crate) use crate::roots::ulp;
use crate::sets::{FiniteOpenSet, Interval, WhitneyPartition};

/// Upper bound on halving rounds.
const MAX_ROUNDS: usize = 5000;

/// Allowed `|F ∩ I_k^*|` for cell `k`:
/// `min(πγ|I_k| w_k / 4, δ_k (e^{πγ} - 1) / (4 e^{πγ/2}))`.
///
/// The first term keeps `(2/π) Σ |F ∩ I_j|/|I_j|` below `γ/2`; the second is
/// the Stein–Weiss measure bound for `{|H1_{F ∩ I_k^*}| > γ/2}`.
pub fn cell_budget(partition: &WhitneyPartition, k: usize, gamma: f64, delta_k: f64) -> f64 {
    let c = &partition.cells()[k];
    let local = PI * gamma * c.len() * c.weight / 4.0;
    let spread = delta_k * (PI * gamma).exp_m1() / (4.0 * (0.5 * PI * gamma).exp());
    local.min(spread)
}

fn union_around(points: &[f64], radii: &[f64]) -> FiniteOpenSet {
    FiniteOpenSet::normalize(
        points
            .iter()
            .zip(radii)
            .filter_map(|(&s, &r)| Interval::new(s - r, s + r).ok()),
    )
}

/// Symmetric intervals around the seed points, halved until every cell of the
/// partition meets its budget.
pub fn lemma2_select(
    partition: &WhitneyPartition,
    points: &[f64],
    gamma: f64,
    deltas: &[f64],
) -> Result<FiniteOpenSet> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(invalid("gamma", format!("must be positive, got {gamma}")));
    }
    let cells = partition.cells();
    if deltas.len() != cells.len() {
        return Err(invalid(
            "deltas",
            format!("{} values for {} cells", deltas.len(), cells.len()),
        ));
    }
    if let Some(d) = deltas.iter().find(|d| !(**d > 0.0)) {
        return Err(invalid("deltas", format!("must be positive, got {d}")));
    }
    if points.is_empty() {
        return Ok(FiniteOpenSet::empty());
    }
    let covered = partition.covered();
    let mut radii = points
        .iter()
        .map(|&s| {
            let d = covered.depth(s);
            if d > 0.0 {
                Ok(0.5 * d)
            } else {
                Err(invalid(
                    "points",
                    format!("{s} lies outside the covered cells"),
                ))
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let budgets: Vec<f64> = (0..cells.len())
        .map(|k| cell_budget(partition, k, gamma, deltas[k]))
        .collect();

    for _ in 0..MAX_ROUNDS {
        let f = union_around(points, &radii);
        let mut shrink = vec![false; points.len()];
        for (k, budget) in budgets.iter().enumerate() {
            let (lo, hi) = partition.star(k);
            if f.intersect_interval(lo, hi).measure() >= *budget {
                for (i, (&s, &r)) in points.iter().zip(&radii).enumerate() {
                    if s - r < hi && lo < s + r {
                        shrink[i] = true;
                    }
                }
            }
        }
        if !shrink.contains(&true) {
            return Ok(f);
        }
        for (i, r) in radii.iter_mut().enumerate() {
            if shrink[i] {
                *r *= 0.5;
                let s = points[i];
                if s - *r == s || s + *r == s || *r < 4.0 * ulp(s) {
                    return Err(Error::Resolution {
                        context: format!("neighbourhood of {s} would need radius below {:e}", *r),
                    });
                }
            }
        }
    }
    Err(Error::Budget {
        what: "neighbourhood halving",
        best_margin: f64::NAN,
    })
}

/// Checks of `{|H1_F| > γ} ⊂ G` and `|I_k ∩ {|H1_F| > γ}| ≤ δ_k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma2Report {
    pub pass: bool,
    /// `sup |H1_F|` over the complement of `G`, attained at the endpoints of
    /// `G` by monotonicity on each complementary piece.
    pub sup_outside: f64,
    /// Largest `|H1_F|` over a probe grid outside `G` (never above
    /// `sup_outside`).
    pub probe_outside: f64,
    /// `min_k (δ_k - |I_k ∩ {|H1_F| > γ}|)`.
    pub worst_cell_margin: f64,
    /// Measure of `{|H1_F| > γ}` outside the covered cells.
    pub uncovered_superlevel: f64,
    /// `F ⊂ G` and every seed point lies in `F`.
    pub contains_seed: bool,
}

pub fn verify_lemma2(
    partition: &WhitneyPartition,
    points: &[f64],
    f: &FiniteOpenSet,
    gamma: f64,
    deltas: &[f64],
) -> Result<Lemma2Report> {
    let g = partition.source();
    let contains_seed = f.is_subset_of(g) && points.iter().all(|&s| f.contains(s));
    if f.is_empty() {
        return Ok(Lemma2Report {
            pass: contains_seed,
            sup_outside: 0.0,
            probe_outside: 0.0,
            worst_cell_margin: deltas.iter().copied().fold(f64::INFINITY, f64::min),
            uncovered_superlevel: 0.0,
            contains_seed,
        });
    }
    let sup_outside = g
        .endpoints()
        .map(|p| hilbert_indicator(f, p).abs())
        .fold(0.0, f64::max);
    let mut probe_outside = 0.0f64;
    let scale = g.max().unwrap() - g.min().unwrap();
    for w in std::iter::once(f64::NEG_INFINITY)
        .chain(g.endpoints())
        .chain(std::iter::once(f64::INFINITY))
        .collect::<Vec<_>>()
        .chunks(2)
    {
        let (lo, hi) = (w[0], w[1]);
        for j in 0..16 {
            let t = (j as f64 + 0.5) / 16.0;
            let x = match (lo.is_finite(), hi.is_finite()) {
                (true, true) => lo + t * (hi - lo),
                (false, true) => hi - scale * 2f64.powi(j - 6),
                (true, false) => lo + scale * 2f64.powi(j - 6),
                _ => unreachable!(),
            };
            probe_outside = probe_outside.max(hilbert_indicator(f, x).abs());
        }
    }
    let sup = superlevel_abs_set(f, gamma)?;
    let worst_cell_margin = partition
        .cells()
        .iter()
        .zip(deltas)
        .map(|(c, d)| d - sup.intersect_interval(c.start, c.end).measure())
        .fold(f64::INFINITY, f64::min);
    let uncovered_superlevel = sup.difference(&partition.covered()).measure();
    Ok(Lemma2Report {
        pass: contains_seed
            && sup_outside <= gamma
            && probe_outside <= gamma
            && worst_cell_margin >= 0.0
            && uncovered_superlevel == 0.0,
        sup_outside,
        probe_outside,
        worst_cell_margin,
        uncovered_superlevel,
        contains_seed,
    })
}
