//! Dyadic Whitney partition of a finite-open set, truncated at a fixed level.
//!
//! Component `(a, b)` with `h = b - a` contributes, for `j = 1..=depth`, the
//! half-open cells `[a + h/2^{j+1}, a + h/2^j)` and `[b - h/2^j, b - h/2^{j+1})`.
//! Each cell sits at distance exactly its own length from the boundary of the
//! component; the two level-1 cells meet at the midpoint.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::{FiniteOpenSet, Interval};
use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Left,
    Right,
}

/// Half-open cell `[start, end)` of a Whitney partition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Cell {
    pub start: f64,
    pub end: f64,
    /// Index of the component of the source set.
    pub component: usize,
    /// Dyadic level `j >= 1`.
    pub level: u32,
    pub side: Side,
    /// Summable weight replacing `2^{-k}` in per-cell budgets; weights of all
    /// cells of a partition sum to less than 1.
    pub weight: f64,
    /// Neighbour on the left (`I_k^-`), within the same component.
    pub prev: Option<usize>,
    /// Neighbour on the right (`I_k^+`), within the same component.
    pub next: Option<usize>,
}

impl Cell {
    #[inline]
    pub fn len(&self) -> f64 {
        self.end - self.start
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WhitneyPartition {
    source: FiniteOpenSet,
    depth: u32,
    cells: Vec<Cell>,
}

/// Outcome of [`WhitneyPartition::verify`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WhitneyReport {
    pub pass: bool,
    pub disjoint: bool,
    pub contained: bool,
    /// Every cell satisfies `dist(I, G^c) = |I|` exactly.
    pub distance_equals_length: bool,
    /// Largest `|dist(I, G^c) - |I||` over cells (0 when exact).
    pub worst_distance_defect: f64,
    /// Every non-adjacent pair satisfies `dist(I_j, I_k) >= |I_j| / 2`.
    pub separation: bool,
    /// Smallest `dist(I_j, I_k) - |I_j|/2` over non-adjacent pairs.
    pub worst_separation_margin: f64,
    pub covered_measure: f64,
    pub uncovered_measure: f64,
}

impl WhitneyPartition {
    pub fn new(source: &FiniteOpenSet, depth: u32) -> Result<Self> {
        source.require_nonempty()?;
        if depth == 0 {
            return Err(invalid("depth", "must be at least 1"));
        }
        if depth > 1000 {
            return Err(invalid("depth", "exceeds the dyadic range of f64"));
        }
        let m = source.len() as f64;
        let mut cells = Vec::with_capacity(2 * depth as usize * source.len());
        for (c, iv) in source.iter().enumerate() {
            let (a, b) = (iv.a(), iv.b());
            let h = b - a;
            let mid = a + 0.5 * h;
            let mut left = Vec::with_capacity(depth as usize);
            let mut right = Vec::with_capacity(depth as usize);
            for j in 1..=depth {
                let outer = h * 0.5f64.powi(j as i32 + 1);
                let inner = h * 0.5f64.powi(j as i32);
                let (l_end, r_start) = if j == 1 {
                    (mid, mid)
                } else {
                    (a + inner, b - inner)
                };
                // within-component budget index: 2j-1 on the left, 2j on the right
                let wl = 0.5f64.powi(2 * j as i32 - 1) / m;
                let wr = 0.5f64.powi(2 * j as i32) / m;
                left.push(Cell {
                    start: a + outer,
                    end: l_end,
                    component: c,
                    level: j,
                    side: Side::Left,
                    weight: wl,
                    prev: None,
                    next: None,
                });
                right.push(Cell {
                    start: r_start,
                    end: b - outer,
                    component: c,
                    level: j,
                    side: Side::Right,
                    weight: wr,
                    prev: None,
                    next: None,
                });
            }
            cells.extend(left.into_iter().rev());
            cells.extend(right);
        }
        let mut p = Self {
            source: source.clone(),
            depth,
            cells,
        };
        p.link();
        Ok(p)
    }

    /// Reassembles a partition from explicit cells, recomputing adjacency.
    /// Used to probe the verifier with hand-built families.
    pub fn from_cells(source: FiniteOpenSet, depth: u32, mut cells: Vec<Cell>) -> Self {
        cells.sort_by(|p, q| p.start.total_cmp(&q.start));
        let mut p = Self {
            source,
            depth,
            cells,
        };
        p.link();
        p
    }

    fn link(&mut self) {
        let n = self.cells.len();
        for i in 0..n {
            let prev =
                (i > 0 && self.cells[i - 1].component == self.cells[i].component).then(|| i - 1);
            let next = (i + 1 < n && self.cells[i + 1].component == self.cells[i].component)
                .then(|| i + 1);
            self.cells[i].prev = prev;
            self.cells[i].next = next;
        }
    }

    pub fn source(&self) -> &FiniteOpenSet {
        &self.source
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    /// `I_k^* = I_k ∪ I_k^+ ∪ I_k^-` as a single interval `[start, end)`.
    pub fn star(&self, k: usize) -> (f64, f64) {
        let c = &self.cells[k];
        let start = c.prev.map(|p| self.cells[p].start).unwrap_or(c.start);
        let end = c.next.map(|q| self.cells[q].end).unwrap_or(c.end);
        (start, end)
    }

    fn adjacent(&self, j: usize, k: usize) -> bool {
        j == k || self.cells[k].prev == Some(j) || self.cells[k].next == Some(j)
    }

    /// Region covered by the truncated family, one interval per component.
    pub fn covered(&self) -> FiniteOpenSet {
        let ivs = self.source.iter().enumerate().filter_map(|(c, _)| {
            let first = self.cells.iter().find(|x| x.component == c)?;
            let last = self.cells.iter().rev().find(|x| x.component == c)?;
            Interval::new(first.start, last.end).ok()
        });
        FiniteOpenSet::normalize(ivs)
    }

    pub fn cell_containing(&self, x: f64) -> Option<usize> {
        let k = self.cells.partition_point(|c| c.end <= x);
        (k < self.cells.len() && self.cells[k].start <= x).then_some(k)
    }

    /// Checks disjointness, containment, the distance identity and the
    /// separation of non-adjacent cells, all in exact rational arithmetic.
    pub fn verify(&self) -> WhitneyReport {
        let q = |x: f64| BigRational::from_float(x).expect("finite cell endpoint");
        let two = BigRational::from_integer(BigInt::from(2));
        let cells: Vec<(BigRational, BigRational)> =
            self.cells.iter().map(|c| (q(c.start), q(c.end))).collect();
        let comps: Vec<(BigRational, BigRational)> = self
            .source
            .iter()
            .map(|iv| (q(iv.a()), q(iv.b())))
            .collect();

        let mut disjoint = true;
        let mut contained = true;
        for (i, (s, e)) in cells.iter().enumerate() {
            if s >= e {
                disjoint = false;
            }
            if i + 1 < cells.len() && *e > cells[i + 1].0 {
                disjoint = false;
            }
            let (a, b) = &comps[self.cells[i].component];
            if s <= a || e >= b {
                contained = false;
            }
        }

        let mut exact = true;
        let mut worst_defect = 0.0f64;
        for (i, (s, e)) in cells.iter().enumerate() {
            let (a, b) = &comps[self.cells[i].component];
            let dist = (s - a).min(b - e);
            let len = e - s;
            if dist != len {
                exact = false;
                let d = (&dist - &len).abs();
                worst_defect = worst_defect.max(to_f64(&d));
            }
        }

        let mut separation = true;
        let mut worst_sep = f64::INFINITY;
        for j in 0..cells.len() {
            let half = (&cells[j].1 - &cells[j].0) / &two;
            for k in 0..cells.len() {
                if self.adjacent(j, k) {
                    continue;
                }
                let dist = if cells[j].1 <= cells[k].0 {
                    &cells[k].0 - &cells[j].1
                } else if cells[k].1 <= cells[j].0 {
                    &cells[j].0 - &cells[k].1
                } else {
                    BigRational::zero()
                };
                let margin = dist - &half;
                if margin.is_negative() {
                    separation = false;
                }
                worst_sep = worst_sep.min(to_f64(&margin));
            }
        }
        if !worst_sep.is_finite() {
            worst_sep = 0.0;
        }

        let covered: f64 = self.cells.iter().map(Cell::len).sum();
        WhitneyReport {
            pass: disjoint && contained && exact && separation,
            disjoint,
            contained,
            distance_equals_length: exact,
            worst_distance_defect: worst_defect,
            separation,
            worst_separation_margin: worst_sep,
            covered_measure: covered,
            uncovered_measure: self.source.measure() - covered,
        }
    }
}

fn to_f64(r: &BigRational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> FiniteOpenSet {
        FiniteOpenSet::single(0.0, 1.0).unwrap()
    }

    fn spans(p: &WhitneyPartition) -> Vec<(f64, f64)> {
        p.cells().iter().map(|c| (c.start, c.end)).collect()
    }

    #[test]
    fn depth_one_cells() {
        let p = WhitneyPartition::new(&unit(), 1).unwrap();
        assert_eq!(spans(&p), vec![(0.25, 0.5), (0.5, 0.75)]);
    }

    #[test]
    fn depth_two_adds_outer_cells() {
        let p = WhitneyPartition::new(&unit(), 2).unwrap();
        assert_eq!(
            spans(&p),
            vec![(0.125, 0.25), (0.25, 0.5), (0.5, 0.75), (0.75, 0.875)]
        );
        // adjacency: the two level-1 cells are neighbours
        assert_eq!(p.cells()[1].next, Some(2));
        assert_eq!(p.cells()[2].prev, Some(1));
        assert_eq!(p.cells()[0].prev, None);
        assert_eq!(p.star(1), (0.125, 0.75));
    }

    #[test]
    fn distance_equals_length_on_unit_interval() {
        let p = WhitneyPartition::new(&unit(), 6).unwrap();
        for c in p.cells() {
            let dist = c.start.min(1.0 - c.end);
            assert_eq!(dist, c.len());
        }
    }

    #[test]
    fn verify_passes_by_construction() {
        let r = WhitneyPartition::new(&unit(), 3).unwrap().verify();
        assert!(r.pass, "{r:?}");
        assert_eq!(r.worst_distance_defect, 0.0);
        assert!(r.worst_separation_margin >= 0.0);
    }

    #[test]
    fn widened_cell_fails_distance_identity() {
        let p = WhitneyPartition::new(&unit(), 3).unwrap();
        let mut cells = p.cells().to_vec();
        let c = &mut cells[0];
        c.end = c.start + 1.1 * c.len();
        let bad = WhitneyPartition::from_cells(unit(), 3, cells);
        let r = bad.verify();
        assert!(!r.pass);
        assert!(!r.distance_equals_length);
        assert!(r.worst_distance_defect > 0.0);
    }

    #[test]
    fn two_components_cross_pairs_separate() {
        let g = FiniteOpenSet::from_pairs(&[(0.0, 1.0), (5.0, 6.0)]).unwrap();
        let p = WhitneyPartition::new(&g, 2).unwrap();
        let r = p.verify();
        assert!(r.pass, "{r:?}");
        // direct distance computation across components
        for a in p.cells().iter().filter(|c| c.component == 0) {
            for b in p.cells().iter().filter(|c| c.component == 1) {
                assert!(b.start - a.end >= a.len() / 2.0);
                assert!(b.start - a.end >= b.len() / 2.0);
            }
        }
    }

    #[test]
    fn covered_measure_is_geometric() {
        let g = FiniteOpenSet::from_pairs(&[(0.0, 1.0), (2.0, 2.5)]).unwrap();
        for d in 1..=10 {
            let r = WhitneyPartition::new(&g, d).unwrap().verify();
            let expected = g.measure() * (1.0 - 0.5f64.powi(d as i32));
            assert!((r.covered_measure - expected).abs() < 1e-15);
            assert!(r.uncovered_measure <= 2f64.powi(1 - d as i32) * g.measure());
        }
    }

    #[test]
    fn weights_are_summable() {
        let g = FiniteOpenSet::from_pairs(&[(0.0, 1.0), (2.0, 3.0), (4.0, 5.0)]).unwrap();
        let p = WhitneyPartition::new(&g, 12).unwrap();
        let total: f64 = p.cells().iter().map(|c| c.weight).sum();
        assert!(total < 1.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(WhitneyPartition::new(&FiniteOpenSet::empty(), 2).is_err());
        assert!(WhitneyPartition::new(&unit(), 0).is_err());
    }

    #[test]
    fn cell_lookup() {
        let p = WhitneyPartition::new(&unit(), 3).unwrap();
        let k = p.cell_containing(0.3).unwrap();
        assert_eq!((p.cells()[k].start, p.cells()[k].end), (0.25, 0.5));
        assert_eq!(p.cell_containing(0.01), None);
    }
}
