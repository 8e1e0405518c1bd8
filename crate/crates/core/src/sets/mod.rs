//! Finite unions of open intervals.
//!
//! A [`FiniteOpenSet`] is kept in canonical form: components sorted, with a
//! strictly positive gap between consecutive components. Endpoint comparisons
//! are exact; nearly-touching intervals are never merged.

mod whitney;

pub use whitney::{Cell, Side, WhitneyPartition, WhitneyReport};

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Open interval `(a, b)` with finite `a < b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    a: f64,
    b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::NonFinite { a, b });
        }
        if a >= b {
            return Err(Error::EmptyInterval { a, b });
        }
        Ok(Self { a, b })
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn b(&self) -> f64 {
        self.b
    }

    #[inline]
    pub fn len(&self) -> f64 {
        self.b - self.a
    }

    #[inline]
    pub fn midpoint(&self) -> f64 {
        self.a + 0.5 * (self.b - self.a)
    }

    #[inline]
    pub fn contains(&self, x: f64) -> bool {
        self.a < x && x < self.b
    }

    /// Distance from `x` to the complement of the interval (0 outside).
    pub fn depth(&self, x: f64) -> f64 {
        if self.contains(x) {
            (x - self.a).min(self.b - x)
        } else {
            0.0
        }
    }

    /// `n` points strictly inside the interval, equally spaced.
    pub fn interior_samples(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        let h = self.len() / (n + 1) as f64;
        (1..=n).map(move |i| self.a + h * i as f64)
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.a, self.b)
    }
}

/// Finite union of open intervals with pairwise disjoint closures.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct FiniteOpenSet {
    intervals: Vec<Interval>,
}

impl FiniteOpenSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Canonical union of arbitrary intervals: sorts, then merges overlapping
    /// and touching members.
    pub fn normalize(raw: impl IntoIterator<Item = Interval>) -> Self {
        let mut v: Vec<Interval> = raw.into_iter().collect();
        v.sort_by(|p, q| p.a.total_cmp(&q.a).then(p.b.total_cmp(&q.b)));
        let mut out: Vec<Interval> = Vec::with_capacity(v.len());
        for iv in v {
            match out.last_mut() {
                Some(last) if iv.a <= last.b => last.b = last.b.max(iv.b),
                _ => out.push(iv),
            }
        }
        Self { intervals: out }
    }

    /// Builds a set from `(a, b)` pairs, validating every pair before merging.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Result<Self> {
        let ivs = pairs
            .iter()
            .map(|&(a, b)| Interval::new(a, b))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::normalize(ivs))
    }

    /// Accepts an already canonical list, rejecting anything else.
    pub fn from_canonical(intervals: Vec<Interval>) -> Result<Self> {
        for (i, w) in intervals.windows(2).enumerate() {
            if !(w[0].b < w[1].a) {
                return Err(Error::NotCanonical { index: i + 1 });
            }
        }
        Ok(Self { intervals })
    }

    pub fn single(a: f64, b: f64) -> Result<Self> {
        Ok(Self {
            intervals: vec![Interval::new(a, b)?],
        })
    }

    pub fn require_nonempty(&self) -> Result<&Self> {
        if self.is_empty() {
            Err(Error::EmptySet)
        } else {
            Ok(self)
        }
    }

    #[inline]
    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Interval> {
        self.intervals.iter()
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(Interval::len).sum()
    }

    pub fn min(&self) -> Option<f64> {
        self.intervals.first().map(|i| i.a)
    }

    pub fn max(&self) -> Option<f64> {
        self.intervals.last().map(|i| i.b)
    }

    /// All endpoints `a_1, b_1, ..., a_n, b_n` in increasing order.
    pub fn endpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.intervals.iter().flat_map(|i| [i.a, i.b])
    }

    pub fn is_endpoint(&self, x: f64) -> bool {
        self.component_index_near(x)
            .map(|k| {
                let iv = self.intervals[k];
                iv.a == x || iv.b == x
            })
            .unwrap_or(false)
    }

    /// Index of the component whose closure contains `x`, if any.
    fn component_index_near(&self, x: f64) -> Option<usize> {
        // first component with b >= x
        let k = self.intervals.partition_point(|iv| iv.b < x);
        (k < self.intervals.len() && self.intervals[k].a <= x).then_some(k)
    }

    /// Component containing `x` (open membership).
    pub fn component_of(&self, x: f64) -> Option<Interval> {
        self.component_index_near(x)
            .map(|k| self.intervals[k])
            .filter(|iv| iv.contains(x))
    }

    pub fn contains(&self, x: f64) -> bool {
        self.component_of(x).is_some()
    }

    /// Membership in the closure.
    pub fn closure_contains(&self, x: f64) -> bool {
        self.component_index_near(x).is_some()
    }

    /// `dist(x, complement)`: zero when `x` is outside the set.
    pub fn depth(&self, x: f64) -> f64 {
        self.component_of(x).map(|iv| iv.depth(x)).unwrap_or(0.0)
    }

    /// Whether the open window `(lo, hi)` lies inside the set.
    pub fn contains_window(&self, lo: f64, hi: f64) -> bool {
        let k = self.intervals.partition_point(|iv| iv.b < hi);
        k < self.intervals.len() && self.intervals[k].a <= lo && hi <= self.intervals[k].b
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::normalize(self.intervals.iter().chain(other.intervals.iter()).copied())
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let (p, q) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < p.len() && j < q.len() {
            let a = p[i].a.max(q[j].a);
            let b = p[i].b.min(q[j].b);
            if a < b {
                out.push(Interval { a, b });
            }
            if p[i].b < q[j].b {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::normalize(out)
    }

    pub fn intersect_interval(&self, lo: f64, hi: f64) -> Self {
        let out = self
            .intervals
            .iter()
            .filter_map(|iv| {
                let a = iv.a.max(lo);
                let b = iv.b.min(hi);
                (a < b).then_some(Interval { a, b })
            })
            .collect();
        Self { intervals: out }
    }

    /// `self` minus the closed window `[lo, hi]`; measure-equivalent to removing
    /// the open window.
    pub fn remove_window(&self, lo: f64, hi: f64) -> Self {
        let mut out = Vec::with_capacity(self.intervals.len() + 1);
        for iv in &self.intervals {
            if iv.b <= lo || iv.a >= hi {
                out.push(*iv);
                continue;
            }
            if iv.a < lo {
                out.push(Interval { a: iv.a, b: lo });
            }
            if hi < iv.b {
                out.push(Interval { a: hi, b: iv.b });
            }
        }
        Self { intervals: out }
    }

    /// Set difference, up to finitely many endpoints.
    pub fn difference(&self, other: &Self) -> Self {
        let mut current = self.clone();
        for iv in &other.intervals {
            current = current.remove_window(iv.a, iv.b);
        }
        current
    }

    pub fn symm_diff_measure(&self, other: &Self) -> f64 {
        self.difference(other).measure() + other.difference(self).measure()
    }

    /// Exact inclusion `self ⊂ other` of open sets.
    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.intervals
            .iter()
            .all(|iv| other.contains_window(iv.a, iv.b))
    }

    /// Disjointness as open sets (shared endpoints allowed).
    pub fn is_disjoint_from(&self, other: &Self) -> bool {
        self.intervals_intersect(other).is_none()
    }

    fn intervals_intersect(&self, other: &Self) -> Option<(usize, usize)> {
        let (p, q) = (&self.intervals, &other.intervals);
        let (mut i, mut j) = (0, 0);
        while i < p.len() && j < q.len() {
            if p[i].a.max(q[j].a) < p[i].b.min(q[j].b) {
                return Some((i, j));
            }
            if p[i].b < q[j].b {
                i += 1;
            } else {
                j += 1;
            }
        }
        None
    }

    /// Image under `x -> scale * x + shift`, `scale > 0`.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(crate::error::invalid("scale", "must be positive"));
        }
        let ivs = self
            .intervals
            .iter()
            .map(|iv| Interval::new(scale * iv.a + shift, scale * iv.b + shift))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::normalize(ivs))
    }

    /// `{-x : x ∈ self}`.
    pub fn reflect(&self) -> Self {
        Self {
            intervals: self
                .intervals
                .iter()
                .rev()
                .map(|iv| Interval { a: -iv.b, b: -iv.a })
                .collect(),
        }
    }

    pub fn translate(&self, shift: f64) -> Result<Self> {
        self.affine(1.0, shift)
    }

    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.intervals.iter().map(|iv| [iv.a, iv.b]).collect()
    }
}

impl<'a> IntoIterator for &'a FiniteOpenSet {
    type Item = &'a Interval;
    type IntoIter = std::slice::Iter<'a, Interval>;

    fn into_iter(self) -> Self::IntoIter {
        self.intervals.iter()
    }
}

impl fmt::Display for FiniteOpenSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return f.write_str("∅");
        }
        for (i, iv) in self.intervals.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∪ ")?;
            }
            write!(f, "{iv}")?;
        }
        Ok(())
    }
}

impl Serialize for FiniteOpenSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_pairs().serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteOpenSet {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        let ivs = pairs
            .into_iter()
            .map(|[a, b]| Interval::new(a, b))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        Ok(Self::normalize(ivs))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(p: &[(f64, f64)]) -> FiniteOpenSet {
        FiniteOpenSet::from_pairs(p).unwrap()
    }

    /// Grid-membership oracle for the measure of a set expressed by a predicate.
    fn grid_measure(lo: f64, hi: f64, n: usize, member: impl Fn(f64) -> bool) -> f64 {
        let h = (hi - lo) / n as f64;
        (0..n)
            .filter(|&i| member(lo + h * (i as f64 + 0.5)))
            .count() as f64
            * h
    }

    #[test]
    fn normalize_merges_overlaps() {
        assert_eq!(set(&[(0.0, 1.0), (0.5, 2.0)]).to_pairs(), vec![[0.0, 2.0]]);
    }

    #[test]
    fn normalize_sorts_without_merging() {
        assert_eq!(
            set(&[(2.0, 3.0), (0.0, 1.0)]).to_pairs(),
            vec![[0.0, 1.0], [2.0, 3.0]]
        );
    }

    #[test]
    fn touching_intervals_merge() {
        let s = set(&[(0.0, 1.0), (1.0, 2.0)]);
        assert_eq!(s.to_pairs(), vec![[0.0, 2.0]]);
        // oracle: away from the shared endpoint both describe the same points
        let raw = |x: f64| (0.0 < x && x < 1.0) || (1.0 < x && x < 2.0);
        let h = 1e-3;
        for i in 0..4000 {
            let x = -1.0 + h * (i as f64 + 0.37);
            assert_eq!(s.contains(x), raw(x), "x = {x}");
        }
    }

    #[test]
    fn rejects_bad_endpoints() {
        assert!(matches!(
            Interval::new(f64::NAN, 1.0),
            Err(Error::NonFinite { .. })
        ));
        assert!(matches!(
            Interval::new(0.0, f64::INFINITY),
            Err(Error::NonFinite { .. })
        ));
        assert!(matches!(
            Interval::new(1.0, 1.0),
            Err(Error::EmptyInterval { .. })
        ));
        assert_eq!(
            FiniteOpenSet::empty().require_nonempty(),
            Err(Error::EmptySet)
        );
    }

    #[test]
    fn nearly_touching_stay_apart() {
        let b = 1.0;
        let a = f64::from_bits(1.0f64.to_bits() + 1);
        let s = set(&[(0.0, b), (a, 2.0)]);
        assert_eq!(s.len(), 2);
    }

    #[test]
    fn measures() {
        assert_eq!(set(&[(0.0, 1.0), (2.0, 3.0)]).measure(), 2.0);
        assert_eq!(FiniteOpenSet::empty().measure(), 0.0);
        let r3 = 3f64.sqrt();
        let e = set(&[(-r3, 0.0), (r3, 2.0)]);
        assert!((e.measure() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn symmetric_difference() {
        let f = set(&[(0.0, 1.0)]);
        assert_eq!(f.symm_diff_measure(&f), 0.0);
        assert_eq!(f.symm_diff_measure(&set(&[(0.0, 2.0)])), 1.0);
        let g = set(&[(0.0, 1.0), (2.0, 3.0)]);
        let h = set(&[(0.5, 2.5)]);
        let got = g.symm_diff_measure(&h);
        let oracle = grid_measure(-1.0, 4.0, 500_000, |x| g.contains(x) != h.contains(x));
        assert!((got - 2.0).abs() < 1e-15);
        assert!((oracle - 2.0).abs() < 1e-4);
    }

    #[test]
    fn window_inclusion_and_depth() {
        let g = set(&[(0.0, 1.0), (2.0, 3.0)]);
        assert!(g.contains_window(0.0, 1.0));
        assert!(g.contains_window(0.2, 0.3));
        assert!(!g.contains_window(0.5, 2.5));
        assert_eq!(g.depth(0.25), 0.25);
        assert_eq!(g.depth(1.5), 0.0);
        assert!(g.is_endpoint(2.0));
        assert!(!g.is_endpoint(2.5));
    }

    #[test]
    fn subset_and_disjoint() {
        let g = set(&[(0.0, 1.0), (2.0, 3.0)]);
        assert!(set(&[(0.1, 0.2), (2.5, 3.0)]).is_subset_of(&g));
        assert!(!set(&[(0.9, 1.1)]).is_subset_of(&g));
        assert!(set(&[(1.0, 2.0)]).is_disjoint_from(&g));
        assert!(!set(&[(0.9, 1.1)]).is_disjoint_from(&g));
    }

    #[test]
    fn remove_window_splits() {
        let f = set(&[(0.0, 1.0)]);
        let r = f.remove_window(0.25, 0.5);
        assert_eq!(r.to_pairs(), vec![[0.0, 0.25], [0.5, 1.0]]);
        assert_eq!(f.remove_window(-1.0, 2.0).measure(), 0.0);
    }

    #[test]
    fn json_is_pair_array() {
        let f = set(&[(2.0, 3.0), (0.0, 1.0)]);
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(s, "[[0.0,1.0],[2.0,3.0]]");
        let back: FiniteOpenSet = serde_json::from_str("[[2,3],[0,1],[0.5,1]]").unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<FiniteOpenSet>("[[1,0]]").is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn raw_intervals() -> impl Strategy<Value = Vec<Interval>> {
            prop::collection::vec((-50i32..50, 1i32..20), 0..8).prop_map(|v| {
                v.into_iter()
                    .map(|(a, len)| {
                        let a = a as f64 / 4.0;
                        Interval::new(a, a + len as f64 / 4.0).unwrap()
                    })
                    .collect()
            })
        }

        proptest! {
            #[test]
            fn normalize_idempotent(raw in raw_intervals()) {
                let once = FiniteOpenSet::normalize(raw);
                let twice = FiniteOpenSet::normalize(once.intervals().to_vec());
                prop_assert_eq!(&once, &twice);
                prop_assert!(FiniteOpenSet::from_canonical(once.intervals().to_vec()).is_ok());
            }

            #[test]
            fn inclusion_exclusion(p in raw_intervals(), q in raw_intervals()) {
                let f = FiniteOpenSet::normalize(p);
                let g = FiniteOpenSet::normalize(q);
                let lhs = f.measure() + g.measure();
                let rhs = f.union(&g).measure() + f.intersection(&g).measure();
                prop_assert!((lhs - rhs).abs() < 1e-12);
                // quarter-integer endpoints: midpoints of a 1/8 grid decide membership exactly
                let oracle = grid_measure(-60.0, 60.0, 960, |x| f.contains(x) || g.contains(x))
                    + grid_measure(-60.0, 60.0, 960, |x| f.contains(x) && g.contains(x));
                prop_assert!((rhs - oracle).abs() < 1e-9);
            }
        }
    }
}
