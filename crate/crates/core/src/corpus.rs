//! Seeded random inputs for the property checks.
//!
//! Every case draws from its own ChaCha stream, indexed by `(family, case)`,
//! so a corpus can be generated in parallel and still be byte-for-byte
//! reproducible from the seed alone.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::FiniteOpenSet;

/// Stream families; keeps corpora for different checks independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Family {
    Oracle = 1,
    LevelSet = 2,
    SteinWeiss = 3,
    Whitney = 4,
}

/// Generator for case `index` of `family`.
pub fn case_rng(seed: u64, family: Family, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((family as u64) << 40) | index);
    rng
}

/// Up to `max_components` intervals, placed left to right from `-10` with
/// gaps and lengths uniform in `[0.01, 3)`.
pub fn separated_set(rng: &mut impl Rng, max_components: usize) -> FiniteOpenSet {
    let n = rng.random_range(1..=max_components.max(1));
    let mut t = -10.0;
    let mut pairs = Vec::with_capacity(n);
    for _ in 0..n {
        t += rng.random_range(0.01..3.0);
        let len = rng.random_range(0.01..3.0);
        pairs.push((t, t + len));
        t += len;
    }
    FiniteOpenSet::from_pairs(&pairs).expect("increasing pairs")
}

/// Union of up to `max_components` intervals with left ends in `[-20, 20)`
/// and lengths in `[0.01, 4)`; overlapping draws merge.
pub fn scattered_set(rng: &mut impl Rng, max_components: usize) -> FiniteOpenSet {
    let n = rng.random_range(1..=max_components.max(1));
    let pairs: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            let a = rng.random_range(-20.0..20.0);
            (a, a + rng.random_range(0.01..4.0))
        })
        .collect();
    FiniteOpenSet::from_pairs(&pairs).expect("finite pairs")
}

/// `(F, x, ε)` for the closed form against quadrature.
pub fn oracle_case(seed: u64, index: u64) -> (FiniteOpenSet, f64, f64) {
    let mut rng = case_rng(seed, Family::Oracle, index);
    let f = scattered_set(&mut rng, 8);
    let x = rng.random_range(-30.0..30.0);
    let eps = rng.random_range(1e-3..5.0);
    (f, x, eps)
}

/// `(F, λ)` with `λ` uniform in `[lo, hi)`.
pub fn level_case(seed: u64, index: u64, lo: f64, hi: f64) -> (FiniteOpenSet, f64) {
    let mut rng = case_rng(seed, Family::LevelSet, index);
    let f = separated_set(&mut rng, 8);
    (f, rng.random_range(lo..hi))
}

pub fn stein_weiss_case(seed: u64, index: u64) -> FiniteOpenSet {
    separated_set(&mut case_rng(seed, Family::SteinWeiss, index), 8)
}

/// Like [`separated_set`] but with every endpoint on the grid `2^-16 ℤ`, so
/// that cells down to depth 30 are exactly representable.
pub fn dyadic_set(rng: &mut impl Rng, max_components: usize) -> FiniteOpenSet {
    const UNIT: f64 = 1.0 / 65536.0;
    let ticks = |rng: &mut dyn rand::RngCore| rng.random_range(655..196_608u32) as f64 * UNIT;
    let n = rng.random_range(1..=max_components.max(1));
    let mut t = -10.0;
    let mut pairs = Vec::with_capacity(n);
    for _ in 0..n {
        t += ticks(rng);
        let len = ticks(rng);
        pairs.push((t, t + len));
        t += len;
    }
    FiniteOpenSet::from_pairs(&pairs).expect("increasing pairs")
}

pub fn whitney_case(seed: u64, index: u64) -> FiniteOpenSet {
    dyadic_set(&mut case_rng(seed, Family::Whitney, index), 8)
}
