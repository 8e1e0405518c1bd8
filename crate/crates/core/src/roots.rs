//! Bracketed root finding for monotone functions.
//!
//! Bisection runs on the ordered bit patterns of `f64` rather than on the real
//! line, so every step halves the number of representable floats in the
//! bracket. Roots at any scale (including ones within a few ulps of a bracket
//! end, or many orders of magnitude away from it) are resolved to adjacent
//! floats in at most 64 steps.

use crate::error::{Error, Result};

/// Distance from `|x|` to the next float up.
pub(crate) fn ulp(x: f64) -> f64 {
    let a = x.abs();
    if a == 0.0 {
        return f64::from_bits(1);
    }
    f64::from_bits(a.to_bits() + 1) - a
}

/// Upper bound on bisection steps; the float-ordered search never needs more
/// than 64.
pub const MAX_BISECTION_STEPS: usize = 200;

#[inline]
fn key(x: f64) -> i64 {
    let bits = x.to_bits() as i64;
    if bits < 0 {
        // negative floats: reverse order, and map -0.0 onto +0.0
        -(bits & i64::MAX)
    } else {
        bits
    }
}

#[inline]
fn unkey(k: i64) -> f64 {
    if k < 0 {
        f64::from_bits(((-k) as u64) | (1 << 63))
    } else {
        f64::from_bits(k as u64)
    }
}

/// Float strictly between `lo` and `hi` that splits the float range in half.
#[inline]
pub fn float_midpoint(lo: f64, hi: f64) -> f64 {
    let (a, b) = (key(lo) as i128, key(hi) as i128);
    unkey((a + (b - a) / 2) as i64)
}

/// Finds the crossing of a *decreasing* function `f` through `target` on the
/// open interval `(lo, hi)`.
///
/// Requires `f(lo) > target > f(hi)` in the limiting sense: the ends are never
/// evaluated, so `±∞` singularities at the bracket ends are fine. Returns the
/// float at which `f - target` changes sign, choosing between the final two
/// adjacent candidates the one with the smaller residual.
pub fn solve_decreasing(f: impl Fn(f64) -> f64, target: f64, lo: f64, hi: f64) -> Result<f64> {
    if !(lo < hi) {
        return Err(Error::Bracket { lo, hi });
    }
    let (mut a, mut b) = (lo, hi);
    let mut best = None::<(f64, f64)>;
    for _ in 0..MAX_BISECTION_STEPS {
        let m = float_midpoint(a, b);
        if m == a || m == b {
            break;
        }
        let v = f(m);
        if v.is_nan() {
            return Err(Error::Bracket { lo: a, hi: b });
        }
        let r = (v - target).abs();
        if best.map_or(true, |(_, br)| r < br) {
            best = Some((m, r));
        }
        if v > target {
            a = m;
        } else if v < target {
            b = m;
        } else {
            return Ok(m);
        }
    }
    best.map(|(x, _)| x).ok_or(Error::Bracket { lo, hi })
}

/// Same as [`solve_decreasing`] for an increasing function.
pub fn solve_increasing(f: impl Fn(f64) -> f64, target: f64, lo: f64, hi: f64) -> Result<f64> {
    solve_decreasing(|x| -f(x), -target, lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn key_is_monotone() {
        let xs = [
            -f64::MAX,
            -1.0,
            -f64::MIN_POSITIVE,
            -0.0,
            0.0,
            5e-324,
            1e-300,
            1.0,
            f64::MAX,
        ];
        for w in xs.windows(2) {
            assert!(key(w[0]) <= key(w[1]), "{} {}", w[0], w[1]);
            assert_eq!(unkey(key(w[1])), w[1]);
        }
    }

    #[test]
    fn midpoint_spans_scales() {
        let m = float_midpoint(1e-300, 1.0);
        assert!(m > 1e-300 && m < 1.0);
        // geometric-like split: far below the arithmetic midpoint
        assert!(m < 1e-100);
        let m = float_midpoint(-1.0, 1.0);
        assert!(m.abs() < 1e-300);
    }

    #[test]
    fn solves_tiny_root_far_from_bracket_end() {
        let root = 3e-120;
        let x = solve_decreasing(|x| root - x, 0.0, -1.0, 1.0).unwrap();
        assert!((x - root).abs() <= 1e-135);
    }

    #[test]
    fn solves_square_root() {
        let x = solve_increasing(|x| x * x, 3.0, 0.0, 2.0).unwrap();
        assert!((x - 3f64.sqrt()).abs() <= 4e-16);
    }

    #[test]
    fn ends_are_not_evaluated() {
        // log singularity at both bracket ends
        let f = |x: f64| ((1.0 - x) / x).ln();
        let x = solve_decreasing(f, 0.0, 0.0, 1.0).unwrap();
        assert!((x - 0.5).abs() < 1e-15);
    }

    #[test]
    fn empty_bracket_is_error() {
        assert!(solve_decreasing(|x| -x, 0.0, 1.0, 1.0).is_err());
    }
}
