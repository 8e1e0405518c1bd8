use std::f64::consts::{FRAC_1_PI, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::special::si_cin;
use crate::error::{invalid, Error, Result};

/// `Σ_k c_k e^{ikx}` over a contiguous band of frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPolynomial", into = "RawPolynomial")]
pub struct ComplexTrigPolynomial {
    lo: i64,
    coeffs: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPolynomial {
    /// `[k, re, im]` for every nonzero coefficient.
    terms: Vec<(i64, f64, f64)>,
}

impl TryFrom<RawPolynomial> for ComplexTrigPolynomial {
    type Error = Error;

    fn try_from(raw: RawPolynomial) -> Result<Self> {
        Self::from_terms(
            raw.terms
                .into_iter()
                .map(|(k, re, im)| (k, Complex64::new(re, im))),
        )
    }
}

impl From<ComplexTrigPolynomial> for RawPolynomial {
    fn from(p: ComplexTrigPolynomial) -> Self {
        RawPolynomial {
            terms: p
                .terms()
                .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
                .map(|(k, c)| (k, c.re, c.im))
                .collect(),
        }
    }
}

/// `e^{iθ}` with `θ = k x`, re-anchored periodically to limit drift.
struct Phasor {
    step: Complex64,
    x: f64,
    k: i64,
    value: Complex64,
}

impl Phasor {
    fn new(x: f64, k: i64) -> Self {
        Self {
            step: Complex64::cis(x),
            x,
            k,
            value: Complex64::cis(k as f64 * x),
        }
    }

    fn advance(&mut self) {
        self.k += 1;
        self.value = if self.k % 64 == 0 {
            Complex64::cis(self.k as f64 * self.x)
        } else {
            self.value * self.step
        };
    }
}

impl ComplexTrigPolynomial {
    pub fn zero() -> Self {
        Self {
            lo: 0,
            coeffs: vec![Complex64::new(0.0, 0.0)],
        }
    }

    /// Coefficients for `k = lo, lo + 1, …`.
    pub fn from_band(lo: i64, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Ok(Self::zero());
        }
        if coeffs
            .iter()
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(invalid("coefficients", "must be finite"));
        }
        Ok(Self { lo, coeffs })
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (i64, Complex64)>) -> Result<Self> {
        let terms: Vec<(i64, Complex64)> = terms.into_iter().collect();
        let Some(lo) = terms.iter().map(|t| t.0).min() else {
            return Ok(Self::zero());
        };
        let hi = terms.iter().map(|t| t.0).max().unwrap();
        let mut coeffs = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for (k, c) in terms {
            coeffs[(k - lo) as usize] += c;
        }
        Self::from_band(lo, coeffs)
    }

    pub fn monomial(k: i64, c: Complex64) -> Self {
        Self {
            lo: k,
            coeffs: vec![c],
        }
    }

    /// `max |k|` over the stored band.
    pub fn degree(&self) -> u64 {
        self.lo.unsigned_abs().max(self.hi().unsigned_abs())
    }

    fn hi(&self) -> i64 {
        self.lo + self.coeffs.len() as i64 - 1
    }

    pub fn coefficient(&self, k: i64) -> Complex64 {
        if k < self.lo || k > self.hi() {
            Complex64::new(0.0, 0.0)
        } else {
            self.coeffs[(k - self.lo) as usize]
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .map(move |(i, c)| (self.lo + i as i64, *c))
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        let mut ph = Phasor::new(x, self.lo);
        let mut sum = Complex64::new(0.0, 0.0);
        for c in &self.coeffs {
            sum += c * ph.value;
            ph.advance();
        }
        sum
    }

    /// `S_m(x, P) = Σ_{|k| ≤ m} c_k e^{ikx}`.
    pub fn partial_sum(&self, m: u64, x: f64) -> Complex64 {
        let m = m.min(i64::MAX as u64) as i64;
        let (lo, hi) = (self.lo.max(-m), self.hi().min(m));
        let mut ph = Phasor::new(x, lo);
        let mut sum = Complex64::new(0.0, 0.0);
        for k in lo..=hi {
            sum += self.coefficient(k) * ph.value;
            ph.advance();
        }
        sum
    }

    /// `max_{1 ≤ m ≤ m_max} |S_m(x, P)|` and the first maximizing `m`.
    pub fn max_partial_sum(&self, x: f64, m_max: u64) -> (f64, u64) {
        let mut sum = self.coefficient(0);
        let (mut best, mut arg) = (f64::NEG_INFINITY, 1);
        let mut plus = Phasor::new(x, 1);
        let mut minus = Phasor::new(-x, 1);
        for m in 1..=m_max.max(1) {
            let k = m as i64;
            sum += self.coefficient(k) * plus.value + self.coefficient(-k) * minus.value;
            plus.advance();
            minus.advance();
            let v = sum.norm();
            if v > best {
                best = v;
                arg = m;
            }
        }
        (best, arg)
    }

    /// `S*_m(x, P) = (1/π) ∫_{-π}^{π} sin m(x-t) / (x-t) P(t) dt`, exact in the
    /// coefficients via sine and cosine integrals.
    pub fn modified_partial_sum(&self, m: u64, x: f64) -> Complex64 {
        let m = m as i64;
        let (a, b) = (x - PI, x + PI);
        let j_lo = (m - self.hi()).min(m + self.lo);
        let j_hi = (m - self.lo).max(m + self.hi());
        let table: Vec<((f64, f64), (f64, f64))> = (j_lo..=j_hi)
            .map(|j| (si_cin(j as f64 * b), si_cin(j as f64 * a)))
            .collect();
        let at = |j: i64| table[(j - j_lo) as usize];
        let mut ph = Phasor::new(x, self.lo);
        let mut sum = Complex64::new(0.0, 0.0);
        for (k, c) in self.terms() {
            let ((sp_b, cp_b), (sp_a, cp_a)) = at(m + k);
            let ((sm_b, cm_b), (sm_a, cm_a)) = at(m - k);
            let re = 0.5 * (sp_b - sp_a + sm_b - sm_a);
            let im = -0.5 * ((cp_b - cm_b) - (cp_a - cm_a));
            sum += c * ph.value * Complex64::new(re, im);
            ph.advance();
        }
        sum * FRAC_1_PI
    }

    pub fn add(&self, other: &Self) -> Self {
        let lo = self.lo.min(other.lo);
        let hi = self.hi().max(other.hi());
        let coeffs = (lo..=hi)
            .map(|k| self.coefficient(k) + other.coefficient(k))
            .collect();
        Self { lo, coeffs }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            lo: self.lo,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// `e^{inx} P(x)`.
    pub fn modulate(&self, n: i64) -> Self {
        Self {
            lo: self.lo + n,
            coeffs: self.coeffs.clone(),
        }
    }

    /// `P(x - s)`.
    pub fn translate(&self, s: f64) -> Self {
        Self {
            lo: self.lo,
            coeffs: self
                .terms()
                .map(|(k, c)| c * Complex64::cis(-(k as f64) * s))
                .collect(),
        }
    }

    /// `Σ |k| |c_k|`, a Lipschitz constant for every partial sum.
    pub fn derivative_bound(&self) -> f64 {
        self.terms()
            .map(|(k, c)| k.unsigned_abs() as f64 * c.norm())
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::quadrature::integrate;
    use proptest::prelude::*;

    fn sample() -> ComplexTrigPolynomial {
        ComplexTrigPolynomial::from_terms([
            (-3, Complex64::new(0.2, -0.1)),
            (0, Complex64::new(1.0, 0.0)),
            (1, Complex64::new(0.0, 0.5)),
            (4, Complex64::new(-0.3, 0.25)),
        ])
        .unwrap()
    }

    #[test]
    fn partial_sums() {
        let p = sample();
        assert_eq!(p.degree(), 4);
        for x in [-2.0, 0.3, 1.7] {
            assert!((p.partial_sum(4, x) - p.eval(x)).norm() < 1e-14);
            assert!((p.partial_sum(100, x) - p.eval(x)).norm() < 1e-14);
            assert_eq!(p.partial_sum(0, x), Complex64::new(1.0, 0.0));
            let s1 = Complex64::new(1.0, 0.0) + Complex64::new(0.0, 0.5) * Complex64::cis(x);
            assert!((p.partial_sum(1, x) - s1).norm() < 1e-15);
            let (best, m) = p.max_partial_sum(x, 4);
            let direct = (1..=4)
                .map(|m| p.partial_sum(m, x).norm())
                .fold(0.0, f64::max);
            assert!((best - direct).abs() < 1e-14);
            assert!((p.partial_sum(m, x).norm() - best).abs() < 1e-14);
        }
    }

    #[test]
    fn monomial_partial_sums_complete_past_degree() {
        let p = ComplexTrigPolynomial::monomial(5, Complex64::new(0.0, 1.0));
        assert_eq!(p.partial_sum(4, 0.3), Complex64::new(0.0, 0.0));
        assert!(
            (p.partial_sum(5, 0.3) - Complex64::new(0.0, 1.0) * Complex64::cis(1.5)).norm() < 1e-15
        );
    }

    #[test]
    fn modulate_and_translate() {
        let p = sample();
        let q = p.modulate(10);
        let t = p.translate(0.4);
        for x in [-1.0, 0.5, 2.5] {
            assert!((q.eval(x) - Complex64::cis(10.0 * x) * p.eval(x)).norm() < 1e-13);
            assert!((t.eval(x) - p.eval(x - 0.4)).norm() < 1e-13);
            // low partial sums never see the shifted band
            assert!((q.partial_sum(5, x)).norm() == 0.0);
        }
    }

    #[test]
    fn serde_roundtrip() {
        let p = sample();
        let s = serde_json::to_string(&p).unwrap();
        let q: ComplexTrigPolynomial = serde_json::from_str(&s).unwrap();
        assert_eq!(
            p.terms().filter(|t| t.1.norm() > 0.0).count(),
            q.terms().filter(|t| t.1.norm() > 0.0).count()
        );
        for x in [0.1, 2.0] {
            assert!((p.eval(x) - q.eval(x)).norm() < 1e-15);
        }
        assert!(serde_json::from_str::<ComplexTrigPolynomial>(r#"{"terms":[],"x":1}"#).is_err());
    }

    fn kernel_quadrature(p: &ComplexTrigPolynomial, m: u64, x: f64) -> Complex64 {
        let mf = m as f64;
        let kern = |t: f64| {
            let u = x - t;
            if u == 0.0 {
                mf
            } else {
                (mf * u).sin() / u
            }
        };
        // split at x so the kernel's peak sits on a node
        let part = |g: &dyn Fn(f64) -> f64| {
            let mut s = 0.0;
            let mut nodes = vec![-PI, PI];
            if x > -PI && x < PI {
                nodes.insert(1, x);
            }
            for w in nodes.windows(2) {
                s += integrate(g, w[0], w[1], 1e-12, 200_000).unwrap();
            }
            s
        };
        let re = part(&|t| kern(t) * p.eval(t).re);
        let im = part(&|t| kern(t) * p.eval(t).im);
        Complex64::new(re, im) * FRAC_1_PI
    }

    #[test]
    fn modified_sum_of_constant() {
        // (1/π)∫ sin(mu)/u over [x-π, x+π]
        let p = ComplexTrigPolynomial::monomial(0, Complex64::new(1.0, 0.0));
        let x: f64 = 0.7;
        let expect = (super::super::special::si(3.0 * (x + PI))
            - super::super::special::si(3.0 * (x - PI)))
            / PI;
        assert!((p.modified_partial_sum(3, x) - Complex64::new(expect, 0.0)).norm() < 1e-15);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn modified_sum_matches_kernel_quadrature(
            m in 1u64..12,
            x in 0.0f64..PI,
            re in proptest::collection::vec(-1.0f64..1.0, 7),
            im in proptest::collection::vec(-1.0f64..1.0, 7),
        ) {
            let p = ComplexTrigPolynomial::from_band(
                -3,
                re.iter().zip(&im).map(|(a, b)| Complex64::new(*a, *b)).collect(),
            ).unwrap();
            let exact = p.modified_partial_sum(m, x);
            let quad = kernel_quadrature(&p, m, x);
            prop_assert!((exact - quad).norm() < 1e-6, "{exact} vs {quad}");
        }
    }
}
