use std::f64::consts::{FRAC_1_PI, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::special::si;
use super::trig::ComplexTrigPolynomial;
use crate::error::{invalid, Result};
use crate::sets::FiniteOpenSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    /// `sign(sin m x)`
    Sin,
    /// `sign(cos m x)`
    Cos,
}

impl Phase {
    /// `2θ` for zeros at `(j + θ)π/m`.
    fn twice_offset(self) -> i128 {
        match self {
            Phase::Sin => 0,
            Phase::Cos => 1,
        }
    }

    /// Sign on `(t_j, t_{j+1})` for even `j`.
    fn base_sign(self) -> f64 {
        match self {
            Phase::Sin => 1.0,
            Phase::Cos => -1.0,
        }
    }
}

/// `1_base(x) · sign(sin m x)` or `1_base(x) · sign(cos m x)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscillatingIndicator {
    base: FiniteOpenSet,
    frequency: u64,
    phase: Phase,
}

/// Interior zeros `t_j`, `first ..= last`, of a component `(p, q)`.
struct Zeros {
    p: f64,
    q: f64,
    first: i64,
    last: i64,
}

impl OscillatingIndicator {
    pub fn new(base: FiniteOpenSet, frequency: u64, phase: Phase) -> Result<Self> {
        if frequency == 0 {
            return Err(invalid("frequency", "must be at least 1"));
        }
        if frequency > 1 << 40 {
            return Err(invalid("frequency", "too large for exact phase reduction"));
        }
        if let (Some(lo), Some(hi)) = (base.min(), base.max()) {
            if lo < -PI || hi > PI {
                return Err(invalid("base", format!("[{lo}, {hi}] leaves [-π, π]")));
            }
        }
        Ok(Self {
            base,
            frequency,
            phase,
        })
    }

    pub fn base(&self) -> &FiniteOpenSet {
        &self.base
    }

    pub fn frequency(&self) -> u64 {
        self.frequency
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn value(&self, x: f64) -> f64 {
        if !self.base.contains(x) {
            return 0.0;
        }
        let t = self.frequency as f64 * x;
        let s = match self.phase {
            Phase::Sin => t.sin(),
            Phase::Cos => t.cos(),
        };
        if s > 0.0 {
            1.0
        } else if s < 0.0 {
            -1.0
        } else {
            0.0
        }
    }

    fn zero_at(&self, j: i64) -> f64 {
        PI * (2 * j as i128 + self.phase.twice_offset()) as f64 / (2 * self.frequency) as f64
    }

    fn sign(&self, j: i64) -> f64 {
        if j.rem_euclid(2) == 0 {
            self.phase.base_sign()
        } else {
            -self.phase.base_sign()
        }
    }

    fn zeros(&self) -> Vec<Zeros> {
        let m = self.frequency as f64;
        let theta = 0.5 * self.phase.twice_offset() as f64;
        self.base
            .iter()
            .map(|iv| {
                let (p, q) = (iv.a(), iv.b());
                let mut first = (p * m / PI - theta).floor() as i64 + 1;
                let mut last = (q * m / PI - theta).ceil() as i64 - 1;
                while self.zero_at(first) <= p {
                    first += 1;
                }
                while self.zero_at(last) >= q {
                    last -= 1;
                }
                Zeros { p, q, first, last }
            })
            .collect()
    }

    /// Constant-sign pieces `(a, b, sign)` in increasing order.
    pub fn pieces(&self) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::new();
        for z in self.zeros() {
            if z.first > z.last {
                let mid = 0.5 * (z.p + z.q);
                out.push((z.p, z.q, self.value(mid)));
                continue;
            }
            out.push((z.p, self.zero_at(z.first), self.sign(z.first - 1)));
            for j in z.first..z.last {
                out.push((self.zero_at(j), self.zero_at(j + 1), self.sign(j)));
            }
            out.push((self.zero_at(z.last), z.q, self.sign(z.last)));
        }
        out
    }

    /// `‖f‖₁ = |base|`.
    pub fn l1_norm(&self) -> f64 {
        self.base.measure()
    }

    /// `S*_m(x, f) = (1/π) ∫ sin m(x-t) / (x-t) f(t) dt`, summed over the
    /// constant-sign pieces with the sine integral.
    pub fn modified_partial_sum(&self, m: u64, x: f64) -> f64 {
        let mf = m as f64;
        let mut sum = 0.0;
        let mut cached: Option<(f64, f64)> = None;
        for (a, b, s) in self.pieces() {
            let sa = match cached {
                Some((t, v)) if t == a => v,
                _ => si(mf * (x - a)),
            };
            let sb = si(mf * (x - b));
            sum += s * (sa - sb);
            cached = Some((b, sb));
        }
        sum * FRAC_1_PI
    }

    /// `ĉ_k = (1/2π) ∫_{-π}^{π} f(t) e^{-ikt} dt`.
    pub fn fourier_coefficient(&self, k: i64) -> Complex64 {
        let zeros = self.zeros();
        self.coefficient_with(&zeros, k)
    }

    fn coefficient_with(&self, zeros: &[Zeros], k: i64) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        if k == 0 {
            let total: f64 = self.pieces().iter().map(|(a, b, s)| s * (b - a)).sum();
            return Complex64::new(total / (2.0 * PI), 0.0);
        }
        let m = self.frequency as i128;
        let kk = k as i128;
        let four_m = 4 * m;
        // e^{-iπ N / (2m)} with N reduced exactly
        let phase = |n: i128| Complex64::cis(-PI * n.rem_euclid(four_m) as f64 / (2 * m) as f64);
        let e = |t: f64| Complex64::cis(-(k as f64) * t);
        let ik = Complex64::new(0.0, k as f64);
        let tw = self.phase.twice_offset();
        let mut total = zero;
        for z in zeros {
            if z.first > z.last {
                let s = self.value(0.5 * (z.p + z.q));
                total += s * (e(z.p) - e(z.q)) / ik;
                continue;
            }
            let e_first = phase(kk * (2 * z.first as i128 + tw));
            let e_last = phase(kk * (2 * z.last as i128 + tw));
            total += self.sign(z.first - 1) * (e(z.p) - e_first) / ik;
            total += self.sign(z.last) * (e_last - e(z.q)) / ik;
            let n = (z.last - z.first) as i128;
            if n > 0 {
                // Σ_{j=first}^{last-1} (-1)^j e^{-ik t_j} = (-1)^first e_first Σ ρ^l, ρ = -e^{-ikπ/m}
                let geometric = if (kk - m).rem_euclid(2 * m) == 0 {
                    Complex64::new(n as f64, 0.0)
                } else {
                    let rho = -phase(2 * kk);
                    let rho_n = if n % 2 == 0 {
                        phase(2 * kk * n)
                    } else {
                        -phase(2 * kk * n)
                    };
                    (1.0 - rho_n) / (1.0 - rho)
                };
                let parity = if z.first.rem_euclid(2) == 0 {
                    1.0
                } else {
                    -1.0
                };
                let segment = (1.0 - phase(2 * kk)) / ik;
                total += self.phase.base_sign() * parity * e_first * geometric * segment;
            }
        }
        total / (2.0 * PI)
    }

    /// `ĉ_k` for `k = 0..=n`; the function is real, so `ĉ_{-k} = conj ĉ_k`.
    pub fn fourier_coefficients(&self, n: u64) -> Vec<Complex64> {
        let zeros = self.zeros();
        (0..=n as i64)
            .map(|k| self.coefficient_with(&zeros, k))
            .collect()
    }

    /// Fejér mean `σ_n f = Σ_{|k| ≤ n} (1 - |k|/(n+1)) ĉ_k e^{ikx}`.
    pub fn fejer_mean(&self, n: u64) -> ComplexTrigPolynomial {
        fejer_from_half(&self.fourier_coefficients(n))
    }
}

/// Fejér weights applied to the band `-n..=n` of a real function.
pub(crate) fn fejer_from_half(half: &[Complex64]) -> ComplexTrigPolynomial {
    let n = half.len() as i64 - 1;
    let w = |k: i64| 1.0 - k.abs() as f64 / (n + 1) as f64;
    let coeffs = (-n..=n)
        .map(|k| {
            let c = if k >= 0 {
                half[k as usize]
            } else {
                half[(-k) as usize].conj()
            };
            c * w(k)
        })
        .collect();
    ComplexTrigPolynomial::from_band(-n, coeffs).expect("finite coefficients")
}
