//! Sine and cosine integrals.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
/// Below this the power series is used, above it the continued fraction.
const SERIES_LIMIT: f64 = 2.0;
const MAX_TERMS: usize = 200;

fn series(x: f64) -> (f64, f64) {
    // Si = Σ (-1)^k x^{2k+1} / ((2k+1)(2k+1)!), Cin = Σ (-1)^{k+1} x^{2k} / (2k (2k)!)
    let (mut si, mut cin) = (x, 0.0);
    let mut p = x; // x^n / n!
    for n in 2..MAX_TERMS {
        p *= x / n as f64;
        let k = n / 2;
        let term = p / n as f64;
        if n % 2 == 0 {
            cin += if k % 2 == 1 { term } else { -term };
        } else {
            si += if k % 2 == 0 { term } else { -term };
        }
        if n as f64 > x && term < 1e-18 * si.abs() {
            break;
        }
    }
    (si, cin)
}

fn continued_fraction(x: f64) -> (f64, f64) {
    // E1(ix) by modified Lentz; Ci = -Re E1(ix), Si = π/2 + Im E1(ix)
    let tiny = 1e-300;
    let mut b = Complex64::new(1.0, x);
    let mut c = Complex64::new(1.0 / tiny, 0.0);
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 2..MAX_TERMS {
        let a = -(((i - 1) * (i - 1)) as f64);
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).norm() < 1e-16 {
            break;
        }
    }
    h *= Complex64::new(x.cos(), -x.sin());
    let ci = -h.re;
    let si = FRAC_PI_2 + h.im;
    (si, EULER_GAMMA + x.ln() - ci)
}

fn si_cin_nonneg(x: f64) -> (f64, f64) {
    if x == 0.0 {
        (0.0, 0.0)
    } else if x.is_infinite() {
        (FRAC_PI_2, f64::INFINITY)
    } else if x < SERIES_LIMIT {
        series(x)
    } else {
        continued_fraction(x)
    }
}

/// `Si(x) = ∫_0^x sin t / t dt`.
pub fn si(x: f64) -> f64 {
    let (s, _) = si_cin_nonneg(x.abs());
    s.copysign(x)
}

/// `Cin(x) = ∫_0^x (1 - cos t) / t dt`, even and entire.
pub fn cin(x: f64) -> f64 {
    si_cin_nonneg(x.abs()).1
}

/// `(Si(x), Cin(x))` in one pass.
pub fn si_cin(x: f64) -> (f64, f64) {
    let (s, c) = si_cin_nonneg(x.abs());
    (s.copysign(x), c)
}

/// `Ci(x) = γ + ln x - Cin(x)` for `x > 0`.
pub fn ci(x: f64) -> f64 {
    EULER_GAMMA + x.ln() - cin(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::quadrature::integrate;
    use proptest::prelude::*;

    // (x, Si, Ci, Cin) to 18 digits
    #[allow(clippy::excessive_precision)]
    const TABLE: [(f64, f64, f64, f64); 8] = [
        (
            0.5,
            0.493107418043066689,
            -0.177784078806612901,
            0.0618525631482004525,
        ),
        (
            1.0,
            0.946083070367183015,
            0.337403922900968135,
            0.239811742000564726,
        ),
        (
            2.0,
            1.60541297680269485,
            0.422980828774864996,
            0.847382016686613174,
        ),
        (
            2.5,
            1.77852017344382664,
            0.285871196365383495,
            1.20763520041030443,
        ),
        (
            5.0,
            1.54993124494467414,
            -0.190029749656643879,
            2.37668332699227711,
        ),
        (
            10.0,
            1.65834759421887405,
            -0.0454564330044553726,
            2.92525719090003392,
        ),
        (
            100.0,
            1.56222546688905629,
            -0.00514882514261049214,
            5.18753467603223472,
        ),
        (
            1e4,
            1.57089154538596192,
            -0.0000305519167244852127,
            9.78758658879444008,
        ),
    ];

    #[test]
    fn reference_values() {
        for (x, s, c, n) in TABLE {
            assert!((si(x) - s).abs() < 2e-15, "Si({x}) = {}", si(x));
            assert!((ci(x) - c).abs() < 5e-15, "Ci({x}) = {}", ci(x));
            assert!(
                (cin(x) - n).abs() < 5e-15 * n.max(1.0),
                "Cin({x}) = {}",
                cin(x)
            );
            assert_eq!(si(-x), -si(x));
            assert_eq!(cin(-x), cin(x));
        }
    }

    #[test]
    fn limits() {
        assert_eq!(si(0.0), 0.0);
        assert_eq!(cin(0.0), 0.0);
        assert!((si(1e12) - FRAC_PI_2).abs() < 1e-11);
        assert!((si(1e-8) - 1e-8).abs() < 1e-22);
        assert!((cin(1e-4) - (0.25e-8 - 1e-16 / 96.0)).abs() < 1e-24);
    }

    #[test]
    fn continuous_across_the_switch() {
        let below = series(SERIES_LIMIT);
        let above = continued_fraction(SERIES_LIMIT);
        assert!((below.0 - above.0).abs() < 1e-14);
        assert!((below.1 - above.1).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn matches_quadrature(x in 0.01f64..40.0) {
            let s = integrate(|t| if t == 0.0 { 1.0 } else { t.sin() / t }, 0.0, x, 1e-13, 20_000).unwrap();
            let c = integrate(|t| if t == 0.0 { 0.0 } else { (1.0 - t.cos()) / t }, 0.0, x, 1e-13, 20_000).unwrap();
            prop_assert!((si(x) - s).abs() < 1e-11);
            prop_assert!((cin(x) - c).abs() < 1e-11);
        }
    }
}
