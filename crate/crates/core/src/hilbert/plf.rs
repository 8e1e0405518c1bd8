//! Continuous piecewise-linear functions with compact support and their
//! (truncated) Hilbert transforms.

use std::f64::consts::FRAC_1_PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Linear interpolation between `(nodes[i], values[i])`; zero outside
/// `[nodes[0], nodes[n-1]]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPlf")]
pub struct PiecewiseLinearFunction {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawPlf {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawPlf> for PiecewiseLinearFunction {
    type Error = Error;
    fn try_from(r: RawPlf) -> Result<Self> {
        Self::new(r.nodes, r.values)
    }
}

/// `ln(1+u)/u - 1`, accurate for small `u`.
fn ln1p_ratio_minus_one(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        u * (-0.5 + u * (1.0 / 3.0 - u * 0.25))
    } else {
        u.ln_1p() / u - 1.0
    }
}

/// `∫_p^q f(t)/(x - t) dt` for `f` linear from `fp` at `p` to `fq` at `q`;
/// a principal value when `p < x < q`.
fn piece_integral(x: f64, p: f64, q: f64, fp: f64, fq: f64) -> Result<f64> {
    let df = fq - fp;
    if x > q {
        let u = (q - p) / (x - q);
        Ok(fq * u.ln_1p() + df * ln1p_ratio_minus_one(u))
    } else if x < p {
        let w = (q - p) / (p - x);
        Ok(-fp * w.ln_1p() + df * ln1p_ratio_minus_one(w))
    } else if x == p || x == q {
        let fx = if x == p { fp } else { fq };
        if fx != 0.0 {
            return Err(Error::Singular { x });
        }
        Ok(-df)
    } else {
        let l = ((x - p) / (q - x)).ln();
        let fx = fp + df * ((x - p) / (q - p));
        Ok(fx * l - df)
    }
}

impl PiecewiseLinearFunction {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(invalid(
                "values",
                format!("{} values for {} nodes", values.len(), nodes.len()),
            ));
        }
        if nodes.len() < 2 {
            return Err(invalid("nodes", "at least two nodes are required"));
        }
        if let Some(bad) = nodes.iter().chain(&values).find(|v| !v.is_finite()) {
            return Err(invalid("nodes", format!("non-finite entry {bad}")));
        }
        if let Some(i) = nodes.windows(2).position(|w| !(w[0] < w[1])) {
            return Err(invalid(
                "nodes",
                format!("not strictly increasing at index {}", i + 1),
            ));
        }
        Ok(Self { nodes, values })
    }

    /// The zero function supported on `[a, b]`.
    pub fn zero(a: f64, b: f64) -> Result<Self> {
        Self::new(vec![a, b], vec![0.0, 0.0])
    }

    /// Trapezoid: 0 at `a`, rising to `h` at `a + up`, flat, falling to 0 at `b`.
    pub fn trapezoid(a: f64, b: f64, up: f64, down: f64, h: f64) -> Result<Self> {
        let (p, q) = (a + up, b - down);
        if !(p < q) {
            return Err(invalid(
                "ramps",
                format!("ramps {up}, {down} overlap on [{a}, {b}]"),
            ));
        }
        Self::new(vec![a, p, q, b], vec![0.0, h, h, 0.0])
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn support(&self) -> (f64, f64) {
        (self.nodes[0], *self.nodes.last().unwrap())
    }

    /// Each linear piece as `(p, q, f(p), f(q))`.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64, f64)> + '_ {
        self.nodes
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(n, v)| (n[0], n[1], v[0], v[1]))
    }

    pub fn eval(&self, t: f64) -> f64 {
        let (lo, hi) = self.support();
        if !(lo..=hi).contains(&t) {
            return 0.0;
        }
        let i = self.nodes.partition_point(|&n| n <= t);
        if i == 0 {
            return self.values[0];
        }
        if i == self.nodes.len() {
            return *self.values.last().unwrap();
        }
        let (p, q) = (self.nodes[i - 1], self.nodes[i]);
        let (fp, fq) = (self.values[i - 1], self.values[i]);
        if t == p {
            return fp;
        }
        fp + (fq - fp) * ((t - p) / (q - p))
    }

    /// Vanishes at both ends of its support, hence is continuous on ℝ.
    pub fn is_continuous(&self) -> bool {
        self.values[0] == 0.0 && *self.values.last().unwrap() == 0.0
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `∫ |f|`, exact.
    pub fn l1_norm(&self) -> f64 {
        self.pieces()
            .map(|(p, q, fp, fq)| {
                let h = q - p;
                if fp * fq >= 0.0 {
                    0.5 * h * (fp.abs() + fq.abs())
                } else {
                    0.5 * h * (fp * fp + fq * fq) / (fp.abs() + fq.abs())
                }
            })
            .sum()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            nodes: self.nodes.clone(),
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }

    pub fn shift(&self, c: f64) -> Result<Self> {
        Self::new(
            self.nodes.iter().map(|n| n + c).collect(),
            self.values.clone(),
        )
    }

    /// Pointwise sum. Both summands must be continuous (zero at their support
    /// ends), so that the sum is again piecewise linear on the merged nodes.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if !self.is_continuous() || !other.is_continuous() {
            return Err(invalid(
                "summand",
                "must vanish at both ends of its support",
            ));
        }
        let mut nodes: Vec<f64> = self.nodes.iter().chain(&other.nodes).copied().collect();
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        let values = nodes
            .iter()
            .map(|&t| self.eval(t) + other.eval(t))
            .collect();
        Self::new(nodes, values)
    }

    /// Sum of many continuous functions in one merge.
    pub fn sum<'a>(items: impl IntoIterator<Item = &'a Self>) -> Result<Self> {
        let items: Vec<&Self> = items.into_iter().collect();
        if items.is_empty() {
            return Err(invalid("summands", "at least one is required"));
        }
        if items.iter().any(|f| !f.is_continuous()) {
            return Err(invalid(
                "summand",
                "must vanish at both ends of its support",
            ));
        }
        let mut nodes: Vec<f64> = items.iter().flat_map(|f| f.nodes.iter().copied()).collect();
        nodes.sort_by(f64::total_cmp);
        nodes.dedup();
        let values = nodes
            .iter()
            .map(|&t| items.iter().map(|f| f.eval(t)).sum())
            .collect();
        Self::new(nodes, values)
    }

    /// `π · H_ε f(x)`: the kernel integral `∫_{|t-x|>ε} f(t)/(x-t) dt`.
    ///
    /// With `ε = 0` this is the principal value, which fails with
    /// [`Error::Singular`] at a node where `f` is nonzero.
    pub fn bare_hilbert(&self, x: f64, eps: f64) -> Result<f64> {
        if !(eps >= 0.0) || !eps.is_finite() {
            return Err(invalid(
                "epsilon",
                format!("must be nonnegative, got {eps}"),
            ));
        }
        if x.is_infinite() {
            return Ok(0.0);
        }
        let (lo, hi) = (x - eps, x + eps);
        if eps > 0.0 && (lo == x || hi == x) {
            return Err(invalid(
                "epsilon",
                format!("{eps:e} is below the float resolution at x = {x}"),
            ));
        }
        let mut total = 0.0;
        for (p, q, fp, fq) in self.pieces() {
            if eps == 0.0 {
                total += piece_integral(x, p, q, fp, fq)?;
                continue;
            }
            let at = |t: f64| fp + (fq - fp) * ((t - p) / (q - p));
            if p < lo {
                let r = q.min(lo);
                let fr = if r == q { fq } else { at(r) };
                total += piece_integral(x, p, r, fp, fr)?;
            }
            if q > hi {
                let l = p.max(hi);
                let fl = if l == p { fp } else { at(l) };
                total += piece_integral(x, l, q, fl, fq)?;
            }
        }
        Ok(total)
    }

    /// `H_ε f(x) = (1/π) ∫_{|t-x|>ε} f(t)/(x-t) dt`.
    pub fn hilbert(&self, x: f64, eps: f64) -> Result<f64> {
        Ok(self.bare_hilbert(x, eps)? * FRAC_1_PI)
    }
}

/// `H_ε f(x)` for a piecewise-linear `f`.
pub fn hilbert_piecewise_linear(f: &PiecewiseLinearFunction, x: f64, eps: f64) -> Result<f64> {
    f.hilbert(x, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::quadrature_oracle_plf;

    fn hat() -> PiecewiseLinearFunction {
        PiecewiseLinearFunction::new(vec![0.0, 1.0], vec![1.0, 0.0]).unwrap()
    }

    fn tent() -> PiecewiseLinearFunction {
        PiecewiseLinearFunction::new(vec![-1.0, 0.5, 2.0], vec![0.0, 1.5, 0.0]).unwrap()
    }

    #[test]
    fn rejects_bad_nodes() {
        assert!(PiecewiseLinearFunction::new(vec![0.0, 0.0], vec![1.0, 1.0]).is_err());
        assert!(PiecewiseLinearFunction::new(vec![0.0], vec![1.0]).is_err());
        assert!(PiecewiseLinearFunction::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(PiecewiseLinearFunction::new(vec![0.0, f64::NAN], vec![1.0, 1.0]).is_err());
        let bad: std::result::Result<PiecewiseLinearFunction, _> =
            serde_json::from_str(r#"{"nodes":[1,0],"values":[0,0]}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn zero_function() {
        let z = PiecewiseLinearFunction::zero(-3.0, 4.0).unwrap();
        for x in [-5.0, 0.0, 4.0, 10.0] {
            assert_eq!(z.hilbert(x, 0.0).unwrap(), 0.0);
            assert_eq!(z.hilbert(x, 0.3).unwrap(), 0.0);
        }
    }

    #[test]
    fn window_covering_support() {
        assert_eq!(hat().hilbert(0.0, 2.0).unwrap(), 0.0);
    }

    #[test]
    fn hat_far_point_matches_oracle() {
        let v = hat().hilbert(5.0, 0.1).unwrap();
        let q = quadrature_oracle_plf(&hat(), 5.0, 0.1).unwrap();
        assert!((v - q).abs() < 1e-8);
        // ∫_0^1 (1-t)/(5-t) dt = 1 - 4 ln(5/4)
        let exact = (1.0 - 4.0 * 1.25f64.ln()) * FRAC_1_PI;
        assert!((v - exact).abs() < 1e-15);
    }

    #[test]
    fn singular_nodes() {
        assert!(matches!(
            hat().hilbert(0.0, 0.0),
            Err(Error::Singular { .. })
        ));
        // zero-valued end node: finite
        let v = hat().hilbert(1.0, 0.0).unwrap();
        assert!((v - FRAC_1_PI).abs() < 1e-15);
        assert!(matches!(
            tent().hilbert(0.5, 0.0),
            Err(Error::Singular { .. })
        ));
        assert!(tent().hilbert(0.5, 1e-3).is_ok());
    }

    #[test]
    fn principal_value_inside_piece() {
        // PV ∫_{-1}^{1} t/(x-t) dt = x ln|(x+1)/(x-1)| - 2
        let f = PiecewiseLinearFunction::new(vec![-1.0, 1.0], vec![-1.0, 1.0]).unwrap();
        for x in [-0.7f64, 0.0, 0.3, 0.99] {
            let exact = x * ((x + 1.0) / (1.0 - x)).ln() - 2.0;
            assert!((f.bare_hilbert(x, 0.0).unwrap() - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn small_window_converges_to_principal_value() {
        let f = tent();
        let x = 1.2;
        let pv = f.hilbert(x, 0.0).unwrap();
        let near = f.hilbert(x, 1e-9).unwrap();
        assert!((pv - near).abs() < 1e-8);
    }

    #[test]
    fn eval_and_norms() {
        let f = tent();
        assert_eq!(f.eval(-2.0), 0.0);
        assert_eq!(f.eval(0.5), 1.5);
        assert!((f.eval(1.25) - 0.75).abs() < 1e-15);
        assert!((f.l1_norm() - 0.5 * 3.0 * 1.5).abs() < 1e-15);
        let s = PiecewiseLinearFunction::new(vec![0.0, 1.0], vec![-1.0, 1.0]).unwrap();
        assert!((s.l1_norm() - 0.5).abs() < 1e-15);
        assert_eq!(f.sup_norm(), 1.5);
    }

    #[test]
    fn sum_is_linear() {
        let f = tent();
        let g = PiecewiseLinearFunction::trapezoid(1.0, 4.0, 0.5, 1.0, 2.0).unwrap();
        let h = f.add(&g).unwrap();
        let h2 = PiecewiseLinearFunction::sum([&f, &g]).unwrap();
        assert_eq!(h, h2);
        for x in [-1.5, 0.1, 1.7, 3.3, 5.0] {
            assert!((h.eval(x) - f.eval(x) - g.eval(x)).abs() < 1e-15);
            let lhs = h.hilbert(x, 0.05).unwrap();
            let rhs = f.hilbert(x, 0.05).unwrap() + g.hilbert(x, 0.05).unwrap();
            assert!((lhs - rhs).abs() < 1e-13);
        }
        assert!(hat().add(&f).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn plfs() -> impl Strategy<Value = PiecewiseLinearFunction> {
            prop::collection::vec((0.05f64..2.0, -3.0f64..3.0), 2..8).prop_map(|v| {
                let mut t = -5.0;
                let mut nodes = Vec::new();
                let mut vals = Vec::new();
                for (i, (d, y)) in v.iter().enumerate() {
                    nodes.push(t);
                    vals.push(if i == 0 || i + 1 == v.len() { 0.0 } else { *y });
                    t += d;
                }
                PiecewiseLinearFunction::new(nodes, vals).unwrap()
            })
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(200))]
            #[test]
            fn closed_form_matches_oracle(f in plfs(), x in -10.0f64..10.0, eps in 0.01f64..2.0) {
                let closed = f.hilbert(x, eps).unwrap();
                let q = quadrature_oracle_plf(&f, x, eps).unwrap();
                prop_assert!((closed - q).abs() <= 1e-7, "{closed} vs {q}");
            }

            #[test]
            fn shift_covariance(f in plfs(), x in -10.0f64..10.0, c in -3.0f64..3.0) {
                let g = f.shift(c).unwrap();
                let a = f.hilbert(x, 0.1).unwrap();
                let b = g.hilbert(x + c, 0.1).unwrap();
                prop_assert!((a - b).abs() <= 1e-10);
            }
        }
    }
}
