//! Trigonometric polynomials whose partial sums are large on a prescribed
//! finite open set, built from the sublevel set of the conjugate kernel.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::oscillating::{fejer_from_half, OscillatingIndicator, Phase};
use super::special::{ci, si};
use super::trig::ComplexTrigPolynomial;
use crate::error::{invalid, Error, Result};
use crate::hilbert::bare_hilbert_indicator;
use crate::level_set::{sublevel_set, LevelBound, Normalization};
use crate::sets::FiniteOpenSet;

/// Limit on δ halvings before the shrunken set is declared unusable.
const MAX_SHRINK_HALVINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct KkConfig {
    /// Initial shrink; halved until the margin on `F` is positive.
    pub delta: Option<f64>,
    pub m_start: u64,
    pub m_budget: u64,
    /// Allowed change of `S_m(x, ·)` on the grid when `f_m`, `g_m` are
    /// replaced by their Fejér means.
    pub approx_tol: f64,
    pub max_degree: u64,
    pub grid_per_component: usize,
    pub inset: f64,
}

impl Default for KkConfig {
    fn default() -> Self {
        Self {
            delta: None,
            m_start: 16,
            m_budget: 1 << 14,
            approx_tol: 0.05,
            max_degree: 1 << 22,
            grid_per_component: 64,
            inset: 1e-6,
        }
    }
}

impl KkConfig {
    fn validate(&self) -> Result<()> {
        if let Some(d) = self.delta {
            if !(d > 0.0) || !d.is_finite() {
                return Err(invalid("delta", format!("must be positive, got {d}")));
            }
        }
        if self.m_start == 0 || self.m_budget < self.m_start {
            return Err(invalid("m_budget", "need 1 ≤ m_start ≤ m_budget"));
        }
        if !(self.approx_tol > 0.0) {
            return Err(invalid("approx_tol", "must be positive"));
        }
        if self.grid_per_component == 0 || !(self.inset > 0.0) {
            return Err(invalid("grid", "need a positive grid size and inset"));
        }
        Ok(())
    }
}

/// `(c_k + δ, a_k - δ)` for every component `(c_k, a_k)`.
pub fn shrink_set(e: &FiniteOpenSet, delta: f64) -> Result<FiniteOpenSet> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(invalid("delta", format!("must be positive, got {delta}")));
    }
    let shortest = e.iter().map(|iv| iv.len()).fold(f64::INFINITY, f64::min);
    if !(delta < 0.5 * shortest) {
        return Err(invalid(
            "delta",
            format!("{delta} is not below half the shortest component {shortest}"),
        ));
    }
    let pairs: Vec<(f64, f64)> = e
        .iter()
        .map(|iv| (iv.a() + delta, iv.b() - delta))
        .collect();
    FiniteOpenSet::from_pairs(&pairs)
}

/// Half of the smaller of a quarter of the shortest component of `E` and a
/// quarter of the shortest gap from a left end `c_k` to `F`.
pub fn default_delta(e: &FiniteOpenSet, f: &FiniteOpenSet) -> f64 {
    let shortest = e.iter().map(|iv| iv.len()).fold(f64::INFINITY, f64::min);
    let gap = e
        .iter()
        .filter_map(|iv| {
            f.iter()
                .filter(|g| g.b() <= iv.a())
                .map(|g| iv.a() - g.b())
                .fold(None, |acc: Option<f64>, d| {
                    Some(acc.map_or(d, |a| a.min(d)))
                })
        })
        .fold(f64::INFINITY, f64::min);
    0.5 * (shortest / 4.0).min(gap / 4.0)
}

/// Points of every component of `F`: `per` interior samples plus both ends
/// moved inwards by `inset`.
pub fn verification_grid(f: &FiniteOpenSet, per: usize, inset: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for iv in f.iter() {
        let d = inset.min(0.25 * iv.len());
        out.push(iv.a() + d);
        out.extend(iv.interior_samples(per));
        out.push(iv.b() - d);
    }
    out
}

fn grid_spacing(f: &FiniteOpenSet, per: usize, inset: f64) -> f64 {
    f.iter()
        .map(|iv| {
            let g = verification_grid(&FiniteOpenSet::single(iv.a(), iv.b()).unwrap(), per, inset);
            g.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MSearchRow {
    pub m: u64,
    /// `min_x (|S*_m(x, f_m)| - (πλ/2)|sin mx|)` over the grid.
    pub margin_f: f64,
    /// `min_x (|S*_m(x, g_m)| - (πλ/2)|cos mx|)`.
    pub margin_g: f64,
    /// `max_x |S*_m(x, f_m) + (2/π²) H1_Ẽ(x) cos mx|`, distance to the
    /// limit predicted by the mean-value relation.
    pub limit_defect: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KkGridRow {
    pub x: f64,
    pub s_star_f: f64,
    pub s_star_g: f64,
    pub max_partial_sum: f64,
    pub argmax_m: u64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KkConstruction {
    pub f: FiniteOpenSet,
    pub alpha: f64,
    /// `ln(π/α)`.
    pub lambda: f64,
    pub e: FiniteOpenSet,
    /// `| |E| - (π - α) |`.
    pub e_measure_defect: f64,
    pub delta: f64,
    pub delta_halvings: usize,
    pub e_shrunk: FiniteOpenSet,
    /// `min (H1_Ẽ - λ)` over the grid, bare kernel.
    pub shrink_margin: f64,
    pub dist_shrunk_f: f64,
    pub m_table: Vec<MSearchRow>,
    pub m: u64,
    /// Some `m` met both `(πλ/2)` conditions.
    pub m_search_satisfied: bool,
    pub degree: u64,
    /// `max_x |S_m(x, σ_N f_m) - S_m(x, f_m)|`, same for `g_m`.
    pub approx_error: f64,
    #[serde(skip)]
    pub p: ComplexTrigPolynomial,
    pub grid: Vec<KkGridRow>,
    /// `πλ/3`.
    pub bound: f64,
    /// `min_x max_{1 ≤ m ≤ deg} |S_m(x, P)|`.
    pub min_max_partial_sum: f64,
    pub min_margin: f64,
    pub grid_spacing: f64,
    /// `Σ |k| |c_k|`, a Lipschitz constant of every `S_m(·, P)`.
    pub lipschitz: f64,
    /// Grid margin minus `lipschitz · spacing / 2`.
    pub interval_margin: f64,
    pub pass: bool,
}

fn star_margins(
    e_shrunk: &FiniteOpenSet,
    grid: &[f64],
    h: &[f64],
    m: u64,
    lambda: f64,
) -> Result<(MSearchRow, Vec<(f64, f64)>)> {
    let f = OscillatingIndicator::new(e_shrunk.clone(), m, Phase::Sin)?;
    let g = OscillatingIndicator::new(e_shrunk.clone(), m, Phase::Cos)?;
    let mf = m as f64;
    let rows: Vec<(f64, f64, f64, f64, f64)> = grid
        .par_iter()
        .zip(h)
        .map(|(&x, &hx)| {
            let sf = f.modified_partial_sum(m, x);
            let sg = g.modified_partial_sum(m, x);
            let mf_ = sf.abs() - 0.5 * PI * lambda * (mf * x).sin().abs();
            let mg_ = sg.abs() - 0.5 * PI * lambda * (mf * x).cos().abs();
            let lim = (sf + 2.0 / (PI * PI) * hx * (mf * x).cos()).abs();
            (sf, sg, mf_, mg_, lim)
        })
        .collect();
    let row = MSearchRow {
        m,
        margin_f: rows.iter().map(|r| r.2).fold(f64::INFINITY, f64::min),
        margin_g: rows.iter().map(|r| r.3).fold(f64::INFINITY, f64::min),
        limit_defect: rows.iter().map(|r| r.4).fold(0.0, f64::max),
    };
    Ok((row, rows.iter().map(|r| (r.0, r.1)).collect()))
}

/// `Σ_{|k| ≤ m} |k| c_k e^{ikx}`, the Fejér defect of `S_m` times `N + 1`.
fn weighted_partial_sum(half: &[Complex64], m: usize, x: f64) -> f64 {
    let mut s = 0.0;
    for (k, c) in half.iter().enumerate().take(m + 1).skip(1) {
        s += 2.0 * k as f64 * (c * Complex64::cis(k as f64 * x)).re;
    }
    s
}

/// Pipeline for `F ⊂ [0, π]` with `max F - min F ≤ π`.
pub fn kk_construct(f: &FiniteOpenSet, config: KkConfig) -> Result<KkConstruction> {
    config.validate()?;
    let (lo, hi) = match (f.min(), f.max()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::EmptySet),
    };
    if lo < 0.0 || hi > PI {
        return Err(invalid("F", format!("[{lo}, {hi}] must lie in [0, π]")));
    }
    let alpha = f.measure();
    if !(alpha < PI) {
        return Err(invalid("F", format!("|F| = {alpha} must be below π")));
    }
    let lambda = (PI / alpha).ln();
    let bound = LevelBound::new(lambda, Normalization::Bare)?;
    let level = sublevel_set(f, bound)?;
    let e = level.e.clone();
    let e_measure_defect = (e.measure() - (PI - alpha)).abs();
    if e.min().unwrap() < -PI {
        return Err(invalid("F", "sublevel set leaves [-π, π]"));
    }

    let grid = verification_grid(f, config.grid_per_component, config.inset);
    let mut delta = config.delta.unwrap_or_else(|| default_delta(&e, f));
    let mut halvings = 0;
    let (e_shrunk, shrink_margin, h) = loop {
        if let Ok(s) = shrink_set(&e, delta) {
            let h: Vec<f64> = grid
                .iter()
                .map(|&x| bare_hilbert_indicator(&s, x))
                .collect();
            let margin = h.iter().map(|v| v - lambda).fold(f64::INFINITY, f64::min);
            if margin > 0.0 {
                break (s, margin, h);
            }
        }
        halvings += 1;
        if halvings > MAX_SHRINK_HALVINGS {
            return Err(Error::Resolution {
                context: "no shrink keeps H1 above λ on the grid".into(),
            });
        }
        delta *= 0.5;
    };
    let dist_shrunk_f = e_shrunk
        .iter()
        .flat_map(|a| f.iter().map(move |b| (b.a() - a.b()).max(a.a() - b.b())))
        .fold(f64::INFINITY, f64::min);

    let mut m_table = Vec::new();
    let mut chosen: Option<(u64, Vec<(f64, f64)>)> = None;
    let mut best: Option<(f64, u64, Vec<(f64, f64)>)> = None;
    let mut m = config.m_start;
    while m <= config.m_budget {
        let (row, vals) = star_margins(&e_shrunk, &grid, &h, m, lambda)?;
        let score = row.margin_f.min(row.margin_g);
        m_table.push(row);
        if score > 0.0 {
            chosen = Some((m, vals));
            break;
        }
        if best.as_ref().is_none_or(|b| score > b.0) {
            best = Some((score, m, vals));
        }
        m = m.saturating_mul(2);
    }
    let m_search_satisfied = chosen.is_some();
    let (m, stars) = chosen.unwrap_or_else(|| {
        let (_, m, v) = best.expect("at least one m is tried");
        (m, v)
    });

    let fm = OscillatingIndicator::new(e_shrunk.clone(), m, Phase::Sin)?;
    let gm = OscillatingIndicator::new(e_shrunk.clone(), m, Phase::Cos)?;
    let mu = m as usize;
    let cf = fm.fourier_coefficients(m);
    let cg = gm.fourier_coefficients(m);
    let defect: f64 = grid
        .par_iter()
        .map(|&x| {
            weighted_partial_sum(&cf, mu, x)
                .abs()
                .max(weighted_partial_sum(&cg, mu, x).abs())
        })
        .reduce(|| 0.0, f64::max);
    let mut degree = 2 * m;
    while defect / (degree + 1) as f64 > config.approx_tol {
        degree *= 2;
        if degree > config.max_degree {
            return Err(Error::Budget {
                what: "Fejér degree",
                best_margin: config.approx_tol - defect / (config.max_degree + 1) as f64,
            });
        }
    }
    let approx_error = defect / (degree + 1) as f64;
    let p = fejer_from_half(&fm.fourier_coefficients(degree))
        .add(&fejer_from_half(&gm.fourier_coefficients(degree)).scale(Complex64::new(0.0, 1.0)));

    let target = PI * lambda / 3.0;
    let sums: Vec<(f64, u64)> = grid
        .par_iter()
        .map(|&x| p.max_partial_sum(x, degree))
        .collect();
    let rows: Vec<KkGridRow> = grid
        .iter()
        .zip(&stars)
        .zip(&sums)
        .map(|((&x, &(sf, sg)), &(v, am))| KkGridRow {
            x,
            s_star_f: sf,
            s_star_g: sg,
            max_partial_sum: v,
            argmax_m: am,
            bound: target,
        })
        .collect();
    let min_max_partial_sum = sums.iter().map(|s| s.0).fold(f64::INFINITY, f64::min);
    let min_margin = min_max_partial_sum - target;
    let spacing = grid_spacing(f, config.grid_per_component, config.inset);
    let lipschitz = p.derivative_bound();
    Ok(KkConstruction {
        f: f.clone(),
        alpha,
        lambda,
        e,
        e_measure_defect,
        delta,
        delta_halvings: halvings,
        e_shrunk,
        shrink_margin,
        dist_shrunk_f,
        m_table,
        m,
        m_search_satisfied,
        degree,
        approx_error,
        p,
        grid: rows,
        bound: target,
        min_max_partial_sum,
        min_margin,
        grid_spacing: spacing,
        lipschitz,
        interval_margin: min_margin - 0.5 * lipschitz * spacing,
        pass: min_margin >= 0.0 && e_measure_defect <= 1e-8,
    })
}

/// Pieces of `F` of diameter at most `π`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KkSplit {
    pub first: FiniteOpenSet,
    pub second: Option<FiniteOpenSet>,
}

pub fn kk_split(f: &FiniteOpenSet) -> Result<KkSplit> {
    let (lo, hi) = match (f.min(), f.max()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::EmptySet),
    };
    if hi - lo <= PI {
        return Ok(KkSplit {
            first: f.clone(),
            second: None,
        });
    }
    let ivs = f.intervals();
    for i in 0..ivs.len() - 1 {
        let (a, b) = ivs.split_at(i + 1);
        let da = a[a.len() - 1].b() - a[0].a();
        let db = b[b.len() - 1].b() - b[0].a();
        if da <= PI && db <= PI {
            return Ok(KkSplit {
                first: FiniteOpenSet::from_canonical(a.to_vec())?,
                second: Some(FiniteOpenSet::from_canonical(b.to_vec())?),
            });
        }
    }
    Err(invalid(
        "F",
        "no split into two pieces of diameter at most π",
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KkCombined {
    pub pieces: Vec<KkConstruction>,
    /// Translation applied to each piece before construction.
    pub shifts: Vec<f64>,
    /// Frequency shift of the second polynomial.
    pub modulation: i64,
    #[serde(skip)]
    pub p: ComplexTrigPolynomial,
    pub degree: u64,
    /// `min_x max_{1 ≤ m ≤ deg} |S_m(x, P)|` on each piece's grid.
    pub piece_minima: Vec<f64>,
    pub bound: f64,
    pub pass: bool,
}

/// Splits `F ⊂ [0, 2π)` if needed, builds each piece in `[0, π]` and returns
/// `P = P_1 + e^{inx} P_2`.
pub fn kk_construct_split(f: &FiniteOpenSet, config: KkConfig) -> Result<KkCombined> {
    let split = kk_split(f)?;
    let mut parts = vec![split.first];
    parts.extend(split.second);
    let alpha = f.measure();
    if !(alpha < PI) {
        return Err(invalid("F", format!("|F| = {alpha} must be below π")));
    }
    let mut pieces = Vec::new();
    let mut shifts = Vec::new();
    let mut polys = Vec::new();
    for part in &parts {
        let s = part.min().unwrap();
        let local = part.translate(-s)?;
        let c = kk_construct(&local, config)?;
        polys.push(c.p.translate(s));
        shifts.push(s);
        pieces.push(c);
    }
    let modulation = if polys.len() == 2 {
        (polys[0].degree() + polys[1].degree() + 1) as i64
    } else {
        0
    };
    let p = if polys.len() == 2 {
        polys[0].add(&polys[1].modulate(modulation))
    } else {
        polys[0].clone()
    };
    let degree = p.degree();
    // every piece is held to the bound of the whole set
    let bound = PI * (PI / alpha).ln() / 3.0;
    let piece_minima: Vec<f64> = parts
        .iter()
        .map(|part| {
            verification_grid(part, config.grid_per_component, config.inset)
                .par_iter()
                .map(|&x| p.max_partial_sum(x, degree).0)
                .reduce(|| f64::INFINITY, f64::min)
        })
        .collect();
    let pass = piece_minima.iter().all(|v| *v >= bound)
        && pieces.iter().all(|c| c.e_measure_defect <= 1e-8);
    Ok(KkCombined {
        pieces,
        shifts,
        modulation,
        p,
        degree,
        piece_minima,
        bound,
        pass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    /// `cos(mt) · sign(sin mt)`, mean 0.
    CosSignSin,
    /// `sin(mt) · sign(sin mt) = |sin mt|`, mean `2/π`.
    SinSignSin,
    /// `1`, mean 1.
    Constant,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeanOscillationRow {
    pub m: u64,
    pub value: f64,
    pub limit: f64,
    pub error: f64,
}

/// `∫ 1_base(t)/(x-t) · w(mt) dt` against `(1/2π) ∫ 1_base/(x-t) · ∫ w`.
pub fn mean_oscillation_check(
    base: &FiniteOpenSet,
    x: f64,
    pairing: Pairing,
    m_list: &[u64],
) -> Result<Vec<MeanOscillationRow>> {
    if base.closure_contains(x) {
        return Err(invalid("x", "must lie at positive distance from the base"));
    }
    if m_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("m_list", "must be increasing"));
    }
    let h = bare_hilbert_indicator(base, x);
    let limit = match pairing {
        Pairing::CosSignSin => 0.0,
        Pairing::SinSignSin => 2.0 / PI * h,
        Pairing::Constant => h,
    };
    m_list
        .iter()
        .map(|&m| {
            let value = match pairing {
                Pairing::Constant => h,
                _ => {
                    let osc = OscillatingIndicator::new(base.clone(), m, Phase::Sin)?;
                    let mf = m as f64;
                    let (smx, cmx) = (mf * x).sin_cos();
                    osc.pieces()
                        .into_iter()
                        .map(|(a, b, s)| {
                            let (u1, u2) = (x - b, x - a);
                            let c_int = ci(mf * u2.abs()) - ci(mf * u1.abs());
                            let s_int = si(mf * u2) - si(mf * u1);
                            let w = match pairing {
                                // cos(m(x-u)) = cos mx cos mu + sin mx sin mu
                                Pairing::CosSignSin => cmx * c_int + smx * s_int,
                                // sin(m(x-u)) = sin mx cos mu - cos mx sin mu
                                _ => smx * c_int - cmx * s_int,
                            };
                            s * w
                        })
                        .sum()
                }
            };
            Ok(MeanOscillationRow {
                m,
                value,
                limit,
                error: (value - limit).abs(),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::quadrature::integrate;

    #[test]
    fn shrink_examples() {
        let e = FiniteOpenSet::single(-1.0, 0.0).unwrap();
        let s = shrink_set(&e, 0.1).unwrap();
        assert_eq!(s.to_pairs(), vec![[-0.9, -0.1]]);
        assert!(shrink_set(&e, 0.5).is_err());
        assert!(shrink_set(&e, 0.0).is_err());

        // F = (0,1), λ = ln 2 gives E = (-1, 0); a small shrink keeps H1 > λ at 0.5
        let f = FiniteOpenSet::single(0.0, 1.0).unwrap();
        let level =
            sublevel_set(&f, LevelBound::new(2f64.ln(), Normalization::Bare).unwrap()).unwrap();
        let t = shrink_set(&level.e, 0.01).unwrap();
        assert!(bare_hilbert_indicator(&t, 0.5) > 2f64.ln());
        let dist = f.min().unwrap() - t.max().unwrap();
        assert!(dist >= 0.01);
    }

    #[test]
    fn split_examples() {
        let small = FiniteOpenSet::single(0.2, 0.5).unwrap();
        assert!(kk_split(&small).unwrap().second.is_none());
        let wide = FiniteOpenSet::from_pairs(&[(0.1, 0.2), (3.5, 3.6)]).unwrap();
        let s = kk_split(&wide).unwrap();
        assert_eq!(s.first.to_pairs(), vec![[0.1, 0.2]]);
        assert_eq!(s.second.unwrap().to_pairs(), vec![[3.5, 3.6]]);
    }

    #[test]
    fn mean_oscillation_examples() {
        let base = FiniteOpenSet::single(-0.9, -0.1).unwrap();
        let ms = [16, 64, 256, 1024];
        let cos = mean_oscillation_check(&base, 0.5, Pairing::CosSignSin, &ms).unwrap();
        let sin = mean_oscillation_check(&base, 0.5, Pairing::SinSignSin, &ms).unwrap();
        assert!(cos[3].error < cos[0].error && cos[3].error < 0.01);
        assert!(sin[3].error < sin[0].error && sin[3].error < 0.01);
        let c = mean_oscillation_check(&base, 0.5, Pairing::Constant, &ms).unwrap();
        assert!(c.iter().all(|r| r.error == 0.0));
        // direct quadrature at a small m
        let m = 16.0f64;
        let q = integrate(
            |t| (m * t).cos() * (m * t).sin().signum() / (0.5 - t),
            -0.9,
            -0.1,
            1e-12,
            50_000,
        )
        .unwrap();
        assert!((cos[0].value - q).abs() < 1e-8, "{} vs {q}", cos[0].value);
        assert!(mean_oscillation_check(&base, -0.5, Pairing::Constant, &ms).is_err());
    }

    #[test]
    fn construct_small_budget() {
        let f = FiniteOpenSet::single(0.0, 0.1).unwrap();
        let cfg = KkConfig {
            m_budget: 64,
            grid_per_component: 16,
            ..Default::default()
        };
        let c = kk_construct(&f, cfg).unwrap();
        assert!((c.lambda - (10.0 * PI).ln()).abs() < 1e-15);
        assert!(c.e_measure_defect < 1e-8);
        assert!(c.shrink_margin > 0.0);
        assert!(c.dist_shrunk_f >= c.delta * (1.0 - 1e-12));
        assert_eq!(c.m_table.len(), 3);
        assert!(c.approx_error <= cfg.approx_tol);
        // the partial sums approach the conjugate-kernel limit (2/π²)H1_Ẽ,
        // well short of πλ/3
        assert!(c.min_max_partial_sum > 0.5);
        assert!(c.min_max_partial_sum < c.bound);
        for r in &c.grid {
            assert!((c.p.partial_sum(r.argmax_m, r.x).norm() - r.max_partial_sum).abs() < 1e-9);
        }
    }

    #[test]
    fn split_construction_keeps_low_sums() {
        let f = FiniteOpenSet::from_pairs(&[(0.1, 0.2), (3.5, 3.6)]).unwrap();
        let cfg = KkConfig {
            m_budget: 32,
            grid_per_component: 8,
            ..Default::default()
        };
        let c = kk_construct_split(&f, cfg).unwrap();
        assert_eq!(c.pieces.len(), 2);
        assert!(c.modulation as u64 > c.pieces[0].degree);
        // frequencies of the modulated part start above deg P_1
        let p1 = c.pieces[0].p.translate(c.shifts[0]);
        for x in [0.12, 0.15, 0.19] {
            for m in [1, 5, c.pieces[0].degree] {
                assert!((c.p.partial_sum(m, x) - p1.partial_sum(m, x)).norm() < 1e-9);
            }
        }
        assert!(c.piece_minima.iter().all(|v| v.is_finite() && *v > 0.0));
    }
}
