use serde::{Deserialize, Serialize};

use hexset::constructions::{
    thm1_construct, thm1_witness, thm2_construct, thm2_witness, thm2_witness_target,
    DivergenceWitness, ExceptionalSeed, Thm1Config, Thm2Config, DEFAULT_AMBIENT_RADIUS,
};
use hexset::distribution::verify_stein_weiss;
use hexset::hilbert::{bare_hilbert_indicator, default_candidates, truncated_hilbert_indicator};
use hexset::kk::{kk_construct, KkConfig};
use hexset::level_set::{
    sublevel_set, sum_of_roots, verify_bezout, verify_roundtrip, LevelBound, Normalization,
};
use hexset::verify::{self, VerifyConfig};
use hexset::{maximal_hilbert_indicator, FiniteOpenSet, PiecewiseLinearFunction, WhitneyPartition};

use crate::io::{read_input, Artifacts, CliResult, Failure, Table, Versioned};
use crate::{Command, Flags};

pub fn dispatch(command: Command, flags: &Flags) -> CliResult<Artifacts> {
    match command {
        Command::Transform => transform(flags),
        Command::Levelset => levelset(flags),
        Command::SteinWeiss => stein_weiss(flags),
        Command::Whitney => whitney(flags),
        Command::ConstructThm1 => construct_thm1(flags),
        Command::ConstructThm2 => construct_thm2(flags),
        Command::Kk => kk(flags),
        Command::VerifyAll => verify_all(flags),
    }
}

macro_rules! versioned {
    ($($t:ty),*) => {$(
        impl Versioned for $t {
            fn schema(&self) -> Option<u32> {
                self.schema
            }
        }
    )*};
}

versioned!(
    TransformInput,
    LevelsetInput,
    SteinWeissInput,
    WhitneyInput,
    SeedInput,
    KkInput
);

fn config(msg: impl Into<String>) -> Failure {
    Failure::Config(msg.into())
}

// ---------------------------------------------------------------- transform

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransformInput {
    schema: Option<u32>,
    /// Either an open set...
    set: Option<FiniteOpenSet>,
    /// ...or a piecewise-linear function `{nodes, values}`.
    function: Option<PiecewiseLinearFunction>,
    points: Vec<f64>,
    #[serde(default)]
    epsilons: Vec<f64>,
    /// Also report `max_ε |H_ε 1_F(x)|` over the default radii (sets only).
    #[serde(default)]
    maximal: bool,
}

#[derive(Debug, Serialize)]
struct TransformRow {
    x: f64,
    kind: &'static str,
    epsilon: Option<f64>,
    /// `None` where the transform is infinite (an endpoint of the set).
    value: Option<f64>,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn transform(flags: &Flags) -> CliResult<Artifacts> {
    let input: TransformInput = read_input(flags.input.as_deref())?;
    let norm = flags.normalization(Normalization::Pi);
    let scale = match norm {
        Normalization::Pi => 1.0,
        Normalization::Bare => std::f64::consts::PI,
    };
    let mut rows = Vec::new();
    match (&input.set, &input.function) {
        (Some(set), None) => {
            for &x in &input.points {
                let full = bare_hilbert_indicator(set, x) / std::f64::consts::PI * scale;
                rows.push(TransformRow {
                    x,
                    kind: "full",
                    epsilon: None,
                    value: finite(full),
                });
                for &eps in &input.epsilons {
                    let v = truncated_hilbert_indicator(set, x, eps)? * scale;
                    rows.push(TransformRow {
                        x,
                        kind: "truncated",
                        epsilon: Some(eps),
                        value: Some(v),
                    });
                }
                if input.maximal {
                    let candidates = default_candidates(set, x);
                    let v = maximal_hilbert_indicator(set, x, &candidates)? * scale;
                    rows.push(TransformRow {
                        x,
                        kind: "maximal",
                        epsilon: None,
                        value: Some(v),
                    });
                }
            }
        }
        (None, Some(f)) => {
            if input.maximal {
                return Err(config("`maximal` is only available for sets"));
            }
            for &x in &input.points {
                let v = f.hilbert(x, 0.0).ok().map(|v| v * scale);
                rows.push(TransformRow {
                    x,
                    kind: "full",
                    epsilon: None,
                    value: v,
                });
                for &eps in &input.epsilons {
                    let v = f.hilbert(x, eps)? * scale;
                    rows.push(TransformRow {
                        x,
                        kind: "truncated",
                        epsilon: Some(eps),
                        value: Some(v),
                    });
                }
            }
        }
        _ => return Err(config("exactly one of `set` and `function` is required")),
    }
    #[derive(Serialize)]
    struct Report<'a> {
        normalization: Normalization,
        rows: &'a [TransformRow],
    }
    let table = Table::new("transform.csv", &["x", "kind", "epsilon", "value"], &rows)?;
    Ok(Artifacts::new(
        "transform",
        &Report {
            normalization: norm,
            rows: &rows,
        },
        true,
    )?
    .with_table(table))
}

// ----------------------------------------------------------------- levelset

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LevelsetInput {
    schema: Option<u32>,
    set: FiniteOpenSet,
    lambda: f64,
}

const PROFILE_SAMPLES: usize = 512;

fn levelset(flags: &Flags) -> CliResult<Artifacts> {
    let input: LevelsetInput = read_input(flags.input.as_deref())?;
    let norm = flags.normalization(Normalization::Bare);
    let measure_tol = flags.tolerance(1e-8)?;
    let bezout_tol = flags.tolerance(1e-9)?;
    let c = sublevel_set(&input.set, LevelBound::new(input.lambda, norm)?)?;
    let bezout = verify_bezout(&c);
    let (sum, formula) = sum_of_roots(&c);
    let roundtrip = verify_roundtrip(&c);
    let pass = c.is_interlaced()
        && c.measure_defect() <= measure_tol
        && bezout <= bezout_tol
        && roundtrip.pass;

    #[derive(Serialize)]
    struct Report<'a> {
        normalization: Normalization,
        lambda: f64,
        mu: f64,
        f: &'a FiniteOpenSet,
        roots: &'a [f64],
        e: &'a FiniteOpenSet,
        measure_f: f64,
        measure_e: f64,
        predicted_measure: f64,
        measure_defect: f64,
        root_defect: f64,
        bezout_residual: f64,
        sum_of_roots: f64,
        sum_of_roots_formula: f64,
        roundtrip: &'a hexset::level_set::RoundtripReport,
    }
    let report = Report {
        normalization: norm,
        lambda: c.bound.lambda,
        mu: c.bound.mu,
        f: &c.f,
        roots: &c.roots,
        e: &c.e,
        measure_f: c.f.measure(),
        measure_e: c.e.measure(),
        predicted_measure: c.predicted_measure(),
        measure_defect: c.measure_defect(),
        root_defect: c.root_defect(),
        bezout_residual: bezout,
        sum_of_roots: sum,
        sum_of_roots_formula: formula,
        roundtrip: &roundtrip,
    };

    let intervals: Vec<(usize, f64, f64, f64, f64)> =
        c.f.iter()
            .zip(c.e.iter())
            .enumerate()
            .map(|(k, (f, e))| (k + 1, e.a(), e.b(), f.a(), f.b()))
            .collect();
    let (lo, hi) = (c.e.min().unwrap_or(0.0), c.f.max().unwrap_or(1.0));
    let pad = 0.25 * (hi - lo);
    let profile: Vec<(f64, Option<f64>, f64)> = (0..PROFILE_SAMPLES)
        .map(|i| {
            let x = lo - pad + (hi - lo + 2.0 * pad) * i as f64 / (PROFILE_SAMPLES - 1) as f64;
            (x, finite(norm.transform(&c.e, x)), c.bound.lambda)
        })
        .collect();
    Ok(Artifacts::new("levelset", &report, pass)?
        .with_table(Table::new(
            "levelset.csv",
            &["k", "e_start", "e_end", "f_start", "f_end"],
            &intervals,
        )?)
        .with_table(Table::new(
            "profile.csv",
            &["x", "h1_e", "lambda"],
            &profile,
        )?))
}

// -------------------------------------------------------------- stein-weiss

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SteinWeissInput {
    schema: Option<u32>,
    set: FiniteOpenSet,
    lambdas: Option<Vec<f64>>,
}

fn stein_weiss(flags: &Flags) -> CliResult<Artifacts> {
    let input: SteinWeissInput = read_input(flags.input.as_deref())?;
    let tol = flags.tolerance(1e-6)?;
    let grid = input.lambdas.unwrap_or_else(verify::stein_weiss_grid);
    let r = verify_stein_weiss(&input.set, &grid)?;
    let pass = r.max_relative_error <= tol;
    let rows: Vec<(f64, f64, f64, f64)> = (0..r.lambda_grid.len())
        .map(|i| {
            (
                r.lambda_grid[i],
                r.exact_measures[i],
                r.stein_weiss_values[i],
                r.relative_errors[i],
            )
        })
        .collect();
    #[derive(Serialize)]
    struct Report<'a> {
        set: &'a FiniteOpenSet,
        tolerance: f64,
        #[serde(flatten)]
        report: &'a hexset::distribution::DistributionReport,
    }
    let report = Report {
        set: &input.set,
        tolerance: tol,
        report: &r,
    };
    Ok(
        Artifacts::new("stein-weiss", &report, pass)?.with_table(Table::new(
            "stein_weiss.csv",
            &["lambda", "exact_measure", "stein_weiss", "rel_error"],
            &rows,
        )?),
    )
}

// ------------------------------------------------------------------ whitney

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WhitneyInput {
    schema: Option<u32>,
    set: FiniteOpenSet,
    depth: Option<u32>,
}

fn whitney(flags: &Flags) -> CliResult<Artifacts> {
    let input: WhitneyInput = read_input(flags.input.as_deref())?;
    let depth = flags.depth.or(input.depth).unwrap_or(6);
    let w = WhitneyPartition::new(&input.set, depth)?;
    let report = w.verify();
    let rows: Vec<_> = w
        .cells()
        .iter()
        .map(|c| {
            (
                c.start,
                c.end,
                c.component,
                c.level,
                format!("{:?}", c.side).to_lowercase(),
                c.weight,
            )
        })
        .collect();
    #[derive(Serialize)]
    struct Report<'a> {
        set: &'a FiniteOpenSet,
        depth: u32,
        cells: usize,
        report: &'a hexset::sets::WhitneyReport,
    }
    let out = Report {
        set: &input.set,
        depth,
        cells: rows.len(),
        report: &report,
    };
    Ok(
        Artifacts::new("whitney", &out, report.pass)?.with_table(Table::new(
            "whitney.csv",
            &["start", "end", "component", "level", "side", "weight"],
            &rows,
        )?),
    )
}

// ------------------------------------------------------------ constructions

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeedInput {
    schema: Option<u32>,
    points: Vec<f64>,
    radius: Option<f64>,
    lambda: Option<f64>,
    eta: Option<f64>,
    delta: Option<f64>,
    depth: Option<u32>,
    whitney_depth: Option<u32>,
}

impl SeedInput {
    fn seed(&self) -> CliResult<ExceptionalSeed> {
        Ok(ExceptionalSeed::around(
            self.points.clone(),
            self.radius.unwrap_or(DEFAULT_AMBIENT_RADIUS),
        )?)
    }

    fn depth(&self, flags: &Flags, default: usize) -> CliResult<usize> {
        match flags.depth.or(self.depth) {
            None => Ok(default),
            Some(0) => Err(config("depth must be at least 1")),
            Some(d) => Ok(d as usize),
        }
    }
}

fn witness_table(witnesses: &[DivergenceWitness]) -> CliResult<Table> {
    let rows: Vec<_> = witnesses
        .iter()
        .flat_map(|w| {
            (0..w.values.len()).map(move |n| {
                (
                    w.x,
                    n + 1,
                    w.epsilon_sequence[n],
                    w.values[n],
                    w.a_bounds.get(n).copied(),
                    w.b_counts.get(n).copied(),
                    w.certified_lower.get(n).copied(),
                )
            })
        })
        .collect();
    Table::new(
        "witness.csv",
        &[
            "x",
            "stage",
            "epsilon",
            "value",
            "a_bound",
            "b_count",
            "certified_lower",
        ],
        &rows,
    )
}

fn construct_thm1(flags: &Flags) -> CliResult<Artifacts> {
    let input: SeedInput = read_input(flags.input.as_deref())?;
    if input.eta.is_some() || input.delta.is_some() {
        return Err(config("`eta` and `delta` apply to construct-thm2 only"));
    }
    let defaults = Thm1Config::default();
    let cfg = Thm1Config {
        depth: input.depth(flags, defaults.depth)?,
        lambda: input.lambda.unwrap_or(defaults.lambda),
        normalization: flags.normalization(defaults.normalization),
        whitney_depth: input.whitney_depth.unwrap_or(defaults.whitney_depth),
    };
    let c = thm1_construct(&input.seed()?, cfg)?;
    let witnesses = c
        .seed
        .points()
        .iter()
        .map(|&x| thm1_witness(&c, x))
        .collect::<hexset::Result<Vec<_>>>()?;
    let pass = c.pass() && witnesses.iter().all(|w| w.pass);
    #[derive(Serialize)]
    struct Report<'a> {
        config: Thm1Config,
        construction: &'a hexset::constructions::Thm1Construction,
        witnesses: &'a [DivergenceWitness],
    }
    let report = Report {
        config: cfg,
        construction: &c,
        witnesses: &witnesses,
    };
    Ok(Artifacts::new("construct-thm1", &report, pass)?.with_table(witness_table(&witnesses)?))
}

fn construct_thm2(flags: &Flags) -> CliResult<Artifacts> {
    let input: SeedInput = read_input(flags.input.as_deref())?;
    if input.lambda.is_some() {
        return Err(config("`lambda` applies to construct-thm1 only"));
    }
    let defaults = Thm2Config::default();
    let cfg = Thm2Config {
        depth: input.depth(flags, defaults.depth)?,
        eta: input.eta.unwrap_or(defaults.eta),
        normalization: flags.normalization(defaults.normalization),
        whitney_depth: input.whitney_depth.unwrap_or(defaults.whitney_depth),
        delta: input.delta.unwrap_or(defaults.delta),
    };
    let c = thm2_construct(&input.seed()?, cfg)?;
    let witnesses = c
        .seed
        .points()
        .iter()
        .map(|&x| thm2_witness(&c, x))
        .collect::<hexset::Result<Vec<_>>>()?;
    let target = thm2_witness_target(cfg.depth);
    let pass = c.pass() && c.continuous && witnesses.iter().all(|w| w.pass);
    let nodes: Vec<(f64, f64)> =
        c.f.nodes()
            .iter()
            .copied()
            .zip(c.f.values().iter().copied())
            .collect();
    #[derive(Serialize)]
    struct Report<'a> {
        config: Thm2Config,
        target: f64,
        construction: &'a hexset::constructions::Thm2Construction,
        witnesses: &'a [DivergenceWitness],
    }
    let report = Report {
        config: cfg,
        target,
        construction: &c,
        witnesses: &witnesses,
    };
    Ok(Artifacts::new("construct-thm2", &report, pass)?
        .with_table(witness_table(&witnesses)?)
        .with_table(Table::new("f.csv", &["x", "f"], &nodes)?))
}

// ----------------------------------------------------------------------- kk

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct KkInput {
    schema: Option<u32>,
    set: FiniteOpenSet,
    /// Expected `|F|`; checked, not used.
    alpha: Option<f64>,
    delta: Option<f64>,
    m_budget: Option<u64>,
    /// Approximation tolerance for the Fejér step.
    tol: Option<f64>,
}

fn kk(flags: &Flags) -> CliResult<Artifacts> {
    let input: KkInput = read_input(flags.input.as_deref())?;
    if let Some(alpha) = input.alpha {
        let m = input.set.measure();
        if !((m - alpha).abs() <= 1e-12 * alpha.abs().max(1.0)) {
            return Err(config(format!("alpha = {alpha} but |F| = {m}")));
        }
    }
    let defaults = KkConfig::default();
    let cfg = KkConfig {
        delta: input.delta,
        m_budget: input.m_budget.unwrap_or(defaults.m_budget),
        approx_tol: match flags.tol {
            Some(_) => flags.tolerance(defaults.approx_tol)?,
            None => input.tol.unwrap_or(defaults.approx_tol),
        },
        ..defaults
    };
    let c = kk_construct(&input.set, cfg)?;
    let rows: Vec<_> = c
        .grid
        .iter()
        .map(|r| (r.x, r.max_partial_sum, r.argmax_m, r.bound))
        .collect();
    let pass = c.pass;
    Ok(Artifacts::new("kk", &c, pass)?.with_table(Table::new(
        "kk.csv",
        &["x", "max_partial_sum", "argmax_m", "bound"],
        &rows,
    )?))
}

// --------------------------------------------------------------- verify-all

fn verify_all(flags: &Flags) -> CliResult<Artifacts> {
    if flags.input.is_some() {
        return Err(config("verify-all takes no input; use --seed"));
    }
    let report = verify::verify_all(VerifyConfig {
        seed: flags.seed,
        ..Default::default()
    });
    let rows: Vec<_> = report
        .identities
        .iter()
        .map(|s| {
            let cmp = serde_json::to_value(s.comparison)
                .ok()
                .and_then(|v| v.as_str().map(str::to_owned));
            (
                &s.name,
                s.cases,
                s.worst,
                s.tolerance,
                cmp,
                s.failures,
                s.pass,
            )
        })
        .collect();
    let table = Table::new(
        "verify_all.csv",
        &[
            "identity",
            "cases",
            "worst",
            "tolerance",
            "comparison",
            "failures",
            "pass",
        ],
        &rows,
    )?;
    Ok(Artifacts::new("verify-all", &report, report.pass)?.with_table(table))
}
