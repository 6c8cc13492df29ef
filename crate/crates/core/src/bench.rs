//! Experiment harness: single runs, Monte-Carlo studies, sweeps and the
//! published comparison tables.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::activation::ActivationKind;
use crate::elm::{init_elm, InputMap, WeightRange};
use crate::error::{Result, XtfcError};
use crate::problems::{ProblemDefinition, ProblemId};
use crate::solver::{solve, CollocationGrid, GridKind, SolveConfig};
use crate::tfc::{build_ce, ConstrainedExpression, ProjectionCache};

/// Everything needed to reproduce one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub problem: ProblemId,
    pub neurons: usize,
    pub points: Vec<usize>,
    pub activation: ActivationKind,
    pub weight_range: WeightRange,
    #[serde(default)]
    pub input_map: InputMap,
    pub seed: u64,
    pub solve: SolveConfig,
}

impl RunConfig {
    /// The problem's default hyperparameters with the given seed.
    pub fn defaults(problem: ProblemId, seed: u64) -> Self {
        let d = problem.definition().defaults;
        RunConfig {
            problem,
            neurons: d.neurons,
            points: d.points,
            activation: d.activation,
            weight_range: d.weight_range,
            input_map: InputMap::default(),
            seed,
            solve: SolveConfig {
                rcond: None,
                tol: d.tol,
                max_iter: d.max_iter,
            },
        }
    }
}

/// Outcome of one run, flattened for JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub problem: ProblemId,
    pub neurons: usize,
    pub points: Vec<usize>,
    pub activation: ActivationKind,
    pub weight_lo: f64,
    pub weight_hi: f64,
    pub input_map: InputMap,
    pub seed: u64,
    pub tol: f64,
    pub rcond: Option<f64>,
    pub max_iter: usize,
    pub train_max_error: f64,
    pub train_mean_error: f64,
    pub test_max_error: f64,
    pub test_mean_error: f64,
    /// Test max error of each unknown function.
    pub test_max_error_by_output: Vec<f64>,
    pub train_max_residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Seconds spent in the least-squares iterations.
    pub solve_time_s: f64,
    /// Seconds for the whole pipeline.
    pub total_time_s: f64,
}

impl RunReport {
    /// The report with wall-time fields zeroed, for determinism comparisons.
    pub fn without_timings(&self) -> RunReport {
        RunReport {
            solve_time_s: 0.0,
            total_time_s: 0.0,
            ..self.clone()
        }
    }
}

struct ErrorStats {
    max: f64,
    mean: f64,
    max_by_output: Vec<f64>,
}

fn error_stats(
    def: &ProblemDefinition,
    ces: &[ConstrainedExpression],
    betas: &[Vec<f64>],
    grid: &CollocationGrid,
) -> Result<ErrorStats> {
    let zero = vec![0; def.dim()];
    let mut caches: Vec<ProjectionCache> = ces.iter().map(|_| ProjectionCache::new()).collect();
    let mut max_by_output = vec![0.0f64; def.outputs];
    let mut sum = 0.0;
    let mut count = 0usize;
    for x in grid.points() {
        let exact = def.exact(x)?;
        for (o, (ce, beta)) in ces.iter().zip(betas).enumerate() {
            let err = (ce.value_cached(beta, x, &zero, &mut caches[o])? - exact[o]).abs();
            max_by_output[o] = max_by_output[o].max(err);
            sum += err;
            count += 1;
        }
    }
    Ok(ErrorStats {
        max: max_by_output.iter().cloned().fold(0.0, f64::max),
        mean: sum / count.max(1) as f64,
        max_by_output,
    })
}

/// Builds the constrained expressions of `def` for a configuration.
pub fn build_expressions(def: &ProblemDefinition, cfg: &RunConfig) -> Result<Vec<ConstrainedExpression>> {
    let basis = init_elm(cfg.neurons, def.dim(), cfg.weight_range, cfg.seed, cfg.activation)?
        .with_input_map(cfg.input_map, &def.domain)?;
    (0..def.outputs)
        .map(|o| build_ce(&def.constraints(o)?, basis.clone(), &def.domain))
        .collect()
}

/// Runs the full pipeline once: hidden layer, constrained expressions, grid,
/// solve, and errors against the exact solution on the training and test sets.
pub fn run_once(cfg: &RunConfig) -> Result<RunReport> {
    let start = Instant::now();
    let def = cfg.problem.definition();
    let ces = build_expressions(&def, cfg)?;
    let grid = def.make_grid(Some(&cfg.points), GridKind::Uniform)?;
    let out = solve(&def, &ces, &grid, &cfg.solve)?;
    let train = error_stats(&def, &ces, &out.betas, &grid)?;
    let test_grid = def.test_grid(&cfg.points)?;
    let test = error_stats(&def, &ces, &out.betas, &test_grid)?;
    Ok(RunReport {
        problem: cfg.problem,
        neurons: cfg.neurons,
        points: cfg.points.clone(),
        activation: cfg.activation,
        weight_lo: cfg.weight_range.lo,
        weight_hi: cfg.weight_range.hi,
        input_map: cfg.input_map,
        seed: cfg.seed,
        tol: cfg.solve.tol,
        rcond: cfg.solve.rcond,
        max_iter: cfg.solve.max_iter,
        train_max_error: train.max,
        train_mean_error: train.mean,
        test_max_error: test.max,
        test_mean_error: test.mean,
        test_max_error_by_output: test.max_by_output,
        train_max_residual: out.residual_max,
        iterations: out.iterations,
        converged: out.converged,
        solve_time_s: out.solve_time.as_secs_f64(),
        total_time_s: start.elapsed().as_secs_f64(),
    })
}

/// One Monte-Carlo trial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub seed: u64,
    /// `None` when the run failed with an error.
    pub test_max_error: Option<f64>,
    pub test_max_error_by_output: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Histogram bin over `log10(error)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub log10_lo: f64,
    pub log10_hi: f64,
    pub count: usize,
}

/// Width of a histogram bin in decades.
pub const HISTOGRAM_BIN_WIDTH: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Percentiles {
    pub p10: f64,
    pub p25: f64,
    pub median: f64,
    pub p75: f64,
    pub p90: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub problem: ProblemId,
    pub trials: usize,
    pub base_seed: u64,
    pub successes: usize,
    /// Trials that errored or did not converge.
    pub failures: usize,
    pub records: Vec<TrialRecord>,
    pub percentiles: Option<Percentiles>,
    pub histogram: Vec<HistogramBin>,
}

impl McSummary {
    pub fn max_test_errors(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.test_max_error).collect()
    }

    pub fn median(&self) -> Option<f64> {
        self.percentiles.as_ref().map(|p| p.median)
    }

    /// Median of the per-trial iteration counts.
    pub fn median_iterations(&self) -> Option<f64> {
        let mut it: Vec<f64> = self.records.iter().map(|r| r.iterations as f64).collect();
        it.sort_by(f64::total_cmp);
        (!it.is_empty()).then(|| quantile(&it, 0.5))
    }

    /// Median test error of each unknown function.
    pub fn median_by_output(&self) -> Vec<f64> {
        let outputs = self
            .records
            .iter()
            .map(|r| r.test_max_error_by_output.len())
            .max()
            .unwrap_or(0);
        (0..outputs)
            .map(|o| {
                let mut v: Vec<f64> = self
                    .records
                    .iter()
                    .filter_map(|r| r.test_max_error_by_output.get(o).copied())
                    .collect();
                v.sort_by(f64::total_cmp);
                quantile(&v, 0.5)
            })
            .collect()
    }
}

/// Linear-interpolated quantile of sorted data.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

fn histogram(errors: &[f64]) -> Vec<HistogramBin> {
    if errors.is_empty() {
        return Vec::new();
    }
    let bin_of = |e: f64| (e.max(f64::MIN_POSITIVE).log10() / HISTOGRAM_BIN_WIDTH).floor() as i64;
    let bins: Vec<i64> = errors.iter().map(|&e| bin_of(e)).collect();
    let lo = *bins.iter().min().unwrap();
    let hi = *bins.iter().max().unwrap();
    let mut counts = vec![0usize; (hi - lo + 1) as usize];
    for b in bins {
        counts[(b - lo) as usize] += 1;
    }
    counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| {
            let k = lo + i as i64;
            HistogramBin {
                log10_lo: k as f64 * HISTOGRAM_BIN_WIDTH,
                log10_hi: (k + 1) as f64 * HISTOGRAM_BIN_WIDTH,
                count,
            }
        })
        .collect()
}

/// Runs `trials` independent seeds (`cfg.seed + k`) in parallel.
pub fn monte_carlo(cfg: &RunConfig, trials: usize) -> Result<McSummary> {
    if trials == 0 {
        return Err(XtfcError::InvalidArgument("trials must be >= 1".into()));
    }
    let mut records: Vec<TrialRecord> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let seed = cfg.seed.wrapping_add(k as u64);
            let run = RunConfig { seed, ..cfg.clone() };
            match run_once(&run) {
                Ok(r) => TrialRecord {
                    trial: k,
                    seed,
                    test_max_error: Some(r.test_max_error),
                    test_max_error_by_output: r.test_max_error_by_output,
                    iterations: r.iterations,
                    converged: r.converged,
                },
                Err(_) => TrialRecord {
                    trial: k,
                    seed,
                    test_max_error: None,
                    test_max_error_by_output: Vec::new(),
                    iterations: 0,
                    converged: false,
                },
            }
        })
        .collect();
    records.sort_by_key(|r| r.trial);
    let failures = records
        .iter()
        .filter(|r| r.test_max_error.is_none() || !r.converged)
        .count();
    let mut errors: Vec<f64> = records.iter().filter_map(|r| r.test_max_error).collect();
    errors.sort_by(f64::total_cmp);
    let percentiles = (!errors.is_empty()).then(|| Percentiles {
        p10: quantile(&errors, 0.10),
        p25: quantile(&errors, 0.25),
        median: quantile(&errors, 0.50),
        p75: quantile(&errors, 0.75),
        p90: quantile(&errors, 0.90),
    });
    Ok(McSummary {
        problem: cfg.problem,
        trials,
        base_seed: cfg.seed,
        successes: trials - failures,
        failures,
        histogram: histogram(&errors),
        records,
        percentiles,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    /// Points per side, applied to every axis of the grid.
    Points,
    Neurons,
}

impl std::str::FromStr for SweepAxis {
    type Err = XtfcError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "points" => Ok(SweepAxis::Points),
            "neurons" => Ok(SweepAxis::Neurons),
            _ => Err(XtfcError::InvalidArgument(format!("unknown sweep axis `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCurve {
    pub problem: ProblemId,
    pub axis: SweepAxis,
    pub values: Vec<usize>,
    pub trials: usize,
    /// Largest test max error over the trials at each value.
    pub max_errors: Vec<f64>,
    pub median_errors: Vec<f64>,
    pub failures: Vec<usize>,
}

/// Parses `a:b:step` (inclusive), `a:b` (step 1) or a single value.
pub fn parse_values(spec: &str) -> Result<Vec<usize>> {
    let bad = || XtfcError::InvalidArgument(format!("bad value range `{spec}`, expected a:b:step"));
    let parts: Vec<usize> = spec
        .split(':')
        .map(|p| p.trim().parse::<usize>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let (a, b, step) = match parts[..] {
        [a] => (a, a, 1),
        [a, b] => (a, b, 1),
        [a, b, s] => (a, b, s),
        _ => return Err(bad()),
    };
    if step == 0 || b < a {
        return Err(bad());
    }
    Ok((a..=b).step_by(step).collect())
}

/// Monte-Carlo error at each value of the swept hyperparameter.
pub fn sweep(cfg: &RunConfig, axis: SweepAxis, values: &[usize], trials: usize) -> Result<SweepCurve> {
    if values.is_empty() || values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(XtfcError::InvalidArgument(
            "sweep values must be non-empty and strictly increasing".into(),
        ));
    }
    let mut max_errors = Vec::with_capacity(values.len());
    let mut median_errors = Vec::with_capacity(values.len());
    let mut failures = Vec::with_capacity(values.len());
    for &v in values {
        let mut run = cfg.clone();
        match axis {
            SweepAxis::Points => run.points = vec![v; cfg.points.len()],
            SweepAxis::Neurons => run.neurons = v,
        }
        let mc = monte_carlo(&run, trials)?;
        let errs = mc.max_test_errors();
        max_errors.push(errs.iter().cloned().fold(f64::NAN, f64::max));
        median_errors.push(mc.median().unwrap_or(f64::NAN));
        failures.push(mc.failures);
    }
    Ok(SweepCurve {
        problem: cfg.problem,
        axis,
        values: values.to_vec(),
        trials,
        max_errors,
        median_errors,
        failures,
    })
}

/// One row of a training/test error comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub method: String,
    pub train_max_error: Option<f64>,
    pub test_max_error: Option<f64>,
    /// `measured` for this run, `published` for literature constants.
    pub provenance: String,
}

/// Method name with its published train and test maximum errors.
pub type Baseline = (&'static str, Option<f64>, Option<f64>);

/// Published maximum errors for the Poisson benchmarks.
pub fn published_baselines(problem: ProblemId) -> Result<&'static [Baseline]> {
    const PDE1: &[Baseline] = &[
        ("X-TFC (published)", Some(3.8e-13), Some(5.1e-13)),
        ("FEM", Some(2e-8), Some(1.5e-5)),
        ("Lagaris ANN", Some(5e-7), Some(5e-7)),
        ("CNN", None, Some(3.2e-2)),
        ("BNN", None, Some(2.4e-4)),
    ];
    const PDE2: &[Baseline] = &[
        ("X-TFC (published)", Some(6.3e-12), Some(7.6e-12)),
        ("FEM", Some(7e-7), Some(4e-5)),
        ("Lagaris ANN", Some(6e-6), Some(6e-6)),
        ("CNN", None, Some(3e-3)),
    ];
    const PDE3: &[Baseline] = &[
        ("X-TFC (published)", Some(8.8e-11), Some(9.0e-11)),
        ("FEM", Some(6e-7), Some(4e-5)),
        ("Lagaris ANN", Some(1.5e-5), Some(1.5e-5)),
    ];
    match problem {
        ProblemId::Pde1 => Ok(PDE1),
        ProblemId::Pde2 => Ok(PDE2),
        ProblemId::Pde3 => Ok(PDE3),
        other => Err(XtfcError::InvalidArgument(format!(
            "no published baselines for {other}"
        ))),
    }
}

/// The measured run followed by the published constants.
pub fn compare_table(report: &RunReport) -> Result<Vec<CompareRow>> {
    let published = published_baselines(report.problem)?;
    let mut rows = vec![CompareRow {
        method: "X-TFC (this run)".into(),
        train_max_error: Some(report.train_max_error),
        test_max_error: Some(report.test_max_error),
        provenance: "measured".into(),
    }];
    rows.extend(published.iter().map(|&(m, tr, te)| CompareRow {
        method: m.into(),
        train_max_error: tr,
        test_max_error: te,
        provenance: "published".into(),
    }));
    Ok(rows)
}

fn csv_err(e: csv::Error) -> XtfcError {
    XtfcError::Io(e.to_string())
}

pub fn write_compare_csv<W: Write>(rows: &[CompareRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_histogram_csv<W: Write>(summary: &McSummary, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for b in &summary.histogram {
        w.serialize(b).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep_csv<W: Write>(curve: &SweepCurve, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let axis = match curve.axis {
        SweepAxis::Points => "points",
        SweepAxis::Neurons => "neurons",
    };
    w.write_record([axis, "max_error", "median_error", "failures"])
        .map_err(csv_err)?;
    for i in 0..curve.values.len() {
        w.write_record([
            curve.values[i].to_string(),
            format!("{:e}", curve.max_errors[i]),
            format!("{:e}", curve.median_errors[i]),
            curve.failures[i].to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}
