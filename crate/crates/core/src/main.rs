use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use xtfc::bench::{
    compare_table, monte_carlo, parse_values, run_once, sweep, write_compare_csv, write_histogram_csv, write_sweep_csv,
    RunConfig, SweepAxis,
};
use xtfc::{ActivationKind, InputMap, ProblemId, WeightRange, XtfcError};

#[derive(Parser)]
#[command(
    name = "xtfc",
    version,
    about = "Constrained-expression ELM solver for the ODE/PDE benchmark catalog"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one problem and write a JSON report.
    Solve {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Monte-Carlo study over consecutive seeds.
    Mc {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long)]
        out: PathBuf,
        /// Also write the log10 error histogram as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Error as a function of points per side or neuron count.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        axis: SweepAxis,
        /// Inclusive range `a:b:step`.
        #[arg(long)]
        values: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Measured errors next to published baselines (pde1, pde2, pde3).
    Compare {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Problem id: ode1, sode2 or pde1 to pde7.
    #[arg(long)]
    problem: ProblemId,
    /// Hidden neurons (default: the problem's own).
    #[arg(long)]
    neurons: Option<usize>,
    /// Points per axis, comma separated; one value applies to every axis.
    #[arg(long, value_delimiter = ',')]
    points: Option<Vec<usize>>,
    /// Activation: logistic, tanh, sin or gaussian.
    #[arg(long)]
    activation: Option<ActivationKind>,
    /// Seed for the hidden-layer weights and biases.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Sampling interval for weights and biases as `lo,hi`.
    #[arg(long, allow_hyphen_values = true)]
    weight_range: Option<WeightRange>,
    /// Hidden-layer input: `unit` rescales the domain onto [0,1]^n, `raw` uses coordinates as is.
    #[arg(long)]
    input_map: Option<InputMap>,
    /// Gauss-Newton stopping tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Gauss-Newton iteration cap.
    #[arg(long)]
    max_iter: Option<usize>,
    /// Relative singular-value cutoff of the least-squares solve (default: eps * max(rows, cols)).
    #[arg(long)]
    rcond: Option<f64>,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig, XtfcError> {
        let mut cfg = RunConfig::defaults(self.problem, self.seed);
        if let Some(n) = self.neurons {
            cfg.neurons = n;
        }
        if let Some(p) = &self.points {
            let dim = cfg.points.len();
            cfg.points = match p.len() {
                1 => vec![p[0]; dim],
                n if n == dim => p.clone(),
                n => return Err(XtfcError::DimensionMismatch { expected: dim, got: n }),
            };
        }
        if let Some(a) = self.activation {
            cfg.activation = a;
        }
        if let Some(w) = self.weight_range {
            cfg.weight_range = w;
        }
        if let Some(m) = self.input_map {
            cfg.input_map = m;
        }
        if let Some(t) = self.tol {
            cfg.solve.tol = t;
        }
        if let Some(m) = self.max_iter {
            cfg.solve.max_iter = m;
        }
        cfg.solve.rcond = self.rcond;
        cfg.solve.validate()?;
        Ok(cfg)
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, XtfcError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| XtfcError::Io(format!("{}: {e}", path.display())))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), XtfcError> {
    serde_json::to_writer_pretty(create(path)?, value).map_err(|e| XtfcError::Io(e.to_string()))
}

/// Returns whether every solve converged.
fn run(cli: Cli) -> Result<bool, XtfcError> {
    match cli.command {
        Command::Solve { run, out } => {
            let report = run_once(&run.config()?)?;
            write_json(&out, &report)?;
            eprintln!(
                "{}: test max error {:.3e}, {} iteration(s), converged: {}",
                report.problem, report.test_max_error, report.iterations, report.converged
            );
            Ok(report.converged)
        }
        Command::Mc { run, trials, out, csv } => {
            let summary = monte_carlo(&run.config()?, trials)?;
            write_json(&out, &summary)?;
            if let Some(path) = csv {
                write_histogram_csv(&summary, create(&path)?)?;
            }
            eprintln!(
                "{}: {} trials, median test max error {:.3e}, {} failure(s)",
                summary.problem,
                summary.trials,
                summary.median().unwrap_or(f64::NAN),
                summary.failures
            );
            Ok(summary.failures == 0)
        }
        Command::Sweep {
            run,
            axis,
            values,
            trials,
            out,
        } => {
            let curve = sweep(&run.config()?, axis, &parse_values(&values)?, trials)?;
            write_sweep_csv(&curve, create(&out)?)?;
            Ok(curve.failures.iter().all(|&f| f == 0))
        }
        Command::Compare { run, out } => {
            let cfg = run.config()?;
            let report = run_once(&cfg)?;
            let rows = compare_table(&report)?;
            write_compare_csv(&rows, create(&out)?)?;
            Ok(report.converged)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("warning: solve did not converge");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
