//! `cdma-lab theory | simulate | compare | replay`.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use cdma_capacity::theory::Spacing;
use cdma_capacity::{sweep, BetaGrid, FixedPointMap, SimulationPlan, SolverConfig, TiePolicy};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::compare::compare;
use crate::manifest::{manifest_path, RunManifest};
use crate::parallel::{self, Workers, WORKERS_ENV};
use crate::tables::{self, COMPARE_HEADER, SUMMARY_HEADER, THEORY_HEADER, TRIAL_HEADER};
use crate::{exit_code, LabError};

#[derive(Debug, Parser)]
#[command(name = "cdma-lab", version, about = "Capacity of the hard-decision noise-free CDMA downlink")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve the saddle point over a grid of loads and write C_inf(beta).
    Theory(TheoryArgs),
    /// Count valid codewords on random instances and write mean/std of C_K.
    Simulate(SimulateArgs),
    /// Join a simulation summary to a theory curve on the effective load.
    Compare(CompareArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolicyArg {
    Strict,
    Inclusive,
}

impl From<PolicyArg> for TiePolicy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Strict => TiePolicy::Strict,
            PolicyArg::Inclusive => TiePolicy::Inclusive,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapArg {
    Cleared,
    Quotient,
}

impl From<MapArg> for FixedPointMap {
    fn from(m: MapArg) -> Self {
        match m {
            MapArg::Cleared => FixedPointMap::Cleared,
            MapArg::Quotient => FixedPointMap::Quotient,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct TheoryArgs {
    #[arg(long, default_value_t = 0.05)]
    pub beta_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub beta_max: f64,
    #[arg(long, default_value_t = 60)]
    pub points: usize,
    /// Logarithmic spacing (the default).
    #[arg(long, conflicts_with = "linear_grid")]
    pub log_grid: bool,
    #[arg(long)]
    pub linear_grid: bool,
    /// Explicit loads; replaces the min/max/points grid.
    #[arg(long = "beta", value_delimiter = ',', num_args = 1..)]
    pub betas: Vec<f64>,
    #[arg(long, default_value_t = 1e-12)]
    pub tolerance: f64,
    #[arg(long, default_value_t = 500)]
    pub max_iterations: u32,
    #[arg(long, default_value_t = 1.0)]
    pub initial_a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub damping: f64,
    #[arg(long, value_enum, default_value_t = MapArg::Cleared)]
    pub map: MapArg,
    /// Start every point from `--initial-a` instead of the previous a*.
    #[arg(long)]
    pub cold_start: bool,
    #[arg(long, short)]
    pub output: PathBuf,
}

impl TheoryArgs {
    fn grid(&self) -> BetaGrid {
        if !self.betas.is_empty() {
            return BetaGrid::Explicit(self.betas.clone());
        }
        BetaGrid::Range {
            min: self.beta_min,
            max: self.beta_max,
            points: self.points,
            spacing: if self.linear_grid {
                Spacing::Linear
            } else {
                Spacing::Logarithmic
            },
        }
    }

    fn solver(&self) -> SolverConfig {
        SolverConfig {
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
            initial_a: self.initial_a,
            damping: self.damping,
            map: self.map.into(),
        }
    }
}

fn parse_workers(s: &str) -> Result<String, String> {
    s.parse::<Workers>().map(|w| w.to_string())
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    /// Number of users K (at most 30).
    #[arg(long)]
    pub users: usize,
    /// Requested loads; each becomes N = round(K/beta).
    #[arg(long = "beta", value_delimiter = ',', num_args = 1.., required = true)]
    pub betas: Vec<f64>,
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Master seed; per-trial seeds are derived from it.
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = PolicyArg::Strict)]
    pub tie_policy: PolicyArg,
    /// `auto` or a thread count. Output does not depend on it.
    #[arg(long, env = WORKERS_ENV, default_value = "auto", value_parser = parse_workers)]
    pub workers: String,
    #[arg(long, short)]
    pub output: PathBuf,
    /// Also write one row per trial here.
    #[arg(long)]
    pub per_trial: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Args, Serialize, Deserialize)]
pub struct CompareArgs {
    #[arg(long)]
    pub theory: PathBuf,
    #[arg(long)]
    pub simulation: PathBuf,
    #[arg(long, short)]
    pub output: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Args)]
struct ReplayArgs {
    manifest: PathBuf,
    /// Write the primary output here instead of the recorded path.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Per-trial output for replayed simulations; dropped when `--output`
    /// is given without it.
    #[arg(long)]
    per_trial: Option<PathBuf>,
}

/// Parses `args`, runs the subcommand, reports errors on stderr and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = dispatch(cli.command);
    if let Err(e) = &result {
        eprintln!("cdma-lab: error: {e}");
    }
    exit_code(&result)
}

fn dispatch(command: Command) -> Result<(), LabError> {
    match command {
        Command::Theory(args) => cmd_theory(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Compare(args) => cmd_compare(&args),
        Command::Replay(args) => cmd_replay(&args),
    }
}

fn to_json<T: Serialize>(value: &T) -> serde_json::Value {
    serde_json::to_value(value).expect("arguments serialise")
}

pub fn cmd_theory(args: &TheoryArgs) -> Result<(), LabError> {
    let curve = sweep(&args.grid(), &args.solver(), !args.cold_start)?;
    tables::write_csv(&args.output, &THEORY_HEADER, &tables::theory_records(&curve))?;
    RunManifest::new("theory", to_json(args), vec![args.output.clone()])
        .write(&manifest_path(&args.output))?;
    let failed = curve.failures().count();
    if failed > 0 {
        return Err(LabError::NonConverged {
            failed,
            total: curve.points.len(),
        });
    }
    Ok(())
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<(), LabError> {
    let workers = args
        .workers
        .parse::<Workers>()
        .map_err(LabError::Usage)?
        .resolve();
    let plan = SimulationPlan::new(
        args.users,
        &args.betas,
        args.trials,
        args.seed,
        args.tie_policy.into(),
    )?;
    let summaries = parallel::run_simulation(&plan, workers)?;

    tables::write_csv(&args.output, &SUMMARY_HEADER, &tables::summary_records(&summaries))?;
    let mut outputs = vec![args.output.clone()];
    if let Some(path) = &args.per_trial {
        tables::write_csv(path, &TRIAL_HEADER, &tables::trial_records(&summaries))?;
        outputs.push(path.clone());
    }
    let mut manifest = RunManifest::new("simulate", to_json(args), outputs);
    manifest.workers_resolved = Some(workers);
    manifest.write(&manifest_path(&args.output))
}

pub fn cmd_compare(args: &CompareArgs) -> Result<(), LabError> {
    let theory = tables::read_theory(&args.theory)?;
    let simulations = tables::read_simulation(&args.simulation)?;
    let rows = compare(&theory, &simulations).map_err(|beta| {
        LabError::input(
            &args.simulation,
            format!("beta_effective {beta} lies outside the theory grid"),
        )
    })?;
    tables::write_csv(&args.output, &COMPARE_HEADER, &tables::comparison_records(&rows))?;
    RunManifest::new("compare", to_json(args), vec![args.output.clone()])
        .write(&manifest_path(&args.output))
}

fn parameters<T: for<'de> Deserialize<'de>>(manifest: &RunManifest, path: &Path) -> Result<T, LabError> {
    serde_json::from_value(manifest.parameters.clone())
        .map_err(|e| LabError::input(path, format!("bad {} parameters: {e}", manifest.command)))
}

fn cmd_replay(args: &ReplayArgs) -> Result<(), LabError> {
    let manifest = RunManifest::read(&args.manifest)?;
    match manifest.command.as_str() {
        "theory" => {
            let mut run: TheoryArgs = parameters(&manifest, &args.manifest)?;
            if let Some(out) = &args.output {
                run.output = out.clone();
            }
            cmd_theory(&run)
        }
        "simulate" => {
            let mut run: SimulateArgs = parameters(&manifest, &args.manifest)?;
            if let Some(out) = &args.output {
                run.output = out.clone();
                run.per_trial = args.per_trial.clone();
            }
            cmd_simulate(&run)
        }
        "compare" => {
            let mut run: CompareArgs = parameters(&manifest, &args.manifest)?;
            if let Some(out) = &args.output {
                run.output = out.clone();
            }
            cmd_compare(&run)
        }
        other => Err(LabError::input(
            &args.manifest,
            format!("unknown command `{other}`"),
        )),
    }
}
