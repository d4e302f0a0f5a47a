//! `noma-aloha` command-line front end.
//!
//! Exit codes: 0 on success, 1 on runtime or I/O failure, 2 on usage errors.

mod config_file;
mod render;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

pub use config_file::ConfigFile;
pub use render::{flatten, render};

use crate::equilibrium::{mixed_ne, pure_nash_equilibria, verify_epsilon_ne, w_star, EpsilonNeReport, NESolution, PureProfile, MAX_ENUMERATION_PLAYERS};
use crate::error::Error;
use crate::game::{expected_payoff, expected_throughput, GameConfig, MixedStrategy};
use crate::sim::{self, simulate, within_sigmas, SimConfig, SimReport};
use crate::social::{maximize_average_payoff, SocialOptimum};
use crate::sweep::{Column, SweepRow, SweepSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Parser)]
#[command(
    name = "noma-aloha",
    version,
    about = "Nash equilibria, social optimum and Monte Carlo throughput for the NOMA-ALOHA game",
    args_override_self = true
)]
pub struct Cli {
    /// Flat key=value file whose keys mirror the long flags; flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Symmetric mixed equilibrium, its regime and payoffs, and the pure equilibria.
    Solve(SolveArgs),
    /// Average-payoff maximizing strategy and price of anarchy.
    Optimize(SolveArgs),
    /// Check a symmetric profile (default: the equilibrium) for the ε-Nash property.
    Verify(VerifyArgs),
    /// Slotted Monte Carlo simulation with analytic predictions alongside.
    Simulate(SimulateArgs),
    /// Grid sweep over W or K, one CSV row per point.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CostArgs {
    /// Cost of high-power transmission.
    #[arg(long = "cost-h", default_value_t = crate::game::DEFAULT_COST_HIGH)]
    pub cost_h: f64,
    /// Cost of low-power transmission.
    #[arg(long = "cost-l", default_value_t = crate::game::DEFAULT_COST_LOW)]
    pub cost_l: f64,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Write output to this file instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    /// Reward of a successful transmission.
    #[arg(long)]
    pub w: f64,
    /// Number of users.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[command(flatten)]
    pub costs: CostArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub game: SolveArgs,
    /// Probability of H in the profile to check (requires --b).
    #[arg(long, requires = "b")]
    pub a: Option<f64>,
    /// Probability of L in the profile to check (requires --a).
    #[arg(long, requires = "a")]
    pub b: Option<f64>,
    #[arg(long, default_value_t = 1e-9)]
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileSource {
    /// Symmetric mixed equilibrium.
    Ne,
    /// Average-payoff maximizer.
    Opt,
    /// Explicit --a and --b.
    Explicit,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 10.0)]
    pub w: f64,
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[command(flatten)]
    pub costs: CostArgs,
    #[arg(long, value_enum, default_value_t = ProfileSource::Ne)]
    pub profile: ProfileSource,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    /// Slots per replication (accepts 1e6 notation).
    #[arg(long, value_parser = parse_count, default_value_t = sim::DEFAULT_SLOTS)]
    pub slots: u64,
    #[arg(long, value_parser = parse_count, default_value_t = sim::DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = sim::DEFAULT_REPLICATIONS)]
    pub replications: u32,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVar {
    W,
    K,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long = "var", value_enum, default_value_t = SweepVar::W)]
    pub var: SweepVar,
    #[arg(long, default_value_t = 0.0)]
    pub start: f64,
    #[arg(long, default_value_t = 10.0)]
    pub stop: f64,
    #[arg(long, default_value_t = 0.1)]
    pub step: f64,
    /// K values for a K sweep: "2..20" (inclusive) or "2,3,5".
    #[arg(long, default_value = "2..20")]
    pub ks: String,
    /// Fixed reward for a K sweep.
    #[arg(long, default_value_t = 10.0)]
    pub w: f64,
    /// Fixed number of users for a W sweep.
    #[arg(long, default_value_t = 2)]
    pub k: usize,
    #[command(flatten)]
    pub costs: CostArgs,
    /// Comma-separated subset of output columns.
    #[arg(long)]
    pub columns: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

/// Accepts plain integers and exact float notation such as `1e6`.
fn parse_count(s: &str) -> Result<u64, String> {
    if let Ok(n) = s.parse::<u64>() {
        return Ok(n);
    }
    let x: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if x >= 0.0 && x.fract() == 0.0 && x <= u64::MAX as f64 {
        Ok(x as u64)
    } else {
        Err(format!("'{s}' is not a non-negative integer"))
    }
}

fn parse_ks(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("invalid K list '{s}'"));
    if let Some((lo, hi)) = s.split_once("..") {
        let lo: usize = lo.trim().parse().map_err(|_| bad())?;
        let hi: usize = hi.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(bad());
        }
        return Ok((lo..=hi).collect());
    }
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|_| bad()))
        .collect()
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(String),
}

impl CliError {
    fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) => CliError::Runtime(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

/// `solve` output: the equilibrium plus context. Its JSON form parses back
/// into a plain [`NESolution`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveOutput {
    pub game: GameConfig,
    #[serde(flatten)]
    pub solution: NESolution,
    pub p0: f64,
    pub w_star: f64,
    /// Absent when K is too large to enumerate.
    pub pure_equilibria: Option<Vec<PureProfile>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOutput {
    pub game: GameConfig,
    #[serde(flatten)]
    pub optimum: SocialOptimum,
    pub ne_strategy: MixedStrategy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOutput {
    pub game: GameConfig,
    #[serde(flatten)]
    pub report: EpsilonNeReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulateOutput {
    pub game: GameConfig,
    pub profile: ProfileSource,
    pub strategy: MixedStrategy,
    #[serde(flatten)]
    pub report: SimReport,
    pub analytic_throughput: f64,
    /// Simulated throughput within 3 standard errors of the analytic value.
    pub throughput_pass: bool,
    pub analytic_payoff: f64,
    pub payoff_pass: bool,
}

fn game_of(w: f64, k: usize, costs: &CostArgs) -> Result<GameConfig, CliError> {
    Ok(GameConfig::with_costs(k, w, costs.cost_h, costs.cost_l)?)
}

pub fn solve_output(game: &GameConfig) -> SolveOutput {
    let solution = mixed_ne(game);
    let pure_equilibria = (game.k <= MAX_ENUMERATION_PLAYERS)
        .then(|| pure_nash_equilibria(game).map(|l| l.profiles).ok())
        .flatten();
    SolveOutput {
        game: *game,
        p0: solution.strategy.p0(),
        solution,
        w_star: w_star(game),
        pure_equilibria,
    }
}

fn cmd_solve(args: &SolveArgs) -> Result<String, CliError> {
    let game = game_of(args.w, args.k, &args.costs)?;
    Ok(render(&solve_output(&game), args.output.format))
}

fn cmd_optimize(args: &SolveArgs) -> Result<String, CliError> {
    let game = game_of(args.w, args.k, &args.costs)?;
    let out = OptimizeOutput {
        game,
        optimum: maximize_average_payoff(&game),
        ne_strategy: mixed_ne(&game).strategy,
    };
    Ok(render(&out, args.output.format))
}

fn cmd_verify(args: &VerifyArgs) -> Result<String, CliError> {
    let game = game_of(args.game.w, args.game.k, &args.game.costs)?;
    let strategy = match (args.a, args.b) {
        (Some(a), Some(b)) => MixedStrategy::new(a, b)?,
        _ => mixed_ne(&game).strategy,
    };
    let report = verify_epsilon_ne(&strategy, &game, args.epsilon)?;
    Ok(render(&VerifyOutput { game, report }, args.game.output.format))
}

pub fn simulate_output(
    game: &GameConfig,
    source: ProfileSource,
    strategy: MixedStrategy,
    slots: u64,
    seed: u64,
    replications: u32,
) -> Result<SimulateOutput, Error> {
    let config = SimConfig::symmetric(*game, strategy)
        .slots(slots)
        .seed(seed)
        .replications(replications);
    let report = simulate(&config)?;
    let analytic_throughput = expected_throughput(&strategy, game);
    let analytic_payoff = expected_payoff(strategy, &strategy, game);
    Ok(SimulateOutput {
        game: *game,
        profile: source,
        strategy,
        throughput_pass: within_sigmas(
            report.mean_throughput,
            analytic_throughput,
            report.throughput_std_error,
            3.0,
        ),
        payoff_pass: within_sigmas(
            report.mean_payoff,
            analytic_payoff,
            report.mean_payoff_std_error,
            3.0,
        ),
        report,
        analytic_throughput,
        analytic_payoff,
    })
}

fn cmd_simulate(args: &SimulateArgs) -> Result<String, CliError> {
    let game = game_of(args.w, args.k, &args.costs)?;
    let strategy = match args.profile {
        ProfileSource::Ne => mixed_ne(&game).strategy,
        ProfileSource::Opt => maximize_average_payoff(&game).strategy,
        ProfileSource::Explicit => {
            MixedStrategy::new(args.a.unwrap_or(0.0), args.b.unwrap_or(0.0))?
        }
    };
    let out = simulate_output(&game, args.profile, strategy, args.slots, args.seed, args.replications)?;
    Ok(render(&out, args.output.format))
}

pub fn sweep_spec(args: &SweepArgs) -> Result<SweepSpec, CliError> {
    let spec = match args.var {
        SweepVar::W => {
            let base = game_of(args.start.max(0.0), args.k, &args.costs)?;
            SweepSpec::over_reward(base, args.start, args.stop, args.step)
        }
        SweepVar::K => {
            let ks = parse_ks(&args.ks)?;
            let base = game_of(args.w, ks.first().copied().unwrap_or(2).max(2), &args.costs)?;
            SweepSpec::over_players(base, ks)
        }
    };
    match &args.columns {
        None => Ok(spec),
        Some(list) => {
            let cols = list
                .split(',')
                .map(|c| c.parse::<Column>())
                .collect::<Result<Vec<_>, _>>()?;
            Ok(spec.with_columns(cols))
        }
    }
}

fn cmd_sweep(args: &SweepArgs) -> Result<(String, Option<PathBuf>), CliError> {
    let spec = sweep_spec(args)?;
    let rows: Vec<SweepRow> = spec.rows()?;
    let header: Vec<&str> = spec.columns.iter().map(|c| c.name()).collect();
    let cells: Vec<Vec<String>> = rows.iter().map(|r| r.cells(&spec.columns)).collect();
    let records: Vec<serde_json::Map<String, serde_json::Value>> = rows
        .iter()
        .map(|r| {
            let full = serde_json::to_value(r).expect("rows serialize");
            spec.columns
                .iter()
                .map(|c| {
                    let key = match c {
                        Column::W => "w".to_string(),
                        Column::K => "k".to_string(),
                        other => other.name().to_string(),
                    };
                    (c.name().to_string(), full[&key].clone())
                })
                .collect()
        })
        .collect();
    let text = render::render_rows(&header, &cells, &records, args.format);
    Ok((text, args.out.clone()))
}

fn emit(text: &str, out_path: Option<&PathBuf>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out_path {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display()))),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Runtime(format!("cannot write output: {e}"))),
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Solve(a) => emit(&cmd_solve(a)?, a.output.out.as_ref(), stdout),
        Command::Optimize(a) => emit(&cmd_optimize(a)?, a.output.out.as_ref(), stdout),
        Command::Verify(a) => emit(&cmd_verify(a)?, a.game.output.out.as_ref(), stdout),
        Command::Simulate(a) => emit(&cmd_simulate(a)?, a.output.out.as_ref(), stdout),
        Command::Sweep(a) => {
            let (text, out) = cmd_sweep(a)?;
            emit(&text, out.as_ref(), stdout)
        }
    }
}

/// Pulls `--config PATH` out of `args` and splices that file's flags in
/// directly after the subcommand name.
fn expand_config(args: Vec<OsString>) -> Result<Vec<OsString>, CliError> {
    let mut path = None;
    let mut rest = Vec::with_capacity(args.len());
    let mut iter = args.into_iter();
    while let Some(arg) = iter.next() {
        let text = arg.to_string_lossy().into_owned();
        if text == "--config" {
            let value = iter
                .next()
                .ok_or_else(|| CliError::Usage("--config requires a path".into()))?;
            path = Some(PathBuf::from(value));
        } else if let Some(value) = text.strip_prefix("--config=") {
            path = Some(PathBuf::from(value));
        } else {
            rest.push(arg);
        }
    }
    let Some(path) = path else {
        return Ok(rest);
    };

    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::Runtime(format!("cannot read {}: {e}", path.display())))?;
    let file = ConfigFile::parse(&text).map_err(CliError::Usage)?;
    let Some(pos) = rest
        .iter()
        .skip(1)
        .position(|a| !a.to_string_lossy().starts_with('-'))
        .map(|p| p + 1)
    else {
        return Ok(rest);
    };
    let sub = rest[pos].to_string_lossy().into_owned();
    let injected = file.flags_for(&sub).map_err(CliError::Usage)?;
    rest.splice(pos + 1..pos + 1, injected);
    Ok(rest)
}

/// Runs the CLI on `args` (including the program name) and returns the exit code.
pub fn run_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let fail = |e: CliError, stderr: &mut dyn Write| {
        let (CliError::Usage(m) | CliError::Runtime(m)) = &e;
        let _ = writeln!(stderr, "error: {m}");
        e.code()
    };

    let args = match expand_config(args) {
        Ok(a) => a,
        Err(e) => return fail(e, stderr),
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = stderr.write_all(rendered.as_bytes());
                return EXIT_USAGE;
            }
            let _ = stdout.write_all(rendered.as_bytes());
            return EXIT_OK;
        }
    };
    match dispatch(&cli, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => fail(e, stderr),
    }
}

pub fn run() -> i32 {
    run_with(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr())
}
