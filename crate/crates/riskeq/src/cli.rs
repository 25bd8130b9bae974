//! Command-line interface: one binary with `gadget`, `lift`, `solve`,
//! `verify` and `check` subcommands, all emitting JSON reports that embed the
//! resolved run configuration.
//!
//! Exit codes: `0` success / property passed, `1` property violated or no
//! equilibrium found where one was searched for, `2` usage or input errors.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::BigRational;
use serde::Serialize;
use serde_json::json;

use crate::equilibrium::{
    best_response_dynamics, grid_search, pure_equilibria, support_enumeration_2p, verify,
    DynamicsOutcome, DEFAULT_GRID_BUDGET, DEFAULT_PURE_BUDGET, DEFAULT_SUPPORT_PAIR_CAP,
};
use crate::error::{Error, Result};
use crate::gadgets::{
    crawford, delta_for, fp_counterexample, mbp_solution_to_profile, mbp_to_scheduling,
    sat_assignment_to_profile, sat_game, tdm_to_mbp, three_player_counterexample, CnfFormula,
    MbpInstance, MbpPlayer, TdmInstance,
};
use crate::game::{Game, MixedProfile};
use crate::properties::{self, PropertyReport};
use crate::sampling::random_game;
use crate::scalar::{parse_rational, Mode, Scalar, DEFAULT_TOL};
use crate::scheduling::SchedulingGame;
use crate::valuation::ValuationSpec;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "riskeq", version, about = "Risk-modeling valuations, equilibria and hardness gadgets for finite games")]
struct Cli {
    /// Worker threads for parallel searches (default: available parallelism;
    /// the RISKEQ_WORKERS environment variable overrides this flag).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Construct one of the gadget games.
    Gadget {
        #[command(subcommand)]
        which: GadgetCommand,
    },
    /// Lift a combinatorial solution to a mixed profile.
    Lift {
        #[command(subcommand)]
        which: LiftCommand,
    },
    /// Verify a profile against a game and valuation.
    Verify(VerifyArgs),
    /// Search for equilibria.
    Solve(SolveArgs),
    /// Run a property suite.
    Check(CheckArgs),
}

#[derive(Subcommand, Debug)]
enum GadgetCommand {
    /// The 2x2 cycle game with parameter delta in (0,1).
    Crawford {
        #[arg(long, value_parser = parse_rational_arg)]
        delta: BigRational,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Two-player game whose equilibria encode satisfying assignments.
    Sat {
        #[arg(long)]
        cnf: PathBuf,
        /// Crawford parameter in (0, 1/4]; defaults to the threshold derived
        /// from --valuation.
        #[arg(long, value_parser = parse_rational_arg)]
        delta: Option<BigRational>,
        #[arg(long, value_parser = parse_spec_arg)]
        valuation: Option<ValuationSpec>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// MULTIBALANCED PARTITION instance from a 3-DIMENSIONAL MATCHING file.
    #[command(name = "mbp-from-3dm")]
    MbpFrom3dm {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Scheduling game on two ordered links from an MBP instance.
    SchedFromMbp {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// The fixed three-player two-link game without equilibria.
    ThreePlayer {
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// The appendix two-row game (negated payoffs).
    FpAppendix {
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum LiftCommand {
    /// Mixed profile of the SAT game from a satisfying assignment.
    SatAssignment {
        #[arg(long)]
        cnf: PathBuf,
        /// Bit string, one character per variable ('1' = true).
        #[arg(long)]
        assign: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Equilibrium profile of the MBP scheduling game from a solution subset.
    MbpSolution {
        #[arg(long)]
        mbp: PathBuf,
        /// Comma-separated 1-based row indices.
        #[arg(long)]
        subset: String,
        #[arg(long, value_parser = parse_spec_arg)]
        valuation: ValuationSpec,
        #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
        mode: ModeArg,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(long)]
    game: PathBuf,
    #[arg(long)]
    profile: PathBuf,
    #[arg(long, value_parser = parse_spec_arg)]
    valuation: ValuationSpec,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Arithmetic mode for scheduling games (dense games carry their own).
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SolveArgs {
    #[arg(long, value_enum)]
    method: Method,
    #[arg(long)]
    game: PathBuf,
    #[arg(long, value_parser = parse_spec_arg)]
    valuation: ValuationSpec,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Grid step for --method grid.
    #[arg(long, default_value_t = 0.01)]
    resolution: f64,
    /// Looser acceptance tolerance used by grid verification.
    #[arg(long, default_value_t = 1e-3)]
    grid_tol: f64,
    /// Starting pure profile for --method dynamics (comma-separated).
    #[arg(long)]
    start: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    max_steps: usize,
    /// Support-pair cap for --method support2p.
    #[arg(long, default_value_t = DEFAULT_SUPPORT_PAIR_CAP)]
    cap: usize,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Property name: risk-positivity, e-strict-concavity, conditions-2ab,
    /// two-values-monotonicity, f-identities, embracing-geometric,
    /// crawford-nonexistence, fp-counterexample, moment-formula, mphpn,
    /// wee, optimal-value.
    property: String,
    #[arg(long, value_parser = parse_spec_arg)]
    valuation: Option<ValuationSpec>,
    #[arg(long, value_parser = parse_rational_arg)]
    delta: Option<BigRational>,
    #[arg(long, default_value_t = properties::DEFAULT_SEED)]
    seed: u64,
    #[arg(long, default_value_t = properties::DEFAULT_SAMPLES)]
    samples: usize,
    /// Grid step for grid-based stages.
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Pure,
    Support2p,
    Grid,
    Dynamics,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float,
        }
    }
}

fn parse_rational_arg(s: &str) -> std::result::Result<BigRational, String> {
    parse_rational(s).map_err(|e| e.to_string())
}

fn parse_spec_arg(s: &str) -> std::result::Result<ValuationSpec, String> {
    let text = if Path::new(s).exists() {
        fs::read_to_string(s).map_err(|e| e.to_string())?
    } else {
        s.to_string()
    };
    ValuationSpec::parse(&text).map_err(|e| e.to_string())
}

/// Reproducibility block embedded in every report.
#[derive(Serialize, Debug, Clone)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub valuation: Option<ValuationSpec>,
    pub mode: Option<Mode>,
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub resolution: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support_pair_cap: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    pub inputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

impl RunConfig {
    fn new(command: &str) -> RunConfig {
        RunConfig {
            command: command.to_string(),
            valuation: None,
            mode: None,
            tol: None,
            resolution: None,
            support_pair_cap: None,
            samples: None,
            seed: None,
            workers: None,
            inputs: Vec::new(),
            output: None,
        }
    }
}

fn envelope(config: &RunConfig, result: serde_json::Value) -> serde_json::Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "config": config,
        "result": result,
    })
}

/// Either kind of game file: dense normal form or scheduling weights.
enum LoadedGame {
    Normal(Game),
    Scheduling(SchedulingGame),
}

/// Digs through report envelopes so emitted files stay re-readable whether
/// they hold the raw artifact or a full report around it.
fn unwrap_envelope(value: &serde_json::Value) -> &serde_json::Value {
    let mut v = value;
    loop {
        if let Some(inner) = v.get("result") {
            v = inner;
        } else if let Some(inner) = v.get("profile") {
            v = inner;
        } else {
            return v;
        }
    }
}

fn load_game(path: &Path) -> Result<LoadedGame> {
    let text = fs::read_to_string(path)?;
    let outer: serde_json::Value = serde_json::from_str(&text)?;
    let value = unwrap_envelope(&outer);
    if value.get("omega").is_some() {
        Ok(LoadedGame::Scheduling(SchedulingGame::from_json_value(value)?))
    } else if value.get("costs").is_some() {
        Ok(LoadedGame::Normal(Game::from_json_value(value)?))
    } else {
        Err(Error::Parse(format!(
            "{} is neither a cost-tensor game (costs) nor a scheduling game (omega)",
            path.display()
        )))
    }
}

fn load_profile(path: &Path) -> Result<MixedProfile> {
    let text = fs::read_to_string(path)?;
    let outer: serde_json::Value = serde_json::from_str(&text)?;
    Ok(serde_json::from_value(unwrap_envelope(&outer).clone())?)
}

/// Artifact output (games, instances, profiles): the file holds the raw,
/// directly re-readable JSON; without `-o` the raw artifact goes to stdout.
/// The returned envelope wraps it with the run configuration.
fn emit_artifact(
    config: &RunConfig,
    result: serde_json::Value,
    output: Option<&PathBuf>,
) -> Result<serde_json::Value> {
    let rendered = serde_json::to_string_pretty(&result)?;
    match output {
        Some(path) => fs::write(path, rendered.as_bytes())?,
        None => println!("{rendered}"),
    }
    Ok(envelope(config, result))
}

/// Report output (verify/solve/check): the full envelope with the embedded
/// run configuration is written.
fn emit(
    config: &RunConfig,
    result: serde_json::Value,
    output: Option<&PathBuf>,
) -> Result<serde_json::Value> {
    let doc = envelope(config, result);
    let rendered = serde_json::to_string_pretty(&doc)?;
    match output {
        Some(path) => fs::write(path, rendered.as_bytes())?,
        None => println!("{rendered}"),
    }
    Ok(doc)
}

/// Parses argv, dispatches, and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match execute(argv) {
        Ok((_, code)) => code,
        Err(err) => {
            eprintln!("error: {err}");
            2
        }
    }
}

/// Like [`run`] but returns the emitted report for programmatic use.
pub fn execute<I, T>(argv: I) -> Result<(serde_json::Value, i32)>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| Error::Parse(e.to_string()))?;
    let workers = std::env::var("RISKEQ_WORKERS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .or(cli.workers);
    if let Some(n) = workers {
        // the global pool can only be installed once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match cli.command {
        Command::Gadget { which } => run_gadget(which, workers),
        Command::Lift { which } => run_lift(which, workers),
        Command::Verify(args) => run_verify(args, workers),
        Command::Solve(args) => run_solve(args, workers),
        Command::Check(args) => run_check(args, workers),
    }
}

fn run_gadget(cmd: GadgetCommand, workers: Option<usize>) -> Result<(serde_json::Value, i32)> {
    match cmd {
        GadgetCommand::Crawford { delta, output } => {
            let mut config = RunConfig::new("gadget crawford");
            config.workers = workers;
            config.inputs.push(format!("delta={delta}"));
            config.output = output.as_ref().map(|p| p.display().to_string());
            let game = crawford(&Scalar::Exact(delta))?;
            let doc = emit_artifact(&config, game.to_json_value(), output.as_ref())?;
            Ok((doc, 0))
        }
        GadgetCommand::Sat { cnf, delta, valuation, output } => {
            let mut config = RunConfig::new("gadget sat");
            config.workers = workers;
            config.valuation = valuation.clone();
            config.inputs.push(cnf.display().to_string());
            config.output = output.as_ref().map(|p| p.display().to_string());
            let phi = CnfFormula::parse_dimacs(&fs::read_to_string(&cnf)?)?;
            let delta = match (delta, &valuation) {
                (Some(d), _) => d,
                (None, Some(spec)) => delta_for(spec)?,
                (None, None) => {
                    return Err(Error::InvalidParameter(
                        "gadget sat needs --delta or --valuation to derive one".into(),
                    ))
                }
            };
            config.inputs.push(format!("delta={delta}"));
            let sg = sat_game(&phi, &delta)?;
            let doc = emit_artifact(&config, sg.game.to_json_value(), output.as_ref())?;
            Ok((doc, 0))
        }
        GadgetCommand::MbpFrom3dm { input, output } => {
            let mut config = RunConfig::new("gadget mbp-from-3dm");
            config.workers = workers;
            config.inputs.push(input.display().to_string());
            config.output = output.as_ref().map(|p| p.display().to_string());
            let t = TdmInstance::parse(&fs::read_to_string(&input)?)?;
            let mbp = tdm_to_mbp(&t);
            let doc = emit_artifact(&config, serde_json::to_value(&mbp)?, output.as_ref())?;
            Ok((doc, 0))
        }
        GadgetCommand::SchedFromMbp { input, output } => {
            let mut config = RunConfig::new("gadget sched-from-mbp");
            config.workers = workers;
            config.inputs.push(input.display().to_string());
            config.output = output.as_ref().map(|p| p.display().to_string());
            let value: serde_json::Value = serde_json::from_str(&fs::read_to_string(&input)?)?;
            let mbp = MbpInstance::from_json_value(&value)?;
            let sched = mbp_to_scheduling(&mbp);
            let doc = emit_artifact(&config, sched.game.to_json_value(), output.as_ref())?;
            Ok((doc, 0))
        }
        GadgetCommand::ThreePlayer { output } => {
            let mut config = RunConfig::new("gadget three-player");
            config.workers = workers;
            config.output = output.as_ref().map(|p| p.display().to_string());
            let doc = emit_artifact(&config, three_player_counterexample().to_json_value(), output.as_ref())?;
            Ok((doc, 0))
        }
        GadgetCommand::FpAppendix { output } => {
            let mut config = RunConfig::new("gadget fp-appendix");
            config.workers = workers;
            config.output = output.as_ref().map(|p| p.display().to_string());
            let fp = fp_counterexample();
            let result = json!({
                "game": fp.game.to_json_value(),
                "negated_payoffs": fp.negated_payoffs,
                "opponent_mix": fp.opponent_mix,
            });
            let doc = emit_artifact(&config, result, output.as_ref())?;
            Ok((doc, 0))
        }
    }
}

fn run_lift(cmd: LiftCommand, workers: Option<usize>) -> Result<(serde_json::Value, i32)> {
    match cmd {
        LiftCommand::SatAssignment { cnf, assign, mode, output } => {
            let mut config = RunConfig::new("lift sat-assignment");
            config.workers = workers;
            config.mode = Some(mode.into());
            config.inputs.push(cnf.display().to_string());
            config.inputs.push(format!("assign={assign}"));
            config.output = output.as_ref().map(|p| p.display().to_string());
            let phi = CnfFormula::parse_dimacs(&fs::read_to_string(&cnf)?)?;
            let assignment: Vec<bool> = assign
                .chars()
                .map(|c| match c {
                    '1' => Ok(true),
                    '0' => Ok(false),
                    other => Err(Error::Parse(format!("assignment bit {other:?}"))),
                })
                .collect::<Result<_>>()?;
            let profile = sat_assignment_to_profile(&phi, &assignment, mode.into())?;
            let doc = emit_artifact(&config, serde_json::to_value(&profile)?, output.as_ref())?;
            Ok((doc, 0))
        }
        LiftCommand::MbpSolution { mbp, subset, valuation, mode, tol, output } => {
            let mut config = RunConfig::new("lift mbp-solution");
            config.workers = workers;
            config.valuation = Some(valuation.clone());
            config.mode = Some(mode.into());
            config.tol = Some(tol);
            config.inputs.push(mbp.display().to_string());
            config.inputs.push(format!("subset={subset}"));
            config.output = output.as_ref().map(|p| p.display().to_string());
            let value: serde_json::Value = serde_json::from_str(&fs::read_to_string(&mbp)?)?;
            let inst = MbpInstance::from_json_value(&value)?;
            let rows: Vec<usize> = subset
                .split(',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|e| Error::Parse(format!("bad row index {s:?}: {e}")))
                        .and_then(|i| {
                            if i == 0 {
                                Err(Error::Parse("row indices are 1-based".into()))
                            } else {
                                Ok(i - 1)
                            }
                        })
                })
                .collect::<Result<_>>()?;
            let cert = mbp_solution_to_profile(&inst, &rows, &valuation, mode.into(), tol)?;
            let result = json!({
                "profile": cert.profile,
                "x": cert.x.to_string(),
                "big_m": cert.scheduling.big_m,
                "verdict": cert.report.verdict,
            });
            let doc = emit_artifact(&config, result, output.as_ref())?;
            Ok((doc, 0))
        }
    }
}

fn run_verify(args: VerifyArgs, workers: Option<usize>) -> Result<(serde_json::Value, i32)> {
    let mut config = RunConfig::new("verify");
    config.workers = workers;
    config.valuation = Some(args.valuation.clone());
    config.tol = Some(args.tol);
    config.inputs = vec![args.game.display().to_string(), args.profile.display().to_string()];
    config.output = args.output.as_ref().map(|p| p.display().to_string());
    let profile = load_profile(&args.profile)?;
    let report = match load_game(&args.game)? {
        LoadedGame::Normal(g) => {
            config.mode = Some(g.mode());
            verify(&args.valuation, &g, &profile, args.tol)?
        }
        LoadedGame::Scheduling(g) => {
            config.mode = Some(args.mode.into());
            verify(&args.valuation, &g.eval(args.mode.into()), &profile, args.tol)?
        }
    };
    let code = if report.is_equilibrium() { 0 } else { 1 };
    let doc = emit(&config, serde_json::to_value(&report)?, args.output.as_ref())?;
    Ok((doc, code))
}

fn run_solve(args: SolveArgs, workers: Option<usize>) -> Result<(serde_json::Value, i32)> {
    let mut config = RunConfig::new(&format!("solve {:?}", args.method));
    config.workers = workers;
    config.valuation = Some(args.valuation.clone());
    config.tol = Some(args.tol);
    config.inputs = vec![args.game.display().to_string()];
    config.output = args.output.as_ref().map(|p| p.display().to_string());
    let loaded = load_game(&args.game)?;
    let mode: Mode = match &loaded {
        LoadedGame::Normal(g) => g.mode(),
        LoadedGame::Scheduling(_) => args.mode.into(),
    };
    config.mode = Some(mode);
    let spec = &args.valuation;
    let (result, code) = match args.method {
        Method::Pure => {
            let res = match &loaded {
                LoadedGame::Normal(g) => pure_equilibria(spec, g, args.tol, DEFAULT_PURE_BUDGET)?,
                LoadedGame::Scheduling(g) => {
                    pure_equilibria(spec, &g.eval(mode), args.tol, DEFAULT_PURE_BUDGET)?
                }
            };
            let code = if res.found.is_empty() { 1 } else { 0 };
            (serde_json::to_value(&res)?, code)
        }
        Method::Support2p => {
            config.support_pair_cap = Some(args.cap);
            let g = match &loaded {
                LoadedGame::Normal(g) => g.clone(),
                LoadedGame::Scheduling(g) => g.to_normal_form(mode)?,
            };
            let res = support_enumeration_2p(spec, &g, args.tol, args.cap)?;
            let code = if res.found.is_empty() { 1 } else { 0 };
            (serde_json::to_value(&res)?, code)
        }
        Method::Grid => {
            config.resolution = Some(args.resolution);
            let res = match &loaded {
                LoadedGame::Normal(g) => {
                    grid_search(spec, g, args.resolution, args.grid_tol, DEFAULT_GRID_BUDGET, &[])?
                }
                LoadedGame::Scheduling(g) => grid_search(
                    spec,
                    &g.eval(mode),
                    args.resolution,
                    args.grid_tol,
                    DEFAULT_GRID_BUDGET,
                    &[],
                )?,
            };
            let code = if res.found.is_empty() { 1 } else { 0 };
            (serde_json::to_value(&res)?, code)
        }
        Method::Dynamics => {
            let start: Vec<usize> = match &args.start {
                Some(text) => text
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<usize>()
                            .map_err(|e| Error::Parse(format!("bad start index {s:?}: {e}")))
                    })
                    .collect::<Result<_>>()?,
                None => match &loaded {
                    LoadedGame::Normal(g) => vec![0; g.num_players()],
                    LoadedGame::Scheduling(g) => vec![0; g.n],
                },
            };
            config.inputs.push(format!("start={start:?}"));
            let report = match &loaded {
                LoadedGame::Normal(g) => {
                    best_response_dynamics(spec, g, &start, args.max_steps)?
                }
                LoadedGame::Scheduling(g) => {
                    best_response_dynamics(spec, &g.eval(mode), &start, args.max_steps)?
                }
            };
            let code = match report.outcome {
                DynamicsOutcome::Converged { .. } => 0,
                _ => 1,
            };
            (serde_json::to_value(&report)?, code)
        }
    };
    let doc = emit(&config, result, args.output.as_ref())?;
    Ok((doc, code))
}

fn run_check(args: CheckArgs, workers: Option<usize>) -> Result<(serde_json::Value, i32)> {
    let mut config = RunConfig::new(&format!("check {}", args.property));
    config.workers = workers;
    config.valuation = args.valuation.clone();
    config.tol = Some(args.tol);
    config.samples = Some(args.samples);
    config.seed = Some(args.seed);
    config.resolution = Some(args.step);
    config.output = args.output.as_ref().map(|p| p.display().to_string());
    if let Some(d) = &args.delta {
        config.inputs.push(format!("delta={d}"));
    }

    let need_spec = |args: &CheckArgs| -> Result<ValuationSpec> {
        args.valuation
            .clone()
            .ok_or_else(|| Error::InvalidParameter("this check needs --valuation".into()))
    };
    // roots force float arithmetic; everything else stays exact
    let natural_mode = |spec: &ValuationSpec| match spec {
        ValuationSpec::SdRisk { .. } | ValuationSpec::NuPower { .. } | ValuationSpec::Combo { .. } => {
            Mode::Float
        }
        _ => Mode::Exact,
    };

    let report: PropertyReport = match args.property.as_str() {
        "risk-positivity" => {
            let spec = need_spec(&args)?;
            let mode = natural_mode(&spec);
            let mut rng = seeded_rng(args.seed);
            let g = random_game(&mut rng, &[2, 3], 0, 8, 2, mode);
            let tol = crate::game::mode_tol(mode, args.tol);
            properties::check_risk_positivity(&spec, &g, args.samples, args.seed, tol)?
        }
        "e-strict-concavity" => {
            let spec = need_spec(&args)?;
            let mode = natural_mode(&spec);
            let mut rng = seeded_rng(args.seed);
            let g = random_game(&mut rng, &[2, 3], 0, 9, 3, mode);
            let tol = crate::game::mode_tol(mode, args.tol);
            properties::check_e_strict_concavity(&spec, &g, 0, args.samples, args.seed, tol)?
        }
        "conditions-2ab" => {
            let spec = need_spec(&args)?;
            let delta = match &args.delta {
                Some(d) => d.clone(),
                None => delta_for(&spec)?,
            };
            properties::check_conditions_2ab(&spec, &delta)?
        }
        "two-values-monotonicity" => properties::check_two_values_monotonicity(&need_spec(&args)?)?,
        "f-identities" => properties::check_f_identities()?,
        "embracing-geometric" => properties::check_embracing_and_geometric()?,
        "fp-counterexample" => properties::check_fp_counterexample()?,
        "moment-formula" => properties::check_moment_formula_oracle(args.samples.min(1000), args.seed)?,
        "crawford-nonexistence" => {
            let spec = need_spec(&args)?;
            let mode = natural_mode(&spec);
            let delta = match &args.delta {
                Some(d) => d.clone(),
                None => delta_for(&spec)?,
            };
            let tol = crate::game::mode_tol(mode, args.tol);
            properties::check_crawford_nonexistence(
                &spec,
                &Scalar::from_rational(&delta, mode),
                args.step,
                tol,
            )?
        }
        "mphpn" | "wee" | "optimal-value" => gadget_equilibrium_check(&args)?,
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown property {other:?}; see --help for the list"
            )))
        }
    };
    let code = if report.passed { 0 } else { 1 };
    let doc = emit(&config, serde_json::to_value(&report)?, args.output.as_ref())?;
    Ok((doc, code))
}

/// The equilibrium-dependent checks run on the built-in desk-scale gadget:
/// the matching instance {(1,1,1)} pushed through the reduction chain, plus
/// (for the shape check) a fabricated profile violating the pure-neighbor
/// condition.
fn gadget_equilibrium_check(args: &CheckArgs) -> Result<PropertyReport> {
    let spec = args
        .valuation
        .clone()
        .unwrap_or(ValuationSpec::VarRisk { gamma: num::BigRational::from_integer(1.into()) });
    let mode = match spec {
        ValuationSpec::SdRisk { .. } => Mode::Float,
        _ => Mode::Exact,
    };
    let tol = crate::game::mode_tol(mode, args.tol);
    let t = TdmInstance::new(1, vec![[1, 1, 1]])?;
    let mbp = tdm_to_mbp(&t);
    let cert = mbp_solution_to_profile(&mbp, &[0, 1], &spec, mode, tol)?;
    match args.property.as_str() {
        "mphpn" => {
            let mut fabricated = cert.profile.clone();
            // make a neighbor of the mixed scale player mixed as well
            let g0 = cert.scheduling.player_index(MbpPlayer::Gadget(0, 0));
            fabricated.strategies[g0] =
                vec![Scalar::from_ratio(1, 2, mode), Scalar::from_ratio(1, 2, mode)];
            properties::check_mphpn(
                &cert.scheduling.game,
                &spec,
                &[cert.profile.clone(), fabricated],
                mode,
                tol,
            )
        }
        "wee" => properties::check_wee_at_equilibria(
            &cert.scheduling.game.eval(mode),
            &[&cert.profile],
            tol,
        ),
        "optimal-value" => {
            let mixed_player = cert.scheduling.player_index(MbpPlayer::Gadget(0, 4));
            properties::check_optimal_value(
                &spec,
                &cert.scheduling.game.eval(mode),
                mixed_player,
                &cert.profile,
                args.samples.min(100),
                args.seed,
                tol,
            )
        }
        _ => unreachable!("caller dispatches only the three gadget checks"),
    }
}

fn seeded_rng(seed: u64) -> rand_chacha::ChaCha8Rng {
    use rand::SeedableRng;
    rand_chacha::ChaCha8Rng::seed_from_u64(seed)
}
