//! `ikpaver`: interval inverse kinematics from the command line.

mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use anyhow::{anyhow, bail, Result};
use clap::{Parser, Subcommand, ValueEnum};
use ikpaver::robot::bundled;
use ikpaver::{
    solve_target, BisectionRule, ExplorationStrategy, PoseMode, PoseTarget, RobotModel,
    SolverConfig, SolverMode,
};

#[derive(Parser, Debug)]
#[command(
    name = "ikpaver",
    version,
    about = "Pave inverse kinematics solution sets with interval boxes"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve one or more pose targets and write solutions, curves and a report.
    Solve(SolveArgs),
    /// Print the end-effector pose of a configuration as a target file.
    Fk(FkArgs),
    /// Print a bundled robot model as JSON.
    Model {
        #[arg(value_parser = bundled::NAMES)]
        name: String,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Vanilla,
    Heuristic,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Strategy {
    Dfs,
    Mc,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Bisection {
    Rr,
    Lf,
}

#[derive(clap::Args, Debug)]
struct SolveArgs {
    /// Robot model file, or the name of a bundled model.
    #[arg(long)]
    model: String,
    /// Pose target file; repeat to solve several targets.
    #[arg(long, required = true)]
    target: Vec<PathBuf>,
    /// Largest accepted box width.
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// Plain branch and bound, or with local-IK guided exploration.
    #[arg(long, value_enum, default_value_t = Mode::Heuristic)]
    mode: Mode,
    /// Heuristic exploration: depth-first neighborhood or manifold continuation.
    #[arg(long, value_enum, default_value_t = Strategy::Dfs)]
    strategy: Strategy,
    /// Component to split: round robin or largest first.
    #[arg(long, value_enum, default_value_t = Bisection::Rr)]
    bisection: Bisection,
    /// Wall-clock budget per target in seconds; unbounded when omitted.
    #[arg(long)]
    time_budget: Option<f64>,
    /// Seed for local-IK restarts.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory; one subdirectory per target when several are given.
    #[arg(long)]
    out: PathBuf,
    /// Contractor sweeps per box.
    #[arg(long)]
    max_rounds: Option<usize>,
    /// Contractor stops once no component shrinks by more than this fraction.
    #[arg(long)]
    min_reduction: Option<f64>,
    /// Stop once manifold continuation and local IK both run dry.
    #[arg(long)]
    stop_early: bool,
    /// Contract with the core constraints only.
    #[arg(long)]
    no_implied_constraints: bool,
    /// Targets solved concurrently.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(clap::Args, Debug)]
struct FkArgs {
    /// Robot model file, or the name of a bundled model.
    #[arg(long)]
    model: String,
    /// Joint angles in radians, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        required = true
    )]
    theta: Vec<f64>,
    /// Emit a position plus approach-axis target instead of a full pose.
    #[arg(long)]
    z_axis: bool,
}

// Core errors already carry their cause in the message.
fn core_err(e: ikpaver::Error) -> anyhow::Error {
    anyhow!(e.to_string())
}

fn load_model(arg: &str) -> Result<RobotModel> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some(m) = bundled::load(arg) {
            return Ok(m);
        }
    }
    RobotModel::from_file(path).map_err(core_err)
}

fn solver_config(a: &SolveArgs) -> Result<SolverConfig> {
    let mut cfg = SolverConfig {
        epsilon: a.epsilon,
        mode: match a.mode {
            Mode::Vanilla => SolverMode::Vanilla,
            Mode::Heuristic => SolverMode::Heuristic,
        },
        strategy: match a.strategy {
            Strategy::Dfs => ExplorationStrategy::Dfs,
            Strategy::Mc => ExplorationStrategy::ManifoldContinuation,
        },
        bisection: match a.bisection {
            Bisection::Rr => BisectionRule::RoundRobin,
            Bisection::Lf => BisectionRule::LargestFirst,
        },
        time_budget: a.time_budget,
        rng_seed: a.seed,
        stop_early: a.stop_early,
        implied_constraints: !a.no_implied_constraints,
        ..Default::default()
    };
    if let Some(r) = a.max_rounds {
        cfg.max_rounds = r;
    }
    if let Some(r) = a.min_reduction {
        cfg.min_relative_reduction = r;
    }
    cfg.validate().map_err(core_err)?;
    Ok(cfg)
}

/// Output directory of target `i`.
fn target_dir(out: &Path, targets: &[PathBuf], i: usize) -> PathBuf {
    if targets.len() == 1 {
        return out.to_path_buf();
    }
    let stem = targets[i]
        .file_stem()
        .map_or_else(|| "target".into(), |s| s.to_string_lossy());
    out.join(format!("{i:03}_{stem}"))
}

fn run_solve(a: &SolveArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let cfg = solver_config(a)?;
    let targets = a
        .target
        .iter()
        .map(|p| PoseTarget::from_file(p).map_err(core_err))
        .collect::<Result<Vec<_>>>()?;
    if a.jobs == 0 {
        bail!("--jobs must be at least 1");
    }
    let next = AtomicUsize::new(0);
    let failures = Mutex::new(Vec::new());
    let work = || loop {
        let i = next.fetch_add(1, Ordering::Relaxed);
        if i >= targets.len() {
            break;
        }
        let target_name = a.target[i].display().to_string();
        let res = solve_target(&model, &targets[i], &cfg)
            .map_err(core_err)
            .and_then(|out| {
                let dir = target_dir(&a.out, &a.target, i);
                output::write_all(&dir, &a.model, &target_name, &cfg, &out)?;
                eprintln!(
                    "{target_name}: {} boxes, {} clusters, {} curves ({}) -> {}",
                    out.solutions.len(),
                    out.cluster_count,
                    out.curves.curve_count(),
                    serde_json::to_value(out.termination)?
                        .as_str()
                        .unwrap_or_default(),
                    dir.display()
                );
                Ok(())
            });
        if let Err(e) = res {
            failures
                .lock()
                .unwrap()
                .push(format!("{target_name}: {e:#}"));
        }
    };
    std::thread::scope(|s| {
        for _ in 0..a.jobs.min(targets.len()) {
            s.spawn(work);
        }
    });
    let failures = failures.into_inner().unwrap();
    if !failures.is_empty() {
        bail!("{}", failures.join("\n"));
    }
    Ok(())
}

fn run_fk(a: &FkArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    if a.theta.len() != model.dof() {
        bail!(
            "model has {} joints but {} angles were given",
            model.dof(),
            a.theta.len()
        );
    }
    let mode = if a.z_axis {
        PoseMode::PositionAndZAxis
    } else {
        PoseMode::FullPose
    };
    let pose = model.forward_kinematics(&a.theta);
    let target = PoseTarget::from_transform(&pose, mode);
    println!("{}", target.to_json_string());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match &cli.command {
        Command::Solve(a) => run_solve(a),
        Command::Fk(a) => run_fk(a),
        Command::Model { name } => {
            println!(
                "{}",
                bundled::json(name).expect("name checked by the parser")
            );
            Ok(())
        }
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
