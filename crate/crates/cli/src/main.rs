mod config;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use config::FileConfig;
use grooming_core::experiments::exp1::{experiment1, Experiment1Config};
use grooming_core::experiments::population::{Population, TWITTER_LIKE_HORIZON, TWITTER_LIKE_SEED, TWITTER_LIKE_SIZE};
use grooming_core::experiments::sweep::{experiment2, GridAxis, SweepConfig};
use grooming_core::ingest::{self, AgentSummary};
use grooming_core::report;
use grooming_core::rng::DEFAULT_SEED;
use grooming_core::sim::calibration_specs;
use grooming_core::statfit::{fit_tradeoff, AlphaSearch, TradeoffObservation};
use grooming_core::{run_simulation, ModelParams};

/// Social-grooming trade-off model: ingest interaction logs, fit the
/// trade-off, simulate groomers and run the two experiments.
#[derive(Debug, Parser)]
#[command(name = "grooming", version)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Master seed [default: 20180601].
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory [default: out].
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads [default: available cores]. Never changes results.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// TOML file with defaults for any flag (keys: seed, out, jobs, a, b,
    /// alpha, T, C, M, a_min, a_max, a_step, alpha_min, alpha_max,
    /// alpha_step, reps, select, levels, passes).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// More log output (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Events CSV (actor,target,day[,count]) to dyads.csv, agents.csv and curves.csv.
    Ingest {
        /// Events file.
        input: PathBuf,
        /// Observation window in days [default: last day + 1].
        #[arg(long = "T")]
        horizon: Option<u32>,
        /// Exponent of C = u^b used for the agents' C column [default: 1].
        #[arg(long)]
        b: Option<f64>,
    },
    /// Fits log N ~ -a log m + b log u to agents.csv, writing tradeoff_fit.json.
    FitTradeoff {
        /// Agents file (id,N,m,u,C).
        agents: PathBuf,
    },
    /// Simulates M groomers of a common cost C with log-spaced tie targets.
    Simulate {
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        alpha: Option<f64>,
        /// Days [default: 100].
        #[arg(long = "T")]
        horizon: Option<u32>,
        /// Cost shared by all groomers [default: 100].
        #[arg(long = "C")]
        cost: Option<f64>,
        /// Groomers [default: 30].
        #[arg(long = "M")]
        groomers: Option<usize>,
    },
    /// Calibrates alpha on a data-set and re-simulates its agents.
    Exp1(Exp1Args),
    /// Sweeps (a, alpha), selects low-error alphas and fits phi against a.
    Exp2(Exp2Args),
    /// Re-renders SVG charts from result tables in a directory.
    Report {
        /// Directory holding summary.csv/ratios.csv or exp1 tables.
        input: PathBuf,
    },
}

#[derive(Debug, Args)]
struct Exp1Args {
    /// Events file; enables the data strength distribution and budget correlation.
    #[arg(long, conflicts_with = "agents", required_unless_present = "agents")]
    events: Option<PathBuf>,
    /// Agents file (id,N,m,u,C); requires --T.
    #[arg(long)]
    agents: Option<PathBuf>,
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    b: Option<f64>,
    /// Data period in days [default: from the events file].
    #[arg(long = "T")]
    horizon: Option<u32>,
    /// Calibration groomers [default: 30].
    #[arg(long = "M")]
    groomers: Option<usize>,
    /// First-pass alpha step of the search [default: 0.125].
    #[arg(long)]
    alpha_step: Option<f64>,
    /// Search passes, each halving the step [default: 3].
    #[arg(long)]
    passes: Option<u32>,
    /// Replications per candidate alpha [default: 5].
    #[arg(long)]
    reps: Option<u32>,
}

#[derive(Debug, Args)]
struct Exp2Args {
    /// Agents file used as the population [default: built-in Twitter-like population].
    #[arg(long)]
    population: Option<PathBuf>,
    /// Exponent of C = u^b for --population.
    #[arg(long)]
    b: Option<f64>,
    /// Period in days [default: 120 for the built-in population].
    #[arg(long = "T")]
    horizon: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    a_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    a_max: Option<f64>,
    /// [default: 0.05]
    #[arg(long, allow_negative_numbers = true)]
    a_step: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    alpha_max: Option<f64>,
    /// [default: 0.02]
    #[arg(long, allow_negative_numbers = true)]
    alpha_step: Option<f64>,
    /// Replications per cell [default: 50].
    #[arg(long)]
    reps: Option<u32>,
    /// Calibration groomers per cell [default: 30].
    #[arg(long = "M")]
    groomers: Option<usize>,
    /// Lowest-error alphas kept per a [default: 20].
    #[arg(long)]
    select: Option<usize>,
    /// Hierarchy levels K [default: 11].
    #[arg(long)]
    levels: Option<usize>,
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .filter_level(match cli.common.verbose {
            0 => log::LevelFilter::Warn,
            1 => log::LevelFilter::Info,
            _ => log::LevelFilter::Debug,
        })
        .parse_default_env()
        .init();
    let file = match &cli.common.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let jobs = cli.common.jobs.or(file.jobs).unwrap_or(0);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .context("building worker pool")?;
    let ctx = Ctx {
        seed: cli.common.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        out: cli
            .common
            .out
            .clone()
            .or(file.out.clone())
            .unwrap_or_else(|| "out".into()),
        file,
    };
    let started = Instant::now();
    pool.install(|| run(&ctx, cli.command))?;
    println!("done in {:.2} s", started.elapsed().as_secs_f64());
    Ok(())
}

struct Ctx {
    seed: u64,
    out: PathBuf,
    file: FileConfig,
}

fn run(ctx: &Ctx, command: Command) -> Result<()> {
    let f = &ctx.file;
    match command {
        Command::Ingest { input, horizon, b } => {
            cmd_ingest(ctx, &input, horizon.or(f.horizon), b.or(f.b).unwrap_or(1.0))
        }
        Command::FitTradeoff { agents } => cmd_fit(ctx, &agents),
        Command::Simulate {
            a,
            alpha,
            horizon,
            cost,
            groomers,
        } => {
            let a = a.or(f.a).context("--a is required")?;
            let alpha = alpha.or(f.alpha).context("--alpha is required")?;
            let params = ModelParams::new(a, alpha, horizon.or(f.horizon).unwrap_or(100))?;
            cmd_simulate(
                ctx,
                &params,
                cost.or(f.cost).unwrap_or(100.0),
                groomers.or(f.groomers).unwrap_or(30),
            )
        }
        Command::Exp1(args) => cmd_exp1(ctx, args),
        Command::Exp2(args) => cmd_exp2(ctx, args),
        Command::Report { input } => {
            let written = report::rerender(&input, &ctx.out)?;
            println!("report: {} charts in {}", written.len(), ctx.out.display());
            Ok(())
        }
    }
}

fn create(dir: &Path, name: &str) -> Result<BufWriter<File>> {
    let path = dir.join(name);
    Ok(BufWriter::new(
        File::create(&path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn cmd_ingest(ctx: &Ctx, input: &Path, horizon: Option<u32>, b: f64) -> Result<()> {
    let log = ingest::read_events_file(input, horizon).with_context(|| format!("reading {}", input.display()))?;
    let dyads = ingest::build_dyads(&log);
    let agents = ingest::summarize_agents(&dyads, &log, b)?;
    let curves = if log.horizon == 0 {
        ingest::GroomingCurves {
            by_strength: Vec::new(),
            by_density: Vec::new(),
        }
    } else {
        ingest::grooming_curves(&log, log.horizon)?
    };
    std::fs::create_dir_all(&ctx.out).with_context(|| format!("creating {}", ctx.out.display()))?;
    ingest::write_dyads(create(&ctx.out, "dyads.csv")?, &dyads)?;
    ingest::write_agents(create(&ctx.out, "agents.csv")?, &agents)?;
    ingest::write_curves(create(&ctx.out, "curves.csv")?, &curves.by_strength)?;
    ingest::write_density_curves(create(&ctx.out, "density_curves.csv")?, &curves.by_density)?;
    println!(
        "ingest: {} events, {} dyads, {} agents, {} curve rows, T = {} -> {}",
        log.events.len(),
        dyads.len(),
        agents.len(),
        curves.by_strength.len(),
        log.horizon,
        ctx.out.display()
    );
    Ok(())
}

fn read_agents(path: &Path) -> Result<Vec<AgentSummary>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    ingest::read_agents(file).with_context(|| format!("reading {}", path.display()))
}

fn cmd_fit(ctx: &Ctx, path: &Path) -> Result<()> {
    let agents = read_agents(path)?;
    let obs: Vec<TradeoffObservation> = agents.iter().map(AgentSummary::observation).collect();
    let fit = fit_tradeoff(&obs)?;
    std::fs::create_dir_all(&ctx.out).with_context(|| format!("creating {}", ctx.out.display()))?;
    let mut w = create(&ctx.out, "tradeoff_fit.json")?;
    serde_json::to_writer_pretty(&mut w, &fit)?;
    std::io::Write::write_all(&mut w, b"\n")?;
    println!(
        "fit-tradeoff: n = {}, a = {:.5} (se {:.5}), b = {:.5} (se {:.5}), adj R2 = {:.3}",
        fit.n, fit.a_hat, fit.se_a, fit.b_hat, fit.se_b, fit.adj_r2
    );
    Ok(())
}

fn cmd_simulate(ctx: &Ctx, params: &ModelParams, cost: f64, groomers: usize) -> Result<()> {
    let specs = calibration_specs(cost, groomers, params)?;
    let started = Instant::now();
    let ledger = run_simulation(&specs, params, ctx.seed)?;
    let secs = started.elapsed().as_secs_f64();
    let written = report::write_simulation_bundle(&ctx.out, &specs, &ledger)?;
    let ties: usize = ledger.groomers.iter().map(|g| g.tie_count()).sum();
    println!(
        "simulate: {} groomers x {} days, {} ties, {:.0} groomer-days/s, {} files in {}",
        specs.len(),
        params.horizon,
        ties,
        (specs.len() as f64 * f64::from(params.horizon)) / secs.max(1e-9),
        written.len(),
        ctx.out.display()
    );
    Ok(())
}

fn cmd_exp1(ctx: &Ctx, args: Exp1Args) -> Result<()> {
    let f = &ctx.file;
    let a = args.a.or(f.a).context("--a is required")?;
    let b = args.b.or(f.b).context("--b is required")?;
    let (agents, strengths, horizon) = match (&args.events, &args.agents) {
        (Some(path), _) => {
            let log = ingest::read_events_file(path, args.horizon.or(f.horizon))
                .with_context(|| format!("reading {}", path.display()))?;
            let dyads = ingest::build_dyads(&log);
            let agents = ingest::summarize_agents(&dyads, &log, b)?;
            (agents, dyads.values(), log.horizon)
        }
        (None, Some(path)) => {
            let horizon = args.horizon.or(f.horizon).context("--T is required with --agents")?;
            (read_agents(path)?, Vec::new(), horizon)
        }
        (None, None) => bail!("one of --events or --agents is required"),
    };
    let defaults = AlphaSearch::default();
    let cfg = Experiment1Config {
        groomers: args.groomers.or(f.groomers).unwrap_or(30),
        search: AlphaSearch {
            initial_step: args.alpha_step.or(f.alpha_step).unwrap_or(defaults.initial_step),
            passes: args.passes.or(f.passes).unwrap_or(defaults.passes),
            reps: args.reps.or(f.reps).unwrap_or(defaults.reps),
            ..defaults
        },
        master_seed: ctx.seed,
        ..Experiment1Config::new(a, b, horizon)
    };
    let started = Instant::now();
    let res = experiment1(&cfg, &agents, &strengths)?;
    let secs = started.elapsed().as_secs_f64();
    let written = report::write_exp1_bundle(&ctx.out, &res)?;
    println!(
        "exp1: alpha* = {} (e = {:.4}{}), {} agents simulated, {} excluded, {} evaluations in {:.2} s",
        res.optimum.alpha,
        res.optimum.error,
        if res.optimum.flat { ", flat objective" } else { "" },
        res.agents.len(),
        res.excluded,
        res.optimum.evaluations.len(),
        secs
    );
    if let Some(c) = res.budget {
        println!("exp1: budget correlation r = {:.3} (p = {:.3e}, n = {})", c.r, c.p, c.n);
    }
    println!("exp1: {} files in {}", written.len(), ctx.out.display());
    Ok(())
}

fn cmd_exp2(ctx: &Ctx, args: Exp2Args) -> Result<()> {
    let f = &ctx.file;
    let full = SweepConfig::full_scale();
    let axis = |min: Option<f64>, max: Option<f64>, step: Option<f64>, base: GridAxis| -> Result<GridAxis> {
        Ok(GridAxis::new(
            min.unwrap_or(base.min),
            max.unwrap_or(base.max),
            step.unwrap_or(base.step),
        )?)
    };
    let cfg = SweepConfig {
        a_grid: axis(
            args.a_min.or(f.a_min),
            args.a_max.or(f.a_max),
            args.a_step.or(f.a_step),
            full.a_grid,
        )?,
        alpha_grid: axis(
            args.alpha_min.or(f.alpha_min),
            args.alpha_max.or(f.alpha_max),
            args.alpha_step.or(f.alpha_step),
            full.alpha_grid,
        )?,
        reps: args.reps.or(f.reps).unwrap_or(full.reps),
        groomers: args.groomers.or(f.groomers).unwrap_or(full.groomers),
        select: args.select.or(f.select).unwrap_or(full.select),
        levels: args.levels.or(f.levels).unwrap_or(full.levels),
        master_seed: ctx.seed,
        ..full
    };
    cfg.validate()?;
    let horizon = args.horizon.or(f.horizon);
    let population = match &args.population {
        Some(path) => Population::from_agents(
            &read_agents(path)?,
            args.b.or(f.b).context("--b is required with --population")?,
            horizon.context("--T is required with --population")?,
        )?,
        None => Population::twitter_like(
            TWITTER_LIKE_SIZE,
            horizon.unwrap_or(TWITTER_LIKE_HORIZON),
            TWITTER_LIKE_SEED,
        ),
    };
    let cells = cfg.a_grid.values().len() * cfg.alpha_grid.values().len() * cfg.reps as usize;
    let started = Instant::now();
    let res = experiment2(&cfg, &population)?;
    let secs = started.elapsed().as_secs_f64();
    let written = report::write_exp2_bundle(&ctx.out, &res)?;
    let t = &res.threshold;
    println!(
        "exp2: {} cells, {} selected runs in {:.2} s ({:.1} cells/s)",
        cells,
        res.selected.len(),
        secs,
        cells as f64 / secs.max(1e-9)
    );
    println!(
        "exp2: threshold beta1 = {:.4}, beta2 = {:.4}, beta3 = {:.4}, beta0 = {:.4}; AIC threshold {:.2} vs linear {:.2}",
        t.beta1, t.beta2, t.beta3, t.beta0, t.aic_threshold, t.aic_linear
    );
    println!("exp2: {} files in {}", written.len(), ctx.out.display());
    Ok(())
}
