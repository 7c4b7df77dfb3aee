//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for malformed input, 2 when the net benefit
//! condition fails, 3 when a verification check fails.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use ruinrate_core::estimate::{DUAL_STREAM, SURPLUS_STREAM};
use ruinrate_core::{
    duality_check, ruin_prob_finite_grid, dual_tail_probs, simulate_dual, simulate_surplus, solve_rate,
    ultimate_ruin_probs, verify_bound, BoundOptions, BoundReport, DualityReport, Error as CoreError, RandomStream,
    RateResult, RiskModel, SimConfig,
};
use serde::Serialize;

use crate::model_doc::ModelDoc;
use crate::parallel::Parallel;
use crate::report::{self, EstimateRow, StepRow};
use crate::tables;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_NO_RATE: i32 = 2;
pub const EXIT_VERIFY_FAILED: i32 = 3;

/// Steps compared by `simulate --step-table`.
pub const STEP_TABLE: [f64; 3] = [0.1, 0.05, 0.01];

#[derive(Debug, Parser)]
#[command(name = "ruinrate", version, about = "Exponential convergence rates and ruin probabilities for Lévy-driven risk models")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Model document (JSON).
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// Monte Carlo paths per estimate.
    #[arg(long, global = true)]
    pub paths: Option<u64>,
    /// Discretization step `h`.
    #[arg(long, global = true)]
    pub step: Option<f64>,
    /// Length of the stationary dual run.
    #[arg(long, global = true)]
    pub horizon: Option<f64>,
    /// Small-jump truncation level for the dual of infinite-activity models.
    #[arg(long, global = true)]
    pub eps: Option<f64>,
    /// Worker threads (defaults to one per core).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve for the convergence rate and print it as JSON.
    Rate,
    /// Write the rate tables and figure curves as CSV.
    Tables,
    /// Monte Carlo ruin and dual tail estimates.
    Simulate(SimulateArgs),
    /// Run the duality and convergence-bound checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 3.0, 5.0])]
    pub u_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 5.0, 10.0])]
    pub t_grid: Vec<f64>,
    /// Also estimate ultimate ruin from a stationary dual run.
    #[arg(long)]
    pub ultimate: bool,
    /// Burn-in of the stationary run (default `10 / k`, at most half the horizon).
    #[arg(long)]
    pub burn_in: Option<f64>,
    /// Write the first N surplus and dual paths under `paths/`.
    #[arg(long, default_value_t = 0)]
    pub dump_paths: u64,
    /// Repeat the finite-horizon estimates for each step in 0.1, 0.05, 0.01.
    #[arg(long)]
    pub step_table: bool,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 5.0)]
    pub u: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 5.0, 10.0, 20.0])]
    pub t_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 3.0, 5.0])]
    pub duality_u_grid: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 5.0])]
    pub duality_t_grid: Vec<f64>,
    #[arg(long)]
    pub burn_in: Option<f64>,
    /// Exponent of the Lyapunov function (default `λ*`).
    #[arg(long)]
    pub lambda: Option<f64>,
}

/// Defaults that differ between `simulate` and `verify`.
struct Scale {
    paths: u64,
    step: f64,
    horizon: f64,
}

const SIMULATE_SCALE: Scale = Scale { paths: 10_000, step: 0.01, horizon: 10_000.0 };
const VERIFY_SCALE: Scale = Scale { paths: 200_000, step: 0.01, horizon: 200_000.0 };

impl GlobalArgs {
    fn sim_config(&self, scale: Scale) -> Result<SimConfig> {
        let mut cfg = SimConfig::new(
            self.step.unwrap_or(scale.step),
            self.horizon.unwrap_or(scale.horizon),
            self.paths.unwrap_or(scale.paths),
            self.seed,
        );
        if let Some(eps) = self.eps {
            cfg = cfg.with_eps(eps);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn model_doc(&self) -> Result<Option<ModelDoc>> {
        let Some(path) = &self.model else { return Ok(None) };
        let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
        let doc = ModelDoc::parse(&text).with_context(|| format!("malformed model {}", path.display()))?;
        Ok(Some(doc))
    }

    fn required_model(&self) -> Result<(ModelDoc, RiskModel)> {
        let doc = self.model_doc()?.context("--model is required")?;
        let model = doc.build()?;
        Ok((doc, model))
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Diagnostics go to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

fn exit_code(e: &anyhow::Error) -> i32 {
    let core = e.chain().find_map(|c| c.downcast_ref::<CoreError>());
    match core {
        Some(CoreError::NoPositiveRate | CoreError::NonErgodic) => EXIT_NO_RATE,
        _ => EXIT_INPUT,
    }
}

fn execute(cli: &Cli) -> Result<i32> {
    match cli.global.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(n).build()?;
            pool.install(|| dispatch(cli))
        }
        None => dispatch(cli),
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let g = &cli.global;
    match &cli.command {
        Command::Rate => cmd_rate(g),
        Command::Tables => cmd_tables(g),
        Command::Simulate(args) => cmd_simulate(g, args),
        Command::Verify(args) => cmd_verify(g, args),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateJson {
    pub lambda_star: f64,
    pub k: f64,
    pub residual: f64,
    pub lambda_max: f64,
    pub concavity_ok: bool,
    pub boundary_max: bool,
}

impl From<RateResult> for RateJson {
    fn from(r: RateResult) -> Self {
        RateJson {
            lambda_star: r.lambda_star,
            k: r.k,
            residual: r.residual,
            lambda_max: r.lambda_max,
            concavity_ok: r.concavity_ok,
            boundary_max: r.boundary_max,
        }
    }
}

fn cmd_rate(g: &GlobalArgs) -> Result<i32> {
    let (_, model) = g.required_model()?;
    let rate = solve_rate(&model)?;
    print!("{}", report::to_json(&RateJson::from(rate))?);
    Ok(EXIT_OK)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))
}

fn cmd_tables(g: &GlobalArgs) -> Result<i32> {
    ensure_dir(&g.out)?;
    let t1 = tables::table1()?;
    let t2 = tables::table2()?;
    let t3 = tables::table3()?;
    report::write_table(g.out.join("table1.csv"), &t1)?;
    report::write_table(g.out.join("table2.csv"), &t2)?;
    report::write_table3(g.out.join("table3.csv"), &t3)?;
    for (name, rows) in [("table1.csv", &t1), ("table2.csv", &t2)] {
        let matched = rows.iter().filter(|r| r.matches_print()).count();
        println!("{name}: {matched}/{} entries match the printed values", rows.len());
    }
    let flagged = t3.iter().filter(|r| !r.matches_print()).count();
    println!("table3.csv: {flagged}/{} entries differ from the printed values", t3.len());
    for fig in tables::figures()? {
        let name = format!("{}.csv", fig.name);
        report::write_figure(g.out.join(&name), &fig.points)?;
        println!("{name}: {} points", fig.points.len());
    }
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct RunSummary<'a> {
    command: &'static str,
    model: &'a ModelDoc,
    seed: u64,
    n_paths: u64,
    step: f64,
    horizon: f64,
    eps: f64,
    rate: Option<RateJson>,
}

impl<'a> RunSummary<'a> {
    fn new(command: &'static str, model: &'a ModelDoc, cfg: &SimConfig, rate: Option<RateResult>) -> Self {
        RunSummary {
            command,
            model,
            seed: cfg.seed,
            n_paths: cfg.n_paths,
            step: cfg.step,
            horizon: cfg.horizon,
            eps: cfg.eps,
            rate: rate.map(RateJson::from),
        }
    }
}

/// Explicit burn-in, or `10 / k` capped at half the stationary run.
fn burn_in_for(model: &RiskModel, given: Option<f64>, horizon: f64) -> Result<f64> {
    match given {
        Some(b) => Ok(b),
        None => Ok((10.0 / solve_rate(model)?.k).min(0.5 * horizon)),
    }
}

fn cmd_simulate(g: &GlobalArgs, args: &SimulateArgs) -> Result<i32> {
    let (doc, model) = g.required_model()?;
    let cfg = g.sim_config(SIMULATE_SCALE)?;
    ensure_dir(&g.out)?;
    let runner = Parallel;

    let mut rows = Vec::new();
    for &u in &args.u_grid {
        let est = ruin_prob_finite_grid(&model, u, &args.t_grid, &cfg, &runner)?;
        rows.extend(args.t_grid.iter().zip(est).map(|(&t, estimate)| EstimateRow { quantity: "psi_T", u, t, estimate }));
    }
    let dual = dual_tail_probs(&model, &args.u_grid, &args.t_grid, &cfg, &runner)?;
    for (&t, row) in args.t_grid.iter().zip(&dual) {
        rows.extend(args.u_grid.iter().zip(row).map(|(&u, &estimate)| EstimateRow { quantity: "dual_tail", u, t, estimate }));
    }
    if args.ultimate {
        let burn_in = burn_in_for(&model, args.burn_in, cfg.horizon)?;
        let est = ultimate_ruin_probs(&model, &args.u_grid, &cfg, burn_in, &runner)?;
        rows.extend(
            args.u_grid.iter().zip(est).map(|(&u, estimate)| EstimateRow { quantity: "psi", u, t: f64::INFINITY, estimate }),
        );
    }
    report::write_estimates(g.out.join("estimates.csv"), &rows)?;

    if args.step_table {
        let mut steps = Vec::new();
        for h in STEP_TABLE {
            let cfg = SimConfig { step: h, ..cfg };
            for &u in &args.u_grid {
                let est = ruin_prob_finite_grid(&model, u, &args.t_grid, &cfg, &runner)?;
                steps.extend(args.t_grid.iter().zip(est).map(|(&t, estimate)| StepRow { step: h, u, t, estimate }));
            }
        }
        report::write_step_table(g.out.join("step_table.csv"), &steps)?;
    }

    if args.dump_paths > 0 {
        dump_paths(&model, &args.u_grid, &args.t_grid, &cfg, args.dump_paths, &g.out.join("paths"))?;
    }

    let rate = solve_rate(&model).ok();
    report::write_json(g.out.join("summary.json"), &RunSummary::new("simulate", &doc, &cfg, rate))?;
    println!("estimates.csv: {} rows", rows.len());
    Ok(EXIT_OK)
}

/// Path `i` is drawn from the same substream the estimators use for path `i`.
fn dump_paths(model: &RiskModel, us: &[f64], ts: &[f64], cfg: &SimConfig, n: u64, dir: &Path) -> Result<()> {
    ensure_dir(dir)?;
    let u = us.first().copied().unwrap_or(0.0);
    let horizon = ts.iter().copied().fold(cfg.step, f64::max);
    let cfg = cfg.with_horizon(horizon);
    let base = RandomStream::new(cfg.seed);
    let (surplus, dual) = (base.fork(SURPLUS_STREAM), base.fork(DUAL_STREAM));
    for i in 0..n {
        let path = simulate_surplus(model, u, &cfg, &mut surplus.substream(i))?;
        report::write_path(dir.join(format!("surplus_{i:04}.csv")), &path)?;
        let path = simulate_dual(model, 0.0, &cfg, &mut dual.substream(i))?;
        report::write_path(dir.join(format!("dual_{i:04}.csv")), &path)?;
    }
    Ok(())
}

#[derive(Debug, Serialize)]
struct BoundJson {
    u: f64,
    lambda: f64,
    k: f64,
    psi: f64,
    psi_stderr: f64,
    moment: f64,
    moment_stderr: f64,
    c_hat: f64,
    decay_rate: Option<f64>,
    decay_stderr: Option<f64>,
    pass: bool,
}

impl From<&BoundReport> for BoundJson {
    fn from(b: &BoundReport) -> Self {
        BoundJson {
            u: b.u,
            lambda: b.lambda,
            k: b.k,
            psi: b.psi.mean,
            psi_stderr: b.psi.stderr,
            moment: b.moment.mean,
            moment_stderr: b.moment.stderr,
            c_hat: b.c_hat,
            decay_rate: b.decay.map(|d| d.rate),
            decay_stderr: b.decay.map(|d| d.stderr),
            pass: b.all_pass(),
        }
    }
}

#[derive(Debug, Serialize)]
struct VerifySummary<'a> {
    #[serde(flatten)]
    run: RunSummary<'a>,
    bound: BoundJson,
    duality_pass: bool,
    pass: bool,
}

fn cmd_verify(g: &GlobalArgs, args: &VerifyArgs) -> Result<i32> {
    let doc = g.model_doc()?.unwrap_or_else(ModelDoc::default_verify);
    let model = doc.build()?;
    let rate = solve_rate(&model)?;
    let cfg = g.sim_config(VERIFY_SCALE)?;
    ensure_dir(&g.out)?;
    let runner = Parallel;

    let duality: DualityReport = duality_check(&model, &args.duality_u_grid, &args.duality_t_grid, &cfg, &runner)?;
    report::write_duality(g.out.join("duality.csv"), &duality)?;
    for r in &duality.rows {
        println!(
            "duality u={} T={}: psi_T={:.5} dual={:.5} diff={:.5} slack={:.5} {}",
            r.u,
            r.t,
            r.finite.mean,
            r.dual.mean,
            r.diff,
            r.slack,
            verdict(r.pass)
        );
    }

    let opts = BoundOptions { burn_in: args.burn_in, lambda: args.lambda };
    let bound = verify_bound(&model, args.u, &args.t_grid, &cfg, opts, &runner)?;
    report::write_bound(g.out.join("bound_report.csv"), &bound)?;
    println!("bound u={}: psi={:.5} C={:.5} k={:.7}", bound.u, bound.psi.mean, bound.c_hat, bound.k);
    for r in &bound.rows {
        println!(
            "bound T={}: gap={:.5} bound={:.5} stderr={:.5} {}",
            r.t,
            r.gap,
            r.bound,
            r.stderr,
            verdict(r.pass)
        );
    }

    let pass = duality.all_pass() && bound.all_pass();
    let summary = VerifySummary {
        run: RunSummary::new("verify", &doc, &cfg, Some(rate)),
        bound: BoundJson::from(&bound),
        duality_pass: duality.all_pass(),
        pass,
    };
    report::write_json(g.out.join("summary.json"), &summary)?;
    println!("verify: {}", verdict(pass));
    Ok(if pass { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "PASS"
    } else {
        "FAIL"
    }
}
