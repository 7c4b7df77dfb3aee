//! Monte Carlo estimators for finite-horizon and ultimate ruin
//! probabilities, the stationary exponential moment of the dual process,
//! the duality cross-check and the exponential convergence bound.
//!
//! Path `i` of an estimator always consumes substream `i` of a stream family
//! derived from the configured seed, so results do not depend on how a
//! [`PathRunner`] schedules the work.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rate::solve_rate;
use crate::risk::RiskModel;
use crate::rng::RandomStream;
use crate::sim::{run_dual, Driver, Grid, SimConfig, Surplus};

/// Stream families forked from the master seed.
pub const SURPLUS_STREAM: u64 = 1;
pub const DUAL_STREAM: u64 = 2;
pub const STATIONARY_STREAM: u64 = 3;

/// Independent long-run replicates behind every stationary estimate.
pub const STATIONARY_REPLICATES: u64 = 10;

/// Slack, in combined standard errors, allowed by every pass/fail check.
pub const SIGMA_SLACK: f64 = 3.0;

/// Executes `n` independent path computations and returns their results in
/// index order.
pub trait PathRunner {
    fn map<T, F>(&self, n: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync;
}

/// Runs every path on the calling thread.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl PathRunner for Sequential {
    fn map<T, F>(&self, n: u64, f: F) -> Vec<T>
    where
        T: Send,
        F: Fn(u64) -> T + Sync,
    {
        (0..n).map(f).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub n_paths: u64,
}

impl McEstimate {
    /// Proportion with binomial standard error.
    pub fn proportion(hits: u64, n: u64) -> Self {
        let mean = hits as f64 / n as f64;
        let stderr = (mean * (1.0 - mean) / n as f64).sqrt();
        McEstimate { mean, stderr, n_paths: n }
    }

    /// Sample mean with standard error `s/√n`.
    pub fn from_samples(xs: &[f64]) -> Self {
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let stderr = if xs.len() > 1 {
            let ss: f64 = xs.iter().map(|x| (x - mean) * (x - mean)).sum();
            (ss / (n - 1.0) / n).sqrt()
        } else {
            0.0
        };
        McEstimate { mean, stderr, n_paths: xs.len() as u64 }
    }

    pub fn ci95(&self) -> (f64, f64) {
        (self.mean - 1.96 * self.stderr, self.mean + 1.96 * self.stderr)
    }
}

fn check_level(u: f64) -> Result<()> {
    if u >= 0.0 && u.is_finite() {
        Ok(())
    } else {
        Err(Error::domain("u", u))
    }
}

fn check_times(ts: &[f64]) -> Result<f64> {
    if ts.is_empty() {
        return Err(Error::Config("empty time grid"));
    }
    let mut horizon = 0.0f64;
    for &t in ts {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::domain("T", t));
        }
        horizon = horizon.max(t);
    }
    Ok(horizon)
}

fn surplus_ruin_time(model: &RiskModel, u: f64, grid: &Grid, rng: &mut RandomStream) -> Option<f64> {
    let mut state = Surplus::new(u);
    if state.ruin.is_some() {
        return state.ruin;
    }
    let mut driver = Driver::new(model, rng);
    let mut shocks = Vec::new();
    for t_end in grid.ends() {
        driver.cell(t_end, rng, &mut shocks);
        for &(t, shock) in &shocks {
            state.apply(model, t, shock, true);
        }
        if state.ruin.is_some() {
            break;
        }
    }
    state.ruin
}

/// `ψ̂(u, T)` for every `T` in `ts`, from one batch of absorbed surplus paths.
pub fn ruin_prob_finite_grid<P: PathRunner>(
    model: &RiskModel,
    u: f64,
    ts: &[f64],
    cfg: &SimConfig,
    runner: &P,
) -> Result<Vec<McEstimate>> {
    check_level(u)?;
    let horizon = check_times(ts)?;
    let cfg = cfg.with_horizon(horizon);
    cfg.validate()?;
    let grid = Grid::new(cfg.step, horizon, ts);
    let base = RandomStream::new(cfg.seed).fork(SURPLUS_STREAM);
    let ruin = runner.map(cfg.n_paths, |i| surplus_ruin_time(model, u, &grid, &mut base.substream(i)));
    Ok(ts
        .iter()
        .map(|&t| {
            let hits = ruin.iter().filter(|r| r.is_some_and(|rt| rt <= t)).count() as u64;
            McEstimate::proportion(hits, cfg.n_paths)
        })
        .collect())
}

/// `ψ̂(u, T)`: fraction of surplus paths ruined by `T`.
pub fn ruin_prob_finite<P: PathRunner>(model: &RiskModel, u: f64, t: f64, cfg: &SimConfig, runner: &P) -> Result<McEstimate> {
    Ok(ruin_prob_finite_grid(model, u, &[t], cfg, runner)?[0])
}

/// `P̂(Y(T) ≥ u)` for the dual started at 0, indexed `[T][u]`.
pub fn dual_tail_probs<P: PathRunner>(
    model: &RiskModel,
    us: &[f64],
    ts: &[f64],
    cfg: &SimConfig,
    runner: &P,
) -> Result<Vec<Vec<McEstimate>>> {
    for &u in us {
        check_level(u)?;
    }
    let horizon = check_times(ts)?;
    let cfg = cfg.with_horizon(horizon);
    cfg.validate()?;
    let approx = cfg.dual_model(model)?;
    let grid = Grid::new(cfg.step, horizon, ts);
    let tol = 1e-9 * cfg.step;
    let base = RandomStream::new(cfg.seed).fork(DUAL_STREAM);
    let levels = runner.map(cfg.n_paths, |i| {
        let mut at = vec![0.0; ts.len()];
        run_dual(&approx, 0.0, &grid, &mut base.substream(i), |t, y, _, on_grid| {
            if on_grid {
                for (slot, &target) in at.iter_mut().zip(ts) {
                    if (t - target).abs() <= tol {
                        *slot = y;
                    }
                }
            }
        });
        at
    });
    Ok((0..ts.len())
        .map(|j| {
            us.iter()
                .map(|&u| {
                    let hits = levels.iter().filter(|l| l[j] >= u).count() as u64;
                    McEstimate::proportion(hits, cfg.n_paths)
                })
                .collect()
        })
        .collect())
}

pub fn dual_tail_prob<P: PathRunner>(model: &RiskModel, u: f64, t: f64, cfg: &SimConfig, runner: &P) -> Result<McEstimate> {
    Ok(dual_tail_probs(model, &[u], &[t], cfg, runner)?[0][0])
}

/// Time averages of `f(Y(t))` over grid points `t ∈ [burn_in, cfg.horizon]`
/// on [`STATIONARY_REPLICATES`] independent dual paths started at 0.
/// `f` writes one value per functional into its output slice.
fn stationary_averages<P, F>(model: &RiskModel, cfg: &SimConfig, burn_in: f64, n_fn: usize, f: F, runner: &P) -> Result<Vec<McEstimate>>
where
    P: PathRunner,
    F: Fn(f64, &mut [f64]) + Sync,
{
    if !model.net_profit_check() {
        return Err(Error::NonErgodic);
    }
    cfg.validate()?;
    if !(burn_in >= 0.0 && burn_in < cfg.horizon) {
        return Err(Error::Config("burn-in must lie in [0, horizon)"));
    }
    let approx = cfg.dual_model(model)?;
    let grid = Grid::new(cfg.step, cfg.horizon, &[]);
    let base = RandomStream::new(cfg.seed).fork(STATIONARY_STREAM);
    let reps = runner.map(STATIONARY_REPLICATES, |r| {
        let mut sums = vec![0.0; n_fn];
        let mut vals = vec![0.0; n_fn];
        let mut count = 0u64;
        run_dual(&approx, 0.0, &grid, &mut base.substream(r), |t, y, _, on_grid| {
            if on_grid && t >= burn_in {
                f(y, &mut vals);
                for (s, v) in sums.iter_mut().zip(&vals) {
                    *s += v;
                }
                count += 1;
            }
        });
        sums.iter().map(|s| s / count as f64).collect::<Vec<f64>>()
    });
    Ok((0..n_fn)
        .map(|j| {
            let xs: Vec<f64> = reps.iter().map(|r| r[j]).collect();
            McEstimate::from_samples(&xs)
        })
        .collect())
}

/// Estimate of `(π, V_λ)` with `V_λ(y) = e^{λy}`.
pub fn stationary_exp_moment<P: PathRunner>(
    model: &RiskModel,
    lambda: f64,
    cfg: &SimConfig,
    burn_in: f64,
    runner: &P,
) -> Result<McEstimate> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::domain("lambda", lambda));
    }
    Ok(stationary_averages(model, cfg, burn_in, 1, |y, out| out[0] = (lambda * y).exp(), runner)?[0])
}

/// `ψ̂(u)` for each `u`, as the stationary tail `P(Y(∞) ≥ u)`.
pub fn ultimate_ruin_probs<P: PathRunner>(
    model: &RiskModel,
    us: &[f64],
    cfg: &SimConfig,
    burn_in: f64,
    runner: &P,
) -> Result<Vec<McEstimate>> {
    for &u in us {
        check_level(u)?;
    }
    stationary_averages(
        model,
        cfg,
        burn_in,
        us.len(),
        |y, out| {
            for (o, &u) in out.iter_mut().zip(us) {
                *o = if y >= u { 1.0 } else { 0.0 };
            }
        },
        runner,
    )
}

pub fn ultimate_ruin_prob<P: PathRunner>(model: &RiskModel, u: f64, cfg: &SimConfig, burn_in: f64, runner: &P) -> Result<McEstimate> {
    Ok(ultimate_ruin_probs(model, &[u], cfg, burn_in, runner)?[0])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualityRow {
    pub u: f64,
    pub t: f64,
    pub finite: McEstimate,
    pub dual: McEstimate,
    pub diff: f64,
    pub slack: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualityReport {
    pub rows: Vec<DualityRow>,
}

impl DualityReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Compares `ψ̂(u, T)` from surplus paths with `P̂(Y(T) ≥ u)` from dual
/// paths for every `(u, T)` pair, each side using `cfg.n_paths` paths.
pub fn duality_check<P: PathRunner>(model: &RiskModel, us: &[f64], ts: &[f64], cfg: &SimConfig, runner: &P) -> Result<DualityReport> {
    let dual = dual_tail_probs(model, us, ts, cfg, runner)?;
    let mut rows = Vec::with_capacity(us.len() * ts.len());
    for (i, &u) in us.iter().enumerate() {
        let finite = ruin_prob_finite_grid(model, u, ts, cfg, runner)?;
        for (j, &t) in ts.iter().enumerate() {
            let (f, d) = (finite[j], dual[j][i]);
            let diff = f.mean - d.mean;
            let slack = SIGMA_SLACK * (f.stderr + d.stderr);
            rows.push(DualityRow { u, t, finite: f, dual: d, diff, slack, pass: diff.abs() <= slack });
        }
    }
    Ok(DualityReport { rows })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundRow {
    pub t: f64,
    pub psi_t: McEstimate,
    pub gap: f64,
    pub bound: f64,
    /// Combined standard error of `ψ̂(u)` and `ψ̂(u, T)`.
    pub stderr: f64,
    pub pass: bool,
}

/// Least-squares slope of `−ln(gap)` against `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub rate: f64,
    pub stderr: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub u: f64,
    pub lambda: f64,
    pub k: f64,
    pub psi: McEstimate,
    pub moment: McEstimate,
    /// `Ĉ = 1 + (π, V̂_λ)`.
    pub c_hat: f64,
    pub rows: Vec<BoundRow>,
    pub decay: Option<DecayFit>,
}

impl BoundReport {
    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }
}

/// Knobs of [`verify_bound`] beyond the simulation config.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BoundOptions {
    /// Burn-in for the stationary estimates; defaults to `10/k`.
    pub burn_in: Option<f64>,
    /// Exponent of `V_λ`; defaults to `λ*`.
    pub lambda: Option<f64>,
}

pub const DECAY_WINDOW: (f64, f64) = (5.0, 20.0);

fn decay_fit(rows: &[BoundRow]) -> Option<DecayFit> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.t >= DECAY_WINDOW.0 && r.t <= DECAY_WINDOW.1 && r.gap > 0.0)
        .map(|r| (r.t, r.gap.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let ssr: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
    Some(DecayFit { rate: -slope, stderr: (ssr / (n - 2.0) / sxx).sqrt(), points: pts.len() })
}

/// Checks `0 ≤ ψ(u) − ψ(u, T) ≤ (1 + (π, V_λ)) e^{−kT}` on `ts`, each side
/// with [`SIGMA_SLACK`] combined standard errors. Finite-horizon estimates
/// use `cfg.n_paths` surplus paths; stationary estimates run the dual up to
/// `cfg.horizon`.
pub fn verify_bound<P: PathRunner>(
    model: &RiskModel,
    u: f64,
    ts: &[f64],
    cfg: &SimConfig,
    opts: BoundOptions,
    runner: &P,
) -> Result<BoundReport> {
    check_level(u)?;
    check_times(ts)?;
    let rate = solve_rate(model)?;
    let lambda = opts.lambda.unwrap_or(rate.lambda_star);
    if !(lambda >= 0.0 && lambda <= rate.lambda_star) {
        return Err(Error::domain("lambda", lambda));
    }
    let burn_in = opts.burn_in.unwrap_or(10.0 / rate.k);
    let stationary = stationary_averages(
        model,
        cfg,
        burn_in,
        2,
        |y, out| {
            out[0] = if y >= u { 1.0 } else { 0.0 };
            out[1] = (lambda * y).exp();
        },
        runner,
    )?;
    let (psi, moment) = (stationary[0], stationary[1]);
    let c_hat = 1.0 + moment.mean;
    let finite = ruin_prob_finite_grid(model, u, ts, cfg, runner)?;
    let rows: Vec<BoundRow> = ts
        .iter()
        .zip(finite)
        .map(|(&t, psi_t)| {
            let gap = psi.mean - psi_t.mean;
            let bound = c_hat * (-rate.k * t).exp();
            let stderr = psi.stderr + psi_t.stderr;
            let slack = SIGMA_SLACK * stderr;
            BoundRow { t, psi_t, gap, bound, stderr, pass: gap <= bound + slack && gap >= -slack }
        })
        .collect();
    let decay = decay_fit(&rows);
    Ok(BoundReport { u, lambda, k: rate.k, psi, moment, c_hat, rows, decay })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::{ClaimDistribution, JumpModel};
    use crate::risk::{PremiumRule, VolatilityRule};

    fn model(p: f64, jumps: JumpModel) -> RiskModel {
        RiskModel::new(PremiumRule::constant(p).unwrap(), VolatilityRule::constant(0.0).unwrap(), jumps)
    }

    fn cp_exp() -> RiskModel {
        model(2.2, JumpModel::compound_poisson(1.0, ClaimDistribution::exponential(0.5).unwrap()).unwrap())
    }

    #[test]
    fn proportion_and_ci() {
        let e = McEstimate::proportion(25, 100);
        assert_eq!(e.mean, 0.25);
        assert!((e.stderr - (0.25f64 * 0.75 / 100.0).sqrt()).abs() < 1e-15);
        let (lo, hi) = e.ci95();
        assert!((hi - lo - 2.0 * 1.96 * e.stderr).abs() < 1e-15);
        let s = McEstimate::from_samples(&[1.0, 2.0, 3.0]);
        assert_eq!(s.mean, 2.0);
        assert!((s.stderr - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_capital_is_certain_ruin() {
        let cfg = SimConfig::new(0.1, 1.0, 200, 7);
        let e = ruin_prob_finite(&cp_exp(), 0.0, 1.0, &cfg, &Sequential).unwrap();
        assert_eq!((e.mean, e.stderr), (1.0, 0.0));
        let d = dual_tail_prob(&cp_exp(), 0.0, 1.0, &cfg, &Sequential).unwrap();
        assert_eq!(d.mean, 1.0);
    }

    #[test]
    fn huge_capital_is_safe() {
        let cfg = SimConfig::new(0.1, 2.0, 500, 7);
        let e = ruin_prob_finite(&cp_exp(), 200.0, 2.0, &cfg, &Sequential).unwrap();
        assert_eq!(e.mean, 0.0);
    }

    #[test]
    fn degenerate_model_has_unit_moment() {
        let m = model(2.0, JumpModel::none());
        let cfg = SimConfig::new(0.1, 50.0, 1, 3);
        let e = stationary_exp_moment(&m, 0.5, &cfg, 5.0, &Sequential).unwrap();
        assert_eq!((e.mean, e.stderr), (1.0, 0.0));
    }

    #[test]
    fn stationary_errors() {
        let cfg = SimConfig::new(0.1, 50.0, 1, 3);
        let bad = model(2.0, JumpModel::compound_poisson(1.0, ClaimDistribution::gamma(2.0, 1.0).unwrap()).unwrap());
        assert!(matches!(ultimate_ruin_prob(&bad, 1.0, &cfg, 5.0, &Sequential), Err(Error::NonErgodic)));
        assert!(matches!(ultimate_ruin_prob(&cp_exp(), 1.0, &cfg, 50.0, &Sequential), Err(Error::Config(_))));
        assert!(ultimate_ruin_prob(&cp_exp(), -1.0, &cfg, 5.0, &Sequential).is_err());
    }

    #[test]
    fn decay_fit_recovers_exponential() {
        let rows: Vec<BoundRow> = [5.0, 10.0, 15.0, 20.0]
            .iter()
            .map(|&t| BoundRow {
                t,
                psi_t: McEstimate::proportion(0, 1),
                gap: 0.3 * (-0.2 * t).exp(),
                bound: 1.0,
                stderr: 0.0,
                pass: true,
            })
            .collect();
        let fit = decay_fit(&rows).unwrap();
        assert!((fit.rate - 0.2).abs() < 1e-12);
        assert!(fit.stderr < 1e-10);
        assert_eq!(fit.points, 4);
    }
}
