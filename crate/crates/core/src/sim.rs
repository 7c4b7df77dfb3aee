//! Path simulation for the surplus `X` (absorbed at zero), its Siegmund dual
//! `Y` (reflected at zero) and order-preserving coupled pairs.
//!
//! Both processes are advanced by an Euler scheme on a time grid of step
//! `h`. Compound Poisson jump epochs are simulated exactly: a grid cell is
//! split at every epoch, the diffusive part is advanced over each piece and
//! the jump is applied at its epoch. Infinite-activity subordinators use
//! their exact increment law per cell on the surplus side, and the
//! ε-approximation (jumps on `[ε, 1/ε]`, volatility `σ + ε`) on the dual side,
//! by default with the premium lowered by the truncated jump mean.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::levy::{sample_exp, sample_normal, ClaimDistribution, JumpModel};
use crate::risk::RiskModel;

pub const DEFAULT_STEP: f64 = 1e-2;
pub const DEFAULT_EPS: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    /// Grid step `h`.
    pub step: f64,
    /// Horizon `T`.
    pub horizon: f64,
    pub n_paths: u64,
    pub seed: u64,
    /// Truncation level for infinite-activity jumps on the dual side.
    pub eps: f64,
    /// Whether the dual of an infinite-activity model restores the jump mean
    /// removed by truncation through its drift.
    pub compensate: bool,
}

impl SimConfig {
    pub fn new(step: f64, horizon: f64, n_paths: u64, seed: u64) -> Self {
        SimConfig { step, horizon, n_paths, seed, eps: DEFAULT_EPS, compensate: true }
    }

    pub fn with_eps(mut self, eps: f64) -> Self {
        self.eps = eps;
        self
    }

    pub fn with_compensation(mut self, compensate: bool) -> Self {
        self.compensate = compensate;
        self
    }

    pub fn with_horizon(mut self, horizon: f64) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::Config("step must be positive"));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Config("horizon must be positive"));
        }
        if self.step > self.horizon {
            return Err(Error::Config("step exceeds horizon"));
        }
        if self.n_paths == 0 {
            return Err(Error::Config("at least one path is required"));
        }
        if !(self.eps >= 0.0) {
            return Err(Error::Config("epsilon must be nonnegative"));
        }
        Ok(())
    }

    /// Model actually simulated on the dual side.
    pub(crate) fn dual_model(&self, model: &RiskModel) -> Result<RiskModel> {
        if !model.jumps.is_finite_activity() && !(self.eps > 0.0) {
            return Err(Error::Config("infinite-activity jumps need epsilon > 0"));
        }
        if self.compensate {
            model.compensated_approximation(self.eps)
        } else {
            model.epsilon_approximation(self.eps)
        }
    }
}

/// A simulated trajectory. `times` holds every grid point and, for
/// compound Poisson drivers, each jump epoch twice (pre- and post-jump).
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PathSample {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Cumulative reflection `R(t)`; identically zero for surplus paths.
    pub reflection: Vec<f64>,
    /// First time the level is `≤ 0` (surplus paths only).
    pub ruin_time: Option<f64>,
}

impl PathSample {
    fn push(&mut self, t: f64, v: f64, r: f64) {
        self.times.push(t);
        self.values.push(v);
        self.reflection.push(r);
    }

    pub fn ruined_at(&self, t: f64) -> bool {
        self.ruin_time.is_some_and(|rt| rt <= t)
    }
}

/// Cell boundaries: multiples of `step` up to `horizon`, merged with extra
/// checkpoints so that every checkpoint is hit exactly.
#[derive(Debug, Clone)]
pub(crate) struct Grid {
    step: f64,
    horizon: f64,
    checkpoints: Vec<f64>,
}

impl Grid {
    pub(crate) fn new(step: f64, horizon: f64, extra: &[f64]) -> Self {
        let mut checkpoints: Vec<f64> = extra.iter().copied().filter(|&t| t > 0.0 && t < horizon).collect();
        checkpoints.sort_by(|a, b| a.partial_cmp(b).unwrap());
        checkpoints.dedup();
        Grid { step, horizon, checkpoints }
    }

    pub(crate) fn ends(&self) -> GridIter<'_> {
        GridIter { grid: self, i: 1, j: 0, done: false }
    }
}

pub(crate) struct GridIter<'g> {
    grid: &'g Grid,
    i: u64,
    j: usize,
    done: bool,
}

impl Iterator for GridIter<'_> {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        if self.done {
            return None;
        }
        let g = self.grid;
        let tol = 1e-9 * g.step;
        let mut t = (self.i as f64 * g.step).min(g.horizon);
        if t > g.horizon - tol {
            t = g.horizon;
        }
        if let Some(&c) = g.checkpoints.get(self.j) {
            if c < t - tol {
                self.j += 1;
                return Some(c);
            }
            if (c - t).abs() <= tol {
                self.j += 1;
            }
        }
        self.i += 1;
        if t == g.horizon {
            self.done = true;
        }
        Some(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Shock {
    /// Diffusive piece over `dt` with standard normal `z`.
    Diffuse { dt: f64, z: f64 },
    /// Upward jump of the subordinator.
    Jump(f64),
}

enum Mode<'m> {
    Epochs { intensity: f64, claims: &'m ClaimDistribution },
    Increments(&'m JumpModel),
}

/// Noise source shared by every integrator: produces the shocks of one grid
/// cell at a time. Draws depend only on the model, never on the state, so
/// coupled paths can consume the same shocks.
pub(crate) struct Driver<'m> {
    mode: Mode<'m>,
    diffusive: bool,
    now: f64,
    next_epoch: f64,
}

impl<'m> Driver<'m> {
    pub(crate) fn new<R: Rng + ?Sized>(model: &'m RiskModel, rng: &mut R) -> Self {
        let diffusive = !model.volatility.is_zero();
        match &model.jumps {
            JumpModel::CompoundPoisson { intensity, claims } => {
                let next_epoch = if *intensity > 0.0 { sample_exp(rng) / intensity } else { f64::INFINITY };
                Driver { mode: Mode::Epochs { intensity: *intensity, claims }, diffusive, now: 0.0, next_epoch }
            }
            jumps => Driver { mode: Mode::Increments(jumps), diffusive, now: 0.0, next_epoch: f64::INFINITY },
        }
    }

    /// Whether intermediate jump epochs are meaningful observation points.
    pub(crate) fn has_epochs(&self) -> bool {
        matches!(self.mode, Mode::Epochs { .. })
    }

    fn normal<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.diffusive {
            sample_normal(rng)
        } else {
            0.0
        }
    }

    /// Shocks from the current time to `t_end`, each tagged with its end time.
    pub(crate) fn cell<R: Rng + ?Sized>(&mut self, t_end: f64, rng: &mut R, out: &mut Vec<(f64, Shock)>) {
        out.clear();
        match self.mode {
            Mode::Epochs { intensity, claims } => {
                while self.next_epoch < t_end {
                    let epoch = self.next_epoch;
                    let z = self.normal(rng);
                    out.push((epoch, Shock::Diffuse { dt: epoch - self.now, z }));
                    out.push((epoch, Shock::Jump(claims.sample(rng))));
                    self.now = epoch;
                    self.next_epoch = epoch + sample_exp(rng) / intensity;
                }
                let z = self.normal(rng);
                out.push((t_end, Shock::Diffuse { dt: t_end - self.now, z }));
            }
            Mode::Increments(jumps) => {
                let dt = t_end - self.now;
                let z = self.normal(rng);
                out.push((t_end, Shock::Diffuse { dt, z }));
                out.push((t_end, Shock::Jump(jumps.sample_increment(dt, rng))));
            }
        }
        self.now = t_end;
    }
}

/// Euler state of the surplus process.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Surplus {
    pub(crate) x: f64,
    pub(crate) ruin: Option<f64>,
}

impl Surplus {
    pub(crate) fn new(u: f64) -> Self {
        Surplus { x: u, ruin: if u <= 0.0 { Some(0.0) } else { None } }
    }

    /// Applies one shock. With `absorb` the state is frozen once ruined.
    pub(crate) fn apply(&mut self, model: &RiskModel, t: f64, shock: Shock, absorb: bool) {
        if absorb && self.ruin.is_some() {
            return;
        }
        match shock {
            Shock::Diffuse { dt, z } => {
                let x = self.x;
                self.x += model.premium.rate(x) * dt + model.volatility.value(x) * dt.sqrt() * z;
            }
            Shock::Jump(size) => self.x -= size,
        }
        if self.x <= 0.0 && self.ruin.is_none() {
            self.ruin = Some(t);
        }
    }
}

/// Euler state of the reflected dual process.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Dual {
    pub(crate) y: f64,
    pub(crate) reflection: f64,
}

impl Dual {
    pub(crate) fn new(y0: f64) -> Self {
        Dual { y: y0, reflection: 0.0 }
    }

    pub(crate) fn apply(&mut self, model: &RiskModel, shock: Shock) {
        match shock {
            Shock::Diffuse { dt, z } => {
                let y = self.y;
                let v = y + model.dual_drift(y) * dt + model.volatility.value(y) * dt.sqrt() * z;
                if v < 0.0 {
                    self.reflection -= v;
                    self.y = 0.0;
                } else {
                    self.y = v;
                }
            }
            Shock::Jump(size) => self.y += size,
        }
    }
}

/// `S(z)_i = z_i + max(0, max_{j ≤ i} −z_j)`, returned with its compensator.
pub fn skorohod_map(z: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut push = 0.0f64;
    let r: Vec<f64> = z
        .iter()
        .map(|&v| {
            push = push.max(-v);
            push
        })
        .collect();
    let y = z.iter().zip(&r).map(|(a, b)| a + b).collect();
    (y, r)
}

fn check_level(name: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(name, v))
    }
}

fn surplus_path<R: Rng + ?Sized>(model: &RiskModel, u: f64, cfg: &SimConfig, rng: &mut R, absorb: bool) -> Result<PathSample> {
    cfg.validate()?;
    check_level("initial capital", u)?;
    let grid = Grid::new(cfg.step, cfg.horizon, &[]);
    let mut state = Surplus::new(u);
    let mut path = PathSample::default();
    path.push(0.0, u, 0.0);
    let mut driver = Driver::new(model, rng);
    let epochs = driver.has_epochs();
    let mut shocks = Vec::new();
    for t_end in grid.ends() {
        if absorb && state.ruin.is_some() {
            path.push(t_end, state.x, 0.0);
            continue;
        }
        driver.cell(t_end, rng, &mut shocks);
        let last = shocks.len() - 1;
        for (k, &(t, shock)) in shocks.iter().enumerate() {
            state.apply(model, t, shock, absorb);
            if epochs && k < last {
                path.push(t, state.x, 0.0);
            }
        }
        path.push(t_end, state.x, 0.0);
    }
    path.ruin_time = state.ruin;
    Ok(path)
}

/// Surplus path absorbed (frozen) at the first time it is `≤ 0`.
pub fn simulate_surplus<R: Rng + ?Sized>(model: &RiskModel, u: f64, cfg: &SimConfig, rng: &mut R) -> Result<PathSample> {
    surplus_path(model, u, cfg, rng, true)
}

/// Surplus path that keeps evolving after ruin; `ruin_time` still records
/// the first passage.
pub fn simulate_free_surplus<R: Rng + ?Sized>(model: &RiskModel, u: f64, cfg: &SimConfig, rng: &mut R) -> Result<PathSample> {
    surplus_path(model, u, cfg, rng, false)
}

/// Runs the dual on an already-approximated model, calling `observe` at
/// every recorded point with `(t, y, R(t), is_grid_point)`.
pub(crate) fn run_dual<R, F>(approx: &RiskModel, y0: f64, grid: &Grid, rng: &mut R, mut observe: F)
where
    R: Rng + ?Sized,
    F: FnMut(f64, f64, f64, bool),
{
    let mut state = Dual::new(y0);
    let mut driver = Driver::new(approx, rng);
    let epochs = driver.has_epochs();
    let mut shocks = Vec::new();
    for t_end in grid.ends() {
        driver.cell(t_end, rng, &mut shocks);
        let last = shocks.len() - 1;
        for (k, &(t, shock)) in shocks.iter().enumerate() {
            state.apply(approx, shock);
            if epochs && k < last {
                observe(t, state.y, state.reflection, false);
            }
        }
        observe(t_end, state.y, state.reflection, true);
    }
}

/// Reflected dual path started at `y0`.
pub fn simulate_dual<R: Rng + ?Sized>(model: &RiskModel, y0: f64, cfg: &SimConfig, rng: &mut R) -> Result<PathSample> {
    cfg.validate()?;
    check_level("initial level", y0)?;
    let approx = cfg.dual_model(model)?;
    let grid = Grid::new(cfg.step, cfg.horizon, &[]);
    let mut path = PathSample::default();
    path.push(0.0, y0, 0.0);
    run_dual(&approx, y0, &grid, rng, |t, y, r, _| path.push(t, y, r));
    Ok(path)
}

/// Two surplus paths from `x1 ≥ x2` driven by identical noise.
pub fn simulate_coupled<R: Rng + ?Sized>(
    model: &RiskModel,
    x1: f64,
    x2: f64,
    cfg: &SimConfig,
    rng: &mut R,
) -> Result<(PathSample, PathSample)> {
    cfg.validate()?;
    check_level("x2", x2)?;
    if !(x1 >= x2 && x1.is_finite()) {
        return Err(Error::domain("x1 (must be >= x2)", x1));
    }
    let grid = Grid::new(cfg.step, cfg.horizon, &[]);
    let (mut s1, mut s2) = (Surplus::new(x1), Surplus::new(x2));
    let (mut p1, mut p2) = (PathSample::default(), PathSample::default());
    p1.push(0.0, x1, 0.0);
    p2.push(0.0, x2, 0.0);
    let mut driver = Driver::new(model, rng);
    let epochs = driver.has_epochs();
    let mut shocks = Vec::new();
    for t_end in grid.ends() {
        if s1.ruin.is_some() && s2.ruin.is_some() {
            p1.push(t_end, s1.x, 0.0);
            p2.push(t_end, s2.x, 0.0);
            continue;
        }
        driver.cell(t_end, rng, &mut shocks);
        let last = shocks.len() - 1;
        for (k, &(t, shock)) in shocks.iter().enumerate() {
            s1.apply(model, t, shock, true);
            s2.apply(model, t, shock, true);
            if epochs && k < last {
                p1.push(t, s1.x, 0.0);
                p2.push(t, s2.x, 0.0);
            }
        }
        p1.push(t_end, s1.x, 0.0);
        p2.push(t_end, s2.x, 0.0);
    }
    p1.ruin_time = s1.ruin;
    p2.ruin_time = s2.ruin;
    Ok((p1, p2))
}

/// Largest `T` with `C(p*)T + 2C(σ)√T < 1` (the supremum, where equality holds).
pub fn contraction_horizon_from(drift_lipschitz: f64, sigma_lipschitz: f64) -> f64 {
    let (a, b) = (drift_lipschitz, sigma_lipschitz);
    if a == 0.0 && b == 0.0 {
        return f64::INFINITY;
    }
    let s = if a == 0.0 { 0.5 / b } else { ((b * b + a).sqrt() - b) / a };
    s * s
}

pub fn contraction_horizon(model: &RiskModel) -> f64 {
    contraction_horizon_from(model.dual_drift_lipschitz(), model.volatility.lipschitz())
}
