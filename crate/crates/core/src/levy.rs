//! Claim-size laws and subordinator (jump) models.
//!
//! Every model exposes its Lévy exponent `κ(λ) = ∫(e^{λx} − 1) μ(dx)` with
//! first and second derivatives, the mean jump rate `m(μ) = κ'(0)`, an exact
//! sampler for increments `L(t + dt) − L(t)`, and the finite-activity
//! restriction of `μ` to `[ε, 1/ε]`.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::sync::Arc;
use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, Poisson, StandardNormal};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;

/// Which derivative of a transform to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    Value,
    First,
    Second,
}

/// Claim-size distribution of a compound Poisson driver.
#[derive(Debug, Clone, PartialEq)]
pub enum ClaimDistribution {
    Exponential { rate: f64 },
    Gamma { shape: f64, rate: f64 },
    /// `weight · Exp(rate1) + (1 − weight) · Exp(rate2)`.
    MixedExponential { weight: f64, rate1: f64, rate2: f64 },
    /// Normalized restriction of an infinite Lévy measure to a compact interval.
    Truncated(Arc<TruncatedLaw>),
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::param(name, v))
    }
}

impl ClaimDistribution {
    pub fn exponential(rate: f64) -> Result<Self> {
        Ok(ClaimDistribution::Exponential { rate: positive("rate", rate)? })
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        Ok(ClaimDistribution::Gamma { shape: positive("shape", shape)?, rate: positive("rate", rate)? })
    }

    pub fn mixed_exponential(weight: f64, rate1: f64, rate2: f64) -> Result<Self> {
        if !(weight > 0.0 && weight < 1.0) {
            return Err(Error::param("weight", weight));
        }
        Ok(ClaimDistribution::MixedExponential {
            weight,
            rate1: positive("rate1", rate1)?,
            rate2: positive("rate2", rate2)?,
        })
    }

    /// Abscissa of convergence of the MGF.
    pub fn lambda_max(&self) -> f64 {
        match *self {
            ClaimDistribution::Exponential { rate } => rate,
            ClaimDistribution::Gamma { rate, .. } => rate,
            ClaimDistribution::MixedExponential { rate1, rate2, .. } => rate1.min(rate2),
            ClaimDistribution::Truncated(_) => f64::INFINITY,
        }
    }

    pub fn mean(&self) -> f64 {
        match self {
            ClaimDistribution::Exponential { rate } => 1.0 / rate,
            ClaimDistribution::Gamma { shape, rate } => shape / rate,
            ClaimDistribution::MixedExponential { weight, rate1, rate2 } => {
                weight / rate1 + (1.0 - weight) / rate2
            }
            ClaimDistribution::Truncated(law) => law.moment(0.0, 1),
        }
    }

    /// `B̂(λ)`, `B̂'(λ)` or `B̂''(λ)` for `0 ≤ λ < λ_max`.
    pub fn mgf(&self, lambda: f64, order: Order) -> Result<f64> {
        if !(lambda >= 0.0 && lambda < self.lambda_max()) {
            return Err(Error::domain("lambda", lambda));
        }
        let exp_mgf = |d: f64| {
            let r = 1.0 / (d - lambda);
            match order {
                Order::Value => d * r,
                Order::First => d * r * r,
                Order::Second => 2.0 * d * r * r * r,
            }
        };
        Ok(match self {
            ClaimDistribution::Exponential { rate } => exp_mgf(*rate),
            ClaimDistribution::Gamma { shape, rate } => {
                let r = 1.0 / (rate - lambda);
                let value = (-shape * (-lambda / rate).ln_1p()).exp();
                match order {
                    Order::Value => value,
                    Order::First => shape * r * value,
                    Order::Second => shape * (shape + 1.0) * r * r * value,
                }
            }
            ClaimDistribution::MixedExponential { weight, rate1, rate2 } => {
                weight * exp_mgf(*rate1) + (1.0 - weight) * exp_mgf(*rate2)
            }
            ClaimDistribution::Truncated(law) => {
                let k = match order {
                    Order::Value => 0,
                    Order::First => 1,
                    Order::Second => 2,
                };
                law.moment(lambda, k)
            }
        })
    }

    /// `B̂(λ) − 1`, written so that it vanishes exactly at `λ = 0`.
    fn mgf_excess(&self, lambda: f64) -> Result<f64> {
        if !(lambda >= 0.0 && lambda < self.lambda_max()) {
            return Err(Error::domain("lambda", lambda));
        }
        Ok(match self {
            ClaimDistribution::Exponential { rate } => lambda / (rate - lambda),
            ClaimDistribution::Gamma { shape, rate } => (-shape * (-lambda / rate).ln_1p()).exp_m1(),
            ClaimDistribution::MixedExponential { weight, rate1, rate2 } => {
                weight * lambda / (rate1 - lambda) + (1.0 - weight) * lambda / (rate2 - lambda)
            }
            ClaimDistribution::Truncated(_) if lambda == 0.0 => 0.0,
            ClaimDistribution::Truncated(law) => law.moment(lambda, 0) - 1.0,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            ClaimDistribution::Exponential { rate } => sample_exp(rng) / rate,
            ClaimDistribution::Gamma { shape, rate } => sample_gamma(*shape, *rate, rng),
            ClaimDistribution::MixedExponential { weight, rate1, rate2 } => {
                let pick = rng.random::<f64>() < *weight;
                sample_exp(rng) / if pick { *rate1 } else { *rate2 }
            }
            ClaimDistribution::Truncated(law) => law.sample(rng),
        }
    }
}

/// An infinite-activity Lévy density on `(0, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LevyDensity {
    /// `α e^{−βx} / x`.
    Gamma { alpha: f64, beta: f64 },
    /// `e^{−γ²x/2} / (√(2π) x^{3/2})`.
    InverseGaussian { gamma: f64 },
}

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

impl LevyDensity {
    /// `ln ν(x) + λx`, the log of the tilted density.
    fn ln_tilted(&self, x: f64, lambda: f64) -> f64 {
        match *self {
            LevyDensity::Gamma { alpha, beta } => alpha.ln() + (lambda - beta) * x - x.ln(),
            LevyDensity::InverseGaussian { gamma } => {
                (lambda - 0.5 * gamma * gamma) * x - 1.5 * x.ln() - LN_SQRT_2PI
            }
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        self.ln_tilted(x, 0.0).exp()
    }

    /// `∫ x ν(dx)` over `(0, lo) ∪ (hi, ∞)`, in closed form.
    pub fn tail_mean(&self, lo: f64, hi: f64) -> f64 {
        match *self {
            LevyDensity::Gamma { alpha, beta } => {
                alpha / beta * (-(-beta * lo).exp_m1() + (-beta * hi).exp())
            }
            LevyDensity::InverseGaussian { gamma } => {
                let c = gamma * core::f64::consts::FRAC_1_SQRT_2;
                (libm::erf(c * lo.sqrt()) + libm::erfc(c * hi.sqrt())) / gamma
            }
        }
    }
}

/// Number of log-spaced nodes in the inverse-CDF table.
pub const TABLE_NODES: usize = 1000;

/// Normalized restriction of a [`LevyDensity`] to `[ε, 1/ε]`, with a
/// tabulated CDF for inverse-transform sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedLaw {
    source: LevyDensity,
    lower: f64,
    upper: f64,
    mass: f64,
    log_nodes: Vec<f64>,
    cdf: Vec<f64>,
}

impl TruncatedLaw {
    pub fn new(source: LevyDensity, eps: f64) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::domain("epsilon", eps));
        }
        let (lower, upper) = (eps, 1.0 / eps);
        let (s0, s1) = (lower.ln(), upper.ln());
        let ds = (s1 - s0) / (TABLE_NODES - 1) as f64;
        let log_nodes: Vec<f64> = (0..TABLE_NODES).map(|i| s0 + ds * i as f64).collect();
        let mut cdf = Vec::with_capacity(TABLE_NODES);
        cdf.push(0.0);
        let mut acc = 0.0;
        for w in log_nodes.windows(2) {
            acc += gauss_legendre(|s| (source.ln_tilted(s.exp(), 0.0) + s).exp(), w[0], w[1]);
            cdf.push(acc);
        }
        let mass = acc;
        for c in cdf.iter_mut() {
            *c /= mass;
        }
        *cdf.last_mut().unwrap() = 1.0;
        Ok(TruncatedLaw { source, lower, upper, mass, log_nodes, cdf })
    }

    pub fn source(&self) -> LevyDensity {
        self.source
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    /// Total mass `μ([ε, 1/ε])`.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// `E[U^k e^{λU}]` for the normalized law.
    pub fn moment(&self, lambda: f64, k: i32) -> f64 {
        let integral: f64 = self
            .log_nodes
            .windows(2)
            .map(|w| {
                gauss_legendre(
                    |s| {
                        let x = s.exp();
                        (self.source.ln_tilted(x, lambda) + s).exp() * x.powi(k)
                    },
                    w[0],
                    w[1],
                )
            })
            .sum();
        integral / self.mass
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let i = self.cdf.partition_point(|&c| c <= u).clamp(1, TABLE_NODES - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let frac = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.5 };
        let s = self.log_nodes[i - 1] + frac * (self.log_nodes[i] - self.log_nodes[i - 1]);
        s.exp()
    }
}

/// The driving subordinator `L`.
#[derive(Debug, Clone, PartialEq)]
pub enum JumpModel {
    /// Jumps at Poisson epochs with rate `intensity` (zero means `L ≡ 0`).
    CompoundPoisson { intensity: f64, claims: ClaimDistribution },
    GammaProcess { alpha: f64, beta: f64 },
    InverseGaussian { gamma: f64 },
}

impl JumpModel {
    pub fn compound_poisson(intensity: f64, claims: ClaimDistribution) -> Result<Self> {
        if !(intensity >= 0.0 && intensity.is_finite()) {
            return Err(Error::param("intensity", intensity));
        }
        Ok(JumpModel::CompoundPoisson { intensity, claims })
    }

    pub fn gamma_process(alpha: f64, beta: f64) -> Result<Self> {
        Ok(JumpModel::GammaProcess { alpha: positive("alpha", alpha)?, beta: positive("beta", beta)? })
    }

    pub fn inverse_gaussian(gamma: f64) -> Result<Self> {
        Ok(JumpModel::InverseGaussian { gamma: positive("gamma", gamma)? })
    }

    /// `L ≡ 0`.
    pub fn none() -> Self {
        JumpModel::CompoundPoisson { intensity: 0.0, claims: ClaimDistribution::Exponential { rate: 1.0 } }
    }

    /// `λ₀`: κ is finite on `[0, λ₀)`.
    pub fn lambda_max(&self) -> f64 {
        match self {
            JumpModel::CompoundPoisson { claims, .. } => claims.lambda_max(),
            JumpModel::GammaProcess { beta, .. } => *beta,
            JumpModel::InverseGaussian { gamma } => 0.5 * gamma * gamma,
        }
    }

    /// Whether `κ(λ₀)` itself is finite, so a rate search may include `λ₀`.
    pub fn finite_at_lambda_max(&self) -> bool {
        matches!(self, JumpModel::InverseGaussian { .. })
    }

    pub fn is_finite_activity(&self) -> bool {
        matches!(self, JumpModel::CompoundPoisson { .. })
    }

    pub fn levy_density(&self) -> Option<LevyDensity> {
        match *self {
            JumpModel::CompoundPoisson { .. } => None,
            JumpModel::GammaProcess { alpha, beta } => Some(LevyDensity::Gamma { alpha, beta }),
            JumpModel::InverseGaussian { gamma } => Some(LevyDensity::InverseGaussian { gamma }),
        }
    }

    /// `κ(λ)`, `κ'(λ)` or `κ''(λ)`.
    pub fn exponent(&self, lambda: f64, order: Order) -> Result<f64> {
        let lmax = self.lambda_max();
        let at_edge = lambda == lmax && order == Order::Value && self.finite_at_lambda_max();
        if !(lambda >= 0.0 && (lambda < lmax || at_edge)) {
            return Err(Error::domain("lambda", lambda));
        }
        Ok(match self {
            JumpModel::CompoundPoisson { intensity, claims } => match order {
                Order::Value => intensity * claims.mgf_excess(lambda)?,
                _ => intensity * claims.mgf(lambda, order)?,
            },
            JumpModel::GammaProcess { alpha, beta } => {
                let r = 1.0 / (beta - lambda);
                match order {
                    Order::Value => -alpha * (-lambda / beta).ln_1p(),
                    Order::First => alpha * r,
                    Order::Second => alpha * r * r,
                }
            }
            JumpModel::InverseGaussian { gamma } => {
                let root = (gamma * gamma - 2.0 * lambda).sqrt();
                match order {
                    Order::Value => 2.0 * lambda / (gamma + root),
                    Order::First => 1.0 / root,
                    Order::Second => 1.0 / (root * root * root),
                }
            }
        })
    }

    /// `m(μ) = ∫ x μ(dx)`.
    pub fn mean(&self) -> f64 {
        match self {
            JumpModel::CompoundPoisson { intensity, claims } => intensity * claims.mean(),
            JumpModel::GammaProcess { alpha, beta } => alpha / beta,
            JumpModel::InverseGaussian { gamma } => 1.0 / gamma,
        }
    }

    /// One draw of `L(t + dt) − L(t)` from its exact law.
    pub fn sample_increment<R: Rng + ?Sized>(&self, dt: f64, rng: &mut R) -> f64 {
        match self {
            JumpModel::CompoundPoisson { intensity, claims } => {
                let rate = intensity * dt;
                if rate <= 0.0 {
                    return 0.0;
                }
                let n: f64 = Poisson::new(rate).expect("positive Poisson rate").sample(rng);
                (0..n as u64).map(|_| claims.sample(rng)).sum()
            }
            JumpModel::GammaProcess { alpha, beta } => sample_gamma(alpha * dt, *beta, rng),
            JumpModel::InverseGaussian { gamma } => sample_inverse_gaussian(dt / gamma, dt * dt, rng),
        }
    }

    /// Finite-activity approximation with Lévy measure `μ(· ∩ [ε, 1/ε])`.
    /// Compound Poisson models are already finite activity and are returned
    /// unchanged for any `ε ≥ 0`.
    pub fn truncate(&self, eps: f64) -> Result<JumpModel> {
        match self.levy_density() {
            None if eps >= 0.0 => Ok(self.clone()),
            None => Err(Error::domain("epsilon", eps)),
            Some(density) => {
                let law = TruncatedLaw::new(density, eps)?;
                Ok(JumpModel::CompoundPoisson {
                    intensity: law.mass(),
                    claims: ClaimDistribution::Truncated(Arc::new(law)),
                })
            }
        }
    }
}

pub(crate) fn sample_exp<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    Exp1.sample(rng)
}

pub(crate) fn sample_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

fn sample_gamma<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> f64 {
    Gamma::new(shape, 1.0 / rate).expect("positive gamma parameters").sample(rng)
}

/// Michael–Schucany–Haas transform for `IG(mean, shape)`.
///
/// The smaller root is written as `4μ²λy / (μy + √(μ²y² + 4μλy))²`, which
/// stays accurate when `shape ≪ mean` (small time steps).
pub fn sample_inverse_gaussian<R: Rng + ?Sized>(mean: f64, shape: f64, rng: &mut R) -> f64 {
    let z = sample_normal(rng);
    let y = z * z;
    let my = mean * y;
    let root = if y == 0.0 {
        mean
    } else {
        let d = my + (my * my + 4.0 * mean * shape * y).sqrt();
        4.0 * mean * mean * shape * y / (d * d)
    };
    let u: f64 = rng.random();
    if u * (mean + root) <= mean {
        root
    } else {
        mean * mean / root
    }
}
