//! Level-dependent premium and volatility rules, and the functions `φ`, `Φ`
//! built from them.

#[allow(unused_imports)]
use num_traits::Float;
use crate::error::{Error, Result};
use crate::levy::{JumpModel, Order};

/// Premium rate `p(x)`. Only rules nondecreasing in `x` are admitted, so
/// `sup_x φ(λ, x)` is attained at `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PremiumRule {
    Constant(f64),
    /// `p(x) = base + interest · x`.
    Affine { base: f64, interest: f64 },
}

impl PremiumRule {
    pub fn constant(p: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(Error::param("p", p));
        }
        Ok(PremiumRule::Constant(p))
    }

    pub fn affine(base: f64, interest: f64) -> Result<Self> {
        if !(base > 0.0 && base.is_finite()) {
            return Err(Error::param("p", base));
        }
        if !(interest >= 0.0 && interest.is_finite()) {
            return Err(Error::param("i", interest));
        }
        Ok(PremiumRule::Affine { base, interest })
    }

    pub fn rate(&self, x: f64) -> f64 {
        match *self {
            PremiumRule::Constant(p) => p,
            PremiumRule::Affine { base, interest } => base + interest * x,
        }
    }

    pub fn lipschitz(&self) -> f64 {
        match *self {
            PremiumRule::Constant(_) => 0.0,
            PremiumRule::Affine { interest, .. } => interest,
        }
    }

    /// `inf_{x ≥ 0} p(x)`.
    pub fn infimum(&self) -> f64 {
        self.rate(0.0)
    }

    /// The same rule with `delta` subtracted from every rate.
    pub fn lowered(&self, delta: f64) -> Self {
        match *self {
            PremiumRule::Constant(p) => PremiumRule::Constant(p - delta),
            PremiumRule::Affine { base, interest } => PremiumRule::Affine { base: base - delta, interest },
        }
    }
}

/// Diffusion coefficient `σ(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VolatilityRule {
    Constant(f64),
}

impl VolatilityRule {
    pub fn constant(sigma: f64) -> Result<Self> {
        if !(sigma >= 0.0 && sigma.is_finite()) {
            return Err(Error::param("sigma", sigma));
        }
        Ok(VolatilityRule::Constant(sigma))
    }

    pub fn value(&self, _x: f64) -> f64 {
        match *self {
            VolatilityRule::Constant(s) => s,
        }
    }

    pub fn derivative(&self, _x: f64) -> f64 {
        match *self {
            VolatilityRule::Constant(_) => 0.0,
        }
    }

    pub fn bound(&self) -> f64 {
        match *self {
            VolatilityRule::Constant(s) => s,
        }
    }

    pub fn lipschitz(&self) -> f64 {
        0.0
    }

    pub fn is_zero(&self) -> bool {
        self.bound() == 0.0
    }

    /// `σ + ε`, the elliptic perturbation used with truncated jumps.
    pub fn shifted(&self, eps: f64) -> Self {
        match *self {
            VolatilityRule::Constant(s) => VolatilityRule::Constant(s + eps),
        }
    }
}

/// `dX = p(X) dt + σ(X) dW − dL`.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskModel {
    pub premium: PremiumRule,
    pub volatility: VolatilityRule,
    pub jumps: JumpModel,
}

impl RiskModel {
    pub fn new(premium: PremiumRule, volatility: VolatilityRule, jumps: JumpModel) -> Self {
        RiskModel { premium, volatility, jumps }
    }

    /// Dual drift `p*(x) = −p(x) − σ(x)σ'(x)`.
    pub fn dual_drift(&self, x: f64) -> f64 {
        -self.premium.rate(x) - self.volatility.value(x) * self.volatility.derivative(x)
    }

    /// Lipschitz constant of `p*` (`σσ'` vanishes for constant σ).
    pub fn dual_drift_lipschitz(&self) -> f64 {
        self.premium.lipschitz()
    }

    /// `φ(λ, x) = p*(x)λ + σ²(x)λ²/2 + κ(λ)`.
    pub fn phi(&self, lambda: f64, x: f64) -> Result<f64> {
        if !(x >= 0.0) {
            return Err(Error::domain("x", x));
        }
        let s = self.volatility.value(x);
        Ok(self.dual_drift(x) * lambda + 0.5 * s * s * lambda * lambda + self.jumps.exponent(lambda, Order::Value)?)
    }

    /// `Φ(λ) = −sup_{x ≥ 0} φ(λ, x)` and its derivatives. With a
    /// nondecreasing premium and constant σ the supremum sits at `x = 0`.
    pub fn big_phi(&self, lambda: f64, order: Order) -> Result<f64> {
        let drift = -self.dual_drift(0.0);
        let s = self.volatility.value(0.0);
        let s2 = s * s;
        let kappa = self.jumps.exponent(lambda, order)?;
        Ok(match order {
            Order::Value => drift * lambda - 0.5 * s2 * lambda * lambda - kappa,
            Order::First => drift - s2 * lambda - kappa,
            Order::Second => -s2 - kappa,
        })
    }

    /// `p(0) − m(μ)`; positive exactly when a positive rate exists.
    pub fn net_profit_margin(&self) -> f64 {
        self.premium.infimum() - self.jumps.mean()
    }

    /// Strict `inf_x p(x) > m(μ)`.
    pub fn net_profit_check(&self) -> bool {
        self.net_profit_margin() > 0.0
    }

    /// The ε-approximation: jumps restricted to `[ε, 1/ε]`, volatility `σ + ε`.
    /// Finite-activity models are returned unchanged.
    pub fn epsilon_approximation(&self, eps: f64) -> Result<RiskModel> {
        if self.jumps.is_finite_activity() {
            return Ok(self.clone());
        }
        Ok(RiskModel {
            premium: self.premium,
            volatility: self.volatility.shifted(eps),
            jumps: self.jumps.truncate(eps)?,
        })
    }

    /// ε-approximation whose premium is lowered by the jump mean lost to
    /// truncation, so the approximating surplus keeps the original mean drift.
    pub fn compensated_approximation(&self, eps: f64) -> Result<RiskModel> {
        let mut approx = self.epsilon_approximation(eps)?;
        approx.premium = self.premium.lowered(self.jumps.mean() - approx.jumps.mean());
        Ok(approx)
    }
}
