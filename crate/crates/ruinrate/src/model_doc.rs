//! JSON model documents.
//!
//! ```json
//! {"premium": {"type": "affine", "p": 2.2, "i": 0.05},
//!  "sigma": 1.0,
//!  "jump": {"type": "compound_poisson", "intensity": 1.0,
//!           "claims": {"type": "gamma", "shape": 2.0, "rate": 1.0}}}
//! ```

use serde::{Deserialize, Serialize};

use ruinrate_core::{ClaimDistribution, JumpModel, PremiumRule, Result, RiskModel, VolatilityRule};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub premium: PremiumDoc,
    #[serde(default)]
    pub sigma: f64,
    pub jump: JumpDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PremiumDoc {
    Constant { p: f64 },
    Affine { p: f64, i: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum JumpDoc {
    CompoundPoisson { intensity: f64, claims: ClaimsDoc },
    GammaProcess { alpha: f64, beta: f64 },
    InverseGaussian { gamma: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ClaimsDoc {
    Exponential { rate: f64 },
    Gamma { shape: f64, rate: f64 },
    MixedExponential { weight: f64, rate1: f64, rate2: f64 },
}

impl ModelDoc {
    pub fn parse(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Validates every component and assembles the model.
    pub fn build(&self) -> Result<RiskModel> {
        let premium = match self.premium {
            PremiumDoc::Constant { p } => PremiumRule::constant(p)?,
            PremiumDoc::Affine { p, i } => PremiumRule::affine(p, i)?,
        };
        let jumps = match &self.jump {
            JumpDoc::CompoundPoisson { intensity, claims } => {
                let claims = match *claims {
                    ClaimsDoc::Exponential { rate } => ClaimDistribution::exponential(rate)?,
                    ClaimsDoc::Gamma { shape, rate } => ClaimDistribution::gamma(shape, rate)?,
                    ClaimsDoc::MixedExponential { weight, rate1, rate2 } => {
                        ClaimDistribution::mixed_exponential(weight, rate1, rate2)?
                    }
                };
                JumpModel::compound_poisson(*intensity, claims)?
            }
            JumpDoc::GammaProcess { alpha, beta } => JumpModel::gamma_process(*alpha, *beta)?,
            JumpDoc::InverseGaussian { gamma } => JumpModel::inverse_gaussian(*gamma)?,
        };
        Ok(RiskModel::new(premium, VolatilityRule::constant(self.sigma)?, jumps))
    }

    /// The scenario `verify` runs when no model is given: Gamma(2,1) claims
    /// at unit intensity, 10% safety loading, no diffusion.
    pub fn default_verify() -> Self {
        ModelDoc {
            premium: PremiumDoc::Constant { p: 2.2 },
            sigma: 0.0,
            jump: JumpDoc::CompoundPoisson { intensity: 1.0, claims: ClaimsDoc::Gamma { shape: 2.0, rate: 1.0 } },
        }
    }
}
