//! Maximization of `Φ` over `(0, λ₀]`: the convergence rate `k = Φ(λ*)`.

#[allow(unused_imports)]
use num_traits::Float;
use alloc::vec::Vec;


use crate::error::{Error, Result};
use crate::levy::{ClaimDistribution, JumpModel, Order, TABLE_NODES};
use crate::risk::{RiskModel, VolatilityRule};

/// Offset of the search bracket from `0` and from a pole at `λ₀`.
pub const BRACKET_MARGIN: f64 = 1e-8;
/// Bracket width at which golden-section search stops.
pub const GOLDEN_TOL: f64 = 1e-12;
/// Maximum allowed `|λ_golden − λ_newton|`, unless flatness of `Φ` limits
/// golden-section search to a coarser resolution.
pub const AGREEMENT_TOL: f64 = 1e-8;
/// Points at which `Φ'' < 0` is certified.
const CONCAVITY_POINTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateResult {
    /// The maximizer `λ*`.
    pub lambda_star: f64,
    /// `k = Φ(λ*)`.
    pub k: f64,
    /// `|Φ'(λ*)|`.
    pub residual: f64,
    pub lambda_max: f64,
    /// `Φ'' < 0` at every certification point.
    pub concavity_ok: bool,
    /// The maximum sits on the upper end of the bracket.
    pub boundary_max: bool,
}

fn phi(model: &RiskModel, l: f64) -> f64 {
    model.big_phi(l, Order::Value).unwrap_or(f64::NEG_INFINITY)
}

fn dphi(model: &RiskModel, l: f64) -> Result<f64> {
    model.big_phi(l, Order::First)
}

/// Search interval for `λ*`. For models with an infinite abscissa (truncated
/// measures) the upper end doubles until `Φ'` turns negative.
fn bracket(model: &RiskModel) -> Result<(f64, f64)> {
    let lmax = model.jumps.lambda_max();
    if lmax.is_finite() {
        let hi = if model.jumps.finite_at_lambda_max() { lmax } else { lmax - BRACKET_MARGIN };
        return Ok((BRACKET_MARGIN.min(0.5 * hi), hi));
    }
    let mut hi = 1e-3;
    for _ in 0..200 {
        match dphi(model, hi) {
            Ok(d) if d < 0.0 || d.is_nan() => return Ok((BRACKET_MARGIN, hi)),
            Ok(_) => hi *= 2.0,
            Err(e) => return Err(e),
        }
    }
    Err(Error::domain("lambda bracket", hi))
}

/// Golden-section maximization of a unimodal function on `[a, b]`.
pub fn golden_section_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        if c >= d {
            break;
        }
    }
    let mut best = 0.5 * (a + b);
    let mut fbest = f(best);
    for (x, fx) in [(a, f(a)), (b, f(b))] {
        if fx > fbest {
            best = x;
            fbest = fx;
        }
    }
    best
}

/// Newton on `Φ'` from `start`, falling back to bisection whenever a step
/// leaves the sign-change bracket `[lo, hi]` (`Φ'(lo) > 0 > Φ'(hi)`).
fn safeguarded_newton(model: &RiskModel, start: f64, mut lo: f64, mut hi: f64) -> Result<f64> {
    let mut x = start.clamp(lo, hi);
    if x == hi && model.jumps.finite_at_lambda_max() {
        x = 0.5 * (lo + hi);
    }
    for _ in 0..200 {
        let f = dphi(model, x)?;
        if f == 0.0 {
            return Ok(x);
        }
        if f > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let fp = model.big_phi(x, Order::Second)?;
        let newton = x - f / fp;
        let next = if fp < 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs() || hi - lo <= 4.0 * f64::EPSILON * hi {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

fn concavity_certificate(model: &RiskModel, hi: f64) -> bool {
    (1..=CONCAVITY_POINTS).all(|i| {
        let l = hi * i as f64 / (CONCAVITY_POINTS + 1) as f64;
        matches!(model.big_phi(l, Order::Second), Ok(v) if v < 0.0)
    })
}

/// Smallest argmax error golden-section search can resolve from rounded
/// values of `Φ` near a maximum with curvature `Φ''`.
fn golden_resolution(model: &RiskModel, l: f64) -> f64 {
    let sigma = model.volatility.value(0.0);
    let kappa = model.jumps.exponent(l, Order::Value).unwrap_or(0.0).abs();
    let scale = model.premium.rate(0.0) * l + 0.5 * sigma * sigma * l * l + kappa;
    let curvature = model.big_phi(l, Order::Second).map(f64::abs).unwrap_or(0.0);
    let rounding = match &model.jumps {
        JumpModel::CompoundPoisson { claims: ClaimDistribution::Truncated(_), .. } => TABLE_NODES as f64 * f64::EPSILON,
        _ => f64::EPSILON,
    };
    4.0 * (rounding * scale / curvature).sqrt()
}

/// The convergence rate `k = max Φ` and its maximizer.
pub fn solve_rate(model: &RiskModel) -> Result<RateResult> {
    if !model.net_profit_check() {
        return Err(Error::NoPositiveRate);
    }
    let lambda_max = model.jumps.lambda_max();
    let (lo, hi) = bracket(model)?;
    let golden = golden_section_max(|l| phi(model, l), lo, hi, GOLDEN_TOL);

    let edge_slope = if model.jumps.finite_at_lambda_max() && hi == lambda_max {
        f64::NEG_INFINITY
    } else {
        dphi(model, hi)?
    };
    let concavity_ok = concavity_certificate(model, hi);
    if edge_slope >= 0.0 {
        return Ok(RateResult {
            lambda_star: hi,
            k: phi(model, hi),
            residual: edge_slope,
            lambda_max,
            concavity_ok,
            boundary_max: true,
        });
    }

    let newton = safeguarded_newton(model, golden, lo, hi)?;
    if (newton - golden).abs() > AGREEMENT_TOL.max(golden_resolution(model, newton)) {
        return Err(Error::Numerical { golden, newton });
    }
    let k = phi(model, newton);
    if !(k > 0.0) {
        return Err(Error::NoPositiveRate);
    }
    Ok(RateResult {
        lambda_star: newton,
        k,
        residual: dphi(model, newton)?.abs(),
        lambda_max,
        concavity_ok,
        boundary_max: false,
    })
}

/// First-order condition written per jump family:
/// `p − σ²λ − βB̂'(λ)`, `p − σ²λ − α/(β − λ)` or `p − σ²λ − 1/√(γ² − 2λ)`.
pub fn stationarity_residual(model: &RiskModel, lambda: f64) -> Result<f64> {
    let lmax = model.jumps.lambda_max();
    if !(lambda >= 0.0 && lambda < lmax) {
        return Err(Error::domain("lambda", lambda));
    }
    let p = -model.dual_drift(0.0);
    let s = model.volatility.value(0.0);
    let jump_term = match &model.jumps {
        JumpModel::CompoundPoisson { intensity, claims } => intensity * claims.mgf(lambda, Order::First)?,
        JumpModel::GammaProcess { alpha, beta } => alpha / (beta - lambda),
        JumpModel::InverseGaussian { gamma } => 1.0 / (gamma * gamma - 2.0 * lambda).sqrt(),
    };
    Ok(p - s * s * lambda - jump_term)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub eps: f64,
    pub k_eps: f64,
    /// `|k_ε − k|`.
    pub error: f64,
}

/// Rates of the ε-approximations (jumps on `[ε, 1/ε]`, volatility `σ + ε`).
pub fn truncation_sweep(model: &RiskModel, eps_list: &[f64]) -> Result<Vec<SweepPoint>> {
    if model.jumps.is_finite_activity() {
        return Err(Error::domain("truncation of a finite-activity model", 0.0));
    }
    for w in eps_list.windows(2) {
        if !(w[1] < w[0]) {
            return Err(Error::domain("epsilon sequence (must decrease)", w[1]));
        }
    }
    let k = solve_rate(model)?.k;
    eps_list
        .iter()
        .map(|&eps| {
            if !(eps > 0.0) {
                return Err(Error::domain("epsilon", eps));
            }
            let approx = model.epsilon_approximation(eps)?;
            let k_eps = solve_rate(&approx)?.k;
            Ok(SweepPoint { eps, k_eps, error: (k_eps - k).abs() })
        })
        .collect()
}

/// Rate with the volatility replaced, used by table generators.
pub fn rate_with_sigma(model: &RiskModel, sigma: f64) -> Result<RateResult> {
    let mut m = model.clone();
    m.volatility = VolatilityRule::constant(sigma)?;
    solve_rate(&m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::levy::ClaimDistribution;
    use crate::risk::PremiumRule;

    fn model(p: f64, sigma: f64, jumps: JumpModel) -> RiskModel {
        RiskModel::new(PremiumRule::constant(p).unwrap(), VolatilityRule::constant(sigma).unwrap(), jumps)
    }

    fn cp(claims: ClaimDistribution) -> JumpModel {
        JumpModel::compound_poisson(1.0, claims).unwrap()
    }

    #[test]
    fn published_compound_poisson_rates() {
        let g = || cp(ClaimDistribution::gamma(2.0, 1.0).unwrap());
        let r = solve_rate(&model(2.2, 0.0, g())).unwrap();
        assert!((r.k - 0.00319).abs() < 5e-6, "{r:?}");
        assert!(r.residual <= 1e-10 && r.concavity_ok && !r.boundary_max);
        let r = solve_rate(&model(2.4, 1.0, g())).unwrap();
        assert!((r.k - 0.01073).abs() < 5e-6, "{r:?}");
        let r = solve_rate(&model(2.2, 0.0, cp(ClaimDistribution::exponential(0.5).unwrap()))).unwrap();
        assert!((r.k - 0.00238).abs() < 5e-6, "{r:?}");
    }

    #[test]
    fn inverse_gaussian_closed_form() {
        let p: f64 = 1.1;
        let r = solve_rate(&model(p, 0.0, JumpModel::inverse_gaussian(1.0).unwrap())).unwrap();
        assert!((r.lambda_star - 0.5 * (1.0 - p.powi(-2))).abs() < 1e-10);
        assert!((r.k - (p - 1.0).powi(2) / (2.0 * p)).abs() < 1e-10);
        assert!(!r.boundary_max);
    }

    #[test]
    fn no_positive_rate() {
        let m = model(2.0, 0.0, cp(ClaimDistribution::gamma(2.0, 1.0).unwrap()));
        assert_eq!(solve_rate(&m), Err(Error::NoPositiveRate));
    }

    #[test]
    fn residual_examples() {
        let m = model(2.2, 0.0, cp(ClaimDistribution::gamma(2.0, 1.0).unwrap()));
        assert!((stationarity_residual(&m, 0.0).unwrap() - 0.2).abs() < 1e-15);
        let gp = model(1.1, 0.0, JumpModel::gamma_process(0.5, 0.5).unwrap());
        let l = 0.5 - 0.5 / 1.1;
        assert!(stationarity_residual(&gp, l).unwrap().abs() < 1e-14);
        assert!(stationarity_residual(&gp, 0.5).is_err());
    }

    #[test]
    fn sweep_rejects_compound_poisson() {
        let m = model(2.2, 0.0, cp(ClaimDistribution::gamma(2.0, 1.0).unwrap()));
        assert!(matches!(truncation_sweep(&m, &[0.1]), Err(Error::Domain { .. })));
        let gp = model(1.1, 0.0, JumpModel::gamma_process(0.5, 0.5).unwrap());
        assert!(truncation_sweep(&gp, &[0.01, 0.1]).is_err());
    }

    #[test]
    fn degenerate_model_hits_boundary() {
        let m = model(1.0, 0.0, JumpModel::none());
        let r = solve_rate(&m).unwrap();
        assert!(r.boundary_max);
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let x = golden_section_max(|x| -(x - 0.3) * (x - 0.3), 0.0, 1.0, 1e-12);
        assert!((x - 0.3).abs() < 1e-7);
    }
}
