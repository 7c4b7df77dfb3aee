//! Built-in scenarios behind the rate tables and figure curves, together
//! with the published values they are compared against.

use ruinrate_core::{
    solve_rate, ClaimDistribution, JumpModel, PremiumRule, RateResult, Result, RiskModel, VolatilityRule,
};

/// Absolute tolerance for matching a printed 5-decimal rate.
pub const PRINT_TOLERANCE: f64 = 1e-5;

pub const SIGMAS: [f64; 11] = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0];
pub const ETAS: [f64; 6] = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3];
pub const COARSE_ETAS: [f64; 3] = [0.1, 0.2, 0.3];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClaimLaw {
    Exponential,
    Gamma,
    MixedExponential,
}

impl ClaimLaw {
    pub const ALL: [ClaimLaw; 3] = [ClaimLaw::Exponential, ClaimLaw::Gamma, ClaimLaw::MixedExponential];

    pub fn label(self) -> &'static str {
        match self {
            ClaimLaw::Exponential => "exponential",
            ClaimLaw::Gamma => "gamma",
            ClaimLaw::MixedExponential => "mixed_exponential",
        }
    }

    pub fn distribution(self) -> ClaimDistribution {
        match self {
            ClaimLaw::Exponential => ClaimDistribution::exponential(0.5),
            ClaimLaw::Gamma => ClaimDistribution::gamma(2.0, 1.0),
            ClaimLaw::MixedExponential => ClaimDistribution::mixed_exponential(0.75, 0.75, 0.25),
        }
        .expect("built-in claim law")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LevyProcess {
    Gamma,
    InverseGaussian,
}

impl LevyProcess {
    pub const ALL: [LevyProcess; 2] = [LevyProcess::Gamma, LevyProcess::InverseGaussian];

    pub fn label(self) -> &'static str {
        match self {
            LevyProcess::Gamma => "gamma_process",
            LevyProcess::InverseGaussian => "inverse_gaussian",
        }
    }

    pub fn jumps(self) -> JumpModel {
        match self {
            LevyProcess::Gamma => JumpModel::gamma_process(0.5, 0.5),
            LevyProcess::InverseGaussian => JumpModel::inverse_gaussian(1.0),
        }
        .expect("built-in process")
    }
}

/// Premium `(1 + η)·m(μ)` on top of the given jumps.
pub fn loaded_model(jumps: JumpModel, sigma: f64, eta: f64) -> Result<RiskModel> {
    let p = (1.0 + eta) * jumps.mean();
    Ok(RiskModel::new(PremiumRule::constant(p)?, VolatilityRule::constant(sigma)?, jumps))
}

/// Compound Poisson scenario with unit intensity.
pub fn claims_model(law: ClaimLaw, sigma: f64, eta: f64) -> Result<RiskModel> {
    loaded_model(JumpModel::compound_poisson(1.0, law.distribution())?, sigma, eta)
}

pub fn levy_model(process: LevyProcess, sigma: f64, eta: f64) -> Result<RiskModel> {
    loaded_model(process.jumps(), sigma, eta)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub series: &'static str,
    pub sigma: f64,
    pub eta: f64,
    pub rate: RateResult,
    pub published: f64,
}

impl TableRow {
    pub fn abs_diff(&self) -> f64 {
        (self.rate.k - self.published).abs()
    }

    pub fn matches_print(&self) -> bool {
        self.abs_diff() <= PRINT_TOLERANCE
    }
}

/// Gamma(2,1) claims over every `(σ, η)` pair.
pub fn table1() -> Result<Vec<TableRow>> {
    let mut rows = Vec::with_capacity(SIGMAS.len() * ETAS.len());
    for (i, &sigma) in SIGMAS.iter().enumerate() {
        for (j, &eta) in ETAS.iter().enumerate() {
            let rate = solve_rate(&claims_model(ClaimLaw::Gamma, sigma, eta)?)?;
            rows.push(TableRow { series: ClaimLaw::Gamma.label(), sigma, eta, rate, published: TABLE1[i][j] });
        }
    }
    Ok(rows)
}

/// Three claim laws over `σ` and `η ∈ {0.1, 0.2, 0.3}`.
pub fn table2() -> Result<Vec<TableRow>> {
    let mut rows = Vec::with_capacity(SIGMAS.len() * 9);
    for (i, &sigma) in SIGMAS.iter().enumerate() {
        for (j, &eta) in COARSE_ETAS.iter().enumerate() {
            for (c, law) in ClaimLaw::ALL.into_iter().enumerate() {
                let rate = solve_rate(&claims_model(law, sigma, eta)?)?;
                rows.push(TableRow { series: law.label(), sigma, eta, rate, published: TABLE2[i][j][c] });
            }
        }
    }
    Ok(rows)
}

/// Gamma and inverse-Gaussian processes over `σ` and `η ∈ {0.1, 0.2, 0.3}`.
/// The printed values are carried along for comparison only.
pub fn table3() -> Result<Vec<TableRow>> {
    let mut rows = Vec::with_capacity(SIGMAS.len() * 6);
    for (i, &sigma) in SIGMAS.iter().enumerate() {
        for (j, &eta) in COARSE_ETAS.iter().enumerate() {
            for (c, process) in LevyProcess::ALL.into_iter().enumerate() {
                let rate = solve_rate(&levy_model(process, sigma, eta)?)?;
                rows.push(TableRow { series: process.label(), sigma, eta, rate, published: TABLE3[i][j][c] });
            }
        }
    }
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurvePoint {
    pub series: &'static str,
    pub sigma: f64,
    pub eta: f64,
    pub k: f64,
}

/// `σ ∈ [0, 10]` in steps of 0.1.
pub fn sigma_axis() -> Vec<f64> {
    (0..=100).map(|i| i as f64 / 10.0).collect()
}

/// `η ∈ [0.01, 0.3]` in steps of 0.01.
pub fn eta_axis() -> Vec<f64> {
    (1..=30).map(|i| i as f64 / 100.0).collect()
}

fn curve<F>(series: &'static str, points: &[(f64, f64)], build: F) -> Result<Vec<CurvePoint>>
where
    F: Fn(f64, f64) -> Result<RiskModel>,
{
    points
        .iter()
        .map(|&(sigma, eta)| Ok(CurvePoint { series, sigma, eta, k: solve_rate(&build(sigma, eta)?)?.k }))
        .collect()
}

fn over_sigma(eta: f64) -> Vec<(f64, f64)> {
    sigma_axis().into_iter().map(|s| (s, eta)).collect()
}

fn over_eta(sigma: f64) -> Vec<(f64, f64)> {
    eta_axis().into_iter().map(|e| (sigma, e)).collect()
}

/// A named figure and its curves.
pub struct Figure {
    pub name: &'static str,
    pub points: Vec<CurvePoint>,
}

/// Rate against volatility for Gamma(2,1) claims at `η = 0.1, 0.2, 0.3`.
pub fn figure1() -> Result<Figure> {
    let mut points = vec![];
    for (eta, series) in [(0.1, "eta=0.1"), (0.2, "eta=0.2"), (0.3, "eta=0.3")] {
        points.extend(curve(series, &over_sigma(eta), |s, e| claims_model(ClaimLaw::Gamma, s, e))?);
    }
    Ok(Figure { name: "figure1", points })
}

/// Rate against safety loading per claim law at `σ = 2`.
pub fn figure2a() -> Result<Figure> {
    let mut points = vec![];
    for law in ClaimLaw::ALL {
        points.extend(curve(law.label(), &over_eta(2.0), |s, e| claims_model(law, s, e))?);
    }
    Ok(Figure { name: "figure2a", points })
}

/// Rate against volatility per claim law at `η = 0.1`.
pub fn figure2b() -> Result<Figure> {
    let mut points = vec![];
    for law in ClaimLaw::ALL {
        points.extend(curve(law.label(), &over_sigma(0.1), |s, e| claims_model(law, s, e))?);
    }
    Ok(Figure { name: "figure2b", points })
}

/// Rate against safety loading per Lévy process at `σ = 1`.
pub fn figure3a() -> Result<Figure> {
    let mut points = vec![];
    for process in LevyProcess::ALL {
        points.extend(curve(process.label(), &over_eta(1.0), |s, e| levy_model(process, s, e))?);
    }
    Ok(Figure { name: "figure3a", points })
}

/// Rate against volatility per Lévy process at `η = 0.2`.
pub fn figure3b() -> Result<Figure> {
    let mut points = vec![];
    for process in LevyProcess::ALL {
        points.extend(curve(process.label(), &over_sigma(0.2), |s, e| levy_model(process, s, e))?);
    }
    Ok(Figure { name: "figure3b", points })
}

pub fn figures() -> Result<Vec<Figure>> {
    Ok(vec![figure1()?, figure2a()?, figure2b()?, figure3a()?, figure3b()?])
}

/// Published rates, indexed `[σ][η]` over [`SIGMAS`] × [`ETAS`].
pub const TABLE1: [[f64; 6]; 11] = [
    [0.00082, 0.00319, 0.00704, 0.01227, 0.01881, 0.02658],
    [0.0007, 0.00277, 0.00613, 0.01073, 0.01653, 0.02345],
    [0.0005, 0.00197, 0.00439, 0.00775, 0.01201, 0.01716],
    [0.00033, 0.00132, 0.00297, 0.00526, 0.00819, 0.01174],
    [0.00023, 0.00091, 0.00204, 0.00361, 0.00563, 0.0081],
    [0.00016, 0.00064, 0.00145, 0.00257, 0.00402, 0.00578],
    [0.00012, 0.00048, 0.00107, 0.0019, 0.00297, 0.00427],
    [0.00009, 0.00036, 0.00082, 0.00145, 0.00227, 0.00327],
    [0.00007, 0.00029, 0.00064, 0.00114, 0.00178, 0.00257],
    [0.00006, 0.00023, 0.00052, 0.00092, 0.00144, 0.00207],
    [0.00005, 0.00019, 0.00042, 0.00075, 0.00118, 0.0017],
];

/// Published rates, indexed `[σ][η][claim law]` over [`SIGMAS`] × [`COARSE_ETAS`] × [`ClaimLaw::ALL`].
pub const TABLE2: [[[f64; 3]; 3]; 11] = [
    [[0.00238, 0.00319, 0.00177], [0.00911, 0.01227, 0.00668], [0.01965, 0.02658, 0.01426]],
    [[0.00214, 0.00277, 0.00163], [0.00824, 0.01073, 0.00621], [0.01791, 0.02345, 0.01335]],
    [[0.00163, 0.00197, 0.00132], [0.00638, 0.00775, 0.00511], [0.01405, 0.01716, 0.01114]],
    [[0.00116, 0.00132, 0.001], [0.0046, 0.00526, 0.00392], [0.01024, 0.01174, 0.00865]],
    [[0.00083, 0.00091, 0.00074], [0.0033, 0.00361, 0.00294], [0.00737, 0.0081, 0.00654]],
    [[0.0006, 0.00064, 0.00056], [0.00241, 0.00257, 0.00222], [0.00541, 0.00578, 0.00496]],
    [[0.00045, 0.00048, 0.00043], [0.00181, 0.0019, 0.0017], [0.00407, 0.00427, 0.00382]],
    [[0.00035, 0.00036, 0.00033], [0.0014, 0.00145, 0.00134], [0.00315, 0.00327, 0.003]],
    [[0.00028, 0.00029, 0.00027], [0.00111, 0.00114, 0.00107], [0.0025, 0.00257, 0.0024]],
    [[0.00022, 0.00023, 0.00022], [0.0009, 0.00092, 0.00087], [0.00202, 0.00207, 0.00196]],
    [[0.00019, 0.00019, 0.00018], [0.00074, 0.00075, 0.00072], [0.00167, 0.0017, 0.00162]],
];

/// Published rates, indexed `[σ][η][process]` over [`SIGMAS`] × [`COARSE_ETAS`] × [`LevyProcess::ALL`].
pub const TABLE3: [[[f64; 2]; 3]; 11] = [
    [[0.02617, 0.05], [0.05442, 0.1], [0.08441, 0.15]],
    [[0.01809, 0.0271], [0.03882, 0.05806], [0.06189, 0.09238]],
    [[0.00921, 0.01104], [0.02013, 0.02412], [0.03272, 0.03923]],
    [[0.00503, 0.00552], [0.01101, 0.01207], [0.01794, 0.01965]],
    [[0.00307, 0.00324], [0.00671, 0.00709], [0.01094, 0.01153]],
    [[0.00204, 0.00212], [0.00447, 0.00463], [0.00727, 0.00753]],
    [[0.00145, 0.00149], [0.00317, 0.00325], [0.00516, 0.00529]],
    [[0.00108, 0.0011], [0.00236, 0.0024], [0.00384, 0.00391]],
    [[0.00083, 0.00085], [0.00182, 0.00185], [0.00296, 0.00301]],
    [[0.00066, 0.00067], [0.00145, 0.00146], [0.00236, 0.00238]],
    [[0.00054, 0.00054], [0.00118, 0.00119], [0.00192, 0.00193]],
];
