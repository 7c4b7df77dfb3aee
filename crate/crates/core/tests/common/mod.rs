#![allow(dead_code)]

use ruinrate_core::{ClaimDistribution, JumpModel, PremiumRule, RiskModel, VolatilityRule};

/// Adaptive Simpson quadrature on `[a, b]`, refining until the local error
/// estimate is below `tol` or at the level of rounding in the total.
pub fn simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    struct Ctx<F> {
        f: F,
        floor: f64,
    }
    fn rec<F: Fn(f64) -> f64 + Copy>(c: &Ctx<F>, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = ((c.f)(lm), (c.f)(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let err = (left + right - whole).abs();
        if depth == 0 || err.is_nan() || err <= 15.0 * tol || err <= c.floor {
            left + right + (left + right - whole) / 15.0
        } else {
            rec(c, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + rec(c, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let scale = (b - a) * fa.abs().max(fm.abs()).max(fb.abs());
    let c = Ctx { f, floor: 1e-16 * scale.max(whole.abs()) };
    rec(&c, a, b, fa, fm, fb, whole, tol, 28)
}

/// `∫_lo^hi f(x) dx` for integrands spread over many decades: Simpson on
/// each decade of `x`, after the substitution `x = e^s`.
pub fn log_simpson<F: Fn(f64) -> f64 + Copy>(f: F, lo: f64, hi: f64, tol: f64) -> f64 {
    let (a, b) = (lo.ln(), hi.ln());
    let pieces = ((b - a) / core::f64::consts::LN_10).ceil().max(1.0) as usize;
    let w = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let (s0, s1) = (a + i as f64 * w, a + (i + 1) as f64 * w);
            simpson(|s: f64| f(s.exp()) * s.exp(), s0, s1, tol / pieces as f64)
        })
        .sum()
}

/// Maximum of `f` over `[a, b]`: a 2000-point scan, then a second 2000-point
/// scan over the two cells around the coarse argmax.
pub fn grid_scan_max<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    const N: usize = 2000;
    let scan = |lo: f64, hi: f64| {
        let step = (hi - lo) / (N - 1) as f64;
        let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
        for i in 0..N {
            let v = f(lo + i as f64 * step);
            if v > best {
                best = v;
                best_i = i;
            }
        }
        (lo + best_i as f64 * step, step, best)
    };
    let (x, step, _) = scan(a, b);
    let (_, _, best) = scan((x - step).max(a), (x + step).min(b));
    best
}

pub fn model(p: f64, sigma: f64, jumps: JumpModel) -> RiskModel {
    RiskModel::new(PremiumRule::constant(p).unwrap(), VolatilityRule::constant(sigma).unwrap(), jumps)
}

pub fn cp(claims: ClaimDistribution) -> JumpModel {
    JumpModel::compound_poisson(1.0, claims).unwrap()
}

pub fn gamma21() -> ClaimDistribution {
    ClaimDistribution::gamma(2.0, 1.0).unwrap()
}

pub fn exp_half() -> ClaimDistribution {
    ClaimDistribution::exponential(0.5).unwrap()
}

pub fn mexp() -> ClaimDistribution {
    ClaimDistribution::mixed_exponential(0.75, 0.75, 0.25).unwrap()
}

/// One representative per jump family, plus the mixed-exponential law.
pub fn jump_families() -> Vec<(&'static str, JumpModel)> {
    vec![
        ("cp-gamma", cp(gamma21())),
        ("cp-exp", cp(exp_half())),
        ("cp-mexp", cp(mexp())),
        ("gamma-process", JumpModel::gamma_process(0.5, 0.5).unwrap()),
        ("inverse-gaussian", JumpModel::inverse_gaussian(1.0).unwrap()),
    ]
}

/// Mean and standard error of a sample.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    let v = xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
    (m, (v / n).sqrt())
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (n, m) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}
