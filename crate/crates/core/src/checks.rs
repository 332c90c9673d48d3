//! Named verification checks. Each returns one [`VerifyReport`] per claim
//! it tests; the command-line `verify` subcommand runs them by name.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::analytic::{
    barenblatt_cdf_1d, barenblatt_cf, barenblatt_constants, barenblatt_radial_cdf, epd_density,
    m_from_n, pme_epd_rescale_check, variance_y1, FlightLaw, ModelParams,
};
use crate::error::{domain, Error, Result};
use crate::flights::{sample_flights, sample_sde_batch, FlightSpec};
use crate::fracepd::{fracepd_cf, fracepd_cf_poisson, fracepd_density, frac_pme_identity_check, FracEpdParams};
use crate::levy::{levy_cdf, sample_isotropic_stable_batch, sample_subordinator, StableIndex};
use crate::pmefd::{
    appendix_system_solve, cell_volumes, pme_evolve, pme_residual, source_on_grid, GridSpec,
};
use crate::pseudo::{airy_kernel, compose_epd_pseudo, pseudo_kernel, rods_kernel};
use crate::quad::{gauss_legendre, OscillatoryQuadratureSpec};
use crate::rng::generate;
use crate::specfun::{airy_ai, bessel_j, gamma_fn};
use crate::stats::{cf_bound, empirical_cf, ks_statistic, mean_var, VerifyReport};

/// KS p-values at or below this fail.
pub const KS_LEVEL: f64 = 1e-3;

/// Names accepted by [`run_check`], with a one-line description.
pub const CHECKS: &[(&str, &str)] = &[
    ("constants", "closed-form constants against the solved exponent system"),
    ("pme-residual", "second-order decay of the finite-difference PME residual"),
    ("pme-evolve", "finite-volume evolution of the source solution"),
    ("pme-epd", "Barenblatt density as a time-rescaled EPD solution"),
    ("flights-ks", "KS of time-rescaled flight radii against the Barenblatt law"),
    ("flights-cf", "empirical CF of rescaled flights against the Barenblatt CF"),
    ("moments", "sample variance and sub-diffusive exponent of 1-d rescaled flights"),
    ("sde", "KS of Euler-Maruyama endpoints against the Barenblatt law"),
    ("fracepd", "fractional EPD CF in Bessel and Poisson form; nu=2 density"),
    ("stable", "empirical CF of subordinated Brownian motion; Levy subordinator KS"),
    ("frac-pme", "Fourier-space fractional PME identity"),
    ("pseudo", "higher-order kernels against closed forms; damped composition mass"),
    ("specfun", "special-function identities"),
];

/// Parameters shared by the checks. Unset fields take each check's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CheckOptions {
    pub m: Option<f64>,
    pub d: Option<usize>,
    pub n: Option<usize>,
    pub law: Option<FlightLaw>,
    pub t: Option<f64>,
    pub nu: Option<f64>,
    pub gamma: Option<f64>,
    pub samples: Option<usize>,
    pub steps: Option<usize>,
    pub nx: Option<usize>,
    pub seed: u64,
}

pub fn run_check(name: &str, o: &CheckOptions) -> Result<Vec<VerifyReport>> {
    match name {
        "constants" => constants(o),
        "pme-residual" => residual_order(o),
        "pme-evolve" => evolve(o),
        "pme-epd" => {
            let p = ModelParams::new(o.m.unwrap_or(2.0), o.d.unwrap_or(1))?;
            Ok(vec![pme_epd_rescale_check(&p)])
        }
        "flights-ks" | "theorem31" => flights_ks(o),
        "flights-cf" => flights_cf(o),
        "moments" => moments(o),
        "sde" => sde(o),
        "fracepd" => fracepd(o),
        "stable" => stable(o),
        "frac-pme" => frac_pme(o),
        "pseudo" => pseudo(o),
        "specfun" => specfun(),
        other => domain(format!(
            "unknown check {other:?}; expected one of {}",
            CHECKS.iter().map(|c| c.0).collect::<Vec<_>>().join(", ")
        )),
    }
}

/// `count` frequency vectors of norms `max·k/count`, `k = 1..count`, turning
/// through the first two axes.
pub fn xi_grid(d: usize, count: usize, max: f64) -> Vec<Vec<f64>> {
    (1..=count)
        .map(|k| {
            let s = max * k as f64 / count as f64;
            let mut xi = vec![0.0; d];
            if d == 1 {
                xi[0] = s;
            } else {
                let a = 0.5 * PI * (k - 1) as f64 / (count - 1).max(1) as f64;
                xi[0] = s * a.cos();
                xi[1] = s * a.sin();
            }
            xi
        })
        .collect()
}

fn constants(o: &CheckOptions) -> Result<Vec<VerifyReport>> {
    let (m, d) = (o.m.unwrap_or(2.0), o.d.unwrap_or(1));
    let p = ModelParams::new(m, d)?;
    let k = barenblatt_constants(&p);
    let s = appendix_system_solve(m, d)?;
    let diff = (k.alpha + s.delta).abs().max((k.beta - 0.5 * s.eta).abs()).max((k.b - s.b).abs());
    let resid = s.residuals.iter().fold(0.0f64, |a, r| a.max(r.abs()));
    let params = json!({ "m": m, "d": d });
    Ok(vec![
        VerifyReport::at_most("constants-agree", params.clone(), diff, 1e-14),
        VerifyReport::at_most("exponent-system-residuals", params, resid, 1e-12),
    ])
}

/// Ten interior points at radii `0.05..0.68` of the support, turning
/// through the first two axes.
pub fn residual_points(p: &ModelParams, t: f64) -> Vec<Vec<f64>> {
    let rad = p.support_radius(t);
    (0..10)
        .map(|k| {
            let r = rad * (0.05 + 0.07 * k as f64);
            let mut x = vec![0.0; p.d()];
            if p.d() == 1 {
                x[0] = if k % 2 == 0 { r } else { -r };
            } else {
                let a = 0.3 + 0.5 * k as f64;
                x[0] = r * a.cos();
                x[1] = r * a.sin();
            }
            x
        })
        .collect()
}

fn residual_order(o: &CheckOptions) -> Result<Vec<VerifyReport>> {
    let (m, d, t) = (o.m.unwrap_or(2.0), o.d.unwrap_or(1), o.t.unwrap_or(1.0));
    let p = ModelParams::new(m, d)?;
    let h = 0.02 * p.support_radius(t);
    let mut worst: f64 = 0.0;
    for x in residual_points(&p, t) {
        let ratio = pme_residual(&p, &x, t, h)? / pme_residual(&p, &x, t, 0.5 * h)?;
        worst = worst.max((ratio / 4.0 - 1.0).abs());
    }
    Ok(vec![VerifyReport::at_most("residual-order", json!({ "m": m, "d": d, "t": t, "h": h }), worst, 0.2)])
}

/// Distance of the evolved source solution to the exact one, normalized by
/// the mass, and its front position.
fn evolve(o: &CheckOptions) -> Result<Vec<VerifyReport>> {
    let (m, d) = (o.m.unwrap_or(2.0), o.d.unwrap_or(1));
    let nx = o.nx.unwrap_or(2000);
    let t0 = o.t.unwrap_or(1.0);
    let p = ModelParams::new(m, d)?;
    let t1 = 2.0 * t0;
    let l = 1.15 * p.support_radius(t1);
    let g = GridSpec::new(l, nx, t0, t1, 0.9)?;
    let res = pme_evolve(&source_on_grid(&p, &g, t0), &p, &g)?;
    let exact = source_on_grid(&p, &g, t1);
    let vol = cell_volumes(d, &g);
    let l1: f64 = res.u.iter().zip(&exact).zip(&vol).map(|((a, b), v)| (a - b).abs() * v).sum();
    let l1 = l1 / res.initial_mass;
    let drift = ((res.final_mass - res.initial_mass) / res.initial_mass).abs();
    let h = g.h(d);
    let umax = res.u.iter().fold(0.0f64, |a, b| a.max(*b));
    let front = (res.front(1e-6 * umax) - p.support_radius(t1)).abs();
    let params = json!({ "m": m, "d": d, "nx": nx, "t0": t0, "t1": t1, "l": l });
    Ok(vec![
        VerifyReport::at_most("evolve-l1", params.clone(), l1, 2e-3),
        VerifyReport::at_most("evolve-mass", params.clone(), drift, 1e-10 * (t1 - t0)),
        VerifyReport::at_most("evolve-front", params, front, 2.0 * h),
    ])
}

struct FlightCase {
    p: ModelParams,
    n: usize,
    law: FlightLaw,
    t: f64,
    count: usize,
}

fn flight_case(o: &CheckOptions) -> Result<FlightCase> {
    let d = o.d.unwrap_or(1);
    let n = o.n.unwrap_or(3);
    let law = o.law.unwrap_or(match d {
        1 => FlightLaw::F1,
        2 => FlightLaw::F2,
        _ => FlightLaw::F3,
    });
    let m = m_from_n(d, n, law).ok_or_else(|| {
        Error::InvalidSpec(format!("no PME exponent for d={d}, n={n}, law {law:?}"))
    })?;
    Ok(FlightCase { p: ModelParams::new(m, d)?, n, law, t: o.t.unwrap_or(1.0), count: o.samples.unwrap_or(100_000) })
}

fn case_params(c: &FlightCase) -> serde_json::Value {
    json!({ "d": c.p.d(), "n": c.n, "law": format!("{:?}", c.law), "m": c.p.m(), "t": c.t })
}

fn flights_ks(o: &CheckOptions) -> Result<Vec<VerifyReport>> {
    let c = flight_case(o)?;
    let spec = FlightSpec::rescaled(c.n, c.law, &c.p, c.t)?;
    let batch = sample_flights(&spec, c.count, o.seed)?;
    let ks = ks_statistic(&batch.radii(), |r| barenblatt_radial_cdf(r, c.t, &c.p).unwrap_or(f64::NAN))?;
    Ok(vec![VerifyReport::at_least("flights-ks", case_params(&c), ks.p_value, KS_LEVEL)
        .with_samples(o.seed, c.count)])
}

fn flights_cf(o: &CheckOptions) -> Result<Vec<VerifyReport>> {
    let c = flight_case(o)?;
    let spec = FlightSpec::rescaled(c.n, c.law, &c.p, c.t)?;
    let batch = sample_flights(&spec, c.count, o.seed)?;
    let mut worst: f64 = 0.0;
    for xi in xi_grid(c.p.d(), 12, 3.0) {
        let target = barenblatt_cf(&xi, c.t, &c.p)?;
        worst = worst.max((empirical_cf(&batch.positions, &xi) - target).norm());
    }
    Ok(vec![VerifyReport::at_most("flights-cf", case_params(&c), worst, cf_bound(c.count))
        .with_samples(o.seed, c.count)])
}

/// Sample variance and its standard error `√((m₄ - s⁴)/N)`.
fn variance_with_se(xs: &[f64]) -> (f64, f64) {
    let (mean, var) = mean_var(xs);
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / xs.len() as f64;
    (var, ((m4 - var * var) / xs.len() as f64).sqrt())
}

fn moments(o: &CheckOptions) -> Result<Vec<VerifyReport>> {
    let n = o.n.unwrap_or(3);
    let count = o.samples.unwrap_or(100_000);
    let m = m_from_n(1, n, FlightLaw::F1)
        .ok_or_else(|| Error::InvalidSpec(format!("no PME exponent for d=1, n={n}")))?;
    let p = ModelParams::new(m, 1)?;
    let draw = |t: f64, stream: u64| -> Result<Vec<f64>> {
        let spec = FlightSpec::rescaled(n, FlightLaw::F1, &p, t)?;
        Ok(sample_flights(&spec, count, o.seed.wrapping_add(stream))?.first_coordinates())
    };
    let mut worst_z: f64 = 0.0;
    for (k, &t) in [0.5, 1.0, 2.0].iter().enumerate() {
        let (var, se) = variance_with_se(&draw(t, k as u64)?);
        worst_z = worst_z.max((var - variance_y1(t, m)?).abs() / se);
    }
    let times = [0.25, 0.5, 1.0, 2.0, 4.0];
    let mut pts = Vec::new();
    for (k, &t) in times.iter().enumerate() {
        let (var, _) = variance_with_se(&draw(t, 10 + k as u64)?);
        pts.push((t.ln(), var.ln()));
    }
    let slope = fit_slope(&pts);
    let expected = (n as f64 - 1.0) / n as f64;
    let params = json!({ "n": n, "m": m, "d": 1 });
    Ok(vec![
        VerifyReport::at_most("variance-z", params.clone(), worst_z, 3.0).with_samples(o.seed, count),
        VerifyReport::at_most(
            "subdiffusive-exponent",
            json!({ "n": n, "m": m, "expected": expected, "fitted": slope }),
            (slope - expected).abs(),
            0.05,
        )
        .with_samples(o.seed, count),
    ])
}

/// Least-squares slope.
pub fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

fn sde(o: &CheckOptions) -> Result<Vec<VerifyReport>> {
    let (m, d, t) = (o.m.unwrap_or(2.0), o.d.unwrap_or(1), o.t.unwrap_or(1.0));
    let steps = o.steps.unwrap_or(1000);
    let count = o.samples.unwrap_or(10_000);
    let p = ModelParams::new(m, d)?;
    let params = json!({ "m": m, "d": d, "t": t, "steps": steps });
    let batch = match sample_sde_batch(&p, t, steps, count, o.seed) {
        Ok(b) => b,
        Err(Error::SdeInstability { excess, mesh }) => {
            return Ok(vec![VerifyReport::at_most("sde-support", params, excess, mesh)
                .with_samples(o.seed, count)]);
        }
        Err(e) => return Err(e),
    };
    let rad = p.support_radius(t);
    let excess = batch.radii().iter().fold(0.0f64, |a, r| a.max(r - rad));
    let ks = if d == 1 {
        ks_statistic(&batch.first_coordinates(), |x| barenblatt_cdf_1d(x, t, m).unwrap_or(f64::NAN))?
    } else {
        ks_statistic(&batch.radii(), |r| barenblatt_radial_cdf(r, t, &p).unwrap_or(f64::NAN))?
    };
    let mesh = (2.0 * t / steps as f64).sqrt();
    Ok(vec![
        VerifyReport::at_least("sde-ks", params.clone(), ks.p_value, KS_LEVEL).with_samples(o.seed, count),
        VerifyReport::at_most("sde-support", params, excess.max(0.0), mesh).with_samples(o.seed, count),
    ])
}

fn fracepd(o: &CheckOptions) -> Result<Vec<VerifyReport>> {
    let mut worst: f64 = 0.0;
    for d in 1..=3 {
        for &nu in &[1.0, 1.5, 2.0] {
            for &gamma in &[0.75, 1.0, 2.0] {
                let q = FracEpdParams::new(nu, gamma, 1.0, d)?;
                for xi in xi_grid(d, 5, 4.0) {
                    for &t in &[0.25, 0.5, 1.0, 2.0, 4.0] {
                        let a = fracepd_cf(&xi, t, &q)?;
                        let b = fracepd_cf_poisson(&xi, t, &q)?;
                        worst = worst.max((a - b).abs());
                    }
                }
            }
        }
    }
    let gamma = o.gamma.unwrap_or(2.0);
    let q = FracEpdParams::new(2.0, gamma, 1.0, 1)?;
    let spec = OscillatoryQuadratureSpec { tolerance: f64::INFINITY, ..Default::default() };
    let mut dens: f64 = 0.0;
    for k in 0..20 {
        let x = [-0.855 + 0.09 * k as f64];
        let e = fracepd_density(&x, 1.0, &q, &spec)?;
        dens = dens.max((e.value - epd_density(&x, 1.0, &q.classical())?).abs());
    }
    Ok(vec![
        VerifyReport::at_most("fracepd-cf-forms", json!({ "grid": "5x5 (xi,t), d 1-3, nu {1,1.5,2}, gamma {0.75,1,2}" }), worst, 1e-10),
        VerifyReport::at_most("fracepd-nu2-density", json!({ "d": 1, "gamma": gamma, "t": 1.0 }), dens, 1e-6),
    ])
}

fn stable(o: &CheckOptions) -> Result<Vec<VerifyReport>> {
    let count = o.samples.unwrap_or(1_000_000);
    let t = o.t.unwrap_or(1.0);
    let nus = o.nu.map(|v| vec![v]).unwrap_or_else(|| vec![0.5, 1.0, 1.5]);
    let dims = o.d.map(|v| vec![v]).unwrap_or_else(|| vec![1, 2]);
    let mut out = Vec::new();
    for (i, &nu) in nus.iter().enumerate() {
        for (j, &d) in dims.iter().enumerate() {
            let seed = o.seed.wrapping_add((10 * i + j) as u64);
            let xs = sample_isotropic_stable_batch(StableIndex::new(nu)?, d, t, count, seed)?;
            let mut worst: f64 = 0.0;
            for xi in xi_grid(d, 12, 3.0) {
                let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
                let target = (-t * norm.powf(nu)).exp();
                worst = worst.max((empirical_cf(&xs, &xi) - target).norm());
            }
            out.push(
                VerifyReport::at_most("stable-cf", json!({ "nu": nu, "d": d, "t": t }), worst, cf_bound(count))
                    .with_samples(seed, count),
            );
        }
    }
    let ys = generate(count, o.seed, |rng| sample_subordinator(0.5, t, rng).expect("valid index"));
    let ks = ks_statistic(&ys, |y| levy_cdf(y, t))?;
    out.push(
        VerifyReport::at_least("subordinator-ks", json!({ "index": 0.5, "t": t }), ks.p_value, KS_LEVEL)
            .with_samples(o.seed, count),
    );
    Ok(out)
}

fn frac_pme(o: &CheckOptions) -> Result<Vec<VerifyReport>> {
    let t = o.t.unwrap_or(1.0);
    let gamma = o.gamma.unwrap_or(2.0);
    let nus = o.nu.map(|v| vec![v]).unwrap_or_else(|| vec![1.5, 2.0]);
    let xi: Vec<f64> = (0..12).map(|k| 0.25 * k as f64).collect();
    nus.iter().map(|&nu| frac_pme_identity_check(t, gamma, nu, &xi)).collect()
}

/// Gaussian-damped `∫ u(x) e^{-(δx)²} dx` of the even function `u`
/// sampled at Gauss–Legendre nodes on `[0, x_max]`, for several `δ`,
/// extrapolated to `δ = 0` assuming a series in `δ^{power}`.
pub fn damped_mass(
    u: impl Fn(f64) -> Result<f64>,
    x_max: f64,
    panel: f64,
    deltas: &[f64; 3],
    power: i32,
) -> Result<f64> {
    let gl = gauss_legendre(10);
    let panels = (x_max / panel).ceil() as usize;
    let h = x_max / panels as f64;
    let mut nodes = Vec::new();
    for k in 0..panels {
        for (z, w) in gl.nodes.iter().zip(&gl.weights) {
            let x = (k as f64 + 0.5 * (1.0 + z)) * h;
            nodes.push((x, 0.5 * h * w * u(x)?));
        }
    }
    let masses: Vec<f64> = deltas
        .iter()
        .map(|dl| 2.0 * nodes.iter().map(|(x, f)| f * (-(dl * x).powi(2)).exp()).sum::<f64>())
        .collect();
    // Neville extrapolation in s = δ^power to s = 0
    let s: Vec<f64> = deltas.iter().map(|d| d.powi(power)).collect();
    let mut p = masses.clone();
    for k in 1..3 {
        for i in (k..3).rev() {
            p[i] = (s[i - k] * p[i] - s[i] * p[i - 1]) / (s[i - k] - s[i]);
        }
    }
    Ok(p[2])
}

fn pseudo(o: &CheckOptions) -> Result<Vec<VerifyReport>> {
    let ns: Vec<u32> = o.n.map(|v| vec![v as u32]).unwrap_or_else(|| vec![2, 3]);
    let t = o.t.unwrap_or(1.0);
    let lambda = o.gamma.unwrap_or(1.5);
    let mut out = Vec::new();
    for n in ns {
        let closed = match n {
            2 => rods_kernel,
            3 => airy_kernel,
            _ => return domain(format!("closed forms exist for n = 2, 3 only, got {n}")),
        };
        let mut worst: f64 = 0.0;
        let mut lowest = f64::INFINITY;
        for k in 0..50 {
            let x = -6.0 + 12.0 * k as f64 / 49.0;
            let v = pseudo_kernel(x, t, n)?.value;
            worst = worst.max((v - closed(x, t)?).abs());
            lowest = lowest.min(v);
        }
        let params = json!({ "n": n, "t": t });
        out.push(VerifyReport::at_most("kernel-closed-form", params.clone(), worst, 1e-6));
        out.push(VerifyReport::at_most("kernel-signed", params, lowest, -1e-3));
        let (x_max, panel) = if n == 2 { (32.0, 0.25) } else { (32.0, 0.5) };
        let mass = damped_mass(
            |x| compose_epd_pseudo(x, t, lambda, 1.0, n).map(|e| e.value),
            x_max,
            panel,
            &[0.2, 0.15, 0.1],
            2 * n as i32,
        )?;
        out.push(VerifyReport::at_most(
            "compose-mass",
            json!({ "n": n, "t": t, "lambda": lambda, "c": 1.0 }),
            (mass - 1.0).abs(),
            1e-4,
        ));
    }
    Ok(out)
}

fn specfun() -> Result<Vec<VerifyReport>> {
    let mut half: f64 = 0.0;
    for k in 1..=500 {
        let x = 0.1 * k as f64;
        let s = (2.0 / (PI * x)).sqrt();
        half = half
            .max((bessel_j(0.5, x)? - s * x.sin()).abs())
            .max((bessel_j(-0.5, x)? - s * x.cos()).abs());
    }
    let mut rec: f64 = 0.0;
    for &mu in &[0.3, 1.0, 2.5, 7.25] {
        for k in 1..=100 {
            let x = 0.5 * k as f64;
            let r = bessel_j(mu - 1.0, x)? + bessel_j(mu + 1.0, x)? - 2.0 * mu / x * bessel_j(mu, x)?;
            rec = rec.max(r.abs());
        }
    }
    let mut gam: f64 = 0.0;
    for k in 0..300 {
        let x = 0.1 + 0.1 * k as f64;
        gam = gam.max((gamma_fn(x + 1.0)? / (x * gamma_fn(x)?) - 1.0).abs());
    }
    let ai0 = 3f64.powf(-2.0 / 3.0) / gamma_fn(2.0 / 3.0)?;
    let empty = json!({});
    Ok(vec![
        VerifyReport::at_most("bessel-half-order", json!({ "x": "(0, 50]" }), half, 1e-10),
        VerifyReport::at_most("bessel-recurrence", json!({ "mu": [0.3, 1.0, 2.5, 7.25] }), rec, 1e-8),
        VerifyReport::at_most("gamma-recurrence", json!({ "x": "(0.1, 30)" }), gam, 1e-12),
        VerifyReport::at_most("airy-zero", empty, (airy_ai(0.0) - ai0).abs(), 1e-10),
    ])
}
