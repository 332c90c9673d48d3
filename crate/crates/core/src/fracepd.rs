//! Space-fractional EPD equation
//! `u_tt + (d+2γ-1)/t u_t = -c²(-Δ)^{ν/2} u`: its characteristic function in
//! Bessel and Poisson-average form, inverse transforms, the oscillatory
//! kernels `p₁`, `p₂` and the composition with the 1-d EPD weight, the
//! Fourier-space check of the fractional porous medium identity and a
//! periodic spectral Riesz operator.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::analytic::{norm, source_unchecked, EpdParams, ModelParams};
use crate::error::{domain, Error, Result};
use crate::quad::{endpoint_weighted_rule, gauss_jacobi, DampedGrid, Estimate, OscillatoryQuadratureSpec};
use crate::specfun::{ln_gamma, normalized_j};
use crate::stats::VerifyReport;

/// Step of the centred time difference in [`frac_pme_identity_check`].
pub const IDENTITY_TIME_STEP: f64 = 1e-4;
/// Tolerance of [`frac_pme_identity_check`].
pub const IDENTITY_TOLERANCE: f64 = 1e-5;

/// Stability index `ν ∈ (0, 2]`, EPD parameter `γ > 0`, speed `c` and
/// dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FracEpdParams {
    pub nu: f64,
    pub gamma: f64,
    pub c: f64,
    pub d: usize,
}

impl FracEpdParams {
    pub fn new(nu: f64, gamma: f64, c: f64, d: usize) -> Result<Self> {
        let q = Self { nu, gamma, c, d };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu <= 2.0) {
            return domain(format!("stable index must lie in (0, 2], got {}", self.nu));
        }
        EpdParams::new(self.gamma, self.c, self.d).map(|_| ())
    }

    /// Order `γ + d/2 - 1` of the Bessel function in the characteristic function.
    pub fn bessel_order(&self) -> f64 {
        self.gamma + 0.5 * self.d as f64 - 1.0
    }

    /// Endpoint exponent `d/2 + γ - 3/2` of the weight `g`.
    pub fn weight_exponent(&self) -> f64 {
        self.bessel_order() - 0.5
    }

    /// `Γ(γ+d/2)/(√π Γ(γ+d/2-1/2))`.
    fn weight_constant(&self) -> f64 {
        let mu = self.bessel_order();
        (ln_gamma(mu + 1.0) - ln_gamma(mu + 0.5)).exp() / PI.sqrt()
    }

    /// One-dimensional EPD weight
    /// `g(w,t) = Γ(γ+d/2)/(√π Γ(γ+d/2-1/2) ct) (1 - w²/(ct)²)_+^{d/2+γ-3/2}`,
    /// a probability density on `[-ct, ct]`.
    pub fn weight(&self, w: f64, t: f64) -> f64 {
        let ct = self.c * t;
        if w.abs() >= ct {
            return 0.0;
        }
        let s = 1.0 - (w / ct).powi(2);
        self.weight_constant() / ct * s.powf(self.weight_exponent())
    }

    /// Classical EPD parameters; the `ν = 2` case of this equation.
    pub fn classical(&self) -> EpdParams {
        EpdParams { gamma: self.gamma, c: self.c, d: self.d }
    }
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        domain(format!("time must be positive, got {t}"))
    }
}

fn check_point(x: &[f64], d: usize) -> Result<()> {
    if x.len() == d {
        Ok(())
    } else {
        domain(format!("point has {} coordinates, expected {d}", x.len()))
    }
}

/// `Γ(γ+d/2)(2/z)^{γ+d/2-1} J_{γ+d/2-1}(z)` with `z = ct‖ξ‖^{ν/2}`.
pub fn fracepd_cf(xi: &[f64], t: f64, q: &FracEpdParams) -> Result<f64> {
    q.validate()?;
    check_t(t)?;
    check_point(xi, q.d)?;
    Ok(cf_radial(norm(xi), t, q))
}

fn cf_radial(rho: f64, t: f64, q: &FracEpdParams) -> f64 {
    normalized_j(q.bessel_order(), q.c * t * rho.powf(0.5 * q.nu))
}

/// The same characteristic function as the `w`-average of
/// `cos(‖ξ‖^{ν/2} w)` against the weight `g(w,t)`, computed by Gauss–Jacobi
/// quadrature matched to the endpoint exponent.
pub fn fracepd_cf_poisson(xi: &[f64], t: f64, q: &FracEpdParams) -> Result<f64> {
    q.validate()?;
    check_t(t)?;
    check_point(xi, q.d)?;
    let z = q.c * t * norm(xi).powf(0.5 * q.nu);
    let a = q.weight_exponent();
    let sum = if z <= 300.0 {
        let n = 40 + (0.6 * z).ceil() as usize;
        let rule = gauss_jacobi(n, a, a)?;
        rule.nodes.iter().zip(&rule.weights).map(|(u, w)| w * (z * u).cos()).sum::<f64>()
    } else {
        let panels = (z / 3.0).ceil() as usize;
        let (nodes, weights) = endpoint_weighted_rule(-1.0, 1.0, a, a, panels, 16)?;
        nodes.iter().zip(&weights).map(|(u, w)| w * (z * u).cos()).sum::<f64>()
    };
    Ok(q.weight_constant() * sum)
}

/// Radial factor of the `d`-dimensional inverse Fourier transform:
/// `f(x) = ∫₀^∞ ρ^{d-1} f̂(ρ) Λ(ρ‖x‖) dρ · (2π)^{-d/2}/(2^{d/2-1}Γ(d/2))`
/// with `Λ(z) = Γ(d/2)(2/z)^{d/2-1}J_{d/2-1}(z)`.
fn radial_factors(grid: &DampedGrid, r: f64, d: usize) -> Vec<f64> {
    let h = 0.5 * d as f64;
    let pref = (-h * (2.0 * PI).ln() - (h - 1.0) * 2f64.ln() - ln_gamma(h)).exp();
    grid.nodes()
        .iter()
        .map(|&rho| {
            let z = rho * r;
            let lam = match d {
                1 => z.cos(),
                3 if z > 0.0 => z.sin() / z,
                _ => normalized_j(h - 1.0, z),
            };
            pref * rho.powi(d as i32 - 1) * lam
        })
        .collect()
}

/// Inverse Fourier transform of [`fracepd_cf`] as a damped radial
/// integral, with the error estimate of the damping extrapolation. Fails
/// with [`Error::Quadrature`] if the estimate exceeds `quad.tolerance`.
pub fn fracepd_density(
    x: &[f64],
    t: f64,
    q: &FracEpdParams,
    quad: &OscillatoryQuadratureSpec,
) -> Result<Estimate> {
    q.validate()?;
    check_t(t)?;
    check_point(x, q.d)?;
    let r = norm(x);
    let grid = DampedGrid::new(quad, r + q.c * t)?;
    let radial = radial_factors(&grid, r, q.d);
    let values: Vec<f64> =
        grid.nodes().iter().zip(&radial).map(|(&rho, f)| f * cf_radial(rho, t, q)).collect();
    grid.combine(&values).check(quad.tolerance)
}

/// `p₁(x,w)` and `p₂(x,w)`, the inverse transforms of `e^{±i‖ξ‖^{ν/2}w}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSample {
    pub p1: Complex64,
    pub p2: Complex64,
    pub error: f64,
}

impl KernelSample {
    /// `(p₁ + p₂)/2`, the inverse transform of `cos(‖ξ‖^{ν/2}w)`.
    pub fn mean(&self) -> Complex64 {
        0.5 * (self.p1 + self.p2)
    }
}

fn damped_exp(grid: &DampedGrid, radial: &[f64], nu: f64, w: f64) -> (Complex64, f64) {
    let values: Vec<Complex64> = grid
        .nodes()
        .iter()
        .zip(radial)
        .map(|(&rho, f)| Complex64::from_polar(*f, rho.powf(0.5 * nu) * w))
        .collect();
    grid.combine_complex(&values)
}

/// Damped radial quadrature of the two kernels. They exist only as
/// distributions in general; the values are the extrapolated limits of the
/// smoothed kernels and are meaningful inside integrals against smooth
/// weights.
pub fn kernel_p12(
    x: &[f64],
    w: f64,
    nu: f64,
    d: usize,
    quad: &OscillatoryQuadratureSpec,
) -> Result<KernelSample> {
    if !(nu > 0.0 && nu <= 2.0) {
        return domain(format!("stable index must lie in (0, 2], got {nu}"));
    }
    if d == 0 {
        return domain("dimension must be at least 1");
    }
    check_point(x, d)?;
    if !w.is_finite() {
        return domain(format!("w must be finite, got {w}"));
    }
    let r = norm(x);
    let grid = DampedGrid::new(quad, r + w.abs())?;
    let radial = radial_factors(&grid, r, d);
    let (p1, e1) = damped_exp(&grid, &radial, nu, w);
    let (p2, e2) = damped_exp(&grid, &radial, nu, -w);
    let error = e1.max(e2);
    if error > quad.tolerance {
        return Err(Error::Quadrature { estimate: error, tolerance: quad.tolerance });
    }
    Ok(KernelSample { p1, p2, error })
}

/// `∫_{-ct}^{ct} g(w,t)(p₁+p₂)(x,w)/2 dw`, with the kernels evaluated by
/// the damped radial rule at every node of a Gauss–Jacobi composite rule in
/// `w`. The error estimate covers the damping extrapolation.
pub fn compose_solution(
    x: &[f64],
    t: f64,
    q: &FracEpdParams,
    quad: &OscillatoryQuadratureSpec,
) -> Result<Estimate> {
    q.validate()?;
    check_t(t)?;
    check_point(x, q.d)?;
    let r = norm(x);
    let ct = q.c * t;
    let grid = DampedGrid::new(quad, r + ct)?;
    let radial = radial_factors(&grid, r, q.d);
    let freqs: Vec<f64> = grid.nodes().iter().map(|rho| rho.powf(0.5 * q.nu)).collect();
    let kmax = quad.cutoff().powf(0.5 * q.nu);
    let a = q.weight_exponent();
    let panels = (2.0 * ct * kmax / 8.0).ceil().max(1.0) as usize;
    let (wn, ww) = endpoint_weighted_rule(-ct, ct, a, a, panels, 16)?;
    let main = grid.main_weights();
    let err = grid.err_weights();
    let mut value = 0.0;
    let mut error = 0.0;
    for (w, wt) in wn.iter().zip(&ww) {
        let (mut km, mut ke) = (0.0, 0.0);
        for j in 0..freqs.len() {
            let f = radial[j] * (freqs[j] * w).cos();
            km += main[j] * f;
            ke += err[j] * f;
        }
        value += wt * km;
        error += wt * ke;
    }
    // endpoint_weighted_rule integrates against (w+ct)^a (ct-w)^a
    let scale = q.weight_constant() / ct * ct.powf(-2.0 * a);
    Estimate::new(scale * value, (scale * error).abs()).check(quad.tolerance)
}

/// Fourier-space check of the fractional porous medium identity in one
/// dimension.
///
/// With `m = 1 + 1/(γ-1)` the weight exponent `γ - 1` equals `1/(m-1)`, and
/// the source-type solution `𝔤(w,t)` of the 1-d PME has support
/// `|w| < t^β/√B`. The check compares, at each `ξ` with `k = |ξ|^{ν/2}`,
///
/// ```text
/// ∂_t ∫ 𝔤(w,t) cos(kw) dw   and   -|ξ|^ν ∫ 𝔤(w,t)^m cos(kw) dw,
/// ```
///
/// the first by a centred difference of step [`IDENTITY_TIME_STEP`], both
/// integrals by Gauss–Jacobi rules whose weights are the powers of the profile.
pub fn frac_pme_identity_check(t: f64, gamma: f64, nu: f64, xi_grid: &[f64]) -> Result<VerifyReport> {
    check_t(t)?;
    if !(gamma > 1.0) {
        return domain(format!("need γ > 1 in one dimension, got {gamma}"));
    }
    if !(nu > 0.0 && nu <= 2.0) {
        return domain(format!("stable index must lie in (0, 2], got {nu}"));
    }
    if t <= IDENTITY_TIME_STEP {
        return domain(format!("time must exceed the difference step, got {t}"));
    }
    let m = 1.0 + 1.0 / (gamma - 1.0);
    let p = ModelParams::new(m, 1)?;
    let lhs_rule = gauss_jacobi(80, p.exponent(), p.exponent())?;
    let rhs_rule = gauss_jacobi(80, m * p.exponent(), m * p.exponent())?;
    // ∫ 𝔤(w,s)^power cos(kw) dw = s^{-α·power} R ∫ (1-u²)^{power/(m-1)} cos(kRu) du
    let transform = |k: f64, s: f64, power: f64, rule: &crate::quad::Rule| {
        let rad = p.support_radius(s);
        let amp = source_unchecked(0.0, s, &p).powf(power);
        let sum: f64 =
            rule.nodes.iter().zip(&rule.weights).map(|(u, w)| w * (k * rad * u).cos()).sum();
        amp * rad * sum
    };
    let h = IDENTITY_TIME_STEP;
    let mut worst: f64 = 0.0;
    for &xi in xi_grid {
        let k = xi.abs().powf(0.5 * nu);
        let lhs = (transform(k, t + h, 1.0, &lhs_rule) - transform(k, t - h, 1.0, &lhs_rule))
            / (2.0 * h);
        let rhs = -xi.abs().powf(nu) * transform(k, t, m, &rhs_rule);
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(VerifyReport::at_most(
        "frac-pme",
        json!({ "t": t, "gamma": gamma, "nu": nu, "m": m, "d": 1, "xi": xi_grid }),
        worst,
        IDENTITY_TOLERANCE,
    ))
}

fn uniform_spacing(x: &[f64], period: f64) -> Result<()> {
    if x.len() < 2 {
        return domain("periodic grid needs at least two points");
    }
    if !(period > 0.0 && period.is_finite()) {
        return domain(format!("period must be positive, got {period}"));
    }
    let h = period / x.len() as f64;
    let worst = x.windows(2).map(|p| (p[1] - p[0] - h).abs()).fold(0.0, f64::max);
    if worst > 1e-9 * h {
        return Err(Error::NonUniformGrid(worst));
    }
    Ok(())
}

fn spectral_multiply(f: &[f64], period: f64, symbol: impl Fn(f64) -> f64) -> Vec<f64> {
    let n = f.len();
    let mut planner = FftPlanner::new();
    let mut buf: Vec<Complex64> = f.iter().map(|v| Complex64::new(*v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut buf);
    for (k, c) in buf.iter_mut().enumerate() {
        let kk = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        *c *= symbol(2.0 * PI * kk.abs() / period);
    }
    planner.plan_fft_inverse(n).process(&mut buf);
    buf.iter().map(|c| c.re / n as f64).collect()
}

/// Riesz derivative `-(-Δ)^{ν/2}` on samples `f` at uniformly spaced points
/// `x` of one period `period`: multiplies the discrete Fourier coefficients
/// by `-|ξ_k|^ν`.
pub fn riesz_spectral(x: &[f64], f: &[f64], nu: f64, period: f64) -> Result<Vec<f64>> {
    Ok(fractional_laplacian_spectral(x, f, nu, period)?.into_iter().map(|v| -v).collect())
}

/// Fractional Laplacian `(-Δ)^{ν/2}`, symbol `+|ξ_k|^ν`. Unlike the Riesz
/// form this composes additively: `(-Δ)^{a}(-Δ)^{b} = (-Δ)^{a+b}`.
pub fn fractional_laplacian_spectral(x: &[f64], f: &[f64], nu: f64, period: f64) -> Result<Vec<f64>> {
    if !(nu > 0.0 && nu <= 2.0) {
        return domain(format!("stable index must lie in (0, 2], got {nu}"));
    }
    if x.len() != f.len() {
        return domain(format!("{} points but {} samples", x.len(), f.len()));
    }
    uniform_spacing(x, period)?;
    Ok(spectral_multiply(f, period, |k| if k == 0.0 { 0.0 } else { k.powf(nu) }))
}
