//! Closed forms for the Barenblatt (source-type) solution of the porous
//! medium equation `∂u/∂t = Δ(u^m)` and for the fundamental solution of
//! the Euler–Poisson–Darboux equation, plus the maps between the two and
//! the random-flight parameters.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{domain, Result};
use crate::specfun::{beta_reg, ln_gamma, normalized_j};
use crate::stats::VerifyReport;

/// PME exponent `m > 1` and dimension `d >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    m: f64,
    d: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BarenblattConstants {
    pub alpha: f64,
    pub beta: f64,
    pub b: f64,
    pub c: f64,
}

impl ModelParams {
    pub fn new(m: f64, d: usize) -> Result<Self> {
        if !(m > 1.0) || !m.is_finite() {
            return domain(format!("PME exponent must satisfy m > 1, got {m}"));
        }
        if d == 0 {
            return domain("dimension must be at least 1");
        }
        Ok(Self { m, d })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn d(&self) -> usize {
        self.d
    }

    fn denom(&self) -> f64 {
        2.0 + self.d as f64 * (self.m - 1.0)
    }

    pub fn alpha(&self) -> f64 {
        self.d as f64 / self.denom()
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.denom()
    }

    pub fn b(&self) -> f64 {
        (self.m - 1.0) / (2.0 * self.m * self.denom())
    }

    pub fn c(&self) -> f64 {
        let h = 0.5 * self.d as f64;
        let q = self.m / (self.m - 1.0);
        (ln_gamma(h + q) - ln_gamma(q) + h * self.b().ln() - h * PI.ln()).exp()
    }

    /// Profile exponent `1/(m-1)`.
    pub fn exponent(&self) -> f64 {
        1.0 / (self.m - 1.0)
    }

    /// Free-boundary radius `t^β/√B`.
    pub fn support_radius(&self, t: f64) -> f64 {
        t.powf(self.beta()) / self.b().sqrt()
    }

    /// EPD parameters whose solution at time `t^β` is the Barenblatt profile
    /// at time `t`: `γ = m/(m-1)`, `c = 1/√B`.
    pub fn epd_equivalent(&self) -> EpdParams {
        EpdParams { gamma: self.m / (self.m - 1.0), c: 1.0 / self.b().sqrt(), d: self.d }
    }
}

pub fn barenblatt_constants(p: &ModelParams) -> BarenblattConstants {
    BarenblattConstants { alpha: p.alpha(), beta: p.beta(), b: p.b(), c: p.c() }
}

pub(crate) fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        domain(format!("time must be positive, got {t}"))
    }
}

fn check_dim(x: &[f64], d: usize) -> Result<()> {
    if x.len() == d {
        Ok(())
    } else {
        domain(format!("point has {} coordinates, expected {d}", x.len()))
    }
}

/// Barenblatt density at a point of `R^d`.
pub fn barenblatt_density(x: &[f64], t: f64, p: &ModelParams) -> Result<f64> {
    check_dim(x, p.d)?;
    barenblatt_radial(norm(x), t, p)
}

/// Barenblatt density as a function of `r = ‖x‖`.
pub fn barenblatt_radial(r: f64, t: f64, p: &ModelParams) -> Result<f64> {
    check_t(t)?;
    Ok(barenblatt_unchecked(r, t, p))
}

pub(crate) fn barenblatt_unchecked(r: f64, t: f64, p: &ModelParams) -> f64 {
    let tb = t.powf(p.beta());
    if r >= tb / p.b().sqrt() {
        return 0.0;
    }
    let s = 1.0 - p.b() * r * r / (tb * tb);
    p.c() * t.powf(-p.alpha()) * s.powf(p.exponent())
}

/// Source-type solution `t^{-α}(1 - B‖x‖²/t^{2β})_+^{1/(m-1)}` of the PME
/// itself, with unit amplitude. The Barenblatt density is `C` times this
/// profile. The equation is nonlinear, so the normalized density solves
/// `∂u/∂t = C^{1-m} Δ(u^m)` instead; PDE-side checks use this profile.
pub fn pme_source_solution(x: &[f64], t: f64, p: &ModelParams) -> Result<f64> {
    check_dim(x, p.d)?;
    check_t(t)?;
    Ok(source_unchecked(norm(x), t, p))
}

pub(crate) fn source_unchecked(r: f64, t: f64, p: &ModelParams) -> f64 {
    let tb = t.powf(p.beta());
    if r >= tb / p.b().sqrt() {
        return 0.0;
    }
    let s = 1.0 - p.b() * r * r / (tb * tb);
    t.powf(-p.alpha()) * s.powf(p.exponent())
}

/// `P(‖Y‖ <= r)`: `‖Y‖²/R²` is Beta(`d/2`, `1/(m-1) + 1`).
pub fn barenblatt_radial_cdf(r: f64, t: f64, p: &ModelParams) -> Result<f64> {
    check_t(t)?;
    if r <= 0.0 {
        return Ok(0.0);
    }
    let rad = p.support_radius(t);
    if r >= rad {
        return Ok(1.0);
    }
    Ok(beta_reg(0.5 * p.d as f64, p.exponent() + 1.0, (r / rad).powi(2)))
}

/// One-dimensional Barenblatt CDF `P(Y <= x)`.
pub fn barenblatt_cdf_1d(x: f64, t: f64, m: f64) -> Result<f64> {
    let p = ModelParams::new(m, 1)?;
    let half = 0.5 * barenblatt_radial_cdf(x.abs(), t, &p)?;
    Ok(if x >= 0.0 { 0.5 + half } else { 0.5 - half })
}

/// Parameters of the EPD equation
/// `u_tt + ((2γ+d-1)/t) u_t = c² Δu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpdParams {
    pub gamma: f64,
    pub c: f64,
    pub d: usize,
}

impl EpdParams {
    pub fn new(gamma: f64, c: f64, d: usize) -> Result<Self> {
        if !(gamma > 0.0) || !gamma.is_finite() {
            return domain(format!("gamma must be positive, got {gamma}"));
        }
        if !(c > 0.0) || !c.is_finite() {
            return domain(format!("speed must be positive, got {c}"));
        }
        if d == 0 {
            return domain("dimension must be at least 1");
        }
        Ok(Self { gamma, c, d })
    }

    pub(crate) fn validate(&self) -> Result<()> {
        Self::new(self.gamma, self.c, self.d).map(|_| ())
    }
}

/// EPD fundamental solution, a Beta-type law on the ball of radius `ct`.
pub fn epd_density(x: &[f64], t: f64, q: &EpdParams) -> Result<f64> {
    q.validate()?;
    check_dim(x, q.d)?;
    check_t(t)?;
    Ok(epd_radial_unchecked(norm(x), t, q))
}

pub(crate) fn epd_radial_unchecked(r: f64, t: f64, q: &EpdParams) -> f64 {
    let ct = q.c * t;
    if r >= ct {
        return 0.0;
    }
    let h = 0.5 * q.d as f64;
    let k = (ln_gamma(q.gamma + h) - h * PI.ln() - ln_gamma(q.gamma)).exp();
    k * ct.powi(-(q.d as i32)) * (1.0 - (r / ct).powi(2)).powf(q.gamma - 1.0)
}

/// Compares the Barenblatt profile at `t` with the EPD solution at `t^β`
/// on a grid of 100 `(x, t)` pairs (relative discrepancy).
pub fn pme_epd_rescale_check(p: &ModelParams) -> VerifyReport {
    let q = p.epd_equivalent();
    let dir = 1.0 / (p.d as f64).sqrt();
    let mut worst: f64 = 0.0;
    for &t in &[0.25, 0.5, 1.0, 2.0, 5.0] {
        let rad = p.support_radius(t);
        for k in 0..20 {
            let r = rad * ((k as f64 + 0.5) / 16.0);
            let x = vec![r * dir; p.d];
            let a = barenblatt_density(&x, t, p).unwrap_or(f64::NAN);
            let b = epd_density(&x, t.powf(p.beta()), &q).unwrap_or(f64::NAN);
            let diff = (a - b).abs() / a.abs().max(1.0);
            worst = if diff.is_nan() { f64::INFINITY } else { worst.max(diff) };
        }
    }
    VerifyReport::at_most(
        "pme_epd_rescale",
        json!({"m": p.m, "d": p.d, "points": 100}),
        worst,
        1e-12,
    )
}

/// Waiting-time law of a random flight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FlightLaw {
    /// Uniform order statistics, for the telegraph process (`d = 1`).
    F1,
    /// Dirichlet with all parameters `d - 1` (`d >= 2`).
    F2,
    /// Dirichlet with all parameters `d/2 - 1` (`d >= 3`).
    F3,
}

impl FlightLaw {
    pub fn dimension_ok(self, d: usize) -> bool {
        match self {
            FlightLaw::F1 => d == 1,
            FlightLaw::F2 => d >= 2,
            FlightLaw::F3 => d >= 3,
        }
    }

    /// Dirichlet parameter of each waiting-time cell.
    pub fn dirichlet_parameter(self, d: usize) -> f64 {
        match self {
            FlightLaw::F1 => 1.0,
            FlightLaw::F2 => d as f64 - 1.0,
            FlightLaw::F3 => 0.5 * d as f64 - 1.0,
        }
    }
}

impl std::str::FromStr for FlightLaw {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "f1" => Ok(FlightLaw::F1),
            "f2" => Ok(FlightLaw::F2),
            "f3" => Ok(FlightLaw::F3),
            other => Err(format!("unknown flight law {other:?} (expected f1, f2 or f3)")),
        }
    }
}

/// PME exponent whose Barenblatt solution is the law of the time-rescaled
/// flight with `n` direction changes, or `None` if there is none.
pub fn m_from_n(d: usize, n: usize, law: FlightLaw) -> Option<f64> {
    if n == 0 || !law.dimension_ok(d) {
        return None;
    }
    let nf = n as f64;
    match law {
        FlightLaw::F1 => match n {
            _ if n >= 3 && n % 2 == 1 => Some((nf + 1.0) / (nf - 1.0)),
            _ if n >= 4 && n % 2 == 0 => Some(nf / (nf - 2.0)),
            _ => None,
        },
        FlightLaw::F2 => {
            let k = nf * (d as f64 - 1.0);
            (k > 2.0).then(|| k / (k - 2.0))
        }
        FlightLaw::F3 => {
            let k = nf * (d as f64 - 2.0);
            (k > 2.0).then(|| k / (k - 2.0))
        }
    }
}

/// Characteristic function `E e^{i⟨ξ,Y⟩}` of the Barenblatt law:
/// `Λ_μ(‖ξ‖ t^β/√B)` with `μ = d/2 + 1/(m-1)`.
pub fn barenblatt_cf(xi: &[f64], t: f64, p: &ModelParams) -> Result<f64> {
    check_dim(xi, p.d)?;
    check_t(t)?;
    let mu = 0.5 * p.d as f64 + p.exponent();
    Ok(normalized_j(mu, norm(xi) * p.support_radius(t)))
}

/// `E Y^p` for the one-dimensional Barenblatt law (zero for odd `p`).
pub fn moment_y1(p_order: u32, t: f64, m: f64) -> Result<f64> {
    check_t(t)?;
    let p = ModelParams::new(m, 1)?;
    if p_order % 2 == 1 {
        return Ok(0.0);
    }
    let k = 0.5 * (p_order as f64 + 1.0);
    let q = m / (m - 1.0);
    let ratio = (ln_gamma(k) + ln_gamma(0.5 + q) - 0.5 * PI.ln() - ln_gamma(k + q)).exp();
    Ok(ratio * p.support_radius(t).powi(p_order as i32))
}

/// Closed-form variance `2m(m+1)/(3m-1) · t^{2/(1+m)}` of the 1-d law.
pub fn variance_y1(t: f64, m: f64) -> Result<f64> {
    check_t(t)?;
    ModelParams::new(m, 1)?;
    Ok(2.0 * m * (m + 1.0) / (3.0 * m - 1.0) * t.powf(2.0 / (1.0 + m)))
}

/// One coordinate's marginal of the `d`-dimensional EPD law associated with
/// `p`, at rescaled time `t'`. Its profile exponent is
/// `1/(m-1) + (d-1)/2`.
pub fn marginal_density_1d(xk: f64, tprime: f64, p: &ModelParams) -> Result<f64> {
    check_t(tprime)?;
    let q = p.epd_equivalent();
    let ct = q.c * tprime;
    if xk.abs() >= ct {
        return Ok(0.0);
    }
    let half_dm1 = 0.5 * (p.d as f64 - 1.0);
    let expo = p.exponent() + half_dm1;
    let k = (ln_gamma(expo + 1.5) - 0.5 * PI.ln() - ln_gamma(expo + 1.0)).exp();
    Ok(k / ct * (1.0 - (xk / ct).powi(2)).powf(expo))
}
