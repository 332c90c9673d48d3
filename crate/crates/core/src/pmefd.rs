//! Explicit finite-volume solver for the porous medium equation in one
//! dimension and for radially symmetric solutions in `d` dimensions, a
//! finite-difference residual of the source-type solution, and the
//! exponent system behind that solution.

use serde::{Deserialize, Serialize};

use crate::analytic::{source_unchecked, ModelParams};
use crate::error::{domain, Error, Result};
use crate::specfun::ln_gamma;

/// Grid and time-stepping parameters.
///
/// With `d = 1` the cells cover `[-l, l]`; for `d >= 2` the unknown is the
/// radial profile on `[0, l]`. The step is `cfl·h²/(2k·m·max u^{m-1})` with
/// `k = 1` in one dimension and `k = d` for the radial scheme, whose first
/// cell has the stiffest stencil.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub l: f64,
    pub nx: usize,
    pub t0: f64,
    pub t1: f64,
    pub cfl: f64,
    /// Fixed step instead of the adaptive one; rejected if it ever exceeds
    /// the stability bound.
    #[serde(default)]
    pub dt: Option<f64>,
}

impl GridSpec {
    pub fn new(l: f64, nx: usize, t0: f64, t1: f64, cfl: f64) -> Result<Self> {
        let g = Self { l, nx, t0, t1, cfl, dt: None };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.l > 0.0 && self.l.is_finite()) {
            return domain(format!("half-width must be positive, got {}", self.l));
        }
        if self.nx < 4 {
            return domain(format!("need at least 4 cells, got {}", self.nx));
        }
        if !(self.t0 > 0.0 && self.t1 > self.t0 && self.t1.is_finite()) {
            return domain(format!("need 0 < t0 < t1, got t0={} t1={}", self.t0, self.t1));
        }
        if !(self.cfl > 0.0 && self.cfl < 1.0) {
            return domain(format!("cfl must lie in (0, 1), got {}", self.cfl));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return domain(format!("time step must be positive, got {dt}"));
            }
        }
        Ok(())
    }

    /// Cell width.
    pub fn h(&self, d: usize) -> f64 {
        if d == 1 {
            2.0 * self.l / self.nx as f64
        } else {
            self.l / self.nx as f64
        }
    }
}

/// Cell centres: `x_i` on `[-l, l]` for `d = 1`, radii on `[0, l]` otherwise.
pub fn grid_points(d: usize, g: &GridSpec) -> Vec<f64> {
    let h = g.h(d);
    let start = if d == 1 { -g.l } else { 0.0 };
    (0..g.nx).map(|i| start + (i as f64 + 0.5) * h).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvolveResult {
    pub x: Vec<f64>,
    pub u: Vec<f64>,
    pub t: f64,
    pub steps: usize,
    pub initial_mass: f64,
    pub final_mass: f64,
    /// Mass added back by clipping negative undershoots to zero.
    pub clipped_mass: f64,
}

impl EvolveResult {
    /// Outermost cell centre where `u` exceeds `threshold`.
    pub fn front(&self, threshold: f64) -> f64 {
        self.x
            .iter()
            .zip(&self.u)
            .filter(|(_, u)| **u > threshold)
            .map(|(x, _)| x.abs())
            .fold(0.0, f64::max)
    }
}

struct Geometry {
    /// Cell measures, including the sphere area for `d >= 2`.
    volume: Vec<f64>,
    /// `area[i]` is the face between cells `i-1` and `i`; `area[0]` and
    /// `area[nx]` are the closed outer faces.
    area: Vec<f64>,
    stiffness: f64,
}

fn geometry(d: usize, g: &GridSpec) -> Geometry {
    let h = g.h(d);
    let n = g.nx;
    if d == 1 {
        let mut area = vec![1.0; n + 1];
        area[0] = 0.0;
        area[n] = 0.0;
        return Geometry { volume: vec![h; n], area, stiffness: 1.0 };
    }
    let df = d as f64;
    let sphere = 2.0 * (0.5 * df * std::f64::consts::PI.ln() - ln_gamma(0.5 * df)).exp();
    let volume = (0..n)
        .map(|i| {
            let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
            sphere * (b.powi(d as i32) - a.powi(d as i32)) / df
        })
        .collect();
    let mut area: Vec<f64> = (0..=n).map(|i| sphere * (i as f64 * h).powi(d as i32 - 1)).collect();
    area[n] = 0.0;
    Geometry { volume, area, stiffness: df }
}

/// Measure of each cell; for `d >= 2` this includes the sphere area, so
/// `Σ u_i V_i` is the mass in `R^d`.
pub fn cell_volumes(d: usize, g: &GridSpec) -> Vec<f64> {
    geometry(d, g).volume
}

/// Evolve `u0` (values at [`grid_points`]) from `t0` to `t1` with the
/// conservative explicit update `u ← u + dt·Δ_h(u^m)` and zero-flux ends.
pub fn pme_evolve(u0: &[f64], p: &ModelParams, g: &GridSpec) -> Result<EvolveResult> {
    g.validate()?;
    let n = g.nx;
    if u0.len() != n {
        return domain(format!("initial data has {} values, grid has {n}", u0.len()));
    }
    if u0.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return domain("initial data must be finite and non-negative");
    }
    let last = n - 1;
    if u0[last] > 0.0 || (p.d() == 1 && u0[0] > 0.0) {
        return domain("initial data must vanish at the edge of the grid");
    }
    let m = p.m();
    let h = g.h(p.d());
    let geo = geometry(p.d(), g);
    let mass = |u: &[f64]| u.iter().zip(&geo.volume).map(|(a, v)| a * v).sum::<f64>();

    let mut u = u0.to_vec();
    let mut um = vec![0.0; n];
    let mut flux = vec![0.0; n + 1];
    let initial_mass = mass(&u);
    let mut clipped = 0.0;
    let mut t = g.t0;
    let mut steps = 0;
    let pow = |v: f64| if m == 2.0 { v * v } else { v.powf(m) };
    while t < g.t1 {
        let umax = u.iter().fold(0.0f64, |a, b| a.max(*b));
        let bound = h * h / (2.0 * geo.stiffness * m * umax.powf(m - 1.0).max(f64::MIN_POSITIVE));
        let mut dt = match g.dt {
            Some(dt) if dt > bound => return Err(Error::Cfl { dt, bound }),
            Some(dt) => dt,
            None => g.cfl * bound,
        };
        if t + dt >= g.t1 {
            dt = g.t1 - t;
        }
        for (a, b) in um.iter_mut().zip(&u) {
            *a = pow(*b);
        }
        for i in 1..n {
            flux[i] = geo.area[i] * (um[i] - um[i - 1]) / h;
        }
        for i in 0..n {
            u[i] += dt * (flux[i + 1] - flux[i]) / geo.volume[i];
            if u[i] < 0.0 {
                clipped -= u[i] * geo.volume[i];
                u[i] = 0.0;
            }
        }
        t = if dt == g.t1 - t { g.t1 } else { t + dt };
        steps += 1;
    }
    let final_mass = mass(&u);
    Ok(EvolveResult {
        x: grid_points(p.d(), g),
        u,
        t,
        steps,
        initial_mass,
        final_mass,
        clipped_mass: clipped,
    })
}

/// Source-type solution sampled at [`grid_points`] at time `t`.
pub fn source_on_grid(p: &ModelParams, g: &GridSpec, t: f64) -> Vec<f64> {
    grid_points(p.d(), g).iter().map(|x| source_unchecked(x.abs(), t, p)).collect()
}

/// `|∂_t u - Δ(u^m)|` for the unit-amplitude source-type solution, by
/// centred differences of step `h` in every coordinate and in time.
/// Points whose stencil touches the free boundary are rejected.
pub fn pme_residual(p: &ModelParams, x: &[f64], t: f64, h: f64) -> Result<f64> {
    if x.len() != p.d() {
        return domain(format!("point has {} coordinates, expected {}", x.len(), p.d()));
    }
    if !(h > 0.0) || !(t - h > 0.0) {
        return domain(format!("need 0 < h < t, got h={h} t={t}"));
    }
    let r = |y: &[f64]| y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let inside = |y: &[f64], s: f64| r(y) < p.support_radius(s);
    let mut y = x.to_vec();
    let mut ok = inside(x, t - h);
    for j in 0..x.len() {
        for s in [-h, h] {
            y[j] = x[j] + s;
            ok &= inside(&y, t);
        }
        y[j] = x[j];
    }
    if !ok {
        return Err(Error::OutsideSupport(format!("x={x:?}, t={t}, h={h}")));
    }
    let u = |y: &[f64], s: f64| source_unchecked(r(y), s, p);
    let m = p.m();
    let dt = (u(x, t + h) - u(x, t - h)) / (2.0 * h);
    let centre = u(x, t).powf(m);
    let mut lap = 0.0;
    for j in 0..x.len() {
        y[j] = x[j] + h;
        let up = u(&y, t).powf(m);
        y[j] = x[j] - h;
        let dn = u(&y, t).powf(m);
        y[j] = x[j];
        lap += (up - 2.0 * centre + dn) / (h * h);
    }
    Ok((dt - lap).abs())
}

/// Exponents of the ansatz `t^δ (1 - B‖x‖²/t^η)^γ` and the residuals of the
/// four matching conditions obtained by substituting it into the PME.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AppendixSolution {
    pub gamma: f64,
    pub delta: f64,
    pub eta: f64,
    pub b: f64,
    pub residuals: [f64; 4],
}

/// Solve the matching conditions
///
/// ```text
/// γ = γm - 1
/// δ - 1 = mδ - η
/// δ - ηγ = -2Bγm(d + 2(γm - 1))
/// γη = 4Bγm(γm - 1)
/// ```
///
/// by forward substitution: the first fixes `γ`, the last then gives `B` in
/// terms of `η`, the third gives `δ = -dη/2` and the second fixes `η`.
pub fn appendix_system_solve(m: f64, d: usize) -> Result<AppendixSolution> {
    if !(m > 1.0) || !m.is_finite() {
        return domain(format!("PME exponent must satisfy m > 1, got {m}"));
    }
    if d == 0 {
        return domain("dimension must be at least 1");
    }
    let df = d as f64;
    let gamma = 1.0 / (m - 1.0);
    let eta = 1.0 / (1.0 + 0.5 * df * (m - 1.0));
    let delta = -0.5 * df * eta;
    let b = eta / (4.0 * gamma * m);
    let residuals = appendix_residuals(m, d, gamma, delta, eta, b);
    Ok(AppendixSolution { gamma, delta, eta, b, residuals })
}

/// Left minus right side of each matching condition.
pub fn appendix_residuals(m: f64, d: usize, gamma: f64, delta: f64, eta: f64, b: f64) -> [f64; 4] {
    let gm = gamma * m;
    [
        gamma - (gm - 1.0),
        (delta - 1.0) - (m * delta - eta),
        (delta - eta * gamma) + 2.0 * b * gm * (d as f64 + 2.0 * (gm - 1.0)),
        gamma * eta - 4.0 * b * gm * (gm - 1.0),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::barenblatt_unchecked;

    #[test]
    fn exponent_system_m2_d1() {
        let s = appendix_system_solve(2.0, 1).unwrap();
        assert!((s.gamma - 1.0).abs() < 1e-15);
        assert!((s.delta + 1.0 / 3.0).abs() < 1e-15);
        assert!((s.eta - 2.0 / 3.0).abs() < 1e-15);
        assert!((s.b - 1.0 / 12.0).abs() < 1e-15);
        assert!(s.residuals.iter().all(|r| r.abs() < 1e-15));
        assert!(appendix_system_solve(1.0, 1).is_err());
    }

    #[test]
    fn residual_rejects_free_boundary() {
        let p = ModelParams::new(2.0, 1).unwrap();
        let edge = p.support_radius(1.0);
        assert!(matches!(
            pme_residual(&p, &[edge - 1e-4], 1.0, 1e-3),
            Err(Error::OutsideSupport(_))
        ));
        assert!(pme_residual(&p, &[0.5], 1.0, 1e-3).unwrap() < 1e-5);
    }

    #[test]
    fn normalized_density_solves_rescaled_equation() {
        // C·f solves ∂u = C^{1-m} Δ(u^m); with C != 1 the plain PME residual
        // stays O(1) while the rescaled one vanishes with h.
        let p = ModelParams::new(2.0, 1).unwrap();
        let (x, t, h) = (0.7, 1.3, 1e-3);
        let u = |y: f64, s: f64| barenblatt_unchecked(y.abs(), s, &p);
        let ut = (u(x, t + h) - u(x, t - h)) / (2.0 * h);
        let lap = (u(x + h, t).powi(2) - 2.0 * u(x, t).powi(2) + u(x - h, t).powi(2)) / (h * h);
        assert!((ut - lap).abs() > 1e-2);
        assert!((ut - lap / p.c()).abs() < 1e-6);
    }

    #[test]
    fn evolve_conserves_mass_and_lands_on_t1() {
        let p = ModelParams::new(2.0, 2).unwrap();
        let g = GridSpec::new(6.0, 200, 1.0, 1.2, 0.9).unwrap();
        let u0 = source_on_grid(&p, &g, 1.0);
        let res = pme_evolve(&u0, &p, &g).unwrap();
        assert_eq!(res.t, 1.2);
        assert!(((res.final_mass - res.initial_mass) / res.initial_mass).abs() < 1e-12);
        assert_eq!(res.clipped_mass, 0.0);
    }

    #[test]
    fn fixed_step_above_bound_is_rejected() {
        let p = ModelParams::new(2.0, 1).unwrap();
        let mut g = GridSpec::new(5.0, 100, 1.0, 2.0, 0.5).unwrap();
        g.dt = Some(1.0);
        let u0 = source_on_grid(&p, &g, 1.0);
        assert!(matches!(pme_evolve(&u0, &p, &g), Err(Error::Cfl { .. })));
    }

    #[test]
    fn grid_geometry() {
        let g = GridSpec::new(1.0, 4, 1.0, 2.0, 0.5).unwrap();
        assert_eq!(grid_points(1, &g), vec![-0.75, -0.25, 0.25, 0.75]);
        assert_eq!(grid_points(3, &g), vec![0.125, 0.375, 0.625, 0.875]);
        let geo = geometry(3, &g);
        let total: f64 = geo.volume.iter().sum();
        assert!((total - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-14);
    }
}
