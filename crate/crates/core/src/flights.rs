//! Random flights with Dirichlet waiting times, their exact densities, and
//! an Euler–Maruyama sampler for the diffusion whose marginals follow the
//! Barenblatt profile.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::analytic::{norm, source_unchecked, FlightLaw, ModelParams};
use crate::error::{domain, Error, Result};
use crate::rng::{try_generate, StreamRng};
use crate::specfun::ln_gamma;

/// A flight with `n` direction changes in `R^d`, speed `c`, horizon `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlightSpec {
    pub n: usize,
    pub d: usize,
    pub law: FlightLaw,
    pub c: f64,
    pub t: f64,
}

impl FlightSpec {
    pub fn new(n: usize, d: usize, law: FlightLaw, c: f64, t: f64) -> Result<Self> {
        let s = Self { n, d, law, c, t };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidSpec("need at least one direction change".into()));
        }
        if !self.law.dimension_ok(self.d) {
            return Err(Error::InvalidSpec(format!(
                "law {:?} is not defined in dimension {}",
                self.law, self.d
            )));
        }
        if !(self.c > 0.0 && self.t > 0.0) || !self.c.is_finite() || !self.t.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "speed and time must be positive, got c={} t={}",
                self.c, self.t
            )));
        }
        Ok(())
    }

    /// The flight that realizes the Barenblatt law of `p` at time `t`:
    /// horizon `t^β` and speed `1/√B`.
    pub fn rescaled(n: usize, law: FlightLaw, p: &ModelParams, t: f64) -> Result<Self> {
        Self::new(n, p.d(), law, 1.0 / p.b().sqrt(), t.powf(p.beta()))
    }
}

/// Positions drawn with a given seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleBatch {
    pub positions: Vec<Vec<f64>>,
    pub seed: u64,
    pub count: usize,
}

impl SampleBatch {
    pub fn radii(&self) -> Vec<f64> {
        self.positions.iter().map(|x| norm(x)).collect()
    }

    /// First coordinate of each sample.
    pub fn first_coordinates(&self) -> Vec<f64> {
        self.positions.iter().map(|x| x[0]).collect()
    }
}

/// Uniform direction on the unit sphere of `R^d`, `d >= 2`, by normalizing
/// an isotropic Gaussian vector.
pub fn sample_uniform_sphere(d: usize, rng: &mut StreamRng) -> Result<Vec<f64>> {
    if d < 2 {
        return domain(format!("sphere sampling needs d >= 2, got {d}"));
    }
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let r = norm(&v);
        if r > 1e-300 {
            return Ok(v.into_iter().map(|x| x / r).collect());
        }
    }
}

/// The `n + 1` inter-change times, summing to `t`.
pub fn sample_waiting_times(spec: &FlightSpec, rng: &mut StreamRng) -> Result<Vec<f64>> {
    spec.validate()?;
    let cells = spec.n + 1;
    let mut tau = Vec::with_capacity(cells);
    match spec.law {
        FlightLaw::F1 => {
            let mut u: Vec<f64> = (0..spec.n).map(|_| rng.random::<f64>() * spec.t).collect();
            u.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut prev = 0.0;
            for x in u {
                tau.push(x - prev);
                prev = x;
            }
        }
        FlightLaw::F2 | FlightLaw::F3 => {
            let shape = spec.law.dirichlet_parameter(spec.d);
            let gamma = Gamma::new(shape, 1.0)
                .map_err(|e| Error::InvalidSpec(format!("gamma shape {shape}: {e}")))?;
            let g: Vec<f64> = (0..cells).map(|_| gamma.sample(rng)).collect();
            let total: f64 = g.iter().sum();
            tau.extend(g[..cells - 1].iter().map(|x| spec.t * x / total));
        }
    }
    let used: f64 = tau.iter().sum();
    tau.push((spec.t - used).max(0.0));
    Ok(tau)
}

/// Position `c Σ V_k τ_{k+1}` at the horizon.
pub fn sample_flight(spec: &FlightSpec, rng: &mut StreamRng) -> Result<Vec<f64>> {
    let tau = sample_waiting_times(spec, rng)?;
    if spec.d == 1 {
        let v0 = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let s: f64 = tau
            .iter()
            .enumerate()
            .map(|(k, t)| if k % 2 == 0 { *t } else { -t })
            .sum();
        return Ok(vec![spec.c * v0 * s]);
    }
    let mut x = vec![0.0; spec.d];
    for t in tau {
        let v = sample_uniform_sphere(spec.d, rng)?;
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi += spec.c * t * vi;
        }
    }
    Ok(x)
}

/// `count` independent flights, reproducible for a given seed.
pub fn sample_flights(spec: &FlightSpec, count: usize, seed: u64) -> Result<SampleBatch> {
    spec.validate()?;
    let positions = try_generate(count, seed, |rng| sample_flight(spec, rng))?;
    Ok(SampleBatch { positions, seed, count })
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        domain(format!("time must be positive, got {t}"))
    }
}

/// Density of the telegraph process with `n` velocity switches.
pub fn telegraph_density(x: f64, t: f64, n: usize, c: f64) -> Result<f64> {
    check_t(t)?;
    if n == 0 || !(c > 0.0) {
        return domain(format!("need n >= 1 and c > 0, got n={n} c={c}"));
    }
    let ct = c * t;
    if x.abs() >= ct {
        return Ok(0.0);
    }
    let nf = n as f64;
    let s = 1.0 - (x / ct).powi(2);
    let (ln_k, expo) = if n % 2 == 1 {
        let h = 0.5 * (nf + 1.0);
        (ln_gamma(nf + 1.0) - 2.0 * ln_gamma(h), 0.5 * (nf - 1.0))
    } else {
        (ln_gamma(nf + 1.0) - ln_gamma(0.5 * nf + 1.0) - ln_gamma(0.5 * nf), 0.5 * nf - 1.0)
    };
    Ok((ln_k - nf * std::f64::consts::LN_2).exp() / ct * s.powf(expo))
}

/// Density of a flight with F2 or F3 waiting times (`d >= 2`).
pub fn flight_density(x: &[f64], spec: &FlightSpec) -> Result<f64> {
    spec.validate()?;
    if x.len() != spec.d {
        return domain(format!("point has {} coordinates, expected {}", x.len(), spec.d));
    }
    let (nf, df) = (spec.n as f64, spec.d as f64);
    let (ln_k, expo) = match spec.law {
        FlightLaw::F1 => {
            return Err(Error::InvalidSpec("use telegraph_density for the F1 law".into()))
        }
        FlightLaw::F2 => (
            ln_gamma(0.5 * (nf + 1.0) * (df - 1.0) + 0.5) - ln_gamma(0.5 * nf * (df - 1.0)),
            0.5 * nf * (df - 1.0) - 1.0,
        ),
        FlightLaw::F3 => (
            ln_gamma((nf + 1.0) * (0.5 * df - 1.0) + 1.0) - ln_gamma(nf * (0.5 * df - 1.0)),
            nf * (0.5 * df - 1.0) - 1.0,
        ),
    };
    let ct = spec.c * spec.t;
    let r = norm(x);
    if r >= ct {
        return Ok(0.0);
    }
    let k = (ln_k - 0.5 * df * PI.ln()).exp() / ct.powi(spec.d as i32);
    Ok(k * (1.0 - (r / ct).powi(2)).powf(expo))
}

/// Exact draw from the Barenblatt law at time `t`.
pub fn sample_barenblatt(p: &ModelParams, t: f64, rng: &mut StreamRng) -> Result<Vec<f64>> {
    check_t(t)?;
    let beta = Beta::new(0.5 * p.d() as f64, p.exponent() + 1.0)
        .map_err(|e| Error::Domain(format!("beta law: {e}")))?;
    let r = p.support_radius(t) * beta.sample(rng).sqrt();
    if p.d() == 1 {
        return Ok(vec![if rng.random::<bool>() { r } else { -r }]);
    }
    Ok(sample_uniform_sphere(p.d(), rng)?.into_iter().map(|v| r * v).collect())
}

/// Fraction of the horizon at which the SDE is started from the exact law.
pub const SDE_START_FRACTION: f64 = 0.01;

/// Euler–Maruyama endpoint of `dZ = √(2 f(Z,s)^{m-1}) dB` started at
/// `s0 = t/100` from the Barenblatt law at `s0`, where `f` is the PME
/// source solution (the Barenblatt density divided by `C`). The forward
/// equation `∂p/∂s = Δ(f^{m-1} p)` is linear in `p`, so the normalized
/// density `C f` is preserved.
pub fn sample_sde_barenblatt(
    p: &ModelParams,
    t: f64,
    steps: usize,
    rng: &mut StreamRng,
) -> Result<Vec<f64>> {
    sample_sde_barenblatt_from(p, t, SDE_START_FRACTION * t, steps, rng)
}

/// As [`sample_sde_barenblatt`] with an explicit start time `s0 < t`.
pub fn sample_sde_barenblatt_from(
    p: &ModelParams,
    t: f64,
    s0: f64,
    steps: usize,
    rng: &mut StreamRng,
) -> Result<Vec<f64>> {
    check_t(t)?;
    if !(s0 > 0.0 && s0 < t) {
        return domain(format!("start time must lie in (0, t), got {s0}"));
    }
    if steps < 100 {
        return domain(format!("need at least 100 steps, got {steps}"));
    }
    let dt = (t - s0) / steps as f64;
    let sq = dt.sqrt();
    let em1 = p.m() - 1.0;
    let mut z = sample_barenblatt(p, s0, rng)?;
    let mut s = s0;
    for _ in 0..steps {
        let f = source_unchecked(norm(&z), s, p);
        let sigma = (2.0 * f.powf(em1)).sqrt();
        for zi in z.iter_mut() {
            *zi += sigma * sq * rng.sample::<f64, _>(StandardNormal);
        }
        s += dt;
        let fmax = s.powf(-p.alpha());
        let mesh = (2.0 * fmax.powf(em1) * dt).sqrt();
        let excess = norm(&z) - p.support_radius(s);
        if excess > mesh {
            return Err(Error::SdeInstability { excess, mesh });
        }
    }
    Ok(z)
}

/// `count` SDE endpoints, reproducible for a given seed.
pub fn sample_sde_batch(
    p: &ModelParams,
    t: f64,
    steps: usize,
    count: usize,
    seed: u64,
) -> Result<SampleBatch> {
    let positions = try_generate(count, seed, |rng| sample_sde_barenblatt(p, t, steps, rng))?;
    Ok(SampleBatch { positions, seed, count })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream_rng;

    #[test]
    fn sphere_draws_are_unit() {
        let mut rng = stream_rng(1, 0);
        for d in 2..6 {
            for _ in 0..100 {
                let v = sample_uniform_sphere(d, &mut rng).unwrap();
                assert!((norm(&v) - 1.0).abs() < 1e-12);
            }
        }
        assert!(sample_uniform_sphere(1, &mut rng).is_err());
    }

    #[test]
    fn waiting_times_sum_to_horizon() {
        let mut rng = stream_rng(2, 0);
        for (law, d) in [(FlightLaw::F1, 1), (FlightLaw::F2, 3), (FlightLaw::F3, 3)] {
            let spec = FlightSpec::new(4, d, law, 1.0, 2.5).unwrap();
            for _ in 0..200 {
                let tau = sample_waiting_times(&spec, &mut rng).unwrap();
                assert_eq!(tau.len(), 5);
                assert!(tau.iter().all(|x| *x >= 0.0));
                assert!((tau.iter().sum::<f64>() - 2.5).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn invalid_law_dimension_pairs() {
        assert!(FlightSpec::new(2, 2, FlightLaw::F1, 1.0, 1.0).is_err());
        assert!(FlightSpec::new(2, 1, FlightLaw::F2, 1.0, 1.0).is_err());
        assert!(FlightSpec::new(2, 2, FlightLaw::F3, 1.0, 1.0).is_err());
        assert!(FlightSpec::new(0, 2, FlightLaw::F2, 1.0, 1.0).is_err());
    }

    #[test]
    fn finite_speed() {
        let mut rng = stream_rng(3, 0);
        for (law, d, n) in [(FlightLaw::F1, 1, 3), (FlightLaw::F2, 2, 3), (FlightLaw::F3, 4, 2)] {
            let spec = FlightSpec::new(n, d, law, 1.7, 0.9).unwrap();
            for _ in 0..1000 {
                let x = sample_flight(&spec, &mut rng).unwrap();
                assert!(norm(&x) <= 1.7 * 0.9 + 1e-12);
            }
        }
    }

    #[test]
    fn telegraph_values() {
        assert!((telegraph_density(0.2, 1.0, 1, 2.0).unwrap() - 0.25).abs() < 1e-15);
        for n in [1usize, 3, 5, 7] {
            for k in -9..=9 {
                let x = k as f64 * 0.1;
                let a = telegraph_density(x, 1.0, n, 1.0).unwrap();
                let b = telegraph_density(x, 1.0, n + 1, 1.0).unwrap();
                assert!((a - b).abs() <= 1e-14, "n={n} x={x}");
            }
        }
        assert_eq!(telegraph_density(1.0, 1.0, 3, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn flight_density_rejects_f1() {
        let spec = FlightSpec::new(3, 1, FlightLaw::F1, 1.0, 1.0).unwrap();
        assert!(flight_density(&[0.0], &spec).is_err());
        let spec = FlightSpec::new(3, 2, FlightLaw::F2, 1.0, 1.0).unwrap();
        assert_eq!(flight_density(&[1.0, 0.0], &spec).unwrap(), 0.0);
    }

    #[test]
    fn barenblatt_draws_in_support() {
        let p = ModelParams::new(2.0, 3).unwrap();
        let mut rng = stream_rng(4, 0);
        for _ in 0..1000 {
            let x = sample_barenblatt(&p, 0.8, &mut rng).unwrap();
            assert!(norm(&x) <= p.support_radius(0.8));
        }
    }

    #[test]
    fn sde_rejects_few_steps() {
        let p = ModelParams::new(2.0, 1).unwrap();
        let mut rng = stream_rng(5, 0);
        assert!(sample_sde_barenblatt(&p, 1.0, 10, &mut rng).is_err());
        assert!(sample_sde_barenblatt(&p, 1.0, 200, &mut rng).is_ok());
    }
}
