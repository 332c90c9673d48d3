//! Positive stable subordinators (Kanter's representation), isotropic
//! stable vectors obtained by subordinating Brownian motion, and the
//! multivariate Cauchy law.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::analytic::norm;
use crate::error::{domain, Result};
use crate::rng::{generate, StreamRng};
use crate::specfun::{erfc, ln_gamma};

/// Stability index `ν ∈ (0, 2]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableIndex(f64);

impl StableIndex {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu <= 2.0) {
            return domain(format!("stable index must lie in (0, 2], got {nu}"));
        }
        Ok(Self(nu))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

fn check_t(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        domain(format!("time must be positive, got {t}"))
    }
}

/// Draw with Laplace transform `E e^{-λY} = e^{-t λ^a}`, `a ∈ (0,1)`.
pub fn sample_subordinator(index: f64, t: f64, rng: &mut StreamRng) -> Result<f64> {
    if !(index > 0.0 && index < 1.0) {
        return domain(format!("subordinator index must lie in (0, 1), got {index}"));
    }
    check_t(t)?;
    Ok(t.powf(1.0 / index) * kanter(index, rng))
}

fn kanter(a: f64, rng: &mut StreamRng) -> f64 {
    loop {
        let u = PI * rng.random::<f64>();
        let e: f64 = rng.sample(Exp1);
        if u == 0.0 || e == 0.0 {
            continue;
        }
        let s = (a * u).sin() / u.sin().powf(1.0 / a)
            * ((1.0 - a) * u).sin().powf((1.0 - a) / a)
            / e.powf((1.0 - a) / a);
        if s.is_finite() && s > 0.0 {
            return s;
        }
    }
}

/// `√(2Y) G` with `Y` the index-`ν/2` subordinator at `t` and `G` standard
/// normal in `R^d`; characteristic function `e^{-t‖ξ‖^ν}`. For `ν = 2`
/// the subordinator is the identity and the law is `N(0, 2t I)`.
pub fn sample_isotropic_stable(
    nu: StableIndex,
    d: usize,
    t: f64,
    rng: &mut StreamRng,
) -> Result<Vec<f64>> {
    if d == 0 {
        return domain("dimension must be at least 1");
    }
    check_t(t)?;
    let y = if nu.0 == 2.0 { t } else { sample_subordinator(0.5 * nu.0, t, rng)? };
    let s = (2.0 * y).sqrt();
    Ok((0..d).map(|_| s * rng.sample::<f64, _>(StandardNormal)).collect())
}

pub fn sample_isotropic_stable_batch(
    nu: StableIndex,
    d: usize,
    t: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    if d == 0 {
        return domain("dimension must be at least 1");
    }
    check_t(t)?;
    Ok(generate(count, seed, |rng| {
        sample_isotropic_stable(nu, d, t, rng).expect("validated parameters")
    }))
}

/// `Γ((d+1)/2)/π^{(d+1)/2} · t/(t² + ‖x‖²)^{(d+1)/2}`.
pub fn cauchy_density(x: &[f64], t: f64, d: usize) -> Result<f64> {
    check_t(t)?;
    if x.len() != d || d == 0 {
        return domain(format!("point has {} coordinates, expected {d}", x.len()));
    }
    let h = 0.5 * (d as f64 + 1.0);
    let r = norm(x);
    Ok((ln_gamma(h) - h * PI.ln()).exp() * t / (t * t + r * r).powf(h))
}

/// CDF of the index-1/2 subordinator at `t`: a Lévy law with scale `t²/2`.
pub fn levy_cdf(y: f64, t: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    erfc((t * t / (4.0 * y)).sqrt())
}

/// One-dimensional Cauchy CDF with scale `t`.
pub fn cauchy_cdf(x: f64, t: f64) -> f64 {
    0.5 + (x / t).atan() / PI
}
