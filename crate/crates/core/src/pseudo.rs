//! Kernels of the higher-order heat-type equations
//! `u(x,t) = (1/π)∫₀^∞ cos(ξx) cos(ξⁿt) dξ`, their closed forms for `n = 2`
//! and `n = 3`, and the composition of such a kernel with the 1-d EPD
//! weight.
//!
//! These kernels are signed: they take negative values and are not
//! probability densities. Only their integrals against smooth weights,
//! or damped integrals over `x`, carry meaning as "probabilities".

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;

use crate::error::{domain, Result};
use crate::fracepd::FracEpdParams;
use crate::quad::{adaptive_gk, endpoint_weighted_rule, gauss_legendre, wynn_epsilon, Estimate};
use crate::specfun::{airy_ai, ln_gamma};

/// Contours are cut where `|e^{iφ}| = e^{-TAIL}`.
const TAIL: f64 = 45.0;
const ABS_TOL: f64 = 1e-13;
const REL_TOL: f64 = 1e-11;
/// Oscillation phase below which the composition switches to half-period
/// chunks and series acceleration.
const PHASE_SPLIT: f64 = 20.0;
const MAX_CHUNKS: usize = 24;
const CHUNK_ORDER: usize = 12;

fn check(t: f64, n: u32) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return domain(format!("time must be positive, got {t}"));
    }
    if n < 2 {
        return domain(format!("order must be at least 2, got {n}"));
    }
    Ok(())
}

/// `∫ exp(i(tξⁿ + xξ)) dξ` along the segment `z0 + s·dir`, `0 <= s <= len`.
fn leg(t: f64, x: f64, n: u32, z0: Complex64, dir: Complex64, len: f64) -> (Complex64, f64) {
    let i = Complex64::i();
    adaptive_gk(
        |s| {
            let z = z0 + dir * s;
            (i * (t * z.powu(n) + x * z)).exp() * dir
        },
        0.0,
        len,
        ABS_TOL,
        REL_TOL,
    )
}

/// Same integral along the ray `z0 + s·dir`, cut once the integrand falls
/// below `e^{-TAIL}`.
fn ray(t: f64, x: f64, n: u32, z0: Complex64, dir: Complex64) -> (Complex64, f64) {
    let im_phase = |s: f64| {
        let z = z0 + dir * s;
        (t * z.powu(n) + x * z).im
    };
    let mut len = t.powf(-1.0 / n as f64);
    while im_phase(len) < TAIL {
        len *= 1.5;
    }
    leg(t, x, n, z0, dir, len)
}

/// `(1/π)∫₀^∞ cos(ξx) cos(ξⁿt) dξ` for integer `n >= 2`.
///
/// The integral equals `(1/2π) Re ∫₀^∞ [e^{i(tξⁿ+xξ)} + e^{i(tξⁿ-xξ)}] dξ`.
/// The first piece is rotated onto the ray `arg ξ = π/(2n)`, where it
/// decays like `e^{-tsⁿ}`. The second is routed below the real axis to its
/// saddle `ξ₀ = (x/(nt))^{1/(n-1)}` and leaves along the same angle, so the
/// integrand stays bounded by one and no cancellation occurs.
pub fn pseudo_kernel(x: f64, t: f64, n: u32) -> Result<Estimate> {
    check(t, n)?;
    if !x.is_finite() {
        return domain(format!("x must be finite, got {x}"));
    }
    let x = x.abs();
    let rot = Complex64::from_polar(1.0, PI / (2.0 * n as f64));
    let zero = Complex64::new(0.0, 0.0);
    let (plus, e_plus) = ray(t, x, n, zero, rot);
    let (minus, e_minus) = if x == 0.0 {
        (plus, e_plus)
    } else {
        let xi0 = (x / (n as f64 * t)).powf(1.0 / (n as f64 - 1.0));
        let saddle = Complex64::new(xi0, 0.0);
        let mid = Complex64::new(0.5 * xi0, -0.5 * xi0);
        let (a, ea) = leg(t, -x, n, zero, mid / mid.norm(), mid.norm());
        let to_saddle = saddle - mid;
        let (b, eb) = leg(t, -x, n, mid, to_saddle / to_saddle.norm(), to_saddle.norm());
        let (c, ec) = ray(t, -x, n, saddle, rot);
        (a + b + c, ea + eb + ec)
    };
    Ok(Estimate::new((plus + minus).re / (2.0 * PI), (e_plus + e_minus) / (2.0 * PI)))
}

/// The kernel is a signed measure; this is the same function under the name
/// used for non-probabilistic kernels.
pub use pseudo_kernel as signed_kernel;

/// `n = 2`: `(4πt)^{-1/2} cos(x²/(4t) - π/4)`.
pub fn rods_kernel(x: f64, t: f64) -> Result<f64> {
    check(t, 2)?;
    Ok((4.0 * PI * t).powf(-0.5) * (x * x / (4.0 * t) - FRAC_PI_4).cos())
}

/// `n = 3`: `½(3t)^{-1/3}[Ai(x/(3t)^{1/3}) + Ai(-x/(3t)^{1/3})]`.
pub fn airy_kernel(x: f64, t: f64) -> Result<f64> {
    check(t, 3)?;
    let s = (3.0 * t).cbrt();
    Ok(0.5 / s * (airy_ai(x / s) + airy_ai(-x / s)))
}

/// `∫_{-ct}^{ct} g(w,t) K(x,w) dw` with `K` the order-`n` kernel at time
/// `|w|` and `g` the 1-d EPD weight whose damping coefficient is `2λ/t`,
/// i.e. `γ = λ`, endpoint exponent `λ - 1`.
///
/// Near `w = 0` the kernel oscillates with phase
/// `Φ(w) = ((n-1)/n) x^{n/(n-1)} (nw)^{-1/(n-1)}`; that stretch is
/// integrated in the variable `Φ` over half periods and summed with Wynn's
/// epsilon algorithm. The rest uses geometric Gauss–Legendre panels and a
/// Gauss–Jacobi panel at `w = ct`.
pub fn compose_epd_pseudo(x: f64, t: f64, lambda: f64, c: f64, n: u32) -> Result<Estimate> {
    check(t, n)?;
    if !x.is_finite() {
        return domain(format!("x must be finite, got {x}"));
    }
    let q = FracEpdParams::new(2.0, lambda, c, 1)?;
    let x = x.abs();
    let ct = c * t;
    let a = lambda - 1.0;
    let nf = n as f64;
    let kernel = |w: f64| pseudo_kernel(x, w, n);
    let mut value = 0.0;
    let mut error = 0.0;
    // the factor 2 folds w < 0 onto w > 0
    let mut add = |w: f64, weight: f64, g: f64| -> Result<()> {
        let k = kernel(w)?;
        value += 2.0 * weight * g * k.value;
        error += 2.0 * (weight * g).abs() * k.error;
        Ok(())
    };
    // (ct - w)^a is absorbed by the Jacobi weight; this is the rest of g
    let g_rest = |w: f64| {
        let ct2a = ct.powf(-2.0 * a);
        (ln_gamma(lambda + 0.5) - ln_gamma(lambda)).exp() / PI.sqrt() / ct * ct2a * (ct + w).powf(a)
    };

    if x == 0.0 {
        // K(0,w) ∝ w^{-1/n}
        let (nodes, weights) = endpoint_weighted_rule(0.0, ct, -1.0 / nf, a, 4, 16)?;
        for (w, wt) in nodes.iter().zip(&weights) {
            add(*w, *wt, g_rest(*w) * w.powf(1.0 / nf))?;
        }
        return Ok(Estimate::new(value, error));
    }

    let phase_coef = (nf - 1.0) / nf * x.powf(nf / (nf - 1.0));
    let phase = |w: f64| phase_coef * (nf * w).powf(-1.0 / (nf - 1.0));
    let w_of_phase = |v: f64| (phase_coef / v).powf(nf - 1.0) / nf;
    // the Jacobi end panel spans at most half a period of the kernel
    let w_end = w_of_phase(phase(ct) + PI).max(0.5 * ct);
    let v_start = phase(w_end).max(PHASE_SPLIT);
    let w_start = w_of_phase(v_start);

    let (nodes, weights) = endpoint_weighted_rule(w_end, ct, 0.0, a, 1, 20)?;
    for (w, wt) in nodes.iter().zip(&weights) {
        add(*w, *wt, g_rest(*w))?;
    }
    let gl = gauss_legendre(CHUNK_ORDER);
    let mut lo = w_start;
    while lo < w_end {
        let hi = (2.0 * lo).min(w_end);
        let half = 0.5 * (hi - lo);
        for (u, wt) in gl.nodes.iter().zip(&gl.weights) {
            let w = lo + half * (1.0 + u);
            add(w, wt * half, q.weight(w, t))?;
        }
        lo = hi;
    }

    // [0, w_start] in v = Φ(w): dw = -(n-1) w/v dv
    let mut partial = Vec::with_capacity(MAX_CHUNKS);
    let mut running = 0.0;
    let mut chunk_error = 0.0;
    for k in 0..MAX_CHUNKS {
        let va = v_start + k as f64 * PI;
        let half = 0.5 * PI;
        for (u, wt) in gl.nodes.iter().zip(&gl.weights) {
            let v = va + half * (1.0 + u);
            let w = w_of_phase(v);
            let jac = (nf - 1.0) * w / v;
            let kv = kernel(w)?;
            let f = 2.0 * q.weight(w, t) * jac * wt * half;
            running += f * kv.value;
            chunk_error += f.abs() * kv.error;
        }
        partial.push(running);
    }
    let tail = wynn_epsilon(&partial);
    Ok(Estimate::new(value + tail.value, error + chunk_error + tail.error.abs()))
}
