//! Reference computations written independently of the library: closed
//! forms where they exist, plain composite Simpson sums otherwise.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Composite Simpson rule with `n` (rounded up to even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let n = n + n % 2;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * h);
    }
    s * h / 3.0
}

/// Surface area of the unit sphere in `R^d`.
pub fn sphere_area(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI * sphere_area(d - 2) / (d as f64 - 2.0),
    }
}

/// Barenblatt profile built from the exponents alone; the amplitude is
/// fixed by integrating the unnormalized profile numerically.
pub struct Profile {
    pub m: f64,
    pub d: usize,
    pub alpha: f64,
    pub beta: f64,
    pub b: f64,
    pub amplitude: f64,
}

impl Profile {
    pub fn new(m: f64, d: usize) -> Self {
        let df = d as f64;
        let k = 2.0 + df * (m - 1.0);
        let (alpha, beta, b) = (df / k, 1.0 / k, (m - 1.0) / (2.0 * m * k));
        let mut p = Self { m, d, alpha, beta, b, amplitude: 1.0 };
        p.amplitude = 1.0 / p.ball_mass(f64::INFINITY, 1.0);
        p
    }

    pub fn radius(&self, t: f64) -> f64 {
        t.powf(self.beta) / self.b.sqrt()
    }

    pub fn density(&self, r: f64, t: f64) -> f64 {
        let s = 1.0 - self.b * r * r / t.powf(2.0 * self.beta);
        if s <= 0.0 {
            0.0
        } else {
            self.amplitude * t.powf(-self.alpha) * s.powf(1.0 / (self.m - 1.0))
        }
    }

    /// `∫_{‖x‖<r} u(x,t) dx`, with `s = R sin θ` to smooth the edge.
    pub fn ball_mass(&self, r: f64, t: f64) -> f64 {
        let rad = self.radius(t);
        let top = (r.min(rad) / rad).asin();
        let f = |th: f64| {
            let s = rad * th.sin();
            sphere_area(self.d) * s.powi(self.d as i32 - 1) * self.density(s, t) * rad * th.cos()
        };
        simpson(f, 0.0, top, 4000)
    }

    /// Characteristic function at `‖ξ‖ = xi` for `d = 1, 2, 3`.
    pub fn cf(&self, xi: f64, t: f64) -> f64 {
        let rad = self.radius(t);
        let kernel = |s: f64| match self.d {
            1 => 2.0 * (xi * s).cos(),
            2 => 2.0 * PI * s * bessel_j0_series(xi * s),
            3 => 4.0 * PI * s * s * if xi * s == 0.0 { 1.0 } else { (xi * s).sin() / (xi * s) },
            _ => panic!("cf oracle covers d <= 3"),
        };
        let f = |th: f64| {
            let s = rad * th.sin();
            kernel(s) * self.density(s, t) * rad * th.cos()
        };
        simpson(f, 0.0, 0.5 * PI, 4000)
    }
}

/// Power series of `J₀`, adequate for `z <= 15`.
pub fn bessel_j0_series(z: f64) -> f64 {
    let q = -0.25 * z * z;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..80 {
        term *= q / (k * k) as f64;
        sum += term;
    }
    sum
}

/// Composition of the order-`n` kernel with the uniform (`λ = 1`) EPD
/// weight: `(1/(π c t)) ∫₀^∞ cos(ξx) sin(ξⁿct)/ξⁿ dξ`. The integral
/// converges absolutely; it is cut where `ξⁿct` is an odd multiple of
/// `π/2`, which kills the leading boundary term of the tail.
pub fn compose_uniform(x: f64, t: f64, c: f64, n: u32) -> f64 {
    let ct = c * t;
    let k = 4000.0;
    let top = ((k + 0.5) * PI / ct).powf(1.0 / n as f64);
    let f = |xi: f64| {
        if xi == 0.0 {
            ct
        } else {
            (xi * x).cos() * (xi.powi(n as i32) * ct).sin() / xi.powi(n as i32)
        }
    };
    // the phase ξⁿct advances about (k+½)π in total; 64 points per period
    let intervals = (64.0 * k) as usize;
    simpson(f, 0.0, top, intervals) / (PI * ct)
}
