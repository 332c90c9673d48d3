//! Goodness-of-fit primitives: Kolmogorov–Smirnov tests, empirical
//! characteristic functions and the report record shared by all checks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n: usize,
}

/// Kolmogorov survival function `Q(λ) = 2 Σ (-1)^{k-1} e^{-2k²λ²}`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-17 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn ks_p(d: f64, n_eff: f64) -> f64 {
    let sn = n_eff.sqrt();
    kolmogorov_q((sn + 0.12 + 0.11 / sn) * d)
}

fn sorted_finite(samples: &[f64]) -> Result<Vec<f64>> {
    if samples.is_empty() {
        return Err(Error::InvalidSamples("no samples".into()));
    }
    if samples.iter().any(|x| x.is_nan()) {
        return Err(Error::InvalidSamples("NaN sample".into()));
    }
    let mut v = samples.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(v)
}

/// One-sample KS statistic against `cdf` with the asymptotic p-value
/// (Stephens' finite-sample correction).
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsResult> {
    let v = sorted_finite(samples)?;
    let n = v.len() as f64;
    let mut d: f64 = 0.0;
    for (i, x) in v.iter().enumerate() {
        let f = cdf(*x);
        d = d.max(f - i as f64 / n).max((i + 1) as f64 / n - f);
    }
    Ok(KsResult { statistic: d, p_value: ks_p(d, n), n: v.len() })
}

/// Two-sample KS statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    let a = sorted_finite(a)?;
    let b = sorted_finite(b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    Ok(KsResult { statistic: d, p_value: ks_p(d, na * nb / (na + nb)), n: a.len() + b.len() })
}

/// `(1/N) Σ exp(i⟨ξ, X_k⟩)` with compensated summation.
pub fn empirical_cf(samples: &[Vec<f64>], xi: &[f64]) -> Complex64 {
    if samples.is_empty() {
        return Complex64::new(f64::NAN, f64::NAN);
    }
    let (mut re, mut im) = (Neumaier::default(), Neumaier::default());
    for x in samples {
        let phase: f64 = x.iter().zip(xi).map(|(a, b)| a * b).sum();
        let (s, c) = phase.sin_cos();
        re.add(c);
        im.add(s);
    }
    let n = samples.len() as f64;
    Complex64::new(re.value() / n, im.value() / n)
}

/// Deviation bound `3/√N` used alongside [`empirical_cf`].
pub fn cf_bound(n: usize) -> f64 {
    3.0 / (n as f64).sqrt()
}

#[derive(Default, Clone, Copy)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum.
pub fn sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = Neumaier::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Sample mean and unbiased variance.
pub fn mean_var(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = sum(values.iter().copied()) / n;
    let var = sum(values.iter().map(|v| (v - mean).powi(2))) / (n - 1.0);
    (mean, var)
}

/// Outcome of a named verification check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub check: String,
    pub params: serde_json::Value,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: Option<u64>,
    pub n_samples: Option<u64>,
}

impl VerifyReport {
    /// Report whose `value` must not exceed `tolerance`.
    pub fn at_most(
        check: impl Into<String>,
        params: serde_json::Value,
        value: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            check: check.into(),
            params,
            value,
            tolerance,
            pass: value <= tolerance,
            seed: None,
            n_samples: None,
        }
    }

    /// Report whose `value` (a p-value) must exceed `tolerance`.
    pub fn at_least(
        check: impl Into<String>,
        params: serde_json::Value,
        value: f64,
        tolerance: f64,
    ) -> Self {
        Self { pass: value > tolerance, ..Self::at_most(check, params, value, tolerance) }
    }

    pub fn with_samples(mut self, seed: u64, n: usize) -> Self {
        self.seed = Some(seed);
        self.n_samples = Some(n as u64);
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ks_hand_computed() {
        // samples 0.1, 0.4, 0.7 against U(0,1): D = max(0.1, 1/3-0.1, 0.4-1/3,
        // 2/3-0.4, 0.7-2/3, 1-0.7) = 0.3
        let r = ks_statistic(&[0.7, 0.1, 0.4], |x| x).unwrap();
        assert!((r.statistic - 0.3).abs() < 1e-15);
    }

    #[test]
    fn ks_rejects_nan() {
        assert!(ks_statistic(&[0.1, f64::NAN], |x| x).is_err());
        assert!(ks_statistic(&[], |x| x).is_err());
    }

    #[test]
    fn ks_p_value_is_monotone() {
        let mut last = 1.0;
        for k in 1..200 {
            let p = ks_p(k as f64 * 1e-3, 1e4);
            assert!(p <= last);
            last = p;
        }
        assert!(kolmogorov_q(1.36) > 0.04 && kolmogorov_q(1.36) < 0.06);
    }

    #[test]
    fn shifted_uniform_is_rejected() {
        let xs: Vec<f64> = (0..10_000).map(|i| (i as f64 + 0.5) / 10_000.0 * 0.9 + 0.1).collect();
        assert!(ks_statistic(&xs, |x| x.clamp(0.0, 1.0)).unwrap().p_value < 1e-6);
        let ys: Vec<f64> = (0..10_000).map(|i| (i as f64 + 0.5) / 10_000.0).collect();
        assert!(ks_statistic(&ys, |x| x).unwrap().p_value > 0.99);
    }

    #[test]
    fn two_sample_identical_sets() {
        let a: Vec<f64> = (0..500).map(|i| i as f64).collect();
        let r = ks_two_sample(&a, &a).unwrap();
        assert_eq!(r.statistic, 0.0);
        let b: Vec<f64> = a.iter().map(|x| x + 250.0).collect();
        assert!((ks_two_sample(&a, &b).unwrap().statistic - 0.5).abs() < 1e-12);
    }

    #[test]
    fn empirical_cf_basics() {
        let pts = vec![vec![0.3, -1.2], vec![2.0, 0.5]];
        assert_eq!(empirical_cf(&pts, &[0.0, 0.0]), Complex64::new(1.0, 0.0));
        assert_eq!(empirical_cf(&[vec![0.0]], &[1.7]), Complex64::new(1.0, 0.0));
        assert!(empirical_cf(&pts, &[1.3, -0.4]).norm() <= 1.0);
    }
}
