use pmeflights::analytic::{FlightLaw, ModelParams};
use pmeflights::flights::{sample_flights, sample_sde_barenblatt_from, FlightSpec};
use pmeflights::levy::{cauchy_cdf, sample_isotropic_stable_batch, sample_subordinator, StableIndex};
use pmeflights::rng::generate;
use pmeflights::stats::{cf_bound, empirical_cf, ks_statistic, ks_two_sample};

#[test]
fn flights_have_no_drift() {
    let count = 100_000;
    for (d, law) in [(2, FlightLaw::F2), (3, FlightLaw::F3), (4, FlightLaw::F3)] {
        let spec = FlightSpec::new(3, d, law, 1.5, 2.0).unwrap();
        let batch = sample_flights(&spec, count, 11).unwrap();
        let mut mean = vec![0.0; d];
        for x in &batch.positions {
            for (m, v) in mean.iter_mut().zip(x) {
                *m += v / count as f64;
            }
        }
        let norm = mean.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm <= 3.0 * 3.0 / (count as f64).sqrt(), "d={d}: {norm}");
    }
}

#[test]
fn subordinated_brownian_motion_has_stable_cf() {
    let count = 100_000;
    for &nu in &[0.5, 0.8] {
        for d in [1, 2] {
            let xs = sample_isotropic_stable_batch(StableIndex::new(nu).unwrap(), d, 0.7, count, 5).unwrap();
            for k in 1..=8 {
                let mut xi = vec![0.0; d];
                xi[0] = 0.3 * k as f64;
                xi[d - 1] += 0.1 * k as f64;
                let norm = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
                let target = (-0.7 * norm.powf(nu)).exp();
                let err = (empirical_cf(&xs, &xi) - target).norm();
                assert!(err <= cf_bound(count), "nu={nu} d={d} xi={xi:?}: {err}");
            }
        }
    }
}

#[test]
fn subordinator_scales_with_time() {
    let count = 50_000;
    for &a in &[0.3, 0.5, 0.75] {
        let at_t = generate(count, 1, |rng| sample_subordinator(a, 2.0, rng).unwrap());
        let scaled: Vec<f64> = generate(count, 2, |rng| sample_subordinator(a, 1.0, rng).unwrap())
            .into_iter()
            .map(|y| 2f64.powf(1.0 / a) * y)
            .collect();
        let ks = ks_two_sample(&at_t, &scaled).unwrap();
        assert!(ks.p_value > 1e-3, "a={a}: {ks:?}");
    }
}

#[test]
fn unit_index_is_cauchy() {
    let xs = sample_isotropic_stable_batch(StableIndex::new(1.0).unwrap(), 1, 1.3, 100_000, 8).unwrap();
    let first: Vec<f64> = xs.iter().map(|x| x[0]).collect();
    let ks = ks_statistic(&first, |x| cauchy_cdf(x, 1.3)).unwrap();
    assert!(ks.p_value > 1e-3, "{ks:?}");
}

#[test]
fn sde_endpoint_law_does_not_depend_on_start_time() {
    let p = ModelParams::new(2.0, 1).unwrap();
    let count = 10_000;
    let run = |s0: f64, seed: u64| {
        generate(count, seed, |rng| sample_sde_barenblatt_from(&p, 1.0, s0, 500, rng).unwrap()[0])
    };
    let ks = ks_two_sample(&run(0.01, 3), &run(0.05, 4)).unwrap();
    assert!(ks.p_value > 1e-3, "{ks:?}");
}
