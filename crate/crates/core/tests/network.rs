use theta_reset::bifurcation::find_equilibrium;
use theta_reset::model::{lorentzian_cdf, ComplexMeanField};
use theta_reset::network::{
    ensemble_average, realization_rng, run_realization, sample_excitabilities,
    sample_reset_interval, ExcitabilitySampling, SimConfig, SimRecord,
};
use theta_reset::ode::{settle, SETTLE_TOL, SETTLE_T_MAX};
use theta_reset::{MeanFieldSystem, ModelParams, Reduction, ResetRate};

fn small(n: usize, time: f64) -> SimConfig {
    SimConfig {
        n_neurons: n,
        total_time: time,
        record_stride: 5,
        ..SimConfig::default()
    }
}

fn same(a: &SimRecord, b: &SimRecord) -> bool {
    // f_nr is NaN at t = 0 where every phase sits at π
    format!("{a:?}") == format!("{b:?}")
}

/// Rate of the equilibrium reached from the fully synchronized rest state.
fn rest_rate(sys: &MeanFieldSystem) -> f64 {
    let start = sys.state_from_field(ComplexMeanField::new(-1.0, 0.0));
    let (guess, _) = settle(&sys.field(), &start, 0.01, SETTLE_TOL, SETTLE_T_MAX);
    sys.f_nr(&find_equilibrium(&sys.field(), &guess, 1e-12).unwrap())
}

fn mean_interval(lambda: f64) -> f64 {
    let mut rng = realization_rng(2024, 3);
    let n = 100_000;
    (0..n)
        .map(|_| sample_reset_interval(lambda, &mut rng).unwrap())
        .sum::<f64>()
        / n as f64
}

#[test]
fn reset_intervals_have_mean_inverse_rate() {
    assert!((mean_interval(1.0) - 1.0).abs() < 0.01);
    assert!((mean_interval(50.0) - 0.02).abs() < 2e-4);
}

#[test]
fn iid_excitabilities_follow_the_lorentzian() {
    let mut rng = realization_rng(5, 0);
    let mut eta = sample_excitabilities(100_000, -2.0, 0.1, ExcitabilitySampling::Iid, &mut rng);
    eta.sort_by(|a, b| a.total_cmp(b));
    let median = 0.5 * (eta[49_999] + eta[50_000]);
    assert!((median + 2.0).abs() < 0.01, "median {median}");
    // empirical CDF against the closed form at a few quartile points
    for (i, q) in [(25_000, 0.25), (75_000, 0.75)] {
        assert!((lorentzian_cdf(eta[i], -2.0, 0.1) - q).abs() < 5e-3);
    }
}

#[test]
fn without_resets_the_partition_is_irrelevant() {
    // stratified draws depend on the partition, i.i.d. draws do not
    let cfg = SimConfig {
        sampling: ExcitabilitySampling::Iid,
        ..small(400, 10.0)
    };
    let base = ModelParams::new(-1.0, 2.0, 0.0).with_lambda(ResetRate::Finite(0.0));
    let a = run_realization(&cfg, &base).unwrap();
    let b = run_realization(&cfg, &ModelParams { gamma: 0.5, ..base }).unwrap();
    assert_eq!(a.reset_count, 0);
    assert_eq!(b.reset_count, 200);
    assert_eq!(a.per_neuron_rates, b.per_neuron_rates);
    for (za, (zr, znr)) in a
        .z_nr_series
        .iter()
        .zip(b.z_r_series.iter().zip(&b.z_nr_series))
    {
        let combined = (zr + znr) / 2.0;
        assert!((za - combined).norm() < 1e-12);
    }
}

#[test]
fn strong_reset_silences_subthreshold_population() {
    let cfg = SimConfig {
        total_time: 40.0,
        ..SimConfig::default()
    };
    let p = ModelParams::new(-4.0, 2.0, 0.5).with_lambda(ResetRate::Finite(50.0));
    let rec = run_realization(&cfg, &p).unwrap();
    let theory = rest_rate(
        &MeanFieldSystem::new(Reduction::Infinite, p.with_lambda(ResetRate::Infinite)).unwrap(),
    );
    assert!(theory < 0.03);
    assert!(
        (rec.steady_f_nr() - theory).abs() < 0.005,
        "f = {}, reduction {theory}",
        rec.steady_f_nr()
    );
    assert!(rec.z_r_series.iter().all(|z| z.norm() <= 1.0 + 1e-12));
}

#[test]
fn single_member_ensemble_is_the_realization() {
    let cfg = small(200, 5.0);
    let p = ModelParams::new(-1.0, 2.0, 0.3).with_lambda(ResetRate::Finite(5.0));
    let one = run_realization(&cfg, &p).unwrap();
    let ens = ensemble_average(&cfg, &p, 1).unwrap();
    assert!(same(&one, &ens));
    assert!(ensemble_average(&cfg, &p, 0).is_err());
}

#[test]
fn realizations_are_bit_reproducible() {
    let cfg = SimConfig {
        sampling: ExcitabilitySampling::Iid,
        redraw_excitabilities: true,
        seed: 99,
        ..small(300, 5.0)
    };
    let p = ModelParams::new(-1.0, 2.0, 0.3).with_lambda(ResetRate::Finite(5.0));
    let a = ensemble_average(&cfg, &p, 4).unwrap();
    let b = ensemble_average(&cfg, &p, 4).unwrap();
    assert!(same(&a, &b));
    let c = ensemble_average(&SimConfig { seed: 100, ..cfg }, &p, 4).unwrap();
    assert_ne!(a.z_nr_series, c.z_nr_series);
}

#[test]
fn rest_state_ensemble_matches_finite_rate_reduction() {
    let p = ModelParams::new(-2.0, 2.0, 0.2).with_lambda(ResetRate::Finite(1.0));
    let cfg = SimConfig {
        dt: 0.05,
        seed: 3,
        ..SimConfig::default()
    };
    let rec = ensemble_average(&cfg, &p, 100).unwrap();
    let theory = rest_rate(&MeanFieldSystem::new(Reduction::Finite, p).unwrap());
    let measured = rec.steady_f_nr();
    assert!(
        (measured - theory).abs() <= 0.05 * theory,
        "network {measured}, reduction {theory}"
    );
}
