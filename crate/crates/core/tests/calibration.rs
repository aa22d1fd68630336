//! Behaviour of the null calibrations on simulated data.

mod common;

use common::{gaussian_pair, gaussian_sample, rng};
use distkern::datagen::{gen_two_sample, sample_sine_dependence, sample_sine_perturbed, Scenario, ScenarioSpec};
use distkern::testing::{independence_test, two_sample_test, weighted_chi_square_draws};
use distkern::{KernelSpec, MethodDetails, NullSpec, PairedSample, RngSpec, SampleMatrix};

#[test]
fn weighted_draws_have_expected_mean() {
    let w = [0.9f64, 0.4, 0.25, 0.1, 0.05];
    let b = 20_000;
    let draws = weighted_chi_square_draws(&w, b, RngSpec::from_seed(1));
    let mean = draws.iter().sum::<f64>() / b as f64;
    let want: f64 = w.iter().sum();
    let var: f64 = w.iter().map(|v| 2.0 * v * v).sum();
    let se = (var / b as f64).sqrt();
    assert!((mean - want).abs() < 3.0 * se, "{mean} vs {want} (se {se})");
    assert!(draws.windows(2).all(|p| p[0] <= p[1]));
}

#[test]
fn thresholds_decrease_with_alpha() {
    let mut g = rng(2);
    let z = gaussian_sample(&mut g, 30, 2);
    let w = gaussian_sample(&mut g, 30, 2);
    let k = KernelSpec::distance(1.0);
    for method in [NullSpec::spectral, NullSpec::permutation] {
        let t: Vec<f64> = [0.01, 0.05, 0.1, 0.2]
            .iter()
            .map(|&a| two_sample_test(&k, &z, &w, &method(a), RngSpec::from_seed(3)).unwrap().threshold)
            .collect();
        assert!(t.windows(2).all(|p| p[0] >= p[1]), "{t:?}");
    }
    let q: Vec<f64> = [0.01, 0.05, 0.2]
        .iter()
        .map(|&a| two_sample_test(&k, &z, &w, &NullSpec::qform(a), RngSpec::from_seed(3)).unwrap().threshold)
        .collect();
    assert!(q.windows(2).all(|p| p[0] > p[1]));
}

#[test]
fn permutation_p_values_are_uniform_under_the_null() {
    let trials = 500;
    let k = KernelSpec::distance(1.0);
    let spec = NullSpec::permutation(0.05).with_perms(200);
    let mut p: Vec<f64> = (0..trials)
        .map(|t| {
            let mut g = RngSpec::new(4, t).rng();
            let z = gaussian_sample(&mut g, 15, 2);
            let w = gaussian_sample(&mut g, 15, 2);
            two_sample_test(&k, &z, &w, &spec, RngSpec::new(5, t)).unwrap().p_value.unwrap()
        })
        .collect();
    p.sort_by(f64::total_cmp);
    let sup = p
        .iter()
        .enumerate()
        .map(|(i, &v)| ((i + 1) as f64 / trials as f64 - v).abs().max((i as f64 / trials as f64 - v).abs()))
        .fold(0.0, f64::max);
    assert!(sup <= 0.08, "Kolmogorov distance {sup}");
}

#[test]
fn same_seed_gives_identical_results() {
    let mut g = rng(6);
    let z = gaussian_sample(&mut g, 25, 3);
    let w = gaussian_sample(&mut g, 25, 3);
    let s = gaussian_pair(&mut g, 25, 2, 2);
    let k = KernelSpec::gaussian_median();
    for spec in [NullSpec::spectral(0.05), NullSpec::permutation(0.05), NullSpec::qform(0.05)] {
        let a = two_sample_test(&k, &z, &w, &spec, RngSpec::from_seed(7)).unwrap();
        let b = two_sample_test(&k, &z, &w, &spec, RngSpec::from_seed(7)).unwrap();
        assert_eq!(a, b);
        let a = independence_test(&k, &k, &s, &spec, RngSpec::from_seed(7)).unwrap();
        let b = independence_test(&k, &k, &s, &spec, RngSpec::from_seed(7)).unwrap();
        assert_eq!(a, b);
    }
    let a = two_sample_test(&k, &z, &w, &NullSpec::permutation(0.05), RngSpec::from_seed(7)).unwrap();
    let b = two_sample_test(&k, &z, &w, &NullSpec::permutation(0.05), RngSpec::from_seed(8)).unwrap();
    assert_ne!(a.threshold, b.threshold);
}

#[test]
fn far_apart_normals_are_rejected() {
    let mut g = rng(9);
    let z = gaussian_sample(&mut g, 50, 1);
    let w = gaussian_sample(&mut g, 50, 1);
    let w = SampleMatrix::from_vec(50, 1, w.as_slice().iter().map(|v| v + 10.0).collect()).unwrap();
    for spec in [NullSpec::spectral(0.05), NullSpec::permutation(0.05), NullSpec::qform(0.05)] {
        let r = two_sample_test(&KernelSpec::distance(1.0), &z, &w, &spec, RngSpec::from_seed(10)).unwrap();
        assert!(r.reject, "{:?}", r.details);
        if let Some(p) = r.p_value {
            assert!(p < 0.01);
        }
    }
}

#[test]
fn identical_coordinates_are_dependent() {
    let mut g = rng(11);
    let x = gaussian_sample(&mut g, 100, 1);
    let s = PairedSample::new(x.clone(), x).unwrap();
    let k = KernelSpec::distance(1.0);
    for spec in [NullSpec::spectral(0.05), NullSpec::permutation(0.05), NullSpec::qform(0.05)] {
        let r = independence_test(&k, &k, &s, &spec, RngSpec::from_seed(12)).unwrap();
        assert!(r.reject);
    }
}

#[test]
fn spectral_details_report_what_was_used() {
    let mut g = rng(13);
    let s = gaussian_pair(&mut g, 60, 2, 2);
    let k = KernelSpec::distance(1.0);
    let spec = NullSpec::spectral(0.05).with_draws(2000).with_max_products(50);
    let r = independence_test(&k, &k, &s, &spec, RngSpec::from_seed(14)).unwrap();
    match r.details {
        MethodDetails::Spectral { eigenvalues_used, num_draws, discarded_mass } => {
            assert_eq!(eigenvalues_used, 50);
            assert_eq!(num_draws, 2000);
            assert!(discarded_mass > 0.0);
        }
        other => panic!("unexpected details {other:?}"),
    }
}

#[test]
fn qform_is_more_conservative_than_spectral() {
    let trials = 60;
    let k = KernelSpec::distance(1.0);
    let spec = ScenarioSpec::new(Scenario::MeanShift { dim: 2, delta: 0.5 }, 50);
    let (mut spectral, mut qform) = (0, 0);
    for t in 0..trials {
        let (z, w) = gen_two_sample::<f64>(&spec, RngSpec::new(15, t)).unwrap();
        let seed = RngSpec::new(16, t);
        spectral += usize::from(two_sample_test(&k, &z, &w, &NullSpec::spectral(0.05), seed).unwrap().reject);
        qform += usize::from(two_sample_test(&k, &z, &w, &NullSpec::qform(0.05), seed).unwrap().reject);
    }
    assert!(qform <= spectral, "qform {qform}, spectral {spectral}");
}

#[test]
fn rejection_samplers_accept_half_the_proposals() {
    let n = 50_000;
    let (_, perturbed) = sample_sine_perturbed(1.5, n, &mut RngSpec::from_seed(17).rng());
    let (_, dependence) = sample_sine_dependence(2, n, &mut RngSpec::from_seed(18).rng());
    for proposals in [perturbed, dependence] {
        let rate = n as f64 / proposals as f64;
        let se = (0.25 / proposals as f64).sqrt();
        assert!((rate - 0.5).abs() < 3.0 * se, "acceptance {rate}");
    }
}
