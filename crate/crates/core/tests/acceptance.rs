//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits nonzero if any failed.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use common::*;
use distkern::datagen::{gen_dependence, gen_two_sample, Marginal, Scenario, ScenarioSpec};
use distkern::estimators::{dcor_vstat, dcov_vstat, energy_distance_vstat, hsic_vstat, mmd_vstat};
use distkern::kernels::{gram_matrix, negative_type_form, semimetric_from_kernel};
use distkern::numerics::sym_eigendecompose;
use distkern::testing::{independence_test, two_sample_test};
use distkern::{Center, KernelSpec, NullSpec, PairedSample, RngSpec, SampleMatrix, SemimetricSpec, SymMatrix};

const EXPONENTS: [f64; 4] = [0.5, 1.0, 1.5, 2.0];
const ALPHA: f64 = 0.05;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn rate(rejections: usize, trials: usize) -> f64 {
    rejections as f64 / trials as f64
}

fn pick_exponent(g: &mut distkern::numerics::StreamRng) -> f64 {
    EXPONENTS[int_in(g, 0, 3)]
}

fn pick_center(g: &mut distkern::numerics::StreamRng, dim: usize) -> Center<f64> {
    Center::Point(random_point(g, dim))
}

fn equivalence_two_sample() -> Outcome {
    let start = Instant::now();
    let mut g = rng(101);
    let (mut worst_eq, mut worst_center) = (0.0f64, 0.0f64);
    let mut pass = true;
    for _ in 0..100 {
        let (m, n, d) = (int_in(&mut g, 1, 20), int_in(&mut g, 1, 20), int_in(&mut g, 1, 5));
        let q = pick_exponent(&mut g);
        let z = gaussian_sample(&mut g, m, d);
        let w = gaussian_sample(&mut g, n, d);
        let rho = SemimetricSpec::euclidean_power(q);
        let k = KernelSpec::distance_induced(rho.clone(), pick_center(&mut g, d));
        let energy = energy_distance_vstat(&rho, &z, &w).unwrap();
        let mmd = mmd_vstat(&k, &z, &w).unwrap();
        let err = (energy - 2.0 * mmd).abs() / (1.0 + energy.abs());
        worst_eq = worst_eq.max(err);
        pass &= err <= 1e-9;

        let other = KernelSpec::distance_induced(rho, pick_center(&mut g, d));
        let mmd_other = mmd_vstat(&other, &z, &w).unwrap();
        let diff = (mmd - mmd_other).abs();
        worst_center = worst_center.max(diff);
        pass &= diff <= 1e-10;
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(5);
    outcome(
        pass,
        format!(
            "energy = 2 MMD^2 on 100 pairs: worst rel err {worst_eq:.2e}, worst centre shift {worst_center:.2e}, {:.2}s",
            secs(elapsed)
        ),
    )
}

fn equivalence_independence() -> Outcome {
    let start = Instant::now();
    let mut g = rng(202);
    let (mut worst, mut worst_cor) = (0.0f64, 0.0f64);
    let mut pass = true;
    for _ in 0..100 {
        let (m, dx, dy) = (int_in(&mut g, 1, 20), int_in(&mut g, 1, 5), int_in(&mut g, 1, 5));
        let (qx, qy) = (pick_exponent(&mut g), pick_exponent(&mut g));
        let s = gaussian_pair(&mut g, m, dx, dy);
        let (rx, ry) = (SemimetricSpec::euclidean_power(qx), SemimetricSpec::euclidean_power(qy));
        let kx = KernelSpec::distance_induced(rx.clone(), pick_center(&mut g, dx));
        let ky = KernelSpec::distance_induced(ry.clone(), pick_center(&mut g, dy));
        let dcov = dcov_vstat(&rx, &ry, &s).unwrap();
        let hsic = hsic_vstat(&kx, &ky, &s).unwrap();
        let err = (dcov - 4.0 * hsic).abs() / (1.0 + dcov.abs());
        worst = worst.max(err);
        pass &= err <= 1e-9;

        // dCov as an energy distance between the joint law and the product of
        // marginals, under the semimetric generated by the product kernel.
        let product = KernelSpec::product(kx, ky, dx);
        let rho = semimetric_from_kernel(&product);
        let energy = energy_distance_vstat(&rho, &s.joint(), &s.product_of_marginals()).unwrap();
        let err = (dcov - 2.0 * energy).abs() / (1.0 + dcov.abs());
        worst_cor = worst_cor.max(err);
        pass &= err <= 1e-9;
    }
    let elapsed = start.elapsed();
    pass &= elapsed < Duration::from_secs(5);
    outcome(
        pass,
        format!(
            "dCov = 4 HSIC on 100 samples: worst rel err {worst:.2e}, product-kernel energy check {worst_cor:.2e}, {:.2}s",
            secs(elapsed)
        ),
    )
}

fn brute_force() -> Outcome {
    let mut g = rng(303);
    let (mut worst_mmd, mut worst_hsic) = (0.0f64, 0.0f64);
    for i in 0..50 {
        let d = int_in(&mut g, 1, 3);
        let q = pick_exponent(&mut g);
        let sigma = 0.5 + 2.0 * g.uniform();
        let c = random_point(&mut g, d);
        let (m, n, p) = (int_in(&mut g, 1, 10), int_in(&mut g, 1, 10), int_in(&mut g, 1, 10));
        let z = gaussian_sample(&mut g, m, d);
        let w = gaussian_sample(&mut g, n, d);
        let s = gaussian_pair(&mut g, p, d, d);

        let ((got_mmd, want_mmd), (got_hsic, want_hsic)) = if i % 2 == 0 {
            let k = KernelSpec::distance_induced(SemimetricSpec::euclidean_power(q), Center::Point(c.clone()));
            let f = |a: &[f64], b: &[f64]| distance_kernel(q, &c, a, b);
            (
                (mmd_vstat(&k, &z, &w).unwrap(), mmd_oracle(f, &z, &w)),
                (hsic_vstat(&k, &k, &s).unwrap(), hsic_oracle(f, f, &s)),
            )
        } else {
            let k = KernelSpec::gaussian(sigma);
            let f = |a: &[f64], b: &[f64]| gaussian_kernel(sigma, a, b);
            (
                (mmd_vstat(&k, &z, &w).unwrap(), mmd_oracle(f, &z, &w)),
                (hsic_vstat(&k, &k, &s).unwrap(), hsic_oracle(f, f, &s)),
            )
        };
        worst_mmd = worst_mmd.max((got_mmd - want_mmd).abs());
        worst_hsic = worst_hsic.max((got_hsic - want_hsic).abs());
    }
    outcome(
        worst_mmd <= 1e-12 && worst_hsic <= 1e-12,
        format!("50 instances, m <= 10: worst |mmd - naive| {worst_mmd:.2e}, worst |hsic - naive| {worst_hsic:.2e}"),
    )
}

fn spectral() -> NullSpec {
    NullSpec::spectral(ALPHA)
}

fn permutation() -> NullSpec {
    NullSpec::permutation(ALPHA)
}

fn type_one_error() -> Outcome {
    let start = Instant::now();
    let trials = 300u64;
    let k = KernelSpec::distance(1.0);
    let mean_null = ScenarioSpec::new(Scenario::MeanShift { dim: 5, delta: 0.0 }, 100);
    let (mut spec_rej, mut perm_rej, mut qform_rej) = (0, 0, 0);
    for t in 0..trials {
        let (z, w) = gen_two_sample::<f64>(&mean_null, RngSpec::new(404, t)).unwrap();
        let seed = RngSpec::new(405, t);
        spec_rej += usize::from(two_sample_test(&k, &z, &w, &spectral(), seed).unwrap().reject);
        perm_rej += usize::from(two_sample_test(&k, &z, &w, &permutation(), seed).unwrap().reject);
        qform_rej += usize::from(two_sample_test(&k, &z, &w, &NullSpec::qform(ALPHA), seed).unwrap().reject);
    }
    let rotation_null = ScenarioSpec::new(
        Scenario::RotatedPair {
            angle: 0.0,
            extra_dims: 1,
            marginal: Marginal::Uniform,
        },
        128,
    );
    let (mut ind_spec, mut ind_perm) = (0, 0);
    for t in 0..trials {
        let s = gen_dependence::<f64>(&rotation_null, RngSpec::new(406, t)).unwrap();
        let seed = RngSpec::new(407, t);
        ind_spec += usize::from(independence_test(&k, &k, &s, &spectral(), seed).unwrap().reject);
        ind_perm += usize::from(independence_test(&k, &k, &s, &permutation(), seed).unwrap().reject);
    }
    let n = trials as usize;
    let band = |r: f64| (0.02..=0.09).contains(&r);
    let rates = [
        rate(spec_rej, n),
        rate(perm_rej, n),
        rate(qform_rej, n),
        rate(ind_spec, n),
        rate(ind_perm, n),
    ];
    let elapsed = start.elapsed();
    let pass = band(rates[0])
        && band(rates[1])
        && rates[2] <= 0.02
        && band(rates[3])
        && band(rates[4])
        && elapsed < Duration::from_secs(600);
    outcome(
        pass,
        format!(
            "300 null trials: two-sample spectral {:.3}, permutation {:.3}, qform {:.3}; independence spectral {:.3}, permutation {:.3}; {:.1}s",
            rates[0],
            rates[1],
            rates[2],
            rates[3],
            rates[4],
            secs(elapsed)
        ),
    )
}

fn power_mean_shift() -> Outcome {
    let trials = 200u64;
    let k = KernelSpec::distance(1.0);
    let spec = ScenarioSpec::new(Scenario::MeanShift { dim: 1, delta: 1.0 }, 100);
    let (mut spec_rej, mut perm_rej) = (0, 0);
    for t in 0..trials {
        let (z, w) = gen_two_sample::<f64>(&spec, RngSpec::new(505, t)).unwrap();
        let seed = RngSpec::new(506, t);
        spec_rej += usize::from(two_sample_test(&k, &z, &w, &spectral(), seed).unwrap().reject);
        perm_rej += usize::from(two_sample_test(&k, &z, &w, &permutation(), seed).unwrap().reject);
    }
    let (s, p) = (rate(spec_rej, trials as usize), rate(perm_rej, trials as usize));
    outcome(
        s >= 0.9 && p >= 0.9,
        format!("mean shift 1, d=1, m=n=100: spectral power {s:.3}, permutation power {p:.3}"),
    )
}

fn exponent_ordering() -> Outcome {
    let trials = 200u64;
    let spec = ScenarioSpec::new(Scenario::SineDependence { freq: 2 }, 128);
    let small = KernelSpec::distance(1.0 / 3.0);
    let one = KernelSpec::distance(1.0);
    let (mut small_rej, mut one_rej) = (0, 0);
    for t in 0..trials {
        let s = gen_dependence::<f64>(&spec, RngSpec::new(606, t)).unwrap();
        let seed = RngSpec::new(607, t);
        small_rej += usize::from(independence_test(&small, &small, &s, &spectral(), seed).unwrap().reject);
        one_rej += usize::from(independence_test(&one, &one, &s, &spectral(), seed).unwrap().reject);
    }
    let (a, b) = (rate(small_rej, trials as usize), rate(one_rej, trials as usize));
    outcome(
        a >= b - 0.05,
        format!("sine dependence l=2, m=128: power q=1/3 {a:.3}, q=1 {b:.3}"),
    )
}

fn threshold_agreement() -> Outcome {
    let k = KernelSpec::distance(1.0);
    let spec = ScenarioSpec::new(Scenario::MeanShift { dim: 5, delta: 0.0 }, 100);
    let mut worst = 0.0f64;
    for t in 0..20 {
        let (z, w) = gen_two_sample::<f64>(&spec, RngSpec::new(707, t)).unwrap();
        let seed = RngSpec::new(708, t);
        let s = two_sample_test(&k, &z, &w, &spectral(), seed).unwrap().threshold;
        let p = two_sample_test(&k, &z, &w, &permutation(), seed).unwrap().threshold;
        worst = worst.max((s - p).abs() / p.abs().max(s.abs()));
    }
    outcome(
        worst <= 0.15,
        format!("20 null datasets, m=n=100: worst relative threshold gap {worst:.3}"),
    )
}

fn property_suites() -> Outcome {
    let mut g = rng(808);
    let mut worst_form = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let n = int_in(&mut g, 2, 12);
        let d = int_in(&mut g, 1, 4);
        let q = (1.0 - g.uniform()) * 2.0;
        let x = gaussian_sample(&mut g, n, d);
        let raw: Vec<f64> = (0..n).map(|_| g.standard_normal()).collect();
        let mean = raw.iter().sum::<f64>() / n as f64;
        let a: Vec<f64> = raw.iter().map(|v| v - mean).collect();
        let v = negative_type_form(&SemimetricSpec::euclidean_power(q), &x, &a).unwrap();
        worst_form = worst_form.max(v);
    }
    let witness = negative_type_form(
        &SemimetricSpec::euclidean_power(3.0),
        &SampleMatrix::from_column(&[0.0, 1.0, 2.0]).unwrap(),
        &[1.0, -2.0, 1.0],
    )
    .unwrap();

    let mut worst_mean = 0.0f64;
    for _ in 0..100 {
        let n = int_in(&mut g, 1, 15);
        let d = int_in(&mut g, 1, 4);
        let x = gaussian_sample(&mut g, n, d);
        let base = if g.uniform() < 0.5 {
            KernelSpec::distance(pick_exponent(&mut g))
        } else {
            KernelSpec::gaussian_median().resolve(&x).unwrap()
        };
        let k = KernelSpec::centered_at(base, x.clone()).unwrap();
        let gram = gram_matrix(&k, &x, None).unwrap();
        let mean = gram.as_slice().iter().sum::<f64>() / (n * n) as f64;
        worst_mean = worst_mean.max(mean.abs());
    }

    let mut worst_eig = 0.0f64;
    for i in 0..200 {
        let n = 1 + (i * 99) / 199;
        let entries: Vec<f64> = (0..n * n).map(|_| g.standard_normal()).collect();
        let a = SymMatrix::from_upper_fn(n, |r, c| entries[r * n + c]).unwrap();
        let rebuilt = sym_eigendecompose(&a).unwrap().reconstruct();
        let err: f64 = rebuilt
            .iter()
            .zip(a.as_slice())
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        worst_eig = worst_eig.max(err / a.frobenius_norm().max(f64::MIN_POSITIVE));
    }
    outcome(
        worst_form <= 1e-10 && witness > 0.0 && worst_mean <= 1e-10 && worst_eig <= 1e-8,
        format!(
            "max negative-type form {worst_form:.2e}, q=3 witness {witness}, centred double mean {worst_mean:.2e}, eigen residual {worst_eig:.2e}"
        ),
    )
}

fn dcor_bounds() -> Outcome {
    let mut g = rng(909);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..200 {
        let m = int_in(&mut g, 2, 30);
        let s = if i % 4 == 0 {
            // Strongly dependent: y is a noisy nonlinear function of x.
            let x = gaussian_sample(&mut g, m, 2);
            let y: Vec<f64> = x.iter_rows().map(|r| (PI * r[0]).sin() + 0.1 * g.standard_normal()).collect();
            PairedSample::new(x, SampleMatrix::from_column(&y).unwrap()).unwrap()
        } else {
            let (dx, dy) = (int_in(&mut g, 1, 4), int_in(&mut g, 1, 4));
            gaussian_pair(&mut g, m, dx, dy)
        };
        let (kx, ky) = if i % 2 == 0 {
            (KernelSpec::distance(pick_exponent(&mut g)), KernelSpec::distance(pick_exponent(&mut g)))
        } else {
            (KernelSpec::gaussian_median(), KernelSpec::gaussian_median())
        };
        let r = dcor_vstat(&kx, &ky, &s).unwrap();
        lo = lo.min(r);
        hi = hi.max(r);
    }
    let mut worst_self = 0.0f64;
    for k in [KernelSpec::distance(1.0), KernelSpec::distance(0.5), KernelSpec::gaussian_median()] {
        let x = gaussian_sample(&mut g, 40, 3);
        let s = PairedSample::new(x.clone(), x).unwrap();
        worst_self = worst_self.max((dcor_vstat(&k, &k, &s).unwrap() - 1.0).abs());
    }
    outcome(
        lo >= 0.0 && hi <= 1.0 + 1e-10 && worst_self <= 1e-10,
        format!("200 samples: dcor range [{lo:.4}, {hi:.4}], |dcor(x, x) - 1| {worst_self:.2e}"),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("C1 energy distance equals twice MMD", equivalence_two_sample),
        ("C2 distance covariance equals four times HSIC", equivalence_independence),
        ("C3 brute-force oracles", brute_force),
        ("C4 type I error", type_one_error),
        ("C5 power under mean shift", power_mean_shift),
        ("C6 exponent ordering", exponent_ordering),
        ("C7 spectral vs permutation thresholds", threshold_agreement),
        ("C8 property suites", property_suites),
        ("C9 dcor bounds", dcor_bounds),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (name, run) in criteria {
        if !filter.is_empty() && !filter.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let result = run();
        let status = if result.pass { "PASS" } else { "FAIL" };
        println!("{status} {name}: {} [{:.1}s]", result.detail, secs(start.elapsed()));
        failed += usize::from(!result.pass);
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
