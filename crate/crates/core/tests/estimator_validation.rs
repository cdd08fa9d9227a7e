//! Unbiasedness and fluctuation checks for the classical-shadow estimator.

use certbound::bounds::size_bound;
use certbound::husimi::sample_config;
use certbound::pauli::{decompose, matrix_of};
use certbound::qstate::{
    density_of, expectation, make_haar_state, maximally_mixed, HermitianOperator,
};
use certbound::sampling::complex_gaussian;
use certbound::shadows::{
    empirical_alpha_norm, sample_mean_fluctuation, shadow_estimate, snapshot_inverse,
};
use certbound::stream::{sample_moments, RngStream};
use num_complex::Complex64;

fn random_hermitian(n: usize, seed: u64) -> HermitianOperator<f64> {
    let mut rng = RngStream::new(seed).rng(0);
    let dim = 1usize << n;
    let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for c in r..dim {
            let z: Complex64 = complex_gaussian(&mut rng);
            if r == c {
                data[r * dim + c] = Complex64::new(z.re, 0.0);
            } else {
                data[r * dim + c] = z;
                data[c * dim + r] = z.conj();
            }
        }
    }
    HermitianOperator::new(n, data).unwrap()
}

#[test]
fn snapshot_inverse_mean_reproduces_rho_entrywise() {
    let psi = make_haar_state::<f64, _>(2, &mut RngStream::new(100).rng(0)).unwrap();
    let rho = density_of(&psi).unwrap();
    let n_samples = 100_000u64;
    // accumulate the mean snapshot entry by entry
    let dim = 4usize;
    let mut mean = vec![Complex64::new(0.0, 0.0); dim * dim];
    let mut m2 = vec![0.0f64; dim * dim];
    let mut rng = RngStream::new(101).rng(0);
    for k in 0..n_samples {
        let config = sample_config(&rho, &mut rng).unwrap();
        let snap = snapshot_inverse(&config).unwrap();
        let nf = (k + 1) as f64;
        for (i, v) in snap.entries().iter().enumerate() {
            let delta = v - mean[i];
            mean[i] += delta / nf;
            m2[i] += (delta.conj() * (v - mean[i])).re;
        }
    }
    for r in 0..dim {
        for c in 0..dim {
            let i = r * dim + c;
            let se = (m2[i] / (n_samples - 1) as f64 / n_samples as f64).sqrt();
            let dev = (mean[i] - rho.entry(r, c)).norm();
            assert!(
                dev < 3.5 * se + 1e-12,
                "entry ({r},{c}): |mean - rho| = {dev:.2e}, se = {se:.2e}"
            );
        }
    }
}

#[test]
fn shadow_estimates_unbiased_on_observable_state_grid() {
    for n in 1..=3usize {
        let psi = make_haar_state::<f64, _>(n, &mut RngStream::new(110 + n as u64).rng(0)).unwrap();
        let pure = density_of(&psi).unwrap();
        let mixed = maximally_mixed::<f64>(n).unwrap();
        let blend = pure.scale(0.6).add(&mixed.scale(0.4)).unwrap();
        let z_string: String = "Z".repeat(n);
        let observables = vec![
            matrix_of::<f64>(&z_string.parse().unwrap()).unwrap(),
            random_hermitian(n, 120 + n as u64),
            pure.clone(),
        ];
        let states = vec![mixed, pure.clone(), blend];
        for (oi, xi) in observables.iter().enumerate() {
            for (si, rho) in states.iter().enumerate() {
                let truth = expectation(xi, rho).unwrap();
                let (m, _) = sample_moments(
                    30_000,
                    RngStream::new(1000 + (n * 16 + oi * 4 + si) as u64),
                    |rng| {
                        let config = sample_config(rho, rng).unwrap();
                        shadow_estimate(xi, &config).unwrap()
                    },
                );
                assert!(
                    (m.mean() - truth).abs() < 3.5 * m.std_error() + 1e-12,
                    "N={n} obs {oi} state {si}: mean {} truth {truth} se {}",
                    m.mean(),
                    m.std_error()
                );
            }
        }
    }
}

#[test]
fn fidelity_estimator_mean_is_one_on_target() {
    let psi = make_haar_state::<f64, _>(2, &mut RngStream::new(130).rng(0)).unwrap();
    let f = density_of(&psi).unwrap();
    let (m, _) = sample_moments(100_000, RngStream::new(131), |rng| {
        let config = sample_config(&f, rng).unwrap();
        shadow_estimate(&f, &config).unwrap()
    });
    assert!(
        (m.mean() - 1.0).abs() < 3.0 * m.std_error(),
        "fidelity mean {} se {}",
        m.mean(),
        m.std_error()
    );
}

#[test]
fn alpha2_fluctuation_dominates_size_bound_at_maximally_mixed() {
    let psi = make_haar_state::<f64, _>(3, &mut RngStream::new(132).rng(0)).unwrap();
    let f = density_of(&psi).unwrap();
    let rho = maximally_mixed::<f64>(3).unwrap();
    let est = empirical_alpha_norm(&f, &rho, 2.0, 50_000, RngStream::new(133)).unwrap();
    let bound = size_bound(&decompose(&f).unwrap());
    assert!(
        est.value >= bound.value - 3.0 * est.std_error,
        "empirical {} below bound {}",
        est.value,
        bound.value
    );
    // at rho_0 the alpha=2 norm saturates the sharp variational optimum
    let sharp = bound.details["sharp_value"];
    assert!(
        (est.value - sharp).abs() < 4.0 * est.std_error,
        "saturation: empirical {} sharp {}",
        est.value,
        sharp
    );
}

#[test]
fn batch_mean_second_moment_matches_single_sample_norm() {
    let psi = make_haar_state::<f64, _>(2, &mut RngStream::new(134).rng(0)).unwrap();
    let f = density_of(&psi).unwrap();
    let rho = maximally_mixed::<f64>(2).unwrap();
    let report = sample_mean_fluctuation(&f, &rho, 2, 100, 1500, RngStream::new(135)).unwrap();
    let measured_power = report.measured.value.powi(2);
    let rel = (measured_power - report.predicted_power).abs() / report.predicted_power;
    assert!(
        rel < 0.15,
        "batch variance {} vs prediction {} (rel {rel})",
        measured_power,
        report.predicted_power
    );
}
