//! Ensemble checks for the randomized shadow overlap and the Haar-state
//! constructors behind it.

use certbound::observables::{randomized_overlap, randomized_t, t_function};
use certbound::qstate::make_haar_state;
use certbound::stream::{Moments, RngStream};

#[test]
fn haar_states_have_expected_pairwise_overlap() {
    // E |<psi1|psi2>|^2 = 1/2^N over independent pairs
    let n = 5usize;
    let stream = RngStream::new(140);
    let mut m = Moments::<f64>::new();
    for i in 0..10_000u64 {
        let a = make_haar_state::<f64, _>(n, &mut stream.child(2 * i).rng(0)).unwrap();
        let b = make_haar_state::<f64, _>(n, &mut stream.child(2 * i + 1).rng(0)).unwrap();
        m.push(a.overlap_sq(&b).unwrap());
    }
    let expect = 1.0 / 32.0;
    assert!(
        (m.mean() - expect).abs() < 3.0 * m.std_error(),
        "overlap mean {} se {}",
        m.mean(),
        m.std_error()
    );
}

#[test]
fn randomized_overlap_two_runs_agree_entrywise() {
    let psi = make_haar_state::<f64, _>(2, &mut RngStream::new(141).rng(0)).unwrap();
    let a = randomized_overlap(&psi, 10_000, RngStream::new(142)).unwrap();
    let b = randomized_overlap(&psi, 10_000, RngStream::new(143)).unwrap();
    let budget = 3.0 * (a.per_entry_std_error + b.per_entry_std_error);
    for (x, y) in a.operator.entries().iter().zip(b.operator.entries()) {
        assert!(
            (x - y).norm() <= budget,
            "entries {x} vs {y} differ beyond {budget}"
        );
    }
}

#[test]
fn randomized_overlap_variance_halves_when_budget_doubles() {
    let psi = make_haar_state::<f64, _>(2, &mut RngStream::new(144).rng(0)).unwrap();
    let small = randomized_overlap(&psi, 20_000, RngStream::new(145)).unwrap();
    let large = randomized_overlap(&psi, 40_000, RngStream::new(146)).unwrap();
    let ratio_sq = (small.rms_entry_std_error / large.rms_entry_std_error).powi(2);
    assert!(
        (ratio_sq - 2.0).abs() <= 0.4,
        "variance ratio {ratio_sq} should be 2 within 20%"
    );
}

#[test]
fn randomized_overlap_is_reproducible() {
    let psi = make_haar_state::<f64, _>(2, &mut RngStream::new(147).rng(0)).unwrap();
    let a = randomized_overlap(&psi, 500, RngStream::new(148)).unwrap();
    let b = randomized_overlap(&psi, 500, RngStream::new(148)).unwrap();
    assert_eq!(a.operator.entries(), b.operator.entries());
    let ta = randomized_t(&psi, 500, RngStream::new(148)).unwrap();
    let tb = randomized_t(&psi, 500, RngStream::new(148)).unwrap();
    assert_eq!(ta.value, tb.value);
}

#[test]
fn t_population_at_two_qubits_matches_published_row() {
    // small ensemble consistency check against t-bar = 0.5183, S_t = 0.1105
    let stream = RngStream::new(149);
    let mut m = Moments::<f64>::new();
    let n_states = 60u64;
    for i in 0..n_states {
        let sub = stream.child(i);
        let psi = make_haar_state::<f64, _>(2, &mut sub.rng(0)).unwrap();
        let est = randomized_t(&psi, 800, sub.child(1)).unwrap();
        m.push(est.value);
    }
    let (t_ref, s_ref) = (0.5183, 0.1105);
    let tol = 3.0 * s_ref / (n_states as f64).sqrt() + s_ref / 3.0;
    assert!(
        (m.mean() - t_ref).abs() < tol,
        "t mean {} vs published {t_ref} (tol {tol})",
        m.mean()
    );
    // population spread is of the published magnitude
    assert!(m.sample_std() > 0.02 && m.sample_std() < 0.3);
}

#[test]
fn plugged_in_t_of_converged_average_is_in_published_range() {
    let psi = make_haar_state::<f64, _>(2, &mut RngStream::new(150).rng(0)).unwrap();
    let avg = randomized_overlap(&psi, 20_000, RngStream::new(151)).unwrap();
    let t = t_function(&avg.operator).unwrap();
    // Table row N=2: 0.5183 +- 0.1105 population spread; allow 3 spreads
    assert!(
        (t - 0.5183).abs() < 3.0 * 0.1105,
        "plug-in t {t} far from the published population"
    );
}
