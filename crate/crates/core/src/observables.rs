//! Certification observables: the fidelity projector, the shadow-overlap
//! operator, its local-Haar randomized average, and the t diagnostic.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{decompose, dense_coefficients, PauliString, SizeDistribution};
use crate::qstate::{
    apply_gate_state, apply_left, apply_right, check_operator_cap, density_of, HermitianOperator,
    StateVector,
};
use crate::sampling::{dagger_2x2, haar_unitary_2x2};
use crate::scalar::{c_zero, Scalar, C};
use crate::stream::{chunk_ranges, RngStream, VecMoments};

/// Fidelity projector |psi><psi| used for direct fidelity estimation.
pub fn fidelity_observable<T: Scalar>(psi: &StateVector<T>) -> Result<HermitianOperator<T>> {
    density_of(psi)
}

/// Haar-ensemble average of the fidelity projector's size distribution:
/// binomial weights C(N,s) 3^s / (2^N (2^N + 1)) for s > 0, identity
/// remainder at s = 0.
pub fn haar_fidelity_size_dist<T: Scalar>(n_qubits: usize) -> Result<SizeDistribution<T>> {
    if n_qubits == 0 || n_qubits > 62 {
        return Err(Error::InvalidInput(
            "haar_fidelity_size_dist supports 1..=62 qubits".into(),
        ));
    }
    let dim = (1u64 << n_qubits) as f64;
    let denom = T::cst(dim * (dim + 1.0));
    let mut probs = vec![T::zero(); n_qubits + 1];
    let mut binom = T::one();
    let mut pow3 = T::one();
    let mut tail = T::zero();
    for s in 1..=n_qubits {
        binom = binom * T::cst((n_qubits - s + 1) as f64) / T::cst(s as f64);
        pow3 *= T::cst(3.0);
        probs[s] = binom * pow3 / denom;
        tail += probs[s];
    }
    probs[0] = (T::one() - tail).max(T::zero());
    Ok(SizeDistribution::from_parts(n_qubits, probs))
}

/// Squared fluctuation floor for direct fidelity estimation of a typical
/// Haar state: `<F^2> sum_{s>0} 3^s P(s)` evaluated on the Haar-averaged
/// distribution. Closed form (10^N - 1) / (4^N (2^N + 1)).
pub fn haar_fidelity_bound_sq<T: Scalar>(n_qubits: usize) -> Result<T> {
    let dist = haar_fidelity_size_dist::<T>(n_qubits)?;
    let norm_sq = T::one() / T::cst((1u64 << n_qubits) as f64);
    Ok(norm_sq * dist.moment_above_zero(T::cst(3.0)))
}

/// Shadow-overlap observable: the site average over k of
/// `sum_{z \ z_k} |z><z| (x) |phi_{k,z}><phi_{k,z}| / <phi|phi>`, where
/// `phi_{k,z}` is the state's conditional single-qubit vector on site k.
/// Branches whose squared norm is below the zero threshold have Born
/// probability zero and are skipped.
pub fn shadow_overlap_observable<T: Scalar>(
    psi: &StateVector<T>,
) -> Result<HermitianOperator<T>> {
    let n = psi.n_qubits();
    if n < 2 {
        return Err(Error::InvalidInput(
            "shadow overlap needs at least 2 qubits".into(),
        ));
    }
    check_operator_cap(n)?;
    let dim = psi.dim();
    let mut data = vec![c_zero::<T>(); dim * dim];
    build_shadow_overlap(psi, &mut data);
    Ok(HermitianOperator::from_parts(n, data))
}

/// Fill `data` (length dim^2, pre-zeroed or reused) with the shadow-overlap
/// matrix of `psi`.
fn build_shadow_overlap<T: Scalar>(psi: &StateVector<T>, data: &mut [C<T>]) {
    let n = psi.n_qubits();
    let dim = psi.dim();
    data.iter_mut().for_each(|v| *v = c_zero());
    let weight = T::one() / T::cst(n as f64);
    for k in 0..n {
        let pos = n - 1 - k;
        let low_mask = (1usize << pos) - 1;
        for z in 0..dim / 2 {
            let low = z & low_mask;
            let high = (z >> pos) << (pos + 1);
            let i0 = high | low;
            let i1 = i0 | (1 << pos);
            let phi0 = psi.amplitude(i0);
            let phi1 = psi.amplitude(i1);
            let nrm = phi0.norm_sqr() + phi1.norm_sqr();
            if nrm < T::branch_zero_tol() {
                continue;
            }
            let scale = weight / nrm;
            data[i0 * dim + i0] += phi0 * phi0.conj() * scale;
            data[i0 * dim + i1] += phi0 * phi1.conj() * scale;
            data[i1 * dim + i0] += phi1 * phi0.conj() * scale;
            data[i1 * dim + i1] += phi1 * phi1.conj() * scale;
        }
    }
}

/// Monte-Carlo average over product Haar unitaries of the rotated
/// shadow-overlap observable.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RandomizedAverage<T: Scalar> {
    /// Hermitian mean operator (each sample is symmetrized before averaging).
    pub operator: HermitianOperator<T>,
    pub n_unitaries: u64,
    /// Largest per-entry standard error of the mean.
    pub per_entry_std_error: T,
    /// Root-mean-square per-entry standard error, the stabler aggregate.
    pub rms_entry_std_error: T,
}

/// Streaming per-entry moments of complex matrix samples.
struct MatMoments<T: Scalar> {
    n: u64,
    mean: Vec<C<T>>,
    m2: Vec<T>,
}

impl<T: Scalar> MatMoments<T> {
    fn new(len: usize) -> Self {
        MatMoments {
            n: 0,
            mean: vec![c_zero(); len],
            m2: vec![T::zero(); len],
        }
    }

    fn push(&mut self, xs: &[C<T>]) {
        self.n += 1;
        let n = T::cst(self.n as f64);
        for (i, &x) in xs.iter().enumerate() {
            let delta = x - self.mean[i];
            self.mean[i] += delta / n;
            self.m2[i] += (delta.conj() * (x - self.mean[i])).re;
        }
    }

    fn merge(&mut self, other: &MatMoments<T>) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            self.n = other.n;
            self.mean.copy_from_slice(&other.mean);
            self.m2.copy_from_slice(&other.m2);
            return;
        }
        let na = T::cst(self.n as f64);
        let nb = T::cst(other.n as f64);
        let total = na + nb;
        for i in 0..self.mean.len() {
            let delta = other.mean[i] - self.mean[i];
            self.mean[i] += delta * (nb / total);
            self.m2[i] += other.m2[i] + delta.norm_sqr() * na * nb / total;
        }
        self.n += other.n;
    }

    fn entry_std_error(&self, i: usize) -> T {
        if self.n < 2 {
            T::zero()
        } else {
            (self.m2[i] / T::cst((self.n - 1) as f64) / T::cst(self.n as f64))
                .max(T::zero())
                .sqrt()
        }
    }
}

/// One sample of the unitary ensemble: rotate `psi` by a product Haar
/// unitary, build the shadow overlap of the rotated state, rotate it back.
/// `scratch` must have length dim^2.
fn overlap_sample<T: Scalar>(
    psi: &StateVector<T>,
    rng: &mut ChaCha8Rng,
    rotated: &mut Vec<C<T>>,
    scratch: &mut [C<T>],
) {
    let n = psi.n_qubits();
    let dim = psi.dim();
    let gates: Vec<[[C<T>; 2]; 2]> = (0..n).map(|_| haar_unitary_2x2(rng)).collect();
    rotated.clear();
    rotated.extend_from_slice(psi.amplitudes());
    for (site, u) in gates.iter().enumerate() {
        apply_gate_state(rotated, n, site, u);
    }
    let rotated_state = StateVector::from_normalized(n, rotated.clone());
    build_shadow_overlap(&rotated_state, scratch);
    for (site, u) in gates.iter().enumerate() {
        let ud = dagger_2x2(u);
        apply_left(scratch, dim, n, site, &ud);
        apply_right(scratch, dim, n, site, u);
    }
}

/// Estimate the Haar average `mean_U U^dag L_{U psi} U` by plain Monte Carlo
/// over `n_unitaries` product unitaries.
pub fn randomized_overlap<T: Scalar>(
    psi: &StateVector<T>,
    n_unitaries: u64,
    stream: RngStream,
) -> Result<RandomizedAverage<T>> {
    if psi.n_qubits() < 2 {
        return Err(Error::InvalidInput(
            "randomized overlap needs at least 2 qubits".into(),
        ));
    }
    if n_unitaries < 10 {
        return Err(Error::InvalidInput(
            "randomized overlap needs at least 10 unitaries".into(),
        ));
    }
    check_operator_cap(psi.n_qubits())?;
    let n = psi.n_qubits();
    let dim = psi.dim();
    let len = dim * dim;
    let ranges = chunk_ranges(n_unitaries);
    let per_chunk: Vec<MatMoments<T>> = ranges
        .par_iter()
        .enumerate()
        .map(|(lane, range)| {
            let mut rng = stream.rng(lane as u64);
            let mut moments = MatMoments::new(len);
            let mut rotated = Vec::with_capacity(dim);
            let mut scratch = vec![c_zero::<T>(); len];
            let mut sym = vec![c_zero::<T>(); len];
            for _ in range.clone() {
                overlap_sample(psi, &mut rng, &mut rotated, &mut scratch);
                for r in 0..dim {
                    for c in r..dim {
                        let v = (scratch[r * dim + c] + scratch[c * dim + r].conj())
                            * T::cst(0.5);
                        sym[r * dim + c] = v;
                        sym[c * dim + r] = v.conj();
                    }
                }
                moments.push(&sym);
            }
            moments
        })
        .collect();
    let mut merged = MatMoments::new(len);
    for m in &per_chunk {
        merged.merge(m);
    }
    // the mean of Hermitian samples is Hermitian; re-symmetrize to kill dust
    let mut mean = merged.mean.clone();
    for r in 0..dim {
        for c in r..dim {
            let v = (mean[r * dim + c] + mean[c * dim + r].conj()) * T::cst(0.5);
            mean[r * dim + c] = v;
            mean[c * dim + r] = v.conj();
        }
    }
    let mut max_se = T::zero();
    let mut rms_acc = T::zero();
    for i in 0..len {
        let se = merged.entry_std_error(i);
        max_se = max_se.max(se);
        rms_acc += se * se;
    }
    Ok(RandomizedAverage {
        operator: HermitianOperator::from_parts(n, mean),
        n_unitaries,
        per_entry_std_error: max_se,
        rms_entry_std_error: (rms_acc / T::cst(len as f64)).sqrt(),
    })
}

/// `t = <omega^2> sum_{s>0} 3^s P(s)`, the generating-function weight of the
/// non-identity content of an observable.
pub fn t_function<T: Scalar>(omega: &HermitianOperator<T>) -> Result<T> {
    let dec = decompose(omega)?;
    Ok(dec.norm_sq() * dec.size_distribution().moment_above_zero(T::cst(3.0)))
}

/// Monte-Carlo estimate of `t` for the randomized shadow overlap of `psi`.
#[derive(Copy, Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TEstimate<T: Scalar> {
    pub value: T,
    pub std_error: T,
    pub n_unitaries: u64,
}

/// Estimate `t` for the exact Haar average without constructing it to higher
/// accuracy than needed: accumulates each Pauli coefficient of the sampled
/// rotated overlaps and subtracts the 1/n estimator variance from every
/// squared mean, which removes the plug-in bias of the quadratic functional.
pub fn randomized_t<T: Scalar>(
    psi: &StateVector<T>,
    n_unitaries: u64,
    stream: RngStream,
) -> Result<TEstimate<T>> {
    if psi.n_qubits() < 2 {
        return Err(Error::InvalidInput(
            "randomized overlap needs at least 2 qubits".into(),
        ));
    }
    if n_unitaries < 10 {
        return Err(Error::InvalidInput(
            "randomized t needs at least 10 unitaries".into(),
        ));
    }
    check_operator_cap(psi.n_qubits())?;
    let n = psi.n_qubits();
    let dim = psi.dim();
    let len = dim * dim;
    let ranges = chunk_ranges(n_unitaries);
    let per_chunk: Vec<VecMoments<T>> = ranges
        .par_iter()
        .enumerate()
        .map(|(lane, range)| {
            let mut rng = stream.rng(lane as u64);
            let mut moments = VecMoments::new(len);
            let mut rotated = Vec::with_capacity(dim);
            let mut scratch = vec![c_zero::<T>(); len];
            for _ in range.clone() {
                overlap_sample(psi, &mut rng, &mut rotated, &mut scratch);
                let coeffs = dense_coefficients(&scratch, n);
                moments.push(&coeffs);
            }
            moments
        })
        .collect();
    let mut merged = VecMoments::new(len);
    for m in &per_chunk {
        merged.merge(m);
    }
    let n_f = T::cst(n_unitaries as f64);
    let mut value = T::zero();
    let mut var_acc = T::zero();
    for code in 1..len {
        let s = PauliString::from_code(n, code as u64).size();
        let w = T::cst(3.0).powi(s as i32);
        let mean = merged.means()[code];
        let var_of_mean = merged.variance(code) / n_f;
        value += w * (mean * mean - var_of_mean);
        let dv = T::cst(2.0) * w * mean;
        var_acc += dv * dv * var_of_mean;
    }
    Ok(TEstimate {
        value,
        std_error: var_acc.sqrt(),
        n_unitaries,
    })
}

/// Statistics of `t` over an ensemble of Haar states.
#[derive(Copy, Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TableRow<T: Scalar> {
    pub n_qubits: usize,
    pub t_mean: T,
    pub t_std: T,
    pub n_states: u64,
    pub n_unitaries: u64,
    pub seed: u64,
    /// Mean per-state Monte-Carlo standard error on t.
    pub mean_mc_std_error: T,
}

/// Sample mean and sample standard deviation of `t` over `n_states` Haar
/// states, each evaluated with `n_unitaries` random product unitaries.
pub fn table1_experiment<T: Scalar>(
    n_qubits: usize,
    n_states: u64,
    n_unitaries: u64,
    seed: u64,
) -> Result<TableRow<T>> {
    if n_qubits < 2 {
        return Err(Error::InvalidInput(
            "the t statistic needs at least 2 qubits".into(),
        ));
    }
    check_operator_cap(n_qubits)?;
    if n_states == 0 {
        return Err(Error::InvalidInput("need at least one state".into()));
    }
    let stream = RngStream::new(seed);
    let per_state: Vec<Result<(T, T)>> = (0..n_states)
        .into_par_iter()
        .map(|i| {
            let sub = stream.child(i);
            let psi = crate::qstate::make_haar_state::<T, _>(n_qubits, &mut sub.rng(0))?;
            let est = randomized_t(&psi, n_unitaries, sub.child(1))?;
            Ok((est.value, est.std_error))
        })
        .collect();
    let mut t_moments = crate::stream::Moments::<T>::new();
    let mut se_sum = T::zero();
    for r in per_state {
        let (t, se) = r?;
        t_moments.push(t);
        se_sum += se;
    }
    Ok(TableRow {
        n_qubits,
        t_mean: t_moments.mean(),
        t_std: t_moments.sample_std(),
        n_states,
        n_unitaries,
        seed,
        mean_mc_std_error: se_sum / T::cst(n_states as f64),
    })
}
