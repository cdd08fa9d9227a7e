//! Classical-shadow estimators for the simulated protocol and empirical
//! alpha-norm measurement of their fluctuations.
//!
//! The estimator family is fixed to local shadows: one snapshot `|n><n|` is
//! inverted site by site through `A -> 3A - tr[A] I`, giving an unbiased
//! estimate of any observable from a single outcome of the protocol.

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{size_bound, BoundReport};
use crate::error::{Error, Result};
use crate::husimi::{sample_config, CoherentConfig};
use crate::pauli::decompose;
use crate::qstate::{expectation, HermitianOperator};
use crate::scalar::{c_re, c_zero, Scalar, C};
use crate::stream::{chunk_ranges, sample_moments, Moments, RngStream};

/// Estimate of the alpha-norm `E[|xi_tilde - xi|^alpha]^{1/alpha}` of the
/// single-sample estimator fluctuation.
#[derive(Copy, Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FluctuationEstimate<T: Scalar> {
    pub alpha: T,
    pub value: T,
    pub std_error: T,
    pub n_samples: u64,
    /// Exact tr[xi rho], never estimated.
    pub xi_true: T,
    /// False when the half-budget estimate disagrees by more than 20%,
    /// the heavy-tail diagnostic for large alpha.
    pub converged: bool,
}

/// Single-site factor of the inverted snapshot: 3|n><n| - I.
fn inverse_site<T: Scalar>(n: [T; 3]) -> [[C<T>; 2]; 2] {
    let half = T::cst(0.5);
    let threehalf = T::cst(1.5);
    [
        [
            c_re(half + threehalf * n[2]),
            C::new(n[0], -n[1]) * threehalf,
        ],
        [
            C::new(n[0], n[1]) * threehalf,
            c_re(half - threehalf * n[2]),
        ],
    ]
}

fn snapshot_into<T: Scalar>(config: &CoherentConfig<T>, buf: &mut Vec<C<T>>) {
    let n = config.n_qubits();
    buf.clear();
    buf.push(c_re(T::one()));
    let mut dim = 1usize;
    for site in 0..n {
        let m = inverse_site(config.direction(site));
        let new_dim = dim * 2;
        let mut next = vec![c_zero::<T>(); new_dim * new_dim];
        for r in 0..dim {
            for c in 0..dim {
                let v = buf[r * dim + c];
                for (rb, row) in m.iter().enumerate() {
                    for (cb, entry) in row.iter().enumerate() {
                        next[(r * 2 + rb) * new_dim + (c * 2 + cb)] = v * *entry;
                    }
                }
            }
        }
        *buf = next;
        dim = new_dim;
    }
}

/// Inverted measurement channel applied to one snapshot:
/// `(x)_i (3|n_i><n_i| - I)`. Its expectation over the protocol is rho.
pub fn snapshot_inverse<T: Scalar>(config: &CoherentConfig<T>) -> Result<HermitianOperator<T>> {
    crate::qstate::check_operator_cap(config.n_qubits())?;
    let mut buf = Vec::new();
    snapshot_into(config, &mut buf);
    Ok(HermitianOperator::from_parts(config.n_qubits(), buf))
}

/// Classical-shadow estimate `tr[M^{-1}(|n><n|) xi]` from one outcome.
pub fn shadow_estimate<T: Scalar>(
    xi: &HermitianOperator<T>,
    config: &CoherentConfig<T>,
) -> Result<T> {
    if xi.n_qubits() != config.n_qubits() {
        return Err(Error::DimensionMismatch {
            left: xi.n_qubits(),
            right: config.n_qubits(),
        });
    }
    let mut buf = Vec::new();
    snapshot_into(config, &mut buf);
    Ok(trace_product(&buf, xi))
}

/// tr[S xi] for a flat row-major S; real for Hermitian factors.
fn trace_product<T: Scalar>(snapshot: &[C<T>], xi: &HermitianOperator<T>) -> T {
    let dim = xi.dim();
    let mut acc: C<T> = c_zero();
    for r in 0..dim {
        for c in 0..dim {
            acc += snapshot[r * dim + c] * xi.entry(c, r);
        }
    }
    acc.re
}

/// Monte-Carlo estimate of `E[|xi_tilde(n) - tr[xi rho]|^alpha]^{1/alpha}`
/// with `n` drawn from the protocol on `rho`.
pub fn empirical_alpha_norm<T: Scalar>(
    xi: &HermitianOperator<T>,
    rho: &HermitianOperator<T>,
    alpha: T,
    n_samples: u64,
    stream: RngStream,
) -> Result<FluctuationEstimate<T>> {
    if alpha < T::cst(2.0) {
        return Err(Error::InvalidAlpha {
            alpha: alpha.as_f64(),
            reason: "the fluctuation norm is defined for alpha >= 2".into(),
        });
    }
    if xi.n_qubits() != rho.n_qubits() {
        return Err(Error::DimensionMismatch {
            left: xi.n_qubits(),
            right: rho.n_qubits(),
        });
    }
    if n_samples < 100 {
        return Err(Error::InvalidInput(
            "empirical_alpha_norm needs at least 100 samples".into(),
        ));
    }
    let xi_true = expectation(xi, rho)?;
    let (full, half) = sample_moments(n_samples, stream, |rng: &mut ChaCha8Rng| {
        let config = sample_config(rho, rng).expect("valid density matrix");
        let mut buf = Vec::new();
        snapshot_into(&config, &mut buf);
        (trace_product(&buf, xi) - xi_true).abs().powf(alpha)
    });
    Ok(finish_norm(alpha, &full, &half, n_samples, xi_true))
}

fn finish_norm<T: Scalar>(
    alpha: T,
    full: &Moments<T>,
    half: &Moments<T>,
    n_samples: u64,
    xi_true: T,
) -> FluctuationEstimate<T> {
    let m = full.mean();
    let inv_alpha = T::one() / alpha;
    if m <= T::zero() {
        return FluctuationEstimate {
            alpha,
            value: T::zero(),
            std_error: T::zero(),
            n_samples,
            xi_true,
            converged: true,
        };
    }
    let value = m.powf(inv_alpha);
    let std_error = inv_alpha * m.powf(inv_alpha - T::one()) * full.std_error();
    let half_value = half.mean().max(T::zero()).powf(inv_alpha);
    let converged = (half_value - value).abs() <= T::cst(0.2) * value;
    FluctuationEstimate {
        alpha,
        value,
        std_error,
        n_samples,
        xi_true,
        converged,
    }
}

/// Fluctuation of batch means versus the iid prediction from single samples.
#[derive(Copy, Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct BatchFluctuation<T: Scalar> {
    pub alpha: u32,
    pub batch_size: u64,
    pub n_batches: u64,
    /// alpha-norm of the batch-mean deviation, `E[|mean - xi|^alpha]^{1/alpha}`.
    pub measured: FluctuationEstimate<T>,
    /// Single-sample alpha-norm measured on the same draws.
    pub single: FluctuationEstimate<T>,
    /// Leading iid prediction `||.||_alpha^alpha / M^{alpha-1}` for the
    /// batch-mean power mean `E[|mean - xi|^alpha]`.
    pub predicted_power: T,
}

/// Measure `E[|sum_i xi_tilde(n_i)/M - xi|^alpha]` over `n_batches` batches
/// of `M` protocol draws, alongside the single-sample norm and the iid
/// prediction. Odd moments are not covered; alpha must be 2 or 4.
pub fn sample_mean_fluctuation<T: Scalar>(
    xi: &HermitianOperator<T>,
    rho: &HermitianOperator<T>,
    alpha: u32,
    batch_size: u64,
    n_batches: u64,
    stream: RngStream,
) -> Result<BatchFluctuation<T>> {
    if !(alpha == 2 || alpha == 4) {
        return Err(Error::InvalidAlpha {
            alpha: f64::from(alpha),
            reason: "batch-mean fluctuations are implemented for alpha in {2, 4}".into(),
        });
    }
    if batch_size == 0 || n_batches < 10 {
        return Err(Error::InvalidInput(
            "need batch_size >= 1 and at least 10 batches".into(),
        ));
    }
    if xi.n_qubits() != rho.n_qubits() {
        return Err(Error::DimensionMismatch {
            left: xi.n_qubits(),
            right: rho.n_qubits(),
        });
    }
    let xi_true = expectation(xi, rho)?;
    let alpha_t = T::cst(f64::from(alpha));
    let ranges = chunk_ranges(n_batches);
    let per_chunk: Vec<(Moments<T>, Moments<T>)> = ranges
        .par_iter()
        .enumerate()
        .map(|(lane, range)| {
            let mut rng = stream.rng(lane as u64);
            let mut batch_m = Moments::new();
            let mut single_m = Moments::new();
            let mut buf = Vec::new();
            let inv = T::one() / T::cst(batch_size as f64);
            for _ in range.clone() {
                let mut acc = T::zero();
                for _ in 0..batch_size {
                    let config = sample_config(rho, &mut rng).expect("valid density matrix");
                    snapshot_into(&config, &mut buf);
                    let e = trace_product(&buf, xi);
                    single_m.push((e - xi_true).abs().powf(alpha_t));
                    acc += e;
                }
                batch_m.push((acc * inv - xi_true).abs().powf(alpha_t));
            }
            (batch_m, single_m)
        })
        .collect();
    let mut batch_full = Moments::new();
    let mut batch_half = Moments::new();
    let mut single_full = Moments::new();
    let mut single_half = Moments::new();
    let half_chunks = per_chunk.len().div_ceil(2);
    for (i, (bm, sm)) in per_chunk.iter().enumerate() {
        batch_full.merge(bm);
        single_full.merge(sm);
        if i < half_chunks {
            batch_half.merge(bm);
            single_half.merge(sm);
        }
    }
    let measured = finish_norm(alpha_t, &batch_full, &batch_half, n_batches, xi_true);
    let single = finish_norm(
        alpha_t,
        &single_full,
        &single_half,
        n_batches * batch_size,
        xi_true,
    );
    let m_pow = T::cst(batch_size as f64).powi(alpha as i32 - 1);
    let predicted_power = single.value.powi(alpha as i32) / m_pow;
    Ok(BatchFluctuation {
        alpha,
        batch_size,
        n_batches,
        measured,
        single,
        predicted_power,
    })
}

/// Empirical fluctuation of the shadow estimator confronted with the size
/// bound of the observable.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ConfrontationReport<T: Scalar> {
    pub empirical: FluctuationEstimate<T>,
    pub bound: BoundReport<T>,
    /// empirical >= bound - 3 sigma
    pub satisfied: bool,
}

/// Measure the empirical alpha-norm and compare it against the size bound.
pub fn bound_confrontation<T: Scalar>(
    xi: &HermitianOperator<T>,
    rho: &HermitianOperator<T>,
    alpha: T,
    n_samples: u64,
    stream: RngStream,
) -> Result<ConfrontationReport<T>> {
    let bound = size_bound(&decompose(xi)?);
    let empirical = empirical_alpha_norm(xi, rho, alpha, n_samples, stream)?;
    let satisfied = empirical.value >= bound.value - T::cst(3.0) * empirical.std_error;
    Ok(ConfrontationReport {
        empirical,
        bound,
        satisfied,
    })
}
