//! Fluctuation lower bounds: the size generating-function bound, the
//! K-dependent general bound over traceless variations, and the
//! observable-independent bound over positivity-constrained variations,
//! including the GHZ construction.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::husimi::integral_p2_exact;
use crate::pauli::{decompose, PauliDecomposition, SizeDistribution};
use crate::qstate::{density_of, expectation, HermitianOperator, StateVector};
use crate::scalar::{Scalar, C};
use crate::stream::RngStream;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    SizeBound,
    GeneralBound,
    ObservableIndependent,
}

/// A computed bound value with its named intermediates.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct BoundReport<T: Scalar> {
    pub kind: BoundKind,
    pub value: T,
    pub inputs_digest: String,
    pub details: BTreeMap<String, T>,
}

/// FNV-1a digest of the canonical byte encoding of the inputs.
struct Digest(u64);

impl Digest {
    fn new() -> Self {
        Digest(0xCBF2_9CE4_8422_2325)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0000_0100_0000_01B3);
        }
    }

    fn write_f64(&mut self, v: f64) {
        self.write(&v.to_bits().to_le_bytes());
    }

    fn write_u64(&mut self, v: u64) {
        self.write(&v.to_le_bytes());
    }

    fn add_decomposition<T: Scalar>(&mut self, label: u8, dec: &PauliDecomposition<T>) {
        self.write(&[label]);
        self.write_u64(dec.n_qubits() as u64);
        self.write_f64(dec.norm_sq().as_f64());
        for (p, c) in dec.terms() {
            self.write_u64(p.code());
            self.write_f64(c.as_f64());
        }
    }

    fn add_state<T: Scalar>(&mut self, label: u8, psi: &StateVector<T>) {
        self.write(&[label]);
        self.write_u64(psi.n_qubits() as u64);
        for a in psi.amplitudes() {
            self.write_f64(a.re.as_f64());
            self.write_f64(a.im.as_f64());
        }
    }

    fn add_operator<T: Scalar>(&mut self, label: u8, op: &HermitianOperator<T>) {
        self.write(&[label]);
        self.write_u64(op.n_qubits() as u64);
        for a in op.entries() {
            self.write_f64(a.re.as_f64());
            self.write_f64(a.im.as_f64());
        }
    }

    fn hex(&self) -> String {
        format!("{:016x}", self.0)
    }
}

/// Generating-function form of the size bound: `sqrt(norm_sq (3^sbar - 1))`.
pub fn generating_function_bound<T: Scalar>(norm_sq: T, dist: &SizeDistribution<T>) -> T {
    (norm_sq * (dist.moment(T::cst(3.0)) - T::one()).max(T::zero())).sqrt()
}

/// Exact optimum of the traceless-variation maximization:
/// `sqrt(norm_sq sum_{s>0} 3^s P(s))`. The generating-function form in
/// [`size_bound`] weakens the identity weight P(0) to 1, so it is never
/// larger than this value.
pub fn sharp_size_bound<T: Scalar>(dec: &PauliDecomposition<T>) -> T {
    let dist = dec.size_distribution();
    (dec.norm_sq() * dist.moment_above_zero(T::cst(3.0))).sqrt()
}

/// Size generating-function lower bound on the single-sample fluctuation of
/// any unbiased estimator of the observable behind `dec`.
pub fn size_bound<T: Scalar>(dec: &PauliDecomposition<T>) -> BoundReport<T> {
    let dist = dec.size_distribution();
    let moment = dist.moment(T::cst(3.0));
    let pos_moment = dist.moment_above_zero(T::cst(3.0));
    let value = generating_function_bound(dec.norm_sq(), &dist);
    let mut digest = Digest::new();
    digest.add_decomposition(b'x', dec);
    let mut details = BTreeMap::new();
    details.insert("norm_sq".into(), dec.norm_sq());
    details.insert("size_moment_base3".into(), moment);
    details.insert("moment_above_zero_base3".into(), pos_moment);
    details.insert("sharp_value".into(), sharp_size_bound(dec));
    BoundReport {
        kind: BoundKind::SizeBound,
        value,
        inputs_digest: digest.hex(),
        details,
    }
}

/// Right-hand side of the general bound at a concrete traceless variation:
/// `|tr[xi O]| / sqrt(K int P(O)^2)`, evaluated entirely in Pauli space.
pub fn general_bound_rhs<T: Scalar>(
    xi_dec: &PauliDecomposition<T>,
    o_dec: &PauliDecomposition<T>,
    k_value: T,
) -> Result<BoundReport<T>> {
    if xi_dec.n_qubits() != o_dec.n_qubits() {
        return Err(Error::DimensionMismatch {
            left: xi_dec.n_qubits(),
            right: o_dec.n_qubits(),
        });
    }
    if k_value <= T::zero() {
        return Err(Error::InvalidInput("K must be positive".into()));
    }
    let id_coeff = o_dec.identity_coeff();
    if id_coeff.abs() > T::cst(1e2) * T::unit_tol() {
        return Err(Error::NotTraceless {
            coeff: id_coeff.as_f64(),
        });
    }
    let integral = integral_p2_exact(o_dec);
    if integral <= T::zero() {
        return Err(Error::ZeroOperator);
    }
    let numerator = xi_dec.product_trace(o_dec)?.abs();
    let value = numerator / (k_value * integral).sqrt();
    let mut digest = Digest::new();
    digest.add_decomposition(b'x', xi_dec);
    digest.add_decomposition(b'o', o_dec);
    digest.write_f64(k_value.as_f64());
    let mut details = BTreeMap::new();
    details.insert("numerator".into(), numerator);
    details.insert("k".into(), k_value);
    details.insert("integral_p2".into(), integral);
    details.insert("norm_sq_xi".into(), xi_dec.norm_sq());
    details.insert("norm_sq_o".into(), o_dec.norm_sq());
    Ok(BoundReport {
        kind: BoundKind::GeneralBound,
        value,
        inputs_digest: digest.hex(),
        details,
    })
}

/// The maximizing traceless variation of the general bound:
/// `c_O(P) = 3^{s(P)} c_xi(P)` for P != I, identity dropped, renormalized.
pub fn optimal_variation<T: Scalar>(
    xi_dec: &PauliDecomposition<T>,
) -> Result<PauliDecomposition<T>> {
    let mut terms: Vec<_> = xi_dec
        .terms()
        .iter()
        .filter(|(p, _)| p.size() > 0)
        .map(|(p, c)| (*p, T::cst(3.0).powi(p.size() as i32) * *c))
        .collect();
    if terms.is_empty() {
        return Err(Error::InvalidInput(
            "observable proportional to the identity has no traceless content".into(),
        ));
    }
    let norm: T = terms.iter().map(|(_, c)| *c * *c).sum::<T>().sqrt();
    for (_, c) in &mut terms {
        *c /= norm;
    }
    Ok(PauliDecomposition::from_parts(
        xi_dec.n_qubits(),
        T::one(),
        terms,
    ))
}

// ---------------------------------------------------------------------------
// Positivity-constrained variations
// ---------------------------------------------------------------------------

/// Traceless variation `delta_rho = rho' - P_psi` together with the density
/// matrix `rho'` that witnesses positivity of `P_psi + delta_rho`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ValidVariation<T: Scalar> {
    delta_rho: HermitianOperator<T>,
    witness_state: HermitianOperator<T>,
}

impl<T: Scalar> ValidVariation<T> {
    /// Full validation: traceless delta, witness PSD with unit trace, and
    /// `witness = P_psi + delta` up to tolerance is the caller's contract.
    pub fn new(
        delta_rho: HermitianOperator<T>,
        witness_state: HermitianOperator<T>,
    ) -> Result<Self> {
        if delta_rho.n_qubits() != witness_state.n_qubits() {
            return Err(Error::DimensionMismatch {
                left: delta_rho.n_qubits(),
                right: witness_state.n_qubits(),
            });
        }
        if delta_rho.trace().abs() > T::cst(100.0) * T::real_tol() {
            return Err(Error::NotTraceless {
                coeff: delta_rho.trace().as_f64(),
            });
        }
        if (witness_state.trace() - T::one()).abs() > T::cst(100.0) * T::real_tol() {
            return Err(Error::InvalidInput(
                "witness state must have unit trace".into(),
            ));
        }
        let min_eig = witness_state.eigenvalues()[0];
        if min_eig < -T::cst(100.0) * T::real_tol() {
            return Err(Error::NegativeProbability {
                p: min_eig.as_f64(),
            });
        }
        Ok(ValidVariation {
            delta_rho,
            witness_state,
        })
    }

    /// Variation from a pure witness: `delta = |w><w| - |psi><psi|`.
    /// Positivity of the witness holds structurally, no spectral check.
    pub fn from_pure_witness(
        target: &StateVector<T>,
        witness: &StateVector<T>,
    ) -> Result<Self> {
        if target.n_qubits() != witness.n_qubits() {
            return Err(Error::DimensionMismatch {
                left: target.n_qubits(),
                right: witness.n_qubits(),
            });
        }
        let witness_state = density_of(witness)?;
        let delta_rho = witness_state.sub(&density_of(target)?)?;
        Ok(ValidVariation {
            delta_rho,
            witness_state,
        })
    }

    pub fn delta_rho(&self) -> &HermitianOperator<T> {
        &self.delta_rho
    }

    pub fn witness_state(&self) -> &HermitianOperator<T> {
        &self.witness_state
    }

    pub fn n_qubits(&self) -> usize {
        self.delta_rho.n_qubits()
    }
}

/// GHZ-family variation: witness `|GHZ_phi><GHZ_phi|` against the target
/// `|GHZ_0>`. The difference is supported entirely on size-N Pauli strings.
pub fn ghz_variation<T: Scalar>(n_qubits: usize, phi: T) -> Result<ValidVariation<T>> {
    if n_qubits < 2 {
        return Err(Error::InvalidInput(
            "the GHZ variation needs at least 2 qubits".into(),
        ));
    }
    if phi <= T::zero() || phi >= T::cst(std::f64::consts::TAU) {
        return Err(Error::InvalidInput(
            "phi must lie strictly inside (0, 2 pi)".into(),
        ));
    }
    let target = crate::qstate::make_ghz(n_qubits, T::zero())?;
    let witness = crate::qstate::make_ghz(n_qubits, phi)?;
    ValidVariation::from_pure_witness(&target, &witness)
}

/// Observable-independent bound at a concrete valid variation, in the
/// large-alpha limit K = 2^N:
/// `|tr[P_psi delta]| / sqrt(2^N int <n|delta|n>^2)`.
pub fn observable_independent_rhs<T: Scalar>(
    psi: &StateVector<T>,
    var: &ValidVariation<T>,
) -> Result<BoundReport<T>> {
    let k = T::cst((1u64 << psi.n_qubits()) as f64);
    observable_independent_rhs_with_k(psi, var, k)
}

/// Same bound with a caller-supplied K (for composing with a Monte-Carlo
/// estimate of the true K instead of the large-alpha limit).
pub fn observable_independent_rhs_with_k<T: Scalar>(
    psi: &StateVector<T>,
    var: &ValidVariation<T>,
    k_value: T,
) -> Result<BoundReport<T>> {
    if psi.n_qubits() != var.n_qubits() {
        return Err(Error::DimensionMismatch {
            left: psi.n_qubits(),
            right: var.n_qubits(),
        });
    }
    if k_value <= T::zero() {
        return Err(Error::InvalidInput("K must be positive".into()));
    }
    let delta = var.delta_rho();
    let mut digest = Digest::new();
    digest.add_state(b'p', psi);
    digest.add_operator(b'd', delta);
    digest.write_f64(k_value.as_f64());
    let mut details = BTreeMap::new();
    details.insert("k".into(), k_value);
    details.insert("tau".into(), T::one());
    // degenerate zero variation: the ratio is defined as zero
    if delta.frobenius_sq() <= T::cst(1e4) * T::unit_tol() * T::unit_tol() {
        details.insert("numerator".into(), T::zero());
        details.insert("integral_p2".into(), T::zero());
        return Ok(BoundReport {
            kind: BoundKind::ObservableIndependent,
            value: T::zero(),
            inputs_digest: digest.hex(),
            details,
        });
    }
    let p_psi = density_of(psi)?;
    let numerator = expectation(&p_psi, delta)?.abs();
    let dec = decompose(delta)?;
    let integral = integral_p2_exact(&dec);
    let value = numerator / (k_value * integral).sqrt();
    details.insert("numerator".into(), numerator);
    details.insert("integral_p2".into(), integral);
    Ok(BoundReport {
        kind: BoundKind::ObservableIndependent,
        value,
        inputs_digest: digest.hex(),
        details,
    })
}

/// Randomized search for a strong valid variation of `psi`.
///
/// Heuristic families: (a) pure witnesses `(psi + eps chi)/norm` with Haar
/// `chi` and `eps` on a log grid, (b) two-basis-index rotations and phase
/// twists generalizing the GHZ construction, seeded with a deterministic
/// pi-phase twist of the two largest amplitudes. The result is a lower bound
/// on the constrained maximum, not a certified optimum.
pub fn search_variation<T: Scalar>(
    psi: &StateVector<T>,
    n_trials: u64,
    stream: RngStream,
) -> Result<(ValidVariation<T>, BoundReport<T>)> {
    if n_trials == 0 {
        return Err(Error::InvalidInput("need at least one trial".into()));
    }
    crate::qstate::check_operator_cap(psi.n_qubits())?;
    let results: Vec<Option<(T, u64)>> = (0..n_trials)
        .into_par_iter()
        .map(|i| {
            let witness = trial_witness(psi, i, stream)?;
            let var = ValidVariation::from_pure_witness(psi, &witness).ok()?;
            let report = observable_independent_rhs(psi, &var).ok()?;
            Some((report.value, i))
        })
        .collect();
    let mut best: Option<(T, u64)> = None;
    for r in results.into_iter().flatten() {
        match best {
            None => best = Some(r),
            Some((bv, _)) if r.0 > bv => best = Some(r),
            _ => {}
        }
    }
    let (_, best_index) =
        best.ok_or_else(|| Error::InvalidInput("no trial produced a valid variation".into()))?;
    let witness = trial_witness(psi, best_index, stream)
        .expect("winning trial reproduces deterministically");
    let var = ValidVariation::from_pure_witness(psi, &witness)?;
    let mut report = observable_independent_rhs(psi, &var)?;
    report
        .details
        .insert("best_trial".into(), T::cst(best_index as f64));
    report
        .details
        .insert("n_trials".into(), T::cst(n_trials as f64));
    Ok((var, report))
}

/// Witness state of one search trial; `None` when the trial degenerates.
fn trial_witness<T: Scalar>(
    psi: &StateVector<T>,
    index: u64,
    stream: RngStream,
) -> Option<StateVector<T>> {
    use rand::Rng;
    let n = psi.n_qubits();
    let mut rng = stream.rng(index);
    if index == 0 {
        // deterministic seed trial: pi-phase twist of the two largest amplitudes
        let mut order: Vec<usize> = (0..psi.dim()).collect();
        order.sort_by(|&a, &b| {
            psi.amplitude(b)
                .norm_sqr()
                .partial_cmp(&psi.amplitude(a).norm_sqr())
                .unwrap()
        });
        let b = order[1];
        if psi.amplitude(b).norm_sqr() <= T::branch_zero_tol() {
            return None;
        }
        let mut amps = psi.amplitudes().to_vec();
        amps[b] = -amps[b];
        return Some(StateVector::from_normalized(n, amps));
    }
    if index % 2 == 1 {
        // family (a): pure perturbation along a Haar direction
        let eps_grid = [1.0, 0.3, 0.1, 0.03, 0.01];
        let eps = T::cst(eps_grid[(index as usize / 2) % eps_grid.len()]);
        let chi = crate::qstate::make_haar_state::<T, _>(n, &mut rng).ok()?;
        let mut amps: Vec<C<T>> = psi
            .amplitudes()
            .iter()
            .zip(chi.amplitudes())
            .map(|(a, c)| a + c * eps)
            .collect();
        let norm: T = amps.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
        if norm <= T::cst(1e-6) {
            return None;
        }
        for a in &mut amps {
            *a /= norm;
        }
        Some(StateVector::from_normalized(n, amps))
    } else {
        // family (b): rotation/phase on a random pair of basis indices
        let dim = psi.dim();
        let a_idx = rng.gen_range(0..dim);
        let b_idx = loop {
            let b = rng.gen_range(0..dim);
            if b != a_idx {
                break b;
            }
        };
        let phi = T::cst(rng.gen_range(0.0..std::f64::consts::TAU));
        let theta = T::cst(rng.gen_range(0.0..std::f64::consts::FRAC_PI_2));
        let phase = C::new(phi.cos(), phi.sin());
        let mut amps = psi.amplitudes().to_vec();
        let (ca, cb) = (amps[a_idx], amps[b_idx]);
        if index % 4 == 0 {
            // phase twist on b only
            if cb.norm_sqr() <= T::branch_zero_tol() {
                return None;
            }
            amps[b_idx] = cb * phase;
        } else {
            let (sin_t, cos_t) = (theta.sin(), theta.cos());
            amps[a_idx] = ca * cos_t - cb * phase.conj() * sin_t;
            amps[b_idx] = ca * phase * sin_t + cb * cos_t;
        }
        Some(StateVector::from_normalized(n, amps))
    }
}
