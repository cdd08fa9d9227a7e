//! Pure states, density matrices, and Hermitian operators at desk scale.
//!
//! Convention used everywhere: qubit 1 is the most significant bit of the
//! computational-basis index (big-endian), so `basis index = z_1 z_2 ... z_N`
//! read left to right. Values are immutable after construction and safe to
//! share across threads.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::complex_gaussian;
use crate::scalar::{c_norm, c_re, c_zero, Scalar, C};

/// Cap for state-only operations (2^N amplitudes).
pub const STATE_QUBIT_CAP: usize = 20;
/// Cap for operator-valued work (4^N matrix entries / Pauli coefficients).
pub const OPERATOR_QUBIT_CAP: usize = 12;

pub(crate) fn check_state_cap(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > STATE_QUBIT_CAP {
        return Err(Error::CapExceeded {
            n_qubits,
            cap: STATE_QUBIT_CAP,
            what: "state-vector operations",
        });
    }
    Ok(())
}

pub(crate) fn check_operator_cap(n_qubits: usize) -> Result<()> {
    if n_qubits == 0 || n_qubits > OPERATOR_QUBIT_CAP {
        return Err(Error::CapExceeded {
            n_qubits,
            cap: OPERATOR_QUBIT_CAP,
            what: "operator-valued computations",
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// StateVector
// ---------------------------------------------------------------------------

/// Unit-norm amplitude vector of an N-qubit pure state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StateIo<T>", into = "StateIo<T>", bound = "T: Scalar")]
pub struct StateVector<T: Scalar> {
    n_qubits: usize,
    amps: Vec<C<T>>,
}

#[derive(Serialize, Deserialize)]
struct StateIo<T> {
    n_qubits: usize,
    amplitudes: Vec<[T; 2]>,
}

impl<T: Scalar> From<StateVector<T>> for StateIo<T> {
    fn from(s: StateVector<T>) -> Self {
        StateIo {
            n_qubits: s.n_qubits,
            amplitudes: s.amps.iter().map(|a| [a.re, a.im]).collect(),
        }
    }
}

impl<T: Scalar> TryFrom<StateIo<T>> for StateVector<T> {
    type Error = Error;
    fn try_from(io: StateIo<T>) -> Result<Self> {
        let amps = io
            .amplitudes
            .into_iter()
            .map(|[re, im]| Complex::new(re, im))
            .collect();
        StateVector::new(io.n_qubits, amps)
    }
}

impl<T: Scalar> StateVector<T> {
    /// Validating constructor: length 2^n and unit norm within tolerance.
    pub fn new(n_qubits: usize, amps: Vec<C<T>>) -> Result<Self> {
        check_state_cap(n_qubits)?;
        if amps.len() != 1 << n_qubits {
            return Err(Error::InvalidInput(format!(
                "state of {} qubits needs {} amplitudes, got {}",
                n_qubits,
                1usize << n_qubits,
                amps.len()
            )));
        }
        let norm_sq: T = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - T::one()).abs() > T::cst(100.0) * T::unit_tol() {
            return Err(Error::NotNormalized {
                norm_sq: norm_sq.as_f64(),
            });
        }
        Ok(StateVector { n_qubits, amps })
    }

    pub(crate) fn from_normalized(n_qubits: usize, amps: Vec<C<T>>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n_qubits);
        debug_assert!({
            let norm_sq: T = amps.iter().map(|a| a.norm_sqr()).sum();
            (norm_sq - T::one()).abs() < T::cst(1e3) * T::unit_tol()
        });
        StateVector { n_qubits, amps }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C<T>] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> C<T> {
        self.amps[index]
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &StateVector<T>) -> Result<C<T>> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .fold(c_zero(), |acc, (a, b)| acc + a.conj() * b))
    }

    /// Squared overlap `|<self|other>|^2`.
    pub fn overlap_sq(&self, other: &StateVector<T>) -> Result<T> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Computational-basis state |z_1 z_2 ... z_N> (big-endian).
pub fn make_basis_state<T: Scalar>(bits: &[u8]) -> Result<StateVector<T>> {
    let n = bits.len();
    check_state_cap(n)?;
    if bits.iter().any(|&b| b > 1) {
        return Err(Error::InvalidInput("basis bits must be 0 or 1".into()));
    }
    let index = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
    let mut amps = vec![c_zero(); 1 << n];
    amps[index] = c_re(T::one());
    Ok(StateVector::from_normalized(n, amps))
}

/// Haar-random pure state: normalized complex Gaussian vector.
pub fn make_haar_state<T: Scalar, R: Rng + ?Sized>(
    n_qubits: usize,
    rng: &mut R,
) -> Result<StateVector<T>> {
    check_state_cap(n_qubits)?;
    let dim = 1usize << n_qubits;
    let mut amps: Vec<C<T>> = (0..dim).map(|_| complex_gaussian(rng)).collect();
    let norm: T = amps.iter().map(|a| a.norm_sqr()).sum::<T>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    Ok(StateVector::from_normalized(n_qubits, amps))
}

/// (|0...0> + e^{i phi} |1...1>) / sqrt(2).
pub fn make_ghz<T: Scalar>(n_qubits: usize, phi: T) -> Result<StateVector<T>> {
    check_state_cap(n_qubits)?;
    let dim = 1usize << n_qubits;
    let mut amps = vec![c_zero(); dim];
    let invrt2 = T::one() / T::cst(2.0).sqrt();
    amps[0] = c_re(invrt2);
    amps[dim - 1] = Complex::new(phi.cos(), phi.sin()) * invrt2;
    Ok(StateVector::from_normalized(n_qubits, amps))
}

// ---------------------------------------------------------------------------
// HermitianOperator
// ---------------------------------------------------------------------------

/// Dense 2^N x 2^N Hermitian matrix, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "OperatorIo<T>", into = "OperatorIo<T>", bound = "T: Scalar")]
pub struct HermitianOperator<T: Scalar> {
    n_qubits: usize,
    data: Vec<C<T>>,
}

#[derive(Serialize, Deserialize)]
struct OperatorIo<T> {
    n_qubits: usize,
    entries: Vec<[T; 2]>,
}

impl<T: Scalar> From<HermitianOperator<T>> for OperatorIo<T> {
    fn from(op: HermitianOperator<T>) -> Self {
        OperatorIo {
            n_qubits: op.n_qubits,
            entries: op.data.iter().map(|a| [a.re, a.im]).collect(),
        }
    }
}

impl<T: Scalar> TryFrom<OperatorIo<T>> for HermitianOperator<T> {
    type Error = Error;
    fn try_from(io: OperatorIo<T>) -> Result<Self> {
        let data = io
            .entries
            .into_iter()
            .map(|[re, im]| Complex::new(re, im))
            .collect();
        HermitianOperator::new(io.n_qubits, data)
    }
}

impl<T: Scalar> HermitianOperator<T> {
    /// Validating constructor: square 2^N x 2^N and Hermitian within tolerance.
    pub fn new(n_qubits: usize, data: Vec<C<T>>) -> Result<Self> {
        check_operator_cap(n_qubits)?;
        let dim = 1usize << n_qubits;
        if data.len() != dim * dim {
            return Err(Error::InvalidInput(format!(
                "operator on {} qubits needs {} entries, got {}",
                n_qubits,
                dim * dim,
                data.len()
            )));
        }
        let mut max_dev = T::zero();
        for r in 0..dim {
            for c in r..dim {
                let dev = c_norm(data[r * dim + c] - data[c * dim + r].conj());
                max_dev = max_dev.max(dev);
            }
        }
        if max_dev > T::cst(100.0) * T::unit_tol() {
            return Err(Error::NotHermitian {
                max_dev: max_dev.as_f64(),
            });
        }
        Ok(HermitianOperator { n_qubits, data })
    }

    /// For entries Hermitian by construction; checked only in debug builds.
    pub(crate) fn from_parts(n_qubits: usize, data: Vec<C<T>>) -> Self {
        debug_assert_eq!(data.len(), (1usize << n_qubits) * (1usize << n_qubits));
        #[cfg(debug_assertions)]
        {
            let dim = 1usize << n_qubits;
            for r in 0..dim {
                for c in r..dim {
                    let dev = c_norm(data[r * dim + c] - data[c * dim + r].conj());
                    debug_assert!(
                        dev <= T::cst(1e4) * T::unit_tol(),
                        "non-Hermitian internal construction (dev {dev})"
                    );
                }
            }
        }
        HermitianOperator { n_qubits, data }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn entries(&self) -> &[C<T>] {
        &self.data
    }

    #[inline]
    pub fn entry(&self, row: usize, col: usize) -> C<T> {
        self.data[row * self.dim() + col]
    }

    pub fn trace(&self) -> T {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i * dim + i].re).sum()
    }

    /// tr[A^2] = sum |A_ij|^2 for Hermitian A.
    pub fn frobenius_sq(&self) -> T {
        self.data.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn scale(&self, factor: T) -> HermitianOperator<T> {
        let data = self.data.iter().map(|a| a * factor).collect();
        HermitianOperator {
            n_qubits: self.n_qubits,
            data,
        }
    }

    pub fn add(&self, other: &HermitianOperator<T>) -> Result<HermitianOperator<T>> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(HermitianOperator {
            n_qubits: self.n_qubits,
            data,
        })
    }

    pub fn sub(&self, other: &HermitianOperator<T>) -> Result<HermitianOperator<T>> {
        self.add(&other.scale(-T::one()))
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<T> {
        let dim = self.dim();
        let mat = DMatrix::from_fn(dim, dim, |r, c| self.entry(r, c));
        let mut eig: Vec<T> = mat.symmetric_eigen().eigenvalues.iter().copied().collect();
        eig.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        eig
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("operator serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Rank-1 projector |psi><psi|.
pub fn density_of<T: Scalar>(state: &StateVector<T>) -> Result<HermitianOperator<T>> {
    check_operator_cap(state.n_qubits())?;
    let dim = state.dim();
    let mut data = vec![c_zero(); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            data[r * dim + c] = state.amplitude(r) * state.amplitude(c).conj();
        }
    }
    Ok(HermitianOperator::from_parts(state.n_qubits(), data))
}

/// I / 2^N.
pub fn maximally_mixed<T: Scalar>(n_qubits: usize) -> Result<HermitianOperator<T>> {
    check_operator_cap(n_qubits)?;
    let dim = 1usize << n_qubits;
    let mut data = vec![c_zero(); dim * dim];
    let p = T::one() / T::cst(dim as f64);
    for i in 0..dim {
        data[i * dim + i] = c_re(p);
    }
    Ok(HermitianOperator::from_parts(n_qubits, data))
}

/// tr[obs * rho]; the product trace of two Hermitian operators is real.
pub fn expectation<T: Scalar>(
    obs: &HermitianOperator<T>,
    rho: &HermitianOperator<T>,
) -> Result<T> {
    if obs.n_qubits() != rho.n_qubits() {
        return Err(Error::DimensionMismatch {
            left: obs.n_qubits(),
            right: rho.n_qubits(),
        });
    }
    let dim = obs.dim();
    let mut acc: C<T> = c_zero();
    for r in 0..dim {
        for c in 0..dim {
            acc += obs.entry(r, c) * rho.entry(c, r);
        }
    }
    debug_assert!(
        acc.im.abs()
            <= T::real_tol() * (T::one() + obs.frobenius_sq().sqrt() * rho.frobenius_sq().sqrt()),
        "trace of Hermitian product must be real"
    );
    Ok(acc.re)
}

// Single-qubit operator application on flat row-major buffers; shared by the
// measurement simulator and the unitary-ensemble loops.

/// buffer <- (A_site ⊗ I) * buffer
pub(crate) fn apply_left<T: Scalar>(
    buf: &mut [C<T>],
    dim: usize,
    n_qubits: usize,
    site: usize,
    a: &[[C<T>; 2]; 2],
) {
    let pos = n_qubits - 1 - site;
    let mask = 1usize << pos;
    for r0 in 0..dim {
        if r0 & mask != 0 {
            continue;
        }
        let r1 = r0 | mask;
        for c in 0..dim {
            let x0 = buf[r0 * dim + c];
            let x1 = buf[r1 * dim + c];
            buf[r0 * dim + c] = a[0][0] * x0 + a[0][1] * x1;
            buf[r1 * dim + c] = a[1][0] * x0 + a[1][1] * x1;
        }
    }
}

/// buffer <- buffer * (B_site ⊗ I)
pub(crate) fn apply_right<T: Scalar>(
    buf: &mut [C<T>],
    dim: usize,
    n_qubits: usize,
    site: usize,
    b: &[[C<T>; 2]; 2],
) {
    let pos = n_qubits - 1 - site;
    let mask = 1usize << pos;
    for c0 in 0..dim {
        if c0 & mask != 0 {
            continue;
        }
        let c1 = c0 | mask;
        for r in 0..dim {
            let x0 = buf[r * dim + c0];
            let x1 = buf[r * dim + c1];
            buf[r * dim + c0] = x0 * b[0][0] + x1 * b[1][0];
            buf[r * dim + c1] = x0 * b[0][1] + x1 * b[1][1];
        }
    }
}

/// state <- (U_site ⊗ I) * state
pub(crate) fn apply_gate_state<T: Scalar>(
    amps: &mut [C<T>],
    n_qubits: usize,
    site: usize,
    u: &[[C<T>; 2]; 2],
) {
    let pos = n_qubits - 1 - site;
    let mask = 1usize << pos;
    for i0 in 0..amps.len() {
        if i0 & mask != 0 {
            continue;
        }
        let i1 = i0 | mask;
        let x0 = amps[i0];
        let x1 = amps[i1];
        amps[i0] = u[0][0] * x0 + u[0][1] * x1;
        amps[i1] = u[1][0] * x0 + u[1][1] * x1;
    }
}

/// tr[(A_site ⊗ I) * M] without materializing the product.
pub(crate) fn trace_single_site<T: Scalar>(
    buf: &[C<T>],
    dim: usize,
    n_qubits: usize,
    site: usize,
    a: &[[C<T>; 2]; 2],
) -> C<T> {
    let pos = n_qubits - 1 - site;
    let mask = 1usize << pos;
    let mut acc: C<T> = c_zero();
    for r in 0..dim {
        let rb = usize::from(r & mask != 0);
        for cb in 0..2 {
            let c = if cb == 0 { r & !mask } else { r | mask };
            acc += a[rb][cb] * buf[c * dim + r];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::RngStream;
    use approx::assert_abs_diff_eq;

    #[test]
    fn basis_state_encoding_is_big_endian() {
        let s: StateVector<f64> = make_basis_state(&[0]).unwrap();
        assert_eq!(s.amplitudes()[0].re, 1.0);
        let s: StateVector<f64> = make_basis_state(&[1, 1]).unwrap();
        assert_eq!(s.amplitude(3).re, 1.0);
        let s: StateVector<f64> = make_basis_state(&[0, 1, 0]).unwrap();
        assert_eq!(s.amplitude(2).re, 1.0);
        assert!(s
            .amplitudes()
            .iter()
            .enumerate()
            .all(|(i, a)| (i == 2) == (a.norm() > 0.0)));
    }

    #[test]
    fn haar_state_is_normalized_and_deterministic() {
        let stream = RngStream::new(9);
        let a: StateVector<f64> = make_haar_state(1, &mut stream.rng(0)).unwrap();
        let norm: f64 = a.amplitudes().iter().map(|x| x.norm_sqr()).sum();
        assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-12);
        let b: StateVector<f64> = make_haar_state(3, &mut stream.rng(1)).unwrap();
        let c: StateVector<f64> = make_haar_state(3, &mut stream.rng(1)).unwrap();
        assert_eq!(b, c);
    }

    #[test]
    fn ghz_amplitudes() {
        let s: StateVector<f64> = make_ghz(2, 0.0).unwrap();
        let r = 0.5f64.sqrt();
        assert_abs_diff_eq!(s.amplitude(0).re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(s.amplitude(3).re, r, epsilon = 1e-15);
        assert_eq!(s.amplitude(1).norm(), 0.0);

        let s: StateVector<f64> = make_ghz(3, std::f64::consts::PI).unwrap();
        assert_abs_diff_eq!(s.amplitude(7).re, -r, epsilon = 1e-15);
        assert!(s.amplitude(7).im.abs() < 1e-15);

        let plus: StateVector<f64> = make_ghz(1, 0.0).unwrap();
        assert_abs_diff_eq!(plus.amplitude(0).re, r, epsilon = 1e-15);
        assert_abs_diff_eq!(plus.amplitude(1).re, r, epsilon = 1e-15);
    }

    #[test]
    fn density_examples() {
        let zero: StateVector<f64> = make_basis_state(&[0]).unwrap();
        let rho = density_of(&zero).unwrap();
        assert_eq!(rho.entry(0, 0).re, 1.0);
        assert_eq!(rho.entry(1, 1).re, 0.0);

        let plus: StateVector<f64> = make_ghz(1, 0.0).unwrap();
        let rho = density_of(&plus).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                assert_abs_diff_eq!(rho.entry(r, c).re, 0.5, epsilon = 1e-15);
            }
        }

        let psi: StateVector<f64> = make_haar_state(3, &mut RngStream::new(2).rng(0)).unwrap();
        let rho = density_of(&psi).unwrap();
        assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rho.frobenius_sq(), 1.0, epsilon = 1e-10);
        let eig = rho.eigenvalues();
        assert_abs_diff_eq!(eig[eig.len() - 1], 1.0, epsilon = 1e-10);
        for &e in &eig[..eig.len() - 1] {
            assert_abs_diff_eq!(e, 0.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn maximally_mixed_examples() {
        let rho: HermitianOperator<f64> = maximally_mixed(1).unwrap();
        assert_eq!(rho.entry(0, 0).re, 0.5);
        assert_eq!(rho.entry(0, 1).norm(), 0.0);
        let rho: HermitianOperator<f64> = maximally_mixed(2).unwrap();
        for i in 0..4 {
            assert_eq!(rho.entry(i, i).re, 0.25);
        }
        for n in 1..=6 {
            let rho: HermitianOperator<f64> = maximally_mixed(n).unwrap();
            assert_abs_diff_eq!(rho.trace(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn expectation_examples() {
        let psi: StateVector<f64> = make_haar_state(2, &mut RngStream::new(4).rng(0)).unwrap();
        let rho = density_of(&psi).unwrap();
        assert_abs_diff_eq!(expectation(&rho, &rho).unwrap(), 1.0, epsilon = 1e-10);

        let z = HermitianOperator::new(
            1,
            vec![
                c_re(1.0),
                c_zero(),
                c_zero(),
                c_re(-1.0),
            ],
        )
        .unwrap();
        let mixed = maximally_mixed(1).unwrap();
        assert_abs_diff_eq!(expectation(&z, &mixed).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn expectation_is_linear_and_identity_normalized() {
        let s1: StateVector<f64> = make_haar_state(2, &mut RngStream::new(5).rng(0)).unwrap();
        let s2: StateVector<f64> = make_haar_state(2, &mut RngStream::new(5).rng(1)).unwrap();
        let a = density_of(&s1).unwrap();
        let b = density_of(&s2).unwrap();
        let rho = maximally_mixed(2).unwrap();
        let lhs = expectation(&a.add(&b.scale(2.0)).unwrap(), &rho).unwrap();
        let rhs = expectation(&a, &rho).unwrap() + 2.0 * expectation(&b, &rho).unwrap();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);

        let ident = maximally_mixed(2).unwrap().scale(4.0);
        assert_abs_diff_eq!(expectation(&ident, &a).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn caps_are_hard_errors() {
        assert!(matches!(
            make_basis_state::<f64>(&[0; 21]),
            Err(Error::CapExceeded { .. })
        ));
        assert!(matches!(
            maximally_mixed::<f64>(13),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn constructors_reject_bad_input() {
        assert!(matches!(
            StateVector::<f64>::new(1, vec![c_re(1.0), c_re(1.0)]),
            Err(Error::NotNormalized { .. })
        ));
        let mut data = vec![c_zero::<f64>(); 4];
        data[1] = c_re(1.0); // asymmetric off-diagonal
        assert!(matches!(
            HermitianOperator::new(1, data),
            Err(Error::NotHermitian { .. })
        ));
        assert!(matches!(
            expectation(
                &maximally_mixed::<f64>(1).unwrap(),
                &maximally_mixed::<f64>(2).unwrap()
            ),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn state_json_round_trip_rejects_unnormalized() {
        let s: StateVector<f64> = make_ghz(2, 1.25).unwrap();
        let text = s.to_json();
        assert!(text.contains("\"n_qubits\":2"));
        let back = StateVector::<f64>::from_json(&text).unwrap();
        assert_eq!(s, back);

        let bad = r#"{"n_qubits":1,"amplitudes":[[0.9,0.0],[0.0,0.0]]}"#;
        assert!(StateVector::<f64>::from_json(bad).is_err());
    }

    #[test]
    fn single_site_application_matches_direct_product() {
        // X on site 0 of a 2-qubit operator swaps row blocks.
        let mut rng = RngStream::new(12).rng(0);
        let psi: StateVector<f64> = make_haar_state(2, &mut rng).unwrap();
        let rho = density_of(&psi).unwrap();
        let x = [
            [c_zero(), c_re(1.0)],
            [c_re(1.0), c_zero()],
        ];
        let mut buf = rho.entries().to_vec();
        apply_left(&mut buf, 4, 2, 0, &x);
        for r in 0..4 {
            for c in 0..4 {
                assert_eq!(buf[r * 4 + c], rho.entry(r ^ 2, c));
            }
        }
        let tr = trace_single_site(rho.entries(), 4, 2, 0, &x);
        let direct: C<f64> = (0..4).fold(c_zero(), |acc, i| acc + rho.entry(i, i ^ 2));
        assert!((tr - direct).norm() < 1e-14);
    }
}
