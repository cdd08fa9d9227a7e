//! Pauli-string algebra: operator decomposition, size distributions, and
//! size generating-function moments.
//!
//! Strings are packed two bits per site into a `u64` (I=0, X=1, Y=2, Z=3),
//! with site 0 (qubit 1, the most significant basis bit) in the highest
//! occupied crumb. The packed code doubles as the flat index into the
//! coefficient tensor produced by the transform, and the operator size is a
//! population count.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{check_operator_cap, HermitianOperator};
use crate::scalar::{c_re, c_zero, Scalar, C};

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub enum PauliLetter {
    I,
    X,
    Y,
    Z,
}

impl PauliLetter {
    fn from_code(code: u64) -> Self {
        match code {
            0 => PauliLetter::I,
            1 => PauliLetter::X,
            2 => PauliLetter::Y,
            3 => PauliLetter::Z,
            _ => unreachable!("2-bit code"),
        }
    }

    fn code(self) -> u64 {
        match self {
            PauliLetter::I => 0,
            PauliLetter::X => 1,
            PauliLetter::Y => 2,
            PauliLetter::Z => 3,
        }
    }

    fn symbol(self) -> char {
        match self {
            PauliLetter::I => 'I',
            PauliLetter::X => 'X',
            PauliLetter::Y => 'Y',
            PauliLetter::Z => 'Z',
        }
    }

    /// 2x2 matrix of the letter.
    pub fn matrix<T: Scalar>(self) -> [[C<T>; 2]; 2] {
        let zero = c_zero();
        let one = c_re(T::one());
        let mone = c_re(-T::one());
        let i = Complex::new(T::zero(), T::one());
        let mi = Complex::new(T::zero(), -T::one());
        match self {
            PauliLetter::I => [[one, zero], [zero, one]],
            PauliLetter::X => [[zero, one], [one, zero]],
            PauliLetter::Y => [[zero, mi], [i, zero]],
            PauliLetter::Z => [[one, zero], [zero, mone]],
        }
    }
}

/// Tensor product of single-site Pauli letters.
#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString {
    n_qubits: usize,
    code: u64,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        assert!(n_qubits >= 1 && n_qubits <= 32, "packable string length");
        PauliString { n_qubits, code: 0 }
    }

    pub fn from_letters(letters: &[PauliLetter]) -> Self {
        let n = letters.len();
        assert!(n >= 1 && n <= 32, "packable string length");
        let mut code = 0u64;
        for (site, l) in letters.iter().enumerate() {
            code |= l.code() << (2 * (n - 1 - site));
        }
        PauliString { n_qubits: n, code }
    }

    pub(crate) fn from_code(n_qubits: usize, code: u64) -> Self {
        PauliString { n_qubits, code }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn code(&self) -> u64 {
        self.code
    }

    pub fn letter(&self, site: usize) -> PauliLetter {
        assert!(site < self.n_qubits);
        PauliLetter::from_code((self.code >> (2 * (self.n_qubits - 1 - site))) & 0b11)
    }

    pub fn letters(&self) -> Vec<PauliLetter> {
        (0..self.n_qubits).map(|s| self.letter(s)).collect()
    }

    /// Number of non-identity letters, via population count on the crumbs.
    pub fn size(&self) -> usize {
        const EVEN: u64 = 0x5555_5555_5555_5555;
        (((self.code >> 1) | self.code) & EVEN).count_ones() as usize
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for site in 0..self.n_qubits {
            write!(f, "{}", self.letter(site).symbol())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > 32 {
            return Err(Error::InvalidInput(format!(
                "Pauli string must have 1..=32 letters, got {:?}",
                s
            )));
        }
        let mut letters = Vec::with_capacity(s.len());
        for ch in s.chars() {
            letters.push(match ch {
                'I' => PauliLetter::I,
                'X' => PauliLetter::X,
                'Y' => PauliLetter::Y,
                'Z' => PauliLetter::Z,
                other => {
                    return Err(Error::InvalidInput(format!(
                        "invalid Pauli letter {other:?}"
                    )))
                }
            });
        }
        Ok(PauliString::from_letters(&letters))
    }
}

/// Dense matrix of a Pauli string.
pub fn matrix_of<T: Scalar>(p: &PauliString) -> Result<HermitianOperator<T>> {
    check_operator_cap(p.n_qubits())?;
    let n = p.n_qubits();
    let dim = 1usize << n;
    let mut data = vec![c_zero::<T>(); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            let mut v = c_re(T::one());
            for site in 0..n {
                let pos = n - 1 - site;
                let rb = (r >> pos) & 1;
                let cb = (c >> pos) & 1;
                let m = p.letter(site).matrix::<T>();
                v *= m[rb][cb];
                if v.re.is_zero() && v.im.is_zero() {
                    break;
                }
            }
            data[r * dim + c] = v;
        }
    }
    Ok(HermitianOperator::from_parts(n, data))
}

// ---------------------------------------------------------------------------
// Decomposition
// ---------------------------------------------------------------------------

/// Pauli-basis expansion `op = sqrt(norm_sq) * sum_P c(P) P` with
/// `norm_sq = tr[op^2] / 2^N` and `sum_P c(P)^2 = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DecompositionIo<T>", into = "DecompositionIo<T>", bound = "T: Scalar")]
pub struct PauliDecomposition<T: Scalar> {
    n_qubits: usize,
    norm_sq: T,
    /// Nonzero coefficients sorted by packed string code.
    terms: Vec<(PauliString, T)>,
}

#[derive(Serialize, Deserialize)]
struct DecompositionIo<T> {
    norm_sq: T,
    terms: Vec<TermIo<T>>,
}

#[derive(Serialize, Deserialize)]
struct TermIo<T> {
    string: String,
    coeff: T,
}

impl<T: Scalar> From<PauliDecomposition<T>> for DecompositionIo<T> {
    fn from(dec: PauliDecomposition<T>) -> Self {
        DecompositionIo {
            norm_sq: dec.norm_sq,
            terms: dec
                .terms
                .iter()
                .map(|(p, c)| TermIo {
                    string: p.to_string(),
                    coeff: *c,
                })
                .collect(),
        }
    }
}

impl<T: Scalar> TryFrom<DecompositionIo<T>> for PauliDecomposition<T> {
    type Error = Error;
    fn try_from(io: DecompositionIo<T>) -> Result<Self> {
        if io.terms.is_empty() {
            return Err(Error::InvalidInput("decomposition with no terms".into()));
        }
        let n = io.terms[0].string.len();
        let mut terms = Vec::with_capacity(io.terms.len());
        for t in &io.terms {
            let p: PauliString = t.string.parse()?;
            if p.n_qubits() != n {
                return Err(Error::InvalidInput(
                    "inconsistent string lengths in decomposition".into(),
                ));
            }
            terms.push((p, t.coeff));
        }
        PauliDecomposition::new(n, io.norm_sq, terms)
    }
}

impl<T: Scalar> PauliDecomposition<T> {
    /// Validating constructor; sorts terms by code and checks normalization.
    pub fn new(n_qubits: usize, norm_sq: T, mut terms: Vec<(PauliString, T)>) -> Result<Self> {
        check_operator_cap(n_qubits)?;
        if norm_sq < T::zero() {
            return Err(Error::InvalidInput("negative norm_sq".into()));
        }
        terms.retain(|(_, c)| c.abs() > T::coeff_zero_tol());
        terms.sort_by_key(|(p, _)| p.code());
        terms.dedup_by(|a, b| {
            if a.0 == b.0 {
                b.1 += a.1;
                true
            } else {
                false
            }
        });
        if terms.iter().any(|(p, _)| p.n_qubits() != n_qubits) {
            return Err(Error::InvalidInput(
                "term string length differs from n_qubits".into(),
            ));
        }
        if norm_sq > T::zero() {
            let total: T = terms.iter().map(|(_, c)| *c * *c).sum();
            if (total - T::one()).abs() > T::cst(1e5) * T::unit_tol() {
                return Err(Error::InvalidInput(format!(
                    "coefficients not normalized: sum c^2 = {}",
                    total.as_f64()
                )));
            }
        }
        Ok(PauliDecomposition {
            n_qubits,
            norm_sq,
            terms,
        })
    }

    pub(crate) fn from_parts(n_qubits: usize, norm_sq: T, terms: Vec<(PauliString, T)>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].0.code() < w[1].0.code()));
        PauliDecomposition {
            n_qubits,
            norm_sq,
            terms,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// `<op^2> = tr[op^2] / 2^N`.
    pub fn norm_sq(&self) -> T {
        self.norm_sq
    }

    pub fn terms(&self) -> &[(PauliString, T)] {
        &self.terms
    }

    /// Normalized coefficient of one string (zero if absent).
    pub fn coeff(&self, p: &PauliString) -> T {
        match self.terms.binary_search_by_key(&p.code(), |(q, _)| q.code()) {
            Ok(i) => self.terms[i].1,
            Err(_) => T::zero(),
        }
    }

    /// Coefficient of the identity string.
    pub fn identity_coeff(&self) -> T {
        self.coeff(&PauliString::identity(self.n_qubits))
    }

    /// tr[A B] = 2^N sqrt(norm_sq_A norm_sq_B) sum_P cA(P) cB(P), by merging
    /// the two sorted term lists.
    pub fn product_trace(&self, other: &PauliDecomposition<T>) -> Result<T> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch {
                left: self.n_qubits,
                right: other.n_qubits,
            });
        }
        let mut acc = T::zero();
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            let (pa, ca) = self.terms[i];
            let (pb, cb) = other.terms[j];
            match pa.code().cmp(&pb.code()) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    acc += ca * cb;
                    i += 1;
                    j += 1;
                }
            }
        }
        let dim = T::cst((1u64 << self.n_qubits) as f64);
        Ok(dim * (self.norm_sq * other.norm_sq).sqrt() * acc)
    }

    pub fn size_distribution(&self) -> SizeDistribution<T> {
        let mut probs = vec![T::zero(); self.n_qubits + 1];
        for (p, c) in &self.terms {
            probs[p.size()] += *c * *c;
        }
        SizeDistribution {
            n_qubits: self.n_qubits,
            probs,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("decomposition serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Raw expansion coefficients `a_P = tr[P op] / 2^N` of a Hermitian matrix
/// given as a flat row-major buffer, indexed by packed string code.
///
/// Site-by-site transform on a crumb-interleaved copy, O(N 4^N) total.
/// Taking the real part projects onto the Hermitian part of the input.
pub(crate) fn dense_coefficients<T: Scalar>(entries: &[C<T>], n_qubits: usize) -> Vec<T> {
    let dim = 1usize << n_qubits;
    debug_assert_eq!(entries.len(), dim * dim);
    let len = dim * dim;
    let mut buf = vec![c_zero::<T>(); len];
    for r in 0..dim {
        let sr = spread_bits(r as u64) << 1;
        for (c, row_entry) in entries[r * dim..(r + 1) * dim].iter().enumerate() {
            buf[(sr | spread_bits(c as u64)) as usize] = *row_entry;
        }
    }
    let half = T::cst(0.5);
    let i_half = Complex::new(T::zero(), half);
    for pos in 0..n_qubits {
        let stride = 1usize << (2 * pos);
        let block = stride * 4;
        let mut base = 0;
        while base < len {
            for off in base..base + stride {
                let m00 = buf[off];
                let m01 = buf[off + stride];
                let m10 = buf[off + 2 * stride];
                let m11 = buf[off + 3 * stride];
                buf[off] = (m00 + m11) * half;
                buf[off + stride] = (m01 + m10) * half;
                buf[off + 2 * stride] = (m01 - m10) * i_half;
                buf[off + 3 * stride] = (m00 - m11) * half;
            }
            base += block;
        }
    }
    buf.into_iter().map(|v| v.re).collect()
}

/// Decompose a Hermitian operator over the Pauli basis.
///
/// Coefficients below the zero threshold are dropped.
pub fn decompose<T: Scalar>(op: &HermitianOperator<T>) -> Result<PauliDecomposition<T>> {
    let n = op.n_qubits();
    check_operator_cap(n)?;
    let raw = dense_coefficients(op.entries(), n);
    let norm_sq: T = raw.iter().map(|a| *a * *a).sum();
    if norm_sq <= T::zero() {
        return Err(Error::ZeroOperator);
    }
    let scale = norm_sq.sqrt();
    let mut terms = Vec::new();
    for (code, a) in raw.iter().enumerate() {
        let c = *a / scale;
        if c.abs() > T::coeff_zero_tol() {
            terms.push((PauliString::from_code(n, code as u64), c));
        }
    }
    Ok(PauliDecomposition::from_parts(n, norm_sq, terms))
}

/// Rebuild the dense operator `sqrt(norm_sq) * sum_P c(P) P`.
pub fn reconstruct<T: Scalar>(dec: &PauliDecomposition<T>) -> Result<HermitianOperator<T>> {
    let n = dec.n_qubits();
    check_operator_cap(n)?;
    let dim = 1usize << n;
    let len = dim * dim;
    let scale = dec.norm_sq().sqrt();
    let mut buf = vec![c_zero::<T>(); len];
    for (p, c) in dec.terms() {
        buf[p.code() as usize] = c_re(*c * scale);
    }
    for pos in 0..n {
        let stride = 1usize << (2 * pos);
        let block = stride * 4;
        let i = Complex::new(T::zero(), T::one());
        let mut base = 0;
        while base < len {
            for off in base..base + stride {
                let ai = buf[off];
                let ax = buf[off + stride];
                let ay = buf[off + 2 * stride];
                let az = buf[off + 3 * stride];
                buf[off] = ai + az;
                buf[off + stride] = ax - ay * i;
                buf[off + 2 * stride] = ax + ay * i;
                buf[off + 3 * stride] = ai - az;
            }
            base += block;
        }
    }
    let mut data = vec![c_zero::<T>(); len];
    for r in 0..dim {
        let sr = spread_bits(r as u64) << 1;
        for c in 0..dim {
            data[r * dim + c] = buf[(sr | spread_bits(c as u64)) as usize];
        }
    }
    Ok(HermitianOperator::from_parts(n, data))
}

/// Spread the low 32 bits of `x` onto even bit positions.
#[inline]
fn spread_bits(mut x: u64) -> u64 {
    x &= 0xFFFF_FFFF;
    x = (x | (x << 16)) & 0x0000_FFFF_0000_FFFF;
    x = (x | (x << 8)) & 0x00FF_00FF_00FF_00FF;
    x = (x | (x << 4)) & 0x0F0F_0F0F_0F0F_0F0F;
    x = (x | (x << 2)) & 0x3333_3333_3333_3333;
    (x | (x << 1)) & 0x5555_5555_5555_5555
}

// ---------------------------------------------------------------------------
// Size distribution
// ---------------------------------------------------------------------------

/// Squared coefficient weight of an observable at each operator size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct SizeDistribution<T: Scalar> {
    n_qubits: usize,
    probs: Vec<T>,
}

impl<T: Scalar> SizeDistribution<T> {
    pub fn new(n_qubits: usize, probs: Vec<T>) -> Result<Self> {
        if probs.len() != n_qubits + 1 {
            return Err(Error::InvalidInput(format!(
                "size distribution over {} qubits needs {} entries, got {}",
                n_qubits,
                n_qubits + 1,
                probs.len()
            )));
        }
        if probs.iter().any(|p| *p < -T::unit_tol()) {
            return Err(Error::InvalidInput("negative size probability".into()));
        }
        let total: T = probs.iter().copied().sum();
        if (total - T::one()).abs() > T::cst(1e5) * T::unit_tol() {
            return Err(Error::InvalidInput(format!(
                "size distribution sums to {}",
                total.as_f64()
            )));
        }
        Ok(SizeDistribution { n_qubits, probs })
    }

    pub(crate) fn from_parts(n_qubits: usize, probs: Vec<T>) -> Self {
        SizeDistribution { n_qubits, probs }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    /// `sum_s base^s P(s)`.
    pub fn moment(&self, base: T) -> T {
        let mut acc = T::zero();
        let mut power = T::one();
        for &p in &self.probs {
            acc += power * p;
            power *= base;
        }
        acc
    }

    /// `sum_{s>0} base^s P(s)`: the moment with the identity weight removed.
    pub fn moment_above_zero(&self, base: T) -> T {
        self.moment(base) - self.probs[0]
    }
}

/// `sum_s base^s P(s)` of a distribution (free-function form).
pub fn size_moment<T: Scalar>(dist: &SizeDistribution<T>, base: T) -> Result<T> {
    if base <= T::zero() {
        return Err(Error::InvalidInput("moment base must be positive".into()));
    }
    Ok(dist.moment(base))
}
