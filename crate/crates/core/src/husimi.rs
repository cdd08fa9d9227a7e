//! Spin coherent states, Husimi-function evaluation, the measurement
//! protocol sampler, and the integrals entering the bounds.
//!
//! The protocol measures each qubit in the eigenbasis of `v_i . sigma` with
//! `v_i` uniform on the sphere; recording the outcome sign alpha_i into
//! `n_i = alpha_i v_i` makes the statistics of `n` the Husimi function
//! `P(rho, n) = <n|rho|n>`, normalized so that the density on the product of
//! spheres is `P / (2 pi)^N`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliDecomposition;
use crate::qstate::{apply_left, apply_right, trace_single_site, HermitianOperator, StateVector};
use crate::sampling::uniform_sphere;
use crate::scalar::{c_re, c_zero, Scalar, C};
use crate::stream::{sample_moments, RngStream};

/// One measurement outcome of the protocol: a unit vector per site.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConfigIo<T>", into = "ConfigIo<T>", bound = "T: Scalar")]
pub struct CoherentConfig<T: Scalar> {
    directions: Vec<[T; 3]>,
}

#[derive(Serialize, Deserialize)]
struct ConfigIo<T> {
    directions: Vec<[T; 3]>,
}

impl<T: Scalar> From<CoherentConfig<T>> for ConfigIo<T> {
    fn from(c: CoherentConfig<T>) -> Self {
        ConfigIo {
            directions: c.directions,
        }
    }
}

impl<T: Scalar> TryFrom<ConfigIo<T>> for CoherentConfig<T> {
    type Error = Error;
    fn try_from(io: ConfigIo<T>) -> Result<Self> {
        CoherentConfig::new(io.directions)
    }
}

impl<T: Scalar> CoherentConfig<T> {
    pub fn new(directions: Vec<[T; 3]>) -> Result<Self> {
        if directions.is_empty() {
            return Err(Error::InvalidInput("empty configuration".into()));
        }
        for d in &directions {
            let norm_sq = d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
            if (norm_sq - T::one()).abs() > T::cst(100.0) * T::unit_tol() {
                return Err(Error::InvalidInput(format!(
                    "direction is not a unit vector (|n|^2 = {})",
                    norm_sq.as_f64()
                )));
            }
        }
        Ok(CoherentConfig { directions })
    }

    pub(crate) fn from_unit(directions: Vec<[T; 3]>) -> Self {
        CoherentConfig { directions }
    }

    pub fn n_qubits(&self) -> usize {
        self.directions.len()
    }

    pub fn direction(&self, site: usize) -> [T; 3] {
        self.directions[site]
    }

    pub fn directions(&self) -> &[[T; 3]] {
        &self.directions
    }
}

/// Monte-Carlo estimate with its statistical error.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct McEstimate<T: Scalar> {
    pub value: T,
    /// Sample standard deviation divided by sqrt(n_samples).
    pub std_error: T,
    pub n_samples: u64,
}

/// Single-qubit amplitudes (cos(theta/2), e^{i phi} sin(theta/2)) of the
/// coherent state with Bloch vector `n`.
fn site_amplitudes<T: Scalar>(n: [T; 3]) -> [C<T>; 2] {
    let one = T::one();
    let half = T::cst(0.5);
    let zp = (one + n[2]).max(T::zero());
    if zp <= T::cst(4.0) * T::unit_tol() {
        // south pole
        return [c_zero(), c_re(one)];
    }
    let a0 = (zp * half).sqrt();
    let denom = (T::cst(2.0) * zp).sqrt();
    let a1 = C::new(n[0] / denom, n[1] / denom);
    [c_re(a0), a1]
}

/// Product coherent state |n> = |n_1> x ... x |n_N>.
pub fn coherent_state<T: Scalar>(config: &CoherentConfig<T>) -> StateVector<T> {
    let n = config.n_qubits();
    let mut amps: Vec<C<T>> = vec![c_re(T::one())];
    for site in 0..n {
        let site_amp = site_amplitudes(config.direction(site));
        let mut next = Vec::with_capacity(amps.len() * 2);
        for a in &amps {
            next.push(a * site_amp[0]);
            next.push(a * site_amp[1]);
        }
        amps = next;
    }
    StateVector::from_normalized(n, amps)
}

/// Husimi value <n|rho|n>; also used for variations, where it can be negative.
pub fn husimi_value<T: Scalar>(
    rho: &HermitianOperator<T>,
    config: &CoherentConfig<T>,
) -> Result<T> {
    if rho.n_qubits() != config.n_qubits() {
        return Err(Error::DimensionMismatch {
            left: rho.n_qubits(),
            right: config.n_qubits(),
        });
    }
    let state = coherent_state(config);
    let v = state.amplitudes();
    let dim = rho.dim();
    let mut acc: C<T> = c_zero();
    for r in 0..dim {
        let mut row: C<T> = c_zero();
        for c in 0..dim {
            row += rho.entry(r, c) * v[c];
        }
        acc += v[r].conj() * row;
    }
    debug_assert!(
        acc.im.abs() <= T::real_tol() * (T::one() + acc.re.abs()),
        "<n|rho|n> must be real for Hermitian rho"
    );
    Ok(acc.re)
}

/// Draw one outcome of the physical protocol: per site, a uniform measurement
/// axis, a Born-sampled sign on the current conditional state, and a
/// projection. The resulting `n` is distributed as `P(rho, n) / (2 pi)^N`.
pub fn sample_config<T: Scalar, R: Rng + ?Sized>(
    rho: &HermitianOperator<T>,
    rng: &mut R,
) -> Result<CoherentConfig<T>> {
    let n = rho.n_qubits();
    let dim = rho.dim();
    if (rho.trace() - T::one()).abs() > T::cst(1e4) * T::unit_tol() {
        return Err(Error::InvalidInput(format!(
            "density matrix must have unit trace, got {}",
            rho.trace().as_f64()
        )));
    }
    let p_tol = T::cst(1e-12);
    let mut work = rho.entries().to_vec();
    let mut directions = Vec::with_capacity(n);
    let half = T::cst(0.5);
    for site in 0..n {
        let v: [T; 3] = uniform_sphere(rng);
        // projector onto the +1 eigenstate of v . sigma
        let proj_plus = [
            [
                c_re(half * (T::one() + v[2])),
                C::new(v[0], -v[1]) * half,
            ],
            [
                C::new(v[0], v[1]) * half,
                c_re(half * (T::one() - v[2])),
            ],
        ];
        let p_plus_c = trace_single_site(&work, dim, n, site, &proj_plus);
        let p_plus = p_plus_c.re;
        if p_plus < -p_tol || p_plus > T::one() + p_tol {
            return Err(Error::NegativeProbability {
                p: p_plus.min(T::one() - p_plus).as_f64(),
            });
        }
        let p_plus = p_plus.clamp(T::zero(), T::one());
        let up = T::cst(rng.gen::<f64>()) < p_plus;
        let (sign, projector, p_branch) = if up {
            (T::one(), proj_plus, p_plus)
        } else {
            let proj_minus = [
                [
                    c_re(half * (T::one() - v[2])),
                    -C::new(v[0], -v[1]) * half,
                ],
                [
                    -C::new(v[0], v[1]) * half,
                    c_re(half * (T::one() + v[2])),
                ],
            ];
            (-T::one(), proj_minus, T::one() - p_plus)
        };
        directions.push([sign * v[0], sign * v[1], sign * v[2]]);
        if p_branch < T::cst(1e-290) {
            return Err(Error::InvalidInput(
                "conditional state collapsed to numerical zero".into(),
            ));
        }
        apply_left(&mut work, dim, n, site, &projector);
        apply_right(&mut work, dim, n, site, &projector);
        let inv = T::one() / p_branch;
        for w in &mut work {
            *w *= inv;
        }
    }
    Ok(CoherentConfig::from_unit(directions))
}

/// Exact squared-Husimi integral of the operator behind a decomposition:
/// `int dn/(2 pi)^N P(O, n)^2 = 2^N norm_sq sum_P 3^{-s(P)} c(P)^2`.
pub fn integral_p2_exact<T: Scalar>(dec: &PauliDecomposition<T>) -> T {
    let third = T::one() / T::cst(3.0);
    let mut acc = T::zero();
    for (p, c) in dec.terms() {
        acc += third.powi(p.size() as i32) * *c * *c;
    }
    T::cst((1u64 << dec.n_qubits()) as f64) * dec.norm_sq() * acc
}

/// Uniform directions on every site, the reference measure for reweighted
/// Monte-Carlo integrals.
pub fn uniform_config<T: Scalar, R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> CoherentConfig<T> {
    CoherentConfig::from_unit((0..n_qubits).map(|_| uniform_sphere(rng)).collect())
}

/// Monte-Carlo version of the squared-Husimi integral: uniform sampling with
/// the exact reweighting constant 2^N.
pub fn integral_p2_mc<T: Scalar>(
    op: &HermitianOperator<T>,
    n_samples: u64,
    stream: RngStream,
) -> Result<McEstimate<T>> {
    if n_samples < 100 {
        return Err(Error::InvalidInput(
            "integral_p2_mc needs at least 100 samples".into(),
        ));
    }
    let n = op.n_qubits();
    let weight = T::cst((1u64 << n) as f64);
    let (full, _) = sample_moments(n_samples, stream, |rng: &mut ChaCha8Rng| {
        let config = uniform_config::<T, _>(n, rng);
        let h = husimi_value(op, &config).expect("matching dimensions");
        h * h
    });
    Ok(McEstimate {
        value: weight * full.mean(),
        std_error: weight * full.std_error(),
        n_samples,
    })
}

/// Monte-Carlo estimate of the inverse-Husimi-power integral
/// `K = [int dn/(2 pi)^N P(rho,n)^{-Delta}]^{(alpha-2)/alpha}` with
/// `Delta = 2/(alpha-2)`; equals 2^N for the maximally mixed state.
///
/// For rank-deficient rho the integrand behaves like r^{-2 Delta} near the
/// Husimi zeros (two transverse dimensions), integrable only for Delta < 1,
/// so alpha > 4 is required there.
pub fn k_factor_mc<T: Scalar>(
    rho: &HermitianOperator<T>,
    alpha: T,
    n_samples: u64,
    stream: RngStream,
) -> Result<McEstimate<T>> {
    let two = T::cst(2.0);
    if alpha <= two {
        return Err(Error::InvalidAlpha {
            alpha: alpha.as_f64(),
            reason: "the exponent Delta = 2/(alpha-2) requires alpha > 2".into(),
        });
    }
    if n_samples < 1000 {
        return Err(Error::InvalidInput(
            "k_factor_mc needs at least 1000 samples".into(),
        ));
    }
    if (rho.trace() - T::one()).abs() > T::cst(1e4) * T::unit_tol() {
        return Err(Error::InvalidInput(
            "k_factor_mc expects a unit-trace density matrix".into(),
        ));
    }
    let eig = rho.eigenvalues();
    let min_eig = eig[0];
    if min_eig < -T::cst(1e3) * T::unit_tol() {
        return Err(Error::NegativeProbability {
            p: min_eig.as_f64(),
        });
    }
    let rank_deficient = min_eig < T::cst(1e-10);
    if rank_deficient && alpha <= T::cst(4.0) {
        return Err(Error::InvalidAlpha {
            alpha: alpha.as_f64(),
            reason: "rank-deficient rho: the K integral converges only for alpha > 4".into(),
        });
    }
    let n = rho.n_qubits();
    let delta = two / (alpha - two);
    let floor = T::cst(1e-290);
    let (full, half) = sample_moments(n_samples, stream, |rng: &mut ChaCha8Rng| {
        let config = uniform_config::<T, _>(n, rng);
        let p = husimi_value(rho, &config).expect("matching dimensions");
        p.max(floor).powf(-delta)
    });
    let mean = full.mean();
    let half_mean = half.mean();
    if (half_mean - mean).abs() > T::cst(0.25) * mean.abs().max(floor) {
        return Err(Error::Divergence(format!(
            "half-budget mean {} vs full mean {}; the K integrand looks non-integrable",
            half_mean.as_f64(),
            mean.as_f64()
        )));
    }
    let weight = T::cst((1u64 << n) as f64);
    let exponent = (alpha - two) / alpha;
    let integral = weight * mean;
    let value = integral.powf(exponent);
    let std_error = if mean > T::zero() {
        value * exponent * full.std_error() / mean
    } else {
        T::zero()
    };
    Ok(McEstimate {
        value,
        std_error,
        n_samples,
    })
}

// ---------------------------------------------------------------------------
// Reference quadrature (test support, small N)
// ---------------------------------------------------------------------------

/// Product Gauss-Legendre quadrature over spheres; exact for the low-degree
/// polynomial integrands that appear here. Intended for oracles at N <= 2.
pub mod quadrature {
    use super::*;

    /// Gauss-Legendre nodes and weights on [-1, 1].
    pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
        assert!(n >= 2);
        let mut nodes = Vec::with_capacity(n);
        for i in 0..n {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..100 {
                let (p, dp) = legendre(n, x);
                let dx = p / dp;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes.push((x, w));
        }
        nodes.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        nodes
    }

    fn legendre(n: usize, x: f64) -> (f64, f64) {
        let mut p0 = 1.0;
        let mut p1 = x;
        for k in 2..=n {
            let kf = k as f64;
            let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
            p0 = p1;
            p1 = p2;
        }
        let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
        (p1, dp)
    }

    /// Sphere nodes: Gauss-Legendre in cos(theta) times a uniform azimuth
    /// grid. Weights sum to the sphere area 4 pi.
    pub fn sphere_nodes<T: Scalar>(n_z: usize, n_phi: usize) -> Vec<([T; 3], T)> {
        let gl = gauss_legendre(n_z);
        let dphi = std::f64::consts::TAU / n_phi as f64;
        let mut nodes = Vec::with_capacity(n_z * n_phi);
        for &(z, wz) in &gl {
            let r = (1.0 - z * z).max(0.0).sqrt();
            for k in 0..n_phi {
                let phi = dphi * k as f64;
                nodes.push((
                    [
                        T::cst(r * phi.cos()),
                        T::cst(r * phi.sin()),
                        T::cst(z),
                    ],
                    T::cst(wz * dphi),
                ));
            }
        }
        nodes
    }

    /// `int dn/(2 pi)^N f(n)` over the product of N spheres.
    pub fn integrate<T: Scalar, F>(n_qubits: usize, n_z: usize, n_phi: usize, f: F) -> T
    where
        F: Fn(&CoherentConfig<T>) -> T,
    {
        assert!(n_qubits >= 1 && n_qubits <= 3, "reference grid is for small N");
        let nodes = sphere_nodes::<T>(n_z, n_phi);
        let measure = T::cst(1.0 / std::f64::consts::TAU).powi(n_qubits as i32);
        let mut acc = T::zero();
        let mut idx = vec![0usize; n_qubits];
        loop {
            let mut weight = T::one();
            let mut dirs = Vec::with_capacity(n_qubits);
            for &i in &idx {
                let (d, w) = nodes[i];
                weight *= w;
                dirs.push(d);
            }
            let config = CoherentConfig::from_unit(dirs);
            acc += weight * f(&config);
            // odometer over the product grid
            let mut site = 0;
            loop {
                idx[site] += 1;
                if idx[site] < nodes.len() {
                    break;
                }
                idx[site] = 0;
                site += 1;
                if site == n_qubits {
                    return acc * measure;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::{decompose, matrix_of};
    use crate::qstate::{density_of, make_basis_state, make_ghz, maximally_mixed};
    use approx::assert_abs_diff_eq;

    #[test]
    fn coherent_state_poles_and_equator() {
        let north = CoherentConfig::new(vec![[0.0, 0.0, 1.0]]).unwrap();
        let s = coherent_state(&north);
        assert_abs_diff_eq!(s.amplitude(0).re, 1.0, epsilon = 1e-15);
        assert_eq!(s.amplitude(1).norm(), 0.0);

        let x_axis = CoherentConfig::new(vec![[1.0, 0.0, 0.0]]).unwrap();
        let s = coherent_state(&x_axis);
        let plus = make_ghz::<f64>(1, 0.0).unwrap();
        assert_abs_diff_eq!(s.overlap_sq(&plus).unwrap(), 1.0, epsilon = 1e-12);

        let updown = CoherentConfig::new(vec![[0.0, 0.0, 1.0], [0.0, 0.0, -1.0]]).unwrap();
        let s = coherent_state(&updown);
        let bit01 = make_basis_state::<f64>(&[0, 1]).unwrap();
        assert_abs_diff_eq!(s.overlap_sq(&bit01).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn coherent_state_reproduces_bloch_vector() {
        let mut rng = RngStream::new(21).rng(0);
        for _ in 0..20 {
            let n: [f64; 3] = uniform_sphere(&mut rng);
            let config = CoherentConfig::new(vec![n]).unwrap();
            for (letter, expect) in [("X", n[0]), ("Y", n[1]), ("Z", n[2])] {
                let op = matrix_of::<f64>(&letter.parse().unwrap()).unwrap();
                assert_abs_diff_eq!(husimi_value(&op, &config).unwrap(), expect, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn husimi_value_examples() {
        let zero = density_of(&make_basis_state::<f64>(&[0]).unwrap()).unwrap();
        let mut rng = RngStream::new(22).rng(0);
        for _ in 0..10 {
            let n: [f64; 3] = uniform_sphere(&mut rng);
            let config = CoherentConfig::new(vec![n]).unwrap();
            assert_abs_diff_eq!(
                husimi_value(&zero, &config).unwrap(),
                0.5 * (1.0 + n[2]),
                epsilon = 1e-12
            );
        }
        let mixed = maximally_mixed::<f64>(1).unwrap();
        let config = CoherentConfig::new(vec![[0.6, 0.0, 0.8]]).unwrap();
        assert_abs_diff_eq!(husimi_value(&mixed, &config).unwrap(), 0.5, epsilon = 1e-14);
    }

    #[test]
    fn exact_integral_examples() {
        let z = decompose(&matrix_of::<f64>(&"Z".parse().unwrap()).unwrap()).unwrap();
        assert_abs_diff_eq!(integral_p2_exact(&z), 2.0 / 3.0, epsilon = 1e-14);
        let id = decompose(&matrix_of::<f64>(&"I".parse().unwrap()).unwrap()).unwrap();
        assert_abs_diff_eq!(integral_p2_exact(&id), 2.0, epsilon = 1e-14);
    }

    #[test]
    fn quadrature_reproduces_simple_sphere_integrals() {
        // int dn/2pi n_z^2 = 2/3; int dn/2pi 1 = 2.
        let nz2: f64 = quadrature::integrate(1, 16, 16, |c: &CoherentConfig<f64>| {
            let z = c.direction(0)[2];
            z * z
        });
        assert_abs_diff_eq!(nz2, 2.0 / 3.0, epsilon = 1e-12);
        let one: f64 = quadrature::integrate(1, 16, 16, |_| 1.0);
        assert_abs_diff_eq!(one, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn exact_integral_matches_quadrature_for_ghz() {
        let rho = density_of(&make_ghz::<f64>(2, 0.0).unwrap()).unwrap();
        let dec = decompose(&rho).unwrap();
        let exact = integral_p2_exact(&dec);
        let quad: f64 = quadrature::integrate(2, 12, 12, |c: &CoherentConfig<f64>| {
            let h = husimi_value(&rho, c).unwrap();
            h * h
        });
        assert_abs_diff_eq!(exact, quad, epsilon = 1e-10);
    }

    #[test]
    fn mc_integral_agrees_with_exact() {
        let z = matrix_of::<f64>(&"Z".parse().unwrap()).unwrap();
        let est = integral_p2_mc(&z, 100_000, RngStream::new(5)).unwrap();
        assert!((est.value - 2.0 / 3.0).abs() < 3.0 * est.std_error);
        assert!(est.std_error < 5e-3);
        assert!(integral_p2_mc(&z, 10, RngStream::new(5)).is_err());
    }

    #[test]
    fn sampler_mean_nz_for_basis_state() {
        let rho = density_of(&make_basis_state::<f64>(&[0]).unwrap()).unwrap();
        let n = 100_000u64;
        let (m, _) = sample_moments(n, RngStream::new(6), |rng: &mut ChaCha8Rng| {
            sample_config(&rho, rng).unwrap().direction(0)[2]
        });
        // E[n_z] = int dn/2pi (1+n_z)/2 n_z = 1/3
        assert!((m.mean() - 1.0 / 3.0).abs() < 3.0 * m.std_error());
    }

    #[test]
    fn sampler_is_uniform_for_maximally_mixed() {
        let rho = maximally_mixed::<f64>(2).unwrap();
        let n = 50_000u64;
        for site in 0..2 {
            for axis in 0..3 {
                let (m, _) = sample_moments(n, RngStream::new(7 + axis as u64), |rng: &mut ChaCha8Rng| {
                    sample_config(&rho, rng).unwrap().direction(site)[axis]
                });
                assert!(
                    m.mean().abs() < 3.5 * m.std_error(),
                    "site {site} axis {axis}: mean {} se {}",
                    m.mean(),
                    m.std_error()
                );
            }
        }
    }

    #[test]
    fn sampler_ghz_zz_correlation() {
        let rho = density_of(&make_ghz::<f64>(2, 0.0).unwrap()).unwrap();
        let n = 100_000u64;
        let (m, _) = sample_moments(n, RngStream::new(8), |rng: &mut ChaCha8Rng| {
            let c = sample_config(&rho, rng).unwrap();
            c.direction(0)[2] * c.direction(1)[2]
        });
        // E[nz nz] = (1/3)^2 tr[ZZ rho] = 1/9, cross-checked by quadrature
        let quad: f64 = quadrature::integrate(2, 12, 12, |c: &CoherentConfig<f64>| {
            husimi_value(&rho, c).unwrap() * c.direction(0)[2] * c.direction(1)[2]
        });
        assert_abs_diff_eq!(quad, 1.0 / 9.0, epsilon = 1e-10);
        assert!((m.mean() - quad).abs() < 3.0 * m.std_error());
    }

    #[test]
    fn k_factor_examples() {
        let est = k_factor_mc(
            &maximally_mixed::<f64>(1).unwrap(),
            6.0,
            10_000,
            RngStream::new(9),
        )
        .unwrap();
        assert_abs_diff_eq!(est.value, 2.0, epsilon = 1e-9);

        let est = k_factor_mc(
            &maximally_mixed::<f64>(2).unwrap(),
            8.0,
            10_000,
            RngStream::new(10),
        )
        .unwrap();
        assert_abs_diff_eq!(est.value, 4.0, epsilon = 1e-9);
    }

    #[test]
    fn k_factor_alpha_guards() {
        let mixed = maximally_mixed::<f64>(1).unwrap();
        assert!(matches!(
            k_factor_mc(&mixed, 2.0, 10_000, RngStream::new(1)),
            Err(Error::InvalidAlpha { .. })
        ));
        let pure = density_of(&make_basis_state::<f64>(&[0]).unwrap()).unwrap();
        assert!(matches!(
            k_factor_mc(&pure, 3.0, 10_000, RngStream::new(1)),
            Err(Error::InvalidAlpha { .. })
        ));
        // alpha = 6 > 4 converges for a pure state
        let est = k_factor_mc(&pure, 6.0, 200_000, RngStream::new(2)).unwrap();
        assert!(est.value >= 2.0 - 3.0 * est.std_error);
    }

    #[test]
    fn negative_probability_detected() {
        // trace-1 Hermitian matrix that is not PSD
        let data = vec![
            c_re(1.5),
            c_zero(),
            c_zero(),
            c_re(-0.5),
        ];
        let bad = HermitianOperator::new(1, data).unwrap();
        let mut hits = 0;
        let mut rng = RngStream::new(11).rng(0);
        for _ in 0..200 {
            if matches!(
                sample_config(&bad, &mut rng),
                Err(Error::NegativeProbability { .. })
            ) {
                hits += 1;
            }
        }
        assert!(hits > 0, "negative Born probabilities must be flagged");
    }
}
