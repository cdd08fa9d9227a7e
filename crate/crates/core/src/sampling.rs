//! Primitive random draws: sphere points, complex Gaussians, Haar SU(2).
//!
//! All draws consume `f64` uniforms and convert at the end, so a given seed
//! produces the same sample sequence at every scalar precision.

use num_complex::Complex;
use rand::Rng;

use crate::scalar::{Scalar, C};

/// Uniform point on the unit sphere: z uniform in [-1, 1], azimuth uniform.
pub fn uniform_sphere<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> [T; 3] {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    [
        T::cst(r * phi.cos()),
        T::cst(r * phi.sin()),
        T::cst(z),
    ]
}

/// Pair of independent standard normals (Box-Muller).
fn standard_normal_pair<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let u1: f64 = loop {
        let u = rng.gen::<f64>();
        if u > 0.0 {
            break u;
        }
    };
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = std::f64::consts::TAU * u2;
    (r * theta.cos(), r * theta.sin())
}

/// Complex number with independent standard-normal real and imaginary parts.
pub fn complex_gaussian<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> C<T> {
    let (re, im) = standard_normal_pair(rng);
    Complex::new(T::cst(re), T::cst(im))
}

/// Haar-random 2x2 unitary in row-major layout `u[row][col]`.
///
/// Gram-Schmidt on a complex Ginibre matrix with the R-diagonal kept
/// positive real, which is the phase convention that makes Q exactly
/// Haar-distributed.
pub fn haar_unitary_2x2<T: Scalar, R: Rng + ?Sized>(rng: &mut R) -> [[C<T>; 2]; 2] {
    loop {
        let g: [C<f64>; 4] = [
            complex_gaussian(rng),
            complex_gaussian(rng),
            complex_gaussian(rng),
            complex_gaussian(rng),
        ];
        let n0 = (g[0].norm_sqr() + g[2].norm_sqr()).sqrt();
        if n0 < 1e-154 {
            continue;
        }
        let q0 = [g[0] / n0, g[2] / n0];
        let proj = q0[0].conj() * g[1] + q0[1].conj() * g[3];
        let w = [g[1] - q0[0] * proj, g[3] - q0[1] * proj];
        let n1 = (w[0].norm_sqr() + w[1].norm_sqr()).sqrt();
        if n1 < 1e-154 {
            continue;
        }
        let q1 = [w[0] / n1, w[1] / n1];
        let cvt = |z: C<f64>| Complex::new(T::cst(z.re), T::cst(z.im));
        return [[cvt(q0[0]), cvt(q1[0])], [cvt(q0[1]), cvt(q1[1])]];
    }
}

/// Conjugate transpose of a row-major 2x2.
pub fn dagger_2x2<T: Scalar>(u: &[[C<T>; 2]; 2]) -> [[C<T>; 2]; 2] {
    [
        [u[0][0].conj(), u[1][0].conj()],
        [u[0][1].conj(), u[1][1].conj()],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stream::RngStream;

    #[test]
    fn sphere_points_are_unit() {
        let mut rng = RngStream::new(3).rng(0);
        for _ in 0..100 {
            let [x, y, z]: [f64; 3] = uniform_sphere(&mut rng);
            assert!((x * x + y * y + z * z - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn sphere_mean_vanishes() {
        let mut rng = RngStream::new(4).rng(0);
        let n = 200_000;
        let mut sum = [0.0f64; 3];
        for _ in 0..n {
            let p: [f64; 3] = uniform_sphere(&mut rng);
            for (s, v) in sum.iter_mut().zip(p) {
                *s += v;
            }
        }
        for s in sum {
            // component std dev is 1/sqrt(3)
            assert!((s / n as f64).abs() < 4.0 / (3.0f64 * n as f64).sqrt());
        }
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let mut rng = RngStream::new(5).rng(0);
        for _ in 0..50 {
            let u: [[C<f64>; 2]; 2] = haar_unitary_2x2(&mut rng);
            let dot00 = u[0][0].norm_sqr() + u[0][1].norm_sqr();
            let dot11 = u[1][0].norm_sqr() + u[1][1].norm_sqr();
            let dot01 = u[0][0].conj() * u[1][0] + u[0][1].conj() * u[1][1];
            assert!((dot00 - 1.0).abs() < 1e-12);
            assert!((dot11 - 1.0).abs() < 1e-12);
            assert!(dot01.norm() < 1e-12);
        }
    }

    #[test]
    fn haar_unitary_first_column_covers_bloch_sphere() {
        // E[|u00|^2] = 1/2 for Haar SU(2) columns.
        let mut rng = RngStream::new(6).rng(0);
        let n = 50_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let u: [[C<f64>; 2]; 2] = haar_unitary_2x2(&mut rng);
            acc += u[0][0].norm_sqr();
        }
        assert!((acc / n as f64 - 0.5).abs() < 0.01);
    }
}
