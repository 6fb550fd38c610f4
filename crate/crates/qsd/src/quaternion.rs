//! Quaternion arithmetic and the bijection with 2x2 complex blocks.
//!
//! A quaternion `q = a*I + b*i1 + c*i2 + d*i3` is stored as its real
//! coefficient 4-tuple. Its complex image is
//!
//! ```text
//! [ a+bi   c+di ]
//! [ -c+di  a-bi ]
//! ```
//!
//! and the basis satisfies `i1^2 = i2^2 = i3^2 = -I`, `i3 = i1*i2 = -i2*i1`
//! (cyclically). All operations are pure functions on immutable values.

use num_complex::Complex64;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

/// Default absolute tolerance for the quaternion-image structure check.
pub const STRUCTURE_TOL: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum QuaternionError {
    /// The 2x2 block does not satisfy the quaternion-image constraints
    /// `m21 = -conj(m12)`, `m22 = conj(m11)` within tolerance.
    #[error("block is not a quaternion image (residual {residual:.3e} > tol {tol:.3e})")]
    StructureViolation { residual: f64, tol: f64 },
}

/// A quaternion in coefficient form.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

/// A 2x2 complex matrix in row-major order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexBlock2 {
    pub entries: [Complex64; 4],
}

impl Quaternion {
    pub const fn new(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self { a, b, c, d }
    }

    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I1: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const I2: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const I3: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    /// A real scalar quaternion `t*I`.
    pub const fn scalar(t: f64) -> Self {
        Self::new(t, 0.0, 0.0, 0.0)
    }

    /// True when the imaginary coefficients vanish exactly.
    pub fn is_scalar(&self) -> bool {
        self.b == 0.0 && self.c == 0.0 && self.d == 0.0
    }

    /// Quaternion conjugate `(a, -b, -c, -d)`.
    pub fn conj(&self) -> Self {
        Self::new(self.a, -self.b, -self.c, -self.d)
    }

    /// Euclidean norm of the coefficient 4-tuple.
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn norm_sq(&self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c + self.d * self.d
    }

    /// First row of the block image: `alpha = a + bi`.
    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.a, self.b)
    }

    /// Second entry of the first row: `beta = c + di`.
    pub fn beta(&self) -> Complex64 {
        Complex64::new(self.c, self.d)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    /// The 2x2 complex image of this quaternion.
    pub fn to_block(&self) -> ComplexBlock2 {
        ComplexBlock2 {
            entries: [
                self.alpha(),
                self.beta(),
                -self.beta().conj(),
                self.alpha().conj(),
            ],
        }
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    fn mul(self, q: Quaternion) -> Quaternion {
        let p = self;
        Quaternion::new(
            p.a * q.a - p.b * q.b - p.c * q.c - p.d * q.d,
            p.a * q.b + p.b * q.a + p.c * q.d - p.d * q.c,
            p.a * q.c - p.b * q.d + p.c * q.a + p.d * q.b,
            p.a * q.d + p.b * q.c - p.c * q.b + p.d * q.a,
        )
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, q: Quaternion) -> Quaternion {
        Quaternion::new(self.a + q.a, self.b + q.b, self.c + q.c, self.d + q.d)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, q: Quaternion) -> Quaternion {
        Quaternion::new(self.a - q.a, self.b - q.b, self.c - q.c, self.d - q.d)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        Quaternion::new(-self.a, -self.b, -self.c, -self.d)
    }
}

/// Quaternion product; block image equals the product of block images.
pub fn qmul(p: Quaternion, q: Quaternion) -> Quaternion {
    p * q
}

/// Quaternion conjugate.
pub fn qconj(q: Quaternion) -> Quaternion {
    q.conj()
}

/// Quaternion norm.
pub fn qnorm(q: Quaternion) -> f64 {
    q.norm()
}

/// The 2x2 complex image of `q`.
pub fn quat_to_block(q: Quaternion) -> ComplexBlock2 {
    q.to_block()
}

/// Inverse of the embedding. Fails with `StructureViolation` when the block
/// is not a quaternion image within `tol`.
pub fn block_to_quat(m: &ComplexBlock2, tol: f64) -> Result<Quaternion, QuaternionError> {
    let residual = m.structure_residual();
    if residual > tol {
        return Err(QuaternionError::StructureViolation { residual, tol });
    }
    let alpha = m.entries[0];
    let beta = m.entries[1];
    Ok(Quaternion::new(alpha.re, alpha.im, beta.re, beta.im))
}

impl ComplexBlock2 {
    pub fn new(m11: Complex64, m12: Complex64, m21: Complex64, m22: Complex64) -> Self {
        Self {
            entries: [m11, m12, m21, m22],
        }
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[2 * row + col]
    }

    /// Max deviation from the quaternion-image constraints.
    pub fn structure_residual(&self) -> f64 {
        let r1 = (self.entries[2] + self.entries[1].conj()).norm();
        let r2 = (self.entries[3] - self.entries[0].conj()).norm();
        r1.max(r2)
    }

    pub fn matmul(&self, rhs: &ComplexBlock2) -> ComplexBlock2 {
        let a = &self.entries;
        let b = &rhs.entries;
        ComplexBlock2 {
            entries: [
                a[0] * b[0] + a[1] * b[2],
                a[0] * b[1] + a[1] * b[3],
                a[2] * b[0] + a[3] * b[2],
                a[2] * b[1] + a[3] * b[3],
            ],
        }
    }

    pub fn max_abs_diff(&self, rhs: &ComplexBlock2) -> f64 {
        self.entries
            .iter()
            .zip(rhs.entries.iter())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn random_quat(rng: &mut impl Rng) -> Quaternion {
        Quaternion::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        )
    }

    #[test]
    fn basis_multiplication_table() {
        let e = Quaternion::ONE;
        let (i1, i2, i3) = (Quaternion::I1, Quaternion::I2, Quaternion::I3);
        assert_eq!(i1 * i1, -e);
        assert_eq!(i2 * i2, -e);
        assert_eq!(i3 * i3, -e);
        assert_eq!(i1 * i2, i3);
        assert_eq!(i2 * i1, -i3);
        assert_eq!(i2 * i3, i1);
        assert_eq!(i3 * i2, -i1);
        assert_eq!(i3 * i1, i2);
        assert_eq!(i1 * i3, -i2);
    }

    #[test]
    fn identity_and_conjugate_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let q = random_quat(&mut rng);
        assert_eq!(qmul(q, Quaternion::ONE), q);
        // q * conj(q) = ||q||^2 * I, expanded symbolically; check numerically.
        let p = qmul(q, qconj(q));
        assert!((p.a - q.norm_sq()).abs() < 1e-14);
        assert!(p.b.abs() < 1e-14 && p.c.abs() < 1e-14 && p.d.abs() < 1e-14);
        // (1,1,0,0) * (1,-1,0,0) = (2,0,0,0)
        let r = qmul(Quaternion::new(1.0, 1.0, 0.0, 0.0), Quaternion::new(1.0, -1.0, 0.0, 0.0));
        assert_eq!(r, Quaternion::scalar(2.0));
    }

    #[test]
    fn conjugate_is_involution_and_flips_signs() {
        assert_eq!(qconj(Quaternion::I1), -Quaternion::I1);
        let q = Quaternion::new(0.3, -1.2, 4.5, -0.7);
        assert_eq!(qconj(qconj(q)), q);
    }

    #[test]
    fn norm_values_and_multiplicativity() {
        assert_eq!(qnorm(Quaternion::new(1.0, 1.0, 1.0, 1.0)), 2.0);
        assert_eq!(qnorm(Quaternion::ZERO), 0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..500 {
            let p = random_quat(&mut rng);
            let q = random_quat(&mut rng);
            assert!((qnorm(qmul(p, q)) - qnorm(p) * qnorm(q)).abs() < 1e-12);
        }
        // norm agrees with the block image: |alpha|^2 + |beta|^2
        let q = Quaternion::new(0.1, 0.2, 0.3, 0.4);
        let block_norm = (q.alpha().norm_sqr() + q.beta().norm_sqr()).sqrt();
        assert!((qnorm(q) - block_norm).abs() < 1e-15);
    }

    #[test]
    fn block_images_of_basis() {
        let i = Complex64::i();
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        assert_eq!(
            quat_to_block(Quaternion::ONE),
            ComplexBlock2::new(one, zero, zero, one)
        );
        assert_eq!(
            quat_to_block(Quaternion::I1),
            ComplexBlock2::new(i, zero, zero, -i)
        );
        assert_eq!(
            quat_to_block(Quaternion::I2),
            ComplexBlock2::new(zero, one, -one, zero)
        );
        assert_eq!(
            quat_to_block(Quaternion::I3),
            ComplexBlock2::new(zero, i, i, zero)
        );
    }

    #[test]
    fn block_round_trip_and_structure_violation() {
        let i = Complex64::i();
        let zero = Complex64::new(0.0, 0.0);
        let m = ComplexBlock2::new(i, zero, zero, -i);
        assert_eq!(block_to_quat(&m, STRUCTURE_TOL).unwrap(), Quaternion::I1);

        let m = ComplexBlock2::new(Complex64::new(2.0, 0.0), zero, zero, Complex64::new(2.0, 0.0));
        assert_eq!(block_to_quat(&m, STRUCTURE_TOL).unwrap(), Quaternion::scalar(2.0));

        let one = Complex64::new(1.0, 0.0);
        let bad = ComplexBlock2::new(zero, one, one, zero);
        assert!(matches!(
            block_to_quat(&bad, STRUCTURE_TOL),
            Err(QuaternionError::StructureViolation { .. })
        ));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let q = random_quat(&mut rng);
            assert_eq!(block_to_quat(&q.to_block(), STRUCTURE_TOL).unwrap(), q);
        }
    }

    #[test]
    fn block_product_matches_quaternion_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..1000 {
            let p = random_quat(&mut rng);
            let q = random_quat(&mut rng);
            let lhs = quat_to_block(qmul(p, q));
            let rhs = quat_to_block(p).matmul(&quat_to_block(q));
            assert!(lhs.max_abs_diff(&rhs) <= 1e-14 * (1.0 + p.norm() * q.norm()));
        }
    }
}
