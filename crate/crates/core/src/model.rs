//! The metric model of the 3-sphere on `C^2` with a Hermitian form whose
//! off-diagonal entry is the real parameter `λ`.
//!
//! Points are row vectors `(z1, z2)` and linear maps act on the right,
//! `P ↦ P·M`, so a word `W1 W2 … Wk` applies `W1` first.

use std::fmt;
use std::ops::{Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Tolerance used by residual checks when the caller does not pick one.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Largest admissible `|λ|`; the form loses definiteness at `±1`.
pub const LAMBDA_LIMIT: f64 = 1.0 - 1e-12;

/// How far an inner product may stray outside `[-1, 1]` and still be
/// treated as round-off.
pub const CLAMP_SLACK: f64 = 1e-9;

/// How far the λ-norm of a point may stray from 1 and still count as
/// normalized.
pub const NORM_TOL: f64 = 1e-9;

/// The off-diagonal entry `λ` of the Hermitian form `[[1, λ], [λ, 1]]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ModelParameter(f64);

impl ModelParameter {
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda.is_finite() && lambda.abs() < LAMBDA_LIMIT {
            Ok(Self(lambda))
        } else {
            Err(Error::InvalidLambda(lambda))
        }
    }

    /// Skips the definiteness check. Used by forced (diagnostic)
    /// constructions outside the sphericity domain; anything computed with
    /// an indefinite form is meaningless as geometry.
    pub fn new_unchecked(lambda: f64) -> Self {
        Self(lambda)
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_definite(self) -> bool {
        self.0.abs() < LAMBDA_LIMIT
    }

    /// The Gram matrix `ℋ` of the form.
    pub fn form(self) -> Isometry {
        let l = Complex::new(self.0, 0.0);
        Isometry::new(Complex::ONE, l, l, Complex::ONE)
    }
}

impl fmt::Display for ModelParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// A point of `C^2` viewed as a real 4-space. Points of the model sphere
/// are those of unit λ-norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    pub z1: Complex,
    pub z2: Complex,
}

impl ModelPoint {
    pub const fn new(z1: Complex, z2: Complex) -> Self {
        Self { z1, z2 }
    }

    pub fn from_real(z1: f64, z2: f64) -> Self {
        Self::new(Complex::new(z1, 0.0), Complex::new(z2, 0.0))
    }

    /// `(1, 0)`, a point of the fixed circle of `A`.
    pub fn e1() -> Self {
        Self::from_real(1.0, 0.0)
    }

    /// `(0, 1)`, a point of the fixed circle of `B`.
    pub fn e2() -> Self {
        Self::from_real(0.0, 1.0)
    }

    /// Right action `P·M`.
    pub fn apply(&self, m: &Isometry) -> Self {
        Self {
            z1: self.z1 * m.m11 + self.z2 * m.m21,
            z2: self.z1 * m.m12 + self.z2 * m.m22,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::new(self.z1 * s, self.z2 * s)
    }

    /// Coordinates `(Re z1, Im z1, Re z2, Im z2)`.
    pub fn to_real4(&self) -> [f64; 4] {
        [self.z1.re, self.z1.im, self.z2.re, self.z2.im]
    }

    /// The λ-norm `|z1|² + |z2|² + λ(z1 z̄2 + z̄1 z2)`.
    pub fn norm(&self, lambda: ModelParameter) -> f64 {
        inner_product(self, self, lambda)
    }

    /// Largest coordinate difference, for approximate comparisons.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.z1 - other.z1).norm().max((self.z2 - other.z2).norm())
    }
}

/// A 2×2 complex matrix acting on row vectors from the right. The name
/// reflects its use; [`is_isometry`] decides whether a given matrix
/// actually preserves the form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Isometry {
    pub m11: Complex,
    pub m12: Complex,
    pub m21: Complex,
    pub m22: Complex,
}

impl Isometry {
    pub const fn new(m11: Complex, m12: Complex, m21: Complex, m22: Complex) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub fn identity() -> Self {
        Self::new(Complex::ONE, Complex::ZERO, Complex::ZERO, Complex::ONE)
    }

    pub fn diag(a: Complex, d: Complex) -> Self {
        Self::new(a, Complex::ZERO, Complex::ZERO, d)
    }

    pub fn det(&self) -> Complex {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn trace(&self) -> Complex {
        self.m11 + self.m22
    }

    /// `conj(M)ᵀ`.
    pub fn adjoint(&self) -> Self {
        Self::new(
            self.m11.conj(),
            self.m21.conj(),
            self.m12.conj(),
            self.m22.conj(),
        )
    }

    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d.norm() == 0.0 {
            return None;
        }
        Some(Self::new(self.m22 / d, -self.m12 / d, -self.m21 / d, self.m11 / d))
    }

    pub fn scale(&self, s: Complex) -> Self {
        Self::new(self.m11 * s, self.m12 * s, self.m21 * s, self.m22 * s)
    }

    /// `M^k` by repeated multiplication.
    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::identity(), |acc, _| acc * *self)
    }

    pub fn entries(&self) -> [Complex; 4] {
        [self.m11, self.m12, self.m21, self.m22]
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.entries().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

impl Mul for Isometry {
    type Output = Isometry;

    fn mul(self, r: Isometry) -> Isometry {
        Isometry::new(
            self.m11 * r.m11 + self.m12 * r.m21,
            self.m11 * r.m12 + self.m12 * r.m22,
            self.m21 * r.m11 + self.m22 * r.m21,
            self.m21 * r.m12 + self.m22 * r.m22,
        )
    }
}

impl Sub for Isometry {
    type Output = Isometry;

    fn sub(self, r: Isometry) -> Isometry {
        Isometry::new(
            self.m11 - r.m11,
            self.m12 - r.m12,
            self.m21 - r.m21,
            self.m22 - r.m22,
        )
    }
}

/// A point of the round unit sphere `|ξ1|² + |ξ2|² = 1` in `C^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EmbeddedPoint {
    pub xi1: Complex,
    pub xi2: Complex,
}

impl EmbeddedPoint {
    pub fn to_real4(&self) -> [f64; 4] {
        [self.xi1.re, self.xi1.im, self.xi2.re, self.xi2.im]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.xi1.norm_sqr() + self.xi2.norm_sqr()
    }

    /// Round-sphere angle to `other`, both assumed on the unit sphere.
    pub fn angle_to(&self, other: &Self) -> f64 {
        let dot = dot4(&self.to_real4(), &other.to_real4());
        dot.clamp(-1.0, 1.0).acos()
    }
}

/// Result of an isometry test: the verdict together with the residual it
/// was decided on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsometryCheck {
    pub is_isometry: bool,
    pub residual: f64,
}

/// `P ℋ conj(Q)ᵀ`.
pub fn hermitian_product(p: &ModelPoint, q: &ModelPoint, lambda: ModelParameter) -> Complex {
    let l = lambda.value();
    p.z1 * q.z1.conj() + p.z2 * q.z2.conj() + (p.z1 * q.z2.conj() + p.z2 * q.z1.conj()) * l
}

pub fn inner_product(p: &ModelPoint, q: &ModelPoint, lambda: ModelParameter) -> f64 {
    hermitian_product(p, q, lambda).re
}

/// Spherical distance in `[0, π]` between two normalized points.
pub fn distance(p: &ModelPoint, q: &ModelPoint, lambda: ModelParameter) -> Result<f64> {
    ensure_normalized(p, lambda)?;
    ensure_normalized(q, lambda)?;
    clamped_acos(inner_product(p, q, lambda))
}

/// `arccos` that absorbs round-off just outside `[-1, 1]` and rejects
/// anything further out.
pub fn clamped_acos(c: f64) -> Result<f64> {
    if !c.is_finite() || c.abs() > 1.0 + CLAMP_SLACK {
        return Err(Error::InnerProductOutOfRange(c));
    }
    Ok(c.clamp(-1.0, 1.0).acos())
}

pub fn ensure_normalized(p: &ModelPoint, lambda: ModelParameter) -> Result<()> {
    let norm = p.norm(lambda);
    if (norm - 1.0).abs() > NORM_TOL || !norm.is_finite() {
        return Err(Error::NotNormalized { norm });
    }
    Ok(())
}

/// Checks `M ℋ conj(M)ᵀ = ℋ` entrywise.
pub fn is_isometry(m: &Isometry, lambda: ModelParameter, tol: f64) -> IsometryCheck {
    let h = lambda.form();
    let residual = (*m * h * m.adjoint() - h).max_abs();
    IsometryCheck {
        is_isometry: residual <= tol,
        residual,
    }
}

/// Maps the model sphere isometrically onto the round unit sphere.
pub fn embed(p: &ModelPoint, lambda: ModelParameter) -> EmbeddedPoint {
    let l = lambda.value();
    let a = ((1.0 + l) / 2.0).sqrt();
    let b = ((1.0 - l) / 2.0).sqrt();
    EmbeddedPoint {
        xi1: (p.z1 + p.z2) * a,
        xi2: (p.z1 - p.z2) * b,
    }
}

/// Determinant of the 4×4 real matrix whose rows are the raw coordinates
/// `(Re z1, Im z1, Re z2, Im z2)` of the four points, in argument order.
pub fn gram_det(a: &ModelPoint, b: &ModelPoint, c: &ModelPoint, d: &ModelPoint) -> f64 {
    det4([a.to_real4(), b.to_real4(), c.to_real4(), d.to_real4()])
}

/// Positive rescaling to unit λ-norm.
pub fn normalize(p: &ModelPoint, lambda: ModelParameter) -> Result<ModelPoint> {
    let norm = p.norm(lambda);
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::ZeroNorm);
    }
    Ok(p.scale(1.0 / norm.sqrt()))
}

pub(crate) fn dot4(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// LU with partial pivoting.
pub(crate) fn det4(mut m: [[f64; 4]; 4]) -> f64 {
    let mut det = 1.0;
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap_or(col);
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        for row in col + 1..4 {
            let f = m[row][col] / m[col][col];
            for k in col..4 {
                m[row][k] -= f * m[col][k];
            }
        }
    }
    det
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn lam(l: f64) -> ModelParameter {
        ModelParameter::new(l).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn hermitian_product_examples() {
        let p = ModelPoint::e1();
        let q = ModelPoint::e2();
        assert_eq!(hermitian_product(&p, &q, lam(0.5)), c(0.5, 0.0));
        assert_eq!(hermitian_product(&p, &p, lam(-0.7)), c(1.0, 0.0));
        let pi = ModelPoint::new(c(0.0, 1.0), c(0.0, 0.0));
        let h = hermitian_product(&pi, &q, lam(0.3));
        assert_abs_diff_eq!(h.re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h.im, 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(inner_product(&pi, &q, lam(0.3)), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn distance_examples() {
        let p = ModelPoint::e1();
        let q = ModelPoint::e2();
        for l in [-0.9, -0.2, 0.0, 0.5, 0.95] {
            assert_abs_diff_eq!(distance(&p, &q, lam(l)).unwrap(), l.acos(), epsilon = 1e-15);
        }
        assert_eq!(distance(&p, &p, lam(0.4)).unwrap(), 0.0);
        let antipode = ModelPoint::from_real(-1.0, 0.0);
        assert_abs_diff_eq!(distance(&p, &antipode, lam(0.5)).unwrap(), PI, epsilon = 1e-15);
    }

    #[test]
    fn distance_rejects_unnormalized() {
        let p = ModelPoint::from_real(2.0, 0.0);
        assert!(matches!(
            distance(&p, &ModelPoint::e1(), lam(0.1)),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn clamp_rejects_far_out_of_range() {
        assert_eq!(clamped_acos(1.0 + 1e-12).unwrap(), 0.0);
        assert!(clamped_acos(1.0 + 1e-6).is_err());
    }

    #[test]
    fn lambda_range() {
        assert!(ModelParameter::new(0.999).is_ok());
        assert!(ModelParameter::new(1.0).is_err());
        assert!(ModelParameter::new(-1.0 + 1e-13).is_err());
        assert!(ModelParameter::new(f64::NAN).is_err());
    }

    #[test]
    fn isometry_examples() {
        let id = is_isometry(&Isometry::identity(), lam(0.3), DEFAULT_TOL);
        assert!(id.is_isometry);
        assert_eq!(id.residual, 0.0);
        let scaling = Isometry::diag(c(2.0, 0.0), c(1.0, 0.0));
        assert!(!is_isometry(&scaling, lam(0.3), DEFAULT_TOL).is_isometry);
    }

    #[test]
    fn embed_examples() {
        let e = embed(&ModelPoint::e1(), lam(0.0));
        assert_abs_diff_eq!(e.xi1.re, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(e.xi2.re, 0.5f64.sqrt(), epsilon = 1e-15);
        let l = lam(0.5);
        let (p, q) = (ModelPoint::e1(), ModelPoint::e2());
        assert_abs_diff_eq!(distance(&p, &q, l).unwrap(), PI / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(embed(&p, l).angle_to(&embed(&q, l)), PI / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(embed(&p, l).norm_sqr(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn gram_det_examples() {
        let a = ModelPoint::e1();
        let b = ModelPoint::new(c(0.0, 1.0), c(0.0, 0.0));
        let cc = ModelPoint::e2();
        let d = ModelPoint::new(c(0.0, 0.0), c(0.0, 1.0));
        assert_eq!(gram_det(&a, &b, &cc, &d), 1.0);
        assert_eq!(gram_det(&a, &b, &a, &d), 0.0);
        // one transposition of rows
        assert_eq!(gram_det(&a, &cc, &b, &d), -1.0);
    }

    #[test]
    fn normalize_examples() {
        let l = lam(0.8);
        assert_eq!(normalize(&ModelPoint::from_real(2.0, 0.0), l).unwrap(), ModelPoint::e1());
        let p = normalize(&ModelPoint::from_real(1.0, 1.0), lam(0.0)).unwrap();
        assert_abs_diff_eq!(p.z1.re, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(p.z2.re, 0.5f64.sqrt(), epsilon = 1e-15);
        let again = normalize(&p, lam(0.0)).unwrap();
        assert!(again.max_abs_diff(&p) < 1e-15);
        assert_eq!(
            normalize(&ModelPoint::from_real(0.0, 0.0), l),
            Err(Error::ZeroNorm)
        );
    }

    #[test]
    fn det4_matches_permutation_expansion() {
        // Leibniz expansion as an independent route.
        fn leibniz(m: &[[f64; 4]; 4]) -> f64 {
            let mut total = 0.0;
            let idx = [0usize, 1, 2, 3];
            let mut perms = Vec::new();
            fn permute(v: &mut Vec<usize>, k: usize, out: &mut Vec<Vec<usize>>) {
                if k == v.len() {
                    out.push(v.clone());
                    return;
                }
                for i in k..v.len() {
                    v.swap(k, i);
                    permute(v, k + 1, out);
                    v.swap(k, i);
                }
            }
            permute(&mut idx.to_vec(), 0, &mut perms);
            for p in perms {
                let mut inversions = 0;
                for i in 0..4 {
                    for j in i + 1..4 {
                        if p[i] > p[j] {
                            inversions += 1;
                        }
                    }
                }
                let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
                total += sign * (0..4).map(|r| m[r][p[r]]).product::<f64>();
            }
            total
        }
        let m = [
            [0.3, -1.2, 2.0, 0.5],
            [1.1, 0.0, -0.7, 0.2],
            [-0.4, 0.9, 0.6, 1.5],
            [2.2, 0.1, -0.3, -1.0],
        ];
        assert_abs_diff_eq!(det4(m), leibniz(&m), epsilon = 1e-13);
    }
}
