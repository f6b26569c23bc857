//! Holonomy generators of the knot and link groups and the numerical
//! checks of their defining relations.
//!
//! For the knot `t(2n+1, 2)` the group is `<a, b | (ab)^n a = b (ab)^n>`;
//! for the link `t(2n, 2)` it is `<a, b | (ab)^n = (ba)^n>`. Both send
//! `a ↦ A`, `b ↦ B` with the rotation matrices built here.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::chebyshev::eval_u;
use crate::cone::{epsilon_aux, knot_lambda};
use crate::error::{Error, Result};
use crate::model::{Complex, Isometry, ModelParameter};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnotGeneratorPair {
    pub a: Isometry,
    pub b: Isometry,
    pub alpha: f64,
    pub lambda: ModelParameter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkGeneratorPair {
    pub a: Isometry,
    pub b: Isometry,
    pub alpha: f64,
    pub beta: f64,
    pub lambda: ModelParameter,
}

/// The pair of generators seen uniformly, so polyhedron code can treat
/// knots and links alike.
pub trait Generators {
    fn a(&self) -> &Isometry;
    fn b(&self) -> &Isometry;
    fn lambda(&self) -> ModelParameter;
    /// Cone angles carried by `A` and `B`.
    fn angles(&self) -> (f64, f64);
}

impl Generators for KnotGeneratorPair {
    fn a(&self) -> &Isometry {
        &self.a
    }
    fn b(&self) -> &Isometry {
        &self.b
    }
    fn lambda(&self) -> ModelParameter {
        self.lambda
    }
    fn angles(&self) -> (f64, f64) {
        (self.alpha, self.alpha)
    }
}

impl Generators for LinkGeneratorPair {
    fn a(&self) -> &Isometry {
        &self.a
    }
    fn b(&self) -> &Isometry {
        &self.b
    }
    fn lambda(&self) -> ModelParameter {
        self.lambda
    }
    fn angles(&self) -> (f64, f64) {
        (self.alpha, self.beta)
    }
}

/// Off-diagonal entry `-2i e^{iθ/2} λ sin(θ/2)` shared by both generators.
fn shear(angle: f64, lambda: f64) -> Complex {
    Complex::new(0.0, -2.0) * Complex::from_polar(1.0, angle / 2.0) * (lambda * (angle / 2.0).sin())
}

/// Rotation about the circle `{(z, 0)}` by `angle`.
pub fn generator_a(angle: f64, lambda: ModelParameter) -> Isometry {
    Isometry::new(
        Complex::ONE,
        Complex::ZERO,
        shear(angle, lambda.value()),
        Complex::from_polar(1.0, angle),
    )
}

/// Rotation about the circle `{(0, z)}` by `angle`.
pub fn generator_b(angle: f64, lambda: ModelParameter) -> Isometry {
    Isometry::new(
        Complex::from_polar(1.0, angle),
        shear(angle, lambda.value()),
        Complex::ZERO,
        Complex::ONE,
    )
}

pub(crate) fn check_cone_angle(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value < TAU {
        Ok(())
    } else {
        Err(Error::AngleOutOfRange { name, value })
    }
}

pub fn knot_generators(alpha: f64, lambda: ModelParameter) -> Result<KnotGeneratorPair> {
    check_cone_angle("alpha", alpha)?;
    Ok(KnotGeneratorPair {
        a: generator_a(alpha, lambda),
        b: generator_b(alpha, lambda),
        alpha,
        lambda,
    })
}

pub fn link_generators(alpha: f64, beta: f64, lambda: ModelParameter) -> Result<LinkGeneratorPair> {
    check_cone_angle("alpha", alpha)?;
    check_cone_angle("beta", beta)?;
    Ok(LinkGeneratorPair {
        a: generator_a(alpha, lambda),
        b: generator_b(beta, lambda),
        alpha,
        beta,
        lambda,
    })
}

/// `C = [[0, 1], [1, 0]]`, exchanging the two fixed circles.
pub fn swap_isometry() -> Isometry {
    Isometry::new(Complex::ZERO, Complex::ONE, Complex::ONE, Complex::ZERO)
}

/// `‖(AB)^n A − B (AB)^n‖_max`.
pub fn knot_relation_residual(pair: &KnotGeneratorPair, n: u32) -> f64 {
    let abn = (pair.a * pair.b).pow(n);
    (abn * pair.a - pair.b * abn).max_abs()
}

/// `‖(AB)^n − (BA)^n‖_max`.
pub fn link_relation_residual(pair: &LinkGeneratorPair, n: u32) -> f64 {
    ((pair.a * pair.b).pow(n) - (pair.b * pair.a).pow(n)).max_abs()
}

/// Closed form of `(AB)^n A − B (AB)^n` as a Chebyshev multiple of
/// `[[-1, λ], [-λ, 1]]`.
pub fn knot_relation_closed_form(n: u32, alpha: f64, lambda: ModelParameter) -> Isometry {
    let l = lambda.value();
    let big_lambda = l * (alpha / 2.0).sin();
    let m = 2 * n as i32 + 1;
    let scalar = Complex::from_polar(1.0, m as f64 * (PI + alpha) / 2.0)
        * (2.0 * eval_u(2 * n as i32, big_lambda) * (alpha / 2.0).sin());
    let factor = Isometry::new(
        Complex::new(-1.0, 0.0),
        Complex::new(l, 0.0),
        Complex::new(-l, 0.0),
        Complex::ONE,
    );
    factor.scale(scalar)
}

/// Residual between `(AB)^n A − B (AB)^n` computed by multiplication and
/// its Chebyshev closed form. Holds for every `(α, λ)`, not only at roots.
pub fn knot_factorization_check(n: u32, alpha: f64, lambda: ModelParameter) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidParameter(format!("knot index n = {n} must be ≥ 1")));
    }
    let pair = knot_generators(alpha, lambda)?;
    let abn = (pair.a * pair.b).pow(n);
    let lhs = abn * pair.a - pair.b * abn;
    Ok((lhs - knot_relation_closed_form(n, alpha, lambda)).max_abs())
}

/// `Λ = (1 − λ²) cos((α − β)/2) + λ² cos((α + β)/2)`.
pub fn link_big_lambda(alpha: f64, beta: f64, lambda: f64) -> f64 {
    let l2 = lambda * lambda;
    (1.0 - l2) * ((alpha - beta) / 2.0).cos() + l2 * ((alpha + beta) / 2.0).cos()
}

/// Scalar prefactor `4 U_{n−1}(Λ) λ e^{i n((α+β)/2 + π)} sin(α/2) sin(β/2)`.
pub fn link_relation_prefactor(n: u32, alpha: f64, beta: f64, lambda: ModelParameter) -> Complex {
    let l = lambda.value();
    let big = link_big_lambda(alpha, beta, l);
    Complex::from_polar(1.0, n as f64 * ((alpha + beta) / 2.0 + PI))
        * (4.0 * eval_u(n as i32 - 1, big) * l * (alpha / 2.0).sin() * (beta / 2.0).sin())
}

/// Matrix factor of `(AB)^n − (BA)^n` once the scalar prefactor is pulled
/// out: `(−1)^n [[λ, −1], [1, −λ]]`.
pub fn link_relation_matrix(n: u32, lambda: ModelParameter) -> Isometry {
    let l = lambda.value();
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Isometry::new(
        Complex::new(sign * l, 0.0),
        Complex::new(-sign, 0.0),
        Complex::new(sign, 0.0),
        Complex::new(-sign * l, 0.0),
    )
}

pub fn link_relation_closed_form(n: u32, alpha: f64, beta: f64, lambda: ModelParameter) -> Isometry {
    link_relation_matrix(n, lambda).scale(link_relation_prefactor(n, alpha, beta, lambda))
}

/// Residual between `(AB)^n − (BA)^n` and its Chebyshev closed form.
pub fn link_factorization_check(n: u32, alpha: f64, beta: f64, lambda: ModelParameter) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("link index n = {n} must be ≥ 2")));
    }
    let pair = link_generators(alpha, beta, lambda)?;
    let lhs = (pair.a * pair.b).pow(n) - (pair.b * pair.a).pow(n);
    Ok((lhs - link_relation_closed_form(n, alpha, beta, lambda)).max_abs())
}

/// Largest singular value of a 2×2 complex matrix.
pub fn largest_singular_value(m: &Isometry) -> f64 {
    let g = *m * m.adjoint();
    let tr = g.trace().re;
    let det = g.det().re;
    let disc = (tr * tr - 4.0 * det).max(0.0);
    ((tr + disc.sqrt()) / 2.0).max(0.0).sqrt()
}

/// `(AB)^k` in closed form at the metric parameter selected for the knot
/// `t(2n+1, 2)` with cone angle `α`; entries are ratios of sines of
/// multiples of `θ = π/(2n+1)` with phases `e^{iε(m)}`.
pub fn power_ab_closed_form(k: u32, n: u32, alpha: f64) -> Result<Isometry> {
    knot_lambda(n, alpha)?;
    if k == 0 {
        return Ok(Isometry::identity());
    }
    let theta = PI / (2 * n + 1) as f64;
    let k = k as i64;
    let ratio = |m: i64| (m as f64 * theta).sin() / theta.sin();
    let phase = |m: i64| Complex::from_polar(1.0, epsilon_aux(m, n, alpha));
    Ok(Isometry::new(
        phase(2 * k) * -ratio(2 * k - 1),
        phase(2 * k - 1) * -ratio(2 * k),
        phase(2 * k + 1) * ratio(2 * k),
        phase(2 * k) * ratio(2 * k + 1),
    ))
}

/// Rotation angle in `(0, 2π)` of a rotation-type matrix: the argument of
/// the eigenvalue farther from 1 relative to the one nearer to 1.
pub fn rotation_angle(m: &Isometry) -> Result<f64> {
    let tr = m.trace();
    let disc = (tr * tr - m.det() * 4.0).sqrt();
    let mu1 = (tr + disc) / 2.0;
    let mu2 = (tr - disc) / 2.0;
    if (mu1 - mu2).norm() <= 1e-12 * (mu1.norm() + mu2.norm()).max(1.0) {
        return Err(Error::NotRotation);
    }
    let (unit, other) = if (mu1 - 1.0).norm() <= (mu2 - 1.0).norm() {
        (mu1, mu2)
    } else {
        (mu2, mu1)
    };
    Ok((other / unit).arg().rem_euclid(TAU))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{is_isometry, ModelPoint};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn lam(l: f64) -> ModelParameter {
        ModelParameter::new(l).unwrap()
    }

    #[test]
    fn knot_generators_at_pi() {
        let pair = knot_generators(PI, lam(0.5)).unwrap();
        let expected = [1.0, 0.0, 1.0, -1.0];
        for (z, e) in pair.a.entries().iter().zip(expected) {
            assert_abs_diff_eq!(z.re, e, epsilon = 1e-15);
            assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn determinant_is_phase() {
        for alpha in [0.3, 1.0, PI, 5.9] {
            let pair = knot_generators(alpha, lam(-0.4)).unwrap();
            assert!((pair.a.det() - Complex::from_polar(1.0, alpha)).norm() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(knot_generators(0.0, lam(0.1)).is_err());
        assert!(knot_generators(TAU, lam(0.1)).is_err());
        assert!(link_generators(1.0, 7.0, lam(0.1)).is_err());
    }

    #[test]
    fn b_is_conjugate_of_a_by_swap() {
        let c = swap_isometry();
        let c_inv = c.inverse().unwrap();
        for (alpha, l) in [(0.4, 0.3), (PI, 0.5), (5.0, -0.8)] {
            let pair = knot_generators(alpha, lam(l)).unwrap();
            assert!((c * pair.a * c_inv - pair.b).max_abs() <= 1e-12);
        }
    }

    #[test]
    fn swap_properties() {
        let c = swap_isometry();
        assert_eq!(ModelPoint::e1().apply(&c), ModelPoint::e2());
        assert_eq!(c * c, Isometry::identity());
        for l in [0.3, 0.7] {
            assert!(is_isometry(&c, lam(l), 1e-15).is_isometry);
        }
    }

    #[test]
    fn fixed_points() {
        let pair = knot_generators(1.3, lam(0.6)).unwrap();
        assert_eq!(ModelPoint::e1().apply(&pair.a), ModelPoint::e1());
        assert_eq!(ModelPoint::e2().apply(&pair.b), ModelPoint::e2());
    }

    #[test]
    fn link_reduces_to_knot_on_diagonal() {
        let k = knot_generators(2.1, lam(0.35)).unwrap();
        let l = link_generators(2.1, 2.1, lam(0.35)).unwrap();
        assert_eq!(k.a, l.a);
        assert_eq!(k.b, l.b);
        let l = link_generators(PI, PI, lam(0.5f64.sqrt())).unwrap();
        assert!(is_isometry(&l.a, l.lambda, 1e-12).is_isometry);
        assert!(is_isometry(&l.b, l.lambda, 1e-12).is_isometry);
    }

    #[test]
    fn knot_relation_examples() {
        let pair = knot_generators(PI, lam(0.5)).unwrap();
        assert!(knot_relation_residual(&pair, 1) <= 1e-12);
        let pair = knot_generators(PI, lam(0.9)).unwrap();
        assert!(knot_relation_residual(&pair, 1) > 0.1);
        for n in 1..=6u32 {
            for k in 1..=2 * n {
                let alpha: f64 = 2.5;
                let l = (k as f64 * PI / (2 * n + 1) as f64).cos() / (alpha / 2.0).sin();
                if l.abs() < 1.0 {
                    let pair = knot_generators(alpha, lam(l)).unwrap();
                    assert!(knot_relation_residual(&pair, n) <= 1e-10, "n={n} k={k}");
                }
            }
        }
    }

    #[test]
    fn link_relation_examples() {
        let pair = link_generators(1.2, 4.0, lam(0.0)).unwrap();
        for n in 2..6 {
            assert_eq!(link_relation_residual(&pair, n), 0.0);
        }
        let pair = link_generators(PI, PI, lam(0.5f64.sqrt())).unwrap();
        assert!(link_relation_residual(&pair, 2) <= 1e-12);
        let pair = link_generators(PI, PI, lam(0.3)).unwrap();
        assert!(link_relation_residual(&pair, 2) > 0.01);
    }

    #[test]
    fn knot_factorization_examples() {
        assert!(knot_factorization_check(1, PI / 2.0, lam(0.4)).unwrap() <= 1e-10);
        // At a root both sides vanish separately.
        let n = 2;
        let alpha: f64 = 2.0;
        let l = (2.0 * PI / 5.0).cos() / (alpha / 2.0).sin();
        let pair = knot_generators(alpha, lam(l)).unwrap();
        assert!(knot_relation_residual(&pair, n) <= 1e-10);
        assert!(knot_relation_closed_form(n, alpha, lam(l)).max_abs() <= 1e-10);
    }

    #[test]
    fn link_factorization_zero_lambda() {
        let pair = link_generators(1.0, 2.0, lam(0.0)).unwrap();
        let lhs = (pair.a * pair.b).pow(3) - (pair.b * pair.a).pow(3);
        assert_eq!(lhs.max_abs(), 0.0);
        assert_eq!(link_relation_closed_form(3, 1.0, 2.0, lam(0.0)).max_abs(), 0.0);
    }

    #[test]
    fn power_ab_examples() {
        assert_eq!(power_ab_closed_form(0, 2, PI).unwrap(), Isometry::identity());
        let pair = knot_generators(PI, lam(0.5)).unwrap();
        let direct = pair.a * pair.b;
        assert!((power_ab_closed_form(1, 1, PI).unwrap() - direct).max_abs() <= 1e-12);
        // k = n: the bottom-right ratio sin((2n+1)θ)/sinθ vanishes.
        let m = power_ab_closed_form(3, 3, 3.0).unwrap();
        assert!(m.m22.norm() <= 1e-12);
        assert_abs_diff_eq!(m.m21.norm(), 1.0, epsilon = 1e-12);
        assert!(power_ab_closed_form(1, 1, 0.5).is_err());
    }

    #[test]
    fn power_ab_matches_iteration() {
        for n in 1..=6u32 {
            let (lo, hi) = crate::cone::knot_sphericity_interval(n);
            for j in 1..8 {
                let alpha = lo + (hi - lo) * j as f64 / 8.0;
                let l = knot_lambda(n, alpha).unwrap();
                let pair = knot_generators(alpha, l).unwrap();
                let ab = pair.a * pair.b;
                for k in 0..=2 * n + 2 {
                    let diff = (power_ab_closed_form(k, n, alpha).unwrap() - ab.pow(k)).max_abs();
                    assert!(diff <= 1e-9, "n={n} alpha={alpha} k={k} diff={diff}");
                }
            }
        }
    }

    #[test]
    fn rotation_angle_examples() {
        for alpha in [0.2, 1.0, PI, 4.5, 6.2] {
            let pair = link_generators(alpha, 2.0 * PI - alpha / 2.0, lam(0.6)).unwrap();
            assert_abs_diff_eq!(rotation_angle(&pair.a).unwrap(), alpha, epsilon = 1e-12);
            assert_abs_diff_eq!(
                rotation_angle(&pair.b).unwrap(),
                2.0 * PI - alpha / 2.0,
                epsilon = 1e-12
            );
        }
        assert_eq!(rotation_angle(&Isometry::identity()), Err(Error::NotRotation));
    }

    #[test]
    fn singular_value_of_diagonal() {
        let m = Isometry::diag(Complex::new(0.0, 3.0), Complex::new(-1.0, 0.0));
        assert_abs_diff_eq!(largest_singular_value(&m), 3.0, epsilon = 1e-14);
    }

    proptest! {
        #[test]
        fn generators_preserve_form(alpha in 1e-3f64..(TAU - 1e-3), l in -0.999f64..0.999) {
            let pair = knot_generators(alpha, lam(l)).unwrap();
            prop_assert!(is_isometry(&pair.a, pair.lambda, 1e-12).is_isometry);
            prop_assert!(is_isometry(&pair.b, pair.lambda, 1e-12).is_isometry);
        }

        #[test]
        fn isometries_preserve_inner_product(
            alpha in 1e-3f64..(TAU - 1e-3),
            l in -0.99f64..0.99,
            z in proptest::array::uniform4(-1.0f64..1.0),
            w in proptest::array::uniform4(-1.0f64..1.0),
        ) {
            use crate::model::{inner_product, normalize};
            let lp = lam(l);
            let p = ModelPoint::new(Complex::new(z[0], z[1]), Complex::new(z[2], z[3]));
            let q = ModelPoint::new(Complex::new(w[0], w[1]), Complex::new(w[2], w[3]));
            prop_assume!(p.norm(lp) > 1e-3 && q.norm(lp) > 1e-3);
            let p = normalize(&p, lp).unwrap();
            let q = normalize(&q, lp).unwrap();
            let pair = knot_generators(alpha, lp).unwrap();
            let before = inner_product(&p, &q, lp);
            let after = inner_product(&p.apply(&pair.a), &q.apply(&pair.a), lp);
            prop_assert!((before - after).abs() <= 1e-12);
        }

        #[test]
        fn knot_factorization_everywhere(n in 1u32..=6, alpha in 1e-3f64..(TAU - 1e-3), l in -0.999f64..0.999) {
            prop_assert!(knot_factorization_check(n, alpha, lam(l)).unwrap() <= 1e-9);
        }
    }
}
