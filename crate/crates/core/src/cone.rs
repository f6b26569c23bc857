//! Closed-form side of the spherical structures: sphericity domains, the
//! metric parameter selected from a Chebyshev root, singular geodesic
//! lengths and volumes.
//!
//! Knots `T_n(α)` (the torus knot `t(2n+1, 2)` with cone angle `α`) are
//! spherical for `(2n−1)π/(2n+1) < α < 2π − (2n−1)π/(2n+1)`, with
//! `λ = cos(π/(2n+1)) / sin(α/2)`, length `l = (2n+1)α − (2n−1)π` and
//! volume `l² / (4(2n+1))`.
//!
//! Links `L_n(α, β)` (the torus link `t(2n, 2)`) are spherical on the
//! open rectangle `|α − β| < 2π(1 − 1/n)`, `|α + β − 2π| < 2π/n`, where
//! both components have length `l = n(α+β)/2 − (n−1)π` and the volume is
//! `l² / (2n)`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::angle::AngleLiteral;
use crate::error::{DomainViolation, Error, Result};
use crate::holonomy::{check_cone_angle, link_big_lambda};
use crate::model::ModelParameter;

/// Default distance kept from the domain boundary.
pub const DEFAULT_MARGIN: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KnotCone {
    pub n: u32,
    pub alpha: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkCone {
    pub n: u32,
    pub alpha: f64,
    pub beta: f64,
}

/// Either kind of cone-manifold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Cone {
    Knot(KnotCone),
    Link(LinkCone),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SphericalStructure {
    pub lambda: f64,
    /// Angle of the selected Chebyshev root, `Λ = cos θ`.
    pub theta: f64,
    /// One entry per singular component.
    pub lengths: Vec<f64>,
    pub volume: f64,
}

/// The metric parameter a particular Chebyshev root would produce.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootDiagnostic {
    pub k: u32,
    pub root: f64,
    /// `NaN` when no real `λ` exists for this root.
    pub lambda: f64,
    pub admissible: bool,
}

impl KnotCone {
    pub fn new(n: u32, alpha: f64) -> Result<Self> {
        check_knot_index(n)?;
        check_cone_angle("alpha", alpha)?;
        Ok(Self { n, alpha })
    }

    pub fn check_domain(&self, margin: f64) -> Result<()> {
        check_knot_domain(self.n, self.alpha, margin)
    }

    pub fn structure(&self) -> Result<SphericalStructure> {
        let lambda = knot_lambda(self.n, self.alpha)?;
        Ok(SphericalStructure {
            lambda: lambda.value(),
            theta: knot_root_angle(self.n),
            lengths: vec![knot_length(self.n, self.alpha)?],
            volume: knot_volume(self.n, self.alpha)?,
        })
    }
}

impl LinkCone {
    pub fn new(n: u32, alpha: f64, beta: f64) -> Result<Self> {
        check_link_index(n)?;
        check_cone_angle("alpha", alpha)?;
        check_cone_angle("beta", beta)?;
        Ok(Self { n, alpha, beta })
    }

    pub fn check_domain(&self, margin: f64) -> Result<()> {
        check_link_domain(self.n, self.alpha, self.beta, margin)
    }

    pub fn structure(&self) -> Result<SphericalStructure> {
        let lambda = link_lambda(self.n, self.alpha, self.beta)?;
        let l = link_length(self.n, self.alpha, self.beta)?;
        Ok(SphericalStructure {
            lambda: lambda.value(),
            theta: link_root_angle(self.n),
            lengths: vec![l, l],
            volume: link_volume(self.n, self.alpha, self.beta)?,
        })
    }
}

impl Cone {
    pub fn n(&self) -> u32 {
        match self {
            Cone::Knot(k) => k.n,
            Cone::Link(l) => l.n,
        }
    }

    pub fn check_domain(&self, margin: f64) -> Result<()> {
        match self {
            Cone::Knot(k) => k.check_domain(margin),
            Cone::Link(l) => l.check_domain(margin),
        }
    }

    pub fn structure(&self) -> Result<SphericalStructure> {
        match self {
            Cone::Knot(k) => k.structure(),
            Cone::Link(l) => l.structure(),
        }
    }

    /// `(α, β)`; for knots both entries are `α`.
    pub fn angles(&self) -> (f64, f64) {
        match *self {
            Cone::Knot(k) => (k.alpha, k.alpha),
            Cone::Link(l) => (l.alpha, l.beta),
        }
    }
}

fn check_knot_index(n: u32) -> Result<()> {
    if n >= 1 {
        Ok(())
    } else {
        Err(Error::InvalidParameter("knot index n must be ≥ 1".into()))
    }
}

fn check_link_index(n: u32) -> Result<()> {
    if n >= 2 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("link index n = {n} must be ≥ 2")))
    }
}

/// `((2n−1)π/(2n+1), 2π − (2n−1)π/(2n+1))`, open.
pub fn knot_sphericity_interval(n: u32) -> (f64, f64) {
    let lo = (2 * n - 1) as f64 * PI / (2 * n + 1) as f64;
    (lo, TAU - lo)
}

/// `π/(2n+1)`, the angle of the root `Λ_1` of `U_{2n}`.
pub fn knot_root_angle(n: u32) -> f64 {
    PI / (2 * n + 1) as f64
}

/// Checks `lo + margin < α < hi − margin` and names the violated bound.
pub fn check_knot_domain(n: u32, alpha: f64, margin: f64) -> Result<()> {
    check_knot_index(n)?;
    let (lo, hi) = knot_sphericity_interval(n);
    let m = 2 * n as i64;
    if !(alpha > lo + margin) {
        return Err(DomainViolation {
            description: format!(
                "alpha = {alpha} must exceed the lower bound (2n-1)π/(2n+1) = {} ≈ {lo:.9} (n = {n}, margin {margin:e})",
                AngleLiteral::pi_fraction(m - 1, (m + 1) as u64)
            ),
        }
        .into());
    }
    if !(alpha < hi - margin) {
        return Err(DomainViolation {
            description: format!(
                "alpha = {alpha} must stay below the upper bound 2π - (2n-1)π/(2n+1) = {} ≈ {hi:.9} (n = {n}, margin {margin:e})",
                AngleLiteral::pi_fraction(m + 3, (m + 1) as u64)
            ),
        }
        .into());
    }
    Ok(())
}

/// `λ = cos(π/(2n+1)) / sin(α/2)`, inside the domain (default margin).
pub fn knot_lambda(n: u32, alpha: f64) -> Result<ModelParameter> {
    knot_lambda_with_margin(n, alpha, DEFAULT_MARGIN)
}

pub fn knot_lambda_with_margin(n: u32, alpha: f64, margin: f64) -> Result<ModelParameter> {
    check_knot_domain(n, alpha, margin)?;
    ModelParameter::new(knot_lambda_formula(n, alpha))
}

/// The selection formula without any domain check.
pub fn knot_lambda_formula(n: u32, alpha: f64) -> f64 {
    knot_root_angle(n).cos() / (alpha / 2.0).sin()
}

/// What the `k`-th root `cos(kπ/(2n+1))` of `U_{2n}` would give.
pub fn knot_lambda_for_root(n: u32, alpha: f64, k: u32) -> Result<RootDiagnostic> {
    check_knot_index(n)?;
    if k < 1 || k > 2 * n {
        return Err(Error::IndexOutOfRange {
            index: k as i64,
            range: format!("1..={}", 2 * n),
        });
    }
    let root = (k as f64 * PI / (2 * n + 1) as f64).cos();
    let lambda = root / (alpha / 2.0).sin();
    Ok(RootDiagnostic {
        k,
        root,
        lambda,
        admissible: lambda.is_finite() && lambda.abs() < 1.0,
    })
}

pub fn knot_length_formula(n: u32, alpha: f64) -> f64 {
    (2 * n + 1) as f64 * alpha - (2 * n - 1) as f64 * PI
}

pub fn knot_volume_formula(n: u32, alpha: f64) -> f64 {
    let m = (2 * n + 1) as f64;
    let half = m / 2.0 * alpha - (2 * n - 1) as f64 / 2.0 * PI;
    half * half / m
}

pub fn knot_length(n: u32, alpha: f64) -> Result<f64> {
    check_knot_domain(n, alpha, DEFAULT_MARGIN)?;
    Ok(knot_length_formula(n, alpha))
}

pub fn knot_volume(n: u32, alpha: f64) -> Result<f64> {
    check_knot_domain(n, alpha, DEFAULT_MARGIN)?;
    Ok(knot_volume_formula(n, alpha))
}

/// Strict membership in the link domain, no margin.
pub fn link_sphericity_contains(n: u32, alpha: f64, beta: f64) -> bool {
    check_link_domain(n, alpha, beta, 0.0).is_ok()
}

/// `(n−1)π/n`, the angle of the root `Λ_{n−1}` of `U_{n−1}`.
pub fn link_root_angle(n: u32) -> f64 {
    (n - 1) as f64 * PI / n as f64
}

/// Checks the four strict inequalities of the link domain (each tightened
/// by `margin`) and names the first one violated.
pub fn check_link_domain(n: u32, alpha: f64, beta: f64, margin: f64) -> Result<()> {
    check_link_index(n)?;
    let nf = n as f64;
    let diff_bound = TAU * (1.0 - 1.0 / nf);
    let sum_lo = TAU * (1.0 - 1.0 / nf);
    let sum_hi = TAU * (1.0 + 1.0 / nf);
    let d = alpha - beta;
    let s = alpha + beta;
    let diff_expr = AngleLiteral::pi_fraction(2 * (n as i64 - 1), n as u64);
    let hi_expr = AngleLiteral::pi_fraction(2 * (n as i64 + 1), n as u64);
    let fail = |what: String| -> Result<()> {
        Err(DomainViolation {
            description: format!("{what} (n = {n}, alpha = {alpha}, beta = {beta}, margin {margin:e})"),
        }
        .into())
    };
    if !(d > -diff_bound + margin) {
        return fail(format!("alpha - beta = {d} must exceed -2π(1-1/n) = -{diff_expr}"));
    }
    if !(d < diff_bound - margin) {
        return fail(format!("alpha - beta = {d} must stay below 2π(1-1/n) = {diff_expr}"));
    }
    if !(s > sum_lo + margin) {
        return fail(format!("alpha + beta = {s} must exceed 2π(1-1/n) = {diff_expr}"));
    }
    if !(s < sum_hi - margin) {
        return fail(format!("alpha + beta = {s} must stay below 2π(1+1/n) = {hi_expr}"));
    }
    Ok(())
}

pub fn link_lambda(n: u32, alpha: f64, beta: f64) -> Result<ModelParameter> {
    link_lambda_with_margin(n, alpha, beta, DEFAULT_MARGIN)
}

pub fn link_lambda_with_margin(n: u32, alpha: f64, beta: f64, margin: f64) -> Result<ModelParameter> {
    check_link_domain(n, alpha, beta, margin)?;
    ModelParameter::new(link_lambda_formula(n, alpha, beta))
}

/// Positive root of `λ² = (cos((α−β)/2) + cos(π/n)) / (cos((α−β)/2) − cos((α+β)/2))`.
/// `NaN` where the right-hand side is negative or undefined.
pub fn link_lambda_formula(n: u32, alpha: f64, beta: f64) -> f64 {
    link_lambda_squared(alpha, beta, -(PI / n as f64).cos()).sqrt()
}

fn link_lambda_squared(alpha: f64, beta: f64, root: f64) -> f64 {
    let cd = ((alpha - beta) / 2.0).cos();
    let cs = ((alpha + beta) / 2.0).cos();
    let denom = cd - cs;
    if denom <= 0.0 {
        return f64::NAN;
    }
    (cd - root) / denom
}

/// What the `k`-th root `cos(kπ/n)` of `U_{n−1}` would give.
pub fn link_lambda_for_root(n: u32, alpha: f64, beta: f64, k: u32) -> Result<RootDiagnostic> {
    check_link_index(n)?;
    if k < 1 || k > n - 1 {
        return Err(Error::IndexOutOfRange {
            index: k as i64,
            range: format!("1..={}", n - 1),
        });
    }
    let root = (k as f64 * PI / n as f64).cos();
    let lambda = link_lambda_squared(alpha, beta, root).sqrt();
    Ok(RootDiagnostic {
        k,
        root,
        lambda,
        admissible: lambda.is_finite() && lambda > 0.0 && lambda < 1.0,
    })
}

/// `Λ` of the link relation at the given parameters.
pub fn link_root_value(alpha: f64, beta: f64, lambda: f64) -> f64 {
    link_big_lambda(alpha, beta, lambda)
}

pub fn link_length_formula(n: u32, alpha: f64, beta: f64) -> f64 {
    (alpha + beta) / 2.0 * n as f64 - PI * (n - 1) as f64
}

pub fn link_volume_formula(n: u32, alpha: f64, beta: f64) -> f64 {
    let l = link_length_formula(n, alpha, beta);
    l * l / (2 * n) as f64
}

pub fn link_length(n: u32, alpha: f64, beta: f64) -> Result<f64> {
    check_link_domain(n, alpha, beta, DEFAULT_MARGIN)?;
    Ok(link_length_formula(n, alpha, beta))
}

pub fn link_volume(n: u32, alpha: f64, beta: f64) -> Result<f64> {
    check_link_domain(n, alpha, beta, DEFAULT_MARGIN)?;
    Ok(link_volume_formula(n, alpha, beta))
}

/// `ε(m) = (m/2)α − ((4n − m)/2)π`.
pub fn epsilon_aux(m: i64, n: u32, alpha: f64) -> f64 {
    m as f64 / 2.0 * alpha - (4 * n as i64 - m) as f64 / 2.0 * PI
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chebyshev::eval_u;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn knot_intervals() {
        let (lo, hi) = knot_sphericity_interval(1);
        assert_abs_diff_eq!(lo, PI / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(hi, 5.0 * PI / 3.0, epsilon = 1e-15);
        let (lo, hi) = knot_sphericity_interval(2);
        assert_abs_diff_eq!(lo, 3.0 * PI / 5.0, epsilon = 1e-15);
        assert_abs_diff_eq!(hi, 7.0 * PI / 5.0, epsilon = 1e-15);
        for n in 1..20 {
            let (lo, hi) = knot_sphericity_interval(n);
            assert_abs_diff_eq!(lo + hi, TAU, epsilon = 1e-14);
        }
    }

    #[test]
    fn knot_values() {
        assert_abs_diff_eq!(knot_lambda(1, PI).unwrap().value(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(knot_lambda(2, PI).unwrap().value(), 0.8090169943749475, epsilon = 1e-15);
        let (lo, _) = knot_sphericity_interval(3);
        let near = knot_lambda(3, lo + 1e-7).unwrap().value();
        assert!(near < 1.0 && near > 1.0 - 1e-6);
        assert_abs_diff_eq!(knot_length(1, PI).unwrap(), TAU, epsilon = 1e-14);
        assert_abs_diff_eq!(knot_length(2, PI).unwrap(), TAU, epsilon = 1e-14);
        assert_abs_diff_eq!(knot_length_formula(4, knot_sphericity_interval(4).0), 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(knot_volume(1, PI).unwrap(), PI * PI / 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(knot_volume(1, PI).unwrap(), 3.289868133696453, epsilon = 1e-14);
        let v = knot_volume(1, 2.0 * PI / 5.0).unwrap();
        assert_abs_diff_eq!(v, PI * PI / 300.0, epsilon = 1e-15);
        assert_abs_diff_eq!(5.0 * v, 2.0 * PI * PI / 120.0, epsilon = 1e-14);
    }

    #[test]
    fn knot_domain_errors_name_bounds() {
        let err = knot_lambda(1, 0.2).unwrap_err().to_string();
        assert!(err.contains("pi/3"), "{err}");
        assert!(err.contains("lower bound"));
        let err = knot_volume(1, 5.5).unwrap_err().to_string();
        assert!(err.contains("5pi/3"), "{err}");
        assert!(knot_length(0, 1.0).is_err());
    }

    #[test]
    fn link_domain_examples() {
        assert!(link_sphericity_contains(2, PI, PI));
        assert!(!link_sphericity_contains(2, PI / 3.0, PI / 3.0));
        for n in 2..7u32 {
            let lo = PI * (n - 1) as f64 / n as f64;
            let hi = PI * (n + 1) as f64 / n as f64;
            for a in [lo - 1e-6, lo + 1e-6, PI, hi - 1e-6, hi + 1e-6] {
                assert_eq!(link_sphericity_contains(n, a, a), a > lo && a < hi, "n={n} a={a}");
            }
        }
        let err = link_lambda(3, 0.5, 5.5).unwrap_err().to_string();
        assert!(err.contains("alpha - beta"), "{err}");
        assert!(err.contains("4pi/3"), "{err}");
    }

    #[test]
    fn link_values() {
        let l = link_lambda(2, PI, PI).unwrap().value();
        assert_abs_diff_eq!(l, 0.5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(l, (PI / 4.0).cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(link_lambda(3, PI, PI).unwrap().value(), 0.8660254037844386, epsilon = 1e-15);
        assert_abs_diff_eq!(link_length(2, PI, PI).unwrap(), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(
            link_length(3, 1.1 * PI, 0.8 * PI).unwrap(),
            link_length(3, 1.2 * PI, 0.7 * PI).unwrap(),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(link_volume(2, PI, PI).unwrap(), PI * PI / 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(link_volume(3, PI, PI).unwrap(), PI * PI / 6.0, epsilon = 1e-14);
        assert_abs_diff_eq!(link_length_formula(4, 0.75 * PI, 0.75 * PI), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn link_lambda_boundary_limits() {
        // |α + β − 2π| → 2π/n on the diagonal sends λ² → 1.
        let n = 3;
        let lo = PI * 2.0 / 3.0;
        let l = link_lambda_formula(n, lo + 1e-6, lo + 1e-6);
        assert!(l < 1.0 && l > 1.0 - 1e-5);
        // |α − β| → 2π(1 − 1/n) sends λ² → 0.
        let d = TAU * (1.0 - 1.0 / 3.0);
        let l = link_lambda_formula(n, PI + d / 2.0 - 1e-6, PI - d / 2.0 + 1e-6);
        assert!(l > 0.0 && l < 1e-2);
    }

    #[test]
    fn epsilon_examples() {
        assert_abs_diff_eq!(epsilon_aux(4 * 3, 3, 1.7), 6.0 * 1.7, epsilon = 1e-14);
        assert_abs_diff_eq!(epsilon_aux(3, 1, PI), PI, epsilon = 1e-15);
        assert_abs_diff_eq!(epsilon_aux(3, 1, PI), knot_length(1, PI).unwrap() / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!(epsilon_aux(0, 5, 0.3), -10.0 * PI, epsilon = 1e-13);
    }

    #[test]
    fn root_diagnostics() {
        let d = knot_lambda_for_root(1, PI, 1).unwrap();
        assert!(d.admissible);
        assert_abs_diff_eq!(d.lambda, 0.5, epsilon = 1e-15);
        let d = knot_lambda_for_root(1, PI / 4.0, 1).unwrap();
        assert!(!d.admissible && d.lambda > 1.0);
        assert!(knot_lambda_for_root(1, PI, 3).is_err());
        let d = link_lambda_for_root(2, PI, PI, 1).unwrap();
        assert_abs_diff_eq!(d.lambda, 0.5f64.sqrt(), epsilon = 1e-15);
        assert!(link_lambda_for_root(2, PI, PI, 2).is_err());
    }

    #[test]
    fn cone_structures() {
        let s = KnotCone::new(2, PI).unwrap().structure().unwrap();
        assert_eq!(s.lengths.len(), 1);
        assert_abs_diff_eq!(s.volume, PI * PI / 5.0, epsilon = 1e-14);
        let s = LinkCone::new(2, PI, PI).unwrap().structure().unwrap();
        assert_eq!(s.lengths.len(), 2);
        assert!(LinkCone::new(1, PI, PI).is_err());
        assert!(KnotCone::new(1, -1.0).is_err());
    }

    proptest! {
        #[test]
        fn knot_closed_forms_consistent(n in 1u32..=6, t in 0.0005f64..0.9995) {
            let (lo, hi) = knot_sphericity_interval(n);
            let alpha = lo + (hi - lo) * t;
            let l = knot_lambda(n, alpha).unwrap().value();
            prop_assert!(l > 0.0 && l < 1.0);
            let len = knot_length(n, alpha).unwrap();
            let vol = knot_volume(n, alpha).unwrap();
            prop_assert!(len > 0.0 && len < 4.0 * PI);
            prop_assert!((vol - len * len / (4.0 * (2 * n + 1) as f64)).abs() <= 1e-12);
            // Schläfli: dV/dα = l/2 by central differences.
            let h = 1e-5 * (hi - lo);
            let dv = (knot_volume_formula(n, alpha + h) - knot_volume_formula(n, alpha - h)) / (2.0 * h);
            prop_assert!((dv - len / 2.0).abs() <= 1e-8);
            prop_assert!(eval_u(2 * n as i32, l * (alpha / 2.0).sin()).abs() <= 1e-10);
        }

        #[test]
        fn link_closed_forms_consistent(n in 2u32..=6, u in -0.999f64..0.999, v in -0.999f64..0.999) {
            let nf = n as f64;
            let d = u * TAU * (1.0 - 1.0 / nf);
            let s = TAU + v * TAU / nf;
            let (alpha, beta) = ((s + d) / 2.0, (s - d) / 2.0);
            prop_assume!(link_sphericity_contains(n, alpha, beta));
            prop_assume!(check_link_domain(n, alpha, beta, DEFAULT_MARGIN).is_ok());
            let l = link_lambda(n, alpha, beta).unwrap().value();
            prop_assert!(l > 0.0 && l < 1.0);
            prop_assert!(eval_u(n as i32 - 1, link_root_value(alpha, beta, l)).abs() <= 1e-10);
            prop_assert!((link_root_value(alpha, beta, l) - link_root_angle(n).cos()).abs() <= 1e-12);
            let len = link_length(n, alpha, beta).unwrap();
            let h = 1e-5;
            let da = (link_volume_formula(n, alpha + h, beta) - link_volume_formula(n, alpha - h, beta)) / (2.0 * h);
            let db = (link_volume_formula(n, alpha, beta + h) - link_volume_formula(n, alpha, beta - h)) / (2.0 * h);
            prop_assert!((da - len / 2.0).abs() <= 1e-8);
            prop_assert!((db - len / 2.0).abs() <= 1e-8);
            let mixed_ab = (link_volume_formula(n, alpha + h, beta + h) - link_volume_formula(n, alpha + h, beta - h)
                - link_volume_formula(n, alpha - h, beta + h) + link_volume_formula(n, alpha - h, beta - h)) / (4.0 * h * h);
            prop_assert!((mixed_ab - nf / 4.0).abs() <= 1e-4);
        }
    }
}
