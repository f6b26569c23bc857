//! The five properness claims for a fundamental polyhedron.
//!
//! * (a) `A` and `B` rotate by the cone angles about the axis edges.
//! * (b) `A` and `B` pair the faces: each top-face vertex is carried to the
//!   matching bottom-face vertex.
//! * (c) boundary dihedral angles sum to `2π` over the cycle.
//! * (d) dihedral angles at `NS` sum to `2π`.
//! * (e) every tetrahedron `S N P_i P_{i+1}` is positively oriented.
//!
//! Each claim reports its residuals; a claim passes when every residual is
//! at most `tol`. `NaN` never passes.

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::holonomy::rotation_angle;
use crate::model::{Isometry, ModelPoint};

use super::FundamentalPolyhedron;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimId {
    A,
    B,
    C,
    D,
    E,
}

impl ClaimId {
    pub const ALL: [ClaimId; 5] = [ClaimId::A, ClaimId::B, ClaimId::C, ClaimId::D, ClaimId::E];

    pub fn describe(self) -> &'static str {
        match self {
            ClaimId::A => "generators rotate about the axis edges by the cone angles",
            ClaimId::B => "generators pair the top and bottom faces",
            ClaimId::C => "boundary dihedral angles sum to 2π",
            ClaimId::D => "dihedral angles at NS sum to 2π",
            ClaimId::E => "all tetrahedra are positively oriented",
        }
    }
}

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            ClaimId::A => "a",
            ClaimId::B => "b",
            ClaimId::C => "c",
            ClaimId::D => "d",
            ClaimId::E => "e",
        };
        f.write_str(c)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub claim: ClaimId,
    pub pass: bool,
    pub residuals: Vec<f64>,
    pub details: String,
}

impl ClaimReport {
    fn new(claim: ClaimId, residuals: Vec<f64>, tol: f64, details: String) -> Self {
        let pass = !residuals.is_empty() && residuals.iter().all(|r| *r <= tol);
        Self {
            claim,
            pass,
            residuals,
            details,
        }
    }

    /// Largest residual; `NaN` if any residual is `NaN`.
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |acc: f64, &r| {
            if r.is_nan() || acc.is_nan() {
                f64::NAN
            } else {
                acc.max(r)
            }
        })
    }
}

fn moved(p: &ModelPoint, m: &Isometry) -> f64 {
    p.apply(m).max_abs_diff(p)
}

fn angle_residual(m: &Isometry, expected: f64) -> f64 {
    match rotation_angle(m) {
        Ok(a) => {
            let d = (a - expected).rem_euclid(TAU);
            d.min(TAU - d)
        }
        Err(_) => f64::INFINITY,
    }
}

pub fn verify_properness(poly: &FundamentalPolyhedron, tol: f64) -> Vec<ClaimReport> {
    vec![
        claim_a(poly, tol),
        claim_b(poly, tol),
        claim_c(poly, tol),
        claim_d(poly, tol),
        claim_e(poly, tol),
    ]
}

fn claim_a(poly: &FundamentalPolyhedron, tol: f64) -> ClaimReport {
    let (alpha, beta) = poly.cone.angles();
    let (ia, ib) = poly.axis_indices();
    let residuals = vec![
        angle_residual(&poly.a, alpha),
        angle_residual(&poly.b, beta),
        moved(poly.vertex(1), &poly.a),
        moved(poly.vertex(ia), &poly.a),
        moved(&poly.north, &poly.a),
        moved(poly.vertex(2), &poly.b),
        moved(poly.vertex(ib), &poly.b),
        moved(&poly.south, &poly.b),
    ];
    let details = format!("axis edges P1P{ia} (A) and P2P{ib} (B); angle and fixed-point residuals");
    ClaimReport::new(ClaimId::A, residuals, tol, details)
}

/// Face pairings as `(source, target)` vertex indices, 1-based.
///
/// `A` sends `P_j` to `P_{m+2−j}` on the top face `P_1 … P_{ia}`; `B` sends
/// `P_j` to `P_{m+4−j}` on the face `P_2 P_1 P_m … P_{ib}` (indices mod `m`).
pub(crate) fn face_pairings(poly: &FundamentalPolyhedron) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
    let m = poly.vertex_count();
    let (ia, ib) = poly.axis_indices();
    let wrap = |i: usize| (i - 1) % m + 1;
    let a_pairs = (1..=ia).map(|j| (j, wrap(m + 2 - j))).collect();
    let mut b_sources = vec![2, 1];
    b_sources.extend((ib..=m).rev());
    let b_pairs = b_sources.into_iter().map(|j| (j, wrap(m + 4 - j))).collect();
    (a_pairs, b_pairs)
}

fn claim_b(poly: &FundamentalPolyhedron, tol: f64) -> ClaimReport {
    let (a_pairs, b_pairs) = face_pairings(poly);
    let mut residuals = Vec::with_capacity(a_pairs.len() + b_pairs.len());
    for &(j, t) in &a_pairs {
        residuals.push(poly.vertex(j).apply(&poly.a).max_abs_diff(poly.vertex(t)));
    }
    for &(j, t) in &b_pairs {
        residuals.push(poly.vertex(j).apply(&poly.b).max_abs_diff(poly.vertex(t)));
    }
    let details = format!(
        "{} vertex images under A, {} under B",
        a_pairs.len(),
        b_pairs.len()
    );
    ClaimReport::new(ClaimId::B, residuals, tol, details)
}

fn sum_claim(claim: ClaimId, angles: crate::Result<Vec<f64>>, tol: f64, what: &str) -> ClaimReport {
    match angles {
        Ok(a) => {
            let sum: f64 = a.iter().sum();
            let details = format!("sum of {} {what} angles = {sum:.15}", a.len());
            ClaimReport::new(claim, vec![(sum - TAU).abs()], tol, details)
        }
        Err(e) => ClaimReport::new(claim, vec![f64::INFINITY], tol, e.to_string()),
    }
}

fn claim_c(poly: &FundamentalPolyhedron, tol: f64) -> ClaimReport {
    sum_claim(ClaimId::C, poly.boundary_dihedrals(), tol, "boundary")
}

fn claim_d(poly: &FundamentalPolyhedron, tol: f64) -> ClaimReport {
    sum_claim(ClaimId::D, poly.polar_dihedrals(), tol, "polar")
}

/// Residual `max(0, 2·tol − det)`: zero for a comfortably positive
/// determinant, above `tol` once the determinant drops below `tol`.
fn claim_e(poly: &FundamentalPolyhedron, tol: f64) -> ClaimReport {
    let dets = poly.gram_dets();
    let min = dets.iter().copied().fold(f64::INFINITY, f64::min);
    let residuals = dets
        .iter()
        .map(|&d| if d.is_nan() { f64::NAN } else { (2.0 * tol - d).max(0.0) })
        .collect();
    let details = format!("{} tetrahedra, smallest Gram determinant {min:.6e}", dets.len());
    ClaimReport::new(ClaimId::E, residuals, tol, details)
}
