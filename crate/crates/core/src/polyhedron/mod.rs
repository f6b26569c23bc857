//! Fundamental polyhedra `P_n` (knots, `4n+2` boundary vertices) and `F_n`
//! (links, `4n` boundary vertices).
//!
//! Boundary vertices are orbit points of `P1 = (1, 0)` and `P2 = (0, 1)`:
//! the first half of the cycle is reached by powers of `AB`, the second
//! half by powers of `BA`. The two poles `N`, `S` sit at the middle of the
//! axis edges, which lie on the fixed circles of `A` and `B`. The solid is
//! the fan of tetrahedra `S N P_i P_{i+1}` around the edge `NS`.

mod gram;
mod properness;
mod schlafli;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

pub use gram::{gram_delta_closed_form, gram_delta_direct, GramFamily};
pub use properness::{verify_properness, ClaimId, ClaimReport};
pub use schlafli::{schlafli_volume, schlafli_volume_along, SchlafliPath};

use crate::cone::{
    check_knot_domain, check_link_domain, knot_lambda_formula, link_lambda_formula, Cone, KnotCone,
    LinkCone, DEFAULT_MARGIN,
};
use crate::error::{Error, Result};
use crate::holonomy::{knot_generators, link_generators, knot_relation_residual, link_relation_residual};
use crate::model::{
    clamped_acos, dot4, embed, ensure_normalized, gram_det, inner_product, normalize, Complex,
    Isometry, ModelParameter, ModelPoint,
};

/// Orbit points computed along the two routes must agree to this.
pub const ORBIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BuildOptions {
    /// Distance kept from the domain boundary.
    pub margin: f64,
    /// Build outside the domain and skip the consistency errors. The result
    /// is stamped as unverified.
    pub forced: bool,
    /// Added to the selected `λ`; a fault-injection hook for checking that
    /// the verification suites notice a wrong metric.
    pub lambda_offset: f64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        Self {
            margin: DEFAULT_MARGIN,
            forced: false,
            lambda_offset: 0.0,
        }
    }
}

impl BuildOptions {
    pub fn forced() -> Self {
        Self {
            forced: true,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FundamentalPolyhedron {
    pub cone: Cone,
    pub lambda: ModelParameter,
    /// `P_1, …, P_m` in cycle order (stored 0-based).
    pub vertices: Vec<ModelPoint>,
    pub north: ModelPoint,
    pub south: ModelPoint,
    pub a: Isometry,
    pub b: Isometry,
    /// Disagreement between the forward and backward orbit formulas at the
    /// vertex both reach.
    pub orbit_residual: f64,
    /// Residual of the group relation at this `λ`.
    pub relation_residual: f64,
    /// Largest `‖P·M − P‖` over the far axis endpoints.
    pub axis_residual: f64,
    /// False for forced constructions.
    pub verified: bool,
}

/// The tetrahedron `S N P_i P_{i+1}`, points in that order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tetrahedron {
    /// 1-based index `i` of the first boundary vertex.
    pub index: usize,
    pub points: [ModelPoint; 4],
}

impl Tetrahedron {
    pub const SOUTH: usize = 0;
    pub const NORTH: usize = 1;
    pub const FIRST: usize = 2;
    pub const SECOND: usize = 3;

    /// The boundary edge `P_i P_{i+1}`.
    pub const BOUNDARY_EDGE: (usize, usize) = (Self::FIRST, Self::SECOND);
    /// The polar edge `NS` shared by every tetrahedron of the fan.
    pub const POLAR_EDGE: (usize, usize) = (Self::NORTH, Self::SOUTH);

    pub fn gram_det(&self) -> f64 {
        let [s, n, p, q] = &self.points;
        gram_det(s, n, p, q)
    }

    pub fn map(&self, m: &Isometry) -> Self {
        Self {
            index: self.index,
            points: self.points.map(|p| p.apply(m)),
        }
    }
}

impl FundamentalPolyhedron {
    pub fn n(&self) -> u32 {
        self.cone.n()
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// `P_i`, 1-based and cyclic (`P_{m+1} = P_1`).
    pub fn vertex(&self, i: usize) -> &ModelPoint {
        let m = self.vertices.len();
        &self.vertices[(i + m - 1) % m]
    }

    pub fn cone_angles(&self) -> Vec<f64> {
        match self.cone {
            Cone::Knot(k) => vec![k.alpha],
            Cone::Link(l) => vec![l.alpha, l.beta],
        }
    }

    /// 1-based indices of the far endpoints of the axis edges of `A` and
    /// `B`: the edges are `P_1 P_{ia}` and `P_2 P_{ib}`.
    pub fn axis_indices(&self) -> (usize, usize) {
        axis_indices(&self.cone)
    }

    pub fn tetrahedra(&self) -> Vec<Tetrahedron> {
        (1..=self.vertex_count())
            .map(|i| Tetrahedron {
                index: i,
                points: [self.south, self.north, *self.vertex(i), *self.vertex(i + 1)],
            })
            .collect()
    }

    /// Dihedral angles `ψ_i` along the boundary edges `P_i P_{i+1}`.
    pub fn boundary_dihedrals(&self) -> Result<Vec<f64>> {
        self.tetrahedra()
            .iter()
            .map(|t| dihedral_angle(t, Tetrahedron::BOUNDARY_EDGE, self.lambda))
            .collect()
    }

    /// Dihedral angles `φ_i` of each tetrahedron at the polar edge `NS`.
    pub fn polar_dihedrals(&self) -> Result<Vec<f64>> {
        self.tetrahedra()
            .iter()
            .map(|t| dihedral_angle(t, Tetrahedron::POLAR_EDGE, self.lambda))
            .collect()
    }

    pub fn gram_dets(&self) -> Vec<f64> {
        self.tetrahedra().iter().map(Tetrahedron::gram_det).collect()
    }

    pub fn verify(&self, tol: f64) -> Vec<ClaimReport> {
        verify_properness(self, tol)
    }
}

fn axis_indices(cone: &Cone) -> (usize, usize) {
    let n = cone.n() as usize;
    match cone {
        Cone::Knot(_) => (2 * n + 2, 2 * n + 3),
        Cone::Link(_) => (2 * n + 1, 2 * n + 2),
    }
}

fn select_lambda(formula: f64, opts: &BuildOptions) -> Result<ModelParameter> {
    let l = formula + opts.lambda_offset;
    if opts.forced {
        Ok(ModelParameter::new_unchecked(l))
    } else {
        ModelParameter::new(l)
    }
}

pub fn build_knot_polyhedron(n: u32, alpha: f64) -> Result<FundamentalPolyhedron> {
    build_knot_polyhedron_with(n, alpha, &BuildOptions::default())
}

pub fn build_knot_polyhedron_with(n: u32, alpha: f64, opts: &BuildOptions) -> Result<FundamentalPolyhedron> {
    let cone = KnotCone::new(n, alpha)?;
    if !opts.forced {
        check_knot_domain(n, alpha, opts.margin)?;
    }
    let lambda = select_lambda(knot_lambda_formula(n, alpha), opts)?;
    let pair = knot_generators(alpha, lambda)?;
    let relation = knot_relation_residual(&pair, n);
    assemble(Cone::Knot(cone), lambda, pair.a, pair.b, relation, opts)
}

pub fn build_link_polyhedron(n: u32, alpha: f64, beta: f64) -> Result<FundamentalPolyhedron> {
    build_link_polyhedron_with(n, alpha, beta, &BuildOptions::default())
}

pub fn build_link_polyhedron_with(
    n: u32,
    alpha: f64,
    beta: f64,
    opts: &BuildOptions,
) -> Result<FundamentalPolyhedron> {
    let cone = LinkCone::new(n, alpha, beta)?;
    if !opts.forced {
        check_link_domain(n, alpha, beta, opts.margin)?;
    }
    let lambda = select_lambda(link_lambda_formula(n, alpha, beta), opts)?;
    let pair = link_generators(alpha, beta, lambda)?;
    let relation = link_relation_residual(&pair, n);
    assemble(Cone::Link(cone), lambda, pair.a, pair.b, relation, opts)
}

pub fn build_polyhedron_with(cone: &Cone, opts: &BuildOptions) -> Result<FundamentalPolyhedron> {
    match *cone {
        Cone::Knot(k) => build_knot_polyhedron_with(k.n, k.alpha, opts),
        Cone::Link(l) => build_link_polyhedron_with(l.n, l.alpha, l.beta, opts),
    }
}

/// Rebuilds a polyhedron from stored coordinates, recomputing generators
/// and residuals. Used when re-reading exported files.
pub fn polyhedron_from_parts(
    cone: Cone,
    lambda: ModelParameter,
    vertices: Vec<ModelPoint>,
    north: ModelPoint,
    south: ModelPoint,
    verified: bool,
) -> Result<FundamentalPolyhedron> {
    let (a, b, relation) = match cone {
        Cone::Knot(k) => {
            let p = knot_generators(k.alpha, lambda)?;
            (p.a, p.b, knot_relation_residual(&p, k.n))
        }
        Cone::Link(l) => {
            let p = link_generators(l.alpha, l.beta, lambda)?;
            (p.a, p.b, link_relation_residual(&p, l.n))
        }
    };
    let expected = match cone {
        Cone::Knot(k) => 4 * k.n as usize + 2,
        Cone::Link(l) => 4 * l.n as usize,
    };
    if vertices.len() != expected {
        return Err(Error::InvalidParameter(format!(
            "expected {expected} vertices, found {}",
            vertices.len()
        )));
    }
    let mut poly = FundamentalPolyhedron {
        cone,
        lambda,
        vertices,
        north,
        south,
        a,
        b,
        orbit_residual: 0.0,
        relation_residual: relation,
        axis_residual: 0.0,
        verified,
    };
    let (ia, ib) = poly.axis_indices();
    poly.axis_residual = poly
        .vertex(ia)
        .apply(&a)
        .max_abs_diff(poly.vertex(ia))
        .max(poly.vertex(ib).apply(&b).max_abs_diff(poly.vertex(ib)));
    Ok(poly)
}

fn assemble(
    cone: Cone,
    lambda: ModelParameter,
    a: Isometry,
    b: Isometry,
    relation_residual: f64,
    opts: &BuildOptions,
) -> Result<FundamentalPolyhedron> {
    let n = cone.n() as usize;
    let knot = matches!(cone, Cone::Knot(_));
    let m = if knot { 4 * n + 2 } else { 4 * n };
    let ab = a * b;
    let ba = b * a;
    let p1 = ModelPoint::e1();
    let p2 = ModelPoint::e2();

    // Powers (AB)^k and (BA)^k for every exponent either route needs.
    let max_pow = n + 1;
    let mut ab_pow = Vec::with_capacity(max_pow + 1);
    let mut ba_pow = Vec::with_capacity(max_pow + 1);
    ab_pow.push(Isometry::identity());
    ba_pow.push(Isometry::identity());
    for k in 1..=max_pow {
        ab_pow.push(ab_pow[k - 1] * ab);
        ba_pow.push(ba_pow[k - 1] * ba);
    }

    let mut vertices = vec![ModelPoint::e1(); m];
    let mut set = |i: usize, p: ModelPoint| vertices[i - 1] = p;
    // The two routes meet at one vertex: P_{2n+3} for knots (reached as
    // P1·(AB)^{n+1}), P_{2n+2} for links (reached as P2·(AB)^n).
    let orbit_residual;
    if knot {
        for k in 0..=n {
            set(2 * k + 1, p1.apply(&ab_pow[k]));
        }
        for k in 1..=n + 1 {
            set(2 * k, p2.apply(&ab_pow[k - 1]));
        }
        for k in n + 1..=2 * n {
            set(2 * k + 1, p1.apply(&ba_pow[2 * n + 1 - k]));
        }
        for k in n + 2..=2 * n + 1 {
            set(2 * k, p2.apply(&ba_pow[2 * n + 2 - k]));
        }
        orbit_residual = p1.apply(&ab_pow[n + 1]).max_abs_diff(&vertices[2 * n + 2]);
    } else {
        for k in 0..=n {
            set(2 * k + 1, p1.apply(&ab_pow[k]));
        }
        for k in 1..=n {
            set(2 * k, p2.apply(&ab_pow[k - 1]));
        }
        for k in n + 1..=2 * n - 1 {
            set(2 * k + 1, p1.apply(&ba_pow[2 * n - k]));
        }
        for k in n + 1..=2 * n {
            set(2 * k, p2.apply(&ba_pow[2 * n + 1 - k]));
        }
        orbit_residual = p2.apply(&ab_pow[n]).max_abs_diff(&vertices[2 * n + 1]);
    }
    let mut orbit_residual = orbit_residual;
    if orbit_residual.is_nan() {
        orbit_residual = f64::INFINITY;
    }

    let (ia, ib) = axis_indices(&cone);
    let far_a = vertices[ia - 1];
    let far_b = vertices[ib - 1];
    let axis_residual = far_a
        .apply(&a)
        .max_abs_diff(&far_a)
        .max(far_b.apply(&b).max_abs_diff(&far_b));

    if !opts.forced {
        if !(orbit_residual <= ORBIT_TOL) {
            return Err(Error::OrbitInconsistent(orbit_residual));
        }
        if !(axis_residual <= ORBIT_TOL) {
            return Err(Error::AxisLanding(axis_residual));
        }
    }

    let north = ModelPoint::new(half_phase(far_a.z1), Complex::ZERO);
    let south = ModelPoint::new(Complex::ZERO, half_phase(far_b.z2));

    Ok(FundamentalPolyhedron {
        cone,
        lambda,
        vertices,
        north,
        south,
        a,
        b,
        orbit_residual,
        relation_residual,
        axis_residual,
        verified: !opts.forced,
    })
}

/// Unit complex number at half the phase of `z`, with the phase read in
/// `[0, 2π)`. The axis edge runs from the phase-0 endpoint in the positive
/// sense of rotation, so its midpoint sits at half the far endpoint's phase.
fn half_phase(z: Complex) -> Complex {
    Complex::from_polar(1.0, z.arg().rem_euclid(TAU) / 2.0)
}

/// Midpoint of the shorter great-circle arc from `p` to `q`.
pub fn geodesic_midpoint(p: &ModelPoint, q: &ModelPoint, lambda: ModelParameter) -> Result<ModelPoint> {
    ensure_normalized(p, lambda)?;
    ensure_normalized(q, lambda)?;
    let sum = ModelPoint::new(p.z1 + q.z1, p.z2 + q.z2);
    if sum.norm(lambda) <= 1e-20 {
        return Err(Error::Antipodal);
    }
    normalize(&sum, lambda)
}

/// Inner dihedral angle of a tetrahedron along the edge given by two of
/// its point indices, measured on the round sphere: the two remaining
/// vertices are projected onto the orthogonal complement of the plane
/// spanned by the edge endpoints and the angle between the projections is
/// returned.
pub fn dihedral_angle(t: &Tetrahedron, edge: (usize, usize), lambda: ModelParameter) -> Result<f64> {
    let (i, j) = edge;
    if i == j || i > 3 || j > 3 {
        return Err(Error::InvalidParameter(format!("invalid edge ({i}, {j})")));
    }
    let e = t.points.map(|p| embed(&p, lambda).to_real4());
    let others: Vec<usize> = (0..4).filter(|&k| k != i && k != j).collect();

    let u1 = unit(e[i]).ok_or(Error::DegenerateTetrahedron)?;
    let u2 = unit(reject(e[j], &[u1])).ok_or(Error::DegenerateTetrahedron)?;
    if crate::model::det4(e).abs() <= 1e-15 {
        return Err(Error::DegenerateTetrahedron);
    }
    let pc = unit(reject(e[others[0]], &[u1, u2])).ok_or(Error::ZeroProjection)?;
    let pd = unit(reject(e[others[1]], &[u1, u2])).ok_or(Error::ZeroProjection)?;
    Ok(dot4(&pc, &pd).clamp(-1.0, 1.0).acos())
}

fn reject(v: [f64; 4], basis: &[[f64; 4]]) -> [f64; 4] {
    let mut out = v;
    for b in basis {
        let c = dot4(&out, b);
        for k in 0..4 {
            out[k] -= c * b[k];
        }
    }
    out
}

fn unit(v: [f64; 4]) -> Option<[f64; 4]> {
    let len = dot4(&v, &v).sqrt();
    (len > 1e-14).then(|| v.map(|x| x / len))
}

/// Singular geodesic lengths read off the polyhedron: `4·arccos<P1, N>`
/// for knots, `2·arccos<P1, N>` and `2·arccos<P2, S>` for links.
///
/// The poles sit at half the phase of the far axis endpoint with that
/// phase taken in `[0, 2π)`, so the principal `arccos` already lands on the
/// right branch (`0 < l < 4π` for knots, `0 < l < 2π` for links).
pub fn geometric_length(poly: &FundamentalPolyhedron) -> Result<Vec<f64>> {
    let lambda = poly.lambda;
    let angle = |p: &ModelPoint, q: &ModelPoint| -> Result<f64> {
        let c = inner_product(p, q, lambda);
        if c.abs() >= 1.0 {
            return Err(Error::BranchAmbiguity);
        }
        clamped_acos(c)
    };
    let p1 = poly.vertex(1);
    let p2 = poly.vertex(2);
    match poly.cone {
        Cone::Knot(_) => Ok(vec![4.0 * angle(p1, &poly.north)?]),
        Cone::Link(_) => Ok(vec![
            2.0 * angle(p1, &poly.north)?,
            2.0 * angle(p2, &poly.south)?,
        ]),
    }
}
