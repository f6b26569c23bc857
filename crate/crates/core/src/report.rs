//! One record per cone: closed-form values next to the geometric ones and
//! the properness claims.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::cone::{
    knot_length_formula, knot_lambda_formula, knot_root_angle, knot_volume_formula, link_lambda_formula,
    link_length_formula, link_root_angle, link_volume_formula, Cone, DEFAULT_MARGIN,
};
use crate::error::Result;
use crate::export::real17;
use crate::model::DEFAULT_TOL;
use crate::polyhedron::{
    build_polyhedron_with, geometric_length, schlafli_volume_along, verify_properness, BuildOptions,
    ClaimReport, SchlafliPath,
};
use crate::quadrature::QuadratureOptions;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    pub tol: f64,
    pub margin: f64,
    /// Evaluate outside the domain; the record is stamped unverified.
    pub force: bool,
    pub lambda_offset: f64,
    pub path: SchlafliPath,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            margin: DEFAULT_MARGIN,
            force: false,
            lambda_offset: 0.0,
            path: SchlafliPath::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportRecord {
    pub kind: &'static str,
    pub n: u32,
    #[serde(serialize_with = "real17::f64")]
    pub alpha: f64,
    #[serde(serialize_with = "real17::option")]
    pub beta: Option<f64>,
    pub in_domain: bool,
    #[serde(serialize_with = "real17::f64")]
    pub lambda: f64,
    #[serde(serialize_with = "real17::f64")]
    pub theta: f64,
    /// Closed-form lengths, one per component.
    #[serde(serialize_with = "real17::vec")]
    pub lengths: Vec<f64>,
    /// Lengths read off the polyhedron.
    #[serde(serialize_with = "real17::vec")]
    pub geometric_lengths: Vec<f64>,
    #[serde(serialize_with = "real17::f64")]
    pub volume: f64,
    #[serde(serialize_with = "real17::f64")]
    pub volume_schlafli: f64,
    /// Largest claim residual.
    #[serde(serialize_with = "real17::f64")]
    pub max_claim_residual: f64,
    /// Largest residual of any kind: claims, orbit and relation residuals,
    /// and the two cross-route differences.
    #[serde(serialize_with = "real17::f64")]
    pub max_residual: f64,
    #[serde(serialize_with = "real17::f64")]
    pub tol: f64,
    pub pass: bool,
    pub unverified: bool,
    pub claims: Vec<ClaimReport>,
    /// Errors met along the geometric route, if any.
    pub notes: Vec<String>,
}

fn nan_max(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, |acc: f64, r| {
        if r.is_nan() || acc.is_nan() {
            f64::NAN
        } else {
            acc.max(r)
        }
    })
}

/// Builds and checks the polyhedron for `cone`.
///
/// Outside the domain this returns the domain error unless `force` is set,
/// in which case every quantity is computed from the unchecked formulas and
/// whatever fails along the geometric route is recorded as `NaN`.
pub fn evaluate(cone: &Cone, opts: &ReportOptions) -> Result<ReportRecord> {
    let in_domain = cone.check_domain(opts.margin);
    if !opts.force {
        in_domain.clone()?;
    }
    let n = cone.n();
    let (kind, alpha, beta, lambda, theta, lengths, volume) = match *cone {
        Cone::Knot(k) => (
            "knot",
            k.alpha,
            None,
            knot_lambda_formula(n, k.alpha),
            knot_root_angle(n),
            vec![knot_length_formula(n, k.alpha)],
            knot_volume_formula(n, k.alpha),
        ),
        Cone::Link(l) => {
            let len = link_length_formula(n, l.alpha, l.beta);
            (
                "link",
                l.alpha,
                Some(l.beta),
                link_lambda_formula(n, l.alpha, l.beta),
                link_root_angle(n),
                vec![len, len],
                link_volume_formula(n, l.alpha, l.beta),
            )
        }
    };
    let mut notes = Vec::new();
    let build = BuildOptions {
        margin: opts.margin,
        forced: opts.force,
        lambda_offset: opts.lambda_offset,
    };
    let poly = build_polyhedron_with(cone, &build);
    let (claims, geometric_lengths, structural) = match &poly {
        Ok(p) => {
            let g = geometric_length(p).unwrap_or_else(|e| {
                notes.push(format!("geometric length: {e}"));
                vec![f64::NAN; lengths.len()]
            });
            (
                verify_properness(p, opts.tol),
                g,
                vec![p.orbit_residual, p.relation_residual, p.axis_residual],
            )
        }
        Err(e) => {
            notes.push(format!("construction: {e}"));
            (Vec::new(), vec![f64::NAN; lengths.len()], vec![f64::NAN])
        }
    };
    let volume_schlafli = if in_domain.is_ok() && opts.lambda_offset == 0.0 {
        match schlafli_volume_along(cone, opts.path, QuadratureOptions::default()) {
            Ok(q) => q.value,
            Err(e) => {
                notes.push(format!("Schläfli volume: {e}"));
                f64::NAN
            }
        }
    } else {
        f64::NAN
    };

    let max_claim_residual = if claims.is_empty() {
        f64::NAN
    } else {
        nan_max(claims.iter().map(ClaimReport::max_residual))
    };
    let cross = lengths
        .iter()
        .zip(&geometric_lengths)
        .map(|(c, g)| (c - g).abs())
        .chain([(volume - volume_schlafli).abs()]);
    let max_residual = nan_max(
        [max_claim_residual]
            .into_iter()
            .chain(structural)
            .chain(cross),
    );
    let unverified = opts.force;
    let pass = !unverified && max_residual <= opts.tol && claims.iter().all(|c| c.pass);
    Ok(ReportRecord {
        kind,
        n,
        alpha,
        beta,
        in_domain: in_domain.is_ok(),
        lambda,
        theta,
        lengths,
        geometric_lengths,
        volume,
        volume_schlafli,
        max_claim_residual,
        max_residual,
        tol: opts.tol,
        pass,
        unverified,
        claims,
        notes,
    })
}

/// Angle in units of π, for display.
fn pi_units(x: f64) -> String {
    format!("{x:.12} ({:.9}π)", x / PI)
}

impl fmt::Display for ReportRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.beta {
            None => writeln!(f, "knot t({}, 2), n = {}", 2 * self.n + 1, self.n)?,
            Some(_) => writeln!(f, "link t({}, 2), n = {}", 2 * self.n, self.n)?,
        }
        writeln!(f, "  alpha            {}", pi_units(self.alpha))?;
        if let Some(b) = self.beta {
            writeln!(f, "  beta             {}", pi_units(b))?;
        }
        if self.unverified {
            writeln!(f, "  UNVERIFIED: forced evaluation (in domain: {})", self.in_domain)?;
        }
        writeln!(f, "  lambda           {:.15}", self.lambda)?;
        writeln!(f, "  theta            {}", pi_units(self.theta))?;
        for (i, (c, g)) in self.lengths.iter().zip(&self.geometric_lengths).enumerate() {
            writeln!(f, "  length[{i}]        {c:.15}  geometric {g:.15}")?;
        }
        writeln!(f, "  volume           {:.15}", self.volume)?;
        writeln!(f, "  volume (Schläfli) {:.15}", self.volume_schlafli)?;
        for c in &self.claims {
            writeln!(
                f,
                "  claim ({})        {}  max residual {:.3e}  {}",
                c.claim,
                if c.pass { "pass" } else { "FAIL" },
                c.max_residual(),
                c.details
            )?;
        }
        for note in &self.notes {
            writeln!(f, "  note: {note}")?;
        }
        write!(
            f,
            "  result           {} (max residual {:.3e}, tol {:.1e})",
            if self.pass { "PASS" } else { "FAIL" },
            self.max_residual,
            self.tol
        )
    }
}
