//! Volume by integrating the Schläfli formula `dV = ½ Σ l_i dα_i` from the
//! collapse point, where the volume vanishes. Each integrand evaluation
//! builds a polyhedron and reads the singular lengths off its vertices, so
//! this route shares nothing with the closed-form volume.

use crate::cone::{knot_sphericity_interval, link_root_angle, Cone};
use crate::error::Result;
use crate::quadrature::{integrate, QuadratureOptions, QuadratureResult};

use super::{build_knot_polyhedron_with, build_link_polyhedron_with, geometric_length, BuildOptions};

/// Integration path from the link collapse corner `(α₀, α₀)`,
/// `α₀ = (n−1)π/n`, to the target `(α, β)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SchlafliPath {
    /// Along the diagonal to `(s, s)`, `s = (α+β)/2`, then along the
    /// anti-diagonal to `(α, β)`.
    #[default]
    DiagonalThenAntiDiagonal,
    /// The straight segment from the corner.
    Straight,
}

fn build_options() -> BuildOptions {
    BuildOptions {
        margin: 0.0,
        ..BuildOptions::default()
    }
}

fn knot_length_at(n: u32, alpha: f64) -> Result<f64> {
    let poly = build_knot_polyhedron_with(n, alpha, &build_options())?;
    Ok(geometric_length(&poly)?[0])
}

fn link_lengths_at(n: u32, alpha: f64, beta: f64) -> Result<(f64, f64)> {
    let poly = build_link_polyhedron_with(n, alpha, beta, &build_options())?;
    let l = geometric_length(&poly)?;
    Ok((l[0], l[1]))
}

pub fn schlafli_volume(cone: &Cone) -> Result<f64> {
    schlafli_volume_along(cone, SchlafliPath::default(), QuadratureOptions::default()).map(|r| r.value)
}

pub fn schlafli_volume_along(
    cone: &Cone,
    path: SchlafliPath,
    opts: QuadratureOptions,
) -> Result<QuadratureResult> {
    cone.check_domain(0.0)?;
    match *cone {
        Cone::Knot(k) => {
            let n = k.n;
            let (lo, _) = knot_sphericity_interval(n);
            integrate(|t| Ok(knot_length_at(n, t)? / 2.0), lo, k.alpha, opts)
        }
        Cone::Link(l) => link_volume(l.n, l.alpha, l.beta, path, opts),
    }
}

fn link_volume(n: u32, alpha: f64, beta: f64, path: SchlafliPath, opts: QuadratureOptions) -> Result<QuadratureResult> {
    let a0 = link_root_angle(n);
    match path {
        SchlafliPath::DiagonalThenAntiDiagonal => {
            let s = (alpha + beta) / 2.0;
            let h = (alpha - beta) / 2.0;
            let half = QuadratureOptions {
                abs_tol: opts.abs_tol / 2.0,
                ..opts
            };
            let diag = integrate(
                |t| {
                    let (la, lb) = link_lengths_at(n, t, t)?;
                    Ok((la + lb) / 2.0)
                },
                a0,
                s,
                half,
            )?;
            let anti = integrate(
                |u| {
                    let (la, lb) = link_lengths_at(n, s + u, s - u)?;
                    Ok((la - lb) / 2.0)
                },
                0.0,
                h,
                half,
            )?;
            Ok(QuadratureResult {
                value: diag.value + anti.value,
                error_estimate: diag.error_estimate + anti.error_estimate,
                evaluations: diag.evaluations + anti.evaluations,
                segments: diag.segments + anti.segments,
            })
        }
        SchlafliPath::Straight => {
            let (da, db) = (alpha - a0, beta - a0);
            integrate(
                |t| {
                    let (la, lb) = link_lengths_at(n, a0 + t * da, a0 + t * db)?;
                    Ok((la * da + lb * db) / 2.0)
                },
                0.0,
                1.0,
                opts,
            )
        }
    }
}
