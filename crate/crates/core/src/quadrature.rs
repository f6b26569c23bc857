//! Globally adaptive Gauss–Kronrod (7, 15) quadrature.
//!
//! The integrand is fallible so that each node can build a polyhedron and
//! propagate construction errors. Only interior nodes are ever evaluated,
//! which matters when an endpoint is a collapse point of the geometry.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    /// Target for the summed absolute error estimate.
    pub abs_tol: f64,
    pub max_segments: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            max_segments: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
    pub segments: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F>(f: &mut F, a: f64, b: f64) -> Result<Segment>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx)? + f(center + dx)?;
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Ok(Segment {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    })
}

/// Integrates `f` over `[a, b]` (or `[b, a]` with a sign flip).
pub fn integrate<F>(mut f: F, a: f64, b: f64, opts: QuadratureOptions) -> Result<QuadratureResult>
where
    F: FnMut(f64) -> Result<f64>,
{
    if a == b {
        return Ok(QuadratureResult {
            value: 0.0,
            error_estimate: 0.0,
            evaluations: 0,
            segments: 0,
        });
    }
    let mut segments = vec![gk15(&mut f, a, b)?];
    let mut evaluations = 15;
    loop {
        let total_err: f64 = segments.iter().map(|s| s.error).sum();
        if total_err <= opts.abs_tol {
            break;
        }
        if segments.len() >= opts.max_segments || !total_err.is_finite() {
            return Err(Error::Quadrature {
                estimate: total_err,
            });
        }
        let worst = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let s = segments.swap_remove(worst);
        let mid = 0.5 * (s.a + s.b);
        segments.push(gk15(&mut f, s.a, mid)?);
        segments.push(gk15(&mut f, mid, s.b)?);
        evaluations += 30;
    }
    // Sum in a fixed order so results do not depend on refinement history.
    segments.sort_by(|x, y| x.a.total_cmp(&y.a));
    Ok(QuadratureResult {
        value: segments.iter().map(|s| s.value).sum(),
        error_estimate: segments.iter().map(|s| s.error).sum(),
        evaluations,
        segments: segments.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_are_exact() {
        let r = integrate(|x| Ok(3.0 * x * x - 2.0 * x + 1.0), -1.0, 2.0, Default::default()).unwrap();
        assert_abs_diff_eq!(r.value, 9.0 - 3.0 + 3.0, epsilon = 1e-13);
        assert_eq!(r.segments, 1);
    }

    #[test]
    fn reversed_interval_flips_sign() {
        let r = integrate(|x| Ok(x.sin()), PI, 0.0, Default::default()).unwrap();
        assert_abs_diff_eq!(r.value, -2.0, epsilon = 1e-13);
    }

    #[test]
    fn refines_sharp_integrands() {
        let opts = QuadratureOptions {
            abs_tol: 1e-10,
            max_segments: 500,
        };
        let r = integrate(|x| Ok(1.0 / (1e-3 + x * x)), -1.0, 1.0, opts).unwrap();
        let exact = 2.0 * (1.0 / 1e-3f64.sqrt()) * (1.0 / 1e-3f64.sqrt()).atan();
        assert!(r.segments > 1);
        assert_abs_diff_eq!(r.value, exact, epsilon = 1e-8);
    }

    #[test]
    fn endpoint_singularity_is_not_evaluated() {
        let r = integrate(
            |x| {
                if x <= 0.0 {
                    Err(Error::Antipodal)
                } else {
                    Ok(x.sqrt())
                }
            },
            0.0,
            1.0,
            QuadratureOptions {
                abs_tol: 1e-9,
                max_segments: 200,
            },
        )
        .unwrap();
        assert_abs_diff_eq!(r.value, 2.0 / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn errors_propagate_and_budget_is_enforced() {
        let e = integrate(|_| Err(Error::ZeroNorm), 0.0, 1.0, Default::default());
        assert_eq!(e.unwrap_err(), Error::ZeroNorm);
        let opts = QuadratureOptions {
            abs_tol: 1e-14,
            max_segments: 3,
        };
        assert!(matches!(
            integrate(|x| Ok((50.0 * x).sin().abs()), 0.0, 1.0, opts),
            Err(Error::Quadrature { .. })
        ));
    }
}
