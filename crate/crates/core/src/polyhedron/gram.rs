//! Closed forms for the Gram determinants of the knot tetrahedra.
//!
//! With `β = α − π` and `θ = π/(2n+1)`, the tetrahedra of `P_n` come in
//! two families indexed by `k`:
//!
//! * first family, `S N P_{2k+1} P_{2k+2}` for `k = 0..=n`:
//!   `cos²(|2n−4k+1| β/4) − U_{2k−1}(cos θ)² sin²(β/2)`
//! * second family, `S N P_{2k} P_{2k+1}` for `k = 1..=n`:
//!   `cos²(|2n−4k+3| β/4) − U_{2k−2}(cos θ)² sin²(β/2)`
//!
//! The remaining `2n` tetrahedra are images of these under the swap
//! symmetry and share their values.

use crate::chebyshev::{eval_t, eval_u};
use crate::cone::{knot_root_angle, Cone};
use crate::error::{Error, Result};
use crate::model::gram_det;

use super::FundamentalPolyhedron;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GramFamily {
    First,
    Second,
}

impl GramFamily {
    fn k_range(self, n: u32) -> (u32, u32) {
        match self {
            GramFamily::First => (0, n),
            GramFamily::Second => (1, n),
        }
    }

    /// 1-based index of the first boundary vertex of the tetrahedron.
    fn first_vertex(self, k: u32) -> usize {
        match self {
            GramFamily::First => 2 * k as usize + 1,
            GramFamily::Second => 2 * k as usize,
        }
    }
}

fn check_k(family: GramFamily, k: u32, n: u32) -> Result<()> {
    let (lo, hi) = family.k_range(n);
    if n >= 1 && (lo..=hi).contains(&k) {
        Ok(())
    } else {
        Err(Error::IndexOutOfRange {
            index: k as i64,
            range: format!("{lo}..={hi}"),
        })
    }
}

/// Closed-form Gram determinant; `beta_shift` is `α − π`.
pub fn gram_delta_closed_form(family: GramFamily, k: u32, n: u32, beta_shift: f64) -> Result<f64> {
    check_k(family, k, n)?;
    let theta = knot_root_angle(n);
    if !(beta_shift.abs() <= 2.0 * theta + 1e-12) {
        return Err(Error::InvalidParameter(format!(
            "α − π = {beta_shift} outside [−2π/(2n+1), 2π/(2n+1)]"
        )));
    }
    let (n, k) = (n as i32, k as i32);
    let (l, u_deg) = match family {
        GramFamily::First => ((2 * n - 4 * k + 1).abs(), 2 * k - 1),
        GramFamily::Second => ((2 * n - 4 * k + 3).abs(), 2 * k - 2),
    };
    // cos(L·β/4) = T_L(cos(β/4)).
    let c = eval_t(l, (beta_shift / 4.0).cos());
    let u = eval_u(u_deg, theta.cos());
    let s = (beta_shift / 2.0).sin();
    Ok(c * c - u * u * s * s)
}

/// The same determinant read off a built knot polyhedron.
pub fn gram_delta_direct(poly: &FundamentalPolyhedron, family: GramFamily, k: u32) -> Result<f64> {
    let Cone::Knot(cone) = poly.cone else {
        return Err(Error::InvalidParameter("Gram closed forms apply to knots".into()));
    };
    check_k(family, k, cone.n)?;
    let i = family.first_vertex(k);
    Ok(gram_det(&poly.south, &poly.north, poly.vertex(i), poly.vertex(i + 1)))
}
