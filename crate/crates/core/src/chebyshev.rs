//! Chebyshev polynomials of the first and second kind.
//!
//! Evaluation runs the three-term recurrence `P_{m+1} = 2x P_m - P_{m-1}`,
//! which stays accurate at `|x|` close to 1 where the trigonometric form
//! divides by a vanishing `sin θ`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChebyshevKind {
    /// `T_m(cos θ) = cos(mθ)`
    First,
    /// `U_m(cos θ) = sin((m+1)θ) / sin θ`
    Second,
}

impl ChebyshevKind {
    pub fn eval(self, m: i32, x: f64) -> f64 {
        match self {
            ChebyshevKind::First => eval_t(m, x),
            ChebyshevKind::Second => eval_u(m, x),
        }
    }
}

/// `U_m(x)`, with `U_{-1} = 0` and `U_0 = 1`.
///
/// Negative degrees follow `U_{-m-2} = -U_m`, which is what the
/// trigonometric form gives, so the function is total over `i32`.
pub fn eval_u(m: i32, x: f64) -> f64 {
    if m < -1 {
        return -eval_u(-m - 2, x);
    }
    recurrence(0.0, 1.0, m + 1, x)
}

/// `T_m(x)`, with `T_{-m} = T_m`.
pub fn eval_t(m: i32, x: f64) -> f64 {
    let m = m.unsigned_abs() as i32;
    // T_{-1} = x makes the same recurrence produce T_0 = 1, T_1 = x.
    recurrence(x, 1.0, m + 1, x)
}

/// Starting from `(P_{-1}, P_0)`, advances `steps` times and returns `P_{steps-1}`.
fn recurrence(prev: f64, cur: f64, steps: i32, x: f64) -> f64 {
    if steps == 0 {
        return prev;
    }
    let (mut p0, mut p1) = (prev, cur);
    for _ in 1..steps {
        let next = 2.0 * x * p1 - p0;
        p0 = p1;
        p1 = next;
    }
    p1
}

/// The `m` roots of `U_m`, `cos(kπ/(m+1))` for `k = 1..=m`, strictly
/// decreasing. Empty for `m < 1`.
pub fn roots_u(m: u32) -> Vec<f64> {
    (1..=m)
        .map(|k| (k as f64 * PI / (m as f64 + 1.0)).cos())
        .collect()
}
