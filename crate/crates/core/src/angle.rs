//! Angle literals: plain decimals (`1.25`) or rational multiples of π
//! (`pi`, `-pi/2`, `3pi/5`, `3*pi/5`, `0.5pi`).

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse angle literal {0:?}: expected a decimal or a form like `pi`, `3pi/5`, `-pi/2`")]
pub struct ParseAngleError(pub String);

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AngleLiteral {
    /// `coef · π / den`
    PiMultiple { coef: f64, den: u64 },
    Decimal(f64),
}

impl AngleLiteral {
    pub fn radians(&self) -> f64 {
        match *self {
            AngleLiteral::PiMultiple { coef, den } => coef * PI / den as f64,
            AngleLiteral::Decimal(v) => v,
        }
    }

    /// Reduced `num·π/den`.
    pub fn pi_fraction(num: i64, den: u64) -> Self {
        let g = gcd(num.unsigned_abs(), den).max(1);
        AngleLiteral::PiMultiple {
            coef: (num / g as i64) as f64,
            den: den / g,
        }
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl fmt::Display for AngleLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            AngleLiteral::Decimal(v) => write!(f, "{v}"),
            AngleLiteral::PiMultiple { coef, den } => {
                if coef == 0.0 {
                    return write!(f, "0");
                }
                if coef == 1.0 {
                    write!(f, "pi")?;
                } else if coef == -1.0 {
                    write!(f, "-pi")?;
                } else {
                    write!(f, "{coef}pi")?;
                }
                if den != 1 {
                    write!(f, "/{den}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for AngleLiteral {
    type Err = ParseAngleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseAngleError(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let lower = t.to_ascii_lowercase();
        let Some(pos) = lower.find("pi").or_else(|| lower.find('π')) else {
            let v: f64 = lower.parse().map_err(|_| err())?;
            return if v.is_finite() { Ok(AngleLiteral::Decimal(v)) } else { Err(err()) };
        };
        let marker_len = if lower[pos..].starts_with("pi") { 2 } else { 'π'.len_utf8() };
        let head = lower[..pos].trim_end_matches('*');
        let tail = &lower[pos + marker_len..];
        let coef = match head {
            "" | "+" => 1.0,
            "-" => -1.0,
            h => h.parse::<f64>().map_err(|_| err())?,
        };
        let den = match tail {
            "" => 1,
            t => t
                .strip_prefix('/')
                .and_then(|d| d.parse::<u64>().ok())
                .filter(|&d| d > 0)
                .ok_or_else(err)?,
        };
        if !coef.is_finite() {
            return Err(err());
        }
        Ok(AngleLiteral::PiMultiple { coef, den })
    }
}

/// Parses an angle literal straight to radians.
pub fn parse_angle(s: &str) -> Result<f64, ParseAngleError> {
    s.parse::<AngleLiteral>().map(|a| a.radians())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn parses_pi_forms() {
        assert_eq!(parse_angle("pi").unwrap(), PI);
        assert_eq!(parse_angle("3pi/5").unwrap(), 3.0 * PI / 5.0);
        assert_eq!(parse_angle("3*pi/5").unwrap(), 3.0 * PI / 5.0);
        assert_eq!(parse_angle("-pi/2").unwrap(), -PI / 2.0);
        assert_eq!(parse_angle("0.5pi").unwrap(), 0.5 * PI);
        assert_eq!(parse_angle("2π/3").unwrap(), 2.0 * PI / 3.0);
        assert_eq!(parse_angle("PI").unwrap(), PI);
        assert_eq!(parse_angle("1.25").unwrap(), 1.25);
        assert_eq!(parse_angle("0.2").unwrap(), 0.2);
    }

    #[test]
    fn rejects_garbage() {
        for s in ["", "pie", "pi/0", "3pi/x", "abc", "pi/2/3", "inf", "NaN"] {
            assert!(parse_angle(s).is_err(), "{s}");
        }
    }

    #[test]
    fn displays_reduced_fractions() {
        assert_eq!(AngleLiteral::pi_fraction(1, 3).to_string(), "pi/3");
        assert_eq!(AngleLiteral::pi_fraction(10, 6).to_string(), "5pi/3");
        assert_eq!(AngleLiteral::pi_fraction(-2, 2).to_string(), "-pi");
        assert_eq!(AngleLiteral::pi_fraction(4, 2).to_string(), "2pi");
        assert_eq!(AngleLiteral::pi_fraction(0, 7).to_string(), "0");
    }

    proptest! {
        #[test]
        fn pi_forms_round_trip(num in -40i64..40, den in 1u64..40) {
            let lit = AngleLiteral::pi_fraction(num, den);
            let back: AngleLiteral = lit.to_string().parse().unwrap();
            prop_assert_eq!(back.radians(), lit.radians());
        }

        #[test]
        fn decimals_round_trip(v in -10.0f64..10.0) {
            let lit = AngleLiteral::Decimal(v);
            let back: AngleLiteral = lit.to_string().parse().unwrap();
            prop_assert_eq!(back, lit);
        }
    }
}
