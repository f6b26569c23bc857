//! Grid scans over the cone angles, written as CSV.
//!
//! The first line is a version comment, the second the fixed column list.
//! Reals use 17 significant digits so identical inputs give byte-identical
//! files. Points outside the domain keep their row with `in_domain = false`
//! and empty numeric fields.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use crate::cone::{knot_sphericity_interval, Cone, KnotCone, LinkCone, DEFAULT_MARGIN};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::export::format_real;
use crate::model::DEFAULT_TOL;
use crate::report::{evaluate, ReportOptions, ReportRecord};

pub const CSV_VERSION_LINE: &str = "# torus-cone scan v1";

pub const CSV_COLUMNS: [&str; 16] = [
    "kind",
    "n",
    "alpha",
    "beta",
    "in_domain",
    "lambda",
    "theta",
    "length_alpha",
    "length_beta",
    "geometric_length_alpha",
    "geometric_length_beta",
    "volume",
    "volume_schlafli",
    "max_residual",
    "pass",
    "unverified",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanKind {
    Knot,
    Link,
}

/// `steps` equally spaced values from `min` to `max`, both included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRange {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl AxisRange {
    pub fn values(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                // Fill from both ends so the grid is exactly symmetric.
                let t = i as f64 / last;
                if i * 2 < self.steps {
                    self.min + t * (self.max - self.min)
                } else {
                    self.max - (1.0 - t) * (self.max - self.min)
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanGrid {
    pub kind: ScanKind,
    pub n: u32,
    pub alpha: AxisRange,
    /// Links only.
    pub beta: Option<AxisRange>,
    /// Distance kept from the boundary of the default ranges.
    pub margin: f64,
}

impl ScanGrid {
    /// `steps` points from `lo + margin` to `hi − margin` on the knot's
    /// sphericity interval.
    pub fn knot(n: u32, steps: usize, margin: f64) -> Self {
        let (lo, hi) = if n >= 1 { knot_sphericity_interval(n) } else { (0.0, TAU) };
        Self {
            kind: ScanKind::Knot,
            n,
            alpha: AxisRange {
                min: lo + margin,
                max: hi - margin,
                steps,
            },
            beta: None,
            margin,
        }
    }

    /// `steps × steps` points over `[margin, 2π − margin]²`. Most of the
    /// square lies outside the link domain; those rows are flagged.
    pub fn link(n: u32, steps: usize, margin: f64) -> Self {
        let axis = AxisRange {
            min: margin,
            max: TAU - margin,
            steps,
        };
        Self {
            kind: ScanKind::Link,
            n,
            alpha: axis,
            beta: Some(axis),
            margin,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if !(self.margin >= 0.0) {
            return bad(format!("margin {} must be ≥ 0", self.margin));
        }
        let min_n = match self.kind {
            ScanKind::Knot => 1,
            ScanKind::Link => 2,
        };
        if self.n < min_n {
            return bad(format!("n = {} must be ≥ {min_n}", self.n));
        }
        let axes = [Some(self.alpha), self.beta];
        for axis in axes.iter().flatten() {
            if axis.steps < 2 {
                return bad(format!("step count {} must be ≥ 2", axis.steps));
            }
            if !(axis.min.is_finite() && axis.max.is_finite() && axis.min <= axis.max) {
                return bad(format!("invalid range [{}, {}]", axis.min, axis.max));
            }
        }
        if (self.kind == ScanKind::Link) != self.beta.is_some() {
            return bad("links need a beta range and knots must not have one".into());
        }
        Ok(())
    }

    /// Grid points in row order: `alpha` outer, `beta` inner.
    pub fn points(&self) -> Vec<(f64, Option<f64>)> {
        let alphas = self.alpha.values();
        match self.beta {
            None => alphas.into_iter().map(|a| (a, None)).collect(),
            Some(b) => {
                let betas = b.values();
                alphas
                    .iter()
                    .flat_map(|&a| betas.iter().map(move |&b| (a, Some(b))))
                    .collect()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub tol: f64,
    /// Evaluate out-of-domain points too, stamped unverified.
    pub force: bool,
    pub exec: Execution,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            force: false,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanRow {
    pub kind: ScanKind,
    pub n: u32,
    pub alpha: f64,
    pub beta: Option<f64>,
    pub in_domain: bool,
    /// `None` for out-of-domain points (unless forced) and for angles
    /// outside `(0, 2π)`.
    pub record: Option<ReportRecord>,
}

fn evaluate_point(kind: ScanKind, n: u32, alpha: f64, beta: Option<f64>, opts: &ScanOptions) -> ScanRow {
    let cone = match (kind, beta) {
        (ScanKind::Knot, _) => KnotCone::new(n, alpha).map(Cone::Knot),
        (ScanKind::Link, b) => LinkCone::new(n, alpha, b.unwrap_or(f64::NAN)).map(Cone::Link),
    };
    let in_domain = cone
        .as_ref()
        .map(|c| c.check_domain(DEFAULT_MARGIN).is_ok())
        .unwrap_or(false);
    let record = match cone {
        Ok(c) if in_domain || opts.force => {
            let ro = ReportOptions {
                tol: opts.tol,
                force: opts.force,
                ..ReportOptions::default()
            };
            evaluate(&c, &ro).ok()
        }
        _ => None,
    };
    ScanRow {
        kind,
        n,
        alpha,
        beta,
        in_domain,
        record,
    }
}

pub fn run_scan(grid: &ScanGrid, opts: &ScanOptions) -> Result<Vec<ScanRow>> {
    grid.validate()?;
    let points = grid.points();
    Ok(opts
        .exec
        .map(&points, |&(a, b)| evaluate_point(grid.kind, grid.n, a, b, opts)))
}

fn push_real(line: &mut String, x: Option<f64>) {
    line.push(',');
    if let Some(v) = x.filter(|v| v.is_finite()) {
        line.push_str(&format_real(v));
    }
}

pub fn csv_header() -> String {
    format!("{CSV_VERSION_LINE}\n{}\n", CSV_COLUMNS.join(","))
}

pub fn csv_row(row: &ScanRow) -> String {
    let mut line = String::new();
    let kind = match row.kind {
        ScanKind::Knot => "knot",
        ScanKind::Link => "link",
    };
    let _ = write!(line, "{kind},{},{}", row.n, format_real(row.alpha));
    push_real(&mut line, row.beta);
    let _ = write!(line, ",{}", row.in_domain);
    let r = row.record.as_ref();
    push_real(&mut line, r.map(|r| r.lambda));
    push_real(&mut line, r.map(|r| r.theta));
    push_real(&mut line, r.and_then(|r| r.lengths.first().copied()));
    push_real(&mut line, r.and_then(|r| r.lengths.get(1).copied()));
    push_real(&mut line, r.and_then(|r| r.geometric_lengths.first().copied()));
    push_real(&mut line, r.and_then(|r| r.geometric_lengths.get(1).copied()));
    push_real(&mut line, r.map(|r| r.volume));
    push_real(&mut line, r.map(|r| r.volume_schlafli));
    push_real(&mut line, r.map(|r| r.max_residual));
    match r {
        Some(r) => {
            let _ = write!(line, ",{},{}", r.pass, r.unverified);
        }
        None => line.push_str(",,"),
    }
    line.push('\n');
    line
}

pub fn to_csv(rows: &[ScanRow]) -> String {
    let mut out = csv_header();
    for row in rows {
        out.push_str(&csv_row(row));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn seq() -> ScanOptions {
        ScanOptions {
            exec: Execution::Sequential,
            ..ScanOptions::default()
        }
    }

    #[test]
    fn knot_scan_volume_increases() {
        let grid = ScanGrid::knot(1, 100, 1e-3);
        let rows = run_scan(&grid, &seq()).unwrap();
        assert_eq!(rows.len(), 100);
        assert!(rows.iter().all(|r| r.in_domain && r.record.as_ref().unwrap().pass));
        let vols: Vec<f64> = rows.iter().map(|r| r.record.as_ref().unwrap().volume).collect();
        assert!(vols.windows(2).all(|w| w[1] > w[0]));
        let csv = to_csv(&rows);
        assert_eq!(csv.lines().count(), 102);
        assert!(csv.starts_with(CSV_VERSION_LINE));
    }

    #[test]
    fn link_scan_in_domain_is_symmetric() {
        let steps = 50;
        let grid = ScanGrid::link(2, steps, 1e-3);
        let rows = run_scan(&grid, &seq()).unwrap();
        assert_eq!(rows.len(), steps * steps);
        let flag = |i: usize, j: usize| rows[i * steps + j].in_domain;
        let mut inside = 0;
        for i in 0..steps {
            for j in 0..steps {
                // (α, β) ↦ (2π − β, 2π − α) preserves the domain.
                assert_eq!(flag(i, j), flag(steps - 1 - j, steps - 1 - i), "({i}, {j})");
                // So does swapping α and β.
                assert_eq!(flag(i, j), flag(j, i));
                inside += flag(i, j) as usize;
            }
        }
        assert!(inside > 0 && inside < steps * steps);
        for r in &rows {
            assert_eq!(r.in_domain, r.record.is_some());
            if let Some(rec) = &r.record {
                assert!(rec.pass, "{rec}");
            }
        }
    }

    #[test]
    fn empty_intersection_gives_flags_only() {
        let grid = ScanGrid {
            kind: ScanKind::Knot,
            n: 1,
            alpha: AxisRange {
                min: 0.1,
                max: 0.5,
                steps: 5,
            },
            beta: None,
            margin: 0.0,
        };
        let rows = run_scan(&grid, &seq()).unwrap();
        assert!(rows.iter().all(|r| !r.in_domain && r.record.is_none()));
        let csv = to_csv(&rows);
        for line in csv.lines().skip(2) {
            assert!(line.ends_with(",false,,,,,,,,,,,"), "{line}");
        }
    }

    #[test]
    fn csv_is_stable_across_strategies() {
        let grid = ScanGrid::link(3, 9, 1e-2);
        let a = to_csv(&run_scan(&grid, &seq()).unwrap());
        let par = ScanOptions {
            exec: Execution::Parallel,
            ..ScanOptions::default()
        };
        let b = to_csv(&run_scan(&grid, &par).unwrap());
        assert_eq!(a, b);
        assert_eq!(a, to_csv(&run_scan(&grid, &seq()).unwrap()));
    }

    #[test]
    fn invalid_grids_are_rejected() {
        let mut g = ScanGrid::knot(1, 1, 1e-3);
        assert!(g.validate().is_err());
        g.alpha.steps = 3;
        g.margin = -1.0;
        assert!(g.validate().is_err());
        assert!(ScanGrid::link(1, 5, 0.0).validate().is_err());
        let mut g = ScanGrid::knot(2, 5, 0.0);
        g.beta = Some(g.alpha);
        assert!(g.validate().is_err());
    }

    #[test]
    fn forced_rows_are_unverified() {
        let grid = ScanGrid {
            kind: ScanKind::Knot,
            n: 1,
            alpha: AxisRange {
                min: PI / 4.0,
                max: PI,
                steps: 2,
            },
            beta: None,
            margin: 0.0,
        };
        let opts = ScanOptions {
            force: true,
            ..seq()
        };
        let rows = run_scan(&grid, &opts).unwrap();
        assert!(rows.iter().all(|r| r.record.as_ref().unwrap().unverified));
        assert!(!rows[0].in_domain && rows[1].in_domain);
        assert!(csv_row(&rows[0]).ends_with(",false,true\n"));
    }

    #[test]
    fn axis_values_are_symmetric() {
        let axis = AxisRange {
            min: 1e-3,
            max: TAU - 1e-3,
            steps: 50,
        };
        let v = axis.values();
        assert_eq!(v[0], axis.min);
        assert_eq!(v[49], axis.max);
        for i in 0..50 {
            assert!((v[i] + v[49 - i] - TAU).abs() <= 1e-15);
        }
    }
}
