//! Verification suites. Every suite counts checks and failures and keeps
//! the worst residual; samples come from a seeded ChaCha8 stream, so two
//! runs with the same configuration check exactly the same points.
//!
//! Thresholds of the identity suites are fixed per suite. The configured
//! tolerance applies to the properness claims.

use std::f64::consts::{PI, TAU};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cone::{
    knot_length_formula, knot_sphericity_interval, knot_volume_formula, link_length_formula, link_root_angle,
    link_volume_formula, Cone, KnotCone, LinkCone,
};
use crate::error::Result;
use crate::exec::Execution;
use crate::holonomy::{
    generator_a, generator_b, knot_generators, knot_relation_residual, knot_factorization_check,
    link_factorization_check,
};
use crate::model::{is_isometry, ModelParameter};
use crate::polyhedron::{
    build_knot_polyhedron_with, build_link_polyhedron_with, geometric_length, gram_delta_closed_form,
    gram_delta_direct, schlafli_volume_along, BuildOptions, FundamentalPolyhedron, GramFamily, SchlafliPath,
};
use crate::quadrature::QuadratureOptions;

pub const ISOMETRY_THRESHOLD: f64 = 1e-12;
pub const FACTORIZATION_THRESHOLD: f64 = 1e-9;
pub const RELATION_THRESHOLD: f64 = 1e-10;
pub const GRAM_THRESHOLD: f64 = 1e-9;
pub const GRAM_BOUNDARY_THRESHOLD: f64 = 1e-8;
pub const LENGTH_THRESHOLD: f64 = 1e-9;
pub const VOLUME_THRESHOLD: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    All,
    Knot,
    Link,
}

impl Scope {
    fn knots(self) -> bool {
        matches!(self, Scope::All | Scope::Knot)
    }
    fn links(self) -> bool {
        matches!(self, Scope::All | Scope::Link)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub scope: Scope,
    pub max_n: u32,
    /// Points per axis on the domain grids.
    pub grid: usize,
    /// Tolerance for the properness claims.
    pub tol: f64,
    pub seed: u64,
    pub isometry_samples: usize,
    pub factorization_samples: usize,
    /// Test hook: added to every selected `λ`. Any nonzero value should
    /// make the run fail.
    pub lambda_fault: f64,
    pub exec: Execution,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            scope: Scope::All,
            max_n: 4,
            grid: 25,
            tol: 1e-8,
            seed: 0x5eed,
            isometry_samples: 500,
            factorization_samples: 200,
            lambda_fault: 0.0,
            exec: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub checked: usize,
    pub failed: usize,
    pub worst: f64,
    pub threshold: f64,
    pub first_failure: Option<String>,
}

impl SuiteResult {
    pub fn pass(&self) -> bool {
        self.failed == 0 && self.checked > 0
    }
}

/// Accumulates residual checks for one suite.
struct Tally {
    result: SuiteResult,
}

impl Tally {
    fn new(name: &'static str, threshold: f64) -> Self {
        Self {
            result: SuiteResult {
                name,
                checked: 0,
                failed: 0,
                worst: 0.0,
                threshold,
                first_failure: None,
            },
        }
    }

    /// A residual that must stay at or below the threshold.
    fn record(&mut self, residual: f64, what: impl FnOnce() -> String) {
        let r = &mut self.result;
        r.checked += 1;
        if residual.is_nan() || residual > r.worst {
            r.worst = if residual.is_nan() { f64::INFINITY } else { residual };
        }
        if !(residual <= r.threshold) {
            r.failed += 1;
            if r.first_failure.is_none() {
                r.first_failure = Some(format!("{} (residual {residual:.3e})", what()));
            }
        }
    }

    fn record_result(&mut self, value: Result<f64>, what: impl FnOnce() -> String) {
        match value {
            Ok(r) => self.record(r, what),
            Err(e) => {
                let label = what();
                self.record(f64::INFINITY, || format!("{label}: {e}"));
            }
        }
    }

    fn finish(self) -> SuiteResult {
        self.result
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifySummary {
    pub suites: Vec<SuiteResult>,
}

impl VerifySummary {
    pub fn pass(&self) -> bool {
        !self.suites.is_empty() && self.suites.iter().all(SuiteResult::pass)
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }
}

impl fmt::Display for VerifySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.suites {
            writeln!(
                f,
                "{:<24} {:>6} checked {:>5} failed  worst {:.3e}  (threshold {:.0e})  {}",
                s.name,
                s.checked,
                s.failed,
                s.worst,
                s.threshold,
                if s.pass() { "ok" } else { "FAIL" }
            )?;
            if let Some(first) = &s.first_failure {
                writeln!(f, "    first failure: {first}")?;
            }
        }
        let total: usize = self.suites.iter().map(|s| s.checked).sum();
        let failed: usize = self.suites.iter().map(|s| s.failed).sum();
        write!(
            f,
            "{} checks, {} failed: {}",
            total,
            failed,
            if self.pass() { "PASS" } else { "FAIL" }
        )
    }
}

/// `g` interior points of the knot interval, equally spaced and excluding
/// both endpoints.
pub fn knot_grid(n: u32, g: usize) -> Vec<f64> {
    let (lo, hi) = knot_sphericity_interval(n);
    (1..=g).map(|j| lo + (hi - lo) * j as f64 / (g + 1) as f64).collect()
}

/// `g × g` interior points of the link domain, laid out along its
/// diagonals: `α + β` and `α − β` each take `g` interior values.
pub fn link_grid(n: u32, g: usize) -> Vec<(f64, f64)> {
    let a0 = link_root_angle(n);
    let h_max = TAU * (1.0 - 1.0 / n as f64);
    let mut out = Vec::with_capacity(g * g);
    for i in 1..=g {
        let s = a0 + 2.0 * (PI - a0) * i as f64 / (g + 1) as f64;
        for j in 1..=g {
            let h = -h_max + 2.0 * h_max * j as f64 / (g + 1) as f64;
            out.push((s + h / 2.0, s - h / 2.0));
        }
    }
    out
}

pub fn run(cfg: &VerifyConfig) -> VerifySummary {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut suites = vec![isometry_suite(cfg, &mut rng)];
    if cfg.scope.knots() && cfg.max_n >= 1 {
        suites.push(knot_factorization_suite(cfg, &mut rng));
        suites.push(knot_roots(cfg, &mut rng));
        let polys = knot_polyhedra(cfg);
        suites.push(knot_properness(cfg, &polys));
        suites.push(gram_closed_forms(cfg, &polys));
        suites.push(knot_lengths(&polys));
        suites.push(knot_volumes(cfg));
    }
    if cfg.scope.links() && cfg.max_n >= 2 {
        suites.push(link_factorization_suite(cfg, &mut rng));
        let polys = link_polyhedra(cfg);
        suites.push(link_properness(cfg, &polys));
        suites.push(link_lengths(&polys));
        suites.push(link_volumes(cfg));
    }
    VerifySummary { suites }
}

fn random_lambda<R: Rng>(rng: &mut R) -> ModelParameter {
    loop {
        let l: f64 = rng.random_range(-1.0..1.0);
        if let Ok(p) = ModelParameter::new(l) {
            return p;
        }
    }
}

fn random_angle<R: Rng>(rng: &mut R) -> f64 {
    loop {
        let a: f64 = rng.random_range(0.0..TAU);
        if a > 0.0 {
            return a;
        }
    }
}

fn isometry_suite(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> SuiteResult {
    let samples: Vec<(f64, ModelParameter)> = (0..cfg.isometry_samples)
        .map(|_| (random_angle(rng), random_lambda(rng)))
        .collect();
    let residuals = cfg.exec.map(&samples, |&(a, l)| {
        let ra = is_isometry(&generator_a(a, l), l, ISOMETRY_THRESHOLD).residual;
        let rb = is_isometry(&generator_b(a, l), l, ISOMETRY_THRESHOLD).residual;
        (ra, rb)
    });
    let mut t = Tally::new("generators-isometric", ISOMETRY_THRESHOLD);
    for (&(a, l), (ra, rb)) in samples.iter().zip(residuals) {
        t.record(ra, || format!("A(α={a}, λ={l})"));
        t.record(rb, || format!("B(α={a}, λ={l})"));
    }
    t.finish()
}

fn knot_factorization_suite(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> SuiteResult {
    let samples: Vec<(u32, f64, ModelParameter)> = (1..=cfg.max_n.max(6))
        .flat_map(|n| (0..cfg.factorization_samples).map(move |_| n))
        .map(|n| (n, random_angle(rng), random_lambda(rng)))
        .collect();
    let residuals = cfg
        .exec
        .map(&samples, |&(n, a, l)| knot_factorization_check(n, a, l));
    let mut t = Tally::new("knot-factorization", FACTORIZATION_THRESHOLD);
    for (&(n, a, l), r) in samples.iter().zip(residuals) {
        t.record_result(r, || format!("n={n} α={a} λ={l}"));
    }
    t.finish()
}

/// At every root `λ sin(α/2) = cos(kπ/(2n+1))` the knot relation holds.
fn knot_roots(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> SuiteResult {
    let mut samples = Vec::new();
    for n in 1..=cfg.max_n.max(6) {
        for k in 1..=2 * n {
            let root = (k as f64 * PI / (2 * n + 1) as f64).cos();
            let mut found = 0;
            while found < 4 {
                let a = random_angle(rng);
                let l = root / (a / 2.0).sin() + cfg.lambda_fault;
                if let Ok(l) = ModelParameter::new(l) {
                    samples.push((n, k, a, l));
                    found += 1;
                }
            }
        }
    }
    let residuals = cfg.exec.map(&samples, |&(n, _, a, l)| {
        knot_generators(a, l).map(|p| knot_relation_residual(&p, n))
    });
    let mut t = Tally::new("knot-relation-at-roots", RELATION_THRESHOLD);
    for (&(n, k, a, l), r) in samples.iter().zip(residuals) {
        t.record_result(r, || format!("n={n} root k={k} α={a} λ={l}"));
    }
    t.finish()
}

fn link_factorization_suite(cfg: &VerifyConfig, rng: &mut ChaCha8Rng) -> SuiteResult {
    let samples: Vec<(u32, f64, f64, ModelParameter)> = (2..=cfg.max_n.max(6))
        .flat_map(|n| (0..cfg.factorization_samples).map(move |_| n))
        .map(|n| (n, random_angle(rng), random_angle(rng), random_lambda(rng)))
        .collect();
    let residuals = cfg
        .exec
        .map(&samples, |&(n, a, b, l)| link_factorization_check(n, a, b, l));
    let mut t = Tally::new("link-factorization", FACTORIZATION_THRESHOLD);
    for (&(n, a, b, l), r) in samples.iter().zip(residuals) {
        t.record_result(r, || format!("n={n} α={a} β={b} λ={l}"));
    }
    t.finish()
}

type Built = (Cone, Result<FundamentalPolyhedron>);

fn build_opts(cfg: &VerifyConfig) -> BuildOptions {
    BuildOptions {
        lambda_offset: cfg.lambda_fault,
        ..BuildOptions::default()
    }
}

fn knot_polyhedra(cfg: &VerifyConfig) -> Vec<Built> {
    let cones: Vec<Cone> = (1..=cfg.max_n)
        .flat_map(|n| knot_grid(n, cfg.grid).into_iter().map(move |a| Cone::Knot(KnotCone { n, alpha: a })))
        .collect();
    let opts = build_opts(cfg);
    let polys = cfg.exec.map(&cones, |c| match *c {
        Cone::Knot(k) => build_knot_polyhedron_with(k.n, k.alpha, &opts),
        Cone::Link(l) => build_link_polyhedron_with(l.n, l.alpha, l.beta, &opts),
    });
    cones.into_iter().zip(polys).collect()
}

fn link_polyhedra(cfg: &VerifyConfig) -> Vec<Built> {
    let cones: Vec<Cone> = (2..=cfg.max_n)
        .flat_map(|n| {
            link_grid(n, cfg.grid)
                .into_iter()
                .map(move |(a, b)| Cone::Link(LinkCone { n, alpha: a, beta: b }))
        })
        .collect();
    let opts = build_opts(cfg);
    let polys = cfg.exec.map(&cones, |c| match *c {
        Cone::Link(l) => build_link_polyhedron_with(l.n, l.alpha, l.beta, &opts),
        Cone::Knot(k) => build_knot_polyhedron_with(k.n, k.alpha, &opts),
    });
    cones.into_iter().zip(polys).collect()
}

fn label(c: &Cone) -> String {
    match c {
        Cone::Knot(k) => format!("knot n={} α={}", k.n, k.alpha),
        Cone::Link(l) => format!("link n={} α={} β={}", l.n, l.alpha, l.beta),
    }
}

fn properness(name: &'static str, cfg: &VerifyConfig, polys: &[Built]) -> SuiteResult {
    let reports = cfg.exec.map(polys, |(_, p)| {
        p.as_ref().map(|p| (p.verify(cfg.tol), p.relation_residual)).map_err(Clone::clone)
    });
    let mut t = Tally::new(name, cfg.tol);
    for ((cone, _), r) in polys.iter().zip(reports) {
        match r {
            Ok((claims, relation)) => {
                t.record(relation.max(0.0), || format!("{} relation", label(cone)));
                for c in claims {
                    t.record(c.max_residual(), || format!("{} claim ({})", label(cone), c.claim));
                }
            }
            Err(e) => t.record(f64::INFINITY, || format!("{}: {e}", label(cone))),
        }
    }
    t.finish()
}

fn knot_properness(cfg: &VerifyConfig, polys: &[Built]) -> SuiteResult {
    properness("knot-properness", cfg, polys)
}

fn link_properness(cfg: &VerifyConfig, polys: &[Built]) -> SuiteResult {
    properness("link-properness", cfg, polys)
}

fn gram_closed_forms(cfg: &VerifyConfig, polys: &[Built]) -> SuiteResult {
    let mut t = Tally::new("gram-closed-forms", GRAM_THRESHOLD);
    for (cone, p) in polys {
        let Cone::Knot(k) = *cone else { continue };
        let p = match p {
            Ok(p) => p,
            Err(e) => {
                t.record(f64::INFINITY, || format!("{}: {e}", label(cone)));
                continue;
            }
        };
        for (family, ks) in [(GramFamily::First, 0..=k.n), (GramFamily::Second, 1..=k.n)] {
            for j in ks {
                let r = gram_delta_direct(p, family, j).and_then(|d| {
                    gram_delta_closed_form(family, j, k.n, k.alpha - PI).map(|c| (d - c).abs())
                });
                t.record_result(r, || format!("{} {family:?} k={j}", label(cone)));
            }
        }
    }
    // The closed forms vanish at the ends of the interval.
    let mut ends = Tally::new("gram-vanishing-at-ends", GRAM_BOUNDARY_THRESHOLD);
    for n in 1..=cfg.max_n {
        let theta = PI / (2 * n + 1) as f64;
        for b in [-2.0 * theta, 2.0 * theta] {
            for (family, ks) in [(GramFamily::First, 0..=n), (GramFamily::Second, 1..=n)] {
                for j in ks {
                    let r = gram_delta_closed_form(family, j, n, b).map(f64::abs);
                    ends.record_result(r, || format!("n={n} {family:?} k={j} β={b}"));
                }
            }
        }
    }
    let ends = ends.finish();
    let mut out = t.finish();
    out.checked += ends.checked;
    out.failed += ends.failed;
    out.worst = out.worst.max(ends.worst);
    out.first_failure = out.first_failure.or(ends.first_failure);
    out
}

fn lengths(name: &'static str, polys: &[Built], closed: impl Fn(&Cone) -> f64) -> SuiteResult {
    let mut t = Tally::new(name, LENGTH_THRESHOLD);
    for (cone, p) in polys {
        let c = closed(cone);
        match p.as_ref().map_err(Clone::clone).and_then(geometric_length) {
            Ok(ls) => {
                for l in ls {
                    t.record((l - c).abs(), || label(cone));
                }
            }
            Err(e) => t.record(f64::INFINITY, || format!("{}: {e}", label(cone))),
        }
    }
    t.finish()
}

fn knot_lengths(polys: &[Built]) -> SuiteResult {
    lengths("knot-length-cross-route", polys, |c| match *c {
        Cone::Knot(k) => knot_length_formula(k.n, k.alpha),
        Cone::Link(l) => link_length_formula(l.n, l.alpha, l.beta),
    })
}

fn link_lengths(polys: &[Built]) -> SuiteResult {
    lengths("link-length-cross-route", polys, |c| match *c {
        Cone::Knot(k) => knot_length_formula(k.n, k.alpha),
        Cone::Link(l) => link_length_formula(l.n, l.alpha, l.beta),
    })
}

fn volumes(name: &'static str, cfg: &VerifyConfig, jobs: Vec<(Cone, SchlafliPath)>) -> SuiteResult {
    let fault = cfg.lambda_fault;
    let results = cfg.exec.map(&jobs, |(cone, path)| {
        let closed = match *cone {
            Cone::Knot(k) => knot_volume_formula(k.n, k.alpha),
            Cone::Link(l) => link_volume_formula(l.n, l.alpha, l.beta),
        };
        if fault != 0.0 {
            // The quadrature builds its own polyhedra; route the fault
            // through one of them so it cannot slip past this suite.
            let opts = BuildOptions {
                lambda_offset: fault,
                ..BuildOptions::default()
            };
            let built = match *cone {
                Cone::Knot(k) => build_knot_polyhedron_with(k.n, k.alpha, &opts),
                Cone::Link(l) => build_link_polyhedron_with(l.n, l.alpha, l.beta, &opts),
            };
            built?;
        }
        schlafli_volume_along(cone, *path, QuadratureOptions::default()).map(|q| (q.value - closed).abs())
    });
    let mut t = Tally::new(name, VOLUME_THRESHOLD);
    for ((cone, path), r) in jobs.iter().zip(results) {
        t.record_result(r, || format!("{} {path:?}", label(cone)));
    }
    t.finish()
}

fn knot_volumes(cfg: &VerifyConfig) -> SuiteResult {
    let jobs = (1..=cfg.max_n)
        .flat_map(|n| {
            knot_grid(n, cfg.grid)
                .into_iter()
                .map(move |a| (Cone::Knot(KnotCone { n, alpha: a }), SchlafliPath::default()))
        })
        .collect();
    volumes("knot-volume-cross-route", cfg, jobs)
}

/// Both integration paths on a coarser sub-grid of the link domain.
fn link_volumes(cfg: &VerifyConfig) -> SuiteResult {
    let g = cfg.grid.div_ceil(2).max(2);
    let jobs = (2..=cfg.max_n)
        .flat_map(|n| {
            link_grid(n, g).into_iter().flat_map(move |(a, b)| {
                let c = Cone::Link(LinkCone { n, alpha: a, beta: b });
                [(c, SchlafliPath::DiagonalThenAntiDiagonal), (c, SchlafliPath::Straight)]
            })
        })
        .collect();
    volumes("link-volume-cross-route", cfg, jobs)
}
