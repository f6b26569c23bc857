//! JSON export of fundamental polyhedra.
//!
//! Layout (see `schema/polyhedron.schema.json`):
//!
//! ```json
//! {
//!   "schema": "torus-cone/polyhedron", "version": 1,
//!   "kind": "knot", "n": 1, "cone_angles": [...], "lambda": ...,
//!   "verified": true,
//!   "vertices": [{"z1": {"re": ..., "im": ...}, "z2": {...}}, ...],
//!   "north": {...}, "south": {...},
//!   "edges": [{"from": 1, "to": 2, "dihedral_angle": ...}, ...],
//!   "tetrahedra": [{"index": 1, "vertices": ["S", "N", "P1", "P2"],
//!                   "gram_det": ..., "polar_dihedral_angle": ...}, ...]
//! }
//! ```
//!
//! Every real is written with 17 significant digits, which round-trips an
//! `f64` exactly. Non-finite values become `null` and read back as `NaN`.

use std::fs;
use std::path::Path;

use serde::de::Deserializer;
use serde::ser::{Error as _, Serializer};
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::cone::{Cone, KnotCone, LinkCone};
use crate::error::Error;
use crate::model::{Complex, ModelParameter, ModelPoint};
use crate::polyhedron::{polyhedron_from_parts, FundamentalPolyhedron};

pub const SCHEMA_ID: &str = "torus-cone/polyhedron";
pub const SCHEMA_VERSION: u32 = 1;

/// The JSON schema shipped with the crate.
pub const SCHEMA_JSON: &str = include_str!("../schema/polyhedron.schema.json");

#[derive(Debug, thiserror::Error)]
pub enum ExportError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed polyhedron JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported file: {0}")]
    Format(String),
    #[error(transparent)]
    Model(#[from] Error),
}

/// `{:.16e}`: 17 significant digits.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// An `f64` that serializes with 17 significant digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(format_real(self.0)).map_err(S::Error::custom)?;
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Real {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(Real(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN)))
    }
}

/// Helpers for `#[serde(serialize_with = ...)]` on plain `f64` fields.
pub mod real17 {
    use super::Real;
    use serde::ser::{SerializeSeq, Serializer};

    pub fn f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_some(&Real(*x))
    }

    pub fn vec<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&Real(*x))?;
        }
        seq.end()
    }

    pub fn option<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match x {
            Some(v) => s.serialize_some(&Real(*v)),
            None => s.serialize_none(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: Real,
    pub im: Real,
}

impl From<Complex> for ComplexJson {
    fn from(z: Complex) -> Self {
        Self {
            re: Real(z.re),
            im: Real(z.im),
        }
    }
}

impl From<ComplexJson> for Complex {
    fn from(z: ComplexJson) -> Self {
        Complex::new(z.re.0, z.im.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointJson {
    pub z1: ComplexJson,
    pub z2: ComplexJson,
}

impl From<&ModelPoint> for PointJson {
    fn from(p: &ModelPoint) -> Self {
        Self {
            z1: p.z1.into(),
            z2: p.z2.into(),
        }
    }
}

impl From<&PointJson> for ModelPoint {
    fn from(p: &PointJson) -> Self {
        ModelPoint::new(p.z1.into(), p.z2.into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeJson {
    pub from: usize,
    pub to: usize,
    pub dihedral_angle: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TetrahedronJson {
    pub index: usize,
    pub vertices: [String; 4],
    pub gram_det: Real,
    pub polar_dihedral_angle: Real,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyhedronFile {
    pub schema: String,
    pub version: u32,
    pub kind: String,
    pub n: u32,
    pub cone_angles: Vec<Real>,
    pub lambda: Real,
    pub verified: bool,
    pub vertices: Vec<PointJson>,
    pub north: PointJson,
    pub south: PointJson,
    pub edges: Vec<EdgeJson>,
    pub tetrahedra: Vec<TetrahedronJson>,
}

impl PolyhedronFile {
    pub fn from_polyhedron(poly: &FundamentalPolyhedron) -> Self {
        let m = poly.vertex_count();
        let tets = poly.tetrahedra();
        let nan_on_err = |r: crate::Result<Vec<f64>>| r.unwrap_or_else(|_| vec![f64::NAN; m]);
        let psi = nan_on_err(poly.boundary_dihedrals());
        let phi = nan_on_err(poly.polar_dihedrals());
        let next = |i: usize| i % m + 1;
        let (kind, n) = match poly.cone {
            Cone::Knot(k) => ("knot", k.n),
            Cone::Link(l) => ("link", l.n),
        };
        Self {
            schema: SCHEMA_ID.into(),
            version: SCHEMA_VERSION,
            kind: kind.into(),
            n,
            cone_angles: poly.cone_angles().into_iter().map(Real).collect(),
            lambda: Real(poly.lambda.value()),
            verified: poly.verified,
            vertices: poly.vertices.iter().map(PointJson::from).collect(),
            north: (&poly.north).into(),
            south: (&poly.south).into(),
            edges: (1..=m)
                .map(|i| EdgeJson {
                    from: i,
                    to: next(i),
                    dihedral_angle: Real(psi[i - 1]),
                })
                .collect(),
            tetrahedra: tets
                .iter()
                .map(|t| TetrahedronJson {
                    index: t.index,
                    vertices: [
                        "S".into(),
                        "N".into(),
                        format!("P{}", t.index),
                        format!("P{}", next(t.index)),
                    ],
                    gram_det: Real(t.gram_det()),
                    polar_dihedral_angle: Real(phi[t.index - 1]),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        // Only RawValue numbers and plain structs: serialization cannot fail.
        serde_json::to_string_pretty(self).expect("polyhedron JSON serialization")
    }

    pub fn from_json(s: &str) -> Result<Self, ExportError> {
        let file: Self = serde_json::from_str(s)?;
        if file.schema != SCHEMA_ID || file.version != SCHEMA_VERSION {
            return Err(ExportError::Format(format!(
                "expected {SCHEMA_ID} v{SCHEMA_VERSION}, found {} v{}",
                file.schema, file.version
            )));
        }
        Ok(file)
    }

    pub fn cone(&self) -> Result<Cone, ExportError> {
        let angle = |i: usize| {
            self.cone_angles
                .get(i)
                .map(|r| r.0)
                .ok_or_else(|| ExportError::Format(format!("missing cone angle {i}")))
        };
        match (self.kind.as_str(), self.cone_angles.len()) {
            ("knot", 1) => Ok(Cone::Knot(KnotCone::new(self.n, angle(0)?)?)),
            ("link", 2) => Ok(Cone::Link(LinkCone::new(self.n, angle(0)?, angle(1)?)?)),
            (k, c) => Err(ExportError::Format(format!("kind {k:?} with {c} cone angles"))),
        }
    }

    /// Rebuilds the polyhedron from the stored coordinates. Generators are
    /// recomputed from `λ` and the cone angles.
    pub fn to_polyhedron(&self) -> Result<FundamentalPolyhedron, ExportError> {
        Ok(polyhedron_from_parts(
            self.cone()?,
            ModelParameter::new_unchecked(self.lambda.0),
            self.vertices.iter().map(ModelPoint::from).collect(),
            (&self.north).into(),
            (&self.south).into(),
            self.verified,
        )?)
    }
}

pub fn write_polyhedron(poly: &FundamentalPolyhedron, path: &Path) -> Result<(), ExportError> {
    let json = PolyhedronFile::from_polyhedron(poly).to_json();
    fs::write(path, json + "\n").map_err(|source| ExportError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn read_polyhedron(path: &Path) -> Result<FundamentalPolyhedron, ExportError> {
    let text = fs::read_to_string(path).map_err(|source| ExportError::Io {
        path: path.display().to_string(),
        source,
    })?;
    PolyhedronFile::from_json(&text)?.to_polyhedron()
}
