use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// A violated sphericity inequality, phrased for humans.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{description}")]
pub struct DomainViolation {
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("model parameter λ = {0} outside (-1, 1): the Hermitian form is not positive definite")]
    InvalidLambda(f64),
    #[error("point is not normalized (λ-norm {norm})")]
    NotNormalized { norm: f64 },
    #[error("cannot normalize a point of zero λ-norm")]
    ZeroNorm,
    #[error("inner product {0} lies outside [-1, 1] beyond round-off")]
    InnerProductOutOfRange(f64),
    #[error("{name} = {value} outside the open interval (0, 2π)")]
    AngleOutOfRange { name: &'static str, value: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("outside the sphericity domain: {0}")]
    Domain(DomainViolation),
    #[error("matrix is not of rotation type: both eigenvalues coincide")]
    NotRotation,
    #[error("index {index} out of range {range}")]
    IndexOutOfRange { index: i64, range: String },
    #[error("vertex orbits disagree (residual {0:e})")]
    OrbitInconsistent(f64),
    #[error("axis vertex does not land on the fixed circle (residual {0:e})")]
    AxisLanding(f64),
    #[error("antipodal points have no unique midpoint")]
    Antipodal,
    #[error("degenerate tetrahedron")]
    DegenerateTetrahedron,
    #[error("opposite vertex projects to zero length onto the edge complement")]
    ZeroProjection,
    #[error("length branch is ambiguous: polyhedron is at the collapse boundary")]
    BranchAmbiguity,
    #[error("quadrature did not converge (estimated error {estimate:e})")]
    Quadrature { estimate: f64 },
}

// Written by hand so the violation is not also reported as a source: the
// message already contains it.
impl From<DomainViolation> for Error {
    fn from(v: DomainViolation) -> Self {
        Error::Domain(v)
    }
}
