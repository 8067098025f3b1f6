use crate::lattice::LatticePoint;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degree must be a positive integer, got {0}")]
    InvalidDegree(i64),
    #[error("lattice point {0} is not in the simplex of degree {1}")]
    OutsideSimplex(LatticePoint, i64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("lifting: {0}")]
    Lifting(String),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(i64, i64),
    #[error("subdivision is not an elementary triangulation: {0}")]
    NotSmooth(String),
    #[error("line counting needs degree >= 3, got {0}")]
    UnsupportedDegree(i64),
    #[error("the line does not lie on the surface")]
    LineNotOnSurface,
    #[error("candidate does not match the triangulation: {0}")]
    StructuralMismatch(String),
    #[error("clip box does not meet the surface")]
    EmptyClip,
    #[error("perturbation leaves the secondary cone")]
    LeftSecondaryCone,
    #[error("catalog: {0}")]
    Catalog(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
