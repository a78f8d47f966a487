//! Decorated marked surfaces, their triangulations and arcs, the associated
//! Calabi-Yau-3 string category, and harnesses that cross-check dimension
//! formulas against geometric intersection numbers through independent
//! pipelines.

pub mod cells;
pub mod curves;
pub mod extalg;
pub mod geom;
pub mod order;
pub mod qlin;
pub mod strings;
pub mod surface;
pub mod verify;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate surface: {0}")]
    DegenerateSurface(String),
    #[error("unsupported recipe: {0}")]
    UnsupportedRecipe(String),
    #[error("arc index {0} is not an internal arc")]
    NotInternal(usize),
    #[error("curve is not simple: {0}")]
    NotSimple(String),
    #[error("arcs live on different triangulations")]
    MixedSurface,
    #[error("arcs do not share a starting point")]
    NoSharedStart,
    #[error("arcs cross in the interior")]
    InteriorCrossing,
    #[error("start segments are not in clockwise order")]
    OrderViolation,
    #[error("arc is a dual arc; no decomposition")]
    IsDualArc,
    #[error("map is not a cocycle")]
    NotCocycle,
    #[error("differential does not square to zero: {0}")]
    DifferentialSquareNonzero(String),
    #[error("arc is not in normal position: {0}")]
    NotNormal(String),
    #[error("no triangulation containing the arcs within the flip budget")]
    NotReachable,
    #[error("config error: {0}")]
    ConfigError(String),
    #[error("exchange graph cache is corrupt: {0}")]
    CacheCorrupt(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
