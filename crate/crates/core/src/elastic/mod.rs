//! Plane-strain elastodynamics of a layered half-plane under a surface load.

mod duhamel;
mod fields;
mod kernel;
mod load;
mod scenario;
mod solver;

use thiserror::Error;

pub use duhamel::{duhamel, duhamel_kernel, Forcing, Piece};
pub use fields::{causality_residual, fields_from_tension, FieldChecks, FieldGrid, MIN_NODES};
pub use kernel::{kernel_h, kernel_h_homogeneous, KernelSpec, KernelValue};
pub use load::{load_kinks, load_series, load_transform_exact, load_transform_y, Load, TimeProfile};
pub use scenario::{ElasticLayer, ElasticScenario};
pub use solver::{
    columns, contour_floor, reconstruct_tension, reality_probe, spectral_slice, tension_at, Column, GridSpec, Slice, SolverSpec, TensionGrid, TensionPair,
    TensionReport,
};

use crate::medium::MediumError;
use crate::spectral::SpectralError;
use crate::transform::TransformError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ElasticError {
    #[error(transparent)]
    Medium(#[from] MediumError),
    #[error("layer {layer}: need mu > 0, lambda + 2 mu > 0 and positive finite speeds")]
    InvalidLayer { layer: usize },
    #[error("invalid load: {0}")]
    InvalidLoad(String),
    #[error("load support in y is not bounded")]
    UnresolvedSupport,
    #[error("xi must be finite")]
    NonFiniteXi,
    #[error(transparent)]
    Transform(#[from] TransformError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error("symbol matrix singular at eta = {eta}")]
    SingularSymbol { eta: f64 },
    #[error("the kernel route needs identical layers")]
    NotHomogeneous,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
}
