//! Pointwise numerical verification of nearly Kähler geometry.
//!
//! Fields are evaluated as truncated Taylor jets ([`jet::Jet`]) on coordinate
//! charts, so covariant derivatives, curvature and Lie derivatives are exact
//! up to floating point. Identities are then checked at sampled points.

pub mod ansatz;
pub mod chart;
pub mod error;
pub mod exterior;
pub mod jet;
pub mod models;
pub mod nk;
pub mod reduction;
pub mod report;
pub mod suite;
pub mod tensor;

pub use chart::{BoxDomain, ChartMap, DerivativeEngine, DerivativeMode, Field, FnField, LocalGeometry};
pub use error::{GeomError, Result};
pub use jet::Jet;
pub use tensor::{Scalar, Slot, Tensor, TensorJet, TensorValue};
