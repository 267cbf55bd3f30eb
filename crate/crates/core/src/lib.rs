//! Simulation library for exciplex-mediated laser refrigeration of
//! dopant–buffer gas mixtures in hollow-core fibres.

pub mod constants;
pub mod error;
pub mod model;
pub mod special;
pub mod bloch;
pub mod propagation;
pub mod thermal;
pub mod wavepacket;
pub mod scattering;

pub use error::{Error, Result};

/// Library version recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
