//! Transfer-matrix engine for hard-square and hard-hexagon lattice gases.

pub mod error;
pub mod lattice;
pub mod modular;
pub mod partition;
pub mod poly;
pub mod reference;
pub mod spectra;
pub mod transfer;
pub mod zeros;
pub mod zminusone;

pub use error::{Error, Result};
