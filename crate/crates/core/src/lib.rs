//! Kergin interpolation of holomorphic functions on C^d.

pub mod derivative;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod kergin;
pub mod oracle;
pub mod poly;
pub mod scalar;
pub mod simplex;
pub mod space;

pub use error::{KerginError, Result};
