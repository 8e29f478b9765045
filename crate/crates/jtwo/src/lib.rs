//! Homotopy groups of the height-2 connective image-of-J spectrum `j²` at the
//! prime 3, computed from a curated table of π*tmf and the Adams operation ψ².

pub mod chart;
pub mod detection;
pub mod error;
pub mod fixtures;
pub mod graded;
pub mod j2;
pub mod label;
pub mod moore;
pub mod psi;
pub mod tmf;
pub mod verify;

pub use error::{Error, Result};
