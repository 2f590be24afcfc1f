//! Finite workbench for operator semigroups, T-spaces, morphisms and the Galois
//! correspondences built from them.

pub mod carrier;
pub mod cli;
pub mod dynsys;
pub mod error;
pub mod fixtures;
pub mod galois;
pub mod structure;
pub mod subset;

pub use error::{GgtError, Result};
pub use subset::Subset;
pub mod limits;
pub mod morphism;
pub mod topology;
pub mod topospace;
pub mod tspace;
pub mod witness;
