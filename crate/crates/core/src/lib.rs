//! Exact arithmetic for quadratic spaces over Q, their lattices and Clifford
//! orders, with checks of the identities relating a quaternary space to the
//! orthogonal complement of an anisotropic vector.

pub mod cli;
pub mod clifford;
pub mod error;
pub mod exactnum;
pub mod invariants;
pub mod linalg;
pub mod maximality;
pub mod qspace;
pub mod verify;

pub use error::{Error, Result};
