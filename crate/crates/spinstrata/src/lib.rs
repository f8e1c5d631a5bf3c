//! Prototype square-tiled surfaces, mod-r winding numbers, r-spin structure
//! censuses and Dehn twist word calculus for strata of abelian differentials.
//!
//! Verification throughout is at the level of group actions on framed
//! homology mod r and on the integral symplectic lattice. These are
//! necessary conditions for the isotopy statements they mirror, not proofs
//! of them.

pub mod curve_system;
pub mod error;
pub mod euclid_engine;
pub mod framed_rep;
pub mod origami_core;
pub mod spin_algebra;
pub mod winding;

pub use error::{Error, Result};



pub type IntSymplectic = framed_rep::SymplecticMatrix<i64>;
pub use serde::Serialize;
