//! Exact and numerical verification of the Heisenberg group `H_R^(g,h)`, its
//! Schrödinger representations, the lattice representation `π_M` and its
//! decomposition, and the theta transformation laws built from Poincaré
//! series over the lattice subgroup.
//!
//! Negated float comparisons such as `!(x > 0.0)` are used on purpose so
//! that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod characters;
pub mod error;
pub mod exact;
pub mod forms;
pub mod group;
pub mod harness;
pub mod intertwiner;
pub mod lattice;
pub mod numerics;
pub mod schrodinger;
pub mod theta;

pub use error::{Error, Result};
