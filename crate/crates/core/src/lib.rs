//! Executable algebra for Stanley–Reisner rings: Vorst decompositions,
//! Milnor patching of projective modules, lifting of invertible matrices and
//! unimodular rows, and checkable certificates for every construction.

pub mod cert;
pub mod corpus;
pub mod engines;
pub mod error;
pub mod groebner;
pub mod polycore;
pub mod projmod;
pub mod quotient;
pub mod simplicial;

pub use error::{Error, Result};
