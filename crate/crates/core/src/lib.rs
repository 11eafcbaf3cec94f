//! Modified Macdonald polynomials from coloured lattice paths, with
//! independent symmetric-function oracles.

pub mod cli;
pub mod combinat;
pub mod exactalg;
pub mod lattice;
pub mod modmac;
pub mod phi;
pub mod qseries;
pub mod symoracle;

pub use exactalg::{ExactError, Poly, RationalFunction};
