//! Linear functional graphs over finite fields.
//!
//! The graph on the nonzero vectors and nonzero linear functionals of
//! `F_q^n`, with `f_u ~ v` exactly when `u . v = 0`. The crate builds these
//! graphs, constructs their automorphisms from a small set of generators,
//! enumerates automorphism groups exactly, solves domination problems, and
//! checks a catalogue of structural claims against brute-force oracles.

pub mod autos;
pub mod bitset;
pub mod budget;
pub mod error;
pub mod gf;
pub mod graph;
pub mod harness;
pub mod linalg;

pub use error::{Error, Result};
pub use gf::{Felt, Field};
pub use graph::{LfGraph, Side};
pub use linalg::{Matrix, Vector};
