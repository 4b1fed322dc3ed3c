//! Finite polyadic-type algebras built from affine Galois planes, together with
//! the machinery to check them: axiom suites, atom structure, witness
//! equations, reduct representations and the combinatorial kernels behind
//! nonrepresentability.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: prime fields, the affine plane `AG(2,p)` and its parallel-class
//!   relations.
//! * [`space`] and [`partitions`]: the base set, concrete relations over `U^α`
//!   and every partition of `R_0 × T` the construction needs.
//! * [`closure`]: generated subalgebras of the full set algebra and their atoms.
//! * [`perm`], [`algebra`], [`model`] and [`reducts`]: abstract atom algebras, the
//!   modified transpositions, the merge construction and reduct representations.
//! * [`term`], [`eval`], [`suites`], [`witness`] and [`lemmas`]: the equational side.
//! * [`report`]: JSON check reports shared by the CLI.
//!
//! With the default `parallel` feature the tuple-level and atom-level loops run
//! on rayon; without it every loop runs sequentially with identical results.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod bits;
pub mod closure;
pub mod error;
pub mod eval;
pub mod geometry;
pub mod lemmas;
pub mod model;
mod par;
pub mod partitions;
pub mod perm;
pub mod reducts;
pub mod report;
pub mod space;
pub mod suites;
pub mod term;
pub mod witness;

pub use crate::algebra::{AtomAlgebra, AtomLabel, AtomSet};
pub use crate::bits::BitSet;
pub use crate::error::{Error, Result};
pub use crate::model::PolyadicModel;
pub use crate::perm::Perm;
pub use crate::report::{CheckRecord, CheckReport, Status};
pub use crate::term::{Equation, Term};

/// Default cap on closure size and search nodes; `PEALAB_BUDGET` overrides it in the CLI.
pub const DEFAULT_BUDGET: usize = 1 << 20;
