//! Exact-arithmetic invariants of (generalized) convex toric domains.
//!
//! The crate computes, with no floating point in any core path:
//!
//! * weight expansions and continued fractions ([`weights`]),
//! * the cutting algorithm from a rational polygon to its negative weight
//!   tuple, perimeter / volume / accumulation point ([`domains`]),
//! * ECH capacity sequences of balls, ellipsoids, disjoint unions and convex
//!   toric domains, plus the lattice-path oracle and subleading asymptotics
//!   ([`ech`]),
//! * Diophantine obstruction classes and their obstruction functions
//!   ([`classes`]),
//! * Cremona moves, exceptionality testing and capacity invariance
//!   ([`cremona`]),
//! * recursively generated staircase families, their limit domains and the
//!   overshadow / ghost-stairs analyses ([`staircase`]),
//! * certified lower bounds for the ellipsoid embedding function
//!   ([`capacityfn`]).
//!
//! All quantities are rationals of arbitrary precision or elements of a real
//! quadratic field `Q[sqrt(sigma)]` ([`exactnum::Surd`]); every inequality is
//! decided by exact sign computations.

pub mod capacityfn;
pub mod classes;
pub mod cremona;
pub mod domains;
pub mod ech;
pub mod exactnum;
pub mod staircase;
pub mod weights;

/// Crate-wide error type.
#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
