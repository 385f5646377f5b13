//! Exact elliptic curve arithmetic over Q together with the numerical
//! invariants entering the BSD leading-coefficient formula, and the spectral
//! rank certificate assembled from them.
//!
//! Modules:
//!
//! * [`curve`] — Weierstrass models, the group law in exact rationals,
//!   minimal models, torsion.
//! * [`local`] — reduction data at every prime (Tate's algorithm), conductor,
//!   and Dirichlet coefficients a_n by point counting.
//! * [`periods`] — the real period via the arithmetic-geometric mean.
//! * [`heights`] — Néron–Tate canonical heights, the height pairing and the
//!   regulator.
//! * [`lseries`] — L(E, s) near s = 1: root number, Taylor coefficients,
//!   analytic rank.
//! * [`dacc`] — the spectral certificate (ASI, forced page vanishing),
//!   determinant ledger and analytic Sha inference.

pub mod arith;
pub mod curve;
pub mod dacc;
pub mod heights;
pub mod local;
pub mod lseries;
pub mod periods;
pub mod real;

pub use curve::{CurveError, CurveRecord, RationalPoint, TorsionData, WeierstrassModel};
pub use real::Real;
