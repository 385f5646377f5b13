//! Per-prime reduction data, the conductor, and Dirichlet coefficients.

mod antable;
mod count;
mod tate;

pub use antable::{an_table, ap_cache_read, ap_cache_write, ApTable};
pub use count::{ap_bad, ap_good, curve_order_bsgs, curve_order_naive, BSGS_THRESHOLD};
pub use tate::tate_local;

use num_bigint::BigInt;
use thiserror::Error;

use crate::arith::factor;
use crate::curve::WeierstrassModel;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LocalError {
    #[error("prime {0} divides the minimal discriminant; a_p by counting needs good reduction")]
    BadPrime(String),
    #[error("a_p cache is malformed: {0}")]
    MalformedCache(String),
}

/// Kodaira symbol of the special fiber.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KodairaType {
    /// I_0 is good reduction; I_n (n ≥ 1) multiplicative.
    I(u32),
    II,
    III,
    IV,
    /// I_n* (n ≥ 0).
    IStar(u32),
    IVStar,
    IIIStar,
    IIStar,
}

impl std::fmt::Display for KodairaType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KodairaType::I(n) => write!(f, "I{}", n),
            KodairaType::II => write!(f, "II"),
            KodairaType::III => write!(f, "III"),
            KodairaType::IV => write!(f, "IV"),
            KodairaType::IStar(n) => write!(f, "I{}*", n),
            KodairaType::IVStar => write!(f, "IV*"),
            KodairaType::IIIStar => write!(f, "III*"),
            KodairaType::IIStar => write!(f, "II*"),
        }
    }
}

impl KodairaType {
    /// Number of irreducible components of the special fiber (with
    /// multiplicity one count, as enters Ogg's formula).
    pub fn components(&self) -> u32 {
        match self {
            KodairaType::I(0) => 1,
            KodairaType::I(n) => *n,
            KodairaType::II => 1,
            KodairaType::III => 2,
            KodairaType::IV => 3,
            KodairaType::IStar(n) => 5 + n,
            KodairaType::IVStar => 7,
            KodairaType::IIIStar => 8,
            KodairaType::IIStar => 9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduction {
    Good,
    MultiplicativeSplit,
    MultiplicativeNonsplit,
    Additive,
}

/// Reduction data at a single prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalData {
    pub p: BigInt,
    pub kodaira: KodairaType,
    /// Conductor exponent.
    pub f_p: u32,
    /// Tamagawa number [E(Q_p) : E⁰(Q_p)].
    pub c_p: u32,
    pub reduction: Reduction,
}

/// Conductor N = ∏ p^{f_p} with its factorization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConductorData {
    pub n: BigInt,
    pub factors: Vec<(BigInt, u32)>,
}

/// Runs Tate's algorithm at every prime dividing the minimal discriminant.
pub fn bad_primes_data(model: &WeierstrassModel) -> Vec<LocalData> {
    factor(&model.disc)
        .into_iter()
        .map(|(p, _)| tate_local(model, &p))
        .collect()
}

/// Assembles the conductor from local data at the bad primes.
pub fn conductor(model: &WeierstrassModel) -> (ConductorData, Vec<LocalData>) {
    let locals = bad_primes_data(model);
    let mut n = BigInt::from(1);
    let mut factors = Vec::new();
    for l in &locals {
        if l.f_p > 0 {
            n *= l.p.pow(l.f_p);
            factors.push((l.p.clone(), l.f_p));
        }
    }
    (ConductorData { n, factors }, locals)
}
