//! Elliptic curves over Q in long Weierstrass form
//! y² + a₁xy + a₃y = x³ + a₂x² + a₄x + a₆, with exact integer coefficients.
//!
//! Point arithmetic is exact rational arithmetic throughout; nothing in this
//! module touches floating point.

mod group;
mod minimal;
mod torsion;

pub use minimal::Transformation;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error("singular curve: discriminant is zero")]
    SingularCurve,
    #[error("point ({0}, {1}) does not satisfy the curve equation")]
    PointNotOnCurve(String, String),
    #[error("listed generator is a torsion point of order {0}")]
    TorsionGenerator(u32),
}

/// Long Weierstrass model with all derived quantities kept exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeierstrassModel {
    pub a1: BigInt,
    pub a2: BigInt,
    pub a3: BigInt,
    pub a4: BigInt,
    pub a6: BigInt,
    pub b2: BigInt,
    pub b4: BigInt,
    pub b6: BigInt,
    pub b8: BigInt,
    pub c4: BigInt,
    pub c6: BigInt,
    pub disc: BigInt,
    /// j-invariant c₄³/Δ as a reduced fraction.
    pub j_num: BigInt,
    pub j_den: BigInt,
}

impl WeierstrassModel {
    /// Builds the model and every derived invariant from (a₁, a₂, a₃, a₄, a₆).
    pub fn new(
        a1: BigInt,
        a2: BigInt,
        a3: BigInt,
        a4: BigInt,
        a6: BigInt,
    ) -> Result<Self, CurveError> {
        let k = BigInt::from;
        let b2 = &a1 * &a1 + k(4) * &a2;
        let b4 = k(2) * &a4 + &a1 * &a3;
        let b6 = &a3 * &a3 + k(4) * &a6;
        let b8 = &a1 * &a1 * &a6 + k(4) * &a2 * &a6 - &a1 * &a3 * &a4 + &a2 * &a3 * &a3
            - &a4 * &a4;
        let c4 = &b2 * &b2 - k(24) * &b4;
        let c6 = -(&b2 * &b2 * &b2) + k(36) * &b2 * &b4 - k(216) * &b6;
        let disc = -(&b2 * &b2 * &b8) - k(8) * (&b4 * &b4 * &b4) - k(27) * (&b6 * &b6)
            + k(9) * &b2 * &b4 * &b6;
        if disc.is_zero() {
            return Err(CurveError::SingularCurve);
        }
        debug_assert_eq!(k(4) * &b8, &b2 * &b6 - &b4 * &b4);
        debug_assert_eq!(k(1728) * &disc, &c4 * &c4 * &c4 - &c6 * &c6);
        let jn = &c4 * &c4 * &c4;
        let g = jn.gcd(&disc);
        let (j_num, j_den) = if g.is_zero() {
            (BigInt::zero(), BigInt::one())
        } else {
            let mut n = &jn / &g;
            let mut d = &disc / &g;
            if d.is_negative() {
                n = -n;
                d = -d;
            }
            (n, d)
        };
        Ok(WeierstrassModel {
            a1,
            a2,
            a3,
            a4,
            a6,
            b2,
            b4,
            b6,
            b8,
            c4,
            c6,
            disc,
            j_num,
            j_den,
        })
    }

    pub fn from_i64(a: [i64; 5]) -> Result<Self, CurveError> {
        WeierstrassModel::new(
            BigInt::from(a[0]),
            BigInt::from(a[1]),
            BigInt::from(a[2]),
            BigInt::from(a[3]),
            BigInt::from(a[4]),
        )
    }

    /// Right-hand side minus left-hand side of the curve equation at (x, y).
    pub fn equation_defect(&self, x: &BigRational, y: &BigRational) -> BigRational {
        let a1 = BigRational::from(self.a1.clone());
        let a2 = BigRational::from(self.a2.clone());
        let a3 = BigRational::from(self.a3.clone());
        let a4 = BigRational::from(self.a4.clone());
        let a6 = BigRational::from(self.a6.clone());
        x * x * x + &a2 * x * x + &a4 * x + &a6 - (y * y + &a1 * x * y + &a3 * y)
    }

    pub fn contains(&self, p: &RationalPoint) -> bool {
        match p {
            RationalPoint::Identity => true,
            RationalPoint::Affine { x, y } => self.equation_defect(x, y).is_zero(),
        }
    }

    /// η(P) = 2y + a₁x + a₃, the square root of g(x) on the curve.
    pub fn eta(&self, x: &BigRational, y: &BigRational) -> BigRational {
        BigRational::from(BigInt::from(2)) * y
            + BigRational::from(self.a1.clone()) * x
            + BigRational::from(self.a3.clone())
    }

    /// g(x) = 4x³ + b₂x² + 2b₄x + b₆ = η² on the curve.
    pub fn quartic_g(&self, x: &BigRational) -> BigRational {
        let b2 = BigRational::from(self.b2.clone());
        let b4 = BigRational::from(self.b4.clone());
        let b6 = BigRational::from(self.b6.clone());
        BigRational::from(BigInt::from(4)) * x * x * x + b2 * x * x + BigRational::from(BigInt::from(2)) * b4 * x + b6
    }
}

/// A point of E(Q): the identity or an affine point in reduced coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum RationalPoint {
    Identity,
    Affine { x: BigRational, y: BigRational },
}

impl RationalPoint {
    pub fn affine(x: BigRational, y: BigRational) -> Self {
        RationalPoint::Affine { x, y }
    }

    pub fn affine_i64(x: i64, y: i64) -> Self {
        RationalPoint::Affine {
            x: BigRational::from(BigInt::from(x)),
            y: BigRational::from(BigInt::from(y)),
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, RationalPoint::Identity)
    }

    pub fn x(&self) -> Option<&BigRational> {
        match self {
            RationalPoint::Identity => None,
            RationalPoint::Affine { x, .. } => Some(x),
        }
    }
}

impl std::fmt::Display for RationalPoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RationalPoint::Identity => write!(f, "O"),
            RationalPoint::Affine { x, y } => write!(f, "({}, {})", x, y),
        }
    }
}

/// Torsion subgroup: order, invariant factors, and the full point list.
#[derive(Debug, Clone)]
pub struct TorsionData {
    pub order: u32,
    /// One factor (n) for cyclic Z/n, two factors (2, 2m) for Z/2 × Z/2m.
    pub structure: Vec<u32>,
    pub points: Vec<RationalPoint>,
}

/// Expected invariants carried by a fixture; used only for comparison.
#[derive(Debug, Clone, Default)]
pub struct ExpectedValues {
    pub rank: Option<u32>,
    pub sha: Option<u32>,
    pub period: Option<f64>,
    pub regulator: Option<f64>,
    pub tamagawa: Option<u64>,
    pub l_value: Option<f64>,
}

/// A labeled curve with optional known generators and expected invariants.
#[derive(Debug, Clone)]
pub struct CurveRecord {
    pub label: String,
    pub model: WeierstrassModel,
    pub generators: Vec<RationalPoint>,
    pub expected: ExpectedValues,
}

/// Checks that every listed generator is on the curve and non-torsion.
///
/// Returns the generators; their count is the working algebraic rank.
/// Independence is established later by the regulator (a dependent set makes
/// the height Gram matrix singular).
pub fn validate_generators(record: &CurveRecord) -> Result<Vec<RationalPoint>, CurveError> {
    let model = &record.model;
    let mut out = Vec::with_capacity(record.generators.len());
    for g in &record.generators {
        if !model.contains(g) {
            let (xs, ys) = match g {
                RationalPoint::Affine { x, y } => (x.to_string(), y.to_string()),
                RationalPoint::Identity => ("O".into(), "O".into()),
            };
            return Err(CurveError::PointNotOnCurve(xs, ys));
        }
        if g.is_identity() {
            return Err(CurveError::TorsionGenerator(1));
        }
        if let Some(ord) = group::small_order(model, g, 12) {
            return Err(CurveError::TorsionGenerator(ord));
        }
        out.push(g.clone());
    }
    Ok(out)
}

pub use group::{add, mul, neg, small_order};
pub use minimal::minimal_model;
pub use torsion::torsion_subgroup;
