//! Chord–tangent group law in exact rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{CurveError, RationalPoint, WeierstrassModel};

fn rat(n: &BigInt) -> BigRational {
    BigRational::from(n.clone())
}

/// -P = (x, -y - a₁x - a₃).
pub fn neg(model: &WeierstrassModel, p: &RationalPoint) -> RationalPoint {
    match p {
        RationalPoint::Identity => RationalPoint::Identity,
        RationalPoint::Affine { x, y } => RationalPoint::Affine {
            x: x.clone(),
            y: -y - rat(&model.a1) * x - rat(&model.a3),
        },
    }
}

/// P + Q.  Both points must lie on the curve.
pub fn add(
    model: &WeierstrassModel,
    p: &RationalPoint,
    q: &RationalPoint,
) -> Result<RationalPoint, CurveError> {
    for pt in [p, q] {
        if !model.contains(pt) {
            if let RationalPoint::Affine { x, y } = pt {
                return Err(CurveError::PointNotOnCurve(x.to_string(), y.to_string()));
            }
        }
    }
    Ok(add_unchecked(model, p, q))
}

pub(crate) fn add_unchecked(
    model: &WeierstrassModel,
    p: &RationalPoint,
    q: &RationalPoint,
) -> RationalPoint {
    let (x1, y1) = match p {
        RationalPoint::Identity => return q.clone(),
        RationalPoint::Affine { x, y } => (x, y),
    };
    let (x2, y2) = match q {
        RationalPoint::Identity => return p.clone(),
        RationalPoint::Affine { x, y } => (x, y),
    };
    let a1 = rat(&model.a1);
    let a2 = rat(&model.a2);
    let a3 = rat(&model.a3);
    let a4 = rat(&model.a4);
    let a6 = rat(&model.a6);

    // Slope λ and intercept ν of the chord (or tangent).
    let (lambda, nu) = if x1 == x2 {
        // Q = -P ⟺ y2 = -y1 - a1 x1 - a3.
        if (y2 + y1 + &a1 * x1 + &a3).is_zero() {
            return RationalPoint::Identity;
        }
        // Tangent at P (= Q here).
        let den = BigRational::from(BigInt::from(2)) * y1 + &a1 * x1 + &a3;
        let three = BigRational::from(BigInt::from(3));
        let two = BigRational::from(BigInt::from(2));
        let lambda = (&three * x1 * x1 + &two * &a2 * x1 + &a4 - &a1 * y1) / &den;
        let nu = (-(x1 * x1 * x1) + &a4 * x1 + &two * &a6 - &a3 * y1) / &den;
        (lambda, nu)
    } else {
        let den = x2 - x1;
        let lambda = (y2 - y1) / &den;
        let nu = (y1 * x2 - y2 * x1) / &den;
        (lambda, nu)
    };

    let x3 = &lambda * &lambda + &a1 * &lambda - &a2 - x1 - x2;
    let y3 = -(&lambda + &a1) * &x3 - &nu - &a3;
    RationalPoint::Affine { x: x3, y: y3 }
}

/// n·P by double-and-add; n may be negative (mul(-n, P) = -mul(n, P)).
pub fn mul(model: &WeierstrassModel, n: i64, p: &RationalPoint) -> Result<RationalPoint, CurveError> {
    if let RationalPoint::Affine { x, y } = p {
        if !model.contains(p) {
            return Err(CurveError::PointNotOnCurve(x.to_string(), y.to_string()));
        }
    }
    Ok(mul_unchecked(model, n, p))
}

pub(crate) fn mul_unchecked(model: &WeierstrassModel, n: i64, p: &RationalPoint) -> RationalPoint {
    if n == 0 || p.is_identity() {
        return RationalPoint::Identity;
    }
    let (mut k, base) = if n < 0 {
        (n.unsigned_abs(), neg(model, p))
    } else {
        (n as u64, p.clone())
    };
    let mut acc = RationalPoint::Identity;
    let mut pow = base;
    while k > 0 {
        if k & 1 == 1 {
            acc = add_unchecked(model, &acc, &pow);
        }
        k >>= 1;
        if k > 0 {
            pow = add_unchecked(model, &pow, &pow);
        }
    }
    acc
}

/// Order of P if it is at most `cap`; None means order > cap.
///
/// With cap = 12 this is an exact torsion test over Q (Mazur's bound on the
/// order of a rational torsion point).
pub fn small_order(model: &WeierstrassModel, p: &RationalPoint, cap: u32) -> Option<u32> {
    if p.is_identity() {
        return Some(1);
    }
    let mut acc = p.clone();
    for k in 2..=cap {
        acc = add_unchecked(model, &acc, p);
        if acc.is_identity() {
            return Some(k);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn curve_37a1() -> WeierstrassModel {
        WeierstrassModel::from_i64([0, 0, 1, -1, 0]).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn doubling_oracle_37a1() {
        // Hand evaluation of the duplication formula at P = (0,0) on
        // y² + y = x³ - x: tangent slope λ = -1, third intersection (1, -1),
        // so 2P = (1, 0).
        let e = curve_37a1();
        let p = RationalPoint::affine_i64(0, 0);
        let two_p = add(&e, &p, &p).unwrap();
        assert_eq!(two_p, RationalPoint::affine_i64(1, 0));
        // x(2P) from the duplication polynomials as an independent check:
        // (x⁴ - b₄x² - 2b₆x - b₈)/(4x³ + b₂x² + 2b₄x + b₆) at x = 0 is
        // (-b₈)/b₆ = 1/1.
        assert_eq!(&e.b8, &BigInt::from(-1));
        assert_eq!(&e.b6, &BigInt::from(1));
    }

    #[test]
    fn multiples_of_37a1_generator() {
        let e = curve_37a1();
        let p = RationalPoint::affine_i64(0, 0);
        assert_eq!(mul(&e, 0, &p).unwrap(), RationalPoint::Identity);
        assert_eq!(mul(&e, 1, &p).unwrap(), p);
        assert_eq!(mul(&e, 3, &p).unwrap(), RationalPoint::affine_i64(-1, -1));
        assert_eq!(mul(&e, 4, &p).unwrap(), RationalPoint::affine_i64(2, -3));
        let five_p = mul(&e, 5, &p).unwrap();
        assert_eq!(
            five_p,
            RationalPoint::Affine {
                x: q(1, 4),
                y: q(-5, 8)
            }
        );
        // mul(-n, P) = -mul(n, P)
        assert_eq!(mul(&e, -5, &p).unwrap(), neg(&e, &five_p));
    }

    #[test]
    fn identity_and_inverse_laws() {
        let e = curve_37a1();
        let p = RationalPoint::affine_i64(2, -3);
        assert_eq!(add(&e, &p, &RationalPoint::Identity).unwrap(), p);
        let minus = neg(&e, &p);
        assert!(e.contains(&minus));
        assert_eq!(add(&e, &p, &minus).unwrap(), RationalPoint::Identity);
    }

    #[test]
    fn five_torsion_on_11a1() {
        let e = WeierstrassModel::from_i64([0, -1, 1, -10, -20]).unwrap();
        let t = RationalPoint::affine_i64(5, 5);
        assert!(e.contains(&t));
        assert_eq!(mul(&e, 5, &t).unwrap(), RationalPoint::Identity);
        assert_eq!(small_order(&e, &t, 12), Some(5));
    }

    #[test]
    fn rejects_off_curve_point() {
        let e = curve_37a1();
        let bad = RationalPoint::affine_i64(1, 1);
        assert!(matches!(
            add(&e, &bad, &bad),
            Err(CurveError::PointNotOnCurve(_, _))
        ));
    }
}
