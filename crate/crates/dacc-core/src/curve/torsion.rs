//! Rational torsion by Lutz–Nagell, bounded by Mazur's theorem.
//!
//! Every torsion point of the minimal model maps to an integral point of the
//! scaled curve W² = h(X) := X³ + b₂X² + 8b₄X + 16b₆ under
//! (X, W) = (4x, 8y + 4a₁x + 4a₃).  On that model Lutz–Nagell applies
//! directly: W = 0 or W² divides disc(h).  Candidates are mapped back,
//! checked on the original curve, and kept when their order is at most 12.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::arith::{factor, square_divisors};

use super::group::{add_unchecked, small_order};
use super::{RationalPoint, TorsionData, WeierstrassModel};

/// Integer roots of the monic cubic x³ + c₂x² + c₁x + c₀.
///
/// Real roots are located in f64 (Cardano / trigonometric form) and each
/// nearby integer is verified exactly, so the result is exact.
fn integer_roots(c2: &BigInt, c1: &BigInt, c0: &BigInt) -> Vec<BigInt> {
    let eval = |x: &BigInt| -> BigInt { ((x + c2) * x + c1) * x + c0 };
    let fc2 = c2.to_f64().expect("cubic coefficient out of f64 range");
    let fc1 = c1.to_f64().expect("cubic coefficient out of f64 range");
    let fc0 = c0.to_f64().expect("cubic coefficient out of f64 range");
    assert!(fc2.is_finite() && fc1.is_finite() && fc0.is_finite());

    // Depressed cubic t³ + pt + q with x = t - c2/3.
    let p = fc1 - fc2 * fc2 / 3.0;
    let q = 2.0 * fc2.powi(3) / 27.0 - fc2 * fc1 / 3.0 + fc0;
    let shift = -fc2 / 3.0;
    let mut approx: Vec<f64> = Vec::new();
    let disc = -4.0 * p.powi(3) - 27.0 * q * q;
    if disc > 0.0 {
        let m = 2.0 * (-p / 3.0).sqrt();
        let theta = (3.0 * q / (p * m)).clamp(-1.0, 1.0).acos();
        for k in 0..3 {
            approx.push(m * ((theta - 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos() + shift);
        }
    } else {
        let d = (q * q / 4.0 + p.powi(3) / 27.0).max(0.0).sqrt();
        let u = (-q / 2.0 + d).cbrt();
        let v = (-q / 2.0 - d).cbrt();
        approx.push(u + v + shift);
    }

    let mut out: Vec<BigInt> = Vec::new();
    for r in approx {
        // Newton polish for conditioning, then test the integer window.
        let mut x = r;
        for _ in 0..4 {
            let f = ((x + fc2) * x + fc1) * x + fc0;
            let fp = (3.0 * x + 2.0 * fc2) * x + fc1;
            if fp != 0.0 && f.is_finite() {
                x -= f / fp;
            }
        }
        let center = x.round();
        if !center.is_finite() {
            continue;
        }
        let c = BigInt::from(center as i64);
        for k in -3i64..=3 {
            let cand = &c + BigInt::from(k);
            if eval(&cand).is_zero() && !out.contains(&cand) {
                out.push(cand);
            }
        }
    }
    out.sort();
    out
}

/// Maps (X, W) on the scaled model back to (x, y) on `model`.
fn unscale(model: &WeierstrassModel, big_x: &BigInt, big_w: &BigInt) -> RationalPoint {
    let four = BigInt::from(4);
    let eight = BigInt::from(8);
    let x = BigRational::new(big_x.clone(), four.clone());
    let y_num = big_w - &model.a1 * big_x - &four * &model.a3;
    let y = BigRational::new(y_num, eight);
    RationalPoint::Affine { x, y }
}

/// Full torsion subgroup of a (minimal) model.
pub fn torsion_subgroup(model: &WeierstrassModel) -> TorsionData {
    // Scaled cubic h(X) = X³ + b2 X² + 8 b4 X + 16 b6.
    let c2 = model.b2.clone();
    let c1 = BigInt::from(8) * &model.b4;
    let c0 = BigInt::from(16) * &model.b6;
    // disc(x³ + ax² + bx + c) = 18abc - 4a³c + a²b² - 4b³ - 27c².
    let k = BigInt::from;
    let disc_h = k(18) * &c2 * &c1 * &c0 - k(4) * (&c2 * &c2 * &c2) * &c0
        + &c2 * &c2 * &c1 * &c1
        - k(4) * (&c1 * &c1 * &c1)
        - k(27) * (&c0 * &c0);
    debug_assert!(!disc_h.is_zero());

    let mut points: Vec<RationalPoint> = vec![RationalPoint::Identity];
    let mut push_candidate = |p: RationalPoint| {
        if model.contains(&p) && !points.contains(&p) && small_order(model, &p, 12).is_some() {
            points.push(p);
        }
    };

    // W = 0: two-torsion.
    for x in integer_roots(&c2, &c1, &c0) {
        push_candidate(unscale(model, &x, &BigInt::zero()));
    }
    // W ≠ 0 with W² | disc(h).
    for w in square_divisors(&factor(&disc_h)) {
        if w.is_zero() {
            continue;
        }
        let w2 = &w * &w;
            for x in integer_roots(&c2, &c1, &(&c0 - &w2)) {
            push_candidate(unscale(model, &x, &w));
            push_candidate(unscale(model, &x, &(-&w)));
        }
    }

    let order = points.len() as u32;
    let two_torsion = points
        .iter()
        .filter(|p| !p.is_identity() && add_unchecked(model, p, p).is_identity())
        .count();
    let structure = if order == 1 {
        vec![]
    } else if two_torsion == 3 {
        vec![2, order / 2]
    } else {
        vec![order]
    };
    // Mazur: cyclic of order 1..10 or 12, or Z/2 × Z/2m with m ≤ 4.
    let mazur_ok = match structure.as_slice() {
        [] => true,
        [n] => (1..=10).contains(n) || *n == 12,
        [2, m2] => *m2 % 2 == 0 && *m2 <= 8,
        _ => false,
    };
    assert!(
        mazur_ok,
        "torsion structure {:?} outside Mazur's classification",
        structure
    );
    TorsionData {
        order,
        structure,
        points,
    }
}
