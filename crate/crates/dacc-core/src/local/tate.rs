//! Tate's algorithm, in full generality at every prime including 2 and 3.
//!
//! The model is repeatedly translated so that the singular point of the
//! reduction sits at the origin and the step-specific valuation conditions
//! hold; every division along the way is exact and asserted.  The algorithm
//! is deterministic and terminates for any integral model (step 11 rescales
//! by u = p and restarts when the model is not minimal at p).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::arith::{invmod, jacobi, valuation};
use crate::curve::{Transformation, WeierstrassModel};

use super::{KodairaType, LocalData, Reduction};

/// Valuation with a large sentinel for zero (every test below compares
/// against small thresholds).
fn val(x: &BigInt, p: &BigInt) -> u32 {
    if x.is_zero() {
        u32::MAX
    } else {
        valuation(x, p)
    }
}

fn translate(m: &WeierstrassModel, r: BigInt, s: BigInt, t: BigInt) -> WeierstrassModel {
    Transformation {
        u: BigInt::one(),
        r,
        s,
        t,
    }
    .apply_model(m)
    .expect("translation keeps the model integral")
}

fn exact_div(n: &BigInt, d: &BigInt) -> BigInt {
    let (q, r) = n.div_rem(d);
    assert!(r.is_zero(), "inexact division inside Tate's algorithm");
    q
}

/// Roots in F_p of the quadratic A y² + B y + C (A not ≡ 0), reported as
/// (has distinct roots, lift of a repeated root when not distinct,
///  number of roots in F_p).
fn quadratic_analysis(a: &BigInt, b: &BigInt, c: &BigInt, p: &BigInt) -> (bool, BigInt, u32) {
    if let Some(pp) = p.to_u64() {
        if pp <= 3 {
            let mut roots = Vec::new();
            for y in 0..pp {
                let yb = BigInt::from(y);
                let v = ((a * &yb + b) * &yb + c).mod_floor(p);
                if v.is_zero() {
                    roots.push(yb);
                }
            }
            // Over F_p a quadratic has a repeated root iff it has exactly one.
            return match roots.len() {
                1 => (false, roots[0].clone(), 1),
                n => (true, BigInt::zero(), n as u32),
            };
        }
    }
    // Odd p: discriminant test.
    let disc = (b * b - BigInt::from(4) * a * c).mod_floor(p);
    if disc.is_zero() {
        let two_a_inv = invmod(&(BigInt::from(2) * a), p);
        let root = ((-b) * two_a_inv).mod_floor(p);
        (false, root, 1)
    } else {
        let pp = p.to_u64().expect("prime fits u64 at additive steps");
        let d = disc.to_u64().expect("residue fits u64");
        let has = jacobi(d as i64, pp) == 1;
        (true, BigInt::zero(), if has { 2 } else { 0 })
    }
}

/// Lift of the singular point of the reduction mod p to Z², for a model with
/// p | disc.
fn singular_point(m: &WeierstrassModel, p: &BigInt) -> (BigInt, BigInt) {
    if let Some(pp) = p.to_u64() {
        if pp <= 3 {
            for x in 0..pp {
                for y in 0..pp {
                    let xb = BigInt::from(x);
                    let yb = BigInt::from(y);
                    let f = (&yb * &yb + &m.a1 * &xb * &yb + &m.a3 * &yb
                        - (&xb * &xb * &xb + &m.a2 * &xb * &xb + &m.a4 * &xb + &m.a6))
                        .mod_floor(p);
                    let fx = (&m.a1 * &yb
                        - (BigInt::from(3) * &xb * &xb + BigInt::from(2) * &m.a2 * &xb + &m.a4))
                        .mod_floor(p);
                    let fy = (BigInt::from(2) * &yb + &m.a1 * &xb + &m.a3).mod_floor(p);
                    if f.is_zero() && fx.is_zero() && fy.is_zero() {
                        return (xb, yb);
                    }
                }
            }
            unreachable!("no singular point found mod {} despite p | disc", p);
        }
    }
    // p ≥ 5: x0 is the repeated root of g(x) = 4x³ + b2x² + 2b4x + b6 mod p,
    // found from gcd(g, g'), and y0 = -(a1 x0 + a3)/2 mod p.
    let g = [
        m.b6.mod_floor(p),
        (BigInt::from(2) * &m.b4).mod_floor(p),
        m.b2.mod_floor(p),
        BigInt::from(4),
    ];
    let dg = [
        (BigInt::from(2) * &m.b4).mod_floor(p),
        (BigInt::from(2) * &m.b2).mod_floor(p),
        BigInt::from(12).mod_floor(p),
    ];
    let x0 = repeated_root_cubic(&g, &dg, p);
    let inv2 = invmod(&BigInt::from(2), p);
    let y0 = ((-(&m.a1 * &x0 + &m.a3)) * inv2).mod_floor(p);
    (x0, y0)
}

/// Repeated root of a cubic over F_p (p ≥ 5), via gcd with the derivative.
fn repeated_root_cubic(g: &[BigInt; 4], dg: &[BigInt; 3], p: &BigInt) -> BigInt {
    let gcd = poly_gcd_mod(&g[..], &dg[..], p);
    match gcd.len() {
        2 => {
            // linear: root = -c0/c1
            let inv = invmod(&gcd[1], p);
            ((-&gcd[0]) * inv).mod_floor(p)
        }
        3 => {
            // quadratic gcd means a triple root of g: root = -b2/12 where the
            // cubic is 4x³ + b2x² + ...; equivalently repeated root of the
            // quadratic itself.
            let inv = invmod(&(BigInt::from(2) * &gcd[2]), p);
            ((-&gcd[1]) * inv).mod_floor(p)
        }
        _ => unreachable!("no repeated root mod {} despite p | disc", p),
    }
}

/// Polynomial gcd over F_p; coefficients little-endian, result monic.
fn poly_gcd_mod(a: &[BigInt], b: &[BigInt], p: &BigInt) -> Vec<BigInt> {
    let norm = |v: &mut Vec<BigInt>| {
        for c in v.iter_mut() {
            *c = c.mod_floor(p);
        }
        while v.last().map(|c| c.is_zero()).unwrap_or(false) {
            v.pop();
        }
    };
    let mut f = a.to_vec();
    let mut g = b.to_vec();
    norm(&mut f);
    norm(&mut g);
    while !g.is_empty() {
        // f mod g
        let lead_inv = invmod(g.last().unwrap(), p);
        while f.len() >= g.len() {
            let shift = f.len() - g.len();
            let q = (f.last().unwrap() * &lead_inv).mod_floor(p);
            if q.is_zero() {
                f.pop();
                continue;
            }
            let flen = f.len();
            for i in 0..g.len() {
                f[shift + i] = (&f[shift + i] - &q * &g[i]).mod_floor(p);
            }
            debug_assert!(f[flen - 1].is_zero());
            norm(&mut f);
            if f.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut f, &mut g);
    }
    if let Some(l) = f.last() {
        if !l.is_one() {
            let inv = invmod(l, p);
            for c in f.iter_mut() {
                *c = (&*c * &inv).mod_floor(p);
            }
        }
    }
    f
}

/// Brings a model with additive reduction and singular point at the origin to
/// the step-6 normal form v(a1) ≥ 1, v(a2) ≥ 1, v(a3) ≥ 2, v(a4) ≥ 2,
/// v(a6) ≥ 3.
fn normalize_step6(m: &WeierstrassModel, p: &BigInt) -> WeierstrassModel {
    let ok = |e: &WeierstrassModel| {
        val(&e.a1, p) >= 1
            && val(&e.a2, p) >= 1
            && val(&e.a3, p) >= 2
            && val(&e.a4, p) >= 2
            && val(&e.a6, p) >= 3
    };
    if ok(m) {
        return m.clone();
    }
    if let Some(pp) = p.to_u64() {
        if pp <= 3 {
            // Small search over the translations that matter mod p², p³.
            let p2 = pp * pp;
            let p3 = p2 * pp;
            for s in 0..p2 {
                for t in 0..p3 {
                    let cand = translate(m, BigInt::zero(), BigInt::from(s), BigInt::from(t));
                    if ok(&cand) {
                        return cand;
                    }
                }
            }
            unreachable!("step-6 normal form unreachable at p = {}", p);
        }
    }
    // Odd p ≥ 5: kill a1 mod p with s, then raise v(a3) with t ≡ 0 mod p.
    let inv2 = invmod(&BigInt::from(2), p);
    let s = ((-&m.a1) * &inv2).mod_floor(p);
    let e = translate(m, BigInt::zero(), s, BigInt::zero());
    let a3_over_p = exact_div(&e.a3, p);
    let tau = ((-a3_over_p) * &inv2).mod_floor(p);
    let e = translate(&e, BigInt::zero(), BigInt::zero(), p * tau);
    assert!(ok(&e), "step-6 normal form failed at p = {}", p);
    e
}

/// Tate's algorithm at p.  The input should be a (globally) minimal model;
/// a model that is non-minimal at p is rescaled on the fly (step 11) and the
/// data of the local minimal model is returned.
pub fn tate_local(model: &WeierstrassModel, p: &BigInt) -> LocalData {
    let mut e = model.clone();
    loop {
        match tate_pass(&e, p) {
            TateOutcome::Done(data) => return data,
            TateOutcome::NonMinimal => {
                // a_i ← a_i / p^i
                let a1 = exact_div(&e.a1, p);
                let a2 = exact_div(&e.a2, &p.pow(2));
                let a3 = exact_div(&e.a3, &p.pow(3));
                let a4 = exact_div(&e.a4, &p.pow(4));
                let a6 = exact_div(&e.a6, &p.pow(6));
                e = WeierstrassModel::new(a1, a2, a3, a4, a6).expect("rescaled model");
            }
        }
    }
}

enum TateOutcome {
    Done(LocalData),
    NonMinimal,
}

fn tate_pass(model: &WeierstrassModel, p: &BigInt) -> TateOutcome {
    let n = val(&model.disc, p);
    let data = |kodaira, f_p, c_p, reduction| {
        TateOutcome::Done(LocalData {
            p: p.clone(),
            kodaira,
            f_p,
            c_p,
            reduction,
        })
    };

    // Step 1: good reduction.
    if n == 0 {
        return data(KodairaType::I(0), 0, 1, Reduction::Good);
    }

    // Step 2: move the singular point to the origin.
    let (x0, y0) = singular_point(model, p);
    let e = translate(model, x0, BigInt::zero(), y0);
    debug_assert!(val(&e.a3, p) >= 1 && val(&e.a4, p) >= 1 && val(&e.a6, p) >= 1);

    // Multiplicative: the tangent cone at the node is T² + a1 T - a2.
    if val(&e.b2, p) == 0 {
        let split = if let Some(2) = p.to_u64() {
            e.a2.mod_floor(p).is_zero()
        } else {
            let pp = p.to_u64().expect("multiplicative prime fits u64");
            jacobi(e.b2.mod_floor(p).to_i64().expect("residue"), pp) == 1
        };
        let (c_p, red) = if split {
            (n, Reduction::MultiplicativeSplit)
        } else {
            (if n % 2 == 0 { 2 } else { 1 }, Reduction::MultiplicativeNonsplit)
        };
        return data(KodairaType::I(n), 1, c_p, red);
    }

    // Step 3: type II.
    if val(&e.a6, p) < 2 {
        return data(KodairaType::II, n, 1, Reduction::Additive);
    }
    // Step 4: type III.
    if val(&e.b8, p) < 3 {
        return data(KodairaType::III, n - 1, 2, Reduction::Additive);
    }
    // Step 5: type IV, splitting quadratic Y² + (a3/p) Y - (a6/p²).
    if val(&e.b6, p) < 3 {
        let a3p = exact_div(&e.a3, p);
        let a6p2 = exact_div(&e.a6, &(p * p));
        let (_, _, roots) = quadratic_analysis(&BigInt::one(), &a3p, &(-a6p2), p);
        let c = if roots > 0 { 3 } else { 1 };
        return data(KodairaType::IV, n - 2, c, Reduction::Additive);
    }

    // Step 6: normal form, then the cubic P(T) = T³ + a2,1 T² + a4,2 T + a6,3.
    let e = normalize_step6(&e, p);
    let a21 = exact_div(&e.a2, p);
    let a42 = exact_div(&e.a4, &p.pow(2));
    let a63 = exact_div(&e.a6, &p.pow(3));
    let pc = [
        a63.mod_floor(p),
        a42.mod_floor(p),
        a21.mod_floor(p),
        BigInt::one(),
    ];
    let (root_count, repeated) = cubic_root_structure(&pc, p);

    match repeated {
        CubicShape::Separable => {
            // I0*: c = 1 + #roots of P in F_p.
            return data(
                KodairaType::IStar(0),
                n - 4,
                1 + root_count,
                Reduction::Additive,
            );
        }
        CubicShape::DoubleRoot(r0) => {
            // Step 7: I_m* loop.  Move the double root to T = 0.
            let mut e = translate(&e, p * r0, BigInt::zero(), BigInt::zero());
            debug_assert!(val(&e.a2, p) == 1);
            debug_assert!(val(&e.a3, p) >= 2 && val(&e.a4, p) >= 3 && val(&e.a6, p) >= 4);
            let mut ix = 3u32;
            let mut iy = 3u32;
            let mut mx = p.pow(2);
            let mut my = p.pow(2);
            loop {
                // Quadratic in Y: Y² + (a3/my) Y - a6/(mx·my).
                let a3t = exact_div(&e.a3, &my);
                let a6t = exact_div(&e.a6, &(&mx * &my));
                let (distinct, rep, roots) =
                    quadratic_analysis(&BigInt::one(), &a3t, &(-&a6t), p);
                if distinct {
                    let m = ix + iy - 5;
                    let c = if roots > 0 { 4 } else { 2 };
                    return data(KodairaType::IStar(m), n - 4 - m, c, Reduction::Additive);
                }
                e = translate(&e, BigInt::zero(), BigInt::zero(), &my * rep);
                iy += 1;
                my *= p;
                // Quadratic in X: (a2/p) X² + (a4/(p·mx)) X + a6/(mx·my).
                let a2t = exact_div(&e.a2, p);
                let a4t = exact_div(&e.a4, &(p * &mx));
                let a6t = exact_div(&e.a6, &(&mx * &my));
                let (distinct, rep, roots) = quadratic_analysis(&a2t, &a4t, &a6t, p);
                if distinct {
                    let m = ix + iy - 5;
                    let c = if roots > 0 { 4 } else { 2 };
                    return data(KodairaType::IStar(m), n - 4 - m, c, Reduction::Additive);
                }
                e = translate(&e, &mx * rep, BigInt::zero(), BigInt::zero());
                ix += 1;
                mx *= p;
                assert!(ix + iy < n + 12, "runaway I_m* loop");
            }
        }
        CubicShape::TripleRoot(r0) => {
            // Step 8: move the triple root to T = 0.
            let e = translate(&e, p * r0, BigInt::zero(), BigInt::zero());
            debug_assert!(val(&e.a2, p) >= 2 && val(&e.a4, p) >= 3 && val(&e.a6, p) >= 4);
            // Quadratic Y² + (a3/p²) Y - a6/p⁴.
            let a32 = exact_div(&e.a3, &p.pow(2));
            let a64 = exact_div(&e.a6, &p.pow(4));
            let (distinct, rep, roots) = quadratic_analysis(&BigInt::one(), &a32, &(-a64), p);
            if distinct {
                let c = if roots > 0 { 3 } else { 1 };
                return data(KodairaType::IVStar, n - 6, c, Reduction::Additive);
            }
            let e = translate(&e, BigInt::zero(), BigInt::zero(), p.pow(2) * rep);
            debug_assert!(val(&e.a3, p) >= 3 && val(&e.a6, p) >= 5);
            // Step 9: type III*.
            if val(&e.a4, p) == 3 {
                return data(KodairaType::IIIStar, n - 7, 2, Reduction::Additive);
            }
            // Step 10: type II*.
            if val(&e.a6, p) == 5 {
                return data(KodairaType::IIStar, n - 8, 1, Reduction::Additive);
            }
            // Step 11: not minimal at p.
            TateOutcome::NonMinimal
        }
    }
}

enum CubicShape {
    Separable,
    DoubleRoot(BigInt),
    TripleRoot(BigInt),
}

/// Root structure of a monic cubic over F_p: number of distinct F_p roots
/// and the repeated root if any.
///
/// A repeated root of a cubic over F_p always lies in F_p (its conjugates
/// would otherwise force degree ≥ 4), so scanning roots with multiplicities
/// by synthetic division is complete — and avoids the derivative, which
/// degenerates at p = 3.
fn cubic_root_structure(pc: &[BigInt; 4], p: &BigInt) -> (u32, CubicShape) {
    let pp = p
        .to_u64()
        .expect("additive prime fits u64 for root counting");
    assert!(pp < 1_000_000, "additive prime too large for root scan");
    let mut count = 0u32;
    let mut shape = CubicShape::Separable;
    for x in 0..pp {
        let xb = BigInt::from(x);
        let v = (((&pc[3] * &xb + &pc[2]) * &xb + &pc[1]) * &xb + &pc[0]).mod_floor(p);
        if !v.is_zero() {
            continue;
        }
        count += 1;
        // Multiplicity by synthetic division of the cubic by (T - x).
        let mut mult = 0u32;
        let mut coeffs = pc.to_vec(); // little-endian
        while coeffs.len() > 1 {
            let d = coeffs.len() - 1;
            let mut quot = vec![BigInt::zero(); d];
            quot[d - 1] = coeffs[d].clone();
            for i in (1..d).rev() {
                quot[i - 1] = (&coeffs[i] + &xb * &quot[i]).mod_floor(p);
            }
            let rem = (&coeffs[0] + &xb * &quot[0]).mod_floor(p);
            if rem.is_zero() {
                mult += 1;
                coeffs = quot;
            } else {
                break;
            }
        }
        if mult == 3 {
            shape = CubicShape::TripleRoot(xb.clone());
        } else if mult == 2 {
            shape = CubicShape::DoubleRoot(xb.clone());
        }
    }
    (count, shape)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::local::conductor;

    fn m(a: [i64; 5]) -> WeierstrassModel {
        WeierstrassModel::from_i64(a).unwrap()
    }

    #[test]
    fn good_reduction_off_disc() {
        let e = m([0, 0, 1, -1, 0]); // disc 37
        let d = tate_local(&e, &BigInt::from(5));
        assert_eq!(d.kodaira, KodairaType::I(0));
        assert_eq!(d.f_p, 0);
        assert_eq!(d.c_p, 1);
        assert_eq!(d.reduction, Reduction::Good);
    }

    #[test]
    fn multiplicative_fixture_primes() {
        // 11a1 at 11: split I5 with c = 5.
        let e = m([0, -1, 1, -10, -20]);
        let d = tate_local(&e, &BigInt::from(11));
        assert_eq!(d.kodaira, KodairaType::I(5));
        assert_eq!(d.f_p, 1);
        assert_eq!(d.c_p, 5);
        assert_eq!(d.reduction, Reduction::MultiplicativeSplit);

        // 37a1 at 37: I1, c = 1.
        let e = m([0, 0, 1, -1, 0]);
        let d = tate_local(&e, &BigInt::from(37));
        assert_eq!(d.kodaira, KodairaType::I(1));
        assert_eq!(d.c_p, 1);

        // 571a1: Tamagawa product 1.
        let e = m([0, -1, 1, -929, -10595]);
        let (cond, locals) = conductor(&e);
        assert_eq!(cond.n, BigInt::from(571));
        let prod: u32 = locals.iter().map(|l| l.c_p).product();
        assert_eq!(prod, 1);
    }

    #[test]
    fn conductor_of_234446a1() {
        let e = m([1, -1, 0, -79, 289]);
        let (cond, locals) = conductor(&e);
        assert_eq!(cond.n, BigInt::from(234_446));
        let prod: u32 = locals.iter().map(|l| l.c_p).product();
        assert_eq!(prod, 2);
        for l in &locals {
            assert!(matches!(l.kodaira, KodairaType::I(_)));
            assert_eq!(l.f_p, 1);
        }
    }

    #[test]
    fn additive_types_with_small_primes() {
        // y² = x³ - 25x: I0* at 5 with full 2-torsion over F5 (c = 4).
        let e = m([0, 0, 0, -25, 0]);
        let d5 = tate_local(&e, &BigInt::from(5));
        assert_eq!(d5.kodaira, KodairaType::IStar(0));
        assert_eq!(d5.f_p, 2);
        assert_eq!(d5.c_p, 4);
        assert_eq!(d5.reduction, Reduction::Additive);
        // conductor exponent at 2 is bounded by 8
        let d2 = tate_local(&e, &BigInt::from(2));
        assert!(d2.f_p >= 2 && d2.f_p <= 8);
        assert_eq!(d2.reduction, Reduction::Additive);

        // y² = x³ + 1: additive at 2 and 3 (disc = -432 = -2^4·3^3).
        let e = m([0, 0, 0, 0, 1]);
        assert_eq!(e.disc, BigInt::from(-432));
        let d2 = tate_local(&e, &BigInt::from(2));
        let d3 = tate_local(&e, &BigInt::from(3));
        assert!(d2.f_p >= 2);
        assert!(d3.f_p >= 2);
        // Ogg: f = v(disc) - components + 1 at every bad prime.
        assert_eq!(d2.f_p, 4 - d2.kodaira.components() + 1);
        assert_eq!(d3.f_p, 3 - d3.kodaira.components() + 1);
    }

    #[test]
    fn nonminimal_rescale_matches_minimal(){
        // 37a1 scaled by u = 2: Tate at 2 must rescale and report good
        // reduction (37a1 has good reduction at 2).
        let e = m([0, 0, 8, -16, 0]);
        let d = tate_local(&e, &BigInt::from(2));
        assert_eq!(d.kodaira, KodairaType::I(0));
        assert_eq!(d.f_p, 0);
    }

    #[test]
    fn ogg_consistency_across_sample() {
        for a in [
            [0i64, -1, 1, -10, -20],
            [0, 1, 1, -2, 0],
            [0, 0, 1, -7, 6],
            [1, -1, 0, -79, 289],
            [0, 0, 0, -25, 0],
            [0, 1, 1, 1, 0],
            [1, 0, 0, 0, -1],
            [0, 0, 0, 0, 16],
            [1, 1, 1, -10, -10],
            [0, 1, 0, 4, 4],
        ] {
            let e = match WeierstrassModel::from_i64(a) {
                Ok(e) => e,
                Err(_) => continue,
            };
            let (minimal, _) = crate::curve::minimal_model(&e);
            for (p, vd) in crate::arith::factor(&minimal.disc) {
                let d = tate_local(&minimal, &p);
                assert_eq!(
                    d.f_p,
                    vd - d.kodaira.components() + 1,
                    "Ogg fails for {:?} at {}",
                    a,
                    p
                );
                if p > BigInt::from(3) && d.reduction == Reduction::Additive {
                    assert_eq!(d.f_p, 2);
                }
                if d.reduction == Reduction::Good {
                    assert_eq!(d.c_p, 1);
                }
            }
        }
    }
}
