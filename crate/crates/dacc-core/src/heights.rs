//! Néron–Tate canonical heights, the height pairing, and the regulator.
//!
//! Normalization: ĥ(P) = lim 4⁻ⁿ h(x(2ⁿP)), the convention in which the
//! generator (0,0) of y² + y = x³ - x has height 0.05111... (and regulators
//! match the standard tables); torsion points have height exactly zero.
//!
//! Method.  ĥ decomposes as a sum of local Néron functions normalized by
//! λ(2P) = 4λ(P) - log|η(P)|_v (η = 2y + a₁x + a₃); the inhomogeneous terms
//! cancel globally by the product formula.  At a finite place the normalized
//! local height of a point with nonsingular reduction is
//! (1/2)·max(0, -v_p(x))·log p, so for a point lying on the identity
//! component at every bad prime the whole finite part collapses to
//! (1/2)·log den(x).  Multiplying by M = lcm of the Tamagawa numbers kills
//! every component group, so
//!
//!     ĥ(P) = 2·[ λ_∞(MP) + (1/2)·log den(x(MP)) ] / M²
//!
//! (the leading 2 converts from the half-normalized local sum to the
//! x-height limit convention above),
//!
//! with λ_∞ summed by the convergent doubling series
//! λ_∞(Q) = (1/2)log W(Q) + (1/2)Σ 4⁻ⁿ⁻¹ μ(2ⁿQ), where W = max(|x|, 1) and
//! μ = log( max(|F(x)|, |G(x)|) / W⁴ ) over the real duplication pair
//! x(2Q) = F(x)/G(x).  No Kodaira-type case analysis is needed and every
//! finite-place contribution is exact integer arithmetic.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use thiserror::Error;

use crate::curve::{self, RationalPoint, WeierstrassModel};
use crate::local::LocalData;
use crate::real::{digits_to_bits, Real};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HeightError {
    #[error("point ({0}, {1}) is not on the curve")]
    PointNotOnCurve(String, String),
    #[error("canonical height of the identity is not defined")]
    IdentityPoint,
    #[error("generators are dependent: Gram determinant {0} is not positive")]
    DependentGenerators(String),
}

/// Canonical height with a guaranteed absolute error bound.
#[derive(Debug, Clone)]
pub struct HeightValue {
    pub value: Real,
    pub precision_bound: Real,
}

/// Pairwise Néron–Tate pairings of a generator list.
#[derive(Debug, Clone)]
pub struct GramMatrix {
    pub dim: usize,
    pub entries: Vec<Vec<Real>>,
}

#[derive(Debug, Clone)]
pub struct RegulatorResult {
    pub regulator: Real,
    pub matrix: GramMatrix,
}

/// Precomputed context: the curve, the component-killing multiplier, and the
/// working precision.
pub struct HeightContext<'a> {
    pub model: &'a WeierstrassModel,
    multiplier: i64,
    prec: usize,
    /// Positivity tolerance for the regulator determinant.
    det_tolerance: f64,
}

impl<'a> HeightContext<'a> {
    /// `locals` must cover every bad prime of the (minimal) model.
    pub fn new(model: &'a WeierstrassModel, locals: &[LocalData], digits: u32) -> Self {
        let mut m = 1i64;
        for l in locals {
            let c = l.c_p as i64;
            m = num_integer::lcm(m, c);
        }
        HeightContext {
            model,
            multiplier: m,
            prec: digits_to_bits(digits) + 64,
            det_tolerance: 1e-9,
        }
    }

    pub fn multiplier(&self) -> i64 {
        self.multiplier
    }
}

/// λ_∞ in the duplication normalization, by the doubling series.
fn archimedean_lambda(model: &WeierstrassModel, x0: &Real, prec: usize) -> Real {
    let b2 = Real::from_bigint(&model.b2, prec);
    let b4 = Real::from_bigint(&model.b4, prec);
    let b6 = Real::from_bigint(&model.b6, prec);
    let b8 = Real::from_bigint(&model.b8, prec);
    let two = Real::from_i64(2, prec);
    let four = Real::from_i64(4, prec);
    let one = Real::from_i64(1, prec);
    let half = &one / &two;

    let f_poly = |x: &Real| -> Real {
        // x⁴ - b4 x² - 2 b6 x - b8
        let x2 = x * x;
        &(&(&x2 * &x2) - &(&b4 * &x2)) - &(&(&two * &b6) * x) - &b8
    };
    let g_poly = |x: &Real| -> Real {
        (&(&(&four * x) + &b2) * x + &(&two * &b4)) * x + &b6
    };

    let mut x = x0.clone();
    let w0 = x.abs().max_real(&one);
    let mut total = &half * &w0.ln();
    let mut scale = half.clone(); // (1/2)·4^{-n-1} accumulates
    let budget = prec / 2 + 16;
    for _ in 0..budget {
        scale = &scale / &four;
        let fx = f_poly(&x);
        let gx = g_poly(&x);
        let w = x.abs().max_real(&one);
        let w4 = w.powi(4);
        let mu = (&fx.abs().max_real(&gx.abs()) / &w4).ln();
        total = &total + &(&scale * &mu);
        x = &fx / &gx;
    }
    total
}

/// ĥ(P) with absolute error below the reported bound.
pub fn canonical_height(ctx: &HeightContext, p: &RationalPoint) -> Result<HeightValue, HeightError> {
    let model = ctx.model;
    match p {
        RationalPoint::Identity => return Err(HeightError::IdentityPoint),
        RationalPoint::Affine { x, y } => {
            if !model.contains(p) {
                return Err(HeightError::PointNotOnCurve(x.to_string(), y.to_string()));
            }
        }
    }
    let bound = Real::from_f64(2f64.powi(-((ctx.prec as i32) - 48)), ctx.prec);
    if curve::small_order(model, p, 12).is_some() {
        return Ok(HeightValue {
            value: Real::zero(ctx.prec),
            precision_bound: Real::zero(ctx.prec),
        });
    }
    let q = curve::mul(model, ctx.multiplier, p).expect("validated point");
    let h = height_on_identity_components(ctx, &q);
    let scale = Real::from_i64(2, ctx.prec)
        / Real::from_i64(ctx.multiplier * ctx.multiplier, ctx.prec);
    Ok(HeightValue {
        value: &h * &scale,
        precision_bound: bound,
    })
}

/// ĥ(Q) for a point already lying on the identity component everywhere.
fn height_on_identity_components(ctx: &HeightContext, q: &RationalPoint) -> Real {
    let (x, _y) = match q {
        RationalPoint::Affine { x, y } => (x, y),
        RationalPoint::Identity => unreachable!("multiple of a non-torsion point"),
    };
    let prec = ctx.prec;
    let xr = Real::from_ratio(x, prec);
    let lam_inf = archimedean_lambda(ctx.model, &xr, prec);
    let den = x.denom().abs();
    let half = &Real::from_i64(1, prec) / &Real::from_i64(2, prec);
    let fin = if den.is_one() {
        Real::zero(prec)
    } else {
        &half * &Real::from_bigint(&den, prec).ln()
    };
    &lam_inf + &fin
}

/// ⟨P, Q⟩ = (ĥ(P+Q) - ĥ(P) - ĥ(Q)) / 2.
pub fn height_pairing(
    ctx: &HeightContext,
    p: &RationalPoint,
    q: &RationalPoint,
) -> Result<Real, HeightError> {
    let sum = curve::add(ctx.model, p, q)
        .map_err(|e| match e {
            curve::CurveError::PointNotOnCurve(a, b) => HeightError::PointNotOnCurve(a, b),
            _ => HeightError::IdentityPoint,
        })?;
    let h_sum = if sum.is_identity() {
        Real::zero(ctx.prec)
    } else {
        canonical_height(ctx, &sum)?.value
    };
    let hp = canonical_height(ctx, p)?.value;
    let hq = canonical_height(ctx, q)?.value;
    let two = Real::from_i64(2, ctx.prec);
    Ok(&(&(&h_sum - &hp) - &hq) / &two)
}

/// Regulator: determinant of the Gram matrix; exactly 1 for an empty list.
pub fn regulator(
    ctx: &HeightContext,
    generators: &[RationalPoint],
) -> Result<RegulatorResult, HeightError> {
    let r = generators.len();
    let prec = ctx.prec;
    if r == 0 {
        return Ok(RegulatorResult {
            regulator: Real::from_i64(1, prec),
            matrix: GramMatrix {
                dim: 0,
                entries: vec![],
            },
        });
    }
    let mut entries = vec![vec![Real::zero(prec); r]; r];
    for i in 0..r {
        for j in i..r {
            let v = if i == j {
                canonical_height(ctx, &generators[i])?.value
            } else {
                height_pairing(ctx, &generators[i], &generators[j])?
            };
            entries[i][j] = v.clone();
            entries[j][i] = v;
        }
    }
    let det = determinant(&entries, prec);
    let tol = Real::from_f64(ctx.det_tolerance, prec);
    if det.cmp_real(&tol) != std::cmp::Ordering::Greater {
        return Err(HeightError::DependentGenerators(format!(
            "{:e}",
            det.to_f64()
        )));
    }
    Ok(RegulatorResult {
        regulator: det,
        matrix: GramMatrix { dim: r, entries },
    })
}

/// Gaussian elimination with partial pivoting (r ≤ 8 in practice).
fn determinant(m: &[Vec<Real>], prec: usize) -> Real {
    let n = m.len();
    let mut a: Vec<Vec<Real>> = m.to_vec();
    let mut det = Real::from_i64(1, prec);
    for col in 0..n {
        let mut piv = col;
        for row in col + 1..n {
            if a[row][col].abs().cmp_real(&a[piv][col].abs()) == std::cmp::Ordering::Greater {
                piv = row;
            }
        }
        if a[piv][col].is_zero() {
            return Real::zero(prec);
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det = &det * &a[col][col];
        let inv_div = a[col][col].clone();
        for row in col + 1..n {
            let factor = &a[row][col] / &inv_div;
            for k in col..n {
                let sub = &factor * &a[col][k];
                a[row][k] = &a[row][k] - &sub;
            }
        }
    }
    det
}

/// Leading principal minors all positive (positive-definiteness check).
pub fn positive_definite(matrix: &GramMatrix, prec: usize) -> bool {
    for k in 1..=matrix.dim {
        let sub: Vec<Vec<Real>> = matrix.entries[..k]
            .iter()
            .map(|row| row[..k].to_vec())
            .collect();
        if !determinant(&sub, prec).is_positive() {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{minimal_model, mul, neg, RationalPoint};
    use crate::local::conductor;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn setup(a: [i64; 5]) -> (WeierstrassModel, Vec<LocalData>) {
        let m = WeierstrassModel::from_i64(a).unwrap();
        let (minimal, _) = minimal_model(&m);
        let (_, locals) = conductor(&minimal);
        (minimal, locals)
    }

    /// Independent oracle: 4⁻ⁿ·h(x(2ⁿP)) at n = 8 approximates ĥ(P) within
    /// ~1e-4 (the naive-vs-canonical height gap shrinks as 4⁻ⁿ).
    fn naive_limit_oracle(model: &WeierstrassModel, p: &RationalPoint) -> f64 {
        let mut q = p.clone();
        for _ in 0..8 {
            q = crate::curve::add(model, &q, &q).unwrap();
        }
        let x = q.x().unwrap();
        let num_bits = x.numer().abs().bits() as f64;
        let den_bits = x.denom().abs().bits() as f64;
        let h = num_bits.max(den_bits) * std::f64::consts::LN_2;
        h / 4f64.powi(8)
    }

    #[test]
    fn generator_height_37a1() {
        let (m, locals) = setup([0, 0, 1, -1, 0]);
        let ctx = HeightContext::new(&m, &locals, 40);
        assert_eq!(ctx.multiplier(), 1);
        let p = RationalPoint::affine_i64(0, 0);
        let h = canonical_height(&ctx, &p).unwrap().value.to_f64();
        assert!((h - 0.0511).abs() < 1e-4, "h = {}", h);
        // Normalization pin: the naive doubling limit must agree to ~1e-3;
        // a factor-of-two or a (log Δ)/12 convention slip would miss by far.
        let oracle = naive_limit_oracle(&m, &p);
        assert!((h - oracle).abs() < 1e-3, "h = {} oracle = {}", h, oracle);
    }

    #[test]
    fn quadraticity_and_parallelogram() {
        let (m, locals) = setup([0, 0, 1, -1, 0]);
        let ctx = HeightContext::new(&m, &locals, 40);
        let p = RationalPoint::affine_i64(0, 0);
        let hp = canonical_height(&ctx, &p).unwrap().value;
        for n in [2i64, 3, 5] {
            let np = mul(&m, n, &p).unwrap();
            let hnp = canonical_height(&ctx, &np).unwrap().value;
            let expect = &hp * &Real::from_i64(n * n, hp.prec());
            assert!(
                (&hnp - &expect).abs().to_f64() < 1e-9,
                "n = {}: {} vs {}",
                n,
                hnp.to_f64(),
                expect.to_f64()
            );
        }
        // parallelogram on (P, 2P)
        let q = mul(&m, 2, &p).unwrap();
        let hq = canonical_height(&ctx, &q).unwrap().value;
        let sum = crate::curve::add(&m, &p, &q).unwrap();
        let diff = crate::curve::add(&m, &p, &neg(&m, &q)).unwrap();
        let hs = canonical_height(&ctx, &sum).unwrap().value;
        let hd = canonical_height(&ctx, &diff).unwrap().value;
        let lhs = &hs + &hd;
        let rhs = &(&hp + &hp) + &(&hq + &hq);
        assert!((&lhs - &rhs).abs().to_f64() < 1e-9);
    }

    #[test]
    fn additive_reduction_curve_heights() {
        // y² = x³ - 25x: additive at 2 and 5, rank 1 with generator (-4, 6),
        // full 2-torsion.  Exercises the component-killing path (M > 1).
        let (m, locals) = setup([0, 0, 0, -25, 0]);
        let ctx = HeightContext::new(&m, &locals, 40);
        assert!(ctx.multiplier() > 1);
        let p = RationalPoint::affine_i64(-4, 6);
        assert!(m.contains(&p));
        let hp = canonical_height(&ctx, &p).unwrap().value;
        assert!(hp.is_positive());
        let oracle = naive_limit_oracle(&m, &p);
        assert!(
            (hp.to_f64() - oracle).abs() < 1e-3,
            "h = {} oracle = {}",
            hp.to_f64(),
            oracle
        );
        for n in [2i64, 3, 5] {
            let np = mul(&m, n, &p).unwrap();
            let hnp = canonical_height(&ctx, &np).unwrap().value;
            let expect = &hp * &Real::from_i64(n * n, hp.prec());
            assert!(
                (&hnp - &expect).abs().to_f64() < 1e-9,
                "additive quadraticity n = {}",
                n
            );
        }
        // torsion pairs to zero against the generator
        let t = RationalPoint::affine_i64(0, 0);
        let pairing = height_pairing(&ctx, &p, &t).unwrap();
        assert!(pairing.abs().to_f64() < 1e-10);
    }

    #[test]
    fn torsion_heights_vanish() {
        // 11a1: M = 5 annihilates the 5-torsion exactly.
        let (m, locals) = setup([0, -1, 1, -10, -20]);
        let ctx = HeightContext::new(&m, &locals, 40);
        let t = RationalPoint::affine_i64(5, 5);
        let h = canonical_height(&ctx, &t).unwrap().value;
        assert!(h.abs().to_f64() < 1e-12);
        // 19a3: trivial Tamagawa numbers, so the series path itself must
        // return zero for the 3-torsion point (0, 0).
        let (m, locals) = setup([0, 1, 1, 1, 0]);
        let ctx = HeightContext::new(&m, &locals, 40);
        assert_eq!(ctx.multiplier(), 1);
        let t = RationalPoint::affine_i64(0, 0);
        let q = t.clone();
        let h_series = height_on_identity_components(&ctx, &q);
        assert!(h_series.abs().to_f64() < 1e-12, "{}", h_series.to_f64());
    }

    #[test]
    fn pairing_identities() {
        let (m, locals) = setup([0, 1, 1, -2, 0]);
        let ctx = HeightContext::new(&m, &locals, 40);
        let p = RationalPoint::affine_i64(0, 0);
        let hp = canonical_height(&ctx, &p).unwrap().value;
        let pp = height_pairing(&ctx, &p, &p).unwrap();
        assert!((&pp - &hp).abs().to_f64() < 1e-11);
        let pm = height_pairing(&ctx, &p, &neg(&m, &p)).unwrap();
        assert!((&pm + &hp).abs().to_f64() < 1e-11);
    }

    #[test]
    fn regulators_of_table_fixtures() {
        let (m, locals) = setup([0, 1, 1, -2, 0]); // 389a1
        let ctx = HeightContext::new(&m, &locals, 40);
        let gens = vec![
            RationalPoint::affine_i64(0, 0),
            RationalPoint::affine_i64(1, 0),
        ];
        let r = regulator(&ctx, &gens).unwrap();
        assert!((r.regulator.to_f64() - 0.1525).abs() < 5e-5);
        assert!(positive_definite(&r.matrix, 128));

        let (m, locals) = setup([0, 0, 1, -7, 6]); // 5077a1
        let ctx = HeightContext::new(&m, &locals, 40);
        let gens = vec![
            RationalPoint::affine_i64(-2, 3),
            RationalPoint::affine_i64(-1, 3),
            RationalPoint::affine_i64(0, 2),
        ];
        let r = regulator(&ctx, &gens).unwrap();
        assert!((r.regulator.to_f64() - 0.4171).abs() < 5e-5);

        // empty list
        let empty = regulator(&ctx, &[]).unwrap();
        assert_eq!(empty.regulator.to_f64(), 1.0);
    }

    #[test]
    fn dependent_generators_detected() {
        let (m, locals) = setup([0, 0, 1, -1, 0]);
        let ctx = HeightContext::new(&m, &locals, 40);
        let p = RationalPoint::affine_i64(0, 0);
        let q = mul(&m, 2, &p).unwrap();
        match regulator(&ctx, &[p, q]) {
            Err(HeightError::DependentGenerators(_)) => {}
            other => panic!("expected dependence, got {:?}", other.map(|r| r.regulator.to_f64())),
        }
    }

    #[test]
    fn basis_invariance_under_unimodular_change() {
        let (m, locals) = setup([0, 1, 1, -2, 0]);
        let ctx = HeightContext::new(&m, &locals, 40);
        let p1 = RationalPoint::affine_i64(0, 0);
        let p2 = RationalPoint::affine_i64(1, 0);
        let r1 = regulator(&ctx, &[p1.clone(), p2.clone()]).unwrap().regulator;
        // unimodular: (P1 + P2, P2) and (P1 + 2P2, P1 + P2)
        let s1 = crate::curve::add(&m, &p1, &p2).unwrap();
        let r2 = regulator(&ctx, &[s1.clone(), p2.clone()]).unwrap().regulator;
        assert!((&r1 - &r2).abs().to_f64() < 1e-9);
        let s2 = crate::curve::add(&m, &s1, &p2).unwrap();
        let r3 = regulator(&ctx, &[s2, s1]).unwrap().regulator;
        assert!((&r1 - &r3).abs().to_f64() < 1e-9);
    }

    #[test]
    fn rejects_identity_and_off_curve() {
        let (m, locals) = setup([0, 0, 1, -1, 0]);
        let ctx = HeightContext::new(&m, &locals, 40);
        assert!(matches!(
            canonical_height(&ctx, &RationalPoint::Identity),
            Err(HeightError::IdentityPoint)
        ));
        let bad = RationalPoint::Affine {
            x: BigRational::from(BigInt::from(1)),
            y: BigRational::from(BigInt::from(1)),
        };
        assert!(matches!(
            canonical_height(&ctx, &bad),
            Err(HeightError::PointNotOnCurve(_, _))
        ));
    }
}
