//! The real period Ω_E by the arithmetic–geometric mean.
//!
//! E(R) is η² = g(x) with g(x) = 4x³ + b₂x² + 2b₄x + b₆ and η = 2y + a₁x + a₃.
//! With three real roots e₁ > e₂ > e₃ of g (disc > 0) the period of the
//! unbounded component is π / M(√(e₁-e₃), √(e₁-e₂)); with one real root γ and
//! a complex pair α ± βi it is 2π / M(2√ρ, √(2ρ + 2c)) where ρ = |γ - (α+βi)|
//! and c = γ - α.  Ω_E is normalized as the volume of E(R) under the Néron
//! differential: the component period doubled when E(R) is disconnected
//! (disc > 0).
//!
//! Roots are isolated exactly (integer/rational sign bisection), then
//! polished by Newton at working precision, so the AGM arguments are correct
//! to full precision.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::curve::WeierstrassModel;
use crate::real::{digits_to_bits, Real};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PeriodError {
    #[error("AGM failed to converge within the iteration budget")]
    PrecisionUnachievable,
}

/// Archimedean data of a minimal model.
#[derive(Debug, Clone)]
pub struct ArchimedeanData {
    /// Real period Ω_E (volume normalization).
    pub omega: Real,
    /// Number of connected components of E(R): 2 iff disc > 0.
    pub components: u8,
    /// Real root(s) of g, largest first.
    pub roots: Vec<Real>,
    /// AGM iterations consumed (for the convergence-budget invariant).
    pub agm_iterations: u32,
}

pub fn real_components(model: &WeierstrassModel) -> u8 {
    if model.disc.is_positive() {
        2
    } else {
        1
    }
}

/// Sign of g at a rational point: -1, 0, +1.
fn sign_at(model: &WeierstrassModel, x: &BigRational) -> i32 {
    let v = model.quartic_g(x);
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

/// Bisects a bracketing interval until its width is below 2^-bits.
fn bisect(
    model: &WeierstrassModel,
    mut lo: BigRational,
    mut hi: BigRational,
    bits: usize,
) -> BigRational {
    let s_lo = sign_at(model, &lo);
    debug_assert!(s_lo != 0 && sign_at(model, &hi) != 0 && s_lo != sign_at(model, &hi));
    let two = BigRational::from(BigInt::from(2));
    let width_goal = BigRational::new(BigInt::one(), BigInt::one() << bits);
    while (&hi - &lo) > width_goal {
        let mid = (&lo + &hi) / &two;
        let s = sign_at(model, &mid);
        if s == 0 {
            return mid;
        }
        if s == s_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (&lo + &hi) / &two
}

/// Newton refinement of a root of g at full working precision.
fn polish(model: &WeierstrassModel, x0: &BigRational, prec: usize) -> Real {
    let b2 = Real::from_bigint(&model.b2, prec);
    let two_b4 = Real::from_bigint(&(BigInt::from(2) * &model.b4), prec);
    let b6 = Real::from_bigint(&model.b6, prec);
    let four = Real::from_i64(4, prec);
    let twelve = Real::from_i64(12, prec);
    let two = Real::from_i64(2, prec);
    let g = |x: &Real| -> Real { &(&(&(&four * x) + &b2) * x + &two_b4) * x + &b6 };
    let dg = |x: &Real| -> Real { &(&(&twelve * x) + &(&two * &b2)) * x + &two_b4 };
    let mut x = Real::from_ratio(x0, prec);
    // Seed accuracy 2^-90 doubles each step; a handful of steps saturates.
    for _ in 0..8 {
        let step = &g(&x) / &dg(&x);
        x = &x - &step;
    }
    x
}

/// Isolates the real roots of g exactly, largest first.
fn real_roots(model: &WeierstrassModel, prec: usize) -> Vec<Real> {
    // Cauchy bound for 4x³ + b2x² + 2b4x + b6.
    let m = model
        .b2
        .abs()
        .max((BigInt::from(2) * &model.b4).abs())
        .max(model.b6.abs());
    let bound = BigRational::from(&m / BigInt::from(4) + BigInt::from(2));
    let neg_bound = -&bound;
    let seed_bits = 96;
    if model.disc.is_positive() {
        // Three real roots, separated by the critical points of g:
        // g'(x) = 12x² + 2b2x + 2b4 has roots (-b2 ± √c4)/12 (c4 > 0 here).
        assert!(model.c4.is_positive());
        let s = model.c4.sqrt(); // integer floor sqrt
        let lo_crit = BigRational::new(-&model.b2 - &s - BigInt::one(), BigInt::from(12));
        let hi_crit = BigRational::new(-&model.b2 + &s + BigInt::one(), BigInt::from(12));
        let mut cuts = vec![neg_bound, lo_crit, hi_crit, bound];
        cuts.sort();
        let mut roots = Vec::new();
        for w in cuts.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            let (sa, sb) = (sign_at(model, a), sign_at(model, b));
            if sa == 0 {
                roots.push(polish(model, a, prec));
                continue;
            }
            if sb != 0 && sa != sb {
                let r = bisect(model, a.clone(), b.clone(), seed_bits);
                roots.push(polish(model, &r, prec));
            }
        }
        // The rightmost cut can itself be the largest root only by accident
        // of the bound; never for disc ≠ 0 integral curves.
        assert_eq!(roots.len(), 3, "disc > 0 must give three real roots");
        roots.sort_by(|a, b| b.cmp_real(a));
        roots
    } else {
        let r = bisect(model, neg_bound, bound, seed_bits);
        vec![polish(model, &r, prec)]
    }
}

/// AGM of two positive reals; returns (limit, iterations).
fn agm(a0: &Real, b0: &Real, prec: usize) -> Result<(Real, u32), PeriodError> {
    let mut a = a0.max_real(b0);
    let mut b = if a0.cmp_real(b0) == std::cmp::Ordering::Less {
        a0.clone()
    } else {
        b0.clone()
    };
    let two = Real::from_i64(2, prec);
    // Quadratic convergence: log2(prec) + 8 iterations is a generous budget.
    let budget = (usize::BITS - prec.leading_zeros()) + 8;
    for it in 0..budget {
        let diff = (&a - &b).abs();
        if diff.is_zero()
            || diff.exponent().unwrap_or(i32::MIN)
                <= a.exponent().unwrap_or(0) - (prec as i32) + 1
        {
            return Ok((a, it));
        }
        let am = (&a + &b) / &two;
        let gm = (&a * &b).sqrt();
        a = am;
        b = gm;
    }
    Err(PeriodError::PrecisionUnachievable)
}

/// Real period of a minimal model at the requested decimal precision.
pub fn real_period(model: &WeierstrassModel, digits: u32) -> Result<ArchimedeanData, PeriodError> {
    let prec = digits_to_bits(digits) + 16;
    let pi = Real::pi(prec);
    let roots = real_roots(model, prec);
    let components = real_components(model);
    let (omega, iters) = if components == 2 {
        let e1 = &roots[0];
        let e2 = &roots[1];
        let e3 = &roots[2];
        let x = (e1 - e3).sqrt();
        let y = (e1 - e2).sqrt();
        let (m, it) = agm(&x, &y, prec)?;
        (&(&pi / &m) * &Real::from_i64(2, prec), it)
    } else {
        let gamma = &roots[0];
        // Monic deflation: x³ + B2x² + B1x + B0 = (x-γ)(x² + qx + s) with
        // q = B2 + γ and s = B1 + γq; the complex pair is α ± βi with
        // α = -q/2, and ρ² = |γ - e₂|² = γ² + qγ + s.
        let prec_q = prec;
        let quarter = Real::from_ratio(&BigRational::new(BigInt::one(), BigInt::from(4)), prec_q);
        let half = Real::from_ratio(&BigRational::new(BigInt::one(), BigInt::from(2)), prec_q);
        let cap_b2 = &Real::from_bigint(&model.b2, prec_q) * &quarter;
        let cap_b1 = &Real::from_bigint(&model.b4, prec_q) * &half;
        let q = &cap_b2 + gamma;
        let s = &cap_b1 + &(gamma * &q);
        let c = gamma + &(&q * &half); // γ - α
        let rho2 = &(&(gamma * gamma) + &(&q * gamma)) + &s;
        let rho = rho2.sqrt();
        let two = Real::from_i64(2, prec);
        let x = &two * &rho.sqrt();
        let y = (&(&two * &rho) + &(&two * &c)).sqrt();
        let (m, it) = agm(&x, &y, prec)?;
        (&(&two * &pi) / &m, it)
    };
    Ok(ArchimedeanData {
        omega,
        components,
        roots,
        agm_iterations: iters,
    })
}
