//! Arbitrary-precision real arithmetic.
//!
//! Thin wrapper over `astro_float::BigFloat` that carries its working
//! precision (in bits) alongside the value, so arithmetic expressions do not
//! have to thread a precision argument through every call.  Binary operations
//! work at the larger of the two operand precisions, rounding to even.
//!
//! Precision is fixed when a value is created (`Real::from_*(.., prec)`) and
//! propagates through expressions.  `digits_to_bits` converts a decimal digit
//! budget to a bit budget with guard bits included.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

/// Bits of working precision for a decimal digit target, with guard bits.
pub fn digits_to_bits(digits: u32) -> usize {
    // log2(10) = 3.3219...; 32 guard bits absorb rounding drift in long sums.
    (digits as usize) * 3322 / 1000 + 32
}

#[derive(Clone)]
pub struct Real {
    v: BigFloat,
    prec: usize,
}

impl Real {
    fn wrap(v: BigFloat, prec: usize) -> Self {
        debug_assert!(!v.is_nan(), "NaN produced in Real arithmetic");
        Real { v, prec }
    }

    pub fn zero(prec: usize) -> Self {
        Real::wrap(BigFloat::from_i32(0, prec), prec)
    }

    pub fn from_i64(n: i64, prec: usize) -> Self {
        Real::wrap(BigFloat::from_i64(n, prec), prec)
    }

    pub fn from_f64(x: f64, prec: usize) -> Self {
        Real::wrap(BigFloat::from_f64(x, prec), prec)
    }

    pub fn from_bigint(n: &BigInt, prec: usize) -> Self {
        // Exact: feed the integer in base 10 through the parser at a precision
        // wide enough to hold every bit, then round down to `prec`.
        let full = n.bits() as usize + 64;
        let s = n.to_string();
        let v = CONSTS.with(|cc| {
            BigFloat::parse(&s, Radix::Dec, full.max(prec), RM, &mut cc.borrow_mut())
        });
        let mut v = v;
        v.set_precision(prec, RM).expect("set_precision");
        Real::wrap(v, prec)
    }

    pub fn from_ratio(q: &BigRational, prec: usize) -> Self {
        let num = Real::from_bigint(q.numer(), prec + 8);
        let den = Real::from_bigint(q.denom(), prec + 8);
        let mut out = (&num / &den).v;
        out.set_precision(prec, RM).expect("set_precision");
        Real::wrap(out, prec)
    }

    pub fn pi(prec: usize) -> Self {
        Real::wrap(CONSTS.with(|cc| cc.borrow_mut().pi(prec, RM)), prec)
    }

    pub fn ln2(prec: usize) -> Self {
        Real::wrap(CONSTS.with(|cc| cc.borrow_mut().ln_2(prec, RM)), prec)
    }

    pub fn prec(&self) -> usize {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        !self.v.is_zero() && self.v.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.v.is_negative()
    }

    pub fn abs(&self) -> Self {
        Real::wrap(self.v.abs(), self.prec)
    }

    pub fn sqrt(&self) -> Self {
        Real::wrap(self.v.sqrt(self.prec, RM), self.prec)
    }

    pub fn ln(&self) -> Self {
        let v = CONSTS.with(|cc| self.v.ln(self.prec, RM, &mut cc.borrow_mut()));
        Real::wrap(v, self.prec)
    }

    pub fn exp(&self) -> Self {
        let v = CONSTS.with(|cc| self.v.exp(self.prec, RM, &mut cc.borrow_mut()));
        Real::wrap(v, self.prec)
    }

    pub fn powi(&self, n: usize) -> Self {
        Real::wrap(self.v.powi(n, self.prec, RM), self.prec)
    }

    /// Binary exponent e with |x| in [2^(e-1), 2^e); None for zero.
    pub fn exponent(&self) -> Option<i32> {
        if self.v.is_zero() {
            None
        } else {
            self.v.exponent()
        }
    }

    pub fn cmp_real(&self, other: &Real) -> Ordering {
        let c = self.v.cmp(&other.v);
        match c {
            Some(x) if x < 0 => Ordering::Less,
            Some(x) if x > 0 => Ordering::Greater,
            _ => Ordering::Equal,
        }
    }

    pub fn max_real(&self, other: &Real) -> Real {
        if self.cmp_real(other) == Ordering::Less {
            other.clone()
        } else {
            self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.v.is_zero() {
            return 0.0;
        }
        let (words, _len, sign, exp, _inexact) = self.v.as_raw_parts().expect("raw parts");
        // Mantissa is a little-endian fraction in [0.5, 1); take the top 128 bits.
        let n = words.len();
        let top = words[n - 1] as f64;
        let next = if n >= 2 { words[n - 2] as f64 } else { 0.0 };
        let frac = top / 2f64.powi(64) + next / 2f64.powi(128);
        let mag = frac * 2f64.powi(exp);
        if sign == Sign::Neg {
            -mag
        } else {
            mag
        }
    }

    /// Nearest integer as a BigInt (ties round to even).
    pub fn round_to_bigint(&self) -> BigInt {
        let half = Real::from_ratio(&BigRational::new(BigInt::from(1), BigInt::from(2)), self.prec);
        let fl = self.floor_bigint();
        let frac = self - &Real::from_bigint(&fl, self.prec);
        let one = BigInt::from(1);
        match frac.cmp_real(&half) {
            Ordering::Less => fl,
            Ordering::Greater => fl + one,
            Ordering::Equal => {
                if (&fl % BigInt::from(2)).is_zero() {
                    fl
                } else {
                    fl + one
                }
            }
        }
    }

    pub fn floor_bigint(&self) -> BigInt {
        let f = self.v.floor();
        bigfloat_int_to_bigint(&f)
    }

    /// Fixed-point decimal with `dp` digits after the point, ties to even.
    pub fn format_fixed(&self, dp: u32) -> String {
        let scale = Real::from_bigint(&BigInt::from(10).pow(dp), self.prec);
        let scaled = self * &scale;
        let n = scaled.round_to_bigint();
        let neg = n.is_negative();
        let digits = n.abs().to_string();
        let digits = if digits.len() <= dp as usize {
            format!("{}{}", "0".repeat(dp as usize + 1 - digits.len()), digits)
        } else {
            digits
        };
        let split = digits.len() - dp as usize;
        let (int_part, frac_part) = digits.split_at(split);
        let sign = if neg { "-" } else { "" };
        if dp == 0 {
            format!("{}{}", sign, int_part)
        } else {
            format!("{}{}.{}", sign, int_part, frac_part)
        }
    }

    /// Scientific notation with `sig` significant decimal digits.
    pub fn format_sci(&self, sig: usize) -> String {
        if self.is_zero() {
            return "0.0e0".to_string();
        }
        let s = CONSTS
            .with(|cc| self.v.format(Radix::Dec, RM, &mut cc.borrow_mut()))
            .expect("format");
        // astro-float emits d.dddd...e+xx ; trim the mantissa to sig digits.
        let (mant, exp) = match s.split_once('e') {
            Some((m, e)) => (m.to_string(), e.to_string()),
            None => (s, "+0".to_string()),
        };
        let neg = mant.starts_with('-');
        let mant_digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
        let keep = mant_digits.len().min(sig.max(1));
        let kept = &mant_digits[..keep];
        let (first, rest) = kept.split_at(1);
        let sign = if neg { "-" } else { "" };
        if rest.is_empty() {
            format!("{}{}e{}", sign, first, exp.trim_start_matches('+'))
        } else {
            format!("{}{}.{}e{}", sign, first, rest, exp.trim_start_matches('+'))
        }
    }
}

/// Exact conversion of an integer-valued BigFloat to BigInt.
fn bigfloat_int_to_bigint(f: &BigFloat) -> BigInt {
    if f.is_zero() {
        return BigInt::zero();
    }
    let (words, _len, sign, exp, _inexact) = f.as_raw_parts().expect("raw parts");
    let nbits = words.len() * 64;
    let mut mant = BigInt::zero();
    for (i, w) in words.iter().enumerate() {
        mant += BigInt::from(*w) << (64 * i);
    }
    // value = mant / 2^nbits * 2^exp
    let shift = exp as i64 - nbits as i64;
    let mag = if shift >= 0 {
        mant << shift as usize
    } else {
        mant >> (-shift) as usize
    };
    if sign == Sign::Neg {
        -mag
    } else {
        mag
    }
}

impl fmt::Debug for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Real({:e} @{}b)", self.to_f64(), self.prec)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.format_sci(self.prec * 1000 / 3322))
    }
}

macro_rules! real_binop {
    ($trait:ident, $method:ident, $bf:ident) => {
        impl $trait<&Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                let p = self.prec.max(rhs.prec);
                Real::wrap(self.v.$bf(&rhs.v, p, RM), p)
            }
        }
        impl $trait<Real> for Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Real> for Real {
            type Output = Real;
            fn $method(self, rhs: &Real) -> Real {
                (&self).$method(rhs)
            }
        }
        impl $trait<Real> for &Real {
            type Output = Real;
            fn $method(self, rhs: Real) -> Real {
                self.$method(&rhs)
            }
        }
    };
}

real_binop!(Add, add, add);
real_binop!(Sub, sub, sub);
real_binop!(Mul, mul, mul);
real_binop!(Div, div, div);

impl Neg for &Real {
    type Output = Real;
    fn neg(self) -> Real {
        Real::wrap(self.v.clone().neg(), self.prec)
    }
}

impl Neg for Real {
    type Output = Real;
    fn neg(self) -> Real {
        -&self
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_real(other) == Ordering::Equal
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::str::FromStr;

    #[test]
    fn pi_matches_reference() {
        let p = digits_to_bits(50);
        let pi = Real::pi(p);
        let reference = "3.1415926535897932384626433832795028841971693993751";
        assert_eq!(&pi.format_fixed(49)[..40], &reference[..40]);
    }

    #[test]
    fn bigint_round_trip() {
        let p = digits_to_bits(60);
        let n = BigInt::from_str("123456789012345678901234567890123456789").unwrap();
        let r = Real::from_bigint(&n, p);
        assert_eq!(r.floor_bigint(), n);
        let m = -&n;
        let r = Real::from_bigint(&m, p);
        assert_eq!(r.round_to_bigint(), m);
    }

    #[test]
    fn ratio_and_ops() {
        let p = digits_to_bits(40);
        let q = BigRational::new(BigInt::from(1), BigInt::from(3));
        let third = Real::from_ratio(&q, p);
        let one = Real::from_i64(1, p);
        let err = (&(&third * &Real::from_i64(3, p)) - &one).abs();
        assert!(err.to_f64() < 1e-38);
    }

    #[test]
    fn sqrt_ln_exp() {
        let p = digits_to_bits(40);
        let two = Real::from_i64(2, p);
        let s = two.sqrt();
        assert!((s.to_f64() - std::f64::consts::SQRT_2).abs() < 1e-15);
        let e = Real::from_i64(1, p).exp();
        assert!((e.ln().to_f64() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fixed_formatting_half_even() {
        let p = digits_to_bits(40);
        assert_eq!(Real::from_f64(1.25, p).format_fixed(1), "1.2");
        assert_eq!(Real::from_f64(1.35, p).format_fixed(1), "1.4"); // 1.35 in binary is slightly above
        assert_eq!(Real::from_f64(-0.5, p).format_fixed(0), "0");
        assert_eq!(Real::from_f64(2.5, p).format_fixed(0), "2");
        assert_eq!(Real::from_f64(0.2538, p).format_fixed(4), "0.2538");
    }

    #[test]
    fn huge_exponents_survive() {
        let p = digits_to_bits(40);
        let big = Real::from_i64(2, p).powi(100_000);
        let l = big.ln();
        let expected = 100_000.0 * std::f64::consts::LN_2;
        assert!((l.to_f64() - expected).abs() / expected < 1e-12);
    }
}
