//! Integer helpers: p-adic valuations, primality, factorization, Jacobi
//! symbols, and a small prime sieve.
//!
//! Factorization is trial division up to 10^4 followed by Brent's variant of
//! Pollard rho; primality is Miller–Rabin with a deterministic witness set
//! for small inputs and seeded pseudorandom witnesses above that.  All of it
//! is deterministic for a given input.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// p-adic valuation of n (n must be nonzero).
pub fn valuation(n: &BigInt, p: &BigInt) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let mut v = 0u32;
    let mut m = n.abs();
    loop {
        let (q, r) = m.div_rem(p);
        if r.is_zero() {
            v += 1;
            m = q;
        } else {
            return v;
        }
    }
}

/// n / p^v where v = valuation(n, p).
pub fn strip_factor(n: &BigInt, p: &BigInt) -> (u32, BigInt) {
    let mut v = 0u32;
    let mut m = n.clone();
    loop {
        let (q, r) = m.div_rem(p);
        if r.is_zero() && !m.is_zero() {
            v += 1;
            m = q;
        } else {
            return (v, m);
        }
    }
}

pub fn primes_below(limit: usize) -> Vec<u64> {
    if limit < 3 {
        return vec![];
    }
    let mut sieve = vec![true; limit];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i < limit {
        if sieve[i] {
            let mut j = i * i;
            while j < limit {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    sieve
        .iter()
        .enumerate()
        .filter_map(|(n, &b)| if b { Some(n as u64) } else { None })
        .collect()
}

/// Smallest prime factor table for 1..limit (spf[0] = spf[1] = 0).
pub fn smallest_prime_factor(limit: usize) -> Vec<u32> {
    let mut spf = vec![0u32; limit];
    for i in 2..limit {
        if spf[i] == 0 {
            let mut j = i;
            while j < limit {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mulmod(acc, b, m);
        }
        b = mulmod(b, b, m);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin for u64 (witness set valid for all 64-bit n).
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &[2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub fn is_prime(n: &BigInt) -> bool {
    if let Some(v) = n.to_u64() {
        return is_prime_u64(v);
    }
    if n.is_negative() || n.is_zero() || n.is_one() {
        return false;
    }
    if n.is_even() {
        return false;
    }
    let one = BigInt::one();
    let two = BigInt::from(2);
    let nm1 = n - &one;
    let mut d = nm1.clone();
    let mut s = 0u32;
    while d.is_even() {
        d /= &two;
        s += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x6265_7274_7261_6e64 ^ (n.bits() as u64));
    let small: Vec<BigInt> = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
        .iter()
        .map(|&x| BigInt::from(x))
        .collect();
    let mut witnesses = small;
    for _ in 0..28 {
        let w: u64 = rng.gen_range(40..u64::MAX);
        witnesses.push(BigInt::from(w));
    }
    'witness: for a in &witnesses {
        let a = a % n;
        if a.is_zero() {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x.is_one() || x == nm1 {
            continue;
        }
        for _ in 0..s.saturating_sub(1) {
            x = x.modpow(&two, n);
            if x == nm1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// One Brent-rho attempt with polynomial x^2 + c; returns a divisor of n
/// (possibly n itself on a bad cycle).
fn brent_cycle(n: &BigInt, c: &BigInt, x0: &BigInt) -> BigInt {
    let one = BigInt::one();
    let m = 128usize;
    let mut y = x0.clone();
    let mut g = one.clone();
    let mut q = one.clone();
    let mut x = y.clone();
    let mut ys = y.clone();
    let mut r = 1usize;
    while g.is_one() {
        x = y.clone();
        for _ in 0..r {
            y = (&y * &y + c) % n;
        }
        let mut k = 0usize;
        while k < r && g.is_one() {
            ys = y.clone();
            for _ in 0..m.min(r - k) {
                y = (&y * &y + c) % n;
                q = (&q * (&x - &y).abs()) % n;
            }
            g = q.gcd(n);
            k += m;
        }
        r *= 2;
    }
    if g == *n {
        loop {
            ys = (&ys * &ys + c) % n;
            g = (&x - &ys).abs().gcd(n);
            if !g.is_one() {
                break;
            }
        }
    }
    g
}

fn pollard_brent(n: &BigInt, seed: u64) -> Option<BigInt> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..48 {
        let c = BigInt::from(rng.gen_range(1u64..1 << 30));
        let x0 = BigInt::from(rng.gen_range(2u64..1 << 30)) % n;
        let g = brent_cycle(n, &c, &x0);
        if !g.is_one() && g != *n {
            return Some(g);
        }
    }
    None
}

/// Prime factorization of |n| as (prime, exponent) sorted by prime; n != 0.
pub fn factor(n: &BigInt) -> Vec<(BigInt, u32)> {
    assert!(!n.is_zero());
    let mut m = n.abs();
    let mut out: Vec<(BigInt, u32)> = Vec::new();
    for p in primes_below(10_000) {
        if m.is_one() {
            break;
        }
        let pb = BigInt::from(p);
        let (v, rest) = strip_factor(&m, &pb);
        if v > 0 {
            out.push((pb, v));
            m = rest;
        }
    }
    let mut stack = vec![m];
    let mut hard: Vec<BigInt> = Vec::new();
    while let Some(top) = stack.pop() {
        if top.is_one() {
            continue;
        }
        if is_prime(&top) {
            hard.push(top);
            continue;
        }
        let f = pollard_brent(&top, 0xda0c_5eed ^ top.bits() as u64)
            .expect("factorization failed (composite resists rho)");
        let q = &top / &f;
        stack.push(f);
        stack.push(q);
    }
    hard.sort();
    let mut i = 0;
    while i < hard.len() {
        let p = hard[i].clone();
        let mut v = 0u32;
        while i < hard.len() && hard[i] == p {
            v += 1;
            i += 1;
        }
        out.push((p, v));
    }
    out.sort();
    out
}

/// Divisors d of |n| with d^2 | n, from a precomputed factorization.
pub fn square_divisors(fac: &[(BigInt, u32)]) -> Vec<BigInt> {
    let mut out = vec![BigInt::one()];
    for (p, e) in fac {
        let half = e / 2;
        if half == 0 {
            continue;
        }
        let mut next = Vec::with_capacity(out.len() * (half as usize + 1));
        for d in &out {
            let mut pk = BigInt::one();
            for _ in 0..=half {
                next.push(d * &pk);
                pk *= p;
            }
        }
        out = next;
    }
    out.sort();
    out.dedup();
    out
}

/// Jacobi symbol (a/n) for odd n > 0.
pub fn jacobi(mut a: i64, mut n: u64) -> i32 {
    debug_assert!(n % 2 == 1 && n > 0);
    a = a.rem_euclid(n as i64);
    let mut aa = a as u64;
    let mut t = 1i32;
    while aa != 0 {
        while aa % 2 == 0 {
            aa /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut aa, &mut n);
        if aa % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        aa %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// Modular inverse of a mod m (m > 1, gcd(a, m) = 1).
pub fn invmod(a: &BigInt, m: &BigInt) -> BigInt {
    let e = a.extended_gcd(m);
    assert!(e.gcd.is_one(), "invmod of non-unit");
    e.x.mod_floor(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::str::FromStr;

    #[test]
    fn valuations() {
        let n = BigInt::from(-1600);
        assert_eq!(valuation(&n, &BigInt::from(2)), 6);
        assert_eq!(valuation(&n, &BigInt::from(5)), 2);
        assert_eq!(valuation(&n, &BigInt::from(7)), 0);
    }

    #[test]
    fn primality() {
        assert!(is_prime_u64(2));
        assert!(is_prime_u64(571));
        assert!(is_prime_u64(117_223));
        assert!(!is_prime_u64(234_446));
        assert!(is_prime(&BigInt::from_str("2305843009213693951").unwrap())); // 2^61-1
        assert!(!is_prime(&BigInt::from_str("2305843009213693953").unwrap()));
    }

    #[test]
    fn factoring() {
        let n = BigInt::from(234_446);
        let f = factor(&n);
        assert_eq!(f, vec![(BigInt::from(2), 1), (BigInt::from(117_223), 1)]);
        let big = BigInt::from_str("614889782588491410").unwrap(); // primorial(15)*2
        let f = factor(&big);
        let back: BigInt = f.iter().map(|(p, e)| p.pow(*e)).product();
        assert_eq!(back, big);
    }

    #[test]
    fn square_divisor_enumeration() {
        let f = factor(&BigInt::from(16 * 27)); // 2^4 * 3^3
        let sq = square_divisors(&f);
        assert_eq!(
            sq,
            vec![
                BigInt::from(1),
                BigInt::from(2),
                BigInt::from(3),
                BigInt::from(4),
                BigInt::from(6),
                BigInt::from(12)
            ]
        );
    }

    #[test]
    fn jacobi_symbol() {
        assert_eq!(jacobi(2, 7), 1);
        assert_eq!(jacobi(3, 7), -1);
        assert_eq!(jacobi(0, 7), 0);
        assert_eq!(jacobi(-1, 7), -1); // 7 = 3 mod 4
        assert_eq!(jacobi(-1, 13), 1);
    }
}
