//! Primality testing.
//!
//! Policy: below 2^64 the answer comes from Miller-Rabin with base sets
//! proven deterministic for the tested range, so it is exact. At or above
//! 2^64 the Baillie-PSW test is used (strong base-2 Miller-Rabin followed by
//! a strong Lucas test with Selfridge parameters). BPSW has no known
//! counterexample but is not a proof; callers that care report
//! [`Certainty::Bpsw`] alongside the result.

use crate::arith::{isqrt, powmod_unchecked, Word};

const SMALL_PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// How a primality verdict was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certainty {
    /// Exact: deterministic Miller-Rabin below 2^64.
    Deterministic,
    /// Baillie-PSW probable prime.
    Bpsw,
}

/// Which method [`is_prime`] uses for `n`.
pub fn certainty<W: Word>(n: W) -> Certainty {
    if n.as_narrow().is_some() {
        Certainty::Deterministic
    } else {
        Certainty::Bpsw
    }
}

/// True iff `n` is prime (exact below 2^64, BPSW above).
pub fn is_prime<W: Word>(n: W) -> bool {
    match n.as_narrow() {
        Some(v) => is_prime_u64(v),
        None => is_prime_bpsw(n),
    }
}

/// Deterministic primality for any `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_PRIMES {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    if n < 59 * 59 {
        return true;
    }
    // Jaeschke's bounds for the first primes as bases, then the seven-base
    // set of Sinclair which covers all of u64.
    let bases: &[u64] = if n < 2_047 {
        &[2]
    } else if n < 1_373_653 {
        &[2, 3]
    } else if n < 25_326_001 {
        &[2, 3, 5]
    } else if n < 3_215_031_751 {
        &[2, 3, 5, 7]
    } else if n < 2_152_302_898_747 {
        &[2, 3, 5, 7, 11]
    } else if n < 3_474_749_660_383 {
        &[2, 3, 5, 7, 11, 13]
    } else if n < 341_550_071_728_321 {
        &[2, 3, 5, 7, 11, 13, 17]
    } else {
        &[2, 325, 9375, 28178, 450775, 9780504, 1795265022]
    };
    bases.iter().all(|&b| strong_probable_prime(n, b))
}

/// Strong Fermat (Miller-Rabin) test of odd `n > 2` to base `b`.
pub fn strong_probable_prime<W: Word>(n: W, b: W) -> bool {
    let b = b % n;
    if b.is_zero() {
        return true;
    }
    let one = W::one();
    let minus_one = n - one;
    let s = minus_one.trailing_zeros();
    let d = minus_one >> s as usize;
    let mut x = powmod_unchecked(b, d, n);
    if x == one || x == minus_one {
        return true;
    }
    for _ in 1..s {
        x = W::mul_mod_unchecked(x, x, n);
        if x == minus_one {
            return true;
        }
        if x == one {
            return false;
        }
    }
    false
}

/// Baillie-PSW probable-prime test, valid for `n < 2^126`.
pub fn is_prime_bpsw<W: Word>(n: W) -> bool {
    if n < W::two() {
        return false;
    }
    for &p in &SMALL_PRIMES {
        let p = W::from_u64(p);
        if n == p {
            return true;
        }
        if (n % p).is_zero() {
            return false;
        }
    }
    strong_probable_prime(n, W::two()) && strong_lucas_probable_prime(n)
}

/// Jacobi symbol `(a / n)` for odd `n`.
fn jacobi<W: Word>(a: W, n: W) -> i32 {
    let eight = W::from_u64(8);
    let four = W::from_u64(4);
    let (three, five) = (W::from_u64(3), W::from_u64(5));
    let mut a = a % n;
    let mut n = n;
    let mut t = 1;
    while !a.is_zero() {
        while (a & W::one()).is_zero() {
            a = a >> 1;
            let r = n % eight;
            if r == three || r == five {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % four == three && n % four == three {
            t = -t;
        }
        a = a % n;
    }
    if n == W::one() {
        t
    } else {
        0
    }
}

fn signed_mod<W: Word>(v: i64, n: W) -> W {
    let m = W::from_u64(v.unsigned_abs()) % n;
    if v >= 0 || m.is_zero() {
        m
    } else {
        n - m
    }
}

#[inline]
fn add_mod<W: Word>(a: W, b: W, n: W) -> W {
    if a >= n - b {
        a - (n - b)
    } else {
        a + b
    }
}

#[inline]
fn sub_mod<W: Word>(a: W, b: W, n: W) -> W {
    if a >= b {
        a - b
    } else {
        a + (n - b)
    }
}

/// `x / 2 mod n` for odd `n`, without forming `x + n`.
#[inline]
fn half_mod<W: Word>(x: W, n: W) -> W {
    if (x & W::one()).is_zero() {
        x >> 1
    } else {
        (x >> 1) + (n >> 1) + W::one()
    }
}

/// Strong Lucas probable-prime test with Selfridge's method A (P = 1).
fn strong_lucas_probable_prime<W: Word>(n: W) -> bool {
    let r = isqrt(n);
    if r * r == n {
        return false;
    }
    let mut d: i64 = 5;
    loop {
        let j = jacobi(signed_mod(d, n), n);
        if j == -1 {
            break;
        }
        if j == 0 && W::from_u64(d.unsigned_abs()) != n {
            return false;
        }
        d = if d > 0 { -(d + 2) } else { -d + 2 };
    }
    let dm = signed_mod(d, n);
    let q = signed_mod((1 - d) / 4, n);

    // n + 1 = k * 2^s, k odd; n < 2^126 so this cannot overflow.
    let np1 = n + W::one();
    let s = np1.trailing_zeros();
    let k = np1 >> s as usize;

    let mul = |a: W, b: W| W::mul_mod_unchecked(a, b, n);
    let mut u = W::one();
    let mut v = W::one();
    let mut qk = q;
    let top = W::zero().count_zeros() - k.leading_zeros();
    for bit in (0..top - 1).rev() {
        u = mul(u, v);
        v = sub_mod(mul(v, v), add_mod(qk, qk, n), n);
        qk = mul(qk, qk);
        if ((k >> bit as usize) & W::one()) == W::one() {
            let u2 = half_mod(add_mod(u, v, n), n);
            let v2 = half_mod(add_mod(mul(dm, u), v, n), n);
            u = u2;
            v = v2;
            qk = mul(qk, q);
        }
    }
    if u.is_zero() || v.is_zero() {
        return true;
    }
    for _ in 1..s {
        v = sub_mod(mul(v, v), add_mod(qk, qk, n), n);
        if v.is_zero() {
            return true;
        }
        qk = mul(qk, qk);
    }
    false
}
