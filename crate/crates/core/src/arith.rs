//! Exact modular and root arithmetic over unsigned machine words.
//!
//! Everything here is generic over [`Word`], implemented for `u64` and
//! `u128`. Products are formed either in a double-width register (`u64`
//! operands multiply in `u128`) or by interleaved shift-add when no wider
//! native type exists. No floating point is used anywhere in this module.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, PrimInt, Unsigned};

use crate::error::{invalid, Error, Result};

/// Unsigned machine integer usable as the scalar of every computation.
pub trait Word:
    PrimInt
    + Unsigned
    + Integer
    + CheckedAdd
    + CheckedMul
    + CheckedSub
    + Hash
    + Debug
    + Display
    + FromStr
    + Default
    + Send
    + Sync
    + 'static
{
    /// Largest modulus accepted by [`mulmod`].
    const MAX_MODULUS: Self;

    fn from_u64(v: u64) -> Self;
    fn as_wide(self) -> u128;
    fn try_from_u128(v: u128) -> Option<Self>;

    /// `a * b mod m` for `a, b < m`; callers guarantee `2 <= m <= MAX_MODULUS`.
    fn mul_mod_unchecked(a: Self, b: Self, m: Self) -> Self;

    fn two() -> Self {
        Self::from_u64(2)
    }

    /// Narrow to `u64` when the value fits.
    fn as_narrow(self) -> Option<u64> {
        u64::try_from(self.as_wide()).ok()
    }
}

impl Word for u64 {
    const MAX_MODULUS: u64 = u64::MAX;

    #[inline]
    fn from_u64(v: u64) -> Self {
        v
    }

    #[inline]
    fn as_wide(self) -> u128 {
        self as u128
    }

    #[inline]
    fn try_from_u128(v: u128) -> Option<Self> {
        u64::try_from(v).ok()
    }

    #[inline]
    fn mul_mod_unchecked(a: u64, b: u64, m: u64) -> u64 {
        ((a as u128 * b as u128) % m as u128) as u64
    }
}

impl Word for u128 {
    const MAX_MODULUS: u128 = 1 << 126;

    #[inline]
    fn from_u64(v: u64) -> Self {
        v as u128
    }

    #[inline]
    fn as_wide(self) -> u128 {
        self
    }

    #[inline]
    fn try_from_u128(v: u128) -> Option<Self> {
        Some(v)
    }

    fn mul_mod_unchecked(a: u128, b: u128, m: u128) -> u128 {
        if (a | b) >> 64 == 0 {
            return (a * b) % m;
        }
        // Interleaved shift-add; m < 2^126 keeps every doubling below 2^127.
        let (mut x, mut y) = if a < b { (b, a) } else { (a, b) };
        let mut acc = 0u128;
        while y != 0 {
            if y & 1 == 1 {
                acc += x;
                if acc >= m {
                    acc -= m;
                }
            }
            y >>= 1;
            x <<= 1;
            if x >= m {
                x -= m;
            }
        }
        acc
    }
}

fn check_modulus<W: Word>(m: W) -> Result<()> {
    if m < W::two() {
        return invalid(format!("modulus must be at least 2, got {m}"));
    }
    if m > W::MAX_MODULUS {
        return invalid(format!("modulus {m} exceeds the supported range"));
    }
    Ok(())
}

/// `(a * b) mod m`, exact.
pub fn mulmod<W: Word>(a: W, b: W, m: W) -> Result<W> {
    check_modulus(m)?;
    Ok(W::mul_mod_unchecked(a % m, b % m, m))
}

/// `b^e mod m` by left-to-right square-and-multiply.
pub fn powmod<W: Word>(b: W, e: W, m: W) -> Result<W> {
    check_modulus(m)?;
    Ok(powmod_unchecked(b % m, e, m))
}

#[inline]
pub(crate) fn powmod_unchecked<W: Word>(base: W, mut e: W, m: W) -> W {
    let mut result = W::one();
    let mut b = base;
    while e > W::zero() {
        if e & W::one() == W::one() {
            result = W::mul_mod_unchecked(result, b, m);
        }
        e = e >> 1;
        if e > W::zero() {
            b = W::mul_mod_unchecked(b, b, m);
        }
    }
    result
}

pub fn gcd<W: Word>(a: W, b: W) -> W {
    a.gcd(&b)
}

/// Least common multiple; overflow is reported, never wrapped.
pub fn lcm<W: Word>(a: W, b: W) -> Result<W> {
    if a.is_zero() || b.is_zero() {
        return Ok(W::zero());
    }
    let g = a.gcd(&b);
    (a / g)
        .checked_mul(&b)
        .ok_or_else(|| Error::Overflow(format!("lcm({a}, {b})")))
}

/// Inverse of `a` modulo `m`, or `None` when `gcd(a, m) != 1`.
///
/// Extended Euclid with the Bezout coefficient kept reduced modulo `m`, so
/// no signed arithmetic is needed.
pub fn invmod<W: Word>(a: W, m: W) -> Result<Option<W>> {
    check_modulus(m)?;
    Ok(invmod_unchecked(a % m, m))
}

pub(crate) fn invmod_unchecked<W: Word>(a: W, m: W) -> Option<W> {
    // Invariant: r_i ≡ s_i * a (mod m).
    let (mut r0, mut r1) = (m, a);
    let (mut s0, mut s1) = (W::zero(), W::one());
    while !r1.is_zero() {
        let (q, r) = r0.div_rem(&r1);
        r0 = r1;
        r1 = r;
        let t = W::mul_mod_unchecked(q % m, s1, m);
        let next = if s0 >= t { s0 - t } else { s0 + (m - t) };
        s0 = s1;
        s1 = next;
    }
    (r0 == W::one()).then_some(s0)
}

/// Largest `r` with `r^k <= n`.
pub fn iroot<W: Word>(n: W, k: u32) -> Result<W> {
    if k == 0 {
        return invalid("root index must be positive");
    }
    Ok(iroot_unchecked(n, k))
}

pub(crate) fn iroot_unchecked<W: Word>(n: W, k: u32) -> W {
    if k == 1 || n < W::two() {
        return n;
    }
    let bits = W::zero().count_zeros() - n.leading_zeros();
    if k >= bits {
        return W::one();
    }
    let kw = W::from_u64(k as u64);
    // 2^ceil(bits/k) is an upper bound on the root; Newton descends from above.
    let mut x = W::one() << bits.div_ceil(k) as usize;
    loop {
        let q = match num_traits::checked_pow(x, (k - 1) as usize) {
            Some(p) => n / p,
            None => W::zero(),
        };
        let y = ((kw - W::one()) * x + q) / kw;
        if y >= x {
            return x;
        }
        x = y;
    }
}

/// `floor(sqrt(n))`.
#[inline]
pub fn isqrt<W: Word>(n: W) -> W {
    iroot_unchecked(n, 2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mulmod_basics() {
        assert_eq!(mulmod(0u64, 561, 1_000_000_000).unwrap(), 0);
        assert_eq!(mulmod(561u64, 1, 1_000_000_000).unwrap(), 561);
        assert!(mulmod(3u64, 4, 0).is_err());
        assert!(mulmod(3u64, 4, 1).is_err());
        assert!(mulmod(3u128, 4, (1u128 << 126) + 1).is_err());
    }

    #[test]
    fn powmod_examples() {
        assert_eq!(powmod(2u64, 560, 561).unwrap(), 1);
        assert_eq!(powmod(3u64, 1104, 1105).unwrap(), 1);
        assert_eq!(powmod(12345u64, 0, 97).unwrap(), 1);
        assert_eq!(powmod(2u128, 560, 561).unwrap(), 1);
    }

    #[test]
    fn gcd_lcm_examples() {
        assert_eq!(gcd(2u64, 10), 2);
        assert_eq!(lcm(2u64, 10).unwrap(), 10);
        let l = [2u64, 10, 16].into_iter().try_fold(1u64, lcm).unwrap();
        assert_eq!(l, 80);
        assert_eq!(560 % l, 0);
        assert_eq!(gcd(0u64, 7), 7);
        assert!(matches!(
            lcm(u64::MAX, u64::MAX - 1),
            Err(Error::Overflow(_))
        ));
    }

    #[test]
    fn invmod_examples() {
        assert_eq!(invmod(3u64, 10).unwrap(), Some(7));
        assert_eq!(invmod(33u64, 10).unwrap(), Some(7));
        assert_eq!(invmod(4u64, 10).unwrap(), None);
        assert!(invmod(3u64, 1).is_err());
        // exhaustive residue scan agrees for a small modulus
        for m in 2u64..60 {
            for a in 0..m {
                let brute = (1..m).find(|x| a * x % m == 1);
                assert_eq!(invmod(a, m).unwrap(), brute, "a={a} m={m}");
            }
        }
    }

    #[test]
    fn iroot_examples() {
        assert_eq!(iroot(10u64.pow(16), 2).unwrap(), 100_000_000);
        assert_eq!(iroot(9463098235353841u64, 2).unwrap(), 97278457);
        assert_eq!(iroot(7u64, 3).unwrap(), 1);
        assert_eq!(iroot(1000u64, 3).unwrap(), 10);
        assert_eq!(iroot(999u64, 3).unwrap(), 9);
        assert_eq!(iroot(u64::MAX, 2).unwrap(), u32::MAX as u64);
        assert_eq!(iroot(u128::MAX, 2).unwrap(), u64::MAX as u128);
        assert_eq!(iroot(u128::MAX, 127).unwrap(), 2);
        assert_eq!(iroot(0u64, 5).unwrap(), 0);
        assert!(iroot(5u64, 0).is_err());
    }
}
