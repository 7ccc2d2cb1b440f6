//! Integer factorization (trial division, then Brent's variant of Pollard
//! rho) and divisor enumeration.

use std::fmt;

use crate::arith::{gcd, Word};
use crate::error::{invalid, Error, Result};

use super::primality::is_prime;

/// Primes below this bound are removed by trial division before rho runs.
pub const TRIAL_DIVISION_BOUND: u64 = 1 << 12;

/// Default cap on the number of divisors [`divisors`] will materialise.
pub const DEFAULT_DIVISOR_CAP: usize = 1 << 24;

/// Prime factorization as ascending `(prime, exponent)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Factorization<W> {
    factors: Vec<(W, u32)>,
}

impl<W: Word> Factorization<W> {
    /// Build from pairs; primes must be strictly ascending and exponents
    /// positive. Primality of the listed primes is not re-checked here.
    pub fn from_pairs(factors: Vec<(W, u32)>) -> Result<Self> {
        if factors.iter().any(|&(_, e)| e == 0) {
            return invalid("factor exponents must be positive");
        }
        if factors.windows(2).any(|w| w[0].0 >= w[1].0) {
            return invalid("factor primes must be strictly ascending");
        }
        Ok(Self { factors })
    }

    /// Factorization of a square-free number from its ascending primes.
    pub fn from_primes(primes: &[W]) -> Result<Self> {
        Self::from_pairs(primes.iter().map(|&p| (p, 1)).collect())
    }

    pub fn pairs(&self) -> &[(W, u32)] {
        &self.factors
    }

    pub fn primes(&self) -> impl Iterator<Item = W> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// Number of distinct primes.
    pub fn distinct_count(&self) -> usize {
        self.factors.len()
    }

    pub fn is_square_free(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// Product of `prime^exponent`, or `None` on overflow.
    pub fn value(&self) -> Option<W> {
        self.factors.iter().try_fold(W::one(), |acc, &(p, e)| {
            num_traits::checked_pow(p, e as usize).and_then(|pe| acc.checked_mul(&pe))
        })
    }

    /// Number of positive divisors, saturating.
    pub fn divisor_count(&self) -> usize {
        self.factors
            .iter()
            .fold(1usize, |acc, &(_, e)| acc.saturating_mul(e as usize + 1))
    }
}

impl<W: Word> fmt::Display for Factorization<W> {
    /// `2·281`, `3^2·5`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, &(p, e)) in self.factors.iter().enumerate() {
            if i > 0 {
                f.write_str("·")?;
            }
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Complete prime factorization of `n >= 2`.
pub fn factorize<W: Word>(n: W) -> Result<Factorization<W>> {
    if n < W::two() {
        return invalid(format!("cannot factorize {n}"));
    }
    let mut primes: Vec<W> = Vec::new();
    let mut m = n;

    let tz = m.trailing_zeros();
    if tz > 0 {
        primes.extend(std::iter::repeat_n(W::two(), tz as usize));
        m = m >> tz as usize;
    }
    let mut d = 3u64;
    while d < TRIAL_DIVISION_BOUND {
        let dw = W::from_u64(d);
        if dw * dw > m {
            break;
        }
        while (m % dw).is_zero() {
            primes.push(dw);
            m = m / dw;
        }
        d += 2;
    }
    if m > W::one() {
        let bound = W::from_u64(TRIAL_DIVISION_BOUND);
        if m < bound * bound {
            // no factor below the bound, so m is prime
            primes.push(m);
        } else {
            split_into(m, &mut primes);
        }
    }
    primes.sort_unstable();

    let mut pairs: Vec<(W, u32)> = Vec::new();
    for p in primes {
        match pairs.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => pairs.push((p, 1)),
        }
    }
    Ok(Factorization { factors: pairs })
}

/// Split `m` (free of small factors) into primes.
fn split_into<W: Word>(m: W, out: &mut Vec<W>) {
    if m == W::one() {
        return;
    }
    if is_prime(m) {
        out.push(m);
        return;
    }
    // Offsets c = 1, 2, 3, ... give a reproducible sequence of attempts.
    let mut c = 1u64;
    let d = loop {
        if let Some(d) = brent_rho(m, W::from_u64(c)) {
            break d;
        }
        c += 1;
    };
    split_into(d, out);
    split_into(m / d, out);
}

/// One run of Brent's cycle-finding rho on `x -> x^2 + c (mod n)`.
///
/// Returns a proper divisor of `n`, or `None` if this offset failed.
fn brent_rho<W: Word>(n: W, c: W) -> Option<W> {
    const BATCH: u32 = 128;
    let f = |x: W| {
        let sq = W::mul_mod_unchecked(x, x, n);
        let t = n - sq;
        if c >= t {
            c - t
        } else {
            sq + c
        }
    };
    let mut y = W::two() % n;
    let mut x = y;
    let mut ys = y;
    let mut q = W::one();
    let mut g = W::one();
    let mut r: u64 = 1;
    while g == W::one() {
        x = y;
        for _ in 0..r {
            y = f(y);
        }
        let mut k = 0u64;
        while k < r && g == W::one() {
            ys = y;
            let steps = BATCH.min((r - k) as u32);
            for _ in 0..steps {
                y = f(y);
                let diff = if x > y { x - y } else { y - x };
                q = W::mul_mod_unchecked(q, diff, n);
            }
            g = gcd(q, n);
            k += steps as u64;
        }
        r *= 2;
        if r > 1 << 40 {
            return None;
        }
    }
    if g == n {
        // batch overshot: step back one at a time from the saved point
        loop {
            ys = f(ys);
            let diff = if x > ys { x - ys } else { ys - x };
            g = gcd(diff, n);
            if g != W::one() {
                break;
            }
        }
    }
    (g != n).then_some(g)
}

/// All positive divisors, ascending, capped at [`DEFAULT_DIVISOR_CAP`].
pub fn divisors<W: Word>(f: &Factorization<W>) -> Result<Vec<W>> {
    divisors_capped(f, DEFAULT_DIVISOR_CAP)
}

pub fn divisors_capped<W: Word>(f: &Factorization<W>, cap: usize) -> Result<Vec<W>> {
    let count = f.divisor_count();
    if count > cap {
        let n = f
            .value()
            .map(|v| v.to_string())
            .unwrap_or_else(|| f.to_string());
        return Err(Error::ResourceLimit(format!(
            "{n} has {count} divisors, cap is {cap}"
        )));
    }
    let mut divs = Vec::with_capacity(count);
    divs.push(W::one());
    for &(p, e) in f.pairs() {
        let len = divs.len();
        let mut pk = W::one();
        for _ in 0..e {
            pk = pk * p;
            for i in 0..len {
                divs.push(divs[i] * pk);
            }
        }
    }
    divs.sort_unstable();
    Ok(divs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(n: u64) -> Vec<(u64, u32)> {
        factorize(n).unwrap().pairs().to_vec()
    }

    #[test]
    fn paper_factorizations() {
        assert_eq!(
            pairs(9463098235353841),
            vec![(13, 1), (31, 1), (541, 1), (631, 1), (68786257, 1)]
        );
        assert_eq!(
            pairs(9585921133193329),
            vec![(174763, 1), (199729, 1), (274627, 1)]
        );
        assert_eq!(pairs(32), vec![(2, 5)]);
    }

    #[test]
    fn rejects_small() {
        assert!(factorize(1u64).is_err());
        assert!(factorize(0u64).is_err());
    }

    #[test]
    fn hard_shapes() {
        // square of a prime above the trial bound
        let p = 1_000_003u64;
        assert_eq!(pairs(p * p), vec![(p, 2)]);
        // semiprime with two ~31-bit factors
        let (a, b) = (2_147_483_647u64, 2_147_483_629u64);
        assert_eq!(pairs(a * b), vec![(b, 1), (a, 1)]);
        assert_eq!(
            pairs(u64::MAX),
            vec![
                (3, 1),
                (5, 1),
                (17, 1),
                (257, 1),
                (641, 1),
                (65537, 1),
                (6700417, 1)
            ]
        );
    }

    #[test]
    fn wide_factorization() {
        let n: u128 = 7156857700403137441;
        let f = factorize(n).unwrap();
        let ps: Vec<u128> = f.primes().collect();
        assert_eq!(ps, vec![11, 13, 17, 19, 29, 37, 41, 43, 61, 97, 109, 127]);
        // product of two primes straddling 2^64
        let n = 18446744073709551629u128 * 1_000_000_007;
        let f = factorize(n).unwrap();
        assert_eq!(f.pairs(), &[(1_000_000_007, 1), (18446744073709551629, 1)]);
    }

    #[test]
    fn divisor_lists() {
        assert_eq!(
            divisors(&factorize(32u64).unwrap()).unwrap(),
            vec![1, 2, 4, 8, 16, 32]
        );
        assert_eq!(divisors(&factorize(101u64).unwrap()).unwrap(), vec![1, 101]);
        assert_eq!(
            divisors(&factorize(64u64).unwrap()).unwrap(),
            vec![1, 2, 4, 8, 16, 32, 64]
        );
        let f = factorize(720_720u64).unwrap();
        assert!(
            matches!(divisors_capped(&f, 10), Err(Error::ResourceLimit(m)) if m.contains("720720"))
        );
    }

    #[test]
    fn display() {
        assert_eq!(factorize(562u64).unwrap().to_string(), "2·281");
        assert_eq!(factorize(45u64).unwrap().to_string(), "3^2·5");
    }
}
