//! Korselt's criterion, the Fermat-definition check, and a brute-force
//! enumeration oracle.
//!
//! N is a Carmichael number iff it is composite, square-free, has at least
//! three prime factors, and `p - 1` divides `N - 1` for every prime `p | N`.
//! Such N is odd: it has an odd prime factor `p`, so `N - 1` is a multiple
//! of the even number `p - 1`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::arith::{gcd, powmod_unchecked, Word};
use crate::catalog::{CarmichaelEntry, Catalog, Provenance};
use crate::enumerator::default_factor_range;
use crate::error::{invalid, Result};
use crate::primes::{factorize, is_prime, Factorization};

/// Largest limit accepted by [`oracle_enumerate`].
pub const ORACLE_MAX_LIMIT: u64 = 100_000_000;

/// Below this size `BaseBudget::All` tests every base.
pub const EXHAUSTIVE_FERMAT_MAX: u64 = 100_000;

/// Bases tried when `BaseBudget::All` is requested above
/// [`EXHAUSTIVE_FERMAT_MAX`].
pub const DEFAULT_FERMAT_BASES: u32 = 64;

/// The first Korselt clause that fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KorseltViolation<W> {
    /// N < 2.
    TooSmall,
    Prime,
    /// Repeated prime factor, or fewer than three distinct primes.
    NotSquareFreeOrFewFactors(Factorization<W>),
    /// `p - 1` does not divide `N - 1`.
    Divisibility {
        prime: W,
        factorization: Factorization<W>,
    },
}

impl<W: Word> fmt::Display for KorseltViolation<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::TooSmall => f.write_str("less than 2"),
            Self::Prime => f.write_str("prime"),
            Self::NotSquareFreeOrFewFactors(fact) => {
                write!(f, "not square-free or fewer than 3 factors: {fact}")
            }
            Self::Divisibility {
                prime,
                factorization,
            } => {
                write!(
                    f,
                    "p-1 does not divide n-1 for p = {prime}: {factorization}"
                )
            }
        }
    }
}

/// First failing clause of Korselt's criterion, assuming `f` factors `n`.
pub fn korselt_violation<W: Word>(n: W, f: &Factorization<W>) -> Option<KorseltViolation<W>> {
    if n < W::two() {
        return Some(KorseltViolation::TooSmall);
    }
    if f.distinct_count() == 1 && f.is_square_free() {
        return Some(KorseltViolation::Prime);
    }
    if !f.is_square_free() || f.distinct_count() < 3 {
        return Some(KorseltViolation::NotSquareFreeOrFewFactors(f.clone()));
    }
    let n1 = n - W::one();
    for p in f.primes() {
        if !(n1 % (p - W::one())).is_zero() {
            return Some(KorseltViolation::Divisibility {
                prime: p,
                factorization: f.clone(),
            });
        }
    }
    debug_assert!(n.is_odd(), "Korselt numbers are odd");
    None
}

/// Korselt's criterion for `n` given its factorization.
pub fn korselt_check<W: Word>(n: W, f: &Factorization<W>) -> Result<bool> {
    if f.value() != Some(n) {
        return invalid(format!("factorization {f} does not multiply to {n}"));
    }
    if let Some(p) = f.primes().find(|&p| !is_prime(p)) {
        return invalid(format!("factor {p} of {n} is not prime"));
    }
    let ok = korselt_violation(n, f).is_none();
    assert!(!ok || n.is_odd(), "Korselt criterion accepted even {n}");
    Ok(ok)
}

/// Why `n` is or is not Carmichael; `None` means it is.
pub fn carmichael_violation<W: Word>(n: W) -> Option<KorseltViolation<W>> {
    if n < W::two() {
        return Some(KorseltViolation::TooSmall);
    }
    let f = factorize(n).expect("n >= 2");
    korselt_violation(n, &f)
}

pub fn is_carmichael<W: Word>(n: W) -> bool {
    carmichael_violation(n).is_none()
}

/// How many bases [`fermat_scan`] tries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BaseBudget {
    /// Every base in `[2, n - 2]` for `n <= EXHAUSTIVE_FERMAT_MAX`;
    /// [`DEFAULT_FERMAT_BASES`] random bases above that.
    All,
    /// This many bases coprime to `n`, drawn from a generator seeded by `n`.
    Count(u32),
}

/// Fermat-definition check: false iff some tested base `b` coprime to `n`
/// has `b^(n-1) != 1 (mod n)`.
pub fn fermat_scan<W: Word>(n: W, budget: BaseBudget) -> bool {
    let three = W::from_u64(3);
    if n < three {
        return true;
    }
    let n1 = n - W::one();
    let passes = |b: W| gcd(b, n) != W::one() || powmod_unchecked(b, n1, n) == W::one();
    let count = match budget {
        BaseBudget::All if n <= W::from_u64(EXHAUSTIVE_FERMAT_MAX) => {
            let top = n1.as_narrow().expect("small") - 1;
            return (2..=top).all(|b| passes(W::from_u64(b)));
        }
        BaseBudget::All => DEFAULT_FERMAT_BASES,
        BaseBudget::Count(c) => c,
    };
    if n <= three {
        return true;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(n.as_wide() as u64 ^ 0x4b6f_7273_656c_7400);
    let hi = (n - W::two()).as_wide();
    let mut tested = 0;
    let mut draws = 0;
    while tested < count && draws < 4 * count.max(1) {
        draws += 1;
        let b = W::try_from_u128(rng.gen_range(2..=hi)).expect("below n");
        if gcd(b, n) != W::one() {
            continue;
        }
        tested += 1;
        if powmod_unchecked(b, n1, n) != W::one() {
            return false;
        }
    }
    true
}

/// Brute-force list of Carmichael numbers below `limit`.
///
/// Each odd `n` is factored by trial division with odd divisors; numbers
/// are discarded as soon as a repeated factor or a failed divisibility
/// `(p - 1) | (n - 1)` shows up, and survivors are confirmed with
/// [`korselt_check`]. Shares nothing with the backtracking enumerator
/// beyond the criterion itself.
pub fn oracle_enumerate(limit: u64) -> Result<Catalog<u64>> {
    if limit > ORACLE_MAX_LIMIT {
        return invalid(format!(
            "oracle limit {limit} exceeds the cap {ORACLE_MAX_LIMIT}"
        ));
    }
    const CHUNK: u64 = 1 << 16;
    let chunks = limit.div_ceil(CHUNK);
    let found: Vec<Vec<CarmichaelEntry<u64>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let lo = (c * CHUNK).max(3) | 1;
            let hi = ((c + 1) * CHUNK).min(limit);
            (lo..hi)
                .step_by(2)
                .filter_map(|n| oracle_factors(n as u32).map(|f| (n, f)))
                .map(|(n, f)| {
                    let f: Vec<u64> = f.into_iter().map(u64::from).collect();
                    let fact = Factorization::from_primes(&f).expect("ascending");
                    assert!(
                        korselt_check(n, &fact).expect("trial division is exact"),
                        "oracle accepted {n}"
                    );
                    CarmichaelEntry::new_unchecked(n, f)
                })
                .collect()
        })
        .collect();
    let (min_factors, max_factors) = default_factor_range(limit);
    Catalog::from_entries(
        Some(Provenance {
            limit,
            min_factors,
            max_factors,
        }),
        found.into_iter().flatten().collect(),
    )
}

/// Prime factors of odd `n` if it looks Carmichael under trial division.
fn oracle_factors(n: u32) -> Option<Vec<u32>> {
    let n1 = n - 1;
    let mut m = n;
    let mut factors = Vec::new();
    let mut d = 3u32;
    while d <= m / d {
        if m.is_multiple_of(d) {
            m /= d;
            if m.is_multiple_of(d) || !n1.is_multiple_of(d - 1) {
                return None;
            }
            factors.push(d);
        }
        d += 2;
    }
    if m == n {
        return None; // prime
    }
    if m > 1 {
        if !n1.is_multiple_of(m - 1) {
            return None;
        }
        factors.push(m);
    }
    (factors.len() >= 3).then_some(factors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fact(primes: &[u64]) -> Factorization<u64> {
        Factorization::from_primes(primes).unwrap()
    }

    #[test]
    fn korselt_examples() {
        assert!(korselt_check(561u64, &fact(&[3, 11, 17])).unwrap());
        let nine = Factorization::from_pairs(vec![(3u64, 2)]).unwrap();
        assert!(!korselt_check(9u64, &nine).unwrap());
        assert!(!korselt_check(15u64, &fact(&[3, 5])).unwrap());
        assert!(korselt_check(561u64, &fact(&[3, 11])).is_err());
        assert!(korselt_check(561u64, &fact(&[1, 3, 11, 17])).is_err());
    }

    #[test]
    fn violation_messages() {
        assert_eq!(
            carmichael_violation(562u64).unwrap().to_string(),
            "not square-free or fewer than 3 factors: 2·281"
        );
        assert_eq!(carmichael_violation(7u64), Some(KorseltViolation::Prime));
        assert_eq!(
            carmichael_violation(1155u64).unwrap().to_string(),
            "p-1 does not divide n-1 for p = 5: 3·5·7·11"
        );
        assert_eq!(carmichael_violation(1u64), Some(KorseltViolation::TooSmall));
    }

    #[test]
    fn carmichael_examples() {
        assert!(is_carmichael(561u64));
        assert!(is_carmichael(1105u64));
        assert!(is_carmichael(1729u64));
        assert!(!is_carmichael(1730u64));
        assert!(is_carmichael(9585921133193329u64));
        assert!(is_carmichael(1791562810662585767521u128));
    }

    #[test]
    fn fermat_examples() {
        assert!(fermat_scan(561u64, BaseBudget::All));
        assert!(!fermat_scan(15u64, BaseBudget::All));
        assert!(fermat_scan(41041u64, BaseBudget::Count(64)));
        assert!(!fermat_scan(41039u64 * 3, BaseBudget::Count(64)));
        // primes pass trivially
        assert!(fermat_scan(3u64, BaseBudget::All));
        assert!(fermat_scan(1_000_003u64, BaseBudget::All));
    }

    #[test]
    fn fermat_exhaustive_matches_korselt_below_ten_thousand() {
        for n in (5u64..10_000).step_by(2) {
            if is_prime(n) {
                continue;
            }
            assert_eq!(fermat_scan(n, BaseBudget::All), is_carmichael(n), "{n}");
        }
    }

    #[test]
    fn oracle_small() {
        let c = oracle_enumerate(10_000).unwrap();
        let values: Vec<u64> = c.values().collect();
        assert_eq!(values, vec![561, 1105, 1729, 2465, 2821, 6601, 8911]);
        assert!(oracle_enumerate(500).unwrap().is_empty());
        assert!(oracle_enumerate(561).unwrap().is_empty());
        assert_eq!(oracle_enumerate(562).unwrap().len(), 1);
        assert!(oracle_enumerate(ORACLE_MAX_LIMIT + 1).is_err());
    }

    #[test]
    fn oracle_million() {
        let c = oracle_enumerate(1_000_000).unwrap();
        assert_eq!(c.len(), 43);
        for e in c.entries() {
            assert!(is_carmichael(e.value()));
            assert!(fermat_scan(e.value(), BaseBudget::Count(64)));
        }
    }

    #[test]
    fn is_carmichael_agrees_with_oracle() {
        let members: std::collections::HashSet<u64> =
            oracle_enumerate(1_000_000).unwrap().values().collect();
        for n in 2..1_000_000u64 {
            assert_eq!(is_carmichael(n), members.contains(&n), "{n}");
        }
    }
}
