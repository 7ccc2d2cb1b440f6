//! Smallest Carmichael numbers with a given factor count, and record scans.

use crate::arith::Word;
use crate::catalog::CarmichaelEntry;
use crate::enumerator::{enumerate, EnumerationConfig};
use crate::error::{invalid, Result};
use crate::primes::{certainty, Certainty};

/// Factor counts accepted by [`smallest_with_factors`].
pub const MIN_TARGET: u32 = 3;
pub const MAX_TARGET: u32 = 20;

const ODD_PRIMES: [u64; 20] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73,
];

/// Outcome of a targeted search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmallestResult {
    pub entry: CarmichaelEntry<u128>,
    /// Weakest primality verdict among the factors.
    pub certainty: Certainty,
    /// Bound of the enumeration that found the entry.
    pub final_bound: u128,
    /// Number of enumeration runs made.
    pub runs: u32,
}

/// Smallest Carmichael number with exactly `d` prime factors.
///
/// Iterative deepening: enumerate `d`-factor numbers below `B`, starting
/// from the product of the `d` smallest odd primes and doubling `B` until
/// something is found. Every number below the returned one was covered by
/// an exhaustive run, which is what makes it the minimum.
pub fn smallest_with_factors(d: u32, workers: usize) -> Result<SmallestResult> {
    if !(MIN_TARGET..=MAX_TARGET).contains(&d) {
        return invalid(format!(
            "factor count {d} outside {MIN_TARGET}..={MAX_TARGET}"
        ));
    }
    // Narrow words are much faster; fall back to u128 when the bound
    // outgrows them.
    if let Some(found) = deepen::<u64>(d, workers)? {
        return Ok(found);
    }
    deepen::<u128>(d, workers)?.ok_or_else(|| {
        crate::error::Error::Overflow(format!("search for d = {d} left the 2^126 range"))
    })
}

/// `Ok(None)` when the bound no longer fits in `W`.
fn deepen<W: Word>(d: u32, workers: usize) -> Result<Option<SmallestResult>> {
    let mut bound = W::one();
    for &p in &ODD_PRIMES[..d as usize] {
        match bound.checked_mul(&W::from_u64(p)) {
            Some(b) => bound = b,
            None => return Ok(None),
        }
    }
    bound = bound.max(W::from_u64(562));
    let mut runs = 0;
    loop {
        runs += 1;
        let config = EnumerationConfig::new(bound)
            .with_factors(d, d)
            .with_workers(workers);
        if crate::enumerator::max_factor_count(bound)? >= d {
            let catalog = enumerate(&config)?;
            if let Some(first) = catalog.entries().first() {
                let entry = first.widen();
                let certainty = entry
                    .factors()
                    .iter()
                    .map(|&p| certainty(p))
                    .max_by_key(|c| matches!(c, Certainty::Bpsw))
                    .unwrap_or(Certainty::Deterministic);
                return Ok(Some(SmallestResult {
                    entry,
                    certainty,
                    final_bound: bound.as_wide(),
                    runs,
                }));
            }
        }
        match bound.checked_mul(&W::two()) {
            Some(b) if b <= W::MAX_MODULUS => bound = b,
            _ => return Ok(None),
        }
    }
}

/// A record prime together with the entry it occurs in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record<W> {
    pub prime: W,
    pub host: CarmichaelEntry<W>,
}

/// Extremal primes over a catalog.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecordSet<W> {
    /// Largest prime factor of any entry.
    pub largest_prime_factor: Record<W>,
    /// Largest least prime factor of any entry.
    pub largest_least_prime_factor: Record<W>,
}

impl<W: Word> RecordSet<W> {
    fn seed(e: &CarmichaelEntry<W>) -> Self {
        Self {
            largest_prime_factor: Record {
                prime: e.largest_factor(),
                host: e.clone(),
            },
            largest_least_prime_factor: Record {
                prime: e.least_factor(),
                host: e.clone(),
            },
        }
    }

    /// Fold one entry in. Ties go to the smaller host.
    pub fn update(&mut self, e: &CarmichaelEntry<W>) {
        fn better<W: Word>(rec: &Record<W>, prime: W, e: &CarmichaelEntry<W>) -> bool {
            prime > rec.prime || (prime == rec.prime && e.value() < rec.host.value())
        }
        if better(&self.largest_prime_factor, e.largest_factor(), e) {
            self.largest_prime_factor = Record {
                prime: e.largest_factor(),
                host: e.clone(),
            };
        }
        if better(&self.largest_least_prime_factor, e.least_factor(), e) {
            self.largest_least_prime_factor = Record {
                prime: e.least_factor(),
                host: e.clone(),
            };
        }
    }

    pub fn observe(records: &mut Option<Self>, e: &CarmichaelEntry<W>) {
        match records {
            Some(r) => r.update(e),
            None => *records = Some(Self::seed(e)),
        }
    }
}

/// Both records in one pass.
pub fn scan_records<'a, W: Word>(
    entries: impl IntoIterator<Item = &'a CarmichaelEntry<W>>,
) -> Result<RecordSet<W>> {
    let mut records = None;
    for e in entries {
        RecordSet::observe(&mut records, e);
    }
    records.map_or_else(|| invalid("cannot scan records of an empty catalog"), Ok)
}

/// `k` such that the i-th factor is `a_i * k + 1` for every `i`.
pub fn kform_check<W: Word>(entry: &CarmichaelEntry<W>, pattern: &[u64]) -> Option<W> {
    if pattern.len() != entry.factor_count() || pattern.contains(&0) {
        return None;
    }
    let first = entry.factors()[0] - W::one();
    let a0 = W::from_u64(pattern[0]);
    if !(first % a0).is_zero() {
        return None;
    }
    let k = first / a0;
    if k.is_zero() {
        return None;
    }
    entry
        .factors()
        .iter()
        .zip(pattern)
        .all(|(&p, &a)| {
            W::from_u64(a)
                .checked_mul(&k)
                .and_then(|v| v.checked_add(&W::one()))
                == Some(p)
        })
        .then_some(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(v: u64, f: &[u64]) -> CarmichaelEntry<u64> {
        CarmichaelEntry::new(v, f.to_vec()).unwrap()
    }

    #[test]
    fn smallest_small_d() {
        let r = smallest_with_factors(3, 1).unwrap();
        assert_eq!(r.entry.to_string(), "561 3 11 17");
        assert_eq!(r.certainty, Certainty::Deterministic);
        let r = smallest_with_factors(4, 1).unwrap();
        assert_eq!(r.entry.to_string(), "41041 7 11 13 41");
        assert!(smallest_with_factors(2, 1).is_err());
        assert!(smallest_with_factors(21, 1).is_err());
    }

    #[test]
    fn records_single_entry() {
        let e = entry(561, &[3, 11, 17]);
        let r = scan_records([&e]).unwrap();
        assert_eq!(r.largest_prime_factor.prime, 17);
        assert_eq!(r.largest_least_prime_factor.prime, 3);
        assert!(scan_records(std::iter::empty::<&CarmichaelEntry<u64>>()).is_err());
    }

    #[test]
    fn record_ties_prefer_smaller_host() {
        // 17 is the largest factor of both 561 and 1105
        let a = entry(1105, &[5, 13, 17]);
        let b = entry(561, &[3, 11, 17]);
        let r = scan_records([&a, &b]).unwrap();
        assert_eq!(r.largest_prime_factor.host.value(), 561);
        assert_eq!(r.largest_least_prime_factor.host.value(), 1105);
    }

    #[test]
    fn kforms() {
        let big = entry(9585921133193329, &[174763, 199729, 274627]);
        assert_eq!(kform_check(&big, &[7, 8, 11]), Some(24966));
        assert_eq!(kform_check(&entry(561, &[3, 11, 17]), &[1, 1, 1]), None);
        assert_eq!(kform_check(&entry(1729, &[7, 13, 19]), &[1, 2, 3]), Some(6));
        assert_eq!(kform_check(&entry(1729, &[7, 13, 19]), &[1, 2]), None);
    }
}
