//! Statistics of a catalog: counts, growth functions, residue classes,
//! prime-divisor tabulations and records.
//!
//! All counts use strict less-than: `C(X)` is the number of Carmichael
//! numbers `N < X`. The report is built by a streaming fold
//! ([`StatsAccumulator`]), so a catalog never has to be held in memory.

use std::collections::BTreeMap;

use num_traits::{Float, NumCast};

use crate::arith::Word;
use crate::catalog::CarmichaelEntry;
use crate::error::{invalid, Error, Result};
use crate::extremal::RecordSet;

pub mod tables;

/// Moduli of the residue-class table by default.
pub const DEFAULT_MODULI: [u64; 4] = [5, 7, 11, 12];

/// Primes up to this bound are tabulated by default.
pub const DEFAULT_PRIME_BOUND: u64 = 97;

/// Strictly ascending bounds, each at least 561.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckpointList<W> {
    points: Vec<W>,
}

impl<W: Word> CheckpointList<W> {
    pub fn new(points: Vec<W>) -> Result<Self> {
        if points.is_empty() {
            return invalid("checkpoint list is empty");
        }
        if let Some(p) = points.iter().find(|&&p| p < W::from_u64(561)) {
            return invalid(format!("checkpoint {p} is below 561"));
        }
        if points.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("checkpoints must be strictly ascending");
        }
        Ok(Self { points })
    }

    /// Decades `10^3 ..= bound`, plus `25 * 10^9` when in range.
    pub fn default_for(bound: W) -> Result<Self> {
        let mut points = Vec::new();
        let ten = W::from_u64(10);
        let mut x = W::from_u64(1000);
        while x <= bound {
            points.push(x);
            match x.checked_mul(&ten) {
                Some(next) => x = next,
                None => break,
            }
        }
        let extra = W::from_u64(25_000_000_000);
        if extra <= bound {
            points.push(extra);
            points.sort_unstable();
        }
        Self::new(points)
    }

    pub fn points(&self) -> &[W] {
        &self.points
    }

    /// Index of the first checkpoint strictly above `value`.
    fn bucket(&self, value: W) -> usize {
        self.points.partition_point(|&x| x <= value)
    }
}

/// Exponent `n` when `x = 10^n`.
pub fn decade_exponent<W: Word>(x: W) -> Option<u32> {
    let ten = W::from_u64(10);
    let mut n = 0;
    let mut v = x;
    while v > W::one() {
        if !(v % ten).is_zero() {
            return None;
        }
        v = v / ten;
        n += 1;
    }
    (v == W::one()).then_some(n)
}

/// `k(X)` from `C(X) = X exp(-k log X logloglog X / loglog X)`, natural
/// logarithms: `k = (ln X - ln C) ln ln X / (ln X ln ln ln X)`.
pub fn k_of<F: Float>(x: F, count: F) -> Result<F> {
    let thousand = F::from(1000.0).expect("float");
    if x.is_nan() || x < thousand {
        return invalid("k(X) needs X >= 1000");
    }
    if count.is_nan() || count < F::one() {
        return invalid("k(X) needs C(X) >= 1");
    }
    let lx = x.ln();
    let llx = lx.ln();
    Ok((lx - count.ln()) * llx / (lx * llx.ln()))
}

/// `C(10^n) / C(10^(n-1))` for every `n` whose predecessor is present.
pub fn growth_ratios<F: Float>(counts: &BTreeMap<u32, u64>) -> Result<BTreeMap<u32, F>> {
    check_consecutive(counts)?;
    let mut out = BTreeMap::new();
    for (&n, &c) in counts.iter().skip(1) {
        let prev = counts[&(n - 1)];
        if prev == 0 {
            return invalid(format!("C(10^{}) is zero, ratio undefined", n - 1));
        }
        out.insert(n, to_float::<F>(c) / to_float::<F>(prev));
    }
    Ok(out)
}

/// `ln C(10^n) / (n ln 10)` for every `n >= 1` with a positive count.
pub fn power_exponents<F: Float>(counts: &BTreeMap<u32, u64>) -> Result<BTreeMap<u32, F>> {
    check_consecutive(counts)?;
    let ln10 = to_float::<F>(10u64).ln();
    Ok(counts
        .iter()
        .filter(|&(&n, &c)| n > 0 && c > 0)
        .map(|(&n, &c)| (n, to_float::<F>(c).ln() / (to_float::<F>(n as u64) * ln10)))
        .collect())
}

fn check_consecutive(counts: &BTreeMap<u32, u64>) -> Result<()> {
    let keys: Vec<u32> = counts.keys().copied().collect();
    if let Some(w) = keys.windows(2).find(|w| w[1] != w[0] + 1) {
        return invalid(format!("missing checkpoint 10^{}", w[0] + 1));
    }
    Ok(())
}

fn to_float<F: Float>(v: u64) -> F {
    <F as NumCast>::from(v).expect("u64 converts to float")
}

fn word_to_float<F: Float, W: Word>(v: W) -> F {
    <F as NumCast>::from(v.as_wide()).expect("word converts to float")
}

/// What to tabulate besides plain counts.
#[derive(Clone, Debug)]
pub struct StatsSpec<W> {
    pub checkpoints: CheckpointList<W>,
    pub moduli: Vec<u64>,
    pub primes: Vec<u64>,
}

impl<W: Word> StatsSpec<W> {
    pub fn new(checkpoints: CheckpointList<W>) -> Self {
        Self {
            checkpoints,
            moduli: DEFAULT_MODULI.to_vec(),
            primes: crate::primes::prime_sieve(DEFAULT_PRIME_BOUND)
                .into_iter()
                .filter(|&p| p > 2)
                .collect(),
        }
    }

    pub fn with_moduli(mut self, moduli: Vec<u64>) -> Result<Self> {
        if let Some(m) = moduli.iter().find(|&&m| m < 2) {
            return invalid(format!("modulus {m} must be at least 2"));
        }
        self.moduli = moduli;
        Ok(self)
    }

    pub fn with_primes(mut self, primes: Vec<u64>) -> Self {
        self.primes = primes;
        self
    }
}

/// Streaming fold producing a [`StatsReport`].
pub struct StatsAccumulator<W> {
    spec: StatsSpec<W>,
    /// `buckets[i]`: entries in `[cp[i-1], cp[i])`.
    buckets: Vec<u64>,
    by_d: BTreeMap<u32, Vec<u64>>,
    /// per modulus, per class
    residues: Vec<Vec<Vec<u64>>>,
    divisible: Vec<Vec<u64>>,
    least: Vec<Vec<u64>>,
    records: Option<RecordSet<W>>,
}

impl<W: Word> StatsAccumulator<W> {
    pub fn new(spec: StatsSpec<W>) -> Self {
        let n = spec.checkpoints.points.len();
        Self {
            buckets: vec![0; n],
            by_d: BTreeMap::new(),
            residues: spec
                .moduli
                .iter()
                .map(|&m| vec![vec![0; n]; m as usize])
                .collect(),
            divisible: vec![vec![0; n]; spec.primes.len()],
            least: vec![vec![0; n]; spec.primes.len()],
            records: None,
            spec,
        }
    }

    pub fn push(&mut self, e: &CarmichaelEntry<W>) {
        RecordSet::observe(&mut self.records, e);
        let i = self.spec.checkpoints.bucket(e.value());
        if i == self.buckets.len() {
            return;
        }
        self.buckets[i] += 1;
        let n = self.buckets.len();
        self.by_d
            .entry(e.factor_count() as u32)
            .or_insert_with(|| vec![0; n])[i] += 1;
        for (k, &m) in self.spec.moduli.iter().enumerate() {
            let class = (e.value() % W::from_u64(m))
                .as_narrow()
                .expect("below modulus");
            self.residues[k][class as usize][i] += 1;
        }
        for (k, &p) in self.spec.primes.iter().enumerate() {
            let pw = W::from_u64(p);
            if e.factors().contains(&pw) {
                self.divisible[k][i] += 1;
            }
            if e.least_factor() == pw {
                self.least[k][i] += 1;
            }
        }
    }

    pub fn finish(self) -> Result<StatsReport<W>> {
        let cps = self.spec.checkpoints.points.clone();
        let cumulative = |v: &[u64]| -> Vec<u64> {
            v.iter()
                .scan(0u64, |acc, &x| {
                    *acc += x;
                    Some(*acc)
                })
                .collect()
        };
        let mut report = StatsReport {
            checkpoints: cps.clone(),
            moduli: self.spec.moduli.clone(),
            primes: self.spec.primes.clone(),
            records: self.records,
            ..StatsReport::default()
        };
        for (x, c) in cps.iter().zip(cumulative(&self.buckets)) {
            report.counts.insert(*x, c);
        }
        for (&d, v) in &self.by_d {
            for (x, c) in cps.iter().zip(cumulative(v)) {
                report.counts_by_d.insert((d, *x), c);
            }
        }
        for (k, &m) in self.spec.moduli.iter().enumerate() {
            for (class, v) in self.residues[k].iter().enumerate() {
                for (x, c) in cps.iter().zip(cumulative(v)) {
                    report.residue_tables.insert((m, class as u64, *x), c);
                }
            }
        }
        for (k, &p) in self.spec.primes.iter().enumerate() {
            for (x, c) in cps.iter().zip(cumulative(&self.divisible[k])) {
                report.prime_divisor_counts.insert((p, *x), c);
            }
            for (x, c) in cps.iter().zip(cumulative(&self.least[k])) {
                report.least_prime_counts.insert((p, *x), c);
            }
        }
        for (&x, &c) in &report.counts {
            if x >= W::from_u64(1000) && c >= 1 {
                report
                    .k_values
                    .insert(x, k_of(word_to_float::<f64, W>(x), c as f64)?);
            }
        }
        let decades: BTreeMap<u32, u64> = report
            .counts
            .iter()
            .filter_map(|(&x, &c)| decade_exponent(x).map(|n| (n, c)))
            .collect();
        // Ratios and exponents need consecutive decades; take the longest
        // run ending at the largest decade.
        let run = consecutive_tail(&decades);
        if run.len() >= 2 && run.values().all(|&c| c > 0) {
            report.ratios = growth_ratios(&run)?;
        }
        report.exponents = power_exponents(&run)?;
        report.check_invariants()?;
        Ok(report)
    }
}

fn consecutive_tail(decades: &BTreeMap<u32, u64>) -> BTreeMap<u32, u64> {
    let mut out = BTreeMap::new();
    let mut expect: Option<u32> = None;
    for (&n, &c) in decades.iter().rev() {
        if expect.is_some_and(|e| e != n) {
            break;
        }
        out.insert(n, c);
        expect = n.checked_sub(1);
    }
    out
}

/// Every table computed from a catalog.
#[derive(Clone, Debug, PartialEq)]
pub struct StatsReport<W> {
    pub checkpoints: Vec<W>,
    pub moduli: Vec<u64>,
    pub primes: Vec<u64>,
    /// `C(X)`
    pub counts: BTreeMap<W, u64>,
    /// `C(d, X)` keyed by `(d, X)`
    pub counts_by_d: BTreeMap<(u32, W), u64>,
    pub k_values: BTreeMap<W, f64>,
    /// `C(10^n) / C(10^(n-1))` keyed by `n`
    pub ratios: BTreeMap<u32, f64>,
    /// `ln C(10^n) / (n ln 10)` keyed by `n`
    pub exponents: BTreeMap<u32, f64>,
    /// keyed by `(m, class, X)`
    pub residue_tables: BTreeMap<(u64, u64, W), u64>,
    /// keyed by `(p, X)`
    pub prime_divisor_counts: BTreeMap<(u64, W), u64>,
    pub least_prime_counts: BTreeMap<(u64, W), u64>,
    pub records: Option<RecordSet<W>>,
}

impl<W> Default for StatsReport<W> {
    fn default() -> Self {
        Self {
            checkpoints: Vec::new(),
            moduli: Vec::new(),
            primes: Vec::new(),
            counts: BTreeMap::new(),
            counts_by_d: BTreeMap::new(),
            k_values: BTreeMap::new(),
            ratios: BTreeMap::new(),
            exponents: BTreeMap::new(),
            residue_tables: BTreeMap::new(),
            prime_divisor_counts: BTreeMap::new(),
            least_prime_counts: BTreeMap::new(),
            records: None,
        }
    }
}

impl<W: Word> StatsReport<W> {
    /// Factor counts present in the by-d table, ascending.
    pub fn factor_counts(&self) -> Vec<u32> {
        let mut ds: Vec<u32> = self.counts_by_d.keys().map(|&(d, _)| d).collect();
        ds.dedup();
        ds
    }

    /// Cross-table consistency: by-d and residue sums equal `C(X)`,
    /// divisibility by 3 equals least factor 3, and divisibility by 5
    /// equals residue class 0 mod 5.
    pub fn check_invariants(&self) -> Result<()> {
        let broken = |what: String| Err(Error::Integrity(what));
        for (&x, &c) in &self.counts {
            let by_d: u64 = self
                .counts_by_d
                .iter()
                .filter(|((_, y), _)| *y == x)
                .map(|(_, &v)| v)
                .sum();
            if by_d != c {
                return broken(format!("sum over d at {x} is {by_d}, C = {c}"));
            }
            for &m in &self.moduli {
                let s: u64 = (0..m).map(|r| self.residue_tables[&(m, r, x)]).sum();
                if s != c {
                    return broken(format!("classes mod {m} at {x} sum to {s}, C = {c}"));
                }
            }
            if let (Some(a), Some(b)) = (
                self.prime_divisor_counts.get(&(3, x)),
                self.least_prime_counts.get(&(3, x)),
            ) {
                if a != b {
                    return broken(format!("divisible by 3 ({a}) != least 3 ({b}) at {x}"));
                }
            }
            if let (Some(a), Some(b)) = (
                self.prime_divisor_counts.get(&(5, x)),
                self.residue_tables.get(&(5, 0, x)),
            ) {
                if a != b {
                    return broken(format!("divisible by 5 ({a}) != 0 mod 5 ({b}) at {x}"));
                }
            }
        }
        Ok(())
    }
}

/// Compute a report over any stream of entries. When the catalog's bound
/// is known, every checkpoint must lie at or below it.
pub fn compute_report<'a, W: Word>(
    entries: impl IntoIterator<Item = &'a CarmichaelEntry<W>>,
    spec: StatsSpec<W>,
    catalog_bound: Option<W>,
) -> Result<StatsReport<W>> {
    check_bound(&spec.checkpoints, catalog_bound)?;
    let mut acc = StatsAccumulator::new(spec);
    for e in entries {
        acc.push(e);
    }
    acc.finish()
}

fn check_bound<W: Word>(cps: &CheckpointList<W>, bound: Option<W>) -> Result<()> {
    if let Some(b) = bound {
        if let Some(x) = cps.points.iter().find(|&&x| x > b) {
            return invalid(format!("checkpoint {x} exceeds the catalog bound {b}"));
        }
    }
    Ok(())
}

/// Plain count tables `C(X)` and `C(d, X)`.
pub struct CountTable<W> {
    pub counts: BTreeMap<W, u64>,
    pub counts_by_d: BTreeMap<(u32, W), u64>,
}

pub fn count_table<'a, W: Word>(
    entries: impl IntoIterator<Item = &'a CarmichaelEntry<W>>,
    checkpoints: &CheckpointList<W>,
    catalog_bound: Option<W>,
) -> Result<CountTable<W>> {
    let spec = StatsSpec::new(checkpoints.clone())
        .with_moduli(Vec::new())?
        .with_primes(Vec::new());
    let r = compute_report(entries, spec, catalog_bound)?;
    Ok(CountTable {
        counts: r.counts,
        counts_by_d: r.counts_by_d,
    })
}

/// Entries below each checkpoint, by residue class mod `m`; keyed by
/// `(class, X)`.
pub fn residue_table<'a, W: Word>(
    entries: impl IntoIterator<Item = &'a CarmichaelEntry<W>>,
    m: u64,
    checkpoints: &CheckpointList<W>,
) -> Result<BTreeMap<(u64, W), u64>> {
    let spec = StatsSpec::new(checkpoints.clone())
        .with_moduli(vec![m])?
        .with_primes(Vec::new());
    let r = compute_report(entries, spec, None)?;
    Ok(r.residue_tables
        .into_iter()
        .map(|((_, c, x), v)| ((c, x), v))
        .collect())
}

/// Counts keyed by `(p, X)`.
pub type PrimeCounts<W> = BTreeMap<(u64, W), u64>;

/// Entries below each checkpoint divisible by `p`, and with least factor
/// `p`; both keyed by `(p, X)`.
pub fn prime_tables<'a, W: Word>(
    entries: impl IntoIterator<Item = &'a CarmichaelEntry<W>>,
    primes: &[u64],
    checkpoints: &CheckpointList<W>,
) -> Result<(PrimeCounts<W>, PrimeCounts<W>)> {
    let spec = StatsSpec::new(checkpoints.clone())
        .with_moduli(Vec::new())?
        .with_primes(primes.to_vec());
    let r = compute_report(entries, spec, None)?;
    Ok((r.prime_divisor_counts, r.least_prime_counts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_examples() {
        assert!((k_of(1e16, 246683.0).unwrap() - 1.86406f64).abs() < 5e-6);
        assert!((k_of(1e6, 43.0).unwrap() - 1.97946f64).abs() < 5e-6);
        assert!((k_of(1e3, 1.0).unwrap() - 2.93319f64).abs() < 5e-6);
        assert!(k_of(999.0f64, 1.0).is_err());
        assert!(k_of(1e6f64, 0.0).is_err());
        // f32 works too, at its own precision
        assert!((k_of(1e6f32, 43.0).unwrap() - 1.97946).abs() < 1e-4);
    }

    #[test]
    fn k_decreases_in_count() {
        let mut prev = f64::INFINITY;
        for c in 1..200 {
            let k = k_of(1e9, c as f64).unwrap();
            assert!(k < prev);
            prev = k;
        }
    }

    #[test]
    fn ratios_and_exponents() {
        let counts: BTreeMap<u32, u64> = [(3, 1), (4, 7), (5, 16)].into_iter().collect();
        let r = growth_ratios::<f64>(&counts).unwrap();
        assert_eq!(r[&4], 7.0);
        assert!((r[&5] - 16.0 / 7.0).abs() < 1e-12);
        let e = power_exponents::<f64>(&counts).unwrap();
        assert_eq!(e[&3], 0.0);
        assert!((e[&4] - 0.21127).abs() < 5e-6);
        let gap: BTreeMap<u32, u64> = [(3, 1), (5, 16)].into_iter().collect();
        assert!(growth_ratios::<f64>(&gap).is_err());
    }

    #[test]
    fn checkpoints() {
        assert!(CheckpointList::new(vec![1000u64, 1000]).is_err());
        assert!(CheckpointList::new(vec![100u64]).is_err());
        let d = CheckpointList::default_for(10u64.pow(12)).unwrap();
        assert_eq!(d.points().len(), 11);
        assert!(d.points().contains(&25_000_000_000));
        assert_eq!(decade_exponent(10u64.pow(12)), Some(12));
        assert_eq!(decade_exponent(25_000_000_000u64), None);
        assert_eq!(decade_exponent(1u64), Some(0));
    }

    #[test]
    fn consecutive_tail_picks_last_run() {
        let m: BTreeMap<u32, u64> = [(3, 1), (5, 2), (6, 3), (7, 4)].into_iter().collect();
        assert_eq!(
            consecutive_tail(&m).keys().copied().collect::<Vec<_>>(),
            vec![5, 6, 7]
        );
    }
}
