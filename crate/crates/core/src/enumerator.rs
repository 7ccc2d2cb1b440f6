//! Exhaustive enumeration of Carmichael numbers below a bound.
//!
//! # Search
//!
//! A Carmichael number with `d` prime factors is written `N = p1 p2 ... pd`
//! with `p1 < p2 < ... < pd`, all odd. The search walks ascending prefixes
//! `p1 < ... < pk` and keeps `P = p1...pk` and `L = lcm(pi - 1)`.
//!
//! *Pruning.* The next prime `p` is followed by `d - k - 1` strictly larger
//! primes, so `N >= P * p^(d-k)`. Because `N < limit`, any viable `p` is at
//! most `iroot((limit - 1) / P, d - k)` ([`child_bound`]); cutting the loop
//! there never discards a viable prefix. A prime `p` with `pi | p - 1` for
//! some earlier `pi` is also dropped: `pi | N` and `p - 1 | N - 1` would
//! force `pi | N - 1`. Hence every surviving prefix has `gcd(P, L) = 1`.
//!
//! *Completion by one prime* (the large prime variation). Once `d - 1`
//! primes are fixed, write `N = P q`. Korselt's criterion needs
//! `q - 1 | Pq - 1`, and `Pq - 1 = P(q - 1) + (P - 1)`, so `q - 1 | P - 1`.
//! It also needs `Pq ≡ 1 (mod L)`, i.e. `q ≡ P^-1 (mod L)`. So every valid
//! `q` is `e + 1` for a divisor `e` of `P - 1` in one residue class mod `L`
//! ([`final_primes`]). The same two conditions can instead be met by walking
//! the progression `q ≡ P^-1 (mod L)` up to `min(P, (limit - 1) / P)` and
//! testing `q - 1 | P - 1` directly ([`final_primes_progression`]).
//!
//! *Completion by two primes.* With `d - 2` primes fixed, loop over the
//! next prime `q <= iroot((limit - 1) / P, 2)`; the last prime `r > q` must
//! satisfy `r - 1 | Pq - 1` and `r ≡ (Pq)^-1 (mod lcm(L, q - 1))`. Writing
//! `Pq - 1 = e (r - 1)`, `r > q` gives `e <= (Pq - 1) / q < P`, and the
//! condition `q - 1 | Pr - 1` reduces to `(P - 1)(e + P) ≡ 0 (mod q - 1)`,
//! so `e` runs over one residue class modulo `(q - 1) / gcd(P - 1, q - 1)`.
//! When the progression of `r` values is shorter than the list of `e`
//! candidates, `r` is walked directly instead. Both walks cover every
//! solution ([`last_two_completions`]).
//!
//! Every emitted number is re-checked with [`korselt_check`] on its full
//! factorization.

use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;

use crate::arith::{gcd, invmod_unchecked, iroot_unchecked, lcm, Word};
use crate::catalog::{CarmichaelEntry, Catalog, Provenance};
use crate::error::{invalid, Error, Result};
use crate::korselt::korselt_check;
use crate::primes::{divisors, factorize, is_prime, prime_sieve, Factorization};

/// The first odd primes, enough for any product below 2^126.
const ODD_PRIMES: [u64; 30] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    101, 103, 107, 109, 113, 127,
];

/// Sieve tables larger than this are refused.
pub const MAX_SIEVE_LIMIT: u64 = 1 << 34;

/// How the last prime(s) of each factorization are found.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum CompletionMode {
    /// Prefixes of `d - 1` primes; last prime from divisors of `P - 1`.
    Basic,
    /// Prefixes of `d - 1` primes; last prime by walking its residue class.
    LastPrime,
    /// Prefixes of `d - 2` primes; last two primes solved together.
    #[default]
    LastTwo,
}

impl CompletionMode {
    pub fn name(self) -> &'static str {
        match self {
            Self::Basic => "basic",
            Self::LastPrime => "last-prime",
            Self::LastTwo => "last-two",
        }
    }

    /// Number of primes fixed by backtracking before completion.
    fn depth(self, d: u32) -> usize {
        match self {
            Self::Basic | Self::LastPrime => d as usize - 1,
            Self::LastTwo => d as usize - 2,
        }
    }
}

impl FromStr for CompletionMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "basic" => Ok(Self::Basic),
            "last-prime" | "last_prime" => Ok(Self::LastPrime),
            "last-two" | "last_two" => Ok(Self::LastTwo),
            _ => invalid(format!("unknown completion mode {s:?}")),
        }
    }
}

/// Parameters of one enumeration run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationConfig<W> {
    /// Strict upper bound on N.
    pub limit: W,
    pub min_factors: u32,
    pub max_factors: u32,
    pub mode: CompletionMode,
    pub workers: usize,
}

impl<W: Word> EnumerationConfig<W> {
    /// All factor counts possible below `limit`, default mode, one worker.
    pub fn new(limit: W) -> Self {
        let (min_factors, max_factors) = default_factor_range(limit);
        Self {
            limit,
            min_factors,
            max_factors,
            mode: CompletionMode::default(),
            workers: 1,
        }
    }

    pub fn with_factors(mut self, min: u32, max: u32) -> Self {
        self.min_factors = min;
        self.max_factors = max;
        self
    }

    pub fn with_mode(mut self, mode: CompletionMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return invalid("worker count must be positive");
        }
        if self.min_factors < 3 || self.min_factors > self.max_factors {
            return invalid(format!(
                "factor range {}..{} must satisfy 3 <= min <= max",
                self.min_factors, self.max_factors
            ));
        }
        if self.limit > W::from_u64(561) {
            let most = max_factor_count(self.limit)?;
            if self.max_factors > most {
                return invalid(format!(
                    "no Carmichael number below {} has {} factors (at most {most})",
                    self.limit, self.max_factors
                ));
            }
        } else if self.max_factors > 3 {
            return invalid(format!("limit {} admits at most 3 factors", self.limit));
        }
        Ok(())
    }

    fn provenance(&self) -> Provenance<W> {
        Provenance {
            limit: self.limit,
            min_factors: self.min_factors,
            max_factors: self.max_factors,
        }
    }
}

/// Largest `d` such that the product of the `d` smallest odd primes is
/// below `limit`.
pub fn max_factor_count<W: Word>(limit: W) -> Result<u32> {
    if limit < W::from_u64(561) {
        return invalid(format!(
            "limit {limit} is below the first Carmichael number"
        ));
    }
    let mut product = W::one();
    let mut d = 0;
    for &p in &ODD_PRIMES {
        match product.checked_mul(&W::from_u64(p)) {
            Some(next) if next < limit => {
                product = next;
                d += 1;
            }
            _ => break,
        }
    }
    Ok(d)
}

/// Factor range written into catalog headers by default: `3..=max`, or
/// `3..=3` when the limit is too small for [`max_factor_count`].
pub fn default_factor_range<W: Word>(limit: W) -> (u32, u32) {
    (3, max_factor_count(limit).unwrap_or(3).max(3))
}

/// Ascending odd primes `p1 < ... < pk` with cached product and
/// `lcm(pi - 1)`: a node of the search tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PrefixState<W> {
    primes: Vec<W>,
    products: Vec<W>,
    lcms: Vec<W>,
    limit: W,
    target: Option<u32>,
}

impl<W: Word> PrefixState<W> {
    pub fn new(limit: W, target: Option<u32>) -> Self {
        Self {
            primes: Vec::new(),
            products: Vec::new(),
            lcms: Vec::new(),
            limit,
            target,
        }
    }

    /// Build from a list of primes, checking every invariant.
    pub fn from_primes(limit: W, target: Option<u32>, primes: &[W]) -> Result<Self> {
        let mut s = Self::new(limit, target);
        for &p in primes {
            s.push(p)?;
        }
        Ok(s)
    }

    /// Append `p`: must be an odd prime above the current last prime, with
    /// the extended product still at most the limit.
    pub fn push(&mut self, p: W) -> Result<()> {
        if p.is_even() || !is_prime(p) {
            return invalid(format!("{p} is not an odd prime"));
        }
        if self.primes.last().is_some_and(|&q| p <= q) {
            return invalid(format!("{p} does not extend the ascending prefix"));
        }
        let product = self
            .product()
            .checked_mul(&p)
            .filter(|&v| v <= self.limit)
            .ok_or_else(|| {
                Error::InvalidArgument(format!("prefix product exceeds {}", self.limit))
            })?;
        let l = lcm(self.carry_lcm(), p - W::one())?;
        self.push_unchecked(p, product, l);
        Ok(())
    }

    #[inline]
    fn push_unchecked(&mut self, p: W, product: W, l: W) {
        self.primes.push(p);
        self.products.push(product);
        self.lcms.push(l);
    }

    pub fn pop(&mut self) -> Option<W> {
        self.products.pop();
        self.lcms.pop();
        self.primes.pop()
    }

    pub fn primes(&self) -> &[W] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    pub fn last(&self) -> Option<W> {
        self.primes.last().copied()
    }

    /// P, the product of the primes (1 when empty).
    pub fn product(&self) -> W {
        self.products.last().copied().unwrap_or(W::one())
    }

    /// L, the lcm of `p - 1` over the primes (1 when empty).
    pub fn carry_lcm(&self) -> W {
        self.lcms.last().copied().unwrap_or(W::one())
    }

    pub fn limit(&self) -> W {
        self.limit
    }

    pub fn target(&self) -> Option<u32> {
        self.target
    }

    /// No earlier prime divides `p - 1`.
    #[inline]
    fn admits(&self, p: W) -> bool {
        let pm1 = p - W::one();
        self.primes.iter().all(|&q| !(pm1 % q).is_zero())
    }
}

/// Largest admissible next prime for a prefix of `k < d - 1` primes:
/// `iroot((limit - 1) / P, d - k)`. A result not above the last prime
/// means the branch is exhausted.
pub fn child_bound<W: Word>(prefix: &PrefixState<W>, d: u32) -> W {
    let k = prefix.len() as u32;
    debug_assert!(k < d);
    if prefix.limit.is_zero() {
        return W::zero();
    }
    iroot_unchecked((prefix.limit - W::one()) / prefix.product(), d - k)
}

/// Primes `q` such that `P * q` is a Carmichael number below the limit and
/// `q` exceeds the prefix's last prime, found among the divisors of `P - 1`.
pub fn final_primes<W: Word>(prefix: &PrefixState<W>) -> Result<Vec<W>> {
    let Some((t, last)) = completion_residue(prefix) else {
        return Ok(Vec::new());
    };
    let p = prefix.product();
    let l = prefix.carry_lcm();
    let q_max = (prefix.limit - W::one()) / p;
    let divs = divisors(&factorize(p - W::one())?).map_err(|e| match e {
        Error::ResourceLimit(m) => Error::ResourceLimit(format!("prefix {:?}: {m}", prefix.primes)),
        other => other,
    })?;
    let mut out = Vec::new();
    for e in divs {
        let q = e + W::one();
        if q <= last {
            continue;
        }
        if q > q_max {
            break;
        }
        if q % l == t && is_prime(q) {
            out.push(q);
        }
    }
    Ok(out)
}

/// Same contract as [`final_primes`], by walking `q ≡ P^-1 (mod L)` up to
/// `min(P, (limit - 1) / P)` and testing `q - 1 | P - 1` directly.
pub fn final_primes_progression<W: Word>(prefix: &PrefixState<W>) -> Vec<W> {
    let Some((t, last)) = completion_residue(prefix) else {
        return Vec::new();
    };
    let p = prefix.product();
    let l = prefix.carry_lcm();
    let pm1 = p - W::one();
    let q_max = ((prefix.limit - W::one()) / p).min(p);
    let start = last + W::one();
    let mut q = start + (t + l - start % l) % l;
    let mut out = Vec::new();
    while q <= q_max {
        if (pm1 % (q - W::one())).is_zero() && is_prime(q) {
            out.push(q);
        }
        match q.checked_add(&l) {
            Some(next) => q = next,
            None => break,
        }
    }
    out
}

/// `(P^-1 mod L, last prime)`, or `None` when no completion can exist.
fn completion_residue<W: Word>(prefix: &PrefixState<W>) -> Option<(W, W)> {
    let last = prefix.last()?;
    let p = prefix.product();
    let l = prefix.carry_lcm();
    if gcd(p, l) != W::one() {
        return None;
    }
    // L >= 2 because every prime is odd.
    invmod_unchecked(p % l, l).map(|t| (t, last))
}

/// Sieved primes shared by all workers of a run.
#[derive(Clone, Debug)]
pub struct PrimeTable {
    primes: Vec<u64>,
    limit: u64,
}

impl PrimeTable {
    pub fn new(limit: u64) -> Result<Self> {
        if limit > MAX_SIEVE_LIMIT {
            return Err(Error::ResourceLimit(format!(
                "prime table up to {limit} exceeds {MAX_SIEVE_LIMIT}"
            )));
        }
        Ok(Self {
            primes: prime_sieve(limit),
            limit,
        })
    }

    /// Every prime in the table is at most this.
    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Odd primes strictly above `p`, ascending.
    pub fn odd_after(&self, p: u64) -> &[u64] {
        let from = self.primes.partition_point(|&x| x <= p.max(2));
        &self.primes[from..]
    }

    /// Table large enough for every prime a run can place in a prefix or
    /// try as the second-to-last prime.
    pub fn for_config<W: Word>(config: &EnumerationConfig<W>) -> Result<Self> {
        let mut need = 0u128;
        for d in config.min_factors..=config.max_factors {
            need = need.max(sieve_bound(config.limit, d));
        }
        let need = u64::try_from(need).map_err(|_| {
            Error::ResourceLimit(format!(
                "prime table for limit {} is too large",
                config.limit
            ))
        })?;
        Self::new(need.max(3))
    }
}

/// Max over `k <= d - 2` of `iroot((limit - 1) / (3*5*...*p_k), d - k)`.
fn sieve_bound<W: Word>(limit: W, d: u32) -> u128 {
    if limit <= W::one() {
        return 0;
    }
    let mut product = W::one();
    let mut best = W::zero();
    for k in 0..=d.saturating_sub(2) {
        if k > 0 {
            match product.checked_mul(&W::from_u64(ODD_PRIMES[k as usize - 1])) {
                Some(p) => product = p,
                None => break,
            }
        }
        best = best.max(iroot_unchecked((limit - W::one()) / product, d - k));
    }
    best.as_wide()
}

/// Pairs `(q, r)`, `last < q < r`, completing a prefix of `d - 2` primes to
/// a Carmichael number below the limit.
pub fn last_two_completions<W: Word>(
    prefix: &PrefixState<W>,
    d: u32,
    table: &PrimeTable,
) -> Result<Vec<(W, W)>> {
    if prefix.len() + 2 != d as usize {
        return invalid(format!(
            "prefix of {} primes cannot take two more to reach {d}",
            prefix.len()
        ));
    }
    let mut out = Vec::new();
    let q_max = child_bound(prefix, d);
    check_table(table, q_max)?;
    let last = prefix
        .last()
        .map_or(2, |p| p.as_narrow().expect("prefix primes are sieved"));
    let p = prefix.product();
    let l = prefix.carry_lcm();
    if gcd(p, l) != W::one() {
        return Ok(out);
    }
    for &qs in table.odd_after(last) {
        let q = W::from_u64(qs);
        if q > q_max {
            break;
        }
        if prefix.admits(q) {
            complete_pair(p, l, q, prefix.limit, |r| out.push((q, r)));
        }
    }
    Ok(out)
}

fn check_table<W: Word>(table: &PrimeTable, bound: W) -> Result<()> {
    if bound.as_wide() > table.limit as u128 {
        return Err(Error::ResourceLimit(format!(
            "prime table stops at {}, search needs {bound}",
            table.limit
        )));
    }
    Ok(())
}

/// All primes `r > q` with `P q r` Carmichael and below `limit`.
///
/// Preconditions (from the search): `gcd(P, L) = 1`, no prefix prime
/// divides `q - 1`, `q` exceeds every prefix prime and `q^2 <= (limit-1)/P`.
#[inline]
fn complete_pair<W: Word>(p: W, l: W, q: W, limit: W, mut emit: impl FnMut(W)) {
    let one = W::one();
    let pq = p * q;
    let pq1 = pq - one;
    let r_max = (limit - one) / pq;
    if r_max <= q {
        return;
    }
    let q1 = q - one;
    // lcm(L, q - 1) <= L (q - 1) < P q < limit
    let lq = l / gcd(l, q1) * q1;

    // Route A: cofactors e = (Pq - 1) / (r - 1) in e ≡ -P (mod M).
    let m = q1 / gcd(p - one, q1);
    let e_hi = pq1 / q;
    let e_lo = pq1.div_ceil(&(r_max - one)).max(one);
    if e_lo > e_hi {
        return;
    }
    let count_a = (e_hi - e_lo) / m;
    // Route B: r ≡ (Pq)^-1 (mod lcm(L, q - 1)) in (q, r_max].
    let count_b = (r_max - q) / lq;

    let pq_mod = pq % lq;
    if count_a <= count_b {
        let e0 = (m - p % m) % m;
        let mut e = e_lo + (e0 + m - e_lo % m) % m;
        while e <= e_hi {
            if (pq1 % e).is_zero() {
                let r = pq1 / e + one;
                if r > q
                    && r <= r_max
                    && (lq == one || W::mul_mod_unchecked(pq_mod, r % lq, lq) == one)
                    && is_prime(r)
                {
                    emit(r);
                }
            }
            e = e + m;
        }
    } else {
        let Some(t) = invmod_unchecked(pq_mod, lq) else {
            return;
        };
        let start = q + one;
        let mut r = start + (t + lq - start % lq) % lq;
        while r <= r_max {
            if (pq1 % (r - one)).is_zero() && is_prime(r) {
                emit(r);
            }
            r = r + lq;
        }
    }
}

/// Progress callback: `(finished tasks, total tasks)`.
pub type Progress<'a> = &'a (dyn Fn(usize, usize) + Sync);

/// Every Carmichael number below `config.limit` with a factor count in
/// range, ascending.
pub fn enumerate<W: Word>(config: &EnumerationConfig<W>) -> Result<Catalog<W>> {
    enumerate_with_progress(config, &|_, _| {})
}

pub fn enumerate_with_progress<W: Word>(
    config: &EnumerationConfig<W>,
    progress: Progress<'_>,
) -> Result<Catalog<W>> {
    config.validate()?;
    let provenance = config.provenance();
    if config.limit <= W::from_u64(561) {
        return Ok(Catalog::empty(Some(provenance)));
    }
    let table = PrimeTable::for_config(config)?;
    let search = Search {
        table: &table,
        limit: config.limit,
        mode: config.mode,
    };

    let mut tasks: Vec<(u32, Vec<W>)> = Vec::new();
    for d in config.min_factors..=config.max_factors {
        let seed_len = config.mode.depth(d).min(2);
        let mut state = PrefixState::new(config.limit, Some(d));
        search.seeds(&mut state, d, seed_len, &mut tasks);
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| Error::ResourceLimit(format!("thread pool: {e}")))?;
    let done = AtomicUsize::new(0);
    let total = tasks.len();
    let results: Vec<Vec<CarmichaelEntry<W>>> = pool.install(|| {
        tasks
            .par_iter()
            .map(|(d, seed)| {
                let mut state = PrefixState::new(config.limit, Some(*d));
                for &p in seed {
                    let product = state.product() * p;
                    let l = lcm(state.carry_lcm(), p - W::one())?;
                    state.push_unchecked(p, product, l);
                }
                let mut out = Vec::new();
                search
                    .explore(&mut state, *d, config.mode.depth(*d), &mut out)
                    .map_err(|e| match e {
                        Error::ResourceLimit(m) => {
                            Error::ResourceLimit(format!("d = {d}, subtree {seed:?}: {m}"))
                        }
                        other => other,
                    })?;
                progress(done.fetch_add(1, Ordering::Relaxed) + 1, total);
                Ok(out)
            })
            .collect::<Result<Vec<_>>>()
    })?;

    let mut entries: Vec<CarmichaelEntry<W>> = results.into_iter().flatten().collect();
    entries.sort_unstable_by_key(|e| e.value());
    if let Some(w) = entries.windows(2).find(|w| w[0].value() == w[1].value()) {
        return Err(Error::Integrity(format!(
            "{} generated twice: {:?} and {:?}",
            w[0].value(),
            w[0].factors(),
            w[1].factors()
        )));
    }
    Catalog::from_entries(Some(provenance), entries)
}

struct Search<'a, W> {
    table: &'a PrimeTable,
    limit: W,
    mode: CompletionMode,
}

impl<W: Word> Search<'_, W> {
    /// Admissible children of `state`, ascending.
    fn children<'s>(&'s self, state: &'s PrefixState<W>, d: u32) -> impl Iterator<Item = W> + 's {
        let bound = child_bound(state, d);
        assert!(
            bound.as_wide() <= self.table.limit as u128,
            "prime table too small for bound {bound}"
        );
        let last = state.last().map_or(2, |p| p.as_narrow().expect("sieved"));
        self.table
            .odd_after(last)
            .iter()
            .map(|&p| W::from_u64(p))
            .take_while(move |&p| p <= bound)
            .filter(move |&p| state.admits(p))
    }

    fn seeds(&self, state: &mut PrefixState<W>, d: u32, len: usize, out: &mut Vec<(u32, Vec<W>)>) {
        if state.len() == len {
            out.push((d, state.primes.clone()));
            return;
        }
        let children: Vec<W> = self.children(state, d).collect();
        for p in children {
            let product = state.product() * p;
            let l = lcm(state.carry_lcm(), p - W::one()).expect("lcm below product");
            state.push_unchecked(p, product, l);
            self.seeds(state, d, len, out);
            state.pop();
        }
    }

    fn explore(
        &self,
        state: &mut PrefixState<W>,
        d: u32,
        depth: usize,
        out: &mut Vec<CarmichaelEntry<W>>,
    ) -> Result<()> {
        if state.len() == depth {
            return self.complete(state, d, out);
        }
        let children: Vec<W> = self.children(state, d).collect();
        for p in children {
            let product = state.product() * p;
            let l = lcm(state.carry_lcm(), p - W::one())?;
            state.push_unchecked(p, product, l);
            let r = self.explore(state, d, depth, out);
            state.pop();
            r?;
        }
        Ok(())
    }

    fn complete(
        &self,
        state: &PrefixState<W>,
        d: u32,
        out: &mut Vec<CarmichaelEntry<W>>,
    ) -> Result<()> {
        match self.mode {
            CompletionMode::Basic => {
                for q in final_primes(state)? {
                    out.push(self.verified(state, &[q])?);
                }
            }
            CompletionMode::LastPrime => {
                for q in final_primes_progression(state) {
                    out.push(self.verified(state, &[q])?);
                }
            }
            CompletionMode::LastTwo => {
                let found = last_two_completions(state, d, self.table)?;
                for (q, r) in found {
                    out.push(self.verified(state, &[q, r])?);
                }
            }
        }
        Ok(())
    }

    /// Entry for prefix + tail after a full Korselt re-check.
    fn verified(&self, state: &PrefixState<W>, tail: &[W]) -> Result<CarmichaelEntry<W>> {
        let mut factors = state.primes.clone();
        factors.extend_from_slice(tail);
        let value = tail.iter().fold(state.product(), |acc, &x| acc * x);
        let f = Factorization::from_primes(&factors)?;
        if value >= self.limit || !korselt_check(value, &f)? {
            return Err(Error::Integrity(format!(
                "completion produced non-Carmichael {value} = {f}"
            )));
        }
        Ok(CarmichaelEntry::new_unchecked(value, factors))
    }
}
