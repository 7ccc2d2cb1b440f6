//! Segmented sieve of Eratosthenes over odd numbers.

/// Default memory budget for a single sieve segment, in bytes.
pub const DEFAULT_SEGMENT_BYTES: usize = 1 << 18;

/// All primes `<= limit`, ascending. Returns an empty vector for `limit < 2`.
pub fn prime_sieve(limit: u64) -> Vec<u64> {
    prime_sieve_segmented(limit, DEFAULT_SEGMENT_BYTES)
}

/// Sieve with an explicit segment size (bytes, one byte per odd number).
pub fn prime_sieve_segmented(limit: u64, segment_bytes: usize) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let mut primes = vec![2u64];
    if limit < 3 {
        return primes;
    }
    let root = crate::arith::isqrt(limit);
    let base = simple_odd_sieve(root);
    let seg_len = segment_bytes.max(64) as u64;

    // Segment covers odd numbers low, low+2, ..., low + 2*(seg_len-1).
    let mut low = 3u64;
    let mut marks = vec![false; seg_len as usize];
    while low <= limit {
        let span = seg_len.min((limit - low) / 2 + 1);
        let high = low + 2 * (span - 1);
        marks[..span as usize].fill(false);
        for &p in &base {
            if p * p > high {
                break;
            }
            let mut start = (p * p).max(low.div_ceil(p) * p);
            if start % 2 == 0 {
                start += p;
            }
            let mut i = (start - low) / 2;
            while i < span {
                marks[i as usize] = true;
                i += p;
            }
        }
        primes.extend(
            (0..span)
                .filter(|&i| !marks[i as usize])
                .map(|i| low + 2 * i),
        );
        match high.checked_add(2) {
            Some(next) => low = next,
            None => break,
        }
    }
    primes
}

/// Odd primes up to `limit` by a plain (non-segmented) sieve.
fn simple_odd_sieve(limit: u64) -> Vec<u64> {
    if limit < 3 {
        return Vec::new();
    }
    // index i stands for 2i + 3
    let n = ((limit - 3) / 2 + 1) as usize;
    let mut composite = vec![false; n];
    let mut i = 0usize;
    loop {
        let p = 2 * i as u64 + 3;
        if p * p > limit {
            break;
        }
        if !composite[i] {
            let mut j = ((p * p - 3) / 2) as usize;
            while j < n {
                composite[j] = true;
                j += p as usize;
            }
        }
        i += 1;
    }
    composite
        .iter()
        .enumerate()
        .filter(|(_, &c)| !c)
        .map(|(i, _)| 2 * i as u64 + 3)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_division_count(limit: u64) -> usize {
        (2..=limit)
            .filter(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
            .count()
    }

    #[test]
    fn small_limits() {
        assert_eq!(prime_sieve(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert_eq!(prime_sieve(2), vec![2]);
        assert_eq!(prime_sieve(3), vec![2, 3]);
        assert!(prime_sieve(1).is_empty());
        assert!(prime_sieve(0).is_empty());
    }

    #[test]
    fn pi_of_a_million() {
        assert_eq!(prime_sieve(1_000_000).len(), 78498);
    }

    #[test]
    fn trial_division_agrees() {
        assert_eq!(prime_sieve(20_000).len(), trial_division_count(20_000));
    }

    #[test]
    fn tiny_segments_agree() {
        for limit in [97u64, 1000, 7919, 65_536] {
            assert_eq!(
                prime_sieve_segmented(limit, 64),
                prime_sieve(limit),
                "{limit}"
            );
        }
    }
}
