//! The prime pool of the median rule and its seeded samplers.

use crate::error::{Error, Result};
use crate::rng::SeededRng;

/// Largest supported budget parameter.
pub const MAX_N: u64 = 1_000_000_000;
const SEGMENT_THRESHOLD: u64 = 1_000_000;
const SEGMENT_LEN: u64 = 1 << 18;

/// All primes in the closed range `[ceil(n/2) + 1, n]`, ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimePool {
    n: u64,
    primes: Vec<u64>,
}

impl PrimePool {
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn len(&self) -> usize {
        self.primes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.primes.is_empty()
    }

    /// Lower end of the range, `ceil(n/2) + 1`.
    pub fn lower(&self) -> u64 {
        lower_end(self.n)
    }
}

fn lower_end(n: u64) -> u64 {
    n.div_ceil(2) + 1
}

pub fn primes_in_range(n: u64) -> Result<PrimePool> {
    if n < 2 {
        return Err(Error::Domain(format!("prime pool needs n >= 2, got {n}")));
    }
    if n > MAX_N {
        return Err(Error::Domain(format!("prime pool supports n <= {MAX_N}, got {n}")));
    }
    let lo = lower_end(n).min(n);
    let primes = if n <= SEGMENT_THRESHOLD {
        simple_sieve(n).into_iter().filter(|&p| p >= lo).collect()
    } else {
        segmented_sieve(lo, n)
    };
    if primes.is_empty() {
        // Bertrand's postulate rules this out.
        return Err(Error::Internal(format!("empty prime pool for n = {n}")));
    }
    Ok(PrimePool { n, primes })
}

/// Primes up to and including `limit`.
pub(crate) fn simple_sieve(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut i = 2;
    while i * i <= limit {
        if !composite[i] {
            let mut j = i * i;
            while j <= limit {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    (2..=limit).filter(|&k| !composite[k]).map(|k| k as u64).collect()
}

/// Primes in `[lo, hi]`, sieving one window at a time.
pub(crate) fn segmented_sieve(lo: u64, hi: u64) -> Vec<u64> {
    let lo = lo.max(2);
    if lo > hi {
        return Vec::new();
    }
    let base = simple_sieve(isqrt(hi));
    let mut out = Vec::new();
    let mut start = lo;
    let mut composite = vec![false; SEGMENT_LEN as usize];
    while start <= hi {
        let end = hi.min(start + SEGMENT_LEN - 1);
        let len = (end - start + 1) as usize;
        composite[..len].iter_mut().for_each(|c| *c = false);
        for &p in &base {
            if p * p > end {
                break;
            }
            let mut m = (start.div_ceil(p) * p).max(p * p);
            while m <= end {
                composite[(m - start) as usize] = true;
                m += p;
            }
        }
        out.extend((0..len).filter(|&i| !composite[i]).map(|i| start + i as u64));
        start = end + 1;
    }
    out
}

fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Draws a prime uniformly from the pool.
pub fn sample_prime(pool: &PrimePool, rng: &mut SeededRng) -> u64 {
    let idx = rng.below(pool.primes.len() as u64) as usize;
    pool.primes[idx]
}

/// Draws a generating vector with coordinates independently uniform on `1..=p-1`.
pub fn sample_generator(p: u64, d: usize, rng: &mut SeededRng) -> Result<Vec<u64>> {
    if p < 2 {
        return Err(Error::Domain(format!("modulus must be at least 2, got {p}")));
    }
    if d == 0 {
        return Err(Error::Domain("dimension must be at least 1".into()));
    }
    Ok((0..d).map(|_| rng.range_inclusive(1, p - 1)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn is_prime_trial(k: u64) -> bool {
        if k < 2 {
            return false;
        }
        let mut i = 2;
        while i * i <= k {
            if k % i == 0 {
                return false;
            }
            i += 1;
        }
        true
    }

    fn trial_pool(n: u64) -> Vec<u64> {
        (lower_end(n).min(n)..=n).filter(|&k| is_prime_trial(k)).collect()
    }

    #[test]
    fn small_pools() {
        assert_eq!(primes_in_range(10).unwrap().primes(), &[7]);
        assert_eq!(primes_in_range(20).unwrap().primes(), &[11, 13, 17, 19]);
        assert_eq!(primes_in_range(2).unwrap().primes(), &[2]);
        assert_eq!(primes_in_range(3).unwrap().primes(), &[3]);
    }

    #[test]
    fn rejects_out_of_range_n() {
        assert!(matches!(primes_in_range(1), Err(Error::Domain(_))));
        assert!(matches!(primes_in_range(MAX_N + 1), Err(Error::Domain(_))));
    }

    #[test]
    fn matches_trial_division_exhaustively() {
        // The full sieve over every n would be quadratic; reuse one sieve.
        let all = simple_sieve(100_000);
        for n in 2..=100_000u64 {
            let lo = lower_end(n).min(n);
            let a = all.partition_point(|&p| p < lo);
            let b = all.partition_point(|&p| p <= n);
            assert!(b > a, "Bertrand fails at n = {n}");
            if n <= 2_000 || n % 997 == 0 {
                assert_eq!(&all[a..b], trial_pool(n).as_slice(), "n = {n}");
                assert_eq!(primes_in_range(n).unwrap().primes(), &all[a..b]);
            }
        }
        assert!(all.iter().all(|&p| is_prime_trial(p)));
        assert_eq!(all.len(), 9592);
    }

    #[test]
    fn segmented_agrees_with_simple() {
        let simple: Vec<u64> = simple_sieve(2_000_000).into_iter().filter(|&p| p >= 1_000_001).collect();
        assert_eq!(segmented_sieve(1_000_001, 2_000_000), simple);
        assert_eq!(segmented_sieve(2, 1000), simple_sieve(1000));
        let pool = primes_in_range(2_000_000).unwrap();
        assert_eq!(pool.primes(), simple.as_slice());
    }

    #[test]
    fn singleton_pool_ignores_seed() {
        let pool = primes_in_range(10).unwrap();
        for seed in 0..50 {
            assert_eq!(sample_prime(&pool, &mut SeededRng::new(seed, 0)), 7);
        }
    }

    #[test]
    fn forced_generator_for_p2() {
        let mut rng = SeededRng::new(3, 9);
        assert_eq!(sample_generator(2, 3, &mut rng).unwrap(), vec![1, 1, 1]);
    }

    #[test]
    fn generator_coordinates_in_range() {
        let mut rng = SeededRng::new(11, 0);
        for p in [3u64, 5, 13, 101] {
            let z = sample_generator(p, 50, &mut rng).unwrap();
            assert!(z.iter().all(|&c| (1..p).contains(&c)));
        }
    }

    #[test]
    fn sampling_is_reproducible() {
        let pool = primes_in_range(1000).unwrap();
        let draw = |seed| {
            let mut rng = SeededRng::new(seed, 4);
            (0..100).map(|_| sample_prime(&pool, &mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(17), draw(17));
        assert_ne!(draw(17), draw(18));
    }
}
