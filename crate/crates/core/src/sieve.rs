//! Prime table: primes, smallest prime factors, von Mangoldt values and
//! Chebyshev `psi` prefix sums.
//!
//! Up to `dense_limit` (default 10^7) the table stores one smallest prime
//! factor and one `psi` prefix value per integer. Between `dense_limit` and
//! `limit` only the primes themselves are kept, produced by a segmented
//! sieve; `psi(x)` there is rebuilt per query from cumulative `theta`
//! checkpoints every `THETA_BLOCK` primes plus a short scan.

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const DEFAULT_LIMIT_CAP: u64 = 100_000_000;
pub const DEFAULT_DENSE_LIMIT: u64 = 10_000_000;
pub const DEFAULT_SEGMENT_SIZE: usize = 1 << 20;

const THETA_BLOCK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SieveConfig {
    /// Largest `limit` accepted by [`PrimeTable::build_with`].
    pub limit_cap: u64,
    /// Integers up to this bound get per-integer `spf` and `psi` entries.
    pub dense_limit: u64,
    /// Segment length (in integers) of the segmented sieve.
    pub segment_size: usize,
}

impl Default for SieveConfig {
    fn default() -> Self {
        SieveConfig {
            limit_cap: DEFAULT_LIMIT_CAP,
            dense_limit: DEFAULT_DENSE_LIMIT,
            segment_size: DEFAULT_SEGMENT_SIZE,
        }
    }
}

/// One prime power `value = prime^k`, `k >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct PrimePower {
    pub value: u64,
    pub prime: u64,
}

/// Immutable sieve output. Safe to share between threads.
#[derive(Debug, Clone)]
pub struct PrimeTable<R: Real = f64> {
    limit: u64,
    dense_limit: u64,
    primes: Vec<u32>,
    spf: Vec<u32>,
    psi_prefix: Vec<R>,
    dense_psi: f64,
    sparse_from: usize,
    theta_blocks: Vec<f64>,
}

pub(crate) fn isqrt(x: u64) -> u64 {
    if x < 2 {
        return x;
    }
    let mut r = (x as f64).sqrt() as u64;
    while r.checked_mul(r).is_none_or(|s| s > x) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|s| s <= x) {
        r += 1;
    }
    r
}

impl<R: Real> PrimeTable<R> {
    pub fn build(limit: u64) -> Result<Self> {
        Self::build_with(limit, &SieveConfig::default())
    }

    pub fn build_with(limit: u64, config: &SieveConfig) -> Result<Self> {
        if limit < 2 {
            return Err(Error::Domain(format!("prime table limit must be at least 2, got {limit}")));
        }
        if limit > config.limit_cap {
            return Err(Error::ResourceLimit {
                what: "sieve limit",
                requested: limit,
                cap: config.limit_cap,
                flag: "--limit-cap",
            });
        }
        if limit > u32::MAX as u64 {
            return Err(Error::ResourceLimit {
                what: "sieve limit",
                requested: limit,
                cap: u32::MAX as u64,
                flag: "--limit-cap",
            });
        }
        let dense_limit = limit.min(config.dense_limit.max(isqrt(limit) + 1)).max(2);
        let (primes, spf) = linear_sieve(dense_limit as usize);

        let mut psi_prefix = Vec::with_capacity(dense_limit as usize + 1);
        psi_prefix.push(R::zero());
        psi_prefix.push(R::zero());
        let mut acc = 0.0f64;
        for m in 2..=dense_limit as usize {
            let p = spf[m] as usize;
            let mut r = m;
            while r % p == 0 {
                r /= p;
            }
            if r == 1 {
                acc += (p as f64).ln();
            }
            psi_prefix.push(R::lit(acc));
        }

        let mut table = PrimeTable {
            limit,
            dense_limit,
            sparse_from: primes.len(),
            primes,
            spf,
            psi_prefix,
            dense_psi: acc,
            theta_blocks: vec![0.0],
        };
        if limit > dense_limit {
            table.extend_segmented(config.segment_size.max(1024));
        }
        Ok(table)
    }

    fn extend_segmented(&mut self, segment: usize) {
        let root = isqrt(self.limit);
        let base: Vec<u64> = self.primes.iter().map(|&p| p as u64).take_while(|&p| p <= root).collect();
        let mut marks = vec![false; segment];
        let mut lo = self.dense_limit + 1;
        while lo <= self.limit {
            let hi = (lo + segment as u64 - 1).min(self.limit);
            let len = (hi - lo + 1) as usize;
            marks[..len].iter_mut().for_each(|b| *b = false);
            for &p in &base {
                if p * p > hi {
                    break;
                }
                let mut j = (p * p).max(lo.div_ceil(p) * p);
                while j <= hi {
                    marks[(j - lo) as usize] = true;
                    j += p;
                }
            }
            for (i, &composite) in marks[..len].iter().enumerate() {
                if !composite {
                    self.primes.push((lo + i as u64) as u32);
                }
            }
            lo = hi + 1;
        }

        let mut acc = 0.0f64;
        for (i, &p) in self.primes[self.sparse_from..].iter().enumerate() {
            if i > 0 && i % THETA_BLOCK == 0 {
                self.theta_blocks.push(acc);
            }
            acc += (p as f64).ln();
        }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// Bound up to which `spf` and `psi` are stored per integer.
    pub fn dense_limit(&self) -> u64 {
        self.dense_limit
    }

    pub fn primes(&self) -> &[u32] {
        &self.primes
    }

    /// Primes `<= x` (clamped to the table).
    pub fn primes_upto(&self, x: u64) -> &[u32] {
        let idx = self.primes.partition_point(|&p| (p as u64) <= x);
        &self.primes[..idx]
    }

    /// `pi(x)`, the number of primes `<= x`.
    pub fn prime_count(&self, x: u64) -> Result<u64> {
        self.check(x)?;
        Ok(self.primes_upto(x).len() as u64)
    }

    pub fn is_prime(&self, m: u64) -> Result<bool> {
        self.check(m)?;
        if m <= self.dense_limit {
            Ok(m >= 2 && self.spf[m as usize] as u64 == m)
        } else {
            Ok(self.primes.binary_search(&(m as u32)).is_ok())
        }
    }

    fn check(&self, x: u64) -> Result<()> {
        if x > self.limit {
            Err(Error::OutOfTable { value: x, limit: self.limit })
        } else {
            Ok(())
        }
    }

    /// Returns `p` when `m = p^k` for a prime `p` and `k >= 1`.
    pub fn prime_power_base(&self, m: u64) -> Result<Option<u64>> {
        self.check(m)?;
        if m < 2 {
            return Ok(None);
        }
        let p = if m <= self.dense_limit {
            self.spf[m as usize] as u64
        } else {
            self.primes
                .iter()
                .map(|&p| p as u64)
                .take_while(|&p| p * p <= m)
                .find(|&p| m.is_multiple_of(p))
                .unwrap_or(m)
        };
        let mut r = m;
        while r.is_multiple_of(p) {
            r /= p;
        }
        Ok((r == 1).then_some(p))
    }

    /// von Mangoldt function: `log p` on prime powers `p^k`, zero elsewhere.
    pub fn von_mangoldt(&self, m: u64) -> Result<R> {
        if m == 0 {
            return Err(Error::Domain("von Mangoldt function is defined for m >= 1".into()));
        }
        Ok(match self.prime_power_base(m)? {
            Some(p) => R::from_count(p).ln(),
            None => R::zero(),
        })
    }

    /// Chebyshev `psi(x) = sum_{m <= x} Lambda(m)`; `psi(0) = 0`.
    pub fn chebyshev_psi(&self, x: u64) -> Result<R> {
        self.check(x)?;
        if x <= self.dense_limit {
            return Ok(self.psi_prefix[x as usize]);
        }
        let idx = self.primes.partition_point(|&p| (p as u64) <= x);
        let j = idx - self.sparse_from;
        let block = j / THETA_BLOCK;
        let start = self.sparse_from + block * THETA_BLOCK;
        let mut sum = self.dense_psi + self.theta_blocks[block];
        sum += self.primes[start..idx].iter().map(|&p| (p as f64).ln()).sum::<f64>();
        for &p in &self.primes {
            let p = p as u64;
            if p * p > x {
                break;
            }
            let lp = (p as f64).ln();
            let mut pk = p * p;
            while pk <= x {
                if pk > self.dense_limit {
                    sum += lp;
                }
                match pk.checked_mul(p) {
                    Some(next) => pk = next,
                    None => break,
                }
            }
        }
        Ok(R::lit(sum))
    }

    /// Prime factorization with ascending primes.
    ///
    /// Arguments up to `dense_limit` use the smallest-prime-factor table,
    /// larger ones up to `limit^2` use trial division by table primes.
    pub fn factorize(&self, a: u64) -> Result<Vec<(u64, u32)>> {
        if a == 0 {
            return Err(Error::Domain("cannot factorize 0".into()));
        }
        if (a as u128) > (self.limit as u128) * (self.limit as u128) {
            return Err(Error::OutOfTable { value: a, limit: self.limit });
        }
        let mut out: Vec<(u64, u32)> = Vec::new();
        if a <= self.dense_limit {
            let mut r = a as usize;
            while r > 1 {
                let p = self.spf[r] as usize;
                let mut e = 0;
                while r.is_multiple_of(p) {
                    r /= p;
                    e += 1;
                }
                out.push((p as u64, e));
            }
            return Ok(out);
        }
        let mut r = a;
        for &p in &self.primes {
            let p = p as u64;
            if p * p > r {
                break;
            }
            if r.is_multiple_of(p) {
                let mut e = 0;
                while r.is_multiple_of(p) {
                    r /= p;
                    e += 1;
                }
                out.push((p, e));
            }
        }
        if r > 1 {
            out.push((r, 1));
        }
        Ok(out)
    }

    /// Euler's totient.
    pub fn euler_phi(&self, q: u64) -> Result<u64> {
        Ok(self.factorize(q)?.into_iter().fold(q, |acc, (p, _)| acc / p * (p - 1)))
    }

    /// All prime powers `<= n`, ascending.
    pub fn prime_powers(&self, n: u64) -> Result<Vec<PrimePower>> {
        self.check(n)?;
        let mut out = Vec::new();
        for &p in self.primes_upto(n) {
            let p = p as u64;
            let mut pk = p;
            loop {
                out.push(PrimePower { value: pk, prime: p });
                match pk.checked_mul(p) {
                    Some(next) if next <= n => pk = next,
                    _ => break,
                }
            }
        }
        out.sort_unstable();
        Ok(out)
    }
}

fn linear_sieve(n: usize) -> (Vec<u32>, Vec<u32>) {
    let mut spf = vec![0u32; n + 1];
    let mut primes: Vec<u32> = Vec::with_capacity(if n < 100 { 32 } else { n / 10 });
    for i in 2..=n {
        if spf[i] == 0 {
            spf[i] = i as u32;
            primes.push(i as u32);
        }
        let si = spf[i];
        for &p in &primes {
            let ip = i * p as usize;
            if p > si || ip > n {
                break;
            }
            spf[ip] = p;
        }
    }
    (primes, spf)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial_prime(m: u64) -> bool {
        m >= 2 && (2..).take_while(|d| d * d <= m).all(|d| !m.is_multiple_of(d))
    }

    #[test]
    fn small_tables() {
        let t = PrimeTable::<f64>::build(10).unwrap();
        assert_eq!(t.primes(), &[2, 3, 5, 7]);
        let t = PrimeTable::<f64>::build(2).unwrap();
        assert_eq!(t.primes(), &[2]);
        assert!(matches!(PrimeTable::<f64>::build(1), Err(Error::Domain(_))));
        assert!(matches!(PrimeTable::<f64>::build(DEFAULT_LIMIT_CAP + 1), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn primes_match_trial_division() {
        let t = PrimeTable::<f64>::build(10_000).unwrap();
        let expected: Vec<u32> = (2..=10_000u64).filter(|&m| trial_prime(m)).map(|m| m as u32).collect();
        assert_eq!(t.primes(), expected.as_slice());
        // pi(10^5) by trial division
        let t5 = PrimeTable::<f64>::build(100_000).unwrap();
        let count = (2..=100_000u64).filter(|&m| trial_prime(m)).count() as u64;
        assert_eq!(count, 9592);
        assert_eq!(t5.prime_count(100_000).unwrap(), 9592);
    }

    #[test]
    fn segmented_part_matches_dense_sieve() {
        let cfg = SieveConfig { limit_cap: DEFAULT_LIMIT_CAP, dense_limit: 1000, segment_size: 1024 };
        let seg = PrimeTable::<f64>::build_with(200_000, &cfg).unwrap();
        let dense = PrimeTable::<f64>::build(200_000).unwrap();
        assert_eq!(seg.dense_limit(), 1000);
        assert_eq!(seg.primes(), dense.primes());
        for x in [1000u64, 1001, 1024, 4099, 65_536, 99_991, 150_000, 200_000] {
            let a = seg.chebyshev_psi(x).unwrap();
            let b = dense.chebyshev_psi(x).unwrap();
            assert!((a - b).abs() < 1e-8, "x={x}: {a} vs {b}");
        }
        for a in [1009u64, 1024, 199_999, 3 * 3 * 11_003, 65_536] {
            assert_eq!(seg.factorize(a).unwrap(), dense.factorize(a).unwrap());
            assert_eq!(seg.prime_power_base(a).unwrap(), dense.prime_power_base(a).unwrap());
        }
        assert_eq!(seg.is_prime(199_999).unwrap(), dense.is_prime(199_999).unwrap());
    }

    #[test]
    fn von_mangoldt_examples() {
        let t = PrimeTable::<f64>::build(100).unwrap();
        assert!((t.von_mangoldt(8).unwrap() - 2f64.ln()).abs() < 1e-15);
        assert_eq!(t.von_mangoldt(6).unwrap(), 0.0);
        assert_eq!(t.von_mangoldt(1).unwrap(), 0.0);
        assert!(matches!(t.von_mangoldt(101), Err(Error::OutOfTable { .. })));
        assert!(t.von_mangoldt(0).is_err());
    }

    #[test]
    fn chebyshev_psi_examples() {
        let t = PrimeTable::<f64>::build(100).unwrap();
        assert_eq!(t.chebyshev_psi(1).unwrap(), 0.0);
        // lcm(1..10) = 2520
        assert!((t.chebyshev_psi(10).unwrap() - 2520f64.ln()).abs() < 1e-12);
        assert!(t.chebyshev_psi(101).is_err());
    }

    #[test]
    fn psi_prefix_invariants() {
        let t = PrimeTable::<f64>::build(10_000).unwrap();
        let mut prev = 0.0;
        for x in 1..=10_000u64 {
            let v = t.chebyshev_psi(x).unwrap();
            assert!(v >= prev);
            prev = v;
        }
        // brute force over prime powers
        let mut brute = vec![0.0f64; 10_001];
        for p in (2..=10_000u64).filter(|&m| trial_prime(m)) {
            let mut pk = p;
            while pk <= 10_000 {
                brute[pk as usize] += (p as f64).ln();
                pk *= p;
            }
        }
        let mut acc = 0.0;
        for x in 1..=10_000usize {
            acc += brute[x];
            assert!((t.chebyshev_psi(x as u64).unwrap() - acc).abs() < 1e-9, "x={x}");
            if brute[x] > 0.0 {
                let jump = t.chebyshev_psi(x as u64).unwrap() - t.chebyshev_psi(x as u64 - 1).unwrap();
                assert!((jump - brute[x]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn factorize_examples() {
        let t = PrimeTable::<f64>::build(10_000).unwrap();
        assert_eq!(t.factorize(12).unwrap(), vec![(2, 2), (3, 1)]);
        assert_eq!(t.factorize(1).unwrap(), vec![]);
        assert_eq!(t.factorize(99_460_729).unwrap(), vec![(9973, 2)]);
        assert_eq!(t.factorize(99_999_989).unwrap(), vec![(99_999_989, 1)]);
        assert_eq!(t.factorize(2 * 49_999_991).unwrap(), vec![(2, 1), (49_999_991, 1)]);
        assert!(matches!(t.factorize(100_000_001), Err(Error::OutOfTable { .. })));
        assert!(t.factorize(0).is_err());
    }

    #[test]
    fn euler_phi_examples() {
        let t = PrimeTable::<f64>::build(10_000).unwrap();
        assert_eq!(t.euler_phi(1).unwrap(), 1);
        assert_eq!(t.euler_phi(12).unwrap(), 4);
        assert!(trial_prime(9973));
        assert_eq!(t.euler_phi(9973).unwrap(), 9972);
    }

    #[test]
    fn euler_phi_matches_gcd_count() {
        let t = PrimeTable::<f64>::build(10_000).unwrap();
        for q in 1..=2_000u64 {
            let count = (1..=q).filter(|&a| num_integer::gcd(a, q) == 1).count() as u64;
            assert_eq!(t.euler_phi(q).unwrap(), count, "q={q}");
        }
    }

    #[test]
    fn prime_powers_are_sorted_and_complete() {
        let t = PrimeTable::<f64>::build(100).unwrap();
        let pp: Vec<u64> = t.prime_powers(30).unwrap().iter().map(|p| p.value).collect();
        assert_eq!(pp, vec![2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19, 23, 25, 27, 29]);
    }

    #[test]
    fn f32_table_tracks_f64() {
        let a = PrimeTable::<f32>::build(1000).unwrap();
        let b = PrimeTable::<f64>::build(1000).unwrap();
        let (x, y) = (a.chebyshev_psi(1000).unwrap() as f64, b.chebyshev_psi(1000).unwrap());
        assert!((x - y).abs() / y < 1e-6);
    }
}
