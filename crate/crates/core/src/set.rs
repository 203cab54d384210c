//! Finite integer sets and `psi(A) = log lcm(A)`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sieve::PrimeTable;

/// Default digit cap for [`lcm_exact`].
pub const DEFAULT_LCM_DIGIT_CAP: u64 = 10_000;

/// Distinct integers in `[1, n]`, kept sorted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, serde::Serialize)]
pub struct IntegerSet {
    n: u64,
    elements: Vec<u64>,
}

impl IntegerSet {
    /// Sorts and deduplicates; any element outside `[1, n]` is an error.
    pub fn new(n: u64, elements: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut elements: Vec<u64> = elements.into_iter().collect();
        if let Some(&bad) = elements.iter().find(|&&a| a == 0 || a > n) {
            return Err(Error::OutOfRange { value: bad, n });
        }
        elements.sort_unstable();
        elements.dedup();
        Ok(IntegerSet { n, elements })
    }

    pub(crate) fn from_sorted(n: u64, elements: Vec<u64>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(elements.iter().all(|&a| a >= 1 && a <= n));
        IntegerSet { n, elements }
    }

    pub fn empty(n: u64) -> Self {
        IntegerSet { n, elements: Vec::new() }
    }

    /// `{1, ..., n}`.
    pub fn full(n: u64) -> Self {
        IntegerSet { n, elements: (1..=n).collect() }
    }

    /// Parses whitespace-separated positive integers; `#` comments out the
    /// rest of its line.
    pub fn parse(n: u64, text: &str) -> Result<Self> {
        let mut values = Vec::new();
        for line in text.lines() {
            let body = line.split('#').next().unwrap_or("");
            for tok in body.split_whitespace() {
                let v: u64 = tok.parse().map_err(|_| Error::Parse(format!("`{tok}` is not a positive integer")))?;
                values.push(v);
            }
        }
        Self::new(n, values)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.elements
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.elements.iter().copied()
    }

    pub fn max(&self) -> Option<u64> {
        self.elements.last().copied()
    }

    pub fn contains(&self, a: u64) -> bool {
        self.elements.binary_search(&a).is_ok()
    }

    pub fn is_subset(&self, other: &IntegerSet) -> bool {
        self.iter().all(|a| other.contains(a))
    }

    /// Union, with ambient bound the larger of the two.
    pub fn union(&self, other: &IntegerSet) -> IntegerSet {
        let mut merged: Vec<u64> = self.iter().chain(other.iter()).collect();
        merged.sort_unstable();
        merged.dedup();
        IntegerSet { n: self.n.max(other.n), elements: merged }
    }
}

/// `lcm(A)` as a map prime -> maximal exponent.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FactoredLcm {
    exponents: BTreeMap<u64, u32>,
}

impl FactoredLcm {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn of_set<R: Real>(set: &IntegerSet, table: &PrimeTable<R>) -> Result<Self> {
        let mut lcm = FactoredLcm::new();
        for a in set.iter() {
            lcm.include(a, table)?;
        }
        Ok(lcm)
    }

    pub fn include<R: Real>(&mut self, a: u64, table: &PrimeTable<R>) -> Result<()> {
        for (p, e) in table.factorize(a)? {
            let slot = self.exponents.entry(p).or_insert(0);
            *slot = (*slot).max(e);
        }
        Ok(())
    }

    /// Exponent-wise maximum.
    pub fn merge(&mut self, other: &FactoredLcm) {
        for (&p, &e) in &other.exponents {
            let slot = self.exponents.entry(p).or_insert(0);
            *slot = (*slot).max(e);
        }
    }

    pub fn exponents(&self) -> &BTreeMap<u64, u32> {
        &self.exponents
    }

    /// `sum_p e_p log p`, accumulated in ascending prime order.
    pub fn log<R: Real>(&self) -> R {
        self.exponents
            .iter()
            .map(|(&p, &e)| R::from_count(e as u64) * R::from_count(p).ln())
            .fold(R::zero(), |acc, x| acc + x)
    }

    pub fn to_biguint(&self) -> BigUint {
        self.exponents.iter().fold(BigUint::from(1u32), |acc, (&p, &e)| acc * BigUint::from(p).pow(e))
    }
}

/// `psi(A) = sum_p (max_a v_p(a)) log p`; zero for the empty set.
pub fn psi_of_set<R: Real>(set: &IntegerSet, table: &PrimeTable<R>) -> Result<R> {
    Ok(FactoredLcm::of_set(set, table)?.log())
}

/// `psi(A) = sum_{m <= n} Lambda(m) I_A(m)`, where `I_A(m) = 1` iff `A`
/// holds a multiple of `m`. Only prime powers `m` are visited.
pub fn psi_indicator<R: Real>(set: &IntegerSet, table: &PrimeTable<R>) -> Result<R> {
    let n = set.n();
    if n > table.limit() {
        return Err(Error::OutOfTable { value: n, limit: table.limit() });
    }
    if set.is_empty() {
        return Ok(R::zero());
    }
    let mut occupied = vec![false; n as usize + 1];
    for a in set.iter() {
        occupied[a as usize] = true;
    }
    let hit = |m: u64| (m..=n).step_by(m as usize).any(|j| occupied[j as usize]);
    let mut total = R::zero();
    for &p in table.primes_upto(n) {
        let p = p as u64;
        let log_p = R::from_count(p).ln();
        let mut m = p;
        // a multiple of p^(k+1) is a multiple of p^k, so stop at the first miss
        while hit(m) {
            total = total + log_p;
            match m.checked_mul(p) {
                Some(next) if next <= n => m = next,
                _ => break,
            }
        }
    }
    Ok(total)
}

/// Exact `lcm(A)` as a big integer; `1` for the empty set.
pub fn lcm_exact(set: &IntegerSet, digit_cap: u64) -> Result<BigUint> {
    let mut acc = BigUint::from(1u32);
    // 10^cap has about cap * log2(10) bits
    let bit_cap = (digit_cap as f64 * std::f64::consts::LOG2_10).ceil() as u64;
    for a in set.iter() {
        acc = acc.lcm(&BigUint::from(a));
        if acc.bits() > bit_cap + 1 {
            let digits = acc.to_string().len() as u64;
            if digits > digit_cap {
                return Err(Error::ResourceLimit {
                    what: "lcm digits",
                    requested: digits,
                    cap: digit_cap,
                    flag: "--lcm-digit-cap",
                });
            }
        }
    }
    Ok(acc)
}

/// Natural log of a big integer, accurate to double precision.
pub fn biguint_ln(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        let f: f64 = num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::INFINITY);
        if f.is_finite() {
            return f.ln();
        }
    }
    let shift = bits - 64;
    let top = num_traits::ToPrimitive::to_f64(&(x >> shift)).expect("64-bit prefix");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> PrimeTable<f64> {
        PrimeTable::build(1000).unwrap()
    }

    #[test]
    fn ingestion_sorts_dedups_and_rejects() {
        let s = IntegerSet::new(10, [5, 2, 5, 10]).unwrap();
        assert_eq!(s.as_slice(), &[2, 5, 10]);
        assert_eq!(IntegerSet::new(10, [11]), Err(Error::OutOfRange { value: 11, n: 10 }));
        assert_eq!(IntegerSet::new(10, [0]), Err(Error::OutOfRange { value: 0, n: 10 }));
    }

    #[test]
    fn parse_with_comments() {
        let s = IntegerSet::parse(10, "# header\n1 2 3\n 10\t4 # trailing\n\n").unwrap();
        assert_eq!(s.as_slice(), &[1, 2, 3, 4, 10]);
        assert!(matches!(IntegerSet::parse(10, "1 x"), Err(Error::Parse(_))));
        assert!(matches!(IntegerSet::parse(10, "-3"), Err(Error::Parse(_))));
    }

    #[test]
    fn psi_examples() {
        let t = table();
        let empty = IntegerSet::empty(10);
        assert_eq!(psi_of_set(&empty, &t).unwrap(), 0.0);
        assert_eq!(psi_indicator(&empty, &t).unwrap(), 0.0);
        let full = IntegerSet::full(10);
        assert!((psi_of_set(&full, &t).unwrap() - 2520f64.ln()).abs() < 1e-12);
        assert!((psi_indicator(&full, &t).unwrap() - t.chebyshev_psi(10).unwrap()).abs() < 1e-12);
        let s = IntegerSet::new(10, [2, 5, 10]).unwrap();
        assert!((psi_of_set(&s, &t).unwrap() - 10f64.ln()).abs() < 1e-12);
        let four = IntegerSet::new(10, [4]).unwrap();
        assert!((psi_indicator(&four, &t).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn indicator_needs_table_cover() {
        let t = PrimeTable::<f64>::build(10).unwrap();
        let s = IntegerSet::new(20, [3]).unwrap();
        assert!(matches!(psi_indicator(&s, &t), Err(Error::OutOfTable { .. })));
        // factorization route accepts values up to limit^2
        assert!((psi_of_set(&s, &t).unwrap() - 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn lcm_exact_examples() {
        assert_eq!(lcm_exact(&IntegerSet::full(10), 100).unwrap(), BigUint::from(2520u32));
        assert_eq!(lcm_exact(&IntegerSet::new(10, [7]).unwrap(), 100).unwrap(), BigUint::from(7u32));
        assert_eq!(lcm_exact(&IntegerSet::new(20, [6, 10, 15]).unwrap(), 100).unwrap(), BigUint::from(30u32));
        assert_eq!(lcm_exact(&IntegerSet::empty(5), 100).unwrap(), BigUint::from(1u32));
        assert!(matches!(lcm_exact(&IntegerSet::full(200), 10), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn factored_lcm_matches_big_integer() {
        let t = table();
        let s = IntegerSet::new(1000, [12, 18, 35, 999, 512, 1000]).unwrap();
        let f = FactoredLcm::of_set(&s, &t).unwrap();
        assert_eq!(f.to_biguint(), lcm_exact(&s, 1000).unwrap());
        let mut a = FactoredLcm::of_set(&IntegerSet::new(1000, [12]).unwrap(), &t).unwrap();
        a.merge(&FactoredLcm::of_set(&IntegerSet::new(1000, [18]).unwrap(), &t).unwrap());
        assert_eq!(a.to_biguint(), BigUint::from(36u32));
    }

    #[test]
    fn biguint_ln_large() {
        let x = BigUint::from(2u32).pow(5000);
        assert!((biguint_ln(&x) - 5000.0 * 2f64.ln()).abs() < 1e-9);
        assert!((biguint_ln(&BigUint::from(2520u32)) - 2520f64.ln()).abs() < 1e-15);
    }
}
