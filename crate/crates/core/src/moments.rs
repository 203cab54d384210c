//! Exact moments of `psi` under both random models, plus the tail and
//! transfer inequalities that connect them.
//!
//! Bernoulli model `S(n; delta)`: `psi(A) = sum_m Lambda(m) I_A(m)` and
//! `P(I_A(m) = 1) = 1 - (1 - delta)^floor(n/m)`. Uniform `k`-subsets replace
//! the miss probability with the hypergeometric ratio
//! `R(q) = C(n - q, k) / C(n, k)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::{hit_probability, miss_power, Real};
use crate::sieve::PrimeTable;

pub const DEFAULT_VARIANCE_CAP: u64 = 30_000;
pub const DEFAULT_UNIFORM_PAIR_CAP: u64 = 5_000;
pub const DEFAULT_BINOMIAL_TAIL_CAP: u64 = 10_000;

/// Grouped sums stop once the remaining tail is below this absolute bound.
pub const GROUPED_TAIL_TOLERANCE: f64 = 1e-12;

/// Caps for the quadratic (pairwise) and exact-summation routines.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MomentCaps {
    pub variance_pairwise: u64,
    pub uniform_pairwise: u64,
    pub binomial_tail: u64,
}

impl Default for MomentCaps {
    fn default() -> Self {
        MomentCaps {
            variance_pairwise: DEFAULT_VARIANCE_CAP,
            uniform_pairwise: DEFAULT_UNIFORM_PAIR_CAP,
            binomial_tail: DEFAULT_BINOMIAL_TAIL_CAP,
        }
    }
}

fn check_delta<R: Real>(delta: R) -> Result<()> {
    if delta >= R::zero() && delta <= R::one() {
        Ok(())
    } else {
        Err(Error::Domain(format!("delta must lie in [0, 1], got {delta}")))
    }
}

fn check_table<R: Real>(n: u64, table: &PrimeTable<R>) -> Result<()> {
    if n > table.limit() {
        Err(Error::OutOfTable { value: n, limit: table.limit() })
    } else {
        Ok(())
    }
}

fn check_k(n: u64, k: u64) -> Result<()> {
    if k > n {
        Err(Error::Domain(format!("k = {k} exceeds n = {n}")))
    } else {
        Ok(())
    }
}

/// `E psi = sum_{m <= n} Lambda(m) (1 - (1 - delta)^floor(n/m))`.
pub fn expectation_bernoulli_direct<R: Real>(n: u64, delta: R, table: &PrimeTable<R>) -> Result<R> {
    check_delta(delta)?;
    check_table(n, table)?;
    let log_keep = (-delta).ln_1p();
    let mut total = R::zero();
    for pp in table.prime_powers(n)? {
        total = total + R::from_count(pp.prime).ln() * hit_probability(log_keep, n / pp.value);
    }
    Ok(total)
}

/// Same expectation summed over the blocks where `floor(n/m) = r`:
/// `E psi = delta * sum_{r >= 1} psi(n/r) (1 - delta)^(r-1)`.
pub fn expectation_bernoulli_grouped<R: Real>(n: u64, delta: R, table: &PrimeTable<R>) -> Result<R> {
    check_delta(delta)?;
    check_table(n, table)?;
    if delta == R::zero() {
        return Ok(R::zero());
    }
    let psi_n = table.chebyshev_psi(n)?;
    if delta == R::one() {
        return Ok(psi_n);
    }
    let log_keep = (-delta).ln_1p();
    let tol = R::lit(GROUPED_TAIL_TOLERANCE);
    let mut total = R::zero();
    for r in 1..=n / 2 {
        let weight = miss_power(log_keep, r - 1);
        if weight * psi_n < tol {
            break;
        }
        total = total + table.chebyshev_psi(n / r)? * weight;
    }
    Ok(delta * total)
}

/// `E(I_m I_l)` in `S(n; delta)` for prime powers `m`, `l`:
/// `1 - x^qm - x^ql + x^(qm + ql - qg)`, `x = 1 - delta`, `qg = floor(n / lcm(m, l))`.
pub fn pair_indicator_expectation<R: Real>(m: u64, l: u64, n: u64, delta: R) -> R {
    let (qm, ql, qg) = pair_quotients(m, l, n);
    let log_keep = (-delta).ln_1p();
    R::one() - miss_power(log_keep, qm) - miss_power(log_keep, ql) + miss_power(log_keep, qm + ql - qg)
}

fn pair_quotients(m: u64, l: u64, n: u64) -> (u64, u64, u64) {
    let g = num_integer::gcd(m, l) as u128;
    let lcm = m as u128 / g * l as u128;
    (n / m, n / l, (n as u128 / lcm) as u64)
}

/// `Cov(I_m, I_l) = x^(qm + ql - qg) (1 - x^qg)`.
fn pair_covariance<R: Real>(log_keep: R, qm: u64, ql: u64, qg: u64) -> R {
    if qg == 0 {
        return R::zero();
    }
    miss_power(log_keep, qm + ql - qg) * hit_probability(log_keep, qg)
}

/// `V psi = sum_{m, l} Lambda(m) Lambda(l) Cov(I_m, I_l)` over prime powers.
///
/// Pairs with `lcm(m, l) > n` have zero covariance and are skipped, so only
/// same-prime pairs and coprime pairs with `m l <= n` are visited.
pub fn variance_bernoulli_exact<R: Real>(n: u64, delta: R, table: &PrimeTable<R>, cap: u64) -> Result<R> {
    check_delta(delta)?;
    if n > cap {
        return Err(Error::ResourceLimit { what: "pairwise variance n", requested: n, cap, flag: "--pairwise-cap" });
    }
    check_table(n, table)?;
    if delta == R::zero() || delta == R::one() {
        return Ok(R::zero());
    }
    let log_keep = (-delta).ln_1p();
    let pps = table.prime_powers(n)?;
    let two = R::lit(2.0);
    let mut total = R::zero();
    for (i, a) in pps.iter().enumerate() {
        let la = R::from_count(a.prime).ln();
        let qa = n / a.value;
        // diagonal
        total = total + la * la * pair_covariance(log_keep, qa, qa, qa);
        // higher powers of the same prime: lcm is the higher power
        let mut hi = a.value;
        while let Some(next) = hi.checked_mul(a.prime).filter(|&v| v <= n) {
            hi = next;
            total = total + two * la * la * pair_covariance(log_keep, qa, n / hi, n / hi);
        }
        // coprime pairs need a common multiple <= n
        for b in &pps[i + 1..] {
            if a.value.saturating_mul(b.value) > n {
                break;
            }
            if b.prime == a.prime {
                continue;
            }
            let lb = R::from_count(b.prime).ln();
            let qg = n / (a.value * b.value);
            total = total + two * la * lb * pair_covariance(log_keep, qa, n / b.value, qg);
        }
    }
    Ok(total)
}

/// Log of the hypergeometric miss ratio `C(n-q, k)/C(n, k)` for
/// `q = 0..=n`, or `None` where the ratio is exactly zero (`n - q < k`).
fn log_miss_ratios<R: Real>(n: u64, k: u64) -> Vec<Option<R>> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = R::zero();
    out.push(Some(acc));
    for q in 1..=n {
        let i = q - 1;
        if n - q < k {
            out.push(None);
        } else {
            acc = acc + R::from_count(n - k - i).ln() - R::from_count(n - i).ln();
            out.push(Some(acc));
        }
    }
    out
}

/// Exact mean of `psi` over all `k`-subsets of `[1, n]`:
/// `sum_m Lambda(m) (1 - C(n - floor(n/m), k) / C(n, k))`.
pub fn expectation_uniform_k<R: Real>(n: u64, k: u64, table: &PrimeTable<R>) -> Result<R> {
    check_k(n, k)?;
    check_table(n, table)?;
    let pps = table.prime_powers(n)?;
    // walk m downwards so q = floor(n/m) grows and the log ratio extends
    let mut q_done = 0u64;
    let mut log_ratio = Some(R::zero());
    let mut total = R::zero();
    for pp in pps.iter().rev() {
        let q = n / pp.value;
        while q_done < q {
            let i = q_done;
            q_done += 1;
            log_ratio = match log_ratio {
                Some(acc) if n - q_done >= k => Some(acc + R::from_count(n - k - i).ln() - R::from_count(n - i).ln()),
                _ => None,
            };
        }
        let hit = match log_ratio {
            Some(l) => -l.exp_m1(),
            None => R::one(),
        };
        total = total + R::from_count(pp.prime).ln() * hit;
    }
    Ok(total)
}

/// Uniform mean over the breakpoints `n/q`:
/// `sum_{q >= 1} psi(n/q) (R(q-1) - R(q))`, with
/// `R(q-1) - R(q) = R(q-1) k / (n - q + 1)`.
///
/// Needs only `O(n/k)` values of Chebyshev's function, which makes it usable
/// when the table is sparse above `dense_limit`.
pub fn expectation_uniform_k_grouped<R: Real>(n: u64, k: u64, table: &PrimeTable<R>) -> Result<R> {
    check_k(n, k)?;
    check_table(n, table)?;
    if k == 0 {
        return Ok(R::zero());
    }
    let psi_n = table.chebyshev_psi(n)?;
    let tol = R::lit(GROUPED_TAIL_TOLERANCE);
    let kr = R::from_count(k);
    let mut log_prev = R::zero();
    let mut total = R::zero();
    for q in 1..=n / 2 {
        let prev = log_prev.exp();
        if prev * psi_n < tol {
            break;
        }
        total = total + table.chebyshev_psi(n / q)? * prev * kr / R::from_count(n - q + 1);
        if n - q < k {
            break;
        }
        log_prev = log_prev + R::from_count(n - k - (q - 1)).ln() - R::from_count(n - (q - 1)).ln();
    }
    Ok(total)
}

/// Exact mean of `psi^2` over all `k`-subsets:
/// `sum_{m, l} Lambda(m) Lambda(l) (1 - R(qm) - R(ql) + R(qm + ql - qg))`.
pub fn second_moment_uniform_k<R: Real>(n: u64, k: u64, table: &PrimeTable<R>, cap: u64) -> Result<R> {
    check_k(n, k)?;
    if n > cap {
        return Err(Error::ResourceLimit {
            what: "pairwise uniform second moment n",
            requested: n,
            cap,
            flag: "--pairwise-cap",
        });
    }
    check_table(n, table)?;
    let ratio: Vec<R> = log_miss_ratios::<R>(n, k).into_iter().map(|l| l.map_or(R::zero(), |l| l.exp())).collect();
    let pps = table.prime_powers(n)?;
    let logs: Vec<R> = pps.iter().map(|pp| R::from_count(pp.prime).ln()).collect();
    let two = R::lit(2.0);
    let mut total = R::zero();
    for (i, a) in pps.iter().enumerate() {
        let qa = n / a.value;
        let hit_a = R::one() - ratio[qa as usize];
        total = total + logs[i] * logs[i] * hit_a;
        for (j, b) in pps.iter().enumerate().skip(i + 1) {
            let (qm, ql, qg) = pair_quotients(a.value, b.value, n);
            let both = R::one() - ratio[qm as usize] - ratio[ql as usize] + ratio[(qm + ql - qg) as usize];
            total = total + two * logs[i] * logs[j] * both;
        }
    }
    Ok(total)
}

/// `2 exp(-r^2 / (4k))`.
pub fn chernoff_bound(k: u64, r: f64) -> f64 {
    2.0 * (-(r * r) / (4.0 * k as f64)).exp()
}

fn log_factorials(n: u64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n as usize + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..=n {
        acc += (i as f64).ln();
        out.push(acc);
    }
    out
}

/// `P(| |A| - n delta | >= r)` for `|A| ~ Bin(n, delta)`, summed exactly in
/// log space. A mean `n delta` within `1e-9` of an integer is snapped to it.
pub fn binomial_tail_exact(n: u64, delta: f64, r: f64, cap: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::Domain(format!("delta must lie in [0, 1], got {delta}")));
    }
    if n > cap {
        return Err(Error::ResourceLimit { what: "binomial tail n", requested: n, cap, flag: "the `cap` argument" });
    }
    let mut mean = n as f64 * delta;
    if (mean - mean.round()).abs() < 1e-9 {
        mean = mean.round();
    }
    if delta == 0.0 || delta == 1.0 {
        return Ok(if r <= 0.0 { 1.0 } else { 0.0 });
    }
    let lf = log_factorials(n);
    let (ld, lk) = (delta.ln(), (-delta).ln_1p());
    let total = (0..=n)
        .filter(|&j| (j as f64 - mean).abs() >= r)
        .map(|j| {
            let lc = lf[n as usize] - lf[j as usize] - lf[(n - j) as usize];
            (lc + j as f64 * ld + (n - j) as f64 * lk).exp()
        })
        .sum::<f64>();
    Ok(total.min(1.0))
}

/// Distance between the Bernoulli moment at `delta = k/n` and the uniform
/// `k`-subset moment, next to the reference scale `k^(s-1/2) log^(s+1/2) n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TransferGap {
    pub s: u32,
    pub bernoulli: f64,
    pub uniform: f64,
    pub gap: f64,
    pub normalizer: f64,
}

impl TransferGap {
    pub fn ratio(&self) -> Option<f64> {
        (self.normalizer > 0.0).then(|| self.gap / self.normalizer)
    }
}

pub fn transfer_gap<R: Real>(n: u64, k: u64, table: &PrimeTable<R>, s: u32, caps: &MomentCaps) -> Result<TransferGap> {
    check_k(n, k)?;
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let delta = R::from_count(k) / R::from_count(n);
    let (bernoulli, uniform) = match s {
        1 => (expectation_bernoulli_direct(n, delta, table)?, expectation_uniform_k(n, k, table)?),
        2 => {
            let e = expectation_bernoulli_direct(n, delta, table)?;
            let v = variance_bernoulli_exact(n, delta, table, caps.variance_pairwise)?;
            (v + e * e, second_moment_uniform_k(n, k, table, caps.uniform_pairwise)?)
        }
        _ => return Err(Error::Domain(format!("transfer moment s must be 1 or 2, got {s}"))),
    };
    let (bernoulli, uniform) = (bernoulli.as_f64(), uniform.as_f64());
    let sf = s as f64;
    Ok(TransferGap {
        s,
        bernoulli,
        uniform,
        gap: (bernoulli - uniform).abs(),
        normalizer: (k as f64).powf(sf - 0.5) * (n as f64).ln().powf(sf + 0.5),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Direct,
    Grouped,
    Pairwise,
    Oracle,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Direct => "direct",
            Method::Grouped => "grouped",
            Method::Pairwise => "pairwise",
            Method::Oracle => "oracle",
        }
    }
}

/// `delta` for the Bernoulli model, `k` for the uniform one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum ModelParam {
    Delta(f64),
    K(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentReport {
    pub n: u64,
    pub delta_or_k: ModelParam,
    pub expectation: f64,
    pub second_moment: Option<f64>,
    pub variance: Option<f64>,
    pub method: Method,
    /// A slightly negative variance (rounding) was clamped to zero.
    #[serde(skip)]
    pub clamped: bool,
}

impl MomentReport {
    fn with_moments(n: u64, param: ModelParam, expectation: f64, second: Option<f64>, method: Method) -> Self {
        let mut clamped = false;
        let variance = second.map(|s| {
            let v = s - expectation * expectation;
            if v < 0.0 && v >= -1e-9 * (1.0 + s.abs()) {
                clamped = true;
                0.0
            } else {
                v
            }
        });
        MomentReport { n, delta_or_k: param, expectation, second_moment: second, variance, method, clamped }
    }

    pub fn bernoulli_expectation<R: Real>(n: u64, delta: R, table: &PrimeTable<R>, method: Method) -> Result<Self> {
        let e = match method {
            Method::Grouped => expectation_bernoulli_grouped(n, delta, table)?,
            _ => expectation_bernoulli_direct(n, delta, table)?,
        };
        let method = if method == Method::Grouped { Method::Grouped } else { Method::Direct };
        Ok(Self::with_moments(n, ModelParam::Delta(delta.as_f64()), e.as_f64(), None, method))
    }

    pub fn bernoulli_variance<R: Real>(n: u64, delta: R, table: &PrimeTable<R>, cap: u64) -> Result<Self> {
        let e = expectation_bernoulli_direct(n, delta, table)?.as_f64();
        let v = variance_bernoulli_exact(n, delta, table, cap)?.as_f64();
        Ok(MomentReport {
            n,
            delta_or_k: ModelParam::Delta(delta.as_f64()),
            expectation: e,
            second_moment: Some(v + e * e),
            variance: Some(v),
            method: Method::Pairwise,
            clamped: false,
        })
    }

    pub fn uniform<R: Real>(n: u64, k: u64, table: &PrimeTable<R>, second_moment: bool, cap: u64) -> Result<Self> {
        let mean = if n <= table.dense_limit() {
            expectation_uniform_k(n, k, table)?
        } else {
            expectation_uniform_k_grouped(n, k, table)?
        }
        .as_f64();
        if second_moment {
            let s = second_moment_uniform_k(n, k, table, cap)?.as_f64();
            Ok(Self::with_moments(n, ModelParam::K(k), mean, Some(s), Method::Pairwise))
        } else {
            let method = if n <= table.dense_limit() { Method::Direct } else { Method::Grouped };
            Ok(Self::with_moments(n, ModelParam::K(k), mean, None, method))
        }
    }

    /// Moments computed by full enumeration.
    pub fn oracle(n: u64, param: ModelParam, expectation: f64, second_moment: f64) -> Self {
        Self::with_moments(n, param, expectation, Some(second_moment), Method::Oracle)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LN2: f64 = std::f64::consts::LN_2;

    fn table(n: u64) -> PrimeTable<f64> {
        PrimeTable::build(n.max(2)).unwrap()
    }

    #[test]
    fn bernoulli_expectation_examples() {
        let t = table(100);
        assert_eq!(expectation_bernoulli_direct(1, 0.3, &t).unwrap(), 0.0);
        assert!((expectation_bernoulli_direct(2, 0.5, &t).unwrap() - LN2 / 2.0).abs() < 1e-15);
        assert!((expectation_bernoulli_grouped(2, 0.5, &t).unwrap() - LN2 / 2.0).abs() < 1e-15);
        assert_eq!(expectation_bernoulli_grouped(1, 0.3, &t).unwrap(), 0.0);
        assert!(expectation_bernoulli_direct(2, 1.5, &t).is_err());
        assert!(matches!(expectation_bernoulli_direct(101, 0.5, &t), Err(Error::OutOfTable { .. })));
    }

    #[test]
    fn delta_endpoints() {
        let t = table(50);
        let psi = t.chebyshev_psi(50).unwrap();
        assert_eq!(expectation_bernoulli_direct(50, 0.0, &t).unwrap(), 0.0);
        assert!((expectation_bernoulli_direct(50, 1.0, &t).unwrap() - psi).abs() < 1e-12);
        assert!((expectation_bernoulli_grouped(50, 1.0, &t).unwrap() - psi).abs() < 1e-12);
        assert_eq!(variance_bernoulli_exact(50, 1.0, &t, 100).unwrap(), 0.0);
    }

    #[test]
    fn pair_expectation_examples() {
        // multiples {2,4,6} and {3,6}
        assert!((pair_indicator_expectation(2, 3, 6, 0.5f64) - 0.6875).abs() < 1e-15);
        let x: f64 = 0.7;
        for m in [2u64, 4, 8, 9] {
            let q = 30 / m;
            let single = 1.0 - x.powi(q as i32);
            assert!((pair_indicator_expectation(m, m, 30, 0.3) - single).abs() < 1e-14);
        }
        // coprime, no common multiple <= n
        let (qm, ql) = (30 / 7, 30 / 5);
        let expected = 1.0 - x.powi(qm) - x.powi(ql) + x.powi(qm + ql);
        assert!((pair_indicator_expectation(7, 5, 30, 0.3) - expected).abs() < 1e-14);
    }

    #[test]
    fn variance_examples() {
        let t = table(100);
        let v = variance_bernoulli_exact(2, 0.5, &t, 100).unwrap();
        assert!((v - LN2 * LN2 / 4.0).abs() < 1e-15);
        assert_eq!(variance_bernoulli_exact(1, 0.5, &t, 100).unwrap(), 0.0);
        assert!(matches!(variance_bernoulli_exact(101, 0.5, &t, 100), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn variance_skipping_matches_full_double_sum() {
        // the full double sum over all prime-power pairs, zero terms included
        let t = table(400);
        for &(n, delta) in &[(60u64, 0.2f64), (150, 0.05), (400, 0.5)] {
            let pps = t.prime_powers(n).unwrap();
            let mut full = 0.0;
            for a in &pps {
                for b in &pps {
                    let ea = 1.0 - (1.0 - delta).powi((n / a.value) as i32);
                    let eb = 1.0 - (1.0 - delta).powi((n / b.value) as i32);
                    let eab = pair_indicator_expectation(a.value, b.value, n, delta);
                    full += (a.prime as f64).ln() * (b.prime as f64).ln() * (eab - ea * eb);
                }
            }
            let fast = variance_bernoulli_exact(n, delta, &t, 1000).unwrap();
            assert!((fast - full).abs() < 1e-9 * (1.0 + full), "n={n}: {fast} vs {full}");
        }
    }

    #[test]
    fn uniform_mean_examples() {
        let t = table(100);
        assert_eq!(expectation_uniform_k(4, 0, &t).unwrap(), 0.0);
        assert!((expectation_uniform_k(4, 4, &t).unwrap() - 12f64.ln()).abs() < 1e-14);
        let six = 6912f64.ln() / 6.0;
        assert!((expectation_uniform_k(4, 2, &t).unwrap() - six).abs() < 1e-14);
        assert!((expectation_uniform_k_grouped(4, 2, &t).unwrap() - six).abs() < 1e-14);
        assert!(expectation_uniform_k(4, 5, &t).is_err());
    }

    #[test]
    fn uniform_grouped_matches_direct() {
        let t = table(100_000);
        for &(n, k) in &[(100_000u64, 300u64), (100_000, 50_000), (5_000, 1), (5_000, 5_000), (777, 13)] {
            let d = expectation_uniform_k(n, k, &t).unwrap();
            let g = expectation_uniform_k_grouped(n, k, &t).unwrap();
            assert!((d - g).abs() <= 1e-9 * d.max(1.0), "n={n} k={k}: {d} vs {g}");
        }
    }

    #[test]
    fn uniform_second_moment_examples() {
        let t = table(100);
        let l = |x: f64| x.ln().powi(2);
        let expected = (l(2.0) + l(3.0) + 2.0 * l(4.0) + l(6.0) + l(12.0)) / 6.0;
        assert!((second_moment_uniform_k(4, 2, &t, 100).unwrap() - expected).abs() < 1e-13);
        assert_eq!(second_moment_uniform_k(9, 0, &t, 100).unwrap(), 0.0);
        assert!(matches!(second_moment_uniform_k(101, 2, &t, 100), Err(Error::ResourceLimit { .. })));
    }

    #[test]
    fn chernoff_examples() {
        assert!((chernoff_bound(100, 20.0) - 2.0 * (-1f64).exp()).abs() < 1e-15);
        assert!((chernoff_bound(5, 1e-12) - 2.0).abs() < 1e-12);
    }

    #[test]
    fn binomial_tail_examples() {
        assert_eq!(binomial_tail_exact(10, 0.5, 11.0, 100).unwrap(), 0.0);
        assert!((binomial_tail_exact(2, 0.5, 1.0, 100).unwrap() - 0.5).abs() < 1e-15);
        // |j - 15| >= 3.5 over Bin(30, 1/2)
        let mut direct = 0.0;
        let mut c = 1.0f64;
        for j in 0..=30u64 {
            if j > 0 {
                c = c * (31 - j) as f64 / j as f64;
            }
            if (j as f64 - 15.0).abs() >= 3.5 {
                direct += c;
            }
        }
        direct /= 2f64.powi(30);
        assert!((binomial_tail_exact(30, 0.5, 3.5, 100).unwrap() - direct).abs() < 1e-13);
        assert!(binomial_tail_exact(101, 0.5, 1.0, 100).is_err());
    }

    #[test]
    fn snapped_mean_counts_boundary_terms() {
        // 30 * 0.2 is 6.000000000000001 in binary floating point
        let with_snap = binomial_tail_exact(30, 0.2, 3.0, 100).unwrap();
        let lf = log_factorials(30);
        let manual: f64 = (0..=30u64)
            .filter(|&j| (j as i64 - 6).abs() >= 3)
            .map(|j| {
                (lf[30] - lf[j as usize] - lf[30 - j as usize] + j as f64 * 0.2f64.ln() + (30 - j) as f64 * 0.8f64.ln())
                    .exp()
            })
            .sum();
        assert!((with_snap - manual).abs() < 1e-14);
    }

    #[test]
    fn transfer_gap_examples() {
        let t = table(100);
        let caps = MomentCaps::default();
        let g = transfer_gap(4, 2, &t, 1, &caps).unwrap();
        let e = expectation_bernoulli_direct(4, 0.5, &t).unwrap();
        assert!((g.gap - (e - 6912f64.ln() / 6.0).abs()).abs() < 1e-14);
        let full = transfer_gap(30, 30, &t, 1, &caps).unwrap();
        assert!(full.gap < 1e-12);
        assert!((full.uniform - t.chebyshev_psi(30).unwrap()).abs() < 1e-12);
        assert!(transfer_gap(30, 3, &t, 3, &caps).is_err());
        assert_eq!(transfer_gap(30, 0, &t, 1, &caps).unwrap().ratio(), None);
    }

    #[test]
    fn reports() {
        let t = table(100);
        let r = MomentReport::bernoulli_expectation(2, 0.5, &t, Method::Grouped).unwrap();
        assert_eq!(r.method, Method::Grouped);
        assert!(r.variance.is_none());
        let r = MomentReport::uniform(4, 2, &t, true, 100).unwrap();
        assert!((r.expectation - 1.473503).abs() < 1e-6);
        assert!((r.second_moment.unwrap() - 2.486032).abs() < 1e-6);
        assert!(r.variance.unwrap() >= 0.0);
        let r = MomentReport::uniform(4, 4, &t, true, 100).unwrap();
        assert!(r.variance.unwrap().abs() < 1e-12);
    }
}
