//! Sets with extreme `psi` for their size: smooth-number sets (small
//! `psi`) and largest-prime sets (large `psi`), plus the smooth-number
//! counting function `Psi(x; y)`.

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::set::IntegerSet;
use crate::sieve::PrimeTable;

fn smooth_dfs(x: u64, primes: &[u32], out: &mut impl FnMut(u64), base: u64) {
    out(base);
    for (j, &p) in primes.iter().enumerate() {
        let p = p as u64;
        if p > x {
            break;
        }
        let mut v = x / p;
        let mut m = base * p;
        loop {
            smooth_dfs(v, &primes[j + 1..], out, m);
            if v < p {
                break;
            }
            v /= p;
            m *= p;
        }
    }
}

fn smooth_primes<R: Real>(x: u64, y: u64, table: &PrimeTable<R>) -> Result<&[u32]> {
    let need = x.min(y);
    if need > table.limit() {
        return Err(Error::OutOfTable { value: need, limit: table.limit() });
    }
    Ok(table.primes_upto(need))
}

/// `Psi(x; y)`: integers in `[1, x]` with every prime factor `<= y`
/// (1 included). Enumerates the smooth numbers depth-first, so the cost is
/// proportional to the answer.
pub fn smooth_count<R: Real>(x: u64, y: u64, table: &PrimeTable<R>) -> Result<u64> {
    if x == 0 {
        return Ok(0);
    }
    if y >= x {
        return Ok(x);
    }
    let primes = smooth_primes(x, y, table)?;
    let mut count = 0u64;
    smooth_dfs(x, primes, &mut |_| count += 1, 1);
    Ok(count)
}

/// `Psi(x; y)` by scanning every `m <= x` and checking its largest prime
/// factor.
pub fn smooth_count_by_factorization<R: Real>(x: u64, y: u64, table: &PrimeTable<R>) -> Result<u64> {
    let mut count = 0;
    for m in 1..=x {
        let largest = table.factorize(m)?.last().map_or(1, |&(p, _)| p);
        if largest <= y {
            count += 1;
        }
    }
    Ok(count)
}

/// All `y`-smooth integers in `[1, x]`, ascending.
pub fn smooth_numbers<R: Real>(x: u64, y: u64, table: &PrimeTable<R>) -> Result<Vec<u64>> {
    if x == 0 {
        return Ok(Vec::new());
    }
    let primes = smooth_primes(x, y, table)?;
    let mut out = Vec::new();
    smooth_dfs(x, primes, &mut |m| out.push(m), 1);
    out.sort_unstable();
    Ok(out)
}

/// Parameters of a constructed smooth set.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SmoothSetSpec {
    pub n: u64,
    pub k: u64,
    /// Smallest prime with `Psi(n; y) >= k`.
    pub y: u64,
    /// `Psi(n; y)`, the size of the full smooth set.
    pub full_count: u64,
    /// `log y / log log n`; absent when `log log n <= 0`.
    pub t_effective: Option<f64>,
}

/// The `k` smallest `y`-smooth integers in `[1, n]`, with `y` the least
/// prime for which there are at least `k` of them.
pub fn build_smooth_set<R: Real>(n: u64, k: u64, table: &PrimeTable<R>) -> Result<(IntegerSet, SmoothSetSpec)> {
    if k > n {
        return Err(Error::Domain(format!("k = {k} exceeds n = {n}")));
    }
    if n > table.limit() {
        return Err(Error::OutOfTable { value: n, limit: table.limit() });
    }
    let primes = table.primes_upto(n);
    let y = if primes.is_empty() {
        2
    } else {
        // Psi(n; y) is non-decreasing in y
        let (mut lo, mut hi) = (0usize, primes.len() - 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if smooth_count(n, primes[mid] as u64, table)? >= k {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        primes[lo] as u64
    };
    let all = smooth_numbers(n, y, table)?;
    let full_count = all.len() as u64;
    let chosen: Vec<u64> = all.into_iter().take(k as usize).collect();
    let loglog = (n as f64).ln().ln();
    let info = SmoothSetSpec { n, k, y, full_count, t_effective: (loglog > 0.0).then(|| (y as f64).ln() / loglog) };
    Ok((IntegerSet::from_sorted(n, chosen), info))
}

/// `psi` of the full set of `y`-smooth integers `<= n`:
/// `sum_{p <= y} floor(log n / log p) log p`, with the exponent taken as the
/// largest `e` such that `p^e <= n`.
pub fn psi_smooth_closed_form<R: Real>(n: u64, y: u64, table: &PrimeTable<R>) -> Result<R> {
    let primes = smooth_primes(n, y, table)?;
    let mut total = R::zero();
    for &p in primes {
        let p = p as u64;
        let mut e = 0u64;
        let mut pe = 1u64;
        while let Some(next) = pe.checked_mul(p).filter(|&v| v <= n) {
            pe = next;
            e += 1;
        }
        total = total + R::from_count(e) * R::from_count(p).ln();
    }
    Ok(total)
}

/// The `k` largest primes `<= n`; when `k > pi(n)`, all primes plus the
/// `k - pi(n)` largest non-primes.
pub fn build_prime_tail_set<R: Real>(n: u64, k: u64, table: &PrimeTable<R>) -> Result<IntegerSet> {
    if k > n {
        return Err(Error::Domain(format!("k = {k} exceeds n = {n}")));
    }
    if n > table.limit() {
        return Err(Error::OutOfTable { value: n, limit: table.limit() });
    }
    let primes = table.primes_upto(n);
    let mut out: Vec<u64>;
    if k as usize <= primes.len() {
        out = primes[primes.len() - k as usize..].iter().map(|&p| p as u64).collect();
    } else {
        out = primes.iter().map(|&p| p as u64).collect();
        let mut need = k as usize - primes.len();
        let mut m = n;
        while need > 0 {
            if !table.is_prime(m)? {
                out.push(m);
                need -= 1;
            }
            m -= 1;
        }
        out.sort_unstable();
    }
    Ok(IntegerSet::from_sorted(n, out))
}

/// Reference curves for sets of size `c n^theta`, with `o(1)` terms dropped.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ExtremalBounds<R: Real = f64> {
    /// `c n^theta log n`, the asymptotic floor for the maximum of `psi`.
    pub max_lower_bound: R,
    /// `(log n)^(2 + theta/(1 - theta))`, the asymptotic ceiling for the minimum.
    pub min_upper_bound: R,
}

pub fn extremal_bounds<R: Real>(n: u64, theta: R, c: R) -> Result<ExtremalBounds<R>> {
    if !(theta > R::zero() && theta < R::one()) {
        return Err(Error::Domain(format!("theta must lie in (0, 1), got {theta}")));
    }
    if c <= R::zero() {
        return Err(Error::Domain(format!("c must be positive, got {c}")));
    }
    let nr = R::from_count(n);
    let size = c * nr.powf(theta);
    if size > nr {
        return Err(Error::Domain(format!("c n^theta = {size} exceeds n = {n}")));
    }
    let log_n = nr.ln();
    Ok(ExtremalBounds {
        max_lower_bound: size * log_n,
        min_upper_bound: log_n.powf(R::lit(2.0) + theta / (R::one() - theta)),
    })
}

/// `x u^(-u)` with `u = log x / log y`.
pub fn cep_prediction<R: Real>(x: R, y: R) -> Result<R> {
    if !(y >= R::lit(2.0) && x >= y) {
        return Err(Error::Domain(format!("need 2 <= y <= x, got x = {x}, y = {y}")));
    }
    let u = x.ln() / y.ln();
    Ok(x * u.powf(-u))
}

/// `log Psi(n; (log n)^t) / log n`, next to its limit `1 - 1/t`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct SmoothScaling {
    pub n: u64,
    pub t: f64,
    pub y: u64,
    pub count: u64,
    pub exponent: f64,
    pub limit_exponent: f64,
    pub cep: f64,
}

pub fn smooth_scaling<R: Real>(n: u64, t: f64, table: &PrimeTable<R>) -> Result<SmoothScaling> {
    if n < 3 || t <= 1.0 {
        return Err(Error::Domain(format!("need n >= 3 and t > 1, got n = {n}, t = {t}")));
    }
    let log_n = (n as f64).ln();
    let y = log_n.powf(t).floor() as u64;
    let count = smooth_count(n, y, table)?;
    Ok(SmoothScaling {
        n,
        t,
        y,
        count,
        exponent: (count as f64).ln() / log_n,
        limit_exponent: 1.0 - 1.0 / t,
        cep: if y >= 2 { cep_prediction(n as f64, y as f64)? } else { f64::NAN },
    })
}
