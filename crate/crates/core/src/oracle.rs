//! Brute-force ground truth by full subset enumeration.
//!
//! `lcm` values are computed with machine-integer gcd arithmetic, separate
//! from the prime table, so these routines check the factorization-based
//! code rather than repeat it.

use num_integer::Integer;

use crate::error::{Error, Result};

pub const MAX_BERNOULLI_N: u64 = 20;
pub const MAX_UNIFORM_N: u64 = 18;
pub const MAX_SUBSETS: u64 = 1_000_000;

/// `C(n, k)` in exact integer arithmetic (saturating).
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

fn lcm_of_mask(mask: u64) -> u64 {
    let mut acc = 1u64;
    let mut bits = mask;
    while bits != 0 {
        let a = bits.trailing_zeros() as u64 + 1;
        acc = acc.lcm(&a);
        bits &= bits - 1;
    }
    acc
}

fn mask_to_set(mask: u64) -> Vec<u64> {
    (0..64).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect()
}

/// Every `k`-bit mask below `2^n`, in increasing numeric order.
fn k_subsets(n: u64, k: u64) -> impl Iterator<Item = u64> {
    let limit = 1u64 << n;
    let mut next = if k == 0 { Some(0) } else { Some((1u64 << k) - 1) };
    if k > n {
        next = None;
    }
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            // Gosper's hack
            let c = cur & cur.wrapping_neg();
            let r = cur + c;
            let succ = (((r ^ cur) >> 2) / c) | r;
            (succ < limit).then_some(succ)
        };
        Some(cur)
    })
}

fn guard_subsets(n: u64, k: u64) -> Result<()> {
    if n > MAX_UNIFORM_N {
        return Err(Error::ResourceLimit {
            what: "oracle n",
            requested: n,
            cap: MAX_UNIFORM_N,
            flag: "a smaller n; the oracle caps are fixed",
        });
    }
    if k > n {
        return Err(Error::Domain(format!("k = {k} exceeds n = {n}")));
    }
    let count = binomial(n, k);
    if count > MAX_SUBSETS {
        return Err(Error::ResourceLimit {
            what: "oracle subsets C(n,k)",
            requested: count,
            cap: MAX_SUBSETS,
            flag: "a smaller n; the oracle caps are fixed",
        });
    }
    Ok(())
}

/// `(E psi, Var psi)` in `S(n; delta)` from all `2^n` subsets.
pub fn enumerate_bernoulli_moments(n: u64, delta: f64) -> Result<(f64, f64)> {
    if n > MAX_BERNOULLI_N {
        return Err(Error::ResourceLimit {
            what: "oracle n",
            requested: n,
            cap: MAX_BERNOULLI_N,
            flag: "a smaller n; the oracle caps are fixed",
        });
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::Domain(format!("delta must lie in [0, 1], got {delta}")));
    }
    let size = 1usize << n;
    // lcm of a mask from the mask without its top bit
    let mut lcms = vec![1u64; size];
    for mask in 1..size {
        let top = usize::BITS - 1 - mask.leading_zeros();
        lcms[mask] = lcms[mask ^ (1 << top)].lcm(&(top as u64 + 1));
    }
    let (mut w_sum, mut e1, mut e2) = (0.0f64, 0.0f64, 0.0f64);
    let weights: Vec<f64> = (0..=n).map(|j| delta.powi(j as i32) * (1.0 - delta).powi((n - j) as i32)).collect();
    for (mask, &l) in lcms.iter().enumerate() {
        let w = weights[mask.count_ones() as usize];
        let psi = (l as f64).ln();
        w_sum += w;
        e1 += w * psi;
        e2 += w * psi * psi;
    }
    debug_assert!((w_sum - 1.0).abs() < 1e-12, "weights sum to {w_sum}");
    Ok((e1, e2 - e1 * e1))
}

/// `(mean psi, mean psi^2)` over all `k`-subsets of `[1, n]`.
pub fn enumerate_uniform_k_moments(n: u64, k: u64) -> Result<(f64, f64)> {
    guard_subsets(n, k)?;
    let (mut s1, mut s2, mut count) = (0.0f64, 0.0f64, 0u64);
    for mask in k_subsets(n, k) {
        let psi = (lcm_of_mask(mask) as f64).ln();
        s1 += psi;
        s2 += psi * psi;
        count += 1;
    }
    Ok((s1 / count as f64, s2 / count as f64))
}

/// Exact extremes of `psi` over the `k`-subsets, with witnesses.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct Extremes {
    pub min_psi: f64,
    pub argmin: Vec<u64>,
    pub max_psi: f64,
    pub argmax: Vec<u64>,
}

/// Ties between equal `lcm` values go to the lexicographically smallest set.
pub fn extremal_psi_exhaustive(n: u64, k: u64) -> Result<Extremes> {
    guard_subsets(n, k)?;
    let mut best_min: Option<(u64, Vec<u64>)> = None;
    let mut best_max: Option<(u64, Vec<u64>)> = None;
    for mask in k_subsets(n, k) {
        let l = lcm_of_mask(mask);
        let better_min = match &best_min {
            None => true,
            Some((v, w)) => l < *v || (l == *v && mask_to_set(mask) < *w),
        };
        if better_min {
            best_min = Some((l, mask_to_set(mask)));
        }
        let better_max = match &best_max {
            None => true,
            Some((v, w)) => l > *v || (l == *v && mask_to_set(mask) < *w),
        };
        if better_max {
            best_max = Some((l, mask_to_set(mask)));
        }
    }
    let (lo, argmin) = best_min.expect("at least one subset");
    let (hi, argmax) = best_max.expect("at least one subset");
    Ok(Extremes { min_psi: (lo as f64).ln(), argmin, max_psi: (hi as f64).ln(), argmax })
}
