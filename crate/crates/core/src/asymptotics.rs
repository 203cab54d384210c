//! Closed-form main terms for `E psi` and the mean over `k`-subsets, in the
//! regime `k = c n^theta`, `delta = c n^(theta - 1)`.
//!
//! Every predictor returns the main term only; compare against exact values
//! with [`signed_residual`].

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::sieve::PrimeTable;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct RegimeParams<R: Real = f64> {
    pub n: u64,
    pub theta: R,
    pub c: R,
}

impl<R: Real> RegimeParams<R> {
    pub fn new(n: u64, theta: R, c: R) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("n must be positive".into()));
        }
        if !(theta > R::zero() && theta <= R::one()) {
            return Err(Error::Domain(format!("theta must lie in (0, 1], got {theta}")));
        }
        if !(c > R::zero()) {
            return Err(Error::Domain(format!("c must be positive, got {c}")));
        }
        let r = RegimeParams { n, theta, c };
        let delta = r.delta();
        if !(delta < R::one()) {
            return Err(Error::Domain(format!("delta = c n^(theta-1) = {delta} must be below 1")));
        }
        Ok(r)
    }

    /// `c n^(theta - 1)`.
    pub fn delta(&self) -> R {
        self.c * R::from_count(self.n).powf(self.theta - R::one())
    }

    /// `round(c n^theta)`.
    pub fn k(&self) -> u64 {
        (self.c * R::from_count(self.n).powf(self.theta)).round().to_u64().unwrap_or(0)
    }
}

/// Main term of the mean of `psi`:
/// `c (1 - theta) n^theta log n - c log c n^theta` for `theta < 1`,
/// `c log(1/c) / (1 - c) n` for `theta = 1`.
///
/// The two branches are not continuous in `theta`; the second is chosen only
/// when `theta == 1` exactly.
pub fn predict_mean<R: Real>(r: &RegimeParams<R>) -> R {
    let n = R::from_count(r.n);
    let c = r.c;
    if r.theta == R::one() {
        if c == R::one() {
            return n;
        }
        c * (-c.ln()) / (R::one() - c) * n
    } else {
        let scale = n.powf(r.theta);
        c * (R::one() - r.theta) * scale * n.ln() - c * c.ln() * scale
    }
}

/// `n delta log(1/delta) / (1 - delta)`.
pub fn bernoulli_main_term<R: Real>(n: u64, delta: R) -> Result<R> {
    if !(delta > R::zero() && delta < R::one()) {
        return Err(Error::Domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    Ok(R::from_count(n) * delta * (-delta.ln()) / (R::one() - delta))
}

/// `psi(x)/x - 1`.
pub fn epsilon_error<R: Real>(x: u64, table: &PrimeTable<R>) -> Result<R> {
    if x == 0 {
        return Err(Error::Domain("epsilon(x) needs x >= 1".into()));
    }
    Ok(table.chebyshev_psi(x)? / R::from_count(x) - R::one())
}

/// `exp(-C sqrt(log(n delta)))` for a caller-chosen `C`.
pub fn error_envelope<R: Real>(n: u64, delta: R, c: R) -> Result<R> {
    let m = R::from_count(n) * delta;
    if !(m > R::one()) {
        return Err(Error::Domain(format!("error envelope needs n delta > 1, got {m}")));
    }
    if !(c > R::zero()) {
        return Err(Error::Domain(format!("envelope constant must be positive, got {c}")));
    }
    Ok((-c * m.ln().sqrt()).exp())
}

/// `exact / predicted - 1`.
pub fn signed_residual<R: Real>(exact: R, predicted: R) -> R {
    exact / predicted - R::one()
}
