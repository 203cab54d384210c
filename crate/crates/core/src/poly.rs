//! Value sets `A_f(n) = f(Z) ∩ [1, n]` of integer polynomials and the
//! main-term predictors for `psi_f(n) = psi(A_f(n))`.

use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::set::{psi_of_set, IntegerSet};
use crate::sieve::PrimeTable;

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Second-order constant of `psi_f` for `f = x^2 + 1`, as published.
pub const B_CONSTANT_X2P1: f64 = -0.066_275_63;

/// Integer polynomial `a_0 + a_1 x + ... + a_d x^d` with `d >= 1`, `a_d > 0`.
/// Coefficients are taken as given; no content is divided out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<i64>,
}

impl IntPolynomial {
    /// Coefficients in ascending order of degree. Trailing zeros are dropped.
    pub fn new(mut coeffs: Vec<i64>) -> Result<Self> {
        while coeffs.len() > 1 && coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        if coeffs.len() < 2 {
            return Err(Error::Domain("polynomial must have degree at least 1".into()));
        }
        if *coeffs.last().unwrap() <= 0 {
            return Err(Error::Domain("leading coefficient must be positive".into()));
        }
        Ok(IntPolynomial { coeffs })
    }

    /// Parses `"a0,a1,...,ad"`.
    pub fn parse(s: &str) -> Result<Self> {
        let coeffs = s
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("`{}` is not an integer coefficient", tok.trim())))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(coeffs)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn leading(&self) -> i64 {
        *self.coeffs.last().unwrap()
    }

    /// `f(x)`, or `None` on `i128` overflow.
    pub fn eval(&self, x: i64) -> Option<i128> {
        let x = x as i128;
        self.coeffs.iter().rev().try_fold(0i128, |acc, &a| acc.checked_mul(x)?.checked_add(a as i128))
    }

    pub fn class(&self) -> PolyClass {
        match self.degree() {
            1 => PolyClass::Linear,
            2 => {
                let (c, b, a) = (self.coeffs[0] as i128, self.coeffs[1] as i128, self.coeffs[2] as i128);
                let disc = b * b - 4 * a * c;
                if is_square(disc) {
                    PolyClass::QuadraticReducible
                } else {
                    PolyClass::QuadraticIrreducible
                }
            }
            _ => PolyClass::Higher,
        }
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &a) in self.coeffs.iter().enumerate().rev() {
            if a == 0 {
                continue;
            }
            let sign = if a < 0 {
                "-"
            } else if first {
                ""
            } else {
                "+"
            };
            let mag = a.unsigned_abs();
            let body = match (i, mag) {
                (0, m) => m.to_string(),
                (1, 1) => "x".to_string(),
                (1, m) => format!("{m}x"),
                (e, 1) => format!("x^{e}"),
                (e, m) => format!("{m}x^{e}"),
            };
            write!(f, "{sign}{body}")?;
            first = false;
        }
        Ok(())
    }
}

fn is_square(v: i128) -> bool {
    if v < 0 {
        return false;
    }
    let r = (v as f64).sqrt() as i128;
    (r.saturating_sub(2)..=r + 2).any(|s| s >= 0 && s * s == v)
}

/// Which predictor matches a polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolyClass {
    Linear,
    /// Non-square discriminant.
    QuadraticIrreducible,
    QuadraticReducible,
    Higher,
}

/// `A_f(n)`: distinct values of `f` on the integers that lie in `[1, n]`.
///
/// Beyond `|k| >= B = 2 + sum_{i<d} |a_i|` both `f` and `f'` keep a fixed
/// sign, so the scan in each direction stops at the first `k` past `B`
/// whose value leaves `[1, n]`.
pub fn poly_set(f: &IntPolynomial, n: u64) -> IntegerSet {
    let bound: i128 = 2 + f.coeffs[..f.degree()].iter().map(|&a| (a as i128).abs()).sum::<i128>();
    let in_range = |v: Option<i128>| matches!(v, Some(v) if v >= 1 && v <= n as i128);
    let mut values = Vec::new();
    for dir in [1i64, -1] {
        let mut k: i64 = if dir == 1 { 0 } else { -1 };
        loop {
            let v = f.eval(k);
            if in_range(v) {
                values.push(v.unwrap() as u64);
            } else if (k as i128).abs() >= bound {
                break;
            }
            k += dir;
        }
    }
    values.sort_unstable();
    values.dedup();
    IntegerSet::from_sorted(n, values)
}

/// `psi_f(n) = psi(A_f(n))`; values are factored by trial division, so
/// `n` may be as large as the square of the table limit.
pub fn psi_poly<R: Real>(f: &IntPolynomial, n: u64, table: &PrimeTable<R>) -> Result<R> {
    let lim = table.limit() as u128;
    if n as u128 > lim * lim {
        return Err(Error::OutOfTable { value: n, limit: table.limit() });
    }
    psi_of_set(&poly_set(f, n), table)
}

/// `(n/a_1) (q/phi(q)) sum_{1 <= l <= q, (l, q) = 1} 1/l` with
/// `q = a_1 / gcd(a_1, a_0)`.
pub fn predict_linear<R: Real>(f: &IntPolynomial, n: u64, table: &PrimeTable<R>) -> Result<R> {
    if f.degree() != 1 {
        return Err(Error::Domain(format!("linear predictor needs degree 1, got {}", f.degree())));
    }
    let (a0, a1) = (f.coeffs[0].unsigned_abs(), f.coeffs[1] as u64);
    let q = a1 / a1.gcd(&a0);
    let phi = table.euler_phi(q)?;
    let harmonic =
        (1..=q).filter(|l| l.gcd(&q) == 1).map(|l| R::one() / R::from_count(l)).fold(R::zero(), |acc, x| acc + x);
    Ok(R::from_count(n) / R::from_count(a1) * R::from_count(q) / R::from_count(phi) * harmonic)
}

/// `(1/2) sqrt(n/a_2) log(n/a_2) + B sqrt(n/a_2)`.
pub fn predict_quadratic_irreducible<R: Real>(f: &IntPolynomial, n: u64, b: R) -> Result<R> {
    if f.degree() != 2 {
        return Err(Error::Domain(format!("quadratic predictor needs degree 2, got {}", f.degree())));
    }
    let x = R::from_count(n) / R::from_count(f.leading() as u64);
    Ok(R::lit(0.5) * x.sqrt() * x.ln() + b * x.sqrt())
}

/// `sqrt(n)`, the main term of `psi_f(n)` for `f = x^2 - 1`.
pub fn predict_reducible_x2m1<R: Real>(n: u64) -> R {
    R::from_count(n).sqrt()
}

/// `(1 - 1/d) (n/a_d)^(1/d) log(n/a_d)`.
pub fn predict_conjecture<R: Real>(f: &IntPolynomial, n: u64) -> Result<R> {
    let d = f.degree();
    if d < 2 {
        return Err(Error::Domain("degree-d main term needs d >= 2".into()));
    }
    let dr = R::from_count(d as u64);
    let x = R::from_count(n) / R::from_count(f.leading() as u64);
    Ok((R::one() - dr.recip()) * x.powf(dr.recip()) * x.ln())
}

/// `+1` if `p = 1 (mod 4)`, `-1` if `p = 3 (mod 4)`; `p` must be an odd prime.
pub fn legendre_minus_one(p: u64) -> Result<i8> {
    let prime = p >= 2 && (2..).take_while(|d: &u64| d * d <= p).all(|d| !p.is_multiple_of(d));
    if p.is_multiple_of(2) || !prime {
        return Err(Error::Domain(format!("{p} is not an odd prime")));
    }
    Ok(if p % 4 == 1 { 1 } else { -1 })
}

/// Truncation of the series for the `x^2 + 1` constant.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BEstimate {
    pub prime_cap: u64,
    pub value: f64,
    /// Contribution of the primes in `(P/2, P]`; shows how much the partial
    /// sum still moves.
    pub last_block_increment: f64,
}

/// `gamma - 1 - (log 2)/2 - sum_{2 < p <= P} (-1/p) log p / (p - 1)`.
pub fn estimate_b_constant<R: Real>(prime_cap: u64, table: &PrimeTable<R>) -> Result<BEstimate> {
    if prime_cap > table.limit() {
        return Err(Error::OutOfTable { value: prime_cap, limit: table.limit() });
    }
    let mut sum = 0.0f64;
    let mut block = 0.0f64;
    for &p in table.primes_upto(prime_cap) {
        if p == 2 {
            continue;
        }
        let p = p as f64;
        let chi = if p as u64 % 4 == 1 { 1.0 } else { -1.0 };
        let term = chi * p.ln() / (p - 1.0);
        sum += term;
        if 2.0 * p > prime_cap as f64 {
            block -= term;
        }
    }
    Ok(BEstimate {
        prime_cap,
        value: EULER_GAMMA - 1.0 - std::f64::consts::LN_2 / 2.0 - sum,
        last_block_increment: block,
    })
}
