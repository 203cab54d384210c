//! The acceptance grid: twelve fixed checks of the exact routines against
//! enumeration, of the asymptotic main terms at fixed `n`, and of the
//! extremal and polynomial constructions.
//!
//! ```no_run
//! use lcmpsi::suite::{Scale, Suite};
//!
//! let suite = Suite::new(Scale::Quick, 0);
//! for outcome in suite.run_all() {
//!     println!("{outcome}");
//! }
//! ```

use std::fmt;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use crate::error::Result;
use crate::extremal::{build_prime_tail_set, build_smooth_set, smooth_scaling};
use crate::models::{montecarlo_psi, BernoulliModel, Model, UniformKModel};
use crate::moments::{
    binomial_tail_exact, chernoff_bound, expectation_bernoulli_direct, expectation_bernoulli_grouped,
    expectation_uniform_k, second_moment_uniform_k, variance_bernoulli_exact, DEFAULT_BINOMIAL_TAIL_CAP,
    DEFAULT_UNIFORM_PAIR_CAP, DEFAULT_VARIANCE_CAP,
};
use crate::oracle::{enumerate_bernoulli_moments, enumerate_uniform_k_moments, extremal_psi_exhaustive};
use crate::poly::{estimate_b_constant, predict_quadratic_irreducible, psi_poly, IntPolynomial, B_CONSTANT_X2P1};
use crate::set::psi_of_set;
use crate::sieve::PrimeTable;

/// `Full` runs every check at its stated size. `Quick` moves the two
/// checks that need a `10^8` prime table down to `10^7`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Quick,
    Full,
}

impl std::str::FromStr for Scale {
    type Err = crate::error::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "quick" => Ok(Scale::Quick),
            "full" => Ok(Scale::Full),
            other => Err(crate::error::Error::Parse(format!("unknown scale {other:?} (quick|full)"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Outside the band of a soft check.
    Warn,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Warn => "WARN",
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
    #[serde(serialize_with = "secs")]
    pub elapsed: Duration,
}

fn secs<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl CriterionOutcome {
    /// Pass, or a soft miss.
    pub fn ok(&self) -> bool {
        self.status != Status::Fail
    }
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}] {:>2} {:<24} {:>8.2}s  {}",
            self.status.as_str(),
            self.id,
            self.name,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "oracle equivalence"),
    (2, "formula identity"),
    (3, "monotone k-averages"),
    (4, "chernoff tail"),
    (5, "variance envelope"),
    (6, "half-density mean"),
    (7, "uniform mean"),
    (8, "concentration"),
    (9, "extremal sets"),
    (10, "polynomial contrast"),
    (11, "smooth-count scaling"),
    (12, "B constant"),
];

/// Lazily built prime tables shared across criteria.
pub struct Suite {
    scale: Scale,
    seed: u64,
    threads: usize,
    small: OnceLock<Result<PrimeTable<f64>>>,
    t6: OnceLock<Result<PrimeTable<f64>>>,
    t7: OnceLock<Result<PrimeTable<f64>>>,
    t8: OnceLock<Result<PrimeTable<f64>>>,
}

struct Check {
    passed: bool,
    detail: String,
}

impl Check {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Check { passed, detail: detail.into() }
    }
}

fn table(cell: &OnceLock<Result<PrimeTable<f64>>>, limit: u64) -> Result<&PrimeTable<f64>> {
    cell.get_or_init(|| PrimeTable::build(limit)).as_ref().map_err(Clone::clone)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

impl Suite {
    pub fn new(scale: Scale, seed: u64) -> Self {
        Suite {
            scale,
            seed,
            threads: 0,
            small: OnceLock::new(),
            t6: OnceLock::new(),
            t7: OnceLock::new(),
            t8: OnceLock::new(),
        }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    fn small(&self) -> Result<&PrimeTable<f64>> {
        table(&self.small, 10_000)
    }

    fn t6(&self) -> Result<&PrimeTable<f64>> {
        table(&self.t6, 1_000_000)
    }

    fn t7(&self) -> Result<&PrimeTable<f64>> {
        table(&self.t7, 10_000_000)
    }

    fn t8(&self) -> Result<&PrimeTable<f64>> {
        table(&self.t8, 100_000_000)
    }

    /// Runs one criterion; an error inside it counts as a failure.
    pub fn run(&self, id: u8) -> Option<CriterionOutcome> {
        let &(_, name) = CRITERIA.iter().find(|(i, _)| *i == id)?;
        let start = Instant::now();
        let result = match id {
            1 => self.c1(),
            2 => self.c2(),
            3 => self.c3(),
            4 => self.c4(),
            5 => self.c5(),
            6 => self.c6(),
            7 => self.c7(),
            8 => self.c8(),
            9 => self.c9(),
            10 => self.c10(),
            11 => self.c11(),
            12 => self.c12(),
            _ => unreachable!(),
        };
        let elapsed = start.elapsed();
        let (status, detail) = match result {
            Ok(c) if c.passed => (Status::Pass, c.detail),
            Ok(c) if id == 12 => (Status::Warn, c.detail),
            Ok(c) => (Status::Fail, c.detail),
            Err(e) => (Status::Fail, format!("error: {e}")),
        };
        Some(CriterionOutcome { id, name, status, detail, elapsed })
    }

    pub fn run_all(&self) -> Vec<CriterionOutcome> {
        CRITERIA.iter().filter_map(|&(id, _)| self.run(id)).collect()
    }

    fn c1(&self) -> Result<Check> {
        let start = Instant::now();
        let t = self.small()?;
        let mut worst: f64 = 0.0;
        for n in 1..=14u64 {
            for delta in [0.1, 0.25, 0.5, 0.9] {
                let (e, v) = enumerate_bernoulli_moments(n, delta)?;
                worst = worst.max((expectation_bernoulli_direct(n, delta, t)? - e).abs());
                worst = worst.max((variance_bernoulli_exact(n, delta, t, DEFAULT_VARIANCE_CAP)? - v).abs());
            }
            for k in 0..=n {
                let (m1, m2) = enumerate_uniform_k_moments(n, k)?;
                worst = worst.max((expectation_uniform_k(n, k, t)? - m1).abs());
                worst = worst.max((second_moment_uniform_k(n, k, t, DEFAULT_UNIFORM_PAIR_CAP)? - m2).abs());
            }
        }
        let secs = start.elapsed().as_secs_f64();
        Ok(Check::new(worst <= 1e-9 && secs <= 60.0, format!("max abs diff {worst:.3e}, {secs:.2}s")))
    }

    fn c2(&self) -> Result<Check> {
        let start = Instant::now();
        let t = self.t6()?;
        let mut worst: f64 = 0.0;
        for n in [100u64, 1_000, 10_000, 100_000, 1_000_000] {
            let nf = n as f64;
            for delta in [0.5, 0.1, nf.powf(-0.5), 10.0 / nf] {
                let d = expectation_bernoulli_direct(n, delta, t)?;
                let g = expectation_bernoulli_grouped(n, delta, t)?;
                worst = worst.max(rel(g, d));
            }
        }
        let secs = start.elapsed().as_secs_f64();
        Ok(Check::new(worst <= 1e-9 && secs <= 60.0, format!("max rel diff {worst:.3e}, {secs:.2}s")))
    }

    fn c3(&self) -> Result<Check> {
        let slack = 1e-12;
        let mut violations = 0usize;
        let mut checked = 0usize;
        for n in 1..=14u64 {
            let log_n = (n as f64).ln();
            let moments: Vec<(f64, f64)> = (0..=n).map(|k| enumerate_uniform_k_moments(n, k)).collect::<Result<_>>()?;
            for k in 0..=n {
                for j in 0..=k {
                    for s in [1i32, 2] {
                        let pick = |i: u64| if s == 1 { moments[i as usize].0 } else { moments[i as usize].1 };
                        let (pj, pk) = (pick(j), pick(k));
                        let room = ((k as f64).powi(s) - (j as f64).powi(s)) * log_n.powi(s);
                        checked += 1;
                        if pj > pk + slack || pk > pj + room + slack {
                            violations += 1;
                        }
                    }
                }
            }
        }
        Ok(Check::new(violations == 0, format!("{checked} inequality pairs, {violations} violations")))
    }

    fn c4(&self) -> Result<Check> {
        let mut worst: f64 = 0.0;
        let mut checked = 0usize;
        for n in 1..=30u64 {
            for delta in [0.2, 0.5, 0.8] {
                let mean = n as f64 * delta;
                if (mean - mean.round()).abs() > 1e-9 || mean.round() < 1.0 {
                    continue;
                }
                let k = mean.round() as u64;
                for r in 1..=k {
                    let tail = binomial_tail_exact(n, delta, r as f64, DEFAULT_BINOMIAL_TAIL_CAP)?;
                    worst = worst.max(tail / chernoff_bound(k, r as f64));
                    checked += 1;
                }
            }
        }
        Ok(Check::new(worst <= 1.0, format!("{checked} (n,k,r) cases, max tail/bound {worst:.4}")))
    }

    fn c5(&self) -> Result<Check> {
        let t = self.t6()?;
        let mut worst: f64 = 0.0;
        for n in [1_000u64, 10_000, 30_000] {
            let nf = n as f64;
            for delta in [nf.powf(-0.5), nf.powf(-0.25), 0.1] {
                let v = variance_bernoulli_exact(n, delta, t, DEFAULT_VARIANCE_CAP)?;
                worst = worst.max(v / (4.0 * delta * nf * nf.ln().powi(2)));
            }
        }
        Ok(Check::new(worst <= 1.0, format!("max variance/bound {worst:.4}")))
    }

    fn c6(&self) -> Result<Check> {
        let t = self.t6()?;
        let n = 1_000_000u64;
        let e = expectation_bernoulli_direct(n, 0.5, t)?;
        let target = n as f64 * std::f64::consts::LN_2;
        let r = e / target;
        Ok(Check::new((r - 1.0).abs() <= 0.02, format!("E = {e:.6}, ratio {r:.6}")))
    }

    fn c7(&self) -> Result<Check> {
        let start = Instant::now();
        let t = self.t6()?;
        let a = expectation_uniform_k(1_000_000, 1_000, t)?;
        let target_a = 0.5 * 1_000.0 * 1e6f64.ln();
        let b = expectation_uniform_k(100_000, 50_000, t)?;
        let target_b = 1e5 * std::f64::consts::LN_2;
        let (ra, rb) = (a / target_a, b / target_b);
        let secs = start.elapsed().as_secs_f64();
        Ok(Check::new(
            (ra - 1.0).abs() <= 0.10 && (rb - 1.0).abs() <= 0.02 && secs <= 300.0,
            format!("theta<1 ratio {ra:.5}, theta=1 ratio {rb:.5}, {secs:.2}s"),
        ))
    }

    fn c8(&self) -> Result<Check> {
        let t = self.t6()?;
        let trials = 200u64;

        let (n, delta) = (100_000u64, 0.01);
        let exact = expectation_bernoulli_direct(n, delta, t)?;
        let model = Model::Bernoulli(BernoulliModel::new(n, delta)?);
        let run = montecarlo_psi(&model, trials, self.seed, t, self.threads)?;
        let v_bound = 4.0 * delta * n as f64 * (n as f64).ln().powi(2);
        let allowed = 4.0 * (v_bound / trials as f64).sqrt();
        let dev = (run.stats.mean_psi - exact).abs();

        let (n, k) = (1_000_000u64, 1_000u64);
        let mean = expectation_uniform_k(n, k, t)?;
        let model = Model::UniformK(UniformKModel::new(n, k)?);
        let run = montecarlo_psi(&model, trials, self.seed, t, self.threads)?;
        let close = run.psis.iter().filter(|&&p| (p - mean).abs() < 0.1 * mean).count();
        let frac = close as f64 / trials as f64;

        Ok(Check::new(
            dev <= allowed && frac >= 0.95,
            format!("bernoulli |mean-E| {dev:.3} <= {allowed:.3}; uniform within 10%: {:.1}%", 100.0 * frac),
        ))
    }

    fn c9(&self) -> Result<Check> {
        let t = self.t6()?;
        let n = 1_000_000u64;
        let nf = n as f64;
        let mut notes = Vec::new();
        let mut passed = true;
        for delta in [1e-3, 1e-2, 0.5] {
            let k = (delta * nf).floor() as u64;
            let psi = psi_of_set(&build_prime_tail_set(n, k, t)?, t)?;
            let bound = 0.9 * nf * (delta * nf.ln()).min(1.0);
            passed &= psi >= bound;
            notes.push(format!("tail {delta}: {:.4}", psi / bound * 0.9));
        }
        let (set, info) = build_smooth_set(n, 1_000, t)?;
        let psi = psi_of_set(&set, t)?;
        let cap = nf.ln().powf(3.5);
        passed &= psi <= cap;
        notes.push(format!("smooth y={} psi {psi:.2} <= {cap:.1}", info.y));

        let small = self.small()?;
        let mut outside = 0;
        for n in 1..=14u64 {
            for k in 0..=n {
                let ex = extremal_psi_exhaustive(n, k)?;
                for set in [build_prime_tail_set(n, k, small)?, build_smooth_set(n, k, small)?.0] {
                    let psi = psi_of_set(&set, small)?;
                    if set.len() as u64 != k || psi < ex.min_psi - 1e-12 || psi > ex.max_psi + 1e-12 {
                        outside += 1;
                    }
                }
            }
        }
        passed &= outside == 0;
        notes.push(format!("bracket misses {outside}"));
        Ok(Check::new(passed, notes.join("; ")))
    }

    fn c10(&self) -> Result<Check> {
        let start = Instant::now();
        let n: u64 = match self.scale {
            Scale::Full => 100_000_000,
            Scale::Quick => 10_000_000,
        };
        let t = self.small()?;
        let f = IntPolynomial::new(vec![1, 0, 1])?;
        let g = IntPolynomial::new(vec![-1, 0, 1])?;
        let r_irr = psi_poly(&f, n, t)? / predict_quadratic_irreducible(&f, n, B_CONSTANT_X2P1)?;
        let r_red = psi_poly(&g, n, t)? / (n as f64).sqrt();

        let t6 = self.t6()?;
        let x = IntPolynomial::new(vec![0, 1])?;
        let diff = (psi_poly(&x, 1_000_000, t6)? - t6.chebyshev_psi(1_000_000)?).abs();
        let secs = start.elapsed().as_secs_f64();
        Ok(Check::new(
            (0.95..=1.05).contains(&r_irr) && (0.6..=1.4).contains(&r_red) && diff <= 1e-9 && secs <= 600.0,
            format!("n={n}: x^2+1 ratio {r_irr:.5}, x^2-1 ratio {r_red:.5}; |psi_x - psi| {diff:.2e}; {secs:.2}s"),
        ))
    }

    fn c11(&self) -> Result<Check> {
        let s = smooth_scaling(10_000_000, 2.0, self.t7()?)?;
        Ok(Check::new(
            (0.40..=0.60).contains(&s.exponent),
            format!("Psi(1e7; {}) = {}, exponent {:.4} (band [0.40, 0.60])", s.y, s.count, s.exponent),
        ))
    }

    fn c12(&self) -> Result<Check> {
        let (cap, t) = match self.scale {
            Scale::Full => (100_000_000, self.t8()?),
            Scale::Quick => (10_000_000, self.t7()?),
        };
        let b = estimate_b_constant(cap, t)?;
        let off = b.value - B_CONSTANT_X2P1;
        Ok(Check::new(
            off.abs() <= 0.05,
            format!("P={cap}: B = {:.6} (offset {off:+.6}, last block {:+.2e})", b.value, b.last_block_increment),
        ))
    }
}
