//! Logarithm of the least common multiple of integer sets.
//!
//! `psi(A) = log lcm{a : a in A}` for finite `A ⊂ [1, n]`, studied for
//! random sets (independent inclusion with probability `delta`, or uniform
//! `k`-subsets), for sets with extreme `psi`, and for the value sets of
//! integer polynomials.
//!
//! Numeric routines are generic over [`Real`] (`f32` or `f64`); the
//! `*F64` / `*F32` aliases below fix the scalar.
//!
//! ```
//! use lcmpsi::{expectation_bernoulli_direct, PrimeTableF64};
//!
//! let table = PrimeTableF64::build(1000).unwrap();
//! let e = expectation_bernoulli_direct(2, 0.5, &table).unwrap();
//! assert!((e - std::f64::consts::LN_2 / 2.0).abs() < 1e-15);
//! ```

pub mod asymptotics;
pub mod error;
pub mod extremal;
pub mod models;
pub mod moments;
pub mod oracle;
pub mod poly;
pub mod scalar;
pub mod set;
pub mod sieve;
pub mod suite;

pub use asymptotics::{
    bernoulli_main_term, epsilon_error, error_envelope, predict_mean, signed_residual, RegimeParams,
};
pub use error::{Error, Result};
pub use extremal::{
    build_prime_tail_set, build_smooth_set, cep_prediction, extremal_bounds, psi_smooth_closed_form, smooth_count,
    smooth_numbers, smooth_scaling, ExtremalBounds, SmoothScaling, SmoothSetSpec,
};
pub use models::{
    montecarlo_psi, sample_bernoulli, sample_uniform_k, BernoulliModel, Model, MonteCarloRun, SampleStats,
    UniformKModel,
};
pub use moments::{
    binomial_tail_exact, chernoff_bound, expectation_bernoulli_direct, expectation_bernoulli_grouped,
    expectation_uniform_k, expectation_uniform_k_grouped, pair_indicator_expectation, second_moment_uniform_k,
    transfer_gap, variance_bernoulli_exact, Method, ModelParam, MomentCaps, MomentReport, TransferGap,
};
pub use oracle::{enumerate_bernoulli_moments, enumerate_uniform_k_moments, extremal_psi_exhaustive, Extremes};
pub use poly::{
    estimate_b_constant, legendre_minus_one, poly_set, predict_conjecture, predict_linear,
    predict_quadratic_irreducible, predict_reducible_x2m1, psi_poly, BEstimate, IntPolynomial, PolyClass,
};
pub use scalar::Real;
pub use set::{lcm_exact, psi_indicator, psi_of_set, FactoredLcm, IntegerSet};
pub use sieve::{PrimeTable, SieveConfig};

pub type PrimeTableF64 = PrimeTable<f64>;
pub type PrimeTableF32 = PrimeTable<f32>;
pub type RegimeParamsF64 = RegimeParams<f64>;
pub type RegimeParamsF32 = RegimeParams<f32>;
pub type ExtremalBoundsF64 = ExtremalBounds<f64>;
