use std::collections::HashMap;

use lcmpsi::*;

fn frequencies(trials: u64, sample: impl Fn(u64) -> IntegerSet) -> HashMap<Vec<u64>, u64> {
    let mut out = HashMap::new();
    for i in 0..trials {
        *out.entry(sample(i).as_slice().to_vec()).or_insert(0) += 1;
    }
    out
}

fn within_5_sigma(count: u64, trials: u64, p: f64) -> bool {
    let mean = trials as f64 * p;
    (count as f64 - mean).abs() <= 5.0 * (mean * (1.0 - p)).sqrt() + 1e-9
}

#[test]
fn bernoulli_sampler_hits_every_subset_at_its_rate() {
    let trials = 40_000;
    for n in 1..=4u64 {
        // 0.05 goes through the geometric-gap path
        for delta in [0.05, 0.3, 0.5] {
            let model = BernoulliModel::new(n, delta).unwrap();
            let freq = frequencies(trials, |i| sample_bernoulli(&model, 11, i));
            for mask in 0u64..1 << n {
                let set: Vec<u64> = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
                let size = set.len() as i32;
                let p = delta.powi(size) * (1.0 - delta).powi(n as i32 - size);
                let c = *freq.get(&set).unwrap_or(&0);
                assert!(within_5_sigma(c, trials, p), "n={n} delta={delta} {set:?}: {c}");
            }
        }
    }
}

#[test]
fn uniform_sampler_is_uniform_on_pairs() {
    let trials = 30_000;
    let model = UniformKModel::new(6, 2).unwrap();
    let freq = frequencies(trials, |i| sample_uniform_k(&model, 5, i));
    assert_eq!(freq.len(), 15);
    for (set, &c) in &freq {
        assert_eq!(set.len(), 2);
        assert!(within_5_sigma(c, trials, 1.0 / 15.0), "{set:?}: {c}");
    }
    for n in 1..=4u64 {
        for k in 0..=n {
            let model = UniformKModel::new(n, k).unwrap();
            let freq = frequencies(4_000, |i| sample_uniform_k(&model, 2, i));
            let p = 1.0 / oracle::binomial(n, k) as f64;
            assert_eq!(freq.len() as u64, oracle::binomial(n, k));
            assert!(freq.values().all(|&c| within_5_sigma(c, 4_000, p)));
        }
    }
}

#[test]
fn montecarlo_agrees_with_exact_moments() {
    let t = PrimeTableF64::build(20_000).unwrap();
    let trials = 2_000;
    let (n, delta) = (5_000u64, 0.02);
    let run = montecarlo_psi(&Model::Bernoulli(BernoulliModel::new(n, delta).unwrap()), trials, 3, &t, 2).unwrap();
    let e = expectation_bernoulli_direct(n, delta, &t).unwrap();
    let v = variance_bernoulli_exact(n, delta, &t, 30_000).unwrap();
    assert!((run.stats.mean_psi - e).abs() <= 4.0 * (v / trials as f64).sqrt(), "{:?}", run.stats);

    let (n, k) = (20_000u64, 60u64);
    let run = montecarlo_psi(&Model::UniformK(UniformKModel::new(n, k).unwrap()), trials, 3, &t, 0).unwrap();
    assert!(run.sizes.iter().all(|&s| s == k));
    let m1 = expectation_uniform_k(n, k, &t).unwrap();
    let sd = run.stats.var_psi.sqrt();
    assert!((run.stats.mean_psi - m1).abs() <= 4.0 * sd / (trials as f64).sqrt(), "{:?}", run.stats);
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let t = PrimeTableF64::build(10_000).unwrap();
    let model = Model::Bernoulli(BernoulliModel::new(10_000, 0.01).unwrap());
    let one = montecarlo_psi(&model, 37, 9, &t, 1).unwrap();
    let many = montecarlo_psi(&model, 37, 9, &t, 4).unwrap();
    assert_eq!(one.psis, many.psis);
    assert_eq!(one.stats, many.stats);
}

#[test]
fn table_too_small_is_a_resource_error() {
    let t = PrimeTableF64::build(100).unwrap();
    let model = Model::UniformK(UniformKModel::new(1000, 3).unwrap());
    let err = montecarlo_psi(&model, 2, 0, &t, 1).unwrap_err();
    assert!(err.to_string().contains("--limit"), "{err}");
}
