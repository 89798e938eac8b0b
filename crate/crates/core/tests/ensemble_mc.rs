use largest_eig::ensemble_mc::{
    empirical_cdf, ks_critical_1pct, ks_statistic, ks_two_sample, ks_two_sample_critical_1pct, sample_dense_lambda_max,
    sample_lambda_max, Beta, McRun,
};
use largest_eig::exact::{goe_pfaffian_sorted, gse_pfaffian_sorted, gue_gram};
use largest_eig::finite_n::{f_n4, Route};

const N: usize = 100_000;

fn ks_sorted(run: &McRun, values: &[f64]) -> f64 {
    let n = run.count as f64;
    values
        .iter()
        .enumerate()
        .map(|(i, &f)| (f - i as f64 / n).max((i + 1) as f64 / n - f))
        .fold(0.0, f64::max)
}

#[test]
fn single_eigenvalue_variance() {
    for (beta, b) in [(Beta::One, 1.0), (Beta::Two, 2.0), (Beta::Four, 4.0)] {
        let run = sample_lambda_max(beta, 1, 20_000, 11).unwrap();
        let m = run.samples.iter().sum::<f64>() / run.count as f64;
        let var = run.samples.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (run.count - 1) as f64;
        // standard error of a Gaussian sample variance: σ²√(2/(N−1))
        let se = (1.0 / b) * (2.0 / (run.count - 1) as f64).sqrt();
        assert!((var - 1.0 / b).abs() < 3.0 * se, "beta {b}: {var}");
    }
}

#[test]
fn gue_weight_convention() {
    let run = sample_lambda_max(Beta::Two, 1, N, 3).unwrap();
    let ks = ks_statistic(&run, |t| 0.5 * (1.0 + libm::erf(t)));
    assert!(ks < ks_critical_1pct(N), "{ks}");
}

#[test]
fn gue_pair_against_analytic() {
    let run = sample_lambda_max(Beta::Two, 2, N, 5).unwrap();
    let ks = ks_statistic(&run, |t| gue_gram(2, t).unwrap());
    assert!(ks < ks_critical_1pct(N), "{ks}");
}

#[test]
fn goe_against_analytic() {
    for (n, seed) in [(2usize, 17u64), (4, 19)] {
        let run = sample_lambda_max(Beta::One, n, N, seed).unwrap();
        let ks = ks_sorted(&run, &goe_pfaffian_sorted(n, &run.samples).unwrap());
        assert!(ks < ks_critical_1pct(N), "n = {n}: {ks}");
    }
}

#[test]
fn gse_against_analytic_on_its_own_scale() {
    for (m, seed) in [(1usize, 23u64), (3, 29)] {
        let run = sample_lambda_max(Beta::Four, m, N, seed).unwrap();
        let ks = ks_sorted(&run, &gse_pfaffian_sorted(m, &run.samples).unwrap());
        assert!(ks < ks_critical_1pct(N), "m = {m}: {ks}");
    }
    // spot-check the sweep against the public entry point
    let run = sample_lambda_max(Beta::Four, 3, 50, 31).unwrap();
    let sweep = gse_pfaffian_sorted(3, &run.samples).unwrap();
    for (u, f) in run.samples.iter().zip(sweep).step_by(10) {
        assert!((f - f_n4(3, *u, Route::Representation).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn dense_and_tridiagonal_goe_agree() {
    let a = sample_lambda_max(Beta::One, 4, N, 41).unwrap();
    let b = sample_dense_lambda_max(Beta::One, 4, N, 43).unwrap();
    let d = ks_two_sample(&a, &b);
    assert!(d < ks_two_sample_critical_1pct(N, N), "{d}");
}

#[test]
fn dense_and_tridiagonal_gue_agree() {
    let a = sample_lambda_max(Beta::Two, 3, 20_000, 47).unwrap();
    let b = sample_dense_lambda_max(Beta::Two, 3, 20_000, 53).unwrap();
    let d = ks_two_sample(&a, &b);
    assert!(d < ks_two_sample_critical_1pct(20_000, 20_000), "{d}");
    assert!(sample_dense_lambda_max(Beta::Four, 2, 10, 1).is_err());
}

#[test]
fn uniform_ks_and_extreme_mismatch() {
    // λ_max for n = 1, β = 2 pushed through its own CDF is uniform
    let run = sample_lambda_max(Beta::Two, 1, N, 59).unwrap();
    let u = McRun { samples: run.samples.iter().map(|&t| 0.5 * (1.0 + libm::erf(t))).collect(), ..run.clone() };
    assert!(ks_statistic(&u, |x| x.clamp(0.0, 1.0)) < ks_critical_1pct(N));
    assert!((ks_statistic(&run, |_| 0.5) - 0.5).abs() < 1e-4);
    let self_ks = ks_statistic(&run, |t| empirical_cdf(&run, t));
    assert!(self_ks <= 1.0 / N as f64 + 1e-15);
}

#[test]
fn runs_are_reproducible() {
    let a = sample_lambda_max(Beta::Four, 5, 2_000, 99).unwrap();
    let b = sample_lambda_max(Beta::Four, 5, 2_000, 99).unwrap();
    assert_eq!(a, b);
    let prefix = sample_lambda_max(Beta::Four, 5, 1_000, 99).unwrap();
    // draw i depends only on (seed, i)
    let mut both: Vec<f64> = prefix.samples.clone();
    both.sort_by(f64::total_cmp);
    assert!(both.iter().all(|x| a.samples.binary_search_by(|y| y.total_cmp(x)).is_ok()));
    assert_ne!(a, sample_lambda_max(Beta::Four, 5, 2_000, 100).unwrap());
}
