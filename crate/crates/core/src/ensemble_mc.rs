//! Seeded Monte Carlo for λ_max under the weight exp(−β/2 Σx²)|Δ|^β.
//!
//! Draw `i` of a run uses its own ChaCha8 stream: the generator is seeded from
//! `seed` and switched to stream `i`, so a run is bit-identical whether the
//! draws are made sequentially or on the thread pool.

use nalgebra::{Complex, DMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use crate::error::{param, Result};
use crate::par;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Beta {
    One,
    Two,
    Four,
}

impl Beta {
    pub fn from_int(b: u32) -> Result<Self> {
        match b {
            1 => Ok(Beta::One),
            2 => Ok(Beta::Two),
            4 => Ok(Beta::Four),
            _ => param(format!("beta must be 1, 2 or 4, got {b}")),
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Beta::One => 1.0,
            Beta::Two => 2.0,
            Beta::Four => 4.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct McRun {
    pub beta: Beta,
    pub n: usize,
    pub seed: u64,
    /// λ_max of each draw, ascending.
    pub samples: Vec<f64>,
    pub count: usize,
}

impl McRun {
    pub fn empirical_cdf(&self, t: f64) -> f64 {
        empirical_cdf(self, t)
    }
}

fn stream(seed: u64, draw: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(draw as u64);
    rng
}

fn check(n: usize, count: usize) -> Result<()> {
    if n == 0 {
        return param("matrix size must be positive");
    }
    if count == 0 {
        return param("sample count must be positive");
    }
    Ok(())
}

/// Number of eigenvalues of the symmetric tridiagonal (d, e) strictly below x.
fn sturm_count(d: &[f64], e2: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for k in 1..d.len() {
        let prev = if q == 0.0 { f64::EPSILON * (e2[k - 1].sqrt().abs() + 1.0) } else { q };
        q = d[k] - x - e2[k - 1] / prev;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Largest eigenvalue of a symmetric tridiagonal matrix by Sturm bisection.
pub fn tridiagonal_lambda_max(d: &[f64], e: &[f64]) -> f64 {
    let n = d.len();
    if n == 1 {
        return d[0];
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let e2: Vec<f64> = e.iter().map(|v| v * v).collect();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(d, &e2, mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

fn tridiagonal_draw(beta: Beta, n: usize, rng: &mut ChaCha8Rng) -> f64 {
    let b = beta.value();
    let d: Vec<f64> = (0..n)
        .map(|_| {
            let z: f64 = StandardNormal.sample(rng);
            z / b.sqrt()
        })
        .collect();
    let e: Vec<f64> = (1..n)
        .map(|k| {
            let chi2 = ChiSquared::new(b * (n - k) as f64).expect("positive degrees of freedom");
            (chi2.sample(rng) / (2.0 * b)).sqrt()
        })
        .collect();
    tridiagonal_lambda_max(&d, &e)
}

fn finish(beta: Beta, n: usize, seed: u64, mut samples: Vec<f64>) -> McRun {
    samples.sort_by(f64::total_cmp);
    let count = samples.len();
    McRun { beta, n, seed, samples, count }
}

/// λ_max draws from the tridiagonal β-Hermite model, whose eigenvalue law is
/// exactly ∝ exp(−β/2 Σx²)|Δ|^β: diagonal N(0, 1/β), k-th subdiagonal
/// χ_{β(n−k)}/√(2β).
pub fn sample_lambda_max(beta: Beta, n: usize, count: usize, seed: u64) -> Result<McRun> {
    check(n, count)?;
    let samples = par::map_range(count, |i| tridiagonal_draw(beta, n, &mut stream(seed, i)));
    Ok(finish(beta, n, seed, samples))
}

fn dense_draw(beta: Beta, n: usize, rng: &mut ChaCha8Rng) -> f64 {
    let mut normal = || -> f64 { rng.sample(StandardNormal) };
    match beta {
        Beta::One => {
            // diagonal N(0,1), off-diagonal N(0,½)
            let mut h = DMatrix::<f64>::zeros(n, n);
            for i in 0..n {
                h[(i, i)] = normal();
                for j in 0..i {
                    let v = normal() * std::f64::consts::FRAC_1_SQRT_2;
                    h[(i, j)] = v;
                    h[(j, i)] = v;
                }
            }
            h.symmetric_eigenvalues().max()
        }
        _ => {
            // diagonal N(0,½), off-diagonal real and imaginary parts N(0,¼)
            let mut h = DMatrix::<Complex<f64>>::zeros(n, n);
            for i in 0..n {
                h[(i, i)] = Complex::new(normal() * std::f64::consts::FRAC_1_SQRT_2, 0.0);
                for j in 0..i {
                    let v = Complex::new(0.5 * normal(), 0.5 * normal());
                    h[(i, j)] = v;
                    h[(j, i)] = v.conj();
                }
            }
            h.symmetric_eigenvalues().max()
        }
    }
}

/// Cross-check sampler from full GOE (β = 1) or GUE (β = 2) matrices.
pub fn sample_dense_lambda_max(beta: Beta, n: usize, count: usize, seed: u64) -> Result<McRun> {
    check(n, count)?;
    if beta == Beta::Four {
        return param("the dense cross-check sampler covers beta = 1 and 2 only");
    }
    let samples = par::map_range(count, |i| dense_draw(beta, n, &mut stream(seed, i)));
    Ok(finish(beta, n, seed, samples))
}

/// Fraction of samples ≤ t.
pub fn empirical_cdf(run: &McRun, t: f64) -> f64 {
    run.samples.partition_point(|&x| x <= t) as f64 / run.samples.len() as f64
}

fn ks_from_values(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    values
        .iter()
        .enumerate()
        .map(|(i, &f)| (f - i as f64 / n).max((i + 1) as f64 / n - f))
        .fold(0.0, f64::max)
}

/// Two-sided KS distance between the run and a reference CDF, which is
/// evaluated at every sample (on the pool when parallel).
pub fn ks_statistic<F>(run: &McRun, cdf: F) -> f64
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    ks_from_values(&par::map(&run.samples, |&x| cdf(x)))
}

/// [`ks_statistic`] for a fallible CDF; the first failure in sample order wins.
pub fn try_ks_statistic<F>(run: &McRun, cdf: F) -> Result<f64>
where
    F: Fn(f64) -> Result<f64> + Sync + Send,
{
    Ok(ks_from_values(&par::try_map(&run.samples, |&x| cdf(x))?))
}

/// sup_t |F_a(t) − F_b(t)| for two empirical CDFs.
pub fn ks_two_sample(a: &McRun, b: &McRun) -> f64 {
    let (x, y) = (&a.samples, &b.samples);
    let (na, nb) = (x.len() as f64, y.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < x.len() && j < y.len() {
        let t = x[i].min(y[j]);
        while i < x.len() && x[i] <= t {
            i += 1;
        }
        while j < y.len() && y[j] <= t {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic 1% critical value of the one-sample statistic.
pub fn ks_critical_1pct(count: usize) -> f64 {
    1.63 / (count as f64).sqrt()
}

/// Asymptotic 1% critical value of the two-sample statistic.
pub fn ks_two_sample_critical_1pct(na: usize, nb: usize) -> f64 {
    let (a, b) = (na as f64, nb as f64);
    1.63 * ((a + b) / (a * b)).sqrt()
}
