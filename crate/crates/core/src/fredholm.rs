//! Nyström discretization of integrable kernels on (lower, upper).
//!
//! Both kernels in scope have the form K(x,y) = (A(x)B(y) − A(y)B(x))/(x−y).
//! Each point therefore needs only a handful of samples ([`KernelSample`]);
//! the matrix, natural extensions and kernel rows are all built from them.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, Dyn, LU};

use crate::error::{numerical, param, Result};
use crate::quadrature::QuadratureGrid;
use crate::special::{airy, hermite_pair_unchecked};

/// Below this separation the difference quotient is replaced by its Taylor
/// expansion about the diagonal.
pub const DIAGONAL_GUARD: f64 = 1e-6;

pub type KernelFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub enum KernelId {
    /// K_{n,2}: the n-point Hermite (GUE) kernel.
    Hermite { n: usize },
    /// The Airy kernel.
    Airy,
    /// Any symmetric kernel; used for test operators such as rank-one kernels.
    Custom { label: String, kernel: KernelFn },
}

impl fmt::Debug for KernelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelId::Hermite { n } => write!(f, "hermite({n})"),
            KernelId::Airy => write!(f, "airy"),
            KernelId::Custom { label, .. } => write!(f, "custom({label})"),
        }
    }
}

impl KernelId {
    pub fn custom(label: impl Into<String>, kernel: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        KernelId::Custom { label: label.into(), kernel: Arc::new(kernel) }
    }

    pub fn sample(&self, x: f64) -> KernelSample {
        match self {
            KernelId::Hermite { n } => hermite_sample(*n, x),
            KernelId::Airy => airy_sample(x),
            KernelId::Custom { .. } => KernelSample { x, a: 0.0, b: 0.0, diag: 0.0, slope: 0.0 },
        }
    }

    fn eval_samples(&self, sx: &KernelSample, sy: &KernelSample) -> f64 {
        match self {
            KernelId::Custom { kernel, .. } => kernel(sx.x, sy.x),
            _ => integrable(sx, sy),
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.eval_samples(&self.sample(x), &self.sample(y))
    }
}

/// A(x), B(x), the diagonal value K(x,x) and the slope ∂_y K(x,y) at y = x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSample {
    pub x: f64,
    pub a: f64,
    pub b: f64,
    pub diag: f64,
    pub slope: f64,
}

fn integrable(sx: &KernelSample, sy: &KernelSample) -> f64 {
    let d = sx.x - sy.x;
    if d.abs() > DIAGONAL_GUARD {
        (sx.a * sy.b - sy.a * sx.b) / d
    } else {
        sx.diag + (sy.x - sx.x) * sx.slope
    }
}

pub(crate) fn hermite_sample(n: usize, x: f64) -> KernelSample {
    let (pm1, pn) = hermite_pair_unchecked(n, x);
    let pm2 = if n >= 2 { hermite_pair_unchecked(n - 1, x).0 } else { 0.0 };
    let nf = n as f64;
    let dn = -x * pn + (2.0 * nf).sqrt() * pm1;
    let dm1 = -x * pm1 + (2.0 * (nf - 1.0)).max(0.0).sqrt() * pm2;
    let scale = (nf / 2.0).powf(0.25);
    let (a, b) = (scale * pn, scale * pm1);
    let diag = (nf / 2.0).sqrt() * (dn * pm1 - pn * dm1);
    // φ_k″ = (x² − 2k − 1)φ_k, so ½(A″B − AB″) = −AB.
    KernelSample { x, a, b, diag, slope: -a * b }
}

pub(crate) fn airy_sample(x: f64) -> KernelSample {
    let (ai, aip) = airy(x);
    KernelSample { x, a: ai, b: aip, diag: aip * aip - x * ai * ai, slope: -0.5 * ai * ai }
}

pub fn hermite_kernel(n: usize, x: f64, y: f64) -> f64 {
    integrable(&hermite_sample(n, x), &hermite_sample(n, y))
}

pub fn airy_kernel(x: f64, y: f64) -> f64 {
    integrable(&airy_sample(x), &airy_sample(y))
}

/// The symmetrized Nyström matrix √w_i K(x_i,x_j) √w_j together with an LU
/// factorization of I − matrix.
#[derive(Clone)]
pub struct DiscretizedKernel {
    pub grid: QuadratureGrid,
    pub matrix: DMatrix<f64>,
    pub kernel_id: KernelId,
    samples: Vec<KernelSample>,
    sqrt_w: Vec<f64>,
    lu: LU<f64, Dyn, Dyn>,
}

impl fmt::Debug for DiscretizedKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiscretizedKernel")
            .field("kernel_id", &self.kernel_id)
            .field("count", &self.grid.count)
            .field("lower", &self.grid.lower)
            .field("upper", &self.grid.upper)
            .finish()
    }
}

pub fn assemble(kernel_id: KernelId, grid: QuadratureGrid) -> DiscretizedKernel {
    let samples: Vec<KernelSample> = grid.nodes.iter().map(|&x| kernel_id.sample(x)).collect();
    assemble_from_samples(kernel_id, grid, samples)
}

pub(crate) fn assemble_from_samples(
    kernel_id: KernelId,
    grid: QuadratureGrid,
    samples: Vec<KernelSample>,
) -> DiscretizedKernel {
    let m = grid.count;
    let sqrt_w: Vec<f64> = grid.weights.iter().map(|w| w.sqrt()).collect();
    let mut matrix = DMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let v = sqrt_w[i] * kernel_id.eval_samples(&samples[i], &samples[j]) * sqrt_w[j];
            matrix[(i, j)] = v;
            matrix[(j, i)] = v;
        }
    }
    let lu = (DMatrix::identity(m, m) - &matrix).lu();
    DiscretizedKernel { grid, matrix, kernel_id, samples, sqrt_w, lu }
}

impl DiscretizedKernel {
    pub fn samples(&self) -> &[KernelSample] {
        &self.samples
    }

    /// K(x, x_j) for every node x_j.
    pub fn kernel_row(&self, x: f64) -> Vec<f64> {
        let sx = self.kernel_id.sample(x);
        self.samples.iter().map(|sy| self.kernel_id.eval_samples(&sx, sy)).collect()
    }

    /// Solves (I − K)u = f for several right-hand sides (node samples) at once.
    pub fn solve_many(&self, rhs: &[&[f64]]) -> Result<Vec<Vec<f64>>> {
        let m = self.grid.count;
        for r in rhs {
            if r.len() != m {
                return param(format!("rhs has {} samples, grid has {m}", r.len()));
            }
        }
        let mut b = DMatrix::zeros(m, rhs.len());
        for (c, r) in rhs.iter().enumerate() {
            for i in 0..m {
                b[(i, c)] = self.sqrt_w[i] * r[i];
            }
        }
        let Some(y) = self.lu.solve(&b) else {
            return numerical("singular Nyström system");
        };
        let mut out = Vec::with_capacity(rhs.len());
        for c in 0..rhs.len() {
            let col: Vec<f64> = (0..m).map(|i| y[(i, c)] / self.sqrt_w[i]).collect();
            if col.iter().any(|v| !v.is_finite()) {
                return numerical("non-finite resolvent solution");
            }
            out.push(col);
        }
        Ok(out)
    }

    /// ln det(I − K) and the sign of det(I − K).
    pub fn log_det(&self) -> (f64, f64) {
        let u = self.lu.u();
        let mut log = 0.0;
        let mut sign = self.lu.p().determinant::<f64>();
        for i in 0..self.grid.count {
            let d = u[(i, i)];
            if d < 0.0 {
                sign = -sign;
            }
            log += d.abs().ln();
        }
        (log, sign)
    }
}

/// ln det(I − K); errors when the determinant is not positive and finite.
pub fn fredholm_log_det(op: &DiscretizedKernel) -> Result<f64> {
    let (log, sign) = op.log_det();
    if !log.is_finite() || log.is_nan() || sign <= 0.0 {
        return numerical(format!("det(I - K) not positive finite (log {log}, sign {sign})"));
    }
    Ok(log)
}

/// det(I − K), accumulated in log space so very small values underflow
/// gracefully rather than through intermediate products.
pub fn fredholm_det(op: &DiscretizedKernel) -> Result<f64> {
    Ok(fredholm_log_det(op)?.exp())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolventSolution {
    pub node_values: Vec<f64>,
    pub rhs_id: String,
}

pub fn resolvent_solve(op: &DiscretizedKernel, rhs: &[f64], rhs_id: impl Into<String>) -> Result<ResolventSolution> {
    let node_values = op.solve_many(&[rhs])?.pop().expect("one column");
    Ok(ResolventSolution { node_values, rhs_id: rhs_id.into() })
}

/// Natural Nyström extension f(x) + Σ_j w_j K(x, x_j) u_j.
pub fn nystrom_extend(op: &DiscretizedKernel, sol: &ResolventSolution, rhs_fn: impl Fn(f64) -> f64, x: f64) -> f64 {
    rhs_fn(x) + extension_sum(op, &op.kernel_row(x), &sol.node_values)
}

pub(crate) fn extension_sum(op: &DiscretizedKernel, row: &[f64], values: &[f64]) -> f64 {
    row.iter()
        .zip(&op.grid.weights)
        .zip(values)
        .map(|((k, w), u)| k * w * u)
        .sum()
}

pub fn inner_product(grid: &QuadratureGrid, f: &[f64], g: &[f64]) -> Result<f64> {
    if f.len() != grid.count || g.len() != grid.count {
        return param(format!(
            "sample lengths {} and {} do not match grid of {}",
            f.len(),
            g.len(),
            grid.count
        ));
    }
    Ok(grid.integrate(&f.iter().zip(g).map(|(a, b)| a * b).collect::<Vec<_>>()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::build_grid;
    use crate::special::hermite_phi;

    #[test]
    fn christoffel_darboux() {
        let direct: f64 = (0..4).map(|k| hermite_phi(k, 0.7).unwrap() * hermite_phi(k, 0.3).unwrap()).sum();
        assert!((hermite_kernel(4, 0.7, 0.3) - direct).abs() < 1e-10);
        let diag: f64 = (0..4).map(|k| hermite_phi(k, 1.1).unwrap().powi(2)).sum();
        assert!((hermite_kernel(4, 1.1, 1.1) - diag).abs() < 1e-10);
        let y = 1.1 + 5e-7;
        let near: f64 = (0..4).map(|k| hermite_phi(k, 1.1).unwrap() * hermite_phi(k, y).unwrap()).sum();
        assert!((hermite_kernel(4, 1.1, y) - near).abs() < 1e-12);
        assert_eq!(hermite_kernel(5, 1.2, 0.4), hermite_kernel(5, 0.4, 1.2));
    }

    #[test]
    fn airy_kernel_basics() {
        assert_eq!(airy_kernel(0.5, -0.5), airy_kernel(-0.5, 0.5));
        assert!((airy_kernel(0.0, 0.0) - 0.066_987_483_7).abs() < 1e-9);
        for i in 0..=160 {
            let x = -8.0 + 0.1 * i as f64;
            assert!(airy_kernel(x, x) > 0.0, "x = {x}");
        }
    }

    #[test]
    fn null_and_rank_one() {
        let g = build_grid(0.0, 1.0, 16).unwrap();
        let null = assemble(KernelId::custom("zero", |_, _| 0.0), g.clone());
        assert_eq!(fredholm_det(&null).unwrap(), 1.0);
        let rhs: Vec<f64> = g.nodes.iter().map(|x| x.cos()).collect();
        let sol = resolvent_solve(&null, &rhs, "cos").unwrap();
        for (a, b) in sol.node_values.iter().zip(&rhs) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(nystrom_extend(&null, &sol, f64::cos, -3.0), (-3.0f64).cos());

        // K = λ u⊗u with u = x, ∫_0^1 x² = 1/3.
        let lam = 0.9;
        let op = assemble(KernelId::custom("rank1", move |x, y| lam * x * y), g.clone());
        assert!((fredholm_det(&op).unwrap() - (1.0 - lam / 3.0)).abs() < 1e-14);
        // (I − λu⊗u)^{-1} f = f + λ u (u,f)/(1 − λ(u,u)); with f = 1, (u,f) = 1/2.
        let ones = vec![1.0; g.count];
        let sol = resolvent_solve(&op, &ones, "one").unwrap();
        let coef = lam * 0.5 / (1.0 - lam / 3.0);
        for (x, v) in g.nodes.iter().zip(&sol.node_values) {
            assert!((v - (1.0 + coef * x)).abs() < 1e-12);
        }
        let x = -2.5;
        assert!((nystrom_extend(&op, &sol, |_| 1.0, x) - (1.0 + coef * x)).abs() < 1e-12);
    }

    #[test]
    fn n1_hermite_determinant_is_erf() {
        let t = 0.3;
        let g = build_grid(t, 12.0, 64).unwrap();
        let op = assemble(KernelId::Hermite { n: 1 }, g);
        let d = fredholm_det(&op).unwrap();
        assert!((d - 0.5 * (1.0 + libm::erf(t))).abs() < 1e-12);
    }

    #[test]
    fn inner_product_checks_lengths() {
        let g = build_grid(0.0, 1.0, 8).unwrap();
        assert!(inner_product(&g, &[1.0; 7], &[1.0; 8]).is_err());
        assert!((inner_product(&g, &[1.0; 8], &[1.0; 8]).unwrap() - 1.0).abs() < 1e-14);
    }
}
