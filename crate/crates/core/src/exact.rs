//! Small-matrix exact forms of the finite-n distributions.
//!
//! K_{n,2} is the projection onto span{φ_0, …, φ_{n−1}}, so
//! det(I − K·1_{(t,∞)}) equals the n×n Gram determinant of the φ_k on
//! (−∞, t). For β = 1 and β = 4 de Bruijn's integration formulas give
//! Pfaffians of n×n (resp. 2m×2m) skew matrices in the same basis.
//!
//! These need no resolvent, so they stay accurate far into the left tail where
//! I − K is numerically singular. They are used as a cross-check and as the
//! left-tail fallback for the operator routes.

use nalgebra::DMatrix;

use crate::error::{param, Result};
use crate::quadrature::build_grid;
use crate::special::{hermite_all_into, hermite_tail_integrals, hermite_totals, DEFAULT_HERMITE_CAP};

const PANEL: f64 = 0.25;
const PER_PANEL: usize = 16;

fn support(n: usize) -> f64 {
    (2.0 * n as f64).sqrt() + 12.0
}

/// Composite Gauss–Legendre nodes on [−L, t].
fn nodes(n: usize, t: f64) -> Result<Vec<(f64, f64)>> {
    let lo = -support(n);
    let mut out = Vec::new();
    if t <= lo {
        return Ok(out);
    }
    let panels = ((t - lo) / PANEL).ceil().max(1.0) as usize;
    let h = (t - lo) / panels as f64;
    for p in 0..panels {
        let a = lo + h * p as f64;
        let g = build_grid(a, a + h, PER_PANEL)?;
        out.extend(g.nodes.into_iter().zip(g.weights));
    }
    Ok(out)
}

/// Pfaffian of a real skew-symmetric matrix by pivoted Parlett–Reid
/// elimination. Consumes the matrix.
pub fn pfaffian(mut a: DMatrix<f64>) -> f64 {
    let n = a.nrows();
    if n % 2 == 1 {
        return 0.0;
    }
    let mut pf = 1.0;
    let mut k = 0;
    while k + 1 < n {
        let (mut kp, mut best) = (k + 1, a[(k + 1, k)].abs());
        for i in k + 2..n {
            if a[(i, k)].abs() > best {
                kp = i;
                best = a[(i, k)].abs();
            }
        }
        if kp != k + 1 {
            a.swap_rows(k + 1, kp);
            a.swap_columns(k + 1, kp);
            pf = -pf;
        }
        let piv = a[(k, k + 1)];
        if piv == 0.0 {
            return 0.0;
        }
        pf *= piv;
        if k + 2 < n {
            let tau: Vec<f64> = (k + 2..n).map(|j| a[(k, j)] / piv).collect();
            let col: Vec<f64> = (k + 2..n).map(|i| a[(i, k + 1)]).collect();
            for (ii, i) in (k + 2..n).enumerate() {
                for (jj, j) in (k + 2..n).enumerate() {
                    a[(i, j)] += tau[ii] * col[jj] - col[ii] * tau[jj];
                }
            }
        }
        k += 2;
    }
    pf
}

fn check(n: usize, t: f64) -> Result<()> {
    if n == 0 || n > DEFAULT_HERMITE_CAP {
        return param(format!("basis size {n} out of range"));
    }
    if !t.is_finite() {
        return param(format!("t must be finite, got {t}"));
    }
    Ok(())
}

/// G_{jk}(x) = ∫_{−∞}^x φ_j φ_k for j, k < size, in closed form.
///
/// By parity G_{jk}(x) = (−1)^{j+k} H_{jk}(−x) with H the upper-tail Gram
/// matrix. Off the diagonal the Hermite equation gives
/// H_{jk}(X) = (φ_k φ_j′ − φ_j φ_k′)(X) / (2(j−k)); on the diagonal the ladder
/// relation gives H_{kk} = H_{k−1,k−1} + φ_{k−1}φ_k/√(2k) with
/// H_{00} = erfc(X)/2. Evaluating at −x keeps every term the size of the
/// result, so nothing cancels in the left tail.
pub fn lower_gram(size: usize, x: f64) -> DMatrix<f64> {
    let big_x = -x;
    let mut vals = vec![0.0; size.max(1)];
    hermite_all_into(big_x, &mut vals);
    let deriv: Vec<f64> = (0..size)
        .map(|k| {
            let lower = if k > 0 { (2.0 * k as f64).sqrt() * vals[k - 1] } else { 0.0 };
            -big_x * vals[k] + lower
        })
        .collect();
    let mut g = DMatrix::<f64>::zeros(size, size);
    let mut diag = 0.5 * libm::erfc(big_x);
    for k in 0..size {
        if k > 0 {
            diag += vals[k - 1] * vals[k] / (2.0 * k as f64).sqrt();
        }
        g[(k, k)] = diag;
        for j in 0..k {
            let h = (vals[k] * deriv[j] - vals[j] * deriv[k]) / (2.0 * (j as f64 - k as f64));
            let v = if (j + k) % 2 == 0 { h } else { -h };
            g[(j, k)] = v;
            g[(k, j)] = v;
        }
    }
    g
}

/// F_{n,2}(t) as det[∫_{−∞}^t φ_j φ_k], j,k < n.
pub fn gue_gram(n: usize, t: f64) -> Result<f64> {
    check(n, t)?;
    if t >= support(n) {
        return Ok(1.0);
    }
    Ok(lower_gram(n, t).determinant().clamp(0.0, 1.0))
}

/// ∫∫_{(−∞,t)²} sgn(y−x) φ_j(x) φ_k(y) dx dy
///   = ∫_{−∞}^t φ_k(y) (2Φ_j(y) − Φ_j(t)) dy,  Φ_j(y) = ∫_{−∞}^y φ_j.
fn goe_matrix(n: usize, t: f64) -> Result<DMatrix<f64>> {
    let totals = hermite_totals(n);
    let mut vals = vec![0.0; n + 1];
    hermite_all_into(t, &mut vals);
    let tails_t = hermite_tail_integrals(t, &vals);
    let cum_t: Vec<f64> = (0..n).map(|j| totals[j] - tails_t[j]).collect();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (x, w) in nodes(n, t)? {
        hermite_all_into(x, &mut vals);
        let tails = hermite_tail_integrals(x, &vals);
        for j in 0..n {
            let s = w * (2.0 * (totals[j] - tails[j]) - cum_t[j]);
            for k in 0..n {
                a[(j, k)] += s * vals[k];
            }
        }
    }
    // exact antisymmetry
    for j in 0..n {
        a[(j, j)] = 0.0;
        for k in 0..j {
            let v = 0.5 * (a[(j, k)] - a[(k, j)]);
            a[(j, k)] = v;
            a[(k, j)] = -v;
        }
    }
    Ok(a)
}

/// F_{n,1}(t) for even n as a Pfaffian ratio.
pub fn goe_pfaffian(n: usize, t: f64) -> Result<f64> {
    check(n, t)?;
    if n % 2 != 0 {
        return param(format!("the Pfaffian form needs even n, got {n}"));
    }
    if t >= support(n) {
        return Ok(1.0);
    }
    let num = pfaffian(goe_matrix(n, t)?);
    let den = pfaffian(goe_matrix(n, support(n))?);
    Ok((num / den).clamp(0.0, 1.0))
}

/// ∫_{−∞}^t (φ_j φ_k′ − φ_k φ_j′) for j, k < 2m.
fn gse_matrix(m: usize, t: f64) -> Result<DMatrix<f64>> {
    let n = 2 * m;
    let mut vals = vec![0.0; n + 1];
    let mut deriv = vec![0.0; n];
    let mut b = DMatrix::<f64>::zeros(n, n);
    for (x, w) in nodes(n, t)? {
        hermite_all_into(x, &mut vals);
        for k in 0..n {
            let lower = if k > 0 { (2.0 * k as f64).sqrt() * vals[k - 1] } else { 0.0 };
            deriv[k] = -x * vals[k] + lower;
        }
        for j in 0..n {
            for k in j + 1..n {
                b[(j, k)] += w * (vals[j] * deriv[k] - vals[k] * deriv[j]);
            }
        }
    }
    for j in 0..n {
        for k in 0..j {
            b[(j, k)] = -b[(k, j)];
        }
    }
    Ok(b)
}

/// F_{m,4}(u) for the GSE of size m (weight e^{−2x²}) as a Pfaffian ratio.
pub fn gse_pfaffian(m: usize, u: f64) -> Result<f64> {
    if m == 0 {
        return Ok(1.0);
    }
    check(2 * m, u)?;
    let t = u * std::f64::consts::SQRT_2;
    let top = support(2 * m);
    if t >= top {
        return Ok(1.0);
    }
    let num = pfaffian(gse_matrix(m, t)?);
    let den = pfaffian(gse_matrix(m, top)?);
    Ok((num / den).clamp(0.0, 1.0))
}

/// Walks sorted points left to right, integrating `add` over each gap with
/// panels of at most [`PANEL`], and records `read(acc, t)` at every point.
fn sweep<A, F, G>(n: usize, ts: &[f64], mut acc: A, mut add: F, mut read: G) -> Result<Vec<f64>>
where
    F: FnMut(&mut A, f64, f64),
    G: FnMut(&A, f64) -> f64,
{
    if ts.windows(2).any(|w| w[1] < w[0]) {
        return param("evaluation points must be sorted ascending");
    }
    let mut x = ts.first().map_or(0.0, |t| t.min(-support(n)));
    let mut out = Vec::with_capacity(ts.len());
    for &t in ts {
        check(n.max(1), t)?;
        let gap = t - x;
        if gap > 0.0 {
            let panels = (gap / PANEL).ceil().max(1.0) as usize;
            let h = gap / panels as f64;
            for p in 0..panels {
                let a = x + h * p as f64;
                let g = build_grid(a, a + h, PER_PANEL)?;
                for (&y, &w) in g.nodes.iter().zip(&g.weights) {
                    add(&mut acc, y, w);
                }
            }
            x = t;
        }
        out.push(read(&acc, t));
    }
    Ok(out)
}

/// [`gue_gram`] at many sorted points in one left-to-right pass.
pub fn gue_gram_sorted(n: usize, ts: &[f64]) -> Result<Vec<f64>> {
    check(n, 0.0)?;
    ts.iter().map(|&t| gue_gram(n, t)).collect()
}

/// [`goe_pfaffian`] at many sorted points in one left-to-right pass.
///
/// With C_{jk}(t) = ∫_{−∞}^t φ_k Φ_j the skew matrix is C_{jk} − C_{kj}, so
/// only C has to be carried from one point to the next.
pub fn goe_pfaffian_sorted(n: usize, ts: &[f64]) -> Result<Vec<f64>> {
    check(n, 0.0)?;
    if n % 2 != 0 {
        return param(format!("the Pfaffian form needs even n, got {n}"));
    }
    let den = pfaffian(goe_matrix(n, support(n))?);
    let totals = hermite_totals(n);
    let mut vals = vec![0.0; n + 1];
    sweep(
        n,
        ts,
        DMatrix::<f64>::zeros(n, n),
        |c, y, w| {
            hermite_all_into(y, &mut vals);
            let tails = hermite_tail_integrals(y, &vals);
            for j in 0..n {
                let s = w * (totals[j] - tails[j]);
                for k in 0..n {
                    c[(j, k)] += s * vals[k];
                }
            }
        },
        |c, t| {
            if t >= support(n) {
                return 1.0;
            }
            let a = DMatrix::from_fn(n, n, |j, k| c[(j, k)] - c[(k, j)]);
            (pfaffian(a) / den).clamp(0.0, 1.0)
        },
    )
}

/// [`gse_pfaffian`] at many sorted GSE-scale points in one pass.
pub fn gse_pfaffian_sorted(m: usize, us: &[f64]) -> Result<Vec<f64>> {
    if m == 0 {
        return Ok(vec![1.0; us.len()]);
    }
    let n = 2 * m;
    check(n, 0.0)?;
    let top = support(n);
    let den = pfaffian(gse_matrix(m, top)?);
    let ts: Vec<f64> = us.iter().map(|u| u * std::f64::consts::SQRT_2).collect();
    let mut vals = vec![0.0; n + 1];
    let mut deriv = vec![0.0; n];
    sweep(
        n,
        &ts,
        DMatrix::<f64>::zeros(n, n),
        |b, x, w| {
            hermite_all_into(x, &mut vals);
            for k in 0..n {
                let lower = if k > 0 { (2.0 * k as f64).sqrt() * vals[k - 1] } else { 0.0 };
                deriv[k] = -x * vals[k] + lower;
            }
            for j in 0..n {
                for k in j + 1..n {
                    let v = w * (vals[j] * deriv[k] - vals[k] * deriv[j]);
                    b[(j, k)] += v;
                    b[(k, j)] -= v;
                }
            }
        },
        |b, t| if t >= top { 1.0 } else { (pfaffian(b.clone()) / den).clamp(0.0, 1.0) },
    )
}
