//! Soft-edge limits: Hastings–McLeod q, the Airy-side bundle of inner
//! products, the Tracy–Widom laws and the n^{-1/3}, n^{-2/3} corrections.
//!
//! Everything is computed from the Airy-kernel resolvent on (s, S): with
//! Q_i = (I − K_Ai)^{-1}(x^i Ai) and P_i = (I − K_Ai)^{-1}(x^i Ai′),
//! q_i = Q_i(s), p_i = P_i(s), u_i = (Q_i, Ai), v_i = (P_i, Ai),
//! ṽ_i = (Q_i, Ai′), w_i = (P_i, Ai′). The s-integrals (μ, ν, α, η and the
//! F₂ exponent) use an outer quadrature whose nodes sit on a fixed lattice so
//! that per-node bundles can be memoized across different s.

use std::f64::consts::SQRT_2;
use std::num::NonZeroUsize;
use std::sync::Mutex;

use lru::LruCache;
use once_cell::sync::Lazy;

use crate::error::{param, Result};
use crate::fredholm::{airy_sample, assemble_from_samples, extension_sum, fredholm_log_det, KernelId};
use crate::par;
use crate::quadrature::build_grid;
use crate::special::airy;

/// Supported range of s.
pub const WINDOW: (f64, f64) = (-10.0, 8.0);

const TRUNCATION: f64 = 16.0;
const OUTER_STEP: f64 = 0.5;
const OUTER_PER_PANEL: usize = 16;
const FD_STEP: f64 = 1e-3;

pub fn tau(n: usize, c: f64, s: f64) -> Result<f64> {
    let nc = n as f64 + c;
    if nc <= 0.0 || n == 0 {
        return param(format!("need n + c > 0, got n = {n}, c = {c}"));
    }
    Ok((2.0 * nc).sqrt() + (n as f64).powf(-1.0 / 6.0) * s / SQRT_2)
}

fn upper(s: f64) -> f64 {
    s.max(0.0) + TRUNCATION
}

/// Nyström size for (s, S): 96 nodes up to length 16, growing with the
/// number of Airy oscillations to the left of the origin.
fn inner_nodes(s: f64) -> usize {
    let len = upper(s) - s;
    96 + (8.0 * (len - TRUNCATION).max(0.0)).ceil() as usize
}

/// Values at the left endpoint of a single interval (x, S(x)).
#[derive(Debug, Clone, Copy, PartialEq)]
struct Local {
    q: [f64; 3],
    p: [f64; 3],
    u: [f64; 3],
    v: [f64; 3],
    vt: [f64; 3],
    w: [f64; 3],
    log_det: f64,
}

fn local_uncached(s: f64, nodes: usize) -> Result<Local> {
    let grid = build_grid(s, upper(s), nodes)?;
    let samples: Vec<_> = grid.nodes.iter().map(|&x| airy_sample(x)).collect();
    let ai: Vec<f64> = samples.iter().map(|k| k.a).collect();
    let aip: Vec<f64> = samples.iter().map(|k| k.b).collect();
    let xs = grid.nodes.clone();
    let weights = grid.weights.clone();
    let op = assemble_from_samples(KernelId::Airy, grid, samples);

    let mut rhs: Vec<Vec<f64>> = Vec::with_capacity(6);
    for base in [&ai, &aip] {
        for i in 0..3 {
            rhs.push(base.iter().zip(&xs).map(|(a, x)| a * x.powi(i)).collect());
        }
    }
    let refs: Vec<&[f64]> = rhs.iter().map(|r| r.as_slice()).collect();
    let sol = op.solve_many(&refs)?;

    let row = op.kernel_row(s);
    let (a0, ap0) = airy(s);
    let dot = |f: &[f64], g: &[f64]| -> f64 { f.iter().zip(g).zip(&weights).map(|((a, b), w)| a * b * w).sum() };
    let mut out = Local {
        q: [0.0; 3],
        p: [0.0; 3],
        u: [0.0; 3],
        v: [0.0; 3],
        vt: [0.0; 3],
        w: [0.0; 3],
        log_det: fredholm_log_det(&op)?,
    };
    for i in 0..3 {
        let (qs, ps) = (&sol[i], &sol[3 + i]);
        let si = s.powi(i as i32);
        out.q[i] = a0 * si + extension_sum(&op, &row, qs);
        out.p[i] = ap0 * si + extension_sum(&op, &row, ps);
        out.u[i] = dot(qs, &ai);
        out.v[i] = dot(ps, &ai);
        out.vt[i] = dot(qs, &aip);
        out.w[i] = dot(ps, &aip);
    }
    Ok(out)
}

static LOCAL_CACHE: Lazy<Mutex<LruCache<(u64, usize), Local>>> =
    Lazy::new(|| Mutex::new(LruCache::new(NonZeroUsize::new(1 << 16).unwrap())));

fn local(s: f64, nodes: usize) -> Result<Local> {
    let key = (s.to_bits(), nodes);
    if let Some(v) = LOCAL_CACHE.lock().expect("cache poisoned").get(&key) {
        return Ok(*v);
    }
    let v = local_uncached(s, nodes)?;
    LOCAL_CACHE.lock().expect("cache poisoned").put(key, v);
    Ok(v)
}

/// Outer nodes on (s, S(s)): a partial panel to the next lattice point, then
/// lattice panels of width 0.5.
fn outer_nodes(s: f64) -> Result<Vec<(f64, f64)>> {
    let top = upper(s);
    let mut out = Vec::new();
    let mut k = (s / OUTER_STEP).ceil();
    let mut push = |a: f64, b: f64| -> Result<()> {
        if b - a > 1e-12 {
            let g = build_grid(a, b, OUTER_PER_PANEL)?;
            out.extend(g.nodes.into_iter().zip(g.weights));
        }
        Ok(())
    };
    push(s, (k * OUTER_STEP).min(top))?;
    while k * OUTER_STEP < top {
        push(k * OUTER_STEP, ((k + 1.0) * OUTER_STEP).min(top))?;
        k += 1.0;
    }
    Ok(out)
}

/// How η picks up its c-dependent piece −(20c²q′ + 3p)/(20√2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EtaConvention {
    /// η evaluated at the same c as the surrounding expansion.
    #[default]
    Printed,
    /// η evaluated at c = 0 regardless of the expansion's c.
    CIndependent,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AiryBundle {
    pub s: f64,
    pub q: [f64; 3],
    pub p: [f64; 3],
    pub u: [f64; 3],
    pub v: [f64; 3],
    pub tilde_v: [f64; 3],
    pub w: [f64; 3],
    pub mu: f64,
    pub nu: f64,
    pub alpha: f64,
    /// (1/(20√2))∫_s^∞ (6qv + 3pu + 2p₂ + 2p₁v + 2pv₁ − 2q₂u − 2q₁u₁ − 2qu₂)
    pub eta_integral: f64,
    /// q′(s) by a five-point difference.
    pub q_prime: f64,
    /// ∫_s^∞ (x − s) q² dx
    pub f2_exponent: f64,
    /// ln det(I − K_Ai) on (s, S)
    pub log_det: f64,
}

impl AiryBundle {
    pub fn eta(&self, c: f64, convention: EtaConvention) -> f64 {
        let c = match convention {
            EtaConvention::Printed => c,
            EtaConvention::CIndependent => 0.0,
        };
        self.eta_integral - (20.0 * c * c * self.q_prime + 3.0 * self.p[0]) / (20.0 * SQRT_2)
    }

    /// F₂(s) from the exponential integral.
    pub fn f2(&self) -> f64 {
        (-self.f2_exponent).exp()
    }
}

fn check_window(s: f64) -> Result<()> {
    if !(WINDOW.0..=WINDOW.1).contains(&s) {
        return param(format!("s = {s} outside the supported window [{}, {}]", WINDOW.0, WINDOW.1));
    }
    Ok(())
}

pub fn airy_bundle(s: f64) -> Result<AiryBundle> {
    check_window(s)?;
    let here = local(s, inner_nodes(s))?;
    let pts = outer_nodes(s)?;
    let locals = par::try_map(&pts, |&(x, _)| local(x, inner_nodes(x)))?;

    let (mut mu, mut nu, mut alpha, mut eta, mut expo) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&(x, wt), b) in pts.iter().zip(&locals) {
        let (q, p, u, v) = (b.q, b.p, b.u, b.v);
        mu += wt * q[0];
        nu += wt * p[0];
        alpha += wt * q[0] * u[0];
        expo += wt * (x - s) * q[0] * q[0];
        eta += wt
            * (6.0 * q[0] * v[0] + 3.0 * p[0] * u[0] + 2.0 * p[2] + 2.0 * p[1] * v[0] + 2.0 * p[0] * v[1]
                - 2.0 * q[2] * u[0]
                - 2.0 * q[1] * u[1]
                - 2.0 * q[0] * u[2]);
    }
    let q_prime = five_point(s)?;
    Ok(AiryBundle {
        s,
        q: here.q,
        p: here.p,
        u: here.u,
        v: here.v,
        tilde_v: here.vt,
        w: here.w,
        mu,
        nu,
        alpha,
        eta_integral: eta / (20.0 * SQRT_2),
        q_prime,
        f2_exponent: expo,
        log_det: here.log_det,
    })
}

fn q_at(s: f64) -> Result<f64> {
    Ok(local(s, inner_nodes(s))?.q[0])
}

fn five_point(s: f64) -> Result<f64> {
    let h = FD_STEP;
    Ok((-q_at(s + 2.0 * h)? + 8.0 * q_at(s + h)? - 8.0 * q_at(s - h)? + q_at(s - 2.0 * h)?) / (12.0 * h))
}

/// The Hastings–McLeod solution q(s) = Q_0(s; s).
pub fn hastings_mcleod_q(s: f64) -> Result<f64> {
    check_window(s)?;
    q_at(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LimitMethod {
    #[default]
    Exponential,
    Determinant,
}

/// Tracy–Widom F₂(s).
pub fn f2_limit(s: f64, method: LimitMethod) -> Result<f64> {
    check_window(s)?;
    match method {
        LimitMethod::Determinant => Ok(local(s, inner_nodes(s))?.log_det.exp()),
        LimitMethod::Exponential => {
            let pts = outer_nodes(s)?;
            let qs = par::try_map(&pts, |&(x, _)| q_at(x))?;
            let e: f64 = pts.iter().zip(&qs).map(|(&(x, w), q)| w * (x - s) * q * q).sum();
            Ok((-e).exp())
        }
    }
}

/// E_{c,2} = 2w₁ − 3u₂ + (−20c² + 3)v₀ + u₁v₀ − u₀v₁ + u₀v₀² − u₀²w₀.
pub fn e_c2(b: &AiryBundle, c: f64) -> f64 {
    let (u, v, w) = (b.u, b.v, b.w);
    2.0 * w[1] - 3.0 * u[2] + (-20.0 * c * c + 3.0) * v[0] + u[1] * v[0] - u[0] * v[1] + u[0] * v[0] * v[0]
        - u[0] * u[0] * w[0]
}

/// E_{c,1}, term by term as printed; 0 once μ has decayed below 1e−12.
pub fn e_c1(b: &AiryBundle, c: f64, convention: EtaConvention) -> f64 {
    let mu = b.mu;
    if mu < 1e-12 {
        return 0.0;
    }
    let (q, p, u) = (b.q[0], b.p[0], b.u[0]);
    let (nu, al) = (b.nu, b.alpha);
    let eta = b.eta(c, convention);
    let em = (-mu).exp();
    let r2 = 2.0 * SQRT_2;
    let cq2 = c * c * q * q;

    let head = -e_c2(b, c) * em / 20.0 - c * al / (2.0 * mu * mu)
        + c * p / (2.0 * mu)
        + (2.0 * c - 1.0) * nu * nu / (4.0 * mu * mu)
        + c * u * (c * q * em - nu / (2.0 * mu) * (1.0 - em));
    let double = (-2.0 * mu).exp() * (nu * (nu + 8.0 * c * q) / (32.0 * mu) - eta / (4.0 * SQRT_2));
    let single = em
        * ((r2 * cq2 - 3.0 * eta) / (4.0 * SQRT_2)
            + (nu * nu - 8.0 * (2.0 * c * p + cq2) - 4.0 * c * c * al * al) / (32.0 * mu)
            - cq2 / (8.0 * mu * mu)
            + (2.0 - mu) / (2.0 * mu * mu) * (c * q * al + 0.25 * nu * nu + (c * c - c) * q * q));
    let hyper = -(4.0 * c * c * al * al + 3.0 * cq2 - nu * nu) * mu.cosh() / (8.0 * mu * mu);
    head + double + single + hyper
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeworthResult {
    pub leading: f64,
    /// Coefficient of n^{−1/3} (F₂ factor included).
    pub order_one_third: f64,
    /// Coefficient of n^{−2/3} (F₂ factor included).
    pub order_two_thirds: f64,
    pub combined: f64,
}

impl EdgeworthResult {
    fn assemble(n: usize, f2: f64, lead: f64, first: f64, second: f64) -> Self {
        let m = (n as f64).powf(-1.0 / 3.0);
        let (leading, order_one_third, order_two_thirds) = (f2 * lead, f2 * first, f2 * second);
        EdgeworthResult {
            leading,
            order_one_third,
            order_two_thirds,
            combined: leading + m * order_one_third + m * m * order_two_thirds,
        }
    }
}

fn check_n(n: usize, min: usize) -> Result<()> {
    if n < min {
        return param(format!("need n >= {min}, got {n}"));
    }
    Ok(())
}

/// (1 − e^{−μ})/μ
fn one_minus_exp_over(mu: f64) -> f64 {
    if mu.abs() < 1e-12 {
        1.0
    } else {
        -(-mu).exp_m1() / mu
    }
}

fn sinhc(mu: f64) -> f64 {
    if mu.abs() < 1e-8 {
        1.0 + mu * mu / 6.0
    } else {
        mu.sinh() / mu
    }
}

pub fn edgeworth_f2_from(b: &AiryBundle, n: usize, c: f64) -> Result<EdgeworthResult> {
    check_n(n, 2)?;
    Ok(EdgeworthResult::assemble(n, b.f2(), 1.0, c * b.u[0], -e_c2(b, c) / 20.0))
}

pub fn edgeworth_f1_sq_from(b: &AiryBundle, n: usize, c: f64, convention: EtaConvention) -> Result<EdgeworthResult> {
    check_n(n, 2)?;
    let em = (-b.mu).exp();
    let first = c * (b.q[0] + b.u[0]) * em - 0.5 * b.nu * one_minus_exp_over(b.mu);
    Ok(EdgeworthResult::assemble(n, b.f2(), em, first, e_c1(b, c, convention)))
}

pub fn edgeworth_f4_sq_from(b: &AiryBundle, n: usize, c: f64, convention: EtaConvention) -> Result<EdgeworthResult> {
    check_n(n, 1)?;
    let (q, u, mu) = (b.q[0], b.u[0], b.mu);
    let (ch, sh) = (mu.cosh(), mu.sinh());
    let lead = (0.5 * mu).cosh().powi(2);
    let first = 0.5 * c * (u * (1.0 + ch) - q * sh);
    let eta = b.eta(c, convention);
    let second = 0.25
        * (b.nu * sinhc(mu) / (2.0 * SQRT_2)
            + c * c * q * q * ch
            + (ch - 1.0) / 10.0 * e_c2(b, c)
            + SQRT_2 * (eta - SQRT_2 * c * c * q * u) * sh);
    Ok(EdgeworthResult::assemble(n, b.f2(), lead, first, second))
}

pub fn edgeworth_f2(n: usize, c: f64, s: f64) -> Result<EdgeworthResult> {
    edgeworth_f2_from(&airy_bundle(s)?, n, c)
}

pub fn edgeworth_f1_sq(n: usize, c: f64, s: f64) -> Result<EdgeworthResult> {
    edgeworth_f1_sq_from(&airy_bundle(s)?, n, c, EtaConvention::default())
}

pub fn edgeworth_f4_sq(n: usize, c: f64, s: f64) -> Result<EdgeworthResult> {
    edgeworth_f4_sq_from(&airy_bundle(s)?, n, c, EtaConvention::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tau_values() {
        assert!((tau(100, 1.0, 0.0).unwrap() - 202f64.sqrt()).abs() < 1e-14);
        assert!((tau(64, 0.0, 2.0).unwrap() - (128f64.sqrt() + SQRT_2 / 2.0)).abs() < 1e-14);
        assert!(tau(3, -3.0, 0.0).is_err());
    }

    #[test]
    fn window_is_enforced() {
        assert!(airy_bundle(-10.5).is_err());
        assert!(hastings_mcleod_q(8.5).is_err());
    }

    #[test]
    fn boundary_condition() {
        let q = hastings_mcleod_q(6.0).unwrap();
        assert!((q / airy(6.0).0 - 1.0).abs() < 1e-6);
        let q = hastings_mcleod_q(5.0).unwrap();
        assert!((q / airy(5.0).0 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn known_values() {
        // Hastings–McLeod q(0) and F₂(−2)
        assert!((hastings_mcleod_q(0.0).unwrap() - 0.367_061_551_548_078_4).abs() < 1e-9);
        let f = f2_limit(-2.0, LimitMethod::Determinant).unwrap();
        assert!((f - 0.413_224_142_505_122_57).abs() < 1e-9, "{f}");
    }

    #[test]
    fn degenerate_mu() {
        let mut b = airy_bundle(7.9).unwrap();
        b.mu = 0.0;
        assert_eq!(e_c1(&b, 0.3, EtaConvention::Printed), 0.0);
    }
}
