//! Harmonic-oscillator wave functions and Airy functions.
//!
//! The wave functions are φ_k(x) = (2^k k! √π)^{-1/2} H_k(x) e^{-x²/2}. They
//! are always produced by the normalized three-term recurrence, never from raw
//! Hermite polynomials, with a running power-of-ten rescale so that neither the
//! polynomial part nor the Gaussian factor overflows for large k or |x|.

use once_cell::sync::Lazy;
use std::f64::consts::{FRAC_PI_4, PI, SQRT_2};

use crate::error::{param, Result};

/// Largest wave-function index accepted by the checked entry points.
pub const DEFAULT_HERMITE_CAP: usize = 10_000;

const RESCALE: f64 = 1e150;

/// π^{-1/4}
pub(crate) fn pi_quarter_inv() -> f64 {
    PI.powf(-0.25)
}

/// Values φ(x) = (n/2)^{1/4} φ_n(x) and ψ(x) = (n/2)^{1/4} φ_{n-1}(x).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveFunctionPair {
    pub phi: f64,
    pub psi: f64,
}

/// (φ_{k-1}(x), φ_k(x)) with φ_{-1} = 0. No cap check.
pub(crate) fn hermite_pair_unchecked(k: usize, x: f64) -> (f64, f64) {
    let mut prev = 0.0;
    let mut cur = pi_quarter_inv();
    let mut log_scale = 0.0;
    for j in 0..k {
        let jf = j as f64;
        let next = x * (2.0 / (jf + 1.0)).sqrt() * cur - (jf / (jf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            prev /= RESCALE;
            cur /= RESCALE;
            log_scale += RESCALE.ln();
        }
    }
    let factor = (log_scale - 0.5 * x * x).exp();
    (prev * factor, cur * factor)
}

/// Fills `out[k] = φ_k(x)` for k = 0..out.len().
pub(crate) fn hermite_all_into(x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    let g = -0.5 * x * x;
    let mut prev = 0.0;
    let mut cur = pi_quarter_inv();
    let mut log_scale = 0.0;
    out[0] = cur * g.exp();
    for j in 0..out.len() - 1 {
        let jf = j as f64;
        let next = x * (2.0 / (jf + 1.0)).sqrt() * cur - (jf / (jf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
        if cur.abs() > RESCALE {
            prev /= RESCALE;
            cur /= RESCALE;
            log_scale += RESCALE.ln();
        }
        out[j + 1] = cur * (log_scale + g).exp();
    }
}

/// φ_k(x) for k = 0..=kmax.
pub fn hermite_phi_all(kmax: usize, x: f64) -> Result<Vec<f64>> {
    check_cap(kmax, DEFAULT_HERMITE_CAP)?;
    let mut out = vec![0.0; kmax + 1];
    hermite_all_into(x, &mut out);
    Ok(out)
}

fn check_cap(k: usize, cap: usize) -> Result<()> {
    if k > cap {
        return param(format!("wave-function index {k} exceeds cap {cap}"));
    }
    Ok(())
}

fn check_finite(x: f64) -> Result<()> {
    if !x.is_finite() {
        return param(format!("argument must be finite, got {x}"));
    }
    Ok(())
}

/// φ_k(x) with an explicit index cap.
pub fn hermite_phi_with_cap(k: usize, x: f64, cap: usize) -> Result<f64> {
    check_cap(k, cap)?;
    check_finite(x)?;
    Ok(hermite_pair_unchecked(k, x).1)
}

/// φ_k(x).
pub fn hermite_phi(k: usize, x: f64) -> Result<f64> {
    hermite_phi_with_cap(k, x, DEFAULT_HERMITE_CAP)
}

/// φ_k′(x) = −x φ_k(x) + √(2k) φ_{k−1}(x).
pub fn hermite_phi_deriv(k: usize, x: f64) -> Result<f64> {
    check_cap(k, DEFAULT_HERMITE_CAP)?;
    check_finite(x)?;
    let (prev, cur) = hermite_pair_unchecked(k, x);
    Ok(-x * cur + (2.0 * k as f64).sqrt() * prev)
}

/// The scaled pair (φ, ψ) attached to the n-point Hermite kernel.
pub fn phi_psi(n: usize, x: f64) -> Result<WaveFunctionPair> {
    if n == 0 {
        return param("phi_psi needs n >= 1");
    }
    check_cap(n, DEFAULT_HERMITE_CAP)?;
    check_finite(x)?;
    let (prev, cur) = hermite_pair_unchecked(n, x);
    let scale = (n as f64 / 2.0).powf(0.25);
    Ok(WaveFunctionPair {
        phi: scale * cur,
        psi: scale * prev,
    })
}

/// ∫_{-∞}^{∞} φ_k(x) dx for k = 0..=kmax (zero for odd k).
pub(crate) fn hermite_totals(kmax: usize) -> Vec<f64> {
    let mut tot = vec![0.0; kmax + 1];
    tot[0] = SQRT_2 * PI.powf(0.25);
    for k in 1..kmax {
        let kf = k as f64;
        tot[k + 1] = (kf / (kf + 1.0)).sqrt() * tot[k - 1];
    }
    tot
}

/// Upper-tail integrals I_k(x) = ∫_x^∞ φ_k(y) dy for k = 0..values.len(),
/// given `values[k] = φ_k(x)`.
///
/// Uses I_{k+1} = √(k/(k+1)) I_{k−1} + √(2/(k+1)) φ_k(x), which follows from
/// the ladder relation for φ_k′ and is forward stable (the homogeneous factor
/// is below one).
pub(crate) fn hermite_tail_integrals(x: f64, values: &[f64]) -> Vec<f64> {
    let len = values.len();
    let mut out = vec![0.0; len];
    if len == 0 {
        return out;
    }
    out[0] = pi_quarter_inv() * (PI / 2.0).sqrt() * libm::erfc(x / SQRT_2);
    if len > 1 {
        out[1] = SQRT_2 * values[0];
    }
    for k in 1..len.saturating_sub(1) {
        let kf = k as f64;
        out[k + 1] = (kf / (kf + 1.0)).sqrt() * out[k - 1] + (2.0 / (kf + 1.0)).sqrt() * values[k];
    }
    out
}

// ---------------------------------------------------------------------------
// Airy functions
// ---------------------------------------------------------------------------

/// Ai(0)
pub const AI0: f64 = 0.355_028_053_887_817_24;
/// Ai′(0)
pub const AIP0: f64 = -0.258_819_403_792_806_8;

// The negative join sits beyond −10 so that Ai is one smooth branch on all of
// [−10, 10]; the asymptotic phase carries ~1e−15 absolute rounding noise.
const ASYMPTOTIC_CUT: f64 = 9.0;
const NEGATIVE_CUT: f64 = 11.0;
const ANCHOR_STEP: f64 = 0.25;
const ANCHOR_COUNT: usize = 81; // −11.0, −10.75, …, 9.0
const ANCHOR_ZERO: usize = 44;

/// Taylor continuation of a solution of y″ = x y from x0 by h.
fn airy_taylor(x0: f64, y0: f64, dy0: f64, h: f64) -> (f64, f64) {
    // a_{k+2} = (x0 a_k + a_{k−1}) / ((k+1)(k+2))
    let mut a_prev = 0.0; // a_{k-1}
    let mut a_k = y0;
    let mut a_k1 = dy0;
    let mut y = y0 + dy0 * h;
    let mut dy = dy0;
    let mut hk = h; // h^{k+1}
    let mut small = 0;
    for k in 0..200 {
        let kf = k as f64;
        let a_k2 = (x0 * a_k + a_prev) / ((kf + 1.0) * (kf + 2.0));
        let dterm = (kf + 2.0) * a_k2 * hk;
        hk *= h;
        let term = a_k2 * hk;
        y += term;
        dy += dterm;
        a_prev = a_k;
        a_k = a_k1;
        a_k1 = a_k2;
        let scale = y.abs() + dy.abs() + f64::MIN_POSITIVE;
        if term.abs() + dterm.abs() < 1e-18 * scale {
            small += 1;
            if small >= 3 {
                break;
            }
        } else {
            small = 0;
        }
    }
    (y, dy)
}

fn asymptotic_coeffs() -> ([f64; 40], [f64; 40]) {
    let mut u = [0.0; 40];
    let mut v = [0.0; 40];
    u[0] = 1.0;
    v[0] = 1.0;
    for k in 1..40 {
        let kf = k as f64;
        u[k] = u[k - 1] * (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0)
            / ((2.0 * kf - 1.0) * 216.0 * kf);
        v[k] = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u[k];
    }
    (u, v)
}

static ASYM: Lazy<([f64; 40], [f64; 40])> = Lazy::new(asymptotic_coeffs);

/// Sum Σ_k sign_k c_k ζ^{-k} over the selected indices, stopping at the
/// smallest term.
fn asym_sum(coeffs: &[f64; 40], zeta: f64, start: usize, stride: usize, alternate: bool) -> f64 {
    let mut sum = 0.0;
    let mut prev_term = f64::INFINITY;
    let mut sign = 1.0;
    let mut k = start;
    while k < 40 {
        let term = coeffs[k] / zeta.powi(k as i32);
        if term.abs() > prev_term {
            break;
        }
        sum += sign * term;
        if term.abs() < 1e-18 * sum.abs() {
            break;
        }
        prev_term = term.abs();
        if alternate {
            sign = -sign;
        }
        k += stride;
    }
    sum
}

fn airy_asymptotic_positive(x: f64) -> (f64, f64) {
    let (u, v) = &*ASYM;
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let e = (-zeta).exp() / (2.0 * PI.sqrt());
    let x4 = x.powf(0.25);
    let su = asym_sum(u, -zeta, 0, 1, false);
    let sv = asym_sum(v, -zeta, 0, 1, false);
    (e / x4 * su, -x4 * e * sv)
}

fn airy_asymptotic_negative(x: f64) -> (f64, f64) {
    let (u, v) = &*ASYM;
    let z = -x;
    let zeta = 2.0 / 3.0 * z.powf(1.5);
    let z4 = z.powf(0.25);
    let (s, c) = (zeta - FRAC_PI_4).sin_cos();
    let u_even = asym_sum(u, zeta, 0, 2, true);
    let u_odd = asym_sum(u, zeta, 1, 2, true);
    let v_even = asym_sum(v, zeta, 0, 2, true);
    let v_odd = asym_sum(v, zeta, 1, 2, true);
    let rp = PI.sqrt();
    let ai = (c * u_even + s * u_odd) / (rp * z4);
    let aip = z4 / rp * (s * v_even - c * v_odd);
    (ai, aip)
}

/// Anchor values (Ai, Ai′) on the lattice −11 + 0.25 j.
///
/// Positive anchors come from backward Taylor integration starting at the
/// decaying asymptotic expansion at x = 9 (Ai is dominant in the backward
/// direction, so this is stable). Negative anchors are integrated down from
/// the Maclaurin values at the origin.
static ANCHORS: Lazy<Vec<(f64, f64)>> = Lazy::new(|| {
    let mut table = vec![(0.0, 0.0); ANCHOR_COUNT];
    let zero = ANCHOR_ZERO;
    table[zero] = (AI0, AIP0);
    let (mut y, mut dy) = airy_asymptotic_positive(ASYMPTOTIC_CUT);
    table[ANCHOR_COUNT - 1] = (y, dy);
    for j in (zero + 1..ANCHOR_COUNT - 1).rev() {
        let x0 = anchor_x(j + 1);
        (y, dy) = airy_taylor(x0, y, dy, -ANCHOR_STEP);
        table[j] = (y, dy);
    }
    let (mut y, mut dy) = (AI0, AIP0);
    for j in (0..zero).rev() {
        let x0 = anchor_x(j + 1);
        (y, dy) = airy_taylor(x0, y, dy, -ANCHOR_STEP);
        table[j] = (y, dy);
    }
    table
});

fn anchor_x(j: usize) -> f64 {
    -NEGATIVE_CUT + ANCHOR_STEP * j as f64
}

/// Ai(x) and Ai′(x) for real x.
///
/// Asymptotic expansions for x ≥ 9 and x ≤ −11; in between, a Taylor continuation from
/// the nearest anchor of a 0.25-spaced table (|h| ≤ 0.125). Relative accuracy
/// is about 1e−14 away from the zeros on the negative axis.
pub fn airy(x: f64) -> (f64, f64) {
    if x.is_nan() {
        return (f64::NAN, f64::NAN);
    }
    if x >= ASYMPTOTIC_CUT {
        if x > 105.0 {
            return (0.0, -0.0);
        }
        return airy_asymptotic_positive(x);
    }
    if x <= -NEGATIVE_CUT {
        return airy_asymptotic_negative(x);
    }
    let j = ((x + NEGATIVE_CUT) / ANCHOR_STEP).round() as usize;
    let j = j.min(ANCHOR_COUNT - 1);
    let x0 = anchor_x(j);
    let (y0, dy0) = ANCHORS[j];
    airy_taylor(x0, y0, dy0, x - x0)
}

pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}
