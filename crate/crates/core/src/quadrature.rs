//! Gauss–Legendre rules on finite intervals.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use once_cell::sync::Lazy;

use crate::error::{param, Result};

/// Nodes and weights on [-1, 1], cached per node count.
type Rule = Arc<(Vec<f64>, Vec<f64>)>;

static RULES: Lazy<Mutex<HashMap<usize, Rule>>> = Lazy::new(|| Mutex::new(HashMap::new()));

fn legendre_rule(count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; count];
    let mut weights = vec![0.0; count];
    let n = count as f64;
    for i in 0..count.div_ceil(2) {
        // Tricomi's initial guess, then Newton on P_n.
        let theta = PI * (i as f64 + 0.75) / (n + 0.5);
        let mut x = theta.cos() * (1.0 - (n - 1.0) / (8.0 * n * n * n));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=count {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            if count == 1 {
                p0 = 1.0;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[count - 1 - i] = x;
        weights[i] = w;
        weights[count - 1 - i] = w;
    }
    if count % 2 == 1 {
        nodes[count / 2] = 0.0;
    }
    (nodes, weights)
}

fn rule(count: usize) -> Rule {
    let mut map = RULES.lock().expect("quadrature cache poisoned");
    map.entry(count)
        .or_insert_with(|| Arc::new(legendre_rule(count)))
        .clone()
}

/// A Gauss–Legendre grid mapped to [lower, upper].
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureGrid {
    pub lower: f64,
    pub upper: f64,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub count: usize,
}

impl QuadratureGrid {
    pub fn integrate(&self, values: &[f64]) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }

    pub fn integrate_fn(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

pub fn build_grid(lower: f64, upper: f64, count: usize) -> Result<QuadratureGrid> {
    if !(lower.is_finite() && upper.is_finite()) || lower >= upper {
        return param(format!("need finite lower < upper, got [{lower}, {upper}]"));
    }
    if count < 4 {
        return param(format!("need at least 4 nodes, got {count}"));
    }
    let r = rule(count);
    let half = 0.5 * (upper - lower);
    let mid = 0.5 * (upper + lower);
    Ok(QuadratureGrid {
        lower,
        upper,
        nodes: r.0.iter().map(|&x| mid + half * x).collect(),
        weights: r.1.iter().map(|&w| half * w).collect(),
        count,
    })
}

/// Composite rule: `panels` equal panels, `per_panel` nodes each.
pub fn composite_grid(lower: f64, upper: f64, panels: usize, per_panel: usize) -> Result<QuadratureGrid> {
    if panels == 0 {
        return param("need at least one panel");
    }
    let h = (upper - lower) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * per_panel);
    let mut weights = Vec::with_capacity(panels * per_panel);
    for p in 0..panels {
        let a = lower + h * p as f64;
        let g = build_grid(a, a + h, per_panel)?;
        nodes.extend(g.nodes);
        weights.extend(g.weights);
    }
    let count = nodes.len();
    Ok(QuadratureGrid { lower, upper, nodes, weights, count })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exactness() {
        let g = build_grid(-1.0, 2.0, 8).unwrap();
        // exact through degree 15
        for d in 0..=15 {
            let exact = (2f64.powi(d + 1) - (-1f64).powi(d + 1)) / (d + 1) as f64;
            let got = g.integrate_fn(|x| x.powi(d));
            assert!((got - exact).abs() < 1e-12 * exact.abs().max(1.0), "degree {d}");
        }
    }

    #[test]
    fn gaussian_integral() {
        let g = build_grid(-10.0, 10.0, 96).unwrap();
        let got = g.integrate_fn(|x| (-x * x).exp());
        assert!((got - PI.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn weights_sum_to_length() {
        for n in [4, 5, 17, 64, 257] {
            let g = build_grid(0.0, 3.0, n).unwrap();
            assert!((g.weights.iter().sum::<f64>() - 3.0).abs() < 1e-13);
            assert!(g.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn bad_grids_rejected() {
        assert!(build_grid(1.0, 1.0, 8).is_err());
        assert!(build_grid(2.0, 1.0, 8).is_err());
        assert!(build_grid(0.0, 1.0, 3).is_err());
    }

    #[test]
    fn composite_matches_single() {
        let c = composite_grid(0.0, 4.0, 4, 10).unwrap();
        assert_eq!(c.count, 40);
        let got = c.integrate_fn(|x| x.sin());
        assert!((got - (1.0 - 4f64.cos())).abs() < 1e-14);
    }
}
