//! One function per subcommand, each producing a [`Table`]. Rows are computed
//! with `par::try_map`, so output order is the input order.

use std::f64::consts::SQRT_2;

use largest_eig::airy_limit::{
    airy_bundle, edgeworth_f1_sq_from, edgeworth_f2_from, edgeworth_f4_sq_from, f2_limit, tau, EdgeworthResult,
    EtaConvention, LimitMethod,
};
use largest_eig::ensemble_mc::{ks_critical_1pct, ks_statistic, sample_lambda_max, Beta, McRun};
use largest_eig::exact::{goe_pfaffian_sorted, gse_pfaffian_sorted, gue_gram};
use largest_eig::finite_n::{f_n1, f_n2, f_n4, F2Method, Route};
use largest_eig::par;

use crate::config::{Ensemble, Reference, RouteArg, RunConfig};
use crate::error::CliResult;
use crate::output::Table;

pub fn route(r: RouteArg) -> Route {
    match r {
        RouteArg::Representation => Route::Representation,
        RouteArg::ClosedForm => Route::ClosedForm,
        RouteArg::Pfaffian => Route::Pfaffian,
    }
}

/// Finite-n CDF on the command's reporting scale.
pub fn finite_cdf(e: Ensemble, n: usize, t: f64, r: Route, gue_scale: bool) -> largest_eig::Result<f64> {
    match e {
        Ensemble::Gue => f_n2(n, t, F2Method::Determinant),
        Ensemble::Goe => f_n1(n, t, r),
        Ensemble::Gse => f_n4(n, if gue_scale { t / SQRT_2 } else { t }, r),
    }
}

pub fn tabulate(cfg: &RunConfig) -> CliResult<Table> {
    let compare = cfg.compare && cfg.ensemble == Ensemble::Gue;
    let mut table = Table::new(if compare { &["t", "F", "F_exponential", "difference"] } else { &["t", "F"] });
    let r = route(cfg.route);
    let rows = par::try_map(&cfg.grid(), |&t| -> largest_eig::Result<Vec<f64>> {
        let f = finite_cdf(cfg.ensemble, cfg.n, t, r, cfg.gue_scale)?;
        if compare {
            let g = f_n2(cfg.n, t, F2Method::Exponential)?;
            Ok(vec![t, f, g, g - f])
        } else {
            Ok(vec![t, f])
        }
    })?;
    rows.into_iter().for_each(|row| table.push(row));
    Ok(table)
}

/// Leading-order limit law at s: F₂, F₁ = (F₂e^{−μ})^{1/2}, F₄ = cosh(μ/2)F₂^{1/2}.
pub fn limit_law(e: Ensemble, s: f64) -> largest_eig::Result<f64> {
    if e == Ensemble::Gue {
        return f2_limit(s, LimitMethod::Exponential);
    }
    let b = airy_bundle(s)?;
    Ok(match e {
        Ensemble::Goe => (b.f2() * (-b.mu).exp()).sqrt(),
        _ => (0.5 * b.mu).cosh() * b.f2().sqrt(),
    })
}

pub fn limit(cfg: &RunConfig) -> CliResult<Table> {
    let mut table = Table::new(&["s", "F"]);
    for row in par::try_map(&cfg.grid(), |&s| limit_law(cfg.ensemble, s).map(|f| vec![s, f]))? {
        table.push(row);
    }
    Ok(table)
}

/// The Hermite kernel index the expansions are written in: the matrix size
/// for GUE/GOE, 2m + 1 for a GSE of size m.
pub fn kernel_index(e: Ensemble, n: usize) -> usize {
    if e == Ensemble::Gse {
        2 * n + 1
    } else {
        n
    }
}

/// Finite-n truth at τ(s) on the expansion's scale (squared for GOE/GSE) and the expansion.
pub fn expansion_point(e: Ensemble, n: usize, c: f64, s: f64, r: Route) -> largest_eig::Result<(f64, EdgeworthResult)> {
    let big_n = kernel_index(e, n);
    let t = tau(big_n, c, s)?;
    let b = airy_bundle(s)?;
    Ok(match e {
        Ensemble::Gue => (f_n2(n, t, F2Method::Determinant)?, edgeworth_f2_from(&b, big_n, c)?),
        Ensemble::Goe => (f_n1(n, t, r)?.powi(2), edgeworth_f1_sq_from(&b, big_n, c, EtaConvention::default())?),
        Ensemble::Gse => {
            (f_n4(n, t / SQRT_2, r)?.powi(2), edgeworth_f4_sq_from(&b, big_n, c, EtaConvention::default())?)
        }
    })
}

pub fn edgeworth(cfg: &RunConfig) -> CliResult<Table> {
    let mut table =
        Table::new(&["s", "finite_n", "leading", "first_order", "second_order", "combined", "error"]);
    let big_n = kernel_index(cfg.ensemble, cfg.n) as f64;
    let m = big_n.powf(-1.0 / 3.0);
    let r = route(cfg.route);
    let rows = par::try_map(&cfg.grid(), |&s| -> largest_eig::Result<Vec<f64>> {
        let (truth, ex) = expansion_point(cfg.ensemble, cfg.n, cfg.c, s, r)?;
        let first = m * ex.order_one_third;
        let second = m * m * ex.order_two_thirds;
        Ok(vec![s, truth, ex.leading, first, second, ex.combined, ex.combined - truth])
    })?;
    rows.into_iter().for_each(|row| table.push(row));
    Ok(table)
}

pub fn beta(e: Ensemble) -> Beta {
    match e {
        Ensemble::Goe => Beta::One,
        Ensemble::Gue => Beta::Two,
        Ensemble::Gse => Beta::Four,
    }
}

/// KS distance between a run and its analytic finite-n CDF.
///
/// The reference is the exact small-matrix form (Gram determinant or
/// Pfaffian), evaluated in one sweep over the sorted samples; GSE samples are
/// on the GSE scale and are compared with F_{n,4} at the same argument.
pub fn ks_against_analytic(run: &McRun) -> largest_eig::Result<f64> {
    let n = run.n;
    let values = match run.beta {
        Beta::Two => return Ok(ks_statistic(run, |t| gue_gram(n, t).unwrap_or(f64::NAN))),
        Beta::One => goe_pfaffian_sorted(n, &run.samples)?,
        Beta::Four => gse_pfaffian_sorted(n, &run.samples)?,
    };
    let count = run.count as f64;
    Ok(values
        .iter()
        .enumerate()
        .map(|(i, &f)| (f - i as f64 / count).max((i + 1) as f64 / count - f))
        .fold(0.0, f64::max))
}

pub fn mc(cfg: &RunConfig) -> CliResult<(Table, bool)> {
    let run = sample_lambda_max(beta(cfg.ensemble), cfg.n, cfg.samples, cfg.seed)?;
    let ks = ks_against_analytic(&run)?;
    let crit = ks_critical_1pct(cfg.samples);
    let pass = ks < crit;
    let mut table = Table::new(&["n", "samples", "ks", "critical_value_1pct", "pass"]);
    table.push(vec![cfg.n as f64, cfg.samples as f64, ks, crit, if pass { 1.0 } else { 0.0 }]);
    Ok((table, pass))
}

/// sup over the s-grid of |finite-n truth − reference| for each n.
pub fn sup_errors(
    e: Ensemble,
    ns: &[usize],
    c: f64,
    s_grid: &[f64],
    reference: Reference,
    r: Route,
) -> largest_eig::Result<Vec<f64>> {
    let pts: Vec<(usize, f64)> = ns.iter().flat_map(|&n| s_grid.iter().map(move |&s| (n, s))).collect();
    let errs = par::try_map(&pts, |&(n, s)| -> largest_eig::Result<f64> {
        let (truth, ex) = expansion_point(e, n, c, s, r)?;
        let reference = match reference {
            Reference::Limit => ex.leading,
            Reference::Edgeworth => ex.combined,
        };
        Ok((truth - reference).abs())
    })?;
    Ok(errs.chunks(s_grid.len()).map(|c| c.iter().cloned().fold(0.0, f64::max)).collect())
}

/// Least-squares slope of ln(err) against ln(n).
pub fn fit_exponent(ns: &[usize], errs: &[f64]) -> f64 {
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
    let k = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / k, ys.iter().sum::<f64>() / k);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

/// Rows {n, sup_error, rate_estimate}: the rate is the decay exponent from the
/// previous n (blank on the first row). Also returns the fitted exponent over
/// all n.
pub fn convergence(cfg: &RunConfig) -> CliResult<(Table, f64)> {
    let ns = &cfg.n_list;
    let errs = sup_errors(cfg.ensemble, ns, cfg.c, &cfg.grid(), cfg.reference, route(cfg.route))?;
    let mut table = Table::new(&["n", "sup_error", "rate_estimate"]);
    for i in 0..ns.len() {
        let rate = if i == 0 {
            f64::NAN
        } else {
            -(errs[i] / errs[i - 1]).ln() / (ns[i] as f64 / ns[i - 1] as f64).ln()
        };
        table.push(vec![ns[i] as f64, errs[i], rate]);
    }
    Ok((table, -fit_exponent(ns, &errs)))
}
