//! The acceptance suite shared by `largest-eig validate` and the `acceptance`
//! test target. Every tolerance is multiplied by `scale`, so `scale = 0`
//! guarantees failure.

use std::f64::consts::SQRT_2;
use std::time::Instant;

use largest_eig::airy_limit::{airy_bundle, f2_limit, hastings_mcleod_q, LimitMethod};
use largest_eig::ensemble_mc::{ks_critical_1pct, sample_lambda_max};
use largest_eig::finite_n::{
    c_constants, epsilon_closed, epsilon_closed_from, epsilon_numeric, f_n1, f_n2, f_n4, gse_assembly, F2Method,
    FiniteN, Route,
};
use largest_eig::special::{airy, erf};

use crate::commands::{beta, expansion_point, ks_against_analytic, limit_law, sup_errors, fit_exponent};
use crate::config::{Command, Ensemble, Format, Opts, Reference, RouteArg, RunConfig};
use crate::output::write_table;

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: usize,
    pub title: &'static str,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {}: {} ({:.1} s)",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.seconds
        )
    }
}

type Outcome = Result<(bool, String), String>;
type Check = fn(f64) -> Outcome;

pub const CRITERIA: [(&str, Check); 10] = [
    ("n=1 exactness", n1_exactness),
    ("dual-path F_{n,2}", dual_path),
    ("brute-force small n", brute_force),
    ("epsilon closed forms vs numerics", epsilon_cross_check),
    ("Monte Carlo KS", monte_carlo),
    ("Airy-side identities", airy_identities),
    ("GUE convergence rates", convergence_rates),
    ("Edgeworth improvement", edgeworth_improvement),
    ("CDF axioms", cdf_axioms),
    ("determinism", determinism),
];

/// Runs the selected criteria (all when `only` is empty), calling `report`
/// as each one finishes.
pub fn run_suite(scale: f64, only: &[usize], mut report: impl FnMut(&CriterionResult)) -> Vec<CriterionResult> {
    let mut out = Vec::new();
    for (i, (title, check)) in CRITERIA.iter().enumerate() {
        let id = i + 1;
        if !only.is_empty() && !only.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let (pass, detail) = match check(scale) {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e}")),
        };
        let r = CriterionResult { id, title, pass, detail, seconds: start.elapsed().as_secs_f64() };
        report(&r);
        out.push(r);
    }
    out
}

fn lib<T>(r: largest_eig::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn erf_cdf(t: f64) -> f64 {
    0.5 * (1.0 + erf(t))
}

fn linspace(a: f64, b: f64, k: usize) -> Vec<f64> {
    (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect()
}

/// |x − centre| < half-width · scale for the band [lo, hi].
fn in_band(x: f64, lo: f64, hi: f64, scale: f64) -> bool {
    (x - 0.5 * (lo + hi)).abs() < 0.5 * (hi - lo) * scale
}

fn n1_exactness(scale: f64) -> Outcome {
    let tol = 1e-8 * scale;
    let mut worst = 0.0f64;
    for t in linspace(-3.0, 3.0, 51) {
        let want = erf_cdf(t);
        worst = worst.max((lib(f_n2(1, t, F2Method::Determinant))? - want).abs());
        worst = worst.max((lib(f_n4(1, t / SQRT_2, Route::Representation))? - want).abs());
    }
    Ok((worst < tol, format!("max error {worst:.2e} (tol {tol:.1e})")))
}

fn dual_path(scale: f64) -> Outcome {
    let tol = 1e-6 * scale;
    let mut worst = 0.0f64;
    for n in [2usize, 4, 9] {
        let edge = (2.0 * n as f64).sqrt();
        for t in linspace(edge - 4.0, edge + 2.0, 21) {
            let d = lib(f_n2(n, t, F2Method::Determinant))?;
            let e = lib(f_n2(n, t, F2Method::Exponential))?;
            worst = worst.max((d - e).abs());
        }
    }
    Ok((worst < tol, format!("max |det − exp| {worst:.2e} over n ∈ {{2,4,9}} (tol {tol:.1e})")))
}

// 2-D adaptive quadrature of the joint eigenvalue density for two eigenvalues.
const GUE2: [(f64, f64); 3] = [(-1.0, 0.0009705008790354444), (0.0, 0.09084505690810467), (1.0, 0.6361175451184529)];
const GOE2: [(f64, f64); 3] = [(-1.0, 0.01060522719418663), (0.0, 0.14644660101260887), (1.0, 0.5605128332298193)];

fn brute_force(scale: f64) -> Outcome {
    let tol = 1e-6 * scale;
    let mut worst = 0.0f64;
    for (&(t, g2), &(_, g1)) in GUE2.iter().zip(&GOE2) {
        worst = worst.max((lib(f_n2(2, t, F2Method::Determinant))? - g2).abs());
        worst = worst.max((lib(f_n1(2, t, Route::Representation))? - g1).abs());
    }
    Ok((worst < tol, format!("max error {worst:.2e} vs brute force (tol {tol:.1e})")))
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn epsilon_cross_check(scale: f64) -> Outcome {
    let tol = 1e-5 * scale;
    let mut worst = (0.0f64, String::new());
    for n in [4usize, 5] {
        let edge = (2.0 * n as f64).sqrt();
        for dt in [-2.0, -1.0, 0.0, 1.0, 2.0] {
            let t = edge + dt;
            let num = lib(epsilon_numeric(n, t))?;
            let cl = lib(epsilon_closed(n, t))?;
            let mut pairs = vec![("v~", num.v_tilde_eps, cl.v_tilde_eps), ("q_eps", num.q_eps, cl.q_eps)];
            if n % 2 == 0 {
                pairs.push(("P1", num.p1.unwrap_or(f64::NAN), cl.p1.unwrap_or(f64::NAN)));
                pairs.push(("R1", num.r1.unwrap_or(f64::NAN), cl.r1.unwrap_or(f64::NAN)));
            } else {
                pairs.push(("P4", num.p4.unwrap_or(f64::NAN), cl.p4.unwrap_or(f64::NAN)));
                pairs.push(("R4", num.r4.unwrap_or(f64::NAN), cl.r4.unwrap_or(f64::NAN)));
            }
            for (name, a, b) in pairs {
                let r = rel(b, a);
                if !(r <= worst.0) {
                    worst = (r, format!("{name} at n={n}, t={t:.3}: closed {b:.6} vs numeric {a:.6}"));
                }
            }
        }
    }
    // c_ψ must drop out of the GSE assembly
    let fe = lib(FiniteN::new(5))?;
    let (c_phi, c_psi) = lib(c_constants(5))?;
    let mut drop = 0.0f64;
    for dt in [-2.0, -1.0, 0.0, 1.0, 2.0] {
        let t = 10f64.sqrt() + dt;
        let (a, b) = lib(fe.ab(t))?;
        let f2 = lib(fe.f_n2(t, F2Method::Determinant))?;
        let x = gse_assembly(f2, &epsilon_closed_from(5, a, b, c_phi, c_psi)).unwrap_or(f64::NAN);
        let y = gse_assembly(f2, &epsilon_closed_from(5, a, b, c_phi, 0.0)).unwrap_or(f64::NAN);
        drop = drop.max((x - y).abs());
    }
    let drop_ok = drop < 1e-10 * scale;
    let pass = worst.0 < tol && drop_ok;
    Ok((
        pass,
        format!(
            "worst relative gap {:.2e} (tol {tol:.1e}; {}); c_psi drop-out {drop:.1e} ({})",
            worst.0,
            worst.1,
            if drop_ok { "ok" } else { "fails" }
        ),
    ))
}

fn monte_carlo(scale: f64) -> Outcome {
    const N: usize = 100_000;
    let crit = ks_critical_1pct(N) * scale;
    let cases = [
        (Ensemble::Gue, 2usize, 20_261u64),
        (Ensemble::Goe, 2, 20_262),
        (Ensemble::Goe, 4, 20_263),
        (Ensemble::Gse, 1, 20_264),
        (Ensemble::Gse, 3, 20_265),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (e, n, seed) in cases {
        let run = lib(sample_lambda_max(beta(e), n, N, seed))?;
        let ks = lib(ks_against_analytic(&run))?;
        pass &= ks < crit;
        parts.push(format!("{e:?} n={n}: {ks:.4}").to_lowercase());
    }
    Ok((pass, format!("{} (critical {crit:.4})", parts.join(", "))))
}

fn airy_identities(scale: f64) -> Outcome {
    let mut nu_gap = 0.0f64;
    for s in [-4.0, -2.0, -1.0, 0.0, 1.0, 2.0] {
        let b = lib(airy_bundle(s))?;
        nu_gap = nu_gap.max((b.nu - (b.alpha - b.q[0])).abs());
    }
    let h = 1e-3;
    let mut residual = 0.0f64;
    for s in linspace(-4.0, 2.0, 25) {
        let q = |x: f64| lib(hastings_mcleod_q(x));
        let (qm, q0, qp) = (q(s - h)?, q(s)?, q(s + h)?);
        residual = residual.max(((qp - 2.0 * q0 + qm) / (h * h) - s * q0 - 2.0 * q0.powi(3)).abs());
    }
    let ratio = (lib(hastings_mcleod_q(5.0))? / airy(5.0).0 - 1.0).abs();
    let mut dual = 0.0f64;
    for s in [-6.0, -3.0, -1.0, 0.0, 2.0, 5.0] {
        let e = lib(f2_limit(s, LimitMethod::Exponential))?;
        let d = lib(f2_limit(s, LimitMethod::Determinant))?;
        dual = dual.max((e - d).abs());
    }
    let pass = nu_gap < 1e-8 * scale && residual < 1e-4 * scale && ratio < 1e-4 * scale && dual < 1e-7 * scale;
    Ok((
        pass,
        format!("|nu − (alpha − q)| {nu_gap:.1e}, PII residual {residual:.1e}, |q/Ai − 1|(5) {ratio:.1e}, F2 dual path {dual:.1e}"),
    ))
}

const RATE_NS: [usize; 4] = [20, 40, 80, 160];

fn convergence_rates(scale: f64) -> Outcome {
    let grid = linspace(-3.0, 1.0, 17);
    let slope = |c: f64| -> Result<f64, String> {
        let errs = lib(sup_errors(Ensemble::Gue, &RATE_NS, c, &grid, Reference::Limit, Route::Representation))?;
        Ok(fit_exponent(&RATE_NS, &errs))
    };
    let (s0, s1) = (slope(0.0)?, slope(1.0)?);
    let pass = in_band(s0, -0.87, -0.47, scale) && in_band(s1, -0.48, -0.18, scale);
    Ok((pass, format!("fitted exponent c=0: {s0:.3} (want [−0.87, −0.47]), c=1: {s1:.3} (want [−0.48, −0.18])")))
}

fn edgeworth_improvement(scale: f64) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    // GSE: 50 eigenvalues, i.e. Hermite kernel index 101
    for (e, n) in [(Ensemble::Gue, 100usize), (Ensemble::Goe, 100), (Ensemble::Gse, 50)] {
        let mut worst_ratio = 0.0f64;
        for s in [-2.0, -1.0, 0.0] {
            let (truth, ex) = lib(expansion_point(e, n, 0.0, s, Route::Representation))?;
            let ratio = (ex.combined - truth).abs() / (ex.leading - truth).abs();
            worst_ratio = worst_ratio.max(ratio);
        }
        let ok = worst_ratio < scale;
        pass &= ok;
        parts.push(format!("{e:?} max |combined err|/|leading err| {worst_ratio:.3}").to_lowercase());
    }
    let ns = [40usize, 160];
    let errs = lib(sup_errors(Ensemble::Gue, &ns, 0.0, &[-2.0, -1.0, 0.0], Reference::Edgeworth, Route::Representation))?;
    let slope = fit_exponent(&ns, &errs);
    let ok = in_band(slope, -1.4, -0.6, scale);
    pass &= ok;
    parts.push(format!("GUE second-order exponent {slope:.3} (want [−1.4, −0.6])"));
    Ok((pass, parts.join("; ")))
}

fn check_cdf(values: &[f64], scale: f64) -> bool {
    let first = values[0];
    let last = values[values.len() - 1];
    values.windows(2).all(|w| w[1] >= w[0] - 1e-12) && first < 1e-3 * scale && 1.0 - last < 1e-6 * scale
}

fn cdf_axioms(scale: f64) -> Outcome {
    let mut failures = Vec::new();
    let mut count = 0;
    let collect = |xs: &[f64], f: &dyn Fn(f64) -> largest_eig::Result<f64>| -> Result<Vec<f64>, String> {
        xs.iter().map(|&x| lib(f(x))).collect()
    };
    for n in 1usize..=6 {
        let grid = linspace(-2.0 * (n as f64).sqrt() - 2.0, (2.0 * n as f64).sqrt() + 4.0, 41);
        let gue = collect(&grid, &|t| f_n2(n, t, F2Method::Determinant))?;
        count += 1;
        if !check_cdf(&gue, scale) {
            failures.push(format!("gue n={n}"));
        }
        if n % 2 == 0 {
            let goe = collect(&grid, &|t| f_n1(n, t, Route::Representation))?;
            count += 1;
            if !check_cdf(&goe, scale) {
                failures.push(format!("goe n={n}"));
            }
        }
        let k = (2 * n + 1) as f64;
        let ugrid = linspace((-2.0 * k.sqrt() - 2.0) / SQRT_2, ((2.0 * k).sqrt() + 4.0) / SQRT_2, 41);
        let gse = collect(&ugrid, &|u| f_n4(n, u, Route::Representation))?;
        count += 1;
        if !check_cdf(&gse, scale) {
            failures.push(format!("gse n={n}"));
        }
    }
    let sgrid = linspace(-8.0, 8.0, 101);
    for e in [Ensemble::Gue, Ensemble::Goe, Ensemble::Gse] {
        let vals = lib(largest_eig::par::try_map(&sgrid, |&s| limit_law(e, s)))?;
        count += 1;
        if !check_cdf(&vals, scale) {
            failures.push(format!("{e:?} limit").to_lowercase());
        }
    }
    let detail = if failures.is_empty() {
        format!("{count} distributions monotone with endpoint values in range")
    } else {
        format!("violations: {}", failures.join(", "))
    };
    Ok((failures.is_empty(), detail))
}

fn render(command: Command, opts: &Opts) -> Result<Vec<u8>, String> {
    let cfg = RunConfig::from_opts(command, opts).map_err(|e| e.to_string())?;
    let table = match command {
        Command::Mc => crate::commands::mc(&cfg).map(|r| r.0),
        _ => crate::commands::tabulate(&cfg),
    }
    .map_err(|e| e.to_string())?;
    let mut buf = Vec::new();
    write_table(&table, &cfg, "determinism", &mut buf).map_err(|e| e.to_string())?;
    Ok(buf)
}

fn determinism(scale: f64) -> Outcome {
    let base = Opts {
        ensemble: Ensemble::Gue,
        n: 2,
        c: 0.0,
        t_min: None,
        t_max: None,
        s_min: None,
        s_max: None,
        steps: 21,
        samples: 20_000,
        seed: 7,
        out: None,
        format: Format::Csv,
        reference: Reference::Limit,
        n_list: vec![],
        gue_scale: false,
        route: RouteArg::Representation,
        compare: false,
    };
    let mc = Opts { ensemble: Ensemble::Gse, n: 3, ..base.clone() };
    let tab = Opts { ensemble: Ensemble::Goe, n: 4, format: Format::Json, ..base };
    let same_mc = render(Command::Mc, &mc)? == render(Command::Mc, &mc)?;
    let same_tab = render(Command::Tabulate, &tab)? == render(Command::Tabulate, &tab)?;
    let pass = same_mc && same_tab && scale > 0.0;
    Ok((pass, format!("mc identical: {same_mc}, tabulate identical: {same_tab}")))
}
