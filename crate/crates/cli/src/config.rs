use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{usage, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    Goe,
    Gue,
    Gse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reference {
    Limit,
    Edgeworth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum RouteArg {
    /// Determinant representation with first-principles ε-quantities.
    #[default]
    Representation,
    /// Closed forms in a(t), b(t).
    ClosedForm,
    /// de Bruijn Pfaffian ratio.
    Pfaffian,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Tabulate,
    Limit,
    Edgeworth,
    Mc,
    Convergence,
    Validate,
}

#[derive(Debug, Parser)]
#[command(name = "largest-eig", version, about = "Largest-eigenvalue distributions of the Gaussian ensembles")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Finite-n CDF on a t-grid.
    Tabulate(Opts),
    /// Limiting (Tracy–Widom) CDF on an s-grid.
    Limit(Opts),
    /// Finite-n truth vs the n^{-1/3} expansion on an s-grid.
    Edgeworth(Opts),
    /// Monte Carlo sample of λ_max tested against the finite-n CDF.
    Mc(Opts),
    /// Sup-error vs n against the limit or the expansion.
    Convergence(Opts),
    /// Run the acceptance suite.
    Validate(ValidateOpts),
}

#[derive(Debug, Clone, Args)]
pub struct Opts {
    #[arg(long, value_enum, default_value = "gue")]
    pub ensemble: Ensemble,
    /// Matrix size (for GSE: the number of eigenvalues).
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    /// Fine-tuning constant in τ = √(2(n+c)) + 2^{-1/2} n^{-1/6} s.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub c: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub t_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub t_max: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub s_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub s_max: Option<f64>,
    #[arg(long, default_value_t = 41)]
    pub steps: usize,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long, value_enum, default_value = "limit")]
    pub reference: Reference,
    /// Comma-separated matrix sizes for `convergence`.
    #[arg(long, value_delimiter = ',', default_value = "20,40,80,160")]
    pub n_list: Vec<usize>,
    /// GSE: report against t = √2 u instead of the GSE argument u.
    #[arg(long)]
    pub gue_scale: bool,
    #[arg(long, value_enum, default_value = "representation")]
    pub route: RouteArg,
    /// GUE tabulation: add the exponential-formula column.
    #[arg(long)]
    pub compare: bool,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateOpts {
    /// Multiplies every tolerance; 0 forces failure.
    #[arg(long, default_value_t = 1.0)]
    pub tolerance_scale: f64,
    /// Run only these criteria (1-based, comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<usize>,
}

/// Fully resolved configuration of a run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub ensemble: Ensemble,
    pub n: usize,
    pub c: f64,
    pub t_min: f64,
    pub t_max: f64,
    pub steps: usize,
    pub samples: usize,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub format: Format,
    pub reference: Reference,
    pub n_list: Vec<usize>,
    pub gue_scale: bool,
    pub route: RouteArg,
    pub compare: bool,
}

pub const S_WINDOW: (f64, f64) = largest_eig::airy_limit::WINDOW;

impl RunConfig {
    pub fn from_opts(command: Command, o: &Opts) -> CliResult<Self> {
        if o.n == 0 {
            return usage("--n must be positive");
        }
        let uses_s = matches!(command, Command::Limit | Command::Edgeworth | Command::Convergence);
        let (lo, hi) = if uses_s {
            if o.t_min.is_some() || o.t_max.is_some() {
                return usage("this command takes --s-min/--s-max, not --t-min/--t-max");
            }
            (o.s_min.unwrap_or(-4.0), o.s_max.unwrap_or(2.0))
        } else {
            if o.s_min.is_some() || o.s_max.is_some() {
                return usage("this command takes --t-min/--t-max, not --s-min/--s-max");
            }
            let edge = edge_location(o.ensemble, o.n, o.gue_scale);
            (o.t_min.unwrap_or(edge - 4.0), o.t_max.unwrap_or(edge + 2.0))
        };
        let cfg = RunConfig {
            command,
            ensemble: o.ensemble,
            n: o.n,
            c: o.c,
            t_min: lo,
            t_max: hi,
            steps: o.steps,
            samples: o.samples,
            seed: o.seed,
            output_path: o.out.clone(),
            format: o.format,
            reference: o.reference,
            n_list: o.n_list.clone(),
            gue_scale: o.gue_scale,
            route: o.route,
            compare: o.compare,
        };
        cfg.check()?;
        Ok(cfg)
    }

    fn check(&self) -> CliResult<()> {
        if !(self.t_min.is_finite() && self.t_max.is_finite() && self.t_min < self.t_max) {
            return usage(format!("need a finite range with min < max, got [{}, {}]", self.t_min, self.t_max));
        }
        if self.steps < 2 {
            return usage("--steps must be at least 2");
        }
        if self.samples == 0 {
            return usage("--samples must be positive");
        }
        let finite_n = !matches!(self.command, Command::Limit | Command::Validate);
        if finite_n && self.ensemble == Ensemble::Goe && self.n % 2 != 0 {
            return usage(format!(
                "GOE finite-n distributions are only available for even n (the determinant representation \
                 holds for even n); got n = {}",
                self.n
            ));
        }
        if self.command == Command::Convergence {
            if self.n_list.len() < 3 || self.n_list.iter().any(|&n| n == 0) {
                return usage("--n-list needs at least three positive sizes");
            }
            if self.n_list.windows(2).any(|w| w[1] <= w[0]) {
                return usage("--n-list must be increasing");
            }
            if self.ensemble == Ensemble::Goe && self.n_list.iter().any(|n| n % 2 != 0) {
                return usage("GOE --n-list entries must be even");
            }
        }
        if matches!(self.command, Command::Limit | Command::Edgeworth | Command::Convergence)
            && (self.t_min < S_WINDOW.0 || self.t_max > S_WINDOW.1)
        {
            return usage(format!(
                "s-range [{}, {}] outside the supported window [{}, {}]",
                self.t_min, self.t_max, S_WINDOW.0, S_WINDOW.1
            ));
        }
        Ok(())
    }

    pub fn grid(&self) -> Vec<f64> {
        let h = (self.t_max - self.t_min) / (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| if i + 1 == self.steps { self.t_max } else { self.t_min + h * i as f64 })
            .collect()
    }
}

/// Typical location of λ_max on the scale the command reports in.
fn edge_location(e: Ensemble, n: usize, gue_scale: bool) -> f64 {
    match e {
        Ensemble::Gse => {
            let t = (2.0 * (2 * n + 1) as f64).sqrt();
            if gue_scale {
                t
            } else {
                t / std::f64::consts::SQRT_2
            }
        }
        _ => (2.0 * n as f64).sqrt(),
    }
}
