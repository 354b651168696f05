//! Command-line front end. [`run`] returns the process exit code:
//! 0 on success, 2 when a computed verdict is negative, 1 on errors.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::cubature::{
    point_cubature, representability_check, solve_truncated, summability, CubatureError,
    PseudoCubature, Representability,
};
use crate::decompose::{
    distributed_from_monomial, is_positive_definite_classical, is_pseudo_positive_definite_with,
    laplace_fourier_decompose, monomial_from_distributed, DecomposeError, DistributedMomentTable,
};
use crate::harmonics::SolidHarmonicBasis;
use crate::io::{
    cubature_from_json, cubature_to_json, lf_to_json, load_or_build_basis, moment_table_from_json,
    moment_table_to_json, monomial_table_to_csv, parse_moment_table, read_file, write_file,
    IoError, MomentTable,
};
use crate::polycore::{parse_poly, PolyError};
use crate::refmeasures::{
    dirac_counterexample_table, poisson_alpha_table, univariate_example_table, RefMeasureError,
};
use crate::stieltjes::{
    carleman_diagnostic, AtomicMeasure, CarlemanConfig, MomentSequence, StieltjesError,
    StieltjesOptions,
};

pub const BASIS_CACHE_ENV: &str = "PSEUDOMOMENT_BASIS_CACHE";

#[derive(Debug, Parser)]
#[command(
    name = "pseudomoment",
    version,
    about = "Pseudo-positive moment problems via distributed moments"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Ambient dimension d.
    #[arg(long, global = true, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    pub dimension: u32,
    /// Largest harmonic degree k_0.
    #[arg(long = "k-max", global = true, default_value_t = 4)]
    pub k_max: usize,
    /// Truncation order n (moments c_0..c_2n).
    #[arg(long, global = true, default_value_t = 2, value_parser = clap::value_parser!(u32).range(1..))]
    pub order: u32,
    /// Polynomial degree the point cubature must integrate exactly.
    #[arg(long = "angular-degree", global = true, default_value_t = 4)]
    pub angular_degree: usize,
    #[arg(long = "psd-eps", global = true, default_value_t = 1e-10, value_parser = positive_f64)]
    pub psd_eps: f64,
    #[arg(long = "zero-node-eps", global = true, default_value_t = 1e-12, value_parser = positive_f64)]
    pub zero_node_eps: f64,
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Report errors as JSON objects on stderr.
    #[arg(long = "json-errors", global = true)]
    pub json_errors: bool,
    /// Directory for cached basis JSON files.
    #[arg(long = "basis-cache", global = true, env = BASIS_CACHE_ENV)]
    pub basis_cache: Option<PathBuf>,
}

fn positive_f64(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v > 0.0 && v.is_finite() => Ok(v),
        Ok(v) => Err(format!("tolerance must be positive, got {v}")),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableKind {
    Distributed,
    Monomial,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Polynomial -> Laplace-Fourier components JSON.
    Decompose {
        /// Polynomial such as "x1^2 - 3*x1*x2"; read from --input when absent.
        #[arg(long)]
        poly: Option<String>,
    },
    /// Convert between monomial (CSV) and distributed (JSON) tables.
    Convert {
        #[arg(long, value_enum)]
        to: TableKind,
        /// Degree cap D for monomial output.
        #[arg(long)]
        degree: Option<usize>,
    },
    /// Pseudo-positive-definiteness verdict (classical PSD test for CSV input).
    Check,
    /// Moment table -> component measures (shell-form cubature JSON).
    Solve,
    /// Shell-form cubature -> signed point rule.
    Cubature,
    /// Integrate a polynomial against a cubature.
    Integrate {
        #[arg(long)]
        poly: String,
    },
    /// Summability, representability and Carleman diagnostics.
    Diagnose {
        /// Largest N for C_N.
        #[arg(long = "n-max", default_value_t = 4)]
        n_max: usize,
    },
    /// Emit a reference moment table.
    Refmeasure {
        #[command(subcommand)]
        kind: RefKind,
    },
}

#[derive(Debug, Subcommand)]
pub enum RefKind {
    /// Damped Poisson kernel (1 - r^alpha) P(r e^{it}) on the unit disk (d = 2).
    PoissonAlpha {
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
    },
    /// T(f) = ∫ f dσ - ∫ f(-x) dσ on [a, b] (d = 1).
    Univariate {
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        #[arg(long, default_value_t = 1.0)]
        b: f64,
        /// Atoms of σ as "r:w" pairs separated by commas.
        #[arg(long, default_value = "1:1")]
        atoms: String,
    },
    /// Dirac functional at r = 0 in component (1,1).
    Dirac {
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
    },
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Decompose(#[from] DecomposeError),
    #[error(transparent)]
    Cubature(#[from] CubatureError),
    #[error(transparent)]
    Stieltjes(#[from] StieltjesError),
    #[error(transparent)]
    RefMeasure(#[from] RefMeasureError),
    #[error(transparent)]
    Harmonics(#[from] crate::harmonics::HarmonicsError),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io(IoError::File { .. }) => "file",
            CliError::Io(IoError::Schema(_) | IoError::Csv(_)) => "schema",
            CliError::Io(IoError::Table(_)) | CliError::Decompose(_) => "table",
            CliError::Io(IoError::Harmonics(_)) | CliError::Harmonics(_) => "basis",
            CliError::Poly(_) => "polynomial",
            CliError::Cubature(_) => "cubature",
            CliError::Stieltjes(_) => "stieltjes",
            CliError::RefMeasure(_) => "refmeasure",
        }
    }
}

/// Successful command output plus whether the verdict was negative.
struct Outcome {
    text: String,
    negative: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn ok(text: String) -> Self {
        Outcome {
            text,
            negative: false,
            notes: Vec::new(),
        }
    }
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("serializable")
}

impl RunConfig {
    fn stieltjes(&self) -> StieltjesOptions {
        StieltjesOptions {
            psd_eps: self.psd_eps,
            zero_node_eps: self.zero_node_eps,
            ..StieltjesOptions::default()
        }
    }

    fn basis(&self, d: usize, k_max: usize) -> Result<SolidHarmonicBasis, CliError> {
        Ok(load_or_build_basis(d, k_max, self.basis_cache.as_deref())?)
    }

    fn input(&self) -> Result<&Path, CliError> {
        self.input
            .as_deref()
            .ok_or_else(|| CliError::Usage("--input is required for this command".into()))
    }

    fn table(&self) -> Result<(DistributedMomentTable, SolidHarmonicBasis), CliError> {
        let tbl = moment_table_from_json(&read_file(self.input()?)?)?;
        let basis = self.basis(tbl.dim(), tbl.k_max())?;
        tbl.check_basis(&basis)?;
        Ok((tbl, basis))
    }
}

fn read_poly_arg(cfg: &RunConfig, poly: &Option<String>) -> Result<String, CliError> {
    match poly {
        Some(p) => Ok(p.clone()),
        None => Ok(read_file(cfg.input()?)?.trim().to_string()),
    }
}

fn complex_json(v: Complex64) -> serde_json::Value {
    json!({ "value": v.re, "imag": v.im })
}

fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = &cli.config;
    let d = cfg.dimension as usize;
    let n = cfg.order as usize;
    match &cli.command {
        Command::Decompose { poly } => {
            let text = read_poly_arg(cfg, poly)?;
            let p = parse_poly(&text, d)?;
            let k = cfg.k_max.max(p.degree().max(0) as usize);
            let basis = cfg.basis(d, k)?;
            Ok(Outcome::ok(lf_to_json(&laplace_fourier_decompose(
                &p, &basis,
            )?)))
        }
        Command::Convert { to, degree } => {
            let input = cfg.input()?;
            match (parse_moment_table(input, None)?, to) {
                (MomentTable::Monomial(m), TableKind::Distributed) => {
                    let basis = cfg.basis(m.dim(), cfg.k_max)?;
                    let tbl = distributed_from_monomial(&m, &basis, n, cfg.k_max)?;
                    Ok(Outcome::ok(moment_table_to_json(&tbl)))
                }
                (MomentTable::Distributed(tbl), TableKind::Monomial) => {
                    let basis = cfg.basis(tbl.dim(), tbl.k_max())?;
                    let deg = degree.unwrap_or(tbl.k_max().min(2 * tbl.order()));
                    let m = monomial_from_distributed(&tbl, &basis, deg)?;
                    Ok(Outcome::ok(monomial_table_to_csv(&m)))
                }
                (MomentTable::Monomial(m), TableKind::Monomial) => {
                    Ok(Outcome::ok(monomial_table_to_csv(&m)))
                }
                (MomentTable::Distributed(t), TableKind::Distributed) => {
                    Ok(Outcome::ok(moment_table_to_json(&t)))
                }
            }
        }
        Command::Check => match parse_moment_table(cfg.input()?, None)? {
            MomentTable::Distributed(tbl) => {
                let basis = cfg.basis(tbl.dim(), tbl.k_max())?;
                tbl.check_basis(&basis)?;
                let verdict = is_pseudo_positive_definite_with(&tbl, cfg.psd_eps);
                Ok(Outcome {
                    negative: !verdict.passed(),
                    text: pretty(&verdict),
                    notes: Vec::new(),
                })
            }
            MomentTable::Monomial(m) => {
                let verdict = is_positive_definite_classical(&m, m.degree() / 2)?;
                Ok(Outcome {
                    negative: !verdict.passed(),
                    text: pretty(&verdict),
                    notes: Vec::new(),
                })
            }
        },
        Command::Solve => {
            let (tbl, basis) = cfg.table()?;
            let (cms, diag) = solve_truncated(&tbl, &basis, &cfg.stieltjes())?;
            let zero = diag.zero_node_components();
            let notes = zero
                .iter()
                .map(|(k, l)| format!("node at zero, component ({k},{l})"))
                .collect();
            Ok(Outcome {
                text: cubature_to_json(&PseudoCubature::shell_form(&cms, 2 * n - 1)),
                negative: !zero.is_empty(),
                notes,
            })
        }
        Command::Cubature => {
            let cub = cubature_from_json(&read_file(cfg.input()?)?)?;
            let basis = cfg.basis(cub.dimension, cub.k_max)?;
            let cms = cub.component_measures(&basis)?;
            Ok(Outcome::ok(cubature_to_json(&point_cubature(
                &cms,
                &basis,
                cfg.angular_degree,
            )?)))
        }
        Command::Integrate { poly } => {
            let cub = cubature_from_json(&read_file(cfg.input()?)?)?;
            let p = parse_poly(poly, cub.dimension)?;
            let deg = p.degree().max(0) as usize;
            let (value, method) = match cub.integrate_points(&p) {
                Some(v) if deg <= cub.degree => (v, "points"),
                _ => {
                    let basis = cfg.basis(cub.dimension, cub.k_max.max(deg))?;
                    (cub.integrate_shells(&p, &basis)?, "shells")
                }
            };
            let mut out = complex_json(value);
            out["method"] = json!(method);
            Ok(Outcome::ok(pretty(&out)))
        }
        Command::Diagnose { n_max } => diagnose(cfg, *n_max),
        Command::Refmeasure { kind } => {
            let tbl = match kind {
                RefKind::PoissonAlpha { alpha } => {
                    let basis = cfg.basis(2, cfg.k_max)?;
                    poisson_alpha_table(*alpha, &basis, n, cfg.k_max)?
                }
                RefKind::Univariate { a, b, atoms } => {
                    let basis = cfg.basis(1, 1)?;
                    univariate_example_table(*a, *b, &parse_atoms(atoms)?, n, &basis)?
                }
                RefKind::Dirac { radius } => {
                    let basis = cfg.basis(d.max(2), cfg.k_max.max(1))?;
                    dirac_counterexample_table(&basis, n, *radius)?
                }
            };
            Ok(Outcome::ok(moment_table_to_json(&tbl)))
        }
    }
}

fn parse_atoms(text: &str) -> Result<AtomicMeasure, CliError> {
    let atoms = text
        .split(',')
        .map(|pair| {
            let (r, w) = pair
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("atom {pair:?} is not of the form r:w")))?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::Usage(format!("atom {pair:?}: {e}")))
            };
            Ok((parse(r)?, parse(w)?))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(AtomicMeasure::from_unsorted(atoms)?)
}

fn diagnose(cfg: &RunConfig, n_max: usize) -> Result<Outcome, CliError> {
    let text = read_file(cfg.input()?)?;
    // A moment table carries "entries"; anything else is read as a cubature.
    let is_table = serde_json::from_str::<serde_json::Value>(&text)
        .map_err(IoError::from)?
        .get("entries")
        .is_some();
    let mut report = serde_json::Map::new();
    let cms = if is_table {
        let (tbl, basis) = cfg.table()?;
        let carleman: Vec<_> = tbl
            .components()
            .map(|(k, l, c)| {
                let s = MomentSequence::new(c.to_vec())?;
                let r = carleman_diagnostic(&s, &CarlemanConfig::default());
                Ok(json!({ "k": k, "l": l, "verdict": r.verdict, "partial_sum": r.partial_sum }))
            })
            .collect::<Result<_, StieltjesError>>()?;
        report.insert("carleman".into(), json!(carleman));
        solve_truncated(&tbl, &basis, &cfg.stieltjes())?.0
    } else {
        let cub = cubature_from_json(&text)?;
        let basis = cfg.basis(cub.dimension, cub.k_max)?;
        cub.component_measures(&basis)?
    };
    let summ = summability(&cms, n_max);
    let rep = representability_check(&cms, cfg.zero_node_eps);
    let negative = rep != Representability::Ok;
    let mut notes = Vec::new();
    if let Representability::Rejected { reason, .. } = &rep {
        notes.push(reason.clone());
    }
    report.insert("summability".into(), json!(summ));
    report.insert("representability".into(), json!(rep));
    Ok(Outcome {
        text: pretty(&report),
        negative,
        notes,
    })
}

fn emit(cfg: &RunConfig, text: &str) -> Result<(), CliError> {
    match &cfg.output {
        Some(path) => Ok(write_file(path, text)?),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

/// Runs a parsed command line and returns the exit code.
pub fn run(cli: &Cli) -> i32 {
    let cfg = &cli.config;
    let result = execute(cli).and_then(|out| {
        emit(cfg, &out.text)?;
        Ok(out)
    });
    match result {
        Ok(out) => {
            for note in &out.notes {
                if cfg.json_errors {
                    eprintln!("{}", json!({ "diagnostic": note }));
                } else {
                    eprintln!("diagnostic: {note}");
                }
            }
            if out.negative {
                2
            } else {
                0
            }
        }
        Err(e) => {
            if cfg.json_errors {
                eprintln!("{}", json!({ "error": e.kind(), "message": e.to_string() }));
            } else {
                eprintln!("error: {e}");
            }
            1
        }
    }
}

/// Parses `args` (including the program name) and runs them.
pub fn run_from_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            code
        }
    }
}
