//! Command-line front end: counting tables, Poincaré functions, invariant
//! reports for metric files and verification suites.
//!
//! Exit codes: 0 success, 1 domain error or failed verification, 2 usage error.

use std::io::Write;
use std::path::PathBuf;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Result};
use crate::invariants::{invariance_check, invariant_report, jacobian_rank, standard_family, MIN_TRIALS};
use crate::metric_io::load_metric;
use crate::orbit::{
    co_basis, count_report, hilbert, iota_check, orbit_dim_bruteforce, poincare, poincare_general_check,
    prolong_dim, random_g_value, zeta_kernel_dim, CountReport,
};
use crate::scalar::Q;

/// Default float tolerance, overridable through `CI_TOLERANCE`.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Number of random `g` values per Spencer check.
pub const SPENCER_SAMPLES: usize = 5;

#[derive(Debug, Parser)]
#[command(name = "confinv", version, about = "Differential invariants of conformal metric structures")]
pub struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Number of independent invariants per order.
    #[command(group(ArgGroup::new("orders").required(true).args(["order", "max_order"])))]
    Count {
        #[arg(long)]
        dim: usize,
        /// Single jet order.
        #[arg(long)]
        order: Option<usize>,
        /// All orders `1..=K`.
        #[arg(long)]
        max_order: Option<usize>,
        /// One row per dimension, one column per order.
        #[arg(long)]
        table: bool,
    },
    /// Poincaré function `Σ H_n(k) z^k`.
    Poincare {
        #[arg(long)]
        dim: usize,
        /// Compare with the general closed form.
        #[arg(long)]
        check_general: bool,
    },
    /// Invariants of a metric file.
    Invariants {
        #[arg(long)]
        metric: PathBuf,
        #[arg(long)]
        max_order: usize,
    },
    /// Run a verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Spencer,
    Prolong,
    Poincare,
    Orbit,
    Invariance,
    Independence,
}

impl Suite {
    pub fn needs_order(self) -> bool {
        matches!(self, Suite::Spencer | Suite::Orbit | Suite::Invariance | Suite::Independence)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub suite: Suite,
    pub dim: usize,
    pub order: Option<usize>,
    pub seed: u64,
    pub pass: bool,
    pub summary: String,
    pub details: serde_json::Value,
}

/// Float tolerance from `CI_TOLERANCE`, or the default.
pub fn tolerance() -> f64 {
    std::env::var("CI_TOLERANCE")
        .ok()
        .and_then(|v| v.trim().parse::<f64>().ok())
        .filter(|v| v.is_finite() && *v > 0.0)
        .unwrap_or(DEFAULT_TOLERANCE)
}

enum Outcome {
    Ok(String),
    Failed(String),
}

fn emit<T: Serialize>(json: bool, value: &T, text: String) -> String {
    if json {
        serde_json::to_string_pretty(value).expect("serializable")
    } else {
        text
    }
}

fn count(n: usize, orders: Vec<usize>, table: bool, json: bool) -> Result<String> {
    let reports = orders.iter().map(|&k| count_report(n, k)).collect::<Result<Vec<CountReport>>>()?;
    let text = if table {
        let mut s = format!("{:>4}", "n\\k");
        for k in &orders {
            s += &format!(" {k:>6}");
        }
        s += &format!("\n{n:>4}");
        for r in &reports {
            s += &format!(" {:>6}", r.hilbert);
        }
        s
    } else {
        reports
            .iter()
            .map(|r| format!("n = {}, k = {}: H = {}, trdeg = {}", r.n, r.k, r.hilbert, r.trdeg))
            .collect::<Vec<_>>()
            .join("\n")
    };
    Ok(emit(json, &reports, text))
}

fn poincare_cmd(n: usize, check: bool, json: bool) -> Result<String> {
    let p = poincare(n)?;
    let mut text = format!("P_{n}(z) = {p}");
    let value = if check {
        let c = poincare_general_check(n)?;
        text += &format!("\ngeneral closed form agrees: {}", c.agrees);
        for (k, h, g) in &c.mismatches {
            text += &format!("\n  z^{k}: H = {h}, closed form = {g}");
        }
        json!({ "n": n, "poincare": p, "check_general": c })
    } else {
        json!({ "n": n, "poincare": p })
    };
    Ok(emit(json, &value, text))
}

fn invariants_cmd(path: &std::path::Path, max_order: usize, json: bool) -> Result<String> {
    let (_, metric) = load_metric(path)?;
    let report = invariant_report(&metric, max_order, None)?;
    let tol = tolerance().max(1e-8);
    for r in &report.residuals {
        if r.value > tol {
            log::warn!("residual {} = {:.3e} exceeds {tol:.1e}", r.check, r.value);
        }
    }
    if json {
        return Ok(report.to_json());
    }
    let mut s = format!(
        "dim {}, signature ({}, {}), jet order {}\n",
        report.meta.dim, report.meta.signature[0], report.meta.signature[1], report.meta.order
    );
    for e in &report.invariants {
        let v = match &e.value {
            crate::metric_io::ReportValue::Exact(q) => q.clone(),
            crate::metric_io::ReportValue::Float(f) => format!("{f:.12e}"),
        };
        s += &format!("{:<24} order {}  {:<5}  {v}\n", e.name, e.order, e.backend.to_string());
    }
    for r in &report.residuals {
        s += &format!("residual {:<22} {:.3e}\n", r.check, r.value);
    }
    Ok(s.trim_end().to_string())
}

/// Runs one verification suite; `order` must be set when [`Suite::needs_order`] holds.
pub fn verify(suite: Suite, n: usize, order: Option<usize>, seed: u64) -> Result<VerifyReport> {
    let k = order.unwrap_or(0);
    let tol = tolerance();
    let (pass, summary, details) = match suite {
        Suite::Spencer => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let expected = if k == 1 { n } else { 0 };
            let mut kernels = Vec::new();
            for _ in 0..SPENCER_SAMPLES {
                let g = random_g_value(n, &mut rng);
                kernels.push(zeta_kernel_dim(n, k, &g)?);
            }
            let pass = kernels.iter().all(|&d| d == expected);
            (
                pass,
                format!("kernel dim of zeta_{k}: {kernels:?}, expected {expected}"),
                json!({ "kernel_dims": kernels, "expected": expected }),
            )
        }
        Suite::Prolong => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = random_g_value(n, &mut rng);
            let co = co_basis(n, &g)?;
            let (p1, p2) = (prolong_dim(n, &co, 1), prolong_dim(n, &co, 2));
            let iota = iota_check(n, &g)?;
            let pass = p1 == n && p2 == 0 && iota;
            (
                pass,
                format!("dim co^(1) = {p1} (expected {n}), dim co^(2) = {p2} (expected 0), iota check {iota}"),
                json!({ "co1": p1, "co2": p2, "iota_check": iota }),
            )
        }
        Suite::Poincare => {
            let p = poincare(n)?;
            let terms = 2 * n + 7;
            let series = p.series(terms).unwrap_or_default();
            let mut mismatched = Vec::new();
            for (kk, c) in series.iter().enumerate() {
                if *c != Q::from_integer(hilbert(n, kk)?.into()) {
                    mismatched.push(kk);
                }
            }
            let general = poincare_general_check(n)?;
            let pass = series.len() == terms && mismatched.is_empty();
            (
                pass,
                format!(
                    "series of P_{n} matches H_{n}(k) for k < {terms}: {}; general closed form agrees: {}",
                    mismatched.is_empty(),
                    general.agrees
                ),
                json!({ "poincare": p, "series_mismatches": mismatched, "check_general": general }),
            )
        }
        Suite::Orbit => {
            let s = orbit_dim_bruteforce(n, k, seed)?;
            let pass = s.codim as i128 == s.trdeg;
            (
                pass,
                format!(
                    "rank {} of {} generators in fiber {}, codim {} vs trdeg {}",
                    s.rank, s.generators, s.fiber_dim, s.codim, s.trdeg
                ),
                serde_json::to_value(&s).expect("serializable"),
            )
        }
        Suite::Invariance => {
            let s = invariance_check(n, k, seed)?;
            let pass = s.passes(tol);
            (
                pass,
                format!(
                    "{} invariants compared, max relative residual {:.3e} ({}), tolerance {tol:.1e}",
                    s.compared, s.max_residual, s.worst
                ),
                serde_json::to_value(&s).expect("serializable"),
            )
        }
        Suite::Independence => {
            let family = standard_family(n, k)?;
            let r = jacobian_rank(&family, seed, MIN_TRIALS)?;
            let pass = r.rank == r.expected_rank;
            (
                pass,
                format!(
                    "rank {} (expected {}) of {} invariants over {} coordinates",
                    r.rank, r.expected_rank, r.invariants, r.coordinates
                ),
                serde_json::to_value(&r).expect("serializable"),
            )
        }
    };
    Ok(VerifyReport {
        suite,
        dim: n,
        order,
        seed,
        pass,
        summary,
        details,
    })
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Count {
            dim,
            order,
            max_order,
            table,
        } => {
            let orders = match (order, max_order) {
                (Some(k), _) => vec![*k],
                (None, Some(m)) => (1..=*m).collect(),
                (None, None) => unreachable!("clap enforces the group"),
            };
            count(*dim, orders, *table, cli.json).map(Outcome::Ok)
        }
        Command::Poincare { dim, check_general } => poincare_cmd(*dim, *check_general, cli.json).map(Outcome::Ok),
        Command::Invariants { metric, max_order } => invariants_cmd(metric, *max_order, cli.json).map(Outcome::Ok),
        Command::Verify { suite, dim, order, seed } => {
            let r = verify(*suite, *dim, *order, *seed)?;
            let text = format!(
                "{} {}",
                r.summary,
                if r.pass { "PASS" } else { "FAIL" }
            );
            let out = emit(cli.json, &r, text);
            Ok(if r.pass { Outcome::Ok(out) } else { Outcome::Failed(out) })
        }
    }
}

/// Module to blame for an error, given the subcommand that raised it.
fn module_of(cli: &Cli, e: &Error) -> &'static str {
    match (e, &cli.command) {
        (Error::DimensionTooSmall(_), Command::Count { .. } | Command::Poincare { .. }) => "orbit_counting",
        (Error::DimensionTooSmall(_), Command::Invariants { .. }) => "conformal_invariants",
        _ => e.module(),
    }
}

fn usage_check(cli: &Cli) -> std::result::Result<(), clap::Error> {
    if let Command::Verify { suite, order: None, .. } = &cli.command {
        if suite.needs_order() {
            use clap::CommandFactory;
            return Err(Cli::command().error(
                clap::error::ErrorKind::MissingRequiredArgument,
                format!("suite {} requires --order", format!("{suite:?}").to_lowercase()),
            ));
        }
    }
    Ok(())
}

/// Runs the CLI on `args` (including the program name), writing to `out` and `err`.
/// Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args).and_then(|c| usage_check(&c).map(|_| c)) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 { write!(out, "{rendered}") } else { write!(err, "{rendered}") };
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(Outcome::Ok(s)) => {
            let _ = writeln!(out, "{s}");
            0
        }
        Ok(Outcome::Failed(s)) => {
            let _ = writeln!(out, "{s}");
            1
        }
        Err(e) => {
            let body = json!({
                "error": {
                    "reason": e.reason(),
                    "module": module_of(&cli, &e),
                    "message": e.to_string(),
                }
            });
            let _ = writeln!(err, "{body}");
            if cli.json {
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&body).expect("serializable"));
            }
            1
        }
    }
}
