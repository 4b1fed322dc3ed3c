//! `pealab`: build the algebras `A_p`, check axiom suites and witness equations,
//! verify the reduct representations and run the combinatorial kernels.
//!
//! Every command prints a JSON check report on stdout (or writes it with
//! `--report`). Exit status: 0 when every check passes, 1 when some check
//! fails, 2 when the command cannot run (bad flags or parameters, unreadable
//! input, exhausted budget).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use pealab::eval::{check_all, CheckMode, DEFAULT_SAMPLES, DEFAULT_SEED};
use pealab::lemmas::{
    lemma_x_check, lemma_y_search, plane_system, verify_factorisation, walecki_report, YSearch,
};
use pealab::model::ModelSummary;
use pealab::reducts::reducts_report;
use pealab::suites::{parse_equations, suite_f, suite_p};
use pealab::witness::witness_report;
use pealab::{AtomAlgebra, CheckRecord, CheckReport, PolyadicModel, DEFAULT_BUDGET};

#[derive(Parser)]
#[command(
    name = "pealab",
    version,
    about = "Finite polyadic algebras from affine planes, with checkers"
)]
struct Cli {
    /// Cap on closure atoms and search nodes.
    #[arg(long, global = true, env = "PEALAB_BUDGET", default_value_t = DEFAULT_BUDGET)]
    budget: usize,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build A^s and A_p and cross-check the atoms against the atom formula.
    Build {
        #[command(flatten)]
        dims: Dims,
        /// Write both atom tables to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check an axiom suite or a file of equations.
    Axioms {
        #[command(flatten)]
        source: Source,
        /// `P`, `F`, or a path to equations (JSON list or one per line).
        #[arg(long, default_value = "P")]
        suite: String,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_SAMPLES)]
        samples: usize,
        /// Check the unmodified set algebra instead of A_p.
        #[arg(long)]
        set_algebra: bool,
    },
    /// Distinguished evaluation of E_p, failure of e_p, and E_q^0 for each `--against q`.
    Witness {
        #[command(flatten)]
        dims: Dims,
        #[arg(long, value_delimiter = ',')]
        against: Vec<usize>,
    },
    /// Both reduct representations, the merge construction and the certificate.
    Reducts {
        #[command(flatten)]
        source: Source,
        /// First merged index; the second is p − 2 − k unless `--merge-m` is given.
        #[arg(long, default_value_t = 0)]
        merge_k: usize,
        #[arg(long)]
        merge_m: Option<usize>,
        #[arg(long)]
        no_merge: bool,
    },
    /// Class sizes, edge-colouring search, or Walecki colourings.
    Lemmas {
        #[arg(long, value_enum)]
        which: Lemma,
        /// Plane order for `x`.
        #[arg(long, default_value_t = 3)]
        p: u64,
        /// Order of the complete graph for `y` and `walecki`.
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
}

#[derive(Args, Clone, Copy)]
struct Dims {
    #[arg(long)]
    p: usize,
    #[arg(long, default_value_t = 3)]
    alpha: usize,
}

#[derive(Args)]
struct Source {
    /// A file written by `build --out`.
    #[arg(long, conflicts_with_all = ["p", "alpha"])]
    algebra: Option<PathBuf>,
    #[arg(long, required_unless_present = "algebra")]
    p: Option<usize>,
    #[arg(long)]
    alpha: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Auto,
    Exhaustive,
    AtomLevel,
    Sampled,
}

#[derive(Clone, Copy, ValueEnum)]
enum Lemma {
    X,
    Y,
    Walecki,
}

#[derive(Serialize, Deserialize)]
struct AlgebraFile {
    schema: u32,
    p: usize,
    alpha: usize,
    summary: ModelSummary,
    set_algebra: AtomAlgebra,
    ap: AtomAlgebra,
}

fn build_model(p: usize, alpha: usize, budget: usize) -> anyhow::Result<PolyadicModel> {
    Ok(PolyadicModel::build(p, alpha, budget)?)
}

fn read_algebra(path: &Path) -> anyhow::Result<AlgebraFile> {
    let text = fs::read_to_string(path).with_context(|| path.display().to_string())?;
    let file: AlgebraFile =
        serde_json::from_str(&text).with_context(|| path.display().to_string())?;
    if file.schema != 1 {
        bail!("{}: unsupported schema {}", path.display(), file.schema);
    }
    Ok(file)
}

/// `(p, alpha)` from either an algebra file or the flags.
fn dims_of(source: &Source) -> anyhow::Result<(usize, usize, Option<AlgebraFile>)> {
    match &source.algebra {
        Some(path) => {
            let file = read_algebra(path)?;
            Ok((file.p, file.alpha, Some(file)))
        }
        None => Ok((
            source.p.expect("required by clap"),
            source.alpha.unwrap_or(3),
            None,
        )),
    }
}

fn cmd_build(dims: Dims, out: Option<&Path>, budget: usize) -> anyhow::Result<CheckReport> {
    let model = build_model(dims.p, dims.alpha, budget)?;
    let summary = model.summary();
    let mut report = CheckReport::new("build")
        .param("p", dims.p)
        .param("alpha", dims.alpha)
        .param("summary", &summary);
    report.extend(model.verify()?);
    if dims.alpha <= 4 {
        report.extend_prefixed("cross_check", model.check_atom_formula(budget)?);
    }
    if let Some(path) = out {
        let file = AlgebraFile {
            schema: 1,
            p: dims.p,
            alpha: dims.alpha,
            summary,
            set_algebra: model.set_algebra().clone(),
            ap: model.ap.clone(),
        };
        fs::write(path, serde_json::to_string(&file)?)
            .with_context(|| path.display().to_string())?;
        report.set_param("out", path.display().to_string());
    }
    Ok(report.finalize())
}

#[allow(clippy::too_many_arguments)]
fn cmd_axioms(
    source: &Source,
    suite: &str,
    mode: Mode,
    seed: u64,
    samples: usize,
    set_algebra: bool,
    budget: usize,
) -> anyhow::Result<CheckReport> {
    let (p, alpha, file) = dims_of(source)?;
    let alg = match file {
        Some(f) if set_algebra => f.set_algebra,
        Some(f) => f.ap,
        None => {
            let model = build_model(p, alpha, budget)?;
            if set_algebra {
                model.set_algebra().clone()
            } else {
                model.ap
            }
        }
    };
    let eqs = match suite {
        "P" | "p" => suite_p(alpha),
        "F" | "f" => suite_f(alpha),
        path => {
            let text = fs::read_to_string(path).with_context(|| path.to_string())?;
            parse_equations(&text, alpha)
        }
    }?;
    let mode = match mode {
        Mode::Auto => CheckMode::Auto { seed, samples },
        Mode::Exhaustive => CheckMode::Exhaustive,
        Mode::AtomLevel => CheckMode::AtomLevel,
        Mode::Sampled => CheckMode::Sampled { seed, samples },
    };
    let mut report = check_all(&alg, &eqs, mode, budget);
    report.command = "axioms".into();
    report.set_param("p", p);
    report.set_param("alpha", alpha);
    report.set_param("suite", suite);
    report.set_param("algebra", if set_algebra { "set" } else { "ap" });
    Ok(report)
}

fn cmd_reducts(
    source: &Source,
    k: usize,
    m: Option<usize>,
    merge: bool,
    budget: usize,
) -> anyhow::Result<CheckReport> {
    let (p, alpha, _) = dims_of(source)?;
    let model = build_model(p, alpha, budget)?;
    let pair = merge.then(|| (k, m.unwrap_or_else(|| (p - 2).saturating_sub(k))));
    Ok(reducts_report(&model, pair)?)
}

fn cmd_lemmas(which: Lemma, p: u64, n: usize, budget: usize) -> anyhow::Result<CheckReport> {
    match which {
        Lemma::X => {
            let system = plane_system(p)?;
            let mut report = lemma_x_check(&system)?;
            report.set_param("p", p);
            Ok(report)
        }
        Lemma::Y => {
            let found = lemma_y_search(n, budget)?;
            let mut report = CheckReport::new("lemma_y").param("n", n);
            report.push(CheckRecord::new("search_complete", true).with_detail(&found));
            if let YSearch::Exists { classes, .. } = &found {
                report.extend_prefixed("found", verify_factorisation(n, classes));
            }
            Ok(report.finalize())
        }
        Lemma::Walecki => Ok(walecki_report(n)?),
    }
}

fn run(cli: Cli) -> anyhow::Result<CheckReport> {
    let budget = cli.budget;
    match &cli.command {
        Command::Build { dims, out } => cmd_build(*dims, out.as_deref(), budget),
        Command::Axioms {
            source,
            suite,
            mode,
            seed,
            samples,
            set_algebra,
        } => cmd_axioms(source, suite, *mode, *seed, *samples, *set_algebra, budget),
        Command::Witness { dims, against } => {
            let model = build_model(dims.p, dims.alpha, budget)?;
            Ok(witness_report(&model, against, budget)?)
        }
        Command::Reducts {
            source,
            merge_k,
            merge_m,
            no_merge,
        } => cmd_reducts(source, *merge_k, *merge_m, !no_merge, budget),
        Command::Lemmas { which, p, n } => cmd_lemmas(*which, *p, *n, budget),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let target = cli.report.clone();
    match run(cli) {
        Ok(report) => {
            let json = report.to_json();
            let written = match &target {
                Some(path) => fs::write(path, &json).with_context(|| path.display().to_string()),
                None => {
                    println!("{json}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e:#}");
                return ExitCode::from(2);
            }
            for rec in report.failures() {
                eprintln!("FAIL {}", rec.name);
            }
            eprintln!("verdict: {:?}", report.verdict);
            ExitCode::from(if report.passed() { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn mode_names() {
        let cli =
            Cli::try_parse_from(["pealab", "axioms", "--p", "3", "--mode", "atom-level"]).unwrap();
        assert!(matches!(
            cli.command,
            Command::Axioms {
                mode: Mode::AtomLevel,
                ..
            }
        ));
        assert!(Cli::try_parse_from(["pealab", "axioms"]).is_err());
    }
}
