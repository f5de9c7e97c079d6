//! Command-line surface: parse algebra definition files, dispatch the
//! computations, and emit human-readable or machine-readable reports with
//! stable exit codes (0 pass, 1 check failed, 2 usage or input error).
//!
//! The whole surface is the testable function [`run`]; the binary is a thin
//! wrapper around it. JSON output is deterministic byte for byte — it never
//! contains timing, and every collection underneath is ordered.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::enveloping::{EnvelopingAlgebra, UnitIsoReport};
use crate::error::Error;
use crate::fp::{Fp, FpVector, Prime};
use crate::free_restricted::{free_restricted_dimension, FreeLayers};
use crate::lie::{self, RestrictedLieAlgebra};
use crate::monadic::{em_object_from_lie, roundtrip_check, sandwich_certificate, M2Object};
use crate::tensor::TensorContext;

/// Number of random samples drawn by the axiom checks (`check`, and the
/// re-check of the recovered algebra inside `roundtrip`).
const CHECK_SAMPLES: usize = 100;

#[derive(Parser)]
#[command(
    name = "plie",
    version,
    about = "Exact computations with restricted Lie algebras and their enveloping bialgebras"
)]
struct Cli {
    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for the randomized axiom checks
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Largest admissible dimension p^n of the enveloping algebra
    #[arg(long, global = true, default_value_t = 3125)]
    size_limit: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Verify the restricted Lie algebra axioms of a definition file
    Check {
        /// Algebra definition (JSON)
        file: PathBuf,
    },
    /// Dimension of the restricted enveloping algebra, optionally with its
    /// full multiplication table
    Env {
        /// Algebra definition (JSON)
        file: PathBuf,
        /// Print every product of PBW basis monomials
        #[arg(long)]
        table: bool,
    },
    /// Primitive elements of the enveloping bialgebra and the unit
    /// isomorphism report
    Primitives {
        /// Algebra definition (JSON)
        file: PathBuf,
    },
    /// Layer dimensions of the free restricted Lie algebra
    Free {
        /// Field characteristic (prime)
        #[arg(long)]
        p: u64,
        /// Number of generators
        #[arg(long)]
        rank: usize,
        /// Largest layer degree to compute
        #[arg(long)]
        max_degree: usize,
        /// Cross-check against the Witt dimension formula
        #[arg(long)]
        oracle: bool,
    },
    /// Extract the Eilenberg-Moore structure and read the algebra back
    Roundtrip {
        /// Algebra definition (JSON)
        file: PathBuf,
        /// Truncation degree (default max(4, p+1))
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// Verify the Eilenberg-Moore algebra laws of the extracted structure map
    EmCheck {
        /// Algebra definition (JSON)
        file: PathBuf,
        /// Truncation degree (default max(4, p+1))
        #[arg(long)]
        max_degree: Option<usize>,
    },
    /// Certify the enveloping algebra as the quotient of the tensor algebra
    /// by the structure-map relations, degree by degree
    Sandwich {
        /// Algebra definition (JSON)
        file: PathBuf,
        /// Truncation degree (default max(4, p+1))
        #[arg(long)]
        max_degree: Option<usize>,
    },
}

/// Everything a command run produces; the binary prints the two streams and
/// exits with the code.
pub struct RunOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

/// Parses `argv` and executes one command. Never panics on user input;
/// every failure mode maps to an exit code and a diagnostic.
pub fn run<I, T>(argv: I) -> RunOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => RunOutcome {
                    code: 0,
                    stdout: e.to_string(),
                    stderr: String::new(),
                },
                _ => RunOutcome { code: 2, stdout: String::new(), stderr: e.to_string() },
            };
        }
    };
    let start = Instant::now();
    match execute(&cli) {
        Ok(out) => {
            let mut stdout = out.body;
            if cli.format == Format::Text {
                let _ = writeln!(stdout, "elapsed: {:.1?}", start.elapsed());
            }
            RunOutcome {
                code: if out.passed { 0 } else { 1 },
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => RunOutcome {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    }
}

/// A mathematical failure detected mid-computation exits 1 like any failed
/// check; everything else that errors is a usage or input problem.
fn exit_code(e: &Error) -> i32 {
    match e {
        Error::UnitNotIso(_) => 1,
        _ => 2,
    }
}

struct CommandOutput {
    body: String,
    passed: bool,
}

fn execute(cli: &Cli) -> Result<CommandOutput, Error> {
    match &cli.command {
        Command::Check { file } => run_check(cli, file),
        Command::Env { file, table } => run_env(cli, file, *table),
        Command::Primitives { file } => run_primitives(cli, file),
        Command::Free { p, rank, max_degree, oracle } => {
            run_free(cli, *p, *rank, *max_degree, *oracle)
        }
        Command::Roundtrip { file, max_degree } => run_roundtrip(cli, file, *max_degree),
        Command::EmCheck { file, max_degree } => run_em_check(cli, file, *max_degree),
        Command::Sandwich { file, max_degree } => run_sandwich(cli, file, *max_degree),
    }
}

/// Truncation degree used when `--max-degree` is omitted: deep enough for
/// the p-th power layer and for at least one degree past it.
fn default_truncation(p: Prime) -> usize {
    (p.get() as usize + 1).max(4)
}

fn envelope(
    command: &str,
    file: &Path,
    params: serde_json::Value,
    passed: bool,
    report: serde_json::Value,
) -> String {
    let value = json!({
        "command": command,
        "file": file.display().to_string(),
        "params": params,
        "status": if passed { "pass" } else { "fail" },
        "report": report,
    });
    let mut body = value.to_string();
    body.push('\n');
    body
}

fn to_report_value<R: Serialize>(report: &R) -> Result<serde_json::Value, Error> {
    serde_json::to_value(report).map_err(|e| Error::Parse(format!("report serialization: {e}")))
}

/// Renders a Lie algebra element as a combination of named basis vectors.
fn render_lie(names: &[String], v: &FpVector) -> String {
    let mut parts = Vec::new();
    for (i, name) in names.iter().enumerate() {
        let c = v.get(i);
        if c.is_zero() {
            continue;
        }
        if c.value() == 1 {
            parts.push(name.clone());
        } else {
            parts.push(format!("{}*{name}", c.value()));
        }
    }
    if parts.is_empty() {
        "0".to_string()
    } else {
        parts.join(" + ")
    }
}

// ---------------------------------------------------------------------------
// algebra definition files

/// On-disk description of a restricted Lie algebra: a prime, named basis
/// vectors, a sparse bracket table keyed by `"a,b"` with `a` strictly before
/// `b` in the listed basis order, and a sparse p-operation table. Omitted
/// entries are zero.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AlgebraFile {
    p: u64,
    basis: Vec<String>,
    #[serde(default)]
    brackets: BTreeMap<String, BTreeMap<String, i64>>,
    #[serde(default)]
    pmap: BTreeMap<String, BTreeMap<String, i64>>,
}

/// Reads and validates an algebra definition file. Construction does not
/// check the axioms — that is the `check` command's job.
pub fn parse_algebra(path: &Path) -> Result<RestrictedLieAlgebra, Error> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    parse_algebra_str(&text)
}

/// Parses an algebra definition from its JSON text.
pub fn parse_algebra_str(text: &str) -> Result<RestrictedLieAlgebra, Error> {
    let file: AlgebraFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let p = Prime::new(file.p)?;
    let names = file.basis;
    let n = names.len();
    if n == 0 {
        return Err(Error::Parse("basis must list at least one name".into()));
    }
    let mut index = BTreeMap::new();
    for (i, name) in names.iter().enumerate() {
        if index.insert(name.clone(), i).is_some() {
            return Err(Error::Name(format!("{name} (declared twice)")));
        }
    }
    let resolve = |name: &str| -> Result<usize, Error> {
        index.get(name).copied().ok_or_else(|| Error::Name(name.to_string()))
    };
    let sparse = |coeffs: &BTreeMap<String, i64>| -> Result<FpVector, Error> {
        let mut v = FpVector::zeros(p, n);
        for (name, &c) in coeffs {
            v.set(resolve(name)?, Fp::new(c, p));
        }
        Ok(v)
    };
    let mut upper = vec![FpVector::zeros(p, n); n * n.saturating_sub(1) / 2];
    for (key, coeffs) in &file.brackets {
        let (a, b) = key.split_once(',').ok_or_else(|| {
            Error::Parse(format!("bracket key {key:?} must have the form \"name,name\""))
        })?;
        let i = resolve(a)?;
        let j = resolve(b)?;
        if i >= j {
            return Err(Error::Parse(format!(
                "bracket key {key:?} must list two distinct names in basis order"
            )));
        }
        upper[lie::pair_index(n, i, j)] = sparse(coeffs)?;
    }
    let mut pmap_rows = vec![FpVector::zeros(p, n); n];
    for (name, coeffs) in &file.pmap {
        pmap_rows[resolve(name)?] = sparse(coeffs)?;
    }
    RestrictedLieAlgebra::new(p, names, upper, pmap_rows)
}

// ---------------------------------------------------------------------------
// commands

fn run_check(cli: &Cli, file: &Path) -> Result<CommandOutput, Error> {
    let lie = parse_algebra(file)?;
    let names = lie.names().to_vec();
    let report = lie.check_axioms(CHECK_SAMPLES, cli.seed);
    let passed = report.passed();

    let body = if cli.format == Format::Json {
        envelope(
            "check",
            file,
            json!({ "samples": CHECK_SAMPLES, "seed": cli.seed }),
            passed,
            to_report_value(&report)?,
        )
    } else {
        let mut text = String::new();
        let _ = writeln!(text, "check {}", file.display());
        let _ = writeln!(
            text,
            "p = {}, dim = {}, samples = {}, seed = {}",
            report.p, report.dim, report.samples, report.seed
        );
        if passed {
            let _ = writeln!(text, "all axioms hold");
        } else {
            for f in &report.jacobi_failures {
                let _ = writeln!(
                    text,
                    "Jacobi failure at ({}, {}, {}): residual = {}",
                    names[f.i],
                    names[f.j],
                    names[f.k],
                    render_lie(&names, &f.residual)
                );
            }
            for f in &report.restricted_failures {
                let _ = writeln!(
                    text,
                    "restrictedness failure at {}: ad({}^[p]) - ad({})^p has matrix",
                    names[f.index], names[f.index], names[f.index]
                );
                for r in 0..f.residual.rows() {
                    let _ = writeln!(text, "  {:?}", f.residual.row(r).values());
                }
            }
            for f in &report.sum_failures {
                let _ = writeln!(
                    text,
                    "Jacobson sum rule failure on sample {}: residual = {}",
                    f.sample,
                    render_lie(&names, &f.residual)
                );
            }
            for f in &report.scalar_failures {
                let _ = writeln!(
                    text,
                    "scalar compatibility failure on sample {}: residual = {}",
                    f.sample,
                    render_lie(&names, &f.residual)
                );
            }
            let _ = writeln!(text, "axiom check failed");
        }
        text
    };
    Ok(CommandOutput { body, passed })
}

#[derive(Serialize)]
struct EnvReport {
    p: Prime,
    lie_dim: usize,
    env_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    table: Option<Vec<TableEntry>>,
}

#[derive(Serialize)]
struct TableEntry {
    left: String,
    right: String,
    product: String,
}

fn run_env(cli: &Cli, file: &Path, table: bool) -> Result<CommandOutput, Error> {
    let lie = parse_algebra(file)?;
    let env = EnvelopingAlgebra::new(lie, cli.size_limit)?;
    let names = env.lie().names().to_vec();
    let entries = if table {
        let mut entries = Vec::with_capacity(env.dim() * env.dim());
        for i in 0..env.dim() {
            let left = env.monomial_from_index(i);
            for j in 0..env.dim() {
                let right = env.monomial_from_index(j);
                let mut word = left.word();
                word.extend(right.word());
                let product = env.straighten(&word)?;
                entries.push(TableEntry {
                    left: left.render(&names),
                    right: right.render(&names),
                    product: product.render(&names),
                });
            }
        }
        Some(entries)
    } else {
        None
    };
    let report = EnvReport {
        p: env.p(),
        lie_dim: env.lie().dim(),
        env_dim: env.dim(),
        table: entries,
    };

    let body = if cli.format == Format::Json {
        envelope(
            "env",
            file,
            json!({ "size_limit": cli.size_limit, "table": table }),
            true,
            to_report_value(&report)?,
        )
    } else {
        let mut text = String::new();
        let _ = writeln!(text, "enveloping algebra for {}", file.display());
        let _ = writeln!(
            text,
            "p = {}, dim L = {}, dim u(L) = {}",
            report.p, report.lie_dim, report.env_dim
        );
        if let Some(entries) = &report.table {
            for e in entries {
                let _ = writeln!(text, "{} * {} = {}", e.left, e.right, e.product);
            }
        }
        text
    };
    Ok(CommandOutput { body, passed: true })
}

#[derive(Serialize)]
struct PrimitivesReport {
    p: Prime,
    lie_dim: usize,
    env_dim: usize,
    primitive_dim: usize,
    basis: Vec<String>,
    unit: UnitIsoReport,
}

fn run_primitives(cli: &Cli, file: &Path) -> Result<CommandOutput, Error> {
    let lie = parse_algebra(file)?;
    let env = EnvelopingAlgebra::new(lie, cli.size_limit)?;
    let names = env.lie().names().to_vec();
    let space = env.restricted_primitives();
    let unit = env.check_unit_isomorphism();
    let passed = unit.passed();
    let report = PrimitivesReport {
        p: env.p(),
        lie_dim: env.lie().dim(),
        env_dim: env.dim(),
        primitive_dim: space.dim(),
        basis: space.basis.iter().map(|b| b.render(&names)).collect(),
        unit,
    };

    let body = if cli.format == Format::Json {
        envelope(
            "primitives",
            file,
            json!({ "size_limit": cli.size_limit }),
            passed,
            to_report_value(&report)?,
        )
    } else {
        let mut text = String::new();
        let _ = writeln!(text, "restricted primitives for {}", file.display());
        let _ = writeln!(
            text,
            "p = {}, dim L = {}, dim u(L) = {}, dim P(u(L)) = {}",
            report.p, report.lie_dim, report.env_dim, report.primitive_dim
        );
        for b in &report.basis {
            let _ = writeln!(text, "  {b}");
        }
        let u = &report.unit;
        let _ = writeln!(
            text,
            "unit map: injective = {}, dimensions match = {}, brackets match = {}, p-powers match = {}, closed = {}",
            u.missing_singletons.is_empty() && u.singleton_rank == u.lie_dim,
            u.primitive_dim == u.lie_dim,
            u.bracket_mismatches.is_empty(),
            u.pmap_mismatches.is_empty(),
            u.closure_defects.is_empty()
        );
        let _ = writeln!(
            text,
            "{}",
            if passed { "unit isomorphism holds" } else { "unit isomorphism FAILED" }
        );
        text
    };
    Ok(CommandOutput { body, passed })
}

fn run_free(
    cli: &Cli,
    p: u64,
    rank: usize,
    max_degree: usize,
    oracle: bool,
) -> Result<CommandOutput, Error> {
    let prime = Prime::new(p)?;
    let ctx = TensorContext::new(prime, rank, max_degree)?;
    let layers = FreeLayers::new(ctx)?;
    let dims = layers.dims();
    let witt: Option<Vec<u128>> = oracle.then(|| {
        (1..=max_degree).map(|d| free_restricted_dimension(d, rank, prime)).collect()
    });
    let agree = witt
        .as_ref()
        .map(|w| dims.iter().map(|&d| d as u128).eq(w.iter().copied()));
    let passed = agree.unwrap_or(true);

    let body = if cli.format == Format::Json {
        // bare report by design: the dims array is the whole answer
        let value = match (&witt, agree) {
            (Some(w), Some(a)) => json!({ "dims": dims, "witt": w, "agree": a }),
            _ => json!({ "dims": dims }),
        };
        let mut body = value.to_string();
        body.push('\n');
        body
    } else {
        let mut text = String::new();
        let _ = writeln!(
            text,
            "free restricted Lie algebra over F_{p} on {rank} generator(s), degrees 1..={max_degree}"
        );
        for (i, d) in dims.iter().enumerate() {
            match &witt {
                Some(w) => {
                    let _ = writeln!(text, "degree {}: dim {} (formula {})", i + 1, d, w[i]);
                }
                None => {
                    let _ = writeln!(text, "degree {}: dim {}", i + 1, d);
                }
            }
        }
        if let Some(a) = agree {
            let _ = writeln!(
                text,
                "{}",
                if a {
                    "kernel computation and dimension formula agree"
                } else {
                    "kernel computation and dimension formula DISAGREE"
                }
            );
        }
        text
    };
    Ok(CommandOutput { body, passed })
}

fn run_roundtrip(
    cli: &Cli,
    file: &Path,
    max_degree: Option<usize>,
) -> Result<CommandOutput, Error> {
    let lie = parse_algebra(file)?;
    let truncation = max_degree.unwrap_or_else(|| default_truncation(lie.p()));
    let report = roundtrip_check(&lie, truncation, cli.size_limit, CHECK_SAMPLES, cli.seed)?;
    let passed = report.passed();

    let body = if cli.format == Format::Json {
        envelope(
            "roundtrip",
            file,
            json!({
                "truncation": truncation,
                "size_limit": cli.size_limit,
                "samples": CHECK_SAMPLES,
                "seed": cli.seed,
            }),
            passed,
            to_report_value(&report)?,
        )
    } else {
        let mut text = String::new();
        let _ = writeln!(text, "roundtrip for {} at truncation {}", file.display(), truncation);
        let _ = writeln!(text, "EM algebra laws hold: {}", report.em_laws_hold);
        let _ = writeln!(
            text,
            "bracket tables match: {}",
            if report.bracket_mismatches.is_empty() {
                "yes".to_string()
            } else {
                format!("NO, mismatches at {:?}", report.bracket_mismatches)
            }
        );
        let _ = writeln!(
            text,
            "p-power tables match: {}",
            if report.pmap_mismatches.is_empty() {
                "yes".to_string()
            } else {
                format!("NO, mismatches at {:?}", report.pmap_mismatches)
            }
        );
        let _ = writeln!(
            text,
            "recovered algebra satisfies the axioms: {}",
            report.recovered_axioms.passed()
        );
        let _ = writeln!(
            text,
            "{}",
            if passed { "roundtrip recovers the algebra exactly" } else { "roundtrip FAILED" }
        );
        text
    };
    Ok(CommandOutput { body, passed })
}

fn run_em_check(
    cli: &Cli,
    file: &Path,
    max_degree: Option<usize>,
) -> Result<CommandOutput, Error> {
    let lie = parse_algebra(file)?;
    let truncation = max_degree.unwrap_or_else(|| default_truncation(lie.p()));
    let em = em_object_from_lie(&lie, truncation, cli.size_limit)?;
    let report = em.check_em_laws();
    let passed = report.passed();

    let body = if cli.format == Format::Json {
        envelope(
            "em-check",
            file,
            json!({ "truncation": truncation, "size_limit": cli.size_limit }),
            passed,
            to_report_value(&report)?,
        )
    } else {
        let mut text = String::new();
        let _ = writeln!(
            text,
            "EM algebra laws for {} at truncation {}",
            file.display(),
            truncation
        );
        let _ = writeln!(text, "unit law: {}", if report.unit_law_holds { "ok" } else { "VIOLATED" });
        let _ = writeln!(
            text,
            "bracket patterns checked: {}, failures: {}",
            report.bracket_patterns_checked,
            report.bracket_failures.len()
        );
        let _ = writeln!(
            text,
            "power patterns checked: {}, failures: {}",
            report.power_patterns_checked,
            report.power_failures.len()
        );
        for f in &report.bracket_failures {
            let _ = writeln!(
                text,
                "  bracket pattern (degree {}, index {}) x (degree {}, index {}): residual {:?}",
                f.deg_left,
                f.idx_left,
                f.deg_right,
                f.idx_right,
                f.residual.values()
            );
        }
        for f in &report.power_failures {
            let _ = writeln!(
                text,
                "  power pattern (degree {}, index {}): residual {:?}",
                f.degree,
                f.index,
                f.residual.values()
            );
        }
        let _ = writeln!(
            text,
            "{}",
            if passed { "EM algebra laws hold" } else { "EM algebra laws FAILED" }
        );
        text
    };
    Ok(CommandOutput { body, passed })
}

fn run_sandwich(
    cli: &Cli,
    file: &Path,
    max_degree: Option<usize>,
) -> Result<CommandOutput, Error> {
    let lie = parse_algebra(file)?;
    let truncation = max_degree.unwrap_or_else(|| default_truncation(lie.p()));
    let m2 = M2Object::from_lie(&lie, truncation, cli.size_limit)?;
    let report = sandwich_certificate(&m2, cli.size_limit)?;
    let passed = report.passed();

    let body = if cli.format == Format::Json {
        envelope(
            "sandwich",
            file,
            json!({ "truncation": truncation, "size_limit": cli.size_limit }),
            passed,
            to_report_value(&report)?,
        )
    } else {
        let mut text = String::new();
        let _ = writeln!(
            text,
            "sandwich certificate for {} at truncation {}",
            file.display(),
            truncation
        );
        let _ = writeln!(text, "dim u(L) = {}", report.env_dim);
        let _ = writeln!(text, "degree  rank(eval)  quotient-dim  pbw-count");
        for t in &report.degrees {
            let _ = writeln!(
                text,
                "{:>6}  {:>10}  {:>12}  {:>9}",
                t.degree, t.rank_phi, t.span_quotient_dim, t.pbw_filtration_dim
            );
        }
        if !report.soundness_failures.is_empty() {
            let _ = writeln!(
                text,
                "relation soundness FAILED at (degree, index) {:?}",
                report.soundness_failures
            );
        }
        let _ = writeln!(
            text,
            "certified up to degree {} of {}",
            report.certified_up_to, report.truncation
        );
        let _ = writeln!(
            text,
            "{}",
            if passed {
                "all three dimension computations agree"
            } else {
                "certificate INCOMPLETE"
            }
        );
        text
    };
    Ok(CommandOutput { body, passed })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_temp(name: &str, contents: &str) -> PathBuf {
        let dir = std::env::temp_dir().join("plie-cli-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join(name);
        std::fs::write(&path, contents).unwrap();
        path
    }

    #[test]
    fn parses_the_heisenberg_file() {
        let lie = parse_algebra_str(
            r#"{"p":2,"basis":["x","y","z"],"brackets":{"x,y":{"z":1}},"pmap":{}}"#,
        )
        .unwrap();
        assert_eq!(lie.dim(), 3);
        assert_eq!(lie.bracket_basis(0, 1), FpVector::from_values(lie.p(), &[0, 0, 1]));
        assert!(lie.pmap_basis_row(0).is_zero());
    }

    #[test]
    fn negative_coefficients_reduce_mod_p() {
        let lie = parse_algebra_str(
            r#"{"p":5,"basis":["e","h","f"],"brackets":{"e,h":{"e":-2},"e,f":{"h":1},"h,f":{"f":-2}},"pmap":{"h":{"h":1}}}"#,
        )
        .unwrap();
        assert_eq!(lie.bracket_basis(0, 1), FpVector::from_values(lie.p(), &[3, 0, 0]));
    }

    #[test]
    fn rejects_malformed_inputs() {
        // not prime
        assert!(matches!(
            parse_algebra_str(r#"{"p":4,"basis":["x"]}"#),
            Err(Error::InvalidModulus(4))
        ));
        // unknown name
        assert!(matches!(
            parse_algebra_str(r#"{"p":2,"basis":["x"],"pmap":{"y":{"x":1}}}"#),
            Err(Error::Name(_))
        ));
        // reversed bracket key
        assert!(matches!(
            parse_algebra_str(r#"{"p":2,"basis":["x","y"],"brackets":{"y,x":{"x":1}}}"#),
            Err(Error::Parse(_))
        ));
        // diagonal bracket key
        assert!(matches!(
            parse_algebra_str(r#"{"p":2,"basis":["x","y"],"brackets":{"x,x":{"y":1}}}"#),
            Err(Error::Parse(_))
        ));
        // unknown field
        assert!(matches!(
            parse_algebra_str(r#"{"p":2,"basis":["x"],"extra":1}"#),
            Err(Error::Parse(_))
        ));
        // duplicate basis name
        assert!(matches!(
            parse_algebra_str(r#"{"p":2,"basis":["x","x"]}"#),
            Err(Error::Name(_))
        ));
    }

    #[test]
    fn free_json_output_is_frozen() {
        let out = run(["plie", "free", "--p", "2", "--rank", "1", "--max-degree", "2",
            "--format", "json"]);
        assert_eq!(out.code, 0);
        assert_eq!(out.stdout, "{\"dims\":[1,1]}\n");
        assert!(out.stderr.is_empty());
    }

    #[test]
    fn free_oracle_agrees() {
        let out = run(["plie", "free", "--p", "3", "--rank", "2", "--max-degree", "3",
            "--format", "json", "--oracle"]);
        assert_eq!(out.code, 0);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["agree"], serde_json::Value::Bool(true));
        assert_eq!(v["dims"], v["witt"]);
    }

    #[test]
    fn check_passes_and_fails_with_exit_codes() {
        let good = write_temp(
            "heisenberg_p2.json",
            r#"{"p":2,"basis":["x","y","z"],"brackets":{"x,y":{"z":1}},"pmap":{}}"#,
        );
        let out = run(["plie", "check", good.to_str().unwrap()]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        assert!(out.stdout.contains("all axioms hold"));
        assert!(out.stdout.contains("elapsed"));

        let bad = write_temp(
            "bad_pmap.json",
            r#"{"p":2,"basis":["x","y","z"],"brackets":{"x,y":{"z":1}},"pmap":{"x":{"y":1}}}"#,
        );
        let out = run(["plie", "check", bad.to_str().unwrap()]);
        assert_eq!(out.code, 1);
        assert!(out.stdout.contains("restrictedness failure at x"));

        let not_prime = write_temp("p4.json", r#"{"p":4,"basis":["x"]}"#);
        let out = run(["plie", "check", not_prime.to_str().unwrap()]);
        assert_eq!(out.code, 2);
        assert!(out.stdout.is_empty());
        assert!(out.stderr.contains("error"));
    }

    #[test]
    fn usage_errors_exit_two_and_help_exits_zero() {
        let out = run(["plie", "no-such-command"]);
        assert_eq!(out.code, 2);
        assert!(!out.stderr.is_empty());

        let out = run(["plie", "--help"]);
        assert_eq!(out.code, 0);
        assert!(out.stdout.contains("Usage"));

        let out = run(["plie", "free", "--p", "2"]);
        assert_eq!(out.code, 2, "missing required arguments");
    }

    #[test]
    fn json_output_is_deterministic_and_reparses() {
        let good = write_temp(
            "abelian_xx.json",
            r#"{"p":2,"basis":["x"],"brackets":{},"pmap":{"x":{"x":1}}}"#,
        );
        let argv = ["plie", "primitives", good.to_str().unwrap(), "--format", "json"];
        let first = run(argv);
        let second = run(argv);
        assert_eq!(first.code, 0);
        assert_eq!(first.stdout, second.stdout);
        let v: serde_json::Value = serde_json::from_str(&first.stdout).unwrap();
        assert_eq!(v["status"], "pass");
        assert_eq!(v["report"]["primitive_dim"], 1);
        assert_eq!(v["command"], "primitives");
    }

    #[test]
    fn env_table_lists_every_product() {
        let good = write_temp(
            "abelian_xx2.json",
            r#"{"p":2,"basis":["x"],"brackets":{},"pmap":{"x":{"x":1}}}"#,
        );
        let out = run(["plie", "env", good.to_str().unwrap(), "--table", "--format", "json"]);
        assert_eq!(out.code, 0);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["report"]["env_dim"], 2);
        let table = v["report"]["table"].as_array().unwrap();
        assert_eq!(table.len(), 4);
        // x * x = x since x^[2] = x
        assert!(table.iter().any(|e| e["left"] == "x" && e["right"] == "x"
            && e["product"] == "x"));
    }

    #[test]
    fn roundtrip_command_reports_truncation() {
        let good = write_temp(
            "heis_p2_rt.json",
            r#"{"p":2,"basis":["x","y","z"],"brackets":{"x,y":{"z":1}},"pmap":{}}"#,
        );
        let out = run(["plie", "roundtrip", good.to_str().unwrap(), "--format", "json"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["params"]["truncation"], 4);
        assert_eq!(v["report"]["truncation"], 4);
        assert_eq!(v["status"], "pass");
    }

    #[test]
    fn sandwich_command_certifies_heisenberg() {
        let good = write_temp(
            "heis_p2_sw.json",
            r#"{"p":2,"basis":["x","y","z"],"brackets":{"x,y":{"z":1}},"pmap":{}}"#,
        );
        let out = run(["plie", "sandwich", good.to_str().unwrap(), "--format", "json"]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        let v: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
        assert_eq!(v["report"]["certified_up_to"], 4);
        let last = v["report"]["degrees"].as_array().unwrap().last().unwrap().clone();
        assert_eq!(last["rank_phi"], 8);
        assert_eq!(last["span_quotient_dim"], 8);
        assert_eq!(last["pbw_filtration_dim"], 8);
    }

    #[test]
    fn em_check_command_runs_on_files() {
        let good = write_temp(
            "abelian_p3_em.json",
            r#"{"p":3,"basis":["x"],"brackets":{},"pmap":{}}"#,
        );
        let out = run(["plie", "em-check", good.to_str().unwrap()]);
        assert_eq!(out.code, 0, "{}", out.stderr);
        assert!(out.stdout.contains("EM algebra laws hold"));
    }
}
