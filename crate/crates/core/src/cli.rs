//! Command-line surface. `dispatch` is the whole interface: it parses an
//! argument vector and returns the process status together with the output
//! streams, so the binary stays a two-line wrapper and tests can drive the
//! exact byte-level behavior.
//!
//! Exit codes: 0 success/verified, 1 theorem mismatch or witness found where
//! rainbow-freeness was asserted, 2 usage or validation error, 3 budget
//! refusal.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::bounds::{
    classify, construct_extremal, product_bound, sum_bound, ExtremalClass, ProductInterpretation,
};
use crate::error::Error;
use crate::family::{Family, FamilyDoc, Problem};
use crate::rainbow::find_rainbow;
use crate::search::{
    check_theorem, search_max, Objective, SearchMode, SearchOptions, TheoremCheckRow,
    DEFAULT_BUDGET,
};

/// Environment variable supplying the default search budget.
pub const BUDGET_ENV: &str = "RAINBOW_SCHUR_BUDGET";

/// Status and output of one invocation.
#[derive(Debug)]
pub struct Outcome {
    pub status: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser)]
#[command(
    name = "rainbow-schur",
    version,
    about = "Exact bounds, constructions and exhaustive verification for set \
             families avoiding rainbow solutions to x1+...+xm = x(m+1)"
)]
struct Cli {
    /// Pretty-print JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ClassArg {
    Suffix,
    Special,
    Odd,
    Trivial,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the closed-form optimum for the given parameters.
    Bound {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "sum")]
        objective: Objective,
        /// Exponent reading for the product bound.
        #[arg(long, value_enum, default_value = "corrected")]
        interpretation: ProductInterpretation,
    },
    /// Emit an extremal family as a family document.
    Construct {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum)]
        class: ClassArg,
        /// Comma-separated thresholds for the suffix class (m values).
        #[arg(long, value_delimiter = ',')]
        thresholds: Option<Vec<usize>>,
    },
    /// Check a family document for rainbow solutions.
    Verify {
        #[arg(long)]
        family: PathBuf,
        /// Number of summands; defaults to the value recorded in the file.
        #[arg(long)]
        m: Option<usize>,
    },
    /// List every extremal class a family document instantiates.
    Classify {
        #[arg(long)]
        family: PathBuf,
    },
    /// Exhaustively maximize an objective over rainbow-free families.
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, value_enum, default_value = "sum")]
        objective: Objective,
        #[arg(long, value_enum, default_value = "full")]
        mode: SearchMode,
        #[arg(long)]
        allow_empty: bool,
        #[arg(long)]
        enumerate_all: bool,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        /// Maximum admissible space size (default: RAINBOW_SCHUR_BUDGET or
        /// the built-in cap).
        #[arg(long)]
        budget: Option<u64>,
        /// Include wall-clock timing in the report (off by default so
        /// repeated runs are byte-identical).
        #[arg(long)]
        timing: bool,
    },
    /// Sweep n over a range and compare search optima against closed forms.
    CheckTheorem {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        n_from: usize,
        #[arg(long)]
        n_to: usize,
        #[arg(long, value_enum, default_value = "full")]
        mode: SearchMode,
        #[arg(long, value_enum, default_value = "sum")]
        objective: Objective,
        #[arg(long)]
        allow_empty: bool,
        #[arg(long)]
        enumerate_all: bool,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long)]
        budget: Option<u64>,
        /// Emit CSV instead of JSON lines.
        #[arg(long)]
        csv: bool,
    },
}

/// Run one invocation. The first element of `args` is the program name.
pub fn dispatch<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let rendered = err.render().to_string();
            return match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { status: 0, stdout: rendered, stderr: String::new() }
                }
                _ => Outcome { status: 2, stdout: String::new(), stderr: rendered },
            };
        }
    };
    let pretty = cli.pretty;
    match run(cli.command, pretty) {
        Ok((status, stdout)) => Outcome { status, stdout, stderr: String::new() },
        Err(err) => {
            let status = match err {
                Error::BudgetExceeded { .. } => 3,
                _ => 2,
            };
            Outcome { status, stdout: String::new(), stderr: format!("error: {err}\n") }
        }
    }
}

fn run(command: Command, pretty: bool) -> Result<(i32, String), Error> {
    match command {
        Command::Bound { n, m, k, objective, interpretation } => {
            cmd_bound(n, m, k, objective, interpretation, pretty)
        }
        Command::Construct { n, m, k, class, thresholds } => {
            cmd_construct(n, m, k, class, thresholds, pretty)
        }
        Command::Verify { family, m } => cmd_verify(&family, m, pretty),
        Command::Classify { family } => cmd_classify(&family, pretty),
        Command::Search {
            n,
            m,
            k,
            objective,
            mode,
            allow_empty,
            enumerate_all,
            workers,
            budget,
            timing,
        } => {
            let options = SearchOptions {
                objective,
                mode,
                allow_empty,
                enumerate_all,
                workers,
                budget: effective_budget(budget)?,
                prune: true,
            };
            cmd_search(n, m, k, &options, timing, pretty)
        }
        Command::CheckTheorem {
            m,
            k,
            n_from,
            n_to,
            mode,
            objective,
            allow_empty,
            enumerate_all,
            workers,
            budget,
            csv,
        } => {
            let options = SearchOptions {
                objective,
                mode,
                allow_empty,
                enumerate_all,
                workers,
                budget: effective_budget(budget)?,
                prune: true,
            };
            cmd_check_theorem(m, k, n_from, n_to, &options, csv, pretty)
        }
    }
}

fn effective_budget(flag: Option<u64>) -> Result<u64, Error> {
    if let Some(b) = flag {
        return Ok(b);
    }
    match std::env::var(BUDGET_ENV) {
        Ok(raw) => raw.parse().map_err(|_| {
            Error::InvalidParameters(format!("{BUDGET_ENV} must be an unsigned integer, got {raw:?}"))
        }),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn render(value: &serde_json::Value, pretty: bool) -> String {
    let mut text = if pretty {
        serde_json::to_string_pretty(value).expect("report values serialize")
    } else {
        serde_json::to_string(value).expect("report values serialize")
    };
    text.push('\n');
    text
}

fn cmd_bound(
    n: usize,
    m: usize,
    k: usize,
    objective: Objective,
    interpretation: ProductInterpretation,
    pretty: bool,
) -> Result<(i32, String), Error> {
    let problem = Problem::new(n, m, k)?;
    let value = match objective {
        Objective::Sum => json!({
            "n": n, "m": m, "k": k, "q": problem.q(), "r": problem.r(),
            "bound": sum_bound(&problem),
        }),
        Objective::Product => json!({
            "n": n, "m": m, "k": k, "q": problem.q(), "r": problem.r(),
            "bound": product_bound(&problem, interpretation).to_string(),
            "interpretation": interpretation,
            "note": "printed exponents total n rather than k; corrected uses \
                     k-m+(r+1) and matches exhaustive search",
        }),
    };
    Ok((0, render(&value, pretty)))
}

fn cmd_construct(
    n: usize,
    m: usize,
    k: usize,
    class: ClassArg,
    thresholds: Option<Vec<usize>>,
    pretty: bool,
) -> Result<(i32, String), Error> {
    let problem = Problem::new(n, m, k)?;
    let class = match (class, thresholds) {
        (ClassArg::Suffix, Some(mut thresholds)) => {
            thresholds.sort_unstable();
            ExtremalClass::SuffixIntervals { thresholds }
        }
        (ClassArg::Suffix, None) => {
            return Err(Error::InvalidParameters(
                "the suffix class requires --thresholds t1,..,tm".to_string(),
            ))
        }
        (_, Some(_)) => {
            return Err(Error::InvalidParameters(
                "--thresholds only applies to --class suffix".to_string(),
            ))
        }
        (ClassArg::Special, None) => ExtremalClass::SpecialEven,
        (ClassArg::Odd, None) => ExtremalClass::OddsAll,
        (ClassArg::Trivial, None) => ExtremalClass::TrivialWithEmpty,
    };
    let family = construct_extremal(&problem, &class)?;
    let doc = FamilyDoc::from_family(&family);
    let value = serde_json::to_value(&doc).expect("documents serialize");
    Ok((0, render(&value, pretty)))
}

fn load_family(path: &PathBuf, m_override: Option<usize>) -> Result<Family, Error> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidFamilyFile(format!("{}: {e}", path.display())))?;
    let doc: FamilyDoc = serde_json::from_str(&raw)
        .map_err(|e| Error::InvalidFamilyFile(format!("{}: {e}", path.display())))?;
    doc.to_family(m_override)
}

fn cmd_verify(path: &PathBuf, m: Option<usize>, pretty: bool) -> Result<(i32, String), Error> {
    let family = load_family(path, m)?;
    match find_rainbow(&family) {
        None => Ok((0, render(&json!({ "rainbow_free": true }), pretty))),
        Some(witness) => {
            let value = json!({
                "rainbow_free": false,
                "witness": serde_json::to_value(&witness).expect("witnesses serialize"),
            });
            Ok((1, render(&value, pretty)))
        }
    }
}

fn cmd_classify(path: &PathBuf, pretty: bool) -> Result<(i32, String), Error> {
    let family = load_family(path, None)?;
    let classes = classify(&family);
    let value = serde_json::to_value(&classes).expect("classes serialize");
    Ok((0, render(&value, pretty)))
}

fn cmd_search(
    n: usize,
    m: usize,
    k: usize,
    options: &SearchOptions,
    timing: bool,
    pretty: bool,
) -> Result<(i32, String), Error> {
    let problem = Problem::new(n, m, k)?;
    let report = search_max(&problem, options)?;
    let mut value = json!({
        "n": n, "m": m, "k": k,
        "objective": report.objective,
        "mode": report.mode,
        "allow_empty": report.allow_empty,
        "optimum": report.optimum.to_string(),
        "families_examined": report.families_examined,
    });
    let map = value.as_object_mut().expect("report is an object");
    if let Some(maximizers) = &report.maximizers {
        map.insert(
            "maximizers".to_string(),
            serde_json::to_value(maximizers).expect("keys serialize"),
        );
    }
    if timing {
        map.insert("elapsed_ms".to_string(), json!(report.elapsed.as_millis() as u64));
    }
    Ok((0, render(&value, pretty)))
}

fn row_json(row: &TheoremCheckRow) -> serde_json::Value {
    json!({
        "n": row.n, "m": row.m, "k": row.k,
        "mode": row.mode,
        "search_optimum": row.search_optimum.to_string(),
        "closed_form": row.closed_form.to_string(),
        "match": row.optimum_matches,
        "maximizers_match": row.maximizers_match,
        "elapsed_ms": row.elapsed.as_millis() as u64,
    })
}

fn row_csv(row: &TheoremCheckRow) -> String {
    let mode = match row.mode {
        SearchMode::Full => "full",
        SearchMode::Nested => "nested",
    };
    let maximizers = match row.maximizers_match {
        Some(v) => v.to_string(),
        None => String::new(),
    };
    format!(
        "{},{},{},{},{},{},{},{},{}",
        row.n,
        row.m,
        row.k,
        mode,
        row.search_optimum,
        row.closed_form,
        row.optimum_matches,
        maximizers,
        row.elapsed.as_millis()
    )
}

fn cmd_check_theorem(
    m: usize,
    k: usize,
    n_from: usize,
    n_to: usize,
    options: &SearchOptions,
    csv: bool,
    pretty: bool,
) -> Result<(i32, String), Error> {
    let rows = check_theorem(m, k, n_from, n_to, options)?;
    let all_pass = rows.iter().all(TheoremCheckRow::passes);
    let mut out = String::new();
    if csv {
        out.push_str("n,m,k,mode,search_optimum,closed_form,match,maximizers_match,elapsed_ms\n");
        for row in &rows {
            out.push_str(&row_csv(row));
            out.push('\n');
        }
    } else {
        for row in &rows {
            out.push_str(&render(&row_json(row), pretty));
        }
    }
    Ok((if all_pass { 0 } else { 1 }, out))
}
