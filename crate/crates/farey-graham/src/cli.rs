//! Command-line front end: argument parsing, fraction and term-list
//! parsing, JSON emission and certificate persistence.
//!
//! Exit codes: 0 success/verified, 1 a checked property is false (set not
//! closed, conjecture scan found a counterexample, certificate refuted),
//! 2 usage error, 3 resource error (overflow, exhausted budget, I/O).

use crate::arith::Fraction;
use crate::graham::{
    brute_force_conjecture1, brute_force_conjecture2, farey_to_graham, graham_to_farey, statistic,
    GrahamSequence,
};
use crate::quotient::{closure_check, compat_graph, coverage_check, quotient_set, QuotientWitness};
use crate::search::{
    all_maximal_closed_sets, default_threads, max_cliques_naive, max_cliques_with, Budget,
    SearchOptions, SearchResult,
};
use crate::verify::{
    cross_check_equivalence, equivalence_certificate, theorem1_certificate, verify_theorem1,
    verify_theorem3, verify_theorem4, Certificate, Status, Theorem, SCHEMA_VERSION,
};
use crate::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::collections::BTreeSet;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Environment variable overriding the search node budget.
pub const BUDGET_ENV: &str = "FG_BUDGET_NODES";

#[derive(Parser)]
#[command(
    name = "farey-graham",
    version,
    about = "Quotient-closed Farey subsets, maximum-clique certificates and the Graham gcd statistic"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the Farey sequence F_n, one fraction per line
    Farey {
        /// Sequence order n (n >= 1)
        #[arg(long)]
        order: u64,
        /// Emit a JSON array of "p/q" strings instead
        #[arg(long)]
        json: bool,
    },
    /// Closure and coverage reports for a fraction set against F_n
    Check {
        /// Comma-separated fractions, e.g. "0/1,1/1,1/2,1/3,2/3"
        #[arg(long)]
        set: String,
        /// Farey order n the set is checked against
        #[arg(long)]
        order: u64,
        /// Emit the combined report as JSON
        #[arg(long)]
        json: bool,
    },
    /// Print the quotient set Q(S)
    Quotient {
        /// Comma-separated fractions
        #[arg(long)]
        set: String,
        /// Emit a JSON array of "p/q" strings instead
        #[arg(long)]
        json: bool,
    },
    /// Enumerate the largest closed subsets of F_n; emits a certificate
    Search {
        /// Farey order n
        #[arg(long)]
        order: u64,
        /// Exact branch and bound, or the naive subset-enumeration oracle
        #[arg(long, value_enum, default_value_t = Algorithm::Bb)]
        algorithm: Algorithm,
        /// List all inclusion-maximal closed subsets of at least this size
        /// instead of only the maximum ones
        #[arg(long)]
        min_size: Option<usize>,
        /// Worker threads (default: available parallelism)
        #[arg(long)]
        threads: Option<usize>,
        /// Write the certificate to this file (atomic replace)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Graham gcd statistic, transforms and bounded conjecture scans
    Graham {
        #[command(subcommand)]
        command: GrahamCommand,
    },
    /// Verify a theorem at order n and emit a certificate
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Algorithm {
    Bb,
    Naive,
}

#[derive(Subcommand)]
enum GrahamCommand {
    /// The statistic max a_i/(a_i, a_j) and its first argmax pair
    Stat {
        /// Comma-separated distinct positive integers, e.g. "2,3,4,6"
        #[arg(long)]
        terms: String,
    },
    /// Map a gcd sequence to its Farey subset {0} U {a_1/a_k}
    ToFarey {
        #[arg(long)]
        terms: String,
    },
    /// Map a Farey subset to its gcd sequence
    FromFarey {
        #[arg(long)]
        set: String,
    },
    /// Scan all ascending subsets of 1..=bound for statistic < length
    Bf1 {
        #[arg(long)]
        length: usize,
        #[arg(long)]
        bound: u64,
    },
    /// List gcd-1 subsets of 1..=bound with statistic exactly length
    Bf2 {
        #[arg(long)]
        length: usize,
        #[arg(long)]
        bound: u64,
    },
}

#[derive(Args)]
struct VerifyArgs {
    #[command(subcommand)]
    command: Option<VerifySubcommand>,
    /// Theorem to verify: 1, 3 or 4
    #[arg(long)]
    theorem: Option<u8>,
    /// Farey order n
    #[arg(long)]
    order: Option<u64>,
    /// Worker threads (default: available parallelism)
    #[arg(long)]
    threads: Option<usize>,
    /// Write the certificate to this file (atomic replace)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum VerifySubcommand {
    /// Cross-check both directions of the equivalence bridge on generated
    /// instances
    Equiv {
        #[arg(long)]
        order: u64,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses a comma-separated fraction list into a reduced, de-duplicated
/// set. Bare integers parse as `k/1`.
pub fn parse_fraction_list(text: &str) -> Result<BTreeSet<Fraction>> {
    let mut set = BTreeSet::new();
    for token in text.split(',') {
        let token = token.trim();
        if token.is_empty() {
            return Err(Error::Parse(format!(
                "empty fraction token in {text:?}"
            )));
        }
        set.insert(token.parse::<Fraction>()?);
    }
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    Ok(set)
}

/// Parses comma-separated decimal terms into a gcd sequence. Input order is
/// free; terms are sorted and must be distinct positive integers.
pub fn parse_terms(text: &str) -> Result<GrahamSequence> {
    let mut terms = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        let term: u128 = token
            .parse()
            .map_err(|_| Error::Parse(format!("invalid term {token:?}")))?;
        terms.push(term);
    }
    terms.sort_unstable();
    GrahamSequence::new(terms)
}

/// Writes a certificate as canonical JSON: two-space indent, fixed key
/// order, trailing newline. With a path the file is replaced atomically via
/// a temporary file in the same directory.
pub fn emit_certificate(certificate: &Certificate, path: Option<&Path>) -> Result<()> {
    let mut json = serde_json::to_string_pretty(certificate).expect("certificates serialize");
    json.push('\n');
    match path {
        None => {
            print!("{json}");
            Ok(())
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(parent) if parent.as_os_str().is_empty() => Path::new("."),
                Some(parent) => parent,
                None => Path::new("."),
            };
            let mut file = tempfile::NamedTempFile::new_in(dir)?;
            file.write_all(json.as_bytes())?;
            file.persist(path).map_err(|e| Error::Io(e.error))?;
            Ok(())
        }
    }
}

/// Parses arguments, dispatches, and maps every outcome onto the exit-code
/// contract. Never panics on user input.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = err.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code(&err)
        }
    }
}

fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Overflow { .. }
        | Error::ScanBudget { .. }
        | Error::SearchBudget { .. }
        | Error::Io(_) => 3,
        _ => 2,
    }
}

fn require_order(order: u64) -> Result<u64> {
    if order >= 1 {
        Ok(order)
    } else {
        Err(Error::Parse("order must be >= 1".to_string()))
    }
}

fn budget_from_env() -> Result<Budget> {
    let mut budget = Budget::default();
    if let Ok(value) = std::env::var(BUDGET_ENV) {
        budget.max_nodes = value.parse().map_err(|_| {
            Error::Parse(format!("{BUDGET_ENV} must be an integer, got {value:?}"))
        })?;
    }
    Ok(budget)
}

fn search_options(threads: Option<usize>) -> Result<SearchOptions> {
    Ok(SearchOptions {
        budget: budget_from_env()?,
        threads: threads.unwrap_or_else(default_threads),
    })
}

#[derive(Serialize)]
struct CheckOutput {
    closed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<QuotientWitness>,
    covers: bool,
    missing: Vec<Fraction>,
    extraneous: Vec<Fraction>,
}

fn join(fractions: &[Fraction]) -> String {
    fractions
        .iter()
        .map(|f| f.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn execute(command: Command) -> Result<i32> {
    match command {
        Command::Farey { order, json } => {
            let order = require_order(order)?;
            let sequence = crate::farey::farey_sequence(order);
            if json {
                let strings: Vec<String> = sequence.iter().map(|f| f.to_string()).collect();
                println!("{}", serde_json::to_string(&strings).expect("strings"));
            } else {
                for fraction in sequence.iter() {
                    println!("{fraction}");
                }
            }
            Ok(0)
        }
        Command::Check { set, order, json } => {
            let order = require_order(order)?;
            let set = parse_fraction_list(&set)?;
            let closure = closure_check(&set, order)?;
            let coverage = coverage_check(&set, order)?;
            let output = CheckOutput {
                closed: closure.closed,
                witness: closure.witness,
                covers: coverage.covers,
                missing: coverage.missing,
                extraneous: coverage.extraneous,
            };
            if json {
                println!("{}", serde_json::to_string(&output).expect("report"));
            } else {
                println!("closed: {}", output.closed);
                if let Some(w) = &output.witness {
                    println!("witness: ({}) / ({}) = {} leaves F_{order}", w.x, w.y, w.quotient);
                }
                println!("covers: {}", output.covers);
                if !output.missing.is_empty() {
                    println!("missing: {}", join(&output.missing));
                }
                if !output.extraneous.is_empty() {
                    println!("extraneous: {}", join(&output.extraneous));
                }
            }
            Ok(if output.closed { 0 } else { 1 })
        }
        Command::Quotient { set, json } => {
            let set = parse_fraction_list(&set)?;
            let quotients = quotient_set(&set)?;
            if json {
                let strings: Vec<String> = quotients.iter().map(|f| f.to_string()).collect();
                println!("{}", serde_json::to_string(&strings).expect("strings"));
            } else {
                for fraction in &quotients {
                    println!("{fraction}");
                }
            }
            Ok(0)
        }
        Command::Search {
            order,
            algorithm,
            min_size,
            threads,
            out,
        } => {
            let order = require_order(order)?;
            let options = search_options(threads)?;
            let start = Instant::now();
            let graph = compat_graph(order);

            let certificate = if let Some(min_size) = min_size {
                let cliques = all_maximal_closed_sets(&graph, min_size.max(1), Some(options.budget))?;
                maximal_listing_certificate(order, cliques, start)
            } else {
                let result: SearchResult = match algorithm {
                    Algorithm::Bb => max_cliques_with(&graph, &options)?,
                    Algorithm::Naive => max_cliques_naive(&graph)?,
                };
                theorem1_certificate(order, &result, start)
            };
            emit_certificate(&certificate, out.as_deref())?;
            Ok(status_exit(&certificate))
        }
        Command::Graham { command } => run_graham(command),
        Command::Verify(args) => run_verify(args),
    }
}

/// Certificate for a maximal-clique listing: an enumeration, so there is
/// no expectation to compare against and completion counts as verified.
fn maximal_listing_certificate(
    order: u64,
    cliques: Vec<Vec<Fraction>>,
    start: Instant,
) -> Certificate {
    let max_subset_size = cliques.iter().map(|c| c.len()).max().unwrap_or(0) as u64;
    Certificate {
        schema_version: SCHEMA_VERSION.to_string(),
        theorem: Theorem::T1,
        n: order,
        status: Status::Verified,
        expected_sets: Vec::new(),
        found_sets: cliques,
        max_subset_size,
        nodes_explored: 0,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

fn status_exit(certificate: &Certificate) -> i32 {
    match certificate.status {
        Status::Verified => 0,
        Status::Refuted => 1,
        Status::ResourceExhausted => 3,
    }
}

fn run_graham(command: GrahamCommand) -> Result<i32> {
    match command {
        GrahamCommand::Stat { terms } => {
            let sequence = parse_terms(&terms)?;
            let report = statistic(&sequence)?;
            println!("{}", serde_json::to_string(&report).expect("report"));
            Ok(0)
        }
        GrahamCommand::ToFarey { terms } => {
            let sequence = parse_terms(&terms)?;
            let image = graham_to_farey(&sequence);
            let strings: Vec<String> = image.iter().map(|f| f.to_string()).collect();
            println!("{}", serde_json::to_string(&strings).expect("strings"));
            Ok(0)
        }
        GrahamCommand::FromFarey { set } => {
            let set = parse_fraction_list(&set)?;
            let sequence = farey_to_graham(&set)?;
            println!("{}", serde_json::to_string(&sequence).expect("sequence"));
            Ok(0)
        }
        GrahamCommand::Bf1 { length, bound } => {
            let report = brute_force_conjecture1(length, bound)?;
            println!("{}", serde_json::to_string(&report).expect("report"));
            Ok(if report.holds { 0 } else { 1 })
        }
        GrahamCommand::Bf2 { length, bound } => {
            let achievers = brute_force_conjecture2(length, bound)?;
            println!("{}", serde_json::to_string(&achievers).expect("sequences"));
            Ok(0)
        }
    }
}

fn run_verify(args: VerifyArgs) -> Result<i32> {
    if let Some(VerifySubcommand::Equiv {
        order,
        samples,
        out,
    }) = args.command
    {
        let order = require_order(order)?;
        if order < 2 {
            return Err(Error::Parse(
                "equivalence check requires order >= 2".to_string(),
            ));
        }
        let start = Instant::now();
        let report = cross_check_equivalence(order, samples);
        eprintln!(
            "direction A: {}/{} pass, direction B: {}/{} pass",
            report.direction_a_pass,
            report.direction_a_pass + report.direction_a_fail,
            report.direction_b_pass,
            report.direction_b_pass + report.direction_b_fail,
        );
        let certificate = equivalence_certificate(&report, start.elapsed().as_millis() as u64);
        emit_certificate(&certificate, out.as_deref())?;
        return Ok(status_exit(&certificate));
    }

    let theorem = args
        .theorem
        .ok_or_else(|| Error::Parse("--theorem is required (1, 3 or 4)".to_string()))?;
    let order = require_order(
        args.order
            .ok_or_else(|| Error::Parse("--order is required".to_string()))?,
    )?;
    let options = search_options(args.threads)?;
    let certificate = match theorem {
        1 => verify_theorem1(order, &options),
        3 => verify_theorem3(order, &options),
        4 => verify_theorem4(order, &options),
        other => {
            return Err(Error::Parse(format!(
                "unknown theorem {other}; expected 1, 3 or 4"
            )))
        }
    };
    eprintln!(
        "theorem {:?} at n = {}: {:?} ({} sets, {} nodes, {} ms)",
        certificate.theorem,
        certificate.n,
        certificate.status,
        certificate.found_sets.len(),
        certificate.nodes_explored,
        certificate.elapsed_ms,
    );
    emit_certificate(&certificate, args.out.as_deref())?;
    Ok(status_exit(&certificate))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frac(num: u128, den: u128) -> Fraction {
        Fraction::new(num, den).unwrap()
    }

    #[test]
    fn fraction_list_parsing() {
        let set = parse_fraction_list("0/1,1/1,1/2").unwrap();
        assert_eq!(
            set,
            BTreeSet::from([Fraction::zero(), Fraction::one(), frac(1, 2)])
        );
        // Reduced on ingest, bare integers as k/1, duplicates collapse.
        assert_eq!(parse_fraction_list("2/4").unwrap(), BTreeSet::from([frac(1, 2)]));
        assert_eq!(
            parse_fraction_list("3,6/2,1/2").unwrap(),
            BTreeSet::from([frac(1, 2), frac(3, 1)])
        );
        assert!(parse_fraction_list("1/0").is_err());
        assert!(parse_fraction_list("-1/2").is_err());
        assert!(parse_fraction_list("1/2,,1/3").is_err());
        assert!(parse_fraction_list("").is_err());
    }

    #[test]
    fn parse_error_names_the_token() {
        let err = parse_fraction_list("1/2,x7,1/3").unwrap_err();
        assert!(err.to_string().contains("x7"), "got: {err}");
    }

    #[test]
    fn term_list_parsing() {
        assert_eq!(
            parse_terms("2,3,4,6").unwrap().terms(),
            &[2, 3, 4, 6]
        );
        // Input order is free; storage is ascending.
        assert_eq!(parse_terms("6,4,3,2").unwrap().terms(), &[2, 3, 4, 6]);
        assert!(parse_terms("2,2,3").is_err());
        assert!(parse_terms("0,1").is_err());
        assert!(parse_terms("a,b").is_err());
    }

    #[test]
    fn fraction_render_parse_identity() {
        let original = parse_fraction_list("0/1,1/1,1/2,1/3,2/3").unwrap();
        let rendered = original
            .iter()
            .map(|f| f.to_string())
            .collect::<Vec<_>>()
            .join(",");
        assert_eq!(parse_fraction_list(&rendered).unwrap(), original);
    }

    #[test]
    fn certificate_file_round_trip_is_atomic_and_parseable() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cert.json");
        let cert = crate::verify::verify_theorem1(3, &SearchOptions::default());
        emit_certificate(&cert, Some(&path)).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.ends_with('\n'));
        assert!(text.contains("  \"theorem\": \"T1\""), "two-space indent");
        let back: Certificate = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cert);

        // Overwrite must go through the same atomic path.
        emit_certificate(&cert, Some(&path)).unwrap();
        let again: Certificate = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(again.canonical(), cert.canonical());
    }

    #[test]
    fn run_maps_outcomes_to_exit_codes() {
        assert_eq!(run(["farey-graham", "farey", "--order", "5"]), 0);
        assert_eq!(run(["farey-graham", "farey", "--order", "0"]), 2);
        assert_eq!(
            run(["farey-graham", "check", "--set", "2/5,3/4", "--order", "5"]),
            1
        );
        assert_eq!(
            run(["farey-graham", "check", "--set", "0/1,1/1,1/2", "--order", "2"]),
            0
        );
        assert_eq!(run(["farey-graham", "no-such-command"]), 2);
        assert_eq!(run(["farey-graham", "--help"]), 0);
    }
}
