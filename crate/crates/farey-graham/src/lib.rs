//! Exact, certificate-producing verification of quotient-closed subsets of
//! Farey sequences, and of the Graham gcd statistic they correspond to.
//!
//! For a positive integer `n`, the Farey sequence `F_n` is the ascending list
//! of reduced fractions `a/b` with `0 <= a <= b <= n`. For a set `S` of
//! fractions, `Q(S) = { x/y : x, y in S, x <= y, y != 0 }` (with
//! `Q({0}) = {0}`). A subset `S ⊆ F_n` is *closed* when `Q(S) ⊆ F_n` and
//! *covering* when `Q(S) = F_n`.
//!
//! Closure is a pairwise condition, so the closed subsets of `F_n` are
//! exactly the cliques of a compatibility graph on `F_n`. This crate builds
//! that graph, enumerates all of its maximum cliques exactly (branch and
//! bound, cross-checked by a naive subset-enumeration oracle), and checks
//! three claims at any desk-scale order:
//!
//! * every closed subset has at most `n + 1` elements,
//! * the covering subsets are exactly `{0, 1, 1/2, ..., 1/n}` and
//!   `{0, 1, 1/n, ..., (n-1)/n}`,
//! * those two families are also the only closed subsets of size `n + 1`,
//!   except for `n = 4` which admits `{0, 1, 1/2, 1/3, 2/3}` as well.
//!
//! The integer side of the story is the Graham statistic
//! `max_{i != j} a_i / gcd(a_i, a_j)` of a set of distinct positive
//! integers. The [`graham`] module implements the bidirectional transforms
//! between gcd sequences and Farey subsets, the gcd identities behind them,
//! and bounded brute-force scans of the two extremal-sequence conjectures.
//!
//! Verification runs produce [`verify::Certificate`] values: reproducible,
//! machine-readable records of what was searched and what was found.

pub mod arith;
mod bitset;
pub mod cli;
pub mod farey;
pub mod graham;
pub mod quotient;
pub mod search;
pub mod verify;

pub use arith::Fraction;

use thiserror::Error;

/// Crate-wide error type. Variants map onto the CLI exit-code contract:
/// domain/usage problems exit 2, resource exhaustion (overflow, search
/// budget, I/O) exits 3.
#[derive(Debug, Error)]
pub enum Error {
    /// A fraction was constructed or parsed with denominator zero.
    #[error("denominator must be positive")]
    ZeroDenominator,

    /// Division by the zero fraction.
    #[error("division by zero fraction")]
    DivisionByZero,

    /// A 128-bit intermediate overflowed; `context` names the computation.
    #[error("arithmetic overflow in {context}")]
    Overflow { context: String },

    /// An operation that needs a nonempty set received an empty one.
    #[error("set must be nonempty")]
    EmptySet,

    /// A set operation required `S ⊆ F_n` but some elements were outside.
    #[error("set is not a subset of F_{order}: offending elements {}", format_fractions(.elements))]
    NotSubsetOfFarey { order: u64, elements: Vec<Fraction> },

    /// The Graham statistic needs at least two terms.
    #[error("sequence must have at least 2 terms")]
    TooFewTerms,

    /// A sequence violated the strictly-increasing-positive invariant.
    #[error("terms must be strictly increasing positive integers")]
    NotStrictlyIncreasing,

    /// farey_to_graham received a set with no nonzero element.
    #[error("set must contain a nonzero fraction")]
    NoNonzeroElement,

    /// The naive clique oracle refuses graphs above its vertex cap.
    #[error("naive search supports at most {limit} vertices, got {vertices}")]
    NaiveLimit { vertices: usize, limit: usize },

    /// Brute-force scan would enumerate more subsets than the budget allows.
    #[error("scan of C({bound},{len}) subsets exceeds the {budget}-subset budget")]
    ScanBudget { len: usize, bound: u64, budget: u64 },

    /// Clique search ran out of its node or time budget. Carries the best
    /// result found so far; never a silent truncation.
    #[error("search budget exhausted after {} nodes (best size so far: {})", .partial.nodes_explored, .partial.max_size)]
    SearchBudget { partial: Box<search::SearchResult> },

    /// Malformed CLI input (fraction list, terms list, flag values).
    #[error("invalid input: {0}")]
    Parse(String),

    /// Certificate or report could not be written.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

fn format_fractions(elements: &[Fraction]) -> String {
    let parts: Vec<String> = elements.iter().map(|f| f.to_string()).collect();
    parts.join(",")
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
