//! Theorem-level verifiers. Each one runs the exact search for a fixed
//! order `n`, compares what was found against the generated expectations,
//! and signs the outcome into a [`Certificate`] — a reproducible,
//! machine-readable record of the run.

use crate::arith::Fraction;
use crate::farey::{same_denominator_set, unit_fraction_set};
use crate::graham::{farey_to_graham, graham_to_farey, mn_sequence, statistic, GrahamSequence};
use crate::quotient::{closure_check, compat_graph, quotient_set, CompatGraph};
use crate::search::{all_maximal_closed_sets, max_cliques_with, SearchOptions, SearchResult};
use crate::Error;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::time::Instant;

/// Schema tag embedded in every certificate.
pub const SCHEMA_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Which claim a certificate is about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Theorem {
    /// Closed subsets of F_n have at most n + 1 elements.
    T1,
    /// The covering subsets are exactly the two canonical families.
    T3,
    /// The maximum closed subsets are the two families, plus one extra set
    /// at n = 4.
    T4,
    /// The closed-subset bound and the gcd-statistic bound imply each other.
    #[serde(rename = "EQUIV")]
    Equiv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Verified,
    Refuted,
    ResourceExhausted,
}

/// Machine-readable verification result. Field order is the canonical JSON
/// key order; `elapsed_ms` is the only field excluded from reproducibility
/// comparisons.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: String,
    pub theorem: Theorem,
    pub n: u64,
    pub status: Status,
    pub expected_sets: Vec<Vec<Fraction>>,
    pub found_sets: Vec<Vec<Fraction>>,
    pub max_subset_size: u64,
    pub nodes_explored: u64,
    pub elapsed_ms: u64,
}

impl Certificate {
    /// The certificate with `elapsed_ms` zeroed, for byte-level comparisons
    /// between runs.
    pub fn canonical(&self) -> Certificate {
        Certificate {
            elapsed_ms: 0,
            ..self.clone()
        }
    }

    pub fn is_verified(&self) -> bool {
        self.status == Status::Verified
    }
}

fn sorted(set: &BTreeSet<Fraction>) -> Vec<Fraction> {
    set.iter().copied().collect()
}

/// The two canonical families as sorted lists, de-duplicated (they coincide
/// for n <= 2) and in canonical list order.
fn canonical_families(n: u64) -> Vec<Vec<Fraction>> {
    let mut families = vec![sorted(&unit_fraction_set(n))];
    let same = sorted(&same_denominator_set(n));
    if !families.contains(&same) {
        families.push(same);
    }
    families.sort();
    families
}

/// The exceptional size-5 closed set at n = 4: `{0, 1, 1/2, 1/3, 2/3}`.
fn exceptional_order4_set() -> Vec<Fraction> {
    [(0, 1), (1, 3), (1, 2), (2, 3), (1, 1)]
        .into_iter()
        .map(|(a, b)| Fraction::new(a, b).expect("static fractions"))
        .collect()
}

fn exhausted_certificate(
    theorem: Theorem,
    n: u64,
    expected_sets: Vec<Vec<Fraction>>,
    partial: &SearchResult,
    start: Instant,
) -> Certificate {
    Certificate {
        schema_version: SCHEMA_VERSION.to_string(),
        theorem,
        n,
        status: Status::ResourceExhausted,
        expected_sets,
        found_sets: partial.cliques.clone(),
        max_subset_size: partial.max_size as u64,
        nodes_explored: partial.nodes_explored,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

/// Checks that the maximum closed-subset size is exactly `n + 1`: the upper
/// bound from the search, the lower bound witnessed by the unit-fraction
/// family, which must appear among the maximum cliques found.
pub fn verify_theorem1(n: u64, options: &SearchOptions) -> Certificate {
    assert!(n >= 1);
    let start = Instant::now();
    let graph = compat_graph(n);
    match max_cliques_with(&graph, options) {
        Ok(result) => theorem1_certificate(n, &result, start),
        Err(Error::SearchBudget { partial }) => {
            exhausted_certificate(Theorem::T1, n, vec![sorted(&unit_fraction_set(n))], &partial, start)
        }
        Err(other) => unreachable!("search reports only budget errors: {other:?}"),
    }
}

/// Builds the size-bound certificate from an existing search result.
/// Exposed so tests can inject faults into the result and watch the status
/// flip.
pub fn theorem1_certificate(n: u64, result: &SearchResult, start: Instant) -> Certificate {
    let expected_sets = vec![sorted(&unit_fraction_set(n))];
    let witness_found = expected_sets.iter().all(|s| result.cliques.contains(s));
    let verified = result.max_size as u64 == n + 1 && witness_found;
    Certificate {
        schema_version: SCHEMA_VERSION.to_string(),
        theorem: Theorem::T1,
        n,
        status: if verified {
            Status::Verified
        } else {
            Status::Refuted
        },
        expected_sets,
        found_sets: result.cliques.clone(),
        max_subset_size: result.max_size as u64,
        nodes_explored: result.nodes_explored,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

/// Checks that the covering subsets (`Q(S) = F_n`) are exactly the two
/// canonical families.
pub fn verify_theorem3(n: u64, options: &SearchOptions) -> Certificate {
    assert!(n >= 1);
    let start = Instant::now();
    let graph = compat_graph(n);
    let result = match max_cliques_with(&graph, options) {
        Ok(result) => result,
        Err(Error::SearchBudget { partial }) => {
            return exhausted_certificate(Theorem::T3, n, canonical_families(n), &partial, start)
        }
        Err(other) => unreachable!("search reports only budget errors: {other:?}"),
    };
    let maximal = match all_maximal_closed_sets(&graph, 1, Some(options.budget)) {
        Ok(maximal) => maximal,
        Err(Error::SearchBudget { partial }) => {
            return exhausted_certificate(Theorem::T3, n, canonical_families(n), &partial, start)
        }
        Err(other) => unreachable!("listing reports only budget errors: {other:?}"),
    };
    theorem3_certificate(n, &result, &maximal, start)
}

/// Builds the covering-subsets certificate from search output. Three checks
/// must all pass:
///
/// 1. the covering maximum cliques are exactly the canonical families;
/// 2. no other maximal clique covers — every covering subset is closed and
///    extends to a covering maximal clique, so this pins all candidates;
/// 3. no single-element removal from a family covers. Coverage is monotone
///    across subsets of a closed set, so a covering proper subset would
///    force some (family minus one element) to cover too; together with 2
///    this rules out covering sets below maximum size.
pub fn theorem3_certificate(
    n: u64,
    result: &SearchResult,
    maximal_cliques: &[Vec<Fraction>],
    start: Instant,
) -> Certificate {
    let expected_sets = canonical_families(n);
    let farey_set = crate::farey::farey_sequence(n).to_set();
    let covers = |fractions: &[Fraction]| -> bool {
        // |Q(S)| is at most |S|(|S|+1)/2, so sets below that threshold
        // cannot cover; this skips almost every maximal clique.
        if fractions.len() * (fractions.len() + 1) / 2 < farey_set.len() {
            return false;
        }
        let set: BTreeSet<Fraction> = fractions.iter().copied().collect();
        quotient_set(&set).map(|q| q == farey_set).unwrap_or(false)
    };

    let covering_maximum: Vec<Vec<Fraction>> = result
        .cliques
        .iter()
        .filter(|clique| covers(clique))
        .cloned()
        .collect();
    let covering_maximal: Vec<Vec<Fraction>> = maximal_cliques
        .iter()
        .filter(|clique| covers(clique))
        .cloned()
        .collect();

    let mut covering_proper_subsets: Vec<Vec<Fraction>> = Vec::new();
    for family in &expected_sets {
        for removed in 0..family.len() {
            let subset: Vec<Fraction> = family
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != removed)
                .map(|(_, f)| *f)
                .collect();
            if covers(&subset) {
                covering_proper_subsets.push(subset);
            }
        }
    }

    let verified = covering_maximum == expected_sets
        && covering_maximal == expected_sets
        && covering_proper_subsets.is_empty();

    // The certificate reports every covering set discovered; when refuted
    // the offenders are visible here.
    let mut found_sets = covering_maximum;
    for extra in covering_maximal.into_iter().chain(covering_proper_subsets) {
        if !found_sets.contains(&extra) {
            found_sets.push(extra);
        }
    }
    found_sets.sort();

    Certificate {
        schema_version: SCHEMA_VERSION.to_string(),
        theorem: Theorem::T3,
        n,
        status: if verified {
            Status::Verified
        } else {
            Status::Refuted
        },
        expected_sets,
        found_sets,
        max_subset_size: result.max_size as u64,
        nodes_explored: result.nodes_explored,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

/// Checks that the maximum cliques are exactly the two canonical families,
/// plus the exceptional set at n = 4.
pub fn verify_theorem4(n: u64, options: &SearchOptions) -> Certificate {
    assert!(n >= 1);
    let start = Instant::now();
    let graph = compat_graph(n);
    match max_cliques_with(&graph, options) {
        Ok(result) => theorem4_certificate(n, &result, start),
        Err(Error::SearchBudget { partial }) => {
            exhausted_certificate(Theorem::T4, n, theorem4_expected_sets(n), &partial, start)
        }
        Err(other) => unreachable!("search reports only budget errors: {other:?}"),
    }
}

/// The complete expected list of maximum closed subsets: generated families
/// for every order, plus the one set at n = 4 that is taken as given.
pub fn theorem4_expected_sets(n: u64) -> Vec<Vec<Fraction>> {
    let mut expected = canonical_families(n);
    if n == 4 {
        expected.push(exceptional_order4_set());
        expected.sort();
    }
    expected
}

/// Builds the maximum-clique-list certificate from search output.
pub fn theorem4_certificate(n: u64, result: &SearchResult, start: Instant) -> Certificate {
    let expected_sets = theorem4_expected_sets(n);
    let verified = result.max_size as u64 == n + 1 && result.cliques == expected_sets;
    Certificate {
        schema_version: SCHEMA_VERSION.to_string(),
        theorem: Theorem::T4,
        n,
        status: if verified {
            Status::Verified
        } else {
            Status::Refuted
        },
        expected_sets,
        found_sets: result.cliques.clone(),
        max_subset_size: result.max_size as u64,
        nodes_explored: result.nodes_explored,
        elapsed_ms: start.elapsed().as_millis() as u64,
    }
}

/// Pass/fail tallies for the two directions of the equivalence bridge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivReport {
    pub n: u64,
    pub samples: u64,
    /// closed S  =>  statistic(farey_to_graham(S)) <= n
    pub direction_a_pass: u64,
    pub direction_a_fail: u64,
    /// statistic(a) <= n  =>  graham_to_farey(a) ⊆ F_n and closed
    pub direction_b_pass: u64,
    pub direction_b_fail: u64,
    /// Failing instances, as the fraction sets involved.
    pub failures: Vec<Vec<Fraction>>,
}

impl EquivReport {
    pub fn all_passed(&self) -> bool {
        self.direction_a_fail == 0 && self.direction_b_fail == 0
    }
}

/// A random clique of the compatibility graph containing `0/1` and `1/1`:
/// a shuffled greedy extension, stopped early at random for size variety.
fn random_clique(graph: &CompatGraph, rng: &mut ChaCha8Rng) -> BTreeSet<Fraction> {
    let count = graph.vertex_count();
    let mut chosen: Vec<usize> = vec![0, count - 1];
    let mut interior: Vec<usize> = (1..count - 1).collect();
    interior.shuffle(rng);
    for v in interior {
        if chosen.iter().all(|&u| graph.is_edge(u, v)) {
            chosen.push(v);
            if chosen.len() > 3 && rng.gen_bool(0.25) {
                break;
            }
        }
    }
    chosen.into_iter().map(|i| graph.fraction(i)).collect()
}

/// A random sequence with statistic at most `n`, built from the divisor
/// families `{M_n/k}` and `{1..n}` under random scaling, or from the
/// transform of a random clique.
fn random_bounded_sequence(n: u64, graph: &CompatGraph, rng: &mut ChaCha8Rng) -> GrahamSequence {
    let base: GrahamSequence = match rng.gen_range(0..3u8) {
        0 => {
            let family = mn_sequence(n).expect("M_n fits at desk scale");
            random_subsequence(&family, rng)
        }
        1 => {
            let counting =
                GrahamSequence::new((1..=u128::from(n)).collect()).expect("counting family");
            random_subsequence(&counting, rng)
        }
        _ => {
            let clique = random_clique(graph, rng);
            farey_to_graham(&clique).expect("cliques contain 1/1")
        }
    };
    let scale = rng.gen_range(1..=5u128);
    base.scaled(scale).expect("small scale at desk scale")
}

fn random_subsequence(sequence: &GrahamSequence, rng: &mut ChaCha8Rng) -> GrahamSequence {
    let len = sequence.len();
    let keep = rng.gen_range(2..=len.max(2));
    let mut indices: Vec<usize> = (0..len).collect();
    indices.shuffle(rng);
    let mut picked: Vec<u128> = indices
        .into_iter()
        .take(keep.min(len))
        .map(|i| sequence.terms()[i])
        .collect();
    picked.sort_unstable();
    picked.dedup();
    GrahamSequence::new(picked).expect("sorted distinct positive terms")
}

/// Exercises both proof directions of the equivalence on generated
/// instances: direction A maps random cliques to sequences and checks the
/// statistic bound; direction B generates sequences with statistic at most
/// `n` and checks that their image is a closed subset of `F_n`.
pub fn cross_check_equivalence(n: u64, samples: u64) -> EquivReport {
    assert!(n >= 2, "equivalence check requires n >= 2");
    let graph = compat_graph(n);
    let mut rng = ChaCha8Rng::seed_from_u64(0x6672_6163 ^ n);
    let mut report = EquivReport {
        n,
        samples,
        direction_a_pass: 0,
        direction_a_fail: 0,
        direction_b_pass: 0,
        direction_b_fail: 0,
        failures: Vec::new(),
    };

    for _ in 0..samples {
        let clique = random_clique(&graph, &mut rng);
        let sequence = farey_to_graham(&clique).expect("cliques contain 1/1");
        let stat = statistic(&sequence).expect("cliques map to >= 2 terms");
        if stat.value <= u128::from(n) {
            report.direction_a_pass += 1;
        } else {
            report.direction_a_fail += 1;
            report.failures.push(clique.iter().copied().collect());
        }
    }

    for _ in 0..samples {
        let sequence = random_bounded_sequence(n, &graph, &mut rng);
        let stat = statistic(&sequence).expect("generator yields >= 2 terms");
        debug_assert!(stat.value <= u128::from(n), "generator broke its bound");
        let image = graham_to_farey(&sequence);
        let closed = closure_check(&image, n).map(|r| r.closed).unwrap_or(false);
        if closed {
            report.direction_b_pass += 1;
        } else {
            report.direction_b_fail += 1;
            report.failures.push(image.iter().copied().collect());
        }
    }
    report
}

/// Wraps equivalence tallies into a certificate: verified iff every
/// generated instance passed; failing instances appear in `found_sets`.
pub fn equivalence_certificate(report: &EquivReport, elapsed_ms: u64) -> Certificate {
    Certificate {
        schema_version: SCHEMA_VERSION.to_string(),
        theorem: Theorem::Equiv,
        n: report.n,
        status: if report.all_passed() {
            Status::Verified
        } else {
            Status::Refuted
        },
        expected_sets: Vec::new(),
        found_sets: report.failures.clone(),
        max_subset_size: 0,
        nodes_explored: 2 * report.samples,
        elapsed_ms,
    }
}

/// Runs the equivalence cross-check and certifies the outcome.
pub fn verify_equivalence(n: u64, samples: u64) -> Certificate {
    let start = Instant::now();
    let report = cross_check_equivalence(n, samples);
    equivalence_certificate(&report, start.elapsed().as_millis() as u64)
}
