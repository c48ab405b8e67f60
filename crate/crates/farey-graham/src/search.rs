//! Exact enumeration of all maximum cliques of a compatibility graph, i.e.
//! all largest subsets `S ⊆ F_n` with `Q(S) ⊆ F_n`.
//!
//! The solver peels the universal vertices `0/1` and `1/1` (they belong to
//! every maximal clique), then branches over the interior vertices with
//! greedy-coloring upper bounds and incremental candidate intersection.
//! Because the claims being checked are uniqueness statements, the solver
//! keeps every clique that ties the maximum, pruning only subtrees that are
//! strictly below the best known size.
//!
//! Worker threads split the top-level branches. Each branch is explored with
//! a bound that depends only on the branch itself and a deterministic greedy
//! seed, so clique lists and node counts are identical for any worker count.

use crate::arith::Fraction;
use crate::bitset::BitSet;
use crate::quotient::CompatGraph;
use crate::{Error, Result};
use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

/// Node and wall-clock limits for a search. Exceeding either is an explicit
/// error carrying the best result found so far.
#[derive(Debug, Clone, Copy)]
pub struct Budget {
    pub max_nodes: u64,
    pub max_time: Duration,
}

impl Default for Budget {
    fn default() -> Budget {
        Budget {
            max_nodes: 100_000_000,
            max_time: Duration::from_secs(300),
        }
    }
}

/// Budget plus worker count. Results are worker-count-invariant.
#[derive(Debug, Clone, Copy)]
pub struct SearchOptions {
    pub budget: Budget,
    pub threads: usize,
}

impl Default for SearchOptions {
    fn default() -> SearchOptions {
        SearchOptions {
            budget: Budget::default(),
            threads: default_threads(),
        }
    }
}

/// Available parallelism, falling back to one worker.
pub fn default_threads() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

/// Outcome of a clique search: the exact maximum size and every clique that
/// attains it, each sorted ascending, the list sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchResult {
    pub max_size: usize,
    pub cliques: Vec<Vec<Fraction>>,
    pub nodes_explored: u64,
    pub elapsed: Duration,
}

/// Enumerates all maximum cliques by branch and bound with the default
/// worker count. `budget: None` applies the default limits.
pub fn max_cliques(graph: &CompatGraph, budget: Option<Budget>) -> Result<SearchResult> {
    max_cliques_with(
        graph,
        &SearchOptions {
            budget: budget.unwrap_or_default(),
            threads: default_threads(),
        },
    )
}

struct SharedState {
    nodes: AtomicU64,
    abort: AtomicBool,
    max_nodes: u64,
    deadline: Instant,
}

impl SharedState {
    /// Flushes a worker-local node count and trips the abort flag once a
    /// limit is crossed. Only the error path depends on timing.
    fn flush(&self, local: u64) {
        let total = self.nodes.fetch_add(local, Ordering::Relaxed) + local;
        if total > self.max_nodes || Instant::now() > self.deadline {
            self.abort.store(true, Ordering::Relaxed);
        }
    }

    fn aborted(&self) -> bool {
        self.abort.load(Ordering::Relaxed)
    }
}

/// One top-level branch fully explored: the largest clique size seen in the
/// branch, the cliques attaining it, and the branch's exact node count.
struct BranchOutcome {
    index: usize,
    best_size: usize,
    cliques: Vec<Vec<usize>>,
    nodes: u64,
}

struct BranchSearch<'a> {
    adjacency: &'a [BitSet],
    seed_size: usize,
    best_size: usize,
    found: Vec<Vec<usize>>,
    nodes: u64,
    unflushed: u64,
    shared: &'a SharedState,
}

struct Aborted;

impl<'a> BranchSearch<'a> {
    fn expand(&mut self, clique: &mut Vec<usize>, candidates: &BitSet) -> std::result::Result<(), Aborted> {
        self.nodes += 1;
        self.unflushed += 1;
        if self.unflushed >= 1024 {
            self.shared.flush(self.unflushed);
            self.unflushed = 0;
        }
        if self.shared.aborted() {
            return Err(Aborted);
        }

        if candidates.is_empty() {
            self.record(clique);
            return Ok(());
        }

        let colored = color_order(candidates, self.adjacency);
        let mut remaining = candidates.clone();
        for &(vertex, color) in colored.iter().rev() {
            // Every unprocessed candidate has color <= this one, so no clique
            // through them can beat the threshold; ties must survive, hence
            // the strict inequality.
            if clique.len() + color < self.threshold() {
                return Ok(());
            }
            let next = remaining.and(&self.adjacency[vertex]);
            clique.push(vertex);
            self.expand(clique, &next)?;
            clique.pop();
            remaining.remove(vertex);
        }
        Ok(())
    }

    /// Prune level: the deterministic greedy seed, raised only by cliques
    /// found within this branch. Never depends on other workers.
    fn threshold(&self) -> usize {
        self.seed_size.max(self.best_size)
    }

    fn record(&mut self, clique: &[usize]) {
        match clique.len().cmp(&self.best_size) {
            std::cmp::Ordering::Greater => {
                self.best_size = clique.len();
                self.found.clear();
                self.found.push(clique.to_vec());
            }
            std::cmp::Ordering::Equal => self.found.push(clique.to_vec()),
            std::cmp::Ordering::Less => {}
        }
    }
}

/// Greedy coloring of the candidate set in position order. Returns
/// `(vertex, color)` pairs sorted by ascending color; the number of colors
/// bounds the largest clique inside the set.
fn color_order(candidates: &BitSet, adjacency: &[BitSet]) -> Vec<(usize, usize)> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in candidates.iter() {
        match classes
            .iter_mut()
            .find(|class| class.iter().all(|&u| !adjacency[v].contains(u)))
        {
            Some(class) => class.push(v),
            None => classes.push(vec![v]),
        }
    }
    classes
        .iter()
        .enumerate()
        .flat_map(|(i, class)| class.iter().map(move |&v| (v, i + 1)))
        .collect()
}

/// A deterministic greedy clique in branch order; its size seeds the prune
/// threshold of every branch.
fn greedy_seed_size(adjacency: &[BitSet]) -> usize {
    let mut candidates = BitSet::full(adjacency.len());
    let mut size = 0;
    for (v, row) in adjacency.iter().enumerate() {
        if candidates.contains(v) {
            size += 1;
            candidates = candidates.and(row);
        }
    }
    size
}

/// Enumerates all maximum cliques with explicit options.
pub fn max_cliques_with(graph: &CompatGraph, options: &SearchOptions) -> Result<SearchResult> {
    let start = Instant::now();
    let count = graph.vertex_count();
    let universal = universal_indices(graph);
    let interior: Vec<usize> = (0..count).filter(|i| !universal.contains(i)).collect();

    if interior.is_empty() {
        return Ok(SearchResult {
            max_size: universal.len(),
            cliques: vec![graph.fractions_of(&universal)],
            nodes_explored: 0,
            elapsed: start.elapsed(),
        });
    }

    // Branch order: descending degree, ties by ascending fraction (vertex
    // index). All candidate sets live in branch-order positions.
    let mut order = interior;
    order.sort_by_key(|&v| (std::cmp::Reverse(graph.degree(v)), v));
    let positions = order.len();
    let adjacency: Vec<BitSet> = order
        .iter()
        .map(|&v| {
            let mut row = BitSet::new(positions);
            for (j, &u) in order.iter().enumerate() {
                if graph.is_edge(v, u) {
                    row.insert(j);
                }
            }
            row
        })
        .collect();

    let seed_size = greedy_seed_size(&adjacency);
    let shared = SharedState {
        nodes: AtomicU64::new(0),
        abort: AtomicBool::new(false),
        max_nodes: options.budget.max_nodes,
        deadline: start + options.budget.max_time,
    };
    let next_branch = AtomicUsize::new(0);
    let outcomes: Mutex<Vec<BranchOutcome>> = Mutex::new(Vec::new());

    let workers = options.threads.max(1).min(positions);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let branch = next_branch.fetch_add(1, Ordering::SeqCst);
                if branch >= positions || shared.aborted() {
                    return;
                }
                let mut search = BranchSearch {
                    adjacency: &adjacency,
                    seed_size,
                    best_size: 0,
                    found: Vec::new(),
                    nodes: 0,
                    unflushed: 0,
                    shared: &shared,
                };
                // Cliques whose first vertex in branch order is `branch`:
                // candidates are the later neighbors.
                let mut candidates = adjacency[branch].clone();
                for earlier in 0..=branch {
                    candidates.remove(earlier);
                }
                let mut clique = vec![branch];
                let completed = search.expand(&mut clique, &candidates).is_ok();
                search.shared.flush(search.unflushed);
                if completed {
                    outcomes.lock().unwrap().push(BranchOutcome {
                        index: branch,
                        best_size: search.best_size,
                        cliques: search.found,
                        nodes: search.nodes,
                    });
                }
            });
        }
    });

    let mut outcomes = outcomes.into_inner().unwrap();
    outcomes.sort_by_key(|o| o.index);
    let result = merge_outcomes(graph, &order, &universal, &outcomes, start.elapsed());
    if shared.aborted() {
        return Err(Error::SearchBudget {
            partial: Box::new(result),
        });
    }
    Ok(result)
}

fn universal_indices(graph: &CompatGraph) -> Vec<usize> {
    // 0/1 is the first vertex and 1/1 the last; for n = 1 they are the whole
    // graph.
    if graph.vertex_count() <= 2 {
        (0..graph.vertex_count()).collect()
    } else {
        vec![0, graph.vertex_count() - 1]
    }
}

fn merge_outcomes(
    graph: &CompatGraph,
    order: &[usize],
    universal: &[usize],
    outcomes: &[BranchOutcome],
    elapsed: Duration,
) -> SearchResult {
    let interior_best = outcomes.iter().map(|o| o.best_size).max().unwrap_or(0);
    let nodes_explored = outcomes.iter().map(|o| o.nodes).sum();
    let mut cliques: Vec<Vec<Fraction>> = Vec::new();
    for outcome in outcomes {
        if outcome.best_size != interior_best {
            continue;
        }
        for positions in &outcome.cliques {
            let mut indices: Vec<usize> = positions.iter().map(|&p| order[p]).collect();
            indices.extend_from_slice(universal);
            cliques.push(graph.fractions_of(&indices));
        }
    }
    cliques.sort();
    SearchResult {
        max_size: interior_best + universal.len(),
        cliques,
        nodes_explored,
        elapsed,
    }
}

/// Maximum vertex count accepted by the naive oracle.
pub const NAIVE_VERTEX_LIMIT: usize = 25;

/// Full-subset-enumeration oracle with the same output contract as
/// [`max_cliques`]. Only suitable for tests and cross-validation.
pub fn max_cliques_naive(graph: &CompatGraph) -> Result<SearchResult> {
    let start = Instant::now();
    let count = graph.vertex_count();
    if count > NAIVE_VERTEX_LIMIT {
        return Err(Error::NaiveLimit {
            vertices: count,
            limit: NAIVE_VERTEX_LIMIT,
        });
    }
    let masks: Vec<u32> = (0..count)
        .map(|i| {
            (0..count)
                .filter(|&j| graph.is_edge(i, j))
                .fold(0u32, |m, j| m | (1 << j))
        })
        .collect();

    let mut best_size = 0;
    let mut best_masks: Vec<u32> = Vec::new();
    for subset in 1u32..(1 << count) {
        let size = subset.count_ones() as usize;
        if size < best_size {
            continue;
        }
        let mut bits = subset;
        let mut is_clique = true;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            if subset & !(masks[i] | (1 << i)) != 0 {
                is_clique = false;
                break;
            }
        }
        if !is_clique {
            continue;
        }
        if size > best_size {
            best_size = size;
            best_masks.clear();
        }
        best_masks.push(subset);
    }

    let mut cliques: Vec<Vec<Fraction>> = best_masks
        .iter()
        .map(|&mask| {
            let indices: Vec<usize> = (0..count).filter(|&i| mask & (1 << i) != 0).collect();
            graph.fractions_of(&indices)
        })
        .collect();
    cliques.sort();

    Ok(SearchResult {
        max_size: best_size,
        cliques,
        nodes_explored: (1u64 << count) - 1,
        elapsed: start.elapsed(),
    })
}

/// All inclusion-maximal cliques of size at least `min_size`, by pivoted
/// recursive enumeration. Maximal is weaker than maximum: these are the
/// closed subsets that cannot be extended, whatever their size.
pub fn all_maximal_closed_sets(
    graph: &CompatGraph,
    min_size: usize,
    budget: Option<Budget>,
) -> Result<Vec<Vec<Fraction>>> {
    assert!(min_size >= 1, "min_size must be at least 1");
    let start = Instant::now();
    let budget = budget.unwrap_or_default();
    let count = graph.vertex_count();
    let adjacency: Vec<BitSet> = (0..count).map(|v| graph.neighbors(v).clone()).collect();

    let mut lister = MaximalLister {
        adjacency: &adjacency,
        min_size,
        found: Vec::new(),
        nodes: 0,
        max_nodes: budget.max_nodes,
        deadline: start + budget.max_time,
    };
    let mut clique = Vec::new();
    let candidates = BitSet::full(count);
    let excluded = BitSet::new(count);
    let completed = lister.visit(&mut clique, &candidates, &excluded).is_ok();

    let mut cliques: Vec<Vec<Fraction>> = lister
        .found
        .iter()
        .map(|indices| graph.fractions_of(indices))
        .collect();
    cliques.sort();

    if completed {
        Ok(cliques)
    } else {
        let max_size = cliques.iter().map(|c| c.len()).max().unwrap_or(0);
        Err(Error::SearchBudget {
            partial: Box::new(SearchResult {
                max_size,
                cliques,
                nodes_explored: lister.nodes,
                elapsed: start.elapsed(),
            }),
        })
    }
}

struct MaximalLister<'a> {
    adjacency: &'a [BitSet],
    min_size: usize,
    found: Vec<Vec<usize>>,
    nodes: u64,
    max_nodes: u64,
    deadline: Instant,
}

impl<'a> MaximalLister<'a> {
    fn visit(
        &mut self,
        clique: &mut Vec<usize>,
        candidates: &BitSet,
        excluded: &BitSet,
    ) -> std::result::Result<(), Aborted> {
        self.nodes += 1;
        if self.nodes > self.max_nodes
            || (self.nodes.is_multiple_of(1024) && Instant::now() > self.deadline)
        {
            return Err(Aborted);
        }
        if candidates.is_empty() && excluded.is_empty() {
            if clique.len() >= self.min_size {
                let mut indices = clique.clone();
                indices.sort_unstable();
                self.found.push(indices);
            }
            return Ok(());
        }
        // Pivot on the vertex covering most candidates; only its
        // non-neighbors start recursive calls.
        let pivot = candidates
            .iter()
            .chain(excluded.iter())
            .max_by_key(|&u| candidates.and_count(&self.adjacency[u]))
            .expect("candidate or excluded set is nonempty");
        let branch: Vec<usize> = candidates
            .iter()
            .filter(|&v| !self.adjacency[pivot].contains(v))
            .collect();

        let mut candidates = candidates.clone();
        let mut excluded = excluded.clone();
        for v in branch {
            clique.push(v);
            self.visit(
                clique,
                &candidates.and(&self.adjacency[v]),
                &excluded.and(&self.adjacency[v]),
            )?;
            clique.pop();
            candidates.remove(v);
            excluded.insert(v);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quotient::{closure_check, compat_graph};
    use std::collections::BTreeSet;

    fn frac(num: u128, den: u128) -> Fraction {
        Fraction::new(num, den).unwrap()
    }

    fn fracs(pairs: &[(u128, u128)]) -> Vec<Fraction> {
        pairs.iter().map(|&(a, b)| frac(a, b)).collect()
    }

    #[test]
    fn order_one_is_the_trivial_clique() {
        let result = max_cliques(&compat_graph(1), None).unwrap();
        assert_eq!(result.max_size, 2);
        assert_eq!(result.cliques, vec![fracs(&[(0, 1), (1, 1)])]);

        let naive = max_cliques_naive(&compat_graph(1)).unwrap();
        assert_eq!(naive.max_size, 2);
        assert_eq!(naive.cliques, result.cliques);
    }

    #[test]
    fn order_two_has_one_maximum_clique() {
        let naive = max_cliques_naive(&compat_graph(2)).unwrap();
        assert_eq!(naive.max_size, 3);
        assert_eq!(naive.cliques, vec![fracs(&[(0, 1), (1, 2), (1, 1)])]);
    }

    #[test]
    fn order_three_has_two_maximum_cliques() {
        let naive = max_cliques_naive(&compat_graph(3)).unwrap();
        assert_eq!(naive.max_size, 4);
        assert_eq!(
            naive.cliques,
            vec![
                fracs(&[(0, 1), (1, 3), (1, 2), (1, 1)]),
                fracs(&[(0, 1), (1, 3), (2, 3), (1, 1)]),
            ]
        );
    }

    #[test]
    fn order_four_has_the_exceptional_third_clique() {
        let result = max_cliques(&compat_graph(4), None).unwrap();
        assert_eq!(result.max_size, 5);
        assert_eq!(
            result.cliques,
            vec![
                fracs(&[(0, 1), (1, 4), (1, 3), (1, 2), (1, 1)]),
                fracs(&[(0, 1), (1, 4), (1, 2), (3, 4), (1, 1)]),
                fracs(&[(0, 1), (1, 3), (1, 2), (2, 3), (1, 1)]),
            ]
        );
    }

    #[test]
    fn order_five_has_exactly_the_two_families() {
        let result = max_cliques(&compat_graph(5), None).unwrap();
        assert_eq!(result.max_size, 6);
        assert_eq!(
            result.cliques,
            vec![
                fracs(&[(0, 1), (1, 5), (1, 4), (1, 3), (1, 2), (1, 1)]),
                fracs(&[(0, 1), (1, 5), (2, 5), (3, 5), (4, 5), (1, 1)]),
            ]
        );
        // The same answer must come out of the 2^11-subset oracle.
        let naive = max_cliques_naive(&compat_graph(5)).unwrap();
        assert_eq!(naive.max_size, result.max_size);
        assert_eq!(naive.cliques, result.cliques);
    }

    #[test]
    fn branch_and_bound_matches_oracle_up_to_six() {
        for n in 1..=6 {
            let graph = compat_graph(n);
            let fast = max_cliques(&graph, None).unwrap();
            let naive = max_cliques_naive(&graph).unwrap();
            assert_eq!(fast.max_size, naive.max_size, "size mismatch at n = {n}");
            assert_eq!(fast.cliques, naive.cliques, "clique list mismatch at n = {n}");
        }
    }

    #[test]
    fn maximum_size_is_order_plus_one_up_to_ten() {
        for n in 1..=10 {
            let result = max_cliques(&compat_graph(n), None).unwrap();
            assert_eq!(result.max_size as u64, n + 1, "bound failed at n = {n}");
        }
    }

    #[test]
    fn every_clique_is_closed_and_contains_the_universal_pair() {
        for n in 1..=8 {
            let result = max_cliques(&compat_graph(n), None).unwrap();
            for clique in &result.cliques {
                assert_eq!(clique.len(), result.max_size);
                let set: BTreeSet<Fraction> = clique.iter().copied().collect();
                assert!(set.contains(&Fraction::zero()));
                assert!(set.contains(&Fraction::one()));
                assert!(closure_check(&set, n).unwrap().closed);
            }
        }
    }

    #[test]
    fn results_are_worker_count_invariant() {
        for n in [4, 7, 9] {
            let graph = compat_graph(n);
            let single = max_cliques_with(
                &graph,
                &SearchOptions {
                    budget: Budget::default(),
                    threads: 1,
                },
            )
            .unwrap();
            for threads in [2, 4, 7] {
                let multi = max_cliques_with(
                    &graph,
                    &SearchOptions {
                        budget: Budget::default(),
                        threads,
                    },
                )
                .unwrap();
                assert_eq!(multi.max_size, single.max_size);
                assert_eq!(multi.cliques, single.cliques);
                assert_eq!(
                    multi.nodes_explored, single.nodes_explored,
                    "node count must not depend on workers (n = {n}, threads = {threads})"
                );
            }
        }
    }

    #[test]
    fn repeated_runs_are_identical() {
        let graph = compat_graph(8);
        let a = max_cliques(&graph, None).unwrap();
        let b = max_cliques(&graph, None).unwrap();
        assert_eq!(a.max_size, b.max_size);
        assert_eq!(a.cliques, b.cliques);
        assert_eq!(a.nodes_explored, b.nodes_explored);
    }

    #[test]
    fn exhausted_node_budget_is_an_error_with_partial_result() {
        let graph = compat_graph(9);
        let err = max_cliques_with(
            &graph,
            &SearchOptions {
                budget: Budget {
                    max_nodes: 1,
                    max_time: Duration::from_secs(300),
                },
                threads: 2,
            },
        )
        .unwrap_err();
        match err {
            Error::SearchBudget { partial } => {
                assert!(partial.max_size <= 10);
            }
            other => panic!("expected SearchBudget, got {other:?}"),
        }
    }

    #[test]
    fn naive_rejects_oversized_graphs() {
        let graph = compat_graph(12); // |F_12| = 47 > 25
        assert!(matches!(
            max_cliques_naive(&graph),
            Err(Error::NaiveLimit { .. })
        ));
    }

    #[test]
    fn maximal_listing_hand_cases() {
        assert_eq!(
            all_maximal_closed_sets(&compat_graph(1), 1, None).unwrap(),
            vec![fracs(&[(0, 1), (1, 1)])]
        );

        let max4 = max_cliques(&compat_graph(4), None).unwrap();
        assert_eq!(
            all_maximal_closed_sets(&compat_graph(4), 5, None).unwrap(),
            max4.cliques
        );

        let max3 = max_cliques(&compat_graph(3), None).unwrap();
        assert_eq!(
            all_maximal_closed_sets(&compat_graph(3), 4, None).unwrap(),
            max3.cliques
        );
    }

    #[test]
    fn maximal_listing_contains_every_maximum_clique() {
        for n in 2..=8 {
            let graph = compat_graph(n);
            let maximal = all_maximal_closed_sets(&graph, 1, None).unwrap();
            let maximum = max_cliques(&graph, None).unwrap();
            for clique in &maximum.cliques {
                assert!(maximal.contains(clique), "missing maximum clique at n = {n}");
            }
            // Every maximal clique is closed and cannot be extended.
            for clique in &maximal {
                let set: BTreeSet<Fraction> = clique.iter().copied().collect();
                assert!(closure_check(&set, n).unwrap().closed);
                for v in graph.vertices() {
                    if set.contains(v) {
                        continue;
                    }
                    let mut extended = set.clone();
                    extended.insert(*v);
                    assert!(
                        !closure_check(&extended, n).unwrap().closed,
                        "maximal clique at n = {n} could absorb {v}"
                    );
                }
            }
        }
    }
}
