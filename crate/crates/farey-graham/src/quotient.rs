//! The quotient set `Q(S)`, closure and coverage checks against `F_n`, and
//! the pairwise compatibility graph whose cliques are exactly the closed
//! subsets of `F_n`.

use crate::arith::Fraction;
use crate::bitset::BitSet;
use crate::farey::{farey_sequence, is_member};
use crate::{Error, Result};
use serde::Serialize;
use std::collections::BTreeSet;

/// Outcome of a closure check `Q(S) ⊆ F_n`, with the first offending pair
/// when it fails.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClosureReport {
    pub closed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<QuotientWitness>,
}

/// A pair `x <= y` of set elements whose quotient `x/y` leaves `F_n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct QuotientWitness {
    pub x: Fraction,
    pub y: Fraction,
    pub quotient: Fraction,
}

/// Outcome of a coverage check `Q(S) = F_n`, with both set differences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverageReport {
    pub covers: bool,
    pub missing: Vec<Fraction>,
    pub extraneous: Vec<Fraction>,
}

/// `Q(S) = { x/y : x, y in S, x <= y, y != 0 }`, as a set of reduced
/// fractions. By convention `Q({0}) = {0}`.
pub fn quotient_set(s: &BTreeSet<Fraction>) -> Result<BTreeSet<Fraction>> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    if s.len() == 1 && s.contains(&Fraction::zero()) {
        return Ok(BTreeSet::from([Fraction::zero()]));
    }
    let elements: Vec<Fraction> = s.iter().copied().collect();
    let mut quotients = BTreeSet::new();
    for (j, y) in elements.iter().enumerate() {
        if y.is_zero() {
            continue;
        }
        for x in &elements[..=j] {
            quotients.insert(x.div(y)?);
        }
    }
    Ok(quotients)
}

fn require_subset(s: &BTreeSet<Fraction>, n: u64) -> Result<()> {
    if s.is_empty() {
        return Err(Error::EmptySet);
    }
    let offending: Vec<Fraction> = s.iter().filter(|f| !is_member(f, n)).copied().collect();
    if offending.is_empty() {
        Ok(())
    } else {
        Err(Error::NotSubsetOfFarey {
            order: n,
            elements: offending,
        })
    }
}

/// Decides `Q(S) ⊆ F_n`. The hypothesis `S ⊆ F_n` is required and checked;
/// violating it is a domain error rather than `closed = false`.
///
/// Pairs are scanned in lexicographic `(y, x)` order over the sorted set, so
/// the reported witness is deterministic.
pub fn closure_check(s: &BTreeSet<Fraction>, n: u64) -> Result<ClosureReport> {
    require_subset(s, n)?;
    let elements: Vec<Fraction> = s.iter().copied().collect();
    for (j, y) in elements.iter().enumerate() {
        if y.is_zero() {
            continue;
        }
        for x in &elements[..=j] {
            let quotient = x.div(y)?;
            if !is_member(&quotient, n) {
                return Ok(ClosureReport {
                    closed: false,
                    witness: Some(QuotientWitness {
                        x: *x,
                        y: *y,
                        quotient,
                    }),
                });
            }
        }
    }
    Ok(ClosureReport {
        closed: true,
        witness: None,
    })
}

/// Decides `Q(S) = F_n`, reporting the sorted differences in both
/// directions.
pub fn coverage_check(s: &BTreeSet<Fraction>, n: u64) -> Result<CoverageReport> {
    require_subset(s, n)?;
    let quotients = quotient_set(s)?;
    let farey = farey_sequence(n).to_set();
    let missing: Vec<Fraction> = farey.difference(&quotients).copied().collect();
    let extraneous: Vec<Fraction> = quotients.difference(&farey).copied().collect();
    Ok(CoverageReport {
        covers: missing.is_empty() && extraneous.is_empty(),
        missing,
        extraneous,
    })
}

/// The compatibility graph on `F_n`: vertices are the elements of `F_n` in
/// ascending order, and `{u, v}` is an edge exactly when `min/max` stays in
/// `F_n`. Cliques of this graph are the subsets with `Q(S) ⊆ F_n`; `0/1` and
/// `1/1` are adjacent to everything.
#[derive(Debug, Clone)]
pub struct CompatGraph {
    order: u64,
    vertices: Vec<Fraction>,
    adjacency: Vec<BitSet>,
}

/// Builds the compatibility graph of `F_n`.
pub fn compat_graph(n: u64) -> CompatGraph {
    let vertices = farey_sequence(n).elements().to_vec();
    let count = vertices.len();
    let mut adjacency = vec![BitSet::new(count); count];
    for j in 0..count {
        for i in 0..j {
            // vertices are ascending, so vertices[i] <= vertices[j] and the
            // divisor is nonzero for j >= 1.
            let quotient = vertices[i]
                .div(&vertices[j])
                .expect("divisor is a nonzero Farey fraction");
            if is_member(&quotient, n) {
                adjacency[i].insert(j);
                adjacency[j].insert(i);
            }
        }
    }
    CompatGraph {
        order: n,
        vertices,
        adjacency,
    }
}

impl CompatGraph {
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Fraction] {
        &self.vertices
    }

    pub fn fraction(&self, index: usize) -> Fraction {
        self.vertices[index]
    }

    pub fn index_of(&self, f: &Fraction) -> Option<usize> {
        self.vertices.binary_search(f).ok()
    }

    pub fn is_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.adjacency[i].contains(j)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].count()
    }

    /// True when every pair of the given vertex indices is an edge.
    pub fn is_clique(&self, indices: &[usize]) -> bool {
        indices
            .iter()
            .enumerate()
            .all(|(k, &i)| indices[k + 1..].iter().all(|&j| self.is_edge(i, j)))
    }

    /// Maps vertex indices to their fractions, ascending.
    pub fn fractions_of(&self, indices: &[usize]) -> Vec<Fraction> {
        let mut sorted: Vec<usize> = indices.to_vec();
        sorted.sort_unstable();
        sorted.into_iter().map(|i| self.vertices[i]).collect()
    }

    pub(crate) fn neighbors(&self, i: usize) -> &BitSet {
        &self.adjacency[i]
    }
}
