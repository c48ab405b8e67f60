//! Generation and membership queries for the Farey sequence `F_n`, plus the
//! two canonical extremal families `{0, 1, 1/2, ..., 1/n}` and
//! `{0, 1, 1/n, ..., (n-1)/n}`.

use crate::arith::{totient, Fraction};
use std::collections::BTreeSet;

/// The Farey sequence of order `n`: every reduced fraction in `[0, 1]` with
/// denominator at most `n`, in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FareySequence {
    order: u64,
    elements: Vec<Fraction>,
}

impl FareySequence {
    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn elements(&self) -> &[Fraction] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        false // always holds 0/1 and 1/1
    }

    pub fn contains(&self, f: &Fraction) -> bool {
        self.elements.binary_search(f).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Fraction> {
        self.elements.iter()
    }

    pub fn to_set(&self) -> BTreeSet<Fraction> {
        self.elements.iter().copied().collect()
    }
}

/// Generates `F_n` with the next-term recurrence: after adjacent terms
/// `p/q < r/s`, the following term is `(kr - p) / (ks - q)` with
/// `k = floor((n + q) / s)`. Linear in the output size.
pub fn farey_sequence(n: u64) -> FareySequence {
    assert!(n >= 1, "farey_sequence requires n >= 1");
    let n = u128::from(n);
    let mut elements = vec![Fraction::zero()];
    let (mut p, mut q, mut r, mut s) = (0u128, 1u128, 1u128, n);
    loop {
        elements.push(Fraction::new(r, s).expect("recurrence keeps s >= 1"));
        if (r, s) == (1, 1) {
            break;
        }
        let k = (n + q) / s;
        (p, q, r, s) = (r, s, k * r - p, k * s - q);
    }
    FareySequence {
        order: n as u64,
        elements,
    }
}

/// `|F_n| = 1 + sum of phi(k) for k = 1..=n`, the totient cross-check for
/// the generated sequence length.
pub fn farey_size(n: u64) -> u64 {
    assert!(n >= 1, "farey_size requires n >= 1");
    1 + (1..=n).map(totient).sum::<u64>()
}

/// Membership in `F_n` for an already-reduced fraction: `num <= den <= n`.
pub fn is_member(f: &Fraction, n: u64) -> bool {
    f.numerator() <= f.denominator() && f.denominator() <= u128::from(n)
}

/// The unit-fraction family `{0, 1, 1/2, ..., 1/n}`, of size `n + 1`.
pub fn unit_fraction_set(n: u64) -> BTreeSet<Fraction> {
    assert!(n >= 1);
    let mut set = BTreeSet::from([Fraction::zero()]);
    for k in 1..=n {
        set.insert(Fraction::new(1, u128::from(k)).expect("k >= 1"));
    }
    set
}

/// The same-denominator family `{0, 1} U {k/n : 1 <= k <= n-1}`, stored as
/// reduced values (`2/4` becomes `1/2`). The `n + 1` values `k/n` are
/// pairwise distinct, so reduction never shrinks the set.
pub fn same_denominator_set(n: u64) -> BTreeSet<Fraction> {
    assert!(n >= 1);
    let mut set = BTreeSet::from([Fraction::zero(), Fraction::one()]);
    for k in 1..n {
        set.insert(Fraction::new(u128::from(k), u128::from(n)).expect("n >= 1"));
    }
    set
}
