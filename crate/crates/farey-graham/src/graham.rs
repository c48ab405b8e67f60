//! The integer-sequence side: the gcd statistic
//! `max_{i != j} a_i / (a_i, a_j)` of a set of distinct positive integers,
//! the bidirectional transforms between such sequences and Farey subsets,
//! the gcd identities the transforms rest on, and bounded brute-force scans
//! of the two extremal-sequence conjectures.

use crate::arith::{gcd, lcm, lcm_upto, Fraction};
use crate::{Error, Result};
use serde::de::Error as _;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::BTreeSet;

/// Ascending distinct positive integers `a_1 < a_2 < ... < a_m`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GrahamSequence {
    terms: Vec<u128>,
}

impl GrahamSequence {
    pub fn new(terms: Vec<u128>) -> Result<GrahamSequence> {
        let increasing = terms.windows(2).all(|w| w[0] < w[1]);
        if terms.is_empty() || terms[0] < 1 || !increasing {
            return Err(Error::NotStrictlyIncreasing);
        }
        Ok(GrahamSequence { terms })
    }

    pub fn terms(&self) -> &[u128] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        false // at least one term by construction
    }

    /// The sequence scaled by `c`, term by term.
    pub fn scaled(&self, c: u128) -> Result<GrahamSequence> {
        assert!(c >= 1, "scale factor must be positive");
        let terms = self
            .terms
            .iter()
            .map(|&t| {
                t.checked_mul(c).ok_or_else(|| Error::Overflow {
                    context: format!("scaling {t} by {c}"),
                })
            })
            .collect::<Result<Vec<u128>>>()?;
        Ok(GrahamSequence { terms })
    }
}

impl Serialize for GrahamSequence {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        // 128-bit terms exceed what JSON numbers can carry, so terms use the
        // same decimal text form as fractions.
        serializer.collect_seq(self.terms.iter().map(|t| t.to_string()))
    }
}

impl<'de> Deserialize<'de> for GrahamSequence {
    fn deserialize<D: Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<GrahamSequence, D::Error> {
        let texts = Vec::<String>::deserialize(deserializer)?;
        let terms = texts
            .iter()
            .map(|t| t.parse::<u128>().map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<u128>, D::Error>>()?;
        GrahamSequence::new(terms).map_err(D::Error::custom)
    }
}

/// The statistic value and the first ordered pair attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatReport {
    pub value: u128,
    /// 1-based `(i, j)` with `value = a_i / (a_i, a_j)`.
    pub argmax: (usize, usize),
}

impl Serialize for StatReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("StatReport", 2)?;
        s.serialize_field("value", &self.value.to_string())?;
        s.serialize_field("argmax", &self.argmax)?;
        s.end()
    }
}

/// `max over ordered pairs i != j of a_i / (a_i, a_j)`; the divisor divides
/// `a_i`, so every term is an integer. The argmax is the first maximizing
/// pair in row-major order.
pub fn statistic(sequence: &GrahamSequence) -> Result<StatReport> {
    if sequence.len() < 2 {
        return Err(Error::TooFewTerms);
    }
    let (value, argmax) = max_pair_ratio(sequence.terms());
    Ok(StatReport { value, argmax })
}

fn max_pair_ratio(terms: &[u128]) -> (u128, (usize, usize)) {
    let mut best = 0;
    let mut argmax = (0, 0);
    for (i, &a) in terms.iter().enumerate() {
        for (j, &b) in terms.iter().enumerate() {
            if i == j {
                continue;
            }
            let ratio = a / gcd(a, b);
            if ratio > best {
                best = ratio;
                argmax = (i + 1, j + 1);
            }
        }
    }
    (best, argmax)
}

/// The second extremal family `{M_n/n, M_n/(n-1), ..., M_n/1}`, ascending.
pub fn mn_sequence(n: u64) -> Result<GrahamSequence> {
    assert!(n >= 1, "mn_sequence requires n >= 1");
    let m = lcm_upto(n)?;
    let terms: Vec<u128> = (1..=u128::from(n)).rev().map(|k| m / k).collect();
    GrahamSequence::new(terms)
}

fn nonzero_ascending(s: &BTreeSet<Fraction>) -> Result<Vec<Fraction>> {
    let fractions: Vec<Fraction> = s.iter().filter(|f| !f.is_zero()).copied().collect();
    if fractions.is_empty() {
        return Err(Error::NoNonzeroElement);
    }
    Ok(fractions)
}

/// Maps a Farey subset to its gcd sequence. With the nonzero elements
/// `x_1/y_1 < ... < x_m/y_m` and `L` the lcm of the numerators, the terms
/// are the integers `L * y_k / x_k` in ascending order; the term produced by
/// a fraction `f` is `L / f`, so larger fractions map to smaller integers.
///
/// Zero is dropped; `1` is handled like any other element.
pub fn farey_to_graham(s: &BTreeSet<Fraction>) -> Result<GrahamSequence> {
    let fractions = nonzero_ascending(s)?;
    let l = fractions
        .iter()
        .try_fold(1u128, |acc, f| lcm(acc, f.numerator()))?;
    let mut terms = fractions
        .iter()
        .map(|f| {
            (l / f.numerator())
                .checked_mul(f.denominator())
                .ok_or_else(|| Error::Overflow {
                    context: format!("farey_to_graham term for {f}"),
                })
        })
        .collect::<Result<Vec<u128>>>()?;
    terms.reverse(); // ascending fractions gave descending integers
    GrahamSequence::new(terms)
}

/// Maps a gcd sequence back to a Farey subset:
/// `{0} U { a_1/a_k in lowest terms : 1 <= k <= m }`. Contains `1` (from
/// `k = 1`) and has exactly `m + 1` elements, the ratios being distinct.
pub fn graham_to_farey(sequence: &GrahamSequence) -> BTreeSet<Fraction> {
    let first = sequence.terms()[0];
    let mut set = BTreeSet::from([Fraction::zero()]);
    for &term in sequence.terms() {
        set.insert(Fraction::new(first, term).expect("terms are positive"));
    }
    set
}

/// Verifies the two gcd identities behind the transform, pairwise over the
/// constructed sequence. Indexing follows the decreasing-terms convention
/// (`a_k` paired with the ascending `x_k/y_k`), so for `i < j`:
///
/// ```text
/// (a_i, a_j) = L / [x_i, x_j] * (y_i, y_j)
/// a_i / (a_i, a_j) = y_i / x_i * [x_i, x_j] / (y_i, y_j)
/// ```
///
/// Returns true iff every pair passes both, comparing against direct gcd
/// computation.
pub fn gcd_identity_check(s: &BTreeSet<Fraction>) -> Result<bool> {
    let fractions = nonzero_ascending(s)?;
    let sequence = farey_to_graham(s)?;
    let descending: Vec<u128> = sequence.terms().iter().rev().copied().collect();
    let l = fractions
        .iter()
        .try_fold(1u128, |acc, f| lcm(acc, f.numerator()))?;

    for i in 0..fractions.len() {
        for j in (i + 1)..fractions.len() {
            let (xi, yi) = (fractions[i].numerator(), fractions[i].denominator());
            let (xj, yj) = (fractions[j].numerator(), fractions[j].denominator());
            let lcm_x = lcm(xi, xj)?;
            let gcd_y = gcd(yi, yj);

            let overflow = |what: &str| Error::Overflow {
                context: format!("gcd_identity_check {what} at pair ({i},{j})"),
            };
            let expected_gcd = (l / lcm_x)
                .checked_mul(gcd_y)
                .ok_or_else(|| overflow("gcd identity"))?;
            let actual_gcd = gcd(descending[i], descending[j]);
            if actual_gcd != expected_gcd {
                return Ok(false);
            }

            // a_i/(a_i,a_j) must equal (y_i * [x_i,x_j]) / (x_i * (y_i,y_j))
            // exactly, as integers.
            let ratio = descending[i] / actual_gcd;
            let num = yi.checked_mul(lcm_x).ok_or_else(|| overflow("ratio"))?;
            let den = xi.checked_mul(gcd_y).ok_or_else(|| overflow("ratio"))?;
            if num % den != 0 || num / den != ratio {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Cap on the number of subsets a brute-force scan may enumerate.
pub const SCAN_BUDGET: u64 = 100_000_000;

/// Result of a bounded scan for statistic values below the sequence length.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Conjecture1Report {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<GrahamSequence>,
    pub subsets_checked: u64,
}

fn check_scan_budget(len: usize, bound: u64) -> Result<()> {
    if len < 2 {
        return Err(Error::TooFewTerms);
    }
    if binomial(bound, len) > u128::from(SCAN_BUDGET) {
        return Err(Error::ScanBudget {
            len,
            bound,
            budget: SCAN_BUDGET,
        });
    }
    Ok(())
}

fn binomial(n: u64, k: usize) -> u128 {
    if (k as u64) > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k as u64 {
        acc = acc.saturating_mul(u128::from(n - i)) / u128::from(i + 1);
    }
    acc
}

/// Visits every ascending `len`-subset of `1..=bound` in lexicographic
/// order. The visitor returns false to stop early.
fn for_each_subset(len: usize, bound: u64, mut visit: impl FnMut(&[u128]) -> bool) {
    if (len as u64) > bound {
        return;
    }
    let mut current: Vec<u128> = (1..=len as u128).collect();
    loop {
        if !visit(&current) {
            return;
        }
        // Advance the rightmost position that still has room.
        let mut i = len;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if current[i] < u128::from(bound) - (len - 1 - i) as u128 {
                break;
            }
        }
        current[i] += 1;
        for j in i + 1..len {
            current[j] = current[j - 1] + 1;
        }
    }
}

/// Checks `statistic >= len` over every ascending `len`-subset of
/// `1..=bound`, reporting the first counterexample if one exists. A passing
/// scan is verification within the bound, not a proof.
pub fn brute_force_conjecture1(len: usize, bound: u64) -> Result<Conjecture1Report> {
    check_scan_budget(len, bound)?;
    let mut checked = 0;
    let mut counterexample = None;
    for_each_subset(len, bound, |terms| {
        checked += 1;
        let (value, _) = max_pair_ratio(terms);
        if value < len as u128 {
            counterexample = Some(GrahamSequence {
                terms: terms.to_vec(),
            });
            return false;
        }
        true
    });
    Ok(Conjecture1Report {
        holds: counterexample.is_none(),
        counterexample,
        subsets_checked: checked,
    })
}

/// Lists every ascending `len`-subset of `1..=bound` with overall gcd 1 and
/// statistic exactly `len`, in lexicographic order — the equality achievers
/// the second conjecture classifies.
pub fn brute_force_conjecture2(len: usize, bound: u64) -> Result<Vec<GrahamSequence>> {
    check_scan_budget(len, bound)?;
    let mut achievers = Vec::new();
    for_each_subset(len, bound, |terms| {
        let overall = terms.iter().fold(0u128, |acc, &t| gcd(acc, t));
        if overall == 1 {
            let (value, _) = max_pair_ratio(terms);
            if value == len as u128 {
                achievers.push(GrahamSequence {
                    terms: terms.to_vec(),
                });
            }
        }
        true
    });
    Ok(achievers)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn seq(terms: &[u128]) -> GrahamSequence {
        GrahamSequence::new(terms.to_vec()).unwrap()
    }

    fn frac(num: u128, den: u128) -> Fraction {
        Fraction::new(num, den).unwrap()
    }

    fn set(pairs: &[(u128, u128)]) -> BTreeSet<Fraction> {
        pairs.iter().map(|&(a, b)| frac(a, b)).collect()
    }

    #[test]
    fn sequence_construction_enforces_invariants() {
        assert!(GrahamSequence::new(vec![]).is_err());
        assert!(GrahamSequence::new(vec![0, 1]).is_err());
        assert!(GrahamSequence::new(vec![3, 3]).is_err());
        assert!(GrahamSequence::new(vec![4, 2]).is_err());
        assert_eq!(seq(&[2, 3, 4, 6]).terms(), &[2, 3, 4, 6]);
    }

    #[test]
    fn statistic_hand_cases() {
        let report = statistic(&seq(&[2, 3, 4, 6])).unwrap();
        assert_eq!(report.value, 4);
        assert_eq!(report.argmax, (3, 2)); // 4 / (4, 3) = 4

        for n in [2u128, 5, 12, 30] {
            let terms: Vec<u128> = (1..=n).collect();
            assert_eq!(statistic(&seq(&terms)).unwrap().value, n);
        }

        // Brute-force oracle over all 12 ordered pairs of {3, 4, 6, 12}.
        let terms = [3u128, 4, 6, 12];
        let mut oracle = 0;
        for (i, &a) in terms.iter().enumerate() {
            for (j, &b) in terms.iter().enumerate() {
                if i != j {
                    oracle = oracle.max(a / gcd(a, b));
                }
            }
        }
        assert_eq!(oracle, 4);
        assert_eq!(statistic(&seq(&terms)).unwrap().value, 4);
    }

    #[test]
    fn statistic_requires_two_terms() {
        assert!(matches!(
            statistic(&seq(&[7])),
            Err(Error::TooFewTerms)
        ));
    }

    #[test]
    fn mn_sequence_hand_cases() {
        assert_eq!(mn_sequence(4).unwrap(), seq(&[3, 4, 6, 12]));
        assert_eq!(mn_sequence(1).unwrap(), seq(&[1]));
        assert_eq!(mn_sequence(5).unwrap(), seq(&[12, 15, 20, 30, 60]));
    }

    #[test]
    fn both_extremal_families_attain_the_statistic() {
        for n in 2..=30 {
            let count: Vec<u128> = (1..=u128::from(n)).collect();
            assert_eq!(
                statistic(&seq(&count)).unwrap().value,
                u128::from(n),
                "counting family at n = {n}"
            );
            assert_eq!(
                statistic(&mn_sequence(n).unwrap()).unwrap().value,
                u128::from(n),
                "M_n family at n = {n}"
            );
        }
    }

    #[test]
    fn farey_to_graham_hand_cases() {
        assert_eq!(
            farey_to_graham(&set(&[(0, 1), (1, 1), (1, 2), (1, 3), (2, 3)])).unwrap(),
            seq(&[2, 3, 4, 6])
        );
        let units = crate::farey::unit_fraction_set(7);
        assert_eq!(
            farey_to_graham(&units).unwrap(),
            seq(&[1, 2, 3, 4, 5, 6, 7])
        );
        assert_eq!(farey_to_graham(&set(&[(0, 1), (1, 1)])).unwrap(), seq(&[1]));
        assert!(matches!(
            farey_to_graham(&set(&[(0, 1)])),
            Err(Error::NoNonzeroElement)
        ));
    }

    #[test]
    fn graham_to_farey_hand_cases() {
        assert_eq!(
            graham_to_farey(&seq(&[2, 3, 4, 6])),
            set(&[(0, 1), (1, 1), (2, 3), (1, 2), (1, 3)])
        );
        let terms: Vec<u128> = (1..=9).collect();
        assert_eq!(
            graham_to_farey(&seq(&terms)),
            crate::farey::unit_fraction_set(9)
        );
        for c in [1u128, 7, 1_000_000] {
            assert_eq!(
                graham_to_farey(&seq(&[c])),
                set(&[(0, 1), (1, 1)]),
                "singleton {c}"
            );
        }
    }

    #[test]
    fn round_trip_on_maximum_cliques() {
        for n in 2..=8 {
            let result = crate::search::max_cliques(&crate::quotient::compat_graph(n), None).unwrap();
            for clique in &result.cliques {
                let s: BTreeSet<Fraction> = clique.iter().copied().collect();
                let back = graham_to_farey(&farey_to_graham(&s).unwrap());
                assert_eq!(back, s, "round trip failed at n = {n}");
            }
        }
    }

    #[test]
    fn transform_statistic_bridge_on_cliques() {
        // Closed sets map to sequences with statistic at most n, and such
        // sequences map back inside F_n to closed sets.
        for n in 2..=8 {
            let result = crate::search::max_cliques(&crate::quotient::compat_graph(n), None).unwrap();
            for clique in &result.cliques {
                let s: BTreeSet<Fraction> = clique.iter().copied().collect();
                let sequence = farey_to_graham(&s).unwrap();
                let stat = statistic(&sequence).unwrap();
                assert!(stat.value <= u128::from(n), "statistic leak at n = {n}");
                let image = graham_to_farey(&sequence);
                assert!(
                    crate::quotient::closure_check(&image, n).unwrap().closed,
                    "image not closed at n = {n}"
                );
            }
        }
    }

    #[test]
    fn gcd_identities_hand_cases() {
        assert!(gcd_identity_check(&set(&[(0, 1), (1, 1), (1, 2), (1, 3), (2, 3)])).unwrap());
        assert!(gcd_identity_check(&crate::farey::unit_fraction_set(6)).unwrap());
        assert!(gcd_identity_check(&set(&[(0, 1), (1, 1)])).unwrap());
    }

    #[test]
    fn gcd_identities_on_random_farey_subsets() {
        let mut rng = ChaCha8Rng::seed_from_u64(1001);
        for _ in 0..200 {
            let n = rng.gen_range(2..=12);
            let farey = crate::farey::farey_sequence(n);
            let mut pool: Vec<Fraction> = farey.elements().to_vec();
            pool.shuffle(&mut rng);
            let size = rng.gen_range(1..=pool.len().min(8));
            let s: BTreeSet<Fraction> = pool.into_iter().take(size).collect();
            if s.iter().all(|f| f.is_zero()) {
                continue;
            }
            assert!(
                gcd_identity_check(&s).unwrap(),
                "identities failed for {s:?} in F_{n}"
            );
        }
    }

    #[test]
    fn conjecture1_scan_hand_cases() {
        let report = brute_force_conjecture1(4, 24).unwrap();
        assert!(report.holds);
        assert!(report.counterexample.is_none());
        assert_eq!(report.subsets_checked, 10_626); // C(24, 4)

        let small = brute_force_conjecture1(2, 10).unwrap();
        assert!(small.holds);
        assert_eq!(small.subsets_checked, 45);

        assert!(matches!(
            brute_force_conjecture1(1, 10),
            Err(Error::TooFewTerms)
        ));
    }

    #[test]
    fn conjecture1_scan_budget_is_enforced() {
        assert!(matches!(
            brute_force_conjecture1(8, 10_000),
            Err(Error::ScanBudget { .. })
        ));
    }

    #[test]
    fn conjecture2_scan_hand_cases() {
        assert_eq!(
            brute_force_conjecture2(4, 50).unwrap(),
            vec![seq(&[1, 2, 3, 4]), seq(&[2, 3, 4, 6]), seq(&[3, 4, 6, 12])]
        );
        assert_eq!(
            brute_force_conjecture2(3, 30).unwrap(),
            vec![seq(&[1, 2, 3]), seq(&[2, 3, 6])]
        );
        assert_eq!(brute_force_conjecture2(2, 10).unwrap(), vec![seq(&[1, 2])]);
    }

    #[test]
    fn sequence_serde_uses_decimal_strings() {
        let s = seq(&[2, 3, 4, u128::MAX]);
        let json = serde_json::to_string(&s).unwrap();
        assert!(json.contains("\"340282366920938463463374607431768211455\""));
        let back: GrahamSequence = serde_json::from_str(&json).unwrap();
        assert_eq!(back, s);
        assert!(serde_json::from_str::<GrahamSequence>("[\"4\",\"2\"]").is_err());
    }

    proptest! {
        /// graham_to_farey only sees the ratios a_1/a_k, so scaling the
        /// whole sequence changes nothing.
        #[test]
        fn scaling_invariance(
            mut raw in proptest::collection::vec(1u64..10_000, 1..10),
            c in 1u64..1000,
        ) {
            raw.sort_unstable();
            raw.dedup();
            let terms: Vec<u128> = raw.iter().map(|&t| u128::from(t)).collect();
            let a = GrahamSequence::new(terms).unwrap();
            let scaled = a.scaled(u128::from(c)).unwrap();
            prop_assert_eq!(graham_to_farey(&scaled), graham_to_farey(&a));
        }

        /// |graham_to_farey(a)| = |a| + 1: zero plus one distinct ratio per
        /// term.
        #[test]
        fn cardinality_bridge(mut raw in proptest::collection::vec(1u64..100_000, 1..12)) {
            raw.sort_unstable();
            raw.dedup();
            let terms: Vec<u128> = raw.iter().map(|&t| u128::from(t)).collect();
            let a = GrahamSequence::new(terms).unwrap();
            prop_assert_eq!(graham_to_farey(&a).len(), a.len() + 1);
        }
    }
}
