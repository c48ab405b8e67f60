//! Exact integer and reduced-fraction arithmetic.
//!
//! All intermediates are 128-bit and every multiplication is overflow
//! checked: an out-of-range value is reported as [`Error::Overflow`], never
//! wrapped. Fractions are value types kept in lowest terms by construction,
//! with the canonical zero `0/1`.

use crate::{Error, Result};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// Greatest common divisor, with `gcd(a, 0) = a` and `gcd(0, 0) = 0`.
pub fn gcd(a: u128, b: u128) -> u128 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Least common multiple `[a, b]`, computed as `(a / gcd(a, b)) * b`.
pub fn lcm(a: u128, b: u128) -> Result<u128> {
    assert!(a >= 1 && b >= 1, "lcm arguments must be positive");
    (a / gcd(a, b))
        .checked_mul(b)
        .ok_or_else(|| Error::Overflow {
            context: format!("lcm({a},{b})"),
        })
}

/// `M_n`, the least common multiple of `1..=n`.
///
/// Grows like `e^n`, so it fits in 128 bits up to roughly `n = 85`; beyond
/// that the error names the first `k` that no longer fits.
pub fn lcm_upto(n: u64) -> Result<u128> {
    assert!(n >= 1, "lcm_upto requires n >= 1");
    let mut acc: u128 = 1;
    for k in 1..=n {
        acc = lcm(acc, u128::from(k)).map_err(|_| Error::Overflow {
            context: format!("lcm_upto: M_{k} exceeds 128 bits"),
        })?;
    }
    Ok(acc)
}

/// Euler's totient `phi(k)` by trial factorization.
pub fn totient(k: u64) -> u64 {
    assert!(k >= 1, "totient requires k >= 1");
    let mut remaining = k;
    let mut phi = k;
    let mut p = 2;
    while p * p <= remaining {
        if remaining.is_multiple_of(p) {
            while remaining.is_multiple_of(p) {
                remaining /= p;
            }
            phi -= phi / p;
        }
        p += 1;
    }
    if remaining > 1 {
        phi -= phi / remaining;
    }
    phi
}

/// A non-negative rational in lowest terms. `gcd(num, den) = 1` and
/// `den >= 1` always hold; zero is canonically `0/1`, so structural equality
/// coincides with value equality.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Fraction {
    num: u128,
    den: u128,
}

impl Fraction {
    /// Reduces `num/den` to lowest terms. `reduce(0, d)` is the canonical
    /// zero `0/1`; a zero denominator is a domain error.
    pub fn new(num: u128, den: u128) -> Result<Fraction> {
        if den == 0 {
            return Err(Error::ZeroDenominator);
        }
        let g = gcd(num, den);
        Ok(Fraction {
            num: num / g,
            den: den / g,
        })
    }

    /// The canonical zero `0/1`.
    pub const fn zero() -> Fraction {
        Fraction { num: 0, den: 1 }
    }

    /// The fraction `1/1`.
    pub const fn one() -> Fraction {
        Fraction { num: 1, den: 1 }
    }

    pub fn numerator(&self) -> u128 {
        self.num
    }

    pub fn denominator(&self) -> u128 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    /// Exact division `self / rhs` in lowest terms.
    ///
    /// Cancels the two cross gcds before multiplying, so for reduced inputs
    /// the result needs no final reduction and intermediates stay minimal:
    ///
    /// ```text
    /// (a/b) / (c/d) = [ a/(a,c) * d/(b,d) ] / [ c/(a,c) * b/(b,d) ]
    /// ```
    ///
    /// both sides of which are already coprime.
    pub fn div(&self, rhs: &Fraction) -> Result<Fraction> {
        if rhs.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let gn = gcd(self.num, rhs.num);
        let gd = gcd(self.den, rhs.den);
        let overflow = || Error::Overflow {
            context: format!("{self} / {rhs}"),
        };
        let num = (self.num / gn)
            .checked_mul(rhs.den / gd)
            .ok_or_else(overflow)?;
        let den = (rhs.num / gn)
            .checked_mul(self.den / gd)
            .ok_or_else(overflow)?;
        debug_assert_eq!(gcd(num, den), 1, "cancellation must fully reduce");
        Ok(Fraction { num, den })
    }
}

impl PartialOrd for Fraction {
    fn partial_cmp(&self, other: &Fraction) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Fraction {
    /// Total order by value. Compares by wide cross-multiplication; when the
    /// 128-bit cross products would overflow it falls back to the exact
    /// continued-fraction comparison, so the order is total and never wraps.
    fn cmp(&self, other: &Fraction) -> Ordering {
        match (
            self.num.checked_mul(other.den),
            other.num.checked_mul(self.den),
        ) {
            (Some(lhs), Some(rhs)) => lhs.cmp(&rhs),
            _ => cmp_by_euclid(self.num, self.den, other.num, other.den),
        }
    }
}

/// Compares `an/ad` with `bn/bd` via the Euclidean expansion of both ratios.
/// Uses only division and remainder, so it is exact at any magnitude.
fn cmp_by_euclid(mut an: u128, mut ad: u128, mut bn: u128, mut bd: u128) -> Ordering {
    loop {
        let (qa, qb) = (an / ad, bn / bd);
        if qa != qb {
            return qa.cmp(&qb);
        }
        let (ra, rb) = (an % ad, bn % bd);
        match (ra == 0, rb == 0) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            // Both tails nonzero: a/b vs c/d now reduces to comparing the
            // reciprocals of the remainders, which flips the operands.
            (false, false) => (an, ad, bn, bd) = (bd, rb, ad, ra),
        }
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Fraction {
    type Err = Error;

    /// Parses `"p/q"`, or a bare integer `"k"` as `k/1`. Values are reduced
    /// on ingest; negative values, empty parts and `q = 0` are rejected.
    fn from_str(s: &str) -> Result<Fraction> {
        let bad = || Error::Parse(format!("invalid fraction {s:?}"));
        match s.split_once('/') {
            Some((num, den)) => {
                let num: u128 = num.trim().parse().map_err(|_| bad())?;
                let den: u128 = den.trim().parse().map_err(|_| bad())?;
                if den == 0 {
                    return Err(Error::Parse(format!(
                        "invalid fraction {s:?}: denominator is zero"
                    )));
                }
                Fraction::new(num, den)
            }
            None => {
                let num: u128 = s.trim().parse().map_err(|_| bad())?;
                Ok(Fraction { num, den: 1 })
            }
        }
    }
}

impl Serialize for Fraction {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Fraction {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Fraction, D::Error> {
        let text = String::deserialize(deserializer)?;
        text.parse().map_err(D::Error::custom)
    }
}
