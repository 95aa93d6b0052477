//! Finite arithmetic of the shuffle group.
//!
//! A level-n shuffle permutes the level-n inflation words of a single
//! letter in place, so the group generated by all of them is the direct
//! product over the alphabet of symmetric groups on the image sets. Its
//! order, the order of the corresponding product of alternating groups,
//! and the index bound between them are all exact integer data, computed
//! here with big integers.

use std::collections::BTreeMap;

use num_bigint::BigUint;

use crate::bundled;
use crate::error::{Error, Result};
use crate::substitution::RandomSubstitution;
use crate::word::Letter;

/// Exact order data for the level-n shuffle group.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupOrderReport {
    pub level: usize,
    /// Number of distinct level-n inflation words of each letter.
    pub counts: BTreeMap<Letter, usize>,
    /// Order of the full shuffle group, the product of count! over letters.
    pub full_order: BigUint,
    /// Order of the product of alternating groups: count!/2 for letters
    /// with at least two inflation words, 1 otherwise.
    pub alternating_order: BigUint,
    /// The exact index of the alternating product, 2^(number of letters
    /// with at least two inflation words).
    pub index: BigUint,
    /// The coarser a-priori bound 2^(alphabet size); index divides this.
    pub index_bound: BigUint,
}

fn factorial(n: usize) -> BigUint {
    let mut out = BigUint::from(1u32);
    for k in 2..=n {
        out *= BigUint::from(k);
    }
    out
}

/// Number of distinct level-n inflation words of each letter. Image sets
/// are deduplicated: realisations that coincide as words count once.
pub fn inflation_counts(
    sub: &RandomSubstitution,
    n: usize,
) -> Result<BTreeMap<Letter, usize>> {
    if n == 0 {
        return Ok(sub.alphabet().letters().map(|a| (a, 1)).collect());
    }
    let power = sub.power(n)?;
    Ok(sub
        .alphabet()
        .letters()
        .map(|a| (a, power.images(a).len()))
        .collect())
}

/// Exact orders of the level-n shuffle group and its alternating subgroup.
pub fn shuffle_group_order(sub: &RandomSubstitution, n: usize) -> Result<GroupOrderReport> {
    let counts = inflation_counts(sub, n)?;
    let mut full_order = BigUint::from(1u32);
    let mut alternating_order = BigUint::from(1u32);
    let mut nontrivial = 0usize;
    for &c in counts.values() {
        full_order *= factorial(c);
        if c >= 2 {
            alternating_order *= factorial(c) / BigUint::from(2u32);
            nontrivial += 1;
        }
    }
    Ok(GroupOrderReport {
        level: n,
        counts,
        full_order,
        alternating_order,
        index: BigUint::from(2u32).pow(nontrivial as u32),
        index_bound: BigUint::from(2u32).pow(sub.dim() as u32),
    })
}

/// For the bundled three-letter example with images closed under cyclic
/// relabelling, compare the enumerated count of level-n inflation words of
/// the letter 0 against the closed form 2^((3^n - 1)/2).
pub fn example5_count_check(n: usize) -> Result<(BigUint, BigUint)> {
    if n > 3 {
        return Err(Error::SizeLimit {
            what: "enumerated inflation word count".into(),
            limit: 3,
        });
    }
    let sub = bundled::example5();
    let zero = sub.word("0")?.0[0];
    let counted = BigUint::from(inflation_counts(&sub, n)?[&zero]);
    let exponent = (3usize.pow(n as u32) - 1) / 2;
    let closed = BigUint::from(2u32).pow(exponent as u32);
    Ok((counted, closed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn example5_counts_match_the_closed_form() {
        for n in 0..=3 {
            let (counted, closed) = example5_count_check(n).unwrap();
            assert_eq!(counted, closed, "level {n}");
        }
        assert_eq!(
            example5_count_check(3).unwrap().0,
            BigUint::from(8192u32)
        );
        assert!(matches!(
            example5_count_check(4),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn example5_level_one_group_has_order_eight() {
        let sub = bundled::example5();
        let report = shuffle_group_order(&sub, 1).unwrap();
        assert!(report.counts.values().all(|&c| c == 2));
        assert_eq!(report.full_order, BigUint::from(8u32));
        assert_eq!(report.alternating_order, BigUint::from(1u32));
        assert_eq!(report.index, BigUint::from(8u32));
        assert_eq!(report.index_bound, BigUint::from(8u32));
    }

    #[test]
    fn example5_counts_are_relabelling_invariant() {
        let sub = bundled::example5();
        for n in 1..=3 {
            let counts = inflation_counts(&sub, n).unwrap();
            let vals: Vec<usize> = counts.values().copied().collect();
            assert!(vals.windows(2).all(|w| w[0] == w[1]), "level {n}: {vals:?}");
        }
    }

    #[test]
    fn random_fibonacci_level_three_letter_a_contributes_factorial_eight() {
        let sub = bundled::random_fibonacci();
        let a = sub.word("a").unwrap().0[0];
        let b = sub.word("b").unwrap().0[0];
        let counts = inflation_counts(&sub, 3).unwrap();
        assert_eq!(counts[&a], 8);
        let report = shuffle_group_order(&sub, 3).unwrap();
        assert_eq!(report.full_order, factorial(8) * factorial(counts[&b]));
    }

    #[test]
    fn degenerate_substitution_has_trivial_group() {
        let sub = crate::substitution::parse_substitution("alphabet: a\na -> a").unwrap();
        for n in 0..=4 {
            let report = shuffle_group_order(&sub, n).unwrap();
            assert_eq!(report.full_order, BigUint::from(1u32));
            assert_eq!(report.alternating_order, BigUint::from(1u32));
            assert_eq!(report.index, BigUint::from(1u32));
        }
    }

    #[test]
    fn alternating_order_divides_with_quotient_dividing_the_bound() {
        for (_, sub) in bundled::all() {
            let report = shuffle_group_order(&sub, 2).unwrap();
            let q = report.full_order.clone() / report.alternating_order.clone();
            assert_eq!(q, report.index);
            assert_eq!(
                report.index_bound.clone() % report.index.clone(),
                BigUint::from(0u32)
            );
        }
    }
}
