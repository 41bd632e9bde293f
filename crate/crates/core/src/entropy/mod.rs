//! Shannon entropy over exact finite distributions, and rectangle extraction
//! from XOR lifts.

mod extract;

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub use extract::{chain_rule_terms, extract_rectangle, Certificate, ConditioningContext, Extraction, TIE_TOLERANCE};

/// A finite distribution with exact rational probabilities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteDist<T> {
    outcomes: Vec<(T, BigRational)>,
}

impl<T: Ord + Clone> FiniteDist<T> {
    /// Probabilities must be non-negative and sum to exactly one; values must
    /// be distinct.
    pub fn new(outcomes: Vec<(T, BigRational)>) -> Result<FiniteDist<T>> {
        let mut total = BigRational::zero();
        for (_, p) in &outcomes {
            if p.is_negative() {
                return Err(Error::invalid("negative probability"));
            }
            total += p;
        }
        if !total.is_one() {
            return Err(Error::invalid(format!("probabilities sum to {total}, not 1")));
        }
        let mut values: Vec<&T> = outcomes.iter().map(|(v, _)| v).collect();
        values.sort();
        if values.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::invalid("support values are not distinct"));
        }
        Ok(FiniteDist { outcomes })
    }

    /// Probabilities proportional to positive-or-zero counts.
    pub fn from_counts(counts: Vec<(T, u64)>) -> Result<FiniteDist<T>> {
        let total: u64 = counts.iter().map(|(_, c)| c).sum();
        if total == 0 {
            return Err(Error::invalid("counts sum to zero"));
        }
        let denom = BigInt::from(total);
        FiniteDist::new(
            counts
                .into_iter()
                .map(|(v, c)| (v, BigRational::new(BigInt::from(c), denom.clone())))
                .collect(),
        )
    }

    pub fn uniform(values: Vec<T>) -> Result<FiniteDist<T>> {
        FiniteDist::from_counts(values.into_iter().map(|v| (v, 1)).collect())
    }

    pub fn outcomes(&self) -> &[(T, BigRational)] {
        &self.outcomes
    }

    /// Number of outcomes with positive probability.
    pub fn support_size(&self) -> usize {
        self.outcomes.iter().filter(|(_, p)| p.is_positive()).count()
    }

    /// Distribution of `g(value)`.
    pub fn map<U: Ord + Clone>(&self, mut g: impl FnMut(&T) -> U) -> FiniteDist<U> {
        let mut acc: BTreeMap<U, BigRational> = BTreeMap::new();
        for (v, p) in &self.outcomes {
            *acc.entry(g(v)).or_insert_with(BigRational::zero) += p;
        }
        FiniteDist {
            outcomes: acc.into_iter().collect(),
        }
    }

    /// Conditions on the event `keep`; `None` if it has probability zero.
    pub fn condition(&self, mut keep: impl FnMut(&T) -> bool) -> Option<FiniteDist<T>> {
        let kept: Vec<(T, BigRational)> = self.outcomes.iter().filter(|(v, _)| keep(v)).cloned().collect();
        let mass: BigRational = kept.iter().map(|(_, p)| p.clone()).sum();
        if mass.is_zero() {
            return None;
        }
        Some(FiniteDist {
            outcomes: kept.into_iter().map(|(v, p)| (v, p / &mass)).collect(),
        })
    }

    /// Shannon entropy in bits.
    pub fn entropy(&self) -> f64 {
        self.outcomes
            .iter()
            .map(|(_, p)| p.to_f64().unwrap_or(0.0))
            .filter(|&p| p > 0.0)
            .map(|p| -p * p.log2())
            .sum()
    }
}

pub fn entropy<T: Ord + Clone>(d: &FiniteDist<T>) -> f64 {
    d.entropy()
}

/// `H(A | B) = E[log 1/p(a|b)]` for a joint distribution over `(a, b)`.
pub fn cond_entropy<A: Ord + Clone, B: Ord + Clone>(joint: &FiniteDist<(A, B)>) -> f64 {
    let marginal_b = joint.map(|(_, b)| b.clone());
    let pb: BTreeMap<&B, f64> = marginal_b
        .outcomes()
        .iter()
        .map(|(b, p)| (b, p.to_f64().unwrap_or(0.0)))
        .collect();
    joint
        .outcomes()
        .iter()
        .map(|((_, b), p)| (p.to_f64().unwrap_or(0.0), pb[b]))
        .filter(|&(p, _)| p > 0.0)
        .map(|(p, q)| p * (q / p).log2())
        .sum()
}

/// Entropy of the distribution proportional to `counts`.
pub fn entropy_of_counts(counts: impl IntoIterator<Item = u64>) -> f64 {
    let counts: Vec<u64> = counts.into_iter().filter(|&c| c > 0).collect();
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let t = total as f64;
    t.log2() - counts.iter().map(|&c| c as f64 * (c as f64).log2()).sum::<f64>() / t
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn examples() {
        let u = FiniteDist::uniform(vec![0, 1, 2, 3]).unwrap();
        assert!((u.entropy() - 2.0).abs() < 1e-12);
        let point = FiniteDist::new(vec![(7, ratio(1, 1))]).unwrap();
        assert_eq!(point.entropy(), 0.0);
        let d = FiniteDist::new(vec![(0, ratio(1, 2)), (1, ratio(1, 4)), (2, ratio(1, 4))]).unwrap();
        assert!((entropy(&d) - 1.5).abs() < 1e-12);
        assert!((entropy_of_counts([2, 1, 1]) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn malformed_distributions() {
        assert!(FiniteDist::new(vec![(0, ratio(1, 2))]).is_err());
        assert!(FiniteDist::new(vec![(0, ratio(3, 2)), (1, ratio(-1, 2))]).is_err());
        assert!(FiniteDist::new(vec![(0, ratio(1, 2)), (0, ratio(1, 2))]).is_err());
        assert!(FiniteDist::<u8>::from_counts(vec![]).is_err());
    }

    #[test]
    fn conditional_examples() {
        // A = B uniform on 2 values: H(A|B) = 0. Independent: H(A|B) = H(A).
        let same = FiniteDist::uniform(vec![(0, 0), (1, 1)]).unwrap();
        assert!(cond_entropy(&same).abs() < 1e-12);
        let indep = FiniteDist::uniform(vec![(0, 0), (0, 1), (1, 0), (1, 1)]).unwrap();
        assert!((cond_entropy(&indep) - 1.0).abs() < 1e-12);
    }

    fn joint_strategy() -> impl Strategy<Value = Vec<((u8, u8), u64)>> {
        (1u8..5, 1u8..5).prop_flat_map(|(a, b)| {
            proptest::collection::vec(0u64..6, (a as usize) * (b as usize)).prop_map(move |counts| {
                let mut out = Vec::new();
                for i in 0..a {
                    for j in 0..b {
                        out.push(((i, j), counts[(i as usize) * (b as usize) + j as usize]));
                    }
                }
                if out.iter().all(|(_, c)| *c == 0) {
                    out[0].1 = 1;
                }
                out
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(500))]

        #[test]
        fn conditioning_never_increases_entropy(table in joint_strategy()) {
            let joint = FiniteDist::from_counts(table).unwrap();
            let h_a = joint.map(|(a, _)| *a).entropy();
            prop_assert!(cond_entropy(&joint) <= h_a + 1e-9);
        }

        #[test]
        fn chain_rule_and_support_bound(table in joint_strategy()) {
            let joint = FiniteDist::from_counts(table).unwrap();
            let h_ab = joint.entropy();
            let b_marg = joint.map(|(_, b)| *b);
            let swapped = joint.map(|(a, b)| (*b, *a));
            // H(A,B) = H(B) + H(A|B)
            prop_assert!((h_ab - b_marg.entropy() - cond_entropy(&joint)).abs() < 1e-9);
            prop_assert!((h_ab - joint.map(|(a, _)| *a).entropy() - cond_entropy(&swapped)).abs() < 1e-9);
            prop_assert!(h_ab <= (joint.support_size() as f64).log2() + 1e-9);
        }
    }
}
