//! Exact rank over the rationals by fraction-free (Bareiss) elimination.
//!
//! Every intermediate entry produced by Bareiss is a minor of the input, so
//! the division by the previous pivot is exact. A checked `i128` pass runs
//! first; on overflow the same elimination reruns on big integers.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::BoolFun;

/// Rank of the sign matrix of `f`.
pub fn rank(f: &BoolFun) -> usize {
    rank_of_rows(&f.sign_rows())
}

/// Rank of an integer matrix given as rows.
pub fn rank_of_rows(rows: &[Vec<i64>]) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    let small: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
    match bareiss_i128(small) {
        Some(r) => r,
        None => {
            let big: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
            bareiss_big(big)
        }
    }
}

fn bareiss_i128(mut a: Vec<Vec<i128>>) -> Option<usize> {
    let (m, n) = (a.len(), a[0].len());
    let mut prev: i128 = 1;
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, p);
        let pivot = a[r][c];
        for i in r + 1..m {
            let lead = a[i][c];
            for j in c + 1..n {
                let t = pivot.checked_mul(a[i][j])?.checked_sub(lead.checked_mul(a[r][j])?)?;
                a[i][j] = t / prev;
            }
            a[i][c] = 0;
        }
        prev = pivot;
        r += 1;
    }
    Some(r)
}

fn bareiss_big(mut a: Vec<Vec<BigInt>>) -> usize {
    let (m, n) = (a.len(), a[0].len());
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        let Some(p) = (r..m).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let pivot = a[r][c].clone();
        for i in r + 1..m {
            let lead = a[i][c].clone();
            for j in c + 1..n {
                let t = &pivot * &a[i][j] - &lead * &a[r][j];
                a[i][j] = t / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = pivot;
        r += 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{make_family, Family};

    #[test]
    fn small_examples() {
        assert_eq!(rank(&make_family(Family::Xor, 2, None, None).unwrap()), 1);
        assert_eq!(rank(&make_family(Family::Const, 3, None, Some(0)).unwrap()), 1);
        assert_eq!(rank(&make_family(Family::Eq, 4, None, None).unwrap()), 4);
    }

    #[test]
    fn zero_and_degenerate_matrices() {
        assert_eq!(rank_of_rows(&[vec![0, 0], vec![0, 0]]), 0);
        assert_eq!(rank_of_rows(&[vec![0, 1], vec![0, 2]]), 1);
        assert_eq!(rank_of_rows(&[]), 0);
    }

    #[test]
    fn big_integer_fallback_agrees() {
        // 2x2 minors of these entries overflow i128 at the second pivot.
        let k = 1i64 << 61;
        let rows = vec![
            vec![k, k - 1, 3, 7],
            vec![k - 3, k, 5, 11],
            vec![k - 2, k - 9, 8, 19],
            vec![k - 7, k - 5, 1, 2],
        ];
        let small: Vec<Vec<i128>> = rows.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect();
        assert!(bareiss_i128(small).is_none());
        let big: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
        assert_eq!(bareiss_big(big), 4);
        assert_eq!(rank_of_rows(&rows), 4);
    }
}
