//! From a monochromatic rectangle `R` of `f^{⊕n}` to a monochromatic
//! rectangle `T` of `f` with `(4|T|)^n ≥ |R|`.
//!
//! With `(X, Y)` uniform on `R`, `X` and `Y` are independent, so
//! `H(X_i Y_i | X_{<i} Y_{>i}) = H(X_i | X_{<i}) + H(Y_i | Y_{>i})` and the
//! terms sum to `log2 |R|` over `i`. Fixing the best coordinate, the best
//! prefix/suffix, and the best parities `u = ⊕_{j<i} f(x_j, Y_j)`,
//! `v = ⊕_{j>i} f(X_j, y_j)` leaves a product distribution on `(X_i, Y_i)`
//! whose support is `T`; on it `f(x_i, y_i)` is the lift color times
//! `(-1)^{u⊕v}`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::Serialize;

use super::entropy_of_counts;
use crate::error::{Error, Result};
use crate::matrix::{LiftedFun, Sign};
use crate::rect::{check_monochromatic, find_violation, IndexSet, Rectangle};

/// Absolute tolerance for entropy ties.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// The tuple fixed during extraction. `i` is 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditioningContext {
    pub i: usize,
    pub x_prefix: Vec<usize>,
    pub y_suffix: Vec<usize>,
    pub u: u8,
    pub v: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub n: usize,
    pub i: usize,
    pub x_prefix: Vec<usize>,
    pub y_suffix: Vec<usize>,
    pub u: u8,
    pub v: u8,
    pub r_size: u64,
    pub t_size: u64,
    /// Color of `T` in the base function.
    pub color: Sign,
    /// Color of `R` in the lift.
    pub lift_color: Sign,
    /// Smallest `|T|` the guarantee allows: least `t` with `(4t)^n ≥ |R|`.
    pub t_guarantee: u64,
    pub check: String,
    pub passed: bool,
    /// `H(X_i Y_i | X_{<i} Y_{>i})` for each coordinate.
    pub chain_terms: Vec<f64>,
    /// Entropy after fixing the coordinate, the prefix/suffix, and `(u, v)`.
    pub stage_entropies: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Extraction {
    pub t: Rectangle,
    pub ctx: ConditioningContext,
    pub certificate: Certificate,
}

/// Row and column tuples of `R` decoded through the lift codecs.
struct Tuples {
    xs: Vec<Vec<usize>>,
    ys: Vec<Vec<usize>>,
}

impl Tuples {
    fn of(lift: &LiftedFun, r: &Rectangle) -> Tuples {
        Tuples {
            xs: r.rows.iter().map(|x| lift.row_codec.decode(x)).collect(),
            ys: r.cols.iter().map(|y| lift.col_codec.decode(y)).collect(),
        }
    }
}

/// Per context key, counts of the coordinate value.
type Groups = BTreeMap<Vec<usize>, BTreeMap<usize, u64>>;

fn group_by<'a>(
    tuples: impl Iterator<Item = &'a Vec<usize>>,
    key: impl Fn(&[usize]) -> Vec<usize>,
    coord: usize,
) -> Groups {
    let mut g: Groups = BTreeMap::new();
    for t in tuples {
        *g.entry(key(t)).or_default().entry(t[coord]).or_default() += 1;
    }
    g
}

/// `H(Z | K)` from per-key value counts.
fn conditional_from_groups(groups: &Groups) -> f64 {
    let total: u64 = groups.values().flat_map(|m| m.values()).sum();
    groups
        .values()
        .map(|m| {
            let n: u64 = m.values().sum();
            (n as f64 / total as f64) * entropy_of_counts(m.values().copied())
        })
        .sum()
}

/// First key whose value beats the running best by more than the tolerance.
fn argmax<K: Clone>(items: impl IntoIterator<Item = (K, f64)>) -> Option<(K, f64)> {
    let mut best: Option<(K, f64)> = None;
    for (k, v) in items {
        if best.as_ref().is_none_or(|(_, b)| v > b + TIE_TOLERANCE) {
            best = Some((k, v));
        }
    }
    best
}

fn prefix_key(i: usize) -> impl Fn(&[usize]) -> Vec<usize> {
    move |t| t[..i].to_vec()
}

fn suffix_key(i: usize) -> impl Fn(&[usize]) -> Vec<usize> {
    move |t| t[i + 1..].to_vec()
}

fn check_input(lift: &LiftedFun, r: &Rectangle) -> Result<Sign> {
    r.check_bounds(&lift.lifted).map_err(|e| Error::Precondition(e.to_string()))?;
    let (x0, y0) = (r.rows.iter().next().unwrap(), r.cols.iter().next().unwrap());
    let color = lift.lifted.sign(x0, y0);
    if let Some((x, y)) = find_violation(&lift.lifted, r, color) {
        return Err(Error::Precondition(format!(
            "rectangle is not monochromatic in the lift: cell ({x}, {y}) differs from ({x0}, {y0})"
        )));
    }
    if r.color.is_some_and(|c| c != color) {
        return Err(Error::Precondition(format!("rectangle is labelled {} but the lift is {color} on it", r.color.unwrap())));
    }
    Ok(color)
}

/// `H(X_i Y_i | X_{<i} Y_{>i})` for `i = 1..n`, with `(X, Y)` uniform on `r`.
pub fn chain_rule_terms(lift: &LiftedFun, r: &Rectangle) -> Result<Vec<f64>> {
    r.check_bounds(&lift.lifted)?;
    let t = Tuples::of(lift, r);
    Ok(terms(&t, lift.n))
}

fn terms(t: &Tuples, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            conditional_from_groups(&group_by(t.xs.iter(), prefix_key(i), i))
                + conditional_from_groups(&group_by(t.ys.iter(), suffix_key(i), i))
        })
        .collect()
}

/// Least `t` with `(4t)^n ≥ size`.
fn guarantee(size: u64, n: usize) -> u64 {
    let target = BigUint::from(size);
    let fits = |t: u64| BigUint::from(4 * t).pow(n as u32) >= target;
    let (mut lo, mut hi) = (0u64, size.max(1));
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    lo
}

pub fn extract_rectangle(lift: &LiftedFun, r: &Rectangle) -> Result<Extraction> {
    let lift_color = check_input(lift, r)?;
    let n = lift.n;
    let f = &lift.base;
    let tuples = Tuples::of(lift, r);

    // Coordinate with the largest conditional entropy.
    let chain_terms = terms(&tuples, n);
    let (i, stage1) = argmax(chain_terms.iter().copied().enumerate()).expect("n >= 1");

    // Prefix and suffix separately: the conditional entropy splits into an
    // X part depending only on the prefix and a Y part only on the suffix.
    let x_groups = group_by(tuples.xs.iter(), prefix_key(i), i);
    let y_groups = group_by(tuples.ys.iter(), suffix_key(i), i);
    let (x_prefix, hx) = argmax(x_groups.iter().map(|(k, m)| (k.clone(), entropy_of_counts(m.values().copied()))))
        .expect("R has rows");
    let (y_suffix, hy) = argmax(y_groups.iter().map(|(k, m)| (k.clone(), entropy_of_counts(m.values().copied()))))
        .expect("R has columns");
    let stage2 = hx + hy;

    // Split the surviving rows by v and columns by u.
    let xs: Vec<&Vec<usize>> = tuples.xs.iter().filter(|t| t[..i] == x_prefix[..]).collect();
    let ys: Vec<&Vec<usize>> = tuples.ys.iter().filter(|t| t[i + 1..] == y_suffix[..]).collect();
    let v_of = |x: &[usize]| (i + 1..n).fold(0u8, |acc, j| acc ^ f.bit(x[j], y_suffix[j - i - 1]));
    let u_of = |y: &[usize]| (0..i).fold(0u8, |acc, j| acc ^ f.bit(x_prefix[j], y[j]));
    let mut x_by_v: [BTreeMap<usize, u64>; 2] = Default::default();
    let mut y_by_u: [BTreeMap<usize, u64>; 2] = Default::default();
    for x in &xs {
        *x_by_v[v_of(x) as usize].entry(x[i]).or_default() += 1;
    }
    for y in &ys {
        *y_by_u[u_of(y) as usize].entry(y[i]).or_default() += 1;
    }
    let candidates = (0..2u8)
        .flat_map(|u| (0..2u8).map(move |v| (u, v)))
        .filter(|&(u, v)| !y_by_u[u as usize].is_empty() && !x_by_v[v as usize].is_empty())
        .map(|(u, v)| {
            let h = entropy_of_counts(x_by_v[v as usize].values().copied())
                + entropy_of_counts(y_by_u[u as usize].values().copied());
            ((u, v), h)
        });
    let ((u, v), stage3) = argmax(candidates).expect("some (u, v) has positive probability");

    let rows = IndexSet::from_indices(x_by_v[v as usize].keys().copied());
    let cols = IndexSet::from_indices(y_by_u[u as usize].keys().copied());
    let color = if u ^ v == 1 { lift_color.flip() } else { lift_color };
    let t = Rectangle::new(rows, cols, Some(color));

    match check_monochromatic(f, &t)? {
        Some(c) if c == color => {}
        _ => return Err(Error::Invariant("extracted rectangle is not monochromatic in the base".into())),
    }
    let r_size = r.area();
    let t_size = t.area();
    let passed = BigUint::from(4 * t_size).pow(n as u32) >= BigUint::from(r_size);
    if !passed {
        return Err(Error::Invariant(format!(
            "certificate failed: (4*{t_size})^{n} < {r_size}"
        )));
    }

    let ctx = ConditioningContext {
        i: i + 1,
        x_prefix: x_prefix.clone(),
        y_suffix: y_suffix.clone(),
        u,
        v,
    };
    let certificate = Certificate {
        n,
        i: i + 1,
        x_prefix,
        y_suffix,
        u,
        v,
        r_size,
        t_size,
        color,
        lift_color,
        t_guarantee: guarantee(r_size, n),
        check: "(4|T|)^n >= |R|".to_string(),
        passed,
        chain_terms,
        stage_entropies: [stage1, stage2, stage3],
    };
    Ok(Extraction { t, ctx, certificate })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entropy::{cond_entropy, FiniteDist};
    use crate::matrix::{make_family, random_matrix, xor_power, BoolFun, Family};
    use crate::rect::enumerate_maximal_mono;

    #[test]
    fn guarantee_values() {
        // |R| = 64 = 2^6, n = 2: |T| >= 2^{6/2 - 2} = 2.
        assert_eq!(guarantee(64, 2), 2);
        assert_eq!(guarantee(1, 1), 1);
        assert_eq!(guarantee(16, 1), 4);
        assert_eq!(guarantee(65, 2), 3);
    }

    #[test]
    fn n1_returns_r() {
        let f = make_family(Family::Eq, 4, None, None).unwrap();
        let lift = xor_power(&f, 1).unwrap();
        for r in enumerate_maximal_mono(&f, 1000).unwrap().rects {
            let e = extract_rectangle(&lift, &r).unwrap();
            assert_eq!(e.t, r);
            assert!(e.certificate.passed);
        }
    }

    #[test]
    fn size_64_rectangle_at_n2() {
        let f = BoolFun::from_fn(4, 4, |_, _| false).unwrap();
        let lift = xor_power(&f, 2).unwrap();
        let r = Rectangle::from_indices(0..8, 0..8, None);
        let e = extract_rectangle(&lift, &r).unwrap();
        assert_eq!(e.certificate.t_guarantee, 2);
        assert!(e.t.area() >= 2);
    }

    #[test]
    fn non_monochromatic_is_rejected() {
        let f = make_family(Family::Eq, 2, None, None).unwrap();
        let lift = xor_power(&f, 2).unwrap();
        let r = Rectangle::from_indices([0, 1], [0, 1], None);
        assert!(matches!(extract_rectangle(&lift, &r), Err(Error::Precondition(_))));
        let mislabelled = Rectangle::from_indices([0], [0], Some(Sign::Minus));
        assert!(matches!(extract_rectangle(&lift, &mislabelled), Err(Error::Precondition(_))));
    }

    /// Independent route: the joint distribution over all points of R,
    /// conditioned by brute force.
    fn brute_terms(lift: &LiftedFun, r: &Rectangle) -> Vec<f64> {
        let pts: Vec<(Vec<usize>, Vec<usize>)> = r
            .rows
            .iter()
            .flat_map(|x| r.cols.iter().map(move |y| (x, y)).collect::<Vec<_>>())
            .map(|(x, y)| (lift.row_codec.decode(x), lift.col_codec.decode(y)))
            .collect();
        (0..lift.n)
            .map(|i| {
                let joint = FiniteDist::uniform(
                    pts.iter()
                        .map(|(x, y)| ((x[i], y[i]), (x[..i].to_vec(), y[i + 1..].to_vec(), x.clone(), y.clone())))
                        .collect(),
                )
                .unwrap()
                .map(|(a, (p, s, _, _))| (*a, (p.clone(), s.clone())));
                cond_entropy(&joint)
            })
            .collect()
    }

    #[test]
    fn eq2_square_every_maximal_rectangle() {
        let f = make_family(Family::Eq, 2, None, None).unwrap();
        let lift = xor_power(&f, 2).unwrap();
        let rects = enumerate_maximal_mono(&lift.lifted, 10_000).unwrap();
        assert!(!rects.truncated);
        for r in rects.rects {
            let e = extract_rectangle(&lift, &r).unwrap();
            assert_eq!(check_monochromatic(&f, &e.t).unwrap(), Some(e.certificate.color));
            assert!(BigUint::from(4 * e.t.area()).pow(2) >= BigUint::from(r.area()));
            let brute = brute_terms(&lift, &r);
            for (a, b) in e.certificate.chain_terms.iter().zip(&brute) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn support_is_the_conditioned_product() {
        for seed in 0..30 {
            let f = random_matrix(3, 2, seed).unwrap();
            let lift = xor_power(&f, 2).unwrap();
            for r in enumerate_maximal_mono(&lift.lifted, 10_000).unwrap().rects {
                let e = extract_rectangle(&lift, &r).unwrap();
                let c = &e.ctx;
                let i = c.i - 1;
                // Condition the uniform points of R directly on (x_<i, y_>i, u, v).
                let mut support = std::collections::BTreeSet::new();
                for x in r.rows.iter() {
                    for y in r.cols.iter() {
                        let (xt, yt) = (lift.row_codec.decode(x), lift.col_codec.decode(y));
                        let u = (0..i).fold(0, |a, j| a ^ f.bit(xt[j], yt[j]));
                        let v = (i + 1..2).fold(0, |a, j| a ^ f.bit(xt[j], yt[j]));
                        if xt[..i] == c.x_prefix[..] && yt[i + 1..] == c.y_suffix[..] && u == c.u && v == c.v {
                            support.insert((xt[i], yt[i]));
                        }
                    }
                }
                let product: std::collections::BTreeSet<_> =
                    e.t.rows.iter().flat_map(|a| e.t.cols.iter().map(move |b| (a, b))).collect();
                assert_eq!(support, product, "seed {seed}");
            }
        }
    }

    #[test]
    fn stage_bounds_hold() {
        for seed in 0..40 {
            let f = random_matrix(3, 3, 500 + seed).unwrap();
            let lift = xor_power(&f, 2).unwrap();
            for r in enumerate_maximal_mono(&lift.lifted, 10_000).unwrap().rects {
                let e = extract_rectangle(&lift, &r).unwrap();
                let [s1, s2, s3] = e.certificate.stage_entropies;
                let k = (r.area() as f64).log2();
                let sum: f64 = e.certificate.chain_terms.iter().sum();
                assert!((sum - k).abs() < 1e-9);
                assert!(s1 >= k / 2.0 - 1e-9);
                assert!(s2 >= s1 - 1e-9);
                assert!(s3 >= s2 - 2.0 - 1e-9);
                assert!((e.t.area() as f64).log2() >= s3 - 1e-9);
            }
        }
    }
}
