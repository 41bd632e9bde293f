//! Exact deterministic communication complexity by memoized search over
//! (row set, column set) submatrices.
//!
//! `D(S, T) = 0` on a constant submatrix, else `1 + min` over a speaker and
//! a bipartition of that speaker's side of the larger child cost. Identical
//! rows (or columns) of a submatrix never need separating, so each state is
//! first reduced to one representative per distinct row and column. Lower
//! bounds `⌈log2 rank⌉` per state and `⌈log2 fooling⌉` at the root prune the
//! iterative deepening.

use std::collections::HashMap;

use serde::Serialize;

use super::{Node, ProtocolTree, Speaker};
use crate::error::Result;
use crate::limits::{Budget, SearchLimits};
use crate::matrix::{rank, rank_of_rows, BoolFun};
use crate::rect::{fooling_lower_bound, require_search_size, MaskIter};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CcResult {
    pub lower: usize,
    pub upper: usize,
    /// A protocol of depth `upper` computing the function.
    #[serde(skip)]
    pub protocol: ProtocolTree,
    pub nodes: u64,
}

impl CcResult {
    pub fn exact(&self) -> Option<usize> {
        (self.lower == self.upper).then_some(self.lower)
    }
}

pub(crate) fn ceil_log2(n: usize) -> usize {
    if n <= 1 {
        0
    } else {
        (usize::BITS - (n - 1).leading_zeros()) as usize
    }
}

/// Rows of `rx` grouped by their values on `ry`, in order of first member.
pub(crate) fn classes_on(f: &BoolFun, rx: &[usize], ry: &[usize]) -> Vec<Vec<usize>> {
    let mut classes: Vec<(Vec<u8>, Vec<usize>)> = Vec::new();
    for &x in rx {
        let key: Vec<u8> = ry.iter().map(|&y| f.bit(x, y)).collect();
        match classes.iter_mut().find(|(k, _)| *k == key) {
            Some((_, members)) => members.push(x),
            None => classes.push((key, vec![x])),
        }
    }
    classes.into_iter().map(|(_, m)| m).collect()
}

/// The speaker names the class of their input among the distinct rows (or
/// columns) of `rx × ry` by binary halving; the other party then sends the
/// value. At most `2 · classes` leaves.
pub(crate) fn class_protocol(f: &BoolFun, rx: &[usize], ry: &[usize], speaker: Speaker) -> Node {
    let classes = match speaker {
        Speaker::Alice => classes_on(f, rx, ry),
        Speaker::Bob => classes_on(&f.transpose(), ry, rx),
    };
    announce(f, &classes, rx, ry, speaker)
}

fn announce(f: &BoolFun, classes: &[Vec<usize>], rx: &[usize], ry: &[usize], speaker: Speaker) -> Node {
    if classes.len() == 1 {
        return answer(f, classes[0][0], rx, ry, speaker);
    }
    let mid = classes.len() / 2;
    let mut upper: Vec<usize> = classes[mid..].iter().flatten().copied().collect();
    upper.sort_unstable();
    let theirs = |part: &[Vec<usize>]| {
        let mut v: Vec<usize> = part.iter().flatten().copied().collect();
        v.sort_unstable();
        v
    };
    let (low_set, high_set) = (theirs(&classes[..mid]), theirs(&classes[mid..]));
    let (c0, c1) = match speaker {
        Speaker::Alice => (
            announce(f, &classes[..mid], &low_set, ry, speaker),
            announce(f, &classes[mid..], &high_set, ry, speaker),
        ),
        Speaker::Bob => (
            announce(f, &classes[..mid], rx, &low_set, speaker),
            announce(f, &classes[mid..], rx, &high_set, speaker),
        ),
    };
    Node::split(speaker, upper, c0, c1)
}

/// The speaker's input is known to behave like `rep`; the other party
/// sends the value.
fn answer(f: &BoolFun, rep: usize, rx: &[usize], ry: &[usize], speaker: Speaker) -> Node {
    let (other, value): (Speaker, Box<dyn Fn(usize) -> u8>) = match speaker {
        Speaker::Alice => (Speaker::Bob, Box::new(move |y| f.bit(rep, y))),
        Speaker::Bob => (Speaker::Alice, Box::new(move |x| f.bit(x, rep))),
    };
    let domain = match other {
        Speaker::Alice => rx,
        Speaker::Bob => ry,
    };
    let ones: Vec<usize> = domain.iter().copied().filter(|&i| value(i) == 1).collect();
    if ones.is_empty() {
        Node::leaf(0)
    } else if ones.len() == domain.len() {
        Node::leaf(1)
    } else {
        Node::split(other, ones, Node::leaf(0), Node::leaf(1))
    }
}

/// Cheapest of "Alice names her row class" and "Bob names his column
/// class"; depth `⌈log2 classes⌉ + 1` (0 if constant).
pub fn trivial_protocol(f: &BoolFun) -> ProtocolTree {
    let rx: Vec<usize> = (0..f.rows()).collect();
    let ry: Vec<usize> = (0..f.cols()).collect();
    let a = class_protocol(f, &rx, &ry, Speaker::Alice);
    let b = class_protocol(f, &rx, &ry, Speaker::Bob);
    let root = if b.depth() < a.depth() { b } else { a };
    ProtocolTree::new(f.rows(), f.cols(), root).expect("class protocols stay within reach")
}

#[derive(Debug, Clone)]
struct Entry {
    lb: u8,
    /// Largest depth proven insufficient.
    max_false: i32,
    /// Smallest depth proven sufficient, with the split achieving it.
    min_true: Option<(u8, Speaker, u64)>,
}

struct Search<'a> {
    f: &'a BoolFun,
    /// Per row, columns where f = 1.
    ones: Vec<u64>,
    /// Per column, rows where f = 1.
    col_ones: Vec<u64>,
    memo: HashMap<(u64, u64), Entry>,
    budget: Budget,
}

impl<'a> Search<'a> {
    fn new(f: &'a BoolFun, limits: &SearchLimits) -> Self {
        let ones = f.row_masks(crate::matrix::Sign::Minus).expect("cols checked");
        let mut col_ones = vec![0u64; f.cols()];
        for (x, &m) in ones.iter().enumerate() {
            for y in MaskIter(m) {
                col_ones[y] |= 1 << x;
            }
        }
        Search {
            f,
            ones,
            col_ones,
            memo: HashMap::new(),
            budget: Budget::new(limits),
        }
    }

    /// Constant value of the submatrix, if any.
    fn mono(&self, s: u64, t: u64) -> Option<u8> {
        let mut any = 0u64;
        let mut all = t;
        for x in MaskIter(s) {
            any |= self.ones[x] & t;
            all &= self.ones[x];
        }
        if any == 0 {
            Some(0)
        } else if all == t {
            Some(1)
        } else {
            None
        }
    }

    /// Representative (lowest index) of each row of `s` by its pattern on `t`.
    fn row_reps(&self, s: u64, t: u64) -> Vec<(u64, usize)> {
        let mut reps: Vec<(u64, usize)> = Vec::new();
        for x in MaskIter(s) {
            let key = self.ones[x] & t;
            if !reps.iter().any(|&(k, _)| k == key) {
                reps.push((key, x));
            }
        }
        reps
    }

    fn col_reps(&self, s: u64, t: u64) -> Vec<(u64, usize)> {
        let mut reps: Vec<(u64, usize)> = Vec::new();
        for y in MaskIter(t) {
            let key = self.col_ones[y] & s;
            if !reps.iter().any(|&(k, _)| k == key) {
                reps.push((key, y));
            }
        }
        reps
    }

    fn canonical(&self, s: u64, t: u64) -> (u64, u64) {
        let s2 = self.row_reps(s, t).iter().fold(0u64, |m, &(_, x)| m | 1 << x);
        let t2 = self.col_reps(s2, t).iter().fold(0u64, |m, &(_, y)| m | 1 << y);
        (s2, t2)
    }

    fn lower_bound(&self, s: u64, t: u64) -> u8 {
        let cols: Vec<usize> = MaskIter(t).collect();
        let rows: Vec<Vec<i64>> = MaskIter(s)
            .map(|x| cols.iter().map(|&y| if self.f.bit(x, y) == 1 { -1 } else { 1 }).collect())
            .collect();
        ceil_log2(rank_of_rows(&rows)).max(1) as u8
    }

    /// Whether the canonical state `(s, t)` has a protocol of depth ≤ `k`.
    /// Returns false once the budget is spent; callers check `exhausted`.
    fn can(&mut self, s: u64, t: u64, k: u8) -> bool {
        if self.mono(s, t).is_some() {
            return true;
        }
        if k == 0 {
            return false;
        }
        if !self.memo.contains_key(&(s, t)) {
            let lb = self.lower_bound(s, t);
            self.memo.insert(
                (s, t),
                Entry {
                    lb,
                    max_false: -1,
                    min_true: None,
                },
            );
        }
        let e = &self.memo[&(s, t)];
        if k < e.lb || i32::from(k) <= e.max_false {
            return false;
        }
        if e.min_true.is_some_and(|(d, _, _)| d <= k) {
            return true;
        }
        if !self.budget.tick() {
            return false;
        }
        for speaker in [Speaker::Alice, Speaker::Bob] {
            let side = match speaker {
                Speaker::Alice => s,
                Speaker::Bob => t,
            };
            if side.count_ones() < 2 {
                continue;
            }
            let low = side & side.wrapping_neg();
            let rest = side & !low;
            let mut sub = rest;
            loop {
                let part1 = low | sub;
                if part1 != side {
                    let part2 = side & !part1;
                    let (a, b) = match speaker {
                        Speaker::Alice => (self.canonical(part1, t), self.canonical(part2, t)),
                        Speaker::Bob => (self.canonical(s, part1), self.canonical(s, part2)),
                    };
                    if self.can(a.0, a.1, k - 1) && self.can(b.0, b.1, k - 1) {
                        let e = self.memo.get_mut(&(s, t)).expect("entry inserted above");
                        e.min_true = Some((k, speaker, part1));
                        return true;
                    }
                    if self.budget.exhausted() {
                        return false;
                    }
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
        }
        let e = self.memo.get_mut(&(s, t)).expect("entry inserted above");
        e.max_false = e.max_false.max(i32::from(k));
        false
    }

    /// Protocol for the (not necessarily canonical) state from stored splits.
    fn rebuild(&self, s: u64, t: u64) -> Node {
        if let Some(v) = self.mono(s, t) {
            return Node::leaf(v);
        }
        let key = self.canonical(s, t);
        let (_, speaker, part) = self.memo[&key].min_true.expect("solved states keep their split");
        match speaker {
            Speaker::Alice => {
                let reps = self.row_reps(s, t);
                let rep_of = |x: usize| {
                    let k = self.ones[x] & t;
                    reps.iter().find(|&&(rk, _)| rk == k).map(|&(_, r)| r).unwrap()
                };
                let part1 = MaskIter(s).filter(|&x| part >> rep_of(x) & 1 == 1).fold(0u64, |m, x| m | 1 << x);
                let part0 = s & !part1;
                Node::split(speaker, MaskIter(part1).collect(), self.rebuild(part0, t), self.rebuild(part1, t))
            }
            Speaker::Bob => {
                let reps = self.col_reps(key.0, t);
                let rep_of = |y: usize| {
                    let k = self.col_ones[y] & key.0;
                    reps.iter().find(|&&(rk, _)| rk == k).map(|&(_, r)| r).unwrap()
                };
                let part1 = MaskIter(t).filter(|&y| part >> rep_of(y) & 1 == 1).fold(0u64, |m, y| m | 1 << y);
                let part0 = t & !part1;
                Node::split(speaker, MaskIter(part1).collect(), self.rebuild(s, part0), self.rebuild(s, part1))
            }
        }
    }
}

/// Exact `D(f)`, or an interval when the limits run out. Intended for
/// matrices up to about 8×8 distinct rows and columns.
pub fn exact_cc(f: &BoolFun, limits: &SearchLimits) -> Result<CcResult> {
    require_search_size(f, "exact communication complexity")?;
    let trivial = trivial_protocol(f);
    let upper = trivial.depth();
    let lower = ceil_log2(rank(f)).max(ceil_log2(fooling_lower_bound(f)));
    if lower >= upper {
        return Ok(CcResult {
            lower: upper,
            upper,
            protocol: trivial,
            nodes: 0,
        });
    }
    let mut search = Search::new(f, limits);
    let all_rows = if f.rows() == 64 { u64::MAX } else { (1u64 << f.rows()) - 1 };
    let all_cols = if f.cols() == 64 { u64::MAX } else { (1u64 << f.cols()) - 1 };
    let (s, t) = search.canonical(all_rows, all_cols);
    for k in lower..upper {
        if search.can(s, t, k as u8) {
            let root = search.rebuild(all_rows, all_cols);
            let protocol = ProtocolTree::new(f.rows(), f.cols(), root).expect("rebuilt splits stay within reach");
            debug_assert_eq!(protocol.depth(), k);
            return Ok(CcResult {
                lower: k,
                upper: k,
                protocol,
                nodes: search.budget.nodes(),
            });
        }
        if search.budget.exhausted() {
            return Ok(CcResult {
                lower: k,
                upper,
                protocol: trivial,
                nodes: search.budget.nodes(),
            });
        }
    }
    Ok(CcResult {
        lower: upper,
        upper,
        protocol: trivial,
        nodes: search.budget.nodes(),
    })
}
