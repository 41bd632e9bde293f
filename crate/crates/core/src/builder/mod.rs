//! Recursive protocol construction from large monochromatic rectangles and
//! rank splitting, with an audit trail of every step against its budget.
//!
//! At each step the current submatrix is reduced to its distinct rows and
//! columns. A large monochromatic rectangle `R` partitions it as
//! `[[R, A], [B, Z]]`; one of `[R A]` and `[R; B]` has rank at most
//! `(rk + 3) / 2`. The owner of that side sends one bit saying whether their
//! input lies in `R`: "yes" recurses on the low-rank block, "no" on the
//! remaining inputs, which lose at least the area of `R`.

mod budget;
mod report;

use num_bigint::BigUint;
use serde::Serialize;

pub use budget::{binomial, ceil_log_5_4, leaf_budget, meets_fraction, rank_step_budget, shrink_step_budget, BASE_LEAVES};
pub use report::{theorem_report, TheoremReport, CSV_HEADER};

use crate::entropy::extract_rectangle;
use crate::error::{Error, Result};
use crate::matrix::{rank, xor_power, BoolFun};
use crate::protocol::{class_protocol, classes_on, Node, ProtocolTree, Speaker};
use crate::rect::{check_monochromatic, max_mono_rectangle, Rectangle, SEARCH_SIDE_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    /// Maximum rectangle of the XOR lift, pulled back by entropy extraction.
    Lift,
    /// Maximum rectangle of the submatrix itself.
    #[default]
    Direct,
}

impl std::str::FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Strategy> {
        match s {
            "lift" => Ok(Strategy::Lift),
            "direct" => Ok(Strategy::Direct),
            _ => Err(Error::invalid(format!("unknown strategy '{s}' (expected lift or direct)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BigRectangle {
    pub rect: Rectangle,
    /// The lift rectangle it was extracted from, for the lift strategy.
    pub lift_rect: Option<Rectangle>,
    /// `(4·area)^n · C ≥ cells^n`, when a cover value was given.
    pub area_check: Option<bool>,
}

pub fn find_big_rectangle(f: &BoolFun, n: usize, strategy: Strategy, cover_value: Option<u64>) -> Result<BigRectangle> {
    if n == 0 {
        return Err(Error::invalid("lift exponent n must be at least 1"));
    }
    let (rect, lift_rect) = match strategy {
        Strategy::Direct => (max_mono_rectangle(f)?, None),
        Strategy::Lift => {
            let lift = xor_power(f, n)?;
            let side = lift.lifted.rows().max(lift.lifted.cols());
            if side > SEARCH_SIDE_CAP {
                return Err(Error::Capacity {
                    what: format!("lift strategy on a {}x{} matrix with n = {n}", f.rows(), f.cols()),
                    needed: format!("a {side}-wide lift"),
                    limit: format!("{SEARCH_SIDE_CAP} per side; use the direct strategy"),
                });
            }
            let r = max_mono_rectangle(&lift.lifted)?;
            let ext = extract_rectangle(&lift, &r)?;
            (ext.t, Some(r))
        }
    };
    let area_check = cover_value.map(|c| meets_fraction(rect.area(), f.cells(), c, n));
    Ok(BigRectangle { rect, lift_rect, area_check })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    AliceSends,
    BobSends,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BlockRanks {
    /// `rank([R A])`: R's rows, all columns.
    pub rows_block: usize,
    /// `rank([R; B])`: all rows, R's columns.
    pub cols_block: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitDecision {
    pub rect: Rectangle,
    pub side: Side,
    pub block_ranks: BlockRanks,
    /// Rank of the chosen block; `2 · chosen_bound ≤ rank(f) + 3`.
    pub chosen_bound: usize,
}

pub fn choose_split(f: &BoolFun, r: &Rectangle) -> Result<SplitDecision> {
    if check_monochromatic(f, r)?.is_none() {
        return Err(Error::Precondition("split rectangle is not monochromatic".into()));
    }
    let all_rows: Vec<usize> = (0..f.rows()).collect();
    let all_cols: Vec<usize> = (0..f.cols()).collect();
    let rows_block = rank(&f.restrict(&r.rows.to_vec(), &all_cols)?.fun);
    let cols_block = rank(&f.restrict(&all_rows, &r.cols.to_vec())?.fun);
    let rk = rank(f);
    let (side, chosen_bound) = if 2 * rows_block <= rk + 3 {
        (Side::AliceSends, rows_block)
    } else if 2 * cols_block <= rk + 3 {
        (Side::BobSends, cols_block)
    } else {
        return Err(Error::Invariant(format!(
            "neither block qualifies: rank {rk}, blocks {rows_block} and {cols_block}"
        )));
    };
    Ok(SplitDecision {
        rect: r.clone(),
        side,
        block_ranks: BlockRanks { rows_block, cols_block },
        chosen_bound,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct BuildOptions {
    pub strategy: Strategy,
    /// Any value `≥ C(f^{⊕n})`, enabling the area and shrink checks; the
    /// exact cover number gives the tightest ones.
    pub cover_value: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseCase {
    /// Rank below 5: name the distinct row, then answer.
    LowRank,
    /// At most one distinct cell: a single leaf.
    Tiny,
}

/// One recursion step, measured on the deduplicated submatrix.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BuildStep {
    /// Bits sent before this step.
    pub depth: usize,
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub area: u64,
    pub side: Side,
    /// Rank of the block taken on "yes".
    pub next_rank: usize,
    /// Cells of the deduplicated submatrix dropped on "no".
    pub removed_cells: u64,
    pub area_check: Option<bool>,
    pub shrink_check: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BuildTrace {
    pub rank: usize,
    pub n: usize,
    pub cover_value: Option<u64>,
    /// Most rank-reducing steps on any root-to-leaf path.
    pub rank_steps: usize,
    /// Most input-shrinking steps on any root-to-leaf path.
    pub shrink_steps: usize,
    /// Base case reached by each recursion leaf, in preorder.
    pub base_cases: Vec<BaseCase>,
    pub steps: Vec<BuildStep>,
}

impl BuildTrace {
    /// Checks every recorded quantity against its budget.
    pub fn audit(&self, leaf_count: usize) -> std::result::Result<(), String> {
        let r_star = rank_step_budget(self.rank);
        if self.rank_steps > r_star {
            return Err(format!("rank steps {} exceed {r_star}", self.rank_steps));
        }
        for s in &self.steps {
            if 2 * s.next_rank > s.rank + 3 {
                return Err(format!("step into rank {} from rank {}", s.next_rank, s.rank));
            }
            if s.rank >= 5 && 5 * s.next_rank > 4 * s.rank {
                return Err(format!("rank {} -> {} is not a 4/5 reduction", s.rank, s.next_rank));
            }
            if s.area_check == Some(false) || s.shrink_check == Some(false) {
                return Err(format!("step on {}x{} removed too little: area {}", s.rows, s.cols, s.area));
            }
        }
        if let Some(c) = self.cover_value {
            let s_max = shrink_step_budget(self.rank, c, self.n);
            if self.shrink_steps as u64 > s_max {
                return Err(format!("shrink steps {} exceed {s_max}", self.shrink_steps));
            }
            let budget = leaf_budget(self.rank, c, self.n);
            if BigUint::from(leaf_count) > budget {
                return Err(format!("{leaf_count} leaves exceed the budget {budget}"));
            }
        }
        Ok(())
    }
}

/// The current submatrix reduced to one representative per distinct row
/// and column, remembering which root indices each one stands for.
struct Reduced {
    fun: BoolFun,
    row_members: Vec<Vec<usize>>,
    col_members: Vec<Vec<usize>>,
}

fn reduce(f: &BoolFun, rx: &[usize], ry: &[usize]) -> Reduced {
    let row_members = classes_on(f, rx, ry);
    let reps: Vec<usize> = row_members.iter().map(|c| c[0]).collect();
    let col_members = classes_on(&f.transpose(), ry, &reps);
    let fun = BoolFun::from_fn(row_members.len(), col_members.len(), |i, j| {
        f.bit(row_members[i][0], col_members[j][0]) == 1
    })
    .expect("non-empty reduction");
    Reduced { fun, row_members, col_members }
}

fn expand(members: &[Vec<usize>], picked: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = picked.iter().flat_map(|&i| members[i].iter().copied()).collect();
    out.sort_unstable();
    out
}

struct Builder<'a> {
    f: &'a BoolFun,
    n: usize,
    opts: BuildOptions,
    trace: BuildTrace,
}

impl Builder<'_> {
    /// Returns the subtree with the most rank and shrink steps below it.
    fn build(&mut self, rx: Vec<usize>, ry: Vec<usize>, depth: usize) -> Result<(Node, usize, usize)> {
        let red = reduce(self.f, &rx, &ry);
        let g = &red.fun;
        if g.cells() <= 1 {
            self.trace.base_cases.push(BaseCase::Tiny);
            return Ok((Node::leaf(g.bit(0, 0)), 0, 0));
        }
        let rk = rank(g);
        if rk < 5 {
            self.trace.base_cases.push(BaseCase::LowRank);
            let a = class_protocol(self.f, &rx, &ry, Speaker::Alice);
            let b = class_protocol(self.f, &rx, &ry, Speaker::Bob);
            let node = if b.leaf_count() < a.leaf_count() { b } else { a };
            return Ok((node, 0, 0));
        }
        let big = find_big_rectangle(g, self.n, self.opts.strategy, self.opts.cover_value)?;
        let split = choose_split(g, &big.rect)?;
        let (speaker, picked, removed) = match split.side {
            Side::AliceSends => (Speaker::Alice, big.rect.rows.to_vec(), big.rect.rows.len() as u64 * g.cols() as u64),
            Side::BobSends => (Speaker::Bob, big.rect.cols.to_vec(), big.rect.cols.len() as u64 * g.rows() as u64),
        };
        self.trace.steps.push(BuildStep {
            depth,
            rows: g.rows(),
            cols: g.cols(),
            rank: rk,
            area: big.rect.area(),
            side: split.side,
            next_rank: split.chosen_bound,
            removed_cells: removed,
            area_check: big.area_check,
            shrink_check: self.opts.cover_value.map(|c| meets_fraction(removed, g.cells(), c, self.n)),
        });
        let members = match speaker {
            Speaker::Alice => &red.row_members,
            Speaker::Bob => &red.col_members,
        };
        let yes = expand(members, &picked);
        let domain = match speaker {
            Speaker::Alice => &rx,
            Speaker::Bob => &ry,
        };
        let no: Vec<usize> = domain.iter().copied().filter(|i| yes.binary_search(i).is_err()).collect();
        if no.is_empty() {
            // `rk ≥ 5` makes the whole side fail the rank test, so R never spans it.
            return Err(Error::Invariant("split rectangle spans the speaker's whole side".into()));
        }
        let ((c1, r1, s1), (c0, r0, s0)) = match speaker {
            Speaker::Alice => (self.build(yes.clone(), ry.clone(), depth + 1)?, self.build(no, ry, depth + 1)?),
            Speaker::Bob => (self.build(rx.clone(), yes.clone(), depth + 1)?, self.build(rx, no, depth + 1)?),
        };
        Ok((Node::split(speaker, yes, c0, c1), (r1 + 1).max(r0), s1.max(s0 + 1)))
    }
}

pub fn build_protocol(f: &BoolFun, n: usize, opts: BuildOptions) -> Result<(ProtocolTree, BuildTrace)> {
    if n == 0 {
        return Err(Error::invalid("lift exponent n must be at least 1"));
    }
    let mut b = Builder {
        f,
        n,
        opts,
        trace: BuildTrace {
            rank: rank(f),
            n,
            cover_value: opts.cover_value,
            rank_steps: 0,
            shrink_steps: 0,
            base_cases: Vec::new(),
            steps: Vec::new(),
        },
    };
    let (root, rank_steps, shrink_steps) = b.build((0..f.rows()).collect(), (0..f.cols()).collect(), 0)?;
    b.trace.rank_steps = rank_steps;
    b.trace.shrink_steps = shrink_steps;
    let tree = ProtocolTree::new(f.rows(), f.cols(), root)?;
    Ok((tree, b.trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{make_family, random_matrix, Family, Sign};
    use crate::protocol::{balance, depth_bound, verify};
    use crate::rect::{cover_number, CoverMode, IndexSet};
    use crate::SearchLimits;

    #[test]
    fn big_rectangle_examples() {
        let c = make_family(Family::Const, 3, None, Some(1)).unwrap();
        for s in [Strategy::Direct, Strategy::Lift] {
            for n in 1..3 {
                assert_eq!(find_big_rectangle(&c, n, s, Some(1)).unwrap().rect.area(), 9);
            }
        }
        let eq4 = make_family(Family::Eq, 4, None, None).unwrap();
        assert_eq!(find_big_rectangle(&eq4, 1, Strategy::Direct, None).unwrap().rect.area(), 4);
        let big = find_big_rectangle(&eq4, 2, Strategy::Lift, None).unwrap();
        assert!(check_monochromatic(&eq4, &big.rect).unwrap().is_some());
        let lift_area = big.lift_rect.unwrap().area();
        assert!((4 * big.rect.area()).pow(2) >= lift_area);
        let r8 = random_matrix(8, 8, 3).unwrap();
        assert!(matches!(
            find_big_rectangle(&r8, 3, Strategy::Lift, None),
            Err(Error::Capacity { .. })
        ));
    }

    #[test]
    fn split_examples() {
        let eq4 = make_family(Family::Eq, 4, None, None).unwrap();
        let r = Rectangle::from_indices([0, 1], [2, 3], Some(Sign::Plus));
        let d = choose_split(&eq4, &r).unwrap();
        assert!(d.block_ranks.rows_block.min(d.block_ranks.cols_block) <= 3);
        assert!(d.chosen_bound <= 3);

        let c = make_family(Family::Xor, 2, None, None).unwrap();
        let r = Rectangle::from_indices([0], [0], Some(Sign::Plus));
        assert_eq!(choose_split(&c, &r).unwrap().side, Side::AliceSends);

        let bad = Rectangle::from_indices([0, 1], [0], None);
        assert!(matches!(choose_split(&c, &bad), Err(Error::Precondition(_))));
    }

    #[test]
    fn planted_block_split_matches_oracle() {
        for seed in 0..20 {
            let base = random_matrix(6, 6, 700 + seed).unwrap();
            let f = BoolFun::from_fn(6, 6, |x, y| if x < 3 && y >= 3 { false } else { base.bit(x, y) == 1 }).unwrap();
            let r = Rectangle::new(IndexSet::from_indices([0, 1, 2]), IndexSet::from_indices([3, 4, 5]), Some(Sign::Plus));
            let d = choose_split(&f, &r).unwrap();
            let oracle = |rows: &[usize], cols: &[usize]| {
                let m: Vec<Vec<i64>> = rows.iter().map(|&x| cols.iter().map(|&y| f.sign(x, y).value()).collect()).collect();
                crate::matrix::rank_of_rows(&m)
            };
            let all: Vec<usize> = (0..6).collect();
            assert_eq!(d.block_ranks.rows_block, oracle(&[0, 1, 2], &all));
            assert_eq!(d.block_ranks.cols_block, oracle(&all, &[3, 4, 5]));
        }
    }

    #[test]
    fn build_examples() {
        let c = make_family(Family::Const, 4, None, Some(0)).unwrap();
        let (t, tr) = build_protocol(&c, 1, BuildOptions::default()).unwrap();
        assert_eq!(t.leaf_count(), 1);
        assert_eq!((tr.rank_steps, tr.shrink_steps), (0, 0));
        assert_eq!(tr.base_cases, vec![BaseCase::Tiny]);

        let eq4 = make_family(Family::Eq, 4, None, None).unwrap();
        let (t, tr) = build_protocol(&eq4, 2, BuildOptions::default()).unwrap();
        assert_eq!(tr.base_cases, vec![BaseCase::LowRank]);
        assert!(t.leaf_count() <= 32);
        assert!(verify(&t, &eq4));
    }

    #[test]
    fn high_rank_builds_audit() {
        let ip8 = make_family(Family::Ip, 8, None, None).unwrap();
        let mut corpus = vec![ip8];
        corpus.extend((0..12).map(|s| random_matrix(8, 8, 40 + s).unwrap()));
        let limits = SearchLimits::parse("node=20000,ms=2000,rects=20000").unwrap();
        for f in &corpus {
            let lift = xor_power(f, 2).unwrap().lifted;
            let cover = cover_number(&lift, CoverMode::Exact, &limits).unwrap();
            let opts = BuildOptions { strategy: Strategy::Direct, cover_value: Some(cover.bounds().1 as u64) };
            let (t, tr) = build_protocol(f, 2, opts).unwrap();
            assert!(verify(&t, f));
            assert!(tr.rank_steps <= rank_step_budget(rank(f)));
            tr.audit(t.leaf_count()).unwrap();
            let b = balance(&t);
            assert!(verify(&b, f));
            assert!(b.depth() <= depth_bound(t.leaf_count()));
        }
    }

    #[test]
    fn lift_strategy_builds() {
        let mut stepped = 0;
        for seed in 0..6 {
            let f = random_matrix(6, 6, seed).unwrap();
            let (t, tr) = build_protocol(&f, 2, BuildOptions { strategy: Strategy::Lift, cover_value: None }).unwrap();
            assert!(verify(&t, &f));
            tr.audit(t.leaf_count()).unwrap();
            stepped += tr.steps.len();
        }
        assert!(stepped > 0, "no matrix reached the recursive step");
    }

    #[test]
    fn reduction_preserves_entries() {
        let f = random_matrix(7, 5, 11).unwrap();
        let rx = vec![0, 2, 3, 6];
        let ry = vec![1, 2, 4];
        let red = reduce(&f, &rx, &ry);
        for (i, rm) in red.row_members.iter().enumerate() {
            for (j, cm) in red.col_members.iter().enumerate() {
                for &x in rm {
                    for &y in cm {
                        assert_eq!(f.bit(x, y), red.fun.bit(i, j));
                    }
                }
            }
        }
        assert_eq!(red.row_members.iter().map(Vec::len).sum::<usize>(), rx.len());
        assert_eq!(red.col_members.iter().map(Vec::len).sum::<usize>(), ry.len());
    }
}
