//! Cover number: greedy upper bounds and exact branch-and-bound set cover
//! over the maximal monochromatic rectangles, with a fooling-set style lower
//! bound.

use serde::Serialize;

use super::{enumerate_maximal_mono, require_search_size, IndexSet, Rectangle};
use crate::error::Result;
use crate::limits::{Budget, SearchLimits};
use crate::matrix::BoolFun;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverMode {
    Exact,
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    /// No smaller cover exists (search exhausted).
    Exact,
    UpperBound,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Cover {
    pub rects: Vec<Rectangle>,
    pub exactness: Exactness,
}

impl Cover {
    pub fn size(&self) -> usize {
        self.rects.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverStatus {
    /// The cover is minimum.
    Exact,
    /// Greedy mode was requested; only bounds are claimed.
    Greedy,
    /// Exact search ran out of node or time budget.
    Bounded,
    /// The rectangle universe did not fit the limits, exact search never ran.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverResult {
    /// Best cover found.
    pub cover: Cover,
    /// Certified lower bound on the cover number.
    pub lower_bound: usize,
    pub status: CoverStatus,
    pub nodes: u64,
}

impl CoverResult {
    /// The cover number, when certified.
    pub fn value(&self) -> Option<usize> {
        (self.status == CoverStatus::Exact).then(|| self.cover.size())
    }

    pub fn bounds(&self) -> (usize, usize) {
        (self.lower_bound, self.cover.size())
    }
}

/// Cell bitsets over a `rows × cols` grid.
struct Cells {
    cols: usize,
    words: usize,
}

impl Cells {
    fn new(f: &BoolFun) -> Cells {
        Cells {
            cols: f.cols(),
            words: (f.rows() * f.cols()).div_ceil(64),
        }
    }

    fn of_rect(&self, r: &Rectangle) -> Vec<u64> {
        let mut v = vec![0u64; self.words];
        for x in r.rows.iter() {
            for y in r.cols.iter() {
                let c = x * self.cols + y;
                v[c / 64] |= 1 << (c % 64);
            }
        }
        v
    }
}

fn count_new(covered: &[u64], rect: &[u64]) -> u32 {
    covered.iter().zip(rect).map(|(c, r)| (r & !c).count_ones()).sum()
}

/// Smallest maximal rectangle containing cell `(x, y)`: close the row `{x}`.
fn cell_closure(f: &BoolFun, x: usize, y: usize) -> Rectangle {
    let color = f.sign(x, y);
    let cols: Vec<usize> = (0..f.cols()).filter(|&c| f.sign(x, c) == color).collect();
    let rows: Vec<usize> = (0..f.rows()).filter(|&r| cols.iter().all(|&c| f.sign(r, c) == color)).collect();
    Rectangle::new(IndexSet::from_indices(rows), IndexSet::from_indices(cols), Some(color))
}

fn compatible(f: &BoolFun, a: (usize, usize), b: (usize, usize)) -> bool {
    let c = f.sign(a.0, a.1);
    f.sign(b.0, b.1) == c && f.sign(a.0, b.1) == c && f.sign(b.0, a.1) == c
}

/// Size of a set of cells no two of which share a monochromatic rectangle,
/// found greedily (cells with fewest compatible partners first).
pub fn fooling_lower_bound(f: &BoolFun) -> usize {
    let cells: Vec<(usize, usize)> = (0..f.rows()).flat_map(|x| (0..f.cols()).map(move |y| (x, y))).collect();
    let degree: Vec<usize> = cells
        .iter()
        .map(|&a| cells.iter().filter(|&&b| compatible(f, a, b)).count())
        .collect();
    let mut order: Vec<usize> = (0..cells.len()).collect();
    order.sort_by_key(|&i| (degree[i], i));
    let mut chosen: Vec<(usize, usize)> = Vec::new();
    for i in order {
        if chosen.iter().all(|&c| !compatible(f, c, cells[i])) {
            chosen.push(cells[i]);
        }
    }
    chosen.len()
}

/// Checks a cover independently: each rectangle monochromatic with its
/// stated color and every cell covered.
pub fn validate_cover(f: &BoolFun, cover: &Cover) -> std::result::Result<(), String> {
    let mut covered = vec![false; f.rows() * f.cols()];
    for (k, r) in cover.rects.iter().enumerate() {
        if r.check_bounds(f).is_err() {
            return Err(format!("rectangle {k} is empty or out of bounds"));
        }
        let color = r.color.ok_or_else(|| format!("rectangle {k} has no color"))?;
        for x in r.rows.iter() {
            for y in r.cols.iter() {
                if f.sign(x, y) != color {
                    return Err(format!("rectangle {k} is not {color} at ({x},{y})"));
                }
                covered[x * f.cols() + y] = true;
            }
        }
    }
    match covered.iter().position(|&c| !c) {
        Some(p) => Err(format!("cell ({},{}) is uncovered", p / f.cols(), p % f.cols())),
        None => Ok(()),
    }
}

fn greedy(masks: &[Vec<u64>], target: &[u64]) -> Vec<usize> {
    let mut covered = vec![0u64; target.len()];
    let mut picked = Vec::new();
    while covered != target {
        let (best, gain) = masks
            .iter()
            .enumerate()
            .map(|(i, m)| (i, count_new(&covered, m)))
            .fold((usize::MAX, 0u32), |acc, (i, g)| if g > acc.1 { (i, g) } else { acc });
        debug_assert!(gain > 0, "universe must cover every cell");
        for (c, m) in covered.iter_mut().zip(&masks[best]) {
            *c |= m;
        }
        picked.push(best);
    }
    picked
}

/// Cover number of `f`.
///
/// `Greedy` repeatedly takes the maximal rectangle covering the most
/// uncovered cells. `Exact` starts from the greedy cover and searches for a
/// smaller one; if the limits run out the result says so.
pub fn cover_number(f: &BoolFun, mode: CoverMode, limits: &SearchLimits) -> Result<CoverResult> {
    require_search_size(f, "cover number")?;
    let enumerated = enumerate_maximal_mono(f, limits.rect_budget)?;
    let mut universe = enumerated.rects;
    if enumerated.truncated {
        for x in 0..f.rows() {
            for y in 0..f.cols() {
                universe.push(cell_closure(f, x, y));
            }
        }
        universe.sort();
        universe.dedup();
    }

    let cells = Cells::new(f);
    let masks: Vec<Vec<u64>> = universe.iter().map(|r| cells.of_rect(r)).collect();
    let n_cells = f.rows() * f.cols();
    let mut target = vec![0u64; cells.words];
    for c in 0..n_cells {
        target[c / 64] |= 1 << (c % 64);
    }

    let greedy_pick = greedy(&masks, &target);
    let fooling = fooling_lower_bound(f);
    let make_cover = |picks: &[usize], exactness| {
        let mut rects: Vec<Rectangle> = picks.iter().map(|&i| universe[i].clone()).collect();
        rects.sort();
        Cover { rects, exactness }
    };

    if mode == CoverMode::Greedy {
        let exact = fooling == greedy_pick.len();
        return Ok(CoverResult {
            cover: make_cover(
                &greedy_pick,
                if exact { Exactness::Exact } else { Exactness::UpperBound },
            ),
            lower_bound: fooling,
            status: if exact { CoverStatus::Exact } else { CoverStatus::Greedy },
            nodes: 0,
        });
    }
    if enumerated.truncated {
        let exact = fooling == greedy_pick.len();
        return Ok(CoverResult {
            cover: make_cover(&greedy_pick, if exact { Exactness::Exact } else { Exactness::UpperBound }),
            lower_bound: fooling,
            status: if exact { CoverStatus::Exact } else { CoverStatus::Inconclusive },
            nodes: 0,
        });
    }

    let mut search = SetCover::new(&masks, n_cells, greedy_pick.clone(), limits);
    search.run();
    let exhausted = search.budget.exhausted();
    let nodes = search.budget.nodes();
    let best = search.best;
    let lower = if exhausted { fooling.max(search.root_lower) } else { best.len() };
    let status = if lower == best.len() { CoverStatus::Exact } else { CoverStatus::Bounded };
    let exactness = if status == CoverStatus::Exact { Exactness::Exact } else { Exactness::UpperBound };
    Ok(CoverResult {
        cover: make_cover(&best, exactness),
        lower_bound: lower,
        status,
        nodes,
    })
}

struct SetCover<'a> {
    masks: &'a [Vec<u64>],
    n_cells: usize,
    /// Per cell, the rectangles covering it, largest first.
    covering: Vec<Vec<usize>>,
    /// Cells ordered by how few rectangles cover them.
    lb_order: Vec<usize>,
    best: Vec<usize>,
    root_lower: usize,
    budget: Budget,
}

impl<'a> SetCover<'a> {
    fn new(masks: &'a [Vec<u64>], n_cells: usize, incumbent: Vec<usize>, limits: &SearchLimits) -> Self {
        let mut covering = vec![Vec::new(); n_cells];
        for (i, m) in masks.iter().enumerate() {
            for (c, list) in covering.iter_mut().enumerate() {
                if m[c / 64] >> (c % 64) & 1 == 1 {
                    list.push(i);
                }
            }
        }
        let sizes: Vec<u32> = masks.iter().map(|m| m.iter().map(|w| w.count_ones()).sum()).collect();
        for list in &mut covering {
            list.sort_by_key(|&i| (std::cmp::Reverse(sizes[i]), i));
        }
        let mut lb_order: Vec<usize> = (0..n_cells).collect();
        lb_order.sort_by_key(|&c| (covering[c].len(), c));
        SetCover {
            masks,
            n_cells,
            covering,
            lb_order,
            best: incumbent,
            root_lower: 0,
            budget: Budget::new(limits),
        }
    }

    fn is_covered(covered: &[u64], c: usize) -> bool {
        covered[c / 64] >> (c % 64) & 1 == 1
    }

    /// Uncovered cells pairwise sharing no rectangle; each needs its own.
    fn lower_bound(&self, covered: &[u64]) -> usize {
        let mut used = vec![false; self.masks.len()];
        let mut count = 0;
        for &c in &self.lb_order {
            if Self::is_covered(covered, c) {
                continue;
            }
            if self.covering[c].iter().all(|&r| !used[r]) {
                count += 1;
                for &r in &self.covering[c] {
                    used[r] = true;
                }
            }
        }
        count
    }

    fn run(&mut self) {
        let covered = vec![0u64; self.n_cells.div_ceil(64)];
        self.root_lower = self.lower_bound(&covered);
        if self.root_lower >= self.best.len() {
            return;
        }
        let mut chosen = Vec::new();
        self.dfs(&covered, &mut chosen);
    }

    fn dfs(&mut self, covered: &[u64], chosen: &mut Vec<usize>) {
        if !self.budget.tick() {
            return;
        }
        // Uncovered cell with the fewest options.
        let pivot = (0..self.n_cells)
            .filter(|&c| !Self::is_covered(covered, c))
            .min_by_key(|&c| (self.covering[c].len(), c));
        let Some(cell) = pivot else {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
            }
            return;
        };
        if chosen.len() + self.lower_bound(covered) >= self.best.len() {
            return;
        }
        let mut options: Vec<(u32, usize)> = self.covering[cell]
            .iter()
            .map(|&r| (count_new(covered, &self.masks[r]), r))
            .collect();
        options.sort_by_key(|&(gain, r)| (std::cmp::Reverse(gain), r));
        for (_, r) in options {
            let next: Vec<u64> = covered.iter().zip(&self.masks[r]).map(|(a, b)| a | b).collect();
            chosen.push(r);
            self.dfs(&next, chosen);
            chosen.pop();
            if self.budget.exhausted() {
                return;
            }
        }
    }
}
