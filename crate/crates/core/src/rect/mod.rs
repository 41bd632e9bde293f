//! Monochromatic rectangles: checking, maximal enumeration, maximum-area
//! search and cover numbers.

mod cbo;
mod cover;
mod enumerate;
mod format;
mod indexset;
mod maxrect;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{BoolFun, Sign};

pub use cover::{cover_number, fooling_lower_bound, validate_cover, Cover, CoverMode, CoverResult, CoverStatus, Exactness};
pub use enumerate::{enumerate_maximal_mono, MaximalRects};
pub use format::{parse_cover, parse_rect, write_cover, write_rect};
pub use indexset::{IndexSet, MaskIter};
pub use maxrect::max_mono_rectangle;

/// Largest side the bitmask searches handle.
pub const SEARCH_SIDE_CAP: usize = 64;

/// A combinatorial rectangle `rows × cols`, optionally carrying its color.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rectangle {
    pub rows: IndexSet,
    pub cols: IndexSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub color: Option<Sign>,
}

impl Rectangle {
    pub fn new(rows: IndexSet, cols: IndexSet, color: Option<Sign>) -> Rectangle {
        Rectangle { rows, cols, color }
    }

    pub fn from_indices(
        rows: impl IntoIterator<Item = usize>,
        cols: impl IntoIterator<Item = usize>,
        color: Option<Sign>,
    ) -> Rectangle {
        Rectangle::new(IndexSet::from_indices(rows), IndexSet::from_indices(cols), color)
    }

    pub fn area(&self) -> u64 {
        self.rows.len() as u64 * self.cols.len() as u64
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.rows.contains(x) && self.cols.contains(y)
    }

    pub fn with_color(mut self, color: Sign) -> Rectangle {
        self.color = Some(color);
        self
    }

    pub fn transpose(&self) -> Rectangle {
        Rectangle::new(self.cols.clone(), self.rows.clone(), self.color)
    }

    /// Checks non-emptiness and bounds against `f`.
    pub fn check_bounds(&self, f: &BoolFun) -> Result<()> {
        if self.rows.is_empty() || self.cols.is_empty() {
            return Err(Error::invalid("rectangle has an empty side"));
        }
        if let Some(x) = self.rows.last().filter(|&x| x >= f.rows()) {
            return Err(Error::invalid(format!("row {x} out of range (rows = {})", f.rows())));
        }
        if let Some(y) = self.cols.last().filter(|&y| y >= f.cols()) {
            return Err(Error::invalid(format!("column {y} out of range (cols = {})", f.cols())));
        }
        Ok(())
    }
}

impl Ord for Rectangle {
    /// Row set, then column set, then color.
    fn cmp(&self, other: &Self) -> Ordering {
        self.rows
            .cmp(&other.rows)
            .then_with(|| self.cols.cmp(&other.cols))
            .then_with(|| self.color.cmp(&other.color))
    }
}

impl PartialOrd for Rectangle {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// The constant sign of `f` on `r`, if there is one.
pub fn check_monochromatic(f: &BoolFun, r: &Rectangle) -> Result<Option<Sign>> {
    r.check_bounds(f)?;
    let x0 = r.rows.iter().next().unwrap();
    let y0 = r.cols.iter().next().unwrap();
    let color = f.sign(x0, y0);
    Ok(find_violation(f, r, color).is_none().then_some(color))
}

/// First cell (row-major) of `r` whose sign differs from `color`.
pub fn find_violation(f: &BoolFun, r: &Rectangle, color: Sign) -> Option<(usize, usize)> {
    let cols = r.cols.to_vec();
    for x in r.rows.iter() {
        for &y in &cols {
            if f.sign(x, y) != color {
                return Some((x, y));
            }
        }
    }
    None
}

pub(crate) fn require_search_size(f: &BoolFun, what: &str) -> Result<()> {
    if f.rows() > SEARCH_SIDE_CAP || f.cols() > SEARCH_SIDE_CAP {
        return Err(Error::Capacity {
            what: format!("{what} on a {}x{} matrix", f.rows(), f.cols()),
            needed: format!("{} indices per side", f.rows().max(f.cols())),
            limit: format!("{SEARCH_SIDE_CAP} indices per side"),
        });
    }
    Ok(())
}
