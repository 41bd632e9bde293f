//! Boolean functions as explicit sign matrices.
//!
//! A total function `f: X × Y → {0,1}` is stored by its f-values; the sign
//! view is `(-1)^{f(x,y)}`.

mod family;
mod format;
mod lift;
mod rank;

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use family::{make_family, random_matrix, Family};
pub use format::{parse_bfn, write_bfn};
pub use lift::{xor_power, IndexCodec, LiftedFun, LIFT_CELL_CAP};
pub use rank::{rank, rank_of_rows};

/// Entry of a sign matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    /// `+1`, f-value 0.
    #[serde(rename = "+1")]
    Plus,
    /// `-1`, f-value 1.
    #[serde(rename = "-1")]
    Minus,
}

impl Sign {
    pub fn from_bit(bit: u8) -> Sign {
        if bit & 1 == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    /// Product of signs (XOR of bits).
    pub fn times(self, other: Sign) -> Sign {
        Sign::from_bit(self.bit() ^ other.bit())
    }

    pub fn both() -> [Sign; 2] {
        [Sign::Plus, Sign::Minus]
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// A total two-party Boolean function given by its full value table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoolFun {
    rows: usize,
    cols: usize,
    bits: Vec<u8>,
    label: Option<String>,
}

impl BoolFun {
    /// Builds from row-major f-values in `{0,1}`.
    pub fn from_bits(rows: usize, cols: usize, bits: Vec<u8>) -> Result<BoolFun> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("a Boolean function needs at least one row and one column"));
        }
        let cells = (rows as u64)
            .checked_mul(cols as u64)
            .ok_or_else(|| Error::invalid("cell count does not fit in 64 bits"))?;
        if cells != bits.len() as u64 {
            return Err(Error::invalid(format!(
                "expected {cells} values for a {rows}x{cols} matrix, got {}",
                bits.len()
            )));
        }
        if let Some(pos) = bits.iter().position(|&b| b > 1) {
            return Err(Error::invalid(format!("value {} at cell {pos} is not a bit", bits[pos])));
        }
        Ok(BoolFun {
            rows,
            cols,
            bits,
            label: None,
        })
    }

    /// Builds from a predicate evaluated on every `(x, y)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<BoolFun> {
        let mut bits = Vec::with_capacity(rows.saturating_mul(cols));
        for x in 0..rows {
            for y in 0..cols {
                bits.push(f(x, y) as u8);
            }
        }
        BoolFun::from_bits(rows, cols, bits)
    }

    /// Builds from a `±1` table.
    pub fn from_signs(signs: &[Vec<i64>]) -> Result<BoolFun> {
        let rows = signs.len();
        let cols = signs.first().map_or(0, Vec::len);
        let mut bits = Vec::with_capacity(rows * cols);
        for (x, row) in signs.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::invalid(format!("row {x} has length {}, expected {cols}", row.len())));
            }
            for (y, &v) in row.iter().enumerate() {
                bits.push(match v {
                    1 => 0,
                    -1 => 1,
                    _ => return Err(Error::invalid(format!("entry ({x},{y}) = {v} is not +1 or -1"))),
                });
            }
        }
        BoolFun::from_bits(rows, cols, bits)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> BoolFun {
        self.label = Some(label.into());
        self
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn cells(&self) -> u64 {
        self.rows as u64 * self.cols as u64
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    /// f(x, y) in `{0,1}`.
    #[inline]
    pub fn bit(&self, x: usize, y: usize) -> u8 {
        self.bits[x * self.cols + y]
    }

    #[inline]
    pub fn sign(&self, x: usize, y: usize) -> Sign {
        Sign::from_bit(self.bit(x, y))
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn row_bits(&self, x: usize) -> &[u8] {
        &self.bits[x * self.cols..(x + 1) * self.cols]
    }

    /// The sign matrix as integers.
    pub fn sign_rows(&self) -> Vec<Vec<i64>> {
        (0..self.rows)
            .map(|x| self.row_bits(x).iter().map(|&b| Sign::from_bit(b).value()).collect())
            .collect()
    }

    pub fn transpose(&self) -> BoolFun {
        let mut bits = Vec::with_capacity(self.bits.len());
        for y in 0..self.cols {
            for x in 0..self.rows {
                bits.push(self.bit(x, y));
            }
        }
        BoolFun {
            rows: self.cols,
            cols: self.rows,
            bits,
            label: self.label.clone(),
        }
    }

    /// Constant value if every entry agrees.
    pub fn constant_sign(&self) -> Option<Sign> {
        let first = self.bits[0];
        self.bits.iter().all(|&b| b == first).then(|| Sign::from_bit(first))
    }

    /// For `cols <= 64`: per row, the mask of columns carrying `color`.
    pub fn row_masks(&self, color: Sign) -> Option<Vec<u64>> {
        if self.cols > 64 {
            return None;
        }
        let want = color.bit();
        Some(
            (0..self.rows)
                .map(|x| {
                    self.row_bits(x)
                        .iter()
                        .enumerate()
                        .filter(|(_, &b)| b == want)
                        .fold(0u64, |m, (y, _)| m | (1u64 << y))
                })
                .collect(),
        )
    }

    pub fn distinct_row_count(&self) -> usize {
        (0..self.rows).map(|x| self.row_bits(x)).collect::<HashSet<_>>().len()
    }

    pub fn distinct_col_count(&self) -> usize {
        self.transpose().distinct_row_count()
    }

    /// Groups rows with identical content; classes are ordered by first
    /// occurrence and each class lists its members in increasing order.
    pub fn row_classes(&self) -> Vec<Vec<usize>> {
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut seen: std::collections::HashMap<&[u8], usize> = std::collections::HashMap::new();
        for x in 0..self.rows {
            let key = self.row_bits(x);
            match seen.get(key) {
                Some(&c) => classes[c].push(x),
                None => {
                    seen.insert(key, classes.len());
                    classes.push(vec![x]);
                }
            }
        }
        classes
    }

    pub fn col_classes(&self) -> Vec<Vec<usize>> {
        self.transpose().row_classes()
    }

    /// Submatrix on the given rows and columns (kept in the given order).
    pub fn restrict(&self, row_subset: &[usize], col_subset: &[usize]) -> Result<SubFun> {
        if row_subset.is_empty() || col_subset.is_empty() {
            return Err(Error::invalid("restriction needs non-empty row and column subsets"));
        }
        if let Some(&x) = row_subset.iter().find(|&&x| x >= self.rows) {
            return Err(Error::invalid(format!("row {x} out of range (rows = {})", self.rows)));
        }
        if let Some(&y) = col_subset.iter().find(|&&y| y >= self.cols) {
            return Err(Error::invalid(format!("column {y} out of range (cols = {})", self.cols)));
        }
        let mut bits = Vec::with_capacity(row_subset.len() * col_subset.len());
        for &x in row_subset {
            for &y in col_subset {
                bits.push(self.bit(x, y));
            }
        }
        Ok(SubFun {
            fun: BoolFun {
                rows: row_subset.len(),
                cols: col_subset.len(),
                bits,
                label: None,
            },
            row_map: row_subset.to_vec(),
            col_map: col_subset.to_vec(),
        })
    }
}

/// A restriction together with the map back to the parent's indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubFun {
    pub fun: BoolFun,
    /// `row_map[i]` is the parent row of local row `i`.
    pub row_map: Vec<usize>,
    pub col_map: Vec<usize>,
}
