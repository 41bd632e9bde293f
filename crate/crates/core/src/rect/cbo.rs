//! Close-by-One over row sets for one color.
//!
//! A maximal `c`-rectangle is a closed pair `(A, B)` with `B` the columns on
//! which every row of `A` is `c`, and `A` the rows that are `c` on all of
//! `B`. Each closed pair is visited exactly once.

use super::MaskIter;

pub(crate) enum Control {
    Descend,
    Skip,
    Stop,
}

pub(crate) struct Incidence {
    /// Per row: columns with the target color.
    pub row_masks: Vec<u64>,
    /// Per column: rows with the target color.
    pub col_masks: Vec<u64>,
    pub all_rows: u64,
    pub all_cols: u64,
}

impl Incidence {
    pub fn new(row_masks: Vec<u64>, cols: usize) -> Incidence {
        let rows = row_masks.len();
        let mut col_masks = vec![0u64; cols];
        for (x, &m) in row_masks.iter().enumerate() {
            for y in MaskIter(m) {
                col_masks[y] |= 1 << x;
            }
        }
        Incidence {
            row_masks,
            col_masks,
            all_rows: low_mask(rows),
            all_cols: low_mask(cols),
        }
    }

    pub fn rows(&self) -> usize {
        self.row_masks.len()
    }

    /// Rows carrying the color on every column of `cols`.
    pub fn rows_of(&self, cols: u64) -> u64 {
        MaskIter(cols).fold(self.all_rows, |m, y| m & self.col_masks[y])
    }

    /// The visitor sees `(rows, cols, next)`: a closed pair and the first row
    /// index its descendants may add. Pairs with an empty side are visited too.
    pub fn run(&self, visit: &mut impl FnMut(u64, u64, usize) -> Control) {
        let cols = self.all_cols;
        let rows = self.rows_of(cols);
        let mut stopped = false;
        self.generate(rows, cols, 0, visit, &mut stopped);
    }

    fn generate(
        &self,
        rows: u64,
        cols: u64,
        start: usize,
        visit: &mut impl FnMut(u64, u64, usize) -> Control,
        stopped: &mut bool,
    ) {
        match visit(rows, cols, start) {
            Control::Stop => {
                *stopped = true;
                return;
            }
            Control::Skip => return,
            Control::Descend => {}
        }
        for j in start..self.rows() {
            if *stopped {
                return;
            }
            if rows >> j & 1 == 1 {
                continue;
            }
            let new_cols = cols & self.row_masks[j];
            let new_rows = self.rows_of(new_cols);
            let below = low_mask(j);
            if new_rows & below == rows & below {
                self.generate(new_rows, new_cols, j + 1, visit, stopped);
            }
        }
    }
}

pub(crate) fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}
