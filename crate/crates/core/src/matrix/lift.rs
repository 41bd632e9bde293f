use super::BoolFun;
use crate::error::{Error, Result};

/// Largest number of cells a lifted matrix may have.
pub const LIFT_CELL_CAP: u64 = 1 << 24;

/// Mixed-radix codec between coordinate tuples and flat indices, first
/// coordinate most significant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexCodec {
    pub base: usize,
    pub n: usize,
}

impl IndexCodec {
    pub fn size(&self) -> usize {
        self.base.pow(self.n as u32)
    }

    pub fn encode(&self, tuple: &[usize]) -> usize {
        debug_assert_eq!(tuple.len(), self.n);
        tuple.iter().fold(0, |acc, &t| {
            debug_assert!(t < self.base);
            acc * self.base + t
        })
    }

    pub fn decode(&self, mut flat: usize) -> Vec<usize> {
        let mut out = vec![0; self.n];
        for slot in out.iter_mut().rev() {
            *slot = flat % self.base;
            flat /= self.base;
        }
        out
    }

    /// Coordinate `i` (0-based) of `flat`.
    pub fn coord(&self, flat: usize, i: usize) -> usize {
        let shift = self.base.pow((self.n - 1 - i) as u32);
        (flat / shift) % self.base
    }
}

/// The n-fold XOR of a base function together with its index codecs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedFun {
    pub base: BoolFun,
    pub n: usize,
    pub lifted: BoolFun,
    pub row_codec: IndexCodec,
    pub col_codec: IndexCodec,
}

/// Builds `f^{⊕n}`: entry `((x_1..x_n),(y_1..y_n))` is `⊕_i f(x_i, y_i)`,
/// i.e. the n-fold Kronecker power of the sign matrix.
pub fn xor_power(f: &BoolFun, n: usize) -> Result<LiftedFun> {
    if n == 0 {
        return Err(Error::invalid("lift exponent n must be at least 1"));
    }
    let rows = checked_pow(f.rows(), n);
    let cols = checked_pow(f.cols(), n);
    let cells = rows.zip(cols).and_then(|(r, c)| (r as u64).checked_mul(c as u64));
    match cells {
        Some(c) if c <= LIFT_CELL_CAP => {}
        _ => {
            return Err(Error::Capacity {
                what: format!("the {n}-fold lift of a {}x{} matrix", f.rows(), f.cols()),
                needed: match cells {
                    Some(c) => format!("{c} cells"),
                    None => "more than 2^64 cells".to_string(),
                },
                limit: format!("{LIFT_CELL_CAP} cells"),
            })
        }
    }
    let (rows, cols) = (rows.unwrap(), cols.unwrap());

    // Kronecker recursion: level k holds f^{⊕k} as bits.
    let mut cur = f.bits().to_vec();
    let (mut cr, mut cc) = (f.rows(), f.cols());
    for _ in 1..n {
        let nr = cr * f.rows();
        let nc = cc * f.cols();
        let mut next = vec![0u8; nr * nc];
        for x in 0..cr {
            for y in 0..cc {
                let high = cur[x * cc + y];
                for bx in 0..f.rows() {
                    let row = (x * f.rows() + bx) * nc + y * f.cols();
                    for by in 0..f.cols() {
                        next[row + by] = high ^ f.bit(bx, by);
                    }
                }
            }
        }
        cur = next;
        cr = nr;
        cc = nc;
    }
    debug_assert_eq!((cr, cc), (rows, cols));

    let mut lifted = BoolFun::from_bits(rows, cols, cur)?;
    if let Some(label) = f.label() {
        lifted = lifted.with_label(format!("{label}^xor{n}"));
    }
    Ok(LiftedFun {
        base: f.clone(),
        n,
        lifted,
        row_codec: IndexCodec { base: f.rows(), n },
        col_codec: IndexCodec { base: f.cols(), n },
    })
}

fn checked_pow(base: usize, n: usize) -> Option<usize> {
    u32::try_from(n).ok().and_then(|e| base.checked_pow(e))
}
