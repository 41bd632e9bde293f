use std::fmt;
use std::str::FromStr;

use super::BoolFun;
use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Standard test families. For `m` a power of two, inputs are read as
/// `log2 m`-bit strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// Parity of the bitwise XOR of x and y (m a power of two).
    Xor,
    /// 1 iff x and y share a set bit; x ∧ y for m = 2 (m a power of two).
    And,
    /// 1 iff x = y.
    Eq,
    /// 1 iff x > y.
    Gt,
    /// Inner product mod 2 of the bit strings (m a power of two).
    Ip,
    /// One SplitMix64 draw per cell.
    Random,
    Const,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Xor => "xor",
            Family::And => "and",
            Family::Eq => "eq",
            Family::Gt => "gt",
            Family::Ip => "ip",
            Family::Random => "random",
            Family::Const => "const",
        }
    }

    pub fn all() -> [Family; 7] {
        [
            Family::Xor,
            Family::And,
            Family::Eq,
            Family::Gt,
            Family::Ip,
            Family::Random,
            Family::Const,
        ]
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Family> {
        Family::all()
            .into_iter()
            .find(|fam| fam.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::invalid(format!("unknown family '{s}'")))
    }
}

/// Builds the `m × m` matrix of a named family; deterministic in
/// `(name, m, seed)`.
pub fn make_family(name: Family, m: usize, seed: Option<u64>, const_value: Option<u8>) -> Result<BoolFun> {
    if m == 0 {
        return Err(Error::invalid("m must be at least 1"));
    }
    let needs_pow2 = matches!(name, Family::Xor | Family::And | Family::Ip);
    if needs_pow2 && !m.is_power_of_two() {
        return Err(Error::invalid(format!("family {name} needs m a power of two, got {m}")));
    }
    let f = match name {
        Family::Xor => BoolFun::from_fn(m, m, |x, y| (x ^ y).count_ones() % 2 == 1)?,
        Family::And => BoolFun::from_fn(m, m, |x, y| x & y != 0)?,
        Family::Eq => BoolFun::from_fn(m, m, |x, y| x == y)?,
        Family::Gt => BoolFun::from_fn(m, m, |x, y| x > y)?,
        Family::Ip => BoolFun::from_fn(m, m, |x, y| (x & y).count_ones() % 2 == 1)?,
        Family::Random => {
            let seed = seed.ok_or_else(|| Error::invalid("family random needs a seed"))?;
            let mut rng = SplitMix64::new(seed);
            BoolFun::from_fn(m, m, |_, _| rng.next_bit() == 1)?
        }
        Family::Const => {
            let v = const_value.ok_or_else(|| Error::invalid("family const needs a value"))?;
            if v > 1 {
                return Err(Error::invalid(format!("constant value {v} is not a bit")));
            }
            BoolFun::from_fn(m, m, |_, _| v == 1)?
        }
    };
    let label = match name {
        Family::Random => format!("random_{m}_s{}", seed.unwrap_or_default()),
        Family::Const => format!("const{}_{m}", const_value.unwrap_or_default()),
        _ => format!("{name}_{m}"),
    };
    Ok(f.with_label(label))
}

/// Random `rows × cols` matrix from the same SplitMix64 cell stream.
pub fn random_matrix(rows: usize, cols: usize, seed: u64) -> Result<BoolFun> {
    let mut rng = SplitMix64::new(seed);
    BoolFun::from_fn(rows, cols, |_, _| rng.next_bit() == 1)
}
