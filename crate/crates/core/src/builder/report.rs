//! One-row summary relating `D(f)`, `rank(f)` and `C(f^{⊕n})`.

use serde::Serialize;

use super::{build_protocol, BuildOptions, Strategy};
use crate::error::Result;
use crate::limits::SearchLimits;
use crate::matrix::{rank, xor_power, BoolFun};
use crate::protocol::{balance, exact_cc};
use crate::rect::{cover_number, CoverMode};

/// Versioned header: comment line then column names.
pub const CSV_HEADER: &str = "#v1\nname,rows,cols,rank,D_lo,D_hi,n,C_lo,C_hi,logC,rho,degenerate,leaves,balanced_depth";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremReport {
    pub name: String,
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub d_lo: usize,
    pub d_hi: usize,
    pub n: usize,
    pub c_lo: usize,
    pub c_hi: usize,
    /// `log2 C(f^{⊕n})`, only when the cover number is exact.
    pub log_c: Option<f64>,
    /// `(log2 C / n + log2 rk) · log2 rk / D`, only when `D` and `C` are
    /// exact and `D > 0`.
    pub rho: Option<f64>,
    /// `rank(f) = 1`, which makes the bound vacuous.
    pub degenerate: bool,
    /// Leaves of the built protocol for `f`.
    pub leaves: usize,
    pub balanced_depth: usize,
}

impl TheoremReport {
    pub fn is_exact(&self) -> bool {
        self.d_lo == self.d_hi && self.c_lo == self.c_hi
    }

    pub fn csv_row(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.name,
            self.rows,
            self.cols,
            self.rank,
            self.d_lo,
            self.d_hi,
            self.n,
            self.c_lo,
            self.c_hi,
            opt(self.log_c),
            opt(self.rho),
            self.degenerate,
            self.leaves,
            self.balanced_depth
        )
    }
}

pub fn theorem_report(f: &BoolFun, n: usize, limits: &SearchLimits) -> Result<TheoremReport> {
    let name = f.label().unwrap_or("f").to_string();
    let rk = rank(f);
    let d = exact_cc(f, limits)?;
    let lift = xor_power(f, n)?;
    let cover = cover_number(&lift.lifted, CoverMode::Exact, limits)?;
    let (c_lo, c_hi) = cover.bounds();
    let c_exact = cover.value();
    let log_c = c_exact.map(|c| (c as f64).log2());
    let log_rk = (rk as f64).log2();
    let rho = match (log_c, d.exact()) {
        (Some(lc), Some(dv)) if dv > 0 => Some((lc / n as f64 + log_rk) * log_rk / dv as f64),
        _ => None,
    };
    let opts = BuildOptions {
        strategy: Strategy::Direct,
        cover_value: Some(c_hi as u64),
    };
    let (tree, _) = build_protocol(f, n, opts)?;
    Ok(TheoremReport {
        name,
        rows: f.rows(),
        cols: f.cols(),
        rank: rk,
        d_lo: d.lower,
        d_hi: d.upper,
        n,
        c_lo,
        c_hi,
        log_c,
        rho,
        degenerate: rk == 1,
        leaves: tree.leaf_count(),
        balanced_depth: balance(&tree).depth(),
    })
}
