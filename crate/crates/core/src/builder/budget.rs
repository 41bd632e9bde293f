//! Exact integer forms of the builder's step and leaf budgets.

use num_bigint::BigUint;
use num_traits::One;

/// Least `k` with `(5/4)^k ≥ rk`, i.e. `⌈log_{5/4} rk⌉`, by exact powers.
pub fn ceil_log_5_4(rk: usize) -> usize {
    let rk = BigUint::from(rk);
    let (mut five, mut four) = (BigUint::one(), BigUint::one());
    let mut k = 0;
    while five < &four * &rk {
        five *= 5u32;
        four *= 4u32;
        k += 1;
    }
    k
}

/// `r* = ⌈log_{5/4} rk⌉ + 1`, the bound on rank-reducing steps along a path.
pub fn rank_step_budget(rk: usize) -> usize {
    ceil_log_5_4(rk) + 1
}

/// `⌈8 · rk · C^{1/n}⌉`: the least `s` with `s^n ≥ (8·rk)^n · C`.
pub fn shrink_step_budget(rk: usize, c: u64, n: usize) -> u64 {
    let n32 = u32::try_from(n).expect("lift exponent fits u32");
    let target = BigUint::from(8 * rk as u64).pow(n32) * BigUint::from(c);
    let holds = |s: u64| BigUint::from(s).pow(n32) >= target;
    let mut s = (8.0 * rk as f64 * (c as f64).powf(1.0 / n as f64)).ceil() as u64;
    while s > 0 && holds(s - 1) {
        s -= 1;
    }
    while !holds(s) {
        s += 1;
    }
    s
}

/// Whether `part ≥ whole / (4 · C^{1/n})`, as `(4·part)^n · C ≥ whole^n`.
pub fn meets_fraction(part: u64, whole: u64, c: u64, n: usize) -> bool {
    let n32 = u32::try_from(n).expect("lift exponent fits u32");
    BigUint::from(4 * part).pow(n32) * BigUint::from(c) >= BigUint::from(whole).pow(n32)
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    let k = k.min(n.saturating_sub(k));
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

/// Leaves fed into the base case: at most 16 distinct rows, each answered
/// with one more bit.
pub const BASE_LEAVES: u32 = 32;

/// `binom(⌈8·rk·C^{1/n}⌉ + r*, r*) · 32`.
pub fn leaf_budget(rk: usize, c: u64, n: usize) -> BigUint {
    assert!(rk >= 1 && c >= 1 && n >= 1, "leaf_budget needs positive arguments");
    let s = shrink_step_budget(rk, c, n);
    let r = rank_step_budget(rk) as u64;
    binomial(s + r, r) * BigUint::from(BASE_LEAVES)
}
