//! Search limits shared by the exhaustive solvers.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};

/// Budgets for the exponential searches. Exhausting any of them turns an
/// exact answer into an explicit interval, never into a wrong exact claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchLimits {
    /// Maximum number of search nodes expanded per call.
    pub node_budget: u64,
    /// Wall-clock budget per call, in milliseconds.
    pub time_budget_ms: u64,
    /// Maximum number of maximal rectangles an enumeration may hold.
    pub rect_budget: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            node_budget: 20_000_000,
            time_budget_ms: 60_000,
            rect_budget: 100_000,
        }
    }
}

impl SearchLimits {
    /// Parses `node=..,ms=..,rects=..`; missing keys keep the values of `base`.
    pub fn parse_with_base(spec: &str, base: SearchLimits) -> Result<SearchLimits> {
        let mut out = base;
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("limit '{part}' is not key=value")))?;
            let parsed: u64 = value
                .trim()
                .parse()
                .map_err(|_| Error::invalid(format!("limit '{part}' has a non-integer value")))?;
            if parsed == 0 {
                return Err(Error::invalid(format!("limit '{part}' must be positive")));
            }
            match key.trim() {
                "node" => out.node_budget = parsed,
                "ms" => out.time_budget_ms = parsed,
                "rects" => out.rect_budget = parsed as usize,
                other => return Err(Error::invalid(format!("unknown limit key '{other}'"))),
            }
        }
        Ok(out)
    }

    pub fn parse(spec: &str) -> Result<SearchLimits> {
        Self::parse_with_base(spec, SearchLimits::default())
    }
}

/// Node and wall-clock accounting for one search call.
#[derive(Debug)]
pub(crate) struct Budget {
    nodes: u64,
    node_budget: u64,
    deadline: Instant,
    exhausted: bool,
}

impl Budget {
    pub(crate) fn new(limits: &SearchLimits) -> Self {
        Budget {
            nodes: 0,
            node_budget: limits.node_budget,
            deadline: Instant::now() + Duration::from_millis(limits.time_budget_ms),
            exhausted: false,
        }
    }

    /// Counts one node; returns false once any budget is spent.
    pub(crate) fn tick(&mut self) -> bool {
        if self.exhausted {
            return false;
        }
        self.nodes += 1;
        if self.nodes > self.node_budget
            || (self.nodes & 1023 == 0 && Instant::now() >= self.deadline)
        {
            self.exhausted = true;
        }
        !self.exhausted
    }

    pub(crate) fn exhausted(&self) -> bool {
        self.exhausted
    }

    pub(crate) fn nodes(&self) -> u64 {
        self.nodes
    }
}
