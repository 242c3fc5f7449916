//! Uniformly discretised valuation grids.
//!
//! Each agent's valuation takes one of `k` levels
//! `level_j = -M/2 + j·M/(k-1)` per alternative. A row (one agent's
//! valuation) is indexed alternative-major, `Σ_a level(a)·k^(m-1-a)`, and a
//! profile agent-major, `Σ_i row(i)·(k^m)^(n-1-i)`. Index 0 is the profile
//! with every entry at `-M/2`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::profile::ValuationProfile;
use crate::scalar::Scalar;

/// Default cap on the number of profiles any single enumeration may visit.
pub const DEFAULT_BUDGET: u64 = 1 << 24;

#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec<S> {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub width: S,
    pub budget: u64,
}

impl<S: Scalar> GridSpec<S> {
    pub fn new(n: usize, m: usize, k: usize, width: S) -> Result<Self> {
        if n == 0 {
            return Err(Error::Argument("grid needs at least one agent".into()));
        }
        if m < 2 {
            return Err(Error::Argument("grid needs at least two alternatives".into()));
        }
        if k < 2 {
            return Err(Error::Argument(format!("grid needs k >= 2 levels, got {k}")));
        }
        if width <= S::zero() {
            return Err(Error::Argument(format!("valuation width must be positive, got {width}")));
        }
        Ok(Self {
            n,
            m,
            k,
            width,
            budget: DEFAULT_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }

    pub fn levels(&self) -> Vec<S> {
        let half = self.width.clone() / S::from_int(2);
        let step = self.width.clone() / S::from_int(self.k as i64 - 1);
        (0..self.k)
            .map(|j| -half.clone() + step.clone() * S::from_int(j as i64))
            .collect()
    }

    /// `k^m`, the number of distinct valuation rows per agent.
    pub fn rows_per_agent(&self) -> Result<u64> {
        checked_pow(self.k as u64, self.m as u32)
    }

    /// `k^(nm)`, or a resource error if that does not fit in `u64`.
    pub fn profile_count(&self) -> Result<u64> {
        checked_pow(self.k as u64, (self.n * self.m) as u32)
    }

    /// Profile count, failing if it exceeds the configured budget.
    pub fn enumerable_count(&self) -> Result<u64> {
        let count = self.profile_count()?;
        if count > self.budget {
            return Err(Error::Resource(format!(
                "grid n={} m={} k={} has {count} profiles, budget is {}",
                self.n, self.m, self.k, self.budget
            )));
        }
        Ok(count)
    }

    pub fn row_levels(&self, row: u64) -> Vec<usize> {
        let mut digits = vec![0; self.m];
        let mut rest = row;
        for a in (0..self.m).rev() {
            digits[a] = (rest % self.k as u64) as usize;
            rest /= self.k as u64;
        }
        digits
    }

    pub fn row_values(&self, row: u64) -> Vec<S> {
        let levels = self.levels();
        self.row_levels(row).into_iter().map(|j| levels[j].clone()).collect()
    }

    /// Inverse of [`row_values`](Self::row_values); `None` if some entry is
    /// not a grid level.
    pub fn row_index(&self, values: &[S]) -> Option<u64> {
        if values.len() != self.m {
            return None;
        }
        let levels = self.levels();
        values.iter().try_fold(0u64, |acc, v| {
            let j = levels.iter().position(|l| l == v)?;
            Some(acc * self.k as u64 + j as u64)
        })
    }

    /// Per-agent row indices of a profile index.
    pub fn rows_of(&self, index: u64) -> Vec<u64> {
        let per_agent = self.k.pow(self.m as u32) as u64;
        let mut rows = vec![0; self.n];
        let mut rest = index;
        for i in (0..self.n).rev() {
            rows[i] = rest % per_agent;
            rest /= per_agent;
        }
        rows
    }

    pub fn index_from_rows(&self, rows: &[u64]) -> u64 {
        let per_agent = self.k.pow(self.m as u32) as u64;
        rows.iter().fold(0, |acc, &r| acc * per_agent + r)
    }

    /// Index of the profile where `agent`'s row is replaced by `row`.
    pub fn replace_row(&self, index: u64, agent: usize, row: u64) -> u64 {
        let per_agent = self.k.pow(self.m as u32) as u64;
        let scale = per_agent.pow((self.n - 1 - agent) as u32);
        let current = (index / scale) % per_agent;
        index - current * scale + row * scale
    }

    pub fn profile(&self, index: u64) -> ValuationProfile<S> {
        let levels = self.levels();
        let mut values = Vec::with_capacity(self.n * self.m);
        for row in self.rows_of(index) {
            values.extend(self.row_levels(row).into_iter().map(|j| levels[j].clone()));
        }
        ValuationProfile::from_flat_unchecked(self.n, self.m, self.width.clone(), values)
    }

    pub fn index_of(&self, profile: &ValuationProfile<S>) -> Option<u64> {
        if profile.agents() != self.n || profile.alternatives() != self.m {
            return None;
        }
        let rows = profile
            .rows()
            .map(|r| self.row_index(r))
            .collect::<Option<Vec<u64>>>()?;
        Some(self.index_from_rows(&rows))
    }

    /// All grid profiles in index order.
    pub fn profiles(&self) -> Result<Vec<ValuationProfile<S>>> {
        let count = self.enumerable_count()?;
        Ok((0..count).into_par_iter().map(|i| self.profile(i)).collect())
    }
}

fn checked_pow(base: u64, exp: u32) -> Result<u64> {
    base.checked_pow(exp)
        .ok_or_else(|| Error::Resource(format!("{base}^{exp} overflows the index space")))
}

/// Maximum of `f` over `0..count`, evaluated in parallel. Among equal maxima
/// the smallest index wins, so the result does not depend on scheduling.
pub fn par_argmax<S, F>(count: u64, f: F) -> Result<(S, u64)>
where
    S: Scalar,
    F: Fn(u64) -> Result<S> + Sync + Send,
{
    if count == 0 {
        return Err(Error::Argument("maximum over an empty range".into()));
    }
    let best = (0..count)
        .into_par_iter()
        .map(|i| f(i).map(|v| (v, i)))
        .try_reduce_with(|a, b| Ok(pick_max(a, b)));
    best.expect("non-empty range")
}

fn pick_max<S: Scalar>(a: (S, u64), b: (S, u64)) -> (S, u64) {
    if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) {
        b
    } else {
        a
    }
}
