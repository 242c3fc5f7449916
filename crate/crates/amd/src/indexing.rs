//! Grid profile indexing and orbits under agent/alternative relabeling.

use itertools::Itertools;
use sinkmech::grid::DEFAULT_BUDGET;
use sinkmech::{GridSpec, Rational, ValuationProfile};

use crate::error::{Error, Result};

/// Profiles of a `k`-level grid, indexed agent-major and alternative-major
/// within each agent (see [`GridSpec`]).
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileIndexing {
    pub grid: GridSpec<Rational>,
    count: u64,
}

impl ProfileIndexing {
    pub fn new(n: usize, m: usize, k: usize, width: Rational) -> Result<Self> {
        Self::with_budget(n, m, k, width, DEFAULT_BUDGET)
    }

    pub fn with_budget(n: usize, m: usize, k: usize, width: Rational, budget: u64) -> Result<Self> {
        let grid = GridSpec::new(n, m, k, width)?.with_budget(budget);
        let count = grid.enumerable_count()?;
        Ok(Self { grid, count })
    }

    pub fn n(&self) -> usize {
        self.grid.n
    }

    pub fn m(&self) -> usize {
        self.grid.m
    }

    pub fn k(&self) -> usize {
        self.grid.k
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn levels(&self) -> Vec<Rational> {
        self.grid.levels()
    }

    pub fn profile(&self, index: u64) -> ValuationProfile<Rational> {
        self.grid.profile(index)
    }

    pub fn index_of(&self, profile: &ValuationProfile<Rational>) -> Option<u64> {
        self.grid.index_of(profile)
    }

    /// Level index of every `(agent, alternative)` cell, row-major.
    pub fn digits(&self, index: u64) -> Vec<usize> {
        self.grid
            .rows_of(index)
            .into_iter()
            .flat_map(|r| self.grid.row_levels(r))
            .collect()
    }

    pub fn index_of_digits(&self, digits: &[usize]) -> u64 {
        digits.iter().fold(0u64, |acc, &d| acc * self.grid.k as u64 + d as u64)
    }
}

pub fn enumerate_profiles(indexing: &ProfileIndexing) -> Vec<ValuationProfile<Rational>> {
    (0..indexing.count()).map(|i| indexing.profile(i)).collect()
}

/// Group element: agent `i` becomes `agents[i]`, alternative `a` becomes
/// `alternatives[a]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relabeling {
    pub agents: Vec<usize>,
    pub alternatives: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    /// All agent permutations times all alternative permutations.
    Full,
    /// Agent permutations only.
    AgentsOnly,
}

pub fn group(n: usize, m: usize, symmetry: Symmetry) -> Vec<Relabeling> {
    let alt_perms: Vec<Vec<usize>> = match symmetry {
        Symmetry::Full => (0..m).permutations(m).collect(),
        Symmetry::AgentsOnly => vec![(0..m).collect()],
    };
    (0..n)
        .permutations(n)
        .cartesian_product(alt_perms)
        .map(|(agents, alternatives)| Relabeling { agents, alternatives })
        .collect()
}

impl Relabeling {
    /// Image of a profile index: `w[agents[i]][alternatives[a]] = v[i][a]`.
    pub fn apply(&self, indexing: &ProfileIndexing, index: u64) -> u64 {
        let m = indexing.m();
        let digits = indexing.digits(index);
        let mut image = vec![0; digits.len()];
        for (cell, d) in digits.into_iter().enumerate() {
            let (i, a) = (cell / m, cell % m);
            image[self.agents[i] * m + self.alternatives[a]] = d;
        }
        indexing.index_of_digits(&image)
    }
}

/// Partition of the grid into orbits. Each orbit is represented by its
/// smallest full index; the reduced index of an orbit is the rank of that
/// representative.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitTable {
    pub group: Vec<Relabeling>,
    reduced_of: Vec<usize>,
    representatives: Vec<u64>,
}

impl OrbitTable {
    pub fn new(indexing: &ProfileIndexing, symmetry: Symmetry) -> Self {
        let group = group(indexing.n(), indexing.m(), symmetry);
        let canonical: Vec<u64> = (0..indexing.count())
            .map(|v| group.iter().map(|g| g.apply(indexing, v)).min().expect("non-empty group"))
            .collect();
        let representatives: Vec<u64> = (0..indexing.count()).filter(|&v| canonical[v as usize] == v).collect();
        let mut rank = vec![usize::MAX; indexing.count() as usize];
        for (r, &rep) in representatives.iter().enumerate() {
            rank[rep as usize] = r;
        }
        let reduced_of = canonical.iter().map(|&c| rank[c as usize]).collect();
        Self {
            group,
            reduced_of,
            representatives,
        }
    }

    pub fn len(&self) -> usize {
        self.representatives.len()
    }

    pub fn is_empty(&self) -> bool {
        self.representatives.is_empty()
    }

    pub fn reduced_index(&self, full: u64) -> usize {
        self.reduced_of[full as usize]
    }

    pub fn representative(&self, reduced: usize) -> Result<u64> {
        self.representatives
            .get(reduced)
            .copied()
            .ok_or_else(|| Error::Argument(format!("reduced index {reduced} out of range")))
    }

    pub fn representatives(&self) -> &[u64] {
        &self.representatives
    }

    pub fn members(&self, reduced: usize) -> Vec<u64> {
        (0..self.reduced_of.len() as u64)
            .filter(|&v| self.reduced_of[v as usize] == reduced)
            .collect()
    }
}

/// Orbit count by Burnside's lemma: a relabeling fixes `k^c` profiles, `c`
/// being the number of cycles it induces on the `n × m` cells.
pub fn burnside_orbit_count(n: usize, m: usize, k: usize, symmetry: Symmetry) -> u64 {
    let elements = group(n, m, symmetry);
    let total: u64 = elements
        .iter()
        .map(|g| {
            let mut seen = vec![false; n * m];
            let mut cycles = 0u32;
            for start in 0..n * m {
                if seen[start] {
                    continue;
                }
                cycles += 1;
                let mut cell = start;
                while !seen[cell] {
                    seen[cell] = true;
                    cell = g.agents[cell / m] * m + g.alternatives[cell % m];
                }
            }
            (k as u64).pow(cycles)
        })
        .sum();
    total / elements.len() as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use sinkmech::Scalar;

    fn indexing(k: usize) -> ProfileIndexing {
        ProfileIndexing::new(2, 2, k, Rational::from_int(1)).unwrap()
    }

    #[test]
    fn orbit_count_and_burnside() {
        let idx = indexing(3);
        let orbits = OrbitTable::new(&idx, Symmetry::Full);
        assert_eq!(orbits.len(), 27);
        assert_eq!(burnside_orbit_count(2, 2, 3, Symmetry::Full), 27);
        for k in 2..=4 {
            let idx = indexing(k);
            for sym in [Symmetry::Full, Symmetry::AgentsOnly] {
                assert_eq!(OrbitTable::new(&idx, sym).len() as u64, burnside_orbit_count(2, 2, k, sym));
            }
        }
    }

    #[test]
    fn anchor_orbit() {
        let idx = indexing(3);
        let orbits = OrbitTable::new(&idx, Symmetry::Full);
        let r = orbits.reduced_index(52);
        assert_eq!(r, 24);
        assert_eq!(orbits.members(r), vec![52, 68]);
        assert_eq!(orbits.representative(24).unwrap(), 52);
    }

    #[test]
    fn agent_swap_fixed_points() {
        let idx = indexing(3);
        let swap = Relabeling {
            agents: vec![1, 0],
            alternatives: vec![0, 1],
        };
        let fixed: Vec<u64> = (0..81).filter(|&v| swap.apply(&idx, v) == v).collect();
        assert_eq!(fixed.len(), 9);
        for v in fixed {
            let p = idx.profile(v);
            assert_eq!(p.row(0), p.row(1));
        }
    }
}
