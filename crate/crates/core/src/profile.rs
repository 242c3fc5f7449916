use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Index of an alternative in `[0, m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Alternative(pub usize);

impl Alternative {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for Alternative {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // a, b, c, ... for small instances; a_27 style beyond.
        if self.0 < 26 {
            write!(f, "{}", (b'a' + self.0 as u8) as char)
        } else {
            write!(f, "a_{}", self.0 + 1)
        }
    }
}

/// Reported valuations of `n` agents over `m` alternatives, each entry in
/// `[-M/2, M/2]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ValuationProfile<S> {
    n: usize,
    m: usize,
    width: S,
    values: Vec<S>,
}

impl<S: Scalar> ValuationProfile<S> {
    pub fn new(width: S, rows: Vec<Vec<S>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Instance("profile needs at least one agent".into()));
        }
        let m = rows[0].len();
        if m < 2 {
            return Err(Error::Instance("profile needs at least two alternatives".into()));
        }
        if let Some(i) = rows.iter().position(|r| r.len() != m) {
            return Err(Error::Instance(format!(
                "agent {i} has {} values, expected {m}",
                rows[i].len()
            )));
        }
        if width <= S::zero() {
            return Err(Error::Instance(format!("valuation width must be positive, got {width}")));
        }
        let half = width.clone() / S::from_int(2);
        let low = -half.clone();
        for (i, row) in rows.iter().enumerate() {
            for (a, v) in row.iter().enumerate() {
                if *v < low || *v > half {
                    return Err(Error::Instance(format!(
                        "value {v} of agent {i} for alternative {a} outside [{low}, {half}]"
                    )));
                }
            }
        }
        Ok(Self {
            n,
            m,
            width,
            values: rows.into_iter().flatten().collect(),
        })
    }

    /// Builds a profile from integer-ratio rows; handy in tests.
    pub fn from_ratios(width: S, rows: &[&[(i64, i64)]]) -> Result<Self> {
        Self::new(
            width,
            rows.iter()
                .map(|r| r.iter().map(|&(p, q)| S::from_ratio(p, q)).collect())
                .collect(),
        )
    }

    pub(crate) fn from_flat_unchecked(n: usize, m: usize, width: S, values: Vec<S>) -> Self {
        debug_assert_eq!(values.len(), n * m);
        Self {
            n,
            m,
            width,
            values,
        }
    }

    pub fn agents(&self) -> usize {
        self.n
    }

    pub fn alternatives(&self) -> usize {
        self.m
    }

    /// The valuation range width `M`.
    pub fn width(&self) -> &S {
        &self.width
    }

    pub fn value(&self, agent: usize, alternative: Alternative) -> &S {
        &self.values[agent * self.m + alternative.0]
    }

    pub fn row(&self, agent: usize) -> &[S] {
        &self.values[agent * self.m..(agent + 1) * self.m]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[S]> {
        self.values.chunks(self.m)
    }

    pub fn alternative(&self, index: usize) -> Result<Alternative> {
        if index < self.m {
            Ok(Alternative(index))
        } else {
            Err(Error::Instance(format!(
                "alternative {index} out of range for m = {}",
                self.m
            )))
        }
    }

    pub fn check_agent(&self, agent: usize) -> Result<()> {
        if agent < self.n {
            Ok(())
        } else {
            Err(Error::Instance(format!("agent {agent} out of range for n = {}", self.n)))
        }
    }

    /// Same profile with one agent's row replaced (a unilateral misreport).
    pub fn with_row(&self, agent: usize, row: &[S]) -> Result<Self> {
        self.check_agent(agent)?;
        let mut rows: Vec<Vec<S>> = self.rows().map(|r| r.to_vec()).collect();
        rows[agent] = row.to_vec();
        Self::new(self.width.clone(), rows)
    }

    /// Applies an agent permutation: row `i` of the result is row `perm[i]`
    /// of `self`.
    pub fn permute_agents(&self, perm: &[usize]) -> Self {
        let values = perm.iter().flat_map(|&i| self.row(i).iter().cloned()).collect();
        Self::from_flat_unchecked(self.n, self.m, self.width.clone(), values)
    }

    /// Applies an alternative relabeling: alternative `a` becomes `perm[a]`.
    pub fn relabel_alternatives(&self, perm: &[usize]) -> Self {
        let mut values = self.values.clone();
        for i in 0..self.n {
            for a in 0..self.m {
                values[i * self.m + perm[a]] = self.values[i * self.m + a].clone();
            }
        }
        Self::from_flat_unchecked(self.n, self.m, self.width.clone(), values)
    }

    /// Line-oriented text form: header `n m M`, then one row per agent.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {} {}\n", self.n, self.m, self.width);
        for row in self.rows() {
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or_else(|| Error::parse(1, "empty profile"))?;
        let fields: Vec<&str> = header.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::parse(hline, "header must be `n m M`"));
        }
        let n: usize = fields[0]
            .parse()
            .map_err(|_| Error::parse(hline, format!("bad agent count {:?}", fields[0])))?;
        let m: usize = fields[1]
            .parse()
            .map_err(|_| Error::parse(hline, format!("bad alternative count {:?}", fields[1])))?;
        let width = S::parse_scalar(fields[2]).map_err(|e| Error::parse(hline, e.to_string()))?;

        let mut rows = Vec::with_capacity(n);
        for (lineno, line) in lines {
            if rows.len() == n {
                return Err(Error::parse(lineno, "more rows than agents"));
            }
            let row = line
                .split_whitespace()
                .map(|cell| S::parse_scalar(cell).map_err(|e| Error::parse(lineno, e.to_string())))
                .collect::<Result<Vec<S>>>()?;
            if row.len() != m {
                return Err(Error::parse(lineno, format!("expected {m} values, got {}", row.len())));
            }
            rows.push(row);
        }
        if rows.len() != n {
            return Err(Error::parse(
                text.lines().count().max(1),
                format!("expected {n} rows, got {}", rows.len()),
            ));
        }
        Self::new(width, rows).map_err(|e| Error::parse(hline, e.to_string()))
    }
}

impl<S: Scalar> fmt::Display for ValuationProfile<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .rows()
            .map(|r| {
                let cells: Vec<String> = r.iter().map(|v| v.to_string()).collect();
                format!("({})", cells.join(", "))
            })
            .collect();
        write!(f, "{}", rows.join(" "))
    }
}
