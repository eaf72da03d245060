//! Problem parameters and ordered families of sets over a common ground set.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::set::IntSet;

/// Parameters of one instance: ground set `[1, n]`, `m` summands, `k` sets.
///
/// Construction enforces `m >= 2`, `k >= m + 1` and `n >= m + 1`, the
/// hypotheses every closed form in this crate assumes. The quotient and
/// remainder of `n = m*q + r` are derived on demand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Problem {
    n: usize,
    m: usize,
    k: usize,
}

impl Problem {
    pub fn new(n: usize, m: usize, k: usize) -> Result<Problem, Error> {
        if m < 2 {
            return Err(Error::InvalidParameters(format!("m must be at least 2, got {m}")));
        }
        if k < m + 1 {
            return Err(Error::InvalidParameters(format!(
                "k must be at least m + 1 = {}, got {k}",
                m + 1
            )));
        }
        if n < m + 1 {
            return Err(Error::InvalidParameters(format!(
                "n must be at least m + 1 = {}, got {n}",
                m + 1
            )));
        }
        Ok(Problem { n, m, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// `q = floor(n / m)`.
    pub fn q(&self) -> usize {
        self.n / self.m
    }

    /// `r = n - m*q`, so `0 <= r < m`.
    pub fn r(&self) -> usize {
        self.n % self.m
    }
}

/// An ordered list of exactly `k` sets over `[1, n]`.
///
/// Emptiness of individual sets is allowed here; operations that require
/// nonempty sets enforce it themselves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family {
    problem: Problem,
    sets: Vec<IntSet>,
}

/// Aggregate statistics of a family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyStats {
    /// Sum of the set sizes.
    pub total: usize,
    /// Product of the set sizes (zero when any set is empty).
    pub product: BigUint,
    /// Whether the sets are nested in stored order (each contains the next).
    pub nested: bool,
    /// For each element present somewhere, the number of sets containing it.
    pub multiplicity: BTreeMap<usize, usize>,
}

/// Order-insensitive fingerprint of a family: the sorted list of its sets'
/// element lists. Two families get equal keys exactly when they contain the
/// same sets with the same multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct CanonicalKey(pub Vec<Vec<usize>>);

impl Family {
    pub fn new(problem: Problem, sets: Vec<IntSet>) -> Result<Family, Error> {
        if sets.len() != problem.k() {
            return Err(Error::InvalidParameters(format!(
                "expected {} sets, got {}",
                problem.k(),
                sets.len()
            )));
        }
        if let Some(bad) = sets.iter().find(|s| s.universe_max() != problem.n()) {
            return Err(Error::InvalidParameters(format!(
                "every set must live over [1, {}], found universe [1, {}]",
                problem.n(),
                bad.universe_max()
            )));
        }
        Ok(Family { problem, sets })
    }

    pub fn problem(&self) -> &Problem {
        &self.problem
    }

    pub fn sets(&self) -> &[IntSet] {
        &self.sets
    }

    /// The set at 1-based index `i`.
    pub fn set(&self, i: usize) -> &IntSet {
        &self.sets[i - 1]
    }

    pub fn stats(&self) -> FamilyStats {
        let total = self.sets.iter().map(IntSet::len).sum();
        let product = self
            .sets
            .iter()
            .fold(BigUint::from(1u32), |acc, s| acc * BigUint::from(s.len()));
        let nested = self.sets.windows(2).all(|w| w[0].is_superset_of(&w[1]));
        let mut multiplicity = BTreeMap::new();
        for s in &self.sets {
            for x in s.iter() {
                *multiplicity.entry(x).or_insert(0) += 1;
            }
        }
        FamilyStats { total, product, nested, multiplicity }
    }

    pub fn canonical_key(&self) -> CanonicalKey {
        let mut lists: Vec<Vec<usize>> = self.sets.iter().map(IntSet::to_vec).collect();
        lists.sort();
        CanonicalKey(lists)
    }
}

/// On-disk form of a family: `{"n": .., "m": .., "sets": [[..], ..]}`.
///
/// `k` is implied by the number of sets, and the elements of each set must be
/// strictly increasing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilyDoc {
    pub n: usize,
    pub m: usize,
    pub sets: Vec<Vec<usize>>,
}

impl FamilyDoc {
    pub fn from_family(family: &Family) -> FamilyDoc {
        FamilyDoc {
            n: family.problem().n(),
            m: family.problem().m(),
            sets: family.sets().iter().map(IntSet::to_vec).collect(),
        }
    }

    /// Validate and build the family, optionally reinterpreting it with a
    /// different number of summands than the document records.
    pub fn to_family(&self, m_override: Option<usize>) -> Result<Family, Error> {
        let m = m_override.unwrap_or(self.m);
        let problem = Problem::new(self.n, m, self.sets.len())?;
        let mut sets = Vec::with_capacity(self.sets.len());
        for (i, elems) in self.sets.iter().enumerate() {
            if elems.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidFamilyFile(format!(
                    "set {} is not strictly increasing",
                    i + 1
                )));
            }
            let set = IntSet::from_elements(self.n, elems)
                .map_err(|e| Error::InvalidFamilyFile(format!("set {}: {e}", i + 1)))?;
            sets.push(set);
        }
        Family::new(problem, sets)
    }
}
