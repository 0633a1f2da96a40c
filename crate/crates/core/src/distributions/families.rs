use std::collections::HashSet;
use std::sync::Arc;

use super::{LocationFamily, Repr};
use crate::error::{Error, Result};

/// The distribution functions of `m` hypotheses: either one family shared
/// by all of them or one family per hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySet {
    Shared { family: LocationFamily, m: usize },
    PerHypothesis(Vec<LocationFamily>),
}

impl FamilySet {
    pub fn shared(family: LocationFamily, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("number of hypotheses m must be at least 1"));
        }
        Ok(FamilySet::Shared { family, m })
    }

    pub fn per_hypothesis(families: Vec<LocationFamily>) -> Result<Self> {
        if families.is_empty() {
            return Err(Error::domain("per-hypothesis family list is empty"));
        }
        Ok(FamilySet::PerHypothesis(families))
    }

    pub fn m(&self) -> usize {
        match self {
            FamilySet::Shared { m, .. } => *m,
            FamilySet::PerHypothesis(f) => f.len(),
        }
    }

    /// Family of hypothesis `i` (0-based).
    pub fn get(&self, i: usize) -> &LocationFamily {
        match self {
            FamilySet::Shared { family, .. } => family,
            FamilySet::PerHypothesis(f) => &f[i],
        }
    }

    pub fn is_shared(&self) -> bool {
        matches!(self, FamilySet::Shared { .. })
    }

    pub fn all_monotone_ratio(&self) -> bool {
        self.distinct()
            .iter()
            .all(LocationFamily::has_monotone_ratio)
    }

    /// The distinct families, in first-occurrence order.
    pub fn distinct(&self) -> Vec<LocationFamily> {
        match self {
            FamilySet::Shared { family, .. } => vec![family.clone()],
            FamilySet::PerHypothesis(families) => {
                let mut seen = HashSet::new();
                let mut out = Vec::new();
                for f in families {
                    let key = match &f.0 {
                        Repr::StandardGaussian => (0u8, 1f64.to_bits()),
                        Repr::ScaledGaussian(s) => (0, s.to_bits()),
                        Repr::Logistic => (1, 0),
                        Repr::Tabulated(t) => (2, Arc::as_ptr(t) as usize as u64),
                    };
                    if seen.insert(key) {
                        out.push(f.clone());
                    }
                }
                out
            }
        }
    }
}
