use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An instantiated subset of variables.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    assignments: BTreeMap<usize, usize>,
}

impl Evidence {
    pub fn empty() -> Self {
        Evidence::default()
    }

    /// Validates every pair against `cards` (indexed by variable id).
    pub fn new(pairs: &[(usize, usize)], cards: &[usize]) -> Result<Self> {
        let mut ev = Evidence::empty();
        for &(var, value) in pairs {
            ev.insert(var, value, cards)?;
        }
        Ok(ev)
    }

    pub fn insert(&mut self, var: usize, value: usize, cards: &[usize]) -> Result<()> {
        let card = *cards
            .get(var)
            .ok_or_else(|| Error::InvalidEvidence(format!("unknown variable {var}")))?;
        if value >= card {
            return Err(Error::InvalidEvidence(format!(
                "value {value} out of range for variable {var} with cardinality {card}"
            )));
        }
        if self.assignments.insert(var, value).is_some() {
            return Err(Error::InvalidEvidence(format!("variable {var} assigned twice")));
        }
        Ok(())
    }

    /// Adds `var = value` unless `var` is already observed. Returns false on a
    /// conflicting observation.
    pub fn extend_consistent(&mut self, var: usize, value: usize) -> bool {
        match self.assignments.get(&var) {
            Some(&v) => v == value,
            None => {
                self.assignments.insert(var, value);
                true
            }
        }
    }

    pub fn get(&self, var: usize) -> Option<usize> {
        self.assignments.get(&var).copied()
    }

    pub fn contains(&self, var: usize) -> bool {
        self.assignments.contains_key(&var)
    }

    pub fn len(&self) -> usize {
        self.assignments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignments.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.assignments.iter().map(|(&k, &v)| (k, v))
    }

    pub fn variables(&self) -> Vec<usize> {
        self.assignments.keys().copied().collect()
    }

    /// Checks that a full assignment agrees with every observation.
    pub fn agrees_with(&self, assignment: &[usize]) -> bool {
        self.iter().all(|(v, x)| assignment[v] == x)
    }
}
