use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{DiscreteFactor, Elimination};

/// Tolerance for a CPT row to count as normalized.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub id: usize,
    pub name: String,
    pub cardinality: usize,
}

impl Variable {
    pub fn new(id: usize, name: impl Into<String>, cardinality: usize) -> Self {
        Variable {
            id,
            name: name.into(),
            cardinality,
        }
    }

    /// Name used when a file declares none.
    pub fn default_name(id: usize) -> String {
        format!("X{id}")
    }
}

/// A DAG over discrete variables with one conditional table per chance
/// variable. Decision variables (only inside an [`InfluenceDiagram`]) carry
/// no table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BeliefNetwork {
    variables: Vec<Variable>,
    parents: Vec<Vec<usize>>,
    cpts: Vec<Option<DiscreteFactor>>,
}

fn check_variables(variables: &[Variable]) -> Result<()> {
    let mut names = HashSet::new();
    for (i, v) in variables.iter().enumerate() {
        if v.id != i {
            return Err(Error::model(format!(
                "variable ids must be dense: position {i} holds id {}",
                v.id
            )));
        }
        if v.cardinality == 0 {
            return Err(Error::model(format!("variable {} has cardinality 0", v.name)));
        }
        if !names.insert(v.name.as_str()) {
            return Err(Error::model(format!("duplicate variable name {}", v.name)));
        }
    }
    Ok(())
}

/// Checks that summing the table over `child` gives one for every parent row.
pub(crate) fn check_normalized(name: &str, cpt: &DiscreteFactor, child: usize) -> Result<()> {
    let (sums, _) = cpt.eliminate(child, Elimination::Sum)?;
    for (row, &sum) in sums.values().iter().enumerate() {
        if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
            return Err(Error::NotNormalized {
                variable: name.to_string(),
                row,
                sum,
            });
        }
    }
    Ok(())
}

impl BeliefNetwork {
    /// Builds a network where every variable has a CPT over its family.
    pub fn new(variables: Vec<Variable>, parents: Vec<Vec<usize>>, cpts: Vec<DiscreteFactor>) -> Result<Self> {
        BeliefNetwork::build(variables, parents, cpts.into_iter().map(Some).collect(), &[])
    }

    /// Builds a network where the variables in `tableless` have no CPT.
    pub(crate) fn build(
        variables: Vec<Variable>,
        parents: Vec<Vec<usize>>,
        cpts: Vec<Option<DiscreteFactor>>,
        tableless: &[usize],
    ) -> Result<Self> {
        check_variables(&variables)?;
        let n = variables.len();
        if parents.len() != n || cpts.len() != n {
            return Err(Error::model(format!(
                "expected {n} parent lists and CPT slots, got {} and {}",
                parents.len(),
                cpts.len()
            )));
        }
        for (i, pa) in parents.iter().enumerate() {
            let mut seen = BTreeSet::new();
            for &p in pa {
                if p >= n {
                    return Err(Error::model(format!("parent id {p} out of range")));
                }
                if p == i || !seen.insert(p) {
                    return Err(Error::model(format!("invalid parent list for {}", variables[i].name)));
                }
            }
        }
        for (i, cpt) in cpts.iter().enumerate() {
            let name = &variables[i].name;
            match cpt {
                None if tableless.contains(&i) => {
                    if !parents[i].is_empty() {
                        return Err(Error::DecisionWithParents(name.clone()));
                    }
                }
                None => return Err(Error::model(format!("variable {name} has no CPT"))),
                Some(_) if tableless.contains(&i) => return Err(Error::DecisionWithParents(name.clone())),
                Some(f) => {
                    let mut family: Vec<usize> = parents[i].clone();
                    family.push(i);
                    family.sort_unstable();
                    if f.scope() != family.as_slice() {
                        return Err(Error::model(format!(
                            "CPT of {name} has scope {:?}, expected {:?}",
                            f.scope(),
                            family
                        )));
                    }
                    for (&v, &c) in f.scope().iter().zip(f.cards()) {
                        if variables[v].cardinality != c {
                            return Err(Error::model(format!(
                                "CPT of {name} uses cardinality {c} for {}",
                                variables[v].name
                            )));
                        }
                    }
                    if f.values().iter().any(|v| *v < 0.0) {
                        return Err(Error::model(format!("CPT of {name} has negative entries")));
                    }
                    check_normalized(name, f, i)?;
                }
            }
        }
        let net = BeliefNetwork {
            variables,
            parents,
            cpts,
        };
        net.topological_order()?;
        Ok(net)
    }

    pub fn len(&self) -> usize {
        self.variables.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variables.is_empty()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.variables
    }

    pub fn variable(&self, id: usize) -> &Variable {
        &self.variables[id]
    }

    pub fn cardinalities(&self) -> Vec<usize> {
        self.variables.iter().map(|v| v.cardinality).collect()
    }

    pub fn parents(&self, id: usize) -> &[usize] {
        &self.parents[id]
    }

    pub fn children(&self, id: usize) -> Vec<usize> {
        (0..self.len()).filter(|&c| self.parents[c].contains(&id)).collect()
    }

    pub fn cpt(&self, id: usize) -> Option<&DiscreteFactor> {
        self.cpts[id].as_ref()
    }

    /// All conditional tables, in variable-id order.
    pub fn factors(&self) -> Vec<DiscreteFactor> {
        self.cpts.iter().flatten().cloned().collect()
    }

    /// Looks a variable up by name, falling back to a numeric id.
    pub fn find(&self, name: &str) -> Option<usize> {
        self.variables
            .iter()
            .position(|v| v.name == name)
            .or_else(|| name.parse::<usize>().ok().filter(|&i| i < self.len()))
    }

    pub fn has_default_names(&self) -> bool {
        self.variables.iter().all(|v| v.name == Variable::default_name(v.id))
    }

    /// Product of all CPT entries at a full assignment.
    pub fn joint_probability(&self, assignment: &[usize]) -> f64 {
        self.cpts.iter().flatten().map(|f| f.value_at(assignment)).product()
    }

    /// Kahn's algorithm, lowest id first among ready nodes.
    pub fn topological_order(&self) -> Result<Vec<usize>> {
        let n = self.len();
        let mut indegree: Vec<usize> = self.parents.iter().map(|p| p.len()).collect();
        let children: Vec<Vec<usize>> = (0..n).map(|i| self.children(i)).collect();
        let mut ready: VecDeque<usize> = (0..n).filter(|&i| indegree[i] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = ready.pop_front() {
            order.push(v);
            for &c in &children[v] {
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    ready.push_back(c);
                }
            }
        }
        if order.len() < n {
            let stuck = (0..n).find(|&i| indegree[i] > 0).unwrap();
            return Err(Error::Cycle(self.variables[stuck].name.clone()));
        }
        Ok(order)
    }
}

/// A belief network extended with root decision variables and an additively
/// decomposed utility.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InfluenceDiagram {
    network: BeliefNetwork,
    decisions: Vec<usize>,
    utilities: Vec<DiscreteFactor>,
}

impl InfluenceDiagram {
    /// `cpts[d]` must be `None` for every decision `d`.
    pub fn new(
        variables: Vec<Variable>,
        parents: Vec<Vec<usize>>,
        cpts: Vec<Option<DiscreteFactor>>,
        decisions: Vec<usize>,
        utilities: Vec<DiscreteFactor>,
    ) -> Result<Self> {
        let n = variables.len();
        let mut seen = BTreeSet::new();
        for &d in &decisions {
            if d >= n || !seen.insert(d) {
                return Err(Error::model(format!("invalid decision id {d}")));
            }
        }
        let network = BeliefNetwork::build(variables, parents, cpts, &decisions)?;
        for u in &utilities {
            for (&v, &c) in u.scope().iter().zip(u.cards()) {
                if v >= n || network.variable(v).cardinality != c {
                    return Err(Error::model(format!(
                        "utility scope {:?} does not match the variables",
                        u.scope()
                    )));
                }
            }
        }
        Ok(InfluenceDiagram {
            network,
            decisions,
            utilities,
        })
    }

    pub fn network(&self) -> &BeliefNetwork {
        &self.network
    }

    pub fn decisions(&self) -> &[usize] {
        &self.decisions
    }

    pub fn utilities(&self) -> &[DiscreteFactor] {
        &self.utilities
    }

    pub fn is_decision(&self, id: usize) -> bool {
        self.decisions.contains(&id)
    }

    /// Sum of all utility components at a full assignment.
    pub fn utility(&self, assignment: &[usize]) -> f64 {
        self.utilities.iter().map(|f| f.value_at(assignment)).sum()
    }
}
