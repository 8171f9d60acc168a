//! Directional resolution over CNF theories and backtrack-free model
//! generation from the resulting extension.
//!
//! Orderings here range over zero-based proposition ids.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::Ordering;
use crate::model::{write_cnf, Clause, CnfTheory};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectionalExtension {
    ordering: Ordering,
    /// Clauses by ordering position of their highest proposition.
    buckets: Vec<BTreeSet<Clause>>,
    satisfiable: bool,
}

impl DirectionalExtension {
    pub fn ordering(&self) -> &Ordering {
        &self.ordering
    }

    pub fn bucket(&self, position: usize) -> &BTreeSet<Clause> {
        &self.buckets[position]
    }

    pub fn bucket_of(&self, prop: usize) -> &BTreeSet<Clause> {
        &self.buckets[self.ordering.position(prop)]
    }

    pub fn is_satisfiable(&self) -> bool {
        self.satisfiable
    }

    pub fn num_props(&self) -> usize {
        self.ordering.len()
    }

    pub fn clause_count(&self) -> usize {
        self.buckets.iter().map(BTreeSet::len).sum()
    }

    /// Union of the buckets, first position first; empty when unsatisfiable.
    pub fn theory(&self) -> CnfTheory {
        let clauses = self.buckets.iter().flatten().cloned().collect();
        CnfTheory::new(self.num_props(), clauses).expect("extension stays in range")
    }

    /// Largest number of distinct propositions mentioned in one bucket.
    pub fn max_bucket_scope(&self) -> usize {
        self.buckets
            .iter()
            .map(|b| b.iter().flat_map(|c| c.props()).collect::<BTreeSet<_>>().len())
            .max()
            .unwrap_or(0)
    }

    /// DIMACS text with a comment naming the ordering in one-based ids.
    pub fn to_dimacs(&self) -> String {
        let order: Vec<String> = self.ordering.sequence().iter().map(|p| (p + 1).to_string()).collect();
        let mut comments = vec![format!("directional extension along {}", order.join(" "))];
        if !self.satisfiable {
            comments.push("unsatisfiable: empty resolvent derived".to_string());
        }
        write_cnf(&self.theory(), &comments)
    }
}

/// Processes buckets from the last position down. A bucket holding a unit
/// clause performs only unit resolution; otherwise every opposing pair is
/// resolved. Resolvents go to the bucket of their highest proposition;
/// tautologies are dropped and duplicates merged. An empty resolvent makes
/// the extension empty and unsatisfiable.
pub fn directional_resolution(cnf: &CnfTheory, d: &Ordering) -> Result<DirectionalExtension> {
    let n = cnf.num_props();
    if d.len() != n {
        return Err(Error::ordering(format!(
            "ordering covers {} propositions, theory has {n}",
            d.len()
        )));
    }
    let unsat = |d: &Ordering| DirectionalExtension {
        ordering: d.clone(),
        buckets: vec![BTreeSet::new(); n],
        satisfiable: false,
    };
    let home = |c: &Clause| c.props().map(|p| d.position(p)).max();
    let mut buckets = vec![BTreeSet::new(); n];
    for c in cnf.clauses() {
        match home(c) {
            Some(pos) => {
                buckets[pos].insert(c.clone());
            }
            None => return Ok(unsat(d)),
        }
    }
    for pos in (0..n).rev() {
        let prop = d.at(pos);
        let (positive, negative): (Vec<&Clause>, Vec<&Clause>) =
            buckets[pos].iter().partition(|c| c.polarity(prop) == Some(true));
        let units: Vec<&Clause> = buckets[pos].iter().filter(|c| c.is_unit()).collect();
        let mut resolvents = Vec::new();
        if units.is_empty() {
            for p in &positive {
                for q in &negative {
                    resolvents.extend(p.resolve(q, prop));
                }
            }
        } else {
            for u in units {
                let opposing = if u.polarity(prop) == Some(true) {
                    &negative
                } else {
                    &positive
                };
                for other in opposing {
                    let (p, q) = if u.polarity(prop) == Some(true) {
                        (u, *other)
                    } else {
                        (*other, u)
                    };
                    resolvents.extend(p.resolve(q, prop));
                }
            }
        }
        for r in resolvents {
            match home(&r) {
                Some(target) => {
                    debug_assert!(target < pos);
                    buckets[target].insert(r);
                }
                None => return Ok(unsat(d)),
            }
        }
    }
    Ok(DirectionalExtension {
        ordering: d.clone(),
        buckets,
        satisfiable: true,
    })
}

/// Assigns propositions from first position to last, trying false before
/// true, so each value satisfies its bucket given the earlier values. Result
/// is indexed by zero-based proposition.
pub fn generate_model(ext: &DirectionalExtension) -> Result<Vec<bool>> {
    if !ext.satisfiable {
        return Err(Error::Unsatisfiable);
    }
    let n = ext.num_props();
    let mut assignment = vec![false; n];
    for pos in 0..n {
        let prop = ext.ordering.at(pos);
        let fits = |value: bool, assignment: &mut Vec<bool>| {
            assignment[prop] = value;
            ext.buckets[pos].iter().all(|c| c.satisfied_by(assignment))
        };
        if !fits(false, &mut assignment) && !fits(true, &mut assignment) {
            return Err(Error::DeadEnd(prop));
        }
    }
    Ok(assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::{induced_width, interaction_graph};
    use crate::model::parse_cnf;
    use proptest::prelude::*;

    fn theory(text: &str) -> CnfTheory {
        parse_cnf(text).unwrap().model
    }

    fn models(t: &CnfTheory) -> Vec<u32> {
        (0..1u32 << t.num_props())
            .filter(|m| {
                let a: Vec<bool> = (0..t.num_props()).map(|i| m & (1 << i) != 0).collect();
                t.satisfied_by(&a)
            })
            .collect()
    }

    #[test]
    fn contradictory_units() {
        let ext = directional_resolution(&theory("p cnf 1 2\n1 0\n-1 0\n"), &Ordering::identity(1)).unwrap();
        assert!(!ext.is_satisfiable());
        assert_eq!(ext.clause_count(), 0);
        assert_eq!(generate_model(&ext), Err(Error::Unsatisfiable));
    }

    #[test]
    fn no_opposing_pairs() {
        let t = theory("p cnf 3 2\n1 2 0\n-2 3 0\n");
        let ext = directional_resolution(&t, &Ordering::identity(3)).unwrap();
        assert!(ext.is_satisfiable());
        assert_eq!(ext.clause_count(), 2);
        assert_eq!(ext.bucket_of(2).len(), 1);
        assert_eq!(ext.bucket_of(1).len(), 1);
    }

    #[test]
    fn chained_resolution() {
        let t = theory("p cnf 3 3\n1 3 0\n-3 2 0\n-3 -2 0\n");
        let ext = directional_resolution(&t, &Ordering::identity(3)).unwrap();
        assert!(ext.is_satisfiable());
        let b2: Vec<&Clause> = ext.bucket_of(1).iter().collect();
        assert_eq!(
            b2,
            vec![&Clause::new(vec![1, -2]).unwrap(), &Clause::new(vec![1, 2]).unwrap()]
        );
        assert!(ext.bucket_of(0).contains(&Clause::new(vec![1]).unwrap()));
        assert_eq!(models(&ext.theory()), models(&t));
        let m = generate_model(&ext).unwrap();
        assert!(t.satisfied_by(&m));
    }

    #[test]
    fn empty_theory_defaults_false() {
        let ext = directional_resolution(&theory("p cnf 2 0\n"), &Ordering::identity(2)).unwrap();
        assert_eq!(generate_model(&ext).unwrap(), vec![false, false]);
        let ext = directional_resolution(&theory("p cnf 1 1\n1 0\n"), &Ordering::identity(1)).unwrap();
        assert_eq!(generate_model(&ext).unwrap(), vec![true]);
    }

    #[test]
    fn dimacs_output_names_ordering() {
        let t = theory("p cnf 2 1\n1 -2 0\n");
        let ext = directional_resolution(&t, &Ordering::new(vec![1, 0]).unwrap()).unwrap();
        assert_eq!(
            ext.to_dimacs(),
            "c directional extension along 2 1\np cnf 2 1\n1 -2 0\n"
        );
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn extension_is_equivalent_and_backtrack_free(seed in any::<u64>(), props in 1usize..8, clauses in 0usize..20) {
            let mut rng = fixtures::rng(seed);
            let t = fixtures::random_3cnf(&mut rng, props, clauses);
            let d = fixtures::random_ordering(&mut rng, props, &[]);
            let ext = directional_resolution(&t, &d).unwrap();
            prop_assert_eq!(ext.is_satisfiable(), !models(&t).is_empty());
            if ext.is_satisfiable() {
                prop_assert_eq!(models(&ext.theory()), models(&t));
                let m = generate_model(&ext).unwrap();
                prop_assert!(t.satisfied_by(&m));
                let w = induced_width(&interaction_graph(&t), &d).induced_width;
                prop_assert!(ext.max_bucket_scope() <= w + 1);
            }
        }
    }
}
