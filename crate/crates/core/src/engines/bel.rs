use crate::bucket::partition;
use crate::error::{Error, Result};
use crate::factor::{DiscreteFactor, Elimination};
use crate::graph::Ordering;
use crate::model::{BeliefNetwork, Evidence};

use super::{check_ordering, check_variables, QueryKind, QueryResult};

/// Posterior of `query` given the evidence. `query` must be first in `d`.
pub fn elim_bel(net: &BeliefNetwork, query: usize, evidence: &Evidence, d: &Ordering) -> Result<QueryResult> {
    check_ordering(net.len(), d)?;
    check_variables(net.len(), &[query], "query")?;
    if d.at(0) != query {
        return Err(Error::ordering(format!(
            "query variable {} must be first in the ordering",
            net.variable(query).name
        )));
    }
    let cards = net.cardinalities();
    let mut schedule = partition(net.factors(), d, evidence, &cards)?;
    for pos in (1..net.len()).rev() {
        schedule.process_bucket(pos, Elimination::Sum)?;
    }
    let mut result = QueryResult::new(QueryKind::Belief);
    result.query = Some(query);
    let (belief, mass) = match evidence.get(query) {
        Some(x) => {
            schedule.process_bucket(0, Elimination::Sum)?;
            let mass = schedule.constant();
            if mass == 0.0 {
                return Err(Error::ImpossibleEvidence);
            }
            let mut point = vec![0.0; cards[query]];
            point[x] = 1.0;
            result.notes.push(format!("{} is observed", net.variable(query).name));
            (point, mass)
        }
        None => {
            let first = schedule.bucket(0);
            let own = DiscreteFactor::constant(vec![query], vec![cards[query]], schedule.constant())?;
            let mut refs: Vec<&DiscreteFactor> = first.factors.iter().collect();
            refs.push(&own);
            let (normalized, mass) = DiscreteFactor::multiply(&refs)?.normalize()?;
            (normalized.values().to_vec(), mass)
        }
    };
    result.belief = Some(belief);
    result.evidence_mass = Some(mass);
    Ok(result.with_schedule(schedule))
}
