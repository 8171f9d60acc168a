use crate::bucket::partition;
use crate::error::{Error, Result};
use crate::factor::Elimination;
use crate::graph::Ordering;
use crate::model::{BeliefNetwork, Evidence};

use super::{check_ordering, check_variables, max_pass, sweep, QueryKind, QueryResult};

/// Most probable explanation: `max_x P(x, e)` and a maximizing tuple.
pub fn elim_max(net: &BeliefNetwork, evidence: &Evidence, d: &Ordering) -> Result<QueryResult> {
    let (value, assignment, schedule) = max_pass(net, evidence, d)?;
    if value == 0.0 {
        return Err(Error::ImpossibleEvidence);
    }
    let mut result = QueryResult::new(QueryKind::Mpe);
    result.value = Some(value);
    result.assignment = assignment.into_iter().enumerate().collect();
    Ok(result.with_schedule(schedule))
}

/// Maximum a posteriori hypothesis over `hyp`:
/// `max_a sum_{rest} P(a, rest, e)`. The hypothesis variables must occupy
/// the first positions of `d`.
pub fn elim_map(net: &BeliefNetwork, hyp: &[usize], evidence: &Evidence, d: &Ordering) -> Result<QueryResult> {
    check_ordering(net.len(), d)?;
    check_variables(net.len(), hyp, "hypothesis")?;
    if !d.starts_with_set(hyp) {
        return Err(Error::ordering(
            "hypothesis variables must precede every other variable",
        ));
    }
    let k = hyp.len();
    let mut schedule = partition(net.factors(), d, evidence, &net.cardinalities())?;
    sweep(
        &mut schedule,
        |pos| if pos < k { Elimination::Max } else { Elimination::Sum },
    )?;
    let value = schedule.constant();
    if value == 0.0 {
        return Err(Error::ImpossibleEvidence);
    }
    let decoded = schedule.forward_decode(hyp)?;
    let mut result = QueryResult::new(QueryKind::Map);
    let mut sorted = hyp.to_vec();
    sorted.sort_unstable();
    for v in sorted {
        if evidence.contains(v) {
            result
                .notes
                .push(format!("hypothesis variable {} is observed", net.variable(v).name));
        }
        result.assignment.push((v, decoded[v].expect("hypothesis decoded")));
    }
    result.value = Some(value);
    Ok(result.with_schedule(schedule))
}
