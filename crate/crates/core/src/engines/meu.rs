use crate::bucket::BucketSchedule;
use crate::error::{Error, Result};
use crate::graph::Ordering;
use crate::model::{Evidence, InfluenceDiagram};

use super::{check_ordering, QueryKind, QueryResult};

/// Maximum expected utility over the root decisions, which must occupy the
/// first positions of `d`.
///
/// With evidence the value is `max_d E[u | e, d]`; decisions under which the
/// evidence has probability zero are never chosen. Without evidence this is
/// `max_d sum_x P(x | d) u(x, d)`. `evidence_mass` is `P(e | d°)`.
pub fn elim_meu(id: &InfluenceDiagram, evidence: &Evidence, d: &Ordering) -> Result<QueryResult> {
    let net = id.network();
    check_ordering(net.len(), d)?;
    let k = id.decisions().len();
    if !d.starts_with_set(id.decisions()) {
        return Err(Error::ordering("decision variables must precede every chance variable"));
    }
    let mut schedule = BucketSchedule::partition(
        net.factors(),
        id.utilities().to_vec(),
        d,
        evidence,
        &net.cardinalities(),
    )?;
    for pos in (k..net.len()).rev() {
        schedule.process_expectation_bucket(pos)?;
    }
    for pos in (0..k).rev() {
        schedule.process_decision_bucket(pos)?;
    }
    let value = schedule.utility_constant();
    if schedule.constant() == 0.0 || value == f64::NEG_INFINITY {
        return Err(Error::ImpossibleEvidence);
    }
    let decoded = schedule.forward_decode(id.decisions())?;
    let mut full = vec![0usize; net.len()];
    for (v, x) in decoded.iter().enumerate() {
        full[v] = x.unwrap_or(0);
    }
    let mass = schedule.constant()
        * schedule
            .decision_weights()
            .iter()
            .map(|w| w.value_at(&full))
            .product::<f64>();
    let mut result = QueryResult::new(QueryKind::Meu);
    let mut decisions = id.decisions().to_vec();
    decisions.sort_unstable();
    result.assignment = decisions
        .into_iter()
        .map(|v| (v, decoded[v].expect("decision decoded")))
        .collect();
    result.value = Some(value);
    result.evidence_mass = Some(mass);
    Ok(result.with_schedule(schedule))
}
