use serde::Serialize;

use crate::bucket::TraceEntry;
use crate::error::{Error, Result};
use crate::graph::Ordering;
use crate::model::{BeliefNetwork, Evidence};

use super::{check_ordering, check_variables, max_pass, QueryKind, QueryResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CondOptions {
    /// Worker threads for the loop over cutset assignments.
    pub parallel: usize,
}

impl Default for CondOptions {
    fn default() -> Self {
        CondOptions { parallel: 1 }
    }
}

/// One backward pass under a fixed cutset assignment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CondIteration {
    pub cutset: Vec<(usize, usize)>,
    /// Zero when the assignment contradicts the network.
    pub value: f64,
    pub max_recorded_scope: usize,
    #[serde(skip)]
    pub trace: Vec<TraceEntry>,
}

struct Outcome {
    iteration: CondIteration,
    assignment: Vec<usize>,
}

/// Cutset assignments in lexicographic order over the ascending ids of `cutset`,
/// observed members pinned to their evidence value.
fn assignments(cutset: &[usize], cards: &[usize], evidence: &Evidence) -> Vec<Vec<(usize, usize)>> {
    let mut out = vec![Vec::new()];
    for &c in cutset {
        let values: Vec<usize> = match evidence.get(c) {
            Some(x) => vec![x],
            None => (0..cards[c]).collect(),
        };
        out = out
            .into_iter()
            .flat_map(|prefix| {
                values.iter().map(move |&x| {
                    let mut next = prefix.clone();
                    next.push((c, x));
                    next
                })
            })
            .collect();
    }
    out
}

fn run_one(net: &BeliefNetwork, evidence: &Evidence, d: &Ordering, cutset: Vec<(usize, usize)>) -> Result<Outcome> {
    let mut ev = evidence.clone();
    for &(c, x) in &cutset {
        ev.extend_consistent(c, x);
    }
    let (value, assignment, schedule) = max_pass(net, &ev, d)?;
    Ok(Outcome {
        iteration: CondIteration {
            cutset,
            value,
            max_recorded_scope: schedule.max_recorded_scope(),
            trace: schedule.into_trace(),
        },
        assignment,
    })
}

/// MPE by conditioning: one max pass per assignment of `cutset`, each with
/// the assignment added as evidence. The first maximum in lexicographic
/// assignment order wins, whatever the number of workers.
pub fn elim_cond_max(
    net: &BeliefNetwork,
    cutset: &[usize],
    evidence: &Evidence,
    d: &Ordering,
    opts: &CondOptions,
) -> Result<QueryResult> {
    check_ordering(net.len(), d)?;
    check_variables(net.len(), cutset, "cutset")?;
    let mut sorted = cutset.to_vec();
    sorted.sort_unstable();
    let jobs = assignments(&sorted, &net.cardinalities(), evidence);
    let workers = opts.parallel.clamp(1, jobs.len().max(1));

    let outcomes: Vec<Outcome> = if workers == 1 {
        jobs.into_iter()
            .map(|job| run_one(net, evidence, d, job))
            .collect::<Result<_>>()?
    } else {
        let mut slots: Vec<Option<Result<Outcome>>> = (0..jobs.len()).map(|_| None).collect();
        std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let jobs = &jobs;
                    scope.spawn(move || {
                        (w..jobs.len())
                            .step_by(workers)
                            .map(|i| (i, run_one(net, evidence, d, jobs[i].clone())))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            for h in handles {
                for (i, r) in h.join().expect("conditioning worker panicked") {
                    slots[i] = Some(r);
                }
            }
        });
        slots
            .into_iter()
            .map(|s| s.expect("every assignment evaluated"))
            .collect::<Result<_>>()?
    };

    let mut best: Option<usize> = None;
    for (i, o) in outcomes.iter().enumerate() {
        if best.is_none_or(|b| o.iteration.value > outcomes[b].iteration.value) {
            best = Some(i);
        }
    }
    let best = best.expect("at least one cutset assignment");
    if outcomes[best].iteration.value == 0.0 {
        return Err(Error::ImpossibleEvidence);
    }
    let mut result = QueryResult::new(QueryKind::CondMpe);
    result.value = Some(outcomes[best].iteration.value);
    result.assignment = outcomes[best].assignment.iter().copied().enumerate().collect();
    result.stats.iterations = outcomes.len();
    result.stats.max_recorded_scope = outcomes
        .iter()
        .map(|o| o.iteration.max_recorded_scope)
        .max()
        .unwrap_or(0);
    result.stats.recorded_entries = outcomes
        .iter()
        .flat_map(|o| o.iteration.trace.iter().map(|t| t.table_size))
        .sum();
    result.iterations = outcomes.into_iter().map(|o| o.iteration).collect();
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engines::elim_max;
    use crate::fixtures;

    #[test]
    fn lexicographic_assignments() {
        let a = assignments(&[0, 2], &[2, 2, 3], &Evidence::empty());
        assert_eq!(a.len(), 6);
        assert_eq!(a[0], vec![(0, 0), (2, 0)]);
        assert_eq!(a[1], vec![(0, 0), (2, 1)]);
        assert_eq!(a[5], vec![(0, 1), (2, 2)]);
        let ev = Evidence::new(&[(2, 1)], &[2, 2, 3]).unwrap();
        assert_eq!(assignments(&[0, 2], &[2, 2, 3], &ev).len(), 2);
        assert_eq!(assignments(&[], &[2], &Evidence::empty()), vec![Vec::new()]);
    }

    #[test]
    fn empty_cutset_is_plain_mpe() {
        let net = fixtures::figure2_network(8);
        let d = Ordering::identity(6);
        let c = elim_cond_max(&net, &[], &Evidence::empty(), &d, &CondOptions::default()).unwrap();
        let m = elim_max(&net, &Evidence::empty(), &d).unwrap();
        assert_eq!(c.value, m.value);
        assert_eq!(c.assignment, m.assignment);
        assert_eq!(c.stats.iterations, 1);
    }

    #[test]
    fn conditioning_on_b_matches_and_parallel_agrees() {
        let net = fixtures::figure2_network(9);
        let d = Ordering::new(vec![0, 2, 1, 4, 3, 5]).unwrap();
        let m = elim_max(&net, &Evidence::empty(), &d).unwrap();
        let one = elim_cond_max(&net, &[1], &Evidence::empty(), &d, &CondOptions { parallel: 1 }).unwrap();
        let four = elim_cond_max(&net, &[1], &Evidence::empty(), &d, &CondOptions { parallel: 4 }).unwrap();
        assert!((one.value.unwrap() - m.value.unwrap()).abs() <= 1e-12 * m.value.unwrap());
        assert_eq!(one.stats.iterations, 2);
        assert_eq!(one, four);
    }

    #[test]
    fn full_cutset() {
        let net = fixtures::figure2_network(10);
        let d = Ordering::identity(6);
        let all: Vec<usize> = (0..6).collect();
        let c = elim_cond_max(&net, &all, &Evidence::empty(), &d, &CondOptions { parallel: 3 }).unwrap();
        assert_eq!(c.stats.iterations, 64);
        assert_eq!(c.stats.max_recorded_scope, 0);
        let m = elim_max(&net, &Evidence::empty(), &d).unwrap();
        assert_eq!(c.assignment, m.assignment);
    }
}
