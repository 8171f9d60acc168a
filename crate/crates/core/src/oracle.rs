//! Reference answers by exhaustive enumeration of the joint space.
//!
//! Maximizing queries break ties the way the engines do: among tuples whose
//! values agree to a relative 1e-12, the lexicographically smallest one wins,
//! where the lexicographic order follows ordering positions.

use crate::engines::{QueryKind, QueryResult, QueryStats};
use crate::error::{Error, Result};
use crate::graph::Ordering;
use crate::model::{BeliefNetwork, CnfTheory, Evidence, InfluenceDiagram};

/// Largest joint table enumerated.
pub const JOINT_LIMIT: u128 = 1 << 20;

const TIE_TOLERANCE: f64 = 1e-12;

fn check_size(cards: &[usize]) -> Result<()> {
    let cells: u128 = cards.iter().map(|&c| c as u128).product();
    if cells > JOINT_LIMIT {
        return Err(Error::TooLarge {
            cells,
            limit: JOINT_LIMIT,
        });
    }
    Ok(())
}

/// Calls `f` with every assignment to `vars`, the first variable most
/// significant. The slice handed to `f` is indexed by variable id; entries
/// outside `vars` keep the values in `base`.
fn enumerate(vars: &[usize], cards: &[usize], base: &[usize], mut f: impl FnMut(&[usize])) {
    let mut x = base.to_vec();
    for &v in vars {
        x[v] = 0;
    }
    loop {
        f(&x);
        let mut k = vars.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            let v = vars[k];
            x[v] += 1;
            if x[v] < cards[v] {
                break;
            }
            x[v] = 0;
        }
    }
}

fn strictly_better(candidate: f64, best: f64) -> bool {
    if best == f64::NEG_INFINITY {
        return candidate > best;
    }
    candidate - best > TIE_TOLERANCE * best.abs().max(candidate.abs())
}

/// The joint distribution as a dense table over variable ids, last id
/// fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    cards: Vec<usize>,
    values: Vec<f64>,
}

impl JointTable {
    pub fn new(net: &BeliefNetwork) -> Result<Self> {
        let cards = net.cardinalities();
        check_size(&cards)?;
        let all: Vec<usize> = (0..net.len()).collect();
        let mut values = Vec::new();
        enumerate(&all, &cards, &vec![0; cards.len()], |x| {
            values.push(net.joint_probability(x))
        });
        Ok(JointTable { cards, values })
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn total(&self) -> f64 {
        self.values.iter().sum()
    }
}

fn result(kind: QueryKind) -> QueryResult {
    QueryResult {
        kind,
        query: None,
        belief: None,
        assignment: Vec::new(),
        value: None,
        evidence_mass: None,
        notes: vec!["oracle".to_string()],
        stats: QueryStats::default(),
        trace: Vec::new(),
        iterations: Vec::new(),
    }
}

fn sorted_pairs(vars: &[usize], x: &[usize]) -> Vec<(usize, usize)> {
    let mut pairs: Vec<(usize, usize)> = vars.iter().map(|&v| (v, x[v])).collect();
    pairs.sort_unstable();
    pairs
}

/// `P(query | e)` by summing the joint.
pub fn oracle_bel(net: &BeliefNetwork, query: usize, evidence: &Evidence) -> Result<QueryResult> {
    let cards = net.cardinalities();
    check_size(&cards)?;
    let all: Vec<usize> = (0..net.len()).collect();
    let mut marginal = vec![0.0; cards[query]];
    enumerate(&all, &cards, &vec![0; net.len()], |x| {
        if evidence.agrees_with(x) {
            marginal[x[query]] += net.joint_probability(x);
        }
    });
    let mass: f64 = marginal.iter().sum();
    if mass == 0.0 {
        return Err(Error::ImpossibleEvidence);
    }
    let mut r = result(QueryKind::Belief);
    r.query = Some(query);
    r.belief = Some(marginal.iter().map(|p| p / mass).collect());
    r.evidence_mass = Some(mass);
    Ok(r)
}

/// `max_x P(x, e)`; ties resolved along `d`.
pub fn oracle_mpe(net: &BeliefNetwork, evidence: &Evidence, d: &Ordering) -> Result<QueryResult> {
    let cards = net.cardinalities();
    check_size(&cards)?;
    let mut best = f64::NEG_INFINITY;
    let mut arg = vec![0; net.len()];
    enumerate(d.sequence(), &cards, &vec![0; net.len()], |x| {
        if evidence.agrees_with(x) {
            let p = net.joint_probability(x);
            if strictly_better(p, best) {
                best = p;
                arg.copy_from_slice(x);
            }
        }
    });
    if best <= 0.0 {
        return Err(Error::ImpossibleEvidence);
    }
    let mut r = result(QueryKind::Mpe);
    r.value = Some(best);
    r.assignment = arg.into_iter().enumerate().collect();
    Ok(r)
}

/// `max_a sum_y P(a, y, e)` over hypothesis tuples; ties resolved by the
/// positions of `hyp` in `d`.
pub fn oracle_map(net: &BeliefNetwork, hyp: &[usize], evidence: &Evidence, d: &Ordering) -> Result<QueryResult> {
    let cards = net.cardinalities();
    check_size(&cards)?;
    let mut hyp_order = hyp.to_vec();
    hyp_order.sort_by_key(|&v| d.position(v));
    let rest: Vec<usize> = (0..net.len()).filter(|v| !hyp.contains(v)).collect();
    let mut best = f64::NEG_INFINITY;
    let mut arg = vec![0; net.len()];
    enumerate(&hyp_order, &cards, &vec![0; net.len()], |a| {
        let mut total = 0.0;
        enumerate(&rest, &cards, a, |x| {
            if evidence.agrees_with(x) {
                total += net.joint_probability(x);
            }
        });
        if total > 0.0 && strictly_better(total, best) {
            best = total;
            arg.copy_from_slice(a);
        }
    });
    if best <= 0.0 {
        return Err(Error::ImpossibleEvidence);
    }
    let mut r = result(QueryKind::Map);
    r.value = Some(best);
    r.assignment = sorted_pairs(hyp, &arg);
    Ok(r)
}

/// `max_d E[u | e, d]` over decision tuples whose evidence probability is
/// positive; ties resolved by decision positions in `d`. `evidence_mass` is
/// `P(e | d°)`.
pub fn oracle_meu(id: &InfluenceDiagram, evidence: &Evidence, d: &Ordering) -> Result<QueryResult> {
    let net = id.network();
    let cards = net.cardinalities();
    check_size(&cards)?;
    let mut decisions = id.decisions().to_vec();
    decisions.sort_by_key(|&v| d.position(v));
    let chance: Vec<usize> = (0..net.len()).filter(|v| !id.is_decision(*v)).collect();
    let mut best = f64::NEG_INFINITY;
    let mut best_mass = 0.0;
    let mut arg = vec![0; net.len()];
    enumerate(&decisions, &cards, &vec![0; net.len()], |dx| {
        if decisions.iter().any(|&v| evidence.get(v).is_some_and(|e| e != dx[v])) {
            return;
        }
        let (mut mass, mut weighted) = (0.0, 0.0);
        enumerate(&chance, &cards, dx, |x| {
            if evidence.agrees_with(x) {
                let p = net.joint_probability(x);
                mass += p;
                weighted += p * id.utility(x);
            }
        });
        if mass == 0.0 {
            return;
        }
        let eu = weighted / mass;
        if strictly_better(eu, best) {
            best = eu;
            best_mass = mass;
            arg.copy_from_slice(dx);
        }
    });
    if best == f64::NEG_INFINITY {
        return Err(Error::ImpossibleEvidence);
    }
    let mut r = result(QueryKind::Meu);
    r.value = Some(best);
    r.evidence_mass = Some(best_mass);
    r.assignment = sorted_pairs(id.decisions(), &arg);
    Ok(r)
}

/// Every model of the theory, as bit masks with proposition `i` at bit `i`.
pub fn oracle_models(cnf: &CnfTheory) -> Result<Vec<u64>> {
    let n = cnf.num_props();
    check_size(&vec![2; n])?;
    let mut out = Vec::new();
    let mut a = vec![false; n];
    for mask in 0..1u64 << n {
        for (i, bit) in a.iter_mut().enumerate() {
            *bit = mask & (1 << i) != 0;
        }
        if cnf.satisfied_by(&a) {
            out.push(mask);
        }
    }
    Ok(out)
}

/// Some model of the theory by truth table, or `None`.
pub fn oracle_sat(cnf: &CnfTheory) -> Result<Option<Vec<bool>>> {
    let n = cnf.num_props();
    Ok(oracle_models(cnf)?
        .first()
        .map(|&m| (0..n).map(|i| m & (1 << i) != 0).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, NetworkShape};

    #[test]
    fn joint_sums_to_one() {
        let mut rng = fixtures::rng(1);
        let net = fixtures::random_network(
            &mut rng,
            NetworkShape {
                variables: 6,
                max_cardinality: 3,
                max_parents: 3,
            },
        );
        let j = JointTable::new(&net).unwrap();
        assert!((j.total() - 1.0).abs() < 1e-9);
        let b = oracle_bel(&net, 2, &Evidence::empty()).unwrap().belief.unwrap();
        assert!((b.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mpe_below_map_below_one() {
        let net = fixtures::figure2_network(2);
        let d = Ordering::identity(6);
        let mpe = oracle_mpe(&net, &Evidence::empty(), &d).unwrap().value.unwrap();
        let map = oracle_map(&net, &[0, 1], &Evidence::empty(), &d)
            .unwrap()
            .value
            .unwrap();
        assert!(mpe <= map && map <= 1.0);
    }

    #[test]
    fn guard_rejects_large_joints() {
        let mut rng = fixtures::rng(3);
        let net = fixtures::random_tree_network(&mut rng, 21, 2);
        assert!(matches!(JointTable::new(&net), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn tie_goes_to_first_in_order() {
        let net = {
            use crate::factor::DiscreteFactor;
            use crate::model::Variable;
            let vars = (0..2).map(|i| Variable::new(i, Variable::default_name(i), 2)).collect();
            let cpts = (0..2)
                .map(|i| DiscreteFactor::new(vec![i], vec![2], vec![0.5, 0.5]).unwrap())
                .collect();
            BeliefNetwork::new(vars, vec![vec![], vec![]], cpts).unwrap()
        };
        let r = oracle_mpe(&net, &Evidence::empty(), &Ordering::new(vec![1, 0]).unwrap()).unwrap();
        assert_eq!(r.assignment, vec![(0, 0), (1, 0)]);
    }

    #[test]
    fn sat_by_truth_table() {
        let t = crate::model::parse_cnf("p cnf 2 2\n1 0\n-1 2 0\n").unwrap().model;
        assert_eq!(oracle_sat(&t).unwrap(), Some(vec![true, true]));
        let u = crate::model::parse_cnf("p cnf 1 2\n1 0\n-1 0\n").unwrap().model;
        assert_eq!(oracle_sat(&u).unwrap(), None);
    }
}
