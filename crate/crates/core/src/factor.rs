//! Dense real-valued tables over discrete scopes.
//!
//! A [`DiscreteFactor`] stores its scope in ascending variable-id order and its
//! values in row-major order over that scope (the last scope variable varies
//! fastest). Empty scopes are scalars with exactly one entry.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Elimination operator applied when a variable is removed from a factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Elimination {
    Sum,
    Max,
}

impl fmt::Display for Elimination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elimination::Sum => write!(f, "sum"),
            Elimination::Max => write!(f, "max"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteFactor {
    scope: Vec<usize>,
    cards: Vec<usize>,
    values: Vec<f64>,
}

/// Maximizing value of one eliminated variable for every configuration of the
/// remaining scope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArgTable {
    eliminated: usize,
    scope: Vec<usize>,
    cards: Vec<usize>,
    choices: Vec<usize>,
}

/// Relative gap below which two maximized values are treated as equal.
pub const TIE_TOLERANCE: f64 = 1e-12;

fn strictly_better(candidate: f64, best: f64) -> bool {
    if best == f64::NEG_INFINITY || candidate == f64::NEG_INFINITY {
        return candidate > best;
    }
    candidate - best > TIE_TOLERANCE * best.abs().max(candidate.abs())
}

fn strides(cards: &[usize]) -> Vec<usize> {
    let mut out = vec![1; cards.len()];
    for i in (0..cards.len().saturating_sub(1)).rev() {
        out[i] = out[i + 1] * cards[i + 1];
    }
    out
}

fn table_len(cards: &[usize]) -> usize {
    cards.iter().product()
}

impl DiscreteFactor {
    /// Builds a factor whose scope is already in ascending id order.
    pub fn new(scope: Vec<usize>, cards: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if scope.len() != cards.len() {
            return Err(Error::factor("scope and cardinality lists differ in length"));
        }
        if scope.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::factor(format!("scope {scope:?} must be strictly ascending")));
        }
        if cards.contains(&0) {
            return Err(Error::factor("cardinality must be at least 1"));
        }
        if values.len() != table_len(&cards) {
            return Err(Error::factor(format!(
                "expected {} values for scope {:?}, got {}",
                table_len(&cards),
                scope,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::factor("factor values must be finite"));
        }
        Ok(DiscreteFactor { scope, cards, values })
    }

    /// Builds a factor from a table laid out row-major over `order`, which may
    /// list the variables in any order. The result is stored canonically.
    pub fn from_ordered(order: &[usize], order_cards: &[usize], values: Vec<f64>) -> Result<Self> {
        if order.len() != order_cards.len() {
            return Err(Error::factor("scope and cardinality lists differ in length"));
        }
        let mut perm: Vec<usize> = (0..order.len()).collect();
        perm.sort_by_key(|&i| order[i]);
        let scope: Vec<usize> = perm.iter().map(|&i| order[i]).collect();
        if scope.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::factor(format!("duplicate variable in scope {order:?}")));
        }
        let cards: Vec<usize> = perm.iter().map(|&i| order_cards[i]).collect();
        if values.len() != table_len(order_cards) {
            return Err(Error::factor(format!(
                "expected {} values for scope {:?}, got {}",
                table_len(order_cards),
                order,
                values.len()
            )));
        }
        let src_strides = strides(order_cards);
        // stride in the source layout for each canonical position
        let mapped: Vec<usize> = perm.iter().map(|&i| src_strides[i]).collect();
        let canon = odometer_gather(&cards, &[&mapped], |offs| values[offs[0]]);
        DiscreteFactor::new(scope, cards, canon)
    }

    pub fn scalar(value: f64) -> Self {
        DiscreteFactor {
            scope: Vec::new(),
            cards: Vec::new(),
            values: vec![value],
        }
    }

    /// Skips validation; values may be infinite.
    pub(crate) fn new_unchecked(scope: Vec<usize>, cards: Vec<usize>, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), table_len(&cards));
        DiscreteFactor { scope, cards, values }
    }

    pub fn constant(scope: Vec<usize>, cards: Vec<usize>, value: f64) -> Result<Self> {
        let len = table_len(&cards);
        DiscreteFactor::new(scope, cards, vec![value; len])
    }

    pub fn scope(&self) -> &[usize] {
        &self.scope
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_scalar(&self) -> bool {
        self.scope.is_empty()
    }

    /// The single entry of a scalar factor.
    pub fn scalar_value(&self) -> Option<f64> {
        self.is_scalar().then(|| self.values[0])
    }

    pub fn contains(&self, var: usize) -> bool {
        self.scope.binary_search(&var).is_ok()
    }

    pub fn cardinality_of(&self, var: usize) -> Option<usize> {
        self.scope.binary_search(&var).ok().map(|i| self.cards[i])
    }

    /// Entry at a full assignment indexed by variable id.
    pub fn value_at(&self, assignment: &[usize]) -> f64 {
        let mut idx = 0;
        for (&v, &c) in self.scope.iter().zip(&self.cards) {
            idx = idx * c + assignment[v];
        }
        self.values[idx]
    }

    /// Values laid out row-major over `order`, a permutation of the scope.
    pub fn values_in_order(&self, order: &[usize]) -> Result<Vec<f64>> {
        let mut sorted = order.to_vec();
        sorted.sort_unstable();
        if sorted != self.scope {
            return Err(Error::factor(format!(
                "{order:?} is not a permutation of scope {:?}",
                self.scope
            )));
        }
        let own = strides(&self.cards);
        let order_cards: Vec<usize> = order.iter().map(|v| self.cardinality_of(*v).unwrap()).collect();
        let mapped: Vec<usize> = order
            .iter()
            .map(|v| own[self.scope.binary_search(v).unwrap()])
            .collect();
        Ok(odometer_gather(&order_cards, &[&mapped], |offs| self.values[offs[0]]))
    }

    /// Pointwise product over the union of scopes.
    pub fn multiply(factors: &[&DiscreteFactor]) -> Result<DiscreteFactor> {
        combine(factors, 1.0, |a, b| a * b)
    }

    /// Pointwise sum over the union of scopes.
    pub fn add(factors: &[&DiscreteFactor]) -> Result<DiscreteFactor> {
        combine(factors, 0.0, |a, b| a + b)
    }

    pub fn product(&self, other: &DiscreteFactor) -> Result<DiscreteFactor> {
        DiscreteFactor::multiply(&[self, other])
    }

    /// Divides by `denominator`, whose scope must be contained in this one.
    /// Cells with a zero denominator become zero.
    pub fn divide_or_zero(&self, denominator: &DiscreteFactor) -> Result<DiscreteFactor> {
        if let Some(v) = denominator.scope.iter().find(|v| !self.contains(**v)) {
            return Err(Error::factor(format!(
                "denominator variable {v} is not in numerator scope"
            )));
        }
        combine(&[self, denominator], f64::NAN, |a, b| {
            if a.is_nan() {
                b
            } else if b == 0.0 {
                0.0
            } else {
                a / b
            }
        })
    }

    pub fn scale(&self, by: f64) -> DiscreteFactor {
        DiscreteFactor {
            scope: self.scope.clone(),
            cards: self.cards.clone(),
            values: self.values.iter().map(|v| v * by).collect(),
        }
    }

    /// Removes `var` by summation or maximization. Maximization also returns
    /// the maximizing value per output cell; values within a relative
    /// [`TIE_TOLERANCE`] count as ties, which go to the lowest index.
    pub fn eliminate(&self, var: usize, op: Elimination) -> Result<(DiscreteFactor, Option<ArgTable>)> {
        let k = self
            .scope
            .binary_search(&var)
            .map_err(|_| Error::factor(format!("variable {var} not in scope {:?}", self.scope)))?;
        let card = self.cards[k];
        let outer: usize = self.cards[..k].iter().product();
        let inner: usize = self.cards[k + 1..].iter().product();
        let mut out = Vec::with_capacity(outer * inner);
        let mut choices = Vec::with_capacity(if op == Elimination::Max { outer * inner } else { 0 });
        for o in 0..outer {
            for i in 0..inner {
                let at = |x: usize| self.values[(o * card + x) * inner + i];
                match op {
                    Elimination::Sum => out.push((0..card).map(at).sum()),
                    Elimination::Max => {
                        let mut best = 0;
                        let mut best_v = at(0);
                        let mut top = best_v;
                        for x in 1..card {
                            let v = at(x);
                            top = top.max(v);
                            if strictly_better(v, best_v) {
                                best = x;
                                best_v = v;
                            }
                        }
                        out.push(top);
                        choices.push(best);
                    }
                }
            }
        }
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        scope.remove(k);
        cards.remove(k);
        let arg = (op == Elimination::Max).then(|| ArgTable {
            eliminated: var,
            scope: scope.clone(),
            cards: cards.clone(),
            choices,
        });
        Ok((
            DiscreteFactor {
                scope,
                cards,
                values: out,
            },
            arg,
        ))
    }

    /// Slice of the table at `var = value`.
    pub fn restrict(&self, var: usize, value: usize) -> Result<DiscreteFactor> {
        let k = self
            .scope
            .binary_search(&var)
            .map_err(|_| Error::factor(format!("variable {var} not in scope {:?}", self.scope)))?;
        let card = self.cards[k];
        if value >= card {
            return Err(Error::factor(format!(
                "value {value} out of range for variable {var} with cardinality {card}"
            )));
        }
        let outer: usize = self.cards[..k].iter().product();
        let inner: usize = self.cards[k + 1..].iter().product();
        let mut out = Vec::with_capacity(outer * inner);
        for o in 0..outer {
            let base = (o * card + value) * inner;
            out.extend_from_slice(&self.values[base..base + inner]);
        }
        let mut scope = self.scope.clone();
        let mut cards = self.cards.clone();
        scope.remove(k);
        cards.remove(k);
        Ok(DiscreteFactor {
            scope,
            cards,
            values: out,
        })
    }

    /// Rescales entries to sum to one, returning the original mass.
    pub fn normalize(&self) -> Result<(DiscreteFactor, f64)> {
        if self.values.iter().any(|v| *v < 0.0) {
            return Err(Error::factor("cannot normalize a factor with negative entries"));
        }
        let mass: f64 = self.values.iter().sum();
        if mass == 0.0 {
            return Err(Error::ImpossibleEvidence);
        }
        Ok((self.scale(1.0 / mass), mass))
    }

    /// Debug serialization: scope line, then values at full precision.
    pub fn to_text(&self) -> String {
        let mut head = vec![self.scope.len().to_string()];
        head.extend(self.scope.iter().map(|v| v.to_string()));
        let values: Vec<String> = self.values.iter().map(|v| format!("{v:?}")).collect();
        format!("{}\n{}\n", head.join(" "), values.join(" "))
    }
}

impl ArgTable {
    pub fn eliminated(&self) -> usize {
        self.eliminated
    }

    pub fn scope(&self) -> &[usize] {
        &self.scope
    }

    pub fn choices(&self) -> &[usize] {
        &self.choices
    }

    /// A table with empty scope that always picks `value`.
    pub fn constant(eliminated: usize, value: usize) -> Self {
        ArgTable {
            eliminated,
            scope: Vec::new(),
            cards: Vec::new(),
            choices: vec![value],
        }
    }

    /// Recorded choice at a full assignment indexed by variable id.
    pub fn choice(&self, assignment: &[usize]) -> usize {
        let mut idx = 0;
        for (&v, &c) in self.scope.iter().zip(&self.cards) {
            idx = idx * c + assignment[v];
        }
        self.choices[idx]
    }
}

/// Walks every cell of a table with cardinalities `cards`, tracking one offset
/// per input whose per-position strides are given, and collects `f(offsets)`.
fn odometer_gather<F>(cards: &[usize], input_strides: &[&[usize]], mut f: F) -> Vec<f64>
where
    F: FnMut(&[usize]) -> f64,
{
    let len = table_len(cards);
    let mut out = Vec::with_capacity(len);
    let mut digits = vec![0usize; cards.len()];
    let mut offs = vec![0usize; input_strides.len()];
    for _ in 0..len {
        out.push(f(&offs));
        for pos in (0..cards.len()).rev() {
            digits[pos] += 1;
            for (o, s) in offs.iter_mut().zip(input_strides) {
                *o += s[pos];
            }
            if digits[pos] < cards[pos] {
                break;
            }
            for (o, s) in offs.iter_mut().zip(input_strides) {
                *o -= s[pos] * cards[pos];
            }
            digits[pos] = 0;
        }
    }
    out
}

fn combine<F>(factors: &[&DiscreteFactor], identity: f64, op: F) -> Result<DiscreteFactor>
where
    F: Fn(f64, f64) -> f64,
{
    let mut scope: Vec<usize> = Vec::new();
    let mut cards: Vec<usize> = Vec::new();
    for f in factors {
        for (&v, &c) in f.scope.iter().zip(&f.cards) {
            match scope.binary_search(&v) {
                Ok(i) if cards[i] != c => {
                    return Err(Error::factor(format!(
                        "variable {v} has cardinality {} and {c} in different factors",
                        cards[i]
                    )))
                }
                Ok(_) => {}
                Err(i) => {
                    scope.insert(i, v);
                    cards.insert(i, c);
                }
            }
        }
    }
    let mapped: Vec<Vec<usize>> = factors
        .iter()
        .map(|f| {
            let own = strides(&f.cards);
            scope
                .iter()
                .map(|v| f.scope.binary_search(v).map(|i| own[i]).unwrap_or(0))
                .collect()
        })
        .collect();
    let refs: Vec<&[usize]> = mapped.iter().map(|m| m.as_slice()).collect();
    let values = odometer_gather(&cards, &refs, |offs| {
        offs.iter()
            .zip(factors)
            .fold(identity, |acc, (&o, f)| op(acc, f.values[o]))
    });
    Ok(DiscreteFactor { scope, cards, values })
}

impl fmt::Display for DiscreteFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f1(var: usize, vals: &[f64]) -> DiscreteFactor {
        DiscreteFactor::new(vec![var], vec![vals.len()], vals.to_vec()).unwrap()
    }

    fn random(rng: &mut ChaCha8Rng, scope: &[usize], cards: &[usize]) -> DiscreteFactor {
        let n: usize = cards.iter().product();
        let values = (0..n).map(|_| rng.gen_range(0.01..1.0)).collect();
        DiscreteFactor::new(scope.to_vec(), cards.to_vec(), values).unwrap()
    }

    #[test]
    fn scalar_is_multiplicative_identity() {
        let f = f1(0, &[0.5, 0.5]);
        let g = DiscreteFactor::multiply(&[&f, &DiscreteFactor::scalar(1.0)]).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn elementwise_product() {
        let f = f1(0, &[0.2, 0.8]);
        let g = f1(0, &[0.5, 0.5]);
        let h = f.product(&g).unwrap();
        assert_eq!(h.values(), &[0.1, 0.4]);
    }

    #[test]
    fn product_matches_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (ca, cb, cc) = (2, 3, 2);
        let f = random(&mut rng, &[0, 1], &[ca, cb]);
        let g = random(&mut rng, &[1, 2], &[cb, cc]);
        let h = f.product(&g).unwrap();
        assert_eq!(h.scope(), &[0, 1, 2]);
        let mut expected = Vec::new();
        for a in 0..ca {
            for b in 0..cb {
                for c in 0..cc {
                    expected.push(f.values()[a * cb + b] * g.values()[b * cc + c]);
                }
            }
        }
        assert_eq!(h.values(), expected.as_slice());
    }

    #[test]
    fn cardinality_conflict_is_rejected() {
        let f = f1(0, &[0.5, 0.5]);
        let g = f1(0, &[0.2, 0.3, 0.5]);
        assert!(matches!(f.product(&g), Err(Error::Factor(_))));
    }

    #[test]
    fn sum_out_child_of_cpt_gives_ones() {
        // P(X=1 | pa) with pa = var 0, child = var 1
        let cpt = DiscreteFactor::new(vec![0, 1], vec![2, 2], vec![0.3, 0.7, 0.9, 0.1]).unwrap();
        let (s, arg) = cpt.eliminate(1, Elimination::Sum).unwrap();
        assert!(arg.is_none());
        assert_eq!(s.scope(), &[0]);
        for v in s.values() {
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn max_out_records_choice() {
        let (m, arg) = f1(0, &[0.2, 0.8]).eliminate(0, Elimination::Max).unwrap();
        assert_eq!(m.scalar_value(), Some(0.8));
        assert_eq!(arg.unwrap().choices(), &[1]);
    }

    #[test]
    fn max_ties_go_to_lowest_index() {
        let (_, arg) = f1(3, &[0.5, 0.5]).eliminate(3, Elimination::Max).unwrap();
        assert_eq!(arg.unwrap().choice(&[0, 0, 0, 0]), 0);
    }

    #[test]
    fn rounding_noise_is_a_tie() {
        let (m, arg) = f1(0, &[0.3, 0.30000000000000004, 0.2])
            .eliminate(0, Elimination::Max)
            .unwrap();
        assert_eq!(arg.unwrap().choices(), &[0]);
        assert_eq!(m.scalar_value(), Some(0.30000000000000004));
        let (_, arg) = f1(0, &[0.3, 0.3 + 1e-9]).eliminate(0, Elimination::Max).unwrap();
        assert_eq!(arg.unwrap().choices(), &[1]);
    }

    #[test]
    fn eliminate_missing_variable_fails() {
        assert!(f1(0, &[1.0]).eliminate(1, Elimination::Sum).is_err());
    }

    #[test]
    fn restrict_to_scalar() {
        let r = f1(0, &[0.2, 0.8]).restrict(0, 0).unwrap();
        assert_eq!(r.scalar_value(), Some(0.2));
        assert!(f1(0, &[0.2, 0.8]).restrict(0, 2).is_err());
    }

    #[test]
    fn restrict_and_sum_commute() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let f = random(&mut rng, &[0, 1], &[3, 2]);
        for a in 0..3 {
            let x = f.restrict(0, a).unwrap().eliminate(1, Elimination::Sum).unwrap().0;
            let y = f.eliminate(1, Elimination::Sum).unwrap().0.restrict(0, a).unwrap();
            assert!((x.scalar_value().unwrap() - y.scalar_value().unwrap()).abs() < 1e-15);
        }
    }

    #[test]
    fn normalize_reports_mass() {
        let (n, mass) = f1(0, &[0.2, 0.6]).normalize().unwrap();
        assert!((mass - 0.8).abs() < 1e-15);
        assert!((n.values()[0] - 0.25).abs() < 1e-15);
        assert!((n.values()[1] - 0.75).abs() < 1e-15);
        assert_eq!(f1(0, &[0.0, 0.0]).normalize(), Err(Error::ImpossibleEvidence));
    }

    #[test]
    fn ordered_layout_round_trips() {
        // table over (child=0, parent=2) laid out with parent first
        let f = DiscreteFactor::from_ordered(&[2, 0], &[3, 2], vec![0.1, 0.9, 0.2, 0.8, 0.3, 0.7]).unwrap();
        assert_eq!(f.scope(), &[0, 2]);
        assert_eq!(f.values(), &[0.1, 0.2, 0.3, 0.9, 0.8, 0.7]);
        assert_eq!(f.values_in_order(&[2, 0]).unwrap(), vec![0.1, 0.9, 0.2, 0.8, 0.3, 0.7]);
    }

    #[test]
    fn divide_zero_denominator_gives_zero() {
        let num = DiscreteFactor::new(vec![0, 1], vec![2, 2], vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let den = f1(0, &[2.0, 0.0]);
        let q = num.divide_or_zero(&den).unwrap();
        assert_eq!(q.values(), &[0.5, 1.0, 0.0, 0.0]);
    }

    fn small_factor(vars: std::ops::Range<usize>) -> impl Strategy<Value = DiscreteFactor> {
        proptest::sample::subsequence(vars.collect::<Vec<_>>(), 0..=3).prop_flat_map(|scope| {
            let cards: Vec<usize> = scope.iter().map(|v| 2 + v % 2).collect();
            let n: usize = cards.iter().product();
            proptest::collection::vec(0.0f64..1.0, n)
                .prop_map(move |values| DiscreteFactor::new(scope.clone(), cards.clone(), values).unwrap())
        })
    }

    fn close(a: &DiscreteFactor, b: &DiscreteFactor) -> bool {
        a.scope() == b.scope()
            && a.values()
                .iter()
                .zip(b.values())
                .all(|(x, y)| (x - y).abs() <= 1e-12 * x.abs().max(y.abs()).max(1e-300))
    }

    proptest! {
        #[test]
        fn multiply_commutes_and_associates(
            f in small_factor(0..5), g in small_factor(0..5), h in small_factor(0..5)
        ) {
            let fg = f.product(&g).unwrap();
            let gf = g.product(&f).unwrap();
            prop_assert!(close(&fg, &gf));
            let left = fg.product(&h).unwrap();
            let right = f.product(&g.product(&h).unwrap()).unwrap();
            prop_assert!(close(&left, &right));
        }

        #[test]
        fn max_dominates_mean(f in small_factor(0..5)) {
            for &v in f.scope() {
                let card = f.cardinality_of(v).unwrap() as f64;
                let (mx, _) = f.eliminate(v, Elimination::Max).unwrap();
                let (sm, _) = f.eliminate(v, Elimination::Sum).unwrap();
                for (a, b) in mx.values().iter().zip(sm.values()) {
                    prop_assert!(*a + 1e-12 >= *b / card);
                }
            }
        }

        #[test]
        fn restrict_distributes_over_product(
            f in small_factor(0..4), g in small_factor(0..4), value in 0usize..2
        ) {
            let prod = f.product(&g).unwrap();
            for &v in prod.scope() {
                let lhs = prod.restrict(v, value).unwrap();
                let rf = if f.contains(v) { f.restrict(v, value).unwrap() } else { f.clone() };
                let rg = if g.contains(v) { g.restrict(v, value).unwrap() } else { g.clone() };
                let rhs = rf.product(&rg).unwrap();
                prop_assert!(close(&lhs, &rhs));
            }
        }

        #[test]
        fn ordered_layout_is_lossless(f in small_factor(0..5), seed in 0u64..1000) {
            let mut order = f.scope().to_vec();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for i in (1..order.len()).rev() {
                order.swap(i, rng.gen_range(0..=i));
            }
            let cards: Vec<usize> = order.iter().map(|v| f.cardinality_of(*v).unwrap()).collect();
            let back = DiscreteFactor::from_ordered(&order, &cards, f.values_in_order(&order).unwrap()).unwrap();
            prop_assert_eq!(back, f);
        }
    }
}
