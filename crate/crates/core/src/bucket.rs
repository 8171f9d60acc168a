//! The ordered partition of functions into buckets and the backward sweep
//! shared by every query.
//!
//! Buckets are indexed by ordering position. A function lives in the bucket of
//! its highest-positioned variable; scalars fold into a global constant.
//! Observed buckets restrict each of their functions at the observed value
//! and scatter the slices downward without multiplying them first. In an
//! unobserved bucket, observed variables that are still present in an input
//! are instantiated before the product, so recorded functions never carry an
//! observed variable.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::{ArgTable, DiscreteFactor, Elimination};
use crate::graph::Ordering;
use crate::model::Evidence;

/// How an observed bucket treats its functions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum ObservationMode {
    /// Restrict each function separately and re-place every slice.
    #[default]
    Scatter,
    /// Multiply the bucket first, then restrict the product. Only useful as a
    /// reference for the scatter rule.
    MultiplyFirst,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BucketOp {
    Sum,
    Max,
    Observe,
    /// Chance bucket of an influence diagram: produces a probability and a
    /// utility function.
    Expect,
    /// Decision bucket of an influence diagram: maximizes expected utility.
    Decide,
}

impl fmt::Display for BucketOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            BucketOp::Sum => "sum",
            BucketOp::Max => "max",
            BucketOp::Observe => "observe",
            BucketOp::Expect => "expect",
            BucketOp::Decide => "decide",
        };
        f.write_str(s)
    }
}

impl From<Elimination> for BucketOp {
    fn from(op: Elimination) -> Self {
        match op {
            Elimination::Sum => BucketOp::Sum,
            Elimination::Max => BucketOp::Max,
        }
    }
}

/// What happened when one bucket was processed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceEntry {
    pub variable: usize,
    pub position: usize,
    pub op: BucketOp,
    pub input_scopes: Vec<Vec<usize>>,
    pub utility_scopes: Vec<Vec<usize>>,
    /// U_p: scope of the recorded probability-side function.
    pub output_scope: Option<Vec<usize>>,
    /// W_p: scope of the recorded utility-side function.
    pub utility_output_scope: Option<Vec<usize>>,
    /// Entries in the functions recorded by this bucket.
    pub table_size: usize,
}

impl TraceEntry {
    /// Largest arity among the functions this bucket recorded.
    pub fn recorded_scope(&self) -> usize {
        let u = self.output_scope.as_ref().map_or(0, Vec::len);
        let w = self.utility_output_scope.as_ref().map_or(0, Vec::len);
        u.max(w)
    }

    /// One trace line, naming variables through `names`.
    pub fn render(&self, names: &[String]) -> String {
        let scope = |s: &[usize]| {
            let inner: Vec<&str> = s.iter().map(|&v| names[v].as_str()).collect();
            format!("[{}]", inner.join(","))
        };
        let inputs: Vec<String> = self
            .input_scopes
            .iter()
            .chain(&self.utility_scopes)
            .map(|s| scope(s))
            .collect();
        let mut line = format!(
            "bucket={} pos={} op={} in={}",
            names[self.variable],
            self.position + 1,
            self.op,
            if inputs.is_empty() {
                "-".to_string()
            } else {
                inputs.join(" ")
            }
        );
        if let Some(out) = &self.output_scope {
            line.push_str(&format!(" out={}", scope(out)));
        }
        if let Some(out) = &self.utility_output_scope {
            line.push_str(&format!(" uout={}", scope(out)));
        }
        line.push_str(&format!(" size={}", self.table_size));
        line
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bucket {
    pub variable: usize,
    pub factors: Vec<DiscreteFactor>,
    pub utilities: Vec<DiscreteFactor>,
    pub observed_value: Option<usize>,
    /// Functions produced when this bucket was processed.
    pub generated: Vec<DiscreteFactor>,
    pub arg_table: Option<ArgTable>,
}

#[derive(Debug, Clone)]
pub struct BucketSchedule {
    ordering: Ordering,
    cards: Vec<usize>,
    evidence: Evidence,
    buckets: Vec<Bucket>,
    constant: f64,
    utility_constant: f64,
    /// Probability functions that reached a decision bucket.
    decision_weights: Vec<DiscreteFactor>,
    /// Lowest position processed so far (`len` when none).
    frontier: usize,
    trace: Vec<TraceEntry>,
    mode: ObservationMode,
}

/// Places each function in the bucket of its highest-positioned variable.
pub fn partition(
    factors: Vec<DiscreteFactor>,
    d: &Ordering,
    evidence: &Evidence,
    cards: &[usize],
) -> Result<BucketSchedule> {
    BucketSchedule::partition(factors, Vec::new(), d, evidence, cards)
}

impl BucketSchedule {
    /// Partitions probability and utility functions. Scalar probability
    /// functions multiply into the global constant; scalar utilities add into
    /// the global utility constant.
    pub fn partition(
        factors: Vec<DiscreteFactor>,
        utilities: Vec<DiscreteFactor>,
        d: &Ordering,
        evidence: &Evidence,
        cards: &[usize],
    ) -> Result<BucketSchedule> {
        let n = d.len();
        if cards.len() != n {
            return Err(Error::ordering(format!(
                "ordering covers {n} variables, model has {}",
                cards.len()
            )));
        }
        for (v, x) in evidence.iter() {
            if v >= n || x >= cards[v] {
                return Err(Error::InvalidEvidence(format!("{v}={x} does not fit the model")));
            }
        }
        let buckets = d
            .sequence()
            .iter()
            .map(|&v| Bucket {
                variable: v,
                factors: Vec::new(),
                utilities: Vec::new(),
                observed_value: evidence.get(v),
                generated: Vec::new(),
                arg_table: None,
            })
            .collect();
        let mut schedule = BucketSchedule {
            ordering: d.clone(),
            cards: cards.to_vec(),
            evidence: evidence.clone(),
            buckets,
            constant: 1.0,
            utility_constant: 0.0,
            decision_weights: Vec::new(),
            frontier: n,
            trace: Vec::new(),
            mode: ObservationMode::Scatter,
        };
        for f in factors {
            schedule.check_scope(&f)?;
            schedule.place(f);
        }
        for u in utilities {
            schedule.check_scope(&u)?;
            schedule.place_utility(u);
        }
        Ok(schedule)
    }

    pub fn with_observation_mode(mut self, mode: ObservationMode) -> Self {
        self.mode = mode;
        self
    }

    fn check_scope(&self, f: &DiscreteFactor) -> Result<()> {
        for (&v, &c) in f.scope().iter().zip(f.cards()) {
            if v >= self.cards.len() || self.cards[v] != c {
                return Err(Error::factor(format!(
                    "function over {:?} does not match the ordered variables",
                    f.scope()
                )));
            }
        }
        Ok(())
    }

    fn home(&self, f: &DiscreteFactor) -> Option<usize> {
        f.scope().iter().map(|&v| self.ordering.position(v)).max()
    }

    fn place(&mut self, f: DiscreteFactor) {
        match self.home(&f) {
            Some(pos) => {
                debug_assert!(pos < self.frontier, "placed into a processed bucket");
                self.buckets[pos].factors.push(f);
            }
            None => self.constant *= f.values()[0],
        }
    }

    fn place_utility(&mut self, f: DiscreteFactor) {
        match self.home(&f) {
            Some(pos) => self.buckets[pos].utilities.push(f),
            None => self.utility_constant += f.values()[0],
        }
    }

    pub fn ordering(&self) -> &Ordering {
        &self.ordering
    }

    pub fn len(&self) -> usize {
        self.buckets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.buckets.is_empty()
    }

    pub fn bucket(&self, position: usize) -> &Bucket {
        &self.buckets[position]
    }

    pub fn bucket_of(&self, var: usize) -> &Bucket {
        &self.buckets[self.ordering.position(var)]
    }

    pub fn buckets(&self) -> &[Bucket] {
        &self.buckets
    }

    /// Product of every scalar produced so far.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    /// Sum of every scalar utility produced so far.
    pub fn utility_constant(&self) -> f64 {
        self.utility_constant
    }

    pub fn decision_weights(&self) -> &[DiscreteFactor] {
        &self.decision_weights
    }

    pub fn evidence(&self) -> &Evidence {
        &self.evidence
    }

    pub fn trace(&self) -> &[TraceEntry] {
        &self.trace
    }

    pub fn into_trace(self) -> Vec<TraceEntry> {
        self.trace
    }

    /// Largest arity of any function recorded during the backward pass.
    pub fn max_recorded_scope(&self) -> usize {
        self.trace.iter().map(TraceEntry::recorded_scope).max().unwrap_or(0)
    }

    /// Total entries of recorded functions.
    pub fn recorded_entries(&self) -> usize {
        self.trace.iter().map(|t| t.table_size).sum()
    }

    fn begin(&mut self, position: usize) -> Result<()> {
        if position + 1 != self.frontier {
            return Err(Error::ordering(format!(
                "bucket at position {} processed out of order",
                position + 1
            )));
        }
        self.frontier = position;
        Ok(())
    }

    /// Instantiates every observed variable still present in `f`.
    fn instantiate(&self, f: DiscreteFactor) -> Result<DiscreteFactor> {
        let observed: Vec<(usize, usize)> = f
            .scope()
            .iter()
            .filter_map(|&v| self.evidence.get(v).map(|x| (v, x)))
            .collect();
        observed.into_iter().try_fold(f, |g, (v, x)| g.restrict(v, x))
    }

    fn take_inputs(&mut self, position: usize) -> (Vec<DiscreteFactor>, Vec<DiscreteFactor>) {
        let b = &mut self.buckets[position];
        (std::mem::take(&mut b.factors), std::mem::take(&mut b.utilities))
    }

    fn scopes(fs: &[DiscreteFactor]) -> Vec<Vec<usize>> {
        fs.iter().map(|f| f.scope().to_vec()).collect()
    }

    fn observe(&mut self, position: usize, value: usize) -> Result<()> {
        let var = self.buckets[position].variable;
        let (factors, utilities) = self.take_inputs(position);
        let mut trace = TraceEntry {
            variable: var,
            position,
            op: BucketOp::Observe,
            input_scopes: Self::scopes(&factors),
            utility_scopes: Self::scopes(&utilities),
            output_scope: None,
            utility_output_scope: None,
            table_size: 0,
        };
        let restricted: Vec<DiscreteFactor> = match self.mode {
            ObservationMode::Scatter => factors.iter().map(|f| f.restrict(var, value)).collect::<Result<_>>()?,
            ObservationMode::MultiplyFirst if factors.is_empty() => Vec::new(),
            ObservationMode::MultiplyFirst => {
                let refs: Vec<&DiscreteFactor> = factors.iter().collect();
                vec![DiscreteFactor::multiply(&refs)?.restrict(var, value)?]
            }
        };
        let restricted_utils: Vec<DiscreteFactor> = utilities
            .iter()
            .map(|f| f.restrict(var, value))
            .collect::<Result<_>>()?;
        trace.table_size = restricted.iter().chain(&restricted_utils).map(|f| f.len()).sum();
        if self.mode == ObservationMode::MultiplyFirst {
            trace.output_scope = restricted.first().map(|f| f.scope().to_vec());
        }
        self.buckets[position].generated = restricted.iter().chain(&restricted_utils).cloned().collect();
        self.buckets[position].arg_table = Some(ArgTable::constant(var, value));
        for f in restricted {
            self.place(f);
        }
        for u in restricted_utils {
            self.place_utility(u);
        }
        self.trace.push(trace);
        Ok(())
    }

    /// Processes the bucket at `position` with summation or maximization.
    /// Buckets must be processed from the last position down.
    pub fn process_bucket(&mut self, position: usize, op: Elimination) -> Result<()> {
        self.begin(position)?;
        if !self.buckets[position].utilities.is_empty() {
            return Err(Error::factor("utility functions need an expectation bucket"));
        }
        if let Some(value) = self.buckets[position].observed_value {
            return self.observe(position, value);
        }
        let var = self.buckets[position].variable;
        let (factors, _) = self.take_inputs(position);
        let input_scopes = Self::scopes(&factors);
        let inputs = factors
            .into_iter()
            .map(|f| self.instantiate(f))
            .collect::<Result<Vec<_>>>()?;
        let (h, arg) = if inputs.is_empty() {
            // no function mentions the variable
            match op {
                Elimination::Sum => (DiscreteFactor::scalar(self.cards[var] as f64), None),
                Elimination::Max => (DiscreteFactor::scalar(1.0), Some(ArgTable::constant(var, 0))),
            }
        } else {
            let refs: Vec<&DiscreteFactor> = inputs.iter().collect();
            let product = DiscreteFactor::multiply(&refs)?;
            product.eliminate(var, op)?
        };
        self.trace.push(TraceEntry {
            variable: var,
            position,
            op: op.into(),
            input_scopes,
            utility_scopes: Vec::new(),
            output_scope: Some(h.scope().to_vec()),
            utility_output_scope: None,
            table_size: h.len(),
        });
        let b = &mut self.buckets[position];
        b.generated = vec![h.clone()];
        b.arg_table = arg;
        self.place(h);
        Ok(())
    }

    /// Chance bucket of an influence diagram. Produces
    /// `lambda(u) = sum_x prod(probabilities)` over U_p and
    /// `theta(w) = sum_x prod(probabilities) * sum(utilities) / lambda(w_U)` over W_p,
    /// with theta zero wherever lambda is zero.
    pub fn process_expectation_bucket(&mut self, position: usize) -> Result<()> {
        self.begin(position)?;
        if let Some(value) = self.buckets[position].observed_value {
            return self.observe(position, value);
        }
        let var = self.buckets[position].variable;
        let (factors, utilities) = self.take_inputs(position);
        let input_scopes = Self::scopes(&factors);
        let utility_scopes = Self::scopes(&utilities);
        let probs = factors
            .into_iter()
            .map(|f| self.instantiate(f))
            .collect::<Result<Vec<_>>>()?;
        let utils = utilities
            .into_iter()
            .map(|f| self.instantiate(f))
            .collect::<Result<Vec<_>>>()?;
        let own = DiscreteFactor::constant(vec![var], vec![self.cards[var]], 1.0)?;
        let mut refs: Vec<&DiscreteFactor> = probs.iter().collect();
        refs.push(&own);
        let joint = DiscreteFactor::multiply(&refs)?;
        let (lambda, _) = joint.eliminate(var, Elimination::Sum)?;
        let theta = if utils.is_empty() {
            None
        } else {
            let urefs: Vec<&DiscreteFactor> = utils.iter().collect();
            let total = DiscreteFactor::add(&urefs)?;
            let (weighted, _) = joint.product(&total)?.eliminate(var, Elimination::Sum)?;
            Some(weighted.divide_or_zero(&lambda)?)
        };
        self.trace.push(TraceEntry {
            variable: var,
            position,
            op: BucketOp::Expect,
            input_scopes,
            utility_scopes,
            output_scope: Some(lambda.scope().to_vec()),
            utility_output_scope: theta.as_ref().map(|t| t.scope().to_vec()),
            table_size: lambda.len() + theta.as_ref().map_or(0, |t| t.len()),
        });
        let b = &mut self.buckets[position];
        b.generated = std::iter::once(lambda.clone()).chain(theta.clone()).collect();
        self.place(lambda);
        if let Some(t) = theta {
            self.place_utility(t);
        }
        Ok(())
    }

    /// Decision bucket of an influence diagram: maximizes the sum of its
    /// utility functions over the decision. Probability functions here depend
    /// on decisions only; they are kept aside as evidence weights and enter
    /// the maximization as feasibility constraints (a decision under which
    /// the evidence is impossible scores negative infinity).
    pub fn process_decision_bucket(&mut self, position: usize) -> Result<()> {
        self.begin(position)?;
        if let Some(value) = self.buckets[position].observed_value {
            return self.observe(position, value);
        }
        let var = self.buckets[position].variable;
        let (factors, utilities) = self.take_inputs(position);
        let input_scopes = Self::scopes(&factors);
        let utility_scopes = Self::scopes(&utilities);
        let weights = factors
            .into_iter()
            .map(|f| self.instantiate(f))
            .collect::<Result<Vec<_>>>()?;
        let mut terms = utilities
            .into_iter()
            .map(|f| self.instantiate(f))
            .collect::<Result<Vec<_>>>()?;
        terms.extend(weights.iter().map(feasibility));
        terms.push(DiscreteFactor::constant(vec![var], vec![self.cards[var]], 0.0)?);
        let refs: Vec<&DiscreteFactor> = terms.iter().collect();
        let total = DiscreteFactor::add(&refs)?;
        let (best, arg) = total.eliminate(var, Elimination::Max)?;
        self.trace.push(TraceEntry {
            variable: var,
            position,
            op: BucketOp::Decide,
            input_scopes,
            utility_scopes,
            output_scope: None,
            utility_output_scope: Some(best.scope().to_vec()),
            table_size: best.len(),
        });
        self.decision_weights.extend(weights);
        let b = &mut self.buckets[position];
        b.generated = vec![best.clone()];
        b.arg_table = arg;
        self.place_utility(best);
        Ok(())
    }

    /// Assigns the variables in `over` from first position to last using the
    /// recorded argmax tables; observed variables take their evidence value.
    /// Entries outside `over` and the evidence are `None`.
    pub fn forward_decode(&self, over: &[usize]) -> Result<Vec<Option<usize>>> {
        let n = self.len();
        let mut decoded = vec![None; n];
        let mut full = vec![0usize; n];
        for (v, x) in self.evidence.iter() {
            decoded[v] = Some(x);
            full[v] = x;
        }
        for pos in 0..n {
            let var = self.ordering.at(pos);
            if !over.contains(&var) || self.evidence.contains(var) {
                continue;
            }
            let table = self.buckets[pos]
                .arg_table
                .as_ref()
                .ok_or_else(|| Error::factor(format!("no argmax table recorded for variable {var}")))?;
            if let Some(&missing) = table.scope().iter().find(|&&u| decoded[u].is_none()) {
                return Err(Error::factor(format!(
                    "argmax table of {var} depends on undecoded variable {missing}"
                )));
            }
            let x = table.choice(&full);
            decoded[var] = Some(x);
            full[var] = x;
        }
        Ok(decoded)
    }
}

/// Zero where `weight` is positive, negative infinity where it vanishes.
fn feasibility(weight: &DiscreteFactor) -> DiscreteFactor {
    let values = weight
        .values()
        .iter()
        .map(|&w| if w > 0.0 { 0.0 } else { f64::NEG_INFINITY })
        .collect();
    DiscreteFactor::new_unchecked(weight.scope().to_vec(), weight.cards().to_vec(), values)
}
