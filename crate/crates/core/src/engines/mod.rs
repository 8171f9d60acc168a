//! Query algorithms built on the bucket schedule.

mod bel;
mod cond;
mod map;
mod meu;

use std::fmt;

use serde::Serialize;

use crate::bucket::{BucketSchedule, TraceEntry};
use crate::error::{Error, Result};
use crate::factor::Elimination;
use crate::graph::Ordering;
use crate::model::{BeliefNetwork, Evidence};

pub use bel::elim_bel;
pub use cond::{elim_cond_max, CondIteration, CondOptions};
pub use map::{elim_map, elim_max};
pub use meu::elim_meu;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryKind {
    Belief,
    Mpe,
    Map,
    Meu,
    CondMpe,
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            QueryKind::Belief => "bel",
            QueryKind::Mpe => "mpe",
            QueryKind::Map => "map",
            QueryKind::Meu => "meu",
            QueryKind::CondMpe => "cond-mpe",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct QueryStats {
    /// Backward passes run (cutset assignments for conditioning, else 1).
    pub iterations: usize,
    pub max_recorded_scope: usize,
    pub recorded_entries: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QueryResult {
    pub kind: QueryKind,
    /// Queried variable for belief updating.
    pub query: Option<usize>,
    pub belief: Option<Vec<f64>>,
    /// `(variable, value)` pairs in ascending variable order.
    pub assignment: Vec<(usize, usize)>,
    pub value: Option<f64>,
    pub evidence_mass: Option<f64>,
    pub notes: Vec<String>,
    pub stats: QueryStats,
    #[serde(skip)]
    pub trace: Vec<TraceEntry>,
    #[serde(skip)]
    pub iterations: Vec<CondIteration>,
}

impl QueryResult {
    fn new(kind: QueryKind) -> Self {
        QueryResult {
            kind,
            query: None,
            belief: None,
            assignment: Vec::new(),
            value: None,
            evidence_mass: None,
            notes: Vec::new(),
            stats: QueryStats {
                iterations: 1,
                ..QueryStats::default()
            },
            trace: Vec::new(),
            iterations: Vec::new(),
        }
    }

    fn with_schedule(mut self, schedule: BucketSchedule) -> Self {
        self.stats.max_recorded_scope = schedule.max_recorded_scope();
        self.stats.recorded_entries = schedule.recorded_entries();
        self.trace = schedule.into_trace();
        self
    }

    /// Value assigned to `var`, if the result covers it.
    pub fn value_of(&self, var: usize) -> Option<usize> {
        self.assignment.iter().find(|(v, _)| *v == var).map(|&(_, x)| x)
    }

    /// `key=value` lines, variables named through `names`.
    pub fn render(&self, names: &[String]) -> String {
        let mut out = format!("query={}\n", self.kind);
        if let Some(q) = self.query {
            out.push_str(&format!("variable={}\n", names[q]));
        }
        if let Some(b) = &self.belief {
            let cells: Vec<String> = b.iter().map(|&p| format_number(p)).collect();
            out.push_str(&format!("belief={}\n", cells.join(" ")));
        }
        if !self.assignment.is_empty() {
            let cells: Vec<String> = self
                .assignment
                .iter()
                .map(|&(v, x)| format!("{}={}", names[v], x))
                .collect();
            out.push_str(&format!("assignment={}\n", cells.join(" ")));
        }
        if let Some(v) = self.value {
            out.push_str(&format!("value={}\n", format_number(v)));
        }
        if let Some(m) = self.evidence_mass {
            out.push_str(&format!("evidence_mass={}\n", format_number(m)));
        }
        out.push_str(&format!("iterations={}\n", self.stats.iterations));
        out.push_str(&format!("max_scope={}\n", self.stats.max_recorded_scope));
        for note in &self.notes {
            out.push_str(&format!("note={note}\n"));
        }
        out
    }

    /// A single JSON object with the same content as [`QueryResult::render`].
    pub fn to_json(&self, names: &[String]) -> serde_json::Value {
        let assignment: serde_json::Map<String, serde_json::Value> = self
            .assignment
            .iter()
            .map(|&(v, x)| (names[v].clone(), x.into()))
            .collect();
        let mut obj = serde_json::json!({
            "query": self.kind.to_string(),
            "iterations": self.stats.iterations,
            "max_scope": self.stats.max_recorded_scope,
            "recorded_entries": self.stats.recorded_entries,
            "notes": self.notes,
        });
        let map = obj.as_object_mut().expect("object literal");
        if let Some(q) = self.query {
            map.insert("variable".into(), names[q].clone().into());
        }
        if let Some(b) = &self.belief {
            map.insert("belief".into(), b.iter().map(|&p| json_number(p)).collect());
        }
        if !assignment.is_empty() {
            map.insert("assignment".into(), assignment.into());
        }
        if let Some(v) = self.value {
            map.insert("value".into(), json_number(v));
        }
        if let Some(m) = self.evidence_mass {
            map.insert("evidence_mass".into(), json_number(m));
        }
        obj
    }
}

/// A JSON number carrying the same twelve significant digits as the text
/// output; non-finite values become strings.
pub fn json_number(v: f64) -> serde_json::Value {
    let rounded: f64 = format_number(v).parse().unwrap_or(v);
    serde_json::Number::from_f64(rounded)
        .map(serde_json::Value::Number)
        .unwrap_or_else(|| format_number(v).into())
}

/// Twelve significant digits, trailing zeros trimmed; scientific notation
/// outside `[1e-5, 1e15)`.
pub fn format_number(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let mag = v.abs().log10().floor() as i32;
    if !(-5..15).contains(&mag) {
        return format!("{v:.11e}");
    }
    let decimals = (11 - mag).max(0) as usize;
    let s = format!("{v:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub(crate) fn check_ordering(n: usize, d: &Ordering) -> Result<()> {
    if d.len() != n {
        return Err(Error::ordering(format!(
            "ordering covers {} variables, model has {n}",
            d.len()
        )));
    }
    Ok(())
}

pub(crate) fn check_variables(n: usize, vars: &[usize], what: &str) -> Result<()> {
    let mut seen = vec![false; n];
    for &v in vars {
        if v >= n {
            return Err(Error::InvalidModel(format!("{what} variable {v} does not exist")));
        }
        if std::mem::replace(&mut seen[v], true) {
            return Err(Error::InvalidModel(format!("{what} variable {v} listed twice")));
        }
    }
    Ok(())
}

/// Runs the backward pass over every bucket, choosing the operator by
/// position.
pub(crate) fn sweep(schedule: &mut BucketSchedule, op: impl Fn(usize) -> Elimination) -> Result<()> {
    for pos in (0..schedule.len()).rev() {
        schedule.process_bucket(pos, op(pos))?;
    }
    Ok(())
}

/// Backward max pass plus decode over every variable, without rejecting a
/// zero value.
pub(crate) fn max_pass(
    net: &BeliefNetwork,
    evidence: &Evidence,
    d: &Ordering,
) -> Result<(f64, Vec<usize>, BucketSchedule)> {
    check_ordering(net.len(), d)?;
    let mut schedule = crate::bucket::partition(net.factors(), d, evidence, &net.cardinalities())?;
    sweep(&mut schedule, |_| Elimination::Max)?;
    let all: Vec<usize> = (0..net.len()).collect();
    let decoded = schedule.forward_decode(&all)?;
    let assignment = decoded
        .into_iter()
        .map(|x| x.expect("every variable decoded"))
        .collect();
    Ok((schedule.constant(), assignment, schedule))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_format() {
        assert_eq!(format_number(0.343), "0.343");
        assert_eq!(format_number(1.0), "1");
        assert_eq!(format_number(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_number(2.0 / 3.0 * 100.0), "66.6666666667");
        assert_eq!(format_number(-4.5), "-4.5");
        assert_eq!(format_number(1.5e-7), "1.50000000000e-7");
        assert_eq!(format_number(0.0), "0");
    }

    #[test]
    fn render_lines() {
        let names: Vec<String> = vec!["A".into(), "B".into()];
        let mut r = QueryResult::new(QueryKind::Mpe);
        r.assignment = vec![(0, 1), (1, 0)];
        r.value = Some(0.25);
        assert_eq!(
            r.render(&names),
            "query=mpe\nassignment=A=1 B=0\nvalue=0.25\niterations=1\nmax_scope=0\n"
        );
        let json = r.to_json(&names);
        assert_eq!(json["assignment"]["A"], 1);
        assert_eq!(json["value"], 0.25);
    }
}
