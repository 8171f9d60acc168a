use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::Parsed;

/// A disjunction of nonzero DIMACS literals, kept sorted by proposition with
/// no duplicates and no complementary pair.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Clause(Vec<i32>);

fn literal_key(lit: i32) -> (u32, bool) {
    (lit.unsigned_abs(), lit > 0)
}

impl Clause {
    /// Returns `None` when the literals form a tautology.
    pub fn new(mut literals: Vec<i32>) -> Option<Clause> {
        literals.sort_by_key(|&l| literal_key(l));
        literals.dedup();
        if literals.windows(2).any(|w| w[0] == -w[1]) {
            return None;
        }
        Some(Clause(literals))
    }

    pub fn empty() -> Clause {
        Clause(Vec::new())
    }

    pub fn literals(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_unit(&self) -> bool {
        self.0.len() == 1
    }

    /// Zero-based proposition ids mentioned by the clause.
    pub fn props(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().map(|l| l.unsigned_abs() as usize - 1)
    }

    /// Sign of `prop` (zero-based) in the clause, if present.
    pub fn polarity(&self, prop: usize) -> Option<bool> {
        let var = prop as u32 + 1;
        self.0.iter().find(|l| l.unsigned_abs() == var).map(|&l| l > 0)
    }

    /// Truth value under a full assignment indexed by zero-based proposition.
    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.0
            .iter()
            .any(|&l| assignment[l.unsigned_abs() as usize - 1] == (l > 0))
    }

    /// Resolvent on `prop`. `self` must hold the positive literal and `other`
    /// the negative one. `None` for tautological resolvents.
    pub fn resolve(&self, other: &Clause, prop: usize) -> Option<Clause> {
        let var = prop as i32 + 1;
        let lits = self
            .0
            .iter()
            .chain(&other.0)
            .copied()
            .filter(|l| l.abs() != var)
            .collect();
        Clause::new(lits)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l} ")?;
        }
        write!(f, "0")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CnfTheory {
    num_props: usize,
    clauses: Vec<Clause>,
}

impl CnfTheory {
    pub fn new(num_props: usize, clauses: Vec<Clause>) -> Result<Self> {
        for c in &clauses {
            if let Some(bad) = c.props().find(|&p| p >= num_props) {
                return Err(Error::model(format!(
                    "literal {} out of range for {num_props} propositions",
                    bad + 1
                )));
            }
        }
        Ok(CnfTheory { num_props, clauses })
    }

    pub fn num_props(&self) -> usize {
        self.num_props
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn satisfied_by(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.satisfied_by(assignment))
    }
}

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Parses DIMACS `p cnf V C`. Tautologies are dropped with a warning.
pub fn parse_cnf(text: &str) -> Result<Parsed<CnfTheory>> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut warnings = Vec::new();
    let mut current: Vec<i32> = Vec::new();
    let mut finish = |lits: Vec<i32>, line: usize, warnings: &mut Vec<String>| match Clause::new(lits) {
        Some(c) => clauses.push(c),
        None => warnings.push(format!("dropped tautological clause ending on line {line}")),
    };
    'lines: for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let trimmed = raw.trim_start();
        if trimmed.starts_with('c') || trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(syntax(line, 1, "duplicate problem line"));
            }
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            let parsed = match parts.as_slice() {
                ["p", "cnf", v, c] => v.parse().ok().zip(c.parse().ok()),
                _ => None,
            };
            header = Some(parsed.ok_or_else(|| syntax(line, 1, "expected `p cnf <vars> <clauses>`"))?);
            continue;
        }
        let Some((num_props, _)) = header else {
            return Err(syntax(line, 1, "clause before problem line"));
        };
        let mut col = 1 + raw.len() - trimmed.len();
        for tok in trimmed.split(|c: char| c.is_whitespace()) {
            if tok.is_empty() {
                col += 1;
                continue;
            }
            if tok == "%" {
                break 'lines;
            }
            let lit: i64 = tok
                .parse()
                .map_err(|_| syntax(line, col, format!("expected a literal, found `{tok}`")))?;
            if lit == 0 {
                finish(std::mem::take(&mut current), line, &mut warnings);
            } else if lit.unsigned_abs() as usize > num_props {
                return Err(syntax(
                    line,
                    col,
                    format!("literal {lit} out of range for {num_props} propositions"),
                ));
            } else {
                current.push(lit as i32);
            }
            col += tok.len() + 1;
        }
    }
    let Some((num_props, declared)) = header else {
        return Err(syntax(1, 1, "missing problem line"));
    };
    if !current.is_empty() {
        finish(current, text.lines().count(), &mut warnings);
    }
    let theory = CnfTheory::new(num_props, clauses)?;
    let read = theory.clauses.len() + warnings.iter().filter(|w| w.starts_with("dropped")).count();
    if read != declared {
        warnings.push(format!("header declares {declared} clauses, found {read}"));
    }
    Ok(Parsed {
        model: theory,
        warnings,
    })
}

/// DIMACS text; `comments` are emitted as `c` lines before the header.
pub fn write_cnf(theory: &CnfTheory, comments: &[String]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str(&format!("c {c}\n"));
    }
    out.push_str(&format!("p cnf {} {}\n", theory.num_props, theory.clauses.len()));
    for c in &theory.clauses {
        out.push_str(&format!("{c}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_binary_clause() {
        let t = parse_cnf("p cnf 2 1\n1 2 0\n").unwrap().model;
        assert_eq!(t.clauses(), &[Clause(vec![1, 2])]);
    }

    #[test]
    fn two_unit_clauses() {
        let t = parse_cnf("p cnf 1 2\n1 0\n-1 0\n").unwrap().model;
        assert_eq!(t.clauses(), &[Clause(vec![1]), Clause(vec![-1])]);
    }

    #[test]
    fn tautology_dropped() {
        let p = parse_cnf("p cnf 1 1\n1 -1 0\n").unwrap();
        assert!(p.model.clauses().is_empty());
        assert_eq!(p.warnings.len(), 1);
    }

    #[test]
    fn clauses_may_span_lines_and_keep_order() {
        let t = parse_cnf("c hi\np cnf 3 2\n-3 1\n 0 2 0\n").unwrap().model;
        assert_eq!(t.clauses(), &[Clause(vec![1, -3]), Clause(vec![2])]);
    }

    #[test]
    fn out_of_range_literal() {
        let err = parse_cnf("p cnf 2 1\n1 3 0\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 2, column: 3, .. }));
    }

    #[test]
    fn malformed_header() {
        assert!(matches!(parse_cnf("p sat 2\n"), Err(Error::Syntax { line: 1, .. })));
        assert!(matches!(parse_cnf("1 2 0\n"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn duplicate_literals_collapse() {
        let c = Clause::new(vec![2, -1, 2]).unwrap();
        assert_eq!(c.literals(), &[-1, 2]);
    }

    #[test]
    fn writes_dimacs() {
        let t = parse_cnf("p cnf 3 2\n1 -2 0\n3 0\n").unwrap().model;
        let text = write_cnf(&t, &["ordering 1 2 3".into()]);
        assert_eq!(text, "c ordering 1 2 3\np cnf 3 2\n1 -2 0\n3 0\n");
        assert_eq!(parse_cnf(&text).unwrap().model, t);
    }
}
