//! Reader and writer for the whitespace-token network format.
//!
//! ```text
//! BAYES                 ID
//! n                     n
//! c_0 .. c_{n-1}        c_0 .. c_{n-1}
//! n                     k d_1 .. d_k
//! k p_1 .. child        n-k
//! ...                   k p_1 .. child   (chance variables only)
//! entries v ...         ...
//! ...                   entries v ...
//!                       m
//!                       k q_1 .. q_k     (m utility blocks)
//!                       entries v ...
//! ```
//!
//! Table values are row-major over the scope line, so the child of a CPT
//! varies fastest. Text after `#` is ignored, except a `# names: A B ...`
//! comment which names the variables.

use crate::error::{Error, Result};
use crate::factor::DiscreteFactor;

use super::network::{check_normalized, BeliefNetwork, InfluenceDiagram, Variable, NORMALIZATION_TOLERANCE};
use super::{Evidence, Parsed};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NetworkKind {
    Bayes,
    Id,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Renormalize CPT rows that do not sum to one instead of failing.
    pub lax: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Bayes(BeliefNetwork),
    Influence(InfluenceDiagram),
}

impl Model {
    pub fn kind(&self) -> NetworkKind {
        match self {
            Model::Bayes(_) => NetworkKind::Bayes,
            Model::Influence(_) => NetworkKind::Id,
        }
    }

    pub fn network(&self) -> &BeliefNetwork {
        match self {
            Model::Bayes(n) => n,
            Model::Influence(id) => id.network(),
        }
    }
}

struct Token<'a> {
    text: &'a str,
    line: usize,
    column: usize,
}

struct Tokens<'a> {
    tokens: Vec<Token<'a>>,
    pos: usize,
    end: (usize, usize),
    names: Option<Vec<String>>,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str) -> Self {
        let mut tokens = Vec::new();
        let mut names = None;
        let mut end = (1, 1);
        for (ln, raw) in text.lines().enumerate() {
            let (body, comment) = match raw.find('#') {
                Some(i) => (&raw[..i], Some(&raw[i + 1..])),
                None => (raw, None),
            };
            if let Some(rest) = comment.and_then(|c| c.trim_start().strip_prefix("names:")) {
                names = Some(rest.split_whitespace().map(str::to_string).collect());
            }
            let mut offset = 0;
            for piece in body.split(|c: char| c.is_whitespace()) {
                if !piece.is_empty() {
                    tokens.push(Token {
                        text: piece,
                        line: ln + 1,
                        column: body[..offset].chars().count() + 1,
                    });
                }
                offset += piece.len() + 1;
            }
            end = (ln + 1, raw.chars().count() + 1);
        }
        Tokens {
            tokens,
            pos: 0,
            end,
            names,
        }
    }

    fn error_here(&self, message: String) -> Error {
        let (line, column) = match self.tokens.get(self.pos) {
            Some(t) => (t.line, t.column),
            None => self.end,
        };
        Error::Syntax { line, column, message }
    }

    fn next(&mut self, what: &str) -> Result<&Token<'a>> {
        if self.pos >= self.tokens.len() {
            return Err(self.error_here(format!("unexpected end of input, expected {what}")));
        }
        self.pos += 1;
        Ok(&self.tokens[self.pos - 1])
    }

    fn usize(&mut self, what: &str) -> Result<usize> {
        let tok = self.next(what)?;
        let (line, column) = (tok.line, tok.column);
        tok.text.parse().map_err(|_| Error::Syntax {
            line,
            column,
            message: format!("expected {what}, found `{}`", tok.text),
        })
    }

    fn id(&mut self, n: usize, what: &str) -> Result<usize> {
        let at = self.pos;
        let v = self.usize(what)?;
        if v >= n {
            self.pos = at;
            return Err(self.error_here(format!("variable id {v} out of range for {n} variables")));
        }
        Ok(v)
    }

    fn real(&mut self) -> Result<f64> {
        let tok = self.next("a table value")?;
        let (line, column) = (tok.line, tok.column);
        match tok.text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(Error::Syntax {
                line,
                column,
                message: format!("expected a finite number, found `{}`", tok.text),
            }),
        }
    }

    fn finish(&self) -> Result<()> {
        if self.pos < self.tokens.len() {
            return Err(self.error_here(format!("unexpected trailing token `{}`", self.tokens[self.pos].text)));
        }
        Ok(())
    }
}

fn scope_line(tokens: &mut Tokens<'_>, n: usize) -> Result<Vec<usize>> {
    let k = tokens.usize("a scope size")?;
    (0..k).map(|_| tokens.id(n, "a variable id")).collect()
}

fn table(tokens: &mut Tokens<'_>, scope: &[usize], cards: &[usize]) -> Result<DiscreteFactor> {
    let expected: usize = scope.iter().map(|&v| cards[v]).product();
    let at = tokens.pos;
    let count = tokens.usize("a table entry count")?;
    if count != expected {
        tokens.pos = at;
        return Err(tokens.error_here(format!(
            "table over {scope:?} needs {expected} entries, found count {count}"
        )));
    }
    let values = (0..count).map(|_| tokens.real()).collect::<Result<Vec<_>>>()?;
    let scope_cards: Vec<usize> = scope.iter().map(|&v| cards[v]).collect();
    let mut sorted = scope.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        tokens.pos = at;
        return Err(tokens.error_here(format!("duplicate variable in scope {scope:?}")));
    }
    DiscreteFactor::from_ordered(scope, &scope_cards, values)
}

struct CptSection {
    parents: Vec<Vec<usize>>,
    cpts: Vec<Option<DiscreteFactor>>,
}

fn cpt_section(
    tokens: &mut Tokens<'_>,
    variables: &[Variable],
    expected: usize,
    opts: ParseOptions,
    warnings: &mut Vec<String>,
) -> Result<CptSection> {
    let n = variables.len();
    let cards: Vec<usize> = variables.iter().map(|v| v.cardinality).collect();
    let at = tokens.pos;
    let count = tokens.usize("the number of CPTs")?;
    if count != expected {
        tokens.pos = at;
        return Err(tokens.error_here(format!("expected {expected} CPTs, found count {count}")));
    }
    let mut scopes = Vec::with_capacity(count);
    let mut parents = vec![Vec::new(); n];
    let mut seen = vec![false; n];
    for _ in 0..count {
        let at = tokens.pos;
        let scope = scope_line(tokens, n)?;
        let Some(&child) = scope.last() else {
            tokens.pos = at;
            return Err(tokens.error_here("CPT scope must name at least the child".into()));
        };
        if std::mem::replace(&mut seen[child], true) {
            tokens.pos = at;
            return Err(tokens.error_here(format!("variable {} has more than one CPT", variables[child].name)));
        }
        parents[child] = scope[..scope.len() - 1].to_vec();
        scopes.push(scope);
    }
    let mut cpts = vec![None; n];
    for scope in &scopes {
        let child = *scope.last().unwrap();
        let mut f = table(tokens, scope, &cards)?;
        let name = &variables[child].name;
        if f.values().iter().any(|v| *v < 0.0) {
            return Err(Error::model(format!("CPT of {name} has negative entries")));
        }
        if let Err(e @ Error::NotNormalized { .. }) = check_normalized(name, &f, child) {
            if !opts.lax {
                return Err(e);
            }
            f = renormalize(&f, child, name)?;
            warnings.push(format!("renormalized CPT rows of {name}"));
        }
        cpts[child] = Some(f);
    }
    Ok(CptSection { parents, cpts })
}

fn renormalize(f: &DiscreteFactor, child: usize, name: &str) -> Result<DiscreteFactor> {
    let (sums, _) = f.eliminate(child, crate::factor::Elimination::Sum)?;
    if let Some(row) = sums.values().iter().position(|s| *s <= NORMALIZATION_TOLERANCE) {
        return Err(Error::NotNormalized {
            variable: name.to_string(),
            row,
            sum: sums.values()[row],
        });
    }
    let inverse = DiscreteFactor::new(
        sums.scope().to_vec(),
        sums.cards().to_vec(),
        sums.values().iter().map(|s| 1.0 / s).collect(),
    )?;
    f.product(&inverse)
}

/// Parses a `BAYES` or `ID` model.
pub fn parse_network(text: &str, opts: ParseOptions) -> Result<Parsed<Model>> {
    let mut tokens = Tokens::new(text);
    let mut warnings = Vec::new();
    let header = tokens.next("`BAYES` or `ID`")?.text;
    let kind = match header {
        "BAYES" => NetworkKind::Bayes,
        "ID" => NetworkKind::Id,
        other => {
            tokens.pos -= 1;
            return Err(tokens.error_here(format!("expected `BAYES` or `ID`, found `{other}`")));
        }
    };
    let n = tokens.usize("the variable count")?;
    let mut cards = Vec::with_capacity(n);
    for _ in 0..n {
        let at = tokens.pos;
        let c = tokens.usize("a cardinality")?;
        if c == 0 {
            tokens.pos = at;
            return Err(tokens.error_here("cardinality must be at least 1".into()));
        }
        cards.push(c);
    }
    let names = match tokens.names.take() {
        Some(names) if names.len() != n => {
            return Err(Error::model(format!(
                "names comment lists {} names for {n} variables",
                names.len()
            )))
        }
        Some(names) => names,
        None => (0..n).map(Variable::default_name).collect(),
    };
    let variables: Vec<Variable> = names
        .into_iter()
        .zip(&cards)
        .enumerate()
        .map(|(i, (name, &c))| Variable::new(i, name, c))
        .collect();

    let model = match kind {
        NetworkKind::Bayes => {
            let section = cpt_section(&mut tokens, &variables, n, opts, &mut warnings)?;
            tokens.finish()?;
            let cpts = section.cpts.into_iter().map(|c| c.unwrap()).collect();
            Model::Bayes(BeliefNetwork::new(variables, section.parents, cpts)?)
        }
        NetworkKind::Id => {
            let k = tokens.usize("the decision count")?;
            let mut decisions = Vec::with_capacity(k);
            for _ in 0..k {
                decisions.push(tokens.id(n, "a decision id")?);
            }
            let section = cpt_section(&mut tokens, &variables, n.saturating_sub(k), opts, &mut warnings)?;
            if let Some(&d) = decisions.iter().find(|&&d| section.cpts[d].is_some()) {
                return Err(Error::DecisionWithParents(variables[d].name.clone()));
            }
            let m = tokens.usize("the utility count")?;
            let mut utilities = Vec::with_capacity(m);
            for _ in 0..m {
                let scope = scope_line(&mut tokens, n)?;
                utilities.push(table(&mut tokens, &scope, &cards)?);
            }
            tokens.finish()?;
            Model::Influence(InfluenceDiagram::new(
                variables,
                section.parents,
                section.cpts,
                decisions,
                utilities,
            )?)
        }
    };
    Ok(Parsed { model, warnings })
}

pub fn parse_bayes(text: &str, opts: ParseOptions) -> Result<Parsed<BeliefNetwork>> {
    let parsed = parse_network(text, opts)?;
    match parsed.model {
        Model::Bayes(net) => Ok(Parsed {
            model: net,
            warnings: parsed.warnings,
        }),
        Model::Influence(_) => Err(Error::model("expected a BAYES network, found an ID")),
    }
}

pub fn parse_influence_diagram(text: &str, opts: ParseOptions) -> Result<Parsed<InfluenceDiagram>> {
    let parsed = parse_network(text, opts)?;
    match parsed.model {
        Model::Influence(id) => Ok(Parsed {
            model: id,
            warnings: parsed.warnings,
        }),
        Model::Bayes(_) => Err(Error::model("expected an ID, found a BAYES network")),
    }
}

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items.into_iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
}

fn write_header(out: &mut String, net: &BeliefNetwork, tag: &str) {
    out.push_str(tag);
    out.push('\n');
    out.push_str(&format!("{}\n", net.len()));
    out.push_str(&join(net.cardinalities()));
    out.push('\n');
}

fn write_table(out: &mut String, values: &[f64]) {
    out.push_str(&format!("{}\n", values.len()));
    out.push_str(&join(values.iter().map(|v| format!("{v:?}"))));
    out.push('\n');
}

fn write_cpts(out: &mut String, net: &BeliefNetwork) {
    let chance: Vec<usize> = (0..net.len()).filter(|&i| net.cpt(i).is_some()).collect();
    out.push_str(&format!("{}\n", chance.len()));
    let orders: Vec<Vec<usize>> = chance
        .iter()
        .map(|&i| {
            let mut order = net.parents(i).to_vec();
            order.push(i);
            order
        })
        .collect();
    for order in &orders {
        out.push_str(&format!("{} {}\n", order.len(), join(order)));
    }
    for (&i, order) in chance.iter().zip(&orders) {
        let values = net.cpt(i).unwrap().values_in_order(order).unwrap();
        write_table(out, &values);
    }
}

fn write_names(out: &mut String, net: &BeliefNetwork) {
    if !net.has_default_names() {
        out.push_str(&format!(
            "# names: {}\n",
            join(net.variables().iter().map(|v| v.name.as_str()))
        ));
    }
}

pub fn write_bayes(net: &BeliefNetwork) -> String {
    let mut out = String::new();
    write_header(&mut out, net, "BAYES");
    write_cpts(&mut out, net);
    write_names(&mut out, net);
    out
}

pub fn write_influence_diagram(id: &InfluenceDiagram) -> String {
    let net = id.network();
    let mut out = String::new();
    write_header(&mut out, net, "ID");
    out.push_str(&format!("{}", id.decisions().len()));
    for d in id.decisions() {
        out.push_str(&format!(" {d}"));
    }
    out.push('\n');
    write_cpts(&mut out, net);
    out.push_str(&format!("{}\n", id.utilities().len()));
    for u in id.utilities() {
        out.push_str(format!("{} {}\n", u.scope().len(), join(u.scope())).trim_end());
        out.push('\n');
        write_table(&mut out, u.values());
    }
    write_names(&mut out, net);
    out
}

pub fn write_model(model: &Model) -> String {
    match model {
        Model::Bayes(n) => write_bayes(n),
        Model::Influence(id) => write_influence_diagram(id),
    }
}

/// Evidence file: pair count followed by `var value` pairs.
pub fn parse_evidence(text: &str, net: &BeliefNetwork) -> Result<Evidence> {
    let mut tokens = Tokens::new(text);
    let n = net.len();
    let count = tokens.usize("the evidence pair count")?;
    let cards = net.cardinalities();
    let mut ev = Evidence::empty();
    for _ in 0..count {
        let at = tokens.pos;
        let var = tokens.usize("a variable id")?;
        let value = tokens.usize("a value index")?;
        if var >= n {
            tokens.pos = at;
            return Err(Error::InvalidEvidence(format!("unknown variable {var}")));
        }
        ev.insert(var, value, &cards)?;
    }
    tokens.finish()?;
    Ok(ev)
}

pub fn write_evidence(ev: &Evidence) -> String {
    let mut parts = vec![ev.len().to_string()];
    for (v, x) in ev.iter() {
        parts.push(format!("{v} {x}"));
    }
    format!("{}\n", parts.join(" "))
}
