//! Command-line front end. [`run`] parses arguments, executes one command and
//! returns the process exit status, writing results to `out` and diagnostics
//! to `err`.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::engines::{self, format_number, json_number, CondOptions, QueryResult};
use crate::error::Error;
use crate::fixtures::{self, NetworkShape};
use crate::graph::{
    augmented_graph, constrained_order, cutset_heuristic, induced_width, interaction_graph, moral_graph, GraphView,
    Ordering, OrderingKind, WidthReport,
};
use crate::model::{
    parse_cnf, parse_evidence, parse_network, write_bayes, write_cnf, write_evidence, write_influence_diagram,
    BeliefNetwork, CnfTheory, Evidence, InfluenceDiagram, Model, ParseOptions,
};
use crate::oracle;
use crate::resolution::{directional_resolution, generate_model};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_MODEL: i32 = 2;
/// Impossible evidence or an unsatisfiable theory.
pub const EXIT_NO_SOLUTION: i32 = 3;

/// Seed override for `gen`.
pub const SEED_ENV: &str = "BUCKETFORGE_SEED";

#[derive(Debug, Parser)]
#[command(
    name = "bucketforge",
    version,
    about = "Bucket elimination for belief networks, influence diagrams and CNF theories"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Evidence file: a pair count followed by `variable value` pairs
    #[arg(long, short)]
    pub evidence: Option<PathBuf>,
    /// `min-fill`, `min-degree`, `given:V1,V2,...` or a file listing the ordering
    #[arg(long, short)]
    pub order: Option<String>,
    /// Print one line per processed bucket
    #[arg(long)]
    pub trace: bool,
    /// Also answer by exhaustive enumeration and compare
    #[arg(long)]
    pub oracle: bool,
    /// Print a single JSON object instead of key=value lines
    #[arg(long)]
    pub json: bool,
    /// Renormalize CPT rows that do not sum to one instead of failing
    #[arg(long)]
    pub lax: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Posterior distribution of one variable
    Bel {
        model: PathBuf,
        #[arg(long, short)]
        query: String,
        #[command(flatten)]
        common: Common,
    },
    /// Most probable explanation
    Mpe {
        model: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Maximum a-posteriori assignment to a hypothesis set
    Map {
        model: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        hyp: Vec<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Maximum expected utility of an influence diagram
    Meu {
        model: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Most probable explanation by conditioning on a cutset
    CondMpe {
        model: PathBuf,
        #[arg(
            long,
            value_delimiter = ',',
            conflicts_with = "wbound",
            required_unless_present = "wbound"
        )]
        cutset: Vec<String>,
        /// Pick the cutset greedily so the rest has induced width at most this
        #[arg(long)]
        wbound: Option<usize>,
        /// Worker threads for the loop over cutset assignments
        #[arg(long, default_value_t = 1)]
        parallel: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Directional resolution of a DIMACS CNF theory
    Dr {
        cnf: PathBuf,
        /// Write the directional extension to this file
        #[arg(long)]
        extension: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Widths of the model graph under each ordering heuristic
    Stats {
        input: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Print a seeded random instance
    Gen {
        #[arg(value_enum)]
        kind: GenKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        vars: usize,
        #[arg(long, default_value_t = 2)]
        card: usize,
        #[arg(long, default_value_t = 2)]
        parents: usize,
        #[arg(long, default_value_t = 1)]
        decisions: usize,
        #[arg(long, default_value_t = 2)]
        utilities: usize,
        #[arg(long, default_value_t = 20)]
        clauses: usize,
        /// Network to observe, for `evidence`
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        observed: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    Bayes,
    Tree,
    Id,
    Cnf,
    Evidence,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Input(String),
    Engine(Error),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Usage(_) => EXIT_USAGE,
            Failure::Input(_) => EXIT_MODEL,
            Failure::Engine(Error::ImpossibleEvidence | Error::Unsatisfiable) => EXIT_NO_SOLUTION,
            Failure::Engine(Error::Ordering(_)) => EXIT_USAGE,
            Failure::Engine(_) => EXIT_MODEL,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(m) | Failure::Input(m) => f.write_str(m),
            Failure::Engine(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

type Outcome<T> = std::result::Result<T, Failure>;

/// Key/value lines, mirrored into a JSON object.
struct Report {
    json_mode: bool,
    text: String,
    json: Map<String, Value>,
}

impl Report {
    fn new(json_mode: bool) -> Self {
        Report {
            json_mode,
            text: String::new(),
            json: Map::new(),
        }
    }

    fn line(&mut self, key: &str, text: impl fmt::Display, value: Value) {
        self.text.push_str(&format!("{key}={text}\n"));
        self.json.insert(key.to_string(), value);
    }

    fn raw(&mut self, text: &str) {
        self.text.push_str(text);
    }

    fn result(&mut self, r: &QueryResult, names: &[String]) {
        self.text.push_str(&r.render(names));
        if let Value::Object(m) = r.to_json(names) {
            self.json.extend(m);
        }
    }

    fn finish(self) -> String {
        if self.json_mode {
            format!("{}\n", Value::Object(self.json))
        } else {
            self.text
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let informational = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let sink: &mut dyn Write = if informational { out } else { err };
            let _ = write!(sink, "{}", e.render());
            return if informational { EXIT_OK } else { EXIT_USAGE };
        }
    };
    match execute(cli.command, err) {
        Ok((text, code)) => {
            if out.write_all(text.as_bytes()).is_err() {
                return EXIT_USAGE;
            }
            code
        }
        Err(f) => {
            let _ = writeln!(err, "error: {f}");
            f.code()
        }
    }
}

fn execute(command: Command, err: &mut dyn Write) -> Outcome<(String, i32)> {
    match command {
        Command::Bel { model, query, common } => bel(&model, &query, &common, err),
        Command::Mpe { model, common } => mpe(&model, &common, err),
        Command::Map { model, hyp, common } => map(&model, &hyp, &common, err),
        Command::Meu { model, common } => meu(&model, &common, err),
        Command::CondMpe {
            model,
            cutset,
            wbound,
            parallel,
            common,
        } => cond_mpe(&model, &cutset, wbound, parallel, &common, err),
        Command::Dr { cnf, extension, common } => dr(&cnf, extension.as_deref(), &common),
        Command::Stats { input, common } => stats(&input, &common, err),
        Command::Gen {
            kind,
            seed,
            vars,
            card,
            parents,
            decisions,
            utilities,
            clauses,
            model,
            observed,
        } => {
            let seed = match std::env::var(SEED_ENV) {
                Ok(s) => s
                    .trim()
                    .parse()
                    .map_err(|_| Failure::Usage(format!("{SEED_ENV}={s} is not an unsigned integer")))?,
                Err(_) => seed,
            };
            let mut rng = fixtures::rng(seed);
            let shape = NetworkShape {
                variables: vars,
                max_cardinality: card,
                max_parents: parents,
            };
            let text = match kind {
                GenKind::Bayes => write_bayes(&fixtures::random_network(&mut rng, shape)),
                GenKind::Tree => write_bayes(&fixtures::random_tree_network(&mut rng, vars, card)),
                GenKind::Id => write_influence_diagram(&fixtures::random_influence_diagram(
                    &mut rng, shape, decisions, utilities,
                )),
                GenKind::Cnf => write_cnf(
                    &fixtures::random_3cnf(&mut rng, vars, clauses),
                    &[format!("random 3-cnf, seed {seed}")],
                ),
                GenKind::Evidence => {
                    let path = model.ok_or_else(|| Failure::Usage("`gen evidence` needs --model".into()))?;
                    let net = load_model(&path, false, err)?;
                    write_evidence(&fixtures::random_evidence(&mut rng, net.network(), observed, &[]))
                }
            };
            Ok((text, EXIT_OK))
        }
    }
}

fn read(path: &Path) -> Outcome<String> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn load_model(path: &Path, lax: bool, err: &mut dyn Write) -> Outcome<Model> {
    let parsed = parse_network(&read(path)?, ParseOptions { lax })
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    for w in &parsed.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    Ok(parsed.model)
}

fn load_network(path: &Path, common: &Common, err: &mut dyn Write) -> Outcome<BeliefNetwork> {
    match load_model(path, common.lax, err)? {
        Model::Bayes(net) => Ok(net),
        Model::Influence(_) => Err(Failure::Input(format!(
            "{}: expected a BAYES network, found an influence diagram",
            path.display()
        ))),
    }
}

fn load_evidence(common: &Common, net: &BeliefNetwork) -> Outcome<Evidence> {
    match &common.evidence {
        None => Ok(Evidence::empty()),
        Some(p) => parse_evidence(&read(p)?, net).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
    }
}

fn names_of(net: &BeliefNetwork) -> Vec<String> {
    net.variables().iter().map(|v| v.name.clone()).collect()
}

fn resolve(net: &BeliefNetwork, name: &str) -> Outcome<usize> {
    net.find(name.trim())
        .ok_or_else(|| Failure::Usage(format!("unknown variable `{}`", name.trim())))
}

fn resolve_all(net: &BeliefNetwork, names: &[String]) -> Outcome<Vec<usize>> {
    names
        .iter()
        .filter(|s| !s.trim().is_empty())
        .map(|s| resolve(net, s))
        .collect()
}

enum OrderSpec {
    Heuristic(OrderingKind),
    Explicit(Vec<String>),
}

fn order_spec(common: &Common) -> Outcome<Option<OrderSpec>> {
    let Some(s) = common.order.as_deref() else {
        return Ok(None);
    };
    let split = |t: &str| -> Vec<String> {
        t.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|w| !w.is_empty())
            .map(str::to_string)
            .collect()
    };
    Ok(Some(match s {
        "min-fill" => OrderSpec::Heuristic(OrderingKind::MinFill),
        "min-degree" => OrderSpec::Heuristic(OrderingKind::MinDegree),
        _ => match s.strip_prefix("given:") {
            Some(list) => OrderSpec::Explicit(split(list)),
            None => OrderSpec::Explicit(split(&read(Path::new(s))?)),
        },
    }))
}

fn explicit_ordering(ids: Vec<usize>) -> Outcome<Ordering> {
    Ordering::new(ids).map_err(|e| Failure::Usage(e.to_string()))
}

/// The ordering for a query: an explicit one verbatim, or a heuristic one on
/// the graph with `removed` isolated, `prefix` first and `removed` last.
fn query_ordering(
    common: &Common,
    net: &BeliefNetwork,
    graph: &GraphView,
    prefix: &[usize],
    removed: &[usize],
) -> Outcome<Ordering> {
    match order_spec(common)?.unwrap_or(OrderSpec::Heuristic(OrderingKind::MinFill)) {
        OrderSpec::Explicit(names) => explicit_ordering(resolve_all(net, &names)?),
        OrderSpec::Heuristic(kind) => {
            let mut suffix: Vec<usize> = removed.iter().copied().filter(|v| !prefix.contains(v)).collect();
            suffix.sort_unstable();
            suffix.dedup();
            Ok(constrained_order(&graph.without(removed), prefix, &suffix, &kind)?)
        }
    }
}

fn named(ids: &[usize], names: &[String]) -> String {
    ids.iter().map(|&v| names[v].as_str()).collect::<Vec<_>>().join(" ")
}

fn assignment_text(pairs: &[(usize, usize)], names: &[String]) -> String {
    pairs
        .iter()
        .map(|&(v, x)| format!("{}={x}", names[v]))
        .collect::<Vec<_>>()
        .join(" ")
}

fn report_ordering(report: &mut Report, d: &Ordering, names: &[String]) {
    let list: Vec<&str> = d.sequence().iter().map(|&v| names[v].as_str()).collect();
    report.line("ordering", list.join(" "), json!(list));
}

fn report_trace(report: &mut Report, r: &QueryResult, names: &[String]) {
    let mut lines = Vec::new();
    if r.iterations.is_empty() {
        lines.extend(r.trace.iter().map(|t| t.render(names)));
    }
    for (i, it) in r.iterations.iter().enumerate() {
        lines.push(format!(
            "iteration={} cutset={} value={} max_scope={}",
            i + 1,
            assignment_text(&it.cutset, names),
            format_number(it.value),
            it.max_recorded_scope
        ));
        lines.extend(it.trace.iter().map(|t| t.render(names)));
    }
    for l in &lines {
        report.raw(&format!("trace={l}\n"));
    }
    report.json.insert("trace".into(), json!(lines));
}

fn relative_gap(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Appends the oracle's answer and whether it agrees with `r`.
fn report_oracle(report: &mut Report, r: &QueryResult, names: &[String], answer: crate::error::Result<QueryResult>) {
    let o = match answer {
        Ok(o) => o,
        Err(e) => {
            report.line("oracle", format!("skipped ({e})"), json!(format!("skipped ({e})")));
            return;
        }
    };
    let mut agrees = true;
    if let (Some(b), Some(ob)) = (&r.belief, &o.belief) {
        let cells: Vec<String> = ob.iter().map(|&p| format_number(p)).collect();
        report.line(
            "oracle_belief",
            cells.join(" "),
            ob.iter().map(|&p| json_number(p)).collect(),
        );
        let diff = b.iter().zip(ob).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        report.line("max_abs_diff", format_number(diff), json_number(diff));
        agrees &= diff < 1e-9;
    }
    if !o.assignment.is_empty() {
        report.line(
            "oracle_assignment",
            assignment_text(&o.assignment, names),
            Value::Object(
                o.assignment
                    .iter()
                    .map(|&(v, x)| (names[v].clone(), json!(x)))
                    .collect(),
            ),
        );
        agrees &= o.assignment == r.assignment;
    }
    if let (Some(v), Some(ov)) = (r.value, o.value) {
        report.line("oracle_value", format_number(ov), json_number(ov));
        agrees &= relative_gap(v, ov) <= 1e-9;
    }
    report.line("oracle_agrees", agrees, json!(agrees));
}

fn finish(report: Report) -> Outcome<(String, i32)> {
    Ok((report.finish(), EXIT_OK))
}

fn bel(path: &Path, query: &str, common: &Common, err: &mut dyn Write) -> Outcome<(String, i32)> {
    let net = load_network(path, common, err)?;
    let names = names_of(&net);
    let ev = load_evidence(common, &net)?;
    let q = resolve(&net, query)?;
    let d = query_ordering(common, &net, &moral_graph(&net), &[q], &ev.variables())?;
    let r = engines::elim_bel(&net, q, &ev, &d)?;
    let mut report = Report::new(common.json);
    report_ordering(&mut report, &d, &names);
    report.result(&r, &names);
    if common.oracle {
        report_oracle(&mut report, &r, &names, oracle::oracle_bel(&net, q, &ev));
    }
    if common.trace {
        report_trace(&mut report, &r, &names);
    }
    finish(report)
}

fn mpe(path: &Path, common: &Common, err: &mut dyn Write) -> Outcome<(String, i32)> {
    let net = load_network(path, common, err)?;
    let names = names_of(&net);
    let ev = load_evidence(common, &net)?;
    let d = query_ordering(common, &net, &moral_graph(&net), &[], &ev.variables())?;
    let r = engines::elim_max(&net, &ev, &d)?;
    let mut report = Report::new(common.json);
    report_ordering(&mut report, &d, &names);
    report.result(&r, &names);
    if common.oracle {
        report_oracle(&mut report, &r, &names, oracle::oracle_mpe(&net, &ev, &d));
    }
    if common.trace {
        report_trace(&mut report, &r, &names);
    }
    finish(report)
}

fn map(path: &Path, hyp: &[String], common: &Common, err: &mut dyn Write) -> Outcome<(String, i32)> {
    let net = load_network(path, common, err)?;
    let names = names_of(&net);
    let ev = load_evidence(common, &net)?;
    let h = resolve_all(&net, hyp)?;
    let d = query_ordering(common, &net, &moral_graph(&net), &h, &ev.variables())?;
    let r = engines::elim_map(&net, &h, &ev, &d)?;
    let mut report = Report::new(common.json);
    report_ordering(&mut report, &d, &names);
    report.result(&r, &names);
    if common.oracle {
        report_oracle(&mut report, &r, &names, oracle::oracle_map(&net, &h, &ev, &d));
    }
    if common.trace {
        report_trace(&mut report, &r, &names);
    }
    finish(report)
}

fn meu(path: &Path, common: &Common, err: &mut dyn Write) -> Outcome<(String, i32)> {
    let id: InfluenceDiagram = match load_model(path, common.lax, err)? {
        Model::Influence(id) => id,
        Model::Bayes(_) => {
            return Err(Failure::Input(format!(
                "{}: expected an ID model, found a belief network",
                path.display()
            )))
        }
    };
    let net = id.network();
    let names = names_of(net);
    let ev = load_evidence(common, net)?;
    let d = query_ordering(common, net, &augmented_graph(&id), id.decisions(), &ev.variables())?;
    let r = engines::elim_meu(&id, &ev, &d)?;
    let mut report = Report::new(common.json);
    report_ordering(&mut report, &d, &names);
    report.result(&r, &names);
    if common.oracle {
        report_oracle(&mut report, &r, &names, oracle::oracle_meu(&id, &ev, &d));
    }
    if common.trace {
        report_trace(&mut report, &r, &names);
    }
    finish(report)
}

fn cond_mpe(
    path: &Path,
    cutset: &[String],
    wbound: Option<usize>,
    parallel: usize,
    common: &Common,
    err: &mut dyn Write,
) -> Outcome<(String, i32)> {
    let net = load_network(path, common, err)?;
    let names = names_of(&net);
    let ev = load_evidence(common, &net)?;
    let g = moral_graph(&net);
    let c = match wbound {
        Some(w) => cutset_heuristic(&g.without(&ev.variables()), w),
        None => resolve_all(&net, cutset)?,
    };
    let mut removed = ev.variables();
    removed.extend(&c);
    let d = query_ordering(common, &net, &g, &[], &removed)?;
    let r = engines::elim_cond_max(&net, &c, &ev, &d, &CondOptions { parallel })?;
    let mut report = Report::new(common.json);
    report_ordering(&mut report, &d, &names);
    let mut sorted = c.clone();
    sorted.sort_unstable();
    report.line(
        "cutset",
        named(&sorted, &names),
        json!(sorted.iter().map(|&v| names[v].clone()).collect::<Vec<_>>()),
    );
    report.result(&r, &names);
    if common.oracle {
        report_oracle(&mut report, &r, &names, oracle::oracle_mpe(&net, &ev, &d));
    }
    if common.trace {
        report_trace(&mut report, &r, &names);
    }
    finish(report)
}

fn load_cnf(path: &Path, err: &mut dyn Write) -> Outcome<CnfTheory> {
    let parsed = parse_cnf(&read(path)?).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    for w in &parsed.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    Ok(parsed.model)
}

/// Proposition ordering from one-based DIMACS numbers or a heuristic.
fn cnf_ordering(common: &Common, cnf: &CnfTheory) -> Outcome<Ordering> {
    match order_spec(common)?.unwrap_or(OrderSpec::Heuristic(OrderingKind::MinFill)) {
        OrderSpec::Explicit(tokens) => {
            let ids = tokens
                .iter()
                .map(|t| match t.trim_start_matches(['Q', 'q']).parse::<usize>() {
                    Ok(k) if k >= 1 && k <= cnf.num_props() => Ok(k - 1),
                    _ => Err(Failure::Usage(format!("`{t}` is not a proposition number"))),
                })
                .collect::<Outcome<Vec<_>>>()?;
            explicit_ordering(ids)
        }
        OrderSpec::Heuristic(kind) => Ok(constrained_order(&interaction_graph(cnf), &[], &[], &kind)?),
    }
}

fn dr(path: &Path, extension: Option<&Path>, common: &Common) -> Outcome<(String, i32)> {
    let cnf = load_cnf(path, &mut std::io::sink())?;
    let d = cnf_ordering(common, &cnf)?;
    let ext = directional_resolution(&cnf, &d)?;
    let mut report = Report::new(common.json);
    let order: Vec<usize> = d.sequence().iter().map(|p| p + 1).collect();
    report.line(
        "ordering",
        order.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" "),
        json!(order),
    );
    let sat = ext.is_satisfiable();
    report.line(
        "status",
        if sat { "SAT" } else { "UNSAT" },
        json!(if sat { "SAT" } else { "UNSAT" }),
    );
    report.line("clauses", ext.clause_count(), json!(ext.clause_count()));
    report.line(
        "max_bucket_scope",
        ext.max_bucket_scope(),
        json!(ext.max_bucket_scope()),
    );
    if sat {
        let m = generate_model(&ext)?;
        let lits: Vec<i64> = m
            .iter()
            .enumerate()
            .map(|(i, &b)| if b { i as i64 + 1 } else { -(i as i64 + 1) })
            .collect();
        report.line(
            "model",
            lits.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" "),
            json!(lits),
        );
    }
    if common.oracle {
        match oracle::oracle_models(&cnf) {
            Ok(models) => {
                let osat = !models.is_empty();
                report.line(
                    "oracle_status",
                    if osat { "SAT" } else { "UNSAT" },
                    json!(if osat { "SAT" } else { "UNSAT" }),
                );
                let equivalent = if sat {
                    oracle::oracle_models(&ext.theory())? == models
                } else {
                    !osat
                };
                report.line("oracle_agrees", equivalent, json!(equivalent));
            }
            Err(e) => report.line("oracle", format!("skipped ({e})"), json!(format!("skipped ({e})"))),
        }
    }
    if common.trace {
        let mut lines = Vec::new();
        for pos in (0..d.len()).rev() {
            let b = ext.bucket(pos);
            let clauses: Vec<String> = b.iter().map(|c| c.to_string()).collect();
            lines.push(format!(
                "bucket={} pos={} size={} clauses={}",
                d.at(pos) + 1,
                pos + 1,
                b.len(),
                clauses.join(",")
            ));
        }
        for l in &lines {
            report.raw(&format!("trace={l}\n"));
        }
        report.json.insert("trace".into(), json!(lines));
    }
    if let Some(out) = extension {
        std::fs::write(out, ext.to_dimacs())
            .map_err(|e| Failure::Input(format!("cannot write {}: {e}", out.display())))?;
    }
    Ok((report.finish(), if sat { EXIT_OK } else { EXIT_NO_SOLUTION }))
}

fn looks_like_dimacs(text: &str) -> bool {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('c') && !l.starts_with('#'))
        .is_some_and(|l| l.starts_with("p "))
}

fn width_json(r: &WidthReport) -> Value {
    json!({ "w": r.width, "wstar": r.induced_width, "fill": r.fill_edges.len() })
}

fn stats(path: &Path, common: &Common, err: &mut dyn Write) -> Outcome<(String, i32)> {
    let text = read(path)?;
    let mut report = Report::new(common.json);
    let (graph, names, kind, explicit) = if looks_like_dimacs(&text) {
        let cnf = load_cnf(path, err)?;
        let names: Vec<String> = (1..=cnf.num_props()).map(|p| p.to_string()).collect();
        let explicit = match order_spec(common)? {
            Some(OrderSpec::Explicit(_)) => Some(cnf_ordering(common, &cnf)?),
            _ => None,
        };
        (interaction_graph(&cnf), names, "interaction", explicit)
    } else {
        let model = load_model(path, common.lax, err)?;
        let (graph, kind) = match &model {
            Model::Bayes(net) => (moral_graph(net), "moral"),
            Model::Influence(id) => (augmented_graph(id), "augmented"),
        };
        let net = model.network();
        let explicit = match order_spec(common)? {
            Some(OrderSpec::Explicit(list)) => Some(explicit_ordering(resolve_all(net, &list)?)?),
            _ => None,
        };
        (graph, names_of(net), kind, explicit)
    };
    report.line("graph", kind, json!(kind));
    report.line("nodes", graph.len(), json!(graph.len()));
    report.line("edges", graph.edge_count(), json!(graph.edge_count()));
    let heuristics: Vec<(&str, OrderingKind)> = match (&explicit, order_spec(common)?) {
        (Some(_), _) => Vec::new(),
        (None, Some(OrderSpec::Heuristic(k))) => vec![(
            if k == OrderingKind::MinFill {
                "min-fill"
            } else {
                "min-degree"
            },
            k,
        )],
        (None, _) => vec![
            ("min-degree", OrderingKind::MinDegree),
            ("min-fill", OrderingKind::MinFill),
        ],
    };
    if let Some(d) = explicit {
        if d.len() != graph.len() {
            return Err(Failure::Usage(format!(
                "ordering covers {} nodes, graph has {}",
                d.len(),
                graph.len()
            )));
        }
        let r = induced_width(&graph, &d);
        report_ordering(&mut report, &d, &names);
        report.raw(&format!("{r}\n"));
        report.json.insert("width".into(), width_json(&r));
    }
    let mut per = Map::new();
    for (label, kind) in heuristics {
        let d = constrained_order(&graph, &[], &[], &kind)?;
        let r = induced_width(&graph, &d);
        report.raw(&format!(
            "heuristic={label}\nordering={}\n{r}\n",
            named(d.sequence(), &names)
        ));
        per.insert(
            label.to_string(),
            json!({ "ordering": d.sequence().iter().map(|&v| names[v].clone()).collect::<Vec<_>>(), "width": width_json(&r) }),
        );
    }
    if !per.is_empty() {
        report.json.insert("heuristics".into(), Value::Object(per));
    }
    finish(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(args.iter().copied(), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_capture(&["bucketforge"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["bucketforge", "frobnicate"]).0, EXIT_USAGE);
        assert_eq!(run_capture(&["bucketforge", "cond-mpe", "x.net"]).0, EXIT_USAGE);
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["bucketforge", "--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("cond-mpe"));
    }

    #[test]
    fn missing_file_is_a_model_error() {
        let (code, _, err) = run_capture(&["bucketforge", "mpe", "/nonexistent/model.net"]);
        assert_eq!(code, EXIT_MODEL);
        assert!(err.starts_with("error: cannot read"));
    }

    #[test]
    fn dimacs_detection() {
        assert!(looks_like_dimacs("c comment\np cnf 1 1\n1 0\n"));
        assert!(!looks_like_dimacs("BAYES\n1\n2\n"));
    }
}
