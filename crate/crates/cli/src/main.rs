//! `daf`: answer obligation queries against a knowledge-base file and
//! export the argument graph behind the answer.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use daf_core::consequence::entails_with;
use daf_core::{
    evaluate, parse_kb_with, parse_query, to_dot, DafError, Engine, Evaluation, Formula,
    GenerationConfig, GraphDump, KbOptions, KnowledgeBase, SemanticsVariant, Verdict,
};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "daf",
    version,
    about = "Deontic argumentation queries over knowledge-base files"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether `O <formula>` follows from a knowledge base.
    Query(QueryArgs),
    /// Write the argument graph of a knowledge base as DOT and/or JSON.
    Export(ExportArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Semantics {
    Basic,
    Spec,
    Prio,
    Shadow,
}

impl From<Semantics> for SemanticsVariant {
    fn from(s: Semantics) -> Self {
        match s {
            Semantics::Basic => SemanticsVariant::Basic,
            Semantics::Spec => SemanticsVariant::Spec,
            Semantics::Prio => SemanticsVariant::Prio,
            Semantics::Shadow => SemanticsVariant::Shadow,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EngineArg {
    Fixpoint,
    Fast,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Output {
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    /// Knowledge-base file.
    #[arg(short = 'k', long = "kb", value_name = "FILE")]
    kb: PathBuf,
    #[arg(short = 's', long, value_enum, default_value = "basic")]
    semantics: Semantics,
    /// Whether plain facts count as settled.
    #[arg(long, value_enum, default_value = "on")]
    facts_settled: Switch,
    #[arg(long, value_name = "N", default_value_t = GenerationConfig::default().max_aggregate_arity)]
    max_aggregate_arity: usize,
    #[arg(long, value_name = "N", default_value_t = GenerationConfig::default().build_rounds)]
    build_rounds: usize,
    #[arg(long, value_name = "N", default_value_t = GenerationConfig::default().max_doubt_theta)]
    max_doubt_theta: usize,
    #[arg(long, value_name = "N", default_value_t = GenerationConfig::default().max_conditional_uses)]
    max_conditional_uses: usize,
    /// Largest universe built before giving up with exit status 3.
    #[arg(long, value_name = "N", env = "DAF_HARD_CAP", default_value_t = GenerationConfig::default().hard_cap)]
    hard_cap: usize,
}

impl Common {
    fn config(&self) -> GenerationConfig {
        GenerationConfig {
            max_aggregate_arity: self.max_aggregate_arity,
            build_rounds: self.build_rounds,
            max_doubt_theta: self.max_doubt_theta,
            max_conditional_uses: self.max_conditional_uses,
            hard_cap: self.hard_cap,
            ..GenerationConfig::default()
        }
    }

    fn load(&self) -> Result<KnowledgeBase, Failure> {
        let text = fs::read_to_string(&self.kb).map_err(|e| Failure::io(&self.kb, e))?;
        let options = KbOptions {
            facts_settled: self.facts_settled == Switch::On,
            ..KbOptions::default()
        };
        parse_kb_with(&text, options)
            .map_err(|e| Failure::Daf(format!("{}: ", self.kb.display()), e))
    }
}

#[derive(Args)]
struct QueryArgs {
    #[command(flatten)]
    common: Common,
    /// Query of the form "O <formula>".
    #[arg(required_unless_present = "queries", conflicts_with = "queries")]
    query: Option<String>,
    /// File with one query per line, evaluated in order.
    #[arg(long, value_name = "FILE")]
    queries: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "fixpoint")]
    engine: EngineArg,
    #[arg(long, value_enum, default_value = "text")]
    output: Output,
    /// Also write the argument graph as Graphviz DOT.
    #[arg(long, value_name = "PATH", conflicts_with = "queries")]
    dot: Option<PathBuf>,
    /// Also write the argument graph as JSON.
    #[arg(long, value_name = "PATH", conflicts_with = "queries")]
    dump: Option<PathBuf>,
    /// Exit with 1 when a query is not derivable.
    #[arg(long)]
    exit_status: bool,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    common: Common,
    /// Query whose formula is added as a weakening target.
    #[arg(long)]
    query: Option<String>,
    #[arg(long, value_name = "PATH")]
    dot: Option<PathBuf>,
    #[arg(long, value_name = "PATH")]
    json: Option<PathBuf>,
}

enum Failure {
    Io(String),
    Usage(String),
    Daf(String, DafError),
}

impl Failure {
    fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::Io(format!("{}: {e}", path.display()))
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Daf(_, DafError::BoundExceeded { .. }) => 3,
            _ => 2,
        }
    }

    fn message(&self) -> String {
        match self {
            Failure::Io(m) | Failure::Usage(m) => m.clone(),
            Failure::Daf(context, e) => format!("{context}{e}"),
        }
    }
}

impl From<DafError> for Failure {
    fn from(e: DafError) -> Self {
        Failure::Daf(String::new(), e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Query(args) => run_query(&args),
        Command::Export(args) => run_export(&args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("daf: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}

fn read_queries(path: &Path) -> Result<Vec<Formula>, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::io(path, e))?;
    let mut queries = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let q = parse_query(line)
            .map_err(|e| Failure::Daf(format!("{} line {}: ", path.display(), n + 1), e))?;
        queries.push(q);
    }
    Ok(queries)
}

fn run_query(args: &QueryArgs) -> Result<u8, Failure> {
    let variant = SemanticsVariant::from(args.common.semantics);
    let fast = args.engine == EngineArg::Fast;
    if fast && variant != SemanticsVariant::Basic {
        return Err(Failure::Usage(
            "the fast engine only decides basic semantics".into(),
        ));
    }
    if fast && (args.dot.is_some() || args.dump.is_some()) {
        return Err(Failure::Usage(
            "graph output needs the fixpoint engine".into(),
        ));
    }
    let cfg = args.common.config();
    cfg.validate()?;
    let kb = args.common.load()?;
    let queries = match (&args.query, &args.queries) {
        (Some(text), _) => vec![parse_query(text).map_err(|e| Failure::Daf("query: ".into(), e))?],
        (None, Some(path)) => read_queries(path)?,
        (None, None) => unreachable!("clap requires a query"),
    };
    let batch = args.queries.is_some();

    let mut out = io::stdout().lock();
    let mut all_derivable = true;
    for query in &queries {
        let (verdict, evaluation) = if fast {
            (
                entails_with(&kb, variant, Engine::FastBasic, query, &cfg)?,
                None,
            )
        } else {
            let e = evaluate(&kb, variant, Some(query), &cfg)?;
            (e.verdict(query), Some(e))
        };
        all_derivable &= verdict.derivable;
        let dump = evaluation.as_ref().map(GraphDump::new);
        let text = match args.output {
            Output::Text => render_text(&verdict),
            Output::Json => render_json(&verdict, dump.as_ref(), !batch),
        };
        out.write_all(text.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| Failure::Io(format!("stdout: {e}")))?;
        if let Some(dump) = &dump {
            write_graph(dump, args.dot.as_deref(), args.dump.as_deref())?;
        }
    }
    Ok(if args.exit_status && !all_derivable {
        1
    } else {
        0
    })
}

fn render_text(verdict: &Verdict) -> String {
    let mut text = format!("{verdict}\n");
    if let Some(w) = &verdict.witness {
        text.push_str(&format!("witness {}:\n", w.id));
        for line in w.proof.lines() {
            text.push_str(&format!("  {line}\n"));
        }
    }
    text
}

#[derive(Serialize)]
struct Record<'a> {
    verdict: &'a Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    graph: Option<&'a GraphDump>,
}

/// One record per query; batch runs print one compact record per line.
fn render_json(verdict: &Verdict, graph: Option<&GraphDump>, pretty: bool) -> String {
    let record = Record { verdict, graph };
    let mut text = if pretty {
        serde_json::to_string_pretty(&record)
    } else {
        serde_json::to_string(&record)
    }
    .expect("record serializes");
    text.push('\n');
    text
}

fn write_graph(dump: &GraphDump, dot: Option<&Path>, json: Option<&Path>) -> Result<(), Failure> {
    if let Some(path) = dot {
        fs::write(path, to_dot(dump)).map_err(|e| Failure::io(path, e))?;
    }
    if let Some(path) = json {
        fs::write(path, dump.to_json()).map_err(|e| Failure::io(path, e))?;
    }
    Ok(())
}

fn run_export(args: &ExportArgs) -> Result<u8, Failure> {
    if args.dot.is_none() && args.json.is_none() {
        return Err(Failure::Usage(
            "nothing to export: pass --dot and/or --json".into(),
        ));
    }
    let cfg = args.common.config();
    cfg.validate()?;
    let kb = args.common.load()?;
    let query = match &args.query {
        Some(text) => Some(parse_query(text).map_err(|e| Failure::Daf("query: ".into(), e))?),
        None => None,
    };
    let variant = SemanticsVariant::from(args.common.semantics);
    let evaluation: Evaluation = evaluate(&kb, variant, query.as_ref(), &cfg)?;
    write_graph(
        &GraphDump::new(&evaluation),
        args.dot.as_deref(),
        args.json.as_deref(),
    )?;
    Ok(0)
}
