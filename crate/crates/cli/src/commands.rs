//! The `msc` command line: argument parsing, dispatch and output assembly.

use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use msc_core::calculus::exterior_derivative;
use msc_core::connections::{induce, Bundle};
use msc_core::hamiltonian::{
    de_donder_weyl_field, is_poisson_form, kernel_basis, momentum_map, poisson_bracket, solve_hamiltonian_field,
    wedge_all, HamiltonianPair,
};
use msc_core::multiphase::omega;
use msc_core::{Chart, Form, Scalar};
use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::dsl::{parse, Document, DslError, Value};
use crate::suites::{run_suite, Context, Suite};

/// Version of the `--json` output layout.
pub const SCHEMA: u32 = 1;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Dsl(#[from] DslError),
    #[error("{0}")]
    Core(#[from] msc_core::Error),
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    NotPoisson(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::NotPoisson(_) | CliError::Core(msc_core::Error::NotPoisson(_)) => 2,
            _ => 1,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Exit code and captured streams of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "msc", version, about = "Exact exterior calculus on multiphase space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Output {
    /// Emit structured JSON instead of canonical text.
    #[arg(long, global = true)]
    json: bool,
    /// Report wall-clock time.
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Args, Debug, Clone)]
struct Source {
    /// `.msc` document providing the chart and named definitions.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Space-time dimension when no document is given.
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Fiber dimension when no document is given.
    #[arg(long = "N", default_value_t = 1)]
    fields: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run identity suites.
    Check {
        /// schouten, calculus, multiphase, poisson, vertical, connections or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long = "N", default_value_t = 1)]
        fields: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 25)]
        trials: usize,
        /// Largest tensor degree sampled by the Schouten suite.
        #[arg(long, default_value_t = 3)]
        max_degree: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Poisson bracket of two forms.
    Bracket {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[command(flatten)]
        output: Output,
    },
    /// Constant kernel of contraction with omega.
    Kernel {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        degree: usize,
        #[command(flatten)]
        output: Output,
    },
    /// Hamiltonian multivector field of a form.
    Solve {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        f: String,
        #[command(flatten)]
        output: Output,
    },
    /// Universal multimomentum map of an exact Hamiltonian field.
    MomentumMap {
        #[command(flatten)]
        source: Source,
        #[arg(long = "X")]
        x: String,
        #[command(flatten)]
        output: Output,
    },
    /// De Donder-Weyl field of a Hamiltonian density.
    Ddw {
        #[command(flatten)]
        source: Source,
        #[arg(long = "H")]
        h: String,
        #[command(flatten)]
        output: Output,
    },
    /// Connection induced on a derived bundle.
    Connection {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        bundle: String,
        #[command(flatten)]
        output: Output,
    },
    /// Evaluate a document or a single expression.
    Eval {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        expr: Option<String>,
        #[command(flatten)]
        output: Output,
    },
}

impl Command {
    fn output(&self) -> &Output {
        match self {
            Command::Check { output, .. }
            | Command::Bracket { output, .. }
            | Command::Kernel { output, .. }
            | Command::Solve { output, .. }
            | Command::MomentumMap { output, .. }
            | Command::Ddw { output, .. }
            | Command::Connection { output, .. }
            | Command::Eval { output, .. } => output,
        }
    }
}

/// Text or JSON produced by a successful command.
struct Report {
    text: String,
    json: Json,
    code: i32,
}

impl Report {
    fn ok(text: String, json: Json) -> Report {
        Report { text, json, code: 0 }
    }
}

/// Parse `argv` (including the program name) and run the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let rendered = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    Outcome { code: 0, stdout: rendered, stderr: String::new() }
                }
                _ => Outcome { code: 1, stdout: String::new(), stderr: rendered },
            };
        }
    };
    let output = cli.command.output().clone();
    let start = Instant::now();
    let result = dispatch(&cli.command);
    let elapsed = start.elapsed().as_secs_f64();
    match result {
        Ok(report) => {
            let mut stdout = if output.json {
                let mut json = report.json;
                json["schema"] = json!(SCHEMA);
                if output.timing {
                    json["wall_seconds"] = json!(elapsed);
                }
                format!("{}\n", serde_json::to_string_pretty(&json).expect("serializable"))
            } else {
                report.text
            };
            if !output.json && output.timing && !matches!(cli.command, Command::Check { .. }) {
                stdout.push_str(&format!("# {elapsed:.3} s\n"));
            }
            Outcome { code: report.code, stdout, stderr: String::new() }
        }
        Err(e) => {
            let code = e.exit_code();
            let stdout = if output.json {
                let json = json!({ "schema": SCHEMA, "error": e.to_string(), "exit_code": code });
                format!("{}\n", serde_json::to_string_pretty(&json).expect("serializable"))
            } else {
                String::new()
            };
            Outcome { code, stdout, stderr: format!("error: {e}\n") }
        }
    }
}

fn dispatch(command: &Command) -> CliResult<Report> {
    match command {
        Command::Check { suite, n, fields, seed, trials, max_degree, output } => {
            check(suite, *n, *fields, *seed, *trials, *max_degree, output.timing)
        }
        Command::Bracket { source, f, g, .. } => bracket(&load(source)?, f, g),
        Command::Kernel { source, degree, .. } => kernel(&load(source)?, *degree),
        Command::Solve { source, f, .. } => solve(&load(source)?, f),
        Command::MomentumMap { source, x, .. } => momentum(&load(source)?, x),
        Command::Ddw { source, h, .. } => ddw(&load(source)?, h),
        Command::Connection { source, bundle, .. } => connection(&load(source)?, bundle),
        Command::Eval { source, expr, .. } => eval(&load(source)?, expr.as_deref()),
    }
}

fn load(source: &Source) -> CliResult<Document> {
    match &source.file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Io { path: path.display().to_string(), message: e.to_string() })?;
            Ok(parse(&text)?)
        }
        None => Ok(Document::new(Chart::extended(source.n, source.fields)?)),
    }
}

/// A defined name, or else an inline expression on the document's chart.
fn resolve(doc: &Document, text: &str) -> CliResult<Value> {
    match doc.get(text) {
        Some(v) => Ok(v.clone()),
        None => Ok(doc.eval_expr(text)?.1),
    }
}

fn form(doc: &Document, text: &str) -> CliResult<Form> {
    resolve(doc, text)?.as_form().ok_or_else(|| CliError::Usage(format!("`{text}` is not a form")))
}

fn extended(doc: &Document) -> CliResult<Chart> {
    let chart = doc.chart();
    if !chart.is_extended() {
        return Err(CliError::Usage(format!("this command needs an extended chart, the document declares {chart}")));
    }
    Ok(chart)
}

fn check(
    suite: &str,
    n: usize,
    fields: usize,
    seed: u64,
    trials: usize,
    max_degree: usize,
    timing: bool,
) -> CliResult<Report> {
    if n == 0 || fields == 0 {
        return Err(CliError::Usage("--n and --N must be positive".into()));
    }
    if max_degree == 0 {
        return Err(CliError::Usage("--max-degree must be positive".into()));
    }
    let suites = match suite {
        "all" => Suite::ALL.to_vec(),
        name => vec![name.parse::<Suite>().map_err(CliError::Usage)?],
    };
    let ctx = Context { n, fields, seed, max_degree };
    let mut text = String::new();
    let mut reports = Vec::new();
    let mut passed = true;
    for s in suites {
        let report = run_suite(s, &ctx, trials)?;
        passed &= report.passed();
        text.push_str(&report.render(timing));
        reports.push(report.to_json(timing));
    }
    let json = json!({ "command": "check", "passed": passed, "reports": reports });
    Ok(Report { text, json, code: if passed { 0 } else { 1 } })
}

fn classified_pair(f: &Form, label: &str) -> CliResult<HamiltonianPair> {
    let class = is_poisson_form(f)?;
    if !class.admits_bracket() {
        return Err(CliError::NotPoisson(format!("{label} = {f} is {class}")));
    }
    Ok(solve_hamiltonian_field(f)?)
}

fn bracket(doc: &Document, f: &str, g: &str) -> CliResult<Report> {
    let chart = extended(doc)?;
    let (a, b) = (classified_pair(&form(doc, f)?, f)?, classified_pair(&form(doc, g)?, g)?);
    let value = poisson_bracket(&a, &b)?;
    let underflow = a.r() + b.r() > chart.n() + 1;
    let mut text = format!("{value}\n");
    if underflow {
        text.push_str("# degree underflow\n");
    }
    let json = json!({
        "command": "bracket",
        "chart": chart.to_string(),
        "f": a.form().to_string(),
        "g": b.form().to_string(),
        "degree": value.degree(),
        "result": value.to_string(),
        "note": if underflow { Some("degree underflow") } else { None },
    });
    Ok(Report::ok(text, json))
}

fn kernel(doc: &Document, degree: usize) -> CliResult<Report> {
    let chart = extended(doc)?;
    let basis = kernel_basis(chart, degree)?;
    let elements: Vec<String> = basis.elements.iter().map(ToString::to_string).collect();
    let mut text = format!("# kernel of degree {degree} on {chart}: {} elements\n", elements.len());
    for e in &elements {
        text.push_str(e);
        text.push('\n');
    }
    let json = json!({ "command": "kernel", "chart": chart.to_string(), "degree": degree, "elements": elements });
    Ok(Report::ok(text, json))
}

fn solve(doc: &Document, f: &str) -> CliResult<Report> {
    let chart = extended(doc)?;
    let f = form(doc, f)?;
    let class = is_poisson_form(&f)?;
    let pair = solve_hamiltonian_field(&f)?;
    let text = format!("form = {}\nfield = {}\n# class {class}\n", pair.form(), pair.field());
    let json = json!({
        "command": "solve",
        "chart": chart.to_string(),
        "form": pair.form().to_string(),
        "field": pair.field().to_string(),
        "degree": pair.r(),
        "class": class.to_string(),
    });
    Ok(Report::ok(text, json))
}

fn momentum(doc: &Document, x: &str) -> CliResult<Report> {
    let chart = extended(doc)?;
    let field = resolve(doc, x)?
        .as_multivector()
        .ok_or_else(|| CliError::Usage(format!("`{x}` is not a multivector field")))?;
    let pair = momentum_map(&field)?;
    let text = format!("{}\n", pair.form());
    let json = json!({
        "command": "momentum-map",
        "chart": chart.to_string(),
        "field": field.to_string(),
        "result": pair.form().to_string(),
    });
    Ok(Report::ok(text, json))
}

fn ddw(doc: &Document, h: &str) -> CliResult<Report> {
    let hamiltonian = match resolve(doc, h)? {
        Value::Scalar(s) => s,
        other => return Err(CliError::Usage(format!("`{h}` is a {}, not a function", other.kind()))),
    };
    let factors = de_donder_weyl_field(&hamiltonian)?;
    let chart = Chart::extended(doc.chart().n(), doc.chart().fields())?;
    let energy = Scalar::coordinate(chart, chart.energy().expect("extended chart"));
    let density = -(&hamiltonian.transfer(chart)? + &energy);
    let field = wedge_all(chart, &factors);
    let holds = omega(chart)?.contract(&field) == exterior_derivative(&Form::scalar(density.clone()));
    let mut text = String::new();
    for (mu, x) in factors.iter().enumerate() {
        text.push_str(&format!("X{} = {x}\n", mu + 1));
    }
    text.push_str(&format!("# i_X omega = dh for h = {density}: {}\n", if holds { "holds" } else { "FAILS" }));
    let json = json!({
        "command": "ddw",
        "chart": chart.to_string(),
        "h": density.to_string(),
        "factors": factors.iter().map(ToString::to_string).collect::<Vec<_>>(),
        "verified": holds,
    });
    Ok(Report { text, json, code: if holds { 0 } else { 1 } })
}

fn connection(doc: &Document, bundle: &str) -> CliResult<Report> {
    let bundle: Bundle = bundle.parse()?;
    let induced = induce(&doc.connection()?, bundle)?;
    let chart = induced.chart;
    let offset = chart.n() + chart.fields();
    let mut text = format!("# {bundle} on {chart}\n");
    let mut entries = Vec::new();
    for (mu, row) in induced.coefficients.iter().enumerate() {
        for (k, c) in row.iter().enumerate() {
            let name = chart.name(offset + k);
            text.push_str(&format!("C[x{}][{name}] = {c}\n", mu + 1));
            entries.push(json!({ "direction": mu + 1, "fiber": name, "coefficient": c.to_string() }));
        }
    }
    let json = json!({ "command": "connection", "bundle": bundle.name(), "chart": chart.to_string(), "coefficients": entries });
    Ok(Report::ok(text, json))
}

fn eval(doc: &Document, expr: Option<&str>) -> CliResult<Report> {
    match expr {
        Some(e) => {
            let value = resolve(doc, e)?;
            let json = json!({
                "command": "eval",
                "chart": doc.chart().to_string(),
                "kind": value.kind(),
                "degree": value.degree(),
                "value": value.to_string(),
            });
            Ok(Report::ok(format!("{value}\n"), json))
        }
        None => {
            let mut text = String::new();
            let mut values = Vec::new();
            for (name, value) in doc.definitions() {
                text.push_str(&format!("{name} = {value}\n"));
                values.push(json!({ "name": name, "kind": value.kind(), "degree": value.degree(), "value": value.to_string() }));
            }
            let json = json!({ "command": "eval", "chart": doc.chart().to_string(), "definitions": values });
            Ok(Report::ok(text, json))
        }
    }
}
