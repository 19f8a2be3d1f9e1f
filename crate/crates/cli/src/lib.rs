//! The `feaso` command line: interactive consultations, batch assessment,
//! knowledge-base validation, explanations and what-if comparisons.
//!
//! Commands read from and write to the streams they are given, so tests can
//! drive them without a terminal. Exit codes: 0 success, 1 the assessment
//! ran and the verdict is infeasible, 2 bad input, 3 internal failure.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use feaso_core::feasibility::BUNDLED_KB;
use feaso_core::kb::answers::parse_answers;
use feaso_core::kb::{load_kb, Answer, AttrType, Diagnostic, KnowledgeBase};
use feaso_core::session::log::LogError;
use feaso_core::session::report::{format_payback, render};
use feaso_core::session::whatif::Delta;
use feaso_core::session::{parse_answer_text, ExplainMode, Format, Question, Session, SessionError, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INFEASIBLE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad arguments, unreadable or invalid files, invalid answers.
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Internal(#[from] anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

impl From<SessionError> for CliError {
    fn from(e: SessionError) -> Self {
        match e {
            SessionError::Engine(e) => CliError::Internal(e.into()),
            other => CliError::Input(other.to_string()),
        }
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Parser)]
#[command(name = "feaso", version, about = "Assess whether a knowledge-based system is worth building")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Md,
    Json,
}

impl From<ReportFormat> for Format {
    fn from(f: ReportFormat) -> Self {
        match f {
            ReportFormat::Md => Format::Markdown,
            ReportFormat::Json => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    How,
    Why,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Interview on the terminal. Answers are saved after every question.
    Consult {
        /// Knowledge base file (default: $FEASO_KB, else the bundled one).
        kb: Option<PathBuf>,
        /// Session file to resume and keep up to date.
        #[arg(long)]
        session: Option<PathBuf>,
    },
    /// Assess a complete or partial answer file and write a report.
    Assess {
        kb: Option<PathBuf>,
        #[arg(long)]
        answers: PathBuf,
        /// Report destination (default: standard output).
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "md")]
        format: ReportFormat,
    },
    /// Check a knowledge base and print its diagnostics.
    Validate { kb: Option<PathBuf> },
    /// Explain how an attribute was concluded, or why it is being asked.
    Explain {
        kb: Option<PathBuf>,
        /// Session file or answer file.
        #[arg(long)]
        session: PathBuf,
        #[arg(long)]
        attribute: String,
        #[arg(long, value_enum, default_value = "how")]
        mode: Mode,
    },
    /// Compare an assessment with one where some answers are changed.
    Whatif {
        kb: Option<PathBuf>,
        #[arg(long)]
        answers: PathBuf,
        /// An override, `attribute=value`; repeatable.
        #[arg(long = "set", value_name = "ATTR=VALUE")]
        set: Vec<String>,
        /// `md` prints a summary of the changes; `json` the full comparison.
        #[arg(long, value_enum, default_value = "md")]
        format: ReportFormat,
    },
    /// Serve the HTTP API.
    Serve {
        kb: Option<PathBuf>,
        #[arg(long, env = "FEASO_STORE", default_value = "sessions")]
        store: PathBuf,
        #[arg(long, env = "FEASO_LISTEN", default_value = "127.0.0.1:8080")]
        listen: std::net::SocketAddr,
    },
}

/// Input and output streams for a command.
pub struct Io<'a> {
    pub stdin: &'a mut dyn BufRead,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

fn internal(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Internal(e.into())
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))
}

fn render_diagnostics(file: &str, diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("{file}:{d}\n")).collect()
}

/// Resolves the knowledge base: an explicit path, then `$FEASO_KB`, then
/// the bundled one.
fn kb_source(path: Option<&Path>) -> CliResult<(String, String)> {
    let path = path.map(Path::to_path_buf).or_else(|| std::env::var_os("FEASO_KB").map(PathBuf::from));
    match path {
        Some(p) => Ok((p.display().to_string(), read(&p)?)),
        None => Ok(("<bundled>".into(), BUNDLED_KB.to_string())),
    }
}

fn load(path: Option<&Path>, io: &mut Io) -> CliResult<Arc<KnowledgeBase>> {
    let (name, src) = kb_source(path)?;
    match load_kb(&src) {
        Ok((kb, warnings)) => {
            io.stderr.write_all(render_diagnostics(&name, &warnings).as_bytes()).map_err(internal)?;
            Ok(Arc::new(kb))
        }
        Err(diags) => Err(CliError::Input(format!("invalid knowledge base\n{}", render_diagnostics(&name, &diags).trim_end()))),
    }
}

fn load_answers(kb: &KnowledgeBase, path: &Path) -> CliResult<Vec<(String, Answer)>> {
    let src = read(path)?;
    match parse_answers(kb, &src) {
        Ok(lines) => Ok(lines.into_iter().map(|l| (l.attribute, l.answer)).collect()),
        Err(diags) => Err(CliError::Input(format!(
            "invalid answers\n{}",
            render_diagnostics(&path.display().to_string(), &diags).trim_end()
        ))),
    }
}

/// A session from a session file, or from a plain answer file.
fn load_session(kb: Arc<KnowledgeBase>, path: &Path) -> CliResult<Session> {
    let src = read(path)?;
    if src.starts_with("# feaso-session") {
        Session::from_log(kb, &src).map_err(|e| match e {
            LogError::Session(SessionError::Engine(e)) => internal(e),
            other => CliError::Input(format!("{}: {other}", path.display())),
        })
    } else {
        let answers = load_answers(&kb, path)?;
        Ok(Session::from_answers(kb, answers)?)
    }
}

pub fn run(cli: Cli, io: &mut Io) -> i32 {
    match dispatch(cli.command, io) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.stderr, "feaso: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(command: Command, io: &mut Io) -> CliResult<i32> {
    match command {
        Command::Consult { kb, session } => consult(load(kb.as_deref(), io)?, session.as_deref(), io),
        Command::Assess { kb, answers, out, format } => {
            assess(load(kb.as_deref(), io)?, &answers, out.as_deref(), format.into(), io)
        }
        Command::Validate { kb } => validate(kb.as_deref(), io),
        Command::Explain { kb, session, attribute, mode } => explain(load(kb.as_deref(), io)?, &session, &attribute, mode, io),
        Command::Whatif { kb, answers, set, format } => whatif(load(kb.as_deref(), io)?, &answers, &set, format, io),
        Command::Serve { kb, store, listen } => {
            let kb = load(kb.as_deref(), io)?;
            let rt = tokio::runtime::Runtime::new().map_err(internal)?;
            rt.block_on(feaso_service::serve(kb, feaso_service::Config { store, listen }))?;
            Ok(EXIT_OK)
        }
    }
}

fn verdict_exit(overall: Verdict) -> i32 {
    if overall == Verdict::Infeasible {
        EXIT_INFEASIBLE
    } else {
        EXIT_OK
    }
}

pub fn assess(kb: Arc<KnowledgeBase>, answers: &Path, out: Option<&Path>, format: Format, io: &mut Io) -> CliResult<i32> {
    let lines = load_answers(&kb, answers)?;
    let assessment = Session::from_answers(kb, lines)?.assess()?;
    let report = render(&assessment, format);
    match out {
        Some(path) => fs::write(path, &report).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))?,
        None => io.stdout.write_all(report.as_bytes()).map_err(internal)?,
    }
    Ok(verdict_exit(assessment.overall))
}

pub fn validate(kb: Option<&Path>, io: &mut Io) -> CliResult<i32> {
    let (name, src) = kb_source(kb)?;
    let (diags, ok) = match load_kb(&src) {
        Ok((kb, warnings)) => {
            writeln!(io.stdout, "{name}: ok ({} rules, {} attributes)", kb.rules.len(), kb.attributes.len()).map_err(internal)?;
            (warnings, true)
        }
        Err(diags) => (diags, false),
    };
    io.stderr.write_all(render_diagnostics(&name, &diags).as_bytes()).map_err(internal)?;
    Ok(if ok { EXIT_OK } else { EXIT_INPUT })
}

pub fn explain(kb: Arc<KnowledgeBase>, session: &Path, attribute: &str, mode: Mode, io: &mut Io) -> CliResult<i32> {
    let session = load_session(kb, session)?;
    let mode = match mode {
        Mode::How => ExplainMode::How,
        Mode::Why => ExplainMode::Why,
    };
    let explanation = session.explain(attribute, mode).map_err(|e| match e {
        SessionError::Engine(e) => CliError::Input(e.to_string()),
        other => other.into(),
    })?;
    io.stdout.write_all(explanation.render().as_bytes()).map_err(internal)?;
    Ok(EXIT_OK)
}

fn parse_overrides(kb: &KnowledgeBase, set: &[String]) -> CliResult<BTreeMap<String, Answer>> {
    set.iter()
        .map(|s| {
            let (attr, value) = s
                .split_once('=')
                .ok_or_else(|| CliError::Input(format!("`--set {s}`: expected attribute=value")))?;
            let attr = attr.trim();
            Ok((attr.to_string(), parse_answer_text(kb, attr, value)?))
        })
        .collect()
}

/// A plain-text summary of a delta, one change per line.
pub fn describe_delta(delta: &Delta) -> String {
    if delta.is_empty() {
        return "no change\n".into();
    }
    let mut out = String::new();
    if let Some(o) = &delta.overall {
        out += &format!("overall: {} -> {}\n", o.before, o.after);
    }
    for d in &delta.dimensions {
        out += &format!("{}: {} -> {}\n", d.dimension, d.before, d.after);
    }
    for c in &delta.caveats_added {
        out += &format!("caveat added: {c}\n");
    }
    for c in &delta.caveats_removed {
        out += &format!("caveat removed: {c}\n");
    }
    if let Some(p) = &delta.payback {
        let show = |m: Option<f64>| m.map(format_payback).unwrap_or_else(|| "not determined".into());
        out += &format!("payback: {} -> {}\n", show(p.before), show(p.after));
    }
    for v in &delta.values {
        let show = |d: &Option<feaso_core::session::assessment::DerivedValue>| match d {
            Some(d) => format!("{} (cf {:.2})", d.value.to_source(), d.cf),
            None => "-".into(),
        };
        out += &format!("{}: {} -> {}\n", v.attribute, show(&v.before), show(&v.after));
    }
    out
}

pub fn whatif(kb: Arc<KnowledgeBase>, answers: &Path, set: &[String], format: ReportFormat, io: &mut Io) -> CliResult<i32> {
    let overrides = parse_overrides(&kb, set)?;
    let lines = load_answers(&kb, answers)?;
    let result = Session::from_answers(kb, lines)?.whatif(&overrides)?;
    let text = match format {
        ReportFormat::Json => serde_json::to_string_pretty(&result).map_err(internal)? + "\n",
        ReportFormat::Md => describe_delta(&result.delta),
    };
    io.stdout.write_all(text.as_bytes()).map_err(internal)?;
    Ok(verdict_exit(result.scenario.overall))
}

fn domain_hint(kind: &AttrType) -> String {
    match kind {
        AttrType::Bool => "yes/no".into(),
        AttrType::Enum { values } => values.join("/"),
        AttrType::Number { unit: Some(u) } => format!("number, {}", u.replace('_', " ")),
        AttrType::Number { unit: None } => "number".into(),
        AttrType::Text => "text".into(),
    }
}

fn ask(q: &Question, out: &mut dyn Write) -> std::io::Result<()> {
    write!(out, "\n{} [{}]\n> ", q.prompt, domain_hint(&q.kind))?;
    out.flush()
}

fn save(session: &Session, path: Option<&Path>) -> CliResult<()> {
    if let Some(p) = path {
        fs::write(p, session.to_log()).map_err(|e| CliError::Input(format!("cannot write {}: {e}", p.display())))?;
    }
    Ok(())
}

/// The interactive loop. Besides answers (optionally `<value> cf <x>`), it
/// accepts `unknown`, `why` and `back`. The report is printed when no
/// questions remain, or when input ends early.
pub fn consult(kb: Arc<KnowledgeBase>, session_path: Option<&Path>, io: &mut Io) -> CliResult<i32> {
    let mut session = match session_path {
        Some(p) if p.exists() => load_session(kb, p)?,
        _ => Session::start(kb),
    };
    save(&session, session_path)?;
    let mut line = String::new();
    while let Some(q) = session.next_question()? {
        ask(&q, io.stdout).map_err(internal)?;
        line.clear();
        if io.stdin.read_line(&mut line).map_err(internal)? == 0 {
            writeln!(io.stdout, "\n(input ended; the report below is partial)").map_err(internal)?;
            break;
        }
        match line.trim() {
            "" => {}
            "why" => {
                let text = session.explain(&q.attribute, ExplainMode::Why)?.render();
                io.stdout.write_all(text.as_bytes()).map_err(internal)?;
            }
            "back" => match session.undo() {
                Some(e) => {
                    writeln!(io.stdout, "(withdrew the answer to {})", e.attribute).map_err(internal)?;
                    save(&session, session_path)?;
                }
                None => writeln!(io.stdout, "(nothing to withdraw)").map_err(internal)?,
            },
            text => match session.submit_text(&q.attribute, text) {
                Ok(_) => save(&session, session_path)?,
                Err(e @ SessionError::Engine(_)) => return Err(e.into()),
                Err(e) => writeln!(io.stdout, "{e}").map_err(internal)?,
            },
        }
    }
    let assessment = session.assess()?;
    writeln!(io.stdout).map_err(internal)?;
    io.stdout.write_all(render(&assessment, Format::Markdown).as_bytes()).map_err(internal)?;
    Ok(EXIT_OK)
}
