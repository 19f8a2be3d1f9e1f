//! Session event files: a header line followed by answer events in the
//! answer-file format, each stamped with a trailing `# t=<millis>` comment.
//!
//! ```text
//! # feaso-session id=4f0c… kb=feasibility version=1.0.0
//! decision_quality_gap = yes # t=1700000000000
//! users_willing = uncertain cf 0.8 # t=1700000004211
//! ```

use crate::kb::answers::{format_answer, parse_answers};
use crate::kb::{Diagnostic, KnowledgeBase};

use super::{AnswerEvent, SessionError};

const MAGIC: &str = "# feaso-session";

/// Identity recorded in a session file's header.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogHeader {
    pub id: String,
    pub kb_name: String,
    pub kb_version: String,
}

#[derive(Debug, thiserror::Error)]
pub enum LogError {
    #[error("missing or malformed session header")]
    BadHeader,
    #[error("session was recorded against knowledge base {found}, not {expected}")]
    KbMismatch { expected: String, found: String },
    #[error("{}", .0.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n"))]
    Answers(Vec<Diagnostic>),
    #[error(transparent)]
    Session(#[from] SessionError),
}

pub fn format_header(h: &LogHeader) -> String {
    format!("{MAGIC} id={} kb={} version={}\n", h.id, h.kb_name, h.kb_version)
}

pub fn format_event(e: &AnswerEvent) -> String {
    format!("{} # t={}\n", format_answer(&e.attribute, &e.answer), e.at_millis)
}

pub fn parse_header(line: &str) -> Option<LogHeader> {
    let rest = line.trim_end().strip_prefix(MAGIC)?;
    let mut id = None;
    let mut kb_name = None;
    let mut kb_version = None;
    for field in rest.split_whitespace() {
        let (k, v) = field.split_once('=')?;
        match k {
            "id" => id = Some(v.to_string()),
            "kb" => kb_name = Some(v.to_string()),
            "version" => kb_version = Some(v.to_string()),
            _ => {}
        }
    }
    Some(LogHeader { id: id?, kb_name: kb_name?, kb_version: kb_version? })
}

/// Parses a session file. Events without a timestamp get `0`.
pub fn parse_log(kb: &KnowledgeBase, src: &str) -> Result<(LogHeader, Vec<AnswerEvent>), LogError> {
    let header = src.lines().next().and_then(parse_header).ok_or(LogError::BadHeader)?;
    if header.kb_name != kb.header.name || header.kb_version != kb.header.version {
        return Err(LogError::KbMismatch {
            expected: format!("{} {}", kb.header.name, kb.header.version),
            found: format!("{} {}", header.kb_name, header.kb_version),
        });
    }
    let lines = parse_answers(kb, src).map_err(LogError::Answers)?;
    let events = lines
        .into_iter()
        .map(|l| AnswerEvent {
            at_millis: l
                .comment
                .as_deref()
                .and_then(|c| c.trim().strip_prefix("t="))
                .and_then(|t| t.trim().parse().ok())
                .unwrap_or(0),
            attribute: l.attribute,
            answer: l.answer,
        })
        .collect();
    Ok((header, events))
}
