//! The line-oriented answer format shared by fixtures, batch assessment and
//! session persistence:
//!
//! ```text
//! # comment
//! task_type = diagnosis
//! users_willing = uncertain cf 0.8
//! prior_solutions = unknown
//! ```

use std::collections::BTreeMap;

use super::diagnostic::{sort, Code, Diagnostic};
use super::lexer::Tok;
use super::model::{Answer, Attribute, KnowledgeBase};
use super::parser::{resolve_entry, Parser, RawEntry};

/// One line of an answer file, resolved against a knowledge base.
#[derive(Debug, Clone, PartialEq)]
pub struct AnswerLine {
    pub attribute: String,
    pub answer: Answer,
    pub line: usize,
    /// Text of a trailing `#` comment, if any.
    pub comment: Option<String>,
}

/// Parses answer-file text without reference to a knowledge base.
pub(crate) fn parse_raw(src: &str) -> Result<Vec<RawEntry>, Vec<Diagnostic>> {
    let mut p = Parser::new(src, true);
    let mut entries = Vec::new();
    loop {
        match p.peek() {
            Tok::Eof => break,
            Tok::Newline => {
                p.bump();
            }
            _ => {
                let res = p.entry().and_then(|e| match p.peek() {
                    Tok::Newline | Tok::Eof => Ok(e),
                    // `;` terminators are tolerated so fixture blocks can be pasted in
                    Tok::Semi => {
                        p.bump();
                        Ok(e)
                    }
                    other => {
                        let msg = format!("expected end of line, found {}", other.describe());
                        p.error(Code::SyntaxError, msg)
                    }
                });
                match res {
                    Ok(e) => entries.push(e),
                    Err(()) => {
                        while !matches!(p.peek(), Tok::Newline | Tok::Eof) {
                            p.bump();
                        }
                    }
                }
            }
        }
    }
    if p.diags.is_empty() {
        Ok(entries)
    } else {
        let mut d = p.diags;
        sort(&mut d);
        Err(d)
    }
}

/// Parses an answer file and types every value against `kb`. Unknown
/// attributes, out-of-domain values and malformed lines are all reported.
pub fn parse_answers(kb: &KnowledgeBase, src: &str) -> Result<Vec<AnswerLine>, Vec<Diagnostic>> {
    let entries = parse_raw(src)?;
    resolve(&kb.attributes, entries)
}

fn resolve(attrs: &BTreeMap<String, Attribute>, entries: Vec<RawEntry>) -> Result<Vec<AnswerLine>, Vec<Diagnostic>> {
    let mut out = Vec::new();
    let mut diags = Vec::new();
    for e in entries {
        if attrs.get(&e.attr).is_some_and(|a| !a.askable) {
            diags.push(Diagnostic::error(Code::NotAskable, e.span, format!("`{}` is not askable", e.attr)));
            continue;
        }
        match resolve_entry(attrs, &e) {
            Ok(answer) => out.push(AnswerLine { attribute: e.attr, answer, line: e.span.line, comment: e.comment }),
            Err(d) => diags.push(d),
        }
    }
    if diags.is_empty() {
        Ok(out)
    } else {
        Err(diags)
    }
}

/// Renders one answer line (without newline).
pub fn format_answer(attribute: &str, answer: &Answer) -> String {
    format!("{attribute} = {}", answer.to_source())
}

/// Renders answers as an answer file, one per line, in the given order.
pub fn write_answers<'a>(answers: impl IntoIterator<Item = (&'a str, &'a Answer)>) -> String {
    answers.into_iter().map(|(a, ans)| format_answer(a, ans) + "\n").collect()
}
