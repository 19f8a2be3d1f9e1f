use std::fmt;

use serde::{Deserialize, Serialize};

use super::model::Span;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Error,
    Warning,
}

/// Stable diagnostic identifiers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Code {
    LexicalError,
    SyntaxError,
    UnknownKeyword,
    UndeclaredAttribute,
    DuplicateId,
    CfOutOfRange,
    TypeMismatch,
    DependencyCycle,
    MissingQuestion,
    UnknownCalculator,
    CalculatorSignature,
    ConclusionOnInput,
    ReservedWord,
    InvalidHeader,
    UnreachableRule,
    OrphanAttribute,
    MissingCitation,
    NotAskable,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::LexicalError => "lexical_error",
            Code::SyntaxError => "syntax_error",
            Code::UnknownKeyword => "unknown_keyword",
            Code::UndeclaredAttribute => "undeclared_attribute",
            Code::DuplicateId => "duplicate_id",
            Code::CfOutOfRange => "cf_out_of_range",
            Code::TypeMismatch => "type_mismatch",
            Code::DependencyCycle => "dependency_cycle",
            Code::MissingQuestion => "missing_question",
            Code::UnknownCalculator => "unknown_calculator",
            Code::CalculatorSignature => "calculator_signature",
            Code::ConclusionOnInput => "conclusion_on_input",
            Code::ReservedWord => "reserved_word",
            Code::InvalidHeader => "invalid_header",
            Code::UnreachableRule => "unreachable_rule",
            Code::OrphanAttribute => "orphan_attribute",
            Code::MissingCitation => "missing_citation",
            Code::NotAskable => "not_askable",
        }
    }
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn error(code: Code, at: Span, message: impl Into<String>) -> Self {
        Self::new(Severity::Error, code, at, message)
    }

    pub fn warning(code: Code, at: Span, message: impl Into<String>) -> Self {
        Self::new(Severity::Warning, code, at, message)
    }

    fn new(severity: Severity, code: Code, at: Span, message: impl Into<String>) -> Self {
        Self { severity, code, line: at.line.max(1), column: at.column.max(1), message: message.into() }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {sev}[{}]: {}", self.line, self.column, self.code, self.message)
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}

pub(crate) fn sort(diags: &mut [Diagnostic]) {
    diags.sort_by(|a, b| (a.line, a.column, a.severity, a.code).cmp(&(b.line, b.column, b.severity, b.code)));
}
