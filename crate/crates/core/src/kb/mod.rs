//! The `.fkb` knowledge-base language: model, parser, validator and
//! serializer.
//!
//! ```text
//! knowledgebase demo { version: "1"; threshold: 0.2; }
//! attribute a { type: bool; askable; question: "A?"; dimension: business; }
//! attribute b { type: enum(low, high); }
//! rule r1 { if a = yes then b = high cf 0.8; cite "why"; }
//! compute m using coverage_multiplier(c);
//! fixture f { a = yes; }
//! ```

pub mod answers;
mod diagnostic;
mod lexer;
mod model;
mod parser;
mod serialize;
mod validate;

pub use diagnostic::{has_errors, Code, Diagnostic, Severity};
pub use model::*;
pub use parser::{parse_unvalidated, resolve_literal, Literal};
pub use serialize::{condition_to_source, serialize_kb};
pub use validate::validate_kb;

/// Parses and validates `src`. On success returns the knowledge base and any
/// warnings; on failure returns every diagnostic, at least one an error.
pub fn load_kb(src: &str) -> Result<(KnowledgeBase, Vec<Diagnostic>), Vec<Diagnostic>> {
    let (kb, mut diags) = parser::parse_unvalidated(src);
    let syntax_failed = has_errors(&diags);
    diags.extend(validate_kb(&kb).into_iter().filter(|d| !syntax_failed || d.is_error()));
    diagnostic::sort(&mut diags);
    diags.dedup();
    if has_errors(&diags) {
        Err(diags)
    } else {
        Ok((kb, diags))
    }
}

/// Parses and validates `src`, discarding warnings.
pub fn parse_kb(src: &str) -> Result<KnowledgeBase, Vec<Diagnostic>> {
    load_kb(src).map(|(kb, _)| kb)
}
