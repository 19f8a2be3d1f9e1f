//! Semantic checks over a typed knowledge base.

use std::collections::{BTreeMap, BTreeSet};

use super::diagnostic::{sort, Code, Diagnostic};
use super::model::*;
use crate::calculators::{Arity, Calculator};

/// Returns every error and warning for `kb`. Errors block loading; warnings
/// are advisory.
pub fn validate_kb(kb: &KnowledgeBase) -> Vec<Diagnostic> {
    let mut v = Validator { kb, diags: Vec::new() };
    v.header();
    v.attributes();
    v.computes();
    v.rules();
    v.fixtures();
    v.cycles();
    v.reachability();
    let mut diags = v.diags;
    sort(&mut diags);
    diags
}

struct Validator<'a> {
    kb: &'a KnowledgeBase,
    diags: Vec<Diagnostic>,
}

fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_') && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

impl Validator<'_> {
    fn error(&mut self, code: Code, at: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic::error(code, at, msg));
    }

    fn warn(&mut self, code: Code, at: Span, msg: impl Into<String>) {
        self.diags.push(Diagnostic::warning(code, at, msg));
    }

    fn identifier(&mut self, what: &str, id: &str, at: Span) {
        if !is_identifier(id) {
            self.error(Code::SyntaxError, at, format!("{what} id `{id}` is not an identifier"));
        } else if RESERVED_WORDS.contains(&id) {
            self.error(Code::ReservedWord, at, format!("{what} id `{id}` is a reserved word"));
        }
    }

    fn header(&mut self) {
        let h = &self.kb.header;
        let t = h.threshold;
        if !(t > 0.0 && t <= 1.0) {
            self.error(Code::InvalidHeader, Span::default(), format!("threshold {t} must lie in (0, 1]"));
        }
        if !is_identifier(&h.name) {
            self.error(Code::InvalidHeader, Span::default(), format!("knowledge-base name `{}` is not an identifier", h.name));
        }
    }

    fn attributes(&mut self) {
        for a in self.kb.attributes.values() {
            self.identifier("attribute", &a.id, a.span);
            if let AttrType::Enum { values } = &a.kind {
                let mut seen = BTreeSet::new();
                for v in values {
                    if !seen.insert(v) {
                        self.error(Code::DuplicateId, a.span, format!("`{}` lists value `{v}` twice", a.id));
                    }
                    if RESERVED_WORDS.contains(&v.as_str()) {
                        self.error(Code::ReservedWord, a.span, format!("`{}` uses reserved word `{v}` as a value", a.id));
                    } else if !is_identifier(v) {
                        self.error(Code::SyntaxError, a.span, format!("`{}` value `{v}` is not an identifier", a.id));
                    }
                }
                if values.is_empty() {
                    self.error(Code::TypeMismatch, a.span, format!("enumeration `{}` declares no values", a.id));
                }
            }
            if let AttrType::Number { unit: Some(u) } = &a.kind {
                if !is_identifier(u) {
                    self.error(Code::SyntaxError, a.span, format!("unit `{u}` is not an identifier"));
                }
            }
            if a.askable && a.question.as_deref().is_none_or(|q| q.trim().is_empty()) {
                self.error(Code::MissingQuestion, a.span, format!("askable attribute `{}` has no question", a.id));
            }
            let concluded = self.kb.rules_for(&a.id).next().is_some();
            let computed = self.kb.binding(&a.id).is_some();
            if !a.askable && !concluded && !computed {
                self.warn(Code::OrphanAttribute, a.span, format!("`{}` is neither askable, computed nor concluded by any rule", a.id));
            }
        }
    }

    fn computes(&mut self) {
        for b in self.kb.computes.values() {
            let Some(out) = self.kb.attribute(&b.attribute) else {
                self.error(Code::UndeclaredAttribute, b.span, format!("compute target `{}` is not declared", b.attribute));
                continue;
            };
            if out.askable {
                self.error(Code::ConclusionOnInput, b.span, format!("computed attribute `{}` is askable", b.attribute));
            }
            let Some(calc) = Calculator::from_id(&b.calculator) else {
                self.error(Code::UnknownCalculator, b.span, format!("unknown calculator `{}`", b.calculator));
                continue;
            };
            if !calc.output().accepts(&out.kind) {
                self.error(
                    Code::CalculatorSignature,
                    b.span,
                    format!("`{}` produces {} but `{}` is {}", calc, calc.output().describe(), out.id, out.kind.describe()),
                );
            }
            let slots: Vec<_> = match calc.inputs() {
                Arity::Fixed(slots) => {
                    if slots.len() != b.inputs.len() {
                        self.error(
                            Code::CalculatorSignature,
                            b.span,
                            format!("`{calc}` takes {} inputs, {} given", slots.len(), b.inputs.len()),
                        );
                        continue;
                    }
                    slots.to_vec()
                }
                Arity::Repeated(group) => {
                    if b.inputs.len() % group.len() != 0 {
                        self.error(
                            Code::CalculatorSignature,
                            b.span,
                            format!("`{calc}` takes inputs in groups of {}", group.len()),
                        );
                        continue;
                    }
                    group.iter().copied().cycle().take(b.inputs.len()).collect()
                }
            };
            for (input, slot) in b.inputs.iter().zip(slots) {
                match self.kb.attribute(input) {
                    None => self.error(Code::UndeclaredAttribute, b.span, format!("undeclared attribute `{input}`")),
                    Some(a) if !slot.accepts(&a.kind) => self.error(
                        Code::CalculatorSignature,
                        b.span,
                        format!("`{calc}` needs {} for `{input}`, found {}", slot.describe(), a.kind.describe()),
                    ),
                    Some(_) => {}
                }
            }
        }
    }

    fn rules(&mut self) {
        for r in self.kb.rules.values() {
            self.identifier("rule", &r.id, r.span);
            if !(r.cf > 0.0 && r.cf <= 1.0) {
                self.error(Code::CfOutOfRange, r.span, format!("rule `{}` has cf {} outside (0, 1]", r.id, r.cf));
            }
            match self.kb.attribute(&r.conclusion.attribute) {
                None => self.error(
                    Code::UndeclaredAttribute,
                    r.span,
                    format!("rule `{}` concludes undeclared attribute `{}`", r.id, r.conclusion.attribute),
                ),
                Some(a) => {
                    if !a.kind.admits(&r.conclusion.value) {
                        self.error(
                            Code::TypeMismatch,
                            r.span,
                            format!("rule `{}` concludes `{}` which is not a {} value", r.id, r.conclusion.value, a.kind.describe()),
                        );
                    }
                    if a.askable || self.kb.binding(&a.id).is_some() {
                        self.error(
                            Code::ConclusionOnInput,
                            r.span,
                            format!("rule `{}` concludes `{}`, which is askable or computed", r.id, a.id),
                        );
                    }
                }
            }
            self.condition(r, &r.condition);
            if r.citation.as_deref().is_none_or(|c| c.trim().is_empty()) {
                self.warn(Code::MissingCitation, r.span, format!("rule `{}` has no citation", r.id));
            }
        }
    }

    fn condition(&mut self, r: &Rule, c: &Condition) {
        let check_value = |this: &mut Self, attr: &str, value: &Value| match this.kb.attribute(attr) {
            None => false,
            Some(a) if !a.kind.admits(value) => {
                this.error(
                    Code::TypeMismatch,
                    r.span,
                    format!("rule `{}`: `{value}` is not a value of `{attr}` ({})", r.id, a.kind.describe()),
                );
                true
            }
            Some(_) => true,
        };
        match c {
            Condition::Compare { attribute, op, value } => {
                if !check_value(self, attribute, value) {
                    self.error(Code::UndeclaredAttribute, r.span, format!("rule `{}` reads undeclared attribute `{attribute}`", r.id));
                } else if op.is_ordering() && !self.kb.attributes[attribute].kind.is_numeric() {
                    self.error(
                        Code::TypeMismatch,
                        r.span,
                        format!("rule `{}`: `{}` needs a numeric attribute, `{attribute}` is not", r.id, op.symbol()),
                    );
                }
            }
            Condition::Member { attribute, values } => {
                if values.is_empty() {
                    self.error(Code::SyntaxError, r.span, format!("rule `{}`: empty `in` list", r.id));
                }
                for v in values {
                    if !check_value(self, attribute, v) {
                        self.error(Code::UndeclaredAttribute, r.span, format!("rule `{}` reads undeclared attribute `{attribute}`", r.id));
                        break;
                    }
                }
            }
            Condition::All(cs) | Condition::Any(cs) => {
                if cs.len() < 2 {
                    self.error(Code::SyntaxError, r.span, format!("rule `{}`: `and`/`or` needs at least two operands", r.id));
                }
                for c in cs {
                    self.condition(r, c);
                }
            }
            Condition::Not(c) => self.condition(r, c),
        }
    }

    fn fixtures(&mut self) {
        for f in self.kb.fixtures.values() {
            self.identifier("fixture", &f.name, f.span);
            let mut seen = BTreeSet::new();
            for (attr, answer) in &f.answers {
                if !seen.insert(attr) {
                    self.error(Code::DuplicateId, f.span, format!("fixture `{}` answers `{attr}` twice", f.name));
                }
                let Some(a) = self.kb.attribute(attr) else {
                    self.error(Code::UndeclaredAttribute, f.span, format!("fixture `{}` answers undeclared `{attr}`", f.name));
                    continue;
                };
                if !a.askable {
                    self.error(Code::NotAskable, f.span, format!("fixture `{}` answers `{attr}`, which is not askable", f.name));
                }
                if let AnswerValue::Known(v) = &answer.value {
                    if !a.kind.admits(v) {
                        self.error(Code::TypeMismatch, f.span, format!("fixture `{}`: `{v}` is not a value of `{attr}`", f.name));
                    }
                    if !(0.0..=1.0).contains(&answer.cf) {
                        self.error(Code::CfOutOfRange, f.span, format!("fixture `{}`: cf {} outside [0, 1]", f.name, answer.cf));
                    }
                }
            }
        }
    }

    /// Finds dependency cycles over `conclusion -> premise` and
    /// `computed -> input` edges.
    fn cycles(&mut self) {
        let mut edges: BTreeMap<&str, Vec<(&str, String, Span)>> = BTreeMap::new();
        for r in self.kb.rules.values() {
            let mut seen = BTreeSet::new();
            for a in r.condition.attributes() {
                if seen.insert(a) {
                    edges.entry(&r.conclusion.attribute).or_default().push((a, format!("rule `{}`", r.id), r.span));
                }
            }
        }
        for b in self.kb.computes.values() {
            for i in &b.inputs {
                edges.entry(&b.attribute).or_default().push((i, format!("compute `{}`", b.attribute), b.span));
            }
        }

        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            Active,
            Done,
        }
        let mut marks: BTreeMap<&str, Mark> = BTreeMap::new();
        let mut reported: BTreeSet<Vec<String>> = BTreeSet::new();
        let mut found: Vec<(Span, String)> = Vec::new();
        // iterative DFS; each stack entry is (node, next edge index, label of edge used to reach it)
        let nodes: Vec<&str> = edges.keys().copied().collect();
        for start in nodes {
            if marks.contains_key(start) {
                continue;
            }
            let mut stack: Vec<(&str, usize, Option<(String, Span)>)> = vec![(start, 0, None)];
            marks.insert(start, Mark::Active);
            while let Some(top) = stack.last_mut() {
                let node = top.0;
                let out = edges.get(node).map(Vec::as_slice).unwrap_or(&[]);
                if top.1 >= out.len() {
                    marks.insert(node, Mark::Done);
                    stack.pop();
                    continue;
                }
                let (next, label, span) = &out[top.1];
                top.1 += 1;
                match marks.get(next) {
                    None => {
                        marks.insert(next, Mark::Active);
                        stack.push((next, 0, Some((label.clone(), *span))));
                    }
                    Some(Mark::Active) => {
                        let pos = stack.iter().position(|(n, _, _)| n == next).unwrap();
                        let mut labels: Vec<(String, Span)> =
                            stack[pos + 1..].iter().filter_map(|(_, _, l)| l.clone()).collect();
                        labels.push((label.clone(), *span));
                        let mut key: Vec<String> = labels.iter().map(|(l, _)| l.clone()).collect();
                        key.sort();
                        key.dedup();
                        if reported.insert(key) {
                            let path: Vec<&str> = stack[pos..].iter().map(|(n, _, _)| *n).chain([*next]).collect();
                            let names: Vec<String> = labels.iter().map(|(l, _)| l.clone()).collect();
                            found.push((
                                labels[0].1,
                                format!("dependency cycle {} via {}", path.join(" -> "), names.join(", ")),
                            ));
                        }
                    }
                    Some(Mark::Done) => {}
                }
            }
        }
        for (span, msg) in found {
            self.error(Code::DependencyCycle, span, msg);
        }
    }

    fn reachability(&mut self) {
        let t = self.kb.threshold();
        for r in self.kb.rules.values() {
            let (_, ub) = bounds(self.kb, &r.condition);
            if ub < t {
                self.warn(
                    Code::UnreachableRule,
                    r.span,
                    format!("rule `{}` can never fire: its condition cannot reach cf {t}", r.id),
                );
            }
        }
    }
}

/// Lower and upper bound on the certainty a condition can evaluate to.
/// Facts never carry negative certainty, so a leaf lies in `[0, 1]` when
/// some source can produce a matching value and is `0` otherwise.
fn bounds(kb: &KnowledgeBase, c: &Condition) -> (f64, f64) {
    let leaf = |attribute: &str, matches: &dyn Fn(&Value) -> bool| {
        let Some(a) = kb.attribute(attribute) else { return (0.0, 0.0) };
        let open = a.askable || kb.binding(attribute).is_some();
        let derivable = kb.rules_for(attribute).any(|r| matches(&r.conclusion.value));
        (0.0, if open || derivable { 1.0 } else { 0.0 })
    };
    match c {
        Condition::Compare { attribute, op, value } => leaf(attribute, &|v| op.holds(v, value)),
        Condition::Member { attribute, values } => leaf(attribute, &|v| values.contains(v)),
        Condition::All(cs) => cs
            .iter()
            .map(|c| bounds(kb, c))
            .fold((1.0, 1.0), |(l, u), (cl, cu)| (f64::min(l, cl), f64::min(u, cu))),
        Condition::Any(cs) => cs
            .iter()
            .map(|c| bounds(kb, c))
            .fold((-1.0, -1.0), |(l, u), (cl, cu)| (f64::max(l, cl), f64::max(u, cu))),
        Condition::Not(c) => {
            let (l, u) = bounds(kb, c);
            (-u, -l)
        }
    }
}
