//! Recursive-descent parser for the `.fkb` language.
//!
//! Parsing happens in two passes: the token stream is read into a raw tree
//! whose literals are still untyped, then literals are resolved against the
//! attribute declarations (which may appear anywhere in the file).

use std::collections::btree_map::Entry;

use super::diagnostic::{Code, Diagnostic};
use super::lexer::{tokenize, Tok, Token};
use super::model::*;

/// An untyped literal as written in the source.
#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Ident(String),
    Number(f64),
    Str(String),
}

impl Literal {
    pub fn describe(&self) -> String {
        match self {
            Literal::Ident(s) => s.clone(),
            Literal::Number(n) => format_number(*n),
            Literal::Str(s) => quote(s),
        }
    }
}

/// Types a literal against an attribute's declared domain.
pub fn resolve_literal(kind: &AttrType, lit: &Literal) -> Result<Value, String> {
    match (kind, lit) {
        (AttrType::Bool, Literal::Ident(s)) => match s.as_str() {
            "yes" | "true" => Ok(Value::Bool(true)),
            "no" | "false" => Ok(Value::Bool(false)),
            _ => Err(format!("`{s}` is not a boolean (expected yes or no)")),
        },
        (AttrType::Enum { values }, Literal::Ident(s)) => {
            if values.iter().any(|v| v == s) {
                Ok(Value::Symbol(s.clone()))
            } else {
                Err(format!("`{s}` is not one of the declared values ({})", values.join(", ")))
            }
        }
        (AttrType::Number { .. }, Literal::Number(n)) => Ok(Value::Number(*n)),
        (AttrType::Text, Literal::Str(s)) => Ok(Value::Text(s.clone())),
        (kind, lit) => Err(format!("{} is not a valid {} value", lit.describe(), kind.describe())),
    }
}

#[derive(Debug)]
struct RawAttr {
    id: String,
    span: Span,
    kind: Option<AttrType>,
    askable: bool,
    question: Option<String>,
    dimension: Option<(String, Span)>,
}

#[derive(Debug)]
enum RawCond {
    Compare { attr: String, span: Span, op: CompareOp, lit: (Literal, Span) },
    Member { attr: String, span: Span, lits: Vec<(Literal, Span)> },
    All(Vec<RawCond>),
    Any(Vec<RawCond>),
    Not(Box<RawCond>),
}

#[derive(Debug)]
struct RawRule {
    id: String,
    span: Span,
    clause: Option<(RawCond, String, Span, (Literal, Span), f64)>,
    citation: Option<String>,
}

#[derive(Debug)]
pub(crate) struct RawEntry {
    pub attr: String,
    pub span: Span,
    /// `None` for `unknown`.
    pub lit: Option<(Literal, Span)>,
    pub cf: Option<(f64, Span)>,
    pub comment: Option<String>,
}

#[derive(Debug)]
struct RawFixture {
    name: String,
    span: Span,
    entries: Vec<RawEntry>,
}

#[derive(Debug, Default)]
struct RawKb {
    headers: Vec<(Header, Span)>,
    attrs: Vec<RawAttr>,
    rules: Vec<RawRule>,
    computes: Vec<Binding>,
    fixtures: Vec<RawFixture>,
}

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
    pub(crate) diags: Vec<Diagnostic>,
}

type PResult<T> = Result<T, ()>;

impl Parser {
    pub(crate) fn new(src: &str, line_mode: bool) -> Self {
        let (toks, diags) = tokenize(src, line_mode);
        Self { toks, pos: 0, diags }
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub(crate) fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    pub(crate) fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn error<T>(&mut self, code: Code, msg: impl Into<String>) -> PResult<T> {
        let span = self.span();
        self.diags.push(Diagnostic::error(code, span, msg));
        Err(())
    }

    fn unexpected<T>(&mut self, wanted: &str) -> PResult<T> {
        let found = self.peek().describe();
        self.error(Code::SyntaxError, format!("expected {wanted}, found {found}"))
    }

    pub(crate) fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if *self.peek() == tok {
            Ok(self.bump().span)
        } else {
            self.unexpected(&tok.describe())
        }
    }

    pub(crate) fn ident(&mut self) -> PResult<(String, Span)> {
        if let Tok::Ident(s) = self.peek().clone() {
            let span = self.bump().span;
            Ok((s, span))
        } else {
            self.unexpected("an identifier")
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn keyword(&mut self, kw: &str) -> PResult<()> {
        if self.is_keyword(kw) {
            self.bump();
            Ok(())
        } else {
            self.unexpected(&format!("`{kw}`"))
        }
    }

    fn string(&mut self) -> PResult<String> {
        if let Tok::Str(s) = self.peek().clone() {
            self.bump();
            Ok(s)
        } else {
            self.unexpected("a string")
        }
    }

    pub(crate) fn number(&mut self) -> PResult<(f64, Span)> {
        if let Tok::Number(n) = *self.peek() {
            let span = self.bump().span;
            Ok((n, span))
        } else {
            self.unexpected("a number")
        }
    }

    pub(crate) fn literal(&mut self) -> PResult<(Literal, Span)> {
        let span = self.span();
        let lit = match self.peek().clone() {
            Tok::Ident(s) => Literal::Ident(s),
            Tok::Number(n) => Literal::Number(n),
            Tok::Str(s) => Literal::Str(s),
            _ => return self.unexpected("a value"),
        };
        self.bump();
        Ok((lit, span))
    }

    /// Skips the rest of a statement: through the next `;`, or up to (not
    /// including) a `}` closing the enclosing block.
    fn skip_statement(&mut self) {
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Semi if depth == 0 => {
                    self.bump();
                    return;
                }
                Tok::RBrace if depth == 0 => return,
                Tok::LBrace => depth += 1,
                Tok::RBrace => depth -= 1,
                _ => {}
            }
            self.bump();
        }
    }

    /// Skips an unrecognised top-level item.
    fn skip_item(&mut self) {
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Semi if depth == 0 => {
                    self.bump();
                    return;
                }
                Tok::LBrace => depth += 1,
                Tok::RBrace => {
                    self.bump();
                    if depth <= 1 {
                        return;
                    }
                    depth -= 1;
                    continue;
                }
                _ => {}
            }
            self.bump();
        }
    }

    /// Parses `{ stmt* }`, calling `stmt` once per statement with recovery.
    fn block(&mut self, mut stmt: impl FnMut(&mut Self) -> PResult<()>) -> PResult<()> {
        self.expect(Tok::LBrace)?;
        loop {
            match self.peek() {
                Tok::RBrace => {
                    self.bump();
                    return Ok(());
                }
                Tok::Eof => return self.unexpected("`}`"),
                _ => {
                    if stmt(self).is_err() {
                        self.skip_statement();
                    }
                }
            }
        }
    }

    fn parse_file(&mut self) -> RawKb {
        let mut kb = RawKb::default();
        while *self.peek() != Tok::Eof {
            let span = self.span();
            let res = match self.peek().clone() {
                Tok::Ident(kw) => match kw.as_str() {
                    "knowledgebase" => self.header().map(|h| kb.headers.push((h, span))),
                    "attribute" => self.attribute().map(|a| kb.attrs.push(a)),
                    "rule" => self.rule().map(|r| kb.rules.push(r)),
                    "compute" => self.compute().map(|b| kb.computes.push(b)),
                    "fixture" => self.fixture().map(|f| kb.fixtures.push(f)),
                    other => self.error(Code::UnknownKeyword, format!("unknown keyword `{other}`")),
                },
                _ => self.unexpected("a declaration"),
            };
            if res.is_err() {
                self.skip_item();
            }
        }
        kb
    }

    fn header(&mut self) -> PResult<Header> {
        self.bump();
        let (name, _) = self.ident()?;
        let mut header = Header { name, ..Header::default() };
        self.block(|p| {
            let (field, _) = p.ident()?;
            p.expect(Tok::Colon)?;
            match field.as_str() {
                "version" => header.version = p.string()?,
                "threshold" => header.threshold = p.number()?.0,
                other => {
                    return p.error(Code::UnknownKeyword, format!("unknown knowledge-base field `{other}`"));
                }
            }
            p.expect(Tok::Semi).map(drop)
        })?;
        Ok(header)
    }

    fn attribute(&mut self) -> PResult<RawAttr> {
        self.bump();
        let (id, span) = self.ident()?;
        let mut attr = RawAttr { id, span, kind: None, askable: false, question: None, dimension: None };
        self.block(|p| {
            let (field, _) = p.ident()?;
            match field.as_str() {
                "askable" => attr.askable = true,
                "type" => {
                    p.expect(Tok::Colon)?;
                    attr.kind = Some(p.attr_type()?);
                }
                "question" => {
                    p.expect(Tok::Colon)?;
                    attr.question = Some(p.string()?);
                }
                "dimension" => {
                    p.expect(Tok::Colon)?;
                    attr.dimension = Some(p.ident()?);
                }
                other => return p.error(Code::UnknownKeyword, format!("unknown attribute field `{other}`")),
            }
            p.expect(Tok::Semi).map(drop)
        })?;
        Ok(attr)
    }

    fn attr_type(&mut self) -> PResult<AttrType> {
        let (name, _) = self.ident()?;
        match name.as_str() {
            "bool" => Ok(AttrType::Bool),
            "text" => Ok(AttrType::Text),
            "number" => {
                let unit = if *self.peek() == Tok::LParen {
                    self.bump();
                    let (u, _) = self.ident()?;
                    self.expect(Tok::RParen)?;
                    Some(u)
                } else {
                    None
                };
                Ok(AttrType::Number { unit })
            }
            "enum" => {
                self.expect(Tok::LParen)?;
                let mut values = vec![self.ident()?.0];
                while *self.peek() == Tok::Comma {
                    self.bump();
                    values.push(self.ident()?.0);
                }
                self.expect(Tok::RParen)?;
                Ok(AttrType::Enum { values })
            }
            other => self.error(Code::UnknownKeyword, format!("unknown type `{other}`")),
        }
    }

    fn rule(&mut self) -> PResult<RawRule> {
        self.bump();
        let (id, span) = self.ident()?;
        let mut rule = RawRule { id, span, clause: None, citation: None };
        self.block(|p| {
            if p.is_keyword("cite") {
                p.bump();
                rule.citation = Some(p.string()?);
            } else if p.is_keyword("if") {
                p.bump();
                let cond = p.condition()?;
                p.keyword("then")?;
                let (attr, aspan) = p.ident()?;
                p.expect(Tok::Eq)?;
                let lit = p.literal()?;
                let cf = if p.is_keyword("cf") {
                    p.bump();
                    p.number()?.0
                } else {
                    1.0
                };
                rule.clause = Some((cond, attr, aspan, lit, cf));
            } else {
                let found = p.peek().describe();
                return p.error(Code::UnknownKeyword, format!("expected `if` or `cite`, found {found}"));
            }
            p.expect(Tok::Semi).map(drop)
        })?;
        Ok(rule)
    }

    fn condition(&mut self) -> PResult<RawCond> {
        let mut parts = vec![self.conjunction()?];
        while self.is_keyword("or") {
            self.bump();
            parts.push(self.conjunction()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { RawCond::Any(parts) })
    }

    fn conjunction(&mut self) -> PResult<RawCond> {
        let mut parts = vec![self.unary()?];
        while self.is_keyword("and") {
            self.bump();
            parts.push(self.unary()?);
        }
        Ok(if parts.len() == 1 { parts.pop().unwrap() } else { RawCond::All(parts) })
    }

    fn unary(&mut self) -> PResult<RawCond> {
        if self.is_keyword("not") {
            self.bump();
            return Ok(RawCond::Not(Box::new(self.unary()?)));
        }
        if *self.peek() == Tok::LParen {
            self.bump();
            let inner = self.condition()?;
            self.expect(Tok::RParen)?;
            return Ok(inner);
        }
        let (attr, span) = self.ident()?;
        if self.is_keyword("in") {
            self.bump();
            self.expect(Tok::LParen)?;
            let mut lits = vec![self.literal()?];
            while *self.peek() == Tok::Comma {
                self.bump();
                lits.push(self.literal()?);
            }
            self.expect(Tok::RParen)?;
            return Ok(RawCond::Member { attr, span, lits });
        }
        let op = match self.peek() {
            Tok::Eq => CompareOp::Eq,
            Tok::Ne => CompareOp::Ne,
            Tok::Lt => CompareOp::Lt,
            Tok::Le => CompareOp::Le,
            Tok::Gt => CompareOp::Gt,
            Tok::Ge => CompareOp::Ge,
            _ => return self.unexpected("a comparison operator or `in`"),
        };
        self.bump();
        let lit = self.literal()?;
        Ok(RawCond::Compare { attr, span, op, lit })
    }

    fn compute(&mut self) -> PResult<Binding> {
        let span = self.bump().span;
        let (attribute, _) = self.ident()?;
        self.keyword("using")?;
        let (calculator, _) = self.ident()?;
        self.expect(Tok::LParen)?;
        let mut inputs = Vec::new();
        if *self.peek() != Tok::RParen {
            inputs.push(self.ident()?.0);
            while *self.peek() == Tok::Comma {
                self.bump();
                inputs.push(self.ident()?.0);
            }
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::Semi)?;
        Ok(Binding { attribute, calculator, inputs, span })
    }

    /// `<attr> = <value>|unknown [cf <x>]`, without the terminator.
    pub(crate) fn entry(&mut self) -> PResult<RawEntry> {
        let (attr, span) = self.ident()?;
        self.expect(Tok::Eq)?;
        let (lit, lspan) = self.literal()?;
        let comment = self.toks[self.pos - 1].comment.clone();
        let lit = match lit {
            Literal::Ident(ref s) if s == "unknown" => None,
            other => Some((other, lspan)),
        };
        let mut cf = None;
        let mut comment = comment;
        if self.is_keyword("cf") {
            self.bump();
            cf = Some(self.number()?);
            comment = self.toks[self.pos - 1].comment.clone();
        }
        Ok(RawEntry { attr, span, lit, cf, comment })
    }

    fn fixture(&mut self) -> PResult<RawFixture> {
        self.bump();
        let (name, span) = self.ident()?;
        let mut entries = Vec::new();
        self.block(|p| {
            entries.push(p.entry()?);
            p.expect(Tok::Semi).map(drop)
        })?;
        Ok(RawFixture { name, span, entries })
    }
}

/// Resolves a raw answer entry against the knowledge base.
pub(crate) fn resolve_entry(kb_attrs: &std::collections::BTreeMap<String, Attribute>, e: &RawEntry) -> Result<Answer, Diagnostic> {
    let attr = kb_attrs.get(&e.attr).ok_or_else(|| {
        Diagnostic::error(Code::UndeclaredAttribute, e.span, format!("undeclared attribute `{}`", e.attr))
    })?;
    match &e.lit {
        None => {
            if let Some((_, span)) = e.cf {
                return Err(Diagnostic::error(Code::SyntaxError, span, "`unknown` answers cannot carry a cf"));
            }
            Ok(Answer::unknown())
        }
        Some((lit, span)) => {
            let value = resolve_literal(&attr.kind, lit)
                .map_err(|m| Diagnostic::error(Code::TypeMismatch, *span, format!("{}: {m}", e.attr)))?;
            let cf = match e.cf {
                Some((cf, span)) if !(0.0..=1.0).contains(&cf) => {
                    return Err(Diagnostic::error(
                        Code::CfOutOfRange,
                        span,
                        format!("answer cf {cf} is outside [0, 1]"),
                    ))
                }
                Some((cf, _)) => cf,
                None => 1.0,
            };
            Ok(Answer::with_cf(value, cf))
        }
    }
}

/// Parses source text into an unvalidated knowledge base plus the syntax and
/// resolution diagnostics encountered.
pub fn parse_unvalidated(src: &str) -> (KnowledgeBase, Vec<Diagnostic>) {
    let mut p = Parser::new(src, false);
    let raw = p.parse_file();
    let mut diags = p.diags;
    let kb = resolve(raw, &mut diags);
    (kb, diags)
}

fn resolve(raw: RawKb, diags: &mut Vec<Diagnostic>) -> KnowledgeBase {
    let mut kb = KnowledgeBase::default();
    let mut headers = raw.headers.into_iter();
    if let Some((h, _)) = headers.next() {
        kb.header = h;
    }
    for (_, span) in headers {
        diags.push(Diagnostic::error(Code::DuplicateId, span, "more than one knowledgebase header"));
    }

    for a in raw.attrs {
        let Some(kind) = a.kind else {
            diags.push(Diagnostic::error(Code::SyntaxError, a.span, format!("attribute `{}` has no type", a.id)));
            continue;
        };
        let dimension = match a.dimension {
            None => None,
            Some((d, span)) => match Dimension::parse(&d) {
                Some(d) => Some(d),
                None => {
                    diags.push(Diagnostic::error(Code::UnknownKeyword, span, format!("unknown dimension `{d}`")));
                    None
                }
            },
        };
        let attr = Attribute { id: a.id.clone(), kind, askable: a.askable, question: a.question, dimension, span: a.span };
        match kb.attributes.entry(a.id) {
            Entry::Occupied(e) => diags.push(Diagnostic::error(
                Code::DuplicateId,
                a.span,
                format!("attribute `{}` already declared at {}", e.key(), e.get().span),
            )),
            Entry::Vacant(e) => {
                e.insert(attr);
            }
        }
    }

    for b in raw.computes {
        match kb.computes.entry(b.attribute.clone()) {
            Entry::Occupied(e) => diags.push(Diagnostic::error(
                Code::DuplicateId,
                b.span,
                format!("attribute `{}` already has a compute binding at {}", e.key(), e.get().span),
            )),
            Entry::Vacant(e) => {
                e.insert(b);
            }
        }
    }

    for r in raw.rules {
        let Some((cond, attr, aspan, (lit, lspan), cf)) = r.clause else {
            diags.push(Diagnostic::error(Code::SyntaxError, r.span, format!("rule `{}` has no `if ... then` clause", r.id)));
            continue;
        };
        let before = diags.len();
        let condition = resolve_cond(&kb.attributes, cond, diags);
        let conclusion = match kb.attributes.get(&attr) {
            None => {
                diags.push(Diagnostic::error(
                    Code::UndeclaredAttribute,
                    aspan,
                    format!("rule `{}` concludes undeclared attribute `{attr}`", r.id),
                ));
                None
            }
            Some(a) => match resolve_literal(&a.kind, &lit) {
                Ok(value) => Some(Conclusion { attribute: attr, value }),
                Err(m) => {
                    diags.push(Diagnostic::error(Code::TypeMismatch, lspan, format!("rule `{}`: {attr}: {m}", r.id)));
                    None
                }
            },
        };
        if diags.len() != before {
            continue;
        }
        let (Some(condition), Some(conclusion)) = (condition, conclusion) else { continue };
        let rule = Rule { id: r.id.clone(), condition, conclusion, cf, citation: r.citation, span: r.span };
        match kb.rules.entry(r.id) {
            Entry::Occupied(e) => diags.push(Diagnostic::error(
                Code::DuplicateId,
                r.span,
                format!("rule `{}` already declared at {}", e.key(), e.get().span),
            )),
            Entry::Vacant(e) => {
                e.insert(rule);
            }
        }
    }

    for f in raw.fixtures {
        let mut answers: Vec<(String, Answer)> = Vec::new();
        for e in &f.entries {
            if answers.iter().any(|(a, _)| *a == e.attr) {
                diags.push(Diagnostic::error(
                    Code::DuplicateId,
                    e.span,
                    format!("fixture `{}` answers `{}` twice", f.name, e.attr),
                ));
                continue;
            }
            match resolve_entry(&kb.attributes, e) {
                Ok(a) => answers.push((e.attr.clone(), a)),
                Err(d) => diags.push(d),
            }
        }
        let fixture = Fixture { name: f.name.clone(), answers, span: f.span };
        match kb.fixtures.entry(f.name) {
            Entry::Occupied(e) => diags.push(Diagnostic::error(
                Code::DuplicateId,
                f.span,
                format!("fixture `{}` already declared at {}", e.key(), e.get().span),
            )),
            Entry::Vacant(e) => {
                e.insert(fixture);
            }
        }
    }
    kb
}

fn resolve_cond(
    attrs: &std::collections::BTreeMap<String, Attribute>,
    c: RawCond,
    diags: &mut Vec<Diagnostic>,
) -> Option<Condition> {
    let lookup = |attr: &str, span: Span, diags: &mut Vec<Diagnostic>| {
        let found = attrs.get(attr);
        if found.is_none() {
            diags.push(Diagnostic::error(Code::UndeclaredAttribute, span, format!("undeclared attribute `{attr}`")));
        }
        found
    };
    let typed = |a: &Attribute, (lit, span): (Literal, Span), diags: &mut Vec<Diagnostic>| {
        resolve_literal(&a.kind, &lit)
            .map_err(|m| diags.push(Diagnostic::error(Code::TypeMismatch, span, format!("{}: {m}", a.id))))
            .ok()
    };
    match c {
        RawCond::Compare { attr, span, op, lit } => {
            let a = lookup(&attr, span, diags)?;
            if op.is_ordering() && !a.kind.is_numeric() {
                diags.push(Diagnostic::error(
                    Code::TypeMismatch,
                    span,
                    format!("operator `{}` needs a numeric attribute but `{attr}` is {}", op.symbol(), a.kind.describe()),
                ));
                return None;
            }
            let value = typed(a, lit, diags)?;
            Some(Condition::Compare { attribute: attr, op, value })
        }
        RawCond::Member { attr, span, lits } => {
            let a = lookup(&attr, span, diags)?;
            let values: Vec<_> = lits.into_iter().map(|l| typed(a, l, diags)).collect();
            let values: Option<Vec<_>> = values.into_iter().collect();
            Some(Condition::Member { attribute: attr, values: values? })
        }
        RawCond::All(cs) => {
            let parts: Vec<_> = cs.into_iter().map(|c| resolve_cond(attrs, c, diags)).collect();
            Some(Condition::All(parts.into_iter().collect::<Option<_>>()?))
        }
        RawCond::Any(cs) => {
            let parts: Vec<_> = cs.into_iter().map(|c| resolve_cond(attrs, c, diags)).collect();
            Some(Condition::Any(parts.into_iter().collect::<Option<_>>()?))
        }
        RawCond::Not(c) => Some(Condition::Not(Box::new(resolve_cond(attrs, *c, diags)?))),
    }
}
