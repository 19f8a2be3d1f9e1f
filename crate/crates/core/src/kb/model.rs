//! In-memory form of a knowledge base.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Default firing threshold for conditions.
pub const DEFAULT_THRESHOLD: f64 = 0.2;

/// Identifiers with a fixed meaning in the rule language.
pub const RESERVED_WORDS: &[&str] = &["and", "or", "not", "in", "then", "cf", "unknown", "if"];

/// A source position (1-based). Spans are metadata: they never take part in
/// equality, so a re-parsed knowledge base compares equal to its original.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl Span {
    pub fn new(line: usize, column: usize) -> Self {
        Self { line, column }
    }
}

impl PartialEq for Span {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line.max(1), self.column.max(1))
    }
}

/// Attribute groups. The order is the interview order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    Business,
    Organisational,
    Technical,
    Complexity,
    Stakeholder,
    Risk,
    Costbenefit,
}

impl Dimension {
    pub const ALL: [Dimension; 7] = [
        Dimension::Business,
        Dimension::Organisational,
        Dimension::Technical,
        Dimension::Complexity,
        Dimension::Stakeholder,
        Dimension::Risk,
        Dimension::Costbenefit,
    ];

    /// The dimensions that receive a verdict.
    pub const ASSESSED: [Dimension; 5] = [
        Dimension::Business,
        Dimension::Organisational,
        Dimension::Technical,
        Dimension::Complexity,
        Dimension::Stakeholder,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Dimension::Business => "business",
            Dimension::Organisational => "organisational",
            Dimension::Technical => "technical",
            Dimension::Complexity => "complexity",
            Dimension::Stakeholder => "stakeholder",
            Dimension::Risk => "risk",
            Dimension::Costbenefit => "costbenefit",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|d| d.as_str() == s)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A typed attribute value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Value {
    Bool(bool),
    Symbol(String),
    /// May be `+inf` for quantities such as a payback period that is never reached.
    Number(#[serde(with = "extended_f64")] f64),
    Text(String),
}

impl Value {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(n) => Some(*n),
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<&str> {
        match self {
            Value::Symbol(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Value::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// Rendering in rule-language syntax.
    pub fn to_source(&self) -> String {
        match self {
            Value::Bool(true) => "yes".into(),
            Value::Bool(false) => "no".into(),
            Value::Symbol(s) => s.clone(),
            Value::Number(n) => format_number(*n),
            Value::Text(t) => quote(t),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Text(t) => f.write_str(t),
            Value::Number(n) if n.is_infinite() && *n > 0.0 => f.write_str("never"),
            other => f.write_str(&other.to_source()),
        }
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_number(n: f64) -> String {
    format!("{n}")
}

pub(crate) fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Serde adapter for `f64` that also admits infinities, written as the
/// strings `"inf"` and `"-inf"`.
pub mod extended_f64 {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(n) => Ok(n),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("invalid number {other:?}"))),
            },
        }
    }
}

/// Declared value domain of an attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum AttrType {
    Bool,
    Enum { values: Vec<String> },
    Number { unit: Option<String> },
    Text,
}

impl AttrType {
    pub fn is_numeric(&self) -> bool {
        matches!(self, AttrType::Number { .. })
    }

    /// Whether `value` lies in this domain.
    pub fn admits(&self, value: &Value) -> bool {
        match (self, value) {
            (AttrType::Bool, Value::Bool(_)) => true,
            (AttrType::Enum { values }, Value::Symbol(s)) => values.iter().any(|v| v == s),
            (AttrType::Number { .. }, Value::Number(n)) => !n.is_nan(),
            (AttrType::Text, Value::Text(_)) => true,
            _ => false,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            AttrType::Bool => "bool".into(),
            AttrType::Enum { values } => format!("enum({})", values.join(", ")),
            AttrType::Number { unit: Some(u) } => format!("number({u})"),
            AttrType::Number { unit: None } => "number".into(),
            AttrType::Text => "text".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribute {
    pub id: String,
    #[serde(rename = "type")]
    pub kind: AttrType,
    pub askable: bool,
    pub question: Option<String>,
    pub dimension: Option<Dimension>,
    #[serde(skip)]
    pub span: Span,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CompareOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CompareOp {
    pub fn symbol(self) -> &'static str {
        match self {
            CompareOp::Eq => "=",
            CompareOp::Ne => "!=",
            CompareOp::Lt => "<",
            CompareOp::Le => "<=",
            CompareOp::Gt => ">",
            CompareOp::Ge => ">=",
        }
    }

    pub fn is_ordering(self) -> bool {
        !matches!(self, CompareOp::Eq | CompareOp::Ne)
    }

    /// Whether `lhs <op> rhs` holds. Ordering operators hold only between numbers.
    pub fn holds(self, lhs: &Value, rhs: &Value) -> bool {
        match self {
            CompareOp::Eq => lhs == rhs,
            CompareOp::Ne => lhs != rhs,
            _ => match (lhs.as_number(), rhs.as_number()) {
                (Some(a), Some(b)) => match self {
                    CompareOp::Lt => a < b,
                    CompareOp::Le => a <= b,
                    CompareOp::Gt => a > b,
                    CompareOp::Ge => a >= b,
                    CompareOp::Eq | CompareOp::Ne => unreachable!(),
                },
                _ => false,
            },
        }
    }
}

/// Rule premise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Condition {
    Compare { attribute: String, op: CompareOp, value: Value },
    Member { attribute: String, values: Vec<Value> },
    All(Vec<Condition>),
    Any(Vec<Condition>),
    Not(Box<Condition>),
}

impl Condition {
    /// Referenced attributes, left to right, with repeats.
    pub fn attributes(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_attributes(&mut out);
        out
    }

    fn collect_attributes<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Condition::Compare { attribute, .. } | Condition::Member { attribute, .. } => out.push(attribute),
            Condition::All(cs) | Condition::Any(cs) => cs.iter().for_each(|c| c.collect_attributes(out)),
            Condition::Not(c) => c.collect_attributes(out),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Conclusion {
    pub attribute: String,
    pub value: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub id: String,
    pub condition: Condition,
    pub conclusion: Conclusion,
    /// Attenuation strength in `(0, 1]`.
    pub cf: f64,
    pub citation: Option<String>,
    #[serde(skip)]
    pub span: Span,
}

/// `compute <attribute> using <calculator>(<inputs>);`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Binding {
    pub attribute: String,
    pub calculator: String,
    pub inputs: Vec<String>,
    #[serde(skip)]
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnswerValue {
    Known(Value),
    Unknown,
}

/// A user-supplied answer. `Unknown` always carries cf 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Answer {
    pub value: AnswerValue,
    pub cf: f64,
}

impl Answer {
    pub fn known(value: Value) -> Self {
        Self { value: AnswerValue::Known(value), cf: 1.0 }
    }

    pub fn with_cf(value: Value, cf: f64) -> Self {
        Self { value: AnswerValue::Known(value), cf }
    }

    pub fn unknown() -> Self {
        Self { value: AnswerValue::Unknown, cf: 0.0 }
    }

    pub fn to_source(&self) -> String {
        match &self.value {
            AnswerValue::Unknown => "unknown".into(),
            AnswerValue::Known(v) if self.cf == 1.0 => v.to_source(),
            AnswerValue::Known(v) => format!("{} cf {}", v.to_source(), format_number(self.cf)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fixture {
    pub name: String,
    pub answers: Vec<(String, Answer)>,
    #[serde(skip)]
    pub span: Span,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Header {
    pub name: String,
    pub version: String,
    pub threshold: f64,
}

impl Default for Header {
    fn default() -> Self {
        Self { name: "unnamed".into(), version: "0".into(), threshold: DEFAULT_THRESHOLD }
    }
}

/// A parsed knowledge base. Every collection is keyed by id, which fixes the
/// canonical (alphabetical) order used for evaluation and serialization.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct KnowledgeBase {
    pub header: Header,
    pub attributes: BTreeMap<String, Attribute>,
    pub rules: BTreeMap<String, Rule>,
    /// Calculator bindings keyed by output attribute.
    pub computes: BTreeMap<String, Binding>,
    pub fixtures: BTreeMap<String, Fixture>,
}

impl KnowledgeBase {
    pub fn attribute(&self, id: &str) -> Option<&Attribute> {
        self.attributes.get(id)
    }

    pub fn threshold(&self) -> f64 {
        self.header.threshold
    }

    /// Rules concluding `attribute`, in canonical order.
    pub fn rules_for<'a>(&'a self, attribute: &'a str) -> impl Iterator<Item = &'a Rule> + 'a {
        self.rules.values().filter(move |r| r.conclusion.attribute == attribute)
    }

    pub fn binding(&self, attribute: &str) -> Option<&Binding> {
        self.computes.get(attribute)
    }

    /// Bindings using `calculator`, in canonical order.
    pub fn bindings_using<'a>(&'a self, calculator: &'a str) -> impl Iterator<Item = &'a Binding> + 'a {
        self.computes.values().filter(move |b| b.calculator == calculator)
    }

    /// Whether any rule condition or calculator binding reads `attribute`.
    pub fn is_referenced(&self, attribute: &str) -> bool {
        self.rules.values().any(|r| r.condition.attributes().contains(&attribute))
            || self.computes.values().any(|b| b.inputs.iter().any(|i| i == attribute))
    }

    /// Attributes of `dimension` in canonical order.
    pub fn attributes_in(&self, dimension: Dimension) -> impl Iterator<Item = &Attribute> + '_ {
        self.attributes.values().filter(move |a| a.dimension == Some(dimension))
    }
}
