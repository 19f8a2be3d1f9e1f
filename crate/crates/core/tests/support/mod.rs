//! Test-only helpers shared by the integration suites: a seeded random
//! knowledge-base generator and an exhaustive forward-chaining oracle that
//! shares no evaluation code with the engine.

#![allow(dead_code)]

pub mod bundled;

use std::collections::BTreeMap;

use feaso_core::calculators::Calculator;
use feaso_core::kb::{Answer, AnswerValue, Condition, CompareOp, KnowledgeBase, Value};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Source text and answers for one random case.
pub struct RandomCase {
    pub source: String,
    pub answers: BTreeMap<String, Answer>,
}

#[derive(Clone)]
enum Kind {
    Bool,
    Enum(usize),
    Number,
}

struct Attr {
    id: String,
    kind: Kind,
    askable: bool,
}

/// Generates a valid KB of at most `max_attrs` attributes and `max_rules`
/// rules, with every condition kind, plus a fully specified answer set
/// (some answers `unknown`). Rules only read attributes declared before
/// their conclusion, so the dependency graph is acyclic.
pub fn random_case(seed: u64, max_attrs: usize, max_rules: usize) -> RandomCase {
    let mut rng = StdRng::seed_from_u64(seed);
    let n_attrs = rng.gen_range(3..=max_attrs.max(3));
    let n_askable = rng.gen_range(1..n_attrs);
    let mut attrs = Vec::new();
    for i in 0..n_attrs {
        let kind = match rng.gen_range(0..3) {
            0 => Kind::Bool,
            1 => Kind::Enum(rng.gen_range(2..=4)),
            _ => Kind::Number,
        };
        attrs.push(Attr { id: format!("x{i}"), kind, askable: i < n_askable });
    }
    let threshold = [0.1, 0.2, 0.2, 0.3][rng.gen_range(0..4)];
    let mut src = format!("knowledgebase random{seed} {{ version: \"1\"; threshold: {threshold}; }}\n");
    for a in &attrs {
        let ty = match a.kind {
            Kind::Bool => "bool".to_string(),
            Kind::Enum(n) => format!("enum({})", (0..n).map(|v| format!("v{v}")).collect::<Vec<_>>().join(", ")),
            Kind::Number => "number(units)".to_string(),
        };
        if a.askable {
            src += &format!("attribute {} {{ type: {ty}; askable; question: \"Value of {}?\"; }}\n", a.id, a.id);
        } else {
            src += &format!("attribute {} {{ type: {ty}; }}\n", a.id);
        }
    }
    // Optionally make one derived numeric attribute a calculator output.
    let mut computed = None;
    if rng.gen_bool(0.3) {
        let inputs: Vec<usize> = (0..n_askable).filter(|&i| matches!(attrs[i].kind, Kind::Number)).collect();
        let outputs: Vec<usize> = (n_askable..n_attrs).filter(|&i| matches!(attrs[i].kind, Kind::Number)).collect();
        if let (Some(&i), Some(&o)) = (inputs.first(), outputs.first()) {
            src += &format!("compute {} using coverage_multiplier({});\n", attrs[o].id, attrs[i].id);
            computed = Some(o);
        }
    }
    let derived: Vec<usize> = (n_askable..n_attrs).filter(|&i| Some(i) != computed).collect();
    if !derived.is_empty() {
        let n_rules = rng.gen_range(1..=max_rules);
        for r in 0..n_rules {
            let target = derived[rng.gen_range(0..derived.len())];
            let cond = random_condition(&mut rng, &attrs[..target], 0);
            let value = random_literal(&mut rng, &attrs[target].kind);
            let cf = rng.gen_range(1..=20) as f64 / 20.0;
            src += &format!(
                "rule r{r:02} {{ if {cond} then {} = {value} cf {cf}; cite \"generated\"; }}\n",
                attrs[target].id
            );
        }
    }
    let mut answers = BTreeMap::new();
    for a in attrs.iter().filter(|a| a.askable) {
        let answer = if rng.gen_bool(0.1) {
            Answer::unknown()
        } else {
            let v = match a.kind {
                Kind::Bool => Value::Bool(rng.gen_bool(0.5)),
                Kind::Enum(n) => Value::Symbol(format!("v{}", rng.gen_range(0..n))),
                Kind::Number => Value::Number([0.8, 0.9, 1.0, 2.0, 5.0][rng.gen_range(0..5)]),
            };
            let cf = [1.0, 1.0, 0.8, 0.5, 0.3, 0.15][rng.gen_range(0..6)];
            Answer::with_cf(v, cf)
        };
        answers.insert(a.id.clone(), answer);
    }
    RandomCase { source: src, answers }
}

fn random_literal(rng: &mut StdRng, kind: &Kind) -> String {
    match kind {
        Kind::Bool => if rng.gen_bool(0.5) { "yes" } else { "no" }.to_string(),
        Kind::Enum(n) => format!("v{}", rng.gen_range(0..*n)),
        Kind::Number => ["0.8", "0.9", "1", "2", "5", "-1", "2.5"][rng.gen_range(0..7)].to_string(),
    }
}

fn random_condition(rng: &mut StdRng, scope: &[Attr], depth: usize) -> String {
    let compound = depth < 2 && rng.gen_bool(0.45);
    if compound {
        match rng.gen_range(0..3) {
            0 | 1 => {
                let op = if rng.gen_bool(0.5) { " and " } else { " or " };
                let n = rng.gen_range(2..=3);
                let parts: Vec<String> = (0..n).map(|_| format!("({})", random_condition(rng, scope, depth + 1))).collect();
                parts.join(op)
            }
            _ => format!("not ({})", random_condition(rng, scope, depth + 1)),
        }
    } else {
        let a = &scope[rng.gen_range(0..scope.len())];
        match a.kind {
            Kind::Bool => format!("{} {} {}", a.id, ["=", "!="][rng.gen_range(0..2)], random_literal(rng, &a.kind)),
            Kind::Enum(n) => {
                if rng.gen_bool(0.4) {
                    let k = rng.gen_range(1..=n);
                    let vals: Vec<String> = (0..k).map(|v| format!("v{v}")).collect();
                    format!("{} in ({})", a.id, vals.join(", "))
                } else {
                    format!("{} {} {}", a.id, ["=", "!="][rng.gen_range(0..2)], random_literal(rng, &a.kind))
                }
            }
            Kind::Number => {
                let op = ["=", "!=", "<", "<=", ">", ">="][rng.gen_range(0..6)];
                format!("{} {op} {}", a.id, random_literal(rng, &a.kind))
            }
        }
    }
}

/// A fact as the oracle sees it: value and certainty.
pub type OracleFacts = BTreeMap<String, Vec<(Value, f64)>>;

fn oracle_combine(a: f64, b: f64) -> f64 {
    if a >= 0.0 && b >= 0.0 {
        a + b * (1.0 - a)
    } else if a <= 0.0 && b <= 0.0 {
        a + b * (1.0 + a)
    } else {
        let d = 1.0 - a.abs().min(b.abs());
        if d == 0.0 {
            0.0
        } else {
            (a + b) / d
        }
    }
}

fn oracle_leaf(facts: &OracleFacts, attribute: &str, test: impl Fn(&Value) -> bool) -> f64 {
    facts
        .get(attribute)
        .into_iter()
        .flatten()
        .filter(|(v, _)| test(v))
        .map(|(_, cf)| *cf)
        .fold(0.0, f64::max)
}

fn oracle_compare(op: CompareOp, lhs: &Value, rhs: &Value) -> bool {
    match (op, lhs, rhs) {
        (CompareOp::Eq, a, b) => a == b,
        (CompareOp::Ne, a, b) => a != b,
        (op, Value::Number(a), Value::Number(b)) => match op {
            CompareOp::Lt => a < b,
            CompareOp::Le => a <= b,
            CompareOp::Gt => a > b,
            CompareOp::Ge => a >= b,
            _ => unreachable!(),
        },
        _ => false,
    }
}

fn oracle_eval(c: &Condition, facts: &OracleFacts) -> f64 {
    match c {
        Condition::Compare { attribute, op, value } => oracle_leaf(facts, attribute, |v| oracle_compare(*op, v, value)),
        Condition::Member { attribute, values } => oracle_leaf(facts, attribute, |v| values.contains(v)),
        Condition::All(cs) => cs.iter().map(|c| oracle_eval(c, facts)).fold(f64::INFINITY, f64::min),
        Condition::Any(cs) => cs.iter().map(|c| oracle_eval(c, facts)).fold(f64::NEG_INFINITY, f64::max),
        Condition::Not(c) => -oracle_eval(c, facts),
    }
}

/// Exhaustive forward chaining: every rule is re-evaluated against the
/// current facts until nothing changes. Each round derives all
/// non-askable attributes from scratch, so repeated rounds never double
/// count a rule's contribution.
pub fn forward_fixpoint(kb: &KnowledgeBase, answers: &BTreeMap<String, Answer>) -> OracleFacts {
    let mut base = OracleFacts::new();
    for (attr, answer) in answers {
        if let AnswerValue::Known(v) = &answer.value {
            base.entry(attr.clone()).or_default().push((v.clone(), answer.cf));
        }
    }
    let mut facts = base.clone();
    for _ in 0..=kb.attributes.len() + 1 {
        let mut next = base.clone();
        for (attr, binding) in &kb.computes {
            let mut inputs = Vec::new();
            let mut cf = 1.0f64;
            for i in &binding.inputs {
                let best = facts.get(i).into_iter().flatten().fold(None, |b: Option<&(Value, f64)>, f| match b {
                    Some(b) if b.1 >= f.1 => Some(b),
                    _ => Some(f),
                });
                match best {
                    Some((v, c)) => {
                        inputs.push(v.clone());
                        cf = cf.min(*c);
                    }
                    None => break,
                }
            }
            if inputs.len() == binding.inputs.len() {
                if let Ok(v) = Calculator::from_id(&binding.calculator).unwrap().apply(&inputs) {
                    next.entry(attr.clone()).or_default().push((v, cf));
                }
            }
        }
        for rule in kb.rules.values() {
            let cf = oracle_eval(&rule.condition, &facts);
            if cf >= kb.header.threshold {
                let contribution = rule.cf * cf;
                let slot = next.entry(rule.conclusion.attribute.clone()).or_default();
                match slot.iter_mut().find(|(v, _)| *v == rule.conclusion.value) {
                    Some((_, c)) => *c = oracle_combine(*c, contribution),
                    None => slot.push((rule.conclusion.value.clone(), contribution)),
                }
            }
        }
        if next == facts {
            return facts;
        }
        facts = next;
    }
    panic!("forward chaining did not converge");
}
