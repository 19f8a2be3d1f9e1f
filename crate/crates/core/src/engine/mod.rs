//! Goal-directed inference with certainty factors.
//!
//! The engine backward-chains from a goal attribute. Askable attributes are
//! looked up in the supplied answers; computed attributes run their
//! calculator; everything else is concluded by rules, evaluated in canonical
//! order. Results are memoised per attribute for the lifetime of an
//! [`Engine`], so each attribute is resolved at most once.
//!
//! Two modes differ only in how a missing answer is treated:
//! [`Mode::Interview`] stops and returns a [`QuestionRequest`], while
//! [`Mode::Exhaustive`] treats it as unknown and records it as pending.

mod eval;
mod fact;
mod proof;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::calculators::Calculator;
use crate::kb::{AnswerValue, Answer, Condition, KnowledgeBase, Rule, Value};
use crate::Cf;

pub use eval::{evaluate_condition, holds};
pub use fact::{strongest, Fact, Provenance, WorkingMemory};
pub use proof::{ProofNode, Step};

/// Answers keyed by attribute id.
pub type Answers = BTreeMap<String, Answer>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EngineError {
    #[error("undeclared attribute `{0}`")]
    UndeclaredAttribute(String),
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("type mismatch on `{attribute}`: {detail}")]
    TypeMismatch { attribute: String, detail: String },
    #[error("dependency cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),
    #[error("`{0}` has not been derived")]
    NotDerived(String),
    #[error("no question about `{0}` is pending")]
    NotPending(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Interview,
    Exhaustive,
}

/// What the current goal was being pursued through.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Via {
    Rule { id: String, citation: Option<String> },
    Calculator { id: String },
}

/// One level of the reasoning chain behind a question: `goal` is being
/// established `via` a rule or calculator which `needs` an attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhyFrame {
    pub goal: String,
    pub via: Via,
    pub needs: String,
}

/// A request for the user to answer `attribute`. `why` runs from the
/// outermost goal inwards.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionRequest {
    pub attribute: String,
    pub why: Vec<WhyFrame>,
}

/// Why an attribute ended without facts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Blocked {
    /// Askable and not yet answered.
    Unanswered,
    /// Answered `unknown`.
    Unknown,
    /// A calculator input had no value.
    MissingInput { input: String },
    /// The calculator rejected its inputs.
    Calculator { message: String },
}

/// The outcome of resolving one goal.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    Resolved(Resolution),
    NeedsAnswer(QuestionRequest),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Resolution {
    pub goal: String,
    /// One proof per concluded value, in order of first conclusion.
    pub proofs: Vec<ProofNode>,
    /// Unanswered askable attributes the goal depends on (exhaustive mode).
    pub pending: BTreeSet<String>,
    /// Attributes answered `unknown` that the goal depends on.
    pub unknown: BTreeSet<String>,
}

impl Resolution {
    pub fn facts(&self) -> impl Iterator<Item = &Fact> {
        self.proofs.iter().map(|p| &p.conclusion)
    }
}

#[derive(Debug, Clone, Default)]
struct Resolved {
    proofs: Vec<ProofNode>,
    pending: BTreeSet<String>,
    unknown: BTreeSet<String>,
}

enum Interrupt {
    Ask(QuestionRequest),
    Fail(EngineError),
}

impl From<EngineError> for Interrupt {
    fn from(e: EngineError) -> Self {
        Interrupt::Fail(e)
    }
}

/// Per-rule evaluation scratch: the facts matched so far, pending
/// attributes reached, and a count of leaves whose value was pending.
#[derive(Default)]
struct Scratch {
    matched: Vec<ProofNode>,
    pending: BTreeSet<String>,
    unknown: BTreeSet<String>,
    pending_reads: usize,
}

pub struct Engine<'a> {
    kb: &'a KnowledgeBase,
    answers: &'a Answers,
    mode: Mode,
    resolved: BTreeMap<String, Resolved>,
    active: Vec<String>,
    frames: Vec<WhyFrame>,
    blocked: BTreeMap<String, Blocked>,
}

impl<'a> Engine<'a> {
    pub fn new(kb: &'a KnowledgeBase, answers: &'a Answers, mode: Mode) -> Self {
        Self {
            kb,
            answers,
            mode,
            resolved: BTreeMap::new(),
            active: Vec::new(),
            frames: Vec::new(),
            blocked: BTreeMap::new(),
        }
    }

    pub fn interview(kb: &'a KnowledgeBase, answers: &'a Answers) -> Self {
        Self::new(kb, answers, Mode::Interview)
    }

    pub fn exhaustive(kb: &'a KnowledgeBase, answers: &'a Answers) -> Self {
        Self::new(kb, answers, Mode::Exhaustive)
    }

    pub fn kb(&self) -> &'a KnowledgeBase {
        self.kb
    }

    /// Resolves `goal`, or in interview mode returns the first question
    /// that stands in the way.
    pub fn backchain(&mut self, goal: &str) -> Result<Outcome, EngineError> {
        self.frames.clear();
        self.active.clear();
        match self.resolve(goal) {
            Ok(()) => {
                let r = &self.resolved[goal];
                Ok(Outcome::Resolved(Resolution {
                    goal: goal.to_string(),
                    proofs: r.proofs.clone(),
                    pending: r.pending.clone(),
                    unknown: r.unknown.clone(),
                }))
            }
            Err(Interrupt::Ask(q)) => Ok(Outcome::NeedsAnswer(q)),
            Err(Interrupt::Fail(e)) => Err(e),
        }
    }

    /// Proofs for an attribute resolved so far, one per concluded value.
    pub fn proofs(&self, attribute: &str) -> &[ProofNode] {
        self.resolved.get(attribute).map(|r| r.proofs.as_slice()).unwrap_or(&[])
    }

    pub fn facts(&self, attribute: &str) -> impl Iterator<Item = &Fact> {
        self.proofs(attribute).iter().map(|p| &p.conclusion)
    }

    /// The most certain fact for `attribute`, if any.
    pub fn best(&self, attribute: &str) -> Option<&Fact> {
        strongest(self.facts(attribute))
    }

    /// Pending askable attributes that `attribute` depends on.
    pub fn pending(&self, attribute: &str) -> Option<&BTreeSet<String>> {
        self.resolved.get(attribute).map(|r| &r.pending)
    }

    /// Attributes answered `unknown` that `attribute` depends on.
    pub fn unknown(&self, attribute: &str) -> Option<&BTreeSet<String>> {
        self.resolved.get(attribute).map(|r| &r.unknown)
    }

    /// Attributes resolved so far, in canonical order.
    pub fn resolved(&self) -> impl Iterator<Item = &str> {
        self.resolved.keys().map(String::as_str)
    }

    /// Attributes resolved without any fact, and why.
    pub fn blocked(&self) -> &BTreeMap<String, Blocked> {
        &self.blocked
    }

    /// Every fact established so far.
    pub fn working_memory(&self) -> WorkingMemory {
        let mut wm = WorkingMemory::new();
        for r in self.resolved.values() {
            for p in &r.proofs {
                wm.assert(p.conclusion.clone());
            }
        }
        wm
    }

    fn resolve(&mut self, attribute: &str) -> Result<(), Interrupt> {
        if self.resolved.contains_key(attribute) {
            return Ok(());
        }
        if let Some(pos) = self.active.iter().position(|a| a == attribute) {
            let mut cycle = self.active[pos..].to_vec();
            cycle.push(attribute.to_string());
            return Err(EngineError::Cycle(cycle).into());
        }
        let attr = self.kb.attribute(attribute).ok_or_else(|| EngineError::UndeclaredAttribute(attribute.to_string()))?;
        let resolved = if attr.askable {
            self.resolve_askable(attribute)?
        } else if let Some(binding) = self.kb.binding(attribute) {
            self.active.push(attribute.to_string());
            let r = self.resolve_computed(attribute, &binding.calculator, &binding.inputs);
            self.active.pop();
            r?
        } else {
            self.active.push(attribute.to_string());
            let r = self.resolve_derived(attribute);
            self.active.pop();
            r?
        };
        self.resolved.insert(attribute.to_string(), resolved);
        Ok(())
    }

    fn resolve_askable(&mut self, attribute: &str) -> Result<Resolved, Interrupt> {
        match self.answers.get(attribute) {
            Some(Answer { value: AnswerValue::Known(value), cf }) => {
                let attr = &self.kb.attributes[attribute];
                if !attr.kind.admits(value) {
                    return Err(EngineError::TypeMismatch {
                        attribute: attribute.to_string(),
                        detail: format!("answer `{value}` is not a {} value", attr.kind.describe()),
                    }
                    .into());
                }
                let fact = Fact {
                    attribute: attribute.to_string(),
                    value: value.clone(),
                    cf: Cf::saturating(*cf),
                    provenance: Provenance::UserAnswer,
                };
                Ok(Resolved {
                    proofs: vec![ProofNode { conclusion: fact, step: Step::Answer, children: vec![] }],
                    ..Resolved::default()
                })
            }
            Some(Answer { value: AnswerValue::Unknown, .. }) => {
                self.blocked.insert(attribute.to_string(), Blocked::Unknown);
                Ok(Resolved { unknown: BTreeSet::from([attribute.to_string()]), ..Resolved::default() })
            }
            None => match self.mode {
                Mode::Interview => Err(Interrupt::Ask(QuestionRequest {
                    attribute: attribute.to_string(),
                    why: self.frames.clone(),
                })),
                Mode::Exhaustive => {
                    self.blocked.insert(attribute.to_string(), Blocked::Unanswered);
                    Ok(Resolved { pending: BTreeSet::from([attribute.to_string()]), ..Resolved::default() })
                }
            },
        }
    }

    fn resolve_computed(&mut self, attribute: &str, calculator: &str, inputs: &[String]) -> Result<Resolved, Interrupt> {
        let mut pending = BTreeSet::new();
        let mut unknown = BTreeSet::new();
        let mut children = Vec::new();
        let mut missing = None;
        for input in inputs {
            self.frames.push(WhyFrame {
                goal: attribute.to_string(),
                via: Via::Calculator { id: calculator.to_string() },
                needs: input.clone(),
            });
            let r = self.resolve(input);
            self.frames.pop();
            r?;
            let r = &self.resolved[input.as_str()];
            pending.extend(r.pending.iter().cloned());
            unknown.extend(r.unknown.iter().cloned());
            match r.proofs.iter().fold(None, |best: Option<&ProofNode>, p| match best {
                Some(b) if b.conclusion.cf.value() >= p.conclusion.cf.value() => Some(b),
                _ => Some(p),
            }) {
                Some(p) => children.push(p.clone()),
                None => {
                    missing.get_or_insert_with(|| input.clone());
                }
            }
        }
        if let Some(input) = missing {
            self.blocked.insert(attribute.to_string(), Blocked::MissingInput { input });
            return Ok(Resolved { proofs: vec![], pending, unknown });
        }
        let calc = Calculator::from_id(calculator).ok_or_else(|| EngineError::TypeMismatch {
            attribute: attribute.to_string(),
            detail: format!("unknown calculator `{calculator}`"),
        })?;
        let values: Vec<Value> = children.iter().map(|c| c.conclusion.value.clone()).collect();
        match calc.apply(&values) {
            Ok(value) => {
                let cf = children.iter().map(|c| c.conclusion.cf.value()).fold(1.0f64, f64::min);
                let fact = Fact {
                    attribute: attribute.to_string(),
                    value,
                    cf: Cf::saturating(cf),
                    provenance: Provenance::Computed { calculator: calculator.to_string() },
                };
                let node = ProofNode {
                    conclusion: fact,
                    step: Step::Computed { calculator: calculator.to_string() },
                    children,
                };
                Ok(Resolved { proofs: vec![node], pending, unknown })
            }
            Err(e) => {
                self.blocked.insert(attribute.to_string(), Blocked::Calculator { message: e.to_string() });
                Ok(Resolved { proofs: vec![], pending, unknown })
            }
        }
    }

    fn resolve_derived(&mut self, attribute: &str) -> Result<Resolved, Interrupt> {
        let kb = self.kb;
        let threshold = kb.threshold();
        let mut pending = BTreeSet::new();
        let mut unknown = BTreeSet::new();
        // Fired rule conclusions grouped by value, in order of first firing.
        let mut groups: Vec<(Value, Vec<ProofNode>)> = Vec::new();
        for rule in kb.rules_for(attribute) {
            let mut scratch = Scratch::default();
            self.frames.push(WhyFrame {
                goal: attribute.to_string(),
                via: Via::Rule { id: rule.id.clone(), citation: rule.citation.clone() },
                needs: String::new(),
            });
            let r = self.eval(&rule.condition, true, &mut scratch);
            self.frames.pop();
            let condition_cf = r?;
            pending.extend(scratch.pending);
            unknown.extend(scratch.unknown);
            if !holds(condition_cf, threshold) {
                continue;
            }
            let node = rule_node(rule, condition_cf, scratch.matched);
            match groups.iter_mut().find(|(v, _)| *v == rule.conclusion.value) {
                Some((_, nodes)) => nodes.push(node),
                None => groups.push((rule.conclusion.value.clone(), vec![node])),
            }
        }
        let proofs = groups
            .into_iter()
            .map(|(value, mut nodes)| {
                if nodes.len() == 1 {
                    return nodes.pop().unwrap();
                }
                let mut cf = nodes[0].conclusion.cf.value();
                for n in &nodes[1..] {
                    cf = crate::cf::combine_parallel(cf, n.conclusion.cf.value());
                }
                let rules = nodes.iter().map(|n| rule_id(n).to_string()).collect();
                ProofNode {
                    conclusion: Fact {
                        attribute: attribute.to_string(),
                        value,
                        cf: Cf::saturating(cf),
                        provenance: Provenance::RuleDerived { rules },
                    },
                    step: Step::Combined,
                    children: nodes,
                }
            })
            .collect();
        Ok(Resolved { proofs, pending, unknown })
    }

    /// Lazy condition evaluation. A conjunction in positive position stops
    /// at the first operand that is definitely below threshold: the rule
    /// cannot fire through it, and any enclosing disjunction takes its
    /// maximum from a sibling instead. Operands under an odd number of
    /// negations are always evaluated in full.
    fn eval(&mut self, c: &Condition, positive: bool, scratch: &mut Scratch) -> Result<f64, Interrupt> {
        match c {
            Condition::Compare { attribute, .. } | Condition::Member { attribute, .. } => {
                eval::check_leaf(self.kb, c)?;
                if let Some(frame) = self.frames.last_mut() {
                    frame.needs = attribute.clone();
                }
                self.resolve(attribute)?;
                let r = &self.resolved[attribute.as_str()];
                if !r.pending.is_empty() {
                    scratch.pending.extend(r.pending.iter().cloned());
                    scratch.pending_reads += 1;
                }
                scratch.unknown.extend(r.unknown.iter().cloned());
                let mut cf = 0.0f64;
                for p in &r.proofs {
                    if eval::leaf_matches(c, &p.conclusion) {
                        cf = cf.max(p.conclusion.cf.value());
                        if !scratch.matched.iter().any(|m| {
                            m.conclusion.attribute == p.conclusion.attribute && m.conclusion.value == p.conclusion.value
                        }) {
                            scratch.matched.push(p.clone());
                        }
                    }
                }
                Ok(cf)
            }
            Condition::All(cs) => {
                let threshold = self.kb.threshold();
                let mut acc = 1.0f64;
                for c in cs {
                    let before = scratch.pending_reads;
                    let v = self.eval(c, positive, scratch)?;
                    acc = acc.min(v);
                    if positive && !holds(v, threshold) && scratch.pending_reads == before {
                        break;
                    }
                }
                Ok(acc)
            }
            Condition::Any(cs) => {
                let mut acc = -1.0f64;
                for c in cs {
                    acc = acc.max(self.eval(c, positive, scratch)?);
                }
                Ok(acc)
            }
            Condition::Not(c) => Ok(-self.eval(c, !positive, scratch)?),
        }
    }
}

fn rule_node(rule: &Rule, condition_cf: f64, matched: Vec<ProofNode>) -> ProofNode {
    ProofNode {
        conclusion: Fact {
            attribute: rule.conclusion.attribute.clone(),
            value: rule.conclusion.value.clone(),
            cf: Cf::saturating(rule.cf * condition_cf),
            provenance: Provenance::RuleDerived { rules: vec![rule.id.clone()] },
        },
        step: Step::Rule {
            rule: rule.id.clone(),
            citation: rule.citation.clone(),
            rule_cf: rule.cf,
            condition_cf,
        },
        children: matched,
    }
}

fn rule_id(node: &ProofNode) -> &str {
    match &node.step {
        Step::Rule { rule, .. } => rule,
        _ => "",
    }
}

/// Proofs of how `subject` was established, one per concluded value.
pub fn explain_how(kb: &KnowledgeBase, answers: &Answers, subject: &str) -> Result<Vec<ProofNode>, EngineError> {
    let mut engine = Engine::exhaustive(kb, answers);
    match engine.backchain(subject)? {
        Outcome::Resolved(r) if !r.proofs.is_empty() => Ok(r.proofs),
        _ => Err(EngineError::NotDerived(subject.to_string())),
    }
}

/// The first question an interview over `goals` would ask, if any.
pub fn next_question(kb: &KnowledgeBase, answers: &Answers, goals: &[String]) -> Result<Option<QuestionRequest>, EngineError> {
    let mut engine = Engine::interview(kb, answers);
    for goal in goals {
        if let Outcome::NeedsAnswer(q) = engine.backchain(goal)? {
            return Ok(Some(q));
        }
    }
    Ok(None)
}

/// The reasoning chain behind the pending question about `subject`.
pub fn explain_why(kb: &KnowledgeBase, answers: &Answers, goals: &[String], subject: &str) -> Result<Vec<WhyFrame>, EngineError> {
    match next_question(kb, answers, goals)? {
        Some(q) if q.attribute == subject => Ok(q.why),
        _ => Err(EngineError::NotPending(subject.to_string())),
    }
}

#[cfg(test)]
mod tests;
