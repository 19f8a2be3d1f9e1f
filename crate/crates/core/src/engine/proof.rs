use serde::{Deserialize, Serialize};

use crate::cf::combine_parallel;
use crate::kb::KnowledgeBase;

use super::eval::evaluate_condition;
use super::fact::{Fact, WorkingMemory};
use super::EngineError;

/// How a proof node's fact was obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Step {
    Answer,
    Computed {
        calculator: String,
    },
    Rule {
        rule: String,
        citation: Option<String>,
        rule_cf: f64,
        condition_cf: f64,
    },
    /// Parallel combination of the children's rule conclusions.
    Combined,
}

/// A derivation tree. `children` are the facts a step relied on: the facts
/// matched by a rule's condition, a calculator's inputs, or the individual
/// rule conclusions being combined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofNode {
    pub conclusion: Fact,
    pub step: Step,
    pub children: Vec<ProofNode>,
}

impl ProofNode {
    /// Recomputes this node's certainty bottom-up from its leaves, using the
    /// same arithmetic the engine used.
    pub fn replay_cf(&self, kb: &KnowledgeBase) -> Result<f64, EngineError> {
        match &self.step {
            Step::Answer => Ok(self.conclusion.cf.value()),
            Step::Computed { .. } => {
                let mut cf = 1.0f64;
                for c in &self.children {
                    cf = cf.min(c.replay_cf(kb)?);
                }
                Ok(cf)
            }
            Step::Rule { rule, .. } => {
                let rule = kb.rules.get(rule).ok_or_else(|| EngineError::UnknownRule(rule.clone()))?;
                let mut wm = WorkingMemory::new();
                for c in &self.children {
                    let mut fact = c.conclusion.clone();
                    fact.cf = crate::Cf::saturating(c.replay_cf(kb)?);
                    wm.assert(fact);
                }
                Ok(rule.cf * evaluate_condition(kb, &rule.condition, &wm)?)
            }
            Step::Combined => {
                let mut it = self.children.iter();
                let mut cf = match it.next() {
                    Some(first) => first.replay_cf(kb)?,
                    None => return Ok(0.0),
                };
                for c in it {
                    cf = combine_parallel(cf, c.replay_cf(kb)?);
                }
                Ok(cf)
            }
        }
    }

    /// Rule ids used anywhere in this tree, in visiting order, deduplicated.
    pub fn rules(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.visit(&mut |n| {
            if let Step::Rule { rule, .. } = &n.step {
                if !out.contains(rule) {
                    out.push(rule.clone());
                }
            }
        });
        out
    }

    pub fn visit(&self, f: &mut impl FnMut(&ProofNode)) {
        f(self);
        for c in &self.children {
            c.visit(f);
        }
    }

    /// Indented plain-text rendering.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        let f = &self.conclusion;
        let pad = "  ".repeat(depth);
        let how = match &self.step {
            Step::Answer => "answered".to_string(),
            Step::Computed { calculator } => format!("computed by {calculator}"),
            Step::Rule { rule, citation, rule_cf, condition_cf } => {
                let cite = citation.as_deref().map(|c| format!(" [{c}]")).unwrap_or_default();
                format!("rule {rule} (rule cf {rule_cf}, condition cf {condition_cf:.4}){cite}")
            }
            Step::Combined => "combined".to_string(),
        };
        out.push_str(&format!("{pad}{} = {} (cf {:.4}) <- {how}\n", f.attribute, f.value.to_source(), f.cf.value()));
        for c in &self.children {
            c.render_into(depth + 1, out);
        }
    }
}
