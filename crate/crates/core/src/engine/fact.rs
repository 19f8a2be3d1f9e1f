use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cf::combine_parallel;
use crate::kb::Value;
use crate::Cf;

/// Where a fact came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Provenance {
    UserAnswer,
    /// Non-empty list of the rules whose conclusions were combined.
    RuleDerived { rules: Vec<String> },
    Computed { calculator: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fact {
    pub attribute: String,
    pub value: Value,
    pub cf: Cf,
    pub provenance: Provenance,
}

/// Facts keyed by attribute, at most one per `(attribute, value)`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct WorkingMemory {
    facts: BTreeMap<String, Vec<Fact>>,
}

impl WorkingMemory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a fact. A fact for an existing `(attribute, value)` pair is
    /// merged: certainties combine in parallel and provenance accumulates.
    pub fn assert(&mut self, fact: Fact) {
        let slot = self.facts.entry(fact.attribute.clone()).or_default();
        match slot.iter_mut().find(|f| f.value == fact.value) {
            None => slot.push(fact),
            Some(existing) => {
                existing.cf = Cf::saturating(combine_parallel(existing.cf.value(), fact.cf.value()));
                if let (Provenance::RuleDerived { rules }, Provenance::RuleDerived { rules: more }) =
                    (&mut existing.provenance, fact.provenance)
                {
                    for r in more {
                        if !rules.contains(&r) {
                            rules.push(r);
                        }
                    }
                }
            }
        }
    }

    pub fn get(&self, attribute: &str) -> &[Fact] {
        self.facts.get(attribute).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn iter(&self) -> impl Iterator<Item = &Fact> {
        self.facts.values().flatten()
    }

    pub fn len(&self) -> usize {
        self.facts.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// The most certain fact; ties go to the earliest.
pub fn strongest<'a>(facts: impl IntoIterator<Item = &'a Fact>) -> Option<&'a Fact> {
    facts.into_iter().fold(None, |best: Option<&Fact>, f| match best {
        Some(b) if b.cf.value() >= f.cf.value() => Some(b),
        _ => Some(f),
    })
}
