//! Structured differences between two assessments.

use serde::{Deserialize, Serialize};

use crate::kb::Dimension;

use super::assessment::{opt_extended_f64, Assessment, DerivedValue, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerdictChange {
    pub before: Verdict,
    pub after: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimensionChange {
    pub dimension: Dimension,
    pub before: Verdict,
    pub after: Verdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PaybackChange {
    #[serde(with = "opt_extended_f64")]
    pub before: Option<f64>,
    #[serde(with = "opt_extended_f64")]
    pub after: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValueChange {
    pub attribute: String,
    pub before: Option<DerivedValue>,
    pub after: Option<DerivedValue>,
}

/// What changed between a baseline and a scenario assessment.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Delta {
    pub overall: Option<VerdictChange>,
    pub dimensions: Vec<DimensionChange>,
    pub caveats_added: Vec<String>,
    pub caveats_removed: Vec<String>,
    pub payback: Option<PaybackChange>,
    /// Derived and computed attributes whose best value or cf changed, by id.
    pub values: Vec<ValueChange>,
}

impl Delta {
    pub fn between(baseline: &Assessment, scenario: &Assessment) -> Self {
        let overall = (baseline.overall != scenario.overall)
            .then_some(VerdictChange { before: baseline.overall, after: scenario.overall });
        let dimensions = baseline
            .dimensions
            .iter()
            .filter_map(|b| {
                let after = scenario.dimension(b.dimension)?.verdict;
                (after != b.verdict).then_some(DimensionChange { dimension: b.dimension, before: b.verdict, after })
            })
            .collect();
        let caveats_added = scenario.caveats.iter().filter(|c| !baseline.has_caveat(c)).cloned().collect();
        let caveats_removed = baseline.caveats.iter().filter(|c| !scenario.has_caveat(c)).cloned().collect();
        let payback = (baseline.payback.months != scenario.payback.months)
            .then_some(PaybackChange { before: baseline.payback.months, after: scenario.payback.months });

        let mut ids: Vec<&String> = baseline.derived.keys().chain(scenario.derived.keys()).collect();
        ids.sort();
        ids.dedup();
        let values = ids
            .into_iter()
            .filter_map(|id| {
                let before = baseline.derived.get(id);
                let after = scenario.derived.get(id);
                (before != after).then(|| ValueChange {
                    attribute: id.clone(),
                    before: before.cloned(),
                    after: after.cloned(),
                })
            })
            .collect();

        Delta { overall, dimensions, caveats_added, caveats_removed, payback, values }
    }

    pub fn is_empty(&self) -> bool {
        *self == Delta::default()
    }

    pub fn value(&self, attribute: &str) -> Option<&ValueChange> {
        self.values.iter().find(|v| v.attribute == attribute)
    }
}

/// A baseline assessment, the assessment with overrides applied, and the
/// difference between them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhatIf {
    pub baseline: Assessment,
    pub scenario: Assessment,
    pub delta: Delta,
}
