//! The bundled feasibility knowledge base and its reference cases.

use std::sync::Arc;

use crate::engine::Answers;
use crate::kb::answers::parse_answers;
use crate::kb::{load_kb, Answer, Diagnostic, KnowledgeBase};
use crate::session::Verdict;

/// Source of the bundled knowledge base.
pub const BUNDLED_KB: &str = include_str!("../resources/feasibility.fkb");

/// Parses and validates the bundled knowledge base.
pub fn load_bundled_kb() -> KnowledgeBase {
    match load_kb(BUNDLED_KB) {
        Ok((kb, _warnings)) => kb,
        Err(diags) => panic!("bundled knowledge base is invalid: {diags:?}"),
    }
}

/// The bundled knowledge base behind a shareable handle.
pub fn bundled_kb() -> Arc<KnowledgeBase> {
    Arc::new(load_bundled_kb())
}

/// What a reference case is expected to produce.
#[derive(Debug, Clone, PartialEq)]
pub struct Expected {
    pub overall: Verdict,
    /// Caveats that must be present (others may be too).
    pub caveats: &'static [&'static str],
    pub payback_months: f64,
}

/// A worked case: a complete answer file and its expected outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseFixture {
    pub name: &'static str,
    pub source: &'static str,
    pub expected: Expected,
}

impl CaseFixture {
    /// Answers in file order.
    pub fn answer_lines(&self, kb: &KnowledgeBase) -> Result<Vec<(String, Answer)>, Vec<Diagnostic>> {
        Ok(parse_answers(kb, self.source)?.into_iter().map(|l| (l.attribute, l.answer)).collect())
    }

    pub fn answers(&self, kb: &KnowledgeBase) -> Result<Answers, Vec<Diagnostic>> {
        Ok(self.answer_lines(kb)?.into_iter().collect())
    }
}

/// Thyroid-surgery protocol advisor: worthwhile, with caveats.
pub const THYROID: CaseFixture = CaseFixture {
    name: "thyroid",
    source: include_str!("../resources/fixtures/thyroid.answers"),
    expected: Expected {
        overall: Verdict::FeasibleWithCaveats,
        caveats: &["interfaces", "safety_criticality", "user_acceptance"],
        payback_months: (45_000.0 + 16_000.0 / 2.2857 + 3_000.0) * 12.0 / (600_000.0 - 8_500.0),
    },
};

/// Small manufacturing diagnostic system that paid for itself quickly.
pub const ICL: CaseFixture = CaseFixture {
    name: "icl",
    source: include_str!("../resources/fixtures/icl.answers"),
    expected: Expected { overall: Verdict::Feasible, caveats: &[], payback_months: 30_000.0 * 12.0 / 135_000.0 },
};

/// A system overtaken by an unplanned reorganisation.
pub const SAVINGS_BANK: CaseFixture = CaseFixture {
    name: "savings_bank",
    source: include_str!("../resources/fixtures/savings_bank.answers"),
    expected: Expected { overall: Verdict::Infeasible, caveats: &[], payback_months: 55_000.0 * 12.0 / 195_000.0 },
};

pub static FIXTURES: [CaseFixture; 3] = [ICL, SAVINGS_BANK, THYROID];

pub fn fixture(name: &str) -> Option<&'static CaseFixture> {
    FIXTURES.iter().find(|f| f.name == name)
}
