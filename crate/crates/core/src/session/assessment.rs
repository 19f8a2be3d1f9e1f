//! Turning engine results into per-dimension verdicts, a risk register and
//! a payback summary.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::calculators::{Calculator, Level, DEFAULT_CONTINGENCY_THRESHOLD};
use crate::engine::{Answers, Engine, EngineError, Outcome, ProofNode, Step};
use crate::kb::{Dimension, KnowledgeBase, Value};

use super::agenda::{agenda, caveat_attribute, verdict_attribute};

/// The verdict lattice, worst first. `Ord` follows the lattice, so the
/// overall verdict is the minimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Infeasible,
    HighRisk,
    FeasibleWithCaveats,
    Feasible,
}

impl Verdict {
    pub const ALL: [Verdict; 4] = [Verdict::Infeasible, Verdict::HighRisk, Verdict::FeasibleWithCaveats, Verdict::Feasible];

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Infeasible => "infeasible",
            Verdict::HighRisk => "high_risk",
            Verdict::FeasibleWithCaveats => "feasible_with_caveats",
            Verdict::Feasible => "feasible",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|v| v.as_str() == s)
    }

    /// Human-readable form, e.g. "feasible with caveats".
    pub fn label(self) -> String {
        self.as_str().replace('_', " ")
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A rule that contributed a conclusion, with its citation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleRef {
    pub id: String,
    pub citation: Option<String>,
}

/// A concluded verdict value for a dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub verdict: Verdict,
    pub cf: f64,
    pub rules: Vec<RuleRef>,
}

/// A caveat raised on a dimension, with the rules that raised it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Caveat {
    pub caveat: String,
    pub cf: f64,
    pub rules: Vec<RuleRef>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionVerdict {
    pub dimension: Dimension,
    pub verdict: Verdict,
    /// Certainty of the evidence behind `verdict`; 0 when the verdict comes
    /// from missing evidence.
    pub cf: f64,
    pub findings: Vec<Finding>,
    pub caveats: Vec<Caveat>,
    /// Askable attributes this dimension needed but did not get.
    pub unresolved: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskEntry {
    pub label: String,
    pub likelihood: Option<Level>,
    pub impact: Option<Level>,
    pub serious: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskRegister {
    pub risks: Vec<RiskEntry>,
    /// Serious risks needed before contingency planning is advised.
    pub threshold: usize,
    /// `None` when some risk could not be rated.
    pub contingency_required: Option<bool>,
}

/// Money figures behind the payback period. `months` is `+inf` when the
/// investment is never recovered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PaybackSummary {
    pub development_cost: Option<f64>,
    pub annual_benefit: Option<f64>,
    pub annual_cost: Option<f64>,
    #[serde(with = "opt_extended_f64")]
    pub months: Option<f64>,
}

/// The most certain value of a derived attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DerivedValue {
    pub value: Value,
    pub cf: f64,
    pub dimension: Option<Dimension>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KbInfo {
    pub name: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Assessment {
    pub kb: KbInfo,
    pub overall: Verdict,
    /// Union of dimension caveats, in dimension order.
    pub caveats: Vec<String>,
    pub dimensions: Vec<DimensionVerdict>,
    pub risks: RiskRegister,
    pub payback: PaybackSummary,
    /// Every unresolved askable attribute, in canonical order.
    pub unresolved: Vec<String>,
    /// Best value of every derived or computed attribute that was reached.
    pub derived: BTreeMap<String, DerivedValue>,
    /// Proofs for every derived or computed attribute that was reached.
    pub proofs: BTreeMap<String, Vec<ProofNode>>,
}

impl Assessment {
    pub fn dimension(&self, dimension: Dimension) -> Option<&DimensionVerdict> {
        self.dimensions.iter().find(|d| d.dimension == dimension)
    }

    pub fn has_caveat(&self, caveat: &str) -> bool {
        self.caveats.iter().any(|c| c == caveat)
    }
}

/// The rules that directly concluded a proof's root value.
fn concluding_rules(proof: &ProofNode) -> Vec<RuleRef> {
    let rule_ref = |n: &ProofNode| match &n.step {
        Step::Rule { rule, citation, .. } => Some(RuleRef { id: rule.clone(), citation: citation.clone() }),
        _ => None,
    };
    match proof.step {
        Step::Combined => proof.children.iter().filter_map(rule_ref).collect(),
        _ => rule_ref(proof).into_iter().collect(),
    }
}

/// A dimension's verdict from its evidence: the worst of the concluded
/// verdicts, `feasible_with_caveats` if any caveat was raised, and
/// `high_risk` if nothing was concluded or some input is missing. The cf is
/// the strongest evidence for the chosen verdict (0 for missing evidence).
pub fn combine_evidence(findings: &[Finding], caveats: &[Caveat], unresolved: bool) -> (Verdict, f64) {
    let mut candidates: Vec<(Verdict, f64)> = findings.iter().map(|f| (f.verdict, f.cf)).collect();
    if let Some(cf) = caveats.iter().map(|c| c.cf).reduce(f64::max) {
        candidates.push((Verdict::FeasibleWithCaveats, cf));
    }
    if findings.is_empty() || unresolved {
        candidates.push((Verdict::HighRisk, 0.0));
    }
    let verdict = candidates.iter().map(|c| c.0).min().unwrap_or(Verdict::HighRisk);
    let cf = candidates.iter().filter(|c| c.0 == verdict).map(|c| c.1).fold(0.0, f64::max);
    (verdict, cf)
}

/// Runs every agenda goal to completion and assembles the assessment.
/// Unanswered questions are treated as unknown and reported as unresolved.
pub fn assess(kb: &KnowledgeBase, answers: &Answers) -> Result<Assessment, EngineError> {
    let goals = agenda(kb);
    let threshold = kb.threshold();
    let mut engine = Engine::exhaustive(kb, answers);
    let mut unresolved_by_dim: BTreeMap<Dimension, BTreeSet<String>> = BTreeMap::new();
    for goal in &goals {
        let Outcome::Resolved(r) = engine.backchain(&goal.attribute)? else {
            unreachable!("exhaustive evaluation never asks")
        };
        let slot = unresolved_by_dim.entry(goal.dimension).or_default();
        slot.extend(r.pending);
        slot.extend(r.unknown);
    }

    let mut dimensions = Vec::new();
    for dimension in Dimension::ASSESSED {
        let unresolved: Vec<String> = unresolved_by_dim.remove(&dimension).unwrap_or_default().into_iter().collect();
        let findings: Vec<Finding> = engine
            .proofs(&verdict_attribute(dimension))
            .iter()
            .filter(|p| p.conclusion.cf.value() >= threshold)
            .filter_map(|p| {
                let verdict = p.conclusion.value.as_symbol().and_then(Verdict::parse)?;
                Some(Finding { verdict, cf: p.conclusion.cf.value(), rules: concluding_rules(p) })
            })
            .collect();
        let caveats: Vec<Caveat> = engine
            .proofs(&caveat_attribute(dimension))
            .iter()
            .filter(|p| p.conclusion.cf.value() >= threshold)
            .map(|p| Caveat {
                caveat: p.conclusion.value.to_source(),
                cf: p.conclusion.cf.value(),
                rules: concluding_rules(p),
            })
            .collect();

        let (verdict, cf) = combine_evidence(&findings, &caveats, !unresolved.is_empty());
        dimensions.push(DimensionVerdict { dimension, verdict, cf, findings, caveats, unresolved });
    }

    let overall = dimensions.iter().map(|d| d.verdict).min().unwrap_or(Verdict::HighRisk);
    let mut caveats: Vec<String> = Vec::new();
    for c in dimensions.iter().flat_map(|d| &d.caveats) {
        if !caveats.contains(&c.caveat) {
            caveats.push(c.caveat.clone());
        }
    }

    let unresolved: BTreeSet<String> = dimensions
        .iter()
        .flat_map(|d| d.unresolved.iter().cloned())
        .chain(unresolved_by_dim.into_values().flatten())
        .collect();

    let mut derived = BTreeMap::new();
    let mut proofs = BTreeMap::new();
    for attribute in engine.resolved().map(str::to_string).collect::<Vec<_>>() {
        if kb.attribute(&attribute).is_some_and(|a| a.askable) {
            continue;
        }
        let ps = engine.proofs(&attribute);
        if ps.is_empty() {
            continue;
        }
        let best = engine.best(&attribute).expect("non-empty proofs");
        derived.insert(attribute.clone(), DerivedValue {
            value: best.value.clone(),
            cf: best.cf.value(),
            dimension: kb.attribute(&attribute).and_then(|a| a.dimension),
        });
        proofs.insert(attribute, ps.to_vec());
    }

    Ok(Assessment {
        kb: KbInfo { name: kb.header.name.clone(), version: kb.header.version.clone() },
        overall,
        caveats,
        dimensions,
        risks: risk_register(kb, &engine),
        payback: payback_summary(kb, &engine),
        unresolved: unresolved.into_iter().collect(),
        derived,
        proofs,
    })
}

fn risk_register(kb: &KnowledgeBase, engine: &Engine) -> RiskRegister {
    let mut risks = Vec::new();
    let mut contingency_required = None;
    if let Some(binding) = kb.bindings_using(Calculator::ContingencyRequired.id()).next() {
        for pair in binding.inputs.chunks(2) {
            let level = |attr: &str| engine.best(attr).and_then(|f| f.value.as_symbol()).and_then(Level::parse);
            let likelihood = level(&pair[0]);
            let impact = pair.get(1).and_then(|a| level(a));
            let label = pair[0].strip_suffix("_likelihood").unwrap_or(&pair[0]).to_string();
            let serious = matches!((likelihood, impact), (Some(l), Some(i)) if l >= Level::Medium && i >= Level::Medium);
            risks.push(RiskEntry { label, likelihood, impact, serious });
        }
        contingency_required = engine.best(&binding.attribute).and_then(|f| f.value.as_bool());
    }
    RiskRegister { risks, threshold: DEFAULT_CONTINGENCY_THRESHOLD, contingency_required }
}

fn payback_summary(kb: &KnowledgeBase, engine: &Engine) -> PaybackSummary {
    let number = |attr: &str| engine.best(attr).and_then(|f| f.value.as_number());
    match kb.bindings_using(Calculator::PaybackMonths.id()).next() {
        Some(b) => PaybackSummary {
            development_cost: b.inputs.first().and_then(|a| number(a)),
            annual_benefit: b.inputs.get(1).and_then(|a| number(a)),
            annual_cost: b.inputs.get(2).and_then(|a| number(a)),
            months: number(&b.attribute),
        },
        None => PaybackSummary { development_cost: None, annual_benefit: None, annual_cost: None, months: None },
    }
}

/// `Option<f64>` that admits infinities.
pub(crate) mod opt_extended_f64 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Ext(#[serde(with = "crate::kb::extended_f64")] f64);

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(Ext).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<Ext>::deserialize(d)?.map(|e| e.0))
    }
}
