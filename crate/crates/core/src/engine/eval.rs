//! Condition semantics shared by the engine and static evaluation.

use crate::kb::{AttrType, CompareOp, Condition, KnowledgeBase, Value};

use super::fact::{Fact, WorkingMemory};
use super::EngineError;

/// Whether a fact satisfies a leaf condition.
pub(crate) fn leaf_matches(leaf: &Condition, fact: &Fact) -> bool {
    match leaf {
        Condition::Compare { op, value, .. } => op.holds(&fact.value, value),
        Condition::Member { values, .. } => values.contains(&fact.value),
        _ => false,
    }
}

/// Rejects leaves whose operator or literal does not fit the attribute.
pub(crate) fn check_leaf(kb: &KnowledgeBase, leaf: &Condition) -> Result<(), EngineError> {
    let (attribute, op, values): (&str, Option<CompareOp>, Vec<&Value>) = match leaf {
        Condition::Compare { attribute, op, value } => (attribute, Some(*op), vec![value]),
        Condition::Member { attribute, values } => (attribute, None, values.iter().collect()),
        _ => return Ok(()),
    };
    let attr = kb.attribute(attribute).ok_or_else(|| EngineError::UndeclaredAttribute(attribute.to_string()))?;
    if op.is_some_and(CompareOp::is_ordering) && !matches!(attr.kind, AttrType::Number { .. }) {
        return Err(EngineError::TypeMismatch {
            attribute: attribute.to_string(),
            detail: format!("operator `{}` applied to {}", op.unwrap().symbol(), attr.kind.describe()),
        });
    }
    if let Some(v) = values.into_iter().find(|v| !attr.kind.admits(v)) {
        return Err(EngineError::TypeMismatch {
            attribute: attribute.to_string(),
            detail: format!("`{v}` is not a {} value", attr.kind.describe()),
        });
    }
    Ok(())
}

/// Leaf certainty: the strongest matching fact, or 0 when none matches.
pub(crate) fn leaf_cf<'a>(leaf: &Condition, facts: impl IntoIterator<Item = &'a Fact>) -> f64 {
    facts
        .into_iter()
        .filter(|f| leaf_matches(leaf, f))
        .map(|f| f.cf.value())
        .fold(0.0, f64::max)
}

/// Evaluates a condition against a fixed working memory: conjunction is the
/// minimum, disjunction the maximum, negation flips the sign, and a leaf
/// takes the certainty of its strongest matching fact.
pub fn evaluate_condition(kb: &KnowledgeBase, c: &Condition, wm: &WorkingMemory) -> Result<f64, EngineError> {
    Ok(match c {
        Condition::Compare { attribute, .. } | Condition::Member { attribute, .. } => {
            check_leaf(kb, c)?;
            leaf_cf(c, wm.get(attribute))
        }
        Condition::All(cs) => {
            let mut acc = 1.0f64;
            for c in cs {
                acc = acc.min(evaluate_condition(kb, c, wm)?);
            }
            acc
        }
        Condition::Any(cs) => {
            let mut acc = -1.0f64;
            for c in cs {
                acc = acc.max(evaluate_condition(kb, c, wm)?);
            }
            acc
        }
        Condition::Not(c) => -evaluate_condition(kb, c, wm)?,
    })
}

/// Whether a condition certainty is strong enough to fire a rule.
pub fn holds(cf: f64, threshold: f64) -> bool {
    cf >= threshold
}
