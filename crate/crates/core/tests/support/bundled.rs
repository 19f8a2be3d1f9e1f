//! Random answer sets for the bundled knowledge base.

use std::collections::BTreeMap;

use feaso_core::kb::{Answer, AttrType, KnowledgeBase, Value};
use rand::seq::SliceRandom;
use rand::Rng;

fn numbers_for(unit: Option<&str>) -> &'static [f64] {
    match unit {
        Some("person_months") => &[0.0, 1.0, 6.0, 9.0, 12.0, 36.0],
        Some("gbp_per_year") => &[0.0, 5_000.0, 50_000.0, 140_000.0, 600_000.0],
        Some("software_currency") => &[0.0, 5_000.0, 16_000.0],
        Some("software_currency_per_gbp") => &[0.0, 1.0, 2.2857],
        Some("gbp") => &[0.0, 3_000.0, 30_000.0],
        Some("years") => &[0.0, 1.0, 3.0, 5.0],
        Some("minutes") => &[0.5, 2.0, 3.0, 5.0, 45.0, 60.0, 90.0, 300.0],
        Some("fraction") => &[0.0, 0.5, 0.8, 0.9, 1.0],
        _ => &[0.0, 1.0, 10.0],
    }
}

/// A random value from the attribute's domain.
pub fn random_value(kind: &AttrType, rng: &mut impl Rng) -> Value {
    match kind {
        AttrType::Bool => Value::Bool(rng.gen()),
        AttrType::Enum { values } => Value::Symbol(values.choose(rng).expect("enums are non-empty").clone()),
        AttrType::Number { unit } => Value::Number(*numbers_for(unit.as_deref()).choose(rng).expect("non-empty")),
        AttrType::Text => Value::Text("x".into()),
    }
}

/// A random answer for every askable attribute, except that each one is
/// left out with probability `skip` and answered `unknown` one time in ten.
pub fn random_answers(kb: &KnowledgeBase, rng: &mut impl Rng, skip: f64) -> BTreeMap<String, Answer> {
    let mut answers = BTreeMap::new();
    for attr in kb.attributes.values().filter(|a| a.askable) {
        if rng.gen_bool(skip) {
            continue;
        }
        let answer = if rng.gen_bool(0.1) {
            Answer::unknown()
        } else {
            let cf = *[1.0, 1.0, 0.8, 0.5, 0.3].choose(rng).expect("non-empty");
            Answer::with_cf(random_value(&attr.kind, rng), cf)
        };
        answers.insert(attr.id.clone(), answer);
    }
    answers
}
