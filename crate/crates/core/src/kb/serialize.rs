//! Canonical text rendering of a knowledge base.

use std::fmt::Write;

use super::model::*;

/// Renders `kb` in canonical form: header, attributes, computes, rules and
/// fixtures, each sorted by id.
pub fn serialize_kb(kb: &KnowledgeBase) -> String {
    let mut out = String::new();
    let h = &kb.header;
    let _ = writeln!(out, "knowledgebase {} {{", h.name);
    let _ = writeln!(out, "  version: {};", quote(&h.version));
    let _ = writeln!(out, "  threshold: {};", format_number(h.threshold));
    out.push_str("}\n");

    for a in kb.attributes.values() {
        let _ = writeln!(out, "\nattribute {} {{", a.id);
        let _ = writeln!(out, "  type: {};", a.kind.describe());
        if a.askable {
            out.push_str("  askable;\n");
        }
        if let Some(q) = &a.question {
            let _ = writeln!(out, "  question: {};", quote(q));
        }
        if let Some(d) = a.dimension {
            let _ = writeln!(out, "  dimension: {d};");
        }
        out.push_str("}\n");
    }

    if !kb.computes.is_empty() {
        out.push('\n');
    }
    for b in kb.computes.values() {
        let _ = writeln!(out, "compute {} using {}({});", b.attribute, b.calculator, b.inputs.join(", "));
    }

    for r in kb.rules.values() {
        let _ = writeln!(out, "\nrule {} {{", r.id);
        let _ = writeln!(
            out,
            "  if {} then {} = {} cf {};",
            condition_to_source(&r.condition),
            r.conclusion.attribute,
            r.conclusion.value.to_source(),
            format_number(r.cf)
        );
        if let Some(c) = &r.citation {
            let _ = writeln!(out, "  cite {};", quote(c));
        }
        out.push_str("}\n");
    }

    for f in kb.fixtures.values() {
        let _ = writeln!(out, "\nfixture {} {{", f.name);
        for (attr, answer) in &f.answers {
            let _ = writeln!(out, "  {attr} = {};", answer.to_source());
        }
        out.push_str("}\n");
    }
    out
}

/// Renders a condition so that re-parsing yields the same tree: compound
/// operands of `and`, `or` and `not` are always parenthesised.
pub fn condition_to_source(c: &Condition) -> String {
    fn operand(c: &Condition) -> String {
        match c {
            Condition::All(_) | Condition::Any(_) => format!("({})", condition_to_source(c)),
            other => condition_to_source(other),
        }
    }
    match c {
        Condition::Compare { attribute, op, value } => format!("{attribute} {} {}", op.symbol(), value.to_source()),
        Condition::Member { attribute, values } => {
            let vs: Vec<String> = values.iter().map(Value::to_source).collect();
            format!("{attribute} in ({})", vs.join(", "))
        }
        Condition::All(cs) => cs.iter().map(operand).collect::<Vec<_>>().join(" and "),
        Condition::Any(cs) => cs.iter().map(operand).collect::<Vec<_>>().join(" or "),
        Condition::Not(c) => format!("not {}", operand(c)),
    }
}
