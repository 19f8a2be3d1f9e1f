//! Markdown and JSON renderings of an assessment.

use std::fmt::Write;

use crate::calculators::round_to_nearest;
use crate::kb::Dimension;

use super::assessment::{Assessment, Caveat, DimensionVerdict, RuleRef};
use super::agenda::{caveat_attribute, verdict_attribute};

/// Report money is rounded to this step.
pub const MONEY_STEP: f64 = 1000.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Markdown,
    Json,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "md" | "markdown" => Some(Format::Markdown),
            "json" => Some(Format::Json),
            _ => None,
        }
    }
}

pub fn render(a: &Assessment, format: Format) -> String {
    match format {
        Format::Markdown => render_markdown(a),
        Format::Json => render_json(a),
    }
}

/// Pretty-printed JSON, newline-terminated. Lossless: parsing it back gives
/// an equal [`Assessment`].
pub fn render_json(a: &Assessment) -> String {
    let mut s = serde_json::to_string_pretty(a).expect("assessments always serialize");
    s.push('\n');
    s
}

/// `≈£55,000`: rounded half-up to the nearest £1,000.
pub fn format_money(amount: f64) -> String {
    if !amount.is_finite() {
        return "n/a".into();
    }
    let rounded = round_to_nearest(amount, MONEY_STEP);
    let sign = if rounded < 0.0 { "-" } else { "" };
    let digits = format!("{:.0}", rounded.abs());
    let mut grouped = String::new();
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            grouped.push(',');
        }
        grouped.push(ch);
    }
    format!("≈{sign}£{grouped}")
}

/// `1.12 months (≈1 month)`, or `never` for an investment that is not
/// recovered.
pub fn format_payback(months: f64) -> String {
    if !months.is_finite() {
        return "never (running costs exceed benefits)".into();
    }
    let whole = round_to_nearest(months, 1.0);
    let unit = if whole == 1.0 { "month" } else { "months" };
    format!("{months:.2} months (≈{whole:.0} {unit})")
}

fn cite(rules: &[RuleRef]) -> String {
    rules
        .iter()
        .map(|r| match &r.citation {
            Some(c) => format!("`{}` [{c}]", r.id),
            None => format!("`{}`", r.id),
        })
        .collect::<Vec<_>>()
        .join("; ")
}

fn caveat_line(out: &mut String, c: &Caveat) {
    let _ = writeln!(out, "- caveat `{}` (cf {:.2}) — {}", c.caveat, c.cf, cite(&c.rules));
}

fn dimension_title(d: Dimension) -> &'static str {
    match d {
        Dimension::Business => "Business",
        Dimension::Organisational => "Organisational",
        Dimension::Technical => "Technical",
        Dimension::Complexity => "Complexity",
        Dimension::Stakeholder => "Stakeholder",
        Dimension::Risk => "Risk",
        Dimension::Costbenefit => "Cost/benefit",
    }
}

fn dimension_section(out: &mut String, a: &Assessment, d: &DimensionVerdict) {
    let _ = writeln!(out, "### {}\n", dimension_title(d.dimension));
    let _ = writeln!(out, "Verdict: **{}** (cf {:.2})\n", d.verdict.label(), d.cf);
    for f in &d.findings {
        let _ = writeln!(out, "- finding `{}` (cf {:.2}) — {}", f.verdict, f.cf, cite(&f.rules));
    }
    for c in &d.caveats {
        caveat_line(out, c);
    }
    let (verdict, caveats) = (verdict_attribute(d.dimension), caveat_attribute(d.dimension));
    for (id, v) in a.derived.iter().filter(|(id, v)| {
        v.dimension == Some(d.dimension) && **id != verdict && **id != caveats
    }) {
        let _ = writeln!(out, "- `{id}` = {} (cf {:.2})", v.value.to_source(), v.cf);
    }
    if !d.unresolved.is_empty() {
        let _ = writeln!(out, "- unresolved: {}", d.unresolved.iter().map(|u| format!("`{u}`")).collect::<Vec<_>>().join(", "));
    }
    out.push('\n');
}

fn cost_benefit_section(out: &mut String, a: &Assessment) {
    let p = &a.payback;
    let money = |v: Option<f64>| v.map(format_money).unwrap_or_else(|| "not determined".into());
    out.push_str("### Cost/benefit\n\n");
    out.push_str("| Item | Amount |\n|---|---|\n");
    let _ = writeln!(out, "| Initial investment | {} |", money(p.development_cost));
    let _ = writeln!(out, "| Annual running cost | {} |", money(p.annual_cost));
    let _ = writeln!(out, "| Annual benefit | {} |", money(p.annual_benefit));
    let payback = p.months.map(format_payback).unwrap_or_else(|| "not determined".into());
    let _ = writeln!(out, "| Payback period | {payback} |");
    out.push('\n');
}

fn risk_section(out: &mut String, a: &Assessment) {
    let r = &a.risks;
    out.push_str("### Risk register\n\n");
    out.push_str("| Risk | Likelihood | Impact | Serious |\n|---|---|---|---|\n");
    for e in &r.risks {
        let level = |l: Option<crate::calculators::Level>| l.map(|l| l.as_str()).unwrap_or("unknown");
        let serious = if e.serious { "yes" } else { "no" };
        let _ = writeln!(out, "| {} | {} | {} | {serious} |", e.label.replace('_', " "), level(e.likelihood), level(e.impact));
    }
    let contingency = match r.contingency_required {
        Some(true) => "required",
        Some(false) => "not required",
        None => "not determined",
    };
    let _ = writeln!(out, "\nContingency planning: {contingency} (advised at {} or more serious risks)\n", r.threshold);
}

/// Markdown report: overall verdict, then the business case, technical and
/// stakeholder issues, anything unresolved, and a conclusion. Each finding
/// carries the citations of the rules behind it.
pub fn render_markdown(a: &Assessment) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# Feasibility assessment\n");
    let _ = writeln!(out, "Knowledge base: {} {}\n", a.kb.name, a.kb.version);
    let _ = writeln!(out, "**Overall verdict: {}**\n", a.overall.label());
    if a.caveats.is_empty() {
        out.push_str("Caveats: none.\n\n");
    } else {
        let list = a.caveats.iter().map(|c| format!("`{c}`")).collect::<Vec<_>>().join(", ");
        let _ = writeln!(out, "Caveats: {list}.\n");
    }

    let section = |out: &mut String, dims: &[Dimension]| {
        for d in dims {
            if let Some(dv) = a.dimension(*d) {
                dimension_section(out, a, dv);
            }
        }
    };

    out.push_str("## Business case\n\n");
    section(&mut out, &[Dimension::Business, Dimension::Organisational]);
    cost_benefit_section(&mut out, a);
    risk_section(&mut out, a);

    out.push_str("## Technical issues\n\n");
    section(&mut out, &[Dimension::Technical, Dimension::Complexity]);

    out.push_str("## Stakeholder issues\n\n");
    section(&mut out, &[Dimension::Stakeholder]);

    out.push_str("## Unresolved\n\n");
    if a.unresolved.is_empty() {
        out.push_str("None.\n\n");
    } else {
        for u in &a.unresolved {
            let _ = writeln!(out, "- `{u}`");
        }
        out.push('\n');
    }

    out.push_str("## Conclusion\n\n");
    out.push_str("| Dimension | Verdict |\n|---|---|\n");
    for d in &a.dimensions {
        let _ = writeln!(out, "| {} | {} |", dimension_title(d.dimension), d.verdict.label());
    }
    let _ = writeln!(out, "\nOverall: **{}**.", a.overall.label());
    if !a.caveats.is_empty() {
        let list = a.caveats.iter().map(|c| c.replace('_', " ")).collect::<Vec<_>>().join(", ");
        let _ = writeln!(out, "To address before development: {list}.");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn money_is_rounded_to_the_nearest_thousand() {
        assert_eq!(format_money(54_999.0), "≈£55,000");
        assert_eq!(format_money(8_500.0), "≈£9,000");
        assert_eq!(format_money(30_000.0), "≈£30,000");
        assert_eq!(format_money(1_234_567.0), "≈£1,235,000");
        assert_eq!(format_money(400.0), "≈£0");
    }

    #[test]
    fn payback_shows_exact_and_rounded_months() {
        assert_eq!(format_payback(30.0 / 11.25), "2.67 months (≈3 months)");
        assert_eq!(format_payback(1.1158), "1.12 months (≈1 month)");
        assert!(format_payback(f64::INFINITY).starts_with("never"));
    }
}
