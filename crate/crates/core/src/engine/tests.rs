use super::*;
use crate::kb::parse_kb;

const ONE_RULE: &str = r#"
attribute a { type: bool; askable; question: "A?"; }
attribute b { type: bool; }
rule r1 { if a = yes then b = yes cf 0.8; cite "one"; }
"#;

const TWO_RULES: &str = r#"
attribute a { type: bool; askable; question: "A?"; }
attribute c { type: bool; askable; question: "C?"; }
attribute b { type: bool; }
rule r1 { if a = yes then b = yes cf 0.8; cite "first"; }
rule r2 { if c = yes then b = yes cf 0.5; cite "second"; }
"#;

fn answers(pairs: &[(&str, Answer)]) -> Answers {
    pairs.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn yes() -> Answer {
    Answer::known(Value::Bool(true))
}

fn resolved(kb: &KnowledgeBase, ans: &Answers, goal: &str) -> Resolution {
    match Engine::interview(kb, ans).backchain(goal).unwrap() {
        Outcome::Resolved(r) => r,
        Outcome::NeedsAnswer(q) => panic!("unexpected question {q:?}"),
    }
}

#[test]
fn single_rule_chain() {
    let kb = parse_kb(ONE_RULE).unwrap();
    let r = resolved(&kb, &answers(&[("a", yes())]), "b");
    assert_eq!(r.proofs.len(), 1);
    assert_eq!(r.proofs[0].conclusion.value, Value::Bool(true));
    assert!((r.proofs[0].conclusion.cf.value() - 0.8).abs() < 1e-12);
}

#[test]
fn two_rules_combine() {
    let kb = parse_kb(TWO_RULES).unwrap();
    let r = resolved(&kb, &answers(&[("a", yes()), ("c", yes())]), "b");
    let root = &r.proofs[0];
    assert!((root.conclusion.cf.value() - 0.9).abs() < 1e-12);
    assert_eq!(root.step, Step::Combined);
    assert_eq!(root.children.len(), 2);
    assert_eq!(root.conclusion.provenance, Provenance::RuleDerived { rules: vec!["r1".into(), "r2".into()] });
    assert_eq!(root.replay_cf(&kb).unwrap(), root.conclusion.cf.value());
}

#[test]
fn unknown_answer_blocks_the_leaf() {
    let kb = parse_kb(ONE_RULE).unwrap();
    let ans = answers(&[("a", Answer::unknown())]);
    let mut engine = Engine::interview(&kb, &ans);
    let Outcome::Resolved(r) = engine.backchain("b").unwrap() else { panic!() };
    assert!(r.proofs.is_empty());
    assert_eq!(engine.blocked().get("a"), Some(&Blocked::Unknown));
    assert_eq!(explain_how(&kb, &ans, "b"), Err(EngineError::NotDerived("b".into())));
}

#[test]
fn unanswered_askable_yields_question_with_why_stack() {
    let kb = parse_kb(ONE_RULE).unwrap();
    let ans = Answers::new();
    let Outcome::NeedsAnswer(q) = Engine::interview(&kb, &ans).backchain("b").unwrap() else { panic!() };
    assert_eq!(q.attribute, "a");
    assert_eq!(
        q.why,
        vec![WhyFrame {
            goal: "b".into(),
            via: Via::Rule { id: "r1".into(), citation: Some("one".into()) },
            needs: "a".into()
        }]
    );
    assert_eq!(explain_why(&kb, &ans, &["b".into()], "a").unwrap(), q.why);
    assert_eq!(explain_why(&kb, &ans, &["b".into()], "b"), Err(EngineError::NotPending("b".into())));
}

#[test]
fn exhaustive_mode_records_pending() {
    let kb = parse_kb(TWO_RULES).unwrap();
    let ans = answers(&[("a", yes())]);
    let Outcome::Resolved(r) = Engine::exhaustive(&kb, &ans).backchain("b").unwrap() else { panic!() };
    assert_eq!(r.pending, std::collections::BTreeSet::from(["c".to_string()]));
    assert!((r.proofs[0].conclusion.cf.value() - 0.8).abs() < 1e-12);
}

#[test]
fn conjunction_takes_minimum_and_respects_threshold() {
    let src = r#"
attribute a { type: bool; askable; question: "A?"; }
attribute c { type: bool; askable; question: "C?"; }
attribute b { type: bool; }
rule r1 { if a = yes and c = yes then b = yes; cite "x"; }
"#;
    let kb = parse_kb(src).unwrap();
    let ans = answers(&[("a", Answer::with_cf(Value::Bool(true), 0.9)), ("c", Answer::with_cf(Value::Bool(true), 0.6))]);
    let r = resolved(&kb, &ans, "b");
    assert_eq!(r.proofs[0].conclusion.cf.value(), 0.6);
    let ans = answers(&[("a", Answer::with_cf(Value::Bool(true), 0.9)), ("c", Answer::with_cf(Value::Bool(true), 0.1))]);
    assert!(resolved(&kb, &ans, "b").proofs.is_empty());
}

#[test]
fn membership_matches_exact_member() {
    let src = r#"
attribute task_type { type: enum(planning, design, repair); askable; question: "Task?"; }
attribute s { type: bool; }
rule r1 { if task_type in (planning, design) then s = yes; cite "x"; }
"#;
    let kb = parse_kb(src).unwrap();
    let mut wm = WorkingMemory::new();
    wm.assert(Fact {
        attribute: "task_type".into(),
        value: Value::Symbol("design".into()),
        cf: Cf::certain(),
        provenance: Provenance::UserAnswer,
    });
    assert_eq!(evaluate_condition(&kb, &kb.rules["r1"].condition, &wm).unwrap(), 1.0);
}

#[test]
fn ordering_operator_on_enum_names_attribute() {
    let kb = parse_kb(
        "attribute t { type: enum(x, y); askable; question: \"?\"; }\nattribute s { type: bool; }\nrule r { if t = x then s = yes; cite \"c\"; }",
    )
    .unwrap();
    let bad = Condition::Compare { attribute: "t".into(), op: crate::kb::CompareOp::Gt, value: Value::Number(1.0) };
    let err = evaluate_condition(&kb, &bad, &WorkingMemory::new()).unwrap_err();
    assert!(matches!(err, EngineError::TypeMismatch { ref attribute, .. } if attribute == "t"));
}

#[test]
fn runtime_cycle_is_reported() {
    // Validation would reject this KB; build it unvalidated to exercise the
    // engine's own guard.
    let (kb, _) = crate::kb::parse_unvalidated(
        "attribute a { type: bool; }\nattribute b { type: bool; }\nrule ra { if b = yes then a = yes; cite \"x\"; }\nrule rb { if a = yes then b = yes; cite \"x\"; }",
    );
    let err = Engine::exhaustive(&kb, &Answers::new()).backchain("a").unwrap_err();
    assert_eq!(err, EngineError::Cycle(vec!["a".into(), "b".into(), "a".into()]));
}

#[test]
fn working_memory_merges_repeat_assertions() {
    let mut wm = WorkingMemory::new();
    let fact = |cf: f64, rule: &str| Fact {
        attribute: "b".into(),
        value: Value::Bool(true),
        cf: Cf::new(cf).unwrap(),
        provenance: Provenance::RuleDerived { rules: vec![rule.into()] },
    };
    wm.assert(fact(0.8, "r1"));
    wm.assert(fact(0.5, "r2"));
    assert_eq!(wm.len(), 1);
    let f = &wm.get("b")[0];
    assert!((f.cf.value() - 0.9).abs() < 1e-12);
    assert_eq!(f.provenance, Provenance::RuleDerived { rules: vec!["r1".into(), "r2".into()] });
}

#[test]
fn lazy_conjunction_skips_later_operands() {
    let src = r#"
attribute a { type: bool; askable; question: "A?"; }
attribute c { type: bool; askable; question: "C?"; }
attribute b { type: bool; }
rule r1 { if a = yes and c = yes then b = yes; cite "x"; }
"#;
    let kb = parse_kb(src).unwrap();
    // `a` is known false, so `c` is never asked.
    let ans = answers(&[("a", Answer::known(Value::Bool(false)))]);
    assert!(resolved(&kb, &ans, "b").proofs.is_empty());
}
