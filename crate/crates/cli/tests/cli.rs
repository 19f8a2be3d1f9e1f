use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};
use std::io::Write;

use feaso_core::feasibility::{bundled_kb, THYROID};
use feaso_core::kb::Answer;
use feaso_core::session::{Assessment, Session};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/resources/fixtures").join(format!("{name}.answers"))
}

fn feaso(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_feaso"))
        .args(args)
        .env_remove("FEASO_KB")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    child.wait_with_output().unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8(bytes.to_vec()).unwrap()
}

/// Stdin for an interview answered from the thyroid fixture, in the order
/// the questions will be asked.
fn thyroid_script() -> String {
    let kb = bundled_kb();
    let answers = THYROID.answers(&kb).unwrap();
    let mut s = Session::start(kb);
    let mut script = String::new();
    while let Some(q) = s.next_question().unwrap() {
        let a = answers.get(&q.attribute).cloned().unwrap_or_else(Answer::unknown);
        script += &format!("{}\n", a.to_source());
        s.submit(&q.attribute, a).unwrap();
    }
    script
}

#[test]
fn scripted_consultation_reproduces_the_batch_report() {
    let dir = tempfile::tempdir().unwrap();
    let session = dir.path().join("thyroid.session");
    let out = feaso(&["consult", "--session", session.to_str().unwrap()], &thyroid_script());
    assert_eq!(out.status.code(), Some(0), "{}", text(&out.stderr));
    let stdout = text(&out.stdout);
    for c in THYROID.expected.caveats {
        assert!(stdout.contains(c), "missing {c}");
    }
    let batch = feaso(&["assess", "--answers", fixture("thyroid").to_str().unwrap()], "");
    assert!(stdout.ends_with(&text(&batch.stdout)), "interactive and batch reports differ");

    // the saved session replays to the same place
    let saved = std::fs::read_to_string(&session).unwrap();
    assert!(saved.starts_with("# feaso-session id="));
    let resumed = feaso(&["consult", "--session", session.to_str().unwrap()], "");
    assert_eq!(resumed.status.code(), Some(0));
    assert!(text(&resumed.stdout).ends_with(&text(&batch.stdout)));
}

#[test]
fn why_at_the_first_question_prints_the_rule_stack() {
    let out = feaso(&["consult"], "why\n");
    let stdout = text(&out.stdout);
    assert!(stdout.contains("`decision_quality_gap` is asked because"));
    assert!(stdout.contains("via rule bus_verdict_feasible [§2"), "{stdout}");
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn consult_rejects_bad_answers_and_supports_back() {
    let out = feaso(&["consult"], "maybe\nyes\nback\n");
    let stdout = text(&out.stdout);
    assert!(stdout.contains("invalid value for `decision_quality_gap`"));
    assert!(stdout.contains("withdrew the answer to decision_quality_gap"));
}

#[test]
fn unreadable_kb_exits_2() {
    let out = feaso(&["consult", "/no/such/file.fkb"], "");
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("cannot read"));
}

#[test]
fn assess_writes_the_report_and_signals_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("thyroid.md");
    let out = feaso(&["assess", "--answers", fixture("thyroid").to_str().unwrap(), "--out", report.to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(0));
    let md = std::fs::read_to_string(&report).unwrap();
    assert!(md.contains("1.12 months"));

    let out = feaso(&["assess", "--answers", fixture("savings_bank").to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(1));
    let out = feaso(&["assess", "--answers", fixture("icl").to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn assess_is_deterministic_and_json_is_structured() {
    let thyroid = fixture("thyroid");
    let args = ["assess", "--answers", thyroid.to_str().unwrap(), "--format", "json"];
    let a = feaso(&args, "");
    let b = feaso(&args, "");
    assert_eq!(a.stdout, b.stdout);
    let parsed: Assessment = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(parsed.overall.as_str(), "feasible_with_caveats");
}

#[test]
fn typos_in_answer_files_exit_2_naming_the_offender() {
    let dir = tempfile::tempdir().unwrap();
    let answers = dir.path().join("typo.answers");
    std::fs::write(&answers, "decision_quality_gap = yes\nexpertise_scarse = no\ntask_type = haircut\n").unwrap();
    let out = feaso(&["assess", "--answers", answers.to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(2));
    let err = text(&out.stderr);
    assert!(err.contains("expertise_scarse") && err.contains(":2:"), "{err}");
    assert!(err.contains("haircut"), "{err}");
}

#[test]
fn validate_reports_errors_and_tolerates_warnings() {
    let out = feaso(&["validate"], "");
    assert_eq!(out.status.code(), Some(0));

    let dir = tempfile::tempdir().unwrap();
    let cyclic = dir.path().join("cyclic.fkb");
    std::fs::write(
        &cyclic,
        "attribute a { type: bool; }\nattribute b { type: bool; }\n\
         rule ra { if a = yes then b = yes; cite \"x\"; }\nrule rb { if b = yes then a = yes; cite \"x\"; }\n",
    )
    .unwrap();
    let out = feaso(&["validate", cyclic.to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(2));
    assert!(text(&out.stderr).contains("dependency_cycle"));

    let uncited = dir.path().join("uncited.fkb");
    std::fs::write(
        &uncited,
        "attribute a { type: bool; askable; question: \"A?\"; }\nattribute b { type: bool; }\nrule r { if a = yes then b = yes; }\n",
    )
    .unwrap();
    let out = feaso(&["validate", uncited.to_str().unwrap()], "");
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out.stderr).contains("warning[missing_citation]"));
}

#[test]
fn feaso_kb_overrides_the_bundled_kb() {
    let dir = tempfile::tempdir().unwrap();
    let kb = dir.path().join("tiny.fkb");
    std::fs::write(&kb, "knowledgebase tiny { version: \"0.1\"; }\nattribute a { type: bool; askable; question: \"A?\"; dimension: business; }\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_feaso")).arg("validate").env("FEASO_KB", &kb).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out.stdout).contains("tiny.fkb: ok (0 rules, 1 attributes)"), "{}", text(&out.stdout));
}

#[test]
fn explain_how_and_why_from_files() {
    let out = feaso(
        &["explain", "--session", fixture("thyroid").to_str().unwrap(), "--attribute", "coverage_multiplier"],
        "",
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out.stdout).contains("computed by coverage_multiplier"));

    let dir = tempfile::tempdir().unwrap();
    let empty = dir.path().join("empty.answers");
    std::fs::write(&empty, "# nothing yet\n").unwrap();
    let args = ["explain", "--session", empty.to_str().unwrap(), "--attribute", "decision_quality_gap", "--mode", "why"];
    let out = feaso(&args, "");
    assert_eq!(out.status.code(), Some(0));
    assert!(text(&out.stdout).contains("business_verdict"));

    let args = ["explain", "--session", empty.to_str().unwrap(), "--attribute", "business_verdict"];
    assert_eq!(feaso(&args, "").status.code(), Some(2));
}

#[test]
fn whatif_summarises_the_changes() {
    let thyroid = fixture("thyroid");
    let out = feaso(&["whatif", "--answers", thyroid.to_str().unwrap(), "--set", "required_coverage=1.0"], "");
    let stdout = text(&out.stdout);
    assert!(stdout.contains("coverage_multiplier: 1 (cf 1.00) -> 5 (cf 1.00)"), "{stdout}");
    assert!(stdout.contains("complexity: feasible_with_caveats -> high_risk"));

    let out = feaso(&["whatif", "--answers", thyroid.to_str().unwrap()], "");
    assert_eq!(text(&out.stdout), "no change\n");

    let icl = fixture("icl");
    let out = feaso(&["whatif", "--answers", icl.to_str().unwrap(), "--set", "common_sense_required=yes"], "");
    assert_eq!(out.status.code(), Some(1));
    assert!(text(&out.stdout).contains("overall: feasible -> infeasible"));

    let out = feaso(&["whatif", "--answers", icl.to_str().unwrap(), "--set", "task_type=haircut"], "");
    assert_eq!(out.status.code(), Some(2));
    let out = feaso(&["whatif", "--answers", icl.to_str().unwrap(), "--set", "oops"], "");
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(feaso(&["assess"], "").status.code(), Some(2));
    assert_eq!(feaso(&["frobnicate"], "").status.code(), Some(2));
}
