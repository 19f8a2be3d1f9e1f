//! Consultations over a knowledge base.
//!
//! A [`Session`] is an append-only list of answer events. Its answers are
//! the last event per attribute, and everything else — the next question,
//! the assessment, explanations — is recomputed from those answers, so
//! replaying the event list always reproduces the same state.

pub mod agenda;
pub mod assessment;
pub mod log;
pub mod report;
pub mod whatif;

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::engine::{self, Answers, EngineError, ProofNode, WhyFrame};
use crate::kb::answers::parse_answers;
use crate::kb::{AnswerValue, Answer, AttrType, Code, Dimension, KnowledgeBase};

pub use agenda::{agenda, goal_ids, Goal};
pub use assessment::{assess, Assessment, DimensionVerdict, Verdict};
pub use report::{render, render_json, render_markdown, Format};
pub use whatif::{Delta, WhatIf};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SessionError {
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("`{0}` is not askable")]
    NotAskable(String),
    #[error("invalid value for `{attribute}`: {detail}")]
    OutOfDomain { attribute: String, detail: String },
    #[error("answer cf for `{attribute}` must lie in [0, 1], got {cf}")]
    CfOutOfRange { attribute: String, cf: f64 },
    #[error("the session is complete")]
    Complete,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

impl SessionError {
    /// The attribute the error concerns, if any.
    pub fn attribute(&self) -> Option<&str> {
        match self {
            SessionError::UnknownAttribute(a) | SessionError::NotAskable(a) => Some(a),
            SessionError::OutOfDomain { attribute, .. } | SessionError::CfOutOfRange { attribute, .. } => Some(attribute),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    InProgress,
    Complete,
}

/// One recorded answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnswerEvent {
    pub attribute: String,
    pub answer: Answer,
    pub at_millis: u64,
}

/// A question put to the user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Question {
    pub attribute: String,
    pub prompt: String,
    #[serde(rename = "type")]
    pub kind: AttrType,
    pub dimension: Option<Dimension>,
    /// The reasoning chain that led to the question, outermost goal first.
    pub why: Vec<WhyFrame>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExplainMode {
    How,
    Why,
}

impl ExplainMode {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "how" => Some(ExplainMode::How),
            "why" => Some(ExplainMode::Why),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum Explanation {
    /// How each value of the attribute was established.
    How { attribute: String, proofs: Vec<ProofNode> },
    /// Why the attribute is being asked about.
    Why { attribute: String, frames: Vec<WhyFrame> },
}

impl Explanation {
    /// Plain-text rendering: proof trees, or the goal stack with citations.
    pub fn render(&self) -> String {
        match self {
            Explanation::How { proofs, .. } => proofs.iter().map(|p| p.render()).collect(),
            Explanation::Why { attribute, frames } => {
                let mut out = format!("`{attribute}` is asked because:\n");
                for f in frames.iter().rev() {
                    let via = match &f.via {
                        engine::Via::Rule { id, citation: Some(c) } => format!("rule {id} [{c}]"),
                        engine::Via::Rule { id, citation: None } => format!("rule {id}"),
                        engine::Via::Calculator { id } => format!("calculator {id}"),
                    };
                    out.push_str(&format!("  {} needs `{}` via {via}\n", f.goal, f.needs));
                }
                out
            }
        }
    }
}

pub fn now_millis() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

/// Checks an answer against the attribute's declaration.
pub fn check_answer(kb: &KnowledgeBase, attribute: &str, answer: &Answer) -> Result<(), SessionError> {
    let attr = kb.attribute(attribute).ok_or_else(|| SessionError::UnknownAttribute(attribute.to_string()))?;
    if !attr.askable {
        return Err(SessionError::NotAskable(attribute.to_string()));
    }
    if !(0.0..=1.0).contains(&answer.cf) {
        return Err(SessionError::CfOutOfRange { attribute: attribute.to_string(), cf: answer.cf });
    }
    if let AnswerValue::Known(v) = &answer.value {
        if !attr.kind.admits(v) {
            return Err(SessionError::OutOfDomain {
                attribute: attribute.to_string(),
                detail: format!("{} is not a valid {}", v.to_source(), attr.kind.describe()),
            });
        }
    }
    Ok(())
}

/// Parses answer text as it would appear after `=` in an answer file, e.g.
/// `diagnosis`, `45`, `yes cf 0.7` or `unknown`. Bare words given for a text
/// attribute are taken literally.
pub fn parse_answer_text(kb: &KnowledgeBase, attribute: &str, text: &str) -> Result<Answer, SessionError> {
    let attr = kb.attribute(attribute).ok_or_else(|| SessionError::UnknownAttribute(attribute.to_string()))?;
    let text = text.trim();
    let src = if matches!(attr.kind, AttrType::Text) && !text.starts_with('"') && text != "unknown" {
        format!("{attribute} = {}\n", serde_json::to_string(text).expect("strings serialize"))
    } else {
        format!("{attribute} = {text}\n")
    };
    match parse_answers(kb, &src) {
        Ok(mut lines) if lines.len() == 1 => Ok(lines.remove(0).answer),
        Ok(_) => Err(SessionError::OutOfDomain { attribute: attribute.to_string(), detail: "expected a single value".into() }),
        Err(diags) => {
            let d = &diags[0];
            Err(match d.code {
                Code::NotAskable => SessionError::NotAskable(attribute.to_string()),
                Code::UndeclaredAttribute => SessionError::UnknownAttribute(attribute.to_string()),
                _ => SessionError::OutOfDomain { attribute: attribute.to_string(), detail: d.message.clone() },
            })
        }
    }
}

/// An event-sourced consultation.
#[derive(Debug, Clone)]
pub struct Session {
    id: String,
    kb: Arc<KnowledgeBase>,
    events: Vec<AnswerEvent>,
    answers: Answers,
    status: Status,
}

impl Session {
    /// A fresh session with a random id.
    pub fn start(kb: Arc<KnowledgeBase>) -> Self {
        Self::with_id(kb, uuid::Uuid::new_v4().simple().to_string())
    }

    pub fn with_id(kb: Arc<KnowledgeBase>, id: impl Into<String>) -> Self {
        let mut s = Session { id: id.into(), kb, events: Vec::new(), answers: Answers::new(), status: Status::InProgress };
        // Engine errors resurface from `next_question`; the status stays in progress.
        let _ = s.refresh_status();
        s
    }

    /// Rebuilds a session from its event list. Events are validated but not
    /// gated on status, so a completed session replays to completion.
    pub fn replay(kb: Arc<KnowledgeBase>, id: impl Into<String>, events: Vec<AnswerEvent>) -> Result<Self, SessionError> {
        let mut s = Session::with_id(kb, id);
        for e in &events {
            check_answer(&s.kb, &e.attribute, &e.answer)?;
        }
        for e in events {
            s.answers.insert(e.attribute.clone(), e.answer.clone());
            s.events.push(e);
        }
        s.refresh_status()?;
        Ok(s)
    }

    /// A batch session from a list of answers, applied in order.
    pub fn from_answers(kb: Arc<KnowledgeBase>, answers: impl IntoIterator<Item = (String, Answer)>) -> Result<Self, SessionError> {
        let events = answers.into_iter().map(|(attribute, answer)| AnswerEvent { attribute, answer, at_millis: 0 }).collect();
        Session::replay(kb, "batch", events)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn kb(&self) -> &Arc<KnowledgeBase> {
        &self.kb
    }

    pub fn events(&self) -> &[AnswerEvent] {
        &self.events
    }

    /// Current answers: the last event per attribute.
    pub fn answers(&self) -> &Answers {
        &self.answers
    }

    pub fn status(&self) -> Status {
        self.status
    }

    fn refresh_status(&mut self) -> Result<(), EngineError> {
        let goals = goal_ids(&self.kb);
        self.status = match engine::next_question(&self.kb, &self.answers, &goals)? {
            Some(_) => Status::InProgress,
            None => Status::Complete,
        };
        Ok(())
    }

    /// The next question the interview needs answered, or `None` when every
    /// goal is resolved.
    pub fn next_question(&self) -> Result<Option<Question>, SessionError> {
        let goals = goal_ids(&self.kb);
        let Some(q) = engine::next_question(&self.kb, &self.answers, &goals)? else {
            return Ok(None);
        };
        let attr = self.kb.attribute(&q.attribute).ok_or_else(|| SessionError::UnknownAttribute(q.attribute.clone()))?;
        Ok(Some(Question {
            attribute: q.attribute.clone(),
            prompt: attr.question.clone().unwrap_or_else(|| q.attribute.replace('_', " ")),
            kind: attr.kind.clone(),
            dimension: attr.dimension,
            why: q.why,
        }))
    }

    /// Records an answer stamped with the current time.
    pub fn submit(&mut self, attribute: &str, answer: Answer) -> Result<&AnswerEvent, SessionError> {
        self.submit_at(attribute, answer, now_millis())
    }

    /// Records an answer. Re-answering an attribute appends a new event that
    /// overrides the earlier one.
    pub fn submit_at(&mut self, attribute: &str, answer: Answer, at_millis: u64) -> Result<&AnswerEvent, SessionError> {
        if self.status == Status::Complete {
            return Err(SessionError::Complete);
        }
        check_answer(&self.kb, attribute, &answer)?;
        self.answers.insert(attribute.to_string(), answer.clone());
        self.events.push(AnswerEvent { attribute: attribute.to_string(), answer, at_millis });
        self.refresh_status()?;
        Ok(self.events.last().expect("just pushed"))
    }

    /// Parses `text` as an answer and records it.
    pub fn submit_text(&mut self, attribute: &str, text: &str) -> Result<&AnswerEvent, SessionError> {
        let answer = parse_answer_text(&self.kb, attribute, text)?;
        self.submit(attribute, answer)
    }

    /// Drops the most recent event, returning it.
    pub fn undo(&mut self) -> Option<AnswerEvent> {
        let last = self.events.pop()?;
        match self.events.iter().rev().find(|e| e.attribute == last.attribute) {
            Some(prev) => self.answers.insert(last.attribute.clone(), prev.answer.clone()),
            None => self.answers.remove(&last.attribute),
        };
        let _ = self.refresh_status();
        Some(last)
    }

    pub fn assess(&self) -> Result<Assessment, SessionError> {
        Ok(assess(&self.kb, &self.answers)?)
    }

    /// Assesses the session with `overrides` applied on top of its answers,
    /// leaving the session itself untouched.
    pub fn whatif(&self, overrides: &BTreeMap<String, Answer>) -> Result<WhatIf, SessionError> {
        for (attribute, answer) in overrides {
            check_answer(&self.kb, attribute, answer)?;
        }
        let baseline = self.assess()?;
        let mut answers = self.answers.clone();
        answers.extend(overrides.iter().map(|(k, v)| (k.clone(), v.clone())));
        let scenario = assess(&self.kb, &answers)?;
        let delta = Delta::between(&baseline, &scenario);
        Ok(WhatIf { baseline, scenario, delta })
    }

    pub fn explain(&self, attribute: &str, mode: ExplainMode) -> Result<Explanation, SessionError> {
        if self.kb.attribute(attribute).is_none() {
            return Err(SessionError::UnknownAttribute(attribute.to_string()));
        }
        Ok(match mode {
            ExplainMode::How => Explanation::How {
                attribute: attribute.to_string(),
                proofs: engine::explain_how(&self.kb, &self.answers, attribute)?,
            },
            ExplainMode::Why => Explanation::Why {
                attribute: attribute.to_string(),
                frames: engine::explain_why(&self.kb, &self.answers, &goal_ids(&self.kb), attribute)?,
            },
        })
    }

    /// The session as an event file.
    pub fn to_log(&self) -> String {
        let header = log::LogHeader {
            id: self.id.clone(),
            kb_name: self.kb.header.name.clone(),
            kb_version: self.kb.header.version.clone(),
        };
        let mut out = log::format_header(&header);
        for e in &self.events {
            out.push_str(&log::format_event(e));
        }
        out
    }

    /// Restores a session from an event file.
    pub fn from_log(kb: Arc<KnowledgeBase>, src: &str) -> Result<Self, log::LogError> {
        let (header, events) = log::parse_log(&kb, src)?;
        Ok(Session::replay(kb, header.id, events)?)
    }
}
