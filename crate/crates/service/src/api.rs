//! HTTP routes. Every handler works on one session under its lock, so
//! requests to the same session are serialized and the response reflects a
//! single consistent state.

use std::collections::BTreeMap;
use std::sync::Arc;

use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use feaso_core::engine::EngineError;
use feaso_core::kb::{Answer, Dimension, KnowledgeBase, Value};
use feaso_core::session::{self, report, ExplainMode, Question, Session, SessionError, Status};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::store::{SessionStore, StoreError};

/// A uniform error body: `{code, message, detail}`.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
    detail: serde_json::Value,
}

impl ApiError {
    fn new(status: StatusCode, code: &'static str, message: impl Into<String>) -> Self {
        Self { status, code, message: message.into(), detail: serde_json::Value::Null }
    }

    fn with_detail(mut self, detail: serde_json::Value) -> Self {
        self.detail = detail;
        self
    }

    fn bad_request(message: impl Into<String>) -> Self {
        Self::new(StatusCode::BAD_REQUEST, "bad_request", message)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "code": self.code, "message": self.message, "detail": self.detail });
        (self.status, Json(body)).into_response()
    }
}

impl From<SessionError> for ApiError {
    fn from(e: SessionError) -> Self {
        let message = e.to_string();
        let invalid = |constraint: &str, attribute: &str| {
            ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "invalid_answer", message.clone())
                .with_detail(json!({ "attribute": attribute, "constraint": constraint }))
        };
        match &e {
            SessionError::UnknownAttribute(a) => invalid("declared attribute", a),
            SessionError::NotAskable(a) => invalid("askable attribute", a),
            SessionError::OutOfDomain { attribute, detail } => invalid(detail, attribute),
            SessionError::CfOutOfRange { attribute, .. } => invalid("cf in [0, 1]", attribute),
            SessionError::Complete => ApiError::new(StatusCode::CONFLICT, "session_complete", message),
            SessionError::Engine(EngineError::NotDerived(a) | EngineError::NotPending(a)) => {
                ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, "not_explainable", message)
                    .with_detail(json!({ "attribute": a }))
            }
            SessionError::Engine(_) => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "engine_error", message),
        }
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::NotFound(id) => ApiError::new(StatusCode::NOT_FOUND, "session_not_found", format!("unknown session `{id}`"))
                .with_detail(json!({ "id": id })),
            StoreError::Session(e) => e.into(),
            other => ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, "storage_error", other.to_string()),
        }
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Clone)]
pub struct AppState {
    pub store: Arc<SessionStore>,
}

pub fn router(store: Arc<SessionStore>) -> Router {
    Router::new()
        .route("/sessions", post(create_session))
        .route("/sessions/{id}/next-question", get(next_question))
        .route("/sessions/{id}/answers", post(submit_answer))
        .route("/sessions/{id}/report", get(report))
        .route("/sessions/{id}/explain", get(explain))
        .route("/sessions/{id}/whatif", post(whatif))
        .route("/kb/meta", get(kb_meta))
        .with_state(AppState { store })
}

/// The state returned after creating a session or answering a question.
#[derive(Debug, Serialize, Deserialize)]
pub struct SessionSummary {
    pub id: String,
    pub status: Status,
    pub answers: usize,
    pub next_question: Option<Question>,
}

fn summary(s: &Session) -> ApiResult<SessionSummary> {
    Ok(SessionSummary {
        id: s.id().to_string(),
        status: s.status(),
        answers: s.answers().len(),
        next_question: s.next_question()?,
    })
}

async fn create_session(State(st): State<AppState>) -> ApiResult<(StatusCode, Json<SessionSummary>)> {
    let handle = st.store.create()?;
    let s = handle.lock();
    Ok((StatusCode::CREATED, Json(summary(&s)?)))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct NextQuestion {
    pub done: bool,
    pub question: Option<Question>,
}

async fn next_question(State(st): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<NextQuestion>> {
    let handle = st.store.get(&id)?;
    let question = handle.lock().next_question()?;
    Ok(Json(NextQuestion { done: question.is_none(), question }))
}

/// An answer as sent over the wire. `value` may be a JSON boolean or number,
/// or a string in answer-file syntax (`diagnosis`, `yes`, `45`, `unknown`).
#[derive(Debug, Deserialize)]
pub struct AnswerBody {
    pub attribute: String,
    pub value: serde_json::Value,
    pub cf: Option<f64>,
}

/// Converts a JSON value into a typed answer for `attribute`.
pub fn answer_from_json(kb: &KnowledgeBase, attribute: &str, value: &serde_json::Value, cf: Option<f64>) -> Result<Answer, SessionError> {
    let mut answer = match value {
        serde_json::Value::String(s) => session::parse_answer_text(kb, attribute, s)?,
        serde_json::Value::Bool(b) => Answer::known(Value::Bool(*b)),
        serde_json::Value::Number(n) => Answer::known(Value::Number(n.as_f64().unwrap_or(f64::NAN))),
        other => {
            return Err(SessionError::OutOfDomain {
                attribute: attribute.to_string(),
                detail: format!("expected a string, number or boolean, got {other}"),
            })
        }
    };
    if let Some(cf) = cf {
        if answer == Answer::unknown() {
            return Err(SessionError::OutOfDomain { attribute: attribute.to_string(), detail: "`unknown` answers cannot carry a cf".into() });
        }
        answer.cf = cf;
    }
    session::check_answer(kb, attribute, &answer)?;
    Ok(answer)
}

async fn submit_answer(State(st): State<AppState>, Path(id): Path<String>, Json(body): Json<AnswerBody>) -> ApiResult<Json<SessionSummary>> {
    let handle = st.store.get(&id)?;
    let mut s = handle.lock();
    let answer = answer_from_json(st.store.kb(), &body.attribute, &body.value, body.cf)?;
    st.store.submit(&mut s, &body.attribute, answer)?;
    Ok(Json(summary(&s)?))
}

#[derive(Debug, Deserialize)]
pub struct ReportQuery {
    pub format: Option<String>,
}

async fn report(State(st): State<AppState>, Path(id): Path<String>, Query(q): Query<ReportQuery>) -> ApiResult<Response> {
    let format = match q.format.as_deref() {
        None => report::Format::Json,
        Some(f) => report::Format::parse(f).ok_or_else(|| ApiError::bad_request(format!("unknown report format `{f}`")))?,
    };
    let handle = st.store.get(&id)?;
    let assessment = handle.lock().assess()?;
    let body = report::render(&assessment, format);
    let content_type = match format {
        report::Format::Json => "application/json",
        report::Format::Markdown => "text/markdown; charset=utf-8",
    };
    Ok(([(header::CONTENT_TYPE, content_type)], body).into_response())
}

#[derive(Debug, Deserialize)]
pub struct ExplainQuery {
    pub attribute: String,
    pub mode: Option<String>,
}

async fn explain(State(st): State<AppState>, Path(id): Path<String>, Query(q): Query<ExplainQuery>) -> ApiResult<Json<session::Explanation>> {
    let mode = match q.mode.as_deref() {
        None => ExplainMode::How,
        Some(m) => ExplainMode::parse(m).ok_or_else(|| ApiError::bad_request(format!("unknown explanation mode `{m}`")))?,
    };
    let handle = st.store.get(&id)?;
    let explanation = handle.lock().explain(&q.attribute, mode)?;
    Ok(Json(explanation))
}

#[derive(Debug, Deserialize)]
pub struct WhatIfBody {
    #[serde(default)]
    pub overrides: BTreeMap<String, serde_json::Value>,
}

async fn whatif(State(st): State<AppState>, Path(id): Path<String>, Json(body): Json<WhatIfBody>) -> ApiResult<Json<session::WhatIf>> {
    let kb = st.store.kb();
    let overrides = body
        .overrides
        .iter()
        .map(|(attr, v)| Ok((attr.clone(), answer_from_json(kb, attr, v, None)?)))
        .collect::<Result<BTreeMap<_, _>, SessionError>>()?;
    let handle = st.store.get(&id)?;
    let result = handle.lock().whatif(&overrides)?;
    Ok(Json(result))
}

#[derive(Debug, Serialize, Deserialize)]
pub struct KbMeta {
    pub name: String,
    pub version: String,
    pub threshold: f64,
    pub rules: usize,
    pub attributes: usize,
    pub dimensions: Vec<Dimension>,
}

async fn kb_meta(State(st): State<AppState>) -> Json<KbMeta> {
    let kb = st.store.kb();
    Json(KbMeta {
        name: kb.header.name.clone(),
        version: kb.header.version.clone(),
        threshold: kb.threshold(),
        rules: kb.rules.len(),
        attributes: kb.attributes.len(),
        dimensions: Dimension::ALL.to_vec(),
    })
}
