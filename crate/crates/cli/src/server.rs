//! JSON API under `/api` plus optional static UI assets.

use std::sync::Arc;

use axum::extract::rejection::JsonRejection;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use chrono::{DateTime, Utc};
use ckl_pos::corpus::{
    Annotation, AnnotationState, Corpus, Document, NewAnnotation, Provenance, TagDistribution,
};
use ckl_pos::morphology::Segmentation;
use ckl_pos::suggestion::{Context, ScoredTag, Suggester};
use ckl_pos::tagset::{CategoryTree, TagCategory};
use ckl_pos::tokenizer::{SentenceSpan, Token, TokenKind};
use ckl_pos::{Error, UdMode};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tower_http::services::ServeDir;

use crate::config::ServiceConfig;

pub struct AppState {
    pub corpus: Corpus,
    pub suggester: Suggester,
    pub mode: UdMode,
}

pub type Shared = Arc<AppState>;

/// An error rendered as `{error, code, detail}`.
#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    code: &'static str,
    message: String,
    detail: serde_json::Value,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        ApiError {
            status: StatusCode::BAD_REQUEST,
            code: "BadRequest",
            message: message.into(),
            detail: serde_json::Value::Null,
        }
    }
}

impl From<Error> for ApiError {
    fn from(e: Error) -> Self {
        let (status, detail) = match &e {
            Error::UnknownTag(tag) => (StatusCode::UNPROCESSABLE_ENTITY, json!({ "tag": tag })),
            Error::Address {
                doc,
                sentence,
                token,
            } => (
                StatusCode::UNPROCESSABLE_ENTITY,
                json!({ "doc": doc, "sent": sentence, "tok": token }),
            ),
            Error::DocumentNotFound(id) => (StatusCode::NOT_FOUND, json!({ "doc": id })),
            Error::Parse { line, .. } => (StatusCode::BAD_REQUEST, json!({ "line": line })),
            Error::Storage { .. } | Error::CorruptRecord { .. } => {
                (StatusCode::INTERNAL_SERVER_ERROR, serde_json::Value::Null)
            }
            _ => (StatusCode::BAD_REQUEST, serde_json::Value::Null),
        };
        ApiError {
            status,
            code: e.code(),
            message: e.to_string(),
            detail,
        }
    }
}

impl From<JsonRejection> for ApiError {
    fn from(r: JsonRejection) -> Self {
        ApiError::bad_request(r.body_text())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let body = json!({ "error": self.message, "code": self.code, "detail": self.detail });
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Run blocking corpus work off the async executor.
async fn blocking<T, F>(state: &Shared, f: F) -> ApiResult<T>
where
    T: Send + 'static,
    F: FnOnce(&AppState) -> Result<T, Error> + Send + 'static,
{
    let state = state.clone();
    tokio::task::spawn_blocking(move || f(&state))
        .await
        .map_err(|e| ApiError {
            status: StatusCode::INTERNAL_SERVER_ERROR,
            code: "InternalError",
            message: e.to_string(),
            detail: serde_json::Value::Null,
        })?
        .map_err(ApiError::from)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TagView {
    pub abbrev: String,
    pub english_name: String,
    pub kurdish_name: String,
    pub category: TagCategory,
    pub table_index: u8,
    pub needs_review: bool,
    pub ud_paper: String,
    pub ud_strict: String,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DocumentSummary {
    pub id: String,
    pub title: String,
    pub sentences: usize,
    pub tokens: usize,
    pub created_at: DateTime<Utc>,
}

impl DocumentSummary {
    fn of(doc: &Document) -> Self {
        DocumentSummary {
            id: doc.id.clone(),
            title: doc.title.clone(),
            sentences: doc.sentences.len(),
            tokens: doc.token_count(),
            created_at: doc.created_at,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TokenView {
    pub index: usize,
    pub surface: String,
    pub start: usize,
    pub end: usize,
    pub kind: TokenKind,
    pub annotation: Option<Annotation>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SentenceView {
    pub index: usize,
    pub start: usize,
    pub end: usize,
    pub text: String,
    pub tokens: Vec<TokenView>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct DocumentView {
    #[serde(flatten)]
    pub summary: DocumentSummary,
    pub text: String,
    pub sentences: Vec<SentenceView>,
}

fn sentence_view(doc: &Document, state: &AnnotationState, index: usize, s: &SentenceSpan) -> SentenceView {
    SentenceView {
        index,
        start: s.start,
        end: s.end,
        text: doc.normalized.slice(s.start, s.end),
        tokens: s
            .tokens
            .iter()
            .map(|t| TokenView {
                index: t.index,
                surface: t.surface.clone(),
                start: t.start,
                end: t.end,
                kind: t.kind,
                annotation: state.current.get(&(index, t.index)).cloned(),
            })
            .collect(),
    }
}

async fn tagset(State(state): State<Shared>) -> Json<serde_json::Value> {
    let reg = state.corpus.registry();
    let tags: Vec<TagView> = reg
        .tags()
        .iter()
        .map(|t| TagView {
            abbrev: t.abbrev.clone(),
            english_name: t.english_name.clone(),
            kurdish_name: t.kurdish_name.clone(),
            category: t.category,
            table_index: t.table_index,
            needs_review: t.needs_review,
            ud_paper: t.ud_upos.label(UdMode::PaperLiteral).to_string(),
            ud_strict: t.ud_upos.label(UdMode::StrictUd).to_string(),
        })
        .collect();
    Json(json!({
        "tags": tags,
        "aliases": reg.aliases(),
        "tree": reg.category_tree(),
    }))
}

async fn tagset_tree(State(state): State<Shared>) -> Json<CategoryTree> {
    Json(state.corpus.registry().category_tree().clone())
}

async fn list_documents(State(state): State<Shared>) -> Json<Vec<DocumentSummary>> {
    Json(
        state
            .corpus
            .list()
            .into_iter()
            .map(|e| DocumentSummary {
                id: e.id,
                title: e.title,
                sentences: e.sentences,
                tokens: e.tokens,
                created_at: e.created_at,
            })
            .collect(),
    )
}

#[derive(Debug, Deserialize)]
pub struct CreateDocument {
    #[serde(default)]
    pub title: String,
    pub text: String,
}

async fn create_document(
    State(state): State<Shared>,
    body: Result<Json<CreateDocument>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<DocumentSummary>)> {
    let Json(body) = body?;
    let doc = blocking(&state, move |s| s.corpus.create_document(&body.text, &body.title)).await?;
    Ok((StatusCode::CREATED, Json(DocumentSummary::of(&doc))))
}

async fn get_document(
    State(state): State<Shared>,
    Path(id): Path<String>,
) -> ApiResult<Json<DocumentView>> {
    let (doc, ann) = blocking(&state, move |s| {
        Ok((s.corpus.document(&id)?, s.corpus.annotations(&id)?))
    })
    .await?;
    Ok(Json(DocumentView {
        summary: DocumentSummary::of(&doc),
        text: doc.normalized.text.clone(),
        sentences: doc
            .sentences
            .iter()
            .enumerate()
            .map(|(i, s)| sentence_view(&doc, &ann, i, s))
            .collect(),
    }))
}

async fn get_sentence(
    State(state): State<Shared>,
    Path((id, n)): Path<(String, usize)>,
) -> ApiResult<Json<SentenceView>> {
    let doc_id = id.clone();
    let (doc, ann) = blocking(&state, move |s| {
        Ok((s.corpus.document(&doc_id)?, s.corpus.annotations(&doc_id)?))
    })
    .await?;
    let span = doc.sentences.get(n).ok_or(Error::Address {
        doc: id,
        sentence: n,
        token: 0,
    })?;
    Ok(Json(sentence_view(&doc, &ann, n, span)))
}

#[derive(Debug, Deserialize)]
pub struct SuggestQuery {
    pub doc: String,
    pub sent: usize,
    pub tok: usize,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SuggestResponse {
    pub token: Token,
    pub suggestions: Vec<ScoredTag>,
    pub segmentations: Vec<Segmentation>,
}

async fn suggest(
    State(state): State<Shared>,
    Query(q): Query<SuggestQuery>,
) -> ApiResult<Json<SuggestResponse>> {
    let doc_id = q.doc.clone();
    let doc = blocking(&state, move |s| s.corpus.document(&doc_id)).await?;
    let address = || Error::Address {
        doc: q.doc.clone(),
        sentence: q.sent,
        token: q.tok,
    };
    let tokens = &doc.sentences.get(q.sent).ok_or_else(address)?.tokens;
    let token = tokens.get(q.tok).ok_or_else(address)?;
    Ok(Json(SuggestResponse {
        token: token.clone(),
        suggestions: state.suggester.suggest(token, Context::within(tokens, q.tok)),
        segmentations: state.suggester.segment(token),
    }))
}

#[derive(Debug, Deserialize)]
pub struct PostAnnotation {
    pub doc: String,
    pub sent: usize,
    pub tok: usize,
    pub tag: String,
    #[serde(default = "default_annotator")]
    pub annotator: String,
    #[serde(default = "human")]
    pub provenance: Provenance,
    #[serde(default)]
    pub score: Option<f64>,
}

fn default_annotator() -> String {
    "anonymous".to_string()
}

fn human() -> Provenance {
    Provenance::Human
}

async fn post_annotation(
    State(state): State<Shared>,
    body: Result<Json<PostAnnotation>, JsonRejection>,
) -> ApiResult<(StatusCode, Json<Annotation>)> {
    let Json(body) = body?;
    let ann = blocking(&state, move |s| {
        s.corpus.record_annotation(NewAnnotation {
            doc_id: body.doc,
            sentence_index: body.sent,
            token_index: body.tok,
            tag: body.tag,
            provenance: body.provenance,
            annotator: body.annotator,
            score: body.score,
        })
    })
    .await?;
    Ok((StatusCode::CREATED, Json(ann)))
}

#[derive(Debug, Default, Deserialize)]
pub struct AutoAnnotate {
    #[serde(default)]
    pub annotator: Option<String>,
}

async fn auto_annotate(
    State(state): State<Shared>,
    Path(id): Path<String>,
    body: Option<Json<AutoAnnotate>>,
) -> ApiResult<Json<serde_json::Value>> {
    let annotator = body
        .and_then(|Json(b)| b.annotator)
        .unwrap_or_else(|| "auto".to_string());
    let anns = blocking(&state, move |s| {
        s.corpus.auto_annotate(&id, &s.suggester, &annotator)
    })
    .await?;
    Ok(Json(json!({ "annotated": anns.len(), "annotations": anns })))
}

#[derive(Debug, Deserialize)]
pub struct ExportQuery {
    pub mode: Option<String>,
}

async fn export(
    State(state): State<Shared>,
    Path(id): Path<String>,
    Query(q): Query<ExportQuery>,
) -> ApiResult<Response> {
    let mode = match q.mode {
        Some(m) => m.parse::<UdMode>().map_err(ApiError::bad_request)?,
        None => state.mode,
    };
    let file = format!("attachment; filename=\"{id}.conllu\"");
    let body = blocking(&state, move |s| {
        s.corpus.export_conllu(&id, mode, Some(&s.suggester.morphology))
    })
    .await?;
    Ok((
        [
            (header::CONTENT_TYPE, "text/plain; charset=utf-8".to_string()),
            (header::CONTENT_DISPOSITION, file),
        ],
        body,
    )
        .into_response())
}

#[derive(Debug, Serialize, Deserialize)]
pub struct StatsResponse {
    pub documents: usize,
    pub tokens: usize,
    pub annotated: u64,
    #[serde(flatten)]
    pub distribution: TagDistribution,
}

async fn stats(State(state): State<Shared>) -> ApiResult<Json<StatsResponse>> {
    let out = blocking(&state, |s| {
        let list = s.corpus.list();
        let distribution = s.corpus.stats()?;
        Ok(StatsResponse {
            documents: list.len(),
            tokens: list.iter().map(|e| e.tokens).sum(),
            annotated: distribution.total,
            distribution,
        })
    })
    .await?;
    Ok(Json(out))
}

async fn api_not_found() -> ApiError {
    ApiError {
        status: StatusCode::NOT_FOUND,
        code: "NotFound",
        message: "no such endpoint".into(),
        detail: serde_json::Value::Null,
    }
}

pub fn router(state: Shared) -> Router {
    Router::new()
        .route("/tagset", get(tagset))
        .route("/tagset/tree", get(tagset_tree))
        .route("/documents", get(list_documents).post(create_document))
        .route("/documents/{id}", get(get_document))
        .route("/documents/{id}/sentences/{n}", get(get_sentence))
        .route("/documents/{id}/auto-annotate", post(auto_annotate))
        .route("/documents/{id}/export", get(export))
        .route("/suggest", get(suggest))
        .route("/annotations", post(post_annotation))
        .route("/stats", get(stats))
        .fallback(api_not_found)
        .with_state(state)
}

/// The API nested under `/api`, with static assets served for other paths.
pub fn app(state: Shared, static_dir: Option<&std::path::Path>) -> Router {
    let app = Router::new().nest("/api", router(state));
    match static_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app,
    }
}

pub fn state_from_config(config: &ServiceConfig) -> Result<Shared, Error> {
    config.validate()?;
    Ok(Arc::new(AppState {
        corpus: Corpus::open(&config.corpus_dir)?,
        suggester: config.resources()?,
        mode: config.mode()?,
    }))
}

pub async fn serve(config: ServiceConfig) -> Result<(), Box<dyn std::error::Error>> {
    let state = state_from_config(&config)?;
    let addr = config.listen_addr()?;
    let listener = tokio::net::TcpListener::bind(addr)
        .await
        .map_err(|e| format!("cannot bind {addr}: {e}"))?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, app(state, config.static_dir.as_deref()))
        .with_graceful_shutdown(shutdown_signal())
        .await?;
    eprintln!("shut down");
    Ok(())
}

async fn shutdown_signal() {
    let ctrl_c = async {
        let _ = tokio::signal::ctrl_c().await;
    };
    #[cfg(unix)]
    let term = async {
        if let Ok(mut s) =
            tokio::signal::unix::signal(tokio::signal::unix::SignalKind::terminate())
        {
            s.recv().await;
        }
    };
    #[cfg(not(unix))]
    let term = std::future::pending::<()>();
    tokio::select! {
        _ = ctrl_c => {},
        _ = term => {},
    }
}
