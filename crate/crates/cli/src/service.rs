//! HTTP service over a project.
//!
//! Reads run concurrently against immutable snapshots. Mutations queue on a
//! single writer lock, are written to disk (temp file, fsync, rename) and
//! only then become visible and acknowledged.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{self, Write};
use std::net::SocketAddr;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use prepwb_core::analysis::{
    alternation_patterns, expand_realizations, pairs_by_sense, substitutable_prepositions, AlternationPattern,
    ExpansionDiagnostic, FramePair, RealizationTuple, Substitute,
};
use prepwb_core::corpus::load_corpus_report;
use prepwb_core::disambig::{compile_rules, disambiguate, DisambiguationContext, LexiconOracle, RankedSense};
use prepwb_core::inventory::{InventoryError, SenseFields, SenseRecord};
use prepwb_core::tagging::{group_instances, progress, Progress, TaggedInstance};
use prepwb_core::text::char_len;
use prepwb_core::{extract_instances, Corpus, InstanceRecord, Inventory, PrepositionList, SenseKey, TagSet};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;
use tokio::net::TcpListener;

use crate::ops::{resolve_senses, sense_pairs, unknown_ids};
use crate::project::{load_preposition_list, ConfigError, DataDir, DataError, ProjectConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    NotFound,
    UnknownPreposition,
    UnknownSense,
    UnknownInstance,
    StaleVersion,
    InvalidRequest,
    Internal,
}

impl ErrorCode {
    pub const ALL: [ErrorCode; 7] = [
        ErrorCode::NotFound,
        ErrorCode::UnknownPreposition,
        ErrorCode::UnknownSense,
        ErrorCode::UnknownInstance,
        ErrorCode::StaleVersion,
        ErrorCode::InvalidRequest,
        ErrorCode::Internal,
    ];

    pub fn status(self) -> StatusCode {
        match self {
            ErrorCode::NotFound | ErrorCode::UnknownPreposition => StatusCode::NOT_FOUND,
            ErrorCode::UnknownSense | ErrorCode::UnknownInstance => StatusCode::UNPROCESSABLE_ENTITY,
            ErrorCode::StaleVersion => StatusCode::CONFLICT,
            ErrorCode::InvalidRequest => StatusCode::BAD_REQUEST,
            ErrorCode::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }
}

/// Error body of every failed request.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApiError {
    pub code: ErrorCode,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl ApiError {
    pub fn new(code: ErrorCode, message: impl Into<String>) -> Self {
        ApiError {
            code,
            message: message.into(),
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: Value) -> Self {
        self.detail = Some(detail);
        self
    }

    fn invalid(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::InvalidRequest, message)
    }

    fn internal(e: impl std::fmt::Display) -> Self {
        Self::new(ErrorCode::Internal, e.to_string())
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.code.status(), Json(self)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

#[derive(Debug, Error)]
pub enum StartupError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error("corpus: {0}")]
    Corpus(String),
    #[error("cannot listen on {addr}: {source}")]
    Bind { addr: SocketAddr, source: io::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Mutable per-preposition data, replaced wholesale on each write.
#[derive(Debug, Clone)]
struct Live {
    inventory: Inventory,
    tags: TagSet,
}

pub struct AppState {
    corpus: Corpus,
    preps: PrepositionList,
    lexicon: LexiconOracle,
    data: DataDir,
    records: BTreeMap<String, Vec<InstanceRecord>>,
    live: RwLock<BTreeMap<String, Arc<Live>>>,
    writer: tokio::sync::Mutex<()>,
}

impl AppState {
    fn snapshot(&self, prep: &str) -> ApiResult<Arc<Live>> {
        self.live
            .read()
            .expect("state lock")
            .get(prep)
            .cloned()
            .ok_or_else(|| {
                ApiError::new(ErrorCode::UnknownPreposition, format!("no sense inventory for {prep:?}"))
                    .with_detail(json!({ "preposition": prep }))
            })
    }

    fn publish(&self, prep: &str, live: Live) {
        self.live.write().expect("state lock").insert(prep.to_string(), Arc::new(live));
    }

    fn records(&self, prep: &str) -> &[InstanceRecord] {
        self.records.get(prep).map_or(&[], Vec::as_slice)
    }
}

/// Loads corpus, lexicon, inventories and tags, and extracts instances for
/// every preposition with an inventory.
pub fn load_state(config: &ProjectConfig) -> Result<AppState, StartupError> {
    let report = load_corpus_report(&config.corpus_root).map_err(|e| StartupError::Corpus(e.to_string()))?;
    if !report.errors.is_empty() {
        let lines: Vec<String> = report.errors.iter().map(ToString::to_string).collect();
        return Err(StartupError::Corpus(lines.join("\n")));
    }
    let data = DataDir::new(&config.data_dir);
    let mut live = BTreeMap::new();
    let mut records = BTreeMap::new();
    for prep in data.prepositions()? {
        let inventory = data.inventory(&prep)?;
        let tags = data.tags(&prep)?;
        records.insert(prep.clone(), extract_instances(&report.corpus, &prep));
        live.insert(prep, Arc::new(Live { inventory, tags }));
    }
    Ok(AppState {
        corpus: report.corpus,
        preps: load_preposition_list(&config.preposition_list_file)?,
        lexicon: data.lexicon_or_empty()?,
        data,
        records,
        live: RwLock::new(live),
        writer: tokio::sync::Mutex::new(()),
    })
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/prepositions", get(list_prepositions))
        .route("/api/prepositions/{prep}/senses", get(get_senses))
        .route("/api/prepositions/{prep}/senses/subsense", post(add_subsense))
        .route("/api/prepositions/{prep}/instances", get(get_instances))
        .route("/api/prepositions/{prep}/tags", get(get_tags).post(post_tags))
        .route("/api/prepositions/{prep}/progress", get(get_progress))
        .route("/api/prepositions/{prep}/analysis/pairs", get(get_pairs))
        .route("/api/prepositions/{prep}/analysis/expand", get(get_expand))
        .route("/api/disambiguate", post(post_disambiguate))
        .fallback(|| async { ApiError::new(ErrorCode::NotFound, "no such endpoint") })
        .with_state(state)
}

/// Validates the config, loads the project, binds and serves until
/// interrupted. The bound address is announced on `out` as
/// `listening on http://ADDR`.
pub fn run(config: &ProjectConfig, out: &mut dyn Write) -> Result<(), StartupError> {
    let addr = config.validate()?;
    let state = Arc::new(load_state(config)?);
    let runtime = tokio::runtime::Builder::new_multi_thread().enable_all().build()?;
    runtime.block_on(async {
        let listener = TcpListener::bind(addr)
            .await
            .map_err(|source| StartupError::Bind { addr, source })?;
        writeln!(out, "listening on http://{}", listener.local_addr()?)?;
        out.flush()?;
        axum::serve(listener, router(state))
            .with_graceful_shutdown(async {
                let _ = tokio::signal::ctrl_c().await;
            })
            .await?;
        Ok(())
    })
}

fn parse_body<T: DeserializeOwned>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::invalid(format!("bad request body: {e}")))
}

fn persist(result: Result<(), DataError>) -> ApiResult<()> {
    tokio::task::block_in_place(|| result.map_err(ApiError::internal))
}

fn unknown_sense(prep: &str, reference: &str) -> ApiError {
    ApiError::new(ErrorCode::UnknownSense, format!("no sense {reference:?} for {prep:?}"))
        .with_detail(json!({ "sense": reference }))
}

#[derive(Serialize)]
struct PrepositionSummary {
    preposition: String,
    senses: usize,
    tagged: usize,
    total: usize,
    version: u64,
}

async fn list_prepositions(State(st): State<Arc<AppState>>) -> Json<Vec<PrepositionSummary>> {
    let live = st.live.read().expect("state lock").clone();
    Json(
        live.iter()
            .map(|(prep, l)| {
                let p = progress(&l.tags, st.records(prep));
                PrepositionSummary {
                    preposition: prep.clone(),
                    senses: l.inventory.len(),
                    tagged: p.tagged,
                    total: p.total,
                    version: l.tags.version,
                }
            })
            .collect(),
    )
}

async fn get_senses(State(st): State<Arc<AppState>>, Path(prep): Path<String>) -> ApiResult<Json<Inventory>> {
    Ok(Json(st.snapshot(&prep)?.inventory.clone()))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SubsenseRequest {
    parent: String,
    fields: SenseFields,
}

async fn add_subsense(
    State(st): State<Arc<AppState>>,
    Path(prep): Path<String>,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<SenseRecord>)> {
    let req: SubsenseRequest = parse_body(&body)?;
    let _guard = st.writer.lock().await;
    let current = st.snapshot(&prep)?;
    let mut inventory = current.inventory.clone();
    let parent = inventory
        .resolve(&req.parent)
        .map(|s| s.key)
        .ok_or_else(|| unknown_sense(&prep, &req.parent))?;
    let key = inventory.add_subsense(&parent.ode, req.fields).map_err(|e| match e {
        InventoryError::UnknownSense(_) => unknown_sense(&prep, &req.parent),
        other => ApiError::invalid(other.to_string()),
    })?;
    persist(st.data.save_inventory(&inventory))?;
    let record = inventory.get(&key).expect("just added").clone();
    st.publish(
        &prep,
        Live {
            inventory,
            tags: current.tags.clone(),
        },
    );
    Ok((StatusCode::CREATED, Json(record)))
}

#[derive(Serialize)]
struct Range {
    start: usize,
    end: usize,
}

#[derive(Serialize)]
struct InstanceView<'a> {
    instance_id: String,
    frame: &'a str,
    frame_element: &'a str,
    lexical_unit: &'a str,
    subcorpus: &'a str,
    sentence_id: u64,
    text: &'a str,
    preposition_span: Range,
    frame_element_span: Range,
    tag: Option<&'a TaggedInstance>,
}

#[derive(Serialize)]
struct GroupView<'a> {
    frame: String,
    frame_element: String,
    lexical_unit: String,
    instances: Vec<InstanceView<'a>>,
}

fn instance_view<'a>(st: &'a AppState, r: &'a InstanceRecord, prep: &str, tags: &'a TagSet) -> Option<InstanceView<'a>> {
    let occ = r.occurrence.as_ref()?;
    let (_, _, sentence) = st.corpus.find_sentence(occ.sentence_id)?;
    let span = sentence.frame_element_at(occ.prep_start)?;
    let id = r.instance_id();
    Some(InstanceView {
        tag: tags.get(&id),
        instance_id: id,
        frame: &r.frame,
        frame_element: &occ.frame_element,
        lexical_unit: &r.lexical_unit,
        subcorpus: &r.subcorpus,
        sentence_id: occ.sentence_id,
        text: sentence.text(),
        preposition_span: Range {
            start: occ.prep_start,
            end: occ.prep_start + char_len(prep),
        },
        frame_element_span: Range {
            start: span.start,
            end: span.end,
        },
    })
}

async fn get_instances(
    State(st): State<Arc<AppState>>,
    Path(prep): Path<String>,
    Query(query): Query<HashMap<String, String>>,
) -> ApiResult<Response> {
    let grouped = match query.get("grouped").map(String::as_str) {
        None | Some("false") => false,
        Some("true") => true,
        Some(other) => return Err(ApiError::invalid(format!("grouped must be true or false, got {other:?}"))),
    };
    let live = st.snapshot(&prep)?;
    let records = st.records(&prep);
    let mut views: BTreeMap<String, InstanceView> = BTreeMap::new();
    for r in records {
        if let Some(v) = instance_view(&st, r, &prep, &live.tags) {
            views.entry(v.instance_id.clone()).or_insert(v);
        }
    }
    let body = if grouped {
        let groups: Vec<GroupView> = group_instances(records)
            .into_iter()
            .map(|g| GroupView {
                instances: g.members.iter().filter_map(|id| views.remove(id)).collect(),
                frame: g.frame,
                frame_element: g.frame_element,
                lexical_unit: g.lexical_unit,
            })
            .collect();
        json!({ "preposition": prep, "version": live.tags.version, "groups": groups })
    } else {
        let list: Vec<&InstanceView> = views.values().collect();
        json!({ "preposition": prep, "version": live.tags.version, "instances": list })
    };
    Ok(Json(body).into_response())
}

#[derive(Serialize)]
struct TagsView<'a> {
    preposition: &'a str,
    version: u64,
    tags: Vec<&'a TaggedInstance>,
}

async fn get_tags(State(st): State<Arc<AppState>>, Path(prep): Path<String>) -> ApiResult<Response> {
    let live = st.snapshot(&prep)?;
    let view = TagsView {
        preposition: &prep,
        version: live.tags.version,
        tags: live.tags.iter().collect(),
    };
    Ok(Json(view).into_response())
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TagRequest {
    version: u64,
    ids: Vec<String>,
    sense_keys: Vec<String>,
    #[serde(default)]
    note: Option<String>,
    #[serde(default)]
    tagger: Option<String>,
}

#[derive(Serialize)]
struct TagResponse {
    preposition: String,
    version: u64,
    created: usize,
    overwritten: usize,
    unchanged: usize,
}

async fn post_tags(
    State(st): State<Arc<AppState>>,
    Path(prep): Path<String>,
    body: Bytes,
) -> ApiResult<Json<TagResponse>> {
    let req: TagRequest = parse_body(&body)?;
    let _guard = st.writer.lock().await;
    let current = st.snapshot(&prep)?;
    if req.version != current.tags.version {
        return Err(ApiError::new(
            ErrorCode::StaleVersion,
            format!("tags for {prep:?} are at version {}, request read {}", current.tags.version, req.version),
        )
        .with_detail(json!({ "current_version": current.tags.version })));
    }
    if req.ids.is_empty() || req.sense_keys.is_empty() {
        return Err(ApiError::invalid("ids and sense_keys must both be non-empty"));
    }
    let keys = resolve_senses(&current.inventory, &req.sense_keys).map_err(|r| unknown_sense(&prep, &r))?;
    let missing = unknown_ids(st.records(&prep), &req.ids);
    if !missing.is_empty() {
        return Err(
            ApiError::new(ErrorCode::UnknownInstance, format!("unknown instance ids: {}", missing.join(", ")))
                .with_detail(json!({ "ids": missing })),
        );
    }
    let mut tags = current.tags.clone();
    let tagger = req.tagger.as_deref().unwrap_or("lexicographer");
    let outcome = tags
        .assign(&req.ids, &keys, &current.inventory, tagger, req.note.as_deref())
        .map_err(|e| ApiError::invalid(e.to_string()))?;
    if tags.version != current.tags.version {
        persist(st.data.save_tags(&tags))?;
        st.publish(
            &prep,
            Live {
                inventory: current.inventory.clone(),
                tags: tags.clone(),
            },
        );
    }
    Ok(Json(TagResponse {
        preposition: prep,
        version: tags.version,
        created: outcome.created,
        overwritten: outcome.overwritten,
        unchanged: outcome.unchanged,
    }))
}

#[derive(Serialize)]
struct ProgressView {
    preposition: String,
    version: u64,
    #[serde(flatten)]
    progress: Progress,
}

async fn get_progress(State(st): State<Arc<AppState>>, Path(prep): Path<String>) -> ApiResult<Json<ProgressView>> {
    let live = st.snapshot(&prep)?;
    Ok(Json(ProgressView {
        progress: progress(&live.tags, st.records(&prep)),
        version: live.tags.version,
        preposition: prep,
    }))
}

#[derive(Serialize)]
struct PairsRow {
    sense: SenseKey,
    relation_name: String,
    pairs: Vec<FramePair>,
}

async fn get_pairs(State(st): State<Arc<AppState>>, Path(prep): Path<String>) -> ApiResult<Json<Vec<PairsRow>>> {
    let live = st.snapshot(&prep)?;
    let rows = pairs_by_sense(&live.tags, st.records(&prep)).map_err(ApiError::internal)?;
    Ok(Json(
        rows.into_iter()
            .map(|row| PairsRow {
                relation_name: live
                    .inventory
                    .get(&row.sense)
                    .map_or_else(String::new, |s| s.fields.relation_name.clone()),
                sense: row.sense,
                pairs: row.pairs,
            })
            .collect(),
    ))
}

#[derive(Serialize)]
struct ExpandView {
    preposition: String,
    sense: SenseKey,
    pairs: Vec<FramePair>,
    tuples: Vec<RealizationTuple>,
    diagnostics: Vec<ExpansionDiagnostic>,
    substitutes: Vec<Substitute>,
    patterns: Vec<AlternationPattern>,
}

async fn get_expand(
    State(st): State<Arc<AppState>>,
    Path(prep): Path<String>,
    Query(query): Query<HashMap<String, String>>,
) -> ApiResult<Json<ExpandView>> {
    let live = st.snapshot(&prep)?;
    let reference = query
        .get("sense")
        .ok_or_else(|| ApiError::invalid("missing query parameter \"sense\""))?;
    let sense = live
        .inventory
        .resolve(reference)
        .map(|s| s.key)
        .ok_or_else(|| unknown_sense(&prep, reference))?;
    let pairs = sense_pairs(&live.tags, st.records(&prep), &sense).map_err(ApiError::internal)?;
    let seeds: BTreeSet<FramePair> = pairs.iter().cloned().collect();
    let exp = expand_realizations(&st.corpus, &seeds, &st.preps);
    let substitutes = substitutable_prepositions(&exp.tuples, &pairs, &prep);
    let patterns = alternation_patterns(&exp.tuples).map_err(ApiError::internal)?;
    Ok(Json(ExpandView {
        preposition: prep,
        sense,
        pairs,
        tuples: exp.tuples,
        diagnostics: exp.diagnostics,
        substitutes,
        patterns,
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DisambiguateRequest {
    context: DisambiguationContext,
}

#[derive(Serialize)]
struct DisambiguateResponse {
    preposition: String,
    ranking: Vec<RankedSense>,
    warnings: Vec<String>,
}

async fn post_disambiguate(State(st): State<Arc<AppState>>, body: Bytes) -> ApiResult<Json<DisambiguateResponse>> {
    let req: DisambiguateRequest = parse_body(&body)?;
    let live = st.snapshot(&req.context.preposition)?;
    let rules = compile_rules(&live.inventory, &st.lexicon);
    let ranking = disambiguate(&rules, &st.lexicon, &req.context).map_err(ApiError::internal)?;
    Ok(Json(DisambiguateResponse {
        preposition: req.context.preposition,
        ranking,
        warnings: rules.warnings,
    }))
}
