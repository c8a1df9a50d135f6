//! The language-model gateway: prompt templates, response parsers, call
//! accounting, and the end-to-end generation pipeline.
//!
//! Backends are pluggable. The default [`FixtureBackend`] replays recorded
//! responses keyed by a stable hash of the rendered prompt, which makes
//! whole pipeline runs deterministic and testable offline. A
//! [`ScriptBackend`] maps stage names to response files for authoring
//! fixtures, and [`LiveBackend`] talks to a chat-completion HTTP endpoint
//! (`LLM_BASE_URL`, `LLM_API_KEY`), capturing its responses as fixtures.
//!
//! A house with k rooms costs exactly 3 + 3k calls: three house-level calls
//! (floor plan with wall height folded in, doorways, windows) and three
//! per-room calls (object selection, layout constraints, wall/small-object
//! placement).

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::constraints::{parse_scene_graph, DslError, PredicateParams, SceneGraph};
use crate::floorplan::{
    exterior_walls, parse_room_line, shared_walls, validate_plan, FloorPlan, PlanParseError, Room,
};
use crate::geometry::{Footprint, Point2, Yaw};
use crate::openings::{
    parse_door_line, parse_window_line, place_doors, place_windows, DoorSpec, OpeningParseError,
    OpeningsError, PlacedDoor, PlacedWindow, WindowSpec,
};
use crate::retrieval::{
    assets_for_query, select_door_asset, select_material, AssetRecord, Catalog, Location,
    MatchWeights, MaterialCatalog, ObjectQuery, RetrievalError, SimilarityProvider, VarianceType,
};
use crate::scene::{
    place_wall_object, spawn_small_objects, ObjectKind, PlacedObject, RoomMaterials,
    SceneDocument, SceneError, SceneMetadata, SmallChild,
};
use crate::solver::{
    solve_dfs, Budget, ObjectDims, PlacementProblem, SolverError,
};

/// The prompt templates shipped with the crate. The wall-height question is
/// folded into the floor-plan call; the wall/small placement template is the
/// third per-room call.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TemplateId {
    FloorPlan,
    WallHeight,
    Doorway,
    Window,
    ObjectSelection,
    Layout,
    WallSmall,
}

impl TemplateId {
    pub const ALL: [TemplateId; 7] = [
        TemplateId::FloorPlan,
        TemplateId::WallHeight,
        TemplateId::Doorway,
        TemplateId::Window,
        TemplateId::ObjectSelection,
        TemplateId::Layout,
        TemplateId::WallSmall,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TemplateId::FloorPlan => "floor_plan",
            TemplateId::WallHeight => "wall_height",
            TemplateId::Doorway => "doorway",
            TemplateId::Window => "window",
            TemplateId::ObjectSelection => "object_selection",
            TemplateId::Layout => "layout",
            TemplateId::WallSmall => "wall_small",
        }
    }

    pub fn body(self) -> &'static str {
        match self {
            TemplateId::FloorPlan => include_str!("../templates/floor_plan.txt"),
            TemplateId::WallHeight => include_str!("../templates/wall_height.txt"),
            TemplateId::Doorway => include_str!("../templates/doorway.txt"),
            TemplateId::Window => include_str!("../templates/window.txt"),
            TemplateId::ObjectSelection => include_str!("../templates/object_selection.txt"),
            TemplateId::Layout => include_str!("../templates/layout.txt"),
            TemplateId::WallSmall => include_str!("../templates/wall_small.txt"),
        }
    }
}

/// Every placeholder name the templates may use. Rendering fails when one of
/// these survives substitution; other braced text (JSON examples) passes
/// through untouched.
pub const PLACEHOLDERS: [&str; 11] = [
    "input",
    "additional_requirements",
    "rooms",
    "room_sizes",
    "room_pairs",
    "walls",
    "wall_height",
    "room_type",
    "room_size",
    "objects",
    "pending",
];

#[derive(Debug, Error, PartialEq)]
pub enum GatewayError {
    #[error("template '{template}' placeholder '{{{name}}}' is unbound")]
    MissingPlaceholder { template: String, name: String },
    #[error("no fixture for stage '{stage}' (prompt hash {hash})")]
    FixtureMiss { stage: String, hash: String },
    #[error("backend failure at stage '{stage}': {detail}")]
    Backend { stage: String, detail: String },
    #[error("cannot parse wall height from '{0}'")]
    WallHeightParse(String),
    #[error("malformed structured block: {0}")]
    MalformedStructure(String),
    #[error("line {lineno}: malformed placement directive: {line}")]
    MalformedDirective { lineno: usize, line: String },
}

/// Byte-exact substitution of bound placeholders into the template body.
pub fn render(
    template: TemplateId,
    bindings: &BTreeMap<&str, String>,
) -> Result<String, GatewayError> {
    let mut text = template.body().to_string();
    for (name, value) in bindings {
        text = text.replace(&format!("{{{}}}", name), value);
    }
    for name in PLACEHOLDERS {
        if text.contains(&format!("{{{}}}", name)) {
            return Err(GatewayError::MissingPlaceholder {
                template: template.as_str().to_string(),
                name: name.to_string(),
            });
        }
    }
    Ok(text)
}

/// Stable key for fixture lookup: SHA-256 of the rendered prompt bytes.
pub fn prompt_hash(prompt: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(prompt.as_bytes());
    format!("{:x}", hasher.finalize())
}

/// One completion request. `room` names the room for per-room stages.
pub struct PromptRequest<'a> {
    pub template_id: TemplateId,
    pub room: Option<&'a str>,
    pub prompt: &'a str,
}

/// A completion source. Implementations must be thread-safe; per-room calls
/// may be issued concurrently.
pub trait Backend: Sync {
    fn complete(&self, request: &PromptRequest) -> Result<String, GatewayError>;
}

/// Replays recorded responses from `<dir>/<sha256(prompt)>.txt`. A missing
/// file is a hard error; there is no fallback.
pub struct FixtureBackend {
    dir: PathBuf,
}

impl FixtureBackend {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }
}

impl Backend for FixtureBackend {
    fn complete(&self, request: &PromptRequest) -> Result<String, GatewayError> {
        let hash = prompt_hash(request.prompt);
        let path = self.dir.join(format!("{}.txt", hash));
        fs::read_to_string(&path).map_err(|_| GatewayError::FixtureMiss {
            stage: request.template_id.as_str().to_string(),
            hash,
        })
    }
}

fn room_slug(room: &str) -> String {
    room.to_ascii_lowercase().replace(|c: char| !c.is_alphanumeric(), "_")
}

/// Fixture-authoring backend: responses live in stage-named files
/// (`floor_plan.txt`, `layout__living_room.txt`, ...). With `record_to`
/// set, every served response is also written out as a hash-keyed fixture
/// next to a `.prompt.txt` capture, ready for [`FixtureBackend`].
pub struct ScriptBackend {
    dir: PathBuf,
    record_to: Option<PathBuf>,
}

impl ScriptBackend {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: dir.into(),
            record_to: None,
        }
    }

    pub fn recording_to(dir: impl Into<PathBuf>, record_to: impl Into<PathBuf>) -> Self {
        Self {
            dir: dir.into(),
            record_to: Some(record_to.into()),
        }
    }

    pub fn stage_file_name(template_id: TemplateId, room: Option<&str>) -> String {
        match room {
            Some(room) => format!("{}__{}.txt", template_id.as_str(), room_slug(room)),
            None => format!("{}.txt", template_id.as_str()),
        }
    }
}

impl Backend for ScriptBackend {
    fn complete(&self, request: &PromptRequest) -> Result<String, GatewayError> {
        let name = Self::stage_file_name(request.template_id, request.room);
        let path = self.dir.join(&name);
        let text = fs::read_to_string(&path).map_err(|_| GatewayError::FixtureMiss {
            stage: request.template_id.as_str().to_string(),
            hash: name.clone(),
        })?;
        if let Some(out) = &self.record_to {
            let hash = prompt_hash(request.prompt);
            let write = |suffix: &str, body: &str| {
                fs::write(out.join(format!("{}{}", hash, suffix)), body).map_err(|e| {
                    GatewayError::Backend {
                        stage: request.template_id.as_str().to_string(),
                        detail: format!("cannot record fixture: {}", e),
                    }
                })
            };
            write(".txt", &text)?;
            write(".prompt.txt", request.prompt)?;
        }
        Ok(text)
    }
}

/// Chat-completion HTTP backend. Reads `LLM_BASE_URL`, `LLM_API_KEY`, and
/// optionally `LLM_MODEL` (default `gpt-4`); temperature 0 for
/// reproducibility. Responses are captured into `capture_dir` as fixture
/// files when set.
pub struct LiveBackend {
    pub base_url: String,
    pub api_key: String,
    pub model: String,
    pub temperature: f64,
    pub capture_dir: Option<PathBuf>,
}

impl LiveBackend {
    pub fn from_env() -> Result<Self, GatewayError> {
        let base_url = std::env::var("LLM_BASE_URL").map_err(|_| GatewayError::Backend {
            stage: "init".into(),
            detail: "LLM_BASE_URL is not set".into(),
        })?;
        let api_key = std::env::var("LLM_API_KEY").map_err(|_| GatewayError::Backend {
            stage: "init".into(),
            detail: "LLM_API_KEY is not set".into(),
        })?;
        Ok(Self {
            base_url,
            api_key,
            model: std::env::var("LLM_MODEL").unwrap_or_else(|_| "gpt-4".into()),
            temperature: 0.0,
            capture_dir: None,
        })
    }
}

impl Backend for LiveBackend {
    fn complete(&self, request: &PromptRequest) -> Result<String, GatewayError> {
        let stage = request.template_id.as_str().to_string();
        let url = format!("{}/chat/completions", self.base_url.trim_end_matches('/'));
        let body = serde_json::json!({
            "model": self.model,
            "temperature": self.temperature,
            "messages": [{"role": "user", "content": request.prompt}],
        });
        let client = reqwest::blocking::Client::new();
        let response = client
            .post(&url)
            .bearer_auth(&self.api_key)
            .json(&body)
            .send()
            .and_then(|r| r.error_for_status())
            .map_err(|e| GatewayError::Backend {
                stage: stage.clone(),
                detail: e.to_string(),
            })?;
        let value: serde_json::Value = response.json().map_err(|e| GatewayError::Backend {
            stage: stage.clone(),
            detail: e.to_string(),
        })?;
        let text = value["choices"][0]["message"]["content"]
            .as_str()
            .ok_or_else(|| GatewayError::Backend {
                stage: stage.clone(),
                detail: "response has no message content".into(),
            })?
            .to_string();
        if let Some(dir) = &self.capture_dir {
            let hash = prompt_hash(request.prompt);
            let _ = fs::create_dir_all(dir);
            let _ = fs::write(dir.join(format!("{}.txt", hash)), &text);
            let _ = fs::write(dir.join(format!("{}.prompt.txt", hash)), request.prompt);
        }
        Ok(text)
    }
}

/// Strips a surrounding markdown code fence, if any.
pub fn strip_code_fences(text: &str) -> &str {
    let trimmed = text.trim();
    if let Some(rest) = trimmed.strip_prefix("```") {
        let rest = match rest.find('\n') {
            Some(i) => &rest[i + 1..],
            None => rest,
        };
        if let Some(inner) = rest.trim_end().strip_suffix("```") {
            return inner.trim_matches('\n');
        }
    }
    trimmed
}

/// Parses floor-plan lines (`room | floor | wall | vertices`).
pub fn parse_floor_plan(raw: &str) -> Result<Vec<Room>, PlanParseError> {
    let mut rooms = Vec::new();
    for (i, line) in strip_code_fences(raw).lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        rooms.push(parse_room_line(line, i + 1)?);
    }
    Ok(rooms)
}

/// Parses a bare number, tolerating a trailing unit (`3.0 m`).
pub fn parse_wall_height(raw: &str) -> Result<f64, GatewayError> {
    let text = strip_code_fences(raw).trim();
    let token = text.split_whitespace().next().unwrap_or("");
    let token = token.strip_suffix('m').unwrap_or(token);
    let value: f64 = token
        .parse()
        .map_err(|_| GatewayError::WallHeightParse(raw.trim().to_string()))?;
    if !(value.is_finite() && value > 0.0) {
        return Err(GatewayError::WallHeightParse(raw.trim().to_string()));
    }
    Ok(value)
}

pub fn parse_doorways(raw: &str) -> Result<Vec<DoorSpec>, OpeningParseError> {
    let mut out = Vec::new();
    for (i, line) in strip_code_fences(raw).lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_door_line(line, i + 1)?);
    }
    Ok(out)
}

pub fn parse_windows(raw: &str) -> Result<Vec<WindowSpec>, OpeningParseError> {
    let mut out = Vec::new();
    for (i, line) in strip_code_fences(raw).lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        out.push(parse_window_line(line, i + 1)?);
    }
    Ok(out)
}

/// Parses the layout DSL into a scene graph. The prompt asks for a
/// natural-language strategy first, so everything before the first line
/// containing `|` is ignored.
pub fn parse_layout(raw: &str) -> Result<SceneGraph, DslError> {
    let text = strip_code_fences(raw);
    let body: Vec<&str> = match text.lines().position(|l| l.contains('|')) {
        Some(start) => text.lines().skip(start).collect(),
        None => text.lines().collect(),
    };
    parse_scene_graph(&body.join("\n"))
}

/// A child object riding on top of a selected object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChildSelection {
    pub name: String,
    pub quantity: u32,
    pub variance: VarianceType,
}

/// One selected object with its retrieval query and children.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectedObject {
    pub name: String,
    pub query: ObjectQuery,
    pub children: Vec<ChildSelection>,
}

/// Extracts the outermost braced block, skipping a natural-language
/// preamble; brace counting is string-aware.
fn outermost_braced(text: &str) -> Option<&str> {
    let start = text.find('{')?;
    let bytes = text.as_bytes();
    let mut depth = 0usize;
    let mut in_string = false;
    let mut escaped = false;
    for (i, &b) in bytes.iter().enumerate().skip(start) {
        if in_string {
            if escaped {
                escaped = false;
            } else if b == b'\\' {
                escaped = true;
            } else if b == b'"' {
                in_string = false;
            }
            continue;
        }
        match b {
            b'"' => in_string = true,
            b'{' => depth += 1,
            b'}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(&text[start..=i]);
                }
            }
            _ => {}
        }
    }
    None
}

fn json_u32(value: &serde_json::Value, what: &str) -> Result<u32, GatewayError> {
    value
        .as_u64()
        .and_then(|v| u32::try_from(v).ok())
        .filter(|v| *v >= 1)
        .ok_or_else(|| GatewayError::MalformedStructure(format!("bad {}: {}", what, value)))
}

fn json_str<'a>(value: &'a serde_json::Value, what: &str) -> Result<&'a str, GatewayError> {
    value
        .as_str()
        .ok_or_else(|| GatewayError::MalformedStructure(format!("bad {}: {}", what, value)))
}

/// Parses the object-selection response: a natural-language preamble
/// followed by a JSON object keyed by object name. Sizes arrive as
/// `[length, width, height]` cm and are canonicalized to (w, d, h).
pub fn parse_object_selection(raw: &str) -> Result<Vec<SelectedObject>, GatewayError> {
    let text = strip_code_fences(raw);
    let block = outermost_braced(text)
        .ok_or_else(|| GatewayError::MalformedStructure("no braced block found".into()))?;
    let value: serde_json::Value = serde_json::from_str(block)
        .map_err(|e| GatewayError::MalformedStructure(e.to_string()))?;
    let map = value
        .as_object()
        .ok_or_else(|| GatewayError::MalformedStructure("top level is not an object".into()))?;

    let mut out = Vec::new();
    for (name, entry) in map {
        let obj = entry.as_object().ok_or_else(|| {
            GatewayError::MalformedStructure(format!("entry '{}' is not an object", name))
        })?;
        let field = |key: &str| {
            obj.get(key).ok_or_else(|| {
                GatewayError::MalformedStructure(format!("entry '{}' is missing '{}'", name, key))
            })
        };
        let description = json_str(field("description")?, "description")?.to_string();
        let location_str = json_str(field("location")?, "location")?;
        let location = Location::parse(location_str).ok_or_else(|| {
            GatewayError::MalformedStructure(format!("bad location '{}'", location_str))
        })?;
        let size = field("size")?
            .as_array()
            .filter(|a| a.len() == 3)
            .ok_or_else(|| {
                GatewayError::MalformedStructure(format!(
                    "entry '{}' size must be [length, width, height]",
                    name
                ))
            })?;
        let dim = |i: usize| -> Result<f64, GatewayError> {
            size[i].as_f64().filter(|v| *v > 0.0).ok_or_else(|| {
                GatewayError::MalformedStructure(format!("entry '{}' has a bad size value", name))
            })
        };
        let (length, width, height) = (dim(0)?, dim(1)?, dim(2)?);
        let quantity = json_u32(field("quantity")?, "quantity")?;
        let variance_str = json_str(field("variance_type")?, "variance_type")?;
        let variance = VarianceType::parse(variance_str).ok_or_else(|| {
            GatewayError::MalformedStructure(format!("bad variance_type '{}'", variance_str))
        })?;
        let mut children = Vec::new();
        if let Some(tops) = obj.get("objects_on_top") {
            let arr = tops.as_array().ok_or_else(|| {
                GatewayError::MalformedStructure(format!(
                    "entry '{}' objects_on_top must be a list",
                    name
                ))
            })?;
            for child in arr {
                let cobj = child.as_object().ok_or_else(|| {
                    GatewayError::MalformedStructure("child entry is not an object".into())
                })?;
                let cfield = |key: &str| {
                    cobj.get(key).ok_or_else(|| {
                        GatewayError::MalformedStructure(format!("child is missing '{}'", key))
                    })
                };
                let cname = json_str(cfield("object_name")?, "object_name")?.to_string();
                let cquantity = json_u32(cfield("quantity")?, "quantity")?;
                let cvariance_str = json_str(cfield("variance_type")?, "variance_type")?;
                let cvariance = VarianceType::parse(cvariance_str).ok_or_else(|| {
                    GatewayError::MalformedStructure(format!(
                        "bad child variance_type '{}'",
                        cvariance_str
                    ))
                })?;
                children.push(ChildSelection {
                    name: cname,
                    quantity: cquantity,
                    variance: cvariance,
                });
            }
        }
        out.push(SelectedObject {
            name: name.clone(),
            query: ObjectQuery {
                description,
                // [length, width, height] -> (w, d, h): length is depth.
                target_dims_cm: (width, length, height),
                location,
                quantity,
                variance,
            },
            children,
        });
    }
    Ok(out)
}

/// A wall-object directive: hang `object` above `above` at `height_cm`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallDirective {
    pub object: String,
    pub above: String,
    pub height_cm: f64,
}

/// A small-object directive: put `quantity` copies of `object` on `parent`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmallDirective {
    pub object: String,
    pub parent: String,
    pub quantity: u32,
}

/// Parses wall/small placement lines:
/// `obj | above, floor-obj | height, cm` or `obj | on, parent | quantity, n`.
pub fn parse_wall_small(
    raw: &str,
) -> Result<(Vec<WallDirective>, Vec<SmallDirective>), GatewayError> {
    let mut walls = Vec::new();
    let mut smalls = Vec::new();
    for (i, line) in strip_code_fences(raw).lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let malformed = || GatewayError::MalformedDirective {
            lineno,
            line: line.to_string(),
        };
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        if fields.len() != 3 {
            return Err(malformed());
        }
        let object = fields[0].to_string();
        if object.is_empty() {
            return Err(malformed());
        }
        let (kind, target) = fields[1].split_once(',').ok_or_else(malformed)?;
        let (attr, value) = fields[2].split_once(',').ok_or_else(malformed)?;
        let target = target.trim().to_string();
        match (kind.trim(), attr.trim()) {
            ("above", "height") => {
                let height_cm: f64 = value.trim().parse().map_err(|_| malformed())?;
                walls.push(WallDirective {
                    object,
                    above: target,
                    height_cm,
                });
            }
            ("on", "quantity") => {
                let quantity: u32 = value.trim().parse().map_err(|_| malformed())?;
                if quantity == 0 {
                    return Err(malformed());
                }
                smalls.push(SmallDirective {
                    object,
                    parent: target,
                    quantity,
                });
            }
            _ => return Err(malformed()),
        }
    }
    Ok((walls, smalls))
}

/// What a successful run returns: the scene, the call transcript, and the
/// per-instance footprint dimensions used for rendering.
pub type PipelineOutput = (SceneDocument, GatewayTranscript, BTreeMap<String, (f64, f64)>);

/// One gateway exchange.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CallRecord {
    pub template_id: TemplateId,
    pub room: Option<String>,
    pub rendered_prompt: String,
    pub raw_response: String,
    pub parse_summary: String,
}

/// The ordered log of every call a pipeline run made.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct GatewayTranscript {
    pub calls: Vec<CallRecord>,
}

impl GatewayTranscript {
    pub fn total_calls(&self) -> usize {
        self.calls.len()
    }

    pub fn call_count(&self, template_id: TemplateId) -> usize {
        self.calls
            .iter()
            .filter(|c| c.template_id == template_id)
            .count()
    }

    /// Human-readable transcript dump; deterministic.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (i, call) in self.calls.iter().enumerate() {
            out.push_str(&format!(
                "=== call {} | {}{} ===\n",
                i + 1,
                call.template_id.as_str(),
                call.room
                    .as_deref()
                    .map(|r| format!(" | {}", r))
                    .unwrap_or_default()
            ));
            out.push_str("--- prompt ---\n");
            out.push_str(&call.rendered_prompt);
            out.push_str("\n--- response ---\n");
            out.push_str(&call.raw_response);
            out.push_str("\n--- parsed ---\n");
            out.push_str(&call.parse_summary);
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Gateway(#[from] GatewayError),
    #[error("floor plan response: {0}")]
    Plan(#[from] PlanParseError),
    #[error("floor plan is invalid: {0}")]
    PlanInvalid(String),
    #[error("opening response: {0}")]
    OpeningParse(#[from] OpeningParseError),
    #[error(transparent)]
    Openings(#[from] OpeningsError),
    #[error("layout response: {0}")]
    Dsl(#[from] DslError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Retrieval(#[from] RetrievalError),
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error("room '{room}': layout graph names '{object}' which is not a floor object")]
    LayoutMismatch { room: String, object: String },
    #[error("room '{room}': directive references unknown instance '{object}'")]
    UnknownInstance { room: String, object: String },
}

/// A pipeline abort: the error plus every call made up to the failure, so
/// fixture gaps and bad responses stay auditable.
#[derive(Debug)]
pub struct PipelineFailure {
    pub error: PipelineError,
    pub transcript: GatewayTranscript,
}

impl std::fmt::Display for PipelineFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (after {} calls)", self.error, self.transcript.total_calls())
    }
}

impl std::error::Error for PipelineFailure {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.error)
    }
}

/// Knobs for a pipeline run.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineConfig {
    pub params: PredicateParams,
    pub grid_step_m: f64,
    pub budget: Budget,
    /// Rooms are independent given the floor plan; values above 1 solve
    /// them on worker threads. The result is identical either way.
    pub threads: usize,
    pub door_height_m: f64,
    pub weights: MatchWeights,
    pub generator: String,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            params: PredicateParams::default(),
            grid_step_m: 0.25,
            budget: Budget::default(),
            threads: 1,
            door_height_m: 2.0,
            weights: MatchWeights::default(),
            generator: format!("scenegen {}", env!("CARGO_PKG_VERSION")),
        }
    }
}

/// SplitMix64 step; decorrelates per-room seeds from the run seed.
fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ 0x9E3779B97F4A7C15u64.wrapping_mul(index.wrapping_add(1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

/// The orchestrator: house-level calls, then three calls per room, with
/// every stage validated by its module before the next call goes out.
pub struct Pipeline<'a> {
    pub backend: &'a dyn Backend,
    pub catalog: &'a Catalog,
    pub materials: &'a MaterialCatalog,
    pub provider: &'a dyn SimilarityProvider,
    pub config: PipelineConfig,
}

/// Everything one room contributes to the final document; the room's call
/// records travel separately so they survive mid-room failures.
struct RoomOutput {
    objects: Vec<PlacedObject>,
    /// instance id -> (w, d) meters, for rendering.
    dims: Vec<(String, (f64, f64))>,
}

impl<'a> Pipeline<'a> {
    fn call(
        &self,
        template_id: TemplateId,
        room: Option<&str>,
        prompt: String,
    ) -> Result<(String, CallRecord), PipelineError> {
        let response = self.backend.complete(&PromptRequest {
            template_id,
            room,
            prompt: &prompt,
        })?;
        let record = CallRecord {
            template_id,
            room: room.map(str::to_string),
            rendered_prompt: prompt,
            raw_response: response.clone(),
            parse_summary: String::new(),
        };
        Ok((response, record))
    }

    fn asset_footprint_m(asset: &AssetRecord) -> (f64, f64) {
        (asset.dims_cm.0 / 100.0, asset.dims_cm.1 / 100.0)
    }

    #[allow(clippy::too_many_arguments)]
    fn run_room(
        &self,
        input: &str,
        requirements: &str,
        plan: &FloorPlan,
        doors: &[PlacedDoor],
        windows: &[PlacedWindow],
        index: usize,
        seed: u64,
        calls: &mut Vec<CallRecord>,
    ) -> Result<RoomOutput, PipelineError> {
        let room = &plan.rooms[index];
        let bounds = room.bounds();
        let room_seed = derive_seed(seed, index as u64);
        let mut notes = Vec::new();

        // Call 1: object selection.
        let room_size = format!(
            "{} m x {} m",
            crate::floorplan::format_coord(bounds.width()),
            crate::floorplan::format_coord(bounds.height())
        );
        let mut bindings = BTreeMap::new();
        bindings.insert("input", input.to_string());
        bindings.insert("room_type", room.room_type.clone());
        bindings.insert("room_size", room_size.clone());
        bindings.insert("additional_requirements", requirements.to_string());
        let prompt = render(TemplateId::ObjectSelection, &bindings)?;
        let (response, mut record) = self.call(TemplateId::ObjectSelection, Some(&room.name), prompt)?;
        let selections = parse_object_selection(&response)?;
        record.parse_summary = format!("ok: {} object types", selections.len());
        calls.push(record);

        // Retrieval: floor/wall/ceiling instances, with children pending.
        let mut floor_instances: Vec<(String, &AssetRecord)> = Vec::new();
        let mut wall_instances: Vec<(String, &AssetRecord)> = Vec::new();
        let mut ceiling_instances: Vec<(String, &AssetRecord)> = Vec::new();
        let mut child_queries: BTreeMap<String, ChildSelection> = BTreeMap::new();
        for sel in &selections {
            let assets = assets_for_query(self.catalog, &sel.query, self.provider, &self.config.weights)?;
            for (i, asset) in assets.iter().enumerate() {
                let instance = format!("{}-{}", sel.name, i);
                match sel.query.location {
                    Location::Floor => floor_instances.push((instance, asset)),
                    Location::Wall => wall_instances.push((instance, asset)),
                    Location::Ceiling => ceiling_instances.push((instance, asset)),
                    Location::OnObject => child_queries.insert(
                        sel.name.clone(),
                        ChildSelection {
                            name: sel.name.clone(),
                            quantity: sel.query.quantity,
                            variance: sel.query.variance,
                        },
                    ).map_or((), |_| ()),
                }
            }
            for child in &sel.children {
                child_queries.entry(child.name.clone()).or_insert_with(|| child.clone());
            }
        }

        // Call 2: layout constraints for the floor objects.
        let object_lines: Vec<String> = floor_instances
            .iter()
            .map(|(id, a)| {
                format!(
                    "{}: {} x {} x {} (cm)",
                    id,
                    crate::floorplan::format_coord(a.dims_cm.0),
                    crate::floorplan::format_coord(a.dims_cm.1),
                    crate::floorplan::format_coord(a.dims_cm.2)
                )
            })
            .collect();
        let mut bindings = BTreeMap::new();
        bindings.insert("room_type", room.room_type.clone());
        bindings.insert("room_size", room_size.clone());
        bindings.insert("objects", object_lines.join("\n"));
        let prompt = render(TemplateId::Layout, &bindings)?;
        let (response, mut record) = self.call(TemplateId::Layout, Some(&room.name), prompt)?;
        let graph = parse_layout(&response)?;
        record.parse_summary = format!(
            "ok: {} specs, {} constraints",
            graph.specs.len(),
            graph.in_plane_constraint_count()
        );
        calls.push(record);

        for spec in &graph.specs {
            if !floor_instances.iter().any(|(id, _)| id == &spec.object_id) {
                return Err(PipelineError::LayoutMismatch {
                    room: room.name.clone(),
                    object: spec.object_id.clone(),
                });
            }
        }

        // Solve the floor layout.
        let objects: Vec<ObjectDims> = graph
            .specs
            .iter()
            .map(|spec| {
                let (_, asset) = floor_instances
                    .iter()
                    .find(|(id, _)| id == &spec.object_id)
                    .expect("validated above");
                let (w, d) = Self::asset_footprint_m(asset);
                ObjectDims::new(spec.object_id.clone(), w, d)
            })
            .collect();
        let problem = PlacementProblem {
            room: bounds,
            objects,
            graph: graph.clone(),
            params: self.config.params,
            grid_step_m: self.config.grid_step_m,
            budget: self.config.budget,
        };
        let layout = solve_dfs(&problem, room_seed)?;
        notes.extend(layout.diagnostics.notes.iter().cloned());
        for dropped in &layout.diagnostics.dropped {
            notes.push(format!("dropped floor object '{}'", dropped));
        }

        let mut objects_out: Vec<PlacedObject> = Vec::new();
        let mut dims_out: Vec<(String, (f64, f64))> = Vec::new();
        let mut footprints: BTreeMap<String, Footprint> = BTreeMap::new();
        let mut heights_m: BTreeMap<String, f64> = BTreeMap::new();
        for spec in &graph.specs {
            let Some(fp) = layout.placements.get(&spec.object_id) else {
                continue;
            };
            let (_, asset) = floor_instances
                .iter()
                .find(|(id, _)| id == &spec.object_id)
                .unwrap();
            objects_out.push(PlacedObject {
                instance_id: spec.object_id.clone(),
                asset_id: asset.asset_id.clone(),
                room: room.name.clone(),
                kind: ObjectKind::Floor,
                position: (fp.center.x, fp.center.y, 0.0),
                yaw_deg: fp.yaw.degrees(),
                parent: None,
            });
            dims_out.push((spec.object_id.clone(), (fp.width, fp.depth)));
            footprints.insert(spec.object_id.clone(), *fp);
            heights_m.insert(spec.object_id.clone(), asset.dims_cm.2 / 100.0);
        }

        // Call 3: wall and small object placement.
        let placed_lines: Vec<String> = objects_out
            .iter()
            .map(|o| o.instance_id.clone())
            .collect();
        let mut pending_lines: Vec<String> = wall_instances
            .iter()
            .map(|(id, _)| format!("{} (wall)", id))
            .collect();
        pending_lines.extend(child_queries.keys().map(|name| format!("{} (small)", name)));
        let mut bindings = BTreeMap::new();
        bindings.insert("room_type", room.room_type.clone());
        bindings.insert("objects", placed_lines.join("\n"));
        bindings.insert(
            "pending",
            if pending_lines.is_empty() {
                "none".to_string()
            } else {
                pending_lines.join("\n")
            },
        );
        let prompt = render(TemplateId::WallSmall, &bindings)?;
        let (response, mut record) = self.call(TemplateId::WallSmall, Some(&room.name), prompt)?;
        let (wall_directives, small_directives) = parse_wall_small(&response)?;
        record.parse_summary = format!(
            "ok: {} wall, {} small directives",
            wall_directives.len(),
            small_directives.len()
        );
        calls.push(record);

        // Openings on this room's walls constrain wall objects.
        let opening_intervals: Vec<crate::openings::OpeningInterval> = doors
            .iter()
            .map(|d| d.interval())
            .chain(windows.iter().map(|w| w.interval()))
            .collect();

        for directive in &wall_directives {
            let Some((_, asset)) = wall_instances.iter().find(|(id, _)| id == &directive.object)
            else {
                return Err(PipelineError::UnknownInstance {
                    room: room.name.clone(),
                    object: directive.object.clone(),
                });
            };
            let Some(above) = objects_out
                .iter()
                .find(|o| o.instance_id == directive.above)
                .cloned()
            else {
                notes.push(format!(
                    "skipped wall object '{}': parent '{}' was not placed",
                    directive.object, directive.above
                ));
                continue;
            };
            let parent_fp = footprints[&directive.above];
            let (w_m, _) = Self::asset_footprint_m(asset);
            match place_wall_object(
                &directive.object,
                &asset.asset_id,
                w_m,
                &above,
                &parent_fp,
                directive.height_cm,
                &bounds,
                self.config.params.edge_max_wall_gap_m,
                &opening_intervals,
            ) {
                Ok(placed) => {
                    dims_out.push((directive.object.clone(), (w_m, 0.08)));
                    objects_out.push(placed);
                }
                Err(e) => notes.push(format!("skipped wall object '{}': {}", directive.object, e)),
            }
        }

        let mut small_counter = 0u64;
        let mut name_counters: BTreeMap<String, u32> = BTreeMap::new();
        for directive in &small_directives {
            let selection = child_queries.get(&directive.object).cloned().unwrap_or(
                ChildSelection {
                    name: directive.object.clone(),
                    quantity: directive.quantity,
                    variance: VarianceType::Varied,
                },
            );
            let Some(parent) = objects_out
                .iter()
                .find(|o| o.instance_id == directive.parent)
                .cloned()
            else {
                notes.push(format!(
                    "skipped small object '{}': parent '{}' was not placed",
                    directive.object, directive.parent
                ));
                continue;
            };
            let query = ObjectQuery {
                description: selection.name.clone(),
                target_dims_cm: (20.0, 15.0, 20.0),
                location: Location::OnObject,
                quantity: directive.quantity,
                variance: selection.variance,
            };
            let assets = assets_for_query(self.catalog, &query, self.provider, &self.config.weights)?;
            // Number instances per base name across directives, so two
            // directives for the same object kind never mint the same id.
            let first_index = *name_counters.get(&directive.object).unwrap_or(&0);
            name_counters.insert(directive.object.clone(), first_index + directive.quantity);
            let children: Vec<SmallChild> = assets
                .iter()
                .enumerate()
                .map(|(i, asset)| {
                    let (w, d) = Self::asset_footprint_m(asset);
                    SmallChild {
                        instance_id: format!("{}-{}", directive.object, first_index + i as u32),
                        asset_id: asset.asset_id.clone(),
                        width_m: w,
                        depth_m: d,
                    }
                })
                .collect();
            let parent_fp = footprints[&directive.parent];
            let parent_height = heights_m[&directive.parent];
            small_counter += 1;
            let (placed, dropped) = spawn_small_objects(
                &parent,
                &parent_fp.aabb(),
                parent_height,
                &children,
                derive_seed(room_seed, 1000 + small_counter),
            );
            for child in &children {
                if placed.iter().any(|p| p.instance_id == child.instance_id) {
                    dims_out.push((child.instance_id.clone(), (child.width_m, child.depth_m)));
                }
            }
            for d in dropped {
                notes.push(format!("dropped small object '{}': does not fit", d));
            }
            objects_out.extend(placed);
        }

        // Ceiling objects: one per room at the center, extras skipped.
        for (i, (instance, asset)) in ceiling_instances.iter().enumerate() {
            if i > 0 {
                notes.push(format!("skipped extra ceiling object '{}'", instance));
                continue;
            }
            let center = bounds.center();
            let (w, d) = Self::asset_footprint_m(asset);
            dims_out.push((instance.clone(), (w, d)));
            objects_out.push(PlacedObject {
                instance_id: instance.clone(),
                asset_id: asset.asset_id.clone(),
                room: room.name.clone(),
                kind: ObjectKind::Ceiling,
                position: (center.x, center.y, plan.wall_height),
                yaw_deg: 0,
                parent: None,
            });
        }

        if !notes.is_empty() {
            if let Some(last) = calls.last_mut() {
                last.parse_summary = format!("{}; notes: {}", last.parse_summary, notes.join(" / "));
            }
        }
        Ok(RoomOutput {
            objects: objects_out,
            dims: dims_out,
        })
    }

    /// Runs the whole pipeline: 3 house-level calls, then 3 calls per room.
    /// Returns the assembled scene document and the full transcript, plus
    /// per-instance footprint dimensions for rendering. On failure the
    /// returned [`PipelineFailure`] carries the transcript up to the abort.
    pub fn run(
        &self,
        input: &str,
        requirements: &str,
        seed: u64,
    ) -> Result<PipelineOutput, Box<PipelineFailure>> {
        let mut transcript = GatewayTranscript::default();
        match self.run_inner(input, requirements, seed, &mut transcript) {
            Ok((doc, dims)) => Ok((doc, transcript, dims)),
            Err(error) => Err(Box::new(PipelineFailure { error, transcript })),
        }
    }

    #[allow(clippy::type_complexity)]
    fn run_inner(
        &self,
        input: &str,
        requirements: &str,
        seed: u64,
        transcript: &mut GatewayTranscript,
    ) -> Result<(SceneDocument, BTreeMap<String, (f64, f64)>), PipelineError> {
        // House call 1: floor plan with the wall-height question folded in.
        let mut bindings = BTreeMap::new();
        bindings.insert("input", input.to_string());
        bindings.insert("additional_requirements", requirements.to_string());
        let plan_prompt = render(TemplateId::FloorPlan, &bindings)?;
        let mut wh_bindings = BTreeMap::new();
        wh_bindings.insert("input", input.to_string());
        let wh_prompt = render(TemplateId::WallHeight, &wh_bindings)?;
        let prompt = format!("{}\n\n{}", plan_prompt, wh_prompt);
        let (response, mut record) = self.call(TemplateId::FloorPlan, None, prompt)?;

        // The response carries room lines followed by one wall-height line.
        let body = strip_code_fences(&response);
        let nonblank: Vec<&str> = body.lines().filter(|l| !l.trim().is_empty()).collect();
        let (room_lines, height_line) = match nonblank.split_last() {
            Some((last, rest)) => (rest.to_vec(), *last),
            None => (Vec::new(), ""),
        };
        let wall_height = parse_wall_height(height_line)?;
        let rooms = parse_floor_plan(&room_lines.join("\n"))?;
        let plan = FloorPlan::new(rooms, wall_height);
        let report = validate_plan(&plan);
        if !report.is_valid() {
            let summary: Vec<String> = report.errors().map(|f| f.message.clone()).collect();
            return Err(PipelineError::PlanInvalid(summary.join("; ")));
        }
        record.parse_summary = format!(
            "ok: {} rooms, wall height {} m",
            plan.rooms.len(),
            wall_height
        );
        transcript.calls.push(record);

        // House call 2: doorways.
        let names: Vec<&str> = plan.rooms.iter().map(|r| r.name.as_str()).collect();
        let sizes: Vec<String> = plan
            .rooms
            .iter()
            .map(|r| {
                let b = r.bounds();
                format!(
                    "{}: {} m x {} m x {} m",
                    r.name,
                    crate::floorplan::format_coord(b.width()),
                    crate::floorplan::format_coord(b.height()),
                    crate::floorplan::format_coord(plan.wall_height)
                )
            })
            .collect();
        let pairs: Vec<String> = shared_walls(&plan)
            .iter()
            .map(|sw| format!("({}, {})", sw.room_a, sw.room_b))
            .collect();
        let mut bindings = BTreeMap::new();
        bindings.insert("input", input.to_string());
        bindings.insert("rooms", names.join(", "));
        bindings.insert("room_sizes", sizes.join("\n"));
        bindings.insert(
            "room_pairs",
            if pairs.is_empty() { "none".to_string() } else { pairs.join(", ") },
        );
        bindings.insert("additional_requirements", requirements.to_string());
        let prompt = render(TemplateId::Doorway, &bindings)?;
        let (response, mut record) = self.call(TemplateId::Doorway, None, prompt)?;
        let door_specs = parse_doorways(&response)?;
        let mut doors = place_doors(&plan, &door_specs, self.config.door_height_m)?;
        for door in &mut doors {
            if let Some(style) = &door.spec.style_query {
                door.asset_id = Some(select_door_asset(style, self.provider));
            }
        }
        record.parse_summary = format!("ok: {} doors placed", doors.len());
        transcript.calls.push(record);

        // House call 3: windows.
        let wall_lines: Vec<String> = {
            let ext = exterior_walls(&plan);
            plan.rooms
                .iter()
                .map(|r| {
                    let mine: Vec<String> = ext
                        .iter()
                        .filter(|w| w.room_name == r.name)
                        .map(|w| {
                            format!(
                                "{} ({} cm)",
                                w.direction.as_str(),
                                (w.length() * 100.0).round() as i64
                            )
                        })
                        .collect();
                    format!("{}: {}", r.name, mine.join(", "))
                })
                .collect()
        };
        let mut bindings = BTreeMap::new();
        bindings.insert("input", input.to_string());
        bindings.insert(
            "wall_height",
            format!("{}", (plan.wall_height * 100.0).round() as i64),
        );
        bindings.insert("walls", wall_lines.join("\n"));
        bindings.insert("additional_requirements", requirements.to_string());
        let prompt = render(TemplateId::Window, &bindings)?;
        let (response, mut record) = self.call(TemplateId::Window, None, prompt)?;
        let window_specs = parse_windows(&response)?;
        let windows = place_windows(&plan, &window_specs, &doors)?;
        record.parse_summary = format!("ok: {} windows placed", windows.len());
        transcript.calls.push(record);

        // Per-room calls; rooms are independent and may run on workers. Each
        // room's result pairs with its call log so the transcript stays
        // complete up to any failure.
        let indices: Vec<usize> = (0..plan.rooms.len()).collect();
        type RoomResult = (Result<RoomOutput, PipelineError>, Vec<CallRecord>);
        let results: Vec<RoomResult> = if self.config.threads > 1 && indices.len() > 1 {
            let mut slots: Vec<Option<RoomResult>> = (0..indices.len()).map(|_| None).collect();
            std::thread::scope(|scope| {
                let chunks: Vec<Vec<usize>> = indices
                    .chunks(indices.len().div_ceil(self.config.threads))
                    .map(|c| c.to_vec())
                    .collect();
                let mut handles = Vec::new();
                for chunk in chunks {
                    let plan_ref = &plan;
                    let doors_ref = &doors;
                    let windows_ref = &windows;
                    handles.push(scope.spawn(move || {
                        chunk
                            .into_iter()
                            .map(|i| {
                                let mut calls = Vec::new();
                                let result = self.run_room(
                                    input,
                                    requirements,
                                    plan_ref,
                                    doors_ref,
                                    windows_ref,
                                    i,
                                    seed,
                                    &mut calls,
                                );
                                (i, (result, calls))
                            })
                            .collect::<Vec<_>>()
                    }));
                }
                for handle in handles {
                    for (i, result) in handle.join().expect("room worker panicked") {
                        slots[i] = Some(result);
                    }
                }
            });
            slots.into_iter().map(|r| r.expect("every room processed")).collect()
        } else {
            let mut out = Vec::new();
            for i in indices {
                let mut calls = Vec::new();
                let result =
                    self.run_room(input, requirements, &plan, &doors, &windows, i, seed, &mut calls);
                let failed = result.is_err();
                out.push((result, calls));
                if failed {
                    break;
                }
            }
            out
        };

        // Merge rooms in plan order. Instance ids are unique within a room;
        // across rooms a repeated name (say two bedrooms both placing
        // bed-0) gets qualified with its room name.
        let mut objects: Vec<PlacedObject> = Vec::new();
        let mut dims = BTreeMap::new();
        let mut used_ids: std::collections::BTreeSet<String> = std::collections::BTreeSet::new();
        for (result, mut calls) in results {
            transcript.calls.append(&mut calls);
            let mut output = result?;
            let mut renames: BTreeMap<String, String> = BTreeMap::new();
            for o in &output.objects {
                if used_ids.contains(&o.instance_id) {
                    renames.insert(
                        o.instance_id.clone(),
                        format!("{}@{}", o.instance_id, o.room),
                    );
                }
            }
            for mut o in output.objects.drain(..) {
                if let Some(new_id) = renames.get(&o.instance_id) {
                    o.instance_id = new_id.clone();
                }
                if let Some(parent) = &o.parent {
                    if let Some(new_parent) = renames.get(parent) {
                        o.parent = Some(new_parent.clone());
                    }
                }
                used_ids.insert(o.instance_id.clone());
                objects.push(o);
            }
            for (id, d) in output.dims.drain(..) {
                let id = renames.get(&id).cloned().unwrap_or(id);
                dims.insert(id, d);
            }
        }

        let materials: Vec<RoomMaterials> = plan
            .rooms
            .iter()
            .map(|r| RoomMaterials {
                room: r.name.clone(),
                floor: select_material(&r.floor_material, self.materials, self.provider),
                wall: select_material(&r.wall_material, self.materials, self.provider),
            })
            .collect();

        let mut doc = SceneDocument {
            metadata: SceneMetadata {
                prompt: input.to_string(),
                seed,
                generator: self.config.generator.clone(),
            },
            plan,
            materials,
            doors,
            windows,
            objects,
        };
        doc.finalize();

        debug_assert_eq!(
            transcript.total_calls(),
            3 + 3 * doc.plan.rooms.len(),
            "call budget must be 3 + 3k"
        );
        Ok((doc, dims))
    }
}

/// Footprints of the floor objects in a document, for hard-constraint
/// checks: instance id -> footprint reconstructed from position and dims.
pub fn floor_footprints(
    doc: &SceneDocument,
    dims: &BTreeMap<String, (f64, f64)>,
) -> BTreeMap<String, Footprint> {
    let mut out = BTreeMap::new();
    for o in &doc.objects {
        if o.kind != ObjectKind::Floor {
            continue;
        }
        let Some(&(w, d)) = dims.get(&o.instance_id) else {
            continue;
        };
        let yaw = Yaw::from_degrees(o.yaw_deg).unwrap_or(Yaw::Deg0);
        out.insert(
            o.instance_id.clone(),
            Footprint::new(Point2::new(o.position.0, o.position.1), w, d, yaw),
        );
    }
    out
}

/// Convenience wrapper matching the documented operation name.
#[allow(clippy::too_many_arguments)]
pub fn run_pipeline(
    input: &str,
    requirements: &str,
    backend: &dyn Backend,
    catalog: &Catalog,
    materials: &MaterialCatalog,
    provider: &dyn SimilarityProvider,
    config: PipelineConfig,
    seed: u64,
) -> Result<PipelineOutput, Box<PipelineFailure>> {
    Pipeline {
        backend,
        catalog,
        materials,
        provider,
        config,
    }
    .run(input, requirements, seed)
}

/// Runs the pipeline against a [`ScriptBackend`] while recording hash-keyed
/// fixture files into `out_dir`, then verifies the recorded fixtures replay.
#[allow(clippy::too_many_arguments)]
pub fn record_fixtures(
    script_dir: &Path,
    out_dir: &Path,
    input: &str,
    requirements: &str,
    catalog: &Catalog,
    materials: &MaterialCatalog,
    provider: &dyn SimilarityProvider,
    config: PipelineConfig,
    seed: u64,
) -> Result<(SceneDocument, GatewayTranscript), Box<PipelineFailure>> {
    fs::create_dir_all(out_dir).map_err(|e| {
        Box::new(PipelineFailure {
            error: PipelineError::Gateway(GatewayError::Backend {
                stage: "record".into(),
                detail: e.to_string(),
            }),
            transcript: GatewayTranscript::default(),
        })
    })?;
    let backend = ScriptBackend::recording_to(script_dir, out_dir);
    let (doc, transcript, _) = run_pipeline(
        input,
        requirements,
        &backend,
        catalog,
        materials,
        provider,
        config,
        seed,
    )?;
    Ok((doc, transcript))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_bindings() -> BTreeMap<&'static str, String> {
        let mut b = BTreeMap::new();
        b.insert("input", "a 1b1b apartment".to_string());
        b.insert("additional_requirements", "N/A".to_string());
        b
    }

    #[test]
    fn floor_plan_render_includes_guidelines() {
        let text = render(TemplateId::FloorPlan, &base_bindings()).unwrap();
        assert!(text.contains("size range (length or width) is 3m to 8m"));
        assert!(text.contains("Now, I need a design for a 1b1b apartment."));
        assert!(text.contains("Additional requirements: N/A."));
    }

    #[test]
    fn render_is_deterministic() {
        let a = render(TemplateId::FloorPlan, &base_bindings()).unwrap();
        let b = render(TemplateId::FloorPlan, &base_bindings()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unbound_placeholder_fails() {
        let mut b = BTreeMap::new();
        b.insert("input", "a loft".to_string());
        b.insert("additional_requirements", "N/A".to_string());
        let err = render(TemplateId::Window, &b).unwrap_err();
        assert!(matches!(err, GatewayError::MissingPlaceholder { .. }));
    }

    #[test]
    fn json_braces_in_templates_are_not_placeholders() {
        let mut b = BTreeMap::new();
        b.insert("input", "a study".to_string());
        b.insert("room_type", "study".to_string());
        b.insert("room_size", "4 m x 4 m".to_string());
        b.insert("additional_requirements", "N/A".to_string());
        let text = render(TemplateId::ObjectSelection, &b).unwrap();
        assert!(text.contains("\"object_name\""));
    }

    #[test]
    fn parse_floor_plan_reference_line() {
        let raw = "living room | maple hardwood, matte | light grey drywall, smooth | [(0, 0), (0, 8), (5, 8), (5, 0)]";
        let rooms = parse_floor_plan(raw).unwrap();
        assert_eq!(rooms.len(), 1);
        let b = rooms[0].bounds();
        assert_eq!((b.width(), b.height()), (5.0, 8.0));
    }

    #[test]
    fn parse_floor_plan_rejects_three_fields() {
        assert!(parse_floor_plan("a | b | [(0,0), (0,1), (1,1), (1,0)]").is_err());
    }

    #[test]
    fn wall_height_parsing() {
        assert_eq!(parse_wall_height("3.0").unwrap(), 3.0);
        assert_eq!(parse_wall_height("3.0 m").unwrap(), 3.0);
        assert_eq!(parse_wall_height("2.8m").unwrap(), 2.8);
        assert!(parse_wall_height("tall").is_err());
        assert!(parse_wall_height("-2").is_err());
    }

    #[test]
    fn parse_doorways_reference_lines() {
        let raw = "\
exterior | living room | doorway | double | dark brown metal door
living room | kitchen | open | N/A | N/A";
        let doors = parse_doorways(raw).unwrap();
        assert_eq!(doors.len(), 2);
        assert_eq!(doors[1].connection, crate::openings::ConnectionType::Open);
        assert!(doors[1].size.is_none());
    }

    #[test]
    fn parse_windows_reference_line() {
        let raw = "living room | west | fixed | (130, 130) | 1 | 50";
        let windows = parse_windows(raw).unwrap();
        assert_eq!(windows[0].size_cm, (130, 130));
    }

    #[test]
    fn object_selection_tolerates_preamble_and_fences() {
        let raw = r#"My strategy is to keep the study focused and cozy.

```json
{
    "desk": {
        "description": "a sturdy oak desk",
        "location": "floor",
        "size": [140, 70, 75],
        "quantity": 1,
        "variance_type": "same",
        "objects_on_top": [{"object_name": "lamp", "quantity": 1, "variance_type": "same"}]
    }
}
```"#;
        let objects = parse_object_selection(raw).unwrap();
        assert_eq!(objects.len(), 1);
        let desk = &objects[0];
        assert_eq!(desk.name, "desk");
        // [length, width, height] canonicalizes to (w, d, h).
        assert_eq!(desk.query.target_dims_cm, (70.0, 140.0, 75.0));
        assert_eq!(desk.children.len(), 1);
        assert_eq!(desk.children[0].name, "lamp");
    }

    #[test]
    fn object_selection_rejects_missing_fields() {
        for missing in ["description", "location", "size", "quantity", "variance_type"] {
            let mut entry = serde_json::json!({
                "description": "a chair",
                "location": "floor",
                "size": [45, 45, 90],
                "quantity": 1,
                "variance_type": "same",
            });
            entry.as_object_mut().unwrap().remove(missing);
            let raw = serde_json::json!({ "chair": entry }).to_string();
            assert!(
                parse_object_selection(&raw).is_err(),
                "missing '{}' should fail",
                missing
            );
        }
    }

    #[test]
    fn layout_parse_delegates_to_the_dsl() {
        let graph = parse_layout("sofa-0 | edge\ncoffee table-0 | middle | near, sofa-0").unwrap();
        assert_eq!(graph.specs.len(), 2);
    }

    #[test]
    fn wall_small_directives_parse() {
        let raw = "\
painting-0 | above, sofa-0 | height, 150
book | on, coffee table-0 | quantity, 2";
        let (walls, smalls) = parse_wall_small(raw).unwrap();
        assert_eq!(walls.len(), 1);
        assert_eq!(walls[0].height_cm, 150.0);
        assert_eq!(smalls[0].quantity, 2);
        assert!(parse_wall_small("thing | beside, x | height, 10").is_err());
    }

    #[test]
    fn fixture_backend_misses_loudly() {
        let dir = tempfile::tempdir().unwrap();
        let backend = FixtureBackend::new(dir.path());
        let err = backend
            .complete(&PromptRequest {
                template_id: TemplateId::Layout,
                room: Some("den"),
                prompt: "anything",
            })
            .unwrap_err();
        assert!(matches!(err, GatewayError::FixtureMiss { .. }));
    }

    #[test]
    fn fixture_backend_replays_by_hash() {
        let dir = tempfile::tempdir().unwrap();
        let prompt = "какой план?";
        fs::write(
            dir.path().join(format!("{}.txt", prompt_hash(prompt))),
            "the response",
        )
        .unwrap();
        let backend = FixtureBackend::new(dir.path());
        let out = backend
            .complete(&PromptRequest {
                template_id: TemplateId::FloorPlan,
                room: None,
                prompt,
            })
            .unwrap();
        assert_eq!(out, "the response");
    }

    #[test]
    fn serializer_output_mutated_by_field_deletion_is_rejected() {
        // Floor-plan line.
        let room_line = "living room | maple hardwood, matte | light grey drywall, smooth | [(0, 0), (0, 8), (5, 8), (5, 0)]";
        let fields: Vec<&str> = room_line.split(" | ").collect();
        for skip in 0..fields.len() {
            let mutated: Vec<&str> = fields
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, f)| *f)
                .collect();
            assert!(parse_floor_plan(&mutated.join(" | ")).is_err());
        }
        // Layout line: deleting the object or the global must fail.
        let layout_line = "coffee table-0 | middle | near, sofa-0";
        let graph = parse_layout("sofa-0 | edge").unwrap();
        assert_eq!(graph.specs.len(), 1);
        assert!(parse_layout("middle | near, sofa-0").is_err());
        assert!(parse_layout("coffee table-0 | near, sofa-0").is_err());
        let _ = layout_line;
    }
}
