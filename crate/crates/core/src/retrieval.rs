//! Asset retrieval: catalog ingestion, the visual/textual/size matching
//! score, top-k ranking, and material/color selection.
//!
//! Embeddings are precomputed and stored with the catalog; no neural model
//! ever runs here. [`MockProvider`] supplies deterministic hashed
//! bag-of-words embeddings for tests and fixtures, and any real embedding
//! service can be plugged in through [`SimilarityProvider`].

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::floorplan::MaterialSpec;

/// Weighted-sum coefficients of the matching score
/// `M = alpha * V + beta * T - gamma * S`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatchWeights {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

impl Default for MatchWeights {
    fn default() -> Self {
        Self {
            alpha: 100.0,
            beta: 1.0,
            gamma: 10.0,
        }
    }
}

/// Where an object may be installed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Location {
    Floor,
    Wall,
    Ceiling,
    OnObject,
}

impl Location {
    pub fn parse(s: &str) -> Option<Location> {
        match s.trim().to_ascii_lowercase().as_str() {
            "floor" => Some(Location::Floor),
            "wall" => Some(Location::Wall),
            "ceiling" => Some(Location::Ceiling),
            "on_object" | "on object" => Some(Location::OnObject),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Location::Floor => "floor",
            Location::Wall => "wall",
            Location::Ceiling => "ceiling",
            Location::OnObject => "on_object",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VarianceType {
    Same,
    Varied,
}

impl VarianceType {
    pub fn parse(s: &str) -> Option<VarianceType> {
        match s.trim().to_ascii_lowercase().as_str() {
            "same" => Some(VarianceType::Same),
            "varied" => Some(VarianceType::Varied),
            _ => None,
        }
    }
}

/// Annotated 3D-asset metadata: one catalog row. Dimensions are (w, d, h)
/// in centimeters; the annotation's "length" maps to depth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssetRecord {
    pub asset_id: String,
    pub category: String,
    pub synset: String,
    pub description: String,
    pub dims_cm: (f64, f64, f64),
    pub volume_cm3: f64,
    pub mass_kg: f64,
    pub front_view_index: u32,
    pub materials: Vec<String>,
    pub on_ceiling: bool,
    pub on_wall: bool,
    pub on_floor: bool,
    pub on_object: bool,
    pub render_embeddings: Vec<Vec<f64>>,
    pub text_embedding: Vec<f64>,
}

impl AssetRecord {
    pub fn allows(&self, location: Location) -> bool {
        match location {
            Location::Floor => self.on_floor,
            Location::Wall => self.on_wall,
            Location::Ceiling => self.on_ceiling,
            Location::OnObject => self.on_object,
        }
    }
}

/// One retrieval request: a described object with target dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectQuery {
    pub description: String,
    pub target_dims_cm: (f64, f64, f64),
    pub location: Location,
    pub quantity: u32,
    pub variance: VarianceType,
}

/// Deterministic text-embedding source. Implementations must return the
/// same vector for the same input, with unit-cosine on identical inputs.
pub trait SimilarityProvider: Sync {
    fn embed_text(&self, text: &str) -> Vec<f64>;

    /// Whether render (view) embeddings can be produced from images; the
    /// bundled mock cannot, so catalogs without sidecars fall back to the
    /// description embedding per view.
    fn embed_views_available(&self) -> bool {
        false
    }
}

/// Hashed bag-of-words embedding: tokens are lowercased, hashed with FNV-1a
/// into a fixed number of buckets, counted, and L2-normalized.
#[derive(Debug, Clone)]
pub struct MockProvider {
    pub dims: usize,
}

impl Default for MockProvider {
    // 4096 buckets: the smallest power of two at which no two built-in
    // material names hash to identical bags.
    fn default() -> Self {
        Self { dims: 4096 }
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

impl SimilarityProvider for MockProvider {
    fn embed_text(&self, text: &str) -> Vec<f64> {
        let mut v = vec![0.0; self.dims];
        for token in text
            .to_ascii_lowercase()
            .split(|c: char| !c.is_alphanumeric())
            .filter(|t| !t.is_empty())
        {
            let bucket = (fnv1a(token.as_bytes()) % self.dims as u64) as usize;
            v[bucket] += 1.0;
        }
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            for x in &mut v {
                *x /= norm;
            }
        }
        v
    }
}

/// Cosine similarity; 0 when either vector is zero or lengths differ.
pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return 0.0;
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum RetrievalError {
    #[error("asset '{0}' has no render embeddings")]
    NoRenders(String),
    #[error("no asset matches location '{0}'")]
    EmptyCatalogAfterFilter(String),
    #[error("catalog line {lineno}: {detail}")]
    MalformedCatalogLine { lineno: usize, detail: String },
    #[error("embedding sidecar line {lineno}: {detail}")]
    MalformedSidecarLine { lineno: usize, detail: String },
}

/// Best cosine between any render embedding of the asset and the embedded
/// query description.
pub fn visual_similarity(
    asset: &AssetRecord,
    query: &ObjectQuery,
    provider: &dyn SimilarityProvider,
) -> Result<f64, RetrievalError> {
    if asset.render_embeddings.is_empty() {
        return Err(RetrievalError::NoRenders(asset.asset_id.clone()));
    }
    let q = provider.embed_text(&query.description);
    Ok(asset
        .render_embeddings
        .iter()
        .map(|r| cosine(r, &q))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Cosine between the asset's description embedding and the query's.
pub fn textual_similarity(
    asset: &AssetRecord,
    query: &ObjectQuery,
    provider: &dyn SimilarityProvider,
) -> f64 {
    cosine(&asset.text_embedding, &provider.embed_text(&query.description))
}

/// Mean absolute per-axis difference of the bounding boxes, in centimeters.
pub fn size_discrepancy(asset: &AssetRecord, query: &ObjectQuery) -> f64 {
    let (w, d, h) = asset.dims_cm;
    let (qw, qd, qh) = query.target_dims_cm;
    ((w - qw).abs() + (h - qh).abs() + (d - qd).abs()) / 3.0
}

/// The weighted matching score `alpha*V + beta*T - gamma*S`.
pub fn match_score(
    asset: &AssetRecord,
    query: &ObjectQuery,
    provider: &dyn SimilarityProvider,
    weights: &MatchWeights,
) -> Result<f64, RetrievalError> {
    let v = visual_similarity(asset, query, provider)?;
    let t = textual_similarity(asset, query, provider);
    let s = size_discrepancy(asset, query);
    Ok(weights.alpha * v + weights.beta * t - weights.gamma * s)
}

/// An immutable, queryable asset collection.
#[derive(Debug, Clone, Default)]
pub struct Catalog {
    pub assets: Vec<AssetRecord>,
}

impl Catalog {
    pub fn get(&self, asset_id: &str) -> Option<&AssetRecord> {
        self.assets.iter().find(|a| a.asset_id == asset_id)
    }

    pub fn len(&self) -> usize {
        self.assets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assets.is_empty()
    }
}

/// Top-k assets by matching score among those allowed at the query's
/// location, descending, ties broken by ascending asset id.
pub fn retrieve<'a>(
    catalog: &'a Catalog,
    query: &ObjectQuery,
    provider: &dyn SimilarityProvider,
    weights: &MatchWeights,
    k: usize,
) -> Result<Vec<&'a AssetRecord>, RetrievalError> {
    let mut scored: Vec<(f64, &AssetRecord)> = Vec::new();
    for asset in catalog.assets.iter().filter(|a| a.allows(query.location)) {
        scored.push((match_score(asset, query, provider, weights)?, asset));
    }
    if scored.is_empty() {
        return Err(RetrievalError::EmptyCatalogAfterFilter(
            query.location.as_str().to_string(),
        ));
    }
    scored.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.1.asset_id.cmp(&b.1.asset_id))
    });
    scored.truncate(k);
    Ok(scored.into_iter().map(|(_, a)| a).collect())
}

/// Resolves a query into `quantity` concrete assets: `varied` takes the
/// top-quantity distinct records (repeating the best when the catalog runs
/// short), `same` repeats the top match.
pub fn assets_for_query<'a>(
    catalog: &'a Catalog,
    query: &ObjectQuery,
    provider: &dyn SimilarityProvider,
    weights: &MatchWeights,
) -> Result<Vec<&'a AssetRecord>, RetrievalError> {
    let quantity = query.quantity.max(1) as usize;
    let ranked = retrieve(catalog, query, provider, weights, quantity)?;
    let mut out = Vec::with_capacity(quantity);
    for i in 0..quantity {
        match query.variance {
            VarianceType::Same => out.push(ranked[0]),
            VarianceType::Varied => out.push(ranked[i.min(ranked.len() - 1)]),
        }
    }
    Ok(out)
}

/// The material and color name catalogs (236 materials, 148 colors).
#[derive(Debug, Clone)]
pub struct MaterialCatalog {
    pub materials: Vec<String>,
    pub colors: Vec<String>,
}

impl MaterialCatalog {
    /// The built-in catalogs shipped with the crate.
    pub fn builtin() -> Self {
        let materials = include_str!("../data/materials.txt")
            .lines()
            .map(str::to_string)
            .collect();
        let colors = include_str!("../data/colors.txt")
            .lines()
            .map(str::to_string)
            .collect();
        Self { materials, colors }
    }

    pub fn contains(&self, spec: &MaterialSpec) -> bool {
        self.materials.contains(&spec.material_name) && self.colors.contains(&spec.color_name)
    }
}

fn argmax_by_similarity<'a>(
    names: &'a [String],
    description: &str,
    provider: &dyn SimilarityProvider,
) -> &'a str {
    let q = provider.embed_text(description);
    let mut best: Option<(f64, &str)> = None;
    for name in names {
        let sim = cosine(&provider.embed_text(name), &q);
        best = match best {
            None => Some((sim, name)),
            Some((bs, bn)) => {
                if sim > bs || (sim == bs && name.as_str() < bn) {
                    Some((sim, name))
                } else {
                    Some((bs, bn))
                }
            }
        };
    }
    best.map(|(_, n)| n).unwrap_or("")
}

/// Picks the catalog material and color closest to the description; ties
/// break lexicographically, so an empty description yields the first
/// entries (documented degenerate case).
pub fn select_material(
    description: &str,
    catalog: &MaterialCatalog,
    provider: &dyn SimilarityProvider,
) -> MaterialSpec {
    MaterialSpec {
        material_name: argmax_by_similarity(&catalog.materials, description, provider).to_string(),
        color_name: argmax_by_similarity(&catalog.colors, description, provider).to_string(),
    }
}

/// The built-in door metadata (40 entries of `id | description`).
pub fn builtin_doors() -> Vec<(String, String)> {
    include_str!("../data/doors.txt")
        .lines()
        .filter_map(|l| {
            l.split_once('|')
                .map(|(id, desc)| (id.trim().to_string(), desc.trim().to_string()))
        })
        .collect()
}

/// Picks the door asset whose description best matches the style query.
pub fn select_door_asset(style_query: &str, provider: &dyn SimilarityProvider) -> String {
    let doors = builtin_doors();
    let q = provider.embed_text(style_query);
    let mut best: Option<(f64, &str)> = None;
    for (id, desc) in &doors {
        let sim = cosine(&provider.embed_text(desc), &q);
        best = match best {
            None => Some((sim, id)),
            Some((bs, bn)) => {
                if sim > bs || (sim == bs && id.as_str() < bn) {
                    Some((sim, id))
                } else {
                    Some((bs, bn))
                }
            }
        };
    }
    best.map(|(_, id)| id.to_string()).unwrap_or_default()
}

fn parse_bool(s: &str, lineno: usize) -> Result<bool, RetrievalError> {
    match s.trim() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(RetrievalError::MalformedCatalogLine {
            lineno,
            detail: format!("expected true/false, got '{}'", other),
        }),
    }
}

fn parse_f64(s: &str, lineno: usize, what: &str) -> Result<f64, RetrievalError> {
    s.trim()
        .parse()
        .map_err(|_| RetrievalError::MalformedCatalogLine {
            lineno,
            detail: format!("bad {} '{}'", what, s.trim()),
        })
}

/// Parses the catalog line format:
/// `asset_id | category | synset | w_cm | d_cm | h_cm | volume_cm3 |
///  mass_kg | front_view | onCeiling | onWall | onFloor | onObject |
///  description | materials`
/// Embeddings start empty; fill them from a sidecar or a provider.
pub fn parse_catalog(text: &str) -> Result<Catalog, RetrievalError> {
    let mut assets = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split('|').map(str::trim).collect();
        if f.len() != 15 {
            return Err(RetrievalError::MalformedCatalogLine {
                lineno,
                detail: format!("expected 15 fields, got {}", f.len()),
            });
        }
        assets.push(AssetRecord {
            asset_id: f[0].to_string(),
            category: f[1].to_string(),
            synset: f[2].to_string(),
            dims_cm: (
                parse_f64(f[3], lineno, "width")?,
                parse_f64(f[4], lineno, "depth")?,
                parse_f64(f[5], lineno, "height")?,
            ),
            volume_cm3: parse_f64(f[6], lineno, "volume")?,
            mass_kg: parse_f64(f[7], lineno, "mass")?,
            front_view_index: parse_f64(f[8], lineno, "front view")? as u32,
            on_ceiling: parse_bool(f[9], lineno)?,
            on_wall: parse_bool(f[10], lineno)?,
            on_floor: parse_bool(f[11], lineno)?,
            on_object: parse_bool(f[12], lineno)?,
            description: f[13].to_string(),
            materials: f[14]
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string)
                .collect(),
            render_embeddings: Vec::new(),
            text_embedding: Vec::new(),
        });
    }
    Ok(Catalog { assets })
}

pub fn format_catalog(catalog: &Catalog) -> String {
    catalog
        .assets
        .iter()
        .map(|a| {
            format!(
                "{} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {} | {}",
                a.asset_id,
                a.category,
                a.synset,
                a.dims_cm.0,
                a.dims_cm.1,
                a.dims_cm.2,
                a.volume_cm3,
                a.mass_kg,
                a.front_view_index,
                a.on_ceiling,
                a.on_wall,
                a.on_floor,
                a.on_object,
                a.description,
                a.materials.join(", "),
            )
        })
        .collect::<Vec<_>>()
        .join("\n")
}

/// Applies a plain-text embedding sidecar: lines of
/// `asset_id | text | v v v ...` or `asset_id | render | v v v ...`
/// (renders append in file order).
pub fn apply_sidecar(catalog: &mut Catalog, text: &str) -> Result<(), RetrievalError> {
    let mut by_id: BTreeMap<String, usize> = BTreeMap::new();
    for (i, a) in catalog.assets.iter().enumerate() {
        by_id.insert(a.asset_id.clone(), i);
    }
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split('|').map(str::trim).collect();
        if f.len() != 3 {
            return Err(RetrievalError::MalformedSidecarLine {
                lineno,
                detail: format!("expected 3 fields, got {}", f.len()),
            });
        }
        let idx = *by_id
            .get(f[0])
            .ok_or_else(|| RetrievalError::MalformedSidecarLine {
                lineno,
                detail: format!("unknown asset '{}'", f[0]),
            })?;
        let values: Result<Vec<f64>, _> = f[2].split_whitespace().map(str::parse).collect();
        let values = values.map_err(|_| RetrievalError::MalformedSidecarLine {
            lineno,
            detail: "bad embedding value".into(),
        })?;
        match f[1] {
            "text" => catalog.assets[idx].text_embedding = values,
            "render" => catalog.assets[idx].render_embeddings.push(values),
            other => {
                return Err(RetrievalError::MalformedSidecarLine {
                    lineno,
                    detail: format!("unknown embedding kind '{}'", other),
                })
            }
        }
    }
    Ok(())
}

/// Fills missing embeddings from the provider: the description embedding
/// for text, and one description-derived render embedding when no view
/// embeddings exist (a stand-in until real view embeddings are supplied).
pub fn fill_missing_embeddings(catalog: &mut Catalog, provider: &dyn SimilarityProvider) {
    for asset in &mut catalog.assets {
        if asset.text_embedding.is_empty() {
            asset.text_embedding = provider.embed_text(&asset.description);
        }
        if asset.render_embeddings.is_empty() {
            asset.render_embeddings = vec![asset.text_embedding.clone()];
        }
    }
}
