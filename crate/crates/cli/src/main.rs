//! Command-line entry point for the scene-generation pipeline and its
//! individual stages.
//!
//! Exit codes: 0 on success, 1 on validation or processing errors, 2 on
//! usage errors. Diagnostics go to standard error; artifacts go to files or
//! standard output.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use scenegen_core::constraints::{parse_scene_graph, PredicateParams, SceneGraph};
use scenegen_core::floorplan::{parse_plan, validate_plan, Severity};
use scenegen_core::gateway::{
    record_fixtures, run_pipeline, Backend, FixtureBackend, GatewayTranscript, LiveBackend,
    PipelineConfig,
};
use scenegen_core::geometry::{Footprint, Point2, Rect, Yaw};
use scenegen_core::milp::{encode, export_lp, solve_bundled};
use scenegen_core::retrieval::{
    apply_sidecar, fill_missing_embeddings, format_catalog, match_score, parse_catalog, retrieve,
    Catalog, Location, MatchWeights, MaterialCatalog, MockProvider, ObjectQuery,
    SimilarityProvider, VarianceType,
};
use scenegen_core::scene::{export_scene, parse_scene, render_svg, SceneDocument};
use scenegen_core::solver::{
    apply_absolute, score_layout, solve_dfs, solve_edge, solve_random, Budget, Layout, ObjectDims,
    PlacementProblem,
};

#[derive(Parser)]
#[command(name = "scenegen", version, about = "Prompt-driven indoor scene generation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendKind {
    Fixture,
    Live,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Strategy {
    Dfs,
    Random,
    Edge,
    Absolute,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full prompt-to-scene pipeline.
    Generate(GenerateArgs),
    /// Validate a floor-plan file of room lines.
    ValidateFloorplan(ValidateArgs),
    /// Solve one room's object layout.
    SolveLayout(SolveLayoutArgs),
    /// Encode a placement problem as an LP file.
    EncodeMilp(EncodeArgs),
    /// Solve a placement problem with the bundled exact MILP solver.
    SolveMilp(SolveMilpArgs),
    /// Rank catalog assets against a description and target size.
    QueryAssets(QueryArgs),
    /// Render a scene file as a top-down SVG.
    Render(RenderArgs),
    /// Convert asset annotation JSON into the catalog line format.
    IngestCatalog(IngestArgs),
    /// Run the pipeline against stage-named response files, recording
    /// hash-keyed fixtures for the fixture backend.
    RecordFixtures(RecordArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// The design brief, e.g. "a 1b1b apartment of a researcher who has a cat".
    #[arg(long)]
    prompt: String,
    #[arg(long, default_value = "N/A")]
    requirements: String,
    #[arg(long, value_enum, default_value = "fixture")]
    backend: BackendKind,
    /// Directory of hash-keyed fixture responses (fixture backend).
    #[arg(long)]
    fixtures: Option<PathBuf>,
    /// Directory to capture live responses into (live backend).
    #[arg(long)]
    capture: Option<PathBuf>,
    #[arg(long, default_value = "fixtures/catalog/assets.txt")]
    catalog: PathBuf,
    /// Optional plain-text embedding sidecar for the catalog.
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long, default_value = "scene.txt")]
    out: PathBuf,
    /// Also write the gateway transcript here.
    #[arg(long)]
    transcript: Option<PathBuf>,
    /// Also render a top-down SVG here.
    #[arg(long)]
    svg: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// TOML config for predicate parameters and solver budgets.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, short, action = clap::ArgAction::Count)]
    verbose: u8,
}

#[derive(Args)]
struct ValidateArgs {
    /// Floor-plan file: one `room | floor | wall | vertices` line per room.
    plan: PathBuf,
    #[arg(long, default_value_t = 3.0)]
    wall_height: f64,
}

#[derive(Args)]
struct SolveLayoutArgs {
    #[arg(long, value_enum)]
    strategy: Strategy,
    /// Room file: `room | x0 | y0 | x1 | y1` plus `object | id | w | d` lines.
    #[arg(long)]
    room: PathBuf,
    /// Constraint DSL file (`object | global | relation, target | ...`).
    #[arg(long)]
    constraints: PathBuf,
    /// Absolute placements file (`placement | id | x | y | yaw`), for
    /// --strategy absolute.
    #[arg(long)]
    provided: Option<PathBuf>,
    #[arg(long, default_value_t = 0.25)]
    grid: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    max_candidates: usize,
    /// Wall-clock budget in seconds (nondeterministic; off by default).
    #[arg(long)]
    time_budget: Option<f64>,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    room: PathBuf,
    #[arg(long)]
    constraints: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveMilpArgs {
    #[arg(long)]
    room: PathBuf,
    #[arg(long)]
    constraints: PathBuf,
    #[arg(long, default_value_t = 0.25)]
    grid: f64,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long, default_value = "fixtures/catalog/assets.txt")]
    catalog: PathBuf,
    #[arg(long)]
    embeddings: Option<PathBuf>,
    #[arg(long)]
    desc: String,
    /// Target size as WxDxH in centimeters, e.g. 60x60x180.
    #[arg(long)]
    dims: String,
    #[arg(long, default_value = "floor")]
    location: String,
    #[arg(long, default_value_t = 3)]
    k: usize,
}

#[derive(Args)]
struct RenderArgs {
    #[arg(long)]
    scene: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Catalog used to look up object footprints for drawing.
    #[arg(long)]
    catalog: Option<PathBuf>,
}

#[derive(Args)]
struct IngestArgs {
    /// A JSON annotation file or a directory of them.
    #[arg(long)]
    annotations: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Also write a mock-embedding sidecar here.
    #[arg(long)]
    embeddings_out: Option<PathBuf>,
}

#[derive(Args)]
struct RecordArgs {
    /// Directory of stage-named response files.
    #[arg(long)]
    script: PathBuf,
    /// Output directory for hash-keyed fixtures.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    prompt: String,
    #[arg(long, default_value = "N/A")]
    requirements: String,
    #[arg(long, default_value = "fixtures/catalog/assets.txt")]
    catalog: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    config: Option<PathBuf>,
}

/// TOML configuration file shape.
#[derive(Debug, Default, serde::Deserialize)]
#[serde(default)]
struct FileConfig {
    predicates: Option<PredicateParams>,
    solver: SolverConfig,
    pipeline: PipelineSection,
}

#[derive(Debug, Default, serde::Deserialize)]
#[serde(default)]
struct SolverConfig {
    grid_step_m: Option<f64>,
    max_candidates: Option<usize>,
    wall_clock_seconds: Option<f64>,
}

#[derive(Debug, Default, serde::Deserialize)]
#[serde(default)]
struct PipelineSection {
    threads: Option<usize>,
    door_height_m: Option<f64>,
}

fn load_file_config(path: Option<&Path>) -> Result<FileConfig> {
    match path {
        None => Ok(FileConfig::default()),
        Some(p) => {
            let text = fs::read_to_string(p)
                .with_context(|| format!("cannot read config {}", p.display()))?;
            toml::from_str(&text).with_context(|| format!("cannot parse config {}", p.display()))
        }
    }
}

fn load_catalog(path: &Path, sidecar: Option<&Path>) -> Result<Catalog> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read catalog {}", path.display()))?;
    let mut catalog = parse_catalog(&text)?;
    if let Some(sc) = sidecar {
        let text = fs::read_to_string(sc)
            .with_context(|| format!("cannot read embeddings {}", sc.display()))?;
        apply_sidecar(&mut catalog, &text)?;
    }
    fill_missing_embeddings(&mut catalog, &MockProvider::default());
    Ok(catalog)
}

/// Parses the room/objects problem file used by the solver commands.
fn load_problem(
    room_path: &Path,
    graph_path: &Path,
) -> Result<(Rect, Vec<ObjectDims>, SceneGraph)> {
    let text = fs::read_to_string(room_path)
        .with_context(|| format!("cannot read room file {}", room_path.display()))?;
    let mut room: Option<Rect> = None;
    let mut objects = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split('|').map(str::trim).collect();
        match f[0] {
            "room" if f.len() == 5 => {
                let n: Vec<f64> = f[1..]
                    .iter()
                    .map(|s| s.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| anyhow!("room file line {}: bad number", i + 1))?;
                room = Some(Rect::from_corners(
                    Point2::new(n[0], n[1]),
                    Point2::new(n[2], n[3]),
                ));
            }
            "object" if f.len() == 4 => {
                let w: f64 = f[2]
                    .parse()
                    .map_err(|_| anyhow!("room file line {}: bad width", i + 1))?;
                let d: f64 = f[3]
                    .parse()
                    .map_err(|_| anyhow!("room file line {}: bad depth", i + 1))?;
                objects.push(ObjectDims::new(f[1], w, d));
            }
            _ => bail!(
                "room file line {}: expected 'room | x0 | y0 | x1 | y1' or 'object | id | w | d'",
                i + 1
            ),
        }
    }
    let room = room.ok_or_else(|| anyhow!("room file has no 'room' line"))?;
    let graph_text = fs::read_to_string(graph_path)
        .with_context(|| format!("cannot read constraints {}", graph_path.display()))?;
    let graph = parse_scene_graph(&graph_text)?;
    Ok((room, objects, graph))
}

fn load_provided(path: &Path) -> Result<BTreeMap<String, Footprint>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read placements {}", path.display()))?;
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let f: Vec<&str> = line.split('|').map(str::trim).collect();
        if f.len() != 5 || f[0] != "placement" {
            bail!(
                "placements line {}: expected 'placement | id | x | y | yaw'",
                i + 1
            );
        }
        let x: f64 = f[2].parse().map_err(|_| anyhow!("line {}: bad x", i + 1))?;
        let y: f64 = f[3].parse().map_err(|_| anyhow!("line {}: bad y", i + 1))?;
        let yaw_deg: u32 = f[4].parse().map_err(|_| anyhow!("line {}: bad yaw", i + 1))?;
        let yaw = Yaw::from_degrees(yaw_deg)
            .ok_or_else(|| anyhow!("line {}: yaw must be one of 0/90/180/270", i + 1))?;
        // Dimensions are filled in from the room file's object list.
        out.insert(
            f[1].to_string(),
            Footprint::new(Point2::new(x, y), 1.0, 1.0, yaw),
        );
    }
    Ok(out)
}

fn format_layout(layout: &Layout, strategy: &str) -> String {
    let mut out = String::new();
    out.push_str(&format!("layout | strategy | {}\n", strategy));
    out.push_str(&format!("layout | score | {}\n", layout.score));
    out.push_str(&format!("layout | complete | {}\n", layout.complete));
    for (id, fp) in &layout.placements {
        out.push_str(&format!(
            "placement | {} | {:.6} | {:.6} | {}\n",
            id,
            fp.center.x,
            fp.center.y,
            fp.yaw.degrees()
        ));
    }
    for id in &layout.diagnostics.dropped {
        out.push_str(&format!("dropped | {}\n", id));
    }
    for id in &layout.diagnostics.out_of_bounds {
        out.push_str(&format!("out_of_bounds | {}\n", id));
    }
    for (a, b) in &layout.diagnostics.collisions {
        out.push_str(&format!("collision | {} | {}\n", a, b));
    }
    for note in &layout.diagnostics.notes {
        out.push_str(&format!("note | {}\n", note));
    }
    out
}

fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            fs::write(path, content).with_context(|| format!("cannot write {}", path.display()))?;
        }
        None => print!("{}", content),
    }
    Ok(())
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let file_config = load_file_config(args.config.as_deref())?;
    let mut config = PipelineConfig::default();
    if let Some(p) = file_config.predicates {
        config.params = p;
    }
    if let Some(g) = file_config.solver.grid_step_m {
        config.grid_step_m = g;
    }
    if let Some(m) = file_config.solver.max_candidates {
        config.budget.max_candidates = m;
    }
    config.budget.wall_clock_seconds = file_config.solver.wall_clock_seconds;
    config.threads = file_config.pipeline.threads.unwrap_or(args.threads);
    if let Some(h) = file_config.pipeline.door_height_m {
        config.door_height_m = h;
    }

    let catalog = load_catalog(&args.catalog, args.embeddings.as_deref())?;
    let materials = MaterialCatalog::builtin();
    let provider = MockProvider::default();

    let backend: Box<dyn Backend> = match args.backend {
        BackendKind::Fixture => {
            let dir = args
                .fixtures
                .ok_or_else(|| anyhow!("--fixtures DIR is required with the fixture backend"))?;
            Box::new(FixtureBackend::new(dir))
        }
        BackendKind::Live => {
            let mut live = LiveBackend::from_env().map_err(|e| anyhow!("{}", e))?;
            live.capture_dir = args.capture.clone();
            Box::new(live)
        }
    };

    let (doc, transcript, dims) = match run_pipeline(
        &args.prompt,
        &args.requirements,
        backend.as_ref(),
        &catalog,
        &materials,
        &provider,
        config,
        args.seed,
    ) {
        Ok(result) => result,
        Err(failure) => {
            // Keep the partial transcript auditable even on failure.
            if let Some(path) = &args.transcript {
                let _ = fs::write(path, failure.transcript.to_text());
            }
            return Err(anyhow::Error::from(failure));
        }
    };

    fs::write(&args.out, export_scene(&doc))
        .with_context(|| format!("cannot write {}", args.out.display()))?;
    if let Some(path) = &args.transcript {
        fs::write(path, transcript.to_text())
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    if let Some(path) = &args.svg {
        fs::write(path, render_svg(&doc, &dims))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    if args.verbose > 0 {
        eprintln!(
            "generated {} rooms, {} objects, {} calls",
            doc.plan.rooms.len(),
            doc.objects.len(),
            transcript.total_calls()
        );
    }
    Ok(())
}

fn cmd_validate(args: ValidateArgs) -> Result<()> {
    let text = fs::read_to_string(&args.plan)
        .with_context(|| format!("cannot read {}", args.plan.display()))?;
    let plan = parse_plan(&text, args.wall_height)?;
    let report = validate_plan(&plan);
    for finding in &report.findings {
        let tag = match finding.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        eprintln!("{} [{}]: {}", tag, finding.code, finding.message);
    }
    if !report.is_valid() {
        bail!("floor plan is invalid");
    }
    println!("valid: {} rooms", plan.rooms.len());
    Ok(())
}

fn solver_problem(
    room_path: &Path,
    constraints_path: &Path,
    grid: f64,
    max_candidates: usize,
    wall_clock: Option<f64>,
    config: Option<&Path>,
) -> Result<PlacementProblem> {
    let file_config = load_file_config(config)?;
    let (room, objects, graph) = load_problem(room_path, constraints_path)?;
    let mut p = PlacementProblem::new(room, objects, graph);
    p.grid_step_m = file_config.solver.grid_step_m.unwrap_or(grid);
    p.budget = Budget {
        max_candidates: file_config.solver.max_candidates.unwrap_or(max_candidates),
        wall_clock_seconds: file_config.solver.wall_clock_seconds.or(wall_clock),
    };
    if let Some(params) = file_config.predicates {
        p.params = params;
    }
    Ok(p)
}

fn cmd_solve_layout(args: SolveLayoutArgs) -> Result<()> {
    let p = solver_problem(
        &args.room,
        &args.constraints,
        args.grid,
        args.max_candidates,
        args.time_budget,
        args.config.as_deref(),
    )?;
    let (layout, name) = match args.strategy {
        Strategy::Dfs => (solve_dfs(&p, args.seed)?, "dfs"),
        Strategy::Random => (solve_random(&p, args.seed)?, "random"),
        Strategy::Edge => (solve_edge(&p, args.seed)?, "edge"),
        Strategy::Absolute => {
            let provided_path = args
                .provided
                .as_ref()
                .ok_or_else(|| anyhow!("--provided FILE is required with --strategy absolute"))?;
            let mut provided = load_provided(provided_path)?;
            // Take footprint dimensions from the object list.
            for (id, fp) in provided.iter_mut() {
                if let Some(o) = p.objects.iter().find(|o| &o.id == id) {
                    fp.width = o.width_m;
                    fp.depth = o.depth_m;
                }
            }
            let mut layout = apply_absolute(&p.room, &provided);
            layout.score = score_layout(&layout.placements, &p.graph, &p.room, &p.params);
            (layout, "absolute")
        }
    };
    emit(args.out.as_deref(), &format_layout(&layout, name))
}

fn cmd_encode_milp(args: EncodeArgs) -> Result<()> {
    let p = solver_problem(
        &args.room,
        &args.constraints,
        0.25,
        10_000,
        None,
        args.config.as_deref(),
    )?;
    let model = encode(&p)?;
    emit(args.out.as_deref(), &export_lp(&model))
}

fn cmd_solve_milp(args: SolveMilpArgs) -> Result<()> {
    let p = solver_problem(
        &args.room,
        &args.constraints,
        args.grid,
        10_000,
        None,
        args.config.as_deref(),
    )?;
    let model = encode(&p)?;
    let layout = solve_bundled(&model, args.grid)?;
    emit(args.out.as_deref(), &format_layout(&layout, "milp"))
}

fn cmd_query_assets(args: QueryArgs) -> Result<()> {
    let catalog = load_catalog(&args.catalog, args.embeddings.as_deref())?;
    let provider = MockProvider::default();
    let weights = MatchWeights::default();
    let dims: Vec<f64> = args
        .dims
        .split('x')
        .map(|s| s.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| anyhow!("--dims must look like 60x60x180 (WxDxH in cm)"))?;
    if dims.len() != 3 {
        bail!("--dims must have exactly three components");
    }
    let location = Location::parse(&args.location)
        .ok_or_else(|| anyhow!("--location must be floor, wall, ceiling, or on_object"))?;
    let query = ObjectQuery {
        description: args.desc.clone(),
        target_dims_cm: (dims[0], dims[1], dims[2]),
        location,
        quantity: 1,
        variance: VarianceType::Same,
    };
    for asset in retrieve(&catalog, &query, &provider, &weights, args.k)? {
        let m = match_score(asset, &query, &provider, &weights)?;
        println!(
            "{:10.3} {} | {} | {:?}",
            m, asset.asset_id, asset.description, asset.dims_cm
        );
    }
    Ok(())
}

fn cmd_render(args: RenderArgs) -> Result<()> {
    let text = fs::read_to_string(&args.scene)
        .with_context(|| format!("cannot read {}", args.scene.display()))?;
    let doc: SceneDocument = parse_scene(&text)?;
    let mut dims: BTreeMap<String, (f64, f64)> = BTreeMap::new();
    if let Some(catalog_path) = &args.catalog {
        let catalog = load_catalog(catalog_path, None)?;
        for o in &doc.objects {
            if let Some(asset) = catalog.get(&o.asset_id) {
                dims.insert(
                    o.instance_id.clone(),
                    (asset.dims_cm.0 / 100.0, asset.dims_cm.1 / 100.0),
                );
            }
        }
    }
    fs::write(&args.out, render_svg(&doc, &dims))
        .with_context(|| format!("cannot write {}", args.out.display()))?;
    Ok(())
}

/// Reads one annotation JSON (optionally wrapped in an "annotations" object)
/// into a catalog record. Numeric fields may arrive as numbers or numeric
/// strings; the asset id defaults to the file stem.
fn annotation_to_record(path: &Path) -> Result<scenegen_core::retrieval::AssetRecord> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).with_context(|| format!("cannot parse {}", path.display()))?;
    let ann = value.get("annotations").unwrap_or(&value);
    let get_str = |key: &str| -> Result<String> {
        ann.get(key)
            .and_then(|v| v.as_str())
            .map(str::to_string)
            .ok_or_else(|| anyhow!("{}: missing string field '{}'", path.display(), key))
    };
    let get_num = |key: &str| -> Result<f64> {
        let v = ann
            .get(key)
            .ok_or_else(|| anyhow!("{}: missing field '{}'", path.display(), key))?;
        v.as_f64()
            .or_else(|| v.as_str().and_then(|s| s.parse().ok()))
            .ok_or_else(|| anyhow!("{}: field '{}' is not numeric", path.display(), key))
    };
    let get_bool = |key: &str| -> Result<bool> {
        let v = ann
            .get(key)
            .ok_or_else(|| anyhow!("{}: missing field '{}'", path.display(), key))?;
        v.as_bool()
            .or_else(|| v.as_str().and_then(|s| s.parse().ok()))
            .ok_or_else(|| anyhow!("{}: field '{}' is not boolean", path.display(), key))
    };
    let asset_id = ann
        .get("asset_id")
        .and_then(|v| v.as_str())
        .map(str::to_string)
        .unwrap_or_else(|| {
            path.file_stem()
                .map(|s| s.to_string_lossy().to_string())
                .unwrap_or_default()
        });
    let materials: Vec<String> = ann
        .get("materials")
        .and_then(|v| v.as_array())
        .map(|a| {
            a.iter()
                .filter_map(|v| v.as_str().map(str::to_string))
                .collect()
        })
        .unwrap_or_default();
    Ok(scenegen_core::retrieval::AssetRecord {
        asset_id,
        category: get_str("category")?,
        synset: get_str("synset")?,
        description: get_str("description")?,
        // width/length/height: length is the front-back depth.
        dims_cm: (get_num("width")?, get_num("length")?, get_num("height")?),
        volume_cm3: get_num("volume")?,
        mass_kg: get_num("mass")?,
        front_view_index: get_num("frontView")? as u32,
        materials,
        on_ceiling: get_bool("onCeiling")?,
        on_wall: get_bool("onWall")?,
        on_floor: get_bool("onFloor")?,
        on_object: get_bool("onObject")?,
        render_embeddings: Vec::new(),
        text_embedding: Vec::new(),
    })
}

fn cmd_ingest(args: IngestArgs) -> Result<()> {
    let mut records = Vec::new();
    if args.annotations.is_dir() {
        let mut paths: Vec<PathBuf> = fs::read_dir(&args.annotations)?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().map(|e| e == "json").unwrap_or(false))
            .collect();
        paths.sort();
        for path in paths {
            records.push(annotation_to_record(&path)?);
        }
    } else {
        records.push(annotation_to_record(&args.annotations)?);
    }
    let catalog = Catalog { assets: records };
    fs::write(&args.out, format_catalog(&catalog) + "\n")
        .with_context(|| format!("cannot write {}", args.out.display()))?;
    if let Some(sidecar) = &args.embeddings_out {
        let provider = MockProvider::default();
        let mut lines = Vec::new();
        for asset in &catalog.assets {
            let embedding = provider.embed_text(&asset.description);
            let values: Vec<String> = embedding.iter().map(|v| format!("{}", v)).collect();
            lines.push(format!("{} | text | {}", asset.asset_id, values.join(" ")));
            lines.push(format!("{} | render | {}", asset.asset_id, values.join(" ")));
        }
        fs::write(sidecar, lines.join("\n") + "\n")
            .with_context(|| format!("cannot write {}", sidecar.display()))?;
    }
    eprintln!("ingested {} assets", catalog.len());
    Ok(())
}

fn cmd_record(args: RecordArgs) -> Result<()> {
    let file_config = load_file_config(args.config.as_deref())?;
    let mut config = PipelineConfig::default();
    if let Some(p) = file_config.predicates {
        config.params = p;
    }
    if let Some(g) = file_config.solver.grid_step_m {
        config.grid_step_m = g;
    }
    if let Some(m) = file_config.solver.max_candidates {
        config.budget.max_candidates = m;
    }
    let catalog = load_catalog(&args.catalog, None)?;
    let materials = MaterialCatalog::builtin();
    let provider = MockProvider::default();
    let (doc, transcript): (SceneDocument, GatewayTranscript) = record_fixtures(
        &args.script,
        &args.out,
        &args.prompt,
        &args.requirements,
        &catalog,
        &materials,
        &provider,
        config,
        args.seed,
    )?;
    eprintln!(
        "recorded {} fixtures into {} ({} rooms)",
        transcript.total_calls(),
        args.out.display(),
        doc.plan.rooms.len()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::ValidateFloorplan(args) => cmd_validate(args),
        Command::SolveLayout(args) => cmd_solve_layout(args),
        Command::EncodeMilp(args) => cmd_encode_milp(args),
        Command::SolveMilp(args) => cmd_solve_milp(args),
        Command::QueryAssets(args) => cmd_query_assets(args),
        Command::Render(args) => cmd_render(args),
        Command::IngestCatalog(args) => cmd_ingest(args),
        Command::RecordFixtures(args) => cmd_record(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {:#}", err);
            ExitCode::FAILURE
        }
    }
}
