//! End-to-end pipeline runs against the recorded fixture scripts.

use std::collections::BTreeMap;
use std::path::PathBuf;

use scenegen_core::gateway::{
    record_fixtures, run_pipeline, FixtureBackend, GatewayError, PipelineConfig, PipelineError,
    ScriptBackend, TemplateId,
};
use scenegen_core::geometry::Rect;
use scenegen_core::retrieval::{fill_missing_embeddings, parse_catalog, Catalog, MaterialCatalog, MockProvider};
use scenegen_core::scene::{export_scene, parse_scene, render_svg, SceneDocument};

fn fixtures_root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn load_catalog() -> Catalog {
    let text = std::fs::read_to_string(fixtures_root().join("catalog/assets.txt")).unwrap();
    let mut catalog = parse_catalog(&text).unwrap();
    fill_missing_embeddings(&mut catalog, &MockProvider::default());
    catalog
}

fn run_script(
    script: &str,
    prompt: &str,
    threads: usize,
    seed: u64,
) -> (SceneDocument, scenegen_core::gateway::GatewayTranscript, BTreeMap<String, (f64, f64)>) {
    let catalog = load_catalog();
    let materials = MaterialCatalog::builtin();
    let provider = MockProvider::default();
    let backend = ScriptBackend::new(fixtures_root().join("llm").join(script));
    let config = PipelineConfig {
        threads,
        budget: scenegen_core::solver::Budget {
            max_candidates: 400,
            wall_clock_seconds: None,
        },
        ..PipelineConfig::default()
    };
    run_pipeline(prompt, "N/A", &backend, &catalog, &materials, &provider, config, seed).unwrap()
}

#[test]
fn apartment_run_makes_nine_calls() {
    let (doc, transcript, _) = run_script(
        "apartment",
        "a 1b1b apartment of a researcher who has a cat",
        1,
        0,
    );
    assert_eq!(doc.plan.rooms.len(), 2);
    assert_eq!(transcript.total_calls(), 3 + 3 * 2);
    assert_eq!(transcript.call_count(TemplateId::FloorPlan), 1);
    assert_eq!(transcript.call_count(TemplateId::Doorway), 1);
    assert_eq!(transcript.call_count(TemplateId::Window), 1);
    assert_eq!(transcript.call_count(TemplateId::ObjectSelection), 2);
    assert_eq!(transcript.call_count(TemplateId::Layout), 2);
    assert_eq!(transcript.call_count(TemplateId::WallSmall), 2);
}

#[test]
fn studio_and_house_call_budgets() {
    let (doc, transcript, _) = run_script("studio", "a studio apartment for a musician", 1, 0);
    assert_eq!(doc.plan.rooms.len(), 1);
    assert_eq!(transcript.total_calls(), 6);

    let (doc, transcript, _) = run_script(
        "house",
        "a small house with a living room, kitchen, and bedroom",
        1,
        0,
    );
    assert_eq!(doc.plan.rooms.len(), 3);
    assert_eq!(transcript.total_calls(), 12);
}

#[test]
fn apartment_scene_has_expected_structure() {
    let (doc, _, dims) = run_script(
        "apartment",
        "a 1b1b apartment of a researcher who has a cat",
        1,
        0,
    );
    // The cat tower from the running example must be retrieved exactly.
    let cat = doc
        .objects
        .iter()
        .find(|o| o.instance_id == "cat tower-0")
        .expect("cat tower placed");
    assert_eq!(cat.asset_id, "cat-tower-multilevel");
    // Wall objects exist with parents.
    let painting = doc
        .objects
        .iter()
        .find(|o| o.instance_id == "painting-0")
        .expect("painting placed");
    assert_eq!(painting.parent.as_deref(), Some("sofa-0"));
    // All floor objects respect hard constraints inside their rooms.
    for room in &doc.plan.rooms {
        let bounds = room.bounds();
        let fps: Vec<_> = scenegen_core::gateway::floor_footprints(&doc, &dims)
            .into_iter()
            .filter(|(id, _)| {
                doc.objects
                    .iter()
                    .any(|o| &o.instance_id == id && o.room == room.name)
            })
            .collect();
        for (i, (ida, a)) in fps.iter().enumerate() {
            assert!(
                bounds.contains_rect(&a.aabb()),
                "{} leaves {}",
                ida,
                room.name
            );
            for (idb, b) in fps.iter().skip(i + 1) {
                assert!(!a.aabb().overlaps(&b.aabb()), "{} overlaps {}", ida, idb);
            }
        }
    }
    // Materials resolve against the built-in catalogs.
    let mc = MaterialCatalog::builtin();
    for m in &doc.materials {
        assert!(mc.contains(&m.floor), "floor material: {:?}", m.floor);
        assert!(mc.contains(&m.wall), "wall material: {:?}", m.wall);
    }
    // Exactly one exterior door.
    assert!(doc.doors.iter().any(|d| d.spec.touches_exterior()));
}

#[test]
fn pipeline_is_deterministic_across_runs_and_threads() {
    let prompt = "a 1b1b apartment of a researcher who has a cat";
    let (doc1, t1, _) = run_script("apartment", prompt, 1, 0);
    let (doc2, t2, _) = run_script("apartment", prompt, 1, 0);
    let (doc4, t4, _) = run_script("apartment", prompt, 4, 0);
    assert_eq!(export_scene(&doc1), export_scene(&doc2));
    assert_eq!(export_scene(&doc1), export_scene(&doc4));
    assert_eq!(t1.to_text(), t2.to_text());
    assert_eq!(t1.to_text(), t4.to_text());
}

#[test]
fn scene_document_round_trips_through_text() {
    let (doc, _, dims) = run_script(
        "apartment",
        "a 1b1b apartment of a researcher who has a cat",
        1,
        7,
    );
    let text = export_scene(&doc);
    let parsed = parse_scene(&text).unwrap();
    assert_eq!(parsed, doc);
    assert_eq!(export_scene(&parsed), text);
    // The SVG renders all object labels.
    let svg = render_svg(&doc, &dims);
    for o in &doc.objects {
        assert!(svg.contains(&o.instance_id), "missing label {}", o.instance_id);
    }
}

#[test]
fn recorded_fixtures_replay_through_the_hash_backend() {
    let out = tempfile::tempdir().unwrap();
    let catalog = load_catalog();
    let materials = MaterialCatalog::builtin();
    let provider = MockProvider::default();
    let prompt = "a studio apartment for a musician";
    let mut config = PipelineConfig::default();
    config.budget.max_candidates = 400;
    let (doc_script, _) = record_fixtures(
        &fixtures_root().join("llm/studio"),
        out.path(),
        prompt,
        "N/A",
        &catalog,
        &materials,
        &provider,
        config.clone(),
        0,
    )
    .unwrap();

    let backend = FixtureBackend::new(out.path());
    let (doc_replayed, transcript, _) = run_pipeline(
        prompt,
        "N/A",
        &backend,
        &catalog,
        &materials,
        &provider,
        config,
        0,
    )
    .unwrap();
    assert_eq!(export_scene(&doc_script), export_scene(&doc_replayed));
    assert_eq!(transcript.total_calls(), 6);
}

#[test]
fn fixture_miss_aborts_with_the_stage_name() {
    let dir = tempfile::tempdir().unwrap();
    let catalog = load_catalog();
    let materials = MaterialCatalog::builtin();
    let provider = MockProvider::default();
    let backend = FixtureBackend::new(dir.path());
    let failure = run_pipeline(
        "a studio apartment for a musician",
        "N/A",
        &backend,
        &catalog,
        &materials,
        &provider,
        PipelineConfig::default(),
        0,
    )
    .unwrap_err();
    match &failure.error {
        PipelineError::Gateway(GatewayError::FixtureMiss { stage, .. }) => {
            assert_eq!(stage, "floor_plan");
        }
        other => panic!("expected FixtureMiss, got {:?}", other),
    }
    // The failure carries the transcript up to the abort: the very first
    // call missed, so nothing was recorded.
    assert_eq!(failure.transcript.total_calls(), 0);
}

#[test]
fn mid_run_failure_keeps_the_transcript_so_far() {
    // Copy the studio script but drop the layout response: the pipeline
    // aborts in room 1 after the house calls and the selection call.
    let broken = tempfile::tempdir().unwrap();
    for entry in std::fs::read_dir(fixtures_root().join("llm/studio")).unwrap() {
        let path = entry.unwrap().path();
        let name = path.file_name().unwrap().to_string_lossy().to_string();
        if name.starts_with("layout__") {
            continue;
        }
        std::fs::copy(&path, broken.path().join(name)).unwrap();
    }
    let catalog = load_catalog();
    let materials = MaterialCatalog::builtin();
    let provider = MockProvider::default();
    let backend = ScriptBackend::new(broken.path());
    let failure = run_pipeline(
        "a studio apartment for a musician",
        "N/A",
        &backend,
        &catalog,
        &materials,
        &provider,
        PipelineConfig::default(),
        0,
    )
    .unwrap_err();
    assert!(matches!(
        failure.error,
        PipelineError::Gateway(GatewayError::FixtureMiss { .. })
    ));
    // 3 house calls plus the room's object-selection call made it in.
    assert_eq!(failure.transcript.total_calls(), 4);
    assert_eq!(failure.transcript.call_count(TemplateId::ObjectSelection), 1);
}

#[test]
fn wall_objects_avoid_window_intervals() {
    let (doc, _, _) = run_script(
        "apartment",
        "a 1b1b apartment of a researcher who has a cat",
        1,
        0,
    );
    let window_intervals: Vec<_> = doc.windows.iter().map(|w| w.interval()).collect();
    let door_intervals: Vec<_> = doc.doors.iter().map(|d| d.interval()).collect();
    for o in doc.objects.iter().filter(|o| o.kind == scenegen_core::scene::ObjectKind::Wall) {
        // Reconstruct the 1D interval of the wall object.
        let w = 0.9; // widest wall asset in the fixture catalog
        let vertical = doc
            .plan
            .room(&o.room)
            .map(|r| {
                let b = r.bounds();
                (o.position.0 - b.min.x).abs() < 1e-9 || (o.position.0 - b.max.x).abs() < 1e-9
            })
            .unwrap_or(false);
        let (fixed, center) = if vertical {
            (o.position.0, o.position.1)
        } else {
            (o.position.1, o.position.0)
        };
        let mine = scenegen_core::openings::OpeningInterval {
            vertical,
            fixed,
            lo: center - w / 2.0,
            hi: center + w / 2.0,
        };
        for iv in window_intervals.iter().chain(door_intervals.iter()) {
            assert!(!iv.collides(&mine), "wall object {} collides", o.instance_id);
        }
    }
    let _ = Rect::new(
        scenegen_core::geometry::Point2::new(0.0, 0.0),
        scenegen_core::geometry::Point2::new(1.0, 1.0),
    );
}

#[test]
fn ceiling_objects_hang_at_room_center() {
    let (doc, _, _) = run_script("studio", "a studio apartment for a musician", 1, 0);
    let pendant = doc
        .objects
        .iter()
        .find(|o| o.kind == scenegen_core::scene::ObjectKind::Ceiling)
        .expect("ceiling object placed");
    assert_eq!(pendant.asset_id, "pendant-light-glass");
    // Room center of the 6x6 studio, at wall height.
    assert_eq!(pendant.position, (3.0, 3.0, 3.0));
}

#[test]
fn repeated_object_names_across_rooms_stay_distinct() {
    // Two bedrooms whose layout responses both speak of bed-0: the merged
    // document must qualify the second occurrence instead of colliding.
    let script = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        std::fs::write(script.path().join(name), body).unwrap();
    };
    write(
        "floor_plan.txt",
        "bedroom east | oak hardwood, matte | warm white drywall, smooth | [(0, 0), (0, 5), (4, 5), (4, 0)]\n\
         bedroom west | oak hardwood, matte | warm white drywall, smooth | [(4, 0), (4, 5), (8, 5), (8, 0)]\n\n3.0\n",
    );
    write(
        "doorway.txt",
        "exterior | bedroom east | doorway | single | white painted panel door\n\
         bedroom east | bedroom west | doorway | single | white painted panel door\n",
    );
    write("window.txt", "bedroom east | south | slider | (120, 91) | 1 | 90\n");
    let selection = r#"{
    "bed": {
        "description": "a queen size bed with oak frame",
        "location": "floor",
        "size": [200, 160, 110],
        "quantity": 1,
        "variance_type": "same",
        "objects_on_top": [{"object_name": "alarm clock", "quantity": 1, "variance_type": "same"}]
    }
}"#;
    let layout = "bed-0 | edge\n";
    let wall_small = "alarm clock | on, bed-0 | quantity, 1\n";
    for room in ["bedroom_east", "bedroom_west"] {
        write(&format!("object_selection__{}.txt", room), selection);
        write(&format!("layout__{}.txt", room), layout);
        write(&format!("wall_small__{}.txt", room), wall_small);
    }

    let catalog = load_catalog();
    let materials = MaterialCatalog::builtin();
    let provider = MockProvider::default();
    let backend = ScriptBackend::new(script.path());
    let mut config = PipelineConfig::default();
    config.budget.max_candidates = 200;
    let (doc, transcript, dims) = run_pipeline(
        "a pair of twin bedrooms",
        "N/A",
        &backend,
        &catalog,
        &materials,
        &provider,
        config,
        0,
    )
    .unwrap();
    assert_eq!(transcript.total_calls(), 9);

    // Every instance id is unique, and the second bed is room-qualified.
    let mut ids: Vec<&str> = doc.objects.iter().map(|o| o.instance_id.as_str()).collect();
    ids.sort_unstable();
    let before = ids.len();
    ids.dedup();
    assert_eq!(ids.len(), before, "duplicate instance ids in {:?}", ids);
    assert!(doc.objects.iter().any(|o| o.instance_id == "bed-0"));
    assert!(doc.objects.iter().any(|o| o.instance_id == "bed-0@bedroom west"));
    // The qualified bed's alarm clock points at the qualified parent.
    let clock = doc
        .objects
        .iter()
        .find(|o| o.instance_id == "alarm clock-0@bedroom west")
        .expect("qualified alarm clock");
    assert_eq!(clock.parent.as_deref(), Some("bed-0@bedroom west"));
    // Dimension lookups survived the rename.
    assert!(dims.contains_key("bed-0@bedroom west"));
}
