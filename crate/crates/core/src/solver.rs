//! Floor-object layout solvers.
//!
//! The main strategy places objects autoregressively with depth-first search
//! over a position grid: the anchor object is tried across the whole grid at
//! all four yaws, then each remaining object is placed in dependency order,
//! trying its candidate cells best-score-first. Hard constraints (no
//! collisions, stay inside the room) prune candidates outright; soft
//! constraints only affect the score. Three baseline strategies (random,
//! edge, absolute pass-through) sit behind the same [`Layout`] result type.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::{score_placement_lenient, PredicateParams, SceneGraph};
use crate::geometry::{Footprint, Point2, Rect, Yaw};

/// Penalty subtracted from a layout's score for every object that could not
/// be placed, chosen so complete layouts always outrank partial ones.
pub const DROP_PENALTY: i64 = 10;

/// Footprint dimensions of one object to place, in meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectDims {
    pub id: String,
    pub width_m: f64,
    pub depth_m: f64,
}

impl ObjectDims {
    pub fn new(id: impl Into<String>, width_m: f64, depth_m: f64) -> Self {
        Self {
            id: id.into(),
            width_m,
            depth_m,
        }
    }

    pub fn area(&self) -> f64 {
        self.width_m * self.depth_m
    }
}

/// Search budget. `max_candidates` bounds the number of candidate layouts
/// (complete or partial) the search may visit; the optional wall clock is
/// nondeterministic and therefore off by default.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Budget {
    pub max_candidates: usize,
    pub wall_clock_seconds: Option<f64>,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_candidates: 10_000,
            wall_clock_seconds: None,
        }
    }
}

/// One room's placement task.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacementProblem {
    pub room: Rect,
    pub objects: Vec<ObjectDims>,
    pub graph: SceneGraph,
    pub params: PredicateParams,
    pub grid_step_m: f64,
    pub budget: Budget,
}

impl PlacementProblem {
    pub fn new(room: Rect, objects: Vec<ObjectDims>, graph: SceneGraph) -> Self {
        Self {
            room,
            objects,
            graph,
            params: PredicateParams::default(),
            grid_step_m: 0.25,
            budget: Budget::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// Objects that could not be placed anywhere.
    pub dropped: Vec<String>,
    /// Colliding pairs (absolute strategy only; the solvers never emit any).
    pub collisions: Vec<(String, String)>,
    /// Objects whose bounds leave the room (absolute strategy only).
    pub out_of_bounds: Vec<String>,
    pub notes: Vec<String>,
}

/// A solved (or passed-through) arrangement. `score` counts satisfied soft
/// constraints of placed objects minus [`DROP_PENALTY`] per dropped object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Layout {
    pub placements: BTreeMap<String, Footprint>,
    pub score: i64,
    pub complete: bool,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Error, PartialEq)]
pub enum SolverError {
    #[error("room is empty or degenerate")]
    EmptyRoom,
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
}

/// Scores an existing arrangement with the same rules the solvers use:
/// satisfied in-plane constraints of placed objects, minus the drop penalty
/// for graph objects that are absent.
pub fn score_layout(
    placements: &BTreeMap<String, Footprint>,
    graph: &SceneGraph,
    room: &Rect,
    params: &PredicateParams,
) -> i64 {
    let mut score: i64 = 0;
    for spec in &graph.specs {
        match placements.get(&spec.object_id) {
            Some(fp) => {
                score += score_placement_lenient(spec, fp, placements, room, params) as i64;
            }
            None => score -= DROP_PENALTY,
        }
    }
    score
}

/// Monotonic mapping from a float to an orderable integer, for tie-breaks.
fn f64_key(v: f64) -> u64 {
    let b = v.to_bits();
    if b >> 63 == 1 {
        !b
    } else {
        b | (1 << 63)
    }
}

type LayoutKey = Vec<(String, u64, u64, u32)>;
type BestComplete = (i64, LayoutKey, BTreeMap<String, Footprint>);
type BestPartial = (i64, LayoutKey, BTreeMap<String, Footprint>, Vec<String>);

fn layout_key(placements: &BTreeMap<String, Footprint>) -> LayoutKey {
    placements
        .iter()
        .map(|(id, f)| {
            (
                id.clone(),
                f64_key(f.center.x),
                f64_key(f.center.y),
                f.yaw.degrees(),
            )
        })
        .collect()
}

/// Candidate center coordinates along one axis for an object of half-extent
/// `half` inside `[lo, hi]`: grid multiples of `step` starting flush at the
/// low wall, plus the flush-at-high-wall position. Empty when the object
/// does not fit.
fn axis_centers(lo: f64, hi: f64, half: f64, step: f64) -> Vec<f64> {
    let first = lo + half;
    let last = hi - half;
    if last < first - 1e-12 {
        return Vec::new();
    }
    let mut out = Vec::new();
    let steps = ((last - first) / step + 1e-9).floor() as usize;
    for k in 0..=steps {
        // The clamp keeps rounding from pushing the last grid point past
        // the flush position, which would leave the room.
        out.push((first + k as f64 * step).min(last));
    }
    if last - out[out.len() - 1] > 1e-9 {
        out.push(last);
    }
    out
}

/// All in-room placements of an object on the grid, across the four yaws.
pub(crate) fn candidate_footprints(room: &Rect, dims: &ObjectDims, step: f64) -> Vec<Footprint> {
    let mut out = Vec::new();
    for yaw in Yaw::ALL {
        let probe = Footprint::new(Point2::new(0.0, 0.0), dims.width_m, dims.depth_m, yaw);
        let hx = probe.half_extent_x();
        let hy = probe.half_extent_y();
        let xs = axis_centers(room.min.x, room.max.x, hx, step);
        let ys = axis_centers(room.min.y, room.max.y, hy, step);
        for &x in &xs {
            for &y in &ys {
                let fp = Footprint::new(Point2::new(x, y), dims.width_m, dims.depth_m, yaw);
                // Containment is re-checked rather than assumed: for
                // irrational extents, reconstructing center + half can land
                // one ulp outside the room.
                if room.contains_rect(&fp.aabb()) {
                    out.push(fp);
                }
            }
        }
    }
    out
}

fn validate_problem(p: &PlacementProblem) -> Result<(), SolverError> {
    if p.room.width() <= 0.0 || p.room.height() <= 0.0 {
        return Err(SolverError::EmptyRoom);
    }
    if p.grid_step_m <= 0.0 || p.grid_step_m.is_nan() {
        return Err(SolverError::InvalidProblem("grid step must be positive".into()));
    }
    p.params
        .validate()
        .map_err(SolverError::InvalidProblem)?;
    let graph_ids: Vec<&str> = p.graph.object_ids();
    for o in &p.objects {
        if !(o.width_m > 0.0 && o.depth_m > 0.0) {
            return Err(SolverError::InvalidProblem(format!(
                "object '{}' has non-positive dimensions",
                o.id
            )));
        }
        if !graph_ids.contains(&o.id.as_str()) {
            return Err(SolverError::InvalidProblem(format!(
                "object '{}' has no constraint spec",
                o.id
            )));
        }
    }
    for id in graph_ids {
        if !p.objects.iter().any(|o| o.id == id) {
            return Err(SolverError::InvalidProblem(format!(
                "constraint spec '{}' has no object dimensions",
                id
            )));
        }
    }
    Ok(())
}

/// Placement order: the anchor first, then a dependency-respecting order
/// that prefers larger footprints (stable toward graph order on equal area).
fn placement_order(p: &PlacementProblem) -> Vec<usize> {
    let n = p.graph.specs.len();
    if n == 0 {
        return Vec::new();
    }
    let area = |i: usize| -> f64 {
        let id = &p.graph.specs[i].object_id;
        p.objects
            .iter()
            .find(|o| &o.id == id)
            .map(ObjectDims::area)
            .unwrap_or(0.0)
    };
    let mut order = vec![0usize];
    let mut placed: Vec<&str> = vec![p.graph.specs[0].object_id.as_str()];
    let mut remaining: Vec<usize> = (1..n).collect();
    while !remaining.is_empty() {
        let mut best: Option<usize> = None;
        for (pos, &i) in remaining.iter().enumerate() {
            let ready = p.graph.specs[i]
                .relations
                .iter()
                .filter_map(|r| r.target())
                .all(|t| placed.contains(&t));
            if !ready {
                continue;
            }
            best = match best {
                None => Some(pos),
                Some(b) => {
                    let (ai, ab) = (area(i), area(remaining[b]));
                    if ab < ai - 1e-12 {
                        Some(pos)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        // Dependency order was validated at parse time, so something is
        // always ready.
        let pos = best.expect("dependency order guarantees a ready object");
        let i = remaining.remove(pos);
        placed.push(p.graph.specs[i].object_id.as_str());
        order.push(i);
    }
    order
}

struct DfsSearch<'a> {
    p: &'a PlacementProblem,
    order: Vec<usize>,
    rng: ChaCha8Rng,
    leaves: usize,
    stopped: bool,
    deadline: Option<Instant>,
    best_complete: Option<BestComplete>,
    best_partial: Option<BestPartial>,
}

impl<'a> DfsSearch<'a> {
    fn object(&self, graph_idx: usize) -> &ObjectDims {
        let id = &self.p.graph.specs[graph_idx].object_id;
        self.p.objects.iter().find(|o| &o.id == id).unwrap()
    }

    fn record_leaf(
        &mut self,
        placed: &BTreeMap<String, Footprint>,
        score: i64,
        dropped: &[String],
    ) {
        self.leaves += 1;
        if self.leaves >= self.p.budget.max_candidates {
            self.stopped = true;
        }
        if let Some(deadline) = self.deadline {
            if Instant::now() >= deadline {
                self.stopped = true;
            }
        }
        let key = layout_key(placed);
        if dropped.is_empty() {
            let better = match &self.best_complete {
                None => true,
                Some((bs, bk, _)) => score > *bs || (score == *bs && key < *bk),
            };
            if better {
                self.best_complete = Some((score, key, placed.clone()));
            }
        } else {
            let total = score - DROP_PENALTY * dropped.len() as i64;
            let better = match &self.best_partial {
                None => true,
                Some((bs, bk, _, _)) => total > *bs || (total == *bs && key < *bk),
            };
            if better {
                self.best_partial = Some((total, key, placed.clone(), dropped.to_vec()));
            }
        }
    }

    fn dfs(
        &mut self,
        depth: usize,
        placed: &mut BTreeMap<String, Footprint>,
        score: i64,
        dropped: &mut Vec<String>,
    ) {
        if self.stopped {
            return;
        }
        if depth == self.order.len() {
            self.record_leaf(placed, score, dropped);
            return;
        }
        let graph_idx = self.order[depth];
        let spec = &self.p.graph.specs[graph_idx];
        let dims = self.object(graph_idx).clone();

        let mut candidates: Vec<(u32, Footprint)> = Vec::new();
        for fp in candidate_footprints(&self.p.room, &dims, self.p.grid_step_m) {
            let aabb = fp.aabb();
            if placed.values().any(|other| aabb.overlaps(&other.aabb())) {
                continue;
            }
            let s = score_placement_lenient(spec, &fp, placed, &self.p.room, &self.p.params);
            candidates.push((s, fp));
        }

        if candidates.is_empty() {
            dropped.push(spec.object_id.clone());
            self.dfs(depth + 1, placed, score, dropped);
            dropped.pop();
            return;
        }

        // Best score first; the pre-shuffle randomizes order among equal
        // scores (stable sort keeps the shuffled order inside each tier).
        candidates.shuffle(&mut self.rng);
        candidates.sort_by_key(|(s, _)| std::cmp::Reverse(*s));

        for (s, fp) in candidates {
            if self.stopped {
                return;
            }
            placed.insert(spec.object_id.clone(), fp);
            self.dfs(depth + 1, placed, score + s as i64, dropped);
            placed.remove(&spec.object_id);
        }
    }
}

/// Depth-first constraint-satisfaction search. Deterministic for a fixed
/// (problem, seed) under the candidate budget; the optional wall-clock
/// budget trades determinism for the original fixed-time behaviour.
pub fn solve_dfs(p: &PlacementProblem, seed: u64) -> Result<Layout, SolverError> {
    validate_problem(p)?;
    let mut diagnostics = Diagnostics::default();

    // Objects that cannot fit the room at any yaw are dropped up front.
    let mut order = placement_order(p);
    order.retain(|&i| {
        let spec = &p.graph.specs[i];
        let dims = p.objects.iter().find(|o| o.id == spec.object_id).unwrap();
        let fits = !candidate_footprints(&p.room, dims, p.grid_step_m).is_empty();
        if !fits {
            diagnostics
                .notes
                .push(format!("object '{}' is larger than the room", spec.object_id));
            diagnostics.dropped.push(spec.object_id.clone());
        }
        fits
    });

    let mut search = DfsSearch {
        p,
        order,
        rng: ChaCha8Rng::seed_from_u64(seed),
        leaves: 0,
        stopped: false,
        deadline: p
            .budget
            .wall_clock_seconds
            .map(|s| Instant::now() + Duration::from_secs_f64(s)),
        best_complete: None,
        best_partial: None,
    };
    let mut placed = BTreeMap::new();
    let mut dropped = Vec::new();
    search.dfs(0, &mut placed, 0, &mut dropped);

    let oversized = diagnostics.dropped.clone();
    let layout = match (search.best_complete, search.best_partial) {
        (Some((score, _, placements)), _) if oversized.is_empty() => Layout {
            placements,
            score,
            complete: true,
            diagnostics,
        },
        (Some((score, _, placements)), _) => Layout {
            score: score - DROP_PENALTY * oversized.len() as i64,
            placements,
            complete: false,
            diagnostics,
        },
        (None, Some((score, _, placements, search_dropped))) => {
            for id in search_dropped {
                if !diagnostics.dropped.contains(&id) {
                    diagnostics.dropped.push(id);
                }
            }
            Layout {
                score: score - DROP_PENALTY * oversized.len() as i64,
                placements,
                complete: false,
                diagnostics,
            }
        }
        (None, None) => Layout {
            placements: BTreeMap::new(),
            score: -DROP_PENALTY * oversized.len() as i64,
            complete: oversized.is_empty(),
            diagnostics,
        },
    };
    assert!(hard_constraints_hold(&layout, &p.room));
    Ok(layout)
}

/// True when every placed object is inside the room and no two interiors
/// intersect.
pub fn hard_constraints_hold(layout: &Layout, room: &Rect) -> bool {
    let fps: Vec<&Footprint> = layout.placements.values().collect();
    for (i, f) in fps.iter().enumerate() {
        if !room.contains_rect(&f.aabb()) {
            return false;
        }
        for g in fps.iter().skip(i + 1) {
            if f.aabb().overlaps(&g.aabb()) {
                return false;
            }
        }
    }
    true
}

/// Baseline: rejection-sample uniform positions and yaws, keeping the first
/// collision-free in-room placement per object (1000 attempts each). The
/// score is reported but plays no role in placement.
pub fn solve_random(p: &PlacementProblem, seed: u64) -> Result<Layout, SolverError> {
    validate_problem(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut placements: BTreeMap<String, Footprint> = BTreeMap::new();
    let mut diagnostics = Diagnostics::default();

    for dims in &p.objects {
        let mut placed = false;
        for _ in 0..1000 {
            let yaw = Yaw::ALL[rng.gen_range(0..4)];
            let x = rng.gen_range(p.room.min.x..=p.room.max.x);
            let y = rng.gen_range(p.room.min.y..=p.room.max.y);
            let fp = Footprint::new(Point2::new(x, y), dims.width_m, dims.depth_m, yaw);
            let aabb = fp.aabb();
            if !p.room.contains_rect(&aabb) {
                continue;
            }
            if placements.values().any(|o| aabb.overlaps(&o.aabb())) {
                continue;
            }
            placements.insert(dims.id.clone(), fp);
            placed = true;
            break;
        }
        if !placed {
            diagnostics.dropped.push(dims.id.clone());
        }
    }

    let complete = diagnostics.dropped.is_empty();
    let score = score_layout(&placements, &p.graph, &p.room, &p.params);
    Ok(Layout {
        placements,
        score,
        complete,
        diagnostics,
    })
}

/// Baseline: a greedy perimeter walk that puts objects flush against the
/// walls, back to the wall, in input order. Objects that fit nowhere on the
/// perimeter are dropped.
pub fn solve_edge(p: &PlacementProblem, _seed: u64) -> Result<Layout, SolverError> {
    validate_problem(p)?;
    let mut placements: BTreeMap<String, Footprint> = BTreeMap::new();
    let mut diagnostics = Diagnostics::default();
    let r = &p.room;
    let step = p.grid_step_m;

    // (yaw with the back to this wall, walk start, walk is decreasing?)
    // Walls in perimeter order: south, east, north, west.
    #[derive(Clone, Copy)]
    enum Wall {
        South,
        East,
        North,
        West,
    }
    let walls = [Wall::South, Wall::East, Wall::North, Wall::West];
    let mut cursors = [r.min.x, r.min.y, r.max.x, r.max.y];

    'objects: for dims in &p.objects {
        for (wi, wall) in walls.iter().enumerate() {
            let (yaw, wall_lo, wall_hi, decreasing) = match wall {
                Wall::South => (Yaw::Deg0, r.min.x, r.max.x, false),
                Wall::East => (Yaw::Deg270, r.min.y, r.max.y, false),
                Wall::North => (Yaw::Deg180, r.min.x, r.max.x, true),
                Wall::West => (Yaw::Deg90, r.min.y, r.max.y, true),
            };
            let w = dims.width_m;
            let d = dims.depth_m;
            let cross_extent = match wall {
                Wall::South | Wall::North => r.height(),
                Wall::East | Wall::West => r.width(),
            };
            if d > cross_extent || w > wall_hi - wall_lo {
                continue;
            }
            let mut cursor = cursors[wi];
            loop {
                let (along_ok, along_center) = if decreasing {
                    (cursor - w >= wall_lo - 1e-9, cursor - w / 2.0)
                } else {
                    (cursor + w <= wall_hi + 1e-9, cursor + w / 2.0)
                };
                if !along_ok {
                    break;
                }
                let center = match wall {
                    Wall::South => Point2::new(along_center, r.min.y + d / 2.0),
                    Wall::East => Point2::new(r.max.x - d / 2.0, along_center),
                    Wall::North => Point2::new(along_center, r.max.y - d / 2.0),
                    Wall::West => Point2::new(r.min.x + d / 2.0, along_center),
                };
                let fp = Footprint::new(center, w, d, yaw);
                let aabb = fp.aabb();
                if r.contains_rect(&aabb)
                    && !placements.values().any(|o| aabb.overlaps(&o.aabb()))
                {
                    placements.insert(dims.id.clone(), fp);
                    cursors[wi] = if decreasing { cursor - w } else { cursor + w };
                    continue 'objects;
                }
                cursor = if decreasing { cursor - step } else { cursor + step };
            }
        }
        diagnostics.dropped.push(dims.id.clone());
    }

    let complete = diagnostics.dropped.is_empty();
    let score = score_layout(&placements, &p.graph, &p.room, &p.params);
    Ok(Layout {
        placements,
        score,
        complete,
        diagnostics,
    })
}

/// Baseline: pass provided absolute placements through unchanged, reporting
/// out-of-bounds objects and colliding pairs in the diagnostics. No repair
/// is attempted.
pub fn apply_absolute(room: &Rect, provided: &BTreeMap<String, Footprint>) -> Layout {
    let mut diagnostics = Diagnostics::default();
    let items: Vec<(&String, &Footprint)> = provided.iter().collect();
    for (id, fp) in &items {
        if !room.contains_rect(&fp.aabb()) {
            diagnostics.out_of_bounds.push((*id).clone());
        }
    }
    for i in 0..items.len() {
        for j in (i + 1)..items.len() {
            if items[i].1.aabb().overlaps(&items[j].1.aabb()) {
                diagnostics
                    .collisions
                    .push((items[i].0.clone(), items[j].0.clone()));
            }
        }
    }
    Layout {
        placements: provided.clone(),
        score: 0,
        complete: true,
        diagnostics,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::{eval_constraint, parse_scene_graph, Constraint};

    fn room(w: f64, h: f64) -> Rect {
        Rect::new(Point2::new(0.0, 0.0), Point2::new(w, h))
    }

    fn problem(room_wh: (f64, f64), objects: Vec<ObjectDims>, graph: &str) -> PlacementProblem {
        let mut p = PlacementProblem::new(
            room(room_wh.0, room_wh.1),
            objects,
            parse_scene_graph(graph).unwrap(),
        );
        p.grid_step_m = 0.5;
        p.budget.max_candidates = 500;
        p
    }

    #[test]
    fn single_edge_object_hugs_a_wall() {
        let p = problem((4.0, 4.0), vec![ObjectDims::new("box-0", 1.0, 1.0)], "box-0 | edge");
        let layout = solve_dfs(&p, 0).unwrap();
        assert!(layout.complete);
        assert_eq!(layout.score, 1);
        let fp = layout.placements["box-0"];
        assert!(p.room.boundary_gap(&fp.aabb()) <= p.params.edge_max_wall_gap_m);
    }

    #[test]
    fn oversized_object_is_dropped() {
        let p = problem(
            (4.0, 4.0),
            vec![ObjectDims::new("slab-0", 5.0, 5.0)],
            "slab-0 | middle",
        );
        let layout = solve_dfs(&p, 0).unwrap();
        assert!(!layout.complete);
        assert!(layout.placements.is_empty());
        assert_eq!(layout.diagnostics.dropped, vec!["slab-0".to_string()]);
        assert_eq!(layout.score, -DROP_PENALTY);
    }

    #[test]
    fn bedroom_fixture_solves_and_anchors_the_bed() {
        let graph = "\
bed-0 | edge
nightstand-0 | edge | near, bed-0 | side of, bed-0
nightstand-1 | edge | near, bed-0 | side of, bed-0
dresser-0 | edge | far, bed-0 | face to, bed-0";
        let objects = vec![
            ObjectDims::new("bed-0", 1.6, 2.0),
            ObjectDims::new("nightstand-0", 0.45, 0.45),
            ObjectDims::new("nightstand-1", 0.45, 0.45),
            ObjectDims::new("dresser-0", 1.2, 0.5),
        ];
        let mut p = problem((4.0, 5.0), objects, graph);
        p.budget.max_candidates = 2000;
        let layout = solve_dfs(&p, 1).unwrap();
        assert!(layout.complete, "diagnostics: {:?}", layout.diagnostics);
        assert!(hard_constraints_hold(&layout, &p.room));
        // Anchor placement is unaffected by later objects: the bed satisfies
        // its only constraint.
        let bed = layout.placements["bed-0"];
        assert!(
            eval_constraint(&Constraint::Edge, &bed, None, &p.room, &p.params).unwrap()
        );
        // 4 objects, 10 constraints total; demand most of them.
        assert!(layout.score >= 8, "score {}", layout.score);
    }

    #[test]
    fn determinism_same_seed_same_layout() {
        let graph = "\
table-0 | middle
chair-0 | middle | near, table-0 | face to, table-0
chair-1 | middle | near, table-0 | face to, table-0";
        let objects = vec![
            ObjectDims::new("table-0", 1.2, 0.8),
            ObjectDims::new("chair-0", 0.5, 0.5),
            ObjectDims::new("chair-1", 0.5, 0.5),
        ];
        let p = problem((5.0, 5.0), objects, graph);
        let a = solve_dfs(&p, 42).unwrap();
        let b = solve_dfs(&p, 42).unwrap();
        assert_eq!(a, b);
        let c = solve_dfs(&p, 43).unwrap();
        // Different seeds may produce different (equally scored) layouts.
        assert_eq!(a.score, c.score);
    }

    #[test]
    fn random_strategy_respects_hard_constraints() {
        let p = problem(
            (4.0, 4.0),
            vec![
                ObjectDims::new("a-0", 1.0, 1.0),
                ObjectDims::new("b-0", 1.5, 0.5),
            ],
            "a-0 | edge\nb-0 | edge",
        );
        let layout = solve_random(&p, 7).unwrap();
        assert!(layout.complete);
        assert!(hard_constraints_hold(&layout, &p.room));
        let again = solve_random(&p, 7).unwrap();
        assert_eq!(layout, again);
    }

    #[test]
    fn random_on_empty_object_list() {
        let p = problem((4.0, 4.0), vec![], "");
        let layout = solve_random(&p, 0).unwrap();
        assert!(layout.complete);
        assert!(layout.placements.is_empty());
        assert_eq!(layout.score, 0);
    }

    #[test]
    fn edge_strategy_places_everything_flush() {
        let objects = vec![
            ObjectDims::new("a-0", 1.0, 1.0),
            ObjectDims::new("b-0", 1.0, 1.0),
            ObjectDims::new("c-0", 1.0, 1.0),
            ObjectDims::new("d-0", 1.0, 1.0),
        ];
        let p = problem(
            (4.0, 4.0),
            objects,
            "a-0 | edge\nb-0 | edge\nc-0 | edge\nd-0 | edge",
        );
        let layout = solve_edge(&p, 0).unwrap();
        assert!(layout.complete, "diagnostics: {:?}", layout.diagnostics);
        assert!(hard_constraints_hold(&layout, &p.room));
        for fp in layout.placements.values() {
            assert_eq!(p.room.boundary_gap(&fp.aabb()), 0.0);
            assert!(eval_constraint(&Constraint::Edge, fp, None, &p.room, &p.params).unwrap());
        }
        assert_eq!(layout.score, 4);
    }

    #[test]
    fn edge_strategy_drops_object_wider_than_walls() {
        let p = problem(
            (4.0, 4.0),
            vec![ObjectDims::new("rail-0", 6.0, 0.3)],
            "rail-0 | edge",
        );
        let layout = solve_edge(&p, 0).unwrap();
        assert!(!layout.complete);
        assert_eq!(layout.diagnostics.dropped, vec!["rail-0".to_string()]);
    }

    #[test]
    fn absolute_reports_collisions_and_out_of_bounds() {
        let r = room(4.0, 4.0);
        let mut provided = BTreeMap::new();
        provided.insert(
            "a-0".to_string(),
            Footprint::new(Point2::new(1.0, 1.0), 1.5, 1.5, Yaw::Deg0),
        );
        provided.insert(
            "b-0".to_string(),
            Footprint::new(Point2::new(1.5, 1.5), 1.5, 1.5, Yaw::Deg0),
        );
        provided.insert(
            "c-0".to_string(),
            Footprint::new(Point2::new(4.5, 2.0), 1.0, 1.0, Yaw::Deg0),
        );
        let layout = apply_absolute(&r, &provided);
        assert_eq!(layout.placements.len(), 3);
        assert_eq!(layout.diagnostics.collisions, vec![("a-0".into(), "b-0".into())]);
        assert_eq!(layout.diagnostics.out_of_bounds, vec!["c-0".to_string()]);

        let all_valid: BTreeMap<String, Footprint> = provided
            .iter()
            .take(1)
            .map(|(k, v)| (k.clone(), *v))
            .collect();
        let ok = apply_absolute(&r, &all_valid);
        assert!(ok.diagnostics.collisions.is_empty());
        assert!(ok.diagnostics.out_of_bounds.is_empty());
    }

    #[test]
    fn dropped_targets_do_not_sink_dependents() {
        // The big table cannot fit; the chair referencing it must still land.
        let graph = "\
table-0 | middle
chair-0 | edge | near, table-0";
        let objects = vec![
            ObjectDims::new("table-0", 9.0, 9.0),
            ObjectDims::new("chair-0", 0.5, 0.5),
        ];
        let p = problem((4.0, 4.0), objects, graph);
        let layout = solve_dfs(&p, 0).unwrap();
        assert!(!layout.complete);
        assert!(layout.placements.contains_key("chair-0"));
        assert!(layout.diagnostics.dropped.contains(&"table-0".to_string()));
    }

    #[test]
    fn degenerate_room_is_rejected() {
        let degenerate = Rect {
            min: Point2::new(0.0, 0.0),
            max: Point2::new(0.0, 4.0),
        };
        let p = PlacementProblem::new(
            degenerate,
            vec![ObjectDims::new("a-0", 1.0, 1.0)],
            parse_scene_graph("a-0 | edge").unwrap(),
        );
        assert_eq!(solve_dfs(&p, 0).unwrap_err(), SolverError::EmptyRoom);
    }

    #[test]
    fn grid_includes_flush_positions() {
        let xs = axis_centers(0.0, 4.0, 0.45, 0.5);
        assert!((xs[0] - 0.45).abs() < 1e-12);
        assert!((xs.last().unwrap() - 3.55).abs() < 1e-12);
    }
}
