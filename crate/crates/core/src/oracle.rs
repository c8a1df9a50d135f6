//! Exhaustive reference search used by the test suites to verify the
//! solvers. Deliberately independent of the production search paths: it
//! enumerates the full cross product of grid placements with plain nested
//! recursion and no ordering heuristics, budgets, or pruning beyond the two
//! hard constraints.

use std::collections::BTreeMap;

use crate::constraints::score_placement_lenient;
use crate::geometry::{Footprint, Point2, Rect, Yaw};
use crate::solver::PlacementProblem;

/// Every grid placement of a `w x d` object inside `room`, all four yaws.
/// Grid positions run from flush-at-min in `step` increments, plus the
/// flush-at-max position.
pub fn enumerate_cells(room: &Rect, w: f64, d: f64, step: f64) -> Vec<Footprint> {
    let mut out = Vec::new();
    for yaw in Yaw::ALL {
        let (ex, ey) = if matches!(yaw, Yaw::Deg90 | Yaw::Deg270) {
            (d, w)
        } else {
            (w, d)
        };
        let (hx, hy) = (ex / 2.0, ey / 2.0);
        if room.width() < ex - 1e-12 || room.height() < ey - 1e-12 {
            continue;
        }
        let flush_x = room.max.x - hx;
        let mut xs = Vec::new();
        let mut x = room.min.x + hx;
        while x <= flush_x + 1e-9 {
            xs.push(x.min(flush_x));
            x += step;
        }
        if flush_x - xs.last().copied().unwrap_or(f64::NEG_INFINITY) > 1e-9 {
            xs.push(flush_x);
        }
        let flush_y = room.max.y - hy;
        let mut ys = Vec::new();
        let mut y = room.min.y + hy;
        while y <= flush_y + 1e-9 {
            ys.push(y.min(flush_y));
            y += step;
        }
        if flush_y - ys.last().copied().unwrap_or(f64::NEG_INFINITY) > 1e-9 {
            ys.push(flush_y);
        }
        for &cx in &xs {
            for &cy in &ys {
                let fp = Footprint::new(Point2::new(cx, cy), w, d, yaw);
                if room.contains_rect(&fp.aabb()) {
                    out.push(fp);
                }
            }
        }
    }
    out
}

/// Maximum total soft-constraint score over all complete grid layouts
/// (every object placed, hard constraints satisfied), or `None` when no
/// complete layout exists on the grid.
pub fn brute_force_optimum(p: &PlacementProblem) -> Option<i64> {
    let per_object: Vec<Vec<Footprint>> = p
        .graph
        .specs
        .iter()
        .map(|s| {
            let dims = p
                .objects
                .iter()
                .find(|o| o.id == s.object_id)
                .expect("object dims present");
            enumerate_cells(&p.room, dims.width_m, dims.depth_m, p.grid_step_m)
        })
        .collect();

    fn recurse(
        p: &PlacementProblem,
        per_object: &[Vec<Footprint>],
        depth: usize,
        placed: &mut BTreeMap<String, Footprint>,
        score: i64,
        best: &mut Option<i64>,
    ) {
        if depth == per_object.len() {
            *best = Some(best.map_or(score, |b: i64| b.max(score)));
            return;
        }
        let spec = &p.graph.specs[depth];
        for fp in &per_object[depth] {
            let aabb = fp.aabb();
            if placed.values().any(|o| aabb.overlaps(&o.aabb())) {
                continue;
            }
            let s = score_placement_lenient(spec, fp, placed, &p.room, &p.params) as i64;
            placed.insert(spec.object_id.clone(), *fp);
            recurse(p, per_object, depth + 1, placed, score + s, best);
            placed.remove(&spec.object_id);
        }
    }

    let mut best = None;
    let mut placed = BTreeMap::new();
    recurse(p, &per_object, 0, &mut placed, 0, &mut best);
    best
}
