//! The spatial-relation constraint taxonomy, its line-oriented DSL, and the
//! numeric predicate semantics shared by both layout solvers.
//!
//! Each object gets exactly one global constraint (`edge` or `middle`) plus
//! any number of relations targeting previously listed objects. Distances are
//! surface-to-surface gaps between axis-aligned bounding boxes, not
//! center-to-center distances, so large objects are judged by their visible
//! separation.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Footprint, Rect};

/// One spatial constraint. Relational variants carry the target object id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Constraint {
    Edge,
    Middle,
    Near(String),
    Far(String),
    InFrontOf(String),
    SideOf(String),
    Above(String),
    OnTopOf(String),
    CenterAligned(String),
    FaceTo(String),
}

impl Constraint {
    pub fn is_global(&self) -> bool {
        matches!(self, Constraint::Edge | Constraint::Middle)
    }

    pub fn target(&self) -> Option<&str> {
        match self {
            Constraint::Edge | Constraint::Middle => None,
            Constraint::Near(t)
            | Constraint::Far(t)
            | Constraint::InFrontOf(t)
            | Constraint::SideOf(t)
            | Constraint::Above(t)
            | Constraint::OnTopOf(t)
            | Constraint::CenterAligned(t)
            | Constraint::FaceTo(t) => Some(t),
        }
    }

    /// True for constraints the floor solvers can evaluate in-plane;
    /// `above` and `on top of` are resolved during scene assembly.
    pub fn in_plane(&self) -> bool {
        !matches!(self, Constraint::Above(_) | Constraint::OnTopOf(_))
    }

    pub fn dsl_name(&self) -> &'static str {
        match self {
            Constraint::Edge => "edge",
            Constraint::Middle => "middle",
            Constraint::Near(_) => "near",
            Constraint::Far(_) => "far",
            Constraint::InFrontOf(_) => "in front of",
            Constraint::SideOf(_) => "side of",
            Constraint::Above(_) => "above",
            Constraint::OnTopOf(_) => "on top of",
            Constraint::CenterAligned(_) => "center aligned",
            Constraint::FaceTo(_) => "face to",
        }
    }

    fn from_name(name: &str, target: String) -> Option<Constraint> {
        Some(match name {
            "near" => Constraint::Near(target),
            "far" => Constraint::Far(target),
            "in front of" => Constraint::InFrontOf(target),
            "side of" => Constraint::SideOf(target),
            "above" => Constraint::Above(target),
            "on top of" => Constraint::OnTopOf(target),
            "center aligned" => Constraint::CenterAligned(target),
            "face to" => Constraint::FaceTo(target),
            _ => return None,
        })
    }
}

/// All constraints of one object: the mandatory global plus its relations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstraintSpec {
    pub object_id: String,
    pub global: Constraint,
    pub relations: Vec<Constraint>,
}

impl ConstraintSpec {
    /// Global constraint followed by the relations, in DSL order.
    pub fn all(&self) -> impl Iterator<Item = &Constraint> {
        std::iter::once(&self.global).chain(self.relations.iter())
    }

    /// An anchor has only its global constraint.
    pub fn is_anchor(&self) -> bool {
        self.relations.is_empty()
    }
}

/// The per-room constraint list in dependency order: every relation targets
/// an object that appears earlier, so the first entry is always an anchor.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SceneGraph {
    pub specs: Vec<ConstraintSpec>,
}

impl SceneGraph {
    pub fn object_ids(&self) -> Vec<&str> {
        self.specs.iter().map(|s| s.object_id.as_str()).collect()
    }

    pub fn spec(&self, id: &str) -> Option<&ConstraintSpec> {
        self.specs.iter().find(|s| s.object_id == id)
    }

    /// Total number of constraints that the floor solvers can score.
    pub fn in_plane_constraint_count(&self) -> usize {
        self.specs
            .iter()
            .map(|s| 1 + s.relations.iter().filter(|r| r.in_plane()).count())
            .sum()
    }
}

/// Numeric thresholds behind the predicates. Near/far bounds follow the
/// prompt contract (near: 50 cm < d < 150 cm, far: d >= 150 cm); the rest are
/// tunable artifact defaults.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PredicateParams {
    pub near_min_m: f64,
    pub near_max_m: f64,
    pub far_min_m: f64,
    pub edge_max_wall_gap_m: f64,
    pub middle_min_wall_gap_m: f64,
    pub face_tolerance_deg: f64,
    pub align_tolerance_m: f64,
    pub front_lateral_slack_m: f64,
}

impl Default for PredicateParams {
    fn default() -> Self {
        Self {
            near_min_m: 0.5,
            near_max_m: 1.5,
            far_min_m: 1.5,
            edge_max_wall_gap_m: 0.3,
            middle_min_wall_gap_m: 0.5,
            face_tolerance_deg: 45.0,
            align_tolerance_m: 0.05,
            front_lateral_slack_m: 0.5,
        }
    }
}

impl PredicateParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.near_min_m >= self.near_max_m {
            return Err("near_min_m must be below near_max_m".into());
        }
        if self.near_max_m > self.far_min_m {
            return Err("near_max_m must not exceed far_min_m".into());
        }
        if self.edge_max_wall_gap_m >= self.middle_min_wall_gap_m {
            return Err("edge_max_wall_gap_m must be below middle_min_wall_gap_m".into());
        }
        if self.face_tolerance_deg <= 0.0 || self.face_tolerance_deg >= 90.0 {
            return Err("face_tolerance_deg must be in (0, 90)".into());
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DslError {
    #[error("line {lineno}: unknown constraint '{token}'")]
    UnknownConstraint { lineno: usize, token: String },
    #[error("object '{0}' is missing its global constraint (edge or middle)")]
    MissingGlobal(String),
    #[error("object '{object}' references '{target}' before it is defined")]
    ForwardReference { object: String, target: String },
    #[error("object '{0}' appears more than once")]
    DuplicateObject(String),
    #[error("line {lineno}: empty object id")]
    EmptyObject { lineno: usize },
}

/// Parses the `object | global constraint | constraint 1 | ...` layout DSL.
/// Whitespace around `|` and `,` is ignored; blank lines are skipped.
pub fn parse_scene_graph(text: &str) -> Result<SceneGraph, DslError> {
    let mut specs: Vec<ConstraintSpec> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('|').map(str::trim).collect();
        let object_id = fields[0].to_string();
        if object_id.is_empty() {
            return Err(DslError::EmptyObject { lineno });
        }
        if specs.iter().any(|s| s.object_id == object_id) {
            return Err(DslError::DuplicateObject(object_id));
        }
        let global = match fields.get(1).map(|s| s.to_ascii_lowercase()) {
            Some(g) if g == "edge" => Constraint::Edge,
            Some(g) if g == "middle" => Constraint::Middle,
            _ => return Err(DslError::MissingGlobal(object_id)),
        };
        let mut relations = Vec::new();
        for token in fields.iter().skip(2) {
            let (name, target) = match token.split_once(',') {
                Some((n, t)) => (n.trim().to_ascii_lowercase(), t.trim().to_string()),
                None => {
                    return Err(DslError::UnknownConstraint {
                        lineno,
                        token: token.to_string(),
                    })
                }
            };
            let constraint = Constraint::from_name(&name, target.clone()).ok_or_else(|| {
                DslError::UnknownConstraint {
                    lineno,
                    token: token.to_string(),
                }
            })?;
            if target.is_empty() {
                return Err(DslError::UnknownConstraint {
                    lineno,
                    token: token.to_string(),
                });
            }
            if !specs.iter().any(|s| s.object_id == target) {
                return Err(DslError::ForwardReference {
                    object: object_id.clone(),
                    target,
                });
            }
            relations.push(constraint);
        }
        specs.push(ConstraintSpec {
            object_id,
            global,
            relations,
        });
    }
    Ok(SceneGraph { specs })
}

/// Inverse of [`parse_scene_graph`]; byte-exact on canonically formatted
/// input (single spaces around `|`, `, ` between name and target).
pub fn serialize_scene_graph(graph: &SceneGraph) -> String {
    graph
        .specs
        .iter()
        .map(|spec| {
            let mut parts = vec![spec.object_id.clone(), spec.global.dsl_name().to_string()];
            for rel in &spec.relations {
                parts.push(format!("{}, {}", rel.dsl_name(), rel.target().unwrap()));
            }
            parts.join(" | ")
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("constraint '{0}' requires a target footprint")]
    MissingTarget(String),
    #[error("constraint '{0}' is out-of-plane and not supported by the floor solver")]
    UnsupportedInFloorSolver(String),
}

fn facing_components(of: &Footprint, to_point: (f64, f64)) -> (f64, f64) {
    let (fx, fy) = of.yaw.facing();
    let vx = to_point.0 - of.center.x;
    let vy = to_point.1 - of.center.y;
    // Forward projection and signed lateral (perpendicular) component.
    let forward = fx * vx + fy * vy;
    let lateral = fx * vy - fy * vx;
    (forward, lateral)
}

/// Evaluates one constraint for a subject footprint inside `room`.
///
/// Semantics:
/// - `edge`: smallest wall gap of the subject's bounds <= `edge_max_wall_gap_m`
/// - `middle`: smallest wall gap >= `middle_min_wall_gap_m`
/// - `near`: `near_min_m` < bounds gap < `near_max_m` (both strict)
/// - `far`: bounds gap >= `far_min_m`
/// - `center aligned`: |dx| <= tolerance or |dy| <= tolerance (centers)
/// - `face to`: the target center lies inside the subject's facing cone of
///   half-angle `face_tolerance_deg` (checked linearly via the tangent)
/// - `in front of`: subject center in the target's facing half-plane (closed)
///   with lateral offset within the target's half-width plus slack
/// - `side of`: subject center strictly left or right of the target's facing
///   axis (pure half-plane test, no distance bound)
pub fn eval_constraint(
    constraint: &Constraint,
    subject: &Footprint,
    target: Option<&Footprint>,
    room: &Rect,
    params: &PredicateParams,
) -> Result<bool, EvalError> {
    let need_target = || {
        target.ok_or_else(|| EvalError::MissingTarget(constraint.dsl_name().to_string()))
    };
    match constraint {
        Constraint::Edge => Ok(room.boundary_gap(&subject.aabb()) <= params.edge_max_wall_gap_m),
        Constraint::Middle => {
            Ok(room.boundary_gap(&subject.aabb()) >= params.middle_min_wall_gap_m)
        }
        Constraint::Near(_) => {
            let gap = subject.aabb().gap_distance(&need_target()?.aabb());
            Ok(params.near_min_m < gap && gap < params.near_max_m)
        }
        Constraint::Far(_) => {
            let gap = subject.aabb().gap_distance(&need_target()?.aabb());
            Ok(gap >= params.far_min_m)
        }
        Constraint::CenterAligned(_) => {
            let t = need_target()?;
            let dx = (subject.center.x - t.center.x).abs();
            let dy = (subject.center.y - t.center.y).abs();
            Ok(dx <= params.align_tolerance_m || dy <= params.align_tolerance_m)
        }
        Constraint::FaceTo(_) => {
            let t = need_target()?;
            let (forward, lateral) = facing_components(subject, (t.center.x, t.center.y));
            if forward == 0.0 && lateral == 0.0 {
                return Ok(true); // coincident centers: direction undefined
            }
            let tan = params.face_tolerance_deg.to_radians().tan();
            // Slack absorbs the rounding of tan() so exact cone-boundary
            // placements (e.g. a 45-degree diagonal) count as facing.
            Ok(forward >= 0.0 && lateral.abs() <= tan * forward + 1e-9)
        }
        Constraint::InFrontOf(_) => {
            let t = need_target()?;
            let (forward, lateral) = facing_components(t, (subject.center.x, subject.center.y));
            let bound = t.width / 2.0 + params.front_lateral_slack_m;
            Ok(forward >= 0.0 && lateral.abs() <= bound)
        }
        Constraint::SideOf(_) => {
            let t = need_target()?;
            let (_, lateral) = facing_components(t, (subject.center.x, subject.center.y));
            Ok(lateral != 0.0)
        }
        Constraint::Above(_) | Constraint::OnTopOf(_) => Err(EvalError::UnsupportedInFloorSolver(
            constraint.dsl_name().to_string(),
        )),
    }
}

/// Counts satisfied constraints (global plus relations) for one object,
/// requiring every target to be present in `placed`.
pub fn score_placement(
    spec: &ConstraintSpec,
    subject: &Footprint,
    placed: &BTreeMap<String, Footprint>,
    room: &Rect,
    params: &PredicateParams,
) -> Result<u32, EvalError> {
    let mut score = 0;
    for c in spec.all() {
        let target = match c.target() {
            Some(id) => Some(placed.get(id).ok_or_else(|| {
                EvalError::MissingTarget(format!("{} (object '{}')", c.dsl_name(), id))
            })?),
            None => None,
        };
        if eval_constraint(c, subject, target, room, params)? {
            score += 1;
        }
    }
    Ok(score)
}

/// Solver-side scoring: skips out-of-plane constraints and relations whose
/// target is absent (a dropped object); those count as unsatisfied.
pub fn score_placement_lenient(
    spec: &ConstraintSpec,
    subject: &Footprint,
    placed: &BTreeMap<String, Footprint>,
    room: &Rect,
    params: &PredicateParams,
) -> u32 {
    let mut score = 0;
    for c in spec.all() {
        if !c.in_plane() {
            continue;
        }
        let target = match c.target() {
            Some(id) => match placed.get(id) {
                Some(f) => Some(f),
                None => continue,
            },
            None => None,
        };
        if eval_constraint(c, subject, target, room, params).unwrap_or(false) {
            score += 1;
        }
    }
    score
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Point2, Yaw};
    use proptest::prelude::*;

    fn fp(x: f64, y: f64, w: f64, d: f64, yaw: Yaw) -> Footprint {
        Footprint::new(Point2::new(x, y), w, d, yaw)
    }

    fn room() -> Rect {
        Rect::new(Point2::new(0.0, 0.0), Point2::new(6.0, 6.0))
    }

    const FIG_LINES: [&str; 3] = [
        "sofa-0 | edge",
        "coffee table-0 | middle | near, sofa-0 | in front of, sofa-0 | center aligned, sofa-0 | face to, sofa-0",
        "tv stand-0 | edge | far, coffee table-0 | in front of, coffee table-0 | center aligned, coffee table-0 | face to, coffee table-0",
    ];

    #[test]
    fn parses_the_reference_lines() {
        let graph = parse_scene_graph(&FIG_LINES.join("\n")).unwrap();
        assert_eq!(graph.specs.len(), 3);
        assert!(graph.specs[0].is_anchor());
        assert_eq!(graph.specs[0].global, Constraint::Edge);
        let table = &graph.specs[1];
        assert_eq!(table.global, Constraint::Middle);
        assert_eq!(table.relations.len(), 4);
        assert!(table
            .relations
            .iter()
            .all(|r| r.target() == Some("sofa-0")));
    }

    #[test]
    fn round_trip_is_identity_on_reference_lines() {
        let text = FIG_LINES.join("\n");
        let graph = parse_scene_graph(&text).unwrap();
        assert_eq!(serialize_scene_graph(&graph), text);
        let again = parse_scene_graph(&serialize_scene_graph(&graph)).unwrap();
        assert_eq!(again, graph);
    }

    #[test]
    fn relation_without_global_is_rejected() {
        let err = parse_scene_graph("lamp-0 | near, sofa-0").unwrap_err();
        assert_eq!(err, DslError::MissingGlobal("lamp-0".into()));
    }

    #[test]
    fn forward_reference_is_rejected() {
        let err = parse_scene_graph("a-0 | edge | near, b-0\nb-0 | edge").unwrap_err();
        assert_eq!(
            err,
            DslError::ForwardReference {
                object: "a-0".into(),
                target: "b-0".into()
            }
        );
    }

    #[test]
    fn duplicate_object_is_rejected() {
        let err = parse_scene_graph("a-0 | edge\na-0 | middle").unwrap_err();
        assert_eq!(err, DslError::DuplicateObject("a-0".into()));
    }

    #[test]
    fn unknown_constraint_is_rejected() {
        let err = parse_scene_graph("a-0 | edge | beside, a-0").unwrap_err();
        assert!(matches!(err, DslError::UnknownConstraint { .. }));
    }

    #[test]
    fn near_bounds_are_strict() {
        let p = PredicateParams::default();
        let a = fp(1.0, 1.0, 1.0, 1.0, Yaw::Deg0);
        // gap = dx - half widths = distance between closest faces
        let near_1m = fp(3.0, 1.0, 1.0, 1.0, Yaw::Deg0); // gap 1.0
        let near_15 = fp(3.5, 1.0, 1.0, 1.0, Yaw::Deg0); // gap 1.5
        let c = Constraint::Near("a".into());
        assert!(eval_constraint(&c, &near_1m, Some(&a), &room(), &p).unwrap());
        assert!(!eval_constraint(&c, &near_15, Some(&a), &room(), &p).unwrap());
        // far is closed at exactly 1.5 m
        let f = Constraint::Far("a".into());
        assert!(eval_constraint(&f, &near_15, Some(&a), &room(), &p).unwrap());
    }

    #[test]
    fn center_alignment_on_equal_x() {
        let p = PredicateParams::default();
        let a = fp(2.0, 3.0, 1.0, 1.0, Yaw::Deg0);
        let b = fp(2.0, 5.0, 1.0, 1.0, Yaw::Deg0);
        let c = Constraint::CenterAligned("a".into());
        assert!(eval_constraint(&c, &b, Some(&a), &room(), &p).unwrap());
        let off = fp(2.2, 5.0, 1.0, 1.0, Yaw::Deg0);
        assert!(!eval_constraint(&c, &off, Some(&a), &room(), &p).unwrap());
    }

    #[test]
    fn face_to_collinear_target() {
        let p = PredicateParams::default();
        let subject = fp(0.0, 2.0, 0.5, 0.5, Yaw::Deg90); // faces +x
        let target = fp(2.0, 2.0, 0.5, 0.5, Yaw::Deg0);
        let c = Constraint::FaceTo("t".into());
        assert!(eval_constraint(&c, &subject, Some(&target), &room(), &p).unwrap());
        let behind = fp(-2.0, 2.0, 0.5, 0.5, Yaw::Deg0);
        assert!(!eval_constraint(&c, &subject, Some(&behind), &room(), &p).unwrap());
    }

    #[test]
    fn edge_and_middle_thresholds() {
        let p = PredicateParams::default();
        let flush = fp(0.5, 3.0, 1.0, 1.0, Yaw::Deg0); // west gap 0
        let centered = fp(3.0, 3.0, 1.0, 1.0, Yaw::Deg0); // min gap 2.5
        assert!(eval_constraint(&Constraint::Edge, &flush, None, &room(), &p).unwrap());
        assert!(!eval_constraint(&Constraint::Edge, &centered, None, &room(), &p).unwrap());
        assert!(eval_constraint(&Constraint::Middle, &centered, None, &room(), &p).unwrap());
        assert!(!eval_constraint(&Constraint::Middle, &flush, None, &room(), &p).unwrap());
    }

    #[test]
    fn in_front_of_respects_facing_and_slack() {
        let p = PredicateParams::default();
        let sofa = fp(3.0, 1.0, 2.0, 1.0, Yaw::Deg0); // faces +y
        let table_front = fp(3.0, 2.5, 1.0, 0.5, Yaw::Deg0);
        let table_behind = fp(3.0, 0.2, 1.0, 0.2, Yaw::Deg0);
        let table_far_side = fp(5.8, 2.5, 0.2, 0.5, Yaw::Deg0);
        let c = Constraint::InFrontOf("sofa".into());
        assert!(eval_constraint(&c, &table_front, Some(&sofa), &room(), &p).unwrap());
        assert!(!eval_constraint(&c, &table_behind, Some(&sofa), &room(), &p).unwrap());
        // lateral offset 2.8 > 2.0/2 + 0.5
        assert!(!eval_constraint(&c, &table_far_side, Some(&sofa), &room(), &p).unwrap());
    }

    #[test]
    fn side_of_excludes_the_facing_axis() {
        let p = PredicateParams::default();
        let bed = fp(3.0, 1.0, 2.0, 1.5, Yaw::Deg0);
        let stand_left = fp(1.5, 1.0, 0.5, 0.5, Yaw::Deg0);
        let dead_ahead = fp(3.0, 3.0, 0.5, 0.5, Yaw::Deg0);
        let c = Constraint::SideOf("bed".into());
        assert!(eval_constraint(&c, &stand_left, Some(&bed), &room(), &p).unwrap());
        assert!(!eval_constraint(&c, &dead_ahead, Some(&bed), &room(), &p).unwrap());
    }

    #[test]
    fn out_of_plane_constraints_error() {
        let p = PredicateParams::default();
        let a = fp(1.0, 1.0, 1.0, 1.0, Yaw::Deg0);
        let e = eval_constraint(&Constraint::Above("a".into()), &a, Some(&a), &room(), &p)
            .unwrap_err();
        assert!(matches!(e, EvalError::UnsupportedInFloorSolver(_)));
    }

    #[test]
    fn missing_target_errors() {
        let p = PredicateParams::default();
        let a = fp(1.0, 1.0, 1.0, 1.0, Yaw::Deg0);
        let e = eval_constraint(&Constraint::Near("x".into()), &a, None, &room(), &p).unwrap_err();
        assert!(matches!(e, EvalError::MissingTarget(_)));
    }

    #[test]
    fn score_counts_global_and_relations() {
        let p = PredicateParams::default();
        let graph = parse_scene_graph(&FIG_LINES.join("\n")).unwrap();
        let mut placed = BTreeMap::new();
        // Sofa against the south wall, facing north.
        let sofa = fp(3.0, 0.5, 2.0, 1.0, Yaw::Deg0);
        placed.insert("sofa-0".to_string(), sofa);
        // Coffee table 1 m in front, center aligned, facing the sofa.
        let table = fp(3.0, 2.0, 1.0, 0.5, Yaw::Deg180);
        let spec = graph.spec("coffee table-0").unwrap();
        // Verify each constraint individually, then the total.
        let gap = table.aabb().gap_distance(&sofa.aabb());
        assert!(p.near_min_m < gap && gap < p.near_max_m, "gap {}", gap);
        let score = score_placement(spec, &table, &placed, &room(), &p).unwrap();
        assert_eq!(score, 5);
        // Moving the table 3 m away loses near and in-front slack still holds;
        // score must drop below 5.
        let far_table = fp(3.0, 4.5, 1.0, 0.5, Yaw::Deg180);
        let far_score = score_placement(spec, &far_table, &placed, &room(), &p).unwrap();
        assert!(far_score < 5, "got {}", far_score);
    }

    #[test]
    fn anchor_on_edge_scores_one() {
        let p = PredicateParams::default();
        let graph = parse_scene_graph("sofa-0 | edge").unwrap();
        let sofa = fp(3.0, 0.5, 2.0, 1.0, Yaw::Deg0);
        let placed = BTreeMap::new();
        assert_eq!(
            score_placement(&graph.specs[0], &sofa, &placed, &room(), &p).unwrap(),
            1
        );
    }

    fn arb_graph() -> impl Strategy<Value = SceneGraph> {
        // Object ids like "obj-3"; relations only target earlier objects.
        (1usize..6).prop_flat_map(|n| {
            let rel_pool = proptest::collection::vec(
                (0usize..8, 0usize..n.max(1)),
                0..4,
            );
            proptest::collection::vec((proptest::bool::ANY, rel_pool), n).prop_map(|entries| {
                let mut specs = Vec::new();
                for (i, (edge, rels)) in entries.into_iter().enumerate() {
                    let object_id = format!("obj-{}", i);
                    let global = if edge { Constraint::Edge } else { Constraint::Middle };
                    let mut relations = Vec::new();
                    for (kind, target_idx) in rels {
                        if i == 0 {
                            continue;
                        }
                        let target = format!("obj-{}", target_idx % i);
                        relations.push(match kind {
                            0 => Constraint::Near(target),
                            1 => Constraint::Far(target),
                            2 => Constraint::InFrontOf(target),
                            3 => Constraint::SideOf(target),
                            4 => Constraint::Above(target),
                            5 => Constraint::OnTopOf(target),
                            6 => Constraint::CenterAligned(target),
                            _ => Constraint::FaceTo(target),
                        });
                    }
                    specs.push(ConstraintSpec {
                        object_id,
                        global,
                        relations,
                    });
                }
                SceneGraph { specs }
            })
        })
    }

    proptest! {
        #[test]
        fn serialize_parse_is_identity_on_generated_graphs(graph in arb_graph()) {
            let text = serialize_scene_graph(&graph);
            let parsed = parse_scene_graph(&text).unwrap();
            prop_assert_eq!(&parsed, &graph);
            prop_assert_eq!(serialize_scene_graph(&parsed), text);
        }
    }

    // Coordinates on a 1/8 m grid are exactly representable, so translating
    // by grid multiples is exact and boundary predicates cannot flip.
    fn arb_fp() -> impl Strategy<Value = Footprint> {
        (4u32..44, 4u32..44, 1u32..8, 1u32..8, 0usize..4).prop_map(|(x, y, w, d, yi)| {
            fp(
                x as f64 * 0.125,
                y as f64 * 0.125,
                w as f64 * 0.25,
                d as f64 * 0.25,
                Yaw::ALL[yi],
            )
        })
    }

    proptest! {
        #[test]
        fn near_and_far_are_mutually_exclusive(a in arb_fp(), b in arb_fp()) {
            let p = PredicateParams::default();
            let near = eval_constraint(&Constraint::Near("b".into()), &a, Some(&b), &room(), &p).unwrap();
            let far = eval_constraint(&Constraint::Far("b".into()), &a, Some(&b), &room(), &p).unwrap();
            prop_assert!(!(near && far));
        }

        #[test]
        fn edge_and_middle_are_mutually_exclusive(a in arb_fp()) {
            let p = PredicateParams::default();
            let edge = eval_constraint(&Constraint::Edge, &a, None, &room(), &p).unwrap();
            let middle = eval_constraint(&Constraint::Middle, &a, None, &room(), &p).unwrap();
            prop_assert!(!(edge && middle));
        }

        #[test]
        fn predicates_are_translation_invariant(
            a in arb_fp(),
            b in arb_fp(),
            dxi in -160i32..160,
            dyi in -160i32..160,
        ) {
            let (dx, dy) = (dxi as f64 * 0.125, dyi as f64 * 0.125);
            let p = PredicateParams::default();
            let r = room();
            let shift = |f: &Footprint| Footprint {
                center: Point2::new(f.center.x + dx, f.center.y + dy),
                ..*f
            };
            let r2 = Rect::new(
                Point2::new(r.min.x + dx, r.min.y + dy),
                Point2::new(r.max.x + dx, r.max.y + dy),
            );
            for c in [
                Constraint::Edge,
                Constraint::Middle,
                Constraint::Near("b".into()),
                Constraint::Far("b".into()),
                Constraint::InFrontOf("b".into()),
                Constraint::SideOf("b".into()),
                Constraint::CenterAligned("b".into()),
                Constraint::FaceTo("b".into()),
            ] {
                let before = eval_constraint(&c, &a, Some(&b), &r, &p).unwrap();
                let after = eval_constraint(&c, &shift(&a), Some(&shift(&b)), &r2, &p).unwrap();
                prop_assert_eq!(before, after, "constraint {:?}", c);
            }
        }
    }
}
