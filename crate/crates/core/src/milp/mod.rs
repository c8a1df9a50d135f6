//! Mixed-integer linear encoding of a placement problem.
//!
//! Each object contributes continuous position variables `x_i`, `y_i` and
//! rotation binaries `r90_i`, `r180_i` ((0,0) is 0°, (1,0) is 90°, (0,1) is
//! 180°, (1,1) is 270°). The effective half-extents are affine in `r90`, so
//! containment and pairwise non-overlap (a four-way disjunction with big-M
//! relaxation) are exact linear rows. Global, position, alignment, and
//! rotation constraints become hard rows, gated by the rotation binaries
//! where the geometry depends on yaw; distance constraints (near/far) enter
//! the objective as one reward point per satisfied term.
//!
//! The bundled solver enumerates rotation assignments and searches the
//! position grid exactly; auxiliary binaries are never enumerated because
//! their values are implied by the geometry (see [`AuxRule`]).

pub mod lp;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::{eval_constraint, Constraint, PredicateParams, SceneGraph};
use crate::geometry::{Footprint, Rect, Yaw};
use crate::solver::{candidate_footprints, score_layout, Diagnostics, Layout, ObjectDims, PlacementProblem};

use lp::{Bound, LpProblem, Row, Sense, Term};

/// Margin used to turn the strict near bounds into closed ones inside the
/// exported LP (LP format cannot express strict inequalities).
const STRICT_MARGIN: f64 = 0.001;

/// Smallest lateral offset accepted as "on a side" by the side-of rows.
const SIDE_EPS: f64 = 1e-6;

/// Big-M relaxation constant. The default is the room diagonal plus the
/// largest object extent: strictly larger than any feasible coordinate
/// difference plus the half-extents that can join it in one row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BigMParams {
    pub m: f64,
}

impl BigMParams {
    pub fn for_problem(room: &Rect, objects: &[ObjectDims]) -> Self {
        let diag = (room.width().powi(2) + room.height().powi(2)).sqrt();
        let max_extent = objects
            .iter()
            .map(|o| o.width_m.max(o.depth_m))
            .fold(0.0, f64::max);
        Self { m: diag + max_extent }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistanceKind {
    Near,
    Far,
}

/// One near/far term in the objective: +1 when satisfied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistanceTerm {
    pub kind: DistanceKind,
    pub subject: usize,
    pub target: usize,
    pub indicator: String,
}

/// How to derive an auxiliary binary's value from a concrete placement.
/// Object references are indices into [`MilpModel::objects`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum AuxRule {
    /// 1 iff object `.0` lies fully left of object `.1`.
    SeparatedLeft(usize, usize),
    SeparatedRight(usize, usize),
    SeparatedBelow(usize, usize),
    SeparatedAbove(usize, usize),
    /// 1 iff the two objects' x centers match within the alignment tolerance.
    AlignedX(usize, usize),
    /// 1 iff the object's west/east/south/north wall gap is within the edge
    /// threshold.
    EdgeWest(usize),
    EdgeEast(usize),
    EdgeSouth(usize),
    EdgeNorth(usize),
    /// 1 iff the subject `.0` sits on the positive-lateral side of target
    /// `.1`'s facing axis.
    SideLeft(usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MilpModel {
    pub objects: Vec<ObjectDims>,
    pub room: Rect,
    pub params: PredicateParams,
    pub graph: SceneGraph,
    pub big_m: BigMParams,
    /// Hard linear rows (everything except the distance terms).
    pub rows: Vec<Row>,
    pub bounds: Vec<Bound>,
    pub binaries: Vec<String>,
    pub aux_rules: BTreeMap<String, AuxRule>,
    pub distance_terms: Vec<DistanceTerm>,
}

#[derive(Debug, Error, PartialEq)]
pub enum MilpError {
    #[error("constraint '{0}' cannot be encoded for the floor plane")]
    UnsupportedConstraint(String),
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("no feasible assignment exists on the grid")]
    Infeasible,
    #[error("search space exceeds the bundled solver's budget ({0} combinations)")]
    BudgetExceeded(u128),
}

fn var_x(i: usize) -> String {
    format!("x_{}", i)
}
fn var_y(i: usize) -> String {
    format!("y_{}", i)
}
fn var_r90(i: usize) -> String {
    format!("r90_{}", i)
}
fn var_r180(i: usize) -> String {
    format!("r180_{}", i)
}

/// Accumulates terms, dropping zero coefficients and merging duplicates so
/// rows stay canonical.
struct RowTerms(Vec<Term>);

impl RowTerms {
    fn new() -> Self {
        RowTerms(Vec::new())
    }
    fn add(&mut self, coef: f64, var: String) -> &mut Self {
        if coef != 0.0 {
            if let Some(t) = self.0.iter_mut().find(|t| t.var == var) {
                t.coef += coef;
                if t.coef == 0.0 {
                    let idx = self.0.iter().position(|u| u.var == var).unwrap();
                    self.0.remove(idx);
                }
            } else {
                self.0.push(Term::new(coef, var));
            }
        }
        self
    }
    fn done(self) -> Vec<Term> {
        self.0
    }
}

/// Linear gate that is 0 when object `i`'s rotation binaries equal
/// `(a90, a180)` and at least `scale * M` otherwise. Returns the variable
/// terms and the constant part.
fn rotation_gate(i: usize, a90: bool, a180: bool, m: f64) -> (Vec<(f64, String)>, f64) {
    let mut terms = Vec::new();
    let mut constant = 0.0;
    if a90 {
        terms.push((-m, var_r90(i)));
        constant += m;
    } else {
        terms.push((m, var_r90(i)));
    }
    if a180 {
        terms.push((-m, var_r180(i)));
        constant += m;
    } else {
        terms.push((m, var_r180(i)));
    }
    (terms, constant)
}

/// The four (r90, r180) cases with their facing vectors; lateral is the
/// facing vector rotated a quarter turn counter-clockwise.
const YAW_CASES: [(bool, bool, Yaw); 4] = [
    (false, false, Yaw::Deg0),
    (true, false, Yaw::Deg90),
    (false, true, Yaw::Deg180),
    (true, true, Yaw::Deg270),
];

/// Builds the MILP. Containment and non-overlap are always present; every
/// in-plane non-distance constraint becomes hard rows; near/far become
/// objective terms. `above`/`on top of` cannot be expressed in the floor
/// plane and are rejected.
pub fn encode(p: &PlacementProblem) -> Result<MilpModel, MilpError> {
    p.params
        .validate()
        .map_err(MilpError::InvalidProblem)?;
    // Objects in graph order so variable indices match spec order.
    let mut objects = Vec::new();
    for spec in &p.graph.specs {
        let dims = p
            .objects
            .iter()
            .find(|o| o.id == spec.object_id)
            .ok_or_else(|| {
                MilpError::InvalidProblem(format!("object '{}' has no dimensions", spec.object_id))
            })?;
        objects.push(dims.clone());
    }
    let index_of = |id: &str| -> usize {
        objects.iter().position(|o| o.id == id).expect("validated above")
    };

    let big_m = BigMParams::for_problem(&p.room, &objects);
    let m = big_m.m;
    let mut model = MilpModel {
        objects: objects.clone(),
        room: p.room,
        params: p.params,
        graph: p.graph.clone(),
        big_m,
        rows: Vec::new(),
        bounds: Vec::new(),
        binaries: Vec::new(),
        aux_rules: BTreeMap::new(),
        distance_terms: Vec::new(),
    };

    let half_diff_x = |i: usize| (objects[i].depth_m - objects[i].width_m) / 2.0;
    let half_diff_y = |i: usize| (objects[i].width_m - objects[i].depth_m) / 2.0;

    for (i, o) in objects.iter().enumerate() {
        model.bounds.push(Bound {
            var: var_x(i),
            lo: p.room.min.x,
            hi: p.room.max.x,
        });
        model.bounds.push(Bound {
            var: var_y(i),
            lo: p.room.min.y,
            hi: p.room.max.y,
        });
        model.binaries.push(var_r90(i));
        model.binaries.push(var_r180(i));

        // Containment: x_i -/+ hx_i stays inside, hx affine in r90.
        let mut t = RowTerms::new();
        t.add(1.0, var_x(i)).add(-half_diff_x(i), var_r90(i));
        model.rows.push(Row {
            name: format!("ct{}_xlo", i),
            terms: t.done(),
            sense: Sense::Ge,
            rhs: p.room.min.x + o.width_m / 2.0,
        });
        let mut t = RowTerms::new();
        t.add(1.0, var_x(i)).add(half_diff_x(i), var_r90(i));
        model.rows.push(Row {
            name: format!("ct{}_xhi", i),
            terms: t.done(),
            sense: Sense::Le,
            rhs: p.room.max.x - o.width_m / 2.0,
        });
        let mut t = RowTerms::new();
        t.add(1.0, var_y(i)).add(-half_diff_y(i), var_r90(i));
        model.rows.push(Row {
            name: format!("ct{}_ylo", i),
            terms: t.done(),
            sense: Sense::Ge,
            rhs: p.room.min.y + o.depth_m / 2.0,
        });
        let mut t = RowTerms::new();
        t.add(1.0, var_y(i)).add(half_diff_y(i), var_r90(i));
        model.rows.push(Row {
            name: format!("ct{}_yhi", i),
            terms: t.done(),
            sense: Sense::Le,
            rhs: p.room.max.y - o.depth_m / 2.0,
        });
    }

    // Pairwise non-overlap: left/right/below/above disjunction.
    for i in 0..objects.len() {
        for j in (i + 1)..objects.len() {
            let cases = [
                ("l", AuxRule::SeparatedLeft(i, j)),
                ("r", AuxRule::SeparatedRight(i, j)),
                ("b", AuxRule::SeparatedBelow(i, j)),
                ("a", AuxRule::SeparatedAbove(i, j)),
            ];
            let mut sum = RowTerms::new();
            for (tag, rule) in cases {
                let bin = format!("sep{}_{}_{}", i, j, tag);
                model.binaries.push(bin.clone());
                model.aux_rules.insert(bin.clone(), rule.clone());
                sum.add(1.0, bin.clone());
                // e.g. left: x_i + hx_i <= x_j - hx_j + M(1 - bin)
                let (wi, wj) = (objects[i].width_m, objects[j].width_m);
                let (di, dj) = (objects[i].depth_m, objects[j].depth_m);
                let mut t = RowTerms::new();
                let (sense, rhs) = match rule {
                    AuxRule::SeparatedLeft(..) => {
                        t.add(1.0, var_x(i))
                            .add(-1.0, var_x(j))
                            .add(half_diff_x(i), var_r90(i))
                            .add(half_diff_x(j), var_r90(j))
                            .add(m, bin.clone());
                        (Sense::Le, m - wi / 2.0 - wj / 2.0)
                    }
                    AuxRule::SeparatedRight(..) => {
                        t.add(1.0, var_x(j))
                            .add(-1.0, var_x(i))
                            .add(half_diff_x(i), var_r90(i))
                            .add(half_diff_x(j), var_r90(j))
                            .add(m, bin.clone());
                        (Sense::Le, m - wi / 2.0 - wj / 2.0)
                    }
                    AuxRule::SeparatedBelow(..) => {
                        t.add(1.0, var_y(i))
                            .add(-1.0, var_y(j))
                            .add(half_diff_y(i), var_r90(i))
                            .add(half_diff_y(j), var_r90(j))
                            .add(m, bin.clone());
                        (Sense::Le, m - di / 2.0 - dj / 2.0)
                    }
                    AuxRule::SeparatedAbove(..) => {
                        t.add(1.0, var_y(j))
                            .add(-1.0, var_y(i))
                            .add(half_diff_y(i), var_r90(i))
                            .add(half_diff_y(j), var_r90(j))
                            .add(m, bin.clone());
                        (Sense::Le, m - di / 2.0 - dj / 2.0)
                    }
                    _ => unreachable!(),
                };
                model.rows.push(Row {
                    name: format!("sep{}_{}_{}", i, j, tag),
                    terms: t.done(),
                    sense,
                    rhs,
                });
            }
            model.rows.push(Row {
                name: format!("sep{}_{}_any", i, j),
                terms: sum.done(),
                sense: Sense::Ge,
                rhs: 1.0,
            });
        }
    }

    // Per-constraint rows, in graph order with a running ordinal.
    let mut ordinal = 0usize;
    for spec in &p.graph.specs {
        let s = index_of(&spec.object_id);
        for c in spec.all() {
            let k = ordinal;
            ordinal += 1;
            match c {
                Constraint::Middle => {
                    let o = &objects[s];
                    let gap = p.params.middle_min_wall_gap_m;
                    let mut t = RowTerms::new();
                    t.add(1.0, var_x(s)).add(-half_diff_x(s), var_r90(s));
                    model.rows.push(Row {
                        name: format!("k{}_w", k),
                        terms: t.done(),
                        sense: Sense::Ge,
                        rhs: p.room.min.x + gap + o.width_m / 2.0,
                    });
                    let mut t = RowTerms::new();
                    t.add(1.0, var_x(s)).add(half_diff_x(s), var_r90(s));
                    model.rows.push(Row {
                        name: format!("k{}_e", k),
                        terms: t.done(),
                        sense: Sense::Le,
                        rhs: p.room.max.x - gap - o.width_m / 2.0,
                    });
                    let mut t = RowTerms::new();
                    t.add(1.0, var_y(s)).add(-half_diff_y(s), var_r90(s));
                    model.rows.push(Row {
                        name: format!("k{}_s", k),
                        terms: t.done(),
                        sense: Sense::Ge,
                        rhs: p.room.min.y + gap + o.depth_m / 2.0,
                    });
                    let mut t = RowTerms::new();
                    t.add(1.0, var_y(s)).add(half_diff_y(s), var_r90(s));
                    model.rows.push(Row {
                        name: format!("k{}_n", k),
                        terms: t.done(),
                        sense: Sense::Le,
                        rhs: p.room.max.y - gap - o.depth_m / 2.0,
                    });
                }
                Constraint::Edge => {
                    let o = &objects[s];
                    let gap = p.params.edge_max_wall_gap_m;
                    let sides = [
                        ("w", AuxRule::EdgeWest(s)),
                        ("e", AuxRule::EdgeEast(s)),
                        ("s", AuxRule::EdgeSouth(s)),
                        ("n", AuxRule::EdgeNorth(s)),
                    ];
                    let mut sum = RowTerms::new();
                    for (tag, rule) in sides {
                        let bin = format!("ed{}_{}", k, tag);
                        model.binaries.push(bin.clone());
                        model.aux_rules.insert(bin.clone(), rule.clone());
                        sum.add(1.0, bin.clone());
                        let mut t = RowTerms::new();
                        let (sense, rhs) = match rule {
                            AuxRule::EdgeWest(_) => {
                                t.add(1.0, var_x(s))
                                    .add(-half_diff_x(s), var_r90(s))
                                    .add(m, bin.clone());
                                (Sense::Le, p.room.min.x + gap + o.width_m / 2.0 + m)
                            }
                            AuxRule::EdgeEast(_) => {
                                t.add(1.0, var_x(s))
                                    .add(half_diff_x(s), var_r90(s))
                                    .add(-m, bin.clone());
                                (Sense::Ge, p.room.max.x - gap - o.width_m / 2.0 - m)
                            }
                            AuxRule::EdgeSouth(_) => {
                                t.add(1.0, var_y(s))
                                    .add(-half_diff_y(s), var_r90(s))
                                    .add(m, bin.clone());
                                (Sense::Le, p.room.min.y + gap + o.depth_m / 2.0 + m)
                            }
                            AuxRule::EdgeNorth(_) => {
                                t.add(1.0, var_y(s))
                                    .add(half_diff_y(s), var_r90(s))
                                    .add(-m, bin.clone());
                                (Sense::Ge, p.room.max.y - gap - o.depth_m / 2.0 - m)
                            }
                            _ => unreachable!(),
                        };
                        model.rows.push(Row {
                            name: format!("k{}_{}", k, tag),
                            terms: t.done(),
                            sense,
                            rhs,
                        });
                    }
                    model.rows.push(Row {
                        name: format!("k{}_any", k),
                        terms: sum.done(),
                        sense: Sense::Ge,
                        rhs: 1.0,
                    });
                }
                Constraint::CenterAligned(target) => {
                    let t_idx = index_of(target);
                    let bin = format!("al{}", k);
                    model.binaries.push(bin.clone());
                    model.aux_rules.insert(bin.clone(), AuxRule::AlignedX(s, t_idx));
                    let tol = p.params.align_tolerance_m;
                    // bin = 1 activates the x equality pair, bin = 0 the y pair.
                    for (tag, a, b, flip) in [
                        ("x1", var_x(s), var_x(t_idx), false),
                        ("x2", var_x(t_idx), var_x(s), false),
                        ("y1", var_y(s), var_y(t_idx), true),
                        ("y2", var_y(t_idx), var_y(s), true),
                    ] {
                        let mut terms = RowTerms::new();
                        terms.add(1.0, a).add(-1.0, b);
                        let rhs = if flip {
                            terms.add(-m, bin.clone());
                            tol
                        } else {
                            terms.add(m, bin.clone());
                            tol + m
                        };
                        model.rows.push(Row {
                            name: format!("k{}_{}", k, tag),
                            terms: terms.done(),
                            sense: Sense::Le,
                            rhs,
                        });
                    }
                }
                Constraint::FaceTo(target) => {
                    let t_idx = index_of(target);
                    let tan = p.params.face_tolerance_deg.to_radians().tan();
                    // The cone rows combine two coordinate differences, so
                    // their gate needs a larger dominating constant.
                    let gate_m = (tan + 1.0) * m;
                    for (a90, a180, yaw) in YAW_CASES {
                        let (fx, fy) = yaw.facing();
                        let (gate, gconst) = rotation_gate(s, a90, a180, gate_m);
                        // tan*fwd - lat + gate >= 0 and tan*fwd + lat + gate >= 0
                        // with fwd = f . (t - s), lat = f x (t - s).
                        for (tag, lat_sign) in [("a", -1.0), ("b", 1.0)] {
                            let mut t = RowTerms::new();
                            t.add(tan * fx, var_x(t_idx))
                                .add(-tan * fx, var_x(s))
                                .add(tan * fy, var_y(t_idx))
                                .add(-tan * fy, var_y(s));
                            // lat = fx*(yt - ys) - fy*(xt - xs)
                            t.add(lat_sign * fx, var_y(t_idx))
                                .add(-lat_sign * fx, var_y(s))
                                .add(-lat_sign * fy, var_x(t_idx))
                                .add(lat_sign * fy, var_x(s));
                            for (c, v) in &gate {
                                t.add(*c, v.clone());
                            }
                            model.rows.push(Row {
                                name: format!("k{}_{}{}{}", k, a90 as u8, a180 as u8, tag),
                                terms: t.done(),
                                sense: Sense::Ge,
                                rhs: -gconst,
                            });
                        }
                    }
                }
                Constraint::InFrontOf(target) => {
                    let t_idx = index_of(target);
                    let bound = objects[t_idx].width_m / 2.0 + p.params.front_lateral_slack_m;
                    for (a90, a180, yaw) in YAW_CASES {
                        let (fx, fy) = yaw.facing();
                        let (gate, gconst) = rotation_gate(t_idx, a90, a180, m);
                        // Forward half-plane: f . (s - t) + gate >= 0.
                        let mut t = RowTerms::new();
                        t.add(fx, var_x(s))
                            .add(-fx, var_x(t_idx))
                            .add(fy, var_y(s))
                            .add(-fy, var_y(t_idx));
                        for (c, v) in &gate {
                            t.add(*c, v.clone());
                        }
                        model.rows.push(Row {
                            name: format!("k{}_{}{}f", k, a90 as u8, a180 as u8),
                            terms: t.done(),
                            sense: Sense::Ge,
                            rhs: -gconst,
                        });
                        // |lat| <= bound + gate, lat = fx*(ys-yt) - fy*(xs-xt).
                        for (tag, sign) in [("p", 1.0), ("q", -1.0)] {
                            let mut t = RowTerms::new();
                            t.add(sign * fx, var_y(s))
                                .add(-sign * fx, var_y(t_idx))
                                .add(-sign * fy, var_x(s))
                                .add(sign * fy, var_x(t_idx));
                            for (c, v) in &gate {
                                t.add(-*c, v.clone());
                            }
                            model.rows.push(Row {
                                name: format!("k{}_{}{}{}", k, a90 as u8, a180 as u8, tag),
                                terms: t.done(),
                                sense: Sense::Le,
                                rhs: bound + gconst,
                            });
                        }
                    }
                }
                Constraint::SideOf(target) => {
                    let t_idx = index_of(target);
                    let bin = format!("sd{}", k);
                    model.binaries.push(bin.clone());
                    model
                        .aux_rules
                        .insert(bin.clone(), AuxRule::SideLeft(s, t_idx));
                    for (a90, a180, yaw) in YAW_CASES {
                        let (fx, fy) = yaw.facing();
                        let (gate, gconst) = rotation_gate(t_idx, a90, a180, m);
                        // lat >= eps - M(1-sd) - gate  (sd = 1 side)
                        let mut t = RowTerms::new();
                        t.add(fx, var_y(s))
                            .add(-fx, var_y(t_idx))
                            .add(-fy, var_x(s))
                            .add(fy, var_x(t_idx))
                            .add(-m, bin.clone());
                        for (c, v) in &gate {
                            t.add(*c, v.clone());
                        }
                        model.rows.push(Row {
                            name: format!("k{}_{}{}l", k, a90 as u8, a180 as u8),
                            terms: t.done(),
                            sense: Sense::Ge,
                            rhs: SIDE_EPS - m - gconst,
                        });
                        // -lat >= eps - M*sd - gate  (sd = 0 side)
                        let mut t = RowTerms::new();
                        t.add(-fx, var_y(s))
                            .add(fx, var_y(t_idx))
                            .add(fy, var_x(s))
                            .add(-fy, var_x(t_idx))
                            .add(m, bin.clone());
                        for (c, v) in &gate {
                            t.add(*c, v.clone());
                        }
                        model.rows.push(Row {
                            name: format!("k{}_{}{}r", k, a90 as u8, a180 as u8),
                            terms: t.done(),
                            sense: Sense::Ge,
                            rhs: SIDE_EPS - gconst,
                        });
                    }
                }
                Constraint::Near(target) => {
                    model.distance_terms.push(DistanceTerm {
                        kind: DistanceKind::Near,
                        subject: s,
                        target: index_of(target),
                        indicator: format!("z{}", k),
                    });
                }
                Constraint::Far(target) => {
                    model.distance_terms.push(DistanceTerm {
                        kind: DistanceKind::Far,
                        subject: s,
                        target: index_of(target),
                        indicator: format!("z{}", k),
                    });
                }
                Constraint::Above(_) | Constraint::OnTopOf(_) => {
                    return Err(MilpError::UnsupportedConstraint(c.dsl_name().to_string()));
                }
            }
        }
    }
    Ok(model)
}

/// Materializes the complete LP, appending the distance indicators: each
/// near/far term gets per-axis gap variables and big-M rows that reward its
/// indicator binary. The gap inside the LP is the rectilinear (per-axis sum)
/// surrogate of the exact Euclidean gap the bundled solver optimizes; the
/// two agree whenever the pair overlaps on one axis, the usual furniture
/// arrangement.
pub fn to_lp(model: &MilpModel) -> LpProblem {
    let m = model.big_m.m;
    let mut lp = LpProblem {
        objective: Vec::new(),
        rows: model.rows.clone(),
        bounds: model.bounds.clone(),
        binaries: model.binaries.clone(),
    };
    let half_diff_x = |i: usize| (model.objects[i].depth_m - model.objects[i].width_m) / 2.0;
    let half_diff_y = |i: usize| (model.objects[i].width_m - model.objects[i].depth_m) / 2.0;

    for term in &model.distance_terms {
        let (i, j) = (term.subject, term.target);
        let z = term.indicator.clone();
        let gx = format!("g{}x", z);
        let gy = format!("g{}y", z);
        lp.binaries.push(z.clone());
        lp.bounds.push(Bound { var: gx.clone(), lo: 0.0, hi: m });
        lp.bounds.push(Bound { var: gy.clone(), lo: 0.0, hi: m });
        lp.objective.push(Term::new(1.0, z.clone()));

        // gx >= |x_i - x_j| - hx_i - hx_j (and 0 via its bound).
        for (a, b) in [(i, j), (j, i)] {
            let mut t = RowTerms::new();
            t.add(1.0, var_x(a))
                .add(-1.0, var_x(b))
                .add(-half_diff_x(i), var_r90(i))
                .add(-half_diff_x(j), var_r90(j))
                .add(-1.0, gx.clone());
            lp.rows.push(Row {
                name: format!("{}x{}", z, if a == i { "1" } else { "2" }),
                terms: t.done(),
                sense: Sense::Le,
                rhs: model.objects[i].width_m / 2.0 + model.objects[j].width_m / 2.0,
            });
            let mut t = RowTerms::new();
            t.add(1.0, var_y(a))
                .add(-1.0, var_y(b))
                .add(-half_diff_y(i), var_r90(i))
                .add(-half_diff_y(j), var_r90(j))
                .add(-1.0, gy.clone());
            lp.rows.push(Row {
                name: format!("{}y{}", z, if a == i { "1" } else { "2" }),
                terms: t.done(),
                sense: Sense::Le,
                rhs: model.objects[i].depth_m / 2.0 + model.objects[j].depth_m / 2.0,
            });
        }

        match term.kind {
            DistanceKind::Near => {
                // z = 1 forces gx, gy below the near ceiling and their sum
                // above the near floor.
                for (tag, g) in [("gx", gx.clone()), ("gy", gy.clone())] {
                    let mut t = RowTerms::new();
                    t.add(1.0, g).add(m, z.clone());
                    lp.rows.push(Row {
                        name: format!("{}{}hi", z, tag),
                        terms: t.done(),
                        sense: Sense::Le,
                        rhs: model.params.near_max_m - STRICT_MARGIN + m,
                    });
                }
                let mut t = RowTerms::new();
                t.add(1.0, gx).add(1.0, gy).add(-m, z.clone());
                lp.rows.push(Row {
                    name: format!("{}lo", z),
                    terms: t.done(),
                    sense: Sense::Ge,
                    rhs: model.params.near_min_m + STRICT_MARGIN - m,
                });
            }
            DistanceKind::Far => {
                let mut t = RowTerms::new();
                t.add(1.0, gx).add(1.0, gy).add(-m, z.clone());
                lp.rows.push(Row {
                    name: format!("{}lo", z),
                    terms: t.done(),
                    sense: Sense::Ge,
                    rhs: model.params.far_min_m - m,
                });
            }
        }
    }
    lp
}

/// LP-format text of the full model.
pub fn export_lp(model: &MilpModel) -> String {
    lp::write_lp(&to_lp(model))
}

fn yaw_binaries(yaw: Yaw) -> (f64, f64) {
    match yaw {
        Yaw::Deg0 => (0.0, 0.0),
        Yaw::Deg90 => (1.0, 0.0),
        Yaw::Deg180 => (0.0, 1.0),
        Yaw::Deg270 => (1.0, 1.0),
    }
}

/// Yaw encoded by a (r90, r180) pair.
pub fn yaw_from_binaries(r90: bool, r180: bool) -> Yaw {
    match (r90, r180) {
        (false, false) => Yaw::Deg0,
        (true, false) => Yaw::Deg90,
        (false, true) => Yaw::Deg180,
        (true, true) => Yaw::Deg270,
    }
}

/// Variable assignment for a concrete layout: positions, rotations, and
/// auxiliary binaries derived from the geometry by their [`AuxRule`]s.
pub fn assignment_for(model: &MilpModel, placements: &BTreeMap<String, Footprint>) -> BTreeMap<String, f64> {
    let mut values = BTreeMap::new();
    let fp = |i: usize| placements.get(&model.objects[i].id).copied();
    for (i, _) in model.objects.iter().enumerate() {
        if let Some(f) = fp(i) {
            let (r90, r180) = yaw_binaries(f.yaw);
            values.insert(var_x(i), f.center.x);
            values.insert(var_y(i), f.center.y);
            values.insert(var_r90(i), r90);
            values.insert(var_r180(i), r180);
        }
    }
    let tol = 1e-9;
    for (name, rule) in &model.aux_rules {
        let v = match rule {
            AuxRule::SeparatedLeft(i, j) => match (fp(*i), fp(*j)) {
                (Some(a), Some(b)) => (a.aabb().max.x <= b.aabb().min.x + tol) as u8 as f64,
                _ => 0.0,
            },
            AuxRule::SeparatedRight(i, j) => match (fp(*i), fp(*j)) {
                (Some(a), Some(b)) => (b.aabb().max.x <= a.aabb().min.x + tol) as u8 as f64,
                _ => 0.0,
            },
            AuxRule::SeparatedBelow(i, j) => match (fp(*i), fp(*j)) {
                (Some(a), Some(b)) => (a.aabb().max.y <= b.aabb().min.y + tol) as u8 as f64,
                _ => 0.0,
            },
            AuxRule::SeparatedAbove(i, j) => match (fp(*i), fp(*j)) {
                (Some(a), Some(b)) => (b.aabb().max.y <= a.aabb().min.y + tol) as u8 as f64,
                _ => 0.0,
            },
            AuxRule::AlignedX(i, j) => match (fp(*i), fp(*j)) {
                (Some(a), Some(b)) => {
                    ((a.center.x - b.center.x).abs() <= model.params.align_tolerance_m + tol) as u8
                        as f64
                }
                _ => 0.0,
            },
            AuxRule::EdgeWest(i) => match fp(*i) {
                Some(a) => {
                    (a.aabb().min.x - model.room.min.x <= model.params.edge_max_wall_gap_m + tol)
                        as u8 as f64
                }
                None => 0.0,
            },
            AuxRule::EdgeEast(i) => match fp(*i) {
                Some(a) => {
                    (model.room.max.x - a.aabb().max.x <= model.params.edge_max_wall_gap_m + tol)
                        as u8 as f64
                }
                None => 0.0,
            },
            AuxRule::EdgeSouth(i) => match fp(*i) {
                Some(a) => {
                    (a.aabb().min.y - model.room.min.y <= model.params.edge_max_wall_gap_m + tol)
                        as u8 as f64
                }
                None => 0.0,
            },
            AuxRule::EdgeNorth(i) => match fp(*i) {
                Some(a) => {
                    (model.room.max.y - a.aabb().max.y <= model.params.edge_max_wall_gap_m + tol)
                        as u8 as f64
                }
                None => 0.0,
            },
            AuxRule::SideLeft(s, t) => match (fp(*s), fp(*t)) {
                (Some(sub), Some(tar)) => {
                    let (fx, fy) = tar.yaw.facing();
                    let (vx, vy) = (sub.center.x - tar.center.x, sub.center.y - tar.center.y);
                    (fx * vy - fy * vx >= SIDE_EPS) as u8 as f64
                }
                _ => 0.0,
            },
        };
        values.insert(name.clone(), v);
    }
    values
}

/// Residuals of the hard rows under a concrete assignment: positive values
/// are violations.
pub fn hard_row_residuals(
    model: &MilpModel,
    values: &BTreeMap<String, f64>,
) -> Vec<(String, f64)> {
    let mut out = Vec::new();
    for row in &model.rows {
        let lhs: f64 = row
            .terms
            .iter()
            .map(|t| t.coef * values.get(&t.var).copied().unwrap_or(0.0))
            .sum();
        let violation = match row.sense {
            Sense::Le => lhs - row.rhs,
            Sense::Ge => row.rhs - lhs,
            Sense::Eq => (lhs - row.rhs).abs(),
        };
        out.push((row.name.clone(), violation));
    }
    out
}

/// Exact solver for desk-scale instances: enumerates rotation assignments
/// and position-grid cells object by object, keeps placements satisfying
/// every hard constraint, and maximizes the number of satisfied distance
/// terms (exact Euclidean gaps). Deterministic: ties break on the
/// lexicographic placement key.
pub fn solve_bundled(model: &MilpModel, grid_step: f64) -> Result<Layout, MilpError> {
    if grid_step <= 0.0 || grid_step.is_nan() {
        return Err(MilpError::InvalidProblem("grid step must be positive".into()));
    }
    let per_object: Vec<Vec<Footprint>> = model
        .objects
        .iter()
        .map(|o| candidate_footprints(&model.room, o, grid_step))
        .collect();
    let combos: u128 = per_object
        .iter()
        .map(|c| c.len().max(1) as u128)
        .product();
    const BUDGET: u128 = 20_000_000;
    if combos > BUDGET {
        return Err(MilpError::BudgetExceeded(combos));
    }
    if per_object.iter().any(|c| c.is_empty()) {
        return Err(MilpError::Infeasible);
    }

    type PlacementKey = Vec<(String, u64, u64, u32)>;

    struct Search<'a> {
        model: &'a MilpModel,
        per_object: &'a [Vec<Footprint>],
        best: Option<(i64, PlacementKey, BTreeMap<String, Footprint>)>,
    }

    fn f64_key(v: f64) -> u64 {
        let b = v.to_bits();
        if b >> 63 == 1 {
            !b
        } else {
            b | (1 << 63)
        }
    }

    impl<'a> Search<'a> {
        fn recurse(
            &mut self,
            depth: usize,
            placed: &mut BTreeMap<String, Footprint>,
            reward: i64,
        ) {
            if depth == self.model.objects.len() {
                let key: PlacementKey = placed
                    .iter()
                    .map(|(id, f)| {
                        (id.clone(), f64_key(f.center.x), f64_key(f.center.y), f.yaw.degrees())
                    })
                    .collect();
                let better = match &self.best {
                    None => true,
                    Some((bs, bk, _)) => reward > *bs || (reward == *bs && key < *bk),
                };
                if better {
                    self.best = Some((reward, key, placed.clone()));
                }
                return;
            }
            let spec = &self.model.graph.specs[depth];
            for fp in &self.per_object[depth] {
                let aabb = fp.aabb();
                if placed.values().any(|o| aabb.overlaps(&o.aabb())) {
                    continue;
                }
                // Hard relational constraints: everything except near/far.
                let mut feasible = true;
                let mut gained = 0i64;
                for c in spec.all() {
                    let target = c.target().and_then(|id| placed.get(id));
                    match c {
                        Constraint::Near(_) | Constraint::Far(_) => {
                            if eval_constraint(c, fp, target, &self.model.room, &self.model.params)
                                .unwrap_or(false)
                            {
                                gained += 1;
                            }
                        }
                        _ => {
                            if !eval_constraint(c, fp, target, &self.model.room, &self.model.params)
                                .unwrap_or(false)
                            {
                                feasible = false;
                                break;
                            }
                        }
                    }
                }
                if !feasible {
                    continue;
                }
                placed.insert(spec.object_id.clone(), *fp);
                self.recurse(depth + 1, placed, reward + gained);
                placed.remove(&spec.object_id);
            }
        }
    }

    let mut search = Search {
        model,
        per_object: &per_object,
        best: None,
    };
    let mut placed = BTreeMap::new();
    search.recurse(0, &mut placed, 0);

    match search.best {
        None => Err(MilpError::Infeasible),
        Some((_, _, placements)) => {
            let score = score_layout(&placements, &model.graph, &model.room, &model.params);
            Ok(Layout {
                placements,
                score,
                complete: true,
                diagnostics: Diagnostics::default(),
            })
        }
    }
}
