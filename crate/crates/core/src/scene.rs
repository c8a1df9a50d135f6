//! Scene assembly and export: wall and small-object placement on top of a
//! solved floor layout, the portable scene-document text format, and a
//! top-down SVG rendering.
//!
//! Exported documents are deterministic: floats are quantized to six
//! decimals at finalization and written with fixed formatting, so
//! export -> parse -> export is byte-stable and parse(export(doc)) == doc.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::floorplan::{
    format_room_line, parse_room_line, Direction, FloorPlan, MaterialSpec, PlanParseError,
    WallSegment,
};
use crate::geometry::{Footprint, Point2, Rect, Yaw};
use crate::openings::{
    parse_door_line, parse_window_line, OpeningInterval, PlacedDoor, PlacedWindow,
};

pub const SCENE_FORMAT_VERSION: u32 = 1;

/// Quantize to six decimals; micro-units keep the round trip exact.
pub fn quant6(v: f64) -> f64 {
    (v * 1e6).round() / 1e6
}

fn fmt6(v: f64) -> String {
    format!("{:.6}", v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObjectKind {
    Floor,
    Wall,
    Small,
    Ceiling,
}

impl ObjectKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectKind::Floor => "floor",
            ObjectKind::Wall => "wall",
            ObjectKind::Small => "small",
            ObjectKind::Ceiling => "ceiling",
        }
    }

    fn parse(s: &str) -> Option<ObjectKind> {
        match s {
            "floor" => Some(ObjectKind::Floor),
            "wall" => Some(ObjectKind::Wall),
            "small" => Some(ObjectKind::Small),
            "ceiling" => Some(ObjectKind::Ceiling),
            _ => None,
        }
    }
}

/// One placed instance. Floor objects sit at z = 0; wall objects hang on a
/// wall above their parent floor object; small objects rest on their
/// parent's top surface; ceiling objects hang at wall height.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacedObject {
    pub instance_id: String,
    pub asset_id: String,
    pub room: String,
    pub kind: ObjectKind,
    pub position: (f64, f64, f64),
    pub yaw_deg: u32,
    pub parent: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoomMaterials {
    pub room: String,
    pub floor: MaterialSpec,
    pub wall: MaterialSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneMetadata {
    pub prompt: String,
    pub seed: u64,
    pub generator: String,
}

/// The assembled house: everything needed to rebuild or render the scene.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneDocument {
    pub metadata: SceneMetadata,
    pub plan: FloorPlan,
    pub materials: Vec<RoomMaterials>,
    pub doors: Vec<PlacedDoor>,
    pub windows: Vec<PlacedWindow>,
    pub objects: Vec<PlacedObject>,
}

impl SceneDocument {
    /// Quantizes every float the text format writes with fixed precision
    /// and flattens metadata newlines (the format is line-based). Room
    /// vertices are exempt: they serialize in shortest round-trip form.
    pub fn finalize(&mut self) {
        self.metadata.prompt = self.metadata.prompt.replace(['\n', '\r'], " ");
        self.metadata.generator = self.metadata.generator.replace(['\n', '\r'], " ");
        self.plan.wall_height = quant6(self.plan.wall_height);
        for d in &mut self.doors {
            d.offset_m = quant6(d.offset_m);
            d.width_m = quant6(d.width_m);
            d.height_m = quant6(d.height_m);
        }
        for w in &mut self.windows {
            w.offset_m = quant6(w.offset_m);
            w.width_m = quant6(w.width_m);
            w.height_m = quant6(w.height_m);
            w.base_height_m = quant6(w.base_height_m);
        }
        for o in &mut self.objects {
            o.position = (
                quant6(o.position.0),
                quant6(o.position.1),
                quant6(o.position.2),
            );
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum SceneError {
    #[error("floor object '{0}' is not adjacent to any wall")]
    NoAdjacentWall(String),
    #[error("wall object '{0}' would overlap a door or window opening")]
    OpeningCollision(String),
    #[error("wall object '{0}' does not fit on the wall")]
    WallOverflow(String),
}

/// Hangs a wall object above a floor object: flush to the nearest wall,
/// horizontally centered over the parent, base at `height_cm`. Fails when
/// the parent is not within `edge_threshold_m` of a wall, or when the
/// object's wall interval intersects a door or window opening.
#[allow(clippy::too_many_arguments)]
pub fn place_wall_object(
    instance_id: &str,
    asset_id: &str,
    width_m: f64,
    above: &PlacedObject,
    above_footprint: &Footprint,
    height_cm: f64,
    room: &Rect,
    edge_threshold_m: f64,
    openings: &[OpeningInterval],
) -> Result<PlacedObject, SceneError> {
    let aabb = above_footprint.aabb();
    let gaps = [
        (Direction::West, aabb.min.x - room.min.x),
        (Direction::East, room.max.x - aabb.max.x),
        (Direction::South, aabb.min.y - room.min.y),
        (Direction::North, room.max.y - aabb.max.y),
    ];
    let (dir, gap) = gaps
        .iter()
        .copied()
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .unwrap();
    if gap > edge_threshold_m {
        return Err(SceneError::NoAdjacentWall(instance_id.to_string()));
    }

    let (vertical, fixed, along_center, wall_lo, wall_hi, yaw) = match dir {
        Direction::West => (true, room.min.x, above_footprint.center.y, room.min.y, room.max.y, Yaw::Deg90),
        Direction::East => (true, room.max.x, above_footprint.center.y, room.min.y, room.max.y, Yaw::Deg270),
        Direction::South => (false, room.min.y, above_footprint.center.x, room.min.x, room.max.x, Yaw::Deg0),
        Direction::North => (false, room.max.y, above_footprint.center.x, room.min.x, room.max.x, Yaw::Deg180),
    };
    let lo = along_center - width_m / 2.0;
    let hi = along_center + width_m / 2.0;
    if lo < wall_lo - 1e-9 || hi > wall_hi + 1e-9 {
        return Err(SceneError::WallOverflow(instance_id.to_string()));
    }
    let mine = OpeningInterval {
        vertical,
        fixed,
        lo,
        hi,
    };
    if openings.iter().any(|o| o.collides(&mine)) {
        return Err(SceneError::OpeningCollision(instance_id.to_string()));
    }
    let position = if vertical {
        (fixed, along_center, height_cm / 100.0)
    } else {
        (along_center, fixed, height_cm / 100.0)
    };
    Ok(PlacedObject {
        instance_id: instance_id.to_string(),
        asset_id: asset_id.to_string(),
        room: above.room.clone(),
        kind: ObjectKind::Wall,
        position,
        yaw_deg: yaw.degrees(),
        parent: Some(above.instance_id.clone()),
    })
}

/// One child to scatter on a parent's top surface.
#[derive(Debug, Clone)]
pub struct SmallChild {
    pub instance_id: String,
    pub asset_id: String,
    pub width_m: f64,
    pub depth_m: f64,
}

/// Deterministic stand-in for a physics random spawn: children land in
/// jittered stratified-grid cells of the parent's top rectangle, pairwise
/// disjoint and fully on the surface. Children that cannot fit their cell
/// are dropped and reported.
pub fn spawn_small_objects(
    parent: &PlacedObject,
    parent_top: &Rect,
    parent_height_m: f64,
    children: &[SmallChild],
    seed: u64,
) -> (Vec<PlacedObject>, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = children.len();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let cols = (n as f64).sqrt().ceil() as usize;
    let rows = n.div_ceil(cols);
    let cell_w = parent_top.width() / cols as f64;
    let cell_h = parent_top.height() / rows as f64;

    let mut placed = Vec::new();
    let mut dropped = Vec::new();
    for (k, child) in children.iter().enumerate() {
        let (ci, cj) = (k % cols, k / cols);
        let cell_min_x = parent_top.min.x + ci as f64 * cell_w;
        let cell_min_y = parent_top.min.y + cj as f64 * cell_h;

        let yaw = Yaw::ALL[rng.gen_range(0..4)];
        let fits = |y: Yaw| {
            let (ex, ey) = if y.swaps_extents() {
                (child.depth_m, child.width_m)
            } else {
                (child.width_m, child.depth_m)
            };
            (ex <= cell_w + 1e-12 && ey <= cell_h + 1e-12).then_some((ex, ey))
        };
        let (yaw, (ex, ey)) = match fits(yaw) {
            Some(e) => (yaw, e),
            None => match fits(Yaw::Deg0) {
                Some(e) => (Yaw::Deg0, e),
                None => {
                    dropped.push(child.instance_id.clone());
                    continue;
                }
            },
        };
        let free_x = cell_w - ex;
        let free_y = cell_h - ey;
        let dx = if free_x > 0.0 { rng.gen_range(0.0..=free_x) } else { 0.0 };
        let dy = if free_y > 0.0 { rng.gen_range(0.0..=free_y) } else { 0.0 };
        placed.push(PlacedObject {
            instance_id: child.instance_id.clone(),
            asset_id: child.asset_id.clone(),
            room: parent.room.clone(),
            kind: ObjectKind::Small,
            position: (cell_min_x + dx + ex / 2.0, cell_min_y + dy + ey / 2.0, parent_height_m),
            yaw_deg: yaw.degrees(),
            parent: Some(parent.instance_id.clone()),
        });
    }
    (placed, dropped)
}

fn direction_str(d: Direction) -> &'static str {
    d.as_str()
}

fn wall_fields(w: &WallSegment) -> String {
    format!(
        "{} | {} | {} | {} | {} | {} | {}",
        w.room_name,
        direction_str(w.direction),
        fmt6(w.start.x),
        fmt6(w.start.y),
        fmt6(w.end.x),
        fmt6(w.end.y),
        w.shared_with.as_deref().unwrap_or("-"),
    )
}

/// Serializes the document to the line-based scene format. Deterministic:
/// fixed field orders, six-decimal floats, document order preserved.
pub fn export_scene(doc: &SceneDocument) -> String {
    let mut out = String::new();
    out.push_str(&format!("scene-format {}\n", SCENE_FORMAT_VERSION));
    out.push_str(&format!("prompt | {}\n", doc.metadata.prompt));
    out.push_str(&format!("seed | {}\n", doc.metadata.seed));
    out.push_str(&format!("generator | {}\n", doc.metadata.generator));
    out.push_str(&format!("wall_height | {}\n", fmt6(doc.plan.wall_height)));
    for room in &doc.plan.rooms {
        out.push_str(&format!("room | {}\n", format_room_line(room)));
    }
    for m in &doc.materials {
        out.push_str(&format!(
            "material | {} | floor | {} | {}\n",
            m.room, m.floor.material_name, m.floor.color_name
        ));
        out.push_str(&format!(
            "material | {} | wall | {} | {}\n",
            m.room, m.wall.material_name, m.wall.color_name
        ));
    }
    for d in &doc.doors {
        out.push_str(&format!(
            "door | {} | {} | {} | {} | {} | {}\n",
            crate::openings::format_door_line(&d.spec),
            wall_fields(&d.wall),
            d.asset_id.as_deref().unwrap_or("-"),
            fmt6(d.offset_m),
            fmt6(d.width_m),
            fmt6(d.height_m),
        ));
    }
    for w in &doc.windows {
        out.push_str(&format!(
            "window | {} | {} | {} | {} | {} | {} | {}\n",
            crate::openings::format_window_line(&w.spec),
            w.index,
            wall_fields(&w.wall),
            fmt6(w.offset_m),
            fmt6(w.width_m),
            fmt6(w.height_m),
            fmt6(w.base_height_m),
        ));
    }
    for o in &doc.objects {
        out.push_str(&format!(
            "object | {} | {} | {} | {} | {} | {} | {} | {} | {}\n",
            o.instance_id,
            o.asset_id,
            o.room,
            o.kind.as_str(),
            fmt6(o.position.0),
            fmt6(o.position.1),
            fmt6(o.position.2),
            o.yaw_deg,
            o.parent.as_deref().unwrap_or("-"),
        ));
    }
    out
}

#[derive(Debug, Error, PartialEq)]
pub enum SceneParseError {
    #[error("line {lineno}: {detail}")]
    Malformed { lineno: usize, detail: String },
    #[error("unsupported scene format version {0}")]
    BadVersion(String),
    #[error(transparent)]
    Plan(#[from] PlanParseError),
}

fn split_fields(line: &str) -> Vec<&str> {
    line.split('|').map(str::trim).collect()
}

fn parse_wall_fields(f: &[&str], lineno: usize) -> Result<WallSegment, SceneParseError> {
    if f.len() != 7 {
        return Err(SceneParseError::Malformed {
            lineno,
            detail: format!("expected 7 wall fields, got {}", f.len()),
        });
    }
    let num = |s: &str| -> Result<f64, SceneParseError> {
        s.parse().map_err(|_| SceneParseError::Malformed {
            lineno,
            detail: format!("bad number '{}'", s),
        })
    };
    Ok(WallSegment {
        room_name: f[0].to_string(),
        direction: Direction::parse(f[1]).ok_or_else(|| SceneParseError::Malformed {
            lineno,
            detail: format!("bad direction '{}'", f[1]),
        })?,
        start: Point2::new(num(f[2])?, num(f[3])?),
        end: Point2::new(num(f[4])?, num(f[5])?),
        shared_with: if f[6] == "-" { None } else { Some(f[6].to_string()) },
    })
}

/// Parses text produced by [`export_scene`].
pub fn parse_scene(text: &str) -> Result<SceneDocument, SceneParseError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(SceneParseError::Malformed {
        lineno: 1,
        detail: "empty document".into(),
    })?;
    let version = header.strip_prefix("scene-format ").ok_or_else(|| {
        SceneParseError::Malformed {
            lineno: 1,
            detail: "missing scene-format header".into(),
        }
    })?;
    if version.trim() != SCENE_FORMAT_VERSION.to_string() {
        return Err(SceneParseError::BadVersion(version.trim().to_string()));
    }

    let mut metadata = SceneMetadata {
        prompt: String::new(),
        seed: 0,
        generator: String::new(),
    };
    let mut wall_height = 0.0;
    let mut rooms = Vec::new();
    let mut materials: Vec<RoomMaterials> = Vec::new();
    let mut doors = Vec::new();
    let mut windows = Vec::new();
    let mut objects = Vec::new();

    for (i, raw) in lines {
        let lineno = i + 1;
        let line = raw.trim_end();
        if line.is_empty() {
            continue;
        }
        let (tag, rest) = line.split_once(" | ").ok_or_else(|| SceneParseError::Malformed {
            lineno,
            detail: format!("missing record tag: {}", line),
        })?;
        let num = |s: &str| -> Result<f64, SceneParseError> {
            s.parse().map_err(|_| SceneParseError::Malformed {
                lineno,
                detail: format!("bad number '{}'", s),
            })
        };
        match tag {
            "prompt" => metadata.prompt = rest.to_string(),
            "seed" => {
                metadata.seed = rest.parse().map_err(|_| SceneParseError::Malformed {
                    lineno,
                    detail: format!("bad seed '{}'", rest),
                })?
            }
            "generator" => metadata.generator = rest.to_string(),
            "wall_height" => wall_height = num(rest)?,
            "room" => rooms.push(parse_room_line(rest, lineno)?),
            "material" => {
                let f = split_fields(rest);
                if f.len() != 4 {
                    return Err(SceneParseError::Malformed {
                        lineno,
                        detail: format!("expected 4 material fields, got {}", f.len()),
                    });
                }
                let spec = MaterialSpec {
                    material_name: f[2].to_string(),
                    color_name: f[3].to_string(),
                };
                match materials.iter_mut().find(|m| m.room == f[0]) {
                    Some(m) if f[1] == "wall" => m.wall = spec,
                    Some(m) => m.floor = spec,
                    None => {
                        let mut m = RoomMaterials {
                            room: f[0].to_string(),
                            floor: MaterialSpec {
                                material_name: String::new(),
                                color_name: String::new(),
                            },
                            wall: MaterialSpec {
                                material_name: String::new(),
                                color_name: String::new(),
                            },
                        };
                        if f[1] == "wall" {
                            m.wall = spec;
                        } else {
                            m.floor = spec;
                        }
                        materials.push(m);
                    }
                }
            }
            "door" => {
                let f = split_fields(rest);
                if f.len() != 16 {
                    return Err(SceneParseError::Malformed {
                        lineno,
                        detail: format!("expected 16 door fields, got {}", f.len()),
                    });
                }
                let spec_line = f[..5].join(" | ");
                let spec = parse_door_line(&spec_line, lineno).map_err(|e| {
                    SceneParseError::Malformed {
                        lineno,
                        detail: e.to_string(),
                    }
                })?;
                doors.push(PlacedDoor {
                    spec,
                    wall: parse_wall_fields(&f[5..12], lineno)?,
                    asset_id: if f[12] == "-" { None } else { Some(f[12].to_string()) },
                    offset_m: num(f[13])?,
                    width_m: num(f[14])?,
                    height_m: num(f[15])?,
                });
            }
            "window" => {
                let f = split_fields(rest);
                if f.len() != 18 {
                    return Err(SceneParseError::Malformed {
                        lineno,
                        detail: format!("expected 18 window fields, got {}", f.len()),
                    });
                }
                let spec_line = f[..6].join(" | ");
                let spec = parse_window_line(&spec_line, lineno).map_err(|e| {
                    SceneParseError::Malformed {
                        lineno,
                        detail: e.to_string(),
                    }
                })?;
                windows.push(PlacedWindow {
                    spec,
                    index: f[6].parse().map_err(|_| SceneParseError::Malformed {
                        lineno,
                        detail: format!("bad window index '{}'", f[6]),
                    })?,
                    wall: parse_wall_fields(&f[7..14], lineno)?,
                    offset_m: num(f[14])?,
                    width_m: num(f[15])?,
                    height_m: num(f[16])?,
                    base_height_m: num(f[17])?,
                });
            }
            "object" => {
                let f = split_fields(rest);
                if f.len() != 9 {
                    return Err(SceneParseError::Malformed {
                        lineno,
                        detail: format!("expected 9 object fields, got {}", f.len()),
                    });
                }
                objects.push(PlacedObject {
                    instance_id: f[0].to_string(),
                    asset_id: f[1].to_string(),
                    room: f[2].to_string(),
                    kind: ObjectKind::parse(f[3]).ok_or_else(|| SceneParseError::Malformed {
                        lineno,
                        detail: format!("bad object kind '{}'", f[3]),
                    })?,
                    position: (num(f[4])?, num(f[5])?, num(f[6])?),
                    yaw_deg: f[7].parse().map_err(|_| SceneParseError::Malformed {
                        lineno,
                        detail: format!("bad yaw '{}'", f[7]),
                    })?,
                    parent: if f[8] == "-" { None } else { Some(f[8].to_string()) },
                });
            }
            other => {
                return Err(SceneParseError::Malformed {
                    lineno,
                    detail: format!("unknown record tag '{}'", other),
                })
            }
        }
    }
    Ok(SceneDocument {
        metadata,
        plan: FloorPlan::new(rooms, wall_height),
        materials,
        doors,
        windows,
        objects,
    })
}

const PX_PER_M: f64 = 50.0;
const SVG_MARGIN: f64 = 10.0;

/// Renders a top-down view: room outlines, door and window marks, object
/// rectangles with labels and facing arrows. 1 m = 50 px; deterministic
/// element order (rooms, doors, windows, objects, in document order).
pub fn render_svg(doc: &SceneDocument, object_dims: &BTreeMap<String, (f64, f64)>) -> String {
    let mut min = Point2::new(f64::INFINITY, f64::INFINITY);
    let mut max = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for room in &doc.plan.rooms {
        let b = room.bounds();
        min.x = min.x.min(b.min.x);
        min.y = min.y.min(b.min.y);
        max.x = max.x.max(b.max.x);
        max.y = max.y.max(b.max.y);
    }
    if doc.plan.rooms.is_empty() {
        min = Point2::new(0.0, 0.0);
        max = Point2::new(0.0, 0.0);
    }
    let width = (max.x - min.x) * PX_PER_M + 2.0 * SVG_MARGIN;
    let height = (max.y - min.y) * PX_PER_M + 2.0 * SVG_MARGIN;
    let px = |x: f64| SVG_MARGIN + (x - min.x) * PX_PER_M;
    let py = |y: f64| SVG_MARGIN + (max.y - y) * PX_PER_M;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.2}\" height=\"{:.2}\" viewBox=\"0 0 {:.2} {:.2}\">\n",
        width, height, width, height
    ));
    for room in &doc.plan.rooms {
        let b = room.bounds();
        out.push_str(&format!(
            "  <rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"#f8f6f2\" stroke=\"#333333\" stroke-width=\"2\"/>\n",
            px(b.min.x),
            py(b.max.y),
            b.width() * PX_PER_M,
            b.height() * PX_PER_M
        ));
        out.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\" fill=\"#555555\">{}</text>\n",
            px(b.min.x) + 4.0,
            py(b.max.y) + 14.0,
            room.name
        ));
    }
    for d in &doc.doors {
        let (lo, _) = d.wall.interval();
        let (a, b) = (lo + d.offset_m, lo + d.offset_m + d.width_m);
        let fixed = d.wall.fixed_coord();
        let (x1, y1, x2, y2) = if d.wall.direction.is_vertical() {
            (px(fixed), py(a), px(fixed), py(b))
        } else {
            (px(a), py(fixed), px(b), py(fixed))
        };
        let dash = if d.spec.connection == crate::openings::ConnectionType::Open {
            " stroke-dasharray=\"6 4\""
        } else {
            ""
        };
        out.push_str(&format!(
            "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#a0622d\" stroke-width=\"5\"{}/>\n",
            x1, y1, x2, y2, dash
        ));
    }
    for w in &doc.windows {
        let (lo, _) = w.wall.interval();
        let (a, b) = (lo + w.offset_m, lo + w.offset_m + w.width_m);
        let fixed = w.wall.fixed_coord();
        let (x1, y1, x2, y2) = if w.wall.direction.is_vertical() {
            (px(fixed), py(a), px(fixed), py(b))
        } else {
            (px(a), py(fixed), px(b), py(fixed))
        };
        out.push_str(&format!(
            "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#4a90d9\" stroke-width=\"4\"/>\n",
            x1, y1, x2, y2
        ));
    }
    for o in &doc.objects {
        let (w, d) = object_dims
            .get(&o.instance_id)
            .copied()
            .unwrap_or((0.3, 0.3));
        let yaw = Yaw::from_degrees(o.yaw_deg).unwrap_or(Yaw::Deg0);
        let fp = Footprint::new(Point2::new(o.position.0, o.position.1), w, d, yaw);
        let aabb = fp.aabb();
        let fill = match o.kind {
            ObjectKind::Floor => "#cfe0cc",
            ObjectKind::Wall => "#e8d3a9",
            ObjectKind::Small => "#d9c7e8",
            ObjectKind::Ceiling => "#c7dbe8",
        };
        out.push_str(&format!(
            "  <rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"{}\" stroke=\"#444444\" stroke-width=\"1\"/>\n",
            px(aabb.min.x),
            py(aabb.max.y),
            aabb.width() * PX_PER_M,
            aabb.height() * PX_PER_M,
            fill
        ));
        let (fx, fy) = yaw.facing();
        let len = (w.min(d) / 2.0) * 0.8;
        out.push_str(&format!(
            "  <line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#444444\" stroke-width=\"1.5\"/>\n",
            px(o.position.0),
            py(o.position.1),
            px(o.position.0 + fx * len),
            py(o.position.1 + fy * len)
        ));
        out.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-size=\"9\" fill=\"#333333\" text-anchor=\"middle\">{}</text>\n",
            px(o.position.0),
            py(o.position.1) - 3.0,
            o.instance_id
        ));
    }
    out.push_str("</svg>\n");
    out
}
