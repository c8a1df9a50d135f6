//! Multi-room floor plans: rectangle rooms with materials, shared-wall
//! extraction, exterior-wall computation, connectivity, and validation.
//!
//! Rooms are axis-aligned rectangles with zero wall thickness. Two rooms are
//! considered connected when they share a boundary segment of at least
//! [`MIN_DOOR_WALL_M`] so a single 1 m door can be installed between them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Point2, Rect};

/// Geometric comparison tolerance for wall coincidence, in meters.
pub const GEOM_EPS: f64 = 1e-9;

/// Minimum shared-wall length for two rooms to count as connected.
pub const MIN_DOOR_WALL_M: f64 = 1.0;

/// A material pick resolved against the material and color catalogs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaterialSpec {
    pub material_name: String,
    pub color_name: String,
}

/// One rectangular room. `floor_material` and `wall_material` keep the
/// designer's free-text descriptions verbatim; catalog resolution happens
/// at retrieval time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Room {
    pub name: String,
    pub room_type: String,
    pub vertices: [Point2; 4],
    pub floor_material: String,
    pub wall_material: String,
}

impl Room {
    pub fn new(
        name: impl Into<String>,
        vertices: [Point2; 4],
        floor_material: impl Into<String>,
        wall_material: impl Into<String>,
    ) -> Self {
        let name = name.into();
        Self {
            room_type: name.clone(),
            name,
            vertices,
            floor_material: floor_material.into(),
            wall_material: wall_material.into(),
        }
    }

    /// Axis-aligned bounds of the vertex set.
    pub fn bounds(&self) -> Rect {
        let xs: Vec<f64> = self.vertices.iter().map(|p| p.x).collect();
        let ys: Vec<f64> = self.vertices.iter().map(|p| p.y).collect();
        let min = Point2::new(
            xs.iter().cloned().fold(f64::INFINITY, f64::min),
            ys.iter().cloned().fold(f64::INFINITY, f64::min),
        );
        let max = Point2::new(
            xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        );
        Rect { min, max }
    }

    /// True when the four vertices are exactly the corners of a non-degenerate
    /// axis-aligned rectangle (in any traversal order).
    pub fn is_rectangle(&self) -> bool {
        let b = self.bounds();
        if b.max.x - b.min.x <= GEOM_EPS || b.max.y - b.min.y <= GEOM_EPS {
            return false;
        }
        let mut corners = [
            (b.min.x, b.min.y),
            (b.min.x, b.max.y),
            (b.max.x, b.max.y),
            (b.max.x, b.min.y),
        ];
        let mut seen = [false; 4];
        for v in &self.vertices {
            let mut matched = false;
            for (i, c) in corners.iter_mut().enumerate() {
                if !seen[i] && (v.x - c.0).abs() <= GEOM_EPS && (v.y - c.1).abs() <= GEOM_EPS {
                    seen[i] = true;
                    matched = true;
                    break;
                }
            }
            if !matched {
                return false;
            }
        }
        seen.iter().all(|s| *s)
    }

    /// (width, height) of the bounding rectangle.
    pub fn side_lengths(&self) -> (f64, f64) {
        let b = self.bounds();
        (b.width(), b.height())
    }

    pub fn area(&self) -> f64 {
        self.bounds().area()
    }
}

/// A complete floor plan: rooms plus one wall height for the whole design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FloorPlan {
    pub rooms: Vec<Room>,
    pub wall_height: f64,
}

impl FloorPlan {
    pub fn new(rooms: Vec<Room>, wall_height: f64) -> Self {
        Self { rooms, wall_height }
    }

    pub fn room(&self, name: &str) -> Option<&Room> {
        self.rooms.iter().find(|r| r.name == name)
    }
}

/// Compass direction of a wall, seen from inside the room that owns it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Direction {
    North,
    South,
    East,
    West,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::North,
        Direction::South,
        Direction::East,
        Direction::West,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::North => "north",
            Direction::South => "south",
            Direction::East => "east",
            Direction::West => "west",
        }
    }

    pub fn parse(s: &str) -> Option<Direction> {
        match s.trim().to_ascii_lowercase().as_str() {
            "north" => Some(Direction::North),
            "south" => Some(Direction::South),
            "east" => Some(Direction::East),
            "west" => Some(Direction::West),
            _ => None,
        }
    }

    /// Walls to the east/west run along y; north/south walls run along x.
    pub fn is_vertical(self) -> bool {
        matches!(self, Direction::East | Direction::West)
    }
}

/// A maximal straight piece of a room's boundary. `shared_with` names the
/// neighbouring room when the segment is interior; exterior otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallSegment {
    pub room_name: String,
    pub direction: Direction,
    pub start: Point2,
    pub end: Point2,
    pub shared_with: Option<String>,
}

impl WallSegment {
    pub fn length(&self) -> f64 {
        (self.end.x - self.start.x).abs() + (self.end.y - self.start.y).abs()
    }

    /// The wall's constant coordinate (x for east/west walls, y otherwise).
    pub fn fixed_coord(&self) -> f64 {
        if self.direction.is_vertical() {
            self.start.x
        } else {
            self.start.y
        }
    }

    /// Start/end along the wall's running axis, ordered ascending.
    pub fn interval(&self) -> (f64, f64) {
        let (a, b) = if self.direction.is_vertical() {
            (self.start.y, self.end.y)
        } else {
            (self.start.x, self.end.x)
        };
        (a.min(b), a.max(b))
    }

    /// Deterministic ordering key used for tie-breaks.
    pub fn key(&self) -> (String, &'static str, i64, i64) {
        (
            self.room_name.clone(),
            self.direction.as_str(),
            (self.start.x * 1e6).round() as i64,
            (self.start.y * 1e6).round() as i64,
        )
    }
}

/// A shared boundary segment between two rooms; the embedded segment is
/// expressed from `room_a`'s perspective.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SharedWall {
    pub room_a: String,
    pub room_b: String,
    pub segment: WallSegment,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Severity {
    Error,
    Warning,
}

/// One validation finding; `code` is a stable machine-readable identifier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Finding {
    pub severity: Severity,
    pub code: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    fn push(&mut self, severity: Severity, code: &str, message: String) {
        self.findings.push(Finding {
            severity,
            code: code.to_string(),
            message,
        });
    }

    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Finding> {
        self.findings
            .iter()
            .filter(|f| f.severity == Severity::Warning)
    }

    /// No errors (warnings allowed).
    pub fn is_valid(&self) -> bool {
        self.errors().next().is_none()
    }

    /// No findings at all.
    pub fn is_clean(&self) -> bool {
        self.findings.is_empty()
    }
}

/// Checks the structural invariants of a plan. Errors: room overlap,
/// containment, disconnection, non-rectangular rooms, duplicate names.
/// Warnings: sides outside 3-8 m, area outside 9-48 m². Findings come back
/// sorted, so the report is invariant under room permutation.
pub fn validate_plan(plan: &FloorPlan) -> ValidationReport {
    let mut report = ValidationReport::default();

    if plan.rooms.is_empty() {
        report.push(Severity::Error, "empty_plan", "floor plan has no rooms".into());
        return report;
    }
    if !(plan.wall_height.is_finite() && plan.wall_height > 0.0) {
        report.push(
            Severity::Error,
            "bad_wall_height",
            format!("wall height must be positive, got {}", plan.wall_height),
        );
    }

    let mut seen = std::collections::BTreeSet::new();
    for room in &plan.rooms {
        if !seen.insert(room.name.clone()) {
            report.push(
                Severity::Error,
                "duplicate_name",
                format!("room name '{}' is used more than once", room.name),
            );
        }
    }

    let mut rect_ok = Vec::new();
    for room in &plan.rooms {
        if room.is_rectangle() {
            rect_ok.push(room);
        } else {
            report.push(
                Severity::Error,
                "non_rectangle",
                format!("room '{}' vertices do not form an axis-aligned rectangle", room.name),
            );
        }
    }

    for room in &rect_ok {
        let (w, h) = room.side_lengths();
        for side in [w, h] {
            if !(3.0 - GEOM_EPS..=8.0 + GEOM_EPS).contains(&side) {
                report.push(
                    Severity::Warning,
                    "side_range",
                    format!(
                        "room '{}' side {:.2} m is outside the 3-8 m range",
                        room.name, side
                    ),
                );
            }
        }
        let area = room.area();
        if !(9.0 - GEOM_EPS..=48.0 + GEOM_EPS).contains(&area) {
            report.push(
                Severity::Warning,
                "area_range",
                format!("room '{}' area {:.2} m² is outside the 9-48 m² range", room.name, area),
            );
        }
    }

    for i in 0..rect_ok.len() {
        for j in (i + 1)..rect_ok.len() {
            let (a, b) = (rect_ok[i], rect_ok[j]);
            let (ra, rb) = (a.bounds(), b.bounds());
            if ra.overlaps(&rb) {
                let proper_contain = (ra.contains_rect(&rb) && ra != rb)
                    || (rb.contains_rect(&ra) && ra != rb);
                if proper_contain {
                    let (outer, inner) = if ra.contains_rect(&rb) { (a, b) } else { (b, a) };
                    report.push(
                        Severity::Error,
                        "containment",
                        format!("room '{}' contains room '{}'", outer.name, inner.name),
                    );
                } else {
                    let (first, second) = if a.name <= b.name { (a, b) } else { (b, a) };
                    report.push(
                        Severity::Error,
                        "overlap",
                        format!("rooms '{}' and '{}' overlap", first.name, second.name),
                    );
                }
            }
        }
    }

    // Connectivity over shared walls long enough for a single door.
    if rect_ok.len() == plan.rooms.len() && plan.rooms.len() > 1 && report.is_valid() {
        let shared = shared_walls(plan);
        let index: BTreeMap<&str, usize> = plan
            .rooms
            .iter()
            .enumerate()
            .map(|(i, r)| (r.name.as_str(), i))
            .collect();
        let mut adj = vec![Vec::new(); plan.rooms.len()];
        for sw in &shared {
            if sw.segment.length() + GEOM_EPS >= MIN_DOOR_WALL_M {
                let (ia, ib) = (index[sw.room_a.as_str()], index[sw.room_b.as_str()]);
                adj[ia].push(ib);
                adj[ib].push(ia);
            }
        }
        let mut visited = vec![false; plan.rooms.len()];
        let mut stack = vec![0usize];
        visited[0] = true;
        while let Some(i) = stack.pop() {
            for &j in &adj[i] {
                if !visited[j] {
                    visited[j] = true;
                    stack.push(j);
                }
            }
        }
        if visited.iter().any(|v| !v) {
            let orphans: Vec<&str> = plan
                .rooms
                .iter()
                .zip(&visited)
                .filter(|(_, v)| !**v)
                .map(|(r, _)| r.name.as_str())
                .collect();
            report.push(
                Severity::Error,
                "disconnected",
                format!(
                    "rooms not reachable through shared walls of at least {} m: {}",
                    MIN_DOOR_WALL_M,
                    orphans.join(", ")
                ),
            );
        }
    }

    report
        .findings
        .sort_by(|a, b| (&a.code, &a.message).cmp(&(&b.code, &b.message)));
    report
}

fn side_interval(bounds: &Rect, dir: Direction) -> (f64, (f64, f64)) {
    match dir {
        Direction::West => (bounds.min.x, (bounds.min.y, bounds.max.y)),
        Direction::East => (bounds.max.x, (bounds.min.y, bounds.max.y)),
        Direction::South => (bounds.min.y, (bounds.min.x, bounds.max.x)),
        Direction::North => (bounds.max.y, (bounds.min.x, bounds.max.x)),
    }
}

fn segment_from(room: &str, dir: Direction, fixed: f64, lo: f64, hi: f64, shared: Option<String>) -> WallSegment {
    let (start, end) = if dir.is_vertical() {
        (Point2::new(fixed, lo), Point2::new(fixed, hi))
    } else {
        (Point2::new(lo, fixed), Point2::new(hi, fixed))
    };
    WallSegment {
        room_name: room.to_string(),
        direction: dir,
        start,
        end,
        shared_with: shared,
    }
}

/// Every maximal boundary segment shared by a pair of rooms, with positive
/// length. The segment is expressed from the first room's side; pairs appear
/// in plan order.
pub fn shared_walls(plan: &FloorPlan) -> Vec<SharedWall> {
    let mut out = Vec::new();
    for i in 0..plan.rooms.len() {
        for j in (i + 1)..plan.rooms.len() {
            let (a, b) = (&plan.rooms[i], &plan.rooms[j]);
            let (ba, bb) = (a.bounds(), b.bounds());
            for (dir_a, dir_b) in [
                (Direction::East, Direction::West),
                (Direction::West, Direction::East),
                (Direction::North, Direction::South),
                (Direction::South, Direction::North),
            ] {
                let (fa, (alo, ahi)) = side_interval(&ba, dir_a);
                let (fb, (blo, bhi)) = side_interval(&bb, dir_b);
                if (fa - fb).abs() > GEOM_EPS {
                    continue;
                }
                let lo = alo.max(blo);
                let hi = ahi.min(bhi);
                if hi - lo > GEOM_EPS {
                    out.push(SharedWall {
                        room_a: a.name.clone(),
                        room_b: b.name.clone(),
                        segment: segment_from(&a.name, dir_a, fa, lo, hi, Some(b.name.clone())),
                    });
                }
            }
        }
    }
    out
}

/// Boundary segments of each room not shared with any other room, in plan
/// order then by direction.
pub fn exterior_walls(plan: &FloorPlan) -> Vec<WallSegment> {
    let shared = shared_walls(plan);
    let mut out = Vec::new();
    for room in &plan.rooms {
        let bounds = room.bounds();
        for dir in [Direction::North, Direction::South, Direction::East, Direction::West] {
            let (fixed, (lo, hi)) = side_interval(&bounds, dir);
            // Collect the shared sub-intervals on this side, from either
            // perspective of the pair.
            let mut cuts: Vec<(f64, f64)> = Vec::new();
            for sw in &shared {
                let seg = &sw.segment;
                let same_axis = seg.direction.is_vertical() == dir.is_vertical();
                if !same_axis || (seg.fixed_coord() - fixed).abs() > GEOM_EPS {
                    continue;
                }
                if sw.room_a == room.name && seg.direction == dir {
                    cuts.push(seg.interval());
                } else if sw.room_b == room.name {
                    // The stored segment sits on room_a's wall; it also lies
                    // on this room's opposite-direction wall.
                    let opposite = match dir {
                        Direction::North => Direction::South,
                        Direction::South => Direction::North,
                        Direction::East => Direction::West,
                        Direction::West => Direction::East,
                    };
                    if seg.direction == opposite {
                        cuts.push(seg.interval());
                    }
                }
            }
            cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut cursor = lo;
            for (clo, chi) in cuts {
                if clo - cursor > GEOM_EPS {
                    out.push(segment_from(&room.name, dir, fixed, cursor, clo, None));
                }
                cursor = cursor.max(chi);
            }
            if hi - cursor > GEOM_EPS {
                out.push(segment_from(&room.name, dir, fixed, cursor, hi, None));
            }
        }
    }
    out
}

/// All wall segments of one room: shared pieces plus exterior pieces.
pub fn room_walls(plan: &FloorPlan, room: &str) -> Vec<WallSegment> {
    let mut segs = Vec::new();
    for sw in shared_walls(plan) {
        if sw.room_a == room {
            segs.push(sw.segment);
        } else if sw.room_b == room {
            let dir = match sw.segment.direction {
                Direction::North => Direction::South,
                Direction::South => Direction::North,
                Direction::East => Direction::West,
                Direction::West => Direction::East,
            };
            let (lo, hi) = sw.segment.interval();
            segs.push(segment_from(room, dir, sw.segment.fixed_coord(), lo, hi, Some(sw.room_a)));
        }
    }
    segs.extend(exterior_walls(plan).into_iter().filter(|w| w.room_name == room));
    segs
}

#[derive(Debug, Error, PartialEq)]
pub enum PlanParseError {
    #[error("line {lineno}: expected 'name | floor | wall | vertices', got: {line}")]
    MalformedLine { lineno: usize, line: String },
    #[error("line {lineno}: expected exactly 4 vertices, got {count}")]
    BadVertexCount { lineno: usize, count: usize },
    #[error("line {lineno}: cannot parse vertex coordinate: {token}")]
    BadCoordinate { lineno: usize, token: String },
}

/// Formats a coordinate the way the line format writes it: integers without
/// a decimal point, everything else in shortest round-trip form.
pub fn format_coord(v: f64) -> String {
    format!("{}", v)
}

fn parse_vertices(field: &str, lineno: usize) -> Result<Vec<Point2>, PlanParseError> {
    let inner = field.trim();
    let inner = inner
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| PlanParseError::MalformedLine {
            lineno,
            line: field.to_string(),
        })?;
    let mut verts = Vec::new();
    let mut rest = inner.trim();
    while !rest.is_empty() {
        let open = rest.find('(').ok_or_else(|| PlanParseError::MalformedLine {
            lineno,
            line: field.to_string(),
        })?;
        let close = rest[open..]
            .find(')')
            .map(|c| open + c)
            .ok_or_else(|| PlanParseError::MalformedLine {
                lineno,
                line: field.to_string(),
            })?;
        let pair = &rest[open + 1..close];
        let mut nums = pair.split(',').map(str::trim);
        let (xs, ys) = (nums.next().unwrap_or(""), nums.next().unwrap_or(""));
        if nums.next().is_some() {
            return Err(PlanParseError::BadCoordinate {
                lineno,
                token: pair.to_string(),
            });
        }
        let x: f64 = xs.parse().map_err(|_| PlanParseError::BadCoordinate {
            lineno,
            token: xs.to_string(),
        })?;
        let y: f64 = ys.parse().map_err(|_| PlanParseError::BadCoordinate {
            lineno,
            token: ys.to_string(),
        })?;
        verts.push(Point2::new(x, y));
        rest = rest[close + 1..].trim_start().trim_start_matches(',').trim_start();
    }
    Ok(verts)
}

/// Parses one `room name | floor material | wall material | [(x, y), ...]`
/// line.
pub fn parse_room_line(line: &str, lineno: usize) -> Result<Room, PlanParseError> {
    let fields: Vec<&str> = line.split('|').map(str::trim).collect();
    if fields.len() != 4 || fields.iter().any(|f| f.is_empty()) {
        return Err(PlanParseError::MalformedLine {
            lineno,
            line: line.to_string(),
        });
    }
    let verts = parse_vertices(fields[3], lineno)?;
    if verts.len() != 4 {
        return Err(PlanParseError::BadVertexCount {
            lineno,
            count: verts.len(),
        });
    }
    Ok(Room::new(
        fields[0],
        [verts[0], verts[1], verts[2], verts[3]],
        fields[1],
        fields[2],
    ))
}

/// Serializes a room back to its line form; the inverse of
/// [`parse_room_line`], byte-exact on well-formed input.
pub fn format_room_line(room: &Room) -> String {
    let verts: Vec<String> = room
        .vertices
        .iter()
        .map(|p| format!("({}, {})", format_coord(p.x), format_coord(p.y)))
        .collect();
    format!(
        "{} | {} | {} | [{}]",
        room.name,
        room.floor_material,
        room.wall_material,
        verts.join(", ")
    )
}

/// Parses a whole plan from room lines (one per non-blank line).
pub fn parse_plan(text: &str, wall_height: f64) -> Result<FloorPlan, PlanParseError> {
    let mut rooms = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        rooms.push(parse_room_line(line, i + 1)?);
    }
    Ok(FloorPlan::new(rooms, wall_height))
}

pub fn format_plan(plan: &FloorPlan) -> String {
    plan.rooms
        .iter()
        .map(format_room_line)
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn two_room_plan() -> FloorPlan {
        let living = Room::new(
            "living room",
            [
                Point2::new(0.0, 0.0),
                Point2::new(0.0, 8.0),
                Point2::new(5.0, 8.0),
                Point2::new(5.0, 0.0),
            ],
            "maple hardwood, matte",
            "light grey drywall, smooth",
        );
        let kitchen = Room::new(
            "kitchen",
            [
                Point2::new(5.0, 0.0),
                Point2::new(5.0, 5.0),
                Point2::new(8.0, 5.0),
                Point2::new(8.0, 0.0),
            ],
            "white hex tile, glossy",
            "light grey drywall, smooth",
        );
        FloorPlan::new(vec![living, kitchen], 3.0)
    }

    #[test]
    fn example_plan_is_valid() {
        let report = validate_plan(&two_room_plan());
        assert!(report.is_clean(), "unexpected findings: {:?}", report.findings);
    }

    #[test]
    fn identical_rooms_overlap() {
        let mut plan = two_room_plan();
        let mut dup = plan.rooms[0].clone();
        dup.name = "copy".into();
        plan.rooms[1] = dup;
        let report = validate_plan(&plan);
        assert!(report.findings.iter().any(|f| f.code == "overlap"));
    }

    #[test]
    fn small_room_warns_on_side_and_area() {
        let tiny = Room::new(
            "closet",
            [
                Point2::new(0.0, 0.0),
                Point2::new(0.0, 2.0),
                Point2::new(2.0, 2.0),
                Point2::new(2.0, 0.0),
            ],
            "pine plank",
            "white drywall, smooth",
        );
        let report = validate_plan(&FloorPlan::new(vec![tiny], 3.0));
        assert!(report.is_valid());
        assert_eq!(report.findings.iter().filter(|f| f.code == "side_range").count(), 2);
        assert_eq!(report.findings.iter().filter(|f| f.code == "area_range").count(), 1);
    }

    #[test]
    fn contained_room_is_an_error() {
        let outer = Room::new(
            "hall",
            [
                Point2::new(0.0, 0.0),
                Point2::new(0.0, 8.0),
                Point2::new(8.0, 8.0),
                Point2::new(8.0, 0.0),
            ],
            "oak hardwood, matte",
            "white drywall, smooth",
        );
        let inner = Room::new(
            "booth",
            [
                Point2::new(2.0, 2.0),
                Point2::new(2.0, 5.0),
                Point2::new(5.0, 5.0),
                Point2::new(5.0, 2.0),
            ],
            "oak hardwood, matte",
            "white drywall, smooth",
        );
        let report = validate_plan(&FloorPlan::new(vec![outer, inner], 3.0));
        assert!(report.findings.iter().any(|f| f.code == "containment"));
    }

    #[test]
    fn disconnected_rooms_are_an_error() {
        let a = Room::new(
            "a",
            [
                Point2::new(0.0, 0.0),
                Point2::new(0.0, 4.0),
                Point2::new(4.0, 4.0),
                Point2::new(4.0, 0.0),
            ],
            "oak hardwood, matte",
            "white drywall, smooth",
        );
        let b = Room::new(
            "b",
            [
                Point2::new(6.0, 0.0),
                Point2::new(6.0, 4.0),
                Point2::new(10.0, 4.0),
                Point2::new(10.0, 0.0),
            ],
            "oak hardwood, matte",
            "white drywall, smooth",
        );
        let report = validate_plan(&FloorPlan::new(vec![a, b], 3.0));
        assert!(report.findings.iter().any(|f| f.code == "disconnected"));
    }

    #[test]
    fn validation_is_order_invariant() {
        let mut plan = two_room_plan();
        let r1 = validate_plan(&plan);
        plan.rooms.reverse();
        let r2 = validate_plan(&plan);
        assert_eq!(r1, r2);
    }

    #[test]
    fn shared_wall_of_example_plan() {
        let shared = shared_walls(&two_room_plan());
        assert_eq!(shared.len(), 1);
        let sw = &shared[0];
        assert_eq!(sw.room_a, "living room");
        assert_eq!(sw.room_b, "kitchen");
        assert_eq!(sw.segment.direction, Direction::East);
        assert_eq!(sw.segment.start, Point2::new(5.0, 0.0));
        assert_eq!(sw.segment.end, Point2::new(5.0, 5.0));
    }

    #[test]
    fn corner_touch_is_not_shared() {
        let a = Room::new(
            "a",
            [
                Point2::new(0.0, 0.0),
                Point2::new(0.0, 4.0),
                Point2::new(4.0, 4.0),
                Point2::new(4.0, 0.0),
            ],
            "oak hardwood, matte",
            "white drywall, smooth",
        );
        let b = Room::new(
            "b",
            [
                Point2::new(4.0, 4.0),
                Point2::new(4.0, 8.0),
                Point2::new(8.0, 8.0),
                Point2::new(8.0, 4.0),
            ],
            "oak hardwood, matte",
            "white drywall, smooth",
        );
        assert!(shared_walls(&FloorPlan::new(vec![a, b], 3.0)).is_empty());
    }

    #[test]
    fn single_room_has_no_shared_walls_and_four_exterior() {
        let plan = FloorPlan::new(vec![two_room_plan().rooms[0].clone()], 3.0);
        assert!(shared_walls(&plan).is_empty());
        let ext = exterior_walls(&plan);
        assert_eq!(ext.len(), 4);
        let mut lens: Vec<f64> = ext.iter().map(|w| w.length()).collect();
        lens.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(lens, vec![5.0, 5.0, 8.0, 8.0]);
    }

    #[test]
    fn kitchen_west_side_fully_shared() {
        let plan = two_room_plan();
        let ext = exterior_walls(&plan);
        // The kitchen spans y in [0, 5]; its whole west side is shared with
        // the living room, so no exterior west segment exists for it.
        assert!(!ext
            .iter()
            .any(|w| w.room_name == "kitchen" && w.direction == Direction::West));
        // The living room's east wall above y=5 stays exterior.
        let east: Vec<_> = ext
            .iter()
            .filter(|w| w.room_name == "living room" && w.direction == Direction::East)
            .collect();
        assert_eq!(east.len(), 1);
        assert_eq!(east[0].interval(), (5.0, 8.0));
    }

    #[test]
    fn boundary_partition_conserves_length() {
        let plan = two_room_plan();
        let shared = shared_walls(&plan);
        let ext = exterior_walls(&plan);
        for room in &plan.rooms {
            let b = room.bounds();
            let perimeter = 2.0 * (b.width() + b.height());
            let shared_len: f64 = shared
                .iter()
                .filter(|sw| sw.room_a == room.name || sw.room_b == room.name)
                .map(|sw| sw.segment.length())
                .sum();
            let ext_len: f64 = ext
                .iter()
                .filter(|w| w.room_name == room.name)
                .map(|w| w.length())
                .sum();
            assert!(
                (shared_len + ext_len - perimeter).abs() < 1e-9,
                "room {}: shared {} + exterior {} != perimeter {}",
                room.name,
                shared_len,
                ext_len,
                perimeter
            );
        }
    }

    #[test]
    fn room_walls_covers_the_full_boundary() {
        let plan = two_room_plan();
        for room in &plan.rooms {
            let b = room.bounds();
            let total: f64 = room_walls(&plan, &room.name).iter().map(|w| w.length()).sum();
            assert!((total - 2.0 * (b.width() + b.height())).abs() < 1e-9);
        }
        // The kitchen's west wall comes back attributed to the kitchen,
        // marked shared with the living room.
        let kitchen_walls = room_walls(&plan, "kitchen");
        let west: Vec<_> = kitchen_walls
            .iter()
            .filter(|w| w.direction == Direction::West)
            .collect();
        assert_eq!(west.len(), 1);
        assert_eq!(west[0].room_name, "kitchen");
        assert_eq!(west[0].shared_with.as_deref(), Some("living room"));
    }

    #[test]
    fn surrounded_room_has_no_exterior_walls() {
        // 3x3 grid of 3 m rooms: the center room is enclosed on all sides.
        let mut rooms = Vec::new();
        for gy in 0..3 {
            for gx in 0..3 {
                let (x0, y0) = (gx as f64 * 3.0, gy as f64 * 3.0);
                rooms.push(Room::new(
                    format!("cell-{}-{}", gx, gy),
                    [
                        Point2::new(x0, y0),
                        Point2::new(x0, y0 + 3.0),
                        Point2::new(x0 + 3.0, y0 + 3.0),
                        Point2::new(x0 + 3.0, y0),
                    ],
                    "oak hardwood, matte",
                    "white drywall, smooth",
                ));
            }
        }
        let plan = FloorPlan::new(rooms, 3.0);
        assert!(validate_plan(&plan).is_valid());
        let ext = exterior_walls(&plan);
        assert!(!ext.iter().any(|w| w.room_name == "cell-1-1"));
        // The center room still has its full boundary as shared walls.
        let shared_len: f64 = shared_walls(&plan)
            .iter()
            .filter(|sw| sw.room_a == "cell-1-1" || sw.room_b == "cell-1-1")
            .map(|sw| sw.segment.length())
            .sum();
        assert!((shared_len - 12.0).abs() < 1e-9);
    }

    // Randomized binary-space splits always tile the outer rectangle, so
    // every room's boundary must partition exactly into shared plus
    // exterior segments.
    #[test]
    fn boundary_partition_on_random_splits() {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;

        fn split(rng: &mut ChaCha8Rng, r: Rect, depth: usize, out: &mut Vec<Rect>) {
            let splittable_x = r.width() >= 6.0;
            let splittable_y = r.height() >= 6.0;
            if depth == 0 || (!splittable_x && !splittable_y) {
                out.push(r);
                return;
            }
            let vertical = match (splittable_x, splittable_y) {
                (true, true) => rng.gen_bool(0.5),
                (true, false) => true,
                _ => false,
            };
            if vertical {
                let cut = r.min.x + (rng.gen_range(6..=((r.width() / 0.5) as i64 - 6)) as f64) * 0.5;
                split(rng, Rect::new(r.min, Point2::new(cut, r.max.y)), depth - 1, out);
                split(rng, Rect::new(Point2::new(cut, r.min.y), r.max), depth - 1, out);
            } else {
                let cut = r.min.y + (rng.gen_range(6..=((r.height() / 0.5) as i64 - 6)) as f64) * 0.5;
                split(rng, Rect::new(r.min, Point2::new(r.max.x, cut)), depth - 1, out);
                split(rng, Rect::new(Point2::new(r.min.x, cut), r.max), depth - 1, out);
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for case in 0..25 {
            let outer = Rect::new(Point2::new(0.0, 0.0), Point2::new(12.0, 9.0));
            let mut rects = Vec::new();
            split(&mut rng, outer, 3, &mut rects);
            let rooms: Vec<Room> = rects
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    Room::new(
                        format!("r{}", i),
                        [
                            Point2::new(r.min.x, r.min.y),
                            Point2::new(r.min.x, r.max.y),
                            Point2::new(r.max.x, r.max.y),
                            Point2::new(r.max.x, r.min.y),
                        ],
                        "oak hardwood, matte",
                        "white drywall, smooth",
                    )
                })
                .collect();
            let plan = FloorPlan::new(rooms, 3.0);
            let report = validate_plan(&plan);
            assert!(
                !report.findings.iter().any(|f| f.code == "overlap" || f.code == "containment"),
                "case {}: {:?}",
                case,
                report.findings
            );
            let shared = shared_walls(&plan);
            let ext = exterior_walls(&plan);
            for room in &plan.rooms {
                let b = room.bounds();
                let perimeter = 2.0 * (b.width() + b.height());
                let shared_len: f64 = shared
                    .iter()
                    .filter(|sw| sw.room_a == room.name || sw.room_b == room.name)
                    .map(|sw| sw.segment.length())
                    .sum();
                let ext_len: f64 = ext
                    .iter()
                    .filter(|w| w.room_name == room.name)
                    .map(|w| w.length())
                    .sum();
                assert!(
                    (shared_len + ext_len - perimeter).abs() < 1e-9,
                    "case {} room {}: {} + {} != {}",
                    case,
                    room.name,
                    shared_len,
                    ext_len,
                    perimeter
                );
            }
        }
    }

    #[test]
    fn room_line_round_trip() {
        let line = "living room | maple hardwood, matte | light grey drywall, smooth | [(0, 0), (0, 8), (5, 8), (5, 0)]";
        let room = parse_room_line(line, 1).unwrap();
        assert_eq!(room.name, "living room");
        let b = room.bounds();
        assert_eq!((b.width(), b.height()), (5.0, 8.0));
        assert_eq!(format_room_line(&room), line);
    }

    #[test]
    fn room_line_with_three_fields_is_malformed() {
        let err = parse_room_line("a | b | [(0,0), (0,1), (1,1), (1,0)]", 3).unwrap_err();
        assert!(matches!(err, PlanParseError::MalformedLine { lineno: 3, .. }));
    }

    #[test]
    fn five_vertices_is_an_error() {
        let err = parse_room_line(
            "a | b | c | [(0, 0), (0, 1), (1, 1), (1, 0), (2, 0)]",
            1,
        )
        .unwrap_err();
        assert_eq!(err, PlanParseError::BadVertexCount { lineno: 1, count: 5 });
    }
}
