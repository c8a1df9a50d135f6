//! Doorways and windows: connection types, door sizes, the window size
//! catalog, and deterministic placement of openings onto walls.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::floorplan::{exterior_walls, shared_walls, Direction, FloorPlan, WallSegment, GEOM_EPS};

/// Default door height in meters; the line format does not carry one.
pub const DEFAULT_DOOR_HEIGHT_M: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConnectionType {
    /// Frame without a door.
    Doorframe,
    /// Frame with a door.
    Doorway,
    /// No wall separating the rooms.
    Open,
}

impl ConnectionType {
    pub fn as_str(self) -> &'static str {
        match self {
            ConnectionType::Doorframe => "doorframe",
            ConnectionType::Doorway => "doorway",
            ConnectionType::Open => "open",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DoorSize {
    /// 1 m wide.
    Single,
    /// 2 m wide.
    Double,
}

impl DoorSize {
    pub fn width_m(self) -> f64 {
        match self {
            DoorSize::Single => 1.0,
            DoorSize::Double => 2.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            DoorSize::Single => "single",
            DoorSize::Double => "double",
        }
    }
}

/// One room connection. `room_a` may be the literal `exterior`. Open
/// connections carry no size or style (serialized as `N/A`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DoorSpec {
    pub room_a: String,
    pub room_b: String,
    pub connection: ConnectionType,
    pub size: Option<DoorSize>,
    pub style_query: Option<String>,
}

impl DoorSpec {
    pub fn width_m(&self) -> Option<f64> {
        self.size.map(DoorSize::width_m)
    }

    pub fn touches_exterior(&self) -> bool {
        self.room_a == "exterior" || self.room_b == "exterior"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WindowType {
    Fixed,
    Hung,
    Slider,
}

impl WindowType {
    pub fn as_str(self) -> &'static str {
        match self {
            WindowType::Fixed => "fixed",
            WindowType::Hung => "hung",
            WindowType::Slider => "slider",
        }
    }

    pub fn parse(s: &str) -> Option<WindowType> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fixed" => Some(WindowType::Fixed),
            "hung" => Some(WindowType::Hung),
            "slider" => Some(WindowType::Slider),
            _ => None,
        }
    }
}

/// The fixed table of available window sizes (width, height) in cm.
pub struct WindowCatalog;

impl WindowCatalog {
    pub const FIXED: [(u32, u32); 6] =
        [(92, 120), (150, 92), (150, 120), (150, 180), (240, 120), (240, 180)];
    pub const HUNG: [(u32, u32); 6] =
        [(87, 160), (96, 91), (120, 160), (130, 67), (130, 87), (130, 130)];
    pub const SLIDER: [(u32, u32); 6] =
        [(91, 92), (120, 61), (120, 91), (120, 120), (150, 92), (150, 120)];

    pub fn sizes(window_type: WindowType) -> &'static [(u32, u32)] {
        match window_type {
            WindowType::Fixed => &Self::FIXED,
            WindowType::Hung => &Self::HUNG,
            WindowType::Slider => &Self::SLIDER,
        }
    }

    /// Strict check: the size is a row of this window type's own list.
    pub fn is_valid(window_type: WindowType, size_cm: (u32, u32)) -> bool {
        Self::sizes(window_type).contains(&size_cm)
    }

    /// Lenient check: the size appears anywhere in the table. Placement uses
    /// this because the reference example pairs a fixed window with a size
    /// listed under hung.
    pub fn size_in_table(size_cm: (u32, u32)) -> bool {
        [WindowType::Fixed, WindowType::Hung, WindowType::Slider]
            .iter()
            .any(|t| Self::sizes(*t).contains(&size_cm))
    }
}

/// One window request: all windows of a room must share type and size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub room: String,
    pub direction: Direction,
    pub window_type: WindowType,
    pub size_cm: (u32, u32),
    pub quantity: u32,
    pub base_height_cm: f64,
}

/// A door spec bound to a concrete wall. For `open` connections the whole
/// wall is removed: offset 0, width = wall length. `asset_id` is the door
/// asset resolved from the style query, when one applies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacedDoor {
    pub spec: DoorSpec,
    pub wall: WallSegment,
    pub offset_m: f64,
    pub width_m: f64,
    pub height_m: f64,
    pub asset_id: Option<String>,
}

/// One physical window pane bound to a wall (a quantity-n spec yields n).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlacedWindow {
    pub spec: WindowSpec,
    pub index: u32,
    pub wall: WallSegment,
    pub offset_m: f64,
    pub width_m: f64,
    pub height_m: f64,
    pub base_height_m: f64,
}

/// 1D occupancy interval of an opening in absolute plan coordinates:
/// (vertical wall?, fixed coordinate, lo, hi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OpeningInterval {
    pub vertical: bool,
    pub fixed: f64,
    pub lo: f64,
    pub hi: f64,
}

impl OpeningInterval {
    pub fn collides(&self, other: &OpeningInterval) -> bool {
        self.vertical == other.vertical
            && (self.fixed - other.fixed).abs() <= GEOM_EPS
            && self.lo < other.hi - GEOM_EPS
            && other.lo < self.hi - GEOM_EPS
    }
}

fn opening_interval(wall: &WallSegment, offset_m: f64, width_m: f64) -> OpeningInterval {
    let (lo, _) = wall.interval();
    OpeningInterval {
        vertical: wall.direction.is_vertical(),
        fixed: wall.fixed_coord(),
        lo: lo + offset_m,
        hi: lo + offset_m + width_m,
    }
}

impl PlacedDoor {
    pub fn interval(&self) -> OpeningInterval {
        opening_interval(&self.wall, self.offset_m, self.width_m)
    }
}

impl PlacedWindow {
    pub fn interval(&self) -> OpeningInterval {
        opening_interval(&self.wall, self.offset_m, self.width_m)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum OpeningsError {
    #[error("no shared wall between '{room_a}' and '{room_b}'")]
    NoSharedWall { room_a: String, room_b: String },
    #[error("door between '{room_a}' and '{room_b}' is wider than the widest eligible wall ({wall_length_m} m)")]
    DoorTooWide {
        room_a: String,
        room_b: String,
        wall_length_m: f64,
    },
    #[error("no door connects to the exterior")]
    MissingExteriorDoor,
    #[error("room '{0}' does not exist in the plan")]
    UnknownRoom(String),
    #[error("door spec must carry a size for connection '{0}'")]
    MissingDoorSize(String),
    #[error("windows in room '{room}' do not fit: need {needed_m} m on a {available_m} m wall")]
    WindowOverflow {
        room: String,
        needed_m: f64,
        available_m: f64,
    },
    #[error("window in room '{room}' rises to {top_cm} cm, above the {wall_height_cm} cm wall")]
    WindowTooTall {
        room: String,
        top_cm: f64,
        wall_height_cm: f64,
    },
    #[error("window in room '{room}' ({direction:?} wall) overlaps a placed door")]
    WindowDoorCollision { room: String, direction: Direction },
    #[error("size {size:?} is not in the {window_type:?} window catalog")]
    InvalidSize {
        window_type: WindowType,
        size: (u32, u32),
    },
    #[error("room '{room}' mixes window types or sizes; all windows of a room must match")]
    MixedWindowSpec { room: String },
    #[error("room '{room}' has no exterior wall facing {direction:?}")]
    NoWindowWall { room: String, direction: Direction },
}

fn free_slot(
    wall: &WallSegment,
    width: f64,
    occupied: &[OpeningInterval],
) -> Option<f64> {
    let (lo, hi) = wall.interval();
    let vertical = wall.direction.is_vertical();
    let fixed = wall.fixed_coord();
    let mut blocked: Vec<(f64, f64)> = occupied
        .iter()
        .filter(|o| o.vertical == vertical && (o.fixed - fixed).abs() <= GEOM_EPS)
        .map(|o| (o.lo, o.hi))
        .filter(|(blo, bhi)| *blo < hi && *bhi > lo)
        .collect();
    blocked.sort_by(|a, b| a.partial_cmp(b).unwrap());

    // Free gaps along the wall, widest-candidate order: prefer the slot whose
    // center is closest to the wall center, then the smaller offset.
    let mut gaps = Vec::new();
    let mut cursor = lo;
    for (blo, bhi) in blocked {
        if blo - cursor > GEOM_EPS {
            gaps.push((cursor, blo));
        }
        cursor = cursor.max(bhi);
    }
    if hi - cursor > GEOM_EPS {
        gaps.push((cursor, hi));
    }

    let wall_center = (lo + hi) / 2.0;
    let mut best: Option<(f64, f64)> = None; // (distance to center, start)
    for (glo, ghi) in gaps {
        if ghi - glo + GEOM_EPS < width {
            continue;
        }
        // Center the opening inside the gap, then clamp toward the wall
        // center when the gap allows.
        let ideal = (wall_center - width / 2.0).clamp(glo, ghi - width);
        let dist = ((ideal + width / 2.0) - wall_center).abs();
        match best {
            Some((bd, bs)) if (bd, bs) <= (dist, ideal) => {}
            _ => best = Some((dist, ideal)),
        }
    }
    best.map(|(_, start)| start - lo)
}

/// Assigns each door spec to a wall. Doors go to the widest eligible wall
/// (lexicographic wall key on ties), centered when the wall is free. The
/// spec set must include at least one connection to the exterior.
pub fn place_doors(
    plan: &FloorPlan,
    doors: &[DoorSpec],
    door_height_m: f64,
) -> Result<Vec<PlacedDoor>, OpeningsError> {
    if !doors.is_empty() && !doors.iter().any(DoorSpec::touches_exterior) {
        return Err(OpeningsError::MissingExteriorDoor);
    }

    let shared = shared_walls(plan);
    let exterior = exterior_walls(plan);
    let mut placed: Vec<PlacedDoor> = Vec::new();
    let mut occupied: Vec<OpeningInterval> = Vec::new();

    for spec in doors {
        for name in [&spec.room_a, &spec.room_b] {
            if name != "exterior" && plan.room(name).is_none() {
                return Err(OpeningsError::UnknownRoom(name.clone()));
            }
        }

        let mut walls: Vec<WallSegment> = if spec.touches_exterior() {
            let room = if spec.room_a == "exterior" { &spec.room_b } else { &spec.room_a };
            exterior.iter().filter(|w| &w.room_name == room).cloned().collect()
        } else {
            shared
                .iter()
                .filter(|sw| {
                    (sw.room_a == spec.room_a && sw.room_b == spec.room_b)
                        || (sw.room_a == spec.room_b && sw.room_b == spec.room_a)
                })
                .map(|sw| sw.segment.clone())
                .collect()
        };
        if walls.is_empty() {
            return Err(OpeningsError::NoSharedWall {
                room_a: spec.room_a.clone(),
                room_b: spec.room_b.clone(),
            });
        }
        walls.sort_by(|a, b| {
            b.length()
                .partial_cmp(&a.length())
                .unwrap()
                .then_with(|| a.key().cmp(&b.key()))
        });

        if spec.connection == ConnectionType::Open {
            let wall = walls[0].clone();
            let width = wall.length();
            occupied.push(opening_interval(&wall, 0.0, width));
            placed.push(PlacedDoor {
                spec: spec.clone(),
                wall,
                offset_m: 0.0,
                width_m: width,
                height_m: plan.wall_height,
                asset_id: None,
            });
            continue;
        }

        let size = spec
            .size
            .ok_or_else(|| OpeningsError::MissingDoorSize(spec.connection.as_str().into()))?;
        let width = size.width_m();
        let mut slot = None;
        for wall in &walls {
            if wall.length() + GEOM_EPS < width {
                continue;
            }
            if let Some(offset) = free_slot(wall, width, &occupied) {
                slot = Some((wall.clone(), offset));
                break;
            }
        }
        let (wall, offset) = slot.ok_or_else(|| OpeningsError::DoorTooWide {
            room_a: spec.room_a.clone(),
            room_b: spec.room_b.clone(),
            wall_length_m: walls[0].length(),
        })?;
        occupied.push(opening_interval(&wall, offset, width));
        placed.push(PlacedDoor {
            spec: spec.clone(),
            wall,
            offset_m: offset,
            width_m: width,
            height_m: door_height_m,
            asset_id: None,
        });
    }
    Ok(placed)
}

/// Spreads each window spec evenly along the longest exterior wall of its
/// room in the requested direction, rejecting overflow, walls too short,
/// panes rising above the wall height, and collisions with placed doors.
pub fn place_windows(
    plan: &FloorPlan,
    windows: &[WindowSpec],
    doors: &[PlacedDoor],
) -> Result<Vec<PlacedWindow>, OpeningsError> {
    // Per-room uniformity of type and size.
    for (i, a) in windows.iter().enumerate() {
        for b in windows.iter().skip(i + 1) {
            if a.room == b.room && (a.window_type != b.window_type || a.size_cm != b.size_cm) {
                return Err(OpeningsError::MixedWindowSpec { room: a.room.clone() });
            }
        }
    }

    let exterior = exterior_walls(plan);
    let mut occupied: Vec<OpeningInterval> = doors.iter().map(PlacedDoor::interval).collect();
    let mut placed = Vec::new();

    for spec in windows {
        if plan.room(&spec.room).is_none() {
            return Err(OpeningsError::UnknownRoom(spec.room.clone()));
        }
        if !WindowCatalog::size_in_table(spec.size_cm) {
            return Err(OpeningsError::InvalidSize {
                window_type: spec.window_type,
                size: spec.size_cm,
            });
        }
        let wall_height_cm = plan.wall_height * 100.0;
        let top_cm = spec.base_height_cm + spec.size_cm.1 as f64;
        if top_cm > wall_height_cm + GEOM_EPS {
            return Err(OpeningsError::WindowTooTall {
                room: spec.room.clone(),
                top_cm,
                wall_height_cm,
            });
        }

        let mut walls: Vec<&WallSegment> = exterior
            .iter()
            .filter(|w| w.room_name == spec.room && w.direction == spec.direction)
            .collect();
        if walls.is_empty() {
            return Err(OpeningsError::NoWindowWall {
                room: spec.room.clone(),
                direction: spec.direction,
            });
        }
        walls.sort_by(|a, b| {
            b.length()
                .partial_cmp(&a.length())
                .unwrap()
                .then_with(|| a.key().cmp(&b.key()))
        });
        let wall = walls[0];

        let width_m = spec.size_cm.0 as f64 / 100.0;
        let n = spec.quantity as f64;
        let needed = n * width_m;
        if needed > wall.length() + GEOM_EPS {
            return Err(OpeningsError::WindowOverflow {
                room: spec.room.clone(),
                needed_m: needed,
                available_m: wall.length(),
            });
        }
        let gap = (wall.length() - needed) / (n + 1.0);
        for i in 0..spec.quantity {
            let offset = gap * (i as f64 + 1.0) + width_m * i as f64;
            let interval = opening_interval(wall, offset, width_m);
            if occupied.iter().any(|o| o.collides(&interval)) {
                return Err(OpeningsError::WindowDoorCollision {
                    room: spec.room.clone(),
                    direction: spec.direction,
                });
            }
            occupied.push(interval);
            placed.push(PlacedWindow {
                spec: spec.clone(),
                index: i,
                wall: wall.clone(),
                offset_m: offset,
                width_m,
                height_m: spec.size_cm.1 as f64 / 100.0,
                base_height_m: spec.base_height_cm / 100.0,
            });
        }
    }
    Ok(placed)
}

#[derive(Debug, Error, PartialEq)]
pub enum OpeningParseError {
    #[error("line {lineno}: expected '{expected}', got: {line}")]
    MalformedLine {
        lineno: usize,
        expected: &'static str,
        line: String,
    },
    #[error("line {lineno}: unknown connection type '{token}'")]
    UnknownConnectionType { lineno: usize, token: String },
    #[error("line {lineno}: invalid window size '{token}'")]
    InvalidWindowSize { lineno: usize, token: String },
}

/// Parses one `room 1 | room 2 | connection type | size | door style` line.
pub fn parse_door_line(line: &str, lineno: usize) -> Result<DoorSpec, OpeningParseError> {
    let expected = "room 1 | room 2 | connection type | size | door style";
    let fields: Vec<&str> = line.split('|').map(str::trim).collect();
    if fields.len() != 5 || fields[0].is_empty() || fields[1].is_empty() {
        return Err(OpeningParseError::MalformedLine {
            lineno,
            expected,
            line: line.to_string(),
        });
    }
    let connection = match fields[2].to_ascii_lowercase().as_str() {
        "doorframe" => ConnectionType::Doorframe,
        "doorway" => ConnectionType::Doorway,
        "open" => ConnectionType::Open,
        other => {
            return Err(OpeningParseError::UnknownConnectionType {
                lineno,
                token: other.to_string(),
            })
        }
    };
    let size = match fields[3].to_ascii_lowercase().as_str() {
        "single" => Some(DoorSize::Single),
        "double" => Some(DoorSize::Double),
        "n/a" => None,
        other => {
            return Err(OpeningParseError::MalformedLine {
                lineno,
                expected: "size one of single/double/N/A",
                line: other.to_string(),
            })
        }
    };
    let style_query = match fields[4] {
        "N/A" | "n/a" => None,
        s => Some(s.to_string()),
    };
    Ok(DoorSpec {
        room_a: fields[0].to_string(),
        room_b: fields[1].to_string(),
        connection,
        size,
        style_query,
    })
}

pub fn format_door_line(spec: &DoorSpec) -> String {
    format!(
        "{} | {} | {} | {} | {}",
        spec.room_a,
        spec.room_b,
        spec.connection.as_str(),
        spec.size.map(|s| s.as_str()).unwrap_or("N/A"),
        spec.style_query.as_deref().unwrap_or("N/A"),
    )
}

/// Parses one
/// `room | wall direction | window type | size | quantity | base height` line.
pub fn parse_window_line(line: &str, lineno: usize) -> Result<WindowSpec, OpeningParseError> {
    let expected = "room | wall direction | window type | size | quantity | window base height";
    let fields: Vec<&str> = line.split('|').map(str::trim).collect();
    if fields.len() != 6 || fields[0].is_empty() {
        return Err(OpeningParseError::MalformedLine {
            lineno,
            expected,
            line: line.to_string(),
        });
    }
    let direction = Direction::parse(fields[1]).ok_or_else(|| OpeningParseError::MalformedLine {
        lineno,
        expected: "wall direction one of north/south/east/west",
        line: fields[1].to_string(),
    })?;
    let window_type =
        WindowType::parse(fields[2]).ok_or_else(|| OpeningParseError::MalformedLine {
            lineno,
            expected: "window type one of fixed/hung/slider",
            line: fields[2].to_string(),
        })?;
    let size_inner = fields[3]
        .strip_prefix('(')
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| OpeningParseError::InvalidWindowSize {
            lineno,
            token: fields[3].to_string(),
        })?;
    let mut nums = size_inner.split(',').map(str::trim);
    let parse_u32 = |s: Option<&str>| -> Option<u32> { s.and_then(|v| v.parse().ok()) };
    let (w, h) = match (parse_u32(nums.next()), parse_u32(nums.next()), nums.next()) {
        (Some(w), Some(h), None) => (w, h),
        _ => {
            return Err(OpeningParseError::InvalidWindowSize {
                lineno,
                token: fields[3].to_string(),
            })
        }
    };
    let quantity: u32 = fields[4].parse().map_err(|_| OpeningParseError::MalformedLine {
        lineno,
        expected: "quantity as a positive integer",
        line: fields[4].to_string(),
    })?;
    if quantity == 0 {
        return Err(OpeningParseError::MalformedLine {
            lineno,
            expected: "quantity as a positive integer",
            line: fields[4].to_string(),
        });
    }
    let base_height_cm: f64 = fields[5].parse().map_err(|_| OpeningParseError::MalformedLine {
        lineno,
        expected: "window base height in cm",
        line: fields[5].to_string(),
    })?;
    Ok(WindowSpec {
        room: fields[0].to_string(),
        direction,
        window_type,
        size_cm: (w, h),
        quantity,
        base_height_cm,
    })
}

pub fn format_window_line(spec: &WindowSpec) -> String {
    format!(
        "{} | {} | {} | ({}, {}) | {} | {}",
        spec.room,
        spec.direction.as_str(),
        spec.window_type.as_str(),
        spec.size_cm.0,
        spec.size_cm.1,
        spec.quantity,
        spec.base_height_cm,
    )
}
