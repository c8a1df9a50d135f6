//! 2D primitives shared by the floor plan, openings, and layout modules:
//! points, axis-aligned rectangles, and quarter-turn rotated footprints.
//!
//! All lengths are meters. Yaw is restricted to multiples of 90 degrees, so
//! every bounding-box computation is exact (no trigonometry).

use serde::{Deserialize, Serialize};

/// A point in the floor plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Quarter-turn rotation of a footprint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Yaw {
    Deg0,
    Deg90,
    Deg180,
    Deg270,
}

impl Yaw {
    pub const ALL: [Yaw; 4] = [Yaw::Deg0, Yaw::Deg90, Yaw::Deg180, Yaw::Deg270];

    pub fn degrees(self) -> u32 {
        match self {
            Yaw::Deg0 => 0,
            Yaw::Deg90 => 90,
            Yaw::Deg180 => 180,
            Yaw::Deg270 => 270,
        }
    }

    pub fn from_degrees(deg: u32) -> Option<Yaw> {
        match deg % 360 {
            0 => Some(Yaw::Deg0),
            90 => Some(Yaw::Deg90),
            180 => Some(Yaw::Deg180),
            270 => Some(Yaw::Deg270),
            _ => None,
        }
    }

    /// Unit facing vector: 0 faces +y, 90 faces +x, 180 faces -y, 270 faces -x.
    /// An asset's local +y axis is its front.
    pub fn facing(self) -> (f64, f64) {
        match self {
            Yaw::Deg0 => (0.0, 1.0),
            Yaw::Deg90 => (1.0, 0.0),
            Yaw::Deg180 => (0.0, -1.0),
            Yaw::Deg270 => (-1.0, 0.0),
        }
    }

    /// True when the rotation swaps the footprint's width and depth extents.
    pub fn swaps_extents(self) -> bool {
        matches!(self, Yaw::Deg90 | Yaw::Deg270)
    }
}

/// An object's rectangular footprint on the floor: center, local extents, and
/// one of four yaw rotations. Width is the extent along the local x axis and
/// depth along local y (the facing axis).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Footprint {
    pub center: Point2,
    pub width: f64,
    pub depth: f64,
    pub yaw: Yaw,
}

impl Footprint {
    pub fn new(center: Point2, width: f64, depth: f64, yaw: Yaw) -> Self {
        debug_assert!(width > 0.0 && depth > 0.0);
        Self {
            center,
            width,
            depth,
            yaw,
        }
    }

    /// Half of the axis-aligned extent along world x.
    pub fn half_extent_x(&self) -> f64 {
        if self.yaw.swaps_extents() {
            self.depth / 2.0
        } else {
            self.width / 2.0
        }
    }

    /// Half of the axis-aligned extent along world y.
    pub fn half_extent_y(&self) -> f64 {
        if self.yaw.swaps_extents() {
            self.width / 2.0
        } else {
            self.depth / 2.0
        }
    }

    /// Axis-aligned bounds. Exact because yaw is a multiple of 90 degrees:
    /// a quarter turn just swaps the roles of width and depth.
    pub fn aabb(&self) -> Rect {
        let hx = self.half_extent_x();
        let hy = self.half_extent_y();
        Rect {
            min: Point2::new(self.center.x - hx, self.center.y - hy),
            max: Point2::new(self.center.x + hx, self.center.y + hy),
        }
    }
}

/// Axis-aligned rectangle with `min` strictly below `max` on both axes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub min: Point2,
    pub max: Point2,
}

impl Rect {
    pub fn new(min: Point2, max: Point2) -> Self {
        debug_assert!(min.x < max.x && min.y < max.y);
        Self { min, max }
    }

    /// Builds the rectangle spanned by two arbitrary corners.
    pub fn from_corners(a: Point2, b: Point2) -> Self {
        Self {
            min: Point2::new(a.x.min(b.x), a.y.min(b.y)),
            max: Point2::new(a.x.max(b.x), a.y.max(b.y)),
        }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center(&self) -> Point2 {
        Point2::new((self.min.x + self.max.x) / 2.0, (self.min.y + self.max.y) / 2.0)
    }

    /// Open-interval intersection test: true iff the interiors intersect.
    /// Rectangles that merely share an edge or corner do not overlap, so
    /// flush side-by-side placement is legal.
    pub fn overlaps(&self, other: &Rect) -> bool {
        self.min.x < other.max.x
            && other.min.x < self.max.x
            && self.min.y < other.max.y
            && other.min.y < self.max.y
    }

    /// Closed containment test: true iff `inner` lies inside `self`,
    /// boundary included (flush-to-wall placement counts as inside).
    pub fn contains_rect(&self, inner: &Rect) -> bool {
        self.min.x <= inner.min.x
            && self.min.y <= inner.min.y
            && inner.max.x <= self.max.x
            && inner.max.y <= self.max.y
    }

    pub fn contains_point(&self, p: Point2) -> bool {
        self.min.x <= p.x && p.x <= self.max.x && self.min.y <= p.y && p.y <= self.max.y
    }

    /// Minimum Euclidean distance between the two closed rectangles;
    /// 0 when they touch or overlap.
    pub fn gap_distance(&self, other: &Rect) -> f64 {
        let dx = (self.min.x - other.max.x).max(other.min.x - self.max.x).max(0.0);
        let dy = (self.min.y - other.max.y).max(other.min.y - self.max.y).max(0.0);
        (dx * dx + dy * dy).sqrt()
    }

    /// Smallest distance from `inner` to this rectangle's boundary, signed:
    /// negative when `inner` sticks out. Used for the edge/middle predicates.
    pub fn boundary_gap(&self, inner: &Rect) -> f64 {
        (inner.min.x - self.min.x)
            .min(inner.min.y - self.min.y)
            .min(self.max.x - inner.max.x)
            .min(self.max.y - inner.max.y)
    }
}
