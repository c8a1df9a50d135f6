//! Prompt-driven indoor scene generation.
//!
//! The pipeline turns a textual prompt into a validated multi-room floor
//! plan, doors and windows, retrieved assets, and a physically plausible
//! object layout solved from spatial-relational constraints, exported as a
//! portable scene document.
//!
//! Modules:
//! - [`geometry`]: points, rectangles, rotated footprints.
//! - [`floorplan`]: rooms, validation, shared/exterior walls.
//! - [`openings`]: doorways, windows, and the window size catalog.
//! - [`constraints`]: the spatial-relation DSL and predicate semantics.
//! - [`solver`]: the DFS layout solver and the baseline strategies.
//! - [`milp`]: the mixed-integer encoding, LP export, and a bundled solver.
//! - [`retrieval`]: asset catalog, similarity scoring, material selection.
//! - [`gateway`]: prompt templates, response parsers, backends, pipeline.
//! - [`scene`]: scene assembly, document export, top-down SVG rendering.
//! - [`oracle`]: exhaustive reference search backing the test suites.

pub mod constraints;
pub mod floorplan;
pub mod gateway;
pub mod geometry;
pub mod milp;
pub mod openings;
pub mod oracle;
pub mod retrieval;
pub mod scene;
pub mod solver;
