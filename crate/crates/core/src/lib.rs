//! Star-based separators for intersection graphs of c-oriented segments,
//! c-oriented polygons, and string graphs, plus an almost-exact hop-distance
//! oracle built on top of them.
//!
//! The geometric core works in exact rational arithmetic throughout; all
//! operations are pure functions of their inputs and the resulting values are
//! immutable, so they can be moved freely across threads.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod coord;
pub mod geom;
pub mod sweep;
pub mod fragmenter;
pub mod contact;
pub mod planar_sep;
pub mod stars;
pub mod polygons;
pub mod strings;
pub mod oracle;

pub use coord::Coord;
pub use geom::{ColoredSegmentInstance, Direction, Point, Segment};
pub use stars::{Star, StarSeparator};
