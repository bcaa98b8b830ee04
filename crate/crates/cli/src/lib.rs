//! File formats, instance generators, SVG rendering, and benchmark plumbing
//! around the starsep core.

pub mod bench;
pub mod formats;
pub mod generate;
pub mod run;
pub mod svg;
