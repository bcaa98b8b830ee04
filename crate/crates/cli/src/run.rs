//! Glue between file-level instances and the core pipelines: separate,
//! validate, and oracle construction for every instance kind.

use std::fmt;
use std::io::Write;
use std::process::{Command, Stdio};

use starsep_core::coord::one;
use starsep_core::fragmenter::FragmentSet;
use starsep_core::geom::{segments_intersect, ColoredSegmentInstance, Segment};
use starsep_core::oracle::{build_oracle, DistanceOracle};
use starsep_core::planar_sep::SeparatorResult;
use starsep_core::polygons::{inflate_segments, polygon_star_separator, polygons_intersect, Polygon};
use starsep_core::stars::{
    intersection_edges, segment_star_separator, validate_star_separator, IntersectionOracle,
    SegmentOracle, StarSeparator, StarValidationReport,
};
use starsep_core::strings::{
    bfs_fm_separator, brute_force_min_separator, string_star_separator, AbstractGraph,
    NodeSeparatorStrategy,
};

use crate::formats::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Segments,
    Polygons,
    Strings,
}

impl Mode {
    pub fn parse(s: &str) -> Option<Mode> {
        Some(match s {
            "segments" => Mode::Segments,
            "polygons" => Mode::Polygons,
            "strings" => Mode::Strings,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone)]
pub enum Stage2 {
    BfsFm,
    Brute,
    External(String),
}

impl Stage2 {
    pub fn parse(s: &str) -> Option<Stage2> {
        if s == "bfs-fm" {
            Some(Stage2::BfsFm)
        } else if s == "brute" {
            Some(Stage2::Brute)
        } else {
            s.strip_prefix("external:").map(|p| Stage2::External(p.to_string()))
        }
    }
}

#[derive(Debug)]
pub enum RunError {
    Input(String),
    Pipeline(String),
    Validation(Vec<String>),
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunError::Input(m) => write!(f, "input error: {m}"),
            RunError::Pipeline(m) => write!(f, "pipeline error: {m}"),
            RunError::Validation(v) => write!(f, "validation failed: {}", v.join("; ")),
        }
    }
}

impl std::error::Error for RunError {}

fn has_overlaps(inst: &ColoredSegmentInstance) -> bool {
    for i in 0..inst.n() {
        for j in (i + 1)..inst.n() {
            let (a, b) = (&inst.segments[i], &inst.segments[j]);
            if a.color == b.color && segments_intersect(a, b) {
                return true;
            }
        }
    }
    false
}

/// Separator output along with debugging artifacts.
pub struct SeparateOutput {
    pub separator: StarSeparator,
    pub fragments: Option<FragmentSet>,
}

/// Computes a star-based separator for the instance in the requested mode,
/// verifying the result before returning it.
pub fn separate(
    inst: &Instance,
    mode: Option<Mode>,
    perturb: bool,
    stage2: &Stage2,
) -> Result<SeparateOutput, RunError> {
    let mode = mode.unwrap_or(match inst {
        Instance::Segments(_) => Mode::Segments,
        Instance::Polygons(_) => Mode::Polygons,
        Instance::Graph(_) => Mode::Strings,
    });
    let out = match (inst, mode) {
        (Instance::Segments(seg), Mode::Segments) => {
            if has_overlaps(seg) {
                if !perturb {
                    return Err(RunError::Input(
                        "overlapping same-color segments; rerun with --perturb".into(),
                    ));
                }
                let polys = inflate_segments(seg);
                let pout = polygon_star_separator(&polys)
                    .map_err(|e| RunError::Pipeline(format!("{e}")))?;
                SeparateOutput { separator: pout.separator, fragments: None }
            } else {
                let sout =
                    segment_star_separator(seg).map_err(|e| RunError::Pipeline(format!("{e}")))?;
                SeparateOutput { separator: sout.separator, fragments: Some(sout.fragments) }
            }
        }
        (Instance::Polygons(ps), Mode::Polygons) => {
            let pout =
                polygon_star_separator(ps).map_err(|e| RunError::Pipeline(format!("{e}")))?;
            SeparateOutput { separator: pout.separator, fragments: None }
        }
        (Instance::Graph(g), Mode::Strings) => {
            let separator = run_string_pipeline(g, stage2)?;
            SeparateOutput { separator, fragments: None }
        }
        (Instance::Segments(seg), Mode::Strings) => {
            // Treat the segments as strings: build the intersection graph.
            let edges: Vec<(u32, u32)> = intersection_edges(seg)
                .into_iter()
                .map(|(u, v)| (u as u32, v as u32))
                .collect();
            let g = AbstractGraph::from_edges(seg.n(), &edges)
                .map_err(|e| RunError::Pipeline(format!("{e}")))?;
            let separator = run_string_pipeline(&g, stage2)?;
            SeparateOutput { separator, fragments: None }
        }
        _ => {
            return Err(RunError::Input(format!(
                "mode does not apply to a {} instance",
                inst.kind()
            )))
        }
    };
    let report = validate(inst, &out.separator);
    if !report.is_valid() {
        return Err(RunError::Validation(report.violations));
    }
    Ok(out)
}

fn run_string_pipeline(g: &AbstractGraph, stage2: &Stage2) -> Result<StarSeparator, RunError> {
    let brute = |sub: &AbstractGraph| -> SeparatorResult {
        brute_force_min_separator(sub).unwrap_or_else(|_| SeparatorResult {
            separator: (0..sub.n() as u32).collect(),
            part_a: Vec::new(),
            part_b: Vec::new(),
        })
    };
    let result = match stage2 {
        Stage2::BfsFm => string_star_separator(
            g,
            NodeSeparatorStrategy { name: "bfs-fm", run: &bfs_fm_separator },
        ),
        Stage2::Brute => {
            string_star_separator(g, NodeSeparatorStrategy { name: "brute", run: &brute })
        }
        Stage2::External(path) => {
            let path = path.clone();
            let call = move |sub: &AbstractGraph| -> SeparatorResult {
                external_separator(&path, sub).unwrap_or_else(|e| {
                    eprintln!("external stage-2 strategy failed: {e}");
                    // An obviously unbalanced sentinel; rejected downstream.
                    SeparatorResult {
                        separator: Vec::new(),
                        part_a: (0..sub.n() as u32).collect(),
                        part_b: Vec::new(),
                    }
                })
            };
            string_star_separator(g, NodeSeparatorStrategy { name: "external", run: &call })
        }
    };
    result.map_err(|e| RunError::Pipeline(format!("{e}")))
}

/// Runs an external node-separator: graph JSON on stdin, a JSON object with
/// `separator`, `A`, `B` arrays on stdout.
fn external_separator(path: &str, g: &AbstractGraph) -> Result<SeparatorResult, String> {
    let input = serde_json::json!({
        "version": crate::formats::FORMAT_VERSION,
        "n": g.n(),
        "edges": g.edges(),
    });
    let mut child = Command::new(path)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .map_err(|e| format!("spawn {path}: {e}"))?;
    child
        .stdin
        .as_mut()
        .unwrap()
        .write_all(input.to_string().as_bytes())
        .map_err(|e| format!("write: {e}"))?;
    let out = child.wait_with_output().map_err(|e| format!("wait: {e}"))?;
    if !out.status.success() {
        return Err(format!("exit status {}", out.status));
    }
    let v: serde_json::Value =
        serde_json::from_slice(&out.stdout).map_err(|e| format!("parse: {e}"))?;
    let arr = |key: &str| -> Result<Vec<u32>, String> {
        serde_json::from_value(v[key].clone()).map_err(|e| format!("{key}: {e}"))
    };
    Ok(SeparatorResult { separator: arr("separator")?, part_a: arr("A")?, part_b: arr("B")? })
}

struct PolygonIntersectionOracle<'a>(&'a [Polygon]);

impl<'a> IntersectionOracle for PolygonIntersectionOracle<'a> {
    fn len(&self) -> usize {
        self.0.len()
    }
    fn intersects(&self, u: usize, v: usize) -> bool {
        polygons_intersect(&self.0[u], &self.0[v])
    }
}

/// Validates a separator against the instance's own intersection oracle.
pub fn validate(inst: &Instance, sep: &StarSeparator) -> StarValidationReport {
    match inst {
        Instance::Segments(seg) => validate_star_separator(&SegmentOracle::new(seg), sep),
        Instance::Polygons(ps) => validate_star_separator(&PolygonIntersectionOracle(ps), sep),
        Instance::Graph(g) => validate_star_separator(g, sep),
    }
}

/// Materializes the instance's intersection graph.
pub fn intersection_graph(inst: &Instance) -> Result<AbstractGraph, RunError> {
    let edges: Vec<(u32, u32)> = match inst {
        Instance::Segments(seg) => intersection_edges(seg)
            .into_iter()
            .map(|(u, v)| (u as u32, v as u32))
            .collect(),
        Instance::Polygons(ps) => {
            let mut out = Vec::new();
            for i in 0..ps.len() {
                for j in (i + 1)..ps.len() {
                    if polygons_intersect(&ps[i], &ps[j]) {
                        out.push((i as u32, j as u32));
                    }
                }
            }
            out
        }
        Instance::Graph(g) => g.edges(),
    };
    AbstractGraph::from_edges(inst.len(), &edges).map_err(|e| RunError::Pipeline(format!("{e}")))
}

/// Builds the distance oracle: geometric separators per recursion level for
/// geometric instances, the string pipeline otherwise.
pub fn oracle_build(inst: &Instance, stage2: &Stage2) -> Result<DistanceOracle, RunError> {
    let graph = intersection_graph(inst)?;
    match inst {
        Instance::Segments(seg) => {
            let sep_fn = |_: &AbstractGraph, global: &[u32]| -> Result<StarSeparator, String> {
                let sub = sub_segments(seg, global);
                if has_overlaps(&sub) {
                    let polys = inflate_segments(&sub);
                    polygon_star_separator(&polys)
                        .map(|o| o.separator)
                        .map_err(|e| format!("{e}"))
                } else {
                    segment_star_separator(&sub).map(|o| o.separator).map_err(|e| format!("{e}"))
                }
            };
            build_oracle(&graph, &sep_fn).map_err(|e| RunError::Pipeline(format!("{e}")))
        }
        Instance::Polygons(ps) => {
            let sep_fn = |_: &AbstractGraph, global: &[u32]| -> Result<StarSeparator, String> {
                let sub: Vec<Polygon> = global
                    .iter()
                    .enumerate()
                    .map(|(i, &g)| {
                        let p = &ps[g as usize];
                        Polygon {
                            id: i,
                            outer: p.outer.clone(),
                            holes: p.holes.clone(),
                            weight: one(),
                        }
                    })
                    .collect();
                polygon_star_separator(&sub).map(|o| o.separator).map_err(|e| format!("{e}"))
            };
            build_oracle(&graph, &sep_fn).map_err(|e| RunError::Pipeline(format!("{e}")))
        }
        Instance::Graph(_) => {
            let stage2 = stage2.clone();
            let sep_fn = move |g: &AbstractGraph, _: &[u32]| -> Result<StarSeparator, String> {
                run_string_pipeline(g, &stage2).map_err(|e| format!("{e}"))
            };
            build_oracle(&graph, &sep_fn).map_err(|e| RunError::Pipeline(format!("{e}")))
        }
    }
}

/// Sub-instance induced by a set of segment ids, renumbered 0..k.
pub fn sub_segments(inst: &ColoredSegmentInstance, global: &[u32]) -> ColoredSegmentInstance {
    let segs: Vec<Segment> = global
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            let s = &inst.segments[g as usize];
            Segment { id: i, p: s.p.clone(), q: s.q.clone(), color: s.color, weight: one() }
        })
        .collect();
    ColoredSegmentInstance::new(segs, inst.colors.clone()).expect("sub-instance is consistent")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formats::{parse_instance, ParseOptions};
    use starsep_core::oracle::verify_oracle;

    #[test]
    fn separate_segments_end_to_end() {
        let bytes = br#"{"version":1,"segments":[
            {"id":0,"p":[0,0],"q":[4,0]},
            {"id":1,"p":[2,-1],"q":[2,1]}
        ]}"#;
        let inst = parse_instance(bytes, &ParseOptions::default()).unwrap();
        let out = separate(&inst, None, false, &Stage2::BfsFm).unwrap();
        assert!(validate(&inst, &out.separator).is_valid());
    }

    #[test]
    fn separate_overlap_requires_perturb() {
        let bytes = br#"{"version":1,"segments":[
            {"id":0,"p":[0,0],"q":[10,0]},
            {"id":1,"p":[5,0],"q":[15,0]},
            {"id":2,"p":[7,-3],"q":[7,3]}
        ]}"#;
        let inst = parse_instance(bytes, &ParseOptions { allow_overlaps: true }).unwrap();
        assert!(matches!(
            separate(&inst, None, false, &Stage2::BfsFm),
            Err(RunError::Input(_))
        ));
        let out = separate(&inst, None, true, &Stage2::BfsFm).unwrap();
        // Validated against the original segment oracle inside separate().
        assert!(validate(&inst, &out.separator).is_valid());
    }

    #[test]
    fn oracle_on_graph_file() {
        let bytes = br#"{"version":1,"n":6,"edges":[[0,1],[1,2],[2,3],[3,4],[4,5]]}"#;
        let inst = parse_instance(bytes, &ParseOptions::default()).unwrap();
        let oracle = oracle_build(&inst, &Stage2::BfsFm).unwrap();
        let Instance::Graph(g) = &inst else { panic!() };
        let stats = verify_oracle(&oracle, g, 0, 1).unwrap();
        assert!(stats.max_error <= 2);
    }

    #[test]
    fn strings_mode_on_segments() {
        let bytes = br#"{"version":1,"segments":[
            {"id":0,"p":[0,0],"q":[4,0]},
            {"id":1,"p":[2,-1],"q":[2,1]},
            {"id":2,"p":[10,0],"q":[14,0]}
        ]}"#;
        let inst = parse_instance(bytes, &ParseOptions::default()).unwrap();
        let out = separate(&inst, Some(Mode::Strings), false, &Stage2::Brute).unwrap();
        assert!(validate(&inst, &out.separator).is_valid());
    }
}
