//! JSON instance and artifact formats.
//!
//! Instance files carry integer coordinates only; exact rationals appear in
//! derived artifacts (fragment dumps, weights) as "num/den" strings. All
//! serialization is deterministic for fixed input.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use starsep_core::coord::{coord_from_str, coord_to_string, crd, frac, one, Coord};
use starsep_core::fragmenter::{FragmentKind, FragmentSet};
use starsep_core::geom::{ColoredSegmentInstance, Direction, Point, Segment};
use starsep_core::oracle::{DistanceOracle, OracleNode, Side, INF};
use starsep_core::polygons::Polygon;
use starsep_core::stars::{Star, StarSeparator};
use starsep_core::strings::AbstractGraph;

pub const FORMAT_VERSION: u64 = 1;
pub const MAX_COLORS: usize = 16;

#[derive(Debug)]
pub enum IoError {
    Schema(String),
    Constraint(String),
    Io(std::io::Error),
}

impl fmt::Display for IoError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IoError::Schema(m) => write!(f, "schema error: {m}"),
            IoError::Constraint(m) => write!(f, "constraint error: {m}"),
            IoError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for IoError {}

impl From<std::io::Error> for IoError {
    fn from(e: std::io::Error) -> Self {
        IoError::Io(e)
    }
}

#[derive(Debug)]
pub enum Instance {
    Segments(ColoredSegmentInstance),
    Polygons(Vec<Polygon>),
    Graph(AbstractGraph),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Segments(_) => "segments",
            Instance::Polygons(_) => "polygons",
            Instance::Graph(_) => "graph",
        }
    }

    pub fn len(&self) -> usize {
        match self {
            Instance::Segments(i) => i.n(),
            Instance::Polygons(p) => p.len(),
            Instance::Graph(g) => g.n(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// Accept same-color overlaps (the caller will route the instance
    /// through the inflation path).
    pub allow_overlaps: bool,
}

// --- on-disk shapes -------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct SegmentsFile {
    version: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    c: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    colors: Option<Vec<(i64, i64)>>,
    segments: Vec<SegmentJson>,
}

#[derive(Serialize, Deserialize)]
struct SegmentJson {
    id: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    color: Option<usize>,
    p: (i64, i64),
    q: (i64, i64),
    #[serde(skip_serializing_if = "Option::is_none")]
    weight: Option<Value>,
}

#[derive(Serialize, Deserialize)]
struct PolygonsFile {
    version: u64,
    polygons: Vec<PolygonJson>,
}

#[derive(Serialize, Deserialize)]
struct PolygonJson {
    id: usize,
    outer: Vec<(i64, i64)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    holes: Vec<Vec<(i64, i64)>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    weight: Option<Value>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    version: u64,
    n: usize,
    edges: Vec<(u32, u32)>,
}

fn weight_from_json(v: &Option<Value>, label: &str) -> Result<Option<Coord>, IoError> {
    match v {
        None => Ok(None),
        Some(Value::Number(n)) => {
            let i = n
                .as_i64()
                .ok_or_else(|| IoError::Schema(format!("{label}: weight must be integer or \"num/den\"")))?;
            Ok(Some(crd(i)))
        }
        Some(Value::String(s)) => coord_from_str(s)
            .map(Some)
            .ok_or_else(|| IoError::Schema(format!("{label}: malformed rational {s:?}"))),
        Some(_) => Err(IoError::Schema(format!("{label}: weight must be integer or \"num/den\""))),
    }
}

fn weight_to_json(w: &Coord) -> Value {
    use num_traits::ToPrimitive;
    if w.denom() == &num_bigint::BigInt::from(1) {
        if let Some(i) = w.numer().to_i64() {
            return Value::from(i);
        }
    }
    Value::from(coord_to_string(w))
}

/// Parses a segments, polygons, or graph file. The kind is inferred from the
/// fields present. Auto-coloring groups segments by direction when colors
/// are omitted.
pub fn parse_instance(bytes: &[u8], opts: &ParseOptions) -> Result<Instance, IoError> {
    let value: Value =
        serde_json::from_slice(bytes).map_err(|e| IoError::Schema(format!("{e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| IoError::Schema("top level must be an object".into()))?;
    let version = obj
        .get("version")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| IoError::Schema("missing integer field `version`".into()))?;
    if version != FORMAT_VERSION {
        return Err(IoError::Constraint(format!("unsupported format version {version}")));
    }
    if obj.contains_key("segments") {
        let file: SegmentsFile =
            serde_json::from_value(value).map_err(|e| IoError::Schema(format!("{e}")))?;
        parse_segments(file, opts)
    } else if obj.contains_key("polygons") {
        let file: PolygonsFile =
            serde_json::from_value(value).map_err(|e| IoError::Schema(format!("{e}")))?;
        parse_polygons(file)
    } else if obj.contains_key("edges") {
        let file: GraphFile =
            serde_json::from_value(value).map_err(|e| IoError::Schema(format!("{e}")))?;
        let g = AbstractGraph::from_edges(file.n, &file.edges)
            .map_err(|e| IoError::Constraint(format!("edges: {e}")))?;
        Ok(Instance::Graph(g))
    } else {
        Err(IoError::Schema("expected one of `segments`, `polygons`, `edges`".into()))
    }
}

fn parse_segments(file: SegmentsFile, opts: &ParseOptions) -> Result<Instance, IoError> {
    let n = file.segments.len();
    let mut colors: Vec<Direction> = Vec::new();
    if let Some(cs) = &file.colors {
        for (i, &(dx, dy)) in cs.iter().enumerate() {
            let d = Direction::new(dx, dy)
                .map_err(|e| IoError::Constraint(format!("colors[{i}]: {e}")))?;
            colors.push(d);
        }
    }

    let mut segments = Vec::with_capacity(n);
    for (i, s) in file.segments.iter().enumerate() {
        if s.id != i {
            return Err(IoError::Constraint(format!(
                "segments[{i}]: ids must be 0..n-1 in order (got {})",
                s.id
            )));
        }
        if s.p == s.q {
            return Err(IoError::Constraint(format!("segments[{i}]: zero-length segment")));
        }
        let p = Point::int(s.p.0, s.p.1);
        let q = Point::int(s.q.0, s.q.1);
        let dir = Direction::of(&p, &q)
            .map_err(|e| IoError::Constraint(format!("segments[{i}]: {e}")))?;
        let color = match s.color {
            Some(c) => {
                if file.colors.is_none() {
                    return Err(IoError::Schema(format!(
                        "segments[{i}]: color given but no `colors` table"
                    )));
                }
                if c >= colors.len() {
                    return Err(IoError::Constraint(format!(
                        "segments[{i}]: color {c} out of range"
                    )));
                }
                if colors[c] != dir {
                    return Err(IoError::Constraint(format!(
                        "segments[{i}]: direction does not match color {c}"
                    )));
                }
                c
            }
            None => {
                // Auto-coloring by direction.
                match colors.iter().position(|d| *d == dir) {
                    Some(c) => c,
                    None => {
                        colors.push(dir);
                        colors.len() - 1
                    }
                }
            }
        };
        let weight = weight_from_json(&s.weight, &format!("segments[{i}]"))?
            .unwrap_or_else(|| frac(1, n.max(1) as i64));
        if weight < starsep_core::coord::zero() {
            return Err(IoError::Constraint(format!("segments[{i}]: negative weight")));
        }
        segments.push(Segment { id: i, p, q, color, weight });
    }
    if let Some(c) = file.c {
        if c != colors.len() {
            return Err(IoError::Constraint(format!(
                "`c` is {c} but {} color classes are present",
                colors.len()
            )));
        }
    }
    if colors.len() > MAX_COLORS {
        return Err(IoError::Constraint(format!(
            "{} orientation classes exceed the maximum of {MAX_COLORS}",
            colors.len()
        )));
    }
    let inst = ColoredSegmentInstance::new(segments, colors)
        .map_err(|e| IoError::Constraint(format!("{e}")))?;
    if !opts.allow_overlaps {
        // Same-color overlap is the degenerate case that needs --perturb.
        for i in 0..inst.n() {
            for j in (i + 1)..inst.n() {
                let (a, b) = (&inst.segments[i], &inst.segments[j]);
                if a.color == b.color && starsep_core::geom::segments_intersect(a, b) {
                    return Err(IoError::Constraint(format!(
                        "segments {i} and {j} share a color and intersect; rerun with --perturb"
                    )));
                }
            }
        }
    }
    Ok(Instance::Segments(inst))
}

fn parse_polygons(file: PolygonsFile) -> Result<Instance, IoError> {
    let mut out = Vec::with_capacity(file.polygons.len());
    let n = file.polygons.len();
    for (i, p) in file.polygons.iter().enumerate() {
        if p.id != i {
            return Err(IoError::Constraint(format!(
                "polygons[{i}]: ids must be 0..n-1 in order"
            )));
        }
        let ring = |r: &Vec<(i64, i64)>| -> Vec<Point> {
            r.iter().map(|&(x, y)| Point::int(x, y)).collect()
        };
        let weight = weight_from_json(&p.weight, &format!("polygons[{i}]"))?
            .unwrap_or_else(|| frac(1, n.max(1) as i64));
        let poly = Polygon {
            id: i,
            outer: ring(&p.outer),
            holes: p.holes.iter().map(ring).collect(),
            weight,
        };
        starsep_core::polygons::validate_polygon(&poly, false)
            .map_err(|e| IoError::Constraint(format!("polygons[{i}]: {e}")))?;
        out.push(poly);
    }
    Ok(Instance::Polygons(out))
}

fn int_of(c: &Coord, label: &str) -> Result<i64, IoError> {
    use num_traits::ToPrimitive;
    if c.denom() != &num_bigint::BigInt::from(1) {
        return Err(IoError::Constraint(format!("{label}: non-integer coordinate")));
    }
    c.numer()
        .to_i64()
        .ok_or_else(|| IoError::Constraint(format!("{label}: coordinate exceeds i64")))
}

/// Serializes an instance back to its canonical JSON bytes.
pub fn serialize_instance(inst: &Instance) -> Result<Vec<u8>, IoError> {
    let value = match inst {
        Instance::Segments(i) => {
            let segments = i
                .segments
                .iter()
                .map(|s| {
                    Ok(SegmentJson {
                        id: s.id,
                        color: Some(s.color),
                        p: (int_of(&s.p.x, "p.x")?, int_of(&s.p.y, "p.y")?),
                        q: (int_of(&s.q.x, "q.x")?, int_of(&s.q.y, "q.y")?),
                        weight: Some(weight_to_json(&s.weight)),
                    })
                })
                .collect::<Result<Vec<_>, IoError>>()?;
            serde_json::to_value(SegmentsFile {
                version: FORMAT_VERSION,
                c: Some(i.c()),
                colors: Some(i.colors.iter().map(|d| (d.dx, d.dy)).collect()),
                segments,
            })
        }
        Instance::Polygons(ps) => {
            let polygons = ps
                .iter()
                .map(|p| {
                    let ring = |r: &[Point]| -> Result<Vec<(i64, i64)>, IoError> {
                        r.iter()
                            .map(|v| Ok((int_of(&v.x, "x")?, int_of(&v.y, "y")?)))
                            .collect()
                    };
                    Ok(PolygonJson {
                        id: p.id,
                        outer: ring(&p.outer)?,
                        holes: p.holes.iter().map(|h| ring(h)).collect::<Result<_, _>>()?,
                        weight: Some(weight_to_json(&p.weight)),
                    })
                })
                .collect::<Result<Vec<_>, IoError>>()?;
            serde_json::to_value(PolygonsFile { version: FORMAT_VERSION, polygons })
        }
        Instance::Graph(g) => serde_json::to_value(GraphFile {
            version: FORMAT_VERSION,
            n: g.n(),
            edges: g.edges(),
        }),
    }
    .map_err(|e| IoError::Schema(format!("{e}")))?;
    let mut bytes = serde_json::to_vec_pretty(&value).map_err(|e| IoError::Schema(format!("{e}")))?;
    bytes.push(b'\n');
    Ok(bytes)
}

// --- separator json -------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct SeparatorFile {
    version: u64,
    stars: Vec<StarJson>,
    #[serde(rename = "A")]
    part_a: Vec<usize>,
    #[serde(rename = "B")]
    part_b: Vec<usize>,
    stats: SeparatorStats,
}

#[derive(Serialize, Deserialize)]
struct StarJson {
    center: usize,
    leaves: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct SeparatorStats {
    n: usize,
    size: usize,
    /// |S| / sqrt(n), rounded to three decimals.
    ratio: f64,
}

pub fn separator_to_json(s: &StarSeparator, n: usize) -> Vec<u8> {
    let sqrt_n = (n as f64).sqrt();
    let ratio = if n == 0 {
        0.0
    } else {
        (s.stars.len() as f64 / sqrt_n * 1000.0).round() / 1000.0
    };
    let file = SeparatorFile {
        version: FORMAT_VERSION,
        stars: s
            .stars
            .iter()
            .map(|st| StarJson { center: st.center, leaves: st.leaves.clone() })
            .collect(),
        part_a: s.part_a.clone(),
        part_b: s.part_b.clone(),
        stats: SeparatorStats { n, size: s.stars.len(), ratio },
    };
    let mut bytes = serde_json::to_vec_pretty(&file).expect("separator serializes");
    bytes.push(b'\n');
    bytes
}

pub fn separator_from_json(bytes: &[u8]) -> Result<StarSeparator, IoError> {
    let file: SeparatorFile =
        serde_json::from_slice(bytes).map_err(|e| IoError::Schema(format!("{e}")))?;
    Ok(StarSeparator {
        stars: file
            .stars
            .into_iter()
            .map(|s| Star { center: s.center, leaves: s.leaves })
            .collect(),
        part_a: file.part_a,
        part_b: file.part_b,
    })
}

// --- fragment dump --------------------------------------------------------

pub fn fragments_to_json(fs: &FragmentSet) -> Vec<u8> {
    #[derive(Serialize)]
    struct FragJson {
        id: usize,
        segment: usize,
        color: usize,
        p: (String, String),
        q: (String, String),
        kind: &'static str,
        status: &'static str,
        #[serde(skip_serializing_if = "Option::is_none")]
        connects: Option<(usize, usize)>,
        #[serde(skip_serializing_if = "Option::is_none")]
        equivalent_active: Option<usize>,
    }
    let frags: Vec<FragJson> = fs
        .fragments
        .iter()
        .map(|f| FragJson {
            id: f.id,
            segment: f.segment_id,
            color: f.color,
            p: (coord_to_string(&f.p.x), coord_to_string(&f.p.y)),
            q: (coord_to_string(&f.q.x), coord_to_string(&f.q.y)),
            kind: match f.kind {
                FragmentKind::End => "end",
                FragmentKind::Internal => "internal",
            },
            status: if f.is_active() { "active" } else { "inactive" },
            connects: f.connects,
            equivalent_active: f.equivalent_active,
        })
        .collect();
    let mut bytes = serde_json::to_vec_pretty(&serde_json::json!({
        "version": FORMAT_VERSION,
        "fragments": frags,
    }))
    .expect("fragments serialize");
    bytes.push(b'\n');
    bytes
}

// --- oracle json ----------------------------------------------------------

fn dist_to_json(d: u32) -> Value {
    if d == INF {
        Value::from("inf")
    } else {
        Value::from(d)
    }
}

fn dist_from_json(v: &Value) -> Result<u32, IoError> {
    match v {
        Value::String(s) if s == "inf" => Ok(INF),
        Value::Number(n) => n
            .as_u64()
            .map(|x| x as u32)
            .ok_or_else(|| IoError::Schema("bad distance".into())),
        _ => Err(IoError::Schema("distance must be a number or \"inf\"".into())),
    }
}

pub fn oracle_to_json(o: &DistanceOracle) -> Vec<u8> {
    fn node_to_json(node: &OracleNode, levels: &mut Vec<Value>, leaves: &mut Vec<Value>) -> Value {
        match node {
            OracleNode::Leaf { nodes, table } => {
                let idx = leaves.len();
                leaves.push(serde_json::json!({
                    "nodes": nodes,
                    "table": table
                        .iter()
                        .map(|row| row.iter().map(|&d| dist_to_json(d)).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                }));
                serde_json::json!({ "leaf": idx })
            }
            OracleNode::Inner { nodes, stars, side, tables, part_a, part_b } => {
                let a = node_to_json(part_a, levels, leaves);
                let b = node_to_json(part_b, levels, leaves);
                let idx = levels.len();
                levels.push(serde_json::json!({
                    "nodes": nodes,
                    "stars": stars
                        .iter()
                        .map(|s| serde_json::json!({ "center": s.center, "leaves": s.leaves }))
                        .collect::<Vec<_>>(),
                    "sides": side
                        .iter()
                        .map(|s| match s {
                            Side::A => Value::from("A"),
                            Side::B => Value::from("B"),
                            Side::Star(k) => Value::from(*k),
                        })
                        .collect::<Vec<_>>(),
                    "tables": tables
                        .iter()
                        .map(|row| row.iter().map(|&d| dist_to_json(d)).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                    "a": a,
                    "b": b,
                }));
                serde_json::json!({ "level": idx })
            }
        }
    }
    let mut levels = Vec::new();
    let mut leaf_tables = Vec::new();
    let root = node_to_json(&o.root, &mut levels, &mut leaf_tables);
    let mut bytes = serde_json::to_vec(&serde_json::json!({
        "version": FORMAT_VERSION,
        "n": o.n,
        "table_entries": o.table_entries,
        "root": root,
        "levels": levels,
        "leaf_tables": leaf_tables,
    }))
    .expect("oracle serializes");
    bytes.push(b'\n');
    bytes
}

pub fn oracle_from_json(bytes: &[u8]) -> Result<DistanceOracle, IoError> {
    let v: Value = serde_json::from_slice(bytes).map_err(|e| IoError::Schema(format!("{e}")))?;
    let n = v["n"].as_u64().ok_or_else(|| IoError::Schema("missing n".into()))? as usize;
    let table_entries = v["table_entries"].as_u64().unwrap_or(0) as usize;
    let levels = v["levels"].as_array().ok_or_else(|| IoError::Schema("missing levels".into()))?;
    let leaves =
        v["leaf_tables"].as_array().ok_or_else(|| IoError::Schema("missing leaf_tables".into()))?;

    fn build(
        spec: &Value,
        levels: &[Value],
        leaves: &[Value],
        depth: usize,
        max_depth: &mut usize,
    ) -> Result<OracleNode, IoError> {
        *max_depth = (*max_depth).max(depth);
        if let Some(idx) = spec.get("leaf").and_then(|v| v.as_u64()) {
            let leaf = &leaves[idx as usize];
            let nodes: Vec<u32> = serde_json::from_value(leaf["nodes"].clone())
                .map_err(|e| IoError::Schema(format!("{e}")))?;
            let table = leaf["table"]
                .as_array()
                .ok_or_else(|| IoError::Schema("leaf table".into()))?
                .iter()
                .map(|row| {
                    row.as_array()
                        .ok_or_else(|| IoError::Schema("leaf row".into()))?
                        .iter()
                        .map(dist_from_json)
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            return Ok(OracleNode::Leaf { nodes, table });
        }
        let idx = spec
            .get("level")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| IoError::Schema("node must be leaf or level".into()))?;
        let lv = &levels[idx as usize];
        let nodes: Vec<u32> = serde_json::from_value(lv["nodes"].clone())
            .map_err(|e| IoError::Schema(format!("{e}")))?;
        let stars = lv["stars"]
            .as_array()
            .ok_or_else(|| IoError::Schema("stars".into()))?
            .iter()
            .map(|s| {
                Ok(Star {
                    center: s["center"]
                        .as_u64()
                        .ok_or_else(|| IoError::Schema("center".into()))?
                        as usize,
                    leaves: serde_json::from_value(s["leaves"].clone())
                        .map_err(|e| IoError::Schema(format!("{e}")))?,
                })
            })
            .collect::<Result<Vec<_>, IoError>>()?;
        let side = lv["sides"]
            .as_array()
            .ok_or_else(|| IoError::Schema("sides".into()))?
            .iter()
            .map(|s| match s {
                Value::String(t) if t == "A" => Ok(Side::A),
                Value::String(t) if t == "B" => Ok(Side::B),
                Value::Number(k) => Ok(Side::Star(k.as_u64().unwrap_or(0) as u32)),
                _ => Err(IoError::Schema("side".into())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        let tables = lv["tables"]
            .as_array()
            .ok_or_else(|| IoError::Schema("tables".into()))?
            .iter()
            .map(|row| {
                row.as_array()
                    .ok_or_else(|| IoError::Schema("table row".into()))?
                    .iter()
                    .map(dist_from_json)
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let a = build(&lv["a"], levels, leaves, depth + 1, max_depth)?;
        let b = build(&lv["b"], levels, leaves, depth + 1, max_depth)?;
        Ok(OracleNode::Inner {
            nodes,
            stars,
            side,
            tables,
            part_a: Box::new(a),
            part_b: Box::new(b),
        })
    }

    let mut depth = 0;
    let root = build(&v["root"], levels, leaves, 0, &mut depth)?;
    Ok(DistanceOracle { n, root, table_entries, depth })
}

// --- helpers shared with the pipeline glue --------------------------------

/// Weights of an instance's objects, in id order.
pub fn instance_weights(inst: &Instance) -> Vec<Coord> {
    match inst {
        Instance::Segments(i) => i.segments.iter().map(|s| s.weight.clone()).collect(),
        Instance::Polygons(ps) => ps.iter().map(|p| p.weight.clone()).collect(),
        Instance::Graph(g) => vec![one(); g.n()],
    }
}

/// Checks a separator's node ids against the instance size.
pub fn check_ids(s: &StarSeparator, n: usize) -> Result<(), IoError> {
    let mut seen = BTreeSet::new();
    for star in &s.stars {
        for &v in std::iter::once(&star.center).chain(star.leaves.iter()) {
            if v >= n {
                return Err(IoError::Constraint(format!("separator id {v} out of range")));
            }
            seen.insert(v);
        }
    }
    for &v in s.part_a.iter().chain(s.part_b.iter()) {
        if v >= n {
            return Err(IoError::Constraint(format!("separator id {v} out of range")));
        }
        seen.insert(v);
    }
    Ok(())
}
