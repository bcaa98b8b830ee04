//! Deterministic instance generators. The seed fully determines the output
//! bytes, across runs and platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use starsep_core::coord::one;
use starsep_core::geom::{
    fast_point_on_segment, fast_segments_intersect, ColoredSegmentInstance, Direction, Point,
    Segment,
};
use starsep_core::polygons::Polygon;
use starsep_core::strings::AbstractGraph;

use crate::formats::{Instance, IoError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GenKind {
    RandomCdir,
    Grid,
    Chain,
    Biclique,
    NestedPolygons,
    RandomStrings,
}

impl GenKind {
    pub fn parse(s: &str) -> Option<GenKind> {
        Some(match s {
            "random-cdir" => GenKind::RandomCdir,
            "grid" => GenKind::Grid,
            "chain" => GenKind::Chain,
            "biclique" => GenKind::Biclique,
            "nested-polygons" => GenKind::NestedPolygons,
            "random-strings" => GenKind::RandomStrings,
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            GenKind::RandomCdir => "random-cdir",
            GenKind::Grid => "grid",
            GenKind::Chain => "chain",
            GenKind::Biclique => "biclique",
            GenKind::NestedPolygons => "nested-polygons",
            GenKind::RandomStrings => "random-strings",
        }
    }
}

#[derive(Debug, Clone)]
pub struct GeneratorSpec {
    pub kind: GenKind,
    /// Object count; the side parameter k for grid and biclique.
    pub n: usize,
    pub c: usize,
    pub seed: u64,
    /// Bounding-box size for the randomized kinds.
    pub bbox: i64,
}

/// The direction palette used by random-cdir (up to 16 classes).
pub const DIRECTION_PALETTE: [(i64, i64); 16] = [
    (1, 0),
    (0, 1),
    (1, 1),
    (1, -1),
    (2, 1),
    (1, 2),
    (2, -1),
    (1, -2),
    (3, 1),
    (1, 3),
    (3, -1),
    (1, -3),
    (3, 2),
    (2, 3),
    (3, -2),
    (2, -3),
];

pub fn generate(spec: &GeneratorSpec) -> Result<Instance, IoError> {
    if spec.n == 0 {
        return Err(IoError::Constraint("n must be at least 1".into()));
    }
    match spec.kind {
        GenKind::RandomCdir => random_cdir(spec),
        GenKind::Grid => Ok(Instance::Segments(grid(spec.n))),
        GenKind::Chain => Ok(Instance::Segments(chain(spec.n))),
        GenKind::Biclique => Ok(Instance::Segments(biclique(spec.n))),
        GenKind::NestedPolygons => nested_polygons(spec),
        GenKind::RandomStrings => random_strings(spec),
    }
}

fn random_cdir(spec: &GeneratorSpec) -> Result<Instance, IoError> {
    let c = spec.c.max(1);
    if c > DIRECTION_PALETTE.len() {
        return Err(IoError::Constraint(format!(
            "c = {c} exceeds the maximum of {}",
            DIRECTION_PALETTE.len()
        )));
    }
    let colors: Vec<Direction> = DIRECTION_PALETTE[..c]
        .iter()
        .map(|&(dx, dy)| Direction::new(dx, dy).unwrap())
        .collect();
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let bbox = spec.bbox.max(64);
    // Lengths a few times bbox / sqrt(n): constant crossing density with a
    // giant component, so the separator actually has work to do.
    let len_scale = ((8.0 * bbox as f64 / (n as f64).sqrt()) as i64).max(8);

    let mut segs: Vec<Segment> = Vec::with_capacity(n);
    // Spatial hash over raw integer coordinates keeps the rejection checks
    // local and cheap: only segments in overlapping cells are compared, and
    // every check runs on i64s.
    let cell = (len_scale / 4).max(8);
    let mut grid: std::collections::HashMap<(i64, i64), Vec<u32>> = Default::default();
    // Existing crossing points as exact rationals (nx/d, ny/d), hashed by
    // cell: a candidate through one of them would make three segments
    // concurrent, which the sweeps reject as degenerate.
    let mut crossings: std::collections::HashMap<(i64, i64), Vec<[i64; 3]>> = Default::default();
    let mut icoords: Vec<[i64; 4]> = Vec::with_capacity(n);
    let mut icolor: Vec<usize> = Vec::with_capacity(n);
    let mut stamp: Vec<u32> = Vec::new();
    let mut round: u32 = 0;
    let cells_of = |s: &[i64; 4], out: &mut Vec<(i64, i64)>| {
        out.clear();
        let (x0, x1) = (s[0].min(s[2]), s[0].max(s[2]));
        let (y0, y1) = (s[1].min(s[3]), s[1].max(s[3]));
        let mut cx = x0.div_euclid(cell);
        while cx <= x1.div_euclid(cell) {
            let mut cy = y0.div_euclid(cell);
            while cy <= y1.div_euclid(cell) {
                out.push((cx, cy));
                cy += 1;
            }
            cx += 1;
        }
    };
    let mut cells: Vec<(i64, i64)> = Vec::new();
    let mut id = 0;
    let mut attempts = 0usize;
    while id < n {
        attempts += 1;
        if attempts > 400 * n {
            return Err(IoError::Constraint(
                "random-cdir rejection sampling stalled; enlarge the bounding box".into(),
            ));
        }
        let color = id % c; // even class sizes
        let d = colors[color];
        let scale = d.dx.abs().max(d.dy.abs());
        let m = rng.gen_range(1..=(len_scale / scale).max(2));
        let x = rng.gen_range(0..bbox);
        let y = rng.gen_range(0..bbox);
        let cand = [x, y, x + d.dx * m, y + d.dy * m];
        let cb = [cand[0].min(cand[2]), cand[0].max(cand[2]), cand[1].min(cand[3]), cand[1].max(cand[3])];
        cells_of(&cand, &mut cells);
        round += 1;
        stamp.resize(n, 0);
        let mut ok = true;
        let mut touched: Vec<u32> = Vec::new();
        'check: for cpos in &cells {
            if let Some(points) = crossings.get(cpos) {
                for pt in points {
                    if rational_point_on_segment(pt, &cand) {
                        ok = false;
                        break 'check;
                    }
                }
            }
            let Some(bucket) = grid.get(cpos) else { continue };
            for &si in bucket {
                let siu = si as usize;
                if stamp[siu] == round {
                    continue;
                }
                stamp[siu] = round;
                let s = &icoords[siu];
                let sb = [s[0].min(s[2]), s[0].max(s[2]), s[1].min(s[3]), s[1].max(s[3])];
                if cb[0] > sb[1] || sb[0] > cb[1] || cb[2] > sb[3] || sb[2] > cb[3] {
                    continue;
                }
                if icolor[siu] == color && fast_segments_intersect(s, &cand) {
                    ok = false;
                    break 'check;
                }
                if fast_point_on_segment(cand[0], cand[1], s)
                    || fast_point_on_segment(cand[2], cand[3], s)
                    || fast_point_on_segment(s[0], s[1], &cand)
                    || fast_point_on_segment(s[2], s[3], &cand)
                {
                    ok = false;
                    break 'check;
                }
                touched.push(si);
            }
        }
        if !ok {
            continue;
        }
        // Record the new crossings so later candidates avoid them.
        for &si in &touched {
            let siu = si as usize;
            if icolor[siu] != color && fast_segments_intersect(&icoords[siu], &cand) {
                if let Some(pt) = crossing_point(&icoords[siu], &cand) {
                    let key = (
                        pt[0].div_euclid(pt[2] * cell),
                        pt[1].div_euclid(pt[2] * cell),
                    );
                    crossings.entry(key).or_default().push(pt);
                }
            }
        }
        for cpos in &cells {
            grid.entry(*cpos).or_default().push(id as u32);
        }
        icoords.push(cand);
        icolor.push(color);
        segs.push(Segment {
            id,
            p: Point::int(cand[0], cand[1]),
            q: Point::int(cand[2], cand[3]),
            color,
            weight: one(),
        });
        id += 1;
    }
    let inst = ColoredSegmentInstance::new(segs, colors)
        .map_err(|e| IoError::Constraint(format!("{e}")))?;
    Ok(Instance::Segments(inst))
}

/// k horizontal and k vertical spanning segments; K_{k,k}.
fn grid(k: usize) -> ColoredSegmentInstance {
    let k = k as i64;
    let mut segs = Vec::new();
    for i in 1..=k {
        segs.push(Segment {
            id: (i - 1) as usize,
            p: Point::int(0, 10 * i),
            q: Point::int(10 * (k + 1), 10 * i),
            color: 0,
            weight: one(),
        });
    }
    for j in 1..=k {
        segs.push(Segment {
            id: (k + j - 1) as usize,
            p: Point::int(10 * j, 0),
            q: Point::int(10 * j, 10 * (k + 1)),
            color: 1,
            weight: one(),
        });
    }
    ColoredSegmentInstance::new(
        segs,
        vec![Direction::new(1, 0).unwrap(), Direction::new(0, 1).unwrap()],
    )
    .unwrap()
}

/// m segments whose intersection graph is a path: a staircase of
/// alternating horizontals and verticals.
fn chain(m: usize) -> ColoredSegmentInstance {
    let mut segs = Vec::new();
    for i in 0..m {
        let t = (i / 2) as i64;
        if i % 2 == 0 {
            let lo = if t == 0 { 0 } else { 15 * t - 5 };
            segs.push(Segment {
                id: i,
                p: Point::int(lo, 5 * t),
                q: Point::int(15 * t + 20, 5 * t),
                color: 0,
                weight: one(),
            });
        } else {
            segs.push(Segment {
                id: i,
                p: Point::int(15 * (t + 1), 5 * t - 5),
                q: Point::int(15 * (t + 1), 5 * t + 10),
                color: 1,
                weight: one(),
            });
        }
    }
    ColoredSegmentInstance::new(
        segs,
        vec![Direction::new(1, 0).unwrap(), Direction::new(0, 1).unwrap()],
    )
    .unwrap()
}

/// K_{k,k} out of two diagonal families.
fn biclique(k: usize) -> ColoredSegmentInstance {
    let k = k as i64;
    let mut segs = Vec::new();
    for i in 1..=k {
        // Direction (1,1), offset y - x = 10 i, x in [0, 10k].
        segs.push(Segment {
            id: (i - 1) as usize,
            p: Point::int(0, 10 * i),
            q: Point::int(10 * k, 10 * k + 10 * i),
            color: 0,
            weight: one(),
        });
    }
    for j in 1..=k {
        // Direction (1,-1), offset y + x = 10k + 10j, x in [5j-5, 5(k+j)].
        let d = 10 * k + 10 * j;
        let x0 = 5 * j - 5;
        let x1 = 5 * (k + j);
        segs.push(Segment {
            id: (k + j - 1) as usize,
            p: Point::int(x0, d - x0),
            q: Point::int(x1, d - x1),
            color: 1,
            weight: one(),
        });
    }
    ColoredSegmentInstance::new(
        segs,
        vec![Direction::new(1, 1).unwrap(), Direction::new(1, -1).unwrap()],
    )
    .unwrap()
}

/// Clusters of nested diamonds, some with a hole and a grandchild inside the
/// hole; at least three nesting levels once n allows it.
fn nested_polygons(spec: &GeneratorSpec) -> Result<Instance, IoError> {
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut polys: Vec<Polygon> = Vec::with_capacity(n);
    let mut cluster = 0i64;
    let diamond = |id: usize, cx: i64, cy: i64, r: i64| Polygon {
        id,
        outer: vec![
            Point::int(cx - r, cy),
            Point::int(cx, cy - r),
            Point::int(cx + r, cy),
            Point::int(cx, cy + r),
        ],
        holes: Vec::new(),
        weight: one(),
    };
    while polys.len() < n {
        let base_x = 4096 * cluster;
        let base_y = rng.gen_range(-64..64i64) * 2;
        cluster += 1;
        let remaining = n - polys.len();
        // First cluster gets the deep nesting; later ones vary.
        let depth = if polys.is_empty() {
            remaining.min(3).max(1)
        } else {
            rng.gen_range(1..=remaining.min(4))
        };
        let mut r = 1024i64;
        for level in 0..depth {
            let id = polys.len();
            // Odd offsets keep vertex x-coordinates distinct across levels.
            let cx = base_x + (level as i64) * 3 + 1;
            let cy = base_y + (level as i64);
            let mut p = diamond(id, cx, cy, r);
            // Give some polygons a hole; occasionally nest the next level
            // inside that hole instead of the interior proper.
            if r >= 64 && rng.gen_bool(0.4) {
                let hr = r / 8;
                let hx = cx + r / 4 + 1;
                let hy = cy - r / 4;
                p.holes.push(vec![
                    Point::int(hx - hr, hy),
                    Point::int(hx, hy + hr),
                    Point::int(hx + hr, hy),
                    Point::int(hx, hy - hr),
                ]);
            }
            polys.push(p);
            r /= 4;
            if r < 4 {
                break;
            }
        }
    }
    polys.truncate(n);
    for (i, p) in polys.iter_mut().enumerate() {
        p.id = i;
    }
    for p in &polys {
        starsep_core::polygons::validate_polygon(p, false)
            .map_err(|e| IoError::Constraint(format!("generated polygon invalid: {e}")))?;
    }
    Ok(Instance::Polygons(polys))
}

/// Random polylines; the emitted file is their intersection graph.
fn random_strings(spec: &GeneratorSpec) -> Result<Instance, IoError> {
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let bbox = spec.bbox.max(64);
    let step = ((bbox as f64 / (n as f64).sqrt()) as i64).max(8);
    let mut strings: Vec<Vec<Point>> = Vec::with_capacity(n);
    for _ in 0..n {
        let mut x = rng.gen_range(0..bbox);
        let mut y = rng.gen_range(0..bbox);
        let mut pts = vec![Point::int(x, y)];
        let hops = rng.gen_range(2..=4);
        for _ in 0..hops {
            x += rng.gen_range(-step..=step);
            y += rng.gen_range(-step..=step);
            if *pts.last().unwrap() == Point::int(x, y) {
                x += 1;
            }
            pts.push(Point::int(x, y));
        }
        strings.push(pts);
    }
    // Intersection graph by pairwise polyline tests with a bbox prefilter.
    let boxes: Vec<(i64, i64, i64, i64)> = strings
        .iter()
        .map(|pts| {
            let xs: Vec<i64> = pts.iter().map(|p| to_i64(&p.x)).collect();
            let ys: Vec<i64> = pts.iter().map(|p| to_i64(&p.y)).collect();
            (
                *xs.iter().min().unwrap(),
                *xs.iter().max().unwrap(),
                *ys.iter().min().unwrap(),
                *ys.iter().max().unwrap(),
            )
        })
        .collect();
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let (a, b) = (&boxes[i], &boxes[j]);
            if a.0 > b.1 || b.0 > a.1 || a.2 > b.3 || b.2 > a.3 {
                continue;
            }
            if polylines_intersect(&strings[i], &strings[j]) {
                edges.push((i as u32, j as u32));
            }
        }
    }
    let g = AbstractGraph::from_edges(n, &edges)
        .map_err(|e| IoError::Constraint(format!("{e}")))?;
    Ok(Instance::Graph(g))
}

/// Exact crossing point of two non-parallel integer segments as
/// (nx, ny, den) with den > 0; None for parallel supports.
fn crossing_point(a: &[i64; 4], b: &[i64; 4]) -> Option<[i64; 3]> {
    let d1 = (a[2] - a[0], a[3] - a[1]);
    let d2 = (b[2] - b[0], b[3] - b[1]);
    let den = d1.0 * d2.1 - d1.1 * d2.0;
    if den == 0 {
        return None;
    }
    let s_num = (b[0] - a[0]) * d2.1 - (b[1] - a[1]) * d2.0;
    let nx = a[0] * den + s_num * d1.0;
    let ny = a[1] * den + s_num * d1.1;
    let (nx, ny, den) = if den < 0 { (-nx, -ny, -den) } else { (nx, ny, den) };
    let g = gcd3(nx.abs(), ny.abs(), den);
    Some([nx / g, ny / g, den / g])
}

fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    fn gcd(mut a: i64, mut b: i64) -> i64 {
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a.max(1)
    }
    gcd(gcd(a, b), c)
}

/// Does the rational point (nx/d, ny/d) lie on the closed integer segment?
fn rational_point_on_segment(pt: &[i64; 3], s: &[i64; 4]) -> bool {
    let (nx, ny, d) = (pt[0] as i128, pt[1] as i128, pt[2] as i128);
    let (px, py, qx, qy) = (s[0] as i128, s[1] as i128, s[2] as i128, s[3] as i128);
    // Collinearity: (q - p) x (pt - p) = 0, scaled by d.
    if (qx - px) * (ny - py * d) != (qy - py) * (nx - px * d) {
        return false;
    }
    let (lo_x, hi_x) = (px.min(qx) * d, px.max(qx) * d);
    let (lo_y, hi_y) = (py.min(qy) * d, py.max(qy) * d);
    nx >= lo_x && nx <= hi_x && ny >= lo_y && ny <= hi_y
}

fn to_i64(c: &starsep_core::Coord) -> i64 {
    use num_traits::ToPrimitive;
    c.numer().to_i64().unwrap()
}

fn polylines_intersect(a: &[Point], b: &[Point]) -> bool {
    for i in 0..a.len() - 1 {
        for j in 0..b.len() - 1 {
            if starsep_core::geom::points_segments_intersect(&a[i], &a[i + 1], &b[j], &b[j + 1]) {
                return true;
            }
        }
    }
    false
}
