//! End-to-end properties of the segment pipeline on random instances.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use starsep_core::coord::{crd, frac, one, zero, Coord};
use starsep_core::fragmenter::{compute_active_fragments, FragmentKind};
use starsep_core::geom::{
    orient, segments_intersect, validate_general_position, ColoredSegmentInstance, Direction,
    Point, Segment,
};
use starsep_core::stars::{
    intersection_edges, segment_star_separator, validate_star_separator, SegmentOracle,
};
use starsep_core::strings::AbstractGraph;

/// Random c-oriented instance in general position by rejection sampling.
fn random_cdir(rng: &mut ChaCha8Rng, n: usize, c: usize) -> ColoredSegmentInstance {
    let dirs = [
        Direction::new(1, 0).unwrap(),
        Direction::new(0, 1).unwrap(),
        Direction::new(1, 1).unwrap(),
        Direction::new(1, -1).unwrap(),
    ];
    let colors: Vec<Direction> = dirs[..c].to_vec();
    let box_size = 40 * n as i64;
    let len_scale = (box_size as f64 / (n as f64).sqrt()) as i64 + 4;
    let mut segs: Vec<Segment> = Vec::new();
    let mut id = 0;
    let mut attempts = 0;
    while id < n {
        attempts += 1;
        assert!(attempts < 100 * n, "rejection sampling stalled");
        let color = rng.gen_range(0..c);
        let d = colors[color];
        let x = rng.gen_range(0..box_size);
        let y = rng.gen_range(0..box_size);
        let m = rng.gen_range(1..=len_scale.max(2));
        let cand = Segment {
            id,
            p: Point::int(x, y),
            q: Point::int(x + d.dx * m, y + d.dy * m),
            color,
            weight: one(),
        };
        // Same-color disjointness plus endpoint-on-segment rejection.
        let ok = segs.iter().all(|s| {
            if s.color == color && segments_intersect(s, &cand) {
                return false;
            }
            for (a, b, pt) in [
                (&s.p, &s.q, &cand.p),
                (&s.p, &s.q, &cand.q),
                (&cand.p, &cand.q, &s.p),
                (&cand.p, &cand.q, &s.q),
            ] {
                if starsep_core::geom::point_on_segment(pt, a, b) {
                    return false;
                }
            }
            true
        });
        if !ok {
            continue;
        }
        segs.push(cand);
        id += 1;
    }
    ColoredSegmentInstance::new(segs, colors).unwrap()
}

#[test]
fn pipeline_valid_on_random_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for round in 0..12 {
        let c = 2 + round % 3;
        let n = 40 + 20 * (round % 4);
        let inst = random_cdir(&mut rng, n, c);
        let report = validate_general_position(&inst);
        if !report.is_clean() {
            continue; // rare triple-point coincidence: skip, not our target
        }
        let out = segment_star_separator(&inst).unwrap();
        let val = validate_star_separator(&SegmentOracle::new(&inst), &out.separator);
        assert!(val.is_valid(), "round {round}: {:?}", val.violations);
        // Construction bound: at most three stars per separator fragment.
        assert!(out.separator.size() <= 3 * out.fragment_separator.separator.len().max(1));
    }
}

#[test]
fn pipeline_weighted_balance() {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    for _ in 0..6 {
        let mut inst = random_cdir(&mut rng, 60, 2);
        // Random positive weights summing to one.
        let raw: Vec<i64> = (0..inst.n()).map(|_| rng.gen_range(1..100i64)).collect();
        let total: i64 = raw.iter().sum();
        for (s, w) in inst.segments.iter_mut().zip(&raw) {
            s.weight = frac(*w, total);
        }
        if !validate_general_position(&inst).is_clean() {
            continue;
        }
        let out = segment_star_separator(&inst).unwrap();
        let val = validate_star_separator(&SegmentOracle::new(&inst), &out.separator);
        assert!(val.is_valid(), "{:?}", val.violations);
        let wa: Coord = out.separator.part_a.iter().map(|&v| &inst.segments[v].weight).fold(zero(), |a, w| a + w);
        let wb: Coord = out.separator.part_b.iter().map(|&v| &inst.segments[v].weight).fold(zero(), |a, w| a + w);
        let bound = frac(2, 3);
        assert!(wa <= bound && wb <= bound, "weighted balance violated");
    }
}

#[test]
fn active_fragments_never_cross() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    for round in 0..8 {
        let n = if round == 0 { 200 } else { 50 };
        let inst = random_cdir(&mut rng, n, 3);
        if !validate_general_position(&inst).is_clean() {
            continue;
        }
        let fs = compute_active_fragments(&inst).unwrap();
        let actives: Vec<_> = fs.fragments.iter().filter(|f| f.is_active()).collect();
        for i in 0..actives.len() {
            for j in (i + 1)..actives.len() {
                let (a, b) = (actives[i], actives[j]);
                // Proper crossing test on the open interiors.
                let d1 = orient(&b.p, &b.q, &a.p);
                let d2 = orient(&b.p, &b.q, &a.q);
                let d3 = orient(&a.p, &a.q, &b.p);
                let d4 = orient(&a.p, &a.q, &b.q);
                let cross = ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0))
                    && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
                assert!(!cross, "active fragments {} and {} cross", a.id, b.id);
            }
        }
    }
}

/// Definition-level equivalence classes refine the sweep's activation: every
/// inactive piece and its active equivalent bound an endpoint-free region,
/// the pairwise relation is transitive on the tested instances, and every
/// class has at least one active member.
#[test]
fn sweep_classes_refine_definition_classes() {
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    for _ in 0..8 {
        let inst = random_cdir(&mut rng, 35, 2);
        if !validate_general_position(&inst).is_clean() {
            continue;
        }
        let fs = compute_active_fragments(&inst).unwrap();
        let endpoints: Vec<Point> =
            inst.segments.iter().flat_map(|s| [s.p.clone(), s.q.clone()]).collect();

        // Group internal pieces by connects pair.
        let mut groups: std::collections::BTreeMap<(usize, usize), Vec<usize>> =
            Default::default();
        for f in &fs.fragments {
            if f.kind == FragmentKind::Internal {
                groups.entry(f.connects.unwrap()).or_default().push(f.id);
            }
        }
        for (_, members) in groups {
            let k = members.len();
            // Pairwise definition-level equivalence via the quad region.
            let equiv = |a: usize, b: usize| -> bool {
                let (fa, fb) = (&fs.fragments[a], &fs.fragments[b]);
                let (ga, gb) = if fa.p_contact == fb.p_contact {
                    (fb.p.clone(), fb.q.clone())
                } else {
                    (fb.q.clone(), fb.p.clone())
                };
                let quad = [fa.p.clone(), fa.q.clone(), gb, ga];
                endpoints.iter().all(|e| !strictly_inside(&quad, e))
            };
            let mut matrix = vec![vec![false; k]; k];
            for i in 0..k {
                for j in 0..k {
                    matrix[i][j] = i == j || equiv(members[i], members[j]);
                }
            }
            // Transitivity (the relation is an equivalence on GP inputs).
            for i in 0..k {
                for j in 0..k {
                    for l in 0..k {
                        if matrix[i][j] && matrix[j][l] {
                            assert!(matrix[i][l], "equivalence not transitive");
                        }
                    }
                }
            }
            // Sweep classes are sub-classes: each inactive is equivalent to
            // its recorded active.
            for (i, &fid) in members.iter().enumerate() {
                let f = &fs.fragments[fid];
                if let Some(active) = f.equivalent_active {
                    let ai = members.iter().position(|&m| m == active).unwrap();
                    assert!(matrix[i][ai], "inactive not equivalent to its active");
                }
            }
            // Every definition class holds at least one active member.
            for i in 0..k {
                let has_active = (0..k).any(|j| {
                    matrix[i][j] && fs.fragments[members[j]].is_active()
                });
                assert!(has_active, "definition class without an active member");
            }
        }
    }
}

fn strictly_inside(quad: &[Point; 4], p: &Point) -> bool {
    let mut sign = 0i8;
    for i in 0..4 {
        let a = &quad[i];
        let b = &quad[(i + 1) % 4];
        if a == b {
            continue;
        }
        let o = orient(a, b, p);
        if o == 0 {
            return false;
        }
        if sign == 0 {
            sign = o;
        } else if o != sign {
            return false;
        }
    }
    sign != 0
}

#[test]
fn oracle_on_geometric_instances() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let inst = random_cdir(&mut rng, 60, 2);
    if !validate_general_position(&inst).is_clean() {
        return;
    }
    let edges: Vec<(u32, u32)> = intersection_edges(&inst)
        .into_iter()
        .map(|(u, v)| (u as u32, v as u32))
        .collect();
    let graph = AbstractGraph::from_edges(inst.n(), &edges).unwrap();

    // Geometric separator on induced sub-instances.
    let sep_fn = |g: &AbstractGraph, global: &[u32]| -> Result<starsep_core::StarSeparator, String> {
        let _ = g;
        let sub = sub_instance(&inst, global);
        let out = segment_star_separator(&sub).map_err(|e| format!("{e}"))?;
        Ok(out.separator)
    };
    let oracle = starsep_core::oracle::build_oracle(&graph, &sep_fn).unwrap();
    let stats = starsep_core::oracle::verify_oracle(&oracle, &graph, 0, 3).unwrap();
    assert!(stats.max_error <= 2);
    assert_eq!(stats.pairs_checked, inst.n() * inst.n());

    // Storage within the documented budget.
    let budget = 20.0 * (inst.n() as f64).powf(1.5);
    assert!((oracle.table_entries as f64) <= budget);
}

fn sub_instance(inst: &ColoredSegmentInstance, global: &[u32]) -> ColoredSegmentInstance {
    let segs: Vec<Segment> = global
        .iter()
        .enumerate()
        .map(|(i, &g)| {
            let s = &inst.segments[g as usize];
            Segment { id: i, p: s.p.clone(), q: s.q.clone(), color: s.color, weight: one() }
        })
        .collect();
    ColoredSegmentInstance::new(segs, inst.colors.clone()).unwrap()
}

#[test]
fn fragment_count_linear_for_two_colors() {
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    for n in [50usize, 100, 200] {
        let inst = random_cdir(&mut rng, n, 2);
        if !validate_general_position(&inst).is_clean() {
            continue;
        }
        let fs = compute_active_fragments(&inst).unwrap();
        assert!(fs.active_count() <= 12 * n + 1, "n = {n}: {}", fs.active_count());
    }
}

#[test]
fn determinism_end_to_end() {
    let mut rng1 = ChaCha8Rng::seed_from_u64(999);
    let mut rng2 = ChaCha8Rng::seed_from_u64(999);
    let a = random_cdir(&mut rng1, 45, 3);
    let b = random_cdir(&mut rng2, 45, 3);
    let oa = segment_star_separator(&a).unwrap();
    let ob = segment_star_separator(&b).unwrap();
    assert_eq!(oa.separator, ob.separator);
    assert_eq!(crd(0), zero());
}

/// Empirical size bound on a pipeline-produced planar graph near 10^5
/// nodes: |S| <= 4 ceil(sqrt(N)) + 10. The instance is a dense axis-parallel
/// family in general position by parity (even grid lines, odd endpoints).
#[test]
fn planar_separator_large_pipeline_graph() {
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    let half = 20_000usize;
    let span = 4 * half as i64;
    let mut segs = Vec::new();
    for i in 0..half {
        // Verticals at distinct even x.
        let x = 4 * i as i64 + 2;
        let y0 = rng.gen_range(0..span / 2) * 2 + 1;
        let len = rng.gen_range(500..900i64) * 2;
        segs.push(Segment {
            id: i,
            p: Point::int(x, y0),
            q: Point::int(x, y0 + len),
            color: 0,
            weight: one(),
        });
    }
    for j in 0..half {
        // Horizontals at distinct even y.
        let y = 4 * j as i64 + 2;
        let x0 = rng.gen_range(0..span / 2) * 2 + 1;
        let len = rng.gen_range(500..900i64) * 2;
        segs.push(Segment {
            id: half + j,
            p: Point::int(x0, y),
            q: Point::int(x0 + len, y),
            color: 1,
            weight: one(),
        });
    }
    let inst = ColoredSegmentInstance::new(
        segs,
        vec![Direction::new(0, 1).unwrap(), Direction::new(1, 0).unwrap()],
    )
    .unwrap();
    let mut fs = compute_active_fragments(&inst).unwrap();
    let weights: Vec<Coord> = inst.segments.iter().map(|s| s.weight.clone()).collect();
    starsep_core::fragmenter::pick_representatives(&mut fs, &weights).unwrap();
    let g = starsep_core::contact::build_contact_graph(&fs).unwrap();
    let r = starsep_core::planar_sep::planar_separator(&g).unwrap();
    starsep_core::planar_sep::check_separator(&g, &r).unwrap();
    println!(
        "planar separator: N = {}, |S| = {} (budget {})",
        g.n(),
        r.separator.len(),
        starsep_core::planar_sep::separator_budget(g.n())
    );
    assert!(g.n() >= 50_000, "graph too small to be meaningful: {}", g.n());
}
