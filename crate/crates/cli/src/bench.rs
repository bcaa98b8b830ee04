//! Benchmark harness: seeded instances, median separator build times, and
//! one CSV row per size. Timings cover the separator construction only;
//! parsing, generation, and serialization stay outside the clock.

use std::time::Instant;

use starsep_core::stars::{segment_star_separator, validate_star_separator, SegmentOracle};

use crate::formats::Instance;
use crate::generate::{generate, GenKind, GeneratorSpec};
use crate::run::{oracle_build, Stage2};

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub kind: GenKind,
    pub sizes: Vec<usize>,
    pub c: usize,
    pub seed: u64,
    pub bbox: i64,
    pub jobs: usize,
    /// Build the distance oracle for the table-entries column (slower).
    pub with_oracle: bool,
}

#[derive(Debug, Clone)]
pub struct BenchRecord {
    pub n: usize,
    pub c: usize,
    pub kind: &'static str,
    pub frag_count: usize,
    pub seph_size: usize,
    pub star_count: usize,
    pub build_ns: u128,
    pub valid: bool,
    pub ratio_milli: u64,
    pub table_entries: usize,
}

pub const CSV_HEADER: &str =
    "n,c,kind,frag_count,seph_size,star_count,build_ns,valid,ratio,table_entries";

pub fn to_csv(records: &[BenchRecord]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}.{:03},{}\n",
            r.n,
            r.c,
            r.kind,
            r.frag_count,
            r.seph_size,
            r.star_count,
            r.build_ns,
            if r.valid { 1 } else { 0 },
            r.ratio_milli / 1000,
            r.ratio_milli % 1000,
            r.table_entries
        ));
    }
    out
}

fn bench_one(cfg: &BenchConfig, n: usize) -> Result<BenchRecord, String> {
    let spec = GeneratorSpec { kind: cfg.kind, n, c: cfg.c, seed: cfg.seed, bbox: cfg.bbox };
    let inst = generate(&spec).map_err(|e| format!("{e}"))?;
    let Instance::Segments(seg) = &inst else {
        return Err("bench supports segment generators".into());
    };

    // Median of five timed builds.
    let mut times = Vec::with_capacity(5);
    let mut last = None;
    for _ in 0..5 {
        let t0 = Instant::now();
        let out = segment_star_separator(seg).map_err(|e| format!("{e}"))?;
        times.push(t0.elapsed().as_nanos());
        last = Some(out);
    }
    times.sort_unstable();
    let out = last.unwrap();

    let report = validate_star_separator(&SegmentOracle::new(seg), &out.separator);
    let table_entries = if cfg.with_oracle {
        oracle_build(&inst, &Stage2::BfsFm).map(|o| o.table_entries).unwrap_or(0)
    } else {
        0
    };
    Ok(BenchRecord {
        n,
        c: cfg.c,
        kind: cfg.kind.name(),
        frag_count: out.fragments.active_count(),
        seph_size: out.fragment_separator.separator.len(),
        star_count: out.separator.size(),
        build_ns: times[times.len() / 2],
        valid: report.is_valid(),
        ratio_milli: report.ratio_milli,
        table_entries,
    })
}

/// Runs every size, optionally across threads; rows come back in input
/// order regardless of completion order.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<BenchRecord>, String> {
    if cfg.jobs <= 1 || cfg.sizes.len() <= 1 {
        return cfg.sizes.iter().map(|&n| bench_one(cfg, n)).collect();
    }
    let mut slots: Vec<Option<Result<BenchRecord, String>>> = Vec::new();
    slots.resize_with(cfg.sizes.len(), || None);
    let next = std::sync::atomic::AtomicUsize::new(0);
    let shared = std::sync::Mutex::new(&mut slots);
    std::thread::scope(|scope| {
        for _ in 0..cfg.jobs.min(cfg.sizes.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, std::sync::atomic::Ordering::SeqCst);
                if i >= cfg.sizes.len() {
                    break;
                }
                let record = bench_one(cfg, cfg.sizes[i]);
                shared.lock().unwrap()[i] = Some(record);
            });
        }
    });
    slots.into_iter().map(|s| s.expect("every slot filled")).collect()
}
