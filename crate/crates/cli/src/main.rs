//! The starsep command line: generate instances, compute and validate
//! star-based separators, build and query distance oracles, run benchmarks,
//! and render SVG debug views.
//!
//! Exit codes: 0 success, 1 validation failure, 2 input error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use starsep_cli::bench::{run_bench, to_csv, BenchConfig};
use starsep_cli::formats::{
    fragments_to_json, oracle_from_json, oracle_to_json, parse_instance, separator_from_json,
    separator_to_json, serialize_instance, Instance, ParseOptions,
};
use starsep_cli::generate::{generate, GenKind, GeneratorSpec};
use starsep_cli::run::{oracle_build, separate, validate, Mode, Stage2};
use starsep_cli::svg::render_svg;

#[derive(Parser)]
#[command(name = "starsep", version, about = "Star-based separators and distance oracles for geometric intersection graphs")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a seeded instance file.
    Generate(GenerateArgs),
    /// Compute a star-based separator for an instance.
    Separate(SeparateArgs),
    /// Validate a separator file against its instance.
    Validate(ValidateArgs),
    /// Build, query, or verify a hop-distance oracle.
    Oracle(OracleArgs),
    /// Run seeded separator benchmarks and emit CSV.
    Bench(BenchArgs),
    /// Render an instance (and optional separator) as SVG.
    Svg(SvgArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// random-cdir | grid | chain | biclique | nested-polygons | random-strings
    #[arg(long)]
    kind: String,
    /// Object count (grid/biclique: the side parameter k).
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    c: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Bounding-box size for randomized kinds.
    #[arg(long, default_value_t = 1_000_000)]
    bbox: i64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SeparateArgs {
    input: PathBuf,
    /// segments | polygons | strings (defaults to the file kind)
    #[arg(long)]
    mode: Option<String>,
    /// Route overlapping segment inputs through inflation.
    #[arg(long)]
    perturb: bool,
    /// Stage-2 node separator for strings: bfs-fm | brute | external:<path>
    #[arg(long, default_value = "bfs-fm")]
    stage2: String,
    #[arg(short, long)]
    output: Option<PathBuf>,
    /// Also render the result as SVG.
    #[arg(long)]
    svg: Option<PathBuf>,
    /// Dump the fragment partition (segment instances only).
    #[arg(long)]
    dump_fragments: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    input: PathBuf,
    separator: PathBuf,
}

#[derive(Args)]
struct OracleArgs {
    #[command(subcommand)]
    op: OracleOp,
}

#[derive(Subcommand)]
enum OracleOp {
    /// Build the oracle for an instance file.
    Build {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, default_value = "bfs-fm")]
        stage2: String,
    },
    /// Report the (almost-exact) hop distance between two nodes.
    Query { oracle: PathBuf, s: usize, t: usize },
    /// Check reported distances against BFS over sampled or all pairs.
    Verify {
        oracle: PathBuf,
        input: PathBuf,
        #[arg(long, default_value_t = 2000)]
        sample: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    kind: String,
    /// Comma-separated instance sizes.
    #[arg(long)]
    sizes: String,
    #[arg(long, default_value_t = 2)]
    c: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 1_000_000)]
    bbox: i64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Skip the oracle build behind the table_entries column.
    #[arg(long)]
    no_oracle: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SvgArgs {
    input: PathBuf,
    #[arg(long)]
    separator: Option<PathBuf>,
    /// Overlay the active fragments (segment instances).
    #[arg(long)]
    fragments: bool,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

enum Failure {
    Input(String),
    Validation(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Input(_) => 2,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Validation(m) => m,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn input_err<E: std::fmt::Display>(e: E) -> Failure {
    Failure::Input(format!("{e}"))
}

fn read(path: &PathBuf) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn write_out(path: &Option<PathBuf>, bytes: &[u8]) -> Result<(), Failure> {
    match path {
        Some(p) => {
            std::fs::write(p, bytes).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))
        }
        None => {
            use std::io::Write;
            std::io::stdout().write_all(bytes).map_err(input_err)
        }
    }
}

/// STARSEP_SEED overrides any --seed flag.
fn effective_seed(flag: u64) -> u64 {
    std::env::var("STARSEP_SEED").ok().and_then(|s| s.parse().ok()).unwrap_or(flag)
}

fn parse_stage2(s: &str) -> Result<Stage2, Failure> {
    Stage2::parse(s).ok_or_else(|| Failure::Input(format!("unknown stage2 strategy {s:?}")))
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Cmd::Generate(args) => {
            let kind = GenKind::parse(&args.kind)
                .ok_or_else(|| Failure::Input(format!("unknown generator kind {:?}", args.kind)))?;
            let spec = GeneratorSpec {
                kind,
                n: args.n,
                c: args.c,
                seed: effective_seed(args.seed),
                bbox: args.bbox,
            };
            let inst = generate(&spec).map_err(input_err)?;
            let bytes = serialize_instance(&inst).map_err(input_err)?;
            write_out(&args.output, &bytes)
        }
        Cmd::Separate(args) => {
            let bytes = read(&args.input)?;
            let inst = parse_instance(&bytes, &ParseOptions { allow_overlaps: args.perturb })
                .map_err(input_err)?;
            let mode = match &args.mode {
                Some(m) => Some(
                    Mode::parse(m).ok_or_else(|| Failure::Input(format!("unknown mode {m:?}")))?,
                ),
                None => None,
            };
            let stage2 = parse_stage2(&args.stage2)?;
            let out = separate(&inst, mode, args.perturb, &stage2).map_err(|e| match e {
                starsep_cli::run::RunError::Validation(v) => Failure::Validation(format!(
                    "separator failed validation: {}",
                    v.join("; ")
                )),
                other => Failure::Input(format!("{other}")),
            })?;
            let json = separator_to_json(&out.separator, inst.len());
            write_out(&args.output, &json)?;
            if let Some(svg_path) = &args.svg {
                let svg = render_svg(&inst, out.fragments.as_ref(), Some(&out.separator));
                std::fs::write(svg_path, svg)
                    .map_err(|e| Failure::Input(format!("{}: {e}", svg_path.display())))?;
            }
            if let Some(frag_path) = &args.dump_fragments {
                match &out.fragments {
                    Some(fs) => std::fs::write(frag_path, fragments_to_json(fs))
                        .map_err(|e| Failure::Input(format!("{}: {e}", frag_path.display())))?,
                    None => {
                        return Err(Failure::Input(
                            "fragment dump is only available for the segment pipeline".into(),
                        ))
                    }
                }
            }
            Ok(())
        }
        Cmd::Validate(args) => {
            let inst = parse_instance(&read(&args.input)?, &ParseOptions { allow_overlaps: true })
                .map_err(input_err)?;
            let sep = separator_from_json(&read(&args.separator)?).map_err(input_err)?;
            starsep_cli::formats::check_ids(&sep, inst.len()).map_err(input_err)?;
            let report = validate(&inst, &sep);
            if report.is_valid() {
                println!(
                    "valid: size {} on {} nodes (ratio {}.{:03})",
                    report.size,
                    report.n,
                    report.ratio_milli / 1000,
                    report.ratio_milli % 1000
                );
                Ok(())
            } else {
                for v in &report.violations {
                    eprintln!("violation: {v}");
                }
                Err(Failure::Validation(format!("{} violation(s)", report.violations.len())))
            }
        }
        Cmd::Oracle(args) => match args.op {
            OracleOp::Build { input, output, stage2 } => {
                let inst = parse_instance(&read(&input)?, &ParseOptions { allow_overlaps: true })
                    .map_err(input_err)?;
                let stage2 = parse_stage2(&stage2)?;
                let oracle = oracle_build(&inst, &stage2).map_err(input_err)?;
                write_out(&output, &oracle_to_json(&oracle))
            }
            OracleOp::Query { oracle, s, t } => {
                let o = oracle_from_json(&read(&oracle)?).map_err(input_err)?;
                match starsep_core::oracle::query(&o, s, t) {
                    Ok(d) if d == starsep_core::oracle::INF => {
                        println!("inf");
                        Ok(())
                    }
                    Ok(d) => {
                        println!("{d}");
                        Ok(())
                    }
                    Err(e) => Err(Failure::Input(format!("{e}"))),
                }
            }
            OracleOp::Verify { oracle, input, sample, seed } => {
                let o = oracle_from_json(&read(&oracle)?).map_err(input_err)?;
                let inst = parse_instance(&read(&input)?, &ParseOptions { allow_overlaps: true })
                    .map_err(input_err)?;
                let graph = starsep_cli::run::intersection_graph(&inst).map_err(input_err)?;
                match starsep_core::oracle::verify_oracle(&o, &graph, sample, effective_seed(seed))
                {
                    Ok(stats) => {
                        println!(
                            "checked {} pairs: errors 0/1/2 = {}/{}/{} (max {})",
                            stats.pairs_checked,
                            stats.histogram[0],
                            stats.histogram[1],
                            stats.histogram[2],
                            stats.max_error
                        );
                        Ok(())
                    }
                    Err(e) => Err(Failure::Validation(format!("{e}"))),
                }
            }
        },
        Cmd::Bench(args) => {
            let kind = GenKind::parse(&args.kind)
                .ok_or_else(|| Failure::Input(format!("unknown generator kind {:?}", args.kind)))?;
            let sizes: Vec<usize> = args
                .sizes
                .split(',')
                .map(|s| s.trim().parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|e| Failure::Input(format!("--sizes: {e}")))?;
            let cfg = BenchConfig {
                kind,
                sizes,
                c: args.c,
                seed: effective_seed(args.seed),
                bbox: args.bbox,
                jobs: args.jobs,
                with_oracle: !args.no_oracle,
            };
            let records = run_bench(&cfg).map_err(Failure::Input)?;
            write_out(&args.output, to_csv(&records).as_bytes())
        }
        Cmd::Svg(args) => {
            let inst = parse_instance(&read(&args.input)?, &ParseOptions { allow_overlaps: true })
                .map_err(input_err)?;
            let sep = match &args.separator {
                Some(p) => Some(separator_from_json(&read(p)?).map_err(input_err)?),
                None => None,
            };
            let fragments = if args.fragments {
                match &inst {
                    Instance::Segments(seg) => {
                        let mut fs = starsep_core::fragmenter::compute_active_fragments(seg)
                            .map_err(input_err)?;
                        let weights: Vec<_> =
                            seg.segments.iter().map(|s| s.weight.clone()).collect();
                        starsep_core::fragmenter::pick_representatives(&mut fs, &weights)
                            .map_err(input_err)?;
                        Some(fs)
                    }
                    _ => None,
                }
            } else {
                None
            };
            let svg = render_svg(&inst, fragments.as_ref(), sep.as_ref());
            write_out(&args.output, svg.as_bytes())
        }
    }
}
