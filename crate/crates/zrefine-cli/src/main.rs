//! `zrefine` command line: z-value codec helpers, region refinement,
//! dataset generation, queries over CSV datasets, and a benchmark harness.
//!
//! Exit codes: 0 success, 1 usage or data error, 2 verification failure
//! (`refine --oracle`, `query --verify`).

mod bench;

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zrefine::{
    approximate, oracle, parse_conditions, refine_jump, refine_scan, ApproxParams, Condition,
    QueryMode, QueryRegion, RefinedRanges, SpaceConfig, TupleStore, ValueDomain,
};

/// Command failure, split by exit code.
pub(crate) enum Failure {
    /// Bad flags, malformed input, unreadable files: exit 1.
    Usage(String),
    /// A self-check (`--oracle`, `--verify`) found a mismatch: exit 2.
    Verify(String),
}

impl From<zrefine::Error> for Failure {
    fn from(err: zrefine::Error) -> Self {
        Failure::Usage(err.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Failure::Usage(err.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(err: csv::Error) -> Self {
        Failure::Usage(err.to_string())
    }
}

#[derive(Parser)]
#[command(name = "zrefine", version, about = "Z-order range refinement toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Interleave grid coordinates into a z-value.
    Encode(EncodeArgs),
    /// Split a z-value back into grid coordinates.
    Decode(DecodeArgs),
    /// Refine a grid region into z-ranges.
    Refine(RefineArgs),
    /// Generate a random CSV dataset.
    Gen(GenArgs),
    /// Run a multi-dimensional range query against a CSV dataset.
    Query(QueryArgs),
    /// Benchmark refinement modes over random regions, emitting CSV.
    Bench(bench::BenchArgs),
}

#[derive(Args)]
struct SpaceArgs {
    /// Number of dimensions.
    #[arg(long)]
    dims: u32,
    /// Bits per dimension.
    #[arg(long, default_value_t = 10)]
    bits: u32,
}

impl SpaceArgs {
    fn config(&self) -> Result<SpaceConfig, Failure> {
        Ok(SpaceConfig::new(self.dims, self.bits)?)
    }
}

#[derive(Args)]
struct EncodeArgs {
    #[command(flatten)]
    space: SpaceArgs,
    /// One grid coordinate per dimension.
    #[arg(required = true)]
    coords: Vec<u128>,
}

#[derive(Args)]
struct DecodeArgs {
    #[command(flatten)]
    space: SpaceArgs,
    /// The z-value to split.
    z: u128,
}

#[derive(Args)]
struct RefineArgs {
    #[command(flatten)]
    space: SpaceArgs,
    /// Per-dimension grid bounds `start..end`, comma separated; `*` spans
    /// the whole dimension.
    #[arg(long)]
    region: String,
    #[arg(long, value_enum, default_value_t = RefineMode::Jump)]
    mode: RefineMode,
    /// Face-estimate total that stops approx-mode widening.
    #[arg(long, default_value_t = 500.0)]
    threshold: f64,
    /// Verify the output against the brute-force reference.
    #[arg(long)]
    oracle: bool,
    /// Append a counters-and-timing row.
    #[arg(long)]
    stats: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum RefineMode {
    /// Walk in-region values one by one, jumping over gaps.
    Scan,
    /// Alternate jump-out/jump-in between run boundaries.
    Jump,
    /// Widen the region first, then jump.
    Approx,
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    space: SpaceArgs,
    /// Smallest representable value.
    #[arg(long, default_value_t = -512, allow_negative_numbers = true)]
    min: i64,
    /// Number of rows.
    #[arg(long)]
    count: u64,
    /// RNG seed; the same seed reproduces the file byte for byte.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct QueryArgs {
    /// Dataset CSV with header `pk,s1,...,sm`.
    #[arg(long)]
    data: PathBuf,
    /// Per-dimension value ranges `lo..hi`, comma separated; `*` spans the
    /// whole domain.
    #[arg(long)]
    region: String,
    #[arg(long, value_enum, default_value_t = QueryModeArg::Exact)]
    mode: QueryModeArg,
    /// Face-estimate total that stops approx-mode widening.
    #[arg(long, default_value_t = 500.0)]
    threshold: f64,
    /// Bits per dimension of the stored domain.
    #[arg(long, default_value_t = 10)]
    bits: u32,
    /// Smallest representable value of the stored domain.
    #[arg(long, default_value_t = -512, allow_negative_numbers = true)]
    min: i64,
    /// Cross-check the result against a full scan.
    #[arg(long)]
    verify: bool,
    /// Print only the stats line.
    #[arg(long)]
    count_only: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum QueryModeArg {
    /// Scan the whole bracketing z-range.
    Raw,
    /// Refine into exact runs first.
    Exact,
    /// Widen the region, then refine.
    Approx,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Encode(args) => cmd_encode(args),
        Command::Decode(args) => cmd_decode(args),
        Command::Refine(args) => cmd_refine(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Query(args) => cmd_query(args),
        Command::Bench(args) => bench::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Verify(msg)) => {
            eprintln!("verification failed: {msg}");
            ExitCode::from(2)
        }
    }
}

fn cmd_encode(args: EncodeArgs) -> Result<(), Failure> {
    let cfg = args.space.config()?;
    let z = cfg.encode(&args.coords)?;
    let width = cfg.z_bits() as usize;
    println!("{z} ({z:0width$b})");
    Ok(())
}

fn cmd_decode(args: DecodeArgs) -> Result<(), Failure> {
    let cfg = args.space.config()?;
    let coords = cfg.decode(args.z)?;
    let parts: Vec<String> = coords.iter().map(ToString::to_string).collect();
    println!("({})", parts.join(","));
    Ok(())
}

/// Maps parsed conditions onto grid bounds, clamped to the grid. `None`
/// when a dimension's range misses the grid entirely.
fn grid_bounds(
    conditions: &[Condition],
    cfg: SpaceConfig,
) -> Result<Option<Vec<(u128, u128)>>, Failure> {
    if conditions.len() != cfg.dims() as usize {
        return Err(Failure::Usage(format!(
            "region has {} dimensions, the space has {}",
            conditions.len(),
            cfg.dims()
        )));
    }
    let max = cfg.max_coord();
    let mut bounds = Vec::with_capacity(conditions.len());
    for condition in conditions {
        let (lo, hi) = match condition {
            None => (0, max),
            Some((a, b)) => {
                if *b < 0 {
                    return Ok(None);
                }
                let lo = if *a < 0 { 0 } else { *a as u128 };
                let hi = (*b as u128).min(max);
                if lo > hi {
                    return Ok(None);
                }
                (lo, hi)
            }
        };
        bounds.push((lo, hi));
    }
    Ok(Some(bounds))
}

fn check_threshold(threshold: f64) -> Result<(), Failure> {
    if threshold.is_finite() && threshold >= 0.0 {
        Ok(())
    } else {
        Err(Failure::Usage(format!("threshold must be finite and non-negative, got {threshold}")))
    }
}

fn cmd_refine(args: RefineArgs) -> Result<(), Failure> {
    let cfg = args.space.config()?;
    check_threshold(args.threshold)?;
    let conditions = parse_conditions(&args.region)?;
    let Some(bounds) = grid_bounds(&conditions, cfg)? else {
        if args.stats {
            println!(
                "subranges=0 jumps_in=0 jumps_out=0 membership_checks=0 in_region_checks=0 refine_us=0"
            );
        }
        return Ok(());
    };
    let region = QueryRegion::new(cfg, bounds)?;

    let start = Instant::now();
    let (target, out): (QueryRegion, RefinedRanges) = match args.mode {
        RefineMode::Scan => {
            let out = refine_scan(region.to_z_range(), &region);
            (region, out)
        }
        RefineMode::Jump => {
            let out = refine_jump(region.to_z_range(), &region);
            (region, out)
        }
        RefineMode::Approx => {
            let widened = approximate(&region, &ApproxParams::with_threshold(args.threshold));
            let out = refine_jump(widened.to_z_range(), &widened);
            (widened, out)
        }
    };
    let refine_us = start.elapsed().as_micros();

    for range in &out.ranges {
        println!("{},{}", range.start, range.end);
    }
    if args.stats {
        let c = out.counters;
        println!(
            "subranges={} jumps_in={} jumps_out={} membership_checks={} in_region_checks={} refine_us={refine_us}",
            out.ranges.len(),
            c.jumps_in,
            c.jumps_out,
            c.membership_checks,
            c.in_region_checks
        );
    }
    if args.oracle {
        let want = oracle::oracle_runs(target.to_z_range(), &target)
            .map_err(|err| Failure::Usage(format!("oracle check unavailable: {err}")))?;
        if want.ranges != out.ranges {
            return Err(Failure::Verify(
                "refined ranges differ from the brute-force reference".into(),
            ));
        }
    }
    Ok(())
}

fn cmd_gen(args: GenArgs) -> Result<(), Failure> {
    let cfg = args.space.config()?;
    let domain = ValueDomain::new(args.min, args.space.bits)?;
    if domain.max_value() > i64::MAX as i128 {
        return Err(Failure::Usage(format!(
            "domain reaches {} which exceeds 64-bit values; lower --bits or --min",
            domain.max_value()
        )));
    }
    let (lo, hi) = (domain.min_value() as i64, domain.max_value() as i64);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut writer = csv::Writer::from_writer(BufWriter::new(File::create(&args.out)?));
    let mut header = vec!["pk".to_string()];
    header.extend((1..=cfg.dims()).map(|d| format!("s{d}")));
    writer.write_record(&header)?;
    let mut record = Vec::with_capacity(header.len());
    for pk in 0..args.count {
        record.clear();
        record.push(pk.to_string());
        record.extend((0..cfg.dims()).map(|_| rng.gen_range(lo..=hi).to_string()));
        writer.write_record(&record)?;
    }
    writer.flush()?;
    Ok(())
}

fn cmd_query(args: QueryArgs) -> Result<(), Failure> {
    check_threshold(args.threshold)?;
    let domain = ValueDomain::new(args.min, args.bits)?;
    let file = File::open(&args.data)
        .map_err(|err| Failure::Usage(format!("{}: {err}", args.data.display())))?;
    let store = TupleStore::load_csv(BufReader::new(file), domain)?;
    let conditions = parse_conditions(&args.region)?;
    let mode = match args.mode {
        QueryModeArg::Raw => QueryMode::Raw,
        QueryModeArg::Exact => QueryMode::Exact,
        QueryModeArg::Approx => QueryMode::Approx(ApproxParams::with_threshold(args.threshold)),
    };
    let (pks, stats) = store.execute_query(&conditions, &mode)?;
    if args.verify {
        let want = store.full_scan(&conditions)?;
        if want != pks {
            return Err(Failure::Verify(format!(
                "query returned {} tuples, the full scan {}",
                pks.len(),
                want.len()
            )));
        }
    }
    if args.count_only {
        println!("matched={} scanned={} subranges={}", stats.matched, stats.scanned, stats.subranges);
    } else {
        for pk in &pks {
            println!("{pk}");
        }
        println!(
            "matched={} scanned={} subranges={} refine_us={} scan_us={}",
            stats.matched, stats.scanned, stats.subranges, stats.refine_us, stats.scan_us
        );
    }
    Ok(())
}
