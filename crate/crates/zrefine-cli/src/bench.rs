//! Benchmark harness: generates a dataset per dimension count, samples
//! random regions, runs the selected refinement modes, and writes one CSV
//! row per (mode, repeat) plus a `mean` row per mode and configuration.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zrefine::{
    approximate, refine_jump, refine_scan, ApproxParams, QueryRegion, RefineCounters,
    SpaceConfig, TupleStore, ValueDomain,
};

use crate::Failure;

const HEADER: [&str; 13] = [
    "mode",
    "dims",
    "bits",
    "range_len",
    "threshold",
    "repeat",
    "refine_us",
    "subranges",
    "jumps_in",
    "jumps_out",
    "membership_checks",
    "scanned",
    "matched",
];

#[derive(Args)]
pub struct BenchArgs {
    /// Dimension counts to benchmark, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    dims_list: Vec<u32>,
    /// Bits per dimension.
    #[arg(long, default_value_t = 10)]
    bits: u32,
    /// Smallest representable value.
    #[arg(long, default_value_t = -512, allow_negative_numbers = true)]
    min: i64,
    /// Per-dimension region side lengths, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "selectivity_list")]
    range_len_list: Vec<u128>,
    /// Region selectivities; each becomes the side length
    /// ceil((selectivity * grid cells)^(1/dims)).
    #[arg(long, value_delimiter = ',')]
    selectivity_list: Vec<f64>,
    /// Refinement modes to run; defaults to all of them.
    #[arg(long, value_enum, value_delimiter = ',')]
    modes: Vec<BenchMode>,
    /// Measurements per configuration.
    #[arg(long, default_value_t = 100)]
    repeats: u32,
    /// Tuples in the generated dataset.
    #[arg(long, default_value_t = 100_000)]
    count: u64,
    /// Face-estimate total for approx mode.
    #[arg(long, default_value_t = 500.0)]
    threshold: f64,
    /// RNG seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads for the repeat loop.
    #[arg(long, default_value_t = 1)]
    parallel: u32,
    /// Output CSV path.
    #[arg(long)]
    csv: PathBuf,
}

#[derive(ValueEnum, Clone, Copy, PartialEq, Eq)]
pub enum BenchMode {
    /// Scan the region's bracketing z-range as a single subrange.
    Raw,
    /// Walk in-region values, jumping over gaps.
    Scan,
    /// Alternate jump-out/jump-in between run boundaries.
    Jump,
    /// Widen the region first, then jump within the original bracket.
    Approx,
}

impl BenchMode {
    fn name(self) -> &'static str {
        match self {
            BenchMode::Raw => "raw",
            BenchMode::Scan => "scan",
            BenchMode::Jump => "jump",
            BenchMode::Approx => "approx",
        }
    }
}

struct Row {
    mode: &'static str,
    dims: u32,
    bits: u32,
    range_len: u128,
    threshold: f64,
    repeat: u32,
    refine_us: u64,
    subranges: u64,
    jumps_in: u64,
    jumps_out: u64,
    membership_checks: u64,
    scanned: u64,
    matched: u64,
}

impl Row {
    fn record(&self) -> Vec<String> {
        vec![
            self.mode.to_string(),
            self.dims.to_string(),
            self.bits.to_string(),
            self.range_len.to_string(),
            self.threshold.to_string(),
            self.repeat.to_string(),
            self.refine_us.to_string(),
            self.subranges.to_string(),
            self.jumps_in.to_string(),
            self.jumps_out.to_string(),
            self.membership_checks.to_string(),
            self.scanned.to_string(),
            self.matched.to_string(),
        ]
    }
}

pub fn run(args: BenchArgs) -> Result<(), Failure> {
    crate::check_threshold(args.threshold)?;
    if args.repeats == 0 {
        return Err(Failure::Usage("--repeats must be at least 1".into()));
    }
    if args.parallel == 0 {
        return Err(Failure::Usage("--parallel must be at least 1".into()));
    }
    if args.range_len_list.is_empty() == args.selectivity_list.is_empty() {
        return Err(Failure::Usage(
            "give exactly one of --range-len-list and --selectivity-list".into(),
        ));
    }
    let modes = if args.modes.is_empty() {
        vec![BenchMode::Raw, BenchMode::Scan, BenchMode::Jump, BenchMode::Approx]
    } else {
        args.modes.clone()
    };

    let mut writer = csv::Writer::from_writer(BufWriter::new(File::create(&args.csv)?));
    writer.write_record(HEADER)?;

    for &dims in &args.dims_list {
        let cfg = SpaceConfig::new(dims, args.bits)?;
        let domain = ValueDomain::new(args.min, args.bits)?;
        if domain.max_value() > i64::MAX as i128 {
            return Err(Failure::Usage(format!(
                "domain reaches {} which exceeds 64-bit values; lower --bits or --min",
                domain.max_value()
            )));
        }
        // One dataset and one region stream per dimension count, both
        // derived from --seed alone.
        let mut rng = ChaCha8Rng::seed_from_u64(args.seed.wrapping_add(dims as u64));
        let store = random_store(&mut rng, cfg, domain, args.count);
        for len in side_lengths(&args, cfg)? {
            let regions: Vec<QueryRegion> =
                (0..args.repeats).map(|_| sample_region(&mut rng, cfg, len)).collect();
            let rows = measure(&store, &regions, &modes, &args, len);
            for row in &rows {
                writer.write_record(row.record())?;
            }
            for mode in &modes {
                writer.write_record(mean_record(&rows, mode.name()))?;
            }
        }
    }
    writer.flush()?;
    Ok(())
}

fn random_store(
    rng: &mut ChaCha8Rng,
    cfg: SpaceConfig,
    domain: ValueDomain,
    count: u64,
) -> TupleStore {
    let (lo, hi) = (domain.min_value() as i64, domain.max_value() as i64);
    let rows = (0..count)
        .map(|pk| (pk, (0..cfg.dims()).map(|_| rng.gen_range(lo..=hi)).collect::<Vec<i64>>()));
    let rows: Vec<(u64, Vec<i64>)> = rows.collect();
    TupleStore::build(rows, cfg, domain).expect("generated rows lie inside the domain")
}

fn side_lengths(args: &BenchArgs, cfg: SpaceConfig) -> Result<Vec<u128>, Failure> {
    let grid = cfg.max_coord();
    if !args.range_len_list.is_empty() {
        for &len in &args.range_len_list {
            if len == 0 || len - 1 > grid {
                return Err(Failure::Usage(format!(
                    "range length {len} does not fit a {}-bit dimension",
                    cfg.bits()
                )));
            }
        }
        return Ok(args.range_len_list.clone());
    }
    args.selectivity_list
        .iter()
        .map(|&sel| {
            if !(sel > 0.0 && sel <= 1.0) {
                return Err(Failure::Usage(format!(
                    "selectivity must be in (0, 1], got {sel}"
                )));
            }
            let cells = 2f64.powi((cfg.dims() * cfg.bits()) as i32);
            let len = (sel * cells).powf(1.0 / cfg.dims() as f64).ceil().max(1.0);
            if len - 1.0 > grid as f64 {
                Ok(grid.saturating_add(1).max(1))
            } else {
                Ok(len as u128)
            }
        })
        .collect()
}

fn sample_region(rng: &mut ChaCha8Rng, cfg: SpaceConfig, len: u128) -> QueryRegion {
    let bounds: Vec<(u128, u128)> = (0..cfg.dims())
        .map(|_| {
            let start = rng.gen_range(0..=(cfg.max_coord() - (len - 1)));
            (start, start + len - 1)
        })
        .collect();
    QueryRegion::new(cfg, bounds).expect("sampled bounds lie on the grid")
}

fn measure(
    store: &TupleStore,
    regions: &[QueryRegion],
    modes: &[BenchMode],
    args: &BenchArgs,
    len: u128,
) -> Vec<Row> {
    let one_repeat = |repeat: usize| -> Vec<Row> {
        modes
            .iter()
            .map(|&mode| run_one(store, &regions[repeat], mode, args, len, repeat as u32))
            .collect()
    };
    if args.parallel <= 1 {
        return (0..regions.len()).flat_map(one_repeat).collect();
    }
    let workers = args.parallel as usize;
    let chunk = regions.len().div_ceil(workers);
    let mut indexed: Vec<(usize, Vec<Row>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let lo = (w * chunk).min(regions.len());
                let hi = ((w + 1) * chunk).min(regions.len());
                scope.spawn(move || {
                    (lo..hi).map(|repeat| (repeat, one_repeat(repeat))).collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("bench worker panicked")).collect()
    });
    // Counters are deterministic per repeat, so only timings depend on the
    // thread count; rows come back in repeat order either way.
    indexed.sort_by_key(|(repeat, _)| *repeat);
    indexed.into_iter().flat_map(|(_, rows)| rows).collect()
}

fn run_one(
    store: &TupleStore,
    region: &QueryRegion,
    mode: BenchMode,
    args: &BenchArgs,
    len: u128,
    repeat: u32,
) -> Row {
    let bracket = region.to_z_range();
    let started = Instant::now();
    let (ranges, counters) = match mode {
        BenchMode::Raw => (vec![bracket], RefineCounters::default()),
        BenchMode::Scan => {
            let out = refine_scan(bracket, region);
            (out.ranges, out.counters)
        }
        BenchMode::Jump => {
            let out = refine_jump(bracket, region);
            (out.ranges, out.counters)
        }
        BenchMode::Approx => {
            // Same shape as the store's approx pipeline: the widened region
            // drives the jumps, the original bracket clips them.
            let widened = approximate(region, &ApproxParams::with_threshold(args.threshold));
            let out = refine_jump(bracket, &widened);
            (out.ranges, out.counters)
        }
    };
    let refine_us = started.elapsed().as_micros() as u64;
    let (pks, scanned) = store.scan_ranges(region, &ranges);
    Row {
        mode: mode.name(),
        dims: store.config().dims(),
        bits: store.config().bits(),
        range_len: len,
        threshold: args.threshold,
        repeat,
        refine_us,
        subranges: ranges.len() as u64,
        jumps_in: counters.jumps_in,
        jumps_out: counters.jumps_out,
        membership_checks: counters.in_region_checks,
        scanned,
        matched: pks.len() as u64,
    }
}

fn mean_record(rows: &[Row], mode: &str) -> Vec<String> {
    let picked: Vec<&Row> = rows.iter().filter(|row| row.mode == mode).collect();
    let n = picked.len() as f64;
    let mean = |field: fn(&Row) -> u64| picked.iter().map(|row| field(row) as f64).sum::<f64>() / n;
    let first = picked.first().expect("every mode has rows");
    vec![
        mode.to_string(),
        first.dims.to_string(),
        first.bits.to_string(),
        first.range_len.to_string(),
        first.threshold.to_string(),
        "mean".to_string(),
        mean(|r| r.refine_us).to_string(),
        mean(|r| r.subranges).to_string(),
        mean(|r| r.jumps_in).to_string(),
        mean(|r| r.jumps_out).to_string(),
        mean(|r| r.membership_checks).to_string(),
        mean(|r| r.scanned).to_string(),
        mean(|r| r.matched).to_string(),
    ]
}
