//! Subcommand surface: decode, sample, bench, verify, gen. Exit codes are
//! part of the contract: 0 success, 1 usage, 2 unreadable or unsuitable
//! input, 3 failed accuracy gate.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{ArgAction, Args, Parser, Subcommand};
use thiserror::Error;

use qmle_core::search::{DEFAULT_HASH_SEED, DEFAULT_PQ_LIMIT};
use qmle_core::{
    build_context, cross_check, decode, parse_dem_verbose, read_shots, sample_shots,
    serialize_dem, write_bit_rows, write_predictions, DecodeResult, DecodeStatus, DecoderConfig,
    DetectorErrorModel, OptLevel, SearchStats,
};

use crate::cputime::{thread_cpu_seconds, timer_resolution_seconds};
use crate::report::{BenchConfigEcho, BenchReport, BenchRow};
use crate::synth::{chain_model, grid_model};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Accuracy(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Accuracy(_) => 3,
        }
    }
}

/// Beam width argument: a number, or `inf` to disable beam pruning.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BeamArg(pub Option<u32>);

impl FromStr for BeamArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("inf") {
            return Ok(BeamArg(None));
        }
        s.parse::<u32>()
            .map(|v| BeamArg(Some(v)))
            .map_err(|_| format!("expected a beam width or `inf`, got `{s}`"))
    }
}

impl fmt::Display for BeamArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(v) => write!(f, "{v}"),
            None => f.write_str("inf"),
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct ConfigFlags {
    /// Discard states whose fired-detector count exceeds the best seen plus
    /// this; `inf` disables the beam.
    #[arg(long, default_value = "inf")]
    pub beam: BeamArg,
    /// Abort a decode when the priority queue reaches this size.
    #[arg(long, default_value_t = DEFAULT_PQ_LIMIT)]
    pub pq_limit: usize,
    /// Extra cost per fired detector in the heuristic; nonzero trades
    /// optimality for speed.
    #[arg(long, default_value_t = 0.0)]
    pub det_penalty: f64,
    /// Skip fired patterns that were already expanded.
    #[arg(long, default_value_t = true, action = ArgAction::Set, num_args = 0..=1,
          default_missing_value = "true")]
    pub no_revisit: bool,
    /// Skip candidates stacking a third error onto one fired detector.
    #[arg(long, default_value_t = false, action = ArgAction::Set, num_args = 0..=1,
          default_missing_value = "true")]
    pub at_most_two: bool,
    /// Seed for the L4 pattern hash; results must not depend on it.
    #[arg(long, default_value_t = DEFAULT_HASH_SEED)]
    pub hash_seed: u64,
}

impl ConfigFlags {
    pub fn to_config(&self, level: OptLevel) -> DecoderConfig {
        DecoderConfig {
            beam_cutoff: self.beam.0,
            pq_limit: self.pq_limit,
            det_penalty: self.det_penalty,
            no_revisit: self.no_revisit,
            at_most_two: self.at_most_two,
            opt_level: level,
            hash_seed: self.hash_seed,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "qmle", version, about = "Most-likely-error decoder for quantum LDPC codes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Decode syndromes against a model and print observable predictions.
    Decode(DecodeArgs),
    /// Sample syndromes from a model and print them as 01 rows.
    Sample(SampleArgs),
    /// Time the optimization levels on one shot stream.
    Bench(BenchArgs),
    /// Cross-check decode results against the exhaustive reference decoder.
    Verify(VerifyArgs),
    /// Write a synthetic chain or grid model.
    Gen(GenArgs),
}

#[derive(Args, Debug)]
pub struct DecodeArgs {
    /// Detector error model file.
    #[arg(long)]
    pub model: PathBuf,
    /// File of 01 syndrome rows, one shot per line.
    #[arg(long, required_unless_present = "sample", conflicts_with = "sample")]
    pub shots: Option<PathBuf>,
    /// Sample this many shots from the model instead of reading a file.
    #[arg(long, requires = "seed")]
    pub sample: Option<usize>,
    /// PRNG seed for --sample.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Optimization level to decode with.
    #[arg(long, default_value = "L4")]
    pub level: OptLevel,
    #[command(flatten)]
    pub config: ConfigFlags,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    /// Detector error model file.
    #[arg(long)]
    pub model: PathBuf,
    /// Number of shots to sample.
    #[arg(long)]
    pub count: usize,
    /// PRNG seed.
    #[arg(long)]
    pub seed: u64,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    /// Detector error model file.
    #[arg(long)]
    pub model: PathBuf,
    /// Number of shots to sample and decode at every level.
    #[arg(long)]
    pub shots: usize,
    /// PRNG seed for the shot stream.
    #[arg(long)]
    pub seed: u64,
    /// Comma-separated levels to compare; the first is the speedup baseline.
    #[arg(long, value_delimiter = ',', default_value = "L0,L1,L2,L3,L4")]
    pub levels: Vec<OptLevel>,
    /// Timed passes per level; the minimum is reported.
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    #[command(flatten)]
    pub config: ConfigFlags,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Detector error model file (at most 25 error mechanisms).
    #[arg(long)]
    pub model: PathBuf,
    /// Number of shots to sample and cross-check.
    #[arg(long)]
    pub shots: usize,
    /// PRNG seed for the shot stream.
    #[arg(long)]
    pub seed: u64,
    /// Optimization level to decode with.
    #[arg(long, default_value = "L4")]
    pub level: OptLevel,
    #[command(flatten)]
    pub config: ConfigFlags,
}

#[derive(Clone, Copy, Debug, clap::ValueEnum)]
pub enum GenKind {
    Chain,
    Grid,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[arg(long, value_enum)]
    pub kind: GenKind,
    /// Chain length in detectors.
    #[arg(long, required_if_eq("kind", "chain"))]
    pub n: Option<usize>,
    /// Grid width in detectors.
    #[arg(long, required_if_eq("kind", "grid"))]
    pub width: Option<usize>,
    /// Grid height in detectors.
    #[arg(long, required_if_eq("kind", "grid"))]
    pub height: Option<usize>,
    /// Base error probability before per-mechanism jitter.
    #[arg(long)]
    pub p: f64,
    /// Jitter seed.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Decode(args) => cmd_decode(&args),
        Command::Sample(args) => cmd_sample(&args),
        Command::Bench(args) => cmd_bench(&args),
        Command::Verify(args) => cmd_verify(&args),
        Command::Gen(args) => cmd_gen(&args),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

fn load_model(path: &Path) -> Result<DetectorErrorModel, CliError> {
    let text = read_file(path)?;
    let (model, warnings) = parse_dem_verbose(&text)
        .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    for w in warnings {
        eprintln!("{}: {w}", path.display());
    }
    Ok(model)
}

pub fn cmd_decode(args: &DecodeArgs) -> Result<(), CliError> {
    let model = load_model(&args.model)?;
    let num_detectors = model.num_detectors;
    let ctx = build_context(model);
    let shots = match (&args.shots, args.sample) {
        (Some(path), None) => read_shots(&read_file(path)?, num_detectors)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
        (None, Some(count)) => sample_shots(&ctx.model, count, args.seed.unwrap()),
        _ => unreachable!("clap enforces exactly one shot source"),
    };
    let config = args.config.to_config(args.level);

    let mut results: Vec<DecodeResult> = Vec::with_capacity(shots.len());
    let mut stats = SearchStats::default();
    let mut queue_limited = 0usize;
    let mut unsolvable = 0usize;
    for shot in &shots {
        let r = decode(&ctx, &shot.syndrome, &config);
        stats.merge(&r.stats);
        match r.status {
            DecodeStatus::Solved => {}
            DecodeStatus::QueueLimitReached => queue_limited += 1,
            DecodeStatus::NoSolution => unsolvable += 1,
        }
        results.push(r);
    }

    print!("{}", write_predictions(&results));
    eprintln!(
        "decoded {} shots at {}: {} solved, {} queue-limited, {} unsolvable ({} nodes expanded)",
        shots.len(),
        args.level,
        shots.len() - queue_limited - unsolvable,
        queue_limited,
        unsolvable,
        stats.nodes_expanded,
    );
    Ok(())
}

pub fn cmd_sample(args: &SampleArgs) -> Result<(), CliError> {
    let model = load_model(&args.model)?;
    let shots = sample_shots(&model, args.count, args.seed);
    print!("{}", write_bit_rows(shots.iter().map(|s| s.syndrome.as_slice())));
    Ok(())
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let model = load_model(&args.model)?;
    let ctx = build_context(model);
    let shots = sample_shots(&ctx.model, args.shots, args.seed);
    let config = args.config.to_config(args.level);
    let report =
        cross_check(&ctx, &config, &shots).map_err(|e| CliError::Input(e.to_string()))?;
    for row in &report.rows {
        let verdict = if row.mismatch { "MISMATCH" } else { "ok" };
        let degenerate = if !row.mismatch && !row.obs_match { " (observables differ)" } else { "" };
        println!(
            "shot {} decoder {} oracle {} gap {:+.3e} {verdict}{degenerate}",
            row.shot, row.decoder_cost, row.oracle_cost, row.gap
        );
    }
    eprintln!("checked {} shots: {} mismatches", report.rows.len(), report.mismatches);
    if report.mismatches > 0 {
        return Err(CliError::Accuracy(format!(
            "{} of {} shots mismatched the reference decoder",
            report.mismatches,
            report.rows.len()
        )));
    }
    Ok(())
}

pub fn cmd_gen(args: &GenArgs) -> Result<(), CliError> {
    let check = |name: &str, v: Option<usize>| {
        v.filter(|&v| v >= 1)
            .ok_or_else(|| CliError::Usage(format!("--{name} must be at least 1")))
    };
    if !(args.p > 0.0 && args.p < 0.5) {
        return Err(CliError::Usage(format!("--p must be in (0, 0.5), got {}", args.p)));
    }
    let model = match args.kind {
        GenKind::Chain => chain_model(check("n", args.n)?, args.p, args.seed),
        GenKind::Grid => {
            grid_model(check("width", args.width)?, check("height", args.height)?, args.p, args.seed)
        }
    };
    let text = serialize_dem(&model);
    match &args.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Per-shot outputs that the equivalence gate compares across levels.
type ShotOutput = (Vec<u32>, Vec<u8>, u64);

pub fn cmd_bench(args: &BenchArgs) -> Result<(), CliError> {
    if args.levels.is_empty() {
        return Err(CliError::Usage("--levels must name at least one level".into()));
    }
    if args.repeats < 1 {
        return Err(CliError::Usage("--repeats must be at least 1".into()));
    }
    let model = load_model(&args.model)?;
    let ctx = build_context(model);
    let shots = sample_shots(&ctx.model, args.shots, args.seed);

    // Untimed verification pass: every level must produce identical outputs
    // before any timing is reported.
    let mut outputs: Vec<Vec<ShotOutput>> = Vec::with_capacity(args.levels.len());
    let mut aggregated: Vec<SearchStats> = Vec::with_capacity(args.levels.len());
    for &level in &args.levels {
        let config = args.config.to_config(level);
        let mut per_shot = Vec::with_capacity(shots.len());
        let mut stats = SearchStats::default();
        for shot in &shots {
            let r = decode(&ctx, &shot.syndrome, &config);
            stats.merge(&r.stats);
            per_shot.push((r.applied_errors, r.predicted_observables, r.cost.to_bits()));
        }
        outputs.push(per_shot);
        aggregated.push(stats);
    }

    // Test hook: corrupt one level's recorded outputs so the gate's failure
    // path stays exercised end to end. Inert unless the variable is set.
    if let Ok(fault) = std::env::var("QMLE_BENCH_FAULT_LEVEL") {
        let level = fault
            .parse::<OptLevel>()
            .map_err(|e| CliError::Usage(format!("QMLE_BENCH_FAULT_LEVEL: {e}")))?;
        if let Some(pos) = args.levels.iter().position(|&l| l == level) {
            if let Some(first) = outputs[pos].first_mut() {
                first.2 ^= 1;
            }
        }
    }

    for (li, per_shot) in outputs.iter().enumerate().skip(1) {
        for (si, (reference, candidate)) in outputs[0].iter().zip(per_shot).enumerate() {
            if reference != candidate {
                return Err(CliError::Accuracy(format!(
                    "accuracy gate: level {} disagrees with level {} on shot {si}",
                    args.levels[li], args.levels[0]
                )));
            }
        }
    }

    // Timed passes, interleaved by batch so drift hits all levels evenly;
    // minimum over repeats is reported. Only the decode loop is timed.
    let mut times = vec![f64::INFINITY; args.levels.len()];
    for _ in 0..args.repeats {
        for (li, &level) in args.levels.iter().enumerate() {
            let config = args.config.to_config(level);
            let start = thread_cpu_seconds();
            for shot in &shots {
                std::hint::black_box(decode(&ctx, &shot.syndrome, &config));
            }
            let elapsed = thread_cpu_seconds() - start;
            times[li] = times[li].min(elapsed);
        }
    }

    let resolution = timer_resolution_seconds();
    let total: f64 = times.iter().sum();
    if total / resolution < 100.0 {
        eprintln!(
            "warning: total measured time {total:.2e}s spans fewer than 100 timer ticks \
             (resolution {resolution:.1e}s); increase --shots or --repeats"
        );
    }

    let baseline = times[0];
    let rows: Vec<BenchRow> = args
        .levels
        .iter()
        .zip(&times)
        .zip(&aggregated)
        .enumerate()
        .map(|(i, ((&level, &cpu_seconds), &stats))| BenchRow {
            level,
            shots: shots.len(),
            cpu_seconds,
            speedup: if i == 0 { 1.0 } else { baseline / cpu_seconds },
            stats,
        })
        .collect();
    let report = BenchReport {
        model: args.model.display().to_string(),
        shots: args.shots,
        seed: args.seed,
        repeats: args.repeats,
        config: BenchConfigEcho {
            beam: args.config.beam.0,
            pq_limit: args.config.pq_limit,
            det_penalty: args.config.det_penalty,
            no_revisit: args.config.no_revisit,
            at_most_two: args.config.at_most_two,
            hash_seed: args.config.hash_seed,
        },
        timestamp_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .unwrap_or_default()
            .as_secs(),
        rows,
    };
    eprint!("{}", report.human_table());
    print!("{}", report.to_machine_rows());
    Ok(())
}
