//! Most-likely-error decoding via A* over partial error configurations.
//!
//! The search expands configurations by branching on the lowest-index fired
//! detector; sibling ordering blocks earlier alternatives so configurations
//! form a tree. Five kernel implementations (L0 to L4) share this loop and
//! must produce bitwise-identical results; they differ only in data layout
//! and scan strategy.

mod bits;
mod detcost;
mod engine;
mod level;
mod node;

use std::fmt;
use std::str::FromStr;

use crate::context::DecoderContext;

pub use bits::PackedBits;
pub use detcost::{
    get_detcost_baseline, get_detcost_baseline_counted, get_detcost_optimized,
    get_detcost_optimized_counted, DetectorCostTuple,
};
pub use node::{build_detector_cost_tuples, expand, heuristic, predict_observables, SearchNode};

/// Which kernel set the decoder runs. All levels compute the same result.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OptLevel {
    /// Bit-packed flags with per-bit access and full-scan detector costs.
    L0,
    /// Byte-wide fired and blocked flags.
    L1,
    /// Blocked flag and detector count fused into one scratch tuple.
    L2,
    /// Contiguous cost table sorted per detector, with early exit.
    L3,
    /// Word-packed fired pattern with word-wise fingerprints.
    L4,
}

impl OptLevel {
    pub const ALL: [OptLevel; 5] =
        [OptLevel::L0, OptLevel::L1, OptLevel::L2, OptLevel::L3, OptLevel::L4];
}

impl fmt::Display for OptLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OptLevel::L0 => "L0",
            OptLevel::L1 => "L1",
            OptLevel::L2 => "L2",
            OptLevel::L3 => "L3",
            OptLevel::L4 => "L4",
        };
        f.write_str(s)
    }
}

impl FromStr for OptLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "L0" | "0" => Ok(OptLevel::L0),
            "L1" | "1" => Ok(OptLevel::L1),
            "L2" | "2" => Ok(OptLevel::L2),
            "L3" | "3" => Ok(OptLevel::L3),
            "L4" | "4" => Ok(OptLevel::L4),
            _ => Err(format!("unknown optimization level `{s}` (expected L0..L4)")),
        }
    }
}

pub const DEFAULT_PQ_LIMIT: usize = 200_000;
/// Default seed for the L4 fingerprint mix. Any value is valid; results must
/// not depend on it.
pub const DEFAULT_HASH_SEED: u64 = 0x9e37_79b9_7f4a_7c15;

/// Decoder knobs. The default configuration is exact: no beam, no detector
/// penalty, revisit suppression on (which never changes the result, only the
/// work done).
#[derive(Clone, Debug, PartialEq)]
pub struct DecoderConfig {
    /// Discard popped states whose fired count exceeds the best seen plus
    /// this cutoff. `None` disables the beam. A finite beam trades accuracy
    /// for speed and can only miss solutions, never invent cheaper ones.
    pub beam_cutoff: Option<u32>,
    /// Hard cap on the priority queue; reaching it aborts the decode.
    pub pq_limit: usize,
    /// Added to every detector cost term. Zero keeps the heuristic
    /// admissible; positive values speed up search at the cost of optimality.
    pub det_penalty: f64,
    /// Skip states whose fired pattern was already expanded.
    pub no_revisit: bool,
    /// Heuristic filter: skip candidates touching a fired detector already
    /// touched by two or more applied errors.
    pub at_most_two: bool,
    pub opt_level: OptLevel,
    /// Seed for L4 fingerprints. Exposed so determinism across seeds can be
    /// checked; levels L0 to L3 ignore it.
    pub hash_seed: u64,
}

impl Default for DecoderConfig {
    fn default() -> Self {
        DecoderConfig {
            beam_cutoff: None,
            pq_limit: DEFAULT_PQ_LIMIT,
            det_penalty: 0.0,
            no_revisit: true,
            at_most_two: false,
            opt_level: OptLevel::L4,
            hash_seed: DEFAULT_HASH_SEED,
        }
    }
}

/// Work counters for one decode call. Pure observability; no decision in the
/// search reads them.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes_expanded: u64,
    pub nodes_pruned_beam: u64,
    pub nodes_pruned_visited: u64,
    pub nodes_pruned_blocked: u64,
    pub detcost_calls: u64,
    pub detcost_loop_iterations: u64,
    pub detcost_early_exits: u64,
    pub max_queue_size: u64,
}

impl SearchStats {
    pub fn merge(&mut self, other: &SearchStats) {
        self.nodes_expanded += other.nodes_expanded;
        self.nodes_pruned_beam += other.nodes_pruned_beam;
        self.nodes_pruned_visited += other.nodes_pruned_visited;
        self.nodes_pruned_blocked += other.nodes_pruned_blocked;
        self.detcost_calls += other.detcost_calls;
        self.detcost_loop_iterations += other.detcost_loop_iterations;
        self.detcost_early_exits += other.detcost_early_exits;
        self.max_queue_size = self.max_queue_size.max(other.max_queue_size);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DecodeStatus {
    /// A minimum-cost configuration was found (exact when beam, penalty and
    /// the at-most-two filter are off).
    Solved,
    /// The priority queue hit `pq_limit` before a solution was found.
    QueueLimitReached,
    /// The search space was exhausted; no error set explains the syndrome.
    NoSolution,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecodeResult {
    /// Indices of the applied error mechanisms, in application order.
    pub applied_errors: Vec<u32>,
    /// XOR of the observable flips of the applied errors; all zero on failure.
    pub predicted_observables: Vec<u8>,
    /// Total likelihood cost of the applied set; infinite on failure.
    pub cost: f64,
    pub status: DecodeStatus,
    pub stats: SearchStats,
}

/// Expansion-order trace of one decode, for tree-ness checks and debugging.
#[derive(Clone, Debug, Default)]
pub struct DecodeTrace {
    /// Applied-error sets of every state created (start plus each pushed
    /// child), in creation order. Tree-ness means no set appears twice.
    pub created_configs: Vec<Vec<u32>>,
    /// Applied-error sets of expanded states, in expansion order.
    pub expanded_configs: Vec<Vec<u32>>,
    /// Fired patterns of expanded states, as bytes, in expansion order.
    pub expanded_patterns: Vec<Vec<u8>>,
}

pub fn decode(ctx: &DecoderContext, syndrome: &[u8], config: &DecoderConfig) -> DecodeResult {
    match config.opt_level {
        OptLevel::L0 => engine::run_decode::<level::Level0>(ctx, syndrome, config, None),
        OptLevel::L1 => engine::run_decode::<level::Level1>(ctx, syndrome, config, None),
        OptLevel::L2 => engine::run_decode::<level::Level2>(ctx, syndrome, config, None),
        OptLevel::L3 => engine::run_decode::<level::Level3>(ctx, syndrome, config, None),
        OptLevel::L4 => engine::run_decode::<level::Level4>(ctx, syndrome, config, None),
    }
}

pub fn decode_traced(
    ctx: &DecoderContext,
    syndrome: &[u8],
    config: &DecoderConfig,
) -> (DecodeResult, DecodeTrace) {
    let mut trace = DecodeTrace::default();
    let result = match config.opt_level {
        OptLevel::L0 => engine::run_decode::<level::Level0>(ctx, syndrome, config, Some(&mut trace)),
        OptLevel::L1 => engine::run_decode::<level::Level1>(ctx, syndrome, config, Some(&mut trace)),
        OptLevel::L2 => engine::run_decode::<level::Level2>(ctx, syndrome, config, Some(&mut trace)),
        OptLevel::L3 => engine::run_decode::<level::Level3>(ctx, syndrome, config, Some(&mut trace)),
        OptLevel::L4 => engine::run_decode::<level::Level4>(ctx, syndrome, config, Some(&mut trace)),
    };
    (result, trace)
}

/// Fingerprint of a fired pattern given as one byte per detector, as the
/// given level computes it. L0 to L3 hash per detector and ignore the seed;
/// L4 mixes the seed and hashes per 64-bit word.
pub fn syndrome_fingerprint(fired: &[u8], opt_level: OptLevel, hash_seed: u64) -> u64 {
    use level::LevelOps;
    match opt_level {
        OptLevel::L0 => level::Level0::fingerprint(&PackedBits::from_bytes(fired), hash_seed),
        OptLevel::L1 => level::Level1::fingerprint(&fired.to_vec(), hash_seed),
        OptLevel::L2 => level::Level2::fingerprint(&fired.to_vec(), hash_seed),
        OptLevel::L3 => level::Level3::fingerprint(&fired.to_vec(), hash_seed),
        OptLevel::L4 => level::Level4::fingerprint(&PackedBits::from_bytes(fired), hash_seed),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::build_context;
    use crate::dem::parse_dem;

    const LN_9: f64 = 2.1972245773362196;
    const LN_4: f64 = 1.3862943611198906;

    fn ctx_of(src: &str) -> DecoderContext {
        build_context(parse_dem(src).unwrap())
    }

    #[test]
    fn decodes_single_error() {
        let ctx = ctx_of("error(0.1) D0\n");
        let r = decode(&ctx, &[1], &DecoderConfig::default());
        assert_eq!(r.status, DecodeStatus::Solved);
        assert_eq!(r.applied_errors, vec![0]);
        assert_eq!(r.cost, LN_9);
    }

    #[test]
    fn decodes_empty_syndrome_without_expanding() {
        let ctx = ctx_of("error(0.1) D0 D1\n");
        let r = decode(&ctx, &[0, 0], &DecoderConfig::default());
        assert_eq!(r.status, DecodeStatus::Solved);
        assert!(r.applied_errors.is_empty());
        assert_eq!(r.cost, 0.0);
        assert_eq!(r.stats.nodes_expanded, 0);
    }

    #[test]
    fn picks_cheaper_of_two_degenerate_errors() {
        // Same detector footprint, p=0.2 costs ln 4 < ln 9 at p=0.1.
        let ctx = ctx_of("error(0.1) D0 L0\nerror(0.2) D0\n");
        let r = decode(&ctx, &[1], &DecoderConfig::default());
        assert_eq!(r.status, DecodeStatus::Solved);
        assert_eq!(r.applied_errors, vec![1]);
        assert_eq!(r.cost, LN_4);
        assert_eq!(r.predicted_observables, vec![0]);
    }

    #[test]
    fn prefers_one_error_over_two() {
        let ctx = ctx_of("error(0.1) D0 D1 L0\nerror(0.1) D0\nerror(0.1) D1\n");
        let r = decode(&ctx, &[1, 1], &DecoderConfig::default());
        assert_eq!(r.status, DecodeStatus::Solved);
        assert_eq!(r.applied_errors, vec![0]);
        assert_eq!(r.cost, LN_9);
        assert_eq!(r.predicted_observables, vec![1]);
    }

    #[test]
    fn reports_no_solution_for_uncoverable_detector() {
        let ctx = ctx_of("error(0.1) D1\n");
        let r = decode(&ctx, &[1, 0], &DecoderConfig::default());
        assert_eq!(r.status, DecodeStatus::NoSolution);
        assert!(r.applied_errors.is_empty());
        assert!(r.cost.is_infinite());
        assert_eq!(r.predicted_observables, vec![]);
    }

    #[test]
    fn reports_no_solution_when_branch_dead_ends() {
        // The only error flips D0 and D1; applying it strands D1 with the
        // mechanism blocked, so the child is pruned and the queue drains.
        let ctx = ctx_of("error(0.1) D0 D1\n");
        let r = decode(&ctx, &[1, 0], &DecoderConfig::default());
        assert_eq!(r.status, DecodeStatus::NoSolution);
        assert_eq!(r.stats.nodes_pruned_blocked, 1);
    }

    #[test]
    fn queue_limit_aborts_decode() {
        // Both children of the start state are viable, so the second push
        // attempt trips a queue cap of one.
        let ctx = ctx_of("error(0.1) D0\nerror(0.2) D0\n");
        let config = DecoderConfig { pq_limit: 1, ..DecoderConfig::default() };
        let r = decode(&ctx, &[1], &config);
        assert_eq!(r.status, DecodeStatus::QueueLimitReached);
        assert!(r.cost.is_infinite());
        assert!(r.applied_errors.is_empty());
        assert_eq!(r.stats.max_queue_size, 1);
    }

    #[test]
    fn all_levels_agree_on_a_small_model() {
        let src = "error(0.05) D0 D1 L0\nerror(0.1) D1 D2\nerror(0.15) D2 D3\n\
                   error(0.2) D3 L1\nerror(0.01) D0\nerror(0.02) D3\n";
        let ctx = ctx_of(src);
        for syndrome in [[1u8, 1, 0, 0], [1, 0, 1, 1], [0, 1, 1, 0], [1, 1, 1, 1]] {
            let mut results = Vec::new();
            for level in OptLevel::ALL {
                let config = DecoderConfig { opt_level: level, ..DecoderConfig::default() };
                results.push(decode(&ctx, &syndrome, &config));
            }
            for r in &results[1..] {
                assert_eq!(r.applied_errors, results[0].applied_errors);
                assert_eq!(r.cost.to_bits(), results[0].cost.to_bits());
                assert_eq!(r.predicted_observables, results[0].predicted_observables);
            }
        }
    }

    #[test]
    fn revisit_suppression_does_not_change_the_answer() {
        let src = "error(0.1) D0 D1\nerror(0.12) D1 D2\nerror(0.14) D0 D2\nerror(0.2) D0\n";
        let ctx = ctx_of(src);
        let on = DecoderConfig::default();
        let off = DecoderConfig { no_revisit: false, ..DecoderConfig::default() };
        for syndrome in [[1u8, 0, 1], [1, 1, 0], [0, 1, 1], [1, 1, 1]] {
            let a = decode(&ctx, &syndrome, &on);
            let b = decode(&ctx, &syndrome, &off);
            assert_eq!(a.applied_errors, b.applied_errors);
            assert_eq!(a.cost.to_bits(), b.cost.to_bits());
        }
    }

    #[test]
    fn trace_records_start_state_first() {
        let ctx = ctx_of("error(0.1) D0\n");
        let (r, trace) = decode_traced(&ctx, &[1], &DecoderConfig::default());
        assert_eq!(r.status, DecodeStatus::Solved);
        assert_eq!(trace.expanded_configs[0], Vec::<u32>::new());
        assert_eq!(trace.expanded_patterns[0], vec![1]);
    }

    #[test]
    fn opt_level_parses_and_displays() {
        assert_eq!("L3".parse::<OptLevel>().unwrap(), OptLevel::L3);
        assert_eq!("l0".parse::<OptLevel>().unwrap(), OptLevel::L0);
        assert_eq!("4".parse::<OptLevel>().unwrap(), OptLevel::L4);
        assert!("L5".parse::<OptLevel>().is_err());
        assert_eq!(OptLevel::L2.to_string(), "L2");
    }

    #[test]
    fn fingerprint_dispatch_matches_levels() {
        assert_eq!(syndrome_fingerprint(&[], OptLevel::L0, 7), 0);
        assert_eq!(syndrome_fingerprint(&[1], OptLevel::L1, 7), 32);
        assert_eq!(syndrome_fingerprint(&[0, 1], OptLevel::L2, 7), 1923);
        for level in [OptLevel::L0, OptLevel::L1, OptLevel::L2, OptLevel::L3] {
            assert_eq!(syndrome_fingerprint(&[0, 1], level, 99), 1923);
        }
        let a = syndrome_fingerprint(&[0, 1, 1, 0, 1], OptLevel::L4, 1);
        let b = syndrome_fingerprint(&[0, 1, 1, 0, 1], OptLevel::L4, 2);
        assert_ne!(a, b);
    }
}
