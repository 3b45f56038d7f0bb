//! The optimization ladder. Each level fixes a storage layout and access
//! discipline for the three hot structures (fired pattern, blocked flags,
//! per-error scan records) plus a fired-pattern fingerprint:
//!
//! - L0: flag-per-bit packed fired/blocked, split count array, full-scan
//!   detector cost, element-at-a-time fingerprint.
//! - L1: byte-wide fired/blocked flags, otherwise as L0.
//! - L2: blocked flag and fired count fused into one tuple array.
//! - L3: L2 plus the bound-sorted early-exit scan over the contiguous cost table.
//! - L4: L3 plus a word-packed fired pattern updated by XOR and hashed a word
//!   at a time.
//!
//! Every level decodes identically by construction; only the work per node
//! differs. The engine is monomorphized over this trait.

use crate::context::DecoderContext;
use crate::search::bits::PackedBits;
use crate::search::detcost::{
    get_detcost_baseline_counted, get_detcost_fused_fullscan_counted,
    get_detcost_optimized_counted, DetectorCostTuple,
};
use crate::search::{DecoderConfig, SearchStats};

pub(crate) trait LevelOps {
    type Fired: Clone + PartialEq + Eq;
    type Blocked: Clone;
    type Scratch;

    fn fired_from_syndrome(syndrome: &[u8]) -> Self::Fired;
    fn fired_to_bytes(fired: &Self::Fired) -> Vec<u8>;
    fn fired_get(fired: &Self::Fired, d: u32) -> bool;
    /// Flips detector d; returns +1 if it became fired, -1 otherwise.
    fn fired_toggle(fired: &mut Self::Fired, d: u32) -> i32;
    fn lowest_fired(fired: &Self::Fired) -> Option<u32>;
    /// Visits fired detectors in ascending order until f returns false.
    fn for_each_fired_until(fired: &Self::Fired, f: impl FnMut(u32) -> bool);
    fn fingerprint(fired: &Self::Fired, hash_seed: u64) -> u64;

    fn blocked_zeros(num_errors: usize) -> Self::Blocked;
    fn blocked_get(blocked: &Self::Blocked, e: u32) -> bool;
    fn blocked_set(blocked: &mut Self::Blocked, e: u32);

    fn scratch_new(ctx: &DecoderContext) -> Self::Scratch;
    /// Rebuilds the scratch for a node: fused levels mirror the blocked flags,
    /// and every level recounts fired detectors per error.
    fn scratch_rebuild(
        scratch: &mut Self::Scratch,
        ctx: &DecoderContext,
        fired: &Self::Fired,
        blocked: &Self::Blocked,
    );
    /// Mirrors a newly blocked error into the scratch (no-op for split layouts).
    fn scratch_block(scratch: &mut Self::Scratch, e: u32);
    /// Updates per-error counts after detector d flipped to `now_fired`.
    fn scratch_flip_detector(
        scratch: &mut Self::Scratch,
        ctx: &DecoderContext,
        d: u32,
        now_fired: bool,
    );
    fn detcost(
        scratch: &Self::Scratch,
        blocked: &Self::Blocked,
        d: u32,
        ctx: &DecoderContext,
        config: &DecoderConfig,
        stats: &mut SearchStats,
    ) -> f64;
}

/// Element-at-a-time fingerprint shared by L0-L3: seed starts at the bit
/// length and each 0/1 element folds in as seed*31 + element.
#[inline]
fn element_fingerprint(len: usize, bit_at: impl Fn(usize) -> u64) -> u64 {
    let mut seed = len as u64;
    for i in 0..len {
        seed = seed.wrapping_mul(31).wrapping_add(bit_at(i));
    }
    seed
}

fn count_scatter<L: LevelOps>(
    counts: &mut [usize],
    ctx: &DecoderContext,
    fired: &L::Fired,
) {
    L::for_each_fired_until(fired, |d| {
        for &ei in &ctx.d2e[d as usize] {
            counts[ei as usize] += 1;
        }
        true
    });
}

fn delta_counts(counts: &mut [usize], ctx: &DecoderContext, d: u32, now_fired: bool) {
    if now_fired {
        for &ei in &ctx.d2e[d as usize] {
            counts[ei as usize] += 1;
        }
    } else {
        for &ei in &ctx.d2e[d as usize] {
            counts[ei as usize] -= 1;
        }
    }
}

fn delta_tuples(tuples: &mut [DetectorCostTuple], ctx: &DecoderContext, d: u32, now_fired: bool) {
    if now_fired {
        for &ei in &ctx.d2e[d as usize] {
            tuples[ei as usize].detectors_count += 1;
        }
    } else {
        for &ei in &ctx.d2e[d as usize] {
            tuples[ei as usize].detectors_count -= 1;
        }
    }
}

pub(crate) struct Level0;

impl LevelOps for Level0 {
    type Fired = PackedBits;
    type Blocked = PackedBits;
    type Scratch = Vec<usize>;

    fn fired_from_syndrome(syndrome: &[u8]) -> PackedBits {
        PackedBits::from_bytes(syndrome)
    }

    fn fired_to_bytes(fired: &PackedBits) -> Vec<u8> {
        fired.to_bytes()
    }

    fn fired_get(fired: &PackedBits, d: u32) -> bool {
        fired.get(d as usize)
    }

    fn fired_toggle(fired: &mut PackedBits, d: u32) -> i32 {
        fired.toggle(d as usize)
    }

    // Flag-per-bit discipline: every scan goes element by element through the
    // masked accessor.
    fn lowest_fired(fired: &PackedBits) -> Option<u32> {
        (0..fired.len()).find(|&d| fired.get(d)).map(|d| d as u32)
    }

    fn for_each_fired_until(fired: &PackedBits, mut f: impl FnMut(u32) -> bool) {
        for d in 0..fired.len() {
            if fired.get(d) && !f(d as u32) {
                return;
            }
        }
    }

    fn fingerprint(fired: &PackedBits, _hash_seed: u64) -> u64 {
        element_fingerprint(fired.len(), |i| fired.get(i) as u64)
    }

    fn blocked_zeros(num_errors: usize) -> PackedBits {
        PackedBits::zeros(num_errors)
    }

    fn blocked_get(blocked: &PackedBits, e: u32) -> bool {
        blocked.get(e as usize)
    }

    fn blocked_set(blocked: &mut PackedBits, e: u32) {
        blocked.set(e as usize);
    }

    fn scratch_new(ctx: &DecoderContext) -> Vec<usize> {
        vec![0; ctx.num_errors()]
    }

    #[inline(never)]
    fn scratch_rebuild(
        scratch: &mut Vec<usize>,
        ctx: &DecoderContext,
        fired: &PackedBits,
        _blocked: &PackedBits,
    ) {
        scratch.fill(0);
        count_scatter::<Self>(scratch, ctx, fired);
    }

    fn scratch_block(_scratch: &mut Vec<usize>, _e: u32) {}

    fn scratch_flip_detector(scratch: &mut Vec<usize>, ctx: &DecoderContext, d: u32, now_fired: bool) {
        delta_counts(scratch, ctx, d, now_fired);
    }

    #[inline(never)]
    fn detcost(
        scratch: &Vec<usize>,
        blocked: &PackedBits,
        d: u32,
        ctx: &DecoderContext,
        config: &DecoderConfig,
        stats: &mut SearchStats,
    ) -> f64 {
        // Full scan as in the byte-wide reference, but each blocked flag costs
        // a masked single-bit read.
        stats.detcost_calls += 1;
        let mut min_cost = f64::INFINITY;
        for &ei in &ctx.d2e[d as usize] {
            stats.detcost_loop_iterations += 1;
            let ei = ei as usize;
            if !blocked.get(ei) {
                let ecost = ctx.model.errors[ei].likelihood_cost / scratch[ei] as f64;
                min_cost = min_cost.min(ecost);
            }
        }
        min_cost + config.det_penalty
    }
}

pub(crate) struct Level1;

impl LevelOps for Level1 {
    type Fired = Vec<u8>;
    type Blocked = Vec<u8>;
    type Scratch = Vec<usize>;

    fn fired_from_syndrome(syndrome: &[u8]) -> Vec<u8> {
        syndrome.to_vec()
    }

    fn fired_to_bytes(fired: &Vec<u8>) -> Vec<u8> {
        fired.clone()
    }

    fn fired_get(fired: &Vec<u8>, d: u32) -> bool {
        fired[d as usize] != 0
    }

    fn fired_toggle(fired: &mut Vec<u8>, d: u32) -> i32 {
        let bit = &mut fired[d as usize];
        *bit ^= 1;
        if *bit != 0 { 1 } else { -1 }
    }

    fn lowest_fired(fired: &Vec<u8>) -> Option<u32> {
        fired.iter().position(|&b| b != 0).map(|d| d as u32)
    }

    fn for_each_fired_until(fired: &Vec<u8>, mut f: impl FnMut(u32) -> bool) {
        for (d, &bit) in fired.iter().enumerate() {
            if bit != 0 && !f(d as u32) {
                return;
            }
        }
    }

    fn fingerprint(fired: &Vec<u8>, _hash_seed: u64) -> u64 {
        element_fingerprint(fired.len(), |i| fired[i] as u64)
    }

    fn blocked_zeros(num_errors: usize) -> Vec<u8> {
        vec![0; num_errors]
    }

    fn blocked_get(blocked: &Vec<u8>, e: u32) -> bool {
        blocked[e as usize] != 0
    }

    fn blocked_set(blocked: &mut Vec<u8>, e: u32) {
        blocked[e as usize] = 1;
    }

    fn scratch_new(ctx: &DecoderContext) -> Vec<usize> {
        vec![0; ctx.num_errors()]
    }

    #[inline(never)]
    fn scratch_rebuild(
        scratch: &mut Vec<usize>,
        ctx: &DecoderContext,
        fired: &Vec<u8>,
        _blocked: &Vec<u8>,
    ) {
        scratch.fill(0);
        count_scatter::<Self>(scratch, ctx, fired);
    }

    fn scratch_block(_scratch: &mut Vec<usize>, _e: u32) {}

    fn scratch_flip_detector(scratch: &mut Vec<usize>, ctx: &DecoderContext, d: u32, now_fired: bool) {
        delta_counts(scratch, ctx, d, now_fired);
    }

    fn detcost(
        scratch: &Vec<usize>,
        blocked: &Vec<u8>,
        d: u32,
        ctx: &DecoderContext,
        config: &DecoderConfig,
        stats: &mut SearchStats,
    ) -> f64 {
        get_detcost_baseline_counted(d, blocked, scratch, ctx, config, stats)
    }
}

macro_rules! byte_fired_tuple_level {
    ($name:ident, $detcost:expr) => {
        pub(crate) struct $name;

        impl LevelOps for $name {
            type Fired = Vec<u8>;
            type Blocked = Vec<u8>;
            type Scratch = Vec<DetectorCostTuple>;

            fn fired_from_syndrome(syndrome: &[u8]) -> Vec<u8> {
                syndrome.to_vec()
            }

            fn fired_to_bytes(fired: &Vec<u8>) -> Vec<u8> {
                fired.clone()
            }

            fn fired_get(fired: &Vec<u8>, d: u32) -> bool {
                fired[d as usize] != 0
            }

            fn fired_toggle(fired: &mut Vec<u8>, d: u32) -> i32 {
                let bit = &mut fired[d as usize];
                *bit ^= 1;
                if *bit != 0 { 1 } else { -1 }
            }

            fn lowest_fired(fired: &Vec<u8>) -> Option<u32> {
                fired.iter().position(|&b| b != 0).map(|d| d as u32)
            }

            fn for_each_fired_until(fired: &Vec<u8>, mut f: impl FnMut(u32) -> bool) {
                for (d, &bit) in fired.iter().enumerate() {
                    if bit != 0 && !f(d as u32) {
                        return;
                    }
                }
            }

            fn fingerprint(fired: &Vec<u8>, _hash_seed: u64) -> u64 {
                element_fingerprint(fired.len(), |i| fired[i] as u64)
            }

            fn blocked_zeros(num_errors: usize) -> Vec<u8> {
                vec![0; num_errors]
            }

            fn blocked_get(blocked: &Vec<u8>, e: u32) -> bool {
                blocked[e as usize] != 0
            }

            fn blocked_set(blocked: &mut Vec<u8>, e: u32) {
                blocked[e as usize] = 1;
            }

            fn scratch_new(ctx: &DecoderContext) -> Vec<DetectorCostTuple> {
                vec![DetectorCostTuple::default(); ctx.num_errors()]
            }

            #[inline(never)]
            fn scratch_rebuild(
                scratch: &mut Vec<DetectorCostTuple>,
                ctx: &DecoderContext,
                fired: &Vec<u8>,
                blocked: &Vec<u8>,
            ) {
                // blocked is sparse along any search path, so clear densely
                // and write only the set flags
                scratch.fill(DetectorCostTuple::default());
                for (i, &b) in blocked.iter().enumerate() {
                    if b != 0 {
                        scratch[i].error_blocked = 1;
                    }
                }
                for (d, &bit) in fired.iter().enumerate() {
                    if bit != 0 {
                        for &ei in &ctx.d2e[d] {
                            scratch[ei as usize].detectors_count += 1;
                        }
                    }
                }
            }

            fn scratch_block(scratch: &mut Vec<DetectorCostTuple>, e: u32) {
                scratch[e as usize].error_blocked = 1;
            }

            fn scratch_flip_detector(
                scratch: &mut Vec<DetectorCostTuple>,
                ctx: &DecoderContext,
                d: u32,
                now_fired: bool,
            ) {
                delta_tuples(scratch, ctx, d, now_fired);
            }

            fn detcost(
                scratch: &Vec<DetectorCostTuple>,
                _blocked: &Vec<u8>,
                d: u32,
                ctx: &DecoderContext,
                config: &DecoderConfig,
                stats: &mut SearchStats,
            ) -> f64 {
                $detcost(d, scratch, ctx, config, stats)
            }
        }
    };
}

byte_fired_tuple_level!(Level2, get_detcost_fused_fullscan_counted);
byte_fired_tuple_level!(Level3, get_detcost_optimized_counted);

pub(crate) struct Level4;

impl LevelOps for Level4 {
    type Fired = PackedBits;
    type Blocked = Vec<u8>;
    type Scratch = Vec<DetectorCostTuple>;

    fn fired_from_syndrome(syndrome: &[u8]) -> PackedBits {
        PackedBits::from_bytes(syndrome)
    }

    fn fired_to_bytes(fired: &PackedBits) -> Vec<u8> {
        fired.to_bytes()
    }

    fn fired_get(fired: &PackedBits, d: u32) -> bool {
        fired.get(d as usize)
    }

    fn fired_toggle(fired: &mut PackedBits, d: u32) -> i32 {
        fired.toggle(d as usize)
    }

    // Word-at-a-time discipline for every whole-pattern operation.
    fn lowest_fired(fired: &PackedBits) -> Option<u32> {
        fired.lowest_one().map(|d| d as u32)
    }

    fn for_each_fired_until(fired: &PackedBits, mut f: impl FnMut(u32) -> bool) {
        fired.for_each_one_until(|d| f(d as u32));
    }

    fn fingerprint(fired: &PackedBits, hash_seed: u64) -> u64 {
        let mut h = hash_seed ^ fired.len() as u64;
        for &w in fired.words() {
            h = (h ^ w).wrapping_mul(0x100_0000_01b3);
        }
        h
    }

    fn blocked_zeros(num_errors: usize) -> Vec<u8> {
        vec![0; num_errors]
    }

    fn blocked_get(blocked: &Vec<u8>, e: u32) -> bool {
        blocked[e as usize] != 0
    }

    fn blocked_set(blocked: &mut Vec<u8>, e: u32) {
        blocked[e as usize] = 1;
    }

    fn scratch_new(ctx: &DecoderContext) -> Vec<DetectorCostTuple> {
        vec![DetectorCostTuple::default(); ctx.num_errors()]
    }

    #[inline(never)]
    fn scratch_rebuild(
        scratch: &mut Vec<DetectorCostTuple>,
        ctx: &DecoderContext,
        fired: &PackedBits,
        blocked: &Vec<u8>,
    ) {
        scratch.fill(DetectorCostTuple::default());
        for (i, &b) in blocked.iter().enumerate() {
            if b != 0 {
                scratch[i].error_blocked = 1;
            }
        }
        Self::for_each_fired_until(fired, |d| {
            for &ei in &ctx.d2e[d as usize] {
                scratch[ei as usize].detectors_count += 1;
            }
            true
        });
    }

    fn scratch_block(scratch: &mut Vec<DetectorCostTuple>, e: u32) {
        scratch[e as usize].error_blocked = 1;
    }

    fn scratch_flip_detector(
        scratch: &mut Vec<DetectorCostTuple>,
        ctx: &DecoderContext,
        d: u32,
        now_fired: bool,
    ) {
        delta_tuples(scratch, ctx, d, now_fired);
    }

    fn detcost(
        scratch: &Vec<DetectorCostTuple>,
        _blocked: &Vec<u8>,
        d: u32,
        ctx: &DecoderContext,
        config: &DecoderConfig,
        stats: &mut SearchStats,
    ) -> f64 {
        get_detcost_optimized_counted(d, scratch, ctx, config, stats)
    }
}
