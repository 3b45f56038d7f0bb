//! Detector cost kernels: the admissible per-detector completion bound that
//! A* sums over fired detectors, in its reference (full-scan) and optimized
//! (bound-sorted early-exit) forms.

use crate::context::DecoderContext;
use crate::search::{DecoderConfig, SearchStats};

/// Fused per-error record the compact levels scan: blocked flag and the number
/// of currently fired detectors the error touches, side by side.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DetectorCostTuple {
    pub error_blocked: u32,
    pub detectors_count: u32,
}

/// Reference cost of clearing fired detector d: the minimum, over unblocked
/// errors touching d, of likelihood_cost divided by how many fired detectors
/// that error currently touches, plus the per-detector penalty. Returns
/// +inf when every error touching d is blocked.
///
/// The split layout deliberately keeps machine-word counts next to byte
/// flags; the fused tuple narrows both to u32. Precondition: d is fired and
/// det_counts[e] >= 1 for every e in d2e[d].
pub fn get_detcost_baseline(
    d: u32,
    blocked: &[u8],
    det_counts: &[usize],
    ctx: &DecoderContext,
    config: &DecoderConfig,
) -> f64 {
    let mut stats = SearchStats::default();
    get_detcost_baseline_counted(d, blocked, det_counts, ctx, config, &mut stats)
}

// inline(never) on the scan kernels pins their codegen: timing comparisons
// between levels must not depend on what a particular build happens to
// inline into a particular caller.
#[inline(never)]
pub fn get_detcost_baseline_counted(
    d: u32,
    blocked: &[u8],
    det_counts: &[usize],
    ctx: &DecoderContext,
    config: &DecoderConfig,
    stats: &mut SearchStats,
) -> f64 {
    stats.detcost_calls += 1;
    let mut min_cost = f64::INFINITY;
    for &ei in &ctx.d2e[d as usize] {
        stats.detcost_loop_iterations += 1;
        let ei = ei as usize;
        if blocked[ei] == 0 {
            let ecost = ctx.model.errors[ei].likelihood_cost / det_counts[ei] as f64;
            min_cost = min_cost.min(ecost);
        }
    }
    min_cost + config.det_penalty
}

/// Same value as [`get_detcost_baseline`], computed over the fused tuple array
/// and the contiguous cost table, with an early exit: d2e[d] ascends by
/// min_cost, so once an entry's bound cannot beat the running minimum nothing
/// later can either. The bound comparison deliberately precedes the blocked
/// load, matching the optimized scan order.
pub fn get_detcost_optimized(
    d: u32,
    tuples: &[DetectorCostTuple],
    ctx: &DecoderContext,
    config: &DecoderConfig,
) -> f64 {
    let mut stats = SearchStats::default();
    get_detcost_optimized_counted(d, tuples, ctx, config, &mut stats)
}

#[inline(never)]
pub fn get_detcost_optimized_counted(
    d: u32,
    tuples: &[DetectorCostTuple],
    ctx: &DecoderContext,
    config: &DecoderConfig,
    stats: &mut SearchStats,
) -> f64 {
    stats.detcost_calls += 1;
    let mut min_cost = f64::INFINITY;
    for &ei in &ctx.d2e[d as usize] {
        stats.detcost_loop_iterations += 1;
        let ei = ei as usize;
        let ec = ctx.error_costs[ei];
        if ec.min_cost >= min_cost {
            stats.detcost_early_exits += 1;
            break;
        }
        let dct = tuples[ei];
        if dct.error_blocked == 0 {
            let ecost = ec.likelihood_cost / dct.detectors_count as f64;
            min_cost = min_cost.min(ecost);
        }
    }
    min_cost + config.det_penalty
}

/// Full scan over the fused tuple layout, likelihoods still read from the
/// mechanism records: the intermediate form between the split-array reference
/// and the bound-sorted scan.
#[inline(never)]
pub(crate) fn get_detcost_fused_fullscan_counted(
    d: u32,
    tuples: &[DetectorCostTuple],
    ctx: &DecoderContext,
    config: &DecoderConfig,
    stats: &mut SearchStats,
) -> f64 {
    stats.detcost_calls += 1;
    let mut min_cost = f64::INFINITY;
    for &ei in &ctx.d2e[d as usize] {
        stats.detcost_loop_iterations += 1;
        let ei = ei as usize;
        let dct = tuples[ei];
        if dct.error_blocked == 0 {
            let ecost = ctx.model.errors[ei].likelihood_cost / dct.detectors_count as f64;
            min_cost = min_cost.min(ecost);
        }
    }
    min_cost + config.det_penalty
}
