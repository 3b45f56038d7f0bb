//! Canonical search-state operations on byte-form patterns: expansion with
//! sibling blocking, the summed-detector-cost heuristic, and observable
//! prediction. The engine runs level-specialized copies of the same rules;
//! these definitions are the reference the engine is tested against.

use crate::context::DecoderContext;
use crate::search::detcost::{get_detcost_baseline, DetectorCostTuple};
use crate::search::DecoderConfig;

/// One A* state: the errors applied so far (in application order), the
/// residual fired pattern, its accumulated cost, and the blocked-error set.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchNode {
    pub applied_errors: Vec<u32>,
    pub fired: Vec<u8>,
    pub num_fired: u32,
    pub cost_g: f64,
    pub blocked: Vec<u8>,
}

impl SearchNode {
    /// Root state for a syndrome: nothing applied, nothing blocked.
    pub fn start(ctx: &DecoderContext, syndrome: &[u8]) -> SearchNode {
        assert_eq!(syndrome.len(), ctx.num_detectors(), "syndrome width != detector count");
        SearchNode {
            applied_errors: Vec::new(),
            fired: syndrome.to_vec(),
            num_fired: syndrome.iter().filter(|&&b| b != 0).count() as u32,
            cost_g: 0.0,
            blocked: vec![0; ctx.num_errors()],
        }
    }
}

/// Per-error scan records for a node: each error's blocked flag next to the
/// number of currently fired detectors it touches.
pub fn build_detector_cost_tuples(node: &SearchNode, ctx: &DecoderContext) -> Vec<DetectorCostTuple> {
    let mut tuples: Vec<DetectorCostTuple> = node
        .blocked
        .iter()
        .map(|&b| DetectorCostTuple { error_blocked: b as u32, detectors_count: 0 })
        .collect();
    for (d, &bit) in node.fired.iter().enumerate() {
        if bit != 0 {
            for &ei in &ctx.d2e[d] {
                tuples[ei as usize].detectors_count += 1;
            }
        }
    }
    tuples
}

/// Sum of detector costs over the node's fired detectors, in ascending
/// detector order; +inf as soon as some fired detector has no unblocked error
/// (the state cannot reach the goal). Admissible when det_penalty is zero.
pub fn heuristic(node: &SearchNode, ctx: &DecoderContext, config: &DecoderConfig) -> f64 {
    let mut det_counts = vec![0usize; ctx.num_errors()];
    for (d, &bit) in node.fired.iter().enumerate() {
        if bit != 0 {
            for &ei in &ctx.d2e[d] {
                det_counts[ei as usize] += 1;
            }
        }
    }
    let mut h = 0.0;
    for (d, &bit) in node.fired.iter().enumerate() {
        if bit != 0 {
            h += get_detcost_baseline(d as u32, &node.blocked, &det_counts, ctx, config);
            if !h.is_finite() {
                break;
            }
        }
    }
    h
}

/// Children of a node: one per candidate error on the lowest fired detector.
///
/// Candidates are the unblocked entries of d2e[d*] in adjacency order; child i
/// additionally blocks the candidates tried before it and its own error, which
/// makes the reachable configurations a tree (no configuration is reachable
/// twice). With at_most_two set, candidates that would put a third applied
/// error on some currently fired detector are skipped (and not blocked).
/// Children whose blocked set already makes the goal unreachable are still
/// returned; the search discards them by their infinite heuristic.
pub fn expand(node: &SearchNode, ctx: &DecoderContext, config: &DecoderConfig) -> Vec<SearchNode> {
    let Some(dstar) = node.fired.iter().position(|&b| b != 0) else {
        return Vec::new();
    };

    let amt_counts = if config.at_most_two {
        let mut counts = vec![0u8; ctx.num_detectors()];
        for &ei in &node.applied_errors {
            for &d in &ctx.model.errors[ei as usize].detectors {
                counts[d as usize] = counts[d as usize].saturating_add(1);
            }
        }
        Some(counts)
    } else {
        None
    };

    let mut children = Vec::new();
    let mut working_blocked = node.blocked.clone();
    for &ei in &ctx.d2e[dstar] {
        if node.blocked[ei as usize] != 0 {
            continue;
        }
        let mech = &ctx.model.errors[ei as usize];
        if let Some(counts) = &amt_counts {
            let overloaded = mech
                .detectors
                .iter()
                .any(|&d| node.fired[d as usize] != 0 && counts[d as usize] >= 2);
            if overloaded {
                continue;
            }
        }

        working_blocked[ei as usize] = 1;
        let mut fired = node.fired.clone();
        let mut num_fired = node.num_fired as i32;
        for &d in &mech.detectors {
            let bit = &mut fired[d as usize];
            *bit ^= 1;
            num_fired += if *bit != 0 { 1 } else { -1 };
        }
        let mut applied = node.applied_errors.clone();
        applied.push(ei);
        children.push(SearchNode {
            applied_errors: applied,
            fired,
            num_fired: num_fired as u32,
            cost_g: node.cost_g + mech.likelihood_cost,
            blocked: working_blocked.clone(),
        });
    }
    children
}

/// XOR of the observable sets of the applied errors, as one bit per
/// observable.
pub fn predict_observables(applied_errors: &[u32], ctx: &DecoderContext) -> Vec<u8> {
    let mut obs = vec![0u8; ctx.model.num_observables];
    for &ei in applied_errors {
        for &o in &ctx.model.errors[ei as usize].observables {
            obs[o as usize] ^= 1;
        }
    }
    obs
}
