//! The A* loop, monomorphized per optimization level. States form a tree via
//! sibling blocking, so each error configuration is reachable exactly once;
//! nodes live in an arena and the heap orders (f, num_fired, insertion id).

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::hash::{Hash, Hasher};

use crate::context::DecoderContext;
use crate::search::level::LevelOps;
use crate::search::node::predict_observables;
use crate::search::{DecodeResult, DecodeStatus, DecodeTrace, DecoderConfig, SearchStats};

const NO_NODE: u32 = u32::MAX;

struct Rec<F, B> {
    parent: u32,
    error: u32,
    cost_g: f64,
    /// (fired, blocked); taken at expansion, dropped on discard.
    state: Option<(F, B)>,
}

/// Heap entry ordered so BinaryHeap's max is the smallest (f, num_fired, id):
/// cheapest first, fewer fired detectors on ties, then FIFO by insertion id.
struct HeapEntry {
    f: f64,
    num_fired: u32,
    id: u32,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .f
            .total_cmp(&self.f)
            .then_with(|| other.num_fired.cmp(&self.num_fired))
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Visited-set key: the level fingerprint is the hash, equality compares the
/// full pattern, so fingerprint collisions can cost a probe but never change
/// which patterns count as seen.
struct VisitedKey<F> {
    fp: u64,
    pattern: F,
}

impl<F: PartialEq> PartialEq for VisitedKey<F> {
    fn eq(&self, other: &Self) -> bool {
        self.fp == other.fp && self.pattern == other.pattern
    }
}

impl<F: PartialEq> Eq for VisitedKey<F> {}

impl<F> Hash for VisitedKey<F> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.fp);
    }
}

fn walk_applied<F, B>(arena: &[Rec<F, B>], mut id: u32) -> Vec<u32> {
    let mut out = Vec::new();
    while arena[id as usize].error != NO_NODE {
        out.push(arena[id as usize].error);
        id = arena[id as usize].parent;
    }
    out.reverse();
    out
}

fn failure(ctx: &DecoderContext, status: DecodeStatus, stats: SearchStats) -> DecodeResult {
    DecodeResult {
        applied_errors: Vec::new(),
        predicted_observables: vec![0; ctx.model.num_observables],
        cost: f64::INFINITY,
        status,
        stats,
    }
}

/// Heuristic of the state (scratch, blocked, fired): detector costs summed in
/// ascending detector order, stopping at the first infinite term.
fn sum_detcost<L: LevelOps>(
    scratch: &L::Scratch,
    blocked: &L::Blocked,
    fired: &L::Fired,
    ctx: &DecoderContext,
    config: &DecoderConfig,
    stats: &mut SearchStats,
) -> f64 {
    let mut h = 0.0;
    L::for_each_fired_until(fired, |d| {
        let c = L::detcost(scratch, blocked, d, ctx, config, stats);
        h += c;
        c.is_finite()
    });
    h
}

pub(crate) fn run_decode<L: LevelOps>(
    ctx: &DecoderContext,
    syndrome: &[u8],
    config: &DecoderConfig,
    mut trace: Option<&mut DecodeTrace>,
) -> DecodeResult {
    assert_eq!(syndrome.len(), ctx.num_detectors(), "syndrome width != detector count");
    assert!(config.pq_limit >= 1, "pq_limit must be at least 1");

    let mut stats = SearchStats::default();
    let mut arena: Vec<Rec<L::Fired, L::Blocked>> = Vec::new();
    let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
    let mut visited: HashSet<VisitedKey<L::Fired>> = HashSet::new();
    let mut scratch = L::scratch_new(ctx);

    let fired0 = L::fired_from_syndrome(syndrome);
    let blocked0 = L::blocked_zeros(ctx.num_errors());
    let nf0 = syndrome.iter().filter(|&&b| b != 0).count() as u32;
    L::scratch_rebuild(&mut scratch, ctx, &fired0, &blocked0);
    let h0 = sum_detcost::<L>(&scratch, &blocked0, &fired0, ctx, config, &mut stats);
    arena.push(Rec { parent: NO_NODE, error: NO_NODE, cost_g: 0.0, state: Some((fired0, blocked0)) });
    heap.push(HeapEntry { f: h0, num_fired: nf0, id: 0 });
    stats.max_queue_size = 1;
    if let Some(t) = trace.as_deref_mut() {
        t.created_configs.push(Vec::new());
    }
    // Reference point for the beam rule: fewest fired detectors over every
    // state created so far (start node plus each pushed child).
    let mut min_fired_seen = nf0;

    loop {
        let Some(entry) = heap.pop() else {
            return failure(ctx, DecodeStatus::NoSolution, stats);
        };
        let id = entry.id as usize;

        if entry.num_fired == 0 {
            let applied = walk_applied(&arena, entry.id);
            let predicted = predict_observables(&applied, ctx);
            return DecodeResult {
                applied_errors: applied,
                predicted_observables: predicted,
                cost: arena[id].cost_g,
                status: DecodeStatus::Solved,
                stats,
            };
        }

        if let Some(beam) = config.beam_cutoff {
            if entry.num_fired > min_fired_seen.saturating_add(beam) {
                stats.nodes_pruned_beam += 1;
                arena[id].state = None;
                continue;
            }
        }

        let (mut fired, mut working_blocked) =
            arena[id].state.take().expect("each node is popped at most once");

        if config.no_revisit {
            let fp = L::fingerprint(&fired, config.hash_seed);
            if !visited.insert(VisitedKey { fp, pattern: fired.clone() }) {
                stats.nodes_pruned_visited += 1;
                continue;
            }
        }

        stats.nodes_expanded += 1;
        if let Some(t) = trace.as_deref_mut() {
            t.expanded_configs.push(walk_applied(&arena, entry.id));
            t.expanded_patterns.push(L::fired_to_bytes(&fired));
        }

        L::scratch_rebuild(&mut scratch, ctx, &fired, &working_blocked);
        let dstar = L::lowest_fired(&fired).expect("num_fired > 0");

        let amt_counts = if config.at_most_two {
            let mut counts = vec![0u8; ctx.num_detectors()];
            for &ei in &walk_applied(&arena, entry.id) {
                for &d in &ctx.model.errors[ei as usize].detectors {
                    counts[d as usize] = counts[d as usize].saturating_add(1);
                }
            }
            Some(counts)
        } else {
            None
        };

        let candidates: Vec<u32> = ctx.d2e[dstar as usize]
            .iter()
            .copied()
            .filter(|&ei| !L::blocked_get(&working_blocked, ei))
            .filter(|&ei| match &amt_counts {
                Some(counts) => !ctx.model.errors[ei as usize]
                    .detectors
                    .iter()
                    .any(|&d| L::fired_get(&fired, d) && counts[d as usize] >= 2),
                None => true,
            })
            .collect();

        let parent_cost = arena[id].cost_g;
        let parent_nf = entry.num_fired as i32;
        for &ei in &candidates {
            // The child blocks every sibling tried before it and itself.
            L::blocked_set(&mut working_blocked, ei);
            L::scratch_block(&mut scratch, ei);

            let mech = &ctx.model.errors[ei as usize];
            let mut dnf = 0i32;
            for &d in &mech.detectors {
                let delta = L::fired_toggle(&mut fired, d);
                dnf += delta;
                L::scratch_flip_detector(&mut scratch, ctx, d, delta > 0);
            }
            let child_nf = (parent_nf + dnf) as u32;

            let h = sum_detcost::<L>(&scratch, &working_blocked, &fired, ctx, config, &mut stats);
            if h.is_finite() {
                if heap.len() >= config.pq_limit {
                    return failure(ctx, DecodeStatus::QueueLimitReached, stats);
                }
                let cost_g = parent_cost + mech.likelihood_cost;
                let cid = arena.len() as u32;
                arena.push(Rec {
                    parent: entry.id,
                    error: ei,
                    cost_g,
                    state: Some((fired.clone(), working_blocked.clone())),
                });
                heap.push(HeapEntry { f: cost_g + h, num_fired: child_nf, id: cid });
                stats.max_queue_size = stats.max_queue_size.max(heap.len() as u64);
                min_fired_seen = min_fired_seen.min(child_nf);
                if let Some(t) = trace.as_deref_mut() {
                    t.created_configs.push(walk_applied(&arena, cid));
                }
            } else {
                // Some fired detector can no longer be cleared in this branch.
                stats.nodes_pruned_blocked += 1;
            }

            // Restore the parent's fired pattern and counts for the next sibling.
            for &d in &mech.detectors {
                let delta = L::fired_toggle(&mut fired, d);
                L::scratch_flip_detector(&mut scratch, ctx, d, delta > 0);
            }
        }
    }
}
