//! Decode-ready view of a model: detector-to-error adjacency sorted by cost
//! lower bound, and the per-error cost table the optimized kernels index.

use crate::dem::DetectorErrorModel;

/// Per-error cost data, laid out contiguously so the optimized detector-cost
/// kernel touches one small array instead of the full mechanism records.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorCost {
    pub likelihood_cost: f64,
    /// likelihood_cost / |detectors|: the smallest value likelihood_cost/k can
    /// take for any share count k between 1 and the mechanism's detector count.
    pub min_cost: f64,
}

#[derive(Debug, Clone)]
pub struct DecoderContext {
    pub model: DetectorErrorModel,
    /// d2e[d] lists the errors touching detector d, ascending by
    /// (min_cost, error index).
    pub d2e: Vec<Vec<u32>>,
    pub error_costs: Vec<ErrorCost>,
}

impl DecoderContext {
    pub fn num_detectors(&self) -> usize {
        self.model.num_detectors
    }

    pub fn num_errors(&self) -> usize {
        self.model.errors.len()
    }
}

pub fn build_context(model: DetectorErrorModel) -> DecoderContext {
    let error_costs: Vec<ErrorCost> = model
        .errors
        .iter()
        .map(|e| ErrorCost {
            likelihood_cost: e.likelihood_cost,
            min_cost: e.likelihood_cost / e.detectors.len() as f64,
        })
        .collect();

    let mut d2e: Vec<Vec<u32>> = vec![Vec::new(); model.num_detectors];
    for e in &model.errors {
        for &d in &e.detectors {
            d2e[d as usize].push(e.index as u32);
        }
    }
    for list in &mut d2e {
        list.sort_by(|&a, &b| {
            error_costs[a as usize]
                .min_cost
                .total_cmp(&error_costs[b as usize].min_cost)
                .then(a.cmp(&b))
        });
    }

    DecoderContext { model, d2e, error_costs }
}
