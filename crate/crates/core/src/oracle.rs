//! Exhaustive reference decoder. Enumerates error subsets with cost-bounded
//! depth-first search, so it is exact but only usable on small models; the
//! A* decoder is validated against it.

use thiserror::Error;

use crate::context::DecoderContext;
use crate::search::{decode, DecodeStatus, DecoderConfig};
use crate::shots::Shot;

/// Hard cap on model size for [`exact_mle`]; subsets grow as 2^n.
pub const ORACLE_MAX_ERRORS: usize = 25;

/// Cost gap beyond which [`cross_check`] flags a row as a mismatch.
pub const COST_EPS: f64 = 1e-9;

const BOUND_EPS: f64 = 1e-12;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("model has {0} error mechanisms, exact search allows at most {ORACLE_MAX_ERRORS}")]
    TooLarge(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult {
    /// Minimum-cost subset, ascending; the lexicographically smallest list
    /// when several subsets tie within 1e-12. Empty when infeasible.
    pub best_subset: Vec<u32>,
    /// Infinite when no subset reproduces the syndrome.
    pub min_cost: f64,
    pub feasible: bool,
    /// XOR of observable flips over the subset; all zero when infeasible.
    pub predicted_observables: Vec<u8>,
}

struct Dfs<'a> {
    ctx: &'a DecoderContext,
    budget: usize,
    residual: Vec<u8>,
    chosen: Vec<u32>,
    best_cost: f64,
    best_set: Option<Vec<u32>>,
}

impl Dfs<'_> {
    /// Include-first recursion with a strict-improvement bound. Costs are
    /// strictly positive, so cost-equal subsets never nest; the first one
    /// visited in include-first order is the lexicographically smallest, and
    /// the bound keeps later ties from replacing it.
    fn go(&mut self, idx: usize, cost: f64) {
        if cost >= self.best_cost - BOUND_EPS {
            return;
        }
        if idx == self.ctx.num_errors() {
            if self.residual.iter().all(|&b| b == 0) {
                self.best_cost = cost;
                self.best_set = Some(self.chosen.clone());
            }
            return;
        }
        if self.chosen.len() < self.budget {
            let mech = &self.ctx.model.errors[idx];
            for &d in &mech.detectors {
                self.residual[d as usize] ^= 1;
            }
            self.chosen.push(idx as u32);
            self.go(idx + 1, cost + mech.likelihood_cost);
            self.chosen.pop();
            for &d in &mech.detectors {
                self.residual[d as usize] ^= 1;
            }
        }
        self.go(idx + 1, cost);
    }
}

/// Minimum-cost subset of at most `budget` errors (`None` for no cap) whose
/// detector flips XOR to `syndrome`.
pub fn exact_mle(
    ctx: &DecoderContext,
    syndrome: &[u8],
    budget: Option<usize>,
) -> Result<OracleResult, OracleError> {
    let ne = ctx.num_errors();
    if ne > ORACLE_MAX_ERRORS {
        return Err(OracleError::TooLarge(ne));
    }
    assert_eq!(syndrome.len(), ctx.num_detectors(), "syndrome width != detector count");

    let mut dfs = Dfs {
        ctx,
        budget: budget.unwrap_or(usize::MAX),
        residual: syndrome.to_vec(),
        chosen: Vec::new(),
        best_cost: f64::INFINITY,
        best_set: None,
    };
    dfs.go(0, 0.0);

    let mut predicted = vec![0u8; ctx.model.num_observables];
    match dfs.best_set {
        Some(set) => {
            for &ei in &set {
                for &o in &ctx.model.errors[ei as usize].observables {
                    predicted[o as usize] ^= 1;
                }
            }
            Ok(OracleResult {
                best_subset: set,
                min_cost: dfs.best_cost,
                feasible: true,
                predicted_observables: predicted,
            })
        }
        None => Ok(OracleResult {
            best_subset: Vec::new(),
            min_cost: f64::INFINITY,
            feasible: false,
            predicted_observables: predicted,
        }),
    }
}

#[derive(Debug, Clone)]
pub struct CrossCheckRow {
    pub shot: usize,
    pub decoder_status: DecodeStatus,
    pub decoder_cost: f64,
    pub oracle_feasible: bool,
    pub oracle_cost: f64,
    /// decoder_cost − oracle_cost; zero when both sides found nothing.
    pub gap: f64,
    /// Gap exceeds [`COST_EPS`] in magnitude, or exactly one side failed.
    /// Meaningful as a defect signal only for heuristics-off configs.
    pub mismatch: bool,
    /// Informational: predicted observables agree. Distinct minimum-cost
    /// subsets can flip different observables, so false here with a small
    /// gap is degeneracy, not a defect.
    pub obs_match: bool,
}

#[derive(Debug, Clone)]
pub struct CrossCheckReport {
    pub rows: Vec<CrossCheckRow>,
    pub mismatches: usize,
}

/// Decode each shot with `config` and compare against [`exact_mle`].
pub fn cross_check(
    ctx: &DecoderContext,
    config: &DecoderConfig,
    shots: &[Shot],
) -> Result<CrossCheckReport, OracleError> {
    let mut rows = Vec::with_capacity(shots.len());
    let mut mismatches = 0;
    for (i, shot) in shots.iter().enumerate() {
        let oracle = exact_mle(ctx, &shot.syndrome, None)?;
        let decoder = decode(ctx, &shot.syndrome, config);
        let gap = if decoder.cost.is_infinite() && oracle.min_cost.is_infinite() {
            0.0
        } else {
            decoder.cost - oracle.min_cost
        };
        let mismatch = !(gap.abs() <= COST_EPS);
        if mismatch {
            mismatches += 1;
        }
        rows.push(CrossCheckRow {
            shot: i,
            decoder_status: decoder.status,
            decoder_cost: decoder.cost,
            oracle_feasible: oracle.feasible,
            oracle_cost: oracle.min_cost,
            gap,
            mismatch,
            obs_match: decoder.predicted_observables == oracle.predicted_observables,
        });
    }
    Ok(CrossCheckReport { rows, mismatches })
}
