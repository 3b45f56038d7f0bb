//! Most-likely-error decoding for quantum LDPC codes.
//!
//! Pipeline: parse a detector error model ([`dem`]), precompute adjacency and
//! cost tables ([`context`]), then run the A* decoder ([`search`]) on
//! syndromes, e.g. ones sampled with [`shots`]. [`oracle`] holds a
//! brute-force reference decoder for small models.

pub mod context;
pub mod dem;
pub mod oracle;
pub mod search;
pub mod shots;

pub use context::{build_context, DecoderContext, ErrorCost};
pub use dem::{
    likelihood_cost, parse_dem, parse_dem_verbose, serialize_dem, DemError, DetectorErrorModel,
    ErrorMechanism, ParseWarning,
};
pub use oracle::{
    cross_check, exact_mle, CrossCheckReport, CrossCheckRow, OracleError, OracleResult,
    COST_EPS, ORACLE_MAX_ERRORS,
};
pub use search::{
    build_detector_cost_tuples, decode, decode_traced, expand, get_detcost_baseline,
    get_detcost_baseline_counted, get_detcost_optimized, get_detcost_optimized_counted, heuristic,
    predict_observables, syndrome_fingerprint, DecodeResult, DecodeStatus, DecodeTrace,
    DecoderConfig, DetectorCostTuple, OptLevel, PackedBits, SearchNode, SearchStats,
};
pub use shots::{
    read_bit_rows, read_shots, sample_shots, write_bit_rows, write_predictions, Shot, ShotError,
};
