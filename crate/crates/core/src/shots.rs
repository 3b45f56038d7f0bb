//! Shot sampling and the line-per-shot '0'/'1' stream formats.
//!
//! Sampling uses ChaCha8 (`rand_chacha`), a counter-based stream cipher RNG
//! with a stable cross-platform output sequence, seeded via `seed_from_u64`,
//! so a (model, count, seed) triple reproduces bit-identical shots anywhere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::dem::DetectorErrorModel;
use crate::search::DecodeResult;

#[derive(Debug, Error)]
pub enum ShotError {
    #[error("line {line}: expected {want} bits, got {got}")]
    BadLength { line: usize, want: usize, got: usize },
    #[error("line {line}, column {col}: `{ch}` is not '0' or '1'")]
    BadChar { line: usize, col: usize, ch: char },
}

/// One sampled or loaded shot. `injected_errors` is present only for sampled
/// shots; loaded syndromes carry no ground truth.
#[derive(Debug, Clone, PartialEq)]
pub struct Shot {
    pub syndrome: Vec<u8>,
    pub true_observables: Vec<u8>,
    pub injected_errors: Option<Vec<u32>>,
}

pub fn sample_shots(model: &DetectorErrorModel, count: usize, seed: u64) -> Vec<Shot> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shots = Vec::with_capacity(count);
    for _ in 0..count {
        let mut syndrome = vec![0u8; model.num_detectors];
        let mut observables = vec![0u8; model.num_observables];
        let mut injected = Vec::new();
        for e in &model.errors {
            if rng.random::<f64>() < e.probability {
                injected.push(e.index as u32);
                for &d in &e.detectors {
                    syndrome[d as usize] ^= 1;
                }
                for &o in &e.observables {
                    observables[o as usize] ^= 1;
                }
            }
        }
        shots.push(Shot {
            syndrome,
            true_observables: observables,
            injected_errors: Some(injected),
        });
    }
    shots
}

/// Parses fixed-width rows of '0'/'1' characters, one row per line.
/// A trailing carriage return per line is tolerated; anything else is not.
pub fn read_bit_rows(text: &str, width: usize) -> Result<Vec<Vec<u8>>, ShotError> {
    let mut rows = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let row_text = raw.strip_suffix('\r').unwrap_or(raw);
        let mut row = Vec::with_capacity(width);
        for (pos, ch) in row_text.chars().enumerate() {
            match ch {
                '0' => row.push(0),
                '1' => row.push(1),
                _ => return Err(ShotError::BadChar { line, col: pos + 1, ch }),
            }
        }
        if row.len() != width {
            return Err(ShotError::BadLength { line, want: width, got: row.len() });
        }
        rows.push(row);
    }
    Ok(rows)
}

pub fn write_bit_rows<'a, I>(rows: I) -> String
where
    I: IntoIterator<Item = &'a [u8]>,
{
    let mut out = String::new();
    for row in rows {
        for &b in row {
            out.push(if b != 0 { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}

pub fn read_shots(text: &str, num_detectors: usize) -> Result<Vec<Shot>, ShotError> {
    Ok(read_bit_rows(text, num_detectors)?
        .into_iter()
        .map(|syndrome| Shot { syndrome, true_observables: Vec::new(), injected_errors: None })
        .collect())
}

/// One line of predicted observable bits per decode result, in input order.
pub fn write_predictions(results: &[DecodeResult]) -> String {
    write_bit_rows(results.iter().map(|r| r.predicted_observables.as_slice()))
}
