//! Synthetic detector error models at desk scale: a repetition-code-like
//! chain and a surface-code-like grid. Probabilities get a seeded ±10%
//! jitter per mechanism so cost ties stay rare; construction is fully
//! deterministic for fixed parameters.

use qmle_core::DetectorErrorModel;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SynthKind {
    Chain { n: usize },
    Grid { width: usize, height: usize },
}

pub fn make_synthetic_model(kind: SynthKind, p: f64, seed: u64) -> DetectorErrorModel {
    match kind {
        SynthKind::Chain { n } => chain_model(n, p, seed),
        SynthKind::Grid { width, height } => grid_model(width, height, p, seed),
    }
}

fn jitter(p: f64, rng: &mut ChaCha8Rng) -> f64 {
    let factor = 1.0 + 0.1 * (2.0 * rng.random::<f64>() - 1.0);
    (p * factor).clamp(1e-9, 0.49)
}

/// Chain with `n` detectors and `n + 1` errors: error i flips detectors
/// {i-1, i} clipped to range, so the endpoints flip a single detector. The
/// left boundary error carries observable 0, the way a logical operator
/// terminates on one boundary.
pub fn chain_model(n: usize, p: f64, seed: u64) -> DetectorErrorModel {
    assert!(n >= 1, "chain needs at least one detector");
    assert!(p > 0.0 && p < 0.5, "base probability must be in (0, 0.5)");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parts = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let detectors: Vec<u32> = [i.checked_sub(1), Some(i)]
            .into_iter()
            .flatten()
            .filter(|&d| d < n)
            .map(|d| d as u32)
            .collect();
        let observables = if i == 0 { vec![0] } else { Vec::new() };
        parts.push((jitter(p, &mut rng), detectors, observables));
    }
    DetectorErrorModel::from_parts(parts).expect("chain parts are valid by construction")
}

/// Grid of `width * height` detectors with 2-detector bulk errors along both
/// axes and single-detector boundary errors on the left and right columns;
/// left boundary errors carry observable 0.
pub fn grid_model(width: usize, height: usize, p: f64, seed: u64) -> DetectorErrorModel {
    assert!(width >= 1 && height >= 1, "grid needs positive dimensions");
    assert!(p > 0.0 && p < 0.5, "base probability must be in (0, 0.5)");
    let det = |r: usize, c: usize| (r * width + c) as u32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut parts = Vec::new();
    for r in 0..height {
        for c in 0..width - 1 {
            parts.push((jitter(p, &mut rng), vec![det(r, c), det(r, c + 1)], Vec::new()));
        }
    }
    for r in 0..height - 1 {
        for c in 0..width {
            parts.push((jitter(p, &mut rng), vec![det(r, c), det(r + 1, c)], Vec::new()));
        }
    }
    for r in 0..height {
        parts.push((jitter(p, &mut rng), vec![det(r, 0)], vec![0]));
    }
    for r in 0..height {
        parts.push((jitter(p, &mut rng), vec![det(r, width - 1)], Vec::new()));
    }
    DetectorErrorModel::from_parts(parts).expect("grid parts are valid by construction")
}
