//! VQE energy error as the noise leaks from pure bit flips toward
//! depolarizing (`ε`).

use serde::Serialize;

use super::vqe::{group_terms, vqe_energy, Estimator, Group, Observable, VqeConfig};
use super::Variant;
use crate::error::Result;
use crate::noise::NoiseSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub variant: Variant,
    pub epsilon: f64,
    pub energy: f64,
    pub stderr: f64,
    /// `|E − E_exact|`.
    pub abs_error: f64,
    pub accepted_shots: u64,
    pub raw_shots: u64,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub epsilons: Vec<f64>,
    pub p: f64,
    pub variants: Vec<Variant>,
    pub shots_per_group: u64,
    pub estimator: Estimator,
    pub theta: [f64; 4],
}

/// Evaluate every (ε, variant) pair. Each pair gets its own seed derived from
/// the master seed, so rows can be recomputed independently.
pub fn epsilon_sweep(obs: &Observable, grouping: &[Group], cfg: &SweepConfig, seed: u64) -> Result<Vec<SweepRow>> {
    let exact = obs.ground_energy();
    let mut rows = Vec::new();
    for (ei, &eps) in cfg.epsilons.iter().enumerate() {
        let noise = NoiseSpec::new(cfg.p, eps)?;
        for &variant in &cfg.variants {
            let vc = VqeConfig { variant, shots_per_group: cfg.shots_per_group, estimator: cfg.estimator };
            let s = seed.wrapping_add((ei as u64) << 32).wrapping_add(variant as u64);
            let e = vqe_energy(obs, grouping, &cfg.theta, &vc, &noise, s)?;
            rows.push(SweepRow {
                variant,
                epsilon: eps,
                energy: e.energy,
                stderr: e.stderr,
                abs_error: (e.energy - exact).abs(),
                accepted_shots: e.accepted_shots,
                raw_shots: e.raw_shots,
            });
        }
    }
    Ok(rows)
}

/// Convenience wrapper with the built-in grouping for `obs`.
pub fn default_groups(obs: &Observable) -> Result<Vec<Group>> {
    if *obs == Observable::caffeine() {
        group_terms(obs, &super::vqe::caffeine_grouping())
    } else {
        group_terms(obs, &super::vqe::greedy_grouping(obs))
    }
}
