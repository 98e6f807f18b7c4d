//! Fidelity benchmark: a two-qubit layer of X and CNOT gates that returns
//! |00> without noise, repeated `depth` times.

use serde::{Deserialize, Serialize};

use super::machine::{machine, Compiled, LogicalMachine};
use super::Variant;
use crate::error::{Error, Result};
use crate::noise::NoiseSpec;
use crate::sim::trajectory::{parallel_fold, require_classical, run_shot, shot_rng};
use crate::sim::{Backend, BasisState};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkConfig {
    pub depth: usize,
    pub p: f64,
    pub shots: u64,
    pub variant: Variant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchmarkResult {
    pub variant: Variant,
    pub depth: usize,
    pub p: f64,
    pub shots: u64,
    /// Shots whose decoded output is |00>.
    pub hits: u64,
    pub fidelity: f64,
    pub stderr: f64,
}

/// One layer: X₁, CNOT₁→₂, X₂, CNOT₂→₁, X₁, CNOT₁→₂ (identity on |00>).
pub fn layer(m: &mut dyn LogicalMachine) -> Result<()> {
    m.x(0)?;
    m.cnot(0, 1)?;
    m.x(1)?;
    m.cnot(1, 0)?;
    m.x(0)?;
    m.cnot(0, 1)
}

pub fn benchmark_circuit(variant: Variant, depth: usize) -> Result<Compiled> {
    if depth == 0 {
        return Err(Error::Parse("benchmark depth must be at least 1".into()));
    }
    let mut m = machine(variant, 2)?;
    for _ in 0..depth {
        layer(m.as_mut())?;
        if variant == Variant::EncodedEc {
            m.ec(0)?;
            m.ec(1)?;
        }
    }
    m.checkpoint();
    Ok(m.finish())
}

/// Run the benchmark with bit-flip noise `p`. The circuit is classical, so
/// each trajectory is a single basis state.
pub fn run_benchmark(cfg: &BenchmarkConfig, seed: u64) -> Result<BenchmarkResult> {
    if cfg.shots == 0 {
        return Err(Error::Parse("benchmark needs at least one shot".into()));
    }
    let noise = NoiseSpec::bit_flip(cfg.p)?;
    let comp = benchmark_circuit(cfg.variant, cfg.depth)?;
    require_classical(&comp.circuit)?;
    let n = comp.circuit.n_qubits();
    let hits = parallel_fold(
        cfg.shots,
        || 0u64,
        |shot, acc| {
            let mut st = BasisState::zero(n);
            let mut rng = shot_rng(seed, shot);
            run_shot(&comp.circuit, &noise, &mut st, &mut rng, |_, _, _| {});
            if comp.decode_basis(0, st.bits()) == 0 {
                *acc += 1;
            }
            debug_assert_eq!(st.n_qubits(), n);
        },
        |a, b| *a += b,
    );
    let f = hits as f64 / cfg.shots as f64;
    Ok(BenchmarkResult {
        variant: cfg.variant,
        depth: cfg.depth,
        p: cfg.p,
        shots: cfg.shots,
        hits,
        fidelity: f,
        stderr: (f * (1.0 - f) / cfg.shots as f64).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noiseless_fidelity_is_one() {
        for v in Variant::ALL {
            for d in [1, 3, 8] {
                let r = run_benchmark(&BenchmarkConfig { depth: d, p: 0.0, shots: 200, variant: v }, 1).unwrap();
                assert_eq!(r.fidelity, 1.0, "{v} d={d}");
            }
        }
    }

    #[test]
    fn reproducible_and_thread_independent() {
        let cfg = BenchmarkConfig { depth: 4, p: 0.02, shots: 3000, variant: Variant::Encoded };
        let a = run_benchmark(&cfg, 11).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| run_benchmark(&cfg, 11).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn bare_single_layer_matches_exact_probability() {
        // six noisy locations per layer on a classical circuit: enumerate
        // all 2^9 wire-fault patterns exactly
        let p: f64 = 0.05;
        let comp = benchmark_circuit(Variant::Bare, 1).unwrap();
        let sites = comp.circuit.fault_sites(false);
        assert_eq!(sites.len(), 9);
        let mut exact = 0.0;
        for mask in 0u32..1 << sites.len() {
            let mut st = BasisState::zero(2);
            for (idx, ins) in comp.circuit.instructions().iter().enumerate() {
                if let crate::circuit::Instruction::Gate(g) = ins {
                    st.gate(g);
                    for (k, s) in sites.iter().enumerate() {
                        if s.instr == idx && mask >> k & 1 == 1 {
                            st.pauli(s.qubit, crate::pauli::Pauli::X);
                        }
                    }
                }
            }
            let w = p.powi(mask.count_ones() as i32) * (1.0 - p).powi((sites.len() as u32 - mask.count_ones()) as i32);
            if st.bits() == 0 {
                exact += w;
            }
        }
        let r = run_benchmark(&BenchmarkConfig { depth: 1, p, shots: 200_000, variant: Variant::Bare }, 5).unwrap();
        assert!((r.fidelity - exact).abs() < 5.0 * r.stderr.max(1e-4), "{} vs {exact}", r.fidelity);
    }
}
