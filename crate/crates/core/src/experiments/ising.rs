//! Trotterized transverse-field Ising dynamics on a periodic chain,
//! `H = Σ_i Z_i Z_{i+1} + h Σ_i X_i`, started from |0…0>.
//!
//! One Trotter step visits each site `i` in turn: `e^{−iδ Z_i Z_{i+1}}` as
//! CNOT(i→i+1), Rz(2δ) on `i+1`, CNOT(i→i+1), then `Rx(2hδ)` on `i`. For two
//! sites the bond is visited twice, once from each end.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::machine::{machine, Compiled};
use super::{Stats, Variant};
use crate::error::{Error, Result};
use crate::noise::NoiseSpec;
use crate::sim::trajectory::{parallel_fold, run_shot, shot_rng};
use crate::sim::{Backend, SparseState, StateVector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsingConfig {
    pub n_sites: usize,
    pub h: f64,
    pub delta: f64,
    pub n_trot: usize,
    pub shots: u64,
    pub variant: Variant,
}

impl IsingConfig {
    pub fn new(variant: Variant, n_trot: usize, shots: u64) -> Self {
        IsingConfig { n_sites: 2, h: 1.0, delta: 0.1, n_trot, shots, variant }
    }

    fn validate(&self) -> Result<()> {
        if self.delta <= 0.0 || !self.delta.is_finite() {
            return Err(Error::Parse(format!("Trotter step must be positive, got {}", self.delta)));
        }
        if self.n_sites < 2 {
            return Err(Error::UnsupportedChainLength(self.n_sites));
        }
        if self.variant.is_encoded() && self.n_sites != 2 {
            return Err(Error::UnsupportedChainLength(self.n_sites));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsingRow {
    pub step: usize,
    pub t: f64,
    /// Decoded `<Σ Z_i>` averaged over shots that survived to this step.
    pub m: f64,
    pub m_stderr: f64,
    /// Fraction of raw shots discarded by this step.
    pub discard_rate: f64,
    pub survivors: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsingResult {
    pub config: IsingConfig,
    pub rows: Vec<IsingRow>,
}

impl IsingResult {
    pub fn magnetization(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.m).collect()
    }
}

/// Trotter circuit with a checkpoint before the first step and after each
/// step (tags `0..=n_trot`).
pub fn trotter_circuit(cfg: &IsingConfig) -> Result<Compiled> {
    cfg.validate()?;
    let n = cfg.n_sites;
    let mut m = machine(cfg.variant, n)?;
    m.checkpoint();
    for _ in 0..cfg.n_trot {
        for i in 0..n {
            let j = (i + 1) % n;
            m.cnot(i, j)?;
            m.rz(j, 2.0 * cfg.delta)?;
            m.cnot(i, j)?;
            m.rx(i, 2.0 * cfg.h * cfg.delta)?;
        }
        m.checkpoint();
    }
    Ok(m.finish())
}

#[derive(Clone)]
struct Acc {
    per_step: Vec<Stats>,
}

fn simulate<B: Backend>(cfg: &IsingConfig, noise: &NoiseSpec, seed: u64, zero: impl Fn(usize) -> B + Sync) -> Result<Vec<Stats>> {
    let comp = trotter_circuit(cfg)?;
    let n = comp.circuit.n_qubits();
    let steps = cfg.n_trot + 1;
    let acc = parallel_fold(
        cfg.shots,
        || Acc { per_step: vec![Stats::default(); steps] },
        |shot, acc| {
            let mut st = zero(n);
            let mut rng = shot_rng(seed, shot);
            run_shot(&comp.circuit, noise, &mut st, &mut rng, |tag, s, _| {
                acc.per_step[tag].push(comp.decoded_z(tag, s).iter().sum());
            });
        },
        |a, b| a.per_step.iter_mut().zip(b.per_step).for_each(|(x, y)| x.merge(y)),
    );
    Ok(acc.per_step)
}

/// Run the dynamics. Each shot evolves through all steps; the magnetization
/// at a step is the exact decoded expectation of the trajectory's state,
/// averaged over trajectories not yet discarded.
pub fn run_ising(cfg: &IsingConfig, noise: &NoiseSpec, seed: u64) -> Result<IsingResult> {
    let stats = match cfg.variant {
        Variant::Bare => simulate(cfg, noise, seed, StateVector::zero)?,
        _ => simulate(cfg, noise, seed, SparseState::zero)?,
    };
    let rows = stats
        .iter()
        .enumerate()
        .map(|(step, s)| {
            let sum = s.summary();
            IsingRow {
                step,
                t: step as f64 * cfg.delta,
                m: sum.mean,
                m_stderr: sum.stderr,
                discard_rate: 1.0 - s.count() as f64 / cfg.shots as f64,
                survivors: s.count(),
            }
        })
        .collect();
    Ok(IsingResult { config: *cfg, rows })
}

/// `(1/N) Σ |a_i − b_i|`.
pub fn integrated_error(reference: &[f64], noisy: &[f64]) -> Result<f64> {
    if reference.len() != noisy.len() {
        return Err(Error::LengthMismatch(reference.len(), noisy.len()));
    }
    if reference.is_empty() {
        return Ok(0.0);
    }
    Ok(reference.iter().zip(noisy).map(|(a, b)| (a - b).abs()).sum::<f64>() / reference.len() as f64)
}

// ---------------------------------------------------------------------------
// dense reference

fn kron_site(n: usize, site: usize, op: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    // little-endian: qubit 0 is the least significant index bit
    let mut out = DMatrix::<Complex64>::identity(1, 1);
    for q in (0..n).rev() {
        let f = if q == site { op.clone() } else { DMatrix::identity(2, 2) };
        out = out.kronecker(&f);
    }
    out
}

fn pauli_x() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0].map(|v| Complex64::new(v, 0.0)))
}

fn pauli_z() -> DMatrix<Complex64> {
    DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0].map(|v| Complex64::new(v, 0.0)))
}

fn magnetization_of(n: usize, psi: &nalgebra::DVector<Complex64>) -> f64 {
    (0..psi.len())
        .map(|idx| {
            let z: f64 = (0..n).map(|q| if idx >> q & 1 == 1 { -1.0 } else { 1.0 }).sum();
            psi[idx].norm_sqr() * z
        })
        .sum()
}

/// One Trotter step as a dense matrix built from closed-form exponentials.
pub fn dense_step(n: usize, h: f64, delta: f64) -> DMatrix<Complex64> {
    let dim = 1 << n;
    let i = Complex64::new(0.0, 1.0);
    let mut u = DMatrix::<Complex64>::identity(dim, dim);
    for site in 0..n {
        let j = (site + 1) % n;
        let zz = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(dim, |idx, _| {
            let s = if (idx >> site & 1) ^ (idx >> j & 1) == 1 { -1.0 } else { 1.0 };
            (-i * delta * s).exp()
        }));
        let x = kron_site(n, site, &pauli_x());
        let rx = DMatrix::<Complex64>::identity(dim, dim) * Complex64::new((h * delta).cos(), 0.0) - x * (i * (h * delta).sin());
        u = rx * zz * u;
    }
    u
}

/// Trotterized magnetization series for steps `0..=n_trot` (dense oracle).
pub fn dense_trotter_series(n: usize, h: f64, delta: f64, n_trot: usize) -> Vec<f64> {
    let u = dense_step(n, h, delta);
    let mut psi = nalgebra::DVector::<Complex64>::zeros(1 << n);
    psi[0] = Complex64::new(1.0, 0.0);
    let mut out = vec![magnetization_of(n, &psi)];
    for _ in 0..n_trot {
        psi = &u * psi;
        out.push(magnetization_of(n, &psi));
    }
    out
}

/// Dense Hamiltonian of the Trotterized model: `Σ_i Z_i Z_{i+1} + h Σ_i X_i`
/// with periodic bonds (two sites: both bonds coincide, giving `2 Z₁Z₂`).
pub fn hamiltonian(n: usize, h: f64) -> DMatrix<f64> {
    let dim = 1 << n;
    let mut m = DMatrix::<f64>::zeros(dim, dim);
    for site in 0..n {
        let j = (site + 1) % n;
        let zz = kron_site(n, site, &pauli_z()) * kron_site(n, j, &pauli_z());
        m += zz.map(|c| c.re);
        m += kron_site(n, site, &pauli_x()).map(|c| c.re * h);
    }
    m
}

/// Exact `<Σ Z_i>` of `e^{−iHt}|0…0>` via eigendecomposition.
pub fn exact_magnetization(n: usize, h: f64, t: f64) -> f64 {
    let eig = SymmetricEigen::new(hamiltonian(n, h));
    let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let phases = eig.eigenvalues.map(|e| Complex64::from_polar(1.0, -e * t));
    // |ψ(t)> = V diag(phases) Vᵀ |0>
    let coeffs = nalgebra::DVector::from_fn(1 << n, |k, _| v[(0, k)] * phases[k]);
    let psi = &v * coeffs;
    magnetization_of(n, &psi)
}
