//! Variational ground-state energy of a two-qubit tapered molecular
//! Hamiltonian with the ansatz `Ry⊗Ry · CZ · Ry⊗Ry`.

use std::fmt;
use std::str::FromStr;

use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;
use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::machine::{machine, Compiled, LogicalMachine};
use super::{Stats, Variant};
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::noise::NoiseSpec;
use crate::pauli::{Pauli, PauliString};
use crate::sim::trajectory::{collect_accepted, run_shot, shot_rng};
use crate::sim::{Backend, SparseState, StateVector};

/// Real linear combination of Pauli strings plus a constant.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Observable {
    pub constant: f64,
    pub terms: Vec<(f64, PauliString)>,
}

/// Coefficients of the tapered two-qubit caffeine Hamiltonian (Hartree).
pub const CAFFEINE: &str = "\
-667.4554308557676 I
-0.013168856506009949 X0
+0.013168856506009949 X1
-0.1532273887412754 Z0
-0.1532273887412754 Z1
+0.013169112223348517 X0 Z1
-0.013169112223348517 Z0 X1
+0.025969183085931477 Z0 Z1
-0.050192647768994174 Y0 Y1
";

/// Ground energy of [`CAFFEINE`] to the quoted precision.
pub const CAFFEINE_EXACT: f64 = -667.7400;

impl Observable {
    pub fn caffeine() -> Self {
        CAFFEINE.parse().expect("built-in Hamiltonian parses")
    }

    pub fn n_qubits(&self) -> usize {
        self.terms.iter().filter_map(|(_, p)| p.max_qubit()).max().map_or(0, |q| q + 1)
    }

    /// Dense matrix (little-endian).
    pub fn matrix(&self, n: usize) -> DMatrix<Complex64> {
        let dim = 1usize << n;
        let mut m = DMatrix::<Complex64>::identity(dim, dim) * Complex64::new(self.constant, 0.0);
        for (c, p) in &self.terms {
            for col in 0..dim {
                let mut psi = StateVector::basis(n, col as u64);
                psi.apply_pauli_string(p).expect("qubits in range");
                for (row, a) in psi.amplitudes().iter().enumerate() {
                    m[(row, col)] += a * c;
                }
            }
        }
        m
    }

    /// Smallest eigenvalue by dense diagonalization.
    pub fn ground_energy(&self) -> f64 {
        let n = self.n_qubits().max(1);
        let eig = SymmetricEigen::new(self.matrix(n));
        eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `<ψ|O|ψ>`.
    pub fn expectation(&self, psi: &StateVector) -> Result<f64> {
        let mut e = self.constant;
        for (c, p) in &self.terms {
            e += c * psi.expectation_pauli(p)?;
        }
        Ok(e)
    }
}

impl FromStr for Observable {
    type Err = Error;

    /// One term per line: `coefficient pauli-string`; blank lines and `#`
    /// comments are skipped. Identity terms accumulate into the constant.
    fn from_str(s: &str) -> Result<Self> {
        let mut out = Observable { constant: 0.0, terms: Vec::new() };
        for (lineno, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (coef, rest) = line.split_once(char::is_whitespace).unwrap_or((line, "I"));
            let c: f64 =
                coef.parse().map_err(|_| Error::Parse(format!("line {}: bad coefficient {coef:?}", lineno + 1)))?;
            if !c.is_finite() {
                return Err(Error::Parse(format!("line {}: non-finite coefficient", lineno + 1)));
            }
            let p: PauliString = rest.parse().map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            let phase = p.phase();
            if !phase.is_real() {
                return Err(Error::NonHermitianObservable(rest.trim().to_string()));
            }
            let sign = phase.to_complex().re;
            let bare = p.with_phase(crate::pauli::Phase::PLUS_ONE);
            if bare.is_identity() {
                out.constant += sign * c;
            } else if let Some(t) = out.terms.iter_mut().find(|(_, q)| *q == bare) {
                t.0 += sign * c;
            } else {
                out.terms.push((sign * c, bare));
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:+} I", self.constant)?;
        for (c, p) in &self.terms {
            let s = p.to_string();
            writeln!(f, "{c:+} {}", s.trim_start_matches('+'))?;
        }
        Ok(())
    }
}

/// Terms measured together in one basis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Group {
    pub terms: Vec<(f64, PauliString)>,
    /// Measurement letter per qubit (`Z` where no term acts).
    pub basis: Vec<Pauli>,
}

impl Group {
    /// Value of the group's terms for a measured outcome (bit `q` of
    /// `outcome` is the reading of qubit `q`, 1 meaning eigenvalue −1).
    pub fn value(&self, outcome: usize) -> f64 {
        self.terms
            .iter()
            .map(|(c, p)| {
                let odd = p.support().filter(|&q| outcome >> q & 1 == 1).count() % 2 == 1;
                if odd {
                    -c
                } else {
                    *c
                }
            })
            .sum()
    }
}

/// Split the terms of `obs` into the groups listed in `spec`. Every term must
/// appear in exactly one group and groups must be qubit-wise compatible.
pub fn group_terms(obs: &Observable, spec: &[Vec<PauliString>]) -> Result<Vec<Group>> {
    let n = obs.n_qubits();
    let mut used = vec![false; obs.terms.len()];
    let mut groups = Vec::new();
    for members in spec {
        let mut terms = Vec::new();
        for m in members {
            let idx = obs
                .terms
                .iter()
                .position(|(_, p)| p == m)
                .ok_or_else(|| Error::Parse(format!("grouping names {m}, which is not a term")))?;
            if used[idx] {
                return Err(Error::Parse(format!("term {m} is in two groups")));
            }
            used[idx] = true;
            terms.push(obs.terms[idx].clone());
        }
        for (i, (_, a)) in terms.iter().enumerate() {
            for (_, b) in &terms[..i] {
                if !a.qubitwise_compatible(b) {
                    return Err(Error::IncompatibleGrouping(a.to_string(), b.to_string()));
                }
            }
        }
        let mut basis = vec![Pauli::Z; n];
        for (_, p) in &terms {
            for (q, l) in p.iter() {
                basis[q] = l;
            }
        }
        groups.push(Group { terms, basis });
    }
    if let Some(i) = used.iter().position(|u| !u) {
        return Err(Error::Parse(format!("term {} is not in any group", obs.terms[i].1)));
    }
    Ok(groups)
}

/// Greedy qubit-wise-compatible grouping in term order.
pub fn greedy_grouping(obs: &Observable) -> Vec<Vec<PauliString>> {
    let mut groups: Vec<Vec<PauliString>> = Vec::new();
    for (_, p) in &obs.terms {
        match groups.iter_mut().find(|g| g.iter().all(|q| q.qubitwise_compatible(p))) {
            Some(g) => g.push(p.clone()),
            None => groups.push(vec![p.clone()]),
        }
    }
    groups
}

/// The four fixed groups {Z0, Z1, Z0Z1}, {X0, X0Z1}, {X1, Z0X1}, {Y0Y1}.
pub fn caffeine_grouping() -> Vec<Vec<PauliString>> {
    let g = |xs: &[&str]| xs.iter().map(|s| s.parse().expect("valid literal")).collect();
    vec![g(&["Z0", "Z1", "Z0 Z1"]), g(&["X0", "X0 Z1"]), g(&["X1", "Z0 X1"]), g(&["Y0 Y1"])]
}

/// Append the ansatz `Ry(θ₁)⊗Ry(θ₂), CZ, Ry(θ₃)⊗Ry(θ₄)`.
pub fn ansatz(m: &mut dyn LogicalMachine, theta: &[f64; 4]) -> Result<()> {
    m.ry(0, theta[0])?;
    m.ry(1, theta[1])?;
    m.cz(0, 1)?;
    m.ry(0, theta[2])?;
    m.ry(1, theta[3])
}

/// Ideal ansatz state.
pub fn ansatz_state(theta: &[f64; 4]) -> StateVector {
    let mut psi = StateVector::zero(2);
    for g in [Gate::Ry(0, theta[0]), Gate::Ry(1, theta[1]), Gate::Cz(0, 1), Gate::Ry(0, theta[2]), Gate::Ry(1, theta[3])] {
        psi.apply_gate(&g).expect("two-qubit register");
    }
    psi
}

pub fn noiseless_energy(obs: &Observable, theta: &[f64; 4]) -> f64 {
    obs.expectation(&ansatz_state(theta)).expect("real observable")
}

struct EnergyCost<'a>(&'a Observable);

impl CostFunction for EnergyCost<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Vec<f64>) -> std::result::Result<f64, argmin::core::Error> {
        Ok(noiseless_energy(self.0, &[p[0], p[1], p[2], p[3]]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Optimum {
    pub theta: [f64; 4],
    pub energy: f64,
}

/// Nelder–Mead from one starting point.
pub fn optimize_from(obs: &Observable, start: [f64; 4], tolerance: f64) -> Result<Optimum> {
    let mut simplex = vec![start.to_vec()];
    for k in 0..4 {
        let mut v = start.to_vec();
        v[k] += 0.5;
        simplex.push(v);
    }
    let solver = NelderMead::new(simplex).with_sd_tolerance(tolerance).map_err(|e| Error::Parse(e.to_string()))?;
    let res = Executor::new(EnergyCost(obs), solver)
        .configure(|s| s.max_iters(5000))
        .run()
        .map_err(|e| Error::Parse(e.to_string()))?;
    let best = res.state().best_param.clone().unwrap_or_else(|| start.to_vec());
    let theta = [best[0], best[1], best[2], best[3]];
    Ok(Optimum { theta, energy: noiseless_energy(obs, &theta) })
}

/// Noiseless optimization with `restarts` random starting points; returns
/// the best optimum found.
pub fn optimize_ansatz(obs: &Observable, restarts: usize, seed: u64) -> Result<Optimum> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<Optimum> = None;
    for _ in 0..restarts.max(1) {
        let start = [(); 4].map(|_| rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
        let o = optimize_from(obs, start, 1e-13)?;
        if best.is_none_or(|b| o.energy < b.energy) {
            best = Some(o);
        }
    }
    Ok(best.expect("at least one restart"))
}

/// How a group expectation is estimated from an accepted trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// One decoded measurement outcome per shot.
    #[default]
    Sampled,
    /// The trajectory's exact decoded outcome distribution (lower variance).
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GroupEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub accepted: u64,
    pub raw: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VqeEnergy {
    pub variant: Variant,
    pub epsilon: f64,
    pub energy: f64,
    pub stderr: f64,
    pub accepted_shots: u64,
    pub raw_shots: u64,
    pub groups: Vec<GroupEstimate>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VqeConfig {
    pub variant: Variant,
    pub shots_per_group: u64,
    pub estimator: Estimator,
}

/// Circuit for one group: ansatz, basis change, checkpoint 0.
pub fn group_circuit(variant: Variant, theta: &[f64; 4], group: &Group) -> Result<Compiled> {
    let mut m = machine(variant, 2)?;
    ansatz(m.as_mut(), theta)?;
    for (q, l) in group.basis.iter().enumerate() {
        match l {
            Pauli::X => m.h(q)?,
            Pauli::Y => {
                m.sdg(q)?;
                m.h(q)?;
            }
            _ => {}
        }
    }
    m.checkpoint();
    Ok(m.finish())
}

fn sample(dist: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (k, p) in dist.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    dist.len() - 1
}

fn estimate_group<B: Backend>(
    comp: &Compiled,
    group: &Group,
    noise: &NoiseSpec,
    cfg: &VqeConfig,
    seed: u64,
    zero: impl Fn(usize) -> B + Sync,
) -> GroupEstimate {
    let n = comp.circuit.n_qubits();
    let max_raw = cfg.shots_per_group.saturating_mul(50).saturating_add(10_000);
    let (values, raw) = collect_accepted(cfg.shots_per_group, max_raw, |shot| {
        let mut st = zero(n);
        let mut rng = shot_rng(seed, shot);
        let mut dist = Vec::new();
        let r = run_shot(&comp.circuit, noise, &mut st, &mut rng, |tag, s, _| dist = comp.decoded_distribution(tag, s));
        if !r.accepted {
            return None;
        }
        Some(match cfg.estimator {
            Estimator::Sampled => group.value(sample(&dist, rng.gen())),
            Estimator::Exact => dist.iter().enumerate().map(|(k, p)| p * group.value(k)).sum(),
        })
    });
    let mut s = Stats::default();
    values.iter().for_each(|&v| s.push(v));
    let sum = s.summary();
    GroupEstimate { mean: sum.mean, stderr: sum.stderr, accepted: values.len() as u64, raw }
}

/// Estimate the energy at `theta` under `noise`. Each group is estimated from
/// `shots_per_group` accepted shots; discarded shots are re-drawn.
pub fn vqe_energy(
    obs: &Observable,
    groups: &[Group],
    theta: &[f64; 4],
    cfg: &VqeConfig,
    noise: &NoiseSpec,
    seed: u64,
) -> Result<VqeEnergy> {
    if obs.n_qubits() > 2 {
        return Err(Error::DimensionMismatch { left: 2, right: obs.n_qubits() });
    }
    let mut energy = obs.constant;
    let mut var = 0.0;
    let mut estimates = Vec::new();
    for (gi, g) in groups.iter().enumerate() {
        let comp = group_circuit(cfg.variant, theta, g)?;
        let gseed = seed ^ (0x9e37_79b9_7f4a_7c15u64.wrapping_mul(gi as u64 + 1));
        let est = match cfg.variant {
            Variant::Bare => estimate_group(&comp, g, noise, cfg, gseed, StateVector::zero),
            _ => estimate_group(&comp, g, noise, cfg, gseed, SparseState::zero),
        };
        if est.accepted < cfg.shots_per_group {
            return Err(Error::ZeroAcceptance);
        }
        energy += est.mean;
        var += est.stderr * est.stderr;
        estimates.push(est);
    }
    Ok(VqeEnergy {
        variant: cfg.variant,
        epsilon: noise.epsilon(),
        energy,
        stderr: var.sqrt(),
        accepted_shots: estimates.iter().map(|e| e.accepted).sum(),
        raw_shots: estimates.iter().map(|e| e.raw).sum(),
        groups: estimates,
    })
}
