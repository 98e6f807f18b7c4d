use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{kernels, Backend, StateVector, ZERO_TOL};
use crate::circuit::{Circuit, FaultSite, Instruction};
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::noise::NoiseSpec;
use crate::pauli::Pauli;

/// Largest register the density-matrix evolver accepts (4^12 entries).
pub const DENSITY_CAP: usize = 12;

/// Density matrix stored as a flat buffer with index `row * dim + col`, so the
/// column (ket-conjugate) index occupies the low `n` bits and the row index the
/// high `n` bits. Unitaries act on the row bits and their conjugates on the
/// column bits, reusing the state-vector kernels.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    data: Vec<Complex64>,
}

impl DensityMatrix {
    pub fn zero(n_qubits: usize) -> Result<Self> {
        if n_qubits > DENSITY_CAP {
            return Err(Error::CapacityExceeded { requested: n_qubits, cap: DENSITY_CAP });
        }
        let mut data = vec![Complex64::new(0.0, 0.0); 1 << (2 * n_qubits)];
        data[0] = Complex64::new(1.0, 0.0);
        Ok(DensityMatrix { n_qubits, data })
    }

    pub fn from_pure(psi: &StateVector) -> Result<Self> {
        let n = psi.n_qubits();
        let mut rho = Self::zero(n)?;
        let a = psi.amplitudes();
        let dim = a.len();
        for r in 0..dim {
            for c in 0..dim {
                rho.data[r * dim + c] = a[r] * a[c].conj();
            }
        }
        Ok(rho)
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn entry(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.dim() + c]
    }

    pub fn trace(&self) -> f64 {
        let d = self.dim();
        (0..d).map(|i| self.data[i * d + i].re).sum()
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|x| *x *= s);
    }

    pub fn add_assign(&mut self, other: &DensityMatrix) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        if g.max_qubit() >= self.n_qubits {
            return Err(Error::QubitOutOfRange { index: g.max_qubit(), n_qubits: self.n_qubits });
        }
        self.conjugate_gate(g);
        Ok(())
    }

    fn conjugate_gate(&mut self, g: &Gate) {
        kernels::apply_gate(&mut self.data, g, self.n_qubits, false);
        kernels::apply_gate(&mut self.data, g, 0, true);
    }

    fn conjugate_pauli(&mut self, q: usize, p: Pauli) {
        kernels::apply_pauli(&mut self.data, q + self.n_qubits, p, false);
        kernels::apply_pauli(&mut self.data, q, p, true);
    }

    /// `ρ → (1-w)ρ + w PρP`.
    fn mix_pauli(&mut self, q: usize, p: Pauli, w: f64) {
        if w == 0.0 {
            return;
        }
        let mut other = self.clone();
        other.conjugate_pauli(q, p);
        self.scale(1.0 - w);
        other.scale(w);
        self.add_assign(&other);
    }

    /// Single-qubit channel of `noise` on wire `q`.
    fn apply_wire_channel(&mut self, q: usize, noise: &NoiseSpec) {
        let p = noise.p();
        if p == 0.0 {
            return;
        }
        let e = noise.epsilon();
        let mut acc = self.clone();
        acc.scale(1.0 - p);
        for (w, l) in [(p * (1.0 - e), Pauli::X), (p * e / 2.0, Pauli::Y), (p * e / 2.0, Pauli::Z)] {
            if w > 0.0 {
                let mut t = self.clone();
                t.conjugate_pauli(q, l);
                t.scale(w);
                acc.add_assign(&t);
            }
        }
        *self = acc;
    }

    /// Unnormalized projection onto outcome `bit` of qubit `q`.
    fn project(&mut self, q: usize, bit: bool) {
        let n = self.n_qubits;
        let (rm, cm) = (1usize << (q + n), 1usize << q);
        for (i, x) in self.data.iter_mut().enumerate() {
            if (i & rm != 0) != bit || (i & cm != 0) != bit {
                *x = Complex64::new(0.0, 0.0);
            }
        }
    }

    fn reset_qubit(&mut self, q: usize) {
        let mut one = self.clone();
        one.project(q, true);
        one.conjugate_pauli(q, Pauli::X);
        self.project(q, false);
        self.add_assign(&one);
    }

    /// Reduced state on `keep` (new qubit `i` is old qubit `keep[i]`).
    pub fn reduce(&self, keep: &[usize]) -> DensityMatrix {
        let n = self.n_qubits;
        let k = keep.len();
        let kept_mask: usize = keep.iter().map(|q| 1usize << q).sum();
        let traced = (self.dim() - 1) & !kept_mask;
        let spread = |small: usize| -> usize {
            keep.iter().enumerate().filter(|(i, _)| (small >> i) & 1 == 1).map(|(_, q)| 1usize << q).sum()
        };
        let big: Vec<usize> = (0..1usize << k).map(spread).collect();
        let mut out = DensityMatrix { n_qubits: k, data: vec![Complex64::new(0.0, 0.0); 1 << (2 * k)] };
        let dim = self.dim();
        let mut env = 0usize;
        loop {
            for (sr, &br) in big.iter().enumerate() {
                for (sc, &bc) in big.iter().enumerate() {
                    out.data[(sr << k) | sc] += self.data[(br | env) * dim + (bc | env)];
                }
            }
            // next subset of the traced qubits
            if env == traced {
                break;
            }
            env = (env.wrapping_sub(traced)) & traced;
        }
        debug_assert!(n >= k);
        out
    }

    /// `<ψ|ρ|ψ>`.
    pub fn fidelity_pure(&self, psi: &StateVector) -> Result<f64> {
        if psi.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch { left: self.n_qubits, right: psi.n_qubits() });
        }
        let a = psi.amplitudes();
        let d = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..d {
            if a[r].norm_sqr() == 0.0 {
                continue;
            }
            for c in 0..d {
                acc += a[r].conj() * self.data[r * d + c] * a[c];
            }
        }
        Ok(acc.re)
    }

    /// `Tr(ρσ)`; equals the fidelity when either state is pure.
    pub fn overlap(&self, other: &DensityMatrix) -> Result<f64> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch { left: self.n_qubits, right: other.n_qubits });
        }
        let d = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..d {
            for c in 0..d {
                acc += self.data[r * d + c] * other.data[c * d + r];
            }
        }
        Ok(acc.re)
    }

    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..d {
            for c in 0..d {
                worst = worst.max((self.data[r * d + c] - self.data[c * d + r].conj()).norm());
            }
        }
        worst
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let d = self.dim();
        let m = DMatrix::from_fn(d, d, |r, c| self.data[r * d + c]);
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        h.symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl Backend for DensityMatrix {
    const MIXED: bool = true;

    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn gate(&mut self, g: &Gate) {
        self.conjugate_gate(g);
    }

    fn pauli(&mut self, q: usize, p: Pauli) {
        self.conjugate_pauli(q, p);
    }

    fn prob_one(&self, q: usize) -> f64 {
        let d = self.dim();
        let ones: f64 = (0..d).filter(|i| (i >> q) & 1 == 1).map(|i| self.data[i * d + i].re).sum();
        ones / self.trace()
    }

    fn collapse(&mut self, q: usize, outcome: bool) {
        self.project(q, outcome);
        let t = self.trace();
        self.scale(1.0 / t);
    }

    fn expect_diagonal(&self, f: &dyn Fn(u64) -> f64) -> f64 {
        let d = self.dim();
        (0..d).map(|i| self.data[i * d + i].re * f(i as u64)).sum::<f64>() / self.trace()
    }

    fn wire_channel(&mut self, q: usize, noise: &NoiseSpec) {
        self.apply_wire_channel(q, noise);
    }

    fn reset_mixed(&mut self, q: usize) {
        self.reset_qubit(q);
    }

    fn reset(&mut self, q: usize, _draw: f64) {
        self.reset_qubit(q);
    }
}

/// One classical history of a circuit run. `rho` is unnormalized: its trace is
/// the probability of this history.
#[derive(Debug, Clone)]
pub struct Branch {
    pub rho: DensityMatrix,
    pub record: Vec<bool>,
}

impl Branch {
    pub fn probability(&self) -> f64 {
        self.rho.trace()
    }
}

#[derive(Debug, Clone)]
pub struct BranchRun {
    pub accepted: Vec<Branch>,
    /// Total probability removed by postselection.
    pub rejected: f64,
}

/// Exact evolution of `rho0` through `circuit`, splitting on every
/// measurement outcome. `noise` is applied after every gate; `fault`
/// additionally inserts a Pauli right after the instruction of a site (only if
/// that instruction executes). With `honor_postselect = false` the
/// postselection checkpoints are ignored.
pub fn evolve_branches(
    circuit: &Circuit,
    rho0: DensityMatrix,
    noise: &NoiseSpec,
    fault: Option<(FaultSite, Pauli)>,
    honor_postselect: bool,
) -> Result<BranchRun> {
    if circuit.n_qubits() != rho0.n_qubits {
        return Err(Error::DimensionMismatch { left: circuit.n_qubits(), right: rho0.n_qubits });
    }
    let mut branches = vec![Branch { rho: rho0, record: vec![false; circuit.n_bits()] }];
    let mut rejected = 0.0;
    for (idx, ins) in circuit.instructions().iter().enumerate() {
        let inject = |b: &mut Branch| {
            if let Some((site, p)) = fault {
                if site.instr == idx {
                    b.rho.conjugate_pauli(site.qubit, p);
                }
            }
        };
        match ins {
            Instruction::Gate(g) => {
                for b in branches.iter_mut() {
                    b.rho.conjugate_gate(g);
                    for q in g.qubits().to_vec() {
                        b.rho.apply_wire_channel(q, noise);
                    }
                    inject(b);
                }
            }
            Instruction::Conditional { gate, cond } => {
                for b in branches.iter_mut() {
                    if cond.eval(&b.record) {
                        b.rho.conjugate_gate(gate);
                        for q in gate.qubits().to_vec() {
                            b.rho.apply_wire_channel(q, noise);
                        }
                        inject(b);
                    }
                }
            }
            Instruction::Reset(q) => {
                for b in branches.iter_mut() {
                    b.rho.reset_qubit(*q);
                    if noise.noisy_prep() {
                        b.rho.mix_pauli(*q, Pauli::X, noise.p());
                    }
                    inject(b);
                }
            }
            Instruction::Measure { qubit, bit } => {
                let mut next = Vec::with_capacity(branches.len() * 2);
                for mut b in branches.drain(..) {
                    let mut one = b.clone();
                    one.rho.project(*qubit, true);
                    one.record[*bit] = true;
                    b.rho.project(*qubit, false);
                    for cand in [b, one] {
                        if cand.probability() > ZERO_TOL {
                            next.push(cand);
                        }
                    }
                }
                branches = next;
            }
            Instruction::Postselect { reject } => {
                if honor_postselect {
                    branches.retain(|b| {
                        let r = reject.eval(&b.record);
                        if r {
                            rejected += b.probability();
                        }
                        !r
                    });
                }
            }
            Instruction::Checkpoint(_) => {}
        }
    }
    Ok(BranchRun { accepted: branches, rejected })
}

/// Evolve with noise and return the normalized accepted state together with
/// the acceptance probability.
pub fn evolve_density(rho: DensityMatrix, circuit: &Circuit, noise: &NoiseSpec) -> Result<(DensityMatrix, f64)> {
    let run = evolve_branches(circuit, rho, noise, None, true)?;
    let mut iter = run.accepted.into_iter();
    let mut total = match iter.next() {
        Some(b) => b.rho,
        None => return Err(Error::ZeroAcceptance),
    };
    for b in iter {
        total.add_assign(&b.rho);
    }
    let acc = total.trace();
    if acc <= ZERO_TOL {
        return Err(Error::ZeroAcceptance);
    }
    total.scale(1.0 / acc);
    Ok((total, acc))
}
