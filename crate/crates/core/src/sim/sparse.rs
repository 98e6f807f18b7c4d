use num_complex::Complex64;

use super::{Backend, ZERO_TOL};
use crate::gate::Gate;
use crate::pauli::Pauli;

/// Pure state stored as a list of nonzero amplitudes.
///
/// Encoded repetition-code states have a handful of nonzero amplitudes no
/// matter how many physical qubits they span, so this beats a dense vector
/// by orders of magnitude on the encoded experiments. Indices are kept unique;
/// order is arbitrary.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseState {
    n_qubits: usize,
    entries: Vec<(u64, Complex64)>,
    scratch: Vec<(u64, Complex64)>,
}

fn i() -> Complex64 {
    Complex64::new(0.0, 1.0)
}

impl SparseState {
    pub fn zero(n_qubits: usize) -> Self {
        assert!(n_qubits <= 64);
        SparseState { n_qubits, entries: vec![(0, Complex64::new(1.0, 0.0))], scratch: Vec::new() }
    }

    pub fn support_size(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[(u64, Complex64)] {
        &self.entries
    }

    /// Dense copy (for tests and small registers).
    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); 1 << self.n_qubits];
        for &(k, a) in &self.entries {
            v[k as usize] = a;
        }
        v
    }

    fn phase_if(&mut self, mask: u64, want: u64, factor: Complex64) {
        for (k, a) in self.entries.iter_mut() {
            if *k & mask == want {
                *a *= factor;
            }
        }
    }

    fn dense_1q(&mut self, q: usize, g: &Gate) {
        let m = g.matrix().expect("single-qubit gate");
        let bit = 1u64 << q;
        self.scratch.clear();
        for &(k, a) in &self.entries {
            let b = ((k >> q) & 1) as usize;
            let k0 = k & !bit;
            self.scratch.push((k0, m[0][b] * a));
            self.scratch.push((k0 | bit, m[1][b] * a));
        }
        self.scratch.sort_unstable_by_key(|e| e.0);
        self.entries.clear();
        let mut it = self.scratch.iter().copied().peekable();
        while let Some((k, mut a)) = it.next() {
            while let Some(&(k2, a2)) = it.peek() {
                if k2 != k {
                    break;
                }
                a += a2;
                it.next();
            }
            if a.norm_sqr() > ZERO_TOL * ZERO_TOL {
                self.entries.push((k, a));
            }
        }
    }
}

impl Backend for SparseState {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn gate(&mut self, g: &Gate) {
        match *g {
            Gate::I(_) => {}
            Gate::X(q) => self.pauli(q, Pauli::X),
            Gate::Y(q) => self.pauli(q, Pauli::Y),
            Gate::Z(q) => self.pauli(q, Pauli::Z),
            Gate::S(q) => self.phase_if(1 << q, 1 << q, i()),
            Gate::Sdg(q) => self.phase_if(1 << q, 1 << q, -i()),
            Gate::Rz(q, t) => {
                let lo = Complex64::from_polar(1.0, -t / 2.0);
                let hi = Complex64::from_polar(1.0, t / 2.0);
                for (k, a) in self.entries.iter_mut() {
                    *a *= if (*k >> q) & 1 == 1 { hi } else { lo };
                }
            }
            Gate::Cnot { control, target } => {
                for (k, _) in self.entries.iter_mut() {
                    if (*k >> control) & 1 == 1 {
                        *k ^= 1 << target;
                    }
                }
            }
            Gate::Cz(a, b) => {
                let m = (1u64 << a) | (1u64 << b);
                self.phase_if(m, m, Complex64::new(-1.0, 0.0));
            }
            Gate::H(q) | Gate::Rx(q, _) | Gate::Ry(q, _) => self.dense_1q(q, g),
        }
    }

    fn pauli(&mut self, q: usize, p: Pauli) {
        let bit = 1u64 << q;
        match p {
            Pauli::I => {}
            Pauli::X => self.entries.iter_mut().for_each(|(k, _)| *k ^= bit),
            Pauli::Z => self.phase_if(bit, bit, Complex64::new(-1.0, 0.0)),
            Pauli::Y => {
                // Y|0> = i|1>, Y|1> = -i|0>
                for (k, a) in self.entries.iter_mut() {
                    *a *= if *k & bit == 0 { i() } else { -i() };
                    *k ^= bit;
                }
            }
        }
    }

    fn prob_one(&self, q: usize) -> f64 {
        self.entries.iter().filter(|(k, _)| (k >> q) & 1 == 1).map(|(_, a)| a.norm_sqr()).sum()
    }

    fn collapse(&mut self, q: usize, outcome: bool) {
        self.entries.retain(|(k, _)| ((k >> q) & 1 == 1) == outcome);
        let norm: f64 = self.entries.iter().map(|(_, a)| a.norm_sqr()).sum();
        debug_assert!(norm > ZERO_TOL, "collapse onto a zero-probability outcome");
        let s = 1.0 / norm.sqrt();
        self.entries.iter_mut().for_each(|(_, a)| *a *= s);
    }

    fn expect_diagonal(&self, f: &dyn Fn(u64) -> f64) -> f64 {
        self.entries.iter().map(|&(k, a)| a.norm_sqr() * f(k)).sum()
    }
}
