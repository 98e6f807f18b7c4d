use super::Backend;
use crate::gate::Gate;
use crate::pauli::Pauli;

/// A single computational basis state, up to global phase.
///
/// Exact for circuits whose gates all map basis states to basis states
/// (see [`Gate::is_classical`]); the trajectory runner checks this before
/// selecting the backend.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BasisState {
    n_qubits: usize,
    bits: u64,
}

impl BasisState {
    pub fn zero(n_qubits: usize) -> Self {
        assert!(n_qubits <= 64);
        BasisState { n_qubits, bits: 0 }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }
}

impl Backend for BasisState {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    #[inline]
    fn gate(&mut self, g: &Gate) {
        match *g {
            Gate::X(q) | Gate::Y(q) => self.bits ^= 1 << q,
            Gate::Cnot { control, target } => self.bits ^= ((self.bits >> control) & 1) << target,
            Gate::I(_) | Gate::Z(_) | Gate::S(_) | Gate::Sdg(_) | Gate::Rz(..) | Gate::Cz(..) => {}
            Gate::H(_) | Gate::Rx(..) | Gate::Ry(..) => panic!("{g} is not a classical gate"),
        }
    }

    #[inline]
    fn pauli(&mut self, q: usize, p: Pauli) {
        if matches!(p, Pauli::X | Pauli::Y) {
            self.bits ^= 1 << q;
        }
    }

    fn prob_one(&self, q: usize) -> f64 {
        ((self.bits >> q) & 1) as f64
    }

    fn collapse(&mut self, q: usize, outcome: bool) {
        debug_assert_eq!((self.bits >> q) & 1 == 1, outcome);
    }

    fn expect_diagonal(&self, f: &dyn Fn(u64) -> f64) -> f64 {
        f(self.bits)
    }

    #[inline]
    fn measure(&mut self, q: usize, _draw: f64) -> bool {
        (self.bits >> q) & 1 == 1
    }

    #[inline]
    fn reset(&mut self, q: usize, _draw: f64) {
        self.bits &= !(1 << q);
    }
}
