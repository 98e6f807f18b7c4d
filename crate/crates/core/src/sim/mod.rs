//! Simulation backends.
//!
//! All backends implement [`Backend`], so the same circuit can run on a dense
//! state vector, a sparse amplitude list, a single classical basis state, or
//! (for verification) a density matrix.

mod basis;
mod density;
pub(crate) mod kernels;
mod sparse;
mod statevector;
pub mod trajectory;

pub use basis::BasisState;
pub use density::{evolve_branches, evolve_density, Branch, BranchRun, DensityMatrix, DENSITY_CAP};
pub use sparse::SparseState;
pub use statevector::StateVector;

use crate::gate::Gate;
use crate::noise::NoiseSpec;
use crate::pauli::Pauli;

/// Amplitude magnitudes below this are treated as exact zeros.
pub(crate) const ZERO_TOL: f64 = 1e-14;

pub trait Backend: Clone + Send {
    /// Whether the backend can represent classical mixtures (noise channels).
    const MIXED: bool = false;

    fn n_qubits(&self) -> usize;

    /// Apply a gate. Qubit indices are assumed validated by the circuit.
    fn gate(&mut self, g: &Gate);

    fn pauli(&mut self, q: usize, p: Pauli);

    /// Born probability of reading 1 on `q`.
    fn prob_one(&self, q: usize) -> f64;

    /// Project `q` onto `outcome` and renormalize. The outcome must have
    /// nonzero probability.
    fn collapse(&mut self, q: usize, outcome: bool);

    /// Expectation of an observable diagonal in the computational basis.
    fn expect_diagonal(&self, f: &dyn Fn(u64) -> f64) -> f64;

    /// Replace the state by the mixture of one-wire Pauli faults. Only
    /// meaningful when `MIXED` is true.
    fn wire_channel(&mut self, _q: usize, _noise: &NoiseSpec) {
        unimplemented!("pure-state backends cannot hold mixtures")
    }

    /// Trace-preserving reset to |0> that keeps no record. Only for mixed
    /// backends; pure backends measure and flip.
    fn reset_mixed(&mut self, _q: usize) {
        unimplemented!("pure-state backends reset by measurement")
    }

    /// Measure with a uniform `draw`: outcome 0 iff `draw < P(0)`.
    fn measure(&mut self, q: usize, draw: f64) -> bool {
        let p1 = self.prob_one(q);
        let bit = if p1 < ZERO_TOL {
            false
        } else if p1 > 1.0 - ZERO_TOL {
            true
        } else {
            draw >= 1.0 - p1
        };
        self.collapse(q, bit);
        bit
    }

    fn reset(&mut self, q: usize, draw: f64) {
        if self.measure(q, draw) {
            self.pauli(q, Pauli::X);
        }
    }
}
