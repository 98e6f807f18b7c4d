use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Elementary gates. Rotations follow `R_P(θ) = exp(-iθP/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Gate {
    /// Identity. Still a noise location, which is how idle/input fault
    /// locations are placed on a wire.
    I(usize),
    X(usize),
    Y(usize),
    Z(usize),
    H(usize),
    S(usize),
    Sdg(usize),
    Rz(usize, f64),
    Ry(usize, f64),
    Rx(usize, f64),
    Cnot { control: usize, target: usize },
    Cz(usize, usize),
}

pub type Matrix2 = [[Complex64; 2]; 2];

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Gate {
    pub fn qubits(&self) -> GateQubits {
        match *self {
            Gate::I(q)
            | Gate::X(q)
            | Gate::Y(q)
            | Gate::Z(q)
            | Gate::H(q)
            | Gate::S(q)
            | Gate::Sdg(q)
            | Gate::Rz(q, _)
            | Gate::Ry(q, _)
            | Gate::Rx(q, _) => GateQubits::One(q),
            Gate::Cnot { control, target } => GateQubits::Two(control, target),
            Gate::Cz(a, b) => GateQubits::Two(a, b),
        }
    }

    pub fn arity(&self) -> usize {
        match self.qubits() {
            GateQubits::One(_) => 1,
            GateQubits::Two(..) => 2,
        }
    }

    /// Single-qubit unitary, or `None` for the two-qubit gates.
    pub fn matrix(&self) -> Option<Matrix2> {
        let z = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        Some(match *self {
            Gate::I(_) => [[one, z], [z, one]],
            Gate::X(_) => [[z, one], [one, z]],
            Gate::Y(_) => [[z, c(0.0, -1.0)], [c(0.0, 1.0), z]],
            Gate::Z(_) => [[one, z], [z, -one]],
            Gate::H(_) => [[c(r, 0.0), c(r, 0.0)], [c(r, 0.0), c(-r, 0.0)]],
            Gate::S(_) => [[one, z], [z, c(0.0, 1.0)]],
            Gate::Sdg(_) => [[one, z], [z, c(0.0, -1.0)]],
            Gate::Rz(_, t) => [[Complex64::from_polar(1.0, -t / 2.0), z], [z, Complex64::from_polar(1.0, t / 2.0)]],
            Gate::Ry(_, t) => {
                let (s, co) = (t / 2.0).sin_cos();
                [[c(co, 0.0), c(-s, 0.0)], [c(s, 0.0), c(co, 0.0)]]
            }
            Gate::Rx(_, t) => {
                let (s, co) = (t / 2.0).sin_cos();
                [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
            }
            Gate::Cnot { .. } | Gate::Cz(..) => return None,
        })
    }

    /// Full unitary on the gate's own qubits, little-endian in the order
    /// returned by [`Gate::qubits`] (first qubit is the low bit).
    pub fn unitary(&self) -> Vec<Vec<Complex64>> {
        if let Some(m) = self.matrix() {
            return m.iter().map(|row| row.to_vec()).collect();
        }
        let mut u = vec![vec![c(0.0, 0.0); 4]; 4];
        for basis in 0..4usize {
            let (a, b) = (basis & 1, (basis >> 1) & 1);
            match *self {
                Gate::Cnot { .. } => {
                    let out = a | ((b ^ a) << 1);
                    u[out][basis] = c(1.0, 0.0);
                }
                Gate::Cz(..) => {
                    u[basis][basis] = if a == 1 && b == 1 { c(-1.0, 0.0) } else { c(1.0, 0.0) };
                }
                _ => unreachable!(),
            }
        }
        u
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::S(q) => Gate::Sdg(q),
            Gate::Sdg(q) => Gate::S(q),
            Gate::Rz(q, t) => Gate::Rz(q, -t),
            Gate::Ry(q, t) => Gate::Ry(q, -t),
            Gate::Rx(q, t) => Gate::Rx(q, -t),
            g => g,
        }
    }

    /// Maps computational basis states to computational basis states (up to a phase).
    pub fn is_classical(&self) -> bool {
        !matches!(self, Gate::H(_) | Gate::Rx(..) | Gate::Ry(..))
    }

    pub fn max_qubit(&self) -> usize {
        match self.qubits() {
            GateQubits::One(q) => q,
            GateQubits::Two(a, b) => a.max(b),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Gate::I(_) => "I",
            Gate::X(_) => "X",
            Gate::Y(_) => "Y",
            Gate::Z(_) => "Z",
            Gate::H(_) => "H",
            Gate::S(_) => "S",
            Gate::Sdg(_) => "Sdg",
            Gate::Rz(..) => "Rz",
            Gate::Ry(..) => "Ry",
            Gate::Rx(..) => "Rx",
            Gate::Cnot { .. } => "CNOT",
            Gate::Cz(..) => "CZ",
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::Rz(q, t) | Gate::Ry(q, t) | Gate::Rx(q, t) => write!(f, "{}({t:.6}) q{q}", self.name()),
            Gate::Cnot { control, target } => write!(f, "CNOT q{control}->q{target}"),
            Gate::Cz(a, b) => write!(f, "CZ q{a},q{b}"),
            _ => write!(f, "{} q{}", self.name(), self.max_qubit()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateQubits {
    One(usize),
    Two(usize, usize),
}

impl GateQubits {
    pub fn to_vec(self) -> Vec<usize> {
        match self {
            GateQubits::One(q) => vec![q],
            GateQubits::Two(a, b) => vec![a, b],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_gates() -> Vec<Gate> {
        vec![
            Gate::I(0),
            Gate::X(0),
            Gate::Y(0),
            Gate::Z(0),
            Gate::H(0),
            Gate::S(0),
            Gate::Sdg(0),
            Gate::Rz(0, 0.37),
            Gate::Ry(0, -1.2),
            Gate::Rx(0, 2.9),
            Gate::Cnot { control: 0, target: 1 },
            Gate::Cz(0, 1),
        ]
    }

    #[test]
    fn every_gate_is_unitary() {
        for g in all_gates() {
            let u = g.unitary();
            let n = u.len();
            for i in 0..n {
                for j in 0..n {
                    let mut s = c(0.0, 0.0);
                    for k in 0..n {
                        s += u[i][k] * u[j][k].conj();
                    }
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((s - c(want, 0.0)).norm() < 1e-12, "{g} not unitary");
                }
            }
        }
    }

    #[test]
    fn inverse_undoes_gate() {
        for g in all_gates().into_iter().filter(|g| g.arity() == 1) {
            let a = g.matrix().unwrap();
            let b = g.inverse().matrix().unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    let s = a[i][0] * b[0][j] + a[i][1] * b[1][j];
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((s - c(want, 0.0)).norm() < 1e-12);
                }
            }
        }
    }
}
