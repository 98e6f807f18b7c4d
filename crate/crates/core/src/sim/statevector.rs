use num_complex::Complex64;

use super::{kernels, Backend, ZERO_TOL};
use crate::error::{Error, Result};
use crate::gate::{Gate, GateQubits};
use crate::pauli::{Pauli, PauliString};

/// Dense pure state on `n_qubits` qubits, little-endian amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    pub fn zero(n_qubits: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        StateVector { n_qubits, amps }
    }

    pub fn basis(n_qubits: usize, index: u64) -> Self {
        let mut s = Self::zero(n_qubits);
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[index as usize] = Complex64::new(1.0, 0.0);
        s
    }

    /// Build from raw amplitudes; the length must be a power of two and the
    /// vector normalized within 1e-10.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::Parse(format!("amplitude count {len} is not a power of two")));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(StateVector { n_qubits: len.trailing_zeros() as usize, amps })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange { index: q, n_qubits: self.n_qubits });
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, g: &Gate) -> Result<()> {
        match g.qubits() {
            GateQubits::One(q) => self.check_qubit(q)?,
            GateQubits::Two(a, b) => {
                self.check_qubit(a)?;
                self.check_qubit(b)?;
                if a == b {
                    return Err(Error::QubitCollision(a));
                }
            }
        }
        kernels::apply_gate(&mut self.amps, g, 0, false);
        Ok(())
    }

    /// Projective Z measurement; outcome 0 iff `draw < P(0)`.
    pub fn measure_z(&mut self, q: usize, draw: f64) -> Result<bool> {
        self.check_qubit(q)?;
        Ok(Backend::measure(self, q, draw))
    }

    pub fn apply_pauli_string(&mut self, p: &PauliString) -> Result<()> {
        for (q, l) in p.iter() {
            self.check_qubit(q)?;
            kernels::apply_pauli(&mut self.amps, q, l, false);
        }
        Ok(())
    }

    /// `<ψ|P|ψ>` for a Hermitian Pauli string (phase ±1).
    pub fn expectation_pauli(&self, obs: &PauliString) -> Result<f64> {
        if !obs.phase().is_real() {
            return Err(Error::NonHermitianObservable(obs.to_string()));
        }
        if let Some(q) = obs.max_qubit() {
            self.check_qubit(q)?;
        }
        let (x, z) = obs.xz_masks();
        let (x, z) = (x as usize, z as usize);
        let n_y = obs.iter().filter(|&(_, l)| l == Pauli::Y).count() as u8;
        let coef = (obs.phase() * crate::pauli::Phase::from_power(n_y)).to_complex();
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, a) in self.amps.iter().enumerate() {
            let sign = if (k & z).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            acc += self.amps[k ^ x].conj() * a * sign;
        }
        Ok((acc * coef).re)
    }

    /// `|<reference|ψ>|²`.
    pub fn squared_overlap(&self, reference: &StateVector) -> Result<f64> {
        if self.n_qubits != reference.n_qubits {
            return Err(Error::DimensionMismatch { left: self.n_qubits, right: reference.n_qubits });
        }
        let ip: Complex64 = reference.amps.iter().zip(&self.amps).map(|(r, s)| r.conj() * s).sum();
        Ok(ip.norm_sqr())
    }

    /// Tensor product `self ⊗ other`, with `other` on the higher qubits.
    pub fn tensor(&self, other: &StateVector) -> StateVector {
        let mut amps = Vec::with_capacity(self.amps.len() * other.amps.len());
        for b in &other.amps {
            for a in &self.amps {
                amps.push(a * b);
            }
        }
        StateVector { n_qubits: self.n_qubits + other.n_qubits, amps }
    }
}

impl Backend for StateVector {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn gate(&mut self, g: &Gate) {
        kernels::apply_gate(&mut self.amps, g, 0, false);
    }

    fn pauli(&mut self, q: usize, p: Pauli) {
        kernels::apply_pauli(&mut self.amps, q, p, false);
    }

    fn prob_one(&self, q: usize) -> f64 {
        let m = 1usize << q;
        self.amps.iter().enumerate().filter(|(i, _)| i & m != 0).map(|(_, a)| a.norm_sqr()).sum()
    }

    fn collapse(&mut self, q: usize, outcome: bool) {
        let m = 1usize << q;
        let mut norm = 0.0;
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & m != 0) != outcome {
                *a = Complex64::new(0.0, 0.0);
            } else {
                norm += a.norm_sqr();
            }
        }
        debug_assert!(norm > ZERO_TOL, "collapse onto a zero-probability outcome");
        let s = 1.0 / norm.sqrt();
        for a in self.amps.iter_mut() {
            *a *= s;
        }
    }

    fn expect_diagonal(&self, f: &dyn Fn(u64) -> f64) -> f64 {
        self.amps.iter().enumerate().map(|(i, a)| a.norm_sqr() * f(i as u64)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const R: f64 = std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn random_state(n: usize, rng: &mut impl Rng) -> StateVector {
        let mut amps: Vec<Complex64> =
            (0..1 << n).map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|a| *a /= norm);
        StateVector::from_amplitudes(amps).unwrap()
    }

    #[test]
    fn hadamard_and_cz() {
        let mut s = StateVector::zero(1);
        s.apply_gate(&Gate::H(0)).unwrap();
        assert!((s.amps[0] - c(R)).norm() < 1e-12 && (s.amps[1] - c(R)).norm() < 1e-12);

        let mut s = StateVector::basis(2, 0b11);
        s.apply_gate(&Gate::Cz(0, 1)).unwrap();
        assert!((s.amps[3] + c(1.0)).norm() < 1e-12);
        assert!(s.apply_gate(&Gate::X(2)).is_err());
    }

    #[test]
    fn cnot_is_little_endian() {
        let mut s = StateVector::basis(2, 0b01);
        s.apply_gate(&Gate::Cnot { control: 0, target: 1 }).unwrap();
        assert!((s.amps[0b11] - c(1.0)).norm() < 1e-12);
    }

    #[test]
    fn measurement_examples() {
        let mut s = StateVector::zero(1);
        assert!(!s.measure_z(0, 0.99).unwrap());

        let mut plus = StateVector::zero(1);
        plus.apply_gate(&Gate::H(0)).unwrap();
        assert!(!plus.measure_z(0, 0.3).unwrap());
        assert!((plus.amps[0] - c(1.0)).norm() < 1e-12);

        // a|000> + b|111> with |a|² = 0.36
        let mut amps = vec![c(0.0); 8];
        amps[0] = c(0.6);
        amps[7] = c(0.8);
        let mut ghz = StateVector::from_amplitudes(amps).unwrap();
        assert!(!ghz.measure_z(0, 0.2).unwrap());
        assert!((ghz.squared_overlap(&StateVector::zero(3)).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pauli_expectations() {
        let s = StateVector::zero(2);
        let z0: PauliString = "Z0".parse().unwrap();
        let z1: PauliString = "Z1".parse().unwrap();
        assert!((s.expectation_pauli(&z0).unwrap() + s.expectation_pauli(&z1).unwrap() - 2.0).abs() < 1e-12);

        let mut plus = StateVector::zero(1);
        plus.apply_gate(&Gate::H(0)).unwrap();
        assert!((plus.expectation_pauli(&"X0".parse().unwrap()).unwrap() - 1.0).abs() < 1e-12);
        plus.apply_gate(&Gate::S(0)).unwrap();
        assert!((plus.expectation_pauli(&"Y0".parse().unwrap()).unwrap() - 1.0).abs() < 1e-12);
        assert!((plus.expectation_pauli(&"-Y0".parse().unwrap()).unwrap() + 1.0).abs() < 1e-12);
        assert!(plus.expectation_pauli(&"iY0".parse().unwrap()).is_err());
    }

    #[test]
    fn overlaps() {
        let a = StateVector::zero(2);
        assert!((a.squared_overlap(&a).unwrap() - 1.0).abs() < 1e-12);
        assert!(StateVector::basis(2, 1).squared_overlap(&a).unwrap().abs() < 1e-12);
        let mut p = StateVector::zero(2);
        p.apply_gate(&Gate::H(0)).unwrap();
        assert!((p.squared_overlap(&a).unwrap() - 0.5).abs() < 1e-12);
        assert!(p.squared_overlap(&StateVector::zero(3)).is_err());
    }

    #[test]
    fn rz_anticommutes_with_x() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let theta = rng.gen_range(-6.0..6.0);
            let psi = random_state(1, &mut rng);
            let mut a = psi.clone();
            a.apply_gate(&Gate::X(0)).unwrap();
            a.apply_gate(&Gate::Rz(0, theta)).unwrap();
            let mut b = psi;
            b.apply_gate(&Gate::Rz(0, -theta)).unwrap();
            b.apply_gate(&Gate::X(0)).unwrap();
            assert!((a.squared_overlap(&b).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn gates_preserve_norm(seed in 0u64..1000, ops in proptest::collection::vec((0u8..12, 0usize..3, 0usize..3, -3.0f64..3.0), 1..40)) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = random_state(3, &mut rng);
            for (k, a, b, t) in ops {
                let g = match k {
                    0 => Gate::X(a), 1 => Gate::Y(a), 2 => Gate::Z(a), 3 => Gate::H(a),
                    4 => Gate::S(a), 5 => Gate::Sdg(a), 6 => Gate::Rz(a, t), 7 => Gate::Ry(a, t),
                    8 => Gate::Rx(a, t), 9 => Gate::I(a),
                    10 if a != b => Gate::Cnot { control: a, target: b },
                    11 if a != b => Gate::Cz(a, b),
                    _ => Gate::H(b),
                };
                s.apply_gate(&g).unwrap();
                prop_assert!((s.norm_sqr().sqrt() - 1.0).abs() < 1e-10);
            }
        }
    }
}
