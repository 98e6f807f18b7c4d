//! Biased Pauli noise.
//!
//! A single-qubit gate is followed by the channel
//! `(1-p) I + p(1-ε) X + pε/2 Y + pε/2 Z`. A two-qubit gate is followed by
//! the same channel on each wire independently; for `ε = 0` this is exactly
//! the bit-flip Kraus set `{(1-p)², (1-p)p X₁, (1-p)p X₂, p² X₁X₂}`.
//! Preparation, measurement and idling are noiseless unless `noisy_prep` is set,
//! in which case a reset leaves |1> with probability `p`.

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{Pauli, PauliString};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    p: f64,
    epsilon: f64,
    noisy_prep: bool,
}

impl Default for NoiseSpec {
    fn default() -> Self {
        NoiseSpec::noiseless()
    }
}

impl NoiseSpec {
    pub fn new(p: f64, epsilon: f64) -> Result<Self> {
        for v in [p, epsilon] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidProbability(v));
            }
        }
        Ok(NoiseSpec { p, epsilon, noisy_prep: false })
    }

    pub fn bit_flip(p: f64) -> Result<Self> {
        Self::new(p, 0.0)
    }

    pub fn noiseless() -> Self {
        NoiseSpec { p: 0.0, epsilon: 0.0, noisy_prep: false }
    }

    pub fn with_noisy_prep(mut self, on: bool) -> Self {
        self.noisy_prep = on;
        self
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn noisy_prep(&self) -> bool {
        self.noisy_prep
    }

    /// Conditional distribution of the Pauli given that a wire faulted.
    fn letter_weights(&self) -> [(f64, Pauli); 3] {
        let e = self.epsilon;
        [(1.0 - e, Pauli::X), (e / 2.0, Pauli::Y), (e / 2.0, Pauli::Z)]
    }

    /// Pick the Pauli of a wire fault from a uniform draw.
    pub fn fault_letter(&self, draw: f64) -> Pauli {
        let mut acc = 0.0;
        for (w, p) in self.letter_weights() {
            acc += w;
            if draw < acc {
                return p;
            }
        }
        // ε = 1 with draw rounding up: the last non-zero entry
        if self.epsilon > 0.0 {
            Pauli::Z
        } else {
            Pauli::X
        }
    }
}

/// Channel after a single-qubit gate as (weight, Pauli on qubit 0); zero
/// weights are omitted.
pub fn single_qubit_kraus(spec: &NoiseSpec) -> Vec<(f64, PauliString)> {
    let mut out = vec![(1.0 - spec.p, PauliString::identity())];
    for (w, l) in spec.letter_weights() {
        let w = w * spec.p;
        if w > 0.0 {
            out.push((w, PauliString::single(0, l)));
        }
    }
    out.retain(|(w, _)| *w > 0.0);
    out
}

/// Channel after a two-qubit gate on wires 0 and 1: the product of the
/// single-qubit channel on each wire.
pub fn two_qubit_kraus(spec: &NoiseSpec) -> Vec<(f64, PauliString)> {
    let one = single_qubit_kraus(spec);
    let mut out = Vec::with_capacity(one.len() * one.len());
    for (wa, a) in &one {
        for (wb, b) in &one {
            let b1 = PauliString::from_letters(b.iter().map(|(_, p)| (1, p)));
            out.push((wa * wb, a * &b1));
        }
    }
    out
}

/// A sampled fault: `pauli` acts right after instruction `instr`.
#[derive(Debug, Clone, PartialEq)]
pub struct FaultEvent {
    pub instr: usize,
    pub pauli: PauliString,
}

/// Sample the channel following a gate on `qubits` from one uniform draw.
/// Returns `None` for the identity branch.
pub fn sample_fault(spec: &NoiseSpec, instr: usize, qubits: &[usize], draw: f64) -> Option<FaultEvent> {
    let kraus = match qubits.len() {
        1 => single_qubit_kraus(spec),
        _ => two_qubit_kraus(spec),
    };
    let mut acc = 0.0;
    let mut chosen = &kraus[kraus.len() - 1].1;
    for (w, p) in &kraus {
        acc += w;
        if draw < acc {
            chosen = p;
            break;
        }
    }
    if chosen.is_identity() {
        return None;
    }
    let pauli = PauliString::from_letters(chosen.iter().map(|(w, p)| (qubits[w], p)));
    Some(FaultEvent { instr, pauli })
}

/// Geometric skip-ahead over a stream of independent wire sites, each
/// faulting with probability `p`. Equivalent to a Bernoulli draw per site but
/// costs one random number per fault instead of one per site.
#[derive(Debug, Clone)]
pub struct FaultClock {
    dist: Option<Geometric>,
    remaining: u64,
}

impl FaultClock {
    pub fn new<R: Rng + ?Sized>(p: f64, rng: &mut R) -> Self {
        let dist = (p > 0.0).then(|| Geometric::new(p).expect("p validated by NoiseSpec"));
        let mut c = FaultClock { dist, remaining: u64::MAX };
        c.rewind(rng);
        c
    }

    fn rewind<R: Rng + ?Sized>(&mut self, rng: &mut R) {
        self.remaining = match &self.dist {
            Some(d) => d.sample(rng),
            None => u64::MAX,
        };
    }

    /// Advance past one site; true if it faults.
    #[inline]
    pub fn tick<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        if self.remaining == 0 {
            self.rewind(rng);
            true
        } else {
            self.remaining -= 1;
            false
        }
    }
}
