//! Circuit IR: gates, mid-circuit measurement, reset, classically
//! controlled gates, and postselection checkpoints.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::gate::{Gate, GateQubits};

/// A boolean function of a few classical bits, stored as a truth table.
///
/// Entry `k` of the table is the value when bit `bits[i]` equals bit `i` of `k`.
#[derive(Clone, PartialEq)]
pub struct Cond {
    bits: Vec<usize>,
    table: Arc<[bool]>,
}

/// Conditions may reference at most this many bits (table size 2^16).
pub const MAX_COND_BITS: usize = 16;

impl Cond {
    pub fn from_fn(bits: Vec<usize>, f: impl Fn(&[bool]) -> bool) -> Cond {
        assert!(bits.len() <= MAX_COND_BITS, "condition over too many bits");
        let n = bits.len();
        let mut scratch = vec![false; n];
        let table: Vec<bool> = (0..1usize << n)
            .map(|k| {
                for (i, s) in scratch.iter_mut().enumerate() {
                    *s = (k >> i) & 1 == 1;
                }
                f(&scratch)
            })
            .collect();
        Cond { bits, table: table.into() }
    }

    pub fn bit(b: usize) -> Cond {
        Cond::from_fn(vec![b], |v| v[0])
    }

    pub fn majority(bits: [usize; 3]) -> Cond {
        Cond::from_fn(bits.to_vec(), |v| v.iter().filter(|&&x| x).count() >= 2)
    }

    pub fn any(bits: Vec<usize>) -> Cond {
        Cond::from_fn(bits, |v| v.iter().any(|&x| x))
    }

    pub fn bits(&self) -> &[usize] {
        &self.bits
    }

    pub fn eval(&self, record: &[bool]) -> bool {
        let mut k = 0usize;
        for (i, &b) in self.bits.iter().enumerate() {
            if record[b] {
                k |= 1 << i;
            }
        }
        self.table[k]
    }
}

impl fmt::Debug for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ones = self.table.iter().filter(|&&t| t).count();
        write!(f, "Cond(bits={:?}, true on {}/{})", self.bits, ones, self.table.len())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instruction {
    /// A noisy gate.
    Gate(Gate),
    /// A gate executed only when `cond` holds; noisy only when executed.
    Conditional { gate: Gate, cond: Cond },
    /// Return the qubit to |0>. Noiseless unless preparation noise is enabled.
    Reset(usize),
    /// Noiseless projective Z measurement into classical bit `bit`.
    Measure { qubit: usize, bit: usize },
    /// Discard the shot when `reject` holds.
    Postselect { reject: Cond },
    /// Marker at which trajectory runners may observe the state.
    Checkpoint(usize),
}

/// One eligible X-insertion point: after instruction `instr`, on `qubit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize)]
pub struct FaultSite {
    pub instr: usize,
    pub qubit: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    n_bits: usize,
    instructions: Vec<Instruction>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Circuit { n_qubits, n_bits: 0, instructions: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_bits(&self) -> usize {
        self.n_bits
    }

    pub fn instructions(&self) -> &[Instruction] {
        &self.instructions
    }

    pub fn len(&self) -> usize {
        self.instructions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instructions.is_empty()
    }

    fn check(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange { index: q, n_qubits: self.n_qubits });
        }
        Ok(())
    }

    fn check_gate(&self, g: &Gate) -> Result<()> {
        match g.qubits() {
            GateQubits::One(q) => self.check(q),
            GateQubits::Two(a, b) => {
                self.check(a)?;
                self.check(b)?;
                if a == b {
                    return Err(Error::QubitCollision(a));
                }
                Ok(())
            }
        }
    }

    pub fn gate(&mut self, g: Gate) -> Result<&mut Self> {
        self.check_gate(&g)?;
        self.instructions.push(Instruction::Gate(g));
        Ok(self)
    }

    pub fn conditional(&mut self, g: Gate, cond: Cond) -> Result<&mut Self> {
        self.check_gate(&g)?;
        self.instructions.push(Instruction::Conditional { gate: g, cond });
        Ok(self)
    }

    pub fn reset(&mut self, q: usize) -> Result<&mut Self> {
        self.check(q)?;
        self.instructions.push(Instruction::Reset(q));
        Ok(self)
    }

    /// Measure `q` into a freshly allocated bit and return its index.
    pub fn measure(&mut self, q: usize) -> Result<usize> {
        self.check(q)?;
        let bit = self.n_bits;
        self.n_bits += 1;
        self.instructions.push(Instruction::Measure { qubit: q, bit });
        Ok(bit)
    }

    pub fn postselect(&mut self, reject: Cond) -> &mut Self {
        self.instructions.push(Instruction::Postselect { reject });
        self
    }

    pub fn checkpoint(&mut self, tag: usize) -> &mut Self {
        self.instructions.push(Instruction::Checkpoint(tag));
        self
    }

    /// Fault sites in instruction order, one per wire of every (conditional)
    /// gate, plus one per reset when `noisy_prep` is set.
    pub fn fault_sites(&self, noisy_prep: bool) -> Vec<FaultSite> {
        let mut out = Vec::new();
        for (instr, ins) in self.instructions.iter().enumerate() {
            match ins {
                Instruction::Gate(g) | Instruction::Conditional { gate: g, .. } => {
                    for qubit in g.qubits().to_vec() {
                        out.push(FaultSite { instr, qubit });
                    }
                }
                Instruction::Reset(q) if noisy_prep => out.push(FaultSite { instr, qubit: *q }),
                _ => {}
            }
        }
        out
    }

    pub fn gate_counts(&self) -> (usize, usize) {
        let mut one = 0;
        let mut two = 0;
        for ins in &self.instructions {
            if let Instruction::Gate(g) | Instruction::Conditional { gate: g, .. } = ins {
                if g.arity() == 1 {
                    one += 1;
                } else {
                    two += 1;
                }
            }
        }
        (one, two)
    }

    /// True if every gate maps basis states to basis states.
    pub fn is_classical(&self) -> bool {
        self.instructions.iter().all(|ins| match ins {
            Instruction::Gate(g) | Instruction::Conditional { gate: g, .. } => g.is_classical(),
            _ => true,
        })
    }

    /// Append another circuit on the same register, shifting its bit indices.
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits > self.n_qubits {
            return Err(Error::DimensionMismatch { left: self.n_qubits, right: other.n_qubits });
        }
        let off = self.n_bits;
        let shift = |c: &Cond| Cond {
            bits: c.bits.iter().map(|b| b + off).collect(),
            table: Arc::clone(&c.table),
        };
        for ins in &other.instructions {
            self.instructions.push(match ins {
                Instruction::Conditional { gate, cond } => Instruction::Conditional { gate: *gate, cond: shift(cond) },
                Instruction::Measure { qubit, bit } => Instruction::Measure { qubit: *qubit, bit: bit + off },
                Instruction::Postselect { reject } => Instruction::Postselect { reject: shift(reject) },
                other => other.clone(),
            });
        }
        self.n_bits += other.n_bits;
        Ok(())
    }
}
