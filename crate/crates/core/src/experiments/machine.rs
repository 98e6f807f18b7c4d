//! Compile logical programs to physical circuits.
//!
//! The encoded machine keeps every logical qubit on its own block plus one
//! spare block and one ancilla. Teleported gates (S, S†, H) move a logical
//! qubit onto the spare block and recycle the old one, so the block holding a
//! logical qubit changes over time; each checkpoint records the current
//! assignment so observables can be decoded.

use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gadgets::{self, rotation_decompose, LogicalOp, Sign};
use crate::gate::Gate;
use crate::repcode::{error_correct, CodeBlock};
use crate::sim::Backend;

use super::Variant;

/// A compiled program: the circuit and, per checkpoint tag, the block that
/// holds each logical qubit.
#[derive(Debug, Clone)]
pub struct Compiled {
    pub circuit: Circuit,
    pub layouts: Vec<Vec<CodeBlock>>,
}

impl Compiled {
    /// Probability of each decoded logical basis outcome (bit `i` of the index
    /// is logical qubit `i`) at checkpoint `tag`.
    pub fn decoded_distribution<B: Backend>(&self, tag: usize, state: &B) -> Vec<f64> {
        let layout = &self.layouts[tag];
        (0..1usize << layout.len())
            .map(|k| {
                state.expect_diagonal(&|idx| {
                    let hit = layout.iter().enumerate().all(|(i, b)| b.decode_bits(idx) == ((k >> i) & 1 == 1));
                    if hit {
                        1.0
                    } else {
                        0.0
                    }
                })
            })
            .collect()
    }

    /// Decoded `<Z_i>` of every logical qubit at checkpoint `tag`.
    pub fn decoded_z<B: Backend>(&self, tag: usize, state: &B) -> Vec<f64> {
        self.layouts[tag]
            .iter()
            .map(|b| state.expect_diagonal(&|idx| if b.decode_bits(idx) { -1.0 } else { 1.0 }))
            .collect()
    }

    /// Decoded logical bits of a classical basis state at checkpoint `tag`.
    pub fn decode_basis(&self, tag: usize, bits: u64) -> u64 {
        self.layouts[tag].iter().enumerate().map(|(i, b)| (b.decode_bits(bits) as u64) << i).sum()
    }
}

pub trait LogicalMachine {
    fn n_logical(&self) -> usize;
    fn x(&mut self, i: usize) -> Result<()>;
    fn cnot(&mut self, control: usize, target: usize) -> Result<()>;
    fn cz(&mut self, a: usize, b: usize) -> Result<()>;
    fn h(&mut self, i: usize) -> Result<()>;
    fn s(&mut self, i: usize) -> Result<()>;
    fn sdg(&mut self, i: usize) -> Result<()>;
    fn rz(&mut self, i: usize, theta: f64) -> Result<()>;
    /// Explicit error correction; a no-op without a code.
    fn ec(&mut self, i: usize) -> Result<()>;
    fn rx(&mut self, i: usize, theta: f64) -> Result<()>;
    fn ry(&mut self, i: usize, theta: f64) -> Result<()>;
    /// Insert a checkpoint and return its tag.
    fn checkpoint(&mut self) -> usize;
    fn finish(self: Box<Self>) -> Compiled;
}

/// Build the machine for `variant` with `n` logical qubits.
pub fn machine(variant: Variant, n: usize) -> Result<Box<dyn LogicalMachine>> {
    Ok(match variant {
        Variant::Bare => Box::new(BareMachine::new(n)),
        Variant::Encoded => Box::new(EncodedMachine::new(n, false)?),
        Variant::EncodedEc => Box::new(EncodedMachine::new(n, true)?),
    })
}

fn check(i: usize, n: usize) -> Result<()> {
    if i >= n {
        return Err(Error::QubitOutOfRange { index: i, n_qubits: n });
    }
    Ok(())
}

/// One physical qubit per logical qubit; rotations are native gates.
#[derive(Debug, Clone)]
pub struct BareMachine {
    c: Circuit,
    layouts: Vec<Vec<CodeBlock>>,
}

impl BareMachine {
    pub fn new(n: usize) -> Self {
        BareMachine { c: Circuit::new(n), layouts: Vec::new() }
    }

    fn g(&mut self, g: Gate) -> Result<()> {
        self.c.gate(g)?;
        Ok(())
    }
}

impl LogicalMachine for BareMachine {
    fn n_logical(&self) -> usize {
        self.c.n_qubits()
    }
    fn x(&mut self, i: usize) -> Result<()> {
        self.g(Gate::X(i))
    }
    fn cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.g(Gate::Cnot { control, target })
    }
    fn cz(&mut self, a: usize, b: usize) -> Result<()> {
        self.g(Gate::Cz(a, b))
    }
    fn h(&mut self, i: usize) -> Result<()> {
        self.g(Gate::H(i))
    }
    fn s(&mut self, i: usize) -> Result<()> {
        self.g(Gate::S(i))
    }
    fn sdg(&mut self, i: usize) -> Result<()> {
        self.g(Gate::Sdg(i))
    }
    fn rz(&mut self, i: usize, theta: f64) -> Result<()> {
        self.g(Gate::Rz(i, theta))
    }
    fn ec(&mut self, i: usize) -> Result<()> {
        check(i, self.n_logical())
    }
    fn rx(&mut self, i: usize, theta: f64) -> Result<()> {
        self.g(Gate::Rx(i, theta))
    }
    fn ry(&mut self, i: usize, theta: f64) -> Result<()> {
        self.g(Gate::Ry(i, theta))
    }
    fn checkpoint(&mut self) -> usize {
        let tag = self.layouts.len();
        let layout = (0..self.c.n_qubits()).map(|q| CodeBlock::new(vec![q]).expect("single qubit")).collect();
        self.layouts.push(layout);
        self.c.checkpoint(tag);
        tag
    }
    fn finish(self: Box<Self>) -> Compiled {
        Compiled { circuit: self.c, layouts: self.layouts }
    }
}

/// Distance-3 blocks driven by the gadget library.
#[derive(Debug, Clone)]
pub struct EncodedMachine {
    c: Circuit,
    blocks: Vec<CodeBlock>,
    spare: CodeBlock,
    anc: usize,
    ec_after_h: bool,
    layouts: Vec<Vec<CodeBlock>>,
}

impl EncodedMachine {
    /// `n` logical blocks, a spare block and one ancilla: `3n + 4` qubits.
    pub fn new(n: usize, ec_after_h: bool) -> Result<Self> {
        let blocks = (0..n).map(|i| CodeBlock::at(3 * i)).collect();
        Ok(EncodedMachine {
            c: Circuit::new(3 * n + 4),
            blocks,
            spare: CodeBlock::at(3 * n),
            anc: 3 * n + 3,
            ec_after_h,
            layouts: Vec::new(),
        })
    }

    fn teleport(&mut self, i: usize, op: LogicalOp) -> Result<()> {
        check(i, self.blocks.len())?;
        let data = self.blocks[i].clone();
        let resource = self.spare.clone();
        let t = match op {
            LogicalOp::H => gadgets::h_teleport(&mut self.c, &data, &resource, self.anc)?,
            LogicalOp::S => gadgets::s_teleport(&mut self.c, &data, &resource, self.anc, Sign::Plus)?,
            _ => gadgets::s_teleport(&mut self.c, &data, &resource, self.anc, Sign::Minus)?,
        };
        self.blocks[i] = t.output;
        self.spare = data;
        Ok(())
    }
}

impl LogicalMachine for EncodedMachine {
    fn n_logical(&self) -> usize {
        self.blocks.len()
    }
    fn x(&mut self, i: usize) -> Result<()> {
        check(i, self.blocks.len())?;
        gadgets::logical_x(&mut self.c, &self.blocks[i])
    }
    fn cnot(&mut self, control: usize, target: usize) -> Result<()> {
        check(control.max(target), self.blocks.len())?;
        gadgets::logical_cnot(&mut self.c, &self.blocks[control], &self.blocks[target])
    }
    fn cz(&mut self, a: usize, b: usize) -> Result<()> {
        check(a.max(b), self.blocks.len())?;
        gadgets::logical_cz(&mut self.c, &self.blocks[a], &self.blocks[b], self.anc)?;
        Ok(())
    }
    fn h(&mut self, i: usize) -> Result<()> {
        self.teleport(i, LogicalOp::H)?;
        if self.ec_after_h {
            self.ec(i)?;
        }
        Ok(())
    }
    fn s(&mut self, i: usize) -> Result<()> {
        self.teleport(i, LogicalOp::S)
    }
    fn sdg(&mut self, i: usize) -> Result<()> {
        self.teleport(i, LogicalOp::Sdg)
    }
    fn rz(&mut self, i: usize, theta: f64) -> Result<()> {
        check(i, self.blocks.len())?;
        gadgets::rz_gadget(&mut self.c, &self.blocks[i], &self.spare, self.anc, theta)?;
        Ok(())
    }
    fn ec(&mut self, i: usize) -> Result<()> {
        check(i, self.blocks.len())?;
        error_correct(&mut self.c, &self.blocks[i], self.anc, 2)?;
        Ok(())
    }
    fn rx(&mut self, i: usize, theta: f64) -> Result<()> {
        apply_sequence(self, i, LogicalOp::Rx(theta))
    }
    fn ry(&mut self, i: usize, theta: f64) -> Result<()> {
        apply_sequence(self, i, LogicalOp::Ry(theta))
    }
    fn checkpoint(&mut self) -> usize {
        let tag = self.layouts.len();
        self.layouts.push(self.blocks.clone());
        self.c.checkpoint(tag);
        tag
    }
    fn finish(self: Box<Self>) -> Compiled {
        Compiled { circuit: self.c, layouts: self.layouts }
    }
}

fn apply_sequence(m: &mut dyn LogicalMachine, i: usize, op: LogicalOp) -> Result<()> {
    for step in rotation_decompose(op) {
        match step {
            LogicalOp::H => m.h(i)?,
            LogicalOp::S => m.s(i)?,
            LogicalOp::Sdg => m.sdg(i)?,
            LogicalOp::Rz(t) => m.rz(i, t)?,
            other => return Err(Error::Parse(format!("unexpected step {other:?} in a rotation"))),
        }
    }
    Ok(())
}
