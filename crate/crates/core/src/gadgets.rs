//! Bias-preserving logical gadgets on distance-3 blocks.
//!
//! Every builder appends to a caller-owned [`Circuit`] so gadgets compose on a
//! shared register. Blocks that are measured or consumed inside a gadget are
//! reset to |000> before it returns, which lets callers recycle them.

use num_complex::Complex64;
use serde::Serialize;

use crate::circuit::{Circuit, Cond};
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::repcode::{error_correct, error_correct_single, measure_z1z2, syndrome_round, CodeBlock};
use crate::sim::StateVector;

/// Sign of the `|±i>` resource state (and of the phase gate it teleports).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

fn disjoint(blocks: &[&CodeBlock], extra: &[usize]) -> Result<()> {
    for (i, a) in blocks.iter().enumerate() {
        for b in &blocks[i + 1..] {
            if let Some(q) = a.qubits().iter().find(|q| b.contains(**q)) {
                return Err(Error::QubitCollision(*q));
            }
        }
        if let Some(q) = extra.iter().find(|q| a.contains(**q)) {
            return Err(Error::QubitCollision(*q));
        }
    }
    Ok(())
}

fn reset_block(c: &mut Circuit, b: &CodeBlock) -> Result<()> {
    for &q in b.qubits() {
        c.reset(q)?;
    }
    Ok(())
}

/// `X_L = XXX`.
pub fn logical_x(c: &mut Circuit, b: &CodeBlock) -> Result<()> {
    for &q in b.qubits() {
        c.gate(Gate::X(q))?;
    }
    Ok(())
}

/// `Y_L = Y X X`.
pub fn logical_y(c: &mut Circuit, b: &CodeBlock) -> Result<()> {
    c.gate(Gate::Y(b.q(0)))?;
    for &q in &b.qubits()[1..] {
        c.gate(Gate::X(q))?;
    }
    Ok(())
}

/// `Z_L = Z` on the first qubit.
pub fn logical_z(c: &mut Circuit, b: &CodeBlock) -> Result<()> {
    c.gate(Gate::Z(b.q(0)))?;
    Ok(())
}

fn conditional_logical(c: &mut Circuit, gates: Vec<Gate>, cond: &Cond) -> Result<()> {
    for g in gates {
        c.conditional(g, cond.clone())?;
    }
    Ok(())
}

/// Transversal CNOT.
pub fn logical_cnot(c: &mut Circuit, control: &CodeBlock, target: &CodeBlock) -> Result<()> {
    disjoint(&[control, target], &[])?;
    for (&a, &b) in control.qubits().iter().zip(target.qubits()) {
        c.gate(Gate::Cnot { control: a, target: b })?;
    }
    Ok(())
}

/// `|+>_L` from a fresh block: H on the first qubit, then fan-out CNOTs.
pub fn prep_plus(c: &mut Circuit, b: &CodeBlock) -> Result<()> {
    c.gate(Gate::H(b.q(0)))?;
    for &q in &b.qubits()[1..] {
        c.gate(Gate::Cnot { control: b.q(0), target: q })?;
    }
    Ok(())
}

/// `|±i>_L`: `|+>_L`, a phase gate on the first qubit, and a `Z1Z2` check
/// that discards the shot when it fires. Returns the check bit.
pub fn prep_plus_i(c: &mut Circuit, b: &CodeBlock, anc: usize, sign: Sign) -> Result<usize> {
    disjoint(&[b], &[anc])?;
    prep_plus(c, b)?;
    c.gate(match sign {
        Sign::Plus => Gate::S(b.q(0)),
        Sign::Minus => Gate::Sdg(b.q(0)),
    })?;
    let bit = measure_z1z2(c, b, anc)?;
    c.postselect(Cond::bit(bit));
    Ok(bit)
}

/// Logical CZ: physical CZ between the first qubits, then one syndrome round
/// on each block; any nontrivial syndrome discards the shot.
pub fn logical_cz(c: &mut Circuit, b1: &CodeBlock, b2: &CodeBlock, anc: usize) -> Result<[[usize; 2]; 2]> {
    disjoint(&[b1, b2], &[anc])?;
    c.gate(Gate::Cz(b1.q(0), b2.q(0)))?;
    let s1 = syndrome_round(c, b1, anc)?;
    let s2 = syndrome_round(c, b2, anc)?;
    c.postselect(Cond::any(s1.iter().chain(&s2).copied().collect()));
    Ok([s1, s2])
}

/// Logical X-basis measurement, repeated three times through one recycled
/// ancilla. Bit value 1 means eigenvalue −1; the outcome is the majority.
pub fn measure_x_logical(c: &mut Circuit, b: &CodeBlock, anc: usize) -> Result<[usize; 3]> {
    disjoint(&[b], &[anc])?;
    let mut bits = [0; 3];
    for bit in bits.iter_mut() {
        c.reset(anc)?;
        c.gate(Gate::H(anc))?;
        for &q in b.qubits() {
            c.gate(Gate::Cnot { control: anc, target: q })?;
        }
        c.gate(Gate::H(anc))?;
        *bit = c.measure(anc)?;
    }
    c.reset(anc)?;
    Ok(bits)
}

/// Result of a teleportation-style gadget.
#[derive(Debug, Clone)]
pub struct Teleported {
    /// Block that holds the logical output.
    pub output: CodeBlock,
    /// True when the measured logical outcome was 1 (−1 for X measurements).
    pub outcome: Cond,
}

/// Phase gate by teleportation through `|±i>_L` prepared on `resource`.
pub fn s_teleport(c: &mut Circuit, data: &CodeBlock, resource: &CodeBlock, anc: usize, sign: Sign) -> Result<Teleported> {
    disjoint(&[data, resource], &[anc])?;
    prep_plus_i(c, resource, anc, sign)?;
    logical_cnot(c, resource, data)?;
    let bits: Vec<usize> = data.qubits().iter().map(|&q| c.measure(q)).collect::<Result<_>>()?;
    let outcome = Cond::majority([bits[0], bits[1], bits[2]]);
    let y = std::iter::once(Gate::Y(resource.q(0))).chain(resource.qubits()[1..].iter().map(|&q| Gate::X(q)));
    conditional_logical(c, y.collect(), &outcome)?;
    reset_block(c, data)?;
    Ok(Teleported { output: resource.clone(), outcome })
}

/// Hadamard by teleportation through `|+>_L` prepared on `resource`.
pub fn h_teleport(c: &mut Circuit, data: &CodeBlock, resource: &CodeBlock, anc: usize) -> Result<Teleported> {
    disjoint(&[data, resource], &[anc])?;
    prep_plus(c, resource)?;
    logical_cz(c, resource, data, anc)?;
    let bits = measure_x_logical(c, data, anc)?;
    let outcome = Cond::majority(bits);
    let xs = resource.qubits().iter().map(|&q| Gate::X(q)).collect();
    conditional_logical(c, xs, &outcome)?;
    reset_block(c, data)?;
    Ok(Teleported { output: resource.clone(), outcome })
}

/// Logical `Rz(θ)` via an ancilla block: transversal CNOTs data → ancilla,
/// physical `Rz(θ)` on the first ancilla qubit, a syndrome round on the
/// ancilla block that discards on detection, a logical X measurement of the
/// ancilla block, and a `Z` on the third data qubit when it reads −1.
/// Returns the outcome condition.
pub fn rz_gadget(c: &mut Circuit, data: &CodeBlock, anc_block: &CodeBlock, anc: usize, theta: f64) -> Result<Cond> {
    disjoint(&[data, anc_block], &[anc])?;
    logical_cnot(c, data, anc_block)?;
    c.gate(Gate::Rz(anc_block.q(0), theta))?;
    let s = syndrome_round(c, anc_block, anc)?;
    c.postselect(Cond::any(s.to_vec()));
    let bits = measure_x_logical(c, anc_block, anc)?;
    let outcome = Cond::majority(bits);
    c.conditional(Gate::Z(data.q(2)), outcome.clone())?;
    reset_block(c, anc_block)?;
    Ok(outcome)
}

/// The non-bias-preserving way to apply `S_L`: `S†` on every qubit of the
/// block (`(−i)³ = i` on `|111>`). An X error arriving at any qubit turns
/// into a Y error. Idle locations in front model incoming errors.
pub fn naive_transversal_s(c: &mut Circuit, b: &CodeBlock) -> Result<()> {
    for &q in b.qubits() {
        c.gate(Gate::I(q))?;
    }
    for &q in b.qubits() {
        c.gate(Gate::Sdg(q))?;
    }
    Ok(())
}

/// Logical operations, in the vocabulary of the gadget library.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum LogicalOp {
    X,
    Y,
    Z,
    Cnot,
    Cz,
    S,
    Sdg,
    H,
    Rz(f64),
    Rx(f64),
    Ry(f64),
    MeasX,
    PrepPlus,
    PrepPlusI,
    PrepMinusI,
}

/// Rewrite `Rx`/`Ry` into gadget-native operations, in application order.
/// `Rx = H Rz H`; `Ry = S H Rz H S†` (so `S†` is applied first).
pub fn rotation_decompose(op: LogicalOp) -> Vec<LogicalOp> {
    match op {
        LogicalOp::Rx(t) => vec![LogicalOp::H, LogicalOp::Rz(t), LogicalOp::H],
        LogicalOp::Ry(t) => vec![LogicalOp::Sdg, LogicalOp::H, LogicalOp::Rz(t), LogicalOp::H, LogicalOp::S],
        other => vec![other],
    }
}

/// Which gadget circuit to build in its standalone layout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum GadgetKind {
    LogicalX,
    LogicalY,
    LogicalZ,
    Cnot,
    PrepPlus,
    PrepPlusI(Sign),
    Cz,
    MeasX,
    STeleport(Sign),
    HTeleport,
    Rz(f64),
    /// Error correction with 1, 2 or 3 syndrome rounds.
    Ec(usize),
    NaiveS,
}

/// A gadget circuit in its standalone layout together with the metadata the
/// fault oracle needs.
#[derive(Debug, Clone)]
pub struct Gadget {
    pub kind: GadgetKind,
    pub name: String,
    pub circuit: Circuit,
    /// Blocks that receive the logical input, one per logical qubit.
    pub inputs: Vec<CodeBlock>,
    /// Blocks that hold the logical output.
    pub outputs: Vec<CodeBlock>,
    /// Classical outcome label, when the gadget has one.
    pub outcome: Option<Cond>,
    /// Ideal logical action (a state for preparations).
    pub ideal: LogicalOp,
}

impl Gadget {
    pub fn build(kind: GadgetKind) -> Result<Gadget> {
        let b0 = CodeBlock::at(0);
        let b1 = CodeBlock::at(3);
        let one = |n: usize| Circuit::new(n);
        let (name, circuit, inputs, outputs, outcome, ideal) = match kind {
            GadgetKind::LogicalX | GadgetKind::LogicalY | GadgetKind::LogicalZ => {
                let mut c = one(3);
                let (name, ideal) = match kind {
                    GadgetKind::LogicalX => {
                        logical_x(&mut c, &b0)?;
                        ("X_L", LogicalOp::X)
                    }
                    GadgetKind::LogicalY => {
                        logical_y(&mut c, &b0)?;
                        ("Y_L", LogicalOp::Y)
                    }
                    _ => {
                        logical_z(&mut c, &b0)?;
                        ("Z_L", LogicalOp::Z)
                    }
                };
                (name.to_string(), c, vec![b0.clone()], vec![b0], None, ideal)
            }
            GadgetKind::Cnot => {
                let mut c = one(6);
                logical_cnot(&mut c, &b0, &b1)?;
                ("CNOT_L".into(), c, vec![b0.clone(), b1.clone()], vec![b0, b1], None, LogicalOp::Cnot)
            }
            GadgetKind::PrepPlus => {
                let mut c = one(3);
                prep_plus(&mut c, &b0)?;
                ("prep_plus".into(), c, vec![], vec![b0], None, LogicalOp::PrepPlus)
            }
            GadgetKind::PrepPlusI(sign) => {
                let mut c = one(4);
                prep_plus_i(&mut c, &b0, 3, sign)?;
                let (name, ideal) = match sign {
                    Sign::Plus => ("prep_plus_i", LogicalOp::PrepPlusI),
                    Sign::Minus => ("prep_minus_i", LogicalOp::PrepMinusI),
                };
                (name.into(), c, vec![], vec![b0], None, ideal)
            }
            GadgetKind::Cz => {
                let mut c = one(7);
                logical_cz(&mut c, &b0, &b1, 6)?;
                ("CZ_L".into(), c, vec![b0.clone(), b1.clone()], vec![b0, b1], None, LogicalOp::Cz)
            }
            GadgetKind::MeasX => {
                let mut c = one(4);
                let bits = measure_x_logical(&mut c, &b0, 3)?;
                ("meas_x_L".into(), c, vec![b0.clone()], vec![b0], Some(Cond::majority(bits)), LogicalOp::MeasX)
            }
            GadgetKind::STeleport(sign) => {
                let mut c = one(7);
                let t = s_teleport(&mut c, &b0, &b1, 6, sign)?;
                let (name, ideal) = match sign {
                    Sign::Plus => ("S_L", LogicalOp::S),
                    Sign::Minus => ("Sdg_L", LogicalOp::Sdg),
                };
                (name.into(), c, vec![b0], vec![t.output], Some(t.outcome), ideal)
            }
            GadgetKind::HTeleport => {
                let mut c = one(7);
                let t = h_teleport(&mut c, &b0, &b1, 6)?;
                ("H_L".into(), c, vec![b0], vec![t.output], Some(t.outcome), LogicalOp::H)
            }
            GadgetKind::Rz(theta) => {
                let mut c = one(7);
                let outcome = rz_gadget(&mut c, &b0, &b1, 6, theta)?;
                (format!("Rz_L({theta:.6})"), c, vec![b0.clone()], vec![b0], Some(outcome), LogicalOp::Rz(theta))
            }
            GadgetKind::Ec(rounds) => {
                let mut c = one(4);
                match rounds {
                    1 => {
                        error_correct_single(&mut c, &b0, 3)?;
                    }
                    r => {
                        error_correct(&mut c, &b0, 3, r)?;
                    }
                }
                (format!("EC_{rounds}round"), c, vec![b0.clone()], vec![b0], None, LogicalOp::Z)
            }
            GadgetKind::NaiveS => {
                let mut c = one(3);
                naive_transversal_s(&mut c, &b0)?;
                ("naive_S".into(), c, vec![b0.clone()], vec![b0], None, LogicalOp::S)
            }
        };
        Ok(Gadget { kind, name, circuit, inputs, outputs, outcome, ideal })
    }

    /// Whether the ideal action is the identity (error correction).
    pub fn is_identity(&self) -> bool {
        matches!(self.kind, GadgetKind::Ec(_))
    }
}

/// Logical 2x2 / 4x4 unitary of `op` (little-endian over logical qubits).
pub fn logical_unitary(op: LogicalOp) -> Option<Vec<Vec<Complex64>>> {
    let g = match op {
        LogicalOp::X => Gate::X(0),
        LogicalOp::Y => Gate::Y(0),
        LogicalOp::Z => Gate::Z(0),
        LogicalOp::S => Gate::S(0),
        LogicalOp::Sdg => Gate::Sdg(0),
        LogicalOp::H => Gate::H(0),
        LogicalOp::Rz(t) => Gate::Rz(0, t),
        LogicalOp::Rx(t) => Gate::Rx(0, t),
        LogicalOp::Ry(t) => Gate::Ry(0, t),
        LogicalOp::Cnot => Gate::Cnot { control: 0, target: 1 },
        LogicalOp::Cz => Gate::Cz(0, 1),
        _ => return None,
    };
    Some(g.unitary())
}

/// Encoded state with logical amplitudes `logical[k]` (bit `i` of `k` is
/// logical qubit `i`, living on `blocks[i]`) and every other qubit in |0>.
pub fn encoded_state(n_qubits: usize, blocks: &[CodeBlock], logical: &[Complex64]) -> Result<StateVector> {
    if logical.len() != 1 << blocks.len() {
        return Err(Error::LengthMismatch(logical.len(), 1 << blocks.len()));
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
    for (k, a) in logical.iter().enumerate() {
        let mut idx = 0usize;
        for (i, b) in blocks.iter().enumerate() {
            if (k >> i) & 1 == 1 {
                for &q in b.qubits() {
                    idx |= 1 << q;
                }
            }
        }
        amps[idx] = *a;
    }
    StateVector::from_amplitudes(amps)
}

/// One row of the gadget catalog.
#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub qubits: usize,
    pub fault_sites: usize,
    pub one_qubit_gates: usize,
    pub two_qubit_gates: usize,
    pub postselected: bool,
}

pub fn catalog() -> Result<Vec<CatalogEntry>> {
    let kinds = [
        GadgetKind::LogicalX,
        GadgetKind::LogicalY,
        GadgetKind::LogicalZ,
        GadgetKind::Cnot,
        GadgetKind::PrepPlus,
        GadgetKind::PrepPlusI(Sign::Plus),
        GadgetKind::PrepPlusI(Sign::Minus),
        GadgetKind::Cz,
        GadgetKind::MeasX,
        GadgetKind::STeleport(Sign::Plus),
        GadgetKind::STeleport(Sign::Minus),
        GadgetKind::HTeleport,
        GadgetKind::Rz(std::f64::consts::FRAC_PI_4),
        GadgetKind::Ec(2),
        GadgetKind::Ec(3),
    ];
    kinds
        .into_iter()
        .map(|k| {
            let g = Gadget::build(k)?;
            let (one, two) = g.circuit.gate_counts();
            let postselected = g
                .circuit
                .instructions()
                .iter()
                .any(|i| matches!(i, crate::circuit::Instruction::Postselect { .. }));
            Ok(CatalogEntry {
                name: g.name,
                qubits: g.circuit.n_qubits(),
                fault_sites: g.circuit.fault_sites(false).len(),
                one_qubit_gates: one,
                two_qubit_gates: two,
                postselected,
            })
        })
        .collect()
}
