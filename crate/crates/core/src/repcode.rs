//! The bit-flip repetition code: encoding, syndrome extraction, lookup
//! decoding and fault-tolerant error correction.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::Serialize;

use crate::circuit::{Circuit, Cond, FaultSite, Instruction};
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::pauli::{Pauli, PauliString};

/// Physical qubits of one encoded qubit, in code order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct CodeBlock {
    qubits: Vec<usize>,
}

impl CodeBlock {
    pub fn new(qubits: Vec<usize>) -> Result<Self> {
        if qubits.len().is_multiple_of(2) {
            return Err(Error::EvenDistance(qubits.len()));
        }
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return Err(Error::QubitCollision(*q));
            }
        }
        Ok(CodeBlock { qubits })
    }

    /// Three consecutive qubits starting at `first`.
    pub fn at(first: usize) -> Self {
        CodeBlock { qubits: vec![first, first + 1, first + 2] }
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn q(&self, i: usize) -> usize {
        self.qubits[i]
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.qubits.contains(&q)
    }

    pub fn overlaps(&self, other: &CodeBlock) -> bool {
        self.qubits.iter().any(|q| other.contains(*q))
    }

    /// Majority-decoded logical bit of a basis-state index.
    pub fn decode_bits(&self, basis: u64) -> bool {
        let ones = self.qubits.iter().filter(|&&q| (basis >> q) & 1 == 1).count();
        2 * ones > self.qubits.len()
    }

    fn check_d3(&self) -> Result<()> {
        if self.qubits.len() != 3 {
            return Err(Error::UnsupportedChainLength(self.qubits.len()));
        }
        Ok(())
    }
}

/// Eigenvalues of `Z1Z2` and `Z2Z3`, stored as "flipped" flags
/// (`true` means eigenvalue −1, i.e. the ancilla read 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Syndrome {
    pub z1z2: bool,
    pub z2z3: bool,
}

impl Syndrome {
    pub const TRIVIAL: Syndrome = Syndrome { z1z2: false, z2z3: false };

    pub fn from_bits(z1z2: bool, z2z3: bool) -> Self {
        Syndrome { z1z2, z2z3 }
    }

    /// From eigenvalues (+1 / −1).
    pub fn from_signs(z1z2: i8, z2z3: i8) -> Self {
        Syndrome { z1z2: z1z2 < 0, z2z3: z2z3 < 0 }
    }

    pub fn is_trivial(&self) -> bool {
        !self.z1z2 && !self.z2z3
    }

    pub fn signs(&self) -> (i8, i8) {
        let s = |b: bool| if b { -1 } else { 1 };
        (s(self.z1z2), s(self.z2z3))
    }

    pub fn all() -> [Syndrome; 4] {
        [
            Syndrome::from_signs(1, 1),
            Syndrome::from_signs(-1, 1),
            Syndrome::from_signs(-1, -1),
            Syndrome::from_signs(1, -1),
        ]
    }
}

impl fmt::Display for Syndrome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (a, b) = self.signs();
        write!(f, "({a:+},{b:+})")
    }
}

/// Feedback operation chosen by a decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Feedback {
    I,
    X1,
    X2,
    X3,
}

impl Feedback {
    /// Index of the flipped qubit within the block.
    pub fn qubit(self) -> Option<usize> {
        match self {
            Feedback::I => None,
            Feedback::X1 => Some(0),
            Feedback::X2 => Some(1),
            Feedback::X3 => Some(2),
        }
    }

    pub fn on_block(self, block: &CodeBlock) -> PauliString {
        match self.qubit() {
            None => PauliString::identity(),
            Some(j) => PauliString::single(block.q(j), Pauli::X),
        }
    }
}

impl fmt::Display for Feedback {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Feedback::I => "I",
            Feedback::X1 => "X1",
            Feedback::X2 => "X2",
            Feedback::X3 => "X3",
        })
    }
}

impl FromStr for Feedback {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "I" => Ok(Feedback::I),
            "X1" => Ok(Feedback::X1),
            "X2" => Ok(Feedback::X2),
            "X3" => Ok(Feedback::X3),
            other => Err(Error::Parse(format!("unknown feedback {other:?}"))),
        }
    }
}

/// Single-round lookup.
pub fn decode_single(s: Syndrome) -> Feedback {
    match (s.z1z2, s.z2z3) {
        (false, false) => Feedback::I,
        (true, false) => Feedback::X1,
        (true, true) => Feedback::X2,
        (false, true) => Feedback::X3,
    }
}

/// Histories of two consecutive rounds that trigger or explicitly suppress
/// feedback. A single fault anywhere in the two rounds produces one of these
/// histories; any other history needs two faults and decodes to `I`.
const DOUBLE_ROUND: [((i8, i8), (i8, i8), Feedback); 10] = [
    ((-1, 1), (-1, 1), Feedback::X1),
    ((-1, -1), (-1, -1), Feedback::X2),
    ((1, -1), (1, -1), Feedback::X3),
    ((1, 1), (-1, 1), Feedback::X1),
    ((1, -1), (-1, -1), Feedback::X2),
    ((1, 1), (-1, -1), Feedback::X2),
    ((1, 1), (1, -1), Feedback::I),
    ((-1, 1), (1, 1), Feedback::I),
    ((1, -1), (1, 1), Feedback::I),
    ((1, 1), (1, 1), Feedback::I),
];

pub fn decode_double(s0: Syndrome, s1: Syndrome) -> Feedback {
    DecodeTable::double().lookup(&[s0, s1])
}

/// Syndrome history → feedback. Histories absent from the table decode to `I`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeTable {
    rounds: usize,
    entries: BTreeMap<Vec<Syndrome>, Feedback>,
}

impl DecodeTable {
    pub fn single() -> Self {
        let entries = Syndrome::all().into_iter().map(|s| (vec![s], decode_single(s))).collect();
        DecodeTable { rounds: 1, entries }
    }

    pub fn double() -> Self {
        let entries = DOUBLE_ROUND
            .iter()
            .map(|&((a, b), (c, d), f)| (vec![Syndrome::from_signs(a, b), Syndrome::from_signs(c, d)], f))
            .collect();
        DecodeTable { rounds: 2, entries }
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, history: &[Syndrome]) -> Feedback {
        self.entries.get(history).copied().unwrap_or(Feedback::I)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&[Syndrome], Feedback)> {
        self.entries.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    /// CSV with one row per history: `r0_z1z2,r0_z2z3,...,feedback`, signs as ±1.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for r in 0..self.rounds {
            out.push_str(&format!("r{r}_z1z2,r{r}_z2z3,"));
        }
        out.push_str("feedback\n");
        for (hist, fb) in self.iter() {
            for s in hist {
                let (a, b) = s.signs();
                out.push_str(&format!("{a},{b},"));
            }
            out.push_str(&format!("{fb}\n"));
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::Parse("empty decode table".into()))?;
        let cols = header.split(',').count();
        if cols < 3 || (cols - 1) % 2 != 0 {
            return Err(Error::Parse(format!("bad header {header:?}")));
        }
        let rounds = (cols - 1) / 2;
        let mut entries = BTreeMap::new();
        for (n, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != cols {
                return Err(Error::Parse(format!("row {}: expected {cols} fields", n + 1)));
            }
            let sign = |f: &str| -> Result<i8> {
                match f.trim() {
                    "1" | "+1" => Ok(1),
                    "-1" => Ok(-1),
                    o => Err(Error::Parse(format!("row {}: bad sign {o:?}", n + 1))),
                }
            };
            let mut hist = Vec::with_capacity(rounds);
            for r in 0..rounds {
                hist.push(Syndrome::from_signs(sign(fields[2 * r])?, sign(fields[2 * r + 1])?));
            }
            let fb: Feedback = fields[cols - 1].parse()?;
            if entries.insert(hist, fb).is_some() {
                return Err(Error::Parse(format!("row {}: duplicate history", n + 1)));
            }
        }
        Ok(DecodeTable { rounds, entries })
    }
}

/// Returns the value that occurs at least twice, if any.
pub fn majority_vote<T: PartialEq + Copy>(items: [T; 3]) -> Option<T> {
    if items[0] == items[1] || items[0] == items[2] {
        Some(items[0])
    } else if items[1] == items[2] {
        Some(items[1])
    } else {
        None
    }
}

/// Probability that bounded-distance decoding of a distance-`d` repetition
/// code fails when each bit flips independently with probability `p`.
pub fn logical_error_rate(d: usize, p: f64) -> Result<f64> {
    if d.is_multiple_of(2) {
        return Err(Error::EvenDistance(d));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability(p));
    }
    let t = (d - 1) / 2;
    let mut ok = 0.0;
    let mut binom = 1.0;
    for k in 0..=t {
        if k > 0 {
            binom *= (d - k + 1) as f64 / k as f64;
        }
        ok += binom * p.powi(k as i32) * (1.0 - p).powi((d - k) as i32);
    }
    Ok(1.0 - ok)
}

/// Emit the encoder `a|0..0> + b|1..1>` (first qubit rotated, then fanned out).
pub fn encode(c: &mut Circuit, block: &CodeBlock, a: Complex64, b: Complex64) -> Result<()> {
    let norm = a.norm_sqr() + b.norm_sqr();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NotNormalized(norm));
    }
    let theta = 2.0 * b.norm().atan2(a.norm());
    let phi = b.arg() - a.arg();
    let q0 = block.q(0);
    if theta != 0.0 {
        c.gate(Gate::Ry(q0, theta))?;
    }
    if theta != 0.0 && b.norm() > 0.0 && a.norm() > 0.0 && phi != 0.0 {
        c.gate(Gate::Rz(q0, phi))?;
    }
    for &q in &block.qubits()[1..] {
        c.gate(Gate::Cnot { control: q0, target: q })?;
    }
    Ok(())
}

/// Bits of one syndrome round: (Z1Z2 bit, Z2Z3 bit).
pub type RoundBits = [usize; 2];

/// One syndrome round with a single recycled ancilla.
pub fn syndrome_round(c: &mut Circuit, block: &CodeBlock, anc: usize) -> Result<RoundBits> {
    block.check_d3()?;
    if block.contains(anc) {
        return Err(Error::QubitCollision(anc));
    }
    let [q1, q2, q3] = [block.q(0), block.q(1), block.q(2)];
    c.gate(Gate::Cnot { control: q1, target: anc })?;
    c.gate(Gate::Cnot { control: q2, target: anc })?;
    let s12 = c.measure(anc)?;
    c.reset(anc)?;
    c.gate(Gate::Cnot { control: q2, target: anc })?;
    c.gate(Gate::Cnot { control: q3, target: anc })?;
    let s23 = c.measure(anc)?;
    c.reset(anc)?;
    Ok([s12, s23])
}

/// Only the `Z1Z2` half of a round.
pub fn measure_z1z2(c: &mut Circuit, block: &CodeBlock, anc: usize) -> Result<usize> {
    block.check_d3()?;
    c.gate(Gate::Cnot { control: block.q(0), target: anc })?;
    c.gate(Gate::Cnot { control: block.q(1), target: anc })?;
    let b = c.measure(anc)?;
    c.reset(anc)?;
    Ok(b)
}

fn feedback_gates(c: &mut Circuit, block: &CodeBlock, bits: Vec<usize>, rule: impl Fn(&[bool]) -> Feedback + Copy) -> Result<()> {
    for (j, want) in [Feedback::X1, Feedback::X2, Feedback::X3].into_iter().enumerate() {
        let cond = Cond::from_fn(bits.clone(), move |v| rule(v) == want);
        c.conditional(Gate::X(block.q(j)), cond)?;
    }
    Ok(())
}

fn syndrome_of(v: &[bool], round: usize) -> Syndrome {
    Syndrome::from_bits(v[2 * round], v[2 * round + 1])
}

/// Single-round correction with the one-round table (not fault tolerant).
pub fn error_correct_single(c: &mut Circuit, block: &CodeBlock, anc: usize) -> Result<Vec<RoundBits>> {
    let r = syndrome_round(c, block, anc)?;
    feedback_gates(c, block, r.to_vec(), |v| decode_single(syndrome_of(v, 0)))?;
    Ok(vec![r])
}

/// Fault-tolerant correction with `rounds` ∈ {2, 3} syndrome rounds.
///
/// Two rounds use the double-round table. Three rounds take a majority over
/// whole syndrome pairs and apply the single-round feedback for the winning
/// pair; when all three pairs differ no feedback is applied. (A majority taken
/// separately per stabilizer is not fault tolerant: a flip of qubit 2 between
/// the two halves of the first round yields the votes (+,+), (−,−) and would
/// be decoded as a flip of qubit 3.)
pub fn error_correct(c: &mut Circuit, block: &CodeBlock, anc: usize, rounds: usize) -> Result<Vec<RoundBits>> {
    let hist: Vec<RoundBits> = (0..rounds).map(|_| syndrome_round(c, block, anc)).collect::<Result<_>>()?;
    let bits: Vec<usize> = hist.iter().flatten().copied().collect();
    match rounds {
        2 => feedback_gates(c, block, bits, |v| decode_double(syndrome_of(v, 0), syndrome_of(v, 1)))?,
        3 => feedback_gates(c, block, bits, |v| {
            let pairs = [syndrome_of(v, 0), syndrome_of(v, 1), syndrome_of(v, 2)];
            majority_vote(pairs).map(decode_single).unwrap_or(Feedback::I)
        })?,
        n => return Err(Error::Parse(format!("error correction supports 2 or 3 rounds, got {n}"))),
    }
    Ok(hist)
}

/// Syndrome-extraction circuit on qubits 0..3 with ancilla 3, preceded by an
/// idle location on each data qubit so that incoming errors are fault sites.
pub fn syndrome_circuit(rounds: usize) -> (Circuit, CodeBlock, Vec<RoundBits>) {
    let block = CodeBlock::at(0);
    let mut c = Circuit::new(4);
    for q in 0..3 {
        c.gate(Gate::I(q)).expect("valid qubit");
    }
    let hist = (0..rounds).map(|_| syndrome_round(&mut c, &block, 3).expect("valid layout")).collect();
    (c, block, hist)
}

/// Fault sites of [`syndrome_circuit`] in the customary location order:
/// locations 1–3 are the incoming data errors; in round `j` locations
/// `8j+4..=8j+7` are data wires (qubit 1, qubit 2 after each of its CNOTs,
/// qubit 3) and `8j+8..=8j+11` the ancilla after each CNOT.
pub fn location_order(c: &Circuit) -> Vec<FaultSite> {
    let sites = c.fault_sites(false);
    let mut out = sites[..3].to_vec();
    let rounds = (sites.len() - 3) / 8;
    for j in 0..rounds {
        let base = 3 + 8 * j;
        for k in [0, 2, 4, 6, 1, 3, 5, 7] {
            out.push(sites[base + k]);
        }
    }
    out
}

/// One attempt of the |0> factory on `batch` with ancilla `anc`: fresh
/// (possibly faulty) preparations, one `Z1Z2` and one `Z2Z3` check, and
/// rejection on any detection. Returns the qubit to hand out.
pub fn zero_factory(c: &mut Circuit, batch: &CodeBlock, anc: usize) -> Result<usize> {
    batch.check_d3()?;
    if batch.contains(anc) {
        return Err(Error::QubitCollision(anc));
    }
    for &q in batch.qubits() {
        c.reset(q)?;
    }
    c.reset(anc)?;
    let bits = syndrome_round(c, batch, anc)?;
    c.postselect(Cond::any(bits.to_vec()));
    Ok(batch.q(0))
}

/// Whether the instruction is part of the factory's noisy preparation.
pub fn is_preparation(ins: &Instruction) -> bool {
    matches!(ins, Instruction::Reset(_))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::NoiseSpec;
    use crate::sim::trajectory::{run_shot, shot_rng};
    use crate::sim::{BasisState, Backend};
    use proptest::prelude::*;

    fn run_basis(c: &Circuit, init: &[usize], flip_after: Option<FaultSite>) -> (Vec<bool>, u64) {
        // classical execution with an optional injected X
        let mut st = BasisState::zero(c.n_qubits());
        for &q in init {
            st.pauli(q, Pauli::X);
        }
        let mut rec = vec![false; c.n_bits()];
        for (i, ins) in c.instructions().iter().enumerate() {
            match ins {
                Instruction::Gate(g) => st.gate(g),
                Instruction::Conditional { gate, cond } => {
                    if cond.eval(&rec) {
                        st.gate(gate)
                    }
                }
                Instruction::Reset(q) => st.reset(*q, 0.0),
                Instruction::Measure { qubit, bit } => rec[*bit] = st.measure(*qubit, 0.0),
                _ => {}
            }
            if let Some(s) = flip_after {
                if s.instr == i {
                    st.pauli(s.qubit, Pauli::X);
                }
            }
        }
        (rec, st.bits())
    }

    #[test]
    fn single_table_matches() {
        assert_eq!(decode_single(Syndrome::from_signs(1, 1)), Feedback::I);
        assert_eq!(decode_single(Syndrome::from_signs(-1, 1)), Feedback::X1);
        assert_eq!(decode_single(Syndrome::from_signs(-1, -1)), Feedback::X2);
        assert_eq!(decode_single(Syndrome::from_signs(1, -1)), Feedback::X3);
        let mut seen: Vec<Feedback> = Syndrome::all().into_iter().map(decode_single).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), 4);
        assert_eq!(DecodeTable::single().len(), 4);
    }

    #[test]
    fn double_table_examples() {
        let s = Syndrome::from_signs;
        assert_eq!(decode_double(s(1, 1), s(-1, 1)), Feedback::X1);
        assert_eq!(decode_double(s(1, -1), s(-1, -1)), Feedback::X2);
        assert_eq!(decode_double(s(1, 1), s(1, -1)), Feedback::I);
        assert_eq!(decode_double(s(-1, -1), s(1, -1)), Feedback::I);
    }

    #[test]
    fn csv_roundtrip() {
        for t in [DecodeTable::single(), DecodeTable::double()] {
            let back = DecodeTable::from_csv(&t.to_csv()).unwrap();
            assert_eq!(back, t);
        }
        assert!(DecodeTable::from_csv("a,b\n").is_err());
        assert!(DecodeTable::from_csv("a,b,c\n1,2,I\n").is_err());
    }

    #[test]
    fn syndromes_of_single_flips() {
        let (c, _, hist) = syndrome_circuit(1);
        for (init, want) in [(vec![], (1, 1)), (vec![0], (-1, 1)), (vec![1], (-1, -1)), (vec![2], (1, -1))] {
            let (rec, _) = run_basis(&c, &init, None);
            let s = Syndrome::from_bits(rec[hist[0][0]], rec[hist[0][1]]);
            assert_eq!(s, Syndrome::from_signs(want.0, want.1));
        }
    }

    #[test]
    fn location_order_matches_single_round_syndromes() {
        let (c, _, hist) = syndrome_circuit(1);
        let locs = location_order(&c);
        assert_eq!(locs.len(), 11);
        let want = [(-1, 1), (-1, -1), (1, -1), (1, 1), (1, -1), (1, 1), (1, 1), (-1, 1), (-1, 1), (1, -1), (1, -1)];
        for (site, w) in locs.iter().zip(want) {
            let (rec, _) = run_basis(&c, &[], Some(*site));
            assert_eq!(Syndrome::from_bits(rec[hist[0][0]], rec[hist[0][1]]), Syndrome::from_signs(w.0, w.1));
        }
    }

    #[test]
    fn majority() {
        assert_eq!(majority_vote([1, 1, 0]), Some(1));
        assert_eq!(majority_vote([0, 0, 0]), Some(0));
        assert_eq!(majority_vote([0, 1, 1]), Some(1));
        let s = Syndrome::from_signs;
        assert_eq!(majority_vote([s(1, 1), s(-1, 1), s(1, -1)]), None);
    }

    #[test]
    fn logical_error_rate_examples() {
        assert_eq!(logical_error_rate(3, 0.0).unwrap(), 0.0);
        assert!((logical_error_rate(3, 0.1).unwrap() - 0.028).abs() < 1e-12);
        assert!((logical_error_rate(1, 0.37).unwrap() - 0.37).abs() < 1e-12);
        assert!(logical_error_rate(4, 0.1).is_err());
        assert!(logical_error_rate(3, 1.1).is_err());
    }

    #[test]
    fn block_validation() {
        assert!(CodeBlock::new(vec![0, 1]).is_err());
        assert!(CodeBlock::new(vec![0, 1, 1]).is_err());
        let mut c = Circuit::new(4);
        assert!(syndrome_round(&mut c, &CodeBlock::at(0), 2).is_err());
        assert!(encode(&mut c, &CodeBlock::at(0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn factory_accepts_first_attempt_when_noiseless() {
        let mut c = Circuit::new(4);
        let out = zero_factory(&mut c, &CodeBlock::at(0), 3).unwrap();
        let mut st = BasisState::zero(4);
        let r = run_shot(&c, &NoiseSpec::noiseless(), &mut st, &mut shot_rng(0, 0), |_, _, _| {});
        assert!(r.accepted);
        assert_eq!((st.bits() >> out) & 1, 0);
        // three data preparations plus at least one ancilla
        assert!(c.instructions().iter().filter(|i| is_preparation(i)).count() >= 4);
    }

    proptest! {
        #[test]
        fn d3_formula(p in 0.0f64..=1.0) {
            let got = logical_error_rate(3, p).unwrap();
            prop_assert!((got - (3.0 * p * p - 2.0 * p * p * p)).abs() < 1e-12);
        }

        #[test]
        fn decoders_total_on_arbitrary_bits(a: bool, b: bool, c: bool, d: bool) {
            let f = decode_double(Syndrome::from_bits(a, b), Syndrome::from_bits(c, d));
            prop_assert!(matches!(f, Feedback::I | Feedback::X1 | Feedback::X2 | Feedback::X3));
        }
    }
}
