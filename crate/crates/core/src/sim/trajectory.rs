//! Monte Carlo trajectories with sampled Pauli faults, and a deterministic
//! parallel shot driver.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::Backend;
use crate::circuit::{Circuit, Instruction};
use crate::error::{Error, Result};
use crate::gate::GateQubits;
use crate::noise::{FaultClock, NoiseSpec};
use crate::pauli::Pauli;

/// Shots are grouped into fixed-size chunks that are reduced in index order,
/// which makes every tally independent of the number of worker threads.
pub const CHUNK: u64 = 1024;

/// Independent stream for shot `shot` under master seed `seed`.
pub fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(shot);
    r
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShotResult {
    pub accepted: bool,
    pub record: Vec<bool>,
    /// Index of the instruction that rejected the shot, if any.
    pub rejected_at: Option<usize>,
}

/// Run one noisy trajectory on `state`.
///
/// Every wire of every executed gate faults independently with probability
/// `p`; the Pauli is drawn from the noise bias. `observe(tag, state, record)`
/// is called at each checkpoint reached before any rejection.
pub fn run_shot<B: Backend, R: Rng>(
    circuit: &Circuit,
    noise: &NoiseSpec,
    state: &mut B,
    rng: &mut R,
    mut observe: impl FnMut(usize, &B, &[bool]),
) -> ShotResult {
    let mut record = vec![false; circuit.n_bits()];
    let mut clock = FaultClock::new(noise.p(), rng);
    for (idx, ins) in circuit.instructions().iter().enumerate() {
        match ins {
            Instruction::Gate(g) => {
                state.gate(g);
                wire_faults(g.qubits(), noise, state, &mut clock, rng);
            }
            Instruction::Conditional { gate, cond } => {
                if cond.eval(&record) {
                    state.gate(gate);
                    wire_faults(gate.qubits(), noise, state, &mut clock, rng);
                }
            }
            Instruction::Reset(q) => {
                state.reset(*q, rng.gen());
                if noise.noisy_prep() && clock.tick(rng) {
                    state.pauli(*q, Pauli::X);
                }
            }
            Instruction::Measure { qubit, bit } => {
                record[*bit] = state.measure(*qubit, rng.gen());
            }
            Instruction::Postselect { reject } => {
                if reject.eval(&record) {
                    return ShotResult { accepted: false, record, rejected_at: Some(idx) };
                }
            }
            Instruction::Checkpoint(tag) => observe(*tag, state, &record),
        }
    }
    ShotResult { accepted: true, record, rejected_at: None }
}

#[inline]
fn wire_faults<B: Backend, R: Rng>(qubits: GateQubits, noise: &NoiseSpec, state: &mut B, clock: &mut FaultClock, rng: &mut R) {
    let mut hit = |q: usize| {
        if clock.tick(rng) {
            let letter = if noise.epsilon() == 0.0 { Pauli::X } else { noise.fault_letter(rng.gen()) };
            state.pauli(q, letter);
        }
    };
    match qubits {
        GateQubits::One(q) => hit(q),
        GateQubits::Two(a, b) => {
            hit(a);
            hit(b);
        }
    }
}

/// Fail early if a circuit is run on a backend that cannot represent it.
pub fn require_classical(circuit: &Circuit) -> Result<()> {
    for ins in circuit.instructions() {
        if let Instruction::Gate(g) | Instruction::Conditional { gate: g, .. } = ins {
            if !g.is_classical() {
                return Err(Error::NonClassicalGate(g.to_string()));
            }
        }
    }
    Ok(())
}

/// Map `per_shot` over shots `0..n_shots` in parallel and fold the results.
/// Chunks are folded independently and merged in chunk order.
pub fn parallel_fold<T, F, M>(n_shots: u64, init: impl Fn() -> T + Sync, per_shot: F, merge: M) -> T
where
    T: Send,
    F: Fn(u64, &mut T) + Sync,
    M: Fn(&mut T, T),
{
    let n_chunks = n_shots.div_ceil(CHUNK);
    let parts: Vec<T> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = init();
            for shot in c * CHUNK..((c + 1) * CHUNK).min(n_shots) {
                per_shot(shot, &mut acc);
            }
            acc
        })
        .collect();
    let mut total = init();
    for p in parts {
        merge(&mut total, p);
    }
    total
}

/// Draw shots in index order until `target` of them return `Some`. Returns the
/// accepted values in shot order and the number of raw shots consumed.
/// Gives up after `max_raw` raw shots.
pub fn collect_accepted<T, F>(target: u64, max_raw: u64, per_shot: F) -> (Vec<T>, u64)
where
    T: Send,
    F: Fn(u64) -> Option<T> + Sync,
{
    let mut out: Vec<T> = Vec::with_capacity(target as usize);
    let mut next = 0u64;
    while (out.len() as u64) < target && next < max_raw {
        let missing = target - out.len() as u64;
        // guess a batch size from the acceptance seen so far
        let rate = if next == 0 { 1.0 } else { (out.len() as f64 / next as f64).max(0.01) };
        let want = ((missing as f64 / rate) * 1.1) as u64 + CHUNK;
        let batch = want.div_ceil(CHUNK) * CHUNK;
        let end = (next + batch).min(max_raw);
        let n_chunks = (end - next).div_ceil(CHUNK);
        let parts: Vec<Vec<(u64, T)>> = (0..n_chunks)
            .into_par_iter()
            .map(|c| {
                let lo = next + c * CHUNK;
                let hi = (lo + CHUNK).min(end);
                (lo..hi).filter_map(|s| per_shot(s).map(|v| (s, v))).collect()
            })
            .collect();
        for (s, v) in parts.into_iter().flatten() {
            if (out.len() as u64) < target {
                out.push(v);
                next = s + 1;
            }
        }
        if (out.len() as u64) < target {
            next = end;
        }
    }
    (out, next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::Cond;
    use crate::gate::Gate;
    use crate::sim::{BasisState, SparseState, StateVector};

    #[test]
    fn noiseless_shot_follows_circuit() {
        let mut c = Circuit::new(2);
        c.gate(Gate::X(0)).unwrap();
        c.gate(Gate::Cnot { control: 0, target: 1 }).unwrap();
        let b = c.measure(1).unwrap();
        c.conditional(Gate::X(1), Cond::bit(b)).unwrap();
        let mut st = BasisState::zero(2);
        let r = run_shot(&c, &NoiseSpec::noiseless(), &mut st, &mut shot_rng(1, 0), |_, _, _| {});
        assert!(r.accepted && r.record[0]);
        assert_eq!(st.bits(), 0b01);
    }

    #[test]
    fn backends_agree_shot_by_shot() {
        let mut c = Circuit::new(3);
        c.gate(Gate::X(0)).unwrap();
        c.gate(Gate::Cnot { control: 0, target: 1 }).unwrap();
        c.gate(Gate::Cnot { control: 1, target: 2 }).unwrap();
        c.gate(Gate::S(2)).unwrap();
        for q in 0..3 {
            c.measure(q).unwrap();
        }
        let noise = NoiseSpec::bit_flip(0.2).unwrap();
        for shot in 0..200 {
            let a = run_shot(&c, &noise, &mut BasisState::zero(3), &mut shot_rng(5, shot), |_, _, _| {});
            let b = run_shot(&c, &noise, &mut SparseState::zero(3), &mut shot_rng(5, shot), |_, _, _| {});
            let d = run_shot(&c, &noise, &mut StateVector::zero(3), &mut shot_rng(5, shot), |_, _, _| {});
            assert_eq!(a.record, b.record);
            assert_eq!(b.record, d.record);
        }
    }

    #[test]
    fn fold_is_deterministic() {
        let f = |n| parallel_fold(n, || 0u64, |s, acc| *acc += shot_rng(3, s).gen::<u32>() as u64 % 7, |a, b| *a += b);
        assert_eq!(f(5000), f(5000));
        assert_eq!(f(0), 0);
    }

    #[test]
    fn collect_accepted_takes_prefix() {
        let (v, raw) = collect_accepted(100, 1_000_000, |s| (s % 3 == 0).then_some(s));
        assert_eq!(v.len(), 100);
        assert_eq!(v[99], 297);
        assert_eq!(raw, 298);
        let (v, raw) = collect_accepted(10, 50, |_| None::<u64>);
        assert!(v.is_empty());
        assert_eq!(raw, 50);
    }
}
