//! Signed Pauli strings over indexed qubits.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    /// Product of two single-qubit Paulis as (power of i, result).
    pub fn mul_with_phase(self, rhs: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, rhs) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, Z) => (1, X),
            (Z, X) => (1, Y),
            (Y, X) => (3, Z),
            (Z, Y) => (3, X),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }

    pub fn anticommutes(self, other: Pauli) -> bool {
        self != Pauli::I && other != Pauli::I && self != other
    }

    /// 2x2 matrix in row-major order.
    pub fn matrix(self) -> [[Complex64; 2]; 2] {
        let o = Complex64::new(0.0, 0.0);
        let l = Complex64::new(1.0, 0.0);
        let i = Complex64::new(0.0, 1.0);
        match self {
            Pauli::I => [[l, o], [o, l]],
            Pauli::X => [[o, l], [l, o]],
            Pauli::Y => [[o, -i], [i, o]],
            Pauli::Z => [[l, o], [o, -l]],
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Global phase restricted to the fourth roots of unity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Phase(u8);

impl Phase {
    pub const PLUS_ONE: Phase = Phase(0);
    pub const PLUS_I: Phase = Phase(1);
    pub const MINUS_ONE: Phase = Phase(2);
    pub const MINUS_I: Phase = Phase(3);

    pub fn from_power(k: u8) -> Phase {
        Phase(k % 4)
    }

    pub fn power(self) -> u8 {
        self.0
    }

    pub fn is_real(self) -> bool {
        self.0.is_multiple_of(2)
    }

    pub fn to_complex(self) -> Complex64 {
        match self.0 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl Mul for Phase {
    type Output = Phase;
    fn mul(self, rhs: Phase) -> Phase {
        Phase::from_power(self.0 + rhs.0)
    }
}

impl fmt::Display for Phase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self.0 {
            0 => "+",
            1 => "+i",
            2 => "-",
            _ => "-i",
        })
    }
}

/// A phase times a tensor product of single-qubit Paulis. Identity letters are
/// never stored, so two equal operators compare equal structurally.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct PauliString {
    phase: Phase,
    letters: BTreeMap<usize, Pauli>,
}

impl PauliString {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(qubit: usize, pauli: Pauli) -> Self {
        let mut s = Self::identity();
        s.set(qubit, pauli);
        s
    }

    pub fn from_letters(letters: impl IntoIterator<Item = (usize, Pauli)>) -> Self {
        let mut s = Self::identity();
        for (q, p) in letters {
            s = s * PauliString::single(q, p);
        }
        s
    }

    pub fn with_phase(mut self, phase: Phase) -> Self {
        self.phase = phase;
        self
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn get(&self, qubit: usize) -> Pauli {
        self.letters.get(&qubit).copied().unwrap_or(Pauli::I)
    }

    fn set(&mut self, qubit: usize, pauli: Pauli) {
        if pauli == Pauli::I {
            self.letters.remove(&qubit);
        } else {
            self.letters.insert(qubit, pauli);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        self.letters.iter().map(|(&q, &p)| (q, p))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.letters.keys().copied()
    }

    pub fn weight(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn max_qubit(&self) -> Option<usize> {
        self.letters.keys().next_back().copied()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .iter()
            .filter(|&(q, p)| p.anticommutes(other.get(q)))
            .count();
        anti % 2 == 0
    }

    /// Per qubit, the non-identity letters of both strings agree.
    pub fn qubitwise_compatible(&self, other: &PauliString) -> bool {
        self.iter().all(|(q, p)| {
            let o = other.get(q);
            o == Pauli::I || o == p
        })
    }

    /// Bit masks (x, z) of the letters, for qubits below 64.
    pub fn xz_masks(&self) -> (u64, u64) {
        let mut x = 0u64;
        let mut z = 0u64;
        for (q, p) in self.iter() {
            let m = 1u64 << q;
            match p {
                Pauli::X => x |= m,
                Pauli::Z => z |= m,
                Pauli::Y => {
                    x |= m;
                    z |= m;
                }
                Pauli::I => {}
            }
        }
        (x, z)
    }
}

impl Mul for PauliString {
    type Output = PauliString;
    fn mul(self, rhs: PauliString) -> PauliString {
        &self * &rhs
    }
}

impl Mul for &PauliString {
    type Output = PauliString;
    fn mul(self, rhs: &PauliString) -> PauliString {
        let mut out = self.clone();
        let mut k = rhs.phase.power();
        for (q, p) in rhs.iter() {
            let (dk, r) = out.get(q).mul_with_phase(p);
            k += dk;
            out.set(q, r);
        }
        out.phase = out.phase * Phase::from_power(k);
        out
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.phase)?;
        if self.letters.is_empty() {
            return f.write_str("I");
        }
        let mut first = true;
        for (q, p) in self.iter() {
            if !first {
                f.write_str(" ")?;
            }
            first = false;
            write!(f, "{}{}", p.letter(), q)?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Accepts an optional phase prefix (`+`, `-`, `+i`, `-i`, `i`) followed by
    /// letter/index pairs such as `X0 Z1` or `X0Z1`. A bare `I` is the identity.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bytes = s.as_bytes();
        let mut pos = 0;
        let mut phase = Phase::PLUS_ONE;
        if pos < bytes.len() && (bytes[pos] == b'+' || bytes[pos] == b'-') {
            if bytes[pos] == b'-' {
                phase = Phase::MINUS_ONE;
            }
            pos += 1;
        }
        if pos < bytes.len() && bytes[pos] == b'i' {
            phase = phase * Phase::PLUS_I;
            pos += 1;
        }
        let mut out = PauliString::identity();
        let mut seen_any = false;
        while pos < bytes.len() {
            let c = bytes[pos];
            if c.is_ascii_whitespace() || c == b'*' {
                pos += 1;
                continue;
            }
            let pauli = match c {
                b'I' => Pauli::I,
                b'X' => Pauli::X,
                b'Y' => Pauli::Y,
                b'Z' => Pauli::Z,
                _ => return Err(Error::Parse(format!("unexpected character {:?} in {s:?}", c as char))),
            };
            pos += 1;
            let start = pos;
            while pos < bytes.len() && bytes[pos].is_ascii_digit() {
                pos += 1;
            }
            if start == pos {
                if pauli == Pauli::I {
                    seen_any = true;
                    continue;
                }
                return Err(Error::Parse(format!("missing qubit index after {:?} in {s:?}", c as char)));
            }
            let q: usize = s[start..pos]
                .parse()
                .map_err(|_| Error::Parse(format!("bad qubit index in {s:?}")))?;
            if q >= 64 {
                return Err(Error::Parse(format!("qubit index {q} too large")));
            }
            if out.get(q) != Pauli::I {
                return Err(Error::Parse(format!("qubit {q} appears twice in {s:?}")));
            }
            out.set(q, pauli);
            seen_any = true;
        }
        if !seen_any {
            return Err(Error::Parse(format!("empty Pauli string {s:?}")));
        }
        out.phase = phase;
        Ok(out)
    }
}
