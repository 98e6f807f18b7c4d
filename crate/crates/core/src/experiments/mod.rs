//! Numerical experiments: fidelity benchmark, Trotterized Ising dynamics,
//! VQE on a tapered two-qubit Hamiltonian, and the bias-leak sweep.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod benchmark;
pub mod fit;
pub mod ising;
pub mod machine;
pub mod sweep;
pub mod vqe;

pub use machine::{Compiled, LogicalMachine};

/// How logical operations are realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// One physical qubit per logical qubit.
    Bare,
    /// Repetition-code blocks and bias-preserving gadgets.
    Encoded,
    /// As `Encoded`, with two-round error correction inserted.
    EncodedEc,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Bare, Variant::Encoded, Variant::EncodedEc];

    pub fn is_encoded(self) -> bool {
        self != Variant::Bare
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Bare => "bare",
            Variant::Encoded => "encoded",
            Variant::EncodedEc => "encoded_ec",
        })
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "bare" => Ok(Variant::Bare),
            "encoded" => Ok(Variant::Encoded),
            "encoded_ec" | "encoded_with_ec" => Ok(Variant::EncodedEc),
            other => Err(Error::Parse(format!("unknown variant {other:?} (bare, encoded, encoded_ec)"))),
        }
    }
}

/// Sample mean and standard error.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct MeanErr {
    pub mean: f64,
    pub stderr: f64,
}

/// Streaming mean/variance accumulator (Welford), mergeable across chunks.
#[derive(Debug, Clone, Copy, Default)]
pub struct Stats {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Stats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, o: Stats) {
        if o.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = o;
            return;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        self.mean += d * o.n as f64 / n as f64;
        self.m2 += o.m2 + d * d * (self.n as f64 * o.n as f64) / n as f64;
        self.n = n;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn summary(&self) -> MeanErr {
        let stderr = if self.n == 0 { f64::NAN } else { (self.variance() / self.n as f64).sqrt() };
        MeanErr { mean: self.mean, stderr }
    }
}
