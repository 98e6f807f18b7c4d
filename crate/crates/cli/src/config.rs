//! Run configuration: built-in defaults, then an optional TOML file, then
//! command-line flags, each layer overriding the previous one.
//!
//! File schema (every key optional, unknown keys rejected):
//!
//! ```toml
//! command   = "benchmark"       # verify-gadgets | benchmark | ising | vqe | epsilon-sweep | tables
//! seed      = 1
//! p         = 0.001             # physical error rate per gate wire
//! epsilon   = 0.0               # bias leak: fraction of faults that are Y or Z
//! shots     = 10000             # benchmark/ising: shots; vqe/sweep: accepted shots per group
//! variants  = ["bare", "encoded", "encoded_ec"]
//! depths    = [1, 8, 64, 512]   # benchmark layer counts
//! steps     = 50                # ising Trotter steps
//! h         = 1.0               # ising transverse field
//! delta     = 0.1               # ising Trotter step
//! epsilons  = [0.0, 1e-4, 1e-3] # epsilon-sweep values
//! estimator = "sampled"         # sampled | exact
//! restarts  = 5                 # vqe optimizer restarts
//! out       = "results.csv"
//! format    = "csv"             # csv | json
//! threads   = 4
//! ```

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use bitflip::experiments::vqe::Estimator;
use bitflip::experiments::Variant;
use bitflip::NoiseSpec;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    VerifyGadgets,
    Benchmark,
    Ising,
    Vqe,
    EpsilonSweep,
    Tables,
}

impl Command {
    pub const ALL: [Command; 6] =
        [Command::VerifyGadgets, Command::Benchmark, Command::Ising, Command::Vqe, Command::EpsilonSweep, Command::Tables];

    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyGadgets => "verify-gadgets",
            Command::Benchmark => "benchmark",
            Command::Ising => "ising",
            Command::Vqe => "vqe",
            Command::EpsilonSweep => "epsilon-sweep",
            Command::Tables => "tables",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| CliError::Config(format!("unknown command {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

pub fn parse_estimator(s: &str) -> Result<Estimator, CliError> {
    match s.trim().to_ascii_lowercase().as_str() {
        "sampled" => Ok(Estimator::Sampled),
        "exact" => Ok(Estimator::Exact),
        o => Err(CliError::Config(format!("unknown estimator {o:?} (sampled, exact)"))),
    }
}

/// Keys accepted in a config file.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<String>,
    pub seed: Option<u64>,
    pub p: Option<f64>,
    pub epsilon: Option<f64>,
    pub shots: Option<u64>,
    pub variants: Option<Vec<String>>,
    pub depths: Option<Vec<usize>>,
    pub steps: Option<usize>,
    pub h: Option<f64>,
    pub delta: Option<f64>,
    pub epsilons: Option<Vec<f64>>,
    pub estimator: Option<String>,
    pub restarts: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub threads: Option<usize>,
}

impl FileConfig {
    /// Parse TOML; errors carry the line and the offending key.
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }
}

/// Fully resolved settings for one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub seed: u64,
    pub p: f64,
    pub epsilon: f64,
    pub shots: u64,
    pub variants: Vec<Variant>,
    pub depths: Vec<usize>,
    pub steps: usize,
    pub h: f64,
    pub delta: f64,
    pub epsilons: Vec<f64>,
    pub estimator: Estimator,
    pub restarts: usize,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn defaults(command: Command) -> Self {
        RunConfig {
            command,
            seed: 1,
            p: 1e-3,
            epsilon: 0.0,
            shots: 10_000,
            variants: Variant::ALL.to_vec(),
            depths: vec![1, 8, 64, 512],
            steps: 50,
            h: 1.0,
            delta: 0.1,
            epsilons: vec![0.0, 1e-4, 1e-3, 1e-2, 1e-1, 2.0 / 3.0],
            estimator: Estimator::Sampled,
            restarts: 5,
            out: None,
            format: if command == Command::VerifyGadgets { Format::Json } else { Format::Csv },
            threads: None,
        }
    }

    /// Overlay the keys present in a config file.
    pub fn apply_file(&mut self, f: &FileConfig) -> Result<(), CliError> {
        macro_rules! take {
            ($($k:ident),*) => { $( if let Some(v) = f.$k.clone() { self.$k = v; } )* };
        }
        take!(seed, p, epsilon, shots, depths, steps, h, delta, epsilons, restarts);
        if let Some(v) = &f.variants {
            self.variants = parse_variants(v)?;
        }
        if let Some(e) = &f.estimator {
            self.estimator = parse_estimator(e)?;
        }
        if f.out.is_some() {
            self.out = f.out.clone();
        }
        if let Some(fmt) = f.format {
            self.format = fmt;
        }
        if f.threads.is_some() {
            self.threads = f.threads;
        }
        Ok(())
    }

    pub fn noise(&self) -> Result<NoiseSpec, CliError> {
        NoiseSpec::new(self.p, self.epsilon).map_err(|e| CliError::Config(format!("noise: {e}")))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        self.noise()?;
        if self.shots == 0 {
            return bad("shots must be positive".into());
        }
        if self.variants.is_empty() {
            return bad("at least one variant is required".into());
        }
        if self.depths.is_empty() || self.depths.contains(&0) {
            return bad(format!("depths must be positive, got {:?}", self.depths));
        }
        if self.steps == 0 {
            return bad("steps must be positive".into());
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) || !self.h.is_finite() {
            return bad(format!("invalid Ising parameters h={} delta={}", self.h, self.delta));
        }
        if let Some(e) = self.epsilons.iter().find(|e| !(0.0..=1.0).contains(*e)) {
            return bad(format!("epsilon {e} outside [0, 1]"));
        }
        if self.command == Command::EpsilonSweep && self.epsilons.is_empty() {
            return bad("epsilon-sweep needs at least one epsilon".into());
        }
        if self.restarts == 0 {
            return bad("restarts must be positive".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be positive".into());
        }
        if let Some(out) = &self.out {
            let dir = out.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(std::path::Path::new("."));
            if !dir.is_dir() {
                return bad(format!("output directory {} does not exist", dir.display()));
            }
        }
        Ok(())
    }

    /// SHA-256 over the settings that determine the results; output
    /// location, format and thread count are excluded.
    pub fn hash(&self) -> String {
        let mut canon = self.clone();
        canon.out = None;
        canon.threads = None;
        canon.format = Format::Csv;
        let json = serde_json::to_string(&canon).expect("config serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn parse_variants(items: &[String]) -> Result<Vec<Variant>, CliError> {
    let mut out = Vec::new();
    for (i, s) in items.iter().enumerate() {
        let v: Variant = s.parse().map_err(|e| CliError::Config(format!("variants[{i}]: {e}")))?;
        if !out.contains(&v) {
            out.push(v);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_overrides_defaults() {
        let f = FileConfig::from_toml_str("seed = 9\nvariants = [\"encoded\"]\ndepths = [2]\nformat = \"json\"").unwrap();
        let mut c = RunConfig::defaults(Command::Benchmark);
        c.apply_file(&f).unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.variants, vec![Variant::Encoded]);
        assert_eq!(c.depths, vec![2]);
        assert_eq!(c.format, Format::Json);
        assert!(c.validate().is_ok());
    }

    #[test]
    fn schema_errors_name_the_key() {
        let e = FileConfig::from_toml_str("sedd = 1").unwrap_err().to_string();
        assert!(e.contains("sedd"), "{e}");
        let e = FileConfig::from_toml_str("seed = \"x\"").unwrap_err().to_string();
        assert!(e.contains("line 1"), "{e}");
        let f = FileConfig::from_toml_str("variants = [\"bare\", \"qudit\"]").unwrap();
        let e = RunConfig::defaults(Command::Vqe).apply_file(&f).unwrap_err().to_string();
        assert!(e.contains("variants[1]"), "{e}");
    }

    #[test]
    fn validation() {
        let mut c = RunConfig::defaults(Command::Ising);
        c.p = 1.5;
        assert!(c.validate().is_err());
        let mut c = RunConfig::defaults(Command::Ising);
        c.shots = 0;
        assert!(c.validate().is_err());
        let mut c = RunConfig::defaults(Command::Ising);
        c.out = Some("/definitely/not/here/x.csv".into());
        assert!(c.validate().is_err());
    }

    #[test]
    fn hash_ignores_plumbing() {
        let a = RunConfig::defaults(Command::Benchmark);
        let mut b = a.clone();
        b.threads = Some(3);
        b.out = Some("x.csv".into());
        assert_eq!(a.hash(), b.hash());
        b.seed = 2;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 64);
    }

    #[test]
    fn command_names_roundtrip() {
        for c in Command::ALL {
            assert_eq!(c.name().parse::<Command>().unwrap(), c);
        }
        assert!("nope".parse::<Command>().is_err());
    }
}
