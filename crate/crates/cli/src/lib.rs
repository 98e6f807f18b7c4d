//! Command-line driver: gadget verification, decode tables and the
//! benchmark, Ising and VQE experiments, with CSV or JSON output.

pub mod config;

use std::fmt::Write as _;
use std::path::PathBuf;

use bitflip::experiments::benchmark::{run_benchmark, BenchmarkConfig};
use bitflip::experiments::fit::discard_rate_fit;
use bitflip::experiments::ising::{dense_trotter_series, integrated_error, run_ising, IsingConfig};
use bitflip::experiments::sweep::{default_groups, epsilon_sweep, SweepConfig};
use bitflip::experiments::vqe::{optimize_ansatz, vqe_energy, Observable, VqeConfig};
use bitflip::oracle::{verify_all, ErrorExpansion, OracleOptions, Status};
use bitflip::repcode::DecodeTable;
use clap::Parser;
use serde::Serialize;
use serde_json::json;

pub use config::{Command, FileConfig, Format, RunConfig};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) | CliError::Io { .. } => 3,
        }
    }
}

impl From<bitflip::Error> for CliError {
    fn from(e: bitflip::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl clap::ValueEnum for Command {
    fn value_variants<'a>() -> &'a [Self] {
        &Command::ALL
    }

    fn to_possible_value(&self) -> Option<clap::builder::PossibleValue> {
        Some(clap::builder::PossibleValue::new(self.name()))
    }
}

/// Flags override the config file, which overrides the built-in defaults.
#[derive(Debug, Parser)]
#[command(name = "bitflip", version, about = "Bias-preserving gadgets on the bit-flip repetition code")]
pub struct Cli {
    /// Workflow to run; may instead be given as `command` in the config file.
    #[arg(value_enum)]
    pub command: Option<Command>,
    /// TOML config file (see the README for the schema).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Physical error rate per gate wire.
    #[arg(long)]
    pub p: Option<f64>,
    /// Fraction of faults that are Y or Z instead of X.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Comma-separated epsilon values for epsilon-sweep.
    #[arg(long, value_delimiter = ',')]
    pub epsilons: Option<Vec<f64>>,
    /// Shots (benchmark, ising) or accepted shots per measurement group (vqe, epsilon-sweep).
    #[arg(long)]
    pub shots: Option<u64>,
    /// Benchmark depth; repeat for several.
    #[arg(long, alias = "d")]
    pub depth: Vec<usize>,
    /// Ising Trotter steps.
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// bare, encoded or encoded_ec; repeat for several.
    #[arg(long)]
    pub variant: Vec<String>,
    /// sampled or exact.
    #[arg(long)]
    pub estimator: Option<String>,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    pub threads: Option<usize>,
}

impl Cli {
    /// Resolve defaults, config file and flags into one validated config.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let file = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                FileConfig::from_toml_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let command = match (self.command, &file.command) {
            (Some(c), _) => c,
            (None, Some(s)) => s.parse()?,
            (None, None) => return Err(CliError::Config("no command given".into())),
        };
        let mut cfg = RunConfig::defaults(command);
        cfg.apply_file(&file)?;
        if file.format.is_none() && self.format.is_none() {
            cfg.format = RunConfig::defaults(command).format;
        }
        macro_rules! flag {
            ($($k:ident),*) => { $( if let Some(v) = self.$k.clone() { cfg.$k = v; } )* };
        }
        flag!(p, epsilon, epsilons, shots, steps, seed, format);
        if !self.depth.is_empty() {
            cfg.depths = self.depth.clone();
        }
        if !self.variant.is_empty() {
            cfg.variants = config::parse_variants(&self.variant)?;
        }
        if let Some(e) = &self.estimator {
            cfg.estimator = config::parse_estimator(e)?;
        }
        if self.out.is_some() {
            cfg.out = self.out.clone();
        }
        if self.threads.is_some() {
            cfg.threads = self.threads;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// What a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub text: String,
    /// Set when verify-gadgets found a mismatch or a violation.
    pub verification_failed: bool,
    /// Human-readable notes for stderr.
    pub summary: Vec<String>,
}

/// Parse arguments, run, write output. Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match cli.resolve().and_then(|cfg| execute(&cfg)) {
        Ok(out) => {
            for line in &out.summary {
                eprintln!("{line}");
            }
            if out.verification_failed {
                1
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

/// Run `cfg` on a pool of the requested size and write the result.
pub fn execute(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        pool = pool.num_threads(n);
    }
    let pool = pool.build().map_err(|e| CliError::Runtime(e.to_string()))?;
    let out = pool.install(|| dispatch(cfg))?;
    match &cfg.out {
        Some(path) => std::fs::write(path, &out.text).map_err(|source| CliError::Io { path: path.display().to_string(), source })?,
        None => print!("{}", out.text),
    }
    Ok(out)
}

/// Run the workflow named by `cfg.command` and render its output.
pub fn dispatch(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    match cfg.command {
        Command::VerifyGadgets => verify(cfg),
        Command::Benchmark => benchmark(cfg),
        Command::Ising => ising(cfg),
        Command::Vqe => vqe(cfg),
        Command::EpsilonSweep => sweep(cfg),
        Command::Tables => Ok(tables(cfg)),
    }
}

fn header(cfg: &RunConfig, extra: &[(&str, String)]) -> String {
    let mut h = format!(
        "# bitflip {VERSION}\n# command: {}\n# config_hash: {}\n# seed: {}\n",
        cfg.command,
        cfg.hash(),
        cfg.seed
    );
    for (k, v) in extra {
        let _ = writeln!(h, "# {k}: {v}");
    }
    h
}

fn envelope(cfg: &RunConfig, body: serde_json::Value) -> String {
    let doc = json!({
        "tool": format!("bitflip {VERSION}"),
        "command": cfg.command,
        "config_hash": cfg.hash(),
        "seed": cfg.seed,
        "config": cfg,
        "result": body,
    });
    serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
}

fn render<R: Serialize>(cfg: &RunConfig, extra: &[(&str, String)], columns: &str, rows: &[R], line: impl Fn(&R) -> String) -> String {
    match cfg.format {
        Format::Json => envelope(cfg, json!({ "rows": rows })),
        Format::Csv => {
            let mut s = header(cfg, extra);
            s.push_str(columns);
            s.push('\n');
            for r in rows {
                s.push_str(&line(r));
                s.push('\n');
            }
            s
        }
    }
}

fn fmt_expansion(e: &ErrorExpansion) -> String {
    let blocks: Vec<String> =
        e.x.iter().map(|b| b.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(" ")).collect();
    format!("1-{}p [{}]", e.deficit(), blocks.join(" | "))
}

fn verify(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let opts = OracleOptions { seed: cfg.seed, ..OracleOptions::default() };
    let suite = verify_all(&opts)?;
    let failed = !suite.all_pass();
    let summary = vec![format!(
        "{} of 11 reference expansions reproduced; {} bias violations; naive S control {}",
        suite.expansions_passed(),
        suite.gadget_violations,
        if suite.control.violation_detected { "flagged" } else { "NOT flagged" }
    )];
    let text = match cfg.format {
        Format::Json => envelope(cfg, json!({ "all_pass": !failed, "catalog": bitflip::gadgets::catalog()?, "suite": suite })),
        Format::Csv => {
            let mut s = header(cfg, &[("bias_violations", suite.gadget_violations.to_string())]);
            s.push_str("id,name,label,convention,status,expected,derived,max_difference\n");
            for c in &suite.checks {
                let label = c.label.map_or("-".to_string(), |b| (b as u8).to_string());
                let _ = writeln!(
                    s,
                    "{},{},{label},{:?},{},{},{},{:e}",
                    c.id,
                    c.name.replace(',', ";"),
                    c.convention,
                    if c.status == Status::Pass { "PASS" } else { "FAIL" },
                    fmt_expansion(&c.expected),
                    fmt_expansion(&c.derived),
                    c.max_difference
                );
            }
            s
        }
    };
    Ok(RunOutput { text, verification_failed: failed, summary })
}

fn benchmark(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let mut rows = Vec::new();
    for &variant in &cfg.variants {
        for &depth in &cfg.depths {
            rows.push(run_benchmark(&BenchmarkConfig { depth, p: cfg.p, shots: cfg.shots, variant }, cfg.seed)?);
        }
    }
    let text = render(cfg, &[], "variant,d,p,shots,F,stderr", &rows, |r| {
        format!("{},{},{},{},{},{}", r.variant, r.depth, r.p, r.shots, r.fidelity, r.stderr)
    });
    Ok(RunOutput { text, verification_failed: false, summary: vec![] })
}

fn ising(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let noise = cfg.noise()?;
    let dense = dense_trotter_series(2, cfg.h, cfg.delta, cfg.steps);
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for &variant in &cfg.variants {
        let ic = IsingConfig { n_sites: 2, h: cfg.h, delta: cfg.delta, n_trot: cfg.steps, shots: cfg.shots, variant };
        let res = run_ising(&ic, &noise, cfg.seed)?;
        let m = res.magnetization();
        let e = integrated_error(&dense[1..], &m[1..])?;
        let t: Vec<f64> = res.rows.iter().map(|r| r.t).collect();
        let y: Vec<f64> = res.rows.iter().map(|r| r.discard_rate).collect();
        let fit = match discard_rate_fit(&t, &y) {
            Ok(f) => format!("{:.4}", f.a),
            Err(_) => "n/a".into(),
        };
        summary.push(format!("{variant}: integrated error {e:.5}, discard-rate fit a = {fit}"));
        rows.extend(res.rows.into_iter().map(|r| (variant, r)));
    }
    #[derive(Serialize)]
    struct Row {
        variant: bitflip::experiments::Variant,
        #[serde(flatten)]
        row: bitflip::experiments::ising::IsingRow,
    }
    let rows: Vec<Row> = rows.into_iter().map(|(variant, row)| Row { variant, row }).collect();
    let text = render(cfg, &[("raw_shots", cfg.shots.to_string())], "variant,step,t,M,M_stderr,discard_rate", &rows, |r| {
        format!("{},{},{},{},{},{}", r.variant, r.row.step, r.row.t, r.row.m, r.row.m_stderr, r.row.discard_rate)
    });
    Ok(RunOutput { text, verification_failed: false, summary })
}

fn optimum(cfg: &RunConfig, obs: &Observable) -> Result<([f64; 4], Vec<String>), CliError> {
    let opt = optimize_ansatz(obs, cfg.restarts, cfg.seed)?;
    let exact = obs.ground_energy();
    let note = format!("exact ground energy {exact:.6} Ha; noiseless optimum {:.8} Ha at θ = {:?}", opt.energy, opt.theta);
    Ok((opt.theta, vec![note]))
}

fn vqe(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let obs = Observable::caffeine();
    let groups = default_groups(&obs)?;
    let (theta, mut summary) = optimum(cfg, &obs)?;
    let noise = cfg.noise()?;
    let mut rows = Vec::new();
    for &variant in &cfg.variants {
        let vc = VqeConfig { variant, shots_per_group: cfg.shots, estimator: cfg.estimator };
        let e = vqe_energy(&obs, &groups, &theta, &vc, &noise, cfg.seed)?;
        summary.push(format!("{variant}: |E - E_exact| = {:.3e} Ha", (e.energy - obs.ground_energy()).abs()));
        rows.push(e);
    }
    let text = render(cfg, &[], "variant,epsilon,energy,stderr,accepted_shots,raw_shots", &rows, |r| {
        format!("{},{},{},{},{},{}", r.variant, r.epsilon, r.energy, r.stderr, r.accepted_shots, r.raw_shots)
    });
    Ok(RunOutput { text, verification_failed: false, summary })
}

fn sweep(cfg: &RunConfig) -> Result<RunOutput, CliError> {
    let obs = Observable::caffeine();
    let (theta, summary) = optimum(cfg, &obs)?;
    let sc = SweepConfig {
        epsilons: cfg.epsilons.clone(),
        p: cfg.p,
        variants: cfg.variants.clone(),
        shots_per_group: cfg.shots,
        estimator: cfg.estimator,
        theta,
    };
    let rows = epsilon_sweep(&obs, &default_groups(&obs)?, &sc, cfg.seed)?;
    let text = render(cfg, &[], "variant,epsilon,energy,stderr,abs_error,accepted_shots,raw_shots", &rows, |r| {
        format!("{},{},{},{},{},{},{}", r.variant, r.epsilon, r.energy, r.stderr, r.abs_error, r.accepted_shots, r.raw_shots)
    });
    Ok(RunOutput { text, verification_failed: false, summary })
}

fn tables(cfg: &RunConfig) -> RunOutput {
    let (single, double) = (DecodeTable::single(), DecodeTable::double());
    let text = match cfg.format {
        Format::Csv => format!("# single-round decoding\n{}\n# double-round decoding\n{}", single.to_csv(), double.to_csv()),
        Format::Json => {
            let rows = |t: &DecodeTable| -> Vec<serde_json::Value> {
                t.iter()
                    .map(|(h, f)| json!({ "syndromes": h.iter().map(|s| s.signs()).collect::<Vec<_>>(), "feedback": f.to_string() }))
                    .collect()
            };
            serde_json::to_string_pretty(&json!({ "single": rows(&single), "double": rows(&double) })).expect("serializable")
                + "\n"
        }
    };
    RunOutput { text, verification_failed: false, summary: vec![] }
}
