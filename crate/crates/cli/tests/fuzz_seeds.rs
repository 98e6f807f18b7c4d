//! Replays the checked-in fuzz corpus through the same checks as the fuzz
//! targets, so the seeds stay valid inputs on stable toolchains.

use std::path::PathBuf;

use bitflip::experiments::vqe::Observable;
use bitflip::repcode::DecodeTable;
use bitflip::PauliString;
use bitflip_cli::{Command, FileConfig, RunConfig};

fn seeds(target: &str) -> Vec<String> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<String> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| String::from_utf8_lossy(&std::fs::read(e.unwrap().path()).unwrap()).into_owned())
        .collect();
    out.sort();
    assert!(!out.is_empty());
    out
}

#[test]
fn pauli_seeds_roundtrip() {
    for s in seeds("pauli_string") {
        let p: PauliString = s.parse().unwrap();
        assert_eq!(p.to_string().parse::<PauliString>().unwrap(), p);
    }
}

#[test]
fn observable_seeds_roundtrip() {
    for s in seeds("observable") {
        let o: Observable = s.parse().unwrap();
        assert_eq!(o.to_string().parse::<Observable>().unwrap(), o);
    }
}

#[test]
fn config_seeds_validate() {
    for s in seeds("run_config") {
        let f = FileConfig::from_toml_str(&s).unwrap();
        let mut c = RunConfig::defaults(Command::Benchmark);
        c.apply_file(&f).unwrap();
        c.validate().unwrap();
    }
}

#[test]
fn decode_table_seeds_match_builtin_tables() {
    let tables: Vec<DecodeTable> = seeds("decode_table").iter().map(|s| DecodeTable::from_csv(s).unwrap()).collect();
    assert!(tables.contains(&DecodeTable::single()));
    assert!(tables.contains(&DecodeTable::double()));
}
