#![no_main]

use bitflip_cli::{Command, FileConfig, RunConfig};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let Ok(file) = FileConfig::from_toml_str(text) else { return };
    let mut cfg = RunConfig::defaults(Command::Benchmark);
    if cfg.apply_file(&file).is_ok() && cfg.validate().is_ok() {
        assert_eq!(cfg.hash().len(), 64);
    }
});
