use std::path::Path;
use std::process::Command as Proc;

use bitflip::repcode::DecodeTable;
use bitflip_cli::main_with_args;

fn bin() -> Proc {
    Proc::new(env!("CARGO_BIN_EXE_bitflip"))
}

fn run(args: &[&str]) -> i32 {
    main_with_args(std::iter::once("bitflip").chain(args.iter().copied()))
}

fn read(p: &Path) -> String {
    std::fs::read_to_string(p).unwrap()
}

/// Lines that are not `#` comments.
fn body(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

#[test]
fn tables_are_byte_stable() {
    let a = bin().arg("tables").output().unwrap();
    let b = bin().arg("tables").output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert!(text.contains(&DecodeTable::single().to_csv()));
    assert!(text.contains(&DecodeTable::double().to_csv()));
}

#[test]
fn noiseless_benchmark_has_unit_fidelity() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("b.csv");
    let code = run(&["benchmark", "--p", "0", "--d", "8", "--shots", "200", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = read(&out);
    assert!(text.starts_with("# bitflip "));
    assert!(text.contains("# seed: 1\n") && text.contains("# config_hash: "));
    let rows = body(&text);
    assert_eq!(rows[0], "variant,d,p,shots,F,stderr");
    assert_eq!(&rows[1..], ["bare,8,0,200,1,0", "encoded,8,0,200,1,0", "encoded_ec,8,0,200,1,0"]);
}

#[test]
fn output_is_independent_of_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for t in ["1", "3"] {
        let out = dir.path().join(format!("i{t}.csv"));
        let args = ["ising", "--steps", "5", "--shots", "3000", "--p", "0.01", "--seed", "7", "--threads", t];
        assert_eq!(run(&[&args[..], &["--out", out.to_str().unwrap()]].concat()), 0);
        texts.push(read(&out));
    }
    assert_eq!(texts[0], texts[1]);
    assert_eq!(body(&texts[0])[0], "variant,step,t,M,M_stderr,discard_rate");
    assert_eq!(body(&texts[0]).len(), 1 + 3 * 6);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "command = \"benchmark\"\nseed = 5\np = 0.5\nshots = 100\ndepths = [1, 2]\nvariants = [\"bare\"]\n").unwrap();
    let out = dir.path().join("o.csv");
    let code = run(&["--config", cfg.to_str().unwrap(), "--p", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = read(&out);
    assert!(text.contains("# seed: 5\n"));
    assert_eq!(&body(&text)[1..], ["bare,1,0,100,1,0", "bare,2,0,100,1,0"]);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "command = \"benchmark\"\nshotz = 3\n").unwrap();
    let bad = bin().args(["--config", cfg.to_str().unwrap()]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("shotz"));

    assert_eq!(bin().args(["benchmark", "--variant", "qutrit"]).status().unwrap().code(), Some(2));
    assert_eq!(bin().args(["frobnicate"]).status().unwrap().code(), Some(2));
    assert_eq!(bin().args(["ising", "--epsilon=-1"]).status().unwrap().code(), Some(2));
    // the output path is a directory: the write fails at run time
    let st = bin().args(["tables", "--out", dir.path().to_str().unwrap()]).status().unwrap();
    assert_eq!(st.code(), Some(3));
}

#[test]
fn verify_gadgets_reports_all_pass() {
    let out = bin().arg("verify-gadgets").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["result"]["all_pass"], true);
    assert_eq!(v["command"], "verify-gadgets");
    let checks = v["result"]["suite"]["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["status"] == "Pass"));
    assert_eq!(v["result"]["suite"]["gadget_violations"], 0);
    assert!(v["result"]["catalog"].as_array().unwrap().len() >= 10);
}

#[test]
fn vqe_rows_carry_shot_counts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v.json");
    let code = run(&["vqe", "--shots", "300", "--variant", "bare", "--variant", "encoded", "--format", "json", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&read(&out)).unwrap();
    let rows = v["result"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 2);
    for r in rows {
        let (acc, raw) = (r["accepted_shots"].as_u64().unwrap(), r["raw_shots"].as_u64().unwrap());
        assert_eq!(acc, 4 * 300);
        assert!(raw >= acc);
        assert!((r["energy"].as_f64().unwrap() + 667.74).abs() < 0.5);
    }
    assert_eq!(v["seed"], 1);
}

#[test]
fn sweep_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s.csv");
    let code = run(&["epsilon-sweep", "--epsilons", "0,0.5", "--shots", "200", "--variant", "bare", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let text = read(&out);
    let rows = body(&text);
    assert_eq!(rows[0], "variant,epsilon,energy,stderr,abs_error,accepted_shots,raw_shots");
    assert_eq!(rows.len(), 3);
    assert!(rows[2].starts_with("bare,0.5,"));
}
