//! End-to-end checks of the command-line binary: schemas, determinism and
//! exit codes.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bscq-polar"))
}

#[test]
fn capacity_csv_is_stable_and_monotone() {
    let out = bin().args(["capacity", "--delta", "0.1"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# bscq-polar/"));
    assert_eq!(lines.next().unwrap(), "delta,gamma,capacity");
    let caps: Vec<f64> = lines
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(caps.len(), 21);
    for pair in caps.windows(2) {
        assert!(pair[1] >= pair[0] - 1e-12);
    }

    let again = bin().args(["capacity", "--delta", "0.1"]).output().unwrap();
    assert_eq!(text.as_bytes(), again.stdout.as_slice());
}

#[test]
fn design_json_roundtrip() {
    let out = bin()
        .args([
            "design", "--delta", "0.05", "--gamma", "0.15", "--n", "3", "--M", "2000", "--seed",
            "9", "--k", "4",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["N"], 8);
    assert_eq!(v["M"], 2000);
    assert_eq!(v["seed"], 9);
    assert_eq!(v["info_set"].as_array().unwrap().len(), 4);
    assert!(v["version"].as_str().unwrap().starts_with("bscq-polar/"));
    // rerun is byte-identical
    let again = bin()
        .args([
            "design", "--delta", "0.05", "--gamma", "0.15", "--n", "3", "--M", "2000", "--seed",
            "9", "--k", "4",
        ])
        .output()
        .unwrap();
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn de_vs_sim_agrees_through_the_cli() {
    let out = bin()
        .args(["de-vs-sim", "--delta", "0.1", "--gamma", "0.25", "--n", "3"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for line in text.lines().skip(2) {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert!((f[1] - f[2]).abs() < 1e-9, "row {line}");
    }
}

#[test]
fn exit_codes() {
    // invalid configuration: gamma beyond the positivity bound
    let out = bin()
        .args(["capacity", "--delta", "0.1", "--gamma", "0.9"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // flag parse failure is also configuration error territory
    let out = bin().args(["capacity"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // resource guard: exact comparison beyond the density cap
    let out = bin()
        .args(["de-vs-sim", "--delta", "0.1", "--gamma", "0.0", "--n", "9"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn block_error_csv_has_bounds_and_is_seeded() {
    let out = bin()
        .args([
            "block-error",
            "--delta",
            "0.05",
            "--gamma",
            "0,0.15",
            "--n",
            "3",
            "--k",
            "4",
            "--trials",
            "200",
            "--seed",
            "4",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines().skip(1);
    assert_eq!(
        lines.next().unwrap(),
        "gamma,block_error,trials,seed,wilson_lo,wilson_hi,errors,ub,ncub"
    );
    for line in lines {
        let f: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        assert_eq!(f[2], 200.0);
        assert_eq!(f[3], 4.0);
        assert!(
            f[4] <= f[1] && f[1] <= f[5],
            "Wilson bounds bracket the estimate"
        );
        assert!((f[8] - 4.0 * f[7]).abs() < 1e-15, "NCUB is 4×UB");
    }
}
