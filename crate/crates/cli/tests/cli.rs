use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_asym"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin().args(args).current_dir(dir).output().expect("spawn asym")
}

fn write_chi1(dir: &Path) -> std::path::PathBuf {
    let lam: f64 = 1.0;
    let n = 20usize;
    let mut probs: Vec<f64> = Vec::new();
    let mut term = (-lam).exp();
    for k in 0..n {
        probs.push(term);
        term *= lam / (k + 1) as f64;
    }
    let total: f64 = probs.iter().sum();
    let amps: Vec<serde_json::Value> = probs
        .iter()
        .map(|p| serde_json::json!([(p / total).sqrt(), 0.0]))
        .collect();
    let path = dir.join("chi1.json");
    std::fs::write(
        &path,
        serde_json::json!({"n_trunc": n, "amps": amps}).to_string(),
    )
    .unwrap();
    path
}

#[test]
fn fmax_of_poisson_profile_is_four() {
    let dir = tempfile::tempdir().unwrap();
    let state = write_chi1(dir.path());
    let out = run(&["fmax", state.to_str().unwrap(), "--tol", "1e-6"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["value"].as_f64().unwrap() - 4.0).abs() < 1e-4);
    assert_eq!(v["kind"], "exact");
}

#[test]
fn self_conversion_holds_with_delta_witness() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    std::fs::write(&p, r#"{"offset": 0, "values": [0.25, 0.5, 0.25]}"#).unwrap();
    let out = run(
        &["amaj", p.to_str().unwrap(), p.to_str().unwrap(), "--backend", "rational"],
        dir.path(),
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["holds"], true);
    // Witness is δ₀ exactly on the rational backend.
    assert_eq!(v["witness"]["values"][0], "1/1");
    assert_eq!(v["witness"]["offset"], 0);
}

#[test]
fn rational_strings_survive_a_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    let q = dir.path().join("q.json");
    std::fs::write(&p, r#"{"offset": 0, "values": ["1/4", "1/2", "1/4"]}"#).unwrap();
    std::fs::write(&q, r#"{"offset": 0, "values": ["1/2", "1/2"]}"#).unwrap();
    let out = run(
        &["amaj", p.to_str().unwrap(), q.to_str().unwrap(), "--backend", "rational"],
        dir.path(),
    );
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["holds"], true);
    assert_eq!(v["witness"]["values"][0], "1/2");
    assert_eq!(v["witness"]["values"][1], "1/2");
}

#[test]
fn malformed_json_exits_one_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"offset\": 0,\n  \"values\": [1,]}").unwrap();
    let out = run(&["qfi", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json:2:"), "missing line/column: {err}");
}

#[test]
fn precondition_violations_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    // Not normalized: fails the distribution precondition.
    std::fs::write(&p, r#"{"offset": 0, "values": [0.9, 0.9]}"#).unwrap();
    let out = run(&["amaj", p.to_str().unwrap(), p.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn outputs_are_byte_identical_across_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let mut artifacts: Vec<Vec<u8>> = Vec::new();
    for pass in 0..2 {
        let table = dir.path().join(format!("table_{pass}.csv"));
        let rates = dir.path().join(format!("rates_{pass}.csv"));
        let out = run(
            &["bridge", "--demo", "correspondence", "--seed", "42", "--pairs", "40",
              "--out", table.to_str().unwrap()],
            dir.path(),
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let out = run(
            &["rates", "--family", "iid:coin", "--ms", "2,4,8", "--eps", "0.05",
              "--dir", "inf", "--out", rates.to_str().unwrap()],
            dir.path(),
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        artifacts.push(std::fs::read(&table).unwrap());
        artifacts.push(std::fs::read(&rates).unwrap());
    }
    assert_eq!(artifacts[0], artifacts[2], "bridge CSV differs between runs");
    assert_eq!(artifacts[1], artifacts[3], "rates CSV differs between runs");
    // CSVs carry a header row.
    assert!(artifacts[0].starts_with(b"case,"));
    assert!(artifacts[1].starts_with(b"m,raw_value,per_m,bound_kind"));
}

#[test]
fn emitted_json_reparses_with_sorted_keys() {
    let dir = tempfile::tempdir().unwrap();
    let state = write_chi1(dir.path());
    let out = run(&["smooth", state.to_str().unwrap(), "--eps", "0.02"], dir.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    // serde_json sorts map keys; re-serialization reproduces the bytes.
    assert_eq!(serde_json::to_string_pretty(&v).unwrap() + "\n", text);
    assert!(v["f_max_eps"]["value"].is_f64());
}
