use serde_json::Value;
use sha2::{Digest, Sha256};
use std::path::PathBuf;
use std::process::{Command, Output};

fn horn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_horn"))
        .args(args)
        .env_remove("HORN_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr_json(o: &Output) -> Value {
    let text = String::from_utf8(o.stderr.clone()).unwrap();
    let line = text.lines().last().expect("stderr record");
    serde_json::from_str(line).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("horn-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn lr_values() {
    let o = horn(&[
        "lr", "--n", "4", "--lambda", "21,13,5", "--mu", "7,10,12", "--nu", "20,11,9",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "367\n");
    let o = horn(&[
        "lr", "--n", "3", "--lambda", "0,0", "--mu", "1,0", "--nu", "1,0",
    ]);
    assert_eq!(stdout(&o), "1\n");
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        vec!["lr", "--lambda", "1,x", "--mu", "1,0", "--nu", "1,0"],
        vec![
            "lr", "--n", "4", "--lambda", "1,0", "--mu", "1,0", "--nu", "1,0",
        ],
        vec!["frobnicate"],
        vec!["sample", "--group", "so", "--alpha", "1,0,-1"],
    ] {
        let o = horn(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn computation_errors_exit_1_with_record() {
    let o = horn(&[
        "pdf-su", "--alpha", "1,1,-2", "--beta", "1,0,-1", "--gamma", "1,0,-1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let rec = stderr_json(&o);
    assert_eq!(rec["error"]["kind"], "DegenerateSpectrum");
    assert!(rec["error"]["message"]
        .as_str()
        .unwrap()
        .contains("repeated"));
}

#[test]
fn out_file_and_manifest_digest() {
    let path = scratch("lr.json");
    let o = horn(&[
        "lr",
        "--lambda",
        "1,1",
        "--mu",
        "1,1",
        "--nu",
        "1,1",
        "--json",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let bytes = std::fs::read(&path).unwrap();
    let v: Value = serde_json::from_slice(&bytes).unwrap();
    assert_eq!(v["multiplicity"], 2);
    let mut mpath = path.clone().into_os_string();
    mpath.push(".manifest.json");
    let m: Value = serde_json::from_slice(&std::fs::read(mpath).unwrap()).unwrap();
    assert_eq!(m["subcommand"], "lr");
    assert_eq!(
        m["outputs"][0]["sha256"],
        hex::encode(Sha256::digest(&bytes))
    );
    assert_eq!(m["outputs"][0]["bytes"], bytes.len());
}

#[test]
fn sampling_is_reproducible_across_thread_counts() {
    let base = [
        "sample",
        "--group",
        "su",
        "--n",
        "3",
        "--alpha",
        "1,0,-1",
        "--beta",
        "1,0,-1",
        "--samples",
        "20000",
        "--seed",
        "42",
        "--bins",
        "20",
    ];
    let a = horn(&base);
    let mut one = base.to_vec();
    one.extend(["--threads", "1"]);
    let b = horn(&one);
    let mut seq = base.to_vec();
    seq.push("--sequential");
    let c = horn(&seq);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("gamma1_center,gamma2_center,count\n"));
    let total: u64 = text
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse::<u64>().unwrap())
        .sum();
    assert_eq!(total, 20000);
    assert_eq!(stderr_json(&a)["manifest"]["seed"], 42);
}

#[test]
fn horn_threads_env_fallback() {
    let o = Command::new(env!("CARGO_BIN_EXE_horn"))
        .args(["hciz", "--alpha", "1,-1", "--x", "0.7,-0.7"])
        .env("HORN_THREADS", "2")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(stderr_json(&o)["manifest"]["threads"], 2);
    let v: Vec<f64> = stdout(&o)
        .trim()
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert!((v[0] - (1.4f64).sin() / 1.4).abs() < 1e-12);
    let bad = Command::new(env!("CARGO_BIN_EXE_horn"))
        .args(["hciz", "--alpha", "1,-1", "--x", "0.7,-0.7"])
        .env("HORN_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn decompose_json_map() {
    let o = horn(&["decompose", "--lambda", "1,0", "--mu", "0,1", "--json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["total"], 2);
    assert_eq!(v["distinct"], 2);
    assert_eq!(v["constituents"]["0,0"], 1);
    assert_eq!(v["constituents"]["1,1"], 1);
    let csv = stdout(&horn(&["decompose", "--lambda", "1,0", "--mu", "0,1"]));
    assert_eq!(csv, "nu,multiplicity\n\"0,0\",1\n\"1,1\",1\n");
}

#[test]
fn exact_su_density_from_fractions() {
    let o = horn(&[
        "pdf-su",
        "--alpha",
        "1,0,-1",
        "--beta",
        "1,0,-1",
        "--gamma",
        "1/2,0,-1/2",
    ]);
    assert_eq!(stdout(&o), "1/16\n");
    let f = horn(&[
        "pdf-su",
        "--alpha",
        "1,0,-1",
        "--beta",
        "1,0,-1",
        "--gamma",
        "0.5,0,-0.5",
    ]);
    assert_eq!(stdout(&f).trim().parse::<f64>().unwrap(), 0.0625);
}

#[test]
fn so3_grid_csv() {
    let o = horn(&["pdf-so3", "--grid", "8"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("gamma1,gamma2,pdf,flag"));
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 64);
    assert!(rows.iter().all(|r| r.len() == 4));
    assert!(rows.iter().any(|r| r[3] == "regular"));
    let alias = horn(&["so3-pdf", "--grid", "8"]);
    assert_eq!(alias.stdout, o.stdout);
}

#[test]
fn walls_and_bridge() {
    let o = horn(&[
        "walls",
        "--alpha",
        "1,0,-1",
        "--beta",
        "1,0,-1",
        "--max-card",
        "1",
    ]);
    let text = stdout(&o);
    assert!(text.starts_with("I,J,K,constant\n"));
    assert!(text.lines().any(|l| l == "1,1,1,2"));
    let b = horn(&[
        "bridge", "--lambda", "1,1", "--mu", "1,1", "--nu", "1,1", "--json",
    ]);
    assert!(b.status.success());
    let v: Value = serde_json::from_slice(&b.stdout).unwrap();
    assert!(v
        .as_array()
        .unwrap()
        .iter()
        .any(|o| o["status"] == "checked"));
}

#[test]
fn pictographs_and_stretch() {
    let o = horn(&[
        "pictograph",
        "--lambda",
        "1,1",
        "--mu",
        "1,1",
        "--nu",
        "1,1",
        "--json",
    ]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    let s = horn(&[
        "stretch", "--lambda", "1,1", "--mu", "1,1", "--nu", "1,1", "--json",
    ]);
    assert!(s.status.success());
    let v: Value = serde_json::from_slice(&s.stdout).unwrap();
    assert_eq!(v["period"], 1);
    // P(s) = s + 1 for the adjoint triple of su(3)
    assert_eq!(v["counts"][0], serde_json::json!([1, 2]));
    assert_eq!(v["counts"][2], serde_json::json!([3, 4]));
    let bad = horn(&[
        "pictograph",
        "--lambda",
        "1,1",
        "--mu",
        "1,1",
        "--nu",
        "1,1",
        "--kind",
        "nope",
    ]);
    assert_eq!(bad.status.code(), Some(2));
}
