use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn polcorr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polcorr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.extend(["--format", "json"]);
    let o = polcorr(&all);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn scratch_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("polcorr-cli-{name}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

const BELL: [&str; 7] = [
    "bell",
    "--process",
    "2",
    "--beta",
    "0.2",
    "--angles",
    "0,23,45,67",
];

#[test]
fn csv_output_is_byte_stable() {
    let args = [
        "scan",
        "--process",
        "1",
        "--angles",
        "0,67,135,23",
        "--beta-range",
        "0,0.9,10",
        "--format",
        "csv",
    ];
    let a = polcorr(&args);
    let b = polcorr(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("beta,s,verdict,"));
    assert_eq!(lines.count(), 10);
}

#[test]
fn json_is_stable_apart_from_timestamp() {
    let mut a = json(&BELL);
    let mut b = json(&BELL);
    for doc in [&mut a, &mut b] {
        assert!(doc["manifest"]["timestamp_unix"].is_u64());
        doc["manifest"]
            .as_object_mut()
            .unwrap()
            .remove("timestamp_unix");
    }
    assert_eq!(a, b);
    assert_eq!(a["manifest"]["subcommand"], "bell");
    assert_eq!(a["results"]["verdict"], "ViolatesBelow");
}

#[test]
fn angles_are_converted_to_radians_within_one_ulp() {
    let doc = json(&[
        "prob",
        "--process",
        "1",
        "--beta",
        "0.3",
        "--chi1",
        "-37.25",
        "--chi2",
        "113",
    ]);
    let p = &doc["manifest"]["parameters"];
    for (deg, key) in [(-37.25f64, "chi1_rad"), (113.0, "chi2_rad")] {
        let got = p[key].as_f64().unwrap();
        let want = deg * std::f64::consts::PI / 180.0;
        assert!(
            (got - want).abs() <= want.abs() * f64::EPSILON,
            "{key}: {got} vs {want}"
        );
    }
}

#[test]
fn prob_quadruple_sums_to_one() {
    let doc = json(&[
        "prob",
        "--process",
        "2",
        "--beta",
        "0.6",
        "--chi1",
        "10",
        "--chi2",
        "80",
    ]);
    let r = &doc["results"];
    assert!((r["quadruple_sum"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(r["quadruple"].as_array().unwrap().len(), 4);
    assert!((r["marginal_first"].as_f64().unwrap() - 0.5).abs() < 1e-15);
}

#[test]
fn output_file_gets_manifest_sidecar() {
    let dir = scratch_dir("sidecar");
    let path = dir.join("bell.csv");
    let mut args = BELL.to_vec();
    args.extend(["--format", "csv", "--output", path.to_str().unwrap()]);
    let o = polcorr(&args);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let csv = std::fs::read_to_string(&path).unwrap();
    assert!(csv.starts_with("quantity,value\n"));
    let manifest: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("bell.csv.manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["tool"], "polcorr");
    assert_eq!(manifest["parameters"]["process"], 2);
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn validation_errors_exit_2() {
    let cases: [&[&str]; 6] = [
        &[
            "bell",
            "--process",
            "1",
            "--beta",
            "1.5",
            "--angles",
            "0,1,2,3",
        ],
        &[
            "bell",
            "--process",
            "1",
            "--beta",
            "-0.1",
            "--angles",
            "0,1,2,3",
        ],
        &["bell", "--process", "1", "--beta", "0", "--angles", "0,1,2"],
        &[
            "bell",
            "--process",
            "3",
            "--beta",
            "0",
            "--angles",
            "0,1,2,3",
        ],
        &[
            "scan",
            "--process",
            "1",
            "--angles",
            "0,1,2,3",
            "--beta-range",
            "0,1,0",
        ],
        &[
            "simulate",
            "--process",
            "1",
            "--beta",
            "0",
            "--angles",
            "0,1,2,3",
            "--n",
            "0",
        ],
    ];
    for args in cases {
        let o = polcorr(args);
        assert_eq!(
            o.status.code(),
            Some(2),
            "{args:?}: {}",
            String::from_utf8_lossy(&o.stderr)
        );
        assert!(o.stdout.is_empty(), "{args:?}");
    }
}

#[test]
fn failing_oracle_exits_3_after_reporting() {
    let o = polcorr(&[
        "oracle",
        "--level",
        "integrals",
        "--integral-rel",
        "1e-30",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains(",FAIL"));
}

#[test]
fn passing_oracle_exits_0() {
    let o = polcorr(&["oracle", "--level", "delta-limit"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("pass"));
}

#[test]
fn unwritable_output_exits_1() {
    let mut args = BELL.to_vec();
    args.extend(["--output", "/nonexistent-dir/x/out.txt"]);
    assert_eq!(polcorr(&args).status.code(), Some(1));
}

#[test]
fn simulate_is_reproducible_and_seed_sensitive() {
    let base = [
        "simulate",
        "--process",
        "1",
        "--beta",
        "0",
        "--angles",
        "0,67,135,23",
        "--n",
        "20000",
    ];
    let run = |seed: &str| {
        let mut a = base.to_vec();
        a.extend(["--seed", seed]);
        json(&a)["results"]["s_hat"].as_f64().unwrap()
    };
    assert_eq!(run("5"), run("5"));
    assert_ne!(run("5"), run("6"));
}

#[test]
fn scan_frontier_column() {
    let o = polcorr(&[
        "scan",
        "--process",
        "2",
        "--angles",
        "0,23,45,67",
        "--betas",
        "0.1,0.5",
        "--frontier",
        "below",
        "--format",
        "csv",
    ]);
    assert!(o.status.success());
    let text = stdout(&o);
    let header = text.lines().next().unwrap();
    assert!(header.ends_with(",frontier_beta"));
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert!(rows[0].contains("ViolatesBelow"));
    assert!(rows[1].contains("WithinLHV"));
    let f: f64 = rows[0].rsplit(',').next().unwrap().parse().unwrap();
    assert!(f > 0.1 && f < 0.5, "{f}");
}

#[test]
fn search_reaches_known_extreme() {
    let doc = json(&[
        "search",
        "--process",
        "1",
        "--beta",
        "0",
        "--objective",
        "max",
    ]);
    let s = doc["results"]["best_s"].as_f64().unwrap();
    assert!((s - (2f64.sqrt() - 1.0) / 2.0).abs() < 1e-9, "{s}");
    assert_eq!(doc["results"]["verdict"], "ViolatesAbove");
}
