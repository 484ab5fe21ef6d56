use std::fs;
use std::path::{Path, PathBuf};

use clap::Parser;
use maglab::cli::Cli;
use maglab::commands::Outcome;
use maglab::execute;
use serde_json::Value;

fn config(name: &str) -> String {
    let p = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name);
    p.to_str().unwrap().to_string()
}

fn exec(out: &Path, args: &[&str]) -> Outcome {
    let mut argv = vec!["maglab", "--out", out.to_str().unwrap()];
    argv.extend_from_slice(args);
    execute(&Cli::try_parse_from(argv).unwrap()).unwrap()
}

fn records(dir: &Path) -> Vec<Value> {
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.join("records.json")).unwrap()).unwrap();
    v["data"].as_array().unwrap().clone()
}

const WEGNER: [&str; 10] = [
    "wegner",
    "--energy",
    "9.7",
    "--eta",
    "0.1,0.05",
    "--l",
    "4",
    "--spacing",
    "1/4",
    "--fourth-order",
];

#[test]
fn shipped_config_validates() {
    let out = tempfile::tempdir().unwrap();
    let cfg = config("random.json");
    let o = exec(out.path(), &["--config", &cfg, "validate"]);
    assert_eq!(o.status, 0, "{}", o.summary);
    assert!(o.dir.join("manifest.json").exists());
    assert!(o.dir.join("checks.csv").exists());
}

#[test]
fn constant_field_edges_are_the_landau_level() {
    let out = tempfile::tempdir().unwrap();
    let cfg = config("constant.json");
    let o = exec(out.path(), &["--config", &cfg, "edges", "--n", "0"]);
    assert!(o.summary.starts_with("edges n=0: (10, 10)"), "{}", o.summary);
    let csv = fs::read_to_string(o.dir.join("bands.csv")).unwrap();
    assert!(csv.starts_with("# run "));
}

#[test]
fn wegner_writes_records_and_plot() {
    let out = tempfile::tempdir().unwrap();
    let cfg = config("random.json");
    let mut args = vec!["--config", cfg.as_str(), "--trials", "50"];
    args.extend_from_slice(&WEGNER);
    let o = exec(out.path(), &args);
    let recs = records(&o.dir);
    let kinds: Vec<&str> = recs.iter().map(|r| r["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["wegner", "wegner", "wegner-ratio"]);
    for r in &recs[..2] {
        assert_eq!(r["trials"], 50);
        assert_eq!(r["ci_method"], "normal");
        assert!(r["config_hash"].as_str().unwrap().len() == 64);
    }
    let svg = fs::read_to_string(o.dir.join("wegner.svg")).unwrap();
    let hash = o
        .dir
        .file_name()
        .unwrap()
        .to_str()
        .unwrap()
        .split('-')
        .nth(1)
        .unwrap()
        .to_string();
    assert!(svg.contains(&format!("<!-- run {hash}")));
}

#[test]
fn identical_manifests_give_identical_outputs() {
    let out = tempfile::tempdir().unwrap();
    let cfg = config("random.json");
    let mut args = vec!["--config", cfg.as_str(), "--trials", "12", "--seed", "9"];
    args.extend_from_slice(&WEGNER);
    let a = exec(&out.path().join("a"), &args);
    let b = exec(&out.path().join("b"), &args);
    for name in ["trials.csv", "records.json", "wegner.svg"] {
        assert_eq!(
            fs::read(a.dir.join(name)).unwrap(),
            fs::read(b.dir.join(name)).unwrap(),
            "{name}"
        );
    }
    let name = |p: &PathBuf| p.file_name().unwrap().to_str().unwrap()[..20].to_string();
    assert_eq!(name(&a.dir), name(&b.dir));
}

#[test]
fn report_groups_kinds_and_compares_seeds() {
    let out = tempfile::tempdir().unwrap();
    let cfg = config("random.json");
    let mut dirs = Vec::new();
    for seed in ["1", "2"] {
        let mut args = vec!["--config", cfg.as_str(), "--trials", "10", "--seed", seed];
        args.extend_from_slice(&WEGNER);
        dirs.push(exec(out.path(), &args).dir);
    }
    let trial = exec(out.path(), &["--config", &cfg, "trial", "--b0-list", "25,100,400"]).dir;

    let single = exec(out.path(), &["report", dirs[0].to_str().unwrap()]);
    let csv = fs::read_to_string(single.dir.join("report.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2 + 3);
    assert_eq!(
        fs::read_to_string(single.dir.join("overlap.csv"))
            .unwrap()
            .lines()
            .count(),
        2
    );

    let all = exec(
        out.path(),
        &[
            "report",
            dirs[0].to_str().unwrap(),
            dirs[1].to_str().unwrap(),
            trial.to_str().unwrap(),
        ],
    );
    assert!(
        all.summary.contains("7 records from 3 runs in 3 kinds"),
        "{}",
        all.summary
    );
    let overlap = fs::read_to_string(all.dir.join("overlap.csv")).unwrap();
    // three wegner-kind records pair up across the two seeds, the trial slope has no partner
    assert_eq!(overlap.lines().count(), 2 + 3);
    assert!(overlap.lines().skip(2).all(|l| l.contains(",1,2,")));
    let html = fs::read_to_string(all.dir.join("report.html")).unwrap();
    for kind in [
        "<h2>wegner</h2>",
        "<h2>wegner-ratio</h2>",
        "<h2>trial-slope</h2>",
        "CI overlap",
    ] {
        assert!(html.contains(kind), "{kind}");
    }
}

#[test]
fn exit_codes() {
    let out = tempfile::tempdir().unwrap();
    let o = out.path().to_str().unwrap();
    assert_ne!(maglab::run(["maglab", "--out", o, "frobnicate"]), 0);
    assert_eq!(maglab::run(["maglab", "--out", o, "report", "/nonexistent/run"]), 1);
    let bad = out.path().join("bad.json");
    fs::write(&bad, "{\"model\": 3}").unwrap();
    assert_eq!(
        maglab::run(["maglab", "--out", o, "--config", bad.to_str().unwrap(), "validate"]),
        1
    );
    let constant = config("constant.json");
    // mu = 0 is outside the model class
    assert_eq!(
        maglab::run(["maglab", "--out", o, "--config", &constant, "validate"]),
        1
    );
    assert_eq!(
        maglab::run(["maglab", "--out", o, "wegner", "--energy", "1", "--eta", "0.1"]),
        1
    );
}
