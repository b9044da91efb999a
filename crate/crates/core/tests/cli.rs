use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use curvelrr::bench::Summary;
use curvelrr::datagen::{gen_sine_clusters, WarpSpec};
use curvelrr::io::{load_dataset, save_dataset};

fn curvelrr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curvelrr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn read_dir_sorted(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    for entry in walk(dir) {
        let rel = entry.strip_prefix(dir).unwrap().to_string_lossy().into_owned();
        out.push((rel, fs::read(&entry).unwrap()));
    }
    out.sort();
    out
}

fn walk(dir: &Path) -> Vec<std::path::PathBuf> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            files.extend(walk(&path));
        } else {
            files.push(path);
        }
    }
    files
}

#[test]
fn generate_writes_a_loadable_dataset() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("d1");
    let o = curvelrr(&[
        "generate", "sine", "--clusters", "3", "--per-cluster", "20", "--length", "100", "--seed", "7", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let ds = load_dataset(&out).unwrap();
    assert_eq!(ds.len(), 60);
    assert_eq!(ds.truth.sizes(), vec![20, 20, 20]);
    assert_eq!(ds.samples(), 100);
}

#[test]
fn generate_without_out_is_a_usage_error() {
    let o = curvelrr(&["generate", "sine"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

#[test]
fn generate_is_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    for name in ["a", "b"] {
        let out = tmp.path().join(name);
        let o = curvelrr(&[
            "generate", "warped-basis", "--per-cluster", "4", "--length", "40", "--seed", "3", "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success());
    }
    assert_eq!(read_dir_sorted(&tmp.path().join("a")), read_dir_sorted(&tmp.path().join("b")));
}

#[test]
fn clrr_separates_unwarped_sines() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = gen_sine_clusters(2, 6, 50, &WarpSpec::none(0)).unwrap();
    save_dataset(&ds, tmp.path()).unwrap();
    let labels = tmp.path().join("labels.json");
    let o = curvelrr(&[
        "cluster", tmp.path().to_str().unwrap(), "--method", "clrr", "--out", labels.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("sca=1.000000"), "{}", stdout(&o));
    let written: Vec<i64> = serde_json::from_str(&fs::read_to_string(&labels).unwrap()).unwrap();
    assert_eq!(written.len(), 12);
}

#[test]
fn cluster_dispatches_every_method() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = gen_sine_clusters(2, 4, 30, &WarpSpec::sine_default(1)).unwrap();
    save_dataset(&ds, tmp.path()).unwrap();
    for method in ["kmeans", "dtw", "lrr", "clrr"] {
        let o = curvelrr(&["cluster", tmp.path().to_str().unwrap(), "--method", method]);
        assert!(o.status.success(), "{method}: {}", String::from_utf8_lossy(&o.stderr));
        assert!(stdout(&o).contains(&format!("method={method} sca=")));
    }
}

#[test]
fn cluster_errors_map_to_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = gen_sine_clusters(2, 3, 30, &WarpSpec::none(0)).unwrap();
    save_dataset(&ds, tmp.path()).unwrap();
    let dir = tmp.path().to_str().unwrap();

    assert_eq!(curvelrr(&["cluster", dir, "--method", "ssc"]).status.code(), Some(2));
    assert_eq!(curvelrr(&["cluster", dir, "--method", "kmeans", "--clusters", "7"]).status.code(), Some(2));

    fs::write(tmp.path().join("manifest.json"), "{\"name\": ").unwrap();
    let o = curvelrr(&["cluster", dir, "--method", "kmeans"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("manifest.json:1"));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let tmp = tempfile::tempdir().unwrap();
    let ds = gen_sine_clusters(2, 3, 30, &WarpSpec::none(0)).unwrap();
    save_dataset(&ds, tmp.path()).unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, r#"{"lambda": -1.0}"#).unwrap();
    let dir = tmp.path().to_str().unwrap();
    let bad = curvelrr(&["cluster", dir, "--method", "lrr", "--config", cfg.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
    let good = curvelrr(&[
        "cluster", dir, "--method", "lrr", "--config", cfg.to_str().unwrap(), "--lambda", "0.1",
    ]);
    assert!(good.status.success());
}

fn parse_runs(csv: &str) -> Vec<(String, f64)> {
    csv.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].to_string(), f[3].parse().unwrap())
        })
        .collect()
}

#[test]
fn benchmark_outputs_are_consistent_and_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = tmp.path().join(name);
        let o = curvelrr(&[
            "benchmark", "sine", "--clusters", "2", "--per-cluster", "4", "--length", "30", "--repeats", "3",
            "--methods", "kmeans,dtw,lrr,clrr", "--seed", "11", "--out", out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(stdout(&o).lines().count(), 5);
        out
    };
    let (a, b) = (run("a"), run("b"));
    for file in ["runs.csv", "summary.csv"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file}");
    }

    let runs = parse_runs(&fs::read_to_string(a.join("runs.csv")).unwrap());
    assert_eq!(runs.len(), 4 * 3);
    let summary = fs::read_to_string(a.join("summary.csv")).unwrap();
    for line in summary.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let scas: Vec<f64> = runs.iter().filter(|(m, _)| m == f[0]).map(|(_, s)| *s).collect();
        let s = Summary::of(&scas).unwrap();
        let want: Vec<f64> = f[1..].iter().map(|v| v.parse().unwrap()).collect();
        let got = [s.mean, s.median, s.max, s.min, s.std];
        for (w, g) in want.iter().zip(got) {
            assert!((w - g).abs() <= 1e-12, "{line}");
        }
    }
    assert_eq!(fs::read_to_string(a.join("timings.csv")).unwrap().lines().count(), 13);
    assert!(fs::read_to_string(a.join("table.txt")).unwrap().contains("Mean Run Time (s)"));
}

#[test]
fn single_repeat_has_zero_spread() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("b");
    let o = curvelrr(&[
        "benchmark", "sine", "--clusters", "2", "--per-cluster", "3", "--length", "30", "--repeats", "1",
        "--methods", "kmeans", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert!(summary.lines().nth(1).unwrap().ends_with(",0"));
}
