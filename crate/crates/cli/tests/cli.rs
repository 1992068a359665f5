use std::path::Path;
use std::process::{Command, Output};

fn lpdos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lpdos"))
        .args(args)
        .env_remove("LPDOS_CACHE_DIR")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn rows(o: &Output) -> Vec<Vec<String>> {
    stdout(o)
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn sequence_tables() {
    let o = lpdos(&["sequence", "-m", "2"]);
    assert_eq!(code(&o), 0);
    let lambdas: Vec<String> = rows(&o).into_iter().map(|r| r[2].clone()).collect();
    assert_eq!(lambdas, ["1/4", "3/4", "0", "1/2"]);

    let o = lpdos(&["sequence", "-m", "1", "--start", "0", "--end", "2"]);
    let lambdas: Vec<String> = rows(&o).into_iter().map(|r| r[2].clone()).collect();
    assert_eq!(lambdas, ["0", "1/2"]);

    assert_eq!(code(&lpdos(&["sequence", "-m", "0"])), 1);
    assert_eq!(code(&lpdos(&["sequence"])), 1);
}

#[test]
fn distal_margins() {
    let o = lpdos(&["distal", "--kmax", "16", "--depth", "20", "--symmetric"]);
    assert_eq!(code(&o), 0);
    let table = rows(&o);
    assert_eq!(table.len(), 32);
    assert!(table.iter().all(|r| r[4] == "PASS"));
    for k in 1..=16usize {
        let neg = &table[16 - k];
        let pos = &table[15 + k];
        assert_eq!(neg[0], format!("-{k}"));
        assert_eq!(neg[1..], pos[1..]);
    }

    let o = lpdos(&["distal", "--kmax", "8", "--depth", "5"]);
    assert!(stderr(&o).contains("warning"));
    assert_eq!(code(&o), 2);
}

#[test]
fn landing_index_row() {
    let o = lpdos(&["landing", "-m", "1", "-j", "1"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    let row = out.lines().nth(1).unwrap();
    assert!(row.starts_with("1,1,\"[1/2, 1)\",1,"), "{row}");
    assert!(row.ends_with(",true"));
    assert_eq!(code(&lpdos(&["landing", "-m", "2", "-j", "4"])), 1);
}

#[test]
fn lattice_values() {
    let o = lpdos(&["lattice", "-d", "2", "--delta", "1", "-x", "0"]);
    assert_eq!(code(&o), 0);
    let r = &rows(&o)[0];
    assert_eq!(r[1].parse::<f64>().unwrap(), 3.0);
    assert!((r[2].parse::<f64>().unwrap() - 3.0).abs() < 1e-12);
    assert!(r[3].parse::<f64>().unwrap() < 1e-12);

    let o = lpdos(&["lattice", "-d", "2", "-m", "1"]);
    let r = &rows(&o)[0];
    assert_eq!(r[1].parse::<f64>().unwrap(), 1.5);

    assert_eq!(code(&lpdos(&["lattice", "-d", "1", "--delta", "1"])), 1);
    assert_eq!(code(&lpdos(&["lattice", "-d", "2"])), 1);
}

#[test]
fn free_ids_matches_arccos_and_caches() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let out1 = dir.path().join("a");
    let out2 = dir.path().join("b");
    let n = 4096;
    let args = |out: &Path| {
        vec![
            "ids".to_string(),
            "--free".into(),
            "-m".into(),
            "4".into(),
            "-N".into(),
            n.to_string(),
            "--out".into(),
            out.display().to_string(),
            "--cache".into(),
            cache.display().to_string(),
        ]
    };
    let run = |out: &Path| {
        let a = args(out);
        lpdos(&a.iter().map(String::as_str).collect::<Vec<_>>())
    };
    assert_eq!(code(&run(&out1)), 0);
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    assert_eq!(code(&run(&out2)), 0);
    for name in ["ids.csv", "eigenvalues.txt"] {
        assert_eq!(
            std::fs::read(out1.join(name)).unwrap(),
            std::fs::read(out2.join(name)).unwrap()
        );
    }

    let csv = std::fs::read_to_string(out1.join("ids.csv")).unwrap();
    let k = |e: f64| 1.0 - (e / 2.0).clamp(-1.0, 1.0).acos() / std::f64::consts::PI;
    let mut prev = 0.0;
    for line in csv.lines().skip(1) {
        let (e, v) = line.split_once(',').unwrap();
        let (e, v): (f64, f64) = (e.parse().unwrap(), v.parse().unwrap());
        assert!((k(e) - v).abs() <= 2.0 / n as f64 && (k(e) - prev).abs() <= 2.0 / n as f64);
        prev = v;
    }
}

#[test]
fn misaligned_size_warns() {
    let dir = tempfile::tempdir().unwrap();
    let o = lpdos(&["ids", "-m", "4", "-N", "100", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("not a multiple"));
}

#[test]
fn epsilon_validity() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = lpdos(&["ids", "-m", "4", "-N", "64", "--epsilon", "0.5", "--out", out]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("ε_valid"));
    let o = lpdos(&[
        "ids",
        "-m",
        "4",
        "-N",
        "64",
        "--epsilon",
        "0.5",
        "--override-epsilon",
        "--out",
        out,
    ]);
    assert_eq!(code(&o), 0);
}

#[test]
fn localization_rows() {
    let o = lpdos(&["localization", "-m", "4", "-N", "64", "-k", "3,10,33"]);
    assert_eq!(code(&o), 0);
    let eps = 2f64.powi(-5);
    for r in rows(&o) {
        assert!(r[5].parse::<f64>().unwrap() <= 64.0 * eps * eps);
        assert!(r[4].parse::<f64>().unwrap() > 1.2);
    }
    assert_eq!(code(&lpdos(&["localization", "-m", "4", "-N", "64", "-k", "64"])), 1);
}

#[test]
fn modulus_small_run_and_thread_independence() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let base = ["modulus", "-m", "5", "-N", "1024"];
    let o = lpdos(&[&base[..], &["--threads", "1", "--out", a.to_str().unwrap()]].concat());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = lpdos(&[&base[..], &["--threads", "4", "--out", b.to_str().unwrap()]].concat());
    assert_eq!(code(&o), 0);
    for name in ["modulus.json", "modulus.csv"] {
        assert_eq!(
            std::fs::read(a.join(name)).unwrap(),
            std::fs::read(b.join(name)).unwrap()
        );
    }
    let report = json(&a.join("modulus.json"));
    for key in [
        "levels",
        "empirical_lipschitz",
        "theoretical_bound",
        "c",
        "d",
        "epsilon",
        "N",
        "verdict",
    ] {
        assert!(report.get(key).is_some(), "missing {key}");
    }
    assert_eq!(report["verdict"], "PASS");
    assert_eq!(report["levels"].as_array().unwrap().len(), 5);
    assert!(report["note"].as_str().unwrap().contains("finite-scale"));
}

#[test]
fn modulus_at_depth_eight() {
    let dir = tempfile::tempdir().unwrap();
    let o = lpdos(&[
        "modulus",
        "-m",
        "8",
        "-N",
        "8192",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let report = json(&dir.path().join("modulus.json"));
    assert_eq!(report["verdict"], "PASS");
    assert_eq!(report["N"], 8192);
}

#[test]
fn modulus_free_control_fails() {
    let dir = tempfile::tempdir().unwrap();
    let o = lpdos(&[
        "modulus",
        "--free",
        "-m",
        "8",
        "-N",
        "8192",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 2);
    let report = json(&dir.path().join("modulus.json"));
    assert_eq!(report["verdict"], "FAIL");
    let h = report["holder_exponent"].as_f64().unwrap();
    assert!((0.4..=0.6).contains(&h), "{h}");
    assert!(report["note"].as_str().unwrap().contains("Hölder"));
}

#[test]
fn modulus_rejects_deep_levels() {
    let dir = tempfile::tempdir().unwrap();
    let o = lpdos(&[
        "modulus",
        "-m",
        "4",
        "-N",
        "64",
        "--levels",
        "5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
    let o = lpdos(&[
        "modulus",
        "-m",
        "4",
        "-N",
        "64",
        "--levels",
        "3..1",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 1);
}

#[test]
fn report_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let o = lpdos(&["report", "-m", "4", "-N", "512", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = json(&dir.path().join("report.json"));
    assert_eq!(r["landing"]["symmetric_difference"]["midpoint"], 0);
    assert!(r["matching"]["max_defect_bulk"].as_f64().unwrap() <= r["matching"]["defect_limit"].as_f64().unwrap());
    assert!(r["decay"]["max_c_at_reference"].as_f64().unwrap() <= 10.0);
    assert_eq!(r["modulus"]["verdict"], "PASS");
    assert_eq!(r["config"]["N"], 512);
}

#[test]
fn spectrum_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let o = lpdos(&[
        "spectrum",
        "-m",
        "4",
        "-N",
        "64",
        "--vectors",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("method=sturm-bisection"));
    let file = std::fs::read_dir(dir.path()).unwrap().next().unwrap().unwrap().path();
    let text = std::fs::read_to_string(&file).unwrap();
    assert!(text.starts_with("# lpdos-spectrum"));
    assert!(text.contains("# vectors"));
    let o = lpdos(&["spectrum", "-m", "4", "-N", "64", "--boundary", "periodic"]);
    assert!(stdout(&o).contains("method=dense"));
    assert_eq!(
        code(&lpdos(&["spectrum", "-m", "4", "-N", "64", "--boundary", "open"])),
        1
    );
}
