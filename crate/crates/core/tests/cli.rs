use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbit-smooth"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn fold_b2_example_row() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p.csv"), "-1,2\n0.5,0.2\n").unwrap();
    let o = run(dir.path(), &["--preset", "B2", "fold", "--input", "p.csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# seed="));
    assert_eq!(lines[1], "x0,x1,image0,image1,level,wall_count,word_length");
    let row: Vec<&str> = lines[2].split(',').collect();
    let x: f64 = row[2].parse().unwrap();
    let y: f64 = row[3].parse().unwrap();
    assert!((x - 2.0).abs() < 1e-12 && (y - 1.0).abs() < 1e-12);
    assert_eq!(&row[4..], ["2", "0", "2"]);
    let inside: Vec<&str> = lines[3].split(',').collect();
    assert_eq!(inside[6], "0");
    assert_eq!(inside[0], inside[2]);
}

#[test]
fn fold_names_malformed_row() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p.csv"), "1,2\n3,4\n1,oops\n").unwrap();
    let o = run(dir.path(), &["fold", "--input", "p.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("row 3"), "{}", stderr(&o));
}

#[test]
fn unknown_preset_is_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--preset", "E8", "verify"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(o.stdout.is_empty());
    fs::write(dir.path().join("c.ini"), "[group]\npreset = F4\n").unwrap();
    let o = run(dir.path(), &["--config", "c.ini", "verify"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn wide_tubes_fail_verification() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.ini"), "[group]\npreset = B2\n[tubes]\nslopes = 10\n").unwrap();
    let o = run(dir.path(), &["--config", "c.ini", "verify"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["pass"], false);
    assert!(v["results"][0]["note"].as_str().unwrap().contains("overlap"));
    let o = run(dir.path(), &["--config", "c.ini", "build-map"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn default_verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--out", "v.json", "verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("v.json")).unwrap()).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["seed"], 20240611);
    assert_eq!(v["results"].as_array().unwrap().len(), 10);
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p.csv"), "-1,2\n0.3,-0.7\n2,2\n").unwrap();
    for args in [
        vec!["--seed", "5", "fold", "--input", "p.csv"],
        vec!["--seed", "5", "grid"],
        vec!["--seed", "5", "probe", "--summary", "s.json"],
        vec!["--seed", "5", "demo-sym3", "--count", "4"],
        vec!["--seed", "5", "build-map"],
    ] {
        let a = run(dir.path(), &args);
        let b = run(dir.path(), &args);
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", stderr(&a));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert!(stdout(&a).contains("seed"), "{args:?}");
    }
}

#[test]
fn grid_z2_line_is_even() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.ini"), "[group]\ngenerators = 1\n[grid]\nlower = -2\nupper = 2\nnodes = 5\n").unwrap();
    let o = run(dir.path(), &["--config", "c.ini", "grid"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let h: Vec<f64> = stdout(&o)
        .lines()
        .skip(2)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(h.len(), 5);
    for i in 0..5 {
        assert_eq!(h[i], h[4 - i]);
    }
}

#[test]
fn grid_empty_box_and_high_dimension() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.ini"), "[grid]\nlower = 1, 1\nupper = 0, 2\nnodes = 3, 3\n").unwrap();
    let o = run(dir.path(), &["--config", "c.ini", "grid"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().count(), 2);
    fs::write(dir.path().join("d.ini"), "[group]\ngenerators = 1,0,0,0; 0,1,0,0\n").unwrap();
    let o = run(dir.path(), &["--config", "d.ini", "grid"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("dimension"));
}

#[test]
fn probe_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(dir.path(), &["--out", "p.csv", "probe"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("p.csv")).unwrap();
    assert_eq!(csv.lines().nth(1).unwrap(), "point,kind,offset,order,jump_norm,control_jump_norm,floor");
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("p.summary.json")).unwrap()).unwrap();
    assert_eq!(summary["probes"].as_array().unwrap().len(), 40);
}

#[test]
fn demo_sym3_reads_matrices() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("m.csv"), "3,0,0,0,1,0,0,0,2\n1,1,1,0,0,0\n").unwrap();
    let o = run(dir.path(), &["demo-sym3", "--input", "m.csv"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let row: Vec<f64> = text.lines().nth(2).unwrap().split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(&row[7..10], &[3.0, 2.0, 1.0]);
    fs::write(dir.path().join("bad.csv"), "1,2,3,4,5,6,7,8,9\n").unwrap();
    let o = run(dir.path(), &["demo-sym3", "--input", "bad.csv"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("row 1"));
}
