use std::path::Path;
use std::process::{Command, Output};

fn hnr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hnr"))
        .args(args)
        .env_remove("HNR_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

#[test]
fn intersect_prints_crossing() {
    let o = hnr(&["intersect", "--a", "0.5", "--b", "1.0", "--n", "3"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("t_star = 0.409945541846"), "{text}");
    assert!(text.contains("f(a, t_star) = "), "{text}");
}

#[test]
fn height_table_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("h.csv");
    let o = hnr(&["height-table", "--family", "md", "--n", "2", "--param-range", "1.5:2.5:0.5", "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "d,H,H_minus_half_pi");
    assert_eq!(lines.len(), 4);
    let row: Vec<f64> = lines[2].split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!(row[0], 2.0);
    assert!((row[1] - 1.685_750_354_812_596).abs() < 1e-11);

    let o = hnr(&["height-table", "--family", "catenoid", "--n", "3", "--param-range", "0.5:1.5:0.5"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("a,T,h_R,gap\n"), "{text}");
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn profile_columns_agree() {
    let o = hnr(&["profile", "--a", "1", "--n", "3", "--step", "0.05"]);
    assert!(o.status.success());
    for line in stdout(&o).lines().skip(1) {
        let diff: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(diff < 1e-6, "{line}");
    }
}

#[test]
fn mesh_sweep_and_obstruct_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.obj");
    let b = dir.path().join("b.obj");
    let json = dir.path().join("b.json");
    let o = hnr(&["mesh", "--family", "catenoid", "--a", "0.5", "--n", "2", "--res", "8", "--out", path(&a)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = hnr(&[
        "mesh", "--family", "md", "--d", "2", "--n", "2", "--res", "8", "--out", path(&b), "--boundary-out", path(&json),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let obj = std::fs::read_to_string(&a).unwrap();
    assert!(obj.lines().any(|l| l.starts_with("v ")));
    assert!(obj.lines().any(|l| l.starts_with("f ")));

    let o = hnr(&[
        "sweep", "--moving", path(&a), "--fixed", path(&a), "--geodesic", "0,3.141592653589793", "--range", "-1:1", "--step", "0.5",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let res: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(res["status"], "contact");
    assert_eq!(res["contact"], -1.0);

    let o = hnr(&["obstruct", "--in", path(&json), "--n", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("overall: no_obstruction_detected"), "{text}");
}

#[test]
fn obstruct_flags_thin_half_circle() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("c.json");
    let mut vertices = Vec::new();
    for (t, range) in [(0.1, (0..=16).collect::<Vec<_>>()), (0.9, (0..=16).rev().collect())] {
        for i in range {
            let th = std::f64::consts::PI * i as f64 / 16.0;
            vertices.push(serde_json::json!({"u": [th.cos(), th.sin()], "t": t}));
        }
    }
    let doc = serde_json::json!({"n": 2, "closed": true, "vertices": vertices});
    std::fs::write(&json, doc.to_string()).unwrap();
    let o = hnr(&["obstruct", "--in", path(&json), "--n", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("rule: slab_and_projection"), "{text}");
    assert!(text.contains("overall: obstructed"), "{text}");
}

#[test]
fn exit_codes() {
    assert_eq!(hnr(&["intersect", "--a", "0.5", "--bogus", "1"]).status.code(), Some(2));
    assert_eq!(hnr(&["height-table", "--family", "md", "--n", "2", "--param-range", "1:2"]).status.code(), Some(2));
    let o = hnr(&["intersect", "--a", "-1", "--b", "1", "--n", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: "));
    assert_eq!(hnr(&["obstruct", "--in", "/nonexistent/file.json", "--n", "2"]).status.code(), Some(1));
    assert_eq!(hnr(&["--help"]).status.code(), Some(0));
}

#[test]
fn quick_verify_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = hnr(&["verify", "--quick", "--out", path(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report["summary"]["passed"], report["summary"]["total"]);
    assert_eq!(report["metadata"]["quick"], true);
    let criteria: std::collections::BTreeSet<u64> = report["entries"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["criterion"].as_u64().unwrap())
        .collect();
    assert_eq!(criteria, (1..=10).collect());
}
