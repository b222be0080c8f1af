use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use kitaev_poisson::poisson_lab::CheckRecord;
use kitaev_poisson::ribbon_graph::RibbonGraph;

fn kpl(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kpl")).current_dir(dir).args(args).output().expect("kpl runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn reference(dir: &Path, name: &str) -> PathBuf {
    let o = kpl(dir, &["reference", name, "--out", &format!("{name}.json")]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    dir.join(format!("{name}.json"))
}

fn records(path: &Path) -> Vec<CheckRecord> {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn check_graph_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    reference(d, "square");
    let o = kpl(d, &["check-graph", "square.json"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("genus 0"));

    fs::write(d.join("broken.json"), "{\"vertices\": [").unwrap();
    assert_eq!(code(&kpl(d, &["check-graph", "broken.json"])), 2);
    assert_eq!(code(&kpl(d, &["check-graph", "missing.json"])), 2);

    // drop one step from a face so its path no longer closes
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("square.json")).unwrap()).unwrap();
    let face = v["faces"][0]["id"].as_str().unwrap().to_string();
    v["faces"][0]["path"].as_array_mut().unwrap().pop();
    fs::write(d.join("open.json"), v.to_string()).unwrap();
    let o = kpl(d, &["check-graph", "open.json"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains(&face), "{}", stdout(&o));
}

#[test]
fn verify_suites() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    reference(d, "square");
    let o = kpl(d, &["verify", "square.json", "--suite", "all", "--backend", "abelian:2", "--samples", "20", "--seed", "7", "--out", "all.json"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let recs = records(&d.join("all.json"));
    assert_eq!(recs.len(), kitaev_poisson::poisson_lab::CATALOG.len());
    assert!(recs.iter().all(|r| r.pass && r.backend == "abelian:2"));

    let o = kpl(d, &["verify", "square.json", "--suite", "site_operator_poisson", "--backend", "sl2c", "--out", "s.json"]);
    assert_eq!(code(&o), 0);
    let recs = records(&d.join("s.json"));
    assert!(recs[0].pass && recs[0].tolerance == 1e-5);

    // an impossible tolerance makes the run fail
    let o = kpl(d, &["verify", "square.json", "--suite", "phi_poisson", "--samples", "2", "--tol", "1e-30", "--out", "f.json"]);
    assert_eq!(code(&o), 1);

    assert_eq!(code(&kpl(d, &["verify", "square.json", "--suite", "no_such_check"])), 2);
    assert_eq!(code(&kpl(d, &["verify", "square.json", "--backend", "su2"])), 2);
    assert_eq!(code(&kpl(d, &["verify", "square.json", "--fd-step", "1e-9"])), 2);
    assert_eq!(code(&kpl(d, &["verify", "square.json", "--samples", "0"])), 2);
}

#[test]
fn reports_repeat_modulo_runtime() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    reference(d, "theta");
    let run = |out: &str| {
        let o = kpl(d, &["verify", "theta.json", "--suite", "face_ops_commute,glue_face_poisson", "--samples", "4", "--seed", "9", "--out", out]);
        assert_eq!(code(&o), 0);
        let mut recs = records(&d.join(out));
        recs.iter_mut().for_each(|r| r.runtime_ms = 0);
        serde_json::to_string(&recs).unwrap()
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn transform_scripts() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    reference(d, "square");
    fs::write(
        d.join("sg.json"),
        r#"[{"kind": "split_edge", "edge": "e1", "vertex": "m"}, {"kind": "glue_bivalent", "vertex": "m", "edge": "e1"}]"#,
    )
    .unwrap();
    let o = kpl(d, &["transform", "square.json", "sg.json", "--out", "back.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(fs::read(d.join("back.json")).unwrap(), fs::read(d.join("square.json")).unwrap());

    assert_eq!(code(&kpl(d, &["random-point", "square.json", "--out", "p.json"])), 0);
    let o = kpl(d, &["transform", "square.json", "sg.json", "--point", "p.json", "--point-out", "q.json", "--out", "back2.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let (p, q): (serde_json::Value, serde_json::Value) = (
        serde_json::from_str(&fs::read_to_string(d.join("p.json")).unwrap()).unwrap(),
        serde_json::from_str(&fs::read_to_string(d.join("q.json")).unwrap()).unwrap(),
    );
    for (k, a) in p["edges"].as_object().unwrap() {
        for (x, y) in a.as_array().unwrap().iter().zip(q["edges"][k].as_array().unwrap()) {
            assert!((x.as_f64().unwrap() - y.as_f64().unwrap()).abs() < 1e-12);
        }
    }

    reference(d, "loop");
    fs::write(d.join("pair.json"), r#"[{"kind": "pair", "sites": [["v", "f1"]]}]"#).unwrap();
    assert_eq!(code(&kpl(d, &["transform", "loop.json", "pair.json", "--out", "paired.json"])), 0);
    let g = RibbonGraph::from_json(&fs::read_to_string(d.join("paired.json")).unwrap()).unwrap();
    assert!(g.is_paired());

    fs::write(d.join("bad.json"), r#"[{"kind": "reverse", "edge": "e2"}, {"kind": "erase", "edge": "e9"}]"#).unwrap();
    let o = kpl(d, &["transform", "square.json", "bad.json"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("step 1"), "{}", stderr(&o));
    fs::write(d.join("junk.json"), "[{\"kind\": \"teleport\"}]").unwrap();
    assert_eq!(code(&kpl(d, &["transform", "square.json", "junk.json"])), 2);
}

#[test]
fn iso_roundtrip() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path();
    reference(d, "paired_square");
    reference(d, "square");
    for backend in ["sl2c", "abelian:2"] {
        assert_eq!(code(&kpl(d, &["random-point", "paired_square.json", "--backend", backend, "--seed", "5", "--out", "p.json"])), 0);
        let o = kpl(d, &["iso-roundtrip", "paired_square.json", "p.json", "--out", "iso.json", "--image", "img.json"]);
        assert_eq!(code(&o), 0, "{}", stdout(&o));
        let recs = records(&d.join("iso.json"));
        assert!(recs.iter().all(|r| r.pass && r.backend == backend));
        assert!(recs.iter().find(|r| r.name == "psi_after_phi").unwrap().max_residual < 1e-10);
        assert!(d.join("img.json").exists());
    }

    // the identity point is fixed
    let o = kpl(d, &["random-point", "paired_square.json", "--out", "p.json"]);
    assert_eq!(code(&o), 0);
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(d.join("p.json")).unwrap()).unwrap();
    for (_, c) in v["edges"].as_object_mut().unwrap() {
        *c = serde_json::json!([1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
    }
    fs::write(d.join("id.json"), v.to_string()).unwrap();
    let o = kpl(d, &["iso-roundtrip", "paired_square.json", "id.json", "--out", "iso.json"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for r in records(&d.join("iso.json")) {
        assert!(r.pass);
        if r.name != "phi_poisson_at_point" {
            assert!(r.max_residual < 1e-12, "{r:?}");
        }
    }

    assert_eq!(code(&kpl(d, &["random-point", "square.json", "--out", "q.json"])), 0);
    let o = kpl(d, &["iso-roundtrip", "square.json", "q.json"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("pair"));
}
