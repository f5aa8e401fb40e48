use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::Arc;

use quasikit::io::{bundle, Item};
use quasikit::lattice::HeytingAlgebra;
use quasikit::presheaf::FuzzyMorphism;
use quasikit::rewrite::TransmissionDemo;
use serde_json::{json, Value};

fn quasikit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quasikit")).args(args).env_remove("QUASIKIT_MAX_ENUM").output().unwrap()
}

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn fixture(file: &str, name: &str) -> String {
    format!("{}#{name}", fixtures().join(file).display())
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn bundled_fixtures_validate() {
    let o = quasikit(&["validate", &fixtures().display().to_string()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert_eq!(stdout(&o).lines().count(), 6);
}

#[test]
fn invalid_files_report_their_codes() {
    let dir = fixtures().with_file_name("fixtures-invalid");
    let o = quasikit(&["validate", &dir.join("m3.json").display().to_string()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("NotResiduated"));
    let o = quasikit(&["validate", &dir.join("dangling-ref.json").display().to_string(), "--format", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["files"][0]["error"], "UnresolvedRef");
}

#[test]
fn chi_of_the_triangle_subgraph() {
    let o = quasikit(&["compute", "chi", &fixture("triangle.json", "subgraph"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let e = &v["artifact"]["components"]["E"];
    assert_eq!(e["a"], "{s,t}");
    assert_eq!(e["b"], "{s}");
    assert_eq!(e["c"], "{t}");
    assert_eq!(v["artifact"]["components"]["V"]["w"], "{}");
}

#[test]
fn exponential_of_two_fuzzy_points() {
    let o = quasikit(&["compute", "exp", &fixture("fuzzy-sets.json", "one"), &fixture("fuzzy-sets.json", "half"), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let table = v["summary"]["*"]["membership"].as_object().unwrap();
    assert_eq!(table.len(), 1);
    assert_eq!(table.values().next().unwrap(), "1/2");
    assert_eq!(v["explored"], 1);
}

#[test]
fn pullback_with_mismatched_lattices() {
    let tmp = tempfile::tempdir().unwrap();
    let two = quasikit::fixtures::graph(&HeytingAlgebra::boolean(), &[("v", "1")], &[]).unwrap();
    let three = quasikit::fixtures::graph(&HeytingAlgebra::c3(), &[("v", "1")], &[]).unwrap();
    let (two, three) = (Arc::new(two), Arc::new(three));
    let items = bundle([
        ("f".to_string(), Item::Morphism(FuzzyMorphism::identity(&two))),
        ("g".to_string(), Item::Morphism(FuzzyMorphism::identity(&three))),
    ]);
    let file = tmp.path().join("mixed.json");
    std::fs::write(&file, items.to_pretty()).unwrap();
    let f = format!("{}#f", file.display());
    let g = format!("{}#g", file.display());
    let o = quasikit(&["compute", "pullback", &f, &g]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("LabelMismatch"), "{}", stderr(&o));
}

#[test]
fn pushout_writes_an_artifact_that_parses() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("po.json");
    let o = quasikit(&[
        "compute",
        "pushout",
        &fixture("triangle.json", "f"),
        &fixture("triangle.json", "g"),
        "--out",
        &out.display().to_string(),
    ]);
    // f and g share no domain, so this is rejected before anything is written
    assert_eq!(o.status.code(), Some(1));
    let o = quasikit(&[
        "compute",
        "union",
        &fixture("triangle.json", "left"),
        &fixture("triangle.json", "right"),
        "--out",
        &out.display().to_string(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = quasikit(&["validate", &out.display().to_string()]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn check_reports_expected_negatives_and_hom_sizes() {
    let o = quasikit(&["check", "classifier"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("lowered mono fails the square"));
    assert!(stdout(&o).contains("pass (expected negative)"));
    let o = quasikit(&["check", "adjunction", "--format", "json"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["results"][1]["detail"].as_str().unwrap().contains("largest hom-set"));
    assert_eq!(quasikit(&["check", "nonsense"]).status.code(), Some(2));
}

#[test]
fn seeds_change_nothing_but_the_samples() {
    let a = quasikit(&["check", "limits", "--seed", "5"]);
    let b = quasikit(&["check", "limits", "--seed", "5"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), Some(0));
}

#[test]
fn rewrite_the_bundled_transmission() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("post.json");
    let o = quasikit(&[
        "rewrite",
        &fixture("transmission.json", "rule"),
        &fixture("transmission.json", "host"),
        "--out",
        &out.display().to_string(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("front faces pullbacks: yes yes"));
    let expected = TransmissionDemo::build().unwrap().expected_post;
    let post = Item::Presheaf(expected).to_pretty();
    let o = quasikit(&["compute", "terminal", &format!("{}#post", out.display())]);
    assert_eq!(o.status.code(), Some(0));
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let post_json: Value = serde_json::from_str(&post).unwrap();
    assert_eq!(written["items"]["post"], post_json);
}

#[test]
fn demo_matches_the_expected_file() {
    let tmp = tempfile::tempdir().unwrap();
    let o = quasikit(&["demo", "--out", &tmp.path().display().to_string()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("post-state matches expected: yes"));
    let post = std::fs::read(tmp.path().join("post.json")).unwrap();
    assert_eq!(post, std::fs::read(tmp.path().join("expected-post.json")).unwrap());
}

fn rule_file(dir: &Path, r: FuzzyMorphism, t_k: FuzzyMorphism, t_r: FuzzyMorphism, r_prime: FuzzyMorphism) -> PathBuf {
    let parts = bundle([
        ("r".to_string(), Item::Morphism(r)),
        ("t_K".to_string(), Item::Morphism(t_k)),
        ("t_R".to_string(), Item::Morphism(t_r)),
        ("r'".to_string(), Item::Morphism(r_prime)),
    ]);
    let mut v = parts.to_json();
    v["items"]["rule"] = json!({"$kind": "rule", "r": "#r", "t_K": "#t_K", "t_R": "#t_R", "r'": "#r'"});
    let path = dir.join("rule.json");
    std::fs::write(&path, serde_json::to_string_pretty(&v).unwrap()).unwrap();
    path
}

#[test]
fn identity_rule_and_non_pushout_bottom() {
    let tmp = tempfile::tempdir().unwrap();
    let base = TransmissionDemo::build().unwrap().base;
    let k = Arc::new(TransmissionDemo::state(&base, &[("p", "{mail}")], &[]).unwrap());
    let id = FuzzyMorphism::identity(&k);
    let path = rule_file(tmp.path(), id.clone(), id.clone(), id.clone(), id.clone());
    let host = bundle([("u".to_string(), Item::Morphism(id.clone()))]);
    let mut hv = host.to_json();
    hv["items"]["host"] = json!({"$kind": "host", "u": "#u", "u'": "#u"});
    let host_path = tmp.path().join("host.json");
    std::fs::write(&host_path, serde_json::to_string_pretty(&hv).unwrap()).unwrap();
    let o = quasikit(&["rewrite", &format!("{}#rule", path.display()), &format!("{}#host", host_path.display())]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(!stdout(&o).contains(": no"), "{}", stdout(&o));

    let k2 = Arc::new(TransmissionDemo::state(&base, &[("p", "{mail}"), ("x", "{}")], &[]).unwrap());
    let incl =
        FuzzyMorphism::from_named(k.clone(), k2.clone(), &[("P".into(), vec![("p".into(), "p".into())]), ("C".into(), vec![])]).unwrap();
    let squash = FuzzyMorphism::new(k2.clone(), k.clone(), vec![vec![], vec![0, 0]]);
    // x@{} may map onto p@{mail}
    let squash = squash.unwrap();
    let path = rule_file(tmp.path(), id.clone(), incl, id.clone(), squash);
    let o = quasikit(&["rewrite", &format!("{}#rule", path.display()), &format!("{}#host", host_path.display())]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("BottomNotPushout"), "{}", stderr(&o));
}

#[test]
fn max_enum_from_the_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_quasikit"))
        .args(["compute", "exp", &fixture("fuzzy-sets.json", "one"), &fixture("fuzzy-sets.json", "half")])
        .env("QUASIKIT_MAX_ENUM", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}
