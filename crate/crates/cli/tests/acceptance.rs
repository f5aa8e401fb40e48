//! End-to-end acceptance run: one line per criterion with its runtime.

use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode, Output};
use std::time::{Duration, Instant};

use quasikit::fixtures;
use quasikit::io::Workspace;
use quasikit::suites::{self, PropertyResult, SuiteConfig};

struct Verdict {
    ok: bool,
    summary: String,
}

fn suite(name: &str) -> Result<Vec<PropertyResult>, String> {
    suites::run(name, &SuiteConfig::default()).map_err(|e| format!("{name} suite error: {e}"))
}

/// Every property passed, and each named property examined at least the
/// given number of instances.
fn judge(results: &[PropertyResult], minimum: &[(&str, u64)]) -> Verdict {
    let mut problems: Vec<String> = results.iter().filter(|r| !r.passed).map(|r| format!("{}: {}", r.name, r.detail)).collect();
    for (name, at_least) in minimum {
        match results.iter().find(|r| r.name == *name) {
            Some(r) if r.checked >= *at_least => {}
            Some(r) => problems.push(format!("{name}: only {} instances", r.checked)),
            None => problems.push(format!("{name}: missing")),
        }
    }
    let summary = if problems.is_empty() {
        let counted: u64 = results.iter().map(|r| r.checked).sum();
        format!("{} properties, {counted} instances", results.len())
    } else {
        problems.join(" | ")
    };
    Verdict { ok: problems.is_empty(), summary }
}

fn heyting() -> Verdict {
    let names: Vec<String> = fixtures::lattices().into_iter().map(|(n, _)| n).collect();
    let wanted = ["chain-1", "chain-2", "chain-3", "chain-4", "chain-5", "diamond", "powerset-3"];
    if let Some(missing) = wanted.iter().find(|w| !names.iter().any(|n| n == *w)) {
        return Verdict { ok: false, summary: format!("lattice {missing} is not bundled") };
    }
    match suite("heyting") {
        Ok(r) => judge(&r, &[("residuation and modus ponens", 1000), ("M3 and N5 are not residuated", 2)]),
        Err(e) => Verdict { ok: false, summary: e },
    }
}

fn from_suite(name: &str, minimum: &[(&str, u64)]) -> Verdict {
    match suite(name) {
        Ok(r) => {
            let mut v = judge(&r, minimum);
            if name == "adjunction" && v.ok {
                let sizes: Vec<String> = r.iter().map(|p| p.detail.clone()).collect();
                v.summary = sizes.join("; ");
            }
            v
        }
        Err(e) => Verdict { ok: false, summary: e },
    }
}

fn bin() -> PathBuf {
    PathBuf::from(env!("CARGO_BIN_EXE_quasikit"))
}

fn quasikit(args: &[&str]) -> Output {
    Command::new(bin()).args(args).env_remove("QUASIKIT_MAX_ENUM").output().expect("binary runs")
}

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn cli() -> Verdict {
    let mut problems = Vec::new();
    let fx = fixture_dir();
    let invalid = fx.with_file_name("fixtures-invalid");
    let s = |p: &Path| p.display().to_string();

    // round trip: parse then serialize gives the file back
    let mut files = 0;
    for entry in std::fs::read_dir(&fx).expect("fixtures") {
        let path = entry.expect("entry").path();
        let text = std::fs::read_to_string(&path).expect("readable");
        match Workspace::default().load(&path) {
            Ok(item) if item.to_pretty() == text => files += 1,
            Ok(_) => problems.push(format!("{} does not round-trip", path.display())),
            Err(e) => problems.push(format!("{}: {e}", path.display())),
        }
    }

    // exit codes
    let code = |o: &Output| o.status.code().unwrap_or(-1);
    let expect = |problems: &mut Vec<String>, what: &str, o: Output, want: i32| {
        if code(&o) != want {
            problems.push(format!("{what}: exit {} instead of {want}", code(&o)));
        }
    };
    expect(&mut problems, "validate fixtures", quasikit(&["validate", &s(&fx)]), 0);
    expect(&mut problems, "validate M3", quasikit(&["validate", &s(&invalid.join("m3.json"))]), 1);
    expect(&mut problems, "non-natural morphism", quasikit(&["validate", &s(&invalid.join("not-natural.json"))]), 1);
    expect(&mut problems, "unknown command", quasikit(&["frobnicate"]), 2);
    expect(&mut problems, "missing argument", quasikit(&["compute", "exp", "x.json"]), 2);
    let one = format!("{}#one", s(&fx.join("fuzzy-sets.json")));
    let half = format!("{}#half", s(&fx.join("fuzzy-sets.json")));
    expect(&mut problems, "capped enumeration", quasikit(&["compute", "exp", &one, &half, "--max-enum", "0"]), 3);

    // byte-identical reruns
    let tmp = tempfile::tempdir().expect("temp dir");
    let runs: Vec<Vec<u8>> = (0..2)
        .map(|k| {
            let out = tmp.path().join(format!("exp{k}.json"));
            quasikit(&["compute", "exp", &one, &half, "--out", &s(&out)]);
            std::fs::read(&out).unwrap_or_default()
        })
        .collect();
    if runs[0] != runs[1] || runs[0].is_empty() {
        problems.push("compute exp output differs between runs".into());
    }
    let checks: Vec<Vec<u8>> = (0..2).map(|_| quasikit(&["check", "all", "--seed", "3", "--format", "json"]).stdout).collect();
    if checks[0] != checks[1] {
        problems.push("check all output differs between runs".into());
    }
    let demo: Vec<(Vec<u8>, Vec<u8>)> = (0..2)
        .map(|k| {
            let dir = tmp.path().join(format!("demo{k}"));
            let o = quasikit(&["demo", "--out", &s(&dir)]);
            if code(&o) != 0 {
                return (Vec::new(), Vec::new());
            }
            (std::fs::read(dir.join("post.json")).unwrap_or_default(), std::fs::read(dir.join("expected-post.json")).unwrap_or_default())
        })
        .collect();
    if demo[0].0.is_empty() || demo[0] != demo[1] || demo[0].0 != demo[0].1 {
        problems.push("demo post-state differs from the expected file or between runs".into());
    }

    let ok = problems.is_empty();
    Verdict {
        ok,
        summary: if ok { format!("{files} fixture files round-trip, reruns identical, exit codes 0/1/2/3") } else { problems.join(" | ") },
    }
}

fn main() -> ExitCode {
    type Criterion = (u32, &'static str, u64, Box<dyn Fn() -> Verdict>);
    let criteria: Vec<Criterion> = vec![
        (1, "Heyting laws", 1, Box::new(heyting)),
        (
            2,
            "limits and colimits",
            30,
            Box::new(|| {
                let each: Vec<(&str, u64)> =
                    ["terminal", "initial", "product", "coproduct", "pullback", "pushout", "equalizer", "coequalizer"]
                        .into_iter()
                        .map(|k| (k, 200))
                        .collect();
                from_suite("limits", &each)
            }),
        ),
        (
            3,
            "subobject classifier",
            60,
            Box::new(|| from_suite("classifier", &[("chi classifies uniquely", 2), ("omega matches the picture", 7)])),
        ),
        (
            4,
            "exponential adjunction",
            120,
            Box::new(|| from_suite("adjunction", &[("curry bijection on fuzzy sets", 1000), ("curry bijection on graphs", 17576)])),
        ),
        (
            5,
            "slice equivalence",
            30,
            Box::new(|| {
                from_suite(
                    "slice",
                    &[("sigma is an isomorphism", 20), ("tau is an isomorphism", 20), ("slice homs match element homs", 20)],
                )
            }),
        ),
        (6, "rm-adhesivity", 60, Box::new(|| from_suite("adhesive", &[("regular unions", 300), ("Van Kampen on regular spans", 50)]))),
        (
            7,
            "topology",
            60,
            Box::new(|| from_suite("topology", &[("separated criterion and definition agree", 400), ("topology axioms", 30)])),
        ),
        (
            8,
            "transmission rewrite",
            5,
            Box::new(|| from_suite("rewrite", &[("transmission post-state", 1), ("front faces are pullbacks", 2)])),
        ),
        (9, "command line", 120, Box::new(cli)),
    ];
    let mut failed = 0;
    for (n, name, limit, run) in &criteria {
        let start = Instant::now();
        let v = run();
        let took = start.elapsed();
        let in_time = took <= Duration::from_secs(*limit);
        let ok = v.ok && in_time;
        if !ok {
            failed += 1;
        }
        let timing = format!("{:.2}s of {limit}s", took.as_secs_f64());
        let note = if v.ok && !in_time { format!("too slow; {}", v.summary) } else { v.summary };
        println!("criterion {n} {:<24} {} ({timing}) {note}", name, if ok { "PASS" } else { "FAIL" });
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
