//! The bundled example values, written to `fixtures/` as exchange files.

use std::path::Path;
use std::sync::Arc;

use crate::category::{FiniteCategory, Schema};
use crate::error::{Error, Result};
use crate::homs::Budget;
use crate::io::{bundle, Item};
use crate::lattice::{HeytingAlgebra, OrderMode};
use crate::presheaf::{uniform_labels, FuzzyPresheaf, Presheaf, Subobject};
use crate::rewrite::{transmission_match, transmit, TransmissionDemo};

/// A fuzzy graph over the graph schema with labels in `lattice`, from
/// `(vertex, membership)` and `(edge, source, target, membership)`.
pub fn graph(lattice: &HeytingAlgebra, vertices: &[(&str, &str)], edges: &[(&str, &str, &str, &str)]) -> Result<FuzzyPresheaf> {
    let base = Arc::new(FiniteCategory::graph());
    let end = |k: usize| -> Vec<(String, String)> { edges.iter().map(|e| (e.0.to_string(), [e.1, e.2][k].to_string())).collect() };
    let shape = Presheaf::from_named(
        base.clone(),
        &[("V".into(), vertices.iter().map(|v| v.0.to_string()).collect()), ("E".into(), edges.iter().map(|e| e.0.to_string()).collect())],
        &[("s".into(), end(0)), ("t".into(), end(1))],
    )?;
    FuzzyPresheaf::from_named(
        shape,
        uniform_labels(&base, lattice.clone()),
        &[
            ("V".into(), vertices.iter().map(|v| (v.0.to_string(), v.1.to_string())).collect()),
            ("E".into(), edges.iter().map(|e| (e.0.to_string(), e.3.to_string())).collect()),
        ],
    )
}

fn chain(k: usize) -> HeytingAlgebra {
    let names: Vec<String> = (0..k).map(|i| i.to_string()).collect();
    HeytingAlgebra::chain(&names).expect("chains are Heyting")
}

pub fn diamond() -> HeytingAlgebra {
    HeytingAlgebra::new(&["bot", "a", "b", "top"], &[("bot", "a"), ("bot", "b"), ("a", "top"), ("b", "top")], OrderMode::Hasse)
        .expect("the square is distributive")
}

/// Every bundled lattice by name.
pub fn lattices() -> Vec<(String, HeytingAlgebra)> {
    let mut out: Vec<(String, HeytingAlgebra)> = (1..=5).map(|k| (format!("chain-{k}"), chain(k))).collect();
    out.push(("c3".into(), HeytingAlgebra::c3()));
    out.push(("diamond".into(), diamond()));
    out.push(("powerset-3".into(), HeytingAlgebra::powerset(&["a", "b", "c"]).expect("powerset")));
    out
}

pub fn triangle() -> Arc<FuzzyPresheaf> {
    let c3 = HeytingAlgebra::c3();
    Arc::new(
        graph(&c3, &[("u", "1"), ("v", "1"), ("w", "1/2")], &[("a", "u", "v", "1"), ("b", "v", "w", "1/2"), ("c", "w", "u", "1/2")])
            .expect("triangle"),
    )
}

fn regular(ambient: &Arc<FuzzyPresheaf>, elems: &[(&str, &str)]) -> Subobject {
    Subobject::regular_from_names(ambient.clone(), elems).expect("closed subset")
}

/// Graphs with at most two vertices and two edges.
pub fn small_graphs() -> Vec<(String, Arc<FuzzyPresheaf>)> {
    let c3 = HeytingAlgebra::c3();
    let g = |v: &[(&str, &str)], e: &[(&str, &str, &str, &str)]| Arc::new(graph(&c3, v, e).expect("small graph"));
    vec![
        ("points".into(), g(&[("v", "1"), ("w", "1/2")], &[])),
        ("edge".into(), g(&[("v", "1"), ("w", "1/2")], &[("e", "v", "w", "1/2")])),
        ("loop".into(), g(&[("v", "1/2")], &[("e", "v", "v", "0")])),
        ("two-cycle".into(), g(&[("v", "1"), ("w", "1")], &[("e", "v", "w", "1"), ("f", "w", "v", "1/2")])),
        ("parallel".into(), g(&[("v", "1"), ("w", "1/2")], &[("e", "v", "w", "1/2"), ("f", "v", "w", "0")])),
        ("loop-edge".into(), g(&[("v", "1/2"), ("w", "1")], &[("e", "v", "v", "1/2"), ("f", "v", "w", "1")])),
    ]
}

/// The edge with its target vertex at a strictly lower membership.
pub fn lowered_edge() -> Subobject {
    let edge = small_graphs().into_iter().find(|(n, _)| n == "edge").expect("edge").1;
    let half = edge.label(0).element("1/2").expect("C3");
    let zero = edge.label(0).element("0").expect("C3");
    let v = edge.base().object("V").expect("graph");
    let members = (0..edge.base().object_count())
        .map(|o| {
            (0..edge.size(o)).map(|x| Some(if o == v && x == 1 { zero } else { edge.label(o).meet(edge.membership(o, x), half) })).collect()
        })
        .collect();
    Subobject::new(edge, members).expect("below the ambient")
}

/// Two fuzzy sets over C3, one fully present and one at `1/2`.
pub fn fuzzy_sets() -> (Arc<FuzzyPresheaf>, Arc<FuzzyPresheaf>) {
    let base = Arc::new(FiniteCategory::terminal());
    let labels = uniform_labels(&base, HeytingAlgebra::c3());
    let set = |x: &str, l: &str| {
        let shape = Presheaf::from_named(base.clone(), &[("*".into(), vec![x.into()])], &[]).expect("set");
        Arc::new(FuzzyPresheaf::from_named(shape, labels.clone(), &[("*".into(), vec![(x.into(), l.into())])]).expect("set"))
    };
    (set("x", "1"), set("y", "1/2"))
}

/// Every bundled file name with the value it holds.
pub fn catalogue() -> Result<Vec<(&'static str, Item)>> {
    let budget = Budget::default();
    let named = |n: &str| n.to_string();

    let lattices = bundle(lattices().into_iter().map(|(n, l)| (n, Item::Lattice(Arc::new(l)))));

    let mut categories = Vec::new();
    for s in [Schema::Terminal, Schema::Graph, Schema::Undirected, Schema::TernaryConnection] {
        categories.push((named(s.name()), Item::Category(Arc::new(FiniteCategory::schema(s)?))));
    }

    let tri = triangle();
    let subgraph = regular(&tri, &[("V", "u"), ("V", "v")]);
    let left = regular(&tri, &[("V", "u"), ("V", "v"), ("E", "a")]);
    let right = regular(&tri, &[("V", "v"), ("V", "w"), ("E", "b")]);
    let triangle_items = vec![
        (named("c3"), Item::Lattice(tri.labels()[0].clone())),
        (named("triangle"), Item::Presheaf(tri.clone())),
        (named("subgraph"), Item::Subobject(subgraph)),
        (named("left"), Item::Subobject(left.clone())),
        (named("right"), Item::Subobject(right.clone())),
        (named("f"), Item::Morphism(left.inclusion())),
        (named("g"), Item::Morphism(right.inclusion())),
    ];

    let mut small: Vec<(String, Item)> = small_graphs().into_iter().map(|(n, g)| (n, Item::Presheaf(g))).collect();
    small.push((named("lowered"), Item::Subobject(lowered_edge())));
    small.push((named("c3"), Item::Lattice(Arc::new(HeytingAlgebra::c3()))));

    let (one, half) = fuzzy_sets();
    let sets = vec![
        (named("c3"), Item::Lattice(one.labels()[0].clone())),
        (named("one"), Item::Presheaf(one)),
        (named("half"), Item::Presheaf(half)),
    ];

    let demo = TransmissionDemo::build()?;
    let m = transmission_match(&demo.pre_state, &budget)?;
    let done = transmit(&demo.pre_state, &budget)?;
    let transmission = vec![
        (named("pre"), Item::Presheaf(demo.pre_state.clone())),
        (named("expected-post"), Item::Presheaf(demo.expected_post.clone())),
        (named("rule"), Item::Rule(m.rule)),
        (named("host"), Item::Host(m.host)),
        (named("cube"), Item::Cube(Box::new(done.cube))),
        (named("resources"), Item::Lattice(Arc::new(TransmissionDemo::lattice()))),
    ];

    Ok(vec![
        ("lattices.json", lattices),
        ("categories.json", bundle(categories)),
        ("triangle.json", bundle(triangle_items)),
        ("small-graphs.json", bundle(small)),
        ("fuzzy-sets.json", bundle(sets)),
        ("transmission.json", bundle(transmission)),
    ])
}

/// Files that must be rejected, with the error code each one raises.
pub const INVALID: &[(&str, &str, &str)] = &[
    (
        "m3.json",
        "NotResiduated",
        r#"{
  "$kind": "lattice",
  "elements": ["0", "a", "b", "c", "1"],
  "order": [["0", "a"], ["0", "b"], ["0", "c"], ["a", "1"], ["b", "1"], ["c", "1"]]
}
"#,
    ),
    (
        "n5.json",
        "NotResiduated",
        r#"{
  "$kind": "lattice",
  "elements": ["0", "a", "b", "c", "1"],
  "order": [["0", "a"], ["a", "b"], ["b", "1"], ["0", "c"], ["c", "1"]]
}
"#,
    ),
    (
        "dangling-ref.json",
        "UnresolvedRef",
        r#"{
  "$kind": "presheaf",
  "category": {"$kind": "category", "schema": "graph"},
  "lattice": "lattices.json#c5",
  "carriers": {"V": ["v"], "E": []},
  "actions": {"s": {}, "t": {}},
  "membership": {"V": {"v": "1"}, "E": {}}
}
"#,
    ),
    (
        "not-natural.json",
        "NotNatural",
        r#"{
  "$kind": "morphism",
  "from": "../fixtures/small-graphs.json#edge",
  "to": "../fixtures/small-graphs.json#edge",
  "components": {"V": {"v": "v", "w": "v"}, "E": {"e": "e"}}
}
"#,
    ),
    ("truncated.json", "ParseError", "{\"$kind\": \"lattice\", \"elements\": [\n"),
];

/// Writes the catalogue to `dir` and the rejected files to `invalid_dir`.
pub fn write_all(dir: &Path, invalid_dir: &Path) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(e.to_string());
    std::fs::create_dir_all(dir).map_err(io)?;
    std::fs::create_dir_all(invalid_dir).map_err(io)?;
    for (name, item) in catalogue()? {
        std::fs::write(dir.join(name), item.to_pretty()).map_err(io)?;
    }
    for (name, _, text) in INVALID {
        std::fs::write(invalid_dir.join(name), text).map_err(io)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::Workspace;
    use std::path::PathBuf;

    fn dirs() -> (PathBuf, PathBuf) {
        let root = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
        (root.join("fixtures"), root.join("fixtures-invalid"))
    }

    // Set QUASIKIT_REGEN=1 to rewrite the files after changing the catalogue.
    #[test]
    fn bundled_files_match_the_catalogue() {
        let (dir, invalid) = dirs();
        if std::env::var_os("QUASIKIT_REGEN").is_some() {
            write_all(&dir, &invalid).unwrap();
        }
        for (name, item) in catalogue().unwrap() {
            let on_disk = std::fs::read_to_string(dir.join(name)).unwrap();
            assert_eq!(on_disk, item.to_pretty(), "{name} is stale");
            let mut ws = Workspace::default();
            assert_eq!(ws.load(&dir.join(name)).unwrap(), item, "{name} does not round-trip");
        }
        for (name, _, text) in INVALID {
            assert_eq!(&std::fs::read_to_string(invalid.join(name)).unwrap(), text);
        }
    }

    #[test]
    fn invalid_files_are_rejected_with_their_code() {
        let (_, invalid) = dirs();
        for (name, code, _) in INVALID {
            let err = Workspace::default().load(&invalid.join(name)).unwrap_err();
            assert_eq!(err.code(), *code, "{name}: {err}");
        }
    }

    #[test]
    fn lowered_edge_is_not_regular() {
        let s = lowered_edge();
        assert!(!s.is_regular());
        assert_eq!(small_graphs().len(), 6);
    }
}
