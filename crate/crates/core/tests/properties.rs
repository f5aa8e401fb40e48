use std::path::Path;
use std::sync::Arc;

use proptest::prelude::*;
use quasikit::category::FiniteCategory;
use quasikit::homs::Budget;
use quasikit::io::{bundle, Item, Workspace};
use quasikit::lattice::HeytingAlgebra;
use quasikit::limits::{self, Diagram};
use quasikit::presheaf::{uniform_labels, FuzzyPresheaf, LabelFamily, Subobject};
use quasikit::{random, topology};

fn graph_labels(l: HeytingAlgebra) -> (Arc<FiniteCategory>, LabelFamily) {
    let base = Arc::new(FiniteCategory::graph());
    let labels = uniform_labels(&base, l);
    (base, labels)
}

fn lattice(pick: usize) -> HeytingAlgebra {
    match pick % 4 {
        0 => HeytingAlgebra::boolean(),
        1 => HeytingAlgebra::c3(),
        2 => HeytingAlgebra::powerset(&["a", "b"]).unwrap(),
        _ => HeytingAlgebra::chain(&["0", "1", "2", "3"]).unwrap(),
    }
}

fn random_graph(seed: u64, pick: usize) -> Arc<FuzzyPresheaf> {
    let (base, labels) = graph_labels(lattice(pick));
    Arc::new(random::fuzzy(&mut random::rng(seed), &base, &labels, 3))
}

fn round_trip(item: Item) -> Item {
    let text = item.to_pretty();
    let again = Workspace::default().parse_str(&text, Path::new("memory.json")).unwrap();
    assert_eq!(again.to_pretty(), text);
    again
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn presheaves_survive_serialization(seed in any::<u64>(), pick in 0usize..4) {
        let a = random_graph(seed, pick);
        let item = Item::Presheaf(a);
        prop_assert!(round_trip(item.clone()) == item);
    }

    #[test]
    fn morphisms_and_subobjects_survive_serialization(seed in any::<u64>(), pick in 0usize..4, regular in any::<bool>()) {
        let target = random_graph(seed, pick);
        let mut rng = random::rng(seed ^ 0x5eed);
        let f = random::morphism_into(&mut rng, &target, 2);
        let s = random::subobject(&mut rng, &target, regular);
        let item = bundle([("f".to_string(), Item::Morphism(f)), ("s".to_string(), Item::Subobject(s))]);
        prop_assert!(round_trip(item.clone()) == item);
    }

    #[test]
    fn products_are_universal(seed in any::<u64>(), pick in 0usize..4) {
        let a = random_graph(seed, pick);
        let b = random_graph(seed.wrapping_add(1), pick);
        let cone = limits::product(&a, &b).unwrap();
        let report = limits::verify_universal(&Diagram::Product(a, b), &cone, &Budget::new(1_000_000)).unwrap();
        prop_assert!(report.holds, "{:?}", report.counterexample);
    }

    #[test]
    fn pushouts_of_monos_are_universal(seed in any::<u64>(), pick in 0usize..4) {
        let b = random_graph(seed, pick);
        let mut rng = random::rng(seed);
        let m = random::subobject(&mut rng, &b, true).inclusion();
        let Some(f) = random::morphism_between(&mut rng, m.source(), &random_graph(seed ^ 7, pick), &Budget::new(100_000)).unwrap() else {
            return Ok(());
        };
        let cocone = limits::pushout(&m, &f).unwrap();
        let report = limits::verify_universal(&Diagram::Pushout(m, f), &cocone, &Budget::new(1_000_000)).unwrap();
        prop_assert!(report.holds, "{:?}", report.counterexample);
    }

    #[test]
    fn double_negation_is_a_closure(seed in any::<u64>(), pick in 0usize..4, regular in any::<bool>()) {
        let a = random_graph(seed, pick);
        let s = random::subobject(&mut random::rng(seed), &a, regular);
        let closed = topology::notnot_closure(&s).unwrap();
        prop_assert!(s.leq(&closed));
        let twice = topology::notnot_closure(&closed).unwrap();
        prop_assert_eq!(twice.members(), closed.members());
        prop_assert!(topology::is_dense(&topology::notnot_closure(&Subobject::full(&a)).unwrap()).unwrap());
    }
}

#[test]
fn every_bundled_lattice_obeys_the_laws() {
    for (name, l) in quasikit::fixtures::lattices() {
        let (checked, failure) = quasikit::suites::heyting_laws(&l);
        assert!(failure.is_none(), "{name}: {failure:?}");
        assert!(checked > 0);
    }
}

#[test]
fn bundled_fixture_directory_loads() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    for (file, _) in quasikit::fixtures::catalogue().unwrap() {
        Workspace::default().load(&dir.join(file)).unwrap();
    }
}
