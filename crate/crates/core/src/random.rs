//! Seeded random instances for property checks.
//!
//! Presheaves are drawn as quotients of sums of representables, which works
//! for any base category: the gluing is closed into a congruence so the
//! induced actions are always functorial.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::category::FiniteCategory;
use crate::error::Result;
use crate::homs::{Budget, HomSearch};
use crate::lattice::Label;
use crate::presheaf::{yoneda, Elem, FuzzyMorphism, FuzzyPresheaf, LabelFamily, Presheaf, Subobject};

pub use rand::SeedableRng;

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    parent[x] = r;
    r
}

/// A random presheaf with at most `max` elements per object.
pub fn presheaf(rng: &mut impl Rng, base: &Arc<FiniteCategory>, max: usize) -> Presheaf {
    let n = base.object_count();
    loop {
        // sum of random representables
        let mut carriers: Vec<usize> = vec![0; n];
        let mut actions: Vec<Vec<Elem>> = vec![Vec::new(); base.morphisms().len()];
        for _ in 0..rng.gen_range(0..=max + 1) {
            let y = yoneda(base, rng.gen_range(0..n));
            for (m, table) in actions.iter_mut().enumerate() {
                let shift = carriers[base.cod(m)];
                table.extend(y.action(m).iter().map(|&e| e + shift));
            }
            for (o, c) in carriers.iter_mut().enumerate() {
                *c += y.size(o);
            }
        }
        // random gluing closed under the action
        let mut parent: Vec<Vec<usize>> = carriers.iter().map(|&c| (0..c).collect()).collect();
        for _ in 0..rng.gen_range(0..=2 * max) {
            let o = rng.gen_range(0..n);
            if carriers[o] >= 2 {
                let (x, y) = (rng.gen_range(0..carriers[o]), rng.gen_range(0..carriers[o]));
                let (rx, ry) = (find(&mut parent[o], x), find(&mut parent[o], y));
                parent[o][rx.max(ry)] = rx.min(ry);
            }
        }
        let mut changed = true;
        while changed {
            changed = false;
            for (m, table) in actions.iter().enumerate() {
                let (d, c) = (base.dom(m), base.cod(m));
                let mut image: Vec<Option<usize>> = vec![None; carriers[d]];
                for x in 0..carriers[d] {
                    let rx = find(&mut parent[d], x);
                    let y = find(&mut parent[c], table[x]);
                    match image[rx] {
                        None => image[rx] = Some(y),
                        Some(z) if z != y => {
                            parent[c][y.max(z)] = y.min(z);
                            image[rx] = Some(y.min(z));
                            changed = true;
                        }
                        _ => {}
                    }
                }
            }
        }
        let mut class_index: Vec<Vec<Option<usize>>> = carriers.iter().map(|&c| vec![None; c]).collect();
        let mut sizes = vec![0; n];
        for o in 0..n {
            for x in 0..carriers[o] {
                let r = find(&mut parent[o], x);
                if class_index[o][r].is_none() {
                    class_index[o][r] = Some(sizes[o]);
                    sizes[o] += 1;
                }
            }
        }
        if sizes.iter().any(|&s| s > max) {
            continue;
        }
        let mut cls = |o: usize, x: usize| class_index[o][find(&mut parent[o], x)].expect("indexed");
        let mut tables = Vec::with_capacity(actions.len());
        for (m, table) in actions.iter().enumerate() {
            let (d, c) = (base.dom(m), base.cod(m));
            let mut t = vec![0; sizes[d]];
            for x in 0..carriers[d] {
                t[cls(d, x)] = cls(c, table[x]);
            }
            tables.push(t);
        }
        let names = (0..n)
            .map(|o| {
                let prefix = element_prefix(base.object_name(o));
                (0..sizes[o]).map(|k| format!("{prefix}{k}")).collect()
            })
            .collect();
        return Presheaf::new(base.clone(), names, tables).expect("quotients by congruences are functors");
    }
}

fn element_prefix(object: &str) -> String {
    match object.chars().next() {
        Some(c) if c.is_alphabetic() => c.to_lowercase().collect(),
        _ => "x".into(),
    }
}

pub fn label(rng: &mut impl Rng, labels: &LabelFamily, o: usize) -> Label {
    rng.gen_range(0..labels[o].len())
}

/// Random memberships on a given shape.
pub fn fuzzy_on(rng: &mut impl Rng, shape: Presheaf, labels: &LabelFamily) -> FuzzyPresheaf {
    let membership = (0..shape.base().object_count()).map(|o| (0..shape.size(o)).map(|_| label(rng, labels, o)).collect()).collect();
    FuzzyPresheaf::new(shape, labels.clone(), membership).expect("labels in range")
}

pub fn fuzzy(rng: &mut impl Rng, base: &Arc<FiniteCategory>, labels: &LabelFamily, max: usize) -> FuzzyPresheaf {
    let shape = presheaf(rng, base, max);
    fuzzy_on(rng, shape, labels)
}

/// A random morphism into `target` from a fresh random source whose
/// memberships are drawn below the images.
pub fn morphism_into(rng: &mut impl Rng, target: &Arc<FuzzyPresheaf>, max: usize) -> FuzzyMorphism {
    let base = target.base().clone();
    loop {
        let shape = presheaf(rng, &base, max);
        let Ok(homs) = HomSearch::plain(&shape, target.shape()).collect(&Budget::default()) else { continue };
        let Some(comps) = homs.choose(rng).cloned() else { continue };
        let membership = (0..base.object_count())
            .map(|o| {
                (0..shape.size(o)).map(|x| *target.label(o).below(target.membership(o, comps[o][x])).choose(rng).expect("bottom")).collect()
            })
            .collect();
        let source = FuzzyPresheaf::new(shape, target.labels().clone(), membership).expect("labels in range");
        return FuzzyMorphism::new(Arc::new(source), target.clone(), comps).expect("memberships below images");
    }
}

/// A random morphism `source → target`, if any exists.
pub fn morphism_between(
    rng: &mut impl Rng,
    source: &Arc<FuzzyPresheaf>,
    target: &Arc<FuzzyPresheaf>,
    budget: &Budget,
) -> Result<Option<FuzzyMorphism>> {
    let homs = HomSearch::fuzzy(source, target).collect(budget)?;
    Ok(homs.choose(rng).map(|c| FuzzyMorphism::new(source.clone(), target.clone(), c.clone()).expect("enumerated homs are valid")))
}

/// A random subset closed under the action. Memberships are the ambient
/// ones when `regular`, otherwise drawn below them.
pub fn subobject(rng: &mut impl Rng, ambient: &Arc<FuzzyPresheaf>, regular: bool) -> Subobject {
    let base = ambient.base().clone();
    let n = base.object_count();
    let mut inside: Vec<Vec<bool>> = (0..n).map(|o| (0..ambient.size(o)).map(|_| rng.gen_bool(0.5)).collect()).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for m in base.non_identities() {
            let (d, c) = (base.dom(m), base.cod(m));
            for x in 0..ambient.size(d) {
                let y = ambient.act(m, x);
                if inside[d][x] && !inside[c][y] {
                    inside[c][y] = true;
                    changed = true;
                }
            }
        }
    }
    let members = (0..n)
        .map(|o| {
            (0..ambient.size(o))
                .map(|x| {
                    inside[o][x].then(|| {
                        let top = ambient.membership(o, x);
                        if regular {
                            top
                        } else {
                            *ambient.label(o).below(top).choose(rng).expect("bottom")
                        }
                    })
                })
                .collect()
        })
        .collect();
    Subobject::new(ambient.clone(), members).expect("closed subsets below the ambient")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::Schema;
    use crate::lattice::HeytingAlgebra;
    use crate::presheaf::uniform_labels;

    #[test]
    fn random_presheaves_are_valid_on_every_schema() {
        let mut r = rng(7);
        for schema in [Schema::Graph, Schema::Undirected, Schema::Reflexive, Schema::UndirectedReflexive, Schema::TernaryConnection] {
            let base = Arc::new(FiniteCategory::schema(schema).unwrap());
            let labels = uniform_labels(&base, HeytingAlgebra::c3());
            for _ in 0..20 {
                let a = fuzzy(&mut r, &base, &labels, 3);
                assert!((0..base.object_count()).all(|o| a.size(o) <= 3));
                let f = morphism_into(&mut r, &Arc::new(a), 3);
                assert!(f.source().total_size() <= 3 * base.object_count());
            }
        }
    }

    #[test]
    fn seeds_are_deterministic() {
        let base = Arc::new(FiniteCategory::graph());
        let labels = uniform_labels(&base, HeytingAlgebra::c3());
        let a = fuzzy(&mut rng(3), &base, &labels, 3);
        let b = fuzzy(&mut rng(3), &base, &labels, 3);
        assert_eq!(a, b);
    }
}
