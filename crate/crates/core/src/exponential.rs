//! Exponential objects `B^A` and the currying bijection.
//!
//! The carrier at `i` is the set of natural transformations `y(i) × A → B`,
//! enumerated by [`HomSearch`]. A drawn morphism `f : i → k` acts by
//! precomposition with `y(f) × A`, and the membership of `m` at `i` is
//! `⋀_a (α(a) ⇒ β(m_i(id_i, a)))`.

use std::collections::HashMap;
use std::sync::Arc;

use crate::category::{MorId, ObjId};
use crate::error::{Error, Result};
use crate::homs::{Budget, HomSearch};
use crate::lattice::Aggregate;
use crate::limits::Cone;
use crate::presheaf::{Components, Elem, FuzzyMorphism, FuzzyPresheaf, Presheaf};

/// `y(i) × A`, with the position of each pair `(ι, a)`.
struct Probe {
    shape: Presheaf,
    position: Vec<HashMap<(MorId, Elem), Elem>>,
    pairs: Vec<Vec<(MorId, Elem)>>,
}

impl Probe {
    fn new(a: &FuzzyPresheaf, i: ObjId) -> Probe {
        let base = a.base();
        let n = base.object_count();
        let mut pairs: Vec<Vec<(MorId, Elem)>> = vec![Vec::new(); n];
        let mut position: Vec<HashMap<(MorId, Elem), Elem>> = vec![HashMap::new(); n];
        for j in 0..n {
            for iota in base.hom(i, j) {
                for x in 0..a.size(j) {
                    position[j].insert((iota, x), pairs[j].len());
                    pairs[j].push((iota, x));
                }
            }
        }
        let carriers =
            (0..n).map(|j| pairs[j].iter().map(|&(m, x)| format!("({}|{})", base.morphism_name(m), a.elem_name(j, x))).collect()).collect();
        let actions = (0..base.morphisms().len())
            .map(|g| {
                let c = base.cod(g);
                pairs[base.dom(g)]
                    .iter()
                    .map(|&(iota, x)| position[c][&(base.compose(g, iota).expect("composable"), a.act(g, x))])
                    .collect()
            })
            .collect();
        let shape = Presheaf::new(base.clone(), carriers, actions).expect("product of functors");
        Probe { shape, position, pairs }
    }
}

/// `B^A` together with the data needed to curry and uncurry.
pub struct Exponential {
    pub object: Arc<FuzzyPresheaf>,
    pub a: Arc<FuzzyPresheaf>,
    pub b: Arc<FuzzyPresheaf>,
    probes: Vec<Probe>,
    /// `transforms[i][k]`: components of the `k`-th element at `i`.
    transforms: Vec<Vec<Components>>,
    lookup: Vec<HashMap<Components, Elem>>,
}

impl std::fmt::Debug for Exponential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.object.fmt(f)
    }
}

fn transform_name(probe: &Probe, b: &FuzzyPresheaf, comps: &Components) -> String {
    let mut parts = Vec::new();
    for (j, row) in comps.iter().enumerate() {
        for (p, &y) in row.iter().enumerate() {
            parts.push(format!("{}>{}", probe.shape.elem_name(j, p), b.elem_name(j, y)));
        }
    }
    format!("[{}]", parts.join(","))
}

pub fn exponential(a: &Arc<FuzzyPresheaf>, b: &Arc<FuzzyPresheaf>, budget: &Budget) -> Result<Exponential> {
    if a.base() != b.base() {
        return Err(Error::BaseMismatch);
    }
    if !a.same_labels(b) {
        return Err(Error::LabelMismatch);
    }
    let base = a.base().clone();
    let n = base.object_count();
    let probes: Vec<Probe> = (0..n).map(|i| Probe::new(a, i)).collect();
    let transforms: Vec<Vec<Components>> =
        probes.iter().map(|p| HomSearch::plain(&p.shape, b.shape()).collect(budget)).collect::<Result<_>>()?;
    let lookup: Vec<HashMap<Components, Elem>> =
        transforms.iter().map(|ts| ts.iter().enumerate().map(|(k, c)| (c.clone(), k)).collect()).collect();
    let carriers = (0..n).map(|i| transforms[i].iter().map(|c| transform_name(&probes[i], b, c)).collect()).collect();
    let mut actions = Vec::with_capacity(base.morphisms().len());
    for f in 0..base.morphisms().len() {
        let (i, k) = (base.dom(f), base.cod(f));
        let mut table = Vec::with_capacity(transforms[i].len());
        for m in &transforms[i] {
            // m'_j(ι, x) = m_j(ι ∘ f, x)
            let moved: Components = (0..n)
                .map(|j| {
                    probes[k].pairs[j]
                        .iter()
                        .map(|&(iota, x)| m[j][probes[i].position[j][&(base.compose(iota, f).expect("composable"), x)]])
                        .collect()
                })
                .collect();
            table.push(lookup[k][&moved]);
        }
        actions.push(table);
    }
    let membership = (0..n)
        .map(|i| {
            let l = a.label(i);
            let id = base.identity(i);
            transforms[i]
                .iter()
                .map(|m| {
                    l.aggregate(
                        Aggregate::Meet,
                        (0..a.size(i)).map(|x| l.imp(a.membership(i, x), b.membership(i, m[i][probes[i].position[i][&(id, x)]]))),
                    )
                })
                .collect()
        })
        .collect();
    let shape = Presheaf::new(base, carriers, actions)?;
    let object = Arc::new(FuzzyPresheaf::new(shape, a.labels().clone(), membership)?);
    Ok(Exponential { object, a: a.clone(), b: b.clone(), probes, transforms, lookup })
}

/// Position of the pair `(c, x)` in a binary product cone.
fn pair_lookup(prod: &Cone) -> Vec<HashMap<(Elem, Elem), Elem>> {
    let (p1, p2) = (&prod.legs[0], &prod.legs[1]);
    (0..prod.apex.base().object_count()).map(|o| (0..prod.apex.size(o)).map(|p| ((p1.apply(o, p), p2.apply(o, p)), p)).collect()).collect()
}

impl Exponential {
    pub fn transform(&self, i: ObjId, k: Elem) -> &Components {
        &self.transforms[i][k]
    }

    fn check_product(&self, prod: &Cone) -> Result<()> {
        if prod.legs.len() != 2 || prod.legs[1].target() != &self.a {
            return Err(Error::ShapeMismatch("expected a product cone C × A".into()));
        }
        Ok(())
    }

    /// `φ(h)_i(c)_j(ι, a) = h_j(C(ι)(c), a)` for `h : C × A → B`.
    pub fn curry(&self, prod: &Cone, h: &FuzzyMorphism) -> Result<FuzzyMorphism> {
        self.check_product(prod)?;
        if h.source() != &prod.apex || h.target() != &self.b {
            return Err(Error::ShapeMismatch("h must go from the product to B".into()));
        }
        let c = prod.legs[0].target();
        let at = pair_lookup(prod);
        let n = c.base().object_count();
        let comps = (0..n)
            .map(|i| {
                (0..c.size(i))
                    .map(|x| {
                        let m: Components = (0..n)
                            .map(|j| self.probes[i].pairs[j].iter().map(|&(iota, a)| h.apply(j, at[j][&(c.act(iota, x), a)])).collect())
                            .collect();
                        self.lookup[i].get(&m).copied().ok_or_else(|| Error::ShapeMismatch("curried map is not natural".into()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        FuzzyMorphism::new(c.clone(), self.object.clone(), comps)
    }

    /// `ψ(k)_i(c, a) = k_i(c)_i(id_i, a)` for `k : C → B^A`.
    pub fn uncurry(&self, prod: &Cone, k: &FuzzyMorphism) -> Result<FuzzyMorphism> {
        self.check_product(prod)?;
        if k.target() != &self.object || k.source() != prod.legs[0].target() {
            return Err(Error::ShapeMismatch("k must go from C to the exponential".into()));
        }
        let (p1, p2) = (&prod.legs[0], &prod.legs[1]);
        let base = prod.apex.base().clone();
        let comps = (0..base.object_count())
            .map(|i| {
                let id = base.identity(i);
                (0..prod.apex.size(i))
                    .map(|p| {
                        let m = &self.transforms[i][k.apply(i, p1.apply(i, p))];
                        m[i][self.probes[i].position[i][&(id, p2.apply(i, p))]]
                    })
                    .collect()
            })
            .collect();
        FuzzyMorphism::new(prod.apex.clone(), self.b.clone(), comps)
    }

    /// Evaluation `B^A × A → B`, the uncurrying of the identity, with the
    /// product cone it is defined on.
    pub fn eval(&self) -> Result<(Cone, FuzzyMorphism)> {
        let prod = crate::limits::product(&self.object, &self.a)?;
        let ev = self.uncurry(&prod, &FuzzyMorphism::identity(&self.object))?;
        Ok((prod, ev))
    }

    /// `g^A : B^A → B'^A`, postcomposition by `g : B → B'`.
    #[doc(hidden)]
    pub fn postcompose(&self, other: &Exponential, g: &FuzzyMorphism) -> Result<FuzzyMorphism> {
        if g.source() != &self.b || g.target() != &other.b || self.a != other.a {
            return Err(Error::ShapeMismatch("postcomposition needs B → B' over the same A".into()));
        }
        let n = self.a.base().object_count();
        let comps = (0..n)
            .map(|i| {
                self.transforms[i]
                    .iter()
                    .map(|m| {
                        let moved: Components = m.iter().enumerate().map(|(j, row)| row.iter().map(|&y| g.apply(j, y)).collect()).collect();
                        other.lookup[i][&moved]
                    })
                    .collect()
            })
            .collect();
        FuzzyMorphism::new(self.object.clone(), other.object.clone(), comps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::FiniteCategory;
    use crate::lattice::HeytingAlgebra;
    use crate::presheaf::uniform_labels;

    fn fuzzy_set(elems: &[(&str, &str)]) -> Arc<FuzzyPresheaf> {
        let base = Arc::new(FiniteCategory::terminal());
        let names = elems.iter().map(|e| e.0.to_string()).collect();
        let shape = Presheaf::new(base.clone(), vec![names], vec![(0..elems.len()).collect()]).unwrap();
        let c3 = HeytingAlgebra::c3();
        let membership = vec![elems.iter().map(|e| c3.element(e.1).unwrap()).collect()];
        Arc::new(FuzzyPresheaf::new(shape, uniform_labels(&base, c3), membership).unwrap())
    }

    #[test]
    fn fuzzy_set_theta() {
        let a = fuzzy_set(&[("a", "1")]);
        let b = fuzzy_set(&[("b", "1/2")]);
        let e = exponential(&a, &b, &Budget::default()).unwrap();
        assert_eq!(e.object.size(0), 1);
        assert_eq!(e.object.membership_name(0, 0), "1/2");
    }

    #[test]
    fn fuzzy_set_exponential_is_all_functions() {
        let a = fuzzy_set(&[("a", "1"), ("b", "0")]);
        let b = fuzzy_set(&[("x", "1/2"), ("y", "1"), ("z", "0")]);
        let e = exponential(&a, &b, &Budget::default()).unwrap();
        assert_eq!(e.object.size(0), 9);
        let l = a.label(0);
        for k in 0..9 {
            let m = e.transform(0, k);
            let want = l.meet(l.imp(a.membership(0, 0), b.membership(0, m[0][0])), l.imp(a.membership(0, 1), b.membership(0, m[0][1])));
            assert_eq!(e.object.membership(0, k), want);
        }
    }

    #[test]
    fn curry_round_trip_and_eval() {
        let c = fuzzy_set(&[("c", "1/2"), ("d", "1")]);
        let a = fuzzy_set(&[("a", "1")]);
        let b = fuzzy_set(&[("x", "1/2"), ("y", "1")]);
        let budget = Budget::default();
        let e = exponential(&a, &b, &budget).unwrap();
        let prod = crate::limits::product(&c, &a).unwrap();
        let homs = HomSearch::fuzzy(&prod.apex, &b).collect(&budget).unwrap();
        let (eprod, ev) = e.eval().unwrap();
        for comps in homs {
            let h = FuzzyMorphism::new(prod.apex.clone(), b.clone(), comps).unwrap();
            let k = e.curry(&prod, &h).unwrap();
            assert!(e.uncurry(&prod, &k).unwrap().same_arrow(&h));
            // eval ∘ (k × id) = h
            for p in 0..prod.apex.size(0) {
                let (x, y) = (prod.legs[0].apply(0, p), prod.legs[1].apply(0, p));
                let q = (0..eprod.apex.size(0))
                    .find(|&q| eprod.legs[0].apply(0, q) == k.apply(0, x) && eprod.legs[1].apply(0, q) == y)
                    .unwrap();
                assert_eq!(ev.apply(0, q), h.apply(0, p));
            }
        }
    }
}
