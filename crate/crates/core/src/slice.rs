//! Slices over a fuzzy presheaf `D` and the equivalent category of fuzzy
//! presheaves on the category of elements of `D`.
//!
//! `F` sends an object `p : A → D` of the slice to its fibers, `G` glues
//! fibers back into a tagged union `(d|a)` anchored by the first projection.
//! Labels on the category of elements are the down-sets `L(i)_{≤ δ(d)}`;
//! label values move between the two sides by name.

use std::collections::HashMap;
use std::sync::Arc;

use crate::category::{FiniteCategory, MorId, ObjId, RawCategory};
use crate::error::{Error, Result};
use crate::exponential::exponential;
use crate::homs::{Budget, HomSearch};
use crate::lattice::Label;
use crate::limits;
use crate::presheaf::{Components, Elem, FuzzyMorphism, FuzzyPresheaf, LabelFamily, Presheaf};

/// An object of the slice over `anchor.target()`.
#[derive(Debug, Clone)]
pub struct SliceObject {
    pub total: Arc<FuzzyPresheaf>,
    pub anchor: FuzzyMorphism,
}

impl SliceObject {
    pub fn new(anchor: FuzzyMorphism) -> SliceObject {
        SliceObject { total: anchor.source().clone(), anchor }
    }

    pub fn identity(d: &Arc<FuzzyPresheaf>) -> SliceObject {
        SliceObject::new(FuzzyMorphism::identity(d))
    }

    pub fn over(&self) -> &Arc<FuzzyPresheaf> {
        self.anchor.target()
    }
}

/// The category of elements of `D` with its restricted label family.
#[derive(Debug, Clone)]
pub struct Elements {
    pub over: Arc<FuzzyPresheaf>,
    pub category: Arc<FiniteCategory>,
    pub labels: LabelFamily,
    /// `objects[o] = (i, d)`
    objects: Vec<(ObjId, Elem)>,
    object_at: Vec<Vec<ObjId>>,
    morphism_at: HashMap<(MorId, Elem), MorId>,
}

pub fn category_of_elements(d: &Arc<FuzzyPresheaf>) -> Result<Elements> {
    let base = d.base().clone();
    let obj_name = |i: ObjId, x: Elem| format!("({}|{})", base.object_name(i), d.elem_name(i, x));
    let mor_name = |f: MorId, x: Elem| format!("({}|{})", base.morphism_name(f), d.elem_name(base.dom(f), x));
    let mut raw = RawCategory::default();
    for i in 0..base.object_count() {
        for x in 0..d.size(i) {
            raw.objects.push(obj_name(i, x));
            raw.identities.push((obj_name(i, x), mor_name(base.identity(i), x)));
        }
    }
    for f in 0..base.morphisms().len() {
        let (i, k) = (base.dom(f), base.cod(f));
        for x in 0..d.size(i) {
            raw.morphisms.push((mor_name(f, x), obj_name(i, x), obj_name(k, d.act(f, x))));
        }
    }
    for f in base.non_identities() {
        for g in base.non_identities() {
            let Some(gf) = base.compose(g, f) else { continue };
            for x in 0..d.size(base.dom(f)) {
                raw.compose.push((mor_name(g, d.act(f, x)), mor_name(f, x), mor_name(gf, x)));
            }
        }
    }
    let category = Arc::new(FiniteCategory::validate(&raw)?);
    let mut objects = vec![(0, 0); category.object_count()];
    let mut object_at = Vec::with_capacity(base.object_count());
    for i in 0..base.object_count() {
        let row: Vec<ObjId> = (0..d.size(i)).map(|x| category.object(&obj_name(i, x))).collect::<Result<_>>()?;
        for (x, &o) in row.iter().enumerate() {
            objects[o] = (i, x);
        }
        object_at.push(row);
    }
    let mut morphism_at = HashMap::new();
    for f in 0..base.morphisms().len() {
        for x in 0..d.size(base.dom(f)) {
            morphism_at.insert((f, x), category.morphism(&mor_name(f, x))?);
        }
    }
    let labels = objects.iter().map(|&(i, x)| d.label(i).downset(d.membership(i, x)).map(Arc::new)).collect::<Result<LabelFamily>>()?;
    Ok(Elements { over: d.clone(), category, labels, objects, object_at, morphism_at })
}

impl Elements {
    /// `(i, d)` for an object of the category of elements.
    pub fn point(&self, o: ObjId) -> (ObjId, Elem) {
        self.objects[o]
    }

    pub fn object_at(&self, i: ObjId, d: Elem) -> ObjId {
        self.object_at[i][d]
    }

    fn check_anchor(&self, x: &SliceObject) -> Result<()> {
        if x.over() != &self.over {
            return Err(Error::AnchorMismatch("slice object lives over a different presheaf".into()));
        }
        Ok(())
    }

    fn restrict_label(&self, o: ObjId, l: Label) -> Result<Label> {
        let (i, _) = self.objects[o];
        self.labels[o].element(self.over.label(i).name(l))
    }

    fn extend_label(&self, o: ObjId, l: Label) -> Label {
        let (i, _) = self.objects[o];
        self.over.label(i).element(self.labels[o].name(l)).expect("down-sets keep names")
    }

    /// `F`: the fibers of the anchor.
    pub fn to_elements(&self, x: &SliceObject) -> Result<FuzzyPresheaf> {
        self.check_anchor(x)?;
        let a = &x.total;
        let cat = &self.category;
        let fibers: Vec<Vec<Elem>> =
            self.objects.iter().map(|&(i, d)| (0..a.size(i)).filter(|&e| x.anchor.apply(i, e) == d).collect()).collect();
        let position: Vec<HashMap<Elem, Elem>> = fibers.iter().map(|f| f.iter().enumerate().map(|(k, &e)| (e, k)).collect()).collect();
        let carriers =
            self.objects.iter().zip(&fibers).map(|(&(i, _), f)| f.iter().map(|&e| a.elem_name(i, e).to_string()).collect()).collect();
        let mut actions = vec![Vec::new(); cat.morphisms().len()];
        for (&(f, _), &m) in &self.morphism_at {
            let (src, dst) = (cat.dom(m), cat.cod(m));
            actions[m] = fibers[src].iter().map(|&e| position[dst][&a.act(f, e)]).collect();
        }
        let membership = self
            .objects
            .iter()
            .enumerate()
            .map(|(o, &(i, _))| fibers[o].iter().map(|&e| self.restrict_label(o, a.membership(i, e))).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let shape = Presheaf::new(cat.clone(), carriers, actions)?;
        FuzzyPresheaf::new(shape, self.labels.clone(), membership)
    }

    /// `F` on a slice morphism `h : x → y`, restricted to fibers.
    pub fn to_elements_morphism(
        &self,
        x: &SliceObject,
        y: &SliceObject,
        fx: &Arc<FuzzyPresheaf>,
        fy: &Arc<FuzzyPresheaf>,
        h: &FuzzyMorphism,
    ) -> Result<FuzzyMorphism> {
        let comps = self
            .objects
            .iter()
            .enumerate()
            .map(|(o, &(i, _))| {
                (0..fx.size(o))
                    .map(|k| {
                        let e = x.total.element(i, fx.elem_name(o, k))?;
                        fy.element(o, y.total.elem_name(i, h.apply(i, e)))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        FuzzyMorphism::new(fx.clone(), fy.clone(), comps)
    }

    /// `G`: the tagged union of the fibers, anchored by the tags.
    pub fn to_slice(&self, a: &Arc<FuzzyPresheaf>) -> Result<SliceObject> {
        if a.base() != &self.category {
            return Err(Error::BaseMismatch);
        }
        let d = &self.over;
        let base = d.base().clone();
        let n = base.object_count();
        let mut tagged: Vec<Vec<(Elem, Elem)>> = vec![Vec::new(); n];
        let mut position: Vec<HashMap<(Elem, Elem), Elem>> = vec![HashMap::new(); n];
        for i in 0..n {
            for x in 0..d.size(i) {
                let o = self.object_at[i][x];
                for e in 0..a.size(o) {
                    position[i].insert((x, e), tagged[i].len());
                    tagged[i].push((x, e));
                }
            }
        }
        let carriers = (0..n)
            .map(|i| tagged[i].iter().map(|&(x, e)| format!("({}|{})", d.elem_name(i, x), a.elem_name(self.object_at[i][x], e))).collect())
            .collect();
        let actions = (0..base.morphisms().len())
            .map(|f| {
                let k = base.cod(f);
                tagged[base.dom(f)].iter().map(|&(x, e)| position[k][&(d.act(f, x), a.act(self.morphism_at[&(f, x)], e))]).collect()
            })
            .collect();
        let membership = (0..n)
            .map(|i| {
                tagged[i]
                    .iter()
                    .map(|&(x, e)| {
                        let o = self.object_at[i][x];
                        self.extend_label(o, a.membership(o, e))
                    })
                    .collect()
            })
            .collect();
        let shape = Presheaf::new(base, carriers, actions)?;
        let total = Arc::new(FuzzyPresheaf::new(shape, d.labels().clone(), membership)?);
        let comps = tagged.iter().map(|row| row.iter().map(|&(x, _)| x).collect()).collect();
        Ok(SliceObject::new(FuzzyMorphism::new(total, d.clone(), comps)?))
    }

    /// `σ : GF(x) → x`, forgetting the tag.
    pub fn sigma(&self, gfx: &SliceObject, x: &SliceObject) -> Result<FuzzyMorphism> {
        let base = self.over.base().clone();
        let comps = (0..base.object_count())
            .map(|i| {
                (0..gfx.total.size(i))
                    .map(|k| {
                        let name = gfx.total.elem_name(i, k);
                        let inner = untag(name, self.over.elem_name(i, gfx.anchor.apply(i, k)))?;
                        x.total.element(i, inner)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        FuzzyMorphism::new(gfx.total.clone(), x.total.clone(), comps)
    }

    /// `τ : FG(A) → A`, the second projection.
    pub fn tau(&self, fga: &Arc<FuzzyPresheaf>, a: &Arc<FuzzyPresheaf>) -> Result<FuzzyMorphism> {
        let comps = (0..self.category.object_count())
            .map(|o| {
                let (i, x) = self.objects[o];
                (0..fga.size(o)).map(|k| a.element(o, untag(fga.elem_name(o, k), self.over.elem_name(i, x))?)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        FuzzyMorphism::new(fga.clone(), a.clone(), comps)
    }
}

fn untag<'a>(name: &'a str, tag: &str) -> Result<&'a str> {
    name.strip_prefix('(')
        .and_then(|s| s.strip_prefix(tag))
        .and_then(|s| s.strip_prefix('|'))
        .and_then(|s| s.strip_suffix(')'))
        .ok_or_else(|| Error::Internal(format!("`{name}` is not tagged by `{tag}`")))
}

/// Morphisms `h : x → y` of the slice, i.e. with `y.anchor ∘ h = x.anchor`.
pub fn slice_homs(x: &SliceObject, y: &SliceObject, budget: &Budget) -> Result<Vec<Components>> {
    if x.over() != y.over() {
        return Err(Error::AnchorMismatch("slice objects over different presheaves".into()));
    }
    let mut search = HomSearch::fuzzy(&x.total, &y.total);
    for i in 0..x.total.base().object_count() {
        for e in 0..x.total.size(i) {
            let d = x.anchor.apply(i, e);
            search = search.restrict(i, e, |t| y.anchor.apply(i, t) == d);
        }
    }
    search.collect(budget)
}

/// The product in the slice: the pullback of the two anchors, anchored
/// through the first.
pub fn fiber_product(x: &SliceObject, y: &SliceObject) -> Result<(SliceObject, limits::Cone)> {
    let pb = limits::pullback(&x.anchor, &y.anchor)?;
    let anchor = pb.legs[0].then(&x.anchor)?;
    Ok((SliceObject::new(anchor), pb))
}

/// `q^p` in the slice over `D`, computed as `G(F(q)^F(p))`.
pub fn slice_exponential(el: &Elements, p: &SliceObject, q: &SliceObject, budget: &Budget) -> Result<SliceObject> {
    let fp = Arc::new(el.to_elements(p)?);
    let fq = Arc::new(el.to_elements(q)?);
    let e = exponential(&fp, &fq, budget)?;
    el.to_slice(&e.object)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::HeytingAlgebra;
    use crate::presheaf::uniform_labels;

    fn one_edge() -> Arc<FuzzyPresheaf> {
        let base = Arc::new(FiniteCategory::graph());
        let shape = Presheaf::from_named(
            base.clone(),
            &[("V".into(), vec!["v".into(), "w".into()]), ("E".into(), vec!["e".into()])],
            &[("s".into(), vec![("e".into(), "v".into())]), ("t".into(), vec![("e".into(), "w".into())])],
        )
        .unwrap();
        let labels = uniform_labels(&base, HeytingAlgebra::c3());
        Arc::new(
            FuzzyPresheaf::from_named(
                shape,
                labels,
                &[("V".into(), vec![("v".into(), "1".into()), ("w".into(), "1/2".into())]), ("E".into(), vec![("e".into(), "1/2".into())])],
            )
            .unwrap(),
        )
    }

    #[test]
    fn elements_of_one_edge() {
        let d = one_edge();
        let el = category_of_elements(&d).unwrap();
        assert_eq!(el.category.object_count(), 3);
        assert_eq!(el.category.non_identities().count(), 2);
        let ew = el.category.object("(V|w)").unwrap();
        assert_eq!(el.labels[ew].names(), &["0", "1/2"]);
    }

    #[test]
    fn identity_anchor_has_singleton_fibers_and_round_trips() {
        let d = one_edge();
        let el = category_of_elements(&d).unwrap();
        let x = SliceObject::identity(&d);
        let fx = Arc::new(el.to_elements(&x).unwrap());
        assert!((0..el.category.object_count()).all(|o| fx.size(o) == 1));
        let gfx = el.to_slice(&fx).unwrap();
        let sigma = el.sigma(&gfx, &x).unwrap();
        assert!(sigma.is_isomorphism());
        assert!(sigma.then(&x.anchor).unwrap().same_arrow(&gfx.anchor));
        let fgfx = Arc::new(el.to_elements(&gfx).unwrap());
        assert!(el.tau(&fgfx, &fx).unwrap().is_isomorphism());
    }

    #[test]
    fn empty_presheaf_has_empty_category() {
        let d = one_edge();
        let empty = Arc::new(limits::initial(d.base(), d.labels()));
        let el = category_of_elements(&empty).unwrap();
        assert_eq!(el.category.object_count(), 0);
    }
}
