//! Presheaves, fuzzy presheaves, fuzzy morphisms and subobjects.
//!
//! Carriers are lists of opaque element names; an [`Elem`] is a position in
//! such a list. Actions are stored as index tables, one per morphism of the
//! (as-drawn) base category.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::category::{FiniteCategory, MorId, ObjId};
use crate::error::{Error, Result};
use crate::lattice::{HeytingAlgebra, Label};

pub type Elem = usize;

/// Per-object element tables, e.g. the components of a morphism.
pub type Components = Vec<Vec<Elem>>;

/// One label algebra per object of the base category.
pub type LabelFamily = Vec<Arc<HeytingAlgebra>>;

#[derive(Clone, PartialEq, Eq)]
pub struct Presheaf {
    base: Arc<FiniteCategory>,
    carriers: Vec<Vec<String>>,
    actions: Vec<Vec<Elem>>,
    index: Vec<HashMap<String, Elem>>,
}

impl fmt::Debug for Presheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (o, c) in self.carriers.iter().enumerate() {
            m.entry(&self.base.object_name(o), c);
        }
        m.finish()
    }
}

impl Presheaf {
    /// Builds and validates a functor from carriers and action tables
    /// (indexed by morphism, then by element of the domain).
    pub fn new(base: Arc<FiniteCategory>, carriers: Vec<Vec<String>>, actions: Vec<Vec<Elem>>) -> Result<Self> {
        if carriers.len() != base.object_count() {
            return Err(Error::ActionGap("one carrier per object is required".into()));
        }
        let mut index = Vec::with_capacity(carriers.len());
        for c in &carriers {
            let mut map = HashMap::with_capacity(c.len());
            for (i, name) in c.iter().enumerate() {
                if map.insert(name.clone(), i).is_some() {
                    return Err(Error::Duplicate(name.clone()));
                }
            }
            index.push(map);
        }
        if actions.len() != base.morphisms().len() {
            return Err(Error::ActionGap("one action per morphism is required".into()));
        }
        let p = Presheaf { base, carriers, actions, index };
        p.check_functorial()?;
        Ok(p)
    }

    /// Builds a presheaf from named carriers and named action maps.
    /// Actions of identity morphisms may be omitted.
    pub fn from_named(
        base: Arc<FiniteCategory>,
        carriers: &[(String, Vec<String>)],
        actions: &[(String, Vec<(String, String)>)],
    ) -> Result<Self> {
        let mut cs = vec![None; base.object_count()];
        for (o, elems) in carriers {
            let o = base.object(o)?;
            cs[o] = Some(elems.clone());
        }
        let cs: Vec<Vec<String>> = cs
            .into_iter()
            .enumerate()
            .map(|(o, c)| c.ok_or_else(|| Error::ActionGap(format!("no carrier for `{}`", base.object_name(o)))))
            .collect::<Result<_>>()?;
        let lookup = |o: ObjId, name: &str| -> Result<Elem> {
            cs[o].iter().position(|e| e == name).ok_or_else(|| Error::UnknownCarrierElement(format!("{}@{}", name, base.object_name(o))))
        };
        let mut tables: Vec<Option<Vec<Elem>>> = vec![None; base.morphisms().len()];
        for (m, pairs) in actions {
            let m = base.morphism(m)?;
            let (d, c) = (base.dom(m), base.cod(m));
            let mut table = vec![None; cs[d].len()];
            for (x, y) in pairs {
                let xi = lookup(d, x)?;
                let yi = lookup(c, y)?;
                if table[xi].replace(yi).is_some() {
                    return Err(Error::ActionGap(format!("`{}` listed twice for `{}`", x, base.morphism_name(m))));
                }
            }
            let table = table
                .into_iter()
                .enumerate()
                .map(|(i, y)| y.ok_or_else(|| Error::ActionGap(format!("`{}` has no image under `{}`", cs[d][i], base.morphism_name(m)))))
                .collect::<Result<Vec<_>>>()?;
            tables[m] = Some(table);
        }
        let actions = tables
            .into_iter()
            .enumerate()
            .map(|(m, t)| match t {
                Some(t) => Ok(t),
                None if base.is_identity(m) => Ok((0..cs[base.dom(m)].len()).collect()),
                None => Err(Error::ActionGap(format!("no action for `{}`", base.morphism_name(m)))),
            })
            .collect::<Result<Vec<_>>>()?;
        Presheaf::new(base, cs, actions)
    }

    fn check_functorial(&self) -> Result<()> {
        let base = &self.base;
        for m in 0..base.morphisms().len() {
            let (d, c) = (base.dom(m), base.cod(m));
            let table = &self.actions[m];
            if table.len() != self.carriers[d].len() || table.iter().any(|&y| y >= self.carriers[c].len()) {
                return Err(Error::ActionGap(format!("table of `{}` has the wrong shape", base.morphism_name(m))));
            }
            if base.is_identity(m) && table.iter().enumerate().any(|(i, &y)| i != y) {
                return Err(Error::IdentityViolated(base.morphism_name(m).to_string()));
            }
        }
        for g in 0..base.morphisms().len() {
            for f in 0..base.morphisms().len() {
                let Some(gf) = base.compose(g, f) else { continue };
                let ok = (0..self.carriers[base.dom(f)].len()).all(|x| self.actions[gf][x] == self.actions[g][self.actions[f][x]]);
                if !ok {
                    return Err(Error::CompositionViolated(
                        base.morphism_name(gf).to_string(),
                        base.morphism_name(g).to_string(),
                        base.morphism_name(f).to_string(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn base(&self) -> &Arc<FiniteCategory> {
        &self.base
    }

    pub fn carrier(&self, o: ObjId) -> &[String] {
        &self.carriers[o]
    }

    pub fn carriers(&self) -> &[Vec<String>] {
        &self.carriers
    }

    pub fn size(&self, o: ObjId) -> usize {
        self.carriers[o].len()
    }

    pub fn total_size(&self) -> usize {
        self.carriers.iter().map(Vec::len).sum()
    }

    pub fn act(&self, m: MorId, x: Elem) -> Elem {
        self.actions[m][x]
    }

    pub fn action(&self, m: MorId) -> &[Elem] {
        &self.actions[m]
    }

    pub fn element(&self, o: ObjId, name: &str) -> Result<Elem> {
        self.index[o].get(name).copied().ok_or_else(|| Error::UnknownCarrierElement(format!("{}@{}", name, self.base.object_name(o))))
    }

    pub fn elem_name(&self, o: ObjId, x: Elem) -> &str {
        &self.carriers[o][x]
    }

    /// Same structure with every element renamed.
    pub fn renamed(&self, names: Vec<Vec<String>>) -> Result<Presheaf> {
        Presheaf::new(self.base.clone(), names, self.actions.clone())
    }

    /// Components of a natural transformation `self → other` satisfy the
    /// naturality squares.
    pub fn is_natural(&self, other: &Presheaf, comps: &Components) -> std::result::Result<(), String> {
        let base = &self.base;
        for m in base.non_identities() {
            let (d, c) = (base.dom(m), base.cod(m));
            for x in 0..self.size(d) {
                if comps[c][self.act(m, x)] != other.act(m, comps[d][x]) {
                    return Err(format!("{} on `{}`", base.morphism_name(m), self.elem_name(d, x)));
                }
            }
        }
        Ok(())
    }
}

/// The representable presheaf at `i`: carrier at `j` is `Hom(i, j)` of the
/// stored category and a morphism acts by postcomposition.
pub fn yoneda(base: &Arc<FiniteCategory>, i: ObjId) -> Presheaf {
    let n = base.object_count();
    let mut carriers = vec![Vec::new(); n];
    let mut position = HashMap::new();
    for j in 0..n {
        for m in base.hom(i, j) {
            position.insert(m, carriers[j].len());
            carriers[j].push(base.morphism_name(m).to_string());
        }
    }
    let actions = (0..base.morphisms().len())
        .map(|f| base.hom(i, base.dom(f)).into_iter().map(|iota| position[&base.compose(f, iota).expect("composable")]).collect())
        .collect();
    Presheaf::new(base.clone(), carriers, actions).expect("representables are functors")
}

/// `y(i)` with membership `l` at `id_i` and `⊥` everywhere else. Maps out of
/// it pick an element of `i` with membership at least `l`.
pub fn fuzzy_representable(base: &Arc<FiniteCategory>, labels: &LabelFamily, i: ObjId, l: Label) -> FuzzyPresheaf {
    let shape = yoneda(base, i);
    let id = base.morphism_name(base.identity(i)).to_string();
    let membership = (0..base.object_count())
        .map(|o| shape.carrier(o).iter().map(|m| if o == i && *m == id { l } else { labels[o].bottom() }).collect())
        .collect();
    FuzzyPresheaf::new(shape, labels.clone(), membership).expect("memberships within labels")
}

#[derive(Clone, PartialEq, Eq)]
pub struct FuzzyPresheaf {
    shape: Presheaf,
    labels: LabelFamily,
    membership: Vec<Vec<Label>>,
}

impl fmt::Debug for FuzzyPresheaf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = self.base();
        let mut m = f.debug_map();
        for o in 0..base.object_count() {
            let entries: Vec<String> =
                (0..self.size(o)).map(|x| format!("{}@{}", self.elem_name(o, x), self.label(o).name(self.membership(o, x)))).collect();
            m.entry(&base.object_name(o), &entries);
        }
        m.finish()
    }
}

impl FuzzyPresheaf {
    pub fn new(shape: Presheaf, labels: LabelFamily, membership: Vec<Vec<Label>>) -> Result<Self> {
        let n = shape.base.object_count();
        if labels.len() != n || membership.len() != n {
            return Err(Error::MembershipGap("one label algebra and membership map per object".into()));
        }
        for o in 0..n {
            if membership[o].len() != shape.size(o) {
                return Err(Error::MembershipGap(format!("object `{}`", shape.base.object_name(o))));
            }
            if membership[o].iter().any(|&l| l >= labels[o].len()) {
                return Err(Error::UnknownElement(format!("label index at `{}`", shape.base.object_name(o))));
            }
        }
        Ok(FuzzyPresheaf { shape, labels, membership })
    }

    /// Every element at full membership.
    pub fn crisp(shape: Presheaf, labels: LabelFamily) -> Result<Self> {
        let membership = (0..shape.base.object_count()).map(|o| vec![labels[o].top(); shape.size(o)]).collect();
        FuzzyPresheaf::new(shape, labels, membership)
    }

    /// Memberships given by name; every element must be listed.
    pub fn from_named(shape: Presheaf, labels: LabelFamily, membership: &[(String, Vec<(String, String)>)]) -> Result<Self> {
        let base = shape.base.clone();
        if labels.len() != base.object_count() {
            return Err(Error::MembershipGap("one label algebra per object".into()));
        }
        let mut table: Vec<Vec<Option<Label>>> = (0..base.object_count()).map(|o| vec![None; shape.size(o)]).collect();
        for (o, pairs) in membership {
            let o = base.object(o)?;
            for (x, l) in pairs {
                let x = shape.element(o, x)?;
                table[o][x] = Some(labels[o].element(l)?);
            }
        }
        let membership = table
            .into_iter()
            .enumerate()
            .map(|(o, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(x, l)| l.ok_or_else(|| Error::MembershipGap(format!("{}@{}", shape.elem_name(o, x), base.object_name(o)))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        FuzzyPresheaf::new(shape, labels, membership)
    }

    pub fn shape(&self) -> &Presheaf {
        &self.shape
    }

    pub fn base(&self) -> &Arc<FiniteCategory> {
        &self.shape.base
    }

    pub fn labels(&self) -> &LabelFamily {
        &self.labels
    }

    pub fn label(&self, o: ObjId) -> &HeytingAlgebra {
        &self.labels[o]
    }

    pub fn membership(&self, o: ObjId, x: Elem) -> Label {
        self.membership[o][x]
    }

    pub fn memberships(&self) -> &[Vec<Label>] {
        &self.membership
    }

    pub fn size(&self, o: ObjId) -> usize {
        self.shape.size(o)
    }

    pub fn total_size(&self) -> usize {
        self.shape.total_size()
    }

    pub fn carrier(&self, o: ObjId) -> &[String] {
        self.shape.carrier(o)
    }

    pub fn act(&self, m: MorId, x: Elem) -> Elem {
        self.shape.act(m, x)
    }

    pub fn element(&self, o: ObjId, name: &str) -> Result<Elem> {
        self.shape.element(o, name)
    }

    pub fn elem_name(&self, o: ObjId, x: Elem) -> &str {
        self.shape.elem_name(o, x)
    }

    /// Looks up an element by object and element name.
    pub fn named(&self, obj: &str, elem: &str) -> Result<(ObjId, Elem)> {
        let o = self.base().object(obj)?;
        Ok((o, self.element(o, elem)?))
    }

    pub fn membership_name(&self, o: ObjId, x: Elem) -> &str {
        self.labels[o].name(self.membership[o][x])
    }

    pub fn same_labels(&self, other: &FuzzyPresheaf) -> bool {
        same_labels(&self.labels, &other.labels)
    }

    pub fn with_membership(&self, membership: Vec<Vec<Label>>) -> Result<FuzzyPresheaf> {
        FuzzyPresheaf::new(self.shape.clone(), self.labels.clone(), membership)
    }

    pub fn renamed(&self, names: Vec<Vec<String>>) -> Result<FuzzyPresheaf> {
        FuzzyPresheaf::new(self.shape.renamed(names)?, self.labels.clone(), self.membership.clone())
    }

    pub fn is_empty(&self) -> bool {
        self.total_size() == 0
    }
}

pub fn same_labels(a: &LabelFamily, b: &LabelFamily) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| Arc::ptr_eq(x, y) || x == y)
}

/// The same algebra at every object of `base`.
pub fn uniform_labels(base: &FiniteCategory, algebra: HeytingAlgebra) -> LabelFamily {
    let shared = Arc::new(algebra);
    vec![shared; base.object_count()]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MonoKind {
    NotMono,
    Mono,
    RegularMono,
}

/// A natural transformation that never lowers membership.
#[derive(Clone, PartialEq, Eq)]
pub struct FuzzyMorphism {
    source: Arc<FuzzyPresheaf>,
    target: Arc<FuzzyPresheaf>,
    components: Components,
}

impl fmt::Debug for FuzzyMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = self.source.base();
        let mut m = f.debug_map();
        for o in 0..base.object_count() {
            let pairs: Vec<String> = self.components[o]
                .iter()
                .enumerate()
                .map(|(x, &y)| format!("{}->{}", self.source.elem_name(o, x), self.target.elem_name(o, y)))
                .collect();
            m.entry(&base.object_name(o), &pairs);
        }
        m.finish()
    }
}

impl FuzzyMorphism {
    pub fn new(source: Arc<FuzzyPresheaf>, target: Arc<FuzzyPresheaf>, components: Components) -> Result<Self> {
        if source.base() != target.base() {
            return Err(Error::BaseMismatch);
        }
        if !source.same_labels(&target) {
            return Err(Error::LabelMismatch);
        }
        let base = source.base().clone();
        if components.len() != base.object_count() {
            return Err(Error::ComponentGap("one component per object".into()));
        }
        for o in 0..base.object_count() {
            if components[o].len() != source.size(o) || components[o].iter().any(|&y| y >= target.size(o)) {
                return Err(Error::ComponentGap(format!("component at `{}`", base.object_name(o))));
            }
        }
        source.shape().is_natural(target.shape(), &components).map_err(Error::NotNatural)?;
        for o in 0..base.object_count() {
            let l = source.label(o);
            for x in 0..source.size(o) {
                let y = components[o][x];
                if !l.leq(source.membership(o, x), target.membership(o, y)) {
                    return Err(Error::MembershipDecreases(format!(
                        "{}@{}: {} > {}",
                        source.elem_name(o, x),
                        base.object_name(o),
                        source.membership_name(o, x),
                        target.membership_name(o, y)
                    )));
                }
            }
        }
        Ok(FuzzyMorphism { source, target, components })
    }

    /// Components given by element names; every element must be listed.
    pub fn from_named(
        source: Arc<FuzzyPresheaf>,
        target: Arc<FuzzyPresheaf>,
        components: &[(String, Vec<(String, String)>)],
    ) -> Result<Self> {
        let base = source.base().clone();
        let mut table: Vec<Vec<Option<Elem>>> = (0..base.object_count()).map(|o| vec![None; source.size(o)]).collect();
        for (o, pairs) in components {
            let o = base.object(o)?;
            for (x, y) in pairs {
                let xi = source.element(o, x)?;
                let yi = target.element(o, y)?;
                table[o][xi] = Some(yi);
            }
        }
        let comps = table
            .into_iter()
            .enumerate()
            .map(|(o, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(x, y)| y.ok_or_else(|| Error::ComponentGap(format!("{}@{}", source.elem_name(o, x), base.object_name(o)))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        FuzzyMorphism::new(source, target, comps)
    }

    pub fn identity(a: &Arc<FuzzyPresheaf>) -> FuzzyMorphism {
        let comps = (0..a.base().object_count()).map(|o| (0..a.size(o)).collect()).collect();
        FuzzyMorphism { source: a.clone(), target: a.clone(), components: comps }
    }

    /// `g ∘ f`.
    pub fn compose(g: &FuzzyMorphism, f: &FuzzyMorphism) -> Result<FuzzyMorphism> {
        if f.target != g.source {
            return Err(Error::ObjectMismatch);
        }
        let comps = f.components.iter().zip(&g.components).map(|(fo, go)| fo.iter().map(|&x| go[x]).collect()).collect();
        FuzzyMorphism::new(f.source.clone(), g.target.clone(), comps)
    }

    pub fn then(&self, g: &FuzzyMorphism) -> Result<FuzzyMorphism> {
        FuzzyMorphism::compose(g, self)
    }

    pub fn source(&self) -> &Arc<FuzzyPresheaf> {
        &self.source
    }

    pub fn target(&self) -> &Arc<FuzzyPresheaf> {
        &self.target
    }

    pub fn components(&self) -> &Components {
        &self.components
    }

    pub fn apply(&self, o: ObjId, x: Elem) -> Elem {
        self.components[o][x]
    }

    pub fn classify(&self) -> MonoKind {
        let mut regular = true;
        for (o, comp) in self.components.iter().enumerate() {
            let mut seen = vec![false; self.target.size(o)];
            for (x, &y) in comp.iter().enumerate() {
                if std::mem::replace(&mut seen[y], true) {
                    return MonoKind::NotMono;
                }
                if self.source.membership(o, x) != self.target.membership(o, y) {
                    regular = false;
                }
            }
        }
        if regular {
            MonoKind::RegularMono
        } else {
            MonoKind::Mono
        }
    }

    pub fn is_mono(&self) -> bool {
        self.classify() != MonoKind::NotMono
    }

    /// Bijective with equal memberships, i.e. the inverse is also a fuzzy morphism.
    pub fn is_isomorphism(&self) -> bool {
        self.classify() == MonoKind::RegularMono && (0..self.components.len()).all(|o| self.source.size(o) == self.target.size(o))
    }

    pub fn inverse(&self) -> Result<FuzzyMorphism> {
        if !self.is_isomorphism() {
            return Err(Error::NotMono);
        }
        let comps = self
            .components
            .iter()
            .map(|c| {
                let mut inv = vec![0; c.len()];
                for (x, &y) in c.iter().enumerate() {
                    inv[y] = x;
                }
                inv
            })
            .collect();
        FuzzyMorphism::new(self.target.clone(), self.source.clone(), comps)
    }

    /// Same components, reinterpreted between structurally equal objects.
    pub fn retarget(&self, source: Arc<FuzzyPresheaf>, target: Arc<FuzzyPresheaf>) -> Result<FuzzyMorphism> {
        FuzzyMorphism::new(source, target, self.components.clone())
    }

    /// Equal as arrows between the same objects.
    pub fn same_arrow(&self, other: &FuzzyMorphism) -> bool {
        self.components == other.components && self.source == other.source && self.target == other.target
    }
}

/// A subobject in pointwise-subset normal form: `members[o][x]` holds the
/// membership of `x` when it belongs to the subset.
#[derive(Clone, PartialEq, Eq)]
pub struct Subobject {
    ambient: Arc<FuzzyPresheaf>,
    members: Vec<Vec<Option<Label>>>,
}

impl fmt::Debug for Subobject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = self.ambient.base();
        let mut m = f.debug_map();
        for o in 0..base.object_count() {
            let entries: Vec<String> = self.members[o]
                .iter()
                .enumerate()
                .filter_map(|(x, l)| l.map(|l| format!("{}@{}", self.ambient.elem_name(o, x), self.ambient.label(o).name(l))))
                .collect();
            m.entry(&base.object_name(o), &entries);
        }
        m.finish()
    }
}

impl Subobject {
    pub fn new(ambient: Arc<FuzzyPresheaf>, members: Vec<Vec<Option<Label>>>) -> Result<Self> {
        let base = ambient.base().clone();
        if members.len() != base.object_count() || (0..base.object_count()).any(|o| members[o].len() != ambient.size(o)) {
            return Err(Error::ComponentGap("subset table has the wrong shape".into()));
        }
        for m in base.non_identities() {
            let (d, c) = (base.dom(m), base.cod(m));
            for x in 0..ambient.size(d) {
                if members[d][x].is_some() && members[c][ambient.act(m, x)].is_none() {
                    return Err(Error::NotClosed(format!("{} sends `{}` outside", base.morphism_name(m), ambient.elem_name(d, x))));
                }
            }
        }
        for o in 0..base.object_count() {
            for (x, l) in members[o].iter().enumerate() {
                if let Some(l) = *l {
                    if l >= ambient.label(o).len() || !ambient.label(o).leq(l, ambient.membership(o, x)) {
                        return Err(Error::MembershipDecreases(format!(
                            "subobject membership above ambient at {}",
                            ambient.elem_name(o, x)
                        )));
                    }
                }
            }
        }
        Ok(Subobject { ambient, members })
    }

    /// Subset given by element names with ambient memberships (a regular subobject).
    pub fn regular_from_names(ambient: Arc<FuzzyPresheaf>, elems: &[(&str, &str)]) -> Result<Self> {
        let mut members: Vec<Vec<Option<Label>>> = (0..ambient.base().object_count()).map(|o| vec![None; ambient.size(o)]).collect();
        for (obj, e) in elems {
            let (o, x) = ambient.named(obj, e)?;
            members[o][x] = Some(ambient.membership(o, x));
        }
        Subobject::new(ambient, members)
    }

    pub fn full(ambient: &Arc<FuzzyPresheaf>) -> Subobject {
        let members = ambient.memberships().iter().map(|row| row.iter().map(|&l| Some(l)).collect()).collect();
        Subobject { ambient: ambient.clone(), members }
    }

    pub fn empty(ambient: &Arc<FuzzyPresheaf>) -> Subobject {
        let members = (0..ambient.base().object_count()).map(|o| vec![None; ambient.size(o)]).collect();
        Subobject { ambient: ambient.clone(), members }
    }

    /// Image of a mono with memberships transported along it.
    pub fn canonical(m: &FuzzyMorphism) -> Result<Subobject> {
        if !m.is_mono() {
            return Err(Error::NotMono);
        }
        let ambient = m.target().clone();
        let mut members: Vec<Vec<Option<Label>>> = (0..ambient.base().object_count()).map(|o| vec![None; ambient.size(o)]).collect();
        for (o, comp) in m.components().iter().enumerate() {
            for (x, &y) in comp.iter().enumerate() {
                members[o][y] = Some(m.source().membership(o, x));
            }
        }
        Subobject::new(ambient, members)
    }

    pub fn ambient(&self) -> &Arc<FuzzyPresheaf> {
        &self.ambient
    }

    pub fn members(&self) -> &[Vec<Option<Label>>] {
        &self.members
    }

    pub fn contains(&self, o: ObjId, x: Elem) -> bool {
        self.members[o][x].is_some()
    }

    pub fn membership(&self, o: ObjId, x: Elem) -> Option<Label> {
        self.members[o][x]
    }

    pub fn is_regular(&self) -> bool {
        self.members
            .iter()
            .enumerate()
            .all(|(o, row)| row.iter().enumerate().all(|(x, l)| l.is_none_or(|l| l == self.ambient.membership(o, x))))
    }

    pub fn is_full(&self) -> bool {
        self.is_regular() && self.members.iter().all(|row| row.iter().all(Option::is_some))
    }

    pub fn size(&self, o: ObjId) -> usize {
        self.members[o].iter().filter(|l| l.is_some()).count()
    }

    /// `self ≤ other`: contained with pointwise smaller membership.
    pub fn leq(&self, other: &Subobject) -> bool {
        self.ambient == other.ambient
            && self.members.iter().enumerate().all(|(o, row)| {
                row.iter().enumerate().all(|(x, l)| match (l, other.members[o][x]) {
                    (None, _) => true,
                    (Some(_), None) => false,
                    (Some(a), Some(b)) => self.ambient.label(o).leq(*a, b),
                })
            })
    }

    /// The subset restricted to ambient memberships.
    pub fn regularized(&self) -> Subobject {
        let members = self
            .members
            .iter()
            .enumerate()
            .map(|(o, row)| row.iter().enumerate().map(|(x, l)| l.map(|_| self.ambient.membership(o, x))).collect())
            .collect();
        Subobject { ambient: self.ambient.clone(), members }
    }

    /// The domain object, carrying the ambient names of the members.
    pub fn domain(&self) -> FuzzyPresheaf {
        self.domain_with_embedding().0
    }

    fn domain_with_embedding(&self) -> (FuzzyPresheaf, Components) {
        let amb = &self.ambient;
        let base = amb.base().clone();
        let n = base.object_count();
        let mut embed: Components = vec![Vec::new(); n];
        let mut position: Vec<Vec<Option<Elem>>> = (0..n).map(|o| vec![None; amb.size(o)]).collect();
        let mut carriers = vec![Vec::new(); n];
        let mut membership = vec![Vec::new(); n];
        for o in 0..n {
            for x in 0..amb.size(o) {
                if let Some(l) = self.members[o][x] {
                    position[o][x] = Some(carriers[o].len());
                    carriers[o].push(amb.elem_name(o, x).to_string());
                    membership[o].push(l);
                    embed[o].push(x);
                }
            }
        }
        let actions = (0..base.morphisms().len())
            .map(|m| {
                let c = base.cod(m);
                embed[base.dom(m)].iter().map(|&x| position[c][amb.act(m, x)].expect("subobjects are closed")).collect()
            })
            .collect();
        let shape = Presheaf::new(base, carriers, actions).expect("closed subsets are subfunctors");
        let fp = FuzzyPresheaf::new(shape, amb.labels().clone(), membership).expect("membership within labels");
        (fp, embed)
    }

    pub fn inclusion(&self) -> FuzzyMorphism {
        let (dom, embed) = self.domain_with_embedding();
        FuzzyMorphism::new(Arc::new(dom), self.ambient.clone(), embed).expect("inclusions are fuzzy morphisms")
    }

    /// `f*(self)` for `f : B → ambient`: the elements of `B` landing inside,
    /// with membership `β(b) ∧ μ(f(b))`.
    pub fn pullback_along(&self, f: &FuzzyMorphism) -> Result<Subobject> {
        if f.target() != &self.ambient {
            return Err(Error::ObjectMismatch);
        }
        let b = f.source();
        let members = (0..b.base().object_count())
            .map(|o| (0..b.size(o)).map(|x| self.members[o][f.apply(o, x)].map(|l| b.label(o).meet(b.membership(o, x), l))).collect())
            .collect();
        Subobject::new(b.clone(), members)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::Schema;

    pub(crate) fn one_edge(mv: &str, mw: &str) -> Arc<FuzzyPresheaf> {
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
                &[("V".into(), vec![("v".into(), mv.into()), ("w".into(), mw.into())]), ("E".into(), vec![("e".into(), "1/2".into())])],
            )
            .unwrap(),
        )
    }

    #[test]
    fn one_edge_graph_is_valid() {
        let g = one_edge("1", "1");
        assert_eq!(g.total_size(), 3);
    }

    #[test]
    fn identity_action_must_be_identity() {
        let base = Arc::new(FiniteCategory::graph());
        let err = Presheaf::from_named(
            base,
            &[("V".into(), vec!["v".into(), "w".into()]), ("E".into(), vec![])],
            &[("id_V".into(), vec![("v".into(), "w".into()), ("w".into(), "v".into())]), ("s".into(), vec![]), ("t".into(), vec![])],
        );
        assert!(matches!(err, Err(Error::IdentityViolated(_))));
    }

    #[test]
    fn undirected_sym_must_be_involution() {
        let base = Arc::new(FiniteCategory::schema(Schema::Undirected).unwrap());
        let c = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        let pairs = |xs: &[(&str, &str)]| xs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect::<Vec<_>>();
        // sym cycles a -> b -> c -> a: sym∘sym ≠ id
        let err = Presheaf::from_named(
            base,
            &[("V".into(), c(&["v"])), ("E".into(), c(&["a", "b", "c"]))],
            &[
                ("s".into(), pairs(&[("a", "v"), ("b", "v"), ("c", "v")])),
                ("t".into(), pairs(&[("a", "v"), ("b", "v"), ("c", "v")])),
                ("sym".into(), pairs(&[("a", "b"), ("b", "c"), ("c", "a")])),
            ],
        );
        assert!(matches!(err, Err(Error::CompositionViolated(..))));
    }

    #[test]
    fn action_gaps_and_partial_membership_are_rejected() {
        let base = Arc::new(FiniteCategory::graph());
        let err = Presheaf::from_named(
            base.clone(),
            &[("V".into(), vec!["v".into()]), ("E".into(), vec!["e".into()])],
            &[("s".into(), vec![("e".into(), "v".into())])],
        );
        assert!(matches!(err, Err(Error::ActionGap(_))));
        let shape = Presheaf::from_named(
            base.clone(),
            &[("V".into(), vec!["v".into()]), ("E".into(), vec![])],
            &[("s".into(), vec![]), ("t".into(), vec![])],
        )
        .unwrap();
        let partial = FuzzyPresheaf::from_named(shape, uniform_labels(&base, HeytingAlgebra::c3()), &[]);
        assert!(matches!(partial, Err(Error::MembershipGap(_))));
    }

    #[test]
    fn yoneda_on_graph_schema() {
        let base = Arc::new(FiniteCategory::graph());
        let yv = yoneda(&base, base.object("V").unwrap());
        assert_eq!(yv.size(base.object("V").unwrap()), 1);
        assert_eq!(yv.size(base.object("E").unwrap()), 0);
        let ye = yoneda(&base, base.object("E").unwrap());
        let (e, v) = (base.object("E").unwrap(), base.object("V").unwrap());
        assert_eq!(ye.carrier(e), &["id_E"]);
        assert_eq!(ye.carrier(v), &["s", "t"]);
        assert_ne!(ye.act(base.morphism("s").unwrap(), 0), ye.act(base.morphism("t").unwrap(), 0));
    }

    #[test]
    fn yoneda_on_reflexive_schema() {
        let base = Arc::new(FiniteCategory::schema(Schema::Reflexive).unwrap());
        let yv = yoneda(&base, base.object("V").unwrap());
        assert_eq!(yv.carrier(base.object("V").unwrap()), &["id_V"]);
        assert_eq!(yv.carrier(base.object("E").unwrap()), &["refl"]);
        let t = Arc::new(FiniteCategory::terminal());
        assert_eq!(yoneda(&t, 0).total_size(), 1);
    }

    #[test]
    fn morphism_validation() {
        let low = one_edge("1/2", "1");
        let high = one_edge("1", "1");
        let ident = |a: &Arc<FuzzyPresheaf>| -> Components { (0..2).map(|o| (0..a.size(o)).collect()).collect() };
        assert!(FuzzyMorphism::new(low.clone(), high.clone(), ident(&low)).is_ok());
        assert!(matches!(FuzzyMorphism::new(high.clone(), low.clone(), ident(&high)), Err(Error::MembershipDecreases(_))));
        let id = FuzzyMorphism::identity(&low);
        let raise = FuzzyMorphism::new(low.clone(), high.clone(), ident(&low)).unwrap();
        assert!(FuzzyMorphism::compose(&raise, &id).unwrap().same_arrow(&raise));
        assert!(matches!(FuzzyMorphism::compose(&id, &raise), Err(Error::ObjectMismatch)));
    }

    #[test]
    fn mono_classification_and_canonical_subobjects() {
        let g = one_edge("1", "1");
        let (v, _) = g.named("V", "v").unwrap();
        let sub = Subobject::regular_from_names(g.clone(), &[("V", "v"), ("V", "w")]).unwrap();
        let inc = sub.inclusion();
        assert_eq!(inc.classify(), MonoKind::RegularMono);
        assert_eq!(Subobject::canonical(&inc).unwrap(), sub);

        let mut lowered = sub.members().to_vec();
        lowered[v][0] = Some(g.label(v).element("1/2").unwrap());
        let low = Subobject::new(g.clone(), lowered).unwrap();
        assert_eq!(low.inclusion().classify(), MonoKind::Mono);
        assert!(low.leq(&sub) && !sub.leq(&low));

        assert!(matches!(Subobject::regular_from_names(g.clone(), &[("E", "e"), ("V", "v")]), Err(Error::NotClosed(_))));
        assert!(Subobject::canonical(&FuzzyMorphism::identity(&g)).unwrap().is_full());
    }
}
