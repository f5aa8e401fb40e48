//! Finite limits and colimits of fuzzy presheaves, and a brute-force check
//! of their universal properties.
//!
//! Limits carry the meet of the memberships of their components, colimits
//! the join over each equivalence class. Element names are derived
//! canonically: pairs `(a|b)`, injections `inl(a)`/`inr(b)`, classes
//! `{a,b}` with sorted members.

use std::collections::BTreeMap;
use std::ops::ControlFlow;
use std::sync::Arc;

use crate::category::FiniteCategory;
use crate::classifier;
use crate::error::{Error, Result};
use crate::homs::{Budget, HomSearch};
use crate::lattice::Aggregate;
use crate::presheaf::{fuzzy_representable, Components, Elem, FuzzyMorphism, FuzzyPresheaf, LabelFamily, Presheaf};

/// A (co)cone: an apex with one leg per free object of the diagram. For
/// limits the legs leave the apex, for colimits they enter it.
#[derive(Debug, Clone)]
pub struct Cone {
    pub apex: Arc<FuzzyPresheaf>,
    pub legs: Vec<FuzzyMorphism>,
}

pub type Cocone = Cone;

/// The finite diagram shapes supported here.
#[derive(Debug, Clone)]
pub enum Diagram {
    Terminal {
        base: Arc<FiniteCategory>,
        labels: LabelFamily,
    },
    Initial {
        base: Arc<FiniteCategory>,
        labels: LabelFamily,
    },
    Product(Arc<FuzzyPresheaf>, Arc<FuzzyPresheaf>),
    Coproduct(Arc<FuzzyPresheaf>, Arc<FuzzyPresheaf>),
    /// `f : B → D`, `g : C → D`
    Pullback(FuzzyMorphism, FuzzyMorphism),
    /// `f : D → B`, `g : D → C`
    Pushout(FuzzyMorphism, FuzzyMorphism),
    Equalizer(FuzzyMorphism, FuzzyMorphism),
    Coequalizer(FuzzyMorphism, FuzzyMorphism),
}

/// Outcome of [`verify_universal`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UniversalReport {
    pub holds: bool,
    /// Test objects tried.
    pub tests: usize,
    /// Competing (co)cones examined.
    pub competitors: u64,
    pub counterexample: Option<String>,
}

pub fn terminal(base: &Arc<FiniteCategory>, labels: &LabelFamily) -> FuzzyPresheaf {
    let n = base.object_count();
    let shape =
        Presheaf::new(base.clone(), vec![vec!["*".to_string()]; n], vec![vec![0]; base.morphisms().len()]).expect("constant functor");
    FuzzyPresheaf::crisp(shape, labels.clone()).expect("labels per object")
}

pub fn initial(base: &Arc<FiniteCategory>, labels: &LabelFamily) -> FuzzyPresheaf {
    let n = base.object_count();
    let shape = Presheaf::new(base.clone(), vec![Vec::new(); n], vec![Vec::new(); base.morphisms().len()]).expect("empty functor");
    FuzzyPresheaf::crisp(shape, labels.clone()).expect("labels per object")
}

/// The unique morphism into the terminal object `one`.
pub fn to_terminal(a: &Arc<FuzzyPresheaf>, one: &Arc<FuzzyPresheaf>) -> Result<FuzzyMorphism> {
    let comps = (0..a.base().object_count()).map(|o| vec![0; a.size(o)]).collect();
    FuzzyMorphism::new(a.clone(), one.clone(), comps)
}

/// The unique morphism out of the initial object `zero`.
pub fn from_initial(zero: &Arc<FuzzyPresheaf>, a: &Arc<FuzzyPresheaf>) -> Result<FuzzyMorphism> {
    let comps = vec![Vec::new(); a.base().object_count()];
    FuzzyMorphism::new(zero.clone(), a.clone(), comps)
}

fn check_compatible(a: &FuzzyPresheaf, b: &FuzzyPresheaf) -> Result<()> {
    if a.base() != b.base() {
        return Err(Error::BaseMismatch);
    }
    if !a.same_labels(b) {
        return Err(Error::LabelMismatch);
    }
    Ok(())
}

/// Pairs `(x, y)` with `keep(o, x, y)`, meet memberships and projections.
fn pair_object(a: &Arc<FuzzyPresheaf>, b: &Arc<FuzzyPresheaf>, keep: impl Fn(usize, Elem, Elem) -> bool) -> Result<Cone> {
    check_compatible(a, b)?;
    let base = a.base().clone();
    let n = base.object_count();
    let mut pairs: Vec<Vec<(Elem, Elem)>> = vec![Vec::new(); n];
    let mut position: Vec<BTreeMap<(Elem, Elem), Elem>> = vec![BTreeMap::new(); n];
    for o in 0..n {
        for x in 0..a.size(o) {
            for y in 0..b.size(o) {
                if keep(o, x, y) {
                    position[o].insert((x, y), pairs[o].len());
                    pairs[o].push((x, y));
                }
            }
        }
    }
    let carriers =
        (0..n).map(|o| pairs[o].iter().map(|&(x, y)| format!("({}|{})", a.elem_name(o, x), b.elem_name(o, y))).collect()).collect();
    let actions = (0..base.morphisms().len())
        .map(|m| {
            let (d, c) = (base.dom(m), base.cod(m));
            pairs[d]
                .iter()
                .map(|&(x, y)| {
                    position[c]
                        .get(&(a.act(m, x), b.act(m, y)))
                        .copied()
                        .ok_or_else(|| Error::ActionNotWellDefined(format!("pair leaves the limit under {}", base.morphism_name(m))))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let membership =
        (0..n).map(|o| pairs[o].iter().map(|&(x, y)| a.label(o).meet(a.membership(o, x), b.membership(o, y))).collect()).collect();
    let apex = Arc::new(FuzzyPresheaf::new(Presheaf::new(base, carriers, actions)?, a.labels().clone(), membership)?);
    let p1 = pairs.iter().map(|row| row.iter().map(|p| p.0).collect()).collect();
    let p2 = pairs.iter().map(|row| row.iter().map(|p| p.1).collect()).collect();
    let legs = vec![FuzzyMorphism::new(apex.clone(), a.clone(), p1)?, FuzzyMorphism::new(apex.clone(), b.clone(), p2)?];
    Ok(Cone { apex, legs })
}

pub fn product(a: &Arc<FuzzyPresheaf>, b: &Arc<FuzzyPresheaf>) -> Result<Cone> {
    pair_object(a, b, |_, _, _| true)
}

/// Pullback of `f : B → D` and `g : C → D`; legs are the two projections.
pub fn pullback(f: &FuzzyMorphism, g: &FuzzyMorphism) -> Result<Cone> {
    check_compatible(f.target(), g.target())?;
    if f.target() != g.target() {
        return Err(Error::ObjectMismatch);
    }
    pair_object(f.source(), g.source(), |o, x, y| f.apply(o, x) == g.apply(o, y))
}

/// The subset of the common source where `f` and `g` agree, with
/// restricted membership.
pub fn equalizer(f: &FuzzyMorphism, g: &FuzzyMorphism) -> Result<Cone> {
    parallel(f, g)?;
    let a = f.source();
    let members = (0..a.base().object_count())
        .map(|o| (0..a.size(o)).map(|x| (f.apply(o, x) == g.apply(o, x)).then(|| a.membership(o, x))).collect())
        .collect();
    let inc = crate::presheaf::Subobject::new(a.clone(), members)?.inclusion();
    Ok(Cone { apex: inc.source().clone(), legs: vec![inc] })
}

fn parallel(f: &FuzzyMorphism, g: &FuzzyMorphism) -> Result<()> {
    check_compatible(f.source(), g.source())?;
    if f.source() != g.source() || f.target() != g.target() {
        return Err(Error::ObjectMismatch);
    }
    Ok(())
}

pub fn coproduct(a: &Arc<FuzzyPresheaf>, b: &Arc<FuzzyPresheaf>) -> Result<Cocone> {
    check_compatible(a, b)?;
    let base = a.base().clone();
    let n = base.object_count();
    let carriers = (0..n)
        .map(|o| {
            let left = a.carrier(o).iter().map(|x| format!("inl({x})"));
            left.chain(b.carrier(o).iter().map(|y| format!("inr({y})"))).collect()
        })
        .collect();
    let actions = (0..base.morphisms().len())
        .map(|m| {
            let shift = a.size(base.cod(m));
            let left = a.shape().action(m).iter().copied();
            left.chain(b.shape().action(m).iter().map(|&y| y + shift)).collect()
        })
        .collect();
    let membership = (0..n).map(|o| a.memberships()[o].iter().chain(&b.memberships()[o]).copied().collect()).collect();
    let apex = Arc::new(FuzzyPresheaf::new(Presheaf::new(base, carriers, actions)?, a.labels().clone(), membership)?);
    let inl = (0..n).map(|o| (0..a.size(o)).collect()).collect();
    let inr = (0..n).map(|o| (0..b.size(o)).map(|y| y + a.size(o)).collect()).collect();
    let legs = vec![FuzzyMorphism::new(a.clone(), apex.clone(), inl)?, FuzzyMorphism::new(b.clone(), apex.clone(), inr)?];
    Ok(Cone { apex, legs })
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut x = x;
        while self.parent[x] != root {
            x = std::mem::replace(&mut self.parent[x], root);
        }
        root
    }

    fn union(&mut self, x: usize, y: usize) {
        let (rx, ry) = (self.find(x), self.find(y));
        if rx != ry {
            self.parent[rx.max(ry)] = rx.min(ry);
        }
    }
}

/// Quotient of `x` by the equivalence generated by `glue[o]`, with join
/// memberships; returns the quotient map.
fn quotient(x: &Arc<FuzzyPresheaf>, glue: &[Vec<(Elem, Elem)>]) -> Result<FuzzyMorphism> {
    let base = x.base().clone();
    let n = base.object_count();
    let mut class_of: Components = Vec::with_capacity(n);
    let mut carriers = Vec::with_capacity(n);
    let mut membership = Vec::with_capacity(n);
    for o in 0..n {
        let mut uf = UnionFind::new(x.size(o));
        for &(p, q) in &glue[o] {
            uf.union(p, q);
        }
        let mut classes: BTreeMap<String, Vec<Elem>> = BTreeMap::new();
        let mut groups: BTreeMap<usize, Vec<Elem>> = BTreeMap::new();
        for e in 0..x.size(o) {
            groups.entry(uf.find(e)).or_default().push(e);
        }
        for members in groups.into_values() {
            let mut names: Vec<&str> = members.iter().map(|&e| x.elem_name(o, e)).collect();
            names.sort();
            classes.insert(format!("{{{}}}", names.join(",")), members);
        }
        let mut cls = vec![0; x.size(o)];
        let mut names = Vec::new();
        let mut mems = Vec::new();
        for (k, (name, members)) in classes.into_iter().enumerate() {
            for &e in &members {
                cls[e] = k;
            }
            mems.push(x.label(o).aggregate(Aggregate::Join, members.iter().map(|&e| x.membership(o, e))));
            names.push(name);
        }
        class_of.push(cls);
        carriers.push(names);
        membership.push(mems);
    }
    let mut actions = Vec::with_capacity(base.morphisms().len());
    for m in 0..base.morphisms().len() {
        let (d, c) = (base.dom(m), base.cod(m));
        let mut table: Vec<Option<Elem>> = vec![None; carriers[d].len()];
        for e in 0..x.size(d) {
            let image = class_of[c][x.act(m, e)];
            match table[class_of[d][e]].replace(image) {
                Some(prev) if prev != image => {
                    return Err(Error::ActionNotWellDefined(format!("{} on class {}", base.morphism_name(m), carriers[d][class_of[d][e]])))
                }
                _ => {}
            }
        }
        actions.push(table.into_iter().map(|t| t.expect("every class is inhabited")).collect());
    }
    let q = FuzzyPresheaf::new(Presheaf::new(base, carriers, actions)?, x.labels().clone(), membership)?;
    FuzzyMorphism::new(x.clone(), Arc::new(q), class_of)
}

/// Pushout of `f : D → B` and `g : D → C`; legs are the two injections.
pub fn pushout(f: &FuzzyMorphism, g: &FuzzyMorphism) -> Result<Cocone> {
    check_compatible(f.source(), g.source())?;
    if f.source() != g.source() {
        return Err(Error::ObjectMismatch);
    }
    let sum = coproduct(f.target(), g.target())?;
    let d = f.source();
    let glue: Vec<Vec<(Elem, Elem)>> = (0..d.base().object_count())
        .map(|o| (0..d.size(o)).map(|e| (sum.legs[0].apply(o, f.apply(o, e)), sum.legs[1].apply(o, g.apply(o, e)))).collect())
        .collect();
    let q = quotient(&sum.apex, &glue)?;
    let legs = vec![sum.legs[0].then(&q)?, sum.legs[1].then(&q)?];
    Ok(Cone { apex: q.target().clone(), legs })
}

pub fn coequalizer(f: &FuzzyMorphism, g: &FuzzyMorphism) -> Result<Cocone> {
    parallel(f, g)?;
    let a = f.source();
    let glue: Vec<Vec<(Elem, Elem)>> =
        (0..a.base().object_count()).map(|o| (0..a.size(o)).map(|e| (f.apply(o, e), g.apply(o, e))).collect()).collect();
    let q = quotient(f.target(), &glue)?;
    Ok(Cone { apex: q.target().clone(), legs: vec![q] })
}

impl Diagram {
    pub fn is_limit(&self) -> bool {
        matches!(self, Diagram::Terminal { .. } | Diagram::Product(..) | Diagram::Pullback(..) | Diagram::Equalizer(..))
    }

    pub fn name(&self) -> &'static str {
        match self {
            Diagram::Terminal { .. } => "terminal",
            Diagram::Initial { .. } => "initial",
            Diagram::Product(..) => "product",
            Diagram::Coproduct(..) => "coproduct",
            Diagram::Pullback(..) => "pullback",
            Diagram::Pushout(..) => "pushout",
            Diagram::Equalizer(..) => "equalizer",
            Diagram::Coequalizer(..) => "coequalizer",
        }
    }

    /// The construction of this module for the diagram.
    pub fn construct(&self) -> Result<Cone> {
        match self {
            Diagram::Terminal { base, labels } => Ok(Cone { apex: Arc::new(terminal(base, labels)), legs: Vec::new() }),
            Diagram::Initial { base, labels } => Ok(Cone { apex: Arc::new(initial(base, labels)), legs: Vec::new() }),
            Diagram::Product(a, b) => product(a, b),
            Diagram::Coproduct(a, b) => coproduct(a, b),
            Diagram::Pullback(f, g) => pullback(f, g),
            Diagram::Pushout(f, g) => pushout(f, g),
            Diagram::Equalizer(f, g) => equalizer(f, g),
            Diagram::Coequalizer(f, g) => coequalizer(f, g),
        }
    }

    fn base_and_labels(&self) -> (Arc<FiniteCategory>, LabelFamily) {
        let any = match self {
            Diagram::Terminal { base, labels } | Diagram::Initial { base, labels } => return (base.clone(), labels.clone()),
            Diagram::Product(a, _) | Diagram::Coproduct(a, _) => a,
            Diagram::Pullback(f, _) | Diagram::Pushout(f, _) | Diagram::Equalizer(f, _) | Diagram::Coequalizer(f, _) => f.source(),
        };
        (any.base().clone(), any.labels().clone())
    }

    /// The objects the legs go to (limits) or come from (colimits).
    fn free_objects(&self) -> Vec<Arc<FuzzyPresheaf>> {
        match self {
            Diagram::Terminal { .. } | Diagram::Initial { .. } => Vec::new(),
            Diagram::Product(a, b) | Diagram::Coproduct(a, b) => vec![a.clone(), b.clone()],
            Diagram::Pullback(f, g) => vec![f.source().clone(), g.source().clone()],
            Diagram::Pushout(f, g) => vec![f.target().clone(), g.target().clone()],
            Diagram::Equalizer(f, _) => vec![f.source().clone()],
            Diagram::Coequalizer(f, _) => vec![f.target().clone()],
        }
    }

    /// Whether legs (as component tables) close the diagram.
    fn commutes(&self, legs: &[&Components]) -> bool {
        let eq = |x: &Components, y: &Components| x == y;
        let after = |leg: &Components, h: &FuzzyMorphism| -> Components {
            leg.iter().zip(h.components()).map(|(l, hc)| l.iter().map(|&e| hc[e]).collect()).collect()
        };
        let before = |h: &FuzzyMorphism, leg: &Components| -> Components {
            h.components().iter().zip(leg).map(|(hc, l)| hc.iter().map(|&e| l[e]).collect()).collect()
        };
        match self {
            Diagram::Pullback(f, g) => eq(&after(legs[0], f), &after(legs[1], g)),
            Diagram::Equalizer(f, g) => eq(&after(legs[0], f), &after(legs[0], g)),
            Diagram::Pushout(f, g) => eq(&before(f, legs[0]), &before(g, legs[1])),
            Diagram::Coequalizer(f, g) => eq(&before(f, legs[0]), &before(g, legs[0])),
            _ => true,
        }
    }
}

/// Checks that `candidate` is a limit or colimit of `diagram` by brute force.
///
/// Limits are tested against the terminal object, the diagram objects and
/// every fuzzy representable. Every fuzzy presheaf is a colimit of fuzzy
/// representables, so these already detect every failure. Colimits are
/// tested against the terminal object, the diagram objects, the classifying
/// object with every single-point membership variation, the canonical
/// construction and the candidate. For each competing (co)cone the
/// mediators are counted.
pub fn verify_universal(diagram: &Diagram, candidate: &Cone, budget: &Budget) -> Result<UniversalReport> {
    let free = diagram.free_objects();
    if candidate.legs.len() != free.len() {
        return Err(Error::NotCommutative(format!("{} legs for {} objects", candidate.legs.len(), free.len())));
    }
    let limit = diagram.is_limit();
    for (leg, x) in candidate.legs.iter().zip(&free) {
        let (from, to) = if limit { (&candidate.apex, x) } else { (x, &candidate.apex) };
        if leg.source() != from || leg.target() != to {
            return Err(Error::NotCommutative("a leg has the wrong endpoints".into()));
        }
    }
    let comps: Vec<&Components> = candidate.legs.iter().map(|l| l.components()).collect();
    if !diagram.commutes(&comps) {
        return Err(Error::NotCommutative(format!("candidate {}", diagram.name())));
    }

    let (base, labels) = diagram.base_and_labels();
    let canonical = diagram.construct()?;
    let mut tests: Vec<(String, Arc<FuzzyPresheaf>)> = vec![("terminal".into(), Arc::new(terminal(&base, &labels)))];
    for (k, x) in free.iter().enumerate() {
        tests.push((format!("object {k}"), x.clone()));
    }
    if limit {
        for i in 0..base.object_count() {
            for l in 0..labels[i].len() {
                let name = format!("y({})@{}", base.object_name(i), labels[i].name(l));
                tests.push((name, Arc::new(fuzzy_representable(&base, &labels, i, l))));
            }
        }
    } else {
        tests.push(("canonical".into(), canonical.apex.clone()));
        tests.push(("candidate".into(), candidate.apex.clone()));
        let omega = classifier::omega(&base, &labels, budget)?;
        for i in 0..base.object_count() {
            let top = classifier::maximal_sieve(&base, &omega, i);
            for l in 0..labels[i].len() {
                let mut membership = omega.memberships().to_vec();
                membership[i][top] = l;
                let name = format!("Omega[{}]@{}", base.object_name(i), labels[i].name(l));
                tests.push((name, Arc::new(omega.with_membership(membership)?)));
            }
        }
        tests.push(("Omega".into(), Arc::new(omega)));
    }

    let mut competitors = 0;
    for (name, t) in &tests {
        let found = if limit {
            check_limit_against(diagram, candidate, &free, t, budget, &mut competitors)?
        } else {
            check_colimit_against(diagram, candidate, &free, t, budget, &mut competitors)?
        };
        if let Some(why) = found {
            return Ok(UniversalReport { holds: false, tests: tests.len(), competitors, counterexample: Some(format!("{name}: {why}")) });
        }
    }
    Ok(UniversalReport { holds: true, tests: tests.len(), competitors, counterexample: None })
}

/// Decides whether `candidate` is a (co)limit by comparing it with the
/// canonical construction: the mediating morphism between the two must
/// exist, be unique, and be an isomorphism.
pub fn is_universal(diagram: &Diagram, candidate: &Cone, budget: &Budget) -> Result<bool> {
    let comps: Vec<&Components> = candidate.legs.iter().map(|l| l.components()).collect();
    if candidate.legs.len() != diagram.free_objects().len() || !diagram.commutes(&comps) {
        return Err(Error::NotCommutative(format!("candidate {}", diagram.name())));
    }
    let canonical = diagram.construct()?;
    let (from, to) = if diagram.is_limit() { (&candidate.apex, &canonical.apex) } else { (&canonical.apex, &candidate.apex) };
    if from.base() != to.base() || !from.same_labels(to) {
        return Err(Error::LabelMismatch);
    }
    let mut search = HomSearch::plain(from.shape(), to.shape());
    if diagram.is_limit() {
        for o in 0..from.base().object_count() {
            for x in 0..from.size(o) {
                search = search.restrict(o, x, |y| canonical.legs.iter().zip(&candidate.legs).all(|(p, c)| p.apply(o, y) == c.apply(o, x)));
            }
        }
    } else {
        for (q, c) in canonical.legs.iter().zip(&candidate.legs) {
            for o in 0..from.base().object_count() {
                for x in 0..q.source().size(o) {
                    search = search.fix(o, q.apply(o, x), c.apply(o, x));
                }
            }
        }
    }
    let found = search.collect(budget)?;
    if found.len() != 1 {
        return Ok(false);
    }
    let u = match FuzzyMorphism::new(from.clone(), to.clone(), found[0].clone()) {
        Ok(u) => u,
        Err(Error::MembershipDecreases(_)) => return Ok(false),
        Err(e) => return Err(e),
    };
    Ok(u.is_isomorphism())
}

/// Enumerates leg tuples `t_k : from_k → to_k` over the free objects with
/// `diagram.commutes`, calling `visit` on each.
fn competing_legs(
    diagram: &Diagram,
    pairs: &[(&FuzzyPresheaf, &FuzzyPresheaf)],
    budget: &Budget,
    visit: &mut dyn FnMut(&[&Components]) -> Result<ControlFlow<()>>,
) -> Result<()> {
    fn rec(
        k: usize,
        diagram: &Diagram,
        pairs: &[(&FuzzyPresheaf, &FuzzyPresheaf)],
        chosen: &mut Vec<Components>,
        budget: &Budget,
        visit: &mut dyn FnMut(&[&Components]) -> Result<ControlFlow<()>>,
        stop: &mut bool,
    ) -> Result<()> {
        if k == pairs.len() {
            let refs: Vec<&Components> = chosen.iter().collect();
            if diagram.commutes(&refs) && visit(&refs)?.is_break() {
                *stop = true;
            }
            return Ok(());
        }
        let (from, to) = pairs[k];
        let mut err = None;
        HomSearch::fuzzy(from, to).for_each(budget, |c| {
            chosen.push(c.clone());
            let r = rec(k + 1, diagram, pairs, chosen, budget, visit, stop);
            chosen.pop();
            match r {
                Err(e) => {
                    err = Some(e);
                    ControlFlow::Break(())
                }
                Ok(()) if *stop => ControlFlow::Break(()),
                Ok(()) => ControlFlow::Continue(()),
            }
        })?;
        err.map_or(Ok(()), Err)
    }
    let mut stop = false;
    rec(0, diagram, pairs, &mut Vec::new(), budget, visit, &mut stop)
}

fn check_limit_against(
    diagram: &Diagram,
    cone: &Cone,
    free: &[Arc<FuzzyPresheaf>],
    t: &FuzzyPresheaf,
    budget: &Budget,
    competitors: &mut u64,
) -> Result<Option<String>> {
    let pairs: Vec<(&FuzzyPresheaf, &FuzzyPresheaf)> = free.iter().map(|x| (t, x.as_ref())).collect();
    let apex = cone.apex.as_ref();
    let mut failure = None;
    competing_legs(diagram, &pairs, budget, &mut |legs| {
        *competitors += 1;
        let mut search = HomSearch::fuzzy(t, apex);
        for o in 0..t.base().object_count() {
            for x in 0..t.size(o) {
                search = search.restrict(o, x, |y| cone.legs.iter().zip(legs).all(|(p, l)| p.apply(o, y) == l[o][x]));
            }
        }
        let n = search.count_up_to(2, budget)?;
        if n != 1 {
            failure = Some(describe(n, legs));
            return Ok(ControlFlow::Break(()));
        }
        Ok(ControlFlow::Continue(()))
    })?;
    Ok(failure)
}

fn check_colimit_against(
    diagram: &Diagram,
    cocone: &Cocone,
    free: &[Arc<FuzzyPresheaf>],
    z: &FuzzyPresheaf,
    budget: &Budget,
    competitors: &mut u64,
) -> Result<Option<String>> {
    let pairs: Vec<(&FuzzyPresheaf, &FuzzyPresheaf)> = free.iter().map(|x| (x.as_ref(), z)).collect();
    let apex = cocone.apex.as_ref();
    let mut failure = None;
    competing_legs(diagram, &pairs, budget, &mut |legs| {
        *competitors += 1;
        let mut search = HomSearch::fuzzy(apex, z);
        for (q, l) in cocone.legs.iter().zip(legs) {
            for (o, row) in l.iter().enumerate() {
                for (x, &y) in row.iter().enumerate() {
                    search = search.fix(o, q.apply(o, x), y);
                }
            }
        }
        let n = search.count_up_to(2, budget)?;
        if n != 1 {
            failure = Some(describe(n, legs));
            return Ok(ControlFlow::Break(()));
        }
        Ok(ControlFlow::Continue(()))
    })?;
    Ok(failure)
}

fn describe(mediators: u64, legs: &[&Components]) -> String {
    let what = if mediators == 0 { "no mediating morphism" } else { "more than one mediating morphism" };
    format!("{what} for the competitor with legs {legs:?}")
}
