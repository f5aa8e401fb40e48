//! Topologies on fuzzy presheaves: closure operators on subobjects, the
//! double negation on fuzzy graphs, density and separatedness.

use std::ops::ControlFlow;
use std::sync::Arc;

use rand::Rng;

use crate::category::{FiniteCategory, MorId, ObjId, Schema};
use crate::error::{Error, Result};
use crate::homs::{Budget, HomSearch};
use crate::lattice::Label;
use crate::presheaf::{FuzzyPresheaf, LabelFamily, Presheaf, Subobject};
use crate::random;
use crate::slice::{self, SliceObject};

/// A closure operator on the subobjects of every object.
pub trait Topology: Send + Sync {
    fn name(&self) -> &'static str;
    fn close(&self, sub: &Subobject) -> Result<Subobject>;
}

/// Sends every subobject to the whole object.
pub struct Trivial;

/// Leaves every subobject alone.
pub struct Discrete;

/// Double negation on directed or undirected fuzzy graphs.
pub struct NotNotGraph;

impl Topology for Trivial {
    fn name(&self) -> &'static str {
        "trivial"
    }

    fn close(&self, sub: &Subobject) -> Result<Subobject> {
        Ok(Subobject::full(sub.ambient()))
    }
}

impl Topology for Discrete {
    fn name(&self) -> &'static str {
        "discrete"
    }

    fn close(&self, sub: &Subobject) -> Result<Subobject> {
        Ok(sub.clone())
    }
}

impl Topology for NotNotGraph {
    fn name(&self) -> &'static str {
        "notnot-graph"
    }

    fn close(&self, sub: &Subobject) -> Result<Subobject> {
        notnot_closure(sub)
    }
}

pub fn registry() -> Vec<Box<dyn Topology>> {
    vec![Box::new(Trivial), Box::new(Discrete), Box::new(NotNotGraph)]
}

pub fn lookup(name: &str) -> Option<Box<dyn Topology>> {
    registry().into_iter().find(|t| t.name() == name)
}

struct GraphShape {
    v: ObjId,
    e: ObjId,
    s: MorId,
    t: MorId,
    sym: Option<MorId>,
}

fn graph_shape(base: &FiniteCategory) -> Result<GraphShape> {
    let sym = match base.schema_kind() {
        Some(Schema::Graph) => None,
        Some(Schema::Undirected) => Some(base.morphism("sym")?),
        other => {
            let name = other.map_or_else(|| "custom".to_string(), |s| s.name().to_string());
            return Err(Error::UnsupportedSchema(format!("{name}: expected graph or undirected")));
        }
    };
    Ok(GraphShape { v: base.object("V")?, e: base.object("E")?, s: base.morphism("s")?, t: base.morphism("t")?, sym })
}

fn with_ambient_membership(ambient: &Arc<FuzzyPresheaf>, keep: impl Fn(ObjId, usize) -> bool) -> Result<Subobject> {
    let members = (0..ambient.base().object_count())
        .map(|o| (0..ambient.size(o)).map(|x| keep(o, x).then(|| ambient.membership(o, x))).collect())
        .collect();
    Subobject::new(ambient.clone(), members)
}

/// The largest subgraph totally disconnected from `sub`, with the ambient
/// memberships.
pub fn not_complement(sub: &Subobject) -> Result<Subobject> {
    let a = sub.ambient();
    let g = graph_shape(a.base())?;
    with_ambient_membership(a, |o, x| {
        if o == g.v {
            !sub.contains(o, x)
        } else {
            !sub.contains(o, x) && !sub.contains(g.v, a.act(g.s, x)) && !sub.contains(g.v, a.act(g.t, x))
        }
    })
}

/// The subgraph induced by the vertices of `sub`, with the ambient
/// memberships.
pub fn notnot_closure(sub: &Subobject) -> Result<Subobject> {
    let a = sub.ambient();
    let g = graph_shape(a.base())?;
    with_ambient_membership(a, |o, x| {
        if o == g.v {
            sub.contains(o, x)
        } else {
            sub.contains(g.v, a.act(g.s, x)) && sub.contains(g.v, a.act(g.t, x))
        }
    })
}

pub fn is_dense(sub: &Subobject) -> Result<bool> {
    let g = graph_shape(sub.ambient().base())?;
    let all_vertices = sub.size(g.v) == sub.ambient().size(g.v);
    let closure_full = notnot_closure(sub)?.is_full();
    if all_vertices != closure_full {
        return Err(Error::Internal(format!("density criteria disagree: vertices {all_vertices}, closure {closure_full}")));
    }
    Ok(all_vertices)
}

/// `¬sub` computed as an exponential in the slice over the ambient, with
/// the empty subobject as base. Only feasible on tiny ambients.
pub fn negation_via_exponential(sub: &Subobject, budget: &Budget) -> Result<Subobject> {
    let a = sub.ambient();
    let el = slice::category_of_elements(a)?;
    let p = SliceObject::new(sub.inclusion());
    let q = SliceObject::new(Subobject::empty(a).inclusion());
    let neg = slice::slice_exponential(&el, &p, &q, budget)?;
    Subobject::canonical(&neg.anchor)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeparatedMode {
    /// No two distinct edges share source and target.
    Criterion,
    /// Every map from a dense subobject extends in at most one way, over
    /// test ambients with at most `max_vertices` vertices and `max_edges`
    /// edge slots.
    Definitional { max_vertices: usize, max_edges: usize },
}

impl SeparatedMode {
    pub const DEFAULT_DEFINITIONAL: SeparatedMode = SeparatedMode::Definitional { max_vertices: 3, max_edges: 2 };
}

pub fn is_separated(b: &Arc<FuzzyPresheaf>, mode: SeparatedMode, budget: &Budget) -> Result<bool> {
    let g = graph_shape(b.base())?;
    match mode {
        SeparatedMode::Criterion => {
            let mut ends: Vec<_> = (0..b.size(g.e)).map(|x| (b.act(g.s, x), b.act(g.t, x))).collect();
            ends.sort_unstable();
            Ok(ends.windows(2).all(|w| w[0] != w[1]))
        }
        SeparatedMode::Definitional { max_vertices, max_edges } => {
            for n in 1..=max_vertices {
                for slots in edge_slot_multisets(&g, n, max_edges) {
                    let a = Arc::new(test_ambient(b.base(), b.labels(), &g, n, &slots)?);
                    if has_two_extensions(&a, b, &g, slots.len(), budget)? {
                        return Ok(false);
                    }
                }
            }
            Ok(true)
        }
    }
}

/// An edge slot of a test ambient: endpoints, and for undirected graphs
/// whether a loop is its own reverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Slot {
    from: usize,
    to: usize,
    fixed: bool,
}

fn edge_slots(g: &GraphShape, n: usize) -> Vec<Slot> {
    let mut out = Vec::new();
    for from in 0..n {
        for to in 0..n {
            match g.sym {
                None => out.push(Slot { from, to, fixed: false }),
                Some(_) if from < to => out.push(Slot { from, to, fixed: false }),
                Some(_) if from == to => {
                    out.push(Slot { from, to, fixed: false });
                    out.push(Slot { from, to, fixed: true });
                }
                Some(_) => {}
            }
        }
    }
    out
}

fn edge_slot_multisets(g: &GraphShape, n: usize, max: usize) -> Vec<Vec<Slot>> {
    fn rec(slots: &[Slot], start: usize, left: usize, cur: &mut Vec<Slot>, out: &mut Vec<Vec<Slot>>) {
        out.push(cur.clone());
        if left == 0 {
            return;
        }
        for k in start..slots.len() {
            cur.push(slots[k]);
            rec(slots, k, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(&edge_slots(g, n), 0, max, &mut Vec::new(), &mut out);
    out
}

/// A multigraph with every membership at bottom. Maps out of such an
/// ambient and its subobjects never fail on memberships, so these are the
/// hardest test ambients for separatedness.
fn test_ambient(base: &Arc<FiniteCategory>, labels: &LabelFamily, g: &GraphShape, n: usize, slots: &[Slot]) -> Result<FuzzyPresheaf> {
    let vs: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let mut es = Vec::new();
    let (mut s, mut t, mut sym) = (Vec::new(), Vec::new(), Vec::new());
    for (k, slot) in slots.iter().enumerate() {
        let e = format!("e{k}");
        s.push((e.clone(), vs[slot.from].clone()));
        t.push((e.clone(), vs[slot.to].clone()));
        if g.sym.is_some() {
            if slot.fixed {
                sym.push((e.clone(), e.clone()));
            } else {
                let r = format!("e{k}'");
                s.push((r.clone(), vs[slot.to].clone()));
                t.push((r.clone(), vs[slot.from].clone()));
                sym.push((e.clone(), r.clone()));
                sym.push((r.clone(), e.clone()));
                es.push(e);
                es.push(r);
                continue;
            }
        }
        es.push(e);
    }
    let mut actions = vec![("s".to_string(), s), ("t".to_string(), t)];
    if g.sym.is_some() {
        actions.push(("sym".to_string(), sym));
    }
    let shape = Presheaf::from_named(base.clone(), &[("V".into(), vs), ("E".into(), es)], &actions)?;
    let membership = (0..base.object_count()).map(|o| vec![labels[o].bottom(); shape.size(o)]).collect();
    FuzzyPresheaf::new(shape, labels.clone(), membership)
}

/// Whether some dense subobject of `a` has a map into `b` with two
/// distinct extensions to `a`.
fn has_two_extensions(a: &Arc<FuzzyPresheaf>, b: &Arc<FuzzyPresheaf>, g: &GraphShape, slots: usize, budget: &Budget) -> Result<bool> {
    let slot_of = |x: usize| -> usize {
        let name = a.elem_name(g.e, x);
        name[1..].trim_end_matches('\'').parse().expect("test ambient edge names")
    };
    for keep in 0..1u32 << slots {
        let dense = with_ambient_membership(a, |o, x| o == g.v || keep & (1 << slot_of(x)) != 0)?;
        if !is_dense(&dense)? {
            return Err(Error::Internal("a subobject with every vertex is not dense".into()));
        }
        let incl = dense.inclusion();
        let a0 = incl.source().clone();
        let mut found = false;
        let mut failure = None;
        HomSearch::fuzzy(&a0, b).for_each(budget, |f| {
            let mut ext = HomSearch::fuzzy(a, b);
            for o in 0..a0.base().object_count() {
                for x in 0..a0.size(o) {
                    ext = ext.fix(o, incl.apply(o, x), f[o][x]);
                }
            }
            match ext.count_up_to(2, budget) {
                Ok(c) if c < 2 => ControlFlow::Continue(()),
                Ok(_) => {
                    found = true;
                    ControlFlow::Break(())
                }
                Err(e) => {
                    failure = Some(e);
                    ControlFlow::Break(())
                }
            }
        })?;
        if let Some(e) = failure {
            return Err(e);
        }
        if found {
            return Ok(true);
        }
    }
    Ok(false)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub topology: String,
    pub samples: usize,
}

fn meet(x: &Subobject, y: &Subobject) -> Result<Subobject> {
    let a = x.ambient();
    let members = (0..a.base().object_count())
        .map(|o| {
            (0..a.size(o))
                .map(|e| match (x.membership(o, e), y.membership(o, e)) {
                    (Some(l), Some(m)) => Some(a.label(o).meet(l, m)),
                    _ => None,
                })
                .collect::<Vec<Option<Label>>>()
        })
        .collect();
    Subobject::new(a.clone(), members)
}

/// Checks the five topology axioms on random subobjects of each ambient
/// and random morphisms into it.
pub fn check_topology_axioms(t: &dyn Topology, ambients: &[Arc<FuzzyPresheaf>], per_ambient: usize, seed: u64) -> Result<AxiomReport> {
    let mut rng = random::rng(seed);
    let mut samples = 0;
    for a in ambients {
        for _ in 0..per_ambient {
            let regular = rng.gen_bool(0.5);
            let x = random::subobject(&mut rng, a, regular);
            let regular_y = rng.gen_bool(0.5);
            let y = random::subobject(&mut rng, a, regular_y);
            let m = meet(&x, &y)?;
            let (tm, tx) = (t.close(&m)?, t.close(&x)?);
            let fail = |axiom: &str, s: &Subobject| Error::AxiomViolated(format!("{} ({axiom}) on {:?}", t.name(), s.members()));
            if !tm.leq(&tx) {
                return Err(fail("i", &m));
            }
            if !m.leq(&tm) {
                return Err(fail("ii", &m));
            }
            if t.close(&tm)? != tm {
                return Err(fail("iii", &m));
            }
            let f = random::morphism_into(&mut rng, a, 2);
            if t.close(&m.pullback_along(&f)?)? != tm.pullback_along(&f)? {
                return Err(fail("iv", &m));
            }
            if x.is_regular() && !tx.is_regular() {
                return Err(fail("v", &x));
            }
            samples += 1;
        }
    }
    Ok(AxiomReport { topology: t.name().to_string(), samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::HeytingAlgebra;
    use crate::presheaf::uniform_labels;

    fn graph(schema: Schema, vs: &[&str], es: &[(&str, &str, &str)], sym: &[(&str, &str)]) -> Arc<FuzzyPresheaf> {
        let base = Arc::new(FiniteCategory::schema(schema).unwrap());
        let st = |k: usize| es.iter().map(|e| (e.0.to_string(), [e.1, e.2][k].to_string())).collect::<Vec<_>>();
        let mut actions = vec![("s".to_string(), st(0)), ("t".to_string(), st(1))];
        if !sym.is_empty() {
            actions.push(("sym".to_string(), sym.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()));
        }
        let shape = Presheaf::from_named(
            base.clone(),
            &[("V".into(), vs.iter().map(|v| v.to_string()).collect()), ("E".into(), es.iter().map(|e| e.0.to_string()).collect())],
            &actions,
        )
        .unwrap();
        Arc::new(FuzzyPresheaf::crisp(shape, uniform_labels(&base, HeytingAlgebra::c3())).unwrap())
    }

    fn triangle() -> Arc<FuzzyPresheaf> {
        graph(Schema::Graph, &["u", "v", "w"], &[("a", "u", "v"), ("b", "v", "w"), ("c", "w", "u")], &[])
    }

    #[test]
    fn negation_on_a_path() {
        let p = graph(Schema::Graph, &["v", "w", "x"], &[("a", "v", "w"), ("b", "w", "x")], &[]);
        let sub = Subobject::regular_from_names(p.clone(), &[("V", "v")]).unwrap();
        let neg = not_complement(&sub).unwrap();
        let expect = Subobject::regular_from_names(p.clone(), &[("V", "w"), ("V", "x"), ("E", "b")]).unwrap();
        assert_eq!(neg, expect);
        assert!(not_complement(&Subobject::empty(&p)).unwrap().is_full());
        assert_eq!(not_complement(&Subobject::full(&p)).unwrap(), Subobject::empty(&p));
    }

    #[test]
    fn closure_adds_induced_edges_and_restores_membership() {
        let g = triangle();
        let sub = Subobject::regular_from_names(g.clone(), &[("V", "u"), ("V", "v"), ("V", "w"), ("E", "a"), ("E", "b")]).unwrap();
        assert!(notnot_closure(&sub).unwrap().is_full());
        let half = g.label(0).element("1/2").unwrap();
        let mut members = sub.members().to_vec();
        members[0][0] = Some(half);
        let lowered = Subobject::new(g.clone(), members).unwrap();
        let closed = notnot_closure(&lowered).unwrap();
        assert_eq!(closed.membership(0, 0), Some(g.label(0).top()));
        assert!(closed.is_regular());
        let induced = Subobject::regular_from_names(g.clone(), &[("V", "u"), ("V", "v"), ("E", "a")]).unwrap();
        assert_eq!(notnot_closure(&induced).unwrap(), induced);
    }

    #[test]
    fn density() {
        let g = triangle();
        assert!(is_dense(&Subobject::full(&g)).unwrap());
        let verts = Subobject::regular_from_names(g.clone(), &[("V", "u"), ("V", "v"), ("V", "w")]).unwrap();
        assert!(is_dense(&verts).unwrap());
        let missing = Subobject::regular_from_names(g.clone(), &[("V", "u"), ("V", "v"), ("E", "a")]).unwrap();
        assert!(!is_dense(&missing).unwrap());
    }

    #[test]
    fn negation_matches_the_slice_exponential() {
        let p = graph(Schema::Graph, &["v", "w"], &[("a", "v", "w")], &[]);
        let budget = Budget::default();
        for names in [vec![], vec![("V", "v")], vec![("V", "w")], vec![("V", "v"), ("V", "w")], vec![("V", "v"), ("V", "w"), ("E", "a")]] {
            let sub = Subobject::regular_from_names(p.clone(), &names).unwrap();
            assert_eq!(negation_via_exponential(&sub, &budget).unwrap(), not_complement(&sub).unwrap(), "{names:?}");
        }
    }

    #[test]
    fn parallel_edges_are_not_separated() {
        let budget = Budget::default();
        let par = graph(Schema::Graph, &["v", "w"], &[("a", "v", "w"), ("b", "v", "w")], &[]);
        let simple = graph(Schema::Graph, &["v", "w"], &[("a", "v", "w"), ("b", "w", "v")], &[]);
        for mode in [SeparatedMode::Criterion, SeparatedMode::DEFAULT_DEFINITIONAL] {
            assert!(!is_separated(&par, mode, &budget).unwrap());
            assert!(is_separated(&simple, mode, &budget).unwrap());
        }
    }

    #[test]
    fn undirected_sym_pairs_are_separated() {
        let budget = Budget::default();
        let pair = graph(Schema::Undirected, &["v", "w"], &[("a", "v", "w"), ("a'", "w", "v")], &[("a", "a'"), ("a'", "a")]);
        let double = graph(
            Schema::Undirected,
            &["v", "w"],
            &[("a", "v", "w"), ("a'", "w", "v"), ("b", "v", "w"), ("b'", "w", "v")],
            &[("a", "a'"), ("a'", "a"), ("b", "b'"), ("b'", "b")],
        );
        let loops = graph(Schema::Undirected, &["v"], &[("l", "v", "v"), ("l'", "v", "v")], &[("l", "l'"), ("l'", "l")]);
        for mode in [SeparatedMode::Criterion, SeparatedMode::DEFAULT_DEFINITIONAL] {
            assert!(is_separated(&pair, mode, &budget).unwrap());
            assert!(!is_separated(&double, mode, &budget).unwrap());
            assert!(!is_separated(&loops, mode, &budget).unwrap());
        }
    }

    #[test]
    fn registered_topologies_satisfy_the_axioms() {
        let base = Arc::new(FiniteCategory::graph());
        let labels = uniform_labels(&base, HeytingAlgebra::c3());
        let mut rng = random::rng(5);
        let ambients: Vec<_> = (0..8).map(|_| Arc::new(random::fuzzy(&mut rng, &base, &labels, 3))).collect();
        for t in registry() {
            let r = check_topology_axioms(t.as_ref(), &ambients, 10, 9).unwrap();
            assert_eq!(r.samples, 80);
        }
    }

    #[test]
    fn other_schemas_are_unsupported() {
        let base = Arc::new(FiniteCategory::schema(Schema::Reflexive).unwrap());
        let labels = uniform_labels(&base, HeytingAlgebra::c3());
        let a = Arc::new(random::fuzzy(&mut random::rng(1), &base, &labels, 2));
        assert!(matches!(notnot_closure(&Subobject::full(&a)), Err(Error::UnsupportedSchema(_))));
    }
}
