//! Property suites: seeded and exhaustive checks of every construction,
//! run by `quasikit check`.

use std::collections::{BTreeSet, HashMap};
use std::path::Path;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Value};

use crate::adhesive::{regular_union, rm_adhesivity_probe, ProbeConfig};
use crate::category::{FiniteCategory, Schema};
use crate::classifier::Classifier;
use crate::error::{Error, Result};
use crate::exponential::exponential;
use crate::fixtures;
use crate::homs::{Budget, HomSearch, DEFAULT_MAX_ENUM};
use crate::io::Workspace;
use crate::lattice::HeytingAlgebra;
use crate::limits::{self, Cone, Diagram};
use crate::presheaf::{
    fuzzy_representable, uniform_labels, Components, FuzzyMorphism, FuzzyPresheaf, LabelFamily, MonoKind, Presheaf, Subobject,
};
use crate::random::{self, Rng64};
use crate::rewrite::{transmit, TransmissionDemo};
use crate::slice::{category_of_elements, slice_homs, SliceObject};
use crate::topology::{self, SeparatedMode};

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Cap on candidates explored by any single enumeration.
    pub max_enum: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 0, max_enum: DEFAULT_MAX_ENUM }
    }
}

impl SuiteConfig {
    fn budget(&self) -> Budget {
        Budget::new(self.max_enum)
    }

    fn rng(&self, stream: u64) -> Rng64 {
        random::rng(self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(stream))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyResult {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    /// Instances examined.
    pub checked: u64,
    /// Counts, or the first counterexamples on failure.
    pub detail: String,
    /// The property asserts that something is rejected.
    pub expected_negative: bool,
}

impl PropertyResult {
    pub fn line(&self) -> String {
        let verdict = match (self.passed, self.expected_negative) {
            (true, false) => "pass",
            (true, true) => "pass (expected negative)",
            (false, _) => "FAIL",
        };
        format!("{:<11} {:<44} {:<24} checked {:>6}  {}", self.suite, self.name, verdict, self.checked, self.detail)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite,
            "property": self.name,
            "passed": self.passed,
            "checked": self.checked,
            "detail": self.detail,
            "expected_negative": self.expected_negative,
        })
    }
}

pub trait Suite: Send + Sync {
    fn name(&self) -> &'static str;
    fn run(&self, cfg: &SuiteConfig) -> Result<Vec<PropertyResult>>;
}

pub fn registry() -> Vec<Box<dyn Suite>> {
    vec![
        Box::new(Heyting),
        Box::new(Limits),
        Box::new(ClassifierSuite),
        Box::new(Adjunction),
        Box::new(Slice),
        Box::new(Adhesive),
        Box::new(Topology),
        Box::new(Rewrite),
    ]
}

pub fn lookup(name: &str) -> Option<Box<dyn Suite>> {
    registry().into_iter().find(|s| s.name() == name)
}

/// Runs one suite, or every suite in parallel for `"all"`, reporting in
/// registry order.
pub fn run(name: &str, cfg: &SuiteConfig) -> Result<Vec<PropertyResult>> {
    if name != "all" {
        let suite = lookup(name).ok_or_else(|| Error::UnsupportedKind(name.to_string()))?;
        return suite.run(cfg);
    }
    let suites = registry();
    let outcomes: Vec<Result<Vec<PropertyResult>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = suites.iter().map(|s| scope.spawn(move || s.run(cfg))).collect();
        handles.into_iter().map(|h| h.join().unwrap_or_else(|_| Err(Error::Internal("suite panicked".into())))).collect()
    });
    let mut out = Vec::new();
    for o in outcomes {
        out.extend(o?);
    }
    Ok(out)
}

/// Accumulates one property's verdicts.
struct Prop {
    suite: &'static str,
    name: &'static str,
    checked: u64,
    failed: u64,
    examples: Vec<String>,
    note: String,
    negative: bool,
}

impl Prop {
    fn new(suite: &'static str, name: &'static str) -> Prop {
        Prop { suite, name, checked: 0, failed: 0, examples: Vec::new(), note: String::new(), negative: false }
    }

    fn negative(mut self) -> Prop {
        self.negative = true;
        self
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failed += 1;
            if self.examples.len() < 3 {
                self.examples.push(what());
            }
        }
    }

    /// A failure not tied to one counted instance.
    fn fail(&mut self, what: String) {
        self.failed += 1;
        if self.examples.len() < 3 {
            self.examples.push(what);
        }
    }

    fn note(&mut self, note: impl Into<String>) {
        self.note = note.into();
    }

    fn done(self) -> PropertyResult {
        let detail = if self.failed == 0 { self.note } else { format!("{} failures; {}", self.failed, self.examples.join("; ")) };
        PropertyResult {
            suite: self.suite.to_string(),
            name: self.name.to_string(),
            passed: self.failed == 0 && self.checked > 0,
            checked: self.checked,
            detail,
            expected_negative: self.negative,
        }
    }
}

fn graph_setup() -> (Arc<FiniteCategory>, LabelFamily) {
    let base = Arc::new(FiniteCategory::graph());
    let labels = uniform_labels(&base, HeytingAlgebra::c3());
    (base, labels)
}

/// Elements of each object, as `(object, element)` pairs.
fn elements(a: &FuzzyPresheaf) -> Vec<(usize, usize)> {
    (0..a.base().object_count()).flat_map(|o| (0..a.size(o)).map(move |x| (o, x))).collect()
}

/// Every subset closed under the action, at ambient memberships.
fn regular_subobjects(a: &Arc<FuzzyPresheaf>) -> Result<Vec<Subobject>> {
    let elems = elements(a);
    let base = a.base().clone();
    let mut out = Vec::new();
    for mask in 0u64..1 << elems.len() {
        let inside = |o: usize, x: usize| elems.iter().position(|&p| p == (o, x)).is_some_and(|k| mask & (1 << k) != 0);
        let closed =
            base.non_identities().all(|m| (0..a.size(base.dom(m))).all(|x| !inside(base.dom(m), x) || inside(base.cod(m), a.act(m, x))));
        if closed {
            let members =
                (0..base.object_count()).map(|o| (0..a.size(o)).map(|x| inside(o, x).then(|| a.membership(o, x))).collect()).collect();
            out.push(Subobject::new(a.clone(), members)?);
        }
    }
    Ok(out)
}

struct Heyting;

/// Residuation and modus ponens over all triples, plus meet and join as
/// greatest lower and least upper bounds. Returns the number of checks and
/// the first violation.
pub fn heyting_laws(l: &HeytingAlgebra) -> (u64, Option<String>) {
    let n = l.len();
    let mut checks = 0;
    for a in 0..n {
        for b in 0..n {
            let (m, j) = (l.meet(a, b), l.join(a, b));
            checks += 1;
            if !(l.leq(m, a) && l.leq(m, b) && l.leq(a, j) && l.leq(b, j)) {
                return (checks, Some(format!("bounds of {} and {}", l.name(a), l.name(b))));
            }
            checks += 1;
            if l.meet(a, l.imp(a, b)) != m {
                return (checks, Some(format!("modus ponens at {} and {}", l.name(a), l.name(b))));
            }
            for c in 0..n {
                checks += 1;
                if l.leq(c, a) && l.leq(c, b) && !l.leq(c, m) || l.leq(a, c) && l.leq(b, c) && !l.leq(j, c) {
                    return (checks, Some(format!("{} is not extremal", l.name(c))));
                }
                if l.leq(l.meet(a, b), c) != l.leq(a, l.imp(b, c)) {
                    return (checks, Some(format!("residuation at {}, {}, {}", l.name(a), l.name(b), l.name(c))));
                }
            }
        }
    }
    (checks, None)
}

impl Suite for Heyting {
    fn name(&self) -> &'static str {
        "heyting"
    }

    fn run(&self, _cfg: &SuiteConfig) -> Result<Vec<PropertyResult>> {
        let mut laws = Prop::new("heyting", "residuation and modus ponens");
        let mut names = Vec::new();
        for (name, l) in fixtures::lattices() {
            let (n, bad) = heyting_laws(&l);
            laws.checked += n - 1;
            laws.check(bad.is_none(), || format!("{name}: {}", bad.clone().unwrap_or_default()));
            names.push(name);
        }
        laws.note(format!("lattices {}", names.join(", ")));

        let mut rejected = Prop::new("heyting", "M3 and N5 are not residuated").negative();
        for (file, code, text) in fixtures::INVALID.iter().filter(|f| f.0 == "m3.json" || f.0 == "n5.json") {
            let got = Workspace::default().parse_str(text, Path::new(file));
            rejected.check(matches!(&got, Err(e) if e.code() == *code), || format!("{file}: {got:?}"));
        }
        rejected.note("both rejected with NotResiduated");
        Ok(vec![laws.done(), rejected.done()])
    }
}

struct Limits;

const LIMIT_SAMPLES: usize = 100;

fn parallel_pair(
    rng: &mut Rng64,
    labels: &LabelFamily,
    base: &Arc<FiniteCategory>,
    budget: &Budget,
) -> Result<(FuzzyMorphism, FuzzyMorphism)> {
    let b = Arc::new(random::fuzzy(rng, base, labels, 3));
    let a = random::morphism_into(rng, &b, 3).source().clone();
    let homs = HomSearch::fuzzy(&a, &b).collect(budget)?;
    let pick = |rng: &mut Rng64| FuzzyMorphism::new(a.clone(), b.clone(), homs.choose(rng).expect("one map exists").clone());
    Ok((pick(rng)?, pick(rng)?))
}

fn cospan_or_span(
    rng: &mut Rng64,
    labels: &LabelFamily,
    base: &Arc<FiniteCategory>,
    budget: &Budget,
    span: bool,
) -> Result<(FuzzyMorphism, FuzzyMorphism)> {
    let d = Arc::new(random::fuzzy(rng, base, labels, 3));
    let f = random::morphism_into(rng, &d, 3);
    if !span {
        return Ok((f, random::morphism_into(rng, &d, 3)));
    }
    // f : S → D, then g : S → C for some C admitting a map
    let s = f.source().clone();
    loop {
        let c = Arc::new(random::fuzzy(rng, base, labels, 3));
        if let Some(g) = random::morphism_between(rng, &s, &c, budget)? {
            return Ok((f, g));
        }
    }
}

/// `x`'s membership under each leg, met (limits) or the join over
/// preimages (colimits), compared with the apex membership.
fn membership_formula(diagram: &Diagram, cone: &Cone) -> bool {
    let apex = &cone.apex;
    let base = apex.base();
    for o in 0..base.object_count() {
        let l = apex.label(o);
        for x in 0..apex.size(o) {
            let expect = if diagram.is_limit() {
                cone.legs.iter().fold(l.top(), |acc, leg| l.meet(acc, leg.target().membership(o, leg.apply(o, x))))
            } else {
                cone.legs
                    .iter()
                    .flat_map(|leg| {
                        (0..leg.source().size(o)).filter(move |&e| leg.apply(o, e) == x).map(move |e| leg.source().membership(o, e))
                    })
                    .fold(l.bottom(), |acc, m| l.join(acc, m))
            };
            if apex.membership(o, x) != expect {
                return false;
            }
        }
    }
    true
}

impl Suite for Limits {
    fn name(&self) -> &'static str {
        "limits"
    }

    fn run(&self, cfg: &SuiteConfig) -> Result<Vec<PropertyResult>> {
        let (base, labels) = graph_setup();
        let mut out = Vec::new();
        for (k, kind) in
            ["terminal", "initial", "product", "coproduct", "pullback", "pushout", "equalizer", "coequalizer"].into_iter().enumerate()
        {
            let mut rng = cfg.rng(100 + k as u64);
            let mut universal = Prop::new("limits", kind);
            let mut competitors = 0;
            for _ in 0..LIMIT_SAMPLES {
                let budget = cfg.budget();
                let diagram = match kind {
                    "terminal" | "initial" => {
                        // the diagram is empty, so the random object is the one
                        // the unique map is counted against
                        let a = Arc::new(random::fuzzy(&mut rng, &base, &labels, 3));
                        let (one, zero) = (Arc::new(limits::terminal(&base, &labels)), Arc::new(limits::initial(&base, &labels)));
                        let count = if kind == "terminal" {
                            HomSearch::fuzzy(&a, &one).count(&budget)?
                        } else {
                            HomSearch::fuzzy(&zero, &a).count(&budget)?
                        };
                        universal.check(count == 1, || format!("{count} maps with {:?}", a.shape().carriers()));
                        if kind == "terminal" {
                            Diagram::Terminal { base: base.clone(), labels: labels.clone() }
                        } else {
                            Diagram::Initial { base: base.clone(), labels: labels.clone() }
                        }
                    }
                    "product" | "coproduct" => {
                        let a = Arc::new(random::fuzzy(&mut rng, &base, &labels, 3));
                        let b = Arc::new(random::fuzzy(&mut rng, &base, &labels, 3));
                        if kind == "product" {
                            Diagram::Product(a, b)
                        } else {
                            Diagram::Coproduct(a, b)
                        }
                    }
                    "pullback" => {
                        let (f, g) = cospan_or_span(&mut rng, &labels, &base, &budget, false)?;
                        Diagram::Pullback(f, g)
                    }
                    "pushout" => {
                        let (f, g) = cospan_or_span(&mut rng, &labels, &base, &budget, true)?;
                        Diagram::Pushout(f, g)
                    }
                    "equalizer" => {
                        let (f, g) = parallel_pair(&mut rng, &labels, &base, &budget)?;
                        Diagram::Equalizer(f, g)
                    }
                    _ => {
                        let (f, g) = parallel_pair(&mut rng, &labels, &base, &budget)?;
                        Diagram::Coequalizer(f, g)
                    }
                };
                let cone = diagram.construct()?;
                let report = limits::verify_universal(&diagram, &cone, &budget)?;
                competitors += report.competitors;
                universal.check(report.holds, || report.counterexample.clone().unwrap_or_default());
                let formula = match kind {
                    "terminal" => cone.apex.memberships().iter().enumerate().all(|(o, ms)| ms.iter().all(|&m| m == labels[o].top())),
                    "initial" => cone.apex.total_size() == 0,
                    _ => membership_formula(&diagram, &cone),
                };
                universal.check(formula, || format!("membership formula fails on {:?}", cone.apex.shape().carriers()));
            }
            universal.note(format!("{LIMIT_SAMPLES} diagrams, {competitors} competing cones"));
            out.push(universal.done());
        }
        Ok(out)
    }
}

struct ClassifierSuite;

/// The picture of `Ω` over graphs: a loop at `0`, edges both ways between
/// `0` and `1`, and two loops at `1`.
fn omega_picture() -> Result<FuzzyPresheaf> {
    fixtures::graph(
        &HeytingAlgebra::c3(),
        &[("0", "1"), ("1", "1")],
        &[("l0", "0", "0", "1"), ("t", "0", "1", "1"), ("s", "1", "0", "1"), ("l1", "1", "1", "1"), ("l2", "1", "1", "1")],
    )
}

/// Shape isomorphisms between two presheaves.
fn shape_isos(a: &Presheaf, b: &Presheaf, budget: &Budget) -> Result<Vec<Components>> {
    if a.carriers().iter().map(Vec::len).ne(b.carriers().iter().map(Vec::len)) {
        return Ok(Vec::new());
    }
    let all = HomSearch::plain(a, b).collect(budget)?;
    Ok(all.into_iter().filter(|c| c.iter().all(|row| row.iter().collect::<BTreeSet<_>>().len() == row.len())).collect())
}

impl Suite for ClassifierSuite {
    fn name(&self) -> &'static str {
        "classifier"
    }

    fn run(&self, cfg: &SuiteConfig) -> Result<Vec<PropertyResult>> {
        let budget = cfg.budget();
        let (base, labels) = graph_setup();
        let cls = Classifier::new(&base, &labels, &budget)?;
        let (v, e) = (base.object("V")?, base.object("E")?);

        let mut picture = Prop::new("classifier", "omega matches the picture");
        picture.check(cls.omega.size(v) == 2 && cls.omega.size(e) == 5, || format!("sizes {:?}", cls.omega.shape().carriers()));
        let pic = omega_picture()?;
        let isos = shape_isos(pic.shape(), cls.omega.shape(), &budget)?;
        picture.check(!isos.is_empty(), || "no isomorphism with the picture".into());
        if let Some(iso) = isos.first() {
            let name = |o: usize, x: &str| -> Result<&str> { Ok(cls.omega.elem_name(o, iso[o][pic.element(o, x)?])) };
            let wiring = [(v, "0", "{}"), (v, "1", "{id_V}"), (e, "l0", "{}"), (e, "t", "{t}"), (e, "s", "{s}")];
            for (o, x, expect) in wiring {
                let got = name(o, x)?;
                picture.check(got == expect, || format!("{x} goes to {got}, not {expect}"));
            }
        }
        picture.note(format!("2 vertices, 5 edges, {} isomorphisms", isos.len()));

        let mut example = Prop::new("classifier", "chi on the triangle subgraph");
        example.note("edges go to {s,t}, {s} and {t} by their endpoints");
        let tri = fixtures::triangle();
        let sub = Subobject::regular_from_names(tri.clone(), &[("V", "u"), ("V", "v")])?;
        let chi = cls.chi(&sub)?;
        for (o, x, expect) in [(v, "u", "{id_V}"), (v, "w", "{}"), (e, "a", "{s,t}"), (e, "b", "{s}"), (e, "c", "{t}")] {
            let got = cls.omega.elem_name(o, chi.apply(o, tri.element(o, x)?)).to_string();
            example.check(got == expect, || format!("{x} goes to {got}, not {expect}"));
        }

        let mut unique = Prop::new("classifier", "chi classifies uniquely");
        let (mut subs, mut maps) = (0, 0);
        for (name, b) in fixtures::small_graphs() {
            for sub in regular_subobjects(&b)? {
                let chi = cls.chi(&sub)?;
                unique.check(cls.pullback_true(&chi)? == sub, || format!("{name}: pullback differs"));
                let (matching, total) = cls.classifying_maps(&sub, &cfg.budget())?;
                unique.check(matching == 1, || format!("{name}: {matching} classifying maps"));
                subs += 1;
                maps += total;
            }
        }
        unique.note(format!("{subs} regular subobjects, {maps} maps into omega enumerated"));

        let mut lowered = Prop::new("classifier", "lowered mono fails the square").negative();
        let low = fixtures::lowered_edge();
        lowered.check(!cls.square_is_pullback(&low.inclusion(), &budget)?, || "square is a pullback".into());
        let restored = low.regularized();
        lowered.check(cls.square_is_pullback(&restored.inclusion(), &budget)?, || "regular version fails".into());
        lowered.note("the regular mono on the same elements passes");

        Ok(vec![picture.done(), example.done(), unique.done(), lowered.done()])
    }
}

struct Adjunction;

/// Graphs with at most two vertices and two edges, one per isomorphism class.
fn small_graph_shapes(base: &Arc<FiniteCategory>) -> Result<Vec<Presheaf>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for nv in 0..=2usize {
        let pairs: Vec<(usize, usize)> = (0..nv).flat_map(|a| (0..nv).map(move |b| (a, b))).collect();
        let max_e = if nv == 0 { 0 } else { 2 };
        for ne in 0..=max_e {
            let mut choice = vec![0; ne];
            loop {
                let canon = (0..2)
                    .map(|swap| {
                        let p = |x: usize| if swap == 1 && nv == 2 { 1 - x } else { x };
                        let mut es: Vec<_> = choice.iter().map(|&k| (p(pairs[k].0), p(pairs[k].1))).collect();
                        es.sort_unstable();
                        es
                    })
                    .min()
                    .expect("two orders");
                if seen.insert((nv, canon.clone())) {
                    let vs: Vec<String> = (0..nv).map(|i| format!("v{i}")).collect();
                    let es: Vec<String> = (0..ne).map(|i| format!("e{i}")).collect();
                    let end = |k: usize| {
                        canon.iter().enumerate().map(|(i, e)| (es[i].clone(), vs[if k == 0 { e.0 } else { e.1 }].clone())).collect()
                    };
                    out.push(Presheaf::from_named(
                        base.clone(),
                        &[("V".into(), vs.clone()), ("E".into(), es.clone())],
                        &[("s".into(), end(0)), ("t".into(), end(1))],
                    )?);
                }
                // next tuple
                let mut i = 0;
                while i < ne && choice[i] + 1 == pairs.len() {
                    choice[i] = 0;
                    i += 1;
                }
                if i == ne {
                    break;
                }
                choice[i] += 1;
            }
        }
    }
    Ok(out)
}

/// Fuzzy sets with at most two elements, one per isomorphism class.
fn small_fuzzy_sets(base: &Arc<FiniteCategory>, labels: &LabelFamily) -> Result<Vec<Arc<FuzzyPresheaf>>> {
    let n = labels[0].len();
    let mut out = Vec::new();
    let mut memberships: Vec<Vec<usize>> = vec![vec![]];
    memberships.extend((0..n).map(|a| vec![a]));
    memberships.extend((0..n).flat_map(|a| (a..n).map(move |b| vec![a, b])));
    for ms in memberships {
        let names = (0..ms.len()).map(|i| format!("x{i}")).collect();
        let shape = Presheaf::new(base.clone(), vec![names], vec![(0..ms.len()).collect()])?;
        out.push(Arc::new(FuzzyPresheaf::new(shape, labels.clone(), vec![ms])?));
    }
    Ok(out)
}

struct AdjunctionTally {
    triples: u64,
    hom_pairs: u64,
    largest: usize,
}

/// Curry and uncurry on full hom-sets for one triple, and the eval triangle.
fn adjunction_triple(
    c: &Arc<FuzzyPresheaf>,
    exp: &crate::exponential::Exponential,
    eval: &(Cone, FuzzyMorphism),
    budget: &Budget,
    prop: &mut Prop,
    tally: &mut AdjunctionTally,
) -> Result<()> {
    let (a, b) = (&exp.a, &exp.b);
    let prod = limits::product(c, a)?;
    let left = HomSearch::fuzzy(&prod.apex, b).collect(budget)?;
    let right: Vec<Components> = HomSearch::fuzzy(c, &exp.object).collect(budget)?;
    let right_set: BTreeSet<&Components> = right.iter().collect();
    tally.triples += 1;
    tally.hom_pairs += left.len() as u64;
    tally.largest = tally.largest.max(left.len());
    let what = || format!("C {:?}, A {:?}, B {:?}", c.shape().carriers(), a.shape().carriers(), b.shape().carriers());
    prop.check(left.len() == right.len(), || format!("{} vs {} maps for {}", left.len(), right.len(), what()));
    let (ev_prod, ev) = eval;
    let at: Vec<HashMap<(usize, usize), usize>> = (0..ev_prod.apex.base().object_count())
        .map(|o| (0..ev_prod.apex.size(o)).map(|p| ((ev_prod.legs[0].apply(o, p), ev_prod.legs[1].apply(o, p)), p)).collect())
        .collect();
    let mut images = BTreeSet::new();
    for h in &left {
        let h = FuzzyMorphism::new(prod.apex.clone(), b.clone(), h.clone())?;
        let k = exp.curry(&prod, &h)?;
        prop.check(right_set.contains(k.components()), what);
        prop.check(exp.uncurry(&prod, &k)?.same_arrow(&h), what);
        images.insert(k.components().clone());
        // ev ∘ (k × A) = h
        let comps: Components = (0..prod.apex.base().object_count())
            .map(|o| (0..prod.apex.size(o)).map(|p| at[o][&(k.apply(o, prod.legs[0].apply(o, p)), prod.legs[1].apply(o, p))]).collect())
            .collect();
        let k_times_a = FuzzyMorphism::new(prod.apex.clone(), ev_prod.apex.clone(), comps)?;
        prop.check(k_times_a.then(ev)?.same_arrow(&h), what);
    }
    prop.check(images.len() == left.len(), || format!("curry is not injective for {}", what()));
    for k in &right {
        let k = FuzzyMorphism::new(c.clone(), exp.object.clone(), k.clone())?;
        prop.check(exp.curry(&prod, &exp.uncurry(&prod, &k)?)?.same_arrow(&k), what);
    }
    Ok(())
}

impl Suite for Adjunction {
    fn name(&self) -> &'static str {
        "adjunction"
    }

    fn run(&self, cfg: &SuiteConfig) -> Result<Vec<PropertyResult>> {
        let mut rng = cfg.rng(400);
        let mut out = Vec::new();

        let (gbase, glabels) = graph_setup();
        let mut graphs = Vec::new();
        for shape in small_graph_shapes(&gbase)? {
            graphs.push(Arc::new(FuzzyPresheaf::crisp(shape.clone(), glabels.clone())?));
            graphs.push(Arc::new(random::fuzzy_on(&mut rng, shape, &glabels)));
        }
        let tbase = Arc::new(FiniteCategory::terminal());
        let tlabels = uniform_labels(&tbase, HeytingAlgebra::c3());
        let sets = small_fuzzy_sets(&tbase, &tlabels)?;

        for (name, objects) in [("curry bijection on fuzzy sets", &sets), ("curry bijection on graphs", &graphs)] {
            let mut prop = Prop::new("adjunction", name);
            let mut tally = AdjunctionTally { triples: 0, hom_pairs: 0, largest: 0 };
            for a in objects.iter() {
                for b in objects.iter() {
                    let budget = cfg.budget();
                    let exp = exponential(a, b, &budget)?;
                    let eval = exp.eval()?;
                    for c in objects.iter() {
                        adjunction_triple(c, &exp, &eval, &cfg.budget(), &mut prop, &mut tally)?;
                    }
                }
            }
            prop.note(format!(
                "{} objects, {} triples, {} maps C x A -> B in total, largest hom-set {}",
                objects.len(),
                tally.triples,
                tally.hom_pairs,
                tally.largest
            ));
            out.push(prop.done());
        }

        let mut vertices = Prop::new("adjunction", "graph exponential vertices");
        let v = gbase.object("V")?;
        let point = Arc::new(fuzzy_representable(&gbase, &glabels, v, glabels[v].top()));
        for a in &graphs {
            for b in &graphs {
                let budget = cfg.budget();
                let exp = exponential(a, b, &budget)?;
                let prod = limits::product(&point, a)?;
                let brute = HomSearch::plain(prod.apex.shape(), b.shape()).count(&budget)?;
                let closed = (b.size(v) as u64).pow(a.size(v) as u32);
                let got = exp.object.size(v) as u64;
                vertices.check(got == brute && brute == closed, || format!("{got} vertices, {brute} maps, {closed} functions"));
            }
        }
        vertices.note(format!("{} pairs", graphs.len() * graphs.len()));
        out.push(vertices.done());
        Ok(out)
    }
}

struct Slice;

const SLICES: usize = 24;

impl Suite for Slice {
    fn name(&self) -> &'static str {
        "slice"
    }

    fn run(&self, cfg: &SuiteConfig) -> Result<Vec<PropertyResult>> {
        let mut rng = cfg.rng(500);
        let (base, labels) = graph_setup();
        let mut sigma = Prop::new("slice", "sigma is an isomorphism");
        let mut tau = Prop::new("slice", "tau is an isomorphism");
        let mut homs = Prop::new("slice", "slice homs match element homs");
        let mut downsets = Prop::new("slice", "restricted labels are Heyting");
        let mut hom_total = 0;
        for _ in 0..SLICES {
            let budget = cfg.budget();
            let d = loop {
                let d = random::fuzzy(&mut rng, &base, &labels, 3);
                if d.total_size() > 0 {
                    break Arc::new(d);
                }
            };
            let el = category_of_elements(&d)?;
            let x = SliceObject::new(random::morphism_into(&mut rng, &d, 2));
            let y = SliceObject::new(random::morphism_into(&mut rng, &d, 2));

            let fx = Arc::new(el.to_elements(&x)?);
            let gfx = el.to_slice(&fx)?;
            let s = el.sigma(&gfx, &x)?;
            sigma.check(s.is_isomorphism() && s.then(&x.anchor)?.same_arrow(&gfx.anchor), || format!("over {:?}", d.shape().carriers()));

            let a = Arc::new(random::fuzzy(&mut rng, &el.category, &el.labels, 2));
            let fga = Arc::new(el.to_elements(&el.to_slice(&a)?)?);
            tau.check(el.tau(&fga, &a)?.is_isomorphism(), || format!("over {:?}", d.shape().carriers()));

            let fy = Arc::new(el.to_elements(&y)?);
            let over = slice_homs(&x, &y, &budget)?.len() as u64;
            let under = HomSearch::fuzzy(&fx, &fy).count(&budget)?;
            hom_total += over;
            homs.check(over == under, || format!("{over} slice maps, {under} element maps"));

            for (o, l) in el.labels.iter().enumerate() {
                let (i, e) = el.point(o);
                let (_, bad) = heyting_laws(l);
                let top = l.name(l.top()) == d.membership_name(i, e);
                downsets.check(bad.is_none() && top, || format!("label at {}: {bad:?}", el.category.object_name(o)));
            }
        }
        for (name, l) in fixtures::lattices() {
            for top in 0..l.len() {
                let down = match l.downset(top) {
                    Ok(down) => down,
                    Err(e) => {
                        downsets.check(false, || format!("{name} below {}: {e}", l.name(top)));
                        continue;
                    }
                };
                let (_, bad) = heyting_laws(&down);
                downsets.check(bad.is_none(), || format!("{name} below {}: {bad:?}", l.name(top)));
                // implication in the down-set is the ambient one cut down to the top
                for a in 0..down.len() {
                    for b in 0..down.len() {
                        let (la, lb) = (l.element(down.name(a))?, l.element(down.name(b))?);
                        let expect = l.name(l.meet(l.imp(la, lb), top));
                        downsets.check(down.name(down.imp(a, b)) == expect, || format!("{name}: implication below {}", l.name(top)));
                    }
                }
            }
        }
        sigma.note(format!("{SLICES} slices"));
        tau.note(format!("{SLICES} presheaves on categories of elements"));
        homs.note(format!("{SLICES} pairs, {hom_total} slice maps"));
        downsets.note("bundled lattices and every category of elements");
        Ok(vec![sigma.done(), tau.done(), homs.done(), downsets.done()])
    }
}

struct Adhesive;

const UNION_PAIRS: usize = 100;
const PROBE_SPANS: usize = 20;
const PROBE_SAMPLES: usize = 5;

impl Suite for Adhesive {
    fn name(&self) -> &'static str {
        "adhesive"
    }

    fn run(&self, cfg: &SuiteConfig) -> Result<Vec<PropertyResult>> {
        let mut rng = cfg.rng(600);
        let (base, labels) = graph_setup();

        let mut union = Prop::new("adhesive", "regular unions");
        for _ in 0..UNION_PAIRS {
            let a = Arc::new(random::fuzzy(&mut rng, &base, &labels, 3));
            let (f, g) = (random::subobject(&mut rng, &a, true), random::subobject(&mut rng, &a, true));
            let u = regular_union(&f, &g)?;
            let what = || format!("{:?} and {:?}", f.members(), g.members());
            union.check(u.subobject.is_regular(), what);
            union.check(u.mediator.classify() == MonoKind::RegularMono, what);
            let set_union = elements(&a).into_iter().all(|(o, x)| u.subobject.contains(o, x) == (f.contains(o, x) || g.contains(o, x)));
            union.check(set_union && u.subobject.ambient() == &a, what);
        }
        union.note(format!("{UNION_PAIRS} pairs; union is regular, mediator is a regular mono"));

        let mut probe = Prop::new("adhesive", "Van Kampen on regular spans");
        let mut cubes = 0;
        let mut span = 0;
        while span < PROBE_SPANS {
            let a = Arc::new(random::fuzzy(&mut rng, &base, &labels, 2));
            let m = random::subobject(&mut rng, &a, true).inclusion();
            let c = Arc::new(random::fuzzy(&mut rng, &base, &labels, 2));
            let Some(f) = random::morphism_between(&mut rng, m.source(), &c, &cfg.budget())? else { continue };
            span += 1;
            let seed = rng.gen();
            let report = rm_adhesivity_probe(&m, &f, ProbeConfig { samples: PROBE_SAMPLES, seed }, &cfg.budget())?;
            cubes += report.cubes;
            probe.checked += report.cubes as u64;
            if report.diagnostic || !report.violations.is_empty() {
                probe.fail(report.violations.join("; "));
            }
        }
        probe.note(format!("{PROBE_SPANS} spans, {cubes} cubes"));
        Ok(vec![union.done(), probe.done()])
    }
}

struct Topology;

/// Multigraphs on `n ≤ 3` vertices with at most two occupied ordered
/// pairs, each carrying one or two parallel edges.
fn multigraphs(base: &Arc<FiniteCategory>) -> Result<Vec<Presheaf>> {
    let mut out = Vec::new();
    for n in 0..=3usize {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
        let mut choices: Vec<Vec<(usize, usize)>> = vec![vec![]];
        for (i, &p) in pairs.iter().enumerate() {
            for mult in 1..=2 {
                choices.push(vec![p; mult]);
                for &q in &pairs[i + 1..] {
                    for mult2 in 1..=2 {
                        let mut es = vec![p; mult];
                        es.extend(vec![q; mult2]);
                        choices.push(es);
                    }
                }
            }
        }
        for es in choices {
            let vs: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
            let names: Vec<String> = (0..es.len()).map(|i| format!("e{i}")).collect();
            let end =
                |k: usize| es.iter().enumerate().map(|(i, e)| (names[i].clone(), vs[if k == 0 { e.0 } else { e.1 }].clone())).collect();
            out.push(Presheaf::from_named(
                base.clone(),
                &[("V".into(), vs.clone()), ("E".into(), names.clone())],
                &[("s".into(), end(0)), ("t".into(), end(1))],
            )?);
        }
    }
    Ok(out)
}

impl Suite for Topology {
    fn name(&self) -> &'static str {
        "topology"
    }

    fn run(&self, cfg: &SuiteConfig) -> Result<Vec<PropertyResult>> {
        let mut rng = cfg.rng(700);
        let (base, labels) = graph_setup();
        let ubase = Arc::new(FiniteCategory::schema(Schema::Undirected)?);
        let ulabels = uniform_labels(&ubase, HeytingAlgebra::c3());
        let mut ambients = Vec::new();
        for k in 0..60 {
            let (b, l) = if k % 3 == 2 { (&ubase, &ulabels) } else { (&base, &labels) };
            ambients.push(Arc::new(random::fuzzy(&mut rng, b, l, 3)));
        }

        let mut notnot = Prop::new("topology", "closure is double negation");
        let mut dense = Prop::new("topology", "density criteria agree");
        for a in &ambients {
            let v = a.base().object("V")?;
            for _ in 0..5 {
                let regular = rng.gen_bool(0.5);
                let s = random::subobject(&mut rng, a, regular);
                let closure = topology::notnot_closure(&s)?;
                let twice = topology::not_complement(&topology::not_complement(&s)?)?;
                notnot.check(closure == twice, || format!("{:?}", s.members()));
                let all_vertices = (0..a.size(v)).all(|x| s.contains(v, x));
                let d = topology::is_dense(&s)?;
                dense.check(d == all_vertices && d == closure.is_full(), || format!("{:?}", s.members()));
            }
        }
        let mut via_exp = Prop::new("topology", "negation matches the slice exponential");
        for (name, b) in fixtures::small_graphs().into_iter().filter(|(n, _)| n == "edge" || n == "loop" || n == "loop-edge") {
            for s in regular_subobjects(&b)? {
                let direct = topology::not_complement(&s)?;
                let general = topology::negation_via_exponential(&s, &cfg.budget())?;
                via_exp.check(direct == general, || format!("{name}: {:?}", s.members()));
            }
        }
        notnot.note(format!("{} subobjects", ambients.len() * 5));
        via_exp.note("every regular subobject of three small graphs");
        dense.note("dense iff every vertex iff closure is full");

        let mut separated = Prop::new("topology", "separated criterion and definition agree");
        let (mut yes, mut no) = (0, 0);
        for shape in multigraphs(&base)? {
            for fuzzy in [false, true] {
                let b = Arc::new(if fuzzy {
                    random::fuzzy_on(&mut rng, shape.clone(), &labels)
                } else {
                    FuzzyPresheaf::crisp(shape.clone(), labels.clone())?
                });
                let crit = topology::is_separated(&b, SeparatedMode::Criterion, &cfg.budget())?;
                let def = topology::is_separated(&b, SeparatedMode::DEFAULT_DEFINITIONAL, &cfg.budget())?;
                if crit {
                    yes += 1;
                } else {
                    no += 1;
                }
                separated.check(crit == def, || format!("{:?}: criterion {crit}, definition {def}", b.shape().carriers()));
            }
        }
        separated.note(format!("{yes} separated, {no} not"));

        let mut axioms = Prop::new("topology", "topology axioms");
        let mut names = Vec::new();
        for t in topology::registry() {
            let seed = rng.gen();
            match topology::check_topology_axioms(t.as_ref(), &ambients[..12], 10, seed) {
                Ok(r) => {
                    axioms.checked += r.samples as u64;
                    names.push(t.name());
                }
                Err(Error::AxiomViolated(msg)) => axioms.fail(msg),
                Err(e) => return Err(e),
            }
        }
        axioms.note(format!("{} on 12 ambients", names.join(", ")));

        Ok(vec![notnot.done(), dense.done(), via_exp.done(), separated.done(), axioms.done()])
    }
}

struct Rewrite;

impl Suite for Rewrite {
    fn name(&self) -> &'static str {
        "rewrite"
    }

    fn run(&self, cfg: &SuiteConfig) -> Result<Vec<PropertyResult>> {
        let budget = cfg.budget();
        let demo = TransmissionDemo::build()?;
        let step = transmit(&demo.pre_state, &budget)?;

        let mut post = Prop::new("rewrite", "transmission post-state");
        post.check(*step.g_r == *demo.expected_post, || format!("got {:?}", crate::rewrite::describe_state(&step.g_r)));
        post.note("mail moved to q, key consumed, connection removed");

        let mut faces = Prop::new("rewrite", "front faces are pullbacks");
        faces.check(step.report.front_pullbacks == (true, true), || format!("{:?}", step.report));
        faces.check(step.report.back_pullbacks == (true, true) && step.report.bottom_pushout && step.report.top_pushout, || {
            format!("{:?}", step.report)
        });
        faces.note("t_K is a regular mono");

        let mut context = Prop::new("rewrite", "context is preserved");
        let state = Arc::new(TransmissionDemo::state(
            &demo.base,
            &[("o", "{key,mail}"), ("p", "{key,mail}"), ("q", "{}"), ("r", "{key}")],
            &[("c", "p", "q", "r"), ("d", "o", "p", "r"), ("e", "q", "o", "o")],
        )?);
        let after = transmit(&state, &budget)?;
        let expect = TransmissionDemo::state(
            &demo.base,
            &[("o", "{key,mail}"), ("p", "{key}"), ("q", "{mail}"), ("r", "{}")],
            &[("d", "o", "p", "r"), ("e", "q", "o", "o")],
        )?;
        context.check(*after.g_r == expect, || format!("got {:?}", crate::rewrite::describe_state(&after.g_r)));
        context.note("other processes and connections untouched");

        let mut again = Prop::new("rewrite", "no second transmission").negative();
        again.check(matches!(transmit(&step.g_r, &budget), Err(Error::NoMatch(_))), || "matched the post-state".into());
        again.note("the post-state has no match");

        Ok(vec![post.done(), faces.done(), context.done(), again.done()])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graph_shapes_up_to_isomorphism() {
        let base = Arc::new(FiniteCategory::graph());
        assert_eq!(small_graph_shapes(&base).unwrap().len(), 13);
        let (_, labels) = graph_setup();
        let tbase = Arc::new(FiniteCategory::terminal());
        assert_eq!(small_fuzzy_sets(&tbase, &uniform_labels(&tbase, (*labels[0]).clone())).unwrap().len(), 10);
    }

    #[test]
    fn multigraph_enumeration() {
        let base = Arc::new(FiniteCategory::graph());
        // per vertex count: 1 + 2p + 4 C(p, 2) with p = n^2 ordered pairs
        let expected: usize = (0..=3usize).map(|n| n * n).map(|p| 1 + 2 * p + 2 * p * p.saturating_sub(1)).sum();
        assert_eq!(multigraphs(&base).unwrap().len(), expected);
    }

    #[test]
    fn laws_catch_a_broken_implication() {
        assert!(heyting_laws(&HeytingAlgebra::c3()).1.is_none());
        assert!(lookup("nope").is_none());
        assert_eq!(registry().len(), 8);
    }

    #[test]
    fn heyting_and_rewrite_suites_pass() {
        for name in ["heyting", "rewrite"] {
            for r in run(name, &SuiteConfig::default()).unwrap() {
                assert!(r.passed, "{}", r.line());
            }
        }
    }
}
