//! Finite index categories and the graph-like schemas built from them.
//!
//! Categories are stored *as drawn*: a schema such as `E ⇉ V` lists the
//! arrows `s, t : E → V`, which is the opposite of the index category of
//! the presheaves living on it. A presheaf is therefore a covariant functor
//! on the stored category, and the representable at `i` is the covariant
//! hom-functor `Hom(i, -)`.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type ObjId = usize;
pub type MorId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphism {
    pub name: String,
    pub dom: ObjId,
    pub cod: ObjId,
}

/// Supported schema shapes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "schema", rename_all = "kebab-case")]
pub enum Schema {
    Terminal,
    Graph,
    Undirected,
    Reflexive,
    UndirectedReflexive,
    Hypergraph { m: usize, n: usize },
    Incidence,
    TernaryConnection,
}

impl Schema {
    pub fn name(&self) -> &'static str {
        match self {
            Schema::Terminal => "terminal",
            Schema::Graph => "graph",
            Schema::Undirected => "undirected",
            Schema::Reflexive => "reflexive",
            Schema::UndirectedReflexive => "undirected-reflexive",
            Schema::Hypergraph { .. } => "hypergraph",
            Schema::Incidence => "incidence",
            Schema::TernaryConnection => "ternary-connection",
        }
    }

    /// Parses a kind name plus optional `m`/`n` parameters.
    pub fn from_kind(kind: &str, m: Option<usize>, n: Option<usize>) -> Result<Schema> {
        let schema = match kind {
            "terminal" => Schema::Terminal,
            "graph" => Schema::Graph,
            "undirected" => Schema::Undirected,
            "reflexive" => Schema::Reflexive,
            "undirected-reflexive" => Schema::UndirectedReflexive,
            "hypergraph" => {
                let m = m.ok_or_else(|| Error::BadParams("hypergraph needs m".into()))?;
                Schema::Hypergraph { m, n: n.unwrap_or(0) }
            }
            "incidence" => Schema::Incidence,
            "ternary-connection" => Schema::TernaryConnection,
            other => return Err(Error::UnsupportedKind(other.to_string())),
        };
        Ok(schema)
    }
}

/// A validated finite category with a total composition table.
#[derive(Clone)]
pub struct FiniteCategory {
    objects: Vec<String>,
    morphisms: Vec<Morphism>,
    identities: Vec<MorId>,
    /// `compose[g][f] = g ∘ f` when `cod f = dom g`.
    compose: Vec<Vec<Option<MorId>>>,
    object_index: HashMap<String, ObjId>,
    morphism_index: HashMap<String, MorId>,
    schema: Option<Schema>,
}

impl PartialEq for FiniteCategory {
    fn eq(&self, other: &Self) -> bool {
        self.objects == other.objects
            && self.morphisms == other.morphisms
            && self.identities == other.identities
            && self.compose == other.compose
    }
}

impl Eq for FiniteCategory {}

impl fmt::Debug for FiniteCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteCategory")
            .field("objects", &self.objects)
            .field("morphisms", &self.morphisms.iter().map(|m| &m.name).collect::<Vec<_>>())
            .field("schema", &self.schema)
            .finish()
    }
}

/// Unvalidated category description, mirroring the exchange format.
#[derive(Debug, Clone, Default)]
pub struct RawCategory {
    pub objects: Vec<String>,
    /// `(id, dom, cod)`
    pub morphisms: Vec<(String, String, String)>,
    /// object → identity morphism
    pub identities: Vec<(String, String)>,
    /// `(g, f, g∘f)`; entries involving identities may be omitted.
    pub compose: Vec<(String, String, String)>,
}

impl FiniteCategory {
    /// Validates identities, typing, totality and associativity.
    pub fn validate(raw: &RawCategory) -> Result<FiniteCategory> {
        let mut objects = raw.objects.clone();
        objects.sort();
        for w in objects.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Duplicate(w[0].clone()));
            }
        }
        let object_index: HashMap<String, ObjId> = objects.iter().enumerate().map(|(i, o)| (o.clone(), i)).collect();
        let obj = |name: &str| object_index.get(name).copied().ok_or_else(|| Error::UnknownObject(name.to_string()));

        let mut sorted = raw.morphisms.clone();
        sorted.sort();
        let mut morphisms = Vec::with_capacity(sorted.len());
        for (name, dom, cod) in &sorted {
            if morphisms.last().is_some_and(|m: &Morphism| &m.name == name) {
                return Err(Error::Duplicate(name.clone()));
            }
            morphisms.push(Morphism { name: name.clone(), dom: obj(dom)?, cod: obj(cod)? });
        }
        let morphism_index: HashMap<String, MorId> = morphisms.iter().enumerate().map(|(i, m)| (m.name.clone(), i)).collect();
        let mor = |name: &str| morphism_index.get(name).copied().ok_or_else(|| Error::UnknownMorphism(name.to_string()));

        let mut identities = vec![None; objects.len()];
        for (o, m) in &raw.identities {
            let (o, m) = (obj(o)?, mor(m)?);
            if morphisms[m].dom != o || morphisms[m].cod != o {
                return Err(Error::IdentityLaw(format!("`{}` is not an endomorphism of `{}`", morphisms[m].name, objects[o])));
            }
            identities[o] = Some(m);
        }
        let identities: Vec<MorId> = identities
            .into_iter()
            .enumerate()
            .map(|(o, m)| m.ok_or_else(|| Error::MissingIdentity(objects[o].clone())))
            .collect::<Result<_>>()?;

        let n = morphisms.len();
        let mut compose = vec![vec![None; n]; n];
        for (g, f, gf) in &raw.compose {
            let (g, f, gf) = (mor(g)?, mor(f)?, mor(gf)?);
            if morphisms[f].cod != morphisms[g].dom || morphisms[gf].dom != morphisms[f].dom || morphisms[gf].cod != morphisms[g].cod {
                return Err(Error::BadComposition(format!("{} o {} = {}", morphisms[g].name, morphisms[f].name, morphisms[gf].name)));
            }
            if compose[g][f].is_some_and(|prev| prev != gf) {
                return Err(Error::BadComposition(format!("conflicting entries for {} o {}", morphisms[g].name, morphisms[f].name)));
            }
            compose[g][f] = Some(gf);
        }
        for f in 0..n {
            let unit_laws = [(identities[morphisms[f].cod], f), (f, identities[morphisms[f].dom])];
            for (g, h) in unit_laws {
                match compose[g][h] {
                    None => compose[g][h] = Some(f),
                    Some(x) if x != f => {
                        return Err(Error::IdentityLaw(format!(
                            "{} o {} should be {}",
                            morphisms[g].name, morphisms[h].name, morphisms[f].name
                        )))
                    }
                    Some(_) => {}
                }
            }
        }
        for g in 0..n {
            for f in 0..n {
                if morphisms[f].cod == morphisms[g].dom && compose[g][f].is_none() {
                    return Err(Error::CompositionGap(morphisms[g].name.clone(), morphisms[f].name.clone()));
                }
            }
        }
        let cat = FiniteCategory { objects, morphisms, identities, compose, object_index, morphism_index, schema: None };
        cat.check_associative()?;
        Ok(cat)
    }

    fn check_associative(&self) -> Result<()> {
        let n = self.morphisms.len();
        for h in 0..n {
            for g in 0..n {
                let Some(gh) = self.compose(g, h) else { continue };
                for f in 0..n {
                    let Some(fg) = self.compose(f, g) else { continue };
                    if self.compose(f, gh) != self.compose(fg, h) {
                        return Err(Error::NotAssociative(
                            self.morphisms[f].name.clone(),
                            self.morphisms[g].name.clone(),
                            self.morphisms[h].name.clone(),
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Materializes one of the supported schemas.
    pub fn schema(schema: Schema) -> Result<FiniteCategory> {
        let mut raw = match &schema {
            Schema::Terminal => discrete(&["*"]),
            Schema::Graph => graph_family(false, false),
            Schema::Undirected => graph_family(true, false),
            Schema::Reflexive => graph_family(false, true),
            Schema::UndirectedReflexive => graph_family(true, true),
            Schema::Hypergraph { m, n } => {
                if *m == 0 {
                    return Err(Error::BadParams("hypergraph needs m >= 1".into()));
                }
                let mut raw = discrete(&["E", "V"]);
                for k in 0..*m {
                    raw.morphisms.push((format!("s_{k}"), "E".into(), "V".into()));
                }
                for k in 0..*n {
                    raw.morphisms.push((format!("t_{k}"), "E".into(), "V".into()));
                }
                raw
            }
            Schema::Incidence => {
                let mut raw = discrete(&["E", "R", "V"]);
                raw.morphisms.push(("f".into(), "R".into(), "E".into()));
                raw.morphisms.push(("g".into(), "R".into(), "V".into()));
                raw
            }
            Schema::TernaryConnection => {
                let mut raw = discrete(&["C", "P"]);
                for m in ["s", "m", "t"] {
                    raw.morphisms.push((m.into(), "C".into(), "P".into()));
                }
                raw
            }
        };
        raw.compose.sort();
        let mut cat = FiniteCategory::validate(&raw)?;
        cat.schema = Some(schema);
        Ok(cat)
    }

    pub fn terminal() -> FiniteCategory {
        Self::schema(Schema::Terminal).expect("terminal category")
    }

    pub fn graph() -> FiniteCategory {
        Self::schema(Schema::Graph).expect("graph schema")
    }

    pub fn schema_kind(&self) -> Option<&Schema> {
        self.schema.as_ref()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn object_name(&self, o: ObjId) -> &str {
        &self.objects[o]
    }

    pub fn object(&self, name: &str) -> Result<ObjId> {
        self.object_index.get(name).copied().ok_or_else(|| Error::UnknownObject(name.to_string()))
    }

    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    pub fn morphism(&self, name: &str) -> Result<MorId> {
        self.morphism_index.get(name).copied().ok_or_else(|| Error::UnknownMorphism(name.to_string()))
    }

    pub fn morphism_name(&self, m: MorId) -> &str {
        &self.morphisms[m].name
    }

    pub fn dom(&self, m: MorId) -> ObjId {
        self.morphisms[m].dom
    }

    pub fn cod(&self, m: MorId) -> ObjId {
        self.morphisms[m].cod
    }

    pub fn identity(&self, o: ObjId) -> MorId {
        self.identities[o]
    }

    pub fn is_identity(&self, m: MorId) -> bool {
        self.identities[self.morphisms[m].dom] == m
    }

    /// `g ∘ f`, if composable.
    pub fn compose(&self, g: MorId, f: MorId) -> Option<MorId> {
        self.compose[g][f]
    }

    /// Morphisms `dom → cod` in name order.
    pub fn hom(&self, dom: ObjId, cod: ObjId) -> Vec<MorId> {
        (0..self.morphisms.len()).filter(|&m| self.morphisms[m].dom == dom && self.morphisms[m].cod == cod).collect()
    }

    /// `hom` on names.
    pub fn hom_set(&self, dom: &str, cod: &str) -> Result<Vec<&str>> {
        let (d, c) = (self.object(dom)?, self.object(cod)?);
        Ok(self.hom(d, c).into_iter().map(|m| self.morphism_name(m)).collect())
    }

    /// All morphisms with domain `o`, in name order.
    pub fn out_of(&self, o: ObjId) -> Vec<MorId> {
        (0..self.morphisms.len()).filter(|&m| self.morphisms[m].dom == o).collect()
    }

    pub fn non_identities(&self) -> impl Iterator<Item = MorId> + '_ {
        (0..self.morphisms.len()).filter(|&m| !self.is_identity(m))
    }

    /// The raw description this category serializes to.
    pub fn to_raw(&self) -> RawCategory {
        let name = |m: MorId| self.morphisms[m].name.clone();
        let mut compose = Vec::new();
        for g in self.non_identities() {
            for f in self.non_identities() {
                if let Some(gf) = self.compose(g, f) {
                    compose.push((name(g), name(f), name(gf)));
                }
            }
        }
        RawCategory {
            objects: self.objects.clone(),
            morphisms: self.morphisms.iter().map(|m| (m.name.clone(), self.objects[m.dom].clone(), self.objects[m.cod].clone())).collect(),
            identities: (0..self.objects.len()).map(|o| (self.objects[o].clone(), name(self.identities[o]))).collect(),
            compose,
        }
    }
}

fn discrete(objects: &[&str]) -> RawCategory {
    RawCategory {
        objects: objects.iter().map(|o| o.to_string()).collect(),
        morphisms: objects.iter().map(|o| (format!("id_{o}"), o.to_string(), o.to_string())).collect(),
        identities: objects.iter().map(|o| (o.to_string(), format!("id_{o}"))).collect(),
        compose: Vec::new(),
    }
}

/// Morphisms of the (undirected) (reflexive) graph schemas, as drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum GraphArrow {
    IdE,
    IdV,
    /// `s` (false) or `t` (true), `E → V`.
    End(bool),
    /// `V → E`
    Refl,
    /// `E → E`
    Sym,
    /// `refl ∘ s` or `refl ∘ t`, `E → E`.
    Collapse(bool),
}

impl GraphArrow {
    fn name(self) -> String {
        match self {
            GraphArrow::IdE => "id_E".into(),
            GraphArrow::IdV => "id_V".into(),
            GraphArrow::End(false) => "s".into(),
            GraphArrow::End(true) => "t".into(),
            GraphArrow::Refl => "refl".into(),
            GraphArrow::Sym => "sym".into(),
            GraphArrow::Collapse(false) => "refl.s".into(),
            GraphArrow::Collapse(true) => "refl.t".into(),
        }
    }

    fn ends(self) -> (&'static str, &'static str) {
        use GraphArrow::*;
        match self {
            IdE | Sym | Collapse(_) => ("E", "E"),
            IdV => ("V", "V"),
            End(_) => ("E", "V"),
            Refl => ("V", "E"),
        }
    }

    /// `self ∘ f` under the relations `sym∘sym = id`, `s∘sym = t`,
    /// `t∘sym = s`, `s∘refl = t∘refl = id_V`, `sym∘refl = refl`.
    fn after(self, f: GraphArrow) -> GraphArrow {
        use GraphArrow::*;
        match (self, f) {
            (IdE, x) | (IdV, x) => x,
            (x, IdE) | (x, IdV) => x,
            (End(e), Sym) => End(!e),
            (End(_), Collapse(c)) => End(c),
            (End(_), Refl) => IdV,
            (Refl, End(e)) => Collapse(e),
            (Sym, Sym) => IdE,
            (Sym, Collapse(c)) => Collapse(c),
            (Collapse(c), Sym) => Collapse(!c),
            (Collapse(_), Collapse(d)) => Collapse(d),
            (Sym, Refl) | (Collapse(_), Refl) => Refl,
            (g, f) => unreachable!("{g:?} after {f:?} is not composable"),
        }
    }
}

fn graph_family(sym: bool, refl: bool) -> RawCategory {
    use GraphArrow::*;
    let mut arrows = vec![IdE, IdV, End(false), End(true)];
    if sym {
        arrows.push(Sym);
    }
    if refl {
        arrows.extend([Refl, Collapse(false), Collapse(true)]);
    }
    let mut raw = RawCategory {
        objects: vec!["E".into(), "V".into()],
        morphisms: arrows
            .iter()
            .map(|a| {
                let (d, c) = a.ends();
                (a.name(), d.to_string(), c.to_string())
            })
            .collect(),
        identities: vec![("E".into(), "id_E".into()), ("V".into(), "id_V".into())],
        compose: Vec::new(),
    };
    for &g in &arrows {
        for &f in &arrows {
            if f.ends().1 == g.ends().0 {
                raw.compose.push((g.name(), f.name(), g.after(f).name()));
            }
        }
    }
    raw
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(cat: &FiniteCategory, ms: Vec<MorId>) -> Vec<&str> {
        ms.into_iter().map(|m| cat.morphism_name(m)).collect()
    }

    #[test]
    fn graph_schema_matches_drawn_shape() {
        let g = FiniteCategory::graph();
        assert_eq!(g.objects(), &["E", "V"]);
        assert_eq!(g.hom_set("E", "V").unwrap(), vec!["s", "t"]);
        assert_eq!(g.hom_set("V", "V").unwrap(), vec!["id_V"]);
        assert!(g.hom_set("V", "E").unwrap().is_empty());
        assert_eq!(g.non_identities().count(), 2);
    }

    #[test]
    fn undirected_relations() {
        let c = FiniteCategory::schema(Schema::Undirected).unwrap();
        let m = |n: &str| c.morphism(n).unwrap();
        assert_eq!(c.compose(m("sym"), m("sym")), Some(m("id_E")));
        assert_eq!(c.compose(m("s"), m("sym")), Some(m("t")));
        assert_eq!(c.compose(m("t"), m("sym")), Some(m("s")));
        assert_eq!(names(&c, c.non_identities().collect()), vec!["s", "sym", "t"]);
    }

    #[test]
    fn reflexive_relations() {
        let c = FiniteCategory::schema(Schema::Reflexive).unwrap();
        let m = |n: &str| c.morphism(n).unwrap();
        assert_eq!(c.compose(m("s"), m("refl")), Some(m("id_V")));
        assert_eq!(c.compose(m("t"), m("refl")), Some(m("id_V")));
        assert_eq!(c.hom_set("E", "E").unwrap(), vec!["id_E", "refl.s", "refl.t"]);
        let ur = FiniteCategory::schema(Schema::UndirectedReflexive).unwrap();
        let m = |n: &str| ur.morphism(n).unwrap();
        assert_eq!(ur.compose(m("sym"), m("refl")), Some(m("refl")));
    }

    #[test]
    fn hypergraph_and_other_schemas() {
        let h = FiniteCategory::schema(Schema::Hypergraph { m: 2, n: 1 }).unwrap();
        assert_eq!(h.hom_set("E", "V").unwrap(), vec!["s_0", "s_1", "t_0"]);
        assert!(matches!(FiniteCategory::schema(Schema::Hypergraph { m: 0, n: 1 }), Err(Error::BadParams(_))));
        let inc = FiniteCategory::schema(Schema::Incidence).unwrap();
        assert_eq!(inc.hom_set("R", "E").unwrap(), vec!["f"]);
        let tc = FiniteCategory::schema(Schema::TernaryConnection).unwrap();
        assert_eq!(tc.hom_set("C", "P").unwrap(), vec!["m", "s", "t"]);
        assert!(matches!(Schema::from_kind("petri", None, None), Err(Error::UnsupportedKind(_))));
    }

    #[test]
    fn terminal_category() {
        let t = FiniteCategory::terminal();
        assert_eq!(t.object_count(), 1);
        assert_eq!(t.morphisms().len(), 1);
    }

    #[test]
    fn validation_errors() {
        let mut raw = FiniteCategory::graph().to_raw();
        raw.identities.pop();
        assert!(matches!(FiniteCategory::validate(&raw), Err(Error::MissingIdentity(_))));

        // one object, a non-identity idempotent-free endomorphism with a wrong table
        let raw = RawCategory {
            objects: vec!["X".into()],
            morphisms: vec![
                ("id".into(), "X".into(), "X".into()),
                ("a".into(), "X".into(), "X".into()),
                ("b".into(), "X".into(), "X".into()),
            ],
            identities: vec![("X".into(), "id".into())],
            compose: vec![
                ("a".into(), "a".into(), "b".into()),
                ("a".into(), "b".into(), "a".into()),
                ("b".into(), "a".into(), "b".into()),
                ("b".into(), "b".into(), "b".into()),
            ],
        };
        // (a∘a)∘b = b∘b = b but a∘(a∘b) = a∘a = b; a∘(b∘a) = a∘b = a vs (a∘b)∘a = a∘a = b
        assert!(matches!(FiniteCategory::validate(&raw), Err(Error::NotAssociative(..))));

        let mut gap = raw.clone();
        gap.compose.pop();
        assert!(matches!(FiniteCategory::validate(&gap), Err(Error::CompositionGap(..))));
    }

    #[test]
    fn explicit_roundtrip_equals_schema() {
        for s in [Schema::Graph, Schema::Undirected, Schema::UndirectedReflexive] {
            let c = FiniteCategory::schema(s).unwrap();
            assert_eq!(FiniteCategory::validate(&c.to_raw()).unwrap(), c);
        }
    }
}
