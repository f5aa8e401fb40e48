//! The JSON exchange format.
//!
//! Every value is an object tagged with `"$kind"`. Wherever a value is
//! expected, a string reference may stand in for it: `"#name"` names an item
//! of the enclosing bundle, `"file.json"` the value a file holds and
//! `"file.json#name"` an item of a bundle file. Paths are relative to the
//! referring file.
//!
//! Serialization is canonical: map keys are sorted, carriers keep their
//! order, and inside a bundle an inline value that equals a named item of a
//! lower rank is written as a reference to it.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde_json::{json, Map, Value};

use crate::adhesive::{Cube, EDGE_NAMES, VERTEX_NAMES};
use crate::category::{FiniteCategory, RawCategory, Schema};
use crate::error::{Error, Result};
use crate::homs::Budget;
use crate::lattice::{HeytingAlgebra, LatticeOrigin, OrderMode};
use crate::presheaf::{FuzzyMorphism, FuzzyPresheaf, Presheaf, Subobject};
use crate::rewrite::{validate_rule, HostInterface, RuleRight};

#[derive(Debug, Clone)]
pub enum Item {
    Lattice(Arc<HeytingAlgebra>),
    Category(Arc<FiniteCategory>),
    Presheaf(Arc<FuzzyPresheaf>),
    Morphism(FuzzyMorphism),
    Subobject(Subobject),
    Rule(RuleRight),
    Host(HostInterface),
    Cube(Box<Cube>),
    Bundle(Vec<(String, Item)>),
}

impl PartialEq for Item {
    fn eq(&self, other: &Item) -> bool {
        use Item::*;
        match (self, other) {
            (Lattice(a), Lattice(b)) => a == b,
            (Category(a), Category(b)) => a == b,
            (Presheaf(a), Presheaf(b)) => a == b,
            (Morphism(a), Morphism(b)) => a.same_arrow(b),
            (Subobject(a), Subobject(b)) => a == b,
            (Rule(a), Rule(b)) => {
                a.r.same_arrow(&b.r) && a.t_k.same_arrow(&b.t_k) && a.t_r.same_arrow(&b.t_r) && a.r_prime.same_arrow(&b.r_prime)
            }
            (Host(a), Host(b)) => a.u.same_arrow(&b.u) && a.u_prime.same_arrow(&b.u_prime),
            (Cube(a), Cube(b)) => a.edges().iter().zip(b.edges()).all(|(x, y)| x.same_arrow(y)),
            (Bundle(a), Bundle(b)) => a == b,
            _ => false,
        }
    }
}

impl Item {
    pub fn kind(&self) -> &'static str {
        match self {
            Item::Lattice(_) => "lattice",
            Item::Category(_) => "category",
            Item::Presheaf(_) => "presheaf",
            Item::Morphism(_) => "morphism",
            Item::Subobject(_) => "subobject",
            Item::Rule(_) => "rule",
            Item::Host(_) => "host",
            Item::Cube(_) => "cube",
            Item::Bundle(_) => "bundle",
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Item::Lattice(_) => 0,
            Item::Category(_) => 1,
            Item::Presheaf(_) => 2,
            Item::Morphism(_) | Item::Subobject(_) => 3,
            Item::Rule(_) | Item::Host(_) | Item::Cube(_) => 4,
            Item::Bundle(_) => 5,
        }
    }

    pub fn to_json(&self) -> Value {
        Writer { named: &[], below: 0 }.item(self)
    }

    /// Pretty-printed canonical JSON with a trailing newline.
    pub fn to_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json()).expect("values serialize");
        s.push('\n');
        s
    }
}

/// Canonical writer; `named` are the bundle items that may be referenced,
/// `below` the rank an item must stay under to be referenced.
struct Writer<'a> {
    named: &'a [(String, Item)],
    below: u8,
}

impl Writer<'_> {
    fn reference(&self, probe: &Item) -> Option<Value> {
        self.named.iter().find(|(_, it)| it.rank() < self.below && it == probe).map(|(name, _)| Value::String(format!("#{name}")))
    }

    fn item(&self, item: &Item) -> Value {
        match item {
            Item::Lattice(l) => self.lattice(l),
            Item::Category(c) => self.category(c),
            Item::Presheaf(p) => self.presheaf(p),
            Item::Morphism(m) => self.morphism(m),
            Item::Subobject(s) => {
                json!({
                    "$kind": "subobject",
                    "ambient": self.presheaf(s.ambient()),
                    "members": members_json(s),
                })
            }
            Item::Rule(r) => {
                json!({
                    "$kind": "rule",
                    "r": self.morphism(&r.r),
                    "t_K": self.morphism(&r.t_k),
                    "t_R": self.morphism(&r.t_r),
                    "r'": self.morphism(&r.r_prime),
                })
            }
            Item::Host(h) => json!({"$kind": "host", "u": self.morphism(&h.u), "u'": self.morphism(&h.u_prime)}),
            Item::Cube(c) => {
                let edges: Map<String, Value> = EDGE_NAMES.iter().zip(c.edges()).map(|(n, m)| (n.to_string(), self.morphism(m))).collect();
                json!({"$kind": "cube", "edges": edges})
            }
            Item::Bundle(items) => {
                let out: Map<String, Value> =
                    items.iter().map(|(name, it)| (name.clone(), Writer { named: items, below: it.rank() }.item(it))).collect();
                json!({"$kind": "bundle", "items": out})
            }
        }
    }

    fn lattice(&self, l: &Arc<HeytingAlgebra>) -> Value {
        if let Some(r) = self.reference(&Item::Lattice(l.clone())) {
            return r;
        }
        match l.origin() {
            LatticeOrigin::Powerset(atoms) => json!({"$kind": "lattice", "powerset_of": atoms}),
            LatticeOrigin::Explicit => {
                let order: Vec<Value> = l.hasse_pairs().into_iter().map(|(a, b)| json!([l.name(a), l.name(b)])).collect();
                json!({"$kind": "lattice", "elements": l.names(), "order": order, "mode": "hasse"})
            }
        }
    }

    fn category(&self, c: &Arc<FiniteCategory>) -> Value {
        if let Some(r) = self.reference(&Item::Category(c.clone())) {
            return r;
        }
        if let Some(schema) = c.schema_kind() {
            return match schema {
                Schema::Hypergraph { m, n } => json!({"$kind": "category", "schema": schema.name(), "params": {"m": m, "n": n}}),
                _ => json!({"$kind": "category", "schema": schema.name()}),
            };
        }
        let raw = c.to_raw();
        let morphisms: Vec<Value> = raw.morphisms.iter().map(|(id, d, k)| json!({"id": id, "dom": d, "cod": k})).collect();
        let identities: Map<String, Value> = raw.identities.iter().map(|(o, i)| (o.clone(), json!(i))).collect();
        let compose: Vec<Value> = raw.compose.iter().map(|(g, f, gf)| json!([g, f, gf])).collect();
        json!({
            "$kind": "category",
            "objects": raw.objects,
            "morphisms": morphisms,
            "identities": identities,
            "compose": compose,
        })
    }

    fn presheaf(&self, p: &Arc<FuzzyPresheaf>) -> Value {
        if let Some(r) = self.reference(&Item::Presheaf(p.clone())) {
            return r;
        }
        let base = p.base();
        let mut lattices = Map::new();
        let mut carriers = Map::new();
        let mut membership = Map::new();
        for o in 0..base.object_count() {
            let name = base.object_name(o).to_string();
            lattices.insert(name.clone(), self.lattice(&p.labels()[o]));
            carriers.insert(name.clone(), json!(p.carrier(o)));
            let m: Map<String, Value> = (0..p.size(o)).map(|x| (p.elem_name(o, x).to_string(), json!(p.membership_name(o, x)))).collect();
            membership.insert(name, Value::Object(m));
        }
        let mut actions = Map::new();
        for f in base.non_identities() {
            let table: Map<String, Value> = (0..p.size(base.dom(f)))
                .map(|x| (p.elem_name(base.dom(f), x).to_string(), json!(p.elem_name(base.cod(f), p.act(f, x)))))
                .collect();
            actions.insert(base.morphism_name(f).to_string(), Value::Object(table));
        }
        json!({
            "$kind": "presheaf",
            "category": self.category(base),
            "lattices": lattices,
            "carriers": carriers,
            "actions": actions,
            "membership": membership,
        })
    }

    fn morphism(&self, m: &FuzzyMorphism) -> Value {
        if let Some(r) = self.reference(&Item::Morphism(m.clone())) {
            return r;
        }
        let (s, t) = (m.source(), m.target());
        let base = s.base();
        let components: Map<String, Value> = (0..base.object_count())
            .map(|o| {
                let c: Map<String, Value> =
                    (0..s.size(o)).map(|x| (s.elem_name(o, x).to_string(), json!(t.elem_name(o, m.apply(o, x))))).collect();
                (base.object_name(o).to_string(), Value::Object(c))
            })
            .collect();
        json!({"$kind": "morphism", "from": self.presheaf(s), "to": self.presheaf(t), "components": components})
    }
}

fn members_json(s: &Subobject) -> Value {
    let a = s.ambient();
    let base = a.base();
    let out: Map<String, Value> = (0..base.object_count())
        .map(|o| {
            let m: Map<String, Value> = (0..a.size(o))
                .filter_map(|x| s.membership(o, x).map(|l| (a.elem_name(o, x).to_string(), json!(a.label(o).name(l)))))
                .collect();
            (base.object_name(o).to_string(), Value::Object(m))
        })
        .collect();
    Value::Object(out)
}

/// Loaded files and resolved items.
pub struct Workspace {
    budget: Budget,
    files: HashMap<PathBuf, Arc<Value>>,
    resolved: HashMap<(PathBuf, String), Item>,
    loading: HashSet<(PathBuf, String)>,
}

impl Default for Workspace {
    fn default() -> Self {
        Workspace::new(Budget::default())
    }
}

fn parse_err(msg: impl Into<String>) -> Error {
    Error::ParseError(msg.into())
}

fn field<'v>(obj: &'v Map<String, Value>, key: &str, kind: &str) -> Result<&'v Value> {
    obj.get(key).ok_or_else(|| parse_err(format!("{kind}: missing `{key}`")))
}

fn str_list(v: &Value, what: &str) -> Result<Vec<String>> {
    v.as_array()
        .ok_or_else(|| parse_err(format!("{what}: expected an array")))?
        .iter()
        .map(|s| s.as_str().map(str::to_string).ok_or_else(|| parse_err(format!("{what}: expected strings"))))
        .collect()
}

fn str_map(v: &Value, what: &str) -> Result<Vec<(String, String)>> {
    v.as_object()
        .ok_or_else(|| parse_err(format!("{what}: expected an object")))?
        .iter()
        .map(|(k, s)| Ok((k.clone(), s.as_str().ok_or_else(|| parse_err(format!("{what}: expected string values")))?.to_string())))
        .collect()
}

/// `{outer: {inner: value}}` in file order.
type Nested = Vec<(String, Vec<(String, String)>)>;

fn nested_map(v: &Value, what: &str) -> Result<Nested> {
    v.as_object()
        .ok_or_else(|| parse_err(format!("{what}: expected an object")))?
        .iter()
        .map(|(k, inner)| Ok((k.clone(), str_map(inner, &format!("{what}.{k}"))?)))
        .collect()
}

impl Workspace {
    pub fn new(budget: Budget) -> Workspace {
        Workspace { budget, files: HashMap::new(), resolved: HashMap::new(), loading: HashSet::new() }
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    fn file(&mut self, path: &Path) -> Result<Arc<Value>> {
        if let Some(v) = self.files.get(path) {
            return Ok(v.clone());
        }
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let v: Value = serde_json::from_str(&text).map_err(|e| parse_err(format!("{}: {e}", path.display())))?;
        let v = Arc::new(v);
        self.files.insert(path.to_path_buf(), v.clone());
        Ok(v)
    }

    /// Loads the value a file holds.
    pub fn load(&mut self, path: &Path) -> Result<Item> {
        self.lookup(path, "")
    }

    /// Parses text as if it were the file `origin`.
    pub fn parse_str(&mut self, text: &str, origin: &Path) -> Result<Item> {
        let v: Value = serde_json::from_str(text).map_err(|e| parse_err(e.to_string()))?;
        self.files.insert(origin.to_path_buf(), Arc::new(v));
        self.resolved.retain(|(p, _), _| p != origin);
        self.lookup(origin, "")
    }

    /// Resolves a reference string relative to the file `from`.
    pub fn resolve(&mut self, reference: &str, from: &Path) -> Result<Item> {
        let (file, name) = reference.split_once('#').unwrap_or((reference, ""));
        let path = if file.is_empty() { from.to_path_buf() } else { from.parent().unwrap_or(Path::new("")).join(file) };
        self.lookup(&path, name)
    }

    fn lookup(&mut self, path: &Path, name: &str) -> Result<Item> {
        let key = (path.to_path_buf(), name.to_string());
        if let Some(it) = self.resolved.get(&key) {
            return Ok(it.clone());
        }
        if !self.loading.insert(key.clone()) {
            return Err(parse_err(format!("cyclic reference to {}#{name}", path.display())));
        }
        let result = self.lookup_uncached(path, name);
        self.loading.remove(&key);
        let item = result?;
        self.resolved.insert(key, item.clone());
        Ok(item)
    }

    fn lookup_uncached(&mut self, path: &Path, name: &str) -> Result<Item> {
        let unresolved = || Error::UnresolvedRef(format!("{}#{name}", path.display()));
        let root = self.file(path).map_err(|e| match e {
            Error::Io(_) => unresolved(),
            e => e,
        })?;
        if name.is_empty() {
            return self.value(&root, path);
        }
        let v = root
            .get("items")
            .filter(|_| root.get("$kind").and_then(Value::as_str) == Some("bundle"))
            .and_then(|items| items.get(name))
            .ok_or_else(unresolved)?;
        self.value(v, path)
    }

    /// Parses a value found in `file`.
    pub fn value(&mut self, v: &Value, file: &Path) -> Result<Item> {
        if let Some(r) = v.as_str() {
            return self.resolve(r, file);
        }
        let obj = v.as_object().ok_or_else(|| parse_err("expected an object or a reference"))?;
        let kind = obj.get("$kind").and_then(Value::as_str).ok_or_else(|| parse_err("missing `$kind`"))?;
        match kind {
            "lattice" => Ok(Item::Lattice(Arc::new(parse_lattice(obj)?))),
            "category" => Ok(Item::Category(Arc::new(parse_category(obj)?))),
            "presheaf" => Ok(Item::Presheaf(Arc::new(self.parse_presheaf(obj, file)?))),
            "morphism" => Ok(Item::Morphism(self.parse_morphism(obj, file)?)),
            "subobject" => {
                let ambient = self.presheaf(field(obj, "ambient", kind)?, file)?;
                let members = nested_map(field(obj, "members", kind)?, "members")?;
                Ok(Item::Subobject(subobject_from_names(ambient, &members)?))
            }
            "rule" => {
                let m = |ws: &mut Self, key: &str| ws.morphism(field(obj, key, kind)?, file);
                let (r, t_k, t_r, r_prime) = (m(self, "r")?, m(self, "t_K")?, m(self, "t_R")?, m(self, "r'")?);
                for (key, expect) in [("K", r.source()), ("R", r.target()), ("K'", t_k.target()), ("R'", r_prime.target())] {
                    if let Some(v) = obj.get(key) {
                        if &self.presheaf(v, file)? != expect {
                            return Err(Error::InvalidMorphism(key.into(), "object disagrees with the morphisms".into()));
                        }
                    }
                }
                Ok(Item::Rule(validate_rule(r, t_k, t_r, r_prime, &self.budget)?))
            }
            "host" => {
                let u = self.morphism(field(obj, "u", kind)?, file)?;
                let u_prime = self.morphism(field(obj, "u'", kind)?, file)?;
                if let Some(v) = obj.get("G_K") {
                    if &self.presheaf(v, file)? != u.target() {
                        return Err(Error::InvalidMorphism("u".into(), "target is not G_K".into()));
                    }
                }
                if u.target() != u_prime.source() {
                    return Err(Error::InvalidMorphism("u'".into(), "source is not G_K".into()));
                }
                Ok(Item::Host(HostInterface { u, u_prime }))
            }
            "cube" => {
                let edges = field(obj, "edges", kind)?.as_object().ok_or_else(|| parse_err("cube: `edges` must be an object"))?;
                let mut ms = Vec::with_capacity(12);
                for name in EDGE_NAMES {
                    let v = edges.get(name).ok_or_else(|| parse_err(format!("cube: missing edge `{name}`")))?;
                    ms.push(self.morphism(v, file)?);
                }
                let cube = Cube::new(ms.try_into().expect("twelve edges"))?;
                if let Some(objects) = obj.get("objects").and_then(Value::as_object) {
                    for (name, vertex) in VERTEX_NAMES.iter().zip(cube.vertices()) {
                        if let Some(v) = objects.get(*name) {
                            if &self.presheaf(v, file)? != vertex {
                                return Err(Error::NotCommutative(format!("vertex {name} disagrees with its edges")));
                            }
                        }
                    }
                }
                Ok(Item::Cube(Box::new(cube)))
            }
            "bundle" => {
                let items = field(obj, "items", kind)?.as_object().ok_or_else(|| parse_err("bundle: `items` must be an object"))?;
                let names: Vec<String> = items.keys().cloned().collect();
                let mut out = Vec::with_capacity(names.len());
                for name in names {
                    out.push((name.clone(), self.lookup(file, &name)?));
                }
                Ok(Item::Bundle(out))
            }
            other => Err(parse_err(format!("unknown kind `{other}`"))),
        }
    }

    fn expect<T>(&mut self, v: &Value, file: &Path, kind: &str, pick: impl FnOnce(Item) -> Option<T>) -> Result<T> {
        let item = self.value(v, file)?;
        let found = item.kind();
        pick(item).ok_or_else(|| parse_err(format!("expected a {kind}, found a {found}")))
    }

    pub fn lattice(&mut self, v: &Value, file: &Path) -> Result<Arc<HeytingAlgebra>> {
        self.expect(v, file, "lattice", |i| if let Item::Lattice(l) = i { Some(l) } else { None })
    }

    pub fn category(&mut self, v: &Value, file: &Path) -> Result<Arc<FiniteCategory>> {
        self.expect(v, file, "category", |i| if let Item::Category(c) = i { Some(c) } else { None })
    }

    pub fn presheaf(&mut self, v: &Value, file: &Path) -> Result<Arc<FuzzyPresheaf>> {
        self.expect(v, file, "presheaf", |i| if let Item::Presheaf(p) = i { Some(p) } else { None })
    }

    pub fn morphism(&mut self, v: &Value, file: &Path) -> Result<FuzzyMorphism> {
        self.expect(v, file, "morphism", |i| if let Item::Morphism(m) = i { Some(m) } else { None })
    }

    fn parse_presheaf(&mut self, obj: &Map<String, Value>, file: &Path) -> Result<FuzzyPresheaf> {
        let kind = "presheaf";
        let base = self.category(field(obj, "category", kind)?, file)?;
        let mut labels = Vec::with_capacity(base.object_count());
        let per_object = obj.get("lattices").and_then(Value::as_object);
        for o in 0..base.object_count() {
            let name = base.object_name(o);
            let v = match (per_object.and_then(|m| m.get(name)), obj.get("lattice")) {
                (Some(v), _) | (None, Some(v)) => v,
                (None, None) => return Err(parse_err(format!("presheaf: no lattice for `{name}`"))),
            };
            labels.push(self.lattice(v, file)?);
        }
        let carriers: Vec<(String, Vec<String>)> = field(obj, "carriers", kind)?
            .as_object()
            .ok_or_else(|| parse_err("presheaf: `carriers` must be an object"))?
            .iter()
            .map(|(o, elems)| Ok((o.clone(), str_list(elems, &format!("carriers.{o}"))?)))
            .collect::<Result<_>>()?;
        let actions = match obj.get("actions") {
            Some(v) => nested_map(v, "actions")?,
            None => Vec::new(),
        };
        let shape = Presheaf::from_named(base, &carriers, &actions)?;
        let membership = nested_map(field(obj, "membership", kind)?, "membership")?;
        FuzzyPresheaf::from_named(shape, labels, &membership)
    }

    fn parse_morphism(&mut self, obj: &Map<String, Value>, file: &Path) -> Result<FuzzyMorphism> {
        let kind = "morphism";
        let from = self.presheaf(field(obj, "from", kind)?, file)?;
        let to = self.presheaf(field(obj, "to", kind)?, file)?;
        let components = nested_map(field(obj, "components", kind)?, "components")?;
        FuzzyMorphism::from_named(from, to, &components)
    }
}

fn parse_lattice(obj: &Map<String, Value>) -> Result<HeytingAlgebra> {
    if let Some(atoms) = obj.get("powerset_of") {
        return HeytingAlgebra::powerset(&str_list(atoms, "powerset_of")?);
    }
    let elements = str_list(field(obj, "elements", "lattice")?, "elements")?;
    let order = match obj.get("order") {
        Some(v) => v
            .as_array()
            .ok_or_else(|| parse_err("order: expected an array of pairs"))?
            .iter()
            .map(|p| match str_list(p, "order")?.as_slice() {
                [a, b] => Ok((a.clone(), b.clone())),
                _ => Err(parse_err("order: expected pairs")),
            })
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    let mode = match obj.get("mode").and_then(Value::as_str).unwrap_or("hasse") {
        "hasse" => OrderMode::Hasse,
        "full" => OrderMode::Full,
        other => return Err(parse_err(format!("unknown order mode `{other}`"))),
    };
    HeytingAlgebra::new(&elements, &order, mode)
}

fn parse_category(obj: &Map<String, Value>) -> Result<FiniteCategory> {
    if let Some(kind) = obj.get("schema") {
        let kind = kind.as_str().ok_or_else(|| parse_err("schema: expected a string"))?;
        let param = |k: &str| obj.get("params").and_then(|p| p.get(k)).and_then(Value::as_u64).map(|v| v as usize);
        return FiniteCategory::schema(Schema::from_kind(kind, param("m"), param("n"))?);
    }
    let objects = str_list(field(obj, "objects", "category")?, "objects")?;
    let morphisms = field(obj, "morphisms", "category")?
        .as_array()
        .ok_or_else(|| parse_err("morphisms: expected an array"))?
        .iter()
        .map(|m| {
            let get = |k: &str| {
                m.get(k).and_then(Value::as_str).map(str::to_string).ok_or_else(|| parse_err(format!("morphism entry: missing `{k}`")))
            };
            Ok((get("id")?, get("dom")?, get("cod")?))
        })
        .collect::<Result<Vec<_>>>()?;
    let identities = match obj.get("identities") {
        Some(v) => str_map(v, "identities")?,
        None => Vec::new(),
    };
    let compose = match obj.get("compose") {
        Some(v) => v
            .as_array()
            .ok_or_else(|| parse_err("compose: expected an array"))?
            .iter()
            .map(|t| match str_list(t, "compose")?.as_slice() {
                [g, f, gf] => Ok((g.clone(), f.clone(), gf.clone())),
                _ => Err(parse_err("compose: expected triples")),
            })
            .collect::<Result<Vec<_>>>()?,
        None => Vec::new(),
    };
    FiniteCategory::validate(&RawCategory { objects, morphisms, identities, compose })
}

pub fn subobject_from_names(ambient: Arc<FuzzyPresheaf>, members: &[(String, Vec<(String, String)>)]) -> Result<Subobject> {
    let base = ambient.base().clone();
    let mut table: Vec<Vec<Option<usize>>> = (0..base.object_count()).map(|o| vec![None; ambient.size(o)]).collect();
    for (o, elems) in members {
        let o = base.object(o)?;
        for (x, l) in elems {
            table[o][ambient.element(o, x)?] = Some(ambient.label(o).element(l)?);
        }
    }
    Subobject::new(ambient, table)
}

/// A bundle from named items, sorted by name.
pub fn bundle(items: impl IntoIterator<Item = (String, Item)>) -> Item {
    let sorted: BTreeMap<String, Item> = items.into_iter().collect();
    Item::Bundle(sorted.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presheaf::uniform_labels;
    use crate::random;

    fn roundtrip(item: &Item) -> Item {
        let text = item.to_pretty();
        let mut ws = Workspace::default();
        let back = ws.parse_str(&text, Path::new("mem.json")).unwrap();
        assert_eq!(back.to_pretty(), text);
        back
    }

    #[test]
    fn lattices_and_categories_roundtrip() {
        for l in [HeytingAlgebra::c3(), HeytingAlgebra::powerset(&["a", "b"]).unwrap(), HeytingAlgebra::unit()] {
            let item = Item::Lattice(Arc::new(l));
            assert_eq!(roundtrip(&item), item);
        }
        for s in [Schema::Graph, Schema::Hypergraph { m: 2, n: 1 }, Schema::TernaryConnection] {
            let item = Item::Category(Arc::new(FiniteCategory::schema(s).unwrap()));
            assert_eq!(roundtrip(&item), item);
        }
        let cat = FiniteCategory::validate(&FiniteCategory::graph().to_raw()).unwrap();
        assert!(cat.schema_kind().is_none());
        let item = Item::Category(Arc::new(cat));
        assert_eq!(roundtrip(&item), item);
    }

    #[test]
    fn presheaves_morphisms_and_bundles_roundtrip() {
        let base = Arc::new(FiniteCategory::graph());
        let labels = uniform_labels(&base, HeytingAlgebra::c3());
        let mut rng = random::rng(4);
        let a = Arc::new(random::fuzzy(&mut rng, &base, &labels, 3));
        let f = random::morphism_into(&mut rng, &a, 2);
        let s = random::subobject(&mut rng, &a, false);
        for item in [Item::Presheaf(a.clone()), Item::Morphism(f.clone()), Item::Subobject(s.clone())] {
            assert_eq!(roundtrip(&item), item);
        }
        let b = bundle([
            ("A".to_string(), Item::Presheaf(a.clone())),
            ("c3".to_string(), Item::Lattice(labels[0].clone())),
            ("f".to_string(), Item::Morphism(f)),
        ]);
        let text = b.to_pretty();
        assert!(text.contains("\"to\": \"#A\""));
        assert!(text.contains("\"E\": \"#c3\""));
        assert_eq!(roundtrip(&b), b);
    }

    #[test]
    fn references_across_files() {
        let dir = std::env::temp_dir().join(format!("quasikit-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        std::fs::write(dir.join("lat.json"), r#"{"$kind": "lattice", "elements": ["lo", "hi"], "order": [["lo", "hi"]]}"#).unwrap();
        std::fs::write(
            dir.join("set.json"),
            r##"{"$kind": "bundle", "items": {
                "pt": {"$kind": "category", "schema": "terminal"},
                "X": {"$kind": "presheaf", "category": "#pt", "lattice": "lat.json",
                      "carriers": {"*": ["a", "b"]}, "membership": {"*": {"a": "hi", "b": "lo"}}},
                "bad": {"$kind": "presheaf", "category": "#nope", "lattice": "lat.json",
                      "carriers": {"*": []}, "membership": {"*": {}}}
            }}"##,
        )
        .unwrap();
        let mut ws = Workspace::default();
        let x = ws.resolve("set.json#X", &dir.join("here.json")).unwrap();
        let Item::Presheaf(x) = x else { panic!("presheaf expected") };
        assert_eq!(x.membership_name(0, 0), "hi");
        assert!(matches!(ws.resolve("set.json#bad", &dir.join("here.json")), Err(Error::UnresolvedRef(_))));
        assert!(matches!(ws.resolve("missing.json", &dir.join("here.json")), Err(Error::UnresolvedRef(_))));
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn malformed_input_is_a_parse_error() {
        let mut ws = Workspace::default();
        for text in ["{", r#"{"elements": []}"#, r#"{"$kind": "widget"}"#, r#"{"$kind": "lattice"}"#] {
            let err = ws.parse_str(text, Path::new("x.json")).unwrap_err();
            assert_eq!(err.code(), "ParseError", "{text}");
        }
        let m3 = r#"{"$kind": "lattice", "elements": ["0","a","b","c","1"],
            "order": [["0","a"],["0","b"],["0","c"],["a","1"],["b","1"],["c","1"]]}"#;
        assert_eq!(ws.parse_str(m3, Path::new("m3.json")).unwrap_err().code(), "NotResiduated");
    }
}
