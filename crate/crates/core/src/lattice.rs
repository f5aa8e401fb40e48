//! Finite Heyting algebras, fully tabulated at construction.
//!
//! Elements are opaque string tokens kept in lexicographic order; a
//! [`Label`] is an index into that order. Every law (lattice bounds,
//! residuation, modus ponens) is checked eagerly, so downstream code can
//! treat an [`HeytingAlgebra`] value as certified.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Index of an element inside one [`HeytingAlgebra`].
pub type Label = usize;

/// How the order pairs handed to [`HeytingAlgebra::new`] are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderMode {
    /// Covering pairs; the reflexive-transitive closure is computed.
    Hasse,
    /// The complete relation. Reflexive pairs may be omitted, but the
    /// relation must already be transitive.
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregate {
    Meet,
    Join,
}

/// Where an algebra came from; only used to pick a serialization form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeOrigin {
    Explicit,
    Powerset(Vec<String>),
}

#[derive(Clone)]
pub struct HeytingAlgebra {
    names: Vec<String>,
    index: HashMap<String, Label>,
    leq: Vec<Vec<bool>>,
    meet: Vec<Vec<Label>>,
    join: Vec<Vec<Label>>,
    imp: Vec<Vec<Label>>,
    top: Label,
    bottom: Label,
    origin: LatticeOrigin,
}

impl PartialEq for HeytingAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.names == other.names && self.leq == other.leq
    }
}

impl Eq for HeytingAlgebra {}

impl fmt::Debug for HeytingAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("HeytingAlgebra")
            .field("elements", &self.names)
            .field("top", &self.names[self.top])
            .field("bottom", &self.names[self.bottom])
            .finish()
    }
}

impl HeytingAlgebra {
    /// Validates a finite poset and tabulates meet, join and implication.
    pub fn new<S: AsRef<str>>(elements: &[S], order: &[(S, S)], mode: OrderMode) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::EmptyLattice);
        }
        let mut names: Vec<String> = elements.iter().map(|e| e.as_ref().to_string()).collect();
        names.sort();
        for w in names.windows(2) {
            if w[0] == w[1] {
                return Err(Error::Duplicate(w[0].clone()));
            }
        }
        let index: HashMap<String, Label> = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let n = names.len();
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for (a, b) in order {
            let ia = *index.get(a.as_ref()).ok_or_else(|| Error::UnknownElement(a.as_ref().to_string()))?;
            let ib = *index.get(b.as_ref()).ok_or_else(|| Error::UnknownElement(b.as_ref().to_string()))?;
            leq[ia][ib] = true;
        }
        match mode {
            OrderMode::Hasse => {
                for k in 0..n {
                    for i in 0..n {
                        if leq[i][k] {
                            for j in 0..n {
                                if leq[k][j] {
                                    leq[i][j] = true;
                                }
                            }
                        }
                    }
                }
            }
            OrderMode::Full => {
                for i in 0..n {
                    for j in 0..n {
                        for k in 0..n {
                            if leq[i][j] && leq[j][k] && !leq[i][k] {
                                return Err(Error::NotPoset(format!(
                                    "{} <= {} <= {} but not {} <= {}",
                                    names[i], names[j], names[k], names[i], names[k]
                                )));
                            }
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if leq[i][j] && leq[j][i] {
                    return Err(Error::NotPoset(format!("{} and {} are mutually below each other", names[i], names[j])));
                }
            }
        }
        Self::tabulate(names, index, leq, LatticeOrigin::Explicit)
    }

    fn tabulate(names: Vec<String>, index: HashMap<String, Label>, leq: Vec<Vec<bool>>, origin: LatticeOrigin) -> Result<Self> {
        let n = names.len();
        let greatest = |cands: &[Label]| -> Option<Label> { cands.iter().copied().find(|&c| cands.iter().all(|&d| leq[d][c])) };
        let least = |cands: &[Label]| -> Option<Label> { cands.iter().copied().find(|&c| cands.iter().all(|&d| leq[c][d])) };
        let mut meet = vec![vec![0; n]; n];
        let mut join = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                let lower: Vec<Label> = (0..n).filter(|&c| leq[c][a] && leq[c][b]).collect();
                let upper: Vec<Label> = (0..n).filter(|&c| leq[a][c] && leq[b][c]).collect();
                match (greatest(&lower), least(&upper)) {
                    (Some(m), Some(j)) => {
                        meet[a][b] = m;
                        join[a][b] = j;
                    }
                    _ => return Err(Error::NotLattice(names[a].clone(), names[b].clone())),
                }
            }
        }
        let all: Vec<Label> = (0..n).collect();
        let top = greatest(&all).ok_or_else(|| Error::NotLattice(names[0].clone(), names[0].clone()))?;
        let bottom = least(&all).ok_or_else(|| Error::NotLattice(names[0].clone(), names[0].clone()))?;

        let mut imp = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                let cands: Vec<Label> = (0..n).filter(|&c| leq[meet[a][c]][b]).collect();
                imp[a][b] = greatest(&cands).ok_or_else(|| Error::NotResiduated(names[a].clone(), names[b].clone()))?;
            }
        }

        let algebra = HeytingAlgebra { names, index, leq, meet, join, imp, top, bottom, origin };
        algebra.check_laws()?;
        Ok(algebra)
    }

    /// Residuation and modus ponens over every triple / pair.
    fn check_laws(&self) -> Result<()> {
        let n = self.len();
        for a in 0..n {
            for b in 0..n {
                if self.meet(a, self.imp(a, b)) != self.meet(a, b) {
                    return Err(Error::Internal(format!("modus ponens fails at ({}, {})", self.names[a], self.names[b])));
                }
                for c in 0..n {
                    if self.leq(self.meet(a, b), c) != self.leq(a, self.imp(b, c)) {
                        return Err(Error::NotResiduated(self.names[b].clone(), self.names[c].clone()));
                    }
                }
            }
        }
        Ok(())
    }

    /// The powerset of `ground` ordered by inclusion. Elements are named
    /// `{a,b}` with sorted members; the empty set is `{}`.
    pub fn powerset<S: AsRef<str>>(ground: &[S]) -> Result<Self> {
        let mut atoms: Vec<String> = ground.iter().map(|g| g.as_ref().to_string()).collect();
        atoms.sort();
        atoms.dedup();
        if atoms.len() > 10 {
            return Err(Error::BadParams("powerset lattices are limited to 10 atoms".into()));
        }
        let size = 1usize << atoms.len();
        let subset_name = |mask: usize| -> String {
            let members: Vec<&str> = atoms.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, a)| a.as_str()).collect();
            format!("{{{}}}", members.join(","))
        };
        let mut named: Vec<(String, usize)> = (0..size).map(|m| (subset_name(m), m)).collect();
        named.sort();
        let names: Vec<String> = named.iter().map(|(n, _)| n.clone()).collect();
        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        let leq = named.iter().map(|(_, a)| named.iter().map(|(_, b)| a & !b == 0).collect()).collect();
        Self::tabulate(names, index, leq, LatticeOrigin::Powerset(atoms))
    }

    /// A finite chain listed from bottom to top.
    pub fn chain<S: AsRef<str>>(elements: &[S]) -> Result<Self> {
        let pairs: Vec<(&str, &str)> = elements.windows(2).map(|w| (w[0].as_ref(), w[1].as_ref())).collect();
        let elems: Vec<&str> = elements.iter().map(|e| e.as_ref()).collect();
        Self::new(&elems, &pairs, OrderMode::Hasse)
    }

    /// The three-element chain `0 < 1/2 < 1`.
    pub fn c3() -> Self {
        Self::chain(&["0", "1/2", "1"]).expect("C3 is a chain")
    }

    /// The one-element algebra, whose only element is `*`.
    pub fn unit() -> Self {
        Self::chain(&["*"]).expect("singleton is a chain")
    }

    pub fn boolean() -> Self {
        Self::chain(&["0", "1"]).expect("two-element chain")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, a: Label) -> &str {
        &self.names[a]
    }

    pub fn element(&self, name: &str) -> Result<Label> {
        self.index.get(name).copied().ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    pub fn origin(&self) -> &LatticeOrigin {
        &self.origin
    }

    pub fn top(&self) -> Label {
        self.top
    }

    pub fn bottom(&self) -> Label {
        self.bottom
    }

    pub fn leq(&self, a: Label, b: Label) -> bool {
        self.leq[a][b]
    }

    pub fn meet(&self, a: Label, b: Label) -> Label {
        self.meet[a][b]
    }

    pub fn join(&self, a: Label, b: Label) -> Label {
        self.join[a][b]
    }

    /// Relative pseudo-complement `a => b`.
    pub fn imp(&self, a: Label, b: Label) -> Label {
        self.imp[a][b]
    }

    /// `imp` on element names.
    pub fn imp_named(&self, a: &str, b: &str) -> Result<&str> {
        let r = self.imp(self.element(a)?, self.element(b)?);
        Ok(self.name(r))
    }

    /// Meet or join of an arbitrary subset; the empty meet is top and the
    /// empty join is bottom.
    pub fn aggregate<I: IntoIterator<Item = Label>>(&self, kind: Aggregate, subset: I) -> Label {
        match kind {
            Aggregate::Meet => subset.into_iter().fold(self.top, |acc, x| self.meet(acc, x)),
            Aggregate::Join => subset.into_iter().fold(self.bottom, |acc, x| self.join(acc, x)),
        }
    }

    pub fn aggregate_named(&self, kind: Aggregate, subset: &[&str]) -> Result<&str> {
        let labels = subset.iter().map(|s| self.element(s)).collect::<Result<Vec<_>>>()?;
        Ok(self.name(self.aggregate(kind, labels)))
    }

    /// Elements below `a`, in label order.
    pub fn below(&self, a: Label) -> Vec<Label> {
        (0..self.len()).filter(|&x| self.leq[x][a]).collect()
    }

    /// Covering pairs of the order, the compact form used for serialization.
    pub fn hasse_pairs(&self) -> Vec<(Label, Label)> {
        let n = self.len();
        let mut out = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a != b && self.leq[a][b] && !(0..n).any(|c| c != a && c != b && self.leq[a][c] && self.leq[c][b]) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// The down-set `{x : x <= d}`, revalidated as a Heyting algebra with top `d`.
    pub fn downset(&self, d: Label) -> Result<HeytingAlgebra> {
        let keep = self.below(d);
        let names: Vec<&str> = keep.iter().map(|&x| self.name(x)).collect();
        let mut pairs = Vec::new();
        for &a in &keep {
            for &b in &keep {
                if self.leq[a][b] {
                    pairs.push((self.name(a), self.name(b)));
                }
            }
        }
        HeytingAlgebra::new(&names, &pairs, OrderMode::Full)
    }

    pub fn downset_named(&self, d: &str) -> Result<HeytingAlgebra> {
        self.downset(self.element(d)?)
    }
}
