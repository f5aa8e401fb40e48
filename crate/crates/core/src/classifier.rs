//! Sieves and the regular-subobject classifier.
//!
//! A sieve at `i` is a set of morphisms out of `i` (in the stored, as-drawn
//! category) closed under postcomposition. The sieves at `i` form `Ω(i)`,
//! all at full membership; `True` picks the maximal sieve.

use std::collections::BTreeSet;
use std::ops::ControlFlow;
use std::sync::Arc;

use crate::category::{FiniteCategory, MorId, ObjId};
use crate::error::{Error, Result};
use crate::homs::{Budget, HomSearch};
use crate::limits;
use crate::presheaf::{Elem, FuzzyMorphism, FuzzyPresheaf, LabelFamily, Presheaf, Subobject};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Sieve {
    pub at: ObjId,
    pub members: BTreeSet<MorId>,
}

impl Sieve {
    /// `{m1,m2}` with sorted morphism names.
    pub fn name(&self, base: &FiniteCategory) -> String {
        let mut names: Vec<&str> = self.members.iter().map(|&m| base.morphism_name(m)).collect();
        names.sort();
        format!("{{{}}}", names.join(","))
    }

    pub fn is_maximal(&self, base: &FiniteCategory) -> bool {
        self.members.contains(&base.identity(self.at))
    }

    /// The sieve along `f : at → k`: `{ι out of k : ι ∘ f ∈ self}`.
    pub fn along(&self, base: &FiniteCategory, f: MorId) -> Sieve {
        let k = base.cod(f);
        let members =
            base.out_of(k).into_iter().filter(|&iota| self.members.contains(&base.compose(iota, f).expect("composable"))).collect();
        Sieve { at: k, members }
    }
}

fn is_closed(base: &FiniteCategory, members: &BTreeSet<MorId>) -> bool {
    members
        .iter()
        .all(|&iota| base.out_of(base.cod(iota)).into_iter().all(|g| members.contains(&base.compose(g, iota).expect("composable"))))
}

/// All sieves at `i`, ordered by name.
pub fn enumerate_sieves(base: &FiniteCategory, i: ObjId, budget: &Budget) -> Result<Vec<Sieve>> {
    let out = base.out_of(i);
    if out.len() >= 63 {
        return Err(Error::EnumerationCap(budget.max()));
    }
    let mut sieves = Vec::new();
    for mask in 0u64..(1u64 << out.len()) {
        budget.tick()?;
        let members: BTreeSet<MorId> = out.iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, &m)| m).collect();
        if is_closed(base, &members) {
            sieves.push(Sieve { at: i, members });
        }
    }
    sieves.sort_by_cached_key(|s| s.name(base));
    Ok(sieves)
}

/// The classifying object: sieves at every object, everything at `⊤`.
pub fn omega(base: &Arc<FiniteCategory>, labels: &LabelFamily, budget: &Budget) -> Result<FuzzyPresheaf> {
    let n = base.object_count();
    let sieves: Vec<Vec<Sieve>> = (0..n).map(|i| enumerate_sieves(base, i, budget)).collect::<Result<_>>()?;
    let carriers = sieves.iter().map(|row| row.iter().map(|s| s.name(base)).collect()).collect();
    let actions = (0..base.morphisms().len())
        .map(|f| {
            let k = base.cod(f);
            sieves[base.dom(f)]
                .iter()
                .map(|s| {
                    let t = s.along(base, f);
                    sieves[k].iter().position(|u| *u == t).expect("pulled back sieves are sieves")
                })
                .collect()
        })
        .collect();
    let shape = Presheaf::new(base.clone(), carriers, actions)?;
    FuzzyPresheaf::crisp(shape, labels.clone())
}

/// Index of the maximal sieve in `omega(i)`.
pub fn maximal_sieve(base: &FiniteCategory, omega: &FuzzyPresheaf, i: ObjId) -> Elem {
    let name = Sieve { at: i, members: base.out_of(i).into_iter().collect() }.name(base);
    omega.element(i, &name).expect("the maximal sieve is in omega")
}

/// `Ω`, the terminal object and `True : 1 → Ω`.
#[derive(Debug, Clone)]
pub struct Classifier {
    pub omega: Arc<FuzzyPresheaf>,
    pub terminal: Arc<FuzzyPresheaf>,
    pub true_arrow: FuzzyMorphism,
}

impl Classifier {
    pub fn new(base: &Arc<FiniteCategory>, labels: &LabelFamily, budget: &Budget) -> Result<Classifier> {
        let omega = Arc::new(omega(base, labels, budget)?);
        let terminal = Arc::new(limits::terminal(base, labels));
        let comps = (0..base.object_count()).map(|i| vec![maximal_sieve(base, &omega, i)]).collect();
        let true_arrow = FuzzyMorphism::new(terminal.clone(), omega.clone(), comps)?;
        Ok(Classifier { omega, terminal, true_arrow })
    }

    pub fn for_object(a: &FuzzyPresheaf, budget: &Budget) -> Result<Classifier> {
        Classifier::new(a.base(), a.labels(), budget)
    }

    /// `χ(b) = {ι : B(ι)(b) ∈ A}` for a regular subobject `A ⊆ B`.
    pub fn chi(&self, sub: &Subobject) -> Result<FuzzyMorphism> {
        if !sub.is_regular() {
            return Err(Error::NotRegular);
        }
        let b = sub.ambient();
        let base = b.base().clone();
        let comps = (0..base.object_count())
            .map(|i| {
                (0..b.size(i))
                    .map(|x| {
                        let members = base.out_of(i).into_iter().filter(|&iota| sub.contains(base.cod(iota), b.act(iota, x))).collect();
                        let name = Sieve { at: i, members }.name(&base);
                        self.omega.element(i, &name)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        FuzzyMorphism::new(b.clone(), self.omega.clone(), comps)
    }

    /// Pulls `True` back along `k : B → Ω`: the elements sent to maximal
    /// sieves, at their own membership.
    pub fn pullback_true(&self, k: &FuzzyMorphism) -> Result<Subobject> {
        if k.target() != &self.omega {
            return Err(Error::ObjectMismatch);
        }
        let b = k.source();
        let base = b.base().clone();
        let members = (0..base.object_count())
            .map(|i| {
                let top = maximal_sieve(&base, &self.omega, i);
                (0..b.size(i)).map(|x| (k.apply(i, x) == top).then(|| b.membership(i, x))).collect()
            })
            .collect();
        Subobject::new(b.clone(), members)
    }

    /// Number of morphisms `B → Ω` whose `True`-pullback is `sub`, and the
    /// total number of morphisms `B → Ω` examined.
    pub fn classifying_maps(&self, sub: &Subobject, budget: &Budget) -> Result<(u64, u64)> {
        let b = sub.ambient();
        let mut matching = 0;
        let mut total = 0;
        let mut err = None;
        HomSearch::fuzzy(b, &self.omega).for_each(budget, |c| {
            total += 1;
            let k = match FuzzyMorphism::new(b.clone(), self.omega.clone(), c.clone()).and_then(|k| self.pullback_true(&k)) {
                Ok(s) => s,
                Err(e) => {
                    err = Some(e);
                    return ControlFlow::Break(());
                }
            };
            if k == *sub {
                matching += 1;
            }
            ControlFlow::Continue(())
        })?;
        match err {
            Some(e) => Err(e),
            None => Ok((matching, total)),
        }
    }

    /// Decides whether the square `A → 1`, `m : A → B`, `χ`, `True` is a
    /// pullback, where `χ` classifies the image of the mono `m` with ambient
    /// memberships.
    pub fn square_is_pullback(&self, m: &FuzzyMorphism, budget: &Budget) -> Result<bool> {
        let sub = Subobject::canonical(m)?.regularized();
        let chi = self.chi(&sub)?;
        let bang = limits::to_terminal(m.source(), &self.terminal)?;
        let diagram = limits::Diagram::Pullback(chi, self.true_arrow.clone());
        let cone = limits::Cone { apex: m.source().clone(), legs: vec![m.clone(), bang] };
        Ok(limits::verify_universal(&diagram, &cone, budget)?.holds)
    }
}
