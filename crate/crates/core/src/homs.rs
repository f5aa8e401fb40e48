//! Enumeration of natural transformations between finite presheaves.
//!
//! Search is object-by-object backtracking: assigning an element forces its
//! images along every outgoing morphism, and a trail undoes those forced
//! assignments on backtrack. Every enumerating routine in the crate shares a
//! [`Budget`] so brute force fails loudly instead of hanging.

use std::cell::Cell;
use std::ops::ControlFlow;

use crate::category::{MorId, ObjId};
use crate::error::{Error, Result};
use crate::presheaf::{Components, Elem, FuzzyPresheaf, Presheaf};

pub const DEFAULT_MAX_ENUM: u64 = 1_000_000;

/// Counts candidates explored and stops at a fixed cap.
#[derive(Debug)]
pub struct Budget {
    max: u64,
    used: Cell<u64>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget::new(DEFAULT_MAX_ENUM)
    }
}

impl Budget {
    pub fn new(max: u64) -> Budget {
        Budget { max, used: Cell::new(0) }
    }

    pub fn unlimited() -> Budget {
        Budget::new(u64::MAX)
    }

    pub fn tick(&self) -> Result<()> {
        self.spend(1)
    }

    pub fn spend(&self, n: u64) -> Result<()> {
        let used = self.used.get().saturating_add(n);
        self.used.set(used);
        if used > self.max {
            Err(Error::EnumerationCap(self.max))
        } else {
            Ok(())
        }
    }

    pub fn used(&self) -> u64 {
        self.used.get()
    }

    pub fn max(&self) -> u64 {
        self.max
    }
}

/// Backtracking enumerator for natural transformations `src → dst`.
#[derive(Clone)]
pub struct HomSearch<'a> {
    src: &'a Presheaf,
    dst: &'a Presheaf,
    /// `allowed[o][x][y]`: may `x ∈ src(o)` be sent to `y ∈ dst(o)`.
    allowed: Vec<Vec<Vec<bool>>>,
    order: Vec<(ObjId, Elem)>,
    out: Vec<Vec<MorId>>,
}

impl<'a> HomSearch<'a> {
    /// All natural transformations of the underlying presheaves.
    pub fn plain(src: &'a Presheaf, dst: &'a Presheaf) -> HomSearch<'a> {
        let base = src.base();
        let n = base.object_count();
        let allowed = (0..n).map(|o| vec![vec![true; dst.size(o)]; src.size(o)]).collect();
        let out: Vec<Vec<MorId>> = (0..n).map(|o| base.out_of(o).into_iter().filter(|&m| !base.is_identity(m)).collect()).collect();
        let mut objs: Vec<ObjId> = (0..n).collect();
        objs.sort_by_key(|&o| std::cmp::Reverse(out[o].len()));
        let order = objs.into_iter().flat_map(|o| (0..src.size(o)).map(move |x| (o, x))).collect();
        HomSearch { src, dst, allowed, order, out }
    }

    /// Fuzzy morphisms: additionally `α(x) ≤ β(y)`.
    pub fn fuzzy(src: &'a FuzzyPresheaf, dst: &'a FuzzyPresheaf) -> HomSearch<'a> {
        let mut s = HomSearch::plain(src.shape(), dst.shape());
        for o in 0..src.base().object_count() {
            let l = src.label(o);
            for x in 0..src.size(o) {
                for y in 0..dst.size(o) {
                    if !l.leq(src.membership(o, x), dst.membership(o, y)) {
                        s.allowed[o][x][y] = false;
                    }
                }
            }
        }
        s
    }

    /// Keeps only targets `y` of `x` with `keep(y)`.
    pub fn restrict(mut self, o: ObjId, x: Elem, keep: impl Fn(Elem) -> bool) -> Self {
        for (y, a) in self.allowed[o][x].iter_mut().enumerate() {
            if !keep(y) {
                *a = false;
            }
        }
        self
    }

    /// Forces `x ↦ y` (no solutions if that was already excluded).
    pub fn fix(self, o: ObjId, x: Elem, y: Elem) -> Self {
        self.restrict(o, x, |z| z == y)
    }

    /// Calls `visit` on every solution until it breaks.
    pub fn for_each(&self, budget: &Budget, mut visit: impl FnMut(&Components) -> ControlFlow<()>) -> Result<()> {
        let n = self.src.base().object_count();
        let mut assign: Vec<Vec<Option<Elem>>> = (0..n).map(|o| vec![None; self.src.size(o)]).collect();
        let mut trail = Vec::new();
        let mut comps: Components = (0..n).map(|o| vec![0; self.src.size(o)]).collect();
        self.search(0, &mut assign, &mut trail, &mut comps, budget, &mut visit).map(|_| ())
    }

    fn search(
        &self,
        k: usize,
        assign: &mut Vec<Vec<Option<Elem>>>,
        trail: &mut Vec<(ObjId, Elem)>,
        comps: &mut Components,
        budget: &Budget,
        visit: &mut impl FnMut(&Components) -> ControlFlow<()>,
    ) -> Result<ControlFlow<()>> {
        let Some(&(o, x)) = self.order[k..].iter().find(|&&(o, x)| assign[o][x].is_none()) else {
            for (o, row) in assign.iter().enumerate() {
                for (x, y) in row.iter().enumerate() {
                    comps[o][x] = y.expect("complete assignment");
                }
            }
            return Ok(visit(comps));
        };
        let next = k + 1;
        for y in 0..self.dst.size(o) {
            if !self.allowed[o][x][y] {
                continue;
            }
            budget.tick()?;
            let mark = trail.len();
            if self.assign(o, x, y, assign, trail) && self.search(next, assign, trail, comps, budget, visit)?.is_break() {
                return Ok(ControlFlow::Break(()));
            }
            for (po, px) in trail.drain(mark..) {
                assign[po][px] = None;
            }
        }
        Ok(ControlFlow::Continue(()))
    }

    /// Assigns and propagates along outgoing morphisms; false on conflict.
    fn assign(&self, o: ObjId, x: Elem, y: Elem, assign: &mut [Vec<Option<Elem>>], trail: &mut Vec<(ObjId, Elem)>) -> bool {
        let base = self.src.base();
        let mut stack = vec![(o, x, y)];
        while let Some((o, x, y)) = stack.pop() {
            match assign[o][x] {
                Some(z) if z == y => continue,
                Some(_) => return false,
                None => {}
            }
            if !self.allowed[o][x][y] {
                return false;
            }
            assign[o][x] = Some(y);
            trail.push((o, x));
            for &m in &self.out[o] {
                stack.push((base.cod(m), self.src.act(m, x), self.dst.act(m, y)));
            }
        }
        true
    }

    pub fn collect(&self, budget: &Budget) -> Result<Vec<Components>> {
        let mut all = Vec::new();
        self.for_each(budget, |c| {
            all.push(c.clone());
            ControlFlow::Continue(())
        })?;
        Ok(all)
    }

    pub fn count(&self, budget: &Budget) -> Result<u64> {
        self.count_up_to(u64::MAX, budget)
    }

    /// Counts solutions, stopping once `limit` are found.
    pub fn count_up_to(&self, limit: u64, budget: &Budget) -> Result<u64> {
        let mut n = 0;
        self.for_each(budget, |_| {
            n += 1;
            if n >= limit {
                ControlFlow::Break(())
            } else {
                ControlFlow::Continue(())
            }
        })?;
        Ok(n)
    }

    pub fn first(&self, budget: &Budget) -> Result<Option<Components>> {
        let mut found = None;
        self.for_each(budget, |c| {
            found = Some(c.clone());
            ControlFlow::Break(())
        })?;
        Ok(found)
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::category::FiniteCategory;
    use crate::presheaf::yoneda;

    fn brute_force(src: &Presheaf, dst: &Presheaf) -> u64 {
        let n = src.base().object_count();
        let slots: Vec<(ObjId, Elem)> = (0..n).flat_map(|o| (0..src.size(o)).map(move |x| (o, x))).collect();
        let mut count = 0;
        let mut comps: Components = (0..n).map(|o| vec![0; src.size(o)]).collect();
        fn rec(k: usize, slots: &[(ObjId, Elem)], src: &Presheaf, dst: &Presheaf, comps: &mut Components, count: &mut u64) {
            if k == slots.len() {
                if src.is_natural(dst, comps).is_ok() {
                    *count += 1;
                }
                return;
            }
            let (o, x) = slots[k];
            for y in 0..dst.size(o) {
                comps[o][x] = y;
                rec(k + 1, slots, src, dst, comps, count);
            }
        }
        rec(0, &slots, src, dst, &mut comps, &mut count);
        count
    }

    fn two_edges() -> Presheaf {
        let base = Arc::new(FiniteCategory::graph());
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        Presheaf::from_named(
            base,
            &[("E".into(), s(&["a", "b"])), ("V".into(), s(&["u", "v"]))],
            &[
                ("s".into(), vec![("a".into(), "u".into()), ("b".into(), "v".into())]),
                ("t".into(), vec![("a".into(), "v".into()), ("b".into(), "v".into())]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn counts_match_brute_force() {
        let base = Arc::new(FiniteCategory::graph());
        let g = two_edges();
        let e = base.object("E").unwrap();
        let ye = yoneda(&base, e);
        for (a, b) in [(&g, &g), (&ye, &g), (&g, &ye)] {
            let budget = Budget::default();
            assert_eq!(HomSearch::plain(a, b).count(&budget).unwrap(), brute_force(a, b));
        }
    }

    #[test]
    fn yoneda_picks_elements() {
        let base = Arc::new(FiniteCategory::graph());
        let g = two_edges();
        for o in 0..2 {
            let y = yoneda(&base, o);
            let n = HomSearch::plain(&y, &g).count(&Budget::default()).unwrap();
            assert_eq!(n as usize, g.size(o));
        }
    }

    #[test]
    fn budget_caps_enumeration() {
        let g = two_edges();
        let budget = Budget::new(2);
        assert_eq!(HomSearch::plain(&g, &g).count(&budget), Err(Error::EnumerationCap(2)));
    }

    #[test]
    fn fixing_prunes() {
        let g = two_edges();
        let e = g.base().object("E").unwrap();
        let all = HomSearch::plain(&g, &g).collect(&Budget::default()).unwrap();
        let fixed = HomSearch::plain(&g, &g).fix(e, 0, 1).collect(&Budget::default()).unwrap();
        assert_eq!(fixed.len(), all.iter().filter(|c| c[e][0] == 1).count());
    }
}
