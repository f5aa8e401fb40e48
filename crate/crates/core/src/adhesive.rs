//! Binary unions of regular subobjects, commutative cubes and sampled Van
//! Kampen checks.
//!
//! Cube vertices are named as in the usual picture: bottom face `B, A, C, D`
//! (a span `A ← B → C` with its pushout `D`), top face `F, E, G, H`, and
//! vertical edges `F → B`, `E → A`, `G → C`, `H → D`. An edge `XY` goes from
//! `X` to `Y`.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::classifier;
use crate::error::{Error, Result};
use crate::homs::Budget;
use crate::limits::{self, Cone, Diagram};
use crate::presheaf::{fuzzy_representable, Components, FuzzyMorphism, FuzzyPresheaf, MonoKind, Subobject};
use crate::random;

/// The union of two regular subobjects with the mediator it is the image of.
#[derive(Debug, Clone)]
pub struct Union {
    pub subobject: Subobject,
    /// `h : P → C` out of the pushout of the pullback.
    pub mediator: FuzzyMorphism,
    pub pushout: Cone,
}

/// The pushout of the pullback of two regular subobjects, mapped back into
/// their common ambient.
pub fn regular_union(f: &Subobject, g: &Subobject) -> Result<Union> {
    if !f.is_regular() || !g.is_regular() {
        return Err(Error::NotRegular);
    }
    if f.ambient() != g.ambient() {
        return Err(Error::ObjectMismatch);
    }
    let (mf, mg) = (f.inclusion(), g.inclusion());
    let pb = limits::pullback(&mf, &mg)?;
    let po = limits::pushout(&pb.legs[0], &pb.legs[1])?;
    let mediator = induced(&po, &[&mf, &mg])?;
    let subobject = Subobject::canonical(&mediator)?;
    Ok(Union { subobject, mediator, pushout: po })
}

/// The morphism out of a colimit induced by a compatible cocone `legs`.
pub fn induced(colimit: &Cone, legs: &[&FuzzyMorphism]) -> Result<FuzzyMorphism> {
    let apex = &colimit.apex;
    let target = legs[0].target();
    let n = apex.base().object_count();
    let mut table: Vec<Vec<Option<usize>>> = (0..n).map(|o| vec![None; apex.size(o)]).collect();
    for (q, t) in colimit.legs.iter().zip(legs) {
        for o in 0..n {
            for x in 0..q.source().size(o) {
                let y = t.apply(o, x);
                match table[o][q.apply(o, x)].replace(y) {
                    Some(prev) if prev != y => {
                        return Err(Error::NotCommutative("cocone legs disagree on a class".into()));
                    }
                    _ => {}
                }
            }
        }
    }
    let comps = table
        .into_iter()
        .map(|row| row.into_iter().map(|y| y.ok_or_else(|| Error::Internal("colimit element outside every leg".into()))).collect())
        .collect::<Result<Components>>()?;
    FuzzyMorphism::new(apex.clone(), target.clone(), comps)
}

/// The morphism into a pullback induced by a compatible pair of legs.
fn induced_into(limit: &Cone, legs: &[&FuzzyMorphism]) -> Result<FuzzyMorphism> {
    let source = legs[0].source();
    let n = source.base().object_count();
    let comps = (0..n)
        .map(|o| {
            (0..source.size(o))
                .map(|x| {
                    (0..limit.apex.size(o))
                        .find(|&y| limit.legs.iter().zip(legs).all(|(p, t)| p.apply(o, y) == t.apply(o, x)))
                        .ok_or_else(|| Error::NotCommutative("legs do not meet in the pullback".into()))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Components>>()?;
    FuzzyMorphism::new(source.clone(), limit.apex.clone(), comps)
}

#[derive(Debug, Clone)]
pub struct Cube {
    pub a: Arc<FuzzyPresheaf>,
    pub b: Arc<FuzzyPresheaf>,
    pub c: Arc<FuzzyPresheaf>,
    pub d: Arc<FuzzyPresheaf>,
    pub e: Arc<FuzzyPresheaf>,
    pub f: Arc<FuzzyPresheaf>,
    pub g: Arc<FuzzyPresheaf>,
    pub h: Arc<FuzzyPresheaf>,
    pub ba: FuzzyMorphism,
    pub bc: FuzzyMorphism,
    pub ad: FuzzyMorphism,
    pub cd: FuzzyMorphism,
    pub fe: FuzzyMorphism,
    pub fg: FuzzyMorphism,
    pub eh: FuzzyMorphism,
    pub gh: FuzzyMorphism,
    pub fb: FuzzyMorphism,
    pub ea: FuzzyMorphism,
    pub gc: FuzzyMorphism,
    pub hd: FuzzyMorphism,
}

/// Edge names in a fixed order, matching [`Cube::edges`].
pub const EDGE_NAMES: [&str; 12] = ["BA", "BC", "AD", "CD", "FE", "FG", "EH", "GH", "FB", "EA", "GC", "HD"];

pub const VERTEX_NAMES: [&str; 8] = ["A", "B", "C", "D", "E", "F", "G", "H"];

impl Cube {
    /// Assembles a cube from its twelve edges and checks all six faces.
    pub fn new(edges: [FuzzyMorphism; 12]) -> Result<Cube> {
        let [ba, bc, ad, cd, fe, fg, eh, gh, fb, ea, gc, hd] = edges;
        let cube = Cube {
            a: ba.target().clone(),
            b: ba.source().clone(),
            c: bc.target().clone(),
            d: ad.target().clone(),
            e: fe.target().clone(),
            f: fe.source().clone(),
            g: fg.target().clone(),
            h: eh.target().clone(),
            ba,
            bc,
            ad,
            cd,
            fe,
            fg,
            eh,
            gh,
            fb,
            ea,
            gc,
            hd,
        };
        cube.check_shape()?;
        Ok(cube)
    }

    pub fn edges(&self) -> [&FuzzyMorphism; 12] {
        [&self.ba, &self.bc, &self.ad, &self.cd, &self.fe, &self.fg, &self.eh, &self.gh, &self.fb, &self.ea, &self.gc, &self.hd]
    }

    pub fn vertices(&self) -> [&Arc<FuzzyPresheaf>; 8] {
        [&self.a, &self.b, &self.c, &self.d, &self.e, &self.f, &self.g, &self.h]
    }

    fn check_shape(&self) -> Result<()> {
        let ends = |m: &FuzzyMorphism, x: &Arc<FuzzyPresheaf>, y: &Arc<FuzzyPresheaf>| m.source() == x && m.target() == y;
        let typed = ends(&self.bc, &self.b, &self.c)
            && ends(&self.ad, &self.a, &self.d)
            && ends(&self.cd, &self.c, &self.d)
            && ends(&self.fg, &self.f, &self.g)
            && ends(&self.eh, &self.e, &self.h)
            && ends(&self.gh, &self.g, &self.h)
            && ends(&self.fb, &self.f, &self.b)
            && ends(&self.ea, &self.e, &self.a)
            && ends(&self.gc, &self.g, &self.c)
            && ends(&self.hd, &self.h, &self.d);
        if !typed {
            return Err(Error::NotCommutative("edges do not fit the cube".into()));
        }
        let square = |name: &str, p: (&FuzzyMorphism, &FuzzyMorphism), q: (&FuzzyMorphism, &FuzzyMorphism)| -> Result<()> {
            let left = p.0.then(p.1)?;
            let right = q.0.then(q.1)?;
            if left.components() != right.components() {
                return Err(Error::NotCommutative(format!("face {name}")));
            }
            Ok(())
        };
        square("BACD", (&self.ba, &self.ad), (&self.bc, &self.cd))?;
        square("FEGH", (&self.fe, &self.eh), (&self.fg, &self.gh))?;
        square("FBAE", (&self.fb, &self.ba), (&self.fe, &self.ea))?;
        square("FBCG", (&self.fb, &self.bc), (&self.fg, &self.gc))?;
        square("EADH", (&self.ea, &self.ad), (&self.eh, &self.hd))?;
        square("GCDH", (&self.gc, &self.cd), (&self.gh, &self.hd))?;
        Ok(())
    }

    pub fn bottom_is_pushout(&self, budget: &Budget) -> Result<bool> {
        let cocone = Cone { apex: self.d.clone(), legs: vec![self.ad.clone(), self.cd.clone()] };
        limits::is_universal(&Diagram::Pushout(self.ba.clone(), self.bc.clone()), &cocone, budget)
    }

    pub fn top_is_pushout(&self, budget: &Budget) -> Result<bool> {
        let cocone = Cone { apex: self.h.clone(), legs: vec![self.eh.clone(), self.gh.clone()] };
        limits::is_universal(&Diagram::Pushout(self.fe.clone(), self.fg.clone()), &cocone, budget)
    }

    /// Faces `FBAE` and `FBCG`.
    pub fn back_pullbacks(&self, budget: &Budget) -> Result<(bool, bool)> {
        let fbae = Cone { apex: self.f.clone(), legs: vec![self.fb.clone(), self.fe.clone()] };
        let fbcg = Cone { apex: self.f.clone(), legs: vec![self.fb.clone(), self.fg.clone()] };
        Ok((
            limits::is_universal(&Diagram::Pullback(self.ba.clone(), self.ea.clone()), &fbae, budget)?,
            limits::is_universal(&Diagram::Pullback(self.bc.clone(), self.gc.clone()), &fbcg, budget)?,
        ))
    }

    /// Faces `EADH` and `GCDH`.
    pub fn front_pullbacks(&self, budget: &Budget) -> Result<(bool, bool)> {
        let eadh = Cone { apex: self.e.clone(), legs: vec![self.ea.clone(), self.eh.clone()] };
        let gcdh = Cone { apex: self.g.clone(), legs: vec![self.gc.clone(), self.gh.clone()] };
        Ok((
            limits::is_universal(&Diagram::Pullback(self.ad.clone(), self.hd.clone()), &eadh, budget)?,
            limits::is_universal(&Diagram::Pullback(self.cd.clone(), self.hd.clone()), &gcdh, budget)?,
        ))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CubeReport {
    pub back_pullbacks: (bool, bool),
    pub bottom_pushout: bool,
    pub top_pushout: bool,
    pub front_pullbacks: (bool, bool),
    /// The biconditional, when the back faces are pullbacks and the bottom
    /// is a pushout; `None` otherwise.
    pub vk: Option<bool>,
    /// The implication from front pullbacks to a top pushout, under the
    /// same hypotheses.
    pub stability: Option<bool>,
}

pub fn check_cube(cube: &Cube, budget: &Budget) -> Result<CubeReport> {
    cube.check_shape()?;
    let back = cube.back_pullbacks(budget)?;
    let bottom = cube.bottom_is_pushout(budget)?;
    let top = cube.top_is_pushout(budget)?;
    let front = cube.front_pullbacks(budget)?;
    let hypotheses = back.0 && back.1 && bottom;
    let fronts = front.0 && front.1;
    Ok(CubeReport {
        back_pullbacks: back,
        bottom_pushout: bottom,
        top_pushout: top,
        front_pullbacks: front,
        vk: hypotheses.then_some(fronts == top),
        stability: hypotheses.then_some(!fronts || top),
    })
}

#[derive(Debug, Clone, Copy)]
pub struct ProbeConfig {
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Default)]
pub struct ProbeReport {
    /// Cubes whose hypotheses held and whose verdict was evaluated.
    pub cubes: usize,
    pub violations: Vec<String>,
    /// The span leg was not a regular mono, so violations are expected to
    /// be possible.
    pub diagnostic: bool,
}

/// Pushes out the span `A ←m– B –f→ C` (cube lettering) and checks the Van
/// Kampen property on sampled completing cubes.
///
/// Each sample draws a morphism `H → D` as a random subobject of `D × T` for
/// a test object `T`, builds the front faces and `F` as pullbacks, and
/// checks that the top face is a pushout. A second cube with the same back
/// faces replaces `H` by the pushout of the top span and checks that the
/// front faces are pullbacks.
pub fn rm_adhesivity_probe(m: &FuzzyMorphism, f: &FuzzyMorphism, config: ProbeConfig, budget: &Budget) -> Result<ProbeReport> {
    let kind = m.classify();
    if kind == MonoKind::NotMono {
        return Err(Error::NotMono);
    }
    let po = limits::pushout(m, f)?;
    let (ad, cd) = (po.legs[0].clone(), po.legs[1].clone());
    let d = po.apex.clone();
    let mut report = ProbeReport { diagnostic: kind != MonoKind::RegularMono, ..ProbeReport::default() };
    let pool = test_objects(&d, budget)?;
    let mut rng = random::rng(config.seed);
    for sample in 0..config.samples {
        let t = pool.choose(&mut rng).expect("nonempty pool");
        let hd = random_map_into(&mut rng, &d, t)?;
        for (family, cube) in completing_cubes(m, f, &ad, &cd, &hd)?.into_iter().enumerate() {
            let r = check_cube(&cube, budget)?;
            match r.vk {
                Some(true) => report.cubes += 1,
                Some(false) => {
                    report.cubes += 1;
                    report.violations.push(format!("sample {sample}, family {family}: {r:?}"));
                }
                None => report.violations.push(format!("sample {sample}, family {family}: hypotheses failed {r:?}")),
            }
        }
    }
    Ok(report)
}

fn test_objects(d: &Arc<FuzzyPresheaf>, budget: &Budget) -> Result<Vec<Arc<FuzzyPresheaf>>> {
    let base = d.base().clone();
    let labels = d.labels().clone();
    let one = Arc::new(limits::terminal(&base, &labels));
    let omega = Arc::new(classifier::omega(&base, &labels, budget)?);
    let mut pool = vec![one.clone(), d.clone(), omega];
    for i in 0..base.object_count() {
        let y = Arc::new(fuzzy_representable(&base, &labels, i, labels[i].top()));
        pool.push(limits::coproduct(&y, &one)?.apex);
        pool.push(y);
    }
    pool.push(limits::coproduct(&one, &one)?.apex);
    Ok(pool)
}

/// A random subobject of `D × T` (memberships anywhere below the product's),
/// projected to `D`.
fn random_map_into(rng: &mut impl Rng, d: &Arc<FuzzyPresheaf>, t: &Arc<FuzzyPresheaf>) -> Result<FuzzyMorphism> {
    let prod = limits::product(d, t)?;
    let regular = rng.gen_bool(0.5);
    let sub = random::subobject(rng, &prod.apex, regular);
    sub.inclusion().then(&prod.legs[0])
}

/// The two completing cubes described at [`rm_adhesivity_probe`].
fn completing_cubes(
    ba: &FuzzyMorphism,
    bc: &FuzzyMorphism,
    ad: &FuzzyMorphism,
    cd: &FuzzyMorphism,
    hd: &FuzzyMorphism,
) -> Result<Vec<Cube>> {
    let front_a = limits::pullback(ad, hd)?;
    let front_c = limits::pullback(cd, hd)?;
    let (ea, eh) = (front_a.legs[0].clone(), front_a.legs[1].clone());
    let (gc, gh) = (front_c.legs[0].clone(), front_c.legs[1].clone());
    let back = limits::pullback(ba, &ea)?;
    let (fb, fe) = (back.legs[0].clone(), back.legs[1].clone());
    let fg = induced_into(&front_c, &[&fb.then(bc)?, &fe.then(&eh)?])?;
    let first = Cube::new([
        ba.clone(),
        bc.clone(),
        ad.clone(),
        cd.clone(),
        fe.clone(),
        fg.clone(),
        eh,
        gh,
        fb.clone(),
        ea.clone(),
        gc.clone(),
        hd.clone(),
    ])?;
    let top = limits::pushout(&fe, &fg)?;
    let hd2 = induced(&top, &[&ea.then(ad)?, &gc.then(cd)?])?;
    let second =
        Cube::new([ba.clone(), bc.clone(), ad.clone(), cd.clone(), fe, fg, top.legs[0].clone(), top.legs[1].clone(), fb, ea, gc, hd2])?;
    Ok(vec![first, second])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::FiniteCategory;
    use crate::lattice::HeytingAlgebra;
    use crate::presheaf::{uniform_labels, Presheaf};

    fn path() -> Arc<FuzzyPresheaf> {
        let base = Arc::new(FiniteCategory::graph());
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        let shape = Presheaf::from_named(
            base.clone(),
            &[("V".into(), s(&["u", "v", "w"])), ("E".into(), s(&["a", "b"]))],
            &[
                ("s".into(), vec![("a".into(), "u".into()), ("b".into(), "v".into())]),
                ("t".into(), vec![("a".into(), "v".into()), ("b".into(), "w".into())]),
            ],
        )
        .unwrap();
        let labels = uniform_labels(&base, HeytingAlgebra::c3());
        Arc::new(
            FuzzyPresheaf::from_named(
                shape,
                labels,
                &[
                    ("V".into(), vec![("u".into(), "1".into()), ("v".into(), "1/2".into()), ("w".into(), "1".into())]),
                    ("E".into(), vec![("a".into(), "1/2".into()), ("b".into(), "0".into())]),
                ],
            )
            .unwrap(),
        )
    }

    #[test]
    fn union_of_overlapping_subgraphs() {
        let g = path();
        let left = Subobject::regular_from_names(g.clone(), &[("V", "u"), ("V", "v"), ("E", "a")]).unwrap();
        let right = Subobject::regular_from_names(g.clone(), &[("V", "v"), ("V", "w")]).unwrap();
        let u = regular_union(&left, &right).unwrap();
        assert_eq!(u.mediator.classify(), MonoKind::RegularMono);
        let expect = Subobject::regular_from_names(g.clone(), &[("V", "u"), ("V", "v"), ("V", "w"), ("E", "a")]).unwrap();
        assert_eq!(u.subobject, expect);
        assert_eq!(regular_union(&left, &left).unwrap().subobject, left);
        assert_eq!(regular_union(&left, &Subobject::empty(&g)).unwrap().subobject, left);
    }

    #[test]
    fn identity_cube_passes() {
        let g = path();
        let id = FuzzyMorphism::identity(&g);
        let cube = Cube::new(std::array::from_fn(|_| id.clone())).unwrap();
        let r = check_cube(&cube, &Budget::default()).unwrap();
        assert_eq!(r.vk, Some(true));
        assert_eq!(r.stability, Some(true));
    }

    #[test]
    fn probe_on_a_regular_span() {
        let g = path();
        let sub = Subobject::regular_from_names(g.clone(), &[("V", "v")]).unwrap();
        let m = sub.inclusion();
        let f = limits::to_terminal(m.source(), &Arc::new(limits::terminal(g.base(), g.labels()))).unwrap();
        let r = rm_adhesivity_probe(&m, &f, ProbeConfig { samples: 10, seed: 1 }, &Budget::default()).unwrap();
        assert!(r.violations.is_empty(), "{:?}", r.violations);
        assert_eq!(r.cubes, 20);
    }
}
