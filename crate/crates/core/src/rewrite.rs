//! The glue phase of a rewrite step: given the right-hand side of a rule and
//! a host interface, push out, find the mediator into the rule's type and
//! check the resulting cube.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::adhesive::{self, check_cube, Cube, CubeReport};
use crate::category::{FiniteCategory, Schema};
use crate::error::{Error, Result};
use crate::homs::{Budget, HomSearch};
use crate::lattice::HeytingAlgebra;
use crate::limits::{self, Cone, Diagram};
use crate::presheaf::{FuzzyMorphism, FuzzyPresheaf, LabelFamily, MonoKind, Presheaf};

/// `r : K → R`, `t_K : K → K'`, `t_R : R → R'` and `r' : K' → R'`, with the
/// square a pushout.
#[derive(Debug, Clone)]
pub struct RuleRight {
    pub r: FuzzyMorphism,
    pub t_k: FuzzyMorphism,
    pub t_r: FuzzyMorphism,
    pub r_prime: FuzzyMorphism,
    pub t_k_regular: bool,
}

impl RuleRight {
    pub fn k(&self) -> &Arc<FuzzyPresheaf> {
        self.r.source()
    }

    pub fn r_obj(&self) -> &Arc<FuzzyPresheaf> {
        self.r.target()
    }

    pub fn k_prime(&self) -> &Arc<FuzzyPresheaf> {
        self.t_k.target()
    }

    pub fn r_prime_obj(&self) -> &Arc<FuzzyPresheaf> {
        self.r_prime.target()
    }
}

/// `u : K → G_K` and `u' : G_K → K'`.
#[derive(Debug, Clone)]
pub struct HostInterface {
    pub u: FuzzyMorphism,
    pub u_prime: FuzzyMorphism,
}

impl HostInterface {
    pub fn g_k(&self) -> &Arc<FuzzyPresheaf> {
        self.u.target()
    }
}

pub fn validate_rule(
    r: FuzzyMorphism,
    t_k: FuzzyMorphism,
    t_r: FuzzyMorphism,
    r_prime: FuzzyMorphism,
    budget: &Budget,
) -> Result<RuleRight> {
    let fits = |m: &FuzzyMorphism, s: &Arc<FuzzyPresheaf>, t: &Arc<FuzzyPresheaf>| m.source() == s && m.target() == t;
    if !fits(&t_k, r.source(), t_k.target()) {
        return Err(Error::InvalidMorphism("t_K".into(), "domain is not K".into()));
    }
    if !fits(&t_r, r.target(), t_r.target()) {
        return Err(Error::InvalidMorphism("t_R".into(), "domain is not R".into()));
    }
    if !fits(&r_prime, t_k.target(), t_r.target()) {
        return Err(Error::InvalidMorphism("r'".into(), "must go from K' to R'".into()));
    }
    let via_r = r.then(&t_r)?;
    let via_k = t_k.then(&r_prime)?;
    if via_r.components() != via_k.components() {
        return Err(Error::BottomNotPushout("square does not commute".into()));
    }
    let cocone = Cone { apex: r_prime.target().clone(), legs: vec![r_prime.clone(), t_r.clone()] };
    if !limits::is_universal(&Diagram::Pushout(t_k.clone(), r.clone()), &cocone, budget)? {
        return Err(Error::BottomNotPushout("R' is not the pushout of t_K and r".into()));
    }
    let t_k_regular = t_k.classify() == MonoKind::RegularMono;
    Ok(RuleRight { r, t_k, t_r, r_prime, t_k_regular })
}

#[derive(Debug, Clone)]
pub struct RewriteResult {
    pub g_r: Arc<FuzzyPresheaf>,
    pub w: FuzzyMorphism,
    pub g_r_map: FuzzyMorphism,
    pub w_prime: FuzzyMorphism,
    pub cube: Cube,
    pub report: CubeReport,
}

pub fn apply_right_step(rule: &RuleRight, host: &HostInterface, budget: &Budget) -> Result<RewriteResult> {
    if host.u.source() != rule.k() || host.u_prime.target() != rule.k_prime() {
        return Err(Error::InvalidMorphism("u".into(), "host interface does not fit the rule".into()));
    }
    if host.u.then(&host.u_prime)?.components() != rule.t_k.components() {
        return Err(Error::NotCommutative("u' o u differs from t_K".into()));
    }
    let po = limits::pushout(&host.u, &rule.r)?;
    let po = prefer_names(&po, host.g_k())?;
    let (g_r_map, w) = (po.legs[0].clone(), po.legs[1].clone());
    let w_prime = mediator(&po, &host.u_prime.then(&rule.r_prime)?, &rule.t_r, budget)?;
    let id_k = FuzzyMorphism::identity(rule.k());
    let id_r = FuzzyMorphism::identity(rule.r_obj());
    let cube = Cube::new([
        rule.t_k.clone(),
        rule.r.clone(),
        rule.r_prime.clone(),
        rule.t_r.clone(),
        host.u.clone(),
        rule.r.clone(),
        g_r_map.clone(),
        w.clone(),
        id_k,
        host.u_prime.clone(),
        id_r,
        w_prime.clone(),
    ])?;
    let report = check_cube(&cube, budget)?;
    if !report.back_pullbacks.0 {
        return Err(Error::BackFaceNotPullback("K is not the pullback of t_K and u'".into()));
    }
    if !report.top_pushout {
        return Err(Error::Internal("computed pushout failed its own check".into()));
    }
    if rule.t_k_regular && !(report.front_pullbacks.0 && report.front_pullbacks.1) {
        return Err(Error::FrontFaceNotPullback(format!("{:?}", report.front_pullbacks)));
    }
    Ok(RewriteResult { g_r: po.apex.clone(), w, g_r_map, w_prime, cube, report })
}

fn mediator(po: &Cone, from_host: &FuzzyMorphism, from_r: &FuzzyMorphism, budget: &Budget) -> Result<FuzzyMorphism> {
    let w_prime = adhesive::induced(po, &[from_host, from_r]).map_err(|e| Error::MediatorNotUnique(e.to_string()))?;
    let mut search = HomSearch::fuzzy(&po.apex, from_r.target());
    for (leg, target) in po.legs.iter().zip([from_host, from_r]) {
        for o in 0..leg.source().base().object_count() {
            for x in 0..leg.source().size(o) {
                search = search.fix(o, leg.apply(o, x), target.apply(o, x));
            }
        }
    }
    let n = search.count_up_to(2, budget)?;
    if n != 1 {
        return Err(Error::MediatorNotUnique(format!("{n} mediators")));
    }
    Ok(w_prime)
}

/// Renames pushout classes after the host element they contain, when there
/// is exactly one and the names stay distinct.
fn prefer_names(po: &Cone, host: &Arc<FuzzyPresheaf>) -> Result<Cone> {
    let apex = &po.apex;
    let host_leg = &po.legs[0];
    let n = apex.base().object_count();
    let mut names: Vec<Vec<String>> = (0..n).map(|o| apex.carrier(o).to_vec()).collect();
    for (o, row) in names.iter_mut().enumerate() {
        let mut from_host: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); row.len()];
        for x in 0..host.size(o) {
            from_host[host_leg.apply(o, x)].insert(x);
        }
        let proposal: Vec<String> = row
            .iter()
            .zip(&from_host)
            .map(|(name, members)| match members.iter().collect::<Vec<_>>()[..] {
                [&x] => host.elem_name(o, x).to_string(),
                _ => name.clone(),
            })
            .collect();
        if proposal.iter().collect::<BTreeSet<_>>().len() == proposal.len() {
            *row = proposal;
        }
    }
    let renamed = Arc::new(apex.renamed(names)?);
    let legs = po.legs.iter().map(|l| l.retarget(l.source().clone(), renamed.clone())).collect::<Result<_>>()?;
    Ok(Cone { apex: renamed, legs })
}

pub const MAIL: &str = "mail";
pub const KEY: &str = "key";

/// The resource-transmission example: processes labeled by sets of
/// resources, ternary connections `(s, m, t)` between them.
#[derive(Debug, Clone)]
pub struct TransmissionDemo {
    pub base: Arc<FiniteCategory>,
    pub labels: LabelFamily,
    pub pre_state: Arc<FuzzyPresheaf>,
    pub expected_post: Arc<FuzzyPresheaf>,
}

impl TransmissionDemo {
    pub fn lattice() -> HeytingAlgebra {
        HeytingAlgebra::powerset(&[MAIL, KEY]).expect("two atoms")
    }

    /// Processes are labeled by the powerset of resources, connections by
    /// the one-point lattice.
    pub fn labels(base: &FiniteCategory) -> Result<LabelFamily> {
        let p = base.object("P")?;
        Ok((0..base.object_count()).map(|o| Arc::new(if o == p { Self::lattice() } else { HeytingAlgebra::unit() })).collect())
    }

    /// A state from `(process, holdings)` and `(connection, s, m, t)`.
    pub fn state(
        base: &Arc<FiniteCategory>,
        processes: &[(&str, &str)],
        connections: &[(&str, &str, &str, &str)],
    ) -> Result<FuzzyPresheaf> {
        let leg =
            |k: usize| -> Vec<(String, String)> { connections.iter().map(|c| (c.0.to_string(), [c.1, c.2, c.3][k].to_string())).collect() };
        let shape = Presheaf::from_named(
            base.clone(),
            &[
                ("P".into(), processes.iter().map(|p| p.0.to_string()).collect()),
                ("C".into(), connections.iter().map(|c| c.0.to_string()).collect()),
            ],
            &[("s".into(), leg(0)), ("m".into(), leg(1)), ("t".into(), leg(2))],
        )?;
        let labels = Self::labels(base)?;
        FuzzyPresheaf::from_named(
            shape,
            labels,
            &[
                ("P".into(), processes.iter().map(|p| (p.0.to_string(), p.1.to_string())).collect()),
                ("C".into(), connections.iter().map(|c| (c.0.to_string(), "*".to_string())).collect()),
            ],
        )
    }

    pub fn build() -> Result<TransmissionDemo> {
        let base = Arc::new(FiniteCategory::schema(Schema::TernaryConnection)?);
        let labels = Self::labels(&base)?;
        let pre_state = Arc::new(Self::state(&base, &[("p", "{mail}"), ("q", "{}"), ("r", "{key}")], &[("c", "p", "q", "r")])?);
        let expected_post = Arc::new(Self::state(&base, &[("p", "{}"), ("q", "{mail}"), ("r", "{}")], &[])?);
        Ok(TransmissionDemo { base, labels, pre_state, expected_post })
    }
}

/// A match of the transmission in a state.
#[derive(Debug, Clone)]
pub struct TransmissionMatch {
    pub rule: RuleRight,
    pub host: HostInterface,
}

/// Finds the first connection `c = (p, q, r)` with distinct endpoints where
/// `p` holds mail, `q` does not, and `r` holds the key, and builds the rule
/// and host interface that carry out the transmission along it.
///
/// The deleting half of the step is applied directly: `G_K` is the state
/// without `c`, with mail taken from `p` and the key from `r`. The rule is
/// specialised to the remaining holdings of `p`, `q` and `r`, so that
/// `t_K` is a regular mono. Every other process is typed by a context
/// process `x` labeled with all resources, and every other connection by
/// the connection of `K'` between the images of its ends.
pub fn transmission_match(state: &Arc<FuzzyPresheaf>, budget: &Budget) -> Result<TransmissionMatch> {
    let base = state.base().clone();
    let (pp, cc) = (base.object("P")?, base.object("C")?);
    let (s, m, t) = (base.morphism("s")?, base.morphism("m")?, base.morphism("t")?);
    let lat = state.label(pp).clone();
    let (mail, key) = (lat.element(&format!("{{{MAIL}}}"))?, lat.element(&format!("{{{KEY}}}"))?);
    let holds = |x: usize, r: usize| lat.leq(r, state.membership(pp, x));
    let found = (0..state.size(cc)).find_map(|c| {
        let (p, q, r) = (state.act(s, c), state.act(m, c), state.act(t, c));
        let ok = p != q && q != r && p != r && holds(p, mail) && !holds(q, mail) && holds(r, key);
        ok.then_some((c, p, q, r))
    });
    let Some((c, p, q, r)) = found else {
        return Err(Error::NoMatch("no connection (p, q, r) with mail at p, none at q and the key at r".into()));
    };
    let minus = |x: usize, res| {
        let rest = lat.imp(res, lat.bottom());
        lat.meet(state.membership(pp, x), rest)
    };
    let (hp, hq, hr) = (minus(p, mail), state.membership(pp, q), minus(r, key));
    let name = |x: usize| state.elem_name(pp, x).to_string();
    let lname = |l| lat.name(l).to_string();

    // G_K: the state without c, with the consumed resources removed
    let mut processes: Vec<(String, String)> = Vec::new();
    for x in 0..state.size(pp) {
        let l = if x == p {
            hp
        } else if x == r {
            hr
        } else {
            state.membership(pp, x)
        };
        processes.push((name(x), lname(l)));
    }
    let kept: Vec<usize> = (0..state.size(cc)).filter(|&k| k != c).collect();
    let conns: Vec<(String, String, String, String)> = kept
        .iter()
        .map(|&k| (state.elem_name(cc, k).to_string(), name(state.act(s, k)), name(state.act(m, k)), name(state.act(t, k))))
        .collect();
    let g_k = Arc::new(state_from(&base, &processes, &conns)?);

    let role = |x: usize| -> &'static str {
        match x {
            _ if x == p => "p",
            _ if x == q => "q",
            _ if x == r => "r",
            _ => "x",
        }
    };
    let k_procs = vec![("p".to_string(), lname(hp)), ("q".to_string(), lname(hq)), ("r".to_string(), lname(hr))];
    let r_procs = vec![("p".to_string(), lname(hp)), ("q".to_string(), lname(lat.join(hq, mail))), ("r".to_string(), lname(hr))];
    let mut kp_procs = k_procs.clone();
    kp_procs.push(("x".to_string(), lname(lat.top())));
    let mut rp_procs = r_procs.clone();
    rp_procs.push(("x".to_string(), lname(lat.top())));
    let roles = ["p", "q", "r", "x"];
    let mut type_conns = Vec::new();
    for a in roles {
        for b in roles {
            for d in roles {
                type_conns.push((format!("c({a},{b},{d})"), a.to_string(), b.to_string(), d.to_string()));
            }
        }
    }
    let k = Arc::new(state_from(&base, &k_procs, &[])?);
    let r_obj = Arc::new(state_from(&base, &r_procs, &[])?);
    let k_prime = Arc::new(state_from(&base, &kp_procs, &type_conns)?);
    let r_prime_obj = Arc::new(state_from(&base, &rp_procs, &type_conns)?);

    let same = |from: &Arc<FuzzyPresheaf>, to: &Arc<FuzzyPresheaf>| -> Result<FuzzyMorphism> {
        let pairs = |o: usize| (0..from.size(o)).map(|x| (from.elem_name(o, x).to_string(), from.elem_name(o, x).to_string())).collect();
        FuzzyMorphism::from_named(from.clone(), to.clone(), &[("P".to_string(), pairs(pp)), ("C".to_string(), pairs(cc))])
    };
    let rule = validate_rule(same(&k, &r_obj)?, same(&k, &k_prime)?, same(&r_obj, &r_prime_obj)?, same(&k_prime, &r_prime_obj)?, budget)?;

    let u = FuzzyMorphism::from_named(
        k.clone(),
        g_k.clone(),
        &[("P".to_string(), vec![("p".into(), name(p)), ("q".into(), name(q)), ("r".into(), name(r))]), ("C".to_string(), vec![])],
    )?;
    let proc_types = (0..state.size(pp)).map(|x| (name(x), role(x).to_string())).collect();
    let conn_types = kept
        .iter()
        .map(|&k| {
            let ty = format!("c({},{},{})", role(state.act(s, k)), role(state.act(m, k)), role(state.act(t, k)));
            (state.elem_name(cc, k).to_string(), ty)
        })
        .collect();
    let u_prime = FuzzyMorphism::from_named(g_k, k_prime, &[("P".to_string(), proc_types), ("C".to_string(), conn_types)])?;
    Ok(TransmissionMatch { rule, host: HostInterface { u, u_prime } })
}

fn state_from(
    base: &Arc<FiniteCategory>,
    processes: &[(String, String)],
    connections: &[(String, String, String, String)],
) -> Result<FuzzyPresheaf> {
    let ps: Vec<(&str, &str)> = processes.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    let cs: Vec<(&str, &str, &str, &str)> =
        connections.iter().map(|(a, b, c, d)| (a.as_str(), b.as_str(), c.as_str(), d.as_str())).collect();
    TransmissionDemo::state(base, &ps, &cs)
}

/// Runs one transmission step on `state`.
pub fn transmit(state: &Arc<FuzzyPresheaf>, budget: &Budget) -> Result<RewriteResult> {
    let found = transmission_match(state, budget)?;
    apply_right_step(&found.rule, &found.host, budget)
}

/// Element names and memberships, object by object.
pub fn describe_state(state: &FuzzyPresheaf) -> BTreeMap<String, Vec<(String, String)>> {
    let base = state.base();
    (0..base.object_count())
        .map(|o| {
            let elems = (0..state.size(o)).map(|x| (state.elem_name(o, x).to_string(), state.membership_name(o, x).to_string())).collect();
            (base.object_name(o).to_string(), elems)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transmission_moves_mail_and_consumes_the_key() {
        let demo = TransmissionDemo::build().unwrap();
        let budget = Budget::default();
        let found = transmission_match(&demo.pre_state, &budget).unwrap();
        assert!(found.rule.t_k_regular);
        let step = apply_right_step(&found.rule, &found.host, &budget).unwrap();
        assert_eq!(*step.g_r, *demo.expected_post);
        assert_eq!(step.report.front_pullbacks, (true, true));
        assert_eq!(step.report.vk, Some(true));
        assert!(matches!(transmit(&step.g_r, &budget), Err(Error::NoMatch(_))));
    }

    #[test]
    fn context_is_preserved() {
        let demo = TransmissionDemo::build().unwrap();
        let state = Arc::new(
            TransmissionDemo::state(
                &demo.base,
                &[("o", "{key,mail}"), ("p", "{key,mail}"), ("q", "{key}"), ("r", "{key}")],
                &[("c", "p", "q", "r"), ("d", "o", "p", "o")],
            )
            .unwrap(),
        );
        let step = transmit(&state, &Budget::default()).unwrap();
        let expect = TransmissionDemo::state(
            &demo.base,
            &[("o", "{key,mail}"), ("p", "{key}"), ("q", "{key,mail}"), ("r", "{}")],
            &[("d", "o", "p", "o")],
        )
        .unwrap();
        assert_eq!(*step.g_r, expect);
    }

    #[test]
    fn conditions_are_required() {
        let demo = TransmissionDemo::build().unwrap();
        let budget = Budget::default();
        for (procs, conn) in [
            (vec![("p", "{mail}"), ("q", "{mail}"), ("r", "{key}")], ("c", "p", "q", "r")),
            (vec![("p", "{mail}"), ("q", "{}"), ("r", "{}")], ("c", "p", "q", "r")),
            (vec![("p", "{mail}"), ("q", "{}"), ("r", "{key}")], ("c", "p", "q", "p")),
        ] {
            let state = Arc::new(TransmissionDemo::state(&demo.base, &procs, &[conn]).unwrap());
            assert!(matches!(transmission_match(&state, &budget), Err(Error::NoMatch(_))));
        }
    }

    #[test]
    fn identity_rule_leaves_the_host_alone() {
        let demo = TransmissionDemo::build().unwrap();
        let budget = Budget::default();
        let k = Arc::new(TransmissionDemo::state(&demo.base, &[("p", "{mail}")], &[]).unwrap());
        let id = FuzzyMorphism::identity(&k);
        let rule = validate_rule(id.clone(), id.clone(), id.clone(), id.clone(), &budget).unwrap();
        assert!(rule.t_k_regular);
        let host = HostInterface { u: id.clone(), u_prime: id.clone() };
        let step = apply_right_step(&rule, &host, &budget).unwrap();
        assert_eq!(*step.g_r, *k);
        assert!(step.g_r_map.is_isomorphism());
        assert!(step.w_prime.same_arrow(&id));
    }

    #[test]
    fn host_must_pull_back_to_k() {
        let demo = TransmissionDemo::build().unwrap();
        let budget = Budget::default();
        let k = Arc::new(TransmissionDemo::state(&demo.base, &[("p", "{mail}")], &[]).unwrap());
        let g = Arc::new(TransmissionDemo::state(&demo.base, &[("p", "{mail}"), ("p2", "{mail}")], &[]).unwrap());
        let id = FuzzyMorphism::identity(&k);
        let rule = validate_rule(id.clone(), id.clone(), id.clone(), id.clone(), &budget).unwrap();
        let u =
            FuzzyMorphism::from_named(k.clone(), g.clone(), &[("P".into(), vec![("p".into(), "p".into())]), ("C".into(), vec![])]).unwrap();
        let u_prime = FuzzyMorphism::new(g, k, vec![vec![], vec![0, 0]]).unwrap();
        let err = apply_right_step(&rule, &HostInterface { u, u_prime }, &budget).unwrap_err();
        assert!(matches!(err, Error::BackFaceNotPullback(_)));
    }

    #[test]
    fn non_pushout_bottom_is_rejected() {
        let demo = TransmissionDemo::build().unwrap();
        let budget = Budget::default();
        let k = Arc::new(TransmissionDemo::state(&demo.base, &[("p", "{}")], &[]).unwrap());
        let k2 = Arc::new(TransmissionDemo::state(&demo.base, &[("p", "{}"), ("x", "{}")], &[]).unwrap());
        let id = FuzzyMorphism::identity(&k);
        let incl = FuzzyMorphism::from_named(k.clone(), k2.clone(), &[("P".into(), vec![("p".into(), "p".into())]), ("C".into(), vec![])])
            .unwrap();
        assert!(validate_rule(incl.clone(), id.clone(), FuzzyMorphism::identity(&k2), incl.clone(), &budget).is_ok());
        // the pushout of t_K and r = id is K', and K is too small to be it
        let lost = validate_rule(
            id.clone(),
            incl.clone(),
            id.clone(),
            FuzzyMorphism::new(k2.clone(), k.clone(), vec![vec![], vec![0, 0]]).unwrap(),
            &budget,
        );
        assert!(matches!(lost, Err(Error::BottomNotPushout(_))));
    }
}
