//! Finite topologies, the set equations tying closed sets to the Galois families, the
//! theorem-condition evaluators, and the relation topology on a product of T-spaces.

use std::collections::{BTreeSet, HashSet};

use serde::Serialize;

use crate::carrier::{OperationSystem, Tier};
use crate::error::{GgtError, Result};
use crate::galois::GaloisContext;
use crate::limits::{Budget, Cap, Tri};
use crate::morphism::{is_t_morphism, Kind, Morphism};
use crate::subset::Subset;
use crate::tspace::{check_inside, generate_space, generated_quasi_subspace, is_quasi_space};

/// Open sets over `points`, kept sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteTopology {
    pub points: Subset,
    opens: Vec<Subset>,
    #[serde(skip)]
    lookup: HashSet<Subset>,
}

fn union_closure(fam: &BTreeSet<Subset>, with_empty: bool, limit: usize) -> Result<BTreeSet<Subset>> {
    let mut out: BTreeSet<Subset> = BTreeSet::new();
    if with_empty {
        out.insert(Subset::new());
    }
    for p in fam {
        let mut new: Vec<Subset> = out.iter().map(|f| f.union(p)).collect();
        new.push(p.clone());
        out.extend(new);
        if out.len() > limit {
            return Err(GgtError::budget("sets in a union closure", limit, out.len()));
        }
    }
    Ok(out)
}

fn meet_closure(fam: &BTreeSet<Subset>, top: Option<&Subset>, limit: usize) -> Result<BTreeSet<Subset>> {
    let mut out: BTreeSet<Subset> = top.into_iter().cloned().collect();
    for p in fam {
        let mut new: Vec<Subset> = out.iter().map(|f| f.intersection(p)).collect();
        new.push(p.clone());
        out.extend(new);
        if out.len() > limit {
            return Err(GgtError::budget("sets in a meet closure", limit, out.len()));
        }
    }
    Ok(out)
}

impl FiniteTopology {
    fn build(points: Subset, opens: BTreeSet<Subset>) -> Self {
        let lookup = opens.iter().cloned().collect();
        FiniteTopology {
            points,
            opens: opens.into_iter().collect(),
            lookup,
        }
    }

    /// Validates the axioms.
    pub fn from_opens(points: &Subset, opens: &[Subset]) -> Result<Self> {
        let set: BTreeSet<Subset> = opens.iter().cloned().collect();
        if !set.contains(&Subset::new()) || !set.contains(points) {
            return Err(GgtError::Schema("a topology must contain the empty set and the whole space".into()));
        }
        for a in &set {
            if !a.is_subset(points) {
                return Err(GgtError::Schema(format!("open set {a:?} leaves the space")));
            }
            for b in &set {
                if !set.contains(&a.union(b)) || !set.contains(&a.intersection(b)) {
                    return Err(GgtError::Schema(format!(
                        "open sets {a:?} and {b:?} break union or intersection closure"
                    )));
                }
            }
        }
        Ok(Self::build(points.clone(), set))
    }

    /// All unions of finite intersections of subbasis members; the empty intersection is
    /// the whole space.
    pub fn from_subbasis(points: &Subset, subbasis: &[Subset], limit: usize) -> Result<Self> {
        for s in subbasis {
            if !s.is_subset(points) {
                return Err(GgtError::usage(format!("subbasis member {s:?} leaves the space")));
            }
        }
        let fam: BTreeSet<Subset> = subbasis.iter().cloned().collect();
        let basis = meet_closure(&fam, Some(points), limit)?;
        let opens = union_closure(&basis, true, limit)?;
        Ok(Self::build(points.clone(), opens))
    }

    /// The topology whose closed sets are generated by `closed`, i.e. with subbasis the
    /// complements together with the whole space.
    pub fn from_closed_subbasis(points: &Subset, closed: &[Subset], limit: usize) -> Result<Self> {
        let mut sub: Vec<Subset> = closed.iter().map(|a| points.difference(a)).collect();
        sub.push(points.clone());
        Self::from_subbasis(points, &sub, limit)
    }

    pub fn discrete(points: &Subset) -> Self {
        Self::build(points.clone(), points.subsets().into_iter().collect())
    }

    pub fn indiscrete(points: &Subset) -> Self {
        Self::build(points.clone(), [Subset::new(), points.clone()].into_iter().collect())
    }

    pub fn opens(&self) -> &[Subset] {
        &self.opens
    }

    pub fn closed_sets(&self) -> Vec<Subset> {
        let mut v: Vec<Subset> = self.opens.iter().map(|o| self.points.difference(o)).collect();
        v.sort();
        v
    }

    pub fn is_open(&self, a: &Subset) -> bool {
        self.lookup.contains(a)
    }

    pub fn is_closed(&self, a: &Subset) -> bool {
        a.is_subset(&self.points) && self.lookup.contains(&self.points.difference(a))
    }

    /// Smallest closed superset: the complement of the largest open set missing `a`.
    pub fn closure_of(&self, a: &Subset) -> Subset {
        let outside = self
            .opens
            .iter()
            .filter(|o| o.intersection(a).is_empty())
            .fold(Subset::new(), |acc, o| acc.union(o));
        self.points.difference(&outside)
    }

    pub fn is_finer_than(&self, other: &FiniteTopology) -> bool {
        other.opens.iter().all(|o| self.is_open(o))
    }

    /// `f` maps points of `self` to points of `other`; continuity by preimages.
    pub fn is_continuous(&self, other: &FiniteTopology, f: &[usize]) -> bool {
        other.opens.iter().all(|o| {
            let pre: Subset = self.points.iter().filter(|&x| o.contains(f[x])).collect();
            self.is_open(&pre)
        })
    }
}

/// Every topology on `points` exactly once, sorted by open-set list. Topologies on a finite
/// set are the up-set families of preorders.
pub fn enumerate_topologies(points: &Subset, budget: &Budget) -> Result<Vec<FiniteTopology>> {
    budget.check(Cap::Topology, "topology enumeration |points|", points.len())?;
    let pts = points.to_vec();
    let k = pts.len();
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << pairs.len() {
        let mut le = vec![vec![false; k]; k];
        for (i, row) in le.iter_mut().enumerate() {
            row[i] = true;
        }
        for (b, &(i, j)) in pairs.iter().enumerate() {
            le[i][j] = mask >> b & 1 == 1;
        }
        let transitive = (0..k).all(|i| {
            (0..k).all(|j| !le[i][j] || (0..k).all(|l| !le[j][l] || le[i][l]))
        });
        if !transitive {
            continue;
        }
        let opens: BTreeSet<Subset> = (0u64..1 << k)
            .filter(|m| {
                (0..k).all(|i| m >> i & 1 == 0 || (0..k).all(|j| !le[i][j] || m >> j & 1 == 1))
            })
            .map(|m| (0..k).filter(|i| m >> i & 1 == 1).map(|i| pts[i]).collect())
            .collect();
        out.push(FiniteTopology::build(points.clone(), opens));
    }
    out.sort_by(|a, b| a.opens.cmp(&b.opens));
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Equation {
    /// Nonempty End-closed intermediates are the nonempty closed quasi-subspaces over `B`.
    IntEnd,
    /// The variant that keeps the empty set; a diagnostic only.
    IntEndWithEmpty,
    IntAut,
    /// Galois submonoids are the closed submonoids of `GMn(S/B)`.
    Gsmn,
    Gsgr,
}

impl Equation {
    pub fn kind(self) -> Kind {
        match self {
            Equation::IntEnd | Equation::IntEndWithEmpty | Equation::Gsmn => Kind::End,
            Equation::IntAut | Equation::Gsgr => Kind::Aut,
        }
    }

    fn on_space(self) -> bool {
        !matches!(self, Equation::Gsmn | Equation::Gsgr)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct EquationReport {
    pub equation: Equation,
    pub holds: bool,
    /// A set on exactly one side.
    pub witness: Option<Vec<usize>>,
    pub left_only: bool,
}

/// Whether `h` is a submonoid (subgroup) of the ambient members.
fn is_substructure(ctx: &GaloisContext, h: &Subset) -> bool {
    h.contains(ctx.identity)
        && h.iter().all(|i| h.iter().all(|j| h.contains(ctx.compose(i, j))))
}

/// Checks one set equation literally for a topology on `S` or on the ambient members.
pub fn equation_holds(
    ctx: &GaloisContext,
    b: &Subset,
    eq: Equation,
    top: &FiniteTopology,
) -> Result<EquationReport> {
    if ctx.kind != eq.kind() {
        return Err(GgtError::usage("equation needs the other ambient kind"));
    }
    let expected_points = if eq.on_space() { ctx.space.clone() } else { ctx.all() };
    if top.points != expected_points {
        return Err(GgtError::usage("topology is on the wrong set of points"));
    }
    let (left, right): (BTreeSet<Subset>, BTreeSet<Subset>) = if eq.on_space() {
        let keep_empty = eq == Equation::IntEndWithEmpty;
        let left = ctx
            .int_family(b)?
            .into_iter()
            .filter(|k| keep_empty || !k.is_empty())
            .collect();
        let mut right = BTreeSet::new();
        for c in top.closed_sets() {
            if b.is_subset(&c) && (keep_empty || !c.is_empty()) && is_quasi_space(ctx.sys, &c)? {
                right.insert(c);
            }
        }
        (left, right)
    } else {
        let left = ctx.gs_family(b)?.into_iter().collect();
        let within = ctx.galois_indices(b);
        let right = top
            .closed_sets()
            .into_iter()
            .filter(|m| m.is_subset(&within) && is_substructure(ctx, m))
            .collect();
        (left, right)
    };
    let diff = left
        .symmetric_difference(&right)
        .next()
        .cloned();
    Ok(EquationReport {
        equation: eq,
        holds: diff.is_none(),
        left_only: diff.as_ref().is_some_and(|d| left.contains(d)),
        witness: diff.map(|d| d.to_vec()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremId {
    IntEnd,
    IntAut,
    Gsmn,
    Gsgr,
    IntEndGeneral,
    IntAutGeneral,
}

impl TheoremId {
    pub const ALL: [TheoremId; 6] = [
        TheoremId::IntEnd,
        TheoremId::IntAut,
        TheoremId::Gsmn,
        TheoremId::Gsgr,
        TheoremId::IntEndGeneral,
        TheoremId::IntAutGeneral,
    ];

    pub fn parse(s: &str) -> Result<Self> {
        Ok(match s {
            "int-end" => TheoremId::IntEnd,
            "int-aut" => TheoremId::IntAut,
            "gsmn" => TheoremId::Gsmn,
            "gsgr" => TheoremId::Gsgr,
            "int-end-general" => TheoremId::IntEndGeneral,
            "int-aut-general" => TheoremId::IntAutGeneral,
            _ => return Err(GgtError::usage(format!("unknown theorem id {s:?}"))),
        })
    }

    pub fn kind(self) -> Kind {
        match self {
            TheoremId::IntEnd | TheoremId::Gsmn | TheoremId::IntEndGeneral => Kind::End,
            _ => Kind::Aut,
        }
    }

    fn equation(self) -> Equation {
        match self {
            TheoremId::IntEnd | TheoremId::IntEndGeneral => Equation::IntEnd,
            TheoremId::IntAut | TheoremId::IntAutGeneral => Equation::IntAut,
            TheoremId::Gsmn => Equation::Gsmn,
            TheoremId::Gsgr => Equation::Gsgr,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Clause {
    pub label: &'static str,
    pub value: Tri,
    pub method: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub theorem: TheoremId,
    /// False when the theorem is only asserted for unary systems and this one is not.
    pub applicable: bool,
    pub clauses: Vec<Clause>,
    /// Number of topologies satisfying the equation, when enumerated.
    pub p_count: Option<usize>,
    /// Every satisfying topology is finer than the subbasis topology.
    pub p_within_q: Tri,
    /// The subbasis topology is the coarsest satisfying one.
    pub coarsest: Tri,
    /// The sufficient lattice condition, where the theorem has one.
    pub join_hypothesis: Option<bool>,
    pub consistent: bool,
    pub violation: bool,
}

/// Nonempty intersections of nonempty finite unions of members of `fam`.
fn meets_of_unions(fam: &[Subset], limit: usize) -> Result<BTreeSet<Subset>> {
    let f: BTreeSet<Subset> = fam.iter().cloned().collect();
    let unions = union_closure(&f, false, limit)?;
    meet_closure(&unions, None, limit)
}

/// Evaluates each clause of one topology theorem independently and checks they agree.
pub fn theorem_conditions(
    sys: &OperationSystem,
    s: &Subset,
    b: &Subset,
    which: TheoremId,
    budget: &Budget,
) -> Result<ConditionReport> {
    check_inside(sys, s, "space")?;
    let ctx = GaloisContext::new(sys, s, which.kind(), budget)?;
    let limit = budget.limit(Cap::Maps);
    let eq = which.equation();
    let on_space = eq.on_space();
    let points = if on_space { s.clone() } else { ctx.all() };
    let closed_family = if on_space { ctx.int_family(b)? } else { ctx.gs_family(b)? };
    let generated = FiniteTopology::from_closed_subbasis(&points, &closed_family, limit)?;
    let famset: BTreeSet<&Subset> = closed_family.iter().collect();

    // (i) and the P ⊆ Q / coarsest facts by exhaustive search.
    let (p_nonempty, p_count, p_within_q, coarsest) = if budget.allows(Cap::Topology, points.len()) {
        let mut count = 0;
        let mut within = true;
        let mut coarsest = true;
        for t in enumerate_topologies(&points, budget)? {
            if equation_holds(&ctx, b, eq, &t)?.holds {
                count += 1;
                within &= t.is_finer_than(&generated);
                coarsest &= t.is_finer_than(&generated);
            }
        }
        let sat = equation_holds(&ctx, b, eq, &generated)?.holds;
        (
            Tri::from_bool(count > 0),
            Some(count),
            Tri::from_bool(within),
            Tri::from_bool(within && (count == 0 || sat) && coarsest),
        )
    } else {
        (Tri::Indeterminate, None, Tri::Indeterminate, Tri::Indeterminate)
    };
    let t_in_p = Tri::from_bool(equation_holds(&ctx, b, eq, &generated)?.holds);

    let unary = sys.tier == Tier::Unary;
    let mut clauses = vec![Clause {
        label: "i",
        value: p_nonempty,
        method: "search over all topologies",
    }];
    let mut join_hypothesis = None;
    let applicable;
    match which {
        TheoremId::IntEnd | TheoremId::IntAut => {
            applicable = unary;
            let mut unions = true;
            let mut joins = true;
            for x in &closed_family {
                for y in &closed_family {
                    unions &= famset.contains(&x.union(y));
                    joins &= famset.contains(&generated_quasi_subspace(sys, s, &x.union(y))?);
                }
            }
            clauses.push(Clause { label: "ii", value: Tri::from_bool(unions), method: "pairwise unions" });
            clauses.push(Clause { label: "iii", value: Tri::from_bool(joins), method: "pairwise joins of quasi-subspaces" });
            clauses.push(Clause { label: "iv", value: t_in_p, method: "subbasis topology against the equation" });
        }
        TheoremId::IntEndGeneral | TheoremId::IntAutGeneral => {
            applicable = true;
            let mut ok = true;
            for k in meets_of_unions(&closed_family, limit)? {
                if is_quasi_space(sys, &k)? && !k.is_empty() && !famset.contains(&k) {
                    ok = false;
                    break;
                }
            }
            clauses.push(Clause { label: "ii", value: Tri::from_bool(ok), method: "meets of finite unions" });
            clauses.push(Clause { label: "iii", value: t_in_p, method: "subbasis topology against the equation" });
            let mut joins = true;
            for x in &closed_family {
                for y in &closed_family {
                    joins &= famset.contains(&generated_quasi_subspace(sys, s, &x.union(y))?);
                }
            }
            join_hypothesis = Some(joins);
        }
        TheoremId::Gsmn | TheoremId::Gsgr => {
            applicable = true;
            let mut ok = true;
            for m in meets_of_unions(&closed_family, limit)? {
                if is_substructure(&ctx, &m) && !famset.contains(&m) {
                    ok = false;
                    break;
                }
            }
            clauses.push(Clause { label: "ii", value: Tri::from_bool(ok), method: "meets of finite unions" });
            clauses.push(Clause { label: "iii", value: t_in_p, method: "subbasis topology against the equation" });
            let mut joins = true;
            for x in &closed_family {
                for y in &closed_family {
                    joins &= famset.contains(&ctx.generated(&x.union(y)));
                }
            }
            join_hypothesis = Some(joins);
        }
    }
    let decided: BTreeSet<bool> = clauses.iter().filter_map(|c| c.value.decided()).collect();
    let consistent = decided.len() <= 1;
    let hypothesis_ok = match join_hypothesis {
        Some(true) => decided.iter().all(|&v| v),
        _ => true,
    };
    let violation = applicable
        && (!consistent
            || p_within_q == Tri::False
            || coarsest == Tri::False && p_nonempty == Tri::True
            || !hypothesis_ok);
    Ok(ConditionReport {
        theorem: which,
        applicable,
        clauses,
        p_count,
        p_within_q,
        coarsest,
        join_hypothesis,
        consistent,
        violation,
    })
}

/// The basis `{R_T(x, y)}` on `S_a × S_b`, pairs encoded as `x * n + y`.
#[derive(Clone, Debug, Serialize)]
pub struct RelationTopology {
    pub n: usize,
    pub sa: Subset,
    pub sb: Subset,
    pub basis: Vec<Subset>,
    #[serde(skip)]
    maps: Vec<Vec<usize>>,
}

impl RelationTopology {
    pub fn encode(&self, x: usize, y: usize) -> usize {
        x * self.n + y
    }

    pub fn decode(&self, p: usize) -> (usize, usize) {
        (p / self.n, p % self.n)
    }

    /// `R_T(x, y) = {(f(x), f(y)) | f ∈ T ∪ {Id}}`.
    pub fn basic(&self, x: usize, y: usize) -> Subset {
        let mut r = Subset::singleton(self.encode(x, y));
        for m in &self.maps {
            r.insert(self.encode(m[x], m[y]));
        }
        r
    }

    /// Open exactly when every pair carries its basic set along.
    pub fn contains(&self, r: &Subset) -> bool {
        r.iter().all(|p| {
            let (x, y) = self.decode(p);
            self.basic(x, y).is_subset(r)
        })
    }

    pub fn points(&self) -> Subset {
        self.sa
            .iter()
            .flat_map(|x| self.sb.iter().map(move |y| x * self.n + y))
            .collect()
    }

    /// The topology the basis generates as a subbasis.
    pub fn topology(&self, limit: usize) -> Result<FiniteTopology> {
        FiniteTopology::from_subbasis(&self.points(), &self.basis, limit)
    }
}

pub fn relation_topology(sys: &OperationSystem, sa: &Subset, sb: &Subset) -> Result<RelationTopology> {
    if sys.tier != Tier::Unary {
        return Err(GgtError::usage("the relation topology is defined for unary systems only"));
    }
    check_inside(sys, sa, "first space")?;
    check_inside(sys, sb, "second space")?;
    for s in [sa, sb] {
        if !is_quasi_space(sys, s)? {
            return Err(GgtError::usage("relation topology needs T-closed factors"));
        }
    }
    let maps: Vec<Vec<usize>> = sys
        .unary_members()
        .iter()
        .map(|o| o.as_map().expect("unary total"))
        .collect();
    let mut rt = RelationTopology {
        n: sys.n(),
        sa: sa.clone(),
        sb: sb.clone(),
        basis: Vec::new(),
        maps,
    };
    let basis: BTreeSet<Subset> = sa
        .iter()
        .flat_map(|x| sb.iter().map(move |y| (x, y)))
        .map(|(x, y)| rt.basic(x, y))
        .collect();
    rt.basis = basis.into_iter().collect();
    Ok(rt)
}

#[derive(Clone, Debug, Serialize)]
pub struct RelationCheck {
    pub functional: bool,
    pub t_morphism: bool,
    pub open: bool,
    pub agree: bool,
}

/// A relation is a T-morphism from its domain exactly when it is open and functional.
pub fn relation_morphism_check(
    sys: &OperationSystem,
    rt: &RelationTopology,
    pairs: &[(usize, usize)],
) -> Result<RelationCheck> {
    let n = sys.n();
    let mut map = vec![None; n];
    let mut functional = true;
    let mut r = Subset::new();
    let mut dom = Subset::new();
    for &(x, y) in pairs {
        if !rt.sa.contains(x) || !rt.sb.contains(y) {
            return Err(GgtError::usage(format!("pair ({x}, {y}) leaves the product")));
        }
        r.insert(rt.encode(x, y));
        dom.insert(x);
        match map[x] {
            Some(v) if v != y => functional = false,
            _ => map[x] = Some(y),
        }
    }
    if generate_space(sys, &dom)? != dom {
        return Err(GgtError::usage("the domain of the relation is not a T-subspace"));
    }
    let t_morphism = functional && {
        let m = Morphism::new(dom, rt.sb.clone(), map)?;
        is_t_morphism(sys, &m)?.is_none()
    };
    let open = rt.contains(&r);
    Ok(RelationCheck {
        functional,
        t_morphism,
        open,
        agree: t_morphism == (open && functional),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id_system(n: usize) -> OperationSystem {
        OperationSystem::unary_explicit(n, &[(0..n).collect()])
    }

    #[test]
    fn subbasis_generation() {
        let pts = Subset::full(3);
        let t = FiniteTopology::from_subbasis(&pts, &[Subset::from_mask(1), Subset::from_mask(2)], 1000)
            .unwrap();
        let mut expect: Vec<Subset> = [0u64, 1, 2, 3, 7].iter().map(|&m| Subset::from_mask(m)).collect();
        expect.sort();
        assert_eq!(t.opens(), &expect[..]);
        let ind = FiniteTopology::from_subbasis(&pts, &[pts.clone()], 10).unwrap();
        assert_eq!(ind, FiniteTopology::indiscrete(&pts));
    }

    #[test]
    fn closures() {
        let x = Subset::full(2);
        let sier = FiniteTopology::from_opens(&x, &[Subset::new(), Subset::singleton(1), x.clone()]).unwrap();
        assert_eq!(sier.closure_of(&Subset::singleton(1)), x);
        assert_eq!(sier.closure_of(&Subset::singleton(0)), Subset::singleton(0));
        assert_eq!(sier.closure_of(&Subset::new()), Subset::new());
    }

    #[test]
    fn topology_counts() {
        let b = Budget::uniform(5);
        let counts: Vec<usize> = (0..=5)
            .map(|n| enumerate_topologies(&Subset::full(n), &b).unwrap().len())
            .collect();
        assert_eq!(counts, vec![1, 1, 4, 29, 355, 6942]);
        assert!(enumerate_topologies(&Subset::full(5), &Budget::default()).is_err());
    }

    #[test]
    fn subbasis_is_smallest() {
        let b = Budget::default();
        let pts = Subset::full(3);
        let all = enumerate_topologies(&pts, &b).unwrap();
        for sub in [vec![Subset::from_mask(1)], vec![Subset::from_mask(3), Subset::from_mask(6)]] {
            let t = FiniteTopology::from_subbasis(&pts, &sub, 100).unwrap();
            let containing: Vec<_> = all.iter().filter(|u| sub.iter().all(|s| u.is_open(s))).collect();
            assert!(containing.iter().all(|u| u.is_finer_than(&t)));
            assert!(containing.iter().any(|u| **u == t));
        }
    }

    #[test]
    fn two_point_conditions() {
        let b = Budget::default();
        let sys = id_system(2);
        let s = Subset::full(2);
        let r = theorem_conditions(&sys, &s, &Subset::new(), TheoremId::IntEnd, &b).unwrap();
        assert!(r.clauses.iter().all(|c| c.value == Tri::True), "{r:?}");
        let ctx = GaloisContext::new(&sys, &s, Kind::End, &b).unwrap();
        let t1 = FiniteTopology::from_closed_subbasis(&s, &ctx.int_family(&Subset::new()).unwrap(), 100).unwrap();
        assert_eq!(t1, FiniteTopology::discrete(&s));
        let g = theorem_conditions(&sys, &s, &Subset::new(), TheoremId::Gsmn, &b).unwrap();
        assert!(g.clauses.iter().all(|c| c.value == Tri::False), "{g:?}");
        assert!(!g.violation);
    }

    #[test]
    fn relation_topology_examples() {
        let sys = OperationSystem::unary_explicit(3, &[vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]);
        let s = Subset::full(3);
        let rt = relation_topology(&sys, &s, &s).unwrap();
        let pairs = |v: &[(usize, usize)]| -> Subset { v.iter().map(|&(x, y)| rt.encode(x, y)).collect() };
        assert_eq!(rt.basic(0, 1), pairs(&[(0, 1), (1, 2), (2, 0)]));
        let shift = relation_morphism_check(&sys, &rt, &[(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(shift.t_morphism && shift.open && shift.agree);
        let constant = relation_morphism_check(&sys, &rt, &[(0, 1), (1, 1), (2, 1)]).unwrap();
        assert!(!constant.t_morphism && !constant.open && constant.agree);
        let idsys = id_system(2);
        let full = Subset::full(2);
        let rt = relation_topology(&idsys, &full, &full).unwrap();
        assert_eq!(rt.topology(100).unwrap(), FiniteTopology::discrete(&rt.points()));
    }
}
