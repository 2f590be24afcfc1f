//! Fixed sets, Galois monoids and groups, the intermediate and Galois-closed families, and
//! the correspondence between them.
//!
//! Morphism families are held as [`Subset`]s of indices into the ambient member list of a
//! [`GaloisContext`], which keeps set operations cheap and equality structural.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use crate::carrier::{OperationSystem, Tier};
use crate::error::{GgtError, Result};
use crate::limits::{Budget, Cap};
use crate::morphism::{enumerate_morphisms, Kind, Morphism};
use crate::subset::Subset;
use crate::tspace::{check_inside, generated_quasi_subspace, is_quasi_space, quasi_subspaces, Check};
use crate::witness::Witness;

/// `K^H`: the points of `k` fixed by every member of `h`.
pub fn fixed_set(k: &Subset, h: &[Morphism]) -> Subset {
    k.iter().filter(|&a| h.iter().all(|s| s.get(a) == Some(a))).collect()
}

/// A family of morphisms with the structure it is claimed to carry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MorphismSet {
    pub kind: Kind,
    pub members: Vec<Morphism>,
}

impl MorphismSet {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Checks identity membership, composition closure and, for groups, inverses.
    pub fn certify(&self, s: &Subset) -> Result<bool> {
        let n = self.members.first().map_or(0, |m| m.table().len());
        let id = Morphism::identity(n, s);
        if !self.members.contains(&id) {
            return Ok(false);
        }
        for a in &self.members {
            for b in &self.members {
                if !self.members.contains(&a.after(b)?) {
                    return Ok(false);
                }
            }
            if self.kind == Kind::Aut {
                match a.inverse() {
                    Some(inv) if self.members.contains(&inv) => {}
                    _ => return Ok(false),
                }
            }
        }
        Ok(true)
    }
}

/// `End_T(S)` or `Aut_T(S)` with per-member fixed sets and an index for composition.
pub struct GaloisContext<'a> {
    pub sys: &'a OperationSystem,
    pub space: Subset,
    pub kind: Kind,
    pub members: Vec<Morphism>,
    pub fixed: Vec<Subset>,
    pub identity: usize,
    index: HashMap<Vec<Option<usize>>, usize>,
}

impl<'a> GaloisContext<'a> {
    pub fn new(sys: &'a OperationSystem, s: &Subset, kind: Kind, budget: &Budget) -> Result<Self> {
        check_inside(sys, s, "space")?;
        if !is_quasi_space(sys, s)? {
            return Err(GgtError::usage("the space is not closed under the operations"));
        }
        let members = enumerate_morphisms(sys, s, kind, budget)?;
        let fixed = members.iter().map(|m| fixed_set(s, std::slice::from_ref(m))).collect();
        let index: HashMap<_, _> = members
            .iter()
            .enumerate()
            .map(|(i, m)| (m.table().to_vec(), i))
            .collect();
        let id = Morphism::identity(sys.n(), s);
        let identity = *index
            .get(id.table())
            .ok_or_else(|| GgtError::usage("identity is not a T-morphism of the space"))?;
        Ok(GaloisContext {
            sys,
            space: s.clone(),
            kind,
            members,
            fixed,
            identity,
            index,
        })
    }

    pub fn all(&self) -> Subset {
        Subset::full(self.members.len())
    }

    pub fn index_of(&self, m: &Morphism) -> Option<usize> {
        self.index.get(m.table()).copied()
    }

    /// Index of `members[i] ∘ members[j]`.
    pub fn compose(&self, i: usize, j: usize) -> usize {
        let c = self.members[i]
            .after(&self.members[j])
            .expect("members share the space");
        self.index[c.table()]
    }

    pub fn inverse(&self, i: usize) -> Option<usize> {
        self.members[i].inverse().and_then(|m| self.index_of(&m))
    }

    pub fn to_set(&self, h: &Subset) -> MorphismSet {
        MorphismSet {
            kind: self.kind,
            members: h.iter().map(|i| self.members[i].clone()).collect(),
        }
    }

    pub fn from_morphisms(&self, ms: &[Morphism]) -> Result<Subset> {
        ms.iter()
            .map(|m| {
                self.index_of(m)
                    .ok_or_else(|| GgtError::usage("morphism is not a member of the ambient monoid"))
            })
            .collect()
    }

    /// `S^H` for an index set.
    pub fn fixed_of(&self, h: &Subset) -> Subset {
        h.iter()
            .fold(self.space.clone(), |acc, i| acc.intersection(&self.fixed[i]))
    }

    /// `GMn_T(S/B)` (or `GGr` for an automorphism context) as indices.
    pub fn galois_indices(&self, b: &Subset) -> Subset {
        (0..self.members.len())
            .filter(|&i| b.is_subset(&self.fixed[i]))
            .collect()
    }

    pub fn galois_monoid(&self, b: &Subset) -> Result<MorphismSet> {
        self.check_base(b)?;
        Ok(self.to_set(&self.galois_indices(b)))
    }

    /// `GMn(S/S^H)`, the Galois closure of `h`.
    pub fn closure(&self, h: &Subset) -> Subset {
        self.galois_indices(&self.fixed_of(h))
    }

    /// `⟨X⟩` in `End(S)` or `Aut(S)`: identity, products and, for groups, inverses.
    pub fn generated(&self, x: &Subset) -> Subset {
        let mut gens: Vec<usize> = x.to_vec();
        if self.kind == Kind::Aut {
            for i in x.iter() {
                if let Some(j) = self.inverse(i) {
                    gens.push(j);
                }
            }
        }
        let mut out = Subset::singleton(self.identity);
        let mut queue = VecDeque::from([self.identity]);
        while let Some(e) = queue.pop_front() {
            for &g in &gens {
                let p = self.compose(e, g);
                if out.insert(p) {
                    queue.push_back(p);
                }
            }
        }
        out
    }

    pub fn generated_subset(&self, x: &[Morphism]) -> Result<MorphismSet> {
        Ok(self.to_set(&self.generated(&self.from_morphisms(x)?)))
    }

    fn check_base(&self, b: &Subset) -> Result<()> {
        if b.is_subset(&self.space) {
            Ok(())
        } else {
            Err(GgtError::usage("base is not contained in the space"))
        }
    }

    /// `Int^End(S/B)` or `Int^Aut(S/B)` by meet-closure of single fixed sets.
    pub fn int_family(&self, b: &Subset) -> Result<Vec<Subset>> {
        self.check_base(b)?;
        let fam = meet_closure(self.space.clone(), self.fixed.iter());
        Ok(fam.into_iter().filter(|k| b.is_subset(k)).collect())
    }

    /// `{S^H | H ⊆ members}` by enumerating every `H`.
    pub fn int_family_brute(&self, b: &Subset) -> Result<Vec<Subset>> {
        self.check_base(b)?;
        let m = self.members.len();
        if m > 20 {
            return Err(GgtError::budget("subsets of the ambient monoid", 20, m));
        }
        let mut fam = BTreeSet::new();
        for mask in 0u64..1 << m {
            let k = self.fixed_of(&Subset::from_mask(mask));
            if b.is_subset(&k) {
                fam.insert(k);
            }
        }
        Ok(fam.into_iter().collect())
    }

    /// `GSMn(S/B)` or `GSGr(S/B)` by meet-closure of point stabilizers inside `GMn(S/B)`.
    pub fn gs_family(&self, b: &Subset) -> Result<Vec<Subset>> {
        self.check_base(b)?;
        let base = self.galois_indices(b);
        let pieces: Vec<Subset> = self
            .space
            .difference(b)
            .iter()
            .map(|x| base.intersection(&self.galois_indices(&Subset::singleton(x))))
            .collect();
        Ok(meet_closure(base, pieces.iter()).into_iter().collect())
    }

    /// `{GMn(S/K) | B ⊆ K ⊆ S}` by enumerating every `K`.
    pub fn gs_family_brute(&self, b: &Subset, budget: &Budget) -> Result<Vec<Subset>> {
        self.check_base(b)?;
        let free = self.space.difference(b);
        budget.check(Cap::TSpace, "intermediate subsets |S \\ B|", free.len())?;
        let fam: BTreeSet<Subset> = free
            .subsets()
            .into_iter()
            .map(|x| self.galois_indices(&x.union(b)))
            .collect();
        Ok(fam.into_iter().collect())
    }

    /// All submonoids (subgroups) of the members in `within`, itself assumed closed.
    pub fn substructures(&self, within: &Subset, budget: &Budget) -> Result<Vec<Subset>> {
        budget.check(Cap::Substructures, "members for substructure enumeration", within.len())?;
        let limit = budget.limit(Cap::Maps);
        let start = self.generated(&Subset::new());
        let mut seen = BTreeSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        while let Some(h) = queue.pop_front() {
            for m in within.difference(&h).iter() {
                let mut x = h.clone();
                x.insert(m);
                let g = self.generated(&x);
                if seen.insert(g.clone()) {
                    if seen.len() > limit {
                        return Err(GgtError::budget("substructures enumerated", limit, seen.len()));
                    }
                    queue.push_back(g);
                }
            }
        }
        Ok(seen.into_iter().collect())
    }
}

/// All intersections of `top` with any subfamily of `pieces`, sorted.
fn meet_closure<'b>(top: Subset, pieces: impl Iterator<Item = &'b Subset>) -> BTreeSet<Subset> {
    let mut fam = BTreeSet::from([top]);
    for p in pieces {
        let new: Vec<Subset> = fam.iter().map(|f| f.intersection(p)).collect();
        fam.extend(new);
    }
    fam
}

/// γ and δ between the closed families, with every check the correspondence theorems assert.
#[derive(Clone, Debug, Serialize)]
pub struct CorrespondenceReport {
    pub kind: Kind,
    pub int_family: Vec<Subset>,
    pub gs_family: Vec<Vec<usize>>,
    /// `gamma[i]` is the index in `int_family` of `S^H` for the i-th Galois-closed family.
    pub gamma: Vec<Option<usize>>,
    /// `delta[j]` is the index in `gs_family` of `GMn(S/K)` for the j-th intermediate set.
    pub delta: Vec<Option<usize>>,
    pub bijective: bool,
    pub mutually_inverse: bool,
    pub inclusion_reversing: bool,
    /// `K = S^{GMn(S/K)}` for every member of the intermediate family.
    pub int_closed: Vec<bool>,
    /// `GMn(S/S^H) = H` for every member of the Galois-closed family.
    pub gs_closed: Vec<bool>,
    /// Intermediate quasi-subspaces containing `B`, closed or not.
    pub intermediate_quasi: usize,
    /// Submonoids (subgroups) of `GMn(S/B)`, closed or not; `None` past the budget.
    pub substructures: Option<usize>,
    pub verdict: bool,
}

pub fn verify_correspondence(
    ctx: &GaloisContext,
    b: &Subset,
    budget: &Budget,
) -> Result<CorrespondenceReport> {
    let ints = ctx.int_family(b)?;
    let gss = ctx.gs_family(b)?;
    let int_pos: HashMap<&Subset, usize> = ints.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let gs_pos: HashMap<&Subset, usize> = gss.iter().enumerate().map(|(i, h)| (h, i)).collect();
    let gamma: Vec<Option<usize>> = gss
        .iter()
        .map(|h| int_pos.get(&ctx.fixed_of(h)).copied())
        .collect();
    let delta: Vec<Option<usize>> = ints
        .iter()
        .map(|k| gs_pos.get(&ctx.galois_indices(k)).copied())
        .collect();
    let bijective = ints.len() == gss.len()
        && gamma.iter().all(Option::is_some)
        && gamma.iter().flatten().collect::<BTreeSet<_>>().len() == ints.len();
    let mutually_inverse = gamma
        .iter()
        .enumerate()
        .all(|(i, g)| g.and_then(|g| delta[g]) == Some(i))
        && delta
            .iter()
            .enumerate()
            .all(|(j, d)| d.and_then(|d| gamma[d]) == Some(j));
    let mut inclusion_reversing = true;
    for (i, h1) in gss.iter().enumerate() {
        for (j, h2) in gss.iter().enumerate() {
            if h1.is_subset(h2) {
                if let (Some(a), Some(c)) = (gamma[i], gamma[j]) {
                    inclusion_reversing &= ints[a].is_superset(&ints[c]);
                }
            }
        }
    }
    for k1 in &ints {
        for k2 in &ints {
            if k1.is_subset(k2) {
                inclusion_reversing &= ctx.galois_indices(k1).is_superset(&ctx.galois_indices(k2));
            }
        }
    }
    let int_closed: Vec<bool> = ints
        .iter()
        .map(|k| ctx.fixed_of(&ctx.galois_indices(k)) == *k)
        .collect();
    let gs_closed: Vec<bool> = gss.iter().map(|h| ctx.closure(h) == *h).collect();
    let intermediate_quasi = quasi_subspaces(ctx.sys, &ctx.space, budget)?
        .into_iter()
        .filter(|k| b.is_subset(k))
        .count();
    let substructures = match ctx.substructures(&ctx.galois_indices(b), budget) {
        Ok(v) => Some(v.len()),
        Err(GgtError::Budget { .. }) => None,
        Err(e) => return Err(e),
    };
    let verdict = bijective
        && mutually_inverse
        && inclusion_reversing
        && int_closed.iter().all(|&x| x)
        && gs_closed.iter().all(|&x| x);
    Ok(CorrespondenceReport {
        kind: ctx.kind,
        int_family: ints,
        gs_family: gss.iter().map(Subset::to_vec).collect(),
        gamma,
        delta,
        bijective,
        mutually_inverse,
        inclusion_reversing,
        int_closed,
        gs_closed,
        intermediate_quasi,
        substructures,
        verdict,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LatticeReport {
    /// How joins in the lattice of quasi-subspaces are formed.
    pub sub_join: &'static str,
    pub sub_complete: Check,
    pub int_end_meets: Check,
    pub int_aut_meets: Check,
    pub gsmn_meets: Check,
    pub gsgr_meets: Check,
    pub int_end_joins: Check,
    pub int_aut_joins: Check,
    pub gsmn_joins: Check,
    pub gsgr_joins: Check,
}

/// Pairwise meet check over a family; finite meets suffice on a finite lattice.
fn meets_check(fam: &[Subset], show: impl Fn(&Subset) -> Vec<usize>) -> Check {
    let set: BTreeSet<&Subset> = fam.iter().collect();
    for a in fam {
        for b in fam {
            let m = a.intersection(b);
            if !set.contains(&m) {
                return Check::Fail {
                    witness: Witness::Join {
                        left: show(a),
                        right: show(b),
                        join: show(&m),
                    },
                };
            }
        }
    }
    Check::Pass
}

fn joins_check(
    fam: &[Subset],
    join: impl Fn(&Subset, &Subset) -> Result<Subset>,
    show: impl Fn(&Subset) -> Vec<usize>,
) -> Result<Check> {
    let set: BTreeSet<&Subset> = fam.iter().collect();
    for (i, a) in fam.iter().enumerate() {
        for b in &fam[i + 1..] {
            let j = join(a, b)?;
            if !set.contains(&j) {
                return Ok(Check::Fail {
                    witness: Witness::Join {
                        left: show(a),
                        right: show(b),
                        join: show(&j),
                    },
                });
            }
        }
    }
    Ok(Check::Pass)
}

/// Lattice facts for `S` over `B`. Morphism-family witnesses list ambient member indices.
pub fn lattice_report(
    sys: &OperationSystem,
    s: &Subset,
    b: &Subset,
    budget: &Budget,
) -> Result<LatticeReport> {
    let end = GaloisContext::new(sys, s, Kind::End, budget)?;
    let aut = GaloisContext::new(sys, s, Kind::Aut, budget)?;
    let subs = quasi_subspaces(sys, s, budget)?;
    let elems = |x: &Subset| x.to_vec();
    let sub_join = if sys.tier == Tier::Unary {
        "union"
    } else {
        "generated quasi-subspace"
    };
    let gen_join = |x: &Subset, y: &Subset| generated_quasi_subspace(sys, s, &x.union(y));
    let sub_complete = match meets_check(&subs, elems) {
        Check::Pass if sys.tier == Tier::Unary => {
            joins_check(&subs, |x, y| Ok(x.union(y)), elems)?
        }
        other => other,
    };
    let int_end = end.int_family(b)?;
    let int_aut = aut.int_family(b)?;
    let gsmn = end.gs_family(b)?;
    let gsgr = aut.gs_family(b)?;
    Ok(LatticeReport {
        sub_join,
        sub_complete,
        int_end_meets: meets_check(&int_end, elems),
        int_aut_meets: meets_check(&int_aut, elems),
        gsmn_meets: meets_check(&gsmn, elems),
        gsgr_meets: meets_check(&gsgr, elems),
        int_end_joins: joins_check(&int_end, gen_join, elems)?,
        int_aut_joins: joins_check(&int_aut, gen_join, elems)?,
        gsmn_joins: joins_check(&gsmn, |x, y| Ok(end.generated(&x.union(y))), elems)?,
        gsgr_joins: joins_check(&gsgr, |x, y| Ok(aut.generated(&x.union(y))), elems)?,
    })
}

/// The correspondence for any finite family of maps given only by what each member fixes.
#[derive(Clone, Debug, Serialize)]
pub struct AbstractCorrespondence {
    pub int_family: Vec<Subset>,
    pub gs_family: Vec<Subset>,
    pub bijective: bool,
    pub mutually_inverse: bool,
    pub inclusion_reversing: bool,
}

impl AbstractCorrespondence {
    pub fn holds(&self) -> bool {
        self.bijective && self.mutually_inverse && self.inclusion_reversing
    }
}

/// `fixed[i]` is the set of points member `i` fixes; `b` is the base.
pub fn abstract_correspondence(points: &Subset, fixed: &[Subset], b: &Subset) -> AbstractCorrespondence {
    let fix_of = |h: &Subset| h.iter().fold(points.clone(), |acc, i| acc.intersection(&fixed[i]));
    let gal = |k: &Subset| -> Subset { (0..fixed.len()).filter(|&i| k.is_subset(&fixed[i])).collect() };
    let ints: Vec<Subset> = meet_closure(points.clone(), fixed.iter())
        .into_iter()
        .filter(|k| b.is_subset(k))
        .collect();
    let base = gal(b);
    let pieces: Vec<Subset> = points
        .difference(b)
        .iter()
        .map(|x| base.intersection(&gal(&Subset::singleton(x))))
        .collect();
    let gss: Vec<Subset> = meet_closure(base, pieces.iter()).into_iter().collect();
    let int_set: BTreeSet<&Subset> = ints.iter().collect();
    let gs_set: BTreeSet<&Subset> = gss.iter().collect();
    let gamma: Vec<Subset> = gss.iter().map(fix_of).collect();
    let delta: Vec<Subset> = ints.iter().map(gal).collect();
    let bijective = ints.len() == gss.len()
        && gamma.iter().all(|k| int_set.contains(k))
        && gamma.iter().collect::<BTreeSet<_>>().len() == ints.len()
        && delta.iter().all(|h| gs_set.contains(h));
    let mutually_inverse = gss.iter().zip(&gamma).all(|(h, k)| gal(k) == *h)
        && ints.iter().zip(&delta).all(|(k, h)| fix_of(h) == *k);
    let mut inclusion_reversing = true;
    for (i, h1) in gss.iter().enumerate() {
        for (j, h2) in gss.iter().enumerate() {
            if h1.is_subset(h2) {
                inclusion_reversing &= gamma[i].is_superset(&gamma[j]);
            }
        }
    }
    for (i, k1) in ints.iter().enumerate() {
        for (j, k2) in ints.iter().enumerate() {
            if k1.is_subset(k2) {
                inclusion_reversing &= delta[i].is_superset(&delta[j]);
            }
        }
    }
    AbstractCorrespondence {
        int_family: ints,
        gs_family: gss,
        bijective,
        mutually_inverse,
        inclusion_reversing,
    }
}
