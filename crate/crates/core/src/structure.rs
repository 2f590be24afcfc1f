//! Further constructions on T-spaces: accommodating systems and duality, core fixed sets with
//! transitivity, stable and normal subsets with the restriction homomorphism, quotients of
//! θ-morphisms, splitting spaces with decomposition chains, and extensional transcendence.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::carrier::{validate_system, Carrier, Operation, OperationSystem, Repr, Tier, Tuples};
use crate::error::{GgtError, Result};
use crate::galois::GaloisContext;
use crate::limits::{Budget, Tri};
use crate::morphism::{
    all_functions, arrow_sets, enumerate_morphisms, invert_theta_isomorphism, is_theta_morphism,
    theta_is_map_on, Kind, Morphism, ThetaRelation,
};
use crate::subset::Subset;
use crate::tspace::{generate_space, is_quasi_space, is_t_space};
use crate::witness::{Term, TermArg, Witness};

fn require_space(sys: &OperationSystem, s: &Subset) -> Result<()> {
    if s.iter().any(|x| x >= sys.n()) {
        return Err(GgtError::usage("subset leaves the carrier"));
    }
    if !is_quasi_space(sys, s)? {
        return Err(GgtError::usage("the subset is not closed under the operations"));
    }
    Ok(())
}

fn require_unary(sys: &OperationSystem) -> Result<()> {
    if sys.tier != Tier::Unary {
        return Err(GgtError::usage("this construction needs a unary system"));
    }
    Ok(())
}

/// Positions of the elements of `s`, `usize::MAX` elsewhere.
fn positions(n: usize, s: &Subset) -> Vec<usize> {
    let mut pos = vec![usize::MAX; n];
    for (i, x) in s.iter().enumerate() {
        pos[x] = i;
    }
    pos
}

fn local_compose(f: &[usize], g: &[usize]) -> Vec<usize> {
    g.iter().map(|&x| f[x]).collect()
}

fn commute(f: &[usize], g: &[usize]) -> bool {
    g.iter().zip(f).all(|(&gx, &fx)| f[gx] == g[fx])
}

fn is_perm(f: &[usize]) -> bool {
    f.iter().collect::<BTreeSet<_>>().len() == f.len()
}

/// Members of `End_T(S)` or `Aut_T(S)` as local image lists on `S`.
fn local_members(sys: &OperationSystem, s: &Subset, kind: Kind, budget: &Budget) -> Result<Vec<Vec<usize>>> {
    let pos = positions(sys.n(), s);
    Ok(enumerate_morphisms(sys, s, kind, budget)?
        .iter()
        .map(|m| m.images().iter().map(|&y| pos[y]).collect())
        .collect())
}

/// `T|_S` as local image lists; assumes `S` is closed.
fn restricted_members(sys: &OperationSystem, s: &Subset) -> BTreeSet<Vec<usize>> {
    let pos = positions(sys.n(), s);
    sys.unary_members()
        .iter()
        .map(|op| {
            let m = op.as_map().expect("unary");
            s.iter().map(|x| pos[m[x]]).collect()
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct Accommodating {
    /// Members as image lists on the whole carrier.
    pub maps: Vec<Vec<usize>>,
    pub closed: bool,
    pub contains_t: bool,
}

/// `T_End(S)` or `T_Aut(S)`: self-maps of the carrier keeping `S` inside `S` and commuting on
/// `S` with every endomorphism (automorphism) of `S`.
pub fn accommodating_system(sys: &OperationSystem, s: &Subset, kind: Kind, budget: &Budget) -> Result<Accommodating> {
    require_unary(sys)?;
    require_space(sys, s)?;
    let n = sys.n();
    let members = enumerate_morphisms(sys, s, kind, budget)?;
    let maps: Vec<Vec<usize>> = all_functions(n, n, budget)?
        .into_iter()
        .filter(|f| {
            s.iter().all(|a| s.contains(f[a]))
                && members
                    .iter()
                    .all(|sg| s.iter().all(|a| sg.get(f[a]) == Some(f[sg.get(a).expect("total")])))
        })
        .collect();
    let set: BTreeSet<&Vec<usize>> = maps.iter().collect();
    let closed = maps
        .iter()
        .all(|f| maps.iter().all(|g| set.contains(&local_compose(f, g))));
    let contains_t = sys
        .unary_members()
        .iter()
        .all(|op| set.contains(&op.as_map().expect("unary")));
    Ok(Accommodating { maps, closed, contains_t })
}

/// The accommodating system as an explicit operation system.
pub fn accommodating_as_system(sys: &OperationSystem, acc: &Accommodating) -> Result<OperationSystem> {
    let ops = acc
        .maps
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let name = if m.iter().enumerate().all(|(x, &y)| x == y) {
                "Id".to_string()
            } else {
                format!("a{i}")
            };
            Operation::unary(name, m)
        })
        .collect();
    OperationSystem::new(sys.carrier.clone(), Tier::Unary, Repr::Explicit, ops)
}

#[derive(Clone, Debug, Serialize)]
pub struct DualityReport {
    pub kind: Kind,
    /// `|T|_S|`.
    pub restricted: usize,
    /// `|End_T(S)|` or `|Aut_T(S)|`.
    pub morphisms: usize,
    /// The morphisms form an operator semigroup on `S` containing the identity.
    pub morphisms_semigroup: bool,
    pub accommodating: usize,
    pub accommodating_closed: bool,
    pub accommodating_contains_t: bool,
    /// Every member of `T` is bijective on `S` (automorphism kind only).
    pub t_bijective: Option<bool>,
    /// Every accommodating map is bijective on `S` (automorphism kind only).
    pub accommodating_bijective: Option<bool>,
    /// Size of the second commutant `End_{T*}(S)` or `Aut_{T#}(S)`.
    pub dual: usize,
    /// `dual ⊇ T|_S`, when asserted.
    pub contains: Option<bool>,
    pub equality: bool,
    /// `T|_S` equals the restriction of the accommodating system.
    pub restrictions_equal: bool,
    /// `equality ⇔ restrictions_equal`, when asserted.
    pub biconditional: Option<bool>,
    pub violation: bool,
}

pub fn verify_duality(sys: &OperationSystem, s: &Subset, kind: Kind, budget: &Budget) -> Result<DualityReport> {
    let acc = accommodating_system(sys, s, kind, budget)?;
    let k = s.len();
    let pos = positions(sys.n(), s);
    let t_s = restricted_members(sys, s);
    let star = local_members(sys, s, kind, budget)?;
    let star_set: BTreeSet<&Vec<usize>> = star.iter().collect();
    let id: Vec<usize> = (0..k).collect();
    let morphisms_semigroup =
        star_set.contains(&id) && star.iter().all(|f| star.iter().all(|g| star_set.contains(&local_compose(f, g))));
    let acc_s: BTreeSet<Vec<usize>> = acc.maps.iter().map(|f| s.iter().map(|x| pos[f[x]]).collect()).collect();
    let dual: BTreeSet<Vec<usize>> = all_functions(k, k, budget)?
        .into_iter()
        .filter(|h| (kind == Kind::End || is_perm(h)) && star.iter().all(|sg| commute(h, sg)))
        .collect();
    let contains_raw = t_s.is_subset(&dual);
    let equality = dual == t_s;
    let restrictions_equal = acc_s == t_s;
    let (t_bijective, accommodating_bijective, asserted_contains, asserted_bicond) = match kind {
        Kind::End => (None, None, true, true),
        Kind::Aut => {
            let tb = t_s.iter().all(|f| is_perm(f));
            let ab = acc_s.iter().all(|f| is_perm(f));
            (Some(tb), Some(ab), tb, ab)
        }
    };
    let contains = asserted_contains.then_some(contains_raw);
    let biconditional = asserted_bicond.then_some(equality == restrictions_equal);
    let violation = !morphisms_semigroup
        || !acc.closed
        || !acc.contains_t
        || contains == Some(false)
        || biconditional == Some(false);
    Ok(DualityReport {
        kind,
        restricted: t_s.len(),
        morphisms: star.len(),
        morphisms_semigroup,
        accommodating: acc.maps.len(),
        accommodating_closed: acc.closed,
        accommodating_contains_t: acc.contains_t,
        t_bijective,
        accommodating_bijective,
        dual: dual.len(),
        contains,
        equality,
        restrictions_equal,
        biconditional,
        violation,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CoreSets {
    pub c_end: Subset,
    pub c_aut: Subset,
    /// `[u)_T ∩ S` per element of `S`.
    pub fronts: BTreeMap<usize, Subset>,
    /// `[u]_T ∩ S` per element of `S`.
    pub classes: BTreeMap<usize, Subset>,
}

pub fn core_fixed_sets(sys: &OperationSystem, s: &Subset) -> Result<CoreSets> {
    let mut out = CoreSets {
        c_end: Subset::new(),
        c_aut: Subset::new(),
        fronts: BTreeMap::new(),
        classes: BTreeMap::new(),
    };
    for u in s.iter() {
        let a = arrow_sets(sys, u, s)?;
        if a.front == Subset::singleton(u) {
            out.c_end.insert(u);
        }
        if a.class == Subset::singleton(u) {
            out.c_aut.insert(u);
        }
        out.fronts.insert(u, a.front);
        out.classes.insert(u, a.class);
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct TransitivityReport {
    pub kind: Kind,
    pub core: Subset,
    pub identity_in_t: bool,
    /// An element off the core that does not generate `S`.
    pub non_generating: Option<usize>,
    pub applicable: bool,
    /// `(u, v, σ)` with `σ(u) = v`, `σ` given as a member index.
    pub witnesses: Vec<(usize, usize, usize)>,
    /// Arrow pairs with no member sending `u` to `v`.
    pub missing: Vec<(usize, usize)>,
    /// `S` fixed by all of `End_T(S)` (or `Aut_T(S)`).
    pub fixed: Subset,
    /// `core ⊆ fixed`, checked on every instance.
    pub containment: bool,
    pub core_equals_fixed: Option<bool>,
    pub violation: bool,
}

pub fn verify_transitivity(sys: &OperationSystem, s: &Subset, kind: Kind, budget: &Budget) -> Result<TransitivityReport> {
    require_space(sys, s)?;
    let cores = core_fixed_sets(sys, s)?;
    let (core, rel) = match kind {
        Kind::End => (cores.c_end.clone(), &cores.fronts),
        Kind::Aut => (cores.c_aut.clone(), &cores.classes),
    };
    let identity_in_t = sys.contains_identity();
    let mut non_generating = None;
    for a in s.difference(&core).iter() {
        if generate_space(sys, &Subset::singleton(a))? != *s {
            non_generating = Some(a);
            break;
        }
    }
    let applicable = identity_in_t && non_generating.is_none();
    let members = enumerate_morphisms(sys, s, kind, budget)?;
    let mut witnesses = Vec::new();
    let mut missing = Vec::new();
    for (&u, vs) in rel {
        for v in vs.iter() {
            match members.iter().position(|m| m.get(u) == Some(v)) {
                Some(i) => witnesses.push((u, v, i)),
                None => missing.push((u, v)),
            }
        }
    }
    let fixed = crate::galois::fixed_set(s, &members);
    let containment = core.is_subset(&fixed);
    let core_equals_fixed = applicable.then_some(core == fixed);
    let violation = !containment || applicable && (!missing.is_empty() || core_equals_fixed == Some(false));
    Ok(TransitivityReport {
        kind,
        core,
        identity_in_t,
        non_generating,
        applicable,
        witnesses,
        missing,
        fixed,
        containment,
        core_equals_fixed,
        violation,
    })
}

/// A member of `h` moving an element of `k` outside `k`.
pub fn stability_witness(k: &Subset, h: &[Morphism]) -> Option<Witness> {
    h.iter().find_map(|m| {
        k.iter().find_map(|a| {
            let v = m.get(a)?;
            (!k.contains(v)).then(|| Witness::Unstable {
                map: m.table().to_vec(),
                element: a,
                image: v,
            })
        })
    })
}

pub fn is_stable(k: &Subset, h: &[Morphism]) -> bool {
    stability_witness(k, h).is_none()
}

/// `(a, v)` with `a ∈ K`, `v ∈ [a]_T ∩ S` and `v ∉ K`.
pub fn normality_witness(sys: &OperationSystem, k: &Subset, s: &Subset) -> Result<Option<(usize, usize)>> {
    if !k.is_subset(s) {
        return Err(GgtError::usage("K is not contained in S"));
    }
    for a in k.iter() {
        let class = arrow_sets(sys, a, s)?.class;
        if let Some(v) = Subset::min(&class.difference(k)) {
            return Ok(Some((a, v)));
        }
    }
    Ok(None)
}

pub fn is_normal_t_subset(sys: &OperationSystem, k: &Subset, s: &Subset) -> Result<bool> {
    Ok(normality_witness(sys, k, s)?.is_none())
}

/// A group given by its Cayley table with identity `e`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CayleyGroup {
    pub table: Vec<Vec<usize>>,
    pub identity: usize,
}

impl CayleyGroup {
    pub fn order(&self) -> usize {
        self.table.len()
    }

    fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != self.identity {
            x = self.table[x][g];
            k += 1;
        }
        k
    }

    /// The subgroup generated by `gens`, as a sorted element list.
    fn span(&self, gens: &[usize]) -> BTreeSet<usize> {
        let mut out = BTreeSet::from([self.identity]);
        let mut frontier = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.table[x][g];
                if out.insert(y) {
                    frontier.push(y);
                }
            }
        }
        out
    }
}

/// An isomorphism `a → b` as an element map, by backtracking over images of a generating set.
pub fn find_group_isomorphism(a: &CayleyGroup, b: &CayleyGroup) -> Option<Vec<usize>> {
    if a.order() != b.order() {
        return None;
    }
    let mut gens = Vec::new();
    let mut span = a.span(&gens);
    for g in 0..a.order() {
        if !span.contains(&g) {
            gens.push(g);
            span = a.span(&gens);
        }
    }
    let orders_b: Vec<usize> = (0..b.order()).map(|x| b.element_order(x)).collect();
    let mut images = Vec::new();
    search(a, b, &gens, &orders_b, &mut images)
}

fn search(a: &CayleyGroup, b: &CayleyGroup, gens: &[usize], orders_b: &[usize], images: &mut Vec<usize>) -> Option<Vec<usize>> {
    if images.len() == gens.len() {
        return extend(a, b, gens, images);
    }
    let want = a.element_order(gens[images.len()]);
    for cand in 0..b.order() {
        if orders_b[cand] != want {
            continue;
        }
        images.push(cand);
        if let Some(m) = search(a, b, gens, orders_b, images) {
            return Some(m);
        }
        images.pop();
    }
    None
}

fn extend(a: &CayleyGroup, b: &CayleyGroup, gens: &[usize], images: &[usize]) -> Option<Vec<usize>> {
    let mut map = vec![usize::MAX; a.order()];
    map[a.identity] = b.identity;
    let mut frontier = vec![a.identity];
    while let Some(x) = frontier.pop() {
        for (&g, &img) in gens.iter().zip(images) {
            let y = a.table[x][g];
            let fy = b.table[map[x]][img];
            if map[y] == usize::MAX {
                map[y] = fy;
                frontier.push(y);
            } else if map[y] != fy {
                return None;
            }
        }
    }
    let hom = (0..a.order()).all(|x| (0..a.order()).all(|y| map[a.table[x][y]] == b.table[map[x]][map[y]]));
    (hom && is_perm(&map)).then_some(map)
}

fn subgroup_table(ctx: &GaloisContext, elems: &[usize]) -> CayleyGroup {
    let pos: BTreeMap<usize, usize> = elems.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    CayleyGroup {
        table: elems
            .iter()
            .map(|&g| elems.iter().map(|&h| pos[&ctx.compose(g, h)]).collect())
            .collect(),
        identity: pos[&ctx.identity],
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SufficientConditions {
    /// `B = S^{GGr(S/B)}`.
    pub base_closed: bool,
    /// `K = S^{GGr(S/K)}`.
    pub sub_closed: bool,
    pub kernel_normal: bool,
    /// Every member of `GGr(K/B)` extends to a member of `GGr(S/B)`.
    pub extendable: bool,
    pub stable: bool,
    pub normal_subset: bool,
    /// Hypotheses with a normal kernel.
    pub via_normal_kernel: bool,
    /// Hypotheses with stability.
    pub via_stability: bool,
    /// Hypotheses with a normal T-subset.
    pub via_normal_subset: bool,
    /// `B = K^{GGr(K/B)}`.
    pub conclusion: bool,
    /// Some bundle of hypotheses holds but the conclusion fails.
    pub violation: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct RestrictionReport {
    pub group_order: usize,
    pub stable: bool,
    pub unstable: Option<Witness>,
    /// `γ(σ)` as an index into `Aut_T(K)` for each member of `GGr(S/B)`.
    pub gamma: Option<Vec<usize>>,
    pub homomorphism: Option<bool>,
    pub kernel: Option<Vec<usize>>,
    pub kernel_is_fixing_group: Option<bool>,
    pub kernel_normal: Option<bool>,
    pub image_order: Option<usize>,
    /// Cosets of the kernel match the image bijectively and multiplicatively.
    pub quotient_matches_image: Option<bool>,
    /// `|GGr(K/B)|`, when `K` is closed.
    pub target_order: Option<usize>,
    /// Quotient isomorphic to `GGr(K/B)` as abstract groups.
    pub quotient_isomorphic_to_target: Option<bool>,
    pub conditions: Option<SufficientConditions>,
    pub violation: bool,
}

/// `γ: GGr(S/B) → GGr(K/B)`, `σ ↦ σ|_K`, with its kernel and quotient.
pub fn restriction_homomorphism(
    sys: &OperationSystem,
    s: &Subset,
    b: &Subset,
    k: &Subset,
    budget: &Budget,
) -> Result<RestrictionReport> {
    if !b.is_subset(k) || !k.is_subset(s) {
        return Err(GgtError::usage("need B ⊆ K ⊆ S"));
    }
    let ctx = GaloisContext::new(sys, s, Kind::Aut, budget)?;
    let g: Vec<usize> = ctx.galois_indices(b).to_vec();
    let group: Vec<Morphism> = g.iter().map(|&i| ctx.members[i].clone()).collect();
    let unstable = stability_witness(k, &group);
    let stable = unstable.is_none();
    let mut report = RestrictionReport {
        group_order: g.len(),
        stable,
        unstable,
        gamma: None,
        homomorphism: None,
        kernel: None,
        kernel_is_fixing_group: None,
        kernel_normal: None,
        image_order: None,
        quotient_matches_image: None,
        target_order: None,
        quotient_isomorphic_to_target: None,
        conditions: None,
        violation: false,
    };
    let k_closed = is_quasi_space(sys, k)?;
    if !stable || !k_closed {
        return Ok(report);
    }
    let kctx = GaloisContext::new(sys, k, Kind::Aut, budget)?;
    let mut gamma = Vec::with_capacity(g.len());
    for &i in &g {
        let mut r = ctx.members[i].restrict(k);
        r.target = k.clone();
        match kctx.index_of(&r) {
            Some(j) => gamma.push(j),
            None => {
                report.violation = true;
                return Ok(report);
            }
        }
    }
    let pos: BTreeMap<usize, usize> = g.iter().enumerate().map(|(p, &i)| (i, p)).collect();
    let homomorphism = g.iter().enumerate().all(|(p, &x)| {
        g.iter()
            .enumerate()
            .all(|(q, &y)| gamma[pos[&ctx.compose(x, y)]] == kctx.compose(gamma[p], gamma[q]))
    });
    let kernel: Vec<usize> = g
        .iter()
        .enumerate()
        .filter(|&(p, _)| gamma[p] == kctx.identity)
        .map(|(_, &i)| i)
        .collect();
    let kernel_set: BTreeSet<usize> = kernel.iter().copied().collect();
    let fixing: BTreeSet<usize> = ctx.galois_indices(k).iter().collect();
    let kernel_is_fixing_group = kernel_set == fixing;
    let kernel_normal = g.iter().all(|&x| {
        let xi = ctx.inverse(x).expect("group");
        kernel.iter().all(|&n| kernel_set.contains(&ctx.compose(ctx.compose(x, n), xi)))
    });
    // Cosets xN, keyed by their sorted member list.
    let mut cosets: Vec<BTreeSet<usize>> = Vec::new();
    let mut coset_of = BTreeMap::new();
    for &x in &g {
        let c: BTreeSet<usize> = kernel.iter().map(|&n| ctx.compose(x, n)).collect();
        let id = match cosets.iter().position(|d| *d == c) {
            Some(id) => id,
            None => {
                cosets.push(c);
                cosets.len() - 1
            }
        };
        coset_of.insert(x, id);
    }
    let reps: Vec<usize> = cosets.iter().map(|c| *c.iter().next().expect("nonempty")).collect();
    let quotient = CayleyGroup {
        table: reps
            .iter()
            .map(|&x| reps.iter().map(|&y| coset_of[&ctx.compose(x, y)]).collect())
            .collect(),
        identity: coset_of[&ctx.identity],
    };
    let image: BTreeSet<usize> = gamma.iter().copied().collect();
    let coset_image: Vec<BTreeSet<usize>> = cosets
        .iter()
        .map(|c| c.iter().map(|x| gamma[pos[x]]).collect())
        .collect();
    let well_defined = coset_image.iter().all(|s| s.len() == 1);
    let phi: Vec<usize> = coset_image.iter().map(|s| *s.iter().next().expect("nonempty")).collect();
    let quotient_matches_image = well_defined
        && phi.iter().collect::<BTreeSet<_>>().len() == phi.len()
        && phi.len() == image.len()
        && (0..reps.len()).all(|x| {
            (0..reps.len()).all(|y| phi[quotient.table[x][y]] == kctx.compose(phi[x], phi[y]))
        });
    let target: Vec<usize> = kctx.galois_indices(b).to_vec();
    let target_group = subgroup_table(&kctx, &target);
    let quotient_isomorphic_to_target = find_group_isomorphism(&quotient, &target_group).is_some();
    let extendable = target.iter().all(|t| image.contains(t));
    let base_closed = ctx.fixed_of(&ctx.galois_indices(b)) == *b;
    let sub_closed = ctx.fixed_of(&ctx.galois_indices(k)) == *k;
    let normal_subset = is_normal_t_subset(sys, k, s)?;
    let conclusion = kctx.fixed_of(&kctx.galois_indices(b)) == *b;
    let closed = base_closed && sub_closed && extendable;
    let via_normal_kernel = closed && kernel_normal;
    let via_stability = closed && stable;
    let via_normal_subset = closed && normal_subset;
    let cond_violation = (via_normal_kernel || via_stability || via_normal_subset) && !conclusion;
    report.violation =
        !homomorphism || !kernel_is_fixing_group || !kernel_normal || !quotient_matches_image || cond_violation;
    report.gamma = Some(gamma);
    report.homomorphism = Some(homomorphism);
    report.kernel = Some(kernel);
    report.kernel_is_fixing_group = Some(kernel_is_fixing_group);
    report.kernel_normal = Some(kernel_normal);
    report.image_order = Some(image.len());
    report.quotient_matches_image = Some(quotient_matches_image);
    report.target_order = Some(target.len());
    report.quotient_isomorphic_to_target = Some(quotient_isomorphic_to_target);
    report.conditions = Some(SufficientConditions {
        base_closed,
        sub_closed,
        kernel_normal,
        extendable,
        stable,
        normal_subset,
        via_normal_kernel,
        via_stability,
        via_normal_subset,
        conclusion,
        violation: cond_violation,
    });
    Ok(report)
}

#[derive(Clone, Debug, Serialize)]
pub struct NormalityReport {
    pub subsets_checked: usize,
    pub normal_subsets: usize,
    /// Normal T-subsets not stable under `Aut_T(S)`.
    pub unstable_normal: Vec<Subset>,
    /// Whether the hypotheses on `T` for fixed sets of normal subgroups hold.
    pub fixed_set_hypotheses: bool,
    pub normal_subgroups: usize,
    /// Fixed sets of normal subgroups of `Aut_T(S)` that are not normal T-subsets.
    pub non_normal_fixed_sets: Vec<Subset>,
    pub violation: bool,
}

/// Normal T-subsets against stability, and fixed sets of normal subgroups.
pub fn normality_report(sys: &OperationSystem, s: &Subset, budget: &Budget) -> Result<NormalityReport> {
    let ctx = GaloisContext::new(sys, s, Kind::Aut, budget)?;
    budget.check(crate::limits::Cap::TSpace, "subsets of S", s.len())?;
    let mut classes = BTreeMap::new();
    for a in s.iter() {
        classes.insert(a, arrow_sets(sys, a, s)?.class);
    }
    let normal = |k: &Subset| k.iter().all(|a| classes[&a].is_subset(k));
    let subsets = s.subsets();
    let mut normal_count = 0;
    let mut unstable_normal = Vec::new();
    for k in &subsets {
        if normal(k) {
            normal_count += 1;
            if !is_stable(k, &ctx.members) {
                unstable_normal.push(k.clone());
            }
        }
    }
    let cores = core_fixed_sets(sys, s)?;
    let mut fixed_set_hypotheses = sys.contains_identity();
    for a in s.difference(&cores.c_aut).iter() {
        fixed_set_hypotheses &= generate_space(sys, &Subset::singleton(a))? == *s;
    }
    let all = ctx.all();
    let subgroups = ctx.substructures(&all, budget)?;
    let mut normal_subgroups = 0;
    let mut non_normal_fixed_sets = Vec::new();
    for h in &subgroups {
        let is_normal = all.iter().all(|x| {
            let xi = ctx.inverse(x).expect("group");
            h.iter().all(|n| h.contains(ctx.compose(ctx.compose(x, n), xi)))
        });
        if is_normal {
            normal_subgroups += 1;
            let f = ctx.fixed_of(h);
            if !normal(&f) {
                non_normal_fixed_sets.push(f);
            }
        }
    }
    let violation = !unstable_normal.is_empty() || fixed_set_hypotheses && !non_normal_fixed_sets.is_empty();
    Ok(NormalityReport {
        subsets_checked: subsets.len(),
        normal_subsets: normal_count,
        unstable_normal,
        fixed_set_hypotheses,
        normal_subgroups,
        non_normal_fixed_sets,
        violation,
    })
}

/// Fibers of a map, ordered by least member.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientSpace {
    pub classes: Vec<Subset>,
    pub class_of: Vec<Option<usize>>,
    /// Image value of each class.
    pub values: Vec<usize>,
}

pub fn quotient_of_morphism(phi: &Morphism) -> QuotientSpace {
    let mut by_value: BTreeMap<usize, Subset> = BTreeMap::new();
    for x in phi.source.iter() {
        by_value.entry(phi.get(x).expect("total")).or_default().insert(x);
    }
    let mut classes: Vec<(Subset, usize)> = by_value.into_iter().map(|(v, c)| (c, v)).collect();
    classes.sort_by_key(|(c, _)| c.min());
    let mut class_of = vec![None; phi.table().len()];
    for (i, (c, _)) in classes.iter().enumerate() {
        for x in c.iter() {
            class_of[x] = Some(i);
        }
    }
    QuotientSpace {
        values: classes.iter().map(|(_, v)| *v).collect(),
        classes: classes.into_iter().map(|(c, _)| c).collect(),
        class_of,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QuotientSystem {
    pub quotient: QuotientSpace,
    /// `{Id} ∪ T*` on the classes; operation 0 is `Id`.
    #[serde(skip)]
    pub system: OperationSystem,
    /// Index in `system` of `f*` for each operation `f` of the source system.
    pub star_of: Vec<usize>,
    pub theta_star: ThetaRelation,
    /// Every `f*` is single-valued.
    pub well_defined: bool,
    /// Composites are restrictions of members; `None` when not checked.
    pub closed: Option<bool>,
}

/// `T#_φ` on `Q_φ` and `θ*`.
pub fn quotient_system(
    sys1: &OperationSystem,
    sys2: &OperationSystem,
    theta: &ThetaRelation,
    phi: &Morphism,
) -> Result<QuotientSystem> {
    if let Some(w) = is_theta_morphism(sys1, sys2, theta, phi)? {
        return Err(GgtError::usage(format!("φ is not a θ-morphism: {w:?}")));
    }
    let q = quotient_of_morphism(phi);
    let qn = q.classes.len();
    let dom = phi.source.to_vec();
    let mut well_defined = true;
    let mut ops = vec![Operation::identity(qn).with_name("Id")];
    let mut star_of = Vec::with_capacity(sys1.ops.len());
    for f in &sys1.ops {
        let k = f.arity();
        let mut table: Vec<Option<usize>> = vec![None; qn.pow(k as u32)];
        let mut t = Tuples::new(&dom, k);
        while let Some(args) = t.next() {
            if let Some(v) = f.eval(args) {
                let idx = args
                    .iter()
                    .fold(0, |acc, &a| acc * qn + q.class_of[a].expect("in domain"));
                let c = q.class_of[v].expect("domain is closed");
                match table[idx] {
                    Some(old) if old != c => well_defined = false,
                    _ => table[idx] = Some(c),
                }
            }
        }
        let op = Operation::new(format!("{}*", f.name), qn, k, table)?;
        match ops.iter().skip(1).position(|o| *o == op) {
            Some(i) => star_of.push(i + 1),
            None => {
                star_of.push(ops.len());
                ops.push(op);
            }
        }
    }
    let labels = q.classes.iter().map(|c| {
        let names: Vec<&str> = c.iter().map(|x| sys1.carrier.label(x)).collect();
        format!("[{}]", names.join(","))
    });
    let system = OperationSystem::new(Carrier::new(labels)?, Tier::PartialGeneralized, sys1.repr, ops)?;
    let pairs = theta.pairs.iter().map(|&(f, g)| (star_of[f], g)).collect();
    let theta_star = ThetaRelation::new(pairs, &system, sys2)?;
    let closed = if system.repr == Repr::Explicit {
        match validate_system(&system) {
            Ok(r) => Some(r.closed),
            Err(GgtError::Budget { .. }) => None,
            Err(e) => return Err(e),
        }
    } else {
        None
    };
    Ok(QuotientSystem {
        quotient: q,
        system,
        star_of,
        theta_star,
        well_defined,
        closed,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FirstIsoReport {
    pub theta_morphism: bool,
    pub image: Subset,
    pub image_space: Tri,
    pub applicable: bool,
    pub classes: usize,
    pub well_defined: Option<bool>,
    pub closed: Option<bool>,
    /// `θ*` restricted to the image is a map.
    pub theta_star_map: Option<bool>,
    pub bijective: Option<bool>,
    pub star_morphism: Option<bool>,
    /// The inverse passes against the inverted relation.
    pub inverse_check: Option<bool>,
    pub holds: Option<bool>,
    pub violation: bool,
    pub witness: Option<Witness>,
}

pub fn verify_first_isomorphism(
    sys1: &OperationSystem,
    sys2: &OperationSystem,
    theta: &ThetaRelation,
    phi: &Morphism,
    budget: &Budget,
) -> Result<FirstIsoReport> {
    let image = phi.image();
    let tm = is_theta_morphism(sys1, sys2, theta, phi)?;
    let mut r = FirstIsoReport {
        theta_morphism: tm.is_none(),
        image: image.clone(),
        image_space: Tri::Indeterminate,
        applicable: false,
        classes: quotient_of_morphism(phi).classes.len(),
        well_defined: None,
        closed: None,
        theta_star_map: None,
        bijective: None,
        star_morphism: None,
        inverse_check: None,
        holds: None,
        violation: false,
        witness: tm,
    };
    if !r.theta_morphism {
        return Ok(r);
    }
    r.image_space = is_t_space(sys2, &image, budget)?.verdict;
    if r.image_space != Tri::True {
        return Ok(r);
    }
    r.applicable = true;
    let qs = quotient_system(sys1, sys2, theta, phi)?;
    let qn = qs.quotient.classes.len();
    let phi_star = Morphism::from_images(qn, &Subset::full(qn), &image, &qs.quotient.values)?;
    let map_w = theta_is_map_on(&qs.theta_star, sys2, &image)?;
    let mor_w = is_theta_morphism(&qs.system, sys2, &qs.theta_star, &phi_star)?;
    let bijective = phi_star.is_bijective();
    let inverse_check = if bijective {
        let (_, _, c) = invert_theta_isomorphism(&qs.system, sys2, &qs.theta_star, &phi_star)?;
        Some(c.passed())
    } else {
        None
    };
    let holds = qs.well_defined && map_w.is_none() && mor_w.is_none() && bijective;
    r.well_defined = Some(qs.well_defined);
    r.closed = qs.closed;
    r.theta_star_map = Some(map_w.is_none());
    r.bijective = Some(bijective);
    r.star_morphism = Some(mor_w.is_none());
    r.inverse_check = inverse_check;
    r.holds = Some(holds);
    r.violation = !holds || qs.closed == Some(false);
    r.witness = map_w.or(mor_w);
    Ok(r)
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct FirstIsoSweep {
    pub relations: usize,
    pub pairs_checked: usize,
    pub theta_morphisms: usize,
    pub applicable: usize,
    pub passed: usize,
    pub failures: Vec<(ThetaRelation, Vec<usize>)>,
}

/// Every total functional `θ: T₁ → T₂` and every map `S₁ → S₂`.
pub fn first_isomorphism_sweep(
    sys1: &OperationSystem,
    s1: &Subset,
    sys2: &OperationSystem,
    s2: &Subset,
    budget: &Budget,
) -> Result<FirstIsoSweep> {
    let m1 = sys1.ops.len();
    let m2 = sys2.ops.len();
    let thetas = all_functions(m1, m2, budget)?;
    let maps = all_functions(s1.len(), s2.len(), budget)?;
    let targets = s2.to_vec();
    let mut out = FirstIsoSweep::default();
    for choice in thetas {
        let pairs: Vec<(usize, usize)> = choice.iter().enumerate().map(|(f, &g)| (f, g)).collect();
        let Ok(theta) = ThetaRelation::new(pairs, sys1, sys2) else {
            continue;
        };
        out.relations += 1;
        for m in &maps {
            out.pairs_checked += 1;
            let images: Vec<usize> = m.iter().map(|&i| targets[i]).collect();
            let phi = Morphism::from_images(sys1.n(), s1, s2, &images)?;
            if is_theta_morphism(sys1, sys2, &theta, &phi)?.is_some() {
                continue;
            }
            out.theta_morphisms += 1;
            let r = verify_first_isomorphism(sys1, sys2, &theta, &phi, budget)?;
            if r.applicable {
                out.applicable += 1;
                if r.holds == Some(true) && !r.violation {
                    out.passed += 1;
                } else {
                    out.failures.push((theta.clone(), images));
                }
            }
        }
    }
    Ok(out)
}

/// A derivation for every element of `⟨leaves⟩_T`, mirroring the generation fixpoint.
pub fn derivations(sys: &OperationSystem, leaves: &Subset) -> Result<BTreeMap<usize, Term>> {
    let base = leaves.to_vec();
    let mut out: BTreeMap<usize, Term> = BTreeMap::new();
    for (i, f) in sys.ops.iter().enumerate() {
        let mut t = Tuples::new(&base, f.arity());
        while let Some(args) = t.next() {
            if let Some(v) = f.eval(args) {
                out.entry(v).or_insert_with(|| Term {
                    op: i,
                    args: args.iter().map(|&a| TermArg::Leaf(a)).collect(),
                });
            }
        }
    }
    if sys.repr == Repr::Generated {
        loop {
            let cur: Vec<usize> = out.keys().copied().collect();
            let mut added = Vec::new();
            for (i, f) in sys.ops.iter().enumerate() {
                let mut t = Tuples::new(&cur, f.arity());
                while let Some(args) = t.next() {
                    if let Some(v) = f.eval(args) {
                        if !out.contains_key(&v) && !added.iter().any(|(x, _)| *x == v) {
                            let term = Term {
                                op: i,
                                args: args.iter().map(|a| TermArg::Node(Box::new(out[a].clone()))).collect(),
                            };
                            added.push((v, term));
                        }
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            out.extend(added);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct SplittingReport {
    pub space: Subset,
    pub base_inside: bool,
    pub reason: Option<String>,
    /// `GGr` and `GMn` of the space over the base, as image lists on the space.
    pub group: Option<Vec<Vec<usize>>>,
    pub monoid: Option<Vec<Vec<usize>>>,
}

pub fn splitting_space(sys: &OperationSystem, u: &Subset, b: &Subset, budget: &Budget) -> Result<SplittingReport> {
    let space = generate_space(sys, u)?;
    let base_inside = b.is_subset(&space);
    let mut r = SplittingReport {
        space: space.clone(),
        base_inside,
        reason: None,
        group: None,
        monoid: None,
    };
    if !base_inside {
        r.reason = Some("the base is not contained in the splitting space".into());
        return Ok(r);
    }
    let members = |kind| -> Result<Vec<Vec<usize>>> {
        let ctx = GaloisContext::new(sys, &space, kind, budget)?;
        Ok(ctx.galois_indices(b).iter().map(|i| ctx.members[i].images()).collect())
    };
    r.group = Some(members(Kind::Aut)?);
    r.monoid = Some(members(Kind::End)?);
    Ok(r)
}

/// One decomposition step: solutions of an auxiliary equation and its system.
pub struct ChainStep<'a> {
    pub system: &'a OperationSystem,
    pub solutions: Subset,
    /// A recorded `B_i` to compare with the generated one.
    pub declared: Option<Subset>,
}

#[derive(Clone, Debug, Serialize)]
pub struct StepReport {
    pub generated: Subset,
    pub declared_matches: Option<bool>,
    /// Every element of the generated set has a derivation from `B_{i-1} ∪ U_i`.
    pub derivable: bool,
    pub derivations: BTreeMap<usize, Term>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChainReport {
    pub steps: Vec<StepReport>,
    pub target: Subset,
    pub inclusion: bool,
    pub missing: Option<Witness>,
    /// Condition (i) is read as derivation traces; formulas are not otherwise defined.
    pub reading: &'static str,
    pub holds: bool,
}

pub fn verify_decomposition_chain(
    b0: &Subset,
    chain: &[ChainStep],
    target_sys: &OperationSystem,
    target_u: &Subset,
) -> Result<ChainReport> {
    if chain.is_empty() {
        return Err(GgtError::usage("the chain needs at least one step"));
    }
    let n = target_sys.n();
    if chain.iter().any(|c| c.system.n() != n) {
        return Err(GgtError::usage("all chain systems must share the carrier"));
    }
    let mut prev = b0.clone();
    let mut steps = Vec::new();
    for c in chain {
        if c.solutions.is_empty() {
            return Err(GgtError::usage("each step needs a nonempty solution set"));
        }
        let generated = generate_space(c.system, &c.solutions)?;
        let derivs = derivations(c.system, &prev.union(&c.solutions))?;
        let derivable = generated.iter().all(|x| derivs.contains_key(&x));
        let kept: BTreeMap<usize, Term> = derivs.into_iter().filter(|(x, _)| generated.contains(*x)).collect();
        steps.push(StepReport {
            declared_matches: c.declared.as_ref().map(|d| *d == generated),
            generated: generated.clone(),
            derivable,
            derivations: kept,
        });
        prev = generated;
    }
    let target = generate_space(target_sys, target_u)?;
    let missing = Subset::min(&target.difference(&prev)).map(|element| Witness::Missing { element });
    let inclusion = missing.is_none();
    let holds = inclusion && steps.iter().all(|s| s.derivable && s.declared_matches != Some(false));
    Ok(ChainReport {
        steps,
        target,
        inclusion,
        missing,
        reading: "derivation-trace",
        holds,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct TranscendenceReport {
    /// Equality of operations means equal tables on this carrier.
    pub equality: &'static str,
    pub tuple: Option<Vec<usize>>,
    pub tuple_transcendental: Option<bool>,
    pub subset: Option<Subset>,
    pub subset_transcendental: Option<bool>,
    pub tuples_checked: usize,
    pub witness: Option<Witness>,
}

/// A collision `f(args) = g(args)` with `f ≠ g` among same-arity members of `family`.
fn collision(sys: &OperationSystem, family: &[usize], args: &[usize]) -> Option<Witness> {
    for (i, &f) in family.iter().enumerate() {
        let a = &sys.ops[f];
        if a.arity() != args.len() {
            continue;
        }
        for &g in &family[i + 1..] {
            let b = &sys.ops[g];
            if b.arity() != args.len() || a == b {
                continue;
            }
            if let (Some(x), Some(y)) = (a.eval(args), b.eval(args)) {
                if x == y {
                    return Some(Witness::Transcendence { f, g, args: args.to_vec(), value: x });
                }
            }
        }
    }
    None
}

/// Extensional transcendence of a tuple and/or of a subset under the operations `family`.
pub fn transcendental_report(
    sys: &OperationSystem,
    family: &[usize],
    tuple: Option<&[usize]>,
    subset: Option<&Subset>,
) -> Result<TranscendenceReport> {
    if let Some(&bad) = family.iter().find(|&&f| f >= sys.ops.len()) {
        return Err(GgtError::DanglingRef(format!("operation index {bad}")));
    }
    let n = sys.n();
    let mut r = TranscendenceReport {
        equality: "extensional",
        tuple: tuple.map(<[usize]>::to_vec),
        tuple_transcendental: None,
        subset: subset.cloned(),
        subset_transcendental: None,
        tuples_checked: 0,
        witness: None,
    };
    if let Some(t) = tuple {
        if t.iter().any(|&x| x >= n) {
            return Err(GgtError::usage("tuple leaves the carrier"));
        }
        r.tuples_checked += 1;
        let w = collision(sys, family, t);
        r.tuple_transcendental = Some(w.is_none());
        r.witness = w;
    }
    if let Some(u) = subset {
        let arities: BTreeSet<usize> = family.iter().map(|&f| sys.ops[f].arity()).collect();
        let elems = u.to_vec();
        let mut found = None;
        'outer: for &k in &arities {
            let mut t = Tuples::new(&elems, k);
            while let Some(args) = t.next() {
                if !is_perm(args) {
                    continue;
                }
                r.tuples_checked += 1;
                if let Some(w) = collision(sys, family, args) {
                    found = Some(w);
                    break 'outer;
                }
            }
        }
        r.subset_transcendental = Some(found.is_none());
        if r.witness.is_none() {
            r.witness = found;
        }
    }
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shifts(n: usize) -> OperationSystem {
        let maps: Vec<Vec<usize>> = (0..n).map(|k| (0..n).map(|x| (x + k) % n).collect()).collect();
        OperationSystem::unary_explicit(n, &maps)
    }

    fn b() -> Budget {
        Budget::default()
    }

    #[test]
    fn accommodating_examples() {
        let one = OperationSystem::unary_explicit(1, &[vec![0]]);
        assert_eq!(accommodating_system(&one, &Subset::full(1), Kind::End, &b()).unwrap().maps.len(), 1);
        let c3 = shifts(3);
        let a = accommodating_system(&c3, &Subset::full(3), Kind::End, &b()).unwrap();
        assert_eq!(a.maps.len(), 3);
        assert!(a.closed && a.contains_t);
        let id2 = OperationSystem::unary_explicit(2, &[vec![0, 1]]);
        let a = accommodating_system(&id2, &Subset::full(2), Kind::End, &b()).unwrap();
        assert_eq!(a.maps, vec![vec![0, 1]]);
    }

    #[test]
    fn duality() {
        let c3 = shifts(3);
        for kind in [Kind::End, Kind::Aut] {
            let r = verify_duality(&c3, &Subset::full(3), kind, &b()).unwrap();
            assert!(r.equality && r.restrictions_equal && !r.violation);
        }
        let id2 = OperationSystem::unary_explicit(2, &[vec![0, 1]]);
        let r = verify_duality(&id2, &Subset::full(2), Kind::End, &b()).unwrap();
        assert!(r.equality && r.restrictions_equal);
        // Swapping two points while fixing a third: the double commutant gains a constant.
        let swap = OperationSystem::unary_explicit(3, &[vec![0, 1, 2], vec![0, 2, 1]]);
        let r = verify_duality(&swap, &Subset::full(3), Kind::End, &b()).unwrap();
        assert_eq!((r.restricted, r.dual), (2, 3));
        assert!(!r.equality && !r.restrictions_equal && r.biconditional == Some(true));
        let empty = verify_duality(&c3, &Subset::new(), Kind::End, &b()).unwrap();
        assert!(empty.equality && !empty.violation);
    }

    #[test]
    fn cores_and_transitivity() {
        let id2 = OperationSystem::unary_explicit(2, &[vec![0, 1]]);
        let c = core_fixed_sets(&id2, &Subset::full(2)).unwrap();
        assert!(c.c_end.is_empty());
        let c3 = shifts(3);
        let c = core_fixed_sets(&c3, &Subset::full(3)).unwrap();
        assert!(c.c_end.is_empty() && c.c_aut.is_empty());
        for kind in [Kind::End, Kind::Aut] {
            let r = verify_transitivity(&c3, &Subset::full(3), kind, &b()).unwrap();
            assert!(r.applicable && r.missing.is_empty() && r.witnesses.len() == 9);
            assert_eq!(r.core_equals_fixed, Some(true));
            assert!(r.fixed.is_empty());
        }
        let r = verify_transitivity(&id2, &Subset::full(2), Kind::End, &b()).unwrap();
        assert!(!r.applicable && r.containment && !r.violation);
        let consts = OperationSystem::unary_explicit(2, &[vec![0, 1], vec![0, 0], vec![1, 1]]);
        let c = core_fixed_sets(&consts, &Subset::full(2)).unwrap();
        assert_eq!(c.c_end, Subset::full(2));
    }

    #[test]
    fn stability_and_normality() {
        let c3 = shifts(3);
        let s = Subset::full(3);
        let ms = enumerate_morphisms(&c3, &s, Kind::Aut, &b()).unwrap();
        assert!(is_stable(&s, &ms));
        assert!(!is_stable(&Subset::singleton(0), &ms));
        assert!(is_normal_t_subset(&c3, &s, &s).unwrap());
        assert!(is_normal_t_subset(&c3, &Subset::new(), &s).unwrap());
        assert!(!is_normal_t_subset(&c3, &Subset::singleton(0), &s).unwrap());
        let r = normality_report(&c3, &s, &b()).unwrap();
        assert!(!r.violation && r.normal_subgroups == 2);
    }

    #[test]
    fn restriction() {
        let id4 = OperationSystem::unary_explicit(4, &[vec![0, 1, 2, 3]]);
        let s = Subset::full(4);
        let k: Subset = [0, 1].into_iter().collect();
        let r = restriction_homomorphism(&id4, &s, &Subset::new(), &k, &b()).unwrap();
        assert!(!r.stable);
        assert!(r.unstable.is_some());
        let r = restriction_homomorphism(&id4, &s, &Subset::new(), &s, &b()).unwrap();
        assert_eq!(r.kernel.as_ref().unwrap().len(), 1);
        assert!(!r.violation && r.quotient_isomorphic_to_target == Some(true));
        let base: Subset = [0, 1].into_iter().collect();
        let k3: Subset = [0, 1, 2].into_iter().collect();
        assert!(!restriction_homomorphism(&id4, &s, &base, &k3, &b()).unwrap().stable);
        let r = restriction_homomorphism(&id4, &s, &base, &s, &b()).unwrap();
        assert!(r.stable && !r.violation);
        assert_eq!((r.group_order, r.kernel.as_ref().unwrap().len()), (2, 1));
    }

    #[test]
    fn quotient_need_not_match_fixing_group() {
        let sys = OperationSystem::unary_explicit(4, &[vec![0, 1, 2, 3], vec![0, 1, 0, 0]]);
        let k: Subset = [0, 1].into_iter().collect();
        let r = restriction_homomorphism(&sys, &Subset::full(4), &Subset::new(), &k, &b()).unwrap();
        assert!(r.stable && r.quotient_matches_image == Some(true));
        assert_eq!(r.quotient_isomorphic_to_target, Some(false));
        assert!(!r.violation);
    }

    #[test]
    fn group_isomorphism() {
        let z = |n: usize| CayleyGroup {
            table: (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect(),
            identity: 0,
        };
        let klein = CayleyGroup {
            table: (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect(),
            identity: 0,
        };
        assert!(find_group_isomorphism(&z(4), &z(4)).is_some());
        assert!(find_group_isomorphism(&z(4), &klein).is_none());
        assert!(find_group_isomorphism(&z(2), &z(3)).is_none());
    }

    #[test]
    fn quotients() {
        let c4 = shifts(4);
        let c2 = shifts(2);
        let parity = Morphism::from_images(4, &Subset::full(4), &Subset::full(2), &[0, 1, 0, 1]).unwrap();
        let q = quotient_of_morphism(&parity);
        assert_eq!(q.classes, vec![[0, 2].into_iter().collect(), [1, 3].into_iter().collect()]);
        let theta = ThetaRelation::new(vec![(0, 0), (1, 1), (2, 0), (3, 1)], &c4, &c2).unwrap();
        let qs = quotient_system(&c4, &c2, &theta, &parity).unwrap();
        let plus1 = &qs.system.ops[qs.star_of[1]];
        assert_eq!(plus1.as_map().unwrap(), vec![1, 0]);
        assert!(qs.well_defined);
        let r = verify_first_isomorphism(&c4, &c2, &theta, &parity, &b()).unwrap();
        assert_eq!(r.classes, 2);
        assert_eq!(r.holds, Some(true));
        let id = Morphism::identity(4, &Subset::full(4));
        let r = verify_first_isomorphism(&c4, &c4, &ThetaRelation::identity(&c4), &id, &b()).unwrap();
        assert_eq!(r.holds, Some(true));
        let sweep = first_isomorphism_sweep(&c4, &Subset::full(4), &c2, &Subset::full(2), &b()).unwrap();
        assert!(sweep.applicable > 0 && sweep.failures.is_empty());
    }

    #[test]
    fn splitting_and_chain() {
        let c3 = shifts(3);
        let e = splitting_space(&c3, &Subset::new(), &Subset::new(), &b()).unwrap();
        assert!(e.space.is_empty());
        let r = splitting_space(&c3, &Subset::singleton(1), &Subset::new(), &b()).unwrap();
        assert_eq!(r.space, Subset::full(3));
        assert_eq!(r.group.unwrap().len(), 3);
        let r = splitting_space(&shifts(3), &Subset::new(), &Subset::singleton(0), &b()).unwrap();
        assert!(r.group.is_none() && r.reason.is_some());
        let step = ChainStep { system: &c3, solutions: Subset::singleton(1), declared: None };
        let ch = verify_decomposition_chain(&Subset::new(), &[step], &c3, &Subset::singleton(1)).unwrap();
        assert!(ch.holds);
        let id = OperationSystem::unary_explicit(3, &[vec![0, 1, 2]]);
        let step = ChainStep { system: &id, solutions: Subset::singleton(1), declared: None };
        let ch = verify_decomposition_chain(&Subset::new(), &[step], &c3, &Subset::singleton(1)).unwrap();
        assert!(!ch.inclusion);
        assert_eq!(ch.missing, Some(Witness::Missing { element: 0 }));
    }

    #[test]
    fn derivations_match_generation() {
        let c4 = shifts(4).as_generated();
        let u = Subset::singleton(2);
        let d = derivations(&c4, &u).unwrap();
        let keys: Subset = d.keys().copied().collect();
        assert_eq!(keys, generate_space(&c4, &u).unwrap());
    }

    #[test]
    fn transcendence() {
        let id1 = OperationSystem::unary_explicit(2, &[vec![0, 1]]);
        assert_eq!(transcendental_report(&id1, &[0], Some(&[0]), None).unwrap().tuple_transcendental, Some(true));
        let c3 = shifts(3);
        let r = transcendental_report(&c3, &[0, 1, 2], Some(&[0]), Some(&Subset::full(3))).unwrap();
        assert_eq!(r.tuple_transcendental, Some(true));
        assert_eq!(r.subset_transcendental, Some(true));
        let ic = OperationSystem::unary_explicit(2, &[vec![0, 1], vec![0, 0]]);
        let r = transcendental_report(&ic, &[0, 1], Some(&[0]), None).unwrap();
        assert_eq!(r.tuple_transcendental, Some(false));
        assert!(r.witness.is_some());
    }
}
