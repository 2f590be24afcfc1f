//! T-space generation, quasi-T-space predicates, generated quasi-subspaces and
//! family-closure checks.

use serde::Serialize;

use crate::carrier::{validate_system, OperationSystem, Repr, Tier, Tuples};
use crate::error::{GgtError, Result};
use crate::limits::{Budget, Cap, Tri};
use crate::subset::Subset;
use crate::witness::Witness;

pub(crate) fn check_inside(sys: &OperationSystem, s: &Subset, what: &str) -> Result<()> {
    match s.iter().find(|&x| x >= sys.n()) {
        Some(x) => Err(GgtError::usage(format!(
            "{what} contains {x}, outside the carrier of size {}",
            sys.n()
        ))),
        None => Ok(()),
    }
}

/// One round of operation application: all defined `f(t)` with `t` over `args`.
fn apply_all(sys: &OperationSystem, args: &[usize], out: &mut Subset) {
    for f in &sys.ops {
        let mut t = Tuples::new(args, f.arity());
        while let Some(tuple) = t.next() {
            if let Some(v) = f.eval(tuple) {
                out.insert(v);
            }
        }
    }
}

/// `⟨U⟩_T`. Generated systems are handled by a least fixpoint over generator applications.
pub fn generate_space(sys: &OperationSystem, u: &Subset) -> Result<Subset> {
    check_inside(sys, u, "generating set")?;
    let mut w = Subset::new();
    apply_all(sys, &u.to_vec(), &mut w);
    if sys.repr == Repr::Generated {
        loop {
            let mut next = w.clone();
            apply_all(sys, &w.to_vec(), &mut next);
            if next == w {
                break;
            }
            w = next;
        }
    }
    Ok(w)
}

/// Whether `⟨S⟩ ⊆ S`.
pub fn is_quasi_space(sys: &OperationSystem, s: &Subset) -> Result<bool> {
    Ok(generate_space(sys, s)?.is_subset(s))
}

/// An operation application leaving `s`, if any.
pub fn quasi_witness(sys: &OperationSystem, s: &Subset) -> Result<Option<Witness>> {
    check_inside(sys, s, "subset")?;
    let elems = s.to_vec();
    for (i, f) in sys.ops.iter().enumerate() {
        let mut t = Tuples::new(&elems, f.arity());
        while let Some(tuple) = t.next() {
            if let Some(v) = f.eval(tuple) {
                if !s.contains(v) {
                    return Ok(Some(Witness::Escape {
                        op: i,
                        args: tuple.to_vec(),
                        value: v,
                        set: s.clone(),
                    }));
                }
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TSpaceCheck {
    pub verdict: Tri,
    /// A generating set when one was found.
    pub generated_by: Option<Subset>,
    pub method: &'static str,
}

/// Whether some `U ⊆ D` has `⟨U⟩ = S`.
pub fn is_t_space(sys: &OperationSystem, s: &Subset, budget: &Budget) -> Result<TSpaceCheck> {
    // Every T-space is quasi only when T is closed under composition.
    let closed = sys.repr == Repr::Generated || validate_system(sys)?.closed;
    if closed && !is_quasi_space(sys, s)? {
        return Ok(TSpaceCheck {
            verdict: Tri::False,
            generated_by: None,
            method: "not quasi",
        });
    }
    if generate_space(sys, s)? == *s {
        return Ok(TSpaceCheck {
            verdict: Tri::True,
            generated_by: Some(s.clone()),
            method: "self-generated",
        });
    }
    if sys.tier == Tier::Unary {
        // ⟨U⟩ is a union of ⟨u⟩, so the largest U with ⟨U⟩ ⊆ S decides.
        let mut best = Subset::new();
        for x in 0..sys.n() {
            if generate_space(sys, &Subset::singleton(x))?.is_subset(s) {
                best.insert(x);
            }
        }
        let found = generate_space(sys, &best)? == *s;
        return Ok(TSpaceCheck {
            verdict: Tri::from_bool(found),
            generated_by: found.then_some(best),
            method: "maximal unary generator",
        });
    }
    if !budget.allows(Cap::TSpace, sys.n()) {
        return Ok(TSpaceCheck {
            verdict: Tri::Indeterminate,
            generated_by: None,
            method: "carrier above exhaustive-search cap",
        });
    }
    let found = exhaustive_generator(sys, s)?;
    Ok(TSpaceCheck {
        verdict: Tri::from_bool(found.is_some()),
        generated_by: found,
        method: "exhaustive search",
    })
}

/// Oracle: search every `U ⊆ D` in mask order.
pub fn exhaustive_generator(sys: &OperationSystem, s: &Subset) -> Result<Option<Subset>> {
    if sys.n() >= 26 {
        return Err(GgtError::budget("exhaustive generator search", 25, sys.n()));
    }
    for u in Subset::all(sys.n()) {
        if generate_space(sys, &u)? == *s {
            return Ok(Some(u));
        }
    }
    Ok(None)
}

/// Least quasi-subspace of `s` containing `x`.
pub fn generated_quasi_subspace(sys: &OperationSystem, s: &Subset, x: &Subset) -> Result<Subset> {
    check_inside(sys, s, "space")?;
    if !x.is_subset(s) {
        return Err(GgtError::usage("generating set is not inside the space"));
    }
    let mut y = x.clone();
    loop {
        let next = y.union(&generate_space(sys, &y)?);
        if next == y {
            return Ok(y);
        }
        y = next;
    }
}

/// All quasi-subspaces of `s`, in subset order.
pub fn quasi_subspaces(sys: &OperationSystem, s: &Subset, budget: &Budget) -> Result<Vec<Subset>> {
    budget.check(Cap::TSpace, "quasi-subspace enumeration", s.len())?;
    let mut out = Vec::new();
    for k in s.subsets() {
        if is_quasi_space(sys, &k)? {
            out.push(k);
        }
    }
    out.sort();
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Check {
    Pass,
    Fail { witness: Witness },
    NotApplicable { reason: String },
    Indeterminate { reason: String },
}

impl Check {
    pub fn from_witness(w: Option<Witness>) -> Self {
        match w {
            None => Check::Pass,
            Some(witness) => Check::Fail { witness },
        }
    }

    pub fn na(reason: impl Into<String>) -> Self {
        Check::NotApplicable {
            reason: reason.into(),
        }
    }

    pub fn passed(&self) -> bool {
        matches!(self, Check::Pass)
    }

    pub fn failed(&self) -> bool {
        matches!(self, Check::Fail { .. })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyReport {
    pub quasi: Vec<bool>,
    pub t_space: Vec<Tri>,
    pub meets_quasi: Check,
    pub unions_quasi: Check,
    pub unions_t_space: Check,
    pub meets_t_space_with_identity: Check,
}

/// Subfamilies to test: all nonempty ones when small, else pairs plus the whole family.
fn subfamilies(k: usize) -> Vec<Vec<usize>> {
    if k <= 10 {
        (1..1u32 << k)
            .map(|m| (0..k).filter(|i| m >> i & 1 == 1).collect())
            .collect()
    } else {
        let mut v: Vec<Vec<usize>> = Vec::new();
        for i in 0..k {
            for j in i..k {
                v.push(vec![i, j]);
            }
        }
        v.push((0..k).collect());
        v
    }
}

/// Meet/join closure checks for a family of subsets of the carrier.
pub fn family_closure_report(
    sys: &OperationSystem,
    spaces: &[Subset],
    budget: &Budget,
) -> Result<FamilyReport> {
    let mut quasi = Vec::new();
    let mut t_space = Vec::new();
    for s in spaces {
        quasi.push(is_quasi_space(sys, s)?);
        t_space.push(is_t_space(sys, s, budget)?.verdict);
    }
    let full = Subset::full(sys.n());
    let subs = subfamilies(spaces.len());
    let quasi_idx: Vec<usize> = (0..spaces.len()).filter(|&i| quasi[i]).collect();
    let t_idx: Vec<usize> = (0..spaces.len()).filter(|&i| t_space[i].is_true()).collect();

    let mut meet_fail = None;
    let mut union_fail = None;
    for pick in subfamilies(quasi_idx.len()) {
        let members: Vec<&Subset> = pick.iter().map(|&i| &spaces[quasi_idx[i]]).collect();
        let meet = members.iter().fold(full.clone(), |a, b| a.intersection(b));
        if meet_fail.is_none() {
            meet_fail = quasi_witness(sys, &meet)?;
        }
        let join = members.iter().fold(Subset::new(), |a, b| a.union(b));
        if union_fail.is_none() {
            union_fail = quasi_witness(sys, &join)?;
        }
    }
    let _ = subs;
    let meets_quasi = Check::from_witness(meet_fail);
    let unions_quasi = if sys.tier == Tier::Unary {
        Check::from_witness(union_fail)
    } else {
        Check::na("union closure is only asserted for unary systems")
    };

    let unions_t_space = if sys.tier == Tier::Unary {
        let mut fail = None;
        for pick in subfamilies(t_idx.len()) {
            let join = pick
                .iter()
                .fold(Subset::new(), |a, &i| a.union(&spaces[t_idx[i]]));
            let c = is_t_space(sys, &join, budget)?;
            if c.verdict != Tri::True {
                fail = Some(Witness::NotTSpace { set: join });
                break;
            }
        }
        Check::from_witness(fail)
    } else {
        Check::na("union closure is only asserted for unary systems")
    };

    let meets_t_space_with_identity = if sys.contains_identity() {
        let mut fail = None;
        for pick in subfamilies(quasi_idx.len()) {
            let meet = pick
                .iter()
                .fold(full.clone(), |a, &i| a.intersection(&spaces[quasi_idx[i]]));
            if is_t_space(sys, &meet, budget)?.verdict != Tri::True {
                fail = Some(Witness::NotTSpace { set: meet });
                break;
            }
        }
        Check::from_witness(fail)
    } else {
        Check::na("identity is not in T")
    };

    Ok(FamilyReport {
        quasi,
        t_space,
        meets_quasi,
        unions_quasi,
        unions_t_space,
        meets_t_space_with_identity,
    })
}

/// Search for two T-spaces whose intersection is not a T-space.
pub fn search_meet_counterexample(
    sys: &OperationSystem,
    budget: &Budget,
) -> Result<Option<(Subset, Subset)>> {
    budget.check(Cap::TSpace, "T-space enumeration", sys.n())?;
    let mut spaces: Vec<Subset> = Vec::new();
    for u in Subset::all(sys.n()) {
        let s = generate_space(sys, &u)?;
        if !spaces.contains(&s) {
            spaces.push(s);
        }
    }
    spaces.sort();
    for (i, a) in spaces.iter().enumerate() {
        for b in &spaces[i + 1..] {
            let m = a.intersection(b);
            if !spaces.contains(&m) {
                return Ok(Some((a.clone(), b.clone())));
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carrier::{Carrier, Operation};

    fn shifts(n: usize, ks: &[usize]) -> OperationSystem {
        let maps: Vec<Vec<usize>> = ks
            .iter()
            .map(|&k| (0..n).map(|x| (x + k) % n).collect())
            .collect();
        OperationSystem::unary_explicit(n, &maps)
    }

    fn cap3() -> OperationSystem {
        let add = Operation::from_fn("add", 4, 2, |a| {
            let s = a[0] + a[1];
            (s <= 3).then_some(s)
        });
        OperationSystem::new(
            Carrier::range(4),
            Tier::PartialGeneralized,
            Repr::Generated,
            vec![Operation::identity(4), add],
        )
        .unwrap()
    }

    fn set(v: &[usize]) -> Subset {
        v.iter().copied().collect()
    }

    #[test]
    fn generate_examples() {
        let t = shifts(3, &[0, 1, 2]);
        assert_eq!(generate_space(&t, &Subset::new()).unwrap(), Subset::new());
        assert_eq!(generate_space(&t, &set(&[0])).unwrap(), set(&[0, 1, 2]));
        assert_eq!(generate_space(&cap3(), &set(&[1])).unwrap(), set(&[1, 2, 3]));
        assert!(generate_space(&t, &set(&[5])).is_err());
    }

    #[test]
    fn quasi_examples() {
        let t = shifts(3, &[0, 1, 2]);
        assert!(!is_quasi_space(&t, &set(&[0, 1])).unwrap());
        let id = shifts(3, &[0]);
        for s in Subset::all(3) {
            assert!(is_quasi_space(&id, &s).unwrap());
        }
    }

    #[test]
    fn t_space_examples() {
        let b = Budget::default();
        let t = shifts(3, &[1, 2]);
        assert_eq!(generate_space(&t, &set(&[0])).unwrap(), set(&[1, 2]));
        // T is not composition-closed, so {1,2} is a T-space without being quasi.
        let c = is_t_space(&t, &set(&[1, 2]), &b).unwrap();
        assert_eq!(c.verdict, Tri::True);
        assert_eq!(c.generated_by, Some(set(&[0])));
        assert!(!is_quasi_space(&t, &set(&[1, 2])).unwrap());
        assert_eq!(is_t_space(&t, &set(&[0, 1, 2]), &b).unwrap().verdict, Tri::True);
        assert_eq!(is_t_space(&t, &Subset::new(), &b).unwrap().verdict, Tri::True);
        let g = OperationSystem::unary_explicit(3, &[vec![1, 1, 1]]);
        // ⟨{0}⟩ = {1}: a T-space that does not contain its generator.
        let c = is_t_space(&g, &set(&[1]), &b).unwrap();
        assert_eq!(c.verdict, Tri::True);
        assert_eq!(exhaustive_generator(&g, &set(&[0, 1])).unwrap(), None);
    }

    #[test]
    fn quasi_subspace_examples() {
        let t = shifts(3, &[0, 1, 2]);
        let s = Subset::full(3);
        assert_eq!(generated_quasi_subspace(&t, &s, &s).unwrap(), s);
        assert_eq!(
            generated_quasi_subspace(&t, &s, &Subset::new()).unwrap(),
            Subset::new()
        );
        assert_eq!(generated_quasi_subspace(&t, &s, &set(&[0])).unwrap(), s);
    }

    #[test]
    fn family_examples() {
        let b = Budget::default();
        let id = shifts(3, &[0]);
        let fam = vec![set(&[0]), set(&[1, 2]), Subset::full(3)];
        let r = family_closure_report(&id, &fam, &b).unwrap();
        assert!(r.meets_quasi.passed() && r.unions_quasi.passed() && r.unions_t_space.passed());
        assert!(r.meets_t_space_with_identity.passed());
        let t = shifts(3, &[0, 1, 2]);
        let r = family_closure_report(&t, &[Subset::full(3), Subset::new()], &b).unwrap();
        assert!(r.meets_quasi.passed());
        let r = family_closure_report(&cap3(), &[set(&[0]), Subset::full(4)], &b).unwrap();
        assert!(matches!(r.unions_quasi, Check::NotApplicable { .. }));
    }
}
