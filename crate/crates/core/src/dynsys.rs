//! Finite monoid actions and their operator-semigroup counterparts, in both directions.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::carrier::{validate_system, Carrier, Operation, OperationSystem, Repr, Tier};
use crate::error::{GgtError, Result};
use crate::galois::{verify_correspondence, GaloisContext};
use crate::limits::Budget;
use crate::morphism::{is_t_morphism, Kind, Morphism};
use crate::subset::Subset;
use crate::tspace::{generate_space, is_quasi_space};

/// A monoid `M` acting on a phase carrier by `Φ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonoidAction {
    pub elements: Vec<String>,
    /// `compose[g][h]` is the index of `g ∘ h`.
    pub compose: Vec<Vec<usize>>,
    pub identity: usize,
    pub phase: Vec<String>,
    /// `action[g][x]` is `Φ_g(x)`.
    pub action: Vec<Vec<usize>>,
}

impl MonoidAction {
    pub fn new(
        elements: Vec<String>,
        compose: Vec<Vec<usize>>,
        identity: usize,
        phase: Vec<String>,
        action: Vec<Vec<usize>>,
    ) -> Result<Self> {
        let a = MonoidAction {
            elements,
            compose,
            identity,
            phase,
            action,
        };
        a.validate()?;
        Ok(a)
    }

    /// `M` acting on `0..n` through the listed maps, composed extensionally.
    pub fn from_maps(n: usize, maps: &[Vec<usize>]) -> Result<Self> {
        let mut rows: Vec<Vec<usize>> = vec![(0..n).collect()];
        for m in maps {
            if !rows.contains(m) {
                rows.push(m.clone());
            }
        }
        let mut i = 0;
        while i < rows.len() {
            for j in 0..=i {
                for (a, b) in [(i, j), (j, i)] {
                    let c: Vec<usize> = rows[b].iter().map(|&x| rows[a][x]).collect();
                    if !rows.contains(&c) {
                        rows.push(c);
                    }
                }
            }
            i += 1;
        }
        let compose = (0..rows.len())
            .map(|g| {
                (0..rows.len())
                    .map(|h| {
                        let c: Vec<usize> = rows[h].iter().map(|&x| rows[g][x]).collect();
                        rows.iter().position(|r| *r == c).expect("closed")
                    })
                    .collect()
            })
            .collect();
        MonoidAction::new(
            (0..rows.len()).map(|i| format!("m{i}")).collect(),
            compose,
            0,
            (0..n).map(|i| i.to_string()).collect(),
            rows,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.elements.len();
        let n = self.phase.len();
        Carrier::new(self.elements.iter().cloned())?;
        Carrier::new(self.phase.iter().cloned())?;
        if self.identity >= m {
            return Err(GgtError::DanglingRef(format!("identity {}", self.identity)));
        }
        if self.compose.len() != m || self.compose.iter().any(|r| r.len() != m || r.iter().any(|&v| v >= m)) {
            return Err(GgtError::Schema("composition table must be |M| × |M| over M".into()));
        }
        if self.action.len() != m || self.action.iter().any(|r| r.len() != n || r.iter().any(|&v| v >= n)) {
            return Err(GgtError::Schema("action table must be |M| × |S| over S".into()));
        }
        for g in 0..m {
            if self.compose[self.identity][g] != g || self.compose[g][self.identity] != g {
                return Err(GgtError::Schema(format!("{} is not a two-sided identity", self.elements[self.identity])));
            }
            for h in 0..m {
                for k in 0..m {
                    if self.compose[self.compose[g][h]][k] != self.compose[g][self.compose[h][k]] {
                        return Err(GgtError::Schema(format!(
                            "composition is not associative at ({}, {}, {})",
                            self.elements[g], self.elements[h], self.elements[k]
                        )));
                    }
                }
                let gh = &self.action[self.compose[g][h]];
                if (0..n).any(|x| gh[x] != self.action[g][self.action[h][x]]) {
                    return Err(GgtError::Schema(format!(
                        "Φ does not respect composition at ({}, {})",
                        self.elements[g], self.elements[h]
                    )));
                }
            }
        }
        if self.action[self.identity].iter().enumerate().any(|(x, &v)| x != v) {
            return Err(GgtError::Schema("the identity does not act trivially".into()));
        }
        Ok(())
    }

    pub fn is_faithful(&self) -> bool {
        self.action.iter().collect::<BTreeSet<_>>().len() == self.action.len()
    }

    /// Elements merged when they act identically; the first of each group names the class.
    pub fn faithful_quotient(&self) -> MonoidAction {
        let mut reps: Vec<usize> = Vec::new();
        let mut class = vec![0; self.elements.len()];
        for g in 0..self.elements.len() {
            match reps.iter().position(|&r| self.action[r] == self.action[g]) {
                Some(i) => class[g] = i,
                None => {
                    class[g] = reps.len();
                    reps.push(g);
                }
            }
        }
        MonoidAction {
            elements: reps.iter().map(|&r| self.elements[r].clone()).collect(),
            compose: reps
                .iter()
                .map(|&g| reps.iter().map(|&h| class[self.compose[g][h]]).collect())
                .collect(),
            identity: class[self.identity],
            phase: self.phase.clone(),
            action: reps.iter().map(|&r| self.action[r].clone()).collect(),
        }
    }
}

/// Whether two actions on the same phase carrier agree up to renaming monoid elements.
pub fn actions_equivalent(a: &MonoidAction, b: &MonoidAction) -> bool {
    if a.phase != b.phase || a.elements.len() != b.elements.len() {
        return false;
    }
    let pos: BTreeMap<&Vec<usize>, usize> = b.action.iter().enumerate().map(|(i, r)| (r, i)).collect();
    let Some(rename) = a.action.iter().map(|r| pos.get(r).copied()).collect::<Option<Vec<usize>>>() else {
        return false;
    };
    if rename.iter().collect::<BTreeSet<_>>().len() != rename.len() || rename[a.identity] != b.identity {
        return false;
    }
    (0..a.elements.len()).all(|g| {
        (0..a.elements.len()).all(|h| rename[a.compose[g][h]] == b.compose[rename[g]][rename[h]])
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct AdapterSystem {
    #[serde(skip)]
    pub system: OperationSystem,
    pub space: Subset,
    /// Monoid element indices merged into each operation.
    pub merged: Vec<Vec<usize>>,
}

/// `T = {Φ_g}`, deduplicated, on the whole phase carrier.
pub fn action_to_system(a: &MonoidAction) -> Result<AdapterSystem> {
    a.validate()?;
    let n = a.phase.len();
    let mut ops: Vec<Operation> = Vec::new();
    let mut merged: Vec<Vec<usize>> = Vec::new();
    for (g, row) in a.action.iter().enumerate() {
        match ops.iter().position(|o| o.as_map().as_deref() == Some(row.as_slice())) {
            Some(i) => merged[i].push(g),
            None => {
                let name = if g == a.identity { "Id".to_string() } else { a.elements[g].clone() };
                ops.push(Operation::unary(name, row));
                merged.push(vec![g]);
            }
        }
    }
    let system = OperationSystem::new(Carrier::new(a.phase.iter().cloned())?, Tier::Unary, Repr::Explicit, ops)?;
    let space = Subset::full(n);
    if !validate_system(&system)?.closed || !system.contains_identity() || generate_space(&system, &space)? != space {
        return Err(GgtError::Schema("adapter output failed certification".into()));
    }
    Ok(AdapterSystem { system, space, merged })
}

/// `T` acting on `S` by evaluation; the monoid is `T` under composition.
pub fn system_to_action(sys: &OperationSystem, s: &Subset) -> Result<MonoidAction> {
    if sys.tier != Tier::Unary || !sys.is_explicit() {
        return Err(GgtError::usage("an explicit unary system is required"));
    }
    if !sys.contains_identity() {
        return Err(GgtError::usage("the system must contain Id"));
    }
    if !validate_system(sys)?.closed {
        return Err(GgtError::usage("the system is not closed under composition"));
    }
    if !is_quasi_space(sys, s)? {
        return Err(GgtError::usage("S is not a T-space"));
    }
    let mut maps: Vec<(String, Vec<usize>)> = Vec::new();
    for op in &sys.ops {
        let m = op.as_map().expect("unary");
        if !maps.iter().any(|(_, x)| *x == m) {
            maps.push((op.name.clone(), m));
        }
    }
    let elems = s.to_vec();
    let local: BTreeMap<usize, usize> = elems.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let compose = maps
        .iter()
        .map(|(_, f)| {
            maps.iter()
                .map(|(_, g)| {
                    let fg: Vec<usize> = g.iter().map(|&x| f[x]).collect();
                    maps.iter().position(|(_, h)| *h == fg).expect("closed system")
                })
                .collect()
        })
        .collect();
    let identity = maps
        .iter()
        .position(|(_, f)| f.iter().enumerate().all(|(i, &v)| i == v))
        .expect("identity present");
    let action = maps
        .iter()
        .map(|(_, f)| elems.iter().map(|&x| local[&f[x]]).collect())
        .collect();
    MonoidAction::new(
        maps.into_iter().map(|(n, _)| n).collect(),
        compose,
        identity,
        elems.iter().map(|&x| sys.carrier.label(x).to_string()).collect(),
        action,
    )
}

#[derive(Clone, Debug, Serialize)]
pub struct IteratedReport {
    #[serde(skip)]
    pub system: OperationSystem,
    pub powers: usize,
    /// Every member is an endomorphism of the whole carrier.
    pub within_end: bool,
}

/// `{Id} ∪ {h, h², …}`.
pub fn iterated_map_system(h: &[usize]) -> Result<IteratedReport> {
    let n = h.len();
    if h.iter().any(|&v| v >= n) {
        return Err(GgtError::usage("h must map the carrier into itself"));
    }
    let mut maps: Vec<Vec<usize>> = vec![(0..n).collect()];
    let mut cur = h.to_vec();
    while !maps.contains(&cur) {
        maps.push(cur.clone());
        cur = cur.iter().map(|&x| h[x]).collect();
    }
    let ops: Vec<Operation> = maps
        .iter()
        .enumerate()
        .map(|(i, m)| Operation::unary(if i == 0 { "Id".to_string() } else { format!("h^{i}") }, m))
        .collect();
    let system = OperationSystem::new(Carrier::range(n), Tier::Unary, Repr::Explicit, ops)?;
    let all = Subset::full(n);
    let mut within_end = true;
    for m in &maps {
        within_end &= is_t_morphism(&system, &Morphism::from_images(n, &all, &all, m)?)?.is_none();
    }
    Ok(IteratedReport {
        system,
        powers: maps.len() - 1,
        within_end,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundTrip {
    /// `action_to_system(system_to_action(T))` has the same operations as `T`.
    pub system_fixed: bool,
    /// `system_to_action(action_to_system(A))` is the faithful quotient of `A`.
    pub action_recovered: bool,
    pub faithful: bool,
    /// Bases `B ⊆ S` whose correspondence failed, per kind.
    pub end_failures: Vec<Subset>,
    pub aut_failures: Vec<Subset>,
    pub bases_checked: usize,
}

impl RoundTrip {
    pub fn holds(&self) -> bool {
        self.system_fixed && self.action_recovered && self.end_failures.is_empty() && self.aut_failures.is_empty()
    }
}

fn same_ops(a: &OperationSystem, b: &OperationSystem) -> bool {
    let set = |s: &OperationSystem| s.ops.iter().map(|o| o.as_map()).collect::<BTreeSet<_>>();
    a.n() == b.n() && set(a) == set(b)
}

/// Both round trips plus the Galois correspondences on the adapter output over every base.
pub fn round_trip(a: &MonoidAction, budget: &Budget) -> Result<RoundTrip> {
    let adapted = action_to_system(a)?;
    let back = system_to_action(&adapted.system, &adapted.space)?;
    let action_recovered = actions_equivalent(&back, &a.faithful_quotient());
    let again = action_to_system(&back)?;
    let system_fixed = same_ops(&again.system, &adapted.system);
    let mut end_failures = Vec::new();
    let mut aut_failures = Vec::new();
    let bases = adapted.space.subsets();
    for (kind, fails) in [(Kind::End, &mut end_failures), (Kind::Aut, &mut aut_failures)] {
        let ctx = GaloisContext::new(&adapted.system, &adapted.space, kind, budget)?;
        for b in &bases {
            if !verify_correspondence(&ctx, b, budget)?.verdict {
                fails.push(b.clone());
            }
        }
    }
    Ok(RoundTrip {
        system_fixed,
        action_recovered,
        faithful: a.is_faithful(),
        end_failures,
        aut_failures,
        bases_checked: bases.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation(n: usize) -> MonoidAction {
        MonoidAction::from_maps(n, &[(0..n).map(|x| (x + 1) % n).collect()]).unwrap()
    }

    #[test]
    fn validation() {
        let bad = MonoidAction::new(
            vec!["e".into(), "m".into()],
            vec![vec![0, 1], vec![1, 0]],
            0,
            vec!["0".into(), "1".into()],
            vec![vec![0, 1], vec![0, 0]],
        );
        assert!(matches!(bad, Err(GgtError::Schema(_))));
        assert_eq!(rotation(3).elements.len(), 3);
    }

    #[test]
    fn adapters() {
        let idem = MonoidAction::new(
            vec!["e".into(), "m".into()],
            vec![vec![0, 1], vec![1, 1]],
            0,
            vec!["0".into(), "1".into()],
            vec![vec![0, 1], vec![0, 0]],
        )
        .unwrap();
        let ad = action_to_system(&idem).unwrap();
        assert_eq!(ad.system.ops.len(), 2);
        let ctx = GaloisContext::new(&ad.system, &ad.space, Kind::End, &Budget::default()).unwrap();
        assert_eq!(ctx.members.len(), 2);
        let back = system_to_action(&ad.system, &ad.space).unwrap();
        assert!(actions_equivalent(&back, &idem));
        let rot = action_to_system(&rotation(3)).unwrap();
        assert_eq!(rot.system.ops.len(), 3);
    }

    #[test]
    fn unfaithful_round_trip() {
        // Z/4 acting on two points through parity.
        let z4: Vec<Vec<usize>> = (0..4).map(|g| (0..4).map(|h| (g + h) % 4).collect()).collect();
        let act: Vec<Vec<usize>> = (0..4).map(|g| if g % 2 == 0 { vec![0, 1] } else { vec![1, 0] }).collect();
        let a = MonoidAction::new(
            (0..4).map(|g| format!("r{g}")).collect(),
            z4,
            0,
            vec!["p".into(), "q".into()],
            act,
        )
        .unwrap();
        assert!(!a.is_faithful());
        assert_eq!(a.faithful_quotient().elements.len(), 2);
        let r = round_trip(&a, &Budget::default()).unwrap();
        assert!(r.holds() && !r.faithful);
        assert!(round_trip(&rotation(4), &Budget::default()).unwrap().holds());
    }

    #[test]
    fn iterated() {
        assert_eq!(iterated_map_system(&[0, 1, 2]).unwrap().powers, 0);
        let r = iterated_map_system(&[1, 2, 0]).unwrap();
        assert_eq!(r.system.ops.len(), 3);
        assert!(r.within_end);
        let c = iterated_map_system(&[0, 0]).unwrap();
        assert_eq!(c.system.ops.len(), 2);
        assert!(c.within_end);
        let tail = iterated_map_system(&[1, 2, 3, 3]).unwrap();
        assert!(tail.within_end && tail.powers == 3);
    }
}
