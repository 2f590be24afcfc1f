//! Finite topological spaces seen through their power sets: the system `{Id, Cl}`, induced
//! maps, continuity against T-morphisms, and the homeomorphism correspondence.
//!
//! Subsets of a space are bitmasks, so the power-set carrier lists them by mask value.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::carrier::{Carrier, Operation, OperationSystem, Repr, Tier};
use crate::error::{GgtError, Result};
use crate::galois::{abstract_correspondence, AbstractCorrespondence};
use crate::limits::{Budget, Cap};
use crate::morphism::{all_functions, enumerate_morphisms, is_t_morphism, Kind, Morphism};
use crate::subset::Subset;
use crate::topology::FiniteTopology;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TopoSpace {
    pub labels: Vec<String>,
    pub topology: FiniteTopology,
}

impl TopoSpace {
    pub fn new(labels: Vec<String>, opens: &[Subset]) -> Result<Self> {
        Carrier::new(labels.iter().cloned())?;
        if labels.len() > 63 {
            return Err(GgtError::usage("spaces are limited to 63 points"));
        }
        let topology = FiniteTopology::from_opens(&Subset::full(labels.len()), opens)?;
        Ok(TopoSpace { labels, topology })
    }

    fn numbered(k: usize) -> Vec<String> {
        (0..k).map(|i| i.to_string()).collect()
    }

    pub fn discrete(k: usize) -> Self {
        TopoSpace {
            labels: Self::numbered(k),
            topology: FiniteTopology::discrete(&Subset::full(k)),
        }
    }

    pub fn indiscrete(k: usize) -> Self {
        TopoSpace {
            labels: Self::numbered(k),
            topology: FiniteTopology::indiscrete(&Subset::full(k)),
        }
    }

    /// Points `a`, `b` with `{b}` the only proper nonempty open set.
    pub fn sierpinski() -> Self {
        let x = Subset::full(2);
        TopoSpace::new(
            vec!["a".into(), "b".into()],
            &[Subset::new(), Subset::singleton(1), x],
        )
        .expect("valid topology")
    }

    pub fn from_topology(topology: FiniteTopology) -> Result<Self> {
        let k = topology.points.len();
        if topology.points != Subset::full(k) {
            return Err(GgtError::usage("points must be 0..k"));
        }
        Ok(TopoSpace {
            labels: Self::numbered(k),
            topology,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    fn closure_mask(&self, a: u64) -> u64 {
        self.topology.closure_of(&Subset::from_mask(a)).mask()
    }

    fn is_closed_mask(&self, a: u64) -> bool {
        self.closure_mask(a) == a
    }

    /// Every singleton is closed.
    pub fn is_t1(&self) -> bool {
        (0..self.len()).all(|x| self.is_closed_mask(1 << x))
    }

    pub fn mask_label(&self, a: u64) -> String {
        let names: Vec<&str> = (0..self.len())
            .filter(|&i| a >> i & 1 == 1)
            .map(|i| self.labels[i].as_str())
            .collect();
        format!("{{{}}}", names.join(","))
    }
}

/// `P(X)` with `Id` and `Cl`.
pub fn powerset_system(x: &TopoSpace, budget: &Budget) -> Result<OperationSystem> {
    budget.check(Cap::Powerset, "power-set carrier |X|", x.len())?;
    let size = 1usize << x.len();
    let carrier = Carrier::new((0..size as u64).map(|m| x.mask_label(m)))?;
    let cl: Vec<usize> = (0..size as u64).map(|m| x.closure_mask(m) as usize).collect();
    let ops = vec![
        Operation::identity(size).with_name("Id"),
        Operation::unary("Cl", &cl),
    ];
    OperationSystem::new(carrier, Tier::Unary, Repr::Explicit, ops)
}

fn image_mask(p: &[usize], a: u64) -> u64 {
    p.iter()
        .enumerate()
        .filter(|&(i, _)| a >> i & 1 == 1)
        .fold(0, |acc, (_, &y)| acc | 1 << y)
}

/// `p*` as a table from masks of `X` to masks of `Y`: closed sets go to the closure of
/// their image, other sets to their plain image.
pub fn induced_map(x: &TopoSpace, y: &TopoSpace, p: &[usize]) -> Result<Vec<usize>> {
    if p.len() != x.len() || p.iter().any(|&v| v >= y.len()) {
        return Err(GgtError::usage("point map does not go from X to Y"));
    }
    Ok((0..1u64 << x.len())
        .map(|a| {
            let img = image_mask(p, a);
            if x.is_closed_mask(a) {
                y.closure_mask(img) as usize
            } else {
                img as usize
            }
        })
        .collect())
}

pub fn is_continuous(x: &TopoSpace, y: &TopoSpace, p: &[usize]) -> bool {
    x.topology.is_continuous(&y.topology, p)
}

/// All maps `X → Y` in lexicographic order.
pub fn point_maps(x: &TopoSpace, y: &TopoSpace, budget: &Budget) -> Result<Vec<Vec<usize>>> {
    all_functions(x.len(), y.len(), budget)
}

fn star_morphism(x: &TopoSpace, star: &[usize]) -> Morphism {
    let all = Subset::full(1 << x.len());
    Morphism::from_images(1 << x.len(), &all, &all, star).expect("star maps P(X) into itself")
}

#[derive(Clone, Debug, Serialize)]
pub struct ContinuityReport {
    pub maps: usize,
    pub continuous: usize,
    /// Distinct induced maps of continuous maps.
    pub continuous_stars: usize,
    /// Distinct induced maps of all maps.
    pub stars: usize,
    /// `|End_T(P(X))|` when enumerable within budget.
    pub end_count: Option<usize>,
    pub aut_count: Option<usize>,
    /// Point maps where continuity and the T-morphism test disagree.
    pub mismatches: Vec<Vec<usize>>,
    /// Induced maps that are T-morphisms are exactly the induced maps of continuous maps.
    pub stars_in_end_are_continuous: bool,
    pub holds: bool,
}

/// Continuity of every self-map against its induced map being a T-morphism.
pub fn continuity_equivalence_report(x: &TopoSpace, budget: &Budget) -> Result<ContinuityReport> {
    let sys = powerset_system(x, budget)?;
    let maps = point_maps(x, x, budget)?;
    let mut continuous = 0;
    let mut mismatches = Vec::new();
    let mut c_star = BTreeSet::new();
    let mut f_star = BTreeSet::new();
    let mut f_star_end = BTreeSet::new();
    for p in &maps {
        let star = induced_map(x, x, p)?;
        let cont = is_continuous(x, x, p);
        let morph = is_t_morphism(&sys, &star_morphism(x, &star))?.is_none();
        if cont {
            continuous += 1;
            c_star.insert(star.clone());
        }
        if morph {
            f_star_end.insert(star.clone());
        }
        if cont != morph {
            mismatches.push(p.clone());
        }
        f_star.insert(star);
    }
    let full = Subset::full(sys.n());
    let count = |kind| match enumerate_morphisms(&sys, &full, kind, budget) {
        Ok(v) => Ok(Some(v.len())),
        Err(GgtError::Budget { .. }) => Ok(None),
        Err(e) => Err(e),
    };
    let stars_in_end_are_continuous = f_star_end == c_star;
    Ok(ContinuityReport {
        maps: maps.len(),
        continuous,
        continuous_stars: c_star.len(),
        stars: f_star.len(),
        end_count: count(Kind::End)?,
        aut_count: count(Kind::Aut)?,
        holds: mismatches.is_empty() && stars_in_end_are_continuous,
        mismatches,
        stars_in_end_are_continuous,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct InjectivityReport {
    pub maps: usize,
    pub injective: bool,
    /// Two maps with the same induced map.
    pub witness: Option<(Vec<usize>, Vec<usize>)>,
    pub target_t1: bool,
    pub same_space: bool,
    /// Injectivity is guaranteed here; a failure would be a violation.
    pub asserted: bool,
    pub violation: bool,
}

pub fn star_injectivity_report(x: &TopoSpace, y: &TopoSpace, budget: &Budget) -> Result<InjectivityReport> {
    let maps = point_maps(x, y, budget)?;
    let mut seen: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
    let mut witness = None;
    for p in &maps {
        let star = induced_map(x, y, p)?;
        match seen.get(&star) {
            Some(q) if witness.is_none() => witness = Some((q.clone(), p.clone())),
            Some(_) => {}
            None => {
                seen.insert(star, p.clone());
            }
        }
    }
    let same_space = x == y;
    let target_t1 = y.is_t1();
    let asserted = same_space || target_t1;
    let injective = witness.is_none();
    Ok(InjectivityReport {
        maps: maps.len(),
        injective,
        witness,
        target_t1,
        same_space,
        asserted,
        violation: asserted && !injective,
    })
}

fn compose_points(f: &[usize], g: &[usize]) -> Vec<usize> {
    g.iter().map(|&v| f[v]).collect()
}

fn compose_tables(f: &[usize], g: &[usize]) -> Vec<usize> {
    g.iter().map(|&v| f[v]).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct StarComposition {
    pub hypotheses: bool,
    pub equal: bool,
    pub violation: bool,
}

/// `(f ∘ g)* = f* ∘ g*` for self-maps; guaranteed when both are continuous and `g` is
/// injective.
pub fn star_composition_check(x: &TopoSpace, f: &[usize], g: &[usize]) -> Result<StarComposition> {
    let fg = induced_map(x, x, &compose_points(f, g))?;
    let fs = induced_map(x, x, f)?;
    let gs = induced_map(x, x, g)?;
    let equal = fg == compose_tables(&fs, &gs);
    let g_inj = g.iter().collect::<BTreeSet<_>>().len() == g.len();
    let hypotheses = is_continuous(x, x, f) && is_continuous(x, x, g) && g_inj;
    Ok(StarComposition {
        hypotheses,
        equal,
        violation: hypotheses && !equal,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CompositionSuite {
    pub qualifying: usize,
    pub violations: usize,
    /// Pairs outside the hypotheses where the equation fails anyway.
    pub unqualified_failures: usize,
    pub example_failure: Option<(Vec<usize>, Vec<usize>)>,
}

pub fn star_composition_suite(x: &TopoSpace, budget: &Budget) -> Result<CompositionSuite> {
    let maps = point_maps(x, x, budget)?;
    let mut out = CompositionSuite {
        qualifying: 0,
        violations: 0,
        unqualified_failures: 0,
        example_failure: None,
    };
    for f in &maps {
        for g in &maps {
            let c = star_composition_check(x, f, g)?;
            if c.hypotheses {
                out.qualifying += 1;
                out.violations += usize::from(!c.equal);
            } else if !c.equal {
                out.unqualified_failures += 1;
                if out.example_failure.is_none() {
                    out.example_failure = Some((f.clone(), g.clone()));
                }
            }
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct HomReport {
    pub homeomorphisms: Vec<Vec<usize>>,
    /// Every induced map of a homeomorphism is a T-automorphism of `P(X)`.
    pub stars_are_automorphisms: bool,
    /// The induced maps are closed under composition and inverses.
    pub stars_form_group: bool,
    /// `f ↦ f*` is injective and multiplicative on homeomorphisms.
    pub star_isomorphism: bool,
    /// Setwise and induced-map fixed sets agree member by member.
    pub fixed_sets_agree: bool,
    pub star_side: AbstractCorrespondence,
    pub hom_side: AbstractCorrespondence,
    /// The intermediate families of both sides coincide.
    pub int_families_equal: bool,
    /// `GGr_Hom(K) ↦ I_X(GGr_Hom(K))` is a bijection onto the induced-map side.
    pub beta_bijective: bool,
    pub holds: bool,
}

/// The homeomorphism-group correspondence over `b ⊆ P(X)`, given as a set of masks.
pub fn hom_correspondence(x: &TopoSpace, b: &Subset, budget: &Budget) -> Result<HomReport> {
    budget.check(Cap::Hom, "homeomorphism enumeration |X|", x.len())?;
    let size = 1usize << x.len();
    if b.iter().any(|a| a >= size) {
        return Err(GgtError::usage("base contains a set outside P(X)"));
    }
    let sys = powerset_system(x, budget)?;
    let mut homs = Vec::new();
    for p in point_maps(x, x, budget)? {
        let mut inv = vec![usize::MAX; x.len()];
        for (i, &v) in p.iter().enumerate() {
            inv[v] = i;
        }
        if inv.contains(&usize::MAX) {
            continue;
        }
        if is_continuous(x, x, &p) && is_continuous(x, x, &inv) {
            homs.push(p);
        }
    }
    let stars: Vec<Vec<usize>> = homs
        .iter()
        .map(|p| induced_map(x, x, p))
        .collect::<Result<_>>()?;
    let star_set: BTreeSet<&Vec<usize>> = stars.iter().collect();
    let mut stars_are_automorphisms = true;
    for s in &stars {
        let m = star_morphism(x, s);
        stars_are_automorphisms &= m.is_bijective() && is_t_morphism(&sys, &m)?.is_none();
    }
    let mut stars_form_group = true;
    for s in &stars {
        for t in &stars {
            stars_form_group &= star_set.contains(&compose_tables(s, t));
        }
        let mut inv = vec![0; size];
        for (a, &v) in s.iter().enumerate() {
            inv[v] = a;
        }
        stars_form_group &= star_set.contains(&inv);
    }
    let mut star_isomorphism = star_set.len() == stars.len();
    for (i, f) in homs.iter().enumerate() {
        for (j, g) in homs.iter().enumerate() {
            let lhs = induced_map(x, x, &compose_points(f, g))?;
            star_isomorphism &= lhs == compose_tables(&stars[i], &stars[j]);
        }
    }
    let points = Subset::full(size);
    let fixed_star: Vec<Subset> = stars
        .iter()
        .map(|s| (0..size).filter(|&a| s[a] == a).collect())
        .collect();
    let fixed_setwise: Vec<Subset> = homs
        .iter()
        .map(|p| (0..size).filter(|&a| image_mask(p, a as u64) == a as u64).collect())
        .collect();
    let fixed_sets_agree = fixed_star == fixed_setwise;
    let star_side = abstract_correspondence(&points, &fixed_star, b);
    let hom_side = abstract_correspondence(&points, &fixed_setwise, b);
    let int_families_equal = star_side.int_family == hom_side.int_family;
    // Both sides index members identically, so β is the identity on index sets.
    let beta_bijective = star_side.gs_family == hom_side.gs_family;
    let holds = stars_are_automorphisms
        && stars_form_group
        && star_isomorphism
        && fixed_sets_agree
        && star_side.holds()
        && hom_side.holds()
        && int_families_equal
        && beta_bijective;
    Ok(HomReport {
        homeomorphisms: homs,
        stars_are_automorphisms,
        stars_form_group,
        star_isomorphism,
        fixed_sets_agree,
        star_side,
        hom_side,
        int_families_equal,
        beta_bijective,
        holds,
    })
}
