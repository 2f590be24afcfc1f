//! T-morphisms and θ-morphisms across all tiers, End/Aut enumeration, arrows, and the
//! construction of morphisms from maps on generating sets.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::carrier::{compose, Operation, OperationSystem, Repr, Tier, Tuples};
use crate::error::{GgtError, Result};
use crate::limits::{Budget, Cap};
use crate::subset::Subset;
use crate::tspace::{check_inside, generate_space, Check};
use crate::witness::{commutation_fails, Term, TermArg, Witness};

/// A total map from `source` into `target`; `map[x]` is `None` off the source.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Morphism {
    pub source: Subset,
    pub target: Subset,
    map: Vec<Option<usize>>,
}

impl Morphism {
    pub fn new(source: Subset, target: Subset, map: Vec<Option<usize>>) -> Result<Self> {
        for (x, v) in map.iter().enumerate() {
            match v {
                Some(v) if !source.contains(x) => {
                    return Err(GgtError::usage(format!("map sends {x} to {v} but {x} is not in the source")))
                }
                Some(v) if !target.contains(*v) => {
                    return Err(GgtError::usage(format!("image {v} of {x} is outside the target")))
                }
                None if source.contains(x) => {
                    return Err(GgtError::usage(format!("map is undefined at source element {x}")))
                }
                _ => {}
            }
        }
        if source.iter().any(|x| x >= map.len()) {
            return Err(GgtError::usage("map table is shorter than the source"));
        }
        Ok(Morphism { source, target, map })
    }

    /// `images[i]` is the image of the i-th source element in ascending order.
    pub fn from_images(n: usize, source: &Subset, target: &Subset, images: &[usize]) -> Result<Self> {
        let mut map = vec![None; n];
        if images.len() != source.len() {
            return Err(GgtError::usage("image list length differs from the source size"));
        }
        for (x, &y) in source.iter().zip(images) {
            map[x] = Some(y);
        }
        Morphism::new(source.clone(), target.clone(), map)
    }

    pub fn identity(n: usize, s: &Subset) -> Self {
        let mut map = vec![None; n];
        for x in s.iter() {
            map[x] = Some(x);
        }
        Morphism {
            source: s.clone(),
            target: s.clone(),
            map,
        }
    }

    pub fn get(&self, x: usize) -> Option<usize> {
        self.map.get(x).copied().flatten()
    }

    pub fn table(&self) -> &[Option<usize>] {
        &self.map
    }

    pub fn images(&self) -> Vec<usize> {
        self.source.iter().map(|x| self.map[x].expect("total on source")).collect()
    }

    pub fn image(&self) -> Subset {
        self.map.iter().flatten().copied().collect()
    }

    pub fn is_injective(&self) -> bool {
        self.image().len() == self.source.len()
    }

    pub fn is_bijective(&self) -> bool {
        self.is_injective() && self.image() == self.target
    }

    pub fn is_identity(&self) -> bool {
        self.source.iter().all(|x| self.map[x] == Some(x))
    }

    pub fn fixes(&self, b: &Subset) -> bool {
        b.iter().all(|x| self.get(x) == Some(x))
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &Morphism) -> Result<Morphism> {
        let mut map = vec![None; inner.map.len()];
        for x in inner.source.iter() {
            let y = inner.map[x].expect("total");
            map[x] = Some(self.get(y).ok_or_else(|| {
                GgtError::usage(format!("{y} is outside the source of the outer map"))
            })?);
        }
        Ok(Morphism {
            source: inner.source.clone(),
            target: self.target.clone(),
            map,
        })
    }

    pub fn inverse(&self) -> Option<Morphism> {
        if !self.is_bijective() {
            return None;
        }
        let n = self.map.len().max(self.target.iter().last().map_or(0, |m| m + 1));
        let mut map = vec![None; n];
        for x in self.source.iter() {
            map[self.map[x].expect("total")] = Some(x);
        }
        Some(Morphism {
            source: self.target.clone(),
            target: self.source.clone(),
            map,
        })
    }

    pub fn restrict(&self, u: &Subset) -> Morphism {
        let mut map = vec![None; self.map.len()];
        for x in u.iter() {
            map[x] = self.get(x);
        }
        Morphism {
            source: u.clone(),
            target: self.target.clone(),
            map,
        }
    }
}

/// Whether `σ` commutes with every operation, including matched definedness.
/// Generated systems are checked on generators only.
pub fn is_t_morphism(sys: &OperationSystem, sigma: &Morphism) -> Result<Option<Witness>> {
    commutation_witness(sys, &sys.ops, sigma)
}

fn commutation_witness(
    sys: &OperationSystem,
    ops: &[Operation],
    sigma: &Morphism,
) -> Result<Option<Witness>> {
    check_inside(sys, &sigma.source, "morphism source")?;
    let elems = sigma.source.to_vec();
    let mut mapped = Vec::new();
    for (i, f) in ops.iter().enumerate() {
        let mut t = Tuples::new(&elems, f.arity());
        while let Some(args) = t.next() {
            let v = f.eval(args);
            let lhs = v.and_then(|v| sigma.get(v));
            mapped.clear();
            mapped.extend(args.iter().map(|&a| sigma.get(a).expect("total")));
            let rhs = f.eval(&mapped);
            if commutation_fails(v, lhs, rhs) {
                return Ok(Some(Witness::Commutation {
                    op: i,
                    args: args.to_vec(),
                    map: sigma.table().to_vec(),
                    lhs,
                    rhs,
                }));
            }
        }
    }
    Ok(None)
}

/// Full-T check: every member of the materialized closure, for unary systems.
pub fn is_t_morphism_full(sys: &OperationSystem, sigma: &Morphism) -> Result<Option<Witness>> {
    let members = sys.materialize_unary()?;
    commutation_witness(sys, &members, sigma)
}

/// A smallest-first generating subset of an explicit unary system's members.
pub fn generator_basis(sys: &OperationSystem) -> Result<Vec<Operation>> {
    let members = sys.materialize_unary()?;
    let target: HashSet<Operation> = members.iter().cloned().collect();
    let mut basis = members.clone();
    let mut i = 0;
    while i < basis.len() {
        let mut rest = basis.clone();
        rest.remove(i);
        let closed: HashSet<Operation> = crate::carrier::generate_closure(&rest, Tier::Unary, 1)?
            .ops
            .into_iter()
            .collect();
        if closed == target {
            basis = rest;
        } else {
            i += 1;
        }
    }
    Ok(basis)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    End,
    Aut,
}

struct Constraint {
    op: usize,
    args: Vec<usize>,
    value: Option<usize>,
}

/// Every function `0..k → 0..m` as an image list, in lexicographic order.
pub fn all_functions(k: usize, m: usize, budget: &Budget) -> Result<Vec<Vec<usize>>> {
    let count = (m as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    let limit = budget.limit(Cap::Maps);
    if count > limit as u128 {
        return Err(GgtError::budget("function enumeration", limit, count.min(usize::MAX as u128) as usize));
    }
    let mut out = Vec::with_capacity(count as usize);
    if m == 0 && k > 0 {
        return Ok(out);
    }
    let mut cur = vec![0usize; k];
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            cur[i] += 1;
            if cur[i] < m {
                break;
            }
            cur[i] = 0;
        }
    }
}

/// All maps `source → target` commuting with the system, optionally injective and fixing
/// `fixed` pointwise, in ascending lexicographic order of their image lists.
pub fn enumerate_maps(
    sys: &OperationSystem,
    source: &Subset,
    target: &Subset,
    injective: bool,
    fixed: &Subset,
    budget: &Budget,
) -> Result<Vec<Morphism>> {
    check_inside(sys, source, "source")?;
    check_inside(sys, target, "target")?;
    let elems = source.to_vec();
    let n = sys.n();
    let mut pos = vec![usize::MAX; n];
    for (i, &x) in elems.iter().enumerate() {
        pos[x] = i;
    }
    let mut buckets: Vec<Vec<Constraint>> = (0..elems.len()).map(|_| Vec::new()).collect();
    for (i, f) in sys.ops.iter().enumerate() {
        let mut t = Tuples::new(&elems, f.arity());
        while let Some(args) = t.next() {
            let value = f.eval(args);
            if let Some(v) = value {
                if !source.contains(v) {
                    // σ(f(a)) cannot be defined, so nothing commutes.
                    return Ok(Vec::new());
                }
            }
            let key = args
                .iter()
                .chain(value.iter())
                .map(|&x| pos[x])
                .max()
                .expect("arity is positive");
            buckets[key].push(Constraint {
                op: i,
                args: args.to_vec(),
                value,
            });
        }
    }
    let cands: Vec<Vec<usize>> = elems
        .iter()
        .map(|&x| {
            if fixed.contains(x) {
                if target.contains(x) {
                    vec![x]
                } else {
                    vec![]
                }
            } else {
                target.to_vec()
            }
        })
        .collect();
    let mut asg = vec![usize::MAX; n];
    let mut used = Subset::new();
    let mut out = Vec::new();
    let limit = budget.limit(Cap::Maps);
    let mut scratch = Vec::new();
    search(
        0, &elems, &cands, &buckets, sys, injective, &mut asg, &mut used, &mut out, limit,
        &mut scratch, source, target,
    )?;
    Ok(out)
}

#[allow(clippy::too_many_arguments)]
fn search(
    i: usize,
    elems: &[usize],
    cands: &[Vec<usize>],
    buckets: &[Vec<Constraint>],
    sys: &OperationSystem,
    injective: bool,
    asg: &mut Vec<usize>,
    used: &mut Subset,
    out: &mut Vec<Morphism>,
    limit: usize,
    scratch: &mut Vec<usize>,
    source: &Subset,
    target: &Subset,
) -> Result<()> {
    if i == elems.len() {
        if out.len() >= limit {
            return Err(GgtError::budget("morphisms enumerated", limit, limit + 1));
        }
        let map = (0..asg.len())
            .map(|x| (asg[x] != usize::MAX).then_some(asg[x]))
            .collect();
        out.push(Morphism {
            source: source.clone(),
            target: target.clone(),
            map,
        });
        return Ok(());
    }
    let x = elems[i];
    for &y in &cands[i] {
        if injective && used.contains(y) {
            continue;
        }
        asg[x] = y;
        let ok = buckets[i].iter().all(|c| {
            scratch.clear();
            scratch.extend(c.args.iter().map(|&a| asg[a]));
            let rhs = sys.ops[c.op].eval(scratch);
            match c.value {
                None => rhs.is_none(),
                Some(v) => rhs == Some(asg[v]),
            }
        });
        if ok {
            if injective {
                used.insert(y);
            }
            search(
                i + 1, elems, cands, buckets, sys, injective, asg, used, out, limit, scratch,
                source, target,
            )?;
            if injective {
                used.remove(y);
            }
        }
        asg[x] = usize::MAX;
    }
    Ok(())
}

/// `End_T(S)` or `Aut_T(S)` in ascending map-code order.
pub fn enumerate_morphisms(
    sys: &OperationSystem,
    s: &Subset,
    kind: Kind,
    budget: &Budget,
) -> Result<Vec<Morphism>> {
    enumerate_fixing(sys, s, &Subset::new(), kind, budget)
}

/// Endomorphisms or automorphisms of `s` fixing `b` pointwise.
pub fn enumerate_fixing(
    sys: &OperationSystem,
    s: &Subset,
    b: &Subset,
    kind: Kind,
    budget: &Budget,
) -> Result<Vec<Morphism>> {
    match kind {
        Kind::End => budget.check(Cap::End, "endomorphism enumeration |S|", s.len())?,
        Kind::Aut => budget.check(Cap::Aut, "automorphism enumeration |S|", s.len())?,
    }
    enumerate_maps(sys, s, s, kind == Kind::Aut, b, budget)
}

/// Pairs `(f, g) ∈ T₁ × T₂` by operation index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThetaRelation {
    pub pairs: Vec<(usize, usize)>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThetaValue {
    Value(usize),
    Undefined,
    IllDefined,
}

impl ThetaRelation {
    pub fn new(
        pairs: Vec<(usize, usize)>,
        sys1: &OperationSystem,
        sys2: &OperationSystem,
    ) -> Result<Self> {
        for &(f, g) in &pairs {
            let (a, b) = match (sys1.ops.get(f), sys2.ops.get(g)) {
                (Some(a), Some(b)) => (a, b),
                _ => return Err(GgtError::DanglingRef(format!("θ pair ({f}, {g})"))),
            };
            if a.arity() != b.arity() {
                return Err(GgtError::Schema(format!(
                    "θ pairs {} with {} of different arity",
                    a.name, b.name
                )));
            }
        }
        let mut pairs = pairs;
        pairs.sort();
        pairs.dedup();
        Ok(ThetaRelation { pairs })
    }

    /// The identity pairing on a system's operations.
    pub fn identity(sys: &OperationSystem) -> Self {
        ThetaRelation {
            pairs: (0..sys.ops.len()).map(|i| (i, i)).collect(),
        }
    }

    pub fn domain(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.pairs.iter().map(|p| p.0).collect();
        d.dedup();
        d
    }

    pub fn partners(&self, f: usize) -> Vec<usize> {
        self.pairs.iter().filter(|p| p.0 == f).map(|p| p.1).collect()
    }

    pub fn inverse(&self) -> ThetaRelation {
        let mut pairs: Vec<(usize, usize)> = self.pairs.iter().map(|&(a, b)| (b, a)).collect();
        pairs.sort();
        ThetaRelation { pairs }
    }

    /// Whether every operation has at most one partner.
    pub fn is_function(&self) -> bool {
        self.pairs.windows(2).all(|w| w[0].0 != w[1].0)
    }
}

/// `θ(f)(args)`: the common value of all partners, UNDEFINED when all are undefined.
pub fn theta_value(
    theta: &ThetaRelation,
    target: &OperationSystem,
    f: usize,
    args: &[usize],
) -> Result<ThetaValue> {
    let partners = theta.partners(f);
    if partners.is_empty() {
        return Err(GgtError::usage(format!("operation {f} is not in the domain of θ")));
    }
    let mut seen: Option<Option<usize>> = None;
    for g in partners {
        let v = target.ops[g].apply(args)?;
        match seen {
            None => seen = Some(v),
            Some(prev) if prev != v => return Ok(ThetaValue::IllDefined),
            _ => {}
        }
    }
    Ok(match seen.flatten() {
        Some(v) => ThetaValue::Value(v),
        None => ThetaValue::Undefined,
    })
}

/// Two partners of `f` that disagree at `args`, if any.
fn fiber_witness(
    theta: &ThetaRelation,
    target: &OperationSystem,
    f: usize,
    args: &[usize],
) -> Option<Witness> {
    let partners = theta.partners(f);
    let first = partners[0];
    let v0 = target.ops[first].eval(args);
    partners[1..].iter().find_map(|&g| {
        let v = target.ops[g].eval(args);
        (v != v0).then(|| Witness::ThetaFiber {
            op: f,
            partners: [first, g],
            args: args.to_vec(),
            values: [v0, v],
        })
    })
}

/// Whether `θ` restricted to `a` is a map: partners of each operation agree on `a`-tuples.
pub fn theta_is_map_on(
    theta: &ThetaRelation,
    target: &OperationSystem,
    a: &Subset,
) -> Result<Option<Witness>> {
    check_inside(target, a, "subset")?;
    let elems = a.to_vec();
    for f in theta.domain() {
        if theta.partners(f).len() < 2 {
            continue;
        }
        let k = target.ops[theta.partners(f)[0]].arity();
        let mut t = Tuples::new(&elems, k);
        while let Some(args) = t.next() {
            if let Some(w) = fiber_witness(theta, target, f, args) {
                return Ok(Some(w));
            }
        }
    }
    Ok(None)
}

/// Both clauses of the θ-morphism definition for `φ: S₁ → S₂`.
pub fn is_theta_morphism(
    sys1: &OperationSystem,
    sys2: &OperationSystem,
    theta: &ThetaRelation,
    phi: &Morphism,
) -> Result<Option<Witness>> {
    check_inside(sys1, &phi.source, "θ-morphism source")?;
    if let Some(w) = theta_is_map_on(theta, sys2, &phi.image())? {
        return Ok(Some(w));
    }
    let elems = phi.source.to_vec();
    for f in theta.domain() {
        let op = &sys1.ops[f];
        let mut t = Tuples::new(&elems, op.arity());
        while let Some(args) = t.next() {
            let v = op.eval(args);
            let lhs = v.and_then(|v| phi.get(v));
            let mapped: Vec<usize> = args.iter().map(|&a| phi.get(a).expect("total")).collect();
            let rhs = match theta_value(theta, sys2, f, &mapped)? {
                ThetaValue::Value(x) => Some(x),
                ThetaValue::Undefined => None,
                ThetaValue::IllDefined => {
                    return Ok(fiber_witness(theta, sys2, f, &mapped));
                }
            };
            if commutation_fails(v, lhs, rhs) {
                return Ok(Some(Witness::ThetaCommutation {
                    op: f,
                    args: args.to_vec(),
                    map: phi.table().to_vec(),
                    lhs,
                    rhs,
                }));
            }
        }
    }
    Ok(None)
}

/// Where operations of an arrow are evaluated on the image side.
#[derive(Clone, Copy)]
pub enum ArrowCtx<'a> {
    Same(&'a OperationSystem),
    Theta {
        source: &'a OperationSystem,
        target: &'a OperationSystem,
        theta: &'a ThetaRelation,
    },
}

enum Img {
    Value(usize),
    Undefined,
    Ill(Witness),
}

impl<'a> ArrowCtx<'a> {
    pub fn source(&self) -> &'a OperationSystem {
        match self {
            ArrowCtx::Same(s) => s,
            ArrowCtx::Theta { source, .. } => source,
        }
    }

    pub fn image_system(&self) -> &'a OperationSystem {
        match self {
            ArrowCtx::Same(s) => s,
            ArrowCtx::Theta { target, .. } => target,
        }
    }

    fn ops(&self) -> Result<Vec<usize>> {
        match self {
            ArrowCtx::Same(s) => Ok((0..s.ops.len()).collect()),
            ArrowCtx::Theta { source, theta, .. } => {
                let dom = theta.domain();
                if source.repr == Repr::Generated && dom.len() != source.ops.len() {
                    return Err(GgtError::usage(
                        "θ must pair every generator of a generated source system",
                    ));
                }
                Ok(dom)
            }
        }
    }

    fn image(&self, op: usize, args: &[usize]) -> Result<Img> {
        match self {
            ArrowCtx::Same(s) => Ok(match s.ops[op].eval(args) {
                Some(v) => Img::Value(v),
                None => Img::Undefined,
            }),
            ArrowCtx::Theta { target, theta, .. } => {
                Ok(match theta_value(theta, target, op, args)? {
                    ThetaValue::Value(v) => Img::Value(v),
                    ThetaValue::Undefined => Img::Undefined,
                    ThetaValue::IllDefined => Img::Ill(
                        fiber_witness(theta, target, op, args).expect("ill-defined has a witness"),
                    ),
                })
            }
        }
    }
}

/// The least relation containing `(g(u⃗), g(αu⃗))` and closed under componentwise
/// operation application, stored as a function with a derivation per value.
#[derive(Clone, Debug)]
pub struct PairClosure {
    pub map: Vec<Option<usize>>,
    pub terms: Vec<Option<Term>>,
}

impl PairClosure {
    pub fn domain(&self) -> Subset {
        (0..self.map.len()).filter(|&x| self.map[x].is_some()).collect()
    }

    pub fn image(&self) -> Subset {
        self.map.iter().flatten().copied().collect()
    }
}

fn alpha_args(alpha: &[Option<usize>], args: &[usize]) -> Vec<usize> {
    args.iter().map(|&a| alpha[a].expect("α total on U")).collect()
}

/// Pair closure; `Err` carries the literal arrow failure.
pub fn pair_closure(
    ctx: ArrowCtx,
    u: &Subset,
    alpha: &[Option<usize>],
) -> Result<std::result::Result<PairClosure, Witness>> {
    let sys = ctx.source();
    check_inside(sys, u, "generating set")?;
    if u.iter().any(|x| alpha.get(x).copied().flatten().is_none()) {
        return Err(GgtError::usage("α must be defined on every element of U"));
    }
    let ops = ctx.ops()?;
    let n = sys.n();
    let mut pc = PairClosure {
        map: vec![None; n],
        terms: vec![None; n],
    };

    macro_rules! insert {
        ($first:expr, $img:expr, $term:expr) => {{
            let first: usize = $first;
            let term: Term = $term;
            match $img {
                Img::Ill(w) => return Ok(Err(w)),
                Img::Undefined => {
                    return Ok(Err(Witness::ArrowUndefined {
                        term,
                        alpha: alpha.to_vec(),
                        value: first,
                    }))
                }
                Img::Value(second) => match pc.map[first] {
                    None => {
                        pc.map[first] = Some(second);
                        pc.terms[first] = Some(term);
                        true
                    }
                    Some(prev) if prev == second => false,
                    Some(prev) => {
                        return Ok(Err(Witness::ArrowCollision {
                            left: pc.terms[first].clone().expect("term recorded"),
                            right: term,
                            alpha: alpha.to_vec(),
                            value: first,
                            images: [Some(prev), Some(second)],
                        }))
                    }
                },
            }
        }};
    }

    let uel = u.to_vec();
    for &i in &ops {
        let f = &sys.ops[i];
        let mut t = Tuples::new(&uel, f.arity());
        while let Some(args) = t.next() {
            if let Some(first) = f.eval(args) {
                let img = ctx.image(i, &alpha_args(alpha, args))?;
                let term = Term {
                    op: i,
                    args: args.iter().map(|&a| TermArg::Leaf(a)).collect(),
                };
                insert!(first, img, term);
            }
        }
    }
    if sys.repr == Repr::Generated {
        loop {
            let mut changed = false;
            let dom = pc.domain().to_vec();
            for &i in &ops {
                let f = &sys.ops[i];
                let mut t = Tuples::new(&dom, f.arity());
                while let Some(args) = t.next() {
                    if let Some(first) = f.eval(args) {
                        let img_args: Vec<usize> =
                            args.iter().map(|&a| pc.map[a].expect("in domain")).collect();
                        let img = ctx.image(i, &img_args)?;
                        let term = Term {
                            op: i,
                            args: args
                                .iter()
                                .map(|&a| {
                                    TermArg::Node(Box::new(pc.terms[a].clone().expect("term")))
                                })
                                .collect(),
                        };
                        changed |= insert!(first, img, term);
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }
    Ok(Ok(pc))
}

/// An operation undefined on a tuple of generated values but defined on their images.
fn definedness_gap(ctx: ArrowCtx, pc: &PairClosure) -> Result<Option<Witness>> {
    let sys = ctx.source();
    let dom = pc.domain().to_vec();
    for i in ctx.ops()? {
        let f = &sys.ops[i];
        let mut t = Tuples::new(&dom, f.arity());
        while let Some(args) = t.next() {
            if f.eval(args).is_none() {
                let img_args: Vec<usize> = args.iter().map(|&a| pc.map[a].expect("dom")).collect();
                if let Img::Value(v) = ctx.image(i, &img_args)? {
                    return Ok(Some(Witness::ArrowDefinedness {
                        op: i,
                        args: args.to_vec(),
                        map: pc.map.clone(),
                        image: v,
                    }));
                }
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, Serialize)]
pub struct ArrowReport {
    /// The arrow exactly as defined (definedness propagates forwards only).
    pub literal: bool,
    /// Literal arrow plus backwards definedness, the form under which the induced map
    /// is always a morphism.
    pub holds: bool,
    pub witness: Option<Witness>,
    /// `⟨U⟩` when the pair closure succeeded.
    pub domain: Option<Subset>,
}

/// `U →_{T,α} V` (or the θ form).
pub fn map_arrow(
    ctx: ArrowCtx,
    u: &Subset,
    alpha: &[Option<usize>],
) -> Result<(ArrowReport, Option<PairClosure>)> {
    match pair_closure(ctx, u, alpha)? {
        Err(w) => Ok((
            ArrowReport {
                literal: false,
                holds: false,
                witness: Some(w),
                domain: None,
            },
            None,
        )),
        Ok(pc) => {
            let gap = definedness_gap(ctx, &pc)?;
            Ok((
                ArrowReport {
                    literal: true,
                    holds: gap.is_none(),
                    witness: gap,
                    domain: Some(pc.domain()),
                },
                Some(pc),
            ))
        }
    }
}

/// Two-way arrow: `α` injective on `U`, arrows for `α` and for `α⁻¹` (with `θ⁻¹`).
pub fn map_arrow_two_way(
    ctx: ArrowCtx,
    u: &Subset,
    alpha: &[Option<usize>],
) -> Result<(ArrowReport, ArrowReport)> {
    let v: Subset = u.iter().map(|x| alpha[x].expect("α total on U")).collect();
    if v.len() != u.len() {
        return Err(GgtError::usage("two-way arrow needs α injective on U"));
    }
    let n2 = ctx.image_system().n();
    let mut inv = vec![None; n2];
    for x in u.iter() {
        inv[alpha[x].expect("total")] = Some(x);
    }
    let fwd = map_arrow(ctx, u, alpha)?.0;
    let back = match ctx {
        ArrowCtx::Same(s) => map_arrow(ArrowCtx::Same(s), &v, &inv)?.0,
        ArrowCtx::Theta { source, target, theta } => {
            let ti = theta.inverse();
            map_arrow(
                ArrowCtx::Theta {
                    source: target,
                    target: source,
                    theta: &ti,
                },
                &v,
                &inv,
            )?
            .0
        }
    };
    Ok((fwd, back))
}

/// Whether `θ(f∘(g⃗))(z) = θ(f)∘(θ(g⃗))(z)` on `a`-tuples, for explicit source systems.
pub fn theta_distributive_over(
    sys1: &OperationSystem,
    sys2: &OperationSystem,
    theta: &ThetaRelation,
    a: &Subset,
) -> Result<Check> {
    if sys1.repr == Repr::Generated {
        return Ok(Check::na(
            "θ on generators is extended to composites distributively by construction",
        ));
    }
    let dom = theta.domain();
    let elems = a.to_vec();
    for &f in &dom {
        let fo = &sys1.ops[f];
        let mut picks = Tuples::new(&dom, fo.arity());
        while let Some(gs) = picks.next() {
            let gops: Vec<&Operation> = gs.iter().map(|&g| &sys1.ops[g]).collect();
            let c = compose(fo, &gops)?;
            let Some(m) = sys1.ops.iter().position(|o| *o == c) else {
                continue;
            };
            if !dom.contains(&m) {
                continue;
            }
            let mut zs = Tuples::new(&elems, c.arity());
            while let Some(z) = zs.next() {
                let lhs = match theta_value(theta, sys2, m, z)? {
                    ThetaValue::Value(v) => v,
                    _ => continue,
                };
                let mut inner = Vec::new();
                let mut off = 0;
                let mut rhs = None;
                let mut ok = true;
                for &g in gs.iter() {
                    let k = sys1.ops[g].arity();
                    match theta_value(theta, sys2, g, &z[off..off + k])? {
                        ThetaValue::Value(v) => inner.push(v),
                        _ => {
                            ok = false;
                            break;
                        }
                    }
                    off += k;
                }
                if ok {
                    if let ThetaValue::Value(v) = theta_value(theta, sys2, f, &inner)? {
                        rhs = Some(v);
                    }
                }
                if rhs != Some(lhs) {
                    let mut at = vec![f];
                    at.extend_from_slice(gs);
                    at.extend_from_slice(z);
                    return Ok(Check::Fail {
                        witness: Witness::Mismatch {
                            what: "θ of a composite versus composite of θ-images".into(),
                            at,
                            left: Some(lhs),
                            right: rhs,
                        },
                    });
                }
            }
        }
    }
    Ok(Check::Pass)
}

#[derive(Clone, Debug, Serialize)]
pub struct Construction {
    pub arrow: ArrowReport,
    pub morphism: Option<Morphism>,
    /// Independent re-verification of the constructed map.
    pub verified: Check,
}

/// The map `f(u⃗) ↦ f(αu⃗)` (or `θ(f)(αu⃗)`) on `⟨U⟩`, when the arrow holds.
pub fn construct_morphism(ctx: ArrowCtx, u: &Subset, alpha: &[Option<usize>]) -> Result<Construction> {
    let (arrow, pc) = map_arrow(ctx, u, alpha)?;
    let Some(pc) = pc.filter(|_| arrow.holds) else {
        return Ok(Construction {
            arrow,
            morphism: None,
            verified: Check::na("arrow does not hold"),
        });
    };
    let v: Subset = u.iter().map(|x| alpha[x].expect("total")).collect();
    let target = generate_space(ctx.image_system(), &v)?;
    let sigma = Morphism::new(pc.domain(), target.union(&pc.image()), pc.map.clone())?;
    let verified = match ctx {
        ArrowCtx::Same(sys) => Check::from_witness(is_t_morphism(sys, &sigma)?),
        ArrowCtx::Theta { source, target, theta } => {
            let map_ok = theta_is_map_on(theta, target, &sigma.image())?.is_none();
            let dist = theta_distributive_over(source, target, theta, &v)?;
            if map_ok && !dist.failed() {
                Check::from_witness(is_theta_morphism(source, target, theta, &sigma)?)
            } else {
                Check::na("θ is not a map on the image or not distributive over V")
            }
        }
    };
    Ok(Construction {
        arrow,
        morphism: Some(sigma),
        verified,
    })
}

/// All maps `U → codomain` as α tables, in lexicographic order.
fn all_alphas(n: usize, u: &Subset, codomain: &Subset, budget: &Budget) -> Result<Vec<Vec<Option<usize>>>> {
    let cod = codomain.to_vec();
    let count = (cod.len() as f64).powi(u.len() as i32);
    if count > budget.limit(Cap::Maps) as f64 {
        return Err(GgtError::budget(
            "candidate maps on the generating set",
            budget.limit(Cap::Maps),
            count.min(usize::MAX as f64) as usize,
        ));
    }
    let uel = u.to_vec();
    let mut out = Vec::new();
    let mut t = Tuples::new(&cod, uel.len());
    while let Some(pick) = t.next() {
        let mut a = vec![None; n];
        for (&x, &y) in uel.iter().zip(pick) {
            a[x] = Some(y);
        }
        out.push(a);
    }
    Ok(out)
}

/// A map α on `U` constructing `σ: ⟨U⟩ → ..`, searching `codomain` when `U ⊄ ⟨U⟩`.
pub fn find_constructing_map(
    ctx: ArrowCtx,
    sigma: &Morphism,
    u: &Subset,
    codomain: &Subset,
    budget: &Budget,
) -> Result<Option<Vec<Option<usize>>>> {
    let sys = ctx.source();
    let gen = generate_space(sys, u)?;
    if gen != sigma.source {
        return Err(GgtError::usage("σ must be defined exactly on ⟨U⟩"));
    }
    if matches!(ctx, ArrowCtx::Same(_)) && u.is_subset(&gen) {
        let mut a = vec![None; sys.n()];
        for x in u.iter() {
            a[x] = sigma.get(x);
        }
        return Ok(Some(a));
    }
    for a in all_alphas(sys.n(), u, codomain, budget)? {
        if let Ok(pc) = pair_closure(ctx, u, &a)? {
            if pc.domain() == sigma.source && sigma.source.iter().all(|x| pc.map[x] == sigma.get(x)) {
                return Ok(Some(a));
            }
        }
    }
    Ok(None)
}

/// The single generator `g` with `⟨g⟩ = T`, for unary systems generated by one map.
pub fn single_generator(sys: &OperationSystem) -> Result<Option<Operation>> {
    let members: HashSet<Operation> = sys.materialize_unary()?.into_iter().collect();
    for g in &members {
        let c: HashSet<Operation> = crate::carrier::generate_closure(std::slice::from_ref(g), Tier::Unary, 1)?
            .ops
            .into_iter()
            .collect();
        if c == members {
            return Ok(Some(g.clone()));
        }
    }
    Ok(None)
}

/// For `T = ⟨g⟩`: every T-morphism `⟨U⟩ → ⟨V⟩` should be constructible by some
/// `α: U → V ∪ ⟨V⟩`. Returns a T-morphism for which no such α exists.
pub fn single_generator_counterexample(
    sys: &OperationSystem,
    u: &Subset,
    v: &Subset,
    budget: &Budget,
) -> Result<Option<Morphism>> {
    if sys.tier != Tier::Unary {
        return Err(GgtError::usage("the single-generator constructibility check is unary only"));
    }
    let su = generate_space(sys, u)?;
    let sv = generate_space(sys, v)?;
    let cod = v.union(&sv);
    for sigma in enumerate_maps(sys, &su, &sv, false, &Subset::new(), budget)? {
        if find_constructing_map(ArrowCtx::Same(sys), &sigma, u, &cod, budget)?.is_none() {
            return Ok(Some(sigma));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ArrowSets {
    pub front: Subset,
    pub class: Subset,
}

/// `[u)_T ∩ scope` and `[u]_T ∩ scope` via single-point arrows.
pub fn arrow_sets(sys: &OperationSystem, u: usize, scope: &Subset) -> Result<ArrowSets> {
    let n = sys.n();
    if u >= n {
        return Err(GgtError::usage(format!("{u} is not in the carrier")));
    }
    let arrow = |a: usize, b: usize| -> Result<bool> {
        let mut alpha = vec![None; n];
        alpha[a] = Some(b);
        Ok(pair_closure(ArrowCtx::Same(sys), &Subset::singleton(a), &alpha)?.is_ok())
    };
    let mut front = Subset::new();
    let mut class = Subset::new();
    for v in scope.iter() {
        if arrow(u, v)? {
            front.insert(v);
            if arrow(v, u)? {
                class.insert(v);
            }
        }
    }
    Ok(ArrowSets { front, class })
}

/// The inverse of a bijective T-morphism, re-verified.
pub fn invert_isomorphism(sys: &OperationSystem, sigma: &Morphism) -> Result<(Morphism, Check)> {
    let inv = sigma
        .inverse()
        .ok_or_else(|| GgtError::usage("map is not bijective onto its target"))?;
    let check = Check::from_witness(is_t_morphism(sys, &inv)?);
    Ok((inv, check))
}

/// Inverse of a bijective θ-morphism, verified against `θ⁻¹`.
pub fn invert_theta_isomorphism(
    sys1: &OperationSystem,
    sys2: &OperationSystem,
    theta: &ThetaRelation,
    phi: &Morphism,
) -> Result<(Morphism, ThetaRelation, Check)> {
    let inv = phi
        .inverse()
        .ok_or_else(|| GgtError::usage("map is not bijective onto its target"))?;
    let ti = theta.inverse();
    let check = Check::from_witness(is_theta_morphism(sys2, sys1, &ti, &inv)?);
    Ok((inv, ti, check))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::carrier::Carrier;

    fn shifts(n: usize, ks: &[usize]) -> OperationSystem {
        let maps: Vec<Vec<usize>> = ks
            .iter()
            .map(|&k| (0..n).map(|x| (x + k) % n).collect())
            .collect();
        OperationSystem::unary_explicit(n, &maps)
    }

    fn cycle(n: usize) -> OperationSystem {
        shifts(n, &(0..n).collect::<Vec<_>>())
    }

    /// P({a,b}) with opens {∅,{b},X}; elements are masks.
    fn sierpinski() -> OperationSystem {
        OperationSystem::unary_explicit(4, &[vec![0, 1, 2, 3], vec![0, 1, 3, 3]])
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

    fn alpha(n: usize, pairs: &[(usize, usize)]) -> Vec<Option<usize>> {
        let mut a = vec![None; n];
        for &(x, y) in pairs {
            a[x] = Some(y);
        }
        a
    }

    fn set(v: &[usize]) -> Subset {
        v.iter().copied().collect()
    }

    #[test]
    fn t_morphism_examples() {
        let t = cycle(3);
        let s = Subset::full(3);
        assert!(is_t_morphism(&t, &Morphism::identity(3, &s)).unwrap().is_none());
        let plus1 = Morphism::from_images(3, &s, &s, &[1, 2, 0]).unwrap();
        assert!(is_t_morphism(&t, &plus1).unwrap().is_none());
        let p = Subset::full(4);
        let zero = Morphism::from_images(4, &p, &p, &[0, 0, 0, 0]).unwrap();
        assert!(is_t_morphism(&sierpinski(), &zero).unwrap().is_none());
        let c = Morphism::from_images(3, &s, &s, &[1, 1, 1]).unwrap();
        let w = is_t_morphism(&t, &c).unwrap().unwrap();
        let ctx = crate::witness::ReplayContext { sys: &t, target: None, theta: None };
        assert!(w.replay(&ctx).unwrap());
    }

    #[test]
    fn enumeration_examples() {
        let b = Budget::default();
        let id = shifts(3, &[0]);
        let s = Subset::full(3);
        assert_eq!(enumerate_morphisms(&id, &s, Kind::End, &b).unwrap().len(), 27);
        assert_eq!(enumerate_morphisms(&id, &s, Kind::Aut, &b).unwrap().len(), 6);
        let p = Subset::full(4);
        assert_eq!(enumerate_morphisms(&sierpinski(), &p, Kind::End, &b).unwrap().len(), 36);
        assert_eq!(enumerate_morphisms(&sierpinski(), &p, Kind::Aut, &b).unwrap().len(), 2);
        let g = OperationSystem::unary_explicit(3, &[vec![1, 2, 0]]).as_generated();
        let end = enumerate_morphisms(&g, &s, Kind::End, &b).unwrap();
        let aut = enumerate_morphisms(&g, &s, Kind::Aut, &b).unwrap();
        assert_eq!(end, aut);
        assert_eq!(
            end.iter().map(Morphism::images).collect::<Vec<_>>(),
            vec![vec![0, 1, 2], vec![1, 2, 0], vec![2, 0, 1]]
        );
        assert!(enumerate_morphisms(&shifts(9, &[0]), &Subset::full(9), Kind::End, &b).is_err());
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let b = Budget::default();
        let sys = cap3();
        let s = Subset::full(4);
        let fast = enumerate_morphisms(&sys, &s, Kind::End, &b).unwrap();
        let mut slow = Vec::new();
        let el: Vec<usize> = (0..4).collect();
        let mut t = Tuples::new(&el, 4);
        while let Some(img) = t.next() {
            let m = Morphism::from_images(4, &s, &s, img).unwrap();
            if is_t_morphism(&sys, &m).unwrap().is_none() {
                slow.push(m);
            }
        }
        assert_eq!(fast, slow);
    }

    fn mod_theta() -> (OperationSystem, OperationSystem, ThetaRelation) {
        let a = cycle(4);
        let b = cycle(2);
        let th = ThetaRelation::new((0..4).map(|k| (k, k % 2)).collect(), &a, &b).unwrap();
        (a, b, th)
    }

    #[test]
    fn theta_examples() {
        let (a, b, th) = mod_theta();
        assert_eq!(theta_value(&th, &b, 1, &[1]).unwrap(), ThetaValue::Value(0));
        let rel = ThetaRelation::new(vec![(1, 0), (1, 1)], &a, &b).unwrap();
        assert_eq!(theta_value(&rel, &b, 1, &[0]).unwrap(), ThetaValue::IllDefined);
        assert!(theta_value(&rel, &b, 2, &[0]).is_err());
        let phi = Morphism::from_images(4, &Subset::full(4), &Subset::full(2), &[0, 1, 0, 1]).unwrap();
        assert!(is_theta_morphism(&a, &b, &th, &phi).unwrap().is_none());
        let bad = ThetaRelation::new(vec![(1, 0)], &a, &b).unwrap();
        let w = is_theta_morphism(&a, &b, &bad, &phi).unwrap().unwrap();
        let ctx = crate::witness::ReplayContext { sys: &a, target: Some(&b), theta: Some(&bad) };
        assert!(w.replay(&ctx).unwrap());
        match w {
            Witness::ThetaCommutation { args, lhs, rhs, .. } => {
                assert_eq!(args, vec![0]);
                assert_eq!((lhs, rhs), (Some(1), Some(0)));
            }
            other => panic!("unexpected {other:?}"),
        }
        let t = cycle(3);
        let s = Subset::full(3);
        let plus1 = Morphism::from_images(3, &s, &s, &[1, 2, 0]).unwrap();
        assert!(is_theta_morphism(&t, &t, &ThetaRelation::identity(&t), &plus1).unwrap().is_none());
    }

    #[test]
    fn arrow_examples() {
        let t = cycle(3);
        let (r, _) = map_arrow(ArrowCtx::Same(&t), &set(&[0, 1]), &alpha(3, &[(0, 0), (1, 1)])).unwrap();
        assert!(r.literal && r.holds);
        let (r, _) = map_arrow(ArrowCtx::Same(&t), &set(&[0]), &alpha(3, &[(0, 1)])).unwrap();
        assert!(r.holds);
        let sys = cap3();
        let a = alpha(4, &[(0, 0), (3, 1)]);
        let (r, _) = map_arrow(ArrowCtx::Same(&sys), &set(&[0, 3]), &a).unwrap();
        // No collision among the generated values, but add(3,3) is undefined while add(1,1) = 2.
        assert!(r.literal);
        assert!(!r.holds);
        let w = r.witness.unwrap();
        let ctx = crate::witness::ReplayContext { sys: &sys, target: None, theta: None };
        assert!(w.replay(&ctx).unwrap());
        // A genuine collision: 1+1 = 2 but α(1)+α(1) = 2 ≠ α-image of Id(2) = 0.
        let a = alpha(4, &[(1, 1), (2, 0)]);
        let (r, _) = map_arrow(ArrowCtx::Same(&sys), &set(&[1, 2]), &a).unwrap();
        assert!(!r.literal);
        let w = r.witness.unwrap();
        assert!(matches!(w, Witness::ArrowCollision { .. }));
        assert!(w.replay(&ctx).unwrap());
    }

    #[test]
    fn arrow_sets_examples() {
        let id = shifts(3, &[0]);
        let s = Subset::full(3);
        let r = arrow_sets(&id, 0, &s).unwrap();
        assert_eq!((r.front.clone(), r.class.clone()), (s.clone(), s.clone()));
        let r = arrow_sets(&cycle(3), 0, &s).unwrap();
        assert_eq!(r.front, s);
        // Sierpiński: Cl({b}) ≠ Id({b}) constrains nothing; Cl(X) = Id(X) forces closed targets.
        let p = Subset::full(4);
        assert_eq!(arrow_sets(&sierpinski(), 2, &p).unwrap().front, p);
        assert_eq!(arrow_sets(&sierpinski(), 3, &p).unwrap().front, set(&[0, 1, 3]));
    }

    #[test]
    fn construction_examples() {
        let g = OperationSystem::unary_explicit(3, &[vec![1, 2, 0]]).as_generated();
        let c = construct_morphism(ArrowCtx::Same(&g), &set(&[0]), &alpha(3, &[(0, 1)])).unwrap();
        assert!(c.verified.passed());
        assert_eq!(c.morphism.unwrap().images(), vec![1, 2, 0]);
        let t = cycle(3);
        let c = construct_morphism(ArrowCtx::Same(&t), &set(&[0]), &alpha(3, &[(0, 0)])).unwrap();
        assert!(c.morphism.unwrap().is_identity());
        let (a, b, th) = mod_theta();
        let ctx = ArrowCtx::Theta { source: &a, target: &b, theta: &th };
        let c = construct_morphism(ctx, &set(&[0]), &alpha(4, &[(0, 0)])).unwrap();
        assert!(c.verified.passed(), "{:?}", c.verified);
        assert_eq!(c.morphism.unwrap().images(), vec![0, 1, 0, 1]);
    }

    #[test]
    fn constructing_map_examples() {
        let b = Budget::default();
        let t = cycle(3);
        let s = Subset::full(3);
        let plus1 = Morphism::from_images(3, &s, &s, &[1, 2, 0]).unwrap();
        let a = find_constructing_map(ArrowCtx::Same(&t), &plus1, &set(&[0]), &s, &b).unwrap();
        assert_eq!(a.unwrap()[0], Some(1));
        let e = Subset::new();
        let empty = Morphism::identity(3, &e);
        let a = find_constructing_map(ArrowCtx::Same(&t), &empty, &e, &s, &b).unwrap();
        assert_eq!(a, Some(vec![None; 3]));
        // T = ⟨const 1⟩ on {0,1,2}: ⟨{0}⟩ = {1} does not contain 0, so the search path runs.
        let g = OperationSystem::unary_explicit(3, &[vec![1, 1, 1]]);
        assert!(single_generator(&g).unwrap().is_some());
        for u in Subset::all(3) {
            for v in Subset::all(3) {
                assert!(single_generator_counterexample(&g, &u, &v, &b).unwrap().is_none());
            }
        }
    }

    #[test]
    fn inversion_examples() {
        let t = cycle(3);
        let s = Subset::full(3);
        let plus1 = Morphism::from_images(3, &s, &s, &[1, 2, 0]).unwrap();
        let (inv, check) = invert_isomorphism(&t, &plus1).unwrap();
        assert_eq!(inv.images(), vec![2, 0, 1]);
        assert!(check.passed());
        let (inv, _) = invert_isomorphism(&t, &Morphism::identity(3, &s)).unwrap();
        assert!(inv.is_identity());
        let p = Subset::full(4);
        let aut = enumerate_morphisms(&sierpinski(), &p, Kind::Aut, &Budget::default()).unwrap();
        let swap = aut.iter().find(|m| !m.is_identity()).unwrap();
        assert_eq!(swap.images(), vec![1, 0, 2, 3]);
        assert_eq!(&invert_isomorphism(&sierpinski(), swap).unwrap().0, swap);
        let (a, b, th) = mod_theta();
        let id4 = Morphism::identity(4, &Subset::full(4));
        let (inv, ti, check) = invert_theta_isomorphism(&a, &a, &ThetaRelation::identity(&a), &id4).unwrap();
        assert!(inv.is_identity() && check.passed());
        assert_eq!(ti, ThetaRelation::identity(&a));
        assert_eq!(th.inverse().inverse(), th);
        let _ = b;
    }

    #[test]
    fn generator_reduction_agrees() {
        let t = cycle(4);
        let basis = generator_basis(&t).unwrap();
        assert_eq!(basis.len(), 1);
        let g = OperationSystem::new(t.carrier.clone(), Tier::Unary, Repr::Generated, basis).unwrap();
        let s = Subset::full(4);
        let el: Vec<usize> = (0..4).collect();
        let mut tu = Tuples::new(&el, 4);
        while let Some(img) = tu.next() {
            let m = Morphism::from_images(4, &s, &s, img).unwrap();
            assert_eq!(
                is_t_morphism(&t, &m).unwrap().is_none(),
                is_t_morphism(&g, &m).unwrap().is_none()
            );
        }
    }
}
