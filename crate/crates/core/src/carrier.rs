//! Finite carriers, partial operation tables and operation systems.
//!
//! Tables are row-major with the first argument most significant; `None` is UNDEFINED.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::{GgtError, Result};

/// Largest table we are willing to allocate.
const MAX_TABLE: usize = 1 << 24;
/// Largest materialized closure before giving up.
const MAX_CLOSURE: usize = 200_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Carrier {
    labels: Vec<String>,
    index: HashMap<String, usize>,
}

impl Carrier {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        let mut index = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(GgtError::Schema(format!("duplicate carrier label {l:?}")));
            }
        }
        Ok(Carrier { labels, index })
    }

    /// Carrier labelled `"0", "1", ..`.
    pub fn range(n: usize) -> Self {
        Carrier::new((0..n).map(|i| i.to_string())).expect("labels are distinct")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.index.get(label).copied()
    }
}

/// Odometer over all k-tuples drawn from `elems`, lexicographic by position in `elems`.
pub struct Tuples {
    elems: Vec<usize>,
    pos: Vec<usize>,
    cur: Vec<usize>,
    started: bool,
    done: bool,
}

impl Tuples {
    pub fn new(elems: &[usize], k: usize) -> Self {
        Tuples {
            elems: elems.to_vec(),
            pos: vec![0; k],
            cur: if elems.is_empty() { vec![] } else { vec![elems[0]; k] },
            started: false,
            done: elems.is_empty() && k > 0,
        }
    }

    pub fn next(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.cur);
        }
        let k = self.pos.len();
        let mut i = k;
        loop {
            if i == 0 {
                self.done = true;
                return None;
            }
            i -= 1;
            self.pos[i] += 1;
            if self.pos[i] < self.elems.len() {
                self.cur[i] = self.elems[self.pos[i]];
                break;
            }
            self.pos[i] = 0;
            self.cur[i] = self.elems[0];
        }
        Some(&self.cur)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Operation {
    pub name: String,
    arity: usize,
    n: usize,
    table: Vec<Option<u32>>,
}

impl PartialEq for Operation {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.n == other.n && self.table == other.table
    }
}

impl Eq for Operation {}

impl Hash for Operation {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.arity.hash(state);
        self.n.hash(state);
        self.table.hash(state);
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.name, self.arity)
    }
}

fn table_len(n: usize, arity: usize) -> Result<usize> {
    match n.checked_pow(arity as u32) {
        Some(len) if len <= MAX_TABLE => Ok(len),
        _ => Err(GgtError::budget("operation table entries", MAX_TABLE, usize::MAX)),
    }
}

impl Operation {
    pub fn new(
        name: impl Into<String>,
        n: usize,
        arity: usize,
        table: Vec<Option<usize>>,
    ) -> Result<Self> {
        let name = name.into();
        if arity == 0 {
            return Err(GgtError::Schema(format!("operation {name}: arity must be positive")));
        }
        let len = table_len(n, arity)?;
        if table.len() != len {
            return Err(GgtError::Schema(format!(
                "operation {name}: table has {} entries, expected {n}^{arity} = {len}",
                table.len()
            )));
        }
        if let Some(bad) = table.iter().flatten().find(|&&v| v >= n) {
            return Err(GgtError::Schema(format!(
                "operation {name}: entry {bad} outside carrier of size {n}"
            )));
        }
        Ok(Operation {
            name,
            arity,
            n,
            table: table.into_iter().map(|v| v.map(|v| v as u32)).collect(),
        })
    }

    pub fn from_fn(
        name: impl Into<String>,
        n: usize,
        arity: usize,
        mut f: impl FnMut(&[usize]) -> Option<usize>,
    ) -> Self {
        let elems: Vec<usize> = (0..n).collect();
        let mut table = Vec::with_capacity(n.pow(arity as u32));
        let mut t = Tuples::new(&elems, arity);
        while let Some(args) = t.next() {
            table.push(f(args));
        }
        Operation::new(name, n, arity, table).expect("from_fn builds a valid table")
    }

    pub fn unary(name: impl Into<String>, map: &[usize]) -> Self {
        Operation::new(name, map.len(), 1, map.iter().map(|&v| Some(v)).collect())
            .expect("unary map inside carrier")
    }

    pub fn identity(n: usize) -> Self {
        Operation::from_fn("id", n, 1, |a| Some(a[0]))
    }

    pub fn constant(name: impl Into<String>, n: usize, c: usize) -> Self {
        Operation::from_fn(name, n, 1, |_| Some(c))
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn carrier_size(&self) -> usize {
        self.n
    }

    pub fn table(&self) -> impl Iterator<Item = Option<usize>> + '_ {
        self.table.iter().map(|v| v.map(|v| v as usize))
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    fn index(&self, args: &[usize]) -> usize {
        args.iter().fold(0, |acc, &a| acc * self.n + a)
    }

    /// Table lookup without validation.
    pub fn eval(&self, args: &[usize]) -> Option<usize> {
        debug_assert_eq!(args.len(), self.arity);
        self.table[self.index(args)].map(|v| v as usize)
    }

    /// Checked table lookup.
    pub fn apply(&self, args: &[usize]) -> Result<Option<usize>> {
        if args.len() != self.arity {
            return Err(GgtError::usage(format!(
                "{} takes {} arguments, got {}",
                self.name,
                self.arity,
                args.len()
            )));
        }
        if let Some(bad) = args.iter().find(|&&a| a >= self.n) {
            return Err(GgtError::usage(format!(
                "argument {bad} is not an element of the carrier of {}",
                self.name
            )));
        }
        Ok(self.eval(args))
    }

    pub fn is_total(&self) -> bool {
        self.table.iter().all(Option::is_some)
    }

    pub fn domain_size(&self) -> usize {
        self.table.iter().filter(|v| v.is_some()).count()
    }

    pub fn is_identity(&self) -> bool {
        self.arity == 1 && (0..self.n).all(|x| self.table[x] == Some(x as u32))
    }

    /// The image vector of a total unary operation.
    pub fn as_map(&self) -> Option<Vec<usize>> {
        if self.arity != 1 {
            return None;
        }
        self.table.iter().map(|v| v.map(|v| v as usize)).collect()
    }
}

/// `f ∘ (g₁, .., gₖ)`: arity `Σ arity(gᵢ)`, argument blocks in order.
pub fn compose(f: &Operation, gs: &[&Operation]) -> Result<Operation> {
    if gs.len() != f.arity {
        return Err(GgtError::usage(format!(
            "{} takes {} operations, got {}",
            f.name,
            f.arity,
            gs.len()
        )));
    }
    if let Some(g) = gs.iter().find(|g| g.n != f.n) {
        return Err(GgtError::usage(format!(
            "{} and {} live on different carriers",
            f.name, g.name
        )));
    }
    let arity: usize = gs.iter().map(|g| g.arity).sum();
    table_len(f.n, arity)?;
    let offsets: Vec<usize> = gs
        .iter()
        .scan(0, |acc, g| {
            let o = *acc;
            *acc += g.arity;
            Some(o)
        })
        .collect();
    let name = format!(
        "{}({})",
        f.name,
        gs.iter().map(|g| g.name.as_str()).collect::<Vec<_>>().join(",")
    );
    let mut inner = vec![0; f.arity];
    Ok(Operation::from_fn(name, f.n, arity, |args| {
        for (i, g) in gs.iter().enumerate() {
            inner[i] = g.eval(&args[offsets[i]..offsets[i] + g.arity])?;
        }
        f.eval(&inner)
    }))
}

/// Whether `g` is a restriction of `f`: `dom g ⊆ dom f` and they agree on `dom g`.
pub fn is_restriction(g: &Operation, f: &Operation) -> Result<bool> {
    if g.arity != f.arity || g.n != f.n {
        return Err(GgtError::usage(format!(
            "{} and {} differ in arity or carrier",
            g.name, f.name
        )));
    }
    Ok(g.table
        .iter()
        .zip(&f.table)
        .all(|(a, b)| a.is_none() || a == b))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    Unary,
    Generalized,
    PartialGeneralized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Repr {
    Explicit,
    Generated,
}

/// An operation system. `ops` holds all members when explicit and the generators otherwise.
#[derive(Clone, Debug)]
pub struct OperationSystem {
    pub carrier: Carrier,
    pub tier: Tier,
    pub repr: Repr,
    pub ops: Vec<Operation>,
}

fn check_tier(tier: Tier, op: &Operation) -> Result<()> {
    match tier {
        Tier::Unary if op.arity != 1 || !op.is_total() => Err(GgtError::Schema(format!(
            "operation {} is not a total unary map, required by the unary tier",
            op.name
        ))),
        Tier::Generalized if !op.is_total() => Err(GgtError::Schema(format!(
            "operation {} is partial, not allowed in the generalized tier",
            op.name
        ))),
        _ => Ok(()),
    }
}

impl OperationSystem {
    pub fn new(carrier: Carrier, tier: Tier, repr: Repr, ops: Vec<Operation>) -> Result<Self> {
        for op in &ops {
            if op.n != carrier.len() {
                return Err(GgtError::Schema(format!(
                    "operation {} has carrier size {}, expected {}",
                    op.name,
                    op.n,
                    carrier.len()
                )));
            }
            check_tier(tier, op)?;
        }
        Ok(OperationSystem {
            carrier,
            tier,
            repr,
            ops,
        })
    }

    /// Explicit unary system on `0..n` from image vectors.
    pub fn unary_explicit(n: usize, maps: &[Vec<usize>]) -> Self {
        let ops = maps
            .iter()
            .enumerate()
            .map(|(i, m)| Operation::unary(format!("f{i}"), m))
            .collect();
        OperationSystem::new(Carrier::range(n), Tier::Unary, Repr::Explicit, ops)
            .expect("valid unary maps")
    }

    pub fn n(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_explicit(&self) -> bool {
        self.repr == Repr::Explicit
    }

    pub fn op_index(&self, name: &str) -> Option<usize> {
        self.ops.iter().position(|o| o.name == name)
    }

    /// Unary members, materialized. Explicit systems return their unary members;
    /// generated systems return the composition closure of their unary generators.
    pub fn unary_members(&self) -> Vec<Operation> {
        let unary: Vec<Operation> = self.ops.iter().filter(|o| o.arity == 1).cloned().collect();
        match self.repr {
            Repr::Explicit => unary,
            Repr::Generated => unary_closure(&unary),
        }
    }

    pub fn contains_identity(&self) -> bool {
        self.unary_members().iter().any(Operation::is_identity)
    }

    /// Members of an explicit unary system, or the full closure of a generated one.
    pub fn materialize_unary(&self) -> Result<Vec<Operation>> {
        if self.tier != Tier::Unary {
            return Err(GgtError::usage("only unary systems can be materialized exactly"));
        }
        Ok(self.unary_members())
    }

    /// Same operations, explicit representation (the caller vouches for closure).
    pub fn as_explicit(&self) -> Result<OperationSystem> {
        let ops = self.materialize_unary()?;
        OperationSystem::new(self.carrier.clone(), self.tier, Repr::Explicit, ops)
    }

    /// Same operations, generated representation.
    pub fn as_generated(&self) -> OperationSystem {
        OperationSystem {
            repr: Repr::Generated,
            ..self.clone()
        }
    }
}

/// Right-multiplication closure of unary operations (total or partial).
fn unary_closure(gens: &[Operation]) -> Vec<Operation> {
    let mut seen: HashSet<Operation> = HashSet::new();
    let mut out = Vec::new();
    let mut queue = VecDeque::new();
    for g in gens {
        if seen.insert(g.clone()) {
            out.push(g.clone());
            queue.push_back(g.clone());
        }
    }
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let c = compose(&x, &[g])
                .expect("unary composition on one carrier")
                .with_name(format!("{}.{}", x.name, g.name));
            if seen.insert(c.clone()) {
                out.push(c.clone());
                queue.push_back(c);
            }
        }
    }
    out
}

/// A materialized closure. For multi-arity tiers it is only the slice of composites
/// whose arity stays within `arity_cap`.
#[derive(Clone, Debug)]
pub struct Closure {
    pub ops: Vec<Operation>,
    pub arity_cap: Option<usize>,
}

/// All iterated composites of `generators`, deduplicated by table.
pub fn generate_closure(
    generators: &[Operation],
    tier: Tier,
    arity_cap: usize,
) -> Result<Closure> {
    for g in generators {
        check_tier(tier, g)?;
    }
    if tier == Tier::Unary {
        return Ok(Closure {
            ops: unary_closure(generators),
            arity_cap: None,
        });
    }
    let max = generators.iter().map(|g| g.arity).max().unwrap_or(1);
    if arity_cap < max {
        return Err(GgtError::usage(format!(
            "arity cap {arity_cap} is below the largest generator arity {max}"
        )));
    }
    let mut seen: HashSet<Operation> = HashSet::new();
    let mut ops: Vec<Operation> = Vec::new();
    for g in generators {
        if seen.insert(g.clone()) {
            ops.push(g.clone());
        }
    }
    loop {
        let mut fresh = Vec::new();
        for f in &ops {
            let idx: Vec<usize> = (0..ops.len()).collect();
            let mut t = Tuples::new(&idx, f.arity);
            while let Some(pick) = t.next() {
                let arity: usize = pick.iter().map(|&i| ops[i].arity).sum();
                if arity > arity_cap {
                    continue;
                }
                let gs: Vec<&Operation> = pick.iter().map(|&i| &ops[i]).collect();
                let c = compose(f, &gs)?;
                if !seen.contains(&c) {
                    seen.insert(c.clone());
                    fresh.push(c);
                    if seen.len() > MAX_CLOSURE {
                        return Err(GgtError::budget("closure size", MAX_CLOSURE, seen.len()));
                    }
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        ops.extend(fresh);
    }
    Ok(Closure {
        ops,
        arity_cap: Some(arity_cap),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ClosureReport {
    pub closed: bool,
    pub composites_checked: usize,
    /// Each entry lists the member indices `[f, g₁, .., gₖ]` of a composite that escapes.
    pub violations: Vec<Vec<usize>>,
}

/// Check that an explicit system is closed under composition for its tier.
pub fn validate_system(sys: &OperationSystem) -> Result<ClosureReport> {
    if sys.repr != Repr::Explicit {
        return Err(GgtError::usage("validate_system needs an explicit system"));
    }
    let members: HashSet<&Operation> = sys.ops.iter().collect();
    let idx: Vec<usize> = (0..sys.ops.len()).collect();
    let mut violations = Vec::new();
    let mut checked = 0;
    for (fi, f) in sys.ops.iter().enumerate() {
        let mut t = Tuples::new(&idx, f.arity);
        while let Some(pick) = t.next() {
            checked += 1;
            let gs: Vec<&Operation> = pick.iter().map(|&i| &sys.ops[i]).collect();
            let c = compose(f, &gs)?;
            let ok = match sys.tier {
                Tier::PartialGeneralized => sys
                    .ops
                    .iter()
                    .filter(|m| m.arity == c.arity)
                    .any(|m| is_restriction(&c, m).unwrap_or(false)),
                _ => members.contains(&c),
            };
            if !ok {
                let mut v = vec![fi];
                v.extend_from_slice(pick);
                violations.push(v);
            }
        }
    }
    Ok(ClosureReport {
        closed: violations.is_empty(),
        composites_checked: checked,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shift(n: usize, k: usize) -> Operation {
        Operation::from_fn(format!("+{k}"), n, 1, |a| Some((a[0] + k) % n))
    }

    fn cap_add(cap: usize) -> Operation {
        Operation::from_fn("add", 4, 2, |a| {
            let s = a[0] + a[1];
            (s <= cap).then_some(s)
        })
    }

    #[test]
    fn apply_examples() {
        assert_eq!(Operation::identity(2).apply(&[1]).unwrap(), Some(1));
        assert_eq!(cap_add(3).apply(&[2, 2]).unwrap(), None);
        assert_eq!(shift(3, 1).apply(&[2]).unwrap(), Some(0));
        assert!(shift(3, 1).apply(&[3]).is_err());
        assert!(shift(3, 1).apply(&[0, 1]).is_err());
    }

    #[test]
    fn compose_examples() {
        let g = shift(3, 1);
        assert_eq!(compose(&g, &[&g]).unwrap(), shift(3, 2));
        let f = cap_add(3);
        let id = Operation::identity(4);
        assert_eq!(compose(&f, &[&id, &id]).unwrap(), f);
        let ff = compose(&f, &[&f, &f]).unwrap();
        assert_eq!(ff.arity(), 4);
        assert_eq!(ff.eval(&[1, 1, 1, 0]), Some(3));
        assert_eq!(ff.eval(&[1, 1, 1, 1]), None);
        assert!(compose(&f, &[&id]).is_err());
    }

    #[test]
    fn restriction_examples() {
        let empty = Operation::from_fn("e", 4, 2, |_| None);
        assert!(is_restriction(&empty, &cap_add(3)).unwrap());
        assert!(is_restriction(&cap_add(3), &cap_add(3)).unwrap());
        assert!(is_restriction(&cap_add(2), &cap_add(3)).unwrap());
        assert!(!is_restriction(&cap_add(3), &cap_add(2)).unwrap());
        assert!(is_restriction(&shift(4, 1), &cap_add(3)).is_err());
    }

    #[test]
    fn closure_examples() {
        let c = generate_closure(&[shift(3, 1)], Tier::Unary, 1).unwrap();
        assert_eq!(c.ops.len(), 3);
        assert!(c.ops.iter().any(Operation::is_identity));
        let c = generate_closure(&[Operation::identity(5)], Tier::Unary, 1).unwrap();
        assert_eq!(c.ops.len(), 1);
        let c = generate_closure(
            &[Operation::identity(4), cap_add(3)],
            Tier::PartialGeneralized,
            2,
        )
        .unwrap();
        assert!(c.ops.contains(&cap_add(3)));
        assert!(c.ops.contains(&Operation::identity(4)));
        assert!(c.ops.iter().all(|o| o.arity() <= 2));
        assert!(generate_closure(&[cap_add(3)], Tier::PartialGeneralized, 1).is_err());
        assert!(generate_closure(&[], Tier::Unary, 1).unwrap().ops.is_empty());
    }

    #[test]
    fn validate_examples() {
        let sys = OperationSystem::new(
            Carrier::range(3),
            Tier::Unary,
            Repr::Explicit,
            vec![shift(3, 1)],
        )
        .unwrap();
        let r = validate_system(&sys).unwrap();
        assert!(!r.closed);
        assert_eq!(r.violations, vec![vec![0, 0]]);
        let sys = OperationSystem::new(Carrier::range(3), Tier::Unary, Repr::Explicit, vec![])
            .unwrap();
        assert!(validate_system(&sys).unwrap().closed);
    }

    #[test]
    fn tuples_order() {
        let mut t = Tuples::new(&[2, 5], 2);
        let mut all = Vec::new();
        while let Some(x) = t.next() {
            all.push(x.to_vec());
        }
        assert_eq!(all, vec![vec![2, 2], vec![2, 5], vec![5, 2], vec![5, 5]]);
        assert!(Tuples::new(&[], 1).next().is_none());
    }

    #[test]
    fn tier_invariants() {
        assert!(OperationSystem::new(Carrier::range(4), Tier::Generalized, Repr::Generated, vec![cap_add(3)]).is_err());
        assert!(OperationSystem::new(Carrier::range(4), Tier::Unary, Repr::Generated, vec![cap_add(3)]).is_err());
        assert!(Carrier::new(["a", "a"]).is_err());
        assert!(Carrier::new(Vec::<String>::new()).unwrap().is_empty());
    }
}
