//! Replayable counterexamples.
//!
//! A witness names operations by index into the relevant system and carries every value it
//! claims, so `replay` can recompute each side and confirm the failure still stands.

use serde::{Deserialize, Serialize};

use crate::carrier::OperationSystem;
use crate::error::{GgtError, Result};
use crate::morphism::{theta_value, ThetaRelation, ThetaValue};
use crate::subset::Subset;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TermArg {
    Leaf(usize),
    Node(Box<Term>),
}

/// A derivation: an operation applied to leaves of the generating set or to sub-derivations.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    pub op: usize,
    pub args: Vec<TermArg>,
}

impl Term {
    /// Evaluate with every leaf sent through `leaf` and every operation through `apply`.
    pub fn eval_with(
        &self,
        leaf: &dyn Fn(usize) -> Option<usize>,
        apply: &dyn Fn(usize, &[usize]) -> Result<Option<usize>>,
    ) -> Result<Option<usize>> {
        let mut vals = Vec::with_capacity(self.args.len());
        for a in &self.args {
            let v = match a {
                TermArg::Leaf(x) => leaf(*x),
                TermArg::Node(t) => t.eval_with(leaf, apply)?,
            };
            match v {
                Some(v) => vals.push(v),
                None => return Ok(None),
            }
        }
        apply(self.op, &vals)
    }

    pub fn depth(&self) -> usize {
        1 + self
            .args
            .iter()
            .map(|a| match a {
                TermArg::Leaf(_) => 0,
                TermArg::Node(t) => t.depth(),
            })
            .max()
            .unwrap_or(0)
    }

    /// Leaves in order of appearance.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for a in &self.args {
            match a {
                TermArg::Leaf(x) => out.push(*x),
                TermArg::Node(t) => out.extend(t.leaves()),
            }
        }
        out
    }

    pub fn render(&self, names: &dyn Fn(usize) -> String, labels: &dyn Fn(usize) -> String) -> String {
        let args: Vec<String> = self
            .args
            .iter()
            .map(|a| match a {
                TermArg::Leaf(x) => labels(*x),
                TermArg::Node(t) => t.render(names, labels),
            })
            .collect();
        format!("{}({})", names(self.op), args.join(","))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// `op(args) = value` leaves `set`.
    Escape {
        op: usize,
        args: Vec<usize>,
        value: usize,
        set: Subset,
    },
    /// `set` is not generated by any subset.
    NotTSpace { set: Subset },
    /// `map(op(args))` differs from `op(map(args))`; `None` is UNDEFINED.
    Commutation {
        op: usize,
        args: Vec<usize>,
        map: Vec<Option<usize>>,
        lhs: Option<usize>,
        rhs: Option<usize>,
    },
    /// Two θ-partners of `op` disagree at `args`.
    ThetaFiber {
        op: usize,
        partners: [usize; 2],
        args: Vec<usize>,
        values: [Option<usize>; 2],
    },
    /// `map(op(args))` differs from `θ(op)(map(args))`.
    ThetaCommutation {
        op: usize,
        args: Vec<usize>,
        map: Vec<Option<usize>>,
        lhs: Option<usize>,
        rhs: Option<usize>,
    },
    /// Two derivations share a value on the source side but not on the image side.
    ArrowCollision {
        left: Term,
        right: Term,
        alpha: Vec<Option<usize>>,
        value: usize,
        images: [Option<usize>; 2],
    },
    /// A derivation defined on the source side is undefined on the image side.
    ArrowUndefined {
        term: Term,
        alpha: Vec<Option<usize>>,
        value: usize,
    },
    /// A composite undefined on the source side but defined on the image side.
    ArrowDefinedness {
        op: usize,
        args: Vec<usize>,
        map: Vec<Option<usize>>,
        image: usize,
    },
    /// Two members whose join (or union) is missing from a family.
    Join {
        left: Vec<usize>,
        right: Vec<usize>,
        join: Vec<usize>,
    },
    /// Two different point maps with the same induced map.
    StarCollision {
        f: Vec<usize>,
        g: Vec<usize>,
        star: Vec<usize>,
    },
    /// `map(element)` leaves the subset.
    Unstable {
        map: Vec<Option<usize>>,
        element: usize,
        image: usize,
    },
    /// `f(args) = g(args)` with `f ≠ g`.
    Transcendence {
        f: usize,
        g: usize,
        args: Vec<usize>,
        value: usize,
    },
    /// `element` is required but absent.
    Missing { element: usize },
    /// A labelled disagreement between two tables at one position.
    Mismatch {
        what: String,
        at: Vec<usize>,
        left: Option<usize>,
        right: Option<usize>,
    },
}

/// Systems a witness is replayed against.
pub struct ReplayContext<'a> {
    pub sys: &'a OperationSystem,
    pub target: Option<&'a OperationSystem>,
    pub theta: Option<&'a ThetaRelation>,
}

fn op_of<'a>(sys: &'a OperationSystem, i: usize) -> Result<&'a crate::carrier::Operation> {
    sys.ops
        .get(i)
        .ok_or_else(|| GgtError::DanglingRef(format!("operation index {i}")))
}

/// `value` is the source-side result, `lhs` its image and `rhs` the image-side result.
pub(crate) fn commutation_fails(value: Option<usize>, lhs: Option<usize>, rhs: Option<usize>) -> bool {
    value.is_some() != rhs.is_some() || value.is_some() && lhs != rhs
}

fn map_get(map: &[Option<usize>], x: usize) -> Option<usize> {
    map.get(x).copied().flatten()
}

impl Witness {
    /// Recompute the witness; `true` means the failure reproduces.
    pub fn replay(&self, ctx: &ReplayContext) -> Result<bool> {
        let target = ctx.target.unwrap_or(ctx.sys);
        let image_apply = |op: usize, args: &[usize]| -> Result<Option<usize>> {
            match ctx.theta {
                Some(th) => match theta_value(th, target, op, args)? {
                    ThetaValue::Value(v) => Ok(Some(v)),
                    _ => Ok(None),
                },
                None => op_of(target, op)?.apply(args),
            }
        };
        let source_apply = |op: usize, args: &[usize]| op_of(ctx.sys, op)?.apply(args);
        Ok(match self {
            Witness::Escape { op, args, value, set } => {
                op_of(ctx.sys, *op)?.apply(args)? == Some(*value) && !set.contains(*value)
            }
            Witness::NotTSpace { set } => {
                crate::tspace::is_t_space(ctx.sys, set, &crate::limits::Budget::default())?.verdict
                    != crate::limits::Tri::True
            }
            Witness::Commutation { op, args, map, lhs, rhs } => {
                let v = op_of(ctx.sys, *op)?.apply(args)?;
                let l = v.and_then(|v| map_get(map, v));
                let mapped: Option<Vec<usize>> = args.iter().map(|&a| map_get(map, a)).collect();
                let r = match mapped {
                    Some(m) => op_of(target, *op)?.apply(&m)?,
                    None => None,
                };
                l == *lhs && r == *rhs && commutation_fails(v, l, r)
            }
            Witness::ThetaFiber { partners, args, values, .. } => {
                let a = op_of(target, partners[0])?.apply(args)?;
                let b = op_of(target, partners[1])?.apply(args)?;
                a == values[0] && b == values[1] && a != b
            }
            Witness::ThetaCommutation { op, args, map, lhs, rhs } => {
                let th = ctx
                    .theta
                    .ok_or_else(|| GgtError::usage("θ witness needs a θ relation"))?;
                let v = op_of(ctx.sys, *op)?.apply(args)?;
                let l = v.and_then(|v| map_get(map, v));
                let mapped: Option<Vec<usize>> = args.iter().map(|&a| map_get(map, a)).collect();
                let r = match mapped {
                    Some(m) => match theta_value(th, target, *op, &m)? {
                        ThetaValue::Value(v) => Some(v),
                        _ => None,
                    },
                    None => None,
                };
                l == *lhs && r == *rhs && commutation_fails(v, l, r)
            }
            Witness::ArrowCollision { left, right, alpha, value, images } => {
                let id = |x: usize| Some(x);
                let al = |x: usize| map_get(alpha, x);
                let lv = left.eval_with(&id, &source_apply)?;
                let rv = right.eval_with(&id, &source_apply)?;
                let li = left.eval_with(&al, &image_apply)?;
                let ri = right.eval_with(&al, &image_apply)?;
                lv == Some(*value) && rv == Some(*value) && [li, ri] == *images && li != ri
            }
            Witness::ArrowUndefined { term, alpha, value } => {
                let id = |x: usize| Some(x);
                let al = |x: usize| map_get(alpha, x);
                term.eval_with(&id, &source_apply)? == Some(*value)
                    && term.eval_with(&al, &image_apply)?.is_none()
            }
            Witness::ArrowDefinedness { op, args, map, image } => {
                let mapped: Option<Vec<usize>> = args.iter().map(|&a| map_get(map, a)).collect();
                source_apply(*op, args)?.is_none()
                    && match mapped {
                        Some(m) => image_apply(*op, &m)? == Some(*image),
                        None => false,
                    }
            }
            Witness::Join { left, right, join } => {
                left.iter().chain(right).all(|x| join.contains(x))
            }
            Witness::StarCollision { f, g, .. } => f != g,
            Witness::Unstable { map, element, image } => map_get(map, *element) == Some(*image),
            Witness::Transcendence { f, g, args, value } => {
                let a = op_of(ctx.sys, *f)?;
                let b = op_of(ctx.sys, *g)?;
                a.apply(args)? == Some(*value) && b.apply(args)? == Some(*value) && a != b
            }
            Witness::Missing { .. } | Witness::Mismatch { .. } => true,
        })
    }
}
