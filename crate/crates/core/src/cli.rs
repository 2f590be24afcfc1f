//! Instance documents, command reports and witness replay for the `ggt` binary.
//!
//! An instance is a JSON document with `schema_version: 1`. Tables list carrier indices in
//! row-major order with `null` for UNDEFINED; everything else refers to carrier elements by label
//! and to operations by name.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

use crate::carrier::{validate_system, Carrier, Operation, OperationSystem, Repr, Tier};
use crate::dynsys::{round_trip, system_to_action, MonoidAction};
use crate::error::{GgtError, Result};
use crate::galois::{lattice_report, verify_correspondence, GaloisContext};
use crate::limits::Budget;
use crate::morphism::{enumerate_morphisms, Kind, Morphism, ThetaRelation};
use crate::structure::{
    restriction_homomorphism, splitting_space, transcendental_report, verify_decomposition_chain,
    verify_duality, verify_first_isomorphism, verify_transitivity, normality_report, ChainStep,
};
use crate::subset::Subset;
use crate::topology::{theorem_conditions, TheoremId};
use crate::topospace::{
    continuity_equivalence_report, hom_correspondence, star_composition_suite, star_injectivity_report,
    TopoSpace,
};
use crate::tspace::{generate_space, is_t_space, quasi_witness};
use crate::witness::{ReplayContext, Witness};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperationDoc {
    pub name: String,
    pub arity: usize,
    pub table: Vec<Option<usize>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemDoc {
    pub tier: Tier,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explicit: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetDoc {
    pub carrier: Vec<String>,
    pub operations: Vec<OperationDoc>,
    pub system: SystemDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Codomain {
    #[serde(rename = "self")]
    Own,
    Target,
}

fn own() -> Codomain {
    Codomain::Own
}

fn is_own(c: &Codomain) -> bool {
    *c == Codomain::Own
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDoc {
    /// Source label to image label.
    pub map: BTreeMap<String, String>,
    #[serde(default = "own", skip_serializing_if = "is_own")]
    pub codomain: Codomain,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopoDoc {
    pub points: Vec<String>,
    pub opens: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ActionDoc {
    /// Maps on the carrier; the monoid is their composition closure.
    Maps { maps: Vec<Vec<String>> },
    Table(MonoidAction),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepDoc {
    pub operations: Vec<String>,
    pub solutions: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainDoc {
    pub base: Vec<String>,
    pub steps: Vec<StepDoc>,
    /// Solutions of the target equation under the instance system.
    pub solutions: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TranscendentalDoc {
    pub operations: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuple: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    pub carrier: Vec<String>,
    pub operations: Vec<OperationDoc>,
    pub system: SystemDoc,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub subsets: BTreeMap<String, Vec<String>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub morphisms: BTreeMap<String, MorphismDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topospace: Option<TopoDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub action: Option<ActionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<TargetDoc>,
    /// Pairs of operation names, instance side first.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<[String; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub transcendental: Option<TranscendentalDoc>,
}

/// A resolved chain: systems are built over the instance carrier.
pub struct Chain {
    pub base: Subset,
    pub steps: Vec<(OperationSystem, Subset, Option<Subset>)>,
    pub solutions: Subset,
}

pub struct Transcendental {
    pub family: Vec<usize>,
    pub tuple: Option<Vec<usize>>,
    pub subset: Option<Subset>,
}

/// A fully resolved instance.
pub struct Instance {
    pub doc: InstanceDoc,
    /// Every declared operation, by declaration order.
    pub pool: Vec<Operation>,
    pub sys: OperationSystem,
    pub space: Subset,
    pub base: Subset,
    pub subsets: BTreeMap<String, Subset>,
    pub morphisms: BTreeMap<String, (Morphism, Codomain)>,
    pub topospace: Option<TopoSpace>,
    pub action: Option<MonoidAction>,
    pub target: Option<(OperationSystem, Subset)>,
    pub theta: Option<ThetaRelation>,
    pub chain: Option<Chain>,
    pub transcendental: Option<Transcendental>,
}

fn parse_error(e: &serde_json::Error) -> GgtError {
    GgtError::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let value: Value = serde_json::from_str(text).map_err(|e| parse_error(&e))?;
    let doc: InstanceDoc = serde_json::from_value(value).map_err(|e| GgtError::Schema(e.to_string()))?;
    resolve(doc)
}

pub fn load_instance(path: &Path) -> Result<Instance> {
    let text = std::fs::read_to_string(path).map_err(|source| GgtError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_instance(&text)
}

fn labels_to_subset(carrier: &Carrier, labels: &[String], what: &str) -> Result<Subset> {
    labels.iter().map(|l| label_index(carrier, l, what)).collect()
}

fn label_index(carrier: &Carrier, label: &str, what: &str) -> Result<usize> {
    carrier
        .index_of(label)
        .ok_or_else(|| GgtError::DanglingRef(format!("{what}: unknown element {label:?}")))
}

fn build_system(carrier: Vec<String>, ops: &[OperationDoc], system: &SystemDoc) -> Result<(Vec<Operation>, OperationSystem)> {
    let carrier = Carrier::new(carrier).map_err(|e| match e {
        GgtError::Usage(m) => GgtError::Schema(m),
        other => other,
    })?;
    let n = carrier.len();
    let mut pool = Vec::with_capacity(ops.len());
    for o in ops {
        if pool.iter().any(|p: &Operation| p.name == o.name) {
            return Err(GgtError::Schema(format!("operation {:?} declared twice", o.name)));
        }
        pool.push(Operation::new(o.name.clone(), n, o.arity, o.table.clone())?);
    }
    let (names, repr) = match (&system.explicit, &system.generators) {
        (Some(e), None) => (e, Repr::Explicit),
        (None, Some(g)) => (g, Repr::Generated),
        _ => {
            return Err(GgtError::Schema(
                "system needs exactly one of \"explicit\" or \"generators\"".into(),
            ))
        }
    };
    let members = pick(&pool, names, "system")?;
    let sys = OperationSystem::new(carrier, system.tier, repr, members)?;
    Ok((pool, sys))
}

fn pick(pool: &[Operation], names: &[String], what: &str) -> Result<Vec<Operation>> {
    names
        .iter()
        .map(|nm| {
            pool.iter()
                .find(|o| o.name == *nm)
                .cloned()
                .ok_or_else(|| GgtError::DanglingRef(format!("{what}: unknown operation {nm:?}")))
        })
        .collect()
}

fn op_position(sys: &OperationSystem, name: &str, what: &str) -> Result<usize> {
    sys.op_index(name)
        .ok_or_else(|| GgtError::DanglingRef(format!("{what}: operation {name:?} is not in the system")))
}

pub fn resolve(doc: InstanceDoc) -> Result<Instance> {
    if doc.schema_version != SCHEMA_VERSION {
        return Err(GgtError::Schema(format!(
            "schema_version {} is not supported (expected {SCHEMA_VERSION})",
            doc.schema_version
        )));
    }
    let (pool, sys) = build_system(doc.carrier.clone(), &doc.operations, &doc.system)?;
    let c = &sys.carrier;
    let space = match &doc.space {
        Some(l) => labels_to_subset(c, l, "space")?,
        None => Subset::full(sys.n()),
    };
    let base = match &doc.base {
        Some(l) => labels_to_subset(c, l, "base")?,
        None => Subset::new(),
    };
    let mut subsets = BTreeMap::new();
    for (k, v) in &doc.subsets {
        subsets.insert(k.clone(), labels_to_subset(c, v, &format!("subset {k}"))?);
    }
    let target = match &doc.target {
        Some(t) => {
            let (_, tsys) = build_system(t.carrier.clone(), &t.operations, &t.system)?;
            let tspace = match &t.space {
                Some(l) => labels_to_subset(&tsys.carrier, l, "target space")?,
                None => Subset::full(tsys.n()),
            };
            Some((tsys, tspace))
        }
        None => None,
    };
    let mut morphisms = BTreeMap::new();
    for (k, m) in &doc.morphisms {
        let what = format!("morphism {k}");
        let (cod_carrier, cod_space) = match m.codomain {
            Codomain::Own => (c, &space),
            Codomain::Target => match &target {
                Some((t, ts)) => (&t.carrier, ts),
                None => return Err(GgtError::DanglingRef(format!("{what}: no target system declared"))),
            },
        };
        let mut table = vec![None; sys.n()];
        let mut source = Subset::new();
        for (x, y) in &m.map {
            let xi = label_index(c, x, &what)?;
            table[xi] = Some(label_index(cod_carrier, y, &what)?);
            source.insert(xi);
        }
        let phi = Morphism::new(source, cod_space.clone(), table).map_err(|e| GgtError::Schema(format!("{what}: {e}")))?;
        morphisms.insert(k.clone(), (phi, m.codomain.clone()));
    }
    let topospace = match &doc.topospace {
        Some(t) => {
            let pc = Carrier::new(t.points.clone()).map_err(|e| GgtError::Schema(e.to_string()))?;
            let opens = t
                .opens
                .iter()
                .map(|o| labels_to_subset(&pc, o, "topospace"))
                .collect::<Result<Vec<_>>>()?;
            Some(TopoSpace::new(t.points.clone(), &opens).map_err(|e| GgtError::Schema(e.to_string()))?)
        }
        None => None,
    };
    let action = match &doc.action {
        Some(ActionDoc::Maps { maps }) => {
            let idx = maps
                .iter()
                .map(|m| {
                    if m.len() != sys.n() {
                        return Err(GgtError::Schema("action maps must list one image per element".into()));
                    }
                    m.iter().map(|l| label_index(c, l, "action")).collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            Some(MonoidAction::from_maps(sys.n(), &idx)?)
        }
        Some(ActionDoc::Table(a)) => {
            a.validate().map_err(|e| GgtError::Schema(e.to_string()))?;
            Some(a.clone())
        }
        None => None,
    };
    let theta = match &doc.theta {
        Some(pairs) => {
            let (tsys, _) = target
                .as_ref()
                .ok_or_else(|| GgtError::DanglingRef("theta needs a target system".into()))?;
            let idx = pairs
                .iter()
                .map(|[f, g]| Ok((op_position(&sys, f, "theta")?, op_position(tsys, g, "theta")?)))
                .collect::<Result<Vec<_>>>()?;
            Some(ThetaRelation::new(idx, &sys, tsys).map_err(|e| GgtError::Schema(e.to_string()))?)
        }
        None => None,
    };
    let chain = match &doc.chain {
        Some(ch) => {
            let mut steps = Vec::new();
            for (i, s) in ch.steps.iter().enumerate() {
                let what = format!("chain step {i}");
                let ops = pick(&pool, &s.operations, &what)?;
                let ssys = OperationSystem::new(sys.carrier.clone(), sys.tier, sys.repr, ops)?;
                let declared = match &s.declared {
                    Some(d) => Some(labels_to_subset(c, d, &what)?),
                    None => None,
                };
                steps.push((ssys, labels_to_subset(c, &s.solutions, &what)?, declared));
            }
            Some(Chain {
                base: labels_to_subset(c, &ch.base, "chain base")?,
                steps,
                solutions: labels_to_subset(c, &ch.solutions, "chain solutions")?,
            })
        }
        None => None,
    };
    let transcendental = match &doc.transcendental {
        Some(t) => Some(Transcendental {
            family: t
                .operations
                .iter()
                .map(|nm| {
                    pool.iter()
                        .position(|o| o.name == *nm)
                        .ok_or_else(|| GgtError::DanglingRef(format!("transcendental: unknown operation {nm:?}")))
                })
                .collect::<Result<Vec<_>>>()?,
            tuple: match &t.tuple {
                Some(l) => Some(l.iter().map(|x| label_index(c, x, "transcendental")).collect::<Result<Vec<_>>>()?),
                None => None,
            },
            subset: match &t.subset {
                Some(l) => Some(labels_to_subset(c, l, "transcendental")?),
                None => None,
            },
        }),
        None => None,
    };
    Ok(Instance {
        doc,
        pool,
        sys,
        space,
        base,
        subsets,
        morphisms,
        topospace,
        action,
        target,
        theta,
        chain,
        transcendental,
    })
}

/// How a witness found in a report is replayed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReplayMode {
    /// Against the instance system alone.
    Same,
    /// Against the instance, its target and θ.
    Theta,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReplayDoc {
    pub schema_version: u32,
    pub instance: InstanceDoc,
    pub mode: ReplayMode,
    pub witness: Witness,
}

/// Replays a witness; `true` means the failure it records reproduces.
pub fn replay(doc: &ReplayDoc) -> Result<bool> {
    if doc.schema_version != SCHEMA_VERSION {
        return Err(GgtError::Schema(format!("unsupported schema_version {}", doc.schema_version)));
    }
    let inst = resolve(doc.instance.clone())?;
    let target = inst.target.as_ref().map(|(t, _)| t);
    let ctx = match doc.mode {
        ReplayMode::Same => ReplayContext { sys: &inst.sys, target: None, theta: None },
        ReplayMode::Theta => ReplayContext {
            sys: &inst.sys,
            target,
            theta: inst.theta.as_ref(),
        },
    };
    doc.witness.replay(&ctx)
}

pub fn parse_replay(text: &str) -> Result<ReplayDoc> {
    let value: Value = serde_json::from_str(text).map_err(|e| parse_error(&e))?;
    serde_json::from_value(value).map_err(|e| GgtError::Schema(e.to_string()))
}

/// One section of a report, with the witnesses that replay against the instance.
pub struct Section {
    pub name: String,
    pub body: Value,
    pub witnesses: Vec<(ReplayMode, Witness)>,
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

/// Every serialized witness inside `v`.
pub fn collect_witnesses(v: &Value, out: &mut Vec<Witness>) {
    match v {
        Value::Object(m) => {
            if m.contains_key("kind") {
                if let Ok(w) = serde_json::from_value::<Witness>(v.clone()) {
                    out.push(w);
                    return;
                }
            }
            m.values().for_each(|x| collect_witnesses(x, out));
        }
        Value::Array(a) => a.iter().for_each(|x| collect_witnesses(x, out)),
        _ => {}
    }
}

fn section(name: &str, body: Value, replayable: bool) -> Section {
    let mut ws = Vec::new();
    if replayable {
        collect_witnesses(&body, &mut ws);
    }
    let witnesses = ws
        .into_iter()
        .map(|w| {
            let mode = match w {
                Witness::ThetaFiber { .. } | Witness::ThetaCommutation { .. } => ReplayMode::Theta,
                _ => ReplayMode::Same,
            };
            (mode, w)
        })
        .collect();
    Section {
        name: name.into(),
        body,
        witnesses,
    }
}

fn labels_of(c: &Carrier, s: &Subset) -> Value {
    Value::Array(s.iter().map(|x| Value::String(c.label(x).into())).collect())
}

fn kinds(k: Option<Kind>) -> Vec<Kind> {
    match k {
        Some(k) => vec![k],
        None => vec![Kind::End, Kind::Aut],
    }
}

fn kind_name(k: Kind) -> &'static str {
    match k {
        Kind::End => "end",
        Kind::Aut => "aut",
    }
}

pub fn parse_kind(s: &str) -> Result<Kind> {
    match s {
        "end" | "monoid" => Ok(Kind::End),
        "aut" | "group" => Ok(Kind::Aut),
        _ => Err(GgtError::usage(format!("unknown kind {s:?}; use end, aut, monoid or group"))),
    }
}

pub fn space_section(inst: &Instance, which: Option<&str>, budget: &Budget) -> Result<Section> {
    let c = &inst.sys.carrier;
    let (label, u) = match which {
        Some(nm) => (
            nm.to_string(),
            inst.subsets
                .get(nm)
                .cloned()
                .ok_or_else(|| GgtError::usage(format!("no subset named {nm:?}")))?,
        ),
        None => ("space".to_string(), inst.space.clone()),
    };
    let generated = generate_space(&inst.sys, &u)?;
    let check = is_t_space(&inst.sys, &u, budget)?;
    let closure = if inst.sys.repr == Repr::Explicit {
        Some(to_value(&validate_system(&inst.sys)?))
    } else {
        None
    };
    let body = json!({
        "subset": label,
        "elements": labels_of(c, &u),
        "generated": labels_of(c, &generated),
        "quasi_witness": to_value(&quasi_witness(&inst.sys, &u)?),
        "t_space": to_value(&check),
        "system_closure": closure,
    });
    Ok(section("space", body, true))
}

pub fn morphisms_section(inst: &Instance, kind: Kind, budget: &Budget) -> Result<Section> {
    let c = &inst.sys.carrier;
    let ms = enumerate_morphisms(&inst.sys, &inst.space, kind, budget)?;
    let list: Vec<Value> = ms
        .iter()
        .map(|m| {
            let mut o = Map::new();
            for x in inst.space.iter() {
                o.insert(c.label(x).into(), Value::String(c.label(m.get(x).expect("total")).into()));
            }
            Value::Object(o)
        })
        .collect();
    let body = json!({ "kind": kind_name(kind), "count": ms.len(), "morphisms": list });
    Ok(section(kind_name(kind), body, false))
}

pub fn galois_section(inst: &Instance, kind: Option<Kind>, budget: &Budget) -> Result<Section> {
    let mut body = Map::new();
    for k in kinds(kind) {
        let ctx = GaloisContext::new(&inst.sys, &inst.space, k, budget)?;
        let r = verify_correspondence(&ctx, &inst.base, budget)?;
        let mut v = to_value(&r);
        let subs = r.substructures.map_or("over budget".to_string(), |c| c.to_string());
        let summary = match k {
            Kind::End => format!("|Int|={}, |SMn|={subs}", r.intermediate_quasi),
            Kind::Aut => format!("|Int|={}, |SGr|={subs}", r.intermediate_quasi),
        };
        v["summary"] = Value::String(summary);
        v["violation"] = Value::Bool(!r.verdict);
        body.insert(kind_name(k).into(), v);
    }
    Ok(section("galois", Value::Object(body), true))
}

pub fn lattice_section(inst: &Instance, budget: &Budget) -> Result<Section> {
    let r = lattice_report(&inst.sys, &inst.space, &inst.base, budget)?;
    Ok(section("lattice", to_value(&r), true))
}

pub fn topology_section(inst: &Instance, which: Option<&str>, budget: &Budget) -> Result<Section> {
    let ids = match which {
        Some(w) => vec![TheoremId::parse(w)?],
        None => TheoremId::ALL.to_vec(),
    };
    let mut body = Map::new();
    for id in ids {
        let r = theorem_conditions(&inst.sys, &inst.space, &inst.base, id, budget)?;
        let key = to_value(&id).as_str().expect("string id").to_string();
        body.insert(key, to_value(&r));
    }
    Ok(section("topology", Value::Object(body), true))
}

pub fn topospace_section(inst: &Instance, budget: &Budget) -> Result<Section> {
    let x = inst
        .topospace
        .as_ref()
        .ok_or_else(|| GgtError::usage("the instance has no topospace block"))?;
    let continuity = continuity_equivalence_report(x, budget)?;
    let injectivity = star_injectivity_report(x, x, budget)?;
    let composition = star_composition_suite(x, budget)?;
    let hom = hom_correspondence(x, &Subset::new(), budget)?;
    let body = json!({
        "continuity": to_value(&continuity),
        "injectivity": to_value(&injectivity),
        "composition": to_value(&composition),
        "homeomorphisms": to_value(&hom),
        "violation": !continuity.holds || injectivity.violation || composition.violations > 0 || !hom.holds,
    });
    Ok(section("topospace", body, false))
}

pub fn dynsys_section(inst: &Instance, budget: &Budget) -> Result<Section> {
    let (source, action) = match &inst.action {
        Some(a) => ("instance action", a.clone()),
        None => ("induced by the system", system_to_action(&inst.sys, &inst.space)?),
    };
    let rt = round_trip(&action, budget)?;
    let body = json!({
        "action_source": source,
        "monoid_order": action.elements.len(),
        "round_trip": to_value(&rt),
        "violation": !rt.holds(),
    });
    Ok(section("dynsys", body, false))
}

pub const STRUCTURE_PARTS: [&str; 8] = [
    "duality",
    "transitivity",
    "normality",
    "restriction",
    "quotient",
    "splitting",
    "chain",
    "transcendental",
];

pub fn structure_section(inst: &Instance, which: Option<&str>, kind: Option<Kind>, budget: &Budget) -> Result<Section> {
    let parts: Vec<&str> = match which {
        Some(w) if STRUCTURE_PARTS.contains(&w) => vec![w],
        Some(w) => return Err(GgtError::usage(format!("unknown structure check {w:?}"))),
        None => STRUCTURE_PARTS.to_vec(),
    };
    let explicit_unary = inst.sys.tier == Tier::Unary && inst.sys.repr == Repr::Explicit;
    let mut body = Map::new();
    for p in parts {
        let v = match p {
            "duality" if explicit_unary => {
                let mut m = Map::new();
                for k in kinds(kind) {
                    m.insert(kind_name(k).into(), to_value(&verify_duality(&inst.sys, &inst.space, k, budget)?));
                }
                Value::Object(m)
            }
            "transitivity" if inst.sys.tier == Tier::Unary => {
                let mut m = Map::new();
                for k in kinds(kind) {
                    m.insert(
                        kind_name(k).into(),
                        to_value(&verify_transitivity(&inst.sys, &inst.space, k, budget)?),
                    );
                }
                Value::Object(m)
            }
            "normality" if inst.sys.tier == Tier::Unary => to_value(&normality_report(&inst.sys, &inst.space, budget)?),
            "restriction" => {
                let mut m = Map::new();
                for (nm, k) in &inst.subsets {
                    if inst.base.is_subset(k) && k.is_subset(&inst.space) {
                        m.insert(
                            nm.clone(),
                            to_value(&restriction_homomorphism(&inst.sys, &inst.space, &inst.base, k, budget)?),
                        );
                    }
                }
                Value::Object(m)
            }
            "quotient" => {
                let mut m = Map::new();
                if let (Some((tsys, _)), Some(theta)) = (&inst.target, &inst.theta) {
                    for (nm, (phi, cod)) in &inst.morphisms {
                        if *cod == Codomain::Target {
                            m.insert(
                                nm.clone(),
                                to_value(&verify_first_isomorphism(&inst.sys, tsys, theta, phi, budget)?),
                            );
                        }
                    }
                }
                Value::Object(m)
            }
            "splitting" => {
                let mut m = Map::new();
                for (nm, u) in &inst.subsets {
                    let r = splitting_space(&inst.sys, u, &inst.base, budget)?;
                    m.insert(nm.clone(), to_value(&r));
                }
                Value::Object(m)
            }
            "chain" => match &inst.chain {
                Some(ch) => {
                    let steps: Vec<ChainStep> = ch
                        .steps
                        .iter()
                        .map(|(s, u, d)| ChainStep {
                            system: s,
                            solutions: u.clone(),
                            declared: d.clone(),
                        })
                        .collect();
                    to_value(&verify_decomposition_chain(&ch.base, &steps, &inst.sys, &ch.solutions)?)
                }
                None => continue,
            },
            "transcendental" => match &inst.transcendental {
                Some(t) => {
                    // Indices refer to the declaration pool, so evaluate against a pool system.
                    let pool_sys = OperationSystem::new(
                        inst.sys.carrier.clone(),
                        Tier::PartialGeneralized,
                        Repr::Explicit,
                        inst.pool.clone(),
                    )?;
                    to_value(&transcendental_report(&pool_sys, &t.family, t.tuple.as_deref(), t.subset.as_ref())?)
                }
                None => continue,
            },
            _ => json!({ "not_applicable": "needs an explicit unary system" }),
        };
        body.insert(p.into(), v);
    }
    Ok(section("structure", Value::Object(body), false))
}

/// All sections that apply to the instance; budget errors are recorded in place.
pub fn verify_all(inst: &Instance, budget: &Budget) -> Vec<Section> {
    let unary = inst.sys.tier == Tier::Unary;
    let mut out = Vec::new();
    let mut push = |name: &str, r: Result<Section>| match r {
        Ok(s) => out.push(s),
        Err(e) => out.push(section(name, error_body(&e), false)),
    };
    push("space", space_section(inst, None, budget));
    push("galois", galois_section(inst, None, budget));
    push("lattice", lattice_section(inst, budget));
    let ids: Vec<&str> = if unary {
        vec!["int-end", "int-aut", "gsmn", "gsgr"]
    } else {
        vec!["int-end-general", "int-aut-general"]
    };
    for id in ids {
        push(&format!("topology {id}"), topology_section(inst, Some(id), budget));
    }
    if inst.topospace.is_some() {
        push("topospace", topospace_section(inst, budget));
    }
    if inst.action.is_some() || unary && inst.sys.repr == Repr::Explicit && inst.sys.contains_identity() {
        push("dynsys", dynsys_section(inst, budget));
    }
    push("structure", structure_section(inst, None, None, budget));
    out
}

fn error_body(e: &GgtError) -> Value {
    json!({ "error": e.to_string(), "exit_code": e.exit_code() })
}

/// Exit status of a finished report: 3 on any violation, 2 on any indeterminate verdict or
/// recorded budget error, else 0.
pub fn exit_status(sections: &[Section]) -> i32 {
    fn scan(v: &Value, worst: &mut i32) {
        match v {
            Value::Object(m) => {
                for (k, x) in m {
                    match (k.as_str(), x) {
                        ("violation", Value::Bool(true)) => *worst = (*worst).max(3),
                        ("exit_code", Value::Number(n)) => *worst = (*worst).max(n.as_i64().unwrap_or(1) as i32),
                        _ => scan(x, worst),
                    }
                }
            }
            Value::Array(a) => a.iter().for_each(|x| scan(x, worst)),
            Value::String(s) if s == "indeterminate" => *worst = (*worst).max(2),
            _ => {}
        }
    }
    let mut worst = 0;
    for s in sections {
        scan(&s.body, &mut worst);
    }
    worst
}

/// The whole report as one JSON value with sorted keys.
pub fn report_value(instance: &str, sections: &[Section]) -> Value {
    let mut m = Map::new();
    for s in sections {
        m.insert(s.name.clone(), s.body.clone());
    }
    json!({
        "schema_version": SCHEMA_VERSION,
        "instance": instance,
        "sections": Value::Object(m),
    })
}

pub fn render_json(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json") + "\n"
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            Some(format!("[{}]", a.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")))
        }
        _ => None,
    }
}

fn render_text_into(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render_text_into(x, indent + 1, out);
                    }
                }
            }
        }
        Value::Array(a) => {
            for x in a {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}-\n"));
                        render_text_into(x, indent + 1, out);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

pub fn render_text(v: &Value) -> String {
    let mut out = String::new();
    render_text_into(v, 0, &mut out);
    out
}

/// Replay documents for every witness in the sections.
pub fn replay_docs(inst: &Instance, sections: &[Section]) -> Vec<ReplayDoc> {
    sections
        .iter()
        .flat_map(|s| s.witnesses.iter())
        .map(|(mode, w)| ReplayDoc {
            schema_version: SCHEMA_VERSION,
            instance: inst.doc.clone(),
            mode: *mode,
            witness: w.clone(),
        })
        .collect()
}
