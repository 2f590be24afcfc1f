//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness. The process fails when a criterion fails that is not in
//! `KNOWN_FAILURES`, or when a listed one starts passing (so the list cannot go stale).

use std::collections::BTreeSet;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ggt_core::carrier::{Operation, OperationSystem, Repr, Tier};
use ggt_core::cli::{resolve, Instance};
use ggt_core::dynsys::round_trip;
use ggt_core::fixtures;
use ggt_core::galois::{lattice_report, verify_correspondence, GaloisContext};
use ggt_core::limits::{Budget, Tri};
use ggt_core::morphism::{
    generator_basis, is_t_morphism, is_t_morphism_full, Kind, Morphism,
};
use ggt_core::structure::{first_isomorphism_sweep, verify_duality, verify_first_isomorphism, verify_transitivity};
use ggt_core::topology::{enumerate_topologies, theorem_conditions, TheoremId};
use ggt_core::topospace::{
    continuity_equivalence_report, hom_correspondence, star_composition_suite, star_injectivity_report, TopoSpace,
};
use ggt_core::tspace::{exhaustive_generator, generate_space, is_t_space, Check};
use ggt_core::Subset;

/// Criteria that cannot be met as stated; each has a ledger entry.
const KNOWN_FAILURES: &[u32] = &[6];

type Outcome = Result<String, String>;

fn inst(name: &str) -> Instance {
    resolve(fixtures::by_name(name).unwrap_or_else(|| panic!("no fixture {name}"))).expect("fixture resolves")
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn criterion_1() -> Outcome {
    let i = inst("two-point-trivial");
    let b = Budget::default();
    let ctx = GaloisContext::new(&i.sys, &i.space, Kind::Aut, &b).map_err(err)?;
    let base = ctx.fixed_of(&ctx.all());
    let r = verify_correspondence(&ctx, &base, &b).map_err(err)?;
    ensure(
        r.intermediate_quasi == 4 && r.substructures == Some(2),
        format!("|Int|={} |SGr|={:?}", r.intermediate_quasi, r.substructures),
    )?;
    Ok(format!("|Int|={}, |SGr|=2", r.intermediate_quasi))
}

fn criterion_2() -> Outcome {
    let i = inst("two-point-monoid");
    let b = Budget::default();
    let ctx = GaloisContext::new(&i.sys, &i.space, Kind::End, &b).map_err(err)?;
    let gen = |name: &str| -> Result<Subset, String> {
        let m = &i.morphisms[name].0;
        let idx = ctx.index_of(m).ok_or("constant is not an endomorphism")?;
        Ok(ctx.generated(&Subset::singleton(idx)))
    };
    let m1 = gen("const-a")?;
    let m2 = gen("const-b")?;
    let fam: BTreeSet<Subset> = ctx.gs_family(&Subset::new()).map_err(err)?.into_iter().collect();
    ensure(fam.contains(&m1) && fam.contains(&m2), "M1 or M2 is not Galois")?;
    let join = ctx.generated(&m1.union(&m2));
    ensure(join.len() == 3, format!("join has {} elements", join.len()))?;
    ensure(!fam.contains(&join), "join is Galois")?;
    let lat = lattice_report(&i.sys, &i.space, &Subset::new(), &b).map_err(err)?;
    match lat.gsmn_joins {
        Check::Fail { witness } => {
            let w = serde_json::to_value(&witness).map_err(err)?;
            let expected = serde_json::json!({
                "kind": "join",
                "left": m1.to_vec(),
                "right": m2.to_vec(),
                "join": join.to_vec(),
            });
            ensure(w == expected, format!("unexpected witness {w}"))?;
        }
        other => return Err(format!("join closure not flagged: {other:?}")),
    }
    Ok("M1, M2 Galois; 3-element join flagged".into())
}

fn criterion_3() -> Outcome {
    let i = inst("four-point-klein");
    let b = Budget::default();
    let ctx = GaloisContext::new(&i.sys, &i.space, Kind::Aut, &b).map_err(err)?;
    let idx = |n: &str| ctx.index_of(&i.morphisms[n].0).ok_or(format!("{n} is not an automorphism"));
    let g1 = ctx.generated(&Subset::singleton(idx("g1")?));
    let g2 = ctx.generated(&Subset::singleton(idx("g2")?));
    let join = ctx.generated(&g1.union(&g2));
    let fixed = ctx.fixed_of(&join);
    let closure = ctx.galois_indices(&fixed);
    let fam: BTreeSet<Subset> = ctx.gs_family(&Subset::new()).map_err(err)?.into_iter().collect();
    ensure(join.len() == 4, format!("join order {}", join.len()))?;
    ensure(closure.len() == 24, format!("closure order {}", closure.len()))?;
    ensure(!fam.contains(&join), "join is Galois")?;
    Ok("join order 4, closure order 24, join not Galois".into())
}

/// Independent count over all 256 self-maps of the power set of the Sierpinski space.
fn criterion_4() -> Outcome {
    let i = inst("sierpinski-powerset");
    let b = Budget::default();
    // Masks: bit 0 is a, bit 1 is b; open sets are {}, {b}, {a,b}.
    let opens = [0u8, 2, 3];
    let closed: Vec<u8> = opens.iter().map(|o| 3 & !o).collect();
    let cl = |m: u8| -> u8 { (0u8..4).filter(|c| closed.contains(c) && c & m == m).fold(3, |acc, c| acc & c) };
    let mut end = 0;
    let mut aut = 0;
    for code in 0..256u32 {
        let s: Vec<u8> = (0..4).map(|k| ((code >> (2 * k)) & 3) as u8).collect();
        if (0..4u8).all(|m| s[cl(m) as usize] == cl(s[m as usize])) {
            end += 1;
            if s.iter().collect::<BTreeSet<_>>().len() == 4 {
                aut += 1;
            }
        }
    }
    let image = |p: &[usize], m: u8| -> u8 { (0..2).filter(|x| m >> x & 1 == 1).fold(0, |acc, x| acc | 1 << p[x]) };
    let mut continuous = 0;
    let mut equivalence = true;
    for p in [[0usize, 0], [0, 1], [1, 0], [1, 1]] {
        let cont = opens.iter().all(|&o| {
            let pre: u8 = (0..2).filter(|&x| o >> p[x] & 1 == 1).fold(0, |acc, x| acc | 1 << x);
            opens.contains(&pre)
        });
        continuous += cont as usize;
        let star: Vec<u8> = (0..4u8)
            .map(|m| if closed.contains(&m) { cl(image(&p, m)) } else { image(&p, m) })
            .collect();
        let morphism = (0..4u8).all(|m| star[cl(m) as usize] == cl(star[m as usize]));
        equivalence &= cont == morphism;
    }
    ensure((end, aut, continuous) == (36, 2, 3), format!("oracle gave {end}/{aut}/{continuous}"))?;
    ensure(equivalence, "oracle equivalence failed")?;
    let lib_end = ggt_core::morphism::enumerate_morphisms(&i.sys, &i.space, Kind::End, &b).map_err(err)?;
    let lib_aut = ggt_core::morphism::enumerate_morphisms(&i.sys, &i.space, Kind::Aut, &b).map_err(err)?;
    let x = TopoSpace::sierpinski();
    let rep = continuity_equivalence_report(&x, &b).map_err(err)?;
    ensure(
        lib_end.len() == 36 && lib_aut.len() == 2 && rep.continuous == 3 && rep.maps == 4 && rep.holds,
        format!("library gave {}/{}/{} holds={}", lib_end.len(), lib_aut.len(), rep.continuous, rep.holds),
    )?;
    Ok("End 36, Aut 2, 3 continuous maps, equivalence on all 4 maps".into())
}

/// Composition closure of `maps` on `0..n`, optionally with the identity.
fn closure(n: usize, maps: Vec<Vec<usize>>, with_id: bool) -> Vec<Vec<usize>> {
    let mut all: Vec<Vec<usize>> = Vec::new();
    if with_id {
        all.push((0..n).collect());
    }
    for m in maps {
        if !all.contains(&m) {
            all.push(m);
        }
    }
    let mut i = 0;
    while i < all.len() {
        for j in 0..=i {
            for (a, b) in [(i, j), (j, i)] {
                let c: Vec<usize> = all[b].iter().map(|&x| all[a][x]).collect();
                if !all.contains(&c) {
                    all.push(c);
                }
            }
        }
        i += 1;
    }
    all
}

fn random_unary(rng: &mut ChaCha8Rng, max_n: usize, max_members: usize) -> OperationSystem {
    loop {
        let n = rng.gen_range(1..=max_n);
        let k = rng.gen_range(1..=2);
        let maps = (0..k).map(|_| (0..n).map(|_| rng.gen_range(0..n)).collect()).collect();
        let members = closure(n, maps, rng.gen_bool(0.6));
        if members.len() <= max_members {
            return OperationSystem::unary_explicit(n, &members);
        }
    }
}

fn random_subset(rng: &mut ChaCha8Rng, of: &Subset) -> Subset {
    of.iter().filter(|_| rng.gen_bool(0.5)).collect()
}

fn criterion_5() -> Outcome {
    let b = Budget::default();
    let mut checked = 0;
    for doc in fixtures::all() {
        let i = resolve(doc).map_err(err)?;
        for kind in [Kind::End, Kind::Aut] {
            let ctx = GaloisContext::new(&i.sys, &i.space, kind, &b).map_err(err)?;
            for base in i.space.subsets() {
                let r = verify_correspondence(&ctx, &base, &b).map_err(err)?;
                ensure(r.verdict, format!("{} {kind:?} base {base:?}", i.doc.name))?;
                checked += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for round in 0..200 {
        let sys = random_unary(&mut rng, 4, 64);
        let u = random_subset(&mut rng, &Subset::full(sys.n()));
        let s = generate_space(&sys, &u).map_err(err)?;
        let base = random_subset(&mut rng, &s);
        for kind in [Kind::End, Kind::Aut] {
            let ctx = GaloisContext::new(&sys, &s, kind, &b).map_err(err)?;
            let r = verify_correspondence(&ctx, &base, &b).map_err(err)?;
            ensure(r.verdict, format!("random instance {round} {kind:?}"))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} correspondences verified"))
}

fn criterion_6() -> Outcome {
    let b = Budget::default();
    let mut problems = Vec::new();
    let mut decided = 0;
    for doc in fixtures::all() {
        let i = resolve(doc).map_err(err)?;
        if i.space.len() > 4 || i.sys.tier != Tier::Unary {
            continue;
        }
        for id in [TheoremId::IntEnd, TheoremId::Gsmn] {
            let r = theorem_conditions(&i.sys, &i.space, &i.base, id, &b).map_err(err)?;
            let values: Vec<Tri> = r.clauses.iter().map(|c| c.value).collect();
            if r.violation || values.iter().any(|v| *v != values[0]) {
                problems.push(format!("{} {id:?}: {:?}", i.doc.name, r.clauses.iter().map(|c| c.value).collect::<Vec<_>>()));
            } else if values.first() == Some(&Tri::Indeterminate) {
                problems.push(format!("{} {id:?}: undecided", i.doc.name));
            } else {
                decided += 1;
            }
        }
    }
    if problems.is_empty() {
        Ok(format!("{decided} theorem instances consistent"))
    } else {
        Err(format!("{decided} consistent; clause (i) not decidable within the topology ceiling for: {}", problems.join("; ")))
    }
}

fn criterion_7() -> Outcome {
    let b = Budget::default();
    let tops = enumerate_topologies(&Subset::full(3), &b).map_err(err)?;
    ensure(tops.len() == 29, format!("{} topologies", tops.len()))?;
    let (mut qualifying, mut homs) = (0, 0);
    for t in tops {
        let x = TopoSpace::from_topology(t).map_err(err)?;
        let inj = star_injectivity_report(&x, &x, &b).map_err(err)?;
        ensure(inj.maps == 27 && inj.injective && !inj.violation, "star map not injective")?;
        let comp = star_composition_suite(&x, &b).map_err(err)?;
        ensure(comp.violations == 0, "composition failure")?;
        qualifying += comp.qualifying;
        let hom = hom_correspondence(&x, &Subset::new(), &b).map_err(err)?;
        ensure(hom.holds, "hom correspondence failed")?;
        homs += hom.homeomorphisms.len();
    }
    Ok(format!("29 topologies; {qualifying} qualifying pairs; {homs} homeomorphisms"))
}

fn criterion_8() -> Outcome {
    let b = Budget::default();
    let (mut both_true, mut both_false) = (0, 0);
    for name in ["cycle-3", "two-point-trivial", "two-element-action", "constant-maps-2", "swap-fixing-0"] {
        let i = inst(name);
        for kind in [Kind::End, Kind::Aut] {
            let r = verify_duality(&i.sys, &i.space, kind, &b).map_err(err)?;
            ensure(!r.violation, format!("{name} {kind:?} violation"))?;
            if kind == Kind::End {
                ensure(r.contains == Some(true), format!("{name}: containment"))?;
            }
            if r.biconditional.is_some() {
                if r.equality {
                    both_true += 1;
                } else {
                    both_false += 1;
                }
            }
        }
    }
    ensure(both_true > 0 && both_false > 0, "only one direction exercised")?;
    Ok(format!("containment holds; biconditional {both_true} with equality, {both_false} without"))
}

fn criterion_9() -> Outcome {
    let b = Budget::default();
    let i = inst("cycle-4");
    let (tsys, _) = i.target.as_ref().ok_or("no target")?;
    let theta = i.theta.as_ref().ok_or("no theta")?;
    let r = verify_first_isomorphism(&i.sys, tsys, theta, &i.morphisms["parity"].0, &b).map_err(err)?;
    ensure(r.classes == 2 && r.holds == Some(true), format!("parity: {r:?}"))?;
    let mut summary = vec!["parity |Q|=2 iso".to_string()];
    for (n, m) in [(4, 2), (6, 3), (6, 2)] {
        let a = inst(&format!("cycle-{n}"));
        let shifts: Vec<Vec<usize>> = (0..m).map(|k| (0..m).map(|x| (x + k) % m).collect()).collect();
        let target = OperationSystem::unary_explicit(m, &shifts);
        let sweep = first_isomorphism_sweep(&a.sys, &a.space, &target, &Subset::full(m), &b).map_err(err)?;
        ensure(sweep.failures.is_empty(), format!("({n},{m}): {} failures", sweep.failures.len()))?;
        ensure(sweep.applicable > 0, format!("({n},{m}): nothing applicable"))?;
        summary.push(format!("({n},{m}) {}/{}", sweep.passed, sweep.applicable));
    }
    Ok(summary.join("; "))
}

fn criterion_10() -> Outcome {
    let b = Budget::default();
    let i = inst("cycle-3");
    let mut pairs = 0;
    for kind in [Kind::End, Kind::Aut] {
        let r = verify_transitivity(&i.sys, &i.space, kind, &b).map_err(err)?;
        ensure(r.applicable && r.missing.is_empty() && !r.violation, format!("{kind:?}: {r:?}"))?;
        ensure(r.core.is_empty() && r.fixed.is_empty() && r.core_equals_fixed == Some(true), "core set")?;
        pairs += r.witnesses.len();
    }
    Ok(format!("hypotheses hold; {pairs} arrow pairs witnessed; C = S^End = empty"))
}

fn random_binary(rng: &mut ChaCha8Rng, n: usize) -> OperationSystem {
    let op = Operation::from_fn("g", n, 2, |_| if rng.gen_bool(0.3) { None } else { Some(rng.gen_range(0..n)) });
    OperationSystem::new(ggt_core::carrier::Carrier::range(n), Tier::PartialGeneralized, Repr::Generated, vec![op])
        .expect("valid")
}

fn criterion_11() -> Outcome {
    let b = Budget::default();
    let mut discrepancies = Vec::new();
    let mut morphism_checks = 0;
    let mut explicit: Vec<OperationSystem> = fixtures::all()
        .into_iter()
        .map(|d| resolve(d).expect("fixture").sys)
        .filter(|s| s.repr == Repr::Explicit && s.tier == Tier::Unary && s.n() <= 4)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let instances = 500;
    for round in 0..instances {
        let sys = random_unary(&mut rng, 6, 16);
        let n = sys.n();
        // (b) families against their definitions.
        let u = random_subset(&mut rng, &Subset::full(n));
        let s = generate_space(&sys, &u).map_err(err)?;
        let base = random_subset(&mut rng, &s);
        for kind in [Kind::End, Kind::Aut] {
            match GaloisContext::new(&sys, &s, kind, &b) {
                Ok(ctx) if ctx.members.len() <= 16 => {
                    if ctx.int_family(&base).map_err(err)? != ctx.int_family_brute(&base).map_err(err)? {
                        discrepancies.push(format!("int family, round {round}"));
                    }
                    if ctx.gs_family(&base).map_err(err)? != ctx.gs_family_brute(&base, &b).map_err(err)? {
                        discrepancies.push(format!("gs family, round {round}"));
                    }
                }
                Ok(_) | Err(ggt_core::GgtError::Budget { .. }) => {}
                Err(e) => return Err(e.to_string()),
            }
        }
        // (c) fast T-space decision against exhaustive search, unary and binary.
        let target = random_subset(&mut rng, &Subset::full(n));
        let bin = random_binary(&mut rng, n);
        for sys in [&sys, &bin] {
            let fast = is_t_space(sys, &target, &b).map_err(err)?.verdict;
            let slow = exhaustive_generator(sys, &target).map_err(err)?.is_some();
            if fast != Tri::from_bool(slow) {
                discrepancies.push(format!("t-space, round {round}"));
            }
        }
        if round % 5 == 0 && n <= 4 {
            explicit.push(sys);
        }
    }
    // (a) generator-reduced against full-T commutation over every self-map of the carrier.
    for sys in &explicit {
        let basis = generator_basis(sys).map_err(err)?;
        let reduced = OperationSystem::new(sys.carrier.clone(), Tier::Unary, Repr::Generated, basis).map_err(err)?;
        let full = Subset::full(sys.n());
        for images in ggt_core::morphism::all_functions(sys.n(), sys.n(), &b).map_err(err)? {
            let m = Morphism::from_images(sys.n(), &full, &full, &images).map_err(err)?;
            let a = is_t_morphism(&reduced, &m).map_err(err)?.is_none();
            let c = is_t_morphism_full(sys, &m).map_err(err)?.is_none();
            if a != c {
                discrepancies.push(format!("morphism {images:?}"));
            }
            morphism_checks += 1;
        }
    }
    ensure(discrepancies.is_empty(), discrepancies.join(", "))?;
    Ok(format!("{instances} instances, {morphism_checks} morphism checks, 0 discrepancies"))
}

fn criterion_12() -> Outcome {
    let b = Budget::default();
    let mut n = 0;
    for doc in fixtures::all() {
        let i = resolve(doc).map_err(err)?;
        if let Some(a) = &i.action {
            let r = round_trip(a, &b).map_err(err)?;
            ensure(r.holds(), format!("{}: {r:?}", i.doc.name))?;
            n += 1;
        }
    }
    ensure(n >= 3, "too few actions")?;
    Ok(format!("{n} actions round-trip; correspondences hold on every base"))
}

fn main() {
    let criteria: [(u32, &str, fn() -> Outcome); 12] = [
        (1, "two-point intermediate and subgroup counts", criterion_1),
        (2, "join of Galois submonoids", criterion_2),
        (3, "join of two involution groups", criterion_3),
        (4, "power set of the Sierpinski space", criterion_4),
        (5, "Galois correspondence suite", criterion_5),
        (6, "topology clause consistency", criterion_6),
        (7, "three-point topological spaces", criterion_7),
        (8, "duality suite", criterion_8),
        (9, "first isomorphism", criterion_9),
        (10, "transitivity and core fixed sets", criterion_10),
        (11, "oracle equivalence", criterion_11),
        (12, "dynamical round trip", criterion_12),
    ];
    let mut unexpected = Vec::new();
    for (id, title, f) in criteria {
        let start = Instant::now();
        let out = f();
        let secs = start.elapsed().as_secs_f64();
        let known = KNOWN_FAILURES.contains(&id);
        match &out {
            Ok(msg) => println!("criterion {id:>2} PASS ({secs:.2}s) {title}: {msg}"),
            Err(msg) => println!("criterion {id:>2} FAIL ({secs:.2}s) {title}: {msg}"),
        }
        if out.is_ok() == known {
            unexpected.push(id);
        }
    }
    if !unexpected.is_empty() {
        eprintln!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
