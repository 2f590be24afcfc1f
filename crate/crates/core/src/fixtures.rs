//! Built-in instances. `ggt fixtures` writes them out as the shipped corpus.

use std::collections::BTreeMap;

use crate::cli::{
    ActionDoc, ChainDoc, Codomain, InstanceDoc, MorphismDoc, OperationDoc, StepDoc, SystemDoc, TargetDoc,
    TopoDoc, TranscendentalDoc, SCHEMA_VERSION,
};
use crate::carrier::Tier;
use crate::dynsys::MonoidAction;

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn strs(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

fn unary(name: &str, map: &[usize]) -> OperationDoc {
    OperationDoc {
        name: name.into(),
        arity: 1,
        table: map.iter().map(|&x| Some(x)).collect(),
    }
}

fn explicit(tier: Tier, names: &[&str]) -> SystemDoc {
    SystemDoc {
        tier,
        explicit: Some(strs(names)),
        generators: None,
    }
}

fn base_doc(name: &str, description: &str, carrier: Vec<String>, ops: Vec<OperationDoc>, system: SystemDoc) -> InstanceDoc {
    InstanceDoc {
        schema_version: SCHEMA_VERSION,
        name: name.into(),
        description: description.into(),
        carrier,
        operations: ops,
        system,
        space: None,
        base: None,
        subsets: BTreeMap::new(),
        morphisms: BTreeMap::new(),
        topospace: None,
        action: None,
        target: None,
        theta: None,
        chain: None,
        transcendental: None,
    }
}

fn morphism(carrier: &[String], images: &[usize], codomain: Codomain, cod_labels: &[String]) -> MorphismDoc {
    MorphismDoc {
        map: images
            .iter()
            .enumerate()
            .map(|(x, &y)| (carrier[x].clone(), cod_labels[y].clone()))
            .collect(),
        codomain,
    }
}

fn shift_ops(n: usize) -> Vec<OperationDoc> {
    (0..n)
        .map(|k| unary(&format!("+{k}"), &(0..n).map(|x| (x + k) % n).collect::<Vec<_>>()))
        .collect()
}

fn shift_names(n: usize) -> Vec<String> {
    (0..n).map(|k| format!("+{k}")).collect()
}

fn trivial(name: &str, carrier: Vec<String>, description: &str) -> InstanceDoc {
    let n = carrier.len();
    base_doc(
        name,
        description,
        carrier,
        vec![unary("Id", &(0..n).collect::<Vec<_>>())],
        explicit(Tier::Unary, &["Id"]),
    )
}

pub fn two_point_trivial() -> InstanceDoc {
    trivial("two-point-trivial", labels(2), "identity only on two points; base empty")
}

pub fn two_point_monoid() -> InstanceDoc {
    let c = strs(&["a", "b"]);
    let mut d = trivial("two-point-monoid", c.clone(), "identity only on {a, b}; constants as named maps");
    d.morphisms.insert("const-a".into(), morphism(&c, &[0, 0], Codomain::Own, &c));
    d.morphisms.insert("const-b".into(), morphism(&c, &[1, 1], Codomain::Own, &c));
    d.morphisms.insert("swap".into(), morphism(&c, &[1, 0], Codomain::Own, &c));
    d
}

pub fn four_point_klein() -> InstanceDoc {
    let c = strs(&["1", "2", "3", "4"]);
    let mut d = trivial("four-point-klein", c.clone(), "identity only on four points; two commuting involutions");
    d.morphisms.insert("g1".into(), morphism(&c, &[1, 0, 3, 2], Codomain::Own, &c));
    d.morphisms.insert("g2".into(), morphism(&c, &[2, 3, 0, 1], Codomain::Own, &c));
    d.subsets.insert("pair".into(), strs(&["1", "2"]));
    d
}

pub fn sierpinski_powerset() -> InstanceDoc {
    // Subsets of {a, b} by bitmask: bit 0 is a, bit 1 is b. Closed sets are {}, {a}, {a, b}.
    let c = strs(&["{}", "{a}", "{b}", "{a,b}"]);
    let mut d = base_doc(
        "sierpinski-powerset",
        "power set of the Sierpinski space under identity and closure",
        c,
        vec![unary("Id", &[0, 1, 2, 3]), unary("Cl", &[0, 1, 3, 3])],
        explicit(Tier::Unary, &["Id", "Cl"]),
    );
    d.topospace = Some(TopoDoc {
        points: strs(&["a", "b"]),
        opens: vec![vec![], strs(&["b"]), strs(&["a", "b"])],
    });
    d
}

pub fn cycle(n: usize) -> InstanceDoc {
    let mut d = base_doc(
        &format!("cycle-{n}"),
        &format!("all translations of Z/{n}"),
        labels(n),
        shift_ops(n),
        SystemDoc {
            tier: Tier::Unary,
            explicit: Some(shift_names(n)),
            generators: None,
        },
    );
    let c = labels(n);
    if n > 1 {
        d.subsets.insert("one".into(), vec!["1".into()]);
        d.subsets.insert("zero".into(), vec!["0".into()]);
        d.action = Some(ActionDoc::Maps {
            maps: vec![(0..n).map(|x| c[(x + 1) % n].clone()).collect()],
        });
    }
    if n == 3 {
        d.transcendental = Some(TranscendentalDoc {
            operations: shift_names(3),
            tuple: Some(vec!["0".into()]),
            subset: Some(c.clone()),
        });
    }
    if n % 2 == 0 && n > 2 {
        let m = 2;
        let t = labels(m);
        d.target = Some(TargetDoc {
            carrier: t.clone(),
            operations: shift_ops(m),
            system: SystemDoc {
                tier: Tier::Unary,
                explicit: Some(shift_names(m)),
                generators: None,
            },
            space: None,
        });
        d.theta = Some(
            (0..n)
                .map(|k| [format!("+{k}"), format!("+{}", k % m)])
                .collect(),
        );
        let parity: Vec<usize> = (0..n).map(|x| x % m).collect();
        d.morphisms.insert("parity".into(), morphism(&c, &parity, Codomain::Target, &t));
    }
    d
}

pub fn cap3_addition() -> InstanceDoc {
    let n = 4;
    let table = (0..n * n)
        .map(|i| {
            let s = i / n + i % n;
            (s <= 3).then_some(s)
        })
        .collect();
    let mut d = base_doc(
        "cap3-addition",
        "addition on {0,1,2,3}, undefined above 3",
        labels(n),
        vec![OperationDoc {
            name: "add".into(),
            arity: 2,
            table,
        }],
        SystemDoc {
            tier: Tier::PartialGeneralized,
            explicit: None,
            generators: Some(strs(&["add"])),
        },
    );
    d.subsets.insert("one".into(), strs(&["1"]));
    d.chain = Some(ChainDoc {
        base: vec![],
        steps: vec![
            StepDoc {
                operations: strs(&["add"]),
                solutions: strs(&["2"]),
                declared: None,
            },
            StepDoc {
                operations: strs(&["add"]),
                solutions: strs(&["1"]),
                declared: None,
            },
        ],
        solutions: strs(&["1"]),
    });
    d
}

pub fn two_element_action() -> InstanceDoc {
    let mut d = base_doc(
        "two-element-action",
        "Z/2 acting on two points by the swap",
        labels(2),
        vec![unary("Id", &[0, 1]), unary("swap", &[1, 0])],
        explicit(Tier::Unary, &["Id", "swap"]),
    );
    d.action = Some(ActionDoc::Table(
        MonoidAction::new(
            strs(&["e", "s"]),
            vec![vec![0, 1], vec![1, 0]],
            0,
            labels(2),
            vec![vec![0, 1], vec![1, 0]],
        )
        .expect("valid action"),
    ));
    d
}

pub fn z4_on_two_points() -> InstanceDoc {
    let mut d = base_doc(
        "z4-on-two-points",
        "Z/4 acting on two points through parity, not faithful",
        labels(2),
        vec![unary("Id", &[0, 1]), unary("swap", &[1, 0])],
        explicit(Tier::Unary, &["Id", "swap"]),
    );
    d.action = Some(ActionDoc::Table(
        MonoidAction::new(
            labels(4),
            (0..4).map(|g| (0..4).map(|h| (g + h) % 4).collect()).collect(),
            0,
            labels(2),
            (0..4).map(|g| if g % 2 == 0 { vec![0, 1] } else { vec![1, 0] }).collect(),
        )
        .expect("valid action"),
    ));
    d
}

pub fn constant_maps_2() -> InstanceDoc {
    base_doc(
        "constant-maps-2",
        "the two constant maps on two points, without the identity",
        labels(2),
        vec![unary("c0", &[0, 0]), unary("c1", &[1, 1])],
        explicit(Tier::Unary, &["c0", "c1"]),
    )
}

pub fn swap_fixing_0() -> InstanceDoc {
    base_doc(
        "swap-fixing-0",
        "identity and the transposition of 1 and 2 on three points",
        labels(3),
        vec![unary("Id", &[0, 1, 2]), unary("swap", &[0, 2, 1])],
        explicit(Tier::Unary, &["Id", "swap"]),
    )
}

pub fn restriction_gap() -> InstanceDoc {
    let c = strs(&["a", "b", "c", "d"]);
    let mut d = base_doc(
        "restriction-gap",
        "quotient of the fixing groups isomorphic to the image of restriction but not to the group of K",
        c,
        vec![unary("Id", &[0, 1, 2, 3]), unary("f", &[0, 1, 0, 0])],
        explicit(Tier::Unary, &["Id", "f"]),
    );
    d.subsets.insert("K".into(), strs(&["a", "b"]));
    d
}

pub fn all() -> Vec<InstanceDoc> {
    vec![
        two_point_trivial(),
        two_point_monoid(),
        four_point_klein(),
        sierpinski_powerset(),
        cycle(2),
        cycle(3),
        cycle(4),
        cycle(6),
        cap3_addition(),
        two_element_action(),
        z4_on_two_points(),
        constant_maps_2(),
        swap_fixing_0(),
        restriction_gap(),
    ]
}

pub fn by_name(name: &str) -> Option<InstanceDoc> {
    all().into_iter().find(|d| d.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::resolve;

    #[test]
    fn every_fixture_resolves() {
        for d in all() {
            let name = d.name.clone();
            resolve(d).unwrap_or_else(|e| panic!("{name}: {e}"));
        }
    }

    #[test]
    fn cycle_four_parity_is_wired() {
        let inst = resolve(cycle(4)).unwrap();
        let (phi, cod) = &inst.morphisms["parity"];
        assert_eq!(*cod, Codomain::Target);
        assert_eq!(phi.images(), vec![0, 1, 0, 1]);
        assert_eq!(inst.theta.unwrap().pairs.len(), 4);
    }
}
