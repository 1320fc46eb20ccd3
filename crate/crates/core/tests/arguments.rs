mod common;

use std::collections::BTreeSet;

use common::*;
use daf_core::arguments::{
    enumerate_universe, ArgumentUniverse, Conclusion, GenerationConfig, Rule,
};
use daf_core::formula::canonical_conjunction;
use daf_core::kb::{KbOptions, KnowledgeBase, Premise};
use daf_core::{parse_kb, Formula};
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn universe(kb: &KnowledgeBase, query: Option<&str>) -> ArgumentUniverse {
    let q = query.map(f);
    enumerate_universe(kb, &GenerationConfig::default(), q.as_ref(), false).unwrap()
}

fn set(items: &[&str]) -> BTreeSet<Formula> {
    items.iter().map(|s| f(s)).collect()
}

fn uo(u: &ArgumentUniverse, id: daf_core::ArgId) -> BTreeSet<Formula> {
    u.unconditional_obligations(id).iter().cloned().collect()
}

#[test]
fn constituents_of_chains_and_leaves() {
    let kb = parse_kb("fact p\nob p => q\nob q => r\nconstraint s").unwrap();
    let u = universe(&kb, None);
    let a = chain(&u, "O q");
    let b = chain(&u, "O r");
    assert_eq!(u.rendered_constituents(a), vec!["O q", "p", "p => q"]);
    assert_eq!(
        u.rendered_constituents(b),
        vec!["O q", "O r", "p", "p => q", "q => r"]
    );
    assert_eq!(u.rendered_constituents(leaf(&u, "[] s")), vec!["[] s"]);
    assert!(u.is_proper_subargument(a, b));
    assert!(!u.is_subargument(b, a));
    assert_eq!(uo(&u, a), set(&["q"]));
}

#[test]
fn contrary_to_duty_universe() {
    let u = universe(&fixture("g1"), Some("q | r"));
    let a1 = leaf(&u, "[] p");
    let a2 = chain(&u, "O ~p");
    let a3 = chain(&u, "O ~q");
    let a4 = chain(&u, "O q");
    let a5 = aggregate_of(&u, &[a3, a4]);
    let a6 = weakening_of(&u, a4, "O (q | r)");
    assert_eq!(u.get(a5).children(), [a4, a3]);
    assert!(u.is_subargument(a2, a3));
    assert!(u.get(a1).unconditional_obligations().is_empty());
    assert_eq!(u.factual_support(a6), [f("p")]);
    assert!(matches!(
        u.get(a2).rule(),
        Rule::FactualDetach {
            antecedent: Formula::Top,
            ..
        }
    ));
}

#[test]
fn incoherent_weakened_aggregate() {
    let kb = fixture("g2");
    let mut u = universe(&kb, None);
    let a1 = chain(&u, "O p");
    let a2 = chain(&u, "O ~p");
    let a4 = u.weaken(a1, &f("p | ~q")).unwrap().unwrap();
    let a5 = u.aggregate(&[a2, a4]).unwrap().unwrap();
    let a6 = u.weaken(a5, &f("~q")).unwrap().unwrap();
    let conj = canonical_conjunction([&f("~p"), &f("p | ~q")]).unwrap();
    let mut expected = set(&["p", "p | ~q", "~p"]);
    expected.insert(conj.clone());
    assert_eq!(*u.get(a5).conclusion(), Conclusion::Ob(conj));
    assert_eq!(uo(&u, a5), expected);
    expected.insert(f("~q"));
    assert_eq!(uo(&u, a6), expected);
    assert!(!u.get(a5).is_coherent());
}

#[test]
fn factual_support_records_antecedents() {
    let u = universe(&fixture("g5"), None);
    assert_eq!(u.factual_support(chain(&u, "O p")), [f("q")]);
    assert_eq!(u.factual_support(chain(&u, "O ~p")), [f("q & r")]);
    let kb = parse_kb("constraint p").unwrap();
    let u = universe(&kb, None);
    assert!(u.factual_support(leaf(&u, "[] p")).is_empty());
}

#[test]
fn base_collects_factual_detachments() {
    let u = universe(&fixture("g7"), None);
    let a2 = chain(&u, "O q");
    let a3 = chain(&u, "O r");
    assert_eq!(u.base(a3), BTreeSet::from([a2]));
    let u = universe(&fixture("g6"), None);
    let (s, t) = (chain(&u, "O s"), chain(&u, "O t"));
    assert_eq!(u.base(aggregate_of(&u, &[s, t])), BTreeSet::from([s, t]));
    let u = universe(&parse_kb("constraint p").unwrap(), None);
    assert!(u.base(leaf(&u, "[] p")).is_empty());
}

#[test]
fn minimal_support() {
    let u = universe(&fixture("g8"), None);
    let pq = aggregate_of(&u, &[chain(&u, "O p"), chain(&u, "O q")]);
    let r = *u
        .with_conclusion(&concl("O r"))
        .iter()
        .find(|&&a| u.get(a).children() == [pq])
        .unwrap();
    let not_s = *u
        .with_conclusion(&concl("O ~s"))
        .iter()
        .find(|&&a| u.get(a).children() == [r])
        .unwrap();
    assert!(u.has_minimal_support(not_s));
    for a in u.ids() {
        if *u.get(a).rule() == Rule::ConstraintLeaf {
            assert!(u.has_minimal_support(a));
        }
    }
    // Two derivations of O q, one through a longer chain.
    let kb = parse_kb("fact p\nob p => q\nob p => r\nob r => q").unwrap();
    let u = universe(&kb, None);
    let short = chain(&u, "O r");
    let oq = u.with_conclusion(&concl("O q"));
    let direct = *oq
        .iter()
        .find(|&&a| matches!(u.get(a).rule(), Rule::FactualDetach { .. }))
        .unwrap();
    let long = *oq
        .iter()
        .find(|&&a| matches!(u.get(a).rule(), Rule::DeonticDetach { .. }))
        .unwrap();
    assert!(u.is_subargument(short, long));
    // Different constituents, neither included in the other.
    assert!(u.has_minimal_support(direct));
    assert!(u.has_minimal_support(long));
}

#[test]
fn prioritized_universe_conclusions() {
    let u = universe(&fixture("g6"), None);
    let conclusions: BTreeSet<String> = u
        .arguments()
        .iter()
        .filter(|a| a.is_deontic())
        .map(|a| a.conclusion().to_string())
        .collect();
    for expected in [
        "O s",
        "O t",
        "O u",
        "O (s & t)",
        "O (s & u)",
        "O (t & u)",
        "O (s & t & u)",
        "O ~(t & u)",
        "O ~(s & u)",
        "O ~(s & t)",
        "O ~u",
        "O ~t",
        "O ~s",
    ] {
        assert!(
            conclusions.contains(&concl(expected).to_string()),
            "missing {expected}"
        );
    }
}

#[test]
fn empty_knowledge_base() {
    let u = universe(&KnowledgeBase::new(KbOptions::default()), Some("p"));
    assert!(u.is_empty());
}

#[test]
fn weakening_needs_entailment() {
    let kb = parse_kb("fact p\nob p => q").unwrap();
    let mut u = universe(&kb, None);
    let a = chain(&u, "O q");
    assert!(u.weaken(a, &f("r")).unwrap().is_none());
    let w = u.weaken(a, &f("q | r")).unwrap().unwrap();
    assert_eq!(u.weaken(a, &f("q | r")).unwrap(), Some(w));
}

#[test]
fn doubts_complement_their_child() {
    let kb = fixture("g7");
    let u = enumerate_universe(&kb, &GenerationConfig::default(), None, true).unwrap();
    let a4 = chain(&u, "O ~p");
    let d = doubt_of(&u, a4);
    assert_eq!(*u.get(d).conclusion(), concl("(.) p"));
    assert_eq!(*u.get(d).rule(), Rule::DoubtFromDeontic);
    let d = doubt_of(&u, leaf(&u, "[] p"));
    assert_eq!(*u.get(d).rule(), Rule::DoubtFromConstraint);
}

#[test]
fn bounds_are_validated() {
    let cfg = GenerationConfig {
        build_rounds: 0,
        ..GenerationConfig::default()
    };
    assert!(enumerate_universe(&fixture("g1"), &cfg, None, false).is_err());
    let cfg = GenerationConfig {
        hard_cap: 3,
        ..GenerationConfig::default()
    };
    assert!(matches!(
        enumerate_universe(&fixture("g6"), &cfg, None, false),
        Err(daf_core::DafError::BoundExceeded { .. })
    ));
}

fn structure(u: &ArgumentUniverse) -> Vec<(String, Vec<String>, Vec<usize>)> {
    u.arguments()
        .iter()
        .map(|a| {
            (
                a.conclusion().to_string(),
                u.rendered_constituents(a.id()),
                a.children().iter().map(|c| c.index()).collect(),
            )
        })
        .collect()
}

#[test]
fn generation_is_deterministic() {
    for name in ["g1", "g4", "g6", "g8"] {
        let kb = fixture(name);
        let a = enumerate_universe(&kb, &GenerationConfig::default(), Some(&f("q")), true).unwrap();
        let b = enumerate_universe(&kb, &GenerationConfig::default(), Some(&f("q")), true).unwrap();
        assert_eq!(structure(&a), structure(&b), "{name}");
    }
}

#[test]
fn aggregation_ignores_part_order() {
    let mut u = universe(&fixture("g6"), None);
    let parts = [chain(&u, "O s"), chain(&u, "O t"), chain(&u, "O u")];
    let mut rng = rng(3);
    let first = u.aggregate(&parts).unwrap().unwrap();
    for _ in 0..6 {
        let mut p = parts.to_vec();
        p.shuffle(&mut rng);
        assert_eq!(u.aggregate(&p).unwrap(), Some(first));
    }
    // Nested aggregates flatten to the same argument.
    let st = aggregate_of(&u, &parts[..2]);
    assert_eq!(u.aggregate(&[parts[2], st]).unwrap(), Some(first));
}

fn closure_holds(u: &ArgumentUniverse) -> Result<(), TestCaseError> {
    for a in u.arguments() {
        for &c in a.children() {
            prop_assert!(c.index() < u.len());
            prop_assert!(u.is_subargument(c, a.id()));
        }
        for b in u.subarguments(a.id()) {
            if u.get(b).is_deontic() && a.is_deontic() {
                let small = uo(u, b);
                let large = uo(u, a.id());
                prop_assert!(small.is_subset(&large));
            }
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn universes_are_closed_and_monotone(seed in any::<u64>()) {
        let kb = random_kb(&mut rng(seed));
        let u = enumerate_universe(&kb, &GenerationConfig::default(), None, true).unwrap();
        closure_holds(&u)?;
    }

    #[test]
    fn premise_order_does_not_change_conclusions(seed in any::<u64>()) {
        let mut r = rng(seed);
        let kb = random_kb(&mut r);
        let mut premises: Vec<Premise> = kb.premises().to_vec();
        premises.shuffle(&mut r);
        let shuffled = KnowledgeBase::from_premises(premises, kb.options()).unwrap();
        let summary = |kb: &KnowledgeBase| -> BTreeSet<(String, usize)> {
            let u = universe(kb, None);
            u.arguments().iter().map(|a| (a.conclusion().to_string(), u.rendered_constituents(a.id()).len())).collect()
        };
        prop_assert_eq!(summary(&kb), summary(&shuffled));
    }
}
