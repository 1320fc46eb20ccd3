#![allow(dead_code)]

use std::collections::BTreeSet;

use daf_core::arguments::{ArgId, Argument, ArgumentUniverse, Conclusion, Rule};
use daf_core::attacks::AttackGraph;
use daf_core::kb::{Conditional, KbOptions, KnowledgeBase, Premise};
use daf_core::Formula;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> KnowledgeBase {
    let path = format!("{}/fixtures/{name}.kb", env!("CARGO_MANIFEST_DIR"));
    daf_core::parse_kb(&std::fs::read_to_string(path).unwrap()).unwrap()
}

pub fn fixture_prioritized(name: &str) -> KnowledgeBase {
    let path = format!("{}/fixtures/{name}.kb", env!("CARGO_MANIFEST_DIR"));
    let options = KbOptions {
        prioritized: true,
        ..KbOptions::default()
    };
    daf_core::parse_kb_with(&std::fs::read_to_string(path).unwrap(), options).unwrap()
}

pub fn f(text: &str) -> Formula {
    daf_core::parse_formula(text).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

const ATOMS: [&str; 4] = ["p", "q", "r", "s"];

fn literal(rng: &mut ChaCha8Rng, atoms: usize) -> Formula {
    let a = Formula::atom(ATOMS[rng.gen_range(0..atoms)]);
    if rng.gen_bool(0.4) {
        Formula::not(a)
    } else {
        a
    }
}

fn binary(rng: &mut ChaCha8Rng, atoms: usize) -> Formula {
    let (a, b) = (literal(rng, atoms), literal(rng, atoms));
    match rng.gen_range(0..3) {
        0 => Formula::and(a, b),
        1 => Formula::or(a, b),
        _ => Formula::implies(a, b),
    }
}

/// At most 4 atoms, 5 conditionals, 2 constraints and 2 facts.
pub fn random_kb(rng: &mut ChaCha8Rng) -> KnowledgeBase {
    random_kb_sized(rng, 5)
}

pub fn random_kb_sized(rng: &mut ChaCha8Rng, max_conditionals: usize) -> KnowledgeBase {
    let atoms = rng.gen_range(2..=4);
    let mut premises = Vec::new();
    for _ in 0..rng.gen_range(0..=2) {
        let body = if rng.gen_bool(0.6) {
            literal(rng, atoms)
        } else {
            Formula::and(literal(rng, atoms), literal(rng, atoms))
        };
        premises.push(Premise::Fact(body));
    }
    for _ in 0..rng.gen_range(0..=2) {
        let body = if rng.gen_bool(0.7) {
            Formula::not(Formula::and(literal(rng, atoms), literal(rng, atoms)))
        } else {
            binary(rng, atoms)
        };
        premises.push(Premise::Constraint(body));
    }
    for _ in 0..rng.gen_range(1..=max_conditionals) {
        let antecedent = match rng.gen_range(0..10) {
            0..=2 => Formula::Top,
            3..=7 => literal(rng, atoms),
            _ => Formula::and(literal(rng, atoms), literal(rng, atoms)),
        };
        let consequent = if rng.gen_bool(0.85) {
            literal(rng, atoms)
        } else {
            binary(rng, atoms)
        };
        premises.push(Premise::Conditional(Conditional::new(
            antecedent, consequent,
        )));
    }
    KnowledgeBase::from_premises(premises, KbOptions::default()).unwrap()
}

/// Atoms of the knowledge base, their negations, and pairwise
/// conjunctions and disjunctions of those literals.
pub fn query_pool(kb: &KnowledgeBase) -> Vec<Formula> {
    let atoms = kb.atoms();
    let mut literals: Vec<Formula> = Vec::new();
    for a in atoms {
        literals.push(Formula::Atom(a.clone()));
        literals.push(Formula::not(Formula::Atom(a)));
    }
    let mut pool = literals.clone();
    for i in 0..literals.len() {
        for j in i + 1..literals.len() {
            pool.push(Formula::and(literals[i].clone(), literals[j].clone()));
            pool.push(Formula::or(literals[i].clone(), literals[j].clone()));
        }
    }
    pool
}

pub fn sample_queries(rng: &mut ChaCha8Rng, kb: &KnowledgeBase, n: usize) -> Vec<Formula> {
    let pool = query_pool(kb);
    let mut out: Vec<Formula> = pool
        .iter()
        .filter(|q| !matches!(q, Formula::And(..) | Formula::Or(..)))
        .cloned()
        .collect();
    let mut rest: Vec<Formula> = pool
        .into_iter()
        .filter(|q| matches!(q, Formula::And(..) | Formula::Or(..)))
        .collect();
    rest.shuffle(rng);
    out.extend(rest.into_iter().take(n.saturating_sub(out.len())));
    out
}

pub fn concl(text: &str) -> Conclusion {
    Conclusion::parse(text).unwrap()
}

fn only(u: &ArgumentUniverse, text: &str, keep: impl Fn(&Argument) -> bool) -> ArgId {
    let found: Vec<ArgId> = u
        .with_conclusion(&concl(text))
        .iter()
        .copied()
        .filter(|&a| keep(u.get(a)))
        .collect();
    assert_eq!(
        found.len(),
        1,
        "expected one argument for `{text}`, found {found:?}"
    );
    found[0]
}

pub fn leaf(u: &ArgumentUniverse, text: &str) -> ArgId {
    only(u, text, |a| *a.rule() == Rule::ConstraintLeaf)
}

fn is_chain(u: &ArgumentUniverse, a: &Argument) -> bool {
    match a.rule() {
        Rule::FactualDetach { .. } => true,
        Rule::DeonticDetach { .. } => is_chain(u, u.get(a.children()[0])),
        _ => false,
    }
}

/// The pure detachment chain with this conclusion.
pub fn chain(u: &ArgumentUniverse, text: &str) -> ArgId {
    only(u, text, |a| is_chain(u, a))
}

pub fn aggregate_of(u: &ArgumentUniverse, parts: &[ArgId]) -> ArgId {
    let mut want = parts.to_vec();
    want.sort();
    let found: Vec<ArgId> = u
        .arguments()
        .iter()
        .filter(|a| {
            *a.rule() == Rule::Aggregate && {
                let mut c = a.children().to_vec();
                c.sort();
                c == want
            }
        })
        .map(|a| a.id())
        .collect();
    assert_eq!(found.len(), 1, "expected one aggregate of {parts:?}");
    found[0]
}

pub fn weakening_of(u: &ArgumentUniverse, child: ArgId, text: &str) -> ArgId {
    only(u, text, |a| {
        matches!(a.rule(), Rule::Weaken { .. }) && a.children() == [child]
    })
}

pub fn doubt_of(u: &ArgumentUniverse, child: ArgId) -> ArgId {
    let found: Vec<ArgId> = u
        .arguments()
        .iter()
        .filter(|a| a.conclusion().is_doubt() && a.children() == [child])
        .map(|a| a.id())
        .collect();
    assert_eq!(found.len(), 1, "expected one doubt on {child}");
    found[0]
}

/// Attacks among `named`, as pairs of 1-based positions in `named`.
pub fn edges_among(graph: &AttackGraph, named: &[ArgId]) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    for (i, &a) in named.iter().enumerate() {
        for (j, &b) in named.iter().enumerate() {
            if graph.attacks(a, b) {
                out.insert((i + 1, j + 1));
            }
        }
    }
    out
}

pub fn pairs(list: &[(usize, usize)]) -> BTreeSet<(usize, usize)> {
    list.iter().copied().collect()
}
