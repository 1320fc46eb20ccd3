//! Classical entailment and the settled (boxed) layer.
//!
//! `□A` is derivable from a knowledge base iff the settled base, i.e. the
//! constraint bodies plus the facts when facts are settled, classically
//! entails `A`. Conditionals never contribute. Factual detachment tests
//! the settled base together with all facts.
//!
//! Two decision procedures are provided: a backtracking search with
//! three-valued pruning that works for any number of atoms, and a
//! truth-table evaluator used by [`Reasoner`] when the vocabulary is small.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::{Arc, Mutex};

use crate::formula::{Atom, Formula};
use crate::kb::KnowledgeBase;

/// Vocabularies up to this size are decided with bit-parallel truth tables.
const TABLE_ATOM_LIMIT: usize = 16;

/// Does every assignment satisfying `assumptions` satisfy `goal`?
pub fn cl_entails(assumptions: &[Formula], goal: &Formula) -> bool {
    let negated = Formula::not(goal.clone());
    let mut all: Vec<&Formula> = assumptions.iter().collect();
    all.push(&negated);
    !satisfiable(&all)
}

pub fn cl_consistent(formulas: &[Formula]) -> bool {
    satisfiable(&formulas.iter().collect::<Vec<_>>())
}

#[derive(Debug)]
enum Indexed {
    Const(bool),
    Var(usize),
    Not(Box<Indexed>),
    And(Box<Indexed>, Box<Indexed>),
    Or(Box<Indexed>, Box<Indexed>),
}

impl Indexed {
    fn build(f: &Formula, index: &BTreeMap<Atom, usize>) -> Indexed {
        match f {
            Formula::Top => Indexed::Const(true),
            Formula::Bottom => Indexed::Const(false),
            Formula::Atom(a) => Indexed::Var(index[a]),
            Formula::Not(g) => Indexed::Not(Box::new(Indexed::build(g, index))),
            Formula::And(a, b) => Indexed::And(
                Box::new(Indexed::build(a, index)),
                Box::new(Indexed::build(b, index)),
            ),
            Formula::Or(a, b) => Indexed::Or(
                Box::new(Indexed::build(a, index)),
                Box::new(Indexed::build(b, index)),
            ),
        }
    }

    /// Kleene evaluation under a partial assignment.
    fn eval(&self, assignment: &[Option<bool>]) -> Option<bool> {
        match self {
            Indexed::Const(b) => Some(*b),
            Indexed::Var(i) => assignment[*i],
            Indexed::Not(g) => g.eval(assignment).map(|b| !b),
            Indexed::And(a, b) => match (a.eval(assignment), b.eval(assignment)) {
                (Some(false), _) | (_, Some(false)) => Some(false),
                (Some(true), Some(true)) => Some(true),
                _ => None,
            },
            Indexed::Or(a, b) => match (a.eval(assignment), b.eval(assignment)) {
                (Some(true), _) | (_, Some(true)) => Some(true),
                (Some(false), Some(false)) => Some(false),
                _ => None,
            },
        }
    }
}

/// Backtracking satisfiability check over the atoms of `formulas`.
fn satisfiable(formulas: &[&Formula]) -> bool {
    let mut atoms = BTreeSet::new();
    for f in formulas {
        f.collect_atoms(&mut atoms);
    }
    let index: BTreeMap<Atom, usize> = atoms.into_iter().enumerate().map(|(i, a)| (a, i)).collect();
    let compiled: Vec<Indexed> = formulas.iter().map(|f| Indexed::build(f, &index)).collect();
    let mut assignment = vec![None; index.len()];
    search(&compiled, &mut assignment, 0)
}

fn search(formulas: &[Indexed], assignment: &mut [Option<bool>], next: usize) -> bool {
    let mut all_true = true;
    for f in formulas {
        match f.eval(assignment) {
            Some(false) => return false,
            None => all_true = false,
            Some(true) => {}
        }
    }
    if all_true {
        return true;
    }
    if next == assignment.len() {
        return false;
    }
    for value in [true, false] {
        assignment[next] = Some(value);
        if search(formulas, assignment, next + 1) {
            assignment[next] = None;
            return true;
        }
    }
    assignment[next] = None;
    false
}

/// The formulas whose boxes are derivable from a knowledge base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SettledBase {
    formulas: Vec<Formula>,
}

impl SettledBase {
    pub fn from_kb(kb: &KnowledgeBase) -> Self {
        let mut formulas: Vec<Formula> = kb.constraints().to_vec();
        if kb.options().facts_settled {
            for fact in kb.facts() {
                if !formulas.contains(fact) {
                    formulas.push(fact.clone());
                }
            }
        }
        SettledBase { formulas }
    }

    pub fn formulas(&self) -> &[Formula] {
        &self.formulas
    }
}

/// `□goal` is derivable from `kb`.
pub fn settled_entails(kb: &KnowledgeBase, goal: &Formula) -> bool {
    cl_entails(SettledBase::from_kb(kb).formulas(), goal)
}

/// `goal` follows from the settled base together with all facts.
pub fn fact_entails(kb: &KnowledgeBase, goal: &Formula) -> bool {
    let mut base = SettledBase::from_kb(kb).formulas;
    base.extend(kb.facts().iter().cloned());
    cl_entails(&base, goal)
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Table {
    words: Vec<u64>,
}

impl Table {
    fn and_assign(&mut self, other: &Table) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    fn and_not_is_zero(&self, other: &Table) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }
}

struct TableSpace {
    index: BTreeMap<Atom, usize>,
    rows: usize,
}

impl TableSpace {
    fn words(&self) -> usize {
        self.rows.div_ceil(64)
    }

    fn mask_last(&self, words: &mut [u64]) {
        let rem = self.rows % 64;
        if rem != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    fn constant(&self, value: bool) -> Table {
        let mut words = vec![if value { u64::MAX } else { 0 }; self.words()];
        self.mask_last(&mut words);
        Table { words }
    }

    fn var(&self, i: usize) -> Table {
        let mut words = vec![0u64; self.words()];
        if i < 6 {
            // Bit pattern repeats inside each word.
            let mut pattern = 0u64;
            for bit in 0..64 {
                if (bit >> i) & 1 == 1 {
                    pattern |= 1 << bit;
                }
            }
            words.iter_mut().for_each(|w| *w = pattern);
        } else {
            for (wi, w) in words.iter_mut().enumerate() {
                if (wi >> (i - 6)) & 1 == 1 {
                    *w = u64::MAX;
                }
            }
        }
        self.mask_last(&mut words);
        Table { words }
    }

    fn eval(&self, f: &Formula) -> Option<Table> {
        Some(match f {
            Formula::Top => self.constant(true),
            Formula::Bottom => self.constant(false),
            Formula::Atom(a) => self.var(*self.index.get(a)?),
            Formula::Not(g) => {
                let mut t = self.eval(g)?;
                t.words.iter_mut().for_each(|w| *w = !*w);
                self.mask_last(&mut t.words);
                t
            }
            Formula::And(a, b) => {
                let mut t = self.eval(a)?;
                t.and_assign(&self.eval(b)?);
                t
            }
            Formula::Or(a, b) => {
                let mut t = self.eval(a)?;
                let u = self.eval(b)?;
                t.words.iter_mut().zip(&u.words).for_each(|(x, y)| *x |= y);
                t
            }
        })
    }
}

/// Memoizing decision procedure bound to one knowledge base.
///
/// The vocabulary is fixed at construction (the knowledge base's atoms plus
/// any extra formulas, typically the query). Formulas outside it fall back
/// to the search procedure, so answers are exact either way.
pub struct Reasoner {
    settled: Vec<Formula>,
    grounds: Vec<Formula>,
    space: Option<TableSpace>,
    settled_table: Option<Table>,
    grounds_table: Option<Table>,
    cache: Mutex<HashMap<Formula, Arc<Table>>>,
}

impl Reasoner {
    pub fn new<'a>(kb: &KnowledgeBase, extra: impl IntoIterator<Item = &'a Formula>) -> Self {
        let settled = SettledBase::from_kb(kb).formulas;
        let mut grounds = settled.clone();
        grounds.extend(kb.facts().iter().cloned());

        let mut atoms = BTreeSet::new();
        for premise in kb.facts().iter().chain(kb.constraints()) {
            premise.collect_atoms(&mut atoms);
        }
        for c in kb.conditionals() {
            c.antecedent.collect_atoms(&mut atoms);
            c.consequent.collect_atoms(&mut atoms);
        }
        for f in extra {
            f.collect_atoms(&mut atoms);
        }
        let space = (atoms.len() <= TABLE_ATOM_LIMIT).then(|| TableSpace {
            rows: 1usize << atoms.len(),
            index: atoms.into_iter().enumerate().map(|(i, a)| (a, i)).collect(),
        });
        let conj = |fs: &[Formula]| {
            let space = space.as_ref()?;
            let mut t = space.constant(true);
            for f in fs {
                t.and_assign(&space.eval(f)?);
            }
            Some(t)
        };
        let settled_table = conj(&settled);
        let grounds_table = conj(&grounds);
        Reasoner {
            settled,
            grounds,
            space,
            settled_table,
            grounds_table,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn settled_base(&self) -> &[Formula] {
        &self.settled
    }

    fn table(&self, f: &Formula) -> Option<Arc<Table>> {
        let space = self.space.as_ref()?;
        if let Some(t) = self.cache.lock().expect("reasoner cache poisoned").get(f) {
            return Some(t.clone());
        }
        let t = Arc::new(space.eval(f)?);
        self.cache
            .lock()
            .expect("reasoner cache poisoned")
            .insert(f.clone(), t.clone());
        Some(t)
    }

    /// Conjunction of `base` and `extra` as a table, if every formula is in
    /// the vocabulary.
    fn conjunction<'a>(
        &self,
        base: Option<&Table>,
        extra: impl IntoIterator<Item = &'a Formula>,
    ) -> Option<Table> {
        let space = self.space.as_ref()?;
        let mut t = match base {
            Some(b) => b.clone(),
            None => space.constant(true),
        };
        for f in extra {
            let ft = self.table(f)?;
            t.and_assign(&ft);
        }
        Some(t)
    }

    fn entails_from<'a, I>(
        &self,
        base: &[Formula],
        base_table: Option<&Table>,
        extra: I,
        goal: &Formula,
    ) -> bool
    where
        I: IntoIterator<Item = &'a Formula> + Clone,
    {
        let with_base = base_table.is_some() || base.is_empty();
        if with_base {
            if let (Some(t), Some(g)) = (
                self.conjunction(base_table, extra.clone()),
                self.table(goal),
            ) {
                return t.and_not_is_zero(&g);
            }
        }
        let mut all: Vec<Formula> = base.to_vec();
        all.extend(extra.into_iter().cloned());
        cl_entails(&all, goal)
    }

    fn consistent_from<'a, I>(&self, base: &[Formula], base_table: Option<&Table>, extra: I) -> bool
    where
        I: IntoIterator<Item = &'a Formula> + Clone,
    {
        if base_table.is_some() || base.is_empty() {
            if let Some(t) = self.conjunction(base_table, extra.clone()) {
                return !t.is_zero();
            }
        }
        let mut all: Vec<Formula> = base.to_vec();
        all.extend(extra.into_iter().cloned());
        cl_consistent(&all)
    }

    /// Plain classical entailment.
    pub fn entails<'a, I>(&self, assumptions: I, goal: &Formula) -> bool
    where
        I: IntoIterator<Item = &'a Formula> + Clone,
    {
        self.entails_from(&[], None, assumptions, goal)
    }

    pub fn consistent<'a, I>(&self, formulas: I) -> bool
    where
        I: IntoIterator<Item = &'a Formula> + Clone,
    {
        self.consistent_from(&[], None, formulas)
    }

    /// `□goal` is derivable.
    pub fn settled_entails(&self, goal: &Formula) -> bool {
        self.settled_entails_with(std::iter::empty(), goal)
    }

    /// The settled base plus `extra` classically entails `goal`.
    pub fn settled_entails_with<'a, I>(&self, extra: I, goal: &Formula) -> bool
    where
        I: IntoIterator<Item = &'a Formula> + Clone,
    {
        self.entails_from(&self.settled, self.settled_table.as_ref(), extra, goal)
    }

    /// The settled base plus `extra` is satisfiable.
    pub fn settled_consistent<'a, I>(&self, extra: I) -> bool
    where
        I: IntoIterator<Item = &'a Formula> + Clone,
    {
        self.consistent_from(&self.settled, self.settled_table.as_ref(), extra)
    }

    /// The antecedent test for factual detachment.
    pub fn fact_entails(&self, goal: &Formula) -> bool {
        self.entails_from(
            &self.grounds,
            self.grounds_table.as_ref(),
            std::iter::empty(),
            goal,
        )
    }
}

impl std::fmt::Debug for Reasoner {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Reasoner")
            .field("settled", &self.settled)
            .field("tables", &self.space.is_some())
            .finish()
    }
}
