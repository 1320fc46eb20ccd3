//! Structured arguments and the bounded argument universe.
//!
//! Arguments are proof trees built by seven rules: constraint leaves,
//! factual and deontic detachment, aggregation, weakening, and the two doubt
//! rules. Every argument caches its constituent set (all formulas used,
//! conclusion included), the unconditional obligations occurring in it, and
//! its factual support. Sub-argumenthood is inclusion of constituent sets.
//!
//! The full set of arguments is infinite because weakening accepts any
//! classical consequence. [`enumerate_universe`] builds a finite portion
//! controlled by [`GenerationConfig`].

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::attacks::minimal_witnesses;
use crate::entailment::Reasoner;
use crate::error::{DafError, Result};
use crate::formula::{canonical_conjunction, canonical_order, Formula};
use crate::kb::KnowledgeBase;
use crate::parser::parse_formula;

/// Which formulas deontic arguments are weakened to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WeakenTargets {
    /// The query and every conditional antecedent, together with their
    /// complements and the complements of every deontic conclusion not
    /// obtained by weakening. Recomputed before each weakening step.
    Auto,
    None,
    Explicit(Vec<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenerationConfig {
    pub max_aggregate_arity: usize,
    pub build_rounds: usize,
    pub weaken_targets: WeakenTargets,
    pub max_doubt_theta: usize,
    pub hard_cap: usize,
    pub max_conditional_uses: usize,
    /// Only weaken coherent arguments, and after the first round neither
    /// detach from nor aggregate incoherent ones. Incoherent arguments are
    /// still created, so each can be fact attacked or cast doubt.
    pub prune_incoherent: bool,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            max_aggregate_arity: 3,
            build_rounds: 2,
            weaken_targets: WeakenTargets::Auto,
            max_doubt_theta: 3,
            hard_cap: 100_000,
            max_conditional_uses: 1,
            prune_incoherent: true,
        }
    }
}

impl GenerationConfig {
    pub fn validate(&self) -> Result<()> {
        let bounds = [
            ("max_aggregate_arity", self.max_aggregate_arity),
            ("build_rounds", self.build_rounds),
            ("max_doubt_theta", self.max_doubt_theta),
            ("hard_cap", self.hard_cap),
            ("max_conditional_uses", self.max_conditional_uses),
        ];
        for (name, value) in bounds {
            if value == 0 {
                return Err(DafError::Config(format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }
}

/// Position of an argument in its universe. Displayed 1-based as `a<n>`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArgId(pub usize);

impl ArgId {
    pub fn index(self) -> usize {
        self.0
    }

    /// The 1-based number used in labels and serialized output.
    pub fn number(self) -> usize {
        self.0 + 1
    }

    pub fn from_number(n: usize) -> Option<ArgId> {
        n.checked_sub(1).map(ArgId)
    }
}

impl fmt::Display for ArgId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.number())
    }
}

impl fmt::Debug for ArgId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for ArgId {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u64(self.number() as u64)
    }
}

impl<'de> Deserialize<'de> for ArgId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let n = usize::deserialize(deserializer)?;
        ArgId::from_number(n).ok_or_else(|| serde::de::Error::custom("argument ids start at 1"))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Conclusion {
    Boxed(Formula),
    Ob(Formula),
    Doubt(Formula),
}

impl Conclusion {
    pub fn formula(&self) -> &Formula {
        match self {
            Conclusion::Boxed(f) | Conclusion::Ob(f) | Conclusion::Doubt(f) => f,
        }
    }

    pub fn is_deontic(&self) -> bool {
        matches!(self, Conclusion::Ob(_))
    }

    pub fn is_boxed(&self) -> bool {
        matches!(self, Conclusion::Boxed(_))
    }

    pub fn is_doubt(&self) -> bool {
        matches!(self, Conclusion::Doubt(_))
    }

    /// Parses the rendering produced by `Display`: `[] A`, `O A`, `(.) A`.
    pub fn parse(text: &str) -> Result<Conclusion> {
        let text = text.trim();
        let (make, rest): (fn(Formula) -> Conclusion, &str) =
            if let Some(rest) = text.strip_prefix("[]") {
                (Conclusion::Boxed, rest)
            } else if let Some(rest) = text.strip_prefix("(.)") {
                (Conclusion::Doubt, rest)
            } else if let Some(rest) = text
                .strip_prefix('O')
                .filter(|r| r.starts_with([' ', '(', '~', '!']))
            {
                (Conclusion::Ob, rest)
            } else {
                return Err(DafError::validation(
                    None,
                    format!("`{text}` is not a conclusion"),
                ));
            };
        Ok(make(parse_formula(rest)?))
    }

    fn prefix(&self) -> &'static str {
        match self {
            Conclusion::Boxed(_) => "[]",
            Conclusion::Ob(_) => "O",
            Conclusion::Doubt(_) => "(.)",
        }
    }
}

/// Writes `prefix` and `body`, parenthesizing binary bodies.
fn write_prefixed(f: &mut fmt::Formatter<'_>, prefix: &str, body: &Formula) -> fmt::Result {
    match body {
        Formula::And(..) | Formula::Or(..) => write!(f, "{prefix} ({body})"),
        _ => write!(f, "{prefix} {body}"),
    }
}

impl fmt::Display for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_prefixed(f, self.prefix(), self.formula())
    }
}

impl fmt::Debug for Conclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for Conclusion {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Conclusion {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        Conclusion::parse(&text).map_err(serde::de::Error::custom)
    }
}

/// A formula used in building an argument. Conditionals are referenced by
/// their index in the knowledge base.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Constituent {
    Prop(Formula),
    Boxed(Formula),
    Conditional(usize),
    Ob(Formula),
    Doubt(Formula),
}

impl From<&Conclusion> for Constituent {
    fn from(c: &Conclusion) -> Self {
        match c {
            Conclusion::Boxed(f) => Constituent::Boxed(f.clone()),
            Conclusion::Ob(f) => Constituent::Ob(f.clone()),
            Conclusion::Doubt(f) => Constituent::Doubt(f.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Rule {
    ConstraintLeaf,
    FactualDetach {
        antecedent: Formula,
        conditional: usize,
    },
    DeonticDetach {
        conditional: usize,
    },
    Aggregate,
    Weaken {
        target: Formula,
    },
    DoubtFromConstraint,
    DoubtFromDeontic,
}

impl Rule {
    pub fn name(&self) -> &'static str {
        match self {
            Rule::ConstraintLeaf => "constraint",
            Rule::FactualDetach { .. } => "factual detachment",
            Rule::DeonticDetach { .. } => "deontic detachment",
            Rule::Aggregate => "aggregation",
            Rule::Weaken { .. } => "weakening",
            Rule::DoubtFromConstraint | Rule::DoubtFromDeontic => "doubt",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Argument {
    id: ArgId,
    conclusion: Conclusion,
    rule: Rule,
    children: Vec<ArgId>,
    cs: Vec<u32>,
    uo: Vec<Formula>,
    support: Vec<Formula>,
    uses: Vec<(usize, usize)>,
    coherent: bool,
}

impl Argument {
    pub fn id(&self) -> ArgId {
        self.id
    }

    pub fn conclusion(&self) -> &Conclusion {
        &self.conclusion
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    pub fn children(&self) -> &[ArgId] {
        &self.children
    }

    pub fn is_deontic(&self) -> bool {
        self.conclusion.is_deontic()
    }

    /// `{B : O B is a constituent}` in canonical order.
    pub fn unconditional_obligations(&self) -> &[Formula] {
        &self.uo
    }

    /// The propositional constituents in canonical order.
    pub fn factual_support(&self) -> &[Formula] {
        &self.support
    }

    /// The settled base together with the unconditional obligations is
    /// satisfiable.
    pub fn is_coherent(&self) -> bool {
        self.coherent
    }

    /// How often conditional `index` occurs in the proof tree.
    pub fn uses_of(&self, index: usize) -> usize {
        self.uses
            .binary_search_by_key(&index, |(i, _)| *i)
            .map(|pos| self.uses[pos].1)
            .unwrap_or(0)
    }
}

/// A finite, subargument-closed set of arguments without duplicates.
#[derive(Debug, Clone)]
pub struct ArgumentUniverse {
    kb: KnowledgeBase,
    config: GenerationConfig,
    query: Option<Formula>,
    with_doubt: bool,
    reasoner: Arc<Reasoner>,
    args: Vec<Argument>,
    constituents: Vec<Constituent>,
    interned: HashMap<Constituent, u32>,
    dedup: HashMap<(Conclusion, Vec<u32>), ArgId>,
    postings: Vec<Vec<ArgId>>,
    by_conclusion: HashMap<Conclusion, Vec<ArgId>>,
}

/// Builds the bounded universe for `kb`.
///
/// Constraint leaves come first, then `build_rounds` rounds of detachment
/// closure, aggregation and weakening (factual detachment in the first
/// round only). Leaves for minimal fact-attack witnesses are added at the
/// end, followed by doubt arguments when `with_doubt` is set.
pub fn enumerate_universe(
    kb: &KnowledgeBase,
    config: &GenerationConfig,
    query: Option<&Formula>,
    with_doubt: bool,
) -> Result<ArgumentUniverse> {
    config.validate()?;
    kb.validate()?;
    let mut u = ArgumentUniverse::new(kb.clone(), config.clone(), query.cloned(), with_doubt);
    for body in kb.constraints() {
        u.constraint_leaf(body)?;
    }
    let prune = config.prune_incoherent;
    for round in 1..=config.build_rounds {
        if round == 1 {
            for i in 0..kb.conditionals().len() {
                u.factual_detach(i)?;
            }
        }
        u.detach_closure(prune && round > 1)?;
        u.aggregate_step(prune && round > 1)?;
        u.weaken_step(prune)?;
    }
    u.fact_attack_leaves()?;
    if with_doubt {
        u.doubt_step()?;
    }
    Ok(u)
}

impl ArgumentUniverse {
    /// An empty universe; arguments are added with the rule methods.
    pub fn new(
        kb: KnowledgeBase,
        config: GenerationConfig,
        query: Option<Formula>,
        with_doubt: bool,
    ) -> Self {
        let reasoner = Arc::new(Reasoner::new(&kb, query.iter()));
        ArgumentUniverse {
            kb,
            config,
            query,
            with_doubt,
            reasoner,
            args: Vec::new(),
            constituents: Vec::new(),
            interned: HashMap::new(),
            dedup: HashMap::new(),
            postings: Vec::new(),
            by_conclusion: HashMap::new(),
        }
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn config(&self) -> &GenerationConfig {
        &self.config
    }

    pub fn query(&self) -> Option<&Formula> {
        self.query.as_ref()
    }

    pub fn with_doubt(&self) -> bool {
        self.with_doubt
    }

    pub fn reasoner(&self) -> &Reasoner {
        &self.reasoner
    }

    pub fn len(&self) -> usize {
        self.args.len()
    }

    pub fn is_empty(&self) -> bool {
        self.args.is_empty()
    }

    pub fn arguments(&self) -> &[Argument] {
        &self.args
    }

    pub fn ids(&self) -> impl Iterator<Item = ArgId> + '_ {
        (0..self.args.len()).map(ArgId)
    }

    pub fn get(&self, id: ArgId) -> &Argument {
        &self.args[id.0]
    }

    /// Arguments with exactly this conclusion, in id order.
    pub fn with_conclusion(&self, conclusion: &Conclusion) -> &[ArgId] {
        self.by_conclusion
            .get(conclusion)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn constituents(&self, id: ArgId) -> Vec<&Constituent> {
        self.get(id)
            .cs
            .iter()
            .map(|&c| &self.constituents[c as usize])
            .collect()
    }

    /// Constituents rendered as text, sorted.
    pub fn rendered_constituents(&self, id: ArgId) -> Vec<String> {
        let mut out: Vec<String> = self
            .constituents(id)
            .into_iter()
            .map(|c| self.render(c))
            .collect();
        out.sort();
        out
    }

    pub fn render(&self, c: &Constituent) -> String {
        struct Prefixed<'a>(&'a str, &'a Formula);
        impl fmt::Display for Prefixed<'_> {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write_prefixed(f, self.0, self.1)
            }
        }
        match c {
            Constituent::Prop(f) => f.to_string(),
            Constituent::Boxed(f) => Prefixed("[]", f).to_string(),
            Constituent::Conditional(i) => self.kb.conditionals()[*i].to_string(),
            Constituent::Ob(f) => Prefixed("O", f).to_string(),
            Constituent::Doubt(f) => Prefixed("(.)", f).to_string(),
        }
    }

    pub fn unconditional_obligations(&self, id: ArgId) -> &[Formula] {
        self.get(id).unconditional_obligations()
    }

    pub fn factual_support(&self, id: ArgId) -> &[Formula] {
        self.get(id).factual_support()
    }

    /// `a` is a sub-argument of `b`: `Cs(a) ⊆ Cs(b)`.
    pub fn is_subargument(&self, a: ArgId, b: ArgId) -> bool {
        is_sorted_subset(&self.get(a).cs, &self.get(b).cs)
    }

    pub fn is_proper_subargument(&self, a: ArgId, b: ArgId) -> bool {
        self.get(a).cs.len() < self.get(b).cs.len() && self.is_subargument(a, b)
    }

    /// All members whose constituents include those of `id`, excluding
    /// `id` and arguments with the same constituent set.
    pub fn superarguments(&self, id: ArgId) -> Vec<ArgId> {
        let cs = &self.get(id).cs;
        let Some(rarest) = cs.iter().min_by_key(|&&c| self.postings[c as usize].len()) else {
            return Vec::new();
        };
        self.postings[*rarest as usize]
            .iter()
            .copied()
            .filter(|&b| self.get(b).cs.len() > cs.len() && is_sorted_subset(cs, &self.get(b).cs))
            .collect()
    }

    /// All members whose constituents are included in those of `id`,
    /// `id` itself included.
    pub fn subarguments(&self, id: ArgId) -> Vec<ArgId> {
        let arg = self.get(id);
        let mut out: Vec<ArgId> = arg
            .cs
            .iter()
            .filter_map(|&c| match &self.constituents[c as usize] {
                Constituent::Ob(f) => self.by_conclusion.get(&Conclusion::Ob(f.clone())),
                Constituent::Boxed(f) => self.by_conclusion.get(&Conclusion::Boxed(f.clone())),
                Constituent::Doubt(f) => self.by_conclusion.get(&Conclusion::Doubt(f.clone())),
                _ => None,
            })
            .flatten()
            .copied()
            .filter(|&b| is_sorted_subset(&self.get(b).cs, &arg.cs))
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// The factual-detachment arguments inside `id`.
    pub fn base(&self, id: ArgId) -> BTreeSet<ArgId> {
        let mut out = BTreeSet::new();
        let mut stack = vec![id];
        while let Some(a) = stack.pop() {
            let arg = self.get(a);
            if matches!(arg.rule, Rule::FactualDetach { .. }) {
                out.insert(a);
            }
            stack.extend(arg.children.iter().copied());
        }
        out
    }

    /// No member with the same conclusion has strictly fewer constituents
    /// in the inclusion sense.
    pub fn has_minimal_support(&self, id: ArgId) -> bool {
        let arg = self.get(id);
        self.with_conclusion(&arg.conclusion).iter().all(|&b| {
            b == id
                || !(self.get(b).cs.len() < arg.cs.len()
                    && is_sorted_subset(&self.get(b).cs, &arg.cs))
        })
    }

    /// Multi-line rendering of the proof tree below `id`.
    pub fn proof_tree(&self, id: ArgId) -> String {
        let mut out = String::new();
        self.write_tree(id, 0, &mut out);
        out
    }

    fn write_tree(&self, id: ArgId, depth: usize, out: &mut String) {
        let arg = self.get(id);
        let detail = match &arg.rule {
            Rule::FactualDetach {
                antecedent,
                conditional,
            } => {
                format!(
                    "{}: {}, {}",
                    arg.rule.name(),
                    antecedent,
                    self.kb.conditionals()[*conditional]
                )
            }
            Rule::DeonticDetach { conditional } => {
                format!(
                    "{}: {}",
                    arg.rule.name(),
                    self.kb.conditionals()[*conditional]
                )
            }
            Rule::Weaken { .. } => {
                let child = self.get(arg.children[0]).conclusion.formula();
                let link = Formula::implies(child.clone(), arg.conclusion.formula().clone());
                format!(
                    "{}: {}",
                    arg.rule.name(),
                    self.render(&Constituent::Boxed(link))
                )
            }
            rule => rule.name().to_string(),
        };
        out.push_str(&format!(
            "{}{}: {}  [{}]\n",
            "  ".repeat(depth),
            id,
            arg.conclusion,
            detail
        ));
        for &child in &arg.children {
            self.write_tree(child, depth + 1, out);
        }
    }

    fn intern(&mut self, c: Constituent) -> u32 {
        if let Some(&id) = self.interned.get(&c) {
            return id;
        }
        let id = self.constituents.len() as u32;
        self.constituents.push(c.clone());
        self.interned.insert(c, id);
        self.postings.push(Vec::new());
        id
    }

    fn insert(
        &mut self,
        conclusion: Conclusion,
        rule: Rule,
        children: Vec<ArgId>,
        own: Vec<Constituent>,
    ) -> Result<ArgId> {
        let mut cs: Vec<u32> = children
            .iter()
            .flat_map(|&c| self.get(c).cs.iter().copied())
            .collect();
        for c in own.into_iter().chain([Constituent::from(&conclusion)]) {
            cs.push(self.intern(c));
        }
        cs.sort_unstable();
        cs.dedup();
        let key = (conclusion, cs);
        if let Some(&id) = self.dedup.get(&key) {
            return Ok(id);
        }
        if self.args.len() >= self.config.hard_cap {
            return Err(DafError::BoundExceeded {
                cap: self.config.hard_cap,
            });
        }
        let (conclusion, cs) = key;
        let mut uo = Vec::new();
        let mut support = Vec::new();
        for &c in &cs {
            match &self.constituents[c as usize] {
                Constituent::Ob(f) => uo.push(f.clone()),
                Constituent::Prop(f) => support.push(f.clone()),
                _ => {}
            }
        }
        uo.sort_by(canonical_order);
        support.sort_by(canonical_order);

        let mut uses: BTreeMap<usize, usize> = BTreeMap::new();
        for &child in &children {
            for &(i, n) in &self.get(child).uses {
                *uses.entry(i).or_default() += n;
            }
        }
        if let Rule::FactualDetach { conditional, .. } | Rule::DeonticDetach { conditional } = &rule
        {
            *uses.entry(*conditional).or_default() += 1;
        }
        let coherent = match &rule {
            Rule::ConstraintLeaf => true,
            Rule::DoubtFromConstraint | Rule::DoubtFromDeontic => self.get(children[0]).coherent,
            _ => self.reasoner.settled_consistent(uo.iter()),
        };

        let id = ArgId(self.args.len());
        for &c in &cs {
            self.postings[c as usize].push(id);
        }
        self.by_conclusion
            .entry(conclusion.clone())
            .or_default()
            .push(id);
        self.dedup.insert((conclusion.clone(), cs.clone()), id);
        self.args.push(Argument {
            id,
            conclusion,
            rule,
            children,
            cs,
            uo,
            support,
            uses: uses.into_iter().collect(),
            coherent,
        });
        Ok(id)
    }

    /// `⟨□A: --⟩`, provided `□A` is derivable.
    pub fn constraint_leaf(&mut self, body: &Formula) -> Result<Option<ArgId>> {
        if !self.reasoner.settled_entails(body) {
            return Ok(None);
        }
        self.insert(
            Conclusion::Boxed(body.clone()),
            Rule::ConstraintLeaf,
            vec![],
            vec![],
        )
        .map(Some)
    }

    /// `⟨O B: A, A ⇒ B⟩` for conditional `index`, provided `A` follows from
    /// the facts and the settled base.
    pub fn factual_detach(&mut self, index: usize) -> Result<Option<ArgId>> {
        let cond = self.kb.conditionals()[index].clone();
        if !self.reasoner.fact_entails(&cond.antecedent) {
            return Ok(None);
        }
        self.insert(
            Conclusion::Ob(cond.consequent),
            Rule::FactualDetach {
                antecedent: cond.antecedent.clone(),
                conditional: index,
            },
            vec![],
            vec![
                Constituent::Prop(cond.antecedent),
                Constituent::Conditional(index),
            ],
        )
        .map(Some)
    }

    /// `⟨O B: a, A ⇒ B⟩` where `a` concludes exactly `O A`.
    pub fn deontic_detach(&mut self, child: ArgId, index: usize) -> Result<Option<ArgId>> {
        let cond = self.kb.conditionals()[index].clone();
        let arg = self.get(child);
        if arg.conclusion != Conclusion::Ob(cond.antecedent.clone())
            || arg.uses_of(index) >= self.config.max_conditional_uses
        {
            return Ok(None);
        }
        self.insert(
            Conclusion::Ob(cond.consequent),
            Rule::DeonticDetach { conditional: index },
            vec![child],
            vec![Constituent::Conditional(index)],
        )
        .map(Some)
    }

    /// Aggregates deontic arguments. Aggregates among `parts` are
    /// flattened into their children; the result concludes the canonical
    /// conjunction and has its children in canonical order. Returns `None`
    /// unless at least two distinct conclusions remain.
    pub fn aggregate(&mut self, parts: &[ArgId]) -> Result<Option<ArgId>> {
        let mut flat: Vec<ArgId> = Vec::new();
        for &p in parts {
            let arg = self.get(p);
            if !arg.is_deontic() {
                return Ok(None);
            }
            match arg.rule {
                Rule::Aggregate => flat.extend(arg.children.iter().copied()),
                _ => flat.push(p),
            }
        }
        flat.sort();
        flat.dedup();
        flat.sort_by(|&a, &b| {
            canonical_order(
                self.get(a).conclusion.formula(),
                self.get(b).conclusion.formula(),
            )
            .then(a.cmp(&b))
        });
        let conclusions: BTreeSet<&Formula> = flat
            .iter()
            .map(|&a| self.get(a).conclusion.formula())
            .collect();
        if conclusions.len() < 2 || conclusions.len() < flat.len() {
            return Ok(None);
        }
        let conj = canonical_conjunction(conclusions.into_iter()).expect("nonempty");
        self.insert(Conclusion::Ob(conj), Rule::Aggregate, flat, vec![])
            .map(Some)
    }

    /// `⟨O T: a, □(A ⊃ T)⟩` where `a` concludes `O A`, provided the box is
    /// derivable.
    pub fn weaken(&mut self, child: ArgId, target: &Formula) -> Result<Option<ArgId>> {
        let arg = self.get(child);
        let Conclusion::Ob(from) = &arg.conclusion else {
            return Ok(None);
        };
        if from == target || !self.reasoner.settled_entails_with([from], target) {
            return Ok(None);
        }
        let link = Formula::implies(from.clone(), target.clone());
        self.insert(
            Conclusion::Ob(target.clone()),
            Rule::Weaken {
                target: target.clone(),
            },
            vec![child],
            vec![Constituent::Boxed(link)],
        )
        .map(Some)
    }

    /// `⟨⊙−A: a⟩` for a constraint leaf or deontic argument concluding
    /// `□A` or `O A`.
    pub fn doubt(&mut self, child: ArgId) -> Result<Option<ArgId>> {
        let arg = self.get(child);
        let rule = match (&arg.conclusion, &arg.rule) {
            (Conclusion::Boxed(_), Rule::ConstraintLeaf) => Rule::DoubtFromConstraint,
            (Conclusion::Ob(_), _) => Rule::DoubtFromDeontic,
            _ => return Ok(None),
        };
        let conclusion = Conclusion::Doubt(arg.conclusion.formula().complement());
        self.insert(conclusion, rule, vec![child], vec![]).map(Some)
    }

    fn deontic_ids(&self) -> Vec<ArgId> {
        self.ids().filter(|&a| self.get(a).is_deontic()).collect()
    }

    fn detach_closure(&mut self, prune: bool) -> Result<()> {
        let mut by_antecedent: HashMap<Formula, Vec<usize>> = HashMap::new();
        for (i, c) in self.kb.conditionals().iter().enumerate() {
            by_antecedent
                .entry(c.antecedent.clone())
                .or_default()
                .push(i);
        }
        let mut next = 0;
        while next < self.args.len() {
            let id = ArgId(next);
            next += 1;
            let arg = self.get(id);
            if prune && !arg.coherent {
                continue;
            }
            let Conclusion::Ob(f) = &arg.conclusion else {
                continue;
            };
            let Some(conds) = by_antecedent.get(f) else {
                continue;
            };
            for &i in &conds.clone() {
                self.deontic_detach(id, i)?;
            }
        }
        Ok(())
    }

    /// Aggregates detachment arguments only. An aggregate of weakenings
    /// concludes nothing that weakening the aggregate of their children
    /// would not.
    fn aggregate_step(&mut self, prune: bool) -> Result<()> {
        let parts: Vec<ArgId> = self
            .deontic_ids()
            .into_iter()
            .filter(|&a| {
                let arg = self.get(a);
                matches!(
                    arg.rule,
                    Rule::FactualDetach { .. } | Rule::DeonticDetach { .. }
                ) && (!prune || arg.coherent)
            })
            .collect();
        let arity = self.config.max_aggregate_arity.min(parts.len());
        // Extend combinations one part at a time, dropping jointly
        // incoherent prefixes when pruning.
        let mut frontier: Vec<Vec<usize>> = (0..parts.len()).map(|i| vec![i]).collect();
        for _ in 2..=arity {
            let mut grown = Vec::new();
            for combo in &frontier {
                let last = *combo.last().expect("nonempty");
                for j in last + 1..parts.len() {
                    let mut c = combo.clone();
                    c.push(j);
                    let ids: Vec<ArgId> = c.iter().map(|&k| parts[k]).collect();
                    if prune && !self.jointly_coherent(&ids) {
                        continue;
                    }
                    self.aggregate(&ids)?;
                    grown.push(c);
                }
            }
            frontier = grown;
        }
        Ok(())
    }

    fn jointly_coherent(&self, ids: &[ArgId]) -> bool {
        let uo: BTreeSet<&Formula> = ids.iter().flat_map(|&a| self.get(a).uo.iter()).collect();
        self.reasoner.settled_consistent(uo)
    }

    /// Weakening targets for the current state of the universe.
    pub fn weaken_targets(&self) -> Vec<Formula> {
        let mut targets: BTreeSet<Formula> = BTreeSet::new();
        match &self.config.weaken_targets {
            WeakenTargets::None => return Vec::new(),
            WeakenTargets::Explicit(list) => targets.extend(list.iter().cloned()),
            WeakenTargets::Auto => {
                let mut opposed: Vec<&Formula> = self
                    .kb
                    .conditionals()
                    .iter()
                    .map(|c| &c.antecedent)
                    .collect();
                opposed.extend(self.query.iter());
                for arg in &self.args {
                    if let (Conclusion::Ob(f), false) =
                        (&arg.conclusion, matches!(arg.rule, Rule::Weaken { .. }))
                    {
                        opposed.push(f);
                    }
                }
                for f in opposed {
                    targets.insert(Formula::not(f.clone()));
                    if let Formula::Not(inner) = f {
                        targets.insert((**inner).clone());
                    }
                }
                targets.extend(self.kb.conditionals().iter().map(|c| c.antecedent.clone()));
            }
        }
        targets.extend(self.query.iter().cloned());
        targets.remove(&Formula::Top);
        let mut out: Vec<Formula> = targets.into_iter().collect();
        out.sort_by(canonical_order);
        out
    }

    fn weaken_step(&mut self, prune: bool) -> Result<()> {
        let targets = self.weaken_targets();
        for id in self.deontic_ids() {
            let arg = self.get(id);
            if matches!(arg.rule, Rule::Weaken { .. }) || (prune && !arg.coherent) {
                continue;
            }
            for t in &targets {
                self.weaken(id, t)?;
            }
        }
        Ok(())
    }

    /// Adds `⟨□−∧Θ: --⟩` for the minimal fact-attack witnesses Θ of every
    /// incoherent deontic argument.
    fn fact_attack_leaves(&mut self) -> Result<()> {
        let mut seen: BTreeSet<Vec<Formula>> = BTreeSet::new();
        for id in self.deontic_ids() {
            let arg = self.get(id);
            if arg.coherent || !seen.insert(arg.uo.clone()) {
                continue;
            }
            let witnesses = minimal_witnesses(&self.reasoner, &arg.uo, self.config.max_doubt_theta);
            for theta in witnesses {
                let body = canonical_conjunction(theta.iter())
                    .expect("witnesses are nonempty")
                    .complement();
                self.constraint_leaf(&body)?;
            }
        }
        Ok(())
    }

    fn doubt_step(&mut self) -> Result<()> {
        let sources: Vec<ArgId> = self
            .ids()
            .filter(|&a| {
                let arg = self.get(a);
                arg.is_deontic() || arg.rule == Rule::ConstraintLeaf
            })
            .collect();
        for id in sources {
            self.doubt(id)?;
        }
        Ok(())
    }
}

fn is_sorted_subset(small: &[u32], large: &[u32]) -> bool {
    if small.len() > large.len() {
        return false;
    }
    let mut it = large.iter();
    'outer: for x in small {
        for y in it.by_ref() {
            if y == x {
                continue 'outer;
            }
            if y > x {
                return false;
            }
        }
        return false;
    }
    true
}

/// All `k`-element index subsets of `0..n` in lexicographic order.
pub(crate) fn combinations(n: usize, k: usize) -> impl Iterator<Item = Vec<usize>> {
    let mut current: Option<Vec<usize>> = (k <= n).then(|| (0..k).collect());
    std::iter::from_fn(move || {
        let out = current.clone()?;
        let next = current.as_mut().expect("checked above");
        let mut i = k;
        loop {
            if i == 0 {
                current = None;
                break;
            }
            i -= 1;
            if next[i] < n - k + i {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    })
}
