//! Consequence relations over bounded universes, and a direct decision
//! procedure for the basic variant.
//!
//! The fixpoint engine builds the argument universe and its attack graph
//! and looks for an accepted argument with the queried conclusion. The fast
//! engine never builds composite arguments. In the basic variant defence
//! only ever comes from unattacked constraint leaves, and the accepted set
//! is closed under subarguments, weakening and aggregation, so it suffices
//! to decide which detachment chains survive and then ask whether a
//! coherent set of survivors entails the query.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arguments::{enumerate_universe, ArgId, Conclusion, GenerationConfig};
use crate::attacks::{build_attack_graph, AttackGraph, SemanticsVariant};
use crate::dung::{grounded_extension, ExtensionResult};
use crate::entailment::Reasoner;
use crate::error::Result;
use crate::formula::{canonical_conjunction, canonical_order, Formula};
use crate::kb::{Conditional, KnowledgeBase, Premise};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    Fixpoint,
    FastBasic,
}

impl fmt::Display for Engine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Engine::Fixpoint => "fixpoint",
            Engine::FastBasic => "fast",
        })
    }
}

/// Sizes of what an engine built, with the bounds it ran under.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniverseStats {
    /// Arguments for the fixpoint engine, chains for the fast engine.
    pub arguments: usize,
    pub edges: usize,
    pub accepted: usize,
    pub max_aggregate_arity: usize,
    pub build_rounds: usize,
    pub hard_cap: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub id: ArgId,
    pub conclusion: Conclusion,
    pub proof: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub query: Formula,
    pub variant: SemanticsVariant,
    pub engine: Engine,
    pub derivable: bool,
    /// Present exactly when derivable by the fixpoint engine.
    pub witness: Option<Witness>,
    pub universe_stats: UniverseStats,
}

impl Verdict {
    /// Whether a negative answer may change under larger bounds.
    pub fn is_bounded(&self) -> bool {
        !self.derivable && self.engine == Engine::Fixpoint
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let turnstile = if self.derivable { "|-" } else { "|/-" };
        let goal = Conclusion::Ob(self.query.clone());
        write!(f, "G {turnstile}{} {goal}", self.variant.turnstile())?;
        if self.is_bounded() {
            f.write_str("  (within bounds)")?;
        }
        Ok(())
    }
}

/// A built universe, its attack graph and grounded extension.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub graph: AttackGraph,
    pub extension: ExtensionResult,
}

impl Evaluation {
    pub fn grounded(&self) -> Vec<ArgId> {
        self.extension.grounded.iter().map(|&i| ArgId(i)).collect()
    }

    pub fn is_accepted(&self, id: ArgId) -> bool {
        self.extension.grounded.contains(&id.index())
    }

    /// The first accepted argument concluding exactly `O query`.
    pub fn witness(&self, query: &Formula) -> Option<ArgId> {
        self.graph
            .universe()
            .with_conclusion(&Conclusion::Ob(query.clone()))
            .iter()
            .copied()
            .find(|&a| self.is_accepted(a))
    }

    pub fn stats(&self) -> UniverseStats {
        let config = self.graph.universe().config();
        UniverseStats {
            arguments: self.graph.universe().len(),
            edges: self.graph.edge_count(),
            accepted: self.extension.grounded.len(),
            max_aggregate_arity: config.max_aggregate_arity,
            build_rounds: config.build_rounds,
            hard_cap: config.hard_cap,
        }
    }

    pub fn verdict(&self, query: &Formula) -> Verdict {
        let universe = self.graph.universe();
        let witness = self.witness(query).map(|id| Witness {
            id,
            conclusion: universe.get(id).conclusion().clone(),
            proof: universe.proof_tree(id),
        });
        Verdict {
            query: query.clone(),
            variant: self.graph.variant(),
            engine: Engine::Fixpoint,
            derivable: witness.is_some(),
            witness,
            universe_stats: self.stats(),
        }
    }
}

/// Builds and solves the universe for `variant`, with `query` as an extra
/// weakening target.
pub fn evaluate(
    kb: &KnowledgeBase,
    variant: SemanticsVariant,
    query: Option<&Formula>,
    cfg: &GenerationConfig,
) -> Result<Evaluation> {
    if variant == SemanticsVariant::Prio {
        kb.require_priorities()?;
    }
    let universe = enumerate_universe(kb, cfg, query, variant == SemanticsVariant::Shadow)?;
    let graph = build_attack_graph(universe, variant)?;
    let extension = grounded_extension(graph.framework());
    Ok(Evaluation { graph, extension })
}

pub fn entails(
    kb: &KnowledgeBase,
    variant: SemanticsVariant,
    query: &Formula,
    cfg: &GenerationConfig,
) -> Result<Verdict> {
    Ok(evaluate(kb, variant, Some(query), cfg)?.verdict(query))
}

/// The grounded extension is reached after one defence step.
pub fn grounded_is_first_stage(extension: &ExtensionResult) -> bool {
    let first = extension.stages.get(1).unwrap_or(&extension.stages[0]);
    *first == extension.grounded
}

/// A detachment chain, possibly continued from a set of earlier chains
/// whose conclusions jointly entail a conditional's antecedent.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct Chain {
    conclusion: Formula,
    uo: BTreeSet<Formula>,
    uses: BTreeMap<usize, usize>,
}

impl Chain {
    fn detach(&self, index: usize, cond: &Conditional) -> Chain {
        let mut next = self.clone();
        next.conclusion = cond.consequent.clone();
        next.uo.insert(cond.consequent.clone());
        *next.uses.entry(index).or_default() += 1;
        next
    }
}

struct ChainSpace<'a> {
    reasoner: &'a Reasoner,
    chains: &'a [Chain],
}

impl ChainSpace<'_> {
    fn coherent(&self, ids: impl IntoIterator<Item = usize>) -> bool {
        let uo: BTreeSet<&Formula> = ids
            .into_iter()
            .flat_map(|i| self.chains[i].uo.iter())
            .collect();
        self.reasoner.settled_consistent(uo)
    }

    /// Inclusion-maximal subsets of `pool` whose joint obligations are
    /// coherent. Members of `pool` must be coherent on their own.
    /// The empty set is never returned: an empty set of obligations derives
    /// nothing, not even tautologies.
    fn maximal_coherent(&self, pool: &[usize]) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.grow(pool, 0, &mut Vec::new(), &mut out);
        out.retain(|m| !m.is_empty());
        out
    }

    fn grow(
        &self,
        pool: &[usize],
        from: usize,
        chosen: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let rest = &pool[from..];
        if rest.is_empty() || self.coherent(chosen.iter().chain(rest).copied()) {
            let all: Vec<usize> = chosen.iter().chain(rest).copied().collect();
            if !out
                .iter()
                .any(|m: &Vec<usize>| all.iter().all(|x| m.contains(x)))
            {
                out.retain(|m| !m.iter().all(|x| all.contains(x)));
                out.push(all);
            }
            return;
        }
        let next = pool[from];
        chosen.push(next);
        if self.coherent(chosen.iter().copied()) {
            self.grow(pool, from + 1, chosen, out);
        }
        chosen.pop();
        self.grow(pool, from + 1, chosen, out);
    }

    fn entailed_by_some(&self, sets: &[Vec<usize>], goal: &Formula) -> bool {
        sets.iter().any(|m| {
            self.reasoner
                .settled_entails_with(m.iter().map(|&i| &self.chains[i].conclusion), goal)
        })
    }
}

fn chain_closure(
    kb: &KnowledgeBase,
    seeds: Vec<Chain>,
    max_uses: usize,
    seen: &mut HashSet<Chain>,
) -> Vec<Chain> {
    let mut out = Vec::new();
    let mut stack = seeds;
    while let Some(chain) = stack.pop() {
        if !seen.insert(chain.clone()) {
            continue;
        }
        for (i, cond) in kb.conditionals().iter().enumerate() {
            if cond.antecedent == chain.conclusion
                && chain.uses.get(&i).copied().unwrap_or(0) < max_uses
            {
                stack.push(chain.detach(i, cond));
            }
        }
        out.push(chain);
    }
    out
}

fn build_chains(kb: &KnowledgeBase, reasoner: &Reasoner, cfg: &GenerationConfig) -> Vec<Chain> {
    let mut seen = HashSet::new();
    let seeds = kb
        .conditionals()
        .iter()
        .enumerate()
        .filter(|(_, c)| reasoner.fact_entails(&c.antecedent))
        .map(|(i, c)| Chain {
            conclusion: c.consequent.clone(),
            uo: BTreeSet::from([c.consequent.clone()]),
            uses: BTreeMap::from([(i, 1)]),
        })
        .collect();
    let mut chains = chain_closure(kb, seeds, cfg.max_conditional_uses, &mut seen);
    for _ in 1..cfg.build_rounds {
        let pool: Vec<usize> = (0..chains.len())
            .filter(|&i| reasoner.settled_consistent(chains[i].uo.iter()))
            .collect();
        let mut seeds = Vec::new();
        for size in 1..=cfg.max_aggregate_arity.min(pool.len()) {
            for combo in crate::arguments::combinations(pool.len(), size) {
                let parts: Vec<&Chain> = combo.iter().map(|&k| &chains[pool[k]]).collect();
                let mut base = Chain {
                    conclusion: Formula::Top,
                    uo: parts.iter().flat_map(|c| c.uo.iter().cloned()).collect(),
                    uses: BTreeMap::new(),
                };
                for part in &parts {
                    for (&i, &n) in &part.uses {
                        *base.uses.entry(i).or_default() += n;
                    }
                }
                if !reasoner.settled_consistent(base.uo.iter()) {
                    continue;
                }
                let conclusions: BTreeSet<&Formula> = parts.iter().map(|c| &c.conclusion).collect();
                let joint = canonical_conjunction(conclusions.iter().copied()).expect("nonempty");
                for (i, cond) in kb.conditionals().iter().enumerate() {
                    // A factually triggered conditional already starts a
                    // chain with fewer obligations.
                    if base.uses.get(&i).copied().unwrap_or(0) >= cfg.max_conditional_uses
                        || (size == 1 && parts[0].conclusion == cond.antecedent)
                        || reasoner.fact_entails(&cond.antecedent)
                        || !reasoner
                            .settled_entails_with(conclusions.iter().copied(), &cond.antecedent)
                    {
                        continue;
                    }
                    let mut from = base.clone();
                    if conclusions.len() > 1 {
                        from.uo.insert(joint.clone());
                    }
                    from.uo.insert(cond.antecedent.clone());
                    seeds.push(from.detach(i, cond));
                }
            }
        }
        chains.extend(chain_closure(
            kb,
            seeds,
            cfg.max_conditional_uses,
            &mut seen,
        ));
    }
    undominated(chains)
}

/// Drops chains whose conclusion another chain reaches with fewer
/// obligations. Such a chain is accepted only if the smaller one is, and
/// swapping it for the smaller one keeps any chain set coherent.
fn undominated(mut chains: Vec<Chain>) -> Vec<Chain> {
    chains.sort_by(|a, b| a.uo.len().cmp(&b.uo.len()).then_with(|| a.cmp(b)));
    let mut kept: Vec<Chain> = Vec::new();
    for c in chains {
        if !kept
            .iter()
            .any(|k| k.conclusion == c.conclusion && k.uo.is_subset(&c.uo))
        {
            kept.push(c);
        }
    }
    kept.sort();
    kept
}

/// Conclusions of the accepted chains of a knowledge base under the basic
/// variant.
#[derive(Debug)]
pub struct OutputBase {
    reasoner: Reasoner,
    chains: Vec<Chain>,
    accepted: Vec<usize>,
    maximal: Vec<Vec<usize>>,
}

impl OutputBase {
    pub fn conclusions(&self) -> BTreeSet<Formula> {
        self.accepted
            .iter()
            .map(|&i| self.chains[i].conclusion.clone())
            .collect()
    }

    /// Chains built and chains accepted.
    pub fn counts(&self) -> (usize, usize) {
        (self.chains.len(), self.accepted.len())
    }

    /// Some coherent set of accepted chains entails `goal`.
    pub fn derives(&self, goal: &Formula) -> bool {
        self.space().entailed_by_some(&self.maximal, goal)
    }

    fn space(&self) -> ChainSpace<'_> {
        ChainSpace {
            reasoner: &self.reasoner,
            chains: &self.chains,
        }
    }
}

impl fmt::Debug for ChainSpace<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChainSpace")
            .field("chains", &self.chains.len())
            .finish()
    }
}

fn build_output_base(
    kb: &KnowledgeBase,
    extra: Option<&Formula>,
    cfg: &GenerationConfig,
) -> Result<OutputBase> {
    cfg.validate()?;
    let reasoner = Reasoner::new(kb, extra);
    let chains = build_chains(kb, &reasoner, cfg);
    let space = ChainSpace {
        reasoner: &reasoner,
        chains: &chains,
    };
    let coherent: Vec<usize> = (0..chains.len()).filter(|&i| space.coherent([i])).collect();
    let blockers = space.maximal_coherent(&coherent);
    let accepted: Vec<usize> = coherent
        .iter()
        .copied()
        .filter(|&i| {
            chains[i]
                .uo
                .iter()
                .all(|x| !space.entailed_by_some(&blockers, &x.complement()))
        })
        .collect();
    let maximal = space.maximal_coherent(&accepted);
    Ok(OutputBase {
        reasoner,
        chains,
        accepted,
        maximal,
    })
}

pub fn output_base(kb: &KnowledgeBase, cfg: &GenerationConfig) -> Result<OutputBase> {
    build_output_base(kb, None, cfg)
}

pub fn entails_fast_basic(
    kb: &KnowledgeBase,
    query: &Formula,
    cfg: &GenerationConfig,
) -> Result<Verdict> {
    let base = build_output_base(kb, Some(query), cfg)?;
    let (arguments, accepted) = base.counts();
    Ok(Verdict {
        query: query.clone(),
        variant: SemanticsVariant::Basic,
        engine: Engine::FastBasic,
        derivable: base.derives(query),
        witness: None,
        universe_stats: UniverseStats {
            arguments,
            edges: 0,
            accepted,
            max_aggregate_arity: cfg.max_aggregate_arity,
            build_rounds: cfg.build_rounds,
            hard_cap: cfg.hard_cap,
        },
    })
}

/// Dispatches on `engine`; the fast engine only decides the basic variant.
pub fn entails_with(
    kb: &KnowledgeBase,
    variant: SemanticsVariant,
    engine: Engine,
    query: &Formula,
    cfg: &GenerationConfig,
) -> Result<Verdict> {
    match engine {
        Engine::Fixpoint => entails(kb, variant, query, cfg),
        Engine::FastBasic if variant == SemanticsVariant::Basic => {
            entails_fast_basic(kb, query, cfg)
        }
        Engine::FastBasic => Err(crate::DafError::Config(format!(
            "the fast engine only supports the basic variant, not {variant}"
        ))),
    }
}

/// Adds `⊤ ⇒ A` for each `A` in `delta`. In prioritized mode the new
/// conditionals get the highest priority already present.
pub fn extend_with_output<'a>(
    kb: &KnowledgeBase,
    delta: impl IntoIterator<Item = &'a Formula>,
) -> KnowledgeBase {
    extend_with_output_at(kb, delta, kb.max_priority())
}

/// As [`extend_with_output`] with an explicit priority for the added
/// conditionals.
pub fn extend_with_output_at<'a>(
    kb: &KnowledgeBase,
    delta: impl IntoIterator<Item = &'a Formula>,
    priority: Option<u32>,
) -> KnowledgeBase {
    let mut out = kb.clone();
    let mut delta: Vec<&Formula> = delta.into_iter().collect();
    delta.sort_by(|a, b| canonical_order(a, b));
    for a in delta {
        let mut cond = Conditional::new(Formula::Top, a.clone());
        if kb.is_fully_prioritized() {
            cond.priority = Some(priority.unwrap_or(1));
        }
        out.push(Premise::Conditional(cond));
    }
    out
}
