//! Attack relations between arguments for the four semantics variants.
//!
//! | variant  | edges                                              |
//! |----------|----------------------------------------------------|
//! | `Basic`  | fact attacks and conflict attacks                  |
//! | `Spec`   | fact attacks and specificity-filtered conflicts    |
//! | `Prio`   | fact attacks and priority-filtered conflicts       |
//! | `Shadow` | doubt attacks only                                 |
//!
//! Conflict-style attacks on an argument extend to all of its
//! superarguments; fact attacks do so automatically because unconditional
//! obligations are inherited upwards.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arguments::{combinations, ArgId, ArgumentUniverse, Conclusion};
use crate::dung::AbstractFramework;
use crate::entailment::Reasoner;
use crate::error::{DafError, Result};
use crate::formula::Formula;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttackKind {
    Fact,
    Conflict,
    Specificity,
    Prioritized,
    Shadow,
}

impl fmt::Display for AttackKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AttackKind::Fact => "fact",
            AttackKind::Conflict => "conflict",
            AttackKind::Specificity => "specificity",
            AttackKind::Prioritized => "prioritized",
            AttackKind::Shadow => "shadow",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SemanticsVariant {
    Basic,
    Spec,
    Prio,
    Shadow,
}

impl SemanticsVariant {
    pub const ALL: [SemanticsVariant; 4] = [
        SemanticsVariant::Basic,
        SemanticsVariant::Spec,
        SemanticsVariant::Prio,
        SemanticsVariant::Shadow,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SemanticsVariant::Basic => "basic",
            SemanticsVariant::Spec => "spec",
            SemanticsVariant::Prio => "prio",
            SemanticsVariant::Shadow => "shadow",
        }
    }

    /// Turnstile subscript used in verdict text.
    pub fn turnstile(self) -> &'static str {
        match self {
            SemanticsVariant::Basic => "DAF",
            SemanticsVariant::Spec => "DAF_s",
            SemanticsVariant::Prio => "DAF_<=",
            SemanticsVariant::Shadow => "DAF_(.)",
        }
    }
}

impl fmt::Display for SemanticsVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for SemanticsVariant {
    type Err = DafError;

    fn from_str(s: &str) -> Result<Self> {
        SemanticsVariant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| DafError::Config(format!("unknown semantics `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub from: ArgId,
    pub to: ArgId,
    pub kind: AttackKind,
}

/// Every attacker attacks every target.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AttackBundle {
    pub attackers: Vec<ArgId>,
    pub targets: Vec<ArgId>,
    pub kind: AttackKind,
}

#[derive(Debug, Clone)]
pub struct AttackGraph {
    universe: ArgumentUniverse,
    variant: SemanticsVariant,
    bundles: Vec<AttackBundle>,
    framework: AbstractFramework,
}

impl AttackGraph {
    pub fn universe(&self) -> &ArgumentUniverse {
        &self.universe
    }

    pub fn variant(&self) -> SemanticsVariant {
        self.variant
    }

    pub fn bundles(&self) -> &[AttackBundle] {
        &self.bundles
    }

    /// All attacks, sorted by attacker and then target. Expands the
    /// bundles, so this can be large.
    pub fn edges(&self) -> Vec<Edge> {
        let mut kinds: BTreeMap<(ArgId, ArgId), AttackKind> = BTreeMap::new();
        for b in &self.bundles {
            for &from in &b.attackers {
                for &to in &b.targets {
                    kinds.entry((from, to)).or_insert(b.kind);
                }
            }
        }
        kinds
            .into_iter()
            .map(|((from, to), kind)| Edge { from, to, kind })
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.framework.edge_count()
    }

    pub fn attacks(&self, from: ArgId, to: ArgId) -> bool {
        self.framework.attacks(from.index(), to.index())
    }

    pub fn attackers_of(&self, id: ArgId) -> Vec<ArgId> {
        self.framework
            .attackers_of(id.index())
            .into_iter()
            .map(ArgId)
            .collect()
    }

    pub fn framework(&self) -> &AbstractFramework {
        &self.framework
    }
}

/// Minimal nonempty `Θ ⊆ uo` with `□¬∧Θ` derivable, up to `max_size`
/// elements each. If the set is incoherent but no witness is that small,
/// a single deletion-minimal witness is returned instead.
pub fn minimal_witnesses(
    reasoner: &Reasoner,
    uo: &[Formula],
    max_size: usize,
) -> Vec<Vec<Formula>> {
    if reasoner.settled_consistent(uo.iter()) {
        return Vec::new();
    }
    let mut found: Vec<Vec<usize>> = Vec::new();
    for size in 1..=max_size.min(uo.len()) {
        for combo in combinations(uo.len(), size) {
            if found.iter().any(|w| w.iter().all(|i| combo.contains(i))) {
                continue;
            }
            if !reasoner.settled_consistent(combo.iter().map(|&i| &uo[i])) {
                found.push(combo);
            }
        }
    }
    if found.is_empty() {
        let mut keep: Vec<usize> = (0..uo.len()).collect();
        let mut i = 0;
        while i < keep.len() {
            let without: Vec<usize> = keep.iter().copied().filter(|&k| k != keep[i]).collect();
            if !reasoner.settled_consistent(without.iter().map(|&k| &uo[k])) {
                keep = without;
            } else {
                i += 1;
            }
        }
        found.push(keep);
    }
    found
        .into_iter()
        .map(|w| w.into_iter().map(|i| uo[i].clone()).collect())
        .collect()
}

/// Some minimal witness Θ if `id` is fact attacked.
pub fn fact_attacked(universe: &ArgumentUniverse, id: ArgId) -> Option<Vec<Formula>> {
    let arg = universe.get(id);
    if !arg.is_deontic() {
        return None;
    }
    minimal_witnesses(
        universe.reasoner(),
        arg.unconditional_obligations(),
        universe.config().max_doubt_theta,
    )
    .into_iter()
    .next()
}

/// Some `Θ ⊆ uo` has `∧Θ` equal to `target` as a set of conjuncts.
pub fn matches_conjunction(target: &Formula, uo: &[Formula]) -> bool {
    let wanted = target.conjuncts();
    let mut covered = BTreeSet::new();
    for theta in uo {
        let parts = theta.conjuncts();
        if parts.is_subset(&wanted) {
            covered.extend(parts);
        }
    }
    covered == wanted
}

/// `a` concludes `O−A` and `b` concludes `O A`.
pub fn conflict_attacks(universe: &ArgumentUniverse, a: ArgId, b: ArgId) -> bool {
    match (universe.get(a).conclusion(), universe.get(b).conclusion()) {
        (Conclusion::Ob(x), Conclusion::Ob(y)) => x.is_complement_of(y),
        _ => false,
    }
}

/// `S ⊑ T`: every member of `S` entails some member of `T` and every
/// member of `T` is entailed by some member of `S`.
pub fn support_leq(reasoner: &Reasoner, s: &[Formula], t: &[Formula]) -> bool {
    let entails = |x: &Formula, y: &Formula| reasoner.entails([x], y);
    s.iter().all(|a| t.iter().any(|b| entails(a, b)))
        && t.iter().all(|b| s.iter().any(|a| entails(a, b)))
}

/// `S ⊏ T`: `S` is strictly more specific.
pub fn more_specific(reasoner: &Reasoner, s: &[Formula], t: &[Formula]) -> bool {
    support_leq(reasoner, s, t) && !support_leq(reasoner, t, s)
}

pub fn specificity_attacks(universe: &ArgumentUniverse, a: ArgId, b: ArgId) -> bool {
    conflict_attacks(universe, a, b)
        && !more_specific(
            universe.reasoner(),
            universe.factual_support(b),
            universe.factual_support(a),
        )
}

/// Weakest-link strength. Arguments without conditionals are infinitely
/// strong.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Rank {
    Finite(u32),
    Infinite,
}

impl fmt::Display for Rank {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rank::Finite(n) => write!(f, "{n}"),
            Rank::Infinite => f.write_str("inf"),
        }
    }
}

pub fn priority_rank(universe: &ArgumentUniverse, id: ArgId) -> Result<Rank> {
    let conditionals = universe.kb().conditionals();
    let mut rank = Rank::Infinite;
    for c in universe.constituents(id) {
        if let crate::arguments::Constituent::Conditional(i) = c {
            let cond = &conditionals[*i];
            let p = cond.priority.ok_or_else(|| {
                DafError::validation(None, format!("missing priority on conditional `{cond}`"))
            })?;
            rank = rank.min(Rank::Finite(p));
        }
    }
    Ok(rank)
}

pub fn prioritized_attacks(universe: &ArgumentUniverse, a: ArgId, b: ArgId) -> Result<bool> {
    Ok(conflict_attacks(universe, a, b)
        && priority_rank(universe, a)? >= priority_rank(universe, b)?)
}

/// The deontic arguments with minimal support whose doubt `⊙F` casts
/// shadow on their deontic subarguments.
fn shadow_sources(universe: &ArgumentUniverse, doubted: &Formula) -> Vec<ArgId> {
    universe
        .ids()
        .filter(|&a| {
            let arg = universe.get(a);
            arg.is_deontic()
                && (arg.conclusion().formula() == doubted
                    || matches_conjunction(doubted, arg.unconditional_obligations()))
                && universe.has_minimal_support(a)
        })
        .collect()
}

pub fn shadow_attacks(universe: &ArgumentUniverse, d: ArgId, target: ArgId) -> bool {
    let Conclusion::Doubt(f) = universe.get(d).conclusion() else {
        return false;
    };
    shadow_sources(universe, f).into_iter().any(|a| {
        universe
            .subarguments(a)
            .into_iter()
            .any(|b| universe.get(b).is_deontic() && universe.is_subargument(b, target))
    })
}

struct Builder<'a> {
    universe: &'a ArgumentUniverse,
    bundles: Vec<AttackBundle>,
    upward: HashMap<ArgId, Vec<ArgId>>,
}

impl Builder<'_> {
    fn add(&mut self, attackers: Vec<ArgId>, targets: Vec<ArgId>, kind: AttackKind) {
        if !attackers.is_empty() && !targets.is_empty() {
            self.bundles.push(AttackBundle {
                attackers,
                targets,
                kind,
            });
        }
    }

    /// `ids` together with all their superarguments, sorted.
    fn upward_closure(&mut self, ids: impl IntoIterator<Item = ArgId>) -> Vec<ArgId> {
        let universe = self.universe;
        let mut marked = vec![false; universe.len()];
        for id in ids {
            if marked[id.index()] {
                continue;
            }
            let up = self.upward.entry(id).or_insert_with(|| {
                let mut up = universe.superarguments(id);
                up.push(id);
                up
            });
            for s in up.iter() {
                marked[s.index()] = true;
            }
        }
        (0..universe.len())
            .filter(|&i| marked[i])
            .map(ArgId)
            .collect()
    }
}

/// Computes the attack relation of `variant` over `universe`. The
/// universe must contain doubt arguments exactly when the variant is
/// `Shadow`.
pub fn build_attack_graph(
    universe: ArgumentUniverse,
    variant: SemanticsVariant,
) -> Result<AttackGraph> {
    if (variant == SemanticsVariant::Shadow) != universe.with_doubt() {
        return Err(DafError::Config(format!(
            "the {variant} variant needs a universe {} doubt arguments",
            if universe.with_doubt() {
                "without"
            } else {
                "with"
            }
        )));
    }
    if variant == SemanticsVariant::Prio {
        universe.kb().require_priorities()?;
    }
    let mut b = Builder {
        universe: &universe,
        bundles: Vec::new(),
        upward: HashMap::new(),
    };
    if variant == SemanticsVariant::Shadow {
        shadow_bundles(&mut b);
    } else {
        fact_bundles(&mut b);
        conflict_bundles(&mut b, variant)?;
    }
    let bundles = b.bundles;
    let mut framework = AbstractFramework::new(universe.len());
    for bundle in &bundles {
        framework.add_bundle(
            bundle.attackers.iter().map(|a| a.index()).collect(),
            bundle.targets.iter().map(|a| a.index()).collect(),
        );
    }
    Ok(AttackGraph {
        universe,
        variant,
        bundles,
        framework,
    })
}

fn deontic_by_conclusion(u: &ArgumentUniverse) -> BTreeMap<&Formula, Vec<ArgId>> {
    let mut out: BTreeMap<&Formula, Vec<ArgId>> = BTreeMap::new();
    for a in u.ids() {
        if let Conclusion::Ob(f) = u.get(a).conclusion() {
            out.entry(f).or_default().push(a);
        }
    }
    out
}

fn fact_bundles(b: &mut Builder<'_>) {
    let u = b.universe;
    let deontic: Vec<ArgId> = u.ids().filter(|&a| u.get(a).is_deontic()).collect();
    for leaf in u.ids().filter(|&a| u.get(a).conclusion().is_boxed()) {
        let violated = u.get(leaf).conclusion().formula().complement();
        let targets = deontic
            .iter()
            .copied()
            .filter(|&x| matches_conjunction(&violated, u.get(x).unconditional_obligations()))
            .collect();
        b.add(vec![leaf], targets, AttackKind::Fact);
    }
}

/// Conclusions `Y` with `O Y` in conflict with `O x`.
fn opposed(x: &Formula) -> Vec<Formula> {
    let mut out = vec![Formula::not(x.clone())];
    if let Formula::Not(inner) = x {
        out.push((**inner).clone());
    }
    out
}

fn conflict_bundles(b: &mut Builder<'_>, variant: SemanticsVariant) -> Result<()> {
    let u = b.universe;
    let by_conclusion = deontic_by_conclusion(u);
    let mut ranks: HashMap<ArgId, Rank> = HashMap::new();
    let mut rank = |a: ArgId| -> Result<Rank> {
        if let Some(r) = ranks.get(&a) {
            return Ok(*r);
        }
        let r = priority_rank(u, a)?;
        ranks.insert(a, r);
        Ok(r)
    };
    for (x, targets) in &by_conclusion {
        let attackers: Vec<ArgId> = opposed(x)
            .iter()
            .flat_map(|y| by_conclusion.get(y).into_iter().flatten().copied())
            .collect();
        if attackers.is_empty() {
            continue;
        }
        if variant == SemanticsVariant::Basic {
            let up = b.upward_closure(targets.iter().copied());
            b.add(attackers, up, AttackKind::Conflict);
            continue;
        }
        for &target in targets {
            let mut kept = Vec::new();
            for &c in &attackers {
                let attacks = match variant {
                    SemanticsVariant::Spec => !more_specific(
                        u.reasoner(),
                        u.factual_support(target),
                        u.factual_support(c),
                    ),
                    SemanticsVariant::Prio => rank(c)? >= rank(target)?,
                    _ => unreachable!("handled by the caller"),
                };
                if attacks {
                    kept.push(c);
                }
            }
            let kind = if variant == SemanticsVariant::Spec {
                AttackKind::Specificity
            } else {
                AttackKind::Prioritized
            };
            let up = b.upward_closure([target]);
            b.add(kept, up, kind);
        }
    }
    Ok(())
}

fn shadow_bundles(b: &mut Builder<'_>) {
    let u = b.universe;
    let mut doubts: BTreeMap<&Formula, Vec<ArgId>> = BTreeMap::new();
    for d in u.ids() {
        if let Conclusion::Doubt(f) = u.get(d).conclusion() {
            doubts.entry(f).or_default().push(d);
        }
    }
    let mut deontic_subs: HashMap<ArgId, Vec<ArgId>> = HashMap::new();
    for (f, attackers) in doubts {
        let mut shadowed: BTreeSet<ArgId> = BTreeSet::new();
        for a in shadow_sources(u, f) {
            let subs = deontic_subs.entry(a).or_insert_with(|| {
                u.subarguments(a)
                    .into_iter()
                    .filter(|&s| u.get(s).is_deontic())
                    .collect()
            });
            shadowed.extend(subs.iter().copied());
        }
        let up = b.upward_closure(shadowed);
        b.add(attackers, up, AttackKind::Shadow);
    }
}
