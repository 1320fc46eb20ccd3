//! Abstract argumentation frameworks under grounded semantics.
//!
//! Attacks are stored as bundles: every attacker of a bundle attacks every
//! target of it. Structured attack relations are highly regular (an attack
//! on an argument reaches all of its superarguments), so bundles keep large
//! frameworks small. Single edges are one-element bundles.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq)]
struct Bundle {
    attackers: Vec<usize>,
    targets: Vec<usize>,
}

/// Nodes are `0..len`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AbstractFramework {
    len: usize,
    bundles: Vec<Bundle>,
    /// Bundles targeting each node.
    incoming: Vec<Vec<usize>>,
}

impl AbstractFramework {
    pub fn new(len: usize) -> Self {
        AbstractFramework {
            len,
            bundles: Vec::new(),
            incoming: vec![Vec::new(); len],
        }
    }

    /// Panics if an edge mentions a node outside `0..len`.
    pub fn from_edges(len: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut af = AbstractFramework::new(len);
        for (a, b) in edges {
            af.add_attack(a, b);
        }
        af
    }

    pub fn add_attack(&mut self, attacker: usize, target: usize) {
        self.add_bundle(vec![attacker], vec![target]);
    }

    /// Every node of `attackers` attacks every node of `targets`.
    pub fn add_bundle(&mut self, mut attackers: Vec<usize>, mut targets: Vec<usize>) {
        attackers.sort_unstable();
        attackers.dedup();
        targets.sort_unstable();
        targets.dedup();
        if let Some(&bad) = attackers.iter().chain(&targets).find(|&&x| x >= self.len) {
            panic!("node {bad} outside a framework of {} nodes", self.len);
        }
        if attackers.is_empty() || targets.is_empty() {
            return;
        }
        let id = self.bundles.len();
        for &t in &targets {
            self.incoming[t].push(id);
        }
        self.bundles.push(Bundle { attackers, targets });
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// All attacks as ordered pairs.
    pub fn edges(&self) -> BTreeSet<(usize, usize)> {
        (0..self.len)
            .flat_map(|t| self.attackers_of(t).into_iter().map(move |a| (a, t)))
            .collect()
    }

    /// Number of distinct attacking pairs.
    pub fn edge_count(&self) -> usize {
        (0..self.len).map(|t| self.attackers_of(t).len()).sum()
    }

    pub fn attacks(&self, attacker: usize, target: usize) -> bool {
        self.incoming[target]
            .iter()
            .any(|&k| self.bundles[k].attackers.binary_search(&attacker).is_ok())
    }

    /// Sorted and without repetitions.
    pub fn attackers_of(&self, node: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.incoming[node]
            .iter()
            .flat_map(|&k| self.bundles[k].attackers.iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The subframework induced by `keep`, renumbered in ascending order.
    /// Returns the framework and the original id of each new node.
    pub fn restrict(&self, keep: &BTreeSet<usize>) -> (AbstractFramework, Vec<usize>) {
        let ids: Vec<usize> = keep.iter().copied().collect();
        let position = |x: usize| ids.binary_search(&x).ok();
        let mut af = AbstractFramework::new(ids.len());
        for b in &self.bundles {
            af.add_bundle(
                b.attackers.iter().filter_map(|&x| position(x)).collect(),
                b.targets.iter().filter_map(|&x| position(x)).collect(),
            );
        }
        (af, ids)
    }

    /// Nodes attacked by some member of `members`.
    fn hit_by(&self, members: &[bool]) -> Vec<bool> {
        let mut hit = vec![false; self.len];
        for b in &self.bundles {
            if b.attackers.iter().any(|&a| members[a]) {
                for &t in &b.targets {
                    hit[t] = true;
                }
            }
        }
        hit
    }

    /// Nodes all of whose attackers are attacked by `members`.
    fn defended_by(&self, members: &[bool]) -> Vec<bool> {
        let hit = self.hit_by(members);
        let covered: Vec<bool> = self
            .bundles
            .iter()
            .map(|b| b.attackers.iter().all(|&a| hit[a]))
            .collect();
        (0..self.len)
            .map(|t| self.incoming[t].iter().all(|&k| covered[k]))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtensionResult {
    pub grounded: BTreeSet<usize>,
    /// `G0, G1, ...` up to the first stage that repeats.
    pub stages: Vec<BTreeSet<usize>>,
    /// Index of the stage equal to its successor.
    pub fixpoint_round: usize,
}

/// Iterates "defended by the previous stage" from the unattacked nodes.
pub fn grounded_extension(af: &AbstractFramework) -> ExtensionResult {
    let mut current: Vec<bool> = (0..af.len()).map(|a| af.incoming[a].is_empty()).collect();
    let mut stages = vec![to_set(&current)];
    loop {
        let next = af.defended_by(&current);
        if next == current {
            break;
        }
        current = next;
        stages.push(to_set(&current));
    }
    ExtensionResult {
        grounded: to_set(&current),
        fixpoint_round: stages.len() - 1,
        stages,
    }
}

fn to_set(members: &[bool]) -> BTreeSet<usize> {
    members
        .iter()
        .enumerate()
        .filter(|(_, m)| **m)
        .map(|(i, _)| i)
        .collect()
}

fn membership(af: &AbstractFramework, set: &BTreeSet<usize>) -> Vec<bool> {
    let mut members = vec![false; af.len()];
    for &a in set {
        members[a] = true;
    }
    members
}

pub fn is_conflict_free(af: &AbstractFramework, set: &BTreeSet<usize>) -> bool {
    let members = membership(af, set);
    let hit = af.hit_by(&members);
    set.iter().all(|&a| !hit[a])
}

/// Every attacker of `node` is attacked by some member of `set`.
pub fn defends(af: &AbstractFramework, set: &BTreeSet<usize>, node: usize) -> bool {
    let hit = af.hit_by(&membership(af, set));
    af.attackers_of(node).iter().all(|&b| hit[b])
}

pub fn is_complete_extension(af: &AbstractFramework, set: &BTreeSet<usize>) -> bool {
    is_conflict_free(af, set) && to_set(&af.defended_by(&membership(af, set))) == *set
}
