//! JSON and Graphviz renderings of a solved attack graph.
//!
//! Both outputs are deterministic: arguments appear in id order, edges
//! sorted by attacker and target.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::arguments::{ArgId, Conclusion, Rule};
use crate::attacks::{AttackKind, Edge, SemanticsVariant};
use crate::consequence::Evaluation;
use crate::dung::{grounded_extension, AbstractFramework, ExtensionResult};
use crate::error::{DafError, Result};
use crate::formula::Formula;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArgumentRecord {
    pub id: ArgId,
    pub conclusion: Conclusion,
    pub rule: Rule,
    pub children: Vec<ArgId>,
    /// Rendered constituents.
    pub cs: Vec<String>,
    pub uo: Vec<Formula>,
    pub support: Vec<Formula>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDump {
    pub variant: SemanticsVariant,
    pub query: Option<Formula>,
    pub universe: Vec<ArgumentRecord>,
    pub edges: Vec<Edge>,
    pub grounded: Vec<ArgId>,
    pub stages: Vec<Vec<ArgId>>,
}

impl GraphDump {
    pub fn new(evaluation: &Evaluation) -> Self {
        let graph = &evaluation.graph;
        let u = graph.universe();
        let universe = u
            .arguments()
            .iter()
            .map(|a| ArgumentRecord {
                id: a.id(),
                conclusion: a.conclusion().clone(),
                rule: a.rule().clone(),
                children: a.children().to_vec(),
                cs: u.rendered_constituents(a.id()),
                uo: a.unconditional_obligations().to_vec(),
                support: a.factual_support().to_vec(),
            })
            .collect();
        GraphDump {
            variant: graph.variant(),
            query: u.query().cloned(),
            universe,
            edges: graph.edges(),
            grounded: ids(&evaluation.extension.grounded),
            stages: evaluation.extension.stages.iter().map(ids).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("dump serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| DafError::Config(format!("invalid graph dump: {e}")))
    }

    /// Recomputes the grounded extension from the dumped edges alone.
    pub fn solve(&self) -> Result<ExtensionResult> {
        let len = self.universe.len();
        if let Some(e) = self
            .edges
            .iter()
            .find(|e| e.from.index() >= len || e.to.index() >= len)
        {
            return Err(DafError::Config(format!(
                "edge {} -> {} leaves the universe",
                e.from, e.to
            )));
        }
        let af = AbstractFramework::from_edges(
            len,
            self.edges.iter().map(|e| (e.from.index(), e.to.index())),
        );
        Ok(grounded_extension(&af))
    }
}

fn ids(set: &BTreeSet<usize>) -> Vec<ArgId> {
    set.iter().map(|&i| ArgId(i)).collect()
}

fn edge_color(kind: AttackKind) -> &'static str {
    match kind {
        AttackKind::Fact => "blue",
        AttackKind::Conflict => "red",
        AttackKind::Specificity => "darkorange",
        AttackKind::Prioritized => "purple",
        AttackKind::Shadow => "gray40",
    }
}

fn quote(text: &str) -> String {
    let mut out = String::with_capacity(text.len() + 2);
    out.push('"');
    for c in text.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Graphviz source. Accepted arguments are filled; attacks are solid
/// arrows colored by kind; immediate subarguments are joined by dashed
/// undirected lines.
pub fn to_dot(dump: &GraphDump) -> String {
    let accepted: BTreeSet<ArgId> = dump.grounded.iter().copied().collect();
    let mut out = String::new();
    out.push_str("digraph daf {\n  rankdir=BT;\n  node [shape=box, fontname=\"monospace\"];\n");
    for a in &dump.universe {
        let label = quote(&format!("{}\n{}", a.id, a.conclusion));
        let fill = if accepted.contains(&a.id) {
            ", style=filled, fillcolor=palegreen"
        } else {
            ""
        };
        writeln!(out, "  {} [label={label}{fill}];", a.id).unwrap();
    }
    for a in &dump.universe {
        for child in &a.children {
            writeln!(
                out,
                "  {child} -> {} [style=dashed, dir=none, color=gray];",
                a.id
            )
            .unwrap();
        }
    }
    for e in &dump.edges {
        writeln!(
            out,
            "  {} -> {} [color={}, label={}];",
            e.from,
            e.to,
            edge_color(e.kind),
            e.kind
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}
