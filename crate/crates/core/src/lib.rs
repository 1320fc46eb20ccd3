//! Deontic argumentation: structured arguments over obligations, facts
//! and constraints, evaluated under grounded semantics.
//!
//! ```
//! use daf_core::{entails, parse_kb, parse_query, GenerationConfig, SemanticsVariant};
//!
//! let kb = parse_kb("fact p\nob p => q\nob q => r\nob r => ~p").unwrap();
//! let query = parse_query("O q").unwrap();
//! let cfg = GenerationConfig::default();
//! assert!(entails(&kb, SemanticsVariant::Basic, &query, &cfg).unwrap().derivable);
//! assert!(!entails(&kb, SemanticsVariant::Shadow, &query, &cfg).unwrap().derivable);
//! ```

pub mod arguments;
pub mod attacks;
pub mod consequence;
pub mod dung;
pub mod entailment;
pub mod error;
pub mod export;
pub mod formula;
pub mod kb;
pub mod parser;

pub use arguments::{
    enumerate_universe, ArgId, Argument, ArgumentUniverse, Conclusion, GenerationConfig, Rule,
    WeakenTargets,
};
pub use attacks::{build_attack_graph, AttackGraph, AttackKind, Edge, SemanticsVariant};
pub use consequence::{
    entails, entails_fast_basic, entails_with, evaluate, extend_with_output, output_base, Engine,
    Evaluation, OutputBase, Verdict,
};
pub use dung::{grounded_extension, AbstractFramework, ExtensionResult};
pub use error::{DafError, Result};
pub use export::{to_dot, GraphDump};
pub use formula::{Atom, Formula};
pub use kb::{
    parse_kb, parse_kb_with, parse_query, Conditional, KbOptions, KnowledgeBase, Premise,
};
pub use parser::parse_formula;
