//! Workbench for third- and fourth-order logic fragments over finite
//! structures: parsing, brute-force model checking, constructive translation
//! to second-order logic, and an equivalence-testing harness.

pub mod encode;
pub mod eval;
pub mod formula;
pub mod harness;
pub mod prenex;
pub mod relation_value;
pub mod structure;
pub mod textio;
pub mod translate;
pub mod types;
pub mod wellformed;

pub use formula::{Formula, Quantifier, SchemaInstance};
pub use relation_value::HORelation;
pub use structure::{FiniteStructure, Relation, Signature};
pub use types::{enumerate_patterns, EmptyPattern, RelationType, Variable};
