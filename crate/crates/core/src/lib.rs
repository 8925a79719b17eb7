//! Propositional abduction: explanations, facets, relevance and diverse
//! explanation pairs, with polynomial algorithms for tractable constraint
//! languages and an exhaustive oracle for everything else.

pub mod diverse;
pub mod engines;
pub mod error;
mod eval;
pub mod gen;
pub mod lattice;
pub mod model;
pub mod oracle;
pub mod par;
pub mod parse;
pub mod polyfacet;
pub mod propagate;
pub mod reduce;

pub use error::{Error, Fragment, Result};
pub use model::{
    distance, evaluate, AbductionInstance, Assignment, Atom, DivInstance, FacetInstance, Formula,
    InstanceBuilder, Relation, RelationKind, Var, VarSet, VarTable,
};
pub use par::ExecMode;
pub use parse::{parse_definitions, parse_instance, render, Parsed};
