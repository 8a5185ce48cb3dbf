//! Identification of causal effects in semi-Markovian causal diagrams.
//!
//! The crate is `no_std` (it needs `alloc`) and purely algorithmic:
//!
//! - [`graph`]: diagrams with directed and bidirected (confounder) edges,
//!   ancestor closures, induced subgraphs, edge mutilation and a
//!   deterministic topological ordering.
//! - [`dsep`]: d-separation and the applicability of the three do-calculus rules.
//! - [`ccomp`]: maximal C-component decomposition, C-forests and hedge checks.
//! - [`expr`]: the symbolic probability expression AST and its rewrites.
//! - [`ident`]: the recursive identification procedure for `P_x(y)` and
//!   its conditional extension `P_x(y | z)`.
//!
//! Parsing, rendering, the numeric oracle and the command line tool live in
//! the `causid` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod ccomp;
pub mod dsep;
pub mod expr;
pub mod graph;
pub mod ident;
mod nodeset;

#[cfg(feature = "testing")]
pub mod testing;

pub use ccomp::{
    c_components, is_c_forest, root_set, verify_hedge, CComponentPartition, HedgeCertificate,
    HedgeDefect,
};
pub use dsep::{d_separated, rule_applicable, DsepError, Rule, RuleQuery};
pub use expr::{ExprError, Expression, Marker, ValueContext};
pub use graph::{CausalDiagram, GraphError, Relation, TopologicalOrdering};
pub use ident::{
    id, idc, identify, identify_traced, Hedge, IdOptions, IdentError, IdentResult, Query,
    TraceEvent,
};
pub use nodeset::{NodeId, NodeSet};
