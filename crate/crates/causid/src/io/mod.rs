//! Reading diagrams and writing expressions.

mod dsl;
mod graphml;
mod render;

pub use dsl::{parse_dsl, render_dsl, DslError};
pub use graphml::{parse_graphml, GraphmlError, NameOptions, Notation};
pub use render::{render, Format};
