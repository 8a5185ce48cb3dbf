//! d-separation and do-calculus rule applicability.
//!
//! Each bidirected edge `a <-> b` behaves as a latent parent shared by `a`
//! and `b`. The latent is never conditioned on, so a path through it is
//! always open at the latent itself.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use thiserror::Error;

use crate::graph::CausalDiagram;
use crate::nodeset::{NodeId, NodeSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DsepError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("node `{0}` appears in more than one argument set")]
    OverlappingSets(String),
}

/// Returns true when `x` and `y` are d-separated given `z`.
///
/// The three sets must be subsets of the diagram and pairwise disjoint. An
/// empty `x` or `y` is trivially separated.
pub fn d_separated(
    g: &CausalDiagram,
    x: &NodeSet,
    y: &NodeSet,
    z: &NodeSet,
) -> Result<bool, DsepError> {
    check_sets(g, &[x, y, z])?;
    Ok(separated_unchecked(g, x, y, z))
}

fn check_sets(g: &CausalDiagram, sets: &[&NodeSet]) -> Result<(), DsepError> {
    for s in sets {
        if let Some(stray) = s.difference(g.nodes()).first() {
            return Err(DsepError::UnknownNode(g.name(stray).to_string()));
        }
    }
    for (i, a) in sets.iter().enumerate() {
        for b in &sets[i + 1..] {
            if let Some(shared) = a.intersection(b).first() {
                return Err(DsepError::OverlappingSets(g.name(shared).to_string()));
            }
        }
    }
    Ok(())
}

/// Reachability ("Bayes ball") over `(node, direction)` states. `Up` means the
/// node was entered from one of its children, `Down` from a parent (observed
/// or latent).
pub(crate) fn separated_unchecked(
    g: &CausalDiagram,
    x: &NodeSet,
    y: &NodeSet,
    z: &NodeSet,
) -> bool {
    if x.is_empty() || y.is_empty() {
        return true;
    }
    let an_z = g.ancestors(z);
    let mut seen_up = NodeSet::new();
    let mut seen_down = NodeSet::new();
    let mut stack: Vec<(NodeId, bool)> = x.iter().map(|v| (v, true)).collect();
    while let Some((v, up)) = stack.pop() {
        let fresh = if up {
            seen_up.insert(v)
        } else {
            seen_down.insert(v)
        };
        if !fresh {
            continue;
        }
        if y.contains(v) {
            return false;
        }
        let in_z = z.contains(v);
        if up {
            if in_z {
                continue;
            }
            stack.extend(g.parents(v).iter().map(|p| (p, true)));
            stack.extend(g.children(v).iter().map(|c| (c, false)));
            stack.extend(g.confounded(v).iter().map(|c| (c, false)));
        } else {
            if !in_z {
                stack.extend(g.children(v).iter().map(|c| (c, false)));
            }
            if an_z.contains(v) {
                stack.extend(g.parents(v).iter().map(|p| (p, true)));
                stack.extend(g.confounded(v).iter().map(|c| (c, false)));
            }
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule {
    /// Insertion or deletion of observations.
    One,
    /// Exchange of actions and observations.
    Two,
    /// Insertion or deletion of actions.
    Three,
}

/// A do-calculus rewrite of `P(y | do(x), z, w)`, where `z` is the set being
/// inserted, removed or exchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RuleQuery {
    pub rule: Rule,
    pub y: NodeSet,
    pub x: NodeSet,
    pub z: NodeSet,
    pub w: NodeSet,
}

/// Checks the graphical precondition of a do-calculus rule.
///
/// | rule | graph | test |
/// |------|-------|------|
/// | One | `G` with arrows into `x` removed | `y ⊥ z \| x, w` |
/// | Two | arrows into `x` and out of `z` removed | `y ⊥ z \| x, w` |
/// | Three | arrows into `x` and into `z \ An(w)` removed, ancestors taken after removing arrows into `x` | `y ⊥ z \| x, w` |
///
/// All four sets must be pairwise disjoint.
pub fn rule_applicable(g: &CausalDiagram, q: &RuleQuery) -> Result<bool, DsepError> {
    check_sets(g, &[&q.y, &q.x, &q.z, &q.w])?;
    let none = NodeSet::new();
    let cut = |cut_in: &NodeSet, cut_out: &NodeSet| {
        g.mutilate(cut_in, cut_out).expect("sets already checked")
    };
    let h = match q.rule {
        Rule::One => cut(&q.x, &none),
        Rule::Two => cut(&q.x, &q.z),
        Rule::Three => {
            let an_w = cut(&q.x, &none).ancestors(&q.w);
            cut(&q.x.union(&q.z.difference(&an_w)), &none)
        }
    };
    Ok(separated_unchecked(&h, &q.y, &q.z, &q.x.union(&q.w)))
}
