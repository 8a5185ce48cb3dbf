//! C-components, C-forests and hedges.
//!
//! A C-component is a maximal set of nodes connected by bidirected edges.
//! A C-forest is a diagram forming a single C-component in which every node
//! has at most one child; its childless nodes are the root set.

use alloc::vec::Vec;

use thiserror::Error;

use crate::graph::CausalDiagram;
use crate::nodeset::{NodeId, NodeSet};

/// The maximal C-components of a diagram.
///
/// Components are listed by their first member in diagram order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CComponentPartition {
    components: Vec<NodeSet>,
}

impl CComponentPartition {
    pub fn components(&self) -> &[NodeSet] {
        &self.components
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    /// Index of the component holding `id`.
    pub fn component_of(&self, id: NodeId) -> Option<usize> {
        self.components.iter().position(|c| c.contains(id))
    }

    pub fn into_components(self) -> Vec<NodeSet> {
        self.components
    }
}

pub fn c_components(g: &CausalDiagram) -> CComponentPartition {
    let mut unvisited = g.nodes().clone();
    let mut components = Vec::new();
    while let Some(start) = unvisited.first() {
        components.push(bidirected_reach(g, start, &mut unvisited));
    }
    CComponentPartition { components }
}

/// Collects everything reachable from `start` over bidirected edges, removing
/// it from `pool`.
fn bidirected_reach(g: &CausalDiagram, start: NodeId, pool: &mut NodeSet) -> NodeSet {
    let mut comp = NodeSet::singleton(start);
    pool.remove(start);
    let mut stack = alloc::vec![start];
    while let Some(v) = stack.pop() {
        for w in g.confounded(v).iter() {
            if pool.remove(w) {
                comp.insert(w);
                stack.push(w);
            }
        }
    }
    comp
}

/// True when `set` is nonempty and connected through bidirected edges of `g`
/// with both endpoints in `set`.
fn bidirected_connected(g: &CausalDiagram, set: &NodeSet) -> bool {
    let Some(start) = set.first() else {
        return false;
    };
    let mut pool = set.clone();
    let mut comp = NodeSet::singleton(start);
    pool.remove(start);
    let mut stack = alloc::vec![start];
    while let Some(v) = stack.pop() {
        for w in g.confounded(v).intersection(set).iter() {
            if pool.remove(w) {
                comp.insert(w);
                stack.push(w);
            }
        }
    }
    pool.is_empty()
}

/// Nodes with no children in `g`.
pub fn root_set(g: &CausalDiagram) -> NodeSet {
    g.nodes()
        .iter()
        .filter(|&v| g.children(v).is_empty())
        .collect()
}

/// True when `g` is a C-forest: nonempty, a single C-component, and no node
/// has more than one child.
pub fn is_c_forest(g: &CausalDiagram) -> bool {
    g.nodes().iter().all(|v| g.children(v).len() <= 1) && bidirected_connected(g, g.nodes())
}

/// Witness that `P_x(y)` is not identifiable: two C-forests sharing a root set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HedgeCertificate {
    pub forest: NodeSet,
    pub subforest: NodeSet,
    pub roots: NodeSet,
    pub x: NodeSet,
    pub y: NodeSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum HedgeDefect {
    #[error("certificate mentions nodes outside the diagram")]
    UnknownNodes,
    #[error("the subforest is not a proper subset of the forest")]
    NotProperSubforest,
    #[error("the forest does not meet the intervention set")]
    ForestMissesIntervention,
    #[error("the subforest meets the intervention set")]
    SubforestMeetsIntervention,
    #[error("the root set is empty or not inside the subforest")]
    BadRoots,
    #[error("a forest is not connected by bidirected edges")]
    NotCComponent,
    #[error("a non-root node has no child leading towards the roots")]
    NotRooted,
    #[error("a root is not an ancestor of the outcome once the intervention cuts its inputs")]
    RootsNotAncestral,
}

/// Checks a hedge certificate against `g`.
///
/// Forests are understood as edge subsets of the induced subgraphs: a node
/// set is an `R`-rooted C-forest when it is bidirected-connected and every
/// node outside `R` can pick one directed child inside the set, with `R`
/// itself picking none.
pub fn verify_hedge(g: &CausalDiagram, h: &HedgeCertificate) -> Result<(), HedgeDefect> {
    let all = h
        .forest
        .union(&h.subforest)
        .union(&h.roots)
        .union(&h.x)
        .union(&h.y);
    if !all.is_subset(g.nodes()) {
        return Err(HedgeDefect::UnknownNodes);
    }
    if !h.subforest.is_subset(&h.forest) || h.subforest == h.forest {
        return Err(HedgeDefect::NotProperSubforest);
    }
    if h.forest.is_disjoint(&h.x) {
        return Err(HedgeDefect::ForestMissesIntervention);
    }
    if !h.subforest.is_disjoint(&h.x) {
        return Err(HedgeDefect::SubforestMeetsIntervention);
    }
    if h.roots.is_empty() || !h.roots.is_subset(&h.subforest) {
        return Err(HedgeDefect::BadRoots);
    }
    if !bidirected_connected(g, &h.forest) || !bidirected_connected(g, &h.subforest) {
        return Err(HedgeDefect::NotCComponent);
    }
    let has_child_in = |v: NodeId, set: &NodeSet| !g.children(v).is_disjoint(set);
    let sub_rooted = h
        .subforest
        .difference(&h.roots)
        .iter()
        .all(|v| has_child_in(v, &h.subforest));
    let rest_rooted = h
        .forest
        .difference(&h.subforest)
        .iter()
        .all(|v| has_child_in(v, &h.forest));
    if !sub_rooted || !rest_rooted {
        return Err(HedgeDefect::NotRooted);
    }
    let cut = g
        .mutilate(&h.x, &NodeSet::new())
        .map_err(|_| HedgeDefect::UnknownNodes)?;
    if !h.roots.is_subset(&cut.ancestors(&h.y)) {
        return Err(HedgeDefect::RootsNotAncestral);
    }
    Ok(())
}
