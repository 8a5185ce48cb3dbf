//! Semi-Markovian causal diagrams.
//!
//! A [`CausalDiagram`] holds observed nodes, directed edges and bidirected
//! edges. A bidirected edge `a <-> b` stands for an unobserved common cause of
//! exactly `a` and `b`; latent nodes are never materialized here.
//!
//! Every diagram derived from another one (induced subgraphs, mutilations)
//! shares its name table, so [`NodeId`]s and [`NodeSet`]s can be passed freely
//! between a diagram and its derivatives.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::nodeset::{NodeId, NodeSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown node `{0}`")]
    UnknownNode(String),
    #[error("node `{0}` declared twice")]
    DuplicateNode(String),
    #[error("self-loop on node `{0}`")]
    SelfLoop(String),
    #[error("directed cycle: {}", .0.join(" -> "))]
    DirectedCycle(Vec<String>),
    #[error("directed edges `{0}` -> `{1}` and `{1}` -> `{0}` without a confounder marker")]
    DoubleDirectedPair(String, String),
}

#[derive(Debug)]
struct NameTable {
    names: Vec<String>,
    index: BTreeMap<String, NodeId>,
}

/// The closure computed by [`CausalDiagram::relatives`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Ancestors,
    Descendants,
    Parents,
}

#[derive(Clone)]
pub struct CausalDiagram {
    table: Arc<NameTable>,
    nodes: NodeSet,
    // Indexed by node id over the whole name table; absent nodes have empty sets.
    parents: Vec<NodeSet>,
    children: Vec<NodeSet>,
    confounded: Vec<NodeSet>,
}

impl CausalDiagram {
    /// Builds and validates a diagram.
    ///
    /// Node order is the order of `nodes`. Duplicate edges collapse, and a
    /// bidirected edge may coexist with a directed edge between the same pair.
    pub fn build<N, D, B>(nodes: N, directed: D, bidirected: B) -> Result<Self, GraphError>
    where
        N: IntoIterator,
        N::Item: AsRef<str>,
        D: IntoIterator<Item = (N::Item, N::Item)>,
        B: IntoIterator<Item = (N::Item, N::Item)>,
    {
        let mut names = Vec::new();
        let mut index = BTreeMap::new();
        for name in nodes {
            let name = name.as_ref();
            let id = NodeId(names.len());
            if index.insert(name.to_string(), id).is_some() {
                return Err(GraphError::DuplicateNode(name.to_string()));
            }
            names.push(name.to_string());
        }
        let n = names.len();
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| GraphError::UnknownNode(name.to_string()))
        };

        let mut parents = alloc::vec![NodeSet::new(); n];
        let mut children = alloc::vec![NodeSet::new(); n];
        let mut confounded = alloc::vec![NodeSet::new(); n];
        for (a, b) in directed {
            let (a, b) = (lookup(a.as_ref())?, lookup(b.as_ref())?);
            if a == b {
                return Err(GraphError::SelfLoop(names[a.0].clone()));
            }
            children[a.0].insert(b);
            parents[b.0].insert(a);
        }
        for (a, b) in bidirected {
            let (a, b) = (lookup(a.as_ref())?, lookup(b.as_ref())?);
            if a == b {
                return Err(GraphError::SelfLoop(names[a.0].clone()));
            }
            confounded[a.0].insert(b);
            confounded[b.0].insert(a);
        }
        let diagram = CausalDiagram {
            nodes: (0..n).map(NodeId).collect(),
            table: Arc::new(NameTable { names, index }),
            parents,
            children,
            confounded,
        };
        if let Some(cycle) = diagram.find_cycle() {
            return Err(GraphError::DirectedCycle(
                cycle
                    .into_iter()
                    .map(|id| diagram.name(id).to_string())
                    .collect(),
            ));
        }
        Ok(diagram)
    }

    fn find_cycle(&self) -> Option<Vec<NodeId>> {
        #[derive(Clone, Copy, PartialEq)]
        enum Mark {
            New,
            Open,
            Done,
        }
        let mut mark = alloc::vec![Mark::New; self.table.names.len()];
        for root in self.nodes.iter() {
            if mark[root.0] != Mark::New {
                continue;
            }
            // Iterative DFS; `path` mirrors the open nodes.
            let mut path: Vec<NodeId> = alloc::vec![root];
            let mut stack: Vec<Vec<NodeId>> = alloc::vec![self.children[root.0].iter().collect()];
            mark[root.0] = Mark::Open;
            while let Some(pending) = stack.last_mut() {
                match pending.pop() {
                    Some(next) => match mark[next.0] {
                        Mark::Open => {
                            let start = path.iter().position(|&p| p == next).unwrap_or(0);
                            let mut cycle = path[start..].to_vec();
                            cycle.push(next);
                            return Some(cycle);
                        }
                        Mark::New => {
                            mark[next.0] = Mark::Open;
                            path.push(next);
                            stack.push(self.children[next.0].iter().collect());
                        }
                        Mark::Done => {}
                    },
                    None => {
                        stack.pop();
                        if let Some(done) = path.pop() {
                            mark[done.0] = Mark::Done;
                        }
                    }
                }
            }
        }
        None
    }

    pub fn nodes(&self) -> &NodeSet {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Name of a node. Works for any id of the shared name table.
    pub fn name(&self, id: NodeId) -> &str {
        &self.table.names[id.0]
    }

    /// Looks up a node of this diagram by name.
    pub fn id(&self, name: &str) -> Option<NodeId> {
        self.table
            .index
            .get(name)
            .copied()
            .filter(|id| self.nodes.contains(*id))
    }

    pub fn node_set<I>(&self, names: I) -> Result<NodeSet, GraphError>
    where
        I: IntoIterator,
        I::Item: AsRef<str>,
    {
        names
            .into_iter()
            .map(|n| {
                self.id(n.as_ref())
                    .ok_or_else(|| GraphError::UnknownNode(n.as_ref().to_string()))
            })
            .collect()
    }

    /// Names of the members of `set`, in diagram order.
    pub fn names<'a>(&'a self, set: &NodeSet) -> Vec<&'a str> {
        set.iter().map(|id| self.name(id)).collect()
    }

    pub fn parents(&self, id: NodeId) -> &NodeSet {
        &self.parents[id.0]
    }

    pub fn children(&self, id: NodeId) -> &NodeSet {
        &self.children[id.0]
    }

    /// Nodes sharing a bidirected edge with `id`.
    pub fn confounded(&self, id: NodeId) -> &NodeSet {
        &self.confounded[id.0]
    }

    /// Directed edges, ordered by source then target.
    pub fn directed_edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes
            .iter()
            .flat_map(move |a| self.children[a.0].iter().map(move |b| (a, b)))
    }

    /// Bidirected edges as `(a, b)` with `a` before `b` in diagram order.
    pub fn bidirected_edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.nodes.iter().flat_map(move |a| {
            self.confounded[a.0]
                .iter()
                .filter(move |&b| a < b)
                .map(move |b| (a, b))
        })
    }

    pub fn has_bidirected(&self) -> bool {
        self.nodes.iter().any(|a| !self.confounded[a.0].is_empty())
    }

    fn check_subset(&self, set: &NodeSet) -> Result<(), GraphError> {
        match set.difference(&self.nodes).first() {
            Some(stray) => Err(GraphError::UnknownNode(self.name(stray).to_string())),
            None => Ok(()),
        }
    }

    /// Reflexive closure of `set` under the requested relation. Bidirected
    /// edges are ignored.
    pub fn relatives(&self, set: &NodeSet, relation: Relation) -> Result<NodeSet, GraphError> {
        self.check_subset(set)?;
        Ok(match relation {
            Relation::Ancestors => self.closure(set, &self.parents),
            Relation::Descendants => self.closure(set, &self.children),
            Relation::Parents => set
                .iter()
                .fold(set.clone(), |acc, v| acc.union(&self.parents[v.0])),
        })
    }

    /// `An(set)`, including `set` itself. Members outside the diagram are ignored.
    pub fn ancestors(&self, set: &NodeSet) -> NodeSet {
        self.closure(&set.intersection(&self.nodes), &self.parents)
    }

    /// `De(set)`, including `set` itself. Members outside the diagram are ignored.
    pub fn descendants(&self, set: &NodeSet) -> NodeSet {
        self.closure(&set.intersection(&self.nodes), &self.children)
    }

    fn closure(&self, seed: &NodeSet, step: &[NodeSet]) -> NodeSet {
        let mut out = seed.clone();
        let mut frontier: Vec<NodeId> = seed.iter().collect();
        while let Some(v) = frontier.pop() {
            for w in step[v.0].iter() {
                if out.insert(w) {
                    frontier.push(w);
                }
            }
        }
        out
    }

    /// `G[keep]`: the nodes of `keep` and every edge with both endpoints in it.
    pub fn induced_subgraph(&self, keep: &NodeSet) -> Result<CausalDiagram, GraphError> {
        self.check_subset(keep)?;
        let restrict = |adj: &[NodeSet]| -> Vec<NodeSet> {
            adj.iter()
                .enumerate()
                .map(|(i, s)| {
                    if keep.contains(NodeId(i)) {
                        s.intersection(keep)
                    } else {
                        NodeSet::new()
                    }
                })
                .collect()
        };
        Ok(CausalDiagram {
            table: Arc::clone(&self.table),
            nodes: keep.clone(),
            parents: restrict(&self.parents),
            children: restrict(&self.children),
            confounded: restrict(&self.confounded),
        })
    }

    /// Removes directed edges into `cut_incoming` and out of `cut_outgoing`.
    ///
    /// A bidirected edge is an incoming influence on both endpoints, so it is
    /// removed whenever one endpoint is in `cut_incoming`.
    pub fn mutilate(
        &self,
        cut_incoming: &NodeSet,
        cut_outgoing: &NodeSet,
    ) -> Result<CausalDiagram, GraphError> {
        self.check_subset(cut_incoming)?;
        self.check_subset(cut_outgoing)?;
        let mut out = self.clone();
        for v in self.nodes.iter() {
            if cut_incoming.contains(v) {
                out.parents[v.0] = NodeSet::new();
                out.confounded[v.0] = NodeSet::new();
            } else {
                out.parents[v.0] = self.parents[v.0].difference(cut_outgoing);
                out.confounded[v.0] = self.confounded[v.0].difference(cut_incoming);
            }
            if cut_outgoing.contains(v) {
                out.children[v.0] = NodeSet::new();
            } else {
                out.children[v.0] = self.children[v.0].difference(cut_incoming);
            }
        }
        Ok(out)
    }

    /// Layered topological ordering: repeatedly take every node whose parents
    /// are all placed, in diagram order.
    pub fn topological_order(&self) -> TopologicalOrdering {
        let mut remaining = self.nodes.clone();
        let mut order = Vec::with_capacity(remaining.len());
        while !remaining.is_empty() {
            let layer: Vec<NodeId> = remaining
                .iter()
                .filter(|v| self.parents[v.0].is_disjoint(&remaining))
                .collect();
            // Acyclic by construction, so every layer is nonempty.
            debug_assert!(!layer.is_empty());
            for v in &layer {
                remaining.remove(*v);
            }
            order.extend(layer);
        }
        TopologicalOrdering::from_order(order, self.table.names.len())
    }

    fn canonical(&self) -> (Vec<&str>, BTreeSet<(&str, &str)>, BTreeSet<(&str, &str)>) {
        let names = self.nodes.iter().map(|v| self.name(v)).collect();
        let directed = self
            .directed_edges()
            .map(|(a, b)| (self.name(a), self.name(b)))
            .collect();
        let bidirected = self
            .bidirected_edges()
            .map(|(a, b)| {
                let (a, b) = (self.name(a), self.name(b));
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        (names, directed, bidirected)
    }
}

/// Diagrams are equal when they have the same node names in the same order
/// and the same edges, regardless of which name table they were built from.
impl PartialEq for CausalDiagram {
    fn eq(&self, other: &Self) -> bool {
        self.canonical() == other.canonical()
    }
}

impl Eq for CausalDiagram {}

impl fmt::Debug for CausalDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (nodes, directed, _) = self.canonical();
        let bidirected: Vec<_> = self
            .bidirected_edges()
            .map(|(a, b)| (self.name(a), self.name(b)))
            .collect();
        f.debug_struct("CausalDiagram")
            .field("nodes", &nodes)
            .field("directed", &directed)
            .field("bidirected", &bidirected)
            .finish()
    }
}

/// A permutation of a diagram's nodes in which every parent precedes its
/// children. Fixed once at the top level and reused for every subgraph.
#[derive(Clone, PartialEq, Eq)]
pub struct TopologicalOrdering {
    order: Vec<NodeId>,
    rank: Vec<usize>,
}

impl TopologicalOrdering {
    fn from_order(order: Vec<NodeId>, table_len: usize) -> Self {
        let mut rank = alloc::vec![usize::MAX; table_len];
        for (i, v) in order.iter().enumerate() {
            rank[v.0] = i;
        }
        TopologicalOrdering { order, rank }
    }

    /// Wraps an explicit order. Validity against a diagram is checked by
    /// [`TopologicalOrdering::is_valid_for`].
    pub fn from_nodes(order: Vec<NodeId>) -> Self {
        let len = order.iter().map(|v| v.0 + 1).max().unwrap_or(0);
        Self::from_order(order, len)
    }

    pub fn as_slice(&self) -> &[NodeId] {
        &self.order
    }

    pub fn rank(&self, id: NodeId) -> Option<usize> {
        self.rank.get(id.0).copied().filter(|&r| r != usize::MAX)
    }

    /// Members of `set` sorted by this ordering. Members the ordering does not
    /// know about are dropped.
    pub fn sort(&self, set: &NodeSet) -> Vec<NodeId> {
        let mut v: Vec<NodeId> = set.iter().filter(|&id| self.rank(id).is_some()).collect();
        v.sort_by_key(|&id| self.rank[id.0]);
        v
    }

    /// Members of `within` that come before `id`, in order.
    pub fn predecessors(&self, id: NodeId, within: &NodeSet) -> Vec<NodeId> {
        let r = self.rank(id).unwrap_or(usize::MAX);
        self.sort(within)
            .into_iter()
            .take_while(|&v| self.rank[v.0] < r)
            .collect()
    }

    /// True when every node of `g` is ranked and every directed edge of `g`
    /// points forward. Also holds for any induced subgraph of a diagram the
    /// ordering is valid for.
    pub fn is_valid_for(&self, g: &CausalDiagram) -> bool {
        g.nodes().iter().all(|v| self.rank(v).is_some())
            && g.directed_edges()
                .all(|(a, b)| self.rank[a.0] < self.rank[b.0])
    }
}

impl fmt::Debug for TopologicalOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.order).finish()
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use alloc::vec;

    fn names(g: &CausalDiagram, s: &NodeSet) -> Vec<String> {
        g.names(s).into_iter().map(String::from).collect()
    }

    fn order_names(g: &CausalDiagram) -> Vec<&str> {
        g.topological_order()
            .as_slice()
            .iter()
            .map(|&v| g.name(v))
            .collect()
    }

    #[test]
    fn build_accepts_mediated_and_collapses_duplicates() {
        let g = CausalDiagram::build(
            ["W", "X", "Z", "Y"],
            [("W", "X"), ("W", "Z"), ("X", "Z"), ("Z", "Y"), ("Z", "Y")],
            [("X", "Y"), ("Y", "X")],
        )
        .unwrap();
        assert_eq!(g, mediated());
        assert_eq!(g.directed_edges().count(), 4);
        assert_eq!(g.bidirected_edges().count(), 1);
    }

    #[test]
    fn build_single_node() {
        let g = CausalDiagram::build(["A"], [], []).unwrap();
        assert_eq!(g.node_count(), 1);
    }

    #[test]
    fn build_errors() {
        let e = CausalDiagram::build(["A", "B"], [("A", "B"), ("B", "A")], []).unwrap_err();
        assert!(
            matches!(e, GraphError::DirectedCycle(ref c) if c.len() == 3),
            "{e:?}"
        );
        assert_eq!(
            CausalDiagram::build(["A"], [("A", "B")], []).unwrap_err(),
            GraphError::UnknownNode("B".into())
        );
        assert_eq!(
            CausalDiagram::build(["A"], [("A", "A")], []).unwrap_err(),
            GraphError::SelfLoop("A".into())
        );
        assert_eq!(
            CausalDiagram::build(["A"], [], [("A", "A")]).unwrap_err(),
            GraphError::SelfLoop("A".into())
        );
        assert_eq!(
            CausalDiagram::build(["A", "A"], [], []).unwrap_err(),
            GraphError::DuplicateNode("A".into())
        );
    }

    #[test]
    fn cycle_is_named() {
        let e = CausalDiagram::build(
            ["A", "B", "C", "D"],
            [("D", "A"), ("A", "B"), ("B", "C"), ("C", "A")],
            [],
        )
        .unwrap_err();
        match e {
            GraphError::DirectedCycle(c) => {
                assert_eq!(c.first(), c.last());
                assert_eq!(c.len(), 4);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn relatives_examples() {
        let g = mediated();
        let z = g.node_set(["Z"]).unwrap();
        assert_eq!(
            names(&g, &g.relatives(&z, Relation::Ancestors).unwrap()),
            ["W", "X", "Z"]
        );
        assert_eq!(
            g.relatives(g.nodes(), Relation::Ancestors).unwrap(),
            *g.nodes()
        );
        assert_eq!(
            names(&g, &g.relatives(&z, Relation::Parents).unwrap()),
            ["W", "X", "Z"]
        );
        let x = g.node_set(["X"]).unwrap();
        assert_eq!(
            names(&g, &g.relatives(&x, Relation::Descendants).unwrap()),
            ["X", "Z", "Y"]
        );

        let f = hedged();
        let cut = f
            .mutilate(&f.node_set(["X"]).unwrap(), &NodeSet::new())
            .unwrap();
        let an = cut
            .relatives(&f.node_set(["Y"]).unwrap(), Relation::Ancestors)
            .unwrap();
        assert_eq!(names(&f, &an), ["X", "Z_2", "Y"]);
    }

    #[test]
    fn relatives_rejects_foreign_nodes() {
        let g = mediated();
        let sub = g
            .induced_subgraph(&g.node_set(["W", "X"]).unwrap())
            .unwrap();
        let y = g.node_set(["Y"]).unwrap();
        assert_eq!(
            sub.relatives(&y, Relation::Ancestors),
            Err(GraphError::UnknownNode("Y".into()))
        );
    }

    #[test]
    fn induced_subgraph_examples() {
        let f = hedged();
        let sub = f
            .induced_subgraph(&f.node_set(["X", "Z_1", "Z_2"]).unwrap())
            .unwrap();
        let expected = CausalDiagram::build(
            ["Z_1", "X", "Z_2"],
            [("Z_1", "X"), ("X", "Z_2")],
            [("X", "Z_1"), ("Z_1", "Z_2")],
        )
        .unwrap();
        assert_eq!(sub, expected);
        assert_eq!(f.induced_subgraph(f.nodes()).unwrap(), f);
        let single = f.induced_subgraph(&f.node_set(["Y"]).unwrap()).unwrap();
        assert_eq!(single.node_count(), 1);
        assert_eq!(
            single.directed_edges().count() + single.bidirected_edges().count(),
            0
        );
    }

    #[test]
    fn mutilate_examples() {
        let g = mediated();
        let none = NodeSet::new();
        let cut_x = g.mutilate(&g.node_set(["X"]).unwrap(), &none).unwrap();
        let expected = CausalDiagram::build(
            ["W", "X", "Z", "Y"],
            [("W", "Z"), ("X", "Z"), ("Z", "Y")],
            [],
        )
        .unwrap();
        assert_eq!(cut_x, expected);
        assert_eq!(g.mutilate(&none, &none).unwrap(), g);
        let cut_z = g.mutilate(&none, &g.node_set(["Z"]).unwrap()).unwrap();
        let expected = CausalDiagram::build(
            ["W", "X", "Z", "Y"],
            [("W", "X"), ("W", "Z"), ("X", "Z")],
            [("X", "Y")],
        )
        .unwrap();
        assert_eq!(cut_z, expected);
    }

    #[test]
    fn topological_order_examples() {
        assert_eq!(order_names(&mediated()), ["W", "X", "Z", "Y"]);
        assert_eq!(order_names(&hedged()), ["Z_1", "X", "Z_2", "Y"]);
        assert_eq!(
            order_names(&multi_outcome()),
            ["Z_2", "X", "Z_3", "Z_1", "Y"]
        );
        assert_eq!(order_names(&prunable()), ["z", "x", "w", "y"]);
        let single = CausalDiagram::build(["A"], [], []).unwrap();
        assert_eq!(order_names(&single), ["A"]);
    }

    #[test]
    fn ordering_helpers() {
        let g = multi_outcome();
        let order = g.topological_order();
        let preds = order.predecessors(g.id("Y").unwrap(), g.nodes());
        assert_eq!(
            preds.iter().map(|&v| g.name(v)).collect::<Vec<_>>(),
            ["Z_2", "X", "Z_3", "Z_1"]
        );
        let sub = g
            .induced_subgraph(&g.node_set(["Y", "Z_2", "Z_3"]).unwrap())
            .unwrap();
        assert!(order.is_valid_for(&sub));
        let bad = TopologicalOrdering::from_nodes(vec![
            g.id("Y").unwrap(),
            g.id("Z_3").unwrap(),
            g.id("Z_2").unwrap(),
        ]);
        assert!(!bad.is_valid_for(&sub));
    }
}
