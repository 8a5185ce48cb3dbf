//! Identification of interventional distributions.
//!
//! [`identify`] decides whether `P_x(y | z)` is determined by the
//! observational distribution of a diagram. On success it returns an
//! [`Expression`] over observational probabilities; otherwise it returns the
//! [`Hedge`] that blocks identification.
//!
//! The recursion follows the classic seven-step procedure: marginalize when
//! nothing is intervened on (1), drop non-ancestors of the outcome (2), add
//! free interventions (3), split over the C-components of `G[V \ X]` (4),
//! fail when the diagram is a single C-component (5), factorize a component
//! of `G` (6), or recurse into the component that contains it (7).

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

use crate::ccomp::{c_components, root_set, HedgeCertificate};
use crate::dsep::separated_unchecked;
use crate::expr::Expression;
use crate::graph::{CausalDiagram, TopologicalOrdering};
use crate::nodeset::{NodeId, NodeSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdentError {
    #[error("invalid query: unknown node `{0}`")]
    UnknownNode(String),
    #[error("invalid query: the outcome set is empty")]
    EmptyOutcome,
    #[error("invalid query: node `{0}` appears in more than one of y, x, z")]
    OverlappingSets(String),
}

/// The effect `P_x(y | z)`. `z` may be empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub y: NodeSet,
    pub x: NodeSet,
    pub z: NodeSet,
}

impl Query {
    pub fn new(y: NodeSet, x: NodeSet, z: NodeSet) -> Self {
        Query { y, x, z }
    }

    /// Resolves names against `g` and validates the result.
    pub fn from_names<Y, X, Z>(g: &CausalDiagram, y: Y, x: X, z: Z) -> Result<Self, IdentError>
    where
        Y: IntoIterator,
        Y::Item: AsRef<str>,
        X: IntoIterator,
        X::Item: AsRef<str>,
        Z: IntoIterator,
        Z::Item: AsRef<str>,
    {
        let resolve = |names: &mut dyn Iterator<Item = String>| -> Result<NodeSet, IdentError> {
            names
                .map(|n| g.id(&n).ok_or(IdentError::UnknownNode(n)))
                .collect()
        };
        let y = resolve(&mut y.into_iter().map(|n| n.as_ref().to_string()))?;
        let x = resolve(&mut x.into_iter().map(|n| n.as_ref().to_string()))?;
        let z = resolve(&mut z.into_iter().map(|n| n.as_ref().to_string()))?;
        let q = Query { y, x, z };
        q.validate(g)?;
        Ok(q)
    }

    pub fn validate(&self, g: &CausalDiagram) -> Result<(), IdentError> {
        for s in [&self.y, &self.x, &self.z] {
            if let Some(stray) = s.difference(g.nodes()).first() {
                return Err(IdentError::UnknownNode(alloc::format!("{stray:?}")));
            }
        }
        if self.y.is_empty() {
            return Err(IdentError::EmptyOutcome);
        }
        let pairs = [(&self.y, &self.x), (&self.y, &self.z), (&self.x, &self.z)];
        for (a, b) in pairs {
            if let Some(shared) = a.intersection(b).first() {
                return Err(IdentError::OverlappingSets(g.name(shared).to_string()));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IdOptions {
    /// Drop conditioning variables that are d-separated from the factor's
    /// variable when factorizing the joint distribution.
    pub prune: bool,
    /// Run [`Expression::simplify`] on the final expression.
    pub simplify: bool,
}

impl Default for IdOptions {
    fn default() -> Self {
        IdOptions {
            prune: true,
            simplify: false,
        }
    }
}

/// A failed identification: two C-forests over `forest ⊃ subforest` sharing
/// the root set, for the sub-query `P_intervention(outcome)` where the
/// recursion stopped. Name lists follow the topological order.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Hedge {
    pub forest: Vec<String>,
    pub subforest: Vec<String>,
    pub roots: Vec<String>,
    pub intervention: Vec<String>,
    pub outcome: Vec<String>,
    #[cfg_attr(feature = "serde", serde(skip))]
    pub certificate: HedgeCertificate,
}

impl fmt::Display for Hedge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Graph contains a hedge formed by C-forests of nodes: {{{}}} and {{{}}}.",
            self.forest.join(","),
            self.subforest.join(",")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IdentResult {
    Identified(Expression),
    NotIdentifiable(Hedge),
}

impl IdentResult {
    pub fn expression(&self) -> Option<&Expression> {
        match self {
            IdentResult::Identified(e) => Some(e),
            IdentResult::NotIdentifiable(_) => None,
        }
    }

    pub fn hedge(&self) -> Option<&Hedge> {
        match self {
            IdentResult::Identified(_) => None,
            IdentResult::NotIdentifiable(h) => Some(h),
        }
    }
}

/// One step of the recursion: the call depth and the step taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TraceEvent {
    pub depth: usize,
    pub line: u8,
}

/// Identifies `P_x(y | z)` starting from the joint distribution of all
/// observed nodes.
pub fn identify(g: &CausalDiagram, q: &Query, opts: IdOptions) -> Result<IdentResult, IdentError> {
    identify_traced(g, q, opts).map(|(r, _)| r)
}

/// Like [`identify`], also returning the steps taken by every recursive call.
pub fn identify_traced(
    g: &CausalDiagram,
    q: &Query,
    opts: IdOptions,
) -> Result<(IdentResult, Vec<TraceEvent>), IdentError> {
    q.validate(g)?;
    let order = g.topological_order();
    let joint =
        Expression::atomic(g.names(g.nodes()), [] as [&str; 0]).expect("diagrams are nonempty");
    let mut engine = Engine {
        order: &order,
        opts,
        trace: Vec::new(),
    };
    let outcome = if q.z.is_empty() {
        engine.id(&q.y, &q.x, &joint, true, g, 0)
    } else {
        engine.idc(&q.y, &q.x, &q.z, &joint, true, g)
    };
    Ok((engine.finish(outcome), engine.trace))
}

/// Runs the recursion for `P_x(y)` from an arbitrary current-stage
/// distribution `p` over the nodes of `g`.
///
/// `p` counts as the joint distribution when it is a single unconditioned
/// term; otherwise factors are derived from it by marginalization.
pub fn id(
    y: &NodeSet,
    x: &NodeSet,
    p: &Expression,
    g: &CausalDiagram,
    order: &TopologicalOrdering,
    opts: IdOptions,
) -> Result<IdentResult, IdentError> {
    Query::new(y.clone(), x.clone(), NodeSet::new()).validate(g)?;
    let mut engine = Engine {
        order,
        opts,
        trace: Vec::new(),
    };
    let outcome = engine.id(y, x, p, is_joint(p), g, 0);
    Ok(engine.finish(outcome))
}

/// Conditional version of [`id`] for `P_x(y | z)`. An empty `z` runs [`id`]
/// directly, as [`identify`] does.
pub fn idc(
    y: &NodeSet,
    x: &NodeSet,
    z: &NodeSet,
    p: &Expression,
    g: &CausalDiagram,
    order: &TopologicalOrdering,
    opts: IdOptions,
) -> Result<IdentResult, IdentError> {
    Query::new(y.clone(), x.clone(), z.clone()).validate(g)?;
    let mut engine = Engine {
        order,
        opts,
        trace: Vec::new(),
    };
    let outcome = if z.is_empty() {
        engine.id(y, x, p, is_joint(p), g, 0)
    } else {
        engine.idc(y, x, z, p, is_joint(p), g)
    };
    Ok(engine.finish(outcome))
}

fn is_joint(p: &Expression) -> bool {
    matches!(p, Expression::Atomic { cond, sumset, .. } if cond.is_empty() && sumset.is_empty())
}

struct Engine<'a> {
    order: &'a TopologicalOrdering,
    opts: IdOptions,
    trace: Vec<TraceEvent>,
}

type Outcome = Result<Expression, Hedge>;

#[allow(clippy::result_large_err)]
impl Engine<'_> {
    fn finish(&self, outcome: Outcome) -> IdentResult {
        match outcome {
            Ok(e) if self.opts.simplify => IdentResult::Identified(e.simplify()),
            Ok(e) => IdentResult::Identified(e),
            Err(h) => IdentResult::NotIdentifiable(h),
        }
    }

    fn names(&self, g: &CausalDiagram, set: &NodeSet) -> Vec<String> {
        self.order
            .sort(set)
            .into_iter()
            .map(|v| g.name(v).to_string())
            .collect()
    }

    fn record(&mut self, depth: usize, line: u8) {
        self.trace.push(TraceEvent { depth, line });
    }

    fn idc(
        &mut self,
        y: &NodeSet,
        x: &NodeSet,
        z: &NodeSet,
        p: &Expression,
        joint: bool,
        g: &CausalDiagram,
    ) -> Outcome {
        for zi in z.iter() {
            let single = NodeSet::singleton(zi);
            let cut = g
                .mutilate(x, &single)
                .expect("query sets lie in the diagram");
            let rest = z.difference(&single);
            if separated_unchecked(&cut, y, &single, &x.union(&rest)) {
                return self.idc(y, &x.union(&single), &rest, p, joint, g);
            }
        }
        let joint_effect = self.id(&y.union(z), x, p, joint, g, 0)?;
        let divisor = joint_effect.marginalize(self.names(g, y));
        Ok(Expression::fraction(joint_effect, divisor).normalize())
    }

    fn id(
        &mut self,
        y: &NodeSet,
        x: &NodeSet,
        p: &Expression,
        joint: bool,
        g: &CausalDiagram,
        depth: usize,
    ) -> Outcome {
        let v = g.nodes().clone();

        if x.is_empty() {
            self.record(depth, 1);
            return Ok(if joint {
                Expression::atomic(self.names(g, y), [] as [&str; 0]).expect("outcome is nonempty")
            } else {
                p.marginalize(self.names(g, &v.difference(y)))
            });
        }

        let anc = g.ancestors(y);
        if anc != v {
            self.record(depth, 2);
            let sub = g
                .induced_subgraph(&anc)
                .expect("ancestors lie in the diagram");
            let p = if joint {
                p.clone()
            } else {
                p.marginalize(self.names(g, &v.difference(&anc)))
            };
            return self.id(y, &x.intersection(&anc), &p, joint, &sub, depth + 1);
        }

        let cut = g
            .mutilate(x, &NodeSet::new())
            .expect("x lies in the diagram");
        let w = v.difference(x).difference(&cut.ancestors(y));
        if !w.is_empty() {
            self.record(depth, 3);
            return self.id(y, &x.union(&w), p, joint, g, depth + 1);
        }

        let rest = g
            .induced_subgraph(&v.difference(x))
            .expect("subset of the diagram");
        let mut parts = c_components(&rest).into_components();
        if parts.len() > 1 {
            self.record(depth, 4);
            let mut children = Vec::with_capacity(parts.len());
            for s in &parts {
                children.push(self.id(s, &v.difference(s), p, joint, g, depth + 1)?);
            }
            let sumset = self.names(g, &v.difference(&y.union(x)));
            return Ok(Expression::Product { children, sumset }.normalize());
        }
        let s = parts.pop().expect("y is nonempty and disjoint from x");

        let whole = c_components(g);
        if whole.len() == 1 {
            self.record(depth, 5);
            // The shared roots are the sinks of the smaller forest. A sink of
            // the whole graph can be missing some of them, since a node of `s`
            // may have a child in `x`.
            let roots = root_set(&g.induced_subgraph(&s).expect("s lies in the diagram"));
            return Err(Hedge {
                forest: self.names(g, &v),
                subforest: self.names(g, &s),
                roots: self.names(g, &roots),
                intervention: self.names(g, x),
                outcome: self.names(g, y),
                certificate: HedgeCertificate {
                    forest: v,
                    subforest: s,
                    roots,
                    x: x.clone(),
                    y: y.clone(),
                },
            });
        }

        if whole.components().contains(&s) {
            self.record(depth, 6);
            let prune = joint && self.opts.prune;
            let mut factors: Vec<Expression> = self
                .order
                .sort(&s)
                .into_iter()
                .map(|vi| self.factor(vi, g, p, joint, prune))
                .collect();
            factors.reverse();
            let sumset = self.names(g, &s.difference(y));
            return Ok(Expression::Product {
                children: factors,
                sumset,
            }
            .normalize());
        }

        self.record(depth, 7);
        let s_prime = whole
            .components()
            .iter()
            .find(|c| s.is_subset(c))
            .expect("every C-component of a subgraph lies in one of the whole graph")
            .clone();
        let mut factors: Vec<Expression> = self
            .order
            .sort(&s_prime)
            .into_iter()
            .map(|vi| self.factor(vi, g, p, joint, false))
            .collect();
        factors.reverse();
        let p_prime = Expression::Product {
            children: factors,
            sumset: Vec::new(),
        }
        .normalize();
        let sub = g
            .induced_subgraph(&s_prime)
            .expect("component of the diagram");
        self.id(
            y,
            &x.intersection(&s_prime),
            &p_prime,
            false,
            &sub,
            depth + 1,
        )
    }

    /// `P(v_i | predecessors of v_i in g)` under the current distribution.
    fn factor(
        &self,
        vi: NodeId,
        g: &CausalDiagram,
        p: &Expression,
        joint: bool,
        prune: bool,
    ) -> Expression {
        let sorted = self.order.sort(g.nodes());
        let pos = sorted
            .iter()
            .position(|&v| v == vi)
            .expect("factor variable is in the diagram");
        let name = |v: &NodeId| g.name(*v).to_string();
        if joint {
            let mut cond: Vec<NodeId> = sorted[..pos].to_vec();
            if prune {
                let target = NodeSet::singleton(vi);
                let mut i = 0;
                while i < cond.len() {
                    let c = NodeSet::singleton(cond[i]);
                    let others: NodeSet = cond.iter().copied().filter(|&d| d != cond[i]).collect();
                    if separated_unchecked(g, &target, &c, &others) {
                        cond.remove(i);
                    } else {
                        i += 1;
                    }
                }
            }
            return Expression::atomic([g.name(vi)], cond.iter().map(name))
                .expect("vi is not its own predecessor");
        }
        let numerator = p.marginalize(sorted[pos + 1..].iter().map(name));
        if pos == 0 {
            return numerator;
        }
        let divisor = p.marginalize(sorted[pos..].iter().map(name));
        Expression::fraction(numerator, divisor)
    }
}
