//! Symbolic probability expressions.
//!
//! An [`Expression`] is a tree of conditional probabilities `P(var | cond)`,
//! products and fractions, each node optionally summed over a list of
//! variables (its `sumset`). Summation binds names lexically: a variable in a
//! sumset refers to the enclosed occurrences and shadows any outer variable
//! of the same name.
//!
//! [`Expression::normalize`] applies the cheap structural rewrites used while
//! building expressions. [`Expression::simplify`] adds the algebraic rules on
//! top and runs them to a fixpoint.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

mod simplify;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("a probability term needs at least one variable")]
    EmptyVar,
    #[error("variable `{0}` is both conditioned on and distributed")]
    OverlappingVarCond(String),
    #[error("variable `{0}` is not free in the expression")]
    UnknownVariable(String),
    #[error("a product needs at least one factor")]
    EmptyProduct,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "type", rename_all = "snake_case"))]
pub enum Expression {
    /// `Σ_sumset P(var | cond)`.
    Atomic {
        var: Vec<String>,
        cond: Vec<String>,
        sumset: Vec<String>,
    },
    /// `Σ_sumset Π children`.
    Product {
        children: Vec<Expression>,
        sumset: Vec<String>,
    },
    /// `Σ_sumset numerator / divisor`.
    Fraction {
        numerator: Box<Expression>,
        divisor: Box<Expression>,
        sumset: Vec<String>,
    },
}

fn push_unique(list: &mut Vec<String>, name: &str) {
    if !list.iter().any(|n| n == name) {
        list.push(name.into());
    }
}

impl Expression {
    /// `P(var | cond)` with no summation. Repeated names are collapsed.
    pub fn atomic<V, C>(var: V, cond: C) -> Result<Self, ExprError>
    where
        V: IntoIterator,
        V::Item: AsRef<str>,
        C: IntoIterator,
        C::Item: AsRef<str>,
    {
        let mut v = Vec::new();
        for name in var {
            push_unique(&mut v, name.as_ref());
        }
        let mut c = Vec::new();
        for name in cond {
            push_unique(&mut c, name.as_ref());
        }
        if v.is_empty() {
            return Err(ExprError::EmptyVar);
        }
        if let Some(shared) = c.iter().find(|n| v.contains(n)) {
            return Err(ExprError::OverlappingVarCond(shared.clone()));
        }
        Ok(Expression::Atomic {
            var: v,
            cond: c,
            sumset: Vec::new(),
        })
    }

    pub fn product(children: Vec<Expression>) -> Result<Self, ExprError> {
        if children.is_empty() {
            return Err(ExprError::EmptyProduct);
        }
        Ok(Expression::Product {
            children,
            sumset: Vec::new(),
        })
    }

    pub fn fraction(numerator: Expression, divisor: Expression) -> Self {
        Expression::Fraction {
            numerator: Box::new(numerator),
            divisor: Box::new(divisor),
            sumset: Vec::new(),
        }
    }

    pub fn sumset(&self) -> &[String] {
        match self {
            Expression::Atomic { sumset, .. }
            | Expression::Product { sumset, .. }
            | Expression::Fraction { sumset, .. } => sumset,
        }
    }

    pub(crate) fn sumset_mut(&mut self) -> &mut Vec<String> {
        match self {
            Expression::Atomic { sumset, .. }
            | Expression::Product { sumset, .. }
            | Expression::Fraction { sumset, .. } => sumset,
        }
    }

    /// Sums the expression over `vars`, then normalizes. Names already in the
    /// sumset are not repeated; summing over nothing returns a copy.
    pub fn marginalize<I>(&self, vars: I) -> Expression
    where
        I: IntoIterator,
        I::Item: AsRef<str>,
    {
        let mut out = self.clone();
        let before = out.sumset().len();
        for v in vars {
            push_unique(out.sumset_mut(), v.as_ref());
        }
        if out.sumset().len() == before {
            return out;
        }
        out.normalize()
    }

    /// `e / Σ e`, summing over every free variable that is neither in
    /// `given` nor fixed by intervention in `ctx`.
    ///
    /// When nothing is left to sum over the expression is returned as is.
    pub fn conditional<I>(&self, given: I, ctx: &ValueContext) -> Result<Expression, ExprError>
    where
        I: IntoIterator,
        I::Item: AsRef<str>,
    {
        let free = self.free_variables();
        let mut keep = Vec::new();
        for g in given {
            let g = g.as_ref();
            if !free.iter().any(|f| f == g) {
                return Err(ExprError::UnknownVariable(g.into()));
            }
            keep.push(String::from(g));
        }
        let summed: Vec<&String> = free
            .iter()
            .filter(|f| !keep.contains(f) && ctx.get(f) != Some(Marker::FixedByIntervention))
            .collect();
        if summed.is_empty() {
            return Ok(self.clone());
        }
        Ok(Expression::fraction(self.clone(), self.marginalize(summed)).normalize())
    }

    /// Variables occurring outside every binder, in order of first occurrence.
    pub fn free_variables(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut Vec<String>) {
        let mut local = Vec::new();
        match self {
            Expression::Atomic { var, cond, .. } => {
                for n in var.iter().chain(cond) {
                    push_unique(&mut local, n);
                }
            }
            Expression::Product { children, .. } => {
                for c in children {
                    c.collect_free(&mut local);
                }
            }
            Expression::Fraction {
                numerator, divisor, ..
            } => {
                numerator.collect_free(&mut local);
                divisor.collect_free(&mut local);
            }
        }
        let bound = self.sumset();
        for n in local {
            if !bound.contains(&n) {
                push_unique(out, &n);
            }
        }
    }

    pub(crate) fn mentions_any(&self, names: &[String]) -> bool {
        !names.is_empty() && self.free_variables().iter().any(|f| names.contains(f))
    }

    /// Markers for every name in the expression. Free names listed in
    /// `intervened` are fixed by intervention, other free names are free, and
    /// names that only ever occur bound are summation-bound.
    pub fn value_context<I>(&self, intervened: I) -> ValueContext
    where
        I: IntoIterator,
        I::Item: AsRef<str>,
    {
        let intervened: Vec<String> = intervened
            .into_iter()
            .map(|n| String::from(n.as_ref()))
            .collect();
        let mut ctx = ValueContext::new();
        let mut all = Vec::new();
        self.collect_names(&mut all);
        for n in all {
            ctx.mark(n, Marker::SummationBound);
        }
        for n in self.free_variables() {
            let marker = if intervened.contains(&n) {
                Marker::FixedByIntervention
            } else {
                Marker::Free
            };
            ctx.mark(n, marker);
        }
        ctx
    }

    fn collect_names(&self, out: &mut Vec<String>) {
        for n in self.sumset() {
            push_unique(out, n);
        }
        match self {
            Expression::Atomic { var, cond, .. } => {
                for n in var.iter().chain(cond) {
                    push_unique(out, n);
                }
            }
            Expression::Product { children, .. } => {
                children.iter().for_each(|c| c.collect_names(out))
            }
            Expression::Fraction {
                numerator, divisor, ..
            } => {
                numerator.collect_names(out);
                divisor.collect_names(out);
            }
        }
    }

    /// Structural clean-up that never changes the value:
    ///
    /// - `Σ_S P(A | C)` drops the names of `S ∩ A` from both lists while some
    ///   of `A` remains; a sum over all of `A` is kept as written.
    /// - factors that are products without a sumset are spliced into the
    ///   enclosing product;
    /// - a product with a single factor is replaced by that factor, whose
    ///   sumset absorbs the product's.
    pub fn normalize(self) -> Expression {
        match self {
            Expression::Atomic { var, cond, sumset } => {
                let marginal: Vec<String> = var
                    .iter()
                    .filter(|v| !sumset.contains(v))
                    .cloned()
                    .collect();
                if marginal.is_empty() || marginal.len() == var.len() {
                    return Expression::Atomic { var, cond, sumset };
                }
                let sumset = sumset.into_iter().filter(|s| !var.contains(s)).collect();
                Expression::Atomic {
                    var: marginal,
                    cond,
                    sumset,
                }
            }
            Expression::Product { children, sumset } => {
                let mut flat = Vec::with_capacity(children.len());
                for child in children {
                    match child.normalize() {
                        Expression::Product { children, sumset } if sumset.is_empty() => {
                            flat.extend(children)
                        }
                        other => flat.push(other),
                    }
                }
                if flat.len() == 1 && flat[0].sumset().iter().all(|s| !sumset.contains(s)) {
                    let mut only = flat.pop().expect("one child");
                    if sumset.is_empty() {
                        return only;
                    }
                    only.sumset_mut().extend(sumset);
                    return only.normalize();
                }
                Expression::Product {
                    children: flat,
                    sumset,
                }
            }
            Expression::Fraction {
                numerator,
                divisor,
                sumset,
            } => Expression::Fraction {
                numerator: Box::new(numerator.normalize()),
                divisor: Box::new(divisor.normalize()),
                sumset,
            },
        }
    }

    /// Value-preserving algebraic simplification, run to a fixpoint:
    ///
    /// - factors that do not mention any summation variable are moved out
    ///   of the sum;
    /// - a factor `P(A | C)` whose variables `T ⊆ A` are summed and appear in
    ///   no other factor is marginalized in place, and dropped entirely when
    ///   all of `A` is summed;
    /// - identical top-level factors of a numerator and divisor cancel.
    ///
    /// A literal `1` is never produced: the last factor of a product or
    /// numerator always stays.
    pub fn simplify(&self) -> Expression {
        simplify::simplify(self)
    }
}

/// How a variable name is used in an expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Marker {
    /// Set by `do(...)`; a parameter of the expression, never summed over.
    FixedByIntervention,
    /// Only ever bound by a sumset.
    SummationBound,
    /// A free outcome or conditioning variable.
    Free,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValueContext {
    markers: BTreeMap<String, Marker>,
}

impl ValueContext {
    pub fn new() -> Self {
        Self::default()
    }

    /// Context marking each of `names` as fixed by intervention.
    pub fn intervened<I>(names: I) -> Self
    where
        I: IntoIterator,
        I::Item: AsRef<str>,
    {
        let mut ctx = Self::new();
        for n in names {
            ctx.mark(n.as_ref(), Marker::FixedByIntervention);
        }
        ctx
    }

    /// Sets the marker of `name`, replacing any previous one.
    pub fn mark(&mut self, name: impl Into<String>, marker: Marker) {
        self.markers.insert(name.into(), marker);
    }

    pub fn get(&self, name: &str) -> Option<Marker> {
        self.markers.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, Marker)> + '_ {
        self.markers.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    pub(crate) fn p(var: &[&str], cond: &[&str]) -> Expression {
        Expression::atomic(var.iter(), cond.iter()).unwrap()
    }

    fn names(list: &[&str]) -> Vec<String> {
        list.iter().map(|s| String::from(*s)).collect()
    }

    fn prod(children: Vec<Expression>, sumset: &[&str]) -> Expression {
        Expression::Product {
            children,
            sumset: names(sumset),
        }
    }

    #[test]
    fn atomic_construction() {
        assert_eq!(
            p(&["Y"], &["X"]),
            Expression::Atomic {
                var: names(&["Y"]),
                cond: names(&["X"]),
                sumset: vec![]
            }
        );
        assert!(matches!(p(&["V"], &[]), Expression::Atomic { ref cond, .. } if cond.is_empty()));
        assert_eq!(
            Expression::atomic(["Y"], ["Y"]),
            Err(ExprError::OverlappingVarCond("Y".into()))
        );
        assert_eq!(
            Expression::atomic([] as [&str; 0], ["Y"]),
            Err(ExprError::EmptyVar)
        );
        assert_eq!(Expression::product(vec![]), Err(ExprError::EmptyProduct));
    }

    #[test]
    fn marginalize_appends_to_sumset() {
        let e = prod(
            vec![p(&["Z"], &["X"]), p(&["X"], &["Y"]), p(&["Y"], &[])],
            &[],
        );
        let m = e.marginalize(["Y", "Z"]);
        assert_eq!(
            m,
            prod(
                vec![p(&["Z"], &["X"]), p(&["X"], &["Y"]), p(&["Y"], &[])],
                &["Y", "Z"]
            )
        );
        assert_eq!(e.marginalize([] as [&str; 0]), e);
        let irreducible = prod(vec![p(&["Y"], &["X"]), p(&["X"], &[])], &["X"]);
        assert_eq!(irreducible.marginalize([] as [&str; 0]), irreducible);
        assert_eq!(irreducible.simplify(), irreducible);
    }

    #[test]
    fn marginalizing_a_joint_drops_variables() {
        let joint = p(&["A", "B", "C"], &[]);
        assert_eq!(joint.marginalize(["B"]), p(&["A", "C"], &[]));
        let all = joint.marginalize(["A", "B", "C"]);
        assert_eq!(all.sumset(), names(&["A", "B", "C"]).as_slice());
    }

    #[test]
    fn free_variables_respect_binders() {
        assert_eq!(p(&["Y"], &["X"]).free_variables(), names(&["Y", "X"]));
        let e = prod(vec![p(&["Y"], &["X"]), p(&["X"], &[])], &["X"]);
        assert_eq!(e.free_variables(), names(&["Y"]));
        let mediated = prod(
            vec![
                p(&["W"], &[]),
                p(&["Z"], &["W", "X"]),
                prod(vec![p(&["Y"], &["W", "X", "Z"]), p(&["X"], &["W"])], &["X"]),
            ],
            &["W", "Z"],
        );
        assert_eq!(mediated.free_variables(), names(&["X", "Y"]));
        let ctx = mediated.value_context(["X"]);
        assert_eq!(ctx.get("X"), Some(Marker::FixedByIntervention));
        assert_eq!(ctx.get("Y"), Some(Marker::Free));
        assert_eq!(ctx.get("W"), Some(Marker::SummationBound));
    }

    #[test]
    fn conditional_of_intervened_expression() {
        let e = p(&["Z"], &["W", "X"]);
        let c = e
            .conditional(["W"], &ValueContext::intervened(["X"]))
            .unwrap();
        assert_eq!(
            c,
            Expression::fraction(
                e.clone(),
                Expression::Atomic {
                    var: names(&["Z"]),
                    cond: names(&["W", "X"]),
                    sumset: names(&["Z"]),
                }
            )
        );
        assert_eq!(
            e.conditional(["Z", "W", "X"], &ValueContext::new())
                .unwrap(),
            e
        );
        assert_eq!(
            e.conditional(["Q"], &ValueContext::new()),
            Err(ExprError::UnknownVariable("Q".into()))
        );
    }

    #[test]
    fn normalize_unwraps_and_splices() {
        let nested = prod(
            vec![
                prod(vec![p(&["A"], &[]), p(&["B"], &[])], &[]),
                p(&["C"], &[]),
            ],
            &[],
        );
        assert_eq!(
            nested.normalize(),
            prod(vec![p(&["A"], &[]), p(&["B"], &[]), p(&["C"], &[])], &[])
        );
        let single = prod(vec![p(&["A", "B"], &["C"])], &["B"]);
        assert_eq!(single.normalize(), p(&["A"], &["C"]));
        // A sum over every variable of a term is left in place.
        let unit = prod(vec![p(&["A"], &["C"])], &["A"]);
        assert_eq!(unit.normalize().sumset(), names(&["A"]).as_slice());
    }

    #[test]
    fn simplify_reduces_the_textbook_conditional() {
        let e = prod(
            vec![p(&["Z"], &["X"]), p(&["X"], &["Y"]), p(&["Y"], &[])],
            &[],
        );
        let marginal = e.marginalize(["Z"]);
        let c = marginal.conditional(["Y"], &ValueContext::new()).unwrap();
        assert_eq!(c.simplify(), p(&["X"], &["Y"]));
    }

    #[test]
    fn simplify_keeps_published_conditional_divisor() {
        let e = p(&["Z"], &["W", "X"]);
        let c = e
            .conditional(["W"], &ValueContext::intervened(["X"]))
            .unwrap();
        assert_eq!(c.simplify(), c);
    }

    #[test]
    fn simplify_factors_out_constants() {
        let e = prod(
            vec![p(&["Y"], &["X"]), p(&["X"], &[]), p(&["W"], &[])],
            &["X"],
        );
        let expected = prod(
            vec![
                prod(vec![p(&["Y"], &["X"]), p(&["X"], &[])], &["X"]),
                p(&["W"], &[]),
            ],
            &[],
        );
        assert_eq!(e.simplify(), expected);
        let twice = e.simplify().simplify();
        assert_eq!(twice, e.simplify());
    }
}
