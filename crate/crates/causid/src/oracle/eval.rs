use causid_core::{Expression, Marker, ValueContext};

use super::table::JointTable;
use super::OracleError;

/// Evaluates `e` against an observational joint.
///
/// The result is a table over the free variables of `e`. Conditionals are
/// read off `joint`; a sum over a variable that the summand does not
/// mention multiplies by that variable's cardinality.
pub fn evaluate(e: &Expression, joint: &JointTable) -> Result<JointTable, OracleError> {
    let body = match e {
        Expression::Atomic { var, cond, .. } => joint.conditional(var, cond)?,
        Expression::Product { children, .. } => {
            let mut acc = JointTable::scalar(1.0);
            for c in children {
                acc = acc.try_product(&evaluate(c, joint)?)?;
            }
            acc
        }
        Expression::Fraction {
            numerator, divisor, ..
        } => evaluate(numerator, joint)?.divide(&evaluate(divisor, joint)?)?,
    };
    let mut out = body;
    for s in e.sumset() {
        out = if out.vars().contains(s) {
            out.sum_out(s)
        } else {
            let card = joint
                .card(s)
                .ok_or_else(|| OracleError::UnknownVariable(s.clone()))?;
            out.scale(card as f64)
        };
    }
    Ok(out)
}

/// [`evaluate`], after checking that no free variable of `e` is marked as
/// summation-bound in `ctx`. Unmarked variables are treated as free.
pub fn evaluate_expression(
    e: &Expression,
    joint: &JointTable,
    ctx: &ValueContext,
) -> Result<JointTable, OracleError> {
    if let Some(bad) = e
        .free_variables()
        .into_iter()
        .find(|v| ctx.get(v) == Some(Marker::SummationBound))
    {
        return Err(OracleError::ContextMismatch(bad));
    }
    evaluate(e, joint)
}

/// `I(X; Y | Z)` in nats under `joint`.
pub fn conditional_mutual_information(
    joint: &JointTable,
    x: &[&str],
    y: &[&str],
    z: &[&str],
) -> Result<f64, OracleError> {
    let all: Vec<&str> = x.iter().chain(y).chain(z).copied().collect();
    let xz: Vec<&str> = x.iter().chain(z).copied().collect();
    let yz: Vec<&str> = y.iter().chain(z).copied().collect();
    let pxyz = joint.marginal(&all)?;
    let pxz = joint.marginal(&xz)?;
    let pyz = joint.marginal(&yz)?;
    let pz = joint.marginal(z)?;
    let mut total = 0.0;
    let mut it = pxyz.assignments();
    while let Some(states) = it.next_ref() {
        let p = pxyz.at(states);
        if p == 0.0 {
            continue;
        }
        let assign: Vec<(&str, usize)> = all.iter().copied().zip(states.iter().copied()).collect();
        let ratio = p * pz.get(&assign)? / (pxz.get(&assign)? * pyz.get(&assign)?);
        total += p * ratio.ln();
    }
    Ok(total)
}
