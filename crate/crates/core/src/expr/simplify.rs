use alloc::boxed::Box;
use alloc::string::String;
use alloc::vec::Vec;

use super::Expression;

// Each pass strictly shrinks the tree or its sumsets, so this is only a guard.
const MAX_PASSES: usize = 64;

pub(super) fn simplify(e: &Expression) -> Expression {
    let mut current = e.clone().normalize();
    for _ in 0..MAX_PASSES {
        let next = pass(current.clone()).normalize();
        if next == current {
            break;
        }
        current = next;
    }
    current
}

fn pass(e: Expression) -> Expression {
    match e {
        Expression::Atomic { .. } => e,
        Expression::Product { children, sumset } => {
            let children = children.into_iter().map(pass).collect();
            product_rules(children, sumset)
        }
        Expression::Fraction {
            numerator,
            divisor,
            sumset,
        } => fraction_rules(pass(*numerator), pass(*divisor), sumset),
    }
}

/// `Σ_A P(A | C)` with nothing left over is identically one.
fn is_unit(e: &Expression) -> bool {
    match e {
        Expression::Atomic { var, sumset, .. } => {
            var.len() == sumset.len() && var.iter().all(|v| sumset.contains(v))
        }
        _ => false,
    }
}

fn product_rules(mut children: Vec<Expression>, mut sumset: Vec<String>) -> Expression {
    while children.len() > 1 {
        match children.iter().position(is_unit) {
            Some(i) => {
                children.remove(i);
            }
            None => break,
        }
    }

    // Summing a factor's own variables when nothing else depends on them.
    let mut i = 0;
    while i < children.len() && !sumset.is_empty() {
        if let Expression::Atomic {
            var,
            cond,
            sumset: own,
        } = &children[i]
        {
            let summed: Vec<String> = var.iter().filter(|v| sumset.contains(v)).cloned().collect();
            let elsewhere = children
                .iter()
                .enumerate()
                .any(|(j, c)| j != i && c.mentions_any(&summed));
            if own.is_empty() && !summed.is_empty() && !elsewhere {
                let rest: Vec<String> = var
                    .iter()
                    .filter(|v| !summed.contains(v))
                    .cloned()
                    .collect();
                // A lone factor summed over all its variables stays as written
                // rather than becoming a bare 1.
                if !rest.is_empty() || children.len() > 1 {
                    sumset.retain(|s| !summed.contains(s));
                    if rest.is_empty() {
                        children.remove(i);
                        continue;
                    }
                    let cond = cond.clone();
                    children[i] = Expression::Atomic {
                        var: rest,
                        cond,
                        sumset: Vec::new(),
                    };
                }
            }
        }
        i += 1;
    }

    // Moving constant factors out of the sum.
    if !sumset.is_empty() {
        let inside: Vec<bool> = children.iter().map(|c| c.mentions_any(&sumset)).collect();
        if inside.iter().any(|&b| b) && inside.iter().any(|&b| !b) {
            let first_inside = inside
                .iter()
                .position(|&b| b)
                .expect("some factor is inside");
            let mut outer = Vec::new();
            let mut inner = Vec::new();
            for (c, keep_inside) in children.into_iter().zip(&inside) {
                if *keep_inside {
                    inner.push(c);
                } else {
                    outer.push(c);
                }
            }
            let summed = Expression::Product {
                children: inner,
                sumset,
            };
            let at = inside[..first_inside].iter().filter(|&&b| !b).count();
            outer.insert(at, summed);
            return Expression::Product {
                children: outer,
                sumset: Vec::new(),
            };
        }
    }
    Expression::Product { children, sumset }
}

fn factors(e: Expression) -> Vec<Expression> {
    match e {
        Expression::Product { children, sumset } if sumset.is_empty() => children,
        other => alloc::vec![other],
    }
}

fn from_factors(mut v: Vec<Expression>) -> Expression {
    if v.len() == 1 {
        v.pop().expect("one factor")
    } else {
        Expression::Product {
            children: v,
            sumset: Vec::new(),
        }
    }
}

fn fraction_rules(numerator: Expression, divisor: Expression, sumset: Vec<String>) -> Expression {
    let mut num = factors(numerator);
    let mut den = factors(divisor);
    let mut i = 0;
    while i < den.len() {
        match num.iter().position(|n| *n == den[i]) {
            Some(j) if num.len() > 1 => {
                num.remove(j);
                den.remove(i);
            }
            _ => i += 1,
        }
    }
    let numerator = from_factors(num);
    if den.is_empty() {
        let mut out = numerator;
        if sumset.iter().any(|s| out.sumset().contains(s)) {
            return Expression::Product {
                children: alloc::vec![out],
                sumset,
            };
        }
        out.sumset_mut().extend(sumset);
        return out;
    }
    Expression::Fraction {
        numerator: Box::new(numerator),
        divisor: Box::new(from_factors(den)),
        sumset,
    }
}
