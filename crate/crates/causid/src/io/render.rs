//! Printing expressions as LaTeX, plain text or JSON.
//!
//! Every summation is bracketed, so nested sums and fractions never need
//! precedence rules.

use causid_core::Expression;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Latex,
    Text,
    Json,
}

pub fn render(e: &Expression, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Latex => latex(e, &mut out),
        Format::Text => text(e, &mut out),
        Format::Json => {
            out = serde_json::to_string_pretty(e).expect("expressions always serialize")
        }
    }
    out
}

fn probability(var: &[String], cond: &[String], out: &mut String) {
    out.push_str("P(");
    out.push_str(&var.join(","));
    if !cond.is_empty() {
        out.push('|');
        out.push_str(&cond.join(","));
    }
    out.push(')');
}

fn latex(e: &Expression, out: &mut String) {
    let sumset = e.sumset();
    if !sumset.is_empty() {
        out.push_str("\\left(\\sum_{");
        out.push_str(&sumset.join(","));
        out.push('}');
    }
    match e {
        Expression::Atomic { var, cond, .. } => probability(var, cond, out),
        Expression::Product { children, .. } => children.iter().for_each(|c| latex(c, out)),
        Expression::Fraction {
            numerator, divisor, ..
        } => {
            out.push_str("\\frac{");
            latex(numerator, out);
            out.push_str("}{");
            latex(divisor, out);
            out.push('}');
        }
    }
    if !sumset.is_empty() {
        out.push_str("\\right)");
    }
}

fn text(e: &Expression, out: &mut String) {
    let sumset = e.sumset();
    if !sumset.is_empty() {
        out.push_str("(sum_{");
        out.push_str(&sumset.join(","));
        out.push_str("} ");
    }
    match e {
        Expression::Atomic { var, cond, .. } => probability(var, cond, out),
        Expression::Product { children, .. } => {
            for (i, c) in children.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                text(c, out);
            }
        }
        Expression::Fraction {
            numerator, divisor, ..
        } => {
            out.push('[');
            text(numerator, out);
            out.push_str("] / [");
            text(divisor, out);
            out.push(']');
        }
    }
    if !sumset.is_empty() {
        out.push(')');
    }
}
