//! Published identification results, matched structurally.

use causid_core::{
    identify, verify_hedge, CausalDiagram, Expression, IdOptions, IdentResult, Query,
};

fn p(var: &[&str], cond: &[&str]) -> Expression {
    Expression::atomic(var.iter(), cond.iter()).unwrap()
}

fn strings(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

fn query(g: &CausalDiagram, y: &[&str], x: &[&str], z: &[&str]) -> Query {
    Query::from_names(g, y.iter(), x.iter(), z.iter()).unwrap()
}

fn multi_outcome() -> CausalDiagram {
    CausalDiagram::build(
        ["X", "Z_1", "Y", "Z_3", "Z_2"],
        [
            ("X", "Z_1"),
            ("Z_1", "Y"),
            ("Z_3", "Y"),
            ("Z_2", "X"),
            ("Z_2", "Z_1"),
            ("Z_2", "Z_3"),
        ],
        [("X", "Y"), ("X", "Z_3"), ("X", "Z_2"), ("Y", "Z_2")],
    )
    .unwrap()
}

#[test]
fn multi_outcome_four_factor_expression() {
    let g = multi_outcome();
    let r = identify(
        &g,
        &query(&g, &["Z_1", "Z_2", "Z_3", "Y"], &["X"], &[]),
        IdOptions::default(),
    )
    .unwrap();
    let core = || {
        Expression::product(vec![
            p(&["Y"], &["Z_2", "X", "Z_3", "Z_1"]),
            p(&["Z_3"], &["Z_2", "X"]),
            p(&["X"], &["Z_2"]),
            p(&["Z_2"], &[]),
        ])
        .unwrap()
    };
    let summed = |vars: &[&str]| match core() {
        Expression::Product { children, .. } => Expression::Product {
            children,
            sumset: strings(vars),
        },
        _ => unreachable!(),
    };
    let expected = Expression::product(vec![
        p(&["Z_1"], &["Z_2", "X"]),
        Expression::fraction(summed(&["X"]), summed(&["X", "Y"])),
        summed(&["X", "Z_3", "Y"]),
        p(&["Z_3"], &["Z_2"]),
    ])
    .unwrap();
    assert_eq!(r, IdentResult::Identified(expected));
}

#[test]
fn hedged_certificate_is_a_hedge() {
    let g = CausalDiagram::build(
        ["Z_1", "X", "Z_2", "Y"],
        [("Z_1", "X"), ("X", "Z_2"), ("Z_2", "Y")],
        [("Z_1", "X"), ("Z_1", "Z_2"), ("Z_1", "Y"), ("X", "Y")],
    )
    .unwrap();
    let r = identify(&g, &query(&g, &["Y"], &["X"], &[]), IdOptions::default()).unwrap();
    let h = r.hedge().unwrap();
    assert_eq!(h.forest, strings(&["Z_1", "X", "Z_2"]));
    assert_eq!(h.subforest, strings(&["Z_2"]));
    assert_eq!(verify_hedge(&g, &h.certificate), Ok(()));
}

#[test]
fn simplify_option_shortens_mediated_conditional() {
    let g = CausalDiagram::build(
        ["W", "X", "Z", "Y"],
        [("W", "X"), ("W", "Z"), ("X", "Z"), ("Z", "Y")],
        [("X", "Y")],
    )
    .unwrap();
    let q = query(&g, &["Z"], &["X"], &["W"]);
    let plain = identify(&g, &q, IdOptions::default()).unwrap();
    let simplified = identify(
        &g,
        &q,
        IdOptions {
            simplify: true,
            ..IdOptions::default()
        },
    )
    .unwrap();
    assert_eq!(
        simplified.expression().unwrap(),
        &plain.expression().unwrap().simplify()
    );
}
