//! File formats: fixture files, notation equivalence and round trips.

mod common;

use causid::core::testing::arb_diagram;
use causid::core::CausalDiagram;
use causid::io::{parse_dsl, parse_graphml, render_dsl, GraphmlError, NameOptions, Notation};
use common::{internal_graphml, read_fixture, standard_graphml};
use proptest::prelude::*;

fn graphml(name: &str, notation: Notation) -> Result<CausalDiagram, GraphmlError> {
    parse_graphml(&read_fixture(name), notation, &NameOptions::default())
}

#[test]
fn editor_file_matches_hand_built_diagram() {
    let built = CausalDiagram::build(
        ["W", "X", "Z", "Y"],
        [("W", "X"), ("W", "Z"), ("X", "Z"), ("Z", "Y")],
        [("X", "Y")],
    )
    .unwrap();
    assert_eq!(
        graphml("mediated_standard.graphml", Notation::Standard).unwrap(),
        built
    );
    assert_eq!(
        graphml("mediated_internal.graphml", Notation::Internal).unwrap(),
        built
    );
    assert_eq!(parse_dsl(&read_fixture("mediated.dsl")).unwrap(), built);
}

#[test]
fn undirected_edges_in_standard_notation() {
    assert_eq!(
        graphml("hedged_standard.graphml", Notation::Standard).unwrap(),
        parse_dsl(&read_fixture("hedged.dsl")).unwrap()
    );
}

#[test]
fn unpaired_confounder_is_rejected() {
    assert_eq!(
        graphml("unpaired_internal.graphml", Notation::Internal),
        Err(GraphmlError::UnpairedInternalEdge("v1".into(), "v2".into()))
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn notations_agree(g in arb_diagram(7, 0.35, 0.3)) {
        let none = NameOptions::default();
        prop_assert_eq!(&parse_graphml(&standard_graphml(&g), Notation::Standard, &none).unwrap(), &g);
        prop_assert_eq!(&parse_graphml(&internal_graphml(&g), Notation::Internal, &none).unwrap(), &g);
    }

    #[test]
    fn dsl_round_trip(g in arb_diagram(8, 0.35, 0.3)) {
        prop_assert_eq!(parse_dsl(&render_dsl(&g)).unwrap(), g);
    }
}
