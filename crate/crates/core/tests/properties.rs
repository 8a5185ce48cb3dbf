//! Structural invariants over random diagrams.

use causid_core::testing::arb_diagram;
use causid_core::{
    c_components, d_separated, id, idc, identify, verify_hedge, CausalDiagram, IdOptions,
    IdentResult, NodeSet, Query,
};
use proptest::prelude::*;

fn arb_subset(g: &CausalDiagram) -> impl Strategy<Value = NodeSet> {
    let ids: Vec<_> = g.nodes().iter().collect();
    proptest::collection::vec(any::<bool>(), ids.len()).prop_map(move |mask| {
        ids.iter()
            .zip(mask)
            .filter(|(_, keep)| *keep)
            .map(|(&id, _)| id)
            .collect()
    })
}

fn with_subsets(max_nodes: usize) -> impl Strategy<Value = (CausalDiagram, NodeSet, NodeSet)> {
    arb_diagram(max_nodes, 0.35, 0.25).prop_flat_map(|g| {
        let (a, b) = (arb_subset(&g), arb_subset(&g));
        (Just(g), a, b)
    })
}

/// Components by repeated relaxation over the bidirected edge list.
fn components_by_labels(g: &CausalDiagram) -> Vec<NodeSet> {
    let ids: Vec<_> = g.nodes().iter().collect();
    let mut label: Vec<usize> = (0..ids.len()).collect();
    let pos = |id| ids.iter().position(|&v| v == id).unwrap();
    let mut changed = true;
    while changed {
        changed = false;
        for (a, b) in g.bidirected_edges() {
            let (i, j) = (pos(a), pos(b));
            let m = label[i].min(label[j]);
            if label[i] != m || label[j] != m {
                label[i] = m;
                label[j] = m;
                changed = true;
            }
        }
    }
    let mut out: Vec<NodeSet> = Vec::new();
    for l in 0..ids.len() {
        let part: NodeSet = ids
            .iter()
            .zip(&label)
            .filter(|(_, &k)| k == l)
            .map(|(&id, _)| id)
            .collect();
        if !part.is_empty() {
            out.push(part);
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn c_components_partition_the_nodes(g in arb_diagram(7, 0.3, 0.3)) {
        let parts = c_components(&g);
        let mut seen = NodeSet::new();
        for c in parts.components() {
            prop_assert!(!c.is_empty());
            prop_assert!(seen.is_disjoint(c));
            seen = &seen | c;
        }
        prop_assert_eq!(&seen, g.nodes());
        // No bidirected edge crosses two components.
        for (a, b) in g.bidirected_edges() {
            prop_assert_eq!(parts.component_of(a), parts.component_of(b));
        }
        let expected = components_by_labels(&g);
        prop_assert_eq!(parts.components(), expected.as_slice());
    }

    #[test]
    fn closures_are_reflexive_monotone_and_idempotent((g, a, b) in with_subsets(7)) {
        let an = g.ancestors(&a);
        prop_assert!(a.is_subset(&an));
        prop_assert_eq!(g.ancestors(&an), an.clone());
        prop_assert!(an.is_subset(&g.ancestors(&(&a | &b))));
        let de = g.descendants(&a);
        prop_assert!(a.is_subset(&de));
        for u in g.nodes().iter() {
            for v in g.nodes().iter() {
                let u_anc_v = g.ancestors(&NodeSet::singleton(v)).contains(u);
                let v_desc_u = g.descendants(&NodeSet::singleton(u)).contains(v);
                prop_assert_eq!(u_anc_v, v_desc_u);
            }
        }
    }

    #[test]
    fn topological_order_survives_subgraphs((g, keep, _) in with_subsets(8)) {
        prop_assert!(g.topological_order().is_valid_for(&g));
        let sub = g.induced_subgraph(&keep).unwrap();
        prop_assert!(sub.topological_order().is_valid_for(&sub));
        prop_assert_eq!(sub.nodes(), &keep);
    }

    #[test]
    fn mutilation_commutes_with_induced_subgraphs((g, keep, cut) in with_subsets(7)) {
        let cut_out = &g.nodes().clone() - &cut;
        let left = g.mutilate(&cut, &cut_out).unwrap().induced_subgraph(&keep).unwrap();
        let right = g
            .induced_subgraph(&keep)
            .unwrap()
            .mutilate(&(&cut & &keep), &(&cut_out & &keep))
            .unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn d_separation_is_symmetric_and_decomposes((g, a, b) in with_subsets(6)) {
        let x = &a - &b;
        let y = &b - &a;
        let rest = &(g.nodes() - &x) - &y;
        let z: NodeSet = rest.iter().step_by(2).collect();
        prop_assume!(!x.is_empty() && !y.is_empty());
        let sep = d_separated(&g, &x, &y, &z).unwrap();
        prop_assert_eq!(sep, d_separated(&g, &y, &x, &z).unwrap());
        if sep {
            for v in y.iter() {
                prop_assert!(d_separated(&g, &x, &NodeSet::singleton(v), &z).unwrap());
            }
        }
    }

    #[test]
    fn identification_is_sound_in_structure((g, a, b) in with_subsets(6)) {
        let y = &a - &b;
        prop_assume!(!y.is_empty());
        let x = &b - &a;
        let q = Query::new(y.clone(), x.clone(), NodeSet::new());
        match identify(&g, &q, IdOptions::default()).unwrap() {
            IdentResult::Identified(e) => {
                // Outcomes stay free. Intervention values may too, including
                // those of non-ancestors the recursion adds to x.
                let free = g.node_set(e.free_variables()).unwrap();
                prop_assert!(y.is_subset(&free));
                let once = e.simplify();
                prop_assert_eq!(once.simplify(), once);
            }
            IdentResult::NotIdentifiable(h) => {
                prop_assert_eq!(verify_hedge(&g, &h.certificate), Ok(()));
            }
        }
    }

    #[test]
    fn conditional_entry_with_nothing_observed_matches_id((g, a, b) in with_subsets(6)) {
        let y = &a - &b;
        prop_assume!(!y.is_empty());
        let x = &b - &a;
        let order = g.topological_order();
        let joint = causid_core::Expression::atomic(g.names(g.nodes()), [] as [&str; 0]).unwrap();
        let opts = IdOptions::default();
        prop_assert_eq!(
            idc(&y, &x, &NodeSet::new(), &joint, &g, &order, opts).unwrap(),
            id(&y, &x, &joint, &g, &order, opts).unwrap()
        );
    }
}
