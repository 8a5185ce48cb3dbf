//! Helpers shared by the integration tests.

#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::PathBuf;

use causid::core::CausalDiagram;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// GraphML with confounders as undirected edge elements, namespaced, with
/// node names in a `name` key.
pub fn standard_graphml(g: &CausalDiagram) -> String {
    let mut out = String::from(
        "<?xml version=\"1.0\"?>\n<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n\
         <key id=\"nm\" for=\"node\" attr.name=\"name\" attr.type=\"string\"/>\n<graph edgedefault=\"directed\">\n",
    );
    for id in g.nodes().iter() {
        let _ = writeln!(
            out,
            "<node id=\"n{}\"><data key=\"nm\">{}</data></node>",
            id.index(),
            escape(g.name(id))
        );
    }
    for (a, b) in g.directed_edges() {
        let _ = writeln!(
            out,
            "<edge source=\"n{}\" target=\"n{}\"/>",
            a.index(),
            b.index()
        );
    }
    for (a, b) in g.bidirected_edges() {
        let _ = writeln!(
            out,
            "<edge source=\"n{}\" target=\"n{}\" directed=\"false\"/>",
            a.index(),
            b.index()
        );
    }
    out.push_str("</graph>\n</graphml>\n");
    out
}

/// GraphML with confounders as opposite directed edges marked `U`, without
/// a namespace and with names in a `label` key.
pub fn internal_graphml(g: &CausalDiagram) -> String {
    let mut out = String::from(
        "<graphml>\n<key id=\"lb\" for=\"node\" attr.name=\"label\"/>\n\
         <key id=\"ds\" for=\"edge\" attr.name=\"description\"/>\n<graph>\n",
    );
    for id in g.nodes().iter() {
        let _ = writeln!(
            out,
            "<node id=\"v{}\"><data key=\"lb\">{}</data></node>",
            id.index(),
            escape(g.name(id))
        );
    }
    for (a, b) in g.bidirected_edges() {
        for (s, t) in [(a, b), (b, a)] {
            let _ = writeln!(
                out,
                "<edge source=\"v{}\" target=\"v{}\"><data key=\"ds\">U</data></edge>",
                s.index(),
                t.index()
            );
        }
    }
    for (a, b) in g.directed_edges() {
        let _ = writeln!(
            out,
            "<edge source=\"v{}\" target=\"v{}\"/>",
            a.index(),
            b.index()
        );
    }
    out.push_str("</graph>\n</graphml>\n");
    out
}
