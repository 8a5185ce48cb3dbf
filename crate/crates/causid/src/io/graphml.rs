//! GraphML input.
//!
//! Two encodings of confounders are accepted:
//!
//! - *standard*: a confounder is a single edge element that is undirected
//!   (`directed="false"`, or an undirected graph default) or drawn with
//!   arrowheads at both ends (yEd `<y:Arrows source=".." target=".."/>`);
//! - *internal*: a confounder is a pair of opposite directed edges, each
//!   carrying an edge attribute named `description` with value `U`.
//!
//! Element names are matched without their namespace, so files with and
//! without the GraphML namespace declaration both work. Visual attributes
//! are ignored.

use std::collections::{BTreeSet, HashMap};

use causid_core::{CausalDiagram, GraphError};
use roxmltree::{Document, Node};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Notation {
    #[default]
    Standard,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphmlError {
    #[error("malformed XML: {0}")]
    MalformedXml(String),
    #[error("no <graph> element found")]
    NoGraph,
    #[error("edge refers to unknown node `{0}`")]
    DanglingEdge(String),
    #[error("confounder edge `{0}` -> `{1}` has no reverse edge marked `U`")]
    UnpairedInternalEdge(String, String),
    #[error("edge `{0}` - `{1}` does not fit the selected notation")]
    MixedNotation(String, String),
    #[error("directed edges `{0}` -> `{1}` and `{1}` -> `{0}` without a confounder marker")]
    DoubleDirectedPair(String, String),
    #[error("{given} node names given for {nodes} nodes")]
    NameCount { given: usize, nodes: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// How node names are chosen.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NameOptions {
    /// Names in document order. Fills nodes without a name in the file, or
    /// replaces every name when `ignore_file_names` is set.
    pub names: Option<Vec<String>>,
    pub ignore_file_names: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shape {
    Directed,
    Reversed,
    Undirected,
}

struct RawEdge {
    source: String,
    target: String,
    shape: Shape,
    unobserved: bool,
}

fn local<'a>(n: &Node<'a, '_>) -> &'a str {
    n.tag_name().name()
}

fn attr<'a>(n: &Node<'a, '_>, name: &str) -> Option<&'a str> {
    n.attributes().find(|a| a.name() == name).map(|a| a.value())
}

fn text_of(n: &Node) -> String {
    n.descendants()
        .filter(|d| d.is_text())
        .filter_map(|d| d.text())
        .collect::<String>()
        .trim()
        .to_string()
}

/// Parses a GraphML document. Node order is document order.
pub fn parse_graphml(
    text: &str,
    notation: Notation,
    naming: &NameOptions,
) -> Result<CausalDiagram, GraphmlError> {
    let doc = Document::parse(text).map_err(|e| GraphmlError::MalformedXml(e.to_string()))?;
    let root = doc.root_element();

    // key id -> (domain, attribute name)
    let mut keys: HashMap<&str, (&str, &str)> = HashMap::new();
    for k in root
        .descendants()
        .filter(|n| n.is_element() && local(n) == "key")
    {
        if let Some(id) = attr(&k, "id") {
            keys.insert(
                id,
                (
                    attr(&k, "for").unwrap_or("all"),
                    attr(&k, "attr.name").unwrap_or(""),
                ),
            );
        }
    }
    let key_named = |id: &str, domain: &str, names: &[&str]| {
        keys.get(id)
            .is_some_and(|(d, n)| (*d == domain || *d == "all") && names.contains(n))
    };

    let graph = root
        .descendants()
        .find(|n| n.is_element() && local(n) == "graph")
        .ok_or(GraphmlError::NoGraph)?;
    let default_directed = attr(&graph, "edgedefault") != Some("undirected");

    let mut ids = Vec::new();
    let mut file_names: Vec<Option<String>> = Vec::new();
    for node in graph
        .children()
        .filter(|n| n.is_element() && local(n) == "node")
    {
        ids.push(attr(&node, "id").unwrap_or("").to_string());
        let from_data = node
            .children()
            .filter(|d| d.is_element() && local(d) == "data")
            .find(|d| attr(d, "key").is_some_and(|k| key_named(k, "node", &["name", "label"])))
            .map(|d| text_of(&d));
        let from_yed = node
            .descendants()
            .find(|d| d.is_element() && local(d) == "NodeLabel")
            .map(|d| text_of(&d));
        file_names.push(from_data.or(from_yed).filter(|s| !s.is_empty()));
    }

    let names = choose_names(&file_names, naming)?;
    let name_of: HashMap<&str, &str> = ids
        .iter()
        .map(String::as_str)
        .zip(names.iter().map(String::as_str))
        .collect();

    let mut edges = Vec::new();
    for e in graph
        .children()
        .filter(|n| n.is_element() && local(n) == "edge")
    {
        let endpoint = |a: &str| -> Result<String, GraphmlError> {
            let id = attr(&e, a).unwrap_or("");
            name_of
                .get(id)
                .map(|s| s.to_string())
                .ok_or_else(|| GraphmlError::DanglingEdge(id.to_string()))
        };
        let (source, target) = (endpoint("source")?, endpoint("target")?);
        let mut shape = match attr(&e, "directed") {
            Some("false") => Shape::Undirected,
            Some("true") => Shape::Directed,
            _ if default_directed => Shape::Directed,
            _ => Shape::Undirected,
        };
        if let Some(arrows) = e
            .descendants()
            .find(|d| d.is_element() && local(d) == "Arrows")
        {
            let head = |side: &str| attr(&arrows, side).is_some_and(|v| v != "none");
            shape = match (head("source"), head("target")) {
                (false, true) => Shape::Directed,
                (true, false) => Shape::Reversed,
                _ => Shape::Undirected,
            };
        }
        let unobserved = e
            .children()
            .filter(|d| d.is_element() && local(d) == "data")
            .any(|d| {
                attr(&d, "key").is_some_and(|k| key_named(k, "edge", &["description"]))
                    && text_of(&d) == "U"
            });
        edges.push(RawEdge {
            source,
            target,
            shape,
            unobserved,
        });
    }

    assemble(&names, edges, notation)
}

fn choose_names(
    file_names: &[Option<String>],
    naming: &NameOptions,
) -> Result<Vec<String>, GraphmlError> {
    if let Some(given) = &naming.names {
        if given.len() != file_names.len() {
            return Err(GraphmlError::NameCount {
                given: given.len(),
                nodes: file_names.len(),
            });
        }
    }
    Ok(file_names
        .iter()
        .enumerate()
        .map(|(i, file)| {
            let file = if naming.ignore_file_names {
                None
            } else {
                file.clone()
            };
            file.or_else(|| naming.names.as_ref().map(|n| n[i].clone()))
                .unwrap_or_else(|| format!("v{}", i + 1))
        })
        .collect())
}

fn assemble(
    names: &[String],
    edges: Vec<RawEdge>,
    notation: Notation,
) -> Result<CausalDiagram, GraphmlError> {
    let mut directed: BTreeSet<(String, String)> = BTreeSet::new();
    let mut bidirected: BTreeSet<(String, String)> = BTreeSet::new();
    let mut marked: BTreeSet<(String, String)> = BTreeSet::new();
    let mut directed_order = Vec::new();
    let mut bidirected_order = Vec::new();

    for e in edges {
        let (a, b) = match e.shape {
            Shape::Reversed => (e.target, e.source),
            _ => (e.source, e.target),
        };
        match (notation, e.shape, e.unobserved) {
            (Notation::Standard, _, true) | (Notation::Internal, Shape::Undirected, _) => {
                return Err(GraphmlError::MixedNotation(a, b))
            }
            (Notation::Standard, Shape::Undirected, false) => {
                let key = if a <= b { (a, b) } else { (b, a) };
                if bidirected.insert(key.clone()) {
                    bidirected_order.push(key);
                }
            }
            (Notation::Internal, _, true) => {
                marked.insert((a, b));
            }
            (_, _, false) => {
                if directed.insert((a.clone(), b.clone())) {
                    directed_order.push((a, b));
                }
            }
        }
    }

    for (a, b) in &marked {
        if !marked.contains(&(b.clone(), a.clone())) {
            return Err(GraphmlError::UnpairedInternalEdge(a.clone(), b.clone()));
        }
        if a < b {
            let key = (a.clone(), b.clone());
            if bidirected.insert(key.clone()) {
                bidirected_order.push(key);
            }
        }
    }
    for (a, b) in &directed_order {
        if a < b && directed.contains(&(b.clone(), a.clone())) {
            return Err(GraphmlError::DoubleDirectedPair(a.clone(), b.clone()));
        }
    }

    Ok(CausalDiagram::build(
        names,
        directed_order.iter().map(|(a, b)| (a, b)),
        bidirected_order.iter().map(|(a, b)| (a, b)),
    )?)
}
