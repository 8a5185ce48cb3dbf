//! Diagram generators for tests: proptest strategies and exhaustive
//! enumeration of small diagrams.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use proptest::prelude::*;

use crate::graph::CausalDiagram;
use crate::nodeset::NodeSet;

fn labels(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| {
            if n <= 26 {
                String::from(char::from(b'A' + i as u8))
            } else {
                format!("V{i}")
            }
        })
        .collect()
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

/// Random diagrams with `1..=max_nodes` nodes.
///
/// Directed edges follow a hidden random causal order, so the diagram order
/// (the label order) is usually not topological. Each pair gets a directed
/// edge with probability `density` and, independently, a bidirected edge
/// with probability `confounding`.
pub fn arb_diagram(
    max_nodes: usize,
    density: f64,
    confounding: f64,
) -> impl Strategy<Value = CausalDiagram> {
    (1..=max_nodes).prop_flat_map(move |n| {
        let m = pairs(n).len();
        (
            Just(n),
            Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
            proptest::collection::vec(proptest::bool::weighted(density), m),
            proptest::collection::vec(proptest::bool::weighted(confounding), m),
        )
            .prop_map(|(n, rank, directed, bidirected)| {
                let names = labels(n);
                let mut d = Vec::new();
                let mut b = Vec::new();
                for (k, &(i, j)) in pairs(n).iter().enumerate() {
                    // Orient by hidden rank: `rank[a]` is the causal position of node a.
                    let (from, to) = if rank[i] < rank[j] { (i, j) } else { (j, i) };
                    if directed[k] {
                        d.push((names[from].as_str(), names[to].as_str()));
                    }
                    if bidirected[k] {
                        b.push((names[i].as_str(), names[j].as_str()));
                    }
                }
                CausalDiagram::build(names.iter().map(String::as_str), d, b)
                    .expect("acyclic by construction")
            })
    })
}

/// Every diagram over the labels `A, B, ...` with exactly `n` nodes and at
/// most `max_bidirected` bidirected edges.
///
/// Directed parts range over all labeled DAGs, so isomorphic diagrams are
/// repeated under each labeling.
pub fn enumerate_diagrams(n: usize, max_bidirected: usize) -> Vec<CausalDiagram> {
    let names = labels(n);
    let all_pairs = pairs(n);
    let m = all_pairs.len();
    let bidirected_sets: Vec<Vec<(usize, usize)>> = (0u32..1 << m)
        .filter(|mask| mask.count_ones() as usize <= max_bidirected)
        .map(|mask| {
            (0..m)
                .filter(|k| mask & (1 << k) != 0)
                .map(|k| all_pairs[k])
                .collect()
        })
        .collect();

    let mut out = Vec::new();
    // Each pair is absent, forward or backward: base-3 digits.
    let combos = 3usize.pow(m as u32);
    for code in 0..combos {
        let mut c = code;
        let mut directed = Vec::new();
        for &(i, j) in &all_pairs {
            match c % 3 {
                1 => directed.push((names[i].as_str(), names[j].as_str())),
                2 => directed.push((names[j].as_str(), names[i].as_str())),
                _ => {}
            }
            c /= 3;
        }
        if CausalDiagram::build(
            names.iter().map(String::as_str),
            directed.iter().copied(),
            [],
        )
        .is_err()
        {
            continue;
        }
        for set in &bidirected_sets {
            let bi = set
                .iter()
                .map(|&(i, j)| (names[i].as_str(), names[j].as_str()));
            let g = CausalDiagram::build(
                names.iter().map(String::as_str),
                directed.iter().copied(),
                bi,
            )
            .expect("base diagram is valid");
            out.push(g);
        }
    }
    out
}

/// d-separation decided by listing every simple path.
///
/// Each bidirected edge is replaced by an explicit latent parent of both
/// endpoints, and `x` and `y` are d-separated by `z` when no path between
/// them is open: every collider on it has itself or a descendant in `z`,
/// and no other interior node is in `z`. Exponential, for small graphs only.
pub fn d_separated_by_paths(g: &CausalDiagram, x: &NodeSet, y: &NodeSet, z: &NodeSet) -> bool {
    let expanded = Expanded::new(g, y, z);
    let mut on_path = vec![false; expanded.total];
    for start in x.iter() {
        let mut path = vec![start.index()];
        on_path[start.index()] = true;
        let open = expanded.open_path_from(&mut path, &mut on_path);
        on_path[start.index()] = false;
        if open {
            return false;
        }
    }
    true
}

struct Expanded {
    total: usize,
    neighbours: Vec<Vec<usize>>,
    /// `edge[a * total + b]` when `a -> b`.
    edge: Vec<bool>,
    in_z: Vec<bool>,
    is_y: Vec<bool>,
    /// The node or one of its descendants is in `z`.
    activated: Vec<bool>,
}

impl Expanded {
    fn new(g: &CausalDiagram, y: &NodeSet, z: &NodeSet) -> Self {
        let n = g.node_count();
        let mut children: Vec<Vec<usize>> = (0..n).map(|_| Vec::new()).collect();
        for (a, b) in g.directed_edges() {
            children[a.index()].push(b.index());
        }
        for (a, b) in g.bidirected_edges() {
            children.push(vec![a.index(), b.index()]);
        }
        let total = children.len();
        let mut neighbours: Vec<Vec<usize>> = (0..total).map(|_| Vec::new()).collect();
        let mut edge = vec![false; total * total];
        for (a, cs) in children.iter().enumerate() {
            for &b in cs {
                neighbours[a].push(b);
                neighbours[b].push(a);
                edge[a * total + b] = true;
            }
        }
        let member = |s: &NodeSet| -> Vec<bool> {
            (0..total)
                .map(|v| v < n && s.iter().any(|id| id.index() == v))
                .collect()
        };
        let in_z = member(z);
        let activated = (0..total)
            .map(|v| {
                let mut seen = vec![false; total];
                let mut stack = vec![v];
                while let Some(u) = stack.pop() {
                    if in_z[u] {
                        return true;
                    }
                    for &c in &children[u] {
                        if !seen[c] {
                            seen[c] = true;
                            stack.push(c);
                        }
                    }
                }
                false
            })
            .collect();
        Expanded {
            total,
            neighbours,
            edge,
            is_y: member(y),
            in_z,
            activated,
        }
    }

    /// Whether some open path extends `path` to a node of `y`.
    fn open_path_from(&self, path: &mut Vec<usize>, on_path: &mut [bool]) -> bool {
        let last = *path.last().expect("paths are nonempty");
        for &next in &self.neighbours[last] {
            if on_path[next] {
                continue;
            }
            if let Some(&prev) = path.len().checked_sub(2).map(|i| &path[i]) {
                let collider =
                    self.edge[prev * self.total + last] && self.edge[next * self.total + last];
                let blocked = if collider {
                    !self.activated[last]
                } else {
                    self.in_z[last]
                };
                if blocked {
                    continue;
                }
            }
            if self.is_y[next] {
                return true;
            }
            on_path[next] = true;
            path.push(next);
            let found = self.open_path_from(path, on_path);
            path.pop();
            on_path[next] = false;
            if found {
                return true;
            }
        }
        false
    }
}
