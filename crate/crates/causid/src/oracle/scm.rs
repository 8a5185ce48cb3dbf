use causid_core::{CausalDiagram, NodeId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::table::{Assignments, JointTable};
use super::OracleError;

/// Default cap on the number of cells enumerated by exact inference.
pub const DEFAULT_CELL_CAP: usize = 10_000_000;

/// Smallest raw draw for a table entry before normalization.
const FLOOR: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Parent {
    Observed(usize),
    Latent(usize),
}

#[derive(Debug, Clone, PartialEq)]
struct Mechanism {
    parents: Vec<Parent>,
    /// Rows indexed by parent configuration (first parent slowest), each row
    /// a distribution over the node's states.
    table: Vec<f64>,
}

/// One unobserved common cause per bidirected edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Latent {
    pub endpoints: (String, String),
    pub prior: Vec<f64>,
}

/// A fully specified discrete causal model over a diagram.
///
/// Observed nodes keep the diagram's order. Every bidirected edge becomes a
/// latent parent of its two endpoints; each observed node has a conditional
/// table over its observed parents and incident latents.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteScm {
    names: Vec<String>,
    cards: Vec<usize>,
    latents: Vec<Latent>,
    mechanisms: Vec<Mechanism>,
    /// Observed node indices in a topological order, for sampling.
    topo: Vec<usize>,
    cell_cap: usize,
}

fn random_distribution(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let draws: Vec<f64> = (0..n).map(|_| rng.random_range(FLOOR..1.0)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|d| d / total).collect()
}

impl DiscreteScm {
    /// Samples a strictly positive model. `cards` gives the number of states
    /// of each node in diagram order. The same inputs always give the same
    /// model.
    pub fn random(g: &CausalDiagram, cards: &[usize], seed: u64) -> Result<Self, OracleError> {
        if cards.len() != g.node_count() {
            return Err(OracleError::InvalidCardinality(format!(
                "{} cardinalities for {} nodes",
                cards.len(),
                g.node_count()
            )));
        }
        if let Some(&c) = cards.iter().find(|&&c| c < 2) {
            return Err(OracleError::InvalidCardinality(format!(
                "cardinality {c} is below 2"
            )));
        }
        let ids: Vec<NodeId> = g.nodes().iter().collect();
        let pos = |id: NodeId| {
            ids.iter()
                .position(|&v| v == id)
                .expect("node of the diagram")
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let mut latents = Vec::new();
        let mut latent_cards = Vec::new();
        let mut incident: Vec<Vec<usize>> = vec![Vec::new(); ids.len()];
        for (a, b) in g.bidirected_edges() {
            let (ia, ib) = (pos(a), pos(b));
            let card = cards[ia].max(cards[ib]).max(3);
            incident[ia].push(latents.len());
            incident[ib].push(latents.len());
            latent_cards.push(card);
            latents.push(Latent {
                endpoints: (g.name(a).to_string(), g.name(b).to_string()),
                prior: random_distribution(&mut rng, card),
            });
        }

        let mut mechanisms = Vec::new();
        for (i, &v) in ids.iter().enumerate() {
            let mut parents: Vec<Parent> = g
                .parents(v)
                .iter()
                .map(|p| Parent::Observed(pos(p)))
                .collect();
            parents.extend(incident[i].iter().map(|&l| Parent::Latent(l)));
            let rows: usize = parents
                .iter()
                .map(|p| match *p {
                    Parent::Observed(j) => cards[j],
                    Parent::Latent(l) => latent_cards[l],
                })
                .product();
            let table = (0..rows)
                .flat_map(|_| random_distribution(&mut rng, cards[i]))
                .collect();
            mechanisms.push(Mechanism { parents, table });
        }

        let topo = g
            .topological_order()
            .as_slice()
            .iter()
            .map(|&v| pos(v))
            .collect();
        Ok(DiscreteScm {
            names: ids.iter().map(|&v| g.name(v).to_string()).collect(),
            cards: cards.to_vec(),
            latents,
            mechanisms,
            topo,
            cell_cap: DEFAULT_CELL_CAP,
        })
    }

    /// A model with every node binary.
    pub fn random_binary(g: &CausalDiagram, seed: u64) -> Self {
        Self::random(g, &vec![2; g.node_count()], seed).expect("binary cardinalities are valid")
    }

    pub fn with_cell_cap(mut self, cap: usize) -> Self {
        self.cell_cap = cap;
        self
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn latents(&self) -> &[Latent] {
        &self.latents
    }

    /// Number of conditional tables, one per observed node.
    pub fn mechanism_count(&self) -> usize {
        self.mechanisms.len()
    }

    /// Every probability the model is parameterized by: latent priors, then
    /// mechanism rows.
    pub fn parameters(&self) -> impl Iterator<Item = f64> + '_ {
        self.latents
            .iter()
            .flat_map(|l| l.prior.iter().copied())
            .chain(self.mechanisms.iter().flat_map(|m| m.table.iter().copied()))
    }

    /// Rows of each table, as slices summing to one.
    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        let priors = self.latents.iter().map(|l| l.prior.as_slice());
        let rows = self
            .mechanisms
            .iter()
            .zip(&self.cards)
            .flat_map(|(m, &c)| m.table.chunks(c));
        priors.chain(rows)
    }

    fn latent_card(&self, l: usize) -> usize {
        self.latents[l].prior.len()
    }

    fn index_of(&self, name: &str) -> Result<usize, OracleError> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| OracleError::InvalidAssignment(format!("unknown variable `{name}`")))
    }

    fn mechanism_prob(&self, i: usize, state: usize, observed: &[usize], latent: &[usize]) -> f64 {
        let m = &self.mechanisms[i];
        let mut row = 0;
        for p in &m.parents {
            row = match *p {
                Parent::Observed(j) => row * self.cards[j] + observed[j],
                Parent::Latent(l) => row * self.latent_card(l) + latent[l],
            };
        }
        m.table[row * self.cards[i] + state]
    }

    /// The distribution of the observed nodes with latents summed out.
    pub fn observational_joint(&self) -> Result<JointTable, OracleError> {
        self.interventional(&[])
    }

    /// The distribution of all observed nodes after `do(assignment)`.
    ///
    /// Intervened nodes get point-mass mechanisms; the result is exact.
    pub fn interventional(&self, assignment: &[(&str, usize)]) -> Result<JointTable, OracleError> {
        let mut fixed: Vec<Option<usize>> = vec![None; self.names.len()];
        for &(name, state) in assignment {
            let i = self.index_of(name)?;
            if state >= self.cards[i] {
                return Err(OracleError::InvalidAssignment(format!(
                    "state {state} of `{name}` out of range"
                )));
            }
            fixed[i] = Some(state);
        }
        let observed_cells: usize = self.cards.iter().product();
        let latent_cards: Vec<usize> = (0..self.latents.len())
            .map(|l| self.latent_card(l))
            .collect();
        let latent_cells: usize = latent_cards.iter().product();
        let cells = observed_cells.saturating_mul(latent_cells);
        if cells > self.cell_cap {
            return Err(OracleError::StateSpaceTooLarge {
                cells,
                cap: self.cell_cap,
            });
        }

        let mut probs = vec![0.0; observed_cells];
        let mut latent_it = Assignments::new(latent_cards);
        while let Some(u) = latent_it.next_ref() {
            let weight: f64 = u
                .iter()
                .enumerate()
                .map(|(l, &s)| self.latents[l].prior[s])
                .product();
            let mut obs_it = Assignments::new(self.cards.clone());
            let mut cell = 0;
            while let Some(v) = obs_it.next_ref() {
                let mut p = weight;
                for (i, &state) in v.iter().enumerate() {
                    p *= match fixed[i] {
                        Some(f) => f64::from(u8::from(f == state)),
                        None => self.mechanism_prob(i, state, v, u),
                    };
                    if p == 0.0 {
                        break;
                    }
                }
                probs[cell] += p;
                cell += 1;
            }
        }
        JointTable::new(self.names.clone(), self.cards.clone(), probs)
    }

    /// Draws one joint state of the observed nodes by forward sampling.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> Vec<usize> {
        let latent: Vec<usize> = self.latents.iter().map(|l| draw(rng, &l.prior)).collect();
        let mut observed = vec![0; self.names.len()];
        for &i in &self.topo {
            let row: Vec<f64> = (0..self.cards[i])
                .map(|s| self.mechanism_prob(i, s, &observed, &latent))
                .collect();
            observed[i] = draw(rng, &row);
        }
        observed
    }
}

fn draw<R: Rng>(rng: &mut R, dist: &[f64]) -> usize {
    let mut r: f64 = rng.random();
    for (i, &p) in dist.iter().enumerate() {
        if r < p {
            return i;
        }
        r -= p;
    }
    dist.len() - 1
}
