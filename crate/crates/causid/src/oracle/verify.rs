use std::collections::HashMap;

use causid_core::{
    identify, verify_hedge, CausalDiagram, Expression, Hedge, IdOptions, IdentResult, NodeSet,
    Query,
};
use serde::Serialize;

use super::eval::evaluate;
use super::scm::DiscreteScm;
use super::table::{Assignments, JointTable};
use super::OracleError;

/// Largest deviation tolerated between an identified expression and the
/// true interventional distribution.
pub const TOLERANCE: f64 = 1e-9;

/// A batch of seeded binary models over one diagram, with their
/// observational joints and a cache of interventional joints.
pub struct ModelBank {
    diagram: CausalDiagram,
    models: Vec<DiscreteScm>,
    joints: Vec<JointTable>,
    interventions: HashMap<(usize, Vec<(String, usize)>), JointTable>,
}

impl ModelBank {
    /// Models use seeds `seed, seed + 1, ...`.
    pub fn new(g: &CausalDiagram, n_models: usize, seed: u64) -> Result<Self, OracleError> {
        let models: Vec<DiscreteScm> = (0..n_models as u64)
            .map(|k| DiscreteScm::random_binary(g, seed.wrapping_add(k)))
            .collect();
        let joints = models
            .iter()
            .map(DiscreteScm::observational_joint)
            .collect::<Result<_, _>>()?;
        Ok(ModelBank {
            diagram: g.clone(),
            models,
            joints,
            interventions: HashMap::new(),
        })
    }

    pub fn models(&self) -> &[DiscreteScm] {
        &self.models
    }

    pub fn joints(&self) -> &[JointTable] {
        &self.joints
    }

    fn interventional(
        &mut self,
        model: usize,
        assignment: &[(&str, usize)],
    ) -> Result<&JointTable, OracleError> {
        let key = (
            model,
            assignment
                .iter()
                .map(|&(n, s)| (n.to_string(), s))
                .collect::<Vec<_>>(),
        );
        if !self.interventions.contains_key(&key) {
            let table = self.models[model].interventional(assignment)?;
            self.interventions.insert(key.clone(), table);
        }
        Ok(&self.interventions[&key])
    }

    /// Largest deviation, over all models and all value assignments, between
    /// `e` evaluated on the observational joint and `P_x(y | z)` computed in
    /// the intervened model.
    ///
    /// An identified expression may also mention variables outside the
    /// query: the recursion adds non-ancestors of `y` to the intervention,
    /// and the result holds for every value they take. Such variables are
    /// checked at all of their values.
    pub fn max_deviation(&mut self, e: &Expression, q: &Query) -> Result<f64, OracleError> {
        let g = &self.diagram;
        let names =
            |s: &NodeSet| -> Vec<String> { g.names(s).into_iter().map(String::from).collect() };
        let (y, x, z) = (names(&q.y), names(&q.x), names(&q.z));
        let extra: Vec<String> = e
            .free_variables()
            .into_iter()
            .filter(|v| !y.contains(v) && !x.contains(v) && !z.contains(v))
            .collect();
        let mut worst: f64 = 0.0;
        for m in 0..self.models.len() {
            let value = evaluate(e, &self.joints[m])?;
            let extra_cards = extra
                .iter()
                .map(|v| {
                    value
                        .card(v)
                        .ok_or_else(|| OracleError::UnknownVariable(v.clone()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let mut x_states = Assignments::new(vec![2; x.len()]);
            while let Some(xs) = x_states.next_ref() {
                let xs = xs.to_vec();
                let assignment: Vec<(&str, usize)> = x
                    .iter()
                    .map(String::as_str)
                    .zip(xs.iter().copied())
                    .collect();
                let target = self.interventional(m, &assignment)?.conditional(&y, &z)?;
                let mut rest = target.assignments();
                while let Some(states) = rest.next_ref() {
                    let mut full = assignment.clone();
                    full.extend(
                        target
                            .vars()
                            .iter()
                            .map(String::as_str)
                            .zip(states.iter().copied()),
                    );
                    let want = target.at(states);
                    let mut others = Assignments::new(extra_cards.clone());
                    while let Some(os) = others.next_ref() {
                        let mut cell = full.clone();
                        cell.extend(extra.iter().map(String::as_str).zip(os.iter().copied()));
                        worst = worst.max((value.get(&cell)? - want).abs());
                    }
                }
            }
        }
        Ok(worst)
    }
}

/// Outcome of checking one query numerically.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub identifiable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expression: Option<Expression>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hedge: Option<Hedge>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub hedge_valid: Option<bool>,
    pub models: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_deviation: Option<f64>,
    pub tolerance: f64,
    pub passed: bool,
}

/// Identifies `q` and checks the answer: an expression must match
/// `n_models` seeded binary models within [`TOLERANCE`], a hedge must pass
/// the structural hedge check.
pub fn verify_query(
    g: &CausalDiagram,
    q: &Query,
    n_models: usize,
    seed: u64,
    opts: IdOptions,
) -> Result<VerifyReport, OracleError> {
    match identify(g, q, opts)? {
        IdentResult::Identified(e) => {
            let mut bank = ModelBank::new(g, n_models, seed)?;
            let dev = bank.max_deviation(&e, q)?;
            Ok(VerifyReport {
                identifiable: true,
                expression: Some(e),
                hedge: None,
                hedge_valid: None,
                models: n_models,
                max_deviation: Some(dev),
                tolerance: TOLERANCE,
                passed: dev <= TOLERANCE,
            })
        }
        IdentResult::NotIdentifiable(h) => {
            let valid = verify_hedge(g, &h.certificate).is_ok();
            Ok(VerifyReport {
                identifiable: false,
                expression: None,
                hedge: Some(h),
                hedge_valid: Some(valid),
                models: 0,
                max_deviation: None,
                tolerance: TOLERANCE,
                passed: valid,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values_of_added_interventions_are_quantified() {
        // do(A) on D adds B and C to the intervention; the answer mentions c.
        let g = CausalDiagram::build(
            ["A", "B", "C", "D"],
            [("B", "A"), ("C", "A"), ("A", "D")],
            [("B", "D")],
        )
        .unwrap();
        let q = Query::from_names(&g, ["D"], ["A"], [] as [&str; 0]).unwrap();
        let e = identify(&g, &q, IdOptions::default())
            .unwrap()
            .expression()
            .cloned()
            .unwrap();
        assert!(e.free_variables().contains(&"C".to_string()));
        let mut bank = ModelBank::new(&g, 5, 3).unwrap();
        assert!(bank.max_deviation(&e, &q).unwrap() <= TOLERANCE);

        // A wrong answer that depends on c is caught.
        let wrong = Expression::atomic(["D"], ["A", "C"]).unwrap();
        assert!(bank.max_deviation(&wrong, &q).unwrap() > 1e-6);
    }
}
