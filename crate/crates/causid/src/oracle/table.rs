use std::fmt;

use super::OracleError;

/// A dense nonnegative table over named discrete variables.
///
/// Cells are stored row-major with the first variable varying slowest.
/// Joint distributions, conditionals and intermediate products all use
/// this type; only joints are expected to sum to one.
#[derive(Clone, PartialEq)]
pub struct JointTable {
    vars: Vec<String>,
    cards: Vec<usize>,
    probs: Vec<f64>,
}

impl JointTable {
    pub fn new(vars: Vec<String>, cards: Vec<usize>, probs: Vec<f64>) -> Result<Self, OracleError> {
        if vars.len() != cards.len() {
            return Err(OracleError::Shape(format!(
                "{} variables but {} cardinalities",
                vars.len(),
                cards.len()
            )));
        }
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].contains(v) {
                return Err(OracleError::Shape(format!("variable `{v}` listed twice")));
            }
        }
        let cells: usize = cards.iter().product();
        if cells != probs.len() {
            return Err(OracleError::Shape(format!(
                "{} cells expected, {} given",
                cells,
                probs.len()
            )));
        }
        Ok(JointTable { vars, cards, probs })
    }

    /// The constant table with no variables.
    pub fn scalar(value: f64) -> Self {
        JointTable {
            vars: Vec::new(),
            cards: Vec::new(),
            probs: vec![value],
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn cards(&self) -> &[usize] {
        &self.cards
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn card(&self, var: &str) -> Option<usize> {
        self.position(var).map(|i| self.cards[i])
    }

    fn position(&self, var: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == var)
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.cards.len()];
        for i in (0..self.cards.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.cards[i + 1];
        }
        strides
    }

    /// Value at a full assignment given in this table's variable order.
    pub fn at(&self, states: &[usize]) -> f64 {
        let idx = states
            .iter()
            .zip(self.strides())
            .map(|(s, st)| s * st)
            .sum::<usize>();
        self.probs[idx]
    }

    /// Value at an assignment given by name; variables of the table missing
    /// from `assignment` are an error.
    pub fn get(&self, assignment: &[(&str, usize)]) -> Result<f64, OracleError> {
        let mut states = Vec::with_capacity(self.vars.len());
        for (v, &c) in self.vars.iter().zip(&self.cards) {
            let s = assignment
                .iter()
                .find(|(n, _)| n == v)
                .map(|&(_, s)| s)
                .ok_or_else(|| OracleError::UnknownVariable(v.clone()))?;
            if s >= c {
                return Err(OracleError::InvalidAssignment(format!(
                    "state {s} of `{v}` out of range"
                )));
            }
            states.push(s);
        }
        Ok(self.at(&states))
    }

    /// Iterates every assignment in storage order.
    pub fn assignments(&self) -> Assignments {
        Assignments::new(self.cards.clone())
    }

    /// Combines two tables cell by cell over the union of their variables.
    fn combine(
        &self,
        other: &JointTable,
        op: impl Fn(f64, f64) -> Result<f64, OracleError>,
    ) -> Result<JointTable, OracleError> {
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        for (v, &c) in other.vars.iter().zip(&other.cards) {
            match self.position(v) {
                Some(i) if self.cards[i] != c => {
                    return Err(OracleError::Shape(format!(
                        "`{v}` has cardinality {} and {c}",
                        self.cards[i]
                    )))
                }
                Some(_) => {}
                None => {
                    vars.push(v.clone());
                    cards.push(c);
                }
            }
        }
        let sa = self.strides();
        let sb = other.strides();
        // Stride of each result variable in each operand (0 when absent).
        let map_a: Vec<usize> = vars
            .iter()
            .map(|v| self.position(v).map_or(0, |i| sa[i]))
            .collect();
        let map_b: Vec<usize> = vars
            .iter()
            .map(|v| other.position(v).map_or(0, |i| sb[i]))
            .collect();
        let cells: usize = cards.iter().product();
        let mut probs = Vec::with_capacity(cells);
        let mut it = Assignments::new(cards.clone());
        while let Some(states) = it.next_ref() {
            let (mut ia, mut ib) = (0, 0);
            for (k, &s) in states.iter().enumerate() {
                ia += s * map_a[k];
                ib += s * map_b[k];
            }
            probs.push(op(self.probs[ia], other.probs[ib])?);
        }
        Ok(JointTable { vars, cards, probs })
    }

    pub fn product(&self, other: &JointTable) -> JointTable {
        self.combine(other, |a, b| Ok(a * b))
            .expect("cardinalities are consistent")
    }

    pub fn try_product(&self, other: &JointTable) -> Result<JointTable, OracleError> {
        self.combine(other, |a, b| Ok(a * b))
    }

    pub fn divide(&self, other: &JointTable) -> Result<JointTable, OracleError> {
        self.combine(other, |a, b| {
            if b == 0.0 {
                Err(OracleError::ZeroDivisor)
            } else {
                Ok(a / b)
            }
        })
    }

    pub fn scale(&self, factor: f64) -> JointTable {
        JointTable {
            probs: self.probs.iter().map(|p| p * factor).collect(),
            ..self.clone()
        }
    }

    /// Sums out one variable. Absent variables leave the table unchanged.
    pub fn sum_out(&self, var: &str) -> JointTable {
        let Some(k) = self.position(var) else {
            return self.clone();
        };
        let strides = self.strides();
        let (card, stride) = (self.cards[k], strides[k]);
        let outer = self.probs.len() / (card * stride);
        let mut probs = vec![0.0; outer * stride];
        for o in 0..outer {
            for s in 0..card {
                let base = o * card * stride + s * stride;
                for i in 0..stride {
                    probs[o * stride + i] += self.probs[base + i];
                }
            }
        }
        let mut vars = self.vars.clone();
        let mut cards = self.cards.clone();
        vars.remove(k);
        cards.remove(k);
        JointTable { vars, cards, probs }
    }

    /// Marginal over `keep`, in the order given.
    pub fn marginal<S: AsRef<str>>(&self, keep: &[S]) -> Result<JointTable, OracleError> {
        for k in keep {
            if self.position(k.as_ref()).is_none() {
                return Err(OracleError::UnknownVariable(k.as_ref().to_string()));
            }
        }
        let mut t = self.clone();
        for v in &self.vars {
            if !keep.iter().any(|k| k.as_ref() == v) {
                t = t.sum_out(v);
            }
        }
        t.reorder(keep)
    }

    /// `P(var | cond)` as a table over `var` followed by `cond`.
    pub fn conditional<S: AsRef<str>>(
        &self,
        var: &[S],
        cond: &[S],
    ) -> Result<JointTable, OracleError> {
        let all: Vec<&str> = var.iter().chain(cond).map(AsRef::as_ref).collect();
        let joint = self.marginal(&all)?;
        if cond.is_empty() {
            return Ok(joint);
        }
        joint.divide(&self.marginal(cond)?)
    }

    /// The same table with variables permuted into `order`, which must list
    /// exactly this table's variables.
    pub fn reorder<S: AsRef<str>>(&self, order: &[S]) -> Result<JointTable, OracleError> {
        if order.len() != self.vars.len() {
            return Err(OracleError::Shape(
                "reorder must list every variable once".into(),
            ));
        }
        if order.iter().zip(&self.vars).all(|(a, b)| a.as_ref() == b) {
            return Ok(self.clone());
        }
        let target = JointTable::new(
            order.iter().map(|s| s.as_ref().to_string()).collect(),
            order
                .iter()
                .map(|s| {
                    self.card(s.as_ref())
                        .ok_or_else(|| OracleError::UnknownVariable(s.as_ref().into()))
                })
                .collect::<Result<_, _>>()?,
            vec![1.0; self.probs.len()],
        )?;
        // Multiplying by an all-ones table over the same variables reorders.
        let out = target.product(self);
        Ok(out)
    }

    /// Largest absolute cell difference, after aligning variable order.
    pub fn max_abs_diff(&self, other: &JointTable) -> Result<f64, OracleError> {
        let aligned = other.reorder(&self.vars)?;
        if aligned.cards != self.cards {
            return Err(OracleError::Shape("cardinalities differ".into()));
        }
        Ok(self
            .probs
            .iter()
            .zip(&aligned.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

impl fmt::Debug for JointTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("JointTable")
            .field("vars", &self.vars)
            .field("cards", &self.cards)
            .field("probs", &self.probs)
            .finish()
    }
}

/// Mixed-radix counter over a state space, first digit slowest.
pub struct Assignments {
    cards: Vec<usize>,
    current: Vec<usize>,
    started: bool,
    done: bool,
}

impl Assignments {
    pub fn new(cards: Vec<usize>) -> Self {
        let done = cards.contains(&0);
        Assignments {
            current: vec![0; cards.len()],
            cards,
            started: false,
            done,
        }
    }

    /// Advances and borrows the next assignment without allocating.
    pub fn next_ref(&mut self) -> Option<&[usize]> {
        if self.done {
            return None;
        }
        if !self.started {
            self.started = true;
            return Some(&self.current);
        }
        for i in (0..self.cards.len()).rev() {
            self.current[i] += 1;
            if self.current[i] < self.cards[i] {
                return Some(&self.current);
            }
            self.current[i] = 0;
        }
        self.done = true;
        None
    }
}

impl Iterator for Assignments {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        self.next_ref().map(<[usize]>::to_vec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn ab() -> JointTable {
        JointTable::new(
            names(&["A", "B"]),
            vec![2, 3],
            vec![0.1, 0.2, 0.05, 0.15, 0.3, 0.2],
        )
        .unwrap()
    }

    #[test]
    fn assignments_enumerate_row_major() {
        let all: Vec<_> = Assignments::new(vec![2, 2]).collect();
        assert_eq!(all, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        assert_eq!(Assignments::new(vec![]).count(), 1);
    }

    #[test]
    fn marginals_and_conditionals() {
        let t = ab();
        let a = t.marginal(&["A"]).unwrap();
        assert!((a.probs()[0] - 0.35).abs() < 1e-12);
        assert!((a.probs()[1] - 0.65).abs() < 1e-12);
        let b_given_a = t.conditional(&["B"], &["A"]).unwrap();
        assert_eq!(b_given_a.vars(), names(&["B", "A"]).as_slice());
        let row_sum: f64 = (0..3)
            .map(|b| b_given_a.get(&[("A", 1), ("B", b)]).unwrap())
            .sum();
        assert!((row_sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn reorder_preserves_values() {
        let t = ab();
        let r = t.reorder(&["B", "A"]).unwrap();
        for a in 0..2 {
            for b in 0..3 {
                assert_eq!(
                    t.get(&[("A", a), ("B", b)]).unwrap(),
                    r.get(&[("A", a), ("B", b)]).unwrap()
                );
            }
        }
        assert_eq!(t.max_abs_diff(&r).unwrap(), 0.0);
    }

    #[test]
    fn divide_by_zero_is_reported() {
        let z = JointTable::new(names(&["A"]), vec![2], vec![0.0, 1.0]).unwrap();
        assert_eq!(ab().divide(&z), Err(OracleError::ZeroDivisor));
    }

    #[test]
    fn shape_errors() {
        assert!(JointTable::new(names(&["A"]), vec![2], vec![1.0]).is_err());
        assert!(JointTable::new(names(&["A", "A"]), vec![1, 1], vec![1.0]).is_err());
    }
}
