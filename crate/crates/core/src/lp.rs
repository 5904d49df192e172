//! Thin dense front-end over the `microlp` simplex solver.

use microlp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Cmp {
    #[cfg_attr(not(test), allow(dead_code))]
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone)]
pub(crate) enum LpOutcome {
    Optimal { x: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

/// A linear program `min/max c·x` over bounded or free variables and dense
/// linear constraints.
#[derive(Debug, Clone)]
pub(crate) struct LinearProgram {
    maximize: bool,
    vars: Vec<(f64, f64, f64)>,
    rows: Vec<(Vec<(usize, f64)>, Cmp, f64)>,
}

impl LinearProgram {
    pub fn minimize() -> Self {
        Self { maximize: false, vars: Vec::new(), rows: Vec::new() }
    }

    pub fn maximize() -> Self {
        Self { maximize: true, vars: Vec::new(), rows: Vec::new() }
    }

    pub fn var(&mut self, objective: f64, lo: f64, hi: f64) -> usize {
        self.vars.push((objective, lo, hi));
        self.vars.len() - 1
    }

    pub fn constraint(&mut self, terms: Vec<(usize, f64)>, cmp: Cmp, rhs: f64) {
        self.rows.push((terms, cmp, rhs));
    }

    pub fn solve(&self) -> Result<LpOutcome> {
        let dir = if self.maximize {
            OptimizationDirection::Maximize
        } else {
            OptimizationDirection::Minimize
        };
        let mut p = Problem::new(dir);
        let handles: Vec<_> = self
            .vars
            .iter()
            .map(|&(obj, lo, hi)| p.add_var(obj, (lo, hi)))
            .collect();
        for (terms, cmp, rhs) in &self.rows {
            let expr: Vec<_> = terms
                .iter()
                .filter(|(_, coef)| *coef != 0.0)
                .map(|&(k, coef)| (handles[k], coef))
                .collect();
            let op = match cmp {
                Cmp::Le => ComparisonOp::Le,
                Cmp::Ge => ComparisonOp::Ge,
                Cmp::Eq => ComparisonOp::Eq,
            };
            p.add_constraint(expr.as_slice(), op, *rhs);
        }
        match p.solve() {
            Ok(outcome) => {
                let sol = outcome
                    .into_solution()
                    .map_err(|_| Error::Computation("LP solve interrupted".into()))?;
                let x = handles.iter().map(|&h| sol.var_value(h)).collect();
                Ok(LpOutcome::Optimal { x, objective: sol.objective() })
            }
            Err(microlp::Error::Infeasible) => Ok(LpOutcome::Infeasible),
            Err(microlp::Error::Unbounded) => Ok(LpOutcome::Unbounded),
            Err(e) => Err(Error::Computation(format!("LP solver: {e}"))),
        }
    }
}
