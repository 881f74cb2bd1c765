//! Linear programs with sparse rows and a narrow solve contract.
//!
//! Every bound in this crate is computed by building a [`LinearProgram`] and
//! calling [`solve`]. The backend is HiGHS (dual simplex, single thread, so
//! results are deterministic for a fixed variable and row order).

use std::fmt::{self, Write as _};
use std::sync::OnceLock;

use highs::{HighsModelStatus, RowProblem, Sense};
use num_rational::Rational64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::rationalize;

pub const DEFAULT_TOLERANCE: f64 = 1e-7;
pub const TOLERANCE_ENV: &str = "IC_SOLVER_TOL";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LpError {
    #[error("solver did not converge: {0}")]
    NumericalFailure(String),
    #[error("constraint {row} references undeclared variable {var}")]
    UndeclaredVariable { row: String, var: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Var(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    Le,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub coefs: Vec<(Var, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
struct Variable {
    name: String,
    free: bool,
    upper: Option<f64>,
}

/// A maximization problem over nonnegative (or explicitly free) variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct LinearProgram {
    vars: Vec<Variable>,
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
}

impl LinearProgram {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a variable with bounds `0 ≤ x < ∞`.
    pub fn add_var(&mut self, name: impl Into<String>) -> Var {
        self.push_var(name.into(), false, None)
    }

    /// Adds a variable with bounds `-∞ < x < ∞`.
    pub fn add_free_var(&mut self, name: impl Into<String>) -> Var {
        self.push_var(name.into(), true, None)
    }

    /// Adds a variable with bounds `0 ≤ x ≤ upper`.
    pub fn add_bounded_var(&mut self, name: impl Into<String>, upper: f64) -> Var {
        self.push_var(name.into(), false, Some(upper))
    }

    fn push_var(&mut self, name: String, free: bool, upper: Option<f64>) -> Var {
        self.vars.push(Variable { name, free, upper });
        self.objective.push(0.0);
        Var(self.vars.len() - 1)
    }

    pub fn set_objective(&mut self, var: Var, coef: f64) {
        self.objective[var.0] = coef;
    }

    pub fn objective_coef(&self, var: Var) -> f64 {
        self.objective[var.0]
    }

    pub fn add_le(&mut self, name: impl Into<String>, coefs: Vec<(Var, f64)>, rhs: f64) -> RowId {
        self.add_constraint(name, coefs, Relation::Le, rhs)
    }

    pub fn add_eq(&mut self, name: impl Into<String>, coefs: Vec<(Var, f64)>, rhs: f64) -> RowId {
        self.add_constraint(name, coefs, Relation::Eq, rhs)
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        coefs: Vec<(Var, f64)>,
        relation: Relation,
        rhs: f64,
    ) -> RowId {
        self.constraints.push(Constraint {
            name: name.into(),
            coefs,
            relation,
            rhs,
        });
        RowId(self.constraints.len() - 1)
    }

    /// Appends a coefficient to an existing row.
    pub fn push_coef(&mut self, row: RowId, var: Var, coef: f64) {
        self.constraints[row.0].coefs.push((var, coef));
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn num_nonzeros(&self) -> usize {
        self.constraints.iter().map(|c| c.coefs.len()).sum()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn constraint(&self, row: RowId) -> &Constraint {
        &self.constraints[row.0]
    }

    pub fn var_name(&self, var: Var) -> &str {
        &self.vars[var.0].name
    }

    pub fn find_var(&self, name: &str) -> Option<Var> {
        self.vars.iter().position(|v| v.name == name).map(Var)
    }

    /// Checks that every row only references declared variables.
    pub fn validate(&self) -> Result<(), LpError> {
        for c in &self.constraints {
            if let Some((v, _)) = c.coefs.iter().find(|(v, _)| v.0 >= self.vars.len()) {
                return Err(LpError::UndeclaredVariable {
                    row: c.name.clone(),
                    var: v.0,
                });
            }
        }
        Ok(())
    }

    /// Largest violation of any row or bound by `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (v, xi) in self.vars.iter().zip(x) {
            if !v.free {
                worst = worst.max(-xi);
            }
            if let Some(u) = v.upper {
                worst = worst.max(xi - u);
            }
        }
        for c in &self.constraints {
            let lhs: f64 = c.coefs.iter().map(|(v, a)| a * x[v.0]).sum();
            let viol = match c.relation {
                Relation::Le => lhs - c.rhs,
                Relation::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }

    /// Writes the program in CPLEX LP text format, readable by most solvers.
    pub fn to_lp_format(&self) -> String {
        let mut out = String::new();
        let name = |v: Var| sanitize(&self.vars[v.0].name, v.0);
        out.push_str("\\ generated by indexcoding\nMaximize\n obj:");
        let terms: Vec<(Var, f64)> = self
            .objective
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(k, c)| (Var(k), *c))
            .collect();
        write_terms(&mut out, &terms, &name);
        out.push_str("\nSubject To\n");
        for (k, c) in self.constraints.iter().enumerate() {
            let _ = write!(out, " {}:", sanitize(&c.name, k));
            write_terms(&mut out, &c.coefs, &name);
            let op = match c.relation {
                Relation::Le => "<=",
                Relation::Eq => "=",
            };
            let _ = writeln!(out, " {op} {}", c.rhs);
        }
        out.push_str("Bounds\n");
        for (k, v) in self.vars.iter().enumerate() {
            let n = name(Var(k));
            if v.free {
                let _ = writeln!(out, " {n} free");
            } else if let Some(u) = v.upper {
                let _ = writeln!(out, " 0 <= {n} <= {u}");
            }
        }
        out.push_str("End\n");
        out
    }
}

fn sanitize(name: &str, index: usize) -> String {
    let cleaned: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("{cleaned}_{index}")
}

fn write_terms<F: Fn(Var) -> String>(out: &mut String, terms: &[(Var, f64)], name: &F) {
    if terms.is_empty() {
        out.push_str(" 0");
        return;
    }
    for (v, a) in terms {
        let sign = if *a < 0.0 { '-' } else { '+' };
        let _ = write!(out, " {sign} {} {}", a.abs(), name(*v));
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

impl fmt::Display for LpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LpStatus::Optimal => "optimal",
            LpStatus::Infeasible => "infeasible",
            LpStatus::Unbounded => "unbounded",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value; `NaN` unless optimal.
    pub value: f64,
    pub primal: Vec<f64>,
    /// Row duals with the convention `reduced cost = c - Aᵀy`.
    pub row_duals: Vec<f64>,
    pub rational_value: Option<Rational64>,
}

impl LpSolution {
    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn value_of(&self, var: Var) -> f64 {
        self.primal[var.0]
    }

    /// The optimum, or `NumericalFailure` describing why there is none.
    pub fn optimum(&self) -> Result<f64, LpError> {
        match self.status {
            LpStatus::Optimal => Ok(self.value),
            other => Err(LpError::NumericalFailure(format!("LP is {other}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    pub feasibility_tol: f64,
    pub optimality_tol: f64,
    /// Denominator bound used when reconstructing `rational_value`.
    pub max_denominator: i64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            feasibility_tol: DEFAULT_TOLERANCE,
            optimality_tol: DEFAULT_TOLERANCE,
            max_denominator: 64,
        }
    }
}

impl SolverOptions {
    /// Defaults, with both tolerances replaced by `IC_SOLVER_TOL` when set.
    pub fn from_env() -> Self {
        static TOL: OnceLock<Option<f64>> = OnceLock::new();
        let tol = *TOL.get_or_init(|| {
            std::env::var(TOLERANCE_ENV)
                .ok()
                .and_then(|s| s.trim().parse::<f64>().ok())
                .filter(|t| *t > 0.0 && t.is_finite())
        });
        let mut opts = SolverOptions::default();
        if let Some(t) = tol {
            opts.feasibility_tol = t;
            opts.optimality_tol = t;
        }
        opts
    }
}

/// Solves with [`SolverOptions::from_env`].
pub fn solve(lp: &LinearProgram) -> Result<LpSolution, LpError> {
    solve_with(lp, &SolverOptions::from_env())
}

pub fn solve_with(lp: &LinearProgram, opts: &SolverOptions) -> Result<LpSolution, LpError> {
    lp.validate()?;
    let n = lp.num_vars();
    if n == 0 {
        // HiGHS reports an empty model as an error; the answer is trivial.
        let feasible = lp.constraints.iter().all(|c| match c.relation {
            Relation::Le => c.rhs >= -opts.feasibility_tol,
            Relation::Eq => c.rhs.abs() <= opts.feasibility_tol,
        });
        return Ok(LpSolution {
            status: if feasible {
                LpStatus::Optimal
            } else {
                LpStatus::Infeasible
            },
            value: if feasible { 0.0 } else { f64::NAN },
            primal: Vec::new(),
            row_duals: vec![0.0; lp.num_constraints()],
            rational_value: feasible.then(|| Rational64::from(0)),
        });
    }

    let mut pb = RowProblem::default();
    let cols: Vec<highs::Col> = lp
        .vars
        .iter()
        .zip(&lp.objective)
        .map(|(v, c)| match (v.free, v.upper) {
            (true, _) => pb.add_column(*c, f64::NEG_INFINITY..f64::INFINITY),
            (false, Some(u)) => pb.add_column(*c, 0.0..=u),
            (false, None) => pb.add_column(*c, 0.0..),
        })
        .collect();
    for c in &lp.constraints {
        let factors = c.coefs.iter().map(|(v, a)| (cols[v.0], *a));
        match c.relation {
            Relation::Le => pb.add_row(..=c.rhs, factors),
            Relation::Eq => pb.add_row(c.rhs..=c.rhs, factors),
        }
    }

    let mut model = pb
        .try_optimise(Sense::Maximise)
        .map_err(|s| LpError::NumericalFailure(format!("HiGHS rejected model: {s:?}")))?;
    model.make_quiet();
    model.set_option("threads", 1);
    model.set_option("random_seed", 0);
    // Asking the backend for a tighter tolerance than the contract leaves
    // headroom for unscaling error in the post-solve check below.
    model.set_option("primal_feasibility_tolerance", opts.feasibility_tol * 0.1);
    model.set_option("dual_feasibility_tolerance", opts.optimality_tol * 0.1);
    let solved = model
        .try_solve()
        .map_err(|s| LpError::NumericalFailure(format!("HiGHS failed: {s:?}")))?;

    let status = match solved.status() {
        HighsModelStatus::Optimal => LpStatus::Optimal,
        HighsModelStatus::Infeasible => LpStatus::Infeasible,
        HighsModelStatus::Unbounded => LpStatus::Unbounded,
        HighsModelStatus::UnboundedOrInfeasible => {
            // Disambiguate with a zero objective: feasible ⇒ unbounded.
            let mut probe = lp.clone();
            probe.objective.iter_mut().for_each(|c| *c = 0.0);
            let feasible = solve_with(&probe, opts)?.status == LpStatus::Optimal;
            if feasible {
                LpStatus::Unbounded
            } else {
                LpStatus::Infeasible
            }
        }
        other => return Err(LpError::NumericalFailure(format!("HiGHS status {other:?}"))),
    };

    if status != LpStatus::Optimal {
        return Ok(LpSolution {
            status,
            value: f64::NAN,
            primal: vec![0.0; n],
            row_duals: vec![0.0; lp.num_constraints()],
            rational_value: None,
        });
    }

    let solution = solved.get_solution();
    let primal = solution.columns().to_vec();
    let row_duals = solution.dual_rows().to_vec();
    let violation = lp.max_violation(&primal);
    let scale = lp
        .constraints
        .iter()
        .map(|c| c.rhs.abs())
        .fold(1.0, f64::max);
    if violation > opts.feasibility_tol * scale {
        return Err(LpError::NumericalFailure(format!(
            "optimal primal violates constraints by {violation:e}"
        )));
    }
    let value: f64 = primal.iter().zip(&lp.objective).map(|(x, c)| x * c).sum();
    Ok(LpSolution {
        status,
        value,
        primal,
        row_duals,
        rational_value: rationalize(value, opts.max_denominator),
    })
}
