//! Generic 0-1 integer linear programming.
//!
//! [`Ilp01`] holds a maximization problem over binary variables with sparse
//! linear constraints. [`solve_relaxation`] solves the LP relaxation (all
//! variables in `[0, 1]`) with a bounded-variable two-phase primal simplex;
//! [`branch_and_bound`] searches for an exact 0/1 optimum by branching on
//! fractional variables and pruning against the incumbent. Cut generation
//! would slot in at the node-processing step in [`branch`], but desk-scale
//! rosters solve without it.
//!
//! The solver is single-threaded and deterministic: identical problem and
//! configuration give an identical search tree, solution and node count.

mod branch;
mod lpfile;
mod lu;
mod simplex;

use std::time::Duration;

pub use branch::{branch_and_bound, branch_and_bound_traced};
pub use lpfile::{parse_lp, write_lp, write_lp_string, LpFormatError};
pub use simplex::solve_relaxation;

/// Constraint sense.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

impl Sense {
    pub fn symbol(self) -> &'static str {
        match self {
            Sense::Le => "<=",
            Sense::Ge => ">=",
            Sense::Eq => "=",
        }
    }
}

/// A sparse linear constraint row: `sum(coef * x) sense rhs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

impl Constraint {
    pub fn lhs_value(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(j, a)| a * values[j]).sum()
    }

    /// Exact satisfaction check on a 0/1 vector. Rows whose coefficients and
    /// right-hand side are all integers are evaluated in integer arithmetic;
    /// anything else falls back to floating point with a tiny tolerance.
    fn holds_exactly(&self, values: &[u8]) -> bool {
        let integral = self.rhs.fract() == 0.0
            && self.rhs.abs() < 2e15
            && self
                .terms
                .iter()
                .all(|&(_, a)| a.fract() == 0.0 && a.abs() < 2e15);
        if integral {
            let lhs: i64 = self
                .terms
                .iter()
                .filter(|&&(j, _)| values[j] == 1)
                .map(|&(_, a)| a as i64)
                .sum();
            let rhs = self.rhs as i64;
            match self.sense {
                Sense::Le => lhs <= rhs,
                Sense::Ge => lhs >= rhs,
                Sense::Eq => lhs == rhs,
            }
        } else {
            let lhs: f64 = self
                .terms
                .iter()
                .filter(|&&(j, _)| values[j] == 1)
                .map(|&(_, a)| a)
                .sum();
            match self.sense {
                Sense::Le => lhs <= self.rhs + 1e-9,
                Sense::Ge => lhs >= self.rhs - 1e-9,
                Sense::Eq => (lhs - self.rhs).abs() <= 1e-9,
            }
        }
    }
}

/// A 0-1 integer linear program: maximize `objective . x` subject to the
/// constraint rows, with every variable implicitly bounded `0 <= x <= 1`
/// and required integral.
#[derive(Debug, Clone, PartialEq)]
pub struct Ilp01 {
    num_vars: usize,
    var_names: Vec<String>,
    constraints: Vec<Constraint>,
    objective: Vec<f64>,
}

impl Ilp01 {
    /// A problem with `num_vars` binary variables named `x0..x{n-1}`, no
    /// constraints and a zero objective.
    pub fn new(num_vars: usize) -> Self {
        Self::with_names((0..num_vars).map(|j| format!("x{j}")).collect())
    }

    pub fn with_names(var_names: Vec<String>) -> Self {
        let num_vars = var_names.len();
        Self {
            num_vars,
            var_names,
            constraints: Vec::new(),
            objective: vec![0.0; num_vars],
        }
    }

    /// Adds a constraint row. Panics if a term references a variable that
    /// does not exist; rows are otherwise taken as given.
    pub fn add_constraint(&mut self, terms: Vec<(usize, f64)>, sense: Sense, rhs: f64) {
        for &(j, _) in &terms {
            assert!(j < self.num_vars, "constraint references variable {j} of {}", self.num_vars);
        }
        self.constraints.push(Constraint { terms, sense, rhs });
    }

    /// Sets the (maximization) objective coefficient of one variable.
    pub fn set_objective(&mut self, var: usize, coef: f64) {
        assert!(var < self.num_vars);
        self.objective[var] = coef;
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn var_names(&self) -> &[String] {
        &self.var_names
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Dense objective vector (maximization).
    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn objective_value(&self, values: &[u8]) -> f64 {
        assert_eq!(values.len(), self.num_vars);
        self.objective
            .iter()
            .zip(values)
            .filter(|&(_, &v)| v == 1)
            .map(|(&c, _)| c)
            .sum()
    }
}

/// True iff every constraint row holds exactly for the given 0/1 vector.
/// This is the independent feasibility check used by the tests; it never
/// consults the solver.
pub fn check_feasible(p: &Ilp01, values: &[u8]) -> bool {
    assert_eq!(values.len(), p.num_vars);
    p.constraints.iter().all(|c| c.holds_exactly(values))
}

/// Status of an LP relaxation solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Result of [`solve_relaxation`]. For `Optimal` the values are a vertex of
/// the relaxed polytope, feasible to within `eps_feas` and clamped into
/// `[0, 1]`; otherwise `values` is empty.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedSolution {
    pub status: LpStatus,
    pub values: Vec<f64>,
    pub objective: f64,
}

/// Status of a [`branch_and_bound`] run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MipStatus {
    Optimal,
    Infeasible,
    TimedOut,
}

/// Result of [`branch_and_bound`].
///
/// For `Optimal`, `values` is exactly 0/1, satisfies every constraint in
/// exact arithmetic, and `objective` is maximal over all feasible 0/1
/// points. For `TimedOut`, `values` holds the best incumbent found (empty
/// if none) and `best_bound` is a valid upper bound on the true optimum,
/// so `best_bound - objective` is the remaining gap.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegralSolution {
    pub status: MipStatus,
    pub values: Vec<u8>,
    pub objective: f64,
    pub best_bound: f64,
    pub node_count: u64,
    pub wall_time: Duration,
}

/// Variable selection rule for branching.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BranchRule {
    /// Branch on the variable farthest from an integer; ties go to the
    /// lowest index.
    #[default]
    MostFractional,
    /// Branch on the lowest-indexed fractional variable.
    FirstFractional,
}

/// Order in which open nodes are expanded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NodeOrder {
    /// Highest relaxation bound first; ties by creation order.
    BestBound,
    /// Last-in first-out; dives to integral leaves quickly, which matters
    /// because there is no primal heuristic seeding the incumbent.
    #[default]
    DepthFirst,
}

/// Solver tolerances and controls.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Primal feasibility tolerance of the LP relaxation.
    pub eps_feas: f64,
    /// Integrality tolerance: a value within this of 0 or 1 counts as integral.
    pub eps_int: f64,
    /// Pivots smaller than this are unusable; running out of usable pivots
    /// raises [`SolverError::NumericalInstability`].
    pub pivot_tol: f64,
    /// Wall-clock budget for branch and bound.
    pub time_limit: Option<Duration>,
    pub branching: BranchRule,
    pub node_order: NodeOrder,
    /// Reserved for future randomized rules; the default rules ignore it.
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eps_feas: 1e-7,
            eps_int: 1e-6,
            pivot_tol: 1e-9,
            time_limit: None,
            branching: BranchRule::default(),
            node_order: NodeOrder::default(),
            seed: 0,
        }
    }
}

impl SolverConfig {
    pub fn with_time_limit(mut self, limit: Duration) -> Self {
        self.time_limit = Some(limit);
        self
    }
}

/// Solver failure. Scheduling matrices are all small integers, so this
/// signals either a pathologically scaled hand-built program or a bug.
#[derive(Debug, Clone, thiserror::Error)]
pub enum SolverError {
    #[error("numerical instability: {0}")]
    NumericalInstability(String),
}
