//! Branch and bound over the LP relaxation.
//!
//! Nodes carry 0/1 fixings; each node's relaxation is solved from scratch by
//! the simplex (no warm starts by design). An integral relaxation becomes a
//! candidate incumbent after snapping to exact 0/1 and re-checking every row
//! in exact arithmetic; fractional nodes branch on a variable chosen by the
//! configured rule. Nodes whose bound cannot beat the incumbent are pruned.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::Instant;

use super::simplex::{LpOutcome, SimplexSolver};
use super::{
    check_feasible, BranchRule, Ilp01, IntegralSolution, LpStatus, MipStatus, NodeOrder,
    SolverConfig, SolverError,
};

const PRUNE_EPS: f64 = 1e-9;

#[derive(Debug, Clone)]
struct Node {
    bound: f64,
    id: u64,
    fixings: Vec<(usize, u8)>,
}

struct HeapNode(Node);

impl PartialEq for HeapNode {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for HeapNode {}
impl PartialOrd for HeapNode {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapNode {
    fn cmp(&self, other: &Self) -> Ordering {
        // Highest bound first; ties go to the older node.
        self.0
            .bound
            .total_cmp(&other.0.bound)
            .then(other.0.id.cmp(&self.0.id))
    }
}

enum Frontier {
    Heap(BinaryHeap<HeapNode>),
    Stack(Vec<Node>),
}

impl Frontier {
    fn new(order: NodeOrder) -> Self {
        match order {
            NodeOrder::BestBound => Frontier::Heap(BinaryHeap::new()),
            NodeOrder::DepthFirst => Frontier::Stack(Vec::new()),
        }
    }

    fn push(&mut self, node: Node) {
        match self {
            Frontier::Heap(h) => h.push(HeapNode(node)),
            Frontier::Stack(s) => s.push(node),
        }
    }

    fn pop(&mut self) -> Option<Node> {
        match self {
            Frontier::Heap(h) => h.pop().map(|n| n.0),
            Frontier::Stack(s) => s.pop(),
        }
    }

    fn max_bound(&self) -> f64 {
        match self {
            Frontier::Heap(h) => h.peek().map_or(f64::NEG_INFINITY, |n| n.0.bound),
            Frontier::Stack(s) => s
                .iter()
                .map(|n| n.bound)
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

fn select_branch_var(values: &[f64], rule: BranchRule, min_dist: f64) -> Option<usize> {
    match rule {
        BranchRule::FirstFractional => values
            .iter()
            .position(|&v| (v - v.round()).abs() > min_dist),
        BranchRule::MostFractional => {
            let mut best: Option<(f64, usize)> = None;
            for (j, &v) in values.iter().enumerate() {
                let dist = (v - v.round()).abs();
                if dist > min_dist && best.map_or(true, |(d, _)| dist > d) {
                    best = Some((dist, j));
                }
            }
            best.map(|(_, j)| j)
        }
    }
}

/// Exact 0/1 maximization of `p` by LP-based branch and bound.
///
/// Deterministic for a fixed `(p, cfg)`: same tree, same node count, same
/// solution. With a time limit the best incumbent found so far is returned
/// together with a valid remaining upper bound.
pub fn branch_and_bound(p: &Ilp01, cfg: &SolverConfig) -> Result<IntegralSolution, SolverError> {
    run(p, cfg, false).map(|(sol, _)| sol)
}

/// As [`branch_and_bound`], also returning the global upper bound recorded
/// after each node expansion (used to check bound monotonicity under
/// best-bound node order).
pub fn branch_and_bound_traced(
    p: &Ilp01,
    cfg: &SolverConfig,
) -> Result<(IntegralSolution, Vec<f64>), SolverError> {
    run(p, cfg, true)
}

fn run(
    p: &Ilp01,
    cfg: &SolverConfig,
    traced: bool,
) -> Result<(IntegralSolution, Vec<f64>), SolverError> {
    let start = Instant::now();
    let deadline = cfg.time_limit.map(|l| start + l);
    let mut solver = SimplexSolver::new(p, cfg);
    let mut frontier = Frontier::new(cfg.node_order);
    let mut trace = Vec::new();

    let mut incumbent: Option<(Vec<u8>, f64)> = None;
    let inc_obj = |inc: &Option<(Vec<u8>, f64)>| inc.as_ref().map_or(f64::NEG_INFINITY, |i| i.1);
    let mut node_count = 0u64;
    let mut next_id = 1u64;
    let mut timed_out = false;

    frontier.push(Node {
        bound: f64::INFINITY,
        id: 0,
        fixings: Vec::new(),
    });

    while let Some(node) = frontier.pop() {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            frontier.push(node);
            timed_out = true;
            break;
        }
        if node.bound <= inc_obj(&incumbent) + PRUNE_EPS {
            continue;
        }

        let relaxed = match solver.solve(&node.fixings, deadline)? {
            LpOutcome::Solved(r) => r,
            LpOutcome::DeadlineHit => {
                frontier.push(node);
                timed_out = true;
                break;
            }
        };
        node_count += 1;

        let lp_bound = match relaxed.status {
            LpStatus::Optimal => relaxed.objective.min(node.bound),
            LpStatus::Infeasible => f64::NEG_INFINITY,
            LpStatus::Unbounded => {
                return Err(SolverError::NumericalInstability(
                    "relaxation of a bounded 0/1 program reported unbounded".to_string(),
                ));
            }
        };
        if traced {
            trace.push(
                inc_obj(&incumbent)
                    .max(lp_bound)
                    .max(frontier.max_bound()),
            );
        }
        if lp_bound <= inc_obj(&incumbent) + PRUNE_EPS {
            continue;
        }

        let branch_var = match select_branch_var(&relaxed.values, cfg.branching, cfg.eps_int) {
            Some(j) => j,
            None => {
                // Integral relaxation: snap and verify exactly.
                let snapped: Vec<u8> = relaxed
                    .values
                    .iter()
                    .map(|&v| u8::from(v >= 0.5))
                    .collect();
                if check_feasible(p, &snapped) {
                    let obj = p.objective_value(&snapped);
                    if obj > inc_obj(&incumbent) {
                        incumbent = Some((snapped, obj));
                    }
                    continue;
                }
                // The rounding broke a row; branch on the least-integral
                // variable anyway to split the node.
                match select_branch_var(&relaxed.values, BranchRule::MostFractional, 1e-12) {
                    Some(j) => j,
                    None => {
                        return Err(SolverError::NumericalInstability(
                            "integral relaxation fails the exact feasibility check".to_string(),
                        ));
                    }
                }
            }
        };

        let child = |fix: u8, id: u64| {
            let mut fixings = node.fixings.clone();
            fixings.push((branch_var, fix));
            Node {
                bound: lp_bound,
                id,
                fixings,
            }
        };
        // The 1-branch gets the smaller id and sits on top of the stack, so
        // both node orders explore it first on ties.
        let one = child(1, next_id);
        let zero = child(0, next_id + 1);
        next_id += 2;
        frontier.push(zero);
        frontier.push(one);
    }

    let wall_time = start.elapsed();
    let solution = match incumbent {
        Some((values, objective)) => {
            let best_bound = if timed_out {
                objective.max(frontier.max_bound())
            } else {
                objective
            };
            IntegralSolution {
                status: if timed_out {
                    MipStatus::TimedOut
                } else {
                    MipStatus::Optimal
                },
                values,
                objective,
                best_bound,
                node_count,
                wall_time,
            }
        }
        None => IntegralSolution {
            status: if timed_out {
                MipStatus::TimedOut
            } else {
                MipStatus::Infeasible
            },
            values: Vec::new(),
            objective: f64::NEG_INFINITY,
            best_bound: if timed_out {
                frontier.max_bound()
            } else {
                f64::NEG_INFINITY
            },
            node_count,
            wall_time,
        },
    };
    Ok((solution, trace))
}
