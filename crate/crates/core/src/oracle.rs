//! Exhaustive reference optimizer for small instances.
//!
//! Enumerates every total assignment of clinicians to (block, service) cells
//! and weekends, filters by the hard rules, and keeps the best weighted
//! objective. The rules and the objective are evaluated directly on the
//! assignment — deliberately not through [`crate::formulation`] — so a bug
//! in the ILP encoding and a bug here cannot mask each other. This is a test
//! fixture, not a solver: the only speedup is short-circuiting the rule
//! checks.

use crate::model::{NcbMode, ProblemInstance};
use crate::validator::Schedule;

/// Default enumeration budget.
pub const DEFAULT_LIMIT: u64 = 1_000_000;

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("{candidates:.3e} candidates exceed the enumeration budget of {limit}")]
    TooLarge { candidates: f64, limit: u64 },
}

/// The oracle's optimum: the lexicographically smallest best schedule and
/// its objective triple.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleOptimum {
    pub schedule: Schedule,
    pub block_requests: i64,
    pub weekend_requests: i64,
    pub adjacency: i64,
    pub weighted: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleOutcome {
    Optimal(OracleOptimum),
    Infeasible,
}

/// Exhaustively maximizes the weighted objective over all feasible
/// schedules of `inst`. Errors when `C^(B*S) * C^W` exceeds `limit`.
pub fn brute_force(inst: &ProblemInstance, limit: u64) -> Result<OracleOutcome, OracleError> {
    let c = inst.num_clinicians();
    let cells = inst.num_blocks * inst.num_services + inst.num_weekends;
    let candidates = (c as f64).powi(cells as i32);
    if !(candidates <= limit as f64) {
        return Err(OracleError::TooLarge { candidates, limit });
    }

    let block_cells = inst.num_blocks * inst.num_services;
    let mut assignment = vec![0usize; cells];
    let mut best: Option<OracleOptimum> = None;

    loop {
        if let Some(opt) = evaluate(inst, &assignment, block_cells) {
            if best.as_ref().map_or(true, |b| opt.weighted > b.weighted) {
                best = Some(opt);
            }
        }

        // Odometer, last cell fastest: visits assignments in increasing
        // lexicographic order, so keeping the first strict maximum makes the
        // tie-break the lexicographically smallest assignment.
        let mut pos = cells;
        loop {
            if pos == 0 {
                return Ok(match best {
                    Some(b) => OracleOutcome::Optimal(b),
                    None => OracleOutcome::Infeasible,
                });
            }
            pos -= 1;
            assignment[pos] += 1;
            if assignment[pos] < c {
                break;
            }
            assignment[pos] = 0;
        }
    }
}

/// Checks the hard rules straight from their prose meaning and scores the
/// assignment; `None` when any rule fails.
fn evaluate(
    inst: &ProblemInstance,
    assignment: &[usize],
    block_cells: usize,
) -> Option<OracleOptimum> {
    let c_count = inst.num_clinicians();
    let ss = inst.num_services;
    let block_of = |b: usize, s: usize| assignment[b * ss + s];
    let weekend_of = |w: usize| assignment[block_cells + w];

    // No consecutive blocks.
    match inst.ncb_mode {
        NcbMode::PerService => {
            for b in 0..inst.num_blocks.saturating_sub(1) {
                for s in 0..ss {
                    if block_of(b, s) == block_of(b + 1, s) {
                        return None;
                    }
                }
            }
        }
        NcbMode::CrossService => {
            for b in 0..inst.num_blocks.saturating_sub(1) {
                for s in 0..ss {
                    let who = block_of(b, s);
                    if (0..ss).any(|s2| block_of(b + 1, s2) == who) {
                        return None;
                    }
                }
            }
        }
        NcbMode::Off => {}
    }

    // No consecutive weekends.
    for w in 0..inst.num_weekends.saturating_sub(1) {
        if weekend_of(w) == weekend_of(w + 1) {
            return None;
        }
    }

    // Min/max blocks per service.
    for (c, cl) in inst.clinicians.iter().enumerate() {
        for s in 0..ss {
            let worked = (0..inst.num_blocks).filter(|&b| block_of(b, s) == c).count();
            if worked < cl.min_blocks[s] || worked > cl.max_blocks[s] {
                return None;
            }
        }
    }

    // Equal weekends and equal holidays.
    let wf = inst.num_weekends / c_count;
    let wc = inst.num_weekends.div_ceil(c_count);
    let hf = inst.long_weekends.len() / c_count;
    let hc = inst.long_weekends.len().div_ceil(c_count);
    for c in 0..c_count {
        let weekends = (0..inst.num_weekends).filter(|&w| weekend_of(w) == c).count();
        if weekends < wf || weekends > wc {
            return None;
        }
        let holidays = inst
            .long_weekends
            .iter()
            .filter(|&&w| weekend_of(w) == c)
            .count();
        if holidays < hf || holidays > hc {
            return None;
        }
    }

    // Objectives.
    let mut q1 = 0i64;
    for b in 0..inst.num_blocks {
        for s in 0..ss {
            let c = block_of(b, s);
            q1 += if inst.clinicians[c].block_requests.contains(&b) { -1 } else { 1 };
        }
    }
    let mut q2 = 0i64;
    for w in 0..inst.num_weekends {
        let c = weekend_of(w);
        q2 += if inst.clinicians[c].weekend_requests.contains(&w) { -1 } else { 1 };
    }
    let mut q3 = 0i64;
    for (b, w) in inst.adjacency.pairs() {
        let c = weekend_of(w);
        q3 += (0..ss).filter(|&s| block_of(b, s) == c).count() as i64;
    }

    let d1 = (inst.num_blocks * ss) as f64;
    let d2 = inst.num_weekends as f64;
    let d3 = ((ss * inst.adjacency.len()) as f64).max(1.0);
    let [a1, a2, a3] = inst.weights.as_array();
    let weighted = a1 * q1 as f64 / d1 + a2 * q2 as f64 / d2 + a3 * q3 as f64 / d3;

    let schedule = Schedule::from_parts(
        (0..inst.num_blocks)
            .map(|b| (0..ss).map(|s| block_of(b, s)).collect())
            .collect(),
        (0..inst.num_weekends).map(weekend_of).collect(),
    )
    .expect("total by construction");

    Some(OracleOptimum {
        schedule,
        block_requests: q1,
        weekend_requests: q2,
        adjacency: q3,
        weighted,
    })
}
