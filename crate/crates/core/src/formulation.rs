//! Encoding a [`ProblemInstance`] as a 0-1 ILP and decoding solver output.
//!
//! Variables. `x[c,b,s]` assigns clinician `c` to service `s` on block `b`;
//! `y[c,w]` assigns weekend `w`; `z[c,b,s]` is the linearization helper for
//! the product `x[c,b,s] * y[c,phi(b)]`, allocated only for blocks that have
//! an adjacent weekend.
//!
//! Constraint families, in emission order:
//! - coverage: every (block, service) and every weekend gets exactly one
//!   clinician;
//! - min/max: per-clinician per-service block counts within their window;
//! - no consecutive blocks (mode-dependent) and no consecutive weekends;
//! - equal weekends / equal holidays: per-clinician counts within the floor
//!   and ceiling of a fair share;
//! - linearization: `z <= x` and `z <= y[phi(b)]`.
//!
//! Objective. Each `x` scores `+1`, or `-1` when the block was requested
//! off; `y` likewise per weekend; each `z` scores `+1`. The three sums are
//! normalized onto `[-1, 1]` by their maximum attainable magnitudes
//! (`B*S`, `W`, and `S*|dom phi|`) and combined with the configured weights.

use crate::ilp::{Ilp01, IntegralSolution, Sense};
use crate::model::ProblemInstance;
use crate::validator::Schedule;
use crate::model::NcbMode;

use std::ops::Range;

/// Index maps between (clinician, block, service) / (clinician, weekend)
/// coordinates and flat ILP variable indices, plus the row ranges of each
/// emitted constraint family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariableLayout {
    num_clinicians: usize,
    num_blocks: usize,
    num_services: usize,
    num_weekends: usize,
    /// Blocks with an adjacent weekend, ascending; `z` variables exist only
    /// for these.
    adj_blocks: Vec<usize>,
    /// block -> position in `adj_blocks`.
    adj_pos: Vec<Option<usize>>,
    y_base: usize,
    z_base: usize,
    pub rows: RowFamilies,
}

/// Row ranges of the constraint families inside the built [`Ilp01`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RowFamilies {
    pub block_coverage: Range<usize>,
    pub weekend_coverage: Range<usize>,
    pub min_max: Range<usize>,
    pub no_consecutive_blocks: Range<usize>,
    pub no_consecutive_weekends: Range<usize>,
    pub equal_weekends: Range<usize>,
    pub equal_holidays: Range<usize>,
    pub linearization: Range<usize>,
}

impl VariableLayout {
    fn new(inst: &ProblemInstance) -> Self {
        let (c, b, s, w) = (
            inst.num_clinicians(),
            inst.num_blocks,
            inst.num_services,
            inst.num_weekends,
        );
        let adj_blocks: Vec<usize> = inst.adjacency.blocks().collect();
        let mut adj_pos = vec![None; b];
        for (pos, &blk) in adj_blocks.iter().enumerate() {
            adj_pos[blk] = Some(pos);
        }
        let y_base = c * b * s;
        let z_base = y_base + c * w;
        Self {
            num_clinicians: c,
            num_blocks: b,
            num_services: s,
            num_weekends: w,
            adj_blocks,
            adj_pos,
            y_base,
            z_base,
            rows: RowFamilies::default(),
        }
    }

    pub fn x_index(&self, c: usize, b: usize, s: usize) -> usize {
        debug_assert!(c < self.num_clinicians && b < self.num_blocks && s < self.num_services);
        (c * self.num_blocks + b) * self.num_services + s
    }

    pub fn y_index(&self, c: usize, w: usize) -> usize {
        debug_assert!(c < self.num_clinicians && w < self.num_weekends);
        self.y_base + c * self.num_weekends + w
    }

    /// `None` for blocks without an adjacent weekend.
    pub fn z_index(&self, c: usize, b: usize, s: usize) -> Option<usize> {
        let pos = self.adj_pos[b]?;
        Some(self.z_base + (c * self.adj_blocks.len() + pos) * self.num_services + s)
    }

    pub fn num_x(&self) -> usize {
        self.y_base
    }

    pub fn num_y(&self) -> usize {
        self.z_base - self.y_base
    }

    pub fn num_z(&self) -> usize {
        self.num_clinicians * self.adj_blocks.len() * self.num_services
    }

    pub fn num_vars(&self) -> usize {
        self.z_base + self.num_z()
    }

    /// Blocks that have an adjacent weekend.
    pub fn adjacent_blocks(&self) -> &[usize] {
        &self.adj_blocks
    }
}

/// Normalization divisors for the three objectives: the maximum attainable
/// magnitude of each sum, so every normalized objective lies in `[-1, 1]`.
fn divisors(layout: &VariableLayout) -> (f64, f64, f64) {
    let d1 = (layout.num_blocks * layout.num_services) as f64;
    let d2 = layout.num_weekends as f64;
    let d3 = (layout.num_services * layout.adj_blocks.len()) as f64;
    (d1, d2, d3.max(1.0))
}

/// Builds the ILP for `inst`.
///
/// Expects an instance that already passed
/// [`ProblemInstance::validate`]; out-of-shape bound lists will panic.
pub fn build(inst: &ProblemInstance) -> (Ilp01, VariableLayout) {
    let mut layout = VariableLayout::new(inst);
    let (cc, bb, ss, ww) = (
        layout.num_clinicians,
        layout.num_blocks,
        layout.num_services,
        layout.num_weekends,
    );

    let mut names = Vec::with_capacity(layout.num_vars());
    for c in 0..cc {
        for b in 0..bb {
            for s in 0..ss {
                names.push(format!("x_c{}_b{}_s{}", c + 1, b + 1, s + 1));
            }
        }
    }
    for c in 0..cc {
        for w in 0..ww {
            names.push(format!("y_c{}_w{}", c + 1, w + 1));
        }
    }
    for c in 0..cc {
        for &b in &layout.adj_blocks {
            for s in 0..ss {
                names.push(format!("z_c{}_b{}_s{}", c + 1, b + 1, s + 1));
            }
        }
    }
    let mut ilp = Ilp01::with_names(names);

    let mark = |rows: &mut Range<usize>, ilp: &Ilp01, start: usize| {
        *rows = start..ilp.constraints().len();
    };

    // Block coverage: one clinician per (block, service).
    let start = ilp.constraints().len();
    for b in 0..bb {
        for s in 0..ss {
            let terms = (0..cc).map(|c| (layout.x_index(c, b, s), 1.0)).collect();
            ilp.add_constraint(terms, Sense::Eq, 1.0);
        }
    }
    mark(&mut layout.rows.block_coverage, &ilp, start);

    // Weekend coverage.
    let start = ilp.constraints().len();
    for w in 0..ww {
        let terms = (0..cc).map(|c| (layout.y_index(c, w), 1.0)).collect();
        ilp.add_constraint(terms, Sense::Eq, 1.0);
    }
    mark(&mut layout.rows.weekend_coverage, &ilp, start);

    // Min/max blocks per clinician and service: one >= and one <= row.
    let start = ilp.constraints().len();
    for (c, cl) in inst.clinicians.iter().enumerate() {
        for s in 0..ss {
            let terms: Vec<(usize, f64)> =
                (0..bb).map(|b| (layout.x_index(c, b, s), 1.0)).collect();
            ilp.add_constraint(terms.clone(), Sense::Ge, cl.min_blocks[s] as f64);
            ilp.add_constraint(terms, Sense::Le, cl.max_blocks[s] as f64);
        }
    }
    mark(&mut layout.rows.min_max, &ilp, start);

    // No consecutive blocks.
    let start = ilp.constraints().len();
    match inst.ncb_mode {
        NcbMode::PerService => {
            for c in 0..cc {
                for b in 0..bb.saturating_sub(1) {
                    for s in 0..ss {
                        ilp.add_constraint(
                            vec![
                                (layout.x_index(c, b, s), 1.0),
                                (layout.x_index(c, b + 1, s), 1.0),
                            ],
                            Sense::Le,
                            1.0,
                        );
                    }
                }
            }
        }
        NcbMode::CrossService => {
            for c in 0..cc {
                for b in 0..bb.saturating_sub(1) {
                    let terms = (0..ss)
                        .map(|s| (layout.x_index(c, b, s), 1.0))
                        .chain((0..ss).map(|s| (layout.x_index(c, b + 1, s), 1.0)))
                        .collect();
                    ilp.add_constraint(terms, Sense::Le, 1.0);
                }
            }
        }
        NcbMode::Off => {}
    }
    mark(&mut layout.rows.no_consecutive_blocks, &ilp, start);

    // No consecutive weekends.
    let start = ilp.constraints().len();
    for c in 0..cc {
        for w in 0..ww.saturating_sub(1) {
            ilp.add_constraint(
                vec![(layout.y_index(c, w), 1.0), (layout.y_index(c, w + 1), 1.0)],
                Sense::Le,
                1.0,
            );
        }
    }
    mark(&mut layout.rows.no_consecutive_weekends, &ilp, start);

    // Equal weekends.
    let start = ilp.constraints().len();
    for c in 0..cc {
        let terms: Vec<(usize, f64)> = (0..ww).map(|w| (layout.y_index(c, w), 1.0)).collect();
        ilp.add_constraint(terms.clone(), Sense::Ge, inst.weekends_floor() as f64);
        ilp.add_constraint(terms, Sense::Le, inst.weekends_ceil() as f64);
    }
    mark(&mut layout.rows.equal_weekends, &ilp, start);

    // Equal holidays; the rows stay even when there are no long weekends.
    let start = ilp.constraints().len();
    for c in 0..cc {
        let terms: Vec<(usize, f64)> = inst
            .long_weekends
            .iter()
            .map(|&w| (layout.y_index(c, w), 1.0))
            .collect();
        ilp.add_constraint(terms.clone(), Sense::Ge, inst.holidays_floor() as f64);
        ilp.add_constraint(terms, Sense::Le, inst.holidays_ceil() as f64);
    }
    mark(&mut layout.rows.equal_holidays, &ilp, start);

    // Linearization: z bounded by its x and by the adjacent weekend's y.
    let start = ilp.constraints().len();
    for c in 0..cc {
        for &b in &layout.adj_blocks {
            let w = inst.adjacency.weekend_for(b).expect("adjacent block");
            for s in 0..ss {
                let z = layout.z_index(c, b, s).expect("z allocated");
                ilp.add_constraint(
                    vec![(z, 1.0), (layout.x_index(c, b, s), -1.0)],
                    Sense::Le,
                    0.0,
                );
                ilp.add_constraint(
                    vec![(z, 1.0), (layout.y_index(c, w), -1.0)],
                    Sense::Le,
                    0.0,
                );
            }
        }
    }
    mark(&mut layout.rows.linearization, &ilp, start);

    // Objective: weighted, normalized request and adjacency scores.
    let (d1, d2, d3) = divisors(&layout);
    let [a1, a2, a3] = inst.weights.as_array();
    for (c, cl) in inst.clinicians.iter().enumerate() {
        for b in 0..bb {
            let sign = if cl.block_requests.contains(&b) { -1.0 } else { 1.0 };
            for s in 0..ss {
                ilp.set_objective(layout.x_index(c, b, s), a1 * sign / d1);
            }
        }
        for w in 0..ww {
            let sign = if cl.weekend_requests.contains(&w) { -1.0 } else { 1.0 };
            ilp.set_objective(layout.y_index(c, w), a2 * sign / d2);
        }
        for &b in &layout.adj_blocks {
            for s in 0..ss {
                ilp.set_objective(layout.z_index(c, b, s).expect("z allocated"), a3 / d3);
            }
        }
    }

    (ilp, layout)
}

#[derive(Debug, thiserror::Error)]
pub enum DecodeError {
    #[error("block {}, service {}: {found} clinicians assigned, expected exactly 1", block + 1, service + 1)]
    BlockCell {
        block: usize,
        service: usize,
        found: usize,
    },
    #[error("weekend {}: {found} clinicians assigned, expected exactly 1", weekend + 1)]
    WeekendCell { weekend: usize, found: usize },
    #[error("solution has {found} values, layout expects {expected}")]
    Length { expected: usize, found: usize },
    #[error("solution carries no values (status without incumbent)")]
    Empty,
}

/// Decodes a solver solution into a [`Schedule`]. The coverage rows make
/// the assignee of every cell unique; anything else is a solver bug
/// surfaced as a [`DecodeError`].
pub fn decode(
    layout: &VariableLayout,
    sol: &IntegralSolution,
    inst: &ProblemInstance,
) -> Result<Schedule, DecodeError> {
    decode_values(layout, &sol.values, inst)
}

/// As [`decode`], straight from a 0/1 vector.
pub fn decode_values(
    layout: &VariableLayout,
    values: &[u8],
    inst: &ProblemInstance,
) -> Result<Schedule, DecodeError> {
    if values.is_empty() {
        return Err(DecodeError::Empty);
    }
    if values.len() != layout.num_vars() {
        return Err(DecodeError::Length {
            expected: layout.num_vars(),
            found: values.len(),
        });
    }
    let cc = layout.num_clinicians;
    let mut block_assignee = vec![vec![0usize; layout.num_services]; layout.num_blocks];
    for b in 0..layout.num_blocks {
        for s in 0..layout.num_services {
            let assigned: Vec<usize> = (0..cc)
                .filter(|&c| values[layout.x_index(c, b, s)] == 1)
                .collect();
            match assigned.as_slice() {
                [c] => block_assignee[b][s] = *c,
                other => {
                    return Err(DecodeError::BlockCell {
                        block: b,
                        service: s,
                        found: other.len(),
                    })
                }
            }
        }
    }
    let mut weekend_assignee = vec![0usize; layout.num_weekends];
    for w in 0..layout.num_weekends {
        let assigned: Vec<usize> = (0..cc)
            .filter(|&c| values[layout.y_index(c, w)] == 1)
            .collect();
        match assigned.as_slice() {
            [c] => weekend_assignee[w] = *c,
            other => {
                return Err(DecodeError::WeekendCell {
                    weekend: w,
                    found: other.len(),
                })
            }
        }
    }
    let _ = inst;
    Ok(Schedule::from_parts(block_assignee, weekend_assignee).expect("total by construction"))
}

/// Encodes a schedule as a 0/1 vector of the layout, with every `z` set to
/// `min(x, y[phi(b)])` so the vector is optimal for its own assignment.
pub fn encode_schedule(layout: &VariableLayout, sch: &Schedule, inst: &ProblemInstance) -> Vec<u8> {
    let mut values = vec![0u8; layout.num_vars()];
    for b in 0..layout.num_blocks {
        for s in 0..layout.num_services {
            values[layout.x_index(sch.block_assignee(b, s), b, s)] = 1;
        }
    }
    for w in 0..layout.num_weekends {
        values[layout.y_index(sch.weekend_assignee(w), w)] = 1;
    }
    for c in 0..layout.num_clinicians {
        for &b in &layout.adj_blocks {
            let w = inst.adjacency.weekend_for(b).expect("adjacent block");
            for s in 0..layout.num_services {
                let z = layout.z_index(c, b, s).expect("z allocated");
                values[z] = values[layout.x_index(c, b, s)].min(values[layout.y_index(c, w)]);
            }
        }
    }
    values
}

/// The raw and normalized objective components of a 0/1 vector.
///
/// The adjacency sum is recomputed as `sum min(x, y[phi(b)])` over services,
/// independent of whatever `z` values the solver chose.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveBreakdown {
    pub block_requests: i64,
    pub weekend_requests: i64,
    pub adjacency: i64,
    pub block_requests_norm: f64,
    pub weekend_requests_norm: f64,
    pub adjacency_norm: f64,
    pub weighted: f64,
}

pub fn objective_breakdown(
    layout: &VariableLayout,
    values: &[u8],
    inst: &ProblemInstance,
) -> ObjectiveBreakdown {
    assert_eq!(values.len(), layout.num_vars());
    let mut q1 = 0i64;
    let mut q2 = 0i64;
    let mut q3 = 0i64;
    for (c, cl) in inst.clinicians.iter().enumerate() {
        for b in 0..layout.num_blocks {
            for s in 0..layout.num_services {
                if values[layout.x_index(c, b, s)] == 1 {
                    q1 += if cl.block_requests.contains(&b) { -1 } else { 1 };
                }
            }
        }
        for w in 0..layout.num_weekends {
            if values[layout.y_index(c, w)] == 1 {
                q2 += if cl.weekend_requests.contains(&w) { -1 } else { 1 };
            }
        }
        for (b, w) in inst.adjacency.pairs() {
            if values[layout.y_index(c, w)] == 1 {
                for s in 0..layout.num_services {
                    if values[layout.x_index(c, b, s)] == 1 {
                        q3 += 1;
                    }
                }
            }
        }
    }
    let (d1, d2, d3) = divisors(layout);
    let [a1, a2, a3] = inst.weights.as_array();
    let (n1, n2, n3) = (q1 as f64 / d1, q2 as f64 / d2, q3 as f64 / d3);
    ObjectiveBreakdown {
        block_requests: q1,
        weekend_requests: q2,
        adjacency: q3,
        block_requests_norm: n1,
        weekend_requests_norm: n2,
        adjacency_norm: n3,
        weighted: a1 * n1 + a2 * n2 + a3 * n3,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ilp::{branch_and_bound, SolverConfig};
    use crate::testutil::instance;

    #[test]
    fn case_study_shape_has_expected_counts() {
        // 9 clinicians, 2 services, 26 blocks, 51 weekends.
        let inst = instance(9, 2, 26, 51, &[], NcbMode::PerService);
        let (ilp, layout) = build(&inst);
        assert_eq!(layout.num_x(), 468);
        assert_eq!(layout.num_y(), 459);
        assert_eq!(layout.num_z(), 468, "phi covers all 26 blocks");
        assert_eq!(layout.num_vars(), 1395);
        assert_eq!(ilp.num_vars(), 1395);
        assert_eq!(layout.rows.no_consecutive_blocks.len(), 450);
    }

    #[test]
    fn tiny_instance_row_counts() {
        // 2 clinicians, 1 service, 2 blocks, 2 weekends, no long weekends.
        let inst = instance(2, 1, 2, 2, &[], NcbMode::PerService);
        let (ilp, layout) = build(&inst);
        let r = &layout.rows;
        assert_eq!(r.block_coverage.len(), 2);
        assert_eq!(r.weekend_coverage.len(), 2);
        assert_eq!(r.min_max.len(), 4);
        assert_eq!(r.no_consecutive_blocks.len(), 2);
        assert_eq!(r.no_consecutive_weekends.len(), 2);
        assert_eq!(r.equal_weekends.len(), 4);
        assert_eq!(r.equal_holidays.len(), 4, "emitted even with no long weekends");
        assert_eq!(r.linearization.len(), 4, "only block 1 has a weekend in range");
        assert_eq!(ilp.constraints().len(), 24);
    }

    #[test]
    fn cross_service_mode_merges_rows() {
        let inst = instance(9, 2, 26, 51, &[], NcbMode::CrossService);
        let (_, layout) = build(&inst);
        assert_eq!(layout.rows.no_consecutive_blocks.len(), 9 * 25);

        let inst = instance(9, 2, 26, 51, &[], NcbMode::Off);
        let (_, layout) = build(&inst);
        assert_eq!(layout.rows.no_consecutive_blocks.len(), 0);
    }

    #[test]
    fn encode_decode_round_trip() {
        let inst = instance(3, 2, 3, 4, &[1], NcbMode::PerService);
        let (_, layout) = build(&inst);
        let sch = crate::validator::Schedule::from_parts(
            vec![vec![0, 1], vec![2, 0], vec![1, 2]],
            vec![0, 1, 2, 0],
        )
        .unwrap();
        let values = encode_schedule(&layout, &sch, &inst);
        let back = decode_values(&layout, &values, &inst).unwrap();
        assert_eq!(back, sch);
    }

    #[test]
    fn double_assignment_fails_decode() {
        let inst = instance(2, 1, 2, 2, &[], NcbMode::PerService);
        let (_, layout) = build(&inst);
        let sch = crate::validator::Schedule::from_parts(vec![vec![0], vec![1]], vec![0, 1])
            .unwrap();
        let mut values = encode_schedule(&layout, &sch, &inst);
        values[layout.x_index(1, 0, 0)] = 1; // both clinicians on block 1
        let err = decode_values(&layout, &values, &inst).unwrap_err();
        assert!(matches!(
            err,
            DecodeError::BlockCell { block: 0, service: 0, found: 2 }
        ));
    }

    #[test]
    fn breakdown_counts_requests_and_adjacency() {
        let mut inst = instance(2, 1, 2, 2, &[], NcbMode::Off);
        let (_, layout) = build(&inst);
        let sch = crate::validator::Schedule::from_parts(vec![vec![0], vec![1]], vec![1, 0])
            .unwrap();
        let values = encode_schedule(&layout, &sch, &inst);

        // No requests touched: every term is +1.
        let b = objective_breakdown(&layout, &values, &inst);
        assert_eq!(b.block_requests, 2, "B*S terms all positive");
        assert_eq!(b.weekend_requests, 2);
        assert_eq!(b.adjacency, 0, "weekend 1 goes to the other clinician");

        // Flip one block assignment into a requested-off block.
        inst.clinicians[0].block_requests.insert(0);
        let b = objective_breakdown(&layout, &values, &inst);
        assert_eq!(b.block_requests, 0, "B*S - 2 after one conflict");
        assert!((b.weighted - (0.0 / 2.0 + 2.0 / 2.0 + 0.0)).abs() < 1e-12);
    }

    #[test]
    fn solver_z_values_do_not_change_the_breakdown() {
        let inst = instance(2, 1, 2, 3, &[], NcbMode::PerService);
        let (_, layout) = build(&inst);
        let sch = crate::validator::Schedule::from_parts(vec![vec![0], vec![1]], vec![0, 1, 0])
            .unwrap();
        let mut values = encode_schedule(&layout, &sch, &inst);
        let before = objective_breakdown(&layout, &values, &inst);
        for c in 0..2 {
            for &b in layout.adjacent_blocks() {
                values[layout.z_index(c, b, 0).unwrap()] = 0;
            }
        }
        let after = objective_breakdown(&layout, &values, &inst);
        assert_eq!(before, after);
    }

    #[test]
    fn removing_a_family_never_hurts_the_optimum() {
        let inst = instance(2, 1, 3, 3, &[0], NcbMode::PerService);
        let (ilp, layout) = build(&inst);
        let cfg = SolverConfig::default();
        let full = branch_and_bound(&ilp, &cfg).unwrap().objective;

        let ranges = [
            layout.rows.min_max.clone(),
            layout.rows.no_consecutive_blocks.clone(),
            layout.rows.no_consecutive_weekends.clone(),
            layout.rows.equal_weekends.clone(),
            layout.rows.equal_holidays.clone(),
        ];
        for range in ranges {
            let mut relaxed = Ilp01::with_names(ilp.var_names().to_vec());
            for (j, &c) in ilp.objective().iter().enumerate() {
                relaxed.set_objective(j, c);
            }
            for (i, c) in ilp.constraints().iter().enumerate() {
                if !range.contains(&i) {
                    relaxed.add_constraint(c.terms.clone(), c.sense, c.rhs);
                }
            }
            let looser = branch_and_bound(&relaxed, &cfg).unwrap().objective;
            assert!(
                looser >= full - 1e-9,
                "dropping rows {range:?} lowered the optimum: {looser} < {full}"
            );
        }
    }
}
