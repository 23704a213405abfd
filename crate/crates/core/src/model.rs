//! Problem-domain types for the block/weekend rostering problem.
//!
//! A department runs `num_services` concurrent services. The year is divided
//! into `num_blocks` work blocks (each `block_size_weeks` long) and
//! `num_weekends` weekends, a subset of which are long (holiday) weekends.
//! Every block of every service and every weekend must be covered by exactly
//! one clinician; clinicians submit time-off requests that the optimizer
//! tries to honor.
//!
//! All indices are 0-based in memory. The JSON and CSV interfaces in
//! [`crate::io`] speak 1-based indices and convert at the boundary.

use std::collections::BTreeMap;
use std::collections::BTreeSet;

/// How the no-consecutive-blocks rule is enforced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NcbMode {
    /// A clinician may not work blocks `b` and `b+1` on the *same* service.
    #[default]
    PerService,
    /// A clinician may not work blocks `b` and `b+1` on *any* services.
    CrossService,
    /// The rule is dropped entirely.
    Off,
}

impl NcbMode {
    pub fn as_str(self) -> &'static str {
        match self {
            NcbMode::PerService => "per-service",
            NcbMode::CrossService => "cross-service",
            NcbMode::Off => "off",
        }
    }
}

impl std::str::FromStr for NcbMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "per-service" | "per_service" => Ok(NcbMode::PerService),
            "cross-service" | "cross_service" => Ok(NcbMode::CrossService),
            "off" => Ok(NcbMode::Off),
            other => Err(format!(
                "unknown ncb mode {other:?} (expected per-service, cross-service or off)"
            )),
        }
    }
}

/// Weights of the three soft objectives: block requests, weekend requests,
/// block-weekend adjacency. Each must lie in `[0, 1]` and at least one must
/// be positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectiveWeights {
    pub block_requests: f64,
    pub weekend_requests: f64,
    pub adjacency: f64,
}

impl Default for ObjectiveWeights {
    fn default() -> Self {
        Self {
            block_requests: 1.0,
            weekend_requests: 1.0,
            adjacency: 1.0,
        }
    }
}

impl ObjectiveWeights {
    pub fn new(block_requests: f64, weekend_requests: f64, adjacency: f64) -> Self {
        Self {
            block_requests,
            weekend_requests,
            adjacency,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.block_requests, self.weekend_requests, self.adjacency]
    }
}

/// Injective mapping from blocks to their "adjacent" weekend.
///
/// Blocks without an adjacent weekend simply do not appear. The default
/// mapping pairs block `b` with the weekend that falls inside it under
/// two-week blocks: externally `phi(b) = 2b - 1`, which for the 0-based
/// representation used here is `phi(b) = 2b`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AdjacencyMap {
    map: BTreeMap<usize, usize>,
}

impl AdjacencyMap {
    /// Builds the default within-block mapping, truncated to weekends that
    /// exist: block `b` (0-based) maps to weekend `2b` where `2b < num_weekends`.
    pub fn within_block_default(num_blocks: usize, num_weekends: usize) -> Self {
        let map = (0..num_blocks)
            .filter_map(|b| {
                let w = 2 * b;
                (w < num_weekends).then_some((b, w))
            })
            .collect();
        Self { map }
    }

    /// Builds a mapping from explicit (block, weekend) pairs.
    pub fn from_pairs<I: IntoIterator<Item = (usize, usize)>>(pairs: I) -> Self {
        Self {
            map: pairs.into_iter().collect(),
        }
    }

    pub fn weekend_for(&self, block: usize) -> Option<usize> {
        self.map.get(&block).copied()
    }

    /// Blocks that have an adjacent weekend, in increasing order.
    pub fn blocks(&self) -> impl Iterator<Item = usize> + '_ {
        self.map.keys().copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.map.iter().map(|(&b, &w)| (b, w))
    }

    /// Number of blocks with an adjacent weekend.
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    fn is_injective(&self) -> bool {
        let images: BTreeSet<usize> = self.map.values().copied().collect();
        images.len() == self.map.len()
    }
}

/// One clinician: their time-off requests and per-service workload bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Clinician {
    pub name: String,
    /// Blocks (0-based) the clinician asked to be off.
    pub block_requests: BTreeSet<usize>,
    /// Weekends (0-based) the clinician asked to be off.
    pub weekend_requests: BTreeSet<usize>,
    /// Minimum blocks to work per service; length = number of services.
    pub min_blocks: Vec<usize>,
    /// Maximum blocks to work per service; length = number of services.
    pub max_blocks: Vec<usize>,
}

/// A full scheduling input.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub num_services: usize,
    pub num_blocks: usize,
    /// Weeks per block. Carried as metadata; only the CSV rendering of week
    /// numbers depends on it.
    pub block_size_weeks: usize,
    pub num_weekends: usize,
    /// Long (holiday) weekends, 0-based.
    pub long_weekends: BTreeSet<usize>,
    pub clinicians: Vec<Clinician>,
    pub adjacency: AdjacencyMap,
    pub weights: ObjectiveWeights,
    pub ncb_mode: NcbMode,
}

impl ProblemInstance {
    pub fn num_clinicians(&self) -> usize {
        self.clinicians.len()
    }

    /// Lower bound of the equal-weekends window, `floor(W / C)`.
    pub fn weekends_floor(&self) -> usize {
        self.num_weekends / self.num_clinicians()
    }

    /// Upper bound of the equal-weekends window, `ceil(W / C)`.
    pub fn weekends_ceil(&self) -> usize {
        self.num_weekends.div_ceil(self.num_clinicians())
    }

    /// Lower bound of the equal-holidays window, `floor(|L| / C)`.
    pub fn holidays_floor(&self) -> usize {
        self.long_weekends.len() / self.num_clinicians()
    }

    /// Upper bound of the equal-holidays window, `ceil(|L| / C)`.
    pub fn holidays_ceil(&self) -> usize {
        self.long_weekends.len().div_ceil(self.num_clinicians())
    }

    /// Checks every structural invariant of the instance, plus the counting
    /// condition `sum_c min <= B <= sum_c max` per service that any coverable
    /// instance must satisfy. Returns all violations found; an empty report
    /// means the instance is well-formed.
    ///
    /// Deliberately report-style: callers decide whether to abort.
    pub fn validate(&self) -> ValidationReport {
        let mut v = Vec::new();

        if self.num_services < 1 {
            v.push("instance must have at least one service".to_string());
        }
        if self.num_blocks < 1 {
            v.push("instance must have at least one block".to_string());
        }
        if self.num_weekends < 1 {
            v.push("instance must have at least one weekend".to_string());
        }
        if self.block_size_weeks < 1 {
            v.push("block size must be at least one week".to_string());
        }
        if self.clinicians.is_empty() {
            v.push("instance must have at least one clinician".to_string());
        }

        for &w in &self.long_weekends {
            if w >= self.num_weekends {
                v.push(format!(
                    "long weekend {} is out of range (weekends are 1..={})",
                    w + 1,
                    self.num_weekends
                ));
            }
        }

        let mut seen = BTreeSet::new();
        for c in &self.clinicians {
            if !seen.insert(c.name.as_str()) {
                v.push(format!("duplicate clinician name {:?}", c.name));
            }
        }

        for c in &self.clinicians {
            if c.min_blocks.len() != self.num_services || c.max_blocks.len() != self.num_services {
                v.push(format!(
                    "clinician {:?} must list min/max bounds for all {} services",
                    c.name, self.num_services
                ));
                continue;
            }
            for s in 0..self.num_services {
                let (lo, hi) = (c.min_blocks[s], c.max_blocks[s]);
                if lo > hi {
                    v.push(format!(
                        "clinician {:?}, service {}: min exceeds max ({} > {})",
                        c.name,
                        s + 1,
                        lo,
                        hi
                    ));
                }
                if hi > self.num_blocks {
                    v.push(format!(
                        "clinician {:?}, service {}: max {} exceeds block count {}",
                        c.name,
                        s + 1,
                        hi,
                        self.num_blocks
                    ));
                }
            }
            for &b in &c.block_requests {
                if b >= self.num_blocks {
                    v.push(format!(
                        "clinician {:?}: block request {} out of range (blocks are 1..={})",
                        c.name,
                        b + 1,
                        self.num_blocks
                    ));
                }
            }
            for &w in &c.weekend_requests {
                if w >= self.num_weekends {
                    v.push(format!(
                        "clinician {:?}: weekend request {} out of range (weekends are 1..={})",
                        c.name,
                        w + 1,
                        self.num_weekends
                    ));
                }
            }
        }

        if !self.adjacency.is_injective() {
            v.push("adjacency map must not send two blocks to the same weekend".to_string());
        }
        for (b, w) in self.adjacency.pairs() {
            if b >= self.num_blocks {
                v.push(format!(
                    "adjacency map references block {} out of range",
                    b + 1
                ));
            }
            if w >= self.num_weekends {
                v.push(format!(
                    "adjacency map references weekend {} out of range",
                    w + 1
                ));
            }
        }

        let [a1, a2, a3] = self.weights.as_array();
        for (name, a) in [("block request", a1), ("weekend request", a2), ("adjacency", a3)] {
            if !(0.0..=1.0).contains(&a) {
                v.push(format!("{name} weight {a} is outside [0, 1]"));
            }
        }
        if a1 == 0.0 && a2 == 0.0 && a3 == 0.0 {
            v.push("objective weights must not all be zero".to_string());
        }

        // Coverage is exact, so per service the min/max windows must bracket
        // the block count.
        if !self.clinicians.is_empty() {
            for s in 0..self.num_services {
                let bounds_ok = self
                    .clinicians
                    .iter()
                    .all(|c| c.min_blocks.len() == self.num_services && c.max_blocks.len() == self.num_services);
                if !bounds_ok {
                    continue;
                }
                let min_sum: usize = self.clinicians.iter().map(|c| c.min_blocks[s]).sum();
                let max_sum: usize = self.clinicians.iter().map(|c| c.max_blocks[s]).sum();
                if min_sum > self.num_blocks {
                    v.push(format!(
                        "service {}: sum of minimum blocks ({}) exceeds block count ({})",
                        s + 1,
                        min_sum,
                        self.num_blocks
                    ));
                }
                if max_sum < self.num_blocks {
                    v.push(format!(
                        "service {}: sum of maximum blocks ({}) falls short of block count ({})",
                        s + 1,
                        max_sum,
                        self.num_blocks
                    ));
                }
            }
        }

        ValidationReport { violations: v }
    }

    /// Fast necessary-condition checks run after [`validate`](Self::validate)
    /// and before the solver. A flagged instance cannot have any feasible
    /// schedule; an unflagged one may still turn out infeasible.
    pub fn feasibility_presolve(&self) -> PresolveReport {
        let mut flags = Vec::new();
        let c = self.num_clinicians();

        // Exact coverage forces a lone clinician onto every block of every
        // service, so two consecutive blocks always collide.
        if self.ncb_mode != NcbMode::Off && self.num_blocks >= 2 && c < 2 {
            flags.push(format!(
                "no-consecutive-blocks ({}) needs at least 2 clinicians once \
                 there are 2 or more blocks",
                self.ncb_mode.as_str()
            ));
        }
        // Same argument for weekends; that rule is never off.
        if self.num_weekends >= 2 && c < 2 {
            flags.push(
                "no-consecutive-weekends needs at least 2 clinicians once there are \
                 2 or more weekends"
                    .to_string(),
            );
        }

        PresolveReport { infeasibilities: flags }
    }
}

/// Outcome of [`ProblemInstance::validate`]. Empty means valid.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Outcome of [`ProblemInstance::feasibility_presolve`]. Empty means the
/// cheap necessary conditions all hold.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PresolveReport {
    pub infeasibilities: Vec<String>,
}

impl PresolveReport {
    pub fn is_feasible(&self) -> bool {
        self.infeasibilities.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{instance, plain_clinician};

    #[test]
    fn well_formed_instance_passes() {
        let inst = instance(2, 1, 2, 2, &[], NcbMode::Off);
        let report = inst.validate();
        assert!(report.is_valid(), "unexpected violations: {:?}", report.violations);
    }

    #[test]
    fn min_above_max_is_reported() {
        let mut inst = instance(2, 1, 4, 4, &[], NcbMode::PerService);
        inst.clinicians[0].min_blocks = vec![3];
        inst.clinicians[0].max_blocks = vec![2];
        let report = inst.validate();
        assert!(report.violations.iter().any(|m| m.contains("min exceeds max")));
    }

    #[test]
    fn min_sum_above_block_count_is_reported() {
        let mut inst = instance(2, 1, 4, 4, &[], NcbMode::PerService);
        for c in &mut inst.clinicians {
            c.min_blocks = vec![3];
            c.max_blocks = vec![4];
        }
        let report = inst.validate();
        assert!(
            report
                .violations
                .iter()
                .any(|m| m.contains("sum of minimum blocks (6) exceeds block count (4)")),
            "got: {:?}",
            report.violations
        );
    }

    #[test]
    fn out_of_range_indices_are_reported() {
        let mut inst = instance(2, 1, 2, 2, &[], NcbMode::Off);
        inst.long_weekends.insert(5);
        inst.clinicians[0].block_requests.insert(9);
        inst.clinicians[1].weekend_requests.insert(7);
        let report = inst.validate();
        assert_eq!(report.violations.len(), 3, "got: {:?}", report.violations);
    }

    #[test]
    fn duplicate_names_are_reported() {
        let mut inst = instance(2, 1, 2, 2, &[], NcbMode::Off);
        inst.clinicians[1].name = inst.clinicians[0].name.clone();
        assert!(!inst.validate().is_valid());
    }

    #[test]
    fn non_injective_adjacency_is_reported() {
        let mut inst = instance(2, 1, 2, 2, &[], NcbMode::Off);
        inst.adjacency = AdjacencyMap::from_pairs([(0, 0), (1, 0)]);
        assert!(!inst.validate().is_valid());
    }

    #[test]
    fn all_zero_weights_are_reported() {
        let mut inst = instance(2, 1, 2, 2, &[], NcbMode::Off);
        inst.weights = ObjectiveWeights::new(0.0, 0.0, 0.0);
        assert!(!inst.validate().is_valid());
    }

    #[test]
    fn presolve_flags_single_clinician_with_ncb() {
        let mut inst = ProblemInstance {
            num_services: 1,
            num_blocks: 2,
            block_size_weeks: 2,
            num_weekends: 1,
            long_weekends: BTreeSet::new(),
            clinicians: vec![plain_clinician("solo", 1, 2)],
            adjacency: AdjacencyMap::within_block_default(2, 1),
            weights: ObjectiveWeights::default(),
            ncb_mode: NcbMode::PerService,
        };
        assert!(inst.validate().is_valid());
        assert!(!inst.feasibility_presolve().is_feasible());

        inst.ncb_mode = NcbMode::Off;
        assert!(inst.feasibility_presolve().is_feasible());
    }

    #[test]
    fn presolve_flags_single_clinician_with_many_weekends() {
        let mut inst = instance(1, 1, 1, 3, &[], NcbMode::Off);
        assert!(inst.validate().is_valid());
        assert!(!inst.feasibility_presolve().is_feasible());
        inst.num_weekends = 1;
        inst.adjacency = AdjacencyMap::within_block_default(1, 1);
        assert!(inst.feasibility_presolve().is_feasible());
    }

    #[test]
    fn default_adjacency_truncates_to_existing_weekends() {
        let adj = AdjacencyMap::within_block_default(26, 51);
        assert_eq!(adj.len(), 26);
        assert_eq!(adj.weekend_for(0), Some(0));
        assert_eq!(adj.weekend_for(25), Some(50));

        let adj = AdjacencyMap::within_block_default(2, 2);
        assert_eq!(adj.len(), 1, "block 2 has no weekend within range");
    }
}
