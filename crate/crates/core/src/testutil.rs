//! Small instance builders shared by the unit tests.

use std::collections::BTreeSet;

use crate::model::{
    AdjacencyMap, Clinician, NcbMode, ObjectiveWeights, ProblemInstance,
};

/// A clinician with no requests and bounds [0, max] on every service.
pub fn plain_clinician(name: &str, num_services: usize, max: usize) -> Clinician {
    Clinician {
        name: name.to_string(),
        block_requests: BTreeSet::new(),
        weekend_requests: BTreeSet::new(),
        min_blocks: vec![0; num_services],
        max_blocks: vec![max; num_services],
    }
}

/// An instance with `c` request-free clinicians, default adjacency and
/// equal weights. Long weekends are given 0-based.
pub fn instance(
    c: usize,
    services: usize,
    blocks: usize,
    weekends: usize,
    long_weekends: &[usize],
    ncb_mode: NcbMode,
) -> ProblemInstance {
    ProblemInstance {
        num_services: services,
        num_blocks: blocks,
        block_size_weeks: 2,
        num_weekends: weekends,
        long_weekends: long_weekends.iter().copied().collect(),
        clinicians: (0..c)
            .map(|i| plain_clinician(&format!("c{:02}", i + 1), services, blocks))
            .collect(),
        adjacency: AdjacencyMap::within_block_default(blocks, weekends),
        weights: ObjectiveWeights::default(),
        ncb_mode,
    }
}
