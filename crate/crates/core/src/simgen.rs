//! Deterministic simulated-instance generation for benchmarks and tests.
//!
//! The same seed always produces the same instance, bit for bit. Request
//! sets are drawn uniformly without replacement; per-service block windows
//! use `floor(B/C) - 1 .. ceil(B/C) + 1` (clamped into `0..=B`), which
//! always leaves the coverage counts satisfiable with slack; long weekends
//! are spread evenly across the year.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::{
    AdjacencyMap, Clinician, NcbMode, ObjectiveWeights, ProblemInstance,
};

/// Knobs of one simulated instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimParams {
    pub num_clinicians: usize,
    pub num_services: usize,
    pub num_blocks: usize,
    pub num_weekends: usize,
    pub num_long_weekends: usize,
    /// Blocks requested off per clinician (clamped to the block count).
    pub block_requests_per_clinician: usize,
    /// Weekends requested off per clinician (clamped to the weekend count).
    pub weekend_requests_per_clinician: usize,
    pub ncb_mode: NcbMode,
    pub seed: u64,
}

impl Default for SimParams {
    fn default() -> Self {
        // The case-study shape: two services, a year of 2-week blocks.
        Self {
            num_clinicians: 10,
            num_services: 2,
            num_blocks: 26,
            num_weekends: 51,
            num_long_weekends: 10,
            block_requests_per_clinician: 5,
            weekend_requests_per_clinician: 0,
            ncb_mode: NcbMode::PerService,
            seed: 0,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ParamError {
    #[error("{0} must be at least 1")]
    ZeroCount(&'static str),
    #[error("{requested} long weekends do not fit into {weekends} weekends")]
    TooManyLongWeekends { requested: usize, weekends: usize },
}

/// `k` distinct values from `0..n`, in a seed-stable order-independent set.
fn sample_distinct(rng: &mut ChaCha8Rng, n: usize, k: usize) -> BTreeSet<usize> {
    let k = k.min(n);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..k {
        let j = rng.gen_range(i..n);
        pool.swap(i, j);
    }
    pool[..k].iter().copied().collect()
}

/// Generates the instance described by `p`. Pure in the seed: calling twice
/// yields identical instances.
pub fn generate(p: &SimParams) -> Result<ProblemInstance, ParamError> {
    for (what, n) in [
        ("number of clinicians", p.num_clinicians),
        ("number of services", p.num_services),
        ("number of blocks", p.num_blocks),
        ("number of weekends", p.num_weekends),
    ] {
        if n == 0 {
            return Err(ParamError::ZeroCount(what));
        }
    }
    if p.num_long_weekends > p.num_weekends {
        return Err(ParamError::TooManyLongWeekends {
            requested: p.num_long_weekends,
            weekends: p.num_weekends,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let (c, b, w) = (p.num_clinicians, p.num_blocks, p.num_weekends);

    let min_blocks = (b / c).saturating_sub(1);
    let max_blocks = (b.div_ceil(c) + 1).min(b);

    let name_width = c.to_string().len();
    let clinicians = (0..c)
        .map(|i| Clinician {
            name: format!("c{:0width$}", i + 1, width = name_width),
            block_requests: sample_distinct(&mut rng, b, p.block_requests_per_clinician),
            weekend_requests: sample_distinct(&mut rng, w, p.weekend_requests_per_clinician),
            min_blocks: vec![min_blocks; p.num_services],
            max_blocks: vec![max_blocks; p.num_services],
        })
        .collect();

    let long_weekends = (0..p.num_long_weekends)
        .map(|i| i * w / p.num_long_weekends)
        .collect();

    Ok(ProblemInstance {
        num_services: p.num_services,
        num_blocks: b,
        block_size_weeks: 2,
        num_weekends: w,
        long_weekends,
        clinicians,
        adjacency: AdjacencyMap::within_block_default(b, w),
        weights: ObjectiveWeights::default(),
        ncb_mode: p.ncb_mode,
    })
}
