//! Shared helpers for the integration and acceptance tests: seeded random
//! instances small enough to enumerate, and an LP oracle that maximizes by
//! enumerating every constraint/bound intersection. Both stay independent of
//! the solver paths they are used to check.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use blockroster_core::ilp::{Ilp01, Sense};
use blockroster_core::model::{
    AdjacencyMap, Clinician, NcbMode, ObjectiveWeights, ProblemInstance,
};

/// A random instance with `C <= 3`, `S <= 2`, `B <= 4`, `W <= 4` that passes
/// `validate()`. Requests, bounds, long weekends, weights and the
/// no-consecutive-blocks mode are all randomized, so a healthy share of the
/// instances is infeasible through the consecutive/fair-share rules.
pub fn random_small_instance(seed: u64) -> ProblemInstance {
    for attempt in 0..10_000u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003) + attempt);
        let c = rng.gen_range(1..=3usize);
        let s = rng.gen_range(1..=2usize);
        let b = rng.gen_range(1..=4usize);
        let w = rng.gen_range(1..=4usize);

        let ncb_mode = match rng.gen_range(0..3) {
            0 => NcbMode::PerService,
            1 => NcbMode::CrossService,
            _ => NcbMode::Off,
        };
        let long_weekends: BTreeSet<usize> =
            (0..w).filter(|_| rng.gen_bool(0.3)).collect();

        let clinicians: Vec<Clinician> = (0..c)
            .map(|i| {
                let min_blocks: Vec<usize> =
                    (0..s).map(|_| if rng.gen_bool(0.3) { 1 } else { 0 }).collect();
                let max_blocks: Vec<usize> = min_blocks
                    .iter()
                    .map(|&lo| rng.gen_range(lo.max(1)..=b))
                    .collect();
                Clinician {
                    name: format!("c{}", i + 1),
                    block_requests: (0..b).filter(|_| rng.gen_bool(0.3)).collect(),
                    weekend_requests: (0..w).filter(|_| rng.gen_bool(0.3)).collect(),
                    min_blocks,
                    max_blocks,
                }
            })
            .collect();

        let mut weights = [0.0f64; 3];
        for v in &mut weights {
            *v = if rng.gen_bool(0.2) {
                0.0
            } else {
                rng.gen_range(0.05..=1.0)
            };
        }
        if weights.iter().all(|&v| v == 0.0) {
            weights[0] = 1.0;
        }

        let inst = ProblemInstance {
            num_services: s,
            num_blocks: b,
            block_size_weeks: 2,
            num_weekends: w,
            long_weekends,
            clinicians,
            adjacency: AdjacencyMap::within_block_default(b, w),
            weights: ObjectiveWeights::new(weights[0], weights[1], weights[2]),
            ncb_mode,
        };
        if inst.validate().is_valid() {
            return inst;
        }
    }
    unreachable!("rejection sampling found no valid instance for seed {seed}")
}

/// A random LP in `Ilp01` form: up to 6 variables, up to 4 rows, integer
/// coefficients in `-2..=2`.
pub fn random_small_lp(seed: u64) -> Ilp01 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(7_777_777) + 13);
    let n = rng.gen_range(3..=6usize);
    let m = rng.gen_range(1..=4usize);
    let mut p = Ilp01::new(n);
    for j in 0..n {
        p.set_objective(j, rng.gen_range(-2..=2i32) as f64);
    }
    for _ in 0..m {
        let mut terms: Vec<(usize, f64)> = Vec::new();
        for j in 0..n {
            if rng.gen_bool(0.7) {
                let a = rng.gen_range(-2..=2i32) as f64;
                if a != 0.0 {
                    terms.push((j, a));
                }
            }
        }
        let sense = match rng.gen_range(0..3) {
            0 => Sense::Le,
            1 => Sense::Ge,
            _ => Sense::Eq,
        };
        let rhs = rng.gen_range(-2..=3i32) as f64;
        p.add_constraint(terms, sense, rhs);
    }
    p
}

fn solve_dense(mut a: Vec<Vec<f64>>, mut rhs: Vec<f64>) -> Option<Vec<f64>> {
    let k = rhs.len();
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| {
            a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()
        })?;
        if a[piv][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, piv);
        rhs.swap(col, piv);
        for r in 0..k {
            if r != col {
                let f = a[r][col] / a[col][col];
                if f != 0.0 {
                    for cc in col..k {
                        a[r][cc] -= f * a[col][cc];
                    }
                    rhs[r] -= f * rhs[col];
                }
            }
        }
    }
    Some((0..k).map(|i| rhs[i] / a[i][i]).collect())
}

/// Maximizes `p`'s LP relaxation by enumerating candidate vertices: every
/// choice of tight rows and variables fixed at a bound. Returns `None` when
/// no candidate is feasible, which for a bounded polytope means infeasible.
pub fn vertex_enumeration_max(p: &Ilp01) -> Option<f64> {
    let n = p.num_vars();
    // Dense rows as equations `row . x = rhs` for tightness.
    let rows: Vec<(Vec<f64>, f64)> = p
        .constraints()
        .iter()
        .map(|c| {
            let mut dense = vec![0.0; n];
            for &(j, a) in &c.terms {
                dense[j] += a;
            }
            (dense, c.rhs)
        })
        .collect();

    let feasible = |x: &[f64]| -> bool {
        if x.iter().any(|&v| !(-1e-7..=1.0 + 1e-7).contains(&v)) {
            return false;
        }
        p.constraints().iter().all(|c| {
            let lhs = c.lhs_value(x);
            match c.sense {
                Sense::Le => lhs <= c.rhs + 1e-7,
                Sense::Ge => lhs >= c.rhs - 1e-7,
                Sense::Eq => (lhs - c.rhs).abs() <= 1e-7,
            }
        })
    };

    let mut best: Option<f64> = None;
    let m = rows.len();
    for tight_rows in 0..(1u32 << m) {
        let chosen: Vec<usize> = (0..m).filter(|&i| tight_rows >> i & 1 == 1).collect();
        let k = chosen.len();
        if k > n {
            continue;
        }
        // Choose which k variables stay free; the rest sit at a bound.
        for free_mask in 0..(1u32 << n) {
            if free_mask.count_ones() as usize != k {
                continue;
            }
            let free: Vec<usize> = (0..n).filter(|&j| free_mask >> j & 1 == 1).collect();
            let fixed: Vec<usize> = (0..n).filter(|&j| free_mask >> j & 1 == 0).collect();
            for bound_mask in 0..(1u32 << fixed.len()) {
                let mut x = vec![0.0; n];
                for (bi, &j) in fixed.iter().enumerate() {
                    x[j] = f64::from(bound_mask >> bi & 1);
                }
                if k > 0 {
                    let a: Vec<Vec<f64>> = chosen
                        .iter()
                        .map(|&r| free.iter().map(|&j| rows[r].0[j]).collect())
                        .collect();
                    let rhs: Vec<f64> = chosen
                        .iter()
                        .map(|&r| {
                            rows[r].1
                                - fixed
                                    .iter()
                                    .map(|&j| rows[r].0[j] * x[j])
                                    .sum::<f64>()
                        })
                        .collect();
                    let Some(sol) = solve_dense(a, rhs) else { continue };
                    for (fi, &j) in free.iter().enumerate() {
                        x[j] = sol[fi];
                    }
                }
                if feasible(&x) {
                    let obj: f64 = p
                        .objective()
                        .iter()
                        .zip(&x)
                        .map(|(c, v)| c * v)
                        .sum();
                    if best.map_or(true, |b| obj > b) {
                        best = Some(obj);
                    }
                }
            }
        }
    }
    best
}

/// Least-squares fit of `y = a + b x`; returns `(slope, r_squared)`.
pub fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return (0.0, 1.0);
    }
    let slope = sxy / sxx;
    let r2 = (sxy * sxy) / (sxx * syy);
    (slope, r2)
}
