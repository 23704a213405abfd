//! Generates a simulated instance, solves it, and prints the audit.
//!
//! Usage: solve_simulated [clinicians] [services] [blocks] [ncb-mode]

use std::time::Duration;

use blockroster_core::formulation;
use blockroster_core::ilp::{branch_and_bound, SolverConfig};
use blockroster_core::model::NcbMode;
use blockroster_core::simgen::{generate, SimParams};
use blockroster_core::validator::audit;

fn main() {
    let mut args = std::env::args().skip(1);
    let mut arg = |default: usize| -> usize {
        args.next()
            .map(|v| v.parse().expect("numeric argument"))
            .unwrap_or(default)
    };
    let clinicians = arg(10);
    let services = arg(2);
    let blocks = arg(26);
    let ncb_mode: NcbMode = std::env::args()
        .nth(4)
        .map(|v| v.parse().expect("ncb mode"))
        .unwrap_or(NcbMode::PerService);

    let params = SimParams {
        num_clinicians: clinicians,
        num_services: services,
        num_blocks: blocks,
        num_weekends: 2 * blocks - 1,
        num_long_weekends: 10.min(2 * blocks - 1),
        block_requests_per_clinician: 5.min(blocks),
        weekend_requests_per_clinician: 0,
        ncb_mode,
        seed: 42,
    };
    let inst = generate(&params).expect("valid parameters");
    assert!(inst.validate().is_valid());

    let (ilp, layout) = formulation::build(&inst);
    println!(
        "C={clinicians} S={services} B={blocks}: {} vars, {} rows, ncb {}",
        ilp.num_vars(),
        ilp.constraints().len(),
        ncb_mode.as_str()
    );

    let cfg = SolverConfig::default().with_time_limit(Duration::from_secs(300));
    let sol = branch_and_bound(&ilp, &cfg).expect("well-scaled instance");
    println!(
        "status {:?}, objective {:.6}, {} nodes, {:.3}s",
        sol.status,
        sol.objective,
        sol.node_count,
        sol.wall_time.as_secs_f64()
    );

    if !sol.values.is_empty() {
        let schedule = formulation::decode(&layout, &sol, &inst).expect("decodable");
        let report = audit(&schedule, &inst).expect("auditable");
        for (name, verdict) in report.named_verdicts() {
            println!(
                "{name}: {}",
                if verdict.pass() { "pass" } else { "FAIL" }
            );
        }
        println!(
            "block requests {}, weekend requests {}, adjacent {}",
            report.satisfied_block_requests,
            report.satisfied_weekend_requests,
            report.adjacent_pairs
        );
    }
}
