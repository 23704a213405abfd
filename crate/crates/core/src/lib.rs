//! Exact clinician rostering over blocks and weekends.
//!
//! The library models a department where every work block of every service
//! and every weekend needs exactly one clinician, encodes the scheduling
//! rules as a 0-1 integer linear program, and solves it exactly with an
//! internal LP-relaxation + branch-and-bound solver. Produced (or external)
//! schedules can be audited against the hard rules and scored on how many
//! time-off requests and block-weekend adjacencies they satisfy.
//!
//! Module map:
//! - [`model`]: problem instances and their validation.
//! - [`ilp`]: the generic 0-1 ILP solver (simplex, branch and bound,
//!   LP-format export).
//! - [`formulation`]: instance -> ILP encoding and solution decoding.
//! - [`validator`]: schedule auditing and soft-objective metrics.
//! - [`oracle`]: exhaustive reference optimizer for small instances.
//! - [`simgen`]: deterministic simulated-instance generation.
//! - [`io`]: the JSON instance format and the schedule CSV format.

pub mod formulation;
pub mod ilp;
pub mod io;
pub mod model;
pub mod oracle;
pub mod simgen;
pub mod validator;

#[doc(hidden)]
pub mod testutil;
