//! Schedule auditing: the seven hard rules and the soft-objective metrics.
//!
//! [`audit`] accepts any total [`Schedule`] — solver output or an externally
//! written roster — and reports, per hard rule, the list of violation sites,
//! plus the three satisfied/total soft metrics: honored block requests,
//! honored weekend requests, and blocks whose adjacent weekend went to one
//! of the block's own clinicians.

use crate::model::{NcbMode, ProblemInstance};

/// A decoded assignment: one clinician per (block, service) cell and one per
/// weekend. Total by construction; partial schedules must be rejected when
/// parsing, not here.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    /// `[block][service]` -> clinician index.
    block_assignee: Vec<Vec<usize>>,
    /// `[weekend]` -> clinician index.
    weekend_assignee: Vec<usize>,
}

#[derive(Debug, thiserror::Error)]
pub enum ScheduleShapeError {
    #[error("schedule has no blocks")]
    NoBlocks,
    #[error("block {} lists {found} services, expected {expected}", block + 1)]
    RaggedBlock {
        block: usize,
        expected: usize,
        found: usize,
    },
}

impl Schedule {
    pub fn from_parts(
        block_assignee: Vec<Vec<usize>>,
        weekend_assignee: Vec<usize>,
    ) -> Result<Self, ScheduleShapeError> {
        let Some(first) = block_assignee.first() else {
            return Err(ScheduleShapeError::NoBlocks);
        };
        let services = first.len();
        for (b, row) in block_assignee.iter().enumerate() {
            if row.len() != services {
                return Err(ScheduleShapeError::RaggedBlock {
                    block: b,
                    expected: services,
                    found: row.len(),
                });
            }
        }
        Ok(Self {
            block_assignee,
            weekend_assignee,
        })
    }

    pub fn num_blocks(&self) -> usize {
        self.block_assignee.len()
    }

    pub fn num_services(&self) -> usize {
        self.block_assignee.first().map_or(0, Vec::len)
    }

    pub fn num_weekends(&self) -> usize {
        self.weekend_assignee.len()
    }

    /// Clinician covering `service` during `block` (0-based).
    pub fn block_assignee(&self, block: usize, service: usize) -> usize {
        self.block_assignee[block][service]
    }

    /// Clinician covering `weekend` (0-based).
    pub fn weekend_assignee(&self, weekend: usize) -> usize {
        self.weekend_assignee[weekend]
    }

    /// True if `clinician` covers any service during `block`.
    pub fn works_block(&self, clinician: usize, block: usize) -> bool {
        self.block_assignee[block].contains(&clinician)
    }
}

/// One hard rule's outcome: pass iff no violation sites.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Verdict {
    pub violations: Vec<String>,
}

impl Verdict {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A satisfied/total soft metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub satisfied: usize,
    pub total: usize,
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}/{}", self.satisfied, self.total)
    }
}

/// Per-rule verdicts and soft metrics for one schedule.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub block_coverage: Verdict,
    pub weekend_coverage: Verdict,
    pub min_max: Verdict,
    pub no_consecutive_blocks: Verdict,
    pub no_consecutive_weekends: Verdict,
    pub equal_weekends: Verdict,
    pub equal_holidays: Verdict,
    pub satisfied_block_requests: Ratio,
    pub satisfied_weekend_requests: Ratio,
    pub adjacent_pairs: Ratio,
}

impl AuditReport {
    pub fn hard_pass(&self) -> bool {
        self.named_verdicts().iter().all(|(_, v)| v.pass())
    }

    /// The seven verdicts in presentation order.
    pub fn named_verdicts(&self) -> [(&'static str, &Verdict); 7] {
        [
            ("Block Coverage", &self.block_coverage),
            ("Weekend Coverage", &self.weekend_coverage),
            ("Min/Max", &self.min_max),
            ("No Consecutive Blocks", &self.no_consecutive_blocks),
            ("No Consecutive Weekends", &self.no_consecutive_weekends),
            ("Equal Weekends", &self.equal_weekends),
            ("Equal Holidays", &self.equal_holidays),
        ]
    }
}

#[derive(Debug, thiserror::Error)]
pub enum AuditError {
    #[error("schedule shape {found} does not match instance {expected} ({what})")]
    ShapeMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("clinician index {index} out of range at {site} (instance has {count})")]
    ClinicianOutOfRange {
        index: usize,
        site: String,
        count: usize,
    },
}

/// Audits `sch` against `inst`: re-checks coverage, then the five
/// non-structural hard rules, then computes the soft metrics.
pub fn audit(sch: &Schedule, inst: &ProblemInstance) -> Result<AuditReport, AuditError> {
    let c_count = inst.num_clinicians();
    let name = |c: usize| inst.clinicians[c].name.as_str();

    for (what, expected, found) in [
        ("blocks", inst.num_blocks, sch.num_blocks()),
        ("services", inst.num_services, sch.num_services()),
        ("weekends", inst.num_weekends, sch.num_weekends()),
    ] {
        if expected != found {
            return Err(AuditError::ShapeMismatch {
                what,
                expected,
                found,
            });
        }
    }
    for b in 0..inst.num_blocks {
        for s in 0..inst.num_services {
            let c = sch.block_assignee(b, s);
            if c >= c_count {
                return Err(AuditError::ClinicianOutOfRange {
                    index: c,
                    site: format!("block {}, service {}", b + 1, s + 1),
                    count: c_count,
                });
            }
        }
    }
    for w in 0..inst.num_weekends {
        let c = sch.weekend_assignee(w);
        if c >= c_count {
            return Err(AuditError::ClinicianOutOfRange {
                index: c,
                site: format!("weekend {}", w + 1),
                count: c_count,
            });
        }
    }

    // Coverage holds by the totality of the Schedule type; the two verdicts
    // are still reported so the seven-rule table is complete.
    let block_coverage = Verdict::default();
    let weekend_coverage = Verdict::default();

    let mut min_max = Verdict::default();
    for (c, cl) in inst.clinicians.iter().enumerate() {
        for s in 0..inst.num_services {
            let worked = (0..inst.num_blocks)
                .filter(|&b| sch.block_assignee(b, s) == c)
                .count();
            if worked < cl.min_blocks[s] {
                min_max.violations.push(format!(
                    "{} works {} blocks of service {}, fewer than the minimum {}",
                    cl.name,
                    worked,
                    s + 1,
                    cl.min_blocks[s]
                ));
            }
            if worked > cl.max_blocks[s] {
                min_max.violations.push(format!(
                    "{} works {} blocks of service {}, more than the maximum {}",
                    cl.name,
                    worked,
                    s + 1,
                    cl.max_blocks[s]
                ));
            }
        }
    }

    let mut no_consecutive_blocks = Verdict::default();
    match inst.ncb_mode {
        NcbMode::PerService => {
            for b in 0..inst.num_blocks.saturating_sub(1) {
                for s in 0..inst.num_services {
                    let c = sch.block_assignee(b, s);
                    if sch.block_assignee(b + 1, s) == c {
                        no_consecutive_blocks.violations.push(format!(
                            "{} works consecutive blocks {} and {} on service {}",
                            name(c),
                            b + 1,
                            b + 2,
                            s + 1
                        ));
                    }
                }
            }
        }
        NcbMode::CrossService => {
            for b in 0..inst.num_blocks.saturating_sub(1) {
                for s in 0..inst.num_services {
                    let c = sch.block_assignee(b, s);
                    if sch.works_block(c, b + 1) {
                        no_consecutive_blocks.violations.push(format!(
                            "{} works consecutive blocks {} and {}",
                            name(c),
                            b + 1,
                            b + 2
                        ));
                    }
                }
            }
        }
        NcbMode::Off => {}
    }

    let mut no_consecutive_weekends = Verdict::default();
    for w in 0..inst.num_weekends.saturating_sub(1) {
        let c = sch.weekend_assignee(w);
        if sch.weekend_assignee(w + 1) == c {
            no_consecutive_weekends.violations.push(format!(
                "{} works consecutive weekends {} and {}",
                name(c),
                w + 1,
                w + 2
            ));
        }
    }

    let mut equal_weekends = Verdict::default();
    let (wf, wc) = (inst.weekends_floor(), inst.weekends_ceil());
    for (c, cl) in inst.clinicians.iter().enumerate() {
        let count = (0..inst.num_weekends)
            .filter(|&w| sch.weekend_assignee(w) == c)
            .count();
        if count < wf || count > wc {
            equal_weekends.violations.push(format!(
                "{} covers {} weekends, outside the fair window {}..={}",
                cl.name, count, wf, wc
            ));
        }
    }

    let mut equal_holidays = Verdict::default();
    let (hf, hc) = (inst.holidays_floor(), inst.holidays_ceil());
    for (c, cl) in inst.clinicians.iter().enumerate() {
        let count = inst
            .long_weekends
            .iter()
            .filter(|&&w| sch.weekend_assignee(w) == c)
            .count();
        if count < hf || count > hc {
            equal_holidays.violations.push(format!(
                "{} covers {} long weekends, outside the fair window {}..={}",
                cl.name, count, hf, hc
            ));
        }
    }

    // Soft metrics. A block request is satisfied iff the requester holds no
    // service at all on that block; adjacency counts at most once per block.
    let mut satisfied_block_requests = Ratio { satisfied: 0, total: 0 };
    let mut satisfied_weekend_requests = Ratio { satisfied: 0, total: 0 };
    for (c, cl) in inst.clinicians.iter().enumerate() {
        for &b in &cl.block_requests {
            satisfied_block_requests.total += 1;
            if !sch.works_block(c, b) {
                satisfied_block_requests.satisfied += 1;
            }
        }
        for &w in &cl.weekend_requests {
            satisfied_weekend_requests.total += 1;
            if sch.weekend_assignee(w) != c {
                satisfied_weekend_requests.satisfied += 1;
            }
        }
    }
    let mut adjacent_pairs = Ratio { satisfied: 0, total: 0 };
    for (b, w) in inst.adjacency.pairs() {
        adjacent_pairs.total += 1;
        if sch.works_block(sch.weekend_assignee(w), b) {
            adjacent_pairs.satisfied += 1;
        }
    }

    Ok(AuditReport {
        block_coverage,
        weekend_coverage,
        min_max,
        no_consecutive_blocks,
        no_consecutive_weekends,
        equal_weekends,
        equal_holidays,
        satisfied_block_requests,
        satisfied_weekend_requests,
        adjacent_pairs,
    })
}
