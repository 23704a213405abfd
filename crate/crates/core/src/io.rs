//! Stable file formats: the JSON instance document and the schedule CSV.
//!
//! Both formats speak 1-based indices; conversion to the 0-based in-memory
//! representation happens here and nowhere else. Serialization is
//! deterministic (fixed field order, sorted sets), so identical instances
//! produce identical bytes.
//!
//! Instance document, `format: 1`:
//!
//! ```json
//! {
//!   "format": 1,
//!   "services": 2,
//!   "blocks": 26,
//!   "block_size_weeks": 2,
//!   "weekends": 51,
//!   "long_weekends": [1, 6, 11],
//!   "adjacency": "within_block_default",
//!   "weights": [1.0, 1.0, 1.0],
//!   "ncb_mode": "per-service",
//!   "clinicians": [
//!     {"name": "A", "min": [3, 2], "max": [5, 3],
//!      "block_requests": [4], "weekend_requests": [9]}
//!   ]
//! }
//! ```
//!
//! `adjacency` is either the keyword above (block `b` pairs with weekend
//! `2b - 1`, truncated to existing weekends) or an explicit
//! `{"block": weekend}` table.
//!
//! The schedule CSV has one row per week — `week`, one column per service,
//! `weekend` — mirroring how the roster is read on paper. With more
//! weekends than weeks (or the reverse) the shorter side's cells are empty.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{
    AdjacencyMap, Clinician, NcbMode, ObjectiveWeights, ProblemInstance,
};
use crate::validator::Schedule;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> FormatError {
    FormatError::Invalid(msg.into())
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    format: u32,
    services: usize,
    blocks: usize,
    #[serde(default = "default_block_size")]
    block_size_weeks: usize,
    weekends: usize,
    #[serde(default)]
    long_weekends: Vec<usize>,
    #[serde(default)]
    adjacency: AdjacencySpec,
    #[serde(default = "default_weights")]
    weights: [f64; 3],
    #[serde(default = "default_ncb")]
    ncb_mode: String,
    clinicians: Vec<ClinicianDoc>,
}

fn default_block_size() -> usize {
    2
}

fn default_weights() -> [f64; 3] {
    [1.0, 1.0, 1.0]
}

fn default_ncb() -> String {
    "per-service".to_string()
}

const ADJACENCY_KEYWORD: &str = "within_block_default";

#[derive(Default)]
enum AdjacencySpec {
    #[default]
    WithinBlockDefault,
    /// 1-based block -> 1-based weekend, serialized as a JSON object in
    /// numeric key order.
    Table(BTreeMap<usize, usize>),
}

impl Serialize for AdjacencySpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        match self {
            AdjacencySpec::WithinBlockDefault => s.serialize_str(ADJACENCY_KEYWORD),
            AdjacencySpec::Table(table) => {
                let mut m = s.serialize_map(Some(table.len()))?;
                for (b, w) in table {
                    m.serialize_entry(&b.to_string(), w)?;
                }
                m.end()
            }
        }
    }
}

impl<'de> Deserialize<'de> for AdjacencySpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct SpecVisitor;
        impl<'de> serde::de::Visitor<'de> for SpecVisitor {
            type Value = AdjacencySpec;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                write!(f, "\"{ADJACENCY_KEYWORD}\" or a {{\"block\": weekend}} table")
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<Self::Value, E> {
                if v == ADJACENCY_KEYWORD {
                    Ok(AdjacencySpec::WithinBlockDefault)
                } else {
                    Err(E::custom(format!(
                        "unknown adjacency keyword {v:?} (expected {ADJACENCY_KEYWORD:?})"
                    )))
                }
            }

            fn visit_map<A: serde::de::MapAccess<'de>>(
                self,
                mut map: A,
            ) -> Result<Self::Value, A::Error> {
                let mut table = BTreeMap::new();
                while let Some((key, value)) = map.next_entry::<String, usize>()? {
                    let block: usize = key.parse().map_err(|_| {
                        serde::de::Error::custom(format!("adjacency key {key:?} is not a block number"))
                    })?;
                    table.insert(block, value);
                }
                Ok(AdjacencySpec::Table(table))
            }
        }
        d.deserialize_any(SpecVisitor)
    }
}

#[derive(Serialize, Deserialize)]
struct ClinicianDoc {
    name: String,
    min: Vec<usize>,
    max: Vec<usize>,
    #[serde(default)]
    block_requests: Vec<usize>,
    #[serde(default)]
    weekend_requests: Vec<usize>,
}

/// 1-based external index -> 0-based internal.
fn to_zero_based(v: usize, what: &str) -> Result<usize, FormatError> {
    v.checked_sub(1)
        .ok_or_else(|| invalid(format!("{what} uses index 0, but indices are 1-based")))
}

fn set_to_zero_based(vs: &[usize], what: &str) -> Result<std::collections::BTreeSet<usize>, FormatError> {
    vs.iter().map(|&v| to_zero_based(v, what)).collect()
}

/// Renders an instance as the canonical JSON document.
pub fn instance_to_json(inst: &ProblemInstance) -> String {
    let adjacency =
        if inst.adjacency == AdjacencyMap::within_block_default(inst.num_blocks, inst.num_weekends) {
            AdjacencySpec::default()
        } else {
            AdjacencySpec::Table(inst.adjacency.pairs().map(|(b, w)| (b + 1, w + 1)).collect())
        };
    let doc = InstanceDoc {
        format: FORMAT_VERSION,
        services: inst.num_services,
        blocks: inst.num_blocks,
        block_size_weeks: inst.block_size_weeks,
        weekends: inst.num_weekends,
        long_weekends: inst.long_weekends.iter().map(|&w| w + 1).collect(),
        adjacency,
        weights: inst.weights.as_array(),
        ncb_mode: inst.ncb_mode.as_str().to_string(),
        clinicians: inst
            .clinicians
            .iter()
            .map(|c| ClinicianDoc {
                name: c.name.clone(),
                min: c.min_blocks.clone(),
                max: c.max_blocks.clone(),
                block_requests: c.block_requests.iter().map(|&b| b + 1).collect(),
                weekend_requests: c.weekend_requests.iter().map(|&w| w + 1).collect(),
            })
            .collect(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("instance documents serialize");
    text.push('\n');
    text
}

/// Parses the JSON instance document. Structural problems (bad JSON, wrong
/// format version, 0-based indices) error here; semantic problems are left
/// to [`ProblemInstance::validate`].
pub fn instance_from_json(text: &str) -> Result<ProblemInstance, FormatError> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    if doc.format != FORMAT_VERSION {
        return Err(invalid(format!(
            "unsupported format version {} (this build reads {FORMAT_VERSION})",
            doc.format
        )));
    }
    let adjacency = match doc.adjacency {
        AdjacencySpec::WithinBlockDefault => {
            AdjacencyMap::within_block_default(doc.blocks, doc.weekends)
        }
        AdjacencySpec::Table(table) => AdjacencyMap::from_pairs(
            table
                .into_iter()
                .map(|(b, w)| {
                    Ok((
                        to_zero_based(b, "adjacency block")?,
                        to_zero_based(w, "adjacency weekend")?,
                    ))
                })
                .collect::<Result<Vec<_>, FormatError>>()?,
        ),
    };
    let clinicians = doc
        .clinicians
        .iter()
        .map(|c| {
            Ok(Clinician {
                name: c.name.clone(),
                block_requests: set_to_zero_based(
                    &c.block_requests,
                    &format!("block request of {:?}", c.name),
                )?,
                weekend_requests: set_to_zero_based(
                    &c.weekend_requests,
                    &format!("weekend request of {:?}", c.name),
                )?,
                min_blocks: c.min.clone(),
                max_blocks: c.max.clone(),
            })
        })
        .collect::<Result<Vec<_>, FormatError>>()?;
    Ok(ProblemInstance {
        num_services: doc.services,
        num_blocks: doc.blocks,
        block_size_weeks: doc.block_size_weeks,
        num_weekends: doc.weekends,
        long_weekends: set_to_zero_based(&doc.long_weekends, "long weekend")?,
        clinicians,
        adjacency,
        weights: ObjectiveWeights::new(doc.weights[0], doc.weights[1], doc.weights[2]),
        ncb_mode: doc.ncb_mode.parse::<NcbMode>().map_err(invalid)?,
    })
}

fn service_headers(n: usize) -> Vec<String> {
    (1..=n).map(|s| format!("service_{s}")).collect()
}

/// Renders a schedule as the week-per-row CSV.
pub fn schedule_to_csv(sch: &Schedule, inst: &ProblemInstance) -> Result<String, FormatError> {
    if sch.num_blocks() != inst.num_blocks
        || sch.num_services() != inst.num_services
        || sch.num_weekends() != inst.num_weekends
    {
        return Err(invalid("schedule shape does not match the instance"));
    }
    let name = |c: usize| -> Result<&str, FormatError> {
        inst.clinicians
            .get(c)
            .map(|cl| cl.name.as_str())
            .ok_or_else(|| invalid(format!("clinician index {c} out of range")))
    };

    let weeks = inst.num_blocks * inst.block_size_weeks;
    let rows = weeks.max(inst.num_weekends);
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["week".to_string()];
    header.extend(service_headers(inst.num_services));
    header.push("weekend".to_string());
    w.write_record(&header)?;
    for row in 0..rows {
        let mut record = vec![(row + 1).to_string()];
        for s in 0..inst.num_services {
            if row < weeks {
                record.push(name(sch.block_assignee(row / inst.block_size_weeks, s))?.to_string());
            } else {
                record.push(String::new());
            }
        }
        if row < inst.num_weekends {
            record.push(name(sch.weekend_assignee(row))?.to_string());
        } else {
            record.push(String::new());
        }
        w.write_record(&record)?;
    }
    let bytes = w.into_inner().expect("vec writer never fails");
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Parses the schedule CSV back against its instance. Partial schedules
/// (missing rows, empty cells, weeks of one block naming different
/// clinicians) are rejected.
pub fn schedule_from_csv(text: &str, inst: &ProblemInstance) -> Result<Schedule, FormatError> {
    let index_of: std::collections::HashMap<&str, usize> = inst
        .clinicians
        .iter()
        .enumerate()
        .map(|(i, c)| (c.name.as_str(), i))
        .collect();
    let resolve = |name: &str, site: String| -> Result<usize, FormatError> {
        index_of
            .get(name)
            .copied()
            .ok_or_else(|| invalid(format!("unknown clinician {name:?} at {site}")))
    };

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let mut expected_header = vec!["week".to_string()];
    expected_header.extend(service_headers(inst.num_services));
    expected_header.push("weekend".to_string());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != expected_header {
        return Err(invalid(format!(
            "unexpected header {header:?}, expected {expected_header:?}"
        )));
    }

    let weeks = inst.num_blocks * inst.block_size_weeks;
    let rows_expected = weeks.max(inst.num_weekends);
    let mut block_assignee: Vec<Vec<Option<usize>>> =
        vec![vec![None; inst.num_services]; inst.num_blocks];
    let mut weekend_assignee: Vec<Option<usize>> = vec![None; inst.num_weekends];

    let mut rows_seen = 0usize;
    for (row_idx, record) in reader.records().enumerate() {
        let record = record?;
        rows_seen += 1;
        if row_idx >= rows_expected {
            return Err(invalid(format!(
                "too many rows: expected {rows_expected} weeks"
            )));
        }
        let week: usize = record
            .get(0)
            .and_then(|v| v.parse().ok())
            .ok_or_else(|| invalid(format!("row {}: bad week number", row_idx + 2)))?;
        if week != row_idx + 1 {
            return Err(invalid(format!(
                "row {}: week {week} out of order",
                row_idx + 2
            )));
        }
        for s in 0..inst.num_services {
            let cell = record
                .get(1 + s)
                .ok_or_else(|| invalid(format!("week {week}: missing service column")))?;
            if row_idx < weeks {
                if cell.is_empty() {
                    return Err(invalid(format!(
                        "week {week}, service {}: empty cell in a partial schedule",
                        s + 1
                    )));
                }
                let c = resolve(cell, format!("week {week}, service {}", s + 1))?;
                let b = row_idx / inst.block_size_weeks;
                match block_assignee[b][s] {
                    None => block_assignee[b][s] = Some(c),
                    Some(prev) if prev == c => {}
                    Some(prev) => {
                        return Err(invalid(format!(
                            "week {week}, service {}: {cell:?} disagrees with {:?} earlier in block {}",
                            s + 1,
                            inst.clinicians[prev].name,
                            b + 1
                        )))
                    }
                }
            } else if !cell.is_empty() {
                return Err(invalid(format!(
                    "week {week}: service cell beyond the last block should be empty"
                )));
            }
        }
        let cell = record
            .get(1 + inst.num_services)
            .ok_or_else(|| invalid(format!("week {week}: missing weekend column")))?;
        if row_idx < inst.num_weekends {
            if cell.is_empty() {
                return Err(invalid(format!(
                    "week {week}: empty weekend cell in a partial schedule"
                )));
            }
            weekend_assignee[row_idx] = Some(resolve(cell, format!("weekend {}", row_idx + 1))?);
        } else if !cell.is_empty() {
            return Err(invalid(format!(
                "week {week}: weekend cell beyond the last weekend should be empty"
            )));
        }
    }
    if rows_seen != rows_expected {
        return Err(invalid(format!(
            "partial schedule: {rows_seen} rows, expected {rows_expected}"
        )));
    }

    let blocks = block_assignee
        .into_iter()
        .map(|row| row.into_iter().map(|c| c.expect("all rows seen")).collect())
        .collect();
    let weekends = weekend_assignee
        .into_iter()
        .map(|c| c.expect("all rows seen"))
        .collect();
    Ok(Schedule::from_parts(blocks, weekends).expect("rectangular by construction"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::instance;

    #[test]
    fn instance_json_round_trips() {
        let mut inst = instance(3, 2, 4, 7, &[0, 3], NcbMode::CrossService);
        inst.clinicians[1].block_requests.insert(2);
        inst.clinicians[2].weekend_requests.insert(6);
        inst.weights = ObjectiveWeights::new(1.0, 0.5, 0.25);
        let text = instance_to_json(&inst);
        let back = instance_from_json(&text).unwrap();
        assert_eq!(back, inst);
        assert_eq!(instance_to_json(&back), text, "canonical bytes are stable");
        assert!(text.contains("within_block_default"));
    }

    #[test]
    fn explicit_adjacency_tables_round_trip() {
        let mut inst = instance(2, 1, 3, 3, &[], NcbMode::Off);
        inst.adjacency = AdjacencyMap::from_pairs([(0, 2), (2, 0)]);
        let text = instance_to_json(&inst);
        assert!(text.contains("\"1\": 3"), "1-based keys: {text}");
        let back = instance_from_json(&text).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn zero_based_indices_are_rejected() {
        let inst = instance(2, 1, 3, 3, &[], NcbMode::Off);
        let text = instance_to_json(&inst).replace("\"block_requests\": []", "\"block_requests\": [0]");
        let err = instance_from_json(&text).unwrap_err();
        assert!(err.to_string().contains("1-based"), "{err}");
    }

    #[test]
    fn wrong_format_version_is_rejected() {
        let inst = instance(2, 1, 3, 3, &[], NcbMode::Off);
        let text = instance_to_json(&inst).replace("\"format\": 1", "\"format\": 9");
        assert!(instance_from_json(&text).is_err());
    }

    #[test]
    fn missing_fields_get_defaults() {
        let text = r#"{
            "format": 1, "services": 1, "blocks": 2, "weekends": 3,
            "clinicians": [
                {"name": "a", "min": [0], "max": [2]},
                {"name": "b", "min": [0], "max": [2]}
            ]
        }"#;
        let inst = instance_from_json(text).unwrap();
        assert_eq!(inst.block_size_weeks, 2);
        assert_eq!(inst.ncb_mode, NcbMode::PerService);
        assert_eq!(inst.weights, ObjectiveWeights::default());
        assert_eq!(inst.adjacency, AdjacencyMap::within_block_default(2, 3));
        assert!(inst.validate().is_valid());
    }

    #[test]
    fn schedule_csv_round_trips_bit_exactly() {
        let inst = instance(3, 2, 3, 7, &[], NcbMode::Off);
        let sch = Schedule::from_parts(
            vec![vec![0, 1], vec![1, 2], vec![2, 0]],
            vec![0, 1, 2, 0, 1, 2, 0],
        )
        .unwrap();
        let text = schedule_to_csv(&sch, &inst).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "week,service_1,service_2,weekend");
        assert_eq!(lines.len(), 1 + 7, "7 weekend rows outlast 6 block weeks");
        assert_eq!(lines[7], "7,,,c01", "trailing weekend-only row");

        let back = schedule_from_csv(&text, &inst).unwrap();
        assert_eq!(back, sch);
        assert_eq!(schedule_to_csv(&back, &inst).unwrap(), text);
    }

    #[test]
    fn csv_rejects_partial_and_inconsistent_schedules() {
        let inst = instance(2, 1, 2, 4, &[], NcbMode::Off);
        let sch = Schedule::from_parts(vec![vec![0], vec![1]], vec![0, 1, 0, 1]).unwrap();
        let good = schedule_to_csv(&sch, &inst).unwrap();

        let missing_row = good.lines().take(4).collect::<Vec<_>>().join("\n");
        assert!(schedule_from_csv(&missing_row, &inst).is_err());

        let wrong_name = good.replace("c02", "nobody");
        assert!(schedule_from_csv(&wrong_name, &inst).is_err());

        // Weeks 1 and 2 are one block; naming different clinicians is torn.
        let torn = good.replace("1,c01,c01", "1,c02,c01");
        let err = schedule_from_csv(&torn, &inst).unwrap_err();
        assert!(err.to_string().contains("disagrees"), "{err}");
    }
}
