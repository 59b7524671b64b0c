//! CSV schemas shared by the subcommands and by downstream plotting.

use std::io::Write;
use std::path::Path;

use cdma_capacity::{CapacityCurve, Error as CoreError, SimulationSummary};

use crate::compare::ComparisonRow;
use crate::format::sig;
use crate::LabError;

pub const THEORY_HEADER: [&str; 8] = [
    "beta",
    "a_star",
    "t_star",
    "capacity_nats",
    "capacity_bits",
    "iterations",
    "residual",
    "status",
];

pub const SUMMARY_HEADER: [&str; 9] = [
    "K",
    "N",
    "beta_requested",
    "beta_effective",
    "tie_policy",
    "trials",
    "mean_capacity_bits",
    "std_capacity_bits",
    "master_seed",
];

pub const TRIAL_HEADER: [&str; 5] = ["point_index", "trial", "seed", "count", "capacity_bits"];

pub const COMPARE_HEADER: [&str; 7] = [
    "beta_effective",
    "c_infinity_bits",
    "mean_c_k_bits",
    "std_c_k_bits",
    "deviation_bits",
    "deviation_in_sigmas",
    "theory_source",
];

pub const STATUS_OK: &str = "ok";
pub const STATUS_NONCONVERGED: &str = "nonconverged";

pub type Record = Vec<String>;

pub fn theory_records(curve: &CapacityCurve) -> Vec<Record> {
    curve
        .points
        .iter()
        .map(|p| match &p.outcome {
            Ok(s) => vec![
                sig(s.beta),
                sig(s.a_star),
                sig(s.t_star),
                sig(s.capacity_nats),
                sig(s.capacity_bits),
                s.iterations.to_string(),
                sig(s.residual),
                STATUS_OK.into(),
            ],
            Err(CoreError::NonConvergence {
                iterations,
                residual,
                ..
            }) => vec![
                sig(p.beta),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                iterations.to_string(),
                sig(*residual),
                STATUS_NONCONVERGED.into(),
            ],
            Err(_) => vec![
                sig(p.beta),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                "error".into(),
            ],
        })
        .collect()
}

pub fn summary_records(summaries: &[SimulationSummary]) -> Vec<Record> {
    summaries
        .iter()
        .map(|s| {
            vec![
                s.users.to_string(),
                s.chips.to_string(),
                sig(s.beta_requested),
                sig(s.beta_effective),
                s.tie_policy.to_string(),
                s.trial_count().to_string(),
                sig(s.mean_capacity_bits),
                sig(s.std_capacity_bits),
                s.master_seed.to_string(),
            ]
        })
        .collect()
}

pub fn trial_records(summaries: &[SimulationSummary]) -> Vec<Record> {
    summaries
        .iter()
        .flat_map(|s| {
            s.trials.iter().map(move |t| {
                vec![
                    s.point_index.to_string(),
                    t.trial_index.to_string(),
                    t.seed.to_string(),
                    t.valid_count.to_string(),
                    sig(t.capacity_bits),
                ]
            })
        })
        .collect()
}

pub fn comparison_records(rows: &[ComparisonRow]) -> Vec<Record> {
    rows.iter()
        .map(|r| {
            vec![
                sig(r.beta_effective),
                sig(r.c_infinity_bits),
                sig(r.mean_c_k_bits),
                sig(r.std_c_k_bits),
                sig(r.deviation_bits),
                sig(r.deviation_in_sigmas),
                r.source.as_str().into(),
            ]
        })
        .collect()
}

/// Writes `header` and `rows` to a temporary file beside `path`, then
/// renames it over `path`.
pub fn write_csv(path: &Path, header: &[&str], rows: &[Record]) -> Result<(), LabError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let io = |e| LabError::io(path, e);
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    {
        let mut writer = csv::Writer::from_writer(tmp.as_file_mut());
        let csv_err = |e: csv::Error| LabError::io(path, e.into());
        writer.write_record(header).map_err(csv_err)?;
        for row in rows {
            writer.write_record(row).map_err(csv_err)?;
        }
        writer.flush().map_err(io)?;
    }
    tmp.as_file_mut().flush().map_err(io)?;
    tmp.persist(path).map_err(|e| LabError::io(path, e.error))?;
    Ok(())
}

/// One solved row of a theory CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryRow {
    pub beta: f64,
    pub capacity_bits: f64,
}

/// One row of a simulation summary CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRow {
    pub users: usize,
    pub beta_effective: f64,
    pub tie_policy: String,
    pub mean_capacity_bits: f64,
    pub std_capacity_bits: f64,
}

struct Table {
    path: std::path::PathBuf,
    header: csv::StringRecord,
    rows: Vec<(u64, csv::StringRecord)>,
}

impl Table {
    fn open(path: &Path) -> Result<Self, LabError> {
        let file = std::fs::File::open(path).map_err(|e| LabError::io(path, e))?;
        let mut reader = csv::Reader::from_reader(file);
        let header = reader
            .headers()
            .map_err(|e| LabError::input(path, format!("unreadable header: {e}")))?
            .clone();
        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(|e| LabError::input(path, format!("malformed row: {e}")))?;
            let line = record.position().map_or(0, |p| p.line());
            rows.push((line, record));
        }
        Ok(Self {
            path: path.to_path_buf(),
            header,
            rows,
        })
    }

    fn column(&self, name: &str) -> Result<usize, LabError> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| LabError::input(&self.path, format!("missing column `{name}`")))
    }

    fn field<T: std::str::FromStr>(
        &self,
        line: u64,
        record: &csv::StringRecord,
        column: usize,
    ) -> Result<T, LabError> {
        let raw = record.get(column).unwrap_or("");
        raw.trim().parse().map_err(|_| {
            LabError::input(
                &self.path,
                format!(
                    "line {line}: cannot parse `{raw}` in column `{}`",
                    &self.header[column]
                ),
            )
        })
    }
}

/// Reads the solved rows of a theory CSV; rows whose `status` is not `ok`
/// are skipped. A missing `status` column means every row is solved.
pub fn read_theory(path: &Path) -> Result<Vec<TheoryRow>, LabError> {
    let table = Table::open(path)?;
    let beta = table.column("beta")?;
    let bits = table.column("capacity_bits")?;
    let status = table.header.iter().position(|h| h == "status");
    let mut out = Vec::new();
    for (line, record) in &table.rows {
        if let Some(col) = status {
            if record.get(col) != Some(STATUS_OK) {
                continue;
            }
        }
        out.push(TheoryRow {
            beta: table.field(*line, record, beta)?,
            capacity_bits: table.field(*line, record, bits)?,
        });
    }
    if out.is_empty() {
        return Err(LabError::input(path, "no solved theory rows"));
    }
    Ok(out)
}

pub fn read_simulation(path: &Path) -> Result<Vec<SimulationRow>, LabError> {
    let table = Table::open(path)?;
    let users = table.column("K")?;
    let beta = table.column("beta_effective")?;
    let policy = table.column("tie_policy")?;
    let mean = table.column("mean_capacity_bits")?;
    let std = table.column("std_capacity_bits")?;
    let mut out = Vec::new();
    for (line, record) in &table.rows {
        out.push(SimulationRow {
            users: table.field(*line, record, users)?,
            beta_effective: table.field(*line, record, beta)?,
            tie_policy: record.get(policy).unwrap_or("").to_string(),
            mean_capacity_bits: table.field(*line, record, mean)?,
            std_capacity_bits: table.field(*line, record, std)?,
        });
    }
    if out.is_empty() {
        return Err(LabError::input(path, "no simulation rows"));
    }
    Ok(out)
}
