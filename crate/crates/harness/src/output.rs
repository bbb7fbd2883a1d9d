//! Result rows and the files written into an output directory.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use crate::config::ExperimentConfig;
use crate::error::HarnessError;

pub const SWEEP_HEADER: [&str; 13] = [
    "experiment",
    "target",
    "qubits",
    "layers",
    "region_kind",
    "region_size",
    "r2_q_t",
    "r2_c_t",
    "r2_c_q",
    "mse",
    "quantum_calls",
    "seed",
    "wall_ms",
];

/// One row of `sweep.csv`. `None` fields are written as empty cells.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub experiment: String,
    pub target: String,
    pub qubits: usize,
    pub layers: usize,
    pub region_kind: String,
    pub region_size: f64,
    /// Quantum model vs target.
    pub r2_q_t: Option<f64>,
    /// Classical surrogate vs target.
    pub r2_c_t: Option<f64>,
    /// Classical surrogate vs quantum model.
    pub r2_c_q: Option<f64>,
    /// Final training loss of the quantum model.
    pub mse: Option<f64>,
    pub quantum_calls: Option<usize>,
    pub seed: u64,
    pub wall_ms: Option<u64>,
}

/// One loss trace, written as rows `(id columns…, step, mse)`.
#[derive(Debug, Clone, PartialEq)]
pub struct LossTrace {
    pub target: String,
    pub qubits: usize,
    pub region_size: f64,
    /// Step 0 is the loss before any update.
    pub losses: Vec<f64>,
}

/// Named numeric table written as an extra CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file_name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub records: Vec<SweepRecord>,
    pub traces: Vec<LossTrace>,
    pub tables: Vec<Table>,
    /// Extra files written verbatim, e.g. fitted models as JSON.
    pub documents: Vec<(String, String)>,
    pub summary: serde_json::Value,
}

fn fmt_f64(v: f64) -> String {
    // shortest representation that parses back to the same value
    format!("{v:?}")
}

fn fmt_opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_sweep_csv<W: Write>(out: W, records: &[SweepRecord]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in records {
        w.write_record([
            r.experiment.clone(),
            r.target.clone(),
            r.qubits.to_string(),
            r.layers.to_string(),
            r.region_kind.clone(),
            fmt_f64(r.region_size),
            fmt_opt(r.r2_q_t.map(fmt_f64)),
            fmt_opt(r.r2_c_t.map(fmt_f64)),
            fmt_opt(r.r2_c_q.map(fmt_f64)),
            fmt_opt(r.mse.map(fmt_f64)),
            fmt_opt(r.quantum_calls),
            r.seed.to_string(),
            fmt_opt(r.wall_ms),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_traces_csv<W: Write>(out: W, experiment: &str, traces: &[LossTrace]) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["experiment", "target", "qubits", "region_size", "step", "mse"])?;
    for t in traces {
        for (step, loss) in t.losses.iter().enumerate() {
            w.write_record([
                experiment.to_string(),
                t.target.clone(),
                t.qubits.to_string(),
                fmt_f64(t.region_size),
                step.to_string(),
                fmt_f64(*loss),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_table_csv<W: Write>(out: W, table: &Table) -> Result<(), HarnessError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|&v| fmt_f64(v)))?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `config.json`, `sweep.csv`, `loss_traces.csv`, `summary.json` and
/// any extra tables into `dir`, creating it if needed.
pub fn write_all(dir: &Path, config: &ExperimentConfig, run: &RunOutput) -> Result<(), HarnessError> {
    let io = |e: std::io::Error| HarnessError::Io(format!("{}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(io)?;
    fs::write(dir.join("config.json"), config.to_json() + "\n").map_err(io)?;
    write_sweep_csv(fs::File::create(dir.join("sweep.csv")).map_err(io)?, &run.records)?;
    write_traces_csv(
        fs::File::create(dir.join("loss_traces.csv")).map_err(io)?,
        config.experiment.as_str(),
        &run.traces,
    )?;
    for t in &run.tables {
        write_table_csv(fs::File::create(dir.join(&t.file_name)).map_err(io)?, t)?;
    }
    for (name, text) in &run.documents {
        fs::write(dir.join(name), text).map_err(io)?;
    }
    let summary = serde_json::to_string_pretty(&run.summary).expect("summary serialises");
    fs::write(dir.join("summary.json"), summary + "\n").map_err(io)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_options_are_blank_cells() {
        let rec = SweepRecord {
            experiment: "x".into(),
            target: "t".into(),
            qubits: 1,
            layers: 2,
            region_kind: "ball".into(),
            region_size: 0.5,
            r2_q_t: Some(0.25),
            r2_c_t: None,
            r2_c_q: None,
            mse: Some(1e-3),
            quantum_calls: None,
            seed: 9,
            wall_ms: None,
        };
        let mut buf = Vec::new();
        write_sweep_csv(&mut buf, &[rec]).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], SWEEP_HEADER.join(","));
        assert_eq!(lines[1], "x,t,1,2,ball,0.5,0.25,,,0.001,,9,");
    }
}
