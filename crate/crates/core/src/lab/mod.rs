//! Disorder Monte Carlo experiments and their persisted reports.
//!
//! Sample `i` of an experiment with base seed `s` draws its couplings from
//! stream `(s, i)`, so results do not depend on the worker count. Every bound
//! verdict uses the rigorous upper bound `ϑ/m` in place of the commutation
//! index.

mod free_energy;
mod moments;
pub mod stats;
mod tails;

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::algebra::{enumerate_set, OperatorKind};
use crate::error::{input, Error, Result};
use crate::index::index_upper;
use crate::models::{sample_classical_pspin, ClassicalInstance, Ensemble, ModelInstance, ModelKind};
use crate::linalg::RandomStream;

pub use free_energy::{
    free_energy_experiment, glassiness_contrast, gradcheck_log_z, single_term_free_energy, GradcheckResult,
};
pub use moments::{classical_overlap_experiment, exp_moment_check, mgf_check, mgf_single_term};
pub use tails::{tail_experiment, variance_identity_experiment, StateSpec, TailConfig, TailQuantity};

pub const SCHEMA_VERSION: u32 = 1;
/// Experiments refuse fewer samples than this.
pub const MIN_SAMPLES: usize = 16;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    /// The inequality that was checked.
    pub bound: String,
    #[serde(default)]
    pub note: String,
}

impl Verdict {
    pub fn new(name: impl Into<String>, passed: bool, bound: impl Into<String>, note: impl Into<String>) -> Self {
        Self { name: name.into(), passed, bound: bound.into(), note: note.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub experiment: String,
    pub params: Map<String, Value>,
    pub seed: u64,
    pub records: Vec<Value>,
    pub summary: Value,
    pub verdicts: Vec<Verdict>,
    pub duration_ms: u64,
}

impl ExperimentReport {
    pub(crate) fn new(experiment: &str, params: Value, seed: u64) -> Self {
        let params = match params {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        Self {
            schema_version: SCHEMA_VERSION,
            experiment: experiment.to_string(),
            params,
            seed,
            records: Vec::new(),
            summary: Value::Null,
            verdicts: Vec::new(),
            duration_ms: 0,
        }
    }

    pub(crate) fn finish(mut self, start: Instant) -> Result<Self> {
        self.duration_ms = start.elapsed().as_millis() as u64;
        self.validate()?;
        Ok(self)
    }

    pub fn passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }

    /// Structural checks: version, record count, bound citations.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Structural(msg));
        if self.schema_version != SCHEMA_VERSION {
            return bad(format!("schema version {} (expected {SCHEMA_VERSION})", self.schema_version));
        }
        if self.experiment.is_empty() {
            return bad("empty experiment name".into());
        }
        if let Some(n) = self.params.get("samples").and_then(Value::as_u64) {
            if self.records.len() as u64 != n {
                return bad(format!("{} records for {n} samples", self.records.len()));
            }
        }
        if let Some(v) = self.verdicts.iter().find(|v| v.bound.trim().is_empty()) {
            return bad(format!("verdict {:?} cites no bound", v.name));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: Self = serde_json::from_str(s)?;
        r.validate()?;
        Ok(r)
    }

    /// Writes JSON through a temporary file in the target directory and
    /// renames it into place.
    pub fn write_json(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json()?.as_bytes())
    }

    /// Per-sample records as CSV; array fields are joined with `;`.
    pub fn records_csv(&self) -> Result<String> {
        let mut header: Vec<String> = Vec::new();
        for r in &self.records {
            if let Value::Object(m) = r {
                for k in m.keys() {
                    if !header.contains(k) {
                        header.push(k.clone());
                    }
                }
            }
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&header).map_err(csv_err)?;
        for r in &self.records {
            let row: Vec<String> = header.iter().map(|k| r.get(k).map(cell).unwrap_or_default()).collect();
            w.write_record(&row).map_err(csv_err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Structural(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Structural(e.to_string()))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.records_csv()?.as_bytes())
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Structural(format!("csv: {e}"))
}

fn cell(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Array(a) => a.iter().map(cell).collect::<Vec<_>>().join(";"),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Model family, size and locality of an experiment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub n: usize,
    pub locality: usize,
}

impl ModelSpec {
    pub fn syk(n: usize, q: usize) -> Self {
        Self { kind: ModelKind::Syk, n, locality: q }
    }

    pub fn spin_glass(n: usize, k: usize) -> Self {
        Self { kind: ModelKind::SpinGlass, n, locality: k }
    }

    pub fn classical(n: usize, p: usize) -> Self {
        Self { kind: ModelKind::Classical, n, locality: p }
    }

    /// Rigorous upper bound on the commutation index: `ϑ/m` for the quantum
    /// ensembles and `1` for the (commuting) classical model.
    pub fn delta_upper(&self) -> Result<f64> {
        let kind = match self.kind {
            ModelKind::Classical => return Ok(1.0),
            ModelKind::Syk => OperatorKind::Majorana,
            ModelKind::SpinGlass => OperatorKind::Pauli,
        };
        Ok(index_upper(&enumerate_set(kind, self.n, self.locality)?)?.value)
    }

    pub(crate) fn ensemble(&self) -> Result<Ensemble> {
        Ensemble::new(self.kind, self.n, self.locality)
    }
}

/// One drawn instance of either family.
pub(crate) enum Drawn {
    Quantum(ModelInstance),
    Classical(ClassicalInstance),
}

impl Drawn {
    pub(crate) fn log_partition(&self, beta: f64) -> Result<f64> {
        match self {
            Drawn::Quantum(m) => m.log_partition(beta),
            Drawn::Classical(c) => Ok(c.log_partition(beta)),
        }
    }
}

/// Draws samples for a model; the quantum operator basis is built once.
pub(crate) struct Sampler {
    spec: ModelSpec,
    ensemble: Option<Ensemble>,
}

impl Sampler {
    pub(crate) fn new(spec: ModelSpec) -> Result<Self> {
        let ensemble = match spec.kind {
            ModelKind::Classical => {
                // validates n and p up front
                sample_classical_pspin(spec.n, spec.locality, 0)?;
                None
            }
            _ => Some(spec.ensemble()?),
        };
        Ok(Self { spec, ensemble })
    }

    pub(crate) fn draw(&self, seed: u64, index: usize) -> Result<Drawn> {
        let stream = RandomStream::new(seed, index as u64);
        match &self.ensemble {
            Some(e) => Ok(Drawn::Quantum(e.sample(stream)?)),
            None => Ok(Drawn::Classical(sample_classical_pspin(self.spec.n, self.spec.locality, stream)?)),
        }
    }
}

pub(crate) fn check_samples(samples: usize) -> Result<()> {
    if samples < MIN_SAMPLES {
        return input(format!("{samples} samples is too few (need at least {MIN_SAMPLES})"));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn dummy() -> ExperimentReport {
        let mut r = ExperimentReport::new("dummy", json!({"samples": 2, "n": 4}), 7);
        r.records = vec![json!({"sample": 0, "x": 1.5, "v": [1, 2]}), json!({"sample": 1, "x": -2.0, "v": []})];
        r.summary = json!({"mean": -0.25});
        r.verdicts.push(Verdict::new("ok", true, "x ≤ 2", ""));
        r
    }

    #[test]
    fn round_trip_and_validation() {
        let r = dummy();
        r.validate().unwrap();
        let back = ExperimentReport::from_json(&r.to_json().unwrap()).unwrap();
        assert_eq!(back, r);
        let mut bad = r.clone();
        bad.records.pop();
        assert!(bad.validate().is_err());
        let mut bad = r;
        bad.verdicts[0].bound.clear();
        assert!(bad.validate().is_err());
    }

    #[test]
    fn atomic_write_and_csv() {
        let dir = tempfile::tempdir().unwrap();
        let r = dummy();
        let p = dir.path().join("r.json");
        r.write_json(&p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(ExperimentReport::from_json(&text).unwrap(), r);
        assert_eq!(r.records_csv().unwrap(), "sample,x,v\n0,1.5,1;2\n1,-2.0,\n");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn too_few_samples() {
        assert!(check_samples(15).is_err());
        assert!(check_samples(16).is_ok());
    }
}
