use std::fs;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

/// Full double precision: 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// A summary or sweep value rendered as a CSV field.
pub fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => num(n.as_f64().unwrap_or(f64::NAN)),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        // in-memory writes cannot fail
        w.write_record(&self.header).expect("csv header");
        for r in &self.rows {
            w.write_record(r).expect("csv row");
        }
        w.into_inner().expect("csv flush")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Stage {
    pub name: String,
    pub seconds: f64,
    pub diagnostics: Value,
}

/// Files and metrics produced by one command, before anything touches disk.
#[derive(Default)]
pub struct RunOutput {
    pub files: Vec<(String, Vec<u8>)>,
    /// Scalar metrics, reused as sweep summary columns.
    pub summary: Vec<(String, Value)>,
    pub stages: Vec<Stage>,
    /// Reported after the files are written, e.g. failed sweep points.
    pub deferred: Option<CliError>,
}

impl RunOutput {
    pub fn file(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    pub fn metric(&mut self, key: &str, v: impl Into<Value>) {
        self.summary.push((key.to_string(), v.into()));
    }

    /// Runs `f` as a named, timed stage.
    pub fn stage<T>(
        &mut self,
        name: &str,
        f: impl FnOnce() -> Result<(T, Value), CliError>,
    ) -> Result<T, CliError> {
        let start = Instant::now();
        let (out, diagnostics) = f()?;
        self.stages.push(Stage {
            name: name.to_string(),
            seconds: start.elapsed().as_secs_f64(),
            diagnostics,
        });
        Ok(out)
    }

    /// Moves `other`'s files under `dir/` and its stages under `dir:`.
    pub fn absorb(&mut self, dir: &str, other: RunOutput) {
        for (name, bytes) in other.files {
            self.files.push((format!("{dir}/{name}"), bytes));
        }
        for mut s in other.stages {
            s.name = format!("{dir}:{}", s.name);
            self.stages.push(s);
        }
    }
}

#[derive(Serialize)]
pub struct ManifestEntry {
    pub path: String,
    pub bytes: usize,
}

#[derive(Serialize)]
pub struct RunRecord<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'a str,
    pub config: &'a Value,
    pub prng: &'static str,
    pub wall_time_s: f64,
    pub stages: &'a [Stage],
    pub summary: serde_json::Map<String, Value>,
    pub manifest: Vec<ManifestEntry>,
}

/// Writes every file under `dir` and returns the manifest.
pub fn write_files(dir: &Path, files: &[(String, Vec<u8>)]) -> Result<Vec<ManifestEntry>, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut manifest = Vec::with_capacity(files.len());
    for (name, bytes) in files {
        let path = dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| CliError::io(parent, e))?;
        }
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        manifest.push(ManifestEntry {
            path: name.clone(),
            bytes: bytes.len(),
        });
    }
    Ok(manifest)
}
