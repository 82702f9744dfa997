use std::fs;
use std::path::{Path, PathBuf};
use std::time::SystemTime;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::Usage;

pub const SCHEMA_VERSION: u32 = 1;

/// `%.11e` with a signed two-digit exponent: twelve significant digits.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.11e}");
    let (mantissa, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    format!("{mantissa}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Compact JSON with sorted keys.
pub fn canonical(config: &Value) -> String {
    // serde_json's default map is ordered by key
    serde_json::to_string(config).expect("json values serialize")
}

pub fn check_schema(value: &Value) -> Result<()> {
    match value.get("schema_version").and_then(Value::as_u64) {
        Some(v) if v == u64::from(SCHEMA_VERSION) => Ok(()),
        Some(v) => Err(Usage(format!("unsupported schema_version {v}, expected {SCHEMA_VERSION}")).into()),
        None => Err(Usage("config is missing schema_version".into()).into()),
    }
}

pub fn read_config<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Usage(format!("cannot read {}: {e}", path.display())))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    check_schema(&value)?;
    serde_json::from_value(value).map_err(|e| Usage(format!("{}: {e}", path.display())).into())
}

pub struct CsvTable {
    writer: csv::Writer<Vec<u8>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        writer.write_record(header).expect("in-memory write");
        Self { writer }
    }

    pub fn row<I, S>(&mut self, fields: I)
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields).expect("in-memory write");
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.writer.into_inner().expect("in-memory flush")
    }
}

#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub config_digest: String,
    pub config: Value,
    pub code_version: String,
    pub started_at: String,
    pub finished_at: String,
    pub terminal_event: Value,
    pub outputs: Vec<String>,
    pub summary: Value,
}

/// Output directory of one run. Files are only written through it so the
/// manifest lists every one of them.
pub struct Run {
    dir: PathBuf,
    command: String,
    config: Value,
    started: SystemTime,
    outputs: Vec<String>,
}

pub const MANIFEST: &str = "manifest.json";

impl Run {
    pub fn start(dir: &Path, force: bool, command: &str, config: Value) -> Result<Self> {
        let manifest = dir.join(MANIFEST);
        if manifest.exists() && !force {
            return Err(Usage(format!("{} already holds a run; pass --force to overwrite", dir.display())).into());
        }
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        if manifest.exists() {
            fs::remove_file(&manifest).with_context(|| format!("removing {}", manifest.display()))?;
        }
        Ok(Self { dir: dir.to_path_buf(), command: command.into(), config, started: SystemTime::now(), outputs: Vec::new() })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).with_context(|| format!("writing {}", path.display()))?;
        self.outputs.push(name.into());
        Ok(())
    }

    pub fn finish(self, terminal_event: Value, summary: Value) -> Result<PathBuf> {
        let manifest = RunManifest {
            command: self.command,
            config_digest: sha256_hex(canonical(&self.config).as_bytes()),
            config: self.config,
            code_version: env!("CARGO_PKG_VERSION").into(),
            started_at: humantime::format_rfc3339_millis(self.started).to_string(),
            finished_at: humantime::format_rfc3339_millis(SystemTime::now()).to_string(),
            terminal_event,
            outputs: self.outputs,
            summary,
        };
        let path = self.dir.join(MANIFEST);
        let text = serde_json::to_string_pretty(&manifest)? + "\n";
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}
