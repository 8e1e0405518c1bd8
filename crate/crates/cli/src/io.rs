//! Input decoding, artifact writing and the error surface.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;

pub const SCHEMA: u32 = 1;

/// Exit classes: verification failures and configuration errors.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, unreadable or malformed input, invalid parameters.
    Config(String),
    /// The computation ran but could not certify its result.
    Runtime(String),
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Runtime(_) => 1,
        }
    }

    pub fn to_json(&self) -> String {
        let (kind, message) = match self {
            Self::Config(m) => ("config", m),
            Self::Runtime(m) => ("runtime", m),
        };
        serde_json::json!({ "schema": SCHEMA, "error": { "kind": kind, "message": message } })
            .to_string()
    }
}

impl From<hexset::Error> for Failure {
    fn from(e: hexset::Error) -> Self {
        use hexset::Error::*;
        match e {
            NonFinite { .. }
            | EmptyInterval { .. }
            | NotCanonical { .. }
            | EmptySet
            | InvalidParameter { .. }
            | OverlappingBlocks { .. } => Self::Config(e.to_string()),
            _ => Self::Runtime(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, Failure>;

/// Reads `path` (or stdin for `-`) and decodes it, rejecting unknown fields
/// and any schema other than 1.
pub fn read_input<T: DeserializeOwned + Versioned>(path: Option<&Path>) -> CliResult<T> {
    let path =
        path.ok_or_else(|| Failure::Config("--input is required for this command".into()))?;
    let text = if path == Path::new("-") {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::Config(format!("reading stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("reading {}: {e}", path.display())))?
    };
    let value: T =
        serde_json::from_str(&text).map_err(|e| Failure::Config(format!("invalid input: {e}")))?;
    match value.schema() {
        None | Some(SCHEMA) => Ok(value),
        Some(v) => Err(Failure::Config(format!(
            "unsupported schema {v}, expected {SCHEMA}"
        ))),
    }
}

pub trait Versioned {
    fn schema(&self) -> Option<u32>;
}

/// One CSV file: name plus rows.
pub struct Table {
    pub name: &'static str,
    pub bytes: Vec<u8>,
}

impl Table {
    /// Serializes `rows` under `header`; the header is written even when
    /// there are no rows.
    pub fn new<R: Serialize>(name: &'static str, header: &[&str], rows: &[R]) -> CliResult<Self> {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(Vec::new());
        let fail = |e: csv::Error| Failure::Runtime(format!("writing {name}: {e}"));
        w.write_record(header).map_err(fail)?;
        for r in rows {
            w.serialize(r).map_err(fail)?;
        }
        let bytes = w
            .into_inner()
            .map_err(|e| Failure::Runtime(format!("writing {name}: {e}")))?;
        Ok(Self { name, bytes })
    }
}

/// Everything a command produces.
pub struct Artifacts {
    pub command: &'static str,
    pub report: serde_json::Value,
    pub tables: Vec<Table>,
    pub pass: bool,
}

impl Artifacts {
    pub fn new(command: &'static str, report: &impl Serialize, pass: bool) -> CliResult<Self> {
        let mut report = serde_json::to_value(report)
            .map_err(|e| Failure::Runtime(format!("serializing report: {e}")))?;
        if let serde_json::Value::Object(map) = &mut report {
            let mut ordered = serde_json::Map::new();
            ordered.insert("schema".into(), SCHEMA.into());
            ordered.insert("command".into(), command.into());
            ordered.insert("pass".into(), pass.into());
            for (k, v) in std::mem::take(map) {
                ordered.entry(k).or_insert(v);
            }
            *map = ordered;
        }
        Ok(Self {
            command,
            report,
            tables: Vec::new(),
            pass,
        })
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.tables.push(table);
        self
    }

    /// Prints the JSON report and, with `out`, writes it and the tables there.
    pub fn emit(&self, out: Option<&PathBuf>) -> CliResult<()> {
        let json = serde_json::to_string_pretty(&self.report)
            .map_err(|e| Failure::Runtime(format!("serializing report: {e}")))?;
        let mut stdout = std::io::stdout().lock();
        match writeln!(stdout, "{json}").and_then(|_| stdout.flush()) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                return Err(Failure::Runtime(format!("writing stdout: {e}")));
            }
            _ => {}
        }
        if let Some(dir) = out {
            let io =
                |e: std::io::Error| Failure::Config(format!("writing to {}: {e}", dir.display()));
            fs::create_dir_all(dir).map_err(io)?;
            fs::write(
                dir.join(format!("{}.json", self.command)),
                format!("{json}\n"),
            )
            .map_err(io)?;
            for t in &self.tables {
                fs::write(dir.join(t.name), &t.bytes).map_err(io)?;
            }
        }
        Ok(())
    }
}
