//! Report assembly and output: JSON with 17 significant digits, CSV tables,
//! atomic file writes.

use std::collections::BTreeMap;
use std::io::{self, Write};
use std::path::Path;

use nefdual::duality::TestOutcome;
use serde::Serialize;
use serde_json::ser::{Formatter, Serializer};
use serde_json::Value;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, Serialize)]
pub struct Config {
    pub tolerance: Option<f64>,
    pub seed: Option<u64>,
    pub grid: Option<usize>,
    pub params: BTreeMap<String, f64>,
}

/// One judged or informational number.
#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: Option<bool>,
}

impl CheckResult {
    /// A residual judged against `tol`; NaN fails.
    pub fn judged(name: impl Into<String>, value: f64, residual: f64, tol: f64) -> Self {
        Self { name: name.into(), value, residual: Some(residual), tolerance: Some(tol), pass: Some(residual <= tol) }
    }

    pub fn info(name: impl Into<String>, value: f64) -> Self {
        Self { name: name.into(), value, residual: None, tolerance: None, pass: None }
    }

    /// A boolean outcome without a residual, e.g. whether a certificate was found.
    pub fn flag(name: impl Into<String>, value: f64, pass: bool) -> Self {
        Self { name: name.into(), value, residual: None, tolerance: None, pass: Some(pass) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateRecord {
    pub case: String,
    pub outcome: TestOutcome,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub elapsed_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub command: Vec<String>,
    pub config: Config,
    pub results: Vec<CheckResult>,
    pub certificates: Vec<CertificateRecord>,
    pub data: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
}

impl Report {
    pub fn new(command: Vec<String>, config: Config) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command,
            config,
            results: Vec::new(),
            certificates: Vec::new(),
            data: Value::Null,
            timing: None,
        }
    }

    pub fn push(&mut self, r: CheckResult) {
        self.results.push(r);
    }

    pub fn passed(&self) -> bool {
        self.results.iter().all(|r| r.pass != Some(false))
    }

    pub fn to_json(&self) -> io::Result<Vec<u8>> {
        let mut out = Vec::new();
        let mut ser = Serializer::with_formatter(&mut out, Precise::default());
        self.serialize(&mut ser).map_err(io::Error::other)?;
        out.push(b'\n');
        Ok(out)
    }
}

/// Pretty-printing formatter that writes every float with 17 significant digits.
#[derive(Default)]
pub struct Precise {
    inner: serde_json::ser::PrettyFormatter<'static>,
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(fn $name<W: ?Sized + Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.inner.$name(w $(, $arg)*)
        })*
    };
}

impl Formatter for Precise {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{}", format_f64(value))
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    delegate!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        end_object_key(),
        begin_object_value(),
        end_object_value(),
    );
}

/// `d.dddddddddddddddde±x`, which parses back to the same double.
pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Write `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// A CSV table; numbers are written with [`format_f64`].
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self { header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        self.rows.push(cells.into_iter().map(|c| c.to_string()).collect());
    }

    pub fn to_csv(&self) -> io::Result<Vec<u8>> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(io::Error::other)?;
        for r in &self.rows {
            w.write_record(r).map_err(io::Error::other)?;
        }
        w.into_inner().map_err(|e| io::Error::other(e.to_string()))
    }
}

pub enum Cell {
    F(f64),
    I(i64),
    S(String),
    Empty,
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::F(x) if x.is_finite() => f.write_str(&format_f64(*x)),
            Cell::F(x) => write!(f, "{x}"),
            Cell::I(n) => write!(f, "{n}"),
            Cell::S(s) => f.write_str(s),
            Cell::Empty => Ok(()),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::F)
    }
}

impl From<i64> for Cell {
    fn from(n: i64) -> Self {
        Cell::I(n)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::S(s.to_string())
    }
}
