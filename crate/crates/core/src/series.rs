//! Scalar time series: construction, logistic-map generation, file ingestion,
//! CSV export and block segmentation.

use std::collections::HashMap;
use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SeriesError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("cannot open {path}")]
    MissingFile {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("column {0} not found")]
    ColumnNotFound(String),
    #[error("selected column contains no samples")]
    EmptyColumn,
    #[error("non-finite value at line {line}")]
    NonFinite { line: u64 },
    #[error("non-finite value at position {0}")]
    NonFiniteValue(usize),
    #[error("time stamps must be consecutive integers (record {0})")]
    IrregularSampling(usize),
    #[error("segmentation: {0}")]
    Segmentation(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

impl SeriesError {
    /// Stable machine-readable code for each failure class.
    pub fn code(&self) -> &'static str {
        match self {
            SeriesError::InvalidParameter { .. } => "invalid-parameter",
            SeriesError::MissingFile { .. } => "missing-file",
            SeriesError::Parse { .. } => "parse-failure",
            SeriesError::ColumnNotFound(_) => "column-not-found",
            SeriesError::EmptyColumn => "empty-column",
            SeriesError::NonFinite { .. } | SeriesError::NonFiniteValue(_) => "non-finite-value",
            SeriesError::IrregularSampling(_) => "irregular-sampling",
            SeriesError::Segmentation(_) => "segmentation",
            SeriesError::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, SeriesError>;

/// An ordered sequence of finite samples with implicit integer time stamps
/// `t_i = start_index + i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    values: Vec<f64>,
    start_index: i64,
    label: Option<String>,
    /// Positions where non-contiguous blocks were joined (concatenated
    /// segments only). Each entry is the offset of the first sample of a
    /// joined block.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    seams: Vec<usize>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(SeriesError::NonFiniteValue(pos));
        }
        Ok(Self {
            values,
            start_index: 0,
            label: None,
            seams: Vec::new(),
        })
    }

    pub fn with_start_index(mut self, start_index: i64) -> Self {
        self.start_index = start_index;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn start_index(&self) -> i64 {
        self.start_index
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn seams(&self) -> &[usize] {
        &self.seams
    }

    /// Time stamp of the sample at `pos`.
    pub fn time(&self, pos: usize) -> i64 {
        self.start_index + pos as i64
    }
}

/// Parameters of the logistic map `x <- mu * x * (1 - x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogisticParams {
    pub mu: f64,
    pub x0: f64,
    pub n: usize,
    pub transient: usize,
}

impl LogisticParams {
    pub const DEFAULT_X0: f64 = 0.4;
    pub const DEFAULT_TRANSIENT: usize = 1000;

    pub fn new(mu: f64, n: usize) -> Self {
        Self {
            mu,
            x0: Self::DEFAULT_X0,
            n,
            transient: Self::DEFAULT_TRANSIENT,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=4.0).contains(&self.mu) {
            return Err(SeriesError::InvalidParameter {
                name: "mu",
                reason: format!("{} is outside [0, 4]", self.mu),
            });
        }
        if !(self.x0 > 0.0 && self.x0 < 1.0) {
            return Err(SeriesError::InvalidParameter {
                name: "x0",
                reason: format!("{} is outside (0, 1)", self.x0),
            });
        }
        if self.n == 0 {
            return Err(SeriesError::InvalidParameter {
                name: "n",
                reason: "sample count must be at least 1".into(),
            });
        }
        Ok(())
    }
}

/// Iterates the logistic map, discards `transient` iterates and records the
/// next `n` values (the first recorded value is `x0` when `transient == 0`).
pub fn logistic_series(params: &LogisticParams) -> Result<TimeSeries> {
    params.validate()?;
    let step = |x: f64| params.mu * x * (1.0 - x);
    let mut x = params.x0;
    for _ in 0..params.transient {
        x = step(x);
    }
    let mut values = Vec::with_capacity(params.n);
    for _ in 0..params.n {
        values.push(x);
        x = step(x);
    }
    TimeSeries::new(values)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    /// Guesses the format from a file extension, defaulting to CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
}

impl Default for ColumnSelector {
    fn default() -> Self {
        ColumnSelector::Index(0)
    }
}

impl std::str::FromStr for ColumnSelector {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) => ColumnSelector::Name(s.to_string()),
        })
    }
}

#[derive(Debug, Clone, Default)]
pub struct LoadOptions {
    pub format: Option<Format>,
    pub column: ColumnSelector,
    /// First CSV row is a header. Implied when selecting a column by name.
    pub header: bool,
}

/// Reads a series from a CSV or JSON file. Any unparsable entry in the
/// selected column is an error; nothing is skipped.
pub fn load_series(path: &Path, opts: &LoadOptions) -> Result<TimeSeries> {
    let file = File::open(path).map_err(|source| SeriesError::MissingFile {
        path: path.to_path_buf(),
        source,
    })?;
    let reader = BufReader::new(file);
    let format = opts.format.unwrap_or_else(|| Format::from_path(path));
    let ts = match format {
        Format::Csv => read_csv(reader, opts)?,
        Format::Json => read_json(reader)?,
    };
    match path.file_stem().and_then(|s| s.to_str()) {
        Some(stem) => Ok(ts.with_label(stem)),
        None => Ok(ts),
    }
}

pub fn read_csv<R: io::Read>(reader: R, opts: &LoadOptions) -> Result<TimeSeries> {
    let header = opts.header || matches!(opts.column, ColumnSelector::Name(_));
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let column = match &opts.column {
        ColumnSelector::Index(i) => *i,
        ColumnSelector::Name(name) => {
            let headers = rdr.headers().map_err(|e| csv_error(e, 1))?;
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| SeriesError::ColumnNotFound(name.clone()))?
        }
    };

    let mut values = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        let line_hint = rdr.position().line();
        match rdr.read_record(&mut record) {
            Ok(true) => {}
            Ok(false) => break,
            Err(e) => return Err(csv_error(e, line_hint)),
        }
        let line = record.position().map_or(line_hint, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let field = record.get(column).ok_or_else(|| SeriesError::Parse {
            line,
            message: format!("row has no column {column}"),
        })?;
        let value: f64 = field.parse().map_err(|_| SeriesError::Parse {
            line,
            message: format!("`{field}` is not a number"),
        })?;
        if !value.is_finite() {
            return Err(SeriesError::NonFinite { line });
        }
        values.push(value);
    }
    if values.is_empty() {
        return Err(SeriesError::EmptyColumn);
    }
    TimeSeries::new(values)
}

fn csv_error(e: csv::Error, fallback_line: u64) -> SeriesError {
    let line = e.position().map_or(fallback_line, |p| p.line());
    SeriesError::Parse {
        line,
        message: e.to_string(),
    }
}

#[derive(Deserialize)]
#[serde(untagged)]
enum JsonSample {
    Bare(f64),
    Stamped { t: i64, y: f64 },
}

/// Accepts either `[y0, y1, ...]` or `[{"t": .., "y": ..}, ...]`. Stamped
/// records must use consecutive integer time stamps; the first stamp becomes
/// the start index.
pub fn read_json<R: io::Read>(reader: R) -> Result<TimeSeries> {
    let samples: Vec<JsonSample> =
        serde_json::from_reader(reader).map_err(|e| SeriesError::Parse {
            line: e.line() as u64,
            message: e.to_string(),
        })?;
    if samples.is_empty() {
        return Err(SeriesError::EmptyColumn);
    }
    let mut start = None;
    let mut values = Vec::with_capacity(samples.len());
    for (k, sample) in samples.into_iter().enumerate() {
        let y = match sample {
            JsonSample::Bare(y) => {
                if start.is_some() {
                    return Err(SeriesError::IrregularSampling(k));
                }
                y
            }
            JsonSample::Stamped { t, y } => {
                match start {
                    None if k == 0 => start = Some(t),
                    Some(t0) if t == t0 + k as i64 => {}
                    _ => return Err(SeriesError::IrregularSampling(k)),
                }
                y
            }
        };
        values.push(y);
    }
    Ok(TimeSeries::new(values)?.with_start_index(start.unwrap_or(0)))
}

/// Writes one sample per line using the shortest representation that parses
/// back to the identical double.
pub fn write_csv<W: Write>(ts: &TimeSeries, mut out: W) -> io::Result<()> {
    for v in ts.values() {
        writeln!(out, "{v}")?;
    }
    out.flush()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SegmentMode {
    #[default]
    PerBlock,
    /// Joins all blocks that share a label. Joining non-adjacent blocks lets
    /// samples on either side of a seam see each other, which never happens
    /// in the original recording.
    ConcatenateByLabel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentationPlan {
    pub block_length: usize,
    /// Applied cyclically to consecutive blocks.
    pub labels: Vec<String>,
    pub mode: SegmentMode,
    /// Drop a trailing partial block instead of rejecting the series.
    pub truncate: bool,
}

impl SegmentationPlan {
    pub fn new(block_length: usize, labels: Vec<String>) -> Self {
        Self {
            block_length,
            labels,
            mode: SegmentMode::PerBlock,
            truncate: false,
        }
    }
}

pub fn segment_series(ts: &TimeSeries, plan: &SegmentationPlan) -> Result<Vec<TimeSeries>> {
    if plan.block_length == 0 {
        return Err(SeriesError::Segmentation(
            "block length must be positive".into(),
        ));
    }
    if plan.labels.is_empty() {
        return Err(SeriesError::Segmentation(
            "at least one label is required".into(),
        ));
    }
    let blocks = ts.len() / plan.block_length;
    let remainder = ts.len() % plan.block_length;
    if blocks == 0 {
        return Err(SeriesError::Segmentation(format!(
            "series of length {} is shorter than one block of {}",
            ts.len(),
            plan.block_length
        )));
    }
    if remainder != 0 && !plan.truncate {
        return Err(SeriesError::Segmentation(format!(
            "length {} leaves a remainder of {} after {} blocks of {}",
            ts.len(),
            remainder,
            blocks,
            plan.block_length
        )));
    }

    let block = |b: usize| {
        let lo = b * plan.block_length;
        let label = &plan.labels[b % plan.labels.len()];
        (lo, label, &ts.values[lo..lo + plan.block_length])
    };

    match plan.mode {
        SegmentMode::PerBlock => Ok((0..blocks)
            .map(|b| {
                let (lo, label, values) = block(b);
                TimeSeries {
                    values: values.to_vec(),
                    start_index: ts.time(lo),
                    label: Some(label.clone()),
                    seams: Vec::new(),
                }
            })
            .collect()),
        SegmentMode::ConcatenateByLabel => {
            let mut order: Vec<&String> = Vec::new();
            let mut joined: HashMap<&String, TimeSeries> = HashMap::new();
            for b in 0..blocks {
                let (lo, label, values) = block(b);
                let entry = joined.entry(label).or_insert_with(|| {
                    order.push(label);
                    TimeSeries {
                        values: Vec::new(),
                        start_index: ts.time(lo),
                        label: Some(label.clone()),
                        seams: Vec::new(),
                    }
                });
                if !entry.values.is_empty() {
                    entry.seams.push(entry.values.len());
                }
                entry.values.extend_from_slice(values);
            }
            Ok(order
                .into_iter()
                .map(|l| joined.remove(l).expect("label recorded"))
                .collect())
        }
    }
}
