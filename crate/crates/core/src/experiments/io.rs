//! CSV tables, JSON documents and run manifests.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::evolution::{EvolutionConfig, FidelitySeries};
use crate::Result;

/// Column layout of a fidelity series table.
pub const SERIES_HEADER: [&str; 7] = [
    "t",
    "f_minus",
    "f_plus",
    "raw_minus",
    "raw_plus",
    "norm",
    "eta",
];

/// Formats a number so that it parses back to the identical `f64`.
///
/// Moderate magnitudes use plain decimal notation, the rest scientific.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".to_owned()
    } else if v.is_infinite() {
        if v > 0.0 { "inf" } else { "-inf" }.to_owned()
    } else if v == 0.0 || (1e-4..1e15).contains(&v.abs()) {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

/// Formats an optional value; `None` becomes an empty field.
pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Writes a header and rows of preformatted fields.
pub fn write_table<I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_series_csv(path: &Path, series: &FidelitySeries<f64>) -> Result<()> {
    let rows = (0..series.len()).map(|i| {
        [
            series.times[i],
            series.f_minus[i],
            series.f_plus[i],
            series.raw_minus[i],
            series.raw_plus[i],
            series.state_norm[i],
            series.eta[i],
        ]
        .into_iter()
        .map(fmt_f64)
        .collect()
    });
    write_table(path, &SERIES_HEADER, rows)
}

/// A fidelity series together with the configuration that produced it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SeriesDocument {
    pub tool: String,
    pub version: String,
    pub config: EvolutionConfig<f64>,
    pub conventions: BTreeMap<String, String>,
    pub series: FidelitySeries<f64>,
}

impl SeriesDocument {
    pub fn new(config: &EvolutionConfig<f64>, series: &FidelitySeries<f64>) -> Self {
        Self {
            tool: TOOL.to_owned(),
            version: crate::VERSION.to_owned(),
            config: config.clone(),
            conventions: series_conventions(),
            series: series.clone(),
        }
    }
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

pub const TOOL: &str = "nhsta";

/// Conventions shared by every output containing fidelities.
pub fn series_conventions() -> BTreeMap<String, String> {
    conventions(&[
        ("units", "hbar = 1, arbitrary time units"),
        (
            "fidelity",
            "f_n = |<phi_hat_n|psi>|^2 / sum_m |<phi_hat_m|psi>|^2 with principal-branch H0 eigenvectors; raw_n unnormalized",
        ),
        (
            "eta",
            "|phidot| / (4 |alpha|); oscillatory factor exp(i int omega_+-) excluded (unit modulus on a real spectrum); NaN where |alpha| < 1e-12",
        ),
        ("time_grid", "t = 0, (j + 1/2) T_run / N for j < N, T_run"),
        ("cut_points", "generator uses the x -> 0+ limit on the cut segment x = 0, 0 < |y| < 1"),
    ])
}

pub fn conventions(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| ((*k).to_owned(), (*v).to_owned()))
        .collect()
}

/// One produced file and its SHA-256 digest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FileDigest {
    pub path: PathBuf,
    pub sha256: String,
}

impl FileDigest {
    pub fn of(path: &Path) -> Result<Self> {
        Ok(Self {
            path: path.to_path_buf(),
            sha256: sha256_file(path)?,
        })
    }
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut hasher = Sha256::new();
    let mut f = File::open(path)?;
    let mut buf = [0u8; 1 << 16];
    loop {
        let n = f.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

/// Record of one pipeline run.
///
/// `config` holds the fully resolved configuration; feeding it back to the
/// same command reproduces the data files exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub conventions: BTreeMap<String, String>,
    pub wall_time_s: f64,
    pub files: Vec<FileDigest>,
}

impl Manifest {
    pub fn new<C: Serialize>(command: &str, config: &C) -> Result<Self> {
        Ok(Self {
            tool: TOOL.to_owned(),
            version: crate::VERSION.to_owned(),
            command: command.to_owned(),
            config: serde_json::to_value(config)?,
            conventions: BTreeMap::new(),
            wall_time_s: 0.0,
            files: Vec::new(),
        })
    }

    pub fn with_conventions(mut self, c: BTreeMap<String, String>) -> Self {
        self.conventions.extend(c);
        self
    }

    /// Hashes `path` and appends it to the file list.
    pub fn record(&mut self, path: &Path) -> Result<()> {
        self.files.push(FileDigest::of(path)?);
        Ok(())
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_json(path, self)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_reader(std::io::BufReader::new(
            File::open(path)?,
        ))?)
    }
}

/// `out.csv` → `out.manifest.json`, `out.csv` + `suffix` → `out.<suffix>.csv`.
pub fn sibling(path: &Path, suffix: &str, ext: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}.{ext}"))
}
