//! JSON file formats shared with the command-line tools.
//!
//! Formats:
//! - matrix: `{"rows": n, "cols": n, "re": [[..]], "im": [[..]]}`, row-major
//! - POVM: a JSON array of matrix objects
//! - fiducial: `{"d": n, "re": [..], "im": [..]}`
//! - reference system: `{"d": n, "re": [..], "im": [..], "sic_error": e}`;
//!   displacements and projectors are recomputed on load, never serialized
//! - probability vector / outcome distribution: `{"p": [..]}`
//! - conditional matrix: `{"J": j, "N": n, "R": [[row-major J x N]]}`
//! - effect row: `{"r": [..]}`
//! - linear-extension samples: `[{"v": [..], "value": x}, ..]`
//! - count table: `{"labels": [..], "counts": [..], "total": n, "seed": s}`
//!
//! Values are serialized with serde_json's shortest round-tripping float
//! representation, so a written file parses back to bit-identical numbers.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coherence::DutchBookWitness;
use crate::experiments::CountTable;
use crate::linalg::{Complex64, ComplexMatrix};
use crate::qplex::QplexGeometry;
use crate::repr::{CondMatrix, OutcomeDist, ProbState};
use crate::sic::{build_sic, Fiducial, SicSystem};

/// File-level failures, kept separate from domain validation errors so
/// callers can distinguish "could not read the file" from "the file holds
/// invalid values".
#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: invalid JSON: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("{path}: field '{field}': {message}")]
    Field {
        path: String,
        field: String,
        message: String,
    },
    #[error(transparent)]
    Domain(#[from] crate::error::Error),
}

pub type IoResult<T> = std::result::Result<T, IoError>;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiducialFile {
    pub d: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SicSystemFile {
    pub d: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    pub sic_error: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ProbFile {
    pub p: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CondFile {
    #[serde(rename = "J")]
    pub j: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "R")]
    pub r: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EffectFile {
    pub r: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleEntry {
    pub v: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CountTableFile {
    pub labels: Vec<String>,
    pub counts: Vec<u64>,
    pub total: u64,
    pub seed: u64,
}

/// Geometry report printed by the CLI: the bounds plus the implied
/// cardinality bound for mutually-maximally-distant sets.
#[derive(Debug, Clone, Serialize)]
pub struct GeometryReport {
    #[serde(flatten)]
    pub geometry: QplexGeometry,
    pub mmd_bound: usize,
}

/// Witness export wrapper; serializes the witness fields per the documented
/// schema.
pub type WitnessFile = DutchBookWitness;

fn read(path: &Path) -> IoResult<String> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read {
        path: path.display().to_string(),
        source,
    })
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> IoResult<T> {
    serde_json::from_str(text).map_err(|source| IoError::Json {
        path: path.display().to_string(),
        source,
    })
}

fn field_err(path: &Path, field: &str, message: impl Into<String>) -> IoError {
    IoError::Field {
        path: path.display().to_string(),
        field: field.into(),
        message: message.into(),
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> IoResult<()> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable value");
    text.push('\n');
    std::fs::write(path, text).map_err(|source| IoError::Write {
        path: path.display().to_string(),
        source,
    })
}

impl MatrixFile {
    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        MatrixFile {
            rows: m.nrows(),
            cols: m.ncols(),
            re: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)].re).collect())
                .collect(),
            im: (0..m.nrows())
                .map(|i| (0..m.ncols()).map(|j| m[(i, j)].im).collect())
                .collect(),
        }
    }

    pub fn into_matrix(self, path: &Path) -> IoResult<ComplexMatrix> {
        for (name, part) in [("re", &self.re), ("im", &self.im)] {
            if part.len() != self.rows {
                return Err(field_err(
                    path,
                    name,
                    format!("has {} rows, expected {}", part.len(), self.rows),
                ));
            }
            for (i, row) in part.iter().enumerate() {
                if row.len() != self.cols {
                    return Err(field_err(
                        path,
                        name,
                        format!("row {i} has {} entries, expected {}", row.len(), self.cols),
                    ));
                }
            }
        }
        Ok(ComplexMatrix::from_fn(self.rows, self.cols, |i, j| {
            Complex64::new(self.re[i][j], self.im[i][j])
        }))
    }
}

pub fn load_matrix(path: &Path) -> IoResult<ComplexMatrix> {
    let file: MatrixFile = parse(path, &read(path)?)?;
    file.into_matrix(path)
}

pub fn save_matrix(path: &Path, m: &ComplexMatrix) -> IoResult<()> {
    write_json(path, &MatrixFile::from_matrix(m))
}

pub fn load_povm(path: &Path) -> IoResult<Vec<ComplexMatrix>> {
    let files: Vec<MatrixFile> = parse(path, &read(path)?)?;
    files
        .into_iter()
        .map(|file| file.into_matrix(path))
        .collect()
}

pub fn save_povm(path: &Path, effects: &[ComplexMatrix]) -> IoResult<()> {
    let files: Vec<MatrixFile> = effects.iter().map(MatrixFile::from_matrix).collect();
    write_json(path, &files)
}

impl FiducialFile {
    pub fn from_fiducial(f: &Fiducial) -> Self {
        FiducialFile {
            d: f.d(),
            re: f.amplitudes().iter().map(|a| a.re).collect(),
            im: f.amplitudes().iter().map(|a| a.im).collect(),
        }
    }
}

fn amplitudes_from_parts(
    path: &Path,
    d: usize,
    re: &[f64],
    im: &[f64],
) -> IoResult<Vec<Complex64>> {
    if re.len() != d {
        return Err(field_err(
            path,
            "re",
            format!("has {} entries, expected d = {d}", re.len()),
        ));
    }
    if im.len() != d {
        return Err(field_err(
            path,
            "im",
            format!("has {} entries, expected d = {d}", im.len()),
        ));
    }
    Ok(re
        .iter()
        .zip(im)
        .map(|(r, i)| Complex64::new(*r, *i))
        .collect())
}

pub fn load_fiducial(path: &Path) -> IoResult<Fiducial> {
    let file: FiducialFile = parse(path, &read(path)?)?;
    let amps = amplitudes_from_parts(path, file.d, &file.re, &file.im)?;
    Ok(Fiducial::new(amps)?)
}

pub fn save_fiducial(path: &Path, f: &Fiducial) -> IoResult<()> {
    write_json(path, &FiducialFile::from_fiducial(f))
}

impl SicSystemFile {
    pub fn from_system(s: &SicSystem) -> Self {
        SicSystemFile {
            d: s.d(),
            re: s.fiducial().amplitudes().iter().map(|a| a.re).collect(),
            im: s.fiducial().amplitudes().iter().map(|a| a.im).collect(),
            sic_error: s.sic_error(),
        }
    }
}

/// Rebuilds the full system from its serialized fiducial. The recomputed
/// overlap deviation must agree with the stored one.
pub fn load_sic_system(path: &Path) -> IoResult<SicSystem> {
    let file: SicSystemFile = parse(path, &read(path)?)?;
    let amps = amplitudes_from_parts(path, file.d, &file.re, &file.im)?;
    let system = build_sic(&Fiducial::new(amps)?);
    if (system.sic_error() - file.sic_error).abs() > 1e-9 {
        return Err(field_err(
            path,
            "sic_error",
            format!(
                "stored value {} does not match recomputed {}",
                file.sic_error,
                system.sic_error()
            ),
        ));
    }
    Ok(system)
}

pub fn save_sic_system(path: &Path, s: &SicSystem) -> IoResult<()> {
    write_json(path, &SicSystemFile::from_system(s))
}

pub fn load_prob(path: &Path) -> IoResult<ProbState> {
    let file: ProbFile = parse(path, &read(path)?)?;
    Ok(ProbState::new(file.p)?)
}

pub fn save_prob(path: &Path, p: &ProbState) -> IoResult<()> {
    write_json(path, &ProbFile { p: p.values().to_vec() })
}

pub fn load_dist(path: &Path) -> IoResult<OutcomeDist> {
    let file: ProbFile = parse(path, &read(path)?)?;
    Ok(OutcomeDist::new(file.p)?)
}

pub fn save_dist(path: &Path, q: &OutcomeDist) -> IoResult<()> {
    write_json(path, &ProbFile { p: q.values().to_vec() })
}

/// Raw distribution writer for Born-rule outputs, which may carry entries
/// outside the unit interval and so cannot always round-trip through
/// `OutcomeDist`.
pub fn save_raw_dist(path: &Path, q: &[f64]) -> IoResult<()> {
    write_json(path, &ProbFile { p: q.to_vec() })
}

pub fn load_cond(path: &Path) -> IoResult<CondMatrix> {
    let file: CondFile = parse(path, &read(path)?)?;
    if file.r.len() != file.j {
        return Err(field_err(
            path,
            "R",
            format!("has {} rows, expected J = {}", file.r.len(), file.j),
        ));
    }
    let mut row_major = Vec::with_capacity(file.j * file.n);
    for (jj, row) in file.r.iter().enumerate() {
        if row.len() != file.n {
            return Err(field_err(
                path,
                "R",
                format!("row {jj} has {} entries, expected N = {}", row.len(), file.n),
            ));
        }
        row_major.extend_from_slice(row);
    }
    Ok(CondMatrix::new(file.j, file.n, row_major)?)
}

pub fn save_cond(path: &Path, r: &CondMatrix) -> IoResult<()> {
    let file = CondFile {
        j: r.j(),
        n: r.n(),
        r: (0..r.j()).map(|jj| r.row(jj)).collect(),
    };
    write_json(path, &file)
}

pub fn load_effect_row(path: &Path) -> IoResult<Vec<f64>> {
    let file: EffectFile = parse(path, &read(path)?)?;
    Ok(file.r)
}

pub fn load_samples(path: &Path) -> IoResult<Vec<(Vec<f64>, f64)>> {
    let entries: Vec<SampleEntry> = parse(path, &read(path)?)?;
    Ok(entries.into_iter().map(|e| (e.v, e.value)).collect())
}

pub fn load_count_table(path: &Path) -> IoResult<CountTable> {
    let file: CountTableFile = parse(path, &read(path)?)?;
    if file.labels.len() != file.counts.len() {
        return Err(field_err(
            path,
            "counts",
            format!(
                "has {} entries, expected {} to match labels",
                file.counts.len(),
                file.labels.len()
            ),
        ));
    }
    Ok(CountTable {
        labels: file.labels,
        counts: file.counts,
        total: file.total,
    })
}

pub fn save_count_table(path: &Path, table: &CountTable, seed: u64) -> IoResult<()> {
    write_json(
        path,
        &CountTableFile {
            labels: table.labels.clone(),
            counts: table.counts.clone(),
            total: table.total,
            seed,
        },
    )
}

/// Generic loader for price maps used by the coherence checker.
pub fn load_prices(path: &Path) -> IoResult<std::collections::BTreeMap<String, f64>> {
    parse(path, &read(path)?)
}
