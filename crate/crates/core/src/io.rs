//! File formats: distributed moment tables (JSON), monomial moment tables
//! (CSV), Laplace-Fourier components, cubature rules, and the basis cache.
//!
//! Floats are written by `serde_json` in shortest round-trip form, so
//! write-then-parse is the identity.

use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cubature::PseudoCubature;
use crate::decompose::{
    DecomposeError, DistributedMomentTable, LFDecomposition, MonomialMomentTable,
};
use crate::harmonics::{HarmonicsError, SolidHarmonicBasis};
use crate::polycore::UniPoly;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("CSV error: {0}")]
    Csv(String),
    #[error(transparent)]
    Table(#[from] DecomposeError),
    #[error(transparent)]
    Harmonics(#[from] HarmonicsError),
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        IoError::Schema(e.to_string())
    }
}

impl From<csv::Error> for IoError {
    fn from(e: csv::Error) -> Self {
        IoError::Csv(e.to_string())
    }
}

pub fn read_file(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

pub fn write_file(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableEntry {
    j: usize,
    k: usize,
    l: usize,
    value: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableJson {
    dimension: usize,
    k_max: usize,
    order: usize,
    basis_fingerprint: String,
    entries: Vec<TableEntry>,
}

pub fn moment_table_to_json(tbl: &DistributedMomentTable) -> String {
    let doc = TableJson {
        dimension: tbl.dim(),
        k_max: tbl.k_max(),
        order: tbl.order(),
        basis_fingerprint: tbl.fingerprint().to_string(),
        entries: tbl
            .entries()
            .into_iter()
            .map(|(j, k, l, value)| TableEntry { j, k, l, value })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("table serializes")
}

/// Parses and validates a moment table; missing entries are an error.
pub fn moment_table_from_json(text: &str) -> Result<DistributedMomentTable, IoError> {
    let doc: TableJson = serde_json::from_str(text)?;
    let entries: Vec<_> = doc
        .entries
        .iter()
        .map(|e| (e.j, e.k, e.l, e.value))
        .collect();
    Ok(DistributedMomentTable::from_entries(
        doc.dimension,
        doc.k_max,
        doc.order,
        doc.basis_fingerprint,
        &entries,
    )?)
}

/// Header `alpha_1,...,alpha_d,value`, one row per multi-index.
pub fn monomial_table_to_csv(m: &MonomialMomentTable) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (1..=m.dim()).map(|i| format!("alpha_{i}")).collect();
    header.push("value".into());
    w.write_record(&header).expect("in-memory write");
    for (alpha, v) in m.entries() {
        let mut row: Vec<String> = alpha.iter().map(|a| a.to_string()).collect();
        row.push(serde_json::to_string(&v).expect("finite float"));
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf8")
}

/// The degree cap is the largest `|α|` present; completeness is enforced.
pub fn monomial_table_from_csv(text: &str) -> Result<MonomialMomentTable, IoError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let header = rdr.headers()?.clone();
    let dim = header.len().saturating_sub(1);
    let expected: Vec<String> = (1..=dim)
        .map(|i| format!("alpha_{i}"))
        .chain(std::iter::once("value".into()))
        .collect();
    if dim == 0 || header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(IoError::Schema(format!(
            "CSV header must be alpha_1,...,alpha_d,value; got {}",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut entries = Vec::new();
    let mut degree = 0;
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = row + 2;
        let alpha = (0..dim)
            .map(|i| {
                rec[i].parse::<u32>().map_err(|e| {
                    IoError::Schema(format!("line {line}, field alpha_{}: {e}", i + 1))
                })
            })
            .collect::<Result<Vec<u32>, _>>()?;
        let value: f64 = rec[dim]
            .parse()
            .map_err(|e| IoError::Schema(format!("line {line}, field value: {e}")))?;
        degree = degree.max(alpha.iter().sum::<u32>() as usize);
        entries.push((alpha, value));
    }
    Ok(MonomialMomentTable::from_entries(dim, degree, entries)?)
}

/// Either kind of moment table.
#[derive(Debug, Clone, PartialEq)]
pub enum MomentTable {
    Distributed(DistributedMomentTable),
    Monomial(MonomialMomentTable),
}

/// Reads a `.csv` file as a monomial table and anything else as a
/// distributed table; the latter is checked against `basis` when given.
pub fn parse_moment_table(
    path: &Path,
    basis: Option<&SolidHarmonicBasis>,
) -> Result<MomentTable, IoError> {
    let text = read_file(path)?;
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
    {
        return Ok(MomentTable::Monomial(monomial_table_from_csv(&text)?));
    }
    let tbl = moment_table_from_json(&text)?;
    if let Some(b) = basis {
        tbl.check_basis(b)?;
    }
    Ok(MomentTable::Distributed(tbl))
}

#[derive(Debug, Serialize, Deserialize)]
struct LfComponent {
    k: usize,
    l: usize,
    coeffs: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    coeffs_im: Option<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct LfJson {
    dimension: usize,
    components: Vec<LfComponent>,
}

/// `{"dimension": d, "components": [{"k", "l", "coeffs", "coeffs_im"?}]}`
/// with `coeffs[j]` the coefficient of `t^j` in `p_{k,l}`.
pub fn lf_to_json(dec: &LFDecomposition) -> String {
    let doc = LfJson {
        dimension: dec.dim,
        components: dec
            .components
            .iter()
            .map(|(&(k, l), p)| {
                let im: Vec<f64> = p.coeffs().iter().map(|c| c.im).collect();
                LfComponent {
                    k,
                    l,
                    coeffs: p.coeffs().iter().map(|c| c.re).collect(),
                    coeffs_im: im.iter().any(|&v| v != 0.0).then_some(im),
                }
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("decomposition serializes")
}

pub fn lf_from_json(text: &str) -> Result<LFDecomposition, IoError> {
    let doc: LfJson = serde_json::from_str(text)?;
    let mut dec = LFDecomposition::empty(doc.dimension);
    for c in doc.components {
        let im = c.coeffs_im.unwrap_or_else(|| vec![0.0; c.coeffs.len()]);
        if im.len() != c.coeffs.len() {
            return Err(IoError::Schema(format!(
                "component ({},{}): coeffs and coeffs_im differ in length",
                c.k, c.l
            )));
        }
        let poly = UniPoly::new(
            c.coeffs
                .iter()
                .zip(&im)
                .map(|(&re, &im)| Complex64::new(re, im))
                .collect(),
        );
        if dec.components.insert((c.k, c.l), poly).is_some() {
            return Err(IoError::Schema(format!(
                "duplicate component ({},{})",
                c.k, c.l
            )));
        }
    }
    Ok(dec)
}

pub fn cubature_to_json(c: &PseudoCubature) -> String {
    serde_json::to_string_pretty(c).expect("cubature serializes")
}

pub fn cubature_from_json(text: &str) -> Result<PseudoCubature, IoError> {
    Ok(serde_json::from_str(text)?)
}

fn cache_file(dir: &Path, d: usize, k_max: usize) -> PathBuf {
    dir.join(format!("basis-d{d}-k{k_max}.json"))
}

/// Loads the basis from `cache_dir` when a matching file exists, otherwise
/// builds it and stores it there. A cache file that fails to parse or has
/// the wrong shape is rebuilt.
pub fn load_or_build_basis(
    d: usize,
    k_max: usize,
    cache_dir: Option<&Path>,
) -> Result<SolidHarmonicBasis, IoError> {
    let Some(dir) = cache_dir else {
        return Ok(SolidHarmonicBasis::build(d, k_max)?);
    };
    let path = cache_file(dir, d, k_max);
    if let Ok(text) = fs::read_to_string(&path) {
        if let Ok(b) = SolidHarmonicBasis::from_json(&text) {
            if b.dim() == d && b.k_max() == k_max {
                return Ok(b);
            }
        }
    }
    let b = SolidHarmonicBasis::build(d, k_max)?;
    fs::create_dir_all(dir).map_err(|source| IoError::File {
        path: dir.to_path_buf(),
        source,
    })?;
    write_file(&path, &b.to_json())?;
    Ok(b)
}
