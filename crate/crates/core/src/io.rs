//! Report serialisation. Every file is written through a temporary file in
//! the destination directory and renamed into place.

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::Result;
use crate::markov::MarkovReport;
use crate::phi4::MCEstimate;
use crate::scalar::{to_f64, Real};
use crate::spectral::{Field, SpectralBasis};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Writes `bytes` to `path` atomically.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
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

pub fn to_json_bytes<S: Serialize>(value: &S) -> Result<Vec<u8>> {
    let mut out = serde_json::to_vec_pretty(value)?;
    out.push(b'\n');
    Ok(out)
}

fn csv_bytes(header: &[String], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

/// Node coordinates followed by the field value.
pub fn field_csv<T: Real>(field: &Field<T>) -> Result<Vec<u8>> {
    let geom = field.geometry();
    let mut header: Vec<String> = (0..geom.dim()).map(|a| format!("x{a}")).collect();
    header.insert(0, "node".into());
    header.push("value".into());
    let rows = field.values().iter().enumerate().map(|(v, &val)| {
        let mut row = vec![v.to_string()];
        row.extend(geom.coordinates(v).iter().map(|x| x.to_string()));
        row.push(to_f64(val).to_string());
        row
    });
    csv_bytes(&header, rows)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModeEntry {
    pub index: usize,
    pub eigenvalue: f64,
    pub lattice_eigenvalue: f64,
    pub parity: i8,
    pub wavevector: Vec<f64>,
}

pub fn mode_table<T: Real>(basis: &SpectralBasis<T>) -> Vec<ModeEntry> {
    (0..basis.len())
        .map(|k| ModeEntry {
            index: k,
            eigenvalue: to_f64(basis.eigenvalue(k)),
            lattice_eigenvalue: to_f64(basis.lattice_eigenvalues()[k]),
            parity: basis.parity(k),
            wavevector: basis.wavevector(k).iter().map(|&x| to_f64(x)).collect(),
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Coefficient {
    pub index: usize,
    pub eigenvalue: f64,
    pub parity: i8,
    pub value: f64,
}

pub fn field_coefficients<T: Real>(field: &Field<T>) -> Vec<Coefficient> {
    let basis = field.basis();
    field
        .coeffs()
        .iter()
        .enumerate()
        .map(|(k, &c)| Coefficient {
            index: k,
            eigenvalue: to_f64(basis.eigenvalue(k)),
            parity: basis.parity(k),
            value: to_f64(c),
        })
        .collect()
}

pub fn spectrum_csv(modes: &[ModeEntry]) -> Result<Vec<u8>> {
    let header = ["index", "eigenvalue", "lattice_eigenvalue", "parity"].map(String::from);
    csv_bytes(
        &header,
        modes.iter().map(|m| {
            vec![
                m.index.to_string(),
                m.eigenvalue.to_string(),
                m.lattice_eigenvalue.to_string(),
                m.parity.to_string(),
            ]
        }),
    )
}

/// Dense dump of a matrix, one row per line, no header.
pub fn matrix_csv<T: Real>(q: &DMatrix<T>) -> Result<Vec<u8>> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    for i in 0..q.nrows() {
        w.write_record((0..q.ncols()).map(|j| to_f64(q[(i, j)]).to_string()))?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

/// `target, position, delta_sq`, position being the normal coordinate when
/// known.
pub fn markov_csv(report: &MarkovReport, positions: Option<&[f64]>) -> Result<Vec<u8>> {
    let header = ["target", "position", "delta_sq"].map(String::from);
    csv_bytes(
        &header,
        report.targets.iter().zip(&report.delta_sq).map(|(&t, &d)| {
            let pos = positions.map_or(t as f64, |p| p[t]);
            vec![t.to_string(), pos.to_string(), d.to_string()]
        }),
    )
}

pub fn sweep_csv(estimates: &[MCEstimate]) -> Result<Vec<u8>> {
    let header = ["c", "value", "std_error"].map(String::from);
    csv_bytes(
        &header,
        estimates
            .iter()
            .map(|e| vec![e.coupling.to_string(), e.value.to_string(), e.std_error.to_string()]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{build_basis, Geometry};

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.json");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }

    #[test]
    fn field_csv_has_one_row_per_node() {
        let basis = build_basis::<f64>(&Geometry::circle(8).unwrap());
        let f = Field::from_fn(basis, |x| x[0]);
        let text = String::from_utf8(field_csv(&f).unwrap()).unwrap();
        assert_eq!(text.lines().count(), 9);
        assert!(text.starts_with("node,x0,value\n"));
    }
}
