//! JSON and CSV formats for tensors, structures, connections and curves.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::connection::{weyl_connection, Christoffel, Connection, ConnectionKind, SampledCurve};
use crate::error::{Error, Result};
use crate::linalg::{Matrix, Vector};
use crate::planar::{AStructure, SymTensor};
use crate::quaternion::QuatCovector;

/// Asymmetry above which a loaded tensor is reported as symmetrized.
pub const SYMMETRY_WARN: f64 = 1e-12;

/// `{"dim": d, "coeffs": [...]}` with `coeffs[(i*d + j)*d + k] = P^k_{ij}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TensorFile {
    pub dim: usize,
    pub coeffs: Vec<f64>,
}

/// `{"dim": d, "affinors": [F_0, F_1, ...]}`, each a row-major `d×d` array.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StructureFile {
    pub dim: usize,
    pub affinors: Vec<Vec<Vec<f64>>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConnectionFileKind {
    Flat,
    Weyl,
    Explicit,
}

/// `{"dim", "kind": "flat"|"weyl"|"explicit", "upsilon"?, "gamma"?}`.
/// `upsilon` holds `4n` reals, `gamma` holds `Γ^k_{ij}` at `(i*d + j)*d + k`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConnectionFile {
    pub dim: usize,
    pub kind: ConnectionFileKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub upsilon: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<f64>>,
}

/// A tensor read from disk together with the asymmetry that was removed.
#[derive(Clone, Debug)]
pub struct LoadedTensor {
    pub tensor: SymTensor,
    pub asymmetry: f64,
}

impl LoadedTensor {
    pub fn was_symmetrized(&self) -> bool {
        self.asymmetry > SYMMETRY_WARN
    }
}

pub fn read_tensor(reader: impl Read) -> Result<LoadedTensor> {
    let file: TensorFile = serde_json::from_reader(reader)?;
    let (tensor, asymmetry) = SymTensor::from_raw(file.dim, &file.coeffs)?;
    Ok(LoadedTensor { tensor, asymmetry })
}

pub fn write_tensor(p: &SymTensor, writer: impl Write) -> Result<()> {
    let file = TensorFile { dim: p.dim(), coeffs: p.coeffs().to_vec() };
    serde_json::to_writer_pretty(writer, &file)?;
    Ok(())
}

fn matrix_from_rows(rows: &[Vec<f64>], dim: usize) -> Result<Matrix> {
    if rows.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, got: rows.len() });
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
        return Err(Error::DimensionMismatch { expected: dim, got: bad.len() });
    }
    Ok(Matrix::from_fn(dim, dim, |r, c| rows[r][c]))
}

pub fn read_structure(reader: impl Read) -> Result<AStructure> {
    let file: StructureFile = serde_json::from_reader(reader)?;
    let affinors = file
        .affinors
        .iter()
        .map(|m| matrix_from_rows(m, file.dim))
        .collect::<Result<Vec<_>>>()?;
    AStructure::new(affinors)
}

pub fn write_structure(a: &AStructure, writer: impl Write) -> Result<()> {
    let file = StructureFile {
        dim: a.dim(),
        affinors: a
            .affinors()
            .iter()
            .map(|m| m.row_iter().map(|r| r.iter().copied().collect()).collect())
            .collect(),
    };
    serde_json::to_writer_pretty(writer, &file)?;
    Ok(())
}

pub fn read_connection(reader: impl Read) -> Result<Connection> {
    let file: ConnectionFile = serde_json::from_reader(reader)?;
    let d = file.dim;
    match file.kind {
        ConnectionFileKind::Flat => Ok(Connection::flat(d)),
        ConnectionFileKind::Weyl => {
            let u = file
                .upsilon
                .ok_or_else(|| Error::Parse("weyl connection needs \"upsilon\"".into()))?;
            if !d.is_multiple_of(4) || u.len() != d {
                return Err(Error::DimensionMismatch { expected: d, got: u.len() });
            }
            weyl_connection(&QuatCovector::from_real(&u)?, d / 4)
        }
        ConnectionFileKind::Explicit => {
            let g = file
                .gamma
                .ok_or_else(|| Error::Parse("explicit connection needs \"gamma\"".into()))?;
            if g.len() != d * d * d {
                return Err(Error::DimensionMismatch { expected: d * d * d, got: g.len() });
            }
            Ok(Connection::constant(Christoffel::from_fn(d, |i, j, k| g[(i * d + j) * d + k])))
        }
    }
}

pub fn write_connection(conn: &Connection, writer: impl Write) -> Result<()> {
    let d = conn.dim();
    let file = match conn.kind() {
        ConnectionKind::Flat => ConnectionFile { dim: d, kind: ConnectionFileKind::Flat, upsilon: None, gamma: None },
        ConnectionKind::Weyl(u) => ConnectionFile {
            dim: d,
            kind: ConnectionFileKind::Weyl,
            upsilon: Some(u.to_real().iter().copied().collect()),
            gamma: None,
        },
        ConnectionKind::Explicit => {
            if !conn.is_constant() {
                return Err(Error::InvalidArgument("only constant connections can be written".into()));
            }
            let g = conn.christoffel_at(&Vector::zeros(d));
            let mut coeffs = Vec::with_capacity(d * d * d);
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        coeffs.push(g.get(i, j, k));
                    }
                }
            }
            ConnectionFile { dim: d, kind: ConnectionFileKind::Explicit, upsilon: None, gamma: Some(coeffs) }
        }
    };
    serde_json::to_writer_pretty(writer, &file)?;
    Ok(())
}

/// Reads `t,x0,…,x{d-1}` rows on a uniform grid.
pub fn read_curve_csv(reader: impl Read) -> Result<SampledCurve> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.get(0).map(str::trim) != Some("t") || headers.len() < 2 {
        return Err(Error::Parse("curve header must be t,x0,...".into()));
    }
    let dim = headers.len() - 1;
    let mut times = Vec::new();
    let mut points = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        let values = record
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| Error::Parse(format!("row {}: {e}", line + 1)))?;
        if values.len() != dim + 1 {
            return Err(Error::DimensionMismatch { expected: dim + 1, got: values.len() });
        }
        times.push(values[0]);
        points.push(Vector::from_column_slice(&values[1..]));
    }
    if times.len() < 2 {
        return Err(Error::Parse("curve needs at least two rows".into()));
    }
    let step = times[1] - times[0];
    for (k, t) in times.iter().enumerate() {
        let expected = times[0] + k as f64 * step;
        if (t - expected).abs() > 1e-6 * step.abs() + 1e-12 {
            return Err(Error::Parse(format!("row {} breaks the uniform grid (t = {t})", k + 1)));
        }
    }
    SampledCurve::new(times[0], step, points)
}

pub fn write_curve_csv(curve: &SampledCurve, writer: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["t".to_string()];
    header.extend((0..curve.dim()).map(|i| format!("x{i}")));
    w.write_record(&header)?;
    for (k, p) in curve.points.iter().enumerate() {
        let mut row = vec![curve.time(k).to_string()];
        row.extend(p.iter().map(|v| v.to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}
