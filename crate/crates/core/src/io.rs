//! CSV files for fields and kernel tables, with JSON sidecars.
//!
//! A field file has the header `x1,...,xd,value` and one row per nonzero
//! site; its sidecar (same path, `.json` extension) records `{d, L, boundary}`.
//! Values are written in shortest round-trip form, so reading back is exact.
//! Every file is written to a temporary in the target directory and renamed
//! into place.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Boundary, Field, LatticeGeometry};
use crate::scalar::Real;
use crate::spectral::{Kernel, KernelKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldMeta {
    pub d: usize,
    #[serde(rename = "L")]
    pub l: usize,
    pub boundary: Boundary,
}

impl FieldMeta {
    pub fn of(geom: &LatticeGeometry) -> Self {
        Self {
            d: geom.dim(),
            l: geom.radius(),
            boundary: geom.boundary(),
        }
    }

    pub fn geometry(&self) -> Result<LatticeGeometry> {
        LatticeGeometry::new(self.d, self.l, self.boundary)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelMeta {
    pub alpha: f64,
    pub d: usize,
    #[serde(rename = "R")]
    pub r: usize,
    /// Quadrature points per axis, or the box side for a periodized table.
    #[serde(rename = "M")]
    pub m: usize,
    pub tail_bound: f64,
    pub doubling_error: Option<f64>,
}

/// `path` with its extension replaced by `json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

/// Pretty JSON with a trailing newline, written atomically.
pub fn write_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

fn table_csv<T: Real>(geom: &LatticeGeometry, values: &[T], keep_zeros: bool) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header: Vec<String> = (1..=geom.dim()).map(|i| format!("x{i}")).collect();
    header.push("value".into());
    w.write_record(&header)?;
    let mut x = vec![0i64; geom.dim()];
    let mut row = Vec::with_capacity(geom.dim() + 1);
    for (i, &v) in values.iter().enumerate() {
        if v.is_zero() && !keep_zeros {
            continue;
        }
        geom.coords_into(i, &mut x);
        row.clear();
        row.extend(x.iter().map(|c| c.to_string()));
        row.push(format!("{:e}", v.to_f64_lossy()));
        w.write_record(&row)?;
    }
    w.into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
}

/// Writes the field CSV and its geometry sidecar.
pub fn write_field<T: Real>(path: &Path, u: &Field<T>) -> Result<()> {
    write_atomic(path, &table_csv(u.geom(), u.values(), false)?)?;
    write_json(&sidecar_path(path), &FieldMeta::of(u.geom()))
}

/// Reads a field using the geometry from its sidecar.
pub fn read_field<T: Real>(path: &Path) -> Result<Field<T>> {
    let meta: FieldMeta = serde_json::from_str(&fs::read_to_string(sidecar_path(path))?)?;
    read_field_in(path, &meta.geometry()?)
}

/// Reads a field CSV into the given geometry. Rows outside a zero-extended
/// box, duplicate sites and malformed rows are errors.
pub fn read_field_in<T: Real>(path: &Path, geom: &LatticeGeometry) -> Result<Field<T>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let headers = rdr.headers()?.clone();
    let mut expected: Vec<String> = (1..=geom.dim()).map(|i| format!("x{i}")).collect();
    expected.push("value".into());
    if headers
        .iter()
        .map(str::trim)
        .ne(expected.iter().map(String::as_str))
    {
        return Err(Error::Config(format!(
            "{}: expected header {}",
            path.display(),
            expected.join(",")
        )));
    }
    let mut values = vec![T::zero(); geom.len()];
    let mut seen = vec![false; geom.len()];
    let mut x = vec![0i64; geom.dim()];
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        let bad =
            |what: &str| Error::Config(format!("{}: row {}: {what}", path.display(), line + 2));
        for (c, field) in x.iter_mut().zip(record.iter()) {
            *c = field.trim().parse().map_err(|_| bad("bad coordinate"))?;
        }
        let v: f64 = record[geom.dim()]
            .trim()
            .parse()
            .map_err(|_| bad("bad value"))?;
        let in_box = x
            .iter()
            .all(|&c| c.unsigned_abs() as usize <= geom.radius());
        if !in_box {
            return Err(bad("site outside the box"));
        }
        let i = geom.index(&x).ok_or_else(|| bad("site outside the box"))?;
        if std::mem::replace(&mut seen[i], true) {
            return Err(bad("duplicate site"));
        }
        values[i] = T::lit(v);
    }
    Field::from_values(geom, values)
}

pub fn kernel_meta<T: Real>(kernel: &Kernel<T>) -> KernelMeta {
    KernelMeta {
        alpha: kernel.alpha().value().to_f64_lossy(),
        d: kernel.dim(),
        r: kernel.radius(),
        m: match kernel.kind() {
            KernelKind::Lattice { points } => points,
            KernelKind::Periodized { side } => side,
        },
        tail_bound: kernel.tail_bound().to_f64_lossy(),
        doubling_error: kernel.doubling_error().map(|e| e.to_f64_lossy()),
    }
}

/// Writes every offset of the table (zeros included) plus the sidecar.
pub fn write_kernel<T: Real>(path: &Path, kernel: &Kernel<T>) -> Result<()> {
    write_atomic(path, &table_csv(kernel.offsets(), kernel.values(), true)?)?;
    write_json(&sidecar_path(path), &kernel_meta(kernel))
}

/// Reads a kernel CSV back as `(offset, value)` rows.
pub fn read_kernel_rows(path: &Path) -> Result<Vec<(Vec<i64>, f64)>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let d = rdr.headers()?.len().saturating_sub(1);
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let parse_err = || Error::Config(format!("{}: malformed row", path.display()));
        let x = (0..d)
            .map(|i| record[i].trim().parse::<i64>().map_err(|_| parse_err()))
            .collect::<Result<Vec<_>>>()?;
        let v = record[d].trim().parse::<f64>().map_err(|_| parse_err())?;
        rows.push((x, v));
    }
    Ok(rows)
}
