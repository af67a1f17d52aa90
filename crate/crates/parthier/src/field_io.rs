//! Binary field files with a JSON sidecar.
//!
//! Layout, all little-endian:
//!
//! ```text
//! magic       8 bytes  "PHFIELD1"
//! width       u64
//! height      u64
//! lattice     u64      0 = plane, 1 = line
//! rho         f64
//! residual    f64
//! iterations  u64
//! values      width·height f64, row-major, NaN off the shape
//! ```
//!
//! The shape is recovered from the non-NaN pixels, so a field file is self
//! contained. The sidecar (`.json` next to the `.bin`) repeats the metadata
//! for readers that only need the numbers.

use std::path::{Path, PathBuf};

use parthier_core::{Field, Lattice, ShapeGrid};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"PHFIELD1";
const HEADER_LEN: usize = 8 + 6 * 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldSidecar {
    pub width: usize,
    pub height: usize,
    pub lattice: String,
    pub area: usize,
    pub rho: f64,
    pub residual: f64,
    pub iterations: usize,
    pub mean_value: f64,
    pub max_abs_omega: f64,
    pub rho_below_recommended: bool,
}

impl FieldSidecar {
    pub fn of(field: &Field) -> Self {
        let grid = field.grid();
        FieldSidecar {
            width: grid.width(),
            height: grid.height(),
            lattice: lattice_name(grid.lattice()).into(),
            area: grid.area(),
            rho: field.rho(),
            residual: field.residual(),
            iterations: field.iterations(),
            mean_value: field.mean_value(),
            max_abs_omega: field.max_abs(),
            rho_below_recommended: field.rho_below_recommended(),
        }
    }
}

fn lattice_name(lattice: Lattice) -> &'static str {
    match lattice {
        Lattice::Plane => "plane",
        Lattice::Line => "line",
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

pub fn encode_field(field: &Field) -> Vec<u8> {
    let grid = field.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * grid.len());
    out.extend_from_slice(MAGIC);
    for v in [grid.width() as u64, grid.height() as u64, u64::from(grid.lattice() == Lattice::Line)] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&field.rho().to_le_bytes());
    out.extend_from_slice(&field.residual().to_le_bytes());
    out.extend_from_slice(&(field.iterations() as u64).to_le_bytes());
    for p in 0..grid.len() {
        let v = if grid.mask()[p] { field.at(p) } else { f64::NAN };
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_field(bytes: &[u8], path: &Path) -> Result<Field> {
    let bad = |msg: String| Error::invalid(path, msg);
    if bytes.len() < HEADER_LEN || &bytes[..8] != MAGIC {
        return Err(bad("not a field file (bad magic)".into()));
    }
    let word = |k: usize| {
        let at = 8 + 8 * k;
        <[u8; 8]>::try_from(&bytes[at..at + 8]).expect("header length checked")
    };
    let (width, height) = (u64::from_le_bytes(word(0)) as usize, u64::from_le_bytes(word(1)) as usize);
    let lattice = match u64::from_le_bytes(word(2)) {
        0 => Lattice::Plane,
        1 => Lattice::Line,
        other => return Err(bad(format!("unknown lattice code {other}"))),
    };
    let rho = f64::from_le_bytes(word(3));
    let residual = f64::from_le_bytes(word(4));
    let iterations = u64::from_le_bytes(word(5)) as usize;
    let len = width.checked_mul(height).ok_or_else(|| bad("raster size overflows".into()))?;
    if bytes.len() != HEADER_LEN + 8 * len {
        return Err(bad(format!(
            "expected {} value bytes for {width}×{height}, found {}",
            8 * len,
            bytes.len() - HEADER_LEN
        )));
    }
    let values: Vec<f64> =
        bytes[HEADER_LEN..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunks of 8"))).collect();
    if values.iter().any(|v| v.is_infinite()) {
        return Err(bad("field holds infinite values".into()));
    }
    let mask: Vec<bool> = values.iter().map(|v| !v.is_nan()).collect();
    let grid = ShapeGrid::from_padded(width, height, lattice, mask).map_err(Error::core("load"))?;
    let omega: Vec<f64> = values.into_iter().filter(|v| !v.is_nan()).collect();
    Field::from_parts(grid, omega, rho, residual, iterations).map_err(Error::core("load"))
}

/// Writes `path` and its sidecar.
pub fn write_field(field: &Field, path: &Path) -> Result<()> {
    crate::write_file(path, &encode_field(field))?;
    crate::write_json(&sidecar_path(path), &FieldSidecar::of(field))
}

pub fn read_field(path: &Path) -> Result<Field> {
    let bytes = std::fs::read(path).map_err(|source| Error::Io { path: path.into(), source })?;
    decode_field(&bytes, path)
}
