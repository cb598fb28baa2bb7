//! Binary container for density matrices.
//!
//! Layout (all integers and floats little-endian):
//!
//! | bytes | content |
//! |-------|---------|
//! | 4 | magic `SQZC` |
//! | 4 | format version, `u32` |
//! | 4 | header length `h`, `u32` |
//! | h | UTF-8 JSON header ([`StateHeader`]) |
//! | 16 d^2 | row-major entries, each `(re, im)` as two `f64` |

use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hamiltonian::HamiltonianVariant;
use super::state::{DensityMatrix, Layout};
use crate::effective::CircuitParams;
use crate::error::{Error, Result};
use crate::numerics::DenseMatrix;

pub const MAGIC: &[u8; 4] = b"SQZC";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateHeader {
    pub layout: Layout,
    pub dim: usize,
    #[serde(default)]
    pub params: Option<CircuitParams>,
    #[serde(default)]
    pub variant: Option<HamiltonianVariant>,
}

pub fn encode_state(rho: &DensityMatrix, params: Option<&CircuitParams>, variant: Option<HamiltonianVariant>) -> Result<Vec<u8>> {
    let header = StateHeader { layout: rho.layout, dim: rho.dim(), params: params.copied(), variant };
    let json = serde_json::to_vec(&header).map_err(|e| Error::Format(e.to_string()))?;
    let json_len = u32::try_from(json.len()).map_err(|_| Error::Format("header too long".into()))?;
    let entries = rho.matrix.as_slice();
    let mut out = Vec::with_capacity(12 + json.len() + 16 * entries.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&json_len.to_le_bytes());
    out.extend_from_slice(&json);
    for z in entries {
        out.extend_from_slice(&z.re.to_le_bytes());
        out.extend_from_slice(&z.im.to_le_bytes());
    }
    Ok(out)
}

fn take<'a>(bytes: &mut &'a [u8], n: usize, what: &str) -> Result<&'a [u8]> {
    if bytes.len() < n {
        return Err(Error::Format(format!("truncated {what}")));
    }
    let (head, tail) = bytes.split_at(n);
    *bytes = tail;
    Ok(head)
}

fn read_u32(bytes: &mut &[u8], what: &str) -> Result<u32> {
    Ok(u32::from_le_bytes(take(bytes, 4, what)?.try_into().expect("4 bytes")))
}

pub fn decode_state(mut bytes: &[u8]) -> Result<(DensityMatrix, StateHeader)> {
    if take(&mut bytes, 4, "magic")? != MAGIC {
        return Err(Error::Format("bad magic bytes".into()));
    }
    let version = read_u32(&mut bytes, "version")?;
    if version != FORMAT_VERSION {
        return Err(Error::Format(format!("unsupported format version {version}")));
    }
    let len = read_u32(&mut bytes, "header length")? as usize;
    let header: StateHeader = serde_json::from_slice(take(&mut bytes, len, "header")?).map_err(|e| Error::Format(e.to_string()))?;
    let d = header.dim;
    if header.layout.dim() != d {
        return Err(Error::Format(format!("header dimension {d} disagrees with layout dimension {}", header.layout.dim())));
    }
    let expected = d.checked_mul(d).and_then(|n| n.checked_mul(16)).ok_or_else(|| Error::Format("dimension overflow".into()))?;
    if bytes.len() != expected {
        return Err(Error::Format(format!("expected {expected} payload bytes, found {}", bytes.len())));
    }
    let data: Vec<Complex64> = bytes
        .chunks_exact(16)
        .map(|c| Complex64::new(f64::from_le_bytes(c[..8].try_into().expect("8 bytes")), f64::from_le_bytes(c[8..].try_into().expect("8 bytes"))))
        .collect();
    let rho = DensityMatrix::new(header.layout, DenseMatrix::from_row_major(d, d, data)?)?;
    Ok((rho, header))
}

pub fn write_state(path: &Path, rho: &DensityMatrix, params: Option<&CircuitParams>, variant: Option<HamiltonianVariant>) -> Result<()> {
    let bytes = encode_state(rho, params, variant)?;
    fs::write(path, bytes).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn read_state(path: &Path) -> Result<(DensityMatrix, StateHeader)> {
    let bytes = fs::read(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    decode_state(&bytes)
}
