//! `.ylf` snapshots: a 16-byte header (`YLF1`, little-endian `u32` n, eight
//! reserved zero bytes) followed by `n * n` little-endian `f64` samples,
//! row-major with `x2` varying fastest.

use std::fs;
use std::path::Path;

use super::{FieldKind, GridField};
use crate::error::{Error, Result};

pub const YLF_MAGIC: &[u8; 4] = b"YLF1";
pub const YLF_HEADER_LEN: usize = 16;

pub fn encode_ylf(field: &GridField) -> Vec<u8> {
    let n = field.n();
    let mut out = Vec::with_capacity(YLF_HEADER_LEN + 8 * n * n);
    out.extend_from_slice(YLF_MAGIC);
    out.extend_from_slice(&(n as u32).to_le_bytes());
    out.extend_from_slice(&[0u8; 8]);
    for v in field.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Decodes a snapshot into a field of the given kind.
pub fn decode_ylf(bytes: &[u8], kind: FieldKind) -> Result<GridField> {
    if bytes.len() < YLF_HEADER_LEN {
        return Err(Error::Format {
            offset: bytes.len() as u64,
            reason: "truncated header".into(),
        });
    }
    if &bytes[..4] != YLF_MAGIC {
        return Err(Error::Format {
            offset: 0,
            reason: "bad magic".into(),
        });
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let expected = YLF_HEADER_LEN + 8 * n * n;
    if bytes.len() < expected {
        return Err(Error::Format {
            offset: bytes.len() as u64,
            reason: format!("truncated payload, expected {expected} bytes"),
        });
    }
    if bytes.len() > expected {
        return Err(Error::Format {
            offset: expected as u64,
            reason: "trailing bytes after payload".into(),
        });
    }
    let values = bytes[YLF_HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    GridField::new(n, values, kind).map_err(|e| match e {
        Error::InvalidInput(reason) => Error::Format { offset: 4, reason },
        other => other,
    })
}

pub fn write_ylf(path: impl AsRef<Path>, field: &GridField) -> Result<()> {
    fs::write(path, encode_ylf(field))?;
    Ok(())
}

pub fn read_ylf(path: impl AsRef<Path>, kind: FieldKind) -> Result<GridField> {
    decode_ylf(&fs::read(path)?, kind)
}
