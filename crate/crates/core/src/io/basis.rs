//! Binary PCA basis files.
//!
//! Layout, all little-endian:
//!
//! | offset | size      | field                                   |
//! |--------|-----------|-----------------------------------------|
//! | 0      | 4         | magic `PCAB`                            |
//! | 4      | 4         | version (`u32`, currently 1)            |
//! | 8      | 4 + 4 + 4 | width, height, l (`u32`)                |
//! | 20     | 8         | total variance (`f64`)                  |
//! | 28     | 8 s       | mean image, row-major                   |
//! |        | 8 l       | eigenvalues, descending                 |
//! |        | 8 s l     | basis, column-major (one eigenvector contiguous) |
//!
//! Because eigenvectors are stored contiguously in descending order, the
//! first `k` components of a file are a byte prefix of its payload.

use std::fs::File;
use std::io::{BufReader, Read};
use std::path::Path;

use nalgebra::DMatrix;

use super::write_atomic;
use crate::error::{Error, Result};
use crate::pca::PcaBasis;

pub const BASIS_MAGIC: &[u8; 4] = b"PCAB";
pub const BASIS_VERSION: u32 = 1;
const HEADER_LEN: u64 = 28;

/// Serializes `basis` to bytes.
pub fn encode_basis(basis: &PcaBasis) -> Vec<u8> {
    let s = basis.pixels();
    let l = basis.l();
    let mut out = Vec::with_capacity(HEADER_LEN as usize + 8 * (s + l + s * l));
    out.extend_from_slice(BASIS_MAGIC);
    out.extend_from_slice(&BASIS_VERSION.to_le_bytes());
    for v in [basis.width(), basis.height(), l] {
        out.extend_from_slice(&(v as u32).to_le_bytes());
    }
    out.extend_from_slice(&basis.total_variance().to_le_bytes());
    let payload = basis
        .mean()
        .iter()
        .chain(basis.eigenvalues())
        .chain(basis.basis().as_slice());
    for v in payload {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn save_basis(basis: &PcaBasis, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    if basis.width() > u32::MAX as usize || basis.height() > u32::MAX as usize {
        return Err(Error::invalid("basis dimensions exceed the u32 file limit"));
    }
    let bytes = encode_basis(basis);
    write_atomic(path, |w| w.write_all(&bytes))
}

/// Loads and validates a basis file.
pub fn load_basis(path: impl AsRef<Path>) -> Result<PcaBasis> {
    load(path.as_ref(), None)
}

/// Loads only the first `max_components` components (all of them if the
/// file holds fewer), reading just that prefix of the payload.
pub fn load_basis_prefix(path: impl AsRef<Path>, max_components: usize) -> Result<PcaBasis> {
    if max_components == 0 {
        return Err(Error::invalid("max_components must be at least 1"));
    }
    load(path.as_ref(), Some(max_components))
}

struct Cursor<'p, R> {
    inner: R,
    offset: u64,
    path: &'p Path,
}

impl<R: Read> Cursor<'_, R> {
    fn bytes<const N: usize>(&mut self) -> Result<[u8; N]> {
        let mut buf = [0u8; N];
        self.fill(&mut buf)?;
        Ok(buf)
    }

    fn fill(&mut self, buf: &mut [u8]) -> Result<()> {
        let mut got = 0;
        while got < buf.len() {
            match self.inner.read(&mut buf[got..]) {
                Ok(0) => {
                    return Err(Error::TruncatedPayload {
                        path: self.path.to_path_buf(),
                        offset: self.offset + got as u64,
                        needed: (buf.len() - got) as u64,
                    })
                }
                Ok(n) => got += n,
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => {}
                Err(e) => return Err(Error::io(self.path, e)),
            }
        }
        self.offset += buf.len() as u64;
        Ok(())
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.bytes::<4>()?))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.bytes::<8>()?))
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let mut raw = vec![0u8; n * 8];
        self.fill(&mut raw)?;
        Ok(raw
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect())
    }
}

fn load(path: &Path, max_components: Option<usize>) -> Result<PcaBasis> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let file_len = file.metadata().map_err(|e| Error::io(path, e))?.len();
    let mut cur = Cursor {
        inner: BufReader::new(file),
        offset: 0,
        path,
    };
    let magic = cur.bytes::<4>()?;
    if &magic != BASIS_MAGIC {
        return Err(Error::BadMagic {
            path: path.to_path_buf(),
            expected: "PCAB".into(),
        });
    }
    let version = cur.u32()?;
    if version != BASIS_VERSION {
        return Err(Error::UnsupportedVersion {
            path: path.to_path_buf(),
            version,
        });
    }
    let width = cur.u32()? as u64;
    let height = cur.u32()? as u64;
    let l = cur.u32()? as u64;
    let total_variance = cur.f64()?;

    let violation = |reason: String| Error::InvariantViolation {
        path: path.to_path_buf(),
        reason,
    };
    // Declared sizes are checked against the real file length before any
    // payload buffer is allocated.
    let s = width
        .checked_mul(height)
        .ok_or_else(|| violation("width * height overflows".into()))?;
    let expected = s
        .checked_mul(l)
        .and_then(|sl| sl.checked_add(s))
        .and_then(|v| v.checked_add(l))
        .and_then(|v| v.checked_mul(8))
        .and_then(|v| v.checked_add(HEADER_LEN))
        .ok_or_else(|| violation("declared sizes overflow".into()))?;
    let keep = max_components.map_or(l, |k| (k as u64).min(l));
    let needed = HEADER_LEN + 8 * (s + l + s * keep);
    if file_len < needed {
        return Err(Error::TruncatedPayload {
            path: path.to_path_buf(),
            offset: file_len,
            needed: needed - file_len,
        });
    }
    if max_components.is_none() && file_len > expected {
        return Err(violation(format!(
            "{} trailing bytes after payload",
            file_len - expected
        )));
    }

    let (s, l, keep) = (s as usize, l as usize, keep as usize);
    let mean = cur.f64s(s)?;
    let eigenvalues = cur.f64s(l)?;
    let columns = cur.f64s(s * keep)?;
    let basis = DMatrix::from_vec(s, keep, columns);
    PcaBasis::from_parts(
        width as usize,
        height as usize,
        mean,
        basis,
        eigenvalues[..keep].to_vec(),
        total_variance,
    )
    .map_err(|e| match e {
        Error::InvalidInput(reason) => violation(reason),
        other => other,
    })
}
