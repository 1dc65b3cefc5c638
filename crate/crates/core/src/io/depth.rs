//! Depth map files: single-channel PFM and plain CSV.
//!
//! PFM stores `f32`, so values pass through single precision; CSV uses the
//! shortest round-tripping decimal form of each `f64` and is exact. In both,
//! any non-finite value reads back as the invalid sentinel.

use std::path::Path;

use super::{read_all, write_atomic};
use crate::depth::DepthMap;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DepthFormat {
    Pfm,
    Csv,
}

impl DepthFormat {
    /// Picks the format from the file extension (`.pfm` / `.csv`).
    pub fn from_path(path: &Path) -> Option<Self> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "pfm" => Some(Self::Pfm),
            "csv" => Some(Self::Csv),
            _ => None,
        }
    }
}

/// Reads a disparity map; negative values are rejected.
pub fn read_depth(path: impl AsRef<Path>, format: DepthFormat) -> Result<DepthMap> {
    let path = path.as_ref();
    let (w, h, values) = read_raw(path, format)?;
    DepthMap::new(w, h, values).map_err(|e| match e {
        Error::InvalidInput(reason) => Error::InvariantViolation {
            path: path.to_path_buf(),
            reason,
        },
        other => other,
    })
}

/// Reads a scalar field that may hold negative values, such as an
/// unclamped reconstruction.
pub fn read_field(path: impl AsRef<Path>, format: DepthFormat) -> Result<DepthMap> {
    let path = path.as_ref();
    let (w, h, mut values) = read_raw(path, format)?;
    for v in &mut values {
        if !v.is_finite() {
            *v = crate::depth::SENTINEL;
        }
    }
    if w == 0 || h == 0 {
        return Err(Error::InvariantViolation {
            path: path.to_path_buf(),
            reason: "zero-sized map".into(),
        });
    }
    Ok(DepthMap::from_unchecked(w, h, values))
}

pub fn write_depth(map: &DepthMap, path: impl AsRef<Path>, format: DepthFormat) -> Result<()> {
    let path = path.as_ref();
    match format {
        DepthFormat::Pfm => {
            let bytes = encode_pfm(map);
            write_atomic(path, |w| w.write_all(&bytes))
        }
        DepthFormat::Csv => {
            let text = encode_csv(map);
            write_atomic(path, |w| w.write_all(text.as_bytes()))
        }
    }
}

fn read_raw(path: &Path, format: DepthFormat) -> Result<(usize, usize, Vec<f64>)> {
    let bytes = read_all(path)?;
    match format {
        DepthFormat::Pfm => decode_pfm(path, &bytes),
        DepthFormat::Csv => decode_csv(path, &bytes),
    }
}

/// Grayscale PFM, little-endian (negative scale), rows stored bottom-up.
pub(crate) fn encode_pfm(map: &DepthMap) -> Vec<u8> {
    let (w, h) = (map.width(), map.height());
    let mut out = format!("Pf\n{w} {h}\n-1.0\n").into_bytes();
    out.reserve(w * h * 4);
    for r in (0..h).rev() {
        for c in 0..w {
            out.extend_from_slice(&(map.get(r, c) as f32).to_le_bytes());
        }
    }
    out
}

fn decode_pfm(path: &Path, bytes: &[u8]) -> Result<(usize, usize, Vec<f64>)> {
    let malformed = |reason: &str| Error::Parse {
        path: path.to_path_buf(),
        line: 0,
        reason: format!("malformed PFM header: {reason}"),
    };
    // Header: four whitespace-separated tokens, exactly one whitespace byte
    // before the raster.
    let mut pos = 0;
    let mut tokens: Vec<&str> = Vec::with_capacity(4);
    while tokens.len() < 4 {
        while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(malformed("unexpected end of header"));
        }
        let tok = std::str::from_utf8(&bytes[start..pos]).map_err(|_| malformed("non-ASCII header"))?;
        tokens.push(tok);
        if tokens.len() == 1 {
            match tok {
                "Pf" => {}
                "PF" => {
                    return Err(Error::UnsupportedFormat {
                        path: path.to_path_buf(),
                        reason: "colour PFM (PF); only single-channel Pf is supported".into(),
                    })
                }
                _ => {
                    return Err(Error::BadMagic {
                        path: path.to_path_buf(),
                        expected: "Pf".into(),
                    })
                }
            }
        }
    }
    if pos >= bytes.len() {
        return Err(malformed("missing raster"));
    }
    pos += 1;

    let w: usize = tokens[1].parse().map_err(|_| malformed("bad width"))?;
    let h: usize = tokens[2].parse().map_err(|_| malformed("bad height"))?;
    let scale: f64 = tokens[3].parse().map_err(|_| malformed("bad scale"))?;
    if w == 0 || h == 0 {
        return Err(malformed("zero dimension"));
    }
    if scale == 0.0 || !scale.is_finite() {
        return Err(malformed("scale must be non-zero"));
    }
    let little = scale < 0.0;
    let needed = w
        .checked_mul(h)
        .and_then(|s| s.checked_mul(4))
        .ok_or_else(|| Error::InvariantViolation {
            path: path.to_path_buf(),
            reason: format!("dimensions {w}x{h} overflow"),
        })?;
    let raster = &bytes[pos..];
    if raster.len() < needed {
        return Err(Error::TruncatedPayload {
            path: path.to_path_buf(),
            offset: bytes.len() as u64,
            needed: (needed - raster.len()) as u64,
        });
    }
    if raster.len() > needed {
        return Err(Error::InvariantViolation {
            path: path.to_path_buf(),
            reason: format!("{} trailing bytes after raster", raster.len() - needed),
        });
    }
    let mut values = vec![0.0; w * h];
    for (k, chunk) in raster.chunks_exact(4).enumerate() {
        let b: [u8; 4] = chunk.try_into().expect("4-byte chunk");
        let v = if little { f32::from_le_bytes(b) } else { f32::from_be_bytes(b) };
        let (file_row, c) = (k / w, k % w);
        values[(h - 1 - file_row) * w + c] = v as f64;
    }
    Ok((w, h, values))
}

fn encode_csv(map: &DepthMap) -> String {
    let mut out = String::with_capacity(map.len() * 8);
    for r in 0..map.height() {
        for c in 0..map.width() {
            if c > 0 {
                out.push(',');
            }
            let v = map.get(r, c);
            if v.is_finite() {
                out.push_str(&v.to_string());
            } else {
                out.push_str("nan");
            }
        }
        out.push('\n');
    }
    out
}

fn decode_csv(path: &Path, bytes: &[u8]) -> Result<(usize, usize, Vec<f64>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(bytes);
    let mut width = None;
    let mut values = Vec::new();
    let mut rows = 0;
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        if width.is_some_and(|w| w != record.len()) {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line,
                reason: format!("expected {} columns, found {}", width.unwrap(), record.len()),
            });
        }
        width = Some(record.len());
        for field in record.iter() {
            let v: f64 = field.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line,
                reason: format!("not a number: {field:?}"),
            })?;
            values.push(v);
        }
        rows += 1;
    }
    let w = width.ok_or_else(|| Error::Parse {
        path: path.to_path_buf(),
        line: 1,
        reason: "empty depth CSV".into(),
    })?;
    Ok((w, rows, values))
}

pub(crate) fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        csv::ErrorKind::UnequalLengths { expected_len, len, .. } => Error::Parse {
            path: path.to_path_buf(),
            line,
            reason: format!("expected {expected_len} columns, found {len}"),
        },
        other => Error::Parse {
            path: path.to_path_buf(),
            line,
            reason: format!("{other:?}"),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_two_by_two() {
        let (w, h, v) = decode_csv(Path::new("x.csv"), b"1,2\n3,4").unwrap();
        assert_eq!((w, h), (2, 2));
        assert_eq!(v, vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn csv_ragged_rows_report_the_line() {
        let err = decode_csv(Path::new("x.csv"), b"1,2\n3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(decode_csv(Path::new("x.csv"), b"1,abc\n").is_err());
    }

    #[test]
    fn pfm_is_bottom_up() {
        let m = DepthMap::new(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let bytes = encode_pfm(&m);
        let header = b"Pf\n2 2\n-1.0\n";
        assert_eq!(&bytes[..header.len()], header);
        let first = f32::from_le_bytes(bytes[header.len()..header.len() + 4].try_into().unwrap());
        assert_eq!(first, 3.0);
        let (w, h, v) = decode_pfm(Path::new("x.pfm"), &bytes).unwrap();
        assert_eq!((w, h), (2, 2));
        assert_eq!(v, vec![1.0, 2.0, 3.0, 4.0]);
    }

    #[test]
    fn pfm_big_endian_is_accepted() {
        let mut bytes = b"Pf\n1 2\n1.0\n".to_vec();
        bytes.extend_from_slice(&5.0f32.to_be_bytes());
        bytes.extend_from_slice(&6.0f32.to_be_bytes());
        let (_, _, v) = decode_pfm(Path::new("x.pfm"), &bytes).unwrap();
        assert_eq!(v, vec![6.0, 5.0]);
    }

    #[test]
    fn pfm_rejections() {
        let p = Path::new("x.pfm");
        assert!(matches!(
            decode_pfm(p, b"PF\n1 1\n-1.0\n\0\0\0\0\0\0\0\0\0\0\0\0"),
            Err(Error::UnsupportedFormat { .. })
        ));
        assert!(matches!(decode_pfm(p, b"P6\n1 1\n255\n"), Err(Error::BadMagic { .. })));
        assert!(matches!(decode_pfm(p, b"Pf\n2 2\n-1.0\n\0\0"), Err(Error::TruncatedPayload { .. })));
        assert!(matches!(decode_pfm(p, b"Pf\nx 2\n-1.0\n\0"), Err(Error::Parse { .. })));
        let huge = format!("Pf\n{} {}\n-1.0\n\0", usize::MAX, 2);
        assert!(matches!(decode_pfm(p, huge.as_bytes()), Err(Error::InvariantViolation { .. })));
    }
}
