//! Raw volume files.
//!
//! A volume named `NAME` is stored as two files:
//!
//! * `NAME.volhdr`: UTF-8 text with exactly the keys `dims=m,n,s`,
//!   `dtype=f32|f64` and `order=lex`, one per line;
//! * `NAME.vol`: `m*n*s` little-endian scalars in lexicographic order.
//!
//! `f32` payloads are promoted to `f64` on read.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::{Dims, Volume3D};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DType {
    F32,
    #[default]
    F64,
}

impl DType {
    pub fn as_str(&self) -> &'static str {
        match self {
            DType::F32 => "f32",
            DType::F64 => "f64",
        }
    }

    fn width(&self) -> usize {
        match self {
            DType::F32 => 4,
            DType::F64 => 8,
        }
    }
}

impl FromStr for DType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f32" => Ok(DType::F32),
            "f64" => Ok(DType::F64),
            other => Err(Error::param(format!("unknown dtype '{other}'"))),
        }
    }
}

/// Header and payload paths for a volume name. A trailing `.vol` or
/// `.volhdr` extension on `name` is ignored.
pub fn volume_paths(name: &Path) -> (PathBuf, PathBuf) {
    let base = match name.extension().and_then(|e| e.to_str()) {
        Some("vol") | Some("volhdr") => name.with_extension(""),
        _ => name.to_path_buf(),
    };
    let mut hdr = base.clone().into_os_string();
    hdr.push(".volhdr");
    let mut vol = base.into_os_string();
    vol.push(".vol");
    (PathBuf::from(hdr), PathBuf::from(vol))
}

pub fn write_volume(name: &Path, volume: &Volume3D, dtype: DType) -> Result<()> {
    let (hdr_path, vol_path) = volume_paths(name);
    let d = volume.dims();
    let header = format!(
        "dims={},{},{}\ndtype={}\norder=lex\n",
        d.m,
        d.n,
        d.s,
        dtype.as_str()
    );
    let mut payload = Vec::with_capacity(volume.len() * dtype.width());
    match dtype {
        DType::F64 => {
            for v in volume.as_slice() {
                payload.extend_from_slice(&v.to_le_bytes());
            }
        }
        DType::F32 => {
            for v in volume.as_slice() {
                payload.extend_from_slice(&(*v as f32).to_le_bytes());
            }
        }
    }
    fs::write(&hdr_path, header).map_err(|source| Error::Io {
        path: hdr_path.clone(),
        source,
    })?;
    fs::write(&vol_path, payload).map_err(|source| Error::Io {
        path: vol_path.clone(),
        source,
    })?;
    Ok(())
}

struct Header {
    dims: Dims,
    dtype: DType,
}

fn parse_header(path: &Path, text: &str) -> Result<Header> {
    let fail = |message: String| Error::Format {
        path: path.to_path_buf(),
        message,
    };
    let mut dims = None;
    let mut dtype = None;
    let mut order = None;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| fail(format!("malformed header line '{line}'")))?;
        match key.trim() {
            "dims" => {
                let parts: Vec<usize> = value
                    .split(',')
                    .map(|p| p.trim().parse::<usize>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| fail(format!("bad dims '{value}': {e}")))?;
                if parts.len() != 3 || parts.contains(&0) {
                    return Err(fail(format!(
                        "dims must be three positive integers, got '{value}'"
                    )));
                }
                dims = Some(Dims::new(parts[0], parts[1], parts[2]));
            }
            "dtype" => {
                dtype = Some(
                    value
                        .trim()
                        .parse::<DType>()
                        .map_err(|e| fail(e.to_string()))?,
                );
            }
            "order" => order = Some(value.trim().to_string()),
            other => return Err(fail(format!("unknown header key '{other}'"))),
        }
    }
    match order.as_deref() {
        Some("lex") => {}
        Some(other) => return Err(fail(format!("unsupported order '{other}'"))),
        None => return Err(fail("missing 'order' key".into())),
    }
    Ok(Header {
        dims: dims.ok_or_else(|| fail("missing 'dims' key".into()))?,
        dtype: dtype.ok_or_else(|| fail("missing 'dtype' key".into()))?,
    })
}

pub fn read_volume(name: &Path) -> Result<Volume3D> {
    let (hdr_path, vol_path) = volume_paths(name);
    let text = fs::read_to_string(&hdr_path).map_err(|source| Error::Io {
        path: hdr_path.clone(),
        source,
    })?;
    let header = parse_header(&hdr_path, &text)?;
    let bytes = fs::read(&vol_path).map_err(|source| Error::Io {
        path: vol_path.clone(),
        source,
    })?;
    let expected = header.dims.len() * header.dtype.width();
    if bytes.len() != expected {
        return Err(Error::Format {
            path: vol_path,
            message: format!(
                "payload has {} bytes, header {} {} requires {expected}",
                bytes.len(),
                header.dims,
                header.dtype.as_str()
            ),
        });
    }
    let data: Vec<f64> = match header.dtype {
        DType::F64 => bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect(),
        DType::F32 => bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
            .collect(),
    };
    Volume3D::from_vec(header.dims, data).map_err(|e| Error::Format {
        path: vol_path,
        message: e.to_string(),
    })
}
