//! Flat little-endian tensor files.
//!
//! ```text
//! magic   b"DCFT"
//! version u32  (currently 1)
//! n       u32
//! c       u32
//! dtype   u8   (0 = f64 real, 1 = c128 complex)
//! values  n*n*c scalars in tensor layout order; complex as (re, im) f64 pairs
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::tensor::{FeatureTensor, SpectrumTensor};
use crate::error::{DcfError, Result};

pub const DCFT_MAGIC: &[u8; 4] = b"DCFT";
pub const DCFT_VERSION: u32 = 1;

const DTYPE_REAL: u8 = 0;
const DTYPE_COMPLEX: u8 = 1;

/// A tensor as read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub enum StoredTensor {
    Real(FeatureTensor),
    Complex(SpectrumTensor),
}

fn write_header(w: &mut impl Write, n: usize, c: usize, dtype: u8) -> std::io::Result<()> {
    w.write_all(DCFT_MAGIC)?;
    w.write_all(&DCFT_VERSION.to_le_bytes())?;
    w.write_all(&(n as u32).to_le_bytes())?;
    w.write_all(&(c as u32).to_le_bytes())?;
    w.write_all(&[dtype])
}

impl FeatureTensor {
    pub fn write_to(&self, w: &mut impl Write) -> std::io::Result<()> {
        write_header(w, self.n(), self.channels(), DTYPE_REAL)?;
        for v in self.as_slice() {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| DcfError::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_to(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| DcfError::io(path, e))
    }
}

impl SpectrumTensor {
    pub fn write_to(&self, w: &mut impl Write) -> std::io::Result<()> {
        write_header(w, self.n(), self.channels(), DTYPE_COMPLEX)?;
        for v in self.as_slice() {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let file = File::create(path).map_err(|e| DcfError::io(path, e))?;
        let mut w = BufWriter::new(file);
        self.write_to(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| DcfError::io(path, e))
    }
}

fn read_u32(r: &mut impl Read) -> Result<u32> {
    let mut buf = [0u8; 4];
    r.read_exact(&mut buf)
        .map_err(|e| DcfError::Format(format!("truncated header: {e}")))?;
    Ok(u32::from_le_bytes(buf))
}

fn read_f64(r: &mut impl Read) -> Result<f64> {
    let mut buf = [0u8; 8];
    r.read_exact(&mut buf)
        .map_err(|e| DcfError::Format(format!("truncated payload: {e}")))?;
    Ok(f64::from_le_bytes(buf))
}

/// Reads one tensor in the DCFT format.
pub fn read_tensor(r: &mut impl Read) -> Result<StoredTensor> {
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)
        .map_err(|e| DcfError::Format(format!("truncated header: {e}")))?;
    if &magic != DCFT_MAGIC {
        return Err(DcfError::Format(format!("bad magic {magic:?}")));
    }
    let version = read_u32(r)?;
    if version != DCFT_VERSION {
        return Err(DcfError::Format(format!("unsupported version {version}")));
    }
    let n = read_u32(r)? as usize;
    let c = read_u32(r)? as usize;
    let mut dtype = [0u8; 1];
    r.read_exact(&mut dtype)
        .map_err(|e| DcfError::Format(format!("truncated header: {e}")))?;
    let count = n
        .checked_mul(n)
        .and_then(|v| v.checked_mul(c))
        .ok_or_else(|| DcfError::Format("shape overflows".into()))?;
    match dtype[0] {
        DTYPE_REAL => {
            let data = (0..count).map(|_| read_f64(r)).collect::<Result<Vec<_>>>()?;
            Ok(StoredTensor::Real(FeatureTensor::new(n, c, data)?))
        }
        DTYPE_COMPLEX => {
            let data = (0..count)
                .map(|_| Ok(Complex64::new(read_f64(r)?, read_f64(r)?)))
                .collect::<Result<Vec<_>>>()?;
            Ok(StoredTensor::Complex(SpectrumTensor::new(n, c, data)?))
        }
        other => Err(DcfError::Format(format!("unknown dtype {other}"))),
    }
}

impl StoredTensor {
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file = File::open(path).map_err(|e| DcfError::io(path, e))?;
        read_tensor(&mut BufReader::new(file))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_is_bit_exact() {
        let t = FeatureTensor::from_fn(2, 1, |i, j, _| (2 * i + j) as f64).unwrap();
        let mut buf = Vec::new();
        t.write_to(&mut buf).unwrap();
        assert_eq!(&buf[..4], b"DCFT");
        assert_eq!(&buf[4..8], &1u32.to_le_bytes());
        assert_eq!(&buf[8..12], &2u32.to_le_bytes());
        assert_eq!(&buf[12..16], &1u32.to_le_bytes());
        assert_eq!(buf[16], 0);
        assert_eq!(buf.len(), 17 + 4 * 8);
        assert_eq!(&buf[17 + 8..17 + 16], &1.0f64.to_le_bytes());
    }

    #[test]
    fn complex_round_trip() {
        let data = (0..8).map(|v| Complex64::new(v as f64, -(v as f64) / 3.0)).collect();
        let s = SpectrumTensor::new(2, 2, data).unwrap();
        let mut buf = Vec::new();
        s.write_to(&mut buf).unwrap();
        assert_eq!(buf[16], 1);
        let back = read_tensor(&mut buf.as_slice()).unwrap();
        assert_eq!(back, StoredTensor::Complex(s));
    }

    #[test]
    fn rejects_garbage() {
        assert!(read_tensor(&mut &b"NOPE"[..]).is_err());
        let mut buf = Vec::new();
        FeatureTensor::zeros(2, 1).write_to(&mut buf).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(matches!(read_tensor(&mut buf.as_slice()), Err(DcfError::Format(_))));
        let mut bad_dtype = Vec::new();
        FeatureTensor::zeros(2, 1).write_to(&mut bad_dtype).unwrap();
        bad_dtype[16] = 9;
        assert!(read_tensor(&mut bad_dtype.as_slice()).is_err());
    }
}
