//! Debug dump of a matrix: a 16-byte header (`RMTM`, version, rows, cols as
//! little-endian u32) followed by little-endian f64 values in row-major order.
//! Version 1 stores real parts only; version 2 stores `(re, im)` pairs.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::is_real;
use crate::error::{Error, Result};

pub const RMTM_VERSION_REAL: u32 = 1;
pub const RMTM_VERSION_COMPLEX: u32 = 2;
const MAGIC: &[u8; 4] = b"RMTM";

pub fn write_rmtm(path: &Path, m: &DMatrix<Complex64>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let real = is_real(m);
    let version = if real { RMTM_VERSION_REAL } else { RMTM_VERSION_COMPLEX };
    w.write_all(MAGIC)?;
    for v in [version, m.nrows() as u32, m.ncols() as u32] {
        w.write_all(&v.to_le_bytes())?;
    }
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            w.write_all(&m[(i, j)].re.to_le_bytes())?;
            if !real {
                w.write_all(&m[(i, j)].im.to_le_bytes())?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_rmtm(path: &Path) -> Result<DMatrix<Complex64>> {
    let mut r = BufReader::new(File::open(path)?);
    let mut header = [0u8; 16];
    r.read_exact(&mut header)?;
    if &header[..4] != MAGIC {
        return Err(Error::SchemaVersionMismatch("missing RMTM magic".into()));
    }
    let word = |k: usize| u32::from_le_bytes(header[4 * k..4 * k + 4].try_into().unwrap());
    let (version, rows, cols) = (word(1), word(2) as usize, word(3) as usize);
    let per = match version {
        RMTM_VERSION_REAL => 1,
        RMTM_VERSION_COMPLEX => 2,
        v => return Err(Error::SchemaVersionMismatch(format!("unknown RMTM version {v}"))),
    };
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() != rows * cols * per * 8 {
        return Err(Error::SchemaVersionMismatch(format!(
            "payload has {} bytes, header implies {}",
            bytes.len(),
            rows * cols * per * 8
        )));
    }
    let vals: Vec<f64> = bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
    Ok(DMatrix::from_fn(rows, cols, |i, j| {
        let k = (i * cols + j) * per;
        Complex64::new(vals[k], if per == 2 { vals[k + 1] } else { 0.0 })
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{draw_entries, EntryLaw};

    #[test]
    fn roundtrip_real_and_complex() {
        let dir = tempfile::tempdir().unwrap();
        for (law, name) in [(EntryLaw::RealGaussian, "r.bin"), (EntryLaw::ComplexGaussian, "c.bin")] {
            let m = draw_entries(3, 5, &law, 1).unwrap();
            let path = dir.path().join(name);
            write_rmtm(&path, &m).unwrap();
            assert_eq!(read_rmtm(&path).unwrap(), m);
        }
        let real_len = std::fs::metadata(dir.path().join("r.bin")).unwrap().len();
        assert_eq!(real_len, 16 + 3 * 5 * 8);
    }

    #[test]
    fn rejects_bad_magic() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.bin");
        std::fs::write(&path, [0u8; 24]).unwrap();
        assert!(matches!(read_rmtm(&path), Err(Error::SchemaVersionMismatch(_))));
    }
}
