//! Binary model checkpoints: magic `GERNCKPT`, `u32` version, `u32` layer
//! count `k`, `k + 1` `u64` dims, `f64` dropout, then every layer's weights
//! row-major as little-endian `f32`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::matrix::{Matrix, Real};
use super::model::GcnModel;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"GERNCKPT";
const VERSION: u32 = 1;

pub fn write_checkpoint<T: Real, W: Write>(model: &GcnModel<T>, mut out: W) -> Result<()> {
    out.write_all(MAGIC)?;
    out.write_all(&VERSION.to_le_bytes())?;
    out.write_all(&(model.layer_count() as u32).to_le_bytes())?;
    for d in model.dims() {
        out.write_all(&(d as u64).to_le_bytes())?;
    }
    out.write_all(&model.dropout().to_le_bytes())?;
    for w in model.weights() {
        for &v in w.data() {
            out.write_all(&(v.as_f64() as f32).to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_checkpoint<R: Read>(mut input: R) -> Result<GcnModel<f32>> {
    let mut magic = [0u8; 8];
    input.read_exact(&mut magic)?;
    if &magic != MAGIC {
        return Err(Error::Checkpoint("bad magic".into()));
    }
    let version = read_u32(&mut input)?;
    if version != VERSION {
        return Err(Error::Checkpoint(format!("unsupported version {version}")));
    }
    let k = read_u32(&mut input)? as usize;
    if k == 0 || k > 1024 {
        return Err(Error::Checkpoint(format!("implausible layer count {k}")));
    }
    let mut dims = Vec::with_capacity(k + 1);
    for _ in 0..=k {
        let mut b = [0u8; 8];
        input.read_exact(&mut b)?;
        dims.push(
            usize::try_from(u64::from_le_bytes(b))
                .map_err(|_| Error::Checkpoint("dim overflow".into()))?,
        );
    }
    let mut b = [0u8; 8];
    input.read_exact(&mut b)?;
    let dropout = f64::from_le_bytes(b);
    let mut weights = Vec::with_capacity(k);
    for w in dims.windows(2) {
        let len = w[0]
            .checked_mul(w[1])
            .ok_or_else(|| Error::Checkpoint("dim overflow".into()))?;
        let mut raw = vec![0u8; len * 4];
        input.read_exact(&mut raw)?;
        let data = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        weights.push(Matrix::from_vec(w[0], w[1], data)?);
    }
    let mut rest = [0u8; 1];
    if input.read(&mut rest)? != 0 {
        return Err(Error::Checkpoint("trailing bytes".into()));
    }
    GcnModel::from_weights(weights, dropout).map_err(|e| Error::Checkpoint(e.to_string()))
}

pub fn save_checkpoint<T: Real>(model: &GcnModel<T>, path: &Path) -> Result<()> {
    write_checkpoint(model, BufWriter::new(File::create(path)?))
}

pub fn load_checkpoint(path: &Path) -> Result<GcnModel<f32>> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    read_checkpoint(BufReader::new(File::open(path)?))
}

fn read_u32<R: Read>(input: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    input.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}
