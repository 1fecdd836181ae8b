//! Binary eigendecomposition cache.
//!
//! Layout (all little-endian): 8-byte magic, `u32` version, `u64` key,
//! `u32` dimension, `u64` points per axis, `f64` half width, `u64` mode
//! count, then the eigenvalues and the mode-major eigenvectors as `f64`.

use std::io::{Read, Write};
use std::path::Path;

use super::{Grid, SpectralDecomposition};
use crate::error::{Error, Result};
use crate::model::OscillatorSpec;

pub const CACHE_MAGIC: &[u8; 8] = b"PLSPEC01";
pub const CACHE_VERSION: u32 = 1;

/// FNV-1a hash of the oscillator and grid descriptions.
pub fn cache_key(osc: &OscillatorSpec, grid: &Grid) -> u64 {
    let text = format!("{osc:?}|{grid:?}");
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn io_err(e: std::io::Error) -> Error {
    Error::Cache(e.to_string())
}

pub fn write_cache(path: &Path, dec: &SpectralDecomposition) -> Result<()> {
    let osc = dec
        .oscillator()
        .ok_or_else(|| Error::Cache("only oscillator-backed decompositions are cached".into()))?;
    let grid = dec.grid();
    let mut buf = Vec::with_capacity(48 + 8 * (dec.mode_count() + dec.raw_vectors().len()));
    buf.extend_from_slice(CACHE_MAGIC);
    buf.extend_from_slice(&CACHE_VERSION.to_le_bytes());
    buf.extend_from_slice(&cache_key(osc, grid).to_le_bytes());
    buf.extend_from_slice(&(grid.dimension() as u32).to_le_bytes());
    buf.extend_from_slice(&(grid.points_per_axis() as u64).to_le_bytes());
    buf.extend_from_slice(&grid.half_width().to_le_bytes());
    buf.extend_from_slice(&(dec.mode_count() as u64).to_le_bytes());
    for v in dec.eigenvalues().iter().chain(dec.raw_vectors()) {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    let mut file = std::fs::File::create(path).map_err(io_err)?;
    file.write_all(&buf).map_err(io_err)
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let slice = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| Error::Cache("truncated cache file".into()))?;
        self.pos = end;
        Ok(slice.try_into().expect("slice length is N"))
    }
    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take()?))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
}

/// Loads a cached decomposition, checking it was built for `osc` on `grid`.
pub fn read_cache(path: &Path, osc: &OscillatorSpec, grid: &Grid) -> Result<SpectralDecomposition> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(io_err)?;
    let mut c = Cursor { bytes: &bytes, pos: 0 };
    if &c.take::<8>()? != CACHE_MAGIC {
        return Err(Error::Cache("bad magic".into()));
    }
    let version = c.u32()?;
    if version != CACHE_VERSION {
        return Err(Error::Cache(format!("unsupported cache version {version}")));
    }
    if c.u64()? != cache_key(osc, grid) {
        return Err(Error::Cache("key does not match oscillator and grid".into()));
    }
    let d = c.u32()? as usize;
    let n = c.u64()? as usize;
    let half = c.f64()?;
    if d != grid.dimension() || n != grid.points_per_axis() || half != grid.half_width() {
        return Err(Error::Cache("grid header does not match".into()));
    }
    let m = c.u64()? as usize;
    let nodes = grid.node_count();
    if m == 0 || m > nodes || bytes.len() != c.pos + 8 * m * (1 + nodes) {
        return Err(Error::Cache("payload length does not match header".into()));
    }
    let eigenvalues = (0..m).map(|_| c.f64()).collect::<Result<Vec<_>>>()?;
    let vectors = (0..m * nodes).map(|_| c.f64()).collect::<Result<Vec<_>>>()?;
    SpectralDecomposition::from_parts(Some(osc.clone()), *grid, eigenvalues, vectors)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{assemble_operator, eigendecompose};

    #[test]
    fn round_trip_is_bit_exact() {
        let osc = OscillatorSpec::hermite(1);
        let grid = Grid::new(1, 32, 6.0).unwrap();
        let dec = eigendecompose(&assemble_operator(&osc, &grid).unwrap(), 16).unwrap();
        let dir = std::env::temp_dir().join(format!("phaselab-cache-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("hermite.bin");
        write_cache(&path, &dec).unwrap();
        let back = read_cache(&path, &osc, &grid).unwrap();
        assert_eq!(back.eigenvalues(), dec.eigenvalues());
        assert_eq!(back.raw_vectors(), dec.raw_vectors());

        let other = OscillatorSpec::anharmonic(1, 2, 1);
        assert!(matches!(read_cache(&path, &other, &grid), Err(Error::Cache(_))));
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 3]).unwrap();
        assert!(read_cache(&path, &osc, &grid).is_err());
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn key_separates_grids() {
        let osc = OscillatorSpec::hermite(1);
        let a = Grid::new(1, 32, 6.0).unwrap();
        assert_ne!(cache_key(&osc, &a), cache_key(&osc, &a.refined()));
    }
}
