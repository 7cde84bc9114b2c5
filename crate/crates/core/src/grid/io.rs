//! Binary grid-function files: one JSON header line, then little-endian
//! `f64` pairs `(re, im)` in row-major order. Symbol tables store one x-slab
//! per frequency node and record the slab count in the header.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{Grid, GridFunction, C64};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Header {
    pub dim: usize,
    pub n: usize,
    pub half_length: f64,
    pub spectral: bool,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub slabs: usize,
}

fn one() -> usize {
    1
}

fn is_one(v: &usize) -> bool {
    *v == 1
}

pub fn write_grid_function<W: Write>(w: &mut W, u: &GridFunction) -> Result<()> {
    write_slabs(w, u.grid(), u.is_spectral(), &[u.values()])
}

pub fn write_slabs<W: Write>(w: &mut W, grid: &Grid, spectral: bool, slabs: &[&[C64]]) -> Result<()> {
    let header = Header {
        dim: grid.dim,
        n: grid.n,
        half_length: grid.half_length,
        spectral,
        slabs: slabs.len(),
    };
    serde_json::to_writer(&mut *w, &header)?;
    w.write_all(b"\n")?;
    for slab in slabs {
        if slab.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "slab has {} values, grid has {}",
                slab.len(),
                grid.len()
            )));
        }
        for v in slab.iter() {
            w.write_all(&v.re.to_le_bytes())?;
            w.write_all(&v.im.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Reads a header and all slabs.
pub fn read_slabs<R: BufRead>(r: &mut R) -> Result<(Header, Grid, Vec<Vec<C64>>)> {
    let mut line = String::new();
    r.read_line(&mut line)?;
    let header: Header = serde_json::from_str(line.trim_end())?;
    let grid = Grid::new(header.dim, header.n, header.half_length)?;
    let mut slabs = Vec::with_capacity(header.slabs);
    let mut buf = [0u8; 16];
    for _ in 0..header.slabs {
        let mut slab = Vec::with_capacity(grid.len());
        for _ in 0..grid.len() {
            r.read_exact(&mut buf)?;
            let re = f64::from_le_bytes(buf[..8].try_into().unwrap());
            let im = f64::from_le_bytes(buf[8..].try_into().unwrap());
            slab.push(C64::new(re, im));
        }
        slabs.push(slab);
    }
    Ok((header, grid, slabs))
}

pub fn read_grid_function<R: BufRead>(r: &mut R) -> Result<GridFunction> {
    let (header, grid, mut slabs) = read_slabs(r)?;
    if header.slabs != 1 {
        return Err(Error::InvalidParameter(format!(
            "expected a single grid function, file holds {} slabs",
            header.slabs
        )));
    }
    GridFunction::new(grid, slabs.pop().unwrap(), header.spectral)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_preserves_bits() {
        let g = Grid::new(2, 8, 1.5).unwrap();
        let u = GridFunction::from_fn(g, |x| C64::new(x[0], -x[1] * 0.3));
        let mut bytes = Vec::new();
        write_grid_function(&mut bytes, &u).unwrap();
        let first_line = bytes.split(|b| *b == b'\n').next().unwrap();
        assert_eq!(
            std::str::from_utf8(first_line).unwrap(),
            r#"{"dim":2,"n":8,"half_length":1.5,"spectral":false}"#
        );
        let back = read_grid_function(&mut bytes.as_slice()).unwrap();
        assert_eq!(back, u);
    }

    #[test]
    fn truncated_file_is_an_error() {
        let g = Grid::new(1, 8, 1.0).unwrap();
        let mut bytes = Vec::new();
        write_grid_function(&mut bytes, &GridFunction::zeros(g)).unwrap();
        bytes.truncate(bytes.len() - 3);
        assert!(read_grid_function(&mut bytes.as_slice()).is_err());
    }
}
