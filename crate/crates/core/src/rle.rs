//! Run-length codes for pixel sets on a raster.
//!
//! A set is stored as alternating run lengths over the row-major raster,
//! starting with a run of non-members (possibly zero) so the parity of a run
//! tells its kind.

use alloc::vec::Vec;

use crate::error::{Error, Result};

pub fn encode(len: usize, pixels: &[usize]) -> Vec<u32> {
    let mut member = alloc::vec![false; len];
    for &p in pixels {
        member[p] = true;
    }
    encode_mask(&member)
}

pub fn encode_mask(member: &[bool]) -> Vec<u32> {
    let mut runs = Vec::new();
    let mut current = false;
    let mut count = 0u32;
    for &m in member {
        if m != current {
            runs.push(count);
            current = m;
            count = 0;
        }
        count += 1;
    }
    if count > 0 {
        runs.push(count);
    }
    runs
}

/// Sorted pixel indices of the coded set; fails when runs overrun `len`.
pub fn decode(len: usize, runs: &[u32]) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    let mut pos = 0usize;
    for (i, &r) in runs.iter().enumerate() {
        let end = pos + r as usize;
        if end > len {
            return Err(Error::InvalidDimensions(alloc::format!("runs cover {end} pixels of {len}")));
        }
        if i % 2 == 1 {
            out.extend(pos..end);
        }
        pos = end;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn round_trip() {
        let pixels = vec![0, 1, 5, 6, 7, 11];
        let runs = encode(12, &pixels);
        assert_eq!(runs, vec![0, 2, 3, 3, 3, 1]);
        assert_eq!(decode(12, &runs).unwrap(), pixels);
        assert_eq!(encode(4, &[]), vec![4]);
        assert!(decode(12, &[]).unwrap().is_empty());
    }

    #[test]
    fn overrun_fails() {
        assert!(decode(3, &[2, 2]).is_err());
    }
}
