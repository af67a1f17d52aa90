//! The shape raster Ω and its pixel adjacency conventions.
//!
//! Pixels are addressed by their row-major linear index. Every grid carries a
//! one-pixel background margin, so the Dirichlet boundary ∂Ω (background
//! pixels adjacent to the shape) always lies inside the raster.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

mod synthetic;

pub use synthetic::{HumanoidPreset, Limb, SyntheticShape};

/// Sentinel for "no interior slot" in [`ShapeGrid::interior_slot`] lookups.
const NO_SLOT: u32 = u32::MAX;

/// Geometry of the pixel lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Lattice {
    /// A single row of pixels; only left/right neighbors exist.
    Line,
    /// The usual planar raster.
    Plane,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Connectivity {
    Four,
    Eight,
}

impl Connectivity {
    /// The dual connectivity used for the complement of a set.
    pub fn dual(self) -> Self {
        match self {
            Connectivity::Four => Connectivity::Eight,
            Connectivity::Eight => Connectivity::Four,
        }
    }
}

const OFFSETS_4: [(isize, isize); 4] = [(0, -1), (-1, 0), (1, 0), (0, 1)];
const OFFSETS_8: [(isize, isize); 8] = [(-1, -1), (0, -1), (1, -1), (-1, 0), (1, 0), (-1, 1), (0, 1), (1, 1)];
const OFFSETS_LINE: [(isize, isize); 2] = [(-1, 0), (1, 0)];

/// A validated binary shape raster.
///
/// Invariants: at least one shape pixel, exactly one 8-connected foreground
/// component, and an all-background margin of at least one pixel (left and
/// right only for [`Lattice::Line`]).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShapeGrid {
    width: usize,
    height: usize,
    lattice: Lattice,
    mask: Vec<bool>,
    boundary: Vec<bool>,
    interior: Vec<usize>,
    slots: Vec<u32>,
}

impl ShapeGrid {
    /// Builds a planar grid from a row-major mask, adding a one-pixel margin.
    pub fn from_mask(width: usize, height: usize, mask: &[bool]) -> Result<Self> {
        check_dims(width, height, mask.len())?;
        let (pw, ph) = (width + 2, height + 2);
        let mut padded = vec![false; pw * ph];
        for y in 0..height {
            let src = &mask[y * width..(y + 1) * width];
            padded[(y + 1) * pw + 1..(y + 1) * pw + 1 + width].copy_from_slice(src);
        }
        Self::from_padded(pw, ph, Lattice::Plane, padded)
    }

    /// Builds a one-dimensional grid (an interval lattice) from a mask row.
    pub fn from_line(mask: &[bool]) -> Result<Self> {
        check_dims(mask.len(), 1, mask.len())?;
        let mut padded = vec![false; mask.len() + 2];
        padded[1..=mask.len()].copy_from_slice(mask);
        Self::from_padded(mask.len() + 2, 1, Lattice::Line, padded)
    }

    /// Validates a mask that already carries its background margin.
    pub fn from_padded(width: usize, height: usize, lattice: Lattice, mask: Vec<bool>) -> Result<Self> {
        check_dims(width, height, mask.len())?;
        if lattice == Lattice::Line && height != 1 {
            return Err(Error::InvalidDimensions(format!("a line lattice has height 1, got {height}")));
        }
        let on_edge = |p: usize| {
            let (x, y) = (p % width, p / width);
            x == 0 || x + 1 == width || (lattice == Lattice::Plane && (y == 0 || y + 1 == height))
        };
        if mask.iter().enumerate().any(|(p, &m)| m && on_edge(p)) {
            return Err(Error::InvalidDimensions(
                "shape touches the raster edge; a background margin is required".into(),
            ));
        }

        let interior: Vec<usize> = (0..mask.len()).filter(|&p| mask[p]).collect();
        if interior.is_empty() {
            return Err(Error::EmptyForeground);
        }
        let mut slots = vec![NO_SLOT; mask.len()];
        for (slot, &p) in interior.iter().enumerate() {
            slots[p] = slot as u32;
        }

        let mut grid = ShapeGrid { width, height, lattice, mask, boundary: Vec::new(), interior, slots };
        let (_, count) = grid.label_components(&grid.mask, Connectivity::Eight);
        if count > 1 {
            return Err(Error::MultipleComponents(count));
        }
        grid.boundary = (0..grid.len())
            .map(|p| !grid.mask[p] && grid.neighbors(p, Connectivity::Four).any(|q| grid.mask[q]))
            .collect();
        Ok(grid)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    /// Number of raster pixels (including background).
    pub fn len(&self) -> usize {
        self.mask.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mask.is_empty()
    }

    /// |Ω| in pixels².
    pub fn area(&self) -> usize {
        self.interior.len()
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    /// Background pixels 4-adjacent to the shape: the discrete ∂Ω on which
    /// the field is pinned to zero.
    pub fn boundary(&self) -> &[bool] {
        &self.boundary
    }

    pub fn is_interior(&self, p: usize) -> bool {
        self.mask[p]
    }

    /// Shape pixels in row-major order; position in this slice is the
    /// pixel's "slot" in interior-indexed vectors such as ω.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn interior_slot(&self, p: usize) -> Option<usize> {
        match self.slots[p] {
            NO_SLOT => None,
            s => Some(s as usize),
        }
    }

    pub fn coords(&self, p: usize) -> (usize, usize) {
        (p % self.width, p / self.width)
    }

    pub fn index(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    /// Number of lattice neighbors of every pixel under 4-connectivity,
    /// i.e. the diagonal of the discrete Laplacian.
    pub fn degree(&self) -> usize {
        match self.lattice {
            Lattice::Line => 2,
            Lattice::Plane => 4,
        }
    }

    /// In-raster neighbors of `p`. On a line lattice both connectivities
    /// reduce to left/right.
    pub fn neighbors(&self, p: usize, conn: Connectivity) -> impl Iterator<Item = usize> + '_ {
        let offsets: &'static [(isize, isize)] = match (self.lattice, conn) {
            (Lattice::Line, _) => &OFFSETS_LINE,
            (Lattice::Plane, Connectivity::Four) => &OFFSETS_4,
            (Lattice::Plane, Connectivity::Eight) => &OFFSETS_8,
        };
        let (x, y) = (p % self.width, p / self.width);
        offsets.iter().filter_map(move |&(dx, dy)| {
            let nx = x.checked_add_signed(dx)?;
            let ny = y.checked_add_signed(dy)?;
            (nx < self.width && ny < self.height).then(|| ny * self.width + nx)
        })
    }

    /// Labels the connected components of a raster-sized membership vector.
    ///
    /// Labels are assigned in row-major order of each component's first
    /// pixel; non-members get `u32::MAX`.
    pub fn label_components(&self, member: &[bool], conn: Connectivity) -> (Vec<u32>, usize) {
        let mut labels = vec![u32::MAX; member.len()];
        let mut count = 0u32;
        let mut stack = Vec::new();
        for start in 0..member.len() {
            if !member[start] || labels[start] != u32::MAX {
                continue;
            }
            labels[start] = count;
            stack.push(start);
            while let Some(p) = stack.pop() {
                for q in self.neighbors(p, conn) {
                    if member[q] && labels[q] == u32::MAX {
                        labels[q] = count;
                        stack.push(q);
                    }
                }
            }
            count += 1;
        }
        (labels, count as usize)
    }

    /// Raster-sized membership vector of a pixel list.
    pub fn membership(&self, pixels: &[usize]) -> Vec<bool> {
        let mut member = vec![false; self.len()];
        for &p in pixels {
            member[p] = true;
        }
        member
    }
}

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(Error::InvalidDimensions(format!("{width}x{height}")));
    }
    if width.checked_mul(height) != Some(len) {
        return Err(Error::InvalidDimensions(format!("mask has {len} pixels, expected {width}x{height}")));
    }
    Ok(())
}
