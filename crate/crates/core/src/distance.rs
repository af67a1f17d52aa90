//! Exact Euclidean distance transform of the shape interior.

use alloc::vec;
use alloc::vec::Vec;

use crate::grid::{Lattice, ShapeGrid};

/// Distance from every pixel to the nearest background pixel center.
///
/// Background pixels (including ∂Ω) have value 0; a lone shape pixel has
/// value 1.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceField {
    grid: ShapeGrid,
    values: Vec<f64>,
}

impl DistanceField {
    /// Wraps raw per-pixel values. Values on background pixels are forced to 0.
    pub fn from_values(grid: ShapeGrid, mut values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len(), "distance values must cover the raster");
        for (v, &m) in values.iter_mut().zip(grid.mask()) {
            if !m {
                *v = 0.0;
            }
        }
        DistanceField { grid, values }
    }

    pub fn grid(&self) -> &ShapeGrid {
        &self.grid
    }

    /// Per-pixel values over the whole raster, row-major.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at(&self, p: usize) -> f64 {
        self.values[p]
    }

    /// Values on the interior, in slot order.
    pub fn interior_values(&self) -> Vec<f64> {
        self.grid.interior().iter().map(|&p| self.values[p]).collect()
    }

    /// `alpha · f`, used to probe linearity of downstream stages.
    pub fn scaled(&self, alpha: f64) -> Self {
        DistanceField { grid: self.grid.clone(), values: self.values.iter().map(|v| v * alpha).collect() }
    }
}

/// Exact Euclidean distance transform by two separable passes of the
/// lower-envelope-of-parabolas algorithm. Squared distances are integers and
/// are computed exactly; only the final square root rounds.
pub fn distance_transform(shape: &ShapeGrid) -> DistanceField {
    let (w, h) = (shape.width(), shape.height());
    let mask = shape.mask();
    let inf = f64::INFINITY;

    // squared distance to the nearest background pixel within each column
    let mut column = vec![inf; w * h];
    match shape.lattice() {
        Lattice::Line => {
            for p in 0..w {
                if !mask[p] {
                    column[p] = 0.0;
                }
            }
        }
        Lattice::Plane => {
            for x in 0..w {
                let mut last: Option<usize> = None;
                for y in 0..h {
                    let p = y * w + x;
                    if !mask[p] {
                        last = Some(y);
                    }
                    if let Some(ly) = last {
                        column[p] = ((y - ly) * (y - ly)) as f64;
                    }
                }
                last = None;
                for y in (0..h).rev() {
                    let p = y * w + x;
                    if !mask[p] {
                        last = Some(y);
                    }
                    if let Some(ly) = last {
                        let d = ((ly - y) * (ly - y)) as f64;
                        if d < column[p] {
                            column[p] = d;
                        }
                    }
                }
            }
        }
    }

    let mut values = vec![0.0; w * h];
    let mut row_out = vec![0.0; w];
    let mut env = Envelope::with_capacity(w);
    for y in 0..h {
        env.transform(&column[y * w..(y + 1) * w], &mut row_out);
        for (x, &d) in row_out.iter().enumerate() {
            let p = y * w + x;
            values[p] = if mask[p] { libm::sqrt(d) } else { 0.0 };
        }
    }
    DistanceField { grid: shape.clone(), values }
}

/// Scratch space for the 1-D squared-distance transform
/// `out[q] = min_p (q - p)² + f[p]`.
struct Envelope {
    vertices: Vec<usize>,
    bounds: Vec<f64>,
}

impl Envelope {
    fn with_capacity(n: usize) -> Self {
        Envelope { vertices: Vec::with_capacity(n), bounds: Vec::with_capacity(n + 1) }
    }

    fn transform(&mut self, f: &[f64], out: &mut [f64]) {
        self.vertices.clear();
        self.bounds.clear();
        for q in 0..f.len() {
            if !f[q].is_finite() {
                continue;
            }
            loop {
                let Some(&v) = self.vertices.last() else {
                    self.vertices.push(q);
                    self.bounds.push(f64::NEG_INFINITY);
                    break;
                };
                let s = intersect(f, v, q);
                if s <= *self.bounds.last().expect("one bound per vertex") {
                    self.vertices.pop();
                    self.bounds.pop();
                } else {
                    self.vertices.push(q);
                    self.bounds.push(s);
                    break;
                }
            }
        }
        if self.vertices.is_empty() {
            out.iter_mut().for_each(|o| *o = f64::INFINITY);
            return;
        }
        let mut k = 0;
        for (q, o) in out.iter_mut().enumerate() {
            while k + 1 < self.vertices.len() && self.bounds[k + 1] < q as f64 {
                k += 1;
            }
            let v = self.vertices[k];
            let d = q as f64 - v as f64;
            *o = d * d + f[v];
        }
    }
}

/// Abscissa where the parabolas rooted at `p < q` intersect.
fn intersect(f: &[f64], p: usize, q: usize) -> f64 {
    let (pf, qf) = (p as f64, q as f64);
    ((f[q] + qf * qf) - (f[p] + pf * pf)) / (2.0 * (qf - pf))
}
