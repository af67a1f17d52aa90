//! Minimizer of the non-local screened Dirichlet energy
//!
//! ```text
//! E(ω) = Σ_Ω (1/ρ)(ω − f)² + ρ (|∇ω|² + (mean_Ω ω)²),   ω = 0 on ∂Ω
//! ```
//!
//! discretized with unit spacing and the 5-point (3-point on a line)
//! Laplacian. Its Euler–Lagrange system
//!
//! ```text
//! (1/ρ²)(ω − f) − Δω + mean(ω) = 0
//! ```
//!
//! is a screened Laplacian plus a positive rank-one term, hence symmetric
//! positive definite, and is solved by conjugate gradients with the rank-one
//! term applied matrix-free.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::distance::DistanceField;
use crate::error::{Error, Result};
use crate::grid::{Connectivity, ShapeGrid};

/// How ρ is chosen for a shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RhoPolicy {
    Explicit(f64),
    /// `c · sqrt(|Ω|)` with `c ≥ 1`.
    SqrtAreaMultiple(f64),
}

impl Default for RhoPolicy {
    fn default() -> Self {
        RhoPolicy::SqrtAreaMultiple(1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    pub rho_policy: RhoPolicy,
    /// Relative residual `‖Aω − b‖ / ‖b‖` at which CG stops.
    pub tol: f64,
    /// Iteration cap; `None` means `max(20·√N, 2N)` for N unknowns.
    pub max_iter: Option<usize>,
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams { rho_policy: RhoPolicy::default(), tol: 1e-10, max_iter: None }
    }
}

impl SolverParams {
    pub fn with_rho(rho: f64) -> Self {
        SolverParams { rho_policy: RhoPolicy::Explicit(rho), ..Self::default() }
    }

    pub fn resolve_rho(&self, grid: &ShapeGrid) -> Result<f64> {
        match self.rho_policy {
            RhoPolicy::Explicit(rho) if rho > 0.0 && rho.is_finite() => Ok(rho),
            RhoPolicy::Explicit(rho) => Err(Error::InvalidParameter(format!("rho must be positive, got {rho}"))),
            RhoPolicy::SqrtAreaMultiple(c) => default_rho(grid, c),
        }
    }

    pub fn iteration_cap(&self, unknowns: usize) -> usize {
        self.max_iter.unwrap_or_else(|| {
            let by_sqrt = libm::ceil(20.0 * libm::sqrt(unknowns as f64)) as usize;
            by_sqrt.max(2 * unknowns)
        })
    }
}

/// `c · sqrt(|Ω|)`.
pub fn default_rho(shape: &ShapeGrid, c: f64) -> Result<f64> {
    if !(c >= 1.0) || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("rho multiple must be >= 1, got {c}")));
    }
    Ok(c * libm::sqrt(shape.area() as f64))
}

/// The solved field ω, stored on interior pixels only (ω = 0 elsewhere).
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: ShapeGrid,
    omega: Vec<f64>,
    rho: f64,
    mean_value: f64,
    residual: f64,
    iterations: usize,
}

impl Field {
    /// Reassembles a field from stored parts; the mean is recomputed.
    pub fn from_parts(grid: ShapeGrid, omega: Vec<f64>, rho: f64, residual: f64, iterations: usize) -> Result<Self> {
        if omega.len() != grid.area() {
            return Err(Error::GridMismatch(format!("{} values for {} interior pixels", omega.len(), grid.area())));
        }
        let mean_value = mean(&omega);
        Ok(Field { grid, omega, rho, mean_value, residual, iterations })
    }

    pub fn grid(&self) -> &ShapeGrid {
        &self.grid
    }

    /// ω on interior pixels, in slot order.
    pub fn omega(&self) -> &[f64] {
        &self.omega
    }

    /// ω at raster pixel `p`; zero off the shape.
    pub fn at(&self, p: usize) -> f64 {
        self.grid.interior_slot(p).map_or(0.0, |s| self.omega[s])
    }

    /// ω over the whole raster, row-major.
    pub fn raster(&self) -> Vec<f64> {
        (0..self.grid.len()).map(|p| self.at(p)).collect()
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn mean_value(&self) -> f64 {
        self.mean_value
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn max_abs(&self) -> f64 {
        self.omega.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// True when ρ is below the recommended `sqrt(|Ω|)`.
    pub fn rho_below_recommended(&self) -> bool {
        self.rho < libm::sqrt(self.grid.area() as f64)
    }

    /// `alpha · ω` with the same metadata.
    pub fn scaled(&self, alpha: f64) -> Field {
        let omega: Vec<f64> = self.omega.iter().map(|v| v * alpha).collect();
        Field { mean_value: mean(&omega), omega, grid: self.grid.clone(), ..*self }
    }
}

fn mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The SPD operator `A = (1/ρ²) I − Δ + (1/N) 1 1ᵀ` on interior unknowns.
#[derive(Debug, Clone)]
pub struct ScreenedOperator {
    diagonal: f64,
    neighbors: Vec<Vec<u32>>,
}

impl ScreenedOperator {
    pub fn new(grid: &ShapeGrid, rho: f64) -> Self {
        let neighbors = grid
            .interior()
            .iter()
            .map(|&p| {
                grid.neighbors(p, Connectivity::Four).filter_map(|q| grid.interior_slot(q).map(|s| s as u32)).collect()
            })
            .collect();
        ScreenedOperator { diagonal: 1.0 / (rho * rho) + grid.degree() as f64, neighbors }
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    /// `out = A x`.
    pub fn apply(&self, x: &[f64], out: &mut [f64]) {
        let m = mean(x);
        for (i, nbrs) in self.neighbors.iter().enumerate() {
            let coupled: f64 = nbrs.iter().map(|&j| x[j as usize]).sum();
            out[i] = self.diagonal * x[i] - coupled + m;
        }
    }
}

/// Solves for the unique minimizer by conjugate gradients.
///
/// The recursively updated residual is verified against the true residual
/// on exit; if rounding left the true residual above `tol`, CG restarts
/// from the current iterate until the iteration cap.
pub fn solve(f: &DistanceField, params: &SolverParams) -> Result<Field> {
    let grid = f.grid();
    let rho = params.resolve_rho(grid)?;
    if !(params.tol > 0.0) {
        return Err(Error::InvalidParameter(format!("tol must be positive, got {}", params.tol)));
    }
    let op = ScreenedOperator::new(grid, rho);
    let n = op.len();
    let b: Vec<f64> = f.interior_values().iter().map(|v| v / (rho * rho)).collect();
    let b_norm = libm::sqrt(dot(&b, &b));
    let mut x = vec![0.0; n];
    if b_norm == 0.0 {
        return Field::from_parts(grid.clone(), x, rho, 0.0, 0);
    }
    let cap = params.iteration_cap(n);
    let target = params.tol * b_norm;

    let mut r = b.clone();
    let mut ap = vec![0.0; n];
    let mut iterations = 0;
    loop {
        let mut p = r.clone();
        let mut rr = dot(&r, &r);
        while libm::sqrt(rr) > target && iterations < cap {
            op.apply(&p, &mut ap);
            let alpha = rr / dot(&p, &ap);
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rr_next = dot(&r, &r);
            let beta = rr_next / rr;
            for i in 0..n {
                p[i] = r[i] + beta * p[i];
            }
            rr = rr_next;
            iterations += 1;
        }
        op.apply(&x, &mut ap);
        for i in 0..n {
            r[i] = b[i] - ap[i];
        }
        let residual = libm::sqrt(dot(&r, &r)) / b_norm;
        if residual <= params.tol {
            return Field::from_parts(grid.clone(), x, rho, residual, iterations);
        }
        if iterations >= cap {
            return Err(Error::NonConvergence { residual, iterations });
        }
    }
}

/// Discrete energy of an interior-indexed ω against interior values of f.
pub fn energy_of(grid: &ShapeGrid, omega: &[f64], f: &[f64], rho: f64) -> f64 {
    let data: f64 = omega.iter().zip(f).map(|(w, f)| (w - f) * (w - f)).sum();
    let mut gradient = 0.0;
    for (slot, &p) in grid.interior().iter().enumerate() {
        for q in grid.neighbors(p, Connectivity::Four) {
            match grid.interior_slot(q) {
                Some(t) if q > p => gradient += (omega[slot] - omega[t]) * (omega[slot] - omega[t]),
                Some(_) => {}
                None => gradient += omega[slot] * omega[slot],
            }
        }
    }
    let m = mean(omega);
    data / rho + rho * (gradient + omega.len() as f64 * m * m)
}

/// `A ω − b`, equal to `∇E(ω) / (2ρ)`.
pub fn euler_lagrange_residual(grid: &ShapeGrid, omega: &[f64], f: &[f64], rho: f64) -> Vec<f64> {
    let op = ScreenedOperator::new(grid, rho);
    let mut out = vec![0.0; omega.len()];
    op.apply(omega, &mut out);
    for (o, fv) in out.iter_mut().zip(f) {
        *o -= fv / (rho * rho);
    }
    out
}

/// Energy of a solved field against the distance field it came from.
pub fn energy(field: &Field, f: &DistanceField) -> Result<f64> {
    if field.grid() != f.grid() {
        return Err(Error::GridMismatch("field and distance transform differ in shape".into()));
    }
    Ok(energy_of(field.grid(), field.omega(), &f.interior_values(), field.rho()))
}
