//! Grid fields and the finite-difference stencils the schemes are built from.
//!
//! Bulk stencil functions evaluate at every grid node (`0..n`, ghosts
//! excluded) and return a freshly allocated array in grid-node order, so the
//! field must carry enough ghost layers for the stencil's half-width.

use crate::error::{Error, Result};
use crate::grid::{UniformGrid1D, UniformGrid2D};

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField1D {
    pub grid: UniformGrid1D,
    /// Samples including ghost layers.
    pub values: Vec<f64>,
    pub time: f64,
}

impl ScalarField1D {
    pub fn zeros(grid: UniformGrid1D, time: f64) -> Self {
        let values = vec![0.0; grid.storage_len()];
        Self { grid, values, time }
    }

    /// Samples `f(x)` at every node, ghosts included.
    pub fn from_fn(grid: UniformGrid1D, time: f64, f: impl Fn(f64) -> f64) -> Self {
        let g = grid.ghost_width as isize;
        let values = (-g..grid.n as isize + g).map(|i| f(grid.x(i))).collect();
        Self { grid, values, time }
    }

    #[inline]
    pub fn get(&self, i: isize) -> f64 {
        self.values[self.grid.offset(i)]
    }

    #[inline]
    pub fn set(&mut self, i: isize, v: f64) {
        let k = self.grid.offset(i);
        self.values[k] = v;
    }

    /// Values at grid nodes `0..n`.
    pub fn nodes(&self) -> &[f64] {
        let g = self.grid.ghost_width;
        &self.values[g..g + self.grid.n]
    }

    pub fn nodes_mut(&mut self) -> &mut [f64] {
        let g = self.grid.ghost_width;
        &mut self.values[g..g + self.grid.n]
    }

    fn require_ghosts(&self, needed: usize) -> Result<()> {
        if self.grid.ghost_width < needed {
            Err(Error::InsufficientGhost { needed, have: self.grid.ghost_width })
        } else {
            Ok(())
        }
    }

    fn map_nodes(&self, needed: usize, f: impl Fn(&[f64]) -> f64) -> Result<Vec<f64>> {
        self.require_ghosts(needed)?;
        let g = self.grid.ghost_width;
        Ok((0..self.grid.n).map(|i| f(&self.values[g + i - needed..=g + i + needed])).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField2D {
    pub grid: UniformGrid2D,
    pub values: Vec<f64>,
    pub time: f64,
}

impl ScalarField2D {
    pub fn zeros(grid: UniformGrid2D, time: f64) -> Self {
        let values = vec![0.0; grid.storage_len()];
        Self { grid, values, time }
    }

    pub fn from_fn(grid: UniformGrid2D, time: f64, f: impl Fn(f64, f64) -> f64) -> Self {
        let g = grid.ghost_width as isize;
        let mut values = Vec::with_capacity(grid.storage_len());
        for j in -g..grid.ny as isize + g {
            for i in -g..grid.nx as isize + g {
                values.push(f(grid.x(i), grid.y(j)));
            }
        }
        Self { grid, values, time }
    }

    #[inline]
    pub fn get(&self, i: isize, j: isize) -> f64 {
        self.values[self.grid.offset(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: isize, j: isize, v: f64) {
        let k = self.grid.offset(i, j);
        self.values[k] = v;
    }

    /// Grid-node values (ghosts excluded) in row-major order, `j * nx + i`.
    pub fn nodes(&self) -> Vec<f64> {
        let g = &self.grid;
        let mut out = Vec::with_capacity(g.nx * g.ny);
        for j in 0..g.ny as isize {
            let start = g.offset(0, j);
            out.extend_from_slice(&self.values[start..start + g.nx]);
        }
        out
    }

    fn require_ghosts(&self, needed: usize) -> Result<()> {
        if self.grid.ghost_width < needed {
            Err(Error::InsufficientGhost { needed, have: self.grid.ghost_width })
        } else {
            Ok(())
        }
    }

    fn map_nodes(&self, f: impl Fn(isize, isize) -> f64) -> Result<Vec<f64>> {
        self.require_ghosts(1)?;
        let g = &self.grid;
        let mut out = Vec::with_capacity(g.nx * g.ny);
        for j in 0..g.ny as isize {
            for i in 0..g.nx as isize {
                out.push(f(i, j));
            }
        }
        Ok(out)
    }
}

/// Direction the flow comes from along one axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Wind {
    Positive,
    Negative,
}

impl Wind {
    pub fn of(speed: f64) -> Self {
        if speed >= 0.0 { Wind::Positive } else { Wind::Negative }
    }

    #[inline]
    pub fn sign(self) -> isize {
        match self {
            Wind::Positive => 1,
            Wind::Negative => -1,
        }
    }
}

/// `(u[j+1] - 2u[j] + u[j-1]) / dx^2`.
pub fn laplacian_1d_c2(field: &ScalarField1D) -> Result<Vec<f64>> {
    let inv = 1.0 / (field.grid.dx * field.grid.dx);
    field.map_nodes(1, |w| (w[2] - 2.0 * w[1] + w[0]) * inv)
}

/// First-order upwind difference.
pub fn gradient_upwind_1d(field: &ScalarField1D, wind: Wind) -> Result<Vec<f64>> {
    let inv = 1.0 / field.grid.dx;
    field.map_nodes(1, |w| match wind {
        Wind::Positive => (w[1] - w[0]) * inv,
        Wind::Negative => (w[2] - w[1]) * inv,
    })
}

/// `(u[j+1] - u[j-1]) / (2 dx)`.
pub fn gradient_central_1d(field: &ScalarField1D) -> Result<Vec<f64>> {
    let inv = 0.5 / field.grid.dx;
    field.map_nodes(1, |w| (w[2] - w[0]) * inv)
}

/// Seven-point fourth-order approximation of `u_xxxx`; leading error `-(7 dx^4 / 240) u^(8)`.
pub fn bilaplacian_1d_o4(field: &ScalarField1D) -> Result<Vec<f64>> {
    let dx2 = field.grid.dx * field.grid.dx;
    let inv = 1.0 / (6.0 * dx2 * dx2);
    field.map_nodes(3, |w| {
        (-w[6] + 12.0 * w[5] - 39.0 * w[4] + 56.0 * w[3] - 39.0 * w[2] + 12.0 * w[1] - w[0]) * inv
    })
}

/// Five-point second-order approximation of `u_xxxx`.
pub fn bilaplacian_1d_o2(field: &ScalarField1D) -> Result<Vec<f64>> {
    let dx2 = field.grid.dx * field.grid.dx;
    let inv = 1.0 / (dx2 * dx2);
    field.map_nodes(2, |w| (w[4] - 4.0 * w[3] + 6.0 * w[2] - 4.0 * w[1] + w[0]) * inv)
}

pub const BILAPLACIAN_O4_WEIGHTS: [f64; 7] = [-1.0, 12.0, -39.0, 56.0, -39.0, 12.0, -1.0];
pub const BILAPLACIAN_O2_WEIGHTS: [f64; 5] = [1.0, -4.0, 6.0, -4.0, 1.0];

#[inline]
pub fn laplacian_5pt_at(f: &ScalarField2D, i: isize, j: isize) -> f64 {
    let h2 = f.grid.dx * f.grid.dx;
    (f.get(i + 1, j) + f.get(i - 1, j) + f.get(i, j + 1) + f.get(i, j - 1) - 4.0 * f.get(i, j)) / h2
}

#[inline]
pub fn laplacian_9pt_at(f: &ScalarField2D, i: isize, j: isize) -> f64 {
    let h2 = f.grid.dx * f.grid.dx;
    let corners = f.get(i + 1, j + 1) + f.get(i + 1, j - 1) + f.get(i - 1, j + 1) + f.get(i - 1, j - 1);
    let edges = f.get(i + 1, j) + f.get(i - 1, j) + f.get(i, j + 1) + f.get(i, j - 1);
    (corners + 4.0 * edges - 20.0 * f.get(i, j)) / (6.0 * h2)
}

/// Central second-order approximation of `u_xxyy`.
#[inline]
pub fn mixed_xxyy_at(f: &ScalarField2D, i: isize, j: isize) -> f64 {
    let (dx2, dy2) = (f.grid.dx * f.grid.dx, f.grid.dy * f.grid.dy);
    let corners = f.get(i + 1, j + 1) + f.get(i + 1, j - 1) + f.get(i - 1, j + 1) + f.get(i - 1, j - 1);
    let edges = f.get(i + 1, j) + f.get(i - 1, j) + f.get(i, j + 1) + f.get(i, j - 1);
    (corners - 2.0 * edges + 4.0 * f.get(i, j)) / (dx2 * dy2)
}

/// Upwind approximation of `u_xy` built from the cell on the upwind side in both axes.
#[inline]
pub fn mixed_xy_upwind_at(f: &ScalarField2D, i: isize, j: isize, (wx, wy): (Wind, Wind)) -> f64 {
    let (sx, sy) = (wx.sign(), wy.sign());
    let d = f.get(i, j) - f.get(i - sx, j) - f.get(i, j - sy) + f.get(i - sx, j - sy);
    (sx * sy) as f64 * d / (f.grid.dx * f.grid.dy)
}

pub fn laplacian_2d_5pt(field: &ScalarField2D) -> Result<Vec<f64>> {
    field.grid.require_square()?;
    field.map_nodes(|i, j| laplacian_5pt_at(field, i, j))
}

/// Nine-point Laplacian whose leading error is isotropic: `(dx^2 / 12) lap^2 u`.
pub fn laplacian_2d_9pt(field: &ScalarField2D) -> Result<Vec<f64>> {
    field.grid.require_square()?;
    field.map_nodes(|i, j| laplacian_9pt_at(field, i, j))
}

pub fn mixed_xxyy_central(field: &ScalarField2D) -> Result<Vec<f64>> {
    field.map_nodes(|i, j| mixed_xxyy_at(field, i, j))
}

pub fn mixed_xy_upwind(field: &ScalarField2D, winds: (Wind, Wind)) -> Result<Vec<f64>> {
    field.map_nodes(|i, j| mixed_xy_upwind_at(field, i, j, winds))
}
