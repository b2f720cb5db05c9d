//! Uniform periodic mesh on (0, L)^2 and the second-order finite difference
//! operators acting on periodic grid functions.
//!
//! Fields are stored row-major: `values[i * M + j]` holds `u(x_i, y_j)` with
//! `x_i = i h`, `y_j = j h`. All index arithmetic wraps modulo `M`.

use crate::error::{Error, Result};

/// Uniform periodic mesh with `M` points per side over a square of side `L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    length: f64,
    points: usize,
    spacing: f64,
}

impl Grid {
    pub fn new(length: f64, points: usize) -> Result<Self> {
        if points == 0 {
            return Err(Error::InvalidGrid("M must be at least 1".into()));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!("L must be positive, got {length}")));
        }
        Ok(Grid {
            length,
            points,
            spacing: length / points as f64,
        })
    }

    /// Side length `L`.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// Points per side `M`.
    pub fn points(&self) -> usize {
        self.points
    }

    /// Mesh spacing `h = L / M`.
    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Domain area `L^2`.
    pub fn area(&self) -> f64 {
        self.length * self.length
    }

    /// Total number of mesh points `M^2`.
    pub fn len(&self) -> usize {
        self.points * self.points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of mesh index `i` along either axis.
    pub fn coord(&self, i: usize) -> f64 {
        i as f64 * self.spacing
    }

    #[inline]
    pub(crate) fn idx(&self, i: usize, j: usize) -> usize {
        i * self.points + j
    }
}

/// Real-valued periodic grid function.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, value: f64) -> Self {
        Field {
            grid,
            values: vec![value; grid.len()],
        }
    }

    pub fn from_vec(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "expected {} values, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Field { grid, values })
    }

    /// Samples `f(x_i, y_j)` on every mesh point.
    pub fn from_fn(grid: Grid, f: impl Fn(f64, f64) -> f64) -> Self {
        let m = grid.points();
        let mut values = Vec::with_capacity(grid.len());
        for i in 0..m {
            for j in 0..m {
                values.push(f(grid.coord(i), grid.coord(j)));
            }
        }
        Field { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    /// Value at `(i, j)` with periodic wrap.
    pub fn at(&self, i: isize, j: isize) -> f64 {
        let m = self.grid.points() as isize;
        let i = i.rem_euclid(m) as usize;
        let j = j.rem_euclid(m) as usize;
        self.values[self.grid.idx(i, j)]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Pointwise `f(self, other)`. Panics if the grids differ in size.
    pub fn zip_map(&self, other: &Field, f: impl Fn(f64, f64) -> f64) -> Field {
        assert_eq!(self.values.len(), other.values.len(), "field size mismatch");
        Field {
            grid: self.grid,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    /// Cyclic shift so that `out[i][j] = self[i - di][j - dj]`.
    pub fn shifted(&self, di: isize, dj: isize) -> Field {
        let m = self.grid.points();
        let mut out = Field::zeros(self.grid);
        for i in 0..m {
            for j in 0..m {
                out.values[self.grid.idx(i, j)] = self.at(i as isize - di, j as isize - dj);
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    /// Spatially constant up to `tol` in max-norm around the mean of the
    /// extremes; returns that value.
    pub fn constant_value(&self, tol: f64) -> Option<f64> {
        let (lo, hi) = self
            .values
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            });
        if hi - lo <= 2.0 * tol {
            Some(0.5 * (lo + hi))
        } else {
            None
        }
    }
}

/// Forward-difference gradient of a field.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub x: Field,
    pub y: Field,
}

fn check_same(a: &Grid, b: &Grid) -> Result<()> {
    if a.points() != b.points() || a.length() != b.length() {
        return Err(Error::GridMismatch(format!(
            "M={} L={} vs M={} L={}",
            a.points(),
            a.length(),
            b.points(),
            b.length()
        )));
    }
    Ok(())
}

/// Five-point periodic Laplacian.
pub fn laplacian(v: &Field) -> Field {
    let mut out = Field::zeros(v.grid);
    laplacian_into(v, &mut out);
    out
}

/// Five-point periodic Laplacian written into `out`.
pub fn laplacian_into(v: &Field, out: &mut Field) {
    let grid = v.grid;
    let m = grid.points();
    let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    let src = &v.values;
    let dst = &mut out.values;
    for i in 0..m {
        let ip = if i + 1 == m { 0 } else { i + 1 };
        let im = if i == 0 { m - 1 } else { i - 1 };
        for j in 0..m {
            let jp = if j + 1 == m { 0 } else { j + 1 };
            let jm = if j == 0 { m - 1 } else { j - 1 };
            let c = src[i * m + j];
            dst[i * m + j] = (src[ip * m + j] + src[im * m + j] + src[i * m + jp]
                + src[i * m + jm]
                - 4.0 * c)
                * inv_h2;
        }
    }
}

pub fn gradient(v: &Field) -> VectorField {
    let grid = v.grid;
    let m = grid.points();
    let inv_h = 1.0 / grid.spacing();
    let mut gx = Field::zeros(grid);
    let mut gy = Field::zeros(grid);
    for i in 0..m {
        let ip = (i + 1) % m;
        for j in 0..m {
            let jp = (j + 1) % m;
            let c = v.values[i * m + j];
            gx.values[i * m + j] = (v.values[ip * m + j] - c) * inv_h;
            gy.values[i * m + j] = (v.values[i * m + jp] - c) * inv_h;
        }
    }
    VectorField { x: gx, y: gy }
}

/// Discrete inner product `h^2 sum v_ij w_ij`.
pub fn inner(v: &Field, w: &Field) -> Result<f64> {
    check_same(&v.grid, &w.grid)?;
    Ok(inner_unchecked(v, w))
}

pub(crate) fn inner_unchecked(v: &Field, w: &Field) -> f64 {
    let h = v.grid.spacing();
    h * h * v.values.iter().zip(&w.values).map(|(a, b)| a * b).sum::<f64>()
}

/// `h^2 sum v_ij`, the inner product against the constant field 1.
pub fn integral(v: &Field) -> f64 {
    let h = v.grid.spacing();
    h * h * v.values.iter().sum::<f64>()
}

pub fn inner_vector(v: &VectorField, w: &VectorField) -> Result<f64> {
    Ok(inner(&v.x, &w.x)? + inner(&v.y, &w.y)?)
}

pub fn norm2(v: &Field) -> f64 {
    inner_unchecked(v, v).sqrt()
}

/// Max-norm; NaN entries propagate.
pub fn norm_inf(v: &Field) -> f64 {
    v.values.iter().fold(0.0_f64, |acc, &x| {
        if x.is_nan() || acc.is_nan() {
            f64::NAN
        } else {
            acc.max(x.abs())
        }
    })
}

/// `||grad_h v||^2`, evaluated as `-<v, lap_h v>`.
pub fn grad_norm_sq(v: &Field) -> f64 {
    -inner_unchecked(v, &laplacian(v))
}
