//! Solves `(a I - eps2 lap_h) u = rhs` on the periodic grid.
//!
//! The five-point Laplacian is diagonalized by the 2D DFT with eigenvalues
//! `lambda_kl = -(4/h^2) (sin^2(pi k/M) + sin^2(pi l/M))`, so each solve is a
//! forward transform, a pointwise division and an inverse transform.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{Field, Grid};

/// Largest grid accepted by [`helmholtz_solve_dense`].
pub const DENSE_MAX_POINTS: usize = 32;

/// FFT plans and work buffers for repeated Helmholtz solves on one grid.
///
/// Not shareable mid-solve; give each thread its own.
pub struct HelmholtzSolver {
    grid: Grid,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    eig: Vec<f64>,
    buf: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

impl std::fmt::Debug for HelmholtzSolver {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HelmholtzSolver")
            .field("grid", &self.grid)
            .finish_non_exhaustive()
    }
}

impl HelmholtzSolver {
    pub fn new(grid: Grid) -> Self {
        let m = grid.points();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(m);
        let inverse = planner.plan_fft_inverse(m);
        let h = grid.spacing();
        let eig = (0..m)
            .map(|k| {
                let s = (PI * k as f64 / m as f64).sin();
                -4.0 / (h * h) * s * s
            })
            .collect();
        let scratch_len = forward
            .get_inplace_scratch_len()
            .max(inverse.get_inplace_scratch_len());
        HelmholtzSolver {
            grid,
            forward,
            inverse,
            eig,
            buf: vec![Complex64::new(0.0, 0.0); grid.len()],
            scratch: vec![Complex64::new(0.0, 0.0); scratch_len],
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// One-dimensional Laplacian eigenvalues `-(4/h^2) sin^2(pi k / M)`.
    pub fn eigenvalues_1d(&self) -> &[f64] {
        &self.eig
    }

    fn validate(&self, a: f64, eps2: f64, rhs: &Field) -> Result<()> {
        if !(a > 0.0) || !a.is_finite() {
            return Err(Error::InvalidArgument(format!("shift a must be positive, got {a}")));
        }
        if !(eps2 >= 0.0) || !eps2.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "diffusion coefficient must be nonnegative, got {eps2}"
            )));
        }
        if rhs.grid().points() != self.grid.points() {
            return Err(Error::GridMismatch(format!(
                "solver M={}, rhs M={}",
                self.grid.points(),
                rhs.grid().points()
            )));
        }
        if !rhs.is_finite() {
            return Err(Error::InvalidArgument("right-hand side is not finite".into()));
        }
        Ok(())
    }

    pub fn solve(&mut self, a: f64, eps2: f64, rhs: &Field) -> Result<Field> {
        let mut out = Field::zeros(*rhs.grid());
        self.solve_into(a, eps2, rhs, &mut out)?;
        Ok(out)
    }

    pub fn solve_into(&mut self, a: f64, eps2: f64, rhs: &Field, out: &mut Field) -> Result<()> {
        self.validate(a, eps2, rhs)?;
        for (b, &r) in self.buf.iter_mut().zip(rhs.values()) {
            *b = Complex64::new(r, 0.0);
        }
        self.apply_inverse(a, eps2);
        for (o, b) in out.values_mut().iter_mut().zip(&self.buf) {
            *o = b.re;
        }
        Ok(())
    }

    /// Two solves with the same operator in one complex transform.
    ///
    /// The symbol is real and even, so real and imaginary parts decouple.
    pub fn solve_pair(
        &mut self,
        a: f64,
        eps2: f64,
        rhs1: &Field,
        rhs2: &Field,
    ) -> Result<(Field, Field)> {
        self.validate(a, eps2, rhs1)?;
        self.validate(a, eps2, rhs2)?;
        for ((b, &r1), &r2) in self.buf.iter_mut().zip(rhs1.values()).zip(rhs2.values()) {
            *b = Complex64::new(r1, r2);
        }
        self.apply_inverse(a, eps2);
        let mut out1 = Field::zeros(self.grid);
        let mut out2 = Field::zeros(self.grid);
        for ((o1, o2), b) in out1
            .values_mut()
            .iter_mut()
            .zip(out2.values_mut().iter_mut())
            .zip(&self.buf)
        {
            *o1 = b.re;
            *o2 = b.im;
        }
        Ok((out1, out2))
    }

    fn apply_inverse(&mut self, a: f64, eps2: f64) {
        let m = self.grid.points();
        self.forward.process_with_scratch(&mut self.buf, &mut self.scratch);
        transpose(&mut self.buf, m);
        self.forward.process_with_scratch(&mut self.buf, &mut self.scratch);
        // Layout is now [l][k]; the symbol is symmetric in (k, l).
        let norm = 1.0 / (m * m) as f64;
        for l in 0..m {
            for k in 0..m {
                let denom = a - eps2 * (self.eig[k] + self.eig[l]);
                self.buf[l * m + k] *= norm / denom;
            }
        }
        self.inverse.process_with_scratch(&mut self.buf, &mut self.scratch);
        transpose(&mut self.buf, m);
        self.inverse.process_with_scratch(&mut self.buf, &mut self.scratch);
    }
}

fn transpose(buf: &mut [Complex64], m: usize) {
    for i in 0..m {
        for j in (i + 1)..m {
            buf.swap(i * m + j, j * m + i);
        }
    }
}

/// One-shot FFT solve of `(a I - eps2 lap_h) u = rhs`.
pub fn helmholtz_solve(grid: Grid, a: f64, eps2: f64, rhs: &Field) -> Result<Field> {
    HelmholtzSolver::new(grid).solve(a, eps2, rhs)
}

/// Assembles `a I - eps2 lap_h` as a dense `M^2 x M^2` matrix.
pub fn helmholtz_matrix(grid: Grid, a: f64, eps2: f64) -> DMatrix<f64> {
    let m = grid.points();
    let n = grid.len();
    let inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
    let mut mat = DMatrix::<f64>::zeros(n, n);
    for i in 0..m {
        for j in 0..m {
            let row = grid.idx(i, j);
            mat[(row, row)] += a + 4.0 * eps2 * inv_h2;
            for (ni, nj) in [
                ((i + 1) % m, j),
                ((i + m - 1) % m, j),
                (i, (j + 1) % m),
                (i, (j + m - 1) % m),
            ] {
                mat[(row, grid.idx(ni, nj))] -= eps2 * inv_h2;
            }
        }
    }
    mat
}

/// Dense LU solve of the same system. Test oracle only; refuses `M > 32`.
pub fn helmholtz_solve_dense(grid: Grid, a: f64, eps2: f64, rhs: &Field) -> Result<Field> {
    if grid.points() > DENSE_MAX_POINTS {
        return Err(Error::DenseTooLarge(grid.points()));
    }
    if !(a > 0.0) {
        return Err(Error::InvalidArgument(format!("shift a must be positive, got {a}")));
    }
    if rhs.grid().points() != grid.points() {
        return Err(Error::GridMismatch("rhs does not live on the given grid".into()));
    }
    let mat = helmholtz_matrix(grid, a, eps2);
    let b = DVector::from_column_slice(rhs.values());
    let x = mat.lu().solve(&b).ok_or(Error::Singular)?;
    Field::from_vec(grid, x.as_slice().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{laplacian, norm_inf};

    #[test]
    fn constant_rhs_divides_by_shift() {
        for m in [1, 2, 3, 8] {
            let g = Grid::new(1.0, m).unwrap();
            let u = helmholtz_solve(g, 2.5, 0.3, &Field::constant(g, 1.5)).unwrap();
            assert!(u.values().iter().all(|v| (v - 0.6).abs() < 1e-14));
            let d = helmholtz_solve_dense(g, 2.5, 0.3, &Field::constant(g, 1.5)).unwrap();
            assert!(d.values().iter().all(|v| (v - 0.6).abs() < 1e-14));
        }
    }

    #[test]
    fn eigenfield_m4() {
        let g = Grid::new(1.0, 4).unwrap();
        let rhs = Field::from_fn(g, |x, _| (2.0 * PI * x).sin());
        let u = helmholtz_solve(g, 1.0, 1.0, &rhs).unwrap();
        for (a, b) in u.values().iter().zip(rhs.values()) {
            assert!((a - b / 33.0).abs() < 1e-15);
        }
    }

    #[test]
    fn m1_dense_is_division() {
        let g = Grid::new(1.0, 1).unwrap();
        let u = helmholtz_solve_dense(g, 4.0, 7.0, &Field::constant(g, 2.0)).unwrap();
        assert_eq!(u.values(), &[0.5]);
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = Grid::new(1.0, 4).unwrap();
        let rhs = Field::constant(g, 1.0);
        assert!(helmholtz_solve(g, 0.0, 1.0, &rhs).is_err());
        assert!(helmholtz_solve(g, -1.0, 1.0, &rhs).is_err());
        let mut bad = rhs.clone();
        bad.values_mut()[3] = f64::NAN;
        assert!(helmholtz_solve(g, 1.0, 1.0, &bad).is_err());
        let big = Grid::new(1.0, 33).unwrap();
        assert!(matches!(
            helmholtz_solve_dense(big, 1.0, 1.0, &Field::zeros(big)),
            Err(Error::DenseTooLarge(33))
        ));
    }

    #[test]
    fn pair_solve_matches_single() {
        let g = Grid::new(2.0, 6).unwrap();
        let r1 = Field::from_fn(g, |x, y| (x * 3.0).cos() + y);
        let r2 = Field::from_fn(g, |x, y| x * y - 0.5);
        let mut solver = HelmholtzSolver::new(g);
        let (p, q) = solver.solve_pair(1.7, 0.2, &r1, &r2).unwrap();
        let p1 = solver.solve(1.7, 0.2, &r1).unwrap();
        let q1 = solver.solve(1.7, 0.2, &r2).unwrap();
        for (a, b) in p.values().iter().zip(p1.values()) {
            assert!((a - b).abs() < 1e-13);
        }
        for (a, b) in q.values().iter().zip(q1.values()) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn solve_inverts_operator() {
        let g = Grid::new(1.0, 5).unwrap();
        let u = Field::from_fn(g, |x, y| (x - 0.3) * (y + 0.1) + (7.0 * x).sin());
        let lu = laplacian(&u);
        let rhs = u.zip_map(&lu, |v, l| 3.0 * v - 0.5 * l);
        let back = helmholtz_solve(g, 3.0, 0.5, &rhs).unwrap();
        let diff = back.zip_map(&u, |a, b| a - b);
        assert!(norm_inf(&diff) <= 1e-12 * norm_inf(&u));
    }
}
