//! Direct banded solvers and matrix-free conjugate gradients.

use crate::error::{Error, Result};

/// Thomas algorithm for `sub[i] x[i-1] + diag[i] x[i] + sup[i] x[i+1] = rhs[i]`.
///
/// `sub[0]` and `sup[n-1]` are ignored. No pivoting.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    if sub.len() != n || sup.len() != n || rhs.len() != n {
        return Err(Error::Config("tridiagonal bands and rhs must have equal length".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut denom = diag[0];
    if denom == 0.0 {
        return Err(Error::ZeroPivot(0));
    }
    c[0] = sup[0] / denom;
    d[0] = rhs[0] / denom;
    for i in 1..n {
        denom = diag[i] - sub[i] * c[i - 1];
        if denom == 0.0 {
            return Err(Error::ZeroPivot(i));
        }
        c[i] = sup[i] / denom;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    Ok(d)
}

/// Square banded matrix with `lower` sub- and `upper` super-diagonals.
///
/// Stored row-major: `bands[i][lower + k]` is entry `(i, i + k)` for `k` in `-lower..=upper`.
#[derive(Clone, Debug, PartialEq)]
pub struct BandedMatrix {
    pub n: usize,
    pub lower: usize,
    pub upper: usize,
    bands: Vec<f64>,
}

impl BandedMatrix {
    pub fn zeros(n: usize, lower: usize, upper: usize) -> Self {
        Self { n, lower, upper, bands: vec![0.0; n * (lower + upper + 1)] }
    }

    fn width(&self) -> usize {
        self.lower + self.upper + 1
    }

    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        let k = j as isize - i as isize;
        if i >= self.n || j >= self.n || k < -(self.lower as isize) || k > self.upper as isize {
            return None;
        }
        Some(i * self.width() + (k + self.lower as isize) as usize)
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.slot(i, j).map_or(0.0, |s| self.bands[s])
    }

    /// Panics when `(i, j)` lies outside the band.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let s = self.slot(i, j).unwrap_or_else(|| panic!("({i}, {j}) outside the band"));
        self.bands[s] = v;
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| {
                let lo = i.saturating_sub(self.lower);
                let hi = (i + self.upper).min(self.n - 1);
                (lo..=hi).map(|j| self.get(i, j) * x[j]).sum()
            })
            .collect()
    }
}

/// Gaussian elimination without pivoting, restricted to the band.
pub fn solve_banded(a: &BandedMatrix, rhs: &[f64]) -> Result<Vec<f64>> {
    if rhs.len() != a.n {
        return Err(Error::Config(format!("rhs has length {}, matrix is {}x{}", rhs.len(), a.n, a.n)));
    }
    let n = a.n;
    let mut m = a.clone();
    let mut b = rhs.to_vec();
    for k in 0..n {
        let pivot = m.get(k, k);
        if pivot == 0.0 {
            return Err(Error::ZeroPivot(k));
        }
        let row_end = (k + m.upper).min(n - 1);
        for i in k + 1..=(k + m.lower).min(n - 1) {
            let factor = m.get(i, k) / pivot;
            if factor == 0.0 {
                continue;
            }
            for j in k..=row_end {
                let v = m.get(i, j) - factor * m.get(k, j);
                m.set(i, j, v);
            }
            b[i] -= factor * b[k];
        }
    }
    for i in (0..n).rev() {
        let hi = (i + m.upper).min(n - 1);
        let s: f64 = (i + 1..=hi).map(|j| m.get(i, j) * b[j]).sum();
        b[i] = (b[i] - s) / m.get(i, i);
    }
    Ok(b)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgOptions {
    /// Stop when `|r| <= rel_tol * |b|`.
    pub rel_tol: f64,
    pub max_iter: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CgStats {
    pub iterations: usize,
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Conjugate gradients for a symmetric positive definite operator given as `apply(x, out)`.
///
/// `x` holds the initial guess on entry.
pub fn solve_cg<F>(apply: F, b: &[f64], x: &mut [f64], opts: CgOptions) -> Result<CgStats>
where
    F: Fn(&[f64], &mut [f64]),
{
    let n = b.len();
    let mut ax = vec![0.0; n];
    apply(x, &mut ax);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let bnorm = dot(b, b).sqrt();
    let target = opts.rel_tol * if bnorm > 0.0 { bnorm } else { 1.0 };
    let mut rr = dot(&r, &r);
    if rr.sqrt() <= target {
        return Ok(CgStats { iterations: 0, residual: rr.sqrt() });
    }
    let mut p = r.clone();
    let mut ap = vec![0.0; n];
    for it in 1..=opts.max_iter {
        apply(&p, &mut ap);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) {
            return Err(Error::NoConvergence { iterations: it, residual: rr.sqrt() });
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        if rr_new.sqrt() <= target {
            return Ok(CgStats { iterations: it, residual: rr_new.sqrt() });
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    Err(Error::NoConvergence { iterations: opts.max_iter, residual: rr.sqrt() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tridiagonal_example() {
        let x = solve_tridiagonal(&[0.0, -1.0, -1.0], &[2.0, 2.0, 2.0], &[-1.0, -1.0, 0.0], &[1.0, 0.0, 1.0]).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn tridiagonal_zero_pivot() {
        assert_eq!(solve_tridiagonal(&[0.0, 1.0], &[0.0, 1.0], &[1.0, 0.0], &[1.0, 1.0]), Err(Error::ZeroPivot(0)));
    }

    /// Dense Gaussian elimination with partial pivoting.
    fn dense_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
        let n = b.len();
        for k in 0..n {
            let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs())).unwrap();
            a.swap(k, p);
            b.swap(k, p);
            for i in k + 1..n {
                let f = a[i][k] / a[k][k];
                for j in k..n {
                    a[i][j] -= f * a[k][j];
                }
                b[i] -= f * b[k];
            }
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| a[i][j] * b[j]).sum();
            b[i] = (b[i] - s) / a[i][i];
        }
        b
    }

    #[test]
    fn pentadiagonal_matches_dense() {
        let n = 12;
        let mut a = BandedMatrix::zeros(n, 2, 2);
        let mut dense = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in i.saturating_sub(2)..=(i + 2).min(n - 1) {
                let v = if i == j { 8.0 + i as f64 * 0.1 } else { ((i * 7 + j * 3) % 5) as f64 * 0.3 - 0.6 };
                a.set(i, j, v);
                dense[i][j] = v;
            }
        }
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
        let x = solve_banded(&a, &b).unwrap();
        let y = dense_solve(dense, b.clone());
        for (u, v) in x.iter().zip(&y) {
            assert!((u - v).abs() < 1e-13);
        }
        let r = a.matvec(&x);
        for (u, v) in r.iter().zip(&b) {
            assert!((u - v).abs() < 1e-13);
        }
    }

    #[test]
    fn cg_solves_poisson_matrix() {
        let n = 50;
        let apply = |x: &[f64], out: &mut [f64]| {
            for i in 0..n {
                let l = if i > 0 { x[i - 1] } else { 0.0 };
                let r = if i + 1 < n { x[i + 1] } else { 0.0 };
                out[i] = 2.0 * x[i] - l - r;
            }
        };
        let b = vec![1.0; n];
        let mut x = vec![0.0; n];
        let stats = solve_cg(apply, &b, &mut x, CgOptions { rel_tol: 1e-12, max_iter: 10 * n }).unwrap();
        assert!(stats.iterations <= n + 1);
        let sub = vec![-1.0; n];
        let diag = vec![2.0; n];
        let direct = solve_tridiagonal(&sub, &diag, &sub, &b).unwrap();
        for (u, v) in x.iter().zip(&direct) {
            assert!((u - v).abs() < 1e-9 * v.abs().max(1.0));
        }
    }

    #[test]
    fn cg_reports_non_convergence() {
        let apply = |x: &[f64], out: &mut [f64]| {
            for i in 0..x.len() {
                out[i] = (i as f64 + 1.0) * x[i];
            }
        };
        let b = vec![1.0; 40];
        let mut x = vec![0.0; 40];
        let err = solve_cg(apply, &b, &mut x, CgOptions { rel_tol: 1e-14, max_iter: 3 }).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { iterations: 3, .. }));
    }
}
