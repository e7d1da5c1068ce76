//! Symmetric banded matrices and their Cholesky factorization.

use std::sync::OnceLock;

use crate::error::{Result, SgnError};

/// Symmetric banded matrix storing the diagonal and `bandwidth` sub-diagonals.
///
/// Row `i` keeps `M[i][i - k]` for `k = 0..=bandwidth` at `data[i * (bw + 1) + k]`,
/// so symmetry holds by construction.
#[derive(Debug)]
pub struct BandedSymMatrix {
    order: usize,
    bandwidth: usize,
    data: Vec<f64>,
    factor: OnceLock<std::result::Result<BandedCholesky, SgnError>>,
}

impl Clone for BandedSymMatrix {
    fn clone(&self) -> Self {
        Self {
            order: self.order,
            bandwidth: self.bandwidth,
            data: self.data.clone(),
            factor: OnceLock::new(),
        }
    }
}

impl BandedSymMatrix {
    pub fn zeros(order: usize, bandwidth: usize) -> Self {
        Self {
            order,
            bandwidth,
            data: vec![0.0; order * (bandwidth + 1)],
            factor: OnceLock::new(),
        }
    }

    pub fn identity(order: usize) -> Self {
        let mut m = Self::zeros(order, 0);
        for i in 0..order {
            m.add(i, i, 1.0);
        }
        m
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bandwidth(&self) -> usize {
        self.bandwidth
    }

    /// Entry `(i, j)`; zero outside the band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let k = r - c;
        if k > self.bandwidth {
            0.0
        } else {
            self.data[r * (self.bandwidth + 1) + k]
        }
    }

    /// Adds `v` to entry `(i, j)` (and therefore to `(j, i)`).
    ///
    /// Callers assembling symmetric forms must add each off-diagonal pair once.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        let (r, c) = if i >= j { (i, j) } else { (j, i) };
        let k = r - c;
        assert!(k <= self.bandwidth, "entry ({i}, {j}) outside bandwidth {}", self.bandwidth);
        self.data[r * (self.bandwidth + 1) + k] += v;
        self.factor = OnceLock::new();
    }

    /// `y = M x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.order;
        let bw = self.bandwidth;
        let mut y = vec![0.0; n];
        for i in 0..n {
            let row = &self.data[i * (bw + 1)..(i + 1) * (bw + 1)];
            y[i] += row[0] * x[i];
            for k in 1..=bw.min(i) {
                let j = i - k;
                y[i] += row[k] * x[j];
                y[j] += row[k] * x[i];
            }
        }
        y
    }

    /// Banded Cholesky factor, computed once and cached.
    pub fn cholesky(&self) -> Result<&BandedCholesky> {
        self.factor
            .get_or_init(|| BandedCholesky::factor(self))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Solves `M x = rhs` with the cached factorization.
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.order {
            return Err(SgnError::DimensionMismatch {
                expected: self.order,
                got: rhs.len(),
            });
        }
        let mut x = rhs.to_vec();
        self.cholesky()?.solve_in_place(&mut x);
        Ok(x)
    }

    /// Unpreconditioned conjugate gradients; an alternative to the direct solve.
    pub fn solve_cg(&self, rhs: &[f64], rel_tol: f64, max_iter: usize) -> Result<Vec<f64>> {
        let n = self.order;
        if rhs.len() != n {
            return Err(SgnError::DimensionMismatch { expected: n, got: rhs.len() });
        }
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let bnorm = dot(rhs, rhs).sqrt();
        let mut x = vec![0.0; n];
        if bnorm == 0.0 {
            return Ok(x);
        }
        let mut r = rhs.to_vec();
        let mut p = r.clone();
        let mut rr = dot(&r, &r);
        for _ in 0..max_iter {
            let ap = self.mul_vec(&p);
            let pap = dot(&p, &ap);
            if pap <= 0.0 {
                return Err(SgnError::NotPositiveDefinite { row: 0, pivot: pap });
            }
            let alpha = rr / pap;
            for i in 0..n {
                x[i] += alpha * p[i];
                r[i] -= alpha * ap[i];
            }
            let rr_new = dot(&r, &r);
            if rr_new.sqrt() <= rel_tol * bnorm {
                break;
            }
            let beta = rr_new / rr;
            rr = rr_new;
            for i in 0..n {
                p[i] = r[i] + beta * p[i];
            }
        }
        Ok(x)
    }
}

/// Lower-triangular banded factor `L` with `M = L L^T`.
#[derive(Debug, Clone)]
pub struct BandedCholesky {
    order: usize,
    bandwidth: usize,
    data: Vec<f64>,
}

impl BandedCholesky {
    fn factor(m: &BandedSymMatrix) -> Result<Self> {
        let n = m.order;
        let bw = m.bandwidth;
        let stride = bw + 1;
        let mut l = m.data.clone();
        for i in 0..n {
            // off-diagonal entries L[i][j], j = i - k
            for k in (1..=bw.min(i)).rev() {
                let j = i - k;
                let mut s = l[i * stride + k];
                // sum over p < j of L[i][p] L[j][p]
                for kk in 1..=(bw - k).min(j) {
                    let p = j - kk;
                    s -= l[i * stride + (i - p)] * l[j * stride + kk];
                }
                l[i * stride + k] = s / l[j * stride];
            }
            let mut d = l[i * stride];
            for k in 1..=bw.min(i) {
                d -= l[i * stride + k] * l[i * stride + k];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(SgnError::NotPositiveDefinite { row: i, pivot: d });
            }
            l[i * stride] = d.sqrt();
        }
        Ok(Self {
            order: n,
            bandwidth: bw,
            data: l,
        })
    }

    pub fn solve_in_place(&self, x: &mut [f64]) {
        let n = self.order;
        let bw = self.bandwidth;
        let stride = bw + 1;
        let l = &self.data;
        for i in 0..n {
            let mut s = x[i];
            for k in 1..=bw.min(i) {
                s -= l[i * stride + k] * x[i - k];
            }
            x[i] = s / l[i * stride];
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for k in 1..=bw.min(n - 1 - i) {
                s -= l[(i + k) * stride + k] * x[i + k];
            }
            x[i] = s / l[i * stride];
        }
    }
}

/// Diagonal (lumped) mass matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalMatrix {
    diag: Vec<f64>,
}

impl DiagonalMatrix {
    pub fn new(diag: Vec<f64>) -> Self {
        Self { diag }
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        if rhs.len() != self.diag.len() {
            return Err(SgnError::DimensionMismatch {
                expected: self.diag.len(),
                got: rhs.len(),
            });
        }
        Ok(rhs.iter().zip(&self.diag).map(|(r, d)| r / d).collect())
    }
}
