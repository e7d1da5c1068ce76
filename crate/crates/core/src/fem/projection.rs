//! Discrete fields, Gram matrices and L2 projection.

use super::banded::{BandedSymMatrix, DiagonalMatrix};
use super::quadrature::QuadratureRule;
use super::space::{Family, FunctionSpace, Tabulation, Trace};
use crate::error::{Result, SgnError};

/// Coefficients of a discrete field in a [`FunctionSpace`].
#[derive(Debug, Clone)]
pub struct CoefficientVector {
    space: FunctionSpace,
    values: Vec<f64>,
}

impl CoefficientVector {
    pub fn new(space: FunctionSpace, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.dof_count() {
            return Err(SgnError::DimensionMismatch {
                expected: space.dof_count(),
                got: values.len(),
            });
        }
        Ok(Self { space, values })
    }

    pub fn zeros(space: FunctionSpace) -> Self {
        let n = space.dof_count();
        Self {
            space,
            values: vec![0.0; n],
        }
    }

    pub fn space(&self) -> &FunctionSpace {
        &self.space
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

    /// `sum_j c_j d^k chi_j / dx^k` at `x`.
    pub fn eval(&self, x: f64, deriv: u8) -> Result<f64> {
        if deriv > self.space.family().max_derivative() {
            return Err(SgnError::DerivUnsupported(deriv));
        }
        let (e, t) = self.space.mesh().locate(x)?;
        Ok(self.eval_local(e, t)[deriv as usize])
    }

    /// Value and first two derivatives at local coordinate `t` of element `e`.
    pub fn eval_local(&self, e: usize, t: f64) -> [f64; 3] {
        let mut buf = [[0.0; 3]; 4];
        self.space.element_basis(e, t, &mut buf);
        let mut out = [0.0; 3];
        for (s, &g) in self.space.element_dofs(e).iter().enumerate() {
            for k in 0..3 {
                out[k] += self.values[g] * buf[s][k];
            }
        }
        out
    }
}

/// Consistent Gram (mass) matrix `M_ij = (chi_i, chi_j)`.
pub fn assemble_gram(space: &FunctionSpace, rule: &QuadratureRule) -> BandedSymMatrix {
    let tab = space.tabulate(rule);
    assemble_weighted(space, &tab, |_| (1.0, 0.0))
}

/// `M_ij = sum_q w [m_q chi_i chi_j + k_q chi_i' chi_j']` with `(m_q, k_q)` from `coef`.
pub fn assemble_weighted<F: Fn(usize) -> (f64, f64)>(
    space: &FunctionSpace,
    tab: &Tabulation,
    coef: F,
) -> BandedSymMatrix {
    let mut m = BandedSymMatrix::zeros(space.dof_count(), space.bandwidth());
    let nq = tab.points_per_element();
    for e in 0..tab.elements() {
        let dofs = tab.element_dofs(e);
        for q in 0..nq {
            let (mc, kc) = coef(e * nq + q);
            let w = tab.weight(q);
            let (p, dp) = (tab.phi(e, q), tab.dphi(e, q));
            for a in 0..dofs.len() {
                for b in 0..=a {
                    let v = w * (mc * p[a] * p[b] + kc * dp[a] * dp[b]);
                    m.add(dofs[a], dofs[b], v);
                }
            }
        }
    }
    m
}

/// Diagonal mass from nodal quadrature: trapezoid for P1, Simpson for P2.
pub fn lump_mass(space: &FunctionSpace) -> Result<DiagonalMatrix> {
    let mesh = space.mesh();
    let dx = mesh.dx();
    let n = mesh.elements();
    let free = match space.family() {
        Family::P1 => {
            let mut d = vec![dx; n + 1];
            d[0] = 0.5 * dx;
            d[n] = 0.5 * dx;
            d
        }
        Family::P2 => {
            let mut d = vec![0.0; 2 * n + 1];
            for e in 0..n {
                d[2 * e] += dx / 6.0;
                d[2 * e + 1] += 4.0 * dx / 6.0;
                d[2 * e + 2] += dx / 6.0;
            }
            d
        }
        f => return Err(SgnError::UnsupportedFamily(f.to_string())),
    };
    let diag = match space.trace() {
        Trace::Free => free,
        Trace::ZeroAtEnds => free[1..free.len() - 1].to_vec(),
    };
    Ok(DiagonalMatrix::new(diag))
}

/// L2 projection of `f` onto `space`, solving `Gram c = (f, chi_j)`.
pub fn l2_project<F: Fn(f64) -> f64>(
    f: F,
    space: &FunctionSpace,
    rule: &QuadratureRule,
) -> Result<CoefficientVector> {
    let gram = assemble_gram(space, rule);
    l2_project_with(f, space, &space.tabulate(rule), &gram)
}

/// L2 projection reusing a tabulation and an assembled Gram matrix.
pub fn l2_project_with<F: Fn(f64) -> f64>(
    f: F,
    space: &FunctionSpace,
    tab: &Tabulation,
    gram: &BandedSymMatrix,
) -> Result<CoefficientVector> {
    let pts = tab.points();
    let load = tab.load(space.dof_count(), |i| (f(pts[i]), 0.0));
    let c = gram.solve(&load)?;
    CoefficientVector::new(space.clone(), c)
}
