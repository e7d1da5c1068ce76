//! Finite element spaces on a uniform mesh.
//!
//! Every space is described element by element: on element `e` the global basis
//! functions that do not vanish are linear combinations of a fixed set of local
//! shape functions on the reference element `t in [0, 1]`. For Lagrange spaces and
//! the free spline space the combination is the identity; for the zero-trace
//! spline space the two boundary elements carry the combinations
//! `psi_0 = phi_0 - 4 phi_{-1}`, `psi_1 = phi_1 - phi_{-1}` (and the mirror image
//! at the right end).

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::mesh::Mesh;
use super::quadrature::QuadratureRule;
use crate::error::{Result, SgnError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    P1,
    P2,
    P3,
    S3,
}

impl Family {
    /// Polynomial degree on each element.
    pub fn degree(self) -> usize {
        match self {
            Family::P1 => 1,
            Family::P2 => 2,
            Family::P3 => 3,
            Family::S3 => 3,
        }
    }

    /// Gauss-Legendre node count per element used by default for this family.
    pub fn default_quadrature_nodes(self) -> usize {
        match self {
            Family::P1 => 3,
            Family::P2 | Family::P3 => 5,
            Family::S3 => 8,
        }
    }

    /// Number of local shape functions on one element.
    pub fn local_count(self) -> usize {
        match self {
            Family::S3 => 4,
            f => f.degree() + 1,
        }
    }

    pub fn is_lagrange(self) -> bool {
        !matches!(self, Family::S3)
    }

    /// Highest derivative order with a pointwise meaning in this space.
    pub fn max_derivative(self) -> u8 {
        match self {
            Family::S3 => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::P1 => "P1",
            Family::P2 => "P2",
            Family::P3 => "P3",
            Family::S3 => "S3",
        };
        f.write_str(s)
    }
}

impl FromStr for Family {
    type Err = SgnError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "P1" => Ok(Family::P1),
            "P2" => Ok(Family::P2),
            "P3" => Ok(Family::P3),
            "S3" => Ok(Family::S3),
            other => Err(SgnError::Parse(format!("unknown family '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Trace {
    Free,
    ZeroAtEnds,
}

/// Global basis functions supported on one element.
#[derive(Debug, Clone)]
struct ElementMap {
    dofs: Vec<usize>,
    /// `dofs.len() x local_count`, row-major: basis `s` = sum_l coeff[s][l] * shape_l.
    coeff: Vec<f64>,
}

#[derive(Debug)]
struct SpaceInner {
    mesh: Mesh,
    family: Family,
    trace: Trace,
    dof_count: usize,
    elements: Vec<ElementMap>,
}

/// A basis family on a mesh together with its boundary variant.
#[derive(Debug, Clone)]
pub struct FunctionSpace {
    inner: Arc<SpaceInner>,
}

impl PartialEq for FunctionSpace {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.family() == other.family()
                && self.trace() == other.trace()
                && self.mesh().same_as(other.mesh()))
    }
}

impl FunctionSpace {
    pub fn new(mesh: Mesh, family: Family, trace: Trace) -> Result<Self> {
        let n = mesh.elements();
        if family == Family::S3 && trace == Trace::ZeroAtEnds && n < 3 {
            return Err(SgnError::TooFewElements { got: n, min: 3 });
        }
        let nl = family.local_count();
        let free_count = match family {
            Family::S3 => n + 3,
            f => f.degree() * n + 1,
        };
        let dof_count = match trace {
            Trace::Free => free_count,
            Trace::ZeroAtEnds => free_count - 2,
        };
        let mut elements = Vec::with_capacity(n);
        for e in 0..n {
            // (global dof, local shape, coefficient) triples for this element
            let mut triples: Vec<(usize, usize, f64)> = Vec::with_capacity(nl + 2);
            match (family, trace) {
                (Family::S3, Trace::Free) => {
                    for l in 0..4 {
                        triples.push((e + l, l, 1.0));
                    }
                }
                (Family::S3, Trace::ZeroAtEnds) => {
                    // local shape l is the B-spline centred at x_{e-1+l}
                    for l in 0..4 {
                        let j = e as isize - 1 + l as isize;
                        if j == -1 {
                            triples.push((0, l, -4.0));
                            triples.push((1, l, -1.0));
                        } else if j == n as isize + 1 {
                            triples.push((n, l, -4.0));
                            triples.push((n - 1, l, -1.0));
                        } else {
                            triples.push((j as usize, l, 1.0));
                        }
                    }
                }
                (f, Trace::Free) => {
                    let r = f.degree();
                    for l in 0..=r {
                        triples.push((r * e + l, l, 1.0));
                    }
                }
                (f, Trace::ZeroAtEnds) => {
                    let r = f.degree();
                    for l in 0..=r {
                        let g = r * e + l;
                        if g == 0 || g == free_count - 1 {
                            continue;
                        }
                        triples.push((g - 1, l, 1.0));
                    }
                }
            }
            let mut dofs: Vec<usize> = triples.iter().map(|t| t.0).collect();
            dofs.sort_unstable();
            dofs.dedup();
            let mut coeff = vec![0.0; dofs.len() * nl];
            for (g, l, c) in triples {
                let s = dofs.binary_search(&g).expect("dof listed");
                coeff[s * nl + l] += c;
            }
            elements.push(ElementMap { dofs, coeff });
        }
        Ok(Self {
            inner: Arc::new(SpaceInner {
                mesh,
                family,
                trace,
                dof_count,
                elements,
            }),
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.inner.mesh
    }

    pub fn family(&self) -> Family {
        self.inner.family
    }

    pub fn trace(&self) -> Trace {
        self.inner.trace
    }

    pub fn dof_count(&self) -> usize {
        self.inner.dof_count
    }

    /// Global dofs whose basis functions do not vanish on element `e`.
    pub fn element_dofs(&self, e: usize) -> &[usize] {
        &self.inner.elements[e].dofs
    }

    /// Largest `|i - j|` over pairs of dofs sharing an element.
    pub fn bandwidth(&self) -> usize {
        self.inner
            .elements
            .iter()
            .map(|m| m.dofs.last().unwrap_or(&0) - m.dofs.first().unwrap_or(&0))
            .max()
            .unwrap_or(0)
    }

    /// Physical location associated with each dof: the Lagrange node for
    /// Lagrange families, the spline centre (clamped to the mesh) for S3.
    pub fn dof_locations(&self) -> Vec<f64> {
        let m = self.mesh();
        let dx = m.dx();
        let free: Vec<f64> = match self.family() {
            Family::S3 => (0..m.elements() + 3)
                .map(|j| (m.a() + (j as f64 - 1.0) * dx).clamp(m.a(), m.b()))
                .collect(),
            f => {
                let r = f.degree();
                (0..=r * m.elements())
                    .map(|k| {
                        if k == r * m.elements() {
                            m.b()
                        } else {
                            m.a() + k as f64 * dx / r as f64
                        }
                    })
                    .collect()
            }
        };
        match self.trace() {
            Trace::Free => free,
            Trace::ZeroAtEnds => match self.family() {
                Family::S3 => {
                    let n = m.elements();
                    (0..=n).map(|k| m.node(k)).collect()
                }
                _ => free[1..free.len() - 1].to_vec(),
            },
        }
    }

    /// Values and first/second physical derivatives of the element's basis
    /// functions at local coordinate `t`. Output order follows `element_dofs(e)`.
    pub fn element_basis(&self, e: usize, t: f64, out: &mut [[f64; 3]]) {
        let fam = self.family();
        let nl = fam.local_count();
        let shapes = local_shapes(fam, t);
        let dx = self.mesh().dx();
        let map = &self.inner.elements[e];
        for (s, o) in out.iter_mut().take(map.dofs.len()).enumerate() {
            let row = &map.coeff[s * nl..(s + 1) * nl];
            let mut v = [0.0; 3];
            for l in 0..nl {
                let c = row[l];
                if c != 0.0 {
                    v[0] += c * shapes[l][0];
                    v[1] += c * shapes[l][1];
                    v[2] += c * shapes[l][2];
                }
            }
            *o = [v[0], v[1] / dx, v[2] / (dx * dx)];
        }
    }

    /// Value, first and second derivative of basis function `j` at `x`.
    ///
    /// At element interfaces the derivative is taken from the element to the
    /// right (from the left at `b`). The second derivative is only meaningful for
    /// S3; Lagrange spaces report the elementwise value.
    pub fn eval_basis(&self, j: usize, x: f64) -> Result<[f64; 3]> {
        if j >= self.dof_count() {
            return Err(SgnError::BadIndex {
                index: j,
                count: self.dof_count(),
            });
        }
        let (e, t) = self.mesh().locate(x)?;
        let dofs = self.element_dofs(e);
        match dofs.iter().position(|&d| d == j) {
            None => Ok([0.0; 3]),
            Some(s) => {
                let mut buf = [[0.0; 3]; 4];
                self.element_basis(e, t, &mut buf);
                Ok(buf[s])
            }
        }
    }

    /// Precomputed basis values at the physical quadrature points of `rule`.
    pub fn tabulate(&self, rule: &QuadratureRule) -> Tabulation {
        Tabulation::new(self, rule)
    }

    /// Quadrature rule with this family's default node count.
    pub fn default_rule(&self) -> QuadratureRule {
        QuadratureRule::gauss_legendre(self.family().default_quadrature_nodes())
            .expect("default node counts are supported")
    }
}

/// Local shape functions on `t in [0, 1]`: `[value, d/dt, d2/dt2]` per shape.
pub(crate) fn local_shapes(family: Family, t: f64) -> [[f64; 3]; 4] {
    let mut out = [[0.0; 3]; 4];
    match family {
        Family::S3 => {
            let s = 1.0 - t;
            out[0] = [0.25 * s * s * s, -0.75 * s * s, 1.5 * s];
            out[1] = [
                0.25 * (1.0 + 3.0 * s + 3.0 * s * s - 3.0 * s * s * s),
                -0.25 * (3.0 + 6.0 * s - 9.0 * s * s),
                0.25 * (6.0 - 18.0 * s),
            ];
            out[2] = [
                0.25 * (1.0 + 3.0 * t + 3.0 * t * t - 3.0 * t * t * t),
                0.25 * (3.0 + 6.0 * t - 9.0 * t * t),
                0.25 * (6.0 - 18.0 * t),
            ];
            out[3] = [0.25 * t * t * t, 0.75 * t * t, 1.5 * t];
        }
        f => {
            let r = f.degree();
            let nodes: Vec<f64> = (0..=r).map(|k| k as f64 / r as f64).collect();
            for k in 0..=r {
                out[k] = lagrange_shape(&nodes, k, t);
            }
        }
    }
    out
}

/// Lagrange polynomial `k` on `nodes` with first and second derivatives.
fn lagrange_shape(nodes: &[f64], k: usize, t: f64) -> [f64; 3] {
    let xk = nodes[k];
    let others: Vec<f64> = nodes
        .iter()
        .enumerate()
        .filter(|&(m, _)| m != k)
        .map(|(_, &x)| x)
        .collect();
    let denom: f64 = others.iter().map(|&xm| xk - xm).product();
    let factors: Vec<f64> = others.iter().map(|&xm| t - xm).collect();
    let n = factors.len();
    let value: f64 = factors.iter().product();
    let mut d1 = 0.0;
    let mut d2 = 0.0;
    for i in 0..n {
        let mut p = 1.0;
        for (m, f) in factors.iter().enumerate() {
            if m != i {
                p *= f;
            }
        }
        d1 += p;
        for j in 0..n {
            if j == i {
                continue;
            }
            let mut q = 1.0;
            for (m, f) in factors.iter().enumerate() {
                if m != i && m != j {
                    q *= f;
                }
            }
            d2 += q;
        }
    }
    [value / denom, d1 / denom, d2 / denom]
}

/// Basis values of one space at every quadrature point of the mesh.
///
/// Layout: element `e`, quadrature point `q`, local slot `s` lives at
/// `(e * nq + q) * slots + s`.
#[derive(Debug, Clone)]
pub struct Tabulation {
    nq: usize,
    slots: usize,
    n_elements: usize,
    dofs: Vec<usize>,
    counts: Vec<usize>,
    phi: Vec<f64>,
    dphi: Vec<f64>,
    ddphi: Vec<f64>,
    weights: Vec<f64>,
    points: Vec<f64>,
}

impl Tabulation {
    fn new(space: &FunctionSpace, rule: &QuadratureRule) -> Self {
        let mesh = space.mesh();
        let n_el = mesh.elements();
        let nq = rule.len();
        let slots = space.family().local_count();
        let dx = mesh.dx();
        let mut dofs = vec![usize::MAX; n_el * slots];
        let mut counts = vec![0; n_el];
        let mut phi = vec![0.0; n_el * nq * slots];
        let mut dphi = vec![0.0; n_el * nq * slots];
        let mut ddphi = vec![0.0; n_el * nq * slots];
        let mut points = vec![0.0; n_el * nq];
        let weights: Vec<f64> = rule.weights().iter().map(|w| 0.5 * w * dx).collect();
        let mut buf = [[0.0; 3]; 4];
        for e in 0..n_el {
            let ed = space.element_dofs(e);
            counts[e] = ed.len();
            dofs[e * slots..e * slots + ed.len()].copy_from_slice(ed);
            for (q, &xi) in rule.nodes().iter().enumerate() {
                let t = 0.5 * (xi + 1.0);
                points[e * nq + q] = mesh.map(e, t);
                space.element_basis(e, t, &mut buf);
                let base = (e * nq + q) * slots;
                for s in 0..ed.len() {
                    phi[base + s] = buf[s][0];
                    dphi[base + s] = buf[s][1];
                    ddphi[base + s] = buf[s][2];
                }
            }
        }
        Self {
            nq,
            slots,
            n_elements: n_el,
            dofs,
            counts,
            phi,
            dphi,
            ddphi,
            weights,
            points,
        }
    }

    pub fn points_per_element(&self) -> usize {
        self.nq
    }

    pub fn elements(&self) -> usize {
        self.n_elements
    }

    pub fn total_points(&self) -> usize {
        self.n_elements * self.nq
    }

    /// Physical quadrature weight of point `q` (identical on every element).
    pub fn weight(&self, q: usize) -> f64 {
        self.weights[q]
    }

    /// Physical coordinate of quadrature point `q` of element `e`.
    pub fn point(&self, e: usize, q: usize) -> f64 {
        self.points[e * self.nq + q]
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn element_dofs(&self, e: usize) -> &[usize] {
        &self.dofs[e * self.slots..e * self.slots + self.counts[e]]
    }

    #[inline]
    pub fn phi(&self, e: usize, q: usize) -> &[f64] {
        let base = (e * self.nq + q) * self.slots;
        &self.phi[base..base + self.counts[e]]
    }

    #[inline]
    pub fn dphi(&self, e: usize, q: usize) -> &[f64] {
        let base = (e * self.nq + q) * self.slots;
        &self.dphi[base..base + self.counts[e]]
    }

    #[inline]
    pub fn ddphi(&self, e: usize, q: usize) -> &[f64] {
        let base = (e * self.nq + q) * self.slots;
        &self.ddphi[base..base + self.counts[e]]
    }

    /// Field values and derivatives at every quadrature point, in `e * nq + q` order.
    pub fn eval_into(&self, coeffs: &[f64], val: &mut [f64], d1: &mut [f64], d2: Option<&mut [f64]>) {
        let mut d2 = d2;
        for e in 0..self.n_elements {
            let dofs = self.element_dofs(e);
            for q in 0..self.nq {
                let (p, dp) = (self.phi(e, q), self.dphi(e, q));
                let mut v = 0.0;
                let mut dv = 0.0;
                for (s, &g) in dofs.iter().enumerate() {
                    v += coeffs[g] * p[s];
                    dv += coeffs[g] * dp[s];
                }
                let i = e * self.nq + q;
                val[i] = v;
                d1[i] = dv;
                if let Some(out) = d2.as_deref_mut() {
                    let ddp = self.ddphi(e, q);
                    out[i] = dofs.iter().enumerate().map(|(s, &g)| coeffs[g] * ddp[s]).sum();
                }
            }
        }
    }

    /// Field values only.
    pub fn eval_values(&self, coeffs: &[f64], val: &mut [f64]) {
        for e in 0..self.n_elements {
            let dofs = self.element_dofs(e);
            for q in 0..self.nq {
                let p = self.phi(e, q);
                val[e * self.nq + q] = dofs.iter().enumerate().map(|(s, &g)| coeffs[g] * p[s]).sum();
            }
        }
    }

    /// Load vector `f_j = sum_q w (a_q chi_j + c_q chi_j')` where `(a_q, c_q)`
    /// come from `coef(point index)`.
    pub fn load<F: Fn(usize) -> (f64, f64)>(&self, dof_count: usize, coef: F) -> Vec<f64> {
        let mut out = vec![0.0; dof_count];
        self.load_into(&mut out, coef);
        out
    }

    pub fn load_into<F: Fn(usize) -> (f64, f64)>(&self, out: &mut [f64], coef: F) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for e in 0..self.n_elements {
            let dofs = self.element_dofs(e);
            for q in 0..self.nq {
                let (a, c) = coef(e * self.nq + q);
                let w = self.weights[q];
                let (p, dp) = (self.phi(e, q), self.dphi(e, q));
                for (s, &g) in dofs.iter().enumerate() {
                    out[g] += w * (a * p[s] + c * dp[s]);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(f: Family, t: Trace, n: usize) -> FunctionSpace {
        FunctionSpace::new(Mesh::uniform(0.0, 1.0, n).unwrap(), f, t).unwrap()
    }

    #[test]
    fn dof_counts() {
        let n = 7;
        let expect = [(Family::P1, n + 1), (Family::P2, 2 * n + 1), (Family::P3, 3 * n + 1), (Family::S3, n + 3)];
        for (f, c) in expect {
            assert_eq!(space(f, Trace::Free, n).dof_count(), c, "{f}");
            assert_eq!(space(f, Trace::ZeroAtEnds, n).dof_count(), c - 2, "{f}");
        }
    }

    #[test]
    fn bandwidths() {
        for trace in [Trace::Free, Trace::ZeroAtEnds] {
            assert_eq!(space(Family::P1, trace, 9).bandwidth(), 1);
            assert_eq!(space(Family::P2, trace, 9).bandwidth(), 2);
            assert_eq!(space(Family::P3, trace, 9).bandwidth(), 3);
            assert_eq!(space(Family::S3, trace, 9).bandwidth(), 3);
        }
    }

    #[test]
    fn p1_hat_peaks_at_its_node() {
        let s = space(Family::P1, Trace::Free, 10);
        let v = s.eval_basis(3, 0.3).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-14);
        // right-sided slope
        assert!((v[1] + 10.0).abs() < 1e-10);
    }

    #[test]
    fn p2_midpoint_dof_is_one_at_its_midpoint() {
        let s = space(Family::P2, Trace::Free, 10);
        // dof 2e+1 is the midpoint of element e
        let v = s.eval_basis(7, 0.35).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-14);
        assert!(v[1].abs() < 1e-10);
        // psi(x) = 1 - 4 x^2 in units of dx
        let v = s.eval_basis(7, 0.35 + 0.025).unwrap();
        assert!((v[0] - (1.0 - 4.0 * 0.25f64.powi(2))).abs() < 1e-13);
    }

    #[test]
    fn s3_centre_value_is_one() {
        let s = space(Family::S3, Trace::Free, 10);
        // free dof j + 1 is the spline centred at x_j
        let v = s.eval_basis(5, 0.4).unwrap();
        assert!((v[0] - 1.0).abs() < 1e-14);
        assert!(v[1].abs() < 1e-12);
        let v1 = s.eval_basis(5, 0.5).unwrap();
        assert!((v1[0] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn zero_trace_spaces_vanish_at_the_ends() {
        for f in [Family::P1, Family::P2, Family::P3, Family::S3] {
            let s = space(f, Trace::ZeroAtEnds, 6);
            for j in 0..s.dof_count() {
                assert!(s.eval_basis(j, 0.0).unwrap()[0].abs() < 1e-14, "{f} {j}");
                assert!(s.eval_basis(j, 1.0).unwrap()[0].abs() < 1e-14, "{f} {j}");
            }
        }
    }

    #[test]
    fn p3_nodal_interpolation() {
        let s = space(Family::P3, Trace::Free, 4);
        let locs = s.dof_locations();
        for (j, &x) in locs.iter().enumerate() {
            for (k, &y) in locs.iter().enumerate() {
                let v = s.eval_basis(j, y).unwrap()[0];
                let want = if j == k { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-12, "j={j} k={k} x={x}");
            }
        }
    }

    #[test]
    fn out_of_range_requests() {
        let s = space(Family::P1, Trace::Free, 4);
        assert!(matches!(s.eval_basis(5, 0.5), Err(SgnError::BadIndex { .. })));
        assert!(matches!(s.eval_basis(0, 2.0), Err(SgnError::OutOfDomain { .. })));
    }

    #[test]
    fn s3_zero_trace_needs_three_elements() {
        let m = Mesh::uniform(0.0, 1.0, 2).unwrap();
        assert!(FunctionSpace::new(m, Family::S3, Trace::ZeroAtEnds).is_err());
    }
}
