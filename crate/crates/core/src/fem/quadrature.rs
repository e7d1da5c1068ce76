//! Gauss-Legendre rules on the reference interval [-1, 1].

use crate::error::{Result, SgnError};

/// Largest node count supported by [`QuadratureRule::gauss_legendre`].
pub const MAX_NODES: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl QuadratureRule {
    /// Standard `n`-point Gauss-Legendre rule, exact for polynomials of degree `2n - 1`.
    ///
    /// Nodes are the roots of the Legendre polynomial `P_n`, located by Newton
    /// iteration from the Chebyshev-like initial guess `cos(pi (i + 3/4) / (n + 1/2))`.
    pub fn gauss_legendre(n: usize) -> Result<Self> {
        if !(1..=MAX_NODES).contains(&n) {
            return Err(SgnError::UnsupportedOrder(n));
        }
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Ok(Self { nodes, weights })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrates `f` over `[lo, hi]` with the affine image of this rule.
    pub fn integrate<F: Fn(f64) -> f64>(&self, lo: f64, hi: f64, f: F) -> f64 {
        let half = 0.5 * (hi - lo);
        let mid = 0.5 * (hi + lo);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// Three-term recurrence for `P_n(x)` and `P_n'(x)`.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monomial_exact(k: u32) -> f64 {
        if k % 2 == 1 {
            0.0
        } else {
            2.0 / (k as f64 + 1.0)
        }
    }

    #[test]
    fn midpoint_rule() {
        let r = QuadratureRule::gauss_legendre(1).unwrap();
        assert_eq!(r.nodes(), &[0.0]);
        assert!((r.weights()[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn three_point_rule_matches_closed_form() {
        let r = QuadratureRule::gauss_legendre(3).unwrap();
        let s = (3.0f64 / 5.0).sqrt();
        let expect_nodes = [-s, 0.0, s];
        let expect_weights = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
        for i in 0..3 {
            assert!((r.nodes()[i] - expect_nodes[i]).abs() < 1e-15);
            assert!((r.weights()[i] - expect_weights[i]).abs() < 1e-15);
        }
    }

    #[test]
    fn eight_point_rule_integrates_degree_fourteen() {
        let r = QuadratureRule::gauss_legendre(8).unwrap();
        let v = r.integrate(-1.0, 1.0, |x| x.powi(14));
        assert!((v - 2.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn weights_sum_to_two_and_exactness_holds_for_all_orders() {
        for n in 1..=MAX_NODES {
            let r = QuadratureRule::gauss_legendre(n).unwrap();
            let s: f64 = r.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-14, "n={n} sum={s}");
            assert!(r.weights().iter().all(|&w| w > 0.0));
            for k in 0..(2 * n as u32) {
                let v = r.integrate(-1.0, 1.0, |x| x.powi(k as i32));
                let e = monomial_exact(k);
                let scale = e.abs().max(1.0);
                assert!((v - e).abs() / scale < 1e-13, "n={n} k={k} got {v} want {e}");
            }
        }
    }

    #[test]
    fn rejects_unsupported_orders() {
        assert!(matches!(
            QuadratureRule::gauss_legendre(0),
            Err(SgnError::UnsupportedOrder(0))
        ));
        assert!(QuadratureRule::gauss_legendre(17).is_err());
    }
}
