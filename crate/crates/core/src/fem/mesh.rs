use crate::error::{Result, SgnError};

/// Uniform partition of `[a, b]` into `n` elements.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    a: f64,
    b: f64,
    n: usize,
    dx: f64,
}

impl Mesh {
    pub fn uniform(a: f64, b: f64, n: usize) -> Result<Self> {
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(SgnError::NonPositiveLength { a, b });
        }
        if n < 2 {
            return Err(SgnError::TooFewElements { got: n, min: 2 });
        }
        Ok(Self {
            a,
            b,
            n,
            dx: (b - a) / n as f64,
        })
    }

    /// Mesh with element size as close to `dx` as an integer element count allows.
    pub fn with_spacing(a: f64, b: f64, dx: f64) -> Result<Self> {
        if !(dx > 0.0) {
            return Err(SgnError::BadInput(format!("mesh spacing {dx} must be positive")));
        }
        let n = ((b - a) / dx).round().max(1.0) as usize;
        Self::uniform(a, b, n)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn elements(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// Node `x_i = a + i dx`; the last node is pinned to `b`.
    pub fn node(&self, i: usize) -> f64 {
        if i == self.n {
            self.b
        } else {
            self.a + i as f64 * self.dx
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.n).map(|i| self.node(i)).collect()
    }

    pub fn contains(&self, x: f64) -> bool {
        let tol = 1e-12 * self.length().max(1.0);
        x >= self.a - tol && x <= self.b + tol
    }

    /// Element index and local coordinate `t in [0, 1]` for `x`.
    pub fn locate(&self, x: f64) -> Result<(usize, f64)> {
        if !self.contains(x) {
            return Err(SgnError::OutOfDomain { x, a: self.a, b: self.b });
        }
        let mut s = (x - self.a) / self.dx;
        let nearest = s.round();
        if (s - nearest).abs() < 1e-9 {
            s = nearest;
        }
        let e = (s.floor().max(0.0) as usize).min(self.n - 1);
        let t = (s - e as f64).clamp(0.0, 1.0);
        Ok((e, t))
    }

    /// Physical coordinate of local point `t` in element `e`.
    pub fn map(&self, e: usize, t: f64) -> f64 {
        self.node(e) + t * self.dx
    }

    pub fn same_as(&self, other: &Mesh) -> bool {
        self.n == other.n && self.a == other.a && self.b == other.b
    }
}
