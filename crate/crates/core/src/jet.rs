//! Truncated Taylor arithmetic used for all differentiation.
//!
//! [`Jet2`] carries value, gradient and Hessian of a scalar field at a point
//! and propagates them through every arithmetic node in one pass. [`Jet1`]
//! carries value and gradient only; it is used to differentiate quantities
//! that are already built from first derivatives (the Koszul form, the
//! connection forms) by lifting second-order data one level down.

use std::ops::{Add, Mul, Neg, Sub};

/// Largest supported chart dimension.
pub const MAX_DIM: usize = 8;
const TRI: usize = MAX_DIM * (MAX_DIM + 1) / 2;

#[inline]
fn tri_index(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    // row-major upper triangle
    a * MAX_DIM - a * (a + 1) / 2 + b
}

/// Value, gradient and Hessian of a scalar at a point.
///
/// The Hessian is stored as an upper triangle, so it is symmetric by
/// construction.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2 {
    dim: usize,
    value: f64,
    grad: [f64; MAX_DIM],
    hess: [f64; TRI],
}

impl Jet2 {
    pub fn constant(dim: usize, value: f64) -> Self {
        debug_assert!(dim <= MAX_DIM);
        Jet2 {
            dim,
            value,
            grad: [0.0; MAX_DIM],
            hess: [0.0; TRI],
        }
    }

    /// The coordinate function `x^index` evaluated at `at`.
    pub fn variable(dim: usize, index: usize, at: f64) -> Self {
        let mut j = Jet2::constant(dim, at);
        j.grad[index] = 1.0;
        j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn grad(&self) -> &[f64] {
        &self.grad[..self.dim]
    }

    pub fn d(&self, i: usize) -> f64 {
        self.grad[i]
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hess[tri_index(i, j)]
    }

    /// Full Hessian as a dense row-major `dim × dim` matrix.
    pub fn hessian(&self) -> Vec<Vec<f64>> {
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self.hess(i, j)).collect())
            .collect()
    }

    /// Lift to first order: value and gradient.
    pub fn to_jet1(&self) -> Jet1 {
        Jet1 {
            value: self.value,
            grad: self.grad,
        }
    }

    /// First order data of the partial derivative `∂_k` of this scalar.
    pub fn partial_jet1(&self, k: usize) -> Jet1 {
        let mut grad = [0.0; MAX_DIM];
        for (l, g) in grad.iter_mut().enumerate().take(self.dim) {
            *g = self.hess(k, l);
        }
        Jet1 {
            value: self.grad[k],
            grad,
        }
    }

    fn zip(&self, other: &Jet2, f: impl Fn(f64, f64) -> f64, value: f64) -> Jet2 {
        let mut out = Jet2::constant(self.dim.max(other.dim), value);
        for i in 0..MAX_DIM {
            out.grad[i] = f(self.grad[i], other.grad[i]);
        }
        for i in 0..TRI {
            out.hess[i] = f(self.hess[i], other.hess[i]);
        }
        out
    }

    /// Quotient with its value computed as a single `a / b`.
    pub fn div(&self, other: &Jet2) -> Jet2 {
        let b = other.value;
        let q = self.value / b;
        let n = self.dim.max(other.dim);
        let mut out = Jet2::constant(n, q);
        for i in 0..n {
            out.grad[i] = (self.grad[i] - q * other.grad[i]) / b;
        }
        for i in 0..n {
            for j in i..n {
                let t = tri_index(i, j);
                out.hess[t] = (self.hess[t]
                    - q * other.hess[t]
                    - out.grad[i] * other.grad[j]
                    - other.grad[i] * out.grad[j])
                    / b;
            }
        }
        out
    }

    /// Applies a scalar function given its value and first two derivatives
    /// at `self.value()`.
    pub fn chain(&self, f: f64, df: f64, d2f: f64) -> Jet2 {
        let n = self.dim;
        let mut out = Jet2::constant(n, f);
        for i in 0..n {
            out.grad[i] = df * self.grad[i];
        }
        for i in 0..n {
            for j in i..n {
                let t = tri_index(i, j);
                out.hess[t] = df * self.hess[t] + d2f * self.grad[i] * self.grad[j];
            }
        }
        out
    }

    pub fn is_constant(&self) -> bool {
        self.grad.iter().all(|&g| g == 0.0) && self.hess.iter().all(|&h| h == 0.0)
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        self.zip(&rhs, |a, b| a + b, self.value + rhs.value)
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        self.zip(&rhs, |a, b| a - b, self.value - rhs.value)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        let n = self.dim.max(rhs.dim);
        let mut out = Jet2::constant(n, self.value * rhs.value);
        for i in 0..n {
            out.grad[i] = self.value * rhs.grad[i] + rhs.value * self.grad[i];
        }
        for i in 0..n {
            for j in i..n {
                let t = tri_index(i, j);
                out.hess[t] = self.value * rhs.hess[t]
                    + rhs.value * self.hess[t]
                    + self.grad[i] * rhs.grad[j]
                    + self.grad[j] * rhs.grad[i];
            }
        }
        out
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        let mut out = self;
        out.value = -self.value;
        out.grad.iter_mut().for_each(|g| *g = -*g);
        out.hess.iter_mut().for_each(|h| *h = -*h);
        out
    }
}

/// Value and gradient of a scalar at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet1 {
    pub value: f64,
    pub grad: [f64; MAX_DIM],
}

impl Jet1 {
    pub fn grad(&self, dim: usize) -> &[f64] {
        &self.grad[..dim]
    }
}

/// Ring operations shared by `f64` and [`Jet1`], so that formulas built from
/// first-order field data can be evaluated either pointwise or together with
/// their gradient.
pub trait Scalar:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    fn value(&self) -> f64;
    fn scale(self, s: f64) -> Self;
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
}

impl Scalar for Jet1 {
    fn from_f64(v: f64) -> Self {
        Jet1 {
            value: v,
            grad: [0.0; MAX_DIM],
        }
    }
    fn value(&self) -> f64 {
        self.value
    }
    fn scale(self, s: f64) -> Self {
        let mut out = self;
        out.value *= s;
        out.grad.iter_mut().for_each(|g| *g *= s);
        out
    }
}

impl Add for Jet1 {
    type Output = Jet1;
    fn add(self, rhs: Jet1) -> Jet1 {
        let mut out = self;
        out.value += rhs.value;
        for (a, b) in out.grad.iter_mut().zip(rhs.grad) {
            *a += b;
        }
        out
    }
}

impl Sub for Jet1 {
    type Output = Jet1;
    fn sub(self, rhs: Jet1) -> Jet1 {
        let mut out = self;
        out.value -= rhs.value;
        for (a, b) in out.grad.iter_mut().zip(rhs.grad) {
            *a -= b;
        }
        out
    }
}

impl Mul for Jet1 {
    type Output = Jet1;
    fn mul(self, rhs: Jet1) -> Jet1 {
        let mut grad = [0.0; MAX_DIM];
        for (i, g) in grad.iter_mut().enumerate() {
            *g = self.value * rhs.grad[i] + rhs.value * self.grad[i];
        }
        Jet1 {
            value: self.value * rhs.value,
            grad,
        }
    }
}

impl Neg for Jet1 {
    type Output = Jet1;
    fn neg(self) -> Jet1 {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_rule_second_order() {
        // u * v at (2, 3)
        let u = Jet2::variable(2, 0, 2.0);
        let v = Jet2::variable(2, 1, 3.0);
        let p = u * v;
        assert_eq!(p.value(), 6.0);
        assert_eq!(p.grad(), &[3.0, 2.0]);
        assert_eq!(p.hessian(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
    }

    #[test]
    fn quotient_matches_closed_form() {
        // u / v at (1, 2): grad (1/2, -1/4), hess [[0,-1/4],[-1/4, 1/4]]
        let u = Jet2::variable(2, 0, 1.0);
        let v = Jet2::variable(2, 1, 2.0);
        let q = u.div(&v);
        assert_eq!(q.value(), 0.5);
        assert!((q.d(0) - 0.5).abs() < 1e-15);
        assert!((q.d(1) + 0.25).abs() < 1e-15);
        assert!((q.hess(0, 0)).abs() < 1e-15);
        assert!((q.hess(0, 1) + 0.25).abs() < 1e-15);
        assert!((q.hess(1, 1) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn partial_lift_reads_hessian_row() {
        let u = Jet2::variable(2, 0, 2.0);
        let v = Jet2::variable(2, 1, 3.0);
        let p = u * u * v; // u^2 v
        let d0 = p.partial_jet1(0); // 2uv, grad (2v, 2u)
        assert_eq!(d0.value, 12.0);
        assert_eq!(d0.grad(2), &[6.0, 4.0]);
    }

    #[test]
    fn jet1_product() {
        let a = Jet1 {
            value: 2.0,
            grad: [1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        };
        let b = a * a - Jet1::from_f64(1.0);
        assert_eq!(b.value, 3.0);
        assert_eq!(b.grad[0], 4.0);
    }
}
