//! Small dense helpers shared by the spectral and stability code.

use nalgebra::DMatrix;

/// A vector space element that stencils can be applied to.
pub trait Combine: Sized {
    /// A zero element with the same shape as `self`.
    fn zero_like(&self) -> Self;
    /// `self += a * x`.
    fn axpy(&mut self, a: f64, x: &Self);
}

impl Combine for f64 {
    fn zero_like(&self) -> Self {
        0.0
    }

    fn axpy(&mut self, a: f64, x: &Self) {
        *self += a * x;
    }
}

impl Combine for Vec<f64> {
    fn zero_like(&self) -> Self {
        vec![0.0; self.len()]
    }

    fn axpy(&mut self, a: f64, x: &Self) {
        assert_eq!(self.len(), x.len(), "axpy length mismatch");
        for (s, v) in self.iter_mut().zip(x) {
            *s += a * v;
        }
    }
}

impl Combine for DMatrix<f64> {
    fn zero_like(&self) -> Self {
        DMatrix::zeros(self.nrows(), self.ncols())
    }

    fn axpy(&mut self, a: f64, x: &Self) {
        assert_eq!(self.shape(), x.shape(), "axpy shape mismatch");
        *self += x * a;
    }
}

pub(crate) fn inner(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm_sq(a: &[f64]) -> f64 {
    inner(a, a)
}
