use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::numeric::central_richardson;

pub type PointFn = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;
/// Jacobian as a `target_dim x source_dim` matrix.
pub type JacobianFn = Arc<dyn Fn(&[f64]) -> DMatrix<f64> + Send + Sync>;

/// Smooth map between coordinate spaces, with an optional analytic Jacobian.
#[derive(Clone)]
pub struct SmoothMap {
    source_dim: usize,
    target_dim: usize,
    eval: PointFn,
    jacobian: Option<JacobianFn>,
    identity: bool,
}

impl fmt::Debug for SmoothMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SmoothMap")
            .field("source_dim", &self.source_dim)
            .field("target_dim", &self.target_dim)
            .field("analytic_jacobian", &self.jacobian.is_some())
            .field("identity", &self.identity)
            .finish()
    }
}

impl SmoothMap {
    pub fn new<F>(source_dim: usize, target_dim: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Self { source_dim, target_dim, eval: Arc::new(f), jacobian: None, identity: false }
    }

    pub fn with_jacobian<J>(mut self, j: J) -> Self
    where
        J: Fn(&[f64]) -> DMatrix<f64> + Send + Sync + 'static,
    {
        self.jacobian = Some(Arc::new(j));
        self
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::new(dim, dim, |x| x.to_vec())
            .with_jacobian(move |_| DMatrix::identity(dim, dim));
        m.identity = true;
        m
    }

    /// `x -> A x + b`.
    pub fn affine(matrix: DMatrix<f64>, offset: Vec<f64>) -> Self {
        let (t, s) = matrix.shape();
        assert_eq!(offset.len(), t);
        let a = matrix.clone();
        Self::new(s, t, move |x| {
            (0..t).map(|i| offset[i] + (0..s).map(|j| a[(i, j)] * x[j]).sum::<f64>()).collect()
        })
        .with_jacobian(move |_| matrix.clone())
    }

    /// Map `R^0 -> R^n` onto a fixed point.
    pub fn constant(point: Vec<f64>, source_dim: usize) -> Self {
        let t = point.len();
        Self::new(source_dim, t, move |_| point.clone())
            .with_jacobian(move |_| DMatrix::zeros(t, source_dim))
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn is_identity(&self) -> bool {
        self.identity
    }

    pub fn has_jacobian(&self) -> bool {
        self.jacobian.is_some()
    }

    pub fn eval(&self, x: &[f64]) -> Vec<f64> {
        (self.eval)(x)
    }

    /// Analytic Jacobian if present, otherwise finite differences with the
    /// given per-axis steps.
    pub fn jacobian(&self, x: &[f64], steps: &[f64]) -> DMatrix<f64> {
        if let Some(j) = &self.jacobian {
            return j(x);
        }
        let mut jac = DMatrix::zeros(self.target_dim, self.source_dim);
        let f = |y: &[f64]| (self.eval)(y);
        for s in 0..self.source_dim {
            let col = central_richardson(&f, x, s, steps[s]);
            for t in 0..self.target_dim {
                jac[(t, s)] = col[t];
            }
        }
        jac
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &SmoothMap) -> SmoothMap {
        assert_eq!(inner.target_dim, self.source_dim, "cannot compose maps: dimension mismatch");
        if self.identity {
            return inner.clone();
        }
        if inner.identity {
            return self.clone();
        }
        let (outer_f, inner_f) = (self.eval.clone(), inner.eval.clone());
        let mut out = SmoothMap {
            source_dim: inner.source_dim,
            target_dim: self.target_dim,
            eval: Arc::new(move |x| outer_f(&inner_f(x))),
            jacobian: None,
            identity: false,
        };
        if let (Some(jo), Some(ji)) = (self.jacobian.clone(), inner.jacobian.clone()) {
            let inner_f = inner.eval.clone();
            out.jacobian = Some(Arc::new(move |x| jo(&inner_f(x)) * ji(x)));
        }
        out
    }
}
