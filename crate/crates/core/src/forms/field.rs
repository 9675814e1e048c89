use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::value::{basis_masks, FormValue};
use crate::error::{Error, Result};
use crate::mesh::{ChartDomain, Integrable, QuadratureRule, SmoothMap};
use crate::numeric::{central_richardson, det_real};

pub type Evaluator = Arc<dyn Fn(&[f64]) -> FormValue + Send + Sync>;
/// Per-axis partial derivatives of the coefficient array.
pub type PartialsFn = Arc<dyn Fn(&[f64]) -> Vec<FormValue> + Send + Sync>;

/// Matrix-valued differential form on a chart, given by a pointwise evaluator.
#[derive(Clone)]
pub struct FormField {
    domain: ChartDomain,
    degree: usize,
    rank: usize,
    eval: Evaluator,
    partials: Option<PartialsFn>,
}

impl fmt::Debug for FormField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FormField")
            .field("dim", &self.domain.dim())
            .field("degree", &self.degree)
            .field("rank", &self.rank)
            .field("analytic_derivative", &self.partials.is_some())
            .finish()
    }
}

fn mismatch(what: &str) -> Error {
    Error::DomainMismatch(what.to_string())
}

impl FormField {
    pub fn new<F>(domain: ChartDomain, degree: usize, rank: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> FormValue + Send + Sync + 'static,
    {
        Self { domain, degree, rank, eval: Arc::new(f), partials: None }
    }

    /// Attaches analytic partial derivatives `x -> [d/dx_0, ..., d/dx_{n-1}]`.
    pub fn with_partials<J>(mut self, j: J) -> Self
    where
        J: Fn(&[f64]) -> Vec<FormValue> + Send + Sync + 'static,
    {
        self.partials = Some(Arc::new(j));
        self
    }

    pub fn zero(domain: &ChartDomain, degree: usize, rank: usize) -> Self {
        let dim = domain.dim();
        let z = FormValue::zeros(dim, degree, rank);
        let zp = vec![z.clone(); dim];
        Self::new(domain.clone(), degree, rank, move |_| z.clone()).with_partials(move |_| zp.clone())
    }

    pub fn constant(domain: &ChartDomain, value: FormValue) -> Self {
        assert_eq!(value.dim(), domain.dim(), "constant form on a chart of another dimension");
        let (degree, rank) = (value.degree(), value.rank());
        let zp = vec![FormValue::zeros(domain.dim(), degree, rank); domain.dim()];
        Self::new(domain.clone(), degree, rank, move |_| value.clone()).with_partials(move |_| zp.clone())
    }

    /// Scalar 0-form from a real function with analytic gradient.
    pub fn scalar_function<F, G>(domain: &ChartDomain, f: F, grad: G) -> Self
    where
        F: Fn(&[f64]) -> Complex64 + Send + Sync + 'static,
        G: Fn(&[f64]) -> Vec<Complex64> + Send + Sync + 'static,
    {
        let dim = domain.dim();
        Self::new(domain.clone(), 0, 1, move |x| FormValue::scalar(dim, f(x))).with_partials(move |x| {
            grad(x).into_iter().map(|g| FormValue::scalar(dim, g)).collect()
        })
    }

    /// Matrix-valued 0-form without analytic derivative.
    pub fn matrix_function<F>(domain: &ChartDomain, rank: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> DMatrix<Complex64> + Send + Sync + 'static,
    {
        let dim = domain.dim();
        Self::new(domain.clone(), 0, rank, move |x| FormValue::matrix(dim, &f(x)))
    }

    /// The coordinate function `x_i`.
    pub fn coordinate(domain: &ChartDomain, i: usize) -> Self {
        let dim = domain.dim();
        assert!(i < dim);
        Self::scalar_function(domain, move |x| Complex64::new(x[i], 0.0), move |_| {
            (0..dim).map(|k| Complex64::new(if k == i { 1.0 } else { 0.0 }, 0.0)).collect()
        })
    }

    /// The constant 1-form `dx_i`.
    pub fn differential(domain: &ChartDomain, i: usize) -> Self {
        let dim = domain.dim();
        assert!(i < dim);
        let one = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
        Self::constant(domain, FormValue::from_terms(dim, 1, 1, &[(&[i], one)]))
    }

    pub fn domain(&self) -> &ChartDomain {
        &self.domain
    }
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn rank(&self) -> usize {
        self.rank
    }
    pub fn has_analytic_derivative(&self) -> bool {
        self.partials.is_some()
    }

    /// Same evaluator on a domain of the same shape (e.g. another resolution).
    pub fn on_domain(&self, domain: &ChartDomain) -> Result<Self> {
        if !self.domain.same_shape(domain) {
            return Err(mismatch("domain of a different shape"));
        }
        Ok(Self { domain: domain.clone(), ..self.clone() })
    }

    pub fn with_resolution(&self, n: usize) -> Self {
        Self { domain: self.domain.with_resolution(n), ..self.clone() }
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> FormValue {
        (self.eval)(x)
    }

    /// Partial derivatives along each axis: analytic when available, otherwise
    /// Richardson-extrapolated central differences.
    pub fn partials(&self, x: &[f64]) -> Vec<FormValue> {
        if let Some(j) = &self.partials {
            return j(x);
        }
        let steps = self.domain.fd_steps();
        let f = |y: &[f64]| self.eval(y).raw().to_vec();
        let template = FormValue::zeros(self.dim(), self.degree, self.rank);
        (0..self.dim())
            .map(|axis| {
                let d: Vec<Complex64> = central_richardson(&f, x, axis, steps[axis]);
                let mut v = template.clone();
                v.raw_mut().copy_from_slice(&d);
                v
            })
            .collect()
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if !self.domain.same_shape(&other.domain) {
            return Err(mismatch("forms live on different chart domains"));
        }
        Ok(())
    }

    pub fn wedge(&self, other: &Self) -> Result<Self> {
        let degree = self.degree + other.degree;
        if degree > self.dim() {
            return Err(Error::Degree(format!(
                "wedge of degrees {} and {} exceeds dimension {}",
                self.degree,
                other.degree,
                self.dim()
            )));
        }
        self.wedge_or_zero(other)
    }

    /// Wedge product that returns the vanishing form on degree overflow.
    pub fn wedge_or_zero(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        if self.rank != other.rank && self.rank != 1 && other.rank != 1 {
            return Err(Error::Shape(format!("cannot multiply rank {} by rank {}", self.rank, other.rank)));
        }
        let rank = self.rank.max(other.rank);
        let degree = self.degree + other.degree;
        let (a, b) = (self.clone(), other.clone());
        let mut out = Self::new(self.domain.clone(), degree, rank, move |x| a.eval(x).wedge(&b.eval(x)));
        if self.partials.is_some() && other.partials.is_some() {
            let (a, b) = (self.clone(), other.clone());
            out.partials = Some(Arc::new(move |x| {
                let (va, vb) = (a.eval(x), b.eval(x));
                let (pa, pb) = (a.partials(x), b.partials(x));
                pa.iter().zip(&pb).map(|(da, db)| da.wedge(&vb).plus(&va.wedge(db))).collect()
            }));
        }
        Ok(out)
    }

    fn zip_with(&self, other: &Self, sign: f64) -> Result<Self> {
        self.check_compatible(other)?;
        if self.degree != other.degree || self.rank != other.rank {
            return Err(Error::Shape(format!(
                "cannot add a degree-{} rank-{} form to a degree-{} rank-{} form",
                self.degree, self.rank, other.degree, other.rank
            )));
        }
        let (a, b) = (self.clone(), other.clone());
        let c = Complex64::new(sign, 0.0);
        let mut out = Self::new(self.domain.clone(), self.degree, self.rank, move |x| {
            let mut v = a.eval(x);
            v.add_assign_scaled(&b.eval(x), c);
            v
        });
        if self.partials.is_some() && other.partials.is_some() {
            let (a, b) = (self.clone(), other.clone());
            out.partials = Some(Arc::new(move |x| {
                let mut pa = a.partials(x);
                for (da, db) in pa.iter_mut().zip(&b.partials(x)) {
                    da.add_assign_scaled(db, c);
                }
                pa
            }));
        }
        Ok(out)
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, 1.0)
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, -1.0)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map_linear(move |v| v.scale(c))
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    pub fn neg(&self) -> Self {
        self.scale_real(-1.0)
    }

    /// Pointwise linear map of values; derivatives map the same way.
    fn map_linear<F>(&self, f: F) -> Self
    where
        F: Fn(&FormValue) -> FormValue + Send + Sync + 'static,
    {
        let f = Arc::new(f);
        let a = self.clone();
        let g = f.clone();
        let probe = f(&FormValue::zeros(self.dim(), self.degree, self.rank));
        let mut out = Self::new(self.domain.clone(), probe.degree(), probe.rank(), move |x| g(&a.eval(x)));
        if self.partials.is_some() {
            let a = self.clone();
            out.partials = Some(Arc::new(move |x| a.partials(x).iter().map(|p| f(p)).collect()));
        }
        out
    }

    pub fn trace(&self) -> Self {
        self.map_linear(FormValue::trace)
    }

    pub fn conj_transpose(&self) -> Self {
        self.map_linear(FormValue::conj_transpose)
    }

    /// Real part of the coefficients.
    pub fn real_part(&self) -> Self {
        self.map_linear(|v| {
            let mut out = v.clone();
            for z in out.raw_mut() {
                *z = Complex64::new(z.re, 0.0);
            }
            out
        })
    }

    /// Pointwise inverse of a matrix-valued 0-form (NaN where singular).
    pub fn inverse(&self) -> Result<Self> {
        if self.degree != 0 {
            return Err(Error::Degree("only 0-forms can be inverted".into()));
        }
        let dim = self.dim();
        let r = self.rank;
        let invert = move |v: &FormValue| -> DMatrix<Complex64> {
            v.coeff_by_mask(0)
                .try_inverse()
                .unwrap_or_else(|| DMatrix::from_element(r, r, Complex64::new(f64::NAN, f64::NAN)))
        };
        let a = self.clone();
        let mut out = Self::new(self.domain.clone(), 0, r, move |x| FormValue::matrix(dim, &invert(&a.eval(x))));
        if self.partials.is_some() {
            let a = self.clone();
            out.partials = Some(Arc::new(move |x| {
                let inv = invert(&a.eval(x));
                a.partials(x)
                    .iter()
                    .map(|p| FormValue::matrix(dim, &(-(&inv * p.coeff_by_mask(0) * &inv))))
                    .collect()
            }));
        }
        Ok(out)
    }

    pub fn exterior_derivative(&self) -> Result<Self> {
        if self.degree >= self.dim() {
            return Err(Error::Degree(format!(
                "exterior derivative of a top-degree form (degree {}, dimension {})",
                self.degree,
                self.dim()
            )));
        }
        let a = self.clone();
        Ok(Self::new(self.domain.clone(), self.degree + 1, self.rank, move |x| {
            FormValue::exterior_from_partials(&a.partials(x))
        }))
    }

    /// Pullback along `map: source -> self.domain`. Forms of degree above the
    /// source dimension pull back to the vanishing form.
    pub fn pullback(&self, map: &SmoothMap, source: &ChartDomain) -> Result<Self> {
        if map.target_dim() != self.dim() || map.source_dim() != source.dim() {
            return Err(mismatch("map dimensions do not match the form and source chart"));
        }
        if map.is_identity() && self.domain.same_shape(source) {
            return Ok(Self { domain: source.clone(), ..self.clone() });
        }
        let (p, sdim, tdim, rank) = (self.degree, source.dim(), self.dim(), self.rank);
        if p > sdim {
            return Ok(Self::zero(source, p, rank));
        }
        let a = self.clone();
        let map = map.clone();
        let steps = source.fd_steps();
        Ok(Self::new(source.clone(), p, rank, move |s| {
            let x = map.eval(s);
            let v = a.eval(&x);
            let mut out = FormValue::zeros(sdim, p, rank);
            if p == 0 {
                out.raw_mut().copy_from_slice(v.raw());
                return out;
            }
            let jac = map.jacobian(s, &steps);
            let tmasks = basis_masks(tdim, p);
            let smasks = basis_masks(sdim, p);
            let b = rank * rank;
            for (tp, &tm) in tmasks.iter().enumerate() {
                let src = v.coeff_slice(tp);
                if src.iter().all(|z| z.norm_sqr() == 0.0) {
                    continue;
                }
                let rows = crate::forms::mask_to_indices(tm);
                for (sp, &sm) in smasks.iter().enumerate() {
                    let cols = crate::forms::mask_to_indices(sm);
                    let minor = DMatrix::from_fn(p, p, |i, j| jac[(rows[i], cols[j])]);
                    let det = det_real(&minor);
                    if det == 0.0 {
                        continue;
                    }
                    let dst = &mut out.raw_mut()[sp * b..(sp + 1) * b];
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d += s * det;
                    }
                }
            }
            out
        }))
    }

    /// `∫` over the form's own chart (degree must equal dimension).
    pub fn integrate_domain(&self) -> Result<Complex64> {
        if self.rank != 1 {
            return Err(Error::MatrixIntegrand(self.rank));
        }
        if self.degree != self.dim() {
            return Err(Error::Degree(format!(
                "cannot integrate a {}-form over a {}-dimensional chart",
                self.degree,
                self.dim()
            )));
        }
        let rule = QuadratureRule::for_domain(&self.domain);
        Ok(rule.integrate(|x| self.eval(x).raw()[0]))
    }

    /// Integral over a cycle or chain: pullback along every piece, quadrature,
    /// orientation sign.
    pub fn integrate<C: Integrable + ?Sized>(&self, over: &C) -> Result<Complex64> {
        if self.rank != 1 {
            return Err(Error::MatrixIntegrand(self.rank));
        }
        let mut total = Complex64::new(0.0, 0.0);
        for piece in over.pieces() {
            if piece.domain.dim() != self.degree {
                return Err(Error::Degree(format!(
                    "cannot integrate a {}-form over a {}-dimensional piece",
                    self.degree,
                    piece.domain.dim()
                )));
            }
            let pulled = self.pullback(&piece.map, &piece.domain)?;
            total += pulled.integrate_domain()? * piece.orientation;
        }
        Ok(total)
    }

    /// Largest coefficient modulus over an interior sample grid.
    pub fn sup_norm_on_grid(&self, m: usize) -> f64 {
        self.domain.sample_grid(m).iter().map(|x| self.eval(x).sup_norm()).fold(0.0, f64::max)
    }
}

/// Largest pointwise difference of two forms on a sample grid.
pub fn sup_distance(a: &FormField, b: &FormField, m: usize) -> Result<f64> {
    Ok(a.minus(b)?.sup_norm_on_grid(m))
}
