//! Pointwise values of differential forms.
//!
//! A homogeneous p-form at a point of an n-dimensional chart is stored as one
//! r x r complex matrix per strictly increasing multi-index, in lexicographic
//! order. Multi-indices are also addressed by bitmask (bit `i` set when `dx_i`
//! occurs). [`ExtValue`] is the full (inhomogeneous) scalar exterior algebra
//! at a point, indexed by bitmask; its even part is a commutative ring.

use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::BigRational;

use crate::symfunc::{rational_to_f64, RingElement};

/// Largest supported chart dimension.
pub const MAX_DIM: usize = 10;

struct DimTable {
    /// masks of each degree, in lexicographic order of their index tuples
    by_degree: Vec<Vec<u32>>,
    /// position of a mask inside its degree list
    position: Vec<u32>,
}

fn tables() -> &'static [DimTable] {
    static TABLES: OnceLock<Vec<DimTable>> = OnceLock::new();
    TABLES.get_or_init(|| (0..=MAX_DIM).map(build_table).collect())
}

fn build_table(dim: usize) -> DimTable {
    let mut by_degree = vec![Vec::new(); dim + 1];
    for p in 0..=dim {
        let mut combo: Vec<usize> = (0..p).collect();
        loop {
            by_degree[p].push(combo.iter().fold(0u32, |m, &i| m | (1 << i)));
            // advance to next combination in lexicographic order
            let mut i = p;
            let mut advanced = false;
            while i > 0 {
                i -= 1;
                if combo[i] < dim - p + i {
                    combo[i] += 1;
                    for j in i + 1..p {
                        combo[j] = combo[j - 1] + 1;
                    }
                    advanced = true;
                    break;
                }
            }
            if !advanced {
                break;
            }
        }
    }
    let mut position = vec![0u32; 1 << dim];
    for list in &by_degree {
        for (idx, &m) in list.iter().enumerate() {
            position[m as usize] = idx as u32;
        }
    }
    DimTable { by_degree, position }
}

/// Masks of all p-multi-indices in an n-dimensional chart.
pub fn basis_masks(dim: usize, degree: usize) -> &'static [u32] {
    assert!(dim <= MAX_DIM, "chart dimension {dim} exceeds {MAX_DIM}");
    if degree > dim {
        return &[];
    }
    &tables()[dim].by_degree[degree]
}

pub fn mask_position(dim: usize, mask: u32) -> usize {
    tables()[dim].position[mask as usize] as usize
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    basis_masks(n, k).len()
}

pub fn mask_to_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

pub fn indices_to_mask(indices: &[usize]) -> Option<u32> {
    let mut mask = 0u32;
    for &i in indices {
        if mask & (1 << i) != 0 {
            return None;
        }
        mask |= 1 << i;
    }
    Some(mask)
}

/// Sign of `dx_a ∧ dx_b` relative to the sorted product, for disjoint masks.
#[inline]
pub fn wedge_sign(a: u32, b: u32) -> f64 {
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    if swaps.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Sign of the permutation sorting a sequence of distinct indices.
pub fn permutation_sign(indices: &[usize]) -> f64 {
    let mut inversions = 0;
    for i in 0..indices.len() {
        for j in i + 1..indices.len() {
            if indices[i] > indices[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Matrix-valued homogeneous form at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct FormValue {
    dim: usize,
    degree: usize,
    rank: usize,
    data: Vec<Complex64>,
}

impl FormValue {
    /// Zero form; a degree above `dim` yields the (empty) vanishing form.
    pub fn zeros(dim: usize, degree: usize, rank: usize) -> Self {
        let n = basis_masks(dim, degree).len();
        Self { dim, degree, rank, data: vec![ZERO; n * rank * rank] }
    }

    /// Scalar 0-form.
    pub fn scalar(dim: usize, value: Complex64) -> Self {
        Self { dim, degree: 0, rank: 1, data: vec![value] }
    }

    /// Matrix-valued 0-form.
    pub fn matrix(dim: usize, m: &DMatrix<Complex64>) -> Self {
        let mut v = Self::zeros(dim, 0, m.nrows());
        v.set_coeff_mask(0, m);
        v
    }

    /// Builds a form from (multi-index, coefficient matrix) pairs.
    /// Unsorted multi-indices are accepted and sorted with the usual sign.
    pub fn from_terms(
        dim: usize,
        degree: usize,
        rank: usize,
        terms: &[(&[usize], DMatrix<Complex64>)],
    ) -> Self {
        let mut v = Self::zeros(dim, degree, rank);
        for (idx, m) in terms {
            v.add_term(idx, m);
        }
        v
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn rank(&self) -> usize {
        self.rank
    }
    pub fn num_coeffs(&self) -> usize {
        basis_masks(self.dim, self.degree).len()
    }
    pub fn masks(&self) -> &'static [u32] {
        basis_masks(self.dim, self.degree)
    }
    pub fn raw(&self) -> &[Complex64] {
        &self.data
    }
    pub fn raw_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    #[inline]
    fn block(&self) -> usize {
        self.rank * self.rank
    }

    #[inline]
    pub fn coeff_slice(&self, position: usize) -> &[Complex64] {
        let b = self.block();
        &self.data[position * b..(position + 1) * b]
    }

    #[inline]
    pub fn coeff_slice_mut(&mut self, position: usize) -> &mut [Complex64] {
        let b = self.block();
        &mut self.data[position * b..(position + 1) * b]
    }

    pub fn coeff_by_mask(&self, mask: u32) -> DMatrix<Complex64> {
        assert_eq!(mask.count_ones() as usize, self.degree);
        let s = self.coeff_slice(mask_position(self.dim, mask));
        DMatrix::from_row_slice(self.rank, self.rank, s)
    }

    /// Coefficient on the multi-index (any order; sign applied).
    pub fn coeff(&self, indices: &[usize]) -> DMatrix<Complex64> {
        match indices_to_mask(indices) {
            Some(mask) if indices.len() == self.degree => {
                self.coeff_by_mask(mask) * Complex64::new(permutation_sign(indices), 0.0)
            }
            _ => DMatrix::zeros(self.rank, self.rank),
        }
    }

    /// Scalar coefficient of a rank-one form.
    pub fn scalar_coeff(&self, indices: &[usize]) -> Complex64 {
        assert_eq!(self.rank, 1);
        self.coeff(indices)[(0, 0)]
    }

    pub fn set_coeff_mask(&mut self, mask: u32, m: &DMatrix<Complex64>) {
        let pos = mask_position(self.dim, mask);
        let r = self.rank;
        let s = self.coeff_slice_mut(pos);
        for i in 0..r {
            for j in 0..r {
                s[i * r + j] = m[(i, j)];
            }
        }
    }

    pub fn add_term(&mut self, indices: &[usize], m: &DMatrix<Complex64>) {
        assert_eq!(indices.len(), self.degree, "multi-index length must equal degree");
        let Some(mask) = indices_to_mask(indices) else {
            return;
        };
        let sign = permutation_sign(indices);
        let pos = mask_position(self.dim, mask);
        let r = self.rank;
        let s = self.coeff_slice_mut(pos);
        for i in 0..r {
            for j in 0..r {
                s[i * r + j] += m[(i, j)] * sign;
            }
        }
    }

    pub fn is_scalar(&self) -> bool {
        self.rank == 1
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn plus(&self, rhs: &Self) -> Self {
        self.check_same_shape(rhs);
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Self { data, ..*self }
    }

    pub fn minus(&self, rhs: &Self) -> Self {
        self.check_same_shape(rhs);
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect();
        Self { data, ..*self }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let data = self.data.iter().map(|a| a * c).collect();
        Self { data, ..*self }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        let data = self.data.iter().map(|a| a * c).collect();
        Self { data, ..*self }
    }

    pub fn add_assign_scaled(&mut self, rhs: &Self, c: Complex64) {
        self.check_same_shape(rhs);
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b * c;
        }
    }

    fn check_same_shape(&self, rhs: &Self) {
        assert!(
            self.dim == rhs.dim && self.degree == rhs.degree && self.rank == rhs.rank,
            "form shape mismatch: (dim {}, deg {}, rank {}) vs (dim {}, deg {}, rank {})",
            self.dim,
            self.degree,
            self.rank,
            rhs.dim,
            rhs.degree,
            rhs.rank
        );
    }

    /// Exterior product with matrix multiplication of coefficients.
    /// Scalar forms multiply matrix forms entrywise.
    pub fn wedge(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim, "wedge of forms on different charts");
        let rank = if self.rank == rhs.rank {
            self.rank
        } else if self.rank == 1 {
            rhs.rank
        } else if rhs.rank == 1 {
            self.rank
        } else {
            panic!("cannot wedge rank {} with rank {}", self.rank, rhs.rank);
        };
        let degree = self.degree + rhs.degree;
        let mut out = Self::zeros(self.dim, degree, rank);
        let ma = self.masks();
        let mb = rhs.masks();
        let r = rank;
        for (ia, &a) in ma.iter().enumerate() {
            let ca = self.coeff_slice(ia);
            if ca.iter().all(|z| *z == ZERO) {
                continue;
            }
            for (ib, &b) in mb.iter().enumerate() {
                if a & b != 0 {
                    continue;
                }
                let cb = rhs.coeff_slice(ib);
                let sign = wedge_sign(a, b);
                let pos = mask_position(self.dim, a | b);
                let dst = &mut out.data[pos * r * r..(pos + 1) * r * r];
                match (self.rank, rhs.rank) {
                    (1, 1) => dst[0] += ca[0] * cb[0] * sign,
                    (1, _) => {
                        let s = ca[0] * sign;
                        for (d, x) in dst.iter_mut().zip(cb) {
                            *d += s * x;
                        }
                    }
                    (_, 1) => {
                        let s = cb[0] * sign;
                        for (d, x) in dst.iter_mut().zip(ca) {
                            *d += s * x;
                        }
                    }
                    _ => {
                        for i in 0..r {
                            for k in 0..r {
                                let aik = ca[i * r + k] * sign;
                                if aik == ZERO {
                                    continue;
                                }
                                for j in 0..r {
                                    dst[i * r + j] += aik * cb[k * r + j];
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// True when the form is degree-overflowed (no coefficients at all).
    pub fn is_overflow(&self) -> bool {
        self.degree > self.dim
    }

    pub fn trace(&self) -> Self {
        let r = self.rank;
        let n = self.num_coeffs();
        let data = (0..n)
            .map(|p| {
                let s = self.coeff_slice(p);
                (0..r).map(|i| s[i * r + i]).sum()
            })
            .collect();
        Self { dim: self.dim, degree: self.degree, rank: 1, data }
    }

    /// Coefficientwise map of the matrix values.
    pub fn map_matrices<F: Fn(DMatrix<Complex64>) -> DMatrix<Complex64>>(&self, f: F) -> Self {
        let mut out = self.clone();
        for &m in self.masks() {
            let c = f(self.coeff_by_mask(m));
            out.set_coeff_mask(m, &c);
        }
        out
    }

    /// Exterior derivative assembled from coefficient partials
    /// `partials[i] = d/dx_i of self`.
    pub fn exterior_from_partials(partials: &[FormValue]) -> Self {
        let first = &partials[0];
        let (dim, degree, rank) = (first.dim, first.degree, first.rank);
        assert_eq!(partials.len(), dim);
        let mut out = Self::zeros(dim, degree + 1, rank);
        let b = rank * rank;
        for (axis, part) in partials.iter().enumerate() {
            let bit = 1u32 << axis;
            for (pos, &m) in first.masks().iter().enumerate() {
                if m & bit != 0 {
                    continue;
                }
                let sign = if (m & (bit - 1)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
                let dst = mask_position(dim, m | bit);
                let src = part.coeff_slice(pos);
                for (d, s) in out.data[dst * b..(dst + 1) * b].iter_mut().zip(src) {
                    *d += s * sign;
                }
            }
        }
        out
    }

    pub fn to_ext(&self) -> ExtValue {
        assert_eq!(self.rank, 1, "only scalar forms embed into the exterior algebra");
        let mut e = ExtValue::zero(self.dim);
        for (pos, &m) in self.masks().iter().enumerate() {
            e.data[m as usize] = self.data[pos];
        }
        e
    }

    pub fn conj_transpose(&self) -> Self {
        self.map_matrices(|m| m.adjoint())
    }
}

/// Scalar element of the full exterior algebra at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtValue {
    dim: usize,
    data: Vec<Complex64>,
}

impl ExtValue {
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= MAX_DIM);
        Self { dim, data: vec![ZERO; 1 << dim] }
    }

    pub fn constant(dim: usize, c: Complex64) -> Self {
        let mut e = Self::zero(dim);
        e.data[0] = c;
        e
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, mask: u32) -> Complex64 {
        self.data[mask as usize]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Homogeneous degree-p part as a scalar [`FormValue`].
    pub fn part(&self, degree: usize) -> FormValue {
        let masks = basis_masks(self.dim, degree);
        FormValue {
            dim: self.dim,
            degree,
            rank: 1,
            data: masks.iter().map(|&m| self.data[m as usize]).collect(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|a| a * c).collect() }
    }
}

impl RingElement for ExtValue {
    fn zero_like(&self) -> Self {
        Self::zero(self.dim)
    }

    fn one_like(&self) -> Self {
        Self::constant(self.dim, Complex64::new(1.0, 0.0))
    }

    fn plus(&self, rhs: &Self) -> Self {
        Self { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect() }
    }

    fn minus(&self, rhs: &Self) -> Self {
        Self { dim: self.dim, data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect() }
    }

    fn times(&self, rhs: &Self) -> Self {
        assert_eq!(self.dim, rhs.dim);
        let mut out = Self::zero(self.dim);
        for (a, &x) in self.data.iter().enumerate() {
            if x == ZERO {
                continue;
            }
            for (b, &y) in rhs.data.iter().enumerate() {
                if y == ZERO || a & b != 0 {
                    continue;
                }
                out.data[a | b] += x * y * wedge_sign(a as u32, b as u32);
            }
        }
        out
    }

    fn scaled(&self, q: &BigRational) -> Self {
        self.scale(Complex64::new(rational_to_f64(q), 0.0))
    }
}
