//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use chernforge::connections::library::random_torus_data;
use chernforge::connections::Structure;
use chernforge::forms::{basis_masks, ExtValue, FormField, FormValue};
use chernforge::mesh::ChartDomain;
use chernforge::symfunc::RingElement;
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// `e_k(x_1..x_n)` by summing over all k-subsets.
pub fn elementary_brute(xs: &[BigRational], k: usize) -> BigRational {
    let n = xs.len();
    let mut total = BigRational::zero();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let mut prod = BigRational::one();
        for (i, x) in xs.iter().enumerate() {
            if mask & (1 << i) != 0 {
                prod *= x;
            }
        }
        total += prod;
    }
    total
}

pub fn power_sum(xs: &[BigRational], j: usize) -> BigRational {
    xs.iter().fold(BigRational::zero(), |acc, x| {
        let mut p = BigRational::one();
        for _ in 0..j {
            p *= x;
        }
        acc + p
    })
}

pub fn random_rational(rng: &mut ChaCha8Rng) -> BigRational {
    let num = rng.random_range(-30i64..=30);
    let den = rng.random_range(1i64..=12);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

fn permutations(n: usize) -> Vec<(f64, Vec<usize>)> {
    if n == 0 {
        return vec![(1.0, Vec::new())];
    }
    let mut out = Vec::new();
    for (sign, p) in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            let s = if (p.len() - pos) % 2 == 0 { sign } else { -sign };
            out.push((s, q));
        }
    }
    out
}

/// Entry `(i, j)` of a matrix-valued form as an exterior-algebra element.
pub fn entry_ext(v: &FormValue, i: usize, j: usize) -> ExtValue {
    let mut s = FormValue::zeros(v.dim(), v.degree(), 1);
    for &mask in v.masks() {
        let m = DMatrix::from_element(1, 1, v.coeff_by_mask(mask)[(i, j)]);
        s.set_coeff_mask(mask, &m);
    }
    s.to_ext()
}

/// `det(1 + (i/2π) Ω)` by the Leibniz expansion over the commutative even
/// subalgebra; its degree-2k part is `c_k`.
pub fn total_chern_leibniz(omega: &FormValue) -> ExtValue {
    let r = omega.rank();
    let dim = omega.dim();
    let x = omega.scale(Complex64::new(0.0, 1.0 / (2.0 * std::f64::consts::PI)));
    let one = ExtValue::constant(dim, Complex64::new(1.0, 0.0));
    let entries: Vec<Vec<ExtValue>> = (0..r)
        .map(|i| {
            (0..r)
                .map(|j| {
                    let e = entry_ext(&x, i, j);
                    if i == j {
                        e.plus(&one)
                    } else {
                        e
                    }
                })
                .collect()
        })
        .collect();
    let mut total = ExtValue::zero(dim);
    for (sign, p) in permutations(r) {
        let mut prod = one.clone();
        for (i, &j) in p.iter().enumerate() {
            prod = prod.times(&entries[i][j]);
        }
        total = total.plus(&prod.scale(Complex64::new(sign, 0.0)));
    }
    total
}

/// Random `u(r)`-valued 2-form in `dim` dimensions.
pub fn random_curvature(rng: &mut ChaCha8Rng, dim: usize, rank: usize) -> FormValue {
    let mut v = FormValue::zeros(dim, 2, rank);
    for &mask in basis_masks(dim, 2) {
        let a = DMatrix::from_fn(rank, rank, |_, _| Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)));
        v.set_coeff_mask(mask, &((&a - a.adjoint()) * Complex64::new(0.5, 0.0)));
    }
    v
}

/// Real scalar 1-form on a torus with analytic partials.
pub fn random_real_one_form(seed: u64, domain: &ChartDomain, scale: f64) -> FormField {
    random_torus_data(seed, 1, domain.dim(), Structure::Unitary, scale)
        .form(domain)
        .scale(Complex64::new(0.0, -1.0))
}

pub fn max_abs(v: &ExtValue) -> f64 {
    v.data().iter().map(|z| z.norm()).fold(0.0, f64::max)
}
