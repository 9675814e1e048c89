//! Tensor-product quadrature: periodic trapezoid on periodic axes,
//! Gauss-Legendre elsewhere. Reductions are blockwise pairwise sums in a fixed
//! order so results do not depend on the number of worker threads.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::domain::ChartDomain;

const BLOCK: usize = 512;

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, refined by Newton on P_n
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
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
    (nodes, weights)
}

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

/// 1-D rule for one axis.
#[derive(Clone, Debug)]
pub struct AxisRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Tensor-product rule over a chart domain. Point `idx` is decoded in mixed
/// radix with the last axis varying fastest.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    axes: Vec<AxisRule>,
    len: usize,
}

impl QuadratureRule {
    pub fn for_domain(domain: &ChartDomain) -> Self {
        let axes: Vec<AxisRule> = domain
            .axes()
            .iter()
            .map(|a| {
                let n = a.resolution;
                if a.periodic {
                    let h = a.length() / n as f64;
                    AxisRule {
                        nodes: (0..n).map(|j| a.lo + j as f64 * h).collect(),
                        weights: vec![h; n],
                    }
                } else {
                    let (x, w) = gauss_legendre(n);
                    let half = 0.5 * a.length();
                    let mid = 0.5 * (a.lo + a.hi);
                    AxisRule {
                        nodes: x.iter().map(|t| mid + half * t).collect(),
                        weights: w.iter().map(|v| v * half).collect(),
                    }
                }
            })
            .collect();
        let len = axes.iter().map(|r| r.nodes.len()).product();
        Self { axes, len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axis_rules(&self) -> &[AxisRule] {
        &self.axes
    }

    /// Writes point `idx` into `buf` and returns its weight.
    #[inline]
    pub fn point_into(&self, mut idx: usize, buf: &mut [f64]) -> f64 {
        let mut w = 1.0;
        for (a, rule) in self.axes.iter().enumerate().rev() {
            let n = rule.nodes.len();
            let j = idx % n;
            idx /= n;
            buf[a] = rule.nodes[j];
            w *= rule.weights[j];
        }
        w
    }

    pub fn points(&self) -> Vec<(Vec<f64>, f64)> {
        (0..self.len)
            .map(|i| {
                let mut p = vec![0.0; self.dim()];
                let w = self.point_into(i, &mut p);
                (p, w)
            })
            .collect()
    }

    /// `sum_i w_i f(x_i)`, parallel over fixed blocks, deterministic.
    pub fn integrate<F>(&self, f: F) -> Complex64
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let nblocks = self.len.div_ceil(BLOCK);
        let partial: Vec<Complex64> = (0..nblocks)
            .into_par_iter()
            .map(|b| {
                let start = b * BLOCK;
                let end = (start + BLOCK).min(self.len);
                let mut buf = vec![0.0; self.dim()];
                let vals: Vec<Complex64> = (start..end)
                    .map(|i| {
                        let w = self.point_into(i, &mut buf);
                        f(&buf) * w
                    })
                    .collect();
                pairwise_sum(&vals)
            })
            .collect();
        pairwise_sum(&partial)
    }

    /// Maximum of `f` over all nodes (parallel).
    pub fn max_over<F>(&self, f: F) -> f64
    where
        F: Fn(&[f64]) -> f64 + Sync,
    {
        (0..self.len)
            .into_par_iter()
            .map_init(|| vec![0.0; self.dim()], |buf, i| {
                self.point_into(i, buf);
                f(buf)
            })
            .reduce(|| 0.0, f64::max)
    }
}

/// Node/weight list for a chart domain.
pub fn quadrature_rule(domain: &ChartDomain) -> Vec<(Vec<f64>, f64)> {
    QuadratureRule::for_domain(domain).points()
}

/// Recursive pairwise summation.
pub fn pairwise_sum(values: &[Complex64]) -> Complex64 {
    if values.len() <= 8 {
        return values.iter().fold(Complex64::new(0.0, 0.0), |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}
