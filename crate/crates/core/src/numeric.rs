//! Small numerical helpers shared across modules.

use std::ops::{Add, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Fourth-order central difference along `axis` with step `h`, extrapolated
/// once (Richardson, `h` and `h/2`). `f` returns a flat coefficient vector.
pub fn central_richardson<T, F>(f: &F, x: &[f64], axis: usize, h: f64) -> Vec<T>
where
    T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>,
    F: Fn(&[f64]) -> Vec<T> + ?Sized,
{
    let stencil = |h: f64| -> Vec<T> {
        let mut y = x.to_vec();
        let mut at = |off: f64| {
            y[axis] = x[axis] + off;
            f(&y)
        };
        let p2 = at(2.0 * h);
        let p1 = at(h);
        let m1 = at(-h);
        let m2 = at(-2.0 * h);
        let inv = 1.0 / (12.0 * h);
        p2.iter()
            .zip(&p1)
            .zip(&m1)
            .zip(&m2)
            .map(|(((&a, &b), &c), &d)| (b * 8.0 - c * 8.0 + d - a) * inv)
            .collect()
    };
    let coarse = stencil(h);
    let fine = stencil(0.5 * h);
    fine.iter().zip(&coarse).map(|(&f, &c)| f * (16.0 / 15.0) - c * (1.0 / 15.0)).collect()
}

/// Fractional part in `[0, 1)`.
pub fn frac(x: f64) -> f64 {
    let f = x - x.floor();
    if f >= 1.0 {
        0.0
    } else {
        f
    }
}

/// Distance on `R/Z`.
pub fn circle_distance(a: f64, b: f64) -> f64 {
    let d = frac(a - b);
    d.min(1.0 - d)
}

/// Determinant of a small real matrix by partial-pivot elimination.
pub fn det_real(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 1.0;
    }
    let mut a = m.clone();
    let mut det = 1.0;
    for c in 0..n {
        let mut piv = c;
        for r in c + 1..n {
            if a[(r, c)].abs() > a[(piv, c)].abs() {
                piv = r;
            }
        }
        if a[(piv, c)] == 0.0 {
            return 0.0;
        }
        if piv != c {
            a.swap_rows(piv, c);
            det = -det;
        }
        let p = a[(c, c)];
        det *= p;
        for r in c + 1..n {
            let factor = a[(r, c)] / p;
            if factor != 0.0 {
                for k in c..n {
                    let v = a[(c, k)];
                    a[(r, k)] -= factor * v;
                }
            }
        }
    }
    det
}

pub fn cmat_sup_norm(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn ci(im: f64) -> Complex64 {
    Complex64::new(0.0, im)
}
