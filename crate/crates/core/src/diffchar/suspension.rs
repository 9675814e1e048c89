use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, Schur};
use num_complex::Complex64;

use super::{differential_chern, DifferentialCharacter};
use crate::connections::{BundleWithConnection, Gauge, Structure, Transition};
use crate::error::{Error, Result};
use crate::forms::{basis_masks, FormField, FormValue};
use crate::mesh::{Frame, GeometricCycle, Integrable};

const TWO_PI: f64 = 2.0 * PI;

type CMat = DMatrix<Complex64>;

/// Builds `S^1 × z` (fiber first) from a cycle `z` of the base, attaching
/// whatever frames the bundle on `S^1 × X` needs.
pub type CircleLift = Arc<dyn Fn(&GeometricCycle) -> Result<GeometricCycle> + Send + Sync>;

/// Smooth step `[0, 1] → [0, 1]` with all derivatives vanishing at both ends,
/// together with its derivative.
#[derive(Clone, Copy, Debug)]
pub struct Profile {
    pub value: fn(f64) -> f64,
    pub slope: fn(f64) -> f64,
}

fn bump_pair(x: f64) -> (f64, f64) {
    let a = if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    let b = if x < 1.0 { (-1.0 / (1.0 - x)).exp() } else { 0.0 };
    (a, b)
}

fn psi(x: f64) -> f64 {
    let (a, b) = bump_pair(x);
    a / (a + b)
}

fn psi_slope(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    let (a, b) = bump_pair(x);
    a * b * (1.0 / (x * x) + 1.0 / ((1.0 - x) * (1.0 - x))) / ((a + b) * (a + b))
}

fn steep(x: f64) -> f64 {
    let p = psi(x);
    p * p * (3.0 - 2.0 * p)
}

fn steep_slope(x: f64) -> f64 {
    let p = psi(x);
    6.0 * p * (1.0 - p) * psi_slope(x)
}

pub fn smooth_step() -> Profile {
    Profile { value: psi, slope: psi_slope }
}

/// `ψ²(3 − 2ψ)`: same endpoints, different shape.
pub fn steep_step() -> Profile {
    Profile { value: steep, slope: steep_slope }
}

fn unitary_residual(m: &CMat) -> f64 {
    (m * m.adjoint() - CMat::identity(m.nrows(), m.ncols())).norm()
}

/// Lifts a form on `X` to `S^1 × X` (axis indices shifted by one).
fn shift_up(v: &FormValue) -> FormValue {
    let (dim, deg, r) = (v.dim() + 1, v.degree(), v.rank());
    let mut out = FormValue::zeros(dim, deg, r);
    for &mask in v.masks() {
        out.set_coeff_mask(mask << 1, &v.coeff_by_mask(mask));
    }
    out
}

fn wrap(s: f64) -> f64 {
    s.rem_euclid(TWO_PI)
}

/// `S(g)` with the standard profile.
pub fn suspend(g: &FormField, resolution: usize) -> Result<BundleWithConnection> {
    suspend_with(g, smooth_step(), resolution)
}

/// Trivial bundle on `S^1 × X` with connection `ρ(s) g⁻¹dg`, `ρ(s) = profile(s/2π)`,
/// glued across `s = 0 ≡ 2π` by `g`.
///
/// Gauge 0 covers `s ∈ (π/4, 7π/4)` and uses the connection formula verbatim
/// (extended to all real `s`); gauge 1 covers the seam. The transition from
/// gauge 0 to gauge 1 is `g⁻¹` on the `s < π` side and the identity on the
/// other.
pub fn suspend_with(g: &FormField, profile: Profile, resolution: usize) -> Result<BundleWithConnection> {
    if g.degree() != 0 {
        return Err(Error::Degree("suspension needs a matrix 0-form".into()));
    }
    let x_dom = g.domain().clone();
    for x in x_dom.sample_grid(4) {
        if unitary_residual(&g.eval(&x).coeff_by_mask(0)) > 1e-8 {
            return Err(Error::NotUnitary(x));
        }
    }
    let r = g.rank();
    let n = x_dom.dim();
    let base = x_dom.with_leading_circle(resolution);
    let w = if n == 0 { FormField::zero(&x_dom, 1, r) } else { g.inverse()?.wedge(&g.exterior_derivative()?)? };

    let rho = move |s: f64| (profile.value)(s / TWO_PI);
    let rho_slope = move |s: f64| (profile.slope)(s / TWO_PI) / TWO_PI;
    let ww = w.clone();
    let theta_a = FormField::new(base.clone(), 1, r, move |x| shift_up(&ww.eval(&x[1..])).scale_real(rho(x[0])));
    let ww = w.clone();
    let theta_a = theta_a.with_partials(move |x| {
        let wx = shift_up(&ww.eval(&x[1..]));
        let mut out = vec![wx.scale_real(rho_slope(x[0]))];
        if n > 0 {
            out.extend(ww.partials(&x[1..]).iter().map(|p| shift_up(p).scale_real(rho(x[0]))));
        }
        out
    });

    let (ta, gg, ww) = (theta_a.clone(), g.clone(), w.clone());
    let theta_b = FormField::new(base.clone(), 1, r, move |x| {
        let s = wrap(x[0] + PI) - PI;
        let mut y = x.to_vec();
        if s < 0.0 {
            y[0] = s + TWO_PI;
            return ta.eval(&y);
        }
        y[0] = s;
        let gm = gg.eval(&x[1..]).coeff_by_mask(0);
        let gi = gm.adjoint();
        ta.eval(&y).map_matrices(|m| &gi * m * &gm).plus(&shift_up(&ww.eval(&x[1..])))
    });

    let gg = g.clone();
    let t = FormField::matrix_function(&base, r, move |x| {
        if wrap(x[0]) < PI {
            gg.eval(&x[1..]).coeff_by_mask(0).adjoint()
        } else {
            CMat::identity(r, r)
        }
    });
    BundleWithConnection::new(
        r,
        Structure::Unitary,
        base,
        vec![
            Gauge::new("interior", |x| (PI / 4.0..7.0 * PI / 4.0).contains(&wrap(x[0])), theta_a),
            Gauge::new("seam", |x| !(PI / 2.0..=3.0 * PI / 2.0).contains(&wrap(x[0])), theta_b),
        ],
        vec![Transition { from: 0, to: 1, map: t }],
    )
}

/// `∫_{S^1}` over the leading circle axis: `ds ∧ β ↦ (∫ β ds)`, no other
/// normalization, so `(ds/2π) ∧ p*β ↦ β`.
pub fn fiber_integrate_form(w: &FormField) -> Result<FormField> {
    let d = w.domain();
    if d.dim() == 0 || !d.axis(0).periodic || (d.axis(0).length() - TWO_PI).abs() > 1e-12 {
        return Err(Error::Domain("fiber integration needs a leading circle axis of length 2π".into()));
    }
    if w.degree() == 0 {
        return Err(Error::Degree("fiber integration lowers degree; got a 0-form".into()));
    }
    let target = d.without_axis(0);
    let (p, r, n) = (w.degree() - 1, w.rank(), target.dim());
    let ax = d.axis(0).clone();
    let nodes: Vec<f64> = (0..ax.resolution).map(|j| ax.lo + j as f64 * ax.length() / ax.resolution as f64).collect();
    let h = ax.length() / ax.resolution as f64;
    let ww = w.clone();
    Ok(FormField::new(target, p, r, move |x| {
        let mut out = FormValue::zeros(n, p, r);
        let mut y = Vec::with_capacity(n + 1);
        for &s in &nodes {
            y.clear();
            y.push(s);
            y.extend_from_slice(x);
            let v = ww.eval(&y);
            for &mask in basis_masks(n, p) {
                let c = v.coeff_by_mask((mask << 1) | 1);
                out.add_term(&crate::forms::mask_to_indices(mask), &(c * Complex64::new(h, 0.0)));
            }
        }
        out
    }))
}

/// `S^1 × z` without frames.
pub fn plain_lift(resolution: usize) -> CircleLift {
    Arc::new(move |z| Ok(z.product_with_circle(resolution)))
}

/// `τ(s) = exp((s/2π) Log M)` for a unitary `M`, principal logarithm.
fn unitary_power(m: &CMat, t: f64) -> CMat {
    if m.nrows() == 1 {
        return CMat::from_element(1, 1, (m[(0, 0)].ln() * t).exp());
    }
    let (q, tri) = Schur::new(m.clone()).unpack();
    let d = CMat::from_diagonal(&tri.diagonal().map(|l| (l.ln() * t).exp()));
    &q * d * q.adjoint()
}

/// Lift for `S(g)`: the frame `exp((s/2π) Log g⁻¹)` in gauge 0, which
/// closes up across the seam. Needs `g` to avoid the eigenvalue `−1` on `z`.
pub fn suspension_lift(g: &FormField, resolution: usize) -> CircleLift {
    let g = g.clone();
    Arc::new(move |z| {
        let mut out = z.product_with_circle(resolution);
        let pieces: Vec<_> = out.pieces().to_vec();
        for (i, (lifted, orig)) in pieces.iter().zip(z.pieces()).enumerate() {
            let (gg, map) = (g.clone(), orig.map.clone());
            let tau = FormField::matrix_function(&lifted.domain, g.rank(), move |x| {
                let ginv = gg.eval(&map.eval(&x[1..])).coeff_by_mask(0).adjoint();
                unitary_power(&ginv, x[0] / TWO_PI)
            });
            out = out.with_piece_frame(i, Frame { gauge: 0, matrix: tau })?;
        }
        Ok(out)
    })
}

/// `∫_{S^1} f`: evaluates `f` on `S^1 × z`; curvature `−∫_{S^1} δ₁(f)`
/// (the sign comes from `∂(S^1 × c) = −S^1 × ∂c`).
pub fn fiber_integrate_character(f: &DifferentialCharacter, lift: CircleLift) -> Result<DifferentialCharacter> {
    if f.degree() < 2 {
        return Err(Error::Degree("fiber integration needs a character of degree at least 2".into()));
    }
    let curvature = fiber_integrate_form(f.curvature())?.neg();
    let inner = f.lift.clone();
    let name = format!("∫ {}", f.name());
    DifferentialCharacter::new(&name, f.degree() - 1, curvature, move |z| inner(&lift(z)?))
}

/// `ĉ^odd_{2k+1}(g) = ∫_{S^1} ĉ_{k+1}(S(g))`.
pub fn odd_differential_chern(g: &FormField, k: usize, resolution: usize) -> Result<DifferentialCharacter> {
    let sb = suspend(g, resolution)?;
    let ch = differential_chern(&sb, k + 1)?;
    fiber_integrate_character(&ch, suspension_lift(g, resolution))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::ChartDomain;
    use crate::charforms::chern_form;
    use crate::diffchar::from_form;
    use crate::mesh::{Axis, SmoothMap};
    use crate::numeric::{circle_distance, frac};

    fn winding(m: i32, res: usize) -> FormField {
        let d = ChartDomain::new(vec![Axis::circle(res)]).unwrap();
        let mf = m as f64;
        FormField::scalar_function(&d, move |x| Complex64::from_polar(1.0, mf * x[0]), move |x| {
            vec![Complex64::new(0.0, mf) * Complex64::from_polar(1.0, mf * x[0])]
        })
    }

    fn torus(m: i32, res: usize) -> (BundleWithConnection, GeometricCycle) {
        let b = suspend(&winding(m, res), res).unwrap();
        let z = GeometricCycle::new(b.base().clone(), SmoothMap::identity(2), 1.0, &[]).unwrap();
        (b, z)
    }

    #[test]
    fn profiles_are_steps() {
        for p in [smooth_step(), steep_step()] {
            assert_eq!((p.value)(0.0), 0.0);
            assert_eq!((p.value)(1.0), 1.0);
            assert!(((p.value)(0.5) - 0.5).abs() < 1e-15);
            let h = 1e-5;
            for x in [0.2, 0.5, 0.77] {
                let fd = ((p.value)(x + h) - (p.value)(x - h)) / (2.0 * h);
                assert!((fd - (p.slope)(x)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn suspension_overlap_and_degree() {
        for m in [-1, 1, 2] {
            let (b, z) = torus(m, 64);
            b.validate(5).unwrap();
            let c1 = chern_form(&b, 1).form.integrate(&z).unwrap().re;
            assert!((c1 + m as f64).abs() < 1e-8, "m={m}: {c1}");
        }
    }

    #[test]
    fn fiber_integral_of_forms() {
        let d = ChartDomain::new(vec![Axis::circle(16), Axis::interval(0.0, 1.0, 8)]).unwrap();
        let w = FormField::new(d.clone(), 2, 1, |x| {
            let c = Complex64::new((1.0 + x[0].cos()) * x[1] / TWO_PI, 0.0);
            FormValue::from_terms(2, 2, 1, &[(&[0, 1], DMatrix::from_element(1, 1, c))])
        });
        let f = fiber_integrate_form(&w).unwrap();
        assert!((f.eval(&[0.3]).scalar_coeff(&[0]).re - 0.3).abs() < 1e-13);
        let pulled = FormField::differential(&d, 1);
        assert!(fiber_integrate_form(&pulled).unwrap().eval(&[0.4]).sup_norm() == 0.0);
        let ds = FormField::differential(&d, 0);
        assert!((fiber_integrate_form(&ds).unwrap().eval(&[0.4]).raw()[0].re - TWO_PI).abs() < 1e-13);
    }

    #[test]
    fn point_value_is_phase() {
        let pt = ChartDomain::point();
        for a in [0.4, 2.5, -1.2] {
            let g = FormField::constant(&pt, FormValue::scalar(0, Complex64::from_polar(1.0, a)));
            let f = odd_differential_chern(&g, 0, 64).unwrap();
            let v = f.evaluate(&GeometricCycle::point(Vec::new())).unwrap();
            assert!(circle_distance(v, frac(a / TWO_PI)) < 1e-12, "{v}");
        }
    }

    #[test]
    fn odd_character_on_circle() {
        let m = 2;
        let f = odd_differential_chern(&winding(m, 48), 0, 48).unwrap();
        let d = ChartDomain::new(vec![Axis::circle(48)]).unwrap();
        let z = GeometricCycle::new(d, SmoothMap::identity(1), 1.0, &[]).unwrap();
        assert!((f.curvature().integrate(&z).unwrap().re - m as f64).abs() < 1e-8);
        for x0 in [0.3, 1.4] {
            let v = f.evaluate(&GeometricCycle::point(vec![x0])).unwrap();
            assert!(circle_distance(v, frac(m as f64 * x0 / TWO_PI)) < 1e-10);
        }
    }

    #[test]
    fn fiber_integral_of_form_character() {
        let d = ChartDomain::new(vec![Axis::circle(32), Axis::circle(32)]).unwrap();
        let alpha = FormField::new(d.clone(), 2, 1, |x| {
            let c = Complex64::new(x[1].sin() / TWO_PI, 0.0);
            FormValue::from_terms(2, 2, 1, &[(&[0, 1], DMatrix::from_element(1, 1, c))])
        });
        let f = fiber_integrate_character(&from_form(&alpha).unwrap(), plain_lift(32)).unwrap();
        let base = d.without_axis(0);
        let beta = FormField::new(base.clone(), 1, 1, |x| {
            FormValue::from_terms(1, 1, 1, &[(&[0], DMatrix::from_element(1, 1, Complex64::new(x[0].sin(), 0.0)))])
        });
        let direct = from_form(&beta).unwrap();
        let h = SmoothMap::new(1, 1, |t| vec![t[0] + 0.3 * t[0].sin()]);
        let z = GeometricCycle::new(base.clone(), SmoothMap::identity(1), 1.0, &[]).unwrap();
        let z = z.reparametrized(&h, 1.0).unwrap().pushforward(&SmoothMap::affine(DMatrix::from_element(1, 1, 1.0), vec![0.2])).unwrap();
        assert!(circle_distance(f.evaluate(&z).unwrap(), direct.evaluate(&z).unwrap()) < 1e-10);
    }
}
