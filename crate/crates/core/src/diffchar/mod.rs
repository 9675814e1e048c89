//! Cheeger–Simons differential characters with values in `R/Z`.
//!
//! A character stores its curvature form and a procedure returning a real
//! lift of its value on a closed cycle; [`DifferentialCharacter::evaluate`]
//! reduces that lift to `[0, 1)`. Pieces of a cycle flagged thin contribute
//! nothing.

mod freed_lott;
mod suspension;

use std::fmt;
use std::sync::Arc;

use crate::charforms::{chern_form, euler_form, pontryagin_form, transgression_of, TransgressedClass};
use crate::connections::{gauge_action, BundleWithConnection, Structure};
use crate::error::{Error, Result};
use crate::forms::FormField;
use crate::mesh::{ChartDomain, CyclePiece, GeometricCycle, Integrable};
use crate::numeric::frac;

pub use freed_lott::{fl_differential_chern, FLGenerator};
pub use suspension::{
    fiber_integrate_character, fiber_integrate_form, odd_differential_chern, plain_lift, smooth_step,
    steep_step, suspend, suspend_with, suspension_lift, CircleLift, Profile,
};

pub type LiftFn = Arc<dyn Fn(&GeometricCycle) -> Result<f64> + Send + Sync>;

/// Differential character of degree `degree` on a chart: curvature is a
/// closed `degree`-form, values live on `(degree − 1)`-cycles.
#[derive(Clone)]
pub struct DifferentialCharacter {
    name: String,
    degree: usize,
    base: ChartDomain,
    curvature: FormField,
    lift: LiftFn,
}

impl fmt::Debug for DifferentialCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DifferentialCharacter")
            .field("name", &self.name)
            .field("degree", &self.degree)
            .field("base_dim", &self.base.dim())
            .finish()
    }
}

fn live_pieces(z: &GeometricCycle) -> impl Iterator<Item = &CyclePiece> {
    z.pieces().iter().filter(|p| !p.thin)
}

/// `d` of a form, or the vanishing form one degree up when it is top-degree.
fn derivative_or_zero(alpha: &FormField) -> Result<FormField> {
    if alpha.degree() >= alpha.dim() {
        Ok(FormField::zero(alpha.domain(), alpha.degree() + 1, alpha.rank()))
    } else {
        alpha.exterior_derivative()
    }
}

impl DifferentialCharacter {
    pub fn new<F>(name: &str, degree: usize, curvature: FormField, lift: F) -> Result<Self>
    where
        F: Fn(&GeometricCycle) -> Result<f64> + Send + Sync + 'static,
    {
        if degree == 0 {
            return Err(Error::Degree("differential characters have positive degree".into()));
        }
        if curvature.degree() != degree || curvature.rank() != 1 {
            return Err(Error::Degree(format!(
                "curvature of a degree-{degree} character must be a scalar {degree}-form"
            )));
        }
        let base = curvature.domain().clone();
        Ok(Self { name: name.to_string(), degree, base, curvature, lift: Arc::new(lift) })
    }

    pub fn zero(base: &ChartDomain, degree: usize) -> Result<Self> {
        Self::new("0", degree, FormField::zero(base, degree, 1), |_| Ok(0.0))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> &ChartDomain {
        &self.base
    }

    /// The curvature form `δ₁(f)`.
    pub fn curvature(&self) -> &FormField {
        &self.curvature
    }

    fn check_cycle(&self, z: &GeometricCycle) -> Result<()> {
        if z.dim() + 1 != self.degree {
            return Err(Error::Degree(format!(
                "a degree-{} character is evaluated on {}-cycles, got a {}-cycle",
                self.degree,
                self.degree - 1,
                z.dim()
            )));
        }
        if z.target_dim() != self.base.dim() {
            return Err(Error::DomainMismatch("cycle does not map into the character's base".into()));
        }
        Ok(())
    }

    /// Real lift of the value (meaningful modulo 1).
    pub fn evaluate_lift(&self, z: &GeometricCycle) -> Result<f64> {
        self.check_cycle(z)?;
        (self.lift)(z)
    }

    /// Value in `[0, 1)`.
    pub fn evaluate(&self, z: &GeometricCycle) -> Result<f64> {
        Ok(frac(self.evaluate_lift(z)?))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.degree != other.degree {
            return Err(Error::Degree("cannot add characters of different degrees".into()));
        }
        let curvature = self.curvature.plus(&other.curvature)?;
        let (a, b) = (self.lift.clone(), other.lift.clone());
        let name = format!("{} + {}", self.name, other.name);
        Self::new(&name, self.degree, curvature, move |z| Ok(a(z)? + b(z)?))
    }

    pub fn negated(&self) -> Self {
        let lift = self.lift.clone();
        Self {
            name: format!("-({})", self.name),
            curvature: self.curvature.neg(),
            lift: Arc::new(move |z| Ok(-lift(z)?)),
            ..self.clone()
        }
    }

    /// Curvature periods over closed `degree`-cycles, rounded to integers.
    pub fn delta2_periods(&self, basis: &[GeometricCycle]) -> Result<Vec<i64>> {
        basis
            .iter()
            .enumerate()
            .map(|(i, z)| {
                if z.dim() != self.degree {
                    return Err(Error::Degree(format!("cycle {i} has dimension {}", z.dim())));
                }
                let v = self.curvature.integrate(z)?.re;
                let n = v.round();
                if (v - n).abs() > 0.1 {
                    return Err(Error::NonIntegral { cycle: i, value: v });
                }
                Ok(n as i64)
            })
            .collect()
    }
}

/// `δ₁`.
pub fn delta1(f: &DifferentialCharacter) -> FormField {
    f.curvature().clone()
}

pub fn delta2_periods(f: &DifferentialCharacter, basis: &[GeometricCycle]) -> Result<Vec<i64>> {
    f.delta2_periods(basis)
}

/// `i₂(α)`: `z ↦ ∫_z α mod 1`, curvature `dα`.
pub fn from_form(alpha: &FormField) -> Result<DifferentialCharacter> {
    if alpha.rank() != 1 {
        return Err(Error::MatrixIntegrand(alpha.rank()));
    }
    let curvature = derivative_or_zero(alpha)?;
    let a = alpha.clone();
    DifferentialCharacter::new("i2", alpha.degree() + 1, curvature, move |z| {
        let mut total = 0.0;
        for p in live_pieces(z) {
            total += p.orientation * a.pullback(&p.map, &p.domain)?.integrate_domain()?.re;
        }
        Ok(total)
    })
}

/// Connection form of a framed cycle piece: `τ⁻¹ (g*θ) τ + τ⁻¹ dτ`.
pub fn framed_connection(b: &BundleWithConnection, piece: &CyclePiece) -> Result<FormField> {
    let frame = piece.frame.as_ref().ok_or(Error::NotTrivialized)?;
    let theta = b.theta(frame.gauge)?.pullback(&piece.map, &piece.domain)?;
    let tau = frame.matrix.on_domain(&piece.domain)?;
    if tau.rank() != b.rank() {
        return Err(Error::Shape(format!("frame of rank {} for a rank-{} bundle", tau.rank(), b.rank())));
    }
    for x in piece.domain.sample_grid(4) {
        let d = tau.eval(&x).coeff_by_mask(0).determinant();
        if d.norm() <= 1e-12 || !d.is_finite() {
            return Err(Error::SingularGauge(x));
        }
    }
    gauge_action(&theta, &tau.inverse()?)
}

/// Character whose value on a framed cycle is the integral of the
/// transgression from the flat frame connection to the pulled-back one.
fn transgression_character(
    name: &str,
    b: &BundleWithConnection,
    class: TransgressedClass,
    curvature: FormField,
) -> Result<DifferentialCharacter> {
    let bundle = b.clone();
    let degree = class.degree(b.rank());
    DifferentialCharacter::new(name, degree, curvature, move |z| {
        let mut total = 0.0;
        for p in live_pieces(z) {
            let theta = framed_connection(&bundle, p)?;
            let flat = FormField::zero(&p.domain, 1, bundle.rank());
            let t = transgression_of(&flat, &theta, class)?;
            total += p.orientation * t.integrate_domain()?.re;
        }
        Ok(total)
    })
}

/// `ĉ_k(E, ∇)`.
pub fn differential_chern(b: &BundleWithConnection, k: usize) -> Result<DifferentialCharacter> {
    if b.structure() != Structure::Unitary {
        return Err(Error::Structure("differential Chern classes need a unitary bundle".into()));
    }
    if k == 0 {
        return Err(Error::Argument("ĉ_k needs k >= 1".into()));
    }
    let curvature = chern_form(b, k).form;
    transgression_character(&format!("chern_{k}"), b, TransgressedClass::Chern(k), curvature)
}

/// `p̂_k(E, ∇)`.
pub fn differential_pontryagin(b: &BundleWithConnection, k: usize) -> Result<DifferentialCharacter> {
    if k == 0 {
        return Err(Error::Argument("p̂_k needs k >= 1".into()));
    }
    let curvature = pontryagin_form(b, k)?.form;
    transgression_character(&format!("pontryagin_{k}"), b, TransgressedClass::Pontryagin(k), curvature)
}

/// `χ̂(E, ∇)`.
pub fn differential_euler(b: &BundleWithConnection) -> Result<DifferentialCharacter> {
    let curvature = euler_form(b)?.form;
    transgression_character("euler", b, TransgressedClass::Euler, curvature)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connections::library;
    use crate::forms::FormValue;
    use crate::mesh::{Axis, SmoothMap};
    use crate::numeric::circle_distance;
    use nalgebra::DMatrix;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn from_form_winding() {
        let d = ChartDomain::new(vec![Axis::circle(16)]).unwrap();
        let z = GeometricCycle::new(d.clone(), SmoothMap::identity(1), 1.0, &[]).unwrap();
        let one = DMatrix::from_element(1, 1, Complex64::new(0.37 / (2.0 * PI), 0.0));
        let alpha = FormField::constant(&d, FormValue::from_terms(1, 1, 1, &[(&[0], one)]));
        let f = from_form(&alpha).unwrap();
        assert!((f.evaluate(&z).unwrap() - 0.37).abs() < 1e-14);
        assert_eq!(f.degree(), 2);
        assert!(f.evaluate(&GeometricCycle::point(vec![0.0])).is_err());
    }

    #[test]
    fn monopole_latitude_matches_flux() {
        for n in [1, 2, -1] {
            let b = library::monopole(n, 32);
            let c1 = differential_chern(&b, 1).unwrap();
            for th0 in [PI / 6.0, PI / 2.0, 2.0 * PI / 3.0] {
                let v = c1.evaluate(&library::framed_latitude(th0, 64, 1)).unwrap();
                let want = frac(n as f64 * (1.0 - th0.cos()) / 2.0);
                assert!(circle_distance(v, want) < 1e-12, "n={n} θ₀={th0}: {v} vs {want}");
            }
        }
    }

    #[test]
    fn unframed_cycle_is_rejected() {
        let b = library::monopole(1, 16);
        let c1 = differential_chern(&b, 1).unwrap();
        assert_eq!(c1.evaluate(&library::latitude(1.0, 32)), Err(Error::NotTrivialized));
        assert!(differential_chern(&library::tangent_s2(8), 1).is_err());
    }

    #[test]
    fn euler_character_on_cap_boundary() {
        let b = library::tangent_s2(32);
        let chi = differential_euler(&b).unwrap();
        let th0 = 2.0 * PI / 3.0;
        let v = chi.evaluate(&library::framed_latitude(th0, 64, 2)).unwrap();
        assert!(circle_distance(v, 0.5) < 1e-12);
        assert_eq!(chi.delta2_periods(&[library::sphere_cycle(64)]).unwrap(), vec![2]);
    }

    #[test]
    fn non_integral_period_is_reported() {
        let d = library::sphere_domain(32);
        let half = FormField::new(d, 1, 1, |x| {
            FormValue::from_terms(2, 1, 1, &[(&[1], DMatrix::from_element(1, 1, Complex64::new(-0.25 * x[0].cos(), 0.0)))])
        });
        let f = from_form(&half).unwrap();
        let err = f.delta2_periods(&[library::sphere_cycle(32)]).unwrap_err();
        assert!(matches!(err, Error::NonIntegral { cycle: 0, .. }));
    }
}
