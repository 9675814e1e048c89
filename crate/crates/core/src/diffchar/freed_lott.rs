use std::sync::Arc;

use num_complex::Complex64;

use super::{differential_chern, from_form, DifferentialCharacter};
use crate::charforms::power_sums_at;
use crate::connections::BundleWithConnection;
use crate::error::{Error, Result};
use crate::forms::{ExtValue, FormField, FormValue};
use crate::mesh::gauss_legendre;
use crate::symfunc::{factorial, rational_to_f64, sk_of_aggregate, sk_partial_derivative, EvenAggregate, RingElement};

/// Freed–Lott generator `(E, ∇, φ)`: `phi[j − 1]` is the odd component
/// `φ_[2j−1]` of a scalar form on the base of the bundle.
#[derive(Clone, Debug)]
pub struct FLGenerator {
    bundle: BundleWithConnection,
    phi: Vec<FormField>,
}

impl FLGenerator {
    pub fn new(bundle: BundleWithConnection, phi: Vec<FormField>) -> Result<Self> {
        for (i, f) in phi.iter().enumerate() {
            let j = i + 1;
            if f.degree() != 2 * j - 1 || f.rank() != 1 {
                return Err(Error::Degree(format!("φ component {j} must be a scalar {}-form", 2 * j - 1)));
            }
            if !f.domain().same_shape(bundle.base()) {
                return Err(Error::DomainMismatch(format!("φ component {j} lives on another chart")));
            }
            if !f.has_analytic_derivative() {
                return Err(Error::MissingDerivative(format!("φ component {j}")));
            }
        }
        Ok(Self { bundle, phi })
    }

    pub fn bundle(&self) -> &BundleWithConnection {
        &self.bundle
    }

    pub fn phi(&self) -> &[FormField] {
        &self.phi
    }
}

/// Pointwise data of a generator: `ch_j(∇)`, `dφ_[2j−1]` and `φ_[2j−1]` for
/// `j = 1..k`.
struct Pointwise {
    ch: Vec<ExtValue>,
    dphi: Vec<ExtValue>,
    phi: Vec<ExtValue>,
}

fn pointwise(omega: &FormField, phi: &[FormField], k: usize, x: &[f64]) -> Pointwise {
    let dim = omega.dim();
    let p = power_sums_at(&omega.eval(x), k);
    let ch = p.iter().enumerate().map(|(i, pj)| pj.scale(Complex64::new(1.0 / rational_to_f64(&factorial(i + 1)), 0.0))).collect();
    let mut dphi = Vec::with_capacity(k);
    let mut ph = Vec::with_capacity(k);
    for j in 1..=k {
        match phi.get(j - 1) {
            Some(f) if f.degree() < dim => {
                dphi.push(FormValue::exterior_from_partials(&f.partials(x)).to_ext());
                ph.push(f.eval(x).to_ext());
            }
            Some(f) if f.degree() == dim => {
                dphi.push(ExtValue::zero(dim));
                ph.push(f.eval(x).to_ext());
            }
            _ => {
                dphi.push(ExtValue::zero(dim));
                ph.push(ExtValue::zero(dim));
            }
        }
    }
    Pointwise { ch, dphi, phi: ph }
}

/// `ch(∇) + t·dφ` truncated at index `k`.
fn shifted_aggregate(rank: usize, pw: &Pointwise, t: f64) -> EvenAggregate<ExtValue> {
    let dim = pw.ch.first().map(|c| c.dim()).unwrap_or(0);
    let mut comps = vec![ExtValue::constant(dim, Complex64::new(rank as f64, 0.0))];
    for (c, d) in pw.ch.iter().zip(&pw.dphi) {
        comps.push(c.plus(&d.scale(Complex64::new(t, 0.0))));
    }
    EvenAggregate::new(comps).expect("degree-0 component present")
}

/// `ĉ_k(E, ∇, φ) = ĉ_k(E, ∇) + i₂(T_k(φ))` with curvature `s_k(ch(∇) + dφ)`,
/// where `T_k(φ) = ∫₀¹ Σ_j ∂s_k/∂P_j(ch(∇) + t dφ) ∧ j!·φ_[2j−1] dt`.
pub fn fl_differential_chern(gen: &FLGenerator, k: usize) -> Result<DifferentialCharacter> {
    if k == 0 {
        return Err(Error::Argument("ĉ_k needs k >= 1".into()));
    }
    let b = &gen.bundle;
    let base = b.base().clone();
    let dim = base.dim();
    let rank = b.rank();
    let omega = b.patched_curvature();
    let phi: Arc<Vec<FormField>> = Arc::new(gen.phi.clone());

    let (om, ph) = (omega.clone(), phi.clone());
    let curvature = FormField::new(base.clone(), 2 * k, 1, move |x| {
        let pw = pointwise(&om, &ph, k, x);
        sk_of_aggregate(&shifted_aggregate(rank, &pw, 1.0), k).expect("aggregate reaches index k").part(2 * k)
    });

    let partials = (1..=k).map(|j| sk_partial_derivative(k, j, k)).collect::<Result<Vec<_>>>()?;
    let (t, w) = gauss_legendre(8);
    let nodes: Vec<(f64, f64)> = t.iter().zip(&w).map(|(t, w)| (0.5 * (t + 1.0), 0.5 * w)).collect();
    let (om, ph) = (omega, phi);
    let transgression = FormField::new(base.clone(), 2 * k - 1, 1, move |x| {
        let pw = pointwise(&om, &ph, k, x);
        let one = ExtValue::constant(dim, Complex64::new(1.0, 0.0));
        let mut total = ExtValue::zero(dim);
        for &(t, w) in &nodes {
            let p = shifted_aggregate(rank, &pw, t).power_sums(k);
            for j in 1..=k {
                let coeff = partials[j - 1].eval(&one, &p);
                let jf = rational_to_f64(&factorial(j));
                total = total.plus(&coeff.times(&pw.phi[j - 1]).scale(Complex64::new(w * jf, 0.0)));
            }
        }
        total.part(2 * k - 1)
    });

    let chern = differential_chern(b, k)?;
    let correction = from_form(&transgression)?;
    let (a, c) = (chern.lift.clone(), correction.lift.clone());
    DifferentialCharacter::new(&format!("fl_chern_{k}"), 2 * k, curvature, move |z| Ok(a(z)? + c(z)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connections::library;
    use crate::forms::sup_distance;
    use crate::numeric::circle_distance;
    use nalgebra::DMatrix;

    fn phi1(d: &crate::mesh::ChartDomain, a: f64) -> FormField {
        let dim = d.dim();
        FormField::new(d.clone(), 1, 1, move |x| {
            let m = DMatrix::from_element(1, 1, Complex64::new(a * x[0].sin(), 0.0));
            FormValue::from_terms(dim, 1, 1, &[(&[1], m)])
        })
        .with_partials(move |x| {
            let m = DMatrix::from_element(1, 1, Complex64::new(a * x[0].cos(), 0.0));
            let mut out = vec![FormValue::from_terms(dim, 1, 1, &[(&[1], m)])];
            out.extend((1..dim).map(|_| FormValue::zeros(dim, 1, 1)));
            out
        })
    }

    #[test]
    fn zero_phi_reduces_to_chern() {
        let b = library::monopole(1, 24);
        let gen = FLGenerator::new(b.clone(), Vec::new()).unwrap();
        let fl = fl_differential_chern(&gen, 1).unwrap();
        let c1 = differential_chern(&b, 1).unwrap();
        let z = library::framed_latitude(1.1, 48, 1);
        assert_eq!(fl.evaluate(&z).unwrap(), c1.evaluate(&z).unwrap());
        assert!(sup_distance(fl.curvature(), c1.curvature(), 4).unwrap() < 1e-12);
    }

    #[test]
    fn phi_shifts_by_its_integral() {
        let b = library::monopole(1, 24);
        let d = b.base().clone();
        let gen = FLGenerator::new(b.clone(), vec![phi1(&d, 0.3)]).unwrap();
        let fl = fl_differential_chern(&gen, 1).unwrap();
        let c1 = differential_chern(&b, 1).unwrap();
        let th0 = 1.1;
        let z = library::framed_latitude(th0, 64, 1);
        let want = c1.evaluate(&z).unwrap() + 0.3 * th0.sin() * 2.0 * std::f64::consts::PI;
        assert!(circle_distance(fl.evaluate(&z).unwrap(), frac1(want)) < 1e-10);
    }

    fn frac1(x: f64) -> f64 {
        crate::numeric::frac(x)
    }

    #[test]
    fn generator_without_derivative_is_rejected() {
        let b = library::monopole(1, 8);
        let d = b.base().clone();
        let f = FormField::new(d, 1, 1, |_| FormValue::zeros(2, 1, 1));
        assert!(matches!(FLGenerator::new(b, vec![f]), Err(Error::MissingDerivative(_))));
    }
}
