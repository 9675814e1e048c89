//! Characteristic forms of curvature and Chern–Simons transgressions.
//!
//! Chern-type forms use `x = i/2π`: `P_j = tr((xΩ)^j)`, `ch_j = P_j / j!`,
//! and `c_k` is obtained from the power sums by the Newton recurrence in the
//! (commutative) even exterior algebra at each point.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::connections::{BundleWithConnection, Region, Structure};
use crate::error::{Error, Result};
use crate::forms::{ExtValue, FormField, FormValue};
use crate::mesh::{gauss_legendre, GeometricCycle};
use crate::symfunc::{
    elementary_sequence, factorial, rational_to_f64, sk_partial_derivative, EvenAggregate, RingElement,
    SymPolynomial,
};

/// Nodes of the Gauss–Legendre rule in the homotopy parameter.
pub const TRANSGRESSION_NODES: usize = 8;

/// `i / 2π`.
pub fn chern_scale() -> Complex64 {
    Complex64::new(0.0, 1.0 / (2.0 * PI))
}

/// `P_1..P_jmax` of a curvature value.
pub fn power_sums_at(omega: &FormValue, jmax: usize) -> Vec<ExtValue> {
    let x = omega.scale(chern_scale());
    let mut out = Vec::with_capacity(jmax);
    let mut pow = x.clone();
    for j in 1..=jmax {
        if j > 1 {
            pow = pow.wedge(&x);
        }
        out.push(pow.trace().to_ext());
    }
    out
}

/// `c_0..c_kmax` of a curvature value.
pub fn chern_sequence_at(omega: &FormValue, kmax: usize) -> Vec<ExtValue> {
    if kmax == 0 {
        return vec![ExtValue::constant(omega.dim(), Complex64::new(1.0, 0.0))];
    }
    elementary_sequence(&power_sums_at(omega, kmax), kmax).expect("kmax >= 1 power sums supplied")
}

/// Total Chern form `Σ_k c_k` of a curvature value.
pub fn total_chern_at(omega: &FormValue) -> ExtValue {
    let kmax = omega.dim() / 2;
    chern_sequence_at(omega, kmax).iter().fold(ExtValue::zero(omega.dim()), |acc, c| acc.plus(c))
}

fn perfect_matchings(n: usize) -> Vec<(f64, Vec<(usize, usize)>)> {
    fn rec(rest: &[usize]) -> Vec<(f64, Vec<(usize, usize)>)> {
        if rest.is_empty() {
            return vec![(1.0, Vec::new())];
        }
        let mut out = Vec::new();
        let first = rest[0];
        for j in 1..rest.len() {
            let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
            let remaining: Vec<usize> = rest[1..].iter().enumerate().filter(|&(i, _)| i + 1 != j).map(|(_, &v)| v).collect();
            for (s, mut m) in rec(&remaining) {
                m.insert(0, (first, rest[j]));
                out.push((sign * s, m));
            }
        }
        out
    }
    rec(&(0..n).collect::<Vec<_>>())
}

fn entry_form(v: &FormValue, i: usize, j: usize) -> ExtValue {
    let r = v.rank();
    let mut s = FormValue::zeros(v.dim(), v.degree(), 1);
    for (pos, z) in s.raw_mut().iter_mut().enumerate() {
        *z = v.coeff_slice(pos)[i * r + j];
    }
    s.to_ext()
}

/// `Pf(Ω / 2π)` by expansion over perfect matchings.
pub fn pfaffian_at(omega: &FormValue) -> ExtValue {
    let r = omega.rank();
    let scaled = omega.scale_real(1.0 / (2.0 * PI));
    let one = ExtValue::constant(omega.dim(), Complex64::new(1.0, 0.0));
    let mut total = ExtValue::zero(omega.dim());
    for (sign, m) in perfect_matchings(r) {
        let prod = m.iter().fold(one.clone(), |acc, &(i, j)| acc.times(&entry_form(&scaled, i, j)));
        total = total.plus(&prod.scale(Complex64::new(sign, 0.0)));
    }
    total
}

/// `d/ds Pf((Ω + sη)/2π)` at `s = 0`.
fn polarized_pfaffian_at(eta: &FormValue, omega: &FormValue) -> ExtValue {
    let r = omega.rank();
    let (e, o) = (eta.scale_real(1.0 / (2.0 * PI)), omega.scale_real(1.0 / (2.0 * PI)));
    let mut total = ExtValue::zero(omega.dim());
    for (sign, m) in perfect_matchings(r) {
        for p in 0..m.len() {
            let mut prod = entry_form(&e, m[p].0, m[p].1);
            for (q, &(i, j)) in m.iter().enumerate() {
                if q != p {
                    prod = prod.times(&entry_form(&o, i, j));
                }
            }
            total = total.plus(&prod.scale(Complex64::new(sign, 0.0)));
        }
    }
    total
}

/// Homogeneous part of degree `p` of a pointwise form-valued map.
fn homogeneous<F>(domain: &crate::mesh::ChartDomain, degree: usize, f: F) -> FormField
where
    F: Fn(&[f64]) -> ExtValue + Send + Sync + 'static,
{
    FormField::new(domain.clone(), degree, 1, move |x| f(x).part(degree))
}

/// `P_j(Ω)` as a scalar `2j`-form.
pub fn power_sum_of(omega: &FormField, j: usize) -> FormField {
    let om = omega.clone();
    homogeneous(omega.domain(), 2 * j, move |x| power_sums_at(&om.eval(x), j).pop().expect("j >= 1"))
}

/// `c_k(Ω)` as a scalar `2k`-form.
pub fn chern_of(omega: &FormField, k: usize) -> FormField {
    let om = omega.clone();
    homogeneous(omega.domain(), 2 * k, move |x| chern_sequence_at(&om.eval(x), k).swap_remove(k))
}

pub fn euler_of(omega: &FormField) -> FormField {
    let om = omega.clone();
    homogeneous(omega.domain(), omega.rank(), move |x| pfaffian_at(&om.eval(x)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CharacteristicKind {
    PowerSum(usize),
    Chern(usize),
    ChernCharacter(usize),
    Pontryagin(usize),
    Euler,
}

/// A characteristic form together with its kind.
#[derive(Clone, Debug)]
pub struct CharacteristicForm {
    pub kind: CharacteristicKind,
    pub form: FormField,
}

impl CharacteristicForm {
    pub fn degree(&self) -> usize {
        self.form.degree()
    }

    /// Sup-norm of `d` of the form on an interior grid (0 for top degree).
    pub fn closedness_residual(&self, m: usize) -> Result<f64> {
        if self.form.degree() >= self.form.dim() {
            return Ok(0.0);
        }
        Ok(self.form.exterior_derivative()?.sup_norm_on_grid(m))
    }

    /// Largest imaginary part of a coefficient on an interior grid.
    pub fn imaginary_residual(&self, m: usize) -> f64 {
        self.form
            .domain()
            .sample_grid(m)
            .iter()
            .flat_map(|x| self.form.eval(x).raw().iter().map(|z| z.im.abs()).collect::<Vec<_>>())
            .fold(0.0, f64::max)
    }

    /// Real parts of the integrals over closed cycles of matching dimension.
    pub fn periods(&self, cycles: &[GeometricCycle]) -> Result<Vec<f64>> {
        cycles.iter().map(|z| Ok(self.form.integrate(z)?.re)).collect()
    }
}

pub fn power_sum_form(b: &BundleWithConnection, j: usize) -> CharacteristicForm {
    CharacteristicForm { kind: CharacteristicKind::PowerSum(j), form: power_sum_of(&b.patched_curvature(), j) }
}

pub fn chern_form(b: &BundleWithConnection, k: usize) -> CharacteristicForm {
    CharacteristicForm { kind: CharacteristicKind::Chern(k), form: chern_of(&b.patched_curvature(), k) }
}

/// `ch(∇)` truncated at `j ≤ dim/2`: component `j` is `P_j / j!`, component 0
/// the rank.
pub fn chern_character_form(b: &BundleWithConnection) -> EvenAggregate<CharacteristicForm> {
    let omega = b.patched_curvature();
    let dim = b.base().dim();
    let mut comps = vec![CharacteristicForm {
        kind: CharacteristicKind::ChernCharacter(0),
        form: FormField::constant(b.base(), FormValue::scalar(dim, Complex64::new(b.rank() as f64, 0.0))),
    }];
    for j in 1..=dim / 2 {
        let inv = 1.0 / rational_to_f64(&factorial(j));
        comps.push(CharacteristicForm {
            kind: CharacteristicKind::ChernCharacter(j),
            form: power_sum_of(&omega, j).scale_real(inv),
        });
    }
    EvenAggregate::new(comps).expect("degree-0 component present")
}

/// Pointwise values of an aggregate of forms as exterior-algebra elements.
pub fn aggregate_at(agg: &EvenAggregate<CharacteristicForm>, x: &[f64]) -> EvenAggregate<ExtValue> {
    agg.map(|c| c.form.eval(x).to_ext())
}

/// `c_0, c_1, ...` up to `dim/2`; their pointwise sum is the total Chern form.
pub fn total_chern_form(b: &BundleWithConnection) -> Vec<CharacteristicForm> {
    let omega = b.patched_curvature();
    (0..=b.base().dim() / 2)
        .map(|k| CharacteristicForm { kind: CharacteristicKind::Chern(k), form: chern_of(&omega, k) })
        .collect()
}

/// Pointwise total Chern form from its components.
pub fn total_at(components: &[CharacteristicForm], x: &[f64]) -> ExtValue {
    let dim = components[0].form.dim();
    components.iter().fold(ExtValue::zero(dim), |acc, c| acc.plus(&c.form.eval(x).to_ext()))
}

fn require_orthogonal(b: &BundleWithConnection) -> Result<()> {
    if b.structure() != Structure::SpecialOrthogonal {
        return Err(Error::Structure("Pontryagin and Euler forms need a special-orthogonal bundle".into()));
    }
    Ok(())
}

/// `p_k = (−1)^k c_{2k}` of the complexified curvature.
pub fn pontryagin_form(b: &BundleWithConnection, k: usize) -> Result<CharacteristicForm> {
    require_orthogonal(b)?;
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let form = chern_of(&b.patched_curvature(), 2 * k).scale_real(sign);
    Ok(CharacteristicForm { kind: CharacteristicKind::Pontryagin(k), form })
}

pub fn euler_form(b: &BundleWithConnection) -> Result<CharacteristicForm> {
    require_orthogonal(b)?;
    if !b.rank().is_multiple_of(2) {
        return Err(Error::Shape(format!("Euler form needs even rank, got {}", b.rank())));
    }
    Ok(CharacteristicForm { kind: CharacteristicKind::Euler, form: euler_of(&b.patched_curvature()) })
}

/// Invariant polynomial whose transgression is computed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransgressedClass {
    Chern(usize),
    Pontryagin(usize),
    Euler,
}

impl TransgressedClass {
    pub fn degree(&self, rank: usize) -> usize {
        match *self {
            TransgressedClass::Chern(k) => 2 * k,
            TransgressedClass::Pontryagin(k) => 4 * k,
            TransgressedClass::Euler => rank,
        }
    }
}

/// Precomputed `∂s_k/∂P_j`, `j = 1..k`.
fn sk_partials(k: usize) -> Result<Vec<SymPolynomial>> {
    (1..=k).map(|j| sk_partial_derivative(k, j, k)).collect()
}

/// Pointwise Chern transgression integrand summed over the t-nodes.
struct ChernKernel {
    k: usize,
    partials: Vec<SymPolynomial>,
    nodes: Vec<(f64, f64)>,
}

impl ChernKernel {
    fn new(k: usize) -> Result<Self> {
        let (t, w) = gauss_legendre(TRANSGRESSION_NODES);
        let nodes = t.iter().zip(&w).map(|(t, w)| (0.5 * (t + 1.0), 0.5 * w)).collect();
        Ok(Self { k, partials: sk_partials(k)?, nodes })
    }

    /// `∫₀¹ Σ_j ∂s_k/∂P_j(P(Ω_t)) ∧ j·tr(xη ∧ (xΩ_t)^{j−1}) dt`.
    fn eval(&self, eta: &FormValue, omega_at: impl Fn(f64) -> FormValue) -> ExtValue {
        let dim = eta.dim();
        let one = ExtValue::constant(dim, Complex64::new(1.0, 0.0));
        let xeta = eta.scale(chern_scale());
        let mut total = ExtValue::zero(dim);
        for &(t, w) in &self.nodes {
            let omega = omega_at(t);
            let p = power_sums_at(&omega, self.k);
            let xo = omega.scale(chern_scale());
            let mut chain = xeta.clone();
            for j in 1..=self.k {
                if j > 1 {
                    chain = chain.wedge(&xo);
                }
                let coeff = self.partials[j - 1].eval(&one, &p);
                let term = coeff.times(&chain.trace().to_ext());
                total = total.plus(&term.scale(Complex64::new(w * j as f64, 0.0)));
            }
        }
        total
    }
}

struct EulerKernel {
    nodes: Vec<(f64, f64)>,
}

impl EulerKernel {
    fn new() -> Self {
        let (t, w) = gauss_legendre(TRANSGRESSION_NODES);
        Self { nodes: t.iter().zip(&w).map(|(t, w)| (0.5 * (t + 1.0), 0.5 * w)).collect() }
    }

    fn eval(&self, eta: &FormValue, omega_at: impl Fn(f64) -> FormValue) -> ExtValue {
        let mut total = ExtValue::zero(eta.dim());
        for &(t, w) in &self.nodes {
            total = total.plus(&polarized_pfaffian_at(eta, &omega_at(t)).scale(Complex64::new(w, 0.0)));
        }
        total
    }
}

enum Kernel {
    Chern(ChernKernel, f64),
    Euler(EulerKernel),
}

impl Kernel {
    fn new(class: TransgressedClass) -> Result<Self> {
        Ok(match class {
            TransgressedClass::Chern(k) => Kernel::Chern(ChernKernel::new(k)?, 1.0),
            TransgressedClass::Pontryagin(k) => {
                Kernel::Chern(ChernKernel::new(2 * k)?, if k % 2 == 0 { 1.0 } else { -1.0 })
            }
            TransgressedClass::Euler => Kernel::Euler(EulerKernel::new()),
        })
    }

    fn eval(&self, eta: &FormValue, omega_at: impl Fn(f64) -> FormValue) -> ExtValue {
        match self {
            Kernel::Chern(k, sign) => k.eval(eta, omega_at).scale(Complex64::new(*sign, 0.0)),
            Kernel::Euler(k) => k.eval(eta, omega_at),
        }
    }
}

/// Pointwise data of the straight-line homotopy `θ_t = θ⁰ + tη` at `x`:
/// returns `η` and a closure `t ↦ Ω_t`.
fn homotopy_at(theta0: &FormField, theta1: &FormField, x: &[f64]) -> (FormValue, impl Fn(f64) -> FormValue) {
    let (v0, v1) = (theta0.eval(x), theta1.eval(x));
    let eta = v1.minus(&v0);
    let dim = v0.dim();
    let (d0, d1) = if dim >= 2 {
        (
            FormValue::exterior_from_partials(&theta0.partials(x)),
            FormValue::exterior_from_partials(&theta1.partials(x)),
        )
    } else {
        (FormValue::zeros(dim, 2, v0.rank()), FormValue::zeros(dim, 2, v0.rank()))
    };
    let e = eta.clone();
    let omega_at = move |t: f64| {
        let th = v0.plus(&e.scale_real(t));
        d0.scale_real(1.0 - t).plus(&d1.scale_real(t)).plus(&th.wedge(&th))
    };
    (eta, omega_at)
}

/// Transgression form between two connection 1-forms on the same chart:
/// `dT = Q(Ω¹) − Q(Ω⁰)` for the chosen invariant polynomial `Q`.
pub fn transgression_of(theta0: &FormField, theta1: &FormField, class: TransgressedClass) -> Result<FormField> {
    if theta0.degree() != 1 || theta1.degree() != 1 || theta0.rank() != theta1.rank() {
        return Err(Error::Shape("transgression needs two connection 1-forms of equal rank".into()));
    }
    if !theta0.domain().same_shape(theta1.domain()) {
        return Err(Error::DomainMismatch("connections on different charts".into()));
    }
    if class == TransgressedClass::Euler && !theta0.rank().is_multiple_of(2) {
        return Err(Error::Shape("Euler transgression needs even rank".into()));
    }
    let degree = class.degree(theta0.rank()) - 1;
    let kernel = Arc::new(Kernel::new(class)?);
    let (a, b) = (theta0.clone(), theta1.clone());
    Ok(homogeneous(theta0.domain(), degree, move |x| {
        let (eta, omega_at) = homotopy_at(&a, &b, x);
        kernel.eval(&eta, omega_at)
    }))
}

/// Transgression between two connections on bundles with matching gauge
/// structure, patched by the gauge regions of `b0`.
pub fn transgression(b0: &BundleWithConnection, b1: &BundleWithConnection, class: TransgressedClass) -> Result<FormField> {
    if b0.rank() != b1.rank() || !b0.base().same_shape(b1.base()) || b0.gauges().len() != b1.gauges().len() {
        return Err(Error::DomainMismatch("transgression between bundles of different shape".into()));
    }
    let pieces = b0
        .gauges()
        .iter()
        .zip(b1.gauges())
        .map(|(g0, g1)| transgression_of(&g0.theta, &g1.theta, class))
        .collect::<Result<Vec<_>>>()?;
    if pieces.len() == 1 {
        return Ok(pieces.into_iter().next().expect("one gauge"));
    }
    let regions: Vec<Region> = b0.gauges().iter().map(|g| g.region.clone()).collect();
    let degree = pieces[0].degree();
    Ok(FormField::new(b0.base().clone(), degree, 1, move |x| {
        let i = regions.iter().position(|r| r(x)).unwrap_or(0);
        pieces[i].eval(x)
    }))
}

/// `Tc_k(∇¹, ∇⁰)` with its endpoints.
#[derive(Clone, Debug)]
pub struct TransgressionForm {
    pub k: usize,
    pub form: FormField,
    pub from: BundleWithConnection,
    pub to: BundleWithConnection,
}

impl TransgressionForm {
    /// Sup-norm of `dT − (c_k(∇¹) − c_k(∇⁰))` on an interior grid.
    pub fn residual(&self, m: usize) -> Result<f64> {
        let f = &self.form;
        let dt = if f.degree() >= f.dim() {
            FormField::zero(f.domain(), f.degree() + 1, 1)
        } else {
            f.exterior_derivative()?
        };
        let diff = chern_form(&self.to, self.k).form.minus(&chern_form(&self.from, self.k).form)?;
        crate::forms::sup_distance(&dt, &diff, m)
    }
}

pub fn transgression_chern(b0: &BundleWithConnection, b1: &BundleWithConnection, k: usize) -> Result<TransgressionForm> {
    if k == 0 {
        return Err(Error::Argument("transgression of c_0 is not defined".into()));
    }
    let form = transgression(b0, b1, TransgressedClass::Chern(k))?;
    Ok(TransgressionForm { k, form, from: b0.clone(), to: b1.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connections::library;
    use crate::symfunc::sk_of_aggregate;

    #[test]
    fn matchings_of_four() {
        let m = perfect_matchings(4);
        assert_eq!(m.len(), 3);
        let signs: Vec<f64> = m.iter().map(|(s, _)| *s).collect();
        assert_eq!(signs, vec![1.0, -1.0, 1.0]);
    }

    #[test]
    fn monopole_first_chern_form() {
        let b = library::monopole(3, 64);
        let c1 = chern_form(&b, 1);
        for x in b.base().sample_grid(5) {
            let want = 3.0 / (4.0 * PI) * x[0].sin();
            assert!((c1.form.eval(&x).scalar_coeff(&[0, 1]) - Complex64::new(want, 0.0)).norm() < 1e-10);
        }
        let total = c1.form.integrate(&library::sphere_cycle(64)).unwrap();
        assert!((total.re - 3.0).abs() < 1e-9);
        assert_eq!(chern_form(&b, 2).form.eval(&[0.3, 0.2]).raw().len(), 0);
    }

    #[test]
    fn ch_aggregate_reproduces_chern() {
        let b = library::random_torus_bundle(11, 3, 4, Structure::Unitary, 8);
        let ch = chern_character_form(&b);
        for x in b.base().sample_grid(2) {
            let agg = aggregate_at(&ch, &x);
            for k in 1..=2 {
                let lhs = sk_of_aggregate(&agg, k).unwrap().part(2 * k);
                let rhs = chern_form(&b, k).form.eval(&x);
                assert!(lhs.minus(&rhs).sup_norm() < 1e-12);
            }
        }
    }

    #[test]
    fn gauss_bonnet() {
        let b = library::tangent_s2(64);
        let e = euler_form(&b).unwrap();
        let v = e.form.integrate(&library::sphere_cycle(64)).unwrap();
        assert!((v.re - 2.0).abs() < 1e-9);
        assert!(euler_form(&library::monopole(1, 8)).is_err());
    }

    #[test]
    fn abelian_transgression_is_scaled_difference() {
        let d = library::torus_domain(2, 8);
        let t0 = library::random_torus_data(1, 1, 2, Structure::Unitary, 0.5).form(&d);
        let t1 = library::random_torus_data(2, 1, 2, Structure::Unitary, 0.5).form(&d);
        let t = transgression_of(&t0, &t1, TransgressedClass::Chern(1)).unwrap();
        let want = t1.minus(&t0).unwrap().scale(chern_scale());
        assert!(crate::forms::sup_distance(&t, &want, 4).unwrap() < 1e-14);
    }

    #[test]
    fn chern_transgression_residual_on_t4() {
        let a = library::random_torus_bundle(21, 2, 4, Structure::Unitary, 8);
        let b = library::random_torus_bundle(22, 2, 4, Structure::Unitary, 8);
        let t = transgression_chern(&a, &b, 2).unwrap();
        assert!(t.residual(2).unwrap() < 1e-6);
    }

    #[test]
    fn euler_transgression_residual() {
        let d = library::torus_domain(2, 8);
        let t0 = library::random_torus_data(3, 2, 2, Structure::SpecialOrthogonal, 0.5).form(&d);
        let t1 = library::random_torus_data(4, 2, 2, Structure::SpecialOrthogonal, 0.5).form(&d);
        let t = transgression_of(&t0, &t1, TransgressedClass::Euler).unwrap();
        let lhs = t.exterior_derivative().unwrap();
        let rhs = euler_of(&crate::connections::curvature_of(&t1))
            .minus(&euler_of(&crate::connections::curvature_of(&t0)))
            .unwrap();
        assert!(crate::forms::sup_distance(&lhs, &rhs, 4).unwrap() < 1e-8);
    }
}
