use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::forms::{FormField, FormValue};
use crate::mesh::{ChartDomain, GeometricCycle, Integrable, SmoothMap};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Structure {
    Unitary,
    SpecialOrthogonal,
}

pub type Region = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// A local gauge: the region where it is valid and its connection 1-form.
#[derive(Clone)]
pub struct Gauge {
    pub name: String,
    pub region: Region,
    pub theta: FormField,
}

impl fmt::Debug for Gauge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Gauge").field("name", &self.name).field("theta", &self.theta).finish()
    }
}

impl Gauge {
    pub fn new<R>(name: &str, region: R, theta: FormField) -> Self
    where
        R: Fn(&[f64]) -> bool + Send + Sync + 'static,
    {
        Self { name: name.to_string(), region: Arc::new(region), theta }
    }

    pub fn everywhere(name: &str, theta: FormField) -> Self {
        Self::new(name, |_| true, theta)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        (self.region)(x)
    }
}

/// Change of gauge `from -> to`: components transform as `s_to = g s_from`
/// and `θ_to = g θ_from g⁻¹ − dg g⁻¹`.
#[derive(Clone, Debug)]
pub struct Transition {
    pub from: usize,
    pub to: usize,
    pub map: FormField,
}

/// Rank-r vector bundle with connection, presented in gauge charts.
#[derive(Clone, Debug)]
pub struct BundleWithConnection {
    rank: usize,
    structure: Structure,
    base: ChartDomain,
    gauges: Vec<Gauge>,
    transitions: Vec<Transition>,
}

/// `Ω = dθ + θ∧θ`; vanishes identically on 1-dimensional charts.
pub fn curvature_of(theta: &FormField) -> FormField {
    let (dim, r) = (theta.dim(), theta.rank());
    if dim < 2 {
        return FormField::zero(theta.domain(), 2, r);
    }
    let th = theta.clone();
    FormField::new(theta.domain().clone(), 2, r, move |x| {
        let v = th.eval(x);
        FormValue::exterior_from_partials(&th.partials(x)).plus(&v.wedge(&v))
    })
}

/// `g θ g⁻¹ − dg g⁻¹` for a matrix 0-form `g`.
pub fn gauge_action(theta: &FormField, g: &FormField) -> Result<FormField> {
    let ginv = g.inverse()?;
    let conj = g.wedge(theta)?.wedge(&ginv)?;
    let dg = g.exterior_derivative()?;
    conj.minus(&dg.wedge(&ginv)?)
}

fn matrix_at(f: &FormField, x: &[f64]) -> DMatrix<Complex64> {
    f.eval(x).coeff_by_mask(0)
}

impl BundleWithConnection {
    pub fn new(
        rank: usize,
        structure: Structure,
        base: ChartDomain,
        gauges: Vec<Gauge>,
        transitions: Vec<Transition>,
    ) -> Result<Self> {
        if rank == 0 {
            return Err(Error::Argument("bundle rank must be positive".into()));
        }
        if gauges.is_empty() {
            return Err(Error::Argument("bundle needs at least one gauge".into()));
        }
        for g in &gauges {
            if g.theta.degree() != 1 || g.theta.rank() != rank {
                return Err(Error::Shape(format!("gauge {}: connection must be a rank-{rank} 1-form", g.name)));
            }
            if !g.theta.domain().same_shape(&base) {
                return Err(Error::DomainMismatch(format!("gauge {} lives on another chart", g.name)));
            }
        }
        for t in &transitions {
            if t.from >= gauges.len() || t.to >= gauges.len() {
                return Err(Error::Argument(format!("transition {} -> {} names a missing gauge", t.from, t.to)));
            }
            if t.map.degree() != 0 || t.map.rank() != rank || !t.map.domain().same_shape(&base) {
                return Err(Error::Shape("transition must be a rank-r 0-form on the base".into()));
            }
        }
        Ok(Self { rank, structure, base, gauges, transitions })
    }

    /// Single-gauge bundle.
    pub fn trivial_with(structure: Structure, theta: FormField) -> Result<Self> {
        let base = theta.domain().clone();
        Self::new(theta.rank(), structure, base, vec![Gauge::everywhere("global", theta)], Vec::new())
    }

    pub fn rank(&self) -> usize {
        self.rank
    }
    pub fn structure(&self) -> Structure {
        self.structure
    }
    pub fn base(&self) -> &ChartDomain {
        &self.base
    }
    pub fn gauges(&self) -> &[Gauge] {
        &self.gauges
    }
    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn theta(&self, gauge: usize) -> Result<&FormField> {
        self.gauges
            .get(gauge)
            .map(|g| &g.theta)
            .ok_or_else(|| Error::Argument(format!("no gauge {gauge}")))
    }

    /// First gauge whose region contains `x`.
    pub fn gauge_at(&self, x: &[f64]) -> Option<usize> {
        self.gauges.iter().position(|g| g.contains(x))
    }

    /// Transition `from -> to`: identity, a stored map, or the inverse of
    /// the reverse map.
    pub fn transition(&self, from: usize, to: usize) -> Option<FormField> {
        if from == to {
            let id = FormValue::matrix(self.base.dim(), &DMatrix::identity(self.rank, self.rank));
            return Some(FormField::constant(&self.base, id));
        }
        if let Some(t) = self.transitions.iter().find(|t| t.from == from && t.to == to) {
            return Some(t.map.clone());
        }
        self.transitions
            .iter()
            .find(|t| t.from == to && t.to == from)
            .and_then(|t| t.map.inverse().ok())
    }

    pub fn curvature(&self, gauge: usize) -> Result<FormField> {
        Ok(curvature_of(self.theta(gauge)?))
    }

    /// Curvature with the gauge chosen per point by region.
    pub fn patched_curvature(&self) -> FormField {
        let curv: Vec<FormField> = self.gauges.iter().map(|g| curvature_of(&g.theta)).collect();
        let regions: Vec<Region> = self.gauges.iter().map(|g| g.region.clone()).collect();
        FormField::new(self.base.clone(), 2, self.rank, move |x| {
            let i = regions.iter().position(|r| r(x)).unwrap_or(0);
            curv[i].eval(x)
        })
    }

    /// Same bundle with every chart at resolution `n`.
    pub fn with_resolution(&self, n: usize) -> Self {
        let base = self.base.with_resolution(n);
        self.on_base(&base)
    }

    fn on_base(&self, base: &ChartDomain) -> Self {
        let gauges = self
            .gauges
            .iter()
            .map(|g| Gauge { theta: g.theta.on_domain(base).expect("same-shaped base"), ..g.clone() })
            .collect();
        let transitions = self
            .transitions
            .iter()
            .map(|t| Transition { map: t.map.on_domain(base).expect("same-shaped base"), ..t.clone() })
            .collect();
        Self { base: base.clone(), gauges, transitions, ..*self }
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        if !self.base.same_shape(&other.base) {
            return Err(Error::DomainMismatch("direct sum of bundles over different bases".into()));
        }
        let structure = if self.structure == other.structure {
            self.structure
        } else {
            return Err(Error::Structure("direct sum of bundles with different structure groups".into()));
        };
        let rank = self.rank + other.rank;
        let mut gauges = Vec::new();
        let mut index = Vec::new();
        for (i, ga) in self.gauges.iter().enumerate() {
            for (j, gb) in other.gauges.iter().enumerate() {
                let (ra, rb) = (ga.region.clone(), gb.region.clone());
                gauges.push(Gauge {
                    name: format!("{}+{}", ga.name, gb.name),
                    region: Arc::new(move |x| ra(x) && rb(x)),
                    theta: block_sum(&ga.theta, &gb.theta),
                });
                index.push((i, j));
            }
        }
        let mut transitions = Vec::new();
        for (p, &(i, j)) in index.iter().enumerate() {
            for (q, &(k, l)) in index.iter().enumerate() {
                if p == q {
                    continue;
                }
                if let (Some(a), Some(b)) = (self.transition(i, k), other.transition(j, l)) {
                    transitions.push(Transition { from: p, to: q, map: block_sum(&a, &b) });
                }
            }
        }
        Self::new(rank, structure, self.base.clone(), gauges, transitions)
    }

    /// Pullback along `map: source -> base`, gauge by gauge.
    pub fn pullback_bundle(&self, map: &SmoothMap, source: &ChartDomain) -> Result<Self> {
        let mut gauges = Vec::new();
        for g in &self.gauges {
            let (region, m) = (g.region.clone(), map.clone());
            gauges.push(Gauge {
                name: g.name.clone(),
                region: Arc::new(move |x| region(&m.eval(x))),
                theta: g.theta.pullback(map, source)?,
            });
        }
        let transitions = self
            .transitions
            .iter()
            .map(|t| Ok(Transition { map: t.map.pullback(map, source)?, ..t.clone() }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.rank, self.structure, source.clone(), gauges, transitions)
    }

    /// Applies `θ ↦ gθg⁻¹ − dg g⁻¹` in every gauge (transitions conjugate).
    /// `g` is checked for invertibility on a sample grid.
    pub fn gauge_transform(&self, g: &FormField) -> Result<Self> {
        if g.degree() != 0 || g.rank() != self.rank {
            return Err(Error::Shape("gauge transformation must be a rank-r 0-form".into()));
        }
        for x in self.base.sample_grid(6) {
            let m = matrix_at(g, &x);
            let d = m.determinant();
            if d.norm() <= 1e-12 || !d.is_finite() {
                return Err(Error::SingularGauge(x));
            }
        }
        let ginv = g.inverse()?;
        let gauges = self
            .gauges
            .iter()
            .map(|ga| Ok(Gauge { theta: gauge_action(&ga.theta, g)?, ..ga.clone() }))
            .collect::<Result<Vec<_>>>()?;
        let transitions = self
            .transitions
            .iter()
            .map(|t| Ok(Transition { map: g.wedge(&t.map)?.wedge(&ginv)?, ..t.clone() }))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.rank, self.structure, self.base.clone(), gauges, transitions)
    }

    /// Largest violation of the structure-group constraint on samples.
    pub fn structure_residual(&self, m: usize) -> f64 {
        let mut worst = 0.0f64;
        for g in &self.gauges {
            for x in self.base.sample_grid(m) {
                if !g.contains(&x) {
                    continue;
                }
                let v = g.theta.eval(&x);
                for &mask in v.masks() {
                    let a = v.coeff_by_mask(mask);
                    let r = match self.structure {
                        Structure::Unitary => (&a + a.adjoint()).norm(),
                        Structure::SpecialOrthogonal => {
                            let imag: f64 = a.iter().map(|z| z.im.abs()).sum();
                            (&a + a.transpose()).norm() + imag
                        }
                    };
                    worst = worst.max(r);
                }
            }
        }
        worst
    }

    /// Largest residual of `θ_to = gθ_from g⁻¹ − dg g⁻¹` on sampled overlaps.
    pub fn overlap_residual(&self, m: usize) -> Result<f64> {
        let mut worst = 0.0f64;
        for t in &self.transitions {
            let (ga, gb) = (&self.gauges[t.from], &self.gauges[t.to]);
            let moved = gauge_action(&ga.theta, &t.map)?;
            for x in self.base.sample_grid(m) {
                if ga.contains(&x) && gb.contains(&x) {
                    worst = worst.max(moved.eval(&x).minus(&gb.theta.eval(&x)).sup_norm());
                }
            }
        }
        Ok(worst)
    }

    /// Largest residual of `Ω_to = g Ω_from g⁻¹` on sampled overlaps.
    pub fn curvature_covariance_residual(&self, m: usize) -> Result<f64> {
        let mut worst = 0.0f64;
        for t in &self.transitions {
            let (ga, gb) = (&self.gauges[t.from], &self.gauges[t.to]);
            let (oa, ob) = (curvature_of(&ga.theta), curvature_of(&gb.theta));
            for x in self.base.sample_grid(m) {
                if ga.contains(&x) && gb.contains(&x) {
                    let g = matrix_at(&t.map, &x);
                    let gi = g.clone().try_inverse().ok_or_else(|| Error::SingularGauge(x.clone()))?;
                    let conj = oa.eval(&x).map_matrices(|w| &g * w * &gi);
                    worst = worst.max(conj.minus(&ob.eval(&x)).sup_norm());
                }
            }
        }
        Ok(worst)
    }

    /// Largest residual of `dΩ − Ω∧θ + θ∧Ω = 0` in one gauge.
    pub fn bianchi_residual(&self, gauge: usize, m: usize) -> Result<f64> {
        let theta = self.theta(gauge)?;
        if self.base.dim() < 3 {
            return Ok(0.0);
        }
        let omega = curvature_of(theta);
        let d_omega = omega.exterior_derivative()?;
        let region = &self.gauges[gauge];
        let mut worst = 0.0f64;
        for x in self.base.sample_grid(m) {
            if !region.contains(&x) {
                continue;
            }
            let (o, t) = (omega.eval(&x), theta.eval(&x));
            let r = d_omega.eval(&x).minus(&o.wedge(&t)).plus(&t.wedge(&o));
            worst = worst.max(r.sup_norm());
        }
        Ok(worst)
    }

    /// Checks structure and overlap invariants on an `m`-point-per-axis grid.
    pub fn validate(&self, m: usize) -> Result<()> {
        let s = self.structure_residual(m);
        if s > 1e-10 {
            return Err(Error::Structure(format!("connection violates the structure group by {s:.3e}")));
        }
        let o = self.overlap_residual(m)?;
        if o > 1e-8 {
            return Err(Error::Structure(format!("overlap relation violated by {o:.3e}")));
        }
        Ok(())
    }

    /// Holonomy of a loop, solving `ds/dt = −θ(γ'(t)) s` with classical RK4
    /// (`steps` per piece, at least 4096). The result is expressed in the
    /// gauge containing the starting point: `s(end) = H s(start)`.
    pub fn parallel_transport(&self, lp: &GeometricCycle, steps: usize) -> Result<DMatrix<Complex64>> {
        if lp.dim() != 1 {
            return Err(Error::Degree(format!("holonomy needs a loop, got a {}-cycle", lp.dim())));
        }
        if lp.target_dim() != self.base.dim() {
            return Err(Error::DomainMismatch("loop does not map into the base".into()));
        }
        let steps = steps.max(4096);
        let r = self.rank;
        let mut h = DMatrix::<Complex64>::identity(r, r);
        let mut start_gauge = None;
        let mut current = 0usize;
        for piece in lp.pieces() {
            let ax = piece.domain.axis(0);
            let (lo, hi) = if piece.orientation > 0.0 { (ax.lo, ax.hi) } else { (ax.hi, ax.lo) };
            let fd = piece.domain.fd_steps();
            let x0 = piece.map.eval(&[lo]);
            if start_gauge.is_none() {
                current = self.gauge_at(&x0).ok_or_else(|| Error::GaugeCrossing(x0.clone()))?;
                start_gauge = Some(current);
            }
            let rhs = |t: f64, gauge: usize| -> DMatrix<Complex64> {
                let x = piece.map.eval(&[t]);
                let vel = piece.map.jacobian(&[t], &fd);
                let v = self.gauges[gauge].theta.eval(&x);
                let mut a = DMatrix::zeros(r, r);
                for i in 0..x.len() {
                    a += v.coeff(&[i]) * Complex64::new(vel[(i, 0)], 0.0);
                }
                -a
            };
            let dt = (hi - lo) / steps as f64;
            for k in 0..steps {
                let t = lo + k as f64 * dt;
                let x = piece.map.eval(&[t]);
                if !self.gauges[current].contains(&x) {
                    let next = self.gauge_at(&x).ok_or_else(|| Error::GaugeCrossing(x.clone()))?;
                    let g = self.transition(current, next).ok_or_else(|| Error::GaugeCrossing(x.clone()))?;
                    h = matrix_at(&g, &x) * h;
                    current = next;
                }
                let k1 = rhs(t, current) * &h;
                let k2 = rhs(t + 0.5 * dt, current) * (&h + &k1 * Complex64::new(0.5 * dt, 0.0));
                let k3 = rhs(t + 0.5 * dt, current) * (&h + &k2 * Complex64::new(0.5 * dt, 0.0));
                let k4 = rhs(t + dt, current) * (&h + &k3 * Complex64::new(dt, 0.0));
                h += (k1 + k2 * Complex64::new(2.0, 0.0) + k3 * Complex64::new(2.0, 0.0) + k4)
                    * Complex64::new(dt / 6.0, 0.0);
            }
        }
        let start = start_gauge.unwrap_or(0);
        if current != start {
            let end = lp.pieces().last().map(|p| {
                let ax = p.domain.axis(0);
                p.map.eval(&[if p.orientation > 0.0 { ax.hi } else { ax.lo }])
            });
            let x = end.unwrap_or_default();
            let g = self.transition(current, start).ok_or_else(|| Error::GaugeCrossing(x.clone()))?;
            h = matrix_at(&g, &x) * h;
        }
        Ok(h)
    }
}

/// Block-diagonal sum of two matrix forms of equal degree.
pub fn block_sum(a: &FormField, b: &FormField) -> FormField {
    assert_eq!(a.degree(), b.degree());
    let (ra, rb) = (a.rank(), b.rank());
    let (dim, deg) = (a.dim(), a.degree());
    let join = move |va: &FormValue, vb: &FormValue| {
        let mut out = FormValue::zeros(dim, deg, ra + rb);
        for &mask in va.masks() {
            let mut m = DMatrix::zeros(ra + rb, ra + rb);
            m.view_mut((0, 0), (ra, ra)).copy_from(&va.coeff_by_mask(mask));
            m.view_mut((ra, ra), (rb, rb)).copy_from(&vb.coeff_by_mask(mask));
            out.set_coeff_mask(mask, &m);
        }
        out
    };
    let (fa, fb) = (a.clone(), b.clone());
    let out = FormField::new(a.domain().clone(), deg, ra + rb, move |x| join(&fa.eval(x), &fb.eval(x)));
    if a.has_analytic_derivative() && b.has_analytic_derivative() {
        let (fa, fb) = (a.clone(), b.clone());
        out.with_partials(move |x| {
            fa.partials(x).iter().zip(&fb.partials(x)).map(|(pa, pb)| join(pa, pb)).collect()
        })
    } else {
        out
    }
}
