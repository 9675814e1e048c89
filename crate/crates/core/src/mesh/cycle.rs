use nalgebra::DMatrix;

use super::domain::ChartDomain;
use super::map::SmoothMap;
use crate::error::{Error, Result};
use crate::forms::FormField;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Lo,
    Hi,
}

/// Trivialization of a pulled-back bundle over one cycle piece: the columns of
/// `matrix` (an invertible r x r 0-form on the piece chart) are frame vectors
/// expressed in gauge `gauge` of the bundle.
#[derive(Clone, Debug)]
pub struct Frame {
    pub gauge: usize,
    pub matrix: FormField,
}

/// One parametrized piece of a cycle or chain.
#[derive(Clone, Debug)]
pub struct CyclePiece {
    pub domain: ChartDomain,
    pub map: SmoothMap,
    /// `+1.0` or `-1.0`.
    pub orientation: f64,
    pub frame: Option<Frame>,
    /// Degenerate piece (image of measure zero in the target manifold).
    pub thin: bool,
}

/// Anything forms can be integrated over.
pub trait Integrable {
    fn pieces(&self) -> &[CyclePiece];
}

fn check_orientation(o: f64) -> Result<()> {
    if o == 1.0 || o == -1.0 {
        Ok(())
    } else {
        Err(Error::Argument(format!("orientation must be +1 or -1, got {o}")))
    }
}

/// Closed oriented parametrized manifold mapped into a target chart, as a
/// signed union of pieces.
#[derive(Clone, Debug)]
pub struct GeometricCycle {
    pieces: Vec<CyclePiece>,
    dim: usize,
    target_dim: usize,
}

impl GeometricCycle {
    /// Single-piece cycle. Every non-periodic axis must collapse at both ends.
    pub fn new(domain: ChartDomain, map: SmoothMap, orientation: f64, collapsed: &[(usize, Side)]) -> Result<Self> {
        check_orientation(orientation)?;
        if map.source_dim() != domain.dim() {
            return Err(Error::DomainMismatch(format!(
                "map expects {} coordinates, chart has {}",
                map.source_dim(),
                domain.dim()
            )));
        }
        for (i, axis) in domain.axes().iter().enumerate() {
            let both = collapsed.contains(&(i, Side::Lo)) && collapsed.contains(&(i, Side::Hi));
            if !axis.periodic && !both {
                return Err(Error::NotClosed(format!("axis {i} is neither periodic nor collapsed at both ends")));
            }
        }
        let (dim, target_dim) = (domain.dim(), map.target_dim());
        Ok(Self {
            pieces: vec![CyclePiece { domain, map, orientation, frame: None, thin: false }],
            dim,
            target_dim,
        })
    }

    /// Positively oriented point.
    pub fn point(at: Vec<f64>) -> Self {
        let target_dim = at.len();
        let piece = CyclePiece {
            domain: ChartDomain::point(),
            map: SmoothMap::constant(at, 0),
            orientation: 1.0,
            frame: None,
            thin: false,
        };
        Self { pieces: vec![piece], dim: 0, target_dim }
    }

    pub fn from_pieces(pieces: Vec<CyclePiece>) -> Result<Self> {
        let first = pieces.first().ok_or_else(|| Error::Argument("cycle without pieces".into()))?;
        let (dim, target_dim) = (first.domain.dim(), first.map.target_dim());
        for p in &pieces {
            check_orientation(p.orientation)?;
            if p.domain.dim() != dim || p.map.target_dim() != target_dim || p.map.source_dim() != dim {
                return Err(Error::DomainMismatch("cycle pieces of different dimensions".into()));
            }
        }
        Ok(Self { pieces, dim, target_dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn len(&self) -> usize {
        self.pieces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Attaches the same trivialization data to every piece.
    pub fn with_frame(mut self, frame: Frame) -> Result<Self> {
        for p in &mut self.pieces {
            if frame.matrix.degree() != 0 || !frame.matrix.domain().same_shape(&p.domain) {
                return Err(Error::DomainMismatch("frame must be a 0-form on the piece chart".into()));
            }
            p.frame = Some(frame.clone());
        }
        Ok(self)
    }

    pub fn with_piece_frame(mut self, index: usize, frame: Frame) -> Result<Self> {
        let p = self.pieces.get_mut(index).ok_or_else(|| Error::Argument(format!("no piece {index}")))?;
        if frame.matrix.degree() != 0 || !frame.matrix.domain().same_shape(&p.domain) {
            return Err(Error::DomainMismatch("frame must be a 0-form on the piece chart".into()));
        }
        p.frame = Some(frame);
        Ok(self)
    }

    pub fn mark_thin(mut self) -> Self {
        for p in &mut self.pieces {
            p.thin = true;
        }
        self
    }

    pub fn reversed(&self) -> Self {
        let mut out = self.clone();
        for p in &mut out.pieces {
            p.orientation = -p.orientation;
        }
        out
    }

    /// `f_* z`: composes every piece map with `f`. Frames are kept as given.
    pub fn pushforward(&self, f: &SmoothMap) -> Result<Self> {
        if f.source_dim() != self.target_dim {
            return Err(Error::DomainMismatch("pushforward map does not start on the cycle target".into()));
        }
        let mut out = self.clone();
        for p in &mut out.pieces {
            p.map = f.compose(&p.map);
        }
        out.target_dim = f.target_dim();
        Ok(out)
    }

    /// Precomposes every piece with a self-diffeomorphism `h` of its chart;
    /// `orientation` is `+1` when `h` preserves orientation.
    pub fn reparametrized(&self, h: &SmoothMap, orientation: f64) -> Result<Self> {
        check_orientation(orientation)?;
        if h.source_dim() != self.dim || h.target_dim() != self.dim {
            return Err(Error::DomainMismatch("reparametrization must map the chart to itself".into()));
        }
        let mut out = self.clone();
        for p in &mut out.pieces {
            p.map = p.map.compose(h);
            p.orientation *= orientation;
            if let Some(fr) = &mut p.frame {
                fr.matrix = fr.matrix.pullback(h, &p.domain)?;
            }
        }
        Ok(out)
    }

    pub fn union(&self, other: &GeometricCycle) -> Result<Self> {
        if other.dim != self.dim || other.target_dim != self.target_dim {
            return Err(Error::DomainMismatch("union of cycles of different dimensions".into()));
        }
        let mut pieces = self.pieces.clone();
        pieces.extend(other.pieces.iter().cloned());
        Ok(Self { pieces, ..*self })
    }

    /// `S^1 x z` into `S^1 x X`, fiber coordinate first; frames are dropped.
    pub fn product_with_circle(&self, resolution: usize) -> Self {
        let pieces = self
            .pieces
            .iter()
            .map(|p| CyclePiece {
                domain: p.domain.with_leading_circle(resolution),
                map: circle_times(&p.map),
                orientation: p.orientation,
                frame: None,
                thin: p.thin,
            })
            .collect();
        Self { pieces, dim: self.dim + 1, target_dim: self.target_dim + 1 }
    }
}

impl Integrable for GeometricCycle {
    fn pieces(&self) -> &[CyclePiece] {
        &self.pieces
    }
}

/// `id_{S^1} x map`.
pub fn circle_times(map: &SmoothMap) -> SmoothMap {
    let (s, t) = (map.source_dim(), map.target_dim());
    let inner = map.clone();
    let out = SmoothMap::new(s + 1, t + 1, move |x| {
        let mut y = Vec::with_capacity(t + 1);
        y.push(x[0]);
        y.extend(inner.eval(&x[1..]));
        y
    });
    if map.has_jacobian() {
        let inner = map.clone();
        out.with_jacobian(move |x| {
            let j = inner.jacobian(&x[1..], &[]);
            let mut big = DMatrix::zeros(t + 1, s + 1);
            big[(0, 0)] = 1.0;
            big.view_mut((1, 1), (t, s)).copy_from(&j);
            big
        })
    } else {
        out
    }
}

/// Parametrized chain with boundary.
#[derive(Clone, Debug)]
pub struct BoundedChain {
    piece: [CyclePiece; 1],
    collapsed: Vec<(usize, Side)>,
}

impl BoundedChain {
    pub fn new(domain: ChartDomain, map: SmoothMap, orientation: f64) -> Result<Self> {
        check_orientation(orientation)?;
        if map.source_dim() != domain.dim() {
            return Err(Error::DomainMismatch("chain map does not match its chart".into()));
        }
        Ok(Self { piece: [CyclePiece { domain, map, orientation, frame: None, thin: false }], collapsed: Vec::new() })
    }

    /// Declares the facet `axis = lo/hi` degenerate.
    pub fn with_collapsed(mut self, axis: usize, side: Side) -> Self {
        self.collapsed.push((axis, side));
        self
    }

    pub fn domain(&self) -> &ChartDomain {
        &self.piece[0].domain
    }

    pub fn map(&self) -> &SmoothMap {
        &self.piece[0].map
    }

    pub fn orientation(&self) -> f64 {
        self.piece[0].orientation
    }

    pub fn dim(&self) -> usize {
        self.domain().dim()
    }

    /// Oriented facets, outward normal first.
    pub fn boundary(&self) -> Result<GeometricCycle> {
        let domain = self.domain();
        if domain.is_closed() {
            return Err(Error::EmptyBoundary);
        }
        let mut pieces = Vec::new();
        for (i, axis) in domain.axes().iter().enumerate() {
            if axis.periodic {
                continue;
            }
            let parity = if i % 2 == 0 { 1.0 } else { -1.0 };
            for (side, value, sign) in [(Side::Lo, axis.lo, -parity), (Side::Hi, axis.hi, parity)] {
                pieces.push(CyclePiece {
                    domain: domain.without_axis(i),
                    map: facet_map(self.map(), i, value),
                    orientation: self.orientation() * sign,
                    frame: None,
                    thin: self.collapsed.contains(&(i, side)),
                });
            }
        }
        GeometricCycle::from_pieces(pieces)
    }
}

impl Integrable for BoundedChain {
    fn pieces(&self) -> &[CyclePiece] {
        &self.piece
    }
}

fn facet_map(map: &SmoothMap, axis: usize, value: f64) -> SmoothMap {
    let (s, t) = (map.source_dim(), map.target_dim());
    let insert = move |x: &[f64]| {
        let mut y = Vec::with_capacity(s);
        y.extend_from_slice(&x[..axis]);
        y.push(value);
        y.extend_from_slice(&x[axis..]);
        y
    };
    let inner = map.clone();
    let out = SmoothMap::new(s - 1, t, move |x| inner.eval(&insert(x)));
    if map.has_jacobian() {
        let inner = map.clone();
        out.with_jacobian(move |x| inner.jacobian(&insert(x), &[]).remove_column(axis))
    } else {
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::{FormField, FormValue};
    use crate::mesh::Axis;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    #[test]
    fn interval_boundary_is_two_signed_points() {
        let d = ChartDomain::new(vec![Axis::interval(0.0, 1.0, 4)]).unwrap();
        let chain = BoundedChain::new(d, SmoothMap::identity(1), 1.0).unwrap();
        let b = chain.boundary().unwrap();
        assert_eq!(b.dim(), 0);
        let pts: Vec<(f64, f64)> = b.pieces().iter().map(|p| (p.map.eval(&[])[0], p.orientation)).collect();
        assert_eq!(pts, vec![(0.0, -1.0), (1.0, 1.0)]);
    }

    #[test]
    fn closed_chart_has_empty_boundary() {
        let d = ChartDomain::new(vec![Axis::circle(8)]).unwrap();
        let chain = BoundedChain::new(d, SmoothMap::identity(1), 1.0).unwrap();
        assert_eq!(chain.boundary().unwrap_err(), Error::EmptyBoundary);
    }

    #[test]
    fn cap_boundary_is_latitude_plus_thin_pole() {
        let d = ChartDomain::new(vec![Axis::interval(0.0, 1.0, 16), Axis::circle(16)]).unwrap();
        let chain = BoundedChain::new(d, SmoothMap::identity(2), 1.0).unwrap().with_collapsed(0, Side::Lo);
        let b = chain.boundary().unwrap();
        assert_eq!(b.len(), 2);
        assert!(b.pieces()[0].thin && !b.pieces()[1].thin);
        assert_eq!(b.pieces()[1].orientation, 1.0);
        assert_eq!(b.pieces()[1].map.eval(&[0.5]), vec![1.0, 0.5]);
    }

    #[test]
    fn unclosed_cycle_is_rejected() {
        let d = ChartDomain::new(vec![Axis::interval(0.0, 1.0, 4)]).unwrap();
        assert!(GeometricCycle::new(d.clone(), SmoothMap::identity(1), 1.0, &[]).is_err());
        assert!(GeometricCycle::new(d, SmoothMap::identity(1), 1.0, &[(0, Side::Lo), (0, Side::Hi)]).is_ok());
    }

    #[test]
    fn stokes_on_square() {
        let d = ChartDomain::new(vec![Axis::interval(0.0, 1.0, 64), Axis::interval(0.0, 1.0, 64)]).unwrap();
        let beta = FormField::new(d.clone(), 1, 1, |x| {
            let a = Complex64::new((x[0] * x[1]).sin(), 0.0);
            let b = Complex64::new(x[0].powi(3) * x[1].exp(), 0.0);
            let mut v = FormValue::zeros(2, 1, 1);
            v.raw_mut().copy_from_slice(&[a, b]);
            v
        });
        let chain = BoundedChain::new(d, SmoothMap::identity(2), 1.0).unwrap();
        let lhs = beta.exterior_derivative().unwrap().integrate(&chain).unwrap();
        let rhs = beta.integrate(&chain.boundary().unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-8, "{lhs} vs {rhs}");
    }

    #[test]
    fn circle_product_keeps_orientation() {
        let d = ChartDomain::new(vec![Axis::circle(16)]).unwrap();
        let z = GeometricCycle::new(d, SmoothMap::identity(1), -1.0, &[]).unwrap();
        let zz = z.product_with_circle(8);
        assert_eq!(zz.dim(), 2);
        assert_eq!(zz.pieces()[0].orientation, -1.0);
        let ds_dx = FormField::constant(
            &zz.pieces()[0].domain,
            FormValue::from_terms(2, 2, 1, &[(&[0, 1], DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0)))]),
        );
        let v = ds_dx.integrate(&zz).unwrap();
        assert!((v.re + 4.0 * PI * PI).abs() < 1e-12);
    }
}
