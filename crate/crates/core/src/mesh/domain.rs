use std::f64::consts::PI;

use crate::error::{Error, Result};

/// One coordinate axis of a chart box.
#[derive(Clone, Debug, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub periodic: bool,
    /// Quadrature nodes along this axis.
    pub resolution: usize,
}

impl Axis {
    pub fn interval(lo: f64, hi: f64, resolution: usize) -> Self {
        Self { lo, hi, periodic: false, resolution }
    }

    pub fn periodic(lo: f64, hi: f64, resolution: usize) -> Self {
        Self { lo, hi, periodic: true, resolution }
    }

    /// `[0, 2π)` with endpoints identified.
    pub fn circle(resolution: usize) -> Self {
        Self::periodic(0.0, 2.0 * PI, resolution)
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Coordinate box on which forms are evaluated and integrated.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartDomain {
    axes: Vec<Axis>,
}

impl ChartDomain {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        for (i, a) in axes.iter().enumerate() {
            if !(a.lo.is_finite() && a.hi.is_finite()) || a.lo >= a.hi {
                return Err(Error::Domain(format!("axis {i}: need lo < hi, got [{}, {}]", a.lo, a.hi)));
            }
            if a.resolution == 0 {
                return Err(Error::Domain(format!("axis {i}: resolution must be positive")));
            }
        }
        if axes.len() > crate::forms::MAX_DIM {
            return Err(Error::Domain(format!("{} axes exceed the supported maximum", axes.len())));
        }
        Ok(Self { axes })
    }

    /// The zero-dimensional chart (a single point).
    pub fn point() -> Self {
        Self { axes: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> &Axis {
        &self.axes[i]
    }

    pub fn volume(&self) -> f64 {
        self.axes.iter().map(Axis::length).product()
    }

    pub fn is_closed(&self) -> bool {
        self.axes.iter().all(|a| a.periodic)
    }

    /// Finite-difference steps `(b_i - a_i) / (8 N_i)`.
    pub fn fd_steps(&self) -> Vec<f64> {
        self.axes.iter().map(|a| a.length() / (8.0 * a.resolution as f64)).collect()
    }

    pub fn with_resolution(&self, n: usize) -> Self {
        let axes = self.axes.iter().map(|a| Axis { resolution: n, ..a.clone() }).collect();
        Self { axes }
    }

    pub fn with_axis_resolution(&self, i: usize, n: usize) -> Self {
        let mut out = self.clone();
        out.axes[i].resolution = n;
        out
    }

    pub fn without_axis(&self, i: usize) -> Self {
        let mut axes = self.axes.clone();
        axes.remove(i);
        Self { axes }
    }

    /// Prepends an `S^1 = [0, 2π)` factor as axis 0.
    pub fn with_leading_circle(&self, resolution: usize) -> Self {
        let mut axes = vec![Axis::circle(resolution)];
        axes.extend(self.axes.iter().cloned());
        Self { axes }
    }

    pub fn product(&self, other: &ChartDomain) -> Result<Self> {
        let mut axes = self.axes.clone();
        axes.extend(other.axes.iter().cloned());
        Self::new(axes)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && self.axes.iter().zip(x).all(|(a, &v)| a.periodic || (v >= a.lo && v <= a.hi))
    }

    /// Interior sample grid with `m` midpoints per axis.
    pub fn sample_grid(&self, m: usize) -> Vec<Vec<f64>> {
        let mut pts = vec![Vec::new()];
        for a in &self.axes {
            let mut next = Vec::with_capacity(pts.len() * m);
            for p in &pts {
                for j in 0..m {
                    let mut q = p.clone();
                    q.push(a.lo + (j as f64 + 0.5) / m as f64 * a.length());
                    next.push(q);
                }
            }
            pts = next;
        }
        pts
    }

    pub(crate) fn same_shape(&self, other: &ChartDomain) -> bool {
        self.dim() == other.dim()
            && self.axes.iter().zip(&other.axes).all(|(a, b)| {
                a.periodic == b.periodic
                    && (a.lo - b.lo).abs() < 1e-12
                    && (a.hi - b.hi).abs() < 1e-12
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_axes() {
        assert!(ChartDomain::new(vec![Axis::interval(1.0, 0.0, 4)]).is_err());
        assert!(ChartDomain::new(vec![Axis::interval(0.0, 1.0, 0)]).is_err());
        assert!(ChartDomain::new(vec![Axis::interval(0.0, f64::NAN, 4)]).is_err());
    }

    #[test]
    fn fd_steps_follow_resolution() {
        let d = ChartDomain::new(vec![Axis::interval(0.0, 1.0, 4), Axis::circle(8)]).unwrap();
        let h = d.fd_steps();
        assert!((h[0] - 1.0 / 32.0).abs() < 1e-15);
        assert!((h[1] - 2.0 * PI / 64.0).abs() < 1e-15);
    }

    #[test]
    fn sample_grid_is_interior() {
        let d = ChartDomain::new(vec![Axis::interval(0.0, 1.0, 4), Axis::interval(-1.0, 1.0, 4)])
            .unwrap();
        let g = d.sample_grid(3);
        assert_eq!(g.len(), 9);
        assert!(g.iter().all(|p| p[0] > 0.0 && p[0] < 1.0 && p[1] > -1.0 && p[1] < 1.0));
    }
}
