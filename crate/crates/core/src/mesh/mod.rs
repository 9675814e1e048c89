//! Chart domains, parametrized cycles and chains, and quadrature.

mod cycle;
mod domain;
mod map;
mod quadrature;

pub use cycle::{circle_times, BoundedChain, CyclePiece, Frame, GeometricCycle, Integrable, Side};
pub use domain::{Axis, ChartDomain};
pub use map::{JacobianFn, PointFn, SmoothMap};
pub use quadrature::{gauss_legendre, pairwise_sum, quadrature_rule, AxisRule, QuadratureRule};
