//! Vector bundles with connection presented in gauge charts.

mod bundle;
pub mod library;

pub use bundle::{
    block_sum, curvature_of, gauge_action, BundleWithConnection, Gauge, Region, Structure, Transition,
};
