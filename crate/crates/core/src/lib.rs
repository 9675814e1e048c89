//! Characteristic forms, Chern–Simons transgressions and Cheeger–Simons
//! differential characters on concrete bundles with connection.

pub mod charforms;
pub mod connections;
pub mod diffchar;
pub mod error;
pub mod forms;
pub mod mesh;
pub mod numeric;
pub mod symfunc;

pub use error::{Error, Result};

pub use nalgebra;
pub use num_complex;
