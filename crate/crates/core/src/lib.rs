//! Desk-scale verification toolkit for strongly hyperbolic metrics on hyperbolic
//! groups, Busemann cocycles and the boundary crossed-product flow, and the
//! Haagerup cocycle on the coarse edge set.

pub mod error;
pub mod group;
pub mod boundary;
pub mod cocycles;
pub mod crossed_product;
pub mod metrics;

pub use error::{Error, Result};

/// Exact rational values: Gromov products, cocycle values, measures and algebra coefficients.
pub type Rational = num_rational::Ratio<i128>;
