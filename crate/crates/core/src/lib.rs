//! Bounded remainder sets for the continuous irrational rotation on the
//! two-dimensional torus.

mod bigser;
pub mod brf;
pub mod contfrac;
pub mod error;
pub mod experiments;
pub mod flow;
pub mod geometry;
pub mod io;
pub mod quadratic;
pub mod quadrature;
pub mod scalar;

pub use error::{Error, Result};
pub use quadratic::{Quad, QuadraticIrrational};
pub use scalar::{Rotation, Scalar};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    pub mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    pub mod introduction {}
    #[doc = include_str!("../../../book/src/continued-fractions.md")]
    pub mod continued_fractions {}
    #[doc = include_str!("../../../book/src/geometry.md")]
    pub mod geometry {}
    #[doc = include_str!("../../../book/src/birkhoff-sums.md")]
    pub mod birkhoff_sums {}
    #[doc = include_str!("../../../book/src/flow.md")]
    pub mod flow {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    pub mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    pub mod cli {}
}
