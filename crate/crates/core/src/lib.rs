//! Singular points and singularity-induced bifurcations of quasilinear DAEs.
//!
//! One-dimensional systems have the form `g(x, α) ẋ = f(x, α)`; planar systems
//! have the form `g ẋ = f1`, `ẏ = f2`. Where `g` vanishes the equation stops
//! determining `ẋ`, and the interesting dynamics live there.

pub mod bif_scan;
pub mod classify1d;
pub mod classify2d;
pub mod codes;
pub mod desing;
pub mod expr;
pub mod genericity;
pub mod numeric;
pub mod report;
pub mod system;
mod tol;

pub use codes::EventCode;
pub use system::{System1D, System2D, SystemDef, SystemError};
pub use tol::Tolerances;

/// Book chapters, compiled as doctests so their snippets stay current.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/expressions.md")]
    mod expressions {}
    #[doc = include_str!("../../../book/src/scalar.md")]
    mod scalar {}
    #[doc = include_str!("../../../book/src/planar.md")]
    mod planar {}
    #[doc = include_str!("../../../book/src/scanning.md")]
    mod scanning {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
