//! Numerical kernels shared by the analysis modules.

pub mod linalg;
pub mod newton;
pub mod ode;

pub use linalg::{det2, det3, eig2, solve, trace2, Complex, Eigen2, Mat2};
pub use newton::{newton, NewtonOptions, NewtonSolution};
pub use ode::{dopri5, locate_root, Control, DenseStep, OdeEnd, OdeOptions, OdeOutcome};
