//! Explicit polynomial systems realising a prescribed configuration of
//! special points near a degenerate one.
//!
//! For an `A1.m` point the right-hand side becomes
//! `P(x) = Π (x − x_i)^{a_i} · ((x − c)² + 1)^k`, where the root-free factor
//! pads the degree up to `m + 1`. Complex roots come in pairs, so the
//! multiplicities must satisfy `Σ a_i ≡ m + 1 (mod 2)`. Singularities use
//! the same construction for `g` with `n + 1`.

use thiserror::Error;

use crate::expr::{Expr, Var};
use crate::System1D;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbationCase {
    A1 { m: u32 },
    A2 { n: u32 },
    A3 { m: u32, n: u32 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PerturbationError {
    #[error("multiplicities sum to {sum}, which exceeds the allowed {max}")]
    TooMany { sum: u32, max: u32 },
    #[error("multiplicities sum to {sum}; the parity must match {target}")]
    Parity { sum: u32, target: u32 },
    #[error("coordinates must be strictly increasing")]
    NotIncreasing,
    #[error("{multiplicities} multiplicities given for {coords} coordinates")]
    LengthMismatch {
        multiplicities: usize,
        coords: usize,
    },
    #[error("multiplicities must be positive")]
    ZeroMultiplicity,
}

fn polynomial(mult: &[u32], coords: &[f64], degree: u32) -> Result<Expr, PerturbationError> {
    if mult.len() != coords.len() {
        return Err(PerturbationError::LengthMismatch {
            multiplicities: mult.len(),
            coords: coords.len(),
        });
    }
    if mult.contains(&0) {
        return Err(PerturbationError::ZeroMultiplicity);
    }
    if coords.windows(2).any(|w| w[1] <= w[0]) {
        return Err(PerturbationError::NotIncreasing);
    }
    let sum: u32 = mult.iter().sum();
    if sum > degree {
        return Err(PerturbationError::TooMany { sum, max: degree });
    }
    if (degree - sum) % 2 != 0 {
        return Err(PerturbationError::Parity {
            sum,
            target: degree,
        });
    }
    let x = Expr::var(Var::X);
    let mut p = Expr::constant(1.0);
    for (&k, &c) in mult.iter().zip(coords) {
        p = Expr::mul(
            p,
            Expr::pow(Expr::sub(x.clone(), Expr::constant(c)), k as i32),
        );
    }
    let pad = (degree - sum) / 2;
    if pad > 0 {
        let center = if coords.is_empty() {
            0.0
        } else {
            coords.iter().sum::<f64>() / coords.len() as f64
        };
        let q = Expr::add(
            Expr::pow(Expr::sub(x, Expr::constant(center)), 2),
            Expr::constant(1.0),
        );
        p = Expr::mul(p, Expr::pow(q, pad as i32));
    }
    Ok(p)
}

/// Builds the perturbed system for `case`.
///
/// `a`/`xs` give multiplicities and positions of equilibria (zeros of `f`),
/// `b`/`ys` those of singularities (zeros of `g`). Cases `A1` and `A2` use
/// only their own pair and set the other side to the constant 1.
pub fn construct_unfolding_perturbation(
    case: PerturbationCase,
    a: &[u32],
    b: &[u32],
    xs: &[f64],
    ys: &[f64],
) -> Result<System1D, PerturbationError> {
    let (f, g) = match case {
        PerturbationCase::A1 { m } => (polynomial(a, xs, m + 1)?, Expr::constant(1.0)),
        PerturbationCase::A2 { n } => (Expr::constant(1.0), polynomial(b, ys, n + 1)?),
        PerturbationCase::A3 { m, n } => (polynomial(a, xs, m + 1)?, polynomial(b, ys, n + 1)?),
    };
    let name = format!("{case:?} perturbation");
    Ok(System1D::new(name, f, g).expect("polynomials in x only"))
}
