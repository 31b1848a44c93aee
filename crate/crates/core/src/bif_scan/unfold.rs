//! Predicted unfoldings of the L3, L4 and L5 events.

use serde::Serialize;

use crate::classify2d::{
    classify_point_2d, solve_point_system, EquilibriumKind, Point2DClass, PointSystem, Side,
    SingularKind, Stability,
};
use crate::expr::EvalError;
use crate::numeric::solve;
use crate::system::Jets2D;
use crate::{System2D, Tolerances};

use super::DeltaSet;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum UnfoldError {
    #[error("genericity condition {0} fails")]
    Genericity(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// The pair of points present on one side of an L3 event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct L3Side {
    pub equilibrium: EquilibriumKind,
    /// Original-system stability, which depends on the side of Σ.
    pub equilibrium_stability: Stability,
    /// Stability of the desingularized field (stable iff `f1x < 0`).
    pub equilibrium_desing_stability: Stability,
    pub equilibrium_side: Side,
    pub singular: SingularKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct L3Unfolding {
    /// `d(x, y)/dα` of the equilibrium branch.
    pub equilibrium_tangent: [f64; 2],
    /// `d(x, y)/dα` of the singular-equilibrium branch.
    pub singular_tangent: [f64; 2],
    pub below: L3Side,
    pub above: L3Side,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct L4Unfolding {
    /// Folds sit at `x* ± sqrt(k (α − α*))`.
    pub k: f64,
    /// `dy/dα = −g_α/g_y` of the fold pair.
    pub beta2: f64,
    /// Sign of `α − α*` on which the fold pair exists.
    pub exists_above: bool,
    /// Convexities of the folds at `x* + δ` and `x* − δ`.
    pub convexities: [Side; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct L5Unfolding {
    pub singular_tangent: [f64; 2],
    pub fold_tangent: [f64; 2],
    /// Both points were found and classified simple at `α* ± 1e-3`.
    pub confirmed: bool,
}

/// `−J⁻¹ b` for a 2×2 `J`.
fn tangent(j: [[f64; 2]; 2], b: [f64; 2]) -> Option<[f64; 2]> {
    solve(j, [-b[0], -b[1]])
}

fn require(name: &str, v: f64, tol: &Tolerances) -> Result<(), UnfoldError> {
    if v.abs() > tol.deriv {
        Ok(())
    } else {
        Err(UnfoldError::Genericity(format!(
            "{name} != 0 (value {v:e})"
        )))
    }
}

fn flip(s: Stability) -> Stability {
    match s {
        Stability::Stable => Stability::Unstable,
        Stability::Unstable => Stability::Stable,
    }
}

/// Branch tangents and the side classification of an L3 point.
///
/// The equilibrium is a node and the singular equilibrium a folded saddle
/// where `Δ4 (α − α*) > 0`, and the reverse pairing on the other side.
pub fn predict_unfolding_l3(j: &Jets2D, tol: &Tolerances) -> Result<L3Unfolding, UnfoldError> {
    let d = DeltaSet::from_jets(j);
    let (f1, f2, g) = (&j.f1, &j.f2, &j.g);
    require("f1x", f1.x(), tol)?;
    require("g_x", g.x(), tol)?;
    require("Delta1", d.delta1, tol)?;
    require("Delta2", d.delta2, tol)?;
    require("Delta4", d.delta4, tol)?;
    let te = tangent([[f1.x(), f1.y()], [f2.x(), f2.y()]], [f1.a(), f2.a()])
        .ok_or(UnfoldError::Genericity("Delta1".into()))?;
    let ts = tangent([[f1.x(), f1.y()], [g.x(), g.y()]], [f1.a(), g.a()])
        .ok_or(UnfoldError::Genericity("Delta2".into()))?;
    // dg/dα along the equilibrium branch fixes its side of Σ.
    let dg = g.x() * te[0] + g.y() * te[1] + g.a();
    let desing = if f1.x() < 0.0 {
        Stability::Stable
    } else {
        Stability::Unstable
    };
    let side_of = |above: bool| {
        let sign = if above { 1.0 } else { -1.0 };
        let node = d.delta4 * sign > 0.0;
        let eq_side = Side::of(sign * dg);
        let (equilibrium, singular) = if node {
            (EquilibriumKind::Node, SingularKind::FoldedSaddle)
        } else {
            (EquilibriumKind::Saddle, SingularKind::FoldedNode)
        };
        let (equilibrium_stability, equilibrium_desing_stability) = match (node, eq_side) {
            (false, _) => (Stability::Unstable, Stability::Unstable),
            (true, Side::Plus) => (desing, desing),
            (true, Side::Minus) => (flip(desing), desing),
        };
        L3Side {
            equilibrium,
            equilibrium_stability,
            equilibrium_desing_stability,
            equilibrium_side: eq_side,
            singular,
        }
    };
    Ok(L3Unfolding {
        equilibrium_tangent: te,
        singular_tangent: ts,
        below: side_of(false),
        above: side_of(true),
    })
}

/// Fold pair born at a cubic fold.
pub fn predict_unfolding_l4(j: &Jets2D, tol: &Tolerances) -> Result<L4Unfolding, UnfoldError> {
    let d = DeltaSet::from_jets(j);
    let g = &j.g;
    require("f1", j.f1.value(), tol)?;
    require("g_y", g.y(), tol)?;
    require("g_xxx", g.xxx(), tol)?;
    require("Delta3", d.delta3, tol)?;
    let k = -2.0 * d.delta3 / (g.y() * g.xxx());
    // At x* + δ the fold has g_xx ≈ g_xxx δ, so convexity is sign(g_xxx δ g_y).
    let conv = |delta: f64| {
        if g.xxx() * delta * g.y() > 0.0 {
            Side::Plus
        } else {
            Side::Minus
        }
    };
    Ok(L4Unfolding {
        k,
        beta2: -g.a() / g.y(),
        exists_above: k > 0.0,
        convexities: [conv(1.0), conv(-1.0)],
    })
}

/// Branch tangents at a singular equilibrium-fold, with a numerical check
/// that both points are simple just off the event.
pub fn predict_unfolding_l5(
    sys: &System2D,
    p: [f64; 2],
    alpha: f64,
    tol: &Tolerances,
) -> Result<L5Unfolding, UnfoldError> {
    let j = sys.jets(p, alpha)?;
    let d = DeltaSet::from_jets(&j);
    let (f1, g) = (&j.f1, &j.g);
    require("g_y", g.y(), tol)?;
    require("g_xx", g.xx(), tol)?;
    require("Delta2", d.delta2, tol)?;
    require("Delta3", d.delta3, tol)?;
    require("Delta5", d.delta5, tol)?;
    let ts = tangent([[f1.x(), f1.y()], [g.x(), g.y()]], [f1.a(), g.a()])
        .ok_or(UnfoldError::Genericity("Delta2".into()))?;
    let tf = tangent([[g.x(), g.y()], [g.xx(), g.xy()]], [g.a(), g.xa()])
        .ok_or(UnfoldError::Genericity("Delta3".into()))?;
    let confirmed = [-1e-3, 1e-3].iter().all(|&da| {
        let a = alpha + da;
        let seq = solve_point_system(
            sys,
            PointSystem::SingularEquilibrium,
            [p[0] + da * ts[0], p[1] + da * ts[1]],
            a,
            1e-2,
        );
        let fold = solve_point_system(
            sys,
            PointSystem::Fold,
            [p[0] + da * tf[0], p[1] + da * tf[1]],
            a,
            1e-2,
        );
        match (seq, fold) {
            (Some(s), Some(f)) => {
                matches!(
                    classify_point_2d(sys, s, a, tol),
                    Point2DClass::SingularEquilibrium { simple: true, .. }
                ) && matches!(
                    classify_point_2d(sys, f, a, tol),
                    Point2DClass::Fold { simple: true, .. }
                )
            }
            _ => false,
        }
    });
    Ok(L5Unfolding {
        singular_tangent: ts,
        fold_tangent: tf,
        confirmed,
    })
}
