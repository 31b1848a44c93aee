//! Special points of the planar system `g ẋ = f1`, `ẏ = f2`.
//!
//! Equilibria (`f1 = f2 = 0`, `g ≠ 0`) are classified by the eigenvalues of
//! the desingularized linearization `A_EQ`, with time reversed on `g < 0`.
//! Singular equilibria (`g = f1 = 0`) use `A_sEQ`. Folds are the points of Σ
//! where `g_x = 0`.

mod sectors;
mod sigma;

use serde::Serialize;

use crate::codes::EventCode;
use crate::expr::{Coords, Jet3};
use crate::numeric::{det2, eig2, newton, trace2, Complex, Eigen2, Mat2, NewtonOptions};
use crate::system::Jets2D;
use crate::{System2D, Tolerances};

pub use sectors::{
    sector_decomposition, Ray, RayKind, Sector, SectorDecomposition, SectorError, SectorLabel,
};
pub use sigma::{trace_sigma, ArcLabel, SigmaCurve, SigmaPolyline, SigmaVertex, TraceOptions};

/// Axis-aligned box `[x0, x1] × [y0, y1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BBox {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl BBox {
    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Self {
        BBox {
            x0: x0.min(x1),
            y0: y0.min(y1),
            x1: x0.max(x1),
            y1: y0.max(y1),
        }
    }

    pub fn square(half: f64) -> Self {
        BBox::new(-half, -half, half, half)
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        p[0] >= self.x0 && p[0] <= self.x1 && p[1] >= self.y0 && p[1] <= self.y1
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn diag(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn is_empty(&self) -> bool {
        !(self.width() > 0.0 && self.height() > 0.0)
    }

    /// Distance from `p` (inside) to the nearest edge.
    pub fn edge_distance(&self, p: [f64; 2]) -> f64 {
        (p[0] - self.x0)
            .min(self.x1 - p[0])
            .min(p[1] - self.y0)
            .min(self.y1 - p[1])
    }
}

/// Which side of Σ a point lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Side {
    #[serde(rename = "sigma_plus")]
    Plus,
    #[serde(rename = "sigma_minus")]
    Minus,
}

impl Side {
    pub fn of(g: f64) -> Side {
        if g >= 0.0 {
            Side::Plus
        } else {
            Side::Minus
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumKind {
    Saddle,
    Node,
    Focus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularKind {
    FoldedNode,
    FoldedSaddle,
    FoldedFocus,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Stable,
    Unstable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Point2DClass {
    Equilibrium {
        eigs: [Complex; 2],
        kind: EquilibriumKind,
        /// Stability of the original system, which depends on the side of Σ.
        stability: Stability,
        side: Side,
        /// Stability of the desingularized field alone.
        desing_stability: Stability,
    },
    SingularEquilibrium {
        eigs: [Complex; 2],
        kind: SingularKind,
        simple: bool,
        desing_stability: Stability,
    },
    Fold {
        convexity: Side,
        simple: bool,
    },
    /// A simplicity condition fails; `code` names the bifurcation it signals.
    DegeneratePoint {
        code: EventCode,
        details: String,
    },
    Regular,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecialPoint2D {
    pub p: [f64; 2],
    pub class: Point2DClass,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Points2D {
    pub points: Vec<SpecialPoint2D>,
    pub warnings: Vec<String>,
}

/// `[[f1x, f1y], [g f2x, g f2y]]`.
pub fn a_eq(j: &Jets2D) -> Mat2 {
    let g = j.g.value();
    [[j.f1.x(), j.f1.y()], [g * j.f2.x(), g * j.f2.y()]]
}

/// `[[f1x, f1y], [g_x f2, g_y f2]]`.
pub fn a_seq(j: &Jets2D) -> Mat2 {
    let f2 = j.f2.value();
    [[j.f1.x(), j.f1.y()], [j.g.x() * f2, j.g.y() * f2]]
}

fn stability_of(re: f64) -> Stability {
    if re < 0.0 {
        Stability::Stable
    } else {
        Stability::Unstable
    }
}

fn classify_equilibrium(j: &Jets2D, tol: &Tolerances) -> Point2DClass {
    let a = a_eq(j);
    let (det, tr) = (det2(&a), trace2(&a));
    if tol.is_small(det) {
        return Point2DClass::DegeneratePoint {
            code: EventCode::L1,
            details: format!("det A_EQ = {det:e}"),
        };
    }
    if det > 0.0 && tol.is_small(tr) {
        return Point2DClass::DegeneratePoint {
            code: EventCode::L7,
            details: format!("tr A_EQ = {tr:e}, det = {det:e}"),
        };
    }
    let e = eig2(&a);
    let kind = match e {
        _ if det < 0.0 => EquilibriumKind::Saddle,
        Eigen2::Real { .. } => EquilibriumKind::Node,
        Eigen2::Complex { .. } => EquilibriumKind::Focus,
    };
    let side = Side::of(j.g.value());
    let desing_stability = if kind == EquilibriumKind::Saddle {
        Stability::Unstable
    } else {
        stability_of(tr)
    };
    let stability = match (kind, side, desing_stability) {
        (EquilibriumKind::Saddle, _, _) => Stability::Unstable,
        (_, Side::Plus, s) => s,
        (_, Side::Minus, Stability::Stable) => Stability::Unstable,
        (_, Side::Minus, Stability::Unstable) => Stability::Stable,
    };
    Point2DClass::Equilibrium {
        eigs: e.values(),
        kind,
        stability,
        side,
        desing_stability,
    }
}

fn classify_singular_equilibrium(j: &Jets2D, tol: &Tolerances) -> Point2DClass {
    let f2 = j.f2.value();
    let gx = j.g.x();
    let delta2 = j.f1.x() * j.g.y() - j.f1.y() * gx;
    if tol.is_small(f2) {
        return Point2DClass::DegeneratePoint {
            code: EventCode::L3,
            details: format!("f2 = {f2:e} at a singular equilibrium"),
        };
    }
    if tol.is_small(gx) {
        return Point2DClass::DegeneratePoint {
            code: EventCode::L5,
            details: format!("g_x = {gx:e} at a singular equilibrium"),
        };
    }
    if tol.is_small(delta2) {
        return Point2DClass::DegeneratePoint {
            code: EventCode::L2,
            details: format!("Delta2 = {delta2:e}"),
        };
    }
    let a = a_seq(j);
    let (det, tr) = (det2(&a), trace2(&a));
    if det > 0.0 && tol.is_small(tr) {
        return Point2DClass::DegeneratePoint {
            code: EventCode::L8,
            details: format!("tr A_sEQ = {tr:e}, det = {det:e}"),
        };
    }
    let e = eig2(&a);
    let kind = match e {
        Eigen2::Complex { .. } => SingularKind::FoldedFocus,
        _ if det > 0.0 => SingularKind::FoldedNode,
        _ => SingularKind::FoldedSaddle,
    };
    let desing_stability = if kind == SingularKind::FoldedSaddle {
        Stability::Unstable
    } else {
        stability_of(tr)
    };
    Point2DClass::SingularEquilibrium {
        eigs: e.values(),
        kind,
        simple: true,
        desing_stability,
    }
}

fn classify_fold(j: &Jets2D, tol: &Tolerances) -> Point2DClass {
    let (f1, gy, gxx) = (j.f1.value(), j.g.y(), j.g.xx());
    if tol.is_small(gxx) {
        return Point2DClass::DegeneratePoint {
            code: EventCode::L4,
            details: format!("g_xx = {gxx:e} at a fold"),
        };
    }
    if tol.is_small(f1) {
        return Point2DClass::DegeneratePoint {
            code: EventCode::L5,
            details: format!("f1 = {f1:e} at a fold"),
        };
    }
    let convexity = if gxx * gy > 0.0 {
        Side::Plus
    } else {
        Side::Minus
    };
    Point2DClass::Fold {
        convexity,
        simple: true,
    }
}

/// Classification from precomputed jets (second order suffices).
pub fn classify_jets_2d(j: &Jets2D, tol: &Tolerances) -> Point2DClass {
    let f1z = tol.is_zero(j.f1.value());
    let f2z = tol.is_zero(j.f2.value());
    let gz = tol.is_zero(j.g.value());
    if gz && tol.is_small(j.g.x()) && tol.is_small(j.g.y()) {
        let hess = j.g.xx() * j.g.yy() - j.g.xy() * j.g.xy();
        let code = if hess < 0.0 {
            EventCode::T1
        } else {
            EventCode::T2
        };
        return Point2DClass::DegeneratePoint {
            code,
            details: format!("grad g = 0 on Sigma, det D2g = {hess:e}"),
        };
    }
    match (f1z, f2z, gz) {
        (true, true, true) => Point2DClass::DegeneratePoint {
            code: EventCode::L3,
            details: "equilibrium on the singular curve".into(),
        },
        (true, true, false) => classify_equilibrium(j, tol),
        (true, _, true) => classify_singular_equilibrium(j, tol),
        (_, _, true) if tol.is_small(j.g.x()) => classify_fold(j, tol),
        _ => Point2DClass::Regular,
    }
}

/// Classifies the point `p` at parameter `alpha`.
pub fn classify_point_2d(
    sys: &System2D,
    p: [f64; 2],
    alpha: f64,
    tol: &Tolerances,
) -> Point2DClass {
    match sys.jets_upto(p, alpha, 2) {
        Ok(j) => classify_jets_2d(&j, tol),
        Err(_) => Point2DClass::Regular,
    }
}

/// Square systems in `(x, y)` whose solutions are special points.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointSystem {
    /// `f1 = f2 = 0`
    Equilibrium,
    /// `f1 = g = 0`
    SingularEquilibrium,
    /// `g = g_x = 0`
    Fold,
    /// `g_x = g_y = 0`
    Critical,
}

fn first(j: &Jet3) -> [f64; 3] {
    [j.value(), j.x(), j.y()]
}

/// Residual and Jacobian of a point system.
pub fn point_residual(
    sys: &System2D,
    which: PointSystem,
    p: [f64; 2],
    alpha: f64,
) -> Option<([f64; 2], Mat2)> {
    let at = Coords::planar(p, alpha);
    match which {
        PointSystem::Equilibrium | PointSystem::SingularEquilibrium => {
            let a = first(&sys.f1_jets().eval_order(at, 1).ok()?);
            let other = if which == PointSystem::Equilibrium {
                sys.f2_jets()
            } else {
                sys.g_jets()
            };
            let b = first(&other.eval_order(at, 1).ok()?);
            Some(([a[0], b[0]], [[a[1], a[2]], [b[1], b[2]]]))
        }
        PointSystem::Fold => {
            let g = sys.g_jets().eval_order(at, 2).ok()?;
            Some(([g.value(), g.x()], [[g.x(), g.y()], [g.xx(), g.xy()]]))
        }
        PointSystem::Critical => {
            let g = sys.g_jets().eval_order(at, 2).ok()?;
            Some(([g.x(), g.y()], [[g.xx(), g.xy()], [g.xy(), g.yy()]]))
        }
    }
}

/// Damped Newton on a point system; accepts residuals at or below `1e-12`
/// relative to the Jacobian scale.
pub fn solve_point_system(
    sys: &System2D,
    which: PointSystem,
    p0: [f64; 2],
    alpha: f64,
    max_step: f64,
) -> Option<[f64; 2]> {
    let sol = newton(
        |v: &[f64; 2]| point_residual(sys, which, *v, alpha),
        p0,
        &NewtonOptions {
            max_iters: 60,
            f_tol: 1e-15,
            max_step,
        },
    )?;
    let (_, jac) = point_residual(sys, which, sol.x, alpha)?;
    let scale = 1.0_f64.max(
        jac.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
            * (1.0 + sol.x[0].abs().max(sol.x[1].abs())),
    );
    (sol.residual <= 1e-12 * scale).then_some(sol.x)
}

/// Cell centres where every component of `which` may vanish: either its
/// sign changes over the cell corners or its smallest corner value is within
/// twice the variation across the cell.
fn screened_seeds(
    sys: &System2D,
    which: PointSystem,
    alpha: f64,
    bbox: &BBox,
    n: usize,
) -> Vec<[f64; 2]> {
    let n = n.max(1);
    let node = |i: usize, j: usize| {
        [
            bbox.x0 + bbox.width() * i as f64 / n as f64,
            bbox.y0 + bbox.height() * j as f64 / n as f64,
        ]
    };
    let vals: Vec<Option<[f64; 2]>> = (0..=n)
        .flat_map(|i| (0..=n).map(move |j| (i, j)))
        .map(|(i, j)| point_residual(sys, which, node(i, j), alpha).map(|r| r.0))
        .collect();
    let at = |i: usize, j: usize| vals[i * (n + 1) + j];
    let mut seeds = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let corners = [at(i, j), at(i + 1, j), at(i, j + 1), at(i + 1, j + 1)];
            let possible = (0..2).all(|k| {
                let v: Vec<f64> = corners.iter().flatten().map(|c| c[k]).collect();
                if v.is_empty() {
                    return true;
                }
                let lo = v.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                (lo <= 0.0 && hi >= 0.0) || lo.abs().min(hi.abs()) <= 2.0 * (hi - lo)
            });
            if possible {
                let a = node(i, j);
                let b = node(i + 1, j + 1);
                seeds.push([0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])]);
            }
        }
    }
    seeds
}

/// All solutions of `which` inside `bbox` reachable from screened grid seeds.
pub fn solve_on_grid(
    sys: &System2D,
    which: PointSystem,
    alpha: f64,
    bbox: &BBox,
    grid_n: usize,
) -> Vec<[f64; 2]> {
    let max_step = 0.25 * bbox.diag();
    let mut sols: Vec<[f64; 2]> = screened_seeds(sys, which, alpha, bbox, grid_n)
        .into_iter()
        .filter_map(|s| solve_point_system(sys, which, s, alpha, max_step))
        .filter(|p| bbox.contains(*p))
        .collect();
    sols.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut out: Vec<[f64; 2]> = Vec::new();
    for p in sols {
        if !out
            .iter()
            .any(|q| (p[0] - q[0]).hypot(p[1] - q[1]) <= 1e-9 * (1.0 + p[0].abs() + p[1].abs()))
        {
            out.push(p);
        }
    }
    out
}

/// Critical points of `g` (where `∇g = 0`) inside `bbox`.
pub fn find_critical_points(
    sys: &System2D,
    alpha: f64,
    bbox: &BBox,
    grid_n: usize,
) -> Vec<[f64; 2]> {
    solve_on_grid(sys, PointSystem::Critical, alpha, bbox, grid_n)
}

/// Finds and classifies equilibria, singular equilibria and folds in `bbox`.
///
/// Solutions closer than `10·tol.zero` are merged silently; solutions closer
/// than `1e-6` are merged with a warning.
pub fn find_points_2d(
    sys: &System2D,
    alpha: f64,
    bbox: &BBox,
    grid_n: usize,
    tol: &Tolerances,
) -> Points2D {
    let mut out = Points2D::default();
    if bbox.is_empty() {
        return out;
    }
    let mut all: Vec<[f64; 2]> = Vec::new();
    for which in [
        PointSystem::Equilibrium,
        PointSystem::SingularEquilibrium,
        PointSystem::Fold,
    ] {
        all.extend(solve_on_grid(sys, which, alpha, bbox, grid_n));
    }
    all.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    let mut kept: Vec<[f64; 2]> = Vec::new();
    for p in all {
        match kept
            .iter()
            .map(|q| (p[0] - q[0]).hypot(p[1] - q[1]))
            .fold(f64::INFINITY, f64::min)
        {
            d if d <= 10.0 * tol.zero => {}
            d if d <= 1e-6 => out.warnings.push(format!(
                "merged near-duplicate point at ({}, {})",
                p[0], p[1]
            )),
            _ => kept.push(p),
        }
    }
    for p in kept {
        let class = classify_point_2d(sys, p, alpha, tol);
        if class != Point2DClass::Regular {
            out.points.push(SpecialPoint2D { p, class });
        }
    }
    out
}
