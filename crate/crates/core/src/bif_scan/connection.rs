//! Shooting between folds.

use rayon::prelude::*;
use serde::Serialize;

use crate::classify2d::{solve_point_system, BBox, Point2DClass, PointSystem, SpecialPoint2D};
use crate::codes::EventCode;
use crate::desing::DesingularizedField;
use crate::genericity::{all_pass, GenericityCheck};
use crate::numeric::{dopri5, Control, OdeOptions};
use crate::{System2D, Tolerances};

use super::{BifurcationEvent, Unfolding};

/// Where the orbit through one fold meets the normal line through another.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FoldConnection {
    /// Signed offset from `fold_b` along `∇g(fold_b)/|∇g|`; zero at a connection.
    pub measure: f64,
    /// Desingularized time from `fold_a`; negative for the backward orbit.
    pub tau: f64,
    pub crossing: [f64; 2],
}

fn shoot(
    field: &DesingularizedField,
    alpha: f64,
    a: [f64; 2],
    b: [f64; 2],
    n: [f64; 2],
    half: f64,
    bbox: &BBox,
    tau_end: f64,
) -> Option<FoldConnection> {
    let h = |y: &[f64; 2]| (y[0] - b[0]) * -n[1] + (y[1] - b[1]) * n[0];
    let opts = OdeOptions {
        rtol: 1e-11,
        atol: 1e-13,
        max_steps: 50_000,
        ..OdeOptions::default()
    };
    let mut hit = None;
    dopri5(
        |y: &[f64; 2]| {
            let f = field.eval(*y, alpha).ok()?;
            f.iter().all(|v| v.is_finite()).then_some(f)
        },
        0.0,
        a,
        tau_end,
        &opts,
        |step| {
            if let Some(t) = step.first_sign_change(|y| Some(h(y))) {
                let q = step.eval(t);
                let s = (q[0] - b[0]) * n[0] + (q[1] - b[1]) * n[1];
                if s.abs() <= half {
                    hit = Some(FoldConnection {
                        measure: s,
                        tau: t,
                        crossing: q,
                    });
                    return Control::StopAt(t);
                }
            }
            if bbox.contains(step.y1) {
                Control::Continue
            } else {
                Control::StopAt(step.t1)
            }
        },
    );
    hit
}

fn measure_with(
    field: &DesingularizedField,
    sys: &System2D,
    alpha: f64,
    a: [f64; 2],
    b: [f64; 2],
    bbox: &BBox,
) -> Option<FoldConnection> {
    let gb = sys.g_first(b, alpha).ok()?;
    let norm = gb[1].hypot(gb[2]);
    if norm == 0.0 {
        return None;
    }
    let n = [gb[1] / norm, gb[2] / norm];
    let half = (0.5 * (a[0] - b[0]).hypot(a[1] - b[1])).min(0.1 * bbox.diag());
    let tau = 1e3;
    let fwd = shoot(field, alpha, a, b, n, half, bbox, tau);
    let bwd = shoot(field, alpha, a, b, n, half, bbox, -tau);
    match (fwd, bwd) {
        (Some(f), Some(r)) => Some(if f.tau.abs() <= r.tau.abs() { f } else { r }),
        (f, r) => f.or(r),
    }
}

/// Separation between the orbit through `fold_a` and `fold_b`, or `None`
/// when the orbit leaves `bbox` without crossing the normal line through
/// `fold_b` near it.
pub fn detect_fold_connection(
    sys: &System2D,
    alpha: f64,
    fold_a: [f64; 2],
    fold_b: [f64; 2],
    bbox: &BBox,
) -> Option<FoldConnection> {
    measure_with(
        &DesingularizedField::new(sys),
        sys,
        alpha,
        fold_a,
        fold_b,
        bbox,
    )
}

fn simple_folds(points: &[SpecialPoint2D]) -> Vec<[f64; 2]> {
    points
        .iter()
        .filter(|p| matches!(p.class, Point2DClass::Fold { simple: true, .. }))
        .map(|p| p.p)
        .collect()
}

fn nearest(p: [f64; 2], qs: &[[f64; 2]]) -> usize {
    let d = |q: &[f64; 2]| (p[0] - q[0]).hypot(p[1] - q[1]);
    (0..qs.len())
        .min_by(|&i, &j| d(&qs[i]).total_cmp(&d(&qs[j])))
        .unwrap_or(0)
}

#[derive(Clone, Copy)]
struct Bracket {
    alpha: f64,
    a: [f64; 2],
    b: [f64; 2],
    m: f64,
}

/// Bisects a sign change of the connection measure. The fold positions are
/// Newton-corrected at every trial parameter.
fn bisect(
    field: &DesingularizedField,
    sys: &System2D,
    bbox: &BBox,
    mut lo: Bracket,
    mut hi: Bracket,
) -> Option<(Bracket, Bracket)> {
    let step = 0.05 * bbox.diag();
    for _ in 0..80 {
        if hi.alpha - lo.alpha <= 1e-10 {
            break;
        }
        let alpha = 0.5 * (lo.alpha + hi.alpha);
        let mid = |u: [f64; 2], v: [f64; 2]| [0.5 * (u[0] + v[0]), 0.5 * (u[1] + v[1])];
        let a = solve_point_system(sys, PointSystem::Fold, mid(lo.a, hi.a), alpha, step)?;
        let b = solve_point_system(sys, PointSystem::Fold, mid(lo.b, hi.b), alpha, step)?;
        let m = measure_with(field, sys, alpha, a, b, bbox)?.measure;
        let t = Bracket { alpha, a, b, m };
        if m == 0.0 {
            return Some((t, t));
        }
        if (m > 0.0) == (lo.m > 0.0) {
            lo = t;
        } else {
            hi = t;
        }
    }
    Some((lo, hi))
}

fn passing(m: f64) -> &'static str {
    if m > 0.0 {
        "Sigma+"
    } else {
        "Sigma-"
    }
}

/// Fold-to-fold connections over the samples, bracketed by sign changes of
/// the measure between consecutive samples with matching fold sets.
pub(super) fn scan_connections(
    sys: &System2D,
    alphas: &[f64],
    points: &[Vec<SpecialPoint2D>],
    bbox: &BBox,
    tol: &Tolerances,
) -> (Vec<BifurcationEvent>, Vec<String>) {
    let field = DesingularizedField::new(sys);
    let folds: Vec<Vec<[f64; 2]>> = points.iter().map(|p| simple_folds(p)).collect();
    let measures: Vec<Vec<Option<f64>>> = alphas
        .par_iter()
        .zip(folds.par_iter())
        .map(|(&alpha, fs)| {
            let mut out = Vec::new();
            for i in 0..fs.len() {
                for j in i + 1..fs.len() {
                    out.push(
                        measure_with(&field, sys, alpha, fs[i], fs[j], bbox).map(|c| c.measure),
                    );
                }
            }
            out
        })
        .collect();

    let mut events = Vec::new();
    let mut warnings = Vec::new();
    for k in 0..alphas.len().saturating_sub(1) {
        let (f0, f1) = (&folds[k], &folds[k + 1]);
        if f0.len() < 2 || f0.len() != f1.len() {
            continue;
        }
        let map: Vec<usize> = f0.iter().map(|p| nearest(*p, f1)).collect();
        let mut idx = 0;
        for i in 0..f0.len() {
            for j in i + 1..f0.len() {
                let here = measures[k][idx];
                idx += 1;
                let (mi, mj) = (map[i].min(map[j]), map[i].max(map[j]));
                if mi == mj {
                    continue;
                }
                // Position of the pair (mi, mj) in the next sample's list.
                let n = f1.len();
                let next_idx = mi * n - mi * (mi + 1) / 2 + (mj - mi - 1);
                let (a1, b1) = (f1[map[i]], f1[map[j]]);
                let next = if map[i] < map[j] {
                    measures[k + 1][next_idx]
                } else {
                    measure_with(&field, sys, alphas[k + 1], a1, b1, bbox).map(|c| c.measure)
                };
                let (Some(m0), Some(m1)) = (here, next) else {
                    continue;
                };
                if m0 * m1 > 0.0 {
                    continue;
                }
                let lo = Bracket {
                    alpha: alphas[k],
                    a: f0[i],
                    b: f0[j],
                    m: m0,
                };
                let hi = Bracket {
                    alpha: alphas[k + 1],
                    a: a1,
                    b: b1,
                    m: m1,
                };
                let slope = (m1 - m0) / (alphas[k + 1] - alphas[k]);
                let Some((lo, hi)) = bisect(&field, sys, bbox, lo, hi) else {
                    warnings.push(format!(
                        "fold connection bracket between alpha = {} and {} could not be refined",
                        alphas[k],
                        alphas[k + 1]
                    ));
                    continue;
                };
                let best = if lo.m.abs() <= hi.m.abs() { &lo } else { &hi };
                if best.m.abs() > 1e-6 * bbox.diag() {
                    // A jump of the measure, not a zero.
                    continue;
                }
                let f1a = sys
                    .jets_upto(best.a, best.alpha, 1)
                    .map(|j| j.f1.value())
                    .unwrap_or(0.0);
                let f1b = sys
                    .jets_upto(best.b, best.alpha, 1)
                    .map(|j| j.f1.value())
                    .unwrap_or(0.0);
                let genericity = vec![
                    GenericityCheck::nonzero("f1 at first fold", f1a, tol),
                    GenericityCheck::nonzero("f1 at second fold", f1b, tol),
                    GenericityCheck::nonzero("d(measure)/d(alpha)", slope, tol),
                ];
                let generic = all_pass(&genericity);
                let (below, above) = (lo.m.min(hi.m), lo.m.max(hi.m));
                let (below, above) = if slope > 0.0 {
                    (below, above)
                } else {
                    (above, below)
                };
                let describe = |m: f64| {
                    format!(
                        "the orbit through the first fold passes the second fold on its {} side",
                        passing(m)
                    )
                };
                events.push(BifurcationEvent {
                    code: EventCode::G6,
                    alpha_star: best.alpha,
                    location: best.a,
                    deltas: None,
                    generic,
                    genericity,
                    test_value: Some(best.m),
                    unfolding: generic.then(|| Unfolding {
                        below: describe(below),
                        above: describe(above),
                        detail: None,
                    }),
                    notes: vec![format!(
                        "connects the fold at ({}, {}) to the fold at ({}, {})",
                        best.a[0], best.a[1], best.b[0], best.b[1]
                    )],
                });
            }
        }
    }
    (events, warnings)
}
