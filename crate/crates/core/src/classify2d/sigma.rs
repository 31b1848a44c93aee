//! Continuation of the singular curve Σ = {g = 0}.

use serde::Serialize;

use crate::expr::Coords;
use crate::System2D;

use super::{solve_point_system, BBox, PointSystem};

/// Orientation of the flow across Σ at a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ArcLabel {
    /// `f1·g_x < 0`: orbits reach Σ from both sides.
    Incoming,
    /// `f1·g_x > 0`: orbits leave Σ on both sides.
    Outgoing,
    /// Fold or singular-equilibrium vertex, where the label switches.
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaVertex {
    pub p: [f64; 2],
    pub label: ArcLabel,
    pub fold: bool,
    pub singular_equilibrium: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SigmaPolyline {
    pub vertices: Vec<SigmaVertex>,
    /// The last vertex connects back to the first.
    pub closed: bool,
    /// Continuation stalled, typically near a point where `∇g = 0`.
    pub truncated: bool,
}

impl SigmaPolyline {
    pub fn points(&self) -> impl Iterator<Item = [f64; 2]> + '_ {
        self.vertices.iter().map(|v| v.p)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SigmaCurve {
    pub polylines: Vec<SigmaPolyline>,
    pub warnings: Vec<String>,
}

impl SigmaCurve {
    pub fn vertices(&self) -> impl Iterator<Item = &SigmaVertex> {
        self.polylines.iter().flat_map(|l| l.vertices.iter())
    }

    pub fn truncated(&self) -> bool {
        self.polylines.iter().any(|l| l.truncated)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TraceOptions {
    /// Nominal distance between vertices; defaults to `1e-2` of the box diagonal.
    pub arc_step: Option<f64>,
    /// Cells per side of the seeding grid.
    pub seed_grid: usize,
    /// Vertices with `|f1·g_x|` at or below this are labeled neutral.
    pub label_tol: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            arc_step: None,
            seed_grid: 64,
            label_tol: 1e-12,
        }
    }
}

const CORRECTED: f64 = 1e-10;
const MAX_TURN_COS: f64 = 0.98;

struct Tracer<'a> {
    sys: &'a System2D,
    alpha: f64,
    bbox: BBox,
    step: f64,
}

enum StepEnd {
    Closed,
    Exited,
    Stalled,
}

impl Tracer<'_> {
    fn g1(&self, p: [f64; 2]) -> Option<[f64; 3]> {
        let v = self.sys.g_first(p, self.alpha).ok()?;
        v.iter()
            .all(|x| x.is_finite())
            .then_some([v[0], v[1], v[2]])
    }

    /// Newton along the gradient onto `g = 0`.
    fn correct(&self, mut p: [f64; 2]) -> Option<[f64; 2]> {
        for _ in 0..12 {
            let [g, gx, gy] = self.g1(p)?;
            if g.abs() <= 1e-13 {
                return Some(p);
            }
            let n2 = gx * gx + gy * gy;
            if n2 < 1e-24 {
                return None;
            }
            p = [p[0] - g * gx / n2, p[1] - g * gy / n2];
        }
        let g = self.g1(p)?[0];
        (g.abs() <= CORRECTED).then_some(p)
    }

    /// Unit tangent `(g_y, −g_x)/|∇g|`.
    fn tangent(&self, p: [f64; 2]) -> Option<[f64; 2]> {
        let [_, gx, gy] = self.g1(p)?;
        let n = gx.hypot(gy);
        (n > 1e-10).then(|| [gy / n, -gx / n])
    }

    /// Corrects a point that lies just outside the box onto the box edge.
    fn clip(&self, inside: [f64; 2], outside: [f64; 2]) -> [f64; 2] {
        let b = &self.bbox;
        let d = [outside[0] - inside[0], outside[1] - inside[1]];
        let mut t = 1.0f64;
        let mut axis = 0;
        for (k, lo, hi) in [(0, b.x0, b.x1), (1, b.y0, b.y1)] {
            let bound = if outside[k] > hi {
                hi
            } else if outside[k] < lo {
                lo
            } else {
                continue;
            };
            let tk = (bound - inside[k]) / d[k];
            if tk < t {
                t = tk;
                axis = k;
            }
        }
        let mut q = [inside[0] + t * d[0], inside[1] + t * d[1]];
        // Newton in the free coordinate along the edge.
        let free = 1 - axis;
        for _ in 0..20 {
            let Some([g, gx, gy]) = self.g1(q) else { break };
            let dg = if free == 0 { gx } else { gy };
            if g.abs() <= 1e-13 || dg.abs() < 1e-14 {
                break;
            }
            let mut r = q;
            r[free] -= g / dg;
            if (r[free] - inside[free]).abs() > 2.0 * self.step {
                break;
            }
            q = r;
        }
        match self.g1(q) {
            Some([g, ..]) if g.abs() <= CORRECTED && self.bbox.contains(q) => q,
            _ => inside,
        }
    }

    /// One direction of continuation from `start`, appending to `out`.
    fn march(
        &self,
        start: [f64; 2],
        sign: f64,
        out: &mut Vec<[f64; 2]>,
        max_vertices: usize,
    ) -> StepEnd {
        let mut p = start;
        let Some(mut t) = self.tangent(p) else {
            return StepEnd::Stalled;
        };
        t = [sign * t[0], sign * t[1]];
        let mut h = self.step;
        let h_min = self.step * 1e-4;
        let mut travelled = 0.0;
        while out.len() < max_vertices {
            let pred = [p[0] + h * t[0], p[1] + h * t[1]];
            let accepted = self.correct(pred).and_then(|q| {
                let tq = self.tangent(q)?;
                let tq = if tq[0] * t[0] + tq[1] * t[1] < 0.0 {
                    [-tq[0], -tq[1]]
                } else {
                    tq
                };
                let turn = tq[0] * t[0] + tq[1] * t[1];
                let drift = (q[0] - pred[0]).hypot(q[1] - pred[1]);
                (turn >= MAX_TURN_COS && drift <= 0.5 * h).then_some((q, tq))
            });
            let Some((q, tq)) = accepted else {
                h *= 0.5;
                if h < h_min {
                    return StepEnd::Stalled;
                }
                continue;
            };
            if !self.bbox.contains(q) {
                out.push(self.clip(p, q));
                return StepEnd::Exited;
            }
            travelled += (q[0] - p[0]).hypot(q[1] - p[1]);
            let back = (q[0] - start[0]).hypot(q[1] - start[1]);
            if travelled > 3.0 * self.step && back < 0.75 * self.step {
                return StepEnd::Closed;
            }
            out.push(q);
            p = q;
            t = tq;
            h = (1.5 * h).min(self.step);
        }
        StepEnd::Stalled
    }

    /// Grid-edge sign changes of `g`, bisected and corrected.
    fn seeds(&self, n: usize) -> Vec<[f64; 2]> {
        let b = &self.bbox;
        let node = |i: usize, j: usize| {
            [
                b.x0 + b.width() * i as f64 / n as f64,
                b.y0 + b.height() * j as f64 / n as f64,
            ]
        };
        let g: Vec<f64> = (0..=n)
            .flat_map(|i| (0..=n).map(move |j| (i, j)))
            .map(|(i, j)| self.sys.eval_g(node(i, j), self.alpha).unwrap_or(f64::NAN))
            .collect();
        let at = |i: usize, j: usize| g[i * (n + 1) + j];
        let mut seeds = Vec::new();
        let mut edge = |a: [f64; 2], b: [f64; 2], ga: f64, gb: f64| {
            if !(ga.is_finite() && gb.is_finite()) || ga.signum() == gb.signum() && ga != 0.0 {
                return;
            }
            let (mut lo, mut hi, mut glo) = (a, b, ga);
            for _ in 0..60 {
                let mid = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
                let gm = self.sys.eval_g(mid, self.alpha).unwrap_or(f64::NAN);
                if !gm.is_finite() {
                    return;
                }
                if gm == 0.0 {
                    lo = mid;
                    break;
                }
                if gm.signum() == glo.signum() {
                    lo = mid;
                    glo = gm;
                } else {
                    hi = mid;
                }
            }
            if let Some(q) = self.correct(lo) {
                if self.bbox.contains(q) {
                    seeds.push(q);
                }
            }
        };
        for i in 0..=n {
            for j in 0..=n {
                if i < n {
                    edge(node(i, j), node(i + 1, j), at(i, j), at(i + 1, j));
                }
                if j < n {
                    edge(node(i, j), node(i, j + 1), at(i, j), at(i, j + 1));
                }
            }
        }
        seeds
    }
}

fn near_polyline(p: [f64; 2], line: &[[f64; 2]], r: f64) -> bool {
    line.windows(2)
        .any(|w| segment_distance(p, w[0], w[1]) <= r)
        || line
            .first()
            .is_some_and(|q| (p[0] - q[0]).hypot(p[1] - q[1]) <= r)
}

fn segment_distance(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let d = [b[0] - a[0], b[1] - a[1]];
    let l2 = d[0] * d[0] + d[1] * d[1];
    let t = if l2 > 0.0 {
        (((p[0] - a[0]) * d[0] + (p[1] - a[1]) * d[1]) / l2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    (p[0] - a[0] - t * d[0]).hypot(p[1] - a[1] - t * d[1])
}

/// Inserts fold and singular-equilibrium vertices wherever `g_x` or `f1`
/// changes sign between neighbours, then labels every vertex.
fn annotate(
    sys: &System2D,
    alpha: f64,
    pts: Vec<[f64; 2]>,
    closed: bool,
    opts: &TraceOptions,
) -> Vec<SigmaVertex> {
    let eval = |p: [f64; 2]| -> (f64, f64) {
        let at = Coords::planar(p, alpha);
        let gx = sys
            .g_jets()
            .eval_first(at)
            .map(|v| v[1])
            .unwrap_or(f64::NAN);
        let f1 = sys.f1_jets().value(at).unwrap_or(f64::NAN);
        (gx, f1)
    };
    let n = pts.len();
    let segs = if closed { n } else { n.saturating_sub(1) };
    let mut out: Vec<SigmaVertex> = Vec::with_capacity(n + 8);
    let mut vals: Vec<(f64, f64)> = pts.iter().map(|&p| eval(p)).collect();
    let label = |gx: f64, f1: f64| {
        let s = f1 * gx;
        if !(s.abs() > opts.label_tol) {
            ArcLabel::Neutral
        } else if s > 0.0 {
            ArcLabel::Outgoing
        } else {
            ArcLabel::Incoming
        }
    };
    for k in 0..n {
        let (gx, f1) = vals[k];
        out.push(SigmaVertex {
            p: pts[k],
            label: label(gx, f1),
            fold: gx == 0.0,
            singular_equilibrium: f1 == 0.0,
        });
        if k >= segs {
            continue;
        }
        let (a, b) = (pts[k], pts[(k + 1) % n]);
        let (gb, fb) = vals[(k + 1) % n];
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let mut inserts: Vec<(f64, SigmaVertex)> = Vec::new();
        for (changes, which) in [
            (gx * gb < 0.0, PointSystem::Fold),
            (f1 * fb < 0.0, PointSystem::SingularEquilibrium),
        ] {
            if !changes {
                continue;
            }
            let mid = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
            let Some(q) = solve_point_system(sys, which, mid, alpha, len) else {
                continue;
            };
            if segment_distance(q, a, b) > len {
                continue;
            }
            let t = ((q[0] - a[0]) * (b[0] - a[0]) + (q[1] - a[1]) * (b[1] - a[1])) / (len * len);
            let (qgx, qf1) = eval(q);
            let fold = which == PointSystem::Fold || qgx.abs() <= 1e-12;
            let seq = which == PointSystem::SingularEquilibrium || qf1.abs() <= 1e-12;
            inserts.push((
                t,
                SigmaVertex {
                    p: q,
                    label: ArcLabel::Neutral,
                    fold,
                    singular_equilibrium: seq,
                },
            ));
        }
        inserts.sort_by(|x, y| x.0.total_cmp(&y.0));
        if inserts.len() == 2
            && (inserts[0].1.p[0] - inserts[1].1.p[0]).hypot(inserts[0].1.p[1] - inserts[1].1.p[1])
                < 1e-9
        {
            // Fold and singular equilibrium coincide.
            let v = inserts.pop().unwrap().1;
            inserts[0].1.fold |= v.fold;
            inserts[0].1.singular_equilibrium |= v.singular_equilibrium;
        }
        out.extend(inserts.into_iter().map(|(_, v)| v));
    }
    vals.clear();
    for v in out.iter_mut() {
        if v.fold || v.singular_equilibrium {
            v.label = ArcLabel::Neutral;
        }
    }
    out
}

/// Traces every component of `g = 0` that meets `bbox`.
///
/// Vertices satisfy `|g| ≤ 1e-10`. Components that touch a point where
/// `∇g = 0` are truncated there and flagged.
pub fn trace_sigma(sys: &System2D, alpha: f64, bbox: &BBox, opts: &TraceOptions) -> SigmaCurve {
    let mut curve = SigmaCurve::default();
    if bbox.is_empty() {
        return curve;
    }
    let step = opts.arc_step.unwrap_or(1e-2 * bbox.diag());
    let tracer = Tracer {
        sys,
        alpha,
        bbox: *bbox,
        step,
    };
    let max_vertices = (200.0 * bbox.diag() / step).ceil() as usize + 1000;
    let mut done: Vec<Vec<[f64; 2]>> = Vec::new();
    for seed in tracer.seeds(opts.seed_grid.max(2)) {
        if done.iter().any(|l| near_polyline(seed, l, 0.75 * step)) {
            continue;
        }
        let mut fwd = vec![seed];
        let end = tracer.march(seed, 1.0, &mut fwd, max_vertices);
        let (pts, closed, stalled) = match end {
            StepEnd::Closed => (fwd, true, false),
            first => {
                let mut back = Vec::new();
                let second = tracer.march(seed, -1.0, &mut back, max_vertices);
                back.reverse();
                back.extend(fwd);
                let stalled =
                    matches!(first, StepEnd::Stalled) || matches!(second, StepEnd::Stalled);
                (back, false, stalled)
            }
        };
        if stalled {
            curve.warnings.push(format!(
                "continuation of Sigma stalled near ({:.6}, {:.6}); a point with grad g = 0 may be close",
                pts.last().map_or(seed[0], |p| p[0]),
                pts.last().map_or(seed[1], |p| p[1])
            ));
        }
        done.push(pts.clone());
        let vertices = annotate(sys, alpha, pts, closed, opts);
        curve.polylines.push(SigmaPolyline {
            vertices,
            closed,
            truncated: stalled,
        });
    }
    curve
}
