//! Codimension-one bifurcations along a one-parameter planar family.
//!
//! Local events are located as regular solutions of augmented systems in
//! `(x, y, α)` (see [`DefiningSystem`]), seeded from the special points found
//! at each parameter sample. Fold-to-fold connections and cycle folds are
//! located by bisection on a shooting measure and on cycle existence.

mod connection;
mod cycles;
mod defining;
mod deltas;
mod unfold;

use rayon::prelude::*;
use serde::Serialize;

use crate::classify1d::uniform_grid;
use crate::classify2d::{
    a_eq, a_seq, find_critical_points, find_points_2d, solve_point_system, trace_sigma, BBox,
    EquilibriumKind, Point2DClass, PointSystem, Side, SingularKind, SpecialPoint2D, Stability,
    TraceOptions,
};
use crate::codes::EventCode;
use crate::genericity::{all_pass, GenericityCheck};
use crate::numeric::{det2, trace2};
use crate::system::Jets2D;
use crate::{System2D, Tolerances};

pub use connection::{detect_fold_connection, FoldConnection};
pub use cycles::CycleSeed;
pub use defining::DefiningSystem;
pub use deltas::{delta_set, test_functions, Candidate, DeltaSet, TestError, TestValue};
pub use unfold::{
    predict_unfolding_l3, predict_unfolding_l4, predict_unfolding_l5, L3Side, L3Unfolding,
    L4Unfolding, L5Unfolding, UnfoldError,
};

/// Quantitative prediction attached to an unfolding.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "case")]
pub enum UnfoldingDetail {
    L3(L3Unfolding),
    L4(L4Unfolding),
    L5(L5Unfolding),
}

/// What the family looks like just below and just above `α*`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Unfolding {
    pub below: String,
    pub above: String,
    pub detail: Option<UnfoldingDetail>,
}

#[derive(Debug, Clone, Serialize)]
pub struct BifurcationEvent {
    pub code: EventCode,
    pub alpha_star: f64,
    pub location: [f64; 2],
    pub deltas: Option<DeltaSet>,
    pub genericity: Vec<GenericityCheck>,
    pub generic: bool,
    /// The test function of `code` evaluated at the refined event.
    pub test_value: Option<f64>,
    pub unfolding: Option<Unfolding>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ScanOptions {
    /// Cells per side of the seeding grid used at each sample.
    pub grid_n: usize,
    pub tol: Tolerances,
    /// Shoot between pairs of simple folds to locate fold-to-fold connections.
    pub fold_connections: bool,
    /// Follow a user-seeded cycle to locate cycle folds.
    pub cycle: Option<CycleSeed>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            grid_n: 32,
            tol: Tolerances::default(),
            fold_connections: true,
            cycle: None,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Scan2D {
    pub events: Vec<BifurcationEvent>,
    pub warnings: Vec<String>,
    /// Some change in the point inventory between samples is not explained
    /// by a located event.
    pub incomplete: bool,
}

const LOCAL_CODES: [EventCode; 8] = [
    EventCode::L1,
    EventCode::L2,
    EventCode::L3,
    EventCode::L4,
    EventCode::L5,
    EventCode::L6,
    EventCode::L7,
    EventCode::L8,
];

fn seeds_for(class: &Point2DClass) -> &'static [EventCode] {
    match class {
        Point2DClass::Equilibrium { .. } => &[EventCode::L1, EventCode::L3, EventCode::L7],
        Point2DClass::SingularEquilibrium { .. } => &[
            EventCode::L2,
            EventCode::L3,
            EventCode::L5,
            EventCode::L6,
            EventCode::L8,
        ],
        Point2DClass::Fold { .. } => &[EventCode::L4, EventCode::L5],
        Point2DClass::DegeneratePoint { .. } => &LOCAL_CODES,
        Point2DClass::Regular => &[],
    }
}

/// Rejects solutions of a defining system that belong to a neighbouring
/// degeneracy rather than to `code`, and fixes T1 versus T2.
fn gate(code: EventCode, j: &Jets2D, tol: &Tolerances) -> Option<EventCode> {
    let ok = |v: f64| v.abs() > tol.deriv;
    let (f2, g) = (j.f2.value(), j.g.value());
    let pass = match code {
        EventCode::T1 | EventCode::T2 => {
            let hess = j.g.xx() * j.g.yy() - j.g.xy() * j.g.xy();
            return Some(if hess < 0.0 {
                EventCode::T1
            } else {
                EventCode::T2
            });
        }
        EventCode::L1 => ok(g),
        EventCode::L7 => ok(g) && det2(&a_eq(j)) > tol.deriv,
        EventCode::L2 | EventCode::L6 => ok(j.g.x()) && ok(f2),
        EventCode::L8 => ok(j.g.x()) && ok(f2) && det2(&a_seq(j)) > tol.deriv,
        EventCode::L4 | EventCode::L5 => ok(j.g.y()),
        EventCode::L3 => true,
        EventCode::L9 | EventCode::G6 => false,
    };
    pass.then_some(code)
}

fn genericity_list(
    code: EventCode,
    j: &Jets2D,
    d: &DeltaSet,
    tol: &Tolerances,
) -> Vec<GenericityCheck> {
    let nz = |name: &str, v: f64| GenericityCheck::nonzero(name, v, tol);
    let pos = |name: &str, v: f64| GenericityCheck::positive(name, v, tol);
    match code {
        EventCode::T1 | EventCode::T2 => {
            vec![
                nz("det D2g", j.g.xx() * j.g.yy() - j.g.xy() * j.g.xy()),
                nz("g_alpha", j.g.a()),
            ]
        }
        EventCode::L1 => vec![nz("tr A_EQ", trace2(&a_eq(j)))],
        EventCode::L2 => vec![nz("tr A_sEQ", trace2(&a_seq(j)))],
        EventCode::L3 => vec![
            nz("f1x", j.f1.x()),
            nz("g_x", j.g.x()),
            nz("Delta1", d.delta1),
            nz("Delta2", d.delta2),
            nz("Delta4", d.delta4),
        ],
        EventCode::L4 => vec![
            nz("f1", j.f1.value()),
            nz("g_y", j.g.y()),
            nz("g_xxx", j.g.xxx()),
            nz("Delta3", d.delta3),
        ],
        EventCode::L5 => vec![
            nz("g_y", j.g.y()),
            nz("g_xx", j.g.xx()),
            nz("Delta2", d.delta2),
            nz("Delta3", d.delta3),
            nz("Delta5", d.delta5),
        ],
        EventCode::L6 => vec![nz("f2", j.f2.value()), nz("tr A_sEQ", trace2(&a_seq(j)))],
        EventCode::L7 => vec![pos("det A_EQ", det2(&a_eq(j)))],
        EventCode::L8 => vec![pos("det A_sEQ", det2(&a_seq(j)))],
        EventCode::L9 | EventCode::G6 => Vec::new(),
    }
}

fn candidate_of(code: EventCode) -> Candidate {
    match code {
        EventCode::T1 | EventCode::T2 => Candidate::Critical,
        EventCode::L1 | EventCode::L7 => Candidate::Equilibrium,
        EventCode::L4 => Candidate::Fold,
        _ => Candidate::SingularEquilibrium,
    }
}

fn side_name(s: Side) -> &'static str {
    match s {
        Side::Plus => "Sigma+",
        Side::Minus => "Sigma-",
    }
}

fn stability_name(s: Stability) -> &'static str {
    match s {
        Stability::Stable => "stable",
        Stability::Unstable => "unstable",
    }
}

fn equilibrium_name(k: EquilibriumKind) -> &'static str {
    match k {
        EquilibriumKind::Saddle => "saddle",
        EquilibriumKind::Node => "node",
        EquilibriumKind::Focus => "focus",
    }
}

fn singular_name(k: SingularKind) -> &'static str {
    match k {
        SingularKind::FoldedNode => "folded node",
        SingularKind::FoldedSaddle => "folded saddle",
        SingularKind::FoldedFocus => "folded focus",
    }
}

fn describe_point(p: &SpecialPoint2D) -> String {
    match &p.class {
        Point2DClass::Equilibrium {
            kind: EquilibriumKind::Saddle,
            side,
            ..
        } => format!("saddle on {}", side_name(*side)),
        Point2DClass::Equilibrium {
            kind,
            stability,
            side,
            ..
        } => {
            format!(
                "{} {} on {}",
                stability_name(*stability),
                equilibrium_name(*kind),
                side_name(*side)
            )
        }
        Point2DClass::SingularEquilibrium { kind, simple, .. } => {
            format!(
                "{}{}",
                if *simple { "" } else { "non-simple " },
                singular_name(*kind)
            )
        }
        Point2DClass::Fold { convexity, simple } => {
            format!(
                "{}fold, {}-convex",
                if *simple { "" } else { "non-simple " },
                side_name(*convexity)
            )
        }
        Point2DClass::DegeneratePoint { code, .. } => format!("degenerate point ({code})"),
        Point2DClass::Regular => "regular point".into(),
    }
}

/// Sorted, comma-separated inventory of special points.
pub fn describe_points(points: &[SpecialPoint2D]) -> String {
    if points.is_empty() {
        return "no special points".into();
    }
    let mut parts: Vec<String> = points.iter().map(describe_point).collect();
    parts.sort();
    parts.join(", ")
}

fn describe_l3_side(s: &L3Side) -> String {
    let eq = match s.equilibrium {
        EquilibriumKind::Node => format!(
            "{} node on {} ({} for the desingularized field)",
            stability_name(s.equilibrium_stability),
            side_name(s.equilibrium_side),
            stability_name(s.equilibrium_desing_stability)
        ),
        k => format!(
            "{} on {}",
            equilibrium_name(k),
            side_name(s.equilibrium_side)
        ),
    };
    format!("{eq} and {}", singular_name(s.singular))
}

/// Context shared by the event builders.
struct Ctx<'a> {
    sys: &'a System2D,
    bbox: BBox,
    tol: Tolerances,
    /// Parameter offset used to look at either side of an event.
    delta: f64,
}

impl Ctx<'_> {
    fn local_box(&self, p: [f64; 2]) -> BBox {
        let r = 0.1 * self.bbox.diag();
        BBox::new(p[0] - r, p[1] - r, p[0] + r, p[1] + r)
    }

    fn inventory(&self, p: [f64; 2], alpha: f64) -> String {
        let found = find_points_2d(self.sys, alpha, &self.local_box(p), 16, &self.tol);
        describe_points(&found.points)
    }

    fn sigma_shape(&self, p: [f64; 2], alpha: f64) -> String {
        let b = self.local_box(p);
        let curve = trace_sigma(
            self.sys,
            alpha,
            &b,
            &TraceOptions {
                arc_step: Some(2e-3 * b.diag()),
                ..TraceOptions::default()
            },
        );
        let closed = curve.polylines.iter().filter(|l| l.closed).count();
        let open = curve.polylines.len() - closed;
        match (closed, open) {
            (0, 0) => "Sigma empty near the point".into(),
            (c, 0) => format!("{c} closed Sigma loop(s) near the point"),
            (0, o) => format!("{o} Sigma branch(es) near the point"),
            (c, o) => format!("{c} closed loop(s) and {o} branch(es) of Sigma near the point"),
        }
    }

    fn observed(&self, p: [f64; 2], alpha: f64, sigma: bool) -> Unfolding {
        let look = |a: f64| {
            if sigma {
                self.sigma_shape(p, a)
            } else {
                self.inventory(p, a)
            }
        };
        Unfolding {
            below: look(alpha - self.delta),
            above: look(alpha + self.delta),
            detail: None,
        }
    }

    fn build(&self, code: EventCode, v: [f64; 3]) -> Option<BifurcationEvent> {
        let (p, alpha) = ([v[0], v[1]], v[2]);
        let j = self.sys.jets(p, alpha).ok()?;
        let code = gate(code, &j, &self.tol)?;
        let d = DeltaSet::from_jets(&j);
        let genericity = genericity_list(code, &j, &d, &self.tol);
        let generic = all_pass(&genericity);
        let test_value = test_functions(self.sys, p, alpha, candidate_of(code))
            .ok()
            .and_then(|tv| tv.iter().find(|t| t.code == code).map(|t| t.value));
        let mut event = BifurcationEvent {
            code,
            alpha_star: alpha,
            location: p,
            deltas: matches!(code, EventCode::L3 | EventCode::L4 | EventCode::L5).then_some(d),
            generic,
            genericity,
            test_value,
            unfolding: None,
            notes: Vec::new(),
        };
        for c in event.genericity.iter().filter(|c| c.near_threshold) {
            event.notes.push(format!(
                "genericity condition {} passes close to the threshold ({:e})",
                c.condition, c.value
            ));
        }
        if generic {
            event.unfolding = self.unfold(&mut event, &j);
        }
        Some(event)
    }

    fn unfold(&self, event: &mut BifurcationEvent, j: &Jets2D) -> Option<Unfolding> {
        let (p, alpha) = (event.location, event.alpha_star);
        match event.code {
            EventCode::L3 => {
                let u = predict_unfolding_l3(j, &self.tol).ok()?;
                let da = 1e-2f64.min(self.delta.max(1e-4));
                for (s, side) in [(-1.0, &u.below), (1.0, &u.above)] {
                    let a = alpha + s * da;
                    let eq = [
                        p[0] + s * da * u.equilibrium_tangent[0],
                        p[1] + s * da * u.equilibrium_tangent[1],
                    ];
                    let sq = [
                        p[0] + s * da * u.singular_tangent[0],
                        p[1] + s * da * u.singular_tangent[1],
                    ];
                    let e = solve_point_system(self.sys, PointSystem::Equilibrium, eq, a, da);
                    let q =
                        solve_point_system(self.sys, PointSystem::SingularEquilibrium, sq, a, da);
                    let observed = (
                        e.map(|e| crate::classify2d::classify_point_2d(self.sys, e, a, &self.tol)),
                        q.map(|q| crate::classify2d::classify_point_2d(self.sys, q, a, &self.tol)),
                    );
                    let agrees = matches!(
                        observed,
                        (Some(Point2DClass::Equilibrium { kind: ek, .. }), Some(Point2DClass::SingularEquilibrium { kind: sk, .. }))
                            if ek == side.equilibrium && sk == side.singular
                    );
                    event.notes.push(format!(
                        "eigenvalue check at alpha = {a}: {}",
                        if agrees {
                            "equilibrium and singular equilibrium types agree with the sign rule on Delta4".to_string()
                        } else {
                            format!("types differ from the prediction ({observed:?})")
                        }
                    ));
                }
                event.notes.push(
                    "types on each side follow the eigenvalues of A_EQ and A_sEQ; a node pairs with a folded saddle where Delta4 (alpha - alpha*) > 0"
                        .into(),
                );
                Some(Unfolding {
                    below: describe_l3_side(&u.below),
                    above: describe_l3_side(&u.above),
                    detail: Some(UnfoldingDetail::L3(u)),
                })
            }
            EventCode::L4 => {
                let u = predict_unfolding_l4(j, &self.tol).ok()?;
                let pair = format!(
                    "two simple folds near x = {} with {}-convex and {}-convex sides",
                    p[0],
                    side_name(u.convexities[0]),
                    side_name(u.convexities[1])
                );
                let none = "no folds near the point".to_string();
                let (below, above) = if u.exists_above {
                    (none, pair)
                } else {
                    (pair, none)
                };
                Some(Unfolding {
                    below,
                    above,
                    detail: Some(UnfoldingDetail::L4(u)),
                })
            }
            EventCode::L5 => {
                let u = predict_unfolding_l5(self.sys, p, alpha, &self.tol).ok()?;
                if !u.confirmed {
                    event.notes.push(
                        "simple fold and singular equilibrium not both confirmed off the event"
                            .into(),
                    );
                }
                let o = self.observed(p, alpha, false);
                Some(Unfolding {
                    detail: Some(UnfoldingDetail::L5(u)),
                    ..o
                })
            }
            EventCode::T1 | EventCode::T2 => Some(self.observed(p, alpha, true)),
            EventCode::L7 | EventCode::L8 => {
                self.probe_cycles(event);
                Some(self.observed(p, alpha, false))
            }
            EventCode::L1 | EventCode::L2 | EventCode::L6 => Some(self.observed(p, alpha, false)),
            EventCode::L9 | EventCode::G6 => None,
        }
    }

    /// Looks for a small cycle around the point at `α* ± 1e-2`.
    fn probe_cycles(&self, event: &mut BifurcationEvent) {
        let which = if event.code == EventCode::L7 {
            PointSystem::Equilibrium
        } else {
            PointSystem::SingularEquilibrium
        };
        let field = crate::desing::DesingularizedField::new(self.sys);
        for da in [-1e-2, 1e-2] {
            let a = event.alpha_star + da;
            let Some(c) = solve_point_system(self.sys, which, event.location, a, 1e-1) else {
                continue;
            };
            let r = 0.05 * self.bbox.diag();
            let found = [[1.0, 0.0], [0.0, 1.0]].iter().find_map(|e: &[f64; 2]| {
                let section = crate::desing::Section {
                    a: [c[0] + 1e-4 * r * e[0], c[1] + 1e-4 * r * e[1]],
                    b: [c[0] + r * e[0], c[1] + r * e[1]],
                };
                let seed = section.point(0.5);
                let opts = crate::desing::CycleOptions {
                    max_period: 200.0,
                    max_iters: 30,
                    ..Default::default()
                };
                crate::desing::find_limit_cycle(&field, a, seed, section, &opts).ok()
            });
            if let Some(cyc) = found {
                event.notes.push(format!(
                    "limit cycle found at alpha = {a}: multiplier {:e}, {:?}",
                    cyc.mu, cyc.kind
                ));
            }
        }
    }
}

fn points_near_edge(pts: &[SpecialPoint2D], bbox: &BBox) -> bool {
    let margin = 1e-2 * bbox.diag();
    pts.iter().any(|p| bbox.edge_distance(p.p) < margin)
}

struct Sample {
    alpha: f64,
    points: Vec<SpecialPoint2D>,
    critical: usize,
    solutions: Vec<(EventCode, [f64; 3])>,
}

/// Locates the codimension-one events of the family over `alpha_range`.
pub fn scan_parameter(
    sys: &System2D,
    alpha_range: (f64, f64),
    n_samples: usize,
    bbox: &BBox,
    opts: &ScanOptions,
) -> Scan2D {
    let (a0, a1) = (
        alpha_range.0.min(alpha_range.1),
        alpha_range.0.max(alpha_range.1),
    );
    let tol = opts.tol;
    let alphas = uniform_grid(a0, a1, n_samples.max(8));
    let max_step = 0.25 * bbox.diag().max(a1 - a0).max(1e-6);
    let in_range =
        |v: &[f64; 3]| v[2] >= a0 - 1e-9 && v[2] <= a1 + 1e-9 && bbox.contains([v[0], v[1]]);
    let systems: Vec<DefiningSystem> = EventCode::ALL
        .iter()
        .filter(|c| **c != EventCode::T2)
        .filter_map(|&c| DefiningSystem::new(sys, c))
        .collect();
    let system_for = |c: EventCode| systems.iter().find(|s| s.code == c);

    let samples: Vec<Sample> = alphas
        .par_iter()
        .map(|&alpha| {
            let found = find_points_2d(sys, alpha, bbox, opts.grid_n, &tol);
            let crit = find_critical_points(sys, alpha, bbox, opts.grid_n);
            let mut solutions = Vec::new();
            for pt in &found.points {
                for &code in seeds_for(&pt.class) {
                    if let Some(v) = system_for(code).and_then(|d| d.solve(pt.p, alpha, max_step)) {
                        solutions.push((code, v));
                    }
                }
            }
            for &c in &crit {
                if let Some(v) = system_for(EventCode::T1).and_then(|d| d.solve(c, alpha, max_step))
                {
                    solutions.push((EventCode::T1, v));
                }
            }
            solutions.retain(|(_, v)| in_range(v));
            Sample {
                alpha,
                points: found.points,
                critical: crit.len(),
                solutions,
            }
        })
        .collect();

    let ctx = Ctx {
        sys,
        bbox: *bbox,
        tol,
        delta: (1e-2 * (a1 - a0)).clamp(1e-5, 1e-2),
    };
    let mut candidates: Vec<(EventCode, [f64; 3])> = samples
        .iter()
        .flat_map(|s| s.solutions.iter().copied())
        .collect();
    candidates.sort_by(|p, q| {
        p.1[2]
            .total_cmp(&q.1[2])
            .then(p.0.cmp(&q.0))
            .then(p.1[0].total_cmp(&q.1[0]))
    });
    let mut kept: Vec<(EventCode, [f64; 3])> = Vec::new();
    for (code, v) in candidates {
        let dup = kept.iter().any(|(c, w)| {
            // T1 and T2 share one defining system.
            let same =
                *c == code || (code == EventCode::T1 && matches!(c, EventCode::T1 | EventCode::T2));
            same && (w[2] - v[2]).abs() <= 1e-7 && (w[0] - v[0]).hypot(w[1] - v[1]) <= 1e-6
        });
        if !dup {
            kept.push((code, v));
        }
    }
    let mut events: Vec<BifurcationEvent> = kept
        .par_iter()
        .filter_map(|&(code, v)| ctx.build(code, v))
        .collect();
    let mut out = Scan2D::default();

    if opts.fold_connections {
        let (ev, warn) = connection::scan_connections(
            sys,
            &alphas,
            &samples.iter().map(|s| s.points.clone()).collect::<Vec<_>>(),
            bbox,
            &tol,
        );
        events.extend(ev);
        out.warnings.extend(warn);
    }
    if let Some(seed) = &opts.cycle {
        let (ev, warn) = cycles::scan_cycles(sys, &alphas, seed, bbox);
        events.extend(ev);
        out.warnings.extend(warn);
    }

    events.sort_by(|p, q| {
        p.alpha_star
            .total_cmp(&q.alpha_star)
            .then(p.code.cmp(&q.code))
            .then(p.location[0].total_cmp(&q.location[0]))
            .then(p.location[1].total_cmp(&q.location[1]))
    });
    for w in events.windows(2) {
        if (w[1].alpha_star - w[0].alpha_star).abs() <= 1e-6 && w[0].code != w[1].code {
            out.warnings.push(format!(
                "{} and {} occur at nearly the same alpha ({}); higher-codimension coincidence",
                w[0].code, w[1].code, w[0].alpha_star
            ));
        }
    }
    for e in events.iter().filter(|e| !e.generic) {
        out.warnings.push(format!(
            "{} event at alpha = {} fails its genericity conditions",
            e.code, e.alpha_star
        ));
    }

    for w in samples.windows(2) {
        let (s, t) = (&w[0], &w[1]);
        if s.points.len() == t.points.len() && s.critical == t.critical {
            continue;
        }
        let explained = events
            .iter()
            .any(|e| e.alpha_star >= s.alpha - 1e-9 && e.alpha_star <= t.alpha + 1e-9);
        if !explained && !points_near_edge(&s.points, bbox) && !points_near_edge(&t.points, bbox) {
            out.incomplete = true;
            out.warnings.push(format!(
                "special-point count changes between alpha = {} and {} without a located event",
                s.alpha, t.alpha
            ));
        }
    }
    out.events = events;
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scan(f1: &str, f2: &str, g: &str, half: f64) -> Scan2D {
        let s = System2D::parse(f1, f2, g).unwrap();
        let opts = ScanOptions {
            fold_connections: false,
            ..ScanOptions::default()
        };
        scan_parameter(&s, (-0.1, 0.1), 21, &BBox::square(half), &opts)
    }

    #[test]
    fn example_family_has_a_single_l3_event() {
        let r = scan("y - x + alpha", "y", "x - x^3", 0.5);
        assert_eq!(r.events.len(), 1, "{:#?}", r.events);
        let e = &r.events[0];
        assert_eq!(e.code, EventCode::L3);
        assert!(
            e.alpha_star.abs() <= 1e-9
                && e.location[0].abs() <= 1e-9
                && e.location[1].abs() <= 1e-9
        );
        let d = e.deltas.unwrap();
        assert_eq!((d.delta1, d.delta2, d.delta4), (-1.0, -1.0, -1.0));
        assert!(e.generic);
        assert!(e.test_value.unwrap().abs() <= 1e-9);
        assert!(!r.incomplete, "{:?}", r.warnings);
    }

    #[test]
    fn fold_singular_equilibrium_family() {
        let r = scan("x + y + alpha", "1", "y + x^2 + alpha*x", 0.5);
        assert_eq!(
            r.events.iter().map(|e| e.code).collect::<Vec<_>>(),
            vec![EventCode::L5],
            "{:#?}",
            r.events
        );
        assert!(r.events[0].alpha_star.abs() <= 1e-9);
        assert!(r.events[0].generic);
    }

    #[test]
    fn cubic_fold_family() {
        let r = scan("1", "1", "x^3 - 3*alpha*x + y", 0.5);
        assert_eq!(r.events.len(), 1, "{:#?}", r.events);
        let e = &r.events[0];
        assert_eq!(e.code, EventCode::L4);
        assert_eq!(e.deltas.unwrap().delta3, -3.0);
        let Some(UnfoldingDetail::L4(u)) = &e.unfolding.as_ref().unwrap().detail else {
            panic!()
        };
        assert!(u.exists_above);
    }

    #[test]
    fn circle_family_is_elliptic() {
        let r = scan("1", "1", "x^2 + y^2 - alpha", 1.0);
        assert_eq!(r.events.len(), 1, "{:#?}", r.events);
        let e = &r.events[0];
        assert_eq!(e.code, EventCode::T2);
        let u = e.unfolding.as_ref().unwrap();
        assert!(u.below.contains("empty"), "{u:?}");
        assert!(u.above.contains("1 closed"), "{u:?}");
    }

    #[test]
    fn hyperbola_family_is_hyperbolic() {
        let r = scan("1", "1", "x^2 - y^2 - alpha", 1.0);
        assert_eq!(r.events.len(), 1, "{:#?}", r.events);
        assert_eq!(r.events[0].code, EventCode::T1);
        let u = r.events[0].unfolding.as_ref().unwrap();
        assert!(
            u.below.contains("2 Sigma branch") && u.above.contains("2 Sigma branch"),
            "{u:?}"
        );
    }

    #[test]
    fn saddle_node_of_equilibria() {
        let r = scan("x^2 + alpha", "-y", "2", 1.0);
        assert_eq!(r.events.len(), 1, "{:#?}", r.events);
        assert_eq!(r.events[0].code, EventCode::L1);
        let u = r.events[0].unfolding.as_ref().unwrap();
        assert!(
            u.below.contains("saddle") && u.above == "no special points",
            "{u:?}"
        );
    }

    #[test]
    fn hopf_of_equilibria() {
        let r = scan(
            "alpha*x - y - x*(x^2 + y^2)",
            "x + alpha*y - y*(x^2 + y^2)",
            "1",
            1.0,
        );
        let codes: Vec<_> = r.events.iter().map(|e| e.code).collect();
        assert_eq!(codes, vec![EventCode::L7], "{:#?}", r.events);
        assert!(
            r.events[0]
                .notes
                .iter()
                .any(|n| n.contains("limit cycle found")),
            "{:?}",
            r.events[0].notes
        );
    }
}
