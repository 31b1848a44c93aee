//! The desingularized field `(f1, f2·g)` and its correspondence with DAE orbits.
//!
//! Multiplying the planar system by `g` (the time change `dτ = dt/g`) gives a
//! smooth ODE with the same orbits. Time runs forward on Σ+ and backward on
//! Σ−, so each desingularized orbit splits at its Σ crossings into DAE orbit
//! pieces with alternating orientation.

mod cycle;

use serde::Serialize;

use crate::classify2d::{ArcLabel, BBox, Side};
use crate::expr::{Coords, EvalError, Expr, Jet3, JetTable, Var};
use crate::numeric::{dopri5, locate_root, Control, DenseStep, Mat2, OdeEnd, OdeOptions};
use crate::System2D;

pub use cycle::{find_limit_cycle, CycleError, CycleKind, CycleOptions, CycleRecord, Section};

/// Planar vector field `(first, second)` together with the `g` that defines Σ.
#[derive(Debug, Clone)]
pub struct DesingularizedField {
    first: Expr,
    second: Expr,
    g: Expr,
    jac: [[Expr; 2]; 2],
    j1: JetTable,
    j2: JetTable,
    jg: JetTable,
}

impl DesingularizedField {
    /// `(f1, f2·g)`.
    pub fn new(sys: &System2D) -> Self {
        Self::from_parts(
            sys.f1().clone(),
            Expr::mul(sys.f2().clone(), sys.g().clone()),
            sys.g().clone(),
        )
    }

    /// Arbitrary field with an independent Σ; used to study a fixed flow
    /// against different singular curves.
    pub fn from_parts(first: Expr, second: Expr, g: Expr) -> Self {
        let jac = [
            [first.differentiate(Var::X), first.differentiate(Var::Y)],
            [second.differentiate(Var::X), second.differentiate(Var::Y)],
        ];
        let (j1, j2, jg) = (
            JetTable::new(&first),
            JetTable::new(&second),
            JetTable::new(&g),
        );
        DesingularizedField {
            first,
            second,
            g,
            jac,
            j1,
            j2,
            jg,
        }
    }

    pub fn first(&self) -> &Expr {
        &self.first
    }
    pub fn second(&self) -> &Expr {
        &self.second
    }
    pub fn g(&self) -> &Expr {
        &self.g
    }

    pub fn eval(&self, p: [f64; 2], alpha: f64) -> Result<[f64; 2], EvalError> {
        let at = Coords::planar(p, alpha);
        Ok([self.first.eval(at)?, self.second.eval(at)?])
    }

    pub fn eval_g(&self, p: [f64; 2], alpha: f64) -> Result<f64, EvalError> {
        self.g.eval(Coords::planar(p, alpha))
    }

    pub fn jacobian(&self, p: [f64; 2], alpha: f64) -> Result<Mat2, EvalError> {
        let at = Coords::planar(p, alpha);
        Ok([
            [self.jac[0][0].eval(at)?, self.jac[0][1].eval(at)?],
            [self.jac[1][0].eval(at)?, self.jac[1][1].eval(at)?],
        ])
    }

    pub fn divergence(&self, p: [f64; 2], alpha: f64) -> Result<f64, EvalError> {
        let at = Coords::planar(p, alpha);
        Ok(self.jac[0][0].eval(at)? + self.jac[1][1].eval(at)?)
    }

    /// Jets of both components.
    pub fn jets(&self, p: [f64; 2], alpha: f64) -> Result<(Jet3, Jet3), EvalError> {
        let at = Coords::planar(p, alpha);
        Ok((self.j1.eval(at)?, self.j2.eval(at)?))
    }

    /// `(g, g_x, g_y)` at `p`.
    fn g_grad(&self, p: [f64; 2], alpha: f64) -> Option<[f64; 3]> {
        let v = self.jg.eval_first(Coords::planar(p, alpha)).ok()?;
        Some([v[0], v[1], v[2]])
    }

    /// Signed transversality `f1·g_x` of a Σ point.
    pub fn crossing_margin(&self, p: [f64; 2], alpha: f64) -> Option<f64> {
        let [_, gx, _] = self.g_grad(p, alpha)?;
        Some(self.first.eval(Coords::planar(p, alpha)).ok()? * gx)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DesingOptions {
    pub ode: OdeOptions,
    /// The run stops on leaving this box.
    pub bbox: Option<BBox>,
    /// The run stops once `|F|` falls to this level.
    pub eq_tol: f64,
    /// Crossings with `|f1·g_x|` below this are not transversal.
    pub transversal_tol: f64,
    /// A local minimum of `|g|` below this without a sign change counts as a touch.
    pub touch_tol: f64,
    /// Extra interpolated samples per accepted step.
    pub dense_per_step: usize,
}

impl Default for DesingOptions {
    fn default() -> Self {
        DesingOptions {
            ode: OdeOptions::default(),
            bbox: None,
            eq_tol: 1e-10,
            transversal_tol: 1e-7,
            touch_tol: 1e-8,
            dense_per_step: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DesingSample {
    /// Desingularized time.
    pub tau: f64,
    pub p: [f64; 2],
    /// DAE time, from `dt/dτ = g`.
    pub t: f64,
    pub g: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SigmaEventKind {
    /// `g` changes sign. `label` follows `f1·g_x`.
    Crossing { label: ArcLabel, transversal: bool },
    /// `|g|` has a near-zero local minimum without a sign change.
    Touch,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SigmaEvent {
    /// Index of the event point in the orbit samples.
    pub index: usize,
    pub tau: f64,
    pub p: [f64; 2],
    pub kind: SigmaEventKind,
    /// `f1·g_x` at the event point.
    pub margin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DesingEnd {
    TimeOut,
    LeftDomain,
    Equilibrium,
    /// Step size underflow, typically a blow-up.
    StepUnderflow,
    EvalFailed,
    MaxSteps,
}

#[derive(Debug, Clone, Serialize)]
pub struct DesingOrbit {
    pub alpha: f64,
    pub samples: Vec<DesingSample>,
    pub events: Vec<SigmaEvent>,
    pub end: DesingEnd,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mark {
    Crossing,
    Touch,
    Dense,
}

/// Moves `p` onto `g = 0` along the gradient; returns `p` unchanged if that fails.
fn project_to_sigma(field: &DesingularizedField, p: [f64; 2], alpha: f64) -> [f64; 2] {
    let mut q = p;
    for _ in 0..8 {
        let Some([g, gx, gy]) = field.g_grad(q, alpha) else {
            return p;
        };
        if g.abs() <= 1e-14 {
            break;
        }
        let n2 = gx * gx + gy * gy;
        if n2 < 1e-20 {
            return p;
        }
        q = [q[0] - g * gx / n2, q[1] - g * gy / n2];
    }
    if (q[0] - p[0]).hypot(q[1] - p[1]) > 1e-6 {
        p
    } else {
        q
    }
}

/// Every sign change of `h` inside the step, in time order.
fn sign_changes<const N: usize, H>(step: &DenseStep<N>, mut h: H, parts: usize) -> Vec<f64>
where
    H: FnMut(&[f64; N]) -> f64,
{
    let mut out = Vec::new();
    let at = |k: usize| step.t0 + (step.t1 - step.t0) * k as f64 / parts as f64;
    let mut ta = step.t0;
    let mut ha = h(&step.y0);
    for k in 1..=parts {
        let tb = if k == parts { step.t1 } else { at(k) };
        let hb = h(&step.eval(tb));
        if ha * hb < 0.0 {
            out.push(locate_root(|t| h(&step.eval(t)), ta, tb, ha, hb));
        }
        ta = tb;
        ha = hb;
    }
    out
}

/// Integrates `[x, y, t]` with `dx/dτ = F`, `dt/dτ = g` from `p0` over
/// `τ ∈ [0, tau_end]` (either sign), logging every Σ event.
pub fn integrate_desing(
    field: &DesingularizedField,
    p0: [f64; 2],
    alpha: f64,
    tau_end: f64,
    opts: &DesingOptions,
) -> DesingOrbit {
    let g0 = field.eval_g(p0, alpha).unwrap_or(f64::NAN);
    let mut orbit = DesingOrbit {
        alpha,
        samples: vec![DesingSample {
            tau: 0.0,
            p: p0,
            t: 0.0,
            g: g0,
        }],
        events: Vec::new(),
        end: DesingEnd::TimeOut,
    };
    match field.eval(p0, alpha) {
        Err(_) => {
            orbit.end = DesingEnd::EvalFailed;
            return orbit;
        }
        Ok(f) if f[0].hypot(f[1]) <= opts.eq_tol => {
            orbit.end = DesingEnd::Equilibrium;
            return orbit;
        }
        Ok(_) => {}
    }
    let rhs = |y: &[f64; 3]| -> Option<[f64; 3]> {
        let at = Coords::planar([y[0], y[1]], alpha);
        let v = [
            field.first.eval(at).ok()?,
            field.second.eval(at).ok()?,
            field.g.eval(at).ok()?,
        ];
        v.iter().all(|c| c.is_finite()).then_some(v)
    };
    let g_of = |y: &[f64; 3]| field.eval_g([y[0], y[1]], alpha).unwrap_or(f64::NAN);
    let mut end: Option<DesingEnd> = None;
    let outcome = dopri5(rhs, 0.0, [p0[0], p0[1], 0.0], tau_end, &opts.ode, |step| {
        let mut stop: Option<(f64, DesingEnd)> = None;
        if let Some(b) = &opts.bbox {
            let inside = |y: &[f64; 3]| b.edge_distance([y[0], y[1]]);
            if let Some(&t) = sign_changes(step, inside, 4).first() {
                stop = Some((t, DesingEnd::LeftDomain));
            }
        }
        let limit = stop.map_or(step.t1, |s| s.0);
        let before = |t: f64| {
            (t - step.t0) * (step.t1 - step.t0).signum()
                <= (limit - step.t0) * (step.t1 - step.t0).signum()
        };

        // Σ crossings, touches and dense samples inside the step, in time order.
        let mut marks: Vec<(f64, Mark)> = sign_changes(step, g_of, 8)
            .into_iter()
            .filter(|&t| before(t))
            .map(|t| (t, Mark::Crossing))
            .collect();
        if marks.is_empty() {
            if let Some((t, m)) = step.interior_min_abs(|y| Some(g_of(y))) {
                if m <= opts.touch_tol && before(t) {
                    marks.push((t, Mark::Touch));
                }
            }
        }
        for k in 1..=opts.dense_per_step {
            let t = step.t0 + (step.t1 - step.t0) * k as f64 / (opts.dense_per_step + 1) as f64;
            if before(t) {
                marks.push((t, Mark::Dense));
            }
        }
        let dir = (step.t1 - step.t0).signum();
        marks.sort_by(|a, b| (dir * a.0).total_cmp(&(dir * b.0)));
        for (t, mark) in marks {
            let y = step.eval(t);
            if mark == Mark::Dense {
                orbit.samples.push(DesingSample {
                    tau: t,
                    p: [y[0], y[1]],
                    t: y[2],
                    g: g_of(&y),
                });
                continue;
            }
            let p = project_to_sigma(field, [y[0], y[1]], alpha);
            let margin = field.crossing_margin(p, alpha).unwrap_or(f64::NAN);
            let kind = if mark == Mark::Touch {
                SigmaEventKind::Touch
            } else {
                let transversal = margin.abs() > opts.transversal_tol;
                let label = match (transversal, margin > 0.0) {
                    (false, _) => ArcLabel::Neutral,
                    (true, true) => ArcLabel::Outgoing,
                    (true, false) => ArcLabel::Incoming,
                };
                SigmaEventKind::Crossing { label, transversal }
            };
            orbit.events.push(SigmaEvent {
                index: orbit.samples.len(),
                tau: t,
                p,
                kind,
                margin,
            });
            orbit.samples.push(DesingSample {
                tau: t,
                p,
                t: y[2],
                g: 0.0,
            });
        }
        if let Some((t, why)) = stop {
            let y = step.eval(t);
            orbit.samples.push(DesingSample {
                tau: t,
                p: [y[0], y[1]],
                t: y[2],
                g: g_of(&y),
            });
            end = Some(why);
            return Control::StopAt(t);
        }
        let y = step.y1;
        orbit.samples.push(DesingSample {
            tau: step.t1,
            p: [y[0], y[1]],
            t: y[2],
            g: g_of(&y),
        });
        if let Some(f) = rhs(&y) {
            if f[0].hypot(f[1]) <= opts.eq_tol {
                end = Some(DesingEnd::Equilibrium);
                return Control::StopAt(step.t1);
            }
        }
        Control::Continue
    });
    orbit.end = end.unwrap_or(match outcome.end {
        OdeEnd::Reached | OdeEnd::Stopped => DesingEnd::TimeOut,
        OdeEnd::StepUnderflow => DesingEnd::StepUnderflow,
        OdeEnd::RhsFailed => DesingEnd::EvalFailed,
        OdeEnd::MaxSteps => DesingEnd::MaxSteps,
    });
    orbit
}

/// Which time change produced the orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimeChange {
    /// `dτ = dt/g`: forward on Σ+.
    #[default]
    Standard,
    /// `dτ = dt/(−g)`: forward on Σ−.
    Reversed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Forward,
    Reversed,
}

impl Orientation {
    pub fn flip(self) -> Self {
        match self {
            Orientation::Forward => Orientation::Reversed,
            Orientation::Reversed => Orientation::Forward,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum PieceEnd {
    Start {
        p: [f64; 2],
    },
    SigmaCrossing {
        p: [f64; 2],
        label: ArcLabel,
    },
    /// Non-transversal contact with Σ, as at a fold.
    FoldTangency {
        p: [f64; 2],
    },
    Equilibrium {
        p: [f64; 2],
    },
    LeftDomain {
        p: [f64; 2],
    },
    TimeOut {
        p: [f64; 2],
    },
    Failed {
        p: [f64; 2],
    },
}

/// A DAE orbit: a stretch of a desingularized orbit on one side of Σ.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitPiece {
    /// `(t, p)` in desingularized order; `t` decreases along reversed pieces.
    pub points: Vec<(f64, [f64; 2])>,
    pub orientation: Orientation,
    pub side: Side,
    pub start: PieceEnd,
    pub end: PieceEnd,
}

fn event_end(e: &SigmaEvent) -> PieceEnd {
    match e.kind {
        SigmaEventKind::Crossing {
            label,
            transversal: true,
        } => PieceEnd::SigmaCrossing { p: e.p, label },
        _ => PieceEnd::FoldTangency { p: e.p },
    }
}

/// Splits a desingularized orbit at its Σ events into DAE orbit pieces.
pub fn split_to_dae_orbits(orbit: &DesingOrbit, time_change: TimeChange) -> Vec<OrbitPiece> {
    let mut pieces = Vec::new();
    let Some(first) = orbit.samples.first() else {
        return pieces;
    };
    let last_p = orbit.samples.last().map_or(first.p, |s| s.p);
    let final_end = match orbit.end {
        DesingEnd::TimeOut | DesingEnd::MaxSteps => PieceEnd::TimeOut { p: last_p },
        DesingEnd::LeftDomain => PieceEnd::LeftDomain { p: last_p },
        DesingEnd::Equilibrium => PieceEnd::Equilibrium { p: last_p },
        DesingEnd::StepUnderflow | DesingEnd::EvalFailed => PieceEnd::Failed { p: last_p },
    };
    let mut cuts: Vec<(usize, PieceEnd)> = orbit
        .events
        .iter()
        .map(|e| (e.index, event_end(e)))
        .collect();
    cuts.push((orbit.samples.len() - 1, final_end));
    let mut start_idx = 0;
    let mut start_end = PieceEnd::Start { p: first.p };
    for (idx, end) in cuts {
        if idx <= start_idx && !pieces.is_empty() {
            start_end = end;
            continue;
        }
        let slice = &orbit.samples[start_idx..=idx];
        // Side from the sample farthest from Σ.
        let g = slice
            .iter()
            .map(|s| s.g)
            .filter(|g| g.is_finite())
            .fold(0.0f64, |m, g| if g.abs() > m.abs() { g } else { m });
        let side = Side::of(g);
        let orientation = match (side, time_change) {
            (Side::Plus, TimeChange::Standard) | (Side::Minus, TimeChange::Reversed) => {
                Orientation::Forward
            }
            _ => Orientation::Reversed,
        };
        pieces.push(OrbitPiece {
            points: slice.iter().map(|s| (s.t, s.p)).collect(),
            orientation,
            side,
            start: start_end,
            end,
        });
        start_idx = idx;
        start_end = end;
    }
    pieces
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expression;

    fn field(a: &str, b: &str, g: &str) -> DesingularizedField {
        let p = |s| parse_expression(s).unwrap();
        DesingularizedField::from_parts(p(a), p(b), p(g))
    }

    #[test]
    fn product_component() {
        let s = System2D::parse("y - x + alpha", "y", "x - x^3").unwrap();
        let d = DesingularizedField::new(&s);
        assert_eq!(d.second().to_string(), "y*(x - x^3)");
        let one = System2D::parse("x", "y", "1").unwrap();
        assert_eq!(DesingularizedField::new(&one).second().to_string(), "y");
        let flat = System2D::parse("x", "0", "x - 1").unwrap();
        assert_eq!(
            DesingularizedField::new(&flat).second().as_const(),
            Some(0.0)
        );
    }

    #[test]
    fn harmonic_oscillator_returns() {
        let f = field("y", "-x", "1");
        let o = integrate_desing(
            &f,
            [1.0, 0.0],
            0.0,
            std::f64::consts::TAU,
            &DesingOptions::default(),
        );
        let p = o.samples.last().unwrap().p;
        assert!((p[0] - 1.0).abs() < 1e-8 && p[1].abs() < 1e-8, "{p:?}");
        assert!(o.events.is_empty());
    }

    #[test]
    fn equilibrium_start_is_constant() {
        let f = field("y", "-x", "1");
        let o = integrate_desing(&f, [0.0, 0.0], 0.0, 10.0, &DesingOptions::default());
        assert_eq!(o.end, DesingEnd::Equilibrium);
        assert_eq!(o.samples.len(), 1);
    }

    #[test]
    fn example_orbit_crosses_middle_line() {
        let s = System2D::parse("y - x + alpha", "y", "x - x^3").unwrap();
        let d = DesingularizedField::new(&s);
        let o = integrate_desing(&d, [0.5, 0.5], 0.0, -5.0, &DesingOptions::default());
        assert!(o.events.iter().any(|e| e.p[0].abs() < 1e-12));
        for e in &o.events {
            let nearest = [-1.0, 0.0, 1.0]
                .iter()
                .map(|x| (e.p[0] - x).abs())
                .fold(1.0, f64::min);
            assert!(nearest < 1e-12, "{:?}", e.p);
            assert!(d.eval_g(e.p, 0.0).unwrap().abs() <= 1e-12);
        }
        // g keeps one sign between events.
        let mut last = 0;
        for e in o.events.iter().map(|e| e.index).chain([o.samples.len()]) {
            let s = &o.samples[last + 1..e.saturating_sub(0).max(last + 1)];
            assert!(s.iter().all(|x| x.g >= 0.0) || s.iter().all(|x| x.g <= 0.0));
            last = e;
        }
    }

    #[test]
    fn one_transversal_crossing_gives_two_pieces() {
        // Horizontal flow to the right across Σ = {x = 0}; f1·g_x = 1 > 0.
        let f = field("1", "0", "x");
        let o = integrate_desing(&f, [-1.0, 0.0], 0.0, 2.0, &DesingOptions::default());
        let pieces = split_to_dae_orbits(&o, TimeChange::Standard);
        assert_eq!(pieces.len(), 2);
        assert_eq!(pieces[0].orientation, Orientation::Reversed);
        assert_eq!(pieces[1].orientation, Orientation::Forward);
        match pieces[0].end {
            PieceEnd::SigmaCrossing { p, label } => {
                assert!(p[0].abs() < 1e-14 && p[1] == 0.0);
                assert_eq!(label, ArcLabel::Outgoing);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(pieces[0].end, pieces[1].start);
        let flipped = split_to_dae_orbits(&o, TimeChange::Reversed);
        for (a, b) in pieces.iter().zip(&flipped) {
            assert_eq!(a.orientation.flip(), b.orientation);
            assert_eq!((&a.points, a.start, a.end), (&b.points, b.start, b.end));
        }
    }

    #[test]
    fn orbit_in_plus_side_is_one_forward_piece() {
        let f = field("1", "0", "1 + y^2");
        let o = integrate_desing(&f, [0.0, 0.0], 0.0, 1.0, &DesingOptions::default());
        let pieces = split_to_dae_orbits(&o, TimeChange::Standard);
        assert_eq!(pieces.len(), 1);
        assert_eq!(pieces[0].orientation, Orientation::Forward);
    }

    #[test]
    fn tangency_at_a_fold_is_flagged() {
        // The line y = 0 touches Σ = {y = x²} at the fold (0, 0).
        let f = field("1", "0", "y - x^2");
        let o = integrate_desing(&f, [-1.0, 0.0], 0.0, 2.0, &DesingOptions::default());
        let pieces = split_to_dae_orbits(&o, TimeChange::Standard);
        assert_eq!(pieces.len(), 2);
        assert!(matches!(pieces[0].end, PieceEnd::FoldTangency { .. }));
    }
}
