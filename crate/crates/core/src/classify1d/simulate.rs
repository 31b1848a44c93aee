use serde::Serialize;
use thiserror::Error;

use crate::expr::{Coords, EvalError};
use crate::numeric::{dopri5, newton, Control, NewtonOptions, OdeEnd, OdeOptions};
use crate::System1D;

#[derive(Debug, Clone, Copy)]
pub struct Sim1DOptions {
    pub ode: OdeOptions,
    /// The run stops when `|g|` drops to this level.
    pub sing_tol: f64,
    /// An attracting equilibrium counts as reached once `|f/g|` is below this.
    pub eq_tol: f64,
    pub domain: (f64, f64),
}

impl Default for Sim1DOptions {
    fn default() -> Self {
        Sim1DOptions {
            ode: OdeOptions::default(),
            sing_tol: 1e-9,
            eq_tol: 1e-9,
            domain: (-1e6, 1e6),
        }
    }
}

/// How a 1D run ended.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Terminal1D {
    /// Arrived at a zero of `g` in finite time.
    ReachedSingularity {
        x: f64,
        t: f64,
    },
    ReachedEquilibrium {
        x: f64,
        t: f64,
    },
    LeftDomain {
        x: f64,
        t: f64,
    },
    TimeOut {
        x: f64,
        t: f64,
    },
}

#[derive(Debug, Clone, Serialize)]
pub struct OrbitPiece1D {
    /// `(t, x)` at every accepted step.
    pub points: Vec<(f64, f64)>,
    pub end: Terminal1D,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("initial condition on singular set (g({x}) = {g})")]
    OnSingularity { x: f64, g: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("integration failed: {0}")]
    Numerical(String),
}

fn polish_root(sys: &System1D, use_g: bool, x0: f64, alpha: f64) -> f64 {
    let table = if use_g { sys.g_jets() } else { sys.f_jets() };
    let eval = |x: f64| -> Option<(f64, f64)> {
        let v = table.eval_first(Coords::new(x, 0.0, alpha)).ok()?;
        Some((v[0], v[1]))
    };
    newton(
        |v: &[f64; 1]| {
            let (h, hx) = eval(v[0])?;
            Some(([h], [[hx]]))
        },
        [x0],
        &NewtonOptions {
            max_iters: 50,
            f_tol: 0.0,
            max_step: 1e-3,
        },
    )
    .map_or(x0, |s| s.x[0])
}

/// Integrates `ẋ = f/g` forward in time from `x0`.
///
/// The integration runs in the arclength-like variable `s` with
/// `dx/ds = σ f`, `dt/ds = σ g`, `σ = sign g(x0)`, which stays smooth all the
/// way to `g = 0`; the physical time `t` is carried along as a state.
pub fn simulate_1d(
    sys: &System1D,
    x0: f64,
    alpha: f64,
    t_max: f64,
    opts: &Sim1DOptions,
) -> Result<OrbitPiece1D, SimError> {
    let g0 = sys.eval_g(x0, alpha)?;
    if g0.abs() <= opts.sing_tol {
        return Err(SimError::OnSingularity { x: x0, g: g0 });
    }
    let f0 = sys.eval_f(x0, alpha)?;
    if f0 == 0.0 {
        return Ok(OrbitPiece1D {
            points: vec![(0.0, x0)],
            end: Terminal1D::ReachedEquilibrium { x: x0, t: 0.0 },
        });
    }
    let sigma = g0.signum();
    let field = |y: &[f64; 2]| -> Option<[f64; 2]> {
        let at = Coords::new(y[0], 0.0, alpha);
        let f = sys.f_jets().value(at).ok()?;
        let g = sys.g_jets().value(at).ok()?;
        // Refuse states past the singular set; the step is retried smaller.
        if g * sigma < 0.0 {
            return None;
        }
        Some([sigma * f, sigma * g])
    };
    let (lo, hi) = opts.domain;
    let mut points = vec![(0.0, x0)];
    let mut end: Option<Terminal1D> = None;
    let g_abs = |y: &[f64; 2]| {
        sys.eval_g(y[0], alpha)
            .ok()
            .map(|g| g.abs() - opts.sing_tol)
    };
    let outcome = dopri5(field, 0.0, [x0, 0.0], 1e12, &opts.ode, |step| {
        // Earliest of the terminal events inside this step wins.
        let mut best: Option<(f64, u8)> = None;
        let mut consider = |ts: Option<f64>, kind: u8| {
            if let Some(ts) = ts {
                if best.is_none_or(|(b, _)| ts < b) {
                    best = Some((ts, kind));
                }
            }
        };
        consider(step.first_sign_change(g_abs), 0);
        consider(step.first_sign_change(|y| Some(y[1] - t_max)), 1);
        consider(step.first_sign_change(|y| Some(y[0] - lo)), 2);
        consider(step.first_sign_change(|y| Some(y[0] - hi)), 2);
        if let Some((ts, kind)) = best {
            let y = step.eval(ts);
            end = Some(match kind {
                0 => Terminal1D::ReachedSingularity {
                    x: polish_root(sys, true, y[0], alpha),
                    t: y[1],
                },
                1 => Terminal1D::TimeOut { x: y[0], t: t_max },
                _ => Terminal1D::LeftDomain { x: y[0], t: y[1] },
            });
            points.push((y[1], y[0]));
            return Control::StopAt(ts);
        }
        let y = step.y1;
        points.push((y[1], y[0]));
        let at = Coords::new(y[0], 0.0, alpha);
        if let (Ok(f), Ok(g)) = (sys.f_jets().eval_first(at), sys.g_jets().value(at)) {
            if (f[0] / g).abs() < opts.eq_tol && f[1] / g < 0.0 {
                end = Some(Terminal1D::ReachedEquilibrium {
                    x: polish_root(sys, false, y[0], alpha),
                    t: y[1],
                });
                return Control::StopAt(step.t1);
            }
        }
        Control::Continue
    });
    match end {
        Some(end) => Ok(OrbitPiece1D { points, end }),
        None => match outcome.end {
            OdeEnd::Reached | OdeEnd::MaxSteps => {
                let (t, x) = *points.last().expect("initial point recorded");
                Ok(OrbitPiece1D {
                    points,
                    end: Terminal1D::TimeOut { x, t },
                })
            }
            other => Err(SimError::Numerical(format!(
                "{other:?} at x = {}",
                outcome.y[0]
            ))),
        },
    }
}
