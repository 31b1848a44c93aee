//! Limit cycles of the desingularized field via a Poincaré section.

use serde::Serialize;

use crate::numeric::{dopri5, locate_root, Control, OdeOptions};

use super::{integrate_desing, DesingOptions, DesingularizedField, SigmaEvent, SigmaEventKind};

/// Segment `a → b`; points on it are `a + s (b − a)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Section {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl Section {
    pub fn point(&self, s: f64) -> [f64; 2] {
        [
            self.a[0] + s * (self.b[0] - self.a[0]),
            self.a[1] + s * (self.b[1] - self.a[1]),
        ]
    }

    pub fn length(&self) -> f64 {
        (self.b[0] - self.a[0]).hypot(self.b[1] - self.a[1])
    }

    fn normal(&self) -> [f64; 2] {
        [-(self.b[1] - self.a[1]), self.b[0] - self.a[0]]
    }

    fn param(&self, p: [f64; 2]) -> f64 {
        let d = [self.b[0] - self.a[0], self.b[1] - self.a[1]];
        ((p[0] - self.a[0]) * d[0] + (p[1] - self.a[1]) * d[1]) / (d[0] * d[0] + d[1] * d[1])
    }

    /// Segment through `p` perpendicular to the field there.
    pub fn across(
        field: &DesingularizedField,
        p: [f64; 2],
        alpha: f64,
        half_length: f64,
    ) -> Option<Section> {
        let f = field.eval(p, alpha).ok()?;
        let n = f[0].hypot(f[1]);
        if n == 0.0 {
            return None;
        }
        let d = [-f[1] / n * half_length, f[0] / n * half_length];
        Some(Section {
            a: [p[0] - d[0], p[1] - d[1]],
            b: [p[0] + d[0], p[1] + d[1]],
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleKind {
    /// Disjoint from Σ.
    Regular,
    /// Crosses Σ.
    Folded,
}

#[derive(Debug, Clone, Serialize)]
pub struct CycleRecord {
    pub points: Vec<[f64; 2]>,
    /// Period in desingularized time.
    pub period: f64,
    /// Return-map derivative at the fixed point.
    pub mu: f64,
    /// `exp(∮ div F dτ)`, an independent estimate of `mu`.
    pub mu_divergence: f64,
    pub kind: CycleKind,
    pub crossings: Vec<SigmaEvent>,
    /// `|f1·g_x|` at each crossing.
    pub transversality_margins: Vec<f64>,
    /// All crossings are transversal.
    pub transversal: bool,
    /// `mu` lies in `[0.99, 1.01]`.
    pub near_degenerate: bool,
    pub section: Section,
    pub fixed_point: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CycleError {
    #[error("the field is nearly tangent to the section at the seed")]
    NonTransverseSection,
    #[error("the orbit did not return to the section")]
    NoReturn,
    #[error("the return map did not converge to a fixed point in {0} iterations")]
    NotConverged(usize),
    #[error("the iteration left the section")]
    LeftSection,
}

#[derive(Debug, Clone, Copy)]
pub struct CycleOptions {
    pub max_iters: usize,
    /// Give up on a return after this much desingularized time.
    pub max_period: f64,
    pub ode: OdeOptions,
}

impl Default for CycleOptions {
    fn default() -> Self {
        CycleOptions {
            max_iters: 40,
            max_period: 1e3,
            ode: OdeOptions {
                rtol: 1e-12,
                atol: 1e-14,
                ..OdeOptions::default()
            },
        }
    }
}

struct Returns {
    s: [f64; 3],
    tau: f64,
    div_integral: f64,
}

/// First returns of three section points integrated together with shared
/// steps, so that their differences are smooth in the initial data.
fn returns(
    field: &DesingularizedField,
    alpha: f64,
    section: &Section,
    dir: f64,
    s: [f64; 3],
    opts: &CycleOptions,
) -> Option<Returns> {
    let n = section.normal();
    let starts = s.map(|s| section.point(s));
    let mut y0 = [0.0; 7];
    for (k, p) in starts.iter().enumerate() {
        y0[2 * k] = p[0];
        y0[2 * k + 1] = p[1];
    }
    let rhs = |y: &[f64; 7]| -> Option<[f64; 7]> {
        let mut out = [0.0; 7];
        for k in 0..3 {
            let f = field.eval([y[2 * k], y[2 * k + 1]], alpha).ok()?;
            out[2 * k] = f[0];
            out[2 * k + 1] = f[1];
        }
        out[6] = field.divergence([y[2], y[3]], alpha).ok()?;
        out.iter().all(|v| v.is_finite()).then_some(out)
    };
    let side = |y: &[f64; 7], k: usize| {
        dir * ((y[2 * k] - section.a[0]) * n[0] + (y[2 * k + 1] - section.a[1]) * n[1])
    };
    let mut hit: [Option<(f64, [f64; 2], f64)>; 3] = [None; 3];
    // A return is a crossing from the back to the front of the section, which
    // can only happen after the orbit has left the front side.
    let mut left = [false; 3];
    dopri5(rhs, 0.0, y0, opts.max_period, &opts.ode, |step| {
        for k in 0..3 {
            if hit[k].is_some() {
                continue;
            }
            const PARTS: usize = 4;
            let mut ta = step.t0;
            let mut ha = side(&step.y0, k);
            for j in 1..=PARTS {
                let tb = step.t0 + (step.t1 - step.t0) * j as f64 / PARTS as f64;
                let hb = side(&step.eval(tb), k);
                if ha < 0.0 {
                    left[k] = true;
                }
                if left[k] && ha < 0.0 && hb >= 0.0 {
                    let t = locate_root(|t| side(&step.eval(t), k), ta, tb, ha, hb);
                    let y = step.eval(t);
                    hit[k] = Some((t, [y[2 * k], y[2 * k + 1]], y[6]));
                    break;
                }
                ta = tb;
                ha = hb;
            }
        }
        if hit.iter().all(Option::is_some) {
            let t = hit.iter().flatten().map(|h| h.0).fold(0.0, f64::max);
            Control::StopAt(t.min(step.t1))
        } else {
            Control::Continue
        }
    });
    let [h0, h1, h2] = hit;
    let (h0, h1, h2) = (h0?, h1?, h2?);
    Some(Returns {
        s: [
            section.param(h0.1),
            section.param(h1.1),
            section.param(h2.1),
        ],
        tau: h1.0,
        div_integral: h1.2,
    })
}

/// Locates a limit cycle through `section` starting from the section point
/// nearest `seed`, and reports its multiplier and its relation to Σ.
pub fn find_limit_cycle(
    field: &DesingularizedField,
    alpha: f64,
    seed: [f64; 2],
    section: Section,
    opts: &CycleOptions,
) -> Result<CycleRecord, CycleError> {
    let len = section.length();
    let n = section.normal();
    let f = field
        .eval(seed, alpha)
        .map_err(|_| CycleError::NonTransverseSection)?;
    let cos = (f[0] * n[0] + f[1] * n[1]) / (f[0].hypot(f[1]) * len);
    if !(cos.abs() > 1e-3) {
        return Err(CycleError::NonTransverseSection);
    }
    let dir = cos.signum();
    let map = |s: f64| returns(field, alpha, &section, dir, [s; 3], opts).map(|r| r.s[1]);

    let mut s0 = section.param(seed);
    let mut f0 = map(s0).ok_or(CycleError::NoReturn)? - s0;
    let mut s1 = s0 + f0;
    if !(-0.05..=1.05).contains(&s1) {
        return Err(CycleError::LeftSection);
    }
    let mut converged = f0.abs() * len <= 1e-10;
    let mut iters = 0;
    while !converged && iters < opts.max_iters {
        iters += 1;
        let f1 = map(s1).ok_or(CycleError::NoReturn)? - s1;
        if f1.abs() * len <= 1e-10 {
            s0 = s1;
            converged = true;
            break;
        }
        let slope = (f1 - f0) / (s1 - s0);
        let mut step = if slope.is_finite() && slope != 0.0 {
            -f1 / slope
        } else {
            f1
        };
        step = step.clamp(-0.25, 0.25);
        (s0, f0) = (s1, f1);
        s1 += step;
        if !(-0.05..=1.05).contains(&s1) {
            return Err(CycleError::LeftSection);
        }
    }
    if !converged {
        return Err(CycleError::NotConverged(opts.max_iters));
    }
    let s_star = s0;
    let h = 1e-5;
    let r = returns(
        field,
        alpha,
        &section,
        dir,
        [s_star - h, s_star, s_star + h],
        opts,
    )
    .ok_or(CycleError::NoReturn)?;
    let mu = (r.s[2] - r.s[0]) / (2.0 * h);
    let mu_divergence = r.div_integral.exp();

    let p_star = section.point(s_star);
    let dopts = DesingOptions {
        ode: opts.ode,
        dense_per_step: 1,
        ..DesingOptions::default()
    };
    let orbit = integrate_desing(field, p_star, alpha, r.tau, &dopts);
    let crossings: Vec<SigmaEvent> = orbit
        .events
        .iter()
        .filter(|e| matches!(e.kind, SigmaEventKind::Crossing { .. }))
        .copied()
        .collect();
    let transversal = crossings.iter().all(|e| {
        matches!(
            e.kind,
            SigmaEventKind::Crossing {
                transversal: true,
                ..
            }
        )
    }) && !orbit.events.iter().any(|e| e.kind == SigmaEventKind::Touch);
    let kind = if orbit.events.is_empty() {
        CycleKind::Regular
    } else {
        CycleKind::Folded
    };
    Ok(CycleRecord {
        points: orbit.samples.iter().map(|s| s.p).collect(),
        period: r.tau,
        mu,
        mu_divergence,
        kind,
        transversality_margins: crossings.iter().map(|e| e.margin.abs()).collect(),
        crossings,
        transversal,
        near_degenerate: (0.99..=1.01).contains(&mu),
        section,
        fixed_point: p_star,
    })
}
