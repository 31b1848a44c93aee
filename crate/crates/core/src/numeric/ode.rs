//! Dormand–Prince 5(4) with Hairer's continuous extension.
//!
//! Fields are autonomous and may refuse a state by returning `None`; the step
//! is then rejected and retried with a smaller step. Every accepted step is
//! handed to an observer as a [`DenseStep`], which can evaluate the solution
//! anywhere inside the step. Event location is done on that dense output.

#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// First trial step; estimated from the field when `None`.
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub h_min: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: None,
            h_max: f64::INFINITY,
            h_min: 1e-14,
            max_steps: 500_000,
        }
    }
}

impl OdeOptions {
    pub fn with_tolerance(tol: f64) -> Self {
        OdeOptions {
            rtol: tol,
            atol: tol * 1e-2,
            ..Self::default()
        }
    }
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// One accepted step together with its interpolant.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub t1: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    rc: [[f64; N]; 5],
}

impl<const N: usize> DenseStep<N> {
    /// Fourth-order interpolant; exact at both ends.
    pub fn eval(&self, t: f64) -> [f64; N] {
        if t == self.t0 {
            return self.y0;
        }
        if t == self.t1 {
            return self.y1;
        }
        let theta = (t - self.t0) / (self.t1 - self.t0);
        let theta1 = 1.0 - theta;
        let mut out = [0.0; N];
        for (i, o) in out.iter_mut().enumerate() {
            let r = &self.rc;
            *o = r[0][i]
                + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])));
        }
        out
    }

    /// A constant step, used when the field vanishes at the start point.
    pub fn stationary(t0: f64, t1: f64, y: [f64; N]) -> Self {
        let mut rc = [[0.0; N]; 5];
        rc[0] = y;
        DenseStep {
            t0,
            t1,
            y0: y,
            y1: y,
            rc,
        }
    }

    /// First `t` in the step where `h` changes sign, located on the dense
    /// output. Four sub-intervals are inspected so that a pair of crossings
    /// inside one step is not missed entirely.
    pub fn first_sign_change<H>(&self, mut h: H) -> Option<f64>
    where
        H: FnMut(&[f64; N]) -> Option<f64>,
    {
        const PARTS: usize = 4;
        let mut ta = self.t0;
        let mut ha = h(&self.y0)?;
        for k in 1..=PARTS {
            let tb = if k == PARTS {
                self.t1
            } else {
                self.t0 + (self.t1 - self.t0) * k as f64 / PARTS as f64
            };
            let hb = h(&self.eval(tb))?;
            if ha == 0.0 && k == 1 {
                // A start exactly on the surface is not a crossing.
            } else if hb == 0.0 || ha * hb < 0.0 {
                return Some(locate_root(
                    |t| h(&self.eval(t)).unwrap_or(f64::NAN),
                    ta,
                    tb,
                    ha,
                    hb,
                ));
            }
            ta = tb;
            ha = hb;
        }
        None
    }

    /// Interior minimum of `|h|` when it is smaller than at both ends.
    pub fn interior_min_abs<H>(&self, mut h: H) -> Option<(f64, f64)>
    where
        H: FnMut(&[f64; N]) -> Option<f64>,
    {
        const SAMPLES: usize = 8;
        let vals: Vec<(f64, f64)> = (0..=SAMPLES)
            .map(|k| {
                let t = self.t0 + (self.t1 - self.t0) * k as f64 / SAMPLES as f64;
                (t, h(&self.eval(t)).map_or(f64::INFINITY, f64::abs))
            })
            .collect();
        let (imin, _) = vals
            .iter()
            .enumerate()
            .min_by(|a, b| a.1 .1.total_cmp(&b.1 .1))?;
        if imin == 0 || imin == SAMPLES {
            return None;
        }
        // Golden-section refinement around the sampled minimum.
        let (mut a, mut b) = (vals[imin - 1].0, vals[imin + 1].0);
        let gr = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - gr * (b - a);
        let mut d = a + gr * (b - a);
        let mut fc = h(&self.eval(c)).map_or(f64::INFINITY, f64::abs);
        let mut fd = h(&self.eval(d)).map_or(f64::INFINITY, f64::abs);
        for _ in 0..80 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = h(&self.eval(c)).map_or(f64::INFINITY, f64::abs);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = h(&self.eval(d)).map_or(f64::INFINITY, f64::abs);
            }
            if (b - a).abs() <= 1e-15 * (1.0 + a.abs()) {
                break;
            }
        }
        let t = 0.5 * (a + b);
        Some((t, h(&self.eval(t)).map_or(f64::INFINITY, f64::abs)))
    }
}

/// Root of a scalar function on `[a, b]` given values of opposite sign at the
/// ends (Illinois variant of regula falsi, finished to machine precision).
pub fn locate_root<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    mut fa: f64,
    mut fb: f64,
) -> f64 {
    if fa == 0.0 {
        return a;
    }
    if fb == 0.0 {
        return b;
    }
    for _ in 0..200 {
        if (b - a).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
        let mut c = b - fb * (b - a) / (fb - fa);
        if !c.is_finite() || c <= a.min(b) || c >= a.max(b) {
            c = 0.5 * (a + b);
        }
        let mut fc = f(c);
        if fc.is_nan() {
            // Outside the domain of the interpolated state: bisect instead.
            c = 0.5 * (a + b);
            fc = f(c);
            if fc.is_nan() {
                return c;
            }
        }
        if fc == 0.0 {
            return c;
        }
        if fc * fb < 0.0 {
            a = b;
            fa = fb;
        } else {
            fa *= 0.5;
        }
        b = c;
        fb = fc;
    }
    if fa.abs() < fb.abs() {
        a
    } else {
        b
    }
}

/// What the observer wants after seeing a step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Control {
    Continue,
    /// Stop at this time inside the step just reported.
    StopAt(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OdeEnd {
    /// Reached the requested final time.
    Reached,
    /// The observer asked to stop.
    Stopped,
    /// Step size fell below `h_min`; typically a non-transversal event or blow-up.
    StepUnderflow,
    /// The field could not be evaluated at the initial state.
    RhsFailed,
    MaxSteps,
}

#[derive(Debug, Clone, Copy)]
pub struct OdeOutcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub end: OdeEnd,
    pub accepted: usize,
    pub rejected: usize,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (i, o) in out.iter_mut().enumerate() {
        let mut s = 0.0;
        for (c, k) in terms {
            s += c * k[i];
        }
        *o += h * s;
    }
    out
}

/// Integrates `y' = f(y)` from `t0` to `t_end` (either direction).
pub fn dopri5<const N: usize, F, O>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &OdeOptions,
    mut observer: O,
) -> OdeOutcome<N>
where
    F: FnMut(&[f64; N]) -> Option<[f64; N]>,
    O: FnMut(&DenseStep<N>) -> Control,
{
    let mut out = OdeOutcome {
        t: t0,
        y: y0,
        end: OdeEnd::Reached,
        accepted: 0,
        rejected: 0,
    };
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let span = (t_end - t0).abs();
    if span == 0.0 {
        return out;
    }
    let Some(mut k1) = f(&y0) else {
        out.end = OdeEnd::RhsFailed;
        return out;
    };
    let scale = |y: &[f64; N], i: usize| opts.atol + opts.rtol * y[i].abs();
    let mut h = match opts.h_init {
        Some(h) => h.abs(),
        None => {
            let d0 = (0..N)
                .map(|i| (y0[i] / scale(&y0, i)).powi(2))
                .sum::<f64>()
                .sqrt();
            let d1 = (0..N)
                .map(|i| (k1[i] / scale(&y0, i)).powi(2))
                .sum::<f64>()
                .sqrt();
            if d0 < 1e-5 || d1 < 1e-5 {
                1e-6
            } else {
                0.01 * d0 / d1
            }
        }
    }
    .min(opts.h_max)
    .min(span);
    let mut t = t0;
    let mut y = y0;
    let mut last_rejected = false;
    loop {
        if out.accepted + out.rejected >= opts.max_steps {
            out.end = OdeEnd::MaxSteps;
            break;
        }
        let remaining = (t_end - t).abs();
        let mut hs = h.min(remaining);
        if remaining - hs < 1e-12 * span {
            hs = remaining;
        }
        if hs < opts.h_min && hs < remaining {
            out.end = OdeEnd::StepUnderflow;
            break;
        }
        let hh = dir * hs;
        let stages = (|| {
            let k2 = f(&axpy(&y, hh, &[(A21, &k1)]))?;
            let k3 = f(&axpy(&y, hh, &[(A31, &k1), (A32, &k2)]))?;
            let k4 = f(&axpy(&y, hh, &[(A41, &k1), (A42, &k2), (A43, &k3)]))?;
            let k5 = f(&axpy(
                &y,
                hh,
                &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)],
            ))?;
            let k6 = f(&axpy(
                &y,
                hh,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ))?;
            let y1 = axpy(
                &y,
                hh,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            let k7 = f(&y1)?;
            Some((k3, k4, k5, k6, k7, y1))
        })();
        let Some((k3, k4, k5, k6, k7, y1)) = stages else {
            out.rejected += 1;
            h = 0.25 * hs;
            last_rejected = true;
            continue;
        };
        let mut err = 0.0;
        for i in 0..N {
            let e =
                hh * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sk = opts.atol + opts.rtol * y[i].abs().max(y1[i].abs());
            err += (e / sk).powi(2);
        }
        let err = (err / N as f64).sqrt();
        if !err.is_finite() {
            out.rejected += 1;
            h = 0.25 * hs;
            last_rejected = true;
            continue;
        }
        let fac = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        if err > 1.0 {
            out.rejected += 1;
            h = hs * fac.min(1.0);
            last_rejected = true;
            continue;
        }
        let mut rc = [[0.0; N]; 5];
        for i in 0..N {
            let ydiff = y1[i] - y[i];
            let bspl = hh * k1[i] - ydiff;
            rc[0][i] = y[i];
            rc[1][i] = ydiff;
            rc[2][i] = bspl;
            rc[3][i] = ydiff - hh * k7[i] - bspl;
            rc[4][i] =
                hh * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
        }
        let t1 = if hs == remaining { t_end } else { t + hh };
        let step = DenseStep {
            t0: t,
            t1,
            y0: y,
            y1,
            rc,
        };
        out.accepted += 1;
        match observer(&step) {
            Control::Continue => {}
            Control::StopAt(ts) => {
                out.t = ts;
                out.y = step.eval(ts);
                out.end = OdeEnd::Stopped;
                return out;
            }
        }
        t = t1;
        y = y1;
        k1 = k7;
        if t == t_end {
            break;
        }
        h = if last_rejected {
            hs * fac.min(1.0)
        } else {
            hs * fac
        }
        .min(opts.h_max);
        last_rejected = false;
    }
    out.t = t;
    out.y = y;
    out
}
