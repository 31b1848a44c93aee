use rayon::prelude::*;
use serde::Serialize;

use super::normal_form::{normal_form_a11, normal_form_a21, normal_form_a300, NormalForm1D};
use super::{
    classify_point_1d, find_special_points_1d, uniform_grid, Degeneracy, Point1DClass, XFun,
};
use crate::genericity::{all_pass, GenericityCheck};
use crate::numeric::{newton, NewtonOptions};
use crate::{System1D, Tolerances};

#[derive(Debug, Clone, Copy)]
pub struct Scan1DOptions {
    pub interval: (f64, f64),
    pub grid_n: usize,
    pub tol: Tolerances,
}

impl Default for Scan1DOptions {
    fn default() -> Self {
        Scan1DOptions {
            interval: (-2.0, 2.0),
            grid_n: 512,
            tol: Tolerances::default(),
        }
    }
}

/// What the family looks like on either side of the event.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Unfolding1D {
    pub below: String,
    pub above: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Event1D {
    /// `A1.1`, `A2.1`, `A3.0,0`, or a higher case such as `A1.2`.
    pub code: String,
    pub alpha_star: f64,
    pub x: f64,
    pub class: Point1DClass,
    pub normal_form: Option<NormalForm1D>,
    pub genericity: Vec<GenericityCheck>,
    pub generic: bool,
    pub unfolding: Option<Unfolding1D>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Scan1D {
    pub events: Vec<Event1D>,
    pub warnings: Vec<String>,
    pub incomplete: bool,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Defining {
    /// `f = f_x = 0`
    A1,
    /// `g = g_x = 0`
    A2,
    /// `f = g = 0`
    A3,
}

fn order_label(d: Degeneracy) -> String {
    match d {
        Degeneracy::Order(k) => k.to_string(),
        Degeneracy::AtLeast3 => ">=3".into(),
    }
}

/// Newton in `(x, α)` on one of the defining systems.
fn solve_defining(
    sys: &System1D,
    which: Defining,
    x0: f64,
    a0: f64,
    max_step: f64,
) -> Option<[f64; 2]> {
    let sol = newton(
        |v: &[f64; 2]| {
            let (jf, jg) = sys.jets(v[0], v[1]).ok()?;
            Some(match which {
                Defining::A1 => ([jf.value(), jf.x()], [[jf.x(), jf.a()], [jf.xx(), jf.xa()]]),
                Defining::A2 => ([jg.value(), jg.x()], [[jg.x(), jg.a()], [jg.xx(), jg.xa()]]),
                Defining::A3 => (
                    [jf.value(), jg.value()],
                    [[jf.x(), jf.a()], [jg.x(), jg.a()]],
                ),
            })
        },
        [x0, a0],
        &NewtonOptions {
            max_iters: 80,
            f_tol: 1e-15,
            max_step,
        },
    )?;
    (sol.residual <= 1e-11).then_some(sol.x)
}

fn nondegenerate(class: &Point1DClass) -> bool {
    !matches!(
        class,
        Point1DClass::SimpleEquilibrium { .. }
            | Point1DClass::SimpleSingularity { .. }
            | Point1DClass::RegularPoint
    )
}

fn describe_a11(s: i8, dbeta: f64, upper: bool) -> String {
    let beta_sign = if upper {
        dbeta.signum()
    } else {
        -dbeta.signum()
    };
    if f64::from(s) * beta_sign < 0.0 {
        "two simple equilibria near x*, one stable and one unstable".into()
    } else {
        "no equilibria near x*".into()
    }
}

fn describe_a21(s: i8, dbeta: f64, upper: bool) -> String {
    let beta_sign = if upper {
        dbeta.signum()
    } else {
        -dbeta.signum()
    };
    if f64::from(s) * beta_sign < 0.0 {
        "two simple singularities near x*, one incoming and one outgoing".into()
    } else {
        "no singularities near x*".into()
    }
}

fn describe_a300(dbeta: f64, upper: bool) -> String {
    // In η η̇ = β + sη the equilibrium has λ = -1/β and the singularity λ = 1/β.
    let beta_sign = if upper {
        dbeta.signum()
    } else {
        -dbeta.signum()
    };
    if beta_sign > 0.0 {
        "stable equilibrium and outgoing singularity".into()
    } else {
        "unstable equilibrium and incoming singularity".into()
    }
}

fn build_event(sys: &System1D, x: f64, alpha: f64, tol: &Tolerances) -> Option<Event1D> {
    let class = classify_point_1d(sys, x, alpha, tol);
    let (jf, jg) = sys.jets(x, alpha).ok()?;
    let mut event = Event1D {
        code: String::new(),
        alpha_star: alpha,
        x,
        class,
        normal_form: None,
        genericity: Vec::new(),
        generic: false,
        unfolding: None,
    };
    match class {
        Point1DClass::NonSimpleEquilibrium { m, s } => {
            event.code = format!("A1.{}", order_label(m));
            if m == Degeneracy::Order(1) {
                event.genericity = vec![
                    GenericityCheck::nonzero("f_xx", jf.xx(), tol),
                    GenericityCheck::nonzero("f_alpha", jf.a(), tol),
                    GenericityCheck::nonzero("g", jg.value(), tol),
                ];
                if let Ok(nf) = normal_form_a11(sys, x, alpha, tol) {
                    event.unfolding = Some(Unfolding1D {
                        below: describe_a11(s, nf.dbeta_dalpha, false),
                        above: describe_a11(s, nf.dbeta_dalpha, true),
                    });
                    event.normal_form = Some(nf);
                }
            }
        }
        Point1DClass::NonSimpleSingularity { n, s } => {
            event.code = format!("A2.{}", order_label(n));
            if n == Degeneracy::Order(1) {
                event.genericity = vec![
                    GenericityCheck::nonzero("g_xx", jg.xx(), tol),
                    GenericityCheck::nonzero("g_alpha", jg.a(), tol),
                    GenericityCheck::nonzero("f", jf.value(), tol),
                ];
                if let Ok(nf) = normal_form_a21(sys, x, alpha, tol) {
                    event.unfolding = Some(Unfolding1D {
                        below: describe_a21(s, nf.dbeta_dalpha, false),
                        above: describe_a21(s, nf.dbeta_dalpha, true),
                    });
                    event.normal_form = Some(nf);
                }
            }
        }
        Point1DClass::SingularEquilibrium { m, n } => {
            event.code = format!("A3.{},{}", order_label(m), order_label(n));
            if (m, n) == (Degeneracy::Order(0), Degeneracy::Order(0)) {
                let a = jg.x() * jf.a() - jf.x() * jg.a();
                event.genericity = vec![
                    GenericityCheck::nonzero("f_x", jf.x(), tol),
                    GenericityCheck::nonzero("g_x", jg.x(), tol),
                    GenericityCheck::nonzero("A", a, tol),
                ];
                if let Ok(nf) = normal_form_a300(sys, x, alpha, tol) {
                    event.unfolding = Some(Unfolding1D {
                        below: describe_a300(nf.dbeta_dalpha, false),
                        above: describe_a300(nf.dbeta_dalpha, true),
                    });
                    event.normal_form = Some(nf);
                }
            }
        }
        _ => return None,
    }
    event.generic = !event.genericity.is_empty() && all_pass(&event.genericity);
    if !event.generic {
        event.unfolding = None;
    }
    Some(event)
}

/// Locates the codimension-one events of the scalar family over `alpha_range`.
///
/// Every special point and every extremum of `f` or `g` found at a sample
/// seeds Newton on the augmented systems `(f, f_x)`, `(g, g_x)` and `(f, g)`
/// in `(x, α)`. Solutions inside the range are classified and checked for
/// genericity.
pub fn scan_1d(
    sys: &System1D,
    alpha_range: (f64, f64),
    n_samples: usize,
    opts: &Scan1DOptions,
) -> Scan1D {
    let (a0, a1) = (
        alpha_range.0.min(alpha_range.1),
        alpha_range.0.max(alpha_range.1),
    );
    let (lo, hi) = (
        opts.interval.0.min(opts.interval.1),
        opts.interval.0.max(opts.interval.1),
    );
    let tol = opts.tol;
    let alphas = uniform_grid(a0, a1, n_samples.max(2));
    let grid = uniform_grid(lo, hi, opts.grid_n);
    let max_step = 0.25 * (hi - lo).max(a1 - a0).max(1e-6);

    let per_sample: Vec<(usize, Vec<[f64; 2]>)> = alphas
        .par_iter()
        .map(|&alpha| {
            let found = find_special_points_1d(sys, alpha, (lo, hi), opts.grid_n, &tol);
            let mut seeds: Vec<(f64, Defining)> = Vec::new();
            for p in &found.points {
                match p.class {
                    Point1DClass::SimpleEquilibrium { .. }
                    | Point1DClass::NonSimpleEquilibrium { .. } => {
                        seeds.push((p.x, Defining::A1));
                        seeds.push((p.x, Defining::A3));
                    }
                    Point1DClass::SimpleSingularity { .. }
                    | Point1DClass::NonSimpleSingularity { .. } => {
                        seeds.push((p.x, Defining::A2));
                        seeds.push((p.x, Defining::A3));
                    }
                    _ => {
                        seeds.extend([Defining::A1, Defining::A2, Defining::A3].map(|d| (p.x, d)));
                    }
                }
            }
            for (table, which) in [(sys.f_jets(), Defining::A1), (sys.g_jets(), Defining::A2)] {
                let xf = XFun { table, alpha };
                let d: Vec<Option<f64>> = grid.iter().map(|&x| xf.d(1, x)).collect();
                for i in 0..grid.len() - 1 {
                    if let (Some(u), Some(v)) = (d[i], d[i + 1]) {
                        if u * v <= 0.0 {
                            seeds.push((0.5 * (grid[i] + grid[i + 1]), which));
                        }
                    }
                }
            }
            let sols: Vec<[f64; 2]> = seeds
                .iter()
                .filter_map(|&(x, which)| solve_defining(sys, which, x, alpha, max_step))
                .filter(|s| s[1] >= a0 - 1e-9 && s[1] <= a1 + 1e-9 && s[0] >= lo && s[0] <= hi)
                .collect();
            (found.points.len(), sols)
        })
        .collect();

    let mut candidates: Vec<[f64; 2]> = per_sample
        .iter()
        .flat_map(|(_, s)| s.iter().copied())
        .collect();
    candidates.sort_by(|p, q| p[1].total_cmp(&q[1]).then(p[0].total_cmp(&q[0])));
    let mut out = Scan1D::default();
    for c in candidates {
        let dup = out
            .events
            .iter()
            .any(|e| (e.alpha_star - c[1]).abs() <= 1e-7 && (e.x - c[0]).abs() <= 1e-6);
        if dup {
            continue;
        }
        let class = classify_point_1d(sys, c[0], c[1], &tol);
        if !nondegenerate(&class) {
            continue;
        }
        if let Some(e) = build_event(sys, c[0], c[1], &tol) {
            out.events.push(e);
        }
    }
    out.events.sort_by(|p, q| {
        p.alpha_star
            .total_cmp(&q.alpha_star)
            .then(p.x.total_cmp(&q.x))
    });

    for w in out.events.windows(2) {
        if (w[1].alpha_star - w[0].alpha_star).abs() <= 1e-6 && w[0].code != w[1].code {
            out.warnings.push(format!(
                "{} and {} occur at nearly the same alpha ({}); higher-codimension coincidence",
                w[0].code, w[1].code, w[0].alpha_star
            ));
        }
    }
    // Point counts may only change across a located event or at the boundary.
    let near_edge = |alpha: f64| {
        let found = find_special_points_1d(sys, alpha, (lo, hi), opts.grid_n, &tol);
        let margin = 1e-2 * (hi - lo);
        found
            .points
            .iter()
            .any(|p| p.x - lo < margin || hi - p.x < margin)
    };
    for i in 0..alphas.len() - 1 {
        if per_sample[i].0 != per_sample[i + 1].0 {
            let explained = out
                .events
                .iter()
                .any(|e| e.alpha_star >= alphas[i] - 1e-9 && e.alpha_star <= alphas[i + 1] + 1e-9);
            if !explained && !near_edge(alphas[i]) && !near_edge(alphas[i + 1]) {
                out.incomplete = true;
                out.warnings.push(format!(
                    "special-point count changes between alpha = {} and {} without a located event",
                    alphas[i],
                    alphas[i + 1]
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scan(f: &str, g: &str) -> Scan1D {
        let s = System1D::parse(f, g).unwrap();
        scan_1d(&s, (-0.1, 0.1), 21, &Scan1DOptions::default())
    }

    #[test]
    fn saddle_node_family() {
        let r = scan("x^2 + alpha", "x + 1");
        assert_eq!(r.events.len(), 1, "{:?}", r.events);
        let e = &r.events[0];
        assert_eq!(e.code, "A1.1");
        assert!(e.alpha_star.abs() <= 1e-9);
        assert!(e.generic);
        assert!(!r.incomplete, "{:?}", r.warnings);
    }

    #[test]
    fn singularity_fold_family() {
        let r = scan("x + 1", "x^2 + alpha");
        assert_eq!(r.events.len(), 1);
        assert_eq!(r.events[0].code, "A2.1");
        assert_eq!(r.events[0].normal_form.unwrap().s, 1);
    }

    #[test]
    fn transcritical_family() {
        let r = scan("x - x^2 + 2*alpha", "x + x^2 + alpha");
        assert_eq!(r.events.len(), 1);
        let nf = r.events[0].normal_form.unwrap();
        assert_eq!(r.events[0].code, "A3.0,0");
        assert_eq!(nf.s, 1);
        assert!((nf.a.unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn quiet_family_has_no_events() {
        let r = scan("1", "1");
        assert!(r.events.is_empty());
    }
}
