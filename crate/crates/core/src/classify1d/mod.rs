//! Special points of the scalar DAE `g(x, α) ẋ = f(x, α)`.
//!
//! Zeros of `f` away from `g = 0` are equilibria, zeros of `g` away from
//! `f = 0` are singularities (impasse points), and common zeros are singular
//! equilibria. Each is classified from exact derivatives.

mod normal_form;
mod perturb;
mod scan;
mod simulate;

use serde::{Serialize, Serializer};

use crate::expr::{Coords, Jet3, JetTable};
use crate::numeric::{locate_root, newton, NewtonOptions};
use crate::{System1D, Tolerances};

pub use normal_form::{
    normal_form_a11, normal_form_a21, normal_form_a300, Case1D, NormalForm1D, NormalFormError,
};
pub use perturb::{construct_unfolding_perturbation, PerturbationCase, PerturbationError};
pub use scan::{scan_1d, Event1D, Scan1D, Scan1DOptions, Unfolding1D};
pub use simulate::{simulate_1d, OrbitPiece1D, Sim1DOptions, SimError, Terminal1D};

/// Number of vanishing derivatives, known exactly up to two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degeneracy {
    Order(u8),
    /// Derivatives through third order all vanish; higher ones are not stored.
    AtLeast3,
}

impl Serialize for Degeneracy {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Degeneracy::Order(n) => s.serialize_u8(*n),
            Degeneracy::AtLeast3 => s.serialize_str(">=3"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Incoming,
    Outgoing,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Point1DClass {
    /// `f = 0`, `f_x ≠ 0`, `g ≠ 0`; `lambda = f_x / g`.
    SimpleEquilibrium {
        lambda: f64,
        stable: bool,
    },
    /// `g = 0`, `g_x ≠ 0`, `f ≠ 0`; `lambda = g_x / f`.
    SimpleSingularity {
        lambda: f64,
        orientation: Orientation,
    },
    /// `f = f_x = … = 0` through order `m`; `s` is the sign of the first
    /// non-vanishing derivative over `g` (0 when unknown).
    NonSimpleEquilibrium {
        m: Degeneracy,
        s: i8,
    },
    NonSimpleSingularity {
        n: Degeneracy,
        s: i8,
    },
    /// `f = g = 0`; `m`, `n` count vanishing x-derivatives of `f` and `g`.
    SingularEquilibrium {
        m: Degeneracy,
        n: Degeneracy,
    },
    RegularPoint,
}

impl Point1DClass {
    pub fn is_simple(&self) -> bool {
        matches!(
            self,
            Point1DClass::SimpleEquilibrium { .. } | Point1DClass::SimpleSingularity { .. }
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpecialPoint1D {
    pub x: f64,
    pub class: Point1DClass,
}

/// Result of a point search: sorted points plus any warnings.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Points1D {
    pub points: Vec<SpecialPoint1D>,
    pub warnings: Vec<String>,
}

fn sign(v: f64) -> i8 {
    if v > 0.0 {
        1
    } else if v < 0.0 {
        -1
    } else {
        0
    }
}

/// First non-negligible entry among `[h_x, h_xx, h_xxx]`.
fn degeneracy(j: &Jet3, tol: &Tolerances) -> (Degeneracy, f64) {
    let derivs = [j.d(1, 0, 0), j.d(2, 0, 0), j.d(3, 0, 0)];
    match derivs.iter().position(|d| !tol.is_small(*d)) {
        Some(i) => (Degeneracy::Order(i as u8), derivs[i]),
        None => (Degeneracy::AtLeast3, 0.0),
    }
}

fn classify_jets(
    jf: &Jet3,
    jg: &Jet3,
    f_zero: bool,
    g_zero: bool,
    tol: &Tolerances,
) -> Point1DClass {
    let (f, g) = (jf.value(), jg.value());
    match (f_zero, g_zero) {
        (true, false) => match degeneracy(jf, tol) {
            (Degeneracy::Order(0), fx) => Point1DClass::SimpleEquilibrium {
                lambda: fx / g,
                stable: fx / g < 0.0,
            },
            (m, lead) => Point1DClass::NonSimpleEquilibrium {
                m,
                s: sign(lead / g),
            },
        },
        (false, true) => match degeneracy(jg, tol) {
            (Degeneracy::Order(0), gx) => {
                let lambda = gx / f;
                let orientation = if lambda > 0.0 {
                    Orientation::Outgoing
                } else {
                    Orientation::Incoming
                };
                Point1DClass::SimpleSingularity {
                    lambda,
                    orientation,
                }
            }
            (n, lead) => Point1DClass::NonSimpleSingularity {
                n,
                s: sign(lead / f),
            },
        },
        (true, true) => Point1DClass::SingularEquilibrium {
            m: degeneracy(jf, tol).0,
            n: degeneracy(jg, tol).0,
        },
        (false, false) => Point1DClass::RegularPoint,
    }
}

/// Classifies the point `x` at parameter `alpha`.
///
/// `|f| ≤ tol.zero` and `|g| ≤ tol.zero` decide which functions vanish;
/// derivative tests use `tol.deriv`. Points where the jets cannot be
/// evaluated are reported as regular.
pub fn classify_point_1d(sys: &System1D, x: f64, alpha: f64, tol: &Tolerances) -> Point1DClass {
    match sys.jets(x, alpha) {
        Ok((jf, jg)) => classify_jets(
            &jf,
            &jg,
            tol.is_zero(jf.value()),
            tol.is_zero(jg.value()),
            tol,
        ),
        Err(_) => Point1DClass::RegularPoint,
    }
}

/// Evaluates x-derivatives of one function at fixed α.
struct XFun<'a> {
    table: &'a JetTable,
    alpha: f64,
}

impl XFun<'_> {
    fn d(&self, k: u8, x: f64) -> Option<f64> {
        self.table
            .expr(k, 0, 0)
            .eval(Coords::new(x, 0.0, self.alpha))
            .ok()
    }

    /// Newton on the k-th derivative, staying within `radius` of `x0`.
    fn newton_on(&self, k: u8, x0: f64, radius: f64) -> Option<f64> {
        let sol = newton(
            |v: &[f64; 1]| Some(([self.d(k, v[0])?], [[self.d(k + 1, v[0])?]])),
            [x0],
            &NewtonOptions {
                max_iters: 80,
                f_tol: 0.0,
                max_step: radius,
            },
        )?;
        ((sol.x[0] - x0).abs() <= radius).then_some(sol.x[0])
    }

    /// Moves a root estimate onto the root of the highest derivative that
    /// still vanishes there, so multiple roots are located to full precision.
    fn refine_multiple(&self, x0: f64, tol: &Tolerances) -> f64 {
        let mut best = x0;
        for j in 1..=2u8 {
            let Some(xj) = self.newton_on(j, best, 1e-3) else {
                break;
            };
            let ok = self.d(0, xj).is_some_and(|v| tol.is_zero(v))
                && (1..j).all(|i| self.d(i, xj).is_some_and(|v| tol.is_small(v)));
            if !ok {
                break;
            }
            best = xj;
        }
        best
    }

    /// All roots on `grid`: sign changes of the function, plus extrema that
    /// touch zero (even multiplicity).
    fn roots(&self, grid: &[f64], tol: &Tolerances) -> Vec<f64> {
        let h0: Vec<Option<f64>> = grid.iter().map(|&x| self.d(0, x)).collect();
        let h1: Vec<Option<f64>> = grid.iter().map(|&x| self.d(1, x)).collect();
        let mut out = Vec::new();
        for i in 0..grid.len() {
            if h0[i] == Some(0.0) {
                out.push(grid[i]);
            }
        }
        for i in 0..grid.len().saturating_sub(1) {
            let (a, b) = (grid[i], grid[i + 1]);
            if let (Some(ha), Some(hb)) = (h0[i], h0[i + 1]) {
                if ha * hb < 0.0 {
                    let mut r = locate_root(|x| self.d(0, x).unwrap_or(f64::NAN), a, b, ha, hb);
                    if let Some(polished) = self.newton_on(0, r, (b - a).abs()) {
                        if self.d(0, polished).map(f64::abs) < self.d(0, r).map(f64::abs) {
                            r = polished;
                        }
                    }
                    out.push(r);
                }
            }
            if let (Some(da), Some(db)) = (h1[i], h1[i + 1]) {
                if da * db < 0.0 {
                    let r = locate_root(|x| self.d(1, x).unwrap_or(f64::NAN), a, b, da, db);
                    if self.d(0, r).is_some_and(|v| tol.is_zero(v)) {
                        out.push(r);
                    }
                }
            }
        }
        let mut refined: Vec<f64> = out
            .into_iter()
            .map(|x| self.refine_multiple(x, tol))
            .collect();
        refined.sort_by(f64::total_cmp);
        refined.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + a.abs()));
        refined
    }
}

pub(crate) fn uniform_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let n = n.max(2);
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Finds and classifies all special points on `[a, b]`.
///
/// Roots of `f` and `g` closer than `10·tol.zero` are merged into a singular
/// equilibrium.
pub fn find_special_points_1d(
    sys: &System1D,
    alpha: f64,
    interval: (f64, f64),
    grid_n: usize,
    tol: &Tolerances,
) -> Points1D {
    let (a, b) = (interval.0.min(interval.1), interval.0.max(interval.1));
    let grid = uniform_grid(a, b, grid_n);
    let fr = XFun {
        table: sys.f_jets(),
        alpha,
    }
    .roots(&grid, tol);
    let gr = XFun {
        table: sys.g_jets(),
        alpha,
    }
    .roots(&grid, tol);
    let merge = 10.0 * tol.zero;

    // Tag each root with which functions vanish there.
    let mut tagged: Vec<(f64, bool, bool)> = Vec::new();
    let mut used_g = vec![false; gr.len()];
    for &x in &fr {
        let partner = gr
            .iter()
            .enumerate()
            .find(|(j, &y)| !used_g[*j] && (x - y).abs() <= merge)
            .map(|(j, _)| j);
        match partner {
            Some(j) => {
                used_g[j] = true;
                tagged.push((x, true, true));
            }
            None => tagged.push((x, true, false)),
        }
    }
    for (j, &y) in gr.iter().enumerate() {
        if !used_g[j] {
            tagged.push((y, false, true));
        }
    }
    tagged.sort_by(|p, q| p.0.total_cmp(&q.0));

    let mut out = Points1D::default();
    for (x, fz, gz) in tagged {
        let Ok((jf, jg)) = sys.jets(x, alpha) else {
            out.warnings.push(format!("jets not evaluable at x = {x}"));
            continue;
        };
        // A root of one function may also be a zero of the other within tolerance.
        let fz = fz || tol.is_zero(jf.value());
        let gz = gz || tol.is_zero(jg.value());
        out.points.push(SpecialPoint1D {
            x,
            class: classify_jets(&jf, &jg, fz, gz, tol),
        });
    }
    for w in out.points.windows(2) {
        if (w[1].x - w[0].x).abs() < merge {
            out.warnings.push(format!(
                "root cluster near x = {}: points {} and {}",
                w[0].x, w[0].x, w[1].x
            ));
        }
    }
    out
}

/// Outcome of the structural stability check.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum StabilityVerdict {
    Stable,
    Violating { points: Vec<SpecialPoint1D> },
}

/// Structurally stable iff every special point is simple and none sits on
/// the interval boundary.
pub fn structural_stability_1d(
    sys: &System1D,
    alpha: f64,
    interval: (f64, f64),
    grid_n: usize,
    tol: &Tolerances,
) -> StabilityVerdict {
    let found = find_special_points_1d(sys, alpha, interval, grid_n, tol);
    let (a, b) = (interval.0.min(interval.1), interval.0.max(interval.1));
    let bad: Vec<SpecialPoint1D> = found
        .points
        .into_iter()
        .filter(|p| {
            !p.class.is_simple() || (p.x - a).abs() <= tol.deriv || (p.x - b).abs() <= tol.deriv
        })
        .collect();
    if bad.is_empty() {
        StabilityVerdict::Stable
    } else {
        StabilityVerdict::Violating { points: bad }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn saddle_node_equilibrium() {
        let s = System1D::parse("x^2 + alpha", "x + 1").unwrap();
        assert_eq!(
            classify_point_1d(&s, 0.0, 0.0, &tol()),
            Point1DClass::NonSimpleEquilibrium {
                m: Degeneracy::Order(1),
                s: 1
            }
        );
    }

    #[test]
    fn fold_of_singularities() {
        let s = System1D::parse("x + 1", "x^2 + alpha").unwrap();
        assert_eq!(
            classify_point_1d(&s, 0.0, 0.0, &tol()),
            Point1DClass::NonSimpleSingularity {
                n: Degeneracy::Order(1),
                s: 1
            }
        );
    }

    #[test]
    fn outgoing_singularity_eigenvalue() {
        let s = System1D::parse("x^2 + alpha", "x + 1").unwrap();
        match classify_point_1d(&s, -1.0, 0.25, &tol()) {
            Point1DClass::SimpleSingularity {
                lambda,
                orientation,
            } => {
                assert!((lambda - 0.8).abs() < 1e-15);
                assert_eq!(orientation, Orientation::Outgoing);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sign_table_of_saddle_node_family() {
        let s = System1D::parse("x^2 + alpha", "x + 1").unwrap();
        let found = find_special_points_1d(&s, -0.25, (-2.0, 2.0), 512, &tol());
        let xs: Vec<f64> = found.points.iter().map(|p| p.x).collect();
        assert_eq!(xs.len(), 3);
        assert!(
            (xs[0] + 1.0).abs() < 1e-12
                && (xs[1] + 0.5).abs() < 1e-12
                && (xs[2] - 0.5).abs() < 1e-12
        );
        assert!(matches!(
            found.points[0].class,
            Point1DClass::SimpleSingularity {
                orientation: Orientation::Outgoing,
                ..
            }
        ));
        assert!(matches!(
            found.points[1].class,
            Point1DClass::SimpleEquilibrium { stable: true, .. }
        ));
        assert!(matches!(
            found.points[2].class,
            Point1DClass::SimpleEquilibrium { stable: false, .. }
        ));
    }

    #[test]
    fn transcritical_family_at_zero() {
        let s = System1D::parse("x - x^2 + 2*alpha", "x + x^2 + alpha").unwrap();
        let found = find_special_points_1d(&s, 0.0, (-0.5, 1.5), 512, &tol());
        assert_eq!(found.points.len(), 2, "{:?}", found.points);
        assert_eq!(
            found.points[0].class,
            Point1DClass::SingularEquilibrium {
                m: Degeneracy::Order(0),
                n: Degeneracy::Order(0)
            }
        );
        match found.points[1].class {
            Point1DClass::SimpleEquilibrium { lambda, stable } => {
                assert!((lambda + 0.5).abs() < 1e-12);
                assert!(stable);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn nothing_to_find() {
        let s = System1D::parse("1", "1").unwrap();
        assert!(find_special_points_1d(&s, 0.0, (-1.0, 1.0), 64, &tol())
            .points
            .is_empty());
        assert!(matches!(
            structural_stability_1d(&s, 0.0, (-1.0, 1.0), 64, &tol()),
            StabilityVerdict::Stable
        ));
    }

    #[test]
    fn structural_stability_verdicts() {
        let s = System1D::parse("x^2 + alpha", "x + 1").unwrap();
        assert!(matches!(
            structural_stability_1d(&s, -0.25, (-2.0, 2.0), 512, &tol()),
            StabilityVerdict::Stable
        ));
        match structural_stability_1d(&s, 0.0, (-2.0, 2.0), 512, &tol()) {
            StabilityVerdict::Violating { points } => {
                assert_eq!(points.len(), 1);
                assert!(points[0].x.abs() < 1e-9);
                assert!(matches!(
                    points[0].class,
                    Point1DClass::NonSimpleEquilibrium { .. }
                ));
            }
            StabilityVerdict::Stable => panic!("degenerate point missed"),
        }
    }

    #[test]
    fn triple_root_is_located_precisely() {
        let s = System1D::parse("(x - 0.3)^3*(x + 2)", "1").unwrap();
        let found = find_special_points_1d(&s, 0.0, (-1.0, 1.0), 100, &tol());
        assert_eq!(found.points.len(), 1);
        assert!((found.points[0].x - 0.3).abs() < 1e-12);
        assert_eq!(
            found.points[0].class,
            Point1DClass::NonSimpleEquilibrium {
                m: Degeneracy::Order(2),
                s: 1
            }
        );
    }
}
