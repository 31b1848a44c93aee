//! Augmented systems in `(x, y, α)` whose regular solutions are events.

use crate::codes::EventCode;
use crate::expr::{Coords, Expr, Var};
use crate::numeric::{newton, NewtonOptions};
use crate::System2D;

/// Three equations in `(x, y, α)` with a symbolic Jacobian.
#[derive(Debug, Clone)]
pub struct DefiningSystem {
    pub code: EventCode,
    comps: [Expr; 3],
    jac: [[Expr; 3]; 3],
}

fn sq(e: Expr) -> Expr {
    Expr::pow(e, 2)
}

impl DefiningSystem {
    fn from_comps(code: EventCode, comps: [Expr; 3]) -> Self {
        let jac =
            std::array::from_fn(|i| std::array::from_fn(|k| comps[i].differentiate(Var::ALL[k])));
        DefiningSystem { code, comps, jac }
    }

    /// The defining system of `code`, or `None` for codes that are not
    /// located this way (L9, G6).
    pub fn new(sys: &System2D, code: EventCode) -> Option<Self> {
        let d = |e: &Expr, v: Var| e.differentiate(v);
        let (f1, f2, g) = (sys.f1().clone(), sys.f2().clone(), sys.g().clone());
        let (f1x, f1y) = (d(&f1, Var::X), d(&f1, Var::Y));
        let (f2x, f2y) = (d(&f2, Var::X), d(&f2, Var::Y));
        let (gx, gy) = (d(&g, Var::X), d(&g, Var::Y));
        let delta2 = || {
            Expr::sub(
                Expr::mul(f1x.clone(), gy.clone()),
                Expr::mul(f1y.clone(), gx.clone()),
            )
        };
        let tr_seq = || Expr::add(f1x.clone(), Expr::mul(gy.clone(), f2.clone()));
        let comps = match code {
            EventCode::T1 | EventCode::T2 => [g, gx.clone(), gy],
            EventCode::L1 => [
                f1,
                f2,
                Expr::sub(
                    Expr::mul(f1x.clone(), f2y.clone()),
                    Expr::mul(f1y.clone(), f2x.clone()),
                ),
            ],
            EventCode::L2 => [f1, g, delta2()],
            EventCode::L3 => [f1, f2, g],
            EventCode::L4 => [g, gx.clone(), d(&gx, Var::X)],
            EventCode::L5 => [g, gx, f1],
            EventCode::L6 => [
                f1,
                g,
                Expr::sub(
                    sq(tr_seq()),
                    Expr::mul(Expr::mul(Expr::constant(4.0), f2.clone()), delta2()),
                ),
            ],
            EventCode::L7 => [
                f1.clone(),
                f2.clone(),
                Expr::add(f1x.clone(), Expr::mul(g, f2y)),
            ],
            EventCode::L8 => [f1, g, tr_seq()],
            EventCode::L9 | EventCode::G6 => return None,
        };
        Some(Self::from_comps(code, comps))
    }

    pub fn components(&self) -> &[Expr; 3] {
        &self.comps
    }

    pub fn eval(&self, v: [f64; 3]) -> Option<([f64; 3], [[f64; 3]; 3])> {
        let at = Coords::new(v[0], v[1], v[2]);
        let mut f = [0.0; 3];
        let mut j = [[0.0; 3]; 3];
        for i in 0..3 {
            f[i] = self.comps[i].eval(at).ok()?;
            for k in 0..3 {
                j[i][k] = self.jac[i][k].eval(at).ok()?;
            }
        }
        Some((f, j))
    }

    /// Newton from `(p, α)`; accepts residuals at or below `1e-12` relative
    /// to the Jacobian scale.
    pub fn solve(&self, p: [f64; 2], alpha: f64, max_step: f64) -> Option<[f64; 3]> {
        let sol = newton(
            |v: &[f64; 3]| self.eval(*v),
            [p[0], p[1], alpha],
            &NewtonOptions {
                max_iters: 60,
                f_tol: 1e-15,
                max_step,
            },
        )?;
        let (_, jac) = self.eval(sol.x)?;
        let scale = 1.0_f64.max(jac.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())));
        (sol.residual <= 1e-12 * scale).then_some(sol.x)
    }
}
