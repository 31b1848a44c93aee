//! Damped Newton iteration for square systems of size 1–3.

use super::linalg::solve;

#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub max_iters: usize,
    /// Stop once `max |F| ≤ f_tol`.
    pub f_tol: f64,
    /// Largest allowed step in the max norm; guards against wild jumps from poor seeds.
    pub max_step: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            max_iters: 60,
            f_tol: 1e-14,
            max_step: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonSolution<const N: usize> {
    pub x: [f64; N],
    pub residual: f64,
    pub iters: usize,
}

fn norm<const N: usize>(v: &[f64; N]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Runs Newton from `x0` on `system`, which returns `(F(x), J(x))` or `None`
/// outside its domain. Steps are clipped to `max_step` and halved until the
/// residual decreases. Returns the final iterate when the residual has
/// stagnated, so callers apply their own acceptance threshold.
pub fn newton<const N: usize, F>(
    mut system: F,
    x0: [f64; N],
    opts: &NewtonOptions,
) -> Option<NewtonSolution<N>>
where
    F: FnMut(&[f64; N]) -> Option<([f64; N], [[f64; N]; N])>,
{
    let mut x = x0;
    let (mut fx, mut jx) = system(&x)?;
    let mut r = norm(&fx);
    for iter in 0..opts.max_iters {
        if r <= opts.f_tol {
            return Some(NewtonSolution {
                x,
                residual: r,
                iters: iter,
            });
        }
        let mut dx = solve(jx, fx.map(|v| -v))?;
        let step = norm(&dx);
        if step > opts.max_step {
            let s = opts.max_step / step;
            dx = dx.map(|v| v * s);
        }
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let mut trial = x;
            for (t, d) in trial.iter_mut().zip(dx.iter()) {
                *t += lambda * d;
            }
            if let Some((ft, jt)) = system(&trial) {
                let rt = norm(&ft);
                if rt < r {
                    x = trial;
                    fx = ft;
                    jx = jt;
                    r = rt;
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            // No decrease along the Newton direction: we are at the noise floor.
            return Some(NewtonSolution {
                x,
                residual: r,
                iters: iter,
            });
        }
        if norm(&dx) * lambda <= 1e-16 * (1.0 + norm(&x)) {
            return Some(NewtonSolution {
                x,
                residual: r,
                iters: iter + 1,
            });
        }
    }
    Some(NewtonSolution {
        x,
        residual: r,
        iters: opts.max_iters,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_circle_line_intersection() {
        let sol = newton(
            |v: &[f64; 2]| {
                let [x, y] = *v;
                Some((
                    [x * x + y * y - 1.0, x - y],
                    [[2.0 * x, 2.0 * y], [1.0, -1.0]],
                ))
            },
            [1.0, 0.2],
            &NewtonOptions::default(),
        )
        .unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!((sol.x[0] - h).abs() < 1e-14 && (sol.x[1] - h).abs() < 1e-14);
        assert!(sol.residual <= 1e-14);
    }

    #[test]
    fn singular_jacobian_gives_up() {
        let out = newton(
            |_: &[f64; 1]| Some(([1.0], [[0.0]])),
            [0.0],
            &NewtonOptions::default(),
        );
        assert!(out.is_none());
    }
}
