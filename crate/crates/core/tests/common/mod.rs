//! Independent oracles shared by the integration tests: random expression
//! strings, finite differences, polynomials evaluated natively and a fixed-step
//! Runge-Kutta integrator.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Random expression in the input grammar, built so that it is defined and
/// moderate on `[-1, 1]^3`.
pub fn random_expr(rng: &mut ChaCha8Rng, depth: u32) -> String {
    if depth == 0 || rng.random_bool(0.25) {
        return match rng.random_range(0..4) {
            0 => "x".into(),
            1 => "y".into(),
            2 => "alpha".into(),
            _ => format!("{:.2}", rng.random_range(-2.0..2.0)),
        };
    }
    let a = random_expr(rng, depth - 1);
    match rng.random_range(0..11) {
        0 => format!("({a}) + ({})", random_expr(rng, depth - 1)),
        1 => format!("({a}) - ({})", random_expr(rng, depth - 1)),
        2 | 3 => format!("({a}) * ({})", random_expr(rng, depth - 1)),
        4 => format!("({a})^{}", rng.random_range(2..=3)),
        5 => format!("sin({a})"),
        6 => format!("cos({a})"),
        7 => format!("exp(0.5*({a}))"),
        8 => format!("tanh({a})"),
        9 => format!("({a}) / (2 + ({})^2)", random_expr(rng, depth - 1)),
        _ => format!("sqrt(1 + ({a})^2)"),
    }
}

/// Central first-difference weights of order eight, for offsets 1..=4.
const W: [f64; 4] = [4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0];

/// `∂^(nx+ny+na) f / ∂x^nx ∂y^ny ∂α^na` by nested eighth-order central differences.
pub fn finite_difference<F: Fn([f64; 3]) -> f64>(
    f: &F,
    at: [f64; 3],
    orders: [u8; 3],
    h: f64,
) -> f64 {
    fn rec<F: Fn([f64; 3]) -> f64>(f: &F, at: [f64; 3], mut orders: [u8; 3], h: f64) -> f64 {
        let Some(axis) = orders.iter().position(|&n| n > 0) else {
            return f(at);
        };
        orders[axis] -= 1;
        let mut s = 0.0;
        for (k, w) in W.iter().enumerate() {
            let d = (k + 1) as f64 * h;
            let mut p = at;
            let mut m = at;
            p[axis] += d;
            m[axis] -= d;
            s += w * (rec(f, p, orders, h) - rec(f, m, orders, h));
        }
        s / h
    }
    rec(f, at, orders, h)
}

/// Step-size selection in the spirit of Ridders: differences at halving steps
/// from `h0`, returning the estimate that agrees best with its successor.
pub fn finite_difference_auto<F: Fn([f64; 3]) -> f64>(
    f: &F,
    at: [f64; 3],
    orders: [u8; 3],
    h0: f64,
) -> f64 {
    let est: Vec<f64> = (0..6)
        .map(|k| finite_difference(f, at, orders, h0 / 2f64.powi(k)))
        .collect();
    let best = (0..est.len() - 1)
        .min_by(|&i, &j| {
            (est[i] - est[i + 1])
                .abs()
                .total_cmp(&(est[j] - est[j + 1]).abs())
        })
        .unwrap_or(0);
    est[best + 1]
}

/// Dense polynomial in `(x, y, alpha)`; `terms` holds `(coefficient, [i, j, k])`.
#[derive(Debug, Clone)]
pub struct Poly {
    pub terms: Vec<(f64, [u32; 3])>,
}

impl Poly {
    pub fn eval(&self, x: f64, y: f64, a: f64) -> f64 {
        self.terms
            .iter()
            .map(|(c, [i, j, k])| c * x.powi(*i as i32) * y.powi(*j as i32) * a.powi(*k as i32))
            .sum()
    }

    pub fn coeff(&self, e: [u32; 3]) -> f64 {
        self.terms.iter().filter(|t| t.1 == e).map(|t| t.0).sum()
    }

    /// `∂/∂x` and `∂/∂y`.
    pub fn grad(&self, x: f64, y: f64, a: f64) -> [f64; 2] {
        let mut g = [0.0; 2];
        for (c, [i, j, k]) in &self.terms {
            let ak = a.powi(*k as i32);
            if *i > 0 {
                g[0] += c * *i as f64 * x.powi(*i as i32 - 1) * y.powi(*j as i32) * ak;
            }
            if *j > 0 {
                g[1] += c * *j as f64 * x.powi(*i as i32) * y.powi(*j as i32 - 1) * ak;
            }
        }
        g
    }

    /// Grammar text with coefficients printed exactly.
    pub fn source(&self) -> String {
        let mut s = String::from("0");
        for (c, [i, j, k]) in &self.terms {
            s.push_str(&format!(" + ({c:?})"));
            for (v, n) in [("x", i), ("y", j), ("alpha", k)] {
                if *n > 0 {
                    s.push_str(&format!("*{v}^{n}"));
                }
            }
        }
        s
    }
}

/// Random polynomial in `x, y` of total degree at most `deg`, coefficients in `[-scale, scale)`.
pub fn random_poly(rng: &mut ChaCha8Rng, deg: u32, scale: f64) -> Poly {
    let mut terms = Vec::new();
    for i in 0..=deg {
        for j in 0..=deg - i {
            terms.push((scale * rng.random_range(-1.0..1.0), [i, j, 0]));
        }
    }
    Poly { terms }
}

/// Classical RK4 on a planar field from `p` over time `t`, split into steps no
/// longer than `h`.
pub fn rk4<F: Fn([f64; 2]) -> [f64; 2]>(f: &F, mut p: [f64; 2], t: f64, h: f64) -> [f64; 2] {
    let n = ((t.abs() / h).ceil() as usize).max(1);
    let dt = t / n as f64;
    let add = |p: [f64; 2], k: [f64; 2], s: f64| [p[0] + s * k[0], p[1] + s * k[1]];
    for _ in 0..n {
        let k1 = f(p);
        let k2 = f(add(p, k1, 0.5 * dt));
        let k3 = f(add(p, k2, 0.5 * dt));
        let k4 = f(add(p, k3, dt));
        p = [
            p[0] + dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            p[1] + dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
    }
    p
}

/// Eigenvalue type of a real 2×2 matrix from its trace and determinant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Type2 {
    Saddle,
    Node,
    Focus,
}

pub fn type_of(m: [[f64; 2]; 2]) -> Type2 {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det < 0.0 {
        Type2::Saddle
    } else if tr * tr - 4.0 * det >= 0.0 {
        Type2::Node
    } else {
        Type2::Focus
    }
}
