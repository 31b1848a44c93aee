use super::{Expr, Func, Var};

impl Expr {
    /// Exact partial derivative with respect to `v`. Only constants are folded.
    pub fn differentiate(&self, v: Var) -> Expr {
        match self {
            Expr::Const(_) => Expr::constant(0.0),
            Expr::Var(w) => Expr::constant(if *w == v { 1.0 } else { 0.0 }),
            Expr::Neg(a) => Expr::neg(a.differentiate(v)),
            Expr::Add(a, b) => Expr::add(a.differentiate(v), b.differentiate(v)),
            Expr::Sub(a, b) => Expr::sub(a.differentiate(v), b.differentiate(v)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.differentiate(v), (**b).clone()),
                Expr::mul((**a).clone(), b.differentiate(v)),
            ),
            Expr::Div(a, b) => {
                // (a/b)' = a'/b - a b'/b^2
                let da = a.differentiate(v);
                let db = b.differentiate(v);
                Expr::sub(
                    Expr::div(da, (**b).clone()),
                    Expr::div(Expr::mul((**a).clone(), db), Expr::pow((**b).clone(), 2)),
                )
            }
            Expr::Pow(a, n) => Expr::mul(
                Expr::mul(
                    Expr::constant(f64::from(*n)),
                    Expr::pow((**a).clone(), n - 1),
                ),
                a.differentiate(v),
            ),
            Expr::Call(func, a) => {
                let u = (**a).clone();
                let outer = match func {
                    Func::Sin => Expr::call(Func::Cos, u),
                    Func::Cos => Expr::neg(Expr::call(Func::Sin, u)),
                    Func::Exp => Expr::call(Func::Exp, u),
                    Func::Log => Expr::div(Expr::constant(1.0), u),
                    Func::Tanh => {
                        Expr::sub(Expr::constant(1.0), Expr::pow(Expr::call(Func::Tanh, u), 2))
                    }
                    Func::Sqrt => Expr::div(Expr::constant(0.5), Expr::call(Func::Sqrt, u)),
                };
                Expr::mul(outer, a.differentiate(v))
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use crate::expr::{parse_expression, Coords, Expr, Var};

    fn d(src: &str, v: Var) -> Expr {
        parse_expression(src).unwrap().differentiate(v)
    }

    #[test]
    fn polynomial_rule() {
        let e = d("x + x^2 + alpha", Var::X);
        for x in [-1.5, 0.0, 0.25, 3.0] {
            assert_eq!(e.eval(Coords::new(x, 0.0, 0.0)).unwrap(), 1.0 + 2.0 * x);
        }
    }

    #[test]
    fn parameter_derivative_is_one() {
        assert_eq!(d("x^2 + alpha", Var::Alpha), Expr::Const(1.0));
    }

    #[test]
    fn absent_variable_folds_to_zero() {
        assert_eq!(d("x - x^3", Var::Y), Expr::Const(0.0));
    }

    #[test]
    fn elementary_functions() {
        let p = Coords::new(0.7, 0.0, 0.0);
        let cases: [(&str, fn(f64) -> f64); 6] = [
            ("sin(x)", f64::cos),
            ("cos(x)", |x| -x.sin()),
            ("exp(2*x)", |x| 2.0 * (2.0 * x).exp()),
            ("log(x)", |x| 1.0 / x),
            ("tanh(x)", |x| 1.0 - x.tanh().powi(2)),
            ("sqrt(x)", |x| 0.5 / x.sqrt()),
        ];
        for (src, exact) in cases {
            let got = d(src, Var::X).eval(p).unwrap();
            assert!((got - exact(0.7)).abs() < 1e-14, "{src}");
        }
    }

    #[test]
    fn quotient_and_negative_power() {
        let p = Coords::new(1.3, 0.4, 0.0);
        let q = d("x/y", Var::Y).eval(p).unwrap();
        assert!((q + 1.3 / 0.16).abs() < 1e-12);
        let r = d("x^-2", Var::X).eval(p).unwrap();
        assert!((r + 2.0 / 1.3f64.powi(3)).abs() < 1e-12);
    }
}
