//! Scalar expressions in `x`, `y` and `alpha`.
//!
//! Every right-hand side and every leading coefficient of a system is an
//! [`Expr`]. The tree supports evaluation, exact symbolic differentiation and
//! printing back to the input grammar, which is enough to compute all the
//! partial derivatives the classification code needs without finite
//! differences.
//!
//! ```
//! use dae_singular::expr::{parse_expression, Coords, Var};
//!
//! let e = parse_expression("x - x^3").unwrap();
//! let de = e.differentiate(Var::X);
//! assert_eq!(de.eval(Coords::new(0.0, 0.0, 0.0)).unwrap(), 1.0);
//! ```

mod diff;
mod jet;
mod parse;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use jet::{jet3, Jet3, JetTable, MULTI_INDICES};
pub use parse::{parse_expression, ParseError};

/// One of the three independent variables an expression may reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    X,
    Y,
    Alpha,
}

impl Var {
    pub const ALL: [Var; 3] = [Var::X, Var::Y, Var::Alpha];

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::Alpha => "alpha",
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Elementary functions accepted by the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Tanh,
    Sqrt,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Tanh => "tanh",
            Func::Sqrt => "sqrt",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "log" => Func::Log,
            "tanh" => Func::Tanh,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

/// A point `(x, y, alpha)` at which expressions are evaluated.
///
/// One-dimensional systems simply leave `y` at zero; their expressions never
/// read it.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Coords {
    pub x: f64,
    pub y: f64,
    pub alpha: f64,
}

impl Coords {
    pub const fn new(x: f64, y: f64, alpha: f64) -> Self {
        Coords { x, y, alpha }
    }

    pub const fn planar(p: [f64; 2], alpha: f64) -> Self {
        Coords {
            x: p[0],
            y: p[1],
            alpha,
        }
    }

    pub fn get(&self, v: Var) -> f64 {
        match v {
            Var::X => self.x,
            Var::Y => self.y,
            Var::Alpha => self.alpha,
        }
    }
}

/// Reasons an expression cannot be evaluated at a point.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("logarithm of non-positive value {0}")]
    LogDomain(f64),
    #[error("square root of negative value {0}")]
    SqrtDomain(f64),
    #[error("non-finite result")]
    NonFinite,
}

/// Expression tree. Exponents of `^` are integer literals.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var(Var),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Call(Func, Box<Expr>),
}

// Constructors below fold constants and drop neutral elements; nothing more.
impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn var(v: Var) -> Expr {
        Expr::Var(v)
    }

    pub fn as_const(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    fn is_const(&self, c: f64) -> bool {
        matches!(self, Expr::Const(v) if *v == c)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => *inner,
            other => Expr::Neg(Box::new(other)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x + y),
            _ if a.is_const(0.0) => b,
            _ if b.is_const(0.0) => a,
            _ => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn sub(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x - y),
            _ if b.is_const(0.0) => a,
            _ if a.is_const(0.0) => Expr::neg(b),
            _ => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            (Expr::Const(x), Expr::Const(y)) => Expr::Const(x * y),
            _ if a.is_const(0.0) || b.is_const(0.0) => Expr::Const(0.0),
            _ if a.is_const(1.0) => b,
            _ if b.is_const(1.0) => a,
            _ if a.is_const(-1.0) => Expr::neg(b),
            _ if b.is_const(-1.0) => Expr::neg(a),
            _ => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn div(a: Expr, b: Expr) -> Expr {
        match (&a, &b) {
            (Expr::Const(x), Expr::Const(y)) if *y != 0.0 => Expr::Const(x / y),
            _ if a.is_const(0.0) && !b.is_const(0.0) => Expr::Const(0.0),
            _ if b.is_const(1.0) => a,
            _ => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(a: Expr, n: i32) -> Expr {
        match (&a, n) {
            (_, 0) => Expr::Const(1.0),
            (_, 1) => a,
            (Expr::Const(c), _) => Expr::Const(c.powi(n)),
            _ => Expr::Pow(Box::new(a), n),
        }
    }

    pub fn call(f: Func, a: Expr) -> Expr {
        Expr::Call(f, Box::new(a))
    }

    /// Evaluates the expression, reporting domain violations instead of
    /// returning NaN or infinities.
    pub fn eval(&self, at: Coords) -> Result<f64, EvalError> {
        let v = match self {
            Expr::Const(c) => *c,
            Expr::Var(v) => at.get(*v),
            Expr::Neg(a) => -a.eval(at)?,
            Expr::Add(a, b) => a.eval(at)? + b.eval(at)?,
            Expr::Sub(a, b) => a.eval(at)? - b.eval(at)?,
            Expr::Mul(a, b) => a.eval(at)? * b.eval(at)?,
            Expr::Div(a, b) => {
                let den = b.eval(at)?;
                if den == 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                a.eval(at)? / den
            }
            Expr::Pow(a, n) => {
                let base = a.eval(at)?;
                if *n < 0 && base == 0.0 {
                    return Err(EvalError::DivisionByZero);
                }
                base.powi(*n)
            }
            Expr::Call(f, a) => {
                let u = a.eval(at)?;
                match f {
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                    Func::Exp => u.exp(),
                    Func::Tanh => u.tanh(),
                    Func::Log => {
                        if u <= 0.0 {
                            return Err(EvalError::LogDomain(u));
                        }
                        u.ln()
                    }
                    Func::Sqrt => {
                        if u < 0.0 {
                            return Err(EvalError::SqrtDomain(u));
                        }
                        u.sqrt()
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    /// Returns true if `v` occurs anywhere in the tree.
    pub fn references(&self, v: Var) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(w) => *w == v,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.references(v),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.references(v) || b.references(v)
            }
        }
    }

    /// Number of nodes; used to keep an eye on derivative growth.
    pub fn size(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => 1 + a.size(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(..) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(c) if *c < 0.0 => 3,
            Expr::Const(_) | Expr::Var(_) | Expr::Call(..) => 5,
        }
    }
}

fn write_operand(f: &mut fmt::Formatter<'_>, e: &Expr, min_prec: u8) -> fmt::Result {
    if e.precedence() < min_prec {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

fn write_number(f: &mut fmt::Formatter<'_>, c: f64) -> fmt::Result {
    // `{:?}` is the shortest representation that parses back to the same bits.
    let text = format!("{:?}", c.abs());
    if c.is_sign_negative() {
        write!(f, "-{text}")
    } else {
        f.write_str(&text)
    }
}

/// Prints in the input grammar; `parse_expression(&e.to_string())` evaluates
/// identically to `e`.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write_number(f, *c),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                write_operand(f, a, 4)
            }
            Expr::Add(a, b) => {
                write_operand(f, a, 1)?;
                f.write_str(" + ")?;
                write_operand(f, b, 2)
            }
            Expr::Sub(a, b) => {
                write_operand(f, a, 1)?;
                f.write_str(" - ")?;
                write_operand(f, b, 2)
            }
            Expr::Mul(a, b) => {
                write_operand(f, a, 2)?;
                f.write_str("*")?;
                write_operand(f, b, 4)
            }
            Expr::Div(a, b) => {
                write_operand(f, a, 2)?;
                f.write_str("/")?;
                write_operand(f, b, 4)
            }
            Expr::Pow(a, n) => {
                write_operand(f, a, 5)?;
                write!(f, "^{n}")
            }
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(x: f64, y: f64, a: f64) -> Coords {
        Coords::new(x, y, a)
    }

    #[test]
    fn constructors_fold_constants() {
        let e = Expr::add(Expr::constant(2.0), Expr::constant(3.0));
        assert_eq!(e, Expr::Const(5.0));
        let x = Expr::var(Var::X);
        assert_eq!(Expr::mul(x.clone(), Expr::constant(1.0)), x);
        assert_eq!(Expr::mul(x.clone(), Expr::constant(0.0)), Expr::Const(0.0));
        assert_eq!(Expr::pow(x.clone(), 0), Expr::Const(1.0));
        assert_eq!(Expr::neg(Expr::neg(x.clone())), x);
    }

    #[test]
    fn eval_reports_domain_errors() {
        let e = parse_expression("1/x").unwrap();
        assert_eq!(e.eval(at(0.0, 0.0, 0.0)), Err(EvalError::DivisionByZero));
        let e = parse_expression("log(x)").unwrap();
        assert!(matches!(
            e.eval(at(-1.0, 0.0, 0.0)),
            Err(EvalError::LogDomain(_))
        ));
        let e = parse_expression("sqrt(x)").unwrap();
        assert!(matches!(
            e.eval(at(-1.0, 0.0, 0.0)),
            Err(EvalError::SqrtDomain(_))
        ));
        let e = parse_expression("x^-2").unwrap();
        assert_eq!(e.eval(at(0.0, 0.0, 0.0)), Err(EvalError::DivisionByZero));
    }

    #[test]
    fn display_round_trips_awkward_trees() {
        let cases = [
            "-x^2 + alpha",
            "(x - y) - (alpha - 1)",
            "x/(y*alpha)",
            "(-2)^3*x",
            "-(x + 1)^2",
            "exp(-x)*sin(y^2)/3",
            "1e-3*x - 2.5e10",
        ];
        for src in cases {
            let e = parse_expression(src).unwrap();
            let printed = e.to_string();
            let back = parse_expression(&printed).unwrap();
            let p = at(0.37, -1.3, 0.21);
            assert_eq!(
                e.eval(p).unwrap(),
                back.eval(p).unwrap(),
                "{src} -> {printed}"
            );
        }
    }

    #[test]
    fn references_tracks_variables() {
        let e = parse_expression("x + alpha").unwrap();
        assert!(e.references(Var::X));
        assert!(!e.references(Var::Y));
        assert!(e.references(Var::Alpha));
    }
}
