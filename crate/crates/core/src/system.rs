//! System definitions: the 1D pair `(f, g)` and the planar triple `(f1, f2, g)`.

use thiserror::Error;

use crate::expr::{parse_expression, Coords, EvalError, Expr, Jet3, JetTable, ParseError, Var};

#[derive(Debug, Error)]
pub enum SystemError {
    #[error("{name}: {source}")]
    Parse {
        name: &'static str,
        #[source]
        source: ParseError,
    },
    #[error("{name} references '{var}', which a {dim}D system does not have")]
    ForeignVariable {
        name: &'static str,
        var: Var,
        dim: u8,
    },
}

/// `g(x, α) ẋ = f(x, α)`.
#[derive(Debug, Clone)]
pub struct System1D {
    pub name: String,
    f: Expr,
    g: Expr,
    jf: JetTable,
    jg: JetTable,
}

/// `g(x, y, α) ẋ = f1(x, y, α)`, `ẏ = f2(x, y, α)`.
#[derive(Debug, Clone)]
pub struct System2D {
    pub name: String,
    f1: Expr,
    f2: Expr,
    g: Expr,
    jf1: JetTable,
    jf2: JetTable,
    jg: JetTable,
}

/// Either kind of system, as read from a system file.
#[derive(Debug, Clone)]
pub enum SystemDef {
    OneD(System1D),
    TwoD(System2D),
}

impl SystemDef {
    pub fn dimension(&self) -> u8 {
        match self {
            SystemDef::OneD(_) => 1,
            SystemDef::TwoD(_) => 2,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            SystemDef::OneD(s) => &s.name,
            SystemDef::TwoD(s) => &s.name,
        }
    }
}

impl From<System1D> for SystemDef {
    fn from(s: System1D) -> Self {
        SystemDef::OneD(s)
    }
}

impl From<System2D> for SystemDef {
    fn from(s: System2D) -> Self {
        SystemDef::TwoD(s)
    }
}

fn parse_named(name: &'static str, src: &str) -> Result<Expr, SystemError> {
    parse_expression(src).map_err(|source| SystemError::Parse { name, source })
}

impl System1D {
    pub fn new(name: impl Into<String>, f: Expr, g: Expr) -> Result<Self, SystemError> {
        for (label, e) in [("f", &f), ("g", &g)] {
            if e.references(Var::Y) {
                return Err(SystemError::ForeignVariable {
                    name: label,
                    var: Var::Y,
                    dim: 1,
                });
            }
        }
        let jf = JetTable::new(&f);
        let jg = JetTable::new(&g);
        Ok(System1D {
            name: name.into(),
            f,
            g,
            jf,
            jg,
        })
    }

    /// Parses both sides. `g` is the coefficient of `ẋ`.
    pub fn parse(f: &str, g: &str) -> Result<Self, SystemError> {
        Self::new(
            format!("({g}) x' = {f}"),
            parse_named("f", f)?,
            parse_named("g", g)?,
        )
    }

    pub fn f(&self) -> &Expr {
        &self.f
    }
    pub fn g(&self) -> &Expr {
        &self.g
    }
    pub fn f_jets(&self) -> &JetTable {
        &self.jf
    }
    pub fn g_jets(&self) -> &JetTable {
        &self.jg
    }

    pub fn eval_f(&self, x: f64, alpha: f64) -> Result<f64, EvalError> {
        self.jf.value(Coords::new(x, 0.0, alpha))
    }

    pub fn eval_g(&self, x: f64, alpha: f64) -> Result<f64, EvalError> {
        self.jg.value(Coords::new(x, 0.0, alpha))
    }

    /// Jets of `f` and `g` at `(x, α)`.
    pub fn jets(&self, x: f64, alpha: f64) -> Result<(Jet3, Jet3), EvalError> {
        let at = Coords::new(x, 0.0, alpha);
        Ok((self.jf.eval(at)?, self.jg.eval(at)?))
    }
}

/// Jets of the three planar functions at one point.
#[derive(Debug, Clone, Copy)]
pub struct Jets2D {
    pub f1: Jet3,
    pub f2: Jet3,
    pub g: Jet3,
}

impl System2D {
    pub fn new(name: impl Into<String>, f1: Expr, f2: Expr, g: Expr) -> Result<Self, SystemError> {
        let jf1 = JetTable::new(&f1);
        let jf2 = JetTable::new(&f2);
        let jg = JetTable::new(&g);
        Ok(System2D {
            name: name.into(),
            f1,
            f2,
            g,
            jf1,
            jf2,
            jg,
        })
    }

    pub fn parse(f1: &str, f2: &str, g: &str) -> Result<Self, SystemError> {
        Self::new(
            format!("({g}) x' = {f1}, y' = {f2}"),
            parse_named("f1", f1)?,
            parse_named("f2", f2)?,
            parse_named("g", g)?,
        )
    }

    pub fn f1(&self) -> &Expr {
        &self.f1
    }
    pub fn f2(&self) -> &Expr {
        &self.f2
    }
    pub fn g(&self) -> &Expr {
        &self.g
    }
    pub fn f1_jets(&self) -> &JetTable {
        &self.jf1
    }
    pub fn f2_jets(&self) -> &JetTable {
        &self.jf2
    }
    pub fn g_jets(&self) -> &JetTable {
        &self.jg
    }

    pub fn jets(&self, p: [f64; 2], alpha: f64) -> Result<Jets2D, EvalError> {
        let at = Coords::planar(p, alpha);
        Ok(Jets2D {
            f1: self.jf1.eval(at)?,
            f2: self.jf2.eval(at)?,
            g: self.jg.eval(at)?,
        })
    }

    /// Like [`System2D::jets`] but only up to `max_order`.
    pub fn jets_upto(&self, p: [f64; 2], alpha: f64, max_order: u8) -> Result<Jets2D, EvalError> {
        let at = Coords::planar(p, alpha);
        Ok(Jets2D {
            f1: self.jf1.eval_order(at, max_order)?,
            f2: self.jf2.eval_order(at, max_order)?,
            g: self.jg.eval_order(at, max_order)?,
        })
    }

    pub fn eval_g(&self, p: [f64; 2], alpha: f64) -> Result<f64, EvalError> {
        self.jg.value(Coords::planar(p, alpha))
    }

    /// Value and first partials `[v, ∂x, ∂y, ∂α]` of `g`.
    pub fn g_first(&self, p: [f64; 2], alpha: f64) -> Result<[f64; 4], EvalError> {
        self.jg.eval_first(Coords::planar(p, alpha))
    }

    /// Right-hand side of the original system, `(f1/g, f2)`.
    pub fn dae_rhs(&self, p: [f64; 2], alpha: f64) -> Result<[f64; 2], EvalError> {
        let at = Coords::planar(p, alpha);
        let g = self.jg.value(at)?;
        if g == 0.0 {
            return Err(EvalError::DivisionByZero);
        }
        Ok([self.jf1.value(at)? / g, self.jf2.value(at)?])
    }
}
