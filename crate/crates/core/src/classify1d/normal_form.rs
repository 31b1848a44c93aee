use serde::{Serialize, Serializer};
use thiserror::Error;

use super::{classify_point_1d, sign, Degeneracy, Point1DClass};
use crate::expr::EvalError;
use crate::{System1D, Tolerances};

/// Codimension-one cases of the scalar problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Case1D {
    /// Saddle-node of equilibria: `η̇ = β + sη²`.
    A11,
    /// Fold of singularities: `(β + sη²) η̇ = 1`.
    A21,
    /// Transcritical singularity: `η η̇ = β + sη`.
    A300,
}

impl Case1D {
    pub fn label(self) -> &'static str {
        match self {
            Case1D::A11 => "A1.1",
            Case1D::A21 => "A2.1",
            Case1D::A300 => "A3.0,0",
        }
    }
}

impl Serialize for Case1D {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

/// Normal-form data: the sign `s` and the leading coefficient of `β(α)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalForm1D {
    pub case: Case1D,
    pub s: i8,
    pub dbeta_dalpha: f64,
    /// `g_x f_α − f_x g_α`; present for the transcritical case only.
    #[serde(rename = "A", skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormalFormError {
    #[error("point is {found:?}, not a {expected} point")]
    NotApplicable {
        expected: &'static str,
        found: Point1DClass,
    },
    /// The family does not cross the degeneracy transversally; the point is
    /// of codimension at least two in this family.
    #[error("transversality fails: {quantity} = {value} vanishes")]
    Transversality { quantity: &'static str, value: f64 },
    #[error("degenerate family: A = {value} vanishes")]
    Degenerate { value: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Saddle-node of equilibria. With `a = f_xx/(2g)` the coordinate change
/// `η = |a|(x − x0)` gives `η̇ = β + sη² + …`, so `dβ/dα = |a| f_α / g`.
pub fn normal_form_a11(
    sys: &System1D,
    x0: f64,
    alpha0: f64,
    tol: &Tolerances,
) -> Result<NormalForm1D, NormalFormError> {
    let class = classify_point_1d(sys, x0, alpha0, tol);
    if !matches!(
        class,
        Point1DClass::NonSimpleEquilibrium {
            m: Degeneracy::Order(1),
            ..
        }
    ) {
        return Err(NormalFormError::NotApplicable {
            expected: "A1.1",
            found: class,
        });
    }
    let (jf, jg) = sys.jets(x0, alpha0)?;
    let g = jg.value();
    if tol.is_small(jf.a()) {
        return Err(NormalFormError::Transversality {
            quantity: "f_alpha",
            value: jf.a(),
        });
    }
    let a = jf.xx() / (2.0 * g);
    Ok(NormalForm1D {
        case: Case1D::A11,
        s: sign(a),
        dbeta_dalpha: a.abs() * jf.a() / g,
        a: None,
    })
}

/// Fold of singularities. With `b = g_xx/(2f)` the change `η = |b|^{1/3}(x − x0)`
/// gives `(β + sη² + …) η̇ = 1` and `dβ/dα = (g_α/f) |b|^{-1/3}`.
pub fn normal_form_a21(
    sys: &System1D,
    x0: f64,
    alpha0: f64,
    tol: &Tolerances,
) -> Result<NormalForm1D, NormalFormError> {
    let class = classify_point_1d(sys, x0, alpha0, tol);
    if !matches!(
        class,
        Point1DClass::NonSimpleSingularity {
            n: Degeneracy::Order(1),
            ..
        }
    ) {
        return Err(NormalFormError::NotApplicable {
            expected: "A2.1",
            found: class,
        });
    }
    let (jf, jg) = sys.jets(x0, alpha0)?;
    let f = jf.value();
    if tol.is_small(jg.a()) {
        return Err(NormalFormError::Transversality {
            quantity: "g_alpha",
            value: jg.a(),
        });
    }
    let b = jg.xx() / (2.0 * f);
    Ok(NormalForm1D {
        case: Case1D::A21,
        s: sign(b),
        dbeta_dalpha: jg.a() / f * b.abs().powf(-1.0 / 3.0),
        a: None,
    })
}

/// Transcritical singularity: `s = sign(f_x/g_x)`, `A = g_x f_α − f_x g_α`,
/// `dβ/dα = A / f_x²`.
pub fn normal_form_a300(
    sys: &System1D,
    x0: f64,
    alpha0: f64,
    tol: &Tolerances,
) -> Result<NormalForm1D, NormalFormError> {
    let class = classify_point_1d(sys, x0, alpha0, tol);
    let expected = Point1DClass::SingularEquilibrium {
        m: Degeneracy::Order(0),
        n: Degeneracy::Order(0),
    };
    if class != expected {
        return Err(NormalFormError::NotApplicable {
            expected: "A3.0,0",
            found: class,
        });
    }
    let (jf, jg) = sys.jets(x0, alpha0)?;
    let a = jg.x() * jf.a() - jf.x() * jg.a();
    if tol.is_small(a) {
        return Err(NormalFormError::Degenerate { value: a });
    }
    Ok(NormalForm1D {
        case: Case1D::A300,
        s: sign(jf.x() / jg.x()),
        dbeta_dalpha: a / (jf.x() * jf.x()),
        a: Some(a),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn example_saddle_node() {
        let s = System1D::parse("x^2 + alpha", "x + 1").unwrap();
        let nf = normal_form_a11(&s, 0.0, 0.0, &tol()).unwrap();
        assert_eq!(nf.s, 1);
        assert_eq!(nf.dbeta_dalpha, 1.0);
    }

    #[test]
    fn already_normal_with_negative_sign() {
        let s = System1D::parse("-x^2 + alpha", "1").unwrap();
        let nf = normal_form_a11(&s, 0.0, 0.0, &tol()).unwrap();
        assert_eq!((nf.s, nf.dbeta_dalpha), (-1, 1.0));
    }

    #[test]
    fn example_singularity_fold() {
        let s = System1D::parse("x + 1", "x^2 + alpha").unwrap();
        let nf = normal_form_a21(&s, 0.0, 0.0, &tol()).unwrap();
        assert_eq!((nf.s, nf.dbeta_dalpha), (1, 1.0));
        let s = System1D::parse("1", "-x^2 + alpha").unwrap();
        assert_eq!(normal_form_a21(&s, 0.0, 0.0, &tol()).unwrap().s, -1);
    }

    #[test]
    fn parameter_free_fold_is_not_transversal() {
        let s = System1D::parse("1", "x^2").unwrap();
        assert!(matches!(
            normal_form_a21(&s, 0.0, 0.0, &tol()),
            Err(NormalFormError::Transversality {
                quantity: "g_alpha",
                ..
            })
        ));
    }

    #[test]
    fn transcritical_examples() {
        let s = System1D::parse("x - x^2 + 2*alpha", "x + x^2 + alpha").unwrap();
        let nf = normal_form_a300(&s, 0.0, 0.0, &tol()).unwrap();
        assert_eq!((nf.s, nf.a, nf.dbeta_dalpha), (1, Some(1.0), 1.0));
        let s = System1D::parse("x", "x - alpha").unwrap();
        let nf = normal_form_a300(&s, 0.0, 0.0, &tol()).unwrap();
        assert_eq!((nf.s, nf.a), (1, Some(1.0)));
        let s = System1D::parse("x", "x").unwrap();
        assert!(matches!(
            normal_form_a300(&s, 0.0, 0.0, &tol()),
            Err(NormalFormError::Degenerate { .. })
        ));
    }

    #[test]
    fn wrong_point_type_is_rejected() {
        let s = System1D::parse("x", "1").unwrap();
        assert!(matches!(
            normal_form_a11(&s, 0.0, 0.0, &tol()),
            Err(NormalFormError::NotApplicable { .. })
        ));
    }
}
