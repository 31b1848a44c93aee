use serde::Serialize;

use crate::classify2d::{a_eq, a_seq};
use crate::codes::EventCode;
use crate::expr::EvalError;
use crate::numeric::{det2, det3, trace2};
use crate::system::Jets2D;
use crate::System2D;

/// Jacobian determinants that govern the L3–L5 unfoldings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeltaSet {
    /// `det ∂(f1, f2)/∂(x, y)`
    pub delta1: f64,
    /// `det ∂(f1, g)/∂(x, y)`
    pub delta2: f64,
    /// `det ∂(g, g_x)/∂(y, α)`
    pub delta3: f64,
    /// `det ∂(f1, f2, g)/∂(x, y, α)`
    pub delta4: f64,
    /// `det ∂(f1, g, g_x)/∂(x, y, α)`
    pub delta5: f64,
}

impl DeltaSet {
    pub fn from_jets(j: &Jets2D) -> Self {
        let (f1, f2, g) = (&j.f1, &j.f2, &j.g);
        DeltaSet {
            delta1: f1.x() * f2.y() - f1.y() * f2.x(),
            delta2: f1.x() * g.y() - f1.y() * g.x(),
            delta3: g.y() * g.xa() - g.a() * g.xy(),
            delta4: det3(&[
                [f1.x(), f1.y(), f1.a()],
                [f2.x(), f2.y(), f2.a()],
                [g.x(), g.y(), g.a()],
            ]),
            delta5: det3(&[
                [f1.x(), f1.y(), f1.a()],
                [g.x(), g.y(), g.a()],
                [g.xx(), g.xy(), g.xa()],
            ]),
        }
    }
}

pub fn delta_set(sys: &System2D, p: [f64; 2], alpha: f64) -> Result<DeltaSet, EvalError> {
    Ok(DeltaSet::from_jets(&sys.jets(p, alpha)?))
}

/// Which defining equations a candidate satisfies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Candidate {
    /// `f1 = f2 = 0`
    Equilibrium,
    /// `f1 = g = 0`
    SingularEquilibrium,
    /// `g = g_x = 0`
    Fold,
    /// `g_x = g_y = 0`
    Critical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestValue {
    pub code: EventCode,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TestError {
    #[error("the point does not satisfy the defining equations of the candidate (residual {0:e})")]
    Mismatch(f64),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Scalar test functions whose zeros mark the codimension-one events a
/// candidate can undergo. Gated tests (Hopf-type) are omitted when the gate
/// fails.
pub fn test_functions(
    sys: &System2D,
    p: [f64; 2],
    alpha: f64,
    candidate: Candidate,
) -> Result<Vec<TestValue>, TestError> {
    let j = sys.jets_upto(p, alpha, 2)?;
    let (f1, f2, g) = (j.f1.value(), j.f2.value(), j.g.value());
    let residual = match candidate {
        Candidate::Equilibrium => f1.abs().max(f2.abs()),
        Candidate::SingularEquilibrium => f1.abs().max(g.abs()),
        Candidate::Fold => g.abs().max(j.g.x().abs()),
        Candidate::Critical => j.g.x().abs().max(j.g.y().abs()),
    };
    if !(residual <= 1e-6) {
        return Err(TestError::Mismatch(residual));
    }
    let t = |code, value| TestValue { code, value };
    Ok(match candidate {
        Candidate::Equilibrium => {
            let a = a_eq(&j);
            let mut v = vec![t(EventCode::L1, det2(&a))];
            if det2(&a) > 0.0 {
                v.push(t(EventCode::L7, trace2(&a)));
            }
            v
        }
        Candidate::SingularEquilibrium => {
            let a = a_seq(&j);
            let (tr, det) = (trace2(&a), det2(&a));
            let d2 = j.f1.x() * j.g.y() - j.f1.y() * j.g.x();
            let mut v = vec![
                t(EventCode::L2, d2),
                t(EventCode::L3, f2),
                t(EventCode::L5, j.g.x()),
                t(EventCode::L6, tr * tr - 4.0 * det),
            ];
            if det > 0.0 {
                v.push(t(EventCode::L8, tr));
            }
            v
        }
        Candidate::Fold => vec![t(EventCode::L4, j.g.xx()), t(EventCode::L5, f1)],
        Candidate::Critical => {
            let hess = j.g.xx() * j.g.yy() - j.g.xy() * j.g.xy();
            let code = if hess < 0.0 {
                EventCode::T1
            } else {
                EventCode::T2
            };
            vec![t(code, g)]
        }
    })
}
