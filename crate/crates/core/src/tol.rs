use serde::Serialize;

/// Zero thresholds used by the sign-based classification tests.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    /// Residual threshold: `|f| ≤ zero` counts as a zero of `f`.
    pub zero: f64,
    /// Threshold for derivative and determinant conditions.
    pub deriv: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            zero: 1e-9,
            deriv: 1e-7,
        }
    }
}

impl Tolerances {
    /// Residual threshold `zero`, derivative threshold scaled to keep the default ratio.
    pub fn from_zero(zero: f64) -> Self {
        Tolerances {
            zero,
            deriv: zero * 100.0,
        }
    }

    /// Defaults, overridden by `DAE_SINGULAR_TOL` when it holds a positive number.
    pub fn from_env() -> Self {
        std::env::var("DAE_SINGULAR_TOL")
            .ok()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .filter(|v| v.is_finite() && *v > 0.0)
            .map_or_else(Self::default, Self::from_zero)
    }

    pub fn is_zero(&self, v: f64) -> bool {
        v.abs() <= self.zero
    }

    pub fn is_small(&self, v: f64) -> bool {
        v.abs() <= self.deriv
    }
}
