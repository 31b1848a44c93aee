use std::fmt;

use serde::{Serialize, Serializer};

/// Codimension-one bifurcation codes of the planar problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EventCode {
    /// Σ changes through a saddle point of `g` (hyperbolic).
    T1,
    /// Σ is born or dies at an extremum of `g` (elliptic).
    T2,
    /// Equilibrium with a zero eigenvalue.
    L1,
    /// Singular equilibrium with `det ∂(f1,g)/∂(x,y) = 0`.
    L2,
    /// Equilibrium crossing Σ through a singular equilibrium.
    L3,
    /// Fold with `g_xx = 0`.
    L4,
    /// Fold coinciding with a singular equilibrium.
    L5,
    /// Folded node turning into a folded focus.
    L6,
    /// Equilibrium with purely imaginary eigenvalues.
    L7,
    /// Singular equilibrium with purely imaginary eigenvalues.
    L8,
    /// Cycle with multiplier one.
    L9,
    /// Orbit connecting two folds.
    G6,
}

impl EventCode {
    pub const ALL: [EventCode; 12] = [
        EventCode::T1,
        EventCode::T2,
        EventCode::L1,
        EventCode::L2,
        EventCode::L3,
        EventCode::L4,
        EventCode::L5,
        EventCode::L6,
        EventCode::L7,
        EventCode::L8,
        EventCode::L9,
        EventCode::G6,
    ];

    pub fn label(self) -> &'static str {
        match self {
            EventCode::T1 => "T1",
            EventCode::T2 => "T2",
            EventCode::L1 => "L1",
            EventCode::L2 => "L2",
            EventCode::L3 => "L3",
            EventCode::L4 => "L4",
            EventCode::L5 => "L5",
            EventCode::L6 => "L6",
            EventCode::L7 => "L7",
            EventCode::L8 => "L8",
            EventCode::L9 => "L9",
            EventCode::G6 => "G6-fold-fold",
        }
    }
}

impl fmt::Display for EventCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Serialize for EventCode {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}
