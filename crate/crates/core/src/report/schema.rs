//! Per-code report schema and a one-line text renderer for events.

use serde::Serialize;

use crate::bif_scan::BifurcationEvent;
use crate::codes::EventCode;

/// What a report carries for one event code.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventSchema {
    pub code: &'static str,
    pub description: &'static str,
    /// Names of the genericity conditions, in report order.
    pub genericity: &'static [&'static str],
    /// The event carries a `DeltaSet`.
    pub deltas: bool,
    /// The unfolding carries a quantitative prediction.
    pub prediction: bool,
}

pub fn event_schema(code: EventCode) -> EventSchema {
    let s = |description, genericity, deltas, prediction| EventSchema {
        code: code.label(),
        description,
        genericity,
        deltas,
        prediction,
    };
    match code {
        EventCode::T1 => s(
            "hyperbolic change of Sigma at a saddle of g",
            &["det D2g", "g_alpha"],
            false,
            false,
        ),
        EventCode::T2 => s(
            "birth or death of a Sigma loop at an extremum of g",
            &["det D2g", "g_alpha"],
            false,
            false,
        ),
        EventCode::L1 => s(
            "equilibrium with a zero eigenvalue",
            &["tr A_EQ"],
            false,
            false,
        ),
        EventCode::L2 => s(
            "singular equilibrium with a zero eigenvalue",
            &["tr A_sEQ"],
            false,
            false,
        ),
        EventCode::L3 => s(
            "equilibrium crossing Sigma through a singular equilibrium",
            &["f1x", "g_x", "Delta1", "Delta2", "Delta4"],
            true,
            true,
        ),
        EventCode::L4 => s(
            "fold with g_xx = 0",
            &["f1", "g_y", "g_xxx", "Delta3"],
            true,
            true,
        ),
        EventCode::L5 => s(
            "fold meeting a singular equilibrium",
            &["g_y", "g_xx", "Delta2", "Delta3", "Delta5"],
            true,
            true,
        ),
        EventCode::L6 => s(
            "folded node turning into a folded focus",
            &["f2", "tr A_sEQ"],
            false,
            false,
        ),
        EventCode::L7 => s(
            "equilibrium with purely imaginary eigenvalues",
            &["det A_EQ"],
            false,
            false,
        ),
        EventCode::L8 => s(
            "singular equilibrium with purely imaginary eigenvalues",
            &["det A_sEQ"],
            false,
            false,
        ),
        EventCode::L9 => s(
            "limit cycle with multiplier one",
            &["min |f1 g_x| at Sigma crossings"],
            false,
            false,
        ),
        EventCode::G6 => s(
            "orbit connecting two folds",
            &[
                "f1 at first fold",
                "f1 at second fold",
                "d(measure)/d(alpha)",
            ],
            false,
            false,
        ),
    }
}

/// `L3 at alpha* = 0 (x, y) = (0, 0), generic`.
pub fn render_event(e: &BifurcationEvent) -> String {
    let mut s = format!(
        "{} at alpha* = {:e} (x, y) = ({:e}, {:e}), {}",
        e.code,
        e.alpha_star,
        e.location[0],
        e.location[1],
        if e.generic { "generic" } else { "non-generic" }
    );
    if let Some(u) = &e.unfolding {
        s.push_str(&format!("; below: {}; above: {}", u.below, u.above));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_code_has_a_schema_entry() {
        for c in EventCode::ALL {
            let s = event_schema(c);
            assert_eq!(s.code, c.label());
            assert!(!s.description.is_empty());
        }
    }
}
