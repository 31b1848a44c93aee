//! Cycle folds along the family, for a user-seeded cycle.

use rayon::prelude::*;
use serde::Serialize;

use crate::classify2d::BBox;
use crate::codes::EventCode;
use crate::desing::{
    find_limit_cycle, CycleKind, CycleOptions, CycleRecord, DesingularizedField, Section,
};
use crate::genericity::{all_pass, GenericityCheck};
use crate::{System2D, Tolerances};

use super::{BifurcationEvent, Unfolding};

/// Starting data for following a cycle through the family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CycleSeed {
    pub seed: [f64; 2],
    /// Defaults to a segment through `seed` across the field.
    pub section: Option<Section>,
}

fn describe(c: &Option<CycleRecord>) -> String {
    match c {
        Some(c) => format!(
            "{} limit cycle through the section (multiplier {:.6e})",
            match c.kind {
                CycleKind::Regular => "regular",
                CycleKind::Folded => "folded",
            },
            c.mu
        ),
        None => "no limit cycle through the section".into(),
    }
}

/// Bisection on cycle existence, refined until the bracket is below `1e-7`.
/// Near a cycle fold the return map flattens, so the boundary is only
/// resolved to about `1e-6` in practice.
fn refine(
    find: &(dyn Fn(f64) -> Option<CycleRecord> + Sync),
    mut lo: (f64, Option<CycleRecord>),
    mut hi: (f64, Option<CycleRecord>),
) -> ((f64, Option<CycleRecord>), (f64, Option<CycleRecord>)) {
    while hi.0 - lo.0 > 1e-7 {
        let mid = 0.5 * (lo.0 + hi.0);
        let c = find(mid);
        if c.is_some() == lo.1.is_some() {
            lo = (mid, c);
        } else {
            hi = (mid, c);
        }
    }
    (lo, hi)
}

pub(super) fn scan_cycles(
    sys: &System2D,
    alphas: &[f64],
    seed: &CycleSeed,
    bbox: &BBox,
) -> (Vec<BifurcationEvent>, Vec<String>) {
    let field = DesingularizedField::new(sys);
    let mid = alphas[alphas.len() / 2];
    let Some(section) = seed
        .section
        .or_else(|| Section::across(&field, seed.seed, mid, 0.1 * bbox.diag()))
    else {
        return (
            Vec::new(),
            vec!["no section could be placed through the cycle seed".into()],
        );
    };
    let opts = CycleOptions::default();
    let find = |alpha: f64| find_limit_cycle(&field, alpha, seed.seed, section, &opts).ok();
    let found: Vec<Option<CycleRecord>> = alphas.par_iter().map(|&a| find(a)).collect();

    let tol = Tolerances::default();
    let mut events = Vec::new();
    for k in 0..alphas.len().saturating_sub(1) {
        let (c0, c1) = (&found[k], &found[k + 1]);
        if c0.is_some() == c1.is_some() {
            continue;
        }
        let ((la, lc), (ha, hc)) =
            refine(&find, (alphas[k], c0.clone()), (alphas[k + 1], c1.clone()));
        let (alpha_star, cyc) = match (&lc, &hc) {
            (Some(c), _) => (la, c.clone()),
            (_, Some(c)) => (ha, c.clone()),
            _ => continue,
        };
        let margin = cyc
            .transversality_margins
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        let genericity = if cyc.kind == CycleKind::Folded {
            vec![GenericityCheck::positive(
                "min |f1 g_x| at Sigma crossings",
                margin,
                &tol,
            )]
        } else {
            Vec::new()
        };
        events.push(BifurcationEvent {
            code: EventCode::L9,
            alpha_star,
            location: cyc.fixed_point,
            deltas: None,
            generic: all_pass(&genericity),
            genericity,
            test_value: Some(cyc.mu - 1.0),
            unfolding: Some(Unfolding { below: describe(&found[k]), above: describe(&found[k + 1]), detail: None }),
            notes: vec![format!(
                "cycle existence changes between alpha = {la} and {ha}; period {:.6} at the boundary",
                cyc.period
            )],
        });
    }
    (events, Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bif_scan::{scan_parameter, ScanOptions};

    #[test]
    fn saddle_node_of_cycles() {
        let s = System2D::parse(
            "-y + x*(alpha - (x^2 + y^2 - 1)^2)",
            "x + y*(alpha - (x^2 + y^2 - 1)^2)",
            "1",
        )
        .unwrap();
        let opts = ScanOptions {
            cycle: Some(CycleSeed {
                seed: [1.0, 0.0],
                section: Some(Section {
                    a: [0.5, 0.0],
                    b: [1.5, 0.0],
                }),
            }),
            fold_connections: false,
            ..ScanOptions::default()
        };
        let r = scan_parameter(&s, (-0.05, 0.05), 11, &BBox::square(2.0), &opts);
        let l9: Vec<_> = r
            .events
            .iter()
            .filter(|e| e.code == EventCode::L9)
            .collect();
        assert_eq!(l9.len(), 1, "{:#?}", r.events);
        assert!(l9[0].alpha_star.abs() < 1e-5, "{}", l9[0].alpha_star);
        assert!(l9[0].test_value.unwrap().abs() < 1e-2);
        assert!(l9[0]
            .unfolding
            .as_ref()
            .unwrap()
            .below
            .starts_with("no limit cycle"));
    }
}
