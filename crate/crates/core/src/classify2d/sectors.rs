//! Sector decomposition around folded nodes and folded saddles.
//!
//! Eigenvectors `v` of `A_sEQ` are oriented so that `∇g·v > 0`, which puts
//! `+v` on Σ+ and `−v` on Σ−. The four quadrants they bound are labeled by the
//! sign pattern of a direction's coordinates in the eigenbasis. The quadrants
//! with mixed signs straddle Σ: the linear flow carries their orbits from one
//! side to the other, so in the original system they either reach Σ in finite
//! time (incoming) or leave it (outgoing).

use serde::Serialize;

use crate::numeric::{eig2, solve, Eigen2};
use crate::{System2D, Tolerances};

use super::{a_seq, classify_jets_2d, Point2DClass, Side, SingularKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SectorLabel {
    Incoming,
    Stable,
    Outgoing,
    Unstable,
    Saddle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RayKind {
    /// Eigendirection, with the index into `eigenvalues`.
    Eigen(usize),
    SigmaTangent,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ray {
    pub dir: [f64; 2],
    /// Polar angle in `[0, 2π)`.
    pub angle: f64,
    pub kind: RayKind,
}

/// Open angular sector from `start` to `end`, counter-clockwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Sector {
    pub start: f64,
    pub end: f64,
    pub label: SectorLabel,
    /// `None` when the sector straddles Σ.
    pub side: Option<Side>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SectorDecomposition {
    pub center: [f64; 2],
    pub kind: SingularKind,
    /// Eigenvalues of `A_sEQ`, ascending.
    pub eigenvalues: [f64; 2],
    /// Unit eigenvectors, oriented into Σ+.
    pub eigen_directions: [[f64; 2]; 2],
    /// Counter-clockwise, starting from the smallest angle.
    pub sectors: Vec<Sector>,
    pub rays: Vec<Ray>,
    /// Smallest `|det[v, T]|` over both eigendirections, `T` the unit Σ tangent.
    pub transversality_margin: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SectorError {
    #[error("folded focus: orbits spiral through Σ, so there are no sectors")]
    NoSectors,
    #[error("not a simple folded node or folded saddle: {0:?}")]
    NotApplicable(Point2DClass),
    #[error("could not evaluate the system at the point")]
    Eval,
}

fn angle(v: [f64; 2]) -> f64 {
    let a = v[1].atan2(v[0]);
    if a < 0.0 {
        a + std::f64::consts::TAU
    } else {
        a
    }
}

fn unit(v: [f64; 2]) -> [f64; 2] {
    let n = v[0].hypot(v[1]);
    [v[0] / n, v[1] / n]
}

/// Label of a quadrant from the signs of the coordinates of a direction inside it.
///
/// `first` is the strong direction of a node or the stable direction of a
/// saddle. `stable` says whether the desingularized node attracts.
fn quadrant_label(kind: SingularKind, stable: bool, first: f64, second: f64) -> SectorLabel {
    use SectorLabel::*;
    let (a, b) = (first > 0.0, second > 0.0);
    match kind {
        SingularKind::FoldedSaddle => match (a, b) {
            (true, true) | (false, false) => Saddle,
            (true, false) => Incoming,
            (false, true) => Outgoing,
        },
        _ => {
            let l = match (a, b) {
                (true, true) => Stable,
                (false, false) => Unstable,
                (true, false) => Incoming,
                (false, true) => Outgoing,
            };
            if stable {
                l
            } else {
                match l {
                    Stable => Unstable,
                    Unstable => Stable,
                    Incoming => Outgoing,
                    Outgoing => Incoming,
                    Saddle => Saddle,
                }
            }
        }
    }
}

/// Sectors around the singular equilibrium `p`.
pub fn sector_decomposition(
    sys: &System2D,
    p: [f64; 2],
    alpha: f64,
    tol: &Tolerances,
) -> Result<SectorDecomposition, SectorError> {
    let j = sys.jets_upto(p, alpha, 2).map_err(|_| SectorError::Eval)?;
    let kind = match classify_jets_2d(&j, tol) {
        Point2DClass::SingularEquilibrium {
            kind: SingularKind::FoldedFocus,
            ..
        } => return Err(SectorError::NoSectors),
        Point2DClass::SingularEquilibrium {
            kind, simple: true, ..
        } => kind,
        other => return Err(SectorError::NotApplicable(other)),
    };
    let Eigen2::Real { values, vectors } = eig2(&a_seq(&j)) else {
        return Err(SectorError::NoSectors);
    };
    let grad = [j.g.x(), j.g.y()];
    let tangent = unit([grad[1], -grad[0]]);
    let mut dirs = vectors;
    for v in dirs.iter_mut() {
        if grad[0] * v[0] + grad[1] * v[1] < 0.0 {
            *v = [-v[0], -v[1]];
        }
    }
    let margin = dirs
        .iter()
        .map(|v| (v[0] * tangent[1] - v[1] * tangent[0]).abs())
        .fold(f64::INFINITY, f64::min);

    // Basis order: strong then weak for a node, stable then unstable for a saddle.
    let (first, second) = match kind {
        SingularKind::FoldedSaddle => (0, 1),
        _ if values[0].abs() >= values[1].abs() => (0, 1),
        _ => (1, 0),
    };
    let stable = values[1] < 0.0;
    let basis = [
        [dirs[first][0], dirs[second][0]],
        [dirs[first][1], dirs[second][1]],
    ];

    let mut rays: Vec<Ray> = Vec::with_capacity(6);
    for (i, v) in dirs.iter().enumerate() {
        for s in [1.0, -1.0] {
            let dir = [s * v[0], s * v[1]];
            rays.push(Ray {
                dir,
                angle: angle(dir),
                kind: RayKind::Eigen(i),
            });
        }
    }
    for s in [1.0, -1.0] {
        let dir = [s * tangent[0], s * tangent[1]];
        rays.push(Ray {
            dir,
            angle: angle(dir),
            kind: RayKind::SigmaTangent,
        });
    }
    rays.sort_by(|a, b| a.angle.total_cmp(&b.angle));

    let mut sectors: Vec<Sector> = Vec::with_capacity(6);
    for (k, r) in rays.iter().enumerate() {
        let next = rays[(k + 1) % rays.len()];
        let mut end = next.angle;
        if end <= r.angle {
            end += std::f64::consts::TAU;
        }
        let mid_angle = 0.5 * (r.angle + end);
        let mid = [mid_angle.cos(), mid_angle.sin()];
        let c = solve(basis, mid).ok_or(SectorError::Eval)?;
        let label = quadrant_label(kind, stable, c[0], c[1]);
        let side = Side::of(grad[0] * mid[0] + grad[1] * mid[1]);
        sectors.push(Sector {
            start: r.angle,
            end: end % std::f64::consts::TAU,
            label,
            side: Some(side),
        });
    }
    if kind == SingularKind::FoldedNode {
        // A node's mixed quadrants are single sectors cut by Σ; join the halves.
        let mut merged: Vec<Sector> = Vec::with_capacity(4);
        for s in sectors {
            match merged.last_mut() {
                Some(last) if last.label == s.label => {
                    last.end = s.end;
                    last.side = None;
                }
                _ => merged.push(s),
            }
        }
        if merged.len() > 1 && merged[0].label == merged[merged.len() - 1].label {
            let last = merged.pop().unwrap();
            merged[0].start = last.start;
            merged[0].side = None;
        }
        sectors = merged;
    }
    sectors.sort_by(|a, b| a.start.total_cmp(&b.start));

    Ok(SectorDecomposition {
        center: p,
        kind,
        eigenvalues: values,
        eigen_directions: dirs,
        sectors,
        rays,
        transversality_margin: margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(d: &SectorDecomposition) -> Vec<SectorLabel> {
        d.sectors.iter().map(|s| s.label).collect()
    }

    #[test]
    fn folded_saddle_has_three_sectors_per_side() {
        let s = System2D::parse("y - x + alpha", "y", "x - x^3").unwrap();
        let d = sector_decomposition(&s, [0.0, 0.01], -0.01, &Tolerances::default()).unwrap();
        assert_eq!(d.kind, SingularKind::FoldedSaddle);
        assert_eq!(d.sectors.len(), 6);
        for side in [Side::Plus, Side::Minus] {
            let mut l: Vec<_> = d
                .sectors
                .iter()
                .filter(|s| s.side == Some(side))
                .map(|s| s.label)
                .collect();
            l.sort_by_key(|l| *l as u8);
            assert_eq!(
                l,
                vec![
                    SectorLabel::Incoming,
                    SectorLabel::Outgoing,
                    SectorLabel::Saddle
                ]
            );
        }
        assert!(d.transversality_margin > 1e-3);
    }

    #[test]
    fn folded_node_has_four_sectors() {
        let s = System2D::parse("y - x + alpha", "y", "x - x^3").unwrap();
        let d = sector_decomposition(&s, [0.0, -0.01], 0.01, &Tolerances::default()).unwrap();
        assert_eq!(d.kind, SingularKind::FoldedNode);
        let mut l = labels(&d);
        l.sort_by_key(|l| *l as u8);
        assert_eq!(
            l,
            vec![
                SectorLabel::Incoming,
                SectorLabel::Stable,
                SectorLabel::Outgoing,
                SectorLabel::Unstable
            ]
        );
        // Incoming and outgoing alternate with stable and unstable.
        let l = labels(&d);
        for k in 0..4 {
            let pair = [l[k], l[(k + 1) % 4]];
            assert!(pair.contains(&SectorLabel::Incoming) || pair.contains(&SectorLabel::Outgoing));
        }
    }

    #[test]
    fn folded_focus_has_none() {
        // A_sEQ = [[-0.5, 1], [-1, 0]] at the origin.
        let s = System2D::parse("y - 0.5*x", "-1", "x").unwrap();
        assert_eq!(
            sector_decomposition(&s, [0.0, 0.0], 0.0, &Tolerances::default()),
            Err(SectorError::NoSectors)
        );
    }

    #[test]
    fn regular_points_are_rejected() {
        let s = System2D::parse("y", "-1", "x").unwrap();
        assert!(matches!(
            sector_decomposition(&s, [1.0, 0.0], 0.0, &Tolerances::default()),
            Err(SectorError::NotApplicable(_))
        ));
    }
}
