//! Static SVG phase portraits.
//!
//! Output depends only on the inputs: coordinates are printed with a fixed
//! number of decimals and elements are emitted in a fixed order.

use std::fmt::Write as _;

use crate::classify1d::{find_special_points_1d, Orientation as Orientation1D, Point1DClass};
use crate::classify2d::{
    find_points_2d, sector_decomposition, trace_sigma, ArcLabel, BBox, EquilibriumKind,
    Point2DClass, SectorLabel, SingularKind, Stability, TraceOptions,
};
use crate::desing::{
    integrate_desing, split_to_dae_orbits, DesingOptions, DesingularizedField, OrbitPiece,
    PieceEnd, TimeChange,
};
use crate::{System1D, System2D, Tolerances};

const PLOT: f64 = 600.0;
const MARGIN: f64 = 20.0;
const LEGEND: f64 = 220.0;

const INCOMING: &str = "#1f77b4";
const OUTGOING: &str = "#d62728";
const NEUTRAL: &str = "#7f7f7f";
const ORBIT: &str = "#333333";

struct Frame {
    bbox: BBox,
}

impl Frame {
    fn x(&self, x: f64) -> f64 {
        MARGIN + (x - self.bbox.x0) / self.bbox.width() * PLOT
    }
    fn y(&self, y: f64) -> f64 {
        MARGIN + (self.bbox.y1 - y) / self.bbox.height() * PLOT
    }
    fn pt(&self, p: [f64; 2]) -> (f64, f64) {
        (self.x(p[0]), self.y(p[1]))
    }
}

fn header(out: &mut String, title: &str) {
    let w = PLOT + 2.0 * MARGIN + LEGEND;
    let h = PLOT + 2.0 * MARGIN;
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{h:.0}" viewBox="0 0 {w:.0} {h:.0}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(out, "<title>{}</title>", escape(title));
    out.push_str(
        r##"<defs>
<marker id="arrow" viewBox="0 0 10 10" refX="5" refY="5" markerWidth="7" markerHeight="7" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="#333333"/></marker>
<marker id="arrow2" viewBox="0 0 20 10" refX="18" refY="5" markerWidth="14" markerHeight="7" orient="auto"><path d="M0,0 L10,5 L0,10 z M8,0 L18,5 L8,10 z" fill="#333333"/></marker>
</defs>
"##,
    );
    let _ = writeln!(
        out,
        r##"<rect x="0" y="0" width="{w:.0}" height="{h:.0}" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        out,
        r##"<rect x="{MARGIN}" y="{MARGIN}" width="{PLOT}" height="{PLOT}" fill="none" stroke="#cccccc"/>"##
    );
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

fn legend(out: &mut String, rows: &[(&str, &str)]) {
    let x = PLOT + 2.0 * MARGIN + 10.0;
    let _ = writeln!(
        out,
        r#"<g id="legend" transform="translate({x:.0},{MARGIN})">"#
    );
    for (i, (glyph, text)) in rows.iter().enumerate() {
        let y = 14.0 + 20.0 * i as f64;
        let _ = writeln!(out, r#"<g transform="translate(10,{y:.0})">{glyph}</g>"#);
        let _ = writeln!(
            out,
            r#"<text x="26" y="{:.0}">{}</text>"#,
            y + 4.0,
            escape(text)
        );
    }
    out.push_str("</g>\n");
}

fn arc_color(l: ArcLabel) -> &'static str {
    match l {
        ArcLabel::Incoming => INCOMING,
        ArcLabel::Outgoing => OUTGOING,
        ArcLabel::Neutral => NEUTRAL,
    }
}

/// Glyph centred on the origin.
fn glyph_2d(class: &Point2DClass) -> String {
    match class {
        Point2DClass::Equilibrium {
            kind: EquilibriumKind::Saddle,
            ..
        } => r##"<path d="M-5,-5 L5,5 M-5,5 L5,-5" stroke="#000000" stroke-width="2"/>"##.into(),
        Point2DClass::Equilibrium {
            kind, stability, ..
        } => {
            let fill = if *stability == Stability::Stable {
                "#000000"
            } else {
                "#ffffff"
            };
            match kind {
                EquilibriumKind::Focus => {
                    format!(
                        r##"<rect x="-5" y="-5" width="10" height="10" fill="{fill}" stroke="#000000"/>"##
                    )
                }
                _ => format!(r##"<circle r="5" fill="{fill}" stroke="#000000"/>"##),
            }
        }
        Point2DClass::SingularEquilibrium { kind, .. } => {
            let fill = match kind {
                SingularKind::FoldedNode => "#2ca02c",
                SingularKind::FoldedSaddle => "#ff7f0e",
                SingularKind::FoldedFocus => "#9467bd",
            };
            format!(r##"<path d="M0,-6 L6,0 L0,6 L-6,0 z" fill="{fill}" stroke="#000000"/>"##)
        }
        Point2DClass::Fold { .. } => {
            r##"<path d="M0,-6 L5,4 L-5,4 z" fill="#ffd700" stroke="#000000"/>"##.into()
        }
        Point2DClass::DegeneratePoint { .. } => {
            r##"<circle r="6" fill="none" stroke="#e377c2" stroke-width="2"/>"##.into()
        }
        Point2DClass::Regular => String::new(),
    }
}

fn sector_color(l: SectorLabel) -> &'static str {
    match l {
        SectorLabel::Incoming => INCOMING,
        SectorLabel::Outgoing => OUTGOING,
        SectorLabel::Stable => "#2ca02c",
        SectorLabel::Unstable => "#ff7f0e",
        SectorLabel::Saddle => "#8c564b",
    }
}

fn sector_letter(l: SectorLabel) -> &'static str {
    match l {
        SectorLabel::Incoming => "I",
        SectorLabel::Outgoing => "O",
        SectorLabel::Stable => "S",
        SectorLabel::Unstable => "U",
        SectorLabel::Saddle => "H",
    }
}

fn polyline(out: &mut String, frame: &Frame, pts: &[[f64; 2]], attrs: &str) {
    if pts.len() < 2 {
        return;
    }
    out.push_str("<polyline points=\"");
    for (i, p) in pts.iter().enumerate() {
        let (x, y) = frame.pt(*p);
        if i > 0 {
            out.push(' ');
        }
        let _ = write!(out, "{x:.2},{y:.2}");
    }
    let _ = writeln!(out, "\" fill=\"none\" {attrs}/>");
}

fn is_sigma_end(e: &PieceEnd) -> bool {
    matches!(
        e,
        PieceEnd::SigmaCrossing { .. } | PieceEnd::FoldTangency { .. }
    )
}

fn draw_piece(out: &mut String, frame: &Frame, piece: &OrbitPiece) {
    let (Some(first), Some(last)) = (piece.points.first(), piece.points.last()) else {
        return;
    };
    // Points are stored in desingularized order; DAE time decides the arrows.
    let forward = last.0 >= first.0;
    let mut pts: Vec<[f64; 2]> = piece.points.iter().map(|(_, p)| *p).collect();
    let (arrival, _) = if forward {
        (&piece.end, &piece.start)
    } else {
        (&piece.start, &piece.end)
    };
    if !forward {
        pts.reverse();
    }
    pts.retain(|p| frame.bbox.contains(*p));
    if pts.len() < 2 {
        return;
    }
    let end_marker = if is_sigma_end(arrival) {
        r#" marker-end="url(#arrow2)""#
    } else {
        ""
    };
    polyline(
        out,
        frame,
        &pts,
        &format!(r#"stroke="{ORBIT}" stroke-width="1"{end_marker}"#),
    );
    // Direction arrow at the middle of the piece.
    let k = pts.len() / 2;
    if k >= 1 {
        let (a, b) = (frame.pt(pts[k - 1]), frame.pt(pts[k]));
        if (a.0 - b.0).hypot(a.1 - b.1) > 1e-3 {
            let _ = writeln!(
                out,
                r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#333333" marker-end="url(#arrow)"/>"##,
                a.0, a.1, b.0, b.1
            );
        }
    }
}

fn default_seeds(bbox: &BBox) -> Vec<[f64; 2]> {
    let mut s = Vec::new();
    for i in 1..=3 {
        for j in 1..=3 {
            s.push([
                bbox.x0 + bbox.width() * i as f64 / 4.0,
                bbox.y0 + bbox.height() * j as f64 / 4.0,
            ]);
        }
    }
    s
}

/// Planar portrait: Σ arcs coloured by label, special points, sector rays
/// at singular equilibria, and DAE orbit pieces through the seeds. With no
/// seeds a 3×3 grid of seeds is used.
pub fn portrait_2d(
    sys: &System2D,
    alpha: f64,
    bbox: &BBox,
    seeds: &[[f64; 2]],
    tol: &Tolerances,
) -> String {
    let frame = Frame { bbox: *bbox };
    let mut out = String::new();
    header(&mut out, &format!("{} at alpha = {alpha}", sys.name));
    let _ = writeln!(
        out,
        r#"<clipPath id="plot"><rect x="{MARGIN}" y="{MARGIN}" width="{PLOT}" height="{PLOT}"/></clipPath>"#
    );

    out.push_str("<g id=\"orbits\" clip-path=\"url(#plot)\">\n");
    let field = DesingularizedField::new(sys);
    let opts = DesingOptions {
        bbox: Some(*bbox),
        dense_per_step: 2,
        ..DesingOptions::default()
    };
    let seeds = if seeds.is_empty() {
        default_seeds(bbox)
    } else {
        seeds.to_vec()
    };
    let tau = 20.0 * bbox.diag();
    for s in &seeds {
        for dir in [1.0, -1.0] {
            let orbit = integrate_desing(&field, *s, alpha, dir * tau, &opts);
            for piece in split_to_dae_orbits(&orbit, TimeChange::Standard) {
                draw_piece(&mut out, &frame, &piece);
            }
        }
    }
    out.push_str("</g>\n");

    out.push_str("<g id=\"sigma\" clip-path=\"url(#plot)\">\n");
    let curve = trace_sigma(sys, alpha, bbox, &TraceOptions::default());
    for line in &curve.polylines {
        let mut verts = line.vertices.clone();
        if line.closed {
            if let Some(v) = verts.first().cloned() {
                verts.push(v);
            }
        }
        // One polyline per run of equal labels.
        let mut start = 0;
        for i in 1..=verts.len() {
            if i == verts.len() || verts[i].label != verts[start].label {
                let end = i.min(verts.len() - 1);
                let pts: Vec<[f64; 2]> = verts[start..=end].iter().map(|v| v.p).collect();
                polyline(
                    &mut out,
                    &frame,
                    &pts,
                    &format!(
                        r#"stroke="{}" stroke-width="3""#,
                        arc_color(verts[start].label)
                    ),
                );
                start = i;
            }
        }
    }
    out.push_str("</g>\n");

    let points = find_points_2d(sys, alpha, bbox, 32, tol);
    out.push_str("<g id=\"sectors\">\n");
    let ray = 0.04 * PLOT;
    for p in &points.points {
        let Ok(dec) = sector_decomposition(sys, p.p, alpha, tol) else {
            continue;
        };
        let (cx, cy) = frame.pt(p.p);
        for r in &dec.rays {
            let _ = writeln!(
                out,
                r##"<line x1="{cx:.2}" y1="{cy:.2}" x2="{:.2}" y2="{:.2}" stroke="#555555" stroke-dasharray="3,2"/>"##,
                cx + ray * r.angle.cos(),
                cy - ray * r.angle.sin()
            );
        }
        for s in &dec.sectors {
            let mut mid = 0.5 * (s.start + s.end);
            if s.end < s.start {
                mid += std::f64::consts::PI;
            }
            let _ = writeln!(
                out,
                r#"<text x="{:.2}" y="{:.2}" fill="{}" font-size="9" text-anchor="middle">{}</text>"#,
                cx + 0.8 * ray * mid.cos(),
                cy - 0.8 * ray * mid.sin() + 3.0,
                sector_color(s.label),
                sector_letter(s.label)
            );
        }
    }
    out.push_str("</g>\n");

    out.push_str("<g id=\"points\">\n");
    for p in &points.points {
        let (x, y) = frame.pt(p.p);
        let _ = writeln!(
            out,
            r#"<g transform="translate({x:.2},{y:.2})">{}</g>"#,
            glyph_2d(&p.class)
        );
    }
    out.push_str("</g>\n");

    let eq = |k, s| {
        glyph_2d(&Point2DClass::Equilibrium {
            eigs: Default::default(),
            kind: k,
            stability: s,
            side: crate::classify2d::Side::Plus,
            desing_stability: s,
        })
    };
    let seq = |k| {
        glyph_2d(&Point2DClass::SingularEquilibrium {
            eigs: Default::default(),
            kind: k,
            simple: true,
            desing_stability: Stability::Stable,
        })
    };
    let line =
        |c: &str| format!(r#"<line x1="-8" y1="0" x2="8" y2="0" stroke="{c}" stroke-width="3"/>"#);
    let rows = [
        (line(INCOMING), "Sigma, incoming arc"),
        (line(OUTGOING), "Sigma, outgoing arc"),
        (line(NEUTRAL), "Sigma, neutral point"),
        (eq(EquilibriumKind::Saddle, Stability::Unstable), "saddle"),
        (eq(EquilibriumKind::Node, Stability::Stable), "stable node"),
        (
            eq(EquilibriumKind::Node, Stability::Unstable),
            "unstable node",
        ),
        (
            eq(EquilibriumKind::Focus, Stability::Stable),
            "focus (filled if stable)",
        ),
        (seq(SingularKind::FoldedNode), "folded node"),
        (seq(SingularKind::FoldedSaddle), "folded saddle"),
        (seq(SingularKind::FoldedFocus), "folded focus"),
        (
            glyph_2d(&Point2DClass::Fold {
                convexity: crate::classify2d::Side::Plus,
                simple: true,
            }),
            "fold",
        ),
        (
            glyph_2d(&Point2DClass::DegeneratePoint {
                code: crate::EventCode::L3,
                details: String::new(),
            }),
            "degenerate point",
        ),
        (
            r##"<line x1="-8" y1="0" x2="8" y2="0" stroke="#333333" marker-end="url(#arrow2)"/>"##
                .to_string(),
            "finite-time arrival at Sigma",
        ),
        (
            r##"<line x1="0" y1="0" x2="10" y2="0" stroke="#555555" stroke-dasharray="3,2"/>"##
                .to_string(),
            "sector boundary",
        ),
    ];
    let refs: Vec<(&str, &str)> = rows.iter().map(|(g, t)| (g.as_str(), *t)).collect();
    legend(&mut out, &refs);
    out.push_str("</svg>\n");
    out
}

/// Line portrait of a scalar system: special points and the direction of
/// motion between them. Double arrowheads mark finite-time arrival at a
/// singularity.
pub fn portrait_1d(sys: &System1D, alpha: f64, interval: (f64, f64), tol: &Tolerances) -> String {
    let (a, b) = (interval.0.min(interval.1), interval.0.max(interval.1));
    let frame = Frame {
        bbox: BBox::new(a, -1.0, b, 1.0),
    };
    let mut out = String::new();
    header(&mut out, &format!("{} at alpha = {alpha}", sys.name));
    let y = frame.y(0.0);
    let _ = writeln!(
        out,
        r##"<line x1="{:.2}" y1="{y:.2}" x2="{:.2}" y2="{y:.2}" stroke="#999999"/>"##,
        frame.x(a),
        frame.x(b)
    );
    for (v, anchor) in [(a, "start"), (b, "end")] {
        let _ = writeln!(
            out,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="{anchor}">{v}</text>"#,
            frame.x(v),
            y + 30.0
        );
    }
    let found = find_special_points_1d(sys, alpha, (a, b), 512, tol);
    let xs: Vec<f64> = std::iter::once(a)
        .chain(found.points.iter().map(|p| p.x))
        .chain(std::iter::once(b))
        .collect();
    out.push_str("<g id=\"flow\">\n");
    for (i, w) in xs.windows(2).enumerate() {
        let (l, r) = (w[0], w[1]);
        if r - l <= 1e-12 * (b - a) {
            continue;
        }
        let m = 0.5 * (l + r);
        let (Ok(f), Ok(g)) = (sys.eval_f(m, alpha), sys.eval_g(m, alpha)) else {
            continue;
        };
        let v = f / g;
        if v == 0.0 || !v.is_finite() {
            continue;
        }
        let (x0, x1) = (frame.x(l) + 8.0, frame.x(r) - 8.0);
        if x1 <= x0 {
            continue;
        }
        let (from, to) = if v > 0.0 { (x0, x1) } else { (x1, x0) };
        // The target is a singularity if it is a special point with g = 0.
        let target = if v > 0.0 { i + 1 } else { i };
        let into_singularity = target >= 1
            && target <= found.points.len()
            && matches!(
                found.points[target - 1].class,
                Point1DClass::SimpleSingularity { .. } | Point1DClass::NonSimpleSingularity { .. }
            );
        let marker = if into_singularity { "arrow2" } else { "arrow" };
        let _ = writeln!(
            out,
            r##"<line x1="{from:.2}" y1="{:.2}" x2="{to:.2}" y2="{:.2}" stroke="#333333" marker-end="url(#{marker})"/>"##,
            y - 12.0,
            y - 12.0
        );
    }
    out.push_str("</g>\n<g id=\"points\">\n");
    for p in &found.points {
        let x = frame.x(p.x);
        let glyph = match p.class {
            Point1DClass::SimpleEquilibrium { stable: true, .. } => {
                r##"<circle r="5" fill="#000000" stroke="#000000"/>"##.to_string()
            }
            Point1DClass::SimpleEquilibrium { stable: false, .. }
            | Point1DClass::NonSimpleEquilibrium { .. } => {
                r##"<circle r="5" fill="#ffffff" stroke="#000000"/>"##.to_string()
            }
            Point1DClass::SimpleSingularity { orientation, .. } => {
                let c = if orientation == Orientation1D::Incoming {
                    INCOMING
                } else {
                    OUTGOING
                };
                format!(r#"<line x1="0" y1="-10" x2="0" y2="10" stroke="{c}" stroke-width="3"/>"#)
            }
            Point1DClass::NonSimpleSingularity { .. } => {
                format!(
                    r#"<line x1="0" y1="-10" x2="0" y2="10" stroke="{NEUTRAL}" stroke-width="3"/>"#
                )
            }
            Point1DClass::SingularEquilibrium { .. } => {
                r##"<path d="M0,-6 L6,0 L0,6 L-6,0 z" fill="#9467bd" stroke="#000000"/>"##
                    .to_string()
            }
            Point1DClass::RegularPoint => continue,
        };
        let _ = writeln!(
            out,
            r#"<g transform="translate({x:.2},{y:.2})">{glyph}</g>"#
        );
    }
    out.push_str("</g>\n");
    let rows = [
        (
            r##"<circle r="5" fill="#000000" stroke="#000000"/>"##.to_string(),
            "stable equilibrium",
        ),
        (
            r##"<circle r="5" fill="#ffffff" stroke="#000000"/>"##.to_string(),
            "unstable or non-simple equilibrium",
        ),
        (
            format!(r#"<line x1="0" y1="-8" x2="0" y2="8" stroke="{INCOMING}" stroke-width="3"/>"#),
            "incoming singularity",
        ),
        (
            format!(r#"<line x1="0" y1="-8" x2="0" y2="8" stroke="{OUTGOING}" stroke-width="3"/>"#),
            "outgoing singularity",
        ),
        (
            r##"<path d="M0,-6 L6,0 L0,6 L-6,0 z" fill="#9467bd" stroke="#000000"/>"##.to_string(),
            "singular equilibrium",
        ),
        (
            r##"<line x1="-8" y1="0" x2="8" y2="0" stroke="#333333" marker-end="url(#arrow2)"/>"##
                .to_string(),
            "finite-time arrival",
        ),
    ];
    let refs: Vec<(&str, &str)> = rows.iter().map(|(g, t)| (g.as_str(), *t)).collect();
    legend(&mut out, &refs);
    out.push_str("</svg>\n");
    out
}
