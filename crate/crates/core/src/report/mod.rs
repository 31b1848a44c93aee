//! System files, JSON reports and SVG portraits behind the command-line tool.

mod json;
mod schema;
mod svg;
mod sysfile;

use serde::Serialize;
use serde_json::{json, Value};

use crate::bif_scan::{scan_parameter, CycleSeed, ScanOptions};
use crate::classify1d::{
    find_special_points_1d, normal_form_a11, normal_form_a21, normal_form_a300, scan_1d,
    simulate_1d, structural_stability_1d, Degeneracy, Point1DClass, Scan1DOptions, Sim1DOptions,
};
use crate::classify2d::{find_points_2d, sector_decomposition, trace_sigma, BBox, TraceOptions};
use crate::desing::{
    integrate_desing, split_to_dae_orbits, DesingEnd, DesingOptions, DesingularizedField,
    TimeChange,
};
use crate::{SystemDef, Tolerances};

pub use json::{format_float, to_canonical_json};
pub use schema::{event_schema, render_event, EventSchema};
pub use svg::{portrait_1d, portrait_2d};
pub use sysfile::{parse_system_file, AlphaSpec, FileError, SystemFile};

/// Failures of a command, each with its exit code.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CommandError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Input(_) => 2,
            CommandError::Numerical(_) => 3,
        }
    }
}

impl From<FileError> for CommandError {
    fn from(e: FileError) -> Self {
        CommandError::Input(e.to_string())
    }
}

/// Text to emit plus the exit code of a successful run (0, or 4 when every
/// event found fails its genericity conditions).
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub text: String,
    pub exit_code: i32,
}

impl CommandOutput {
    fn ok(text: String) -> Self {
        CommandOutput { text, exit_code: 0 }
    }
}

const DEFAULT_BBOX: f64 = 2.0;
const DEFAULT_INTERVAL: (f64, f64) = (-2.0, 2.0);
const DEFAULT_SAMPLES: usize = 41;

/// Tolerances for a run: the file's `tol` key, else `DAE_SINGULAR_TOL`,
/// else the defaults.
pub fn tolerances_for(file: &SystemFile) -> Tolerances {
    file.tol
        .map_or_else(Tolerances::from_env, Tolerances::from_zero)
}

fn bbox_of(file: &SystemFile) -> BBox {
    file.bbox.unwrap_or(BBox::square(DEFAULT_BBOX))
}

fn interval_of(file: &SystemFile) -> (f64, f64) {
    file.interval.unwrap_or(DEFAULT_INTERVAL)
}

/// `--alpha` if given, else the file's value (midpoint for a range), else 0.
pub fn alpha_for(file: &SystemFile, flag: Option<f64>) -> f64 {
    flag.unwrap_or(match file.alpha {
        Some(AlphaSpec::Value { value }) => value,
        Some(AlphaSpec::Range { from, to }) => 0.5 * (from + to),
        None => 0.0,
    })
}

/// `--alpha-range` if given, else the file's range.
pub fn range_for(file: &SystemFile, flag: Option<(f64, f64)>) -> Result<(f64, f64), CommandError> {
    let r = match (flag, file.alpha) {
        (Some(r), _) => r,
        (None, Some(AlphaSpec::Range { from, to })) => (from, to),
        _ => {
            return Err(CommandError::Input(
                "no alpha range: pass --alpha-range a:b or set 'alpha = a : b'".into(),
            ))
        }
    };
    if !(r.0 < r.1) || !r.0.is_finite() || !r.1.is_finite() {
        return Err(CommandError::Input(format!(
            "alpha range {} : {} is empty",
            r.0, r.1
        )));
    }
    Ok(r)
}

fn envelope(
    file: &SystemFile,
    command: &str,
    tol: &Tolerances,
    body: Value,
    warnings: Vec<String>,
) -> Value {
    let mut system = serde_json::Map::new();
    system.insert("dim".into(), json!(file.system.dimension()));
    system.insert("name".into(), json!(file.system.name()));
    for (k, v) in &file.sources {
        system.insert(k.clone(), json!(v));
    }
    json!({
        "tool": { "name": env!("CARGO_PKG_NAME"), "version": env!("CARGO_PKG_VERSION") },
        "command": command,
        "system": system,
        "tolerances": tol,
        "result": body,
        "diagnostics": { "warnings": warnings },
    })
}

fn render<T: Serialize>(v: &T) -> Result<String, CommandError> {
    to_canonical_json(v)
        .map_err(|e| CommandError::Numerical(format!("report serialization failed: {e}")))
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

/// Inventory of special points at one parameter value.
pub fn cmd_classify(file: &SystemFile, alpha: Option<f64>) -> Result<CommandOutput, CommandError> {
    let tol = tolerances_for(file);
    let alpha = alpha_for(file, alpha);
    let grid = file.grid;
    let (body, warnings) = match &file.system {
        SystemDef::OneD(sys) => {
            let interval = interval_of(file);
            let found = find_special_points_1d(sys, alpha, interval, grid.unwrap_or(512), &tol);
            let points: Vec<Value> = found
                .points
                .iter()
                .map(|p| {
                    let nf = match p.class {
                        Point1DClass::NonSimpleEquilibrium {
                            m: Degeneracy::Order(1),
                            ..
                        } => normal_form_a11(sys, p.x, alpha, &tol).ok(),
                        Point1DClass::NonSimpleSingularity {
                            n: Degeneracy::Order(1),
                            ..
                        } => normal_form_a21(sys, p.x, alpha, &tol).ok(),
                        Point1DClass::SingularEquilibrium {
                            m: Degeneracy::Order(0),
                            n: Degeneracy::Order(0),
                        } => normal_form_a300(sys, p.x, alpha, &tol).ok(),
                        _ => None,
                    };
                    json!({ "x": p.x, "class": p.class, "normal_form": nf })
                })
                .collect();
            let verdict = structural_stability_1d(sys, alpha, interval, grid.unwrap_or(512), &tol);
            (
                json!({ "alpha": alpha, "interval": [interval.0, interval.1], "points": points, "structural_stability": verdict }),
                found.warnings,
            )
        }
        SystemDef::TwoD(sys) => {
            let bbox = bbox_of(file);
            let found = find_points_2d(sys, alpha, &bbox, grid.unwrap_or(32), &tol);
            let points: Vec<Value> = found
                .points
                .iter()
                .map(|p| {
                    let sectors = sector_decomposition(sys, p.p, alpha, &tol).ok();
                    json!({ "p": p.p, "class": p.class, "sectors": sectors })
                })
                .collect();
            let curve = trace_sigma(sys, alpha, &bbox, &TraceOptions::default());
            let mut warnings = found.warnings;
            warnings.extend(curve.warnings.iter().cloned());
            let lines: Vec<Value> = curve
                .polylines
                .iter()
                .map(|l| {
                    let mut arcs = Vec::new();
                    let mut start = 0;
                    for i in 1..=l.vertices.len() {
                        if i == l.vertices.len() || l.vertices[i].label != l.vertices[start].label {
                            let end = i - 1;
                            arcs.push(json!({
                                "label": l.vertices[start].label,
                                "from": l.vertices[start].p,
                                "to": l.vertices[end].p,
                                "vertices": end - start + 1,
                            }));
                            start = i;
                        }
                    }
                    let folds: Vec<[f64; 2]> =
                        l.vertices.iter().filter(|v| v.fold).map(|v| v.p).collect();
                    let seqs: Vec<[f64; 2]> = l
                        .vertices
                        .iter()
                        .filter(|v| v.singular_equilibrium)
                        .map(|v| v.p)
                        .collect();
                    json!({
                        "closed": l.closed,
                        "truncated": l.truncated,
                        "arcs": arcs,
                        "folds": folds,
                        "singular_equilibria": seqs,
                    })
                })
                .collect();
            (
                json!({
                    "alpha": alpha,
                    "bbox": [bbox.x0, bbox.y0, bbox.x1, bbox.y1],
                    "points": points,
                    "sigma": { "polylines": lines },
                }),
                warnings,
            )
        }
    };
    Ok(CommandOutput::ok(render(&envelope(
        file, "classify", &tol, body, warnings,
    ))?))
}

/// Codimension-one events over a parameter range.
pub fn cmd_scan(
    file: &SystemFile,
    range: Option<(f64, f64)>,
    samples: Option<usize>,
) -> Result<CommandOutput, CommandError> {
    let tol = tolerances_for(file);
    let range = range_for(file, range)?;
    let samples = samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES);
    if samples < 8 {
        return Err(CommandError::Input(format!(
            "at least 8 samples are required, got {samples}"
        )));
    }
    let (body, warnings, exit_code) = match &file.system {
        SystemDef::OneD(sys) => {
            let opts = Scan1DOptions {
                interval: interval_of(file),
                grid_n: file.grid.unwrap_or(512),
                tol,
            };
            let r = scan_1d(sys, range, samples, &opts);
            let all_bad = !r.events.is_empty() && r.events.iter().all(|e| !e.generic);
            let body = json!({
                "alpha_range": [range.0, range.1],
                "samples": samples,
                "events": to_value(&r.events),
                "incomplete": r.incomplete,
            });
            (body, r.warnings, if all_bad { 4 } else { 0 })
        }
        SystemDef::TwoD(sys) => {
            let bbox = bbox_of(file);
            let cycle = file.cycle_seed.map(|seed| CycleSeed {
                seed,
                section: file.cycle_section,
            });
            let opts = ScanOptions {
                grid_n: file.grid.unwrap_or(32),
                tol,
                cycle,
                ..ScanOptions::default()
            };
            let r = scan_parameter(sys, range, samples, &bbox, &opts);
            let all_bad = !r.events.is_empty() && r.events.iter().all(|e| !e.generic);
            let events: Vec<Value> = r
                .events
                .iter()
                .map(|e| {
                    let mut v = to_value(e);
                    v["summary"] = json!(render_event(e));
                    v
                })
                .collect();
            let body = json!({
                "alpha_range": [range.0, range.1],
                "samples": samples,
                "bbox": [bbox.x0, bbox.y0, bbox.x1, bbox.y1],
                "events": events,
                "incomplete": r.incomplete,
            });
            (body, r.warnings, if all_bad { 4 } else { 0 })
        }
    };
    Ok(CommandOutput {
        text: render(&envelope(file, "scan", &tol, body, warnings))?,
        exit_code,
    })
}

/// SVG portrait at one parameter value.
pub fn cmd_portrait(file: &SystemFile, alpha: Option<f64>) -> Result<CommandOutput, CommandError> {
    let tol = tolerances_for(file);
    let alpha = alpha_for(file, alpha);
    let svg = match &file.system {
        SystemDef::OneD(sys) => portrait_1d(sys, alpha, interval_of(file), &tol),
        SystemDef::TwoD(sys) => portrait_2d(sys, alpha, &bbox_of(file), &file.seeds, &tol),
    };
    Ok(CommandOutput::ok(svg))
}

/// One orbit from `from`. For planar systems `t_max` bounds the
/// desingularized time, in either direction by its sign.
pub fn cmd_simulate(
    file: &SystemFile,
    alpha: Option<f64>,
    from: &[f64],
    t_max: f64,
) -> Result<CommandOutput, CommandError> {
    let tol = tolerances_for(file);
    let alpha = alpha_for(file, alpha);
    let (body, warnings) = match &file.system {
        SystemDef::OneD(sys) => {
            let [x0] = from else {
                return Err(CommandError::Input(format!(
                    "a 1D system needs one coordinate in --from, got {}",
                    from.len()
                )));
            };
            let (lo, hi) = interval_of(file);
            let opts = Sim1DOptions {
                sing_tol: tol.zero,
                domain: (lo.min(*x0), hi.max(*x0)),
                ..Sim1DOptions::default()
            };
            let piece = simulate_1d(sys, *x0, alpha, t_max, &opts)
                .map_err(|e| CommandError::Numerical(e.to_string()))?;
            (
                json!({ "alpha": alpha, "from": [x0], "pieces": [piece] }),
                Vec::new(),
            )
        }
        SystemDef::TwoD(sys) => {
            let [x0, y0] = from else {
                return Err(CommandError::Input(format!(
                    "a 2D system needs two coordinates in --from, got {}",
                    from.len()
                )));
            };
            let p0 = [*x0, *y0];
            let g0 = sys
                .eval_g(p0, alpha)
                .map_err(|e| CommandError::Numerical(e.to_string()))?;
            if g0.abs() <= tol.zero {
                return Err(CommandError::Numerical(format!(
                    "initial condition on singular set (g = {g0:e})"
                )));
            }
            let field = DesingularizedField::new(sys);
            let opts = DesingOptions {
                bbox: Some(bbox_of(file)),
                ..DesingOptions::default()
            };
            let orbit = integrate_desing(&field, p0, alpha, t_max, &opts);
            let mut warnings = Vec::new();
            match orbit.end {
                DesingEnd::EvalFailed if orbit.samples.len() <= 1 => {
                    return Err(CommandError::Numerical(
                        "the field cannot be evaluated at the initial point".into(),
                    ))
                }
                DesingEnd::StepUnderflow | DesingEnd::EvalFailed => {
                    warnings.push(format!("integration stopped early: {:?}", orbit.end))
                }
                _ => {}
            }
            let pieces = split_to_dae_orbits(&orbit, TimeChange::Standard);
            let body = json!({
                "alpha": alpha,
                "from": p0,
                "tau_max": t_max,
                "end": orbit.end,
                "sigma_events": orbit.events,
                "pieces": pieces,
            });
            (body, warnings)
        }
    };
    Ok(CommandOutput::ok(render(&envelope(
        file, "simulate", &tol, body, warnings,
    ))?))
}
