//! Line-oriented system files.
//!
//! ```text
//! # comment
//! dim = 2
//! f1 = y - x + alpha
//! f2 = y
//! g = x - x^3
//! bbox = -1.5 -1.5 1.5 1.5
//! alpha = -0.1 : 0.1
//! ```

use std::fmt;

use serde::Serialize;

use crate::classify2d::BBox;
use crate::desing::Section;
use crate::expr::{parse_expression, Expr};
use crate::{System1D, System2D, SystemDef};

#[derive(Debug, Clone, PartialEq)]
pub struct FileError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for FileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: {}",
            self.line, self.column, self.message
        )
    }
}

impl std::error::Error for FileError {}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphaSpec {
    Value { value: f64 },
    Range { from: f64, to: f64 },
}

/// A parsed system file: the system plus optional run settings.
#[derive(Debug, Clone)]
pub struct SystemFile {
    pub system: SystemDef,
    /// Expression sources, keyed as in the file.
    pub sources: Vec<(String, String)>,
    pub alpha: Option<AlphaSpec>,
    pub bbox: Option<BBox>,
    pub interval: Option<(f64, f64)>,
    pub samples: Option<usize>,
    pub grid: Option<usize>,
    pub tol: Option<f64>,
    /// Orbit seeds drawn in portraits.
    pub seeds: Vec<[f64; 2]>,
    pub cycle_seed: Option<[f64; 2]>,
    pub cycle_section: Option<Section>,
}

const KEYS_1D: &[&str] = &["f", "g", "interval"];
const KEYS_2D: &[&str] = &[
    "f1",
    "f2",
    "g",
    "bbox",
    "seeds",
    "cycle_seed",
    "cycle_section",
];
const KEYS_ANY: &[&str] = &["dim", "name", "alpha", "samples", "grid", "tol"];

struct Entry<'a> {
    line: usize,
    /// One-based column where the value starts.
    column: usize,
    value: &'a str,
}

fn err(line: usize, column: usize, message: impl Into<String>) -> FileError {
    FileError {
        line,
        column,
        message: message.into(),
    }
}

fn numbers(e: &Entry, n: usize) -> Result<Vec<f64>, FileError> {
    let mut out = Vec::new();
    let mut offset = 0;
    for tok in e.value.split_whitespace() {
        let start = e.value[offset..].find(tok).map_or(offset, |i| offset + i);
        offset = start + tok.len();
        let col = e.column + e.value[..start].chars().count();
        match tok.parse::<f64>() {
            Ok(v) if v.is_finite() => out.push(v),
            _ => {
                return Err(err(
                    e.line,
                    col,
                    format!("expected a number, found '{tok}'"),
                ))
            }
        }
    }
    if out.len() != n {
        return Err(err(
            e.line,
            e.column,
            format!("expected {n} number(s), found {}", out.len()),
        ));
    }
    Ok(out)
}

fn expression(e: &Entry) -> Result<Expr, FileError> {
    parse_expression(e.value).map_err(|pe| {
        let (_, col) = pe.line_column(e.value);
        err(e.line, e.column + col - 1, pe.to_string())
    })
}

fn count(e: &Entry, min: usize) -> Result<usize, FileError> {
    match e.value.trim().parse::<usize>() {
        Ok(n) if n >= min => Ok(n),
        _ => Err(err(
            e.line,
            e.column,
            format!("expected an integer of at least {min}, found '{}'", e.value),
        )),
    }
}

fn point(e: &Entry, s: &str, col: usize) -> Result<[f64; 2], FileError> {
    let sub = Entry {
        line: e.line,
        column: col,
        value: s,
    };
    let v = numbers(&sub, 2)?;
    Ok([v[0], v[1]])
}

/// Parses a system file. Errors carry the line and column of the offending
/// text.
pub fn parse_system_file(src: &str) -> Result<SystemFile, FileError> {
    let mut entries: Vec<(String, Entry)> = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        if content.trim().is_empty() {
            continue;
        }
        let Some(eq) = content.find('=') else {
            let col = content.len() - content.trim_start().len() + 1;
            return Err(err(line, col, "expected 'key = value'"));
        };
        let key = content[..eq].trim();
        let key_col = content.len() - content.trim_start().len() + 1;
        if key.is_empty() || !key.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(err(line, key_col, format!("malformed key '{key}'")));
        }
        if !KEYS_1D.contains(&key) && !KEYS_2D.contains(&key) && !KEYS_ANY.contains(&key) {
            return Err(err(line, key_col, format!("unknown key '{key}'")));
        }
        if let Some((_, first)) = entries.iter().find(|(k, _)| k == key) {
            return Err(err(
                line,
                key_col,
                format!("duplicate key '{key}' (first given on line {})", first.line),
            ));
        }
        let rest = &content[eq + 1..];
        let lead = rest.len() - rest.trim_start().len();
        let value = rest.trim();
        let column = content[..eq + 1 + lead].chars().count() + 1;
        if value.is_empty() {
            return Err(err(line, column, format!("missing value for '{key}'")));
        }
        entries.push((
            key.to_string(),
            Entry {
                line,
                column,
                value,
            },
        ));
    }
    let get = |k: &str| entries.iter().find(|(key, _)| key == k).map(|(_, e)| e);
    let last_line = src.lines().count().max(1);

    let dim = match get("dim") {
        None => {
            if get("f1").is_some() || get("f2").is_some() {
                2
            } else {
                1
            }
        }
        Some(e) => match e.value {
            "1" => 1,
            "2" => 2,
            _ => {
                return Err(err(
                    e.line,
                    e.column,
                    format!("dim must be 1 or 2, found '{}'", e.value),
                ))
            }
        },
    };
    let foreign = if dim == 1 { KEYS_2D } else { KEYS_1D };
    for (k, e) in &entries {
        if foreign.contains(&k.as_str()) && !(k == "g") {
            return Err(err(
                e.line,
                e.column,
                format!("key '{k}' does not apply to a {dim}D system"),
            ));
        }
    }
    let require =
        |k: &str| get(k).ok_or_else(|| err(last_line, 1, format!("missing required key '{k}'")));
    let name = get("name").map(|e| e.value.to_string());
    let names: &[&str] = if dim == 1 {
        &["f", "g"]
    } else {
        &["f1", "f2", "g"]
    };
    let mut exprs = Vec::new();
    let mut sources = Vec::new();
    for k in names {
        let e = require(k)?;
        exprs.push(expression(e)?);
        sources.push((k.to_string(), e.value.to_string()));
    }
    let system = if dim == 1 {
        let name = name.unwrap_or_else(|| format!("({}) x' = {}", sources[1].1, sources[0].1));
        let g = get("g").unwrap();
        SystemDef::OneD(
            System1D::new(name, exprs[0].clone(), exprs[1].clone())
                .map_err(|e| err(g.line, g.column, e.to_string()))?,
        )
    } else {
        let name = name.unwrap_or_else(|| {
            format!(
                "({}) x' = {}, y' = {}",
                sources[2].1, sources[0].1, sources[1].1
            )
        });
        SystemDef::TwoD(
            System2D::new(name, exprs[0].clone(), exprs[1].clone(), exprs[2].clone())
                .map_err(|e| err(1, 1, e.to_string()))?,
        )
    };

    let alpha = match get("alpha") {
        None => None,
        Some(e) => Some(match e.value.split_once(':') {
            Some((a, b)) => {
                let ea = Entry {
                    line: e.line,
                    column: e.column,
                    value: a.trim(),
                };
                let bcol = e.column
                    + e.value[..e.value.find(':').unwrap() + 1].chars().count()
                    + (b.len() - b.trim_start().len());
                let eb = Entry {
                    line: e.line,
                    column: bcol,
                    value: b.trim(),
                };
                let (from, to) = (numbers(&ea, 1)?[0], numbers(&eb, 1)?[0]);
                if from >= to {
                    return Err(err(e.line, e.column, "alpha range must satisfy a < b"));
                }
                AlphaSpec::Range { from, to }
            }
            None => AlphaSpec::Value {
                value: numbers(e, 1)?[0],
            },
        }),
    };
    let bbox = match get("bbox") {
        None => None,
        Some(e) => {
            let v = numbers(e, 4)?;
            if !(v[0] < v[2] && v[1] < v[3]) {
                return Err(err(
                    e.line,
                    e.column,
                    "bbox must be 'x0 y0 x1 y1' with x0 < x1 and y0 < y1",
                ));
            }
            Some(BBox::new(v[0], v[1], v[2], v[3]))
        }
    };
    let interval = match get("interval") {
        None => None,
        Some(e) => {
            let v = numbers(e, 2)?;
            if v[0] >= v[1] {
                return Err(err(e.line, e.column, "interval must satisfy a < b"));
            }
            Some((v[0], v[1]))
        }
    };
    let samples = get("samples").map(|e| count(e, 8)).transpose()?;
    let grid = get("grid").map(|e| count(e, 4)).transpose()?;
    let tol = match get("tol") {
        None => None,
        Some(e) => {
            let v = numbers(e, 1)?[0];
            if v <= 0.0 {
                return Err(err(e.line, e.column, "tol must be positive"));
            }
            Some(v)
        }
    };
    let mut seeds = Vec::new();
    if let Some(e) = get("seeds") {
        let mut offset = 0;
        for part in e.value.split(';') {
            let col = e.column + e.value[..offset].chars().count();
            offset += part.len() + 1;
            if part.trim().is_empty() {
                continue;
            }
            seeds.push(point(e, part, col)?);
        }
    }
    let cycle_seed = get("cycle_seed")
        .map(|e| point(e, e.value, e.column))
        .transpose()?;
    let cycle_section = match get("cycle_section") {
        None => None,
        Some(e) => {
            let v = numbers(e, 4)?;
            Some(Section {
                a: [v[0], v[1]],
                b: [v[2], v[3]],
            })
        }
    };
    Ok(SystemFile {
        system,
        sources,
        alpha,
        bbox,
        interval,
        samples,
        grid,
        tol,
        seeds,
        cycle_seed,
        cycle_section,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planar_file() {
        let f = parse_system_file(
            "# fold family\ndim = 2\nf1 = y - x + alpha\nf2 = y\ng = x - x^3\nbbox = -1.5 -1.5 1.5 1.5\nalpha = -0.1 : 0.1\nseeds = 0.5 0.5; -0.5 0.2\n",
        )
        .unwrap();
        assert_eq!(f.system.dimension(), 2);
        assert_eq!(
            f.alpha,
            Some(AlphaSpec::Range {
                from: -0.1,
                to: 0.1
            })
        );
        assert_eq!(f.bbox, Some(BBox::new(-1.5, -1.5, 1.5, 1.5)));
        assert_eq!(f.seeds, vec![[0.5, 0.5], [-0.5, 0.2]]);
    }

    #[test]
    fn scalar_file_infers_dimension() {
        let f = parse_system_file("f = x^2 + alpha\ng = x + 1\nalpha = -0.25").unwrap();
        assert_eq!(f.system.dimension(), 1);
        assert_eq!(f.alpha, Some(AlphaSpec::Value { value: -0.25 }));
    }

    #[test]
    fn expression_errors_point_at_the_token() {
        let e = parse_system_file("f = x^2 + \ng = x").unwrap_err();
        assert_eq!(e.line, 1);
        let e = parse_system_file("dim = 1\nf = x + $\ng = 1").unwrap_err();
        assert_eq!((e.line, e.column), (2, 9), "{e}");
    }

    #[test]
    fn duplicate_and_unknown_keys() {
        let e = parse_system_file("f = x\nf = 1\ng = 1").unwrap_err();
        assert_eq!((e.line, e.column), (2, 1));
        assert!(e.message.contains("duplicate"));
        let e = parse_system_file("f = x\n  speed = 1\ng = 1").unwrap_err();
        assert_eq!((e.line, e.column), (2, 3));
    }

    #[test]
    fn dimension_mismatch() {
        let e = parse_system_file("dim = 1\nf = x\ng = 1\nbbox = 0 0 1 1").unwrap_err();
        assert_eq!(e.line, 4);
        let e = parse_system_file("dim = 2\nf1 = x\nf2 = y\ng = 1\ninterval = 0 1").unwrap_err();
        assert_eq!(e.line, 5);
    }

    #[test]
    fn bad_numbers() {
        let e = parse_system_file("f = x\ng = 1\nalpha = 0.1 : zz").unwrap_err();
        assert_eq!((e.line, e.column), (3, 15), "{e}");
        let e = parse_system_file("f1 = x\nf2 = y\ng = 1\nbbox = 0 0 1").unwrap_err();
        assert!(e.message.contains("4 number"));
    }

    #[test]
    fn missing_key() {
        let e = parse_system_file("f1 = x\nf2 = y").unwrap_err();
        assert!(e.message.contains("'g'"));
    }
}
