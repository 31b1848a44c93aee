//! Deterministic JSON text: sorted keys, two-space indentation, and every
//! float printed with 17 significant digits.

use serde::Serialize;
use serde_json::Value;

fn escape(s: &str, out: &mut String) {
    // serde_json's string escaping is already canonical.
    out.push_str(&serde_json::to_string(s).expect("strings always serialize"));
}

fn number(n: &serde_json::Number, out: &mut String) {
    if let Some(i) = n.as_i64() {
        out.push_str(&i.to_string());
    } else if let Some(u) = n.as_u64() {
        out.push_str(&u.to_string());
    } else {
        let v = n.as_f64().unwrap_or(f64::NAN);
        out.push_str(&format_float(v));
    }
}

/// `d.dddddddddddddddde±XX`, or `null` for non-finite values.
pub fn format_float(v: f64) -> String {
    if !v.is_finite() {
        return "null".into();
    }
    let s = format!("{v:.16e}");
    // Positive exponents get an explicit sign.
    match s.split_once('e') {
        Some((m, e)) if !e.starts_with('-') => format!("{m}e+{e}"),
        _ => s,
    }
}

fn write(v: &Value, indent: usize, out: &mut String) {
    let pad = |n: usize, out: &mut String| out.extend(std::iter::repeat_n(' ', n));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => number(n, out),
        Value::String(s) => escape(s, out),
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                pad(indent + 2, out);
                write(x, indent + 2, out);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            pad(indent, out);
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            let mut keys: Vec<&String> = m.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                pad(indent + 2, out);
                escape(k, out);
                out.push_str(": ");
                write(&m[*k], indent + 2, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            pad(indent, out);
            out.push('}');
        }
    }
}

/// Serializes any value canonically.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String, serde_json::Error> {
    let v = serde_json::to_value(value)?;
    let mut out = String::new();
    write(&v, 0, &mut out);
    out.push('\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_sorted_and_floats_fixed() {
        let s = to_canonical_json(&json!({"b": 0.1, "a": [1, -2.5], "c": null})).unwrap();
        assert_eq!(
            s,
            "{\n  \"a\": [\n    1,\n    -2.5000000000000000e+0\n  ],\n  \"b\": 1.0000000000000001e-1,\n  \"c\": null\n}\n"
        );
    }

    #[test]
    fn float_round_trip() {
        for v in [0.1, 1.0 / 3.0, -1e300, 5e-324, 123456.789] {
            let s = format_float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
        }
        assert_eq!(format_float(f64::NAN), "null");
        assert_eq!(format_float(2.0), "2.0000000000000000e+0");
    }
}
