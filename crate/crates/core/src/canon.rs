//! Canonical JSON: object keys sorted, two-space indentation, floats with
//! 17 significant digits in exponent form. Equal values always serialize
//! to identical bytes.

use std::fmt::Write;

use serde::Serialize;
use serde_json::Value;

use crate::error::Result;

pub fn to_canonical_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    Ok(canonicalize(&serde_json::to_value(value)?))
}

pub fn canonicalize(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out.push('\n');
    out
}

fn format_number(n: &serde_json::Number) -> String {
    if n.is_f64() {
        format!("{:.16e}", n.as_f64().expect("f64 number"))
    } else {
        n.to_string()
    }
}

fn indent(out: &mut String, level: usize) {
    out.extend(std::iter::repeat_n("  ", level));
}

fn write_value(out: &mut String, value: &Value, level: usize) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => write!(out, "{b}").expect("write to string"),
        Value::Number(n) => out.push_str(&format_number(n)),
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            // short arrays of scalars (complex pairs, matrix rows) stay on one line
            if items.len() <= 2 && items.iter().all(|v| !v.is_array() && !v.is_object()) {
                out.push('[');
                for (i, v) in items.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, v, level);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (i, v) in items.iter().enumerate() {
                indent(out, level + 1);
                write_value(out, v, level + 1);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            indent(out, level);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, k) in keys.iter().enumerate() {
                indent(out, level + 1);
                out.push_str(&Value::String((*k).clone()).to_string());
                out.push_str(": ");
                write_value(out, &map[*k], level + 1);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            indent(out, level);
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_sorted_and_floats_fixed() {
        let v = json!({"b": 1.5, "a": [1, 2, 3], "c": {"z": null, "y": "s\"q"}, "d": [0.1, -2.0]});
        let text = canonicalize(&v);
        let a = text.find("\"a\"").unwrap();
        let b = text.find("\"b\"").unwrap();
        assert!(a < b);
        assert!(text.contains("\"b\": 1.5000000000000000e0"));
        assert!(text.contains("[1.0000000000000001e-1, -2.0000000000000000e0]"));
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["c"]["y"], "s\"q");
        assert_eq!(back["a"][2], 3);
        assert_eq!(back["b"], 1.5);
    }

    #[test]
    fn round_trips_floats_exactly() {
        for x in [std::f64::consts::PI, 1e-300, -123456.789, 0.0] {
            let text = canonicalize(&json!({ "x": x }));
            let back: Value = serde_json::from_str(&text).unwrap();
            assert_eq!(back["x"].as_f64().unwrap(), x);
        }
    }
}
