//! Output rendering shared by every subcommand.
//!
//! JSON is the serde form of the output struct. CSV and table views are
//! derived from that JSON by flattening nested objects into dotted keys, so
//! all three formats always carry the same fields in the same order.

use serde::Serialize;
use serde_json::Value;

use super::Format;

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        Value::Array(items) => {
            let inner: Vec<String> = items.iter().map(scalar).collect();
            format!("({})", inner.join(","))
        }
        Value::Object(_) => v.to_string(),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join(";"),
        other => scalar(other),
    }
}

fn flatten_into(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    match v {
        Value::Object(map) => {
            for (k, inner) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten_into(&key, inner, out);
            }
        }
        other => out.push((prefix.to_string(), cell(other))),
    }
}

/// `(dotted key, rendered value)` pairs in serialization order.
pub fn flatten<T: Serialize>(value: &T) -> Vec<(String, String)> {
    let v = serde_json::to_value(value).expect("output types serialize to JSON");
    let mut out = Vec::new();
    flatten_into("", &v, &mut out);
    out
}

fn csv_line(fields: impl IntoIterator<Item = String>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(fields).expect("in-memory csv write");
    String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("utf-8 fields")
}

pub fn render<T: Serialize>(value: &T, format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(value).expect("output types serialize to JSON");
            s.push('\n');
            s
        }
        Format::Csv => {
            let pairs = flatten(value);
            let mut s = csv_line(pairs.iter().map(|(k, _)| k.clone()));
            s.push_str(&csv_line(pairs.into_iter().map(|(_, v)| v)));
            s
        }
        Format::Table => {
            let pairs = flatten(value);
            let width = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
            pairs
                .into_iter()
                .map(|(k, v)| format!("{k:<width$}  {v}\n"))
                .collect()
        }
    }
}

/// Renders homogeneous rows (one record each) as CSV, a JSON array or a padded table.
pub fn render_rows<T: Serialize>(
    header: &[&str],
    rows: &[Vec<String>],
    records: &T,
    format: Format,
) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(records).expect("rows serialize");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = csv_line(header.iter().map(|h| h.to_string()));
            for row in rows {
                s.push_str(&csv_line(row.iter().cloned()));
            }
            s
        }
        Format::Table => {
            let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
            for row in rows {
                for (w, c) in widths.iter_mut().zip(row) {
                    *w = (*w).max(c.len());
                }
            }
            let line = |cells: Vec<String>| {
                let padded: Vec<String> = cells
                    .iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:>w$}"))
                    .collect();
                format!("{}\n", padded.join("  ").trim_end())
            };
            let mut s = line(header.iter().map(|h| h.to_string()).collect());
            for row in rows {
                s.push_str(&line(row.clone()));
            }
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn flattens_nested_objects() {
        let v = json!({"a": {"x": 1.5, "y": null}, "b": [1, 2], "c": [["H", "L"], ["L", "H"]]});
        let pairs = flatten(&v);
        assert_eq!(
            pairs,
            vec![
                ("a.x".into(), "1.5".into()),
                ("a.y".into(), "".into()),
                ("b".into(), "1;2".into()),
                ("c".into(), "(H,L);(L,H)".into()),
            ]
        );
    }

    #[test]
    fn csv_has_header_and_row() {
        let v = json!({"w": 2.5, "regime": "Interior"});
        assert_eq!(render(&v, Format::Csv), "w,regime\n2.5,Interior\n");
    }
}
