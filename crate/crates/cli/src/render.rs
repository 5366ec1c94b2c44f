//! json, csv and markdown renderings of a list of records.
//!
//! csv and markdown flatten nested objects into dotted column names and join
//! scalar arrays with "; ", so every cell is the same text as in the json.

use std::fmt::Write as _;

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

fn scalar(value: &Value) -> String {
    match value {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Array(items) => items.iter().map(scalar).collect::<Vec<_>>().join("; "),
        other => other.to_string(),
    }
}

fn flatten_into(prefix: &str, value: &Value, out: &mut Vec<(String, String)>) {
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten_into(&key, v, out);
            }
        }
        other => out.push((prefix.to_string(), scalar(other))),
    }
}

/// `(column, cell)` pairs of one record in field order.
pub fn flatten(record: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    flatten_into("", record, &mut out);
    out
}

/// Union of the flattened columns, in first-seen order, and one row per record.
pub fn table(records: &[Value]) -> (Vec<String>, Vec<Vec<String>>) {
    let flat: Vec<Vec<(String, String)>> = records.iter().map(flatten).collect();
    let mut columns: Vec<String> = Vec::new();
    for row in &flat {
        for (k, _) in row {
            if !columns.contains(k) {
                columns.push(k.clone());
            }
        }
    }
    let rows = flat
        .into_iter()
        .map(|row| {
            let cells: Map<String, Value> = row.into_iter().map(|(k, v)| (k, Value::String(v))).collect();
            columns.iter().map(|c| cells.get(c).map(scalar).unwrap_or_default()).collect()
        })
        .collect();
    (columns, rows)
}

fn markdown_cell(s: &str) -> String {
    s.replace('|', "\\|")
}

pub fn render(records: &[Value], format: Format) -> String {
    match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&Value::Array(records.to_vec())).expect("values serialize");
            s.push('\n');
            s
        }
        Format::Csv => {
            let (columns, rows) = table(records);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&columns).expect("in-memory write");
            for row in rows {
                w.write_record(&row).expect("in-memory write");
            }
            String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 cells")
        }
        Format::Markdown => {
            let (columns, rows) = table(records);
            let mut s = String::new();
            let _ = writeln!(s, "| {} |", columns.iter().map(|c| markdown_cell(c)).collect::<Vec<_>>().join(" | "));
            let _ = writeln!(s, "|{}", "---|".repeat(columns.len()));
            for row in rows {
                let _ = writeln!(s, "| {} |", row.iter().map(|c| markdown_cell(c)).collect::<Vec<_>>().join(" | "));
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
    fn nested_records_flatten() {
        let r = json!({"a": "1", "b": {"c": 2, "d": null}, "w": ["x", "y"]});
        assert_eq!(
            flatten(&r),
            vec![
                ("a".into(), "1".into()),
                ("b.c".into(), "2".into()),
                ("b.d".into(), "".into()),
                ("w".into(), "x; y".into())
            ]
        );
    }

    #[test]
    fn columns_are_unioned() {
        let (cols, rows) = table(&[json!({"a": 1}), json!({"a": 2, "b": true})]);
        assert_eq!(cols, vec!["a", "b"]);
        assert_eq!(rows, vec![vec!["1", ""], vec!["2", "true"]]);
        let md = render(&[json!({"a": "x|y"})], Format::Markdown);
        assert!(md.contains("x\\|y"));
    }
}
