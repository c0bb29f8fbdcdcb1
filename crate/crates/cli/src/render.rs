//! Plain-text rendering of JSON results for `--pretty`.

use serde_json::Value;

pub fn pretty(value: &Value) -> String {
    let mut out = String::new();
    render(value, 0, &mut out);
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        Value::Array(items) if items.iter().all(is_scalar) => {
            items.iter().map(scalar).collect::<Vec<_>>().join(", ")
        }
        other => other.to_string(),
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn is_table(items: &[Value]) -> bool {
    !items.is_empty()
        && items
            .iter()
            .all(|i| i.as_object().is_some_and(|o| o.values().all(is_scalar)))
}

fn render(value: &Value, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    match value {
        Value::Object(map) => {
            let width = map.keys().map(String::len).max().unwrap_or(0);
            for (k, v) in map {
                match v {
                    Value::Array(items) if is_table(items) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        table(items, indent + 2, out);
                    }
                    Value::Array(items) if items.iter().all(is_scalar) => {
                        out.push_str(&format!("{pad}{k:<width$}  {}\n", scalar(v)));
                    }
                    Value::Object(_) | Value::Array(_) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render(v, indent + 2, out);
                    }
                    _ => out.push_str(&format!("{pad}{k:<width$}  {}\n", scalar(v))),
                }
            }
        }
        Value::Array(items) if is_table(items) => table(items, indent, out),
        Value::Array(items) => {
            for item in items {
                render(item, indent, out);
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other))),
    }
}

fn table(items: &[Value], indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    let mut columns: Vec<&str> = Vec::new();
    for item in items {
        for k in item.as_object().expect("checked by is_table").keys() {
            if !columns.contains(&k.as_str()) {
                columns.push(k);
            }
        }
    }
    let cells: Vec<Vec<String>> = items
        .iter()
        .map(|i| columns.iter().map(|c| i.get(*c).map(scalar).unwrap_or_default()).collect())
        .collect();
    let widths: Vec<usize> = columns
        .iter()
        .enumerate()
        .map(|(j, c)| cells.iter().map(|r| r[j].len()).chain([c.len()]).max().unwrap_or(0))
        .collect();
    let line = |row: Vec<&str>| -> String {
        let joined = row
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect::<Vec<_>>()
            .join("  ");
        format!("{pad}{}\n", joined.trim_end())
    };
    out.push_str(&line(columns.clone()));
    out.push_str(&line(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(String::as_str).collect()));
    for r in &cells {
        out.push_str(&line(r.iter().map(String::as_str).collect()));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn renders_scalars_and_tables() {
        let v = json!({
            "team": "HOU",
            "weights": [0.5, 1.0],
            "recommendations": [
                {"swap_out": "A", "new_distance": 0.0},
                {"swap_out": "Bee", "new_distance": 1.5},
            ],
        });
        let s = pretty(&v);
        assert!(s.contains("team             HOU"));
        assert!(s.contains("weights          0.5, 1.0"));
        assert!(s.contains("  swap_out  new_distance\n"));
        assert!(s.contains("  Bee       1.5\n"));
    }
}
