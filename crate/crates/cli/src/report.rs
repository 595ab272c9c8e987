//! Run-report rendering. The JSON schema is stable: field order is fixed
//! by construction and every float is printed with 17 significant digits,
//! so each number round-trips to the same double. Non-finite values are
//! emitted as the strings "inf", "-inf", "nan" (JSON has no literals for
//! them); the CSV writer uses the same spellings unquoted.

use std::fmt::Write as _;

#[derive(Debug, Clone)]
pub enum Val {
    F(f64),
    U(u64),
    B(bool),
    S(String),
    Null,
    Arr(Vec<Val>),
    Obj(Vec<(&'static str, Val)>),
}

/// 17 significant digits: the shortest count that always round-trips f64.
pub fn fmt_f64(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else if x == f64::INFINITY {
        "inf".to_string()
    } else if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn escape_json(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

impl Val {
    fn render_json(&self, out: &mut String, indent: usize) {
        let pad = "  ".repeat(indent);
        let pad_in = "  ".repeat(indent + 1);
        match self {
            Val::F(x) => {
                if x.is_finite() {
                    out.push_str(&fmt_f64(*x));
                } else {
                    out.push_str(&escape_json(&fmt_f64(*x)));
                }
            }
            Val::U(x) => {
                let _ = write!(out, "{x}");
            }
            Val::B(x) => {
                let _ = write!(out, "{x}");
            }
            Val::S(s) => out.push_str(&escape_json(s)),
            Val::Null => out.push_str("null"),
            Val::Arr(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                // scalar arrays inline, structured arrays one per line
                let inline = items
                    .iter()
                    .all(|v| !matches!(v, Val::Arr(_) | Val::Obj(_)));
                if inline {
                    out.push('[');
                    for (i, v) in items.iter().enumerate() {
                        if i > 0 {
                            out.push_str(", ");
                        }
                        v.render_json(out, indent);
                    }
                    out.push(']');
                } else {
                    out.push_str("[\n");
                    for (i, v) in items.iter().enumerate() {
                        out.push_str(&pad_in);
                        v.render_json(out, indent + 1);
                        if i + 1 < items.len() {
                            out.push(',');
                        }
                        out.push('\n');
                    }
                    out.push_str(&pad);
                    out.push(']');
                }
            }
            Val::Obj(fields) => {
                if fields.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push_str("{\n");
                for (i, (key, v)) in fields.iter().enumerate() {
                    out.push_str(&pad_in);
                    out.push_str(&escape_json(key));
                    out.push_str(": ");
                    v.render_json(out, indent + 1);
                    if i + 1 < fields.len() {
                        out.push(',');
                    }
                    out.push('\n');
                }
                out.push_str(&pad);
                out.push('}');
            }
        }
    }

    fn csv_cell(&self) -> String {
        match self {
            Val::F(x) => fmt_f64(*x),
            Val::U(x) => x.to_string(),
            Val::B(x) => x.to_string(),
            Val::S(s) => s.clone(),
            Val::Null => String::new(),
            // scalar lists join with ';' so cells never need quoting
            Val::Arr(items) => items
                .iter()
                .map(|v| v.csv_cell())
                .collect::<Vec<_>>()
                .join(";"),
            Val::Obj(_) => String::new(),
        }
    }
}

/// How a report renders as CSV: one row of flattened scalars, or a table.
pub enum CsvShape {
    Flat,
    Table {
        columns: Vec<String>,
        rows: Vec<Vec<Val>>,
    },
}

pub struct Report {
    pub command: String,
    pub inputs: Vec<(&'static str, Val)>,
    pub outputs: Vec<(&'static str, Val)>,
    pub seed: Option<u64>,
    pub csv: CsvShape,
}

impl Report {
    pub fn flat(
        command: impl Into<String>,
        inputs: Vec<(&'static str, Val)>,
        outputs: Vec<(&'static str, Val)>,
    ) -> Self {
        Report {
            command: command.into(),
            inputs,
            outputs,
            seed: None,
            csv: CsvShape::Flat,
        }
    }

    pub fn to_json(&self) -> String {
        let root = Val::Obj(vec![
            ("command", Val::S(self.command.clone())),
            ("inputs", Val::Obj(self.inputs.clone())),
            ("outputs", Val::Obj(self.outputs.clone())),
            ("version", Val::S(env!("CARGO_PKG_VERSION").to_string())),
            (
                "seed",
                match self.seed {
                    Some(s) => Val::U(s),
                    None => Val::Null,
                },
            ),
        ]);
        let mut out = String::new();
        root.render_json(&mut out, 0);
        out.push('\n');
        out
    }

    pub fn to_csv(&self) -> String {
        match &self.csv {
            CsvShape::Flat => {
                let mut header = Vec::new();
                let mut row = Vec::new();
                flatten("", &Val::Obj(self.inputs.clone()), &mut header, &mut row);
                flatten("", &Val::Obj(self.outputs.clone()), &mut header, &mut row);
                format!("{}\n{}\n", header.join(","), row.join(","))
            }
            CsvShape::Table { columns, rows } => {
                let mut out = String::new();
                out.push_str(&columns.join(","));
                out.push('\n');
                for row in rows {
                    let cells: Vec<String> = row.iter().map(|v| v.csv_cell()).collect();
                    out.push_str(&cells.join(","));
                    out.push('\n');
                }
                out
            }
        }
    }
}

fn flatten(prefix: &str, val: &Val, header: &mut Vec<String>, row: &mut Vec<String>) {
    match val {
        Val::Obj(fields) => {
            for (key, v) in fields {
                let name = if prefix.is_empty() {
                    (*key).to_string()
                } else {
                    format!("{prefix}.{key}")
                };
                flatten(&name, v, header, row);
            }
        }
        other => {
            header.push(prefix.to_string());
            row.push(other.csv_cell());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for x in [0.5723705189690365, 1e-300, -3.25, 0.1 + 0.2] {
            let s = fmt_f64(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
        }
        assert_eq!(fmt_f64(f64::INFINITY), "inf");
        assert_eq!("inf".parse::<f64>().unwrap(), f64::INFINITY);
    }

    #[test]
    fn json_field_order_is_construction_order() {
        let r = Report::flat(
            "demo",
            vec![("b", Val::U(1)), ("a", Val::U(2))],
            vec![("z", Val::F(0.5))],
        );
        let json = r.to_json();
        assert!(json.find("\"b\"").unwrap() < json.find("\"a\"").unwrap());
        assert!(json.contains("\"seed\": null"));
        assert!(json.contains("5.0000000000000000e-1"));
    }

    #[test]
    fn csv_flattens_nested_keys() {
        let r = Report::flat(
            "demo",
            vec![("n", Val::U(10)), ("p", Val::Arr(vec![Val::F(0.5), Val::F(0.5)]))],
            vec![("value", Val::F(1.0))],
        );
        let csv = r.to_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "n,p,value");
        let row = lines.next().unwrap();
        assert!(row.starts_with("10,5.0000000000000000e-1;5.0000000000000000e-1,"));
    }
}
