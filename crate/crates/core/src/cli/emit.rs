use std::fmt::Write as _;
use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

/// Pretty printer that writes every float with 17 significant digits, so
/// output bytes depend only on the bit pattern of the value.
struct FixedFloats<'a> {
    inner: PrettyFormatter<'a>,
}

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }
    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_array(w)
    }
    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array(w)
    }
    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_array_value(w)
    }
    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object(w)
    }
    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object(w)
    }
    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.inner.end_object_value(w)
    }
}

/// Deterministic JSON: keys sorted (serde_json's default map is ordered),
/// floats in fixed scientific notation, trailing newline.
pub fn to_json(value: &Value) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats { inner: PrettyFormatter::new() });
    value.serialize(&mut ser).expect("serializing a Value into memory cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "-".into(),
        Value::String(s) => s.clone(),
        Value::Number(n) => match n.as_f64() {
            Some(f) if !n.is_i64() && !n.is_u64() => format!("{f:.6e}"),
            _ => n.to_string(),
        },
        Value::Bool(b) => b.to_string(),
        Value::Array(items) if items.iter().all(|i| !i.is_object() && !i.is_array()) => {
            format!("[{}]", items.iter().map(scalar).collect::<Vec<_>>().join(", "))
        }
        other => other.to_string(),
    }
}

fn is_table(items: &[Value]) -> bool {
    !items.is_empty() && items.iter().all(|i| i.as_object().is_some_and(|o| o.values().all(|v| !v.is_object())))
}

fn table(out: &mut String, indent: usize, items: &[Value]) {
    let mut columns: Vec<&String> = Vec::new();
    for item in items {
        for k in item.as_object().expect("checked by is_table").keys() {
            if !columns.contains(&k) {
                columns.push(k);
            }
        }
    }
    let rows: Vec<Vec<String>> = items
        .iter()
        .map(|i| columns.iter().map(|c| i.get(c.as_str()).map_or("-".into(), scalar)).collect())
        .collect();
    let widths: Vec<usize> = columns
        .iter()
        .enumerate()
        .map(|(k, c)| rows.iter().map(|r| r[k].len()).max().unwrap_or(0).max(c.len()))
        .collect();
    let pad = " ".repeat(indent);
    let line = |cells: Vec<&str>| {
        let body: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        format!("{pad}{}\n", body.join("  ").trim_end())
    };
    out.push_str(&line(columns.iter().map(|c| c.as_str()).collect()));
    out.push_str(&line(widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().iter().map(|s| s.as_str()).collect()));
    for r in &rows {
        out.push_str(&line(r.iter().map(|s| s.as_str()).collect()));
    }
}

fn render(out: &mut String, indent: usize, key: &str, v: &Value) {
    let pad = " ".repeat(indent);
    match v {
        Value::Object(map) => {
            let _ = writeln!(out, "{pad}{key}:");
            for (k, child) in map {
                render(out, indent + 2, k, child);
            }
        }
        Value::Array(items) if is_table(items) => {
            let _ = writeln!(out, "{pad}{key}:");
            table(out, indent + 2, items);
        }
        Value::Array(items) if items.iter().any(|i| i.is_object() || i.is_array()) => {
            let _ = writeln!(out, "{pad}{key}:");
            for (n, child) in items.iter().enumerate() {
                render(out, indent + 2, &format!("[{n}]"), child);
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{key}: {}", scalar(other));
        }
    }
}

/// Indented key/value listing with arrays of flat records shown as tables.
pub fn to_text(report: &Value) -> String {
    let mut out = String::new();
    if let Some(v) = report.get("version") {
        let _ = writeln!(out, "conley-lab {}", scalar(v));
    }
    if let Some(Value::Array(results)) = report.get("results") {
        for r in results {
            let cmd = r.get("command").map_or("result".into(), scalar);
            let status = r.get("status").map_or("-".into(), scalar);
            let _ = writeln!(out, "\n== {cmd} ({status}) ==");
            if let Value::Object(map) = r {
                for (k, v) in map.iter().filter(|(k, _)| *k != "command" && *k != "status") {
                    render(&mut out, 0, k, v);
                }
            }
        }
    }
    if let Some(t) = report.get("timing") {
        out.push('\n');
        render(&mut out, 0, "timing", t);
    }
    out
}
