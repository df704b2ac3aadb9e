//! Machine-readable output: JSON with 17-significant-digit floats and flat
//! CSV tables.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

/// Decimal rendering with 17 significant digits (round-trips any `f64`).
pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".to_string()
    } else if x > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

struct DigitsFormatter<'a> {
    inner: PrettyFormatter<'a>,
}

impl Formatter for DigitsFormatter<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(fmt_num(value).as_bytes())
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.inner.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.inner.end_object_value(writer)
    }
}

/// Pretty JSON whose floats carry 17 significant digits. Non-finite
/// floats become `null`.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut buf = Vec::new();
    let fmt = DigitsFormatter {
        inner: PrettyFormatter::with_indent(b"  "),
    };
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, fmt);
    value.serialize(&mut ser)?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

/// CSV cell for a number.
pub fn cell(x: f64) -> String {
    fmt_num(x)
}

/// Flat table rendered as CSV.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Long-format row `key, metric, value`.
    pub fn push_kv(&mut self, key: impl Into<String>, metric: impl Into<String>, value: f64) {
        self.push(vec![key.into(), metric.into(), cell(value)]);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for line in std::iter::once(&self.header).chain(&self.rows) {
            let escaped: Vec<String> = line.iter().map(|c| escape(c)).collect();
            out.push_str(&escaped.join(","));
            out.push('\n');
        }
        out
    }
}

fn escape(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(fmt_num(2.0), "2.0000000000000000e0");
        assert_eq!(fmt_num(-0.001953125), "-1.9531250000000000e-3");
        let x = 0.1 + 0.2;
        assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn json_is_valid_and_exact() {
        #[derive(Serialize)]
        struct S {
            a: f64,
            b: Vec<f64>,
            n: usize,
            bad: f64,
        }
        let text = to_json(&S {
            a: 1.0 / 3.0,
            b: vec![2.0, -1e-300],
            n: 4,
            bad: f64::NAN,
        })
        .unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["a"].as_f64().unwrap(), 1.0 / 3.0);
        assert_eq!(v["b"][1].as_f64().unwrap(), -1e-300);
        assert_eq!(v["n"].as_u64().unwrap(), 4);
        assert!(v["bad"].is_null());
        assert!(text.contains("3.3333333333333331e-1"));
    }

    #[test]
    fn csv_escaping() {
        let mut t = Table::new(["key", "metric", "value"]);
        t.push_kv("a,b", "m", 1.0);
        assert_eq!(t.to_csv(), "key,metric,value\n\"a,b\",m,1.0000000000000000e0\n");
    }
}
