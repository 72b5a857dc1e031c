//! Report serialization: canonical JSON and one-row-per-quantity CSV.

use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use qwave_core::{ExperimentReport, ParamValue};

/// Pretty JSON with every float printed to 17 significant digits.
struct FixedFloats<'a>(PrettyFormatter<'a>);

impl Formatter for FixedFloats<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        write!(writer, "{}", fmt_f64(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

/// `d.dddddddddddddddde±x`; zero prints as `0.0`.
pub fn fmt_f64(value: f64) -> String {
    if value == 0.0 {
        "0.0".to_string()
    } else {
        format!("{value:.16e}")
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, FixedFloats(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("in-memory serialization");
    buf.push(b'\n');
    String::from_utf8(buf).expect("JSON is UTF-8")
}

pub fn report_json(report: &ExperimentReport) -> String {
    to_json(report)
}

fn param_text(v: &ParamValue) -> String {
    match v {
        ParamValue::Count(c) => c.to_string(),
        ParamValue::Real(x) => fmt_f64(*x),
        ParamValue::Reals(xs) => xs.iter().map(|x| fmt_f64(*x)).collect::<Vec<_>>().join(" "),
        ParamValue::Text(s) => s.clone(),
    }
}

/// Columns `section,name,value,count`.
pub fn report_csv(report: &ExperimentReport) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut row = |section: &str, name: &str, value: String, count: String| {
        w.write_record([section, name, &value, &count]).expect("in-memory CSV");
    };
    row("section", "name", "value".into(), "count".into());
    row("meta", "experiment", report.experiment.clone(), String::new());
    row("meta", "seed", report.seed.to_string(), String::new());
    row("meta", "shots", report.shots.to_string(), String::new());
    row("meta", "pass", report.pass.to_string(), String::new());
    for (k, v) in &report.params {
        row("param", k, param_text(v), String::new());
    }
    for (k, v) in &report.analytic {
        row("analytic", k, fmt_f64(*v), String::new());
    }
    for (k, v) in &report.empirical {
        row("empirical", k, fmt_f64(v.value), v.count.to_string());
    }
    for (k, v) in &report.discrepancies {
        row("discrepancy", k, fmt_f64(*v), String::new());
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("CSV is UTF-8")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        assert_eq!(fmt_f64(0.1), "1.0000000000000001e-1");
        assert_eq!(fmt_f64(0.0), "0.0");
        let x = 0.8535533905932737_f64;
        assert_eq!(fmt_f64(x).parse::<f64>().unwrap(), x);
        let json = to_json(&vec![1.5_f64, f64::NAN]);
        let back: Vec<Option<f64>> = serde_json::from_str(&json).unwrap();
        assert_eq!(back, vec![Some(1.5), None]);
    }

    #[test]
    fn csv_quotes_names_with_commas() {
        let mut r = ExperimentReport::new("x", 1, 10);
        r.analytic("prob(+,+)", 0.5);
        r.empirical("prob(+,+)", 0.5, 10);
        let text = report_csv(&r.finish());
        assert!(text.contains("empirical,\"prob(+,+)\",5.0000000000000000e-1,10"));
    }
}
