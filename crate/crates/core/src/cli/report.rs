//! Report assembly and emission (JSON or CSV).

use std::io::{self, Write};

use num_complex::Complex64;
use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use super::config::RunConfig;

/// Every float in a report is printed with 17 significant digits, enough to
/// round-trip an `f64`.
pub fn sig17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Pretty JSON with [`sig17`] floats.
struct Sig17Formatter<'a>(PrettyFormatter<'a>);

impl Formatter for Sig17Formatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(sig17(value).as_bytes())
    }

    fn begin_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_array(writer)
    }

    fn end_array<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array(writer)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(writer, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_array_value(writer)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object(writer)
    }

    fn end_object<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object(writer)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, writer: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(writer, first)
    }

    fn end_object_key<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_key(writer)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.begin_object_value(writer)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, writer: &mut W) -> io::Result<()> {
        self.0.end_object_value(writer)
    }
}

/// Serializes `value` as indented JSON with 17-digit floats and a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> serde_json::Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17Formatter(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    out.push(b'\n');
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexValue {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for ComplexValue {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    AtMost,
    #[serde(rename = ">=")]
    AtLeast,
    #[serde(rename = "|value-target|<=")]
    Near,
}

/// One pass/fail verdict with the numbers that decide it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub relation: Relation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<f64>,
    pub tolerance: f64,
}

impl Check {
    /// `value <= bound`.
    pub fn at_most(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            passed: value <= bound,
            value,
            relation: Relation::AtMost,
            target: None,
            tolerance: bound,
        }
    }

    /// `value >= bound`.
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            passed: value >= bound,
            value,
            relation: Relation::AtLeast,
            target: None,
            tolerance: bound,
        }
    }

    /// `|value - target| <= tolerance`.
    pub fn near(name: impl Into<String>, value: f64, target: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            passed: (value - target).abs() <= tolerance,
            value,
            relation: Relation::Near,
            target: Some(target),
            tolerance,
        }
    }

    pub fn prefixed(mut self, prefix: &str) -> Self {
        self.name = format!("{prefix}.{}", self.name);
        self
    }
}

/// The resolved configuration as echoed in every report. The output path
/// is left out so that the same run written to two places stays identical.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub hbar: f64,
    pub c: f64,
    pub coupling: f64,
    pub v_c: f64,
    pub v_c_override: bool,
    pub lambda_grid: Vec<f64>,
    pub n_interior: usize,
    pub k_eigs: usize,
    pub format: &'static str,
    pub seed: u64,
}

impl From<&RunConfig> for ConfigEcho {
    fn from(config: &RunConfig) -> Self {
        let spec = config.operator();
        Self {
            hbar: config.hbar,
            c: config.c,
            coupling: spec.coupling(),
            v_c: spec.v_c(),
            v_c_override: config.v_c_override.is_some(),
            lambda_grid: config.lambda_grid.clone(),
            n_interior: config.n_interior,
            k_eigs: config.k_eigs,
            format: config.output_format.as_str(),
            seed: config.seed,
        }
    }
}

/// A flat table for CSV output.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> csv::Result<Vec<u8>> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::CRLF)
            .from_writer(Vec::new());
        writer.write_record(&self.header)?;
        for row in &self.rows {
            writer.write_record(row)?;
        }
        writer.flush()?;
        writer.into_inner().map_err(|e| e.into_error().into())
    }
}

/// Per-subcommand content of a report.
pub trait Payload: Serialize {
    fn table(&self, checks: &[Check]) -> Table;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report<P> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: ConfigEcho,
    #[serde(flatten)]
    pub payload: P,
    pub checks: Vec<Check>,
    pub passed: bool,
}

impl<P: Payload> Report<P> {
    pub fn new(command: &'static str, config: &RunConfig, payload: P, checks: Vec<Check>) -> Self {
        let passed = checks.iter().all(|c| c.passed);
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            config: config.into(),
            payload,
            checks,
            passed,
        }
    }

    pub fn failed_checks(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    /// Encoded report bytes in the configured format.
    pub fn render(&self, format: super::config::OutputFormat) -> io::Result<Vec<u8>> {
        match format {
            super::config::OutputFormat::Json => to_json(self).map_err(io::Error::other),
            super::config::OutputFormat::Csv => self.payload.table(&self.checks).to_csv().map_err(io::Error::other),
        }
    }
}

/// The table used by subcommands whose natural output is the check list.
pub fn checks_table(checks: &[Check]) -> Table {
    let mut table = Table::new(vec!["check", "passed", "value", "relation", "target", "tolerance"]);
    for c in checks {
        table.push(vec![
            c.name.clone(),
            c.passed.to_string(),
            sig17(c.value),
            match c.relation {
                Relation::AtMost => "<=",
                Relation::AtLeast => ">=",
                Relation::Near => "|value-target|<=",
            }
            .to_string(),
            c.target.map(sig17).unwrap_or_default(),
            sig17(c.tolerance),
        ]);
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_with_17_digits() {
        for x in [0.1, std::f64::consts::PI, -8.229_511_331_886_018, 1e-300, 6.02e23, 1.0] {
            let s = sig17(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.split('e').next().unwrap().replace(['-', '.'], "");
            assert_eq!(mantissa.len(), 17, "{s}");
        }
    }

    #[test]
    fn json_uses_17_digits_and_nulls_non_finite() {
        #[derive(Serialize)]
        struct S {
            a: f64,
            b: f64,
            n: usize,
            v: Vec<f64>,
        }
        let bytes = to_json(&S {
            a: 0.1,
            b: f64::NAN,
            n: 3,
            v: vec![],
        })
        .unwrap();
        let text = String::from_utf8(bytes).unwrap();
        assert!(text.contains("\"a\": 1.0000000000000001e-1"), "{text}");
        assert!(text.contains("\"b\": null"));
        assert!(text.contains("\"n\": 3"));
        let back: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["a"].as_f64(), Some(0.1));
    }

    #[test]
    fn checks_compare_as_named() {
        assert!(Check::at_most("a", 1.0, 1.0).passed);
        assert!(!Check::at_most("a", f64::NAN, 1.0).passed);
        assert!(Check::at_least("b", 2.0, 1.0).passed);
        assert!(Check::near("c", 4.1, 4.0, 0.2).passed);
        assert!(!Check::near("c", 3.7, 4.0, 0.2).passed);
        assert_eq!(Check::at_most("a", 0.0, 1.0).prefixed("s").name, "s.a");
    }

    #[test]
    fn csv_quotes_fields() {
        let mut t = Table::new(vec!["label", "x"]);
        t.push(vec!["<a, b>".into(), "1".into()]);
        let text = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(text, "label,x\r\n\"<a, b>\",1\r\n");
    }
}
