//! CSV and JSON emission.
//!
//! Floats are written with 17 significant digits in both formats, so a value
//! parsed back from either is the same `f64`. Exact integers are written in
//! full.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// `x` with 17 significant digits.
pub fn f17(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

/// Float serialized through [`f17`]; non-finite values become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        raw(f17(self.0), s)
    }
}

/// Exact integer kept as a JSON number of arbitrary length.
#[derive(Debug, Clone, PartialEq)]
pub struct Int(pub String);

impl Int {
    pub fn of(v: impl ToString) -> Self {
        Int(v.to_string())
    }
}

impl Serialize for Int {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        raw(self.0.clone(), s)
    }
}

fn raw<S: Serializer>(text: String, s: S) -> Result<S::Ok, S::Error> {
    RawValue::from_string(text)
        .map_err(serde::ser::Error::custom)?
        .serialize(s)
}

/// Exact or floating value, written as whichever it is.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Value {
    Exact(Int),
    Float(Num),
}

impl Value {
    pub fn cell(&self) -> String {
        match self {
            Value::Exact(i) => i.0.clone(),
            Value::Float(x) => f17(x.0),
        }
    }
}

impl From<&divconv::arith::Number> for Value {
    fn from(n: &divconv::arith::Number) -> Self {
        match n {
            divconv::arith::Number::Exact(v) => Value::Exact(Int::of(v)),
            divconv::arith::Number::Float(x) => Value::Float(Num(*x)),
        }
    }
}

/// A command result that can be written as a table or as one JSON document.
pub trait Report: Serialize {
    fn header(&self) -> Vec<&'static str>;
    fn rows(&self) -> Vec<Vec<String>>;
    /// Trailing summary row, padded to the header width.
    fn footer(&self) -> Option<Vec<String>> {
        None
    }
}

fn sink(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn emit<R: Report>(report: &R, format: Format, path: Option<&Path>) -> io::Result<()> {
    let mut out = sink(path)?;
    match format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut out, report)?;
            out.write_all(b"\n")?;
        }
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(&mut out);
            let header = report.header();
            w.write_record(&header)?;
            for row in report.rows() {
                w.write_record(&row)?;
            }
            if let Some(mut f) = report.footer() {
                f.resize(header.len(), String::new());
                w.write_record(&f)?;
            }
            w.flush()?;
        }
    }
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0] {
            let s = f17(x);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), x.to_bits(), "{s}");
            let j = serde_json::to_string(&Num(x)).unwrap();
            assert_eq!(j, s);
            assert_eq!(serde_json::from_str::<f64>(&j).unwrap().to_bits(), x.to_bits());
        }
        assert_eq!(f17(0.1), "1.0000000000000001e-1");
        assert_eq!(serde_json::to_string(&Num(f64::NAN)).unwrap(), "null");
    }

    #[test]
    fn big_integers_stay_exact() {
        let big = "123456789012345678901234567890";
        assert_eq!(serde_json::to_string(&Int(big.into())).unwrap(), big);
    }
}
