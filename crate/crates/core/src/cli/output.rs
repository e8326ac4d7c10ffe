//! Report serialization: JSON with fixed 17-significant-digit floats, and
//! CSV of per-point residuals.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};

use crate::point::Point;
use crate::stability::BoundCheck;

/// Pretty JSON whose floats are always written as `{:.16e}`, so equal
/// values give equal bytes regardless of how they were computed.
struct SciFormatter<'a>(PrettyFormatter<'a>);

impl Formatter for SciFormatter<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        write!(w, "{:.16e}", value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("report serialization cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

/// One entry of the `bounds` array.
#[derive(Debug, Clone, Serialize)]
pub struct BoundEntry {
    pub name: String,
    pub measured: f64,
    pub coefficient: f64,
    pub bound: f64,
    pub ratio: f64,
    pub verdict: &'static str,
    pub informational: bool,
}

impl From<&BoundCheck> for BoundEntry {
    fn from(c: &BoundCheck) -> Self {
        BoundEntry {
            name: c.name.clone(),
            measured: c.measured,
            coefficient: c.coefficient,
            bound: c.bound,
            ratio: c.ratio,
            verdict: if c.pass { "pass" } else { "fail" },
            informational: c.informational,
        }
    }
}

/// A per-point residual row.
#[derive(Debug, Clone)]
pub struct ResidualRow {
    pub point: Point,
    pub residual: &'static str,
    pub value: f64,
}

pub fn write_csv<W: Write>(out: W, dim: usize, rows: &[ResidualRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<String> = (0..dim).map(|i| format!("x{i}")).collect();
    header.push("residual".into());
    header.push("value".into());
    w.write_record(&header)?;
    for row in rows {
        let mut rec: Vec<String> = row.point.coords().iter().map(|c| format!("{c:.16e}")).collect();
        rec.push(row.residual.to_string());
        rec.push(format!("{:.16e}", row.value));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
