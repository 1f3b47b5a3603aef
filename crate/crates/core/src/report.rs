//! Verdicts, reports and tabular output.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

/// Outcome of a certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// Fail dominates, then Inconclusive.
    pub fn combine(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }

    pub fn all(vs: impl IntoIterator<Item = Verdict>) -> Verdict {
        vs.into_iter().fold(Verdict::Pass, Verdict::combine)
    }

    /// Process exit code: 0 pass, 1 fail, 2 inconclusive.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// A checked inequality `lhs < rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Margin {
    pub fn less_than(label: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            label: label.into(),
            lhs,
            rhs,
            holds: lhs < rhs,
        }
    }

    pub fn slack(&self) -> f64 {
        self.rhs - self.lhs
    }
}

/// Verdict together with the inequalities behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertReport {
    pub subject: String,
    pub verdict: Verdict,
    pub margins: Vec<Margin>,
    pub flags: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

impl CertReport {
    pub fn new(subject: impl Into<String>, verdict: Verdict) -> Self {
        Self {
            subject: subject.into(),
            verdict,
            margins: Vec::new(),
            flags: Vec::new(),
            epsilon: None,
        }
    }
}

/// A row that knows its CSV header and fields.
pub trait CsvRecord {
    fn header() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

/// Rows of one of the output tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffTable<R> {
    pub name: String,
    pub rows: Vec<R>,
}

impl<R: CsvRecord> CoeffTable<R> {
    pub fn new(name: impl Into<String>, rows: Vec<R>) -> Self {
        Self { name: name.into(), rows }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{}", R::header().join(","))?;
        for r in &self.rows {
            writeln!(w, "{}", r.fields().join(","))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

/// Round up to `places` decimals.
pub fn round_up(x: f64, places: i32) -> f64 {
    let s = 10f64.powi(places);
    let y = x * s;
    let r = y.round();
    // values within a few ulps of a grid point stay on it
    if (y - r).abs() <= 8.0 * f64::EPSILON * y.abs().max(1.0) {
        r / s
    } else {
        y.ceil() / s
    }
}

/// Round down to `places` decimals.
pub fn round_down(x: f64, places: i32) -> f64 {
    -round_up(-x, places)
}

/// Fixed-point rendering used in CSV cells.
pub fn fixed(x: f64, places: usize) -> String {
    format!("{x:.places$}")
}
