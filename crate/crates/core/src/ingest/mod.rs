//! Reading instances and writing run reports.

mod canonical;
mod qplib;
mod report;

pub use canonical::{parse_canonical, write_canonical};
pub use qplib::parse_qplib;
pub use report::{millis, read_report, write_report, ConfigEcho, ReportEvent, ReportMetrics, ReportStats, RunReport, RunStatus};

use std::path::Path;

use crate::error::{Error, Result};
use crate::model::Problem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Canonical,
    Qplib,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "canonical" => Ok(Format::Canonical),
            "qplib" => Ok(Format::Qplib),
            other => Err(Error::InvalidInput(format!("unknown format '{other}'"))),
        }
    }
}

impl Format {
    /// `.qplib` files are QPLIB, everything else canonical.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(ext) if ext.eq_ignore_ascii_case("qplib") => Format::Qplib,
            _ => Format::Canonical,
        }
    }
}

pub fn parse(text: &str, format: Format) -> Result<Problem> {
    match format {
        Format::Canonical => parse_canonical(text),
        Format::Qplib => parse_qplib(text),
    }
}

pub fn read_problem(path: &Path, format: Format) -> Result<Problem> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    parse(&text, format)
}
