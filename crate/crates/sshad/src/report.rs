//! Prequential report files: a JSON document with totals and trace, and a
//! plot-ready CSV trace.

use std::fmt::Write as _;
use std::path::Path;

use sshad_core::eval::PrequentialReport;

use crate::error::{Error, Result};
use crate::io::read_file;

pub fn report_json(report: &PrequentialReport) -> Vec<u8> {
    let mut v = serde_json::to_vec_pretty(report).expect("report is serializable");
    v.push(b'\n');
    v
}

pub fn parse_report(path: &Path, bytes: &[u8]) -> Result<PrequentialReport> {
    serde_json::from_slice(bytes).map_err(|e| Error::format(path, e.to_string()))
}

pub fn load_report(path: &Path) -> Result<PrequentialReport> {
    parse_report(path, &read_file(path)?)
}

/// `instance_index,accuracy,kappa,ram_hours`, one line per snapshot.
pub fn trace_csv(report: &PrequentialReport) -> Vec<u8> {
    let mut out = String::from("instance_index,accuracy,kappa,ram_hours\n");
    for s in &report.trace {
        writeln!(out, "{},{},{},{}", s.instance, s.accuracy, s.kappa, s.ram_hours).unwrap();
    }
    out.into_bytes()
}

/// The report with wall-clock-derived fields zeroed; what remains depends
/// only on the data, the configuration and the seeds.
pub fn deterministic_part(report: &PrequentialReport) -> PrequentialReport {
    let mut r = report.clone();
    r.elapsed_seconds = 0.0;
    r.ram_hours = 0.0;
    for s in &mut r.trace {
        s.elapsed_seconds = 0.0;
        s.ram_hours = 0.0;
    }
    r
}
