//! Dataset files: CSV with a header row and ARFF (`@relation`, `@attribute`,
//! `@data`). Labeled files carry the class in the last column.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use sshad_core::data::{DatasetSchema, Instance};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Arff,
}

impl Format {
    pub fn from_path(path: &Path) -> Option<Format> {
        match path.extension()?.to_str()?.to_ascii_lowercase().as_str() {
            "csv" => Some(Format::Csv),
            "arff" => Some(Format::Arff),
            _ => None,
        }
    }
}

/// A parsed dataset file.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub feature_names: Vec<String>,
    /// Class names in index order; empty for unlabeled files.
    pub class_names: Vec<String>,
    pub instances: Vec<Instance>,
    /// Line numbers of rows dropped for NaN, infinite or missing cells.
    pub rejected_lines: Vec<u64>,
}

impl Loaded {
    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn schema(&self) -> sshad_core::Result<DatasetSchema> {
        DatasetSchema::new(self.feature_names.clone(), self.class_names.clone())
    }
}

/// Load a dataset file.
///
/// For labeled files the class set comes from `classes` when given (labels
/// outside it are schema errors), from the ARFF nominal declaration, or
/// else from the distinct CSV labels (numeric order if all are integers,
/// lexical otherwise).
pub fn load_dataset(
    path: &Path,
    format: Format,
    labeled: bool,
    classes: Option<&[String]>,
) -> Result<Loaded> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let text = String::from_utf8(bytes).map_err(|_| Error::format(path, "file is not UTF-8"))?;
    let text = normalize_newlines(&text);
    let raw = match format {
        Format::Csv => parse_csv(path, &text, labeled)?,
        Format::Arff => parse_arff(path, &text, labeled)?,
    };
    raw.finish(path, classes)
}

fn normalize_newlines(text: &str) -> String {
    text.replace("\r\n", "\n").replace('\r', "\n")
}

/// Rows before label resolution.
struct Raw {
    feature_names: Vec<String>,
    declared_classes: Option<Vec<String>>,
    rows: Vec<(u64, Vec<f64>, Option<String>)>,
    rejected: Vec<u64>,
}

enum Cell {
    Value(f64),
    Reject,
}

fn parse_cell(path: &Path, line: u64, cell: &str, column: &str) -> Result<Cell> {
    let cell = cell.trim();
    if cell == "?" {
        return Ok(Cell::Reject);
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Cell::Value(v)),
        Ok(_) => Ok(Cell::Reject),
        Err(_) => Err(Error::Parse {
            path: path.into(),
            line,
            msg: format!("column `{column}`: cannot parse `{cell}` as a number"),
        }),
    }
}

impl Raw {
    fn push_row(&mut self, path: &Path, line: u64, cells: &[&str], labeled: bool) -> Result<()> {
        let n = self.feature_names.len();
        let expected = n + usize::from(labeled || self.declared_classes.is_some());
        if cells.len() != expected {
            return Err(Error::Parse {
                path: path.into(),
                line,
                msg: format!("expected {expected} fields, found {}", cells.len()),
            });
        }
        let mut features = Vec::with_capacity(n);
        let mut reject = false;
        for (cell, name) in cells[..n].iter().zip(&self.feature_names) {
            match parse_cell(path, line, cell, name)? {
                Cell::Value(v) => features.push(v),
                Cell::Reject => reject = true,
            }
        }
        let label = if labeled { Some(unquote(cells[n].trim()).to_string()) } else { None };
        if reject || label.as_deref() == Some("?") {
            self.rejected.push(line);
        } else {
            self.rows.push((line, features, label));
        }
        Ok(())
    }

    fn finish(self, path: &Path, classes: Option<&[String]>) -> Result<Loaded> {
        let labeled = self.rows.iter().any(|r| r.2.is_some());
        let class_names: Vec<String> = match (classes, &self.declared_classes) {
            (Some(given), _) => given.to_vec(),
            (None, Some(declared)) if labeled => declared.clone(),
            _ if labeled => discover_classes(self.rows.iter().filter_map(|r| r.2.as_deref())),
            _ => Vec::new(),
        };
        let mut instances = Vec::with_capacity(self.rows.len());
        for (line, features, label) in self.rows {
            let label = match label {
                Some(name) => Some(class_names.iter().position(|c| *c == name).ok_or_else(|| {
                    Error::Schema { path: path.into(), msg: format!("line {line}: unknown class `{name}`") }
                })?),
                None => None,
            };
            instances.push(Instance { features, label });
        }
        if labeled && class_names.len() < 2 {
            return Err(Error::Schema {
                path: path.into(),
                msg: format!("labeled data needs at least 2 classes, found {}", class_names.len()),
            });
        }
        Ok(Loaded {
            feature_names: self.feature_names,
            class_names,
            instances,
            rejected_lines: self.rejected,
        })
    }
}

fn discover_classes<'a>(labels: impl Iterator<Item = &'a str>) -> Vec<String> {
    let distinct: BTreeSet<&str> = labels.collect();
    let mut out: Vec<String> = distinct.into_iter().map(str::to_string).collect();
    if out.iter().all(|c| c.parse::<i64>().is_ok()) {
        out.sort_by_key(|c| c.parse::<i64>().unwrap());
    }
    out
}

fn parse_csv(path: &Path, text: &str, labeled: bool) -> Result<Raw> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let csv_err = |e: csv::Error| {
        let line = e.position().map_or(0, |p| p.line());
        Error::Parse { path: path.into(), line, msg: e.to_string() }
    };
    let header = reader.headers().map_err(csv_err)?.clone();
    let mut names: Vec<String> = header.iter().map(str::to_string).collect();
    if labeled {
        names.pop();
    }
    if names.is_empty() {
        return Err(Error::Schema { path: path.into(), msg: "header declares no feature columns".into() });
    }
    let mut raw = Raw { feature_names: names, declared_classes: None, rows: Vec::new(), rejected: Vec::new() };
    for record in reader.records() {
        let record = record.map_err(csv_err)?;
        let line = record.position().map_or(0, |p| p.line());
        let cells: Vec<&str> = record.iter().collect();
        raw.push_row(path, line, &cells, labeled)?;
    }
    Ok(raw)
}

fn unquote(s: &str) -> &str {
    let b = s.as_bytes();
    if b.len() >= 2 && (b[0] == b'\'' || b[0] == b'"') && b[b.len() - 1] == b[0] {
        &s[1..s.len() - 1]
    } else {
        s
    }
}

/// Split on commas outside single or double quotes.
fn split_fields(line: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut quote = None;
    let mut start = 0;
    for (i, ch) in line.char_indices() {
        match (quote, ch) {
            (None, '\'' | '"') => quote = Some(ch),
            (Some(q), c) if c == q => quote = None,
            (None, ',') => {
                out.push(line[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(line[start..].trim());
    out
}

enum AttrType {
    Numeric,
    Nominal(Vec<String>),
}

fn parse_attribute(path: &Path, line: u64, rest: &str) -> Result<(String, AttrType)> {
    let rest = rest.trim();
    let (name, tail) = match rest.chars().next() {
        Some(q @ ('\'' | '"')) => {
            let end = rest[1..].find(q).ok_or_else(|| Error::Parse {
                path: path.into(),
                line,
                msg: "unterminated quoted attribute name".into(),
            })?;
            (rest[1..=end].to_string(), rest[end + 2..].trim())
        }
        _ => {
            let end = rest.find(char::is_whitespace).unwrap_or(rest.len());
            (rest[..end].to_string(), rest[end..].trim())
        }
    };
    let lower = tail.to_ascii_lowercase();
    let ty = if matches!(lower.as_str(), "numeric" | "real" | "integer") {
        AttrType::Numeric
    } else if tail.starts_with('{') && tail.ends_with('}') {
        let values = split_fields(&tail[1..tail.len() - 1])
            .into_iter()
            .map(|v| unquote(v).to_string())
            .collect();
        AttrType::Nominal(values)
    } else {
        return Err(Error::Schema {
            path: path.into(),
            msg: format!("line {line}: attribute `{name}` has unsupported type `{tail}`"),
        });
    };
    Ok((name, ty))
}

fn parse_arff(path: &Path, text: &str, labeled: bool) -> Result<Raw> {
    let mut attributes: Vec<(String, AttrType)> = Vec::new();
    let mut raw: Option<Raw> = None;
    for (i, line) in text.lines().enumerate() {
        let line_no = i as u64 + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        if let Some(raw) = raw.as_mut() {
            if trimmed.starts_with('{') {
                return Err(Error::Parse { path: path.into(), line: line_no, msg: "sparse ARFF rows are not supported".into() });
            }
            raw.push_row(path, line_no, &split_fields(trimmed), labeled)?;
            continue;
        }
        let lower = trimmed.to_ascii_lowercase();
        if lower.starts_with("@relation") {
            continue;
        } else if lower.starts_with("@attribute") {
            attributes.push(parse_attribute(path, line_no, &trimmed["@attribute".len()..])?);
        } else if lower.starts_with("@data") {
            raw = Some(arff_header(path, std::mem::take(&mut attributes), labeled)?);
        } else {
            return Err(Error::Parse { path: path.into(), line: line_no, msg: format!("unexpected line `{trimmed}`") });
        }
    }
    raw.ok_or_else(|| Error::format(path, "no @data section"))
}

fn arff_header(path: &Path, mut attributes: Vec<(String, AttrType)>, labeled: bool) -> Result<Raw> {
    let class = match attributes.last() {
        Some((_, AttrType::Nominal(_))) => match attributes.pop() {
            Some((_, AttrType::Nominal(values))) => Some(values),
            _ => unreachable!(),
        },
        _ if labeled => {
            return Err(Error::Schema { path: path.into(), msg: "last attribute must be a nominal class".into() })
        }
        _ => None,
    };
    let mut names = Vec::with_capacity(attributes.len());
    for (name, ty) in attributes {
        if let AttrType::Nominal(_) = ty {
            return Err(Error::Schema { path: path.into(), msg: format!("feature `{name}` is not numeric") });
        }
        names.push(name);
    }
    if names.is_empty() {
        return Err(Error::Schema { path: path.into(), msg: "no numeric feature attributes".into() });
    }
    Ok(Raw { feature_names: names, declared_classes: class, rows: Vec::new(), rejected: Vec::new() })
}

/// Write instances as CSV with 17 significant digits, so that loading the
/// file back reproduces every value bit for bit. Labeled instances get a
/// trailing `class` column holding the class name.
pub fn write_csv(
    path: &Path,
    feature_names: &[String],
    class_names: &[String],
    instances: &[Instance],
) -> Result<()> {
    let labeled = instances.iter().any(|i| i.label.is_some());
    let mut out = String::new();
    out.push_str(&feature_names.join(","));
    if labeled {
        out.push_str(",class");
    }
    out.push('\n');
    for inst in instances {
        for (j, v) in inst.features.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            write!(out, "{v:.16e}").unwrap();
        }
        if labeled {
            let y = inst.label.ok_or_else(|| Error::format(path, "mixed labeled and unlabeled rows"))?;
            let name = class_names.get(y).ok_or_else(|| Error::format(path, format!("label {y} has no class name")))?;
            write!(out, ",{name}").unwrap();
        }
        out.push('\n');
    }
    write_file(path, out.as_bytes())
}

/// Write a file, creating parent directories.
pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}
