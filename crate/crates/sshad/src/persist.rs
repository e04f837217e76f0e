//! On-disk formats for dictionaries, model snapshots and sparse codes.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sshad_core::omp::{Dictionary, SparseCode};
use sshad_core::tree::HoeffdingAdaptiveTree;

use crate::error::{Error, Result};
use crate::io::{read_file, write_file};

const DICT_MAGIC: &[u8; 8] = b"SSHADDIC";
const DICT_TEXT_MAGIC: &str = "sshad-dictionary";
pub const DICT_VERSION: u32 = 1;
pub const MODEL_MAGIC: &str = "sshad-hat-model";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DictFormat {
    /// Magic, `u32` version, `u64` n, `u64` m, then `n * m` little-endian
    /// `f64` values in column-major order.
    Binary,
    /// Header line, `n m` line, then one value per line with 17 significant
    /// digits, column-major.
    Text,
}

pub fn encode_dictionary(dict: &Dictionary, format: DictFormat) -> Vec<u8> {
    match format {
        DictFormat::Binary => {
            let values = dict.as_column_major();
            let mut out = Vec::with_capacity(28 + 8 * values.len());
            out.extend_from_slice(DICT_MAGIC);
            out.extend_from_slice(&DICT_VERSION.to_le_bytes());
            out.extend_from_slice(&(dict.n() as u64).to_le_bytes());
            out.extend_from_slice(&(dict.m() as u64).to_le_bytes());
            for v in values {
                out.extend_from_slice(&v.to_le_bytes());
            }
            out
        }
        DictFormat::Text => {
            let mut out = format!("{DICT_TEXT_MAGIC} {DICT_VERSION}\n{} {}\n", dict.n(), dict.m());
            for v in dict.as_column_major() {
                writeln!(out, "{v:.16e}").unwrap();
            }
            out.into_bytes()
        }
    }
}

/// Parse either dictionary format, detected from the leading magic.
pub fn decode_dictionary(path: &Path, bytes: &[u8]) -> Result<Dictionary> {
    let bad = |msg: &str| Error::format(path, msg.to_string());
    if bytes.starts_with(DICT_MAGIC) {
        if bytes.len() < 28 {
            return Err(bad("truncated dictionary header"));
        }
        let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        if version != DICT_VERSION {
            return Err(bad(&format!("unsupported dictionary version {version}")));
        }
        let n = u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize;
        let m = u64::from_le_bytes(bytes[20..28].try_into().unwrap()) as usize;
        let body = &bytes[28..];
        if n.checked_mul(m).and_then(|c| c.checked_mul(8)) != Some(body.len()) {
            return Err(bad(&format!("expected {n}x{m} values, found {} bytes", body.len())));
        }
        let values = body.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect();
        return Ok(Dictionary::from_column_major(n, m, values)?);
    }
    let text = std::str::from_utf8(bytes).map_err(|_| bad("not a dictionary file"))?;
    let mut lines = text.lines();
    let header = lines.next().unwrap_or_default();
    if header != format!("{DICT_TEXT_MAGIC} {DICT_VERSION}") {
        return Err(bad("not a dictionary file"));
    }
    let dims: Vec<usize> = lines
        .next()
        .unwrap_or_default()
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| bad("bad dimension line"))?;
    let [n, m] = dims[..] else { return Err(bad("bad dimension line")) };
    let values: Vec<f64> = lines
        .enumerate()
        .map(|(i, l)| {
            l.trim().parse::<f64>().map_err(|_| Error::Parse {
                path: path.into(),
                line: i as u64 + 3,
                msg: format!("bad value `{l}`"),
            })
        })
        .collect::<Result<_>>()?;
    if values.len() != n * m {
        return Err(bad(&format!("expected {} values, found {}", n * m, values.len())));
    }
    Ok(Dictionary::from_column_major(n, m, values)?)
}

pub fn save_dictionary(path: &Path, dict: &Dictionary, format: DictFormat) -> Result<()> {
    write_file(path, &encode_dictionary(dict, format))
}

pub fn load_dictionary(path: &Path) -> Result<Dictionary> {
    decode_dictionary(path, &read_file(path)?)
}

#[derive(Serialize, Deserialize)]
struct ModelEnvelope<T> {
    magic: String,
    version: u32,
    model: T,
}

/// Full structural dump of a tree (nodes, estimators, detectors, buffer).
/// Loading it back and continuing to learn behaves exactly like the
/// original.
pub fn encode_model(model: &HoeffdingAdaptiveTree) -> Vec<u8> {
    let env = ModelEnvelope { magic: MODEL_MAGIC.into(), version: MODEL_VERSION, model };
    serde_json::to_vec(&env).expect("model state is finite")
}

pub fn decode_model(path: &Path, bytes: &[u8]) -> Result<HoeffdingAdaptiveTree> {
    #[derive(Deserialize)]
    struct Header {
        magic: String,
        version: u32,
    }
    let header: Header =
        serde_json::from_slice(bytes).map_err(|e| Error::format(path, format!("not a model snapshot: {e}")))?;
    if header.magic != MODEL_MAGIC {
        return Err(Error::format(path, format!("bad magic `{}`", header.magic)));
    }
    if header.version != MODEL_VERSION {
        return Err(Error::format(path, format!("unsupported model version {}", header.version)));
    }
    let env: ModelEnvelope<HoeffdingAdaptiveTree> =
        serde_json::from_slice(bytes).map_err(|e| Error::format(path, e.to_string()))?;
    Ok(env.model)
}

pub fn save_model(path: &Path, model: &HoeffdingAdaptiveTree) -> Result<()> {
    write_file(path, &encode_model(model))
}

pub fn load_model(path: &Path) -> Result<HoeffdingAdaptiveTree> {
    decode_model(path, &read_file(path)?)
}

/// Sparse codes as `row,atom,value,class` lines; rows with no nonzero
/// coefficient appear once with an empty atom and value.
pub fn encode_codes_csv(codes: &[(SparseCode, usize)]) -> Vec<u8> {
    let mut out = String::from("row,atom,value,class\n");
    for (row, (code, y)) in codes.iter().enumerate() {
        if code.nnz() == 0 {
            writeln!(out, "{row},,,{y}").unwrap();
        }
        for (j, v) in code.iter() {
            writeln!(out, "{row},{j},{v:.16e},{y}").unwrap();
        }
    }
    out.into_bytes()
}

pub fn decode_codes_csv(path: &Path, bytes: &[u8], m: usize) -> Result<Vec<(SparseCode, usize)>> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes);
    let mut rows: Vec<(Vec<(usize, f64)>, usize)> = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::format(path, e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let err = |msg: &str| Error::Parse { path: path.into(), line, msg: msg.into() };
        let field = |i: usize| record.get(i).ok_or_else(|| err("missing field"));
        let row: usize = field(0)?.parse().map_err(|_| err("bad row"))?;
        let y: usize = field(3)?.parse().map_err(|_| err("bad class"))?;
        if row != rows.len() && row + 1 != rows.len() {
            return Err(err("rows must be contiguous"));
        }
        if row == rows.len() {
            rows.push((Vec::new(), y));
        }
        if !field(1)?.is_empty() {
            let j = field(1)?.parse().map_err(|_| err("bad atom index"))?;
            let v = field(2)?.parse().map_err(|_| err("bad value"))?;
            rows[row].0.push((j, v));
        }
    }
    rows.into_iter()
        .map(|(pairs, y)| Ok((SparseCode::from_pairs(m, pairs)?, y)))
        .collect()
}
