//! Feature files.
//!
//! Binary layout (all integers little-endian):
//!
//! | bytes | field                                   |
//! |-------|-----------------------------------------|
//! | 4     | magic `VQCF`                            |
//! | 2     | format version, u16 = 1                 |
//! | 8     | sample count, u64                       |
//! | 4     | feature dimension, u32 (must be 512)    |
//! | ...   | per sample: 512 x f32, then a label u8  |
//!
//! The CSV form has one sample per line: 512 decimal floats followed by the
//! integer label, comma separated, no header.

use std::path::Path;

use super::{Sample, FEATURE_DIM};
use crate::error::{Error, Result};
use crate::io::write_atomic;

const MAGIC: &[u8; 4] = b"VQCF";
const VERSION: u16 = 1;
const HEADER_LEN: usize = 18;
const RECORD_LEN: usize = FEATURE_DIM * 4 + 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeatureFormat {
    Binary,
    Csv,
}

impl FeatureFormat {
    /// `.csv` selects CSV; anything else is binary.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => FeatureFormat::Csv,
            _ => FeatureFormat::Binary,
        }
    }
}

pub fn encode_binary(samples: &[Sample]) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + samples.len() * RECORD_LEN);
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.extend_from_slice(&(samples.len() as u64).to_le_bytes());
    out.extend_from_slice(&(FEATURE_DIM as u32).to_le_bytes());
    for s in samples {
        for f in s.features() {
            out.extend_from_slice(&f.to_le_bytes());
        }
        out.push(s.label());
    }
    out
}

fn take<'a>(bytes: &'a [u8], offset: usize, len: usize, what: &str) -> Result<&'a [u8]> {
    bytes.get(offset..offset + len).ok_or_else(|| {
        Error::format(
            bytes.len() as u64,
            format!("truncated file while reading {what}"),
        )
    })
}

pub fn decode_binary(bytes: &[u8]) -> Result<Vec<Sample>> {
    if take(bytes, 0, 4, "magic")? != MAGIC {
        return Err(Error::format(0, "bad magic, expected VQCF"));
    }
    let version = u16::from_le_bytes(take(bytes, 4, 2, "version")?.try_into().unwrap());
    if version != VERSION {
        return Err(Error::format(4, format!("unsupported version {version}")));
    }
    let count = u64::from_le_bytes(take(bytes, 6, 8, "sample count")?.try_into().unwrap());
    let dim = u32::from_le_bytes(take(bytes, 14, 4, "dimension")?.try_into().unwrap());
    if dim as usize != FEATURE_DIM {
        return Err(Error::format(
            14,
            format!("dimension {dim}, expected {FEATURE_DIM}"),
        ));
    }
    let expected = (count as u128) * RECORD_LEN as u128 + HEADER_LEN as u128;
    if (bytes.len() as u128) < expected {
        return Err(Error::format(
            bytes.len() as u64,
            format!("truncated file: {count} samples need {expected} bytes"),
        ));
    }
    if bytes.len() as u128 > expected {
        return Err(Error::format(
            expected as u64,
            "trailing bytes after last sample",
        ));
    }
    let mut out = Vec::with_capacity(count as usize);
    for i in 0..count as usize {
        let start = HEADER_LEN + i * RECORD_LEN;
        let record = &bytes[start..start + RECORD_LEN];
        let features: Vec<f32> = record[..FEATURE_DIM * 4]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        let label_offset = (start + FEATURE_DIM * 4) as u64;
        let label = record[FEATURE_DIM * 4];
        let sample = Sample::new(features, label).map_err(|e| {
            Error::format(
                if label > 1 {
                    label_offset
                } else {
                    start as u64
                },
                e.to_string(),
            )
        })?;
        out.push(sample);
    }
    Ok(out)
}

pub fn encode_csv(samples: &[Sample]) -> String {
    let mut out = String::new();
    for s in samples {
        for f in s.features() {
            out.push_str(&f.to_string());
            out.push(',');
        }
        out.push_str(&s.label().to_string());
        out.push('\n');
    }
    out
}

pub fn decode_csv(text: &str) -> Result<Vec<Sample>> {
    let mut out = Vec::new();
    let mut offset = 0u64;
    for line in text.split_inclusive('\n') {
        let line_offset = offset;
        offset += line.len() as u64;
        let content = line.trim_end_matches(['\n', '\r']);
        if content.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split(',').collect();
        if fields.len() != FEATURE_DIM + 1 {
            return Err(Error::format(
                line_offset,
                format!(
                    "expected {} fields, found {}",
                    FEATURE_DIM + 1,
                    fields.len()
                ),
            ));
        }
        let mut field_offset = line_offset;
        let mut features = Vec::with_capacity(FEATURE_DIM);
        for field in &fields[..FEATURE_DIM] {
            let v: f32 = field
                .trim()
                .parse()
                .map_err(|_| Error::format(field_offset, format!("bad float {field:?}")))?;
            features.push(v);
            field_offset += field.len() as u64 + 1;
        }
        let label_field = fields[FEATURE_DIM].trim();
        let label: u8 = label_field
            .parse()
            .map_err(|_| Error::format(field_offset, format!("bad label {label_field:?}")))?;
        out.push(
            Sample::new(features, label).map_err(|e| Error::format(line_offset, e.to_string()))?,
        );
    }
    Ok(out)
}

pub fn read_features(path: &Path) -> Result<Vec<Sample>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    match FeatureFormat::from_path(path) {
        FeatureFormat::Binary => decode_binary(&bytes),
        FeatureFormat::Csv => {
            let text = std::str::from_utf8(&bytes)
                .map_err(|e| Error::format(e.valid_up_to() as u64, "CSV file is not UTF-8"))?;
            decode_csv(text)
        }
    }
}

pub fn write_features(path: &Path, samples: &[Sample]) -> Result<()> {
    let bytes = match FeatureFormat::from_path(path) {
        FeatureFormat::Binary => encode_binary(samples),
        FeatureFormat::Csv => encode_csv(samples).into_bytes(),
    };
    write_atomic(path, &bytes)
}
