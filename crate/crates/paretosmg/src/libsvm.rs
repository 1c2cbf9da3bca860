//! LIBSVM text format: one example per line, `<label> <index>:<value> ...`.
//!
//! Indices are 1-based in the file and 0-based in memory. Labels `{-1, +1}` are
//! kept; `{0, 1}` and `{1, 2}` are mapped to `{-1, +1}` with the smaller value
//! becoming `-1`.

use std::fmt::Write as _;
use std::io::BufRead;

use paretosmg_core::logreg::{Dataset, Row};

#[derive(Debug, thiserror::Error)]
pub enum LibsvmError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("labels {0:?} are not one of {{-1,+1}}, {{0,1}} or {{1,2}}")]
    Labels(Vec<f64>),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Invalid(#[from] paretosmg_core::Error),
}

/// How source labels were mapped onto `±1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LabelMapping {
    Identity,
    /// `(source of -1, source of +1)`.
    Mapped(f64, f64),
}

fn syntax(line: usize, msg: impl Into<String>) -> LibsvmError {
    LibsvmError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// Parses a whole LIBSVM stream; blank lines are skipped.
pub fn parse_libsvm(reader: impl BufRead) -> Result<(Dataset, LabelMapping), LibsvmError> {
    let mut raw: Vec<(f64, Vec<(usize, f64)>)> = Vec::new();
    let mut dim = 0usize;
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = k + 1;
        let mut tokens = line.split_whitespace();
        let Some(label) = tokens.next() else { continue };
        let label: f64 = label
            .parse()
            .map_err(|_| syntax(lineno, format!("label {label:?} is not a number")))?;
        if !label.is_finite() {
            return Err(syntax(lineno, "label is not finite"));
        }
        let mut features = Vec::new();
        let mut prev = 0usize;
        for token in tokens {
            let (index, value) = token
                .split_once(':')
                .ok_or_else(|| syntax(lineno, format!("token {token:?} is not index:value")))?;
            let index: usize = index
                .parse()
                .map_err(|_| syntax(lineno, format!("index {index:?} is not a positive integer")))?;
            if index == 0 {
                return Err(syntax(lineno, "indices start at 1"));
            }
            if index <= prev {
                return Err(syntax(lineno, format!("index {index} does not increase")));
            }
            let value: f64 = value
                .parse()
                .map_err(|_| syntax(lineno, format!("value {value:?} is not a number")))?;
            if !value.is_finite() {
                return Err(syntax(lineno, format!("value at index {index} is not finite")));
            }
            prev = index;
            features.push((index - 1, value));
        }
        dim = dim.max(prev);
        raw.push((label, features));
    }

    let mut labels: Vec<f64> = raw.iter().map(|r| r.0).collect();
    labels.sort_by(f64::total_cmp);
    labels.dedup();
    let within = |set: &[f64]| labels.iter().all(|l| set.contains(l));
    let mapping = if within(&[-1.0, 1.0]) {
        LabelMapping::Identity
    } else if within(&[0.0, 1.0]) {
        LabelMapping::Mapped(0.0, 1.0)
    } else if within(&[1.0, 2.0]) {
        LabelMapping::Mapped(1.0, 2.0)
    } else {
        return Err(LibsvmError::Labels(labels));
    };
    if let LabelMapping::Mapped(neg, pos) = mapping {
        log::info!("mapping labels {neg} -> -1 and {pos} -> +1");
    }
    let rows = raw
        .into_iter()
        .map(|(label, features)| Row {
            label: match mapping {
                LabelMapping::Identity => label,
                LabelMapping::Mapped(neg, _) => {
                    if label == neg {
                        -1.0
                    } else {
                        1.0
                    }
                }
            },
            features,
        })
        .collect();
    Ok((Dataset::new(rows, dim)?, mapping))
}

/// Writes `d` back in LIBSVM format with `±1` labels and shortest round-trip values.
pub fn write_libsvm(d: &Dataset) -> String {
    let mut out = String::new();
    for row in d.rows() {
        out.push_str(if row.label > 0.0 { "+1" } else { "-1" });
        for &(j, v) in &row.features {
            let _ = write!(out, " {}:{}", j + 1, v);
        }
        out.push('\n');
    }
    out
}
