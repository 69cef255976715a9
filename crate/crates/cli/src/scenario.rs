//! Scenario inputs: channel specifications and sweep ranges.
//!
//! A channel is given either inline as `case:<id>,<epsilon>,<delta>` or as a
//! path to a description file. Description files are flat `key = value`
//! text with one level of `[section]` headers:
//!
//! ```text
//! [channel]
//! x_size = 3
//! y_size = 3
//! z_size = 3
//!
//! [noise]
//! # n1 n2 probability   (or: n0 n1 n2 probability)
//! row = 0 0 0.7
//! row = 1 1 0.2
//! row = 2 2 0.1
//! ```
//!
//! or, for the binary symmetric cases,
//!
//! ```text
//! [case]
//! id = 2
//! epsilon = 0.3
//! delta = 0.1
//! ```
//!
//! Case 5 additionally takes `row = n1 n2 probability` lines for the joint
//! noise law; its marginals must match `epsilon` and `delta`.

use std::fs;
use std::path::Path;

use modtap::{build_bsc_case, BscCase, JointPmf, WiretapChannel};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    #[error("channel spec '{spec}': {message}")]
    Spec { spec: String, message: String },
    #[error("range '{range}': {message}")]
    Range { range: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

impl ConfigError {
    pub fn invalid(message: impl Into<String>) -> Self {
        ConfigError::Invalid(message.into())
    }
}

/// Builds a case from its numeric id; case 5 needs the explicit joint.
pub fn make_case(
    id: u8,
    epsilon: f64,
    delta: f64,
    joint: Option<&JointPmf>,
) -> Result<BscCase, ConfigError> {
    match id {
        1 => {
            if epsilon != 0.0 || delta != 0.0 {
                return Err(ConfigError::invalid(format!(
                    "case 1 forces epsilon = delta = 0, got ({epsilon}, {delta})"
                )));
            }
            Ok(BscCase::Noiseless)
        }
        2 => Ok(BscCase::Independent { epsilon, delta }),
        3 => Ok(BscCase::MainDegraded { epsilon, delta }),
        4 => Ok(BscCase::WiretapDegraded { epsilon, delta }),
        5 => match joint {
            Some(joint) => Ok(BscCase::Correlated {
                epsilon,
                delta,
                joint: joint.clone(),
            }),
            None => Err(ConfigError::invalid(
                "case 5 needs an explicit joint noise law (use a channel file with rows)",
            )),
        },
        other => Err(ConfigError::invalid(format!(
            "unknown case id {other}, expected 1..=5"
        ))),
    }
}

/// Loads a channel from a spec string: `case:<id>,<eps>,<delta>` or a file
/// path.
pub fn load_channel(spec: &str) -> Result<WiretapChannel, ConfigError> {
    if let Some(rest) = spec.strip_prefix("case:") {
        let case = parse_inline_case(spec, rest)?;
        return build_bsc_case(&case).map_err(|e| ConfigError::Spec {
            spec: spec.to_string(),
            message: e.to_string(),
        });
    }
    load_channel_file(Path::new(spec))
}

fn parse_inline_case(spec: &str, rest: &str) -> Result<BscCase, ConfigError> {
    let err = |message: String| ConfigError::Spec {
        spec: spec.to_string(),
        message,
    };
    let parts: Vec<&str> = rest.split(',').collect();
    let id: u8 = parts[0]
        .trim()
        .parse()
        .map_err(|_| err(format!("bad case id '{}'", parts[0])))?;
    let num = |i: usize| -> Result<f64, ConfigError> {
        parts
            .get(i)
            .ok_or_else(|| err(format!("case {id} needs epsilon and delta")))?
            .trim()
            .parse()
            .map_err(|_| err(format!("bad number '{}'", parts[i])))
    };
    let (epsilon, delta) = if id == 1 && parts.len() == 1 {
        (0.0, 0.0)
    } else {
        (num(1)?, num(2)?)
    };
    if parts.len() > 3 {
        return Err(err(
            "too many fields, expected case:<id>,<eps>,<delta>".into()
        ));
    }
    make_case(id, epsilon, delta, None).map_err(|e| err(e.to_string()))
}

/// One `key = value` entry of a description file.
struct Entry {
    section: String,
    key: String,
    value: String,
    line: usize,
}

fn parse_entries(path: &str, text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut section = String::new();
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let stripped = raw.split('#').next().unwrap_or("").trim();
        if stripped.is_empty() {
            continue;
        }
        if let Some(name) = stripped.strip_prefix('[') {
            let name = name.strip_suffix(']').ok_or_else(|| ConfigError::Parse {
                path: path.to_string(),
                line,
                message: "unterminated section header".into(),
            })?;
            section = name.trim().to_string();
            continue;
        }
        let (key, value) = stripped.split_once('=').ok_or_else(|| ConfigError::Parse {
            path: path.to_string(),
            line,
            message: "expected 'key = value'".into(),
        })?;
        entries.push(Entry {
            section: section.clone(),
            key: key.trim().to_string(),
            value: value.trim().to_string(),
            line,
        });
    }
    Ok(entries)
}

pub fn load_channel_file(path: &Path) -> Result<WiretapChannel, ConfigError> {
    let path_str = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path_str.clone(),
        source,
    })?;
    let entries = parse_entries(&path_str, &text)?;
    let perr = |line: usize, message: String| ConfigError::Parse {
        path: path_str.clone(),
        line,
        message,
    };

    let has_case = entries.iter().any(|e| e.section == "case");
    if has_case {
        let mut id = None;
        let mut epsilon = None;
        let mut delta = None;
        let mut rows: Vec<(Vec<usize>, f64)> = Vec::new();
        for e in entries.iter().filter(|e| e.section == "case") {
            match e.key.as_str() {
                "id" => id = Some(parse_num::<u8>(&e.value).map_err(|m| perr(e.line, m))?),
                "epsilon" => {
                    epsilon = Some(parse_num::<f64>(&e.value).map_err(|m| perr(e.line, m))?)
                }
                "delta" => delta = Some(parse_num::<f64>(&e.value).map_err(|m| perr(e.line, m))?),
                "row" => rows.push(parse_row(&e.value).map_err(|m| perr(e.line, m))?),
                other => return Err(perr(e.line, format!("unknown key '{other}' in [case]"))),
            }
        }
        let id = id.ok_or_else(|| ConfigError::invalid(format!("{path_str}: missing case id")))?;
        let epsilon = epsilon.unwrap_or(0.0);
        let delta = delta.unwrap_or(0.0);
        let joint = if rows.is_empty() {
            None
        } else {
            Some(rows_to_joint(&[2, 2], &rows, 2)?)
        };
        let case = make_case(id, epsilon, delta, joint.as_ref())?;
        return build_bsc_case(&case).map_err(|e| ConfigError::invalid(e.to_string()));
    }

    // Explicit channel: sizes plus noise rows.
    let mut x_size = None;
    let mut y_size = None;
    let mut z_size = None;
    let mut y0_size = None;
    for e in entries.iter().filter(|e| e.section == "channel") {
        let v = parse_num::<usize>(&e.value).map_err(|m| perr(e.line, m))?;
        match e.key.as_str() {
            "x_size" => x_size = Some(v),
            "y_size" => y_size = Some(v),
            "z_size" => z_size = Some(v),
            "y0_size" => y0_size = Some(v),
            other => return Err(perr(e.line, format!("unknown key '{other}' in [channel]"))),
        }
    }
    let need = |name: &str, v: Option<usize>| {
        v.ok_or_else(|| ConfigError::invalid(format!("{path_str}: missing [channel] {name}")))
    };
    let x_size = need("x_size", x_size)?;
    let y_size = need("y_size", y_size)?;
    let z_size = need("z_size", z_size)?;

    let mut rows: Vec<(Vec<usize>, f64)> = Vec::new();
    for e in entries.iter().filter(|e| e.section == "noise") {
        if e.key != "row" {
            return Err(perr(e.line, format!("unknown key '{}' in [noise]", e.key)));
        }
        rows.push(parse_row(&e.value).map_err(|m| perr(e.line, m))?);
    }
    if rows.is_empty() {
        return Err(ConfigError::invalid(format!(
            "{path_str}: no [noise] rows given"
        )));
    }
    let arity = rows[0].0.len();
    if rows.iter().any(|(idx, _)| idx.len() != arity) {
        return Err(ConfigError::invalid(format!(
            "{path_str}: mixed noise row arities"
        )));
    }
    match arity {
        2 => {
            let pair = rows_to_joint(&[y_size, z_size], &rows, 2)?;
            WiretapChannel::from_wiretap_pair(x_size, y_size, z_size, pair)
                .map_err(|e| ConfigError::invalid(format!("{path_str}: {e}")))
        }
        3 => {
            let y0 = y0_size.unwrap_or(y_size);
            let law = rows_to_joint(&[y0, y_size, z_size], &rows, 3)?;
            WiretapChannel::new(x_size, y_size, z_size, y0, law)
                .map_err(|e| ConfigError::invalid(format!("{path_str}: {e}")))
        }
        n => Err(ConfigError::invalid(format!(
            "{path_str}: noise rows need 2 or 3 indices, got {n}"
        ))),
    }
}

fn parse_num<T: std::str::FromStr>(s: &str) -> Result<T, String> {
    s.parse().map_err(|_| format!("bad number '{s}'"))
}

/// `row = i j [k] p`
fn parse_row(value: &str) -> Result<(Vec<usize>, f64), String> {
    let fields: Vec<&str> = value.split_whitespace().collect();
    if fields.len() < 3 {
        return Err(format!(
            "row '{value}' needs at least two indices and a probability"
        ));
    }
    let (idx_fields, prob_field) = fields.split_at(fields.len() - 1);
    let mut idx = Vec::with_capacity(idx_fields.len());
    for f in idx_fields {
        idx.push(parse_num::<usize>(f)?);
    }
    let prob = parse_num::<f64>(prob_field[0])?;
    Ok((idx, prob))
}

fn rows_to_joint(
    dims: &[usize],
    rows: &[(Vec<usize>, f64)],
    arity: usize,
) -> Result<JointPmf, ConfigError> {
    let total: usize = dims.iter().product();
    let mut probs = vec![0.0; total];
    for (idx, p) in rows {
        if idx.len() != arity {
            return Err(ConfigError::invalid(format!(
                "noise row has {} indices, expected {arity}",
                idx.len()
            )));
        }
        let mut flat = 0usize;
        for (axis, &s) in idx.iter().enumerate() {
            if s >= dims[axis] {
                return Err(ConfigError::invalid(format!(
                    "noise row index {s} outside alphabet of size {}",
                    dims[axis]
                )));
            }
            flat = flat * dims[axis] + s;
        }
        probs[flat] += p;
    }
    JointPmf::new(dims.to_vec(), probs).map_err(|e| ConfigError::invalid(e.to_string()))
}

/// Parses a sweep axis: either a single number or `start:end:step`.
pub fn parse_range(s: &str) -> Result<Vec<f64>, ConfigError> {
    let err = |message: &str| ConfigError::Range {
        range: s.to_string(),
        message: message.to_string(),
    };
    let parts: Vec<&str> = s.split(':').collect();
    match parts.len() {
        1 => {
            let v: f64 = parts[0].parse().map_err(|_| err("bad number"))?;
            Ok(vec![v])
        }
        3 => {
            let start: f64 = parts[0].parse().map_err(|_| err("bad start"))?;
            let end: f64 = parts[1].parse().map_err(|_| err("bad end"))?;
            let step: f64 = parts[2].parse().map_err(|_| err("bad step"))?;
            if step <= 0.0 {
                return Err(err("step must be positive"));
            }
            if start > end {
                return Err(err("empty range: start exceeds end"));
            }
            let count = ((end - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| start + i as f64 * step).collect())
        }
        _ => Err(err("expected a number or start:end:step")),
    }
}
