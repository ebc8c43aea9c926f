//! Reading input files with positioned diagnostics.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use explode_core::Error;

/// A diagnostic tied to a place in an input file.
#[derive(Debug)]
pub struct Located {
    pub path: String,
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for Located {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}: {}", self.path, self.line, self.col, self.msg)
    }
}

impl std::error::Error for Located {}

pub fn read(path: &Path) -> anyhow::Result<String> {
    std::fs::read_to_string(path).map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))
}

/// Attaches `path` to a parse error, shifting it by `(line, col)` when the
/// text came from inside a larger file. Other errors pass through.
pub fn locate(err: Error, path: &str, line: usize, col: usize) -> anyhow::Error {
    match err {
        Error::Parse { line: l, col: c, msg } => Located {
            path: path.to_string(),
            line: line + l - 1,
            col: if l == 1 { col + c - 1 } else { c },
            msg,
        }
        .into(),
        other => other.into(),
    }
}

/// One `key: value` directive with its position.
#[derive(Clone, Debug)]
pub struct Directive {
    pub value: String,
    pub line: usize,
    /// Column where `value` starts.
    pub col: usize,
}

/// Splits a file into `key: value` directives. Lines without a recognised
/// key go under `default_key`. Blank lines and `#` comments are skipped.
pub fn directives(
    text: &str,
    path: &str,
    keys: &[&str],
    default_key: Option<&str>,
) -> anyhow::Result<BTreeMap<String, Directive>> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("");
        if body.trim().is_empty() {
            continue;
        }
        let start = body.len() - body.trim_start().len();
        let trimmed = body.trim();
        let parsed = trimmed.split_once(':').and_then(|(k, v)| {
            let k = k.trim();
            keys.contains(&k).then(|| (k.to_string(), v, start + trimmed.len() - v.len()))
        });
        let (key, value, offset) = match (parsed, default_key) {
            (Some(p), _) => p,
            (None, Some(d)) => (d.to_string(), trimmed, start),
            (None, None) => {
                return Err(Located { path: path.into(), line, col: start + 1, msg: format!("expected one of {keys:?}") }.into())
            }
        };
        let lead = value.len() - value.trim_start().len();
        let d = Directive { value: value.trim().to_string(), line, col: offset + lead + 1 };
        if out.insert(key.clone(), d).is_some() {
            return Err(Located { path: path.into(), line, col: start + 1, msg: format!("`{key}` given twice") }.into());
        }
    }
    Ok(out)
}

pub fn required<'a>(d: &'a BTreeMap<String, Directive>, key: &str, path: &str) -> anyhow::Result<&'a Directive> {
    d.get(key).ok_or_else(|| Located { path: path.into(), line: 1, col: 1, msg: format!("missing `{key}`") }.into())
}

/// Parses a whitespace- or comma-separated list of indices.
pub fn index_list(d: Option<&Directive>, path: &str) -> anyhow::Result<Vec<usize>> {
    let Some(d) = d else { return Ok(Vec::new()) };
    d.value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse().map_err(|_| {
                Located { path: path.into(), line: d.line, col: d.col, msg: format!("expected an index, found `{s}`") }.into()
            })
        })
        .collect()
}
