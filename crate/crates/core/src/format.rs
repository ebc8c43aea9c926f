//! Text formats: cover manifests, fans, chart specs and integer matrices.
//!
//! A manifest is a sequence of sections:
//!
//! ```text
//! [meta]
//! gluing_class = pure-monomial
//! orientation = oriented
//!
//! [chart u]
//! n = 0
//! m = 1
//! 1 >= 0
//!
//! [overlap u,v]
//! n = 0
//! m = 1
//! 1 >= 0
//! map u = 1
//! map v = 1
//! ```
//!
//! Inequality lines read `a1 ... am >= b` (a closed facet) or `a1 ... am > b`
//! (an open one); `b` may be a fraction `p/q`. `#` starts a comment. Map rows
//! are separated by `;`.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::cech::{CoverManifest, GluingClass, Overlap};
use crate::chart::ChartSignature;
use crate::lattice::{Fan, Inequality, Int, IntegerMatrix, Polytope, Rat};
use crate::{Error, Result};

fn perr(line: usize, col: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, col, msg: msg.into() }
}

/// Column (1-based) of `needle` inside `line`, or 1.
fn col_of(line: &str, needle: &str) -> usize {
    line.find(needle).map_or(1, |c| c + 1)
}

fn parse_int(tok: &str, line: usize, raw: &str) -> Result<Int> {
    tok.parse::<Int>().map_err(|_| perr(line, col_of(raw, tok), format!("expected an integer, found `{tok}`")))
}

fn parse_rat(tok: &str, line: usize, raw: &str) -> Result<Rat> {
    let bad = || perr(line, col_of(raw, tok), format!("expected a rational number, found `{tok}`"));
    match tok.split_once('/') {
        Some((p, q)) => {
            let (p, q): (Int, Int) = (p.parse().map_err(|_| bad())?, q.parse().map_err(|_| bad())?);
            if num_traits::Zero::is_zero(&q) {
                return Err(bad());
            }
            Ok(Rat::new(p, q))
        }
        None => Ok(Rat::from_integer(tok.parse().map_err(|_| bad())?)),
    }
}

fn fmt_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `a1 ... am >= b` or `a1 ... am > b`.
pub fn parse_inequality(text: &str, line: usize, raw: &str) -> Result<Inequality> {
    let (lhs, rhs, open) = if let Some((l, r)) = text.split_once(">=") {
        (l, r, false)
    } else if let Some((l, r)) = text.split_once('>') {
        (l, r, true)
    } else {
        return Err(perr(line, 1, "expected an inequality `a1 ... am >= b`"));
    };
    let normal = lhs.split_whitespace().map(|t| parse_int(t, line, raw)).collect::<Result<Vec<_>>>()?;
    let rhs = rhs.trim();
    if rhs.is_empty() || rhs.contains(char::is_whitespace) {
        return Err(perr(line, col_of(raw, ">"), "expected a single right-hand side"));
    }
    Ok(Inequality { normal, rhs: parse_rat(rhs, line, raw)?, open })
}

pub fn print_inequality(i: &Inequality) -> String {
    let lhs: Vec<String> = i.normal.iter().map(Int::to_string).collect();
    let op = if i.open { ">" } else { ">=" };
    if lhs.is_empty() {
        format!("{op} {}", fmt_rat(&i.rhs))
    } else {
        format!("{} {op} {}", lhs.join(" "), fmt_rat(&i.rhs))
    }
}

/// Parses `;`-separated integer rows; every row must have the same length.
pub fn parse_rows(text: &str, line: usize, raw: &str) -> Result<Vec<Vec<Int>>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    let rows = text
        .split(';')
        .map(|row| row.split_whitespace().map(|t| parse_int(t, line, raw)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    if rows.windows(2).any(|w| w[0].len() != w[1].len()) {
        return Err(perr(line, col_of(raw, ";"), "matrix rows have different lengths"));
    }
    Ok(rows)
}

pub fn print_rows(m: &IntegerMatrix) -> String {
    (0..m.rows())
        .map(|i| m.row(i).iter().map(Int::to_string).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("; ")
}

#[derive(Default)]
struct Block {
    header_line: usize,
    is_chart: bool,
    n: Option<usize>,
    m: Option<usize>,
    ineqs: Vec<Inequality>,
    maps: Vec<(String, Vec<Vec<Int>>, usize)>,
}

impl Block {
    fn signature(&self) -> Result<ChartSignature> {
        let m = match (self.m, self.ineqs.first()) {
            (Some(m), _) => m,
            (None, Some(i)) => i.normal.len(),
            (None, None) => 0,
        };
        if let Some(bad) = self.ineqs.iter().find(|i| i.normal.len() != m) {
            return Err(perr(
                self.header_line,
                1,
                format!("inequality with {} coefficients in a block with m = {m}", bad.normal.len()),
            ));
        }
        Ok(ChartSignature::new(self.n.unwrap_or(0), Polytope::new(m, self.ineqs.clone())))
    }
}

enum Section {
    None,
    Meta,
    Chart(String, Block),
    Overlap(Vec<String>, Block),
}

/// Parses a manifest. Structural rules (nerve closure, dimensions, gluing)
/// are left to validation.
pub fn parse_manifest(text: &str) -> Result<CoverManifest> {
    let mut manifest = CoverManifest::new(GluingClass::PureMonomial);
    let mut pending_maps: Vec<(Vec<String>, String, Vec<Vec<Int>>, usize)> = Vec::new();
    let mut section = Section::None;
    let mut seen_any = false;

    let close = |section: Section, manifest: &mut CoverManifest, pending: &mut Vec<_>| -> Result<()> {
        match section {
            Section::Chart(id, block) => {
                if manifest.charts.contains_key(&id) {
                    return Err(perr(block.header_line, 1, format!("chart `{id}` defined twice")));
                }
                manifest.charts.insert(id, block.signature()?);
            }
            Section::Overlap(members, block) => {
                let mut key = members.clone();
                key.sort();
                if manifest.overlaps.contains_key(&key) {
                    return Err(perr(block.header_line, 1, format!("overlap {members:?} defined twice")));
                }
                let sig = block.signature()?;
                for (id, rows, line) in block.maps {
                    pending.push((key.clone(), id, rows, line));
                }
                manifest.overlaps.insert(key, Overlap { signature: sig, maps: BTreeMap::new() });
            }
            _ => {}
        }
        Ok(())
    };

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        seen_any = true;
        if let Some(header) = line.strip_prefix('[') {
            let header = header
                .strip_suffix(']')
                .ok_or_else(|| perr(line_no, raw.len(), "section header must end with `]`"))?
                .trim();
            let previous = std::mem::replace(&mut section, Section::None);
            close(previous, &mut manifest, &mut pending_maps)?;
            let block = Block { header_line: line_no, ..Block::default() };
            section = if header == "meta" {
                Section::Meta
            } else if let Some(id) = header.strip_prefix("chart ") {
                let id = id.trim();
                if id.is_empty() || id.contains(',') || id.contains(char::is_whitespace) {
                    return Err(perr(line_no, col_of(raw, id), "chart ids are single words"));
                }
                Section::Chart(id.to_string(), Block { is_chart: true, ..block })
            } else if let Some(ids) = header.strip_prefix("overlap ") {
                let members: Vec<String> = ids.split(',').map(|s| s.trim().to_string()).collect();
                if members.iter().any(String::is_empty) {
                    return Err(perr(line_no, col_of(raw, ids), "empty chart id in overlap"));
                }
                Section::Overlap(members, block)
            } else {
                return Err(perr(line_no, 2, format!("unknown section `{header}`")));
            };
            continue;
        }
        match &mut section {
            Section::None => return Err(perr(line_no, 1, "content before the first section")),
            Section::Meta => {
                let (key, value) =
                    line.split_once('=').ok_or_else(|| perr(line_no, 1, "expected `key = value`"))?;
                let value = value.trim();
                match key.trim() {
                    "gluing_class" => {
                        manifest.gluing_class =
                            value.parse().map_err(|e: String| perr(line_no, col_of(raw, value), e))?;
                    }
                    "orientation" => {
                        manifest.oriented = match value {
                            "oriented" | "true" | "yes" => true,
                            "unoriented" | "false" | "no" => false,
                            _ => return Err(perr(line_no, col_of(raw, value), format!("unknown orientation `{value}`"))),
                        }
                    }
                    other => return Err(perr(line_no, 1, format!("unknown meta key `{other}`"))),
                }
            }
            Section::Chart(_, block) | Section::Overlap(_, block) => {
                if let Some(rest) = line.strip_prefix("map ") {
                    if block.is_chart {
                        return Err(perr(line_no, 1, "map lines belong to overlap sections"));
                    }
                    let (id, rows) = rest.split_once('=').ok_or_else(|| perr(line_no, 1, "expected `map <id> = rows`"))?;
                    let rows = parse_rows(rows, line_no, raw)?;
                    block.maps.push((id.trim().to_string(), rows, line_no));
                } else if line.contains('>') {
                    block.ineqs.push(parse_inequality(line, line_no, raw)?);
                } else if let Some((key, value)) = line.split_once('=') {
                    let v: usize = value
                        .trim()
                        .parse()
                        .map_err(|_| perr(line_no, col_of(raw, value.trim()), "expected a non-negative integer"))?;
                    match key.trim() {
                        "n" => block.n = Some(v),
                        "m" => block.m = Some(v),
                        other => return Err(perr(line_no, 1, format!("unknown key `{other}`"))),
                    }
                } else {
                    return Err(perr(line_no, 1, format!("cannot read `{line}`")));
                }
            }
        }
    }
    close(section, &mut manifest, &mut pending_maps)?;
    if !seen_any {
        return Err(perr(1, 1, "empty manifest"));
    }
    for (key, id, rows, line) in pending_maps {
        let overlap_m = manifest.overlaps[&key].signature.m();
        let chart_m = manifest.charts.get(&id).map(ChartSignature::m);
        let matrix = if rows.iter().all(Vec::is_empty) {
            IntegerMatrix::zeros(chart_m.unwrap_or(rows.len()), overlap_m)
        } else {
            let cols = rows[0].len();
            IntegerMatrix::from_big_rows(rows, cols)
        };
        let overlap = manifest.overlaps.get_mut(&key).expect("overlap exists");
        if overlap.maps.insert(id.clone(), matrix).is_some() {
            return Err(perr(line, 1, format!("two maps for member `{id}`")));
        }
    }
    Ok(manifest)
}

fn print_block(out: &mut String, sig: &ChartSignature) {
    let _ = writeln!(out, "n = {}", sig.n);
    let _ = writeln!(out, "m = {}", sig.m());
    for i in sig.polytope.inequalities() {
        let _ = writeln!(out, "{}", print_inequality(i));
    }
}

pub fn print_manifest(m: &CoverManifest) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "[meta]");
    let _ = writeln!(out, "gluing_class = {}", m.gluing_class);
    let _ = writeln!(out, "orientation = {}", if m.oriented { "oriented" } else { "unoriented" });
    for (id, sig) in &m.charts {
        let _ = writeln!(out, "\n[chart {id}]");
        print_block(&mut out, sig);
    }
    for (key, o) in &m.overlaps {
        let _ = writeln!(out, "\n[overlap {}]", key.join(","));
        print_block(&mut out, &o.signature);
        for (id, a) in &o.maps {
            let rows = print_rows(a);
            if rows.is_empty() {
                let _ = writeln!(out, "map {id} =");
            } else {
                let _ = writeln!(out, "map {id} = {rows}");
            }
        }
    }
    out
}

/// Parses a fan file: one `cone: v1; v2; ...` line per cone.
pub fn parse_fan(text: &str) -> Result<Fan> {
    let mut cones: Vec<Vec<Vec<Int>>> = Vec::new();
    let mut dim: Option<usize> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let body = line.strip_prefix("cone:").ok_or_else(|| perr(line_no, 1, "expected `cone: v1; v2; ...`"))?;
        let rays = parse_rows(body, line_no, raw)?;
        if rays.is_empty() {
            return Err(perr(line_no, 6, "a cone needs at least one ray"));
        }
        match dim {
            Some(d) if d != rays[0].len() => {
                return Err(perr(line_no, 6, format!("ray of length {} in a fan of dimension {d}", rays[0].len())))
            }
            _ => dim = Some(rays[0].len()),
        }
        cones.push(rays);
    }
    let dim = dim.ok_or_else(|| perr(1, 1, "empty fan file"))?;
    Fan::new(dim, &cones)
}

pub fn print_fan(fan: &Fan) -> String {
    fan.maximal_cones()
        .iter()
        .map(|c| {
            let rays: Vec<String> =
                c.rays.iter().map(|r| r.iter().map(Int::to_string).collect::<Vec<_>>().join(" ")).collect();
            format!("cone: {}\n", rays.join("; "))
        })
        .collect()
}

/// Parses a chart spec `n=<n> m=<m>; <ineq>; <ineq>`, e.g. `n=1 m=1; 1 >= 0; -1 >= -1`.
pub fn parse_chart_spec(text: &str) -> Result<ChartSignature> {
    let mut parts = text.split(';');
    let head = parts.next().unwrap_or("");
    let mut block = Block { header_line: 1, ..Block::default() };
    for item in head.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()) {
        let (k, v) = item.split_once('=').ok_or_else(|| perr(1, col_of(text, item), "expected `n=<int>` or `m=<int>`"))?;
        let v: usize = v.parse().map_err(|_| perr(1, col_of(text, item), "expected a non-negative integer"))?;
        match k {
            "n" => block.n = Some(v),
            "m" => block.m = Some(v),
            _ => return Err(perr(1, col_of(text, item), format!("unknown key `{k}`"))),
        }
    }
    for part in parts {
        if !part.trim().is_empty() {
            block.ineqs.push(parse_inequality(part.trim(), 1, text)?);
        }
    }
    block.signature()
}

pub fn print_chart_spec(sig: &ChartSignature) -> String {
    let mut s = format!("n={} m={}", sig.n, sig.m());
    for i in sig.polytope.inequalities() {
        s.push_str("; ");
        s.push_str(&print_inequality(i));
    }
    s
}

/// Reads `name [RxC] = rows` lines into named integer matrices. The shape is
/// optional unless a matrix has no rows or no columns.
pub fn parse_named_matrices(text: &str) -> Result<BTreeMap<String, IntegerMatrix>> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (lhs, rhs) = line.split_once('=').ok_or_else(|| perr(line_no, 1, "expected `name = rows`"))?;
        let mut lhs = lhs.split_whitespace();
        let name = lhs.next().ok_or_else(|| perr(line_no, 1, "missing matrix name"))?.to_string();
        let shape = match lhs.next() {
            None => None,
            Some(s) => {
                let inner = s.strip_prefix('[').and_then(|s| s.strip_suffix(']'));
                let dims = inner.and_then(|s| s.split_once('x')).and_then(|(r, c)| Some((r.parse::<usize>().ok()?, c.parse::<usize>().ok()?)));
                Some(dims.ok_or_else(|| perr(line_no, col_of(raw, s), "shape must look like [2x3]"))?)
            }
        };
        let rows = parse_rows(rhs, line_no, raw)?;
        let found = (rows.len(), rows.first().map_or(0, Vec::len));
        let matrix = match shape {
            Some((r, c)) if r * c == 0 && rows.iter().all(Vec::is_empty) && (found.0 == 0 || found.0 == r) => {
                IntegerMatrix::zeros(r, c)
            }
            Some(s) if s != found => {
                return Err(perr(line_no, col_of(raw, "="), format!("declared shape {s:?} but found {found:?}")))
            }
            None if found.1 == 0 => return Err(perr(line_no, 1, "an empty matrix needs a shape such as [0x2]")),
            _ => IntegerMatrix::from_big_rows(rows, found.1),
        };
        if out.insert(name.clone(), matrix).is_some() {
            return Err(perr(line_no, 1, format!("matrix `{name}` defined twice")));
        }
    }
    Ok(out)
}
