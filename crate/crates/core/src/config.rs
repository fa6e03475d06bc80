//! Line-oriented metric config files.
//!
//! ```text
//! name = polar2
//! dim = 2
//! coords = u, v
//! g[0][0] = 1
//! g[1][1] = u^2
//! point = 2.0, 0.5
//! box = 0.1:2, -2:2      # optional sampling box for random points
//! locus_hint = u = 0     # optional
//! expect = radical-stationary
//! ```
//!
//! Omitted metric entries are zero; only `i <= j` is accepted.

use std::path::Path;

use crate::catalog::{lookup, MetricSpec};
use crate::chart::{Chart, MetricField};
use crate::error::{Error, Result};
use crate::koszul::Verdict;

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Config {
        line,
        message: message.into(),
    }
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(a, _)| a).trim()
}

fn parse_index(s: &str) -> Option<(usize, usize)> {
    let rest = s.strip_prefix("g[")?;
    let (i, rest) = rest.split_once("][")?;
    let j = rest.strip_suffix(']')?;
    Some((i.trim().parse().ok()?, j.trim().parse().ok()?))
}

fn parse_numbers(line: usize, key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split(',')
        .map(|t| {
            let t = t.trim();
            match t.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(err(line, format!("{key}: '{t}' is not a finite number"))),
            }
        })
        .collect()
}

fn parse_box(line: usize, value: &str) -> Result<Vec<(f64, f64)>> {
    value
        .split(',')
        .map(|t| {
            let (lo, hi) = t
                .split_once(':')
                .ok_or_else(|| err(line, format!("box: '{}' is not lo:hi", t.trim())))?;
            let lo = parse_numbers(line, "box", lo)?[0];
            let hi = parse_numbers(line, "box", hi)?[0];
            if lo > hi {
                return Err(err(line, format!("box: empty interval {lo}:{hi}")));
            }
            Ok((lo, hi))
        })
        .collect()
}

fn set_once<T>(slot: &mut Option<(usize, T)>, line: usize, key: &str, v: T) -> Result<()> {
    if let Some((first, _)) = slot {
        return Err(err(line, format!("duplicate '{key}' (first on line {first})")));
    }
    *slot = Some((line, v));
    Ok(())
}

/// Parses config text. Line numbers in errors are 1-based.
pub fn parse_spec(text: &str) -> Result<MetricSpec> {
    let mut name = None;
    let mut dim: Option<(usize, usize)> = None;
    let mut coords: Option<(usize, Vec<String>)> = None;
    let mut entries: Vec<(usize, usize, usize, String)> = Vec::new();
    let mut points: Vec<(usize, Vec<f64>)> = Vec::new();
    let mut locus = None;
    let mut expect = None;
    let mut sample_box = None;

    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = strip_comment(raw);
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| err(line, format!("expected 'key = value', got '{body}'")))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "name" => set_once(&mut name, line, key, value.to_string())?,
            "dim" => {
                let d = value
                    .parse::<usize>()
                    .map_err(|_| err(line, format!("dim: '{value}' is not a positive integer")))?;
                set_once(&mut dim, line, key, d)?
            }
            "coords" => {
                let c = value.split(',').map(|s| s.trim().to_string()).collect();
                set_once(&mut coords, line, key, c)?
            }
            "point" => points.push((line, parse_numbers(line, key, value)?)),
            "box" => set_once(&mut sample_box, line, key, parse_box(line, value)?)?,
            "locus_hint" => set_once(&mut locus, line, key, value.to_string())?,
            "expect" => {
                let v: Verdict = value.parse().map_err(|m: String| err(line, m))?;
                set_once(&mut expect, line, key, v)?
            }
            _ if key.starts_with("g[") => {
                let (i, j) = parse_index(key)
                    .ok_or_else(|| err(line, format!("malformed metric key '{key}'")))?;
                if i > j {
                    return Err(err(
                        line,
                        format!("{key}: only upper-triangle entries g[i][j] with i <= j are accepted"),
                    ));
                }
                if entries.iter().any(|e| (e.1, e.2) == (i, j)) {
                    return Err(err(line, format!("duplicate entry {key}")));
                }
                entries.push((line, i, j, value.to_string()));
            }
            _ => return Err(err(line, format!("unknown key '{key}'"))),
        }
    }

    let (_, name) = name.ok_or_else(|| err(0, "missing 'name'"))?;
    let (coords_line, coords) = coords.ok_or_else(|| err(0, "missing 'coords'"))?;
    let chart = Chart::new(&coords).map_err(|e| err(coords_line, e.to_string()))?;
    let n = chart.dim();
    if let Some((dl, d)) = dim {
        if d != n {
            return Err(err(dl, format!("dim = {d} but {n} coordinate names are declared")));
        }
    }
    let mut parsed = Vec::with_capacity(entries.len());
    for (line, i, j, text) in &entries {
        if *j >= n {
            return Err(err(*line, format!("g[{i}][{j}] is outside a {n}x{n} metric")));
        }
        let e = chart
            .parse(text)
            .map_err(|e| err(*line, format!("g[{i}][{j}]: {e}")))?;
        parsed.push((*i, *j, e));
    }
    let metric = MetricField::from_entries(chart, parsed).map_err(|e| err(0, e.to_string()))?;
    for (line, p) in &points {
        if p.len() != n {
            return Err(err(*line, format!("point has {} coordinates, expected {n}", p.len())));
        }
    }
    if let Some((line, b)) = &sample_box {
        if b.len() != n {
            return Err(err(*line, format!("box has {} intervals, expected {n}", b.len())));
        }
    }
    Ok(MetricSpec {
        name,
        metric,
        entries: entries.into_iter().map(|(_, i, j, t)| (i, j, t)).collect(),
        points: points.into_iter().map(|(_, p)| p).collect(),
        locus_hint: locus.map(|(_, v)| v),
        expect: expect.map(|(_, v)| v),
        sample_box: sample_box.map(|(_, v)| v),
    })
}

pub fn load_spec(path: impl AsRef<Path>) -> Result<MetricSpec> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_spec(&text)
}

/// A catalog name, or else a config file path.
pub fn resolve_spec(arg: &str) -> Result<MetricSpec> {
    if let Some(s) = lookup(arg) {
        return Ok(s);
    }
    if Path::new(arg).exists() {
        return load_spec(arg);
    }
    Err(Error::UnknownSpec(arg.to_string()))
}
