//! Plain-text surface files and parameter-grid strings.
//!
//! A surface file holds one `key = value` per line; `#` starts a comment.
//!
//! ```text
//! name = flat sphere chart
//! kind = quadric1
//! a = -1
//! b = -1
//! c = 4
//! u_min = -1.5
//! ```
//!
//! Grids are comma-separated axes, each `name=start:end:count` (inclusive,
//! evenly spaced) or `name=v1;v2;...`.

use std::collections::BTreeMap;

use crate::exactpoly::{parse_rational, q_to_f64};
use crate::finitetype::ParameterGrid;
use crate::surfaces::{zoo_surface, Domain, GraphTerm, SurfaceKind, SurfacePatch};

use super::CliError;

fn malformed(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

/// A number written as a decimal or as `p/q`.
pub fn parse_number(s: &str) -> Result<f64, CliError> {
    let t = s.trim();
    if let Ok(x) = t.parse::<f64>() {
        if x.is_finite() {
            return Ok(x);
        }
    }
    parse_rational(t)
        .map(|q| q_to_f64(&q))
        .map_err(|_| malformed(format!("not a number: {s:?}")))
}

fn parse_pairs(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(malformed(format!("line {}: expected `key = value`", n + 1)));
        };
        let key = key.trim().to_ascii_lowercase();
        if out.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(malformed(format!("line {}: duplicate key {key:?}", n + 1)));
        }
    }
    Ok(out)
}

fn graph_terms(s: &str) -> Result<Vec<GraphTerm>, CliError> {
    s.split(';')
        .filter(|t| !t.trim().is_empty())
        .map(|t| {
            let parts: Vec<&str> = t.split(',').map(str::trim).collect();
            let [i, j, c] = parts[..] else {
                return Err(malformed(format!("graph term {t:?} is not `i, j, coeff`")));
            };
            let deg = |x: &str| {
                x.parse::<u32>()
                    .map_err(|_| malformed(format!("bad graph degree {x:?}")))
            };
            Ok(GraphTerm {
                i: deg(i)?,
                j: deg(j)?,
                coeff: parse_number(c)?,
            })
        })
        .collect()
}

/// Parses a surface description file.
pub fn parse_surface_config(text: &str) -> Result<SurfacePatch, CliError> {
    let mut pairs = parse_pairs(text)?;
    let kind_name = pairs
        .remove("kind")
        .ok_or_else(|| malformed("missing `kind`"))?;
    let name = pairs.remove("name");
    let mut take = |key: &str| -> Result<f64, CliError> {
        let v = pairs
            .remove(key)
            .ok_or_else(|| malformed(format!("kind {kind_name} needs `{key}`")))?;
        parse_number(&v)
    };
    let kind = match kind_name.as_str() {
        "quadric1" => SurfaceKind::Quadric1 {
            a: take("a")?,
            b: take("b")?,
            c: take("c")?,
        },
        "quadric2" => SurfaceKind::Quadric2 {
            a: take("a")?,
            b: take("b")?,
        },
        "plane" => SurfaceKind::Plane,
        "cylinder" | "circular_cylinder" => SurfaceKind::CircularCylinder {
            radius: take("radius")?,
        },
        "sphere" => SurfaceKind::Sphere {
            radius: take("radius")?,
        },
        "torus" => SurfaceKind::Torus {
            major: take("major")?,
            minor: take("minor")?,
        },
        "catenoid" => SurfaceKind::Catenoid {
            waist: take("waist")?,
        },
        "helicoid" => SurfaceKind::Helicoid {
            pitch: take("pitch")?,
        },
        "graph" => {
            let terms = pairs
                .remove("terms")
                .ok_or_else(|| malformed("kind graph needs `terms`"))?;
            SurfaceKind::Graph {
                terms: graph_terms(&terms)?,
            }
        }
        other => return Err(malformed(format!("unknown surface kind {other:?}"))),
    };
    let mut bound = |key: &str| -> Result<Option<f64>, CliError> {
        pairs.remove(key).map(|v| parse_number(&v)).transpose()
    };
    let bounds = [bound("u_min")?, bound("u_max")?, bound("v_min")?, bound("v_max")?];
    if let Some(extra) = pairs.keys().next() {
        return Err(malformed(format!("unknown key {extra:?}")));
    }
    let mut patch =
        SurfacePatch::new(name.unwrap_or_else(|| kind_name.clone()), kind).map_err(|e| malformed(e.to_string()))?;
    if bounds.iter().any(Option::is_some) {
        let d = patch.domain;
        let domain = Domain::new(
            bounds[0].unwrap_or(d.u_min),
            bounds[1].unwrap_or(d.u_max),
            bounds[2].unwrap_or(d.v_min),
            bounds[3].unwrap_or(d.v_max),
        )
        .map_err(|e| malformed(e.to_string()))?;
        patch = patch.with_domain(domain);
    }
    Ok(patch)
}

/// A zoo name, or a path to a surface file.
pub fn resolve_surface(spec: &str) -> Result<SurfacePatch, CliError> {
    if let Some(s) = zoo_surface(spec) {
        return Ok(s);
    }
    let text = std::fs::read_to_string(spec)
        .map_err(|e| malformed(format!("{spec:?} is neither a known surface nor a readable file: {e}")))?;
    parse_surface_config(&text)
}

fn parse_axis(values: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = values.split(':').collect();
    match parts[..] {
        [start, end, count] => {
            let start = parse_number(start)?;
            let end = parse_number(end)?;
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| malformed(format!("bad count in {values:?}")))?;
            if count == 0 {
                return Err(malformed(format!("empty range {values:?}")));
            }
            if count == 1 {
                return Ok(vec![start]);
            }
            let step = (end - start) / (count - 1) as f64;
            Ok((0..count)
                .map(|k| if k + 1 == count { end } else { start + step * k as f64 })
                .collect())
        }
        [_] => values.split(';').map(parse_number).collect(),
        _ => Err(malformed(format!("bad axis {values:?}"))),
    }
}

/// `a=0.5:2:4,b=1;2,c=1`.
pub fn parse_grid(spec: &str) -> Result<ParameterGrid, CliError> {
    let mut grid = ParameterGrid {
        a: Vec::new(),
        b: Vec::new(),
        c: Vec::new(),
    };
    for axis in spec.split(',').filter(|s| !s.trim().is_empty()) {
        let Some((name, values)) = axis.split_once('=') else {
            return Err(malformed(format!("grid axis {axis:?} is not `name=values`")));
        };
        let slot = match name.trim() {
            "a" => &mut grid.a,
            "b" => &mut grid.b,
            "c" => &mut grid.c,
            other => return Err(malformed(format!("unknown grid axis {other:?}"))),
        };
        if !slot.is_empty() {
            return Err(malformed(format!("grid axis {name:?} given twice")));
        }
        *slot = parse_axis(values)?;
    }
    Ok(grid)
}
