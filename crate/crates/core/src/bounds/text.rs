//! Line formats for tuple families and hypergraphs.
//!
//! One tuple or edge per line, sets as index lists separated by spaces or
//! commas, tuple coordinates separated by `|`. `#` starts a comment and an
//! optional `ground N` line fixes the ground-set size (otherwise one more
//! than the largest index).

use crate::error::{Error, Result};
use crate::mask::SubsetMask;

use super::graphs::Hypergraph;
use super::shadow::TupleFamily;

struct Parsed {
    ground: Option<usize>,
    rows: Vec<(usize, Vec<Vec<usize>>)>,
}

fn parse_set(text: &str, line: usize) -> Result<Vec<usize>> {
    text.split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::Parse(format!("line {line}: bad index {t:?}")))
        })
        .collect()
}

fn parse_lines(text: &str) -> Result<Parsed> {
    let mut ground = None;
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix("ground") {
            let n = rest.trim().parse::<usize>().map_err(|_| {
                Error::Parse(format!("line {line}: bad ground size {:?}", rest.trim()))
            })?;
            ground = Some(n);
            continue;
        }
        let coords = body
            .split('|')
            .map(|c| parse_set(c, line))
            .collect::<Result<Vec<_>>>()?;
        rows.push((line, coords));
    }
    Ok(Parsed { ground, rows })
}

fn ground_size(p: &Parsed) -> Result<usize> {
    let max = p
        .rows
        .iter()
        .flat_map(|(_, c)| c.iter().flatten())
        .max()
        .copied();
    let inferred = max.map_or(0, |m| m + 1);
    match p.ground {
        Some(n) if n < inferred => Err(Error::Parse(format!(
            "index {} exceeds ground {n}",
            inferred - 1
        ))),
        Some(n) => Ok(n),
        None => Ok(inferred),
    }
}

fn to_mask(set: &[usize], line: usize) -> Result<SubsetMask> {
    if set.iter().any(|&i| i >= crate::mask::MAX_POINTS) {
        return Err(Error::Parse(format!("line {line}: index too large")));
    }
    let mask = SubsetMask::from_indices(set.iter().copied());
    if mask.len() != set.len() {
        return Err(Error::Parse(format!("line {line}: repeated index")));
    }
    Ok(mask)
}

pub fn parse_tuple_family(text: &str) -> Result<TupleFamily> {
    let p = parse_lines(text)?;
    let n = ground_size(&p)?;
    let Some((_, first)) = p.rows.first() else {
        return Err(Error::Parse("no tuples".into()));
    };
    let (d, r) = (first.len(), first[0].len());
    let mut tuples = Vec::with_capacity(p.rows.len());
    for (line, coords) in &p.rows {
        let t = coords
            .iter()
            .map(|c| to_mask(c, *line))
            .collect::<Result<Vec<_>>>()?;
        if t.len() != d || t.iter().any(|c| c.len() != r) {
            return Err(Error::Parse(format!(
                "line {line}: expected {d} coordinates of size {r}"
            )));
        }
        tuples.push(t);
    }
    TupleFamily::new(d, r, n, tuples).map_err(|e| Error::Parse(e.to_string()))
}

pub fn parse_hypergraph(text: &str) -> Result<Hypergraph> {
    let p = parse_lines(text)?;
    let n = ground_size(&p)?;
    let mut edges = Vec::with_capacity(p.rows.len());
    let mut s = None;
    for (line, coords) in &p.rows {
        if coords.len() != 1 {
            return Err(Error::Parse(format!(
                "line {line}: edges take a single set"
            )));
        }
        let e = to_mask(&coords[0], *line)?;
        if *s.get_or_insert(e.len()) != e.len() {
            return Err(Error::Parse(format!(
                "line {line}: edge size differs from the first edge"
            )));
        }
        edges.push(e);
    }
    Hypergraph::new(n, s.unwrap_or(2), edges).map_err(|e| Error::Parse(e.to_string()))
}

pub fn format_tuple_family(f: &TupleFamily) -> String {
    let mut out = format!("ground {}\n", f.ground_size());
    for t in f.tuples() {
        let coords: Vec<String> = t
            .iter()
            .map(|c| {
                c.iter()
                    .map(|i| i.to_string())
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        out.push_str(&coords.join(" | "));
        out.push('\n');
    }
    out
}
