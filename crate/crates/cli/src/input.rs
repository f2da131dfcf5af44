use std::fs;
use std::io::Read;
use std::path::Path;
use std::sync::OnceLock;

use anyhow::{anyhow, bail, Context, Result};
use convexity::nerve::{nerve_to_space, Nerve, NerveDocument, NerveSpace};
use convexity::space::{make_example_space, SpaceDocument};
use convexity::{ConvexitySpace, ExampleKind, HullOracle, Limits, SubsetMask};
use serde::{Deserialize, Serialize};

/// Input could not be read or parsed; maps to the usage exit status.
#[derive(Debug)]
pub struct InputError(pub String);

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

fn input_error(msg: String) -> anyhow::Error {
    anyhow!(InputError(msg))
}

static STDIN: OnceLock<std::result::Result<String, String>> = OnceLock::new();

/// Reads a file, or standard input for `-` (read once, then reused).
pub fn read_source(source: &str) -> Result<String> {
    if source == "-" {
        let text = STDIN.get_or_init(|| {
            let mut text = String::new();
            std::io::stdin()
                .read_to_string(&mut text)
                .map(|_| text)
                .map_err(|e| format!("<stdin>: {e}"))
        });
        return text.clone().map_err(input_error);
    }
    fs::read_to_string(Path::new(source)).map_err(|e| input_error(format!("{source}: {e}")))
}

fn parse_json<T: for<'de> Deserialize<'de>>(source: &str, text: &str) -> Result<T> {
    serde_json::from_str(text)
        .map_err(|e| input_error(format!("{source}:{}:{}: {e}", e.line(), e.column())))
}

/// Output of `nerve to-space`, also accepted wherever a space is read.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddedNerveDocument {
    pub nerve: NerveDocument,
    pub points: usize,
    /// Ground index of each point of `P`, in order.
    pub embedding: Vec<usize>,
    /// Explicit convex sets, absent when only the closed-form hull is used.
    pub space: Option<SpaceDocument>,
}

/// A space argument: builtin specifier, JSON file or `-`.
pub enum LoadedSpace {
    Explicit(ConvexitySpace),
    Embedded {
        doc: EmbeddedNerveDocument,
        nerve: Nerve,
        space: Option<ConvexitySpace>,
    },
}

fn is_builtin(spec: &str) -> bool {
    ["interval:", "singleton:", "free:", "box:"]
        .iter()
        .any(|p| spec.starts_with(p))
}

pub fn load_space_source(spec: &str) -> Result<LoadedSpace> {
    if is_builtin(spec) {
        let kind: ExampleKind = spec.parse()?;
        return Ok(LoadedSpace::Explicit(make_example_space(&kind)?));
    }
    let text = read_source(spec)?;
    let value: serde_json::Value = parse_json(spec, &text)?;
    if value.get("embedding").is_some() {
        let doc: EmbeddedNerveDocument = parse_json(spec, &text)?;
        let nerve = Nerve::from_document(&doc.nerve).with_context(|| format!("{spec}: nerve"))?;
        let space = doc
            .space
            .as_ref()
            .map(ConvexitySpace::from_document)
            .transpose()
            .with_context(|| format!("{spec}: space"))?;
        return Ok(LoadedSpace::Embedded { doc, nerve, space });
    }
    let doc: SpaceDocument = parse_json(spec, &text)?;
    Ok(LoadedSpace::Explicit(
        ConvexitySpace::from_document(&doc).with_context(|| spec.to_string())?,
    ))
}

/// An explicit convexity space; embedded nerves are materialized.
pub fn load_space(spec: &str, limits: &Limits) -> Result<ConvexitySpace> {
    match load_space_source(spec)? {
        LoadedSpace::Explicit(s) => Ok(s),
        LoadedSpace::Embedded { space: Some(s), .. } => Ok(s),
        LoadedSpace::Embedded { nerve, .. } => {
            Ok(nerve_to_space(&nerve, limits)?.materialize(limits)?)
        }
    }
}

pub fn load_space_document(source: &str) -> Result<SpaceDocument> {
    let text = read_source(source)?;
    parse_json(source, &text)
}

pub fn load_nerve(source: &str) -> Result<Nerve> {
    let text = read_source(source)?;
    let value: serde_json::Value = parse_json(source, &text)?;
    let doc: NerveDocument = match value.get("nerve") {
        Some(inner) => serde_json::from_value(inner.clone())
            .map_err(|e| input_error(format!("{source}: nerve: {e}")))?,
        None => parse_json(source, &text)?,
    };
    Nerve::from_document(&doc).with_context(|| source.to_string())
}

/// Comma- or space-separated point indices, or `all`.
pub fn parse_points(text: Option<&str>, n: usize) -> Result<Vec<usize>> {
    let text = match text {
        None => return Ok((0..n).collect()),
        Some(t) => t.trim(),
    };
    if text == "all" {
        return Ok((0..n).collect());
    }
    let mut points = Vec::new();
    for tok in text.split([',', ' ']).filter(|t| !t.is_empty()) {
        let p: usize = tok
            .parse()
            .map_err(|_| input_error(format!("bad point index {tok:?} in {text:?}")))?;
        if p >= n {
            bail!(InputError(format!("point {p} outside ground set of {n}")));
        }
        if points.contains(&p) {
            bail!(InputError(format!("point {p} listed twice")));
        }
        points.push(p);
    }
    Ok(points)
}

pub fn parse_set(text: Option<&str>, n: usize) -> Result<SubsetMask> {
    Ok(parse_points(text, n)?.into_iter().collect())
}

/// Hull oracle from a space argument: explicit convex sets, or the closed
/// form of an embedded nerve when no explicit sets were written.
pub enum Oracle {
    Explicit(ConvexitySpace),
    Nerve(NerveSpace),
}

impl HullOracle for Oracle {
    fn ground_size(&self) -> usize {
        match self {
            Oracle::Explicit(s) => s.ground_size(),
            Oracle::Nerve(s) => s.ground_size(),
        }
    }

    fn hull(&self, set: &SubsetMask) -> SubsetMask {
        match self {
            Oracle::Explicit(s) => s.hull(set),
            Oracle::Nerve(s) => s.hull(set),
        }
    }

    fn common_point(&self, parts: &[SubsetMask]) -> Option<usize> {
        match self {
            Oracle::Explicit(s) => s.common_point(parts),
            Oracle::Nerve(s) => s.common_point(parts),
        }
    }
}

pub fn load_oracle(spec: &str, limits: &Limits) -> Result<Oracle> {
    Ok(match load_space_source(spec)? {
        LoadedSpace::Explicit(s) => Oracle::Explicit(s),
        LoadedSpace::Embedded { space: Some(s), .. } => Oracle::Explicit(s),
        LoadedSpace::Embedded { nerve, .. } => Oracle::Nerve(nerve_to_space(&nerve, limits)?),
    })
}
