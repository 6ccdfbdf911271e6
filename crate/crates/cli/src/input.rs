//! Loading space, map, condition and pair specifications from flags.
//!
//! Every flag accepts inline JSON, a path to a JSON file, or a bare kind name
//! with an optional single argument, e.g. `split_set`, `scale(1/2)`,
//! `kannan_k(1/3)`, `iterated_kannan(2)`.

use std::path::Path;

use kannan_core::condition::ConditionSpec;
use kannan_core::map::MapSpec;
use kannan_core::space::SpaceSpec;
use kannan_core::{ConditionKind, PairSource, Point, SelfMap, Space};
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

use crate::CliError;

/// Text of a flag value: inline JSON, file contents, or a shorthand expanded
/// to a JSON object.
fn source_text(arg: &str, what: &str) -> Result<String, CliError> {
    let t = arg.trim();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(t.to_string());
    }
    let path = Path::new(t);
    if path.is_file() {
        return std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{what}: {}: {e}", path.display())));
    }
    shorthand(t, what).map(|v| v.to_string())
}

fn shorthand(t: &str, what: &str) -> Result<Value, CliError> {
    let bad = || CliError::Usage(format!("{what}: cannot read {t:?} as JSON, file or kind name"));
    let (kind, arg) = match t.find('(') {
        Some(open) if t.ends_with(')') => (&t[..open], Some(&t[open + 1..t.len() - 1])),
        Some(_) => return Err(bad()),
        None => (t, None),
    };
    if kind.is_empty() || !kind.chars().all(|c| c.is_ascii_lowercase() || c == '_') {
        return Err(bad());
    }
    let mut v = json!({ "kind": kind });
    if let Some(a) = arg {
        let key = match kind {
            "kannan_k" => "k",
            "scale" => "c",
            "iterated_kannan" => "m",
            _ => return Err(bad()),
        };
        v[key] = if key == "m" {
            Value::from(a.trim().parse::<u64>().map_err(|_| bad())?)
        } else {
            Value::from(a.trim())
        };
    }
    Ok(v)
}

fn parse<T: DeserializeOwned>(text: &str, what: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Usage(format!("{what}: {e}")))
}

pub fn load_space(arg: &str) -> Result<(Space, SpaceSpec), CliError> {
    let spec: SpaceSpec = parse(&source_text(arg, "space")?, "space")?;
    let space = Space::from_spec(&spec)?;
    Ok((space, spec))
}

pub fn load_map(arg: &str, space: &Space) -> Result<(SelfMap, MapSpec), CliError> {
    let spec: MapSpec = parse(&source_text(arg, "map")?, "map")?;
    let map = SelfMap::from_spec(&spec, space)?;
    Ok((map, spec))
}

pub fn load_condition(arg: &str, space: &Space) -> Result<(ConditionKind, ConditionSpec), CliError> {
    let spec: ConditionSpec = parse(&source_text(arg, "condition")?, "condition")?;
    let cond = spec.resolve(space)?;
    Ok((cond, spec))
}

/// `exhaustive`, `sample:N` (N points drawn with `seed`), a JSON array of
/// points, or a JSON array of `[x, y]` pairs.
pub fn load_pairs(arg: &str, space: &Space, seed: u64) -> Result<(PairSource, Value), CliError> {
    let t = arg.trim();
    if t == "exhaustive" {
        return Ok((PairSource::Exhaustive, json!("exhaustive")));
    }
    if let Some(n) = t.strip_prefix("sample:") {
        let n: usize = n.parse().map_err(|_| CliError::Usage(format!("pairs: bad sample size {n:?}")))?;
        let points = space.sample(n, seed);
        return Ok((PairSource::Sample { points, seed: Some(seed) }, json!({ "sample": n, "seed": seed })));
    }
    let text = if t.starts_with('[') {
        t.to_string()
    } else if Path::new(t).is_file() {
        std::fs::read_to_string(t).map_err(|e| CliError::Usage(format!("pairs: {t}: {e}")))?
    } else {
        return Err(CliError::Usage(format!("pairs: cannot read {t:?}")));
    };
    let value: Value = parse(&text, "pairs")?;
    let items = value.as_array().ok_or_else(|| CliError::Usage("pairs: expected a JSON array".into()))?;
    let point = |v: &Value| -> Result<Point, CliError> {
        let s = match v {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            _ => return Err(CliError::Usage(format!("pairs: bad point {v}"))),
        };
        Ok(space.parse_point(&s)?)
    };
    let source = if items.iter().all(Value::is_array) {
        let mut pairs = Vec::with_capacity(items.len());
        for it in items {
            match it.as_array().map(Vec::as_slice) {
                Some([x, y]) => pairs.push((point(x)?, point(y)?)),
                _ => return Err(CliError::Usage(format!("pairs: expected [x, y], got {it}"))),
            }
        }
        PairSource::Pairs(pairs)
    } else {
        let points = items.iter().map(point).collect::<Result<Vec<_>, _>>()?;
        PairSource::Sample { points, seed: None }
    };
    Ok((source, value))
}
