//! Plain-text IFS documents, one `key = value(s)` per line:
//!
//! ```text
//! name = fern
//! map = 0.85 -0.05 0.125 0.05 0.85 -0.039
//! map = ...
//! probabilities = 0.7 0.1 0.1 0.1
//! viewport = 0 0 1 1
//! ```
//!
//! `map` repeats, once per map, with coefficients in `a b c d e l` order.
//! `probabilities` is optional. Blank lines and `#` comments are ignored.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{AffineMap2, Ifs, Viewport};

#[derive(Debug, Clone, PartialEq)]
pub struct IfsConfig {
    pub name: String,
    pub maps: Vec<[f64; 6]>,
    pub probabilities: Option<Vec<f64>>,
    pub viewport: [f64; 4],
}

impl IfsConfig {
    pub fn from_ifs(name: &str, ifs: &Ifs) -> Self {
        let vp = ifs.viewport();
        Self {
            name: name.to_string(),
            maps: ifs.maps().iter().map(|m| m.to_row()).collect(),
            probabilities: Some(ifs.probabilities().to_vec()),
            viewport: [vp.min.x, vp.min.y, vp.max.x, vp.max.y],
        }
    }

    pub fn to_ifs(&self) -> Result<Ifs> {
        let [x0, y0, x1, y1] = self.viewport;
        Ifs::new(
            self.maps.iter().map(|r| AffineMap2::from_row(*r)).collect(),
            self.probabilities.clone(),
            Viewport::new(x0, y0, x1, y1)?,
        )
    }
}

fn numbers(key: &str, value: &str) -> Result<Vec<f64>> {
    value
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::Parse(format!("{key}: bad number {t:?}")))
        })
        .collect()
}

fn exactly<const K: usize>(key: &str, value: &str) -> Result<[f64; K]> {
    let v = numbers(key, value)?;
    v.try_into().map_err(|v: Vec<f64>| {
        Error::Parse(format!("{key}: expected {K} numbers, found {}", v.len()))
    })
}

impl FromStr for IfsConfig {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut name = None;
        let mut maps = Vec::new();
        let mut probabilities = None;
        let mut viewport = None;
        for (n, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value", n + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "name" => name = Some(value.to_string()),
                "map" => maps.push(exactly::<6>(key, value)?),
                "probabilities" => probabilities = Some(numbers(key, value)?),
                "viewport" => viewport = Some(exactly::<4>(key, value)?),
                other => {
                    return Err(Error::Parse(format!(
                        "line {}: unknown key {other:?}",
                        n + 1
                    )))
                }
            }
        }
        if maps.is_empty() {
            return Err(Error::Parse("no maps".into()));
        }
        Ok(Self {
            name: name.unwrap_or_default(),
            maps,
            probabilities,
            viewport: viewport.ok_or_else(|| Error::Parse("missing viewport".into()))?,
        })
    }
}

fn join(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| format!("{v:?}"))
        .collect::<Vec<_>>()
        .join(" ")
}

impl fmt::Display for IfsConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "name = {}", self.name)?;
        for m in &self.maps {
            writeln!(f, "map = {}", join(m))?;
        }
        if let Some(p) = &self.probabilities {
            writeln!(f, "probabilities = {}", join(p))?;
        }
        writeln!(f, "viewport = {}", join(&self.viewport))
    }
}
