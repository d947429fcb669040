//! Flat `key = value` experiment configuration.
//!
//! One entry per line; `#` starts a comment. List values are comma separated
//! or written as `linspace(start, stop, count)`. Recognized keys:
//!
//! | key | meaning |
//! |-----|---------|
//! | `n`, `m` | dictionary shape (`m` defaults to `n`) |
//! | `k` | sparsity, or the fixed sparsity of a σ_min × δ grid |
//! | `s` | replacement step for `srr` and `ompr` (default 1) |
//! | `sigma_min_list` | first grid axis |
//! | `delta_list` | second grid axis, or one fixed noise level |
//! | `k_list` | second grid axis instead of `delta_list` |
//! | `trials` | instances per grid cell or per size |
//! | `seed` | base seed |
//! | `algorithms` | algorithm names, see [`Algorithm`](super::Algorithm) |
//! | `condition_number` | stability runs: `1 / σ_min` of every dictionary |
//! | `sizes` | stability runs: the values of `m = n` |
//! | `reps` | stability runs: timed repetitions per point (default 5) |

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};

pub const KNOWN_KEYS: &[&str] = &[
    "n",
    "m",
    "k",
    "s",
    "sigma_min_list",
    "delta_list",
    "k_list",
    "trials",
    "seed",
    "algorithms",
    "condition_number",
    "sizes",
    "reps",
];

/// Parsed key/value pairs, validated against [`KNOWN_KEYS`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) =
                line.split_once('=').ok_or_else(|| bad(format!("line {}: expected `key = value`", i + 1)))?;
            let key = key.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(bad(format!("line {}: unknown key `{key}`", i + 1)));
            }
            if entries.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(bad(format!("line {}: duplicate key `{key}`", i + 1)));
            }
        }
        Ok(Self { entries })
    }

    /// Reads a config file. A missing or unreadable file is a configuration
    /// error, not an IO error.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| bad(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> Result<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(bad(format!("unknown key `{key}`")));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn get<V: FromStr>(&self, key: &str) -> Result<Option<V>> {
        self.raw(key).map(|v| v.parse().map_err(|_| bad(format!("`{key}`: cannot parse `{v}`")))).transpose()
    }

    pub fn get_or<V: FromStr>(&self, key: &str, default: V) -> Result<V> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    pub fn require<V: FromStr>(&self, key: &str) -> Result<V> {
        self.get(key)?.ok_or_else(|| bad(format!("missing key `{key}`")))
    }

    pub fn list_f64(&self, key: &str) -> Result<Option<Vec<f64>>> {
        self.raw(key).map(|v| parse_list(key, v)).transpose()
    }

    pub fn list_usize(&self, key: &str) -> Result<Option<Vec<usize>>> {
        let Some(raw) = self.raw(key) else { return Ok(None) };
        raw.split(',')
            .map(|t| t.trim().parse().map_err(|_| bad(format!("`{key}`: cannot parse `{}`", t.trim()))))
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    pub fn names(&self, key: &str) -> Option<Vec<String>> {
        self.raw(key).map(|v| v.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect())
    }
}

fn parse_list(key: &str, raw: &str) -> Result<Vec<f64>> {
    let raw = raw.trim();
    let num = |t: &str| -> Result<f64> {
        let v: f64 = t.trim().parse().map_err(|_| bad(format!("`{key}`: cannot parse `{}`", t.trim())))?;
        if !v.is_finite() {
            return Err(bad(format!("`{key}`: non-finite value")));
        }
        Ok(v)
    };
    if let Some(args) = raw.strip_prefix("linspace(").and_then(|r| r.strip_suffix(')')) {
        let parts: Vec<&str> = args.split(',').collect();
        let [a, b, c] = parts[..] else {
            return Err(bad(format!("`{key}`: linspace takes (start, stop, count)")));
        };
        let count: usize = c.trim().parse().map_err(|_| bad(format!("`{key}`: bad linspace count")))?;
        return Ok(linspace(num(a)?, num(b)?, count));
    }
    raw.split(',').map(num).collect()
}

/// `count` evenly spaced values from `a` to `b` inclusive.
pub fn linspace(a: f64, b: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..count).map(|i| if i + 1 == count { b } else { a + (b - a) * i as f64 / (count - 1) as f64 }).collect(),
    }
}
