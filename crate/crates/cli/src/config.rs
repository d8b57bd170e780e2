//! Flat `key = value` config files merged under command-line flags.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use crate::args::Flags;
use crate::{CliError, CliResult};

/// Parses `key = value` lines; `#` starts a comment, keys accept `_` or `-`.
pub fn parse_config(text: &str) -> CliResult<BTreeMap<String, String>> {
    let known = Flags::known_keys();
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key = value", lineno + 1)))?;
        let key = key.trim().to_ascii_lowercase().replace('_', "-");
        if !known.contains(&key.as_str()) {
            return Err(CliError::Config(format!("line {}: unknown key '{key}'", lineno + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

/// Effective settings after layering flags over the config file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

impl Settings {
    pub fn resolve(flags: &Flags) -> CliResult<Self> {
        let mut values = match &flags.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
                parse_config(&text)?
            }
            None => BTreeMap::new(),
        };
        for (key, value) in flags.entries() {
            if let Some(v) = value {
                values.insert(key.to_string(), v.clone());
            }
        }
        Ok(Self { values })
    }

    pub fn from_pairs(pairs: &[(&str, &str)]) -> Self {
        Self { values: pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect() }
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>>
    where
        T::Err: Display,
    {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|e| CliError::Config(format!("--{key} '{v}': {e}"))))
            .transpose()
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> CliResult<T>
    where
        T::Err: Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// Comma-separated list, or `default` when absent.
    pub fn list<T: FromStr>(&self, key: &str, default: &str) -> CliResult<Vec<T>>
    where
        T::Err: Display,
    {
        let raw = self.raw(key).unwrap_or(default);
        raw.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<T>().map_err(|e| CliError::Config(format!("--{key} '{s}': {e}"))))
            .collect()
    }
}

/// `start:stop:points-per-decade` geometric grid, a comma list, or one value.
pub fn parse_time_grid(text: &str) -> CliResult<Vec<f64>> {
    let bad = |msg: &str| CliError::Config(format!("--total-time '{text}': {msg}"));
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| bad(&e.to_string()));
    let grid = if let [start, stop, ppd] = text.split(':').collect::<Vec<_>>().as_slice() {
        let (start, stop) = (num(start)?, num(stop)?);
        let ppd: usize = ppd.trim().parse().map_err(|e: std::num::ParseIntError| bad(&e.to_string()))?;
        if !(start > 0.0 && stop >= start && ppd > 0) {
            return Err(bad("need 0 < start <= stop and points-per-decade > 0"));
        }
        let ratio = 10f64.powf(1.0 / ppd as f64);
        let count = ((stop / start).log10() * ppd as f64 + 1e-9).floor() as i32;
        (0..=count).map(|k| start * ratio.powi(k)).collect()
    } else {
        text.split(',').map(num).collect::<CliResult<Vec<f64>>>()?
    };
    if grid.is_empty() || grid.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(bad("times must be positive and finite"));
    }
    Ok(grid)
}

/// Comma list of seeds or a half-open range `a..b`.
pub fn parse_seeds(text: &str) -> CliResult<Vec<u64>> {
    let bad = |e: &dyn Display| CliError::Config(format!("--seeds '{text}': {e}"));
    if let Some((a, b)) = text.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|e| bad(&e))?;
        let b: u64 = b.trim().parse().map_err(|e| bad(&e))?;
        if b <= a {
            return Err(bad(&"empty range"));
        }
        return Ok((a..b).collect());
    }
    text.split(',').map(|s| s.trim().parse::<u64>().map_err(|e| bad(&e))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_lines() {
        let map = parse_config("# sweep\nmodel = aklt\ntotal_time=1:10:2  # grid\n\nseed = 4\n").unwrap();
        assert_eq!(map["model"], "aklt");
        assert_eq!(map["total-time"], "1:10:2");
        assert_eq!(map["seed"], "4");
        assert!(parse_config("bogus = 1").is_err());
        assert!(parse_config("model aklt").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.cfg");
        std::fs::write(&path, "model = aklt\nseed = 3\n").unwrap();
        let flags = Flags { config: Some(path), seed: Some("9".into()), ..Flags::default() };
        let s = Settings::resolve(&flags).unwrap();
        assert_eq!(s.raw("model"), Some("aklt"));
        assert_eq!(s.get::<u64>("seed").unwrap(), Some(9));
    }

    #[test]
    fn time_grids() {
        let g = parse_time_grid("1:100:2").unwrap();
        assert_eq!(g.len(), 5);
        assert!((g[4] - 100.0).abs() < 1e-9 && (g[1] - 10f64.sqrt()).abs() < 1e-12);
        assert_eq!(parse_time_grid("5").unwrap(), vec![5.0]);
        assert_eq!(parse_time_grid("1,2.5").unwrap(), vec![1.0, 2.5]);
        assert!(parse_time_grid("0:1:3").is_err());
        assert!(parse_time_grid("-1").is_err());
    }

    #[test]
    fn seed_lists() {
        assert_eq!(parse_seeds("0..3").unwrap(), vec![0, 1, 2]);
        assert_eq!(parse_seeds("5, 7").unwrap(), vec![5, 7]);
        assert!(parse_seeds("3..3").is_err());
    }
}
