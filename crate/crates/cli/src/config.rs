//! Run settings merged from flags, a `key=value` config file, `CARLITZ_LAB_*`
//! environment variables and built-in defaults, in that order of precedence.

use std::collections::BTreeMap;
use std::path::Path;

use carlitz_core::counting::DEFAULT_COUNT_CAP;
use carlitz_core::curves::DEFAULT_SEARCH_EXTENSION_CAP;
use carlitz_core::exceptional::DEFAULT_SCAN_BUDGET;
use carlitz_core::field::DEFAULT_FIELD_CAP;
use carlitz_core::poly::DEFAULT_SEED;

use crate::CliError;

pub const ENV_PREFIX: &str = "CARLITZ_LAB_";

/// Keys accepted in config files. Each maps to the flag of the same name with
/// `_` replaced by `-`, and to the variable `CARLITZ_LAB_<KEY>`.
pub const KEYS: &[&str] = &[
    "field",
    "poly",
    "curve",
    "levels",
    "nmax",
    "extra",
    "q",
    "d",
    "format",
    "seed",
    "output",
    "field_cap",
    "level_cap",
    "ext_cap",
    "budget",
    "audit",
];

#[derive(Clone, Debug, Default)]
pub struct Settings {
    file: BTreeMap<String, String>,
    env: BTreeMap<String, String>,
}

impl Settings {
    pub fn load(config: Option<&Path>) -> Result<Settings, CliError> {
        let file = match config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
                parse_config(&text)?
            }
            None => BTreeMap::new(),
        };
        let env = std::env::vars()
            .filter_map(|(k, v)| {
                let key = k.strip_prefix(ENV_PREFIX)?.to_ascii_lowercase();
                KEYS.contains(&key.as_str()).then_some((key, v))
            })
            .collect();
        Ok(Settings { file, env })
    }

    /// The flag value if given, else the config file, else the environment.
    pub fn string(&self, flag: Option<String>, key: &str) -> Option<String> {
        flag.or_else(|| self.file.get(key).cloned()).or_else(|| self.env.get(key).cloned())
    }

    pub fn require(&self, flag: Option<String>, key: &str) -> Result<String, CliError> {
        self.string(flag, key).ok_or_else(|| CliError::Usage(format!("missing --{}", key.replace('_', "-"))))
    }

    pub fn number<T: std::str::FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.string(None, key) {
            Some(s) => s.trim().parse().map_err(|_| CliError::Usage(format!("{key}: expected a number, found {s:?}"))),
            None => Ok(default),
        }
    }

    pub fn caps(&self, flags: &CapFlags) -> Result<Caps, CliError> {
        let caps = Caps {
            field: self.number(flags.field_cap, "field_cap", DEFAULT_FIELD_CAP)?,
            level: self.number(flags.level_cap, "level_cap", DEFAULT_COUNT_CAP)?,
            extension: self.number(flags.ext_cap, "ext_cap", DEFAULT_SEARCH_EXTENSION_CAP)?,
            budget: self.number(flags.budget, "budget", DEFAULT_SCAN_BUDGET)?,
        };
        if caps.field < 2 || caps.level == 0 || caps.extension == 0 || caps.budget == 0 {
            return Err(CliError::Usage("caps must be positive (field cap at least 2)".into()));
        }
        Ok(caps)
    }

    pub fn seed(&self, flag: Option<u64>) -> Result<u64, CliError> {
        self.number(flag, "seed", DEFAULT_SEED)
    }
}

#[derive(Clone, Copy, Debug, Default, clap::Args)]
pub struct CapFlags {
    /// Largest field order that may be constructed.
    #[arg(long, global = true)]
    pub field_cap: Option<u64>,
    /// Largest q^n at which points are counted or permutations tested.
    #[arg(long, global = true)]
    pub level_cap: Option<u64>,
    /// Largest extension degree tried by the auxiliary-curve search.
    #[arg(long, global = true)]
    pub ext_cap: Option<u32>,
    /// Largest number of candidates a scan may test.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub field: u64,
    pub level: u64,
    pub extension: u32,
    pub budget: u64,
}

/// Parses `key = value` lines. Blank lines and lines starting with `#` are
/// skipped; keys may use `-` or `_`.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value", i + 1)))?;
        let key = k.trim().replace('-', "_");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Usage(format!("config line {}: unknown key {key:?}", i + 1)));
        }
        out.insert(key, v.trim().trim_matches('"').to_string());
    }
    Ok(out)
}

/// `"2,3,4"` as a list.
pub fn parse_list(s: &str) -> Result<Vec<u64>, CliError> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("expected a comma-separated list of integers, found {s:?}")))
        })
        .collect()
}

/// `"2..5"` (inclusive), `"2..=5"`, a single value, or a comma list.
pub fn parse_range(s: &str) -> Result<Vec<u64>, CliError> {
    let bad = || CliError::Usage(format!("expected a range like 2..5 or a list, found {s:?}"));
    match s.split_once("..") {
        Some((a, b)) => {
            let lo: u64 = a.trim().parse().map_err(|_| bad())?;
            let hi: u64 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            if lo > hi {
                return Err(bad());
            }
            Ok((lo..=hi).collect())
        }
        None => parse_list(s),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_and_lists() {
        assert_eq!(parse_range("2..5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_range("2..=3").unwrap(), vec![2, 3]);
        assert_eq!(parse_range("4").unwrap(), vec![4]);
        assert_eq!(parse_list("2, 3,9").unwrap(), vec![2, 3, 9]);
        assert!(parse_range("5..2").is_err());
        assert!(parse_list("2,x").is_err());
    }

    #[test]
    fn config_file_syntax() {
        let m = parse_config("# caps\nlevel-cap = 4096\nfield=\"3^2\"\n\n").unwrap();
        assert_eq!(m["level_cap"], "4096");
        assert_eq!(m["field"], "3^2");
        assert!(parse_config("nonsense").is_err());
        assert!(parse_config("colour = red").is_err());
    }

    #[test]
    fn flags_beat_file() {
        let s = Settings {
            file: parse_config("levels = 4\nseed = 9").unwrap(),
            env: BTreeMap::from([("seed".to_string(), "1".to_string()), ("budget".to_string(), "10".to_string())]),
        };
        assert_eq!(s.number(Some(2u32), "levels", 6).unwrap(), 2);
        assert_eq!(s.number(None, "levels", 6u32).unwrap(), 4);
        assert_eq!(s.seed(None).unwrap(), 9);
        assert_eq!(s.caps(&CapFlags::default()).unwrap().budget, 10);
        assert_eq!(s.number(None, "nmax", 3u32).unwrap(), 3);
    }
}
