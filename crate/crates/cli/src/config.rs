//! Settings merged from an optional INI file and command-line flags.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use gaugeforge::expr::Binding;
use gaugeforge::mechanics::Sign;
use ini::Ini;

use crate::CliError;

pub const DEFAULT_SEED: u64 = 42;
pub const SEED_VAR: &str = "GAUGEFORGE_SEED";

const KEYS: [&str; 12] = [
    "system",
    "gauge",
    "lagrangian",
    "sign",
    "x0",
    "v0",
    "t0",
    "t1",
    "dt",
    "out",
    "seed",
    "params",
];

/// Values read from a `key = value` file. Everything is kept as text until
/// the command that needs it asks.
#[derive(Debug, Default, Clone)]
pub struct FileConfig {
    entries: Vec<(String, String)>,
    path: PathBuf,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let ini = Ini::load_from_file(path).map_err(|e| {
            CliError::Usage(format!("cannot read config `{}`: {e}", path.display()))
        })?;
        let mut entries = Vec::new();
        for (section, props) in ini.iter() {
            if let Some(name) = section {
                return Err(CliError::Usage(format!(
                    "config `{}`: sections are not supported (found [{name}])",
                    path.display()
                )));
            }
            for (key, value) in props.iter() {
                if !KEYS.contains(&key) {
                    return Err(CliError::Usage(format!(
                        "config `{}`: unknown key `{key}`; valid keys: {}",
                        path.display(),
                        KEYS.join(", ")
                    )));
                }
                entries.push((key.to_string(), value.trim().to_string()));
            }
        }
        Ok(FileConfig {
            entries,
            path: path.to_path_buf(),
        })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.entries
            .iter()
            .rev()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn text(&self, key: &str) -> Option<String> {
        self.raw(key).map(str::to_string)
    }

    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.raw(key)
            .map(|v| {
                v.parse::<T>().map_err(|e| {
                    CliError::Usage(format!(
                        "config `{}`: bad value for `{key}` (`{v}`): {e}",
                        self.path.display()
                    ))
                })
            })
            .transpose()
    }
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Default, clap::Args)]
pub struct CommonArgs {
    /// INI-style `key = value` file; flags override its values.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Parameter value, repeatable.
    #[arg(long = "param", value_name = "NAME=VALUE", allow_hyphen_values = true)]
    pub params: Vec<String>,
    /// Driving sign: + or -.
    #[arg(long, allow_hyphen_values = true)]
    pub sign: Option<String>,
    /// Seed for randomized numeric checks.
    #[arg(long)]
    pub seed: Option<u64>,
}

/// Fully resolved settings: flag, then file, then environment, then default.
#[derive(Debug, Clone)]
pub struct Settings {
    pub file: FileConfig,
    pub sign: Sign,
    pub params: Binding,
    pub seed: u64,
}

impl Settings {
    pub fn resolve(common: &CommonArgs) -> Result<Self, CliError> {
        let file = match &common.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let sign = match common.sign.clone().or_else(|| file.text("sign")) {
            Some(s) => s.parse::<Sign>().map_err(CliError::Usage)?,
            None => Sign::Plus,
        };
        let mut params = Binding::new();
        if let Some(list) = file.text("params") {
            for item in list.split(',').filter(|s| !s.trim().is_empty()) {
                let (k, v) = parse_param(item)?;
                params.insert(k, v);
            }
        }
        for item in &common.params {
            let (k, v) = parse_param(item)?;
            params.insert(k, v);
        }
        let seed = match common.seed {
            Some(s) => s,
            None => match file.parsed::<u64>("seed")? {
                Some(s) => s,
                None => env_seed()?,
            },
        };
        Ok(Settings {
            file,
            sign,
            params,
            seed,
        })
    }

    pub fn text(&self, flag: &Option<String>, key: &str) -> Option<String> {
        flag.clone().or_else(|| self.file.text(key))
    }

    pub fn number(&self, flag: Option<f64>, key: &str, default: f64) -> Result<f64, CliError> {
        Ok(match flag {
            Some(v) => v,
            None => self.file.parsed::<f64>(key)?.unwrap_or(default),
        })
    }
}

fn env_seed() -> Result<u64, CliError> {
    match std::env::var(SEED_VAR) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|e| CliError::Usage(format!("{SEED_VAR}=`{v}` is not a seed: {e}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

/// `NAME=VALUE`.
pub fn parse_param(text: &str) -> Result<(String, f64), CliError> {
    let bad = || CliError::Usage(format!("bad parameter `{text}` (expected NAME=VALUE)"));
    let (name, value) = text.split_once('=').ok_or_else(bad)?;
    let name = name.trim();
    let valid_name = name
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
    if !valid_name {
        return Err(bad());
    }
    let value: f64 = value.trim().parse().map_err(|_| bad())?;
    if !value.is_finite() {
        return Err(bad());
    }
    Ok((name.to_string(), value))
}
