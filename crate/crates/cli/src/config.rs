//! Settings from a key=value file, MAHLERCM_* environment variables and
//! flags, in increasing priority.

use mahlercm::{Error, Result};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

pub const ENV_PREFIX: &str = "MAHLERCM_";

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub prec: u32,
    /// Overrides the per-command tolerance when set.
    pub eps: Option<f64>,
    pub cache_dir: PathBuf,
    pub online: bool,
    pub jobs: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            prec: 256,
            eps: None,
            cache_dir: PathBuf::from(".mahlercm-cache"),
            online: false,
            jobs: std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        }
    }
}

/// Flag values that override everything else when present.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub prec: Option<u32>,
    pub eps: Option<f64>,
    pub cache_dir: Option<PathBuf>,
    pub online: Option<bool>,
    pub jobs: Option<usize>,
}

/// `key = value` lines; `#` starts a comment.
pub fn parse_file(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", i + 1)))?;
        out.insert(k.trim().to_ascii_lowercase(), v.trim().to_string());
    }
    Ok(out)
}

fn apply(cfg: &mut Config, key: &str, val: &str, origin: &str) -> Result<()> {
    let bad = |what: &str| Error::Parse(format!("{origin}: {key} = {val:?} is not {what}"));
    match key {
        "prec" => cfg.prec = val.parse().map_err(|_| bad("an integer"))?,
        "eps" => cfg.eps = Some(val.parse().map_err(|_| bad("a number"))?),
        "cache_dir" => cfg.cache_dir = PathBuf::from(val),
        "online" => {
            cfg.online = match val {
                "1" | "true" | "yes" => true,
                "0" | "false" | "no" => false,
                _ => return Err(bad("a boolean")),
            }
        }
        "jobs" => cfg.jobs = val.parse().map_err(|_| bad("an integer"))?,
        _ => return Err(Error::Parse(format!("{origin}: unknown key {key}"))),
    }
    Ok(())
}

/// Resolves the configuration. `file` falls back to $MAHLERCM_CONFIG; a
/// missing default file is not an error, a missing named one is.
pub fn resolve(
    file: Option<&Path>,
    env: impl Fn(&str) -> Option<String>,
    flags: &Overrides,
) -> Result<Config> {
    let mut cfg = Config::default();
    let path = file.map(Path::to_path_buf).or_else(|| env("CONFIG").map(PathBuf::from));
    if let Some(p) = path {
        let text = std::fs::read_to_string(&p).map_err(|e| Error::NotFound(format!("config {}: {e}", p.display())))?;
        for (k, v) in parse_file(&text)? {
            apply(&mut cfg, &k, &v, &p.display().to_string())?;
        }
    }
    for key in ["prec", "eps", "cache_dir", "online", "jobs"] {
        if let Some(v) = env(&key.to_ascii_uppercase()) {
            apply(&mut cfg, key, &v, &format!("{ENV_PREFIX}{}", key.to_ascii_uppercase()))?;
        }
    }
    if let Some(p) = flags.prec {
        cfg.prec = p;
    }
    if flags.eps.is_some() {
        cfg.eps = flags.eps;
    }
    if let Some(d) = &flags.cache_dir {
        cfg.cache_dir = d.clone();
    }
    if let Some(o) = flags.online {
        cfg.online = o;
    }
    if let Some(j) = flags.jobs {
        cfg.jobs = j;
    }
    if cfg.prec < 64 {
        return Err(Error::DomainError(format!("precision must be at least 64 bits, got {}", cfg.prec)));
    }
    if cfg.eps.is_some_and(|e| !(e > 0.0 && e < 1.0)) {
        return Err(Error::DomainError("eps must lie in (0, 1)".into()));
    }
    cfg.jobs = cfg.jobs.max(1);
    Ok(cfg)
}

pub fn process_env(key: &str) -> Option<String> {
    std::env::var(format!("{ENV_PREFIX}{key}")).ok()
}
