//! Flat `key = value` configuration files.
//!
//! One assignment per line; blank lines and lines starting with `#` are
//! ignored. Relative paths are resolved against the file's directory.

use std::path::{Path, PathBuf};

use crate::corpus::{check_ratio, SourceSpec};
use crate::error::{read_to_string, Error, Result};

/// Parses `key = value` lines, keeping line numbers for error messages.
pub fn parse_flat(text: &str, origin: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::parse(origin, i + 1, "expected key = value"))?;
        let k = k.trim();
        if k.is_empty() {
            return Err(Error::parse(origin, i + 1, "empty key"));
        }
        out.push((i + 1, k.to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn parse_value<T: std::str::FromStr>(origin: &str, line: usize, key: &str, v: &str) -> Result<T> {
    v.parse()
        .map_err(|_| Error::parse(origin, line, format!("bad value {v:?} for {key}")))
}

fn resolve(base: &Path, v: &str) -> PathBuf {
    let p = Path::new(v);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub manifest: Option<PathBuf>,
    pub rules: Option<PathBuf>,
    pub dict: Option<PathBuf>,
    pub journal: Option<PathBuf>,
    pub journal_base_id: u64,
    pub train_ratio_lm: f64,
    pub train_ratio_sum: f64,
    pub seed: u64,
    pub out: PathBuf,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            manifest: None,
            rules: None,
            dict: None,
            journal: None,
            journal_base_id: 6_100_000,
            train_ratio_lm: 0.9,
            train_ratio_sum: 0.99,
            seed: 42,
            out: PathBuf::from("out"),
        }
    }
}

impl PipelineConfig {
    /// Parses a config; `base` is the directory relative paths refer to.
    /// Unknown keys are an error so that typos do not pass silently.
    pub fn parse(text: &str, origin: &str, base: &Path) -> Result<Self> {
        let mut cfg = PipelineConfig::default();
        for (line, key, v) in parse_flat(text, origin)? {
            match key.as_str() {
                "manifest" => cfg.manifest = Some(resolve(base, &v)),
                "rules" => cfg.rules = Some(resolve(base, &v)),
                "dict" => cfg.dict = Some(resolve(base, &v)),
                "journal" => cfg.journal = Some(resolve(base, &v)),
                "out" => cfg.out = resolve(base, &v),
                "journal_base_id" => cfg.journal_base_id = parse_value(origin, line, &key, &v)?,
                "seed" => cfg.seed = parse_value(origin, line, &key, &v)?,
                "train_ratio_lm" | "train_ratio_sum" => {
                    let r: f64 = parse_value(origin, line, &key, &v)?;
                    check_ratio(r).map_err(|e| Error::parse(origin, line, e.to_string()))?;
                    if key == "train_ratio_lm" {
                        cfg.train_ratio_lm = r;
                    } else {
                        cfg.train_ratio_sum = r;
                    }
                }
                _ => return Err(Error::parse(origin, line, format!("unknown key {key:?}"))),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse(&read_to_string(path)?, &path.display().to_string(), base)
    }
}

/// One corpus source with its input files.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestSource {
    pub spec: SourceSpec,
    pub inputs: Vec<PathBuf>,
}

/// Sources keyed `<name>.base_id`, `<name>.paragraph_ids` and
/// `<name>.inputs` (comma-separated), in order of first mention.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SourceManifest {
    pub sources: Vec<ManifestSource>,
}

impl SourceManifest {
    pub fn parse(text: &str, origin: &str, base: &Path) -> Result<Self> {
        let mut sources: Vec<(ManifestSource, bool)> = Vec::new();
        for (line, key, v) in parse_flat(text, origin)? {
            let (name, field) = key
                .rsplit_once('.')
                .ok_or_else(|| Error::parse(origin, line, format!("key {key:?} is not <source>.<field>")))?;
            let i = match sources.iter().position(|(s, _)| s.spec.name == name) {
                Some(i) => i,
                None => {
                    sources.push((
                        ManifestSource {
                            spec: SourceSpec::new(name, 0, true),
                            inputs: Vec::new(),
                        },
                        false,
                    ));
                    sources.len() - 1
                }
            };
            let (src, has_base) = &mut sources[i];
            match field {
                "base_id" => {
                    src.spec.base_id = parse_value(origin, line, &key, &v)?;
                    *has_base = true;
                }
                "paragraph_ids" => src.spec.has_paragraph_ids = parse_value(origin, line, &key, &v)?,
                "inputs" => src.inputs.extend(
                    v.split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(|s| resolve(base, s)),
                ),
                _ => return Err(Error::parse(origin, line, format!("unknown field {field:?}"))),
            }
        }
        let mut out = Vec::with_capacity(sources.len());
        for (src, has_base) in sources {
            if !has_base {
                return Err(Error::InvalidArgument(format!(
                    "{origin}: source {} has no base_id",
                    src.spec.name
                )));
            }
            out.push(src);
        }
        Ok(SourceManifest { sources: out })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let base = path.parent().unwrap_or(Path::new(""));
        Self::parse(&read_to_string(path)?, &path.display().to_string(), base)
    }
}
