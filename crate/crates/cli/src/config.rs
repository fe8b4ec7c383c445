//! Reading JSON configs, applying `--set` overrides, and resolving files
//! referenced from a config.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use unioncs::{ConvexSetDescriptor, Matrix, ProblemInstance, Vector};

/// A config failed to load or parse. Maps to exit status 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn config_error(msg: String) -> anyhow::Error {
    anyhow!(ConfigError(msg))
}

/// One `key.path=value` override. The value is parsed as JSON when possible
/// and kept as a string otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct Override {
    pub path: Vec<String>,
    pub value: Value,
}

impl Override {
    pub fn parse(text: &str) -> Result<Self> {
        let (key, raw) = text
            .split_once('=')
            .ok_or_else(|| config_error(format!("override `{text}` is not of the form key=value")))?;
        let path: Vec<String> = key.trim().split('.').map(str::to_string).collect();
        if path.iter().any(String::is_empty) {
            return Err(config_error(format!("override key `{key}` has an empty component")));
        }
        let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.to_string()));
        Ok(Override { path, value })
    }

    pub fn key(&self) -> String {
        self.path.join(".")
    }

    fn apply(&self, root: &mut Value) -> Result<()> {
        let mut node = root;
        for (depth, part) in self.path.iter().enumerate() {
            let last = depth + 1 == self.path.len();
            node = match node {
                Value::Object(map) => {
                    if last {
                        map.insert(part.clone(), self.value.clone());
                        return Ok(());
                    }
                    map.entry(part.clone()).or_insert_with(|| Value::Object(Map::new()))
                }
                Value::Array(items) => {
                    let i: usize = part
                        .parse()
                        .map_err(|_| config_error(format!("override {}: `{part}` is not an index", self.key())))?;
                    let len = items.len();
                    let slot = items
                        .get_mut(i)
                        .ok_or_else(|| config_error(format!("override {}: index {i} out of {len}", self.key())))?;
                    if last {
                        *slot = self.value.clone();
                        return Ok(());
                    }
                    slot
                }
                _ => bail!(ConfigError(format!("override {}: `{part}` is inside a scalar", self.key()))),
            };
        }
        Ok(())
    }
}

/// Overrides as a JSON object for the run summary.
pub fn overrides_json(overrides: &[Override]) -> Value {
    Value::Object(overrides.iter().map(|o| (o.key(), o.value.clone())).collect())
}

/// A parsed config file together with the directory relative paths resolve
/// against.
pub struct Loaded {
    pub path: PathBuf,
    pub dir: PathBuf,
    text: String,
    pub value: Value,
}

pub fn load(path: &Path, overrides: &[Override]) -> Result<Loaded> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_error(format!("cannot read config {}: {e}", path.display())))?;
    let mut value: Value = serde_json::from_str(&text)
        .map_err(|e| config_error(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())))?;
    for o in overrides {
        o.apply(&mut value)?;
    }
    let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(Loaded { path: path.to_path_buf(), dir, text, value })
}

impl Loaded {
    /// Deserializes the (overridden) config. Errors on an untouched file
    /// carry line and column.
    pub fn parse<T: DeserializeOwned>(&self, untouched: bool) -> Result<T> {
        let parsed = if untouched {
            serde_json::from_str(&self.text)
        } else {
            serde_json::from_value(self.value.clone())
        };
        parsed.map_err(|e| {
            if e.line() > 0 {
                config_error(format!("{}:{}:{}: {e}", self.path.display(), e.line(), e.column()))
            } else {
                config_error(format!("{}: {e}", self.path.display()))
            }
        })
    }

    pub fn resolve(&self, relative: &str) -> PathBuf {
        let p = Path::new(relative);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.dir.join(p)
        }
    }
}

/// Reads a headerless numeric CSV into rows.
pub fn read_csv_rows(path: &Path) -> Result<Vec<Vec<f64>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| config_error(format!("{}: {e}", path.display())))?;
        let row = record
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| config_error(format!("{}:{}: {e}", path.display(), i + 1)))?;
        rows.push(row);
    }
    Ok(rows)
}

fn read_vector(path: &Path) -> Result<Vec<f64>> {
    Ok(read_csv_rows(path)?.into_iter().flatten().collect())
}

pub fn read_sets(path: &Path) -> Result<Vec<ConvexSetDescriptor>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_error(format!("cannot read set file {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| config_error(format!("{}:{}:{}: {e}", path.display(), e.line(), e.column())))
}

/// `problem` section of a solve config: every field may be given inline or
/// as a file relative to the config.
#[derive(Debug, Default, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSource {
    #[serde(rename = "A", alias = "a")]
    pub a: Option<Matrix>,
    #[serde(rename = "A_file", alias = "a_file")]
    pub a_file: Option<String>,
    pub y: Option<Vec<f64>>,
    pub y_file: Option<String>,
    #[serde(default)]
    pub sets: Vec<ConvexSetDescriptor>,
    pub sets_file: Option<String>,
    pub x_true: Option<Vec<f64>>,
    pub x_true_file: Option<String>,
}

impl ProblemSource {
    pub fn build(self, cfg: &Loaded) -> Result<ProblemInstance> {
        let a = match (self.a, self.a_file) {
            (Some(a), None) => a,
            (None, Some(f)) => {
                let path = cfg.resolve(&f);
                Matrix::from_rows(&read_csv_rows(&path)?).with_context(|| format!("matrix file {}", path.display()))?
            }
            _ => bail!(ConfigError("problem needs exactly one of `A` and `A_file`".into())),
        };
        let y = match (self.y, self.y_file) {
            (Some(y), None) => y,
            (None, Some(f)) => read_vector(&cfg.resolve(&f))?,
            _ => bail!(ConfigError("problem needs exactly one of `y` and `y_file`".into())),
        };
        let mut sets = self.sets;
        if let Some(f) = self.sets_file {
            sets.extend(read_sets(&cfg.resolve(&f))?);
        }
        let x_true = match (self.x_true, self.x_true_file) {
            (Some(x), None) => Some(x),
            (None, Some(f)) => Some(read_vector(&cfg.resolve(&f))?),
            (None, None) => None,
            _ => bail!(ConfigError("give at most one of `x_true` and `x_true_file`".into())),
        };
        let x_true = x_true.map(Vector::new).transpose()?;
        Ok(ProblemInstance::new(a, Vector::new(y)?, sets, x_true)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse_json_or_string() {
        let o = Override::parse("solver.horizon=500").unwrap();
        assert_eq!(o.path, ["solver", "horizon"]);
        assert_eq!(o.value, Value::from(500));
        let s = Override::parse("solver.p_schedule=doubling").unwrap();
        assert_eq!(s.value, Value::from("doubling"));
        assert!(Override::parse("novalue").is_err());
        assert!(Override::parse("a..b=1").is_err());
    }

    #[test]
    fn overrides_reach_nested_and_indexed_fields() {
        let mut v: Value = serde_json::json!({"solver": {"lambda1": 1.0}, "m_grid": [4, 8]});
        Override::parse("solver.lambda1=2.5").unwrap().apply(&mut v).unwrap();
        Override::parse("m_grid.1=16").unwrap().apply(&mut v).unwrap();
        Override::parse("solver.new.deep=true").unwrap().apply(&mut v).unwrap();
        assert_eq!(v["solver"]["lambda1"], 2.5);
        assert_eq!(v["m_grid"][1], 16);
        assert_eq!(v["solver"]["new"]["deep"], true);
        assert!(Override::parse("m_grid.7=1").unwrap().apply(&mut v).is_err());
        assert!(Override::parse("solver.lambda1.x=1").unwrap().apply(&mut v).is_err());
    }
}
