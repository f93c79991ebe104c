//! Flat `key = value` run configuration, one setting per line, `#` comments.
//!
//! Keys: scheme, d, f, m, n, spm_capacity, initial_latency, dot_unit, seed,
//! workload, instances, max_cycles, load_latency, weights (path to a file of
//! energy weights in the same format, keyed by weight field name).

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::coproc::{ConfigError, CoprocConfig, Scheme, DEFAULT_INITIAL_LATENCY, DEFAULT_SPM_CAPACITY};
use crate::isa::FuClass;

use super::{EnergyWeights, RunOptions, WorkloadSpec, DEFAULT_INSTANCES, DEFAULT_MAX_CYCLES};

#[derive(Debug, Error)]
pub enum ConfigFileError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("bad value `{value}` for `{key}`")]
    BadValue { key: String, value: String },
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Coproc(#[from] ConfigError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scheme: Scheme,
    pub d: u32,
    /// Optional echoes of the scheme's F and M; checked when given.
    pub f: Option<u32>,
    pub m: Option<u32>,
    /// Scratchpads per interface; the workload default when absent.
    pub n: Option<u32>,
    pub spm_capacity: u32,
    pub initial_latency: u32,
    pub dot_unit: FuClass,
    pub seed: u64,
    pub workload: String,
    pub instances: u32,
    pub max_cycles: u64,
    pub load_latency: u32,
    pub weights: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            scheme: Scheme::Dedicated,
            d: 1,
            f: None,
            m: None,
            n: None,
            spm_capacity: DEFAULT_SPM_CAPACITY,
            initial_latency: DEFAULT_INITIAL_LATENCY,
            dot_unit: FuClass::Multiplier,
            seed: 1,
            workload: "conv32".to_string(),
            instances: DEFAULT_INSTANCES,
            max_cycles: DEFAULT_MAX_CYCLES,
            load_latency: 1,
            weights: None,
        }
    }
}

fn pairs(text: &str) -> Result<Vec<(String, String)>, ConfigFileError> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or(ConfigFileError::Syntax { line: n + 1 })?;
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, ConfigFileError> {
    let bad = || ConfigFileError::BadValue { key: key.to_string(), value: value.to_string() };
    let v = value.replace('_', "");
    if let Some(hex) = v.strip_prefix("0x") {
        let n = u64::from_str_radix(hex, 16).map_err(|_| bad())?;
        return n.to_string().parse().map_err(|_| bad());
    }
    v.parse().map_err(|_| bad())
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigFileError> {
        let mut c = RunConfig::default();
        for (k, v) in pairs(text)? {
            c.set(&k, &v)?;
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigFileError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigFileError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigFileError> {
        let bad = || ConfigFileError::BadValue { key: key.to_string(), value: value.to_string() };
        match key {
            "scheme" => self.scheme = Scheme::parse(value).ok_or_else(bad)?,
            "d" => self.d = num(key, value)?,
            "f" => self.f = Some(num(key, value)?),
            "m" => self.m = Some(num(key, value)?),
            "n" => self.n = Some(num(key, value)?),
            "spm_capacity" => self.spm_capacity = num(key, value)?,
            "initial_latency" => self.initial_latency = num(key, value)?,
            "dot_unit" => {
                self.dot_unit = match value.to_ascii_lowercase().as_str() {
                    "adder" => FuClass::Adder,
                    "multiplier" => FuClass::Multiplier,
                    _ => return Err(bad()),
                }
            }
            "seed" => self.seed = num(key, value)?,
            "workload" => {
                WorkloadSpec::parse(value).ok_or_else(bad)?;
                self.workload = value.to_string();
            }
            "instances" => self.instances = num(key, value)?,
            "max_cycles" => self.max_cycles = num(key, value)?,
            "load_latency" => self.load_latency = num(key, value)?,
            "weights" => self.weights = Some(PathBuf::from(value)),
            _ => return Err(ConfigFileError::UnknownKey(key.to_string())),
        }
        Ok(())
    }

    pub fn workload(&self) -> WorkloadSpec {
        WorkloadSpec::parse(&self.workload).expect("validated on set").with_instances(self.instances)
    }

    pub fn coproc(&self) -> Result<CoprocConfig, ConfigFileError> {
        let n = self.n.unwrap_or_else(|| self.workload().spms());
        let mut c = CoprocConfig::new(self.scheme, self.d, n)?;
        c.spm_capacity = self.spm_capacity;
        c.initial_latency = self.initial_latency;
        c.dot_unit = self.dot_unit;
        if let Some(f) = self.f {
            c.mfus = f;
        }
        if let Some(m) = self.m {
            c.spmis = m;
        }
        c.validate()?;
        Ok(c)
    }

    pub fn options(&self) -> Result<RunOptions, ConfigFileError> {
        let mut o = RunOptions { seed: self.seed, max_cycles: self.max_cycles, ..RunOptions::default() };
        o.core.load_latency = self.load_latency;
        if let Some(p) = &self.weights {
            o.weights = load_weights(p)?;
        }
        Ok(o)
    }
}

pub fn parse_weights(text: &str) -> Result<EnergyWeights, ConfigFileError> {
    let mut w = EnergyWeights::default();
    for (k, v) in pairs(text)? {
        let x: f64 = num(&k, &v)?;
        if !(x.is_finite() && x >= 0.0) {
            return Err(ConfigFileError::BadValue { key: k, value: v });
        }
        match k.as_str() {
            "scalar_instr" => w.scalar_instr = x,
            "vector_line_op" => w.vector_line_op = x,
            "spm_line_access" => w.spm_line_access = x,
            "mem_word" => w.mem_word = x,
            "mfu_idle_cycle" => w.mfu_idle_cycle = x,
            "base_cycle" => w.base_cycle = x,
            _ => return Err(ConfigFileError::UnknownKey(k)),
        }
    }
    Ok(w)
}

pub fn load_weights(path: &Path) -> Result<EnergyWeights, ConfigFileError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ConfigFileError::Io { path: path.display().to_string(), source })?;
    parse_weights(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_file() {
        let c = RunConfig::parse("# sweep cell\nscheme = het\nd=4\nn = 3\nseed = 0x10\nworkload = matmul64\n").unwrap();
        assert_eq!(c.scheme, Scheme::SharedMfu);
        assert_eq!(c.seed, 16);
        let cp = c.coproc().unwrap();
        assert_eq!((cp.lanes, cp.spmis, cp.mfus, cp.spms), (4, 3, 1, 3));
    }

    #[test]
    fn rejects_inconsistent_shape() {
        let c = RunConfig::parse("scheme = shared\nf = 3\n").unwrap();
        assert!(c.coproc().is_err());
        assert!(RunConfig::parse("bogus = 1").is_err());
        assert!(RunConfig::parse("d 4").is_err());
        assert!(RunConfig::parse("workload = conv3x").is_err());
    }

    #[test]
    fn weights_file() {
        let w = parse_weights("mem_word = 3.5\nbase_cycle=0").unwrap();
        assert_eq!(w.mem_word, 3.5);
        assert_eq!(w.base_cycle, 0.0);
        assert!(parse_weights("mem_word = -1").is_err());
    }
}
