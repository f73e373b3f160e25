//! Run configuration from a `key = value` file, with command-line overrides
//! applied on top of the file's entries.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use qfnet::metrics::{MetricName, MetricSpec, Mode, DEFAULT_SHOTS};
use qfnet::rng::{derive_seed, hash_bytes};
use qfnet::stats::DEFAULT_PERMUTATIONS;

use crate::error::{PipelineError, Result, Stage};
use crate::synth::SyntheticSpec;

pub const DEFAULT_OUTPUT: &str = "qfnet-out";

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Input {
    Csv(PathBuf),
    Synthetic(SyntheticSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub input: Input,
    pub metrics: Vec<MetricSpec>,
    pub permutations: usize,
    pub mst: bool,
    pub percents: Vec<f64>,
    pub heatmaps: bool,
    pub output_dir: PathBuf,
    pub seed: u64,
    #[serde(skip)]
    pub threads: Option<usize>,
    pub skip_degenerate: bool,
}

/// Raw entries in file order of precedence: later `set` calls win.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigMap {
    entries: BTreeMap<String, String>,
}

fn usage(msg: impl Into<String>) -> PipelineError {
    PipelineError::usage(Stage::Config, msg)
}

impl ConfigMap {
    pub fn parse(text: &str) -> Result<ConfigMap> {
        let mut map = ConfigMap::default();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("line {}: expected key = value", idx + 1)))?;
            let key = k.trim();
            if key.is_empty() {
                return Err(usage(format!("line {}: empty key", idx + 1)));
            }
            map.set(key, v.trim());
        }
        Ok(map)
    }

    pub fn load(path: &Path) -> Result<ConfigMap> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::usage(Stage::Config, format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn set(&mut self, key: &str, value: &str) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    /// `key=value` from the command line.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| usage(format!("expected key=value, got {pair:?}")))?;
        self.set(k.trim(), v.trim());
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| usage(format!("{key}: invalid value {v:?}: {e}")))
            })
            .transpose()
    }

    fn flag(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some("true" | "yes" | "1") => Ok(true),
            Some("false" | "no" | "0") => Ok(false),
            Some(v) => Err(usage(format!("{key}: expected true or false, got {v:?}"))),
        }
    }

    fn list(&self, key: &str) -> Option<Vec<&str>> {
        self.get(key).map(|v| {
            v.split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .collect()
        })
    }

    pub fn to_run_config(&self) -> Result<RunConfig> {
        const FIXED: [&str; 22] = [
            "input",
            "output",
            "seed",
            "metrics",
            "mode",
            "shots",
            "permutations",
            "mst",
            "percents",
            "heatmaps",
            "threads",
            "skip_degenerate",
            "synthetic.neurons",
            "synthetic.stimuli",
            "synthetic.sigma",
            "synthetic.amplitude",
            "synthetic.noise",
            "synthetic.box",
            "synthetic.seed",
            "mantel.permutations",
            "network.mst",
            "network.percents",
        ];
        for key in self.entries.keys() {
            let per_metric = key.strip_prefix("metric.").and_then(|rest| {
                let (name, field) = rest.rsplit_once('.')?;
                let ok = name.parse::<MetricName>().is_ok()
                    && matches!(field, "mode" | "shots" | "seed");
                ok.then_some(())
            });
            if !FIXED.contains(&key.as_str()) && per_metric.is_none() {
                return Err(usage(format!("unknown config key {key:?}")));
            }
        }

        let seed: u64 = self.parsed("seed")?.unwrap_or(0);
        let input = match self.get("input") {
            Some(path) => Input::Csv(PathBuf::from(path)),
            None => {
                let d = SyntheticSpec::default();
                let box_extent = match self.list("synthetic.box") {
                    None => d.box_extent,
                    Some(v) => {
                        let nums: Vec<f64> = v
                            .iter()
                            .map(|s| s.parse::<f64>())
                            .collect::<std::result::Result<_, _>>()
                            .map_err(|e| usage(format!("synthetic.box: {e}")))?;
                        <[f64; 3]>::try_from(nums)
                            .map_err(|_| usage("synthetic.box: expected three extents"))?
                    }
                };
                let spec = SyntheticSpec {
                    neurons: self.parsed("synthetic.neurons")?.unwrap_or(d.neurons),
                    stimuli: self.parsed("synthetic.stimuli")?.unwrap_or(d.stimuli),
                    sigma: self.parsed("synthetic.sigma")?.unwrap_or(d.sigma),
                    amplitude: self.parsed("synthetic.amplitude")?.unwrap_or(d.amplitude),
                    noise: self.parsed("synthetic.noise")?.unwrap_or(d.noise),
                    box_extent,
                    seed: self
                        .parsed("synthetic.seed")?
                        .unwrap_or_else(|| derive_seed(seed, &[hash_bytes(b"synthetic")])),
                };
                spec.validate().map_err(usage)?;
                Input::Synthetic(spec)
            }
        };

        let names: Vec<MetricName> = match self.list("metrics") {
            None => MetricName::ALL.to_vec(),
            Some(v) => v
                .iter()
                .map(|s| {
                    s.parse::<MetricName>()
                        .map_err(|e| usage(format!("metrics: {e}")))
                })
                .collect::<Result<_>>()?,
        };
        if names.is_empty() {
            return Err(usage("metrics: at least one metric is required"));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(usage(format!("metrics: {} listed twice", n.as_str())));
            }
        }
        let mode: Mode = self.parsed("mode")?.unwrap_or(Mode::Analytic);
        let shots: u64 = self.parsed("shots")?.unwrap_or(DEFAULT_SHOTS);
        let mut metrics = Vec::with_capacity(names.len());
        for name in names {
            let prefix = format!("metric.{}", name.as_str());
            let m_mode: Mode = self.parsed(&format!("{prefix}.mode"))?.unwrap_or(mode);
            let m_shots: u64 = self.parsed(&format!("{prefix}.shots"))?.unwrap_or(shots);
            let m_seed: u64 = self
                .parsed(&format!("{prefix}.seed"))?
                .unwrap_or_else(|| derive_seed(seed, &[hash_bytes(name.as_str().as_bytes())]));
            if m_shots == 0 {
                return Err(usage(format!("{prefix}.shots: must be at least 1")));
            }
            if m_mode == Mode::Shots && !name.is_quantum() {
                return Err(usage(format!(
                    "{}: shot mode applies only to quantum metrics",
                    name.as_str()
                )));
            }
            let mut spec = MetricSpec::with_shots(name, m_shots, m_seed);
            spec.mode = m_mode;
            metrics.push(spec);
        }

        let permutations = match self.parsed("permutations")? {
            Some(p) => p,
            None => self
                .parsed("mantel.permutations")?
                .unwrap_or(DEFAULT_PERMUTATIONS),
        };
        let mst = match self.get("mst") {
            Some(_) => self.flag("mst", true)?,
            None => self.flag("network.mst", true)?,
        };
        let percents: Vec<f64> = match self
            .list("percents")
            .or_else(|| self.list("network.percents"))
        {
            None => vec![5.0, 10.0],
            Some(v) => v
                .iter()
                .map(|s| {
                    s.parse::<f64>()
                        .map_err(|e| usage(format!("percents: {e}")))
                })
                .collect::<Result<_>>()?,
        };
        if let Some(p) = percents.iter().find(|p| !(**p > 0.0 && **p <= 100.0)) {
            return Err(usage(format!("percents: {p} outside (0, 100]")));
        }
        let threads: Option<usize> = self.parsed("threads")?;
        if threads == Some(0) {
            return Err(usage("threads: must be at least 1"));
        }

        Ok(RunConfig {
            input,
            metrics,
            permutations,
            mst,
            percents,
            heatmaps: self.flag("heatmaps", true)?,
            output_dir: PathBuf::from(self.get("output").unwrap_or(DEFAULT_OUTPUT)),
            seed,
            threads,
            skip_degenerate: self.flag("skip_degenerate", false)?,
        })
    }
}
