//! End-to-end run: curves → matrices → Mantel table → networks → heatmaps,
//! written atomically into one output directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use qfnet::circuit::{ComputeUncomputeOptions, QftMode};
use qfnet::curve::{amplitude_prepare, rescale_l1_pi};
use qfnet::metrics::{build_distance_matrix, to_canonical_distance, MetricName, Mode};
use qfnet::netgraph::{
    mst, top_percent_edge_count, top_percent_network, ExportFormat, FunctionalNetwork,
};
use qfnet::rng::{derive_seed, hash_bytes};
use qfnet::stats::mantel;
use qfnet::{DistanceMatrix, TuningCurve};

use crate::config::{Input, RunConfig};
use crate::error::{PipelineError, Result, Stage, StageExt};
use crate::heatmap::render_heatmap_svg;
use crate::ingest::{ingest_csv, write_curves};
use crate::synth::generate_synthetic;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SkippedNeuron {
    pub neuron_id: String,
    pub metric: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MantelEntry {
    pub metric_a: String,
    pub metric_b: String,
    pub r: Option<f64>,
    pub p: Option<f64>,
    pub permutations: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub undefined: Option<String>,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub output_dir: PathBuf,
    pub curves: Vec<TuningCurve>,
    pub skipped: Vec<SkippedNeuron>,
    pub matrices: Vec<DistanceMatrix>,
    pub mantel: Vec<MantelEntry>,
    pub networks: Vec<FunctionalNetwork>,
    pub files: Vec<String>,
}

impl RunReport {
    pub fn matrix(&self, name: MetricName) -> Option<&DistanceMatrix> {
        self.matrices.iter().find(|m| m.metric.name == name)
    }

    pub fn mantel_between(&self, a: MetricName, b: MetricName) -> Option<&MantelEntry> {
        self.mantel.iter().find(|e| {
            (e.metric_a == a.as_str() && e.metric_b == b.as_str())
                || (e.metric_a == b.as_str() && e.metric_b == a.as_str())
        })
    }
}

/// Why `curve` cannot enter `metric`, if it cannot.
pub fn degenerate_reason(curve: &TuningCurve, metric: MetricName) -> Option<String> {
    let r = &curve.responses;
    match metric {
        MetricName::Correlation => r
            .iter()
            .all(|v| *v == r[0])
            .then(|| "constant responses leave Pearson correlation undefined".to_string()),
        MetricName::Euclidean => (curve.l1_norm() == 0.0).then(|| "zero L1 norm".to_string()),
        MetricName::ClassicalFidelity => r
            .iter()
            .all(|v| *v <= 0.0)
            .then(|| "no positive response".to_string()),
        MetricName::Ang => rescale_l1_pi(curve).err().map(|e| e.to_string()),
        MetricName::Amp | MetricName::AmpQft => {
            amplitude_prepare(curve).err().map(|e| e.to_string())
        }
    }
}

fn load_curves(config: &RunConfig) -> Result<Vec<TuningCurve>> {
    let curves = match &config.input {
        Input::Csv(path) => ingest_csv(path)?,
        Input::Synthetic(spec) => {
            spec.validate()
                .map_err(|m| PipelineError::usage(Stage::Generate, m))?;
            generate_synthetic(spec)
        }
    };
    let stage = match config.input {
        Input::Csv(_) => Stage::Ingest,
        Input::Synthetic(_) => Stage::Generate,
    };
    for c in &curves {
        c.validate().stage(stage)?;
    }
    Ok(curves)
}

fn screen(
    config: &RunConfig,
    curves: Vec<TuningCurve>,
) -> Result<(Vec<TuningCurve>, Vec<SkippedNeuron>)> {
    let mut kept = Vec::with_capacity(curves.len());
    let mut skipped = Vec::new();
    for c in curves {
        let problem = config
            .metrics
            .iter()
            .find_map(|m| degenerate_reason(&c, m.name).map(|r| (m.name, r)));
        match problem {
            None => kept.push(c),
            Some((metric, reason)) if config.skip_degenerate => skipped.push(SkippedNeuron {
                neuron_id: c.neuron_id.clone(),
                metric: metric.as_str().to_string(),
                reason,
            }),
            Some((metric, reason)) => return Err(PipelineError::data(
                Stage::Metrics,
                format!(
                    "neuron {} is degenerate for {}: {reason} (use --skip-degenerate to drop it)",
                    c.neuron_id,
                    metric.as_str()
                ),
            )),
        }
    }
    if kept.len() < 2 {
        return Err(PipelineError::data(
            Stage::Metrics,
            format!("{} usable neurons; at least 2 are required", kept.len()),
        ));
    }
    Ok((kept, skipped))
}

fn mantel_seed(base: u64, a: MetricName, b: MetricName) -> u64 {
    // Keyed on the unordered metric pair so the table is symmetric.
    let (x, y) = if a <= b { (a, b) } else { (b, a) };
    derive_seed(
        base,
        &[
            hash_bytes(b"mantel"),
            hash_bytes(x.as_str().as_bytes()),
            hash_bytes(y.as_str().as_bytes()),
        ],
    )
}

fn mantel_table(config: &RunConfig, matrices: &[DistanceMatrix]) -> Result<Vec<MantelEntry>> {
    let mut out = Vec::new();
    for (i, a) in matrices.iter().enumerate() {
        for b in &matrices[i..] {
            let seed = mantel_seed(config.seed, a.metric.name, b.metric.name);
            let mut entry = MantelEntry {
                metric_a: a.metric.name.as_str().to_string(),
                metric_b: b.metric.name.as_str().to_string(),
                r: None,
                p: None,
                permutations: config.permutations,
                seed,
                undefined: None,
            };
            match mantel(a, b, config.permutations, seed) {
                Ok(res) => {
                    entry.r = Some(res.statistic_r);
                    entry.p = Some(res.p_value);
                }
                // A constant condensed matrix has no ranks to correlate; that
                // is a property of the data, reported rather than fatal.
                Err(qfnet::Error::NonFiniteMetric(msg)) => entry.undefined = Some(msg),
                Err(e) => return Err(e).stage(Stage::Mantel),
            }
            out.push(entry);
        }
    }
    Ok(out)
}

fn mantel_json(config: &RunConfig, matrices: &[DistanceMatrix], entries: &[MantelEntry]) -> Value {
    let names: Vec<&str> = matrices.iter().map(|m| m.metric.name.as_str()).collect();
    let k = names.len();
    let mut r = vec![vec![Value::Null; k]; k];
    let mut p = vec![vec![Value::Null; k]; k];
    let idx = |n: &str| names.iter().position(|x| *x == n).expect("known metric");
    for e in entries {
        let (i, j) = (idx(&e.metric_a), idx(&e.metric_b));
        for (a, b) in [(i, j), (j, i)] {
            r[a][b] = json!(e.r);
            p[a][b] = json!(e.p);
        }
    }
    json!({
        "metrics": names,
        "statistic": "spearman",
        "tail": "two_sided",
        "permutations": config.permutations,
        "r": r,
        "p": p,
        "pairs": entries,
    })
}

fn metric_manifest(m: &DistanceMatrix) -> Value {
    let spec = &m.metric;
    let mut v = json!({
        "name": spec.name.as_str(),
        "orientation": spec.orientation,
        "mode": spec.mode,
        "pairs": m.size * (m.size - 1) / 2,
        "evaluations": m.evaluations,
    });
    let obj = v.as_object_mut().expect("object");
    if spec.name.is_quantum() {
        obj.insert("seed".into(), json!(spec.seed));
        if spec.mode == Mode::Shots {
            obj.insert("shots".into(), json!(spec.shots));
        }
    }
    match spec.name {
        MetricName::Ang => {
            obj.insert(
                "embedding".into(),
                json!("RX angles, curve rescaled to L1 norm pi"),
            );
            obj.insert(
                "circuit".into(),
                json!("destructive swap test, Bell-basis parity"),
            );
        }
        MetricName::Amp | MetricName::AmpQft => {
            let opts = ComputeUncomputeOptions::with_qft(spec.name == MetricName::AmpQft);
            obj.insert(
                "embedding".into(),
                json!("real amplitudes, makima-resampled over stimulus indices to the next power of two, L2-normalized"),
            );
            obj.insert(
                "circuit".into(),
                json!("compute-uncompute, all-zeros probability"),
            );
            obj.insert("repetitions".into(), json!(opts.repetitions));
            obj.insert("hadamard_layers".into(), json!(opts.hadamard_layers));
            obj.insert(
                "qft_mode".into(),
                json!(match opts.qft_mode {
                    QftMode::None => "none",
                    QftMode::OnLoad => "on_load",
                }),
            );
        }
        MetricName::Euclidean => {
            obj.insert("rescaling".into(), json!("L1"));
        }
        MetricName::ClassicalFidelity => {
            obj.insert("rescaling".into(), json!("negatives clamped to 0, then L1"));
        }
        MetricName::Correlation => {}
    }
    v
}

struct Staging {
    dir: PathBuf,
    files: Vec<String>,
    armed: bool,
}

impl Staging {
    fn new(output: &Path) -> Result<Staging> {
        let name = output.file_name().ok_or_else(|| {
            PipelineError::usage(Stage::Output, "output path has no final component")
        })?;
        let parent = output
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or(Path::new("."));
        std::fs::create_dir_all(parent).map_err(|e| PipelineError::io(Stage::Output, parent, e))?;
        let dir = parent.join(format!(".{}.staging", name.to_string_lossy()));
        if dir.exists() {
            std::fs::remove_dir_all(&dir).map_err(|e| PipelineError::io(Stage::Output, &dir, e))?;
        }
        std::fs::create_dir(&dir).map_err(|e| PipelineError::io(Stage::Output, &dir, e))?;
        Ok(Staging {
            dir,
            files: Vec::new(),
            armed: true,
        })
    }

    fn write(&mut self, rel: &str, bytes: impl AsRef<[u8]>) -> Result<()> {
        let path = self.dir.join(rel);
        if let Some(parent) = path.parent() {
            std::fs::create_dir_all(parent)
                .map_err(|e| PipelineError::io(Stage::Output, parent, e))?;
        }
        std::fs::write(&path, bytes).map_err(|e| PipelineError::io(Stage::Output, &path, e))?;
        self.files.push(rel.to_string());
        Ok(())
    }

    fn commit(mut self, output: &Path) -> Result<()> {
        if output.exists() {
            std::fs::remove_dir_all(output)
                .map_err(|e| PipelineError::io(Stage::Output, output, e))?;
        }
        std::fs::rename(&self.dir, output)
            .map_err(|e| PipelineError::io(Stage::Output, output, e))?;
        self.armed = false;
        Ok(())
    }
}

impl Drop for Staging {
    fn drop(&mut self) {
        if self.armed {
            let _ = std::fs::remove_dir_all(&self.dir);
        }
    }
}

/// Refuse to replace a directory this tool did not create.
fn check_output(output: &Path) -> Result<()> {
    if !output.exists() {
        return Ok(());
    }
    if !output.is_dir() {
        return Err(PipelineError::usage(
            Stage::Output,
            format!("{} exists and is not a directory", output.display()),
        ));
    }
    let empty = std::fs::read_dir(output)
        .map_err(|e| PipelineError::io(Stage::Output, output, e))?
        .next()
        .is_none();
    if empty || output.join("manifest.json").is_file() {
        Ok(())
    } else {
        Err(PipelineError::usage(
            Stage::Output,
            format!(
                "{} is not empty and holds no previous run; refusing to overwrite",
                output.display()
            ),
        ))
    }
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

pub fn run_pipeline(config: &RunConfig) -> Result<RunReport> {
    match config.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| PipelineError::internal(Stage::Config, e.to_string()))?
            .install(|| run_in_pool(config)),
        None => run_in_pool(config),
    }
}

fn run_in_pool(config: &RunConfig) -> Result<RunReport> {
    let started = Instant::now();
    let mut timings: BTreeMap<String, f64> = BTreeMap::new();
    let mut lap = {
        let mut last = Instant::now();
        move |name: &str, timings: &mut BTreeMap<String, f64>| {
            let now = Instant::now();
            timings.insert(name.to_string(), (now - last).as_secs_f64() * 1e3);
            last = now;
        }
    };

    check_output(&config.output_dir)?;
    let curves = load_curves(config)?;
    let (curves, skipped) = screen(config, curves)?;
    let stimuli = curves[0].responses.len();
    lap("load", &mut timings);

    let mut staging = Staging::new(&config.output_dir)?;
    staging.write("curves.csv", write_curves(&curves))?;

    let mut matrices = Vec::with_capacity(config.metrics.len());
    for spec in &config.metrics {
        let m = build_distance_matrix(&curves, spec).stage(Stage::Metrics)?;
        let name = spec.name.as_str();
        staging.write(&format!("matrices/{name}.csv"), m.to_csv())?;
        staging.write(&format!("matrices/{name}.json"), m.to_json())?;
        staging.write(
            &format!("canonical/{name}.csv"),
            to_canonical_distance(&m).to_csv(),
        )?;
        matrices.push(m);
        lap(&format!("metric.{name}"), &mut timings);
    }

    let mantel = mantel_table(config, &matrices)?;
    staging.write(
        "mantel.json",
        pretty(&mantel_json(config, &matrices, &mantel)),
    )?;
    lap("mantel", &mut timings);

    let positions: Vec<[f64; 3]> = curves.iter().map(|c| c.position).collect();
    let mut networks = Vec::new();
    for m in &matrices {
        if config.mst {
            networks.push(mst(m, Some(&positions)).stage(Stage::Network)?);
        }
        for &p in &config.percents {
            networks.push(top_percent_network(m, p, Some(&positions)).stage(Stage::Network)?);
        }
    }
    for net in &networks {
        let base = format!("networks/{}_{}", net.metric.name.as_str(), net.label());
        staging.write(
            &format!("{base}.graphml"),
            net.export(ExportFormat::GraphMl),
        )?;
        staging.write(&format!("{base}.json"), net.export(ExportFormat::Json))?;
    }
    lap("networks", &mut timings);

    if config.heatmaps {
        for m in &matrices {
            staging.write(
                &format!("heatmaps/{}.svg", m.metric.name.as_str()),
                render_heatmap_svg(m),
            )?;
        }
    }
    lap("heatmaps", &mut timings);

    let pairs = curves.len() * (curves.len() - 1) / 2;
    let input = match &config.input {
        Input::Csv(path) => json!({"kind": "csv", "path": path.display().to_string()}),
        Input::Synthetic(spec) => json!({"kind": "synthetic", "spec": spec}),
    };
    let mut files = staging.files.clone();
    files.push("manifest.json".into());
    files.push("timings.json".into());
    files.sort();
    let manifest = json!({
        "tool": "qfnet",
        "version": env!("CARGO_PKG_VERSION"),
        "seed": config.seed,
        "input": input,
        "neurons": curves.len(),
        "stimuli": stimuli,
        "skipped_neurons": skipped,
        "metrics": matrices.iter().map(metric_manifest).collect::<Vec<_>>(),
        "mantel": {
            "statistic": "spearman",
            "tail": "two_sided",
            "permutations": config.permutations,
            "null": "joint permutation of rows and columns of the second matrix",
            "p_rule": "(1 + #{|r_perm| >= |r_obs|}) / (1 + permutations)",
        },
        "networks": {
            "mst": config.mst,
            "percents": config.percents,
            "edge_counts": config.percents.iter()
                .map(|p| json!({"percent": p, "edges": top_percent_edge_count(*p, pairs)}))
                .collect::<Vec<_>>(),
            "rounding_rule": "round(percent / 100 * pairs), halves rounded up",
            "similarity_to_distance": "1 - s",
            "tie_break": "distance, then lower source index, then lower target index",
        },
        "heatmaps": config.heatmaps.then_some("linear min-max color scale over off-diagonal values"),
        "files": files,
    });
    staging.write("manifest.json", pretty(&manifest))?;
    timings.insert("total".into(), started.elapsed().as_secs_f64() * 1e3);
    staging.write(
        "timings.json",
        pretty(&json!({
            "threads": rayon::current_num_threads(),
            "milliseconds": timings,
        })),
    )?;
    staging.commit(&config.output_dir)?;

    Ok(RunReport {
        output_dir: config.output_dir.clone(),
        curves,
        skipped,
        matrices,
        mantel,
        networks,
        files,
    })
}
