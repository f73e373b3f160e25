use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use qfnet::metrics::{build_distance_matrix, to_canonical_distance};
use qfnet::netgraph::{mst, top_percent_network, ExportFormat};
use qfnet::stats::{mantel, DEFAULT_PERMUTATIONS};
use qfnet::transpile::{
    equivalence_up_to_phase, insert_ddd_xyxy, lower_named, DEFAULT_MIN_WINDOW,
    MAX_EQUIVALENCE_QUBITS,
};
use qfnet::{Circuit, DistanceMatrix};

use crate::builtin::{builtin_circuit, Builtin};
use crate::config::{ConfigMap, Input};
use crate::error::{PipelineError, Result, Stage, StageExt};
use crate::heatmap::render_heatmap_svg;
use crate::ingest::{ingest_csv, write_curves};
use crate::pipeline::run_pipeline;
use crate::synth::{generate_synthetic, SyntheticSpec};

#[derive(Parser, Debug)]
#[command(
    name = "qfnet",
    version,
    about = "Functional networks from quantum and classical fidelity metrics"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a synthetic tuning-curve CSV.
    Gen(GenArgs),
    /// Distance matrices for one or more metrics.
    Metrics(MetricsArgs),
    /// Mantel test between two matrix JSON files.
    Mantel(MantelArgs),
    /// MST or top-percent network from a matrix JSON file.
    Network(NetworkArgs),
    /// SVG heatmap of a matrix JSON file.
    Heatmap(HeatmapArgs),
    /// Lower a circuit to native gates, optionally with XYXY decoupling.
    Transpile(TranspileArgs),
    /// The whole pipeline.
    Run(RunArgs),
}

#[derive(Args, Debug, Default)]
pub struct SynthArgs {
    #[arg(long)]
    pub neurons: Option<usize>,
    #[arg(long)]
    pub stimuli: Option<usize>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[arg(long)]
    pub noise: Option<f64>,
    /// Synthetic-data seed (defaults to one derived from --seed).
    #[arg(long)]
    pub synthetic_seed: Option<u64>,
}

impl SynthArgs {
    fn apply(&self, map: &mut ConfigMap) {
        let pairs = [
            ("synthetic.neurons", self.neurons.map(|v| v.to_string())),
            ("synthetic.stimuli", self.stimuli.map(|v| v.to_string())),
            ("synthetic.sigma", self.sigma.map(|v| v.to_string())),
            ("synthetic.amplitude", self.amplitude.map(|v| v.to_string())),
            ("synthetic.noise", self.noise.map(|v| v.to_string())),
            ("synthetic.seed", self.synthetic_seed.map(|v| v.to_string())),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                map.set(k, &v);
            }
        }
    }
}

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(flatten)]
    pub synth: SynthArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output CSV (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MetricsArgs {
    /// Curve CSV; synthetic data when omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub synth: SynthArgs,
    /// Comma-separated metric names (default: all six).
    #[arg(long)]
    pub metrics: Option<String>,
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Directory for `<metric>.csv`, `<metric>.json` and `<metric>.canonical.csv`.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct MantelArgs {
    pub a: PathBuf,
    pub b: PathBuf,
    #[arg(long, default_value_t = DEFAULT_PERMUTATIONS)]
    pub permutations: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum NetworkChoice {
    Mst,
    Top,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FormatChoice {
    Graphml,
    Json,
}

#[derive(Args, Debug)]
pub struct NetworkArgs {
    pub matrix: PathBuf,
    #[arg(long, value_enum, default_value_t = NetworkChoice::Mst)]
    pub kind: NetworkChoice,
    /// Percentage of strongest edges for `--kind top`.
    #[arg(long, default_value_t = 10.0)]
    pub percent: f64,
    /// Curve CSV supplying node positions.
    #[arg(long)]
    pub curves: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatChoice::Graphml)]
    pub format: FormatChoice,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct HeatmapArgs {
    pub matrix: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct TranspileArgs {
    /// Circuit text file (`# wires N` header, one gate per line).
    #[arg(conflicts_with = "builtin", required_unless_present = "builtin")]
    pub input: Option<PathBuf>,
    /// One of ang, amp, amp_qft.
    #[arg(long)]
    pub builtin: Option<String>,
    #[arg(long)]
    pub ddd: bool,
    #[arg(long, default_value_t = DEFAULT_MIN_WINDOW)]
    pub min_window: usize,
    /// Write the lowered circuit here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct RunArgs {
    /// Key-value config file; flags below override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub synth: SynthArgs,
    #[arg(long)]
    pub metrics: Option<String>,
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub permutations: Option<usize>,
    /// Comma-separated top-percent networks, e.g. `5,10`.
    #[arg(long)]
    pub percents: Option<String>,
    #[arg(long)]
    pub no_mst: bool,
    #[arg(long)]
    pub no_heatmaps: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub skip_degenerate: bool,
    /// Extra `key=value` config entries.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

impl RunArgs {
    pub fn to_config_map(&self) -> Result<ConfigMap> {
        let mut map = match &self.config {
            Some(path) => ConfigMap::load(path)?,
            None => ConfigMap::default(),
        };
        self.synth.apply(&mut map);
        let opt = |v: &Option<String>| v.clone();
        let entries = [
            (
                "input",
                self.input.as_ref().map(|p| p.display().to_string()),
            ),
            ("metrics", opt(&self.metrics)),
            ("mode", opt(&self.mode)),
            ("shots", self.shots.map(|v| v.to_string())),
            ("seed", self.seed.map(|v| v.to_string())),
            ("permutations", self.permutations.map(|v| v.to_string())),
            ("percents", opt(&self.percents)),
            ("output", self.out.as_ref().map(|p| p.display().to_string())),
            ("threads", self.threads.map(|v| v.to_string())),
        ];
        for (k, v) in entries {
            if let Some(v) = v {
                map.set(k, &v);
            }
        }
        if self.no_mst {
            map.set("mst", "false");
        }
        if self.no_heatmaps {
            map.set("heatmaps", "false");
        }
        if self.skip_degenerate {
            map.set("skip_degenerate", "true");
        }
        for pair in &self.set {
            map.set_pair(pair)?;
        }
        Ok(map)
    }
}

fn write_or_print(out: Option<&Path>, bytes: &[u8], stage: Stage) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|e| PipelineError::io(stage, path, e)),
        None => std::io::stdout()
            .write_all(bytes)
            .map_err(|e| PipelineError::data(stage, e.to_string())),
    }
}

fn read_matrix(path: &Path, stage: Stage) -> Result<DistanceMatrix> {
    let text = std::fs::read_to_string(path).map_err(|e| PipelineError::io(stage, path, e))?;
    DistanceMatrix::from_json(&text)
        .map_err(|e| PipelineError::data(stage, format!("{}: {e}", path.display())))
}

fn json_line(v: &serde_json::Value) -> Vec<u8> {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s.into_bytes()
}

fn with_pool<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        Some(0) => Err(PipelineError::usage(
            Stage::Config,
            "threads must be at least 1",
        )),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| PipelineError::internal(Stage::Config, e.to_string())),
        None => Ok(f()),
    }
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(args) => {
            let mut map = ConfigMap::default();
            map.set("seed", &args.seed.to_string());
            args.synth.apply(&mut map);
            let spec: SyntheticSpec = match map.to_run_config()?.input {
                Input::Synthetic(spec) => spec,
                Input::Csv(_) => unreachable!("no input key set"),
            };
            let csv = write_curves(&generate_synthetic(&spec));
            write_or_print(args.out.as_deref(), csv.as_bytes(), Stage::Generate)
        }
        Command::Metrics(args) => {
            let mut map = ConfigMap::default();
            args.synth.apply(&mut map);
            for (k, v) in [
                ("metrics", args.metrics.clone()),
                ("mode", args.mode.clone()),
                ("shots", args.shots.map(|v| v.to_string())),
                ("seed", args.seed.map(|v| v.to_string())),
            ] {
                if let Some(v) = v {
                    map.set(k, &v);
                }
            }
            if let Some(p) = &args.input {
                map.set("input", &p.display().to_string());
            }
            let config = map.to_run_config()?;
            let curves = match &config.input {
                Input::Csv(path) => ingest_csv(path)?,
                Input::Synthetic(spec) => generate_synthetic(spec),
            };
            std::fs::create_dir_all(&args.out)
                .map_err(|e| PipelineError::io(Stage::Output, &args.out, e))?;
            let matrices = with_pool(args.threads, || {
                config
                    .metrics
                    .iter()
                    .map(|spec| build_distance_matrix(&curves, spec))
                    .collect::<qfnet::Result<Vec<_>>>()
            })?
            .stage(Stage::Metrics)?;
            for m in &matrices {
                let name = m.metric.name.as_str();
                let write = |file: String, body: String| {
                    let path = args.out.join(file);
                    std::fs::write(&path, body)
                        .map_err(|e| PipelineError::io(Stage::Output, &path, e))
                };
                write(format!("{name}.csv"), m.to_csv())?;
                write(format!("{name}.json"), m.to_json())?;
                write(
                    format!("{name}.canonical.csv"),
                    to_canonical_distance(m).to_csv(),
                )?;
            }
            Ok(())
        }
        Command::Mantel(args) => {
            let a = read_matrix(&args.a, Stage::Mantel)?;
            let b = read_matrix(&args.b, Stage::Mantel)?;
            let r = mantel(&a, &b, args.permutations, args.seed).stage(Stage::Mantel)?;
            let body = json!({
                "metric_a": a.metric.name.as_str(),
                "metric_b": b.metric.name.as_str(),
                "r": r.statistic_r,
                "p": r.p_value,
                "permutations": r.permutations,
                "seed": r.seed,
                "tail": r.tail,
            });
            write_or_print(args.out.as_deref(), &json_line(&body), Stage::Mantel)
        }
        Command::Network(args) => {
            let m = read_matrix(&args.matrix, Stage::Network)?;
            let positions = match &args.curves {
                Some(path) => {
                    let curves = ingest_csv(path)?;
                    if curves.len() != m.size {
                        return Err(PipelineError::data(
                            Stage::Network,
                            format!("{} curves for a {}-node matrix", curves.len(), m.size),
                        ));
                    }
                    Some(curves.iter().map(|c| c.position).collect::<Vec<_>>())
                }
                None => None,
            };
            let net = match args.kind {
                NetworkChoice::Mst => mst(&m, positions.as_deref()),
                NetworkChoice::Top => top_percent_network(&m, args.percent, positions.as_deref()),
            }
            .map_err(|e| match e {
                qfnet::Error::PercentOutOfRange(_) => {
                    PipelineError::usage(Stage::Network, e.to_string())
                }
                e => PipelineError::data(Stage::Network, e.to_string()),
            })?;
            let format = match args.format {
                FormatChoice::Graphml => ExportFormat::GraphMl,
                FormatChoice::Json => ExportFormat::Json,
            };
            write_or_print(args.out.as_deref(), &net.export(format), Stage::Network)
        }
        Command::Heatmap(args) => {
            let m = read_matrix(&args.matrix, Stage::Heatmap)?;
            std::fs::write(&args.out, render_heatmap_svg(&m))
                .map_err(|e| PipelineError::io(Stage::Heatmap, &args.out, e))
        }
        Command::Transpile(args) => {
            let (circuit, name) = match (&args.input, &args.builtin) {
                (_, Some(b)) => {
                    let which: Builtin = b
                        .parse()
                        .map_err(|e: String| PipelineError::usage(Stage::Transpile, e))?;
                    (builtin_circuit(which).stage(Stage::Transpile)?, b.clone())
                }
                (Some(path), None) => {
                    let text = std::fs::read_to_string(path)
                        .map_err(|e| PipelineError::io(Stage::Transpile, path, e))?;
                    let c = Circuit::from_text(&text).map_err(|e| {
                        PipelineError::data(Stage::Transpile, format!("{}: {e}", path.display()))
                    })?;
                    (c, path.display().to_string())
                }
                (None, None) => unreachable!("clap requires an input"),
            };
            let mut lowered = lower_named(&circuit, &name).stage(Stage::Transpile)?;
            if args.ddd {
                lowered = insert_ddd_xyxy(&lowered, args.min_window);
            }
            let equivalent = if circuit.num_wires <= MAX_EQUIVALENCE_QUBITS {
                Some(
                    equivalence_up_to_phase(&circuit, &lowered.circuit, circuit.num_wires)
                        .stage(Stage::Transpile)?,
                )
            } else {
                None
            };
            let source = circuit.census();
            let body = json!({
                "provenance": lowered.provenance,
                "wires": circuit.num_wires,
                "source": {
                    "total_gates": source.total_gates,
                    "two_qubit_gates": source.two_qubit_gates,
                    "depth": source.depth,
                    "per_kind": source.reported(),
                },
                "lowered": {
                    "total_gates": lowered.census.total_gates,
                    "two_qubit_gates": lowered.census.two_qubit_gates,
                    "depth": lowered.census.depth,
                    "per_kind": lowered.census.reported(),
                    "measurements": lowered.circuit.measured_wires.len(),
                },
                "ddd_windows": lowered.ddd_windows,
                "equivalent_up_to_phase": equivalent,
            });
            if let Some(path) = &args.out {
                std::fs::write(path, lowered.circuit.to_text())
                    .map_err(|e| PipelineError::io(Stage::Transpile, path, e))?;
            }
            if equivalent == Some(false) {
                return Err(PipelineError::internal(
                    Stage::Transpile,
                    "lowered circuit is not equivalent",
                ));
            }
            write_or_print(None, &json_line(&body), Stage::Transpile)
        }
        Command::Run(args) => {
            let config = args.to_config_map()?.to_run_config()?;
            let report = run_pipeline(&config)?;
            let summary = json!({
                "output": report.output_dir.display().to_string(),
                "neurons": report.curves.len(),
                "skipped": report.skipped.len(),
                "metrics": report.matrices.iter().map(|m| m.metric.name.as_str()).collect::<Vec<_>>(),
                "mantel": report.mantel.iter().filter(|e| e.metric_a != e.metric_b).map(|e| json!({
                    "pair": format!("{}/{}", e.metric_a, e.metric_b),
                    "r": e.r,
                    "p": e.p,
                })).collect::<Vec<_>>(),
            });
            write_or_print(None, &json_line(&summary), Stage::Output)
        }
    }
}

/// Parse `args` and run; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("qfnet: {e}");
            e.exit_code()
        }
    }
}
