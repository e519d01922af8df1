use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qmetric::circuit_metrics::{ParamRange, QceNormalization};
use qmetric::sim::NoiseModel;

mod commands;
mod demo;
mod output;

/// Interpretable diagnostics for hybrid quantum-classical models.
#[derive(Debug, Parser)]
#[command(name = "qmetric", version, about, propagate_version = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Args)]
struct Common {
    /// Seed for every random draw
    #[arg(long, global = true, env = "QMETRIC_SEED", default_value_t = 42)]
    seed: u64,
    /// Report format; `both` writes JSON followed by markdown
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Write the report here (atomically) instead of stdout. With
    /// `--format both` the markdown goes next to it with an `.md` extension
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    /// Run every metric on a single thread
    #[arg(long, global = true)]
    serial: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Markdown,
    Both,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Structural, expressibility, noise and entanglement metrics of a circuit
    Circuit(CircuitArgs),
    /// Compression, dimensionality, activation and sensitivity metrics of a feature space
    Features(FeatureArgs),
    /// Stability, efficiency and gradient metrics from training logs
    Training(TrainingArgs),
    /// Self-contained run over the built-in case study, synthetic data and sample logs
    Demo(DemoArgs),
    /// Merge report JSON files and render them again
    Report(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Builtin {
    CaseStudy,
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["circuit", "builtin"])))]
struct CircuitArgs {
    /// Circuit JSON file
    #[arg(long)]
    circuit: Option<PathBuf>,
    /// Built-in circuit
    #[arg(long, value_enum)]
    builtin: Option<Builtin>,
    #[command(flatten)]
    circuit_opts: CircuitOpts,
}

#[derive(Debug, Args)]
struct CircuitOpts {
    /// Random parameter draws for expressibility
    #[arg(long, default_value_t = 50)]
    samples: usize,
    /// Sampling range `lo:hi`; repeat once per parameter slot, or give one for all
    #[arg(long = "range")]
    ranges: Vec<ParamRange>,
    /// `none` or `depolarizing:p1=<f>,p2=<f>[,gamma=<f>]`
    #[arg(long, default_value = "none")]
    noise: NoiseModel,
    /// Qubits of the first subsystem, comma separated
    #[arg(long, value_delimiter = ',', default_value = "0")]
    subsystem: Vec<usize>,
    /// Qubits of the second subsystem (default: the complement)
    #[arg(long, value_delimiter = ',')]
    subsystem_b: Option<Vec<usize>>,
    /// How pairwise overlaps are normalized in expressibility
    #[arg(long, default_value = "half-pair-mean")]
    qce_normalization: QceNormalization,
    /// Parameter values for the entanglement metrics, comma separated
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    bind: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
enum EvaluatorSpec {
    Identity,
    Linear(f64),
    Constant,
    BuiltinQnn,
}

impl std::str::FromStr for EvaluatorSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "identity" => Ok(EvaluatorSpec::Identity),
            "constant" => Ok(EvaluatorSpec::Constant),
            "builtin-qnn" => Ok(EvaluatorSpec::BuiltinQnn),
            _ => match s.strip_prefix("linear:") {
                Some(c) => c
                    .parse::<f64>()
                    .ok()
                    .filter(|c| c.is_finite())
                    .map(EvaluatorSpec::Linear)
                    .ok_or_else(|| format!("bad scale in '{s}'")),
                None => Err(format!(
                    "unknown evaluator '{s}' (identity, linear:<c>, constant, builtin-qnn)"
                )),
            },
        }
    }
}

impl std::fmt::Display for EvaluatorSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EvaluatorSpec::Identity => f.write_str("identity"),
            EvaluatorSpec::Linear(c) => write!(f, "linear:{c}"),
            EvaluatorSpec::Constant => f.write_str("constant"),
            EvaluatorSpec::BuiltinQnn => f.write_str("builtin-qnn"),
        }
    }
}

#[derive(Debug, Args)]
#[command(group(clap::ArgGroup::new("source").required(true).args(["matrix", "feature_map"])))]
struct FeatureArgs {
    /// Feature matrix CSV (`f0,f1,...` header)
    #[arg(long)]
    matrix: Option<PathBuf>,
    /// Rows of the matrix are probability distributions
    #[arg(long)]
    probability: bool,
    /// Circuit JSON whose parameters take the input columns, or `zz` for the
    /// built-in ZZ map; features are its measurement probabilities
    #[arg(long, requires = "inputs")]
    feature_map: Option<String>,
    /// Input CSV for `--feature-map` and `--evaluator`
    #[arg(long)]
    inputs: Option<PathBuf>,
    /// Input dimension for the compression ratio
    #[arg(long)]
    d_in: Option<usize>,
    /// Cumulative explained-variance threshold
    #[arg(long, default_value_t = qmetric::features::DEFAULT_VARIANCE_THRESHOLD)]
    threshold: f64,
    /// Model for output sensitivity: identity, linear:<c>, constant, builtin-qnn
    #[arg(long)]
    evaluator: Option<EvaluatorSpec>,
    /// Pauli strings measured by builtin-qnn, comma separated (default all Z)
    #[arg(long, value_delimiter = ',')]
    observable: Option<Vec<String>>,
    /// Perturbation standard deviation
    #[arg(long, default_value_t = 0.01)]
    qos_sigma: f64,
    /// Perturbations per input
    #[arg(long, default_value_t = 10)]
    qos_k: usize,
}

#[derive(Debug, Args)]
struct TrainingArgs {
    /// Training log CSV of the model under study (the hybrid side of relative metrics)
    #[arg(long)]
    log: PathBuf,
    /// Trainable parameters behind `--log`; falls back to `<log>.meta.json`
    #[arg(long)]
    num_params: Option<usize>,
    /// Gradient JSON-lines log for `--log`
    #[arg(long)]
    grads: Option<PathBuf>,
    /// Baseline log (the classical side): relative metrics are `--log` over `--compare`
    #[arg(long, requires = "compare_num_params")]
    compare: Option<PathBuf>,
    /// Trainable parameters behind `--compare`
    #[arg(long)]
    compare_num_params: Option<usize>,
    /// Fraction of final epochs used for stability
    #[arg(long, default_value_t = qmetric::training::DEFAULT_TAIL_FRACTION)]
    tail: f64,
    /// Validation accuracy that counts as converged
    #[arg(long, default_value_t = qmetric::training::DEFAULT_ACCURACY_THRESHOLD)]
    acc_threshold: f64,
}

#[derive(Debug, Args)]
struct DemoArgs {
    #[command(flatten)]
    circuit_opts: CircuitOpts,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Report JSON files; blocks from later files replace earlier ones
    #[arg(required = true)]
    reports: Vec<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
