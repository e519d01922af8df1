use std::path::Path;

use qmetric::circuit_metrics::{evaluate_circuit, CircuitMetricsConfig, SamplingConfig};
use qmetric::features::{
    evaluate_features, extract_quantum_features, qos, ConstantMap, Evaluator, FeatureMatrix,
    FeatureMetricsConfig, FeatureMetricsReport, LinearMap, QnnEvaluator, QosConfig, RowSemantics,
};
use qmetric::io::{
    merge_reports, parse_circuit, parse_feature_matrix, parse_gradient_log, parse_report,
    parse_training_log, MetricReport, ReportMeta, TrainingBlock,
};
use qmetric::sim::{build_zz_feature_map, case_study_circuit, Circuit, PauliString};
use qmetric::training::{evaluate_relative, evaluate_training, TrainingMetricsConfig};
use qmetric::Execution;

use crate::output::{emit, in_file, read, CliError};
use crate::{
    demo, Builtin, CircuitOpts, Cli, Command, EvaluatorSpec, FeatureArgs, OutputFormat,
    TrainingArgs,
};

struct Ctx {
    seed: u64,
    execution: Execution,
    meta: ReportMeta,
}

impl Ctx {
    fn echo(&mut self, key: &str, value: impl ToString) {
        self.meta.config.insert(key.to_string(), value.to_string());
    }

    fn warn(&mut self, warnings: Vec<String>) {
        for w in warnings {
            eprintln!("warning: {w}");
            self.meta.warnings.push(w);
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    let execution = if cli.common.serial {
        Execution::Serial
    } else {
        Execution::Parallel
    };
    let mut ctx = Ctx {
        seed: cli.common.seed,
        execution,
        meta: ReportMeta::new(cli.common.seed),
    };
    let default_format = match cli.command {
        Command::Demo(_) => OutputFormat::Both,
        _ => OutputFormat::Json,
    };
    let format = cli.common.format.unwrap_or(default_format);
    let report = match cli.command {
        Command::Circuit(args) => {
            let circuit = match (&args.circuit, args.builtin) {
                (Some(path), _) => {
                    ctx.echo("circuit", path.display());
                    parse_circuit(&read(path)?).map_err(in_file(path))?
                }
                (None, Some(Builtin::CaseStudy)) => {
                    ctx.echo("circuit", "builtin:case-study");
                    case_study_circuit()
                }
                (None, None) => return Err(usage("give --circuit or --builtin")),
            };
            let mut report = MetricReport::new(ReportMeta::new(ctx.seed));
            report.circuit = Some(circuit_block(&mut ctx, &circuit, &args.circuit_opts)?);
            report
        }
        Command::Features(args) => {
            let mut report = MetricReport::new(ReportMeta::new(ctx.seed));
            report.features = Some(features_block(&mut ctx, &args)?);
            report
        }
        Command::Training(args) => {
            let mut report = MetricReport::new(ReportMeta::new(ctx.seed));
            report.training = Some(training_block(&mut ctx, &args)?);
            report
        }
        Command::Demo(args) => demo_report(&mut ctx, &args.circuit_opts)?,
        Command::Report(args) => {
            let mut reports = Vec::with_capacity(args.reports.len());
            for path in &args.reports {
                reports.push(parse_report(&read(path)?).map_err(in_file(path))?);
            }
            let merged = merge_reports(reports)?;
            ctx.meta = merged.meta.clone();
            merged
        }
    };
    let report = MetricReport {
        meta: ctx.meta,
        ..report
    };
    emit(&report, format, cli.common.output.as_deref())
}

fn circuit_config(
    ctx: &mut Ctx,
    circuit: &Circuit,
    opts: &CircuitOpts,
) -> Result<CircuitMetricsConfig, CliError> {
    let n = circuit.num_qubits();
    let p = circuit.num_params();
    if opts.samples < 2 {
        return Err(usage("--samples must be at least 2"));
    }
    if !(opts.ranges.len() <= 1 || opts.ranges.len() == p) {
        return Err(usage(format!(
            "give one --range or one per parameter ({p}), not {}",
            opts.ranges.len()
        )));
    }
    let check = |name: &str, qs: &[usize]| -> Result<(), CliError> {
        if qs.is_empty() {
            return Err(usage(format!("{name} is empty")));
        }
        match qs.iter().find(|&&q| q >= n) {
            Some(q) => Err(usage(format!(
                "{name} qubit {q} is out of range for {n} qubits"
            ))),
            None => Ok(()),
        }
    };
    check("--subsystem", &opts.subsystem)?;
    if let Some(b) = &opts.subsystem_b {
        check("--subsystem-b", b)?;
    }
    if let Some(bind) = &opts.bind {
        if bind.len() != p {
            return Err(usage(format!(
                "--bind has {} values for {p} parameters",
                bind.len()
            )));
        }
    }

    ctx.echo("samples", opts.samples);
    let ranges: Vec<String> = opts
        .ranges
        .iter()
        .map(|r| format!("{}:{}", r.lo, r.hi))
        .collect();
    ctx.echo(
        "range",
        if ranges.is_empty() {
            "0:2pi".to_string()
        } else {
            ranges.join(" ")
        },
    );
    ctx.echo("noise", opts.noise);
    ctx.echo("subsystem", join(&opts.subsystem));
    if let Some(b) = &opts.subsystem_b {
        ctx.echo("subsystem_b", join(b));
    }
    ctx.echo("qce_normalization", opts.qce_normalization);
    ctx.echo(
        "execution",
        if ctx.execution.is_parallel() {
            "parallel"
        } else {
            "serial"
        },
    );

    Ok(CircuitMetricsConfig {
        sampling: SamplingConfig {
            num_samples: opts.samples,
            ranges: opts.ranges.clone(),
            normalization: opts.qce_normalization,
            execution: ctx.execution,
            ..SamplingConfig::with_seed(ctx.seed)
        },
        noise: opts.noise,
        subsystem_a: Some(opts.subsystem.clone()),
        subsystem_b: opts.subsystem_b.clone(),
        binding: opts.bind.clone(),
    })
}

fn join(qs: &[usize]) -> String {
    qs.iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn circuit_block(
    ctx: &mut Ctx,
    circuit: &Circuit,
    opts: &CircuitOpts,
) -> Result<qmetric::circuit_metrics::CircuitMetricsReport, CliError> {
    let cfg = circuit_config(ctx, circuit, opts)?;
    let (report, warnings) = evaluate_circuit(circuit, &cfg)?;
    ctx.warn(warnings);
    Ok(report)
}

fn qos_config(ctx: &Ctx, sigma: f64, k: usize) -> Result<QosConfig, CliError> {
    if !(sigma.is_finite() && sigma > 0.0) {
        return Err(usage("--qos-sigma must be positive"));
    }
    if k == 0 {
        return Err(usage("--qos-k must be at least 1"));
    }
    Ok(QosConfig {
        sigma,
        k,
        seed: ctx.seed,
        execution: ctx.execution,
    })
}

fn features_block(ctx: &mut Ctx, args: &FeatureArgs) -> Result<FeatureMetricsReport, CliError> {
    if !(args.threshold > 0.0 && args.threshold <= 1.0) {
        return Err(usage("--threshold must lie in (0, 1]"));
    }
    let qos_cfg = match &args.evaluator {
        Some(_) => Some(qos_config(ctx, args.qos_sigma, args.qos_k)?),
        None => None,
    };
    let observables = match &args.observable {
        Some(list) => Some(
            list.iter()
                .map(|s| s.parse::<PauliString>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| usage(format!("--observable: {e}")))?,
        ),
        None => None,
    };
    if observables.is_some() && args.evaluator != Some(EvaluatorSpec::BuiltinQnn) {
        return Err(usage(
            "--observable only applies to --evaluator builtin-qnn",
        ));
    }
    let semantics = if args.probability {
        RowSemantics::Probability
    } else {
        RowSemantics::Generic
    };

    let inputs = match &args.inputs {
        Some(path) => {
            ctx.echo("inputs", path.display());
            Some(parse_feature_matrix(&read(path)?, RowSemantics::Generic).map_err(in_file(path))?)
        }
        None => None,
    };
    let (features, d_in) = match (&args.matrix, &args.feature_map) {
        (Some(path), _) => {
            ctx.echo("matrix", path.display());
            let m = parse_feature_matrix(&read(path)?, semantics).map_err(in_file(path))?;
            (m, args.d_in)
        }
        (None, Some(map)) => {
            let inputs = inputs
                .as_ref()
                .ok_or_else(|| usage("--feature-map needs --inputs"))?;
            ctx.echo("feature_map", map);
            let circuit = if map == "zz" {
                build_zz_feature_map(inputs.dim(), 1)?
            } else {
                let path = Path::new(map);
                parse_circuit(&read(path)?).map_err(in_file(path))?
            };
            let m = extract_quantum_features(&circuit, inputs, ctx.execution)?;
            (m, Some(args.d_in.unwrap_or(inputs.dim())))
        }
        (None, None) => return Err(usage("give --matrix or --feature-map")),
    };
    if let Some(d) = d_in {
        ctx.echo("d_in", d);
    }
    ctx.echo("threshold", args.threshold);
    ctx.echo(
        "semantics",
        if features.semantics() == RowSemantics::Probability {
            "probability"
        } else {
            "generic"
        },
    );

    let (mut report, warnings) = evaluate_features(
        &features,
        &FeatureMetricsConfig {
            d_in,
            threshold: args.threshold,
        },
    )?;
    ctx.warn(warnings);
    if let (Some(spec), Some(cfg)) = (&args.evaluator, qos_cfg) {
        let qos_inputs = match (&inputs, &args.matrix) {
            (Some(i), _) => i,
            (None, Some(_)) => &features,
            (None, None) => return Err(usage("--evaluator needs --inputs")),
        };
        ctx.echo("evaluator", spec);
        ctx.echo("qos_sigma", cfg.sigma);
        ctx.echo("qos_k", cfg.k);
        let value = sensitivity(ctx, spec, observables, qos_inputs, &cfg)?;
        report = report.with_qos(value, cfg);
    }
    Ok(report)
}

fn sensitivity(
    ctx: &Ctx,
    spec: &EvaluatorSpec,
    observables: Option<Vec<PauliString>>,
    inputs: &FeatureMatrix,
    cfg: &QosConfig,
) -> Result<f64, CliError> {
    let value = match spec {
        EvaluatorSpec::Identity => qos(&LinearMap { scale: 1.0 }, inputs, cfg)?,
        EvaluatorSpec::Linear(c) => qos(&LinearMap { scale: *c }, inputs, cfg)?,
        EvaluatorSpec::Constant => qos(
            &ConstantMap {
                output: vec![0.0; inputs.dim()],
            },
            inputs,
            cfg,
        )?,
        EvaluatorSpec::BuiltinQnn => {
            let mut model = QnnEvaluator::builtin(inputs.dim(), ctx.seed)?;
            if let Some(obs) = observables {
                model = model
                    .with_observables(obs)
                    .map_err(|e| usage(e.to_string()))?;
            }
            qos(&model as &dyn Evaluator, inputs, cfg)?
        }
    };
    Ok(value)
}

fn training_config(ctx: &mut Ctx, tail: f64, acc: f64) -> Result<TrainingMetricsConfig, CliError> {
    if !(tail > 0.0 && tail <= 1.0) {
        return Err(usage("--tail must lie in (0, 1]"));
    }
    if !(0.0..=1.0).contains(&acc) {
        return Err(usage("--acc-threshold must lie in [0, 1]"));
    }
    ctx.echo("tail", tail);
    ctx.echo("acc_threshold", acc);
    Ok(TrainingMetricsConfig {
        tail_fraction: tail,
        accuracy_threshold: acc,
        ..TrainingMetricsConfig::default()
    })
}

fn num_params_for(log: &Path, flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(n) = flag {
        return Ok(n);
    }
    let mut sidecar = log.as_os_str().to_owned();
    sidecar.push(".meta.json");
    let sidecar = Path::new(&sidecar);
    if !sidecar.exists() {
        return Err(usage(format!(
            "--num-params is required (or a sidecar {})",
            sidecar.display()
        )));
    }
    let bad = |m: String| CliError::Input(format!("{}: {m}", sidecar.display()));
    let meta: serde_json::Value =
        serde_json::from_str(&read(sidecar)?).map_err(|e| bad(e.to_string()))?;
    meta.get("num_params")
        .and_then(serde_json::Value::as_u64)
        .map(|n| n as usize)
        .ok_or_else(|| bad("expected an integer \"num_params\"".to_string()))
}

fn training_block(ctx: &mut Ctx, args: &TrainingArgs) -> Result<TrainingBlock, CliError> {
    let cfg = training_config(ctx, args.tail, args.acc_threshold)?;
    let num_params = num_params_for(&args.log, args.num_params)?;
    ctx.echo("log", args.log.display());
    let log = parse_training_log(&read(&args.log)?, num_params).map_err(in_file(&args.log))?;
    let grads = match &args.grads {
        Some(path) => {
            ctx.echo("grads", path.display());
            Some(parse_gradient_log(&read(path)?).map_err(in_file(path))?)
        }
        None => None,
    };
    let hybrid = evaluate_training(&log, grads.as_ref(), &cfg)?;
    let (classical, relative) = match &args.compare {
        Some(path) => {
            let n = num_params_for(path, args.compare_num_params)?;
            ctx.echo("compare", path.display());
            let other = parse_training_log(&read(path)?, n).map_err(in_file(path))?;
            (
                Some(evaluate_training(&other, None, &cfg)?),
                Some(evaluate_relative(&log, &other, &cfg)?),
            )
        }
        None => (None, None),
    };
    Ok(TrainingBlock {
        hybrid,
        classical,
        relative,
    })
}

fn demo_report(ctx: &mut Ctx, opts: &CircuitOpts) -> Result<MetricReport, CliError> {
    let mut report = MetricReport::new(ReportMeta::new(ctx.seed));
    let circuit = case_study_circuit();
    ctx.echo("circuit", "builtin:case-study");
    report.circuit = Some(circuit_block(ctx, &circuit, opts)?);

    let data = demo::two_clusters(ctx.seed, demo::SAMPLES);
    ctx.echo(
        "inputs",
        format!("synthetic two-cluster {}x{}", data.n_samples(), data.dim()),
    );
    ctx.echo("feature_map", "zz");
    let map = build_zz_feature_map(data.dim(), 1)?;
    let features = extract_quantum_features(&map, &data, ctx.execution)?;
    let fcfg = FeatureMetricsConfig {
        d_in: Some(data.dim()),
        ..FeatureMetricsConfig::default()
    };
    ctx.echo("d_in", data.dim());
    ctx.echo("evaluator", EvaluatorSpec::BuiltinQnn);
    let qcfg = qos_config(ctx, 0.01, 10)?;
    let value = sensitivity(ctx, &EvaluatorSpec::BuiltinQnn, None, &data, &qcfg)?;
    let (block, warnings) = evaluate_features(&features, &fcfg)?;
    ctx.warn(warnings);
    report.features = Some(block.with_qos(value, qcfg));

    let (hybrid, classical, grads) = demo::logs();
    let tcfg = training_config(
        ctx,
        qmetric::training::DEFAULT_TAIL_FRACTION,
        qmetric::training::DEFAULT_ACCURACY_THRESHOLD,
    )?;
    ctx.echo("log", "bundled:hybrid");
    ctx.echo("compare", "bundled:classical");
    report.training = Some(TrainingBlock {
        hybrid: evaluate_training(&hybrid, Some(&grads), &tcfg)?,
        classical: Some(evaluate_training(&classical, None, &tcfg)?),
        relative: Some(evaluate_relative(&hybrid, &classical, &tcfg)?),
    });
    Ok(report)
}
