use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::Rng;
use serde_json::{json, Value};

use rumor_core::graph::{self, Network, Topology};
use rumor_core::harness::{self, ExperimentConfig};
use rumor_core::oracle;
use rumor_core::rng::{derive_seed, label_tag, stream};
use rumor_core::theory::{self, constant_prediction};
use rumor_core::{Error, Family, FamilySpec, Protocol, ProtocolConfig};

#[derive(Parser)]
#[command(name = "rumor", version, about = "Push, pull and push&pull rumour spreading lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FamilyArgs {
    /// complete | star | gnp | regular | push-adversary | pp-adversary
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
}

impl FamilyArgs {
    fn family(&self) -> Result<Family, CliError> {
        let name = self
            .family
            .as_deref()
            .ok_or_else(|| CliError::Usage("--family is required".into()))?;
        Ok(Family::from_parts(name, self.p, self.d, self.eps)?)
    }

    fn spec(&self) -> Result<FamilySpec, CliError> {
        let n = self.n.ok_or_else(|| CliError::Usage("--n is required".into()))?;
        Ok(FamilySpec::new(self.family()?, n)?)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolArg {
    Push,
    Pull,
    Pp,
}

impl From<ProtocolArg> for Protocol {
    fn from(p: ProtocolArg) -> Self {
        match p {
            ProtocolArg::Push => Protocol::Push,
            ProtocolArg::Pull => Protocol::Pull,
            ProtocolArg::Pp => Protocol::Pp,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Oracle,
    SelfBounding,
    Expectation,
    Spectral,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph as JSON.
    Generate {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run trials on one graph.
    Simulate {
        #[command(flatten)]
        family: FamilyArgs,
        /// Graph file instead of a family.
        #[arg(long, conflicts_with = "family")]
        graph: Option<PathBuf>,
        #[arg(long, value_enum)]
        protocol: ProtocolArg,
        #[arg(long)]
        q: f64,
        #[arg(long, default_value_t = 1)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 0)]
        start: usize,
        #[arg(long = "max-rounds")]
        max_rounds: Option<u32>,
        /// Per-trial CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// JSON-lines round trace of the first trial.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run an n-grid, emit CSV and a slope fit against ln n.
    Sweep {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long = "n-list", value_delimiter = ',', required = true)]
        n_list: Vec<usize>,
        #[arg(long, value_enum)]
        protocol: ProtocolArg,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        trials: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        start: usize,
        #[arg(long = "max-rounds")]
        max_rounds: Option<u32>,
        /// Output prefix: writes `<out>.csv` and `<out>.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an oracle suite; exits 1 on any failure.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long)]
        seed: u64,
        /// JSON report.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print closed-form constants and predicted round counts.
    Predict {
        #[arg(long, value_enum)]
        protocol: ProtocolArg,
        #[arg(long)]
        q: f64,
        #[arg(long)]
        n: f64,
        #[arg(long, default_value = "complete")]
        family: String,
        #[arg(long)]
        eps: Option<f64>,
    },
    /// Spectral profile and mixing deviations for sampled vertex sets.
    Diagnose {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, conflicts_with = "family")]
        graph: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

enum CliError {
    Usage(String),
    Failure(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidSpec(_)
            | Error::OutOfRange(_)
            | Error::Unsupported(_)
            | Error::VertexOutOfRange { .. } => CliError::Usage(e.to_string()),
            other => CliError::Failure(other.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Failure(e.to_string())
    }
}

type CliResult = Result<(), CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    harness::configure_threads();
    let outcome = match cli.command {
        Command::Generate { family, seed, out } => generate(&family, seed, &out),
        Command::Simulate {
            family,
            graph,
            protocol,
            q,
            trials,
            seed,
            start,
            max_rounds,
            out,
            trace,
        } => {
            let cfg = ProtocolConfig {
                protocol: protocol.into(),
                q,
                start_vertex: start,
                max_rounds,
                tilde_threshold_enabled: true,
            };
            simulate(&family, graph.as_deref(), cfg, trials, seed, out.as_deref(), trace.as_deref())
        }
        Command::Sweep {
            family,
            n_list,
            protocol,
            q,
            trials,
            seed,
            start,
            max_rounds,
            out,
        } => family.family().and_then(|f| {
            let mut cfg = ExperimentConfig::new(f, protocol.into(), q, n_list, trials, seed);
            cfg.start_vertex = start;
            cfg.max_rounds = max_rounds;
            sweep(&cfg, out.as_deref())
        }),
        Command::Verify { suite, seed, out } => verify(suite, seed, out.as_deref()),
        Command::Predict {
            protocol,
            q,
            n,
            family,
            eps,
        } => predict(protocol.into(), q, n, &family, eps),
        Command::Diagnose { family, graph, seed } => diagnose(&family, graph.as_deref(), seed),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn time_seed() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_nanos() as u64)
        .unwrap_or(0)
}

fn echo(config: &Value) {
    eprintln!("config: {config}");
}

fn metadata(command: &str, config: Value) -> Value {
    json!({ "tool": "rumor", "version": rumor_core::VERSION, "command": command, "config": config })
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))
}

fn generate(args: &FamilyArgs, seed: Option<u64>, out: &Path) -> CliResult {
    let spec = args.spec()?;
    let seed = seed.unwrap_or_else(time_seed);
    let config = json!({ "spec": spec, "seed": seed });
    echo(&config);
    let g = graph::generate(&spec, seed)?;
    g.write_json(out, Some(metadata("generate", config)))?;
    eprintln!("wrote {} ({} vertices, {} edges)", out.display(), g.n(), g.edge_count());
    Ok(())
}

/// Graph from `--graph` or from the family flags, plus a label and the tag
/// used for per-trial seeds.
fn load_network(args: &FamilyArgs, graph: Option<&Path>, seed: u64) -> Result<(Network, String, Value), CliError> {
    match graph {
        Some(path) => {
            let g = rumor_core::Graph::read_json(path)?;
            let label = format!("file:{}", path.display());
            Ok((Network::Explicit(g), label, json!({ "graph": path })))
        }
        None => {
            let spec = args.spec()?;
            let graph_seed = harness::graph_seed(seed, &spec.family, spec.n);
            let network = graph::generate_network(&spec, graph_seed)?;
            Ok((network, spec.family.to_string(), json!({ "spec": spec, "graph_seed": graph_seed })))
        }
    }
}

fn simulate(
    args: &FamilyArgs,
    graph: Option<&Path>,
    cfg: ProtocolConfig,
    trials: usize,
    seed: Option<u64>,
    out: Option<&Path>,
    trace: Option<&Path>,
) -> CliResult {
    if trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let seed = seed.unwrap_or_else(time_seed);
    let (network, label, source) = load_network(args, graph, seed)?;
    let n = network.vertex_count();
    cfg.validate(n)?;
    let tag = label_tag(&label);
    let seeds: Vec<u64> = (0..trials).map(|i| derive_seed(seed, &[tag, n as u64, i as u64])).collect();
    let config = json!({
        "source": source,
        "protocol": cfg,
        "max_rounds_resolved": cfg.round_cap(n),
        "trials": trials,
        "seed": seed,
        "first_trial_seed": seeds[0],
    });
    echo(&config);

    let results = harness::run_point(&network, &cfg, &seeds, trace.is_some())?;
    if let Some(path) = trace {
        results[0].write_trace_jsonl(create(path)?)?;
    }
    let rows = harness::trial_rows(&label, n, cfg.protocol, cfg.q, &results);
    if let Some(path) = out {
        harness::write_rows_csv(&rows, create(path)?)?;
    }
    let summary = harness::summarize(&label, n, cfg.protocol, cfg.q, seed, &results);
    let mut stdout = io::stdout().lock();
    for row in &rows {
        let t_tilde = row.t_tilde.map(|t| t.to_string()).unwrap_or_else(|| "-".into());
        writeln!(stdout, "trial {} seed {} T {} T_tilde {} completed {}", row.trial, row.seed, row.rounds, t_tilde, row.completed)?;
    }
    let mut report = json!({ "meta": metadata("simulate", config), "summary": summary });
    harness::round_json_floats(&mut report);
    writeln!(stdout, "{}", serde_json::to_string(&report)?)?;
    if summary.completed < summary.trials {
        return Err(CliError::Failure(format!(
            "{} of {} trials did not complete",
            summary.trials - summary.completed,
            summary.trials
        )));
    }
    Ok(())
}

fn sweep(cfg: &ExperimentConfig, out: Option<&Path>) -> CliResult {
    let trial_seeds: Vec<Value> = cfg
        .families
        .iter()
        .flat_map(|f| {
            cfg.n_values.iter().map(move |&n| {
                json!({
                    "family": f.to_string(),
                    "n": n,
                    "graph_seed": harness::graph_seed(cfg.master_seed, f, n),
                    "first_trial_seed": harness::trial_seed(cfg.master_seed, f, n, 0),
                })
            })
        })
        .collect();
    let config = json!({ "experiment": cfg, "derived_seeds": trial_seeds });
    echo(&config);
    let summary = harness::run_trials(cfg)?;

    let mut fits = Vec::new();
    for family in &cfg.families {
        let label = family.to_string();
        let points: Vec<(f64, f64)> = summary
            .points
            .iter()
            .filter(|p| p.family == label)
            .filter_map(|p| p.mean_t.map(|m| (p.n as f64, m)))
            .collect();
        if points.len() >= 3 {
            let fit = harness::fit_slope(&points)?;
            let constant = theory::protocol_constant(cfg.protocol, cfg.q)?;
            eprintln!(
                "{label}: slope {:.4} vs c_{}({}) = {:.4}, intercept {:.4}, max residual {:.4}",
                fit.slope, cfg.protocol, cfg.q, constant, fit.intercept, fit.max_residual
            );
            fits.push(json!({ "family": label, "fit": fit, "c_p": constant }));
        }
    }

    let mut summary_json: Value = serde_json::from_str(&summary.to_json()?)?;
    summary_json["meta"] = metadata("sweep", config);
    summary_json["slope_fits"] = Value::Array(fits);
    match out {
        Some(prefix) => {
            let csv_path = prefix.with_extension("csv");
            let json_path = prefix.with_extension("json");
            summary.write_csv(create(&csv_path)?)?;
            let mut w = create(&json_path)?;
            writeln!(w, "{}", serde_json::to_string_pretty(&summary_json)?)?;
            eprintln!("wrote {} and {}", csv_path.display(), json_path.display());
        }
        None => {
            summary.write_csv(io::stdout().lock())?;
            eprintln!("{}", serde_json::to_string_pretty(&summary_json)?);
        }
    }
    summary.completion_gate()?;
    Ok(())
}

fn verify(suite: Suite, seed: u64, out: Option<&Path>) -> CliResult {
    let qs = [0.3, 0.7, 1.0];
    let (name, records, passed, total): (&str, Value, usize, usize) = match suite {
        Suite::SelfBounding => {
            let r = oracle::self_bounding_sweep(5, &qs)?;
            let ok = r.iter().filter(|x| x.pass).count();
            ("self-bounding", serde_json::to_value(&r)?, ok, r.len())
        }
        Suite::Expectation => {
            let r = oracle::expectation_sweep(5, &qs)?;
            let ok = r.iter().filter(|x| x.report.pass).count();
            ("expectation", serde_json::to_value(&r)?, ok, r.len())
        }
        Suite::Oracle => {
            let r = oracle::fixed_instances()
                .iter()
                .enumerate()
                .map(|(i, inst)| oracle::engine_agreement(inst, 100_000, 4.0, derive_seed(seed, &[i as u64])))
                .collect::<Result<Vec<_>, _>>()?;
            let ok = r.iter().filter(|x| x.pass).count();
            ("oracle", serde_json::to_value(&r)?, ok, r.len())
        }
        Suite::Spectral => {
            let r = oracle::spectral_suite(seed)?;
            let ok = r.iter().filter(|x| x.pass).count();
            ("spectral", serde_json::to_value(&r)?, ok, r.len())
        }
    };
    let config = json!({ "suite": name, "seed": seed });
    echo(&config);
    if let Some(path) = out {
        let mut report = json!({ "meta": metadata("verify", config), "passed": passed, "total": total, "records": records });
        harness::round_json_floats(&mut report);
        serde_json::to_writer(create(path)?, &report)?;
    }
    println!("{name}: {passed}/{total} passed");
    if passed == total {
        Ok(())
    } else {
        Err(CliError::Failure(format!("{} {name} checks failed", total - passed)))
    }
}

fn predict(protocol: Protocol, q: f64, n: f64, family: &str, eps: Option<f64>) -> CliResult {
    // Every expander family shares the same leading-order formula.
    let family = match family {
        "expander" | "gnp" | "regular" => Family::Complete,
        other => Family::from_parts(other, None, None, eps)?,
    };
    echo(&json!({ "protocol": protocol, "q": q, "n": n, "family": family }));
    let constant = constant_prediction(protocol, q)?;
    println!("c_{protocol}({q}) = {}", harness::format_float(constant.value));
    let rounds = theory::predict_rounds(&family, protocol, n, q)?;
    println!("T_{protocol} [{}] = {}", rounds.formula_id, harness::format_float(rounds.value));
    if let Ok(tilde) = theory::predict_tilde_rounds(protocol, n, q) {
        println!("T_tilde_{protocol} [{}] = {}", tilde.formula_id, harness::format_float(tilde.value));
    }
    Ok(())
}

fn diagnose(args: &FamilyArgs, graph: Option<&Path>, seed: u64) -> CliResult {
    let (network, label, source) = load_network(args, graph, seed)?;
    echo(&json!({ "source": source, "seed": seed }));
    let g = network.to_graph()?;
    let profile = graph::spectral_profile(&g);
    println!("{label}: n {} edges {}", g.n(), g.edge_count());
    println!("{}", serde_json::to_string(&profile)?);
    let n = g.n();
    if n < 2 {
        return Ok(());
    }
    let mut rng = stream(seed);
    let mut vertices: Vec<usize> = (0..n).collect();
    let mut sizes = vec![1, n / 4, n / 2, n - 1];
    sizes.push(rng.gen_range(1..n));
    sizes.retain(|&s| s >= 1 && s < n);
    sizes.dedup();
    println!("size boundary deviation lambda_bound");
    for size in sizes {
        vertices.shuffle(&mut rng);
        let set = &vertices[..size];
        let boundary = graph::edge_boundary(&g, set)?;
        let deviation = graph::mixing_deviation(&g, set)?;
        let bound = profile.lambda * ((size * (n - size)) as f64).sqrt();
        println!("{size} {boundary} {} {}", harness::format_float(deviation), harness::format_float(bound));
    }
    Ok(())
}
