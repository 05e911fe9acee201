use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qpair_core::entanglement::{pair_probe, rank_pairs, score_pairs, ScoreMethod, ScoreOptions};
use qpair_core::experiment::{run_full_experiment, ExperimentConfig, Toggle, DEFAULT_OUTPUT_DIR};
use qpair_core::graphstate::{device_topology, edge, ring_layout, stabilizer_expectations, Topology, SHIPPED_TOPOLOGIES};
use qpair_core::noise::{default_profile_for, load_calibration, NoiseModel};
use qpair_core::supercrypt::{format_bits, parse_bits, protocol_fidelity, supercrypt_roundtrip};
use qpair_core::Error;

const OUTPUT_ENV: &str = "QPAIR_OUTPUT_DIR";

/// Entanglement-guided qubit pair selection for superdense-coded key
/// transmission on simulated devices.
#[derive(Debug, Parser)]
#[command(name = "qpair", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Inspect the shipped device coupling maps.
    Topology {
        #[command(subcommand)]
        action: TopologyAction,
    },
    /// Prepare a device's graph state and check its stabilizers.
    Graphstate {
        #[command(subcommand)]
        action: GraphstateAction,
    },
    /// Negativity of every measured pair, or of one pair.
    Negativity(NegativityArgs),
    /// Superdense protocol fidelity of one pair.
    Fidelity(FidelityArgs),
    /// Full pair-selection experiment.
    Experiment {
        #[command(subcommand)]
        action: ExperimentAction,
    },
    /// Encrypt, send the key over a pair and decrypt.
    Roundtrip(RoundtripArgs),
}

#[derive(Debug, Subcommand)]
enum TopologyAction {
    List,
    Show { name: String },
}

#[derive(Debug, Subcommand)]
enum GraphstateAction {
    Verify {
        name: String,
        #[command(flatten)]
        noise: NoiseArgs,
        #[arg(long, default_value_t = 4096)]
        trajectories: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
    },
}

#[derive(Debug, Subcommand)]
enum ExperimentAction {
    Run(RunArgs),
}

#[derive(Debug, Args)]
struct NoiseArgs {
    /// Calibration profile name or path, or `none`. Defaults to the profile
    /// shipped for the topology.
    #[arg(long, visible_alias = "profile")]
    noise: Option<String>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Tomography,
    Exact,
}

#[derive(Debug, Args)]
struct NegativityArgs {
    name: String,
    #[arg(long, value_parser = parse_pair)]
    pair: Option<(usize, usize)>,
    #[command(flatten)]
    noise: NoiseArgs,
    #[arg(long, value_enum, default_value_t = Method::Tomography)]
    method: Method,
    #[arg(long, default_value_t = 8192)]
    shots: u64,
    #[arg(long, default_value_t = 4096)]
    trajectories: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Debug, Args)]
struct FidelityArgs {
    name: String,
    #[arg(long, value_parser = parse_pair)]
    pair: (usize, usize),
    #[command(flatten)]
    noise: NoiseArgs,
    #[arg(long, default_value_t = 8192)]
    shots: u64,
    #[arg(long, default_value_t = 20)]
    repeats: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Debug, Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    topology: Option<String>,
    #[arg(long, visible_alias = "noise")]
    profile: Option<String>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    repeats: Option<usize>,
    #[arg(long)]
    trajectories: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = parse_toggle)]
    tomography: Option<Toggle>,
    /// Overrides the config file, which overrides QPAIR_OUTPUT_DIR.
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct RoundtripArgs {
    #[arg(long)]
    message: String,
    #[arg(long, value_parser = parse_pair)]
    pair: (usize, usize),
    #[arg(long, default_value = "ibmqx4")]
    topology: String,
    #[command(flatten)]
    noise: NoiseArgs,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn parse_pair(text: &str) -> Result<(usize, usize), String> {
    let (b, c) = text.split_once(',').ok_or_else(|| format!("expected B,C, got `{text}`"))?;
    let index = |s: &str| s.trim().parse::<usize>().map_err(|_| format!("`{s}` is not a qubit index"));
    Ok((index(b)?, index(c)?))
}

fn parse_toggle(text: &str) -> Result<Toggle, String> {
    match text {
        "on" => Ok(Toggle::On),
        "off" => Ok(Toggle::Off),
        _ => Err(format!("expected `on` or `off`, got `{text}`")),
    }
}

fn noise_for(topology: &Topology, requested: Option<&str>) -> qpair_core::Result<NoiseModel> {
    let name = match requested {
        Some(name) => name.to_string(),
        None => match default_profile_for(topology.name()) {
            Some(name) => name.to_string(),
            None => return Ok(NoiseModel::noiseless()),
        },
    };
    if name == "none" {
        return Ok(NoiseModel::noiseless());
    }
    let profile = load_calibration(&name)?;
    if profile.topology_name != topology.name() {
        return Err(Error::InvalidConfig(format!(
            "profile `{}` is calibrated for `{}`, not `{}`",
            profile.name,
            profile.topology_name,
            topology.name()
        )));
    }
    Ok(profile.noise)
}

fn pair_label((b, c): (usize, usize)) -> String {
    format!("({b}, {c})")
}

fn run(cli: Cli) -> qpair_core::Result<()> {
    match cli.command {
        Command::Topology { action: TopologyAction::List } => {
            for name in SHIPPED_TOPOLOGIES {
                let t = device_topology(name)?;
                println!("{name}\t{} qubits\t{} edges", t.num_qubits(), t.edges().len());
            }
        }
        Command::Topology { action: TopologyAction::Show { name } } => {
            let topology = device_topology(&name)?;
            let layout = ring_layout(&topology, None)?;
            println!("{}", serde_json::to_string_pretty(&topology.to_document()).expect("document serializes"));
            println!("ring: {:?}", layout.cycle);
            println!("attached: {}", layout.attached.iter().map(|&e| pair_label(e)).collect::<Vec<_>>().join(" "));
        }
        Command::Graphstate { action: GraphstateAction::Verify { name, noise, trajectories, seed } } => {
            let topology = device_topology(&name)?;
            let model = noise_for(&topology, noise.noise.as_deref())?;
            let graph = ring_layout(&topology, None)?.graph;
            for (vertex, value) in stabilizer_expectations(&graph, &model, trajectories, seed)? {
                // -0.000000 would be noise in a table of expectations
                let value = if value.abs() < 5e-7 { 0.0 } else { value };
                println!("⟨K_{vertex}⟩ = {value:.6}");
            }
        }
        Command::Negativity(args) => {
            let topology = device_topology(&args.name)?;
            let model = noise_for(&topology, args.noise.noise.as_deref())?;
            let graph = ring_layout(&topology, None)?.graph;
            let pairs = match args.pair {
                Some((b, c)) => {
                    pair_probe(&graph, (b, c))?;
                    vec![edge(b, c)]
                }
                None => topology.edges().to_vec(),
            };
            let options = ScoreOptions {
                method: match args.method {
                    Method::Tomography => ScoreMethod::Tomographed,
                    Method::Exact => ScoreMethod::Exact,
                },
                shots: args.shots,
                trajectories: args.trajectories,
                seed: args.seed,
            };
            let scores = score_pairs(&graph, &pairs, &model, &options)?;
            let best = rank_pairs(&scores)?[0].pair;
            for s in &scores {
                let marker = if s.pair == best { "  *" } else { "" };
                println!("{:<10} {:.6}{marker}", pair_label(s.pair), s.negativity);
            }
        }
        Command::Fidelity(args) => {
            let topology = device_topology(&args.name)?;
            let model = noise_for(&topology, args.noise.noise.as_deref())?;
            let est = protocol_fidelity(args.pair, &topology, &model, args.shots, args.repeats, args.seed)?;
            println!("pair {}: fidelity {:.6} ± {:.6} (std error, {} repeats × {} shots)", pair_label(est.pair), est.mean_fidelity, est.std_error, est.repeats, est.shots);
            for (message, p) in &est.per_message {
                println!("  {message}: {p:.6}");
            }
        }
        Command::Experiment { action: ExperimentAction::Run(args) } => {
            let mut config = ExperimentConfig::load(&args.config)?;
            if let Some(v) = args.topology {
                config.topology_name = v;
            }
            if let Some(v) = args.profile {
                config.profile = v;
            }
            if let Some(v) = args.shots {
                config.shots = v;
            }
            if let Some(v) = args.repeats {
                config.repeats = v;
            }
            if let Some(v) = args.trajectories {
                config.trajectories = v;
            }
            if let Some(v) = args.seed {
                config.seed = v;
            }
            if let Some(v) = args.tomography {
                config.tomography = v;
            }
            config.output_dir = args
                .output_dir
                .or(config.output_dir)
                .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
                .or_else(|| Some(PathBuf::from(DEFAULT_OUTPUT_DIR)));
            config.validate()?;
            let report = run_full_experiment(&config)?;
            println!("topology {} with profile {}", report.topology, report.profile);
            for row in report.pairs() {
                println!(
                    "{:<10} negativity {:.6}  fidelity {:.6} ± {:.6}",
                    pair_label(row.pair),
                    row.negativity,
                    row.mean_fidelity,
                    row.std_error
                );
            }
            println!("selected pair {}: fidelity {:.6}", pair_label(report.selected_pair), report.selected_fidelity);
            println!(
                "average case: fidelity {:.6} ± {:.6} (std error over pairs)",
                report.random_baseline.mean_fidelity, report.random_baseline.std_error
            );
            println!("improvement {:.2}%", report.improvement_percent);
            println!("wrote {}", config.output_dir().display());
        }
        Command::Roundtrip(args) => {
            let topology = device_topology(&args.topology)?;
            let model = noise_for(&topology, args.noise.noise.as_deref())?;
            let message = parse_bits(&args.message)?;
            let out = supercrypt_roundtrip(&message, args.pair, &topology, &model, args.seed)?;
            println!("message    {}", format_bits(&message));
            println!("key        {}", format_bits(&out.key.bits));
            println!("ciphertext {}", format_bits(&out.ciphertext.bits));
            println!("received   {}", format_bits(&out.received_key));
            println!("decrypted  {}", format_bits(&out.decrypted));
            println!("exact match: {}", out.exact_match);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let rendered = e.render().to_string();
            eprintln!("{}", rendered.lines().next().unwrap_or("error: invalid arguments"));
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_user_error() { 1 } else { 2 })
        }
    }
}
