use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use rand_chacha::ChaCha12Rng;
use rand_core::SeedableRng;

use suitability::config::EngineConfig;
use suitability::criteria::{draw_salt, ProximitySample};
use suitability::engine;
use suitability::request::AdmissionRequest;
use suitability::resources::{NodeState, ResourceRegistry};
use suitability::simnet::{Simulator, Topology};

use suitability_cli::experiments::{self, ExperimentName, ExperimentSpec};
use suitability_cli::tas_example::run_tas_example;

#[derive(Parser)]
#[command(
    name = "suitability",
    about = "Grade admission requests against nodes, simulate negotiations, and run the validation experiments",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Assess a request against a node and print the breakdown as JSON.
    Assess {
        /// Node capacity file (JSON).
        #[arg(long)]
        node: PathBuf,
        /// Admission request file (JSON).
        #[arg(long)]
        request: PathBuf,
        /// Engine config file overriding the node's config.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Proximity sample file; defaults to perfect connectivity.
        #[arg(long)]
        proximity: Option<PathBuf>,
        /// Seed for the salt draw; defaults to the config's rng_seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a negotiation over a topology and emit the trace as
    /// newline-delimited JSON events.
    Simulate {
        /// Topology file (JSON): nodes plus symmetric edges.
        #[arg(long)]
        topology: PathBuf,
        /// Admission request file (JSON).
        #[arg(long)]
        request: PathBuf,
        /// Engine config applied to every node.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Master seed for the per-node RNG streams.
        #[arg(long)]
        seed: Option<u64>,
        /// Abort the negotiation after this many hops.
        #[arg(long, default_value_t = suitability::simnet::DEFAULT_HOP_LIMIT)]
        hop_limit: usize,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a validation experiment and emit CSV (tas-example prints a
    /// report instead and exits 2 if any value is off).
    Experiment {
        /// Which experiment to run.
        #[arg(value_enum)]
        name: ExperimentName,
        /// Experiment spec file overriding the defaults.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Seed override, applied after the spec file.
        #[arg(long)]
        seed: Option<u64>,
        /// Schedule fixture for tas-example.
        #[arg(long, default_value = "fixtures/tas_worked_example.json")]
        fixture: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn write_output(out: Option<PathBuf>, contents: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(&path, contents)
            .with_context(|| format!("writing {}", path.display()))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(contents.as_bytes())?;
        }
    }
    Ok(())
}

fn run() -> Result<ExitCode> {
    match Cli::parse().command {
        Command::Assess {
            node,
            request,
            config,
            proximity,
            seed,
            out,
        } => {
            let mut node = NodeState::load(&node)?;
            if let Some(path) = config {
                node.config = EngineConfig::load(&path)?;
            }
            let request = AdmissionRequest::load(&request)?;
            let sample = match proximity {
                Some(path) => {
                    let text = fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))?;
                    serde_json::from_str::<ProximitySample>(&text)
                        .with_context(|| format!("parsing {}", path.display()))?
                }
                None => ProximitySample::perfect(request.listener.clone()),
            };
            let registry = ResourceRegistry::with_builtins();
            let mut rng = ChaCha12Rng::seed_from_u64(seed.unwrap_or(node.config.rng_seed));
            let salt = draw_salt(&mut rng);
            let breakdown = engine::assess(&request, &node, &registry, &sample, salt)?;
            let mut text = serde_json::to_string_pretty(&breakdown)?;
            text.push('\n');
            write_output(out, &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Simulate {
            topology,
            request,
            config,
            seed,
            hop_limit,
            out,
        } => {
            let mut topology = Topology::load(&topology)?;
            let request = AdmissionRequest::load(&request)?;
            let master_seed = match config {
                Some(path) => {
                    let config = EngineConfig::load(&path)?;
                    topology.override_configs(config);
                    seed.unwrap_or(config.rng_seed)
                }
                None => seed.unwrap_or(EngineConfig::default().rng_seed),
            };
            let mut simulator = Simulator::new(&topology, master_seed).with_hop_limit(hop_limit);
            let trace = simulator.run(&request)?;
            write_output(out, &trace.to_ndjson()?)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Experiment {
            name,
            spec,
            seed,
            fixture,
            out,
        } => {
            if name == ExperimentName::TasExample {
                let report = run_tas_example(&fixture)?;
                write_output(out, &report.render())?;
                return Ok(if report.passed() {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(2)
                });
            }

            let mut resolved = ExperimentSpec::for_name(name);
            if let Some(path) = spec {
                resolved = resolved.apply(experiments::load_overrides(&path)?)?;
            }
            if let Some(seed) = seed {
                resolved.seed = seed;
            }
            let mut buffer = Vec::new();
            experiments::run(&resolved, &mut buffer)?;
            write_output(out, &String::from_utf8(buffer)?)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(error) => {
            eprintln!("error: {error:#}");
            ExitCode::FAILURE
        }
    }
}
