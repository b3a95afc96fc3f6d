//! `siet`: feasibility reports, region exports, best-response dynamics,
//! Monte Carlo runs and the BSC trade-off curve, on top of `siet-core`.
//!
//! Exit codes are a stable contract: 0 success, 2 config error, 3
//! infeasible energy demand, 4 unsupported user count, 5 dynamics
//! infeasibility, 6 simulation check failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use siet_core::bsc::{bsc_csv, bsc_curve};
use siet_core::equilibria::{
    all_atomic_decoders, best_response_dynamics, is_eta_ne, ne_component_samples, ne_csv,
    ne_rates_sic, ne_rates_sud, uniform_split_for_demand, AtomicDecoder, DecoderSpec,
    EquilibriumPoint, EquilibriumRecord, GameParams,
};
use siet_core::regions::{boundary_csv, region_boundary_samples};
use siet_core::simulation::{simulate_energy, SimulationConfig};
use siet_core::{ConfigDocument, Error, PowerSplit, RateTuple, SnrTable, DEFAULT_TOL};

#[derive(Parser)]
#[command(
    name = "siet",
    version,
    about = "Information-energy regions of the Gaussian MAC with an energy harvester"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Channel source: a JSON config file or inline SNRs.
#[derive(Args, Debug)]
struct ChannelArgs {
    /// JSON channel config: {"k", "h1", "h2", "sigma1_sq", "sigma2_sq",
    /// "p_max"} or the direct form {"snr1", "snr2"}
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Inline SNRs, receiver side then harvester side: "10,10;10,10"
    #[arg(long, value_name = "LIST;LIST", conflicts_with = "config")]
    snr: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Print energy bounds and classify a demand b
    Feasibility {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Minimum energy rate demand
        #[arg(long)]
        b: f64,
    },
    /// Export region samples as CSV: the capacity boundary, or with --ne
    /// the equilibrium sets per decoder
    Region {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long, default_value_t = 0.0)]
        b: f64,
        /// Output CSV path
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
        /// Samples per split axis (boundary) or per component (--ne)
        #[arg(long, default_value_t = 33)]
        samples: usize,
        /// Export eta-NE sets instead of the capacity boundary
        #[arg(long)]
        ne: bool,
        /// Decoder(s) for --ne: "sud", "sic:1,2", or "all" (repeatable)
        #[arg(long)]
        decoder: Vec<String>,
    },
    /// Run round-robin best-response dynamics and report the terminal
    /// profile with its equilibrium verdict (JSON)
    Dynamics {
        #[command(flatten)]
        channel: ChannelArgs,
        #[arg(long)]
        b: f64,
        /// Equilibrium slack in bits per channel use
        #[arg(long, default_value_t = 0.01)]
        eta: f64,
        /// "sud" or "sic:1,2"
        #[arg(long, default_value = "sud")]
        decoder: String,
        /// Starting split "0.2,0.9"; required unless --cooperative-init
        #[arg(long, value_name = "LIST")]
        start: Option<String>,
        /// Start from the uniform split solving E(beta) = b
        #[arg(long)]
        cooperative_init: bool,
        #[arg(long, default_value_t = 64)]
        rounds: usize,
        /// Output path (stdout when omitted)
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Simulate blocks of the power-split construction and report the
    /// empirical energy statistics (JSON)
    Simulate {
        #[command(flatten)]
        channel: ChannelArgs,
        /// Power split "0.6,0.6"; derived from --b when omitted
        #[arg(long, value_name = "LIST")]
        beta: Option<String>,
        /// Energy demand used to derive the split when --beta is omitted
        #[arg(long)]
        b: Option<f64>,
        /// Channel uses per block
        #[arg(long, default_value_t = 100_000)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Outage slack; defaults to 0.01 * target_B
        #[arg(long)]
        epsilon: Option<f64>,
        /// Operational energy rate; defaults to E(beta)
        #[arg(long)]
        target_b: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Fail (exit 6) when |mean_B - E(beta)| / E(beta) > tol
        #[arg(long)]
        check: bool,
        #[arg(long, default_value_t = 0.01)]
        tol: f64,
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
        /// Also write the per-trial empirical rates as CSV
        #[arg(long, value_name = "PATH")]
        per_trial_csv: Option<PathBuf>,
    },
    /// Export the BSC information-energy capacity curve as CSV
    Bsc {
        /// Crossover probability in [0, 1/2]
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
        #[arg(long, value_name = "PATH")]
        out: PathBuf,
    },
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::NegativeDemand(_) | Error::InfeasibleDemand { .. } => 3,
            Error::UnsupportedK(_) => 4,
            Error::NoFeasibleResponse { .. } | Error::DynamicsInfeasible { .. } => 5,
            _ => 2,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::config(e.to_string())
    }
}

/// Everything a run needs for provenance: written as
/// `<out>.manifest.json` next to each file output.
#[derive(Serialize)]
struct RunManifest {
    command: String,
    argv: Vec<String>,
    version: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    unix_time_secs: u64,
    snr1: Vec<f64>,
    snr2: Vec<f64>,
    outputs: Vec<String>,
}

fn write_manifest(
    command: &str,
    snr: &SnrTable,
    seed: Option<u64>,
    outputs: &[&Path],
) -> Result<(), Failure> {
    let Some(first) = outputs.first() else {
        return Ok(());
    };
    let manifest = RunManifest {
        command: command.to_string(),
        argv: std::env::args().collect(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        seed,
        unix_time_secs: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        snr1: snr.snr1().to_vec(),
        snr2: snr.snr2().to_vec(),
        outputs: outputs.iter().map(|p| p.display().to_string()).collect(),
    };
    let mut path = first.as_os_str().to_owned();
    path.push(".manifest.json");
    fs::write(
        PathBuf::from(path),
        serde_json::to_string_pretty(&manifest).unwrap() + "\n",
    )?;
    Ok(())
}

fn load_snr(channel: &ChannelArgs) -> Result<SnrTable, Failure> {
    match (&channel.config, &channel.snr) {
        (Some(path), None) => {
            let text = fs::read_to_string(path)
                .map_err(|e| Failure::config(format!("{}: {e}", path.display())))?;
            Ok(ConfigDocument::from_json(&text)?.into_snr_table()?)
        }
        (None, Some(inline)) => {
            let (snr1, snr2) = inline
                .split_once(';')
                .ok_or_else(|| Failure::config("--snr expects \"list;list\""))?;
            Ok(SnrTable::new(parse_list(snr1)?, parse_list(snr2)?)?)
        }
        _ => Err(Failure::config("provide exactly one of --config or --snr")),
    }
}

fn parse_list(text: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|e| Failure::config(format!("bad number {x:?}: {e}")))
        })
        .collect()
}

fn parse_decoder(text: &str, k: usize) -> Result<AtomicDecoder, Failure> {
    if text.eq_ignore_ascii_case("sud") {
        return Ok(AtomicDecoder::Sud);
    }
    if let Some(order_text) = text
        .strip_prefix("sic:")
        .or_else(|| text.strip_prefix("SIC:"))
    {
        // 1-based user list, comma or hyphen separated.
        let order: Result<Vec<usize>, Failure> = order_text
            .split([',', '-'])
            .map(|x| {
                x.trim()
                    .parse::<usize>()
                    .map_err(|e| Failure::config(format!("bad decoding order {x:?}: {e}")))
                    .and_then(|u| {
                        u.checked_sub(1)
                            .ok_or_else(|| Failure::config("decoding orders are 1-based"))
                    })
            })
            .collect();
        let decoder = AtomicDecoder::Sic(order?);
        decoder.validate(k)?;
        return Ok(decoder);
    }
    Err(Failure::config(format!(
        "unknown decoder {text:?}; expected \"sud\" or \"sic:1,2\""
    )))
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Feasibility { channel, b } => {
            let snr = load_snr(&channel)?;
            let (b_ind, b_coop) = (snr.b_ind(), snr.b_coop());
            println!("K = {}", snr.k());
            println!("b_ind = {b_ind}");
            println!("b_coop = {b_coop}");
            println!("demand b = {b}");
            if !snr.is_feasible(b, DEFAULT_TOL)? {
                println!("verdict: infeasible (b > b_coop)");
                return Err(Error::InfeasibleDemand { b, b_coop }.into());
            }
            if b <= b_ind {
                println!("verdict: feasible, vacuous energy constraint (b <= b_ind)");
            } else {
                println!("verdict: feasible, binding energy constraint (b_ind < b <= b_coop)");
            }
            Ok(())
        }

        Command::Region {
            channel,
            b,
            out,
            samples,
            ne,
            decoder,
        } => {
            let snr = load_snr(&channel)?;
            let k = snr.k();
            let csv = if ne {
                let params = GameParams::new(b, DEFAULT_TOL).unwrap();
                let atoms = if decoder.is_empty()
                    || decoder.iter().any(|d| d.eq_ignore_ascii_case("all"))
                {
                    if k > 6 {
                        return Err(Error::UnsupportedK(k).into());
                    }
                    all_atomic_decoders(k)
                } else {
                    decoder
                        .iter()
                        .map(|d| parse_decoder(d, k))
                        .collect::<Result<Vec<_>, _>>()?
                };
                let mut rows = Vec::new();
                for atom in atoms {
                    rows.extend(ne_component_samples(&snr, &params, &atom, samples)?);
                }
                ne_csv(&rows, k)
            } else {
                let rows = region_boundary_samples(&snr, b, samples)?;
                boundary_csv(&rows, k)
            };
            fs::write(&out, csv)?;
            write_manifest("region", &snr, None, &[&out])?;
            Ok(())
        }

        Command::Dynamics {
            channel,
            b,
            eta,
            decoder,
            start,
            cooperative_init,
            rounds,
            out,
            tol,
        } => {
            let snr = load_snr(&channel)?;
            let k = snr.k();
            let atom = parse_decoder(&decoder, k)?;
            let params = GameParams::new(b, eta)?;
            let start = if cooperative_init {
                uniform_split_for_demand(&snr, b)?
            } else {
                let text = start
                    .ok_or_else(|| Failure::config("provide --start or --cooperative-init"))?;
                PowerSplit::new(parse_list(&text)?)?
            };
            let spec = DecoderSpec::Atomic(atom.clone());
            let result = best_response_dynamics(&snr, &params, &spec, start, rounds)?;

            let terminal = result.trajectory.last().unwrap().clone();
            let rates = match &atom {
                AtomicDecoder::Sud => ne_rates_sud(&snr, &terminal),
                AtomicDecoder::Sic(order) => ne_rates_sic(&snr, &terminal, order)?,
            };
            let b_rate = snr.energy_max(&terminal).max(params.b);
            let point = EquilibriumPoint {
                split: terminal,
                rates: RateTuple::new(rates, b_rate)?,
                decoder: atom,
            };
            let report = is_eta_ne(&snr, &params, &point, tol)?;

            #[derive(Serialize)]
            struct DynamicsOutput {
                trajectory: Vec<Vec<f64>>,
                terminal: EquilibriumRecord,
                converged: bool,
                rounds: usize,
                eta_ne: bool,
                max_gain: f64,
            }
            let output = DynamicsOutput {
                trajectory: result
                    .trajectory
                    .iter()
                    .map(|s| s.beta().to_vec())
                    .collect(),
                terminal: EquilibriumRecord::new(&point, &params),
                converged: result.converged,
                rounds: result.rounds,
                eta_ne: report.is_equilibrium,
                max_gain: report.max_gain,
            };
            let json = serde_json::to_string_pretty(&output).unwrap() + "\n";
            match &out {
                Some(path) => {
                    fs::write(path, json)?;
                    write_manifest("dynamics", &snr, None, &[path])?;
                }
                None => print!("{json}"),
            }
            Ok(())
        }

        Command::Simulate {
            channel,
            beta,
            b,
            n,
            trials,
            epsilon,
            target_b,
            seed,
            check,
            tol,
            out,
            per_trial_csv,
        } => {
            let snr = load_snr(&channel)?;
            let split = match (beta, b) {
                (Some(text), _) => PowerSplit::new(parse_list(&text)?)?,
                (None, Some(b)) => uniform_split_for_demand(&snr, b)?,
                (None, None) => {
                    return Err(Failure::config("provide --beta or --b to fix the split"))
                }
            };
            let surface = snr.energy_max(&split);
            let target_b = target_b.unwrap_or(surface);
            let sim = SimulationConfig {
                n,
                trials,
                epsilon: epsilon.unwrap_or(0.01 * target_b.abs().max(1.0)),
                seed,
                split: split.clone(),
                target_b,
            };
            let result = simulate_energy(&snr, &sim)?;

            #[derive(Serialize)]
            struct SimulateOutput<'a> {
                snr1: &'a [f64],
                snr2: &'a [f64],
                beta: &'a [f64],
                n: usize,
                trials: usize,
                epsilon: f64,
                seed: u64,
                #[serde(rename = "target_B")]
                target_b: f64,
                #[serde(rename = "energy_surface_E")]
                surface: f64,
                #[serde(flatten)]
                result: &'a siet_core::simulation::SimulationResult,
            }
            let output = SimulateOutput {
                snr1: snr.snr1(),
                snr2: snr.snr2(),
                beta: split.beta(),
                n,
                trials,
                epsilon: sim.epsilon,
                seed,
                target_b,
                surface,
                result: &result,
            };
            let json = serde_json::to_string_pretty(&output).unwrap() + "\n";
            if let Some(path) = &per_trial_csv {
                fs::write(path, siet_core::simulation::per_trial_csv(&result))?;
            }
            match &out {
                Some(path) => {
                    fs::write(path, json)?;
                    let mut outputs: Vec<&Path> = vec![path];
                    if let Some(csv) = &per_trial_csv {
                        outputs.push(csv);
                    }
                    write_manifest("simulate", &snr, Some(seed), &outputs)?;
                }
                None => print!("{json}"),
            }
            if check {
                let rel = (result.mean_b - surface).abs() / surface.abs().max(1.0);
                if rel > tol {
                    return Err(Failure {
                        code: 6,
                        message: format!(
                            "check failed: |mean_B - E(beta)| / E(beta) = {rel} > {tol}"
                        ),
                    });
                }
            }
            Ok(())
        }

        Command::Bsc { p, points, out } => {
            let curve = bsc_curve(p, points)?;
            fs::write(&out, bsc_csv(&curve))?;
            // The BSC curve has no MAC config; no manifest SNRs to echo.
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
