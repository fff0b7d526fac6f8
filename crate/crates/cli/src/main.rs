use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use isrs_nli::nli::{ModelId, NliResult};
use isrs_nli::report::{self, DeviationReport, RunSpec};
use isrs_nli::scenario::Scenario;
use isrs_nli::{analytic_triangular_profile, isrs_power_transfer_db, solve_raman_ode, ssfm, Error};

/// NLI estimation for wideband links with inter-channel stimulated Raman
/// scattering.
#[derive(Parser)]
#[command(name = "isrs-nli", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Signal power profile along the link (profile.csv).
    Profile {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "ode")]
        source: Source,
    },
    /// Per-channel η of the selected models (eta.csv).
    Eta {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        select: Select,
    },
    /// Split-step simulation of the scenario (ssfm.csv, ssfm.json).
    Ssfm {
        #[command(flatten)]
        common: Common,
        /// Also dump the received field of realization 0 (field.bin).
        #[arg(long)]
        dump_field: bool,
    },
    /// Deviation of the selected models from the reference
    /// (eta.csv, deviation.csv, summary.json).
    Compare {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        select: Select,
    },
    /// Comparison repeated over a launch-power sweep.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        select: Select,
        /// Launch powers per channel (dBm); overrides the scenario sweep.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        powers_dbm: Option<Vec<f64>>,
    },
}

#[derive(Args)]
struct Common {
    /// Scenario file (JSON).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Seed of the split-step symbol generator.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct Select {
    /// Comma-separated models; defaults to the scenario's list.
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<ModelId>>,
    /// Reference model for deviations.
    #[arg(long)]
    reference: Option<ModelId>,
    /// Comma-separated channel indices.
    #[arg(long, value_delimiter = ',')]
    channels: Option<Vec<usize>>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Source {
    Ode,
    Analytic,
    Ssfm,
}

enum Failure {
    Config(String),
    Model(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config { .. }
            | Error::Json(_)
            | Error::InvalidParameter(_)
            | Error::InvalidPlan(_)
            | Error::ChannelOutOfRange { .. }
            | Error::NotPowerOfTwo { .. }
            | Error::MixedFiber => Failure::Config(e.to_string()),
            other => Failure::Model(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Model(e.to_string())
    }
}

fn load(common: &Common) -> Result<Scenario, Failure> {
    let mut s = Scenario::load(&common.scenario)?;
    if let Some(seed) = common.seed {
        s.ssfm.seed = seed;
    }
    Ok(s)
}

fn spec(common: &Common, select: &Select) -> Result<RunSpec, Failure> {
    let mut spec = RunSpec::from_scenario(load(common)?);
    if let Some(m) = &select.models {
        spec.models = m.clone();
    }
    if let Some(r) = select.reference {
        spec.reference = r;
    }
    if select.channels.is_some() {
        spec.channels = select.channels.clone();
    }
    spec.out_dir = Some(common.out.clone());
    Ok(spec)
}

fn write(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), Failure> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(name), bytes)?;
    Ok(())
}

fn print_report(r: &DeviationReport) {
    println!("reference: {}", r.reference);
    for s in &r.summary {
        println!(
            "{:<18} max |dη| {:8.4} dB  mean |dη| {:8.4} dB  ({} samples)",
            s.model.as_str(),
            s.max_abs_deviation_db,
            s.mean_abs_deviation_db,
            s.samples
        );
    }
    for p in &r.points {
        if let (Some(dbm), Some(t)) = (p.power_per_channel_dbm, p.power_transfer_db) {
            println!("{dbm:7.2} dBm/ch: ISRS power transfer {t:.3} dB");
        }
    }
    for w in &r.warnings {
        println!("warning: {w}");
    }
    for f in &r.failures {
        println!("failed: {} ({})", f.model, f.message);
    }
}

fn finish(r: &DeviationReport) -> Result<(), Failure> {
    print_report(r);
    if r.failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Model(format!("{} model evaluation(s) failed", r.failures.len())))
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Profile { common, source } => {
            let s = load(&common)?;
            let profile = match source {
                Source::Ode => solve_raman_ode(&s.link, &s.plan, &s.options)?,
                Source::Analytic => analytic_triangular_profile(&s.link, &s.plan, &s.options)?,
                Source::Ssfm => ssfm::measure_power_profile(&s.ssfm_config())?,
            };
            let mut buf = Vec::new();
            profile.write_csv(&mut buf)?;
            write(&common.out, "profile.csv", &buf)?;
            if let Ok(t) = isrs_power_transfer_db(&profile) {
                println!("ISRS power transfer {t:.3} dB");
            }
        }
        Command::Eta { common, select } => {
            let mut spec = spec(&common, &select)?;
            spec.out_dir = None;
            // no reference needed; keep the first selected model in front
            spec.reference = spec.models[0];
            let r = report::run(&spec)?;
            let mut buf = Vec::new();
            writeln!(buf, "{}", NliResult::CSV_HEADER)?;
            for res in &r.points[0].results {
                res.write_csv(&mut buf, false)?;
            }
            write(&common.out, "eta.csv", &buf)?;
            for f in &r.failures {
                println!("failed: {} ({})", f.model, f.message);
            }
            if !r.failures.is_empty() {
                return Err(Failure::Model("model evaluation failed".into()));
            }
        }
        Command::Ssfm { common, dump_field } => {
            let s = load(&common)?;
            let cfg = s.ssfm_config();
            let result = ssfm::simulate(&cfg)?;
            let mut buf = Vec::new();
            result.to_nli_result().write_csv(&mut buf, true)?;
            write(&common.out, "ssfm.csv", &buf)?;
            let mut json = serde_json::to_string_pretty(&result).map_err(Error::from)?;
            json.push('\n');
            write(&common.out, "ssfm.json", json.as_bytes())?;
            if dump_field {
                let field = ssfm::received_field(&cfg, 0)?;
                let mut buf = Vec::new();
                field.write(&mut buf)?;
                write(&common.out, "field.bin", &buf)?;
            }
            println!("{} steps of {:.1} m", result.steps, result.step);
            for (e, snr) in result.entries.iter().zip(&result.snr_db) {
                println!("channel {:3}: η {:8.3} dB(1/W²)  SNR_NLI {:7.2} dB", e.channel, e.eta_db(), snr);
            }
        }
        Command::Compare { common, select } => {
            let r = report::run(&spec(&common, &select)?)?;
            finish(&r)?;
        }
        Command::Sweep { common, select, powers_dbm } => {
            let mut spec = spec(&common, &select)?;
            if powers_dbm.is_some() {
                spec.sweep = powers_dbm;
            }
            let r = report::sweep_power_transfer(&spec)?;
            finish(&r)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Model(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
