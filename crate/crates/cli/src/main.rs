use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use petz_cli::build::{build, Emit};
use petz_cli::sweep::{sweep_prior, sweep_threshold};
use petz_cli::verify::{run_verify, Inject};
use petz_cli::{with_workers, CliError, CliResult, ReferenceMode, SamplingMode, SweepConfig};
use petz_core::channels::ChannelKind;
use petz_core::ionnoise::ErmMode;
use petz_core::synth::DilationMethod;

/// Petz recovery maps: construction, circuits and noisy-recovery sweeps.
#[derive(Parser)]
#[command(name = "petz", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit the channel, Petz map, dilation unitary or a circuit.
    Build {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, value_enum)]
        emit: Emit,
    },
    /// Parameter sweeps written as CSV.
    #[command(subcommand)]
    Sweep(SweepKind),
    /// Run the invariant suites and print a JSON report.
    Verify {
        /// Add a deliberately failing check.
        #[arg(long, value_enum)]
        inject: Vec<Inject>,
        #[arg(long, default_value_t = 0)]
        workers: usize,
    },
}

#[derive(Subcommand)]
enum SweepKind {
    /// δF over a (Δθ, Δφ) grid of reference mismatch, with the contour.
    Prior(SweepArgs),
    /// Mean and max recovery error against the gate error Δ.
    Threshold(SweepArgs),
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    cfg: ConfigArgs,
    /// Worker threads; 0 uses every core. Output does not depend on it.
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

/// Flags override the `--config` file, which overrides the defaults.
#[derive(Args, Default)]
struct ConfigArgs {
    /// JSON file with any subset of the sweep settings.
    #[arg(long)]
    config: Option<PathBuf>,
    /// dephasing, amplitude_damping or depolarizing.
    #[arg(long)]
    channel: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    /// Comma-separated p values; one output per value.
    #[arg(long, value_delimiter = ',')]
    p_list: Option<Vec<f64>>,
    #[arg(long)]
    r0: Option<f64>,
    #[arg(long)]
    theta0: Option<f64>,
    #[arg(long)]
    phi0: Option<f64>,
    #[arg(long)]
    dr: Option<f64>,
    #[arg(long)]
    dtheta_min: Option<f64>,
    #[arg(long)]
    dtheta_max: Option<f64>,
    #[arg(long)]
    dtheta_steps: Option<usize>,
    #[arg(long)]
    dphi_min: Option<f64>,
    #[arg(long)]
    dphi_max: Option<f64>,
    #[arg(long)]
    dphi_steps: Option<usize>,
    /// Contour level for δF.
    #[arg(long)]
    level: Option<f64>,
    /// Comma-separated gate errors Δ.
    #[arg(long, value_delimiter = ',')]
    deltas: Option<Vec<f64>>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_enum)]
    sampling: Option<SamplingMode>,
    #[arg(long, value_enum)]
    reference: Option<ReferenceMode>,
    /// general or analytic.
    #[arg(long)]
    dilation: Option<String>,
    /// combined or exact_product.
    #[arg(long)]
    erm_mode: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    single_qubit_offset: Option<f64>,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn parse_enum<T: serde::de::DeserializeOwned>(what: &str, s: &str) -> CliResult<T> {
    serde_json::from_value(serde_json::Value::String(s.replace('-', "_")))
        .map_err(|_| CliError::Config(format!("unknown {what} '{s}'")))
}

impl ConfigArgs {
    fn resolve(self) -> CliResult<SweepConfig> {
        let mut c = match &self.config {
            Some(path) => SweepConfig::from_file(path)?,
            None => SweepConfig::default(),
        };
        if let Some(s) = self.channel {
            c.channel = s.parse::<ChannelKind>()?;
        }
        if let Some(p) = self.p {
            c.p = p;
            c.p_list = None;
        }
        if self.p_list.is_some() {
            c.p_list = self.p_list;
        }
        macro_rules! set {
            ($($flag:ident => $($field:ident).+),* $(,)?) => {
                $(if let Some(v) = self.$flag { c.$($field).+ = v; })*
            };
        }
        set!(
            r0 => gamma0.r, theta0 => gamma0.theta, phi0 => gamma0.phi, dr => dr,
            dtheta_min => dtheta.min, dtheta_max => dtheta.max, dtheta_steps => dtheta.steps,
            dphi_min => dphi.min, dphi_max => dphi.max, dphi_steps => dphi.steps,
            level => level, deltas => deltas, samples => samples, seed => seed,
            sampling => sampling, reference => reference,
            single_qubit_offset => single_qubit_offset,
        );
        if let Some(s) = self.dilation {
            c.dilation = parse_enum::<DilationMethod>("dilation", &s)?;
        }
        if let Some(s) = self.erm_mode {
            c.erm_mode = parse_enum::<ErmMode>("residual-motion mode", &s)?;
        }
        if self.output.is_some() {
            c.output = self.output;
        }
        c.validate()?;
        Ok(c)
    }
}

fn write_or_print(path: Option<&Path>, contents: &str) -> CliResult<()> {
    match path {
        Some(p) => std::fs::write(p, contents).map_err(|source| CliError::Io {
            path: p.to_path_buf(),
            source,
        }),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

fn print_json<T: serde::Serialize>(v: &T) {
    println!("{}", serde_json::to_string(v).expect("summary serializes"));
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Build { cfg, emit } => {
            let cfg = cfg.resolve()?;
            for a in build(&cfg, emit)? {
                let path = match (&cfg.output, a.suffix) {
                    (Some(p), Some(ext)) => Some(p.with_extension(ext)),
                    (Some(p), None) => Some(p.clone()),
                    // Secondary artifacts need a file to go to.
                    (None, Some(_)) => continue,
                    (None, None) => None,
                };
                write_or_print(path.as_deref(), &a.contents)?;
            }
            Ok(())
        }
        Command::Sweep(SweepKind::Prior(args)) => {
            let cfg = args.cfg.resolve()?;
            let sweeps = with_workers(args.workers, || sweep_prior(&cfg))??;
            for s in &sweeps {
                match cfg.output_for(s.config.p) {
                    Some(path) => {
                        write_or_print(Some(&path), &s.to_csv())?;
                        write_or_print(Some(&path.with_extension("contour.csv")), &s.contour_csv())?;
                        print_json(&s.summary());
                    }
                    None => write_or_print(None, &s.to_csv())?,
                }
            }
            Ok(())
        }
        Command::Sweep(SweepKind::Threshold(args)) => {
            let cfg = args.cfg.resolve()?;
            let sweeps = with_workers(args.workers, || sweep_threshold(&cfg))??;
            for s in &sweeps {
                match cfg.output_for(s.config.p) {
                    Some(path) => {
                        write_or_print(Some(&path), &s.to_csv())?;
                        print_json(&s.summary());
                    }
                    None => write_or_print(None, &s.to_csv())?,
                }
            }
            Ok(())
        }
        Command::Verify { inject, workers } => {
            let report = with_workers(workers, || run_verify(&inject))?;
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            if report.passed {
                Ok(())
            } else {
                let failed: Vec<_> = report.suites.iter().filter(|s| !s.passed).map(|s| s.name).collect();
                Err(CliError::Invariant(format!("failed suites: {}", failed.join(", "))))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("petz: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
