//! Command-line driver: simulation, sweeps, table reproduction, disorder
//! scans, and peak detection with reproducible file outputs.
//!
//! Exit codes: 0 success, 1 computation failure, 2 usage/configuration error.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{CmdError, CmdResult};
use config::{
    dump_config, load_config, CouplingKind, DisorderConfig, EvolveConfig, OutputFormat,
    PeakCommandConfig, ScanStaticConfig, ScenarioKind, SignKind, SweepConfig, TableConfig,
    WhichDelta,
};

#[derive(Parser)]
#[command(
    name = "spinchain",
    version,
    about = "Quantum state transfer through XX spin chains with alternating boundary couplings"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan a static boundary coupling and rate each value against the
    /// uniform chain.
    ScanStatic(ScanStaticArgs),
    /// Write fidelity-vs-time series for static, driven, and/or effective
    /// evolutions.
    Evolve(EvolveArgs),
    /// Search the (omega, eta) grid for the best driven-protocol fidelity.
    Sweep(SweepArgs),
    /// Recompute a published optimal-protocol table and compare.
    Table(TableArgs),
    /// Scan Bob-side coupling deviations around an optimized protocol.
    Disorder(DisorderArgs),
    /// Detect the first-arrival peak of a saved fidelity series.
    Peak(PeakArgs),
}

#[derive(Args)]
struct CommonIo {
    /// Load defaults from a JSON config file (flags override it).
    #[arg(long, global = false)]
    config: Option<PathBuf>,
    /// Write the fully merged configuration to this path, then run.
    #[arg(long)]
    dump_config: Option<PathBuf>,
    /// Output directory for generated files.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Data-file format (the sweep summary is always JSON).
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Worker threads for parallel scans; defaults to all cores.
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct ScenarioFlags {
    /// Transfer scenario: single-qubit (site 1 -> N) or bell (sites 1,2 -> N-1,N).
    #[arg(long, value_enum)]
    scenario: Option<ScenarioKind>,
    /// Polar angle of the single-qubit input state (radians, default pi).
    #[arg(long)]
    theta: Option<f64>,
    /// Azimuthal phase of the single-qubit input state (radians, default 0).
    #[arg(long)]
    phi: Option<f64>,
    /// Bell-state sign (default plus).
    #[arg(long, value_enum)]
    bell_sign: Option<SignKind>,
}

impl ScenarioFlags {
    fn apply(&self, target: &mut config::ScenarioConfig) {
        if let Some(v) = self.scenario {
            target.kind = v;
        }
        if let Some(v) = self.theta {
            target.theta = v;
        }
        if let Some(v) = self.phi {
            target.phi = v;
        }
        if let Some(v) = self.bell_sign {
            target.bell_sign = v;
        }
    }
}

#[derive(Args)]
struct WindowFlags {
    /// Scan horizon (default 2N).
    #[arg(long)]
    tau_max: Option<f64>,
    /// Sample spacing of the fidelity series (default 0.01).
    #[arg(long)]
    dtau: Option<f64>,
    /// First-arrival threshold as a fraction of the window maximum
    /// (default 0.5).
    #[arg(long)]
    threshold_fraction: Option<f64>,
}

impl WindowFlags {
    fn apply(&self, target: &mut config::WindowConfig) {
        if let Some(v) = self.tau_max {
            target.tau_max = Some(v);
        }
        if let Some(v) = self.dtau {
            target.dtau = v;
        }
        if let Some(v) = self.threshold_fraction {
            target.threshold_fraction = v;
        }
    }
}

#[derive(Args)]
struct ScanStaticArgs {
    #[command(flatten)]
    scenario: ScenarioFlags,
    /// Chain length.
    #[arg(long)]
    n: Option<usize>,
    /// Which boundary coupling to scan; the other stays at 1.
    #[arg(long, value_enum)]
    coupling: Option<CouplingKind>,
    #[arg(long)]
    from: Option<f64>,
    #[arg(long)]
    to: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    #[command(flatten)]
    window: WindowFlags,
    #[command(flatten)]
    io: CommonIo,
}

#[derive(Args)]
struct EvolveArgs {
    #[command(flatten)]
    scenario: ScenarioFlags,
    #[arg(long)]
    n: Option<usize>,
    /// Emit the static-chain series (couplings --alpha/--beta).
    #[arg(long = "static")]
    static_run: bool,
    /// Emit the driven-protocol series (pair + --omega/--eta).
    #[arg(long)]
    driven: bool,
    /// Emit the effective-chain series of the driven protocol.
    #[arg(long)]
    effective: bool,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    alpha1: Option<f64>,
    #[arg(long)]
    alpha2: Option<f64>,
    #[arg(long)]
    beta1: Option<f64>,
    #[arg(long)]
    beta2: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    /// Bob-side relative deviation of the boundary coupling.
    #[arg(long, allow_hyphen_values = true)]
    delta_alpha: Option<f64>,
    /// Bob-side relative deviation of the near-boundary coupling.
    #[arg(long, allow_hyphen_values = true)]
    delta_beta: Option<f64>,
    /// Also dump the final amplitude state of each evolution.
    #[arg(long)]
    dump_state: bool,
    #[command(flatten)]
    window: WindowFlags,
    #[command(flatten)]
    io: CommonIo,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    scenario: ScenarioFlags,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alpha1: Option<f64>,
    #[arg(long)]
    alpha2: Option<f64>,
    #[arg(long)]
    beta1: Option<f64>,
    #[arg(long)]
    beta2: Option<f64>,
    #[arg(long)]
    omega_from: Option<f64>,
    #[arg(long)]
    omega_to: Option<f64>,
    #[arg(long)]
    omega_step: Option<f64>,
    #[arg(long)]
    eta_from: Option<f64>,
    #[arg(long)]
    eta_to: Option<f64>,
    #[arg(long)]
    eta_step: Option<f64>,
    /// Threshold fraction used to score the driven curves (default 1.0,
    /// the window maximum).
    #[arg(long)]
    driven_threshold_fraction: Option<f64>,
    #[command(flatten)]
    window: WindowFlags,
    #[command(flatten)]
    io: CommonIo,
}

#[derive(Args)]
struct TableArgs {
    /// Table number: 1, 2, or 3.
    #[arg(long)]
    id: Option<u32>,
    #[arg(long)]
    omega_step: Option<f64>,
    #[arg(long)]
    eta_step: Option<f64>,
    /// Sample spacing inside the sweep stage.
    #[arg(long)]
    sweep_dtau: Option<f64>,
    /// Refine around the sweep argmax at 0.01 steps.
    #[arg(long)]
    refine: bool,
    #[command(flatten)]
    io: CommonIo,
}

#[derive(Args)]
struct DisorderArgs {
    #[command(flatten)]
    scenario: ScenarioFlags,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    alpha1: Option<f64>,
    #[arg(long)]
    alpha2: Option<f64>,
    #[arg(long)]
    beta1: Option<f64>,
    #[arg(long)]
    beta2: Option<f64>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    /// Which Bob-side deviation to vary.
    #[arg(long, value_enum)]
    which: Option<WhichDelta>,
    #[arg(long, allow_hyphen_values = true)]
    from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    to: Option<f64>,
    #[arg(long)]
    step: Option<f64>,
    /// Deviation pair "da,db" for a full time-series export (repeatable).
    #[arg(long = "series-pair", allow_hyphen_values = true)]
    series_pairs: Vec<String>,
    #[command(flatten)]
    window: WindowFlags,
    #[command(flatten)]
    io: CommonIo,
}

#[derive(Args)]
struct PeakArgs {
    /// CSV fidelity series (tau,fidelity) to analyze.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    threshold_fraction: Option<f64>,
    /// Also write the peak JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Load defaults from a JSON config file (flags override it).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Write the fully merged configuration to this path, then run.
    #[arg(long)]
    dump_config: Option<PathBuf>,
}

fn merged_config<T: serde::de::DeserializeOwned + Default>(
    path: &Option<PathBuf>,
) -> std::result::Result<T, CmdError> {
    match path {
        Some(p) => load_config(p).map_err(CmdError::Config),
        None => Ok(T::default()),
    }
}

fn maybe_dump<T: serde::Serialize>(
    cfg: &T,
    path: &Option<PathBuf>,
) -> std::result::Result<(), CmdError> {
    if let Some(p) = path {
        dump_config(cfg, p).map_err(CmdError::Config)?;
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn apply_io(cfg_out: &mut PathBuf, cfg_fmt: &mut OutputFormat, io: &CommonIo) {
    if let Some(v) = &io.out_dir {
        *cfg_out = v.clone();
    }
    if let Some(v) = io.format {
        *cfg_fmt = v;
    }
}

fn parse_pair(text: &str) -> std::result::Result<(f64, f64), CmdError> {
    let err = || {
        CmdError::Config(anyhow::anyhow!(
            "bad --series-pair '{text}': expected 'da,db'"
        ))
    };
    let (a, b) = text.split_once(',').ok_or_else(err)?;
    Ok((
        a.trim().parse().map_err(|_| err())?,
        b.trim().parse().map_err(|_| err())?,
    ))
}

fn dispatch(cli: Cli) -> CmdResult {
    match cli.command {
        Command::ScanStatic(args) => {
            let mut cfg: ScanStaticConfig = merged_config(&args.io.config)?;
            args.scenario.apply(&mut cfg.scenario);
            args.window.apply(&mut cfg.window);
            if let Some(v) = args.n {
                cfg.n = v;
            }
            if let Some(v) = args.coupling {
                cfg.coupling = v;
            }
            if let Some(v) = args.from {
                cfg.from = v;
            }
            if let Some(v) = args.to {
                cfg.to = v;
            }
            if let Some(v) = args.step {
                cfg.step = v;
            }
            apply_io(&mut cfg.out_dir, &mut cfg.format, &args.io);
            if let Some(v) = args.io.jobs {
                cfg.jobs = Some(v);
            }
            maybe_dump(&cfg, &args.io.dump_config)?;
            commands::cmd_scan_static(cfg)
        }
        Command::Evolve(args) => {
            let mut cfg: EvolveConfig = merged_config(&args.io.config)?;
            args.scenario.apply(&mut cfg.scenario);
            args.window.apply(&mut cfg.window);
            if let Some(v) = args.n {
                cfg.n = v;
            }
            cfg.static_run |= args.static_run;
            cfg.driven |= args.driven;
            cfg.effective |= args.effective;
            cfg.dump_state |= args.dump_state;
            for (flag, field) in [
                (args.alpha, &mut cfg.alpha),
                (args.beta, &mut cfg.beta),
                (args.alpha1, &mut cfg.alpha1),
                (args.alpha2, &mut cfg.alpha2),
                (args.beta1, &mut cfg.beta1),
                (args.beta2, &mut cfg.beta2),
                (args.delta_alpha, &mut cfg.delta_alpha),
                (args.delta_beta, &mut cfg.delta_beta),
            ] {
                if let Some(v) = flag {
                    *field = v;
                }
            }
            if let Some(v) = args.omega {
                cfg.omega = Some(v);
            }
            if let Some(v) = args.eta {
                cfg.eta = Some(v);
            }
            apply_io(&mut cfg.out_dir, &mut cfg.format, &args.io);
            maybe_dump(&cfg, &args.io.dump_config)?;
            commands::cmd_evolve(cfg)
        }
        Command::Sweep(args) => {
            let mut cfg: SweepConfig = merged_config(&args.io.config)?;
            args.scenario.apply(&mut cfg.scenario);
            args.window.apply(&mut cfg.window);
            if let Some(v) = args.n {
                cfg.n = v;
            }
            for (flag, field) in [
                (args.alpha1, &mut cfg.alpha1),
                (args.alpha2, &mut cfg.alpha2),
                (args.beta1, &mut cfg.beta1),
                (args.beta2, &mut cfg.beta2),
                (args.omega_step, &mut cfg.omega_step),
                (args.eta_from, &mut cfg.eta_from),
                (args.eta_to, &mut cfg.eta_to),
                (args.eta_step, &mut cfg.eta_step),
                (
                    args.driven_threshold_fraction,
                    &mut cfg.driven_threshold_fraction,
                ),
            ] {
                if let Some(v) = flag {
                    *field = v;
                }
            }
            if let Some(v) = args.omega_from {
                cfg.omega_from = Some(v);
            }
            if let Some(v) = args.omega_to {
                cfg.omega_to = Some(v);
            }
            apply_io(&mut cfg.out_dir, &mut cfg.format, &args.io);
            if let Some(v) = args.io.jobs {
                cfg.jobs = Some(v);
            }
            maybe_dump(&cfg, &args.io.dump_config)?;
            commands::cmd_sweep(cfg)
        }
        Command::Table(args) => {
            let mut cfg: TableConfig = merged_config(&args.io.config)?;
            if let Some(v) = args.id {
                cfg.id = v;
            }
            for (flag, field) in [
                (args.omega_step, &mut cfg.omega_step),
                (args.eta_step, &mut cfg.eta_step),
                (args.sweep_dtau, &mut cfg.sweep_dtau),
            ] {
                if let Some(v) = flag {
                    *field = v;
                }
            }
            cfg.refine |= args.refine;
            apply_io(&mut cfg.out_dir, &mut cfg.format, &args.io);
            if let Some(v) = args.io.jobs {
                cfg.jobs = Some(v);
            }
            maybe_dump(&cfg, &args.io.dump_config)?;
            commands::cmd_table(cfg)
        }
        Command::Disorder(args) => {
            let mut cfg: DisorderConfig = merged_config(&args.io.config)?;
            args.scenario.apply(&mut cfg.scenario);
            args.window.apply(&mut cfg.window);
            if let Some(v) = args.n {
                cfg.n = v;
            }
            for (flag, field) in [
                (args.alpha1, &mut cfg.alpha1),
                (args.alpha2, &mut cfg.alpha2),
                (args.beta1, &mut cfg.beta1),
                (args.beta2, &mut cfg.beta2),
                (args.omega, &mut cfg.omega),
                (args.eta, &mut cfg.eta),
                (args.from, &mut cfg.from),
                (args.to, &mut cfg.to),
                (args.step, &mut cfg.step),
            ] {
                if let Some(v) = flag {
                    *field = v;
                }
            }
            if let Some(v) = args.which {
                cfg.which = v;
            }
            if !args.series_pairs.is_empty() {
                cfg.series_pairs = args
                    .series_pairs
                    .iter()
                    .map(|s| parse_pair(s))
                    .collect::<std::result::Result<_, _>>()?;
            }
            apply_io(&mut cfg.out_dir, &mut cfg.format, &args.io);
            if let Some(v) = args.io.jobs {
                cfg.jobs = Some(v);
            }
            maybe_dump(&cfg, &args.io.dump_config)?;
            commands::cmd_disorder(cfg)
        }
        Command::Peak(args) => {
            let mut cfg: PeakCommandConfig = merged_config(&args.config)?;
            if let Some(v) = args.input {
                cfg.input = Some(v);
            }
            if let Some(v) = args.threshold_fraction {
                cfg.threshold_fraction = v;
            }
            if let Some(v) = args.out {
                cfg.out = Some(v);
            }
            maybe_dump(&cfg, &args.dump_config)?;
            commands::cmd_peak(cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CmdError::Config(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(CmdError::Compute(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
