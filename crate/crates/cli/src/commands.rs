//! Subcommand implementations.
//!
//! Each command runs in two phases: validation (bad configuration exits 2)
//! and computation (failures exit 1). Output files are written with fixed
//! formatting and deterministic ordering, so identical invocations produce
//! byte-identical artifacts.

use anyhow::{anyhow, Context, Result};
use serde_json::json;
use spinchain::fidelity::{fidelity_series, first_arrival_peak, FidelitySeries, PeakConfig};
use spinchain::grid::linspace_inclusive;
use spinchain::parrondo::{
    evaluate_protocol, reproduce_table, static_scan, sweep, table_to_csv, StaticScanPoint,
    TableId, TableOptions, TableRow,
};
use spinchain::propagator::{effective_spec, DriveProtocol, Evolver};
use spinchain::{disorder_scan, disorder_time_series, ChainSpec, ParrondoConfig, SweepGrid};

use crate::config::{
    DisorderConfig, EvolveConfig, OutputFormat, PeakCommandConfig, ScanStaticConfig, SweepConfig,
    TableConfig,
};
use crate::output::{ensure_out_dir, num, with_pool, write_json, write_text};

/// Distinguishes exit code 2 (configuration) from exit code 1 (computation).
#[derive(Debug)]
pub enum CmdError {
    Config(anyhow::Error),
    Compute(anyhow::Error),
}

pub type CmdResult = std::result::Result<(), CmdError>;

trait Phase<T> {
    fn config_err(self) -> std::result::Result<T, CmdError>;
    fn compute_err(self) -> std::result::Result<T, CmdError>;
}

impl<T, E: Into<anyhow::Error>> Phase<T> for std::result::Result<T, E> {
    fn config_err(self) -> std::result::Result<T, CmdError> {
        self.map_err(|e| CmdError::Config(e.into()))
    }

    fn compute_err(self) -> std::result::Result<T, CmdError> {
        self.map_err(|e| CmdError::Compute(e.into()))
    }
}

fn series_json(series: &FidelitySeries) -> serde_json::Value {
    let rows: Vec<_> = series
        .taus()
        .iter()
        .zip(series.values())
        .map(|(t, v)| json!({"tau": num(*t), "fidelity": num(*v)}))
        .collect();
    json!(rows)
}

fn write_series(
    dir: &std::path::Path,
    stem: &str,
    format: OutputFormat,
    series: &FidelitySeries,
) -> Result<()> {
    match format {
        OutputFormat::Csv => write_text(dir, &format!("{stem}.csv"), &series.to_csv())?,
        OutputFormat::Json => write_json(dir, &format!("{stem}.json"), &series_json(series))?,
    };
    Ok(())
}

// --- scan-static ------------------------------------------------------------

pub fn cmd_scan_static(mut cfg: ScanStaticConfig) -> CmdResult {
    let scenario = cfg.scenario.build().config_err()?;
    if cfg.from > cfg.to {
        return Err(CmdError::Config(anyhow!(
            "empty scan range: from = {} exceeds to = {}",
            cfg.from,
            cfg.to
        )));
    }
    if cfg.from <= 0.0 || !cfg.step.is_finite() || cfg.step <= 0.0 {
        return Err(CmdError::Config(anyhow!(
            "scanned couplings must be positive with a positive step"
        )));
    }
    let peak_config = cfg.window.resolve(cfg.n).config_err()?;
    ensure_out_dir(&cfg.out_dir).config_err()?;

    let values = linspace_inclusive(cfg.from, cfg.to, cfg.step);
    let points: Vec<StaticScanPoint> = with_pool(cfg.jobs, || {
        static_scan(&scenario, cfg.n, cfg.coupling.into(), &values, &peak_config)
    })
    .config_err()?
    .compute_err()?;

    match cfg.format {
        OutputFormat::Csv => {
            write_text(
                &cfg.out_dir,
                "static_scan.csv",
                &spinchain::parrondo::static_scan_to_csv(&points),
            )
            .compute_err()?;
        }
        OutputFormat::Json => {
            let rows: Vec<_> = points
                .iter()
                .map(|p| {
                    json!({
                        "coupling": num(p.coupling_value),
                        "f_peak": num(p.f_peak),
                        "ratio": num(p.ratio),
                    })
                })
                .collect();
            write_json(&cfg.out_dir, "static_scan.json", &json!(rows)).compute_err()?;
        }
    }
    println!("scanned {} couplings", points.len());
    Ok(())
}

// --- evolve -------------------------------------------------------------------

pub fn cmd_evolve(mut cfg: EvolveConfig) -> CmdResult {
    let scenario = cfg.scenario.build().config_err()?;
    if !(cfg.static_run || cfg.driven || cfg.effective) {
        return Err(CmdError::Config(anyhow!(
            "nothing to do: pass at least one of --static, --driven, --effective"
        )));
    }
    let peak_config = cfg.window.resolve(cfg.n).config_err()?;
    ensure_out_dir(&cfg.out_dir).config_err()?;

    let mut runs: Vec<(&str, Evolver)> = Vec::new();
    if cfg.static_run {
        let spec =
            ChainSpec::with_deviations(cfg.n, cfg.alpha, cfg.beta, cfg.delta_alpha, cfg.delta_beta)
                .config_err()?;
        runs.push(("static", Evolver::from_spec(&spec).compute_err()?));
    }
    if cfg.driven || cfg.effective {
        let (omega, eta) = match (cfg.omega, cfg.eta) {
            (Some(w), Some(e)) => (w, e),
            _ => {
                return Err(CmdError::Config(anyhow!(
                    "driven/effective evolution requires --omega and --eta"
                )))
            }
        };
        let spec1 = ChainSpec::with_deviations(
            cfg.n,
            cfg.alpha1,
            cfg.beta1,
            cfg.delta_alpha,
            cfg.delta_beta,
        )
        .config_err()?;
        let spec2 = ChainSpec::with_deviations(
            cfg.n,
            cfg.alpha2,
            cfg.beta2,
            cfg.delta_alpha,
            cfg.delta_beta,
        )
        .config_err()?;
        let protocol = DriveProtocol::new(spec1, spec2, omega, eta).config_err()?;
        if cfg.driven {
            runs.push(("driven", Evolver::from_protocol(&protocol).compute_err()?));
        }
        if cfg.effective {
            let eff = effective_spec(&protocol).config_err()?;
            runs.push(("effective", Evolver::from_spec(&eff).compute_err()?));
        }
    }

    for (kind, evolver) in &runs {
        let series = fidelity_series(evolver, &scenario, &peak_config).compute_err()?;
        write_series(&cfg.out_dir, &format!("series_{kind}"), cfg.format, &series)
            .compute_err()?;
        if cfg.dump_state {
            let state = scenario.initial_state(cfg.n);
            let final_state = evolver
                .propagate(&state, peak_config.tau_max())
                .compute_err()?;
            write_text(
                &cfg.out_dir,
                &format!("state_{kind}.csv"),
                &final_state.to_csv(),
            )
            .compute_err()?;
        }
    }
    Ok(())
}

// --- sweep --------------------------------------------------------------------

pub fn cmd_sweep(mut cfg: SweepConfig) -> CmdResult {
    let scenario = cfg.scenario.build().config_err()?;
    let (omega_from, omega_to) = cfg.resolve_omega_range();
    let grid = SweepGrid::new(
        omega_from,
        omega_to,
        cfg.omega_step,
        cfg.eta_from,
        cfg.eta_to,
        cfg.eta_step,
    )
    .config_err()?;
    let peak_config = cfg.window.resolve(cfg.n).config_err()?;
    let config =
        ParrondoConfig::new(peak_config, cfg.driven_threshold_fraction).config_err()?;
    let spec1 = ChainSpec::new(cfg.n, cfg.alpha1, cfg.beta1).config_err()?;
    let spec2 = ChainSpec::new(cfg.n, cfg.alpha2, cfg.beta2).config_err()?;
    ensure_out_dir(&cfg.out_dir).config_err()?;

    let result = with_pool(cfg.jobs, || {
        sweep(&spec1, &spec2, &grid, &scenario, &config)
    })
    .config_err()?
    .compute_err()?;

    match cfg.format {
        OutputFormat::Csv => {
            write_text(&cfg.out_dir, "sweep_grid.csv", &result.grid_csv()).compute_err()?;
        }
        OutputFormat::Json => {
            let rows: Vec<_> = result
                .records()
                .iter()
                .map(|r| json!({"omega": num(r.omega), "eta": num(r.eta), "f_p": num(r.f_p)}))
                .collect();
            write_json(&cfg.out_dir, "sweep_grid.json", &json!(rows)).compute_err()?;
        }
    }

    let best = *result.best();
    let protocol =
        DriveProtocol::new(spec1, spec2, best.omega, best.eta).compute_err()?;
    let outcome = evaluate_protocol(&protocol, &scenario, &config).compute_err()?;
    let summary = json!({
        "best": {"omega": num(best.omega), "eta": num(best.eta), "f_p": num(best.f_p)},
        "f_h1": num(outcome.f_h1),
        "f_h2": num(outcome.f_h2),
        "f_0": num(outcome.f_0),
        "f_p": num(outcome.f_p),
        "is_parrondo": outcome.is_parrondo,
        "failed_points": result.failures().len(),
    });
    write_json(&cfg.out_dir, "sweep_summary.json", &summary).compute_err()?;
    println!(
        "best f_p = {} at (omega = {}, eta = {}), parrondo = {}",
        spinchain::format::sig6(best.f_p),
        spinchain::format::sig6(best.omega),
        spinchain::format::sig6(best.eta),
        outcome.is_parrondo
    );
    Ok(())
}

// --- table ----------------------------------------------------------------------

fn table_json(id: TableId, rows: &[TableRow]) -> serde_json::Value {
    let rows: Vec<_> = rows
        .iter()
        .map(|r| {
            let mut obj = json!({
                "coupling1": num(r.coupling1),
                "coupling2": num(r.coupling2),
                "f_0": num(r.f_0),
                "f_h1": num(r.f_h1),
                "f_h2": num(r.f_h2),
                "omega": num(r.best_omega),
                "eta": num(r.best_eta),
                "f_p": num(r.f_p),
                "f_p_at_published": num(r.f_p_at_published),
                "f_p_published": num(r.published.f_p),
            });
            if id != TableId::Three {
                obj["n"] = json!(r.n);
            }
            obj
        })
        .collect();
    json!(rows)
}

pub fn cmd_table(cfg: TableConfig) -> CmdResult {
    let id = TableId::from_number(cfg.id)
        .map_err(|_| CmdError::Config(anyhow!("unknown table: {}", cfg.id)))?;
    let options = TableOptions {
        omega_step: cfg.omega_step,
        eta_step: cfg.eta_step,
        sweep_dtau: cfg.sweep_dtau,
        refine: cfg.refine,
    };
    // vet the grid/step parameters before the long run
    SweepGrid::new(0.5, 3.5, cfg.omega_step, 0.0, 1.0, cfg.eta_step).config_err()?;
    PeakConfig::new(20.0, cfg.sweep_dtau, 0.5).config_err()?;
    ensure_out_dir(&cfg.out_dir).config_err()?;

    let rows = with_pool(cfg.jobs, || reproduce_table(id, &options))
        .config_err()?
        .compute_err()?;
    match cfg.format {
        OutputFormat::Csv => {
            write_text(
                &cfg.out_dir,
                &format!("table{}.csv", cfg.id),
                &table_to_csv(id, &rows),
            )
            .compute_err()?;
        }
        OutputFormat::Json => {
            write_json(
                &cfg.out_dir,
                &format!("table{}.json", cfg.id),
                &table_json(id, &rows),
            )
            .compute_err()?;
        }
    }
    println!("reproduced table {} ({} rows)", cfg.id, rows.len());
    Ok(())
}

// --- disorder ---------------------------------------------------------------------

pub fn cmd_disorder(mut cfg: DisorderConfig) -> CmdResult {
    let scenario = cfg.scenario.build().config_err()?;
    let peak_config = cfg.window.resolve(cfg.n).config_err()?;
    let config = ParrondoConfig::new(
        peak_config,
        ParrondoConfig::DEFAULT_DRIVEN_THRESHOLD_FRACTION,
    )
    .config_err()?;
    let spec1 = ChainSpec::new(cfg.n, cfg.alpha1, cfg.beta1).config_err()?;
    let spec2 = ChainSpec::new(cfg.n, cfg.alpha2, cfg.beta2).config_err()?;
    let protocol = DriveProtocol::new(spec1, spec2, cfg.omega, cfg.eta).config_err()?;

    // endpoint deviations must keep couplings positive, and the grid must
    // contain the clean point
    for delta in [cfg.from, cfg.to] {
        let (da, db) = match cfg.which {
            crate::config::WhichDelta::DeltaAlpha => (delta, 0.0),
            crate::config::WhichDelta::DeltaBeta => (0.0, delta),
        };
        protocol
            .spec1()
            .replacing_deviations(da, db)
            .and_then(|_| protocol.spec2().replacing_deviations(da, db))
            .config_err()?;
    }
    if !(cfg.from <= 0.0 && cfg.to >= 0.0) {
        return Err(CmdError::Config(anyhow!(
            "deviation range must contain delta = 0"
        )));
    }
    for (da, db) in &cfg.series_pairs {
        protocol
            .spec1()
            .replacing_deviations(*da, *db)
            .config_err()?;
    }
    ensure_out_dir(&cfg.out_dir).config_err()?;

    let scan = with_pool(cfg.jobs, || {
        disorder_scan(
            &protocol,
            &scenario,
            cfg.which.into(),
            (cfg.from, cfg.to),
            cfg.step,
            &config,
        )
    })
    .config_err()?
    .compute_err()?;

    let which_name = match cfg.which {
        crate::config::WhichDelta::DeltaAlpha => "delta_alpha",
        crate::config::WhichDelta::DeltaBeta => "delta_beta",
    };
    match cfg.format {
        OutputFormat::Csv => {
            write_text(
                &cfg.out_dir,
                &format!("disorder_scan_{which_name}.csv"),
                &scan.to_csv(),
            )
            .compute_err()?;
        }
        OutputFormat::Json => {
            let rows: Vec<_> = scan
                .points()
                .iter()
                .map(|p| json!({"delta": num(p.delta), "f_peak": num(p.f_peak)}))
                .collect();
            let value = json!({"baseline": num(scan.baseline()), "points": rows});
            write_json(
                &cfg.out_dir,
                &format!("disorder_scan_{which_name}.json"),
                &value,
            )
            .compute_err()?;
        }
    }

    if !cfg.series_pairs.is_empty() {
        let series =
            disorder_time_series(&protocol, &scenario, &cfg.series_pairs, &peak_config)
                .compute_err()?;
        for ((da, db), s) in cfg.series_pairs.iter().zip(&series) {
            let stem = format!("disorder_series_da{da:+.2}_db{db:+.2}");
            write_series(&cfg.out_dir, &stem, cfg.format, s).compute_err()?;
        }
    }
    println!(
        "scanned {} deviations, baseline f_peak = {}",
        scan.points().len(),
        spinchain::format::sig6(scan.baseline())
    );
    Ok(())
}

// --- peak -------------------------------------------------------------------------

pub fn cmd_peak(cfg: PeakCommandConfig) -> CmdResult {
    let input = cfg
        .input
        .as_ref()
        .ok_or_else(|| CmdError::Config(anyhow!("missing --input series file")))?;
    let text = std::fs::read_to_string(input)
        .with_context(|| format!("cannot read {}", input.display()))
        .config_err()?;
    let series = FidelitySeries::from_csv(&text).config_err()?;
    if series.len() < 2 {
        return Err(CmdError::Config(anyhow!("series has fewer than 2 samples")));
    }
    let dtau = series.taus()[1] - series.taus()[0];
    let tau_max = *series.taus().last().expect("non-empty");
    let config = PeakConfig::new(tau_max, dtau, cfg.threshold_fraction).config_err()?;
    let peak = first_arrival_peak(&series, &config).compute_err()?;
    let value = json!({"tau_star": num(peak.tau_star), "f_star": num(peak.f_star)});
    let mut text = serde_json::to_string_pretty(&value).compute_err()?;
    text.push('\n');
    print!("{text}");
    if let Some(out) = &cfg.out {
        std::fs::write(out, &text)
            .with_context(|| format!("cannot write {}", out.display()))
            .compute_err()?;
    }
    Ok(())
}
