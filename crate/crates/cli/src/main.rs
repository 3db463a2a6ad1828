//! `g2flow`: identity suites and Laplacian-type flows of left-invariant
//! G₂-structures.
//!
//! Exit codes: 0 on success (including runs halted by blow-up), 1 on
//! configuration errors or a non-positive initial 3-form, 2 when a suite
//! residual exceeds its tolerance.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use g2flow_cli::config::{parse_flow_kind, Overrides, PresetSource, RunConfig, Suite, SweepConfig};
use g2flow_cli::error::{CliError, Status};
use g2flow_cli::runner::{execute, execute_sweep, status_of};

#[derive(Debug, Parser)]
#[command(name = "g2flow", version, about = "Torsion identities and Laplacian-type flows of invariant G2-structures")]
struct Args {
    /// Named preset: flat7, heisenberg7 or almost_abelian_a.
    #[arg(long)]
    preset: Option<String>,
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Flow to integrate: laplacian, coflow+, coflow-, modified or dstar-d.
    #[arg(long, value_parser = parse_flow)]
    flow: Option<g2flow_core::FlowKind>,
    /// Constant of the modified coflow.
    #[arg(long = "A", value_name = "A", allow_negative_numbers = true)]
    a: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    #[arg(long = "t-max", allow_negative_numbers = true)]
    t_max: Option<f64>,
    /// Record monitors every N steps.
    #[arg(long = "monitor-every", value_name = "N")]
    monitor_every: Option<usize>,
    /// Comma-separated suites: identity, coclosed, laplacian_crosscheck,
    /// evolution_crosscheck, or all.
    #[arg(long, value_name = "LIST")]
    suites: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a plotting script next to the trace.
    #[arg(long = "emit-plots")]
    emit_plots: bool,
    /// Run every configuration of a sweep file in parallel.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["config", "preset"])]
    sweep: Option<PathBuf>,
}

fn parse_flow(s: &str) -> Result<g2flow_core::FlowKind, String> {
    parse_flow_kind(s).map_err(|e| e.to_string())
}

fn build_config(args: &Args) -> Result<RunConfig, CliError> {
    let base = match (&args.config, &args.preset) {
        (Some(path), _) => RunConfig::load(path)?,
        (None, Some(name)) => RunConfig::new(PresetSource::Named(name.clone())),
        (None, None) => return Err(CliError::Config("one of --preset, --config or --sweep is required".into())),
    };
    let overrides = Overrides {
        preset: args.preset.clone(),
        flow: args.flow,
        a: args.a,
        dt: args.dt,
        t_max: args.t_max,
        monitor_every: args.monitor_every,
        suites: args.suites.as_deref().map(Suite::parse_list).transpose()?,
        out: args.out.clone(),
        emit_plots: args.emit_plots,
    };
    let config = overrides.apply(base)?;
    if config.suites.is_empty() && config.flow.is_none() {
        return Err(CliError::Config("nothing to do: give --suites and/or --flow".into()));
    }
    Ok(config)
}

fn run(args: &Args) -> Status {
    if let Some(path) = &args.sweep {
        let result = SweepConfig::load(path).and_then(|sweep| {
            let root = args.out.clone().unwrap_or_else(|| sweep.output_dir.clone());
            execute_sweep(&sweep, &root)
        });
        return status_of(result, "sweep");
    }
    status_of(build_config(args).and_then(|c| execute(&c)), "g2flow")
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            // Usage errors are configuration errors; exit code 2 is reserved
            // for tolerance failures.
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Status::ConfigError.code() as u8 } else { 0 });
        }
    };
    ExitCode::from(run(&args).code() as u8)
}
