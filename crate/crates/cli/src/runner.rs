//! Identity suites, flow runs and sweeps.

use std::fs;
use std::path::Path;
use std::time::Instant;

use g2flow_core::laplacian_flows::{
    assemble_3form, evolution_crosscheck, laplacian_psi_coclosed, ricci_like_monitor, RicciLikeFlags,
};
use g2flow_core::presets::Preset;
use g2flow_core::torsion::{closed_scalar_residual, IDENTITY_TOL};
use g2flow_core::{
    coclosed_identity_suite, identity_suite, integrate, laplacian_direct, laplacian_phi_decomposed, Error,
    FlowKind, FlowSpec, FlowTrace, Geometry, ResidualReport,
};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{RunConfig, Suite, SweepConfig};
use crate::error::{CliError, Status};
use crate::output;

/// Relative tolerance of the Laplacian cross-check.
pub const LAPLACIAN_REL_TOL: f64 = 1e-8;

/// Step and length of the window used by the evolution cross-check suite.
pub const EVOLUTION_WINDOW_DT: f64 = 1e-4;
pub const EVOLUTION_WINDOW_STEPS: usize = 10;

#[derive(Debug, Clone, Serialize)]
pub struct ResidualEntry {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteStatus {
    Passed,
    Failed,
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub status: SuiteStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub entries: Vec<ResidualEntry>,
}

impl SuiteReport {
    fn from_residuals(suite: Suite, rep: &ResidualReport) -> Self {
        let entries: Vec<ResidualEntry> = rep
            .entries
            .iter()
            .map(|r| ResidualEntry {
                name: r.name.clone(),
                residual: r.residual,
                tolerance: r.tolerance,
                passed: r.passed(),
            })
            .collect();
        let status = if entries.iter().all(|e| e.passed) {
            SuiteStatus::Passed
        } else {
            SuiteStatus::Failed
        };
        Self {
            suite: suite.as_str(),
            status,
            note: None,
            entries,
        }
    }

    fn skipped(suite: Suite, note: String) -> Self {
        Self {
            suite: suite.as_str(),
            status: SuiteStatus::Skipped,
            note: Some(note),
            entries: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SuitesReport {
    pub preset: String,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

/// Runs the requested suites on the initial structure of a preset.
pub fn run_suites(preset: &Preset, suites: &[Suite], flow: Option<&FlowSpec>) -> Result<SuitesReport, CliError> {
    let geo = Geometry::new(preset.phi.clone(), &preset.algebra)?;
    let alg = &preset.algebra;
    let mut reports = Vec::new();
    for &suite in suites {
        let report = match suite {
            Suite::Identity => {
                let mut rep = identity_suite(&geo, alg);
                if alg.d_unchecked(geo.g2.phi()).max_abs() < IDENTITY_TOL {
                    rep.push("closed_scalar", closed_scalar_residual(&geo), IDENTITY_TOL);
                }
                SuiteReport::from_residuals(suite, &rep)
            }
            Suite::Coclosed => match coclosed_identity_suite(&geo, alg) {
                Ok(rep) => SuiteReport::from_residuals(suite, &rep),
                Err(Error::NotCoclosed(r)) => SuiteReport::skipped(suite, format!("structure is not co-closed (|dψ| = {r:e})")),
                Err(e) => return Err(e.into()),
            },
            Suite::LaplacianCrosscheck => SuiteReport::from_residuals(suite, &laplacian_crosscheck(&geo, preset)?),
            Suite::EvolutionCrosscheck => {
                let kind = flow.map(|f| f.kind).unwrap_or(FlowKind::LaplacianFlow);
                let mut spec = FlowSpec::new(kind, EVOLUTION_WINDOW_DT, EVOLUTION_WINDOW_DT * EVOLUTION_WINDOW_STEPS as f64);
                if let Some(f) = flow {
                    spec.a = f.a;
                }
                let trace = integrate(&preset.phi, alg, &spec)?;
                SuiteReport::from_residuals(suite, &evolution_crosscheck(&trace, alg)?)
            }
        };
        reports.push(report);
    }
    let passed = reports.iter().all(|r| !matches!(r.status, SuiteStatus::Failed));
    Ok(SuitesReport {
        preset: preset.name.clone(),
        passed,
        suites: reports,
    })
}

fn relative_error(a: &g2flow_core::AltForm, b: &g2flow_core::AltForm) -> f64 {
    let scale = b.max_abs();
    let diff = (a - b).max_abs();
    if scale < 1e-14 {
        diff
    } else {
        diff / scale
    }
}

/// The type decomposition of `Δφ` (and of `Δψ` when co-closed) against the
/// direct `dd* + d*d` evaluation, plus the trace identity for `h`.
fn laplacian_crosscheck(geo: &Geometry, preset: &Preset) -> Result<ResidualReport, CliError> {
    let alg = &preset.algebra;
    let mut rep = ResidualReport::default();
    let direct = laplacian_direct(geo.g2.phi(), &geo.g2, alg);
    let (x, h) = laplacian_phi_decomposed(geo);
    rep.push(
        "laplacian_phi_decomposition",
        relative_error(&assemble_3form(&x, &h, &geo.g2), &direct),
        LAPLACIAN_REL_TOL,
    );
    let trace = 2.0 / 3.0 * geo.curvature.scal + 4.0 / 3.0 * geo.norm_t_sq();
    rep.push("laplacian_h_trace", (geo.metric().trace(&h) - trace).abs(), IDENTITY_TOL);
    match laplacian_psi_coclosed(geo, alg) {
        Ok((x, s)) => {
            let direct = laplacian_direct(geo.g2.psi(), &geo.g2, alg);
            let assembled = geo.g2.star(&assemble_3form(&x, &s, &geo.g2));
            rep.push("laplacian_psi_decomposition", relative_error(&assembled, &direct), LAPLACIAN_REL_TOL);
        }
        Err(Error::NotCoclosed(_)) => {}
        Err(e) => return Err(e.into()),
    }
    Ok(rep)
}

#[derive(Debug, Clone, Serialize)]
pub struct FinalResiduals {
    pub identity_max: f64,
    pub dpsi_residual: f64,
    pub coclass_drift: f64,
    pub rhs_closedness: f64,
    pub max_dpsi_residual: f64,
    pub max_coclass_drift: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub wall_time_seconds: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlowSummary {
    pub preset: String,
    pub flow: FlowSpec,
    pub halt_reason: &'static str,
    pub final_t: f64,
    pub steps: usize,
    pub samples: usize,
    pub final_residuals: FinalResiduals,
    pub ricci_like: RicciLikeFlags,
    pub metadata: Metadata,
}

/// Integrates the configured flow and summarises the trace.
pub fn run_flow(preset: &Preset, spec: &FlowSpec) -> Result<(FlowTrace, FlowSummary), CliError> {
    let start = Instant::now();
    let trace = integrate(&preset.phi, &preset.algebra, spec)?;
    let final_geo = Geometry::new(trace.final_phi.clone(), &preset.algebra)?;
    let identity = identity_suite(&final_geo, &preset.algebra);
    let last = trace.records.last().expect("the initial state is always recorded");
    let final_residuals = FinalResiduals {
        identity_max: identity.max_residual(),
        dpsi_residual: last.dpsi_residual,
        coclass_drift: last.coclass_drift,
        rhs_closedness: last.rhs_closedness,
        max_dpsi_residual: trace.records.iter().map(|r| r.dpsi_residual).fold(0.0, f64::max),
        max_coclass_drift: trace.records.iter().map(|r| r.coclass_drift).fold(0.0, f64::max),
    };
    let ricci_like = ricci_like_monitor(&final_geo, &preset.algebra, spec);
    let summary = FlowSummary {
        preset: preset.name.clone(),
        flow: spec.clone(),
        halt_reason: trace.halt_reason.as_str(),
        final_t: trace.final_t,
        steps: trace.steps,
        samples: trace.records.len(),
        final_residuals,
        ricci_like,
        metadata: Metadata {
            wall_time_seconds: start.elapsed().as_secs_f64(),
        },
    };
    Ok((trace, summary))
}

/// Executes one configuration, writing its outputs to `config.output_dir`.
pub fn execute(config: &RunConfig) -> Result<Status, CliError> {
    let preset = config.validate()?;
    let dir = &config.output_dir;
    fs::create_dir_all(dir)?;
    let mut status = Status::Ok;
    if !config.suites.is_empty() {
        let report = run_suites(&preset, &config.suites, config.flow.as_ref())?;
        output::write_json(&dir.join("report.json"), &report)?;
        for s in &report.suites {
            let worst = s.entries.iter().map(|e| e.residual).fold(0.0, f64::max);
            let note = s.note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default();
            println!("{:<22} {:<8} max residual {worst:.3e}{note}", s.suite, status_word(&s.status));
            for e in s.entries.iter().filter(|e| !e.passed) {
                println!("    {} = {:.3e} > {:.0e}", e.name, e.residual, e.tolerance);
            }
        }
        if !report.passed {
            status = Status::ToleranceFailure;
        }
    }
    if let Some(spec) = &config.flow {
        let (trace, summary) = run_flow(&preset, spec)?;
        output::write_trace_csv(&dir.join("trace.csv"), &trace)?;
        output::write_json(&dir.join("summary.json"), &summary)?;
        println!(
            "{:?} on {}: halted ({}) at t = {} after {} steps",
            spec.kind, preset.name, summary.halt_reason, summary.final_t, summary.steps
        );
        if config.emit_plots {
            output::write_plot_script(&dir.join("plot_trace.py"), "trace.csv", trace.records.len())?;
        }
    }
    Ok(status)
}

fn status_word(s: &SuiteStatus) -> &'static str {
    match s {
        SuiteStatus::Passed => "PASS",
        SuiteStatus::Failed => "FAIL",
        SuiteStatus::Skipped => "SKIPPED",
    }
}

/// Reports an error and maps it to an exit status.
pub fn status_of(result: Result<Status, CliError>, label: &str) -> Status {
    match result {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{label}: {e}");
            Status::ConfigError
        }
    }
}

/// Number of sweep workers: `G2FLOW_THREADS` if set, otherwise rayon's default.
pub fn sweep_threads() -> Result<Option<usize>, CliError> {
    match std::env::var("G2FLOW_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| CliError::Config(format!("G2FLOW_THREADS must be a positive integer, got '{v}'")))?;
            if n == 0 {
                return Err(CliError::Config("G2FLOW_THREADS must be at least 1".into()));
            }
            Ok(Some(n))
        }
        Err(_) => Ok(None),
    }
}

/// Runs every configuration of a sweep in parallel; run `i` writes to
/// `<output_dir>/run_<i>_<preset>`.
pub fn execute_sweep(sweep: &SweepConfig, root: &Path) -> Result<Status, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = sweep_threads()? {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Config(e.to_string()))?;
    let runs: Vec<RunConfig> = sweep
        .runs
        .iter()
        .enumerate()
        .map(|(i, run)| {
            let mut run = run.clone();
            run.output_dir = root.join(format!("run_{i:03}_{}", run.preset.label()));
            run
        })
        .collect();
    let statuses: Vec<Status> = pool.install(|| {
        runs.par_iter()
            .map(|run| status_of(execute(run), &run.output_dir.display().to_string()))
            .collect()
    });
    Ok(statuses.into_iter().fold(Status::Ok, Status::worst))
}
