use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use g2flow_cli::config::{parse_flow_kind, Overrides, PresetSource, RunConfig, Suite};
use g2flow_cli::error::Status;
use g2flow_cli::output::{plot_script, CSV_COLUMNS};
use g2flow_core::FlowKind;
use tempfile::TempDir;

fn g2flow(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_g2flow"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

#[test]
fn all_suites_pass_on_presets() {
    let tmp = TempDir::new().unwrap();
    for preset in ["flat7", "heisenberg7", "almost_abelian_a"] {
        let out = g2flow(&["--preset", preset, "--suites", "all", "--out", preset], tmp.path());
        assert_eq!(code(&out), 0, "{preset}: {}", String::from_utf8_lossy(&out.stdout));
        let report: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(tmp.path().join(preset).join("report.json")).unwrap()).unwrap();
        assert_eq!(report["passed"], true);
        assert_eq!(report["suites"].as_array().unwrap().len(), 4);
    }
}

#[test]
fn coclosed_suite_is_skipped_for_closed_structure() {
    let tmp = TempDir::new().unwrap();
    let out = g2flow(&["--preset", "almost_abelian_a", "--suites", "coclosed", "--out", "o"], tmp.path());
    assert_eq!(code(&out), 0);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("o/report.json")).unwrap()).unwrap();
    assert_eq!(report["suites"][0]["status"], "skipped");
}

#[test]
fn configuration_errors_exit_one() {
    let tmp = TempDir::new().unwrap();
    let cases: &[&[&str]] = &[
        &[],
        &["--preset", "nope", "--suites", "identity"],
        &["--preset", "flat7", "--suites", "bogus"],
        &["--preset", "flat7", "--flow", "laplacian", "--dt", "0"],
        &["--preset", "flat7", "--flow", "laplacian", "--dt=-1e-3"],
        &["--preset", "flat7", "--no-such-flag"],
        &["--preset", "flat7", "--flow", "laplacian", "--t-max", "-1"],
        &["--preset", "flat7", "--dt", "1e-3"],
        &["--preset", "flat7"],
        &["--config", "missing.toml"],
    ];
    for args in cases {
        let out = g2flow(args, tmp.path());
        assert_eq!(code(&out), 1, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn non_positive_phi_exits_one() {
    let tmp = TempDir::new().unwrap();
    let mut e012 = vec!["0"; 35];
    e012[0] = "1";
    for phi in [vec!["0"; 35], e012] {
        let toml = format!(
            "suites = [\"identity\"]\noutput_dir = \"o\"\n[preset]\nname = \"bad\"\nphi = [{}]\n",
            phi.join(", ")
        );
        fs::write(tmp.path().join("bad.toml"), toml).unwrap();
        let out = g2flow(&["--config", "bad.toml"], tmp.path());
        assert_eq!(code(&out), 1, "{}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn tolerance_failure_exits_two() {
    // Absolute residuals at a bracket scale of 10³ exceed the fixed 1e-10
    // tolerances through rounding alone.
    let tmp = TempDir::new().unwrap();
    fs::write(
        tmp.path().join("big.toml"),
        "suites = [\"identity\", \"laplacian_crosscheck\"]\noutput_dir = \"o\"\n\
         [preset]\nname = \"big\"\nbrackets = [[1, 0, 1, 1e3], [2, 0, 2, -1e3], [3, 0, 3, 0.3], [4, 0, 4, -0.3]]\n",
    )
    .unwrap();
    let out = g2flow(&["--config", "big.toml"], tmp.path());
    assert_eq!(code(&out), 2, "{}", String::from_utf8_lossy(&out.stdout));
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("o/report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], false);
}

#[test]
fn blow_up_halts_with_exit_zero() {
    let tmp = TempDir::new().unwrap();
    fs::write(
        tmp.path().join("h.toml"),
        "output_dir = \"o\"\n[preset]\nname = \"heis2\"\nbrackets = [[1, 2, 0, -2.0], [3, 4, 0, -2.0], [5, 6, 0, -2.0]]\n\
         [flow]\nkind = \"coflow_minus\"\ndt = 1e-3\nt_max = 0.1\nmonitor_stride = 5\n",
    )
    .unwrap();
    let out = g2flow(&["--config", "h.toml"], tmp.path());
    assert_eq!(code(&out), 0);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(tmp.path().join("o/summary.json")).unwrap()).unwrap();
    assert_eq!(summary["halt_reason"], "blow_up");
    assert!(summary["final_t"].as_f64().unwrap() < 0.1);
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let run = |dir: &str| {
        let out = g2flow(
            &[
                "--preset", "heisenberg7", "--flow", "modified", "--dt", "1e-2", "--t-max", "0.2",
                "--suites", "identity,coclosed", "--emit-plots", "--out", dir,
            ],
            tmp.path(),
        );
        assert_eq!(code(&out), 0);
    };
    run("a");
    run("b");
    for f in ["trace.csv", "report.json", "plot_trace.py"] {
        let a = fs::read(tmp.path().join("a").join(f)).unwrap();
        let b = fs::read(tmp.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{f} differs");
    }
    // summary.json differs only in wall time
    let strip = |d: &str| {
        let mut v: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(tmp.path().join(d).join("summary.json")).unwrap()).unwrap();
        v["metadata"]["wall_time_seconds"] = serde_json::Value::Null;
        v
    };
    assert_eq!(strip("a"), strip("b"));
}

#[test]
fn trace_csv_layout_and_flat_constancy() {
    let tmp = TempDir::new().unwrap();
    let out = g2flow(
        &["--preset", "flat7", "--flow", "laplacian", "--dt", "0.1", "--t-max", "1", "--out", "o"],
        tmp.path(),
    );
    assert_eq!(code(&out), 0);
    let (header, rows) = read_csv(&tmp.path().join("o/trace.csv"));
    assert_eq!(header, CSV_COLUMNS);
    assert_eq!(rows.len(), 11);
    for (i, row) in rows.iter().enumerate() {
        assert!((row[0] - 0.1 * i as f64).abs() < 1e-12);
        assert_eq!(&row[1..], &rows[0][1..]);
    }
    assert!((rows[0][1] - 1.0).abs() < 1e-14);
    // full double precision
    let text = fs::read_to_string(tmp.path().join("o/trace.csv")).unwrap();
    let first = text.lines().nth(1).unwrap().split(',').nth(1).unwrap();
    assert_eq!(first.split('e').next().unwrap().len(), 18);
}

#[test]
fn sweep_writes_one_directory_per_run() {
    let tmp = TempDir::new().unwrap();
    fs::write(
        tmp.path().join("sweep.toml"),
        "output_dir = \"sweep\"\n\
         [[runs]]\npreset = \"heisenberg7\"\nsuites = [\"identity\"]\n\
         [[runs]]\npreset = \"flat7\"\n[runs.flow]\nkind = \"coflow_plus\"\ndt = 0.1\nt_max = 0.3\n\
         [[runs]]\npreset = \"almost_abelian_a\"\nsuites = [\"laplacian_crosscheck\"]\n",
    )
    .unwrap();
    let serial = g2flow(&["--sweep", "sweep.toml", "--out", "s1"], tmp.path());
    assert_eq!(code(&serial), 0, "{}", String::from_utf8_lossy(&serial.stderr));
    let parallel = Command::new(env!("CARGO_BIN_EXE_g2flow"))
        .args(["--sweep", "sweep.toml", "--out", "s3"])
        .env("G2FLOW_THREADS", "3")
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert_eq!(code(&parallel), 0);
    for (dir, file) in [
        ("run_000_heisenberg7", "report.json"),
        ("run_001_flat7", "trace.csv"),
        ("run_002_almost_abelian_a", "report.json"),
    ] {
        let a = fs::read(tmp.path().join("s1").join(dir).join(file)).unwrap();
        let b = fs::read(tmp.path().join("s3").join(dir).join(file)).unwrap();
        assert_eq!(a, b);
    }
    let bad = Command::new(env!("CARGO_BIN_EXE_g2flow"))
        .args(["--sweep", "sweep.toml", "--out", "s0"])
        .env("G2FLOW_THREADS", "0")
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert_eq!(code(&bad), 1);
}

#[test]
fn config_round_trip() {
    let text = "output_dir = \"runs/h\"\nsuites = [\"identity\", \"evolution_crosscheck\"]\nemit_plots = true\n\
                [preset]\nname = \"h2\"\nbrackets = [[1, 2, 0, -2.0]]\n\
                [flow]\nkind = \"modified_coflow\"\na = 3.5\ndt = 0.01\nt_max = 0.5\nmonitor_stride = 2\n";
    let config = RunConfig::from_toml(text).unwrap();
    assert!(matches!(config.preset, PresetSource::Inline(_)));
    let again = RunConfig::from_toml(&config.to_toml().unwrap()).unwrap();
    assert_eq!(config, again);
    let named = RunConfig::from_toml("preset = \"flat7\"").unwrap();
    assert_eq!(named, RunConfig::from_toml(&named.to_toml().unwrap()).unwrap());
    assert!(RunConfig::from_toml("preset = \"flat7\"\nbogus = 1").is_err());
}

#[test]
fn overrides_layer_on_config() {
    let base = RunConfig::new(PresetSource::Named("flat7".into()));
    let o = Overrides { flow: Some(FlowKind::CoflowMinus), dt: Some(0.5), ..Default::default() };
    let c = o.apply(base.clone()).unwrap();
    let flow = c.flow.unwrap();
    assert_eq!(flow.kind, FlowKind::CoflowMinus);
    assert_eq!(flow.dt, 0.5);
    assert!(Overrides { a: Some(1.0), ..Default::default() }.apply(base).is_err());
}

#[test]
fn suite_and_flow_names() {
    assert_eq!(Suite::parse_list("all").unwrap(), Suite::ALL);
    assert_eq!(
        Suite::parse_list("coclosed, identity,coclosed").unwrap(),
        vec![Suite::Identity, Suite::Coclosed]
    );
    assert!(Suite::parse_list("x").is_err());
    for (s, k) in [
        ("laplacian", FlowKind::LaplacianFlow),
        ("coflow+", FlowKind::CoflowPlus),
        ("coflow-", FlowKind::CoflowMinus),
        ("modified", FlowKind::ModifiedCoflow),
        ("dstar-d", FlowKind::DstarDExperiment),
    ] {
        assert_eq!(parse_flow_kind(s).unwrap(), k);
    }
    assert!(parse_flow_kind("ricci").is_err());
}

#[test]
fn status_precedence() {
    use Status::*;
    assert_eq!(Ok.worst(ToleranceFailure), ToleranceFailure);
    assert_eq!(ToleranceFailure.worst(ConfigError), ConfigError);
    assert_eq!(Ok.worst(Ok), Ok);
    assert_eq!([Ok.code(), ConfigError.code(), ToleranceFailure.code()], [0, 1, 2]);
}

#[test]
fn plot_script_is_deterministic() {
    assert_eq!(plot_script("trace.csv", 10), plot_script("trace.csv", 10));
    let full = plot_script("trace.csv", 10);
    for png in ["volume.png", "torsion_norm.png", "theta.png", "dpsi_residual.png"] {
        assert!(full.contains(png));
    }
    assert!(full.contains("matplotlib.use(\"Agg\")"));
    let empty = plot_script("trace.csv", 0);
    assert!(!empty.contains("matplotlib"));
    assert!(empty.contains("nothing to plot"));
}
