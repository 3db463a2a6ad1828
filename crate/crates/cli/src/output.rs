//! CSV traces, JSON reports and the plotting script.

use std::fs;
use std::path::Path;

use g2flow_core::FlowTrace;
use serde::Serialize;

use crate::error::CliError;

pub const CSV_COLUMNS: [&str; 10] = [
    "t",
    "V",
    "TrT",
    "normT2",
    "R",
    "normRiem",
    "normGradT",
    "Theta",
    "dpsi_residual",
    "coclass_drift",
];

/// Full double precision: 17 significant digits.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_trace_csv(path: &Path, trace: &FlowTrace) -> Result<(), CliError> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(CSV_COLUMNS)?;
    for r in &trace.records {
        let row = [
            r.t,
            r.volume,
            r.trace_t,
            r.norm_t_sq,
            r.scalar,
            r.norm_riem,
            r.norm_grad_t,
            r.theta,
            r.dpsi_residual,
            r.coclass_drift,
        ];
        w.write_record(row.iter().map(|v| format_f64(*v)))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

const FIGURES: [(&str, &str, &str, bool); 4] = [
    ("V", "Hitchin volume V", "volume.png", false),
    ("normT2", "|T|^2", "torsion_norm.png", false),
    ("Theta", "Theta = (|Riem|^2 + |T|^4 + |grad T|^2)^(1/2)", "theta.png", true),
    ("dpsi_residual", "|d psi|", "dpsi_residual.png", true),
];

/// A self-contained matplotlib script that reads `csv_name` (next to the
/// script) and writes one PNG per monitored quantity. The script depends
/// only on its arguments, so re-emitting it is byte-identical.
pub fn plot_script(csv_name: &str, rows: usize) -> String {
    let mut s = String::new();
    s.push_str("#!/usr/bin/env python3\n");
    s.push_str("\"\"\"Plots a g2flow trace. Generated file; edits are overwritten.\"\"\"\n");
    s.push_str("import csv\nimport os\nimport sys\n\n");
    s.push_str("HERE = os.path.dirname(os.path.abspath(__file__))\n");
    s.push_str(&format!("CSV = os.path.join(HERE, {csv_name:?})\n\n"));
    if rows == 0 {
        s.push_str("print(\"trace is empty: nothing to plot\")\nsys.exit(0)\n");
        return s;
    }
    s.push_str("import matplotlib\n\nmatplotlib.use(\"Agg\")\nimport matplotlib.pyplot as plt\n\n");
    s.push_str("with open(CSV, newline=\"\") as f:\n");
    s.push_str("    rows = list(csv.DictReader(f))\n");
    s.push_str("if not rows:\n    print(\"trace is empty: nothing to plot\")\n    sys.exit(0)\n");
    s.push_str("t = [float(r[\"t\"]) for r in rows]\n\n");
    s.push_str("FIGURES = [\n");
    for (col, label, file, log) in FIGURES {
        let py_bool = if log { "True" } else { "False" };
        s.push_str(&format!("    ({col:?}, {label:?}, {file:?}, {py_bool}),\n"));
    }
    s.push_str("]\n\n");
    s.push_str("for column, label, filename, log in FIGURES:\n");
    s.push_str("    y = [float(r[column]) for r in rows]\n");
    s.push_str("    fig, ax = plt.subplots(figsize=(6, 4))\n");
    s.push_str("    if log and any(v > 0 for v in y):\n");
    s.push_str("        ax.semilogy(t, [max(v, 1e-300) for v in y])\n");
    s.push_str("    else:\n");
    s.push_str("        ax.plot(t, y)\n");
    s.push_str("    ax.set_xlabel(\"t\")\n");
    s.push_str("    ax.set_ylabel(label)\n");
    s.push_str("    ax.grid(True, alpha=0.3)\n");
    s.push_str("    fig.tight_layout()\n");
    s.push_str("    fig.savefig(os.path.join(HERE, filename), dpi=120)\n");
    s.push_str("    plt.close(fig)\n");
    s.push_str("    print(\"wrote\", filename)\n");
    s
}

pub fn write_plot_script(path: &Path, csv_name: &str, rows: usize) -> Result<(), CliError> {
    fs::write(path, plot_script(csv_name, rows))?;
    Ok(())
}
