use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use super::ReportBundle;
use crate::error::{Error, Result};

/// Writes `bytes` to a temporary file beside `path`, then renames it.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| Error::io(&dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

/// Human-readable report. Timing sits on lines starting with `cpu_time`.
pub fn render_text(bundle: &ReportBundle) -> String {
    let mut out = String::new();
    let cfg = &bundle.run_config;
    let _ = writeln!(out, "Frequent itemset hiding report");
    let _ = writeln!(out, "algorithms: {}", cfg.algorithms.join(", "));
    let _ = writeln!(
        out,
        "solver budget: {}s{}",
        cfg.solver_time_limit_secs,
        cfg.solver_node_limit.map(|n| format!(", {n} nodes")).unwrap_or_default()
    );
    let _ = writeln!(out, "border rows: {}", if cfg.exact_border { "exact" } else { "surrogate" });
    let _ = writeln!(out, "information loss over: {:?}", cfg.loss_scope);
    if let Some(seed) = cfg.seed {
        let _ = writeln!(out, "seed: {seed}");
    }
    let _ = writeln!(out, "scenarios: {}", cfg.scenarios.len());
    for id in &cfg.scenarios {
        let _ = writeln!(out);
        let _ = writeln!(out, "== {id}");
        if let Some(s) = bundle.scenarios.iter().find(|s| &s.id == id) {
            let _ = writeln!(
                out,
                "   dataset {}: {} transactions, sigma_min {}, {} sensitive, {} frequent, {} after revision",
                s.dataset, s.n_transactions, s.sigma_min, s.n_sensitive, s.n_frequent, s.n_revised
            );
        }
        for alg in &cfg.algorithms {
            if let Some(r) = bundle.report(id, alg) {
                let _ = writeln!(out, "-- {alg}");
                let _ = writeln!(out, "   raw changes: {}", r.raw_changes);
                let _ = writeln!(out, "   side effects: {}", r.side_effects);
                let _ = writeln!(
                    out,
                    "   information loss: {:.2}% ({:.6})",
                    r.information_loss * 100.0,
                    r.information_loss
                );
                let _ = writeln!(out, "   hidden: {}", yes_no(r.hidden_ok));
                let _ = writeln!(out, "cpu_time {alg}: {:.3}s", r.cpu_time);
                for n in &r.notes {
                    let _ = writeln!(out, "   note: {n}");
                }
            }
            for f in bundle
                .failures
                .iter()
                .filter(|f| &f.scenario_id == id && &f.algorithm_id == alg)
            {
                let _ = writeln!(out, "-- {alg}");
                let _ = writeln!(out, "   FAILED: {}", f.message);
            }
        }
    }
    out
}

pub fn write_text_report(bundle: &ReportBundle, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), render_text(bundle).as_bytes())
}

pub const CSV_HEADER: [&str; 11] = [
    "scenario",
    "algorithm",
    "sigma_min",
    "n_sensitive",
    "raw_changes",
    "side_effects",
    "information_loss",
    "cpu_time",
    "hidden_ok",
    "status",
    "message",
];

pub fn render_csv(bundle: &ReportBundle) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Report(e.to_string());
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    let cfg = &bundle.run_config;
    for id in &cfg.scenarios {
        let summary = bundle.scenarios.iter().find(|s| &s.id == id);
        let sigma = summary.map(|s| s.sigma_min.to_string()).unwrap_or_default();
        let n_sens = summary.map(|s| s.n_sensitive.to_string()).unwrap_or_default();
        for alg in &cfg.algorithms {
            if let Some(r) = bundle.report(id, alg) {
                w.write_record([
                    id.as_str(),
                    alg,
                    &sigma,
                    &n_sens,
                    &r.raw_changes.to_string(),
                    &r.side_effects.to_string(),
                    &format!("{:.6}", r.information_loss),
                    &format!("{:.3}", r.cpu_time),
                    if r.hidden_ok { "true" } else { "false" },
                    "ok",
                    "",
                ])
                .map_err(csv_err)?;
            }
            for f in bundle
                .failures
                .iter()
                .filter(|f| &f.scenario_id == id && &f.algorithm_id == alg)
            {
                w.write_record([id.as_str(), alg, &sigma, &n_sens, "", "", "", "", "false", "failed", &f.message])
                    .map_err(csv_err)?;
            }
        }
    }
    w.into_inner().map_err(|e| Error::Report(e.to_string()))
}

pub fn write_csv_report(bundle: &ReportBundle, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &render_csv(bundle)?)
}

/// Writes `report.txt` and `report.csv` into `dir`.
pub fn write_reports(bundle: &ReportBundle, dir: impl AsRef<Path>) -> Result<(PathBuf, PathBuf)> {
    let dir = dir.as_ref();
    let txt = dir.join("report.txt");
    let csv = dir.join("report.csv");
    write_text_report(bundle, &txt)?;
    write_csv_report(bundle, &csv)?;
    Ok((txt, csv))
}
