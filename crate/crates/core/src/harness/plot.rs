use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::report::write_atomic;
use super::{ReportBundle, ScenarioSummary};
use crate::error::{Error, Result};
use crate::metrics::MetricsReport;

/// A metric plotted against scenarios.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    Changes,
    SideEffects,
    CpuTime,
    InformationLoss,
}

impl Axis {
    pub const ALL: [Axis; 4] = [Axis::Changes, Axis::SideEffects, Axis::CpuTime, Axis::InformationLoss];

    pub fn name(self) -> &'static str {
        match self {
            Axis::Changes => "changes",
            Axis::SideEffects => "side-effects",
            Axis::CpuTime => "cpu-time",
            Axis::InformationLoss => "information-loss",
        }
    }

    fn value(self, r: &MetricsReport) -> String {
        match self {
            Axis::Changes => r.raw_changes.to_string(),
            Axis::SideEffects => r.side_effects.to_string(),
            Axis::CpuTime => format!("{:.3}", r.cpu_time),
            Axis::InformationLoss => format!("{:.2}", r.information_loss * 100.0),
        }
    }

    /// Parses `all` or a comma-separated list of axis names.
    pub fn parse_list(spec: &str) -> Result<Vec<Axis>> {
        if spec.trim() == "all" {
            return Ok(Self::ALL.to_vec());
        }
        spec.split(',').map(str::trim).filter(|s| !s.is_empty()).map(str::parse).collect()
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::UnknownAxis(s.to_owned()))
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// What labels the rows of a plot-data file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum XAxis {
    /// Threshold when scenarios differ in threshold, else scenario size.
    #[default]
    Auto,
    /// Number of sensitive itemsets.
    ScenarioSize,
    SigmaMin,
    ScenarioId,
}

impl FromStr for XAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(XAxis::Auto),
            "size" => Ok(XAxis::ScenarioSize),
            "sigma" => Ok(XAxis::SigmaMin),
            "id" => Ok(XAxis::ScenarioId),
            other => Err(Error::InvalidArgument(format!(
                "unknown x-axis {other:?} (expected auto, size, sigma or id)"
            ))),
        }
    }
}

impl XAxis {
    fn resolve(self, scenarios: &[ScenarioSummary]) -> XAxis {
        if self != XAxis::Auto {
            return self;
        }
        let first = scenarios.first().map(|s| s.sigma_min);
        if scenarios.iter().any(|s| Some(s.sigma_min) != first) {
            XAxis::SigmaMin
        } else {
            XAxis::ScenarioSize
        }
    }

    fn header(self) -> &'static str {
        match self {
            XAxis::ScenarioSize => "sensitive_itemsets",
            XAxis::SigmaMin => "sigma_min",
            _ => "scenario",
        }
    }
}

/// Rows: scenarios ordered by x value; columns: algorithms; failed cells
/// read `NA`. Information loss is given in percent.
pub fn render_plot(bundle: &ReportBundle, axis: Axis, x: XAxis) -> Result<Vec<u8>> {
    let x = x.resolve(&bundle.scenarios);
    let algorithms = &bundle.run_config.algorithms;
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Report(e.to_string());
    let mut header = vec![x.header().to_owned()];
    header.extend(algorithms.iter().cloned());
    w.write_record(&header).map_err(csv_err)?;
    let mut rows: Vec<(u64, String, Vec<String>)> = Vec::new();
    for id in &bundle.run_config.scenarios {
        let summary = bundle.scenarios.iter().find(|s| &s.id == id);
        let (key, label) = match (x, summary) {
            (XAxis::ScenarioSize, Some(s)) => (s.n_sensitive as u64, s.n_sensitive.to_string()),
            (XAxis::SigmaMin, Some(s)) => (u64::from(s.sigma_min), s.sigma_min.to_string()),
            _ => (0, id.clone()),
        };
        let mut row = vec![label];
        for alg in algorithms {
            row.push(bundle.report(id, alg).map_or_else(|| "NA".to_owned(), |r| axis.value(r)));
        }
        rows.push((key, id.clone(), row));
    }
    rows.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    for (_, _, row) in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    w.into_inner().map_err(|e| Error::Report(e.to_string()))
}

/// Writes `plot_<axis>.csv` into `dir` and returns its path.
pub fn emit_plot_data(bundle: &ReportBundle, axis: Axis, x: XAxis, dir: impl AsRef<Path>) -> Result<PathBuf> {
    let path = dir.as_ref().join(format!("plot_{}.csv", axis.name()));
    write_atomic(&path, &render_plot(bundle, axis, x)?)?;
    Ok(path)
}
