//! The figure study set: every convergence and timing study with its
//! acceptance band, written as CSVs plus a manifest.

use std::fmt;
use std::path::{Path, PathBuf};

use crate::error::Result;
use crate::experiments::{lookup, RunOptions};
use crate::harness::{default_timing_cases, run_study, timing_study, ConvergenceReport, StudyConfig, TimingReport};
use crate::ots::TimeStepPolicy;
use crate::solvers_1d::{SchemeVariant, StartProcedure};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Band {
    AtLeast(f64),
    AtMost(f64),
    Between(f64, f64),
    /// Largest error over all rows must not exceed this.
    MaxError(f64),
    /// Largest error must reach at least this (visible smearing).
    MinError(f64),
}

impl Band {
    pub fn check(&self, report: &ConvergenceReport) -> (Option<f64>, bool) {
        if report.failures().next().is_some() {
            return (None, false);
        }
        match *self {
            Band::MaxError(tol) => {
                let e = report.max_error();
                (Some(e), e <= tol)
            }
            Band::MinError(floor) => {
                let e = report.max_error();
                (Some(e), e >= floor)
            }
            _ => {
                let Some(order) = report.order() else { return (None, false) };
                let ok = match *self {
                    Band::AtLeast(lo) => order >= lo,
                    Band::AtMost(hi) => order <= hi,
                    Band::Between(lo, hi) => (lo..=hi).contains(&order),
                    _ => unreachable!(),
                };
                (Some(order), ok)
            }
        }
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Band::AtLeast(x) => write!(f, "order >= {x}"),
            Band::AtMost(x) => write!(f, "order <= {x}"),
            Band::Between(a, b) => write!(f, "{a} <= order <= {b}"),
            Band::MaxError(x) => write!(f, "max error <= {x:e}"),
            Band::MinError(x) => write!(f, "max error >= {x}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum VariantSpec {
    OtsNidc,
    /// Optimal step, correction off.
    Ots,
    Suboptimal,
    /// The experiment's own default policy.
    Default,
}

#[derive(Clone, Copy, Debug)]
pub struct StudySpec {
    pub id: &'static str,
    pub experiment: &'static str,
    pub variant: VariantSpec,
    pub fixture: Option<&'static str>,
    pub start: Option<StartProcedure>,
    pub band: Band,
}

impl StudySpec {
    pub fn config(&self) -> Result<StudyConfig> {
        let e = lookup(self.experiment)?;
        let variant = match self.variant {
            VariantSpec::OtsNidc => SchemeVariant::OTS_NIDC,
            VariantSpec::Ots => SchemeVariant::new(false, TimeStepPolicy::Optimal),
            VariantSpec::Suboptimal => SchemeVariant::new(false, e.suboptimal),
            VariantSpec::Default => e.default_variant(),
        };
        let mut cfg = StudyConfig::new(self.experiment, variant)?;
        if let Some(fx) = self.fixture {
            cfg = cfg.with_fixture(fx);
        }
        if let Some(start) = self.start {
            cfg = cfg.with_options(RunOptions { start, ..RunOptions::default() });
        }
        Ok(cfg)
    }
}

const fn study(id: &'static str, experiment: &'static str, variant: VariantSpec, band: Band) -> StudySpec {
    StudySpec { id, experiment, variant, fixture: None, start: None, band }
}

pub static FIGURE_STUDIES: &[StudySpec] = &[
    study("advection-1d-smooth", "advection-1d", VariantSpec::Ots, Band::MaxError(1e-12)),
    StudySpec {
        fixture: Some("advection-square"),
        ..study("advection-1d-square", "advection-1d", VariantSpec::Ots, Band::MaxError(1e-12))
    },
    study("advection-2d-optimal", "advection-2d", VariantSpec::OtsNidc, Band::MaxError(1e-12)),
    study("advection-2d-suboptimal", "advection-2d", VariantSpec::Suboptimal, Band::MinError(0.1)),
    study("wave-kpy-ots-nidc", "wave-1d-kpy", VariantSpec::OtsNidc, Band::AtLeast(3.7)),
    study("wave-kpy-suboptimal", "wave-1d-kpy", VariantSpec::Suboptimal, Band::AtMost(2.3)),
    StudySpec {
        start: Some(StartProcedure::Taylor(3)),
        ..study("wave-kpy-third-order-start", "wave-1d-kpy", VariantSpec::OtsNidc, Band::Between(2.7, 3.3))
    },
    study("diffusion-1d-fe-ots-nidc", "diffusion-1d-fe", VariantSpec::OtsNidc, Band::AtLeast(3.7)),
    study("diffusion-1d-fe-ots", "diffusion-1d-fe", VariantSpec::Ots, Band::AtMost(2.3)),
    study("diffusion-1d-fe-suboptimal", "diffusion-1d-fe", VariantSpec::Suboptimal, Band::AtMost(2.3)),
    study("diffusion-1d-be", "diffusion-1d-be", VariantSpec::Default, Band::Between(1.7, 2.3)),
    study("diffusion-1d-cn", "diffusion-1d-cn", VariantSpec::Default, Band::Between(1.7, 2.3)),
    study("dufort-frankel-ots-nidc", "diffusion-1d-dufort-frankel", VariantSpec::OtsNidc, Band::AtLeast(3.7)),
    study("dufort-frankel-suboptimal", "diffusion-1d-dufort-frankel", VariantSpec::Suboptimal, Band::AtMost(2.3)),
    study("burgers-ots-nidc", "burgers-1d", VariantSpec::OtsNidc, Band::AtLeast(3.6)),
    study("burgers-suboptimal", "burgers-1d", VariantSpec::Suboptimal, Band::AtMost(2.3)),
    study("parabolic4-fe-ots-nidc", "parabolic4-1d-fe", VariantSpec::OtsNidc, Band::AtLeast(5.5)),
    study("parabolic4-fe-suboptimal", "parabolic4-1d-fe", VariantSpec::Suboptimal, Band::Between(3.6, 4.4)),
    study("parabolic4-cn2", "parabolic4-1d-cn2", VariantSpec::Default, Band::AtMost(2.4)),
    study("parabolic4-cn4", "parabolic4-1d-cn4", VariantSpec::Default, Band::Between(3.6, 4.4)),
    study("diffusion-2d-9pt-ots-nidc", "diffusion-2d-9pt", VariantSpec::OtsNidc, Band::AtLeast(3.7)),
    study("diffusion-2d-9pt-suboptimal", "diffusion-2d-9pt", VariantSpec::Suboptimal, Band::AtMost(2.3)),
    study("diffusion-2d-cn5", "diffusion-2d-cn5", VariantSpec::Default, Band::AtMost(2.3)),
    study("starfish-ots-nidc", "diffusion-2d-starfish", VariantSpec::OtsNidc, Band::AtLeast(3.5)),
    study("starfish-suboptimal", "diffusion-2d-starfish", VariantSpec::Suboptimal, Band::AtMost(2.4)),
];

#[derive(Clone, Debug)]
pub struct ManifestEntry {
    pub id: String,
    pub experiment: String,
    pub variant: String,
    pub csv: PathBuf,
    pub value: Option<f64>,
    pub band: String,
    pub pass: bool,
    /// Numerical failure in at least one row.
    pub failed_rows: bool,
}

#[derive(Clone, Debug, Default)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn any_numerical_failure(&self) -> bool {
        self.entries.iter().any(|e| e.failed_rows)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_path(path)?;
        w.write_record(["study", "experiment", "variant", "csv", "value", "band", "pass"])?;
        for e in &self.entries {
            w.write_record([
                e.id.clone(),
                e.experiment.clone(),
                e.variant.clone(),
                e.csv.file_name().map(|f| f.to_string_lossy().into_owned()).unwrap_or_default(),
                e.value.map_or_else(|| "NaN".to_string(), |v| v.to_string()),
                e.band.clone(),
                e.pass.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Timing slopes pass unless their sign is wrong; the 2D corrected scheme
/// must also beat Crank-Nicolson at its finest error.
fn timing_entries(dir: &Path, reports: &[TimingReport]) -> Result<Vec<ManifestEntry>> {
    let mut out = Vec::new();
    for t in reports {
        let csv = dir.join(format!("timing-{}.csv", t.report.experiment));
        t.report.save_csv(&csv)?;
        let band = match t.expected {
            Some(x) => format!("slope < 0 (cost model {x:.3})"),
            None => "slope < 0".to_string(),
        };
        out.push(ManifestEntry {
            id: format!("timing-{}", t.report.experiment),
            experiment: t.report.experiment.clone(),
            variant: t.report.variant.clone(),
            csv,
            value: t.slope,
            band,
            pass: t.slope.is_some_and(|s| s < 0.0),
            failed_rows: t.report.failures().next().is_some(),
        });
    }
    let find = |name: &str| reports.iter().find(|t| t.report.experiment == name);
    if let (Some(fe), Some(cn)) = (find("diffusion-2d-9pt"), find("diffusion-2d-cn5")) {
        let dominates = fe.dominates(cn);
        out.push(ManifestEntry {
            id: "timing-2d-ordering".into(),
            experiment: "diffusion-2d-9pt".into(),
            variant: fe.report.variant.clone(),
            csv: dir.join(format!("timing-{}.csv", fe.report.experiment)),
            value: fe.slope,
            band: "faster than diffusion-2d-cn5 at equal error".into(),
            pass: dominates == Some(true),
            failed_rows: false,
        });
    }
    Ok(out)
}

/// Runs the full study set into `dir` and writes `manifest.csv`.
pub fn reproduce_all(dir: &Path, mut progress: impl FnMut(&ManifestEntry)) -> Result<Manifest> {
    std::fs::create_dir_all(dir)?;
    let mut manifest = Manifest::default();
    for spec in FIGURE_STUDIES {
        let cfg = spec.config()?;
        let report = run_study(&cfg)?;
        let csv = dir.join(format!("{}.csv", spec.id));
        report.save_csv(&csv)?;
        let (value, pass) = spec.band.check(&report);
        let entry = ManifestEntry {
            id: spec.id.to_string(),
            experiment: spec.experiment.to_string(),
            variant: report.variant.clone(),
            csv,
            value,
            band: spec.band.to_string(),
            pass,
            failed_rows: report.failures().next().is_some(),
        };
        progress(&entry);
        manifest.entries.push(entry);
    }
    for entry in timing_entries(dir, &timing_study(&default_timing_cases()?)?)? {
        progress(&entry);
        manifest.entries.push(entry);
    }
    manifest.write(&dir.join("manifest.csv"))?;
    Ok(manifest)
}
