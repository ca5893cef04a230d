//! Convergence and timing studies, order fitting and CSV output.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::experiments::{lookup, resolutions, Experiment, RunOptions, RunOutcome};
use crate::grid::CellClassification;
use crate::ots::TimeStepPolicy;
use crate::solvers_1d::{SchemeVariant, StartProcedure};
use crate::sources::{fixture, Fixture};

pub const CSV_HEADER: [&str; 8] = ["experiment", "scheme", "variant", "N", "dx", "dt", "error_linf", "runtime_seconds"];

/// Maximum absolute difference; lengths must agree.
pub fn linf_error(numeric: &[f64], exact: &[f64]) -> Result<f64> {
    if numeric.len() != exact.len() {
        return Err(Error::Config(format!("length mismatch: {} vs {}", numeric.len(), exact.len())));
    }
    Ok(numeric.iter().zip(exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OrderFit {
    /// Least-squares slope of `log e` against `log dx`.
    pub order: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the fit in natural-log units.
    pub residual: f64,
}

/// Least-squares line through `(ln x, ln y)`.
pub fn fit_loglog(x: &[f64], y: &[f64]) -> Result<OrderFit> {
    if x.len() != y.len() {
        return Err(Error::Config("fit needs equally many abscissae and ordinates".into()));
    }
    if x.len() < 2 {
        return Err(Error::Config(format!("fit needs at least 2 points, got {}", x.len())));
    }
    if x.iter().chain(y).any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::Config("fit needs finite positive data".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / m, ly.iter().sum::<f64>() / m);
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return Err(Error::Config("fit needs distinct abscissae".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = lx.iter().zip(&ly).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    Ok(OrderFit { order: slope, intercept, residual: (ss / m).sqrt() })
}

/// Convergence order from `(dx, error)` pairs; needs at least three.
pub fn fit_order(dx: &[f64], err: &[f64]) -> Result<OrderFit> {
    if dx.len() < 3 {
        return Err(Error::Config(format!("order fit needs at least 3 rows, got {}", dx.len())));
    }
    fit_loglog(dx, err)
}

/// `ln(e_k / e_{k+1}) / ln(dx_k / dx_{k+1})` for consecutive rows.
pub fn pairwise_orders(dx: &[f64], err: &[f64]) -> Vec<f64> {
    dx.windows(2).zip(err.windows(2)).map(|(h, e)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln()).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub n: usize,
    pub dx: f64,
    pub dt: f64,
    pub error_linf: f64,
    pub runtime_seconds: f64,
    /// `dt / dt_opt` under the optimal policy.
    pub dt_over_optimal: Option<f64>,
    pub steps: usize,
    pub final_time: f64,
    /// Solver failure that aborted this row.
    pub failure: Option<Error>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub experiment: String,
    pub scheme: String,
    pub variant: String,
    pub rows: Vec<ReportRow>,
    /// Fit over successful rows; `None` with fewer than three.
    pub fit: Option<OrderFit>,
    pub pairwise: Vec<f64>,
}

impl ConvergenceReport {
    pub fn ok_rows(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.failure.is_none())
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportRow> {
        self.rows.iter().filter(|r| r.failure.is_some())
    }

    pub fn max_error(&self) -> f64 {
        self.ok_rows().map(|r| r.error_linf).fold(0.0, f64::max)
    }

    pub fn order(&self) -> Option<f64> {
        self.fit.map(|f| f.order)
    }

    pub fn write_csv(&self, out: impl Write) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(CSV_HEADER)?;
        for r in &self.rows {
            w.write_record([
                self.experiment.clone(),
                self.scheme.clone(),
                self.variant.clone(),
                r.n.to_string(),
                r.dx.to_string(),
                r.dt.to_string(),
                if r.failure.is_some() { "NaN".to_string() } else { r.error_linf.to_string() },
                r.runtime_seconds.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                std::fs::create_dir_all(dir)?;
            }
        }
        self.write_csv(std::io::BufWriter::new(std::fs::File::create(path)?))
    }
}

#[derive(Clone, Debug)]
pub struct StudyConfig {
    pub experiment: String,
    pub resolutions: Vec<usize>,
    pub final_time: f64,
    pub variant: SchemeVariant,
    /// Overrides the experiment's default fixture.
    pub fixture: Option<String>,
    pub output: Option<PathBuf>,
    pub options: RunOptions,
    /// Each row is timed this many times and the minimum kept.
    pub repetitions: usize,
}

impl StudyConfig {
    /// Experiment defaults with the given variant.
    pub fn new(experiment: &str, variant: SchemeVariant) -> Result<Self> {
        let e = lookup(experiment)?;
        Ok(Self {
            experiment: e.name.to_string(),
            resolutions: e.resolutions(),
            final_time: e.final_time,
            variant,
            fixture: None,
            output: None,
            options: RunOptions::default(),
            repetitions: 1,
        })
    }

    pub fn with_resolutions(mut self, n_min: usize, levels: usize) -> Self {
        self.resolutions = resolutions(n_min, levels);
        self
    }

    pub fn with_fixture(mut self, name: &str) -> Self {
        self.fixture = Some(name.to_string());
        self
    }

    pub fn with_final_time(mut self, t: f64) -> Self {
        self.final_time = t;
        self
    }

    pub fn with_options(mut self, options: RunOptions) -> Self {
        self.options = options;
        self
    }

    fn resolve(&self) -> Result<(&'static Experiment, Fixture)> {
        let e = lookup(&self.experiment)?;
        let fx = fixture(self.fixture.as_deref().unwrap_or(e.fixture))?;
        if self.resolutions.is_empty() || self.resolutions.iter().any(|&n| n < 2) {
            return Err(Error::Config("resolutions must be a non-empty list of N >= 2".into()));
        }
        if self.repetitions == 0 {
            return Err(Error::Config("repetitions must be at least 1".into()));
        }
        self.variant.policy.validate()?;
        if self.variant.nidc && !e.supports_nidc {
            return Err(Error::Config(format!("{} has no defect correction", e.name)));
        }
        Ok((e, fx))
    }
}

fn timed_run(e: &Experiment, n: usize, cfg: &StudyConfig, fx: &Fixture) -> (Result<RunOutcome>, f64) {
    let mut best = f64::INFINITY;
    let mut outcome = None;
    for _ in 0..cfg.repetitions {
        let start = Instant::now();
        let r = e.run(n, cfg.variant, cfg.final_time, fx, &cfg.options);
        best = best.min(start.elapsed().as_secs_f64());
        let failed = r.is_err();
        outcome = Some(r);
        if failed {
            break;
        }
    }
    (outcome.expect("at least one repetition"), best)
}

/// Runs every resolution in order; solver errors are recorded per row.
pub fn run_study(cfg: &StudyConfig) -> Result<ConvergenceReport> {
    let (e, fx) = cfg.resolve()?;
    let sd = (e.descriptor)(&fx);
    let mut rows = Vec::with_capacity(cfg.resolutions.len());
    for &n in &cfg.resolutions {
        let (outcome, runtime) = timed_run(e, n, cfg, &fx);
        let row = match outcome {
            Ok(o) => {
                let dt_over_optimal = match cfg.variant.policy {
                    TimeStepPolicy::Optimal => sd.leading.optimal_dt(o.dx).ok().map(|opt| o.dt / opt),
                    _ => None,
                };
                ReportRow {
                    n,
                    dx: o.dx,
                    dt: o.dt,
                    error_linf: o.error_linf,
                    runtime_seconds: runtime,
                    dt_over_optimal,
                    steps: o.steps,
                    final_time: o.final_time,
                    failure: None,
                }
            }
            Err(err @ (Error::Config(_) | Error::NoPositiveRoot { .. } | Error::MissingDerivative(_))) => {
                return Err(err);
            }
            Err(err) => ReportRow {
                n,
                dx: f64::NAN,
                dt: f64::NAN,
                error_linf: f64::NAN,
                runtime_seconds: runtime,
                dt_over_optimal: None,
                steps: 0,
                final_time: f64::NAN,
                failure: Some(err),
            },
        };
        rows.push(row);
    }
    let (dx, err): (Vec<f64>, Vec<f64>) =
        rows.iter().filter(|r| r.failure.is_none() && r.error_linf > 0.0).map(|r| (r.dx, r.error_linf)).unzip();
    let fit = fit_order(&dx, &err).ok();
    let report = ConvergenceReport {
        experiment: e.name.to_string(),
        scheme: e.scheme.to_string(),
        variant: cfg.variant.label(),
        rows,
        fit,
        pairwise: pairwise_orders(&dx, &err),
    };
    if let Some(path) = &cfg.output {
        report.save_csv(path)?;
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FirstStepProbe {
    pub third_order: ConvergenceReport,
    pub fifth_order: ConvergenceReport,
    pub exact: ConvergenceReport,
}

impl FirstStepProbe {
    /// Fitted order with the fifth-order start minus the third-order start.
    pub fn degradation(&self) -> Option<f64> {
        Some(self.fifth_order.order()? - self.third_order.order()?)
    }
}

/// KPY with OTS-NIDC under three start procedures.
///
/// `Taylor(k)` keeps the Taylor series through `dt^k`.
pub fn first_step_probe(n_min: usize, levels: usize) -> Result<FirstStepProbe> {
    let run = |start: StartProcedure| {
        let cfg = StudyConfig::new("wave-1d-kpy", SchemeVariant::OTS_NIDC)?
            .with_resolutions(n_min, levels)
            .with_options(RunOptions { start, ..RunOptions::default() });
        run_study(&cfg)
    };
    Ok(FirstStepProbe {
        third_order: run(StartProcedure::Taylor(3))?,
        fifth_order: run(StartProcedure::Taylor(5))?,
        exact: run(StartProcedure::Exact)?,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TimingReport {
    pub report: ConvergenceReport,
    /// Log-log slope of runtime against error over the tail.
    pub slope: Option<f64>,
    /// Slope the cost analysis predicts, where it has one.
    pub expected: Option<f64>,
}

impl TimingReport {
    /// Runtime predicted by the tail fit at error level `e`.
    pub fn runtime_at(&self, e: f64) -> Option<f64> {
        let tail = timing_tail(&self.report.rows);
        let (es, ts): (Vec<f64>, Vec<f64>) = tail.iter().map(|r| (r.error_linf, r.runtime_seconds)).unzip();
        let fit = fit_loglog(&es, &ts).ok()?;
        Some((fit.intercept + fit.order * e.ln()).exp())
    }

    /// Whether this scheme reaches its finest-grid error faster than `other`
    /// would, extrapolating `other` along its tail fit.
    pub fn dominates(&self, other: &TimingReport) -> Option<bool> {
        let finest = timing_tail(&self.report.rows).last().copied()?;
        Some(finest.runtime_seconds < other.runtime_at(finest.error_linf)?)
    }
}

/// Rows of a timing study used for the slope: the largest three `N`.
pub fn timing_tail(rows: &[ReportRow]) -> Vec<&ReportRow> {
    let mut ok: Vec<&ReportRow> = rows.iter().filter(|r| r.failure.is_none()).collect();
    ok.sort_by_key(|r| r.n);
    let skip = ok.len().saturating_sub(3);
    ok.split_off(skip)
}

pub fn timing_slope(rows: &[ReportRow]) -> Option<f64> {
    let tail = timing_tail(rows);
    let (e, t): (Vec<f64>, Vec<f64>) = tail.iter().map(|r| (r.error_linf, r.runtime_seconds)).unzip();
    if e.len() < 2 {
        return None;
    }
    fit_loglog(&e, &t).ok().map(|f| f.order)
}

/// One timing case: a study run with three repetitions per row.
#[derive(Clone, Debug)]
pub struct TimingCase {
    pub config: StudyConfig,
    pub expected: Option<f64>,
}

/// Runs each case serially and fits the runtime-versus-error tail slope.
pub fn timing_study(cases: &[TimingCase]) -> Result<Vec<TimingReport>> {
    cases
        .iter()
        .map(|case| {
            let mut cfg = case.config.clone();
            cfg.repetitions = cfg.repetitions.max(3);
            let report = run_study(&cfg)?;
            let slope = timing_slope(&report.rows);
            Ok(TimingReport { report, slope, expected: case.expected })
        })
        .collect()
}

/// Default timing set: FE OTS-NIDC and CN in 1D, parabolic4 OTS-NIDC, 9-point OTS-NIDC and CN in 2D.
pub fn default_timing_cases() -> Result<Vec<TimingCase>> {
    let case = |name: &str, variant: SchemeVariant, n_min: usize, levels: usize, expected: Option<f64>| -> Result<TimingCase> {
        Ok(TimingCase { config: StudyConfig::new(name, variant)?.with_resolutions(n_min, levels), expected })
    };
    let cn_1d = SchemeVariant::new(false, lookup("diffusion-1d-cn")?.default_policy);
    let cn_2d = SchemeVariant::new(false, lookup("diffusion-2d-cn5")?.default_policy);
    Ok(vec![
        case("diffusion-1d-fe", SchemeVariant::OTS_NIDC, 25, 4, Some(-0.75))?,
        case("diffusion-1d-cn", cn_1d, 200, 4, Some(-1.0))?,
        case("parabolic4-1d-fe", SchemeVariant::OTS_NIDC, 10, 4, Some(-5.0 / 6.0))?,
        case("diffusion-2d-9pt", SchemeVariant::OTS_NIDC, 10, 4, Some(-1.0))?,
        case("diffusion-2d-cn5", cn_2d, 10, 4, None)?,
    ])
}

/// Euclidean distance from each point to the nearest boundary sample.
pub fn distance_to_boundary(points: &[(f64, f64)], boundary: &[(f64, f64)]) -> Vec<f64> {
    points
        .iter()
        .map(|&(x, y)| boundary.iter().map(|&(bx, by)| (x - bx).hypot(y - by)).fold(f64::INFINITY, f64::min))
        .collect()
}

/// Boundary points recorded by the ghost classification.
pub fn boundary_samples(cls: &CellClassification) -> Vec<(f64, f64)> {
    cls.edge_ghosts.iter().flat_map(|g| g.candidates.iter().map(|c| c.boundary)).collect()
}

/// Fraction of nodes whose error exceeds `threshold * max_error` that lie
/// within `radius` of the boundary. Returns `None` if no node qualifies.
pub fn boundary_concentration(
    points: &[(f64, f64)],
    errors: &[f64],
    boundary: &[(f64, f64)],
    threshold: f64,
    radius: f64,
) -> Option<f64> {
    let max = errors.iter().copied().fold(0.0, f64::max);
    let large: Vec<usize> = (0..errors.len()).filter(|&k| errors[k] > threshold * max).collect();
    if large.is_empty() {
        return None;
    }
    let pts: Vec<(f64, f64)> = large.iter().map(|&k| points[k]).collect();
    let near = distance_to_boundary(&pts, boundary).iter().filter(|&&d| d <= radius).count();
    Some(near as f64 / large.len() as f64)
}
