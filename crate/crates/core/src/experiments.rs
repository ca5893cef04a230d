//! Experiment registry: one table row per PDE/scheme pairing.
//!
//! `N` is the number of grid intervals per side, so a 1D grid has `N + 1`
//! nodes. Every time step is derived from `dx` through a [`TimeStepPolicy`].

use std::fmt;

use crate::error::{Error, Result};
use crate::grid::{classify_cells, CellClassification, ImplicitDomain, UniformGrid1D, UniformGrid2D};
use crate::linalg::CgStats;
use crate::ots::{LeadingError, PostElimination, SchemeDescriptor, StabilityBound, TimeStepPolicy};
use crate::solvers_1d::{
    advection_upwind_fe_step, backward_euler_diffusion_step, bundles, burgers_fe_step, crank_nicolson_diffusion_step,
    crank_nicolson_parabolic4_step, diffusion_fe_step, dufort_frankel_start, dufort_frankel_step, kpy_first_step,
    parabolic4_fe_step, wave_kpy_step, BilaplacianOrder, BurgersCorrection, SchemeVariant, StartProcedure,
    ThreeLevelState, TwoLevelState,
};
use crate::solvers_2d::{
    advection2d_step, crank_nicolson_2d_5pt, diffusion2d_9pt_step, diffusion2d_irregular_step, inner_nodes,
    irregular_initial, node_points, TwoLevelState2D, DEFAULT_THETA, DIFFUSION_2D_BUNDLE,
};
use crate::sources::{fixture, ExactSolution, Fixture, NodalSource};
use crate::stencil::{ScalarField1D, ScalarField2D};

/// Starfish level set used by the irregular-domain experiment.
pub const STARFISH: Starfish = Starfish { r0: 0.5, amplitude: 0.15, rotation: 0.1 };

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Starfish {
    pub r0: f64,
    pub amplitude: f64,
    pub rotation: f64,
}

impl Starfish {
    /// Classified starfish on `[-1, 1]^2` with `n` intervals per side.
    pub fn classify(&self, n: usize) -> Result<CellClassification> {
        let grid = UniformGrid2D::square(-1.0, 1.0, n + 1, 1)?;
        classify_cells(&ImplicitDomain::starfish(self.r0, self.amplitude, self.rotation, grid))
    }

    pub fn phi(&self, x: f64, y: f64) -> f64 {
        crate::grid::starfish_phi(x, y, self.r0, self.amplitude, self.rotation)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub start: StartProcedure,
    pub burgers_form: BurgersCorrection,
    pub theta: f64,
    pub cg_rel_tol: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            start: StartProcedure::KPY_DEFAULT,
            burgers_form: BurgersCorrection::Derived,
            theta: DEFAULT_THETA,
            cg_rel_tol: 1e-12,
        }
    }
}

/// Everything a runner needs for one resolution.
pub struct RunContext<'a> {
    pub experiment: &'a Experiment,
    pub n: usize,
    pub variant: SchemeVariant,
    pub final_time: f64,
    pub fixture: &'a Fixture,
    pub options: &'a RunOptions,
}

impl RunContext<'_> {
    pub fn descriptor(&self) -> SchemeDescriptor {
        (self.experiment.descriptor)(self.fixture)
    }

    pub fn dt(&self, dx: f64) -> Result<f64> {
        self.descriptor().dt(&self.variant.policy, dx)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunOutcome {
    pub dx: f64,
    /// Nominal step; a shortened final step is not reported here.
    pub dt: f64,
    pub error_linf: f64,
    pub steps: usize,
    /// Time at which the error was measured.
    pub final_time: f64,
}

pub type Runner = fn(&RunContext<'_>) -> Result<RunOutcome>;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dimension {
    One,
    Two,
}

pub struct Experiment {
    pub name: &'static str,
    pub scheme: &'static str,
    pub dimension: Dimension,
    pub fixture: &'static str,
    /// Human-readable rule for the default step (and grid ratio where relevant).
    pub dt_formula: &'static str,
    pub final_time: f64,
    pub n_min: usize,
    /// Number of resolutions `n_min * 2^k`.
    pub levels: usize,
    pub default_policy: TimeStepPolicy,
    /// Policy selected by `subopt`.
    pub suboptimal: TimeStepPolicy,
    pub supports_nidc: bool,
    pub descriptor: fn(&Fixture) -> SchemeDescriptor,
    pub runner: Runner,
}

impl fmt::Debug for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Experiment").field("name", &self.name).field("scheme", &self.scheme).finish_non_exhaustive()
    }
}

impl Experiment {
    pub fn resolutions(&self) -> Vec<usize> {
        resolutions(self.n_min, self.levels)
    }

    pub fn default_fixture(&self) -> Result<Fixture> {
        fixture(self.fixture)
    }

    /// Default variant: correction on exactly when the default policy is optimal.
    pub fn default_variant(&self) -> SchemeVariant {
        SchemeVariant::new(self.supports_nidc && self.default_policy.is_optimal(), self.default_policy)
    }

    pub fn predicted_order(&self, policy: &TimeStepPolicy) -> Result<f64> {
        Ok((self.descriptor)(&self.default_fixture()?).predicted_order(policy))
    }

    /// Runs one resolution.
    pub fn run(&self, n: usize, variant: SchemeVariant, final_time: f64, fx: &Fixture, options: &RunOptions) -> Result<RunOutcome> {
        if variant.nidc && !self.supports_nidc {
            return Err(Error::Config(format!("{} has no defect correction", self.name)));
        }
        if !(final_time > 0.0) {
            return Err(Error::Config(format!("final time must be positive, got {final_time}")));
        }
        let ctx = RunContext { experiment: self, n, variant, final_time, fixture: fx, options };
        (self.runner)(&ctx)
    }
}

pub fn resolutions(n_min: usize, levels: usize) -> Vec<usize> {
    (0..levels).map(|k| n_min << k).collect()
}

pub fn lookup(name: &str) -> Result<&'static Experiment> {
    REGISTRY.iter().find(|e| e.name == name).ok_or_else(|| Error::UnknownExperiment(name.to_string()))
}

/// Step sizes of a two-level run ending exactly at `t_final`.
///
/// If `t_final / dt` is within round-off of an integer all steps are equal;
/// otherwise the last one is shortened.
pub fn schedule(dt: f64, t_final: f64) -> Vec<f64> {
    let ratio = t_final / dt;
    let k = ratio.round();
    if k >= 1.0 && (ratio - k).abs() <= 1e-9 * k {
        return vec![dt; k as usize];
    }
    let full = ratio.floor() as usize;
    let mut steps = vec![dt; full];
    let rest = t_final - full as f64 * dt;
    if rest > 0.0 {
        steps.push(rest);
    }
    steps
}

/// Number of equal steps of size `dt` closest to `t_final` (at least one) and the time reached.
pub fn equal_steps(dt: f64, t_final: f64) -> (usize, f64) {
    let k = ((t_final / dt).round() as usize).max(1);
    (k, k as f64 * dt)
}

fn max_abs_diff_1d(u: &ScalarField1D, exact: &ExactSolution) -> f64 {
    let t = u.time;
    (0..u.grid.n as isize).map(|i| (u.get(i) - exact.value(u.grid.x(i), 0.0, t)).abs()).fold(0.0, f64::max)
}

fn max_abs_diff_2d(u: &ScalarField2D, nodes: impl Iterator<Item = (usize, usize)>, exact: &ExactSolution) -> f64 {
    let t = u.time;
    nodes
        .map(|(i, j)| {
            let (ii, jj) = (i as isize, j as isize);
            (u.get(ii, jj) - exact.value(u.grid.x(ii), u.grid.y(jj), t)).abs()
        })
        .fold(0.0, f64::max)
}

fn all_nodes(grid: &UniformGrid2D) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..grid.ny).flat_map(move |j| (0..grid.nx).map(move |i| (i, j)))
}

fn grid_1d(lo: f64, hi: f64, n: usize, ghost: usize) -> Result<UniformGrid1D> {
    UniformGrid1D::new(lo, hi, n + 1, ghost)
}

fn orders(p: u32, q: u32) -> PostElimination {
    PostElimination::Orders { p, q }
}

// ---- descriptors -------------------------------------------------------

fn advection_1d_descriptor(fx: &Fixture) -> SchemeDescriptor {
    let a = fx.coefficient.abs();
    SchemeDescriptor {
        name: "upwind-fe",
        leading: LeadingError::new(a / 2.0, a * a / 2.0, 1, 1, PostElimination::Exact),
        stability: StabilityBound::Limit { coefficient: 1.0 / a, exponent: 1.0 },
        dt_formula: "dx/|A|",
        order_offset: 0.0,
    }
}

fn advection_2d_descriptor(fx: &Fixture) -> SchemeDescriptor {
    let a = fx.coefficient.abs();
    SchemeDescriptor {
        name: "upwind-fe-2d",
        leading: LeadingError::new(a / 2.0, a * a / 2.0, 1, 1, PostElimination::Exact),
        stability: StabilityBound::Limit { coefficient: 1.0 / a, exponent: 1.0 },
        dt_formula: "dx/|Ax|, dy = (Ay/Ax) dx",
        order_offset: 0.0,
    }
}

fn kpy_descriptor(fx: &Fixture) -> SchemeDescriptor {
    let c2 = fx.coefficient * fx.coefficient;
    SchemeDescriptor {
        name: "kpy",
        leading: LeadingError::new(c2 / 12.0, c2 * c2 / 12.0, 2, 2, orders(4, 4)),
        stability: StabilityBound::Limit { coefficient: 1.0 / fx.coefficient.abs(), exponent: 1.0 },
        dt_formula: "dx/c",
        order_offset: 0.0,
    }
}

fn diffusion_fe_leading(d: f64) -> LeadingError {
    LeadingError::new(d / 12.0, d * d / 2.0, 2, 1, orders(4, 2))
}

fn diffusion_fe_descriptor(fx: &Fixture) -> SchemeDescriptor {
    let d = fx.coefficient;
    SchemeDescriptor {
        name: "forward-euler",
        leading: diffusion_fe_leading(d),
        stability: StabilityBound::Limit { coefficient: 0.5 / d, exponent: 2.0 },
        dt_formula: "dx^2/(6 D)",
        order_offset: 0.0,
    }
}

fn diffusion_be_descriptor(fx: &Fixture) -> SchemeDescriptor {
    let d = fx.coefficient;
    SchemeDescriptor {
        name: "backward-euler",
        leading: LeadingError::new(d / 12.0, -d * d / 2.0, 2, 1, orders(4, 2)),
        stability: StabilityBound::Unconditional,
        dt_formula: "0.5 dx^2 (no positive optimal step)",
        order_offset: 0.0,
    }
}

fn diffusion_cn_descriptor(fx: &Fixture) -> SchemeDescriptor {
    let d = fx.coefficient;
    SchemeDescriptor {
        name: "crank-nicolson",
        leading: LeadingError::new(d / 12.0, -d * d * d / 12.0, 2, 2, orders(4, 4)),
        stability: StabilityBound::Unconditional,
        dt_formula: "0.5 dx (no positive optimal step)",
        order_offset: 0.0,
    }
}

fn dufort_frankel_descriptor(fx: &Fixture) -> SchemeDescriptor {
    let d = fx.coefficient;
    SchemeDescriptor {
        name: "dufort-frankel",
        // dx^2 * (dx^2/12 - D^2 dt^2 / dx^2) in the (alpha dx^r - beta dt^s) form.
        leading: LeadingError::new(1.0 / 12.0, d * d, 4, 2, orders(6, 3)),
        stability: StabilityBound::Unconditional,
        dt_formula: "dx^2/(sqrt(12) D)",
        order_offset: -2.0,
    }
}

fn burgers_descriptor(fx: &Fixture) -> SchemeDescriptor {
    let nu = fx.coefficient;
    SchemeDescriptor {
        name: "forward-euler-central",
        leading: diffusion_fe_leading(nu),
        stability: StabilityBound::Limit { coefficient: 0.5 / nu, exponent: 2.0 },
        dt_formula: "dx^2/(6 nu)",
        order_offset: 0.0,
    }
}

fn parabolic4_fe_descriptor(fx: &Fixture) -> SchemeDescriptor {
    let k = fx.coefficient;
    SchemeDescriptor {
        name: "forward-euler-bilaplacian4",
        leading: LeadingError::new(7.0 * k / 240.0, k * k / 2.0, 4, 1, orders(6, 2)),
        stability: StabilityBound::Limit { coefficient: 3.0 / (40.0 * k), exponent: 4.0 },
        dt_formula: "7 dx^4/(120 kappa)",
        order_offset: 0.0,
    }
}

fn parabolic4_cn2_descriptor(fx: &Fixture) -> SchemeDescriptor {
    let k = fx.coefficient;
    SchemeDescriptor {
        name: "crank-nicolson-bilaplacian2",
        leading: LeadingError::new(k / 6.0, -k * k * k / 12.0, 2, 2, orders(4, 4)),
        stability: StabilityBound::Unconditional,
        dt_formula: "0.1 dx (no positive optimal step)",
        order_offset: 0.0,
    }
}

fn parabolic4_cn4_descriptor(fx: &Fixture) -> SchemeDescriptor {
    let k = fx.coefficient;
    SchemeDescriptor {
        name: "crank-nicolson-bilaplacian4",
        leading: LeadingError::new(7.0 * k / 240.0, -k * k * k / 12.0, 4, 2, orders(6, 4)),
        stability: StabilityBound::Unconditional,
        dt_formula: "0.5 dx^2 (no positive optimal step)",
        order_offset: 0.0,
    }
}

fn diffusion_9pt_descriptor(fx: &Fixture) -> SchemeDescriptor {
    let d = fx.coefficient;
    SchemeDescriptor {
        name: "forward-euler-9pt",
        leading: diffusion_fe_leading(d),
        stability: StabilityBound::Limit { coefficient: 3.0 / (8.0 * d), exponent: 2.0 },
        dt_formula: "dx^2/(6 D)",
        order_offset: 0.0,
    }
}

fn diffusion_cn5_descriptor(fx: &Fixture) -> SchemeDescriptor {
    SchemeDescriptor { name: "crank-nicolson-5pt", ..diffusion_cn_descriptor(fx) }
}

// ---- runners -----------------------------------------------------------

fn run_advection_1d(ctx: &RunContext<'_>) -> Result<RunOutcome> {
    let fx = ctx.fixture;
    let grid = grid_1d(0.0, 1.0, ctx.n, 1)?;
    let dx = grid.dx;
    let dt = ctx.dt(dx)?;
    let mut state = TwoLevelState::from_exact(grid, &fx.exact, 0.0);
    let steps = schedule(dt, ctx.final_time);
    for &h in &steps {
        advection_upwind_fe_step(&mut state, fx.coefficient, h, &fx.exact)?;
    }
    let error_linf = max_abs_diff_1d(&state.u, &fx.exact);
    Ok(RunOutcome { dx, dt, error_linf, steps: steps.len(), final_time: state.time() })
}

/// Rectangle for the 2D advection runs: `N + 1` nodes along x on
/// `[-9.9, 9.9]`; along y the spacing is `|Ay/Ax| dx` under the optimal
/// policy and `dx` otherwise.
pub fn advection_2d_grid(n: usize, ax: f64, ay: f64, optimal: bool) -> Result<UniformGrid2D> {
    let half = 9.9;
    let dx = 2.0 * half / n as f64;
    let ratio = if optimal { (ay / ax).abs() } else { 1.0 };
    UniformGrid2D::with_spacing((-half, -half * ratio), n + 1, n + 1, dx, dx * ratio, 1)
}

fn run_advection_2d(ctx: &RunContext<'_>) -> Result<RunOutcome> {
    let (_, outcome) = advection_2d_run(ctx)?;
    Ok(outcome)
}

/// Runs the 2D advection experiment and returns the final field as well.
pub fn advection_2d_run(ctx: &RunContext<'_>) -> Result<(ScalarField2D, RunOutcome)> {
    let fx = ctx.fixture;
    let (ax, ay) = (fx.coefficient, fx.coefficient_y);
    let grid = advection_2d_grid(ctx.n, ax, ay, ctx.variant.ots())?;
    let dx = grid.dx;
    let dt = match ctx.variant.policy {
        TimeStepPolicy::Optimal => ctx.dt(dx)?,
        TimeStepPolicy::FractionOfStability(f) => f * dx / (ax.abs() + ay.abs() * grid.dx / grid.dy),
        TimeStepPolicy::ExplicitRatio { c, exponent } => c * dx.powf(exponent),
    };
    let (k, t_end) = equal_steps(dt, ctx.final_time);
    let mut state = TwoLevelState2D::from_exact(grid, &fx.exact, 0.0);
    for _ in 0..k {
        advection2d_step(&mut state, ax, ay, dt, &fx.exact, &ctx.variant)?;
    }
    state.u.time = t_end;
    let g = state.u.grid.clone();
    let error_linf = max_abs_diff_2d(&state.u, all_nodes(&g), &fx.exact);
    Ok((state.u, RunOutcome { dx, dt, error_linf, steps: k, final_time: t_end }))
}

fn run_wave_kpy(ctx: &RunContext<'_>) -> Result<RunOutcome> {
    let fx = ctx.fixture;
    let c = fx.coefficient;
    let grid = grid_1d(0.0, 2.0, ctx.n, 1)?;
    let dx = grid.dx;
    let dt = ctx.dt(dx)?;
    let (k, t_end) = equal_steps(dt, ctx.final_time);
    let source = NodalSource::grid_1d(&fx.source, &grid, if ctx.variant.nidc { bundles::KPY } else { &[] })?;
    let u0 = ScalarField1D::from_fn(grid.clone(), 0.0, |x| fx.exact.value(x, 0.0, 0.0));
    let u1 = kpy_first_step(&grid, &fx.exact, c, 0.0, dt, &fx.source, ctx.options.start)?;
    let mut state = ThreeLevelState::new(u0, u1);
    for _ in 1..k {
        wave_kpy_step(&mut state, c, dt, &source, &fx.exact, &ctx.variant)?;
    }
    let error_linf = max_abs_diff_1d(&state.curr, &fx.exact);
    Ok(RunOutcome { dx, dt, error_linf, steps: k, final_time: t_end })
}

fn run_two_level_1d(
    ctx: &RunContext<'_>,
    (lo, hi): (f64, f64),
    ghost: usize,
    partials: &[crate::sources::Partial],
    mut step: impl FnMut(&mut TwoLevelState, f64, &NodalSource) -> Result<()>,
) -> Result<RunOutcome> {
    let fx = ctx.fixture;
    let grid = grid_1d(lo, hi, ctx.n, ghost)?;
    let dx = grid.dx;
    let dt = ctx.dt(dx)?;
    let source = NodalSource::grid_1d(&fx.source, &grid, if ctx.variant.nidc { partials } else { &[] })?;
    let mut state = TwoLevelState::from_exact(grid, &fx.exact, 0.0);
    let steps = schedule(dt, ctx.final_time);
    for &h in &steps {
        step(&mut state, h, &source)?;
    }
    let error_linf = max_abs_diff_1d(&state.u, &fx.exact);
    Ok(RunOutcome { dx, dt, error_linf, steps: steps.len(), final_time: state.time() })
}

const DIFFUSION_DOMAIN: (f64, f64) = (0.0, 1.0);
const PARABOLIC4_DOMAIN: (f64, f64) = (0.0, 4.0);
const BURGERS_DOMAIN: (f64, f64) = (-2.0, 6.0);

fn run_diffusion_fe(ctx: &RunContext<'_>) -> Result<RunOutcome> {
    let (fx, v) = (ctx.fixture, ctx.variant);
    run_two_level_1d(ctx, DIFFUSION_DOMAIN, 1, bundles::DIFFUSION, |s, h, src| {
        diffusion_fe_step(s, fx.coefficient, h, src, &fx.exact, &v)
    })
}

fn run_diffusion_be(ctx: &RunContext<'_>) -> Result<RunOutcome> {
    let fx = ctx.fixture;
    run_two_level_1d(ctx, DIFFUSION_DOMAIN, 1, &[], |s, h, src| {
        backward_euler_diffusion_step(s, fx.coefficient, h, src, &fx.exact)
    })
}

fn run_diffusion_cn(ctx: &RunContext<'_>) -> Result<RunOutcome> {
    let fx = ctx.fixture;
    run_two_level_1d(ctx, DIFFUSION_DOMAIN, 1, &[], |s, h, src| {
        crank_nicolson_diffusion_step(s, fx.coefficient, h, src, &fx.exact)
    })
}

fn run_dufort_frankel(ctx: &RunContext<'_>) -> Result<RunOutcome> {
    let fx = ctx.fixture;
    let d = fx.coefficient;
    let grid = grid_1d(DIFFUSION_DOMAIN.0, DIFFUSION_DOMAIN.1, ctx.n, 1)?;
    let dx = grid.dx;
    let dt = ctx.dt(dx)?;
    let (k, t_end) = equal_steps(dt, ctx.final_time);
    let source = NodalSource::grid_1d(&fx.source, &grid, if ctx.variant.nidc { bundles::DIFFUSION } else { &[] })?;
    let u0 = ScalarField1D::from_fn(grid.clone(), 0.0, |x| fx.exact.value(x, 0.0, 0.0));
    let u1 = dufort_frankel_start(&grid, &fx.exact, 0.0, dt)?;
    let mut state = ThreeLevelState::new(u0, u1);
    for _ in 1..k {
        dufort_frankel_step(&mut state, d, dt, &source, &fx.exact, &ctx.variant)?;
    }
    let error_linf = max_abs_diff_1d(&state.curr, &fx.exact);
    Ok(RunOutcome { dx, dt, error_linf, steps: k, final_time: t_end })
}

fn run_burgers(ctx: &RunContext<'_>) -> Result<RunOutcome> {
    let (fx, v, form) = (ctx.fixture, ctx.variant, ctx.options.burgers_form);
    run_two_level_1d(ctx, BURGERS_DOMAIN, 1, &[], |s, h, _| burgers_fe_step(s, fx.coefficient, h, &fx.exact, &v, form))
}

fn run_parabolic4_fe(ctx: &RunContext<'_>) -> Result<RunOutcome> {
    let (fx, v) = (ctx.fixture, ctx.variant);
    run_two_level_1d(ctx, PARABOLIC4_DOMAIN, 3, bundles::PARABOLIC4, |s, h, src| {
        parabolic4_fe_step(s, fx.coefficient, h, src, &fx.exact, &v)
    })
}

fn run_parabolic4_cn2(ctx: &RunContext<'_>) -> Result<RunOutcome> {
    let fx = ctx.fixture;
    run_two_level_1d(ctx, PARABOLIC4_DOMAIN, 3, &[], |s, h, src| {
        crank_nicolson_parabolic4_step(s, fx.coefficient, h, src, &fx.exact, BilaplacianOrder::Second)
    })
}

fn run_parabolic4_cn4(ctx: &RunContext<'_>) -> Result<RunOutcome> {
    let fx = ctx.fixture;
    run_two_level_1d(ctx, PARABOLIC4_DOMAIN, 3, &[], |s, h, src| {
        crank_nicolson_parabolic4_step(s, fx.coefficient, h, src, &fx.exact, BilaplacianOrder::Fourth)
    })
}

fn run_two_level_2d(
    ctx: &RunContext<'_>,
    partials: &[crate::sources::Partial],
    mut step: impl FnMut(&mut TwoLevelState2D, f64, &NodalSource) -> Result<()>,
) -> Result<RunOutcome> {
    let fx = ctx.fixture;
    let grid = UniformGrid2D::square(0.0, 1.0, ctx.n + 1, 0)?;
    let dx = grid.dx;
    let dt = ctx.dt(dx)?;
    let points = node_points(&grid, &inner_nodes(&grid));
    let source = NodalSource::new(&fx.source, &points, if ctx.variant.nidc { partials } else { &[] })?;
    let mut state = TwoLevelState2D::from_exact(grid, &fx.exact, 0.0);
    let steps = schedule(dt, ctx.final_time);
    for &h in &steps {
        step(&mut state, h, &source)?;
    }
    let g = state.u.grid.clone();
    let error_linf = max_abs_diff_2d(&state.u, all_nodes(&g), &fx.exact);
    Ok(RunOutcome { dx, dt, error_linf, steps: steps.len(), final_time: state.time() })
}

fn run_diffusion_9pt(ctx: &RunContext<'_>) -> Result<RunOutcome> {
    let (fx, v) = (ctx.fixture, ctx.variant);
    run_two_level_2d(ctx, DIFFUSION_2D_BUNDLE, |s, h, src| diffusion2d_9pt_step(s, fx.coefficient, h, src, &fx.exact, &v))
}

fn run_diffusion_cn5(ctx: &RunContext<'_>) -> Result<RunOutcome> {
    let (fx, tol) = (ctx.fixture, ctx.options.cg_rel_tol);
    run_two_level_2d(ctx, &[], |s, h, src| {
        crank_nicolson_2d_5pt(s, fx.coefficient, h, src, &fx.exact, tol).map(|_: CgStats| ())
    })
}

/// Final field of a starfish run together with its classification.
pub struct StarfishRun {
    pub cls: CellClassification,
    pub u: ScalarField2D,
    pub outcome: RunOutcome,
}

impl StarfishRun {
    /// `(i, j, |u - exact|)` over the updated nodes.
    pub fn nodal_errors(&self, exact: &ExactSolution) -> Vec<(usize, usize, f64)> {
        let t = self.u.time;
        let g = &self.cls.grid;
        self.cls
            .active
            .iter()
            .map(|&(i, j)| {
                let (ii, jj) = (i as isize, j as isize);
                (i, j, (self.u.get(ii, jj) - exact.value(g.x(ii), g.y(jj), t)).abs())
            })
            .collect()
    }
}

pub fn starfish_run(ctx: &RunContext<'_>) -> Result<StarfishRun> {
    let fx = ctx.fixture;
    let cls = STARFISH.classify(ctx.n)?;
    let dx = cls.grid.dx;
    let dt = ctx.dt(dx)?;
    let points = node_points(&cls.grid, &cls.active);
    let source = NodalSource::new(&fx.source, &points, if ctx.variant.nidc { DIFFUSION_2D_BUNDLE } else { &[] })?;
    let mut state = TwoLevelState2D { u: irregular_initial(&cls, &fx.exact, 0.0), step: 0 };
    let steps = schedule(dt, ctx.final_time);
    for &h in &steps {
        diffusion2d_irregular_step(
            &mut state,
            &cls,
            fx.coefficient,
            h,
            &source,
            &fx.exact,
            &ctx.variant,
            ctx.options.theta,
        )?;
    }
    let error_linf = max_abs_diff_2d(&state.u, cls.active.iter().copied(), &fx.exact);
    let outcome = RunOutcome { dx, dt, error_linf, steps: steps.len(), final_time: state.time() };
    Ok(StarfishRun { cls, u: state.u, outcome })
}

fn run_starfish(ctx: &RunContext<'_>) -> Result<RunOutcome> {
    starfish_run(ctx).map(|r| r.outcome)
}

// ---- table -------------------------------------------------------------

const HALF_STABLE: TimeStepPolicy = TimeStepPolicy::FractionOfStability(0.5);
const OTS: TimeStepPolicy = TimeStepPolicy::Optimal;

const fn ratio(c: f64, exponent: f64) -> TimeStepPolicy {
    TimeStepPolicy::ExplicitRatio { c, exponent }
}

pub static REGISTRY: &[Experiment] = &[
    Experiment {
        name: "advection-1d",
        scheme: "upwind forward Euler",
        dimension: Dimension::One,
        fixture: "advection-smooth",
        dt_formula: "dx/|A|",
        final_time: 0.5,
        n_min: 50,
        levels: 4,
        default_policy: OTS,
        suboptimal: HALF_STABLE,
        supports_nidc: false,
        descriptor: advection_1d_descriptor,
        runner: run_advection_1d,
    },
    Experiment {
        name: "advection-2d",
        scheme: "upwind forward Euler + mixed-derivative correction",
        dimension: Dimension::Two,
        fixture: "square-pulse",
        dt_formula: "dx/|Ax|, dy = (Ay/Ax) dx",
        final_time: 3.0,
        n_min: 99,
        levels: 1,
        default_policy: OTS,
        suboptimal: HALF_STABLE,
        supports_nidc: true,
        descriptor: advection_2d_descriptor,
        runner: run_advection_2d,
    },
    Experiment {
        name: "wave-1d-kpy",
        scheme: "KPY three-level",
        dimension: Dimension::One,
        fixture: "wave-manufactured",
        dt_formula: "dx/c",
        final_time: 1.0,
        n_min: 20,
        levels: 4,
        default_policy: OTS,
        suboptimal: HALF_STABLE,
        supports_nidc: true,
        descriptor: kpy_descriptor,
        runner: run_wave_kpy,
    },
    Experiment {
        name: "diffusion-1d-fe",
        scheme: "forward Euler, 3-point Laplacian",
        dimension: Dimension::One,
        fixture: "diffusion-manufactured",
        dt_formula: "dx^2/(6 D)",
        final_time: 0.5,
        n_min: 25,
        levels: 4,
        default_policy: OTS,
        suboptimal: HALF_STABLE,
        supports_nidc: true,
        descriptor: diffusion_fe_descriptor,
        runner: run_diffusion_fe,
    },
    Experiment {
        name: "diffusion-1d-be",
        scheme: "backward Euler, 3-point Laplacian",
        dimension: Dimension::One,
        fixture: "diffusion-manufactured",
        dt_formula: "0.5 dx^2",
        final_time: 0.5,
        n_min: 25,
        levels: 4,
        default_policy: ratio(0.5, 2.0),
        suboptimal: ratio(0.5, 2.0),
        supports_nidc: false,
        descriptor: diffusion_be_descriptor,
        runner: run_diffusion_be,
    },
    Experiment {
        name: "diffusion-1d-cn",
        scheme: "Crank-Nicolson, 3-point Laplacian",
        dimension: Dimension::One,
        fixture: "diffusion-manufactured",
        dt_formula: "0.5 dx",
        final_time: 0.5,
        n_min: 25,
        levels: 4,
        default_policy: ratio(0.5, 1.0),
        suboptimal: ratio(0.5, 1.0),
        supports_nidc: false,
        descriptor: diffusion_cn_descriptor,
        runner: run_diffusion_cn,
    },
    Experiment {
        name: "diffusion-1d-dufort-frankel",
        scheme: "DuFort-Frankel three-level",
        dimension: Dimension::One,
        fixture: "diffusion-manufactured",
        dt_formula: "dx^2/(sqrt(12) D)",
        final_time: 0.5,
        n_min: 25,
        levels: 4,
        default_policy: OTS,
        suboptimal: ratio(0.25, 2.0),
        supports_nidc: true,
        descriptor: dufort_frankel_descriptor,
        runner: run_dufort_frankel,
    },
    Experiment {
        name: "burgers-1d",
        scheme: "forward Euler, central differences",
        dimension: Dimension::One,
        fixture: "burgers-re10",
        dt_formula: "dx^2/(6 nu)",
        final_time: 1.0,
        n_min: 40,
        levels: 4,
        default_policy: OTS,
        suboptimal: HALF_STABLE,
        supports_nidc: true,
        descriptor: burgers_descriptor,
        runner: run_burgers,
    },
    Experiment {
        name: "parabolic4-1d-fe",
        scheme: "forward Euler, 7-point bilaplacian",
        dimension: Dimension::One,
        fixture: "parabolic4-manufactured",
        dt_formula: "7 dx^4/(120 kappa)",
        final_time: 0.1,
        n_min: 10,
        levels: 4,
        default_policy: OTS,
        suboptimal: HALF_STABLE,
        supports_nidc: true,
        descriptor: parabolic4_fe_descriptor,
        runner: run_parabolic4_fe,
    },
    Experiment {
        name: "parabolic4-1d-cn2",
        scheme: "Crank-Nicolson, 5-point bilaplacian",
        dimension: Dimension::One,
        fixture: "parabolic4-manufactured",
        dt_formula: "0.1 dx",
        final_time: 0.1,
        n_min: 10,
        levels: 4,
        default_policy: ratio(0.1, 1.0),
        suboptimal: ratio(0.1, 1.0),
        supports_nidc: false,
        descriptor: parabolic4_cn2_descriptor,
        runner: run_parabolic4_cn2,
    },
    Experiment {
        name: "parabolic4-1d-cn4",
        scheme: "Crank-Nicolson, 7-point bilaplacian",
        dimension: Dimension::One,
        fixture: "parabolic4-manufactured",
        dt_formula: "0.5 dx^2",
        final_time: 0.1,
        n_min: 10,
        levels: 4,
        default_policy: ratio(0.5, 2.0),
        suboptimal: ratio(0.5, 2.0),
        supports_nidc: false,
        descriptor: parabolic4_cn4_descriptor,
        runner: run_parabolic4_cn4,
    },
    Experiment {
        name: "diffusion-2d-9pt",
        scheme: "forward Euler, 9-point Laplacian",
        dimension: Dimension::Two,
        fixture: "diffusion2d-manufactured",
        dt_formula: "dx^2/(6 D)",
        final_time: 0.1,
        n_min: 10,
        levels: 4,
        default_policy: OTS,
        suboptimal: HALF_STABLE,
        supports_nidc: true,
        descriptor: diffusion_9pt_descriptor,
        runner: run_diffusion_9pt,
    },
    Experiment {
        name: "diffusion-2d-cn5",
        scheme: "Crank-Nicolson, 5-point Laplacian, conjugate gradient",
        dimension: Dimension::Two,
        fixture: "diffusion2d-manufactured",
        dt_formula: "0.5 dx",
        final_time: 0.1,
        n_min: 10,
        levels: 4,
        default_policy: ratio(0.5, 1.0),
        suboptimal: ratio(0.5, 1.0),
        supports_nidc: false,
        descriptor: diffusion_cn5_descriptor,
        runner: run_diffusion_cn5,
    },
    Experiment {
        name: "diffusion-2d-starfish",
        scheme: "forward Euler, 9-point Laplacian, ghost cells",
        dimension: Dimension::Two,
        fixture: "diffusion2d-manufactured",
        dt_formula: "dx^2/(6 D)",
        final_time: 0.005,
        n_min: 50,
        levels: 4,
        default_policy: OTS,
        suboptimal: HALF_STABLE,
        supports_nidc: true,
        descriptor: diffusion_9pt_descriptor,
        runner: run_starfish,
    },
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_are_unique_and_resolvable() {
        for (k, e) in REGISTRY.iter().enumerate() {
            assert!(REGISTRY[k + 1..].iter().all(|o| o.name != e.name), "{}", e.name);
            assert!(lookup(e.name).is_ok());
            assert!(e.default_fixture().is_ok(), "{}", e.name);
        }
        assert!(matches!(lookup("nope"), Err(Error::UnknownExperiment(_))));
    }

    #[test]
    fn descriptor_formula_matches_registry_text() {
        for e in REGISTRY {
            let sd = (e.descriptor)(&e.default_fixture().unwrap());
            if e.default_policy.is_optimal() {
                assert_eq!(sd.dt_formula, e.dt_formula, "{}", e.name);
            }
        }
    }

    #[test]
    fn optimal_steps_match_closed_forms() {
        let dx: f64 = 0.05;
        let fe = lookup("diffusion-1d-fe").unwrap();
        let sd = (fe.descriptor)(&fe.default_fixture().unwrap());
        assert!((sd.dt(&OTS, dx).unwrap() - dx * dx / 6.0).abs() < 1e-18);
        let df = lookup("diffusion-1d-dufort-frankel").unwrap();
        let sd = (df.descriptor)(&df.default_fixture().unwrap());
        assert!((sd.dt(&OTS, dx).unwrap() - dx * dx / 12f64.sqrt()).abs() < 1e-17);
        let p4 = lookup("parabolic4-1d-fe").unwrap();
        let sd = (p4.descriptor)(&p4.default_fixture().unwrap());
        assert!((sd.dt(&OTS, dx).unwrap() - 7.0 * dx.powi(4) / 120.0).abs() < 1e-20);
        let b = lookup("burgers-1d").unwrap();
        let sd = (b.descriptor)(&b.default_fixture().unwrap());
        assert!((sd.dt(&OTS, dx).unwrap() - dx * dx / (6.0 * 0.25)).abs() < 1e-17);
    }

    #[test]
    fn implicit_schemes_have_no_optimal_step() {
        for name in ["diffusion-1d-be", "diffusion-1d-cn", "parabolic4-1d-cn2", "parabolic4-1d-cn4", "diffusion-2d-cn5"] {
            let e = lookup(name).unwrap();
            let sd = (e.descriptor)(&e.default_fixture().unwrap());
            assert!(matches!(sd.dt(&OTS, 0.1), Err(Error::NoPositiveRoot { .. })), "{name}");
        }
    }

    #[test]
    fn predicted_orders() {
        let order = |name: &str, p: TimeStepPolicy| lookup(name).unwrap().predicted_order(&p).unwrap();
        assert_eq!(order("diffusion-1d-fe", OTS), 4.0);
        assert_eq!(order("diffusion-1d-fe", HALF_STABLE), 2.0);
        assert_eq!(order("wave-1d-kpy", OTS), 4.0);
        assert_eq!(order("wave-1d-kpy", HALF_STABLE), 2.0);
        assert_eq!(order("parabolic4-1d-fe", OTS), 6.0);
        assert_eq!(order("parabolic4-1d-fe", HALF_STABLE), 4.0);
        assert_eq!(order("parabolic4-1d-cn2", ratio(0.1, 1.0)), 2.0);
        assert_eq!(order("diffusion-1d-dufort-frankel", OTS), 4.0);
        assert!(order("advection-1d", OTS).is_infinite());
    }

    #[test]
    fn schedule_lands_on_final_time() {
        let s = schedule(0.1, 0.5);
        assert_eq!(s.len(), 5);
        assert!(s.iter().all(|&h| h == 0.1));
        let s = schedule(0.3, 1.0);
        assert_eq!(s.len(), 4);
        assert!((s.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!((s[3] - 0.1).abs() < 1e-15);
        assert_eq!(equal_steps(0.2, 3.0), (15, 0.2 * 15.0));
    }

    #[test]
    fn nidc_is_rejected_where_unsupported() {
        let e = lookup("diffusion-1d-cn").unwrap();
        let fx = e.default_fixture().unwrap();
        let v = SchemeVariant::new(true, e.default_policy);
        assert!(matches!(e.run(10, v, 0.1, &fx, &RunOptions::default()), Err(Error::Config(_))));
    }
}
