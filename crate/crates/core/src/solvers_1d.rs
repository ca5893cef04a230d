//! One-dimensional time steppers.
//!
//! Every stepper updates nodes `1..n-1`; the two end nodes and all ghost
//! layers are Dirichlet data taken from the exact solution at the new time.
//! Sources and their derivatives are evaluated at the old time level.

use crate::error::{Error, Result};
use crate::grid::UniformGrid1D;
use crate::linalg::{solve_banded, solve_tridiagonal, BandedMatrix};
use crate::ots::TimeStepPolicy;
use crate::sources::{Derivative, ExactSolution, NodalSource, Partial, SourceModel};
use crate::stencil::{bilaplacian_1d_o4, gradient_central_1d, laplacian_1d_c2, ScalarField1D};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchemeVariant {
    pub nidc: bool,
    pub policy: TimeStepPolicy,
}

impl SchemeVariant {
    pub const OTS_NIDC: SchemeVariant = SchemeVariant { nidc: true, policy: TimeStepPolicy::Optimal };

    pub fn new(nidc: bool, policy: TimeStepPolicy) -> Self {
        Self { nidc, policy }
    }

    pub fn ots(&self) -> bool {
        self.policy.is_optimal()
    }

    /// Short label used in reports, e.g. `ots+nidc` or `stability*0.5`.
    pub fn label(&self) -> String {
        if self.nidc { format!("{}+nidc", self.policy) } else { self.policy.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TwoLevelState {
    pub u: ScalarField1D,
    pub step: usize,
}

impl TwoLevelState {
    pub fn from_exact(grid: UniformGrid1D, exact: &ExactSolution, t0: f64) -> Self {
        Self { u: ScalarField1D::from_fn(grid, t0, |x| exact.value(x, 0.0, t0)), step: 0 }
    }

    pub fn time(&self) -> f64 {
        self.u.time
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThreeLevelState {
    pub prev: ScalarField1D,
    pub curr: ScalarField1D,
    pub step: usize,
}

impl ThreeLevelState {
    pub fn new(prev: ScalarField1D, curr: ScalarField1D) -> Self {
        Self { prev, curr, step: 1 }
    }

    pub fn time(&self) -> f64 {
        self.curr.time
    }

    pub fn dt(&self) -> f64 {
        self.curr.time - self.prev.time
    }

    fn advance(&mut self, next: ScalarField1D) {
        self.prev = std::mem::replace(&mut self.curr, next);
        self.step += 1;
    }
}

/// Sets the end nodes and ghost layers from the exact solution at the field's time.
pub fn fill_boundary(u: &mut ScalarField1D, exact: &ExactSolution) {
    let g = u.grid.ghost_width as isize;
    let n = u.grid.n as isize;
    let t = u.time;
    for i in (-g..=0).chain(n - 1..n + g) {
        let x = u.grid.x(i);
        u.set(i, exact.value(x, 0.0, t));
    }
}

fn check_stability(dt: f64, limit: f64) -> Result<()> {
    if !(dt > 0.0) {
        return Err(Error::Config(format!("time step must be positive, got {dt}")));
    }
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::Stability { dt, limit });
    }
    Ok(())
}

/// Writes `value(i)` into interior nodes of a copy of `u` at time `t`, then fills the boundary.
fn update_interior(
    u: &ScalarField1D,
    t: f64,
    exact: &ExactSolution,
    value: impl Fn(usize) -> f64,
) -> ScalarField1D {
    let mut next = u.clone();
    next.time = t;
    let n = u.grid.n;
    let nodes = next.nodes_mut();
    for (i, slot) in nodes.iter_mut().enumerate().take(n - 1).skip(1) {
        *slot = value(i);
    }
    fill_boundary(&mut next, exact);
    next
}

fn guard_finite(u: &ScalarField1D, step: usize) -> Result<()> {
    if u.nodes().iter().all(|v| v.is_finite() && v.abs() < 1e12) {
        Ok(())
    } else {
        Err(Error::Diverged { step })
    }
}

/// First-order upwind, forward Euler: `u_j - A dt (u_j - u_{j-1}) / dx` for `A > 0`.
pub fn advection_upwind_fe_step(state: &mut TwoLevelState, a: f64, dt: f64, exact: &ExactSolution) -> Result<()> {
    let dx = state.u.grid.dx;
    check_stability(dt, dx / a.abs())?;
    let nu = a * dt / dx;
    let u = state.u.nodes();
    let next = update_interior(&state.u, state.u.time + dt, exact, |i| {
        if a >= 0.0 { u[i] - nu * (u[i] - u[i - 1]) } else { u[i] - nu * (u[i + 1] - u[i]) }
    });
    state.u = next;
    state.step += 1;
    Ok(())
}

/// How the second level of a three-level scheme is produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StartProcedure {
    /// Taylor polynomial through `dt^k`, so the local error is `O(dt^(k+1))`.
    Taylor(u8),
    /// Sample the exact solution.
    Exact,
}

impl StartProcedure {
    pub const KPY_DEFAULT: StartProcedure = StartProcedure::Taylor(5);
}

/// `u^1` for the wave equation from the Taylor expansion in time, with time
/// derivatives replaced through `u_tt = c^2 u_xx + f`.
pub fn kpy_first_step(
    grid: &UniformGrid1D,
    exact: &ExactSolution,
    c: f64,
    t0: f64,
    dt: f64,
    source: &SourceModel,
    start: StartProcedure,
) -> Result<ScalarField1D> {
    let order = match start {
        StartProcedure::Exact => {
            let t1 = t0 + dt;
            return Ok(ScalarField1D::from_fn(grid.clone(), t1, |x| exact.value(x, 0.0, t1)));
        }
        StartProcedure::Taylor(k) if (1..=5).contains(&k) => k,
        StartProcedure::Taylor(k) => {
            return Err(Error::Config(format!("Taylor start supports orders 1 to 5, got {k}")));
        }
    };
    // Time derivatives of u at t0, each rewritten through u_tt = c^2 u_xx + f.
    let c2 = c * c;
    let u_derivs: [&[(f64, Partial)]; 5] = [
        &[(1.0, Partial::T)],
        &[(c2, Partial::XX)],
        &[(c2, Partial::TXX)],
        &[(c2 * c2, Partial::XXXX)],
        &[(c2 * c2, Partial::new(4, 0, 1))],
    ];
    let f_derivs: [&[(f64, Partial)]; 5] = [
        &[],
        &[(1.0, Partial::VALUE)],
        &[(1.0, Partial::T)],
        &[(c2, Partial::XX), (1.0, Partial::TT)],
        &[(c2, Partial::TXX), (1.0, Partial::TTT)],
    ];
    let mut terms: Vec<(f64, Derivative<'_>)> = Vec::new();
    let mut factor = 1.0;
    for m in 1..=order as usize {
        factor *= dt / m as f64;
        for &(w, d) in u_derivs[m - 1] {
            terms.push((factor * w, exact.derivative(d)?));
        }
        for &(w, d) in f_derivs[m - 1] {
            terms.push((factor * w, source.derivative(d)?));
        }
    }
    Ok(ScalarField1D::from_fn(grid.clone(), t0 + dt, |x| {
        terms.iter().fold(exact.value(x, 0.0, t0), |v, (w, d)| v + w * d.at(x, 0.0, t0))
    }))
}

/// Source partials each scheme reads when the correction is on.
pub mod bundles {
    use crate::sources::Partial;

    pub const KPY: &[Partial] = &[Partial::XX, Partial::TT];
    pub const DIFFUSION: &[Partial] = &[Partial::XX, Partial::T];
    pub const PARABOLIC4: &[Partial] = &[Partial::XXXX, Partial::T];
}

/// KPY scheme `u^{n+1} - 2u^n + u^{n-1} = (c dt / dx)^2 d2 u^n + dt^2 f`, plus
/// `dt^4 (c^2 f_xx + f_tt) / 12` with the correction on.
pub fn wave_kpy_step(
    state: &mut ThreeLevelState,
    c: f64,
    dt: f64,
    source: &NodalSource,
    exact: &ExactSolution,
    variant: &SchemeVariant,
) -> Result<()> {
    let dx = state.curr.grid.dx;
    check_stability(dt, dx / c.abs())?;
    let t = state.time();
    let (dt2, c2) = (dt * dt, c * c);
    let mut rhs = source.combine(t, &[(dt2, Partial::VALUE)])?;
    if variant.nidc {
        let corr = source.combine(t, &[(dt2 * dt2 * c2 / 12.0, Partial::XX), (dt2 * dt2 / 12.0, Partial::TT)])?;
        rhs.iter_mut().zip(corr).for_each(|(r, c)| *r += c);
    }
    let lam2 = c2 * dt2 / (dx * dx);
    let (u, um) = (state.curr.nodes(), state.prev.nodes());
    let next = update_interior(&state.curr, t + dt, exact, |i| {
        2.0 * u[i] - um[i] + lam2 * (u[i + 1] - 2.0 * u[i] + u[i - 1]) + rhs[i]
    });
    state.advance(next);
    guard_finite(&state.curr, state.step)
}

/// Forward Euler with the second-order Laplacian, plus `dt^2 (D f_xx + f_t) / 2`.
pub fn diffusion_fe_step(
    state: &mut TwoLevelState,
    d: f64,
    dt: f64,
    source: &NodalSource,
    exact: &ExactSolution,
    variant: &SchemeVariant,
) -> Result<()> {
    let dx = state.u.grid.dx;
    check_stability(dt, dx * dx / (2.0 * d))?;
    let t = state.time();
    let mut rhs = source.combine(t, &[(dt, Partial::VALUE)])?;
    if variant.nidc {
        let corr = source.combine(t, &[(0.5 * dt * dt * d, Partial::XX), (0.5 * dt * dt, Partial::T)])?;
        rhs.iter_mut().zip(corr).for_each(|(r, c)| *r += c);
    }
    let r = d * dt / (dx * dx);
    let u = state.u.nodes();
    let next = update_interior(&state.u, t + dt, exact, |i| u[i] + r * (u[i + 1] - 2.0 * u[i] + u[i - 1]) + rhs[i]);
    state.u = next;
    state.step += 1;
    guard_finite(&state.u, state.step)
}

/// Second level for DuFort-Frankel: four Taylor terms from the exact solution's time derivatives.
pub fn dufort_frankel_start(grid: &UniformGrid1D, exact: &ExactSolution, t0: f64, dt: f64) -> Result<ScalarField1D> {
    let u_t = exact.derivative(Partial::T)?;
    let u_tt = exact.derivative(Partial::TT)?;
    let u_ttt = exact.derivative(Partial::TTT)?;
    Ok(ScalarField1D::from_fn(grid.clone(), t0 + dt, |x| {
        exact.value(x, 0.0, t0)
            + dt * u_t.at(x, 0.0, t0)
            + dt * dt / 2.0 * u_tt.at(x, 0.0, t0)
            + dt * dt * dt / 6.0 * u_ttt.at(x, 0.0, t0)
    }))
}

/// `(u^{n+1} - u^{n-1}) / 2dt = D (u_{j+1} - u^{n+1} - u^{n-1} + u_{j-1}) / dx^2 + f`, solved
/// for `u^{n+1}`; the correction adds `2 D dt^3 (D f_xx + f_t) / dx^2`.
pub fn dufort_frankel_step(
    state: &mut ThreeLevelState,
    d: f64,
    dt: f64,
    source: &NodalSource,
    exact: &ExactSolution,
    variant: &SchemeVariant,
) -> Result<()> {
    let dx = state.curr.grid.dx;
    if !(dt > 0.0) {
        return Err(Error::Config(format!("time step must be positive, got {dt}")));
    }
    let t = state.time();
    let r = d * dt / (dx * dx);
    let mut rhs = source.combine(t, &[(2.0 * dt, Partial::VALUE)])?;
    if variant.nidc {
        let k = 2.0 * d * dt * dt * dt / (dx * dx);
        let corr = source.combine(t, &[(k * d, Partial::XX), (k, Partial::T)])?;
        rhs.iter_mut().zip(corr).for_each(|(r, c)| *r += c);
    }
    let inv = 1.0 / (1.0 + 2.0 * r);
    let (u, um) = (state.curr.nodes(), state.prev.nodes());
    let next = update_interior(&state.curr, t + dt, exact, |i| {
        ((1.0 - 2.0 * r) * um[i] + 2.0 * r * (u[i + 1] + u[i - 1]) + rhs[i]) * inv
    });
    state.advance(next);
    guard_finite(&state.curr, state.step)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BurgersCorrection {
    /// `-(dt^2/2)(4 nu u_x u_xx - 2 u u_x^2 - u^2 u_xx)`.
    #[default]
    Derived,
    /// Same bracket with `u_xx^2` in place of `u_x^2`.
    Printed,
}

/// Correction increment for one node.
pub fn burgers_correction(u: f64, ux: f64, uxx: f64, nu: f64, dt: f64, form: BurgersCorrection) -> f64 {
    let sq = match form {
        BurgersCorrection::Derived => ux * ux,
        BurgersCorrection::Printed => uxx * uxx,
    };
    -0.5 * dt * dt * (4.0 * nu * ux * uxx - 2.0 * u * sq - u * u * uxx)
}

/// Forward Euler for `u_t + u u_x = nu u_xx` with central differences.
pub fn burgers_fe_step(
    state: &mut TwoLevelState,
    nu: f64,
    dt: f64,
    exact: &ExactSolution,
    variant: &SchemeVariant,
    form: BurgersCorrection,
) -> Result<()> {
    let dx = state.u.grid.dx;
    check_stability(dt, dx * dx / (2.0 * nu))?;
    let ux = gradient_central_1d(&state.u)?;
    let uxx = laplacian_1d_c2(&state.u)?;
    let u = state.u.nodes();
    let next = update_interior(&state.u, state.time() + dt, exact, |i| {
        let mut v = u[i] + dt * (nu * uxx[i] - u[i] * ux[i]);
        if variant.nidc {
            v += burgers_correction(u[i], ux[i], uxx[i], nu, dt, form);
        }
        v
    });
    state.u = next;
    state.step += 1;
    guard_finite(&state.u, state.step)
}

/// Forward Euler for `u_t = -kappa u_xxxx + f` with the seven-point bilaplacian, plus
/// `-(dt^2/2)(kappa f_xxxx - f_t)`.
pub fn parabolic4_fe_step(
    state: &mut TwoLevelState,
    kappa: f64,
    dt: f64,
    source: &NodalSource,
    exact: &ExactSolution,
    variant: &SchemeVariant,
) -> Result<()> {
    let dx = state.u.grid.dx;
    check_stability(dt, 3.0 * dx.powi(4) / (40.0 * kappa))?;
    let t = state.time();
    let mut rhs = source.combine(t, &[(dt, Partial::VALUE)])?;
    if variant.nidc {
        let corr = source.combine(t, &[(-0.5 * dt * dt * kappa, Partial::XXXX), (0.5 * dt * dt, Partial::T)])?;
        rhs.iter_mut().zip(corr).for_each(|(r, c)| *r += c);
    }
    let b = bilaplacian_1d_o4(&state.u)?;
    let u = state.u.nodes();
    let next = update_interior(&state.u, t + dt, exact, |i| u[i] - dt * kappa * b[i] + rhs[i]);
    state.u = next;
    state.step += 1;
    guard_finite(&state.u, state.step)
}

/// Solves `(I + theta dt A) u^{n+1} = (I - (1 - theta) dt A) u^n + dt((1-theta) f^n + theta f^{n+1})`
/// for a symmetric difference operator `A` with the given weights (half-width `w`).
fn implicit_step(
    state: &mut TwoLevelState,
    weights: &[f64],
    scale: f64,
    theta: f64,
    dt: f64,
    source: &NodalSource,
    exact: &ExactSolution,
) -> Result<()> {
    let w = weights.len() / 2;
    let grid = state.u.grid.clone();
    if grid.ghost_width + 1 < w {
        return Err(Error::InsufficientGhost { needed: w - 1, have: grid.ghost_width });
    }
    let n = grid.n;
    let m = n - 2;
    let t0 = state.time();
    let t1 = t0 + dt;
    let mut next = state.u.clone();
    next.time = t1;
    fill_boundary(&mut next, exact);

    let f0 = source.combine(t0, &[((1.0 - theta) * dt, Partial::VALUE)])?;
    let f1 = source.combine(t1, &[(theta * dt, Partial::VALUE)])?;
    let mut a = BandedMatrix::zeros(m, w, w);
    let mut rhs = vec![0.0; m];
    for row in 0..m {
        let i = row as isize + 1;
        let mut explicit = 0.0;
        let mut known = 0.0;
        for (k, &wk) in weights.iter().enumerate() {
            let j = i + k as isize - w as isize;
            let c = scale * wk;
            explicit += c * state.u.get(j);
            if j >= 1 && j <= m as isize {
                let diag = if j == i { 1.0 } else { 0.0 };
                a.set(row, (j - 1) as usize, diag + theta * dt * c);
            } else {
                known += theta * dt * c * next.get(j);
            }
        }
        rhs[row] = state.u.get(i) - (1.0 - theta) * dt * explicit + f0[i as usize] + f1[i as usize] - known;
    }
    let sol = if w == 1 {
        let sub: Vec<f64> = (0..m).map(|r| if r > 0 { a.get(r, r - 1) } else { 0.0 }).collect();
        let diag: Vec<f64> = (0..m).map(|r| a.get(r, r)).collect();
        let sup: Vec<f64> = (0..m).map(|r| if r + 1 < m { a.get(r, r + 1) } else { 0.0 }).collect();
        solve_tridiagonal(&sub, &diag, &sup, &rhs)?
    } else {
        solve_banded(&a, &rhs)?
    };
    next.nodes_mut()[1..n - 1].copy_from_slice(&sol);
    state.u = next;
    state.step += 1;
    guard_finite(&state.u, state.step)
}

const NEG_LAPLACIAN: [f64; 3] = [-1.0, 2.0, -1.0];

pub fn backward_euler_diffusion_step(
    state: &mut TwoLevelState,
    d: f64,
    dt: f64,
    source: &NodalSource,
    exact: &ExactSolution,
) -> Result<()> {
    let dx = state.u.grid.dx;
    implicit_step(state, &NEG_LAPLACIAN, d / (dx * dx), 1.0, dt, source, exact)
}

pub fn crank_nicolson_diffusion_step(
    state: &mut TwoLevelState,
    d: f64,
    dt: f64,
    source: &NodalSource,
    exact: &ExactSolution,
) -> Result<()> {
    let dx = state.u.grid.dx;
    implicit_step(state, &NEG_LAPLACIAN, d / (dx * dx), 0.5, dt, source, exact)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BilaplacianOrder {
    Second,
    Fourth,
}

impl BilaplacianOrder {
    pub fn half_width(self) -> usize {
        match self {
            BilaplacianOrder::Second => 2,
            BilaplacianOrder::Fourth => 3,
        }
    }
}

pub fn crank_nicolson_parabolic4_step(
    state: &mut TwoLevelState,
    kappa: f64,
    dt: f64,
    source: &NodalSource,
    exact: &ExactSolution,
    order: BilaplacianOrder,
) -> Result<()> {
    let dx2 = state.u.grid.dx * state.u.grid.dx;
    match order {
        BilaplacianOrder::Second => {
            let w = crate::stencil::BILAPLACIAN_O2_WEIGHTS;
            implicit_step(state, &w, kappa / (dx2 * dx2), 0.5, dt, source, exact)
        }
        BilaplacianOrder::Fourth => {
            let w = crate::stencil::BILAPLACIAN_O4_WEIGHTS;
            implicit_step(state, &w, kappa / (6.0 * dx2 * dx2), 0.5, dt, source, exact)
        }
    }
}
