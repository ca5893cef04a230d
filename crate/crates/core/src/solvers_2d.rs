//! Two-dimensional steppers: optimal-ratio advection and nine-point diffusion
//! on rectangles and on level-set domains.

use crate::error::{Error, Result};
use crate::grid::{Axis, CellClassification, NodeKind, UniformGrid2D, CORNER_STENCIL};
use crate::linalg::{solve_cg, CgOptions, CgStats};
use crate::sources::{ExactSolution, NodalSource, Partial};
use crate::solvers_1d::SchemeVariant;
use crate::stencil::{laplacian_5pt_at, laplacian_9pt_at, mixed_xy_upwind_at, ScalarField2D, Wind};

/// Default shift threshold for edge-ghost extrapolation, in units of the spacing.
pub const DEFAULT_THETA: f64 = 0.5;

/// Source partials read by the nine-point corrected scheme.
pub const DIFFUSION_2D_BUNDLE: &[Partial] = &[Partial::XX, Partial::YY, Partial::T];

#[derive(Clone, Debug, PartialEq)]
pub struct TwoLevelState2D {
    pub u: ScalarField2D,
    pub step: usize,
}

impl TwoLevelState2D {
    pub fn from_exact(grid: UniformGrid2D, exact: &ExactSolution, t0: f64) -> Self {
        Self { u: ScalarField2D::from_fn(grid, t0, |x, y| exact.value(x, y, t0)), step: 0 }
    }

    pub fn time(&self) -> f64 {
        self.u.time
    }
}

/// Grid-frame nodes of a rectangle, row-major.
pub fn frame_nodes(grid: &UniformGrid2D) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..grid.ny).flat_map(move |j| (0..grid.nx).map(move |i| (i, j))).filter(|&(i, j)| grid.on_frame(i, j))
}

/// Off-frame nodes of a rectangle, row-major.
pub fn inner_nodes(grid: &UniformGrid2D) -> Vec<(usize, usize)> {
    (1..grid.ny - 1).flat_map(|j| (1..grid.nx - 1).map(move |i| (i, j))).collect()
}

/// Node coordinates for building a [`NodalSource`].
pub fn node_points(grid: &UniformGrid2D, nodes: &[(usize, usize)]) -> Vec<(f64, f64)> {
    nodes.iter().map(|&(i, j)| (grid.x(i as isize), grid.y(j as isize))).collect()
}

fn fill_frame(u: &mut ScalarField2D, exact: &ExactSolution) {
    let t = u.time;
    let grid = u.grid.clone();
    for (i, j) in frame_nodes(&grid) {
        let (x, y) = (grid.x(i as isize), grid.y(j as isize));
        u.set(i as isize, j as isize, exact.value(x, y, t));
    }
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Upwind forward Euler for `u_t + Ax u_x + Ay u_y = 0`; the correction adds
/// `Ax Ay dt^2 u_xy` with the upwind mixed difference.
///
/// Under the optimal policy the grid must satisfy `dy / dx = |Ay / Ax|` and
/// `dt = dx / |Ax|`, and the update is an exact diagonal index shift.
pub fn advection2d_step(
    state: &mut TwoLevelState2D,
    ax: f64,
    ay: f64,
    dt: f64,
    exact: &ExactSolution,
    variant: &SchemeVariant,
) -> Result<()> {
    let grid = state.u.grid.clone();
    let (dx, dy) = (grid.dx, grid.dy);
    let (cx, cy) = (ax.abs() * dt / dx, ay.abs() * dt / dy);
    if variant.ots() {
        let expected = (ay / ax).abs();
        if !rel_close(grid.dy_over_dx, expected, 1e-14) {
            return Err(Error::RatioMismatch { expected, actual: grid.dy_over_dx });
        }
        let optimal = dx / ax.abs();
        if !rel_close(dt, optimal, 1e-14) {
            return Err(Error::Config(format!("optimal advection needs dt = dx/|Ax| = {optimal}, got {dt}")));
        }
    }
    if variant.nidc {
        if cx.max(cy) > 1.0 + 1e-12 {
            return Err(Error::Stability { dt, limit: (dx / ax.abs()).min(dy / ay.abs()) });
        }
    } else if cx + cy > 1.0 + 1e-12 {
        return Err(Error::Stability { dt, limit: 1.0 / (ax.abs() / dx + ay.abs() / dy) });
    }
    let winds = (Wind::of(ax), Wind::of(ay));
    let (sx, sy) = (winds.0.sign(), winds.1.sign());
    let u = &state.u;
    let mut next = u.clone();
    next.time = u.time + dt;
    let corr = ax * ay * dt * dt;
    for j in 1..grid.ny as isize - 1 {
        for i in 1..grid.nx as isize - 1 {
            let c = u.get(i, j);
            let mut v = c - cx * (c - u.get(i - sx, j)) - cy * (c - u.get(i, j - sy));
            if variant.nidc {
                v += corr * mixed_xy_upwind_at(u, i, j, winds);
            }
            next.set(i, j, v);
        }
    }
    fill_frame(&mut next, exact);
    state.u = next;
    state.step += 1;
    Ok(())
}

/// Nine-point forward-Euler update at `nodes`; `rhs[k]` is the source
/// contribution for `nodes[k]`.
fn nine_point_update(u: &ScalarField2D, next: &mut ScalarField2D, nodes: &[(usize, usize)], d: f64, dt: f64, rhs: &[f64]) {
    for (k, &(i, j)) in nodes.iter().enumerate() {
        let (i, j) = (i as isize, j as isize);
        next.set(i, j, u.get(i, j) + dt * d * laplacian_9pt_at(u, i, j) + rhs[k]);
    }
}

fn source_increment(source: &NodalSource, t: f64, d: f64, dt: f64, variant: &SchemeVariant) -> Result<Vec<f64>> {
    let mut terms = vec![(dt, Partial::VALUE)];
    if variant.nidc {
        let h = 0.5 * dt * dt;
        terms.extend([(h * d, Partial::XX), (h * d, Partial::YY), (h, Partial::T)]);
    }
    source.combine(t, &terms)
}

fn check_diffusion_9pt(grid: &UniformGrid2D, d: f64, dt: f64) -> Result<()> {
    grid.require_square()?;
    let limit = 3.0 * grid.dx * grid.dx / (8.0 * d);
    if !(dt > 0.0) {
        return Err(Error::Config(format!("time step must be positive, got {dt}")));
    }
    if dt > limit * (1.0 + 1e-12) {
        return Err(Error::Stability { dt, limit });
    }
    Ok(())
}

/// Forward Euler with the nine-point Laplacian on a rectangle; the correction adds
/// `(dt^2/2)(D lap f + f_t)`. `source` must be sampled at [`inner_nodes`].
pub fn diffusion2d_9pt_step(
    state: &mut TwoLevelState2D,
    d: f64,
    dt: f64,
    source: &NodalSource,
    exact: &ExactSolution,
    variant: &SchemeVariant,
) -> Result<()> {
    let grid = state.u.grid.clone();
    check_diffusion_9pt(&grid, d, dt)?;
    let nodes = inner_nodes(&grid);
    if source.len() != nodes.len() {
        return Err(Error::Config("source was not sampled at the inner nodes".into()));
    }
    let rhs = source_increment(source, state.time(), d, dt, variant)?;
    let mut next = state.u.clone();
    next.time = state.time() + dt;
    nine_point_update(&state.u, &mut next, &nodes, d, dt, &rhs);
    fill_frame(&mut next, exact);
    state.u = next;
    state.step += 1;
    Ok(())
}

/// Value of the cubic through `(s_k, v_k)` at `s = 0`.
fn lagrange_at_zero(s: [f64; 4], v: [f64; 4]) -> f64 {
    let mut total = 0.0;
    for k in 0..4 {
        let mut w = 1.0;
        for m in 0..4 {
            if m != k {
                w *= (0.0 - s[m]) / (s[k] - s[m]);
            }
        }
        total += w * v[k];
    }
    total
}

/// Sets every edge ghost by cubic extrapolation through the boundary value and
/// three interior nodes along its fill axis.
pub fn fill_edge_ghosts(
    u: &mut ScalarField2D,
    cls: &CellClassification,
    boundary_value: &dyn Fn(f64, f64) -> f64,
    theta: f64,
) -> Result<()> {
    for g in &cls.edge_ghosts {
        let (cand, support) = g.choose(theta).ok_or(Error::NotEnoughInteriorPoints { i: g.i, j: g.j })?;
        let (di, dj) = match cand.axis {
            Axis::X => (cand.dir as isize, 0),
            Axis::Y => (0, cand.dir as isize),
        };
        let (gi, gj) = (g.i as isize, g.j as isize);
        let mut s = [cand.frac, 0.0, 0.0, 0.0];
        let mut v = [boundary_value(cand.boundary.0, cand.boundary.1), 0.0, 0.0, 0.0];
        for (k, &off) in support.iter().enumerate() {
            s[k + 1] = off as f64;
            v[k + 1] = u.get(gi + di * off as isize, gj + dj * off as isize);
        }
        u.set(gi, gj, lagrange_at_zero(s, v));
    }
    Ok(())
}

/// Sets every corner ghost from the reflected eight-point stencil around its anchor.
///
/// Fails if a stencil node has not been filled yet (reads as NaN).
pub fn fill_corner_ghosts(u: &mut ScalarField2D, cls: &CellClassification) -> Result<()> {
    for g in &cls.corner_ghosts {
        let (ai, aj) = (g.anchor.0 as isize, g.anchor.1 as isize);
        let (sx, sy) = (g.orient.0 as isize, g.orient.1 as isize);
        let mut v = 0.0;
        for &((p, q), w) in &CORNER_STENCIL {
            let val = u.get(ai + sx * p as isize, aj + sy * q as isize);
            if val.is_nan() {
                return Err(Error::UnfilledGhost { i: g.i, j: g.j });
            }
            v += w * val;
        }
        u.set(g.i as isize, g.j as isize, v);
    }
    Ok(())
}

/// Marks every node outside the domain as unfilled.
pub fn clear_exterior(u: &mut ScalarField2D, cls: &CellClassification) {
    let nx = cls.grid.nx;
    for (k, kind) in cls.kinds.iter().enumerate() {
        if *kind != NodeKind::Interior {
            u.set((k % nx) as isize, (k / nx) as isize, f64::NAN);
        }
    }
}

/// Interior nodes on the grid frame take exact values.
fn fill_interior_frame(u: &mut ScalarField2D, cls: &CellClassification, exact: &ExactSolution) {
    let grid = &cls.grid;
    let t = u.time;
    for (i, j) in frame_nodes(grid) {
        if cls.kind(i, j) == NodeKind::Interior {
            let (x, y) = (grid.x(i as isize), grid.y(j as isize));
            u.set(i as isize, j as isize, exact.value(x, y, t));
        }
    }
}

/// Initial field on a level-set domain: exact values inside, NaN outside.
pub fn irregular_initial(cls: &CellClassification, exact: &ExactSolution, t0: f64) -> ScalarField2D {
    let grid = cls.grid.clone();
    let mut u = ScalarField2D::from_fn(grid, t0, |x, y| exact.value(x, y, t0));
    clear_exterior(&mut u, cls);
    u
}

/// Fills ghosts from the Dirichlet data at the field's time, then applies the
/// nine-point update at the active nodes. `source` must be sampled at `cls.active`.
#[allow(clippy::too_many_arguments)]
pub fn diffusion2d_irregular_step(
    state: &mut TwoLevelState2D,
    cls: &CellClassification,
    d: f64,
    dt: f64,
    source: &NodalSource,
    exact: &ExactSolution,
    variant: &SchemeVariant,
    theta: f64,
) -> Result<()> {
    check_diffusion_9pt(&cls.grid, d, dt)?;
    if source.len() != cls.active.len() {
        return Err(Error::Config("source was not sampled at the active nodes".into()));
    }
    let t = state.time();
    clear_exterior(&mut state.u, cls);
    fill_edge_ghosts(&mut state.u, cls, &|x, y| exact.value(x, y, t), theta)?;
    fill_corner_ghosts(&mut state.u, cls)?;
    let rhs = source_increment(source, t, d, dt, variant)?;
    let mut next = state.u.clone();
    next.time = t + dt;
    nine_point_update(&state.u, &mut next, &cls.active, d, dt, &rhs);
    clear_exterior(&mut next, cls);
    fill_interior_frame(&mut next, cls, exact);
    if cls.active.iter().any(|&(i, j)| !next.get(i as isize, j as isize).is_finite()) {
        return Err(Error::Diverged { step: state.step + 1 });
    }
    state.u = next;
    state.step += 1;
    Ok(())
}

/// Crank-Nicolson with the five-point Laplacian, solved by conjugate gradients.
/// `source` must be sampled at [`inner_nodes`].
pub fn crank_nicolson_2d_5pt(
    state: &mut TwoLevelState2D,
    d: f64,
    dt: f64,
    source: &NodalSource,
    exact: &ExactSolution,
    rel_tol: f64,
) -> Result<CgStats> {
    let grid = state.u.grid.clone();
    grid.require_square()?;
    let nodes = inner_nodes(&grid);
    if source.len() != nodes.len() {
        return Err(Error::Config("source was not sampled at the inner nodes".into()));
    }
    let (mx, my) = (grid.nx - 2, grid.ny - 2);
    let t0 = state.time();
    let mut next = state.u.clone();
    next.time = t0 + dt;
    fill_frame(&mut next, exact);

    let half = 0.5 * dt * d;
    let f0 = source.combine(t0, &[(0.5 * dt, Partial::VALUE)])?;
    let f1 = source.combine(t0 + dt, &[(0.5 * dt, Partial::VALUE)])?;
    let h2 = grid.dx * grid.dx;
    let k = half / h2;

    // Right-hand side: explicit half step plus the known boundary values at the new level.
    let mut rhs = vec![0.0; nodes.len()];
    for (idx, &(i, j)) in nodes.iter().enumerate() {
        let (ii, jj) = (i as isize, j as isize);
        let mut b = state.u.get(ii, jj) + half * laplacian_5pt_at(&state.u, ii, jj) + f0[idx] + f1[idx];
        for (a, c) in [(1, 0), (-1, 0), (0, 1), (0, -1)] {
            let (ni, nj) = (ii + a, jj + c);
            if grid.on_frame(ni as usize, nj as usize) {
                b += k * next.get(ni, nj);
            }
        }
        rhs[idx] = b;
    }
    let apply = |x: &[f64], out: &mut [f64]| {
        for j in 0..my {
            for i in 0..mx {
                let c = x[j * mx + i];
                let mut s = 0.0;
                if i > 0 {
                    s += x[j * mx + i - 1];
                }
                if i + 1 < mx {
                    s += x[j * mx + i + 1];
                }
                if j > 0 {
                    s += x[(j - 1) * mx + i];
                }
                if j + 1 < my {
                    s += x[(j + 1) * mx + i];
                }
                out[j * mx + i] = (1.0 + 4.0 * k) * c - k * s;
            }
        }
    };
    let mut x: Vec<f64> = nodes.iter().map(|&(i, j)| state.u.get(i as isize, j as isize)).collect();
    let stats = solve_cg(apply, &rhs, &mut x, CgOptions { rel_tol, max_iter: 10 * nodes.len() })?;
    for (idx, &(i, j)) in nodes.iter().enumerate() {
        next.set(i as isize, j as isize, x[idx]);
    }
    state.u = next;
    state.step += 1;
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{classify_cells, ImplicitDomain};
    use crate::ots::TimeStepPolicy;
    use crate::sources::{fixture, square_pulse_2d, Advected, Factor, SeparableSum, SourceModel, Term};
    use std::sync::Arc;

    fn profile_exact(f: impl Fn(f64, f64) -> f64 + Send + Sync + 'static, ax: f64, ay: f64) -> ExactSolution {
        ExactSolution::new("p", Arc::new(Advected { profile: Arc::new(f), ax, ay }))
    }

    #[test]
    fn optimal_advection_is_a_diagonal_shift() {
        let (ax, ay) = (-1.0, -2.0);
        let grid = UniformGrid2D::with_spacing((-9.9, -19.8), 100, 100, 0.2, 0.4, 0).unwrap();
        let exact = ExactSolution::new("pulse", Arc::new(Advected { profile: square_pulse_2d(), ax, ay }));
        let mut s = TwoLevelState2D::from_exact(grid.clone(), &exact, 0.0);
        let u0 = s.u.clone();
        let dt = grid.dx / ax.abs();
        for _ in 0..15 {
            advection2d_step(&mut s, ax, ay, dt, &exact, &SchemeVariant::OTS_NIDC).unwrap();
        }
        for j in 1..84isize {
            for i in 1..84isize {
                assert_eq!(s.u.get(i, j), u0.get(i + 15, j + 15), "({i}, {j})");
            }
        }
    }

    #[test]
    fn advection_rejects_wrong_ratio_and_cfl() {
        let grid = UniformGrid2D::square(0.0, 1.0, 11, 0).unwrap();
        let c = profile_exact(|_, _| 2.0, 1.0, 2.0);
        let mut s = TwoLevelState2D::from_exact(grid.clone(), &c, 0.0);
        assert!(matches!(
            advection2d_step(&mut s, 1.0, 2.0, grid.dx, &c, &SchemeVariant::OTS_NIDC),
            Err(Error::RatioMismatch { .. })
        ));
        let sub = SchemeVariant::new(false, TimeStepPolicy::FractionOfStability(0.5));
        assert!(matches!(advection2d_step(&mut s, 1.0, 2.0, grid.dx / 2.0, &c, &sub), Err(Error::Stability { .. })));
        advection2d_step(&mut s, 1.0, 2.0, grid.dx / 6.0, &c, &sub).unwrap();
        assert!(s.u.nodes().iter().all(|&v| v == 2.0));

        let ratio_grid = UniformGrid2D::with_spacing((0.0, 0.0), 11, 11, 0.1, 0.2, 0).unwrap();
        let mut s = TwoLevelState2D::from_exact(ratio_grid, &c, 0.0);
        let plain_ots = SchemeVariant::new(false, TimeStepPolicy::Optimal);
        assert!(matches!(advection2d_step(&mut s, 1.0, 2.0, 0.1, &c, &plain_ots), Err(Error::Stability { .. })));
    }

    #[test]
    fn nine_point_eigenmode_amplification() {
        // u = sin(x) sin(y) e^{-2t}; one OTS step differs from e^{-2 dt} by O(dx^6).
        let mut errs = Vec::new();
        for k in 0..3 {
            let n = 10 * 2usize.pow(k) + 1;
            let grid = UniformGrid2D::square(0.0, 3.0, n, 0).unwrap();
            let dx = grid.dx;
            let dt = dx * dx / 6.0;
            let exact = ExactSolution::new(
                "eig",
                Arc::new(SeparableSum::new(vec![Term::new(
                    1.0,
                    Factor::Sin { k: 1.0, phase: 0.0 },
                    Factor::Sin { k: 1.0, phase: 0.0 },
                    Factor::Exp { rate: -2.0 },
                )])),
            );
            let mut s = TwoLevelState2D::from_exact(grid.clone(), &exact, 0.0);
            let src = NodalSource::new(&SourceModel::zero(), &node_points(&grid, &inner_nodes(&grid)), DIFFUSION_2D_BUNDLE).unwrap();
            diffusion2d_9pt_step(&mut s, 1.0, dt, &src, &exact, &SchemeVariant::OTS_NIDC).unwrap();
            // Exact symbol of the nine-point Laplacian on sin(x) sin(y).
            let (cx, h2) = (dx.cos(), dx * dx);
            let symbol = (4.0 * cx * cx + 16.0 * cx - 20.0) / (6.0 * h2);
            let g = 1.0 + dt * symbol;
            let (i, j) = (n as isize / 2, n as isize / 3);
            let x = grid.x(i).sin() * grid.y(j).sin();
            assert!((s.u.get(i, j) - g * x).abs() < 1e-14);
            errs.push((g - (-2.0 * dt).exp()).abs());
        }
        for w in errs.windows(2) {
            assert!(((w[0] / w[1]).log2() - 6.0).abs() < 0.3, "{errs:?}");
        }
    }

    #[test]
    fn edge_ghost_extrapolation_exactness() {
        // Half-plane x <= 0.05 on [-1, 1]^2; ghosts at x = 0.1 extrapolate along -x.
        let grid = UniformGrid2D::square(-1.0, 1.0, 21, 1).unwrap();
        let d = ImplicitDomain::new(|x, _| x - 0.05, grid.clone());
        let cls = classify_cells(&d).unwrap();
        for (f, tol) in [
            (Box::new(|x: f64, y: f64| 2.0 * x - y + 0.3) as Box<dyn Fn(f64, f64) -> f64>, 1e-14),
            (Box::new(|x: f64, y: f64| x * x * x - 0.5 * x * x + y), 1e-13),
        ] {
            let mut u = ScalarField2D::from_fn(grid.clone(), 0.0, &f);
            clear_exterior(&mut u, &cls);
            fill_edge_ghosts(&mut u, &cls, &f, DEFAULT_THETA).unwrap();
            for g in &cls.edge_ghosts {
                let (x, y) = (grid.x(g.i as isize), grid.y(g.j as isize));
                assert!((u.get(g.i as isize, g.j as isize) - f(x, y)).abs() < tol);
            }
        }
    }

    #[test]
    fn edge_ghost_quartic_error_is_fourth_order() {
        let mut errs = Vec::new();
        for k in 0..4 {
            let n = 10 * 2usize.pow(k) + 1;
            let grid = UniformGrid2D::square(-1.0, 1.0, n, 1).unwrap();
            let dx = grid.dx;
            // Boundary a fixed fraction 0.3 of a cell past the node at x = 0.
            let xb = 0.3 * dx;
            let d = ImplicitDomain::new(move |x, _| x - xb, grid.clone());
            let cls = classify_cells(&d).unwrap();
            let f = |x: f64, _: f64| x.powi(4);
            let mut u = ScalarField2D::from_fn(grid.clone(), 0.0, f);
            clear_exterior(&mut u, &cls);
            fill_edge_ghosts(&mut u, &cls, &f, DEFAULT_THETA).unwrap();
            let g = &cls.edge_ghosts[0];
            errs.push((u.get(g.i as isize, g.j as isize) - f(grid.x(g.i as isize), 0.0)).abs());
        }
        for w in errs.windows(2) {
            assert!(((w[0] / w[1]).log2() - 4.0).abs() < 0.3, "{errs:?}");
        }
    }

    #[test]
    fn corner_ghost_weight_examples() {
        // Unit spacing, anchor at the origin, ghost at (1, 1).
        let grid = UniformGrid2D::with_spacing((-1.0, -1.0), 3, 3, 1.0, 1.0, 0).unwrap();
        for (f, expect) in [
            (Box::new(|x: f64, _: f64| x) as Box<dyn Fn(f64, f64) -> f64>, 1.0),
            (Box::new(|x: f64, y: f64| x * y), 1.0),
            (Box::new(|_: f64, _: f64| 4.5), 4.5),
        ] {
            let u = ScalarField2D::from_fn(grid.clone(), 0.0, &f);
            let v: f64 = CORNER_STENCIL.iter().map(|&((p, q), w)| w * u.get(1 + p as isize, 1 + q as isize)).sum();
            assert!((v - expect).abs() < 1e-14);
        }
    }

    #[test]
    fn corner_fill_detects_unfilled_edge_ghosts() {
        let grid = UniformGrid2D::square(-1.0, 1.0, 51, 1).unwrap();
        let d = ImplicitDomain::starfish(0.5, 0.15, 0.1, grid.clone());
        let cls = classify_cells(&d).unwrap();
        let f = |x: f64, y: f64| (x + 2.0 * y).sin();
        let mut u = ScalarField2D::from_fn(grid.clone(), 0.0, f);
        clear_exterior(&mut u, &cls);
        assert!(matches!(fill_corner_ghosts(&mut u, &cls), Err(Error::UnfilledGhost { .. })));
        fill_edge_ghosts(&mut u, &cls, &f, DEFAULT_THETA).unwrap();
        fill_corner_ghosts(&mut u, &cls).unwrap();
        for g in &cls.corner_ghosts {
            let (x, y) = (grid.x(g.i as isize), grid.y(g.j as isize));
            assert!((u.get(g.i as isize, g.j as isize) - f(x, y)).abs() < 20.0 * grid.dx * grid.dx);
        }
    }

    #[test]
    fn irregular_stepper_on_a_rectangle_matches_regular() {
        let fx = fixture("diffusion2d-manufactured").unwrap();
        let grid = UniformGrid2D::square(-1.0, 1.0, 17, 1).unwrap();
        let cls = classify_cells(&ImplicitDomain::new(|_, _| -1.0, grid.clone())).unwrap();
        assert_eq!(cls.active, inner_nodes(&grid));
        let pts = node_points(&grid, &cls.active);
        let src = NodalSource::new(&fx.source, &pts, DIFFUSION_2D_BUNDLE).unwrap();
        let dt = grid.dx * grid.dx / 6.0;
        let mut a = TwoLevelState2D::from_exact(grid.clone(), &fx.exact, 0.0);
        let mut b = a.clone();
        for _ in 0..5 {
            diffusion2d_9pt_step(&mut a, 1.0, dt, &src, &fx.exact, &SchemeVariant::OTS_NIDC).unwrap();
            diffusion2d_irregular_step(&mut b, &cls, 1.0, dt, &src, &fx.exact, &SchemeVariant::OTS_NIDC, DEFAULT_THETA).unwrap();
        }
        assert_eq!(a.u.nodes(), b.u.nodes());
    }

    #[test]
    fn nine_point_rejects_anisotropic_and_unstable() {
        let fx = fixture("diffusion2d-manufactured").unwrap();
        let grid = UniformGrid2D::new((0.0, 1.0), (0.0, 2.0), 11, 11, 0).unwrap();
        let src = NodalSource::new(&fx.source, &node_points(&grid, &inner_nodes(&grid)), DIFFUSION_2D_BUNDLE).unwrap();
        let mut s = TwoLevelState2D::from_exact(grid.clone(), &fx.exact, 0.0);
        assert!(matches!(
            diffusion2d_9pt_step(&mut s, 1.0, 1e-4, &src, &fx.exact, &SchemeVariant::OTS_NIDC),
            Err(Error::AnisotropicGrid { .. })
        ));
        let grid = UniformGrid2D::square(0.0, 1.0, 11, 0).unwrap();
        let mut s = TwoLevelState2D::from_exact(grid.clone(), &fx.exact, 0.0);
        assert!(matches!(
            diffusion2d_9pt_step(&mut s, 1.0, 0.4 * grid.dx * grid.dx, &src, &fx.exact, &SchemeVariant::OTS_NIDC),
            Err(Error::Stability { .. })
        ));
    }

    #[test]
    fn crank_nicolson_2d_eigenmode() {
        use std::f64::consts::PI;
        let grid = UniformGrid2D::square(0.0, 1.0, 17, 0).unwrap();
        let zero = profile_exact(|_, _| 0.0, 0.0, 0.0);
        let mode = |x: f64, y: f64| (PI * x).sin() * (2.0 * PI * y).sin();
        let mut s = TwoLevelState2D { u: ScalarField2D::from_fn(grid.clone(), 0.0, mode), step: 0 };
        fill_frame(&mut s.u, &zero);
        let u0 = s.u.clone();
        let src = NodalSource::new(&SourceModel::zero(), &node_points(&grid, &inner_nodes(&grid)), &[]).unwrap();
        let (d, dt) = (0.8, 0.01);
        crank_nicolson_2d_5pt(&mut s, d, dt, &src, &zero, 1e-13).unwrap();
        let h = grid.dx;
        let z = d * dt * ((2.0 - 2.0 * (PI * h).cos()) + (2.0 - 2.0 * (2.0 * PI * h).cos())) / (h * h);
        let g = (1.0 - z / 2.0) / (1.0 + z / 2.0);
        for (a, b) in s.u.nodes().iter().zip(u0.nodes()) {
            assert!((a - g * b).abs() < 1e-11);
        }
        let c = profile_exact(|_, _| 0.7, 0.0, 0.0);
        let mut s = TwoLevelState2D::from_exact(grid.clone(), &c, 0.0);
        crank_nicolson_2d_5pt(&mut s, d, dt, &src, &c, 1e-13).unwrap();
        assert!(s.u.nodes().iter().all(|v| (v - 0.7).abs() < 1e-13));
    }
}
