//! Browser bindings: 2D advection, 1D diffusion convergence and the starfish error map.
//!
//! Runs go through `Experiment::run` directly; the harness timer is not available on wasm32.

use otsfd::experiments::{advection_2d_run, lookup, starfish_run, RunContext, RunOptions};
use otsfd::grid::NodeKind;
use otsfd::harness::fit_order;
use otsfd::solvers_1d::SchemeVariant;
use otsfd::TimeStepPolicy;
use wasm_bindgen::prelude::*;

fn js_err(e: otsfd::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Row-major nodal field with a scalar error summary.
#[wasm_bindgen]
pub struct Field {
    nx: usize,
    ny: usize,
    values: Vec<f64>,
    error: f64,
    steps: usize,
}

#[wasm_bindgen]
impl Field {
    #[wasm_bindgen(getter)]
    pub fn nx(&self) -> usize {
        self.nx
    }
    #[wasm_bindgen(getter)]
    pub fn ny(&self) -> usize {
        self.ny
    }
    #[wasm_bindgen(getter)]
    pub fn values(&self) -> Vec<f64> {
        self.values.clone()
    }
    /// Max-norm error against the exact solution.
    #[wasm_bindgen(getter)]
    pub fn error(&self) -> f64 {
        self.error
    }
    #[wasm_bindgen(getter)]
    pub fn steps(&self) -> usize {
        self.steps
    }
}

/// Square pulse advected to the final time, on the ratio grid when `optimal`.
#[wasm_bindgen]
pub fn advect_square_pulse(n: usize, optimal: bool) -> Result<Field, JsError> {
    let e = lookup("advection-2d").map_err(js_err)?;
    let fx = e.default_fixture().map_err(js_err)?;
    let opts = RunOptions::default();
    let variant = if optimal { SchemeVariant::OTS_NIDC } else { SchemeVariant::new(false, e.suboptimal) };
    let ctx = RunContext { experiment: e, n, variant, final_time: e.final_time, fixture: &fx, options: &opts };
    let (u, outcome) = advection_2d_run(&ctx).map_err(js_err)?;
    let g = &u.grid;
    let values = (0..g.ny as isize).flat_map(|j| (0..g.nx as isize).map(move |i| (i, j))).map(|(i, j)| u.get(i, j)).collect();
    Ok(Field { nx: g.nx, ny: g.ny, values, error: outcome.error_linf, steps: outcome.steps })
}

/// Errors of a forward-Euler diffusion refinement study.
#[wasm_bindgen]
pub struct Study {
    n: Vec<u32>,
    errors: Vec<f64>,
    order: f64,
}

#[wasm_bindgen]
impl Study {
    #[wasm_bindgen(getter)]
    pub fn n(&self) -> Vec<u32> {
        self.n.clone()
    }
    #[wasm_bindgen(getter)]
    pub fn errors(&self) -> Vec<f64> {
        self.errors.clone()
    }
    /// Least-squares log-log slope, NaN with fewer than three levels.
    #[wasm_bindgen(getter)]
    pub fn order(&self) -> f64 {
        self.order
    }
}

/// `diffusion-1d-fe` at the optimal step with or without the source correction.
#[wasm_bindgen]
pub fn diffusion_convergence(n_min: usize, levels: usize, correction: bool) -> Result<Study, JsError> {
    let e = lookup("diffusion-1d-fe").map_err(js_err)?;
    let fx = e.default_fixture().map_err(js_err)?;
    let opts = RunOptions::default();
    let variant = SchemeVariant::new(correction, TimeStepPolicy::Optimal);
    let (mut n, mut dx, mut errors) = (Vec::new(), Vec::new(), Vec::new());
    for k in 0..levels {
        let nk = n_min << k;
        let out = e.run(nk, variant, e.final_time, &fx, &opts).map_err(js_err)?;
        n.push(nk as u32);
        dx.push(out.dx);
        errors.push(out.error_linf);
    }
    let order = fit_order(&dx, &errors).map_or(f64::NAN, |f| f.order);
    Ok(Study { n, errors, order })
}

/// Starfish run: values are `|u - exact|` on updated nodes, `-1` for edge
/// ghosts, `-2` for corner ghosts and NaN elsewhere.
#[wasm_bindgen]
pub fn starfish_error_map(n: usize, correction: bool) -> Result<Field, JsError> {
    let e = lookup("diffusion-2d-starfish").map_err(js_err)?;
    let fx = e.default_fixture().map_err(js_err)?;
    let opts = RunOptions::default();
    let variant = if correction { SchemeVariant::OTS_NIDC } else { SchemeVariant::new(false, e.suboptimal) };
    let ctx = RunContext { experiment: e, n, variant, final_time: e.final_time, fixture: &fx, options: &opts };
    let run = starfish_run(&ctx).map_err(js_err)?;
    let g = &run.cls.grid;
    let mut values: Vec<f64> = run
        .cls
        .kinds
        .iter()
        .map(|k| match k {
            NodeKind::EdgeGhost => -1.0,
            NodeKind::CornerGhost => -2.0,
            _ => f64::NAN,
        })
        .collect();
    for (i, j, err) in run.nodal_errors(&fx.exact) {
        values[j * g.nx + i] = err;
    }
    Ok(Field { nx: g.nx, ny: g.ny, values, error: run.outcome.error_linf, steps: run.outcome.steps })
}
