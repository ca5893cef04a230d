//! Exact solutions, source terms and the derivative bundles the defect
//! corrections read.
//!
//! Every function is evaluated at `(x, y, t)`; one-dimensional problems pass
//! `y = 0`. Derivatives are analytic. A scheme asks for the partials it needs
//! up front, and a missing one is a configuration error rather than a silent
//! zero.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Orders of differentiation in `x`, `y` and `t`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partial {
    pub x: u8,
    pub y: u8,
    pub t: u8,
}

impl Partial {
    pub const fn new(x: u8, y: u8, t: u8) -> Self {
        Self { x, y, t }
    }

    pub const VALUE: Partial = Partial::new(0, 0, 0);
    pub const X: Partial = Partial::new(1, 0, 0);
    pub const XX: Partial = Partial::new(2, 0, 0);
    pub const XXXX: Partial = Partial::new(4, 0, 0);
    pub const YY: Partial = Partial::new(0, 2, 0);
    pub const T: Partial = Partial::new(0, 0, 1);
    pub const TT: Partial = Partial::new(0, 0, 2);
    pub const TTT: Partial = Partial::new(0, 0, 3);
    pub const TXX: Partial = Partial::new(2, 0, 1);

    pub const fn plus(self, o: Partial) -> Partial {
        Partial::new(self.x + o.x, self.y + o.y, self.t + o.t)
    }
}

impl fmt::Display for Partial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if *self == Partial::VALUE {
            return write!(f, "value");
        }
        let s: String = std::iter::repeat_n('x', self.x as usize)
            .chain(std::iter::repeat_n('y', self.y as usize))
            .chain(std::iter::repeat_n('t', self.t as usize))
            .collect();
        f.write_str(&s)
    }
}

/// A smooth function of space and time exposing some of its partial derivatives.
pub trait SpaceTimeFn: Send + Sync {
    fn supports(&self, d: Partial) -> bool;

    /// Only meaningful when `supports(d)`.
    fn partial(&self, d: Partial, x: f64, y: f64, t: f64) -> f64;

    /// Separable form, when available, so samplers can cache spatial factors.
    fn as_separable(&self) -> Option<&SeparableSum> {
        None
    }
}

/// Checked handle to one partial derivative.
#[derive(Clone, Copy)]
pub struct Derivative<'a> {
    func: &'a dyn SpaceTimeFn,
    d: Partial,
}

impl Derivative<'_> {
    #[inline]
    pub fn at(&self, x: f64, y: f64, t: f64) -> f64 {
        self.func.partial(self.d, x, y, t)
    }
}

fn derivative<'a>(func: &'a dyn SpaceTimeFn, d: Partial, prefix: &str) -> Result<Derivative<'a>> {
    if func.supports(d) {
        Ok(Derivative { func, d })
    } else {
        Err(Error::MissingDerivative(format!("{prefix}_{d}")))
    }
}

#[derive(Clone)]
pub struct ExactSolution {
    pub name: String,
    pub func: Arc<dyn SpaceTimeFn>,
}

impl fmt::Debug for ExactSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExactSolution").field("name", &self.name).finish_non_exhaustive()
    }
}

impl ExactSolution {
    pub fn new(name: impl Into<String>, func: Arc<dyn SpaceTimeFn>) -> Self {
        Self { name: name.into(), func }
    }

    #[inline]
    pub fn value(&self, x: f64, y: f64, t: f64) -> f64 {
        self.func.partial(Partial::VALUE, x, y, t)
    }

    pub fn derivative(&self, d: Partial) -> Result<Derivative<'_>> {
        derivative(self.func.as_ref(), d, "u")
    }
}

#[derive(Clone)]
pub struct SourceModel {
    pub func: Arc<dyn SpaceTimeFn>,
}

impl fmt::Debug for SourceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SourceModel").finish_non_exhaustive()
    }
}

impl SourceModel {
    pub fn new(func: Arc<dyn SpaceTimeFn>) -> Self {
        Self { func }
    }

    pub fn zero() -> Self {
        Self { func: Arc::new(Zero) }
    }

    #[inline]
    pub fn f(&self, x: f64, y: f64, t: f64) -> f64 {
        self.func.partial(Partial::VALUE, x, y, t)
    }

    pub fn derivative(&self, d: Partial) -> Result<Derivative<'_>> {
        derivative(self.func.as_ref(), d, "f")
    }

    pub fn f_t(&self) -> Result<Derivative<'_>> {
        self.derivative(Partial::T)
    }

    pub fn f_xx(&self) -> Result<Derivative<'_>> {
        self.derivative(Partial::XX)
    }

    pub fn f_tt(&self) -> Result<Derivative<'_>> {
        self.derivative(Partial::TT)
    }

    pub fn f_xxxx(&self) -> Result<Derivative<'_>> {
        self.derivative(Partial::XXXX)
    }

    /// `lap f = f_xx + f_yy`.
    pub fn lap_f(&self) -> Result<impl Fn(f64, f64, f64) -> f64 + '_> {
        let fxx = self.derivative(Partial::XX)?;
        let fyy = self.derivative(Partial::YY)?;
        Ok(move |x, y, t| fxx.at(x, y, t) + fyy.at(x, y, t))
    }

    pub fn require(&self, partials: &[Partial]) -> Result<()> {
        partials.iter().try_for_each(|&d| self.derivative(d).map(|_| ()))
    }
}

/// The zero function; every derivative is supplied.
pub struct Zero;

static EMPTY_SUM: SeparableSum = SeparableSum { terms: Vec::new() };

impl SpaceTimeFn for Zero {
    fn supports(&self, _: Partial) -> bool {
        true
    }

    fn as_separable(&self) -> Option<&SeparableSum> {
        Some(&EMPTY_SUM)
    }

    fn partial(&self, _: Partial, _: f64, _: f64, _: f64) -> f64 {
        0.0
    }
}

/// One-variable factor of a separable term.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Factor {
    One,
    /// `sin(k s + phase)`.
    Sin { k: f64, phase: f64 },
    /// `exp(rate s)`.
    Exp { rate: f64 },
}

impl Factor {
    pub fn cos(k: f64, phase: f64) -> Self {
        Factor::Sin { k, phase: phase + FRAC_PI_2 }
    }

    /// `n`-th derivative as `scale * factor`.
    pub fn derivative(&self, n: u8) -> (f64, Factor) {
        match *self {
            Factor::One => (if n == 0 { 1.0 } else { 0.0 }, Factor::One),
            Factor::Sin { k, phase } => (k.powi(n as i32), Factor::Sin { k, phase: phase + n as f64 * FRAC_PI_2 }),
            Factor::Exp { rate } => (rate.powi(n as i32), *self),
        }
    }

    #[inline]
    pub fn deriv(&self, n: u8, s: f64) -> f64 {
        match *self {
            Factor::One => {
                if n == 0 { 1.0 } else { 0.0 }
            }
            Factor::Sin { k, phase } => {
                // Reduce the quarter-turn shift exactly instead of adding n * pi / 2.
                let arg = k * s + phase;
                let scale = k.powi(n as i32);
                scale
                    * match n % 4 {
                        0 => arg.sin(),
                        1 => arg.cos(),
                        2 => -arg.sin(),
                        _ => -arg.cos(),
                    }
            }
            Factor::Exp { rate } => rate.powi(n as i32) * (rate * s).exp(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Term {
    pub coef: f64,
    pub x: Factor,
    pub y: Factor,
    pub t: Factor,
}

impl Term {
    pub fn new(coef: f64, x: Factor, y: Factor, t: Factor) -> Self {
        Self { coef, x, y, t }
    }
}

/// Sum of products `coef * X(x) Y(y) T(t)`; all partials are available.
#[derive(Clone, Debug, PartialEq)]
pub struct SeparableSum {
    pub terms: Vec<Term>,
}

impl SeparableSum {
    pub fn new(terms: Vec<Term>) -> Self {
        Self { terms }
    }

    /// `sum_k c_k D^(a_k) self`, again in separable form.
    pub fn apply(&self, op: &[(f64, Partial)]) -> SeparableSum {
        let mut terms = Vec::new();
        for &(c, p) in op {
            for term in &self.terms {
                let (sx, x) = term.x.derivative(p.x);
                let (sy, y) = term.y.derivative(p.y);
                let (st, t) = term.t.derivative(p.t);
                let coef = c * term.coef * sx * sy * st;
                if coef != 0.0 {
                    terms.push(Term::new(coef, x, y, t));
                }
            }
        }
        SeparableSum { terms }
    }
}

impl SpaceTimeFn for SeparableSum {
    fn supports(&self, _: Partial) -> bool {
        true
    }

    fn as_separable(&self) -> Option<&SeparableSum> {
        Some(self)
    }

    fn partial(&self, d: Partial, x: f64, y: f64, t: f64) -> f64 {
        self.terms
            .iter()
            .map(|term| term.coef * term.x.deriv(d.x, x) * term.y.deriv(d.y, y) * term.t.deriv(d.t, t))
            .sum()
    }
}

/// `sum_k c_k * D^(a_k) base` for a linear constant-coefficient operator.
pub struct LinearCombination {
    pub base: Arc<dyn SpaceTimeFn>,
    pub terms: Vec<(f64, Partial)>,
}

impl SpaceTimeFn for LinearCombination {
    fn supports(&self, d: Partial) -> bool {
        self.terms.iter().all(|&(_, p)| self.base.supports(p.plus(d)))
    }

    fn partial(&self, d: Partial, x: f64, y: f64, t: f64) -> f64 {
        self.terms.iter().map(|&(c, p)| c * self.base.partial(p.plus(d), x, y, t)).sum()
    }
}

/// Evaluates one partial derivative at a fixed set of points for many times.
///
/// Separable functions have their spatial factors tabulated once.
pub struct PointSampler {
    kind: SamplerKind,
}

enum SamplerKind {
    Separable { spatial: Vec<Vec<f64>>, temporal: Vec<(u8, Factor)> },
    Direct { func: Arc<dyn SpaceTimeFn>, d: Partial, points: Vec<(f64, f64)> },
}

impl PointSampler {
    pub fn new(func: &Arc<dyn SpaceTimeFn>, d: Partial, points: &[(f64, f64)]) -> Self {
        let kind = match func.as_separable() {
            Some(sep) => SamplerKind::Separable {
                spatial: sep
                    .terms
                    .iter()
                    .map(|term| {
                        points.iter().map(|&(x, y)| term.coef * term.x.deriv(d.x, x) * term.y.deriv(d.y, y)).collect()
                    })
                    .collect(),
                temporal: sep.terms.iter().map(|term| (d.t, term.t)).collect(),
            },
            None => SamplerKind::Direct { func: func.clone(), d, points: points.to_vec() },
        };
        Self { kind }
    }

    pub fn len(&self) -> usize {
        match &self.kind {
            SamplerKind::Separable { spatial, .. } => spatial.first().map_or(0, Vec::len),
            SamplerKind::Direct { points, .. } => points.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Overwrites `out` with the samples at time `t`.
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        match &self.kind {
            SamplerKind::Separable { spatial, temporal } => {
                out.fill(0.0);
                for (column, &(n, factor)) in spatial.iter().zip(temporal) {
                    let w = factor.deriv(n, t);
                    for (o, s) in out.iter_mut().zip(column) {
                        *o += w * s;
                    }
                }
            }
            SamplerKind::Direct { func, d, points } => {
                for (o, &(x, y)) in out.iter_mut().zip(points) {
                    *o = func.partial(*d, x, y, t);
                }
            }
        }
    }

    /// Adds `scale` times the samples at time `t` to `out`.
    pub fn add_into(&self, t: f64, scale: f64, out: &mut [f64]) {
        match &self.kind {
            SamplerKind::Separable { spatial, temporal } => {
                for (column, &(n, factor)) in spatial.iter().zip(temporal) {
                    let w = scale * factor.deriv(n, t);
                    for (o, s) in out.iter_mut().zip(column) {
                        *o += w * s;
                    }
                }
            }
            SamplerKind::Direct { func, d, points } => {
                for (o, &(x, y)) in out.iter_mut().zip(points) {
                    *o += scale * func.partial(*d, x, y, t);
                }
            }
        }
    }
}

/// Source partials tabulated at a fixed list of points.
pub struct NodalSource {
    samplers: Vec<(Partial, PointSampler)>,
    n: usize,
}

impl NodalSource {
    /// The source value itself is always included alongside `partials`.
    pub fn new(source: &SourceModel, points: &[(f64, f64)], partials: &[Partial]) -> Result<Self> {
        let mut samplers: Vec<(Partial, PointSampler)> = Vec::new();
        for &d in std::iter::once(&Partial::VALUE).chain(partials) {
            if samplers.iter().any(|(p, _)| *p == d) {
                continue;
            }
            source.derivative(d)?;
            samplers.push((d, PointSampler::new(&source.func, d, points)));
        }
        Ok(Self { samplers, n: points.len() })
    }

    /// Points are the grid nodes `0..n`.
    pub fn grid_1d(source: &SourceModel, grid: &crate::grid::UniformGrid1D, partials: &[Partial]) -> Result<Self> {
        let points: Vec<(f64, f64)> = (0..grid.n as isize).map(|i| (grid.x(i), 0.0)).collect();
        Self::new(source, &points, partials)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn sampler(&self, d: Partial) -> Result<&PointSampler> {
        self.samplers
            .iter()
            .find(|(p, _)| *p == d)
            .map(|(_, s)| s)
            .ok_or_else(|| Error::MissingDerivative(format!("f_{d}")))
    }

    /// `sum_k scale_k * D^(d_k) f` at time `t`, one entry per point.
    pub fn combine(&self, t: f64, terms: &[(f64, Partial)]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.n];
        for &(scale, d) in terms {
            self.sampler(d)?.add_into(t, scale, &mut out);
        }
        Ok(out)
    }
}

/// Linear PDEs for which a source can be manufactured from a target solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Pde {
    /// `u_t + a u_x + b u_y = f`.
    Advection { ax: f64, ay: f64 },
    /// `u_tt = c^2 u_xx + f`.
    Wave1D { c: f64 },
    /// `u_t = D u_xx + f`.
    Diffusion1D { d: f64 },
    /// `u_t = D (u_xx + u_yy) + f`.
    Diffusion2D { d: f64 },
    /// `u_t = -kappa u_xxxx + f`.
    Parabolic4 { kappa: f64 },
}

impl Pde {
    /// Operator `L` with `f = L u`.
    pub fn operator(&self) -> Vec<(f64, Partial)> {
        match *self {
            Pde::Advection { ax, ay } => vec![(1.0, Partial::T), (ax, Partial::X), (ay, Partial::new(0, 1, 0))],
            Pde::Wave1D { c } => vec![(1.0, Partial::TT), (-c * c, Partial::XX)],
            Pde::Diffusion1D { d } => vec![(1.0, Partial::T), (-d, Partial::XX)],
            Pde::Diffusion2D { d } => vec![(1.0, Partial::T), (-d, Partial::XX), (-d, Partial::YY)],
            Pde::Parabolic4 { kappa } => vec![(1.0, Partial::T), (kappa, Partial::XXXX)],
        }
    }

    /// Source partials the defect correction and start-up procedures read.
    pub fn correction_bundle(&self) -> &'static [Partial] {
        match self {
            Pde::Advection { .. } => &[],
            Pde::Wave1D { .. } => &[Partial::T, Partial::XX, Partial::TT],
            Pde::Diffusion1D { .. } => &[Partial::T, Partial::XX],
            Pde::Diffusion2D { .. } => &[Partial::T, Partial::XX, Partial::YY],
            Pde::Parabolic4 { .. } => &[Partial::T, Partial::XXXX],
        }
    }
}

/// Builds the source `f = L u` for a target solution `u`, with its derivative bundle.
pub fn manufactured(
    name: &str,
    target: Arc<dyn SpaceTimeFn>,
    pde: Pde,
) -> Result<(ExactSolution, SourceModel)> {
    let op = pde.operator();
    for &bundle in std::iter::once(&Partial::VALUE).chain(pde.correction_bundle()) {
        for &(_, p) in &op {
            if !target.supports(p.plus(bundle)) {
                return Err(Error::MissingDerivative(format!("u_{}", p.plus(bundle))));
            }
        }
    }
    let source: Arc<dyn SpaceTimeFn> = match target.as_separable() {
        Some(sep) => Arc::new(sep.apply(&op)),
        None => Arc::new(LinearCombination { base: target.clone(), terms: op }),
    };
    Ok((ExactSolution::new(name, target), SourceModel::new(source)))
}

/// Pointwise residual `L u - f` for a linear PDE.
pub fn pde_residual(pde: Pde, exact: &ExactSolution, source: &SourceModel, x: f64, y: f64, t: f64) -> f64 {
    pde.operator().iter().map(|&(c, p)| c * exact.func.partial(p, x, y, t)).sum::<f64>() - source.f(x, y, t)
}

/// Viscous Burgers solution `u = 1 + v` with `v = -2 nu (ln theta)_x`,
/// `theta = 1 + (gamma/2) erfc((x - T) / sqrt(4 nu T))`, `T = t + 1`.
///
/// Supplies the value, `u_x`, `u_xx` and `u_t` (from the PDE).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BurgersSolution {
    pub nu: f64,
    pub gamma: f64,
}

impl BurgersSolution {
    /// `(u, u_x, u_xx)`.
    pub fn eval(&self, x: f64, t: f64) -> (f64, f64, f64) {
        let nu = self.nu;
        let tt = t + 1.0;
        let w = x - tt;
        let a = 1.0 / (2.0 * nu * tt);
        let g = (-w * w * a * 0.5).exp();
        let theta = 1.0 + 0.5 * self.gamma * libm::erfc(w / (4.0 * nu * tt).sqrt());
        let q = -self.gamma * g / ((4.0 * PI * nu * tt).sqrt() * theta);
        let v = -2.0 * nu * q;
        let v_x = 2.0 * nu * q * (w * a + q);
        let v_xx = -2.0 * nu * (-a * q * (1.0 - a * w * w) + 3.0 * w * a * q * q + 2.0 * q * q * q);
        (1.0 + v, v_x, v_xx)
    }
}

impl SpaceTimeFn for BurgersSolution {
    fn supports(&self, d: Partial) -> bool {
        d.y == 0 && ((d.t == 0 && d.x <= 2) || d == Partial::T)
    }

    fn partial(&self, d: Partial, x: f64, _: f64, t: f64) -> f64 {
        let (u, ux, uxx) = self.eval(x, t);
        match (d.x, d.t) {
            (0, 0) => u,
            (1, 0) => ux,
            (2, 0) => uxx,
            (0, 1) => self.nu * uxx - u * ux,
            _ => f64::NAN,
        }
    }
}

/// `gamma` with `ln(1 + gamma) = re`.
pub fn gamma_from_reynolds(re: f64) -> f64 {
    re.exp_m1()
}

pub fn burgers_exact(nu: f64, gamma: f64) -> ExactSolution {
    ExactSolution::new(format!("burgers(nu={nu}, gamma={gamma})"), Arc::new(BurgersSolution { nu, gamma }))
}

pub type Profile2D = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Initial data transported at constant velocity: `u = u0(x - ax t, y - ay t)`.
pub struct Advected {
    pub profile: Profile2D,
    pub ax: f64,
    pub ay: f64,
}

impl SpaceTimeFn for Advected {
    fn supports(&self, d: Partial) -> bool {
        d == Partial::VALUE
    }

    fn partial(&self, _: Partial, x: f64, y: f64, t: f64) -> f64 {
        (self.profile)(x - self.ax * t, y - self.ay * t)
    }
}

pub fn advected(name: &str, profile: Profile2D, ax: f64, ay: f64) -> ExactSolution {
    ExactSolution::new(name, Arc::new(Advected { profile, ax, ay }))
}

/// Indicator of `|x| + |y| <= 2`.
pub fn square_pulse_2d() -> Profile2D {
    Arc::new(|x: f64, y: f64| if x.abs() + y.abs() <= 2.0 { 1.0 } else { 0.0 })
}

/// A named exact solution with its source and PDE coefficient.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub exact: ExactSolution,
    pub source: SourceModel,
    /// Advection speed, wave speed, diffusivity, viscosity or kappa, depending on the PDE.
    pub coefficient: f64,
    /// Second advection component for 2D advection fixtures.
    pub coefficient_y: f64,
}

pub const FIXTURE_NAMES: &[&str] = &[
    "advection-smooth",
    "advection-square",
    "wave-manufactured",
    "diffusion-manufactured",
    "parabolic4-manufactured",
    "burgers-re10",
    "diffusion2d-manufactured",
    "square-pulse",
];

/// Viscosity of the Burgers fixture; the Reynolds number is fixed at 10.
pub const BURGERS_NU: f64 = 0.25;

pub fn fixture(name: &str) -> Result<Fixture> {
    use Factor::{Exp, One, Sin};
    let make = |exact: ExactSolution, source: SourceModel, coefficient: f64| Fixture {
        name: FIXTURE_NAMES.iter().copied().find(|n| *n == name).unwrap_or("custom"),
        exact,
        source,
        coefficient,
        coefficient_y: 0.0,
    };
    Ok(match name {
        "advection-smooth" => {
            let profile: Profile2D = Arc::new(|x: f64, _| (2.0 * PI * x).sin() + 0.3 * (6.0 * PI * x + 0.4).cos());
            make(advected(name, profile, 1.0, 0.0), SourceModel::zero(), 1.0)
        }
        "advection-square" => {
            let profile: Profile2D = Arc::new(|x: f64, _| if x > 0.2137 && x < 0.5137 { 1.0 } else { 0.0 });
            make(advected(name, profile, 1.0, 0.0), SourceModel::zero(), 1.0)
        }
        "wave-manufactured" => {
            let c = 1.0;
            let u = SeparableSum::new(vec![
                Term::new(1.0, Sin { k: 1.0, phase: 0.3 }, One, Factor::cos(2.0, 0.0)),
                Term::new(0.5, Exp { rate: 0.5 }, One, Sin { k: 1.0, phase: 0.2 }),
            ]);
            let (exact, source) = manufactured(name, Arc::new(u), Pde::Wave1D { c })?;
            make(exact, source, c)
        }
        "diffusion-manufactured" => {
            let d = 1.0;
            let u = SeparableSum::new(vec![
                Term::new(1.0, Sin { k: 2.0, phase: 0.3 }, One, Exp { rate: -0.5 }),
                Term::new(0.5, Exp { rate: 0.8 }, One, Factor::cos(1.0, 0.0)),
            ]);
            let (exact, source) = manufactured(name, Arc::new(u), Pde::Diffusion1D { d })?;
            make(exact, source, d)
        }
        "parabolic4-manufactured" => {
            let kappa = 1.0;
            let u = SeparableSum::new(vec![
                Term::new(1.0, Sin { k: 1.0, phase: 0.2 }, One, Exp { rate: -0.5 }),
                Term::new(0.3, Factor::cos(0.5, 0.0), One, Factor::cos(1.0, 0.0)),
            ]);
            let (exact, source) = manufactured(name, Arc::new(u), Pde::Parabolic4 { kappa })?;
            make(exact, source, kappa)
        }
        "burgers-re10" => make(burgers_exact(BURGERS_NU, gamma_from_reynolds(10.0)), SourceModel::zero(), BURGERS_NU),
        "diffusion2d-manufactured" => {
            let d = 1.0;
            let u = SeparableSum::new(vec![
                Term::new(1.0, Sin { k: 1.3, phase: 0.2 }, Factor::cos(0.9, -0.1), Factor::cos(1.0, 0.0)),
                Term::new(0.5, Exp { rate: 0.4 }, Exp { rate: 0.3 }, Exp { rate: -0.3 }),
            ]);
            let (exact, source) = manufactured(name, Arc::new(u), Pde::Diffusion2D { d })?;
            make(exact, source, d)
        }
        "square-pulse" => {
            let (ax, ay) = (-1.0, -2.0);
            let mut fx = make(advected(name, square_pulse_2d(), ax, ay), SourceModel::zero(), ax);
            fx.coefficient_y = ay;
            fx
        }
        other => return Err(Error::Config(format!("unknown fixture `{other}`"))),
    })
}
