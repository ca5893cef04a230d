//! Leading-error polynomials and the time-step policies derived from them.
//!
//! Many method-of-lines schemes have a leading local error of the form
//! `(L u) * P(dx, dt)` with `P = (alpha dx^r - beta dt^s) dt`. Choosing
//! `dt` as the positive root of `P` cancels the leading spatial and temporal
//! errors together; the next terms then set the global order
//! `min(p, r q / s)`.

use std::fmt;

use crate::error::{Error, Result};

/// Orders left once the leading error is cancelled.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PostElimination {
    /// Next spatial order `p` and temporal order `q`.
    Orders { p: u32, q: u32 },
    /// Every truncation term vanishes at the optimal step (unit-CFL advection).
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeadingError {
    pub alpha: f64,
    pub beta: f64,
    /// Spatial order of the leading error.
    pub r: u32,
    /// Temporal exponent; the local temporal error has order `s + 1`.
    pub s: u32,
    pub post: PostElimination,
}

impl LeadingError {
    pub fn new(alpha: f64, beta: f64, r: u32, s: u32, post: PostElimination) -> Self {
        debug_assert!(r > 0 && s > 0);
        if let PostElimination::Orders { p, q } = post {
            debug_assert!(p > r && q > s, "post-elimination orders must exceed the leading ones");
        }
        Self { alpha, beta, r, s, post }
    }

    /// `P(dx, dt) = (alpha dx^r - beta dt^s) dt`.
    pub fn polynomial(&self, dx: f64, dt: f64) -> f64 {
        (self.alpha * dx.powi(self.r as i32) - self.beta * dt.powi(self.s as i32)) * dt
    }

    /// Positive root of `P` in `dt`; the `dt = 0` root is discarded.
    pub fn optimal_dt(&self, dx: f64) -> Result<f64> {
        optimal_dt(self, dx)
    }
}

/// `(alpha / beta)^(1/s) * dx^(r/s)`.
pub fn optimal_dt(le: &LeadingError, dx: f64) -> Result<f64> {
    if !(le.alpha * le.beta > 0.0) {
        return Err(Error::NoPositiveRoot { alpha: le.alpha, beta: le.beta });
    }
    if !(dx > 0.0) {
        return Err(Error::Config(format!("grid spacing must be positive, got {dx}")));
    }
    let s = le.s as f64;
    Ok((le.alpha / le.beta).powf(1.0 / s) * dx.powf(le.r as f64 / s))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum TimeStepPolicy {
    Optimal,
    /// `dt = fraction * dt_max`, fraction in `(0, 1]`.
    FractionOfStability(f64),
    /// `dt = c * dx^exponent`.
    ExplicitRatio { c: f64, exponent: f64 },
}

impl TimeStepPolicy {
    pub fn is_optimal(&self) -> bool {
        matches!(self, TimeStepPolicy::Optimal)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            TimeStepPolicy::Optimal => Ok(()),
            TimeStepPolicy::FractionOfStability(f) if f > 0.0 && f <= 1.0 => Ok(()),
            TimeStepPolicy::FractionOfStability(f) => {
                Err(Error::Config(format!("stability fraction must lie in (0, 1], got {f}")))
            }
            TimeStepPolicy::ExplicitRatio { c, exponent } if c > 0.0 && exponent > 0.0 => Ok(()),
            TimeStepPolicy::ExplicitRatio { c, exponent } => {
                Err(Error::Config(format!("ratio policy needs c > 0 and exponent > 0, got {c}:{exponent}")))
            }
        }
    }
}

impl fmt::Display for TimeStepPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            TimeStepPolicy::Optimal => write!(f, "ots"),
            TimeStepPolicy::FractionOfStability(x) => write!(f, "stability*{x}"),
            TimeStepPolicy::ExplicitRatio { c, exponent } => write!(f, "ratio={c}:{exponent}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StabilityBound {
    Unconditional,
    /// `dt_max = coefficient * dx^exponent`.
    Limit { coefficient: f64, exponent: f64 },
}

impl StabilityBound {
    pub fn max_dt(&self, dx: f64) -> Option<f64> {
        match *self {
            StabilityBound::Unconditional => None,
            StabilityBound::Limit { coefficient, exponent } => Some(coefficient * dx.powf(exponent)),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchemeDescriptor {
    pub name: &'static str,
    pub leading: LeadingError,
    pub stability: StabilityBound,
    /// Human-readable optimal-step rule.
    pub dt_formula: &'static str,
    /// Added to every predicted order when `leading` is stored multiplied by
    /// a power of `dx` (DuFort-Frankel keeps it scaled by `dx^2`, offset -2).
    pub order_offset: f64,
}

impl SchemeDescriptor {
    /// Time step for `dx` under `policy`, checked against the stability bound.
    pub fn dt(&self, policy: &TimeStepPolicy, dx: f64) -> Result<f64> {
        policy.validate()?;
        let dt = match *policy {
            TimeStepPolicy::Optimal => optimal_dt(&self.leading, dx)?,
            TimeStepPolicy::FractionOfStability(f) => {
                let max = self.stability.max_dt(dx).ok_or_else(|| {
                    Error::Config(format!("{} is unconditionally stable; use an explicit ratio", self.name))
                })?;
                f * max
            }
            TimeStepPolicy::ExplicitRatio { c, exponent } => c * dx.powf(exponent),
        };
        if let Some(max) = self.stability.max_dt(dx) {
            if dt > max * (1.0 + 1e-12) {
                return Err(Error::Stability { dt, limit: max });
            }
        }
        Ok(dt)
    }

    /// Predicted global order of accuracy under `policy`.
    ///
    /// At the optimal step this is `min(p, r q / s)`. Otherwise the leading
    /// errors survive: with `dt ~ dx^e` the error is `O(dx^r) + O(dt^s)`.
    pub fn predicted_order(&self, policy: &TimeStepPolicy) -> f64 {
        predicted_order(self, policy)
    }
}

pub fn predicted_order(sd: &SchemeDescriptor, policy: &TimeStepPolicy) -> f64 {
    let le = &sd.leading;
    let (r, s) = (le.r as f64, le.s as f64);
    let exponent = match *policy {
        TimeStepPolicy::Optimal => {
            return match le.post {
                PostElimination::Exact => f64::INFINITY,
                PostElimination::Orders { p, q } => (p as f64).min(r * q as f64 / s) + sd.order_offset,
            };
        }
        TimeStepPolicy::FractionOfStability(_) => match sd.stability {
            StabilityBound::Limit { exponent, .. } => exponent,
            StabilityBound::Unconditional => r / s,
        },
        TimeStepPolicy::ExplicitRatio { exponent, .. } => exponent,
    };
    r.min(exponent * s) + sd.order_offset
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diffusion_fe(d: f64) -> LeadingError {
        LeadingError::new(1.0 / 12.0, d / 2.0, 2, 1, PostElimination::Orders { p: 4, q: 2 })
    }

    #[test]
    fn diffusion_optimal_step_is_dx2_over_6d() {
        let dt = optimal_dt(&diffusion_fe(1.0), 0.1).unwrap();
        assert!((dt - 0.01 / 6.0).abs() < 1e-17);
        assert!(diffusion_fe(1.0).polynomial(0.1, dt).abs() < 1e-18);
    }

    #[test]
    fn advection_optimal_step_is_unit_cfl() {
        let le = LeadingError::new(0.5, 0.5, 1, 1, PostElimination::Exact);
        for dx in [0.3, 1e-3, 7.0] {
            assert!((optimal_dt(&le, dx).unwrap() - dx).abs() < 1e-15 * dx);
        }
    }

    #[test]
    fn sign_mismatch_has_no_root() {
        let le = LeadingError::new(-1.0 / 12.0, 0.5, 2, 1, PostElimination::Orders { p: 4, q: 2 });
        assert!(matches!(optimal_dt(&le, 0.1), Err(Error::NoPositiveRoot { .. })));
    }

    #[test]
    fn predicted_orders() {
        let sd = SchemeDescriptor {
            name: "diffusion",
            leading: diffusion_fe(1.0),
            stability: StabilityBound::Limit { coefficient: 0.5, exponent: 2.0 },
            dt_formula: "dx^2/(6 D)",
            order_offset: 0.0,
        };
        assert_eq!(sd.predicted_order(&TimeStepPolicy::Optimal), 4.0);
        assert_eq!(sd.predicted_order(&TimeStepPolicy::FractionOfStability(0.5)), 2.0);

        let p4 = SchemeDescriptor {
            leading: LeadingError::new(7.0 / 240.0, 0.5, 4, 1, PostElimination::Orders { p: 6, q: 2 }),
            stability: StabilityBound::Limit { coefficient: 3.0 / 40.0, exponent: 4.0 },
            ..sd.clone()
        };
        assert_eq!(p4.predicted_order(&TimeStepPolicy::Optimal), 6.0);
        assert_eq!(p4.predicted_order(&TimeStepPolicy::FractionOfStability(0.5)), 4.0);
        // Crank-Nicolson-like dt ~ dx with a first-order-in-time model.
        assert_eq!(sd.predicted_order(&TimeStepPolicy::ExplicitRatio { c: 1.0, exponent: 1.0 }), 1.0);
    }

    #[test]
    fn policy_dt_respects_stability() {
        let sd = SchemeDescriptor {
            name: "diffusion",
            leading: diffusion_fe(1.0),
            stability: StabilityBound::Limit { coefficient: 0.5, exponent: 2.0 },
            dt_formula: "",
            order_offset: 0.0,
        };
        assert!((sd.dt(&TimeStepPolicy::FractionOfStability(0.5), 0.1).unwrap() - 0.0025).abs() < 1e-17);
        assert!(matches!(
            sd.dt(&TimeStepPolicy::ExplicitRatio { c: 1.0, exponent: 1.0 }, 0.1),
            Err(Error::Stability { .. })
        ));
        assert!(sd.dt(&TimeStepPolicy::FractionOfStability(1.5), 0.1).is_err());
    }

    proptest::proptest! {
        #[test]
        fn optimal_dt_is_homogeneous(
            alpha in 1e-3f64..10.0, beta in 1e-3f64..10.0,
            r in 1u32..5, s in 1u32..3, dx in 1e-3f64..1.0, k in 0.1f64..10.0,
        ) {
            let le = LeadingError::new(alpha, beta, r, s, PostElimination::Orders { p: r + 2, q: s + 1 });
            let a = optimal_dt(&le, k * dx).unwrap();
            let b = k.powf(r as f64 / s as f64) * optimal_dt(&le, dx).unwrap();
            proptest::prop_assert!((a - b).abs() <= 1e-12 * a);
            proptest::prop_assert!(le.polynomial(dx, optimal_dt(&le, dx).unwrap()).abs()
                <= 1e-12 * alpha * dx.powi(r as i32) * optimal_dt(&le, dx).unwrap());
        }
    }
}
