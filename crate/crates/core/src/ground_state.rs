//! Ground states: minimizers of the action `S_ω` on the Nehari manifold
//! `{u ≠ 0 : I_ω(u) = 0}`, found by projected gradient descent.
//!
//! On the manifold `S_ω(u) = ½‖u‖²`, so the minimal action `d(ω)` is half
//! the squared charge of the minimizer.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::functionals::{action_gradient, nehari_rescale, Parts};
use crate::grid::{check_order, Field, Grid};
use crate::scalar::{lit, to_f64, Real};

/// Starting point of the descent.
#[derive(Clone, Debug, PartialEq)]
pub enum GroundStateInit<T: Real> {
    /// Centered `e^{(ω+N)/2}·e^{−|x|²/(2w²)}`.
    Gaussian { width: T },
    /// Any nonzero field; only its modulus is used.
    Custom(Field<T>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundStateParams<T: Real> {
    pub s: T,
    pub omega: T,
    pub grid: Grid<T>,
    pub init: GroundStateInit<T>,
    /// Initial (and maximal) gradient step.
    pub step_size: T,
    pub max_iters: usize,
    /// Relative to `max(1, |S_ω|)`; also the tolerated upward jitter per step.
    pub action_tol: T,
    pub residual_tol: T,
}

impl<T: Real> GroundStateParams<T> {
    /// Defaults: Gaussian of width 2, a step just inside the explicit
    /// stability limit of the grid, tolerances `1e-13` (action) and `1e-7`
    /// (residual).
    pub fn new(grid: &Grid<T>, s: T, omega: T) -> Self {
        let stiffness = grid.max_wavenumber().powf(lit::<T>(2.0) * s) + lit(40.0);
        Self {
            s,
            omega,
            grid: grid.clone(),
            init: GroundStateInit::Gaussian { width: lit(2.0) },
            step_size: lit::<T>(1.9) / stiffness,
            max_iters: 200_000,
            action_tol: lit(1e-13),
            residual_tol: lit(1e-7),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_order(self.s)?;
        let positive = |name: &'static str, v: T| {
            if v > T::zero() && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    reason: format!("must be positive and finite, got {}", to_f64(v)),
                })
            }
        };
        positive("step_size", self.step_size)?;
        positive("action_tol", self.action_tol)?;
        positive("residual_tol", self.residual_tol)?;
        if !self.omega.is_finite() {
            return Err(Error::InvalidParameter {
                name: "omega",
                reason: "must be finite".into(),
            });
        }
        match &self.init {
            GroundStateInit::Gaussian { width } => positive("width", *width),
            GroundStateInit::Custom(f) => {
                if f.grid() != &self.grid {
                    Err(Error::GridMismatch)
                } else if f.is_zero() {
                    Err(Error::ZeroField)
                } else {
                    Ok(())
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GroundStateResult<T: Real> {
    pub phi: Field<T>,
    /// `½‖φ‖²`, which equals `S_ω(φ)` on the Nehari manifold.
    pub d_omega: T,
    pub residual: T,
    /// `S_ω` after every accepted step.
    pub action_trace: Vec<T>,
    pub converged: bool,
    pub iterations: usize,
}

/// `‖(−Δ)^s φ + ωφ − φ Log|φ|²‖_{L²}`.
pub fn stationary_residual<T: Real>(phi: &Field<T>, s: T, omega: T) -> Result<T> {
    Ok(action_gradient(phi, s, omega)?.l2_sq().sqrt())
}

/// Below this the Gausson is considered to have left the torus.
pub const GAUSSON_BOUNDARY_TOL: f64 = 1e-14;

/// The Gausson `e^{(ω+N)/2}·e^{−|x|²/2}`, which solves the stationary
/// equation at `s = 1` with `d(ω) = ½π^{N/2}e^{ω+N}`.
pub fn gausson_reference<T: Real>(grid: &Grid<T>, omega: T) -> Result<Field<T>> {
    let l = to_f64(grid.extent());
    let boundary = (-l * l / 8.0).exp();
    if boundary >= GAUSSON_BOUNDARY_TOL {
        return Err(Error::GridTooSmall {
            value: boundary,
            threshold: GAUSSON_BOUNDARY_TOL,
        });
    }
    let amplitude = ((omega + lit(grid.dim() as f64)) * lit(0.5)).exp();
    let half = lit::<T>(0.5);
    Field::from_fn(grid, |x| {
        let r2 = x.iter().fold(T::zero(), |acc, &xi| acc + xi * xi);
        Complex::new(amplitude * (-half * r2).exp(), T::zero())
    })
}

const MAX_CONSECUTIVE_FAILURES: usize = 50;
const COLLAPSE_NORM: f64 = 1e-12;

/// Nehari-projected gradient descent on `S_ω`.
///
/// Each iteration takes `v ← v − η∇S_ω(v)` on real iterates and rescales
/// back onto the manifold. A step that raises the action by more than
/// `action_tol` (relative to `max(1, |S_ω|)`) is rejected and `η` halved; accepted steps let `η` grow back by 10% up to a ceiling that
/// shrinks whenever a step is rejected. Stops once both the action change
/// and the stationary residual are below tolerance. The best iterate is
/// returned either way; `converged` reports whether the tolerances were met.
pub fn solve_ground_state<T: Real>(p: &GroundStateParams<T>) -> Result<GroundStateResult<T>> {
    p.validate()?;
    let (s, omega) = (p.s, p.omega);
    let init = match &p.init {
        GroundStateInit::Gaussian { width } => {
            let amplitude = ((omega + lit(p.grid.dim() as f64)) * lit(0.5)).exp();
            let denom = lit::<T>(2.0) * *width * *width;
            Field::from_fn(&p.grid, |x| {
                let r2 = x.iter().fold(T::zero(), |acc, &xi| acc + xi * xi);
                Complex::new(amplitude * (-r2 / denom).exp(), T::zero())
            })?
        }
        GroundStateInit::Custom(f) => f.map(|z| Complex::new(z.norm(), T::zero())),
    };

    let mut v = nehari_rescale(&init, s, omega)?;
    let mut action = Parts::of(&v, s)?.action(omega);
    let mut grad = action_gradient(&v, s, omega)?;
    let mut residual = grad.l2_sq().sqrt();
    let mut trace = vec![action];
    let mut eta = p.step_size;
    let mut ceiling = p.step_size;
    let mut failures = 0;
    let mut last_change = T::infinity();
    let mut converged = false;
    let mut iterations = 0;

    while iterations < p.max_iters {
        let scale = T::one().max(action.abs());
        if residual < p.residual_tol && last_change < p.action_tol * scale {
            converged = true;
            break;
        }
        iterations += 1;
        let stepped = v
            .axpy(-eta, &grad)?
            .map(|z| Complex::new(z.re, T::zero()));
        if stepped.l2_sq().sqrt() < lit(COLLAPSE_NORM) {
            return Err(Error::ZeroCollapse {
                iterations,
                trace: trace.iter().map(|&a| to_f64(a)).collect(),
            });
        }
        let candidate = nehari_rescale(&stepped, s, omega)?;
        let cand_action = Parts::of(&candidate, s)?.action(omega);
        if cand_action.is_finite() && cand_action <= action + p.action_tol * scale {
            last_change = (action - cand_action).abs();
            v = candidate;
            action = cand_action;
            grad = action_gradient(&v, s, omega)?;
            residual = grad.l2_sq().sqrt();
            trace.push(action);
            failures = 0;
            eta = (eta * lit(1.1)).min(ceiling);
        } else {
            failures += 1;
            if failures >= MAX_CONSECUTIVE_FAILURES {
                return Err(Error::Divergence {
                    iterations,
                    trace: trace.iter().map(|&a| to_f64(a)).collect(),
                });
            }
            ceiling = eta * lit(0.9);
            eta = eta * lit(0.5);
        }
    }
    if !converged
        && residual < p.residual_tol
        && last_change < p.action_tol * T::one().max(action.abs())
    {
        converged = true;
    }
    let d_omega = lit::<T>(0.5) * v.l2_sq();
    Ok(GroundStateResult {
        phi: v,
        d_omega,
        residual,
        action_trace: trace,
        converged,
        iterations,
    })
}
