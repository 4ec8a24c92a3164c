//! The Orlicz space generated by the Young function `A`: the modular
//! `∫A(|u|)`, the Luxemburg norm and the composite energy-space norm
//! `‖u‖_{W^s} = ‖u‖_{H^s} + ‖u‖_{L^A}`.

use crate::error::Result;
use crate::grid::{sobolev_norms, Field};
use crate::lognl::young_a;
use crate::scalar::{lit, Real};

/// Outcome of the Luxemburg-norm bisection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LuxemburgResult<T> {
    pub norm: T,
    /// `∫A(|u|/k)` at `k = norm`; 1 up to the bisection tolerance for nonzero fields.
    pub modular_at_norm: T,
    pub iterations: usize,
}

/// Quadrature of `A(|u|)` over the torus.
pub fn orlicz_modular<T: Real>(u: &Field<T>) -> T {
    modular_scaled(u, T::one())
}

/// `∫A(|u|/k)`.
pub fn modular_scaled<T: Real>(u: &Field<T>, k: T) -> T {
    let inv = T::one() / k;
    let sum = u
        .values()
        .iter()
        .fold(T::zero(), |acc, z| acc + young_a(z.norm() * inv));
    sum * u.grid().cell_volume()
}

const MAX_ITERATIONS: usize = 400;

/// `inf{k > 0 : ∫A(|u|/k) ≤ 1}` by bisection on the decreasing map
/// `k ↦ ∫A(|u|/k)`.
///
/// The initial bracket `[min(M, √M), max(M, √M)]` with `M = ∫A(|u|)` follows
/// from the two-sided modular bound `min(k, k²) ≤ M ≤ max(k, k²)`; the ends
/// are widened geometrically if rounding leaves them on the wrong side.
/// Bisection stops once the bracket is below `1e-14` relative (`1e-10`
/// absolute is the contract).
pub fn luxemburg_norm<T: Real>(u: &Field<T>) -> LuxemburgResult<T> {
    if u.is_zero() {
        return LuxemburgResult {
            norm: T::zero(),
            modular_at_norm: T::zero(),
            iterations: 0,
        };
    }
    let one = T::one();
    let two = lit::<T>(2.0);
    let modular = orlicz_modular(u);
    let root = modular.sqrt();
    let mut lo = modular.min(root) * lit(1.0 - 1e-9);
    let mut hi = modular.max(root) * lit(1.0 + 1e-9);
    let mut iterations = 0;
    while modular_scaled(u, hi) > one && iterations < MAX_ITERATIONS {
        hi = hi * two;
        iterations += 1;
    }
    while modular_scaled(u, lo) < one && iterations < MAX_ITERATIONS {
        lo = lo / two;
        iterations += 1;
    }
    let rel_tol = lit::<T>(1e-14).max(lit::<T>(4.0) * T::epsilon());
    while hi - lo > rel_tol * hi && iterations < MAX_ITERATIONS {
        let mid = (lo + hi) / two;
        if modular_scaled(u, mid) > one {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }
    let norm = (lo + hi) / two;
    LuxemburgResult {
        norm,
        modular_at_norm: modular_scaled(u, norm),
        iterations,
    }
}

/// `‖u‖_{H^s} + ‖u‖_{L^A}`.
pub fn ws_norm<T: Real>(u: &Field<T>, s: T) -> Result<T> {
    let norms = sobolev_norms(u, s)?;
    Ok(norms.hs_sq.sqrt() + luxemburg_norm(u).norm)
}
