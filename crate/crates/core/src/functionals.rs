//! Scalar functionals of a field: energy, regularized energy, action,
//! Nehari functional, the Nehari rescaling, the fractional log-Sobolev gap
//! and the closed-form lower bound on the minimal action.
//!
//! Every integral of `|u|² Log|u|²` goes through [`log_term`], i.e. through
//! `B − A`, so zeros of the field contribute exactly 0.
//!
//! Gradients are taken with respect to the real pairing `Re ∫ u·conj(v)`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{check_order, hs_semi_from_spectrum, Field, SpectralField};
use crate::lognl::{log_rate, log_term, RegularizedNonlinearity};
use crate::orlicz::luxemburg_norm;
use crate::scalar::{gamma, lit, to_f64, Real};

/// All scalar functionals of one field at one `(s, ω)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FunctionalReport<T> {
    pub omega: T,
    pub s: T,
    pub l2_sq: T,
    pub hs_semi_sq: T,
    /// `∫|u|² Log|u|²`.
    pub log_integral: T,
    pub energy: T,
    pub action: T,
    pub nehari: T,
    pub luxemburg: T,
}

/// Quadrature of `|u|² Log|u|²`.
pub fn log_integral<T: Real>(u: &Field<T>) -> T {
    let sum = u
        .values()
        .iter()
        .fold(T::zero(), |acc, z| acc + log_term(z.norm()));
    sum * u.grid().cell_volume()
}

fn hs_semi<T: Real>(u: &Field<T>, s: T) -> Result<T> {
    check_order(s)?;
    let spec = SpectralField::forward(u);
    Ok(hs_semi_from_spectrum(&spec, &u.grid().symbol(s)))
}

/// `E(u) = ½‖(−Δ)^{s/2}u‖² − ½∫|u|² Log|u|²`.
pub fn energy<T: Real>(u: &Field<T>, s: T) -> Result<T> {
    let half = lit::<T>(0.5);
    Ok(half * hs_semi(u, s)? - half * log_integral(u))
}

/// `E_m(u) = ½‖(−Δ)^{s/2}u‖² − ∫G_m(|u|)`.
///
/// Normalized so that `d/dε E_m(u + εv)|₀ = Re⟨(−Δ)^s u − g_m(u), v⟩`, which
/// makes `E_m` the Hamiltonian of `i∂ₜu = (−Δ)^s u − g_m(u)`.
pub fn energy_m<T: Real>(u: &Field<T>, s: T, nl: &RegularizedNonlinearity<T>) -> Result<T> {
    let potential = u
        .values()
        .iter()
        .fold(T::zero(), |acc, z| acc + nl.primitive(z.norm()))
        * u.grid().cell_volume();
    Ok(lit::<T>(0.5) * hs_semi(u, s)? - potential)
}

/// `(−Δ)^s u − g_m(u)`, the gradient of [`energy_m`].
pub fn energy_m_gradient<T: Real>(
    u: &Field<T>,
    s: T,
    nl: &RegularizedNonlinearity<T>,
) -> Result<Field<T>> {
    let lap = crate::grid::frac_laplacian(u, s)?;
    let values = lap
        .values()
        .iter()
        .zip(u.values())
        .map(|(l, z)| l - nl.apply(*z))
        .collect();
    Ok(Field::from_raw(u.grid(), values))
}

/// `(−Δ)^s u + ωu − u Log|u|²`, the gradient of the action. At a zero of `u`
/// the logarithmic term contributes 0.
pub fn action_gradient<T: Real>(u: &Field<T>, s: T, omega: T) -> Result<Field<T>> {
    let lap = crate::grid::frac_laplacian(u, s)?;
    let values = lap
        .values()
        .iter()
        .zip(u.values())
        .map(|(l, z)| l + z * (omega - log_rate(z.norm())))
        .collect();
    Ok(Field::from_raw(u.grid(), values))
}

/// Cheap pieces `(‖u‖², ‖(−Δ)^{s/2}u‖², ∫|u|²Log|u|²)` shared by the
/// action and Nehari functional.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Parts<T> {
    pub l2_sq: T,
    pub hs_semi_sq: T,
    pub log_integral: T,
}

impl<T: Real> Parts<T> {
    pub fn of(u: &Field<T>, s: T) -> Result<Self> {
        Ok(Self {
            l2_sq: u.l2_sq(),
            hs_semi_sq: hs_semi(u, s)?,
            log_integral: log_integral(u),
        })
    }

    /// `S_ω = ½‖(−Δ)^{s/2}u‖² + ((ω+1)/2)‖u‖² − ½∫|u|²Log|u|²`.
    pub fn action(&self, omega: T) -> T {
        let half = lit::<T>(0.5);
        half * self.hs_semi_sq + half * (omega + T::one()) * self.l2_sq - half * self.log_integral
    }

    /// `I_ω = ‖(−Δ)^{s/2}u‖² + ω‖u‖² − ∫|u|²Log|u|²`.
    pub fn nehari(&self, omega: T) -> T {
        self.hs_semi_sq + omega * self.l2_sq - self.log_integral
    }

    pub fn energy(&self) -> T {
        lit::<T>(0.5) * (self.hs_semi_sq - self.log_integral)
    }
}

/// Fills a [`FunctionalReport`] for `u`.
pub fn action_nehari<T: Real>(u: &Field<T>, s: T, omega: T) -> Result<FunctionalReport<T>> {
    let parts = Parts::of(u, s)?;
    Ok(FunctionalReport {
        omega,
        s,
        l2_sq: parts.l2_sq,
        hs_semi_sq: parts.hs_semi_sq,
        log_integral: parts.log_integral,
        energy: parts.energy(),
        action: parts.action(omega),
        nehari: parts.nehari(omega),
        luxemburg: luxemburg_norm(u).norm,
    })
}

/// Rescales `u` onto the Nehari manifold: `w = ρu` with
/// `ρ = exp(I_ω(u) / (2‖u‖²))`.
///
/// `I_ω(ρu) = ρ²[I_ω(u) − ‖u‖² Log ρ²]` vanishes identically; the map is
/// reapplied (at most three more times) to remove rounding residue.
pub fn nehari_rescale<T: Real>(u: &Field<T>, s: T, omega: T) -> Result<Field<T>> {
    check_order(s)?;
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    let tol = lit::<T>(1e-13).max(lit::<T>(16.0) * T::epsilon());
    let mut w = u.clone();
    for pass in 0..4 {
        let parts = Parts::of(&w, s)?;
        let i = parts.nehari(omega);
        let scale = T::one().max(parts.l2_sq + parts.hs_semi_sq);
        if pass > 0 && i.abs() <= tol * scale {
            break;
        }
        let rho = (i / (lit::<T>(2.0) * parts.l2_sq)).exp();
        if !rho.is_finite() || rho == T::zero() {
            return Err(Error::InvalidParameter {
                name: "u",
                reason: format!("Nehari scale factor {} not representable", to_f64(rho)),
            });
        }
        w = w.scaled(rho);
    }
    Ok(w)
}

/// `Log(sΓ(N/2)/Γ(N/2s))` with `N = dim`.
fn log_gamma_ratio(s: f64, dim: usize) -> f64 {
    let n = dim as f64;
    (s * gamma(n / 2.0) / gamma(n / (2.0 * s))).ln()
}

/// Right side minus left side of the fractional log-Sobolev inequality
///
/// `∫|u|² Log(|u|²/‖u‖²) + (N + (N/s) Log α + Log(sΓ(N/2)/Γ(N/2s)))‖u‖²
///  ≤ (α²/π^s) ‖(−Δ)^{s/2}u‖²`,
///
/// so a nonnegative value certifies the inequality for this `(u, α)`.
pub fn log_sobolev_gap<T: Real>(u: &Field<T>, s: T, alpha: T) -> Result<T> {
    check_order(s)?;
    if !(alpha > T::zero()) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            reason: format!("must be positive, got {}", to_f64(alpha)),
        });
    }
    if u.is_zero() {
        return Err(Error::ZeroField);
    }
    let parts = Parts::of(u, s)?;
    let n = u.grid().dim();
    let nf = lit::<T>(n as f64);
    let constant = nf + nf / s * alpha.ln() + lit(log_gamma_ratio(to_f64(s), n));
    let entropy = parts.log_integral - parts.l2_sq * parts.l2_sq.ln();
    let lhs = entropy + constant * parts.l2_sq;
    let rhs = alpha * alpha / T::PI().powf(s) * parts.hs_semi_sq;
    Ok(rhs - lhs)
}

/// `½ (sΓ(N/2)/Γ(N/2s)) π^{N/2} e^{ω+N}`, a lower bound on the minimal
/// action `d(ω)`; sharp at `s = 1`.
pub fn d_lower_bound<T: Real>(omega: T, s: T, dim: usize) -> Result<T> {
    check_order(s)?;
    if dim != 1 && dim != 2 {
        return Err(Error::InvalidDimension(dim));
    }
    let (s, omega, n) = (to_f64(s), to_f64(omega), dim as f64);
    let ratio = s * gamma(n / 2.0) / gamma(n / (2.0 * s));
    Ok(lit(
        0.5 * ratio * std::f64::consts::PI.powf(n / 2.0) * (omega + n).exp(),
    ))
}

/// Directional derivative of `f` at `u` along `v` by centered differences.
pub fn centered_difference<T: Real>(
    f: impl Fn(&Field<T>) -> Result<T>,
    u: &Field<T>,
    v: &Field<T>,
    eps: T,
) -> Result<T> {
    let plus = f(&u.axpy(eps, v)?)?;
    let minus = f(&u.axpy(-eps, v)?)?;
    Ok((plus - minus) / (lit::<T>(2.0) * eps))
}

/// Multiplies a field by a unit phase.
pub fn with_phase<T: Real>(u: &Field<T>, theta: T) -> Field<T> {
    u.scaled_complex(Complex::from_polar(T::one(), theta))
}
