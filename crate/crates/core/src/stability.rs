//! Orbital stability experiments: perturb a ground state, evolve it, and
//! track its distance to the orbit `{e^{iθ}φ(· − y)}` in the energy norm
//! `‖·‖_{W^s} = ‖·‖_{H^s} + ‖·‖_{L^A}`.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::evolution::{evolve_with, EvolveConfig};
use crate::grid::{check_order, Field, SpectralField};
use crate::orlicz::ws_norm;
use crate::scalar::{lit, to_f64, Real};

/// Distance below which an unperturbed run counts as a standing wave.
pub const STANDING_WAVE_TOL: f64 = 1e-3;

/// Default bound on `sup_t distance / delta0`.
pub const DEFAULT_RATIO: f64 = 10.0;

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport<T> {
    pub seed: u64,
    /// Requested perturbation size.
    pub delta: T,
    /// Measured modded distance of the perturbed initial field.
    pub delta0: T,
    pub times: Vec<T>,
    pub distance: Vec<T>,
    pub sup_distance: T,
    /// `sup_distance / delta0`; infinite when `delta0 = 0` and the
    /// trajectory moved.
    pub ratio: T,
}

impl<T: Real> StabilityReport<T> {
    /// `sup_distance ≤ ratio·delta0`, or `sup_distance ≤ STANDING_WAVE_TOL`
    /// for an unperturbed run.
    pub fn passes(&self, ratio: T) -> bool {
        if self.delta0 > T::zero() {
            self.sup_distance <= ratio * self.delta0
        } else {
            self.sup_distance <= lit(STANDING_WAVE_TOL)
        }
    }
}

/// Golden-section search for a minimum of `f` on `[a, b]`.
fn golden_min<T: Real>(
    mut f: impl FnMut(T) -> Result<T>,
    mut a: T,
    mut b: T,
    iterations: usize,
) -> Result<(T, T)> {
    let inv_phi = lit::<T>(0.5) * (lit::<T>(5.0).sqrt() - T::one());
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..iterations {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

/// Spectral cross-correlation `P(k) = û(k)·conj(φ̂(k))`; by Plancherel
/// `⟨u(· − y), φ⟩ = Σ_k P(k)·e^{−ik·y}`.
fn cross_spectrum<T: Real>(u: &Field<T>, phi: &Field<T>) -> Vec<Complex<T>> {
    let uh = SpectralField::forward(u);
    let ph = SpectralField::forward(phi);
    uh.coefficients()
        .iter()
        .zip(ph.coefficients())
        .map(|(a, b)| a * b.conj())
        .collect()
}

/// Grid shift maximizing `|⟨u(· − y), φ⟩|`, from one inverse transform of
/// the conjugated cross spectrum.
fn best_grid_shift<T: Real>(u: &Field<T>, cross: &[Complex<T>]) -> Vec<isize> {
    let conj = cross.iter().map(|z| z.conj()).collect();
    // |IDFT(conj P)[j]| = |⟨u(· − j h), φ⟩| up to a constant factor
    let corr = SpectralField::from_coefficients(u.grid(), conj)
        .expect("same grid")
        .inverse();
    let (idx, _) = corr
        .values()
        .iter()
        .enumerate()
        .fold((0, T::neg_infinity()), |best, (i, z)| {
            let a = z.norm_sqr();
            if a > best.1 {
                (i, a)
            } else {
                best
            }
        });
    let n = u.grid().n();
    match u.grid().dim() {
        1 => vec![idx as isize],
        _ => vec![(idx / n) as isize, (idx % n) as isize],
    }
}

/// Refines a grid shift to the nearby real offset maximizing the
/// correlation, one axis at a time.
fn refine_shift<T: Real>(u: &Field<T>, cross: &[Complex<T>], start: &[isize]) -> Result<Vec<T>> {
    let grid = u.grid();
    let mut offset: Vec<T> = start.iter().map(|&o| lit(o as f64)).collect();
    let correlation = |y: &[T]| -> T {
        grid.translation_phases(y)
            .iter()
            .zip(cross)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (p, c)| acc + p * c)
            .norm()
    };
    let rounds = if grid.dim() == 1 { 1 } else { 3 };
    for _ in 0..rounds {
        for axis in 0..grid.dim() {
            let centre = offset[axis];
            let (best, _) = golden_min(
                |y| {
                    let mut trial = offset.clone();
                    trial[axis] = y;
                    Ok(-correlation(&trial))
                },
                centre - T::one(),
                centre + T::one(),
                GOLDEN_ITERATIONS,
            )?;
            if correlation(&{
                let mut trial = offset.clone();
                trial[axis] = best;
                trial
            }) > correlation(&offset)
            {
                offset[axis] = best;
            }
        }
    }
    Ok(offset)
}

fn hs_inner<T: Real>(a: &Field<T>, b: &Field<T>, symbol: &[T]) -> Complex<T> {
    let ah = SpectralField::forward(a);
    let bh = SpectralField::forward(b);
    ah.coefficients()
        .iter()
        .zip(bh.coefficients())
        .zip(symbol)
        .fold(Complex::new(T::zero(), T::zero()), |acc, ((x, y), &w)| {
            acc + x * y.conj() * (T::one() + w)
        })
}

const GOLDEN_ITERATIONS: usize = 40;

/// `min_θ ‖e^{iθ}u_y − φ‖_{W^s}` for one translate `u_y`: the phase is
/// bracketed by the `L²`-optimal and `H^s`-optimal angles (both closed
/// form) and refined by golden-section search.
fn phase_distance<T: Real>(uy: &Field<T>, phi: &Field<T>, s: T, symbol: &[T]) -> Result<T> {
    let dist = |theta: T| -> Result<T> {
        let rotated = uy.scaled_complex(Complex::from_polar(T::one(), theta));
        ws_norm(&rotated.checked_sub(phi)?, s)
    };
    let theta_l2 = -uy.inner(phi)?.arg();
    let mut theta_hs = -hs_inner(uy, phi, symbol).arg();
    while theta_hs - theta_l2 > T::PI() {
        theta_hs = theta_hs - T::TAU();
    }
    while theta_l2 - theta_hs > T::PI() {
        theta_hs = theta_hs + T::TAU();
    }
    let pad = lit::<T>(0.1);
    let (_, refined) = golden_min(
        dist,
        theta_l2.min(theta_hs) - pad,
        theta_l2.max(theta_hs) + pad,
        GOLDEN_ITERATIONS,
    )?;
    Ok(refined.min(dist(theta_l2)?).min(dist(theta_hs)?))
}

/// `min ‖e^{iθ}u(· − y) − φ‖_{W^s}` over the symmetry orbit of `φ`.
///
/// Translates tried: the identity, the grid shift maximizing the spectral
/// cross-correlation, and that shift refined to a fractional offset by a
/// band-limited translate. At each the phase is optimized by
/// `phase_distance`. The result is the smallest distance found, so it never
/// underestimates the orbit infimum by more than rounding.
pub fn modded_distance<T: Real>(u: &Field<T>, phi: &Field<T>, s: T) -> Result<T> {
    check_order(s)?;
    u.check_same_grid(phi)?;
    if phi.is_zero() {
        return Err(Error::ZeroField);
    }
    let symbol = phi.grid().symbol(s);
    let cross = cross_spectrum(u, phi);
    let grid_shift = best_grid_shift(u, &cross);
    let fine = refine_shift(u, &cross, &grid_shift)?;

    let mut best = phase_distance(&u.shifted(&grid_shift), phi, s, &symbol)?;
    if grid_shift.iter().any(|&o| o != 0) {
        best = best.min(phase_distance(u, phi, s, &symbol)?);
    }
    let integral = fine
        .iter()
        .zip(&grid_shift)
        .all(|(&f, &g)| f == lit(g as f64));
    if !integral {
        best = best.min(phase_distance(&u.translated(&fine), phi, s, &symbol)?);
    }
    Ok(best)
}

/// Highest Fourier mode per axis in the random modulation.
const PERTURBATION_MODES: i64 = 4;

/// `φ + δ·r` where `r = φ·q` for a random trigonometric polynomial `q` of
/// low degree, normalized so that `‖r‖_{W^s} = 1`. The modded distance of
/// the result to `φ` is therefore at most `δ`. Deterministic in `seed`.
pub fn perturb<T: Real>(phi: &Field<T>, s: T, delta: T, seed: u64) -> Result<Field<T>> {
    check_order(s)?;
    if !(delta >= T::zero()) || !delta.is_finite() {
        return Err(Error::InvalidParameter {
            name: "delta",
            reason: format!("must be nonnegative and finite, got {}", to_f64(delta)),
        });
    }
    if phi.is_zero() {
        return Err(Error::ZeroField);
    }
    if delta == T::zero() {
        return Ok(phi.clone());
    }
    let grid = phi.grid();
    let dim = grid.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut terms = Vec::new();
    let range = -PERTURBATION_MODES..=PERTURBATION_MODES;
    for mx in range.clone() {
        for my in if dim == 1 { 0..=0 } else { range.clone() } {
            let weight = 1.0 / (1.0 + (mx * mx + my * my) as f64);
            let c = Complex::new(
                lit::<T>(weight * rng.random_range(-1.0..1.0)),
                lit::<T>(weight * rng.random_range(-1.0..1.0)),
            );
            terms.push(([mx, my], c));
        }
    }
    let unit = T::TAU() / grid.extent();
    let q = Field::from_fn(grid, |x| {
        terms.iter().fold(Complex::new(T::zero(), T::zero()), |acc, (m, c)| {
            let phase = x
                .iter()
                .zip(m)
                .fold(T::zero(), |p, (&xi, &mi)| p + unit * lit(mi as f64) * xi);
            acc + c * Complex::from_polar(T::one(), phase)
        })
    })?;
    let r = Field::new(
        grid,
        q.values().iter().zip(phi.values()).map(|(a, b)| a * b).collect(),
    )?;
    let norm = ws_norm(&r, s)?;
    phi.axpy(delta / norm, &r)
}

/// For every seed: perturb `phi` by `delta`, evolve with `cfg`, and sample
/// the modded distance to `phi` at every snapshot.
pub fn stability_experiment<T: Real>(
    phi: &Field<T>,
    delta: T,
    cfg: &EvolveConfig<T>,
    seeds: &[u64],
) -> Result<Vec<StabilityReport<T>>> {
    seeds
        .iter()
        .map(|&seed| stability_run(phi, delta, cfg, seed))
        .collect()
}

/// One seed of [`stability_experiment`].
pub fn stability_run<T: Real>(
    phi: &Field<T>,
    delta: T,
    cfg: &EvolveConfig<T>,
    seed: u64,
) -> Result<StabilityReport<T>> {
    let u0 = perturb(phi, cfg.s, delta, seed)?;
    let mut times = Vec::new();
    let mut distance = Vec::new();
    evolve_with(&u0, cfg, |snap| {
        times.push(snap.time);
        distance.push(modded_distance(&snap.field, phi, cfg.s)?);
        Ok(())
    })?;
    let delta0 = distance[0];
    let sup_distance = distance.iter().fold(T::zero(), |a, &b| a.max(b));
    let ratio = if delta0 > T::zero() {
        sup_distance / delta0
    } else if sup_distance == T::zero() {
        T::zero()
    } else {
        T::infinity()
    };
    Ok(StabilityReport {
        seed,
        delta,
        delta0,
        times,
        distance,
        sup_distance,
        ratio,
    })
}
