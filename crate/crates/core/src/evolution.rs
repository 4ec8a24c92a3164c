//! Time integration of the regularized flow
//! `i∂ₜu = (−Δ)^s u − g_m(u)` by Strang splitting.
//!
//! Both substeps are solved exactly: the nonlinear one is a pointwise phase
//! rotation (`g_m(z) = z·γ_m(|z|)` with real `γ_m`), the linear one a Fourier
//! phase. Each preserves the discrete charge, so charge drift is pure
//! rounding.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::functionals::energy_m;
use crate::grid::{check_order, Field, SpectralField};
use crate::lognl::RegularizedNonlinearity;
use crate::scalar::{lit, to_f64, Real};

/// Parameters of one time integration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvolveConfig<T> {
    pub s: T,
    pub m: u64,
    pub tau: T,
    pub t_final: T,
    /// Record a snapshot every this many steps (and always at the end).
    pub snapshot_every: usize,
    pub track_conservation: bool,
}

impl<T: Real> EvolveConfig<T> {
    pub const DEFAULT_M: u64 = 100;

    pub fn new(s: T, tau: T, t_final: T) -> Self {
        Self {
            s,
            m: Self::DEFAULT_M,
            tau,
            t_final,
            snapshot_every: 1,
            track_conservation: true,
        }
    }

    pub fn with_m(mut self, m: u64) -> Self {
        self.m = m;
        self
    }

    pub fn with_snapshot_every(mut self, every: usize) -> Self {
        self.snapshot_every = every;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_order(self.s)?;
        if self.m == 0 {
            return Err(Error::InvalidRegularization);
        }
        if !(self.tau > T::zero()) || !self.tau.is_finite() {
            return Err(Error::InvalidParameter {
                name: "tau",
                reason: format!("must be positive and finite, got {}", to_f64(self.tau)),
            });
        }
        if !(self.t_final >= T::zero()) || !self.t_final.is_finite() {
            return Err(Error::InvalidParameter {
                name: "t_final",
                reason: format!("must be nonnegative and finite, got {}", to_f64(self.t_final)),
            });
        }
        if self.snapshot_every == 0 {
            return Err(Error::InvalidParameter {
                name: "snapshot_every",
                reason: "must be at least 1".into(),
            });
        }
        Ok(())
    }

    /// Number of steps: `t_final / τ` rounded to the nearest integer.
    pub fn steps(&self) -> usize {
        to_f64(self.t_final / self.tau).round() as usize
    }
}

/// Charge and regularized energy sampled at the snapshot times.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConservationReport<T> {
    pub times: Vec<T>,
    pub charge: Vec<T>,
    pub energy_m: Vec<T>,
    pub max_charge_drift: T,
    pub max_energy_drift: T,
    pub steps: usize,
    /// The time actually reached, `steps·τ`.
    pub t_final: T,
}

/// The field at one recorded time.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot<T: Real> {
    pub step: usize,
    pub time: T,
    pub field: Field<T>,
}

/// `u ← u·exp(iτγ_m(|u|))`, the exact flow of `i∂ₜu = −g_m(u)`.
pub fn nonlinear_substep<T: Real>(u: &Field<T>, nl: &RegularizedNonlinearity<T>, tau: T) -> Field<T> {
    u.map(|z| z * Complex::from_polar(T::one(), tau * nl.gamma(z.norm())))
}

/// `û(k) ← e^{−iτ|k|^{2s}} û(k)`, the exact flow of `i∂ₜu = (−Δ)^s u`.
pub fn linear_substep<T: Real>(u: &Field<T>, s: T, tau: T) -> Result<Field<T>> {
    check_order(s)?;
    let phases = linear_phases(&u.grid().symbol(s), tau);
    Ok(apply_phases(u, &phases))
}

fn linear_phases<T: Real>(symbol: &[T], tau: T) -> Vec<Complex<T>> {
    symbol
        .iter()
        .map(|&w| Complex::from_polar(T::one(), -tau * w))
        .collect()
}

fn apply_phases<T: Real>(u: &Field<T>, phases: &[Complex<T>]) -> Field<T> {
    let mut spec = SpectralField::forward(u);
    for (c, p) in spec.coefficients_mut().iter_mut().zip(phases) {
        *c = *c * p;
    }
    spec.inverse()
}

/// One step `L(τ/2)∘N(τ)∘L(τ/2)`.
pub fn strang_step<T: Real>(u: &Field<T>, cfg: &EvolveConfig<T>) -> Result<Field<T>> {
    cfg.validate()?;
    Ok(Stepper::new(u, cfg)?.step(u))
}

/// Strang stepper with the half-step Fourier phases cached.
struct Stepper<T: Real> {
    half: Vec<Complex<T>>,
    nl: RegularizedNonlinearity<T>,
    tau: T,
}

impl<T: Real> Stepper<T> {
    fn new(u: &Field<T>, cfg: &EvolveConfig<T>) -> Result<Self> {
        let symbol = u.grid().symbol(cfg.s);
        Ok(Self {
            half: linear_phases(&symbol, cfg.tau * lit(0.5)),
            nl: RegularizedNonlinearity::new(cfg.m)?,
            tau: cfg.tau,
        })
    }

    fn step(&self, u: &Field<T>) -> Field<T> {
        let a = apply_phases(u, &self.half);
        let b = nonlinear_substep(&a, &self.nl, self.tau);
        apply_phases(&b, &self.half)
    }
}

fn relative_drift<T: Real>(values: &[T]) -> T {
    let Some(&first) = values.first() else {
        return T::zero();
    };
    let scale = first.abs();
    values.iter().fold(T::zero(), |acc, &v| {
        let d = (v - first).abs();
        acc.max(if scale > T::zero() { d / scale } else { d })
    })
}

/// Integrates from `u0`, handing each snapshot (including `t = 0` and the
/// final time) to `on_snapshot` instead of storing it.
pub fn evolve_with<T: Real>(
    u0: &Field<T>,
    cfg: &EvolveConfig<T>,
    mut on_snapshot: impl FnMut(&Snapshot<T>) -> Result<()>,
) -> Result<ConservationReport<T>> {
    cfg.validate()?;
    let stepper = Stepper::new(u0, cfg)?;
    let steps = cfg.steps();
    let mut report = ConservationReport {
        steps,
        t_final: cfg.tau * lit(steps as f64),
        ..Default::default()
    };
    let mut record = |step: usize, field: Field<T>, report: &mut ConservationReport<T>| {
        let time = cfg.tau * lit(step as f64);
        if cfg.track_conservation {
            report.times.push(time);
            report.charge.push(field.l2_sq());
            report.energy_m.push(energy_m(&field, cfg.s, &stepper.nl)?);
        }
        let snap = Snapshot { step, time, field };
        on_snapshot(&snap)?;
        Ok::<_, Error>(snap.field)
    };

    let mut u = record(0, u0.clone(), &mut report)?;
    for step in 1..=steps {
        u = stepper.step(&u);
        if !u.is_finite() {
            return Err(Error::NonFiniteEvolution {
                step,
                time: to_f64(cfg.tau) * step as f64,
            });
        }
        if step % cfg.snapshot_every == 0 || step == steps {
            u = record(step, u, &mut report)?;
        }
    }
    report.max_charge_drift = relative_drift(&report.charge);
    report.max_energy_drift = relative_drift(&report.energy_m);
    Ok(report)
}

/// Integrates from `u0` and keeps every snapshot.
pub fn evolve<T: Real>(
    u0: &Field<T>,
    cfg: &EvolveConfig<T>,
) -> Result<(Vec<Snapshot<T>>, ConservationReport<T>)> {
    let mut snapshots = Vec::new();
    let report = evolve_with(u0, cfg, |snap| {
        snapshots.push(snap.clone());
        Ok(())
    })?;
    Ok((snapshots, report))
}

/// Exact solution `c·e^{ikx}·e^{−it(|k|^{2s} − Log c²)}` for plane-wave data
/// whose amplitude lies in the band of the regularization. `mode` counts
/// periods across the torus on each axis.
pub fn plane_wave<T: Real>(
    grid: &crate::grid::Grid<T>,
    amplitude: T,
    mode: [i64; 2],
    s: T,
    t: T,
) -> Result<Field<T>> {
    check_order(s)?;
    let unit = T::TAU() / grid.extent();
    let k = [unit * lit(mode[0] as f64), unit * lit(mode[1] as f64)];
    let k_sq = match grid.dim() {
        1 => k[0] * k[0],
        _ => k[0] * k[0] + k[1] * k[1],
    };
    let omega = k_sq.powf(s) - (amplitude * amplitude).ln();
    Field::from_fn(grid, |x| {
        let phase = x.iter().zip(k).fold(T::zero(), |acc, (&xi, ki)| acc + ki * xi) - omega * t;
        Complex::from_polar(amplitude, phase)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    fn max_diff(a: &Field<f64>, b: &Field<f64>) -> f64 {
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    fn gaussian(n: usize, l: f64) -> Field<f64> {
        let g = make_grid(1, n, l).unwrap();
        Field::from_fn(&g, |x: &[f64]| C::new((-x[0] * x[0] / 2.0).exp(), 0.0)).unwrap()
    }

    fn random_smooth(g: &crate::grid::Grid<f64>, rng: &mut ChaCha8Rng) -> Field<f64> {
        let (a, b) = (rng.random_range(0.5..2.0), rng.random_range(-2.0..2.0));
        let (k, c) = (rng.random_range(-2.0..2.0), rng.random_range(0.5..1.5));
        Field::from_fn(g, |x: &[f64]| {
            C::from_polar(a * (-(x[0] - b).powi(2) / (2.0 * c * c)).exp(), k * x[0])
        })
        .unwrap()
    }

    #[test]
    fn nonlinear_substep_examples() {
        let g = make_grid(1, 16, 4.0).unwrap();
        let nl = RegularizedNonlinearity::new(100).unwrap();
        let ones = Field::from_fn(&g, |_| C::new(1.0, 0.0)).unwrap();
        assert!(max_diff(&nonlinear_substep(&ones, &nl, 0.7), &ones) < 1e-15);

        let e = std::f64::consts::E;
        let nl3 = RegularizedNonlinearity::new(3).unwrap();
        let u = Field::from_fn(&g, |_| C::new(e, 0.0)).unwrap();
        let w = nonlinear_substep(&u, &nl3, std::f64::consts::FRAC_PI_2);
        for z in w.values() {
            assert!((z - C::new(-e, 0.0)).norm() < 1e-14);
        }
    }

    #[test]
    fn nonlinear_substep_preserves_moduli_and_reverses() {
        let g = make_grid(1, 64, 8.0).unwrap();
        let nl = RegularizedNonlinearity::new(100).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let u = Field::new(
            &g,
            (0..64)
                .map(|_| C::new(rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)))
                .collect(),
        )
        .unwrap();
        let w = nonlinear_substep(&u, &nl, 0.3);
        for (a, b) in u.values().iter().zip(w.values()) {
            assert!((a.norm() - b.norm()).abs() < 1e-14 * a.norm().max(1.0));
        }
        let back = nonlinear_substep(&w, &nl, -0.3);
        assert!(max_diff(&back, &u) < 1e-14);
    }

    #[test]
    fn linear_substep_examples() {
        let tau = std::f64::consts::TAU;
        let g = make_grid(1, 32, tau).unwrap();
        let u = Field::from_fn(&g, |x: &[f64]| C::from_polar(1.0, x[0])).unwrap();
        let t = 0.8;
        let w = linear_substep(&u, 0.5, t).unwrap();
        let exact = Field::from_fn(&g, |x: &[f64]| C::from_polar(1.0, x[0] - t)).unwrap();
        assert!(max_diff(&w, &exact) < 1e-13);
        assert!(max_diff(&linear_substep(&u, 0.5, 0.0).unwrap(), &u) < 1e-14);
        assert!(linear_substep(&u, 1.5, 0.1).is_err());

        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let g2 = make_grid(2, 16, 5.0).unwrap();
        let v = Field::new(
            &g2,
            (0..256)
                .map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect(),
        )
        .unwrap();
        let w = linear_substep(&v, 0.3, 0.37).unwrap();
        assert!((w.l2_sq() - v.l2_sq()).abs() <= 1e-13 * v.l2_sq());
    }

    #[test]
    fn plane_wave_is_reproduced() {
        let tau = std::f64::consts::TAU;
        let g = make_grid(1, 32, tau).unwrap();
        let s = 0.5;
        let u0 = plane_wave(&g, 1.7, [3, 0], s, 0.0).unwrap();
        let cfg = EvolveConfig::new(s, 1e-2, 5.0).with_snapshot_every(100);
        let (snaps, report) = evolve(&u0, &cfg).unwrap();
        let last = snaps.last().unwrap();
        assert_eq!(report.steps, 500);
        let exact = plane_wave(&g, 1.7, [3, 0], s, last.time).unwrap();
        assert!(max_diff(&last.field, &exact) < 1e-8);

        let g2 = make_grid(2, 8, tau).unwrap();
        let v0 = plane_wave(&g2, 0.6, [1, -2], 0.8, 0.0).unwrap();
        let v1 = strang_step(&v0, &EvolveConfig::new(0.8, 0.1, 0.1)).unwrap();
        let exact = plane_wave(&g2, 0.6, [1, -2], 0.8, 0.1).unwrap();
        assert!(max_diff(&v1, &exact) < 1e-12);
    }

    #[test]
    fn charge_is_conserved_per_step() {
        let u = gaussian(128, 16.0);
        let cfg = EvolveConfig::new(0.5, 1e-2, 1.0);
        let w = strang_step(&u, &cfg).unwrap();
        assert!((w.l2_sq() - u.l2_sq()).abs() <= 1e-13 * u.l2_sq());
    }

    #[test]
    fn zero_stays_zero() {
        let g = make_grid(1, 32, 8.0).unwrap();
        let cfg = EvolveConfig::new(0.5, 1e-2, 0.5);
        let (snaps, report) = evolve(&Field::zeros(&g), &cfg).unwrap();
        assert!(snaps.iter().all(|s| s.field.is_zero()));
        assert_eq!(report.max_charge_drift, 0.0);
    }

    #[test]
    fn snapshot_cadence_and_rounding() {
        let u = gaussian(32, 8.0);
        let cfg = EvolveConfig::new(0.5, 0.1, 1.04).with_snapshot_every(4);
        let (snaps, report) = evolve(&u, &cfg).unwrap();
        assert_eq!(report.steps, 10);
        let steps: Vec<usize> = snaps.iter().map(|s| s.step).collect();
        assert_eq!(steps, vec![0, 4, 8, 10]);
        assert!((report.t_final - 1.0).abs() < 1e-15);
        assert_eq!(report.times.len(), report.charge.len());
        assert_eq!(report.times.len(), report.energy_m.len());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let u = gaussian(32, 8.0);
        for cfg in [
            EvolveConfig::new(0.5, 0.0, 1.0),
            EvolveConfig::new(0.5, -1.0, 1.0),
            EvolveConfig::new(0.5, 0.1, -1.0),
            EvolveConfig::new(0.0, 0.1, 1.0),
            EvolveConfig::new(0.5, 0.1, 1.0).with_m(0),
            EvolveConfig::new(0.5, 0.1, 1.0).with_snapshot_every(0),
        ] {
            assert!(evolve(&u, &cfg).is_err());
        }
    }

    #[test]
    fn gauge_covariance() {
        let g = make_grid(1, 64, 12.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let u = random_smooth(&g, &mut rng);
        let theta = 1.234;
        let rot = crate::functionals::with_phase(&u, theta);
        let cfg = EvolveConfig::new(0.6, 1e-2, 0.5).with_snapshot_every(50);
        let (a, _) = evolve(&u, &cfg).unwrap();
        let (b, _) = evolve(&rot, &cfg).unwrap();
        let expected = crate::functionals::with_phase(&a.last().unwrap().field, theta);
        assert!(max_diff(&b.last().unwrap().field, &expected) < 1e-12);
    }

    #[test]
    fn time_reversibility() {
        let g = make_grid(1, 64, 12.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        let u = random_smooth(&g, &mut rng);
        let cfg = EvolveConfig::new(0.5, 1e-2, 0.0);
        let stepper = Stepper::new(&u, &cfg).unwrap();
        let back = Stepper::new(&u, &EvolveConfig { tau: -1e-2, ..cfg }).unwrap();
        let mut w = u.clone();
        for _ in 0..100 {
            w = stepper.step(&w);
        }
        for _ in 0..100 {
            w = back.step(&w);
        }
        assert!(max_diff(&w, &u) < 1e-8);
    }
}
