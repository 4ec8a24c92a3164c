//! Periodic torus discretization, the discrete Fourier transform, the
//! fractional Laplacian multiplier and Plancherel-based Sobolev norms.
//!
//! The torus is `[-L/2, L/2)^d` sampled at `n` points per axis with spacing
//! `h = L/n`. Samples are stored row-major: for `d = 2` the flat index is
//! `i0 * n + i1`, axis 0 being `x` and axis 1 being `y`.
//!
//! Frequencies follow the standard FFT ordering: index `j` on an axis maps to
//! the integer mode `m = j` for `j < n/2` and `m = j - n` otherwise, with
//! wavenumber `k = 2πm/L`. The Nyquist mode `m = -n/2` is kept and receives
//! the multiplier `|k|^{2s}` like every other mode.
//!
//! Spectral coefficients are scaled by `(h/n)^{d/2}` relative to the raw DFT,
//! so that `Σ|û|² = Σ|u|² h^d` holds exactly (Plancherel with trapezoidal
//! weights).

use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

struct GridInner<T: Real> {
    dim: usize,
    n: usize,
    extent: T,
    wavenumbers: Vec<T>,
    k_sq: Vec<T>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
}

/// Uniform periodic grid on the torus `[-L/2, L/2)^d`, `d ∈ {1, 2}`.
///
/// Cloning is cheap: FFT plans and wavenumber tables are shared.
#[derive(Clone)]
pub struct Grid<T: Real> {
    inner: Arc<GridInner<T>>,
}

impl<T: Real> fmt::Debug for Grid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("dim", &self.inner.dim)
            .field("n", &self.inner.n)
            .field("extent", &self.inner.extent)
            .finish()
    }
}

impl<T: Real> PartialEq for Grid<T> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
            || (self.inner.dim == other.inner.dim
                && self.inner.n == other.inner.n
                && self.inner.extent == other.inner.extent)
    }
}

/// Builds a grid, rejecting `d ∉ {1, 2}`, `n` not a power of two or below 8,
/// and nonpositive extents.
pub fn make_grid<T: Real>(dim: usize, n: usize, extent: T) -> Result<Grid<T>> {
    Grid::new(dim, n, extent)
}

impl<T: Real> Grid<T> {
    pub fn new(dim: usize, n: usize, extent: T) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(Error::InvalidDimension(dim));
        }
        if n < 8 || !n.is_power_of_two() {
            return Err(Error::InvalidResolution(n));
        }
        if !(extent > T::zero()) || !extent.is_finite() {
            return Err(Error::InvalidExtent(to_f64(extent)));
        }
        let two_pi_over_l = T::TAU() / extent;
        let wavenumbers: Vec<T> = (0..n)
            .map(|j| {
                let m = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
                lit::<T>(m) * two_pi_over_l
            })
            .collect();
        let k_sq = match dim {
            1 => wavenumbers.iter().map(|&k| k * k).collect(),
            _ => {
                let mut out = Vec::with_capacity(n * n);
                for &kx in &wavenumbers {
                    for &ky in &wavenumbers {
                        out.push(kx * kx + ky * ky);
                    }
                }
                out
            }
        };
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        Ok(Self {
            inner: Arc::new(GridInner {
                dim,
                n,
                extent,
                wavenumbers,
                k_sq,
                forward,
                inverse,
            }),
        })
    }

    pub fn dim(&self) -> usize {
        self.inner.dim
    }

    /// Points per axis.
    pub fn n(&self) -> usize {
        self.inner.n
    }

    pub fn extent(&self) -> T {
        self.inner.extent
    }

    /// Grid spacing `h = L/n`.
    pub fn spacing(&self) -> T {
        self.inner.extent / lit(self.inner.n as f64)
    }

    /// Quadrature weight `h^d` of every sample site.
    pub fn cell_volume(&self) -> T {
        self.spacing().powi(self.inner.dim as i32)
    }

    /// Total number of sample sites `n^d`.
    pub fn len(&self) -> usize {
        self.inner.n.pow(self.inner.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Per-axis wavenumbers in FFT ordering.
    pub fn wavenumbers(&self) -> &[T] {
        &self.inner.wavenumbers
    }

    /// `|k|²` for every spectral index (flat, row-major).
    pub fn k_squared(&self) -> &[T] {
        &self.inner.k_sq
    }

    /// Largest `|k|` present on the grid.
    pub fn max_wavenumber(&self) -> T {
        let half = T::PI() * lit(self.inner.n as f64) / self.inner.extent;
        half * lit::<T>(self.inner.dim as f64).sqrt()
    }

    /// Physical coordinate of sample `j` along an axis.
    pub fn coordinate(&self, j: usize) -> T {
        -self.inner.extent / lit(2.0) + lit::<T>(j as f64) * self.spacing()
    }

    /// Coordinates of the flat sample index; unused trailing entries are 0.
    pub fn position(&self, index: usize) -> [T; 2] {
        match self.inner.dim {
            1 => [self.coordinate(index), T::zero()],
            _ => [
                self.coordinate(index / self.inner.n),
                self.coordinate(index % self.inner.n),
            ],
        }
    }

    /// The multiplier `|k|^{2s}` for every spectral index; the zero mode maps to 0.
    pub fn symbol(&self, s: T) -> Vec<T> {
        self.inner
            .k_sq
            .iter()
            .map(|&k2| if k2 > T::zero() { k2.powf(s) } else { T::zero() })
            .collect()
    }

    /// Fourier multiplier of a translation by `offset` grid cells.
    pub(crate) fn translation_phases(&self, offset: &[T]) -> Vec<Complex<T>> {
        let n = self.inner.n;
        let h = self.spacing();
        let axis = |o: T| -> Vec<Complex<T>> {
            self.inner
                .wavenumbers
                .iter()
                .enumerate()
                .map(|(j, &k)| {
                    let angle = -k * o * h;
                    if j == n / 2 {
                        Complex::new(angle.cos(), T::zero())
                    } else {
                        Complex::from_polar(T::one(), angle)
                    }
                })
                .collect()
        };
        let first = axis(offset.first().copied().unwrap_or_else(T::zero));
        if self.inner.dim == 1 {
            return first;
        }
        let second = axis(offset.get(1).copied().unwrap_or_else(T::zero));
        first
            .iter()
            .flat_map(|a| second.iter().map(move |b| a * b))
            .collect()
    }

    fn transform(&self, buf: &mut [Complex<T>], forward: bool) {
        let plan = if forward {
            &self.inner.forward
        } else {
            &self.inner.inverse
        };
        let n = self.inner.n;
        // processes every contiguous row of length n
        plan.process(buf);
        if self.inner.dim == 2 {
            transpose_square(buf, n);
            plan.process(buf);
            transpose_square(buf, n);
        }
    }

    fn forward_scale(&self) -> T {
        let ratio = self.spacing() / lit(self.inner.n as f64);
        ratio.powi(self.inner.dim as i32).sqrt()
    }
}

fn transpose_square<T: Copy>(buf: &mut [T], n: usize) {
    for i in 0..n {
        for j in (i + 1)..n {
            buf.swap(i * n + j, j * n + i);
        }
    }
}

/// Complex samples of a wavefunction over a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T: Real> {
    grid: Grid<T>,
    values: Vec<Complex<T>>,
}

impl<T: Real> Field<T> {
    /// Wraps samples, checking length and finiteness.
    pub fn new(grid: &Grid<T>, values: Vec<Complex<T>>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: values.len(),
            });
        }
        if let Some(i) = values.iter().position(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self {
            grid: grid.clone(),
            values,
        })
    }

    pub(crate) fn from_raw(grid: &Grid<T>, values: Vec<Complex<T>>) -> Self {
        debug_assert_eq!(values.len(), grid.len());
        Self {
            grid: grid.clone(),
            values,
        }
    }

    pub fn zeros(grid: &Grid<T>) -> Self {
        Self::from_raw(grid, vec![Complex::new(T::zero(), T::zero()); grid.len()])
    }

    /// Samples `f` at every grid position. `f` receives a slice of length `d`.
    pub fn from_fn(grid: &Grid<T>, f: impl Fn(&[T]) -> Complex<T>) -> Result<Self> {
        let dim = grid.dim();
        let values = (0..grid.len())
            .map(|i| {
                let x = grid.position(i);
                f(&x[..dim])
            })
            .collect();
        Self::new(grid, values)
    }

    /// Real-valued samples.
    pub fn from_real(grid: &Grid<T>, values: &[T]) -> Result<Self> {
        Self::new(
            grid,
            values.iter().map(|&v| Complex::new(v, T::zero())).collect(),
        )
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[Complex<T>] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Complex<T>> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|z| z.re == T::zero() && z.im == T::zero())
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Quadrature of `|u|²`.
    pub fn l2_sq(&self) -> T {
        let sum = self.values.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr());
        sum * self.grid.cell_volume()
    }

    /// `∫ u·conj(v)` by quadrature.
    pub fn inner(&self, other: &Self) -> Result<Complex<T>> {
        self.check_same_grid(other)?;
        let sum = self
            .values
            .iter()
            .zip(&other.values)
            .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| {
                acc + a * b.conj()
            });
        Ok(sum * self.grid.cell_volume())
    }

    /// Real inner product `Re ∫ u·conj(v)`, the pairing used for gradients.
    pub fn real_inner(&self, other: &Self) -> Result<T> {
        Ok(self.inner(other)?.re)
    }

    pub fn max_abs(&self) -> T {
        self.values.iter().fold(T::zero(), |acc, z| acc.max(z.norm()))
    }

    /// Largest modulus on the first row/column of the torus, i.e. at `x = -L/2`.
    pub fn boundary_max(&self) -> T {
        let n = self.grid.n();
        match self.grid.dim() {
            1 => self.values[0].norm(),
            _ => (0..n)
                .map(|j| self.values[j].norm().max(self.values[j * n].norm()))
                .fold(T::zero(), T::max),
        }
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self::from_raw(&self.grid, self.values.iter().map(|z| z * factor).collect())
    }

    pub fn scaled_complex(&self, factor: Complex<T>) -> Self {
        Self::from_raw(&self.grid, self.values.iter().map(|z| z * factor).collect())
    }

    /// `self + factor·other`.
    pub fn axpy(&self, factor: T, other: &Self) -> Result<Self> {
        self.check_same_grid(other)?;
        Ok(Self::from_raw(
            &self.grid,
            self.values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b * factor)
                .collect(),
        ))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.axpy(T::one(), other)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.axpy(-T::one(), other)
    }

    /// Pointwise map of the samples.
    pub fn map(&self, f: impl Fn(Complex<T>) -> Complex<T>) -> Self {
        Self::from_raw(&self.grid, self.values.iter().map(|&z| f(z)).collect())
    }

    /// Moduli `|u|` at every sample.
    pub fn moduli(&self) -> Vec<T> {
        self.values.iter().map(|z| z.norm()).collect()
    }

    /// Periodic translate `w(x) = u(x - offset·h)` by whole grid cells.
    pub fn shifted(&self, offset: &[isize]) -> Self {
        let n = self.grid.n() as isize;
        let wrap = |i: isize| (i.rem_euclid(n)) as usize;
        let values = match self.grid.dim() {
            1 => {
                let o = offset.first().copied().unwrap_or(0);
                (0..n).map(|i| self.values[wrap(i - o)]).collect()
            }
            _ => {
                let ox = offset.first().copied().unwrap_or(0);
                let oy = offset.get(1).copied().unwrap_or(0);
                let mut out = Vec::with_capacity(self.values.len());
                for i in 0..n {
                    for j in 0..n {
                        out.push(self.values[wrap(i - ox) * n as usize + wrap(j - oy)]);
                    }
                }
                out
            }
        };
        Self::from_raw(&self.grid, values)
    }

    /// Band-limited translate `w(x) = u(x - offset·h)` for fractional
    /// offsets (in grid cells), applied as a Fourier phase. Agrees with
    /// [`Field::shifted`] at integer offsets; the Nyquist mode is moved by its
    /// real part so that real fields stay real.
    pub fn translated(&self, offset: &[T]) -> Self {
        let phases = self.grid.translation_phases(offset);
        let mut spec = self.to_spectral();
        for (c, p) in spec.coefficients_mut().iter_mut().zip(&phases) {
            *c = *c * p;
        }
        spec.inverse()
    }

    pub fn check_same_grid(&self, other: &Self) -> Result<()> {
        if self.grid == other.grid {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    pub fn to_spectral(&self) -> SpectralField<T> {
        SpectralField::forward(self)
    }

    /// Fraction of spectral mass carried by the outer eighth of the modes on
    /// each axis; a band-limited field has a tail far below 1e-10.
    pub fn spectral_tail(&self) -> T {
        let spec = self.to_spectral();
        let n = self.grid.n();
        let cutoff = n / 2 - n / 8;
        let is_outer = |j: usize| {
            let m = if j < n / 2 { j } else { n - j };
            m >= cutoff
        };
        let mut tail = T::zero();
        let mut total = T::zero();
        for (idx, c) in spec.coefficients().iter().enumerate() {
            let e = c.norm_sqr();
            total = total + e;
            let outer = match self.grid.dim() {
                1 => is_outer(idx),
                _ => is_outer(idx / n) || is_outer(idx % n),
            };
            if outer {
                tail = tail + e;
            }
        }
        if total > T::zero() {
            tail / total
        } else {
            T::zero()
        }
    }
}

/// Plancherel-normalized discrete Fourier coefficients of a [`Field`].
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField<T: Real> {
    grid: Grid<T>,
    coefficients: Vec<Complex<T>>,
}

impl<T: Real> SpectralField<T> {
    pub fn forward(u: &Field<T>) -> Self {
        let grid = u.grid.clone();
        let mut buf = u.values.clone();
        grid.transform(&mut buf, true);
        let scale = grid.forward_scale();
        buf.iter_mut().for_each(|z| *z = *z * scale);
        Self {
            grid,
            coefficients: buf,
        }
    }

    pub fn from_coefficients(grid: &Grid<T>, coefficients: Vec<Complex<T>>) -> Result<Self> {
        if coefficients.len() != grid.len() {
            return Err(Error::LengthMismatch {
                expected: grid.len(),
                got: coefficients.len(),
            });
        }
        Ok(Self {
            grid: grid.clone(),
            coefficients,
        })
    }

    pub fn inverse(&self) -> Field<T> {
        let mut buf = self.coefficients.clone();
        self.grid.transform(&mut buf, false);
        let total = lit::<T>(self.grid.len() as f64);
        let scale = T::one() / (self.grid.forward_scale() * total);
        buf.iter_mut().for_each(|z| *z = *z * scale);
        Field::from_raw(&self.grid, buf)
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coefficients
    }

    pub fn coefficients_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.coefficients
    }

    /// `Σ|û|²`, equal to the physical quadrature of `|u|²`.
    pub fn l2_sq(&self) -> T {
        self.coefficients
            .iter()
            .fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    /// Multiplies every coefficient by a real multiplier table.
    pub fn apply_multiplier(&mut self, multiplier: &[T]) {
        for (c, &m) in self.coefficients.iter_mut().zip(multiplier) {
            *c = *c * m;
        }
    }
}

/// Forward then inverse transform; a self-test hook for the FFT contract.
pub fn transform_roundtrip<T: Real>(u: &Field<T>) -> Field<T> {
    SpectralField::forward(u).inverse()
}

pub(crate) fn check_order<T: Real>(s: T) -> Result<()> {
    if s > T::zero() && s <= T::one() {
        Ok(())
    } else {
        Err(Error::InvalidOrder(to_f64(s)))
    }
}

/// `(−Δ)^s u` via the multiplier `|k|^{2s}`, for `0 < s ≤ 1`.
pub fn frac_laplacian<T: Real>(u: &Field<T>, s: T) -> Result<Field<T>> {
    check_order(s)?;
    let mut spec = u.to_spectral();
    spec.apply_multiplier(&u.grid.symbol(s));
    Ok(spec.inverse())
}

/// Squared `L²`, `Ḣ^s` and `H^s` norms of a field.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SobolevNorms<T> {
    pub l2_sq: T,
    pub hs_semi_sq: T,
    pub hs_sq: T,
}

pub fn sobolev_norms<T: Real>(u: &Field<T>, s: T) -> Result<SobolevNorms<T>> {
    check_order(s)?;
    let spec = u.to_spectral();
    let hs_semi_sq = hs_semi_from_spectrum(&spec, &u.grid.symbol(s));
    let l2_sq = u.l2_sq();
    Ok(SobolevNorms {
        l2_sq,
        hs_semi_sq,
        hs_sq: l2_sq + hs_semi_sq,
    })
}

pub(crate) fn hs_semi_from_spectrum<T: Real>(spec: &SpectralField<T>, symbol: &[T]) -> T {
    spec.coefficients
        .iter()
        .zip(symbol)
        .fold(T::zero(), |acc, (c, &w)| acc + w * c.norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type C = Complex<f64>;

    fn random_field(grid: &Grid<f64>, rng: &mut ChaCha8Rng) -> Field<f64> {
        let values = (0..grid.len())
            .map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        Field::new(grid, values).unwrap()
    }

    fn plane_wave(grid: &Grid<f64>, k: f64) -> Field<f64> {
        Field::from_fn(grid, |x| C::from_polar(1.0, k * x[0])).unwrap()
    }

    fn max_diff(a: &Field<f64>, b: &Field<f64>) -> f64 {
        a.values()
            .iter()
            .zip(b.values())
            .map(|(x, y)| (x - y).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn wavenumbers_at_two_pi() {
        let g = make_grid(1, 8, std::f64::consts::TAU).unwrap();
        let expected = [0.0, 1.0, 2.0, 3.0, -4.0, -3.0, -2.0, -1.0];
        for (k, e) in g.wavenumbers().iter().zip(expected) {
            assert!((k - e).abs() < 1e-15);
        }
    }

    #[test]
    fn wavenumbers_scale_with_extent() {
        let a = make_grid(1, 8, std::f64::consts::TAU).unwrap();
        let b = make_grid(1, 8, std::f64::consts::PI).unwrap();
        for (ka, kb) in a.wavenumbers().iter().zip(b.wavenumbers()) {
            assert!((2.0 * ka - kb).abs() < 1e-14);
        }
    }

    #[test]
    fn two_dimensional_sizes() {
        let g = make_grid(2, 16, 16.0).unwrap();
        assert_eq!(g.len(), 256);
        assert_eq!(g.cell_volume(), 1.0);
        assert_eq!(g.k_squared().len(), 256);
        let weights: f64 = (0..g.len()).map(|_| g.cell_volume()).sum();
        assert!((weights - 256.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(matches!(make_grid(3, 16, 1.0), Err(Error::InvalidDimension(3))));
        assert!(matches!(make_grid(1, 12, 1.0), Err(Error::InvalidResolution(12))));
        assert!(matches!(make_grid(1, 4, 1.0), Err(Error::InvalidResolution(4))));
        assert!(matches!(make_grid(1, 16, 0.0), Err(Error::InvalidExtent(_))));
        assert!(matches!(make_grid(1, 16, -2.0), Err(Error::InvalidExtent(_))));
    }

    #[test]
    fn wavenumbers_symmetric_up_to_nyquist() {
        let g: Grid<f64> = make_grid(1, 16, 5.0).unwrap();
        let k = g.wavenumbers();
        for j in 1..8 {
            assert!((k[j] + k[16 - j]).abs() < 1e-13);
        }
        assert!(k[8] < 0.0);
    }

    #[test]
    fn constant_field_has_only_zero_mode() {
        let g = make_grid(1, 64, std::f64::consts::TAU).unwrap();
        let u = Field::from_fn(&g, |_| C::new(1.0, 0.0)).unwrap();
        let spec = u.to_spectral();
        for (i, c) in spec.coefficients().iter().enumerate().skip(1) {
            assert!(c.norm() < 1e-14, "mode {i}");
        }
        assert!(spec.coefficients()[0].norm() > 1.0);
        assert!(max_diff(&transform_roundtrip(&u), &u) < 1e-15);
    }

    #[test]
    fn plane_wave_single_coefficient() {
        let g = make_grid(1, 64, std::f64::consts::TAU).unwrap();
        let u = plane_wave(&g, 1.0);
        let spec = u.to_spectral();
        for (i, c) in spec.coefficients().iter().enumerate() {
            if i == 1 {
                assert!(c.norm() > 1.0);
            } else {
                assert!(c.norm() < 1e-13, "mode {i}: {c}");
            }
        }
    }

    #[test]
    fn random_roundtrip_seed7() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for g in [make_grid(1, 128, 3.0).unwrap(), make_grid(2, 32, 3.0).unwrap()] {
            let u = random_field(&g, &mut rng);
            let back = transform_roundtrip(&u);
            let err = back.checked_sub(&u).unwrap().l2_sq().sqrt() / u.l2_sq().sqrt();
            assert!(err <= 1e-12, "relative error {err}");
        }
    }

    #[test]
    fn frac_laplacian_plane_waves() {
        let g = make_grid(1, 64, std::f64::consts::TAU).unwrap();
        let u1 = plane_wave(&g, 1.0);
        assert!(max_diff(&frac_laplacian(&u1, 0.5).unwrap(), &u1) < 1e-13);
        let u2 = plane_wave(&g, 2.0);
        assert!(max_diff(&frac_laplacian(&u2, 0.5).unwrap(), &u2.scaled(2.0)) < 1e-13);
        assert!(max_diff(&frac_laplacian(&u2, 1.0).unwrap(), &u2.scaled(4.0)) < 1e-12);
    }

    #[test]
    fn frac_laplacian_rejects_bad_order() {
        let g = make_grid(1, 8, 1.0).unwrap();
        let u = Field::zeros(&g);
        assert!(matches!(frac_laplacian(&u, 0.0), Err(Error::InvalidOrder(_))));
        assert!(matches!(frac_laplacian(&u, 1.5), Err(Error::InvalidOrder(_))));
        assert!(sobolev_norms(&u, -0.1).is_err());
    }

    #[test]
    fn norms_of_simple_fields() {
        let tau = std::f64::consts::TAU;
        let g = make_grid(1, 64, tau).unwrap();
        let c = C::new(0.3, -0.4);
        let u = Field::from_fn(&g, |_| c).unwrap();
        let n = sobolev_norms(&u, 0.5).unwrap();
        assert!((n.l2_sq - tau * c.norm_sqr()).abs() < 1e-13);
        assert!(n.hs_semi_sq.abs() < 1e-13);

        let w = plane_wave(&g, 1.0);
        let n = sobolev_norms(&w, 0.5).unwrap();
        assert!((n.hs_semi_sq - tau).abs() < 1e-12);
        assert!((n.hs_sq - 2.0 * tau).abs() < 1e-12);
    }

    #[test]
    fn gaussian_seminorm_matches_dense_summation() {
        // Oracle: explicit O(n²) DFT of the samples, then Σ|k||c_k|²·(h/n).
        let g = make_grid(1, 256, 32.0).unwrap();
        let u = Field::from_fn(&g, |x: &[f64]| C::new((-x[0] * x[0] / 2.0).exp(), 0.0)).unwrap();
        let n = 256usize;
        let h = 32.0 / n as f64;
        let mut oracle = 0.0;
        for j in 0..n {
            let m = if j < n / 2 { j as f64 } else { j as f64 - n as f64 };
            let k = std::f64::consts::TAU * m / 32.0;
            let mut acc = C::new(0.0, 0.0);
            for (p, v) in u.values().iter().enumerate() {
                let phase = -std::f64::consts::TAU * (j * p) as f64 / n as f64;
                acc += v * C::from_polar(1.0, phase);
            }
            oracle += k.abs() * acc.norm_sqr() * h / n as f64;
        }
        let got = sobolev_norms(&u, 0.5).unwrap().hs_semi_sq;
        assert!((got - oracle).abs() <= 1e-10 * oracle.max(1.0), "{got} vs {oracle}");
    }

    #[test]
    fn plancherel_on_random_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let grids = [make_grid(1, 64, 7.0).unwrap(), make_grid(2, 16, 2.5).unwrap()];
        for trial in 0..1000 {
            let g = &grids[trial % 2];
            let u = random_field(g, &mut rng);
            let phys = u.l2_sq();
            let spec = u.to_spectral().l2_sq();
            assert!((phys - spec).abs() <= 1e-12 * phys, "trial {trial}");
        }
    }

    fn band_limited(grid: &Grid<f64>, rng: &mut ChaCha8Rng) -> Field<f64> {
        let n = grid.n();
        let coeffs = (0..grid.len())
            .map(|idx| {
                let keep = |j: usize| j < n / 4 || j > n - n / 4;
                let ok = match grid.dim() {
                    1 => keep(idx),
                    _ => keep(idx / n) && keep(idx % n),
                };
                if ok {
                    C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
                } else {
                    C::new(0.0, 0.0)
                }
            })
            .collect();
        SpectralField::from_coefficients(grid, coeffs).unwrap().inverse()
    }

    #[test]
    fn multiplier_composition() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for g in [make_grid(1, 64, 9.0).unwrap(), make_grid(2, 32, 9.0).unwrap()] {
            for &s in &[0.3, 0.5, 1.0] {
                let u = band_limited(&g, &mut rng);
                let twice = frac_laplacian(&frac_laplacian(&u, s / 2.0).unwrap(), s / 2.0).unwrap();
                let once = frac_laplacian(&u, s).unwrap();
                let scale = once.max_abs().max(1.0);
                assert!(max_diff(&twice, &once) <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn self_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for g in [make_grid(1, 64, 4.0).unwrap(), make_grid(2, 16, 4.0).unwrap()] {
            for _ in 0..20 {
                let u = random_field(&g, &mut rng);
                let v = random_field(&g, &mut rng);
                let lhs = frac_laplacian(&u, 0.7).unwrap().inner(&v).unwrap();
                let rhs = u.inner(&frac_laplacian(&v, 0.7).unwrap()).unwrap();
                assert!((lhs - rhs).norm() <= 1e-12 * lhs.norm().max(1.0));
            }
        }
    }

    #[test]
    fn real_even_field_stays_real() {
        let g = make_grid(1, 64, 10.0).unwrap();
        let u = Field::from_fn(&g, |x: &[f64]| C::new((-x[0] * x[0]).exp() + 0.1 * (x[0] * 0.6).cos(), 0.0))
            .unwrap();
        let lap = frac_laplacian(&u, 0.4).unwrap();
        assert!(lap.values().iter().all(|z| z.im.abs() < 1e-12));

        let g2 = make_grid(2, 16, 6.0).unwrap();
        let u2 = Field::from_fn(&g2, |x: &[f64]| C::new((-(x[0] * x[0] + x[1] * x[1])).exp(), 0.0)).unwrap();
        let lap2 = frac_laplacian(&u2, 0.6).unwrap();
        assert!(lap2.values().iter().all(|z| z.im.abs() < 1e-12));
    }

    #[test]
    fn shifted_matches_translation() {
        let g = make_grid(2, 16, 16.0).unwrap();
        let u = Field::from_fn(&g, |x: &[f64]| C::new(x[0], x[1])).unwrap();
        let w = u.shifted(&[2, -3]);
        // w(x) = u(x - 2h, y + 3h)
        let n = 16;
        let (i, j) = (5usize, 7usize);
        assert_eq!(w.values()[i * n + j], u.values()[(i - 2) * n + (j + 3)]);
        assert_eq!(u.shifted(&[2, -3]).shifted(&[-2, 3]), u);
    }

    #[test]
    fn translation_extends_integer_shifts() {
        let g = make_grid(2, 16, 8.0).unwrap();
        let u = Field::from_fn(&g, |x: &[f64]| {
            C::from_polar((-(x[0] * x[0] + 2.0 * x[1] * x[1]) / 2.0).exp(), 0.3 * x[1])
        })
        .unwrap();
        let a = u.translated(&[2.0, -3.0]);
        let b = u.shifted(&[2, -3]);
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).norm() < 1e-13);
        }
        let g1 = make_grid(1, 64, 16.0).unwrap();
        let f = |x: f64| (-(x * x) / 2.0).exp();
        let v = Field::from_fn(&g1, |x: &[f64]| C::new(f(x[0]), 0.0)).unwrap();
        let w = v.translated(&[0.37]);
        let h = g1.spacing();
        for (j, z) in w.values().iter().enumerate() {
            let x = g1.coordinate(j);
            assert!((z.re - f(x - 0.37 * h)).abs() < 1e-12 && z.im.abs() < 1e-14);
        }
        assert!((w.l2_sq() - v.l2_sq()).abs() < 1e-12);
    }

    #[test]
    fn field_validation() {
        let g = make_grid(1, 8, 1.0).unwrap();
        assert!(matches!(
            Field::new(&g, vec![C::new(0.0, 0.0); 7]),
            Err(Error::LengthMismatch { .. })
        ));
        let mut vals = vec![C::new(0.0, 0.0); 8];
        vals[3] = C::new(f64::NAN, 0.0);
        assert!(matches!(Field::new(&g, vals), Err(Error::NonFinite(3))));
        let other = make_grid(1, 16, 1.0).unwrap();
        assert!(matches!(
            Field::zeros(&g).inner(&Field::zeros(&other)),
            Err(Error::GridMismatch)
        ));
    }

    #[test]
    fn spectral_tail_of_gaussian_is_tiny() {
        let g = make_grid(1, 256, 32.0).unwrap();
        let u = Field::from_fn(&g, |x: &[f64]| C::new((-x[0] * x[0] / 2.0).exp(), 0.0)).unwrap();
        assert!(u.spectral_tail() < 1e-20);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(random_field(&g, &mut rng).spectral_tail() > 0.1);
    }
}
