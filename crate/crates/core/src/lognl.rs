//! Pointwise kernels of the logarithmic nonlinearity.
//!
//! `|z|² Log|z|²` is split as `B(|z|) − A(|z|)` where `A` is the convex Young
//! function generating the Orlicz space and `B` vanishes identically near the
//! origin. No code path here evaluates `Log(0)`.
//!
//! The regularized nonlinearity `g_m` agrees with `z Log|z|²` on the amplitude
//! band `[1/m, m]` and is globally Lipschitz. It is evaluated through the real
//! phase rate `γ_m`, with `g_m(z) = z·γ_m(|z|)`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

#[inline]
fn cutoff<T: Real>() -> T {
    // e^{-3}
    lit::<T>(-3.0).exp()
}

/// `A(r)` without argument checks; `r` must be nonnegative.
#[inline]
pub(crate) fn young_a<T: Real>(r: T) -> T {
    if r == T::zero() {
        T::zero()
    } else if r <= cutoff() {
        let r2 = r * r;
        -r2 * r2.ln()
    } else {
        let e3: T = cutoff();
        lit::<T>(3.0) * r * r + lit::<T>(4.0) * e3 * r - e3 * e3
    }
}

/// `B(r) = r² Log r² + A(r)` without argument checks; exactly 0 on `[0, e^{-3}]`.
#[inline]
pub(crate) fn young_b<T: Real>(r: T) -> T {
    if r <= cutoff() {
        T::zero()
    } else {
        let r2 = r * r;
        let e3: T = cutoff();
        r2 * r2.ln() + lit::<T>(3.0) * r2 + lit::<T>(4.0) * e3 * r - e3 * e3
    }
}

fn check_nonnegative<T: Real>(r: T) -> Result<()> {
    if r >= T::zero() {
        Ok(())
    } else {
        Err(Error::NegativeArgument(to_f64(r)))
    }
}

/// The Young function `A`: `−r² Log r²` below `e^{-3}`, the tangent quadratic
/// `3r² + 4e^{-3}r − e^{-6}` above.
pub fn a_of<T: Real>(r: T) -> Result<T> {
    check_nonnegative(r)?;
    Ok(young_a(r))
}

/// `B = F + A` with `F(r) = r² Log r²`.
pub fn b_of<T: Real>(r: T) -> Result<T> {
    check_nonnegative(r)?;
    Ok(young_b(r))
}

/// `r² Log r²` evaluated as `B(r) − A(r)`, equal to 0 at `r = 0`.
///
/// Negative inputs are treated through `|r|`.
#[inline]
pub fn log_term<T: Real>(r: T) -> T {
    let r = r.abs();
    young_b(r) - young_a(r)
}

/// Antiderivative of `B(s)/s` vanishing at 0.
fn b_over_s_primitive<T: Real>(r: T) -> T {
    let e3: T = cutoff();
    if r <= e3 {
        return T::zero();
    }
    let e6 = e3 * e3;
    let prim = |s: T| {
        let s2 = s * s;
        s2 / lit(2.0) * (s2.ln() - T::one()) + lit::<T>(1.5) * s2 + lit::<T>(4.0) * e3 * s
            - e6 * s.ln()
    };
    prim(r) - prim(e3)
}

/// Antiderivative of `A(s)/s` on `s ≥ e^{-3}` (the quadratic branch).
fn a_over_s_primitive_upper<T: Real>(r: T) -> T {
    let e3: T = cutoff();
    lit::<T>(1.5) * r * r + lit::<T>(4.0) * e3 * r - e3 * e3 * r.ln()
}

/// The regularized logarithmic nonlinearity at level `m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegularizedNonlinearity<T> {
    m: u64,
    lower: T,
    upper: T,
    // m² A(1/m)
    low_rate: T,
    // B(m)/m²
    high_rate: T,
    primitive_at_lower: T,
    primitive_at_upper: T,
}

impl<T: Real> RegularizedNonlinearity<T> {
    pub fn new(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidRegularization);
        }
        let upper: T = lit(m as f64);
        let lower = T::one() / upper;
        let low_rate = upper * upper * young_a(lower);
        let high_rate = young_b(upper) / (upper * upper);
        let primitive_at_lower =
            b_over_s_primitive(lower) - low_rate * lower * lower / lit(2.0);
        let band = |s: T| s * s / lit(2.0) * ((s * s).ln() - T::one());
        let primitive_at_upper = primitive_at_lower + band(upper) - band(lower);
        Ok(Self {
            m,
            lower,
            upper,
            low_rate,
            high_rate,
            primitive_at_lower,
            primitive_at_upper,
        })
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    /// The amplitude band `[1/m, m]` on which `g_m` is exact.
    pub fn band(&self) -> (T, T) {
        (self.lower, self.upper)
    }

    /// Phase rate `γ_m(r)`: `Log r²` on the band, continuous extensions outside.
    #[inline]
    pub fn gamma(&self, r: T) -> T {
        if r < self.lower {
            let b = young_b(r);
            if b == T::zero() {
                -self.low_rate
            } else {
                b / (r * r) - self.low_rate
            }
        } else if r > self.upper {
            self.high_rate - young_a(r) / (r * r)
        } else {
            (r * r).ln()
        }
    }

    /// `g_m(z) = z·γ_m(|z|)`.
    #[inline]
    pub fn apply(&self, z: Complex<T>) -> Complex<T> {
        z * self.gamma(z.norm())
    }

    /// `G_m(r) = ∫₀^r s·γ_m(s) ds` in closed form.
    pub fn primitive(&self, r: T) -> T {
        let r = r.abs();
        if r <= self.lower {
            b_over_s_primitive(r) - self.low_rate * r * r / lit(2.0)
        } else if r <= self.upper {
            let band = |s: T| s * s / lit(2.0) * ((s * s).ln() - T::one());
            self.primitive_at_lower + band(r) - band(self.lower)
        } else {
            self.primitive_at_upper + self.high_rate * (r * r - self.upper * self.upper) / lit(2.0)
                - (a_over_s_primitive_upper(r) - a_over_s_primitive_upper(self.upper))
        }
    }
}

/// `γ_m(r)`; see [`RegularizedNonlinearity::gamma`].
pub fn gamma_m<T: Real>(r: T, nl: &RegularizedNonlinearity<T>) -> Result<T> {
    check_nonnegative(r)?;
    Ok(nl.gamma(r))
}

pub fn g_m_apply<T: Real>(z: Complex<T>, nl: &RegularizedNonlinearity<T>) -> Complex<T> {
    nl.apply(z)
}

pub fn g_m_primitive<T: Real>(r: T, nl: &RegularizedNonlinearity<T>) -> Result<T> {
    check_nonnegative(r)?;
    Ok(nl.primitive(r))
}

/// `Log r²` for `r > 0` and 0 at `r = 0`: the unregularized phase rate,
/// written through `log_term` so zeros of a field never hit `Log(0)`.
#[inline]
pub fn log_rate<T: Real>(r: T) -> T {
    if r == T::zero() {
        T::zero()
    } else {
        log_term(r) / (r * r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const E3: f64 = 0.049_787_068_367_863_944;

    fn nl(m: u64) -> RegularizedNonlinearity<f64> {
        RegularizedNonlinearity::new(m).unwrap()
    }

    // adaptive Simpson quadrature, test oracle only
    fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
        fn rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = f(lm);
            let frm = f(rm);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                    + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
            }
        }
        let fa = f(a);
        let fb = f(b);
        let fm = f(0.5 * (a + b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        rec(f, a, b, fa, fm, fb, whole, tol, 50)
    }

    // integrates s·γ(s) piecewise so every panel is smooth
    fn primitive_oracle(r: f64, n: &RegularizedNonlinearity<f64>) -> f64 {
        let f = |s: f64| s * n.gamma(s);
        let (lo, hi) = n.band();
        let mut knots = vec![0.0, E3, lo, 1.0, hi, r];
        knots.retain(|&k| k <= r);
        knots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        knots.dedup();
        knots.windows(2).map(|w| simpson(&f, w[0], w[1], 1e-14)).sum()
    }

    #[test]
    fn a_examples() {
        assert_eq!(a_of(0.0f64).unwrap(), 0.0);
        let both = 6.0 * (-6.0f64).exp();
        let first = -E3 * E3 * (E3 * E3).ln();
        let second = 3.0 * E3 * E3 + 4.0 * E3 * E3 - E3 * E3;
        assert!((first - both).abs() < 1e-16);
        assert!((second - both).abs() < 1e-16);
        assert!((a_of(E3).unwrap() - 1.487_251_305_999_815e-2).abs() < 1e-15);
        // 3 + 4e^{-3} − e^{-6}
        assert!((a_of(1.0f64).unwrap() - 3.196_669_521_294_789).abs() < 1e-14);
        assert!(matches!(a_of(-1.0f64), Err(Error::NegativeArgument(_))));
    }

    #[test]
    fn b_examples() {
        assert_eq!(b_of(0.01f64).unwrap(), 0.0);
        assert!((b_of(1.0f64).unwrap() - 3.196_669_521_294_789).abs() < 1e-14);
        assert!(b_of(E3).unwrap().abs() < 1e-16);
        assert!(b_of(-0.5f64).is_err());
    }

    #[test]
    fn log_term_examples() {
        assert_eq!(log_term(0.0f64), 0.0);
        assert_eq!(log_term(1.0f64), 0.0);
        let e = std::f64::consts::E;
        assert!((log_term(e) - 2.0 * e * e).abs() < 1e-13);
        assert!((log_term(e) - 14.778_112_197_861_3).abs() < 1e-12);
    }

    #[test]
    fn a_is_nonnegative_increasing_convex() {
        let h = 1e-3;
        let vals: Vec<f64> = (0..=10_000).map(|i| young_a(i as f64 * h)).collect();
        for w in vals.windows(3) {
            assert!(w[0] >= 0.0);
            assert!(w[1] >= w[0]);
            assert!(w[2] - 2.0 * w[1] + w[0] >= -1e-15);
        }
    }

    #[test]
    fn b_vanishes_below_cutoff() {
        for i in 0..=1000 {
            assert_eq!(young_b(E3 * i as f64 / 1000.0), 0.0);
        }
    }

    #[test]
    fn log_term_matches_direct_formula() {
        for i in 0..=900 {
            let r = 10f64.powf(-6.0 + 9.0 * i as f64 / 900.0);
            let direct = r * r * (r * r).ln();
            if direct == 0.0 {
                continue;
            }
            assert!((log_term(r) - direct).abs() <= 1e-12 * direct.abs(), "r = {r}");
        }
    }

    #[test]
    fn gamma_examples() {
        for m in [1, 2, 10, 1000] {
            assert_eq!(nl(m).gamma(1.0), 0.0);
        }
        let n = nl(10);
        // 0.1 > e^{-3}, so A(0.1) sits on the quadratic branch
        let expected = -100.0 * (3.0 * 0.01 + 0.4 * E3 - E3 * E3);
        assert!((n.gamma(0.0) - expected).abs() < 1e-13);
        let band = (0.01f64).ln();
        let small_branch = young_b(0.1) / 0.01 - 100.0 * young_a(0.1);
        assert!((band - small_branch).abs() < 1e-12);
        assert!((n.gamma(0.1) - band).abs() < 1e-12);
    }

    #[test]
    fn gamma_continuous_at_seams() {
        for m in [1u64, 2, 3, 10, 20, 21, 100, 1_000_000] {
            let n = nl(m);
            let (lo, hi) = n.band();
            for seam in [lo, hi] {
                let left = n.gamma(seam * (1.0 - 1e-15));
                let right = n.gamma(seam * (1.0 + 1e-15));
                let at = n.gamma(seam);
                assert!((left - at).abs() < 1e-12, "m = {m}");
                assert!((right - at).abs() < 1e-12, "m = {m}");
                // branch formulas agree exactly at the seam
                let band = (seam * seam).ln();
                let low = if young_b(seam) == 0.0 { 0.0 } else { young_b(seam) / (seam * seam) }
                    - m as f64 * m as f64 * young_a(1.0 / m as f64);
                let high = young_b(m as f64) / (m as f64 * m as f64) - young_a(seam) / (seam * seam);
                let other = if seam == lo { low } else { high };
                assert!((band - other).abs() < 1e-12, "m = {m}, seam {seam}");
            }
        }
    }

    #[test]
    fn g_m_examples() {
        let n = nl(10);
        assert_eq!(n.apply(Complex::new(1.0, 0.0)), Complex::new(0.0, 0.0));
        let e = std::f64::consts::E;
        let got = n.apply(Complex::new(0.0, e));
        assert!((got - Complex::new(0.0, 2.0 * e)).norm() < 1e-14);
        assert_eq!(n.apply(Complex::new(0.0, 0.0)), Complex::new(0.0, 0.0));
    }

    #[test]
    fn g_m_converges_exactly_once_in_band() {
        let zs = [
            Complex::new(0.3, -0.2),
            Complex::new(5.0, 1.0),
            Complex::new(1e-3, 0.0),
            Complex::new(0.0, 40.0),
        ];
        for z in zs {
            let r: f64 = z.norm();
            let exact = z * (r * r).ln();
            let m_needed = r.max(1.0 / r).ceil() as u64;
            for m in [m_needed, m_needed + 1, 4 * m_needed] {
                assert_eq!(nl(m).apply(z), exact, "z = {z}, m = {m}");
            }
        }
    }

    #[test]
    fn primitive_examples() {
        let n = nl(10);
        assert_eq!(n.primitive(0.0), 0.0);
        for r in [0.1, 1.0] {
            let oracle = primitive_oracle(r, &n);
            assert!((n.primitive(r) - oracle).abs() < 1e-10, "r = {r}");
        }
    }

    #[test]
    fn primitive_against_quadrature_at_random_radii() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for m in [1u64, 3, 10, 100] {
            let n = nl(m);
            for _ in 0..25 {
                let r: f64 = 10f64.powf(rng.random_range(-3.0..1.3));
                let oracle = primitive_oracle(r, &n);
                let got = n.primitive(r);
                assert!((got - oracle).abs() < 1e-10 * oracle.abs().max(1.0), "m={m} r={r}: {got} vs {oracle}");
            }
        }
    }

    #[test]
    fn primitive_derivative_is_g_m() {
        for m in [2u64, 10, 100] {
            let n = nl(m);
            for r in [0.003, 0.04, 0.3, 1.7, 6.0, 150.0] {
                let eps = 1e-6 * r;
                let fd = (n.primitive(r + eps) - n.primitive(r - eps)) / (2.0 * eps);
                let exact = r * n.gamma(r);
                assert!((fd - exact).abs() < 1e-6 * exact.abs().max(1.0), "m={m} r={r}");
            }
        }
    }

    #[test]
    fn rejects_zero_m() {
        assert!(RegularizedNonlinearity::<f64>::new(0).is_err());
        assert!(gamma_m(-1.0, &nl(2)).is_err());
        assert!(g_m_primitive(-1.0, &nl(2)).is_err());
    }

    proptest! {
        #[test]
        fn gauge_symmetry(re in -20.0f64..20.0, im in -20.0f64..20.0, theta in -7.0f64..7.0, m in 1u64..200) {
            let n = nl(m);
            let z = Complex::new(re, im);
            let rot = Complex::from_polar(1.0, theta);
            let lhs = n.apply(rot * z);
            let rhs = rot * n.apply(z);
            prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
        }

        #[test]
        fn gamma_continuous_everywhere(r in 0.0f64..50.0, m in 1u64..100) {
            let n = nl(m);
            let d = 1e-9;
            prop_assert!((n.gamma(r + d) - n.gamma(r)).abs() < 1e-5 + d * 1e5);
        }
    }
}
