//! Randomized certification suites. Every case draws from its own
//! `ChaCha8Rng` seeded with `base + index`, so a failing case is reproduced
//! by its witness seed alone.

use std::f64::consts::PI;

use fraclog::functionals::{centered_difference, energy_m_gradient};
use fraclog::{
    action_gradient, action_nehari, energy_m, log_sobolev_gap, luxemburg_norm, make_grid,
    nehari_rescale, orlicz_modular, Complex, Field64, Grid64, Nonlinearity64, Parts,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// The Young function under test in the `a_convexity` suite.
pub type Young = dyn Fn(f64) -> f64 + Sync;

/// Which side of the threshold passes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Bound {
    AtLeast,
    AtMost,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub suite: &'static str,
    pub property: &'static str,
    pub cases: usize,
    /// Worst value over the cases (minimum for `AtLeast`, maximum for `AtMost`).
    pub worst: f64,
    pub bound: Bound,
    pub threshold: f64,
    /// Seed of the case that produced `worst`.
    pub witness: u64,
}

impl Row {
    pub fn passes(&self) -> bool {
        match self.bound {
            Bound::AtLeast => self.worst >= self.threshold,
            Bound::AtMost => self.worst <= self.threshold,
        }
    }
}

fn row(
    suite: &'static str,
    property: &'static str,
    bound: Bound,
    threshold: f64,
    values: Vec<(u64, f64)>,
) -> Row {
    let cases = values.len();
    let pick = |a: &(u64, f64), b: &(u64, f64)| match bound {
        Bound::AtLeast => a.1.total_cmp(&b.1),
        Bound::AtMost => b.1.total_cmp(&a.1),
    };
    let (witness, worst) = values
        .into_iter()
        .min_by(pick)
        .unwrap_or((0, f64::NAN));
    Row {
        suite,
        property,
        cases,
        worst,
        bound,
        threshold,
        witness,
    }
}

/// One to three complex Gaussian packets with random centres, widths and
/// momenta: smooth, localized and band-limited to rounding.
pub fn packets(grid: &Grid64, rng: &mut ChaCha8Rng) -> Field64 {
    let count = rng.random_range(1..4);
    let bumps: Vec<(Complex<f64>, [f64; 2], f64, [f64; 2])> = (0..count)
        .map(|_| {
            (
                Complex::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)),
                [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)],
                rng.random_range(0.7..1.8),
                [rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5)],
            )
        })
        .collect();
    Field64::from_fn(grid, |x| {
        bumps.iter().fold(Complex::new(0.0, 0.0), |acc, (a, c, w, k)| {
            let mut r2 = 0.0;
            let mut phase = 0.0;
            for (d, xv) in x.iter().enumerate() {
                r2 += (xv - c[d]).powi(2);
                phase += k[d] * xv;
            }
            acc + a * Complex::from_polar((-r2 / (2.0 * w * w)).exp(), phase)
        })
    })
    .expect("finite samples")
}

/// `c·e^{p}` for a packet sum `p` scaled to sup norm ½: smooth and bounded
/// away from zero, where the action is differentiable.
pub fn nonvanishing(grid: &Grid64, rng: &mut ChaCha8Rng) -> Field64 {
    let p = packets(grid, rng);
    let p = p.scaled(0.5 / p.max_abs());
    let c = Complex::from_polar(rng.random_range(0.3..2.0), rng.random_range(0.0..2.0 * PI));
    p.map(|z| c * z.exp())
}

fn noise(grid: &Grid64, amp: f64, rng: &mut ChaCha8Rng) -> Field64 {
    let values = (0..grid.len())
        .map(|_| {
            Complex::new(
                amp * rng.random_range(-1.0..1.0),
                amp * rng.random_range(-1.0..1.0),
            )
        })
        .collect();
    Field64::new(grid, values).expect("finite samples")
}

fn per_case<T: Send>(base: u64, cases: usize, f: impl Fn(u64) -> T + Sync + Send) -> Vec<T> {
    (0..cases as u64)
        .into_par_iter()
        .map(|i| f(base.wrapping_add(i)))
        .collect()
}

fn grid(dim: usize, n: usize, l: f64) -> Grid64 {
    make_grid(dim, n, l).expect("valid grid")
}

pub fn log_sobolev(base: u64, cases: usize) -> Vec<Row> {
    let g1 = grid(1, 256, 40.0);
    let g2 = grid(2, 64, 24.0);
    let gaps = per_case(base, cases, |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = if seed % 4 == 3 { &g2 } else { &g1 };
        let u = packets(g, &mut rng);
        let mut min = f64::INFINITY;
        for alpha in [0.5, 1.0, 2.0] {
            for s in [0.5, 1.0] {
                min = min.min(log_sobolev_gap(&u, s, alpha).expect("nonzero field"));
            }
        }
        (seed, min)
    });
    let gs = grid(1, 256, 32.0);
    let gauss = Field64::from_fn(&gs, |x| Complex::new((-x[0] * x[0] / 2.0).exp(), 0.0))
        .expect("finite samples");
    let saturation = log_sobolev_gap(&gauss, 1.0, PI.sqrt()).expect("nonzero field").abs();
    vec![
        row("log_sobolev", "log_sobolev_gap", Bound::AtLeast, -1e-8, gaps),
        row(
            "log_sobolev",
            "gaussian_saturation",
            Bound::AtMost,
            1e-6,
            vec![(0, saturation)],
        ),
    ]
}

pub fn orlicz(base: u64, cases: usize) -> Vec<Row> {
    let results = per_case(base, cases * 5, |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = if seed % 2 == 0 {
            grid(1, 64, rng.random_range(1.0..6.0))
        } else {
            grid(2, 16, rng.random_range(1.0..6.0))
        };
        let amp = 10f64.powf(rng.random_range(-3.0..2.0));
        let u = noise(&g, amp, &mut rng);
        let lux = luxemburg_norm(&u);
        let (k, m) = (lux.norm, orlicz_modular(&u));
        let violation = (k.min(k * k) - m).max(m - k.max(k * k)).max(0.0) / m;
        (seed, violation, (lux.modular_at_norm - 1.0).abs())
    });
    vec![
        row(
            "orlicz",
            "modular_inequality",
            Bound::AtMost,
            1e-10,
            results.iter().map(|r| (r.0, r.1)).collect(),
        ),
        row(
            "orlicz",
            "modular_at_norm",
            Bound::AtMost,
            1e-8,
            results.iter().map(|r| (r.0, r.2)).collect(),
        ),
    ]
}

/// Centered differences against the analytic gradients. The action is
/// probed at nonvanishing fields since `u Log|u|²` is not differentiable
/// at zeros of `u`; the regularized energy is probed at packets.
pub fn gradient(base: u64, cases: usize) -> Vec<Row> {
    let g = grid(1, 128, 20.0);
    let nl = Nonlinearity64::new(100).expect("m ≥ 1");
    let results = per_case(base, (cases / 5).max(1), |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = packets(&g, &mut rng);
        let v = packets(&g, &mut rng);
        let w = nonvanishing(&g, &mut rng);
        let s = rng.random_range(0.3..1.0);
        let omega = rng.random_range(-1.0..1.0);
        let rel = |fd: f64, exact: f64| (fd - exact).abs() / exact.abs().max(1.0);
        let action = |w: &Field64| Ok(Parts::of(w, s)?.action(omega));
        let fd = centered_difference(action, &w, &v, 1e-5).expect("valid order");
        let exact = action_gradient(&w, s, omega)
            .and_then(|g| g.real_inner(&v))
            .expect("same grid");
        let a = rel(fd, exact);
        let fd = centered_difference(|w: &Field64| energy_m(w, s, &nl), &u, &v, 1e-5)
            .expect("valid order");
        let exact = energy_m_gradient(&u, s, &nl)
            .and_then(|g| g.real_inner(&v))
            .expect("same grid");
        (seed, a, rel(fd, exact))
    });
    vec![
        row(
            "gradient",
            "action_gradient",
            Bound::AtMost,
            1e-6,
            results.iter().map(|r| (r.0, r.1)).collect(),
        ),
        row(
            "gradient",
            "energy_m_gradient",
            Bound::AtMost,
            1e-6,
            results.iter().map(|r| (r.0, r.2)).collect(),
        ),
    ]
}

pub fn identity(base: u64, cases: usize) -> Vec<Row> {
    let grids = [grid(1, 128, 24.0), grid(2, 32, 16.0)];
    let results = per_case(base, cases * 2, |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = &grids[(seed % 2) as usize];
        let u = packets(g, &mut rng).scaled(10f64.powf(rng.random_range(-2.0..1.0)));
        let s = rng.random_range(0.2..1.0);
        let omega = rng.random_range(-2.0..2.0);
        let q = action_nehari(&u, s, omega).expect("valid order");
        let identity = (q.action - 0.5 * q.nehari - 0.5 * q.l2_sq).abs() / q.action.abs().max(1.0);
        let w = nehari_rescale(&u, s, omega).expect("nonzero field");
        let r = action_nehari(&w, s, omega).expect("valid order");
        let nehari = r.nehari.abs() / (r.l2_sq + r.hs_semi_sq).max(1.0);
        (seed, identity, nehari)
    });
    vec![
        row(
            "identity",
            "action_identity",
            Bound::AtMost,
            1e-12,
            results.iter().map(|r| (r.0, r.1)).collect(),
        ),
        row(
            "identity",
            "nehari_rescale",
            Bound::AtMost,
            1e-10,
            results.iter().map(|r| (r.0, r.2)).collect(),
        ),
    ]
}

/// Midpoint convexity of `young` on random pairs in `[0, 10]`, and
/// nonnegativity with `young(0) = 0`.
pub fn a_convexity(base: u64, cases: usize, young: &Young) -> Vec<Row> {
    let results = per_case(base, cases, |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst_mid: f64 = 0.0;
        let mut most_negative: f64 = 0.0;
        for _ in 0..100 {
            let (a, b) = (rng.random_range(0.0..10.0), rng.random_range(0.0..10.0));
            let (fa, fb) = (young(a), young(b));
            let excess = young(0.5 * (a + b)) - 0.5 * (fa + fb);
            worst_mid = worst_mid.max(excess / (fa.abs() + fb.abs()).max(1.0));
            most_negative = most_negative.min(fa).min(fb);
        }
        (seed, worst_mid, -most_negative)
    });
    let at_zero = young(0.0).abs();
    vec![
        row(
            "a_convexity",
            "a_convexity",
            Bound::AtMost,
            1e-12,
            results.iter().map(|r| (r.0, r.1)).collect(),
        ),
        row(
            "a_convexity",
            "a_nonnegative",
            Bound::AtMost,
            0.0,
            results
                .iter()
                .map(|r| (r.0, r.2))
                .chain(std::iter::once((0, at_zero)))
                .collect(),
        ),
    ]
}

/// The crate's Young function `A`.
pub fn default_young(r: f64) -> f64 {
    fraclog::lognl::a_of(r.abs()).expect("nonnegative argument")
}

/// Runs the selected suites in the fixed order of [`crate::config::SUITES`].
pub fn run_suites(suites: &[String], base: u64, cases: usize, young: &Young) -> Vec<Row> {
    let selected = |name: &str| suites.iter().any(|s| s == name);
    let mut rows = Vec::new();
    if selected("log_sobolev") {
        rows.extend(log_sobolev(base, cases));
    }
    if selected("orlicz") {
        rows.extend(orlicz(base, cases));
    }
    if selected("gradient") {
        rows.extend(gradient(base, cases));
    }
    if selected("identity") {
        rows.extend(identity(base, cases));
    }
    if selected("a_convexity") {
        rows.extend(a_convexity(base, cases, young));
    }
    rows
}
