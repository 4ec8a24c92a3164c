//! One function per subcommand. Each validates its section, runs, writes
//! its artifacts into the output directory and maps the outcome to a
//! [`Failure`] class.

use std::fmt::Write as _;
use std::path::Path;

use fraclog::evolution::plane_wave;
use fraclog::{
    action_nehari, d_lower_bound, evolve_with, save_field, solve_ground_state, stability_run,
    Complex, EvolveConfig64, Field64, Grid64, GroundStateResult64, StabilityReport64,
};
use rayon::prelude::*;

use crate::config::InitKind;
use crate::report::{float, write_csv};
use crate::verify::{default_young, run_suites, Young};
use crate::{Context, Failure};

/// Solves at `(s, omega)` with the `[groundstate]` settings. Divergence and
/// collapse come back as [`Failure::NotConverged`].
fn solve(ctx: &Context, grid: &Grid64, s: f64, omega: f64) -> Result<GroundStateResult64, Failure> {
    let p = ctx.config.groundstate.params(grid, s, omega)?;
    Ok(solve_ground_state(&p)?)
}

fn bound(s: f64, omega: f64, dim: usize) -> Result<f64, Failure> {
    Ok(d_lower_bound(omega, s, dim)?)
}

pub fn groundstate(ctx: &Context) -> Result<(), Failure> {
    let grid = ctx.config.grid.build()?;
    let section = &ctx.config.groundstate;
    section.validate("groundstate")?;
    let (s, omega) = (section.s, section.omega);
    let result = solve(ctx, &grid, s, omega)?;
    let report = action_nehari(&result.phi, s, omega)?;
    let lower = bound(s, omega, grid.dim())?;
    let margin = result.d_omega - lower;

    save_field(ctx.out.join("phi.flnls"), &result.phi, s, None)?;
    write_csv(
        &ctx.out.join("groundstate.csv"),
        &[
            "s", "omega", "d_omega", "bound", "margin", "residual", "nehari", "action",
            "converged", "iterations",
        ],
        &[vec![
            float(s),
            float(omega),
            float(result.d_omega),
            float(lower),
            float(margin),
            float(result.residual),
            float(report.nehari),
            float(report.action),
            result.converged.to_string(),
            result.iterations.to_string(),
        ]],
    )?;
    let trace: Vec<Vec<String>> = result
        .action_trace
        .iter()
        .enumerate()
        .map(|(i, a)| vec![i.to_string(), float(*a)])
        .collect();
    write_csv(&ctx.out.join("trace.csv"), &["step", "action"], &trace)?;

    let mut text = String::new();
    let _ = writeln!(text, "nehari      {:.6e}", report.nehari);
    let _ = writeln!(text, "residual    {:.6e}  (tolerance {:.1e})", result.residual, section.residual_tol);
    let _ = writeln!(text, "d_omega     {:.10}", result.d_omega);
    let _ = writeln!(text, "bound       {:.10}", lower);
    let _ = writeln!(text, "margin      {:.6e}  ({})", margin, if margin >= 0.0 { "ok" } else { "below bound" });
    let _ = writeln!(text, "converged   {}  after {} iterations", result.converged, result.iterations);
    std::fs::write(ctx.out.join("verification.txt"), text)?;

    if result.converged {
        Ok(())
    } else {
        Err(Failure::NotConverged(format!(
            "ground state at s = {s}, omega = {omega} stopped after {} iterations with residual {:e}",
            result.iterations, result.residual
        )))
    }
}

fn initial_field(ctx: &Context) -> Result<Field64, Failure> {
    let ev = &ctx.config.evolve;
    match ev.init {
        InitKind::File => {
            let path = ev.init_file.as_deref().expect("validated");
            let file = fraclog::load_field::<f64>(path)
                .map_err(|e| Failure::Config(format!("evolve.init_file: {e}")))?;
            Ok(file.field)
        }
        InitKind::Gaussian => {
            let grid = ctx.config.grid.build()?;
            let inv = 1.0 / (2.0 * ev.width * ev.width);
            Ok(Field64::from_fn(&grid, |x| {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                Complex::new(ev.amplitude * (-r2 * inv).exp(), 0.0)
            })?)
        }
        InitKind::PlaneWave => {
            let grid = ctx.config.grid.build()?;
            Ok(plane_wave(&grid, ev.amplitude, ev.mode, ev.s, 0.0)?)
        }
    }
}

pub fn evolve(ctx: &Context) -> Result<(), Failure> {
    let ev = &ctx.config.evolve;
    ev.validate()?;
    let u0 = initial_field(ctx)?;
    let cfg = EvolveConfig64::new(ev.s, ev.tau, ev.t_final)
        .with_m(ev.m)
        .with_snapshot_every(ev.snapshot_every);
    let mut last = u0.clone();
    let report = evolve_with(&u0, &cfg, |snap| {
        if ev.write_snapshots {
            let path = ctx.out.join(format!("snap_{:08}.flnls", snap.step));
            save_field(path, &snap.field, ev.s, Some(snap.time))?;
        }
        last = snap.field.clone();
        Ok(())
    })?;

    let rows: Vec<Vec<String>> = (0..report.times.len())
        .map(|i| {
            vec![
                float(report.times[i]),
                float(report.charge[i]),
                float(report.energy_m[i]),
            ]
        })
        .collect();
    write_csv(&ctx.out.join("conservation.csv"), &["t", "charge", "energy_m"], &rows)?;

    let plane_wave_error = match ev.init {
        InitKind::PlaneWave => {
            let exact = plane_wave(last.grid(), ev.amplitude, ev.mode, ev.s, report.t_final)?;
            let diff = last.checked_sub(&exact)?;
            Some(diff.max_abs() / ev.amplitude)
        }
        _ => None,
    };
    write_csv(
        &ctx.out.join("summary.csv"),
        &[
            "steps", "t_final", "max_charge_drift", "max_energy_drift", "charge_ok", "energy_ok",
            "plane_wave_error",
        ],
        &[vec![
            report.steps.to_string(),
            float(report.t_final),
            float(report.max_charge_drift),
            float(report.max_energy_drift),
            (report.max_charge_drift <= ev.max_charge_drift).to_string(),
            (report.max_energy_drift <= ev.max_energy_drift).to_string(),
            plane_wave_error.map(float).unwrap_or_default(),
        ]],
    )?;

    let mut over = Vec::new();
    if report.max_charge_drift > ev.max_charge_drift {
        over.push(format!(
            "charge drift {:e} exceeds {:e}",
            report.max_charge_drift, ev.max_charge_drift
        ));
    }
    if report.max_energy_drift > ev.max_energy_drift {
        over.push(format!(
            "energy drift {:e} exceeds {:e}",
            report.max_energy_drift, ev.max_energy_drift
        ));
    }
    if over.is_empty() {
        Ok(())
    } else {
        Err(Failure::Drift(over.join("; ")))
    }
}

pub fn verify(ctx: &Context) -> Result<(), Failure> {
    verify_with(ctx, &default_young)
}

/// [`verify`] with the Young function of the convexity suite replaced,
/// so that a deliberately broken `A` can be shown to be caught.
pub fn verify_with(ctx: &Context, young: &Young) -> Result<(), Failure> {
    let section = &ctx.config.verify;
    section.validate()?;
    let base = ctx.seed.unwrap_or(section.seed);
    let rows = run_suites(&section.suites, base, section.cases, young);
    let table: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            vec![
                r.suite.to_string(),
                r.property.to_string(),
                r.cases.to_string(),
                float(r.worst),
                float(r.threshold),
                r.passes().to_string(),
                r.witness.to_string(),
            ]
        })
        .collect();
    write_csv(
        &ctx.out.join("verify.csv"),
        &["suite", "property", "cases", "worst", "threshold", "pass", "witness_seed"],
        &table,
    )?;
    let failing: Vec<String> = rows
        .iter()
        .filter(|r| !r.passes())
        .map(|r| format!("{} (worst {:e}, witness seed {})", r.property, r.worst, r.witness))
        .collect();
    if failing.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verify(format!("failing properties: {}", failing.join(", "))))
    }
}

fn stability_ground_state(ctx: &Context) -> Result<Field64, Failure> {
    let st = &ctx.config.stability;
    match &st.ground_state_file {
        Some(path) => {
            let file = fraclog::load_field::<f64>(path)
                .map_err(|e| Failure::Config(format!("stability.ground_state_file: {e}")))?;
            Ok(file.field)
        }
        None => {
            let grid = ctx.config.grid.build()?;
            ctx.config.groundstate.validate("groundstate")?;
            let result = solve(ctx, &grid, st.s, st.omega)?;
            if !result.converged {
                return Err(Failure::NotConverged(format!(
                    "inline ground state did not converge (residual {:e})",
                    result.residual
                )));
            }
            save_field(ctx.out.join("phi.flnls"), &result.phi, st.s, None)?;
            Ok(result.phi)
        }
    }
}

fn write_stability(out: &Path, r: &StabilityReport64) -> Result<(), Failure> {
    let rows: Vec<Vec<String>> = r
        .times
        .iter()
        .zip(&r.distance)
        .map(|(t, d)| vec![r.seed.to_string(), float(*t), float(*d)])
        .collect();
    write_csv(
        &out.join(format!("stability_seed{}.csv", r.seed)),
        &["seed", "t", "distance"],
        &rows,
    )
}

pub fn stability(ctx: &Context) -> Result<(), Failure> {
    let st = &ctx.config.stability;
    st.validate()?;
    let phi = stability_ground_state(ctx)?;
    let cfg = EvolveConfig64::new(st.s, st.tau, st.t_final)
        .with_m(st.m)
        .with_snapshot_every(st.snapshot_every);
    let seeds = match ctx.seed {
        Some(seed) => vec![seed],
        None => st.seeds.clone(),
    };
    let reports = seeds
        .par_iter()
        .map(|&seed| {
            let r = stability_run(&phi, st.delta, &cfg, seed)?;
            write_stability(&ctx.out, &r)?;
            Ok(r)
        })
        .collect::<Result<Vec<_>, Failure>>()?;

    let summary: Vec<Vec<String>> = reports
        .iter()
        .map(|r| {
            vec![
                r.seed.to_string(),
                float(r.delta0),
                float(r.sup_distance),
                float(r.ratio),
                r.passes(st.ratio).to_string(),
            ]
        })
        .collect();
    write_csv(
        &ctx.out.join("stability_summary.csv"),
        &["seed", "delta0", "sup_distance", "ratio", "pass"],
        &summary,
    )?;
    let failed: Vec<&StabilityReport64> = reports.iter().filter(|r| !r.passes(st.ratio)).collect();
    let worst = failed
        .iter()
        .max_by(|a, b| a.sup_distance.total_cmp(&b.sup_distance));
    match worst {
        None => Ok(()),
        Some(w) => Err(Failure::Stability(format!(
            "{} of {} seeds failed; worst seed {} with sup distance {:e} (delta0 {:e}, ratio {:.3})",
            failed.len(),
            reports.len(),
            w.seed,
            w.sup_distance,
            w.delta0,
            w.ratio
        ))),
    }
}

/// Relative tolerance on `d(ω+1)/d(ω) = e` in `scaling.csv`.
pub const SCALING_TOL: f64 = 0.02;

pub fn sweep(ctx: &Context) -> Result<(), Failure> {
    let sw = &ctx.config.sweep;
    sw.validate()?;
    ctx.config.groundstate.validate("groundstate")?;
    let grid = ctx.config.grid.build()?;
    let tasks: Vec<(usize, f64, f64)> = sw
        .s
        .iter()
        .flat_map(|&s| sw.omega.iter().map(move |&w| (s, w)))
        .enumerate()
        .map(|(i, (s, w))| (i, s, w))
        .collect();
    let results = tasks
        .par_iter()
        .map(|&(i, s, omega)| {
            let r = solve(ctx, &grid, s, omega)?;
            save_field(ctx.out.join(format!("phi_{i:03}.flnls")), &r.phi, s, None)?;
            Ok((i, s, omega, r.d_omega, bound(s, omega, grid.dim())?, r.residual, r.converged))
        })
        .collect::<Result<Vec<_>, Failure>>()?;

    let rows: Vec<Vec<String>> = results
        .iter()
        .map(|&(i, s, w, d, b, res, conv)| {
            vec![
                format!("phi_{i:03}.flnls"),
                float(s),
                float(w),
                float(d),
                float(b),
                float(res),
                conv.to_string(),
            ]
        })
        .collect();
    write_csv(
        &ctx.out.join("sweep.csv"),
        &["file", "s", "omega", "d_omega", "bound", "residual", "converged"],
        &rows,
    )?;

    let e = std::f64::consts::E;
    let mut scaling = Vec::new();
    for a in &results {
        for b in &results {
            if a.1 == b.1 && b.2 == a.2 + 1.0 {
                let ratio = b.3 / a.3;
                let rel = (ratio - e).abs() / e;
                scaling.push(vec![
                    float(a.1),
                    float(a.2),
                    float(b.2),
                    float(ratio),
                    float(rel),
                    (rel <= SCALING_TOL).to_string(),
                ]);
            }
        }
    }
    write_csv(
        &ctx.out.join("scaling.csv"),
        &["s", "omega", "omega_next", "ratio", "rel_error_vs_e", "pass"],
        &scaling,
    )?;

    let stuck: Vec<String> = results
        .iter()
        .filter(|r| !r.6)
        .map(|r| format!("(s = {}, omega = {})", r.1, r.2))
        .collect();
    if stuck.is_empty() {
        Ok(())
    } else {
        Err(Failure::NotConverged(format!("not converged at {}", stuck.join(", "))))
    }
}
