//! Run configuration: one TOML file with a section per command. Every
//! section and key is optional and falls back to the defaults below;
//! unknown keys are rejected.

use std::path::{Path, PathBuf};

use fraclog::{Grid64, GroundStateInit, GroundStateParams64};
use serde::{Deserialize, Serialize};

use crate::Failure;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub grid: GridSpec,
    pub groundstate: GroundStateSection,
    pub evolve: EvolveSection,
    pub verify: VerifySection,
    pub stability: StabilitySection,
    pub sweep: SweepSection,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub dim: usize,
    pub n: usize,
    pub extent: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            dim: 1,
            n: 256,
            extent: 32.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GroundStateSection {
    pub s: f64,
    pub omega: f64,
    /// Width of the Gaussian starting guess.
    pub width: f64,
    /// Overrides the default step derived from the grid.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step_size: Option<f64>,
    pub max_iters: usize,
    pub action_tol: f64,
    pub residual_tol: f64,
    /// Start from the modulus of a stored field instead of a Gaussian.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init_file: Option<PathBuf>,
}

impl Default for GroundStateSection {
    fn default() -> Self {
        Self {
            s: 1.0,
            omega: 0.0,
            width: 2.0,
            step_size: None,
            max_iters: 200_000,
            action_tol: 1e-13,
            residual_tol: 1e-7,
            init_file: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    #[default]
    Gaussian,
    PlaneWave,
    File,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvolveSection {
    pub s: f64,
    pub m: u64,
    pub tau: f64,
    pub t_final: f64,
    pub snapshot_every: usize,
    pub init: InitKind,
    /// Gaussian `amplitude·e^{−|x|²/(2·width²)}` or plane-wave amplitude.
    pub amplitude: f64,
    pub width: f64,
    /// Plane-wave periods across the torus per axis.
    pub mode: [i64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init_file: Option<PathBuf>,
    pub write_snapshots: bool,
    pub max_charge_drift: f64,
    pub max_energy_drift: f64,
}

impl Default for EvolveSection {
    fn default() -> Self {
        Self {
            s: 0.5,
            m: 100,
            tau: 1e-3,
            t_final: 10.0,
            snapshot_every: 100,
            init: InitKind::Gaussian,
            amplitude: 1.0,
            width: 1.0,
            mode: [1, 0],
            init_file: None,
            write_snapshots: true,
            max_charge_drift: 1e-10,
            max_energy_drift: 1e-6,
        }
    }
}

pub const SUITES: [&str; 5] = ["log_sobolev", "orlicz", "gradient", "identity", "a_convexity"];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub suites: Vec<String>,
    /// Base case count; suites scale it (orlicz ×5, gradient ÷5, identity ×2).
    pub cases: usize,
    pub seed: u64,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            suites: SUITES.iter().map(|s| s.to_string()).collect(),
            cases: 100,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StabilitySection {
    pub s: f64,
    pub omega: f64,
    pub delta: f64,
    pub tau: f64,
    pub t_final: f64,
    pub m: u64,
    pub snapshot_every: usize,
    pub ratio: f64,
    pub seeds: Vec<u64>,
    /// Stored ground state; computed inline from `[groundstate]` settings
    /// (with this section's `s` and `omega`) when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ground_state_file: Option<PathBuf>,
}

impl Default for StabilitySection {
    fn default() -> Self {
        Self {
            s: 1.0,
            omega: 0.0,
            delta: 1e-2,
            tau: 2e-3,
            t_final: 20.0,
            m: 100_000_000,
            snapshot_every: 100,
            ratio: 10.0,
            seeds: vec![1, 2, 3, 4, 5],
            ground_state_file: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepSection {
    pub s: Vec<f64>,
    pub omega: Vec<f64>,
}

impl Default for SweepSection {
    fn default() -> Self {
        Self {
            s: vec![0.5],
            omega: vec![-1.0, 0.0, 1.0],
        }
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        toml::from_str(text).map_err(|e| Failure::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Reads `path`; relative file references inside are resolved against
    /// the directory holding the config.
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)
            .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for file in [
            &mut cfg.groundstate.init_file,
            &mut cfg.evolve.init_file,
            &mut cfg.stability.ground_state_file,
        ]
        .into_iter()
        .flatten()
        {
            if file.is_relative() {
                *file = base.join(&*file);
            }
        }
        Ok(cfg)
    }
}

fn bad(field: &str, reason: impl std::fmt::Display) -> Failure {
    Failure::Config(format!("{field}: {reason}"))
}

pub(crate) fn positive(field: &str, v: f64) -> Result<(), Failure> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(bad(field, format!("must be positive and finite, got {v}")))
    }
}

fn order(field: &str, s: f64) -> Result<(), Failure> {
    if s > 0.0 && s <= 1.0 {
        Ok(())
    } else {
        Err(bad(field, format!("must lie in (0, 1], got {s}")))
    }
}

fn finite(field: &str, v: f64) -> Result<(), Failure> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(bad(field, format!("must be finite, got {v}")))
    }
}

pub(crate) fn existing(field: &str, path: &Path) -> Result<(), Failure> {
    if path.is_file() {
        Ok(())
    } else {
        Err(bad(field, format!("file {} does not exist", path.display())))
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<Grid64, Failure> {
        if self.dim != 1 && self.dim != 2 {
            return Err(bad("grid.dim", format!("must be 1 or 2, got {}", self.dim)));
        }
        if self.n < 8 || !self.n.is_power_of_two() {
            return Err(bad(
                "grid.n",
                format!("must be a power of two and at least 8, got {}", self.n),
            ));
        }
        positive("grid.extent", self.extent)?;
        Grid64::new(self.dim, self.n, self.extent).map_err(|e| bad("grid", e))
    }
}

impl GroundStateSection {
    pub fn validate(&self, prefix: &str) -> Result<(), Failure> {
        order(&format!("{prefix}.s"), self.s)?;
        finite(&format!("{prefix}.omega"), self.omega)?;
        positive(&format!("{prefix}.width"), self.width)?;
        if let Some(step) = self.step_size {
            positive(&format!("{prefix}.step_size"), step)?;
        }
        if self.max_iters == 0 {
            return Err(bad(&format!("{prefix}.max_iters"), "must be at least 1"));
        }
        positive(&format!("{prefix}.action_tol"), self.action_tol)?;
        positive(&format!("{prefix}.residual_tol"), self.residual_tol)?;
        if let Some(file) = &self.init_file {
            existing(&format!("{prefix}.init_file"), file)?;
        }
        Ok(())
    }

    /// Solver parameters at `(s, omega)` on `grid`.
    pub fn params(
        &self,
        grid: &Grid64,
        s: f64,
        omega: f64,
    ) -> Result<GroundStateParams64, Failure> {
        let mut p = GroundStateParams64::new(grid, s, omega);
        p.init = match &self.init_file {
            Some(path) => {
                let file = fraclog::load_field::<f64>(path)
                    .map_err(|e| bad("groundstate.init_file", e))?;
                if file.field.grid() != grid {
                    return Err(bad("groundstate.init_file", "grid differs from [grid]"));
                }
                GroundStateInit::Custom(file.field)
            }
            None => GroundStateInit::Gaussian { width: self.width },
        };
        if let Some(step) = self.step_size {
            p.step_size = step;
        }
        p.max_iters = self.max_iters;
        p.action_tol = self.action_tol;
        p.residual_tol = self.residual_tol;
        Ok(p)
    }
}

impl EvolveSection {
    pub fn validate(&self) -> Result<(), Failure> {
        order("evolve.s", self.s)?;
        if self.m == 0 {
            return Err(bad("evolve.m", "must be at least 1"));
        }
        positive("evolve.tau", self.tau)?;
        if !(self.t_final >= 0.0 && self.t_final.is_finite()) {
            return Err(bad(
                "evolve.t_final",
                format!("must be nonnegative and finite, got {}", self.t_final),
            ));
        }
        if self.snapshot_every == 0 {
            return Err(bad("evolve.snapshot_every", "must be at least 1"));
        }
        positive("evolve.width", self.width)?;
        finite("evolve.amplitude", self.amplitude)?;
        positive("evolve.max_charge_drift", self.max_charge_drift)?;
        positive("evolve.max_energy_drift", self.max_energy_drift)?;
        if self.init == InitKind::PlaneWave {
            positive("evolve.amplitude", self.amplitude)?;
        }
        if self.init == InitKind::File {
            match &self.init_file {
                Some(file) => existing("evolve.init_file", file)?,
                None => return Err(bad("evolve.init_file", "required when init = \"file\"")),
            }
        }
        Ok(())
    }
}

impl VerifySection {
    pub fn validate(&self) -> Result<(), Failure> {
        for suite in &self.suites {
            if !SUITES.contains(&suite.as_str()) {
                return Err(bad(
                    "verify.suites",
                    format!("unknown suite {suite:?}, expected one of {SUITES:?}"),
                ));
            }
        }
        if self.cases == 0 {
            return Err(bad("verify.cases", "must be at least 1"));
        }
        Ok(())
    }
}

impl StabilitySection {
    pub fn validate(&self) -> Result<(), Failure> {
        order("stability.s", self.s)?;
        finite("stability.omega", self.omega)?;
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(bad(
                "stability.delta",
                format!("must be nonnegative and finite, got {}", self.delta),
            ));
        }
        positive("stability.tau", self.tau)?;
        positive("stability.t_final", self.t_final)?;
        if self.m == 0 {
            return Err(bad("stability.m", "must be at least 1"));
        }
        if self.snapshot_every == 0 {
            return Err(bad("stability.snapshot_every", "must be at least 1"));
        }
        positive("stability.ratio", self.ratio)?;
        if self.seeds.is_empty() {
            return Err(bad("stability.seeds", "must list at least one seed"));
        }
        if let Some(file) = &self.ground_state_file {
            existing("stability.ground_state_file", file)?;
        }
        Ok(())
    }
}

impl SweepSection {
    pub fn validate(&self) -> Result<(), Failure> {
        if self.s.is_empty() || self.omega.is_empty() {
            return Err(bad("sweep", "s and omega must both be nonempty"));
        }
        for &s in &self.s {
            order("sweep.s", s)?;
        }
        for &w in &self.omega {
            finite("sweep.omega", w)?;
        }
        Ok(())
    }
}
