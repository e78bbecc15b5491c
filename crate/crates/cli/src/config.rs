//! Run parameters: a JSON file overlaid by command-line flags.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::cli::{Cli, Command, DGridArgs, Format, ScenarioArgs};
use crate::CliError;

pub const DEFAULT_MU: f64 = 0.1;
pub const DEFAULT_ETA_DET: f64 = 0.2;
pub const DEFAULT_SEED: u64 = 1;

/// Every parameter any subcommand reads. Keys match the long flags with
/// dashes turned into underscores.
#[derive(Deserialize, Debug, Default, Clone, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mu: Option<f64>,
    pub eta_det: Option<EtaList>,
    pub eta_t: Option<f64>,
    pub loss_db: Option<f64>,
    pub e: Option<f64>,
    pub d_min: Option<f64>,
    pub d_max: Option<f64>,
    pub steps: Option<usize>,
    pub loss_min: Option<f64>,
    pub loss_max: Option<f64>,
    pub loss_steps: Option<usize>,
    pub gamma_min: Option<f64>,
    pub gamma_max: Option<f64>,
    pub gamma_steps: Option<usize>,
    pub pulses: Option<u64>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
}

/// `eta_det` may be a number or a list of numbers.
#[derive(Deserialize, Debug, Clone, PartialEq)]
#[serde(untagged)]
pub enum EtaList {
    One(f64),
    Many(Vec<f64>),
}

impl EtaList {
    pub fn values(&self) -> Vec<f64> {
        match self {
            EtaList::One(x) => vec![*x],
            EtaList::Many(v) => v.clone(),
        }
    }
}

/// An evenly spaced grid, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(name: &str, min: f64, max: f64, steps: usize) -> Result<Self, CliError> {
        if !(min.is_finite() && max.is_finite() && min < max) {
            return Err(CliError::Usage(format!("{name} grid needs min < max, got {min} and {max}")));
        }
        if steps < 2 {
            return Err(CliError::Usage(format!("{name} grid needs at least 2 steps, got {steps}")));
        }
        Ok(Self { min, max, steps })
    }

    pub fn points(&self) -> Vec<f64> {
        qel_core::attacks::uniform_grid(self.min, self.max, self.steps)
    }
}

fn read_file(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
}

fn overlay_scenario(cfg: &mut RunConfig, s: &ScenarioArgs) {
    if s.mu.is_some() {
        cfg.mu = s.mu;
    }
    if let Some(x) = s.eta_det {
        cfg.eta_det = Some(EtaList::One(x));
    }
}

fn overlay_d_grid(cfg: &mut RunConfig, g: &DGridArgs) {
    cfg.d_min = g.d_min.or(cfg.d_min);
    cfg.d_max = g.d_max.or(cfg.d_max);
    cfg.steps = g.steps.or(cfg.steps);
}

/// File values first, then every flag that was given.
pub fn resolve(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => read_file(path)?,
        None => RunConfig::default(),
    };
    cfg.format = cli.format.or(cfg.format);
    cfg.output = cli.output.clone().or(cfg.output.take());
    cfg.seed = cli.seed.or(cfg.seed);
    match &cli.command {
        Command::InfoCurves(a) => {
            if !a.eta_det.is_empty() {
                cfg.eta_det = Some(EtaList::Many(a.eta_det.clone()));
            }
            overlay_d_grid(&mut cfg, &a.grid);
        }
        Command::ErrorMap(a) => {
            overlay_scenario(&mut cfg, &a.scenario);
            overlay_d_grid(&mut cfg, &a.grid);
            if a.loss_db.is_some() || a.eta_t.is_some() || a.loss_min.is_some() || a.loss_max.is_some() || a.loss_steps.is_some() {
                // a loss given on the command line replaces whatever loss the file chose
                cfg.loss_db = a.loss_db;
                cfg.eta_t = a.eta_t;
            }
            cfg.loss_min = a.loss_min.or(cfg.loss_min);
            cfg.loss_max = a.loss_max.or(cfg.loss_max);
            cfg.loss_steps = a.loss_steps.or(cfg.loss_steps);
        }
        Command::Bounds(s) => overlay_scenario(&mut cfg, s),
        Command::Crossover(a) => {
            overlay_scenario(&mut cfg, &a.scenario);
            cfg.e = a.e.or(cfg.e);
        }
        Command::Verify(a) => cfg.pulses = a.pulses.or(cfg.pulses),
        Command::Coefficients(a) => {
            cfg.gamma_min = a.gamma_min.or(cfg.gamma_min);
            cfg.gamma_max = a.gamma_max.or(cfg.gamma_max);
            cfg.gamma_steps = a.gamma_steps.or(cfg.gamma_steps);
        }
    }
    if cfg.eta_t.is_some() && cfg.loss_db.is_some() {
        return Err(CliError::Usage("eta_t and loss_db are mutually exclusive".into()));
    }
    Ok(cfg)
}

impl RunConfig {
    pub fn mu(&self) -> f64 {
        self.mu.unwrap_or(DEFAULT_MU)
    }

    pub fn eta_dets(&self) -> Vec<f64> {
        self.eta_det.as_ref().map_or_else(|| vec![DEFAULT_ETA_DET], EtaList::values)
    }

    /// The single detector efficiency of commands that take one.
    pub fn eta_det(&self) -> Result<f64, CliError> {
        match self.eta_dets().as_slice() {
            [x] => Ok(*x),
            v => Err(CliError::Usage(format!("expected one eta_det, got {}", v.len()))),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn d_grid(&self, default_steps: usize) -> Result<Grid, CliError> {
        let g = Grid::new("D", self.d_min.unwrap_or(0.0), self.d_max.unwrap_or(0.5), self.steps.unwrap_or(default_steps))?;
        if g.min < 0.0 || g.max > 0.5 {
            return Err(CliError::Usage(format!("D grid must lie in [0, 0.5], got [{}, {}]", g.min, g.max)));
        }
        Ok(g)
    }

    pub fn gamma_grid(&self) -> Result<Grid, CliError> {
        let g = Grid::new(
            "gamma",
            self.gamma_min.unwrap_or(0.0),
            self.gamma_max.unwrap_or(std::f64::consts::PI),
            self.gamma_steps.unwrap_or(50),
        )?;
        if g.min < 0.0 || g.max > std::f64::consts::PI + 1e-12 {
            return Err(CliError::Usage(format!("gamma grid must lie in [0, pi], got [{}, {}]", g.min, g.max)));
        }
        Ok(Grid { max: g.max.min(std::f64::consts::PI), ..g })
    }

    pub fn single_loss(&self) -> bool {
        self.loss_db.is_some() || self.eta_t.is_some()
    }

    /// Losses for the error map: the single loss if one was given, else the
    /// loss grid (1 to 13 dB in 1 dB steps by default).
    pub fn losses(&self) -> Result<Vec<f64>, CliError> {
        if let Some(l) = self.loss_db {
            return Ok(vec![l]);
        }
        if let Some(t) = self.eta_t {
            if !(t > 0.0 && t <= 1.0) {
                return Err(CliError::Usage(format!("eta_t must lie in (0, 1], got {t}")));
            }
            return Ok(vec![qel_core::channel::loss_db_from_eta(t)]);
        }
        let g = Grid::new("loss", self.loss_min.unwrap_or(1.0), self.loss_max.unwrap_or(13.0), self.loss_steps.unwrap_or(13))?;
        Ok(g.points())
    }
}
